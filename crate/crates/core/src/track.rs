//! Combinatorial train tracks on punctured spheres.
//!
//! A track is a ribbon graph whose vertices (switches) have exactly three
//! slots in counterclockwise order: `Large`, `SmallLeft`, `SmallRight`.
//! Each branch has two ends, numbered 0 and 1, and each end occupies one
//! slot. Complementary regions are the boundary walks of the ribbon
//! structure; punctures are assigned per region.
//!
//! Darts are indexed `2 * branch + end`. The dart of an end leaves the
//! switch holding that end. Rotation `next_ccw` moves to the next slot of
//! the same switch and faces are the cycles of `d -> next_ccw(opposite(d))`.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;
use std::fmt::Write as _;

use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Slot {
    Large = 0,
    SmallLeft = 1,
    SmallRight = 2,
}

impl Slot {
    pub const ALL: [Slot; 3] = [Slot::Large, Slot::SmallLeft, Slot::SmallRight];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Slot {
        Slot::ALL[i % 3]
    }

    pub fn is_small(self) -> bool {
        self != Slot::Large
    }
}

/// One end of a branch.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BranchEnd {
    pub branch: usize,
    pub end: u8,
}

impl BranchEnd {
    pub fn new(branch: usize, end: u8) -> Self {
        BranchEnd { branch, end }
    }

    pub fn dart(self) -> usize {
        2 * self.branch + self.end as usize
    }

    pub fn from_dart(d: usize) -> Self {
        BranchEnd {
            branch: d / 2,
            end: (d % 2) as u8,
        }
    }

    pub fn opposite(self) -> Self {
        BranchEnd {
            branch: self.branch,
            end: 1 - self.end,
        }
    }
}

impl fmt::Display for BranchEnd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.branch, self.end)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Surface {
    pub genus: u32,
    pub punctures: u32,
}

impl Surface {
    pub const S05: Surface = Surface {
        genus: 0,
        punctures: 5,
    };

    pub fn sphere(punctures: u32) -> Self {
        Surface { genus: 0, punctures }
    }

    pub fn euler_characteristic(&self) -> i64 {
        2 - 2 * self.genus as i64 - self.punctures as i64
    }

    pub fn complexity(&self) -> i64 {
        3 * self.genus as i64 - 3 + self.punctures as i64
    }
}

/// Position of a branch end: switch index and slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SlotRef {
    pub switch: usize,
    pub slot: Slot,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrainTrack {
    surface: Surface,
    branch_count: usize,
    switches: Vec<[Option<BranchEnd>; 3]>,
    face_punctures: Vec<u32>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TrackError {
    #[error("invalid track: {0}")]
    Invalid(ValidationReport),
    #[error("unsupported surface genus {0}")]
    UnsupportedGenus(u32),
    #[error("branch {0} is not a large branch")]
    NotLarge(usize),
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// A single violated invariant with its witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    EmptySlot { switch: usize, slot: Slot },
    BranchOutOfRange { switch: usize, slot: Slot, end: BranchEnd },
    EndReused { end: BranchEnd, first: SlotRef, second: SlotRef },
    EndUnused { end: BranchEnd },
    Disconnected { components: usize },
    FaceCountMismatch { declared: usize, computed: usize },
    GenusMismatch { ribbon_genus: i64, surface_genus: u32 },
    PunctureSumMismatch { assigned: u32, surface: u32 },
    EulerMismatch { twice_sum: i64, twice_chi: i64 },
    NoSwitches,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptySlot { switch, slot } => {
                write!(f, "unused slot {slot:?} at switch {switch}")
            }
            Violation::BranchOutOfRange { switch, slot, end } => {
                write!(f, "slot {slot:?} at switch {switch} names unknown branch end {end}")
            }
            Violation::EndReused { end, first, second } => write!(
                f,
                "branch end {end} used twice (switch {} and switch {})",
                first.switch, second.switch
            ),
            Violation::EndUnused { end } => write!(f, "branch end {end} occupies no slot"),
            Violation::Disconnected { components } => {
                write!(f, "track has {components} connected components")
            }
            Violation::FaceCountMismatch { declared, computed } => write!(
                f,
                "{declared} faces declared but the ribbon structure has {computed}"
            ),
            Violation::GenusMismatch {
                ribbon_genus,
                surface_genus,
            } => write!(
                f,
                "ribbon genus {ribbon_genus} differs from surface genus {surface_genus}"
            ),
            Violation::PunctureSumMismatch { assigned, surface } => write!(
                f,
                "faces carry {assigned} punctures but the surface has {surface}"
            ),
            Violation::EulerMismatch {
                twice_sum,
                twice_chi,
            } => write!(
                f,
                "generalized Euler sum {twice_sum}/2 differs from chi = {twice_chi}/2"
            ),
            Violation::NoSwitches => write!(f, "track has no switches"),
        }
    }
}

/// Every violated invariant of a candidate track; empty iff valid.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        let parts: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", parts.join("; "))
    }
}

/// Census entry of one complementary region.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RegionShape {
    /// Euler characteristic of the open region before removing punctures.
    pub euler: i64,
    pub cusps: u32,
    pub punctures: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RegionLabel {
    Triangle,
    PuncturedMonogon,
    PuncturedBigon,
    Other,
}

impl RegionShape {
    pub fn is_disc(&self) -> bool {
        self.euler == 1
    }

    pub fn label(&self) -> RegionLabel {
        match (self.is_disc(), self.cusps, self.punctures) {
            (true, 3, 0) => RegionLabel::Triangle,
            (true, 1, 1) => RegionLabel::PuncturedMonogon,
            (true, 2, 1) => RegionLabel::PuncturedBigon,
            _ => RegionLabel::Other,
        }
    }

    /// Twice the generalized Euler characteristic `chi - m - k/2`.
    pub fn twice_contribution(&self) -> i64 {
        2 * self.euler - 2 * self.punctures as i64 - self.cusps as i64
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegionCensus {
    pub regions: Vec<RegionShape>,
}

impl RegionCensus {
    pub fn count(&self, label: RegionLabel) -> usize {
        self.regions.iter().filter(|r| r.label() == label).count()
    }

    pub fn total_cusps(&self) -> u32 {
        self.regions.iter().map(|r| r.cusps).sum()
    }

    /// Twice the sum of generalized Euler characteristics.
    pub fn twice_euler_sum(&self) -> i64 {
        self.regions.iter().map(|r| r.twice_contribution()).sum()
    }

    /// Five once-punctured monogons and one triangle.
    pub fn is_complete_pattern(&self) -> bool {
        self.regions.len() == 6
            && self.count(RegionLabel::PuncturedMonogon) == 5
            && self.count(RegionLabel::Triangle) == 1
    }

    /// Four once-punctured monogons and one once-punctured bigon.
    pub fn is_nearly_complete_pattern(&self) -> bool {
        self.regions.len() == 5
            && self.count(RegionLabel::PuncturedMonogon) == 4
            && self.count(RegionLabel::PuncturedBigon) == 1
    }

    pub fn summary(&self) -> String {
        let mut counts: BTreeMap<String, usize> = BTreeMap::new();
        for r in &self.regions {
            let key = match r.label() {
                RegionLabel::Triangle => "triangle".to_string(),
                RegionLabel::PuncturedMonogon => "once-punctured monogon".to_string(),
                RegionLabel::PuncturedBigon => "once-punctured bigon".to_string(),
                RegionLabel::Other => format!(
                    "region(chi={},cusps={},punctures={})",
                    r.euler, r.cusps, r.punctures
                ),
            };
            *counts.entry(key).or_default() += 1;
        }
        let parts: Vec<String> = counts.iter().map(|(k, v)| format!("{k} x{v}")).collect();
        format!("{{{}}}", parts.join(", "))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BranchKind {
    Large,
    Small,
    Mixed,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchClassification {
    pub kinds: Vec<BranchKind>,
}

impl BranchClassification {
    pub fn large_branches(&self) -> Vec<usize> {
        (0..self.kinds.len())
            .filter(|&b| self.kinds[b] == BranchKind::Large)
            .collect()
    }
}

/// Canonical string of a track up to ribbon isomorphism respecting slots
/// and puncture counts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalForm(pub String);

impl CanonicalForm {
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.0.as_bytes()))
    }
}

impl TrainTrack {
    /// Builds a track without validating it; see [`validate_track`].
    pub fn from_parts(
        surface: Surface,
        branch_count: usize,
        switches: Vec<[Option<BranchEnd>; 3]>,
        face_punctures: Vec<u32>,
    ) -> Self {
        TrainTrack {
            surface,
            branch_count,
            switches,
            face_punctures,
        }
    }

    /// Builds and validates.
    pub fn new(
        surface: Surface,
        branch_count: usize,
        switches: Vec<[BranchEnd; 3]>,
        face_punctures: Vec<u32>,
    ) -> Result<Self, TrackError> {
        let t = Self::from_parts(
            surface,
            branch_count,
            switches
                .into_iter()
                .map(|s| [Some(s[0]), Some(s[1]), Some(s[2])])
                .collect(),
            face_punctures,
        );
        let report = validate_track(&t);
        if report.is_valid() {
            Ok(t)
        } else {
            Err(TrackError::Invalid(report))
        }
    }

    pub fn surface(&self) -> Surface {
        self.surface
    }

    pub fn branch_count(&self) -> usize {
        self.branch_count
    }

    pub fn switch_count(&self) -> usize {
        self.switches.len()
    }

    pub fn face_punctures(&self) -> &[u32] {
        &self.face_punctures
    }

    pub fn raw_switches(&self) -> &[[Option<BranchEnd>; 3]] {
        &self.switches
    }

    /// Occupant of a slot. Panics on an empty slot (invalid track).
    pub fn at(&self, switch: usize, slot: Slot) -> BranchEnd {
        self.switches[switch][slot.index()].expect("slot occupied in a valid track")
    }

    /// Table from dart index to slot position; valid tracks only.
    pub fn positions(&self) -> Vec<SlotRef> {
        let mut pos = vec![
            SlotRef {
                switch: usize::MAX,
                slot: Slot::Large
            };
            2 * self.branch_count
        ];
        for (s, slots) in self.switches.iter().enumerate() {
            for (k, occ) in slots.iter().enumerate() {
                if let Some(e) = occ {
                    if e.branch < self.branch_count && e.end < 2 {
                        pos[e.dart()] = SlotRef {
                            switch: s,
                            slot: Slot::from_index(k),
                        };
                    }
                }
            }
        }
        pos
    }

    pub fn ribbon(&self) -> Ribbon<'_> {
        Ribbon::new(self)
    }

    /// Replaces the puncture assignment (faces in canonical face order).
    pub fn with_punctures(&self, face_punctures: Vec<u32>) -> Self {
        TrainTrack {
            face_punctures,
            ..self.clone()
        }
    }

    pub fn with_surface(&self, surface: Surface) -> Self {
        TrainTrack {
            surface,
            ..self.clone()
        }
    }
}

/// Derived ribbon structure of a valid track.
pub struct Ribbon<'a> {
    pub track: &'a TrainTrack,
    pub pos: Vec<SlotRef>,
    /// Face index of each dart.
    pub face_of: Vec<usize>,
    /// Faces as dart cycles, ordered by smallest dart.
    pub faces: Vec<Vec<usize>>,
}

impl<'a> Ribbon<'a> {
    fn new(track: &'a TrainTrack) -> Self {
        let pos = track.positions();
        let n = pos.len();
        let mut r = Ribbon {
            track,
            pos,
            face_of: vec![usize::MAX; n],
            faces: Vec::new(),
        };
        for d in 0..n {
            if r.face_of[d] != usize::MAX {
                continue;
            }
            let f = r.faces.len();
            let mut cycle = Vec::new();
            let mut x = d;
            loop {
                r.face_of[x] = f;
                cycle.push(x);
                x = r.face_step(x);
                if x == d {
                    break;
                }
            }
            r.faces.push(cycle);
        }
        r
    }

    pub fn next_ccw(&self, d: usize) -> usize {
        let p = self.pos[d];
        self.track
            .at(p.switch, Slot::from_index(p.slot.index() + 1))
            .dart()
    }

    pub fn face_step(&self, d: usize) -> usize {
        self.next_ccw(d ^ 1)
    }

    /// The face holding the cusp of a switch.
    pub fn cusp_face(&self, switch: usize) -> usize {
        self.face_of[self.track.at(switch, Slot::SmallRight).dart()]
    }

    /// True when the corner entered after traversing dart `d` is a cusp.
    pub fn corner_after_is_cusp(&self, d: usize) -> bool {
        let arrive = self.pos[d ^ 1];
        arrive.slot == Slot::SmallLeft
    }

    /// Sides of a face: maximal dart runs between consecutive cusps. A face
    /// without cusps has a single side.
    pub fn face_sides(&self, face: usize) -> Vec<Vec<usize>> {
        let cycle = &self.faces[face];
        let n = cycle.len();
        let cusp_after: Vec<bool> = cycle.iter().map(|&d| self.corner_after_is_cusp(d)).collect();
        let Some(first_cut) = (0..n).find(|&i| cusp_after[i]) else {
            return vec![cycle.clone()];
        };
        let mut sides = Vec::new();
        let mut current = Vec::new();
        for step in 1..=n {
            let i = (first_cut + step) % n;
            current.push(cycle[i]);
            if cusp_after[i] {
                sides.push(std::mem::take(&mut current));
            }
        }
        sides
    }
}

/// Checks every structural invariant and reports all violations.
pub fn validate_track(t: &TrainTrack) -> ValidationReport {
    let mut violations = Vec::new();
    if t.switches.is_empty() {
        violations.push(Violation::NoSwitches);
    }
    let mut seen: BTreeMap<BranchEnd, SlotRef> = BTreeMap::new();
    for (s, slots) in t.switches.iter().enumerate() {
        for (k, occ) in slots.iter().enumerate() {
            let slot = Slot::from_index(k);
            match occ {
                None => violations.push(Violation::EmptySlot { switch: s, slot }),
                Some(e) if e.branch >= t.branch_count || e.end > 1 => {
                    violations.push(Violation::BranchOutOfRange {
                        switch: s,
                        slot,
                        end: *e,
                    })
                }
                Some(e) => {
                    let here = SlotRef { switch: s, slot };
                    if let Some(first) = seen.get(e) {
                        violations.push(Violation::EndReused {
                            end: *e,
                            first: *first,
                            second: here,
                        });
                    } else {
                        seen.insert(*e, here);
                    }
                }
            }
        }
    }
    for b in 0..t.branch_count {
        for end in 0..2u8 {
            let e = BranchEnd::new(b, end);
            if !seen.contains_key(&e) {
                violations.push(Violation::EndUnused { end: e });
            }
        }
    }
    if !violations.is_empty() {
        return ValidationReport { violations };
    }

    // Connectivity through branches.
    let mut comp: Vec<usize> = (0..t.switches.len()).collect();
    fn find(c: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while c[r] != r {
            r = c[r];
        }
        let mut y = x;
        while c[y] != r {
            let nxt = c[y];
            c[y] = r;
            y = nxt;
        }
        r
    }
    let pos = t.positions();
    for b in 0..t.branch_count {
        let a = find(&mut comp, pos[2 * b].switch);
        let c = find(&mut comp, pos[2 * b + 1].switch);
        comp[a] = c;
    }
    let roots = (0..t.switches.len())
        .filter(|&s| find(&mut comp, s) == s)
        .count();
    if roots != 1 {
        violations.push(Violation::Disconnected { components: roots });
    }

    let ribbon = t.ribbon();
    let f = ribbon.faces.len();
    let v = t.switches.len() as i64;
    let e = t.branch_count as i64;
    let twice_genus = 2 - v + e - f as i64;
    if twice_genus != 2 * t.surface.genus as i64 {
        violations.push(Violation::GenusMismatch {
            ribbon_genus: twice_genus / 2,
            surface_genus: t.surface.genus,
        });
    }
    if t.face_punctures.len() != f {
        violations.push(Violation::FaceCountMismatch {
            declared: t.face_punctures.len(),
            computed: f,
        });
        return ValidationReport { violations };
    }
    let assigned: u32 = t.face_punctures.iter().sum();
    if assigned != t.surface.punctures {
        violations.push(Violation::PunctureSumMismatch {
            assigned,
            surface: t.surface.punctures,
        });
    }
    let census = census_of(&ribbon);
    let twice_chi = 2 * t.surface.euler_characteristic();
    if census.twice_euler_sum() != twice_chi {
        violations.push(Violation::EulerMismatch {
            twice_sum: census.twice_euler_sum(),
            twice_chi,
        });
    }
    ValidationReport { violations }
}

fn census_of(ribbon: &Ribbon<'_>) -> RegionCensus {
    let t = ribbon.track;
    let mut cusps = vec![0u32; ribbon.faces.len()];
    for s in 0..t.switch_count() {
        cusps[ribbon.cusp_face(s)] += 1;
    }
    RegionCensus {
        regions: (0..ribbon.faces.len())
            .map(|f| RegionShape {
                euler: 1,
                cusps: cusps[f],
                punctures: t.face_punctures.get(f).copied().unwrap_or(0),
            })
            .collect(),
    }
}

/// Complementary regions of a valid track with cusp and puncture counts.
pub fn region_census(t: &TrainTrack) -> RegionCensus {
    census_of(&t.ribbon())
}

pub fn classify_branches(t: &TrainTrack) -> BranchClassification {
    let pos = t.positions();
    let kinds = (0..t.branch_count())
        .map(|b| {
            let l0 = pos[2 * b].slot == Slot::Large;
            let l1 = pos[2 * b + 1].slot == Slot::Large;
            match (l0, l1) {
                (true, true) => BranchKind::Large,
                (false, false) => BranchKind::Small,
                _ => BranchKind::Mixed,
            }
        })
        .collect();
    BranchClassification { kinds }
}

/// Canonical form by lexicographically minimal breadth-first slot encoding.
pub fn canonical_form(t: &TrainTrack) -> CanonicalForm {
    let ribbon = t.ribbon();
    let n = t.switch_count();
    let mut best: Option<String> = None;
    for start in 0..n {
        let mut label = vec![usize::MAX; n];
        let mut order = Vec::with_capacity(n);
        let mut queue = VecDeque::new();
        label[start] = 0;
        order.push(start);
        queue.push_back(start);
        while let Some(s) = queue.pop_front() {
            for slot in Slot::ALL {
                let other = ribbon.pos[t.at(s, slot).opposite().dart()].switch;
                if label[other] == usize::MAX {
                    label[other] = order.len();
                    order.push(other);
                    queue.push_back(other);
                }
            }
        }
        let mut enc = format!("g{}p{}|", t.surface.genus, t.surface.punctures);
        let mut face_seen: Vec<Option<usize>> = vec![None; ribbon.faces.len()];
        let mut face_seq = Vec::new();
        for &s in &order {
            for slot in Slot::ALL {
                let d = t.at(s, slot).dart();
                let there = ribbon.pos[d ^ 1];
                write!(enc, "{}.{},", label[there.switch], there.slot.index()).unwrap();
                let f = ribbon.face_of[d];
                if face_seen[f].is_none() {
                    face_seen[f] = Some(face_seq.len());
                    face_seq.push(t.face_punctures.get(f).copied().unwrap_or(0));
                }
            }
            enc.push(';');
        }
        enc.push('|');
        let fs: Vec<String> = face_seq.iter().map(|p| p.to_string()).collect();
        enc.push_str(&fs.join(","));
        if best.as_ref().is_none_or(|b| enc < *b) {
            best = Some(enc);
        }
    }
    CanonicalForm(best.unwrap_or_default())
}

pub fn is_isomorphic(a: &TrainTrack, b: &TrainTrack) -> bool {
    a.branch_count() == b.branch_count()
        && a.switch_count() == b.switch_count()
        && canonical_form(a) == canonical_form(b)
}

// ---------------------------------------------------------------------------
// Text format

pub const TRACK_HEADER: &str = "tracklab-track v1";

/// Writes the versioned track format. Switch lines list the occupants of
/// the `Large`, `SmallLeft`, `SmallRight` slots (counterclockwise) as
/// `branch.end`; face lines follow the order of faces by smallest dart.
pub fn write_track(t: &TrainTrack) -> String {
    let mut s = String::new();
    writeln!(s, "{TRACK_HEADER}").unwrap();
    writeln!(
        s,
        "surface genus {} punctures {}",
        t.surface.genus, t.surface.punctures
    )
    .unwrap();
    writeln!(s, "branches {}", t.branch_count).unwrap();
    for slots in &t.switches {
        let parts: Vec<String> = slots
            .iter()
            .map(|o| o.map_or("-".to_string(), |e| e.to_string()))
            .collect();
        writeln!(s, "switch {}", parts.join(" ")).unwrap();
    }
    for p in &t.face_punctures {
        writeln!(s, "face {p}").unwrap();
    }
    s.push_str("end\n");
    s
}

/// Parses one track block without validating it.
pub fn parse_track_unchecked(text: &str) -> Result<TrainTrack, TrackError> {
    parse_track_lines(&mut text.lines().enumerate().map(|(i, l)| (i + 1, l)))
}

pub(crate) fn parse_track_lines<'a>(
    lines: &mut impl Iterator<Item = (usize, &'a str)>,
) -> Result<TrainTrack, TrackError> {
    let err = |line: usize, message: &str| TrackError::Parse {
        line,
        message: message.to_string(),
    };
    let mut next = || -> Option<(usize, &'a str)> {
        for (n, l) in lines.by_ref() {
            let l = l.split('#').next().unwrap_or("").trim();
            if !l.is_empty() {
                return Some((n, l));
            }
        }
        None
    };
    let (n, header) = next().ok_or_else(|| err(0, "empty input"))?;
    if header != TRACK_HEADER {
        return Err(err(n, "bad header"));
    }
    let (n, surf) = next().ok_or_else(|| err(n, "missing surface line"))?;
    let w: Vec<&str> = surf.split_whitespace().collect();
    if w.len() != 5 || w[0] != "surface" || w[1] != "genus" || w[3] != "punctures" {
        return Err(err(n, "expected 'surface genus G punctures P'"));
    }
    let genus: u32 = w[2].parse().map_err(|_| err(n, "bad genus"))?;
    let punctures: u32 = w[4].parse().map_err(|_| err(n, "bad puncture count"))?;
    let (n, br) = next().ok_or_else(|| err(n, "missing branches line"))?;
    let branch_count: usize = br
        .strip_prefix("branches ")
        .and_then(|x| x.trim().parse().ok())
        .ok_or_else(|| err(n, "expected 'branches N'"))?;
    let mut switches = Vec::new();
    let mut faces = Vec::new();
    loop {
        let (n, l) = next().ok_or_else(|| err(n, "missing 'end'"))?;
        if l == "end" {
            break;
        }
        if let Some(rest) = l.strip_prefix("switch ") {
            let parts: Vec<&str> = rest.split_whitespace().collect();
            if parts.len() != 3 {
                return Err(err(n, "switch lines need three slot occupants"));
            }
            let mut slots = [None; 3];
            for (k, p) in parts.iter().enumerate() {
                if *p == "-" {
                    continue;
                }
                let (b, e) = p
                    .split_once('.')
                    .ok_or_else(|| err(n, "slot occupant must be 'branch.end'"))?;
                let b: usize = b.parse().map_err(|_| err(n, "bad branch index"))?;
                let e: u8 = e.parse().map_err(|_| err(n, "bad end index"))?;
                slots[k] = Some(BranchEnd::new(b, e));
            }
            switches.push(slots);
        } else if let Some(rest) = l.strip_prefix("face ") {
            faces.push(rest.trim().parse().map_err(|_| err(n, "bad puncture count"))?);
        } else {
            return Err(err(n, "unexpected line"));
        }
    }
    Ok(TrainTrack::from_parts(
        Surface { genus, punctures },
        branch_count,
        switches,
        faces,
    ))
}

/// Parses and revalidates a track.
pub fn read_track(text: &str) -> Result<TrainTrack, TrackError> {
    let t = parse_track_unchecked(text)?;
    let report = validate_track(&t);
    if report.is_valid() {
        Ok(t)
    } else {
        Err(TrackError::Invalid(report))
    }
}
