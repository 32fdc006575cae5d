//! Standard train tracks of the five-punctured sphere and the depth-0
//! partition built from them.
//!
//! The builder glues one puncture gadget per puncture onto a tree that
//! follows the pants decomposition. A gadget is a switch whose two small
//! slots hold the two ends of a loop around the puncture and whose large
//! slot holds a tail. The tails of punctures 1 and 2 meet the connector
//! `c1` at a switch in the first pair of pants, the tail of puncture 3 meets
//! `c1` and `c2` in the second, and the tails of punctures 4 and 5 meet `c2`
//! in the third. Each tree switch may order its three incident ends in any of
//! six ways (which one is large, and the cyclic order); this is the
//! twisting label. Every choice gives five once-punctured monogons and a
//! triangle; the complete ones are kept up to isomorphism.
//!
//! Nearly complete members are the nearly complete smoothed subtracks of
//! the complete ones.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::classify::{classify_track, TrackClass};
use crate::linalg::IntMatrix;
use crate::measures::{is_recurrent, is_transversely_recurrent, measure_cone, MeasureError};
use crate::partition::{Member, Partition, PartitionError, Step};
use crate::subtrack::{enumerate_subtracks, smooth, Subtrack};
use crate::track::{
    canonical_form, parse_track_lines, validate_track, write_track, BranchEnd, Surface,
    TrackError, TrainTrack,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pants {
    pub name: String,
    pub punctures: Vec<u32>,
    pub curves: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PantsDecomposition {
    pub curves: Vec<String>,
    pub pants: Vec<Pants>,
}

impl PantsDecomposition {
    /// `P1 = {1, 2, c1}`, `P2 = {c1, 3, c2}`, `P3 = {c2, 4, 5}`.
    pub fn chain() -> Self {
        let p = |name: &str, punctures: &[u32], curves: &[&str]| Pants {
            name: name.to_string(),
            punctures: punctures.to_vec(),
            curves: curves.iter().map(|c| c.to_string()).collect(),
        };
        PantsDecomposition {
            curves: vec!["c1".into(), "c2".into()],
            pants: vec![
                p("P1", &[1, 2], &["c1"]),
                p("P2", &[3], &["c1", "c2"]),
                p("P3", &[4, 5], &["c2"]),
            ],
        }
    }

    /// Each pair of pants has three boundary components, each puncture lies
    /// in exactly one, each curve bounds exactly two, and the counts match
    /// the surface.
    pub fn check(&self, s: Surface) -> Result<(), String> {
        let xi = 3 * s.genus as i64 - 3 + s.punctures as i64;
        if self.curves.len() as i64 != xi {
            return Err(format!("{} curves, expected {xi}", self.curves.len()));
        }
        let np = 2 * s.genus as i64 - 2 + s.punctures as i64;
        if self.pants.len() as i64 != np {
            return Err(format!("{} pants, expected {np}", self.pants.len()));
        }
        let mut seen = BTreeMap::new();
        for p in &self.pants {
            if p.punctures.len() + p.curves.len() != 3 {
                return Err(format!("{} does not have three boundary components", p.name));
            }
            for x in &p.punctures {
                *seen.entry(format!("p{x}")).or_insert(0) += 1;
            }
            for c in &p.curves {
                *seen.entry(c.clone()).or_insert(0) += 1;
            }
        }
        for x in 1..=s.punctures {
            if seen.get(&format!("p{x}")) != Some(&1) {
                return Err(format!("puncture {x} not in exactly one pair of pants"));
            }
        }
        for c in &self.curves {
            if seen.get(c) != Some(&2) {
                return Err(format!("curve {c} does not bound two pants"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum FamilyError {
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Track(#[from] TrackError),
    #[error("member {label}: {message}")]
    Member { label: String, message: String },
    #[error("members {0} and {1} have the same canonical form")]
    Duplicate(String, String),
    #[error("manifest mismatch: {0}")]
    Manifest(String),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
}

#[derive(Clone, Debug)]
pub struct FamilyMember {
    pub label: String,
    pub track: TrainTrack,
    /// Builder metadata: twisting labels, or the face relation.
    pub meta: String,
}

#[derive(Clone, Debug)]
pub struct NearlyMember {
    pub label: String,
    pub track: TrainTrack,
    /// Declared complete member having this track as a face.
    pub face_of: String,
    /// Branches of that member erased to obtain it.
    pub removed: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct StandardTrackFamily {
    pub pants: PantsDecomposition,
    pub complete: Vec<FamilyMember>,
    pub nearly: Vec<NearlyMember>,
}

// ---------------------------------------------------------------------------
// Builder

const LOOP: usize = 0; // loops 0..5
const TAIL: usize = 5; // tails 5..10
const C1: usize = 10;
const C2: usize = 11;

/// The three ends meeting at each tree switch, in a fixed reference order.
fn tree_ends() -> [[BranchEnd; 3]; 3] {
    let e = BranchEnd::new;
    [
        [e(TAIL, 1), e(TAIL + 1, 1), e(C1, 0)],
        [e(TAIL + 2, 1), e(C1, 1), e(C2, 0)],
        [e(TAIL + 3, 1), e(TAIL + 4, 1), e(C2, 1)],
    ]
}

const PERMS: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

/// Gadget track for one twisting choice (indices into the six orderings at
/// the three tree switches).
pub fn gadget_track(twist: [usize; 3]) -> Result<TrainTrack, TrackError> {
    let e = BranchEnd::new;
    let mut switches = Vec::with_capacity(8);
    for i in 0..5 {
        switches.push([e(TAIL + i, 0), e(LOOP + i, 0), e(LOOP + i, 1)]);
    }
    for (s, ends) in tree_ends().iter().enumerate() {
        let p = PERMS[twist[s]];
        switches.push([ends[p[0]], ends[p[1]], ends[p[2]]]);
    }
    let skeleton = TrainTrack::from_parts(
        Surface::S05,
        12,
        switches.iter().map(|s| s.map(Some)).collect(),
        Vec::new(),
    );
    let rib = skeleton.ribbon();
    let mut punct = vec![0u32; rib.faces.len()];
    for g in 0..5 {
        punct[rib.cusp_face(g)] += 1;
    }
    drop(rib);
    let t = skeleton.with_punctures(punct);
    let report = validate_track(&t);
    if report.is_valid() {
        Ok(t)
    } else {
        Err(TrackError::Invalid(report))
    }
}

fn twist_label(twist: [usize; 3]) -> String {
    let names = ["t1 t2 c1", "t3 c1 c2", "t4 t5 c2"];
    let mut parts = Vec::new();
    for (s, names) in names.iter().enumerate() {
        let n: Vec<&str> = names.split(' ').collect();
        let p = PERMS[twist[s]];
        parts.push(format!("P{}=({},{},{})", s + 1, n[p[0]], n[p[1]], n[p[2]]));
    }
    parts.join(" ")
}

/// Nearly complete smoothed subtracks of a complete track, with the erased
/// branches, deduplicated by canonical form and sorted by it.
pub fn nearly_complete_faces(t: &TrainTrack) -> Vec<(Vec<usize>, TrainTrack, IntMatrix)> {
    let mut found: BTreeMap<String, (Vec<usize>, TrainTrack, IntMatrix)> = BTreeMap::new();
    for s in enumerate_subtracks(t) {
        let Some(sm) = smooth(t, &s) else { continue };
        if classify_track(&sm.track).class != TrackClass::NearlyComplete {
            continue;
        }
        found
            .entry(canonical_form(&sm.track).0)
            .or_insert((s.removed(), sm.track, sm.inclusion));
    }
    found.into_values().collect()
}

/// Runs the builder: all 216 twisting choices, complete ones kept up to
/// isomorphism, and their nearly complete faces.
pub fn build_standard_family() -> StandardTrackFamily {
    let mut complete: BTreeMap<String, (TrainTrack, String)> = BTreeMap::new();
    for a in 0..6 {
        for b in 0..6 {
            for c in 0..6 {
                let twist = [a, b, c];
                let Ok(t) = gadget_track(twist) else { continue };
                if classify_track(&t).class != TrackClass::Complete {
                    continue;
                }
                complete
                    .entry(canonical_form(&t).0)
                    .or_insert((t, twist_label(twist)));
            }
        }
    }
    let complete: Vec<FamilyMember> = complete
        .into_values()
        .enumerate()
        .map(|(i, (track, meta))| FamilyMember {
            label: format!("T{i}"),
            track,
            meta,
        })
        .collect();
    let mut nearly_map: BTreeMap<String, NearlyMember> = BTreeMap::new();
    for m in &complete {
        for (removed, track, _) in nearly_complete_faces(&m.track) {
            nearly_map
                .entry(canonical_form(&track).0)
                .or_insert(NearlyMember {
                    label: String::new(),
                    track,
                    face_of: m.label.clone(),
                    removed,
                });
        }
    }
    let nearly = nearly_map
        .into_values()
        .enumerate()
        .map(|(i, mut n)| {
            n.label = format!("S{i}");
            n
        })
        .collect();
    StandardTrackFamily {
        pants: PantsDecomposition::chain(),
        complete,
        nearly,
    }
}

// ---------------------------------------------------------------------------
// File format

pub const FAMILY_HEADER: &str = "tracklab-family v1";

pub fn write_family(f: &StandardTrackFamily) -> String {
    let mut s = String::new();
    writeln!(s, "{FAMILY_HEADER}").unwrap();
    for p in &f.pants.pants {
        let punct: Vec<String> = p.punctures.iter().map(|x| x.to_string()).collect();
        writeln!(
            s,
            "pants {} punctures {} curves {}",
            p.name,
            punct.join(","),
            p.curves.join(",")
        )
        .unwrap();
    }
    for m in &f.complete {
        writeln!(s, "member {} COMPLETE {}", m.label, m.meta).unwrap();
        s.push_str(&write_track(&m.track));
    }
    for n in &f.nearly {
        let r: Vec<String> = n.removed.iter().map(|b| b.to_string()).collect();
        writeln!(
            s,
            "member {} NEARLY_COMPLETE face-of {} removed {}",
            n.label,
            n.face_of,
            r.join(",")
        )
        .unwrap();
        s.push_str(&write_track(&n.track));
    }
    s.push_str("end-family\n");
    s
}

/// Parses a family file without validating it.
pub fn parse_family(text: &str) -> Result<StandardTrackFamily, FamilyError> {
    let err = |line: usize, message: &str| FamilyError::Parse {
        line,
        message: message.to_string(),
    };
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l)).peekable();
    let mut header_seen = false;
    let mut pants: Vec<Pants> = Vec::new();
    let mut complete = Vec::new();
    let mut nearly = Vec::new();
    while let Some((n, raw)) = lines.next() {
        let l = raw.split('#').next().unwrap_or("").trim();
        if l.is_empty() {
            continue;
        }
        if !header_seen {
            if l != FAMILY_HEADER {
                return Err(err(n, "bad header"));
            }
            header_seen = true;
            continue;
        }
        if l == "end-family" {
            let pants = PantsDecomposition {
                curves: {
                    let mut c: BTreeSet<String> = BTreeSet::new();
                    for p in &pants {
                        c.extend(p.curves.iter().cloned());
                    }
                    c.into_iter().collect()
                },
                pants,
            };
            return Ok(StandardTrackFamily {
                pants,
                complete,
                nearly,
            });
        }
        let w: Vec<&str> = l.split_whitespace().collect();
        match w[0] {
            "pants" => {
                if w.len() != 6 || w[2] != "punctures" || w[4] != "curves" {
                    return Err(err(n, "expected 'pants NAME punctures A,B curves C,D'"));
                }
                let punctures = w[3]
                    .split(',')
                    .filter(|x| !x.is_empty())
                    .map(|x| x.parse().map_err(|_| err(n, "bad puncture")))
                    .collect::<Result<Vec<u32>, _>>()?;
                pants.push(Pants {
                    name: w[1].to_string(),
                    punctures,
                    curves: w[5].split(',').map(|c| c.to_string()).collect(),
                });
            }
            "member" => {
                if w.len() < 3 {
                    return Err(err(n, "expected 'member LABEL CLASS ...'"));
                }
                let label = w[1].to_string();
                let track = parse_track_lines(&mut lines).map_err(|e| match e {
                    TrackError::Parse { line, message } => FamilyError::Parse { line, message },
                    other => FamilyError::Track(other),
                })?;
                match w[2] {
                    "COMPLETE" => complete.push(FamilyMember {
                        label,
                        track,
                        meta: w[3..].join(" "),
                    }),
                    "NEARLY_COMPLETE" => {
                        if w.len() != 7 || w[3] != "face-of" || w[5] != "removed" {
                            return Err(err(n, "expected 'face-of LABEL removed B,..'"));
                        }
                        let removed = w[6]
                            .split(',')
                            .map(|x| x.parse().map_err(|_| err(n, "bad branch")))
                            .collect::<Result<Vec<usize>, _>>()?;
                        nearly.push(NearlyMember {
                            label,
                            track,
                            face_of: w[4].to_string(),
                            removed,
                        });
                    }
                    _ => return Err(err(n, "class must be COMPLETE or NEARLY_COMPLETE")),
                }
            }
            _ => return Err(err(n, "unexpected line")),
        }
    }
    Err(err(0, "missing 'end-family'"))
}

/// Full validation: tracks valid, classified as declared, canonical forms
/// distinct, every nearly complete member a face of its declared complete
/// member (checked through smoothing and through the cone face it spans).
pub fn validate_family(f: &StandardTrackFamily) -> Result<(), FamilyError> {
    f.pants
        .check(Surface::S05)
        .map_err(|m| FamilyError::Manifest(format!("pants decomposition: {m}")))?;
    let member_err = |label: &str, message: String| FamilyError::Member {
        label: label.to_string(),
        message,
    };
    let mut canon: BTreeMap<String, String> = BTreeMap::new();
    let all = f
        .complete
        .iter()
        .map(|m| (&m.label, &m.track, TrackClass::Complete))
        .chain(
            f.nearly
                .iter()
                .map(|m| (&m.label, &m.track, TrackClass::NearlyComplete)),
        );
    for (label, track, declared) in all {
        let report = validate_track(track);
        if !report.is_valid() {
            return Err(member_err(label, format!("invalid track: {report}")));
        }
        let class = classify_track(track).class;
        if class != declared {
            return Err(member_err(
                label,
                format!("declared {declared} but classifies {class}"),
            ));
        }
        if let Some(prev) = canon.insert(canonical_form(track).0, label.clone()) {
            return Err(FamilyError::Duplicate(prev, label.clone()));
        }
    }
    for n in &f.nearly {
        let parent = f
            .complete
            .iter()
            .find(|m| m.label == n.face_of)
            .ok_or_else(|| member_err(&n.label, format!("face-of {} is not a complete member", n.face_of)))?;
        check_face(&parent.track, &n.removed, &n.track)
            .map_err(|m| member_err(&n.label, m))?;
    }
    Ok(())
}

/// `sigma` is the smoothing of `parent` minus `removed`, and its cone is the
/// matching 3-dimensional face of the parent cone.
fn check_face(parent: &TrainTrack, removed: &[usize], sigma: &TrainTrack) -> Result<IntMatrix, String> {
    if removed.iter().any(|&b| b >= parent.branch_count()) {
        return Err("removed branch out of range".into());
    }
    let sub = Subtrack::without(parent, removed);
    if !crate::subtrack::is_subtrack_mask(parent, sub.mask()) {
        return Err("erased branches do not leave a subtrack".into());
    }
    let sm = smooth(parent, &sub).ok_or("subtrack does not smooth to a connected track")?;
    if canonical_form(&sm.track) != canonical_form(sigma) {
        return Err("smoothed subtrack differs from the declared track".into());
    }
    let pc = measure_cone(parent).map_err(|e| e.to_string())?;
    let face = pc.coordinate_face(removed).map_err(|e| e.to_string())?;
    let image = measure_cone(&sm.track)
        .and_then(|c| Ok(c.image(&sm.inclusion)?))
        .map_err(|e| e.to_string())?;
    if face != image || face.dim() != 3 {
        return Err(format!(
            "cone face of dimension {} does not match the subtrack cone",
            face.dim()
        ));
    }
    Ok(sm.inclusion)
}

/// Manifest: counts, canonical digests and certificate digests.
pub fn write_manifest(f: &StandardTrackFamily) -> String {
    let mut s = String::new();
    writeln!(s, "tracklab-manifest v1").unwrap();
    writeln!(s, "complete {}", f.complete.len()).unwrap();
    writeln!(s, "nearly-complete {}", f.nearly.len()).unwrap();
    let certs = certificates_by_label(f);
    let members = f
        .complete
        .iter()
        .map(|m| (&m.label, &m.track))
        .chain(f.nearly.iter().map(|m| (&m.label, &m.track)));
    for (label, track) in members {
        let (rec, tr) = &certs[label];
        writeln!(
            s,
            "member {label} branches {} switches {} canonical {} recurrence {} transverse {}",
            track.branch_count(),
            track.switch_count(),
            canonical_form(track).digest(),
            digest(rec),
            digest(tr)
        )
        .unwrap();
    }
    s.push_str("end\n");
    s
}

fn digest(s: &str) -> String {
    hex::encode(Sha256::digest(s.as_bytes()))
}

fn certificates_by_label(f: &StandardTrackFamily) -> BTreeMap<String, (String, String)> {
    f.complete
        .iter()
        .map(|m| (&m.label, &m.track))
        .chain(f.nearly.iter().map(|m| (&m.label, &m.track)))
        .map(|(label, t)| {
            let rec = is_recurrent(t).system.to_text();
            let tr = is_transversely_recurrent(t)
                .system
                .map(|s| s.to_text())
                .unwrap_or_default();
            (label.clone(), (rec, tr))
        })
        .collect()
}

/// Birecurrence certificates of every member, in the certificate format.
pub fn write_certificates(f: &StandardTrackFamily) -> String {
    let mut s = String::new();
    for (label, (rec, tr)) in certificates_by_label(f) {
        writeln!(s, "certificate {label} recurrence").unwrap();
        s.push_str(&rec);
        writeln!(s, "certificate {label} transverse").unwrap();
        s.push_str(&tr);
    }
    s
}

/// Checks a manifest against a family: counts and every digest.
pub fn check_manifest(f: &StandardTrackFamily, manifest: &str) -> Result<(), FamilyError> {
    let expected = write_manifest(f);
    let norm = |s: &str| -> Vec<String> {
        s.lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(String::from)
            .collect()
    };
    let (a, b) = (norm(&expected), norm(manifest));
    if a == b {
        return Ok(());
    }
    let first = a
        .iter()
        .zip(&b)
        .find(|(x, y)| x != y)
        .map(|(x, y)| format!("expected '{x}', found '{y}'"))
        .unwrap_or_else(|| format!("{} lines expected, {} found", a.len(), b.len()));
    Err(FamilyError::Manifest(first))
}

/// Parses and fully validates a family, and its manifest when given.
pub fn load_standard_family(
    text: &str,
    manifest: Option<&str>,
) -> Result<StandardTrackFamily, FamilyError> {
    let f = parse_family(text)?;
    validate_family(&f)?;
    if let Some(m) = manifest {
        check_manifest(&f, m)?;
    }
    Ok(f)
}

pub const SHIPPED_FAMILY: &str = include_str!("../data/standard_s05.family");
pub const SHIPPED_MANIFEST: &str = include_str!("../data/standard_s05.manifest");

pub fn shipped_family() -> Result<StandardTrackFamily, FamilyError> {
    load_standard_family(SHIPPED_FAMILY, Some(SHIPPED_MANIFEST))
}

/// Depth-0 partition: each complete member is its own chart; the nearly
/// complete members are placed in every chart where they occur as faces.
/// Within each chart the open cones of the complete track and of its faces
/// are checked pairwise disjoint.
pub fn standard_partition(f: &StandardTrackFamily) -> Result<Partition, FamilyError> {
    let declared: BTreeMap<String, &str> = f
        .nearly
        .iter()
        .map(|n| (canonical_form(&n.track).0, n.label.as_str()))
        .collect();
    let mut used: BTreeSet<&str> = BTreeSet::new();
    let mut p = Partition {
        assumptions: vec![
            "open cones in different charts are disjoint (not checked)".to_string(),
            "complete standard cones cover the projective measure space (not checked)"
                .to_string(),
        ],
        ..Partition::default()
    };
    for (chart, m) in f.complete.iter().enumerate() {
        p.charts.push(m.track.clone());
        let e = m.track.branch_count();
        let root = Member::new(
            m.track.clone(),
            TrackClass::Complete,
            chart,
            IntMatrix::identity(e),
            vec![Step::Root],
        )?;
        let mut in_chart = vec![root.clone()];
        p.complete.push(root);
        for (removed, track, inclusion) in nearly_complete_faces(&m.track) {
            let Some(label) = declared.get(&canonical_form(&track).0) else {
                continue;
            };
            used.insert(label);
            let s = Member::new(
                track,
                TrackClass::NearlyComplete,
                chart,
                inclusion,
                vec![Step::Face(removed)],
            )?;
            in_chart.push(s.clone());
            p.nearly.push(s);
        }
        for i in 0..in_chart.len() {
            for j in i + 1..in_chart.len() {
                let meet = in_chart[i]
                    .cone
                    .relints_meet(&in_chart[j].cone)
                    .map_err(MeasureError::from)?;
                if meet {
                    return Err(FamilyError::Member {
                        label: m.label.clone(),
                        message: format!(
                            "open cones of {} and {} meet",
                            in_chart[i].label(),
                            in_chart[j].label()
                        ),
                    });
                }
            }
        }
    }
    if let Some(n) = f.nearly.iter().find(|n| !used.contains(n.label.as_str())) {
        return Err(FamilyError::Member {
            label: n.label.clone(),
            message: "not a face of any complete member".to_string(),
        });
    }
    Ok(p)
}
