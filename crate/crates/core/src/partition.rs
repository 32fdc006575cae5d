//! Track partitions and their inductive refinement by splitting moves.
//!
//! Every member lives in a chart: the complete standard track it descends
//! from. Its measure cone is stored as an image in chart coordinates, so
//! containment and disjointness questions are decided inside one
//! polyhedron. Relations between different charts are not examined.

use std::collections::HashMap;
use std::fmt;
use std::fmt::Write as _;

use num_bigint::BigInt;
use rayon::prelude::*;
use thiserror::Error;

use crate::classify::{classify_track, TrackClass};
use crate::cone::{Cone, ConeError};
use crate::linalg::IntMatrix;
use crate::measures::{measure_cone, MeasureError};
use crate::split::{common_subtrack, full_splits, split, Side, SplitMove};
use crate::track::{canonical_form, classify_branches, CanonicalForm, TrackError, TrainTrack};

#[derive(Debug, Error)]
pub enum PartitionError {
    #[error(transparent)]
    Track(#[from] TrackError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Cone(#[from] ConeError),
    #[error("no member {0}")]
    NoMember(String),
    #[error("member {member} is {found}, expected {expected}")]
    WrongClass {
        member: String,
        found: TrackClass,
        expected: TrackClass,
    },
    #[error("branch {branch} is not large in {member}")]
    NotLarge { member: String, branch: usize },
}

/// One step of a member's provenance.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Step {
    Root,
    /// Face of the chart track obtained by erasing these chart branches.
    Face(Vec<usize>),
    Split(SplitMove),
    /// Common subtrack of the two sides of this split.
    Common(usize),
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Step::Root => write!(f, "root"),
            Step::Face(r) => {
                let parts: Vec<String> = r.iter().map(|b| b.to_string()).collect();
                write!(f, "face[{}]", parts.join(","))
            }
            Step::Split(m) => write!(f, "{m}"),
            Step::Common(b) => write!(f, "common{b}"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Member {
    pub track: TrainTrack,
    pub class: TrackClass,
    pub chart: usize,
    /// Chart branches by own branches.
    pub to_chart: IntMatrix,
    /// Measure cone in chart coordinates.
    pub cone: Cone,
    pub canonical: CanonicalForm,
    pub history: Vec<Step>,
}

impl Member {
    pub fn new(
        track: TrainTrack,
        class: TrackClass,
        chart: usize,
        to_chart: IntMatrix,
        history: Vec<Step>,
    ) -> Result<Self, PartitionError> {
        let cone = measure_cone(&track)?.image(&to_chart)?;
        Ok(Member {
            canonical: canonical_form(&track),
            track,
            class,
            chart,
            to_chart,
            cone,
            history,
        })
    }

    pub fn label(&self) -> String {
        let steps: Vec<String> = self.history.iter().map(|s| s.to_string()).collect();
        format!("c{}:{}", self.chart, steps.join("."))
    }

    fn key(&self) -> (usize, CanonicalForm, Vec<Vec<BigInt>>) {
        (self.chart, self.canonical.clone(), self.cone.rays().to_vec())
    }

    fn child(&self, track: TrainTrack, class: TrackClass, m: &IntMatrix, step: Step) -> Result<Member, PartitionError> {
        let mut history = self.history.clone();
        history.push(step);
        Member::new(track, class, self.chart, self.to_chart.mul(m), history)
    }
}

#[derive(Clone, Debug, Default)]
pub struct Partition {
    /// Chart tracks, indexed by `Member::chart`.
    pub charts: Vec<TrainTrack>,
    pub complete: Vec<Member>,
    pub nearly: Vec<Member>,
    /// Statements taken on trust rather than checked.
    pub assumptions: Vec<String>,
}

impl Partition {
    pub fn members(&self) -> impl Iterator<Item = &Member> {
        self.complete.iter().chain(&self.nearly)
    }

    pub fn len(&self) -> usize {
        self.complete.len() + self.nearly.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MemberRef {
    Complete(usize),
    Nearly(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MoveRecord {
    pub kind: TrackClass,
    pub target: String,
    pub branch: usize,
    pub outcome: String,
    /// The track that was split.
    pub parent: TrainTrack,
}

impl fmt::Display for MoveRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            TrackClass::Complete => "complete",
            _ => "nearly-complete",
        };
        write!(
            f,
            "move {kind} target={} branch={} outcome={}",
            self.target, self.branch, self.outcome
        )
    }
}

struct Outcome {
    replacement: Vec<Member>,
    sigma: Option<Member>,
    record: MoveRecord,
}

/// Splitting move on one member along `branch`. For a complete member the
/// children that are complete replace it and a nearly complete common
/// subtrack is reported; for a nearly complete member the nearly complete
/// children replace it. A member with no child of its own kind stays.
fn split_member(m: &Member, branch: usize) -> Result<Outcome, PartitionError> {
    if classify_branches(&m.track).kinds.get(branch) != Some(&crate::track::BranchKind::Large) {
        return Err(PartitionError::NotLarge {
            member: m.label(),
            branch,
        });
    }
    let want = m.class;
    let mut kept = Vec::new();
    let mut left = None;
    for side in [Side::Left, Side::Right] {
        let mv = SplitMove { branch, side };
        let child = split(&m.track, mv)?;
        let class = classify_track(&child.track).class;
        if side == Side::Left {
            left = Some(child.clone());
        }
        if class == want {
            kept.push(m.child(child.track, class, &child.carrying, Step::Split(mv))?);
        }
    }
    let mut sigma = None;
    let outcome;
    if kept.len() == 2 {
        outcome = if want == TrackClass::Complete {
            let left = left.expect("left child computed");
            let common = common_subtrack(&left);
            match common {
                Some(sm) if classify_track(&sm.track).class == TrackClass::NearlyComplete => {
                    let carry = left.carrying.mul(&sm.inclusion);
                    sigma = Some(m.child(
                        sm.track,
                        TrackClass::NearlyComplete,
                        &carry,
                        Step::Common(branch),
                    )?);
                    "both;sigma-added".to_string()
                }
                _ => "both;sigma-not-nearly-complete".to_string(),
            }
        } else {
            "both".to_string()
        };
    } else if kept.len() == 1 {
        outcome = format!("one;{}", kept[0].history.last().expect("split step"));
    } else {
        kept.push(m.clone());
        outcome = "none;kept".to_string();
    }
    Ok(Outcome {
        replacement: kept,
        sigma,
        record: MoveRecord {
            kind: want,
            target: m.label(),
            branch,
            outcome,
            parent: m.track.clone(),
        },
    })
}

/// A complete splitting move (target complete) or a nearly complete
/// splitting move (target nearly complete) along `branch`.
pub fn partition_move(
    p: &Partition,
    target: MemberRef,
    branch: usize,
) -> Result<(Partition, MoveRecord), PartitionError> {
    let mut out = p.clone();
    match target {
        MemberRef::Complete(i) => {
            let m = p
                .complete
                .get(i)
                .ok_or_else(|| PartitionError::NoMember(format!("T{i}")))?;
            if m.class != TrackClass::Complete {
                return Err(PartitionError::WrongClass {
                    member: m.label(),
                    found: m.class,
                    expected: TrackClass::Complete,
                });
            }
            let o = split_member(m, branch)?;
            out.complete.splice(i..=i, o.replacement);
            out.nearly.extend(o.sigma);
            Ok((out, o.record))
        }
        MemberRef::Nearly(i) => {
            let m = p
                .nearly
                .get(i)
                .ok_or_else(|| PartitionError::NoMember(format!("S{i}")))?;
            if m.class != TrackClass::NearlyComplete {
                return Err(PartitionError::WrongClass {
                    member: m.label(),
                    found: m.class,
                    expected: TrackClass::NearlyComplete,
                });
            }
            let o = split_member(m, branch)?;
            out.nearly.splice(i..=i, o.replacement);
            Ok((out, o.record))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Caps {
    pub depth: usize,
    pub members: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            depth: 3,
            members: 100_000,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct PartitionSequence {
    pub partitions: Vec<Partition>,
    /// `moves[k]` leads from depth `k` to depth `k + 1`.
    pub moves: Vec<Vec<MoveRecord>>,
    pub truncated: Option<String>,
}

fn refine(members: &[Member], moves: &mut Vec<MoveRecord>, sigmas: &mut Vec<Member>) -> Result<Vec<Member>, PartitionError> {
    let mut next = Vec::new();
    for m in members {
        let larges = classify_branches(&m.track).large_branches();
        let mut work = vec![m.clone()];
        for b in larges {
            let mut step = Vec::new();
            for w in &work {
                let o = split_member(w, b)?;
                step.extend(o.replacement);
                sigmas.extend(o.sigma);
                moves.push(o.record);
            }
            work = step;
        }
        next.extend(work);
    }
    Ok(next)
}

fn dedup(members: Vec<Member>) -> Vec<Member> {
    let mut seen = std::collections::HashSet::new();
    members.into_iter().filter(|m| seen.insert(m.key())).collect()
}

/// Two-phase refinement: every complete member is split along all of its
/// large branches in turn, then every nearly complete member of the previous
/// depth likewise. Common subtracks produced in the first phase join the
/// next depth without being split.
pub fn generate_partition_sequence(
    p0: &Partition,
    caps: Caps,
) -> Result<PartitionSequence, PartitionError> {
    let mut seq = PartitionSequence {
        partitions: vec![p0.clone()],
        moves: Vec::new(),
        truncated: None,
    };
    for k in 0..caps.depth {
        let cur = &seq.partitions[k];
        let mut moves = Vec::new();
        let mut sigmas = Vec::new();
        let complete = refine(&cur.complete, &mut moves, &mut sigmas)?;
        let mut nearly = refine(&cur.nearly, &mut moves, &mut Vec::new())?;
        nearly.extend(sigmas);
        let next = Partition {
            charts: cur.charts.clone(),
            complete: dedup(complete),
            nearly: dedup(nearly),
            assumptions: cur.assumptions.clone(),
        };
        if next.len() > caps.members {
            seq.truncated = Some(format!(
                "depth {} would hold {} members, cap is {}",
                k + 1,
                next.len(),
                caps.members
            ));
            break;
        }
        seq.partitions.push(next);
        seq.moves.push(moves);
    }
    Ok(seq)
}

// ---------------------------------------------------------------------------
// Verification

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Property {
    Classification,
    Disjointness,
    Subdivision,
    Adjacency,
    FullSplits,
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Property::Classification => "classification",
            Property::Disjointness => "disjointness",
            Property::Subdivision => "subdivision",
            Property::Adjacency => "adjacency",
            Property::FullSplits => "full-splits",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropertyViolation {
    pub property: Property,
    pub depth: usize,
    pub member: String,
    pub detail: String,
}

impl fmt::Display for PropertyViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "violation property={} depth={} member={} detail={}",
            self.property, self.depth, self.member, self.detail
        )
    }
}

#[derive(Clone, Debug, Default)]
pub struct PartitionReport {
    pub violations: Vec<PropertyViolation>,
    /// Number of individual checks per property.
    pub checks: Vec<(Property, usize)>,
    /// Nearly complete members lying on their chart's boundary, where the
    /// second adjacent track belongs to another chart.
    pub chart_boundary_sigmas: usize,
}

impl PartitionReport {
    pub fn passed(&self, p: Property) -> bool {
        !self.violations.iter().any(|v| v.property == p)
    }

    pub fn count(&self, p: Property) -> usize {
        self.checks
            .iter()
            .filter(|(q, _)| *q == p)
            .map(|(_, n)| n)
            .sum()
    }

    fn add(&mut self, p: Property, n: usize) {
        self.checks.push((p, n));
    }
}

fn relint_inside(inner: &Cone, outer: &Cone) -> bool {
    outer.contains_cone(inner) && outer.relint_contains(&inner.interior_point())
}

/// Index of the members of `within` whose open cone contains the open cone
/// of `m` (same chart).
fn containers(m: &Member, within: &[&Member]) -> Vec<usize> {
    let p = m.cone.interior_point();
    within
        .iter()
        .enumerate()
        .filter(|(_, o)| o.chart == m.chart && o.cone.relint_contains(&p))
        .filter(|(_, o)| relint_inside(&m.cone, &o.cone))
        .map(|(i, _)| i)
        .collect()
}

fn check_classification(p: &Partition, depth: usize, r: &mut PartitionReport) {
    let found: Vec<Option<PropertyViolation>> = p
        .members()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|m| {
            let c = classify_track(&m.track).class;
            (c != m.class).then(|| PropertyViolation {
                property: Property::Classification,
                depth,
                member: m.label(),
                detail: format!("claimed {} but classifies {}", m.class, c),
            })
        })
        .collect();
    r.add(Property::Classification, p.len());
    r.violations.extend(found.into_iter().flatten());
}

fn disjoint_pairs(group: &[&Member], depth: usize) -> (usize, Vec<PropertyViolation>) {
    let mut pairs = Vec::new();
    for i in 0..group.len() {
        for j in i + 1..group.len() {
            if group[i].chart == group[j].chart {
                pairs.push((i, j));
            }
        }
    }
    let bad: Vec<Option<PropertyViolation>> = pairs
        .par_iter()
        .map(|&(i, j)| match group[i].cone.relints_meet(&group[j].cone) {
            Ok(false) => None,
            Ok(true) => Some(PropertyViolation {
                property: Property::Disjointness,
                depth,
                member: group[i].label(),
                detail: format!("open cone meets that of {}", group[j].label()),
            }),
            Err(e) => Some(PropertyViolation {
                property: Property::Disjointness,
                depth,
                member: group[i].label(),
                detail: format!("cone error against {}: {e}", group[j].label()),
            }),
        })
        .collect();
    (pairs.len(), bad.into_iter().flatten().collect())
}

/// Checks (Subdivision), (Adjacency), (Full splits), within-chart
/// disjointness and claimed classifications for every depth.
///
/// Disjointness at depth 0 is checked over all same-chart pairs. At deeper
/// levels it is checked among members sharing a container at the previous
/// depth; pairs with distinct containers are disjoint because the
/// containers are.
pub fn verify_partition_properties(seq: &PartitionSequence) -> PartitionReport {
    let mut r = PartitionReport::default();
    for (k, p) in seq.partitions.iter().enumerate() {
        check_classification(p, k, &mut r);
    }

    // Subdivision for every pair of depths.
    for (big_k, deep) in seq.partitions.iter().enumerate() {
        let members: Vec<&Member> = deep.members().collect();
        for k in 0..big_k {
            let shallow = &seq.partitions[k];
            let t_only: Vec<&Member> = shallow.complete.iter().collect();
            let all: Vec<&Member> = shallow.members().collect();
            let results: Vec<(usize, usize, bool)> = members
                .par_iter()
                .enumerate()
                .map(|(i, m)| {
                    let is_complete = m.class == TrackClass::Complete;
                    let pool = if is_complete { &t_only } else { &all };
                    (i, containers(m, pool).len(), is_complete)
                })
                .collect();
            r.add(Property::Subdivision, results.len());
            for (i, found, is_complete) in results {
                if found != 1 {
                    r.violations.push(PropertyViolation {
                        property: Property::Subdivision,
                        depth: big_k,
                        member: members[i].label(),
                        detail: format!(
                            "open cone lies in {found} open cones of {} at depth {k}",
                            if is_complete { "T" } else { "T or S" }
                        ),
                    });
                }
            }
        }
    }

    // Disjointness.
    for (k, p) in seq.partitions.iter().enumerate() {
        let members: Vec<&Member> = p.members().collect();
        if k == 0 {
            let (n, bad) = disjoint_pairs(&members, k);
            r.add(Property::Disjointness, n);
            r.violations.extend(bad);
        } else {
            // Containers of complete members index T; of nearly complete
            // members index all of T then S. Merge both keyings by the
            // container member itself.
            let mut by_container: HashMap<String, Vec<&Member>> = HashMap::new();
            let prev = &seq.partitions[k - 1];
            let prev_t: Vec<&Member> = prev.complete.iter().collect();
            let prev_all: Vec<&Member> = prev.members().collect();
            for m in &members {
                let pool = if m.class == TrackClass::Complete {
                    &prev_t
                } else {
                    &prev_all
                };
                let found = containers(m, pool);
                if let [one] = found[..] {
                    by_container.entry(pool[one].label()).or_default().push(m);
                }
            }
            let mut keys: Vec<&String> = by_container.keys().collect();
            keys.sort();
            let mut total = 0;
            for key in keys {
                let (n, bad) = disjoint_pairs(&by_container[key], k);
                total += n;
                r.violations.extend(bad);
            }
            r.add(Property::Disjointness, total);
        }
    }

    // Adjacency.
    for (k, p) in seq.partitions.iter().enumerate() {
        let results: Vec<(Option<PropertyViolation>, bool)> = p
            .nearly
            .par_iter()
            .map(|s| adjacency_of(s, p, k))
            .collect();
        r.add(Property::Adjacency, results.len());
        for (v, boundary) in results {
            r.violations.extend(v);
            if boundary {
                r.chart_boundary_sigmas += 1;
            }
        }
    }

    // Full splits.
    for k in 0..seq.partitions.len().saturating_sub(1) {
        let next = &seq.partitions[k + 1];
        let mut index: HashMap<(usize, Vec<Vec<BigInt>>), TrackClass> = HashMap::new();
        for m in next.members() {
            index.insert((m.chart, m.cone.rays().to_vec()), m.class);
        }
        let members: Vec<&Member> = seq.partitions[k].members().collect();
        let results: Vec<(usize, Vec<PropertyViolation>)> = members
            .par_iter()
            .map(|m| full_split_check(m, &index, k))
            .collect();
        for (n, bad) in results {
            r.add(Property::FullSplits, n);
            r.violations.extend(bad);
        }
    }
    r
}

fn adjacency_of(s: &Member, p: &Partition, depth: usize) -> (Option<PropertyViolation>, bool) {
    let violation = |detail: String| PropertyViolation {
        property: Property::Adjacency,
        depth,
        member: s.label(),
        detail,
    };
    let chart_cone = match measure_cone(&p.charts[s.chart]) {
        Ok(c) => c,
        Err(e) => return (Some(violation(format!("chart cone: {e}"))), false),
    };
    if s.cone.dim() != 3 {
        return (
            Some(violation(format!("cone dimension {} instead of 3", s.cone.dim()))),
            false,
        );
    }
    let touching: Vec<Cone> = p
        .complete
        .iter()
        .filter(|t| t.chart == s.chart)
        .filter_map(|t| {
            let meet = t.cone.intersect(&s.cone).ok()?;
            (meet.dim() == s.cone.dim()).then(|| t.cone.clone())
        })
        .collect();
    for t in &touching {
        if t.relint_contains(&s.cone.interior_point()) {
            return (
                Some(violation("open cone meets an open complete cone".to_string())),
                false,
            );
        }
    }
    let on_boundary = !chart_cone.relint_contains(&s.cone.interior_point());
    let pieces: Vec<Cone> = if on_boundary {
        touching
    } else {
        let mut v = Vec::new();
        for i in 0..touching.len() {
            for j in i + 1..touching.len() {
                if let Ok(c) = touching[i].intersect(&touching[j]) {
                    if c.dim() == s.cone.dim() {
                        v.push(c);
                    }
                }
            }
        }
        v
    };
    match s.cone.uncovered_point(&pieces) {
        Ok(None) => (None, on_boundary),
        Ok(Some(w)) => {
            let w: Vec<String> = w.iter().map(crate::linalg::fmt_q).collect();
            (
                Some(violation(format!(
                    "measure ({}) lies in no {}",
                    w.join(","),
                    if on_boundary {
                        "complete cone of the chart"
                    } else {
                        "pair of distinct complete cones"
                    }
                ))),
                on_boundary,
            )
        }
        Err(e) => (Some(violation(format!("cone error: {e}"))), on_boundary),
    }
}

fn full_split_check(
    m: &Member,
    index: &HashMap<(usize, Vec<Vec<BigInt>>), TrackClass>,
    depth: usize,
) -> (usize, Vec<PropertyViolation>) {
    let mut bad = Vec::new();
    let splits = match full_splits(&m.track) {
        Ok(s) => s,
        Err(e) => {
            return (
                1,
                vec![PropertyViolation {
                    property: Property::FullSplits,
                    depth,
                    member: m.label(),
                    detail: format!("full split failed: {e}"),
                }],
            )
        }
    };
    let mut n = 0;
    for fs in splits {
        if fs.class == TrackClass::Other {
            continue;
        }
        n += 1;
        let img = measure_cone(&fs.track).and_then(|c| Ok(c.image(&m.to_chart.mul(&fs.carrying))?));
        let moves: Vec<String> = fs.moves.iter().map(|x| x.to_string()).collect();
        match img {
            Ok(c) => {
                if index.get(&(m.chart, c.rays().to_vec())) != Some(&fs.class) {
                    bad.push(PropertyViolation {
                        property: Property::FullSplits,
                        depth,
                        member: m.label(),
                        detail: format!(
                            "{} full split {} missing at depth {}",
                            fs.class,
                            moves.join("."),
                            depth + 1
                        ),
                    });
                }
            }
            Err(e) => bad.push(PropertyViolation {
                property: Property::FullSplits,
                depth,
                member: m.label(),
                detail: format!("cone error: {e}"),
            }),
        }
    }
    (n, bad)
}

// ---------------------------------------------------------------------------
// Dump format

/// One text block per depth: members with chart, class, canonical digest and
/// encoding, then the move log leading to the next depth.
pub fn dump_depth(seq: &PartitionSequence, k: usize) -> String {
    let p = &seq.partitions[k];
    let mut s = String::new();
    writeln!(s, "tracklab-partition v1").unwrap();
    writeln!(s, "depth {k}").unwrap();
    writeln!(
        s,
        "counts complete {} nearly-complete {}",
        p.complete.len(),
        p.nearly.len()
    )
    .unwrap();
    for a in &p.assumptions {
        writeln!(s, "assumption {a}").unwrap();
    }
    for (tag, list) in [("T", &p.complete), ("S", &p.nearly)] {
        for m in list {
            writeln!(
                s,
                "{tag} {} class {} digest {} canonical {}",
                m.label(),
                m.class,
                m.canonical.digest(),
                m.canonical.0
            )
            .unwrap();
        }
    }
    if let Some(moves) = seq.moves.get(k) {
        for mv in moves {
            writeln!(s, "{mv}").unwrap();
        }
    }
    if let Some(t) = &seq.truncated {
        writeln!(s, "truncated {t}").unwrap();
    }
    s.push_str("end\n");
    s
}
