//! Splitting at large branches.
//!
//! Let `b` be large, with end 0 at switch `u` and end 1 at switch `v`. Write
//! the small slots as `u: (a, c)` and `v: (e, d)` in counterclockwise order.
//! The ends `a`, `d` lie on one side of `b` and `c`, `e` on the other. A
//! split replaces `u`, `v` by two new switches joined by a diagonal that
//! reuses the index of `b`:
//!
//! | side  | switch `u`      | switch `v`      | condition     |
//! |-------|-----------------|-----------------|---------------|
//! | Left  | `(a, diag, d)`  | `(e, diag, c)`  | `w_a >= w_d`  |
//! | Right | `(c, e, diag)`  | `(d, a, diag)`  | `w_d >= w_a`  |
//!
//! Slots are listed as `(large, small left, small right)`. Every other
//! large branch keeps its index and stays large.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::classify::{classify_track, TrackClass};
use crate::cone::{projective_diameter, ConeError};
use crate::linalg::{IntMatrix, Q};
use crate::measures::{
    cone_identity_report, measure_cone, subtrack_cone, switch_matrix, ConeIdentityReport,
    MeasureError,
};
use crate::subtrack::{smooth, Smoothed, Subtrack};
use crate::track::{
    classify_branches, validate_track, BranchEnd, BranchKind, Slot, TrackError, TrainTrack,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn letter(self) -> char {
        match self {
            Side::Left => 'L',
            Side::Right => 'R',
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SplitMove {
    pub branch: usize,
    pub side: Side,
}

impl fmt::Display for SplitMove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.side.letter(), self.branch)
    }
}

#[derive(Debug, Error)]
pub enum SplitError {
    #[error(transparent)]
    Track(#[from] TrackError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Cone(#[from] ConeError),
    #[error("weight vector has {got} entries, expected {expected}")]
    Length { expected: usize, got: usize },
    #[error("weight vector is not a strictly positive measure on the track")]
    NotInCone,
}

/// Child of a split together with its carrying matrix (parent rows, child
/// columns).
#[derive(Clone, Debug)]
pub struct SplitChild {
    pub track: TrainTrack,
    pub carrying: IntMatrix,
    pub diagonal: usize,
}

struct Neighbourhood {
    u: usize,
    v: usize,
    a: BranchEnd,
    c: BranchEnd,
    e: BranchEnd,
    d: BranchEnd,
}

fn neighbourhood(t: &TrainTrack, b: usize) -> Result<Neighbourhood, TrackError> {
    if b >= t.branch_count() || classify_branches(t).kinds[b] != BranchKind::Large {
        return Err(TrackError::NotLarge(b));
    }
    let pos = t.positions();
    let u = pos[2 * b].switch;
    let v = pos[2 * b + 1].switch;
    Ok(Neighbourhood {
        u,
        v,
        a: t.at(u, Slot::SmallLeft),
        c: t.at(u, Slot::SmallRight),
        e: t.at(v, Slot::SmallLeft),
        d: t.at(v, Slot::SmallRight),
    })
}

pub fn split(t: &TrainTrack, m: SplitMove) -> Result<SplitChild, TrackError> {
    let n = neighbourhood(t, m.branch)?;
    let b = m.branch;
    let diag0 = Some(BranchEnd::new(b, 0));
    let diag1 = Some(BranchEnd::new(b, 1));
    let mut switches = t.raw_switches().to_vec();
    let (su, sv) = match m.side {
        Side::Left => (
            [Some(n.a), diag0, Some(n.d)],
            [Some(n.e), diag1, Some(n.c)],
        ),
        Side::Right => (
            [Some(n.c), Some(n.e), diag0],
            [Some(n.d), Some(n.a), diag1],
        ),
    };
    switches[n.u] = su;
    switches[n.v] = sv;
    let skeleton = TrainTrack::from_parts(t.surface(), t.branch_count(), switches, Vec::new());
    // Faces correspond through any dart other than the diagonal's.
    let parent = t.ribbon();
    let rib = skeleton.ribbon();
    let mut punct = Vec::with_capacity(rib.faces.len());
    for cycle in &rib.faces {
        let d = cycle
            .iter()
            .copied()
            .find(|d| d / 2 != b)
            .expect("split faces are not bounded by the diagonal alone");
        punct.push(t.face_punctures()[parent.face_of[d]]);
    }
    let child = skeleton.with_punctures(punct);
    let report = validate_track(&child);
    if !report.is_valid() {
        return Err(TrackError::Invalid(report));
    }
    let mut carrying = IntMatrix::identity(t.branch_count());
    carrying.data[b][b] = BigInt::zero();
    carrying.add_at(b, n.a.branch, 1);
    carrying.add_at(b, n.c.branch, 1);
    Ok(SplitChild {
        track: child,
        carrying,
        diagonal: b,
    })
}

/// The subtrack of a split child obtained by erasing the diagonal, smoothed,
/// with its inclusion into the child.
pub fn common_subtrack(child: &SplitChild) -> Option<Smoothed> {
    smooth(
        &child.track,
        &Subtrack::without(&child.track, &[child.diagonal]),
    )
}

/// Checks both halves of the cone identity for the split of `t` at `branch`:
/// the two child images cover the parent cone, and they meet exactly in the
/// image of the face obtained by erasing the diagonal. The face is taken as
/// a coordinate face, so it need not smooth to a trivalent track.
pub fn verify_split_identity(t: &TrainTrack, branch: usize) -> Result<ConeIdentityReport, SplitError> {
    let left = split(t, SplitMove { branch, side: Side::Left })?;
    let right = split(t, SplitMove { branch, side: Side::Right })?;
    let pcone = measure_cone(t)?;
    let images = [
        measure_cone(&left.track)?.image(&left.carrying)?,
        measure_cone(&right.track)?.image(&right.carrying)?,
    ];
    let face = Subtrack::without(&left.track, &[left.diagonal]);
    let common = subtrack_cone(&left.track, &face)?.image(&left.carrying)?;
    Ok(cone_identity_report(&pcone, &images, Some(&common))?)
}

/// One outcome of splitting at every large branch once.
#[derive(Clone, Debug)]
pub struct FullSplit {
    pub moves: Vec<SplitMove>,
    pub track: TrainTrack,
    pub carrying: IntMatrix,
    pub class: TrackClass,
}

/// All `2^l` side assignments over the large branches, applied in
/// increasing branch order.
pub fn full_splits(t: &TrainTrack) -> Result<Vec<FullSplit>, TrackError> {
    let larges = classify_branches(t).large_branches();
    let mut out = Vec::with_capacity(1 << larges.len());
    for bits in 0..(1usize << larges.len()) {
        let mut track = t.clone();
        let mut carrying = IntMatrix::identity(t.branch_count());
        let mut moves = Vec::with_capacity(larges.len());
        for (i, &b) in larges.iter().enumerate() {
            let side = if bits >> i & 1 == 0 {
                Side::Left
            } else {
                Side::Right
            };
            let m = SplitMove { branch: b, side };
            let child = split(&track, m)?;
            carrying = carrying.mul(&child.carrying);
            track = child.track;
            moves.push(m);
        }
        let class = classify_track(&track).class;
        out.push(FullSplit {
            moves,
            track,
            carrying,
            class,
        });
    }
    Ok(out)
}

/// State of a measure-following splitting sequence: current track, carrying
/// matrix to the starting track, and the followed measure in current
/// coordinates.
#[derive(Clone, Debug)]
pub struct FollowState {
    pub track: TrainTrack,
    pub to_root: IntMatrix,
    pub weights: Vec<Q>,
}

#[derive(Clone, Debug)]
pub enum Toward {
    Split {
        moves: Vec<SplitMove>,
        next: FollowState,
    },
    /// The measure lies on the hyperplane of `branch`; it is carried by the
    /// common subtrack of that split.
    Degenerate {
        moves: Vec<SplitMove>,
        branch: usize,
        common: Option<Smoothed>,
        at: FollowState,
    },
}

impl FollowState {
    pub fn start(t: &TrainTrack, w: &[Q]) -> Result<Self, SplitError> {
        if w.len() != t.branch_count() {
            return Err(SplitError::Length {
                expected: t.branch_count(),
                got: w.len(),
            });
        }
        let a = switch_matrix(t);
        let ok = w.iter().all(|x| x.is_positive())
            && a.iter().all(|row| crate::linalg::dot(row, w).is_zero());
        if !ok {
            return Err(SplitError::NotInCone);
        }
        Ok(FollowState {
            track: t.clone(),
            to_root: IntMatrix::identity(t.branch_count()),
            weights: w.to_vec(),
        })
    }
}

/// One full split following the measure: at each large branch, in increasing
/// order, the side whose child carries the measure.
pub fn split_toward(state: &FollowState) -> Result<Toward, SplitError> {
    let larges = classify_branches(&state.track).large_branches();
    let mut cur = state.clone();
    let mut moves = Vec::new();
    for b in larges {
        let n = neighbourhood(&cur.track, b)?;
        let diff = &cur.weights[n.a.branch] - &cur.weights[n.d.branch];
        let side = if diff.is_positive() {
            Side::Left
        } else if diff.is_negative() {
            Side::Right
        } else {
            let child = split(&cur.track, SplitMove { branch: b, side: Side::Left })?;
            return Ok(Toward::Degenerate {
                moves,
                branch: b,
                common: common_subtrack(&child),
                at: cur,
            });
        };
        let m = SplitMove { branch: b, side };
        let child = split(&cur.track, m)?;
        let mut w = cur.weights.clone();
        w[b] = diff.abs();
        debug_assert_eq!(child.carrying.apply(&w), cur.weights);
        cur = FollowState {
            to_root: cur.to_root.mul(&child.carrying),
            track: child.track,
            weights: w,
        };
        moves.push(m);
    }
    Ok(Toward::Split { moves, next: cur })
}

/// Outcome of a nesting run.
#[derive(Clone, Debug)]
pub struct NestingRun {
    pub diameters: Vec<Q>,
    /// Set when a split was degenerate; the run stops there.
    pub degenerate_at: Option<(usize, usize)>,
    pub final_state: FollowState,
}

/// Diameters of `P(t^i)` in the coordinates of `t0` along the full splitting
/// sequence following `w`, starting with `P(t0)`; at most `length` entries.
pub fn nesting_diameters(
    t0: &TrainTrack,
    w: &[Q],
    length: usize,
) -> Result<NestingRun, SplitError> {
    let mut state = FollowState::start(t0, w)?;
    let mut diameters = Vec::with_capacity(length);
    let mut degenerate_at = None;
    for step in 0..length {
        let cone = measure_cone(&state.track)?.image(&state.to_root)?;
        diameters.push(projective_diameter(cone.rays()).ok_or(MeasureError::Empty)?);
        if step + 1 == length {
            break;
        }
        match split_toward(&state)? {
            Toward::Split { next, .. } => state = next,
            Toward::Degenerate { branch, .. } => {
                degenerate_at = Some((step, branch));
                break;
            }
        }
    }
    Ok(NestingRun {
        diameters,
        degenerate_at,
        final_state: state,
    })
}
