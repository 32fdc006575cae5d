//! Subtracks as branch masks on a parent track.
//!
//! A mask is a subtrack when at every switch the kept slots are either none,
//! all three, or the large slot plus exactly one small slot. Switches of the
//! last kind become smooth points after smoothing. Complementary regions of a
//! subtrack are unions of parent faces glued across removed branches and
//! removed switches.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::linalg::IntMatrix;
use crate::track::{
    validate_track, BranchEnd, RegionCensus, RegionShape, Slot, TrainTrack,
};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subtrack {
    mask: Vec<bool>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SubtrackError {
    #[error("surfaces of genus {0} are not supported")]
    UnsupportedGenus(u32),
    #[error("mask length {got} does not match {expected} branches")]
    Length { expected: usize, got: usize },
}

impl Subtrack {
    pub fn full(t: &TrainTrack) -> Self {
        Subtrack {
            mask: vec![true; t.branch_count()],
        }
    }

    pub fn from_mask(mask: Vec<bool>) -> Self {
        Subtrack { mask }
    }

    pub fn without(t: &TrainTrack, removed: &[usize]) -> Self {
        let mut mask = vec![true; t.branch_count()];
        for &b in removed {
            mask[b] = false;
        }
        Subtrack { mask }
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn contains(&self, b: usize) -> bool {
        self.mask[b]
    }

    pub fn branches(&self) -> Vec<usize> {
        (0..self.mask.len()).filter(|&b| self.mask[b]).collect()
    }

    pub fn removed(&self) -> Vec<usize> {
        (0..self.mask.len()).filter(|&b| !self.mask[b]).collect()
    }

    pub fn len(&self) -> usize {
        self.mask.iter().filter(|&&k| k).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_proper(&self) -> bool {
        self.mask.iter().any(|&k| !k)
    }
}

/// Occupancy pattern of a switch under a mask.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SwitchUse {
    Unused,
    Trivalent,
    /// Large slot plus the given small slot; smoothed away.
    Bivalent(Slot),
    Broken,
}

pub fn switch_use(t: &TrainTrack, mask: &[bool], s: usize) -> SwitchUse {
    let k = |slot| mask[t.at(s, slot).branch];
    match (k(Slot::Large), k(Slot::SmallLeft), k(Slot::SmallRight)) {
        (false, false, false) => SwitchUse::Unused,
        (true, true, true) => SwitchUse::Trivalent,
        (true, true, false) => SwitchUse::Bivalent(Slot::SmallLeft),
        (true, false, true) => SwitchUse::Bivalent(Slot::SmallRight),
        _ => SwitchUse::Broken,
    }
}

/// Recursively drops branches that end badly: a lone large end, or small
/// ends at a switch whose large branch is gone.
pub fn trim(t: &TrainTrack, mask: &[bool]) -> Vec<bool> {
    let mut m = mask.to_vec();
    loop {
        let mut changed = false;
        for s in 0..t.switch_count() {
            if switch_use(t, &m, s) != SwitchUse::Broken {
                continue;
            }
            let large = t.at(s, Slot::Large).branch;
            if m[large] {
                // Large alone.
                m[large] = false;
            } else {
                for slot in [Slot::SmallLeft, Slot::SmallRight] {
                    m[t.at(s, slot).branch] = false;
                }
            }
            changed = true;
        }
        if !changed {
            return m;
        }
    }
}

pub fn is_subtrack_mask(t: &TrainTrack, mask: &[bool]) -> bool {
    mask.iter().any(|&k| k)
        && (0..t.switch_count()).all(|s| switch_use(t, mask, s) != SwitchUse::Broken)
}

/// All nonempty proper subtracks, by backtracking over local switch
/// patterns. Sorted by mask.
pub fn enumerate_subtracks(t: &TrainTrack) -> Vec<Subtrack> {
    const PATTERNS: [[bool; 3]; 4] = [
        [false, false, false],
        [true, true, true],
        [true, true, false],
        [true, false, true],
    ];
    let n = t.switch_count();
    let mut state: Vec<Option<bool>> = vec![None; t.branch_count()];
    let mut out = Vec::new();

    fn rec(
        t: &TrainTrack,
        s: usize,
        n: usize,
        state: &mut Vec<Option<bool>>,
        out: &mut Vec<Subtrack>,
    ) {
        if s == n {
            let mask: Vec<bool> = state.iter().map(|x| x.unwrap_or(false)).collect();
            let sub = Subtrack { mask };
            if !sub.is_empty() && sub.is_proper() {
                out.push(sub);
            }
            return;
        }
        for pat in PATTERNS {
            let mut assigned = Vec::new();
            let mut ok = true;
            for (k, slot) in Slot::ALL.iter().enumerate() {
                let b = t.at(s, *slot).branch;
                match state[b] {
                    Some(v) if v != pat[k] => {
                        ok = false;
                        break;
                    }
                    Some(_) => {}
                    None => {
                        state[b] = Some(pat[k]);
                        assigned.push(b);
                    }
                }
            }
            if ok {
                rec(t, s + 1, n, state, out);
            }
            for b in assigned {
                state[b] = None;
            }
        }
    }

    rec(t, 0, n, &mut state, &mut out);
    out.sort();
    out
}

/// Complementary regions of a subtrack. Each region records the parent
/// faces it contains.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubtrackRegions {
    pub shapes: Vec<RegionShape>,
    pub faces: Vec<Vec<usize>>,
    /// Region index of each parent face.
    pub region_of_face: Vec<usize>,
}

impl SubtrackRegions {
    pub fn census(&self) -> RegionCensus {
        RegionCensus {
            regions: self.shapes.clone(),
        }
    }
}

pub fn subtrack_regions(t: &TrainTrack, s: &Subtrack) -> SubtrackRegions {
    let ribbon = t.ribbon();
    let nf = ribbon.faces.len();
    let mut parent: Vec<usize> = (0..nf).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for b in s.removed() {
        let a = find(&mut parent, ribbon.face_of[2 * b]);
        let c = find(&mut parent, ribbon.face_of[2 * b + 1]);
        parent[a] = c;
    }
    let mut index: BTreeMap<usize, usize> = BTreeMap::new();
    let mut region_of_face = vec![0; nf];
    for f in 0..nf {
        let root = find(&mut parent, f);
        let next = index.len();
        region_of_face[f] = *index.entry(root).or_insert(next);
    }
    let nr = index.len();
    let mut euler = vec![0i64; nr];
    let mut cusps = vec![0u32; nr];
    let mut punctures = vec![0u32; nr];
    let mut faces = vec![Vec::new(); nr];
    for f in 0..nf {
        let r = region_of_face[f];
        euler[r] += 1;
        punctures[r] += t.face_punctures()[f];
        faces[r].push(f);
    }
    for b in s.removed() {
        euler[region_of_face[ribbon.face_of[2 * b]]] -= 1;
    }
    for sw in 0..t.switch_count() {
        match switch_use(t, s.mask(), sw) {
            SwitchUse::Unused => {
                let d = t.at(sw, Slot::Large).dart();
                euler[region_of_face[ribbon.face_of[d]]] += 1;
            }
            SwitchUse::Trivalent => cusps[region_of_face[ribbon.cusp_face(sw)]] += 1,
            _ => {}
        }
    }
    SubtrackRegions {
        shapes: (0..nr)
            .map(|r| RegionShape {
                euler: euler[r],
                cusps: cusps[r],
                punctures: punctures[r],
            })
            .collect(),
        faces,
        region_of_face,
    }
}

/// Why a track or subtrack fails to fill.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FillingWitness {
    pub region: usize,
    pub shape: RegionShape,
}

/// Filling iff every complementary region is a disc with at most one
/// puncture. Returns the first offending region otherwise.
pub fn subtrack_filling(
    t: &TrainTrack,
    s: &Subtrack,
) -> Result<(bool, Option<FillingWitness>), SubtrackError> {
    if t.surface().genus != 0 {
        return Err(SubtrackError::UnsupportedGenus(t.surface().genus));
    }
    if s.mask.len() != t.branch_count() {
        return Err(SubtrackError::Length {
            expected: t.branch_count(),
            got: s.mask.len(),
        });
    }
    let regions = subtrack_regions(t, s);
    for (i, shape) in regions.shapes.iter().enumerate() {
        if !shape.is_disc() || shape.punctures > 1 {
            return Ok((
                false,
                Some(FillingWitness {
                    region: i,
                    shape: *shape,
                }),
            ));
        }
    }
    Ok((true, None))
}

pub fn is_filling(t: &TrainTrack) -> Result<(bool, Option<FillingWitness>), SubtrackError> {
    subtrack_filling(t, &Subtrack::full(t))
}

/// A subtrack rebuilt as a standalone track, with the inclusion matrix
/// sending its branch weights to parent branch weights.
#[derive(Clone, Debug)]
pub struct Smoothed {
    pub track: TrainTrack,
    pub inclusion: IntMatrix,
    /// Parent switch of each new switch.
    pub switch_origin: Vec<usize>,
}

/// Smooths bivalent switches. `None` when the subtrack is disconnected or
/// has a component without trivalent switches (a closed curve).
pub fn smooth(t: &TrainTrack, s: &Subtrack) -> Option<Smoothed> {
    let ribbon = t.ribbon();
    let mask = s.mask();
    let tri: Vec<usize> = (0..t.switch_count())
        .filter(|&sw| switch_use(t, mask, sw) == SwitchUse::Trivalent)
        .collect();
    if tri.is_empty() {
        return None;
    }
    let mut new_index = vec![usize::MAX; t.switch_count()];
    for (i, &sw) in tri.iter().enumerate() {
        new_index[sw] = i;
    }
    let mut slots: Vec<[Option<BranchEnd>; 3]> = vec![[None; 3]; tri.len()];
    let mut chains: Vec<Vec<usize>> = Vec::new();
    let mut used = vec![false; t.branch_count()];
    for (i, &sw) in tri.iter().enumerate() {
        for slot in Slot::ALL {
            if slots[i][slot.index()].is_some() {
                continue;
            }
            let nb = chains.len();
            let mut chain = Vec::new();
            let mut d = t.at(sw, slot).dart();
            let (end_switch, end_slot) = loop {
                chain.push(d / 2);
                used[d / 2] = true;
                let arrive = ribbon.pos[d ^ 1];
                match switch_use(t, mask, arrive.switch) {
                    SwitchUse::Trivalent => break (new_index[arrive.switch], arrive.slot),
                    SwitchUse::Bivalent(small) => {
                        let out = if arrive.slot == Slot::Large {
                            small
                        } else {
                            Slot::Large
                        };
                        d = t.at(arrive.switch, out).dart();
                    }
                    _ => unreachable!("subtrack masks keep consistent switches"),
                }
            };
            slots[i][slot.index()] = Some(BranchEnd::new(nb, 0));
            slots[end_switch][end_slot.index()] = Some(BranchEnd::new(nb, 1));
            chains.push(chain);
        }
    }
    if (0..t.branch_count()).any(|b| mask[b] && !used[b]) {
        return None;
    }
    let mut inclusion = IntMatrix::zeros(t.branch_count(), chains.len());
    for (nb, chain) in chains.iter().enumerate() {
        for &pb in chain {
            inclusion.add_at(pb, nb, 1);
        }
    }
    let skeleton = TrainTrack::from_parts(t.surface(), chains.len(), slots, Vec::new());
    // Each new face lies on the same side of its first dart as the parent
    // face of the first parent dart of that chain.
    let regions = subtrack_regions(t, s);
    let rib = skeleton.ribbon();
    let mut first_parent_dart = vec![0usize; 2 * chains.len()];
    for d in 0..2 * chains.len() {
        let p = rib.pos[d];
        first_parent_dart[d] = t.at(tri[p.switch], p.slot).dart();
    }
    let punct: Vec<u32> = rib
        .faces
        .iter()
        .map(|cycle| {
            let pf = ribbon.face_of[first_parent_dart[cycle[0]]];
            regions.shapes[regions.region_of_face[pf]].punctures
        })
        .collect();
    let track = skeleton.with_punctures(punct);
    if !validate_track(&track).is_valid() {
        return None;
    }
    Some(Smoothed {
        track,
        inclusion,
        switch_origin: tri,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::track::tests::theta;
    use crate::track::RegionLabel;

    fn brute_force(t: &TrainTrack) -> Vec<Subtrack> {
        let e = t.branch_count();
        let mut out = Vec::new();
        for bits in 1u32..(1 << e) - 1 {
            let mask: Vec<bool> = (0..e).map(|b| bits >> b & 1 == 1).collect();
            if trim(t, &mask) == mask {
                out.push(Subtrack::from_mask(mask));
            }
        }
        out.sort();
        out
    }

    #[test]
    fn theta_subtracks_are_two_curves() {
        let t = theta();
        let subs = enumerate_subtracks(&t);
        assert_eq!(subs, brute_force(&t));
        let masks: Vec<Vec<bool>> = subs.iter().map(|s| s.mask().to_vec()).collect();
        assert_eq!(masks.len(), 2);
        assert!(masks.contains(&vec![true, true, false]));
        assert!(masks.contains(&vec![true, false, true]));
    }

    #[test]
    fn theta_curve_regions() {
        let t = theta();
        // Curve a∪b: two disc regions with 1 and 2 punctures.
        let s = Subtrack::without(&t, &[2]);
        let r = subtrack_regions(&t, &s);
        let mut p: Vec<u32> = r.shapes.iter().map(|x| x.punctures).collect();
        p.sort();
        assert_eq!(p, vec![1, 2]);
        assert!(r.shapes.iter().all(|x| x.is_disc() && x.cusps == 0));
        let (fill, w) = subtrack_filling(&t, &s).unwrap();
        assert!(!fill);
        assert_eq!(w.unwrap().shape.punctures, 2);
        assert!(smooth(&t, &s).is_none());
        assert!(is_filling(&t).unwrap().0);
        let census = subtrack_regions(&t, &Subtrack::full(&t)).census();
        assert_eq!(census.count(RegionLabel::Other), 2);
        assert_eq!(census.count(RegionLabel::PuncturedBigon), 1);
    }

    #[test]
    fn full_smoothing_is_identity_up_to_labels() {
        let t = theta();
        let sm = smooth(&t, &Subtrack::full(&t)).unwrap();
        assert_eq!(
            crate::track::canonical_form(&sm.track),
            crate::track::canonical_form(&t)
        );
        assert_eq!(sm.inclusion.rows, 3);
        assert_eq!(sm.inclusion.cols, 3);
    }
}
