#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use tracklab_core::standard::{shipped_family, StandardTrackFamily};
use tracklab_core::{BranchEnd, Surface, TrainTrack};

pub fn theta() -> TrainTrack {
    let e = BranchEnd::new;
    TrainTrack::new(
        Surface::sphere(3),
        3,
        vec![[e(0, 0), e(1, 0), e(2, 0)], [e(0, 1), e(2, 1), e(1, 1)]],
        vec![1, 1, 1],
    )
    .unwrap()
}

pub fn family() -> StandardTrackFamily {
    shipped_family().expect("shipped family loads")
}

/// Same ribbon track under a random renumbering of switches and branches and
/// random reversal of branch orientations.
pub fn relabel<R: Rng>(t: &TrainTrack, rng: &mut R) -> TrainTrack {
    let n = t.switch_count();
    let e = t.branch_count();
    let mut ps: Vec<usize> = (0..n).collect();
    ps.shuffle(rng);
    let mut pb: Vec<usize> = (0..e).collect();
    pb.shuffle(rng);
    let flip: Vec<u8> = (0..e).map(|_| rng.gen_range(0..=1)).collect();
    let map = |x: BranchEnd| BranchEnd::new(pb[x.branch], x.end ^ flip[x.branch]);
    let mut switches = vec![[None; 3]; n];
    for (s, row) in t.raw_switches().iter().enumerate() {
        for k in 0..3 {
            switches[ps[s]][k] = row[k].map(map);
        }
    }
    let bare = TrainTrack::from_parts(t.surface(), e, switches, Vec::new());
    let mut inv = vec![0; e];
    for (old, &new) in pb.iter().enumerate() {
        inv[new] = old;
    }
    let old_ribbon = t.ribbon();
    let punct = bare
        .ribbon()
        .faces
        .iter()
        .map(|cycle| {
            let d = cycle[0];
            let b = inv[d / 2];
            let old = 2 * b + ((d % 2) as u8 ^ flip[b]) as usize;
            t.face_punctures()[old_ribbon.face_of[old]]
        })
        .collect();
    bare.with_punctures(punct)
}
