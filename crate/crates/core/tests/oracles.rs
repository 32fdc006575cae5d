mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tracklab_core::classify_branches;
use tracklab_core::measures::extreme_rays;
use tracklab_core::oracle::{subset_subtracks, support_rays};
use tracklab_core::sample::random_recurrent_track;
use tracklab_core::subtrack::enumerate_subtracks;

#[test]
fn extreme_rays_match_support_enumeration_on_random_tracks() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut with_large = 0;
    for _ in 0..100 {
        let n = 2 * rng.gen_range(1..=4);
        let t = random_recurrent_track(&mut rng, n);
        assert!(t.branch_count() <= 12);
        if !classify_branches(&t).large_branches().is_empty() {
            with_large += 1;
        }
        assert_eq!(extreme_rays(&t).unwrap(), support_rays(&t));
    }
    // the sample is not dominated by trivial tracks
    assert!(with_large >= 30, "only {with_large} tracks with large branches");
}

#[test]
fn extreme_rays_match_support_enumeration_on_standard_tracks() {
    let f = common::family();
    for m in &f.complete {
        assert_eq!(extreme_rays(&m.track).unwrap(), support_rays(&m.track), "{}", m.label);
    }
    for m in &f.nearly {
        assert_eq!(extreme_rays(&m.track).unwrap(), support_rays(&m.track), "{}", m.label);
    }
}

#[test]
fn theta_subtracks_are_the_two_cycles_through_the_large_branch() {
    // Pairs through the large branch 0 are the subtracks; branches 1 and 2
    // alone meet each switch in its two small slots, which does not smooth.
    let t = common::theta();
    let got: Vec<Vec<bool>> = enumerate_subtracks(&t).iter().map(|s| s.mask().to_vec()).collect();
    let mut want = vec![
        vec![true, true, false],
        vec![true, false, true],
    ];
    want.sort();
    assert_eq!(got, want);
    assert_eq!(subset_subtracks(&t), want);
}

#[test]
fn standard_subtracks_match_subset_enumeration() {
    let f = common::family();
    for m in f.complete.iter().take(6) {
        let got: Vec<Vec<bool>> = enumerate_subtracks(&m.track)
            .iter()
            .map(|s| s.mask().to_vec())
            .collect();
        assert_eq!(got, subset_subtracks(&m.track), "{}", m.label);
    }
}
