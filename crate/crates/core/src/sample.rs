//! Random tracks and measures for property runs and oracle comparisons.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::linalg::{q, qi, Q};
use crate::measures::{extreme_rays, is_recurrent};
use crate::track::{validate_track, BranchEnd, Surface, TrainTrack};

/// A connected trivalent ribbon track with `switches` switches (even, at
/// least 2) and random slot structure. Faces get zero or one puncture at
/// random and the surface is read off the ribbon structure. Retries until the
/// result validates.
pub fn random_track<R: Rng>(rng: &mut R, switches: usize) -> TrainTrack {
    assert!(switches >= 2 && switches % 2 == 0, "need an even switch count");
    let branches = 3 * switches / 2;
    loop {
        let mut slots: Vec<usize> = (0..3 * switches).collect();
        slots.shuffle(rng);
        let mut table = vec![[None; 3]; switches];
        for (i, pair) in slots.chunks(2).enumerate() {
            for (end, &s) in pair.iter().enumerate() {
                table[s / 3][s % 3] = Some(BranchEnd::new(i, end as u8));
            }
        }
        let bare = TrainTrack::from_parts(Surface::sphere(0), branches, table, Vec::new());
        let faces = bare.ribbon().faces.len();
        let euler = switches as i64 - branches as i64 + faces as i64;
        if euler > 2 || (2 - euler) % 2 != 0 {
            continue;
        }
        let punct: Vec<u32> = (0..faces).map(|_| rng.gen_range(0..=1)).collect();
        let surface = Surface {
            genus: ((2 - euler) / 2) as u32,
            punctures: punct.iter().sum(),
        };
        let t = bare.with_surface(surface).with_punctures(punct);
        if validate_track(&t).is_valid() {
            return t;
        }
    }
}

/// [`random_track`] retried until recurrent.
pub fn random_recurrent_track<R: Rng>(rng: &mut R, switches: usize) -> TrainTrack {
    loop {
        let t = random_track(rng, switches);
        if is_recurrent(&t).recurrent {
            return t;
        }
    }
}

/// Strictly positive measure on a recurrent track: a combination of all
/// extreme rays with independent integer coefficients in `1..bound`.
pub fn random_measure<R: Rng>(rng: &mut R, t: &TrainTrack, bound: i64) -> Option<Vec<Q>> {
    let rays = extreme_rays(t).ok()?;
    let mut w = vec![q(0); t.branch_count()];
    for r in &rays {
        let c = q(rng.gen_range(1..bound));
        for (wi, ri) in w.iter_mut().zip(r) {
            *wi += &c * qi(ri);
        }
    }
    Some(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_tracks_validate_and_are_connected() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [2, 4, 6, 8] {
            for _ in 0..20 {
                let t = random_track(&mut rng, n);
                assert_eq!(t.switch_count(), n);
                assert!(validate_track(&t).is_valid());
            }
        }
    }

    #[test]
    fn random_measures_are_positive() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let t = random_recurrent_track(&mut rng, 6);
        let w = random_measure(&mut rng, &t, 100).unwrap();
        assert!(w.iter().all(|x| *x > q(0)));
    }
}
