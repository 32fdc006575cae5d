//! Brute-force reference computations, kept deliberately naive.

use num_bigint::BigInt;
use num_traits::Signed;

use crate::linalg::{kernel_basis, primitive};
use crate::measures::switch_matrix;
use crate::track::{Slot, TrainTrack};

/// Extreme rays by support enumeration: a support `S` carries an extreme ray
/// exactly when the switch conditions restricted to `S` have a
/// one-dimensional solution space spanned by a vector positive on all of
/// `S`. Exponential in the branch count.
pub fn support_rays(t: &TrainTrack) -> Vec<Vec<BigInt>> {
    let e = t.branch_count();
    assert!(e <= 20, "support enumeration is exponential");
    let a = switch_matrix(t);
    let mut rays = Vec::new();
    for bits in 1u32..(1 << e) {
        let cols: Vec<usize> = (0..e).filter(|i| bits >> i & 1 == 1).collect();
        let sub: Vec<Vec<_>> = a
            .iter()
            .map(|row| cols.iter().map(|&c| row[c].clone()).collect())
            .collect();
        let ker = kernel_basis(&sub, cols.len());
        if ker.len() != 1 {
            continue;
        }
        let v = &ker[0];
        let sign_ok = v.iter().all(|x| x.is_positive()) || v.iter().all(|x| x.is_negative());
        if !sign_ok {
            continue;
        }
        let p: Vec<BigInt> = primitive(v).into_iter().map(|x| x.abs()).collect();
        let mut full = vec![BigInt::from(0); e];
        for (k, &c) in cols.iter().enumerate() {
            full[c] = p[k].clone();
        }
        rays.push(full);
    }
    rays.sort();
    rays
}

/// Subtrack masks by exhausting all branch subsets: nonempty, proper, and
/// at every switch keeping nothing, everything, or the large slot with
/// exactly one small slot.
pub fn subset_subtracks(t: &TrainTrack) -> Vec<Vec<bool>> {
    let e = t.branch_count();
    assert!(e <= 20, "subset enumeration is exponential");
    let mut out = Vec::new();
    for bits in 1u32..(1 << e) - 1 {
        let mask: Vec<bool> = (0..e).map(|i| bits >> i & 1 == 1).collect();
        let ok = (0..t.switch_count()).all(|s| {
            let kept = |slot| mask[t.at(s, slot).branch];
            let (l, x, y) = (kept(Slot::Large), kept(Slot::SmallLeft), kept(Slot::SmallRight));
            matches!((l, x, y), (false, false, false) | (true, true, true) | (true, true, false) | (true, false, true))
        });
        if ok {
            out.push(mask);
        }
    }
    out.sort();
    out
}
