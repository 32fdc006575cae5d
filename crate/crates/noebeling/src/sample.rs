//! Random inputs for the randomized checks: certified paths, planted
//! violations, admissible covers and off-grid sample points.

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::certify::segment_violations;
use crate::cover::{BoundingBox, CubePairCover, DiadicCube};
use crate::geom::{PLPath3, Point3};
use crate::grid::GridComplex;
use crate::qsqrt2::{QSqrt2, Q};

fn qr(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// `a + b√2` in the open interval `(lo, hi)` with `b != 0`, both parts
/// with small denominators.
pub fn random_irrational<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> QSqrt2 {
    loop {
        let bd = rng.gen_range(3..60);
        let bn = rng.gen_range(1..bd) * if rng.gen() { 1 } else { -1 };
        let b = qr(bn, bd);
        let target = rng.gen_range(lo..hi);
        let a_f = target - (bn as f64 / bd as f64) * std::f64::consts::SQRT_2;
        let a = qr((a_f * 1024.0).round() as i64, 1024);
        let x = QSqrt2::new(a, b);
        let v = x.to_f64();
        if v > lo && v < hi && !x.is_rational() {
            return x;
        }
    }
}

pub fn random_point<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> Point3 {
    Point3::new(
        random_irrational(rng, lo, hi),
        random_irrational(rng, lo, hi),
        random_irrational(rng, lo, hi),
    )
}

/// A path with `vertices` vertices in `(lo, hi)^3`, each segment redrawn
/// until the exact certification accepts it.
pub fn random_certified_path<R: Rng>(rng: &mut R, vertices: usize, lo: f64, hi: f64) -> PLPath3 {
    let mut pts = vec![random_point(rng, lo, hi)];
    while pts.len() < vertices.max(2) {
        let cand = random_point(rng, lo, hi);
        if segment_violations(pts.last().expect("non-empty"), &cand).is_empty() {
            pts.push(cand);
        }
    }
    PLPath3::uniform(pts).expect("at least two vertices")
}

/// Segment kinds for the refuter comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SegmentKind {
    /// Two rational coordinates planted at a sampled parameter.
    Planted,
    /// Independent random end points.
    Generic,
    /// One coordinate held fixed, rational or not.
    Constant,
    /// Two directions rationally proportional.
    Proportional,
}

fn small_rational<R: Rng>(rng: &mut R) -> Q {
    let d = rng.gen_range(1..40);
    qr(rng.gen_range(-2 * d..2 * d), d)
}

fn small_value<R: Rng>(rng: &mut R, irrational: bool) -> QSqrt2 {
    let b = if irrational {
        let d = rng.gen_range(2..30);
        qr(rng.gen_range(1..d) * if rng.gen() { 1 } else { -1 }, d)
    } else {
        Q::from_integer(0.into())
    };
    QSqrt2::new(small_rational(rng), b)
}

fn mixed_value<R: Rng>(rng: &mut R, p_irrational: f64) -> QSqrt2 {
    let irrational = rng.gen_bool(p_irrational);
    small_value(rng, irrational)
}

/// A random segment of the given kind. Planted segments pass through a
/// point with two rational coordinates at `t = k / samples`.
pub fn random_segment<R: Rng>(rng: &mut R, kind: SegmentKind, samples: u32) -> (Point3, Point3) {
    match kind {
        SegmentKind::Planted => {
            let t = QSqrt2::rational(qr(rng.gen_range(0..=samples as i64), samples as i64));
            let free = rng.gen_range(0..3);
            let x = Point3(std::array::from_fn(|i| small_value(rng, i == free)));
            let d: [QSqrt2; 3] = std::array::from_fn(|_| small_value(rng, true));
            let a = Point3(std::array::from_fn(|i| &x.0[i] - &(&d[i] * &t)));
            let b = Point3(std::array::from_fn(|i| &a.0[i] + &d[i]));
            (a, b)
        }
        SegmentKind::Generic => {
            let a = Point3(std::array::from_fn(|_| mixed_value(rng, 0.8)));
            let b = Point3(std::array::from_fn(|_| mixed_value(rng, 0.8)));
            (a, b)
        }
        SegmentKind::Constant => {
            let a = Point3(std::array::from_fn(|_| mixed_value(rng, 0.7)));
            let mut b = Point3(std::array::from_fn(|_| mixed_value(rng, 0.7)));
            let i = rng.gen_range(0..3);
            b.0[i] = a.0[i].clone();
            (a, b)
        }
        SegmentKind::Proportional => {
            let a = Point3(std::array::from_fn(|_| mixed_value(rng, 0.7)));
            let d0 = small_value(rng, true);
            let lam = small_rational(rng);
            let d = [d0.clone(), d0.scale(&lam), mixed_value(rng, 0.5)];
            let b = Point3(std::array::from_fn(|i| &a.0[i] + &d[i]));
            (a, b)
        }
    }
}

/// Level-`m` cubes of the box chosen for refinement with probability `p`.
pub fn random_refinement<R: Rng>(rng: &mut R, m: u32, bbox: BoundingBox, p: f64) -> Vec<DiadicCube> {
    bbox.cubes(m, 0).into_iter().filter(|_| rng.gen_bool(p)).collect()
}

/// A valid cover of mixed levels: a uniform cover of level 0, 1 or 2,
/// refined at random cubes (margin cubes included), with a few pairs
/// dropped when `drop` is set. Covers with dropped pairs no longer cover
/// every face.
pub fn random_admissible_cover<R: Rng>(rng: &mut R, bbox: BoundingBox, drop: bool) -> CubePairCover {
    let m = bbox.level + rng.gen_range(0..3);
    let p = rng.gen_range(0.0..0.6);
    let refine: Vec<DiadicCube> = bbox.cubes(m, 1).into_iter().filter(|_| rng.gen_bool(p)).collect();
    let cover = CubePairCover::refined_uniform(m, bbox, &refine);
    if !drop {
        return cover;
    }
    let mut gone: Vec<_> = cover.pairs().to_vec();
    gone.shuffle(rng);
    let k = rng.gen_range(0..=gone.len() / 8);
    gone.truncate(k);
    cover.without(&gone)
}

/// Rational points of the box off Γ.
pub fn random_off_grid_samples<R: Rng>(rng: &mut R, grid: &GridComplex, count: usize) -> Vec<Point3> {
    let lo = grid.bounds.lo;
    let hi = grid.bounds.hi;
    let den = 1i64 << (grid.level + 3);
    let scale = 1i64 << 3;
    let mut out = Vec::new();
    while out.len() < count {
        let p = Point3::rational(std::array::from_fn(|i| {
            qr(rng.gen_range(lo[i] * scale + 1..hi[i] * scale), den)
        }));
        if grid.distance2(&p).map(|(d, _)| d.is_positive()).unwrap_or(false) {
            out.push(p);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certify::{certify_path, refute_segment};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_paths_are_certified_and_inside() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..5 {
            let p = random_certified_path(&mut rng, 5, 0.05, 0.95);
            assert!(certify_path(&p).certified);
            assert!(p.vertices().iter().all(|v| v.0.iter().all(|c| c.to_f64() > 0.0 && c.to_f64() < 1.0)));
        }
    }

    #[test]
    fn planted_segments_are_refuted() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let (a, b) = random_segment(&mut rng, SegmentKind::Planted, 100);
            assert!(refute_segment(&a, &b, 100).is_some());
        }
    }

    #[test]
    fn random_covers_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for k in 0..20 {
            let c = random_admissible_cover(&mut rng, BoundingBox::unit(), k % 2 == 0);
            c.validate().unwrap();
            assert!(!c.maximal_cubes().is_empty());
        }
    }
}
