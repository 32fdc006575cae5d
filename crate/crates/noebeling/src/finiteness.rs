//! Local finiteness: a point at distance `d > 0` from Γ is avoided by every
//! path inside the `1/n` tube around Γ once `n` is large. Concretely such
//! a path keeps out of the ball of radius `d - 1/n` around the point.

use num_bigint::BigInt;
use num_traits::One;
use thiserror::Error;

use crate::geom::{PLPath3, Point3};
use crate::grid::GridComplex;
use crate::qsqrt2::{QSqrt2, Q};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FinitenessError {
    #[error("sample {0} lies on the grid")]
    OnGrid(Point3),
    #[error("the grid is empty")]
    EmptyGrid,
}

/// Exact squared distance from a point to a segment.
pub fn segment_dist2(a: &Point3, b: &Point3, s: &Point3) -> QSqrt2 {
    let d = b.sub(a);
    let w = s.sub(a);
    let dot = |x: &[QSqrt2; 3], y: &[QSqrt2; 3]| {
        (0..3).fold(QSqrt2::zero(), |acc, i| &acc + &(&x[i] * &y[i]))
    };
    let dd = dot(&d, &d);
    if dd.is_zero() {
        return a.dist2(s);
    }
    let t = &dot(&w, &d) / &dd;
    let t = t.max(QSqrt2::zero()).min(QSqrt2::one());
    a.lerp(b, &t).dist2(s)
}

/// Whether distance `√x ≥ √d2 - 1/n`, decided exactly. With
/// `R = d2 - x - 1/n²` this is `R ≤ 0` or `4x/n² ≥ R²`.
pub fn outside_shrunk_ball(x: &QSqrt2, d2: &QSqrt2, n: u64) -> bool {
    let inv = Q::new(BigInt::one(), BigInt::from(n) * BigInt::from(n));
    let r = &(d2 - x) - &QSqrt2::rational(inv.clone());
    if !r.is_positive() {
        return true;
    }
    x.scale(&(inv * Q::from_integer(4.into()))) >= &r * &r
}

/// Smallest `k >= 1` with `k ≥ 1/d`, that is `k² d2 ≥ 1`.
pub fn ceil_inverse_sqrt(d2: &QSqrt2) -> u64 {
    let guess = (1.0 / d2.to_f64().sqrt()).ceil();
    let mut k = if guess.is_finite() && guess > 2.0 { guess as u64 - 2 } else { 1 };
    let ok = |k: u64| &d2.scale(&Q::from_integer(BigInt::from(k) * BigInt::from(k))) >= &QSqrt2::one();
    while k > 1 && ok(k - 1) {
        k -= 1;
    }
    while !ok(k) {
        k += 1;
    }
    k
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleReport {
    pub sample: Point3,
    /// Exact squared distance to Γ.
    pub dist2: QSqrt2,
    /// `⌈1/d⌉ + 1`.
    pub n0: u64,
    /// Path indices `n ≥ n0` that were checked.
    pub checked: Vec<u32>,
    /// Those among them that enter the ball.
    pub failures: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinitenessReport {
    pub samples: Vec<SampleReport>,
}

impl FinitenessReport {
    pub fn holds(&self) -> bool {
        self.samples.iter().all(|s| s.failures.is_empty())
    }

    pub fn checks(&self) -> usize {
        self.samples.iter().map(|s| s.checked.len()).sum()
    }
}

/// For each sample, the threshold `n0` and the avoidance check for every
/// supplied path `g_n` with `n ≥ n0`. Paths below the threshold are not
/// examined. An empty path list passes vacuously.
pub fn local_finiteness_report(
    paths: &[(u32, PLPath3)],
    samples: &[Point3],
    grid: &GridComplex,
) -> Result<FinitenessReport, FinitenessError> {
    let mut out = Vec::new();
    for s in samples {
        let (d2, _) = grid.distance2(s).ok_or(FinitenessError::EmptyGrid)?;
        if !d2.is_positive() {
            return Err(FinitenessError::OnGrid(s.clone()));
        }
        let n0 = ceil_inverse_sqrt(&d2) + 1;
        let mut checked = Vec::new();
        let mut failures = Vec::new();
        for (n, g) in paths {
            if u64::from(*n) < n0 {
                continue;
            }
            checked.push(*n);
            let avoids = (0..g.segment_count()).all(|k| {
                let (a, b) = g.segment(k);
                outside_shrunk_ball(&segment_dist2(a, b, s), &d2, u64::from(*n))
            });
            if !avoids {
                failures.push(*n);
            }
        }
        out.push(SampleReport {
            sample: s.clone(),
            dist2: d2,
            n0,
            checked,
            failures,
        });
    }
    Ok(FinitenessReport { samples: out })
}

/// Floating value of `d` for reports.
pub fn approx_distance(d2: &QSqrt2) -> f64 {
    d2.to_f64().abs().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::{BoundingBox, CubePairCover};
    use crate::qsqrt2::{q, qr};

    #[test]
    fn segment_distance_cases() {
        let a = Point3::rational([q(0), q(0), q(0)]);
        let b = Point3::rational([q(2), q(0), q(0)]);
        let s = Point3::rational([q(1), q(1), q(0)]);
        assert_eq!(segment_dist2(&a, &b, &s), QSqrt2::int(1));
        let s = Point3::rational([q(3), q(0), q(1)]);
        assert_eq!(segment_dist2(&a, &b, &s), QSqrt2::int(2));
        assert_eq!(segment_dist2(&a, &a, &s), QSqrt2::int(10));
    }

    #[test]
    fn thresholds() {
        assert_eq!(ceil_inverse_sqrt(&QSqrt2::rational(qr(1, 4))), 2);
        assert_eq!(ceil_inverse_sqrt(&QSqrt2::rational(qr(1, 5))), 3);
        assert_eq!(ceil_inverse_sqrt(&QSqrt2::int(4)), 1);
        assert_eq!(ceil_inverse_sqrt(&QSqrt2::rational(qr(1, 1_000_000))), 1000);
    }

    #[test]
    fn shrunk_ball_boundary_is_exact() {
        // d = 1/2, n = 4: radius 1/4, so distance exactly 1/4 is outside
        let d2 = QSqrt2::rational(qr(1, 4));
        assert!(outside_shrunk_ball(&QSqrt2::rational(qr(1, 16)), &d2, 4));
        assert!(!outside_shrunk_ball(&QSqrt2::rational(qr(1, 17)), &d2, 4));
    }

    #[test]
    fn cube_centre_sample_in_a_uniform_cover() {
        let cover = CubePairCover::uniform(2, BoundingBox::unit());
        let grid = GridComplex::of_cover(&cover).unwrap();
        let c = Point3::rational([qr(3, 8), qr(3, 8), qr(5, 8)]);
        let r = local_finiteness_report(&[], &[c.clone()], &grid).unwrap();
        // two coordinates 1/8 from the nearest edge: d = √2 / 8
        assert_eq!(r.samples[0].dist2, QSqrt2::rational(qr(2, 64)));
        assert_eq!(r.samples[0].n0, 7);
        assert!(r.holds());
        let on = Point3::rational([qr(1, 4), qr(1, 4), qr(1, 3)]);
        assert!(matches!(local_finiteness_report(&[], &[on], &grid), Err(FinitenessError::OnGrid(_))));
    }

    #[test]
    fn near_sample_gets_a_large_threshold() {
        let cover = CubePairCover::uniform(1, BoundingBox::unit());
        let grid = GridComplex::of_cover(&cover).unwrap();
        let s = Point3::rational([qr(1, 1000), qr(1, 4), qr(0, 1)]);
        let r = local_finiteness_report(&[], &[s], &grid).unwrap();
        assert_eq!(r.samples[0].n0, 1001);
        assert!(r.samples[0].checked.is_empty());
    }
}
