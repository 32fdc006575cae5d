//! Exact decision whether a PL path stays in the Nöbeling curve N³₁, the
//! points of R³ with at most one rational coordinate.
//!
//! Along a segment write `x_i(t) = P_i + t D_i` with `P_i = p_i + q_i√2` and
//! `D_i = r_i + s_i√2`. For a coordinate pair `(i, j)` a parameter making
//! both rational, with values `c_i`, `c_j`, satisfies
//! `(c_j - P_j) D_i = (c_i - P_i) D_j`. Splitting rational and √2 parts
//! gives
//!
//! ```text
//!   -r_j c_i + r_i c_j = r_i p_j + 2 q_j s_i - r_j p_i - 2 q_i s_j
//!   -s_j c_i + s_i c_j = s_i p_j + q_j r_i - s_j p_i - q_i r_j
//! ```
//!
//! When the system is regular its unique solution gives one candidate
//! parameter. The degenerate cases are listed in [`PairCase`].

use std::fmt;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::geom::{PLPath3, Point3};
use crate::qsqrt2::{dyadic_between, q, QSqrt2, Q};

/// How a coordinate pair was decided.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PairCase {
    /// Both coordinates constant along the segment.
    BothConstant,
    /// One coordinate constant and rational, the other moving: the moving
    /// one is rational on a dense set of parameters.
    ConstantRational,
    /// One coordinate constant and irrational: never both rational.
    ConstantIrrational,
    /// Regular 2x2 system: at most one parameter.
    Regular,
    /// Directions rationally proportional and the √2 parts of the offset
    /// cancel: both coordinates are rational together on a dense set.
    ProportionalDense,
    /// Directions rationally proportional, offsets incompatible.
    ProportionalEmpty,
}

/// A parameter on a segment where two coordinates are rational.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub segment: usize,
    /// Local parameter in `[0, 1]` on the segment.
    pub local: QSqrt2,
    /// Global path parameter.
    pub param: QSqrt2,
    pub coords: (usize, usize),
    pub case: PairCase,
    pub point: Point3,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "segment={} t={} coords=({},{}) case={:?} point={}",
            self.segment,
            self.param,
            self.coords.0 + 1,
            self.coords.1 + 1,
            self.case,
            self.point
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certification {
    pub certified: bool,
    pub witness: Option<Witness>,
    /// Case counts over all segments and pairs, for reporting.
    pub cases: Vec<(PairCase, usize)>,
}

/// A parameter in `[0, 1]` where `P + t D` takes a rational value, `D != 0`.
fn rational_hit(p: &QSqrt2, d: &QSqrt2) -> QSqrt2 {
    if p.is_rational() {
        return QSqrt2::zero();
    }
    let end = p + d;
    if end.is_rational() {
        return QSqrt2::one();
    }
    let (lo, hi) = if p < &end { (p, &end) } else { (&end, p) };
    let c = QSqrt2::rational(dyadic_between(lo, hi));
    &(&c - p) / d
}

fn in_unit(t: &QSqrt2) -> bool {
    !t.is_negative() && *t <= QSqrt2::one()
}

/// Decides the pair `(i, j)` on one segment; returns the case and a local
/// parameter where both are rational, if any.
pub fn decide_pair(pi: &QSqrt2, di: &QSqrt2, pj: &QSqrt2, dj: &QSqrt2) -> (PairCase, Option<QSqrt2>) {
    match (di.is_zero(), dj.is_zero()) {
        (true, true) => {
            let hit = (pi.is_rational() && pj.is_rational()).then(QSqrt2::zero);
            (PairCase::BothConstant, hit)
        }
        (true, false) | (false, true) => {
            let (pc, pv, dv) = if di.is_zero() { (pi, pj, dj) } else { (pj, pi, di) };
            if pc.is_rational() {
                (PairCase::ConstantRational, Some(rational_hit(pv, dv)))
            } else {
                (PairCase::ConstantIrrational, None)
            }
        }
        (false, false) => {
            let (p_i, q_i, r_i, s_i) = (&pi.a, &pi.b, &di.a, &di.b);
            let (p_j, q_j, r_j, s_j) = (&pj.a, &pj.b, &dj.a, &dj.b);
            let det = r_i * s_j - r_j * s_i;
            if det.is_zero() {
                let lambda = if !r_i.is_zero() { r_j / r_i } else { s_j / s_i };
                if (q_j - &lambda * q_i).is_zero() {
                    (PairCase::ProportionalDense, Some(rational_hit(pi, di)))
                } else {
                    (PairCase::ProportionalEmpty, None)
                }
            } else {
                let two = q(2);
                let rr = r_i * p_j + &two * q_j * s_i - r_j * p_i - &two * q_i * s_j;
                let ss = s_i * p_j + q_j * r_i - s_j * p_i - q_i * r_j;
                let ci: Q = (&rr * s_i - r_i * &ss) / &det;
                let t = &(&QSqrt2::rational(ci) - pi) / di;
                let hit = in_unit(&t).then_some(t);
                (PairCase::Regular, hit)
            }
        }
    }
}

pub const PAIRS: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];

/// All violating pairs of one segment with their local parameters.
pub fn segment_violations(a: &Point3, b: &Point3) -> Vec<((usize, usize), PairCase, QSqrt2)> {
    let d = b.sub(a);
    let mut out = Vec::new();
    for (i, j) in PAIRS {
        let (case, hit) = decide_pair(a.coord(i), &d[i], a.coord(j), &d[j]);
        if let Some(t) = hit {
            out.push(((i, j), case, t));
        }
    }
    out
}

/// Exact certification of the whole path; the witness is the first
/// violation in segment order.
pub fn certify_path(p: &PLPath3) -> Certification {
    let mut counts: Vec<(PairCase, usize)> = Vec::new();
    let mut witness = None;
    for k in 0..p.segment_count() {
        let (a, b) = p.segment(k);
        let d = b.sub(a);
        for (i, j) in PAIRS {
            let (case, hit) = decide_pair(a.coord(i), &d[i], a.coord(j), &d[j]);
            match counts.iter_mut().find(|(c, _)| *c == case) {
                Some((_, n)) => *n += 1,
                None => counts.push((case, 1)),
            }
            if let (Some(t), None) = (hit, &witness) {
                let point = a.lerp(b, &t);
                debug_assert!(point.coord(i).is_rational() && point.coord(j).is_rational());
                witness = Some(Witness {
                    segment: k,
                    param: p.global(k, &t),
                    local: t,
                    coords: (i, j),
                    case,
                    point,
                });
            }
        }
    }
    Certification {
        certified: witness.is_none(),
        witness,
        cases: counts,
    }
}

/// Sampling refuter: checks the points at `t = k / samples`, so it can
/// only find violations at those parameters. The √2-part of coordinate `i`
/// at `t` is `q_i + t s_i`, which vanishes exactly when
/// `q_i samples + k s_i = 0`; that integer test is run for every `k`.
pub fn refute_segment(a: &Point3, b: &Point3, samples: u32) -> Option<Q> {
    let d = b.sub(a);
    let n = BigInt::from(samples);
    let lin: Vec<(BigInt, BigInt)> = (0..3)
        .map(|i| {
            let (qi, si) = (&a.coord(i).b, &d[i].b);
            (qi.numer() * si.denom() * &n, si.numer() * qi.denom())
        })
        .collect();
    let small: Option<Vec<(i128, i128)>> = lin
        .iter()
        .map(|(x, y)| {
            let (x, y) = (x.to_i128()?, y.to_i128()?);
            (x.unsigned_abs() < 1 << 100 && y.unsigned_abs() < 1 << 100).then_some((x, y))
        })
        .collect();
    let hit = |k: u32| -> bool {
        let rational = match &small {
            Some(v) => v.iter().filter(|(x, y)| x + i128::from(k) * y == 0).count(),
            None => lin.iter().filter(|(x, y)| (x + BigInt::from(k) * y).is_zero()).count(),
        };
        rational >= 2
    };
    (0..=samples)
        .find(|&k| hit(k))
        .map(|k| Q::new(k.into(), samples.into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsqrt2::qr;

    fn c(a: i64, b: i64) -> QSqrt2 {
        QSqrt2::new(q(a), q(b))
    }

    fn path(pts: Vec<[QSqrt2; 3]>) -> PLPath3 {
        PLPath3::uniform(pts.into_iter().map(Point3).collect()).unwrap()
    }

    #[test]
    fn constant_irrational_point_is_certified() {
        let p = path(vec![[c(0, 1), c(0, 1), c(0, 1)]]);
        assert!(certify_path(&p).certified);
    }

    #[test]
    fn diagonal_through_rational_start_is_rejected_at_zero() {
        let p = path(vec![[c(0, 0), c(0, 0), c(0, 1)], [c(1, 0), c(1, 0), c(0, 1)]]);
        let cert = certify_path(&p);
        let w = cert.witness.unwrap();
        assert_eq!(w.param, QSqrt2::zero());
        assert_eq!(w.coords, (0, 1));
    }

    #[test]
    fn two_constant_irrational_coordinates_are_certified() {
        let p = path(vec![[c(0, 0), c(0, 1), c(0, 1)], [c(1, 0), c(0, 1), c(0, 1)]]);
        assert!(certify_path(&p).certified);
    }

    #[test]
    fn both_constant_case() {
        assert_eq!(
            decide_pair(&c(1, 0), &c(0, 0), &c(2, 0), &c(0, 0)),
            (PairCase::BothConstant, Some(QSqrt2::zero()))
        );
        assert_eq!(decide_pair(&c(1, 0), &c(0, 0), &c(2, 1), &c(0, 0)).1, None);
    }

    #[test]
    fn constant_rational_case_finds_dense_hit() {
        // x_i = 1/3 fixed, x_j runs from √2 to 1 + √2
        let (case, hit) = decide_pair(&QSqrt2::rational(qr(1, 3)), &c(0, 0), &c(0, 1), &c(1, 0));
        assert_eq!(case, PairCase::ConstantRational);
        let t = hit.unwrap();
        assert!(in_unit(&t));
        assert!((&c(0, 1) + &t).is_rational());
    }

    #[test]
    fn constant_irrational_case() {
        assert_eq!(
            decide_pair(&c(0, 1), &c(0, 0), &c(0, 1), &c(1, 0)),
            (PairCase::ConstantIrrational, None)
        );
    }

    #[test]
    fn regular_case_inside_and_outside() {
        // x_i = √2 + t(1 - √2), x_j = t: both rational only at t = 1.
        let (case, hit) = decide_pair(&c(0, 1), &c(1, -1), &c(0, 0), &c(1, 0));
        assert_eq!(case, PairCase::Regular);
        assert_eq!(hit, Some(QSqrt2::one()));
        // x_i = √2 + t, x_j = 2√2 + t: the only solution is t = -√2.
        let (case, hit) = decide_pair(&c(0, 1), &c(1, 0), &c(0, 2), &c(1, 0));
        assert_eq!(case, PairCase::ProportionalEmpty);
        assert_eq!(hit, None);
        let (case, hit) = decide_pair(&c(0, 1), &c(1, 1), &c(0, 0), &c(1, 0));
        assert_eq!(case, PairCase::Regular);
        assert_eq!(hit, None);
    }

    #[test]
    fn proportional_cases() {
        // x_i = √2 + t, x_j = 1/2 + √2 + 2t: lambda = 2, q_j - 2 q_i = -1.
        let (case, hit) = decide_pair(&c(0, 1), &c(1, 0), &QSqrt2::new(qr(1, 2), q(1)), &c(2, 0));
        assert_eq!((case, hit), (PairCase::ProportionalEmpty, None));
        // x_j = 1/2 + 2√2 + 2t: q_j - 2 q_i = 0, dense.
        let (case, hit) = decide_pair(&c(0, 1), &c(1, 0), &QSqrt2::new(qr(1, 2), q(2)), &c(2, 0));
        assert_eq!(case, PairCase::ProportionalDense);
        let t = hit.unwrap();
        assert!((&c(0, 1) + &t).is_rational());
    }

    #[test]
    fn refuter_agrees_on_a_planted_violation() {
        // passes through (1/4, 1/2, √2) at t = 1/2
        let a = Point3([QSqrt2::rational(qr(0, 1)), c(0, 1), c(0, 1)]);
        let b = Point3([QSqrt2::rational(qr(1, 2)), &c(1, 0) - &c(0, 1), c(0, 1)]);
        assert_eq!(refute_segment(&a, &b, 10), Some(qr(1, 2)));
        assert!(!segment_violations(&a, &b).is_empty());
    }
}
