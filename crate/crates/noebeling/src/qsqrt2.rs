//! Exact arithmetic in the field Q(√2).

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qr(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// `a + b√2` with rational `a`, `b`. The pair is unique because √2 is
/// irrational, so the value is rational exactly when `b = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QSqrt2 {
    pub a: Q,
    pub b: Q,
}

impl QSqrt2 {
    pub fn new(a: Q, b: Q) -> Self {
        QSqrt2 { a, b }
    }

    pub fn rational(a: Q) -> Self {
        QSqrt2 { a, b: Q::zero() }
    }

    pub fn int(n: i64) -> Self {
        Self::rational(q(n))
    }

    pub fn zero() -> Self {
        Self::int(0)
    }

    pub fn one() -> Self {
        Self::int(1)
    }

    pub fn sqrt2() -> Self {
        QSqrt2 {
            a: Q::zero(),
            b: Q::one(),
        }
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// Sign of the real number, decided exactly.
    pub fn signum(&self) -> i8 {
        let sa = sign_of(&self.a);
        let sb = sign_of(&self.b);
        if sa == 0 || sb == 0 || sa == sb {
            return if sa != 0 { sa } else { sb };
        }
        // Opposite signs: compare a^2 with 2 b^2.
        let a2 = &self.a * &self.a;
        let b2 = &self.b * &self.b * q(2);
        match a2.cmp(&b2) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => 0,
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    /// `a - b√2`.
    pub fn conjugate(&self) -> Self {
        QSqrt2 {
            a: self.a.clone(),
            b: -self.b.clone(),
        }
    }

    /// `a^2 - 2 b^2`, nonzero unless the value is.
    pub fn norm(&self) -> Q {
        &self.a * &self.a - &self.b * &self.b * q(2)
    }

    pub fn recip(&self) -> Option<Self> {
        let n = self.norm();
        if n.is_zero() {
            return None;
        }
        let c = self.conjugate();
        Some(QSqrt2 {
            a: c.a / &n,
            b: c.b / n,
        })
    }

    pub fn scale(&self, r: &Q) -> Self {
        QSqrt2 {
            a: &self.a * r,
            b: &self.b * r,
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.a.to_f64().unwrap_or(f64::NAN)
            + self.b.to_f64().unwrap_or(f64::NAN) * std::f64::consts::SQRT_2
    }

    /// Largest integer not above the value.
    pub fn floor(&self) -> BigInt {
        let guess = self.to_f64().floor();
        let mut k = if guess.is_finite() {
            BigInt::from(guess as i64)
        } else {
            self.a.floor().to_integer() + (&self.b * q(2)).floor().to_integer()
        };
        while QSqrt2::rational(Q::from_integer(k.clone())) > *self {
            k -= 1;
        }
        while QSqrt2::rational(Q::from_integer(&k + 1)) <= *self {
            k += 1;
        }
        k
    }

    /// Smallest integer not below the value.
    pub fn ceil(&self) -> BigInt {
        -(-self.clone()).floor()
    }
}

fn sign_of(x: &Q) -> i8 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

impl PartialOrd for QSqrt2 {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QSqrt2 {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum().cmp(&0)
    }
}

impl From<Q> for QSqrt2 {
    fn from(a: Q) -> Self {
        QSqrt2::rational(a)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl<'a> $tr<&'a QSqrt2> for &'a QSqrt2 {
            type Output = QSqrt2;
            fn $m(self, o: &'a QSqrt2) -> QSqrt2 {
                let f: fn(&QSqrt2, &QSqrt2) -> QSqrt2 = $body;
                f(self, o)
            }
        }
        impl $tr for QSqrt2 {
            type Output = QSqrt2;
            fn $m(self, o: QSqrt2) -> QSqrt2 {
                (&self).$m(&o)
            }
        }
        impl<'a> $tr<&'a QSqrt2> for QSqrt2 {
            type Output = QSqrt2;
            fn $m(self, o: &'a QSqrt2) -> QSqrt2 {
                (&self).$m(o)
            }
        }
    };
}

forward_binop!(Add, add, |x, y| QSqrt2 {
    a: &x.a + &y.a,
    b: &x.b + &y.b
});
forward_binop!(Sub, sub, |x, y| QSqrt2 {
    a: &x.a - &y.a,
    b: &x.b - &y.b
});
forward_binop!(Mul, mul, |x, y| QSqrt2 {
    a: &x.a * &y.a + &x.b * &y.b * q(2),
    b: &x.a * &y.b + &x.b * &y.a
});
forward_binop!(Div, div, |x, y| x * &y.recip().expect("division by zero in Q(sqrt 2)"));

impl Neg for QSqrt2 {
    type Output = QSqrt2;
    fn neg(self) -> QSqrt2 {
        QSqrt2 {
            a: -self.a,
            b: -self.b,
        }
    }
}

/// Renders a rational as `n` or `n/d`.
pub fn fmt_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let d: BigInt = d.parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Q::new(n.parse().ok()?, d))
        }
        None => Some(Q::from_integer(s.parse().ok()?)),
    }
}

impl fmt::Display for QSqrt2 {
    /// `(a,b)`, the exchange form used in files.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", fmt_q(&self.a), fmt_q(&self.b))
    }
}

impl std::str::FromStr for QSqrt2 {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let inner = s
            .trim()
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| format!("expected (a,b), got {s}"))?;
        let (a, b) = inner
            .split_once(',')
            .ok_or_else(|| format!("expected (a,b), got {s}"))?;
        Ok(QSqrt2 {
            a: parse_q(a).ok_or_else(|| format!("bad rational {a}"))?,
            b: parse_q(b).ok_or_else(|| format!("bad rational {b}"))?,
        })
    }
}

/// A dyadic rational strictly between `lo < hi`, with the smallest
/// possible power-of-two denominator.
pub fn dyadic_between(lo: &QSqrt2, hi: &QSqrt2) -> Q {
    assert!(lo < hi, "empty interval");
    let mut scale = BigInt::one();
    loop {
        let s = Q::from_integer(scale.clone());
        let j = lo.scale(&s).floor() + 1;
        let cand = Q::new(j, scale.clone());
        if QSqrt2::rational(cand.clone()) < *hi {
            return cand;
        }
        scale *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(a: i64, b: i64) -> QSqrt2 {
        QSqrt2::new(q(a), q(b))
    }

    #[test]
    fn signs_of_mixed_terms() {
        assert_eq!(v(3, -2).signum(), 1); // 3 > 2.83
        assert_eq!(v(2, -2).signum(), -1);
        assert_eq!(v(-1, 1).signum(), 1);
        assert_eq!(v(0, 0).signum(), 0);
        assert!(QSqrt2::sqrt2() > QSqrt2::new(qr(141, 100), q(0)));
        assert!(QSqrt2::sqrt2() < QSqrt2::new(qr(142, 100), q(0)));
    }

    #[test]
    fn floor_near_integers() {
        assert_eq!(QSqrt2::sqrt2().floor(), BigInt::from(1));
        assert_eq!((-QSqrt2::sqrt2()).floor(), BigInt::from(-2));
        assert_eq!(v(5, 0).floor(), BigInt::from(5));
        assert_eq!(v(3, -2).floor(), BigInt::from(0));
        assert_eq!(v(3, -2).ceil(), BigInt::from(1));
    }

    #[test]
    fn text_round_trip() {
        let x = QSqrt2::new(qr(-3, 4), qr(5, 7));
        assert_eq!(x.to_string(), "(-3/4,5/7)");
        assert_eq!(x.to_string().parse::<QSqrt2>().unwrap(), x);
    }

    #[test]
    fn dyadic_between_is_strict() {
        let lo = QSqrt2::sqrt2();
        let hi = QSqrt2::new(qr(1415, 1000), q(0));
        let d = dyadic_between(&lo, &hi);
        assert!(QSqrt2::rational(d.clone()) > lo && QSqrt2::rational(d) < hi);
    }

    proptest! {
        #[test]
        fn field_identities(a in -50i64..50, b in -50i64..50, c in -50i64..50, d in 1i64..50) {
            let x = v(a, b);
            let y = QSqrt2::new(q(c), qr(1, d));
            prop_assert_eq!(&(&x * &y) / &y, x.clone());
            prop_assert_eq!(&(&x + &y) - &y, x.clone());
            // order agrees with floating point away from ties
            let fx = x.to_f64();
            let fy = y.to_f64();
            if (fx - fy).abs() > 1e-9 {
                prop_assert_eq!(x < y, fx < fy);
            }
        }

        #[test]
        fn floor_brackets(a in -1000i64..1000, b in -1000i64..1000, d in 1i64..30) {
            let x = QSqrt2::new(qr(a, d), qr(b, d));
            let k = Q::from_integer(x.floor());
            prop_assert!(QSqrt2::rational(k.clone()) <= x);
            prop_assert!(QSqrt2::rational(k + q(1)) > x);
        }
    }
}
