//! Exact feasibility for systems `A x = b, x >= 0` with Farkas certificates.
//!
//! Phase one of the simplex method with Bland's rule over the rationals. An
//! infeasible system comes back with a vector `y` such that `y^T A >= 0`
//! and `y . b < 0`, which anyone can recheck with two matrix products.

use std::fmt::Write as _;

use num_traits::{One, Signed, Zero};

use crate::linalg::{dot, fmt_q, parse_q, Q};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    /// A nonnegative solution of `A x = b`.
    Feasible(Vec<Q>),
    /// `y` with `y^T A >= 0` componentwise and `y . b < 0`.
    Infeasible(Vec<Q>),
}

/// A standard-form system together with the certificate deciding it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertifiedSystem {
    pub a: Vec<Vec<Q>>,
    pub b: Vec<Q>,
    pub ncols: usize,
    pub certificate: Certificate,
}

impl CertifiedSystem {
    pub fn is_feasible(&self) -> bool {
        matches!(self.certificate, Certificate::Feasible(_))
    }

    /// Rechecks the certificate by direct matrix arithmetic.
    pub fn verify(&self) -> bool {
        match &self.certificate {
            Certificate::Feasible(x) => {
                x.len() == self.ncols
                    && x.iter().all(|v| !v.is_negative())
                    && self.a.iter().zip(&self.b).all(|(row, bi)| &dot(row, x) == bi)
            }
            Certificate::Infeasible(y) => {
                if y.len() != self.a.len() {
                    return false;
                }
                let yb = dot(y, &self.b);
                let cols_ok = (0..self.ncols).all(|j| {
                    let s = self
                        .a
                        .iter()
                        .zip(y)
                        .fold(Q::zero(), |acc, (row, yi)| acc + &row[j] * yi);
                    !s.is_negative()
                });
                cols_ok && yb.is_negative()
            }
        }
    }

    /// Versioned text form; rationals are written as `p/q`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "tracklab-certificate v1").unwrap();
        writeln!(s, "rows {} cols {}", self.a.len(), self.ncols).unwrap();
        for (row, bi) in self.a.iter().zip(&self.b) {
            let r: Vec<String> = row.iter().map(fmt_q).collect();
            writeln!(s, "row {} | {}", r.join(" "), fmt_q(bi)).unwrap();
        }
        match &self.certificate {
            Certificate::Feasible(x) => {
                let v: Vec<String> = x.iter().map(fmt_q).collect();
                writeln!(s, "feasible {}", v.join(" ")).unwrap();
            }
            Certificate::Infeasible(y) => {
                let v: Vec<String> = y.iter().map(fmt_q).collect();
                writeln!(s, "farkas {}", v.join(" ")).unwrap();
            }
        }
        s.push_str("end\n");
        s
    }

    pub fn from_text(text: &str) -> Option<CertifiedSystem> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        if lines.next()? != "tracklab-certificate v1" {
            return None;
        }
        let dims: Vec<&str> = lines.next()?.split_whitespace().collect();
        if dims.len() != 4 || dims[0] != "rows" || dims[2] != "cols" {
            return None;
        }
        let nrows: usize = dims[1].parse().ok()?;
        let ncols: usize = dims[3].parse().ok()?;
        let mut a = Vec::with_capacity(nrows);
        let mut b = Vec::with_capacity(nrows);
        for _ in 0..nrows {
            let line = lines.next()?.strip_prefix("row ")?;
            let (lhs, rhs) = line.split_once('|')?;
            let row: Option<Vec<Q>> = lhs.split_whitespace().map(parse_q).collect();
            let row = row?;
            if row.len() != ncols {
                return None;
            }
            a.push(row);
            b.push(parse_q(rhs)?);
        }
        let cert_line = lines.next()?;
        let (kind, rest) = cert_line.split_once(' ').unwrap_or((cert_line, ""));
        let v: Option<Vec<Q>> = rest.split_whitespace().map(parse_q).collect();
        let certificate = match kind {
            "feasible" => Certificate::Feasible(v?),
            "farkas" => Certificate::Infeasible(v?),
            _ => return None,
        };
        if lines.next()? != "end" {
            return None;
        }
        Some(CertifiedSystem {
            a,
            b,
            ncols,
            certificate,
        })
    }
}

/// Decides feasibility of `A x = b, x >= 0` exactly.
pub fn solve_feasibility(a: &[Vec<Q>], b: &[Q], ncols: usize) -> CertifiedSystem {
    let m = a.len();
    // Sign-normalize rows so that b >= 0.
    let signs: Vec<Q> = b
        .iter()
        .map(|bi| if bi.is_negative() { -Q::one() } else { Q::one() })
        .collect();
    // Tableau columns: original vars, then one artificial per row.
    let width = ncols + m;
    let mut tab: Vec<Vec<Q>> = Vec::with_capacity(m);
    let mut rhs: Vec<Q> = Vec::with_capacity(m);
    for i in 0..m {
        let mut row: Vec<Q> = a[i].iter().map(|x| x * &signs[i]).collect();
        row.extend((0..m).map(|j| if j == i { Q::one() } else { Q::zero() }));
        tab.push(row);
        rhs.push(&b[i] * &signs[i]);
    }
    let mut basis: Vec<usize> = (ncols..width).collect();
    let cost = |j: usize| if j >= ncols { Q::one() } else { Q::zero() };

    loop {
        // Simplex multipliers y = c_B B^{-1}, read off the artificial columns.
        let y: Vec<Q> = (0..m)
            .map(|col| {
                (0..m).fold(Q::zero(), |acc, i| acc + cost(basis[i]) * &tab[i][ncols + col])
            })
            .collect();
        // Reduced costs over the original tableau columns: c_j - y . A_j
        let entering = (0..width).find(|&j| {
            if basis.contains(&j) {
                return false;
            }
            let aj: Q = (0..m).fold(Q::zero(), |acc, i| {
                let orig = if j < ncols {
                    &a[i][j] * &signs[i]
                } else if j - ncols == i {
                    Q::one()
                } else {
                    Q::zero()
                };
                acc + &y[i] * orig
            });
            (cost(j) - aj).is_negative()
        });
        let Some(e) = entering else {
            let value: Q = (0..m).fold(Q::zero(), |acc, i| acc + cost(basis[i]) * &rhs[i]);
            if value.is_zero() {
                let mut x = vec![Q::zero(); ncols];
                for i in 0..m {
                    if basis[i] < ncols {
                        x[basis[i]] = rhs[i].clone();
                    }
                }
                return CertifiedSystem {
                    a: a.to_vec(),
                    b: b.to_vec(),
                    ncols,
                    certificate: Certificate::Feasible(x),
                };
            }
            // Phase-one optimum is positive: -y (in original row signs) is a
            // Farkas certificate.
            let cert: Vec<Q> = y.iter().zip(&signs).map(|(yi, si)| -(yi * si)).collect();
            return CertifiedSystem {
                a: a.to_vec(),
                b: b.to_vec(),
                ncols,
                certificate: Certificate::Infeasible(cert),
            };
        };
        // Ratio test, ties broken by smallest basic index (Bland).
        let mut leave: Option<(usize, Q)> = None;
        for i in 0..m {
            if tab[i][e].is_positive() {
                let ratio = &rhs[i] / &tab[i][e];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let (r, _) = leave.expect("phase one objective is bounded below");
        let piv = tab[r][e].clone();
        for x in tab[r].iter_mut() {
            *x = &*x / &piv;
        }
        rhs[r] = &rhs[r] / &piv;
        for i in 0..m {
            if i != r && !tab[i][e].is_zero() {
                let f = tab[i][e].clone();
                for j in 0..width {
                    let sub = &f * &tab[r][j];
                    tab[i][j] -= sub;
                }
                let sub = &f * &rhs[r];
                rhs[i] -= sub;
            }
        }
        basis[r] = e;
    }
}
