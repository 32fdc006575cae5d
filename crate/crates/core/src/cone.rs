//! Pointed polyhedral cones over the rationals.
//!
//! A [`Cone`] keeps both descriptions: its primitive extreme rays and a facet
//! description relative to its linear span. Conversion in either direction
//! goes through the double description method with a combinatorial adjacency
//! test, inserting constraints in index order so results are deterministic.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::linalg::{dot, dot_int, kernel_basis, primitive, q, rref, to_q, IntMatrix, Q};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConeError {
    #[error("cone has a nontrivial lineality space")]
    NotPointed,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct ZeroSet(Vec<u64>);

impl ZeroSet {
    fn new(n: usize) -> Self {
        ZeroSet(vec![0; n.div_ceil(64).max(1)])
    }
    fn grow(&mut self, n: usize) {
        let need = n.div_ceil(64).max(1);
        if self.0.len() < need {
            self.0.resize(need, 0);
        }
    }
    fn set(&mut self, i: usize) {
        self.grow(i + 1);
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn and(&self, o: &ZeroSet) -> ZeroSet {
        ZeroSet(self.0.iter().zip(&o.0).map(|(a, b)| a & b).collect())
    }
    fn subset_of(&self, o: &ZeroSet) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| a & !b == 0)
    }
    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }
}

struct DdRay {
    v: Vec<Q>,
    zeros: ZeroSet,
}

fn normalize(v: &[Q]) -> Vec<Q> {
    to_q(&primitive(v))
}

/// Extreme rays of the pointed cone `{u in Q^k : g . u >= 0 for every row g}`.
fn double_description(rows: &[Vec<Q>], k: usize) -> Result<Vec<Vec<Q>>, ConeError> {
    if k == 0 {
        return Ok(Vec::new());
    }
    // Greedy choice of k independent rows for the initial simplicial cone.
    let mut basis_idx: Vec<usize> = Vec::new();
    let mut basis_rows: Vec<Vec<Q>> = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        let mut trial = basis_rows.clone();
        trial.push(r.clone());
        if rref(&trial, k).pivots.len() == trial.len() {
            basis_rows = trial;
            basis_idx.push(i);
            if basis_idx.len() == k {
                break;
            }
        }
    }
    if basis_idx.len() < k {
        return Err(ConeError::NotPointed);
    }
    let n_rows = rows.len();
    // Columns of the inverse of the basis matrix.
    let mut rays: Vec<DdRay> = Vec::with_capacity(k);
    for j in 0..k {
        let mut e = vec![q(0); k];
        e[j] = q(1);
        let v = crate::linalg::solve(&basis_rows, &e, k).expect("basis is invertible");
        let mut zeros = ZeroSet::new(n_rows);
        for (t, &bi) in basis_idx.iter().enumerate() {
            if t != j {
                zeros.set(bi);
            }
        }
        rays.push(DdRay {
            v: normalize(&v),
            zeros,
        });
    }
    for (i, g) in rows.iter().enumerate() {
        if basis_idx.contains(&i) {
            continue;
        }
        let vals: Vec<Q> = rays.iter().map(|r| dot(g, &r.v)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&t| vals[t].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&t| vals[t].is_negative()).collect();
        if neg.is_empty() {
            for (t, r) in rays.iter_mut().enumerate() {
                if vals[t].is_zero() {
                    r.zeros.set(i);
                }
            }
            continue;
        }
        let mut next: Vec<DdRay> = Vec::new();
        for &p in &pos {
            for &n in &neg {
                let common = rays[p].zeros.and(&rays[n].zeros);
                if k >= 2 && common.count() + 2 < k {
                    continue;
                }
                let adjacent = (0..rays.len())
                    .filter(|&t| t != p && t != n)
                    .all(|t| !common.subset_of(&rays[t].zeros));
                if !adjacent {
                    continue;
                }
                let v: Vec<Q> = rays[n]
                    .v
                    .iter()
                    .zip(&rays[p].v)
                    .map(|(xn, xp)| &vals[p] * xn - &vals[n] * xp)
                    .collect();
                let mut zeros = common;
                zeros.set(i);
                next.push(DdRay {
                    v: normalize(&v),
                    zeros,
                });
            }
        }
        for (t, mut r) in rays.into_iter().enumerate() {
            if vals[t].is_negative() {
                continue;
            }
            if vals[t].is_zero() {
                r.zeros.set(i);
            }
            next.push(r);
        }
        rays = next;
    }
    Ok(rays.into_iter().map(|r| r.v).collect())
}

/// A pointed rational polyhedral cone in `Q^ambient`.
#[derive(Clone, Debug)]
pub struct Cone {
    ambient: usize,
    rays: Vec<Vec<BigInt>>,
    pivots: Vec<usize>,
    facets: Vec<Vec<Q>>,
    equations: Vec<Vec<Q>>,
}

impl PartialEq for Cone {
    fn eq(&self, other: &Self) -> bool {
        self.ambient == other.ambient && self.rays == other.rays
    }
}
impl Eq for Cone {}

impl Cone {
    pub fn zero(ambient: usize) -> Self {
        let equations = (0..ambient)
            .map(|i| {
                let mut e = vec![q(0); ambient];
                e[i] = q(1);
                e
            })
            .collect();
        Cone {
            ambient,
            rays: Vec::new(),
            pivots: Vec::new(),
            facets: Vec::new(),
            equations,
        }
    }

    /// The cone generated by `gens` (not necessarily extreme, zeros allowed).
    pub fn from_generators(ambient: usize, gens: &[Vec<Q>]) -> Result<Self, ConeError> {
        for g in gens {
            if g.len() != ambient {
                return Err(ConeError::Dimension {
                    expected: ambient,
                    got: g.len(),
                });
            }
        }
        let gens: Vec<Vec<Q>> = gens
            .iter()
            .filter(|g| g.iter().any(|x| !x.is_zero()))
            .map(|g| normalize(g))
            .collect();
        if gens.is_empty() {
            return Ok(Cone::zero(ambient));
        }
        let span = rref(&gens, ambient);
        let pivots = span.pivots.clone();
        let d = pivots.len();
        let projected: Vec<Vec<Q>> = gens
            .iter()
            .map(|g| pivots.iter().map(|&p| g[p].clone()).collect())
            .collect();
        let dual = double_description(&projected, d)?;
        let facets: Vec<Vec<Q>> = dual
            .iter()
            .map(|u| {
                let mut f = vec![q(0); ambient];
                for (t, &p) in pivots.iter().enumerate() {
                    f[p] = u[t].clone();
                }
                f
            })
            .collect();
        let mut rays: Vec<Vec<BigInt>> = Vec::new();
        for g in &gens {
            let active: Vec<Vec<Q>> = dual
                .iter()
                .filter(|u| {
                    let pg: Vec<Q> = pivots.iter().map(|&p| g[p].clone()).collect();
                    dot(u, &pg).is_zero()
                })
                .cloned()
                .collect();
            let r = if active.is_empty() {
                0
            } else {
                rref(&active, d).pivots.len()
            };
            if r + 1 == d {
                let p = primitive(g);
                if !rays.contains(&p) {
                    rays.push(p);
                }
            }
        }
        rays.sort();
        let equations = kernel_basis(&span.rows, ambient);
        Ok(Cone {
            ambient,
            rays,
            pivots,
            facets,
            equations,
        })
    }

    pub fn from_int_generators(ambient: usize, gens: &[Vec<BigInt>]) -> Result<Self, ConeError> {
        let g: Vec<Vec<Q>> = gens.iter().map(|v| to_q(v)).collect();
        Self::from_generators(ambient, &g)
    }

    /// The cone `{x : e . x = 0 for e in equations, g . x >= 0 for g in inequalities}`.
    pub fn from_constraints(
        ambient: usize,
        equations: &[Vec<Q>],
        inequalities: &[Vec<Q>],
    ) -> Result<Self, ConeError> {
        let basis = if equations.is_empty() {
            (0..ambient)
                .map(|i| {
                    let mut e = vec![q(0); ambient];
                    e[i] = q(1);
                    e
                })
                .collect()
        } else {
            kernel_basis(equations, ambient)
        };
        let k = basis.len();
        if k == 0 {
            return Ok(Cone::zero(ambient));
        }
        let rows: Vec<Vec<Q>> = inequalities
            .iter()
            .map(|g| basis.iter().map(|b| dot(g, b)).collect())
            .collect();
        let us = double_description(&rows, k)?;
        let gens: Vec<Vec<Q>> = us
            .iter()
            .map(|u| {
                let mut x = vec![q(0); ambient];
                for (c, b) in u.iter().zip(&basis) {
                    for (xi, bi) in x.iter_mut().zip(b) {
                        *xi += c * bi;
                    }
                }
                x
            })
            .collect();
        Self::from_generators(ambient, &gens)
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    pub fn rays(&self) -> &[Vec<BigInt>] {
        &self.rays
    }

    pub fn facets(&self) -> &[Vec<Q>] {
        &self.facets
    }

    pub fn is_zero(&self) -> bool {
        self.rays.is_empty()
    }

    fn in_span(&self, x: &[Q]) -> bool {
        self.equations.iter().all(|e| dot(e, x).is_zero())
    }

    pub fn contains(&self, x: &[Q]) -> bool {
        self.in_span(x) && self.facets.iter().all(|f| !dot(f, x).is_negative())
    }

    pub fn contains_int(&self, x: &[BigInt]) -> bool {
        self.contains(&to_q(x))
    }

    /// Membership in the relative interior.
    pub fn relint_contains(&self, x: &[Q]) -> bool {
        if self.is_zero() {
            return x.iter().all(|v| v.is_zero());
        }
        self.in_span(x) && self.facets.iter().all(|f| dot(f, x).is_positive())
    }

    pub fn contains_cone(&self, other: &Cone) -> bool {
        other.rays.iter().all(|r| self.contains_int(r))
    }

    /// Sum of the extreme rays; lies in the relative interior.
    pub fn interior_point(&self) -> Vec<Q> {
        let mut x = vec![q(0); self.ambient];
        for r in &self.rays {
            for (xi, ri) in x.iter_mut().zip(r) {
                *xi += crate::linalg::qi(ri);
            }
        }
        x
    }

    pub fn intersect(&self, other: &Cone) -> Result<Cone, ConeError> {
        let eqs: Vec<Vec<Q>> = self
            .equations
            .iter()
            .chain(&other.equations)
            .cloned()
            .collect();
        let ineqs: Vec<Vec<Q>> = self.facets.iter().chain(&other.facets).cloned().collect();
        Cone::from_constraints(self.ambient, &eqs, &ineqs)
    }

    pub fn intersect_halfspace(&self, normal: &[Q]) -> Result<Cone, ConeError> {
        let mut ineqs = self.facets.clone();
        ineqs.push(normal.to_vec());
        Cone::from_constraints(self.ambient, &self.equations, &ineqs)
    }

    /// The face cut out by forcing the listed coordinates to zero.
    pub fn coordinate_face(&self, zero_coords: &[usize]) -> Result<Cone, ConeError> {
        let gens: Vec<Vec<BigInt>> = self
            .rays
            .iter()
            .filter(|r| zero_coords.iter().all(|&i| r[i].is_zero()))
            .cloned()
            .collect();
        Cone::from_int_generators(self.ambient, &gens)
    }

    pub fn image(&self, m: &IntMatrix) -> Result<Cone, ConeError> {
        if m.cols != self.ambient {
            return Err(ConeError::Dimension {
                expected: m.cols,
                got: self.ambient,
            });
        }
        let gens: Vec<Vec<BigInt>> = self.rays.iter().map(|r| m.apply_int(r)).collect();
        Cone::from_int_generators(m.rows, &gens)
    }

    /// True when the relative interiors of the two cones meet.
    pub fn relints_meet(&self, other: &Cone) -> Result<bool, ConeError> {
        for f in &self.facets {
            if other.rays.iter().all(|r| !dot_int(f, r).is_positive()) && !other.is_zero() {
                return Ok(false);
            }
        }
        for f in &other.facets {
            if self.rays.iter().all(|r| !dot_int(f, r).is_positive()) && !self.is_zero() {
                return Ok(false);
            }
        }
        let both = self.intersect(other)?;
        if both.is_zero() {
            return Ok(self.is_zero() && other.is_zero());
        }
        let p = both.interior_point();
        Ok(self.relint_contains(&p) && other.relint_contains(&p))
    }

    /// Decides whether `pieces` cover this cone. Returns a point of the cone
    /// lying in no piece when they do not.
    pub fn uncovered_point(&self, pieces: &[Cone]) -> Result<Option<Vec<Q>>, ConeError> {
        if self.is_zero() {
            return Ok(None);
        }
        let mut full = Vec::new();
        for p in pieces {
            let inside = p.intersect(self)?;
            if inside.dim() == self.dim() {
                full.push(inside);
            }
        }
        self.uncovered_rec(&full)
    }

    fn uncovered_rec(&self, pieces: &[Cone]) -> Result<Option<Vec<Q>>, ConeError> {
        if pieces.iter().any(|p| p.contains_cone(self)) {
            return Ok(None);
        }
        for p in pieces {
            for f in &p.facets {
                let vals: Vec<Q> = self.rays.iter().map(|r| dot_int(f, r)).collect();
                let has_pos = vals.iter().any(|v| v.is_positive());
                let has_neg = vals.iter().any(|v| v.is_negative());
                if has_pos && has_neg {
                    let neg_f: Vec<Q> = f.iter().map(|x| -x).collect();
                    for half in [self.intersect_halfspace(f)?, self.intersect_halfspace(&neg_f)?] {
                        if half.dim() == self.dim() {
                            if let Some(w) = half.uncovered_rec(pieces)? {
                                return Ok(Some(w));
                            }
                        }
                    }
                    return Ok(None);
                }
            }
        }
        Ok(Some(self.interior_point()))
    }

    /// Maximum pairwise L1 distance between the extreme rays after scaling
    /// each to coordinate sum one.
    pub fn projective_diameter(&self) -> Option<Q> {
        projective_diameter(&self.rays)
    }
}

/// Maximum pairwise L1 distance of the rays normalized to coordinate sum one.
/// `None` for an empty list or a ray with zero coordinate sum.
pub fn projective_diameter(rays: &[Vec<BigInt>]) -> Option<Q> {
    if rays.is_empty() {
        return None;
    }
    let mut pts = Vec::with_capacity(rays.len());
    for r in rays {
        let s: BigInt = r.iter().sum();
        if s.is_zero() {
            return None;
        }
        let s = Q::from_integer(s);
        pts.push(r.iter().map(|x| Q::from_integer(x.clone()) / &s).collect::<Vec<Q>>());
    }
    let mut best = q(0);
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let d = pts[i]
                .iter()
                .zip(&pts[j])
                .fold(q(0), |acc, (a, b)| acc + (a - b).abs());
            if d > best {
                best = d;
            }
        }
    }
    Some(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }
    fn qv(v: &[i64]) -> Vec<Q> {
        v.iter().map(|&x| q(x)).collect()
    }

    #[test]
    fn orthant_rays() {
        let ineqs: Vec<Vec<Q>> = (0..3)
            .map(|i| {
                let mut e = vec![q(0); 3];
                e[i] = q(1);
                e
            })
            .collect();
        let c = Cone::from_constraints(3, &[], &ineqs).unwrap();
        assert_eq!(c.rays(), &[iv(&[0, 0, 1]), iv(&[0, 1, 0]), iv(&[1, 0, 0])]);
        assert_eq!(c.facets().len(), 3);
    }

    #[test]
    fn square_cone_from_both_sides() {
        // cone over the square with vertices (±1, ±1, 1)
        let gens = vec![qv(&[1, 1, 1]), qv(&[1, -1, 1]), qv(&[-1, 1, 1]), qv(&[-1, -1, 1]), qv(&[0, 0, 1])];
        let c = Cone::from_generators(3, &gens).unwrap();
        assert_eq!(c.rays().len(), 4);
        assert_eq!(c.facets().len(), 4);
        let back = Cone::from_constraints(3, &[], c.facets()).unwrap();
        assert_eq!(back, c);
        assert!(c.relint_contains(&qv(&[0, 0, 1])));
        assert!(!c.relint_contains(&qv(&[1, 0, 1])));
        assert!(c.contains(&qv(&[1, 0, 1])));
    }

    #[test]
    fn lower_dimensional_cone_membership() {
        let c = Cone::from_int_generators(3, &[iv(&[1, 1, 0]), iv(&[1, 0, 1])]).unwrap();
        assert_eq!(c.dim(), 2);
        assert!(c.contains(&qv(&[2, 1, 1])));
        assert!(!c.contains(&qv(&[1, 1, 1])));
        assert!(!c.contains(&qv(&[0, 1, -1])));
    }

    #[test]
    fn covering_by_halves() {
        let quad = Cone::from_int_generators(2, &[iv(&[1, 0]), iv(&[0, 1])]).unwrap();
        let left = Cone::from_int_generators(2, &[iv(&[1, 0]), iv(&[1, 1])]).unwrap();
        let right = Cone::from_int_generators(2, &[iv(&[1, 1]), iv(&[0, 1])]).unwrap();
        assert_eq!(quad.uncovered_point(&[left.clone(), right.clone()]).unwrap(), None);
        let w = quad.uncovered_point(&[left.clone()]).unwrap().unwrap();
        assert!(quad.contains(&w) && !left.contains(&w));
        let mid = left.intersect(&right).unwrap();
        assert_eq!(mid.rays(), &[iv(&[1, 1])]);
        assert!(!left.relints_meet(&right).unwrap());
    }

    #[test]
    fn diameter_of_theta_rays() {
        let d = projective_diameter(&[iv(&[1, 1, 0]), iv(&[1, 0, 1])]).unwrap();
        assert_eq!(d, q(1));
        assert_eq!(projective_diameter(&[iv(&[3, 1])]).unwrap(), q(0));
        assert!(projective_diameter(&[]).is_none());
    }
}
