//! The attracting grid: the part of the bounding box not covered by any
//! element, as a complex of relatively open fine-level cells.
//!
//! Cells are addressed by doubled coordinates: along each axis an even
//! value `2c` is the point `c` and an odd value `2c+1` the open interval
//! `(c, c+1)`, in units of `2^-M` for the fine level `M`. The number of odd
//! coordinates is the cell dimension.

use num_bigint::BigInt;
use num_traits::One;

use crate::cover::{CoverError, CubePairCover, IBox};
use crate::geom::Point3;
use crate::qsqrt2::{QSqrt2, Q};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridComplex {
    pub level: u32,
    /// Bounding box in fine units.
    pub bounds: IBox,
    side: [usize; 3],
    in_grid: Vec<bool>,
}

impl GridComplex {
    /// Γ of a valid cover, truncated to its bounding box.
    pub fn of_cover(cover: &CubePairCover) -> Result<Self, CoverError> {
        cover.validate()?;
        let level = cover.fine_level();
        let bounds = cover.bbox.ibox(level);
        let side = [0, 1, 2].map(|i| (2 * (bounds.hi[i] - bounds.lo[i]) + 1) as usize);
        let mut g = GridComplex {
            level,
            bounds,
            side,
            in_grid: vec![true; side[0] * side[1] * side[2]],
        };
        for e in cover.element_boxes() {
            let lo = [0, 1, 2].map(|i| (2 * e.lo[i] + 1).max(2 * bounds.lo[i]));
            let hi = [0, 1, 2].map(|i| (2 * e.hi[i] - 1).min(2 * bounds.hi[i]));
            for x in lo[0]..=hi[0] {
                for y in lo[1]..=hi[1] {
                    for z in lo[2]..=hi[2] {
                        let k = g.index(&[x, y, z]).expect("inside bounds");
                        g.in_grid[k] = false;
                    }
                }
            }
        }
        Ok(g)
    }

    fn index(&self, x: &[i64; 3]) -> Option<usize> {
        let mut k = 0usize;
        for i in 0..3 {
            let off = x[i] - 2 * self.bounds.lo[i];
            if off < 0 || off as usize >= self.side[i] {
                return None;
            }
            k = k * self.side[i] + off as usize;
        }
        Some(k)
    }

    /// Whether the cell lies in Γ; false outside the box.
    pub fn contains_cell(&self, x: &[i64; 3]) -> bool {
        self.index(x).map(|k| self.in_grid[k]).unwrap_or(false)
    }

    /// All cells of Γ in lexicographic order of doubled coordinates.
    pub fn cells(&self) -> impl Iterator<Item = [i64; 3]> + '_ {
        let lo = self.bounds.lo.map(|c| 2 * c);
        let hi = self.bounds.hi.map(|c| 2 * c);
        (lo[0]..=hi[0])
            .flat_map(move |x| (lo[1]..=hi[1]).flat_map(move |y| (lo[2]..=hi[2]).map(move |z| [x, y, z])))
            .filter(|x| self.contains_cell(x))
    }

    /// Number of cells of each dimension 0..=3.
    pub fn counts(&self) -> [usize; 4] {
        let mut c = [0; 4];
        for x in self.cells() {
            c[cell_dim(&x)] += 1;
        }
        c
    }

    /// Every face of a cell of Γ is again in Γ.
    pub fn is_closed(&self) -> bool {
        self.cells().all(|x| faces(&x).iter().all(|f| self.contains_cell(f)))
    }

    fn unit(&self) -> Q {
        Q::new(BigInt::one(), BigInt::one() << self.level)
    }

    /// Squared distance from a point to the closure of a cell.
    pub fn dist2_to_cell(&self, p: &Point3, x: &[i64; 3]) -> QSqrt2 {
        let b = closure(x);
        let h = self.unit();
        let mut acc = QSqrt2::zero();
        for i in 0..3 {
            let lo = QSqrt2::rational(Q::from_integer(b.lo[i].into()) * &h);
            let hi = QSqrt2::rational(Q::from_integer(b.hi[i].into()) * &h);
            let c = p.coord(i);
            let d = if c < &lo {
                &lo - c
            } else if c > &hi {
                c - &hi
            } else {
                continue;
            };
            acc = &acc + &(&d * &d);
        }
        acc
    }

    /// Fine cube index of the unit cube containing the point (lower one on
    /// ties).
    fn home(&self, p: &Point3) -> [i64; 3] {
        let s = Q::from_integer(BigInt::one() << self.level);
        [0, 1, 2].map(|i| {
            let f = p.coord(i).scale(&s).floor();
            i64::try_from(f).unwrap_or(i64::MAX / 4)
        })
    }

    fn window(&self, home: &[i64; 3], r: i64) -> impl Iterator<Item = [i64; 3]> + '_ {
        let lo = [0, 1, 2].map(|i| (2 * (home[i] - r)).max(2 * self.bounds.lo[i]));
        let hi = [0, 1, 2].map(|i| (2 * (home[i] + 1 + r)).min(2 * self.bounds.hi[i]));
        (lo[0]..=hi[0])
            .flat_map(move |x| (lo[1]..=hi[1]).flat_map(move |y| (lo[2]..=hi[2]).map(move |z| [x, y, z])))
            .filter(|x| self.contains_cell(x))
    }

    /// Exact squared distance to Γ with a nearest cell; `None` if Γ is
    /// empty. Searches growing windows; cells outside a window of radius
    /// `r` units around the home cube are at distance at least `r` units.
    pub fn distance2(&self, p: &Point3) -> Option<(QSqrt2, [i64; 3])> {
        let home = self.home(p);
        let h = self.unit();
        let span = (0..3)
            .map(|i| (self.bounds.hi[i] - self.bounds.lo[i]) + (home[i] - self.bounds.lo[i]).abs())
            .max()
            .unwrap_or(1)
            .max(1);
        let mut r = 1i64;
        loop {
            let best = self
                .window(&home, r)
                .map(|x| (self.dist2_to_cell(p, &x), x))
                .min_by(|a, b| a.0.cmp(&b.0));
            let reach = QSqrt2::rational(Q::from_integer(r.into()) * &h);
            match best {
                Some((d, x)) if d <= &reach * &reach || r > span => return Some((d, x)),
                None if r > span => return None,
                _ => r *= 2,
            }
        }
    }

    /// A cell of Γ whose closure is within squared distance `< bound2` of
    /// both points. The closure of a cell is convex, so the segment between
    /// the points is then within that distance too.
    pub fn common_witness(&self, a: &Point3, b: &Point3, bound2: &QSqrt2) -> Option<[i64; 3]> {
        let near = |x: &[i64; 3]| self.dist2_to_cell(a, x) < *bound2 && self.dist2_to_cell(b, x) < *bound2;
        self.window(&self.home(a), 1)
            .find(|x| near(x))
            .or_else(|| self.cells().find(|x| near(x)))
    }

    /// Closed segments of the 1-cells of Γ, as rational end points.
    pub fn edges(&self) -> Vec<([Q; 3], [Q; 3])> {
        let h = self.unit();
        self.cells()
            .filter(|x| cell_dim(x) == 1)
            .map(|x| {
                let b = closure(&x);
                let pt = |v: [i64; 3]| v.map(|c| Q::from_integer(c.into()) * &h);
                (pt(b.lo), pt(b.hi))
            })
            .collect()
    }
}

pub fn cell_dim(x: &[i64; 3]) -> usize {
    x.iter().filter(|c| c.rem_euclid(2) == 1).count()
}

/// Closed extent of a cell in fine units.
pub fn closure(x: &[i64; 3]) -> IBox {
    IBox {
        lo: x.map(|c| c.div_euclid(2)),
        hi: x.map(|c| (c + 1).div_euclid(2)),
    }
}

/// Codimension-one faces of a cell.
pub fn faces(x: &[i64; 3]) -> Vec<[i64; 3]> {
    let mut out = Vec::new();
    for i in 0..3 {
        if x[i].rem_euclid(2) == 1 {
            for d in [-1, 1] {
                let mut f = *x;
                f[i] += d;
                out.push(f);
            }
        }
    }
    out
}
