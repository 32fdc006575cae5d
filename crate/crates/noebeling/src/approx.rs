//! Approximating a certified path by a path near Γ that stays in N³₁.
//!
//! Every block is redrawn close to Γ. A J-block becomes the short segment
//! `p -> q` through the common face `F` of its element, from just inside
//! the cube on one side to just inside the cube on the other, next to the
//! corner `κ` of `F` with the smallest coordinates. That corner lies on the
//! square loop of the element, which is in Γ. An I-block in the maximal
//! cube `V` follows a shortest route along fine edges of `∂V ∩ Γ` from the
//! anchor it enters by to the anchor it leaves by. Every grid vertex `w` is
//! pushed into the cube by `δ√2` along each axis, so each coordinate of
//! the offset point is irrational. Consecutive route points then differ in
//! one coordinate only, and the two fixed ones are irrational, so each
//! segment lies in N³₁.
//!
//! With `h` the finest side length, `δ = h / (4n)`. An offset point is at
//! distance at most `√6 δ < 1/n` from its grid vertex.

use std::collections::{HashMap, HashSet, VecDeque};

use num_bigint::BigInt;
use num_traits::One;
use thiserror::Error;

use crate::blocks::{check_blocks, partition_path, BlockKind, BlockStructure, PartitionError};
use crate::certify::{certify_path, Certification};
use crate::claims::boundary_grid_cells;
use crate::cover::{CubePairCover, DiadicCube, IBox};
use crate::geom::{PLPath3, Point3};
use crate::grid::GridComplex;
use crate::qsqrt2::{QSqrt2, Q};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ApproxError {
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error("n must be positive")]
    ZeroN,
    #[error("no route along the grid on the boundary of {0}")]
    NoRoute(DiadicCube),
    #[error("anchor mismatch between blocks {0} and {1}")]
    Anchor(usize, usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Approximation {
    pub n: u32,
    pub delta: Q,
    pub blocks: BlockStructure,
    pub path: PLPath3,
}

/// Offset of a fine grid vertex (doubled coordinates) into the closed cube
/// `c` given in fine units: `δ√2` towards the inside along every axis.
fn offset_into(c: &IBox, w: &[i64; 3], delta: &Q, h: &Q) -> Point3 {
    Point3(std::array::from_fn(|i| {
        let x = w[i] / 2;
        let sign = if x == c.hi[i] { -1 } else { 1 };
        QSqrt2::new(Q::from_integer(x.into()) * h, delta * Q::from_integer(sign.into()))
    }))
}

/// Shortest route between two fine vertices along fine edges in `cells`,
/// exploring axes in a fixed order.
fn route(cells: &HashSet<[i64; 3]>, from: [i64; 3], to: [i64; 3]) -> Option<Vec<[i64; 3]>> {
    let mut prev: HashMap<[i64; 3], [i64; 3]> = HashMap::new();
    let mut queue = VecDeque::from([from]);
    prev.insert(from, from);
    while let Some(w) = queue.pop_front() {
        if w == to {
            let mut out = vec![to];
            let mut c = to;
            while c != from {
                c = prev[&c];
                out.push(c);
            }
            out.reverse();
            return Some(out);
        }
        for axis in 0..3 {
            for d in [-1, 1] {
                let mut e = w;
                e[axis] += d;
                let mut nb = w;
                nb[axis] += 2 * d;
                if cells.contains(&e) && cells.contains(&nb) && !prev.contains_key(&nb) {
                    prev.insert(nb, w);
                    queue.push_back(nb);
                }
            }
        }
    }
    None
}

/// Builds `g_n` for a certified path whose image the cover covers.
pub fn approximate_path(f: &PLPath3, cover: &CubePairCover, n: u32) -> Result<Approximation, ApproxError> {
    if n == 0 {
        return Err(ApproxError::ZeroN);
    }
    let blocks = partition_path(f, cover)?;
    let m = blocks.fine_level;
    let h = Q::new(BigInt::one(), BigInt::one() << m);
    let delta = &h / Q::from_integer((4 * n).into());
    let bl = &blocks.blocks;

    // anchor corner and the two offsets of each J-block
    let mut anchors: Vec<Option<([i64; 3], Point3, Point3)>> = Vec::with_capacity(bl.len());
    for b in bl {
        if b.kind != BlockKind::J {
            anchors.push(None);
            continue;
        }
        let c = b.crossing.as_ref().expect("crossing");
        let e = b.element;
        let kappa = e.shared_face(m).lo.map(|x| 2 * x);
        let side = |v: &DiadicCube| {
            let [lo, hi] = e.cubes();
            if v.contains(&lo) {
                lo.ibox(m)
            } else {
                hi.ibox(m)
            }
        };
        let p = offset_into(&side(&c.from), &kappa, &delta, &h);
        let q = offset_into(&side(&c.to), &kappa, &delta, &h);
        anchors.push(Some((kappa, p, q)));
    }

    let mut pts: Vec<(Q, Point3)> = Vec::new();
    let push = |pts: &mut Vec<(Q, Point3)>, t: Q, p: Point3, k: usize| -> Result<(), ApproxError> {
        if let Some((lt, lp)) = pts.last() {
            if *lt == t {
                return if *lp == p { Ok(()) } else { Err(ApproxError::Anchor(k.saturating_sub(1), k)) };
            }
        }
        pts.push((t, p));
        Ok(())
    };
    for (k, b) in bl.iter().enumerate() {
        match b.kind {
            BlockKind::J => {
                let (_, p, q) = anchors[k].clone().expect("anchor");
                push(&mut pts, b.s.clone(), p, k)?;
                push(&mut pts, b.t.clone(), q, k)?;
            }
            BlockKind::I => {
                let v = b.cube.expect("cube of I-block");
                let vb = v.ibox(m);
                let entry = k.checked_sub(1).and_then(|j| anchors[j].as_ref()).map(|a| a.0);
                let exit = anchors.get(k + 1).and_then(|a| a.as_ref()).map(|a| a.0);
                let walk = match (entry, exit) {
                    (Some(a), Some(z)) => {
                        let cells: HashSet<[i64; 3]> = boundary_grid_cells(&v, cover).into_iter().collect();
                        route(&cells, a, z).ok_or(ApproxError::NoRoute(v))?
                    }
                    (Some(a), None) => vec![a],
                    (None, Some(z)) => vec![z],
                    (None, None) => vec![vb.lo.map(|x| 2 * x)],
                };
                let r = walk.len() - 1;
                let span = &b.t - &b.s;
                for (i, w) in walk.iter().enumerate() {
                    let t = if r == 0 {
                        b.s.clone()
                    } else {
                        &b.s + &span * Q::new((i as i64).into(), (r as i64).into())
                    };
                    push(&mut pts, t, offset_into(&vb, w, &delta, &h), k)?;
                }
                if r == 0 {
                    push(&mut pts, b.t.clone(), offset_into(&vb, &walk[0], &delta, &h), k)?;
                }
            }
        }
    }
    let (params, vertices): (Vec<Q>, Vec<Point3>) = pts.into_iter().unzip();
    let path = PLPath3::new(vertices, params).expect("blocks tile [0, 1]");
    Ok(Approximation { n, delta, blocks, path })
}

/// Outcome of the independent checks on one approximation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ApproxCheck {
    pub n: u32,
    pub vertices: usize,
    /// (a) the path lies in N³₁.
    pub certification: Certification,
    /// Largest exact squared distance from a vertex to Γ.
    pub max_vertex_dist2: QSqrt2,
    /// (b) every vertex and segment is within `1/n` of Γ.
    pub near_grid: bool,
    /// (c) each block of both paths stays in the block's element.
    pub close: Result<(), String>,
}

impl ApproxCheck {
    pub fn holds(&self) -> bool {
        self.certification.certified && self.near_grid && self.close.is_ok()
    }
}

/// Rechecks (a), (b) and (c) from scratch on the finished path. Nearness
/// of a segment is witnessed by one cell of Γ whose closure is within
/// `1/n` of both ends; distance to a convex set is convex along the
/// segment.
pub fn check_approximation(
    f: &PLPath3,
    cover: &CubePairCover,
    grid: &GridComplex,
    a: &Approximation,
) -> ApproxCheck {
    let g = &a.path;
    let bound2 = QSqrt2::rational(Q::new(BigInt::one(), BigInt::from(a.n) * BigInt::from(a.n)));
    let mut max2 = QSqrt2::zero();
    let mut near = true;
    for v in g.vertices() {
        match grid.distance2(v) {
            Some((d, _)) => {
                if d >= bound2 {
                    near = false;
                }
                if d > max2 {
                    max2 = d;
                }
            }
            None => near = false,
        }
    }
    for k in 0..g.segment_count() {
        let (p, q) = g.segment(k);
        if grid.common_witness(p, q, &bound2).is_none() {
            near = false;
        }
    }
    let close = check_blocks(f, cover, &a.blocks.blocks).and_then(|_| {
        check_blocks(g, cover, &a.blocks.blocks).map_err(|e| format!("approximation: {e}"))
    });
    ApproxCheck {
        n: a.n,
        vertices: g.vertices().len(),
        certification: certify_path(g),
        max_vertex_dist2: max2,
        near_grid: near,
        close,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::{BoundingBox, CubePair};
    use crate::qsqrt2::qr;

    fn pt(x: (i64, i64), y: (i64, i64), z: (i64, i64)) -> Point3 {
        let e = qr(1, 100);
        Point3::new(
            QSqrt2::new(qr(x.0, x.1), e.clone()),
            QSqrt2::new(qr(y.0, y.1), e.clone()),
            QSqrt2::new(qr(z.0, z.1), e),
        )
    }

    #[test]
    fn constant_path_in_one_cube_gives_a_constant_near_the_grid() {
        let cover = CubePairCover::uniform(1, BoundingBox::unit());
        let grid = GridComplex::of_cover(&cover).unwrap();
        let f = PLPath3::constant(pt((1, 8), (1, 8), (1, 8)));
        let a = approximate_path(&f, &cover, 3).unwrap();
        let v = a.path.vertices();
        assert!(v.iter().all(|p| p == &v[0]));
        assert_eq!(v[0].rational_count(), 0);
        assert!(check_approximation(&f, &cover, &grid, &a).holds());
    }

    #[test]
    fn one_crossing_hits_both_anchors_and_stays_in_the_pair() {
        let cover = CubePairCover::uniform(1, BoundingBox::unit());
        let grid = GridComplex::of_cover(&cover).unwrap();
        let f = PLPath3::uniform(vec![pt((1, 8), (1, 8), (1, 8)), pt((3, 4), (1, 8), (1, 8))]).unwrap();
        let a = approximate_path(&f, &cover, 2).unwrap();
        let pair = CubePair::new(1, [0, 0, 0], 0);
        let bx = pair.ibox(1);
        // anchors either side of the corner (1/2, 0, 0) of the common face
        let d = QSqrt2::new(Q::from_integer(0.into()), qr(1, 16));
        let p = Point3::new(&QSqrt2::rational(qr(1, 2)) - &d, d.clone(), d.clone());
        let q = Point3::new(&QSqrt2::rational(qr(1, 2)) + &d, d.clone(), d.clone());
        assert!(a.path.vertices().contains(&p));
        assert!(a.path.vertices().contains(&q));
        assert!(a.path.vertices().iter().all(|v| crate::blocks::open_box_contains(&bx, 1, v)));
        assert!(check_approximation(&f, &cover, &grid, &a).holds());
    }

    #[test]
    fn max_distance_shrinks_with_n() {
        let cover = CubePairCover::uniform(2, BoundingBox::unit());
        let grid = GridComplex::of_cover(&cover).unwrap();
        let f = PLPath3::uniform(vec![pt((1, 8), (1, 8), (1, 8)), pt((7, 8), (5, 8), (1, 3)), pt((1, 5), (7, 8), (3, 4))])
            .unwrap();
        let mut last: Option<QSqrt2> = None;
        for n in 1..=6 {
            let a = approximate_path(&f, &cover, n).unwrap();
            let c = check_approximation(&f, &cover, &grid, &a);
            assert!(c.holds(), "n = {n}: {c:?}");
            if let Some(l) = &last {
                assert!(c.max_vertex_dist2 < *l);
            }
            last = Some(c.max_vertex_dist2);
        }
    }
}
