//! The two structural facts about Γ used by the approximation: the square
//! loop around the common face of every cover pair lies in Γ, and for a
//! maximal cube `V` the part of `∂V` in Γ is non-empty and connected.
//!
//! Both are decided on fine-level cells with the cover's own element
//! boxes, so they do not depend on the bounding box of the grid.

use std::collections::HashMap;

use crate::cover::{CoverError, CubePair, CubePairCover, DiadicCube, IBox};
use crate::grid::faces;

/// Cells of the boundary of the common face of a pair, in fine units of
/// level `m`.
pub fn square_loop_cells(p: &CubePair, m: u32) -> Vec<[i64; 3]> {
    let f = p.shared_face(m);
    let a = p.axis;
    let (j, l) = match a {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    };
    let mut out = Vec::new();
    for xj in 2 * f.lo[j]..=2 * f.hi[j] {
        for xl in 2 * f.lo[l]..=2 * f.hi[l] {
            let on_edge = xj == 2 * f.lo[j] || xj == 2 * f.hi[j] || xl == 2 * f.lo[l] || xl == 2 * f.hi[l];
            if on_edge {
                let mut x = [0; 3];
                x[a] = 2 * f.lo[a];
                x[j] = xj;
                x[l] = xl;
                out.push(x);
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SquareLoopReport {
    pub pairs_checked: usize,
    pub cells_checked: usize,
    /// Pairs whose loop meets some element, with the offending cell.
    pub failures: Vec<(CubePair, [i64; 3])>,
}

impl SquareLoopReport {
    pub fn holds(&self) -> bool {
        self.failures.is_empty()
    }
}

fn boxes_near(cover: &CubePairCover, region: &IBox, m: u32) -> Vec<IBox> {
    cover
        .pairs()
        .iter()
        .map(|p| p.ibox(m))
        .filter(|b| b.meets(region))
        .collect()
}

/// Checks that no cell of any pair's square loop lies in an element.
pub fn check_square_loops(cover: &CubePairCover) -> SquareLoopReport {
    let m = cover.fine_level();
    let mut rep = SquareLoopReport {
        pairs_checked: 0,
        cells_checked: 0,
        failures: Vec::new(),
    };
    for p in cover.pairs() {
        rep.pairs_checked += 1;
        let near = boxes_near(cover, &p.shared_face(m), m);
        for x in square_loop_cells(p, m) {
            rep.cells_checked += 1;
            if near.iter().any(|b| b.open_contains_cell(&x)) {
                rep.failures.push((*p, x));
                break;
            }
        }
    }
    rep
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryReport {
    pub cube: DiadicCube,
    /// Cells of `∂V` lying in Γ, by dimension.
    pub cells: [usize; 3],
    pub components: usize,
}

impl BoundaryReport {
    pub fn connected(&self) -> bool {
        self.cells.iter().sum::<usize>() > 0 && self.components == 1
    }
}

/// Fine-level cells of `∂V` not covered by any element.
pub fn boundary_grid_cells(v: &DiadicCube, cover: &CubePairCover) -> Vec<[i64; 3]> {
    let m = cover.fine_level().max(v.level);
    let b = v.ibox(m);
    let near = boxes_near(cover, &b, m);
    let mut out = Vec::new();
    for x in 2 * b.lo[0]..=2 * b.hi[0] {
        for y in 2 * b.lo[1]..=2 * b.hi[1] {
            for z in 2 * b.lo[2]..=2 * b.hi[2] {
                let c = [x, y, z];
                let on_boundary = (0..3).any(|i| c[i] == 2 * b.lo[i] || c[i] == 2 * b.hi[i]);
                if on_boundary && !near.iter().any(|e| e.open_contains_cell(&c)) {
                    out.push(c);
                }
            }
        }
    }
    out
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Component labelling of `∂V ∩ Γ`; cells are joined to their faces.
/// `V` must not lie properly inside a cube of the cover. Maximal cubes of
/// the cover qualify, and so does a cube that no element touches.
pub fn boundary_grid_report(v: &DiadicCube, cover: &CubePairCover) -> Result<BoundaryReport, CoverError> {
    if cover.properly_contains(v) {
        return Err(CoverError::NotMaximal(*v));
    }
    let cells = boundary_grid_cells(v, cover);
    let index: HashMap<[i64; 3], usize> = cells.iter().enumerate().map(|(k, c)| (*c, k)).collect();
    let mut parent: Vec<usize> = (0..cells.len()).collect();
    let mut by_dim = [0; 3];
    for (k, c) in cells.iter().enumerate() {
        by_dim[crate::grid::cell_dim(c).min(2)] += 1;
        for f in faces(c) {
            if let Some(&j) = index.get(&f) {
                let (a, b) = (find(&mut parent, k), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let components = (0..cells.len()).filter(|&k| find(&mut parent, k) == k).count();
    Ok(BoundaryReport {
        cube: *v,
        cells: by_dim,
        components,
    })
}

pub fn boundary_grid_connected(v: &DiadicCube, cover: &CubePairCover) -> Result<bool, CoverError> {
    boundary_grid_report(v, cover).map(|r| r.connected())
}
