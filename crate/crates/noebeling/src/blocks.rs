//! Splitting a certified path into blocks that alternate between the
//! interior of one maximal cube and a crossing of a common face.
//!
//! A certified path never meets a fine-level edge, since points there have
//! two rational coordinates. So it runs through open fine cubes and open
//! fine faces. Stretches inside one maximal cube `V` become I-blocks mapped
//! into the open cube `V`. Each passage through a face between two maximal
//! cubes becomes a J-block mapped into the cover element that contains the
//! face. Block ends are dyadic rationals taken inside the fine cubes on
//! either side of a crossing, which that element contains entirely.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::certify::{certify_path, Witness};
use crate::cover::{CubePair, CubePairCover, DiadicCube, IBox};
use crate::geom::{PLPath3, Point3};
use crate::qsqrt2::{dyadic_between, fmt_q, QSqrt2, Q};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PartitionError {
    #[error("path is not certified: {0}")]
    NotCertified(Box<Witness>),
    #[error("path point at parameter {0} is not covered by any element")]
    Uncovered(QSqrt2),
    #[error("no element contains the maximal cube {0}")]
    NoElement(DiadicCube),
}

/// Relatively open fine cell visited over a parameter range.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Piece {
    /// Open parameter interval inside one open fine cube.
    Cube { lo: QSqrt2, hi: QSqrt2, cube: [i64; 3] },
    /// Closed parameter interval, possibly a single point, inside one open
    /// fine face given by doubled coordinates.
    Face { lo: QSqrt2, hi: QSqrt2, cell: [i64; 3] },
}

impl Piece {
    pub fn lo(&self) -> &QSqrt2 {
        match self {
            Piece::Cube { lo, .. } | Piece::Face { lo, .. } => lo,
        }
    }

    pub fn hi(&self) -> &QSqrt2 {
        match self {
            Piece::Cube { hi, .. } | Piece::Face { hi, .. } => hi,
        }
    }
}

fn pow2(m: u32) -> Q {
    Q::from_integer(BigInt::one() << m)
}

fn floor_i64(x: &QSqrt2) -> i64 {
    i64::try_from(x.floor()).expect("coordinate in range")
}

fn fine_cube_at(p: &Point3, s: &Q) -> [i64; 3] {
    [0, 1, 2].map(|i| floor_i64(&p.coord(i).scale(s)))
}

/// Face cell at a point lying on the plane `x_axis = k 2^-m`.
fn face_at(p: &Point3, s: &Q, axis: usize, k: i64) -> [i64; 3] {
    [0, 1, 2].map(|i| if i == axis { 2 * k } else { 2 * floor_i64(&p.coord(i).scale(s)) + 1 })
}

/// The sequence of fine cells the path passes through, in order, with
/// adjacent pieces in the same cell merged.
pub fn path_pieces(f: &PLPath3, m: u32) -> Vec<Piece> {
    let s = pow2(m);
    let mut out: Vec<Piece> = Vec::new();
    let push = |out: &mut Vec<Piece>, piece: Piece| {
        if let Some(last) = out.last_mut() {
            match (last, &piece) {
                (Piece::Face { hi, cell, .. }, Piece::Face { hi: h2, cell: c2, .. }) if cell == c2 => {
                    *hi = h2.clone();
                    return;
                }
                (Piece::Cube { hi, cube, .. }, Piece::Cube { hi: h2, cube: c2, .. }) if cube == c2 => {
                    *hi = h2.clone();
                    return;
                }
                _ => {}
            }
        }
        out.push(piece);
    };
    for k in 0..f.segment_count() {
        let (a, b) = f.segment(k);
        let d = b.sub(a);
        let glob = |t: &QSqrt2| f.global(k, t);
        // a segment inside a fine plane stays in one open face
        let flat = (0..3).find(|&i| {
            d[i].is_zero() && a.coord(i).is_rational() && a.coord(i).a.clone() * &s == (a.coord(i).a.clone() * &s).floor()
        });
        if let Some(i) = flat {
            let mid = a.lerp(b, &QSqrt2::rational(Q::new(1.into(), 2.into())));
            let kk = i64::try_from((a.coord(i).a.clone() * &s).to_integer()).expect("in range");
            push(
                &mut out,
                Piece::Face {
                    lo: glob(&QSqrt2::zero()),
                    hi: glob(&QSqrt2::one()),
                    cell: face_at(&mid, &s, i, kk),
                },
            );
            continue;
        }
        let mut hits: Vec<(QSqrt2, usize, i64)> = Vec::new();
        for i in 0..3 {
            if d[i].is_zero() {
                continue;
            }
            let (u, v) = (a.coord(i).scale(&s), b.coord(i).scale(&s));
            let (lo, hi) = if u < v { (u, v) } else { (v, u) };
            let mut kk = lo.ceil();
            while QSqrt2::rational(Q::from_integer(kk.clone())) <= hi {
                let target = QSqrt2::rational(Q::from_integer(kk.clone()) / &s);
                let t = &(&target - a.coord(i)) / &d[i];
                hits.push((t, i, i64::try_from(kk.clone()).expect("in range")));
                kk += 1;
            }
        }
        hits.sort_by(|x, y| x.0.cmp(&y.0));
        let mut prev = QSqrt2::zero();
        for (t, axis, kk) in hits {
            if t > prev {
                let mid = a.lerp(b, &(&(&prev + &t) * &QSqrt2::rational(Q::new(1.into(), 2.into()))));
                push(
                    &mut out,
                    Piece::Cube {
                        lo: glob(&prev),
                        hi: glob(&t),
                        cube: fine_cube_at(&mid, &s),
                    },
                );
            }
            let pt = a.lerp(b, &t);
            let g = glob(&t);
            push(
                &mut out,
                Piece::Face {
                    lo: g.clone(),
                    hi: g,
                    cell: face_at(&pt, &s, axis, kk),
                },
            );
            prev = t;
        }
        if prev < QSqrt2::one() {
            let mid = a.lerp(b, &(&(&prev + &QSqrt2::one()) * &QSqrt2::rational(Q::new(1.into(), 2.into()))));
            push(
                &mut out,
                Piece::Cube {
                    lo: glob(&prev),
                    hi: glob(&QSqrt2::one()),
                    cube: fine_cube_at(&mid, &s),
                },
            );
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlockKind {
    /// Inside one open maximal cube.
    I,
    /// Across a common face, inside the element containing it.
    J,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Crossing {
    /// Fine face cell crossed.
    pub cell: [i64; 3],
    pub from: DiadicCube,
    pub to: DiadicCube,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub kind: BlockKind,
    pub s: Q,
    pub t: Q,
    /// Cover element containing the image of the block.
    pub element: CubePair,
    /// Maximal cube of an I-block.
    pub cube: Option<DiadicCube>,
    pub crossing: Option<Crossing>,
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            BlockKind::I => "I",
            BlockKind::J => "J",
        };
        write!(f, "{kind} [{}, {}] in {}", fmt_q(&self.s), fmt_q(&self.t), self.element)?;
        if let Some(c) = &self.crossing {
            write!(f, " from {} to {}", c.from, c.to)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockStructure {
    pub fine_level: u32,
    pub pieces: usize,
    pub blocks: Vec<Block>,
}

impl BlockStructure {
    pub fn crossings(&self) -> usize {
        self.blocks.iter().filter(|b| b.kind == BlockKind::J).count()
    }
}

enum Item {
    Stretch {
        v: usize,
        lo: QSqrt2,
        hi: QSqrt2,
        events: Vec<(QSqrt2, QSqrt2)>,
    },
    Cross {
        hi: QSqrt2,
        cell: [i64; 3],
        sides: [usize; 2],
        element: CubePair,
    },
}

/// Partition of `[0, 1]` into alternating blocks. The path must be
/// certified and its image covered by the elements.
pub fn partition_path(f: &PLPath3, cover: &CubePairCover) -> Result<BlockStructure, PartitionError> {
    let cert = certify_path(f);
    if let Some(w) = cert.witness {
        return Err(PartitionError::NotCertified(Box::new(w)));
    }
    let m = cover.fine_level();
    let pieces = path_pieces(f, m);
    let (maxi, lookup) = cover.maximal_lookup();
    let half = QSqrt2::rational(Q::new(1.into(), 2.into()));
    let mid_of = |lo: &QSqrt2, hi: &QSqrt2| &(lo + hi) * &half;

    let mut items: Vec<Item> = Vec::new();
    for p in &pieces {
        match p {
            Piece::Cube { lo, hi, cube } => {
                let v = *lookup
                    .get(cube)
                    .ok_or_else(|| PartitionError::Uncovered(mid_of(lo, hi)))?;
                match items.last_mut() {
                    Some(Item::Stretch { v: w, hi: h, .. }) if *w == v => *h = hi.clone(),
                    _ => items.push(Item::Stretch {
                        v,
                        lo: lo.clone(),
                        hi: hi.clone(),
                        events: vec![],
                    }),
                }
            }
            Piece::Face { lo, hi, cell } => {
                let axis = (0..3).find(|&i| cell[i].rem_euclid(2) == 0).expect("face cell");
                let mut below = cell.map(|c| (c - 1).div_euclid(2));
                below[axis] = cell[axis].div_euclid(2) - 1;
                let mut above = below;
                above[axis] += 1;
                let (v1, v2) = (lookup.get(&below).copied(), lookup.get(&above).copied());
                match (v1, v2) {
                    (Some(a), Some(b)) if a == b => match items.last_mut() {
                        Some(Item::Stretch { v, hi: h, events, .. }) if *v == a => {
                            *h = hi.clone();
                            events.push((lo.clone(), hi.clone()));
                        }
                        _ => items.push(Item::Stretch {
                            v: a,
                            lo: lo.clone(),
                            hi: hi.clone(),
                            events: vec![(lo.clone(), hi.clone())],
                        }),
                    },
                    (Some(a), Some(b)) => {
                        let element = cover
                            .element_containing_cell(cell)
                            .ok_or_else(|| PartitionError::Uncovered(lo.clone()))?;
                        if let Some(Item::Stretch { hi: h, .. }) = items.last_mut() {
                            *h = lo.clone();
                        }
                        items.push(Item::Cross {
                            hi: hi.clone(),
                            cell: *cell,
                            sides: [a, b],
                            element,
                        });
                    }
                    _ => return Err(PartitionError::Uncovered(lo.clone())),
                }
            }
        }
    }
    // Stretches start right after a crossing ends.
    for k in 1..items.len() {
        let prev_hi = match &items[k - 1] {
            Item::Cross { hi, .. } => Some(hi.clone()),
            _ => None,
        };
        if let (Some(h), Item::Stretch { lo, .. }) = (prev_hi, &mut items[k]) {
            *lo = h;
        }
    }

    // I-block ends inside each stretch.
    let zero = Q::zero();
    let one = Q::one();
    let mut ends: Vec<Option<(Q, Q)>> = Vec::with_capacity(items.len());
    for (k, it) in items.iter().enumerate() {
        if let Item::Stretch { lo, hi, events, .. } = it {
            let mid = mid_of(lo, hi);
            let s = if k == 0 {
                zero.clone()
            } else {
                let first = events.first().map(|e| e.0.clone()).unwrap_or_else(|| hi.clone());
                dyadic_between(lo, &first.min(mid.clone()))
            };
            let t = if k + 1 == items.len() {
                one.clone()
            } else {
                let last = events.last().map(|e| e.1.clone()).unwrap_or_else(|| lo.clone());
                dyadic_between(&last.max(mid.clone()), hi)
            };
            ends.push(Some((s, t)));
        } else {
            ends.push(None);
        }
    }

    let mut blocks = Vec::new();
    for (k, it) in items.iter().enumerate() {
        match it {
            Item::Stretch { v, .. } => {
                let (s, t) = ends[k].clone().expect("stretch ends");
                let cube = maxi[*v];
                let element = cover.element_containing_cube(&cube).ok_or(PartitionError::NoElement(cube))?;
                blocks.push(Block {
                    kind: BlockKind::I,
                    s,
                    t,
                    element,
                    cube: Some(cube),
                    crossing: None,
                });
            }
            Item::Cross { cell, sides, element, .. } => {
                let before = k.checked_sub(1).and_then(|j| ends[j].clone());
                let after = ends.get(k + 1).cloned().flatten();
                let s = before.map(|e| e.1).unwrap_or_else(|| zero.clone());
                let t = after.map(|e| e.0).unwrap_or_else(|| one.clone());
                let side_of = |j: Option<usize>| match j.map(|j| &items[j]) {
                    Some(Item::Stretch { v, .. }) => Some(*v),
                    _ => None,
                };
                let prev = side_of(k.checked_sub(1));
                let next = side_of(Some(k + 1).filter(|j| *j < items.len()));
                let other = |v: usize| if v == sides[0] { sides[1] } else { sides[0] };
                let (from, to) = match (prev, next) {
                    (Some(a), Some(b)) => (a, b),
                    (Some(a), None) => (a, other(a)),
                    (None, Some(b)) => (other(b), b),
                    (None, None) => (sides[0], sides[1]),
                };
                blocks.push(Block {
                    kind: BlockKind::J,
                    s,
                    t,
                    element: *element,
                    cube: None,
                    crossing: Some(Crossing {
                        cell: *cell,
                        from: maxi[from],
                        to: maxi[to],
                    }),
                });
            }
        }
    }
    Ok(BlockStructure {
        fine_level: m,
        pieces: pieces.len(),
        blocks,
    })
}

/// The point lies in the open box, given in units of `2^-m`.
pub fn open_box_contains(b: &IBox, m: u32, p: &Point3) -> bool {
    let s = pow2(m);
    (0..3).all(|i| {
        let x = p.coord(i).scale(&s);
        QSqrt2::rational(Q::from_integer(b.lo[i].into())) < x && x < QSqrt2::rational(Q::from_integer(b.hi[i].into()))
    })
}

/// Independent recheck of a block structure against a path: blocks tile
/// `[0, 1]` in order and the path restricted to each block stays in the
/// block's element. Restrictions are polygonal, so checking their vertices
/// against the convex open box suffices. Returns a description of the
/// first failure.
pub fn check_blocks(f: &PLPath3, cover: &CubePairCover, blocks: &[Block]) -> Result<(), String> {
    let m = cover.fine_level();
    if blocks.is_empty() {
        return Err("no blocks".into());
    }
    if !blocks[0].s.is_zero() || !blocks.last().expect("non-empty").t.is_one() {
        return Err("blocks do not span [0, 1]".into());
    }
    for w in blocks.windows(2) {
        if w[0].t != w[1].s {
            return Err(format!("gap between {} and {}", w[0], w[1]));
        }
    }
    let mut index: HashMap<CubePair, IBox> = HashMap::new();
    for b in blocks {
        if b.s >= b.t {
            return Err(format!("empty block {b}"));
        }
        let bx = *index.entry(b.element).or_insert_with(|| b.element.ibox(m));
        for p in f.restriction_points(&b.s, &b.t) {
            if !open_box_contains(&bx, m, &p) {
                return Err(format!("block {b}: point {p} leaves the element"));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::BoundingBox;
    use crate::qsqrt2::{q, qr};

    fn irr(a: (i64, i64), b: (i64, i64)) -> QSqrt2 {
        QSqrt2::new(qr(a.0, a.1), qr(b.0, b.1))
    }

    /// A point with all coordinates `c_i + √2/100`.
    fn pt(x: (i64, i64), y: (i64, i64), z: (i64, i64)) -> Point3 {
        let e = (1, 100);
        Point3::new(irr(x, e), irr(y, e), irr(z, e))
    }

    #[test]
    fn path_inside_one_cube_is_one_block() {
        let cover = CubePairCover::uniform(1, BoundingBox::unit());
        let f = PLPath3::uniform(vec![pt((1, 8), (1, 8), (1, 8)), pt((1, 4), (1, 5), (1, 7))]).unwrap();
        let b = partition_path(&f, &cover).unwrap();
        assert_eq!(b.blocks.len(), 1);
        assert_eq!(b.blocks[0].kind, BlockKind::I);
        assert_eq!(b.blocks[0].cube, Some(DiadicCube::new(1, [0, 0, 0])));
        check_blocks(&f, &cover, &b.blocks).unwrap();
    }

    #[test]
    fn one_face_crossing_gives_a_j_block_around_it() {
        let cover = CubePairCover::uniform(1, BoundingBox::unit());
        let f = PLPath3::uniform(vec![pt((1, 8), (1, 8), (1, 8)), pt((3, 4), (1, 8), (1, 8))]).unwrap();
        let b = partition_path(&f, &cover).unwrap();
        let kinds: Vec<BlockKind> = b.blocks.iter().map(|b| b.kind).collect();
        assert_eq!(kinds, vec![BlockKind::I, BlockKind::J, BlockKind::I]);
        let j = &b.blocks[1];
        assert_eq!(j.element, CubePair::new(1, [0, 0, 0], 0));
        // crossing x = 1/2 happens at about t = 0.6
        let crossing = QSqrt2::new(qr(3, 5), qr(-8, 500));
        assert!(QSqrt2::rational(j.s.clone()) < crossing && crossing < QSqrt2::rational(j.t.clone()));
        check_blocks(&f, &cover, &b.blocks).unwrap();
    }

    #[test]
    fn touching_a_face_gives_a_j_block_with_equal_sides() {
        let cover = CubePairCover::uniform(1, BoundingBox::unit());
        let e = (1, 100);
        let on_face = Point3::new(QSqrt2::rational(qr(1, 2)), irr((1, 8), e), irr((1, 8), e));
        let f = PLPath3::uniform(vec![pt((1, 8), (1, 8), (1, 8)), on_face, pt((1, 8), (1, 4), (1, 8))]).unwrap();
        let b = partition_path(&f, &cover).unwrap();
        assert_eq!(b.blocks.len(), 3);
        let c = b.blocks[1].crossing.as_ref().unwrap();
        assert_eq!(c.from, c.to);
        check_blocks(&f, &cover, &b.blocks).unwrap();
    }

    #[test]
    fn uncovered_point_is_reported() {
        let cover = CubePairCover::new(BoundingBox::unit(), [CubePair::new(1, [0, 0, 0], 0)]);
        let f = PLPath3::uniform(vec![pt((1, 8), (1, 8), (1, 8)), pt((1, 8), (3, 4), (1, 8))]).unwrap();
        assert!(matches!(partition_path(&f, &cover), Err(PartitionError::Uncovered(_))));
    }

    #[test]
    fn uncertified_path_is_refused() {
        let cover = CubePairCover::uniform(1, BoundingBox::unit());
        let f = PLPath3::constant(Point3::rational([qr(1, 3), qr(1, 3), q(0)]));
        assert!(matches!(partition_path(&f, &cover), Err(PartitionError::NotCertified(_))));
    }
}
