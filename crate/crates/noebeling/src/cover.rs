//! Dyadic cubes, cube pairs and covers by cube pairs.
//!
//! A cube of level `m` with integer corner `c` is the product of the
//! intervals `[c_i 2^-m, (c_i + 1) 2^-m]`. A cube pair `(level, corner,
//! axis)` is that cube together with its neighbour in the `+axis`
//! direction; the cover element is the interior of their union, an open
//! box. Geometry is done in integer units of the finest level in play.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoverError {
    #[error("cover element {inner} is properly contained in {outer}")]
    ProperContainment { inner: CubePair, outer: CubePair },
    #[error("cube {0} is not a maximal cube of the cover")]
    NotMaximal(DiadicCube),
    #[error("empty bounding box")]
    EmptyBox,
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Integer box in units of some level; used closed or open by context.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IBox {
    pub lo: [i64; 3],
    pub hi: [i64; 3],
}

impl IBox {
    /// Closed containment of `other` in `self`.
    pub fn contains_box(&self, other: &IBox) -> bool {
        (0..3).all(|i| self.lo[i] <= other.lo[i] && other.hi[i] <= self.hi[i])
    }

    /// Closed boxes share at least one point.
    pub fn meets(&self, other: &IBox) -> bool {
        (0..3).all(|i| self.lo[i] <= other.hi[i] && other.lo[i] <= self.hi[i])
    }

    /// Cell with doubled coordinates `x` lies in the open box. In doubled
    /// units an odd coordinate `2c+1` stands for the open interval
    /// `(c, c+1)` and an even one `2c` for the point `c`; both cases reduce
    /// to `2 lo < x < 2 hi`.
    pub fn open_contains_cell(&self, x: &[i64; 3]) -> bool {
        (0..3).all(|i| 2 * self.lo[i] < x[i] && x[i] < 2 * self.hi[i])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DiadicCube {
    pub level: u32,
    pub corner: [i64; 3],
}

impl DiadicCube {
    pub fn new(level: u32, corner: [i64; 3]) -> Self {
        DiadicCube { level, corner }
    }

    /// Closed extent in units of level `at >= level`.
    pub fn ibox(&self, at: u32) -> IBox {
        let s = 1i64 << (at - self.level);
        IBox {
            lo: self.corner.map(|c| c * s),
            hi: self.corner.map(|c| (c + 1) * s),
        }
    }

    pub fn contains(&self, other: &DiadicCube) -> bool {
        let at = self.level.max(other.level);
        self.ibox(at).contains_box(&other.ibox(at))
    }

    /// The 8 cubes of the next level inside this one.
    pub fn children(&self) -> Vec<DiadicCube> {
        let mut out = Vec::with_capacity(8);
        for dx in 0..2 {
            for dy in 0..2 {
                for dz in 0..2 {
                    let c = self.corner;
                    out.push(DiadicCube::new(
                        self.level + 1,
                        [2 * c[0] + dx, 2 * c[1] + dy, 2 * c[2] + dz],
                    ));
                }
            }
        }
        out
    }

    pub fn offset(&self, axis: usize, by: i64) -> DiadicCube {
        let mut c = self.corner;
        c[axis] += by;
        DiadicCube::new(self.level, c)
    }
}

impl fmt::Display for DiadicCube {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}; {},{},{}]",
            self.level, self.corner[0], self.corner[1], self.corner[2]
        )
    }
}

const AXES: [char; 3] = ['x', 'y', 'z'];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CubePair {
    pub level: u32,
    pub corner: [i64; 3],
    pub axis: usize,
}

impl CubePair {
    pub fn new(level: u32, corner: [i64; 3], axis: usize) -> Self {
        assert!(axis < 3);
        CubePair { level, corner, axis }
    }

    /// The pair of two adjacent cubes, in either order.
    pub fn of_cubes(a: DiadicCube, b: DiadicCube) -> Option<CubePair> {
        if a.level != b.level {
            return None;
        }
        let diff: Vec<i64> = (0..3).map(|i| b.corner[i] - a.corner[i]).collect();
        let axis = (0..3).find(|&i| diff[i] != 0)?;
        if diff.iter().filter(|d| **d != 0).count() != 1 || diff[axis].abs() != 1 {
            return None;
        }
        let low = if diff[axis] > 0 { a } else { b };
        Some(CubePair::new(a.level, low.corner, axis))
    }

    pub fn lower(&self) -> DiadicCube {
        DiadicCube::new(self.level, self.corner)
    }

    pub fn upper(&self) -> DiadicCube {
        self.lower().offset(self.axis, 1)
    }

    pub fn cubes(&self) -> [DiadicCube; 2] {
        [self.lower(), self.upper()]
    }

    /// Extent of the union in units of level `at`; the element is its
    /// interior.
    pub fn ibox(&self, at: u32) -> IBox {
        let mut b = self.lower().ibox(at);
        b.hi[self.axis] += 1i64 << (at - self.level);
        b
    }

    /// The common face of the two cubes, as a degenerate closed box.
    pub fn shared_face(&self, at: u32) -> IBox {
        let mut b = self.lower().ibox(at);
        b.lo[self.axis] = b.hi[self.axis];
        b
    }
}

impl fmt::Display for CubePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "pair {} {} {} {} {}",
            self.level, self.corner[0], self.corner[1], self.corner[2], AXES[self.axis]
        )
    }
}

/// The region of interest: a box with corners in `2^-level Z^3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BoundingBox {
    pub level: u32,
    pub lo: [i64; 3],
    pub hi: [i64; 3],
}

impl BoundingBox {
    pub fn unit() -> Self {
        BoundingBox {
            level: 0,
            lo: [0; 3],
            hi: [1; 3],
        }
    }

    pub fn ibox(&self, at: u32) -> IBox {
        let s = 1i64 << (at - self.level);
        IBox {
            lo: self.lo.map(|c| c * s),
            hi: self.hi.map(|c| c * s),
        }
    }

    /// Level-`m` cubes inside the box, in lexicographic order; `m` must be
    /// at least the box level.
    pub fn cubes(&self, m: u32, margin: i64) -> Vec<DiadicCube> {
        let b = self.ibox(m);
        let mut out = Vec::new();
        for x in b.lo[0] - margin..b.hi[0] + margin {
            for y in b.lo[1] - margin..b.hi[1] + margin {
                for z in b.lo[2] - margin..b.hi[2] + margin {
                    out.push(DiadicCube::new(m, [x, y, z]));
                }
            }
        }
        out
    }
}

/// A set of cube pairs with the region it is studied in. Pairs are kept
/// sorted and free of duplicates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CubePairCover {
    pub bbox: BoundingBox,
    pairs: Vec<CubePair>,
}

impl CubePairCover {
    pub fn new(bbox: BoundingBox, pairs: impl IntoIterator<Item = CubePair>) -> Self {
        let set: BTreeSet<CubePair> = pairs.into_iter().collect();
        CubePairCover {
            bbox,
            pairs: set.into_iter().collect(),
        }
    }

    /// All adjacent pairs of level-`m` cubes meeting the box, with one
    /// cube of margin so that the faces on the box boundary are covered
    /// as well.
    pub fn uniform(m: u32, bbox: BoundingBox) -> Self {
        let m = m.max(bbox.level);
        let cubes = bbox.cubes(m, 1);
        let inside: HashSet<DiadicCube> = cubes.iter().copied().collect();
        let mut pairs = Vec::new();
        for c in &cubes {
            for axis in 0..3 {
                if inside.contains(&c.offset(axis, 1)) {
                    pairs.push(CubePair::new(m, c.corner, axis));
                }
            }
        }
        Self::new(bbox, pairs)
    }

    pub fn empty(bbox: BoundingBox) -> Self {
        Self::new(bbox, [])
    }

    pub fn pairs(&self) -> &[CubePair] {
        &self.pairs
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Finest level among the pairs and the box; all integer geometry is
    /// done in these units.
    pub fn fine_level(&self) -> u32 {
        self.pairs
            .iter()
            .map(|p| p.level)
            .max()
            .unwrap_or(0)
            .max(self.bbox.level)
    }

    /// Open boxes of the elements in fine units, in pair order.
    pub fn element_boxes(&self) -> Vec<IBox> {
        let m = self.fine_level();
        self.pairs.iter().map(|p| p.ibox(m)).collect()
    }

    /// Rejects covers where one element is properly contained in another.
    pub fn validate(&self) -> Result<(), CoverError> {
        if (0..3).any(|i| self.bbox.lo[i] >= self.bbox.hi[i]) {
            return Err(CoverError::EmptyBox);
        }
        let set: HashSet<CubePair> = self.pairs.iter().copied().collect();
        for inner in &self.pairs {
            let ib = inner.ibox(inner.level);
            for l in 0..=inner.level {
                let s = 1i64 << (inner.level - l);
                let fl = ib.lo.map(|c| c.div_euclid(s));
                for axis in 0..3 {
                    for back in 0..2 {
                        let mut c = fl;
                        c[axis] -= back;
                        let outer = CubePair::new(l, c, axis);
                        if outer != *inner
                            && set.contains(&outer)
                            && outer.ibox(inner.level).contains_box(&ib)
                        {
                            return Err(CoverError::ProperContainment {
                                inner: *inner,
                                outer,
                            });
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Every cube appearing in some pair, sorted.
    pub fn cubes(&self) -> Vec<DiadicCube> {
        let set: BTreeSet<DiadicCube> = self.pairs.iter().flat_map(|p| p.cubes()).collect();
        set.into_iter().collect()
    }

    /// Cubes of the cover not properly contained in another cube of the
    /// cover. Dyadic cubes are nested or have disjoint interiors, so these
    /// have pairwise disjoint interiors.
    pub fn maximal_cubes(&self) -> Vec<DiadicCube> {
        let all: HashSet<DiadicCube> = self.cubes().into_iter().collect();
        let mut out: Vec<DiadicCube> = all
            .iter()
            .filter(|c| {
                (0..c.level).all(|l| {
                    let s = 1i64 << (c.level - l);
                    !all.contains(&DiadicCube::new(l, c.corner.map(|x| x.div_euclid(s))))
                })
            })
            .copied()
            .collect();
        out.sort();
        out
    }

    pub fn is_maximal(&self, v: &DiadicCube) -> bool {
        self.maximal_cubes().contains(v)
    }

    /// Some cube of the cover properly contains `v`.
    pub fn properly_contains(&self, v: &DiadicCube) -> bool {
        self.pairs.iter().flat_map(|p| p.cubes()).any(|c| c.level < v.level && c.contains(v))
    }

    /// Whether the relatively open fine-level cell with doubled
    /// coordinates `x` lies in some element.
    pub fn covers_cell(&self, x: &[i64; 3]) -> bool {
        let m = self.fine_level();
        self.pairs.iter().any(|p| p.ibox(m).open_contains_cell(x))
    }

    /// First element (in pair order) whose open box contains the cell.
    pub fn element_containing_cell(&self, x: &[i64; 3]) -> Option<CubePair> {
        let m = self.fine_level();
        self.pairs
            .iter()
            .find(|p| p.ibox(m).open_contains_cell(x))
            .copied()
    }

    /// First element whose open box contains the closed cube `v`.
    pub fn element_containing_cube(&self, v: &DiadicCube) -> Option<CubePair> {
        let m = self.fine_level().max(v.level);
        let vb = v.ibox(m);
        self.pairs.iter().find(|p| p.ibox(m).contains_box(&vb)).copied()
    }

    /// Refines each listed cube of a uniform level-`m` cover into its eight
    /// children. The pairs are: level-`m` pairs of unrefined cubes,
    /// level-`m+1` pairs between children of refined cubes, and across each
    /// face between an unrefined cube `V` and a refined `W` the four pairs
    /// of a child of `W` with the child of `V` facing it.
    pub fn refined_uniform(m: u32, bbox: BoundingBox, refine: &[DiadicCube]) -> Self {
        let base = Self::uniform(m, bbox);
        let m = base.pairs.first().map(|p| p.level).unwrap_or(m);
        let refined: HashSet<DiadicCube> = refine.iter().copied().filter(|c| c.level == m).collect();
        let mut pairs = Vec::new();
        for p in base.pairs() {
            let [a, b] = p.cubes();
            match (refined.contains(&a), refined.contains(&b)) {
                (false, false) => pairs.push(*p),
                (true, true) => {
                    // children facing each other across the shared face
                    for ca in a.children() {
                        let cb = ca.offset(p.axis, 1);
                        if b.contains(&cb) {
                            pairs.push(CubePair::of_cubes(ca, cb).expect("adjacent"));
                        }
                    }
                }
                (ra, _) => {
                    let (coarse, fine_side) = if ra { (b, a) } else { (a, b) };
                    let dir = if ra { -1 } else { 1 };
                    for cw in fine_side.children() {
                        let cv = cw.offset(p.axis, -dir);
                        if coarse.contains(&cv) {
                            pairs.push(CubePair::of_cubes(cv, cw).expect("adjacent"));
                        }
                    }
                }
            }
        }
        for w in &refined {
            let kids = w.children();
            let set: HashSet<DiadicCube> = kids.iter().copied().collect();
            for k in &kids {
                for axis in 0..3 {
                    let nb = k.offset(axis, 1);
                    if set.contains(&nb) {
                        pairs.push(CubePair::new(m + 1, k.corner, axis));
                    }
                }
            }
        }
        Self::new(bbox, pairs)
    }

    /// Drops the listed pairs.
    pub fn without(&self, drop: &[CubePair]) -> Self {
        let d: HashSet<&CubePair> = drop.iter().collect();
        Self::new(self.bbox, self.pairs.iter().filter(|p| !d.contains(p)).copied())
    }

    /// Map from fine-level unit cubes to the maximal cube containing them.
    pub fn maximal_lookup(&self) -> (Vec<DiadicCube>, HashMap<[i64; 3], usize>) {
        let m = self.fine_level();
        let maxi = self.maximal_cubes();
        let mut map = HashMap::new();
        for (k, v) in maxi.iter().enumerate() {
            let b = v.ibox(m);
            for x in b.lo[0]..b.hi[0] {
                for y in b.lo[1]..b.hi[1] {
                    for z in b.lo[2]..b.hi[2] {
                        map.insert([x, y, z], k);
                    }
                }
            }
        }
        (maxi, map)
    }
}

pub const COVER_HEADER: &str = "tracklab-cover v1";

/// Text form: header, `bbox level lx ly lz hx hy hz`, one
/// `pair level cx cy cz axis` line per element, `end`.
pub fn write_cover(c: &CubePairCover) -> String {
    let b = &c.bbox;
    let mut s = format!(
        "{COVER_HEADER}\nbbox {} {} {} {} {} {} {}\n",
        b.level, b.lo[0], b.lo[1], b.lo[2], b.hi[0], b.hi[1], b.hi[2]
    );
    for p in &c.pairs {
        s.push_str(&format!("{p}\n"));
    }
    s.push_str("end\n");
    s
}

pub fn parse_cover(text: &str) -> Result<CubePairCover, CoverError> {
    let err = |line: usize, message: &str| CoverError::Parse {
        line,
        message: message.to_string(),
    };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    match lines.next() {
        Some((_, l)) if l == COVER_HEADER => {}
        Some((n, _)) => return Err(err(n, "missing header")),
        None => return Err(err(0, "empty input")),
    }
    let mut bbox = None;
    let mut pairs = Vec::new();
    for (n, line) in lines {
        let parts: Vec<&str> = line.split_whitespace().collect();
        let ints = |xs: &[&str]| -> Result<Vec<i64>, CoverError> {
            xs.iter()
                .map(|s| s.parse::<i64>().map_err(|_| err(n, "bad integer")))
                .collect()
        };
        match parts.first().copied() {
            Some("end") => {
                let bbox = bbox.ok_or_else(|| err(n, "missing bbox line"))?;
                let cover = CubePairCover::new(bbox, pairs);
                return Ok(cover);
            }
            Some("bbox") if parts.len() == 8 => {
                let v = ints(&parts[1..])?;
                if v[0] < 0 || v[0] > 30 {
                    return Err(err(n, "bad level"));
                }
                bbox = Some(BoundingBox {
                    level: v[0] as u32,
                    lo: [v[1], v[2], v[3]],
                    hi: [v[4], v[5], v[6]],
                });
            }
            Some("pair") if parts.len() == 6 => {
                let v = ints(&parts[1..5])?;
                if v[0] < 0 || v[0] > 30 {
                    return Err(err(n, "bad level"));
                }
                let axis = parts[5]
                    .chars()
                    .next()
                    .and_then(|c| AXES.iter().position(|a| *a == c))
                    .filter(|_| parts[5].len() == 1)
                    .ok_or_else(|| err(n, "axis must be x, y or z"))?;
                pairs.push(CubePair::new(v[0] as u32, [v[1], v[2], v[3]], axis));
            }
            _ => return Err(err(n, "expected 'bbox', 'pair' or 'end'")),
        }
    }
    Err(err(0, "missing 'end'"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_cover_is_valid_and_all_cubes_maximal() {
        let c = CubePairCover::uniform(1, BoundingBox::unit());
        c.validate().unwrap();
        // 4x4x4 cubes with margin, 3 * 3 * 16 adjacent pairs
        assert_eq!(c.pairs().len(), 144);
        assert_eq!(c.maximal_cubes().len(), 64);
    }

    #[test]
    fn proper_containment_is_rejected() {
        let big = CubePair::new(0, [0, 0, 0], 0);
        let small = CubePair::new(1, [1, 0, 0], 0);
        let c = CubePairCover::new(BoundingBox::unit(), [big, small]);
        assert_eq!(
            c.validate(),
            Err(CoverError::ProperContainment { inner: small, outer: big })
        );
        // overlapping without containment is allowed
        let other = CubePair::new(1, [3, 0, 0], 0);
        let c = CubePairCover::new(BoundingBox::unit(), [big, other]);
        assert!(c.validate().is_ok());
    }

    #[test]
    fn refined_cover_is_valid_with_mixed_maximal_cubes() {
        let w = DiadicCube::new(1, [0, 0, 0]);
        let c = CubePairCover::refined_uniform(1, BoundingBox::unit(), &[w]);
        c.validate().unwrap();
        let maxi = c.maximal_cubes();
        assert!(!maxi.contains(&w));
        assert_eq!(maxi.iter().filter(|v| v.level == 2).count(), 8);
        assert_eq!(maxi.len(), 63 + 8);
        // the neighbour's child facing W appears but is not maximal
        let child = DiadicCube::new(2, [2, 0, 0]);
        assert!(c.cubes().contains(&child));
        assert!(!maxi.contains(&child));
    }

    #[test]
    fn pair_geometry() {
        let p = CubePair::new(1, [0, 1, 0], 2);
        assert_eq!(p.upper(), DiadicCube::new(1, [0, 1, 1]));
        assert_eq!(p.ibox(2), IBox { lo: [0, 2, 0], hi: [2, 4, 4] });
        assert_eq!(p.shared_face(1), IBox { lo: [0, 1, 1], hi: [1, 2, 1] });
        assert_eq!(CubePair::of_cubes(p.upper(), p.lower()), Some(p));
        assert_eq!(CubePair::of_cubes(p.lower(), p.lower()), None);
    }

    #[test]
    fn text_round_trip() {
        let c = CubePairCover::refined_uniform(1, BoundingBox::unit(), &[DiadicCube::new(1, [1, 1, 0])]);
        assert_eq!(parse_cover(&write_cover(&c)).unwrap(), c);
        assert!(parse_cover("tracklab-cover v1\npair 1 0 0 0 w\nend\n").is_err());
    }
}
