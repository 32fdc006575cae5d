//! Points and piecewise-linear paths in Q(√2)^3.

use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::qsqrt2::{fmt_q, parse_q, QSqrt2, Q};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Point3(pub [QSqrt2; 3]);

impl Point3 {
    pub fn new(x: QSqrt2, y: QSqrt2, z: QSqrt2) -> Self {
        Point3([x, y, z])
    }

    pub fn rational(c: [Q; 3]) -> Self {
        Point3(c.map(QSqrt2::rational))
    }

    pub fn coord(&self, i: usize) -> &QSqrt2 {
        &self.0[i]
    }

    /// Number of coordinates that are rational.
    pub fn rational_count(&self) -> usize {
        self.0.iter().filter(|c| c.is_rational()).count()
    }

    /// At most one rational coordinate.
    pub fn in_noebeling_curve(&self) -> bool {
        self.rational_count() <= 1
    }

    pub fn lerp(&self, other: &Point3, t: &QSqrt2) -> Point3 {
        Point3(std::array::from_fn(|i| {
            &self.0[i] + &(&(&other.0[i] - &self.0[i]) * t)
        }))
    }

    pub fn sub(&self, other: &Point3) -> [QSqrt2; 3] {
        std::array::from_fn(|i| &self.0[i] - &other.0[i])
    }

    pub fn dist2(&self, other: &Point3) -> QSqrt2 {
        self.sub(other)
            .iter()
            .fold(QSqrt2::zero(), |acc, d| &acc + &(d * d))
    }
}

impl fmt::Display for Point3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.0[0], self.0[1], self.0[2])
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PathError {
    #[error("a path needs at least one vertex")]
    Empty,
    #[error("{vertices} vertices but {params} parameters")]
    Length { vertices: usize, params: usize },
    #[error("parameters must run strictly increasing from 0 to 1")]
    Parameters,
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Vertices with parameter breakpoints. A single vertex is the constant
/// path; it carries the breakpoints `0` and `1` with the vertex repeated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PLPath3 {
    vertices: Vec<Point3>,
    params: Vec<Q>,
}

impl PLPath3 {
    pub fn new(vertices: Vec<Point3>, params: Vec<Q>) -> Result<Self, PathError> {
        if vertices.is_empty() {
            return Err(PathError::Empty);
        }
        if vertices.len() != params.len() {
            return Err(PathError::Length {
                vertices: vertices.len(),
                params: params.len(),
            });
        }
        let ok = params.len() >= 2
            && params[0].is_zero()
            && params.last().map(|p| p.is_one()).unwrap_or(false)
            && params.windows(2).all(|w| w[0] < w[1]);
        if !ok {
            return Err(PathError::Parameters);
        }
        Ok(PLPath3 { vertices, params })
    }

    /// Vertices at equally spaced parameters.
    pub fn uniform(vertices: Vec<Point3>) -> Result<Self, PathError> {
        let vertices = if vertices.len() == 1 {
            vec![vertices[0].clone(), vertices[0].clone()]
        } else {
            vertices
        };
        let n = vertices.len().saturating_sub(1).max(1) as i64;
        let params = (0..vertices.len())
            .map(|k| Q::new((k as i64).into(), n.into()))
            .collect();
        Self::new(vertices, params)
    }

    pub fn constant(p: Point3) -> Self {
        Self::uniform(vec![p]).expect("constant path")
    }

    pub fn vertices(&self) -> &[Point3] {
        &self.vertices
    }

    pub fn params(&self) -> &[Q] {
        &self.params
    }

    pub fn segment_count(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn segment(&self, k: usize) -> (&Point3, &Point3) {
        (&self.vertices[k], &self.vertices[k + 1])
    }

    /// Global parameter of local parameter `t` on segment `k`.
    pub fn global(&self, k: usize, t: &QSqrt2) -> QSqrt2 {
        let lo = QSqrt2::rational(self.params[k].clone());
        let len = &self.params[k + 1] - &self.params[k];
        &lo + &t.scale(&len)
    }

    /// Point at a global parameter in `[0, 1]`.
    pub fn at(&self, s: &QSqrt2) -> Point3 {
        let k = self
            .params
            .windows(2)
            .position(|w| *s <= QSqrt2::rational(w[1].clone()))
            .unwrap_or(self.segment_count() - 1);
        let lo = QSqrt2::rational(self.params[k].clone());
        let len = &self.params[k + 1] - &self.params[k];
        let t = (s - &lo).scale(&(Q::one() / len));
        self.vertices[k].lerp(&self.vertices[k + 1], &t)
    }

    /// Vertices of the restriction to `[s, t]`: the two end points and the
    /// breakpoints strictly between.
    pub fn restriction_points(&self, s: &Q, t: &Q) -> Vec<Point3> {
        let mut pts = vec![self.at(&QSqrt2::rational(s.clone()))];
        for (p, v) in self.params.iter().zip(&self.vertices) {
            if p > s && p < t {
                pts.push(v.clone());
            }
        }
        pts.push(self.at(&QSqrt2::rational(t.clone())));
        pts
    }
}

pub const PATH_HEADER: &str = "tracklab-path v1";

/// Text form: a header, then one `vertex t x y z` line per vertex with `t`
/// rational and each coordinate as `(a,b)` for `a + b√2`, then `end`.
pub fn write_path(p: &PLPath3) -> String {
    let mut s = format!("{PATH_HEADER}\n");
    for (t, v) in p.params.iter().zip(&p.vertices) {
        s.push_str(&format!("vertex {} {}\n", fmt_q(t), v));
    }
    s.push_str("end\n");
    s
}

pub fn parse_path(text: &str) -> Result<PLPath3, PathError> {
    let err = |line: usize, message: &str| PathError::Parse {
        line,
        message: message.to_string(),
    };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    match lines.next() {
        Some((_, l)) if l == PATH_HEADER => {}
        Some((n, _)) => return Err(err(n, "missing header")),
        None => return Err(err(0, "empty input")),
    }
    let mut vertices = Vec::new();
    let mut params = Vec::new();
    for (n, line) in lines {
        if line == "end" {
            return PLPath3::new(vertices, params);
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 5 || parts[0] != "vertex" {
            return Err(err(n, "expected 'vertex t x y z'"));
        }
        params.push(parse_q(parts[1]).ok_or_else(|| err(n, "bad parameter"))?);
        let mut c = Vec::with_capacity(3);
        for s in &parts[2..] {
            c.push(s.parse::<QSqrt2>().map_err(|m| err(n, &m))?);
        }
        let [x, y, z]: [QSqrt2; 3] = c.try_into().expect("three coordinates");
        vertices.push(Point3::new(x, y, z));
    }
    Err(err(0, "missing 'end'"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsqrt2::{q, qr};

    fn p(x: i64, y: i64, z: i64) -> Point3 {
        Point3::new(
            QSqrt2::new(q(0), q(x)),
            QSqrt2::new(q(y), q(1)),
            QSqrt2::new(qr(1, 3), q(z)),
        )
    }

    #[test]
    fn parameters_are_checked() {
        assert_eq!(PLPath3::new(vec![], vec![]), Err(PathError::Empty));
        assert_eq!(
            PLPath3::new(vec![p(1, 0, 1), p(1, 1, 1)], vec![q(0), q(0)]),
            Err(PathError::Parameters)
        );
    }

    #[test]
    fn evaluation_hits_vertices() {
        let path = PLPath3::new(vec![p(1, 0, 1), p(1, 1, 1), p(2, 1, 1)], vec![q(0), qr(1, 4), q(1)]).unwrap();
        assert_eq!(path.at(&QSqrt2::rational(qr(1, 4))), p(1, 1, 1));
        assert_eq!(path.at(&QSqrt2::one()), p(2, 1, 1));
        let mid = path.at(&QSqrt2::rational(qr(1, 8)));
        assert_eq!(mid.coord(1), &QSqrt2::new(qr(1, 2), q(1)));
    }

    #[test]
    fn text_round_trip() {
        let path = PLPath3::uniform(vec![p(1, 0, 1), p(1, 1, 1), p(2, 1, 1)]).unwrap();
        assert_eq!(parse_path(&write_path(&path)).unwrap(), path);
    }
}
