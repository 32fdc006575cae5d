//! Plot data and drawings: diameter series, track diagrams, grid scenes.

use std::f64::consts::TAU;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use tracklab_core::linalg::{fmt_q, Q};
use tracklab_core::track::Slot;
use tracklab_core::{classify_branches, TrainTrack};
use tracklab_noebeling::cover::CubePairCover;
use tracklab_noebeling::geom::PLPath3;
use tracklab_noebeling::grid::{cell_dim, closure, GridComplex};
use tracklab_noebeling::qsqrt2::fmt_q as fmt_q2;

/// `step,diameter,diameter_exact` rows.
pub fn diameters_csv(diameters: &[Q]) -> String {
    let mut s = String::from("step,diameter,diameter_exact\n");
    for (k, d) in diameters.iter().enumerate() {
        let x = d.to_f64().unwrap_or(f64::NAN);
        writeln!(s, "{k},{x:.9e},{}", fmt_q(d)).unwrap();
    }
    s
}

fn slot_point(centre: (f64, f64), angle: f64, slot: Slot) -> ((f64, f64), (f64, f64)) {
    let radial = (angle.cos(), angle.sin());
    let tangent = (-angle.sin(), angle.cos());
    // large slot on one side of the switch, the two small ones on the other
    let (along, across, out) = match slot {
        Slot::Large => (-14.0, 0.0, -1.0),
        Slot::SmallLeft => (14.0, 7.0, 1.0),
        Slot::SmallRight => (14.0, -7.0, 1.0),
    };
    let p = (
        centre.0 + along * tangent.0 + across * radial.0,
        centre.1 + along * tangent.1 + across * radial.1,
    );
    (p, (out * tangent.0, out * tangent.1))
}

/// Switches on a circle, branches as cubic curves leaving each switch in
/// the direction of its slot. One `class="switch"` element per switch and
/// one `class="branch"` element per branch.
pub fn track_svg(t: &TrainTrack, title: &str) -> String {
    let n = t.switch_count();
    let pos = t.positions();
    let large = classify_branches(t).large_branches();
    let centre = |s: usize| {
        let a = TAU * s as f64 / n as f64;
        ((300.0 + 200.0 * a.cos(), 300.0 + 200.0 * a.sin()), a)
    };
    let mut s = String::new();
    writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="600" height="600" viewBox="0 0 600 600">"#).unwrap();
    writeln!(s, "<title>{title}</title>").unwrap();
    for b in 0..t.branch_count() {
        let ends: Vec<_> = (0..2)
            .map(|e| {
                let r = pos[2 * b + e];
                let (c, a) = centre(r.switch);
                slot_point(c, a, r.slot)
            })
            .collect();
        let ((x0, y0), (dx0, dy0)) = ends[0];
        let ((x1, y1), (dx1, dy1)) = ends[1];
        let k = 90.0;
        let kind = if large.contains(&b) { "large" } else { "other" };
        writeln!(
            s,
            r#"<path class="branch" data-branch="{b}" data-kind="{kind}" fill="none" stroke="black" d="M {x0:.2} {y0:.2} C {:.2} {:.2} {:.2} {:.2} {x1:.2} {y1:.2}"/>"#,
            x0 + k * dx0,
            y0 + k * dy0,
            x1 + k * dx1,
            y1 + k * dy1
        )
        .unwrap();
        let (mx, my) = ((x0 + x1 + k * (dx0 + dx1)) / 2.0, (y0 + y1 + k * (dy0 + dy1)) / 2.0);
        writeln!(s, r#"<text class="label" x="{mx:.2}" y="{my:.2}">{b}</text>"#).unwrap();
    }
    for sw in 0..n {
        let (c, a) = centre(sw);
        let (p, _) = slot_point(c, a, Slot::Large);
        let (q, _) = slot_point(c, a, Slot::SmallLeft);
        writeln!(
            s,
            r#"<line class="tangent" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="gray"/>"#,
            p.0, p.1, q.0, q.1
        )
        .unwrap();
        writeln!(
            s,
            r#"<circle class="switch" data-switch="{sw}" cx="{:.2}" cy="{:.2}" r="4"/>"#,
            c.0, c.1
        )
        .unwrap();
    }
    s.push_str("</svg>\n");
    s
}

pub const SCENE_HEADER: &str = "tracklab-scene v1";

fn fmt3(p: &[Q; 3]) -> String {
    p.iter().map(fmt_q2).collect::<Vec<_>>().join(" ")
}

/// Γ as explicit cells: every edge, square and solid cube with exact
/// rational corners, followed by the given paths.
pub fn grid_scene(cover: &CubePairCover, grid: &GridComplex, paths: &[(String, &PLPath3)]) -> String {
    let mut s = String::new();
    let b = &grid.bounds;
    writeln!(s, "{SCENE_HEADER}").unwrap();
    writeln!(s, "pairs {}", cover.pairs().len()).unwrap();
    writeln!(s, "fine-level {}", grid.level).unwrap();
    writeln!(
        s,
        "bounds {} {} {} {} {} {}",
        b.lo[0], b.lo[1], b.lo[2], b.hi[0], b.hi[1], b.hi[2]
    )
    .unwrap();
    let [v, e, f, c] = grid.counts();
    writeln!(s, "counts vertices {v} edges {e} squares {f} cubes {c}").unwrap();
    for (a, z) in grid.edges() {
        writeln!(s, "edge {} {}", fmt3(&a), fmt3(&z)).unwrap();
    }
    let h = Q::new(BigInt::from(1), BigInt::from(1) << grid.level);
    for x in grid.cells() {
        let d = cell_dim(&x);
        if d < 2 {
            continue;
        }
        let bx = closure(&x);
        let lo: [Q; 3] = std::array::from_fn(|i| Q::from_integer(bx.lo[i].into()) * &h);
        let hi: [Q; 3] = std::array::from_fn(|i| Q::from_integer(bx.hi[i].into()) * &h);
        let kind = if d == 2 { "square" } else { "solid" };
        writeln!(s, "{kind} {} {}", fmt3(&lo), fmt3(&hi)).unwrap();
    }
    for (name, p) in paths {
        writeln!(s, "path {name} vertices {}", p.vertices().len()).unwrap();
        for (t, v) in p.params().iter().zip(p.vertices()) {
            let approx: Vec<String> = v.0.iter().map(|c| format!("{:.9}", c.to_f64())).collect();
            writeln!(s, "vertex t {} exact {} {} {} approx {}", fmt_q2(t), v.0[0], v.0[1], v.0[2], approx.join(" ")).unwrap();
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use tracklab_core::linalg::q;
    use tracklab_noebeling::cover::BoundingBox;

    #[test]
    fn csv_has_one_row_per_value() {
        let csv = diameters_csv(&[q(2), Q::new(1.into(), 3.into())]);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[2].starts_with("1,3.333333333e-1,1/3"));
    }

    #[test]
    fn uniform_scene_lists_the_lattice() {
        let cover = CubePairCover::uniform(1, BoundingBox::unit());
        let grid = GridComplex::of_cover(&cover).unwrap();
        let s = grid_scene(&cover, &grid, &[]);
        assert_eq!(s.lines().filter(|l| l.starts_with("edge ")).count(), 54);
        assert_eq!(s.lines().filter(|l| l.starts_with("square ")).count(), 0);
    }
}
