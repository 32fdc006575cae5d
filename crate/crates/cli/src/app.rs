//! Command-line surface. Exit codes: 0 all checks pass, 1 some check
//! failed, 2 bad usage or unreadable input.

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context as _, Result};
use clap::{Args, Parser, Subcommand};

use tracklab_core::standard::{build_standard_family, write_certificates, write_family, write_manifest};
use tracklab_core::track::read_track;
use tracklab_noebeling::approx::approximate_path;
use tracklab_noebeling::certify::certify_path;
use tracklab_noebeling::cover::{parse_cover, BoundingBox, CubePairCover};
use tracklab_noebeling::geom::parse_path;
use tracklab_noebeling::grid::GridComplex;

use crate::config::{HardCaps, RunConfig, Suite};
use crate::export::{diameters_csv, grid_scene, track_svg};
use crate::suites::{load_family, parse_nesting_run, read_file, run};

#[derive(Debug, Parser)]
#[command(name = "tracklab", version, about = "Exact checks on train-track partitions and Nöbeling-curve paths")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a verification suite and write its report.
    Verify(VerifyArgs),
    /// Write plot data and drawings.
    #[command(subcommand)]
    Export(ExportCommand),
    /// Rebuild the standard family and write its data files.
    BuildFamily {
        #[arg(long, default_value = "data")]
        out: PathBuf,
    },
    /// Decide whether a path file lies in the Nöbeling curve.
    Certify {
        #[arg(long)]
        path: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
    /// Partition depth; 3, or 2 for the key lemma, when absent.
    #[arg(long)]
    pub depth: Option<usize>,
    /// Number of diameters per nesting run.
    #[arg(long, default_value_t = 15)]
    pub length: usize,
    /// Largest n of the approximating paths.
    #[arg(long = "n-max", default_value_t = 10)]
    pub n_max: u32,
    /// Number of random trials of the randomized suites.
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long, default_value_t = 4)]
    pub workers: usize,
    #[arg(long, default_value = "reports")]
    pub out: PathBuf,
    /// Family file to use instead of the shipped one.
    #[arg(long)]
    pub family: Option<PathBuf>,
    /// Manifest to check the family file against.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

impl VerifyArgs {
    pub fn config(&self) -> RunConfig {
        RunConfig {
            suite: self.suite,
            depth: self.depth,
            length: self.length,
            n_max: self.n_max,
            trials: self.trials,
            seed: self.seed,
            workers: self.workers,
            out: self.out.clone(),
            family: self.family.clone(),
            manifest: self.manifest.clone(),
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum ExportCommand {
    /// Diameter series of one nesting run as CSV, from a prior
    /// `verify --suite nesting` in the same directory.
    Diameters {
        #[arg(long, default_value = "reports")]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        run: usize,
    },
    /// SVG diagram of a track file or of a family member.
    Track {
        #[arg(long, conflicts_with = "member")]
        track: Option<PathBuf>,
        #[arg(long)]
        member: Option<String>,
        #[arg(long)]
        family: Option<PathBuf>,
        #[arg(long, default_value = "reports")]
        out: PathBuf,
    },
    /// Grid scene of a cover, optionally with a path and its approximation.
    Grid {
        #[arg(long, conflicts_with = "uniform")]
        cover: Option<PathBuf>,
        /// Uniform cover of the unit cube at this level.
        #[arg(long)]
        uniform: Option<u32>,
        #[arg(long)]
        path: Option<PathBuf>,
        /// Also draw the approximation g_n of the path.
        #[arg(long, requires = "path")]
        n: Option<u32>,
        #[arg(long, default_value = "reports")]
        out: PathBuf,
    },
}

/// Marks errors that mean "input is bad" rather than "check failed".
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

fn write(path: &Path, body: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    std::fs::write(path, body).with_context(|| format!("writing {}", path.display()))
}

fn verify(args: &VerifyArgs) -> Result<bool> {
    let cfg = args.config();
    let caps = HardCaps::from_env()?;
    cfg.check(&caps)?;
    let start = Instant::now();
    let reports = run(&cfg)?;
    let mut ok = true;
    for r in &reports {
        let paths = r.write_to(&cfg.out).with_context(|| format!("writing into {}", cfg.out.display()))?;
        println!(
            "suite {}: checks={} failed={} -> {}",
            r.suite,
            r.checks.len(),
            r.failed(),
            paths[0].display()
        );
        ok &= r.passed();
    }
    eprintln!("elapsed {:.1}s", start.elapsed().as_secs_f64());
    Ok(ok)
}

fn export(cmd: &ExportCommand) -> Result<bool> {
    match cmd {
        ExportCommand::Diameters { out, run } => {
            let text = read_file(&out.join("nesting.runs"))?;
            let d = parse_nesting_run(&text, *run)?;
            let p = out.join(format!("diameters_run{run}.csv"));
            write(&p, &diameters_csv(&d))?;
            println!("{} values -> {}", d.len(), p.display());
        }
        ExportCommand::Track {
            track,
            member,
            family,
            out,
        } => {
            let (name, t) = match (track, member) {
                (Some(p), _) => {
                    let t = read_track(&read_file(p)?).map_err(|e| UsageError(format!("{}: {e}", p.display())))?;
                    let stem = p.file_stem().and_then(|s| s.to_str()).unwrap_or("track").to_string();
                    (stem, t)
                }
                (None, Some(label)) => {
                    let cfg = RunConfig {
                        family: family.clone(),
                        ..RunConfig::default()
                    };
                    let f = load_family(&cfg)?;
                    let t = f
                        .complete
                        .iter()
                        .map(|m| (&m.label, &m.track))
                        .chain(f.nearly.iter().map(|m| (&m.label, &m.track)))
                        .find(|(l, _)| *l == label)
                        .map(|(_, t)| t.clone())
                        .ok_or_else(|| UsageError(format!("no member {label}")))?;
                    (label.clone(), t)
                }
                (None, None) => bail!(UsageError("give --track or --member".into())),
            };
            let p = out.join(format!("{name}.svg"));
            write(&p, &track_svg(&t, &name))?;
            println!(
                "{} switches, {} branches -> {}",
                t.switch_count(),
                t.branch_count(),
                p.display()
            );
        }
        ExportCommand::Grid {
            cover,
            uniform,
            path,
            n,
            out,
        } => {
            let cover = match (cover, uniform) {
                (Some(p), _) => parse_cover(&read_file(p)?).map_err(|e| UsageError(format!("{}: {e}", p.display())))?,
                (None, Some(m)) => CubePairCover::uniform(*m, BoundingBox::unit()),
                (None, None) => bail!(UsageError("give --cover or --uniform".into())),
            };
            let grid = GridComplex::of_cover(&cover).map_err(|e| UsageError(e.to_string()))?;
            let mut paths = Vec::new();
            if let Some(p) = path {
                paths.push(("f".to_string(), parse_path(&read_file(p)?).map_err(|e| UsageError(e.to_string()))?));
            }
            if let (Some(n), Some((_, f))) = (n, paths.first()) {
                let g = approximate_path(f, &cover, *n)?;
                paths.push((format!("g{n}"), g.path));
            }
            let refs: Vec<_> = paths.iter().map(|(k, p)| (k.clone(), p)).collect();
            let p = out.join("grid.scene");
            write(&p, &grid_scene(&cover, &grid, &refs))?;
            println!("{} edges -> {}", grid.edges().len(), p.display());
        }
    }
    Ok(true)
}

fn build_family(out: &Path) -> Result<bool> {
    let f = build_standard_family();
    write(&out.join("standard_s05.family"), &write_family(&f))?;
    write(&out.join("standard_s05.manifest"), &write_manifest(&f))?;
    write(&out.join("standard_s05.certificates"), &write_certificates(&f))?;
    println!(
        "{} complete and {} nearly complete members -> {}",
        f.complete.len(),
        f.nearly.len(),
        out.display()
    );
    Ok(true)
}

fn certify(path: &Path) -> Result<bool> {
    let p = parse_path(&read_file(path)?).map_err(|e| UsageError(e.to_string()))?;
    let c = certify_path(&p);
    match &c.witness {
        None => println!("certified segments={}", p.segment_count()),
        Some(w) => println!("rejected {w}"),
    }
    Ok(c.certified)
}

/// Runs a parsed command: `Ok(true)` when everything passed.
pub fn execute(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Verify(a) => verify(a),
        Command::Export(e) => export(e),
        Command::BuildFamily { out } => build_family(out),
        Command::Certify { path } => certify(path),
    }
}

/// Parses arguments, runs, and maps the outcome to an exit code.
pub fn main_with<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e:#}");
            2
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use tracklab_core::standard::{SHIPPED_FAMILY, SHIPPED_MANIFEST};
    use tracklab_noebeling::cover::write_cover;

    fn code(args: &[&str]) -> Option<i32> {
        Some(i32::from(main_with(std::iter::once("tracklab").chain(args.iter().copied()))))
    }

    fn scratch(name: &str) -> PathBuf {
        let d = std::env::temp_dir().join(format!("tracklab-app-{}-{name}", std::process::id()));
        let _ = std::fs::remove_dir_all(&d);
        std::fs::create_dir_all(&d).unwrap();
        d
    }

    fn s(p: &Path) -> &str {
        p.to_str().unwrap()
    }

    /// Track file of the three-branch theta track on the thrice-punctured
    /// sphere, for drawing tests and examples.
    fn theta_track_file() -> String {
        use tracklab_core::{BranchEnd, Surface, TrainTrack};
        let e = BranchEnd::new;
        let t = TrainTrack::new(
            Surface::sphere(3),
            3,
            vec![[e(0, 0), e(1, 0), e(2, 0)], [e(0, 1), e(2, 1), e(1, 1)]],
            vec![1, 1, 1],
        )
        .expect("theta track is valid");
        tracklab_core::track::write_track(&t)
    }

    #[test]
    fn census_on_the_shipped_family_passes() {
        let out = scratch("census");
        let o = code(&["verify", "--suite", "census", "--depth", "1", "--out", s(&out)]);
        assert_eq!(o, Some(0));
        let report = std::fs::read_to_string(out.join("census.report")).unwrap();
        assert!(report.contains("seed=7"));
        assert!(report.ends_with("failed=0\n"));
    }

    #[test]
    fn key_lemma_at_depth_two_passes() {
        let out = scratch("lemma");
        let o = code(&["verify", "--suite", "key-lemma", "--depth", "2", "--out", s(&out)]);
        assert_eq!(o, Some(0));
    }

    #[test]
    fn corrupted_family_is_an_input_error() {
        let out = scratch("corrupt");
        let fam = out.join("broken.family");
        // drop one switch line of the first member
        let text: Vec<&str> = SHIPPED_FAMILY.lines().collect();
        let k = text.iter().position(|l| l.starts_with("switch ")).unwrap();
        let broken: Vec<&str> = text.iter().enumerate().filter(|(i, _)| *i != k).map(|(_, l)| *l).collect();
        std::fs::write(&fam, broken.join("\n")).unwrap();
        let o = code(&["verify", "--suite", "census", "--family", s(&fam), "--out", s(&out)]);
        assert_eq!(o, Some(2));
        // an intact family with a tampered manifest is refused as well
        let good = out.join("good.family");
        let manifest = out.join("bad.manifest");
        std::fs::write(&good, SHIPPED_FAMILY).unwrap();
        std::fs::write(&manifest, SHIPPED_MANIFEST.replacen("complete 26", "complete 27", 1)).unwrap();
        let o = code(&[
            "verify", "--suite", "census", "--depth", "0", "--family", s(&good), "--manifest", s(&manifest), "--out", s(&out),
        ]);
        assert_eq!(o, Some(2));
        let o = code(&["verify", "--suite", "census", "--depth", "0", "--family", s(&good), "--out", s(&out)]);
        assert_eq!(o, Some(0));
    }

    #[test]
    fn usage_errors_and_caps() {
        assert_eq!(code(&["verify"]), Some(2));
        assert_eq!(code(&["verify", "--suite", "everything"]), Some(2));
        assert_eq!(code(&["--help"]), Some(0));
        let out = scratch("caps");
        let o = code(&["verify", "--suite", "census", "--depth", "9", "--out", s(&out)]);
        assert_eq!(o, Some(2));
    }

    #[test]
    fn failing_checks_exit_with_one() {
        // a single full split cannot shrink a diameter a hundredfold
        let out = scratch("nesting");
        let o = code(&["verify", "--suite", "nesting", "--trials", "3", "--length", "2", "--out", s(&out)]);
        assert_eq!(o, Some(1));
    }

    #[test]
    fn diameters_export_needs_a_prior_run() {
        let out = scratch("diam");
        assert_eq!(code(&["export", "diameters", "--out", s(&out)]), Some(2));
        let o = code(&["verify", "--suite", "nesting", "--trials", "4", "--length", "15", "--out", s(&out)]);
        assert!(o.is_some_and(|c| c <= 1));
        let o = code(&["export", "diameters", "--out", s(&out), "--run", "0"]);
        assert_eq!(o, Some(0));
        let csv = std::fs::read_to_string(out.join("diameters_run0.csv")).unwrap();
        let values: Vec<f64> = csv
            .lines()
            .skip(1)
            .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
            .collect();
        assert_eq!(values.len(), 15);
        assert!(values.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(code(&["export", "diameters", "--out", s(&out), "--run", "99"]), Some(2));
    }

    #[test]
    fn theta_diagram_has_two_switches_and_three_branches() {
        let out = scratch("theta");
        let file = out.join("theta.track");
        std::fs::write(&file, theta_track_file()).unwrap();
        let o = code(&["export", "track", "--track", s(&file), "--out", s(&out)]);
        assert_eq!(o, Some(0));
        let svg = std::fs::read_to_string(out.join("theta.svg")).unwrap();
        assert_eq!(svg.matches(r#"class="switch""#).count(), 2);
        assert_eq!(svg.matches(r#"class="branch""#).count(), 3);
        let o = code(&["export", "track", "--member", "T0", "--out", s(&out)]);
        assert_eq!(o, Some(0));
        let svg = std::fs::read_to_string(out.join("T0.svg")).unwrap();
        assert_eq!(svg.matches(r#"class="branch""#).count(), 12);
        assert_eq!(code(&["export", "track", "--member", "T99", "--out", s(&out)]), Some(2));
    }

    #[test]
    fn grid_scene_edge_count_matches_the_lattice_formula() {
        let out = scratch("grid");
        for m in 0..3u32 {
            let cover = out.join(format!("u{m}.cover"));
            std::fs::write(&cover, write_cover(&CubePairCover::uniform(m, BoundingBox::unit()))).unwrap();
            let o = code(&["export", "grid", "--cover", s(&cover), "--out", s(&out)]);
            assert_eq!(o, Some(0));
            let scene = std::fs::read_to_string(out.join("grid.scene")).unwrap();
            let k = (1usize << m) + 1;
            let edges = scene.lines().filter(|l| l.starts_with("edge ")).count();
            assert_eq!(edges, 3 * k * k * (k - 1));
        }
        assert_eq!(code(&["export", "grid", "--cover", "/nonexistent", "--out", s(&out)]), Some(2));
    }

    #[test]
    fn grid_scene_with_a_path_and_its_approximation() {
        let out = scratch("gridpath");
        let path = out.join("f.path");
        std::fs::write(
            &path,
            "tracklab-path v1\nvertex 0 (1/8,1/100) (1/8,1/100) (1/8,1/100)\nvertex 1 (3/4,1/100) (1/8,1/100) (1/8,1/100)\nend\n",
        )
        .unwrap();
        let o = code(&["certify", "--path", s(&path)]);
        assert_eq!(o, Some(0));
        let o = code(&["export", "grid", "--uniform", "1", "--path", s(&path), "--n", "3", "--out", s(&out)]);
        assert_eq!(o, Some(0));
        let scene = std::fs::read_to_string(out.join("grid.scene")).unwrap();
        assert!(scene.contains("path f vertices 2"));
        assert!(scene.contains("path g3 vertices"));
    }

    #[test]
    fn build_family_reproduces_the_shipped_files() {
        let out = scratch("family");
        let o = code(&["build-family", "--out", s(&out)]);
        assert_eq!(o, Some(0));
        assert_eq!(std::fs::read_to_string(out.join("standard_s05.family")).unwrap(), SHIPPED_FAMILY);
        assert_eq!(std::fs::read_to_string(out.join("standard_s05.manifest")).unwrap(), SHIPPED_MANIFEST);
        assert!(out.join("standard_s05.certificates").exists());
    }
}
