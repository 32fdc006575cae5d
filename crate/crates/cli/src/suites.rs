//! The verification suites. Random inputs are drawn sequentially from the
//! seed, the checks then run on the worker pool and are collected in input
//! order, so reports do not depend on the number of workers.

use std::collections::BTreeMap;
use std::path::Path;

use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use tracklab_core::classify::{check_complete_skeleton, check_nearly_complete_subtracks, TrackClass};
use tracklab_core::linalg::{fmt_q, q, Q};
use tracklab_core::measures::extreme_rays;
use tracklab_core::oracle::support_rays;
use tracklab_core::partition::{
    generate_partition_sequence, verify_partition_properties, Caps, Member, PartitionError,
    PartitionSequence, Property,
};
use tracklab_core::region_census;
use tracklab_core::sample::{random_measure, random_recurrent_track};
use tracklab_core::split::{nesting_diameters, verify_split_identity, NestingRun};
use tracklab_core::standard::{load_standard_family, shipped_family, standard_partition, FamilyError, StandardTrackFamily};
use tracklab_noebeling::approx::{approximate_path, check_approximation};
use tracklab_noebeling::certify::{certify_path, refute_segment};
use tracklab_noebeling::claims::{boundary_grid_report, check_square_loops};
use tracklab_noebeling::cover::{BoundingBox, CubePairCover};
use tracklab_noebeling::finiteness::{approx_distance, local_finiteness_report};
use tracklab_noebeling::geom::PLPath3;
use tracklab_noebeling::grid::GridComplex;
use tracklab_noebeling::qsqrt2::QSqrt2;
use tracklab_noebeling::sample::{
    random_admissible_cover, random_certified_path, random_off_grid_samples, random_refinement,
    random_segment, SegmentKind,
};

use crate::config::{RunConfig, Suite};
use crate::report::{Check, Report};

/// Errors in the inputs of a run, as opposed to failed checks.
#[derive(Debug, Error)]
pub enum SuiteError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("family: {0}")]
    Family(#[from] FamilyError),
    #[error("partition: {0}")]
    Partition(#[from] PartitionError),
    #[error("worker pool: {0}")]
    Pool(String),
    #[error("{0}")]
    Input(String),
}

pub fn read_file(path: &Path) -> Result<String, SuiteError> {
    std::fs::read_to_string(path).map_err(|source| SuiteError::Read {
        path: path.display().to_string(),
        source,
    })
}

pub fn load_family(cfg: &RunConfig) -> Result<StandardTrackFamily, SuiteError> {
    match &cfg.family {
        None => Ok(shipped_family()?),
        Some(p) => {
            let text = read_file(p)?;
            let manifest = cfg.manifest.as_deref().map(read_file).transpose()?;
            Ok(load_standard_family(&text, manifest.as_deref())?)
        }
    }
}

/// Family and partition sequence shared by the suites of one run.
pub struct Context {
    pub family: StandardTrackFamily,
    seq: Option<PartitionSequence>,
}

impl Context {
    pub fn new(family: StandardTrackFamily) -> Self {
        Context { family, seq: None }
    }

    /// The partition sequence through `depth`, generated once at the
    /// largest depth asked for.
    pub fn sequence(&mut self, depth: usize) -> Result<PartitionSequence, SuiteError> {
        let stale = match &self.seq {
            None => true,
            Some(s) => s.partitions.len() - 1 < depth && s.truncated.is_none(),
        };
        if stale {
            let p0 = standard_partition(&self.family)?;
            self.seq = Some(generate_partition_sequence(&p0, Caps { depth, members: 100_000 })?);
        }
        let seq = self.seq.as_ref().expect("generated above");
        let d = depth.min(seq.partitions.len() - 1);
        Ok(PartitionSequence {
            partitions: seq.partitions[..=d].to_vec(),
            moves: seq.moves[..d].to_vec(),
            truncated: seq.truncated.clone(),
        })
    }
}

fn truncation_check(r: &mut Report, seq: &PartitionSequence, depth: usize) {
    let reached = seq.partitions.len() - 1;
    let detail = match &seq.truncated {
        Some(why) => format!("reached={reached} truncated: {why}"),
        None => format!("reached={reached}"),
    };
    r.push(Check::new("generation", "partition.generated-depth", reached >= depth, detail));
}

pub fn run_pool<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T, SuiteError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| SuiteError::Pool(e.to_string()))?;
    Ok(pool.install(f))
}

/// Runs one suite (not `All`) on the worker pool.
pub fn run_suite(suite: Suite, cfg: &RunConfig, ctx: &mut Context) -> Result<Report, SuiteError> {
    let depth = cfg.depth_for(suite);
    let seq = match suite {
        Suite::Census | Suite::KeyLemma | Suite::ConeIdentity | Suite::Partition => Some(ctx.sequence(depth)?),
        _ => None,
    };
    let family = &ctx.family;
    run_pool(cfg.workers, || match suite {
        Suite::Census => Ok(census(cfg, family, seq.as_ref().expect("sequence"))),
        Suite::KeyLemma => Ok(key_lemma(cfg, seq.as_ref().expect("sequence"))),
        Suite::ConeIdentity => Ok(cone_identity(cfg, seq.as_ref().expect("sequence"))),
        Suite::Partition => Ok(partition(cfg, seq.as_ref().expect("sequence"))),
        Suite::Nesting => nesting(cfg, family),
        Suite::Oracle => Ok(oracle(cfg)),
        Suite::Noebeling => Ok(noebeling(cfg)),
        Suite::Claims => Ok(claims(cfg)),
        Suite::All => Err(SuiteError::Input("`all` is not a single suite".into())),
    })?
}

/// Runs the configured suite, or every suite for `All`.
pub fn run(cfg: &RunConfig) -> Result<Vec<Report>, SuiteError> {
    let mut ctx = Context::new(load_family(cfg)?);
    let suites: Vec<Suite> = if cfg.suite == Suite::All {
        Suite::EACH.to_vec()
    } else {
        vec![cfg.suite]
    };
    suites.into_iter().map(|s| run_suite(s, cfg, &mut ctx)).collect()
}

fn members_through(seq: &PartitionSequence) -> Vec<(usize, &Member)> {
    seq.partitions
        .iter()
        .enumerate()
        .flat_map(|(k, p)| p.members().map(move |m| (k, m)))
        .collect()
}

// ---------------------------------------------------------------------------
// Census

pub const ANCHOR_CENSUS_COMPLETE: &str = "census.complete.five-punctured-monogons-one-triangle";
pub const ANCHOR_CENSUS_NEARLY: &str = "census.nearly-complete.four-punctured-monogons-one-punctured-bigon";

fn census_check(id: String, class: TrackClass, t: &tracklab_core::TrainTrack) -> Check {
    let c = region_census(t);
    let (anchor, ok) = match class {
        TrackClass::Complete => (ANCHOR_CENSUS_COMPLETE, c.is_complete_pattern()),
        TrackClass::NearlyComplete => (ANCHOR_CENSUS_NEARLY, c.is_nearly_complete_pattern()),
        TrackClass::Other => ("census.unexpected-class", false),
    };
    Check::new(id, anchor, ok, format!("class={class} regions=[{}]", c.summary()))
}

pub fn census(cfg: &RunConfig, family: &StandardTrackFamily, seq: &PartitionSequence) -> Report {
    let mut r = Report::new(Suite::Census, cfg);
    truncation_check(&mut r, seq, cfg.depth_for(Suite::Census));
    for m in &family.complete {
        r.push(census_check(format!("family.{}", m.label), TrackClass::Complete, &m.track));
    }
    for m in &family.nearly {
        r.push(census_check(format!("family.{}", m.label), TrackClass::NearlyComplete, &m.track));
    }
    let members = members_through(seq);
    let checks: Vec<Check> = members
        .par_iter()
        .map(|(k, m)| census_check(format!("depth{k}.{}", m.label()), m.class, &m.track))
        .collect();
    r.checks.extend(checks);
    r
}

// ---------------------------------------------------------------------------
// Key lemma

pub const ANCHOR_LEMMA_NEARLY: &str = "key-lemma.nearly-complete.proper-subtracks-not-filling";
pub const ANCHOR_LEMMA_COMPLETE: &str = "key-lemma.complete.boundary-skeleton-subtracks-not-filling";

/// Members are grouped by canonical form, since filling is invariant under
/// ribbon isomorphism; each group is checked once.
pub fn key_lemma(cfg: &RunConfig, seq: &PartitionSequence) -> Report {
    let mut r = Report::new(Suite::KeyLemma, cfg);
    truncation_check(&mut r, seq, cfg.depth_for(Suite::KeyLemma));
    let mut groups: BTreeMap<(TrackClass, String), (String, usize, &Member)> = BTreeMap::new();
    for (k, m) in members_through(seq) {
        groups
            .entry((m.class, m.canonical.0.clone()))
            .and_modify(|g| g.1 += 1)
            .or_insert((format!("depth{k}.{}", m.label()), 1, m));
    }
    let groups: Vec<_> = groups.into_iter().collect();
    let results: Vec<(Check, Option<(usize, usize, bool)>)> = groups
        .par_iter()
        .map(|((class, _), (label, count, m))| match class {
            TrackClass::NearlyComplete => {
                let c = match check_nearly_complete_subtracks(&m.track) {
                    Ok(rep) => Check::new(
                        label.clone(),
                        ANCHOR_LEMMA_NEARLY,
                        rep.holds(),
                        format!("members={count} subtracks={} filling={:?}", rep.checked, rep.filling),
                    ),
                    Err(e) => Check::new(label.clone(), ANCHOR_LEMMA_NEARLY, false, format!("error: {e}")),
                };
                (c, None)
            }
            TrackClass::Complete => match check_complete_skeleton(&m.track) {
                Ok(rep) => {
                    let facet = rep.two_erased_filling.iter().all(|(_, d)| *d == 3);
                    let c = Check::new(
                        label.clone(),
                        ANCHOR_LEMMA_COMPLETE,
                        rep.holds(),
                        format!(
                            "members={count} skeleton-subtracks={} filling={:?} two-erased={} two-erased-filling={}",
                            rep.checked,
                            rep.filling,
                            rep.two_erased_checked,
                            rep.two_erased_filling.len()
                        ),
                    );
                    (c, Some((rep.two_erased_checked, rep.two_erased_filling.len(), facet)))
                }
                Err(e) => (Check::new(label.clone(), ANCHOR_LEMMA_COMPLETE, false, format!("error: {e}")), None),
            },
            TrackClass::Other => (Check::new(label.clone(), "key-lemma.unexpected-class", false, ""), None),
        })
        .collect();
    let (mut two, mut two_fill, mut all_facets) = (0, 0, true);
    for (c, diag) in results {
        if let Some((a, b, f)) = diag {
            two += a;
            two_fill += b;
            all_facets &= f;
        }
        r.push(c);
    }
    r.note(format!(
        "recurrent subtracks of complete tracks erasing at least two branches: {two}, of which filling: {two_fill}, all spanning a facet: {all_facets}"
    ));
    r
}

// ---------------------------------------------------------------------------
// Cone identity

pub const ANCHOR_CONE_IDENTITY: &str = "split.cone-union-and-common-face";

pub fn cone_identity(cfg: &RunConfig, seq: &PartitionSequence) -> Report {
    let mut r = Report::new(Suite::ConeIdentity, cfg);
    truncation_check(&mut r, seq, cfg.depth_for(Suite::ConeIdentity));
    let moves: Vec<(usize, &tracklab_core::partition::MoveRecord)> = seq
        .moves
        .iter()
        .enumerate()
        .flat_map(|(k, ms)| ms.iter().map(move |m| (k, m)))
        .collect();
    let checks: Vec<Check> = moves
        .par_iter()
        .enumerate()
        .map(|(i, (k, m))| {
            let id = format!("split{i}.depth{k}.{}.b{}", m.target, m.branch);
            match verify_split_identity(&m.parent, m.branch) {
                Ok(rep) => Check::new(
                    id,
                    ANCHOR_CONE_IDENTITY,
                    rep.holds() && rep.intersection_equal == Some(true),
                    format!(
                        "inside={} union={} intersection={}",
                        rep.images_inside,
                        rep.union_equal,
                        rep.intersection_equal.map_or("unchecked".to_string(), |b| b.to_string())
                    ),
                ),
                Err(e) => Check::new(id, ANCHOR_CONE_IDENTITY, false, format!("error: {e}")),
            }
        })
        .collect();
    r.checks.extend(checks);
    r
}

// ---------------------------------------------------------------------------
// Partition properties

pub fn property_anchor(p: Property) -> &'static str {
    match p {
        Property::Classification => "partition.classification",
        Property::Disjointness => "partition.disjointness",
        Property::Subdivision => "partition.subdivision",
        Property::Adjacency => "partition.adjacency",
        Property::FullSplits => "partition.full-splits",
    }
}

pub fn partition(cfg: &RunConfig, seq: &PartitionSequence) -> Report {
    let mut r = Report::new(Suite::Partition, cfg);
    truncation_check(&mut r, seq, cfg.depth_for(Suite::Partition));
    for (k, p) in seq.partitions.iter().enumerate() {
        r.note(format!("depth {k}: complete={} nearly-complete={}", p.complete.len(), p.nearly.len()));
    }
    let rep = verify_partition_properties(seq);
    for p in [
        Property::Classification,
        Property::Disjointness,
        Property::Subdivision,
        Property::Adjacency,
        Property::FullSplits,
    ] {
        let bad = rep.violations.iter().filter(|v| v.property == p).count();
        r.push(Check::new(
            p.to_string(),
            property_anchor(p),
            bad == 0,
            format!("checks={} violations={bad}", rep.count(p)),
        ));
    }
    for v in rep.violations.iter().take(50) {
        r.note(v.to_string());
    }
    r.note(format!("nearly complete members on a chart boundary: {}", rep.chart_boundary_sigmas));
    for a in seq.partitions.first().map(|p| p.assumptions.as_slice()).unwrap_or(&[]) {
        r.note(format!("assumption: {a}"));
    }
    r
}

// ---------------------------------------------------------------------------
// Nesting

pub const ANCHOR_NESTING_MONOTONE: &str = "nesting.diameters-nonincreasing";
pub const ANCHOR_NESTING_DECAY: &str = "nesting.final-below-one-percent-of-initial";
pub const NESTING_HEADER: &str = "tracklab-nesting v1";
/// Coefficients of the extreme rays are drawn from `1..MEASURE_BOUND`.
pub const MEASURE_BOUND: i64 = 1_000_000_000;

fn ratio(run: &NestingRun) -> f64 {
    let first = run.diameters.first().expect("at least one diameter");
    let last = run.diameters.last().expect("at least one diameter");
    (last / first).to_f64().unwrap_or(f64::NAN)
}

pub fn nesting(cfg: &RunConfig, family: &StandardTrackFamily) -> Result<Report, SuiteError> {
    let mut r = Report::new(Suite::Nesting, cfg);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut inputs = Vec::new();
    for _ in 0..cfg.trials_for(Suite::Nesting) {
        let i = rng.gen_range(0..family.complete.len());
        let w = random_measure(&mut rng, &family.complete[i].track, MEASURE_BOUND)
            .ok_or_else(|| SuiteError::Input(format!("no measure on {}", family.complete[i].label)))?;
        inputs.push((i, w));
    }
    let runs: Vec<_> = inputs
        .par_iter()
        .map(|(i, w)| nesting_diameters(&family.complete[*i].track, w, cfg.length))
        .collect();
    let mut artifact = format!("{NESTING_HEADER}\nlength {}\n", cfg.length);
    let mut ratios = Vec::new();
    for (k, ((i, _), run)) in inputs.iter().zip(runs).enumerate() {
        let label = &family.complete[*i].label;
        let run = match run {
            Ok(run) => run,
            Err(e) => {
                r.push(Check::new(format!("run{k}"), ANCHOR_NESTING_MONOTONE, false, format!("error: {e}")));
                continue;
            }
        };
        let diams: Vec<String> = run.diameters.iter().map(fmt_q).collect();
        let degenerate = run.degenerate_at.map_or("none".to_string(), |(s, b)| format!("step{s}:b{b}"));
        artifact.push_str(&format!("run {k} member {label} degenerate {degenerate} diameters {}\n", diams.join(",")));
        if run.degenerate_at.is_some() {
            r.note(format!("run{k} excluded: degenerate split at {degenerate}"));
            continue;
        }
        let monotone = run.diameters.windows(2).all(|w| w[1] <= w[0]);
        r.push(Check::new(
            format!("run{k}.{label}"),
            ANCHOR_NESTING_MONOTONE,
            monotone,
            format!("steps={}", run.diameters.len()),
        ));
        let first = &run.diameters[0];
        let last = run.diameters.last().expect("non-empty");
        let x = ratio(&run);
        ratios.push(x);
        r.push(Check::new(
            format!("run{k}.{label}"),
            ANCHOR_NESTING_DECAY,
            run.diameters.len() == cfg.length && last * q(100) < *first,
            format!("ratio={x:.6e}"),
        ));
    }
    if !ratios.is_empty() {
        ratios.sort_by(f64::total_cmp);
        let below = ratios.iter().filter(|x| **x < 1e-2).count();
        r.note(format!(
            "final/initial ratio: median={:.6e} worst={:.6e} below-1e-2={below}/{}",
            ratios[ratios.len() / 2],
            ratios[ratios.len() - 1],
            ratios.len()
        ));
    }
    r.artifacts.push(("nesting.runs".to_string(), artifact));
    Ok(r)
}

/// Exact diameters of run `k` from a `nesting.runs` artifact.
pub fn parse_nesting_run(text: &str, k: usize) -> Result<Vec<Q>, SuiteError> {
    let mut lines = text.lines();
    if lines.next() != Some(NESTING_HEADER) {
        return Err(SuiteError::Input("not a nesting run file".into()));
    }
    let key = format!("run {k} ");
    let line = lines
        .find(|l| l.starts_with(&key))
        .ok_or_else(|| SuiteError::Input(format!("no run {k}")))?;
    let list = line
        .split_once(" diameters ")
        .ok_or_else(|| SuiteError::Input(format!("run {k}: no diameters")))?
        .1;
    list.split(',')
        .map(|s| tracklab_core::linalg::parse_q(s).ok_or_else(|| SuiteError::Input(format!("bad value {s}"))))
        .collect()
}

// ---------------------------------------------------------------------------
// Oracles

pub const ANCHOR_ORACLE_RAYS: &str = "oracle.extreme-rays-match-support-enumeration";
pub const ANCHOR_ORACLE_SEGMENTS: &str = "oracle.certifier-finds-every-sampled-violation";
/// Sample count of the rational refuter, `t = k / SAMPLES`.
pub const REFUTER_SAMPLES: u32 = 10_000;

pub fn oracle(cfg: &RunConfig) -> Report {
    let mut r = Report::new(Suite::Oracle, cfg);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let tracks: Vec<_> = (0..cfg.trials_for(Suite::Oracle))
        .map(|_| {
            let n = 2 * rng.gen_range(1..=4);
            random_recurrent_track(&mut rng, n)
        })
        .collect();
    let checks: Vec<Check> = tracks
        .par_iter()
        .enumerate()
        .map(|(i, t)| {
            let id = format!("track{i}.e{}", t.branch_count());
            match extreme_rays(t) {
                Ok(rays) => {
                    let brute = support_rays(t);
                    Check::new(
                        id,
                        ANCHOR_ORACLE_RAYS,
                        t.branch_count() <= 12 && rays == brute,
                        format!("rays={} brute={}", rays.len(), brute.len()),
                    )
                }
                Err(e) => Check::new(id, ANCHOR_ORACLE_RAYS, false, format!("error: {e}")),
            }
        })
        .collect();
    r.checks.extend(checks);

    let kinds = [
        (SegmentKind::Planted, "planted"),
        (SegmentKind::Generic, "generic"),
        (SegmentKind::Constant, "constant-coordinate"),
        (SegmentKind::Proportional, "proportional"),
    ];
    let total = 100 * cfg.trials_for(Suite::Oracle);
    let segments: Vec<_> = (0..total)
        .map(|i| random_segment(&mut rng, kinds[i % 4].0, REFUTER_SAMPLES))
        .collect();
    // (refuted, rejected, missed, bad witness)
    let outcomes: Vec<[bool; 4]> = segments
        .par_iter()
        .map(|(a, b)| {
            let refuted = refute_segment(a, b, REFUTER_SAMPLES).is_some();
            let cert = certify_path(&PLPath3::uniform(vec![a.clone(), b.clone()]).expect("two vertices"));
            let bad_witness = cert.witness.as_ref().is_some_and(|w| {
                let on = !w.local.is_negative() && w.local <= QSqrt2::one() && a.lerp(b, &w.local) == w.point;
                !(on && w.point.coord(w.coords.0).is_rational() && w.point.coord(w.coords.1).is_rational())
            });
            [refuted, !cert.certified, refuted && cert.certified, bad_witness]
        })
        .collect();
    for (j, (_, name)) in kinds.iter().enumerate() {
        let mut c = [0usize; 5];
        for o in outcomes.iter().skip(j).step_by(4) {
            c[0] += 1;
            for (slot, flag) in o.iter().enumerate() {
                c[slot + 1] += usize::from(*flag);
            }
        }
        r.push(Check::new(
            format!("segments.{name}"),
            ANCHOR_ORACLE_SEGMENTS,
            c[3] == 0 && c[4] == 0,
            format!(
                "segments={} sampled-violations={} certifier-rejections={} missed={} invalid-witnesses={} samples={REFUTER_SAMPLES}",
                c[0], c[1], c[2], c[3], c[4]
            ),
        ));
    }
    r
}

// ---------------------------------------------------------------------------
// Nöbeling construction

pub const ANCHOR_INPUT_CERTIFIED: &str = "noebeling.input-path-certified";
pub const ANCHOR_CERTIFIED: &str = "noebeling.approximation-in-curve";
pub const ANCHOR_NEAR_GRID: &str = "noebeling.approximation-within-1/n-of-grid";
pub const ANCHOR_CLOSE: &str = "noebeling.blockwise-cover-closeness";
pub const ANCHOR_TIGHTENING: &str = "noebeling.vertex-distance-decreasing-in-n";
pub const ANCHOR_FINITENESS: &str = "noebeling.local-finiteness";

struct NoebelingInput {
    path: PLPath3,
    cover: CubePairCover,
    kind: &'static str,
    grid: GridComplex,
    samples: Vec<tracklab_noebeling::geom::Point3>,
}

pub fn noebeling(cfg: &RunConfig) -> Report {
    let mut r = Report::new(Suite::Noebeling, cfg);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let unit = BoundingBox::unit();
    let inputs: Vec<NoebelingInput> = (0..cfg.trials_for(Suite::Noebeling))
        .map(|i| {
            let path = random_certified_path(&mut rng, 4, 0.05, 0.95);
            let (cover, kind) = if i % 2 == 0 {
                (CubePairCover::uniform(2, unit), "uniform2")
            } else {
                let refine = random_refinement(&mut rng, 1, unit, 0.4);
                (CubePairCover::refined_uniform(1, unit, &refine), "refined1")
            };
            let grid = GridComplex::of_cover(&cover).expect("generated covers are valid");
            let samples = random_off_grid_samples(&mut rng, &grid, 10);
            NoebelingInput {
                path,
                cover,
                kind,
                grid,
                samples,
            }
        })
        .collect();
    let n_max = cfg.n_max;
    let per_path: Vec<Vec<Check>> = inputs
        .par_iter()
        .enumerate()
        .map(|(i, inp)| {
            let mut out = Vec::new();
            let f = &inp.path;
            let base = format!("path{i}.{}", inp.kind);
            out.push(Check::new(
                base.clone(),
                ANCHOR_INPUT_CERTIFIED,
                certify_path(f).certified,
                format!("vertices={}", f.vertices().len()),
            ));
            let mut paths = Vec::new();
            let mut dists: Vec<QSqrt2> = Vec::new();
            for n in 1..=n_max {
                let id = format!("{base}.n{n}");
                let a = match approximate_path(f, &inp.cover, n) {
                    Ok(a) => a,
                    Err(e) => {
                        out.push(Check::new(id, ANCHOR_CERTIFIED, false, format!("construction failed: {e}")));
                        continue;
                    }
                };
                let c = check_approximation(f, &inp.cover, &inp.grid, &a);
                let wit = c.certification.witness.as_ref().map_or("none".to_string(), |w| w.to_string());
                out.push(Check::new(
                    id.clone(),
                    ANCHOR_CERTIFIED,
                    c.certification.certified,
                    format!("vertices={} witness={wit}", c.vertices),
                ));
                out.push(Check::new(
                    id.clone(),
                    ANCHOR_NEAR_GRID,
                    c.near_grid,
                    format!("max-vertex-dist2={} (~{:.6e})", c.max_vertex_dist2, approx_distance(&c.max_vertex_dist2)),
                ));
                out.push(Check::new(
                    id,
                    ANCHOR_CLOSE,
                    c.close.is_ok(),
                    format!(
                        "blocks={} crossings={}{}",
                        a.blocks.blocks.len(),
                        a.blocks.crossings(),
                        c.close.as_ref().err().map_or(String::new(), |e| format!(" error={e}"))
                    ),
                ));
                dists.push(c.max_vertex_dist2);
                paths.push((n, a.path));
            }
            let decreasing = dists.len() == n_max as usize && dists.windows(2).all(|w| w[1] < w[0]);
            out.push(Check::new(base.clone(), ANCHOR_TIGHTENING, decreasing, format!("n=1..{n_max}")));
            match local_finiteness_report(&paths, &inp.samples, &inp.grid) {
                Ok(rep) => {
                    let n0: Vec<String> = rep.samples.iter().map(|s| s.n0.to_string()).collect();
                    out.push(Check::new(
                        base,
                        ANCHOR_FINITENESS,
                        rep.holds(),
                        format!("samples={} thresholds=[{}] avoidance-checks={}", rep.samples.len(), n0.join(","), rep.checks()),
                    ));
                }
                Err(e) => out.push(Check::new(base, ANCHOR_FINITENESS, false, format!("error: {e}"))),
            }
            out
        })
        .collect();
    r.checks.extend(per_path.into_iter().flatten());
    r
}

// ---------------------------------------------------------------------------
// Claims

pub const ANCHOR_SQUARE_LOOPS: &str = "claims.square-loop-of-each-pair-in-grid";
pub const ANCHOR_BOUNDARY: &str = "claims.maximal-cube-boundary-grid-connected";

pub fn claims(cfg: &RunConfig) -> Report {
    let mut r = Report::new(Suite::Claims, cfg);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let inputs: Vec<_> = (0..cfg.trials_for(Suite::Claims))
        .map(|k| {
            let cover = random_admissible_cover(&mut rng, BoundingBox::unit(), k % 4 == 3);
            let cube = *cover.maximal_cubes().choose(&mut rng).expect("covers have cubes");
            (cover, cube)
        })
        .collect();
    let checks: Vec<[Check; 2]> = inputs
        .par_iter()
        .enumerate()
        .map(|(k, (cover, v))| {
            let id = format!("cover{k}.levels{}", cover.fine_level());
            let loops = check_square_loops(cover);
            let first = Check::new(
                id.clone(),
                ANCHOR_SQUARE_LOOPS,
                loops.holds(),
                format!("pairs={} cells={} failures={}", loops.pairs_checked, loops.cells_checked, loops.failures.len()),
            );
            let second = match boundary_grid_report(v, cover) {
                Ok(b) => Check::new(
                    id,
                    ANCHOR_BOUNDARY,
                    b.connected(),
                    format!("cube={v} cells={:?} components={}", b.cells, b.components),
                ),
                Err(e) => Check::new(id, ANCHOR_BOUNDARY, false, format!("error: {e}")),
            };
            [first, second]
        })
        .collect();
    r.checks.extend(checks.into_iter().flatten());
    r
}
