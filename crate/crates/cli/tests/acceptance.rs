//! Acceptance run: one line per criterion, then a non-zero exit if any
//! criterion failed. Runs without the test harness so the lines are always
//! shown.

use std::collections::BTreeSet;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use tracklab_report::config::{RunConfig, Suite};
use tracklab_report::report::Report;
use tracklab_report::suites::{self, Context};
use tracklab_core::classify::TrackClass;
use tracklab_core::oracle::subset_subtracks;
use tracklab_core::standard::shipped_family;
use tracklab_core::subtrack::enumerate_subtracks;
use tracklab_core::track::{read_track, write_track};

/// Largest allowed final/initial diameter ratio of a nesting run.
const DECAY_RATIO: f64 = 1e-2;
const NESTING_MEASURES: usize = 60;
const MIN_NESTING_RUNS: usize = 50;
const NESTING_LENGTH: usize = 15;
const ORACLE_TRACKS: usize = 100;
const ORACLE_SEGMENTS: usize = 10_000;
const NOEBELING_PATHS: usize = 20;
const NOEBELING_N: u32 = 10;
const FINITENESS_SAMPLES: usize = 10;
const CLAIM_COVERS: usize = 1000;

struct Outcome {
    number: u8,
    name: &'static str,
    passed: bool,
    detail: String,
    elapsed: Duration,
    budget: Option<Duration>,
}

impl Outcome {
    fn ok(&self) -> bool {
        self.passed && self.budget.map_or(true, |b| self.elapsed <= b)
    }

    fn line(&self) -> String {
        let budget = self
            .budget
            .map_or(String::new(), |b| format!(" budget={}s", b.as_secs()));
        format!(
            "acceptance criterion {:>2} {:<22} {} ({}; {:.1}s{budget})",
            self.number,
            self.name,
            if self.ok() { "PASS" } else { "FAIL" },
            self.detail,
            self.elapsed.as_secs_f64()
        )
    }
}

fn cfg(suite: Suite) -> RunConfig {
    RunConfig {
        workers: std::thread::available_parallelism().map_or(2, |n| n.get()),
        ..RunConfig::for_suite(suite)
    }
}

fn failed(r: &Report, anchor: &str) -> (usize, usize) {
    let all: Vec<_> = r.with_anchor(anchor).collect();
    (all.len(), all.iter().filter(|c| !c.passed).count())
}

fn generation_ok(r: &Report) -> bool {
    r.with_anchor("partition.generated-depth").all(|c| c.passed)
}

fn timed(number: u8, name: &'static str, budget: Option<u64>, f: impl FnOnce() -> (bool, String)) -> Outcome {
    let start = Instant::now();
    let (passed, detail) = f();
    let o = Outcome {
        number,
        name,
        passed,
        detail,
        elapsed: start.elapsed(),
        budget: budget.map(Duration::from_secs),
    };
    println!("{}", o.line());
    o
}

fn main() -> ExitCode {
    let family = shipped_family().expect("shipped family loads");
    let mut ctx = Context::new(family.clone());
    let mut outcomes = Vec::new();

    outcomes.push(timed(1, "census", Some(300), || {
        let c = cfg(Suite::Census);
        let r = suites::run_suite(Suite::Census, &c, &mut ctx).expect("census runs");
        let (nc, fc) = failed(&r, suites::ANCHOR_CENSUS_COMPLETE);
        let (nn, fnn) = failed(&r, suites::ANCHOR_CENSUS_NEARLY);
        let stray = r.checks.len() - 1 - nc - nn;
        (
            generation_ok(&r) && fc == 0 && fnn == 0 && stray == 0 && nc > 0 && nn > 0,
            format!("depth 3; complete {nc} checked, {fc} wrong; nearly complete {nn} checked, {fnn} wrong; other classes {stray}"),
        )
    }));

    let mut lemma: Option<Report> = None;
    outcomes.push(timed(2, "key-lemma-nearly", Some(600), || {
        let c = cfg(Suite::KeyLemma);
        let r = lemma.insert(suites::run_suite(Suite::KeyLemma, &c, &mut ctx).expect("key lemma runs"));
        let (n, f) = failed(r, suites::ANCHOR_LEMMA_NEARLY);
        // the subtrack enumeration is exhaustive: compare with all branch subsets
        let seq = ctx.sequence(2).expect("sequence");
        let tracks: BTreeSet<(String, String)> = seq
            .partitions
            .iter()
            .flat_map(|p| p.nearly.iter())
            .filter(|m| m.class == TrackClass::NearlyComplete)
            .map(|m| (m.canonical.0.clone(), write_track(&m.track)))
            .collect();
        let mismatched = tracks
            .iter()
            .filter(|(_, text)| {
                let t = read_track(text).expect("round trip");
                let got: Vec<Vec<bool>> = enumerate_subtracks(&t).iter().map(|s| s.mask().to_vec()).collect();
                got != subset_subtracks(&t)
            })
            .count();
        (
            generation_ok(r) && n > 0 && f == 0 && mismatched == 0,
            format!("depth 2; {n} distinct tracks, {f} with a filling proper subtrack; enumeration vs all subsets mismatches {mismatched}"),
        )
    }));

    outcomes.push(timed(3, "key-lemma-complete", None, || {
        let r = lemma.as_ref().expect("key lemma ran");
        let (n, f) = failed(r, suites::ANCHOR_LEMMA_COMPLETE);
        let diag = r.notes.iter().find(|n| n.contains("erasing at least two")).cloned().unwrap_or_default();
        (
            generation_ok(r) && n > 0 && f == 0,
            format!("depth 2; {n} distinct tracks, {f} with a filling boundary-skeleton subtrack; literal count: {diag}"),
        )
    }));

    outcomes.push(timed(4, "cone-identity", None, || {
        let c = cfg(Suite::ConeIdentity);
        let r = suites::run_suite(Suite::ConeIdentity, &c, &mut ctx).expect("cone identity runs");
        let (n, f) = failed(&r, suites::ANCHOR_CONE_IDENTITY);
        (generation_ok(&r) && n > 0 && f == 0, format!("depth 3; {n} splits, {f} violations"))
    }));

    outcomes.push(timed(5, "partition-properties", None, || {
        let c = cfg(Suite::Partition);
        let r = suites::run_suite(Suite::Partition, &c, &mut ctx).expect("partition runs");
        let mut parts = Vec::new();
        let mut ok = generation_ok(&r);
        for a in ["partition.subdivision", "partition.adjacency", "partition.full-splits"] {
            let c = r.with_anchor(a).next().expect("property checked");
            ok &= c.passed;
            parts.push(format!("{} {}", c.id, c.detail));
        }
        (ok, format!("depth 3; {}", parts.join("; ")))
    }));

    outcomes.push(timed(6, "nesting-shadow", Some(600), || {
        let mut c = cfg(Suite::Nesting);
        c.trials = Some(NESTING_MEASURES);
        c.length = NESTING_LENGTH;
        let r = suites::run_suite(Suite::Nesting, &c, &mut ctx).expect("nesting runs");
        let (n, fm) = failed(&r, suites::ANCHOR_NESTING_MONOTONE);
        let (_, fd) = failed(&r, suites::ANCHOR_NESTING_DECAY);
        let excluded = r.notes.iter().filter(|n| n.contains("excluded")).count();
        let stats = r.notes.iter().find(|n| n.starts_with("final/initial")).cloned().unwrap_or_default();
        (
            n >= MIN_NESTING_RUNS && fm == 0 && fd == 0,
            format!(
                "{n} runs of {NESTING_LENGTH} diameters, {excluded} degenerate excluded; nonincreasing violations {fm}; ratio >= {DECAY_RATIO:e} in {fd}; {stats}"
            ),
        )
    }));

    outcomes.push(timed(7, "oracle-equivalence", None, || {
        let mut c = cfg(Suite::Oracle);
        c.trials = Some(ORACLE_TRACKS);
        let r = suites::run_suite(Suite::Oracle, &c, &mut ctx).expect("oracle runs");
        let (nr, fr) = failed(&r, suites::ANCHOR_ORACLE_RAYS);
        let seg: Vec<_> = r.with_anchor(suites::ANCHOR_ORACLE_SEGMENTS).collect();
        let segments: usize = seg
            .iter()
            .filter_map(|c| c.detail.split_whitespace().next()?.strip_prefix("segments=")?.parse::<usize>().ok())
            .sum();
        let fs = seg.iter().filter(|c| !c.passed).count();
        (
            nr == ORACLE_TRACKS && fr == 0 && segments == ORACLE_SEGMENTS && fs == 0,
            format!(
                "{nr} tracks with E <= 12, {fr} ray mismatches; {segments} segments at {} samples, {fs} classes with a missed violation",
                suites::REFUTER_SAMPLES
            ),
        )
    }));

    outcomes.push(timed(8, "noebeling-construction", Some(300), || {
        let mut c = cfg(Suite::Noebeling);
        c.trials = Some(NOEBELING_PATHS);
        c.n_max = NOEBELING_N;
        let r = suites::run_suite(Suite::Noebeling, &c, &mut ctx).expect("noebeling runs");
        let mut ok = true;
        let mut parts = Vec::new();
        for (a, want) in [
            (suites::ANCHOR_INPUT_CERTIFIED, NOEBELING_PATHS),
            (suites::ANCHOR_CERTIFIED, NOEBELING_PATHS * NOEBELING_N as usize),
            (suites::ANCHOR_NEAR_GRID, NOEBELING_PATHS * NOEBELING_N as usize),
            (suites::ANCHOR_CLOSE, NOEBELING_PATHS * NOEBELING_N as usize),
            (suites::ANCHOR_FINITENESS, NOEBELING_PATHS),
        ] {
            let (n, f) = failed(&r, a);
            ok &= n == want && f == 0;
            parts.push(format!("{}: {n} checked, {f} failed", a.trim_start_matches("noebeling.")));
        }
        let samples_ok = r
            .with_anchor(suites::ANCHOR_FINITENESS)
            .all(|c| c.detail.starts_with(&format!("samples={FINITENESS_SAMPLES} ")));
        ok &= samples_ok;
        (ok, format!("{} paths, n = 1..{NOEBELING_N}; {}", NOEBELING_PATHS, parts.join("; ")))
    }));

    outcomes.push(timed(9, "claims", None, || {
        let mut c = cfg(Suite::Claims);
        c.trials = Some(CLAIM_COVERS);
        let r = suites::run_suite(Suite::Claims, &c, &mut ctx).expect("claims run");
        let (n1, f1) = failed(&r, suites::ANCHOR_SQUARE_LOOPS);
        let (n2, f2) = failed(&r, suites::ANCHOR_BOUNDARY);
        (
            n1 == CLAIM_COVERS && n2 == CLAIM_COVERS && f1 == 0 && f2 == 0,
            format!("{n1} covers: square loops {f1} failures; boundary connectivity {f2} failures"),
        )
    }));

    outcomes.push(timed(10, "determinism", None, || {
        let mut diffs = Vec::new();
        let mut checked = 0;
        // in-process, with different worker counts
        for (suite, trials) in [
            (Suite::Census, None),
            (Suite::Nesting, Some(8)),
            (Suite::Oracle, Some(10)),
            (Suite::Noebeling, Some(2)),
            (Suite::Claims, Some(100)),
        ] {
            let mut a = cfg(suite);
            a.depth = Some(1);
            a.trials = trials;
            a.n_max = 4;
            let mut b = a.clone();
            a.workers = 1;
            b.workers = 3;
            let mut fresh = Context::new(family.clone());
            let ra = suites::run_suite(suite, &a, &mut fresh).expect("runs");
            let rb = suites::run_suite(suite, &b, &mut Context::new(family.clone())).expect("runs");
            checked += 1;
            if ra.render() != rb.render() || ra.artifacts != rb.artifacts {
                diffs.push(suite.to_string());
            }
        }
        // through the binary, twice into separate directories
        let dir = std::env::temp_dir().join(format!("tracklab-acceptance-{}", std::process::id()));
        let run = |sub: &str| {
            let out = dir.join(sub);
            let status = Command::new(env!("CARGO_BIN_EXE_tracklab"))
                .args(["verify", "--suite", "claims", "--trials", "50", "--seed", "11", "--out"])
                .arg(&out)
                .output()
                .expect("binary runs");
            (status.status.code(), std::fs::read(out.join("claims.report")).unwrap_or_default())
        };
        let (c1, b1) = run("first");
        let (c2, b2) = run("second");
        let _ = std::fs::remove_dir_all(&dir);
        checked += 1;
        if c1 != Some(0) || c1 != c2 || b1.is_empty() || b1 != b2 {
            diffs.push("binary claims".to_string());
        }
        (diffs.is_empty(), format!("{checked} suite pairs compared byte for byte, differing: [{}]", diffs.join(", ")))
    }));

    let failures: Vec<u8> = outcomes.iter().filter(|o| !o.ok()).map(|o| o.number).collect();
    println!(
        "acceptance summary: {} of {} criteria pass; failing: {:?}",
        outcomes.len() - failures.len(),
        outcomes.len(),
        failures
    );
    if failures.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
