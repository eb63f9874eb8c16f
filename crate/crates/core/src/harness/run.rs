use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::graph::{build_induced, EdgeRule};
use crate::labelers::{h_rho, s_hat, t_hat, Labeling, PartialSelection, RhoFamily};
use crate::lattice::{cap_restrict, is_capped_by, Cube, Domain, Point};
use crate::regularity::{check_regularity, find_regular_cube, CubeSearch};
use crate::subsetsum::{
    build_instances, is_t_log_bounded, solve_oracle, solve_structured, small_window,
    t_log_allowance, IRule, InstanceSet, SolveResult,
};

use super::config::{ExperimentConfig, Family, ResolvedRules, SCHEMA_VERSION};
use super::verify::{self, Check, Status, TrialOutcome};

/// Failed candidates listed in a search record; the rest are only counted.
const MAX_LISTED_FAILURES: usize = 32;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stage {
    pub name: String,
    pub output: Value,
}

/// Everything a run produced, minus wall-clock timings, which live in
/// [`Timings`] and are persisted separately.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct RunRecord {
    pub schema_version: u32,
    pub command: String,
    pub config_hash: String,
    pub config: ExperimentConfig,
    pub versions: BTreeMap<String, String>,
    pub stages: Vec<Stage>,
    pub checks: Vec<Check>,
    pub status: Status,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings(pub Vec<(String, f64)>);

impl RunRecord {
    fn new(command: &str, config: &ExperimentConfig) -> Self {
        RunRecord {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            config_hash: config.hash(),
            config: config.clone(),
            versions: BTreeMap::from([
                ("jumpfree".to_string(), env!("CARGO_PKG_VERSION").to_string()),
                ("schema".to_string(), SCHEMA_VERSION.to_string()),
            ]),
            stages: Vec::new(),
            checks: Vec::new(),
            status: Status::NoData,
        }
    }

    fn stage(&mut self, name: &str, output: Value) {
        self.stages.push(Stage {
            name: name.to_string(),
            output,
        });
    }

    fn finish(mut self) -> Self {
        self.status = Status::combine(self.checks.iter().map(|c| c.status));
        self
    }

    pub fn stage_output(&self, name: &str) -> Option<&Value> {
        self.stages.iter().find(|s| s.name == name).map(|s| &s.output)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Pretty JSON with sorted keys and a trailing newline.
    pub fn canonical_json(&self) -> String {
        let value = serde_json::to_value(self).expect("record serializes");
        let mut s = serde_json::to_string_pretty(&value).expect("value serializes");
        s.push('\n');
        s
    }

    /// Writes `<out>/<configHash>/<command>.json` and the matching
    /// `<command>.timings.json`; returns the run directory.
    pub fn persist(&self, out: &Path, timings: &Timings) -> Result<PathBuf> {
        let dir = out.join(&self.config_hash);
        std::fs::create_dir_all(&dir)?;
        std::fs::write(dir.join(format!("{}.json", self.command)), self.canonical_json())?;
        std::fs::write(
            dir.join(format!("{}.timings.json", self.command)),
            serde_json::to_string_pretty(timings)? + "\n",
        )?;
        Ok(dir)
    }
}

struct Clock {
    timings: Timings,
    last: Instant,
}

impl Clock {
    fn start() -> Self {
        Clock {
            timings: Timings::default(),
            last: Instant::now(),
        }
    }

    fn lap(&mut self, stage: &str) {
        let now = Instant::now();
        let ms = now.duration_since(self.last).as_secs_f64() * 1e3;
        self.timings.0.push((stage.to_string(), ms));
        self.last = now;
    }
}

fn to_json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("artifact serializes")
}

fn graph_on(rules: &ResolvedRules, domain: &Domain) -> Result<crate::graph::DownwardGraph> {
    build_induced(&rules.edge, domain, true)
}

/// `family(D)` as configured; `t̂` and `min` ignore the selection rule.
fn labeler<'a>(
    config: &'a ExperimentConfig,
    rules: &'a ResolvedRules,
) -> impl Fn(&Domain) -> Result<Labeling> + 'a {
    let opts = config.label_options();
    move |d: &Domain| match config.family {
        Family::THat => Ok(t_hat(&graph_on(rules, d)?)),
        Family::SHat => s_hat(&graph_on(rules, d)?, &rules.selection, &opts),
        Family::HRho => h_rho(&graph_on(rules, d)?, &rules.selection, &rules.rho, &opts),
        Family::Min => Ok(Labeling::from_fn(d, Point::min_coord)),
    }
}

/// `D`, `G_D`, and the three labelings; checks any expected values.
pub fn run_label(config: &ExperimentConfig) -> Result<(RunRecord, Timings)> {
    let mut clock = Clock::start();
    let mut record = RunRecord::new("label", config);
    let rules = config.rules()?;
    let opts = config.label_options();
    let domain = config.build_domain()?;
    let graph = graph_on(&rules, &domain)?;
    record.stage("graph", to_json(&graph));
    clock.lap("graph");

    let th = t_hat(&graph);
    clock.lap("tHat");
    let sh = s_hat(&graph, &rules.selection, &opts)?;
    clock.lap("sHat");
    let hr = h_rho(&graph, &rules.selection, &rules.rho, &opts)?;
    clock.lap("hRho");
    record.stage("tHat", to_json(&th));
    record.stage("sHat", to_json(&sh));
    record.stage("hRho", to_json(&hr));

    if !config.expect.is_empty() {
        let outcomes: Vec<TrialOutcome> = config
            .expect
            .iter()
            .map(|e| {
                let labeling = match e.family {
                    Family::THat => &th,
                    Family::SHat => &sh,
                    Family::HRho => &hr,
                    Family::Min => return TrialOutcome::Vacuous,
                };
                let got = labeling.value(&e.point);
                TrialOutcome::Checked(if got == Some(e.value) {
                    Vec::new()
                } else {
                    vec![json!({"family": e.family, "point": e.point, "expected": e.value, "got": got})]
                })
            })
            .collect();
        record.checks.push(Check::from_trials("expectedValues", &outcomes));
    }
    Ok((record.finish(), clock.timings))
}

fn search_json(search: &CubeSearch) -> Value {
    json!({
        "found": search.found.as_ref().map(|(cube, report)| json!({"E": cube.base(), "report": report})),
        "subsets": u64::try_from(search.subsets).unwrap_or(u64::MAX),
        "candidates": search.candidates,
        "examined": search.examined,
        "failures": search.failures.iter().take(MAX_LISTED_FAILURES).collect::<Vec<_>>(),
        "failuresTotal": search.failures.len(),
    })
}

fn kk_check(search: &CubeSearch) -> Check {
    let outcomes: Vec<TrialOutcome> = search
        .found
        .iter()
        .map(|(cube, r)| {
            TrialOutcome::Checked(if r.within_kk_bound() {
                Vec::new()
            } else {
                vec![json!({"E": cube.base(), "regressiveValues": r.regressive_values})]
            })
        })
        .collect();
    Check::from_trials("kkBound", &outcomes)
}

/// Searches `p`-subsets of `field(D)` for a cube over which the configured
/// family is regressively regular.
pub fn run_search(config: &ExperimentConfig) -> Result<(RunRecord, Timings)> {
    let mut clock = Clock::start();
    let mut record = RunRecord::new("search", config);
    let rules = config.rules()?;
    let domain = config.build_domain()?;
    let family = labeler(config, &rules);
    let search = find_regular_cube(&family, &domain, config.p, config.budgets.candidate_cap)?;
    clock.lap("search");
    record.stage("search", search_json(&search));
    record.checks.push(kk_check(&search));
    Ok((record.finish(), clock.timings))
}

/// Runs the property suites of `config.verify` on up to `jobs` threads
/// (0 picks the machine default).
pub fn run_verify(config: &ExperimentConfig, jobs: usize) -> Result<(RunRecord, Timings)> {
    let mut clock = Clock::start();
    let mut record = RunRecord::new("verify", config);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let out = pool.install(|| verify::run_suites(&config.verify, config.seed))?;
    clock.lap("verify");
    record.stage(
        "finds",
        json!(out
            .finds
            .iter()
            .map(|f| json!({"suite": f.suite, "trial": f.trial, "E": f.report.cube.base(),
                            "regressiveValues": f.report.regressive_values}))
            .collect::<Vec<_>>()),
    );
    record.checks = out.checks;
    Ok((record.finish(), clock.timings))
}

fn solve_both(h: &InstanceSet, config: &ExperimentConfig, record: &mut RunRecord, clock: &mut Clock) -> Result<()> {
    let structured = solve_structured(h, config.t, config.budgets.solver_cap)?;
    clock.lap("structured");
    record.stage("structured", to_json(&structured));
    let oracle = match solve_oracle(h, config.budgets.solver_cap) {
        Ok(r) => Some(r),
        Err(Error::SolverBudgetExceeded { size, cap }) => {
            record.stage("oracle", json!({"skipped": format!("{size} terms exceed the oracle cap {cap}")}));
            None
        }
        Err(e) => return Err(e),
    };
    clock.lap("oracle");

    let cert = |r: &SolveResult| match (&r.certificate, r.solvable) {
        (Some(c), true) => h.accepts_certificate(c),
        (None, false) => true,
        _ => false,
    };
    let mut cert_outcomes = vec![TrialOutcome::Checked(if cert(&structured) {
        Vec::new()
    } else {
        vec![json!({"solver": "structured"})]
    })];
    let agreement = match &oracle {
        Some(o) => {
            record.stage("oracle", to_json(o));
            cert_outcomes.push(TrialOutcome::Checked(if cert(o) {
                Vec::new()
            } else {
                vec![json!({"solver": "oracle"})]
            }));
            TrialOutcome::Checked(if o.solvable == structured.solvable {
                Vec::new()
            } else {
                vec![json!({"structured": structured.solvable, "oracle": o.solvable})]
            })
        }
        None => TrialOutcome::Vacuous,
    };
    record.checks.push(Check::from_trials("agreement", &[agreement]));
    record.checks.push(Check::from_trials("certificates", &cert_outcomes));
    Ok(())
}

/// Solves `instances` when given; otherwise finds a regular cube, caps the
/// domain to it, rebuilds the labeling there and derives the instances.
pub fn run_solve(config: &ExperimentConfig, instances: Option<&InstanceSet>) -> Result<(RunRecord, Timings)> {
    let mut clock = Clock::start();
    let mut record = RunRecord::new("solve", config);
    if let Some(h) = instances {
        h.validate()?;
        record.stage("instances", to_json(h));
        solve_both(h, config, &mut record, &mut clock)?;
        return Ok((record.finish(), clock.timings));
    }

    let rules = config.rules()?;
    let domain = config.build_domain()?;
    let family = labeler(config, &rules);
    let search = find_regular_cube(&family, &domain, config.p, config.budgets.candidate_cap)?;
    clock.lap("search");
    record.stage("search", search_json(&search));
    let Some((cube, _)) = search.found else {
        record.checks.push(Check::from_trials("instancesAvailable", &[TrialOutcome::Vacuous]));
        return Ok((record.finish(), clock.timings));
    };

    let capped = cap_restrict(&domain, &cube)?;
    let h = family(&capped)?;
    let report = check_regularity(&h, &cube)?;
    record.stage(
        "capped",
        json!({
            "E": cube.base(),
            "points": capped.len(),
            "cappedBy": is_capped_by(&capped, &cube)?,
            "tLogBounded": is_t_log_bounded(&rules.rho, &capped, &cube, config.t)?,
            "report": report,
        }),
    );
    record.checks.push(Check::from_trials(
        "cappedTransfer",
        &[TrialOutcome::Checked(if report.is_regular {
            Vec::new()
        } else {
            vec![json!({"E": cube.base()})]
        })],
    ));
    clock.lap("cap");
    let instances = build_instances(&h, &rules.rho, &rules.i_rule, &cube)?;
    record.stage("instances", to_json(&instances));
    solve_both(&instances, config, &mut record, &mut clock)?;
    Ok((record.finish(), clock.timings))
}

/// One point of the `p`-sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BenchRow {
    pub p: usize,
    pub comparisons: u64,
    pub wall_millis: f64,
}

/// The sweep domain for one `p` (`k = 2`): `E = {e0, …, e0+p-1}`,
/// `D = E^2 ∪ {(1,1)}`, every diagonal point of `E^2` pointing at `(1,1)`.
/// With arity-1 min-index selection the diagonal is the one regressive
/// class (value 1, so `delta0 = {1 - e0}`). `ρ` gives the first
/// `⌊t log2 p^2⌋` off-diagonal points the even differences `2, 4, …` and
/// the rest even differences at or above `e0 k^k`, which leaves the
/// instance unsolvable and the structured solver with every pair to try.
pub struct SweepPoint {
    pub domain: Domain,
    pub cube: Cube,
    pub edge: EdgeRule,
    pub selection: PartialSelection,
    pub rho: RhoFamily,
}

pub fn sweep_point(p: usize, e0: u64, t: u32) -> Result<SweepPoint> {
    let base: Vec<u64> = (0..p as u64).map(|i| e0 + i).collect();
    let cube = Cube::new(base, 2)?;
    let sink = Point::from([1, 1]);
    let domain = Domain::new(2, cube.points().chain([sink.clone()]))?;
    let edges: Vec<(Point, Point)> = cube
        .points()
        .filter(|x| x.coords()[0] == x.coords()[1])
        .map(|x| (x, sink.clone()))
        .collect();
    let window = i64::try_from(small_window(e0, 2))
        .map_err(|_| Error::Config("bench e0 too large".into()))?;
    let small = t_log_allowance(2, p, t);
    let mut offsets = BTreeMap::new();
    for (j, x) in cube
        .points()
        .filter(|x| x.coords()[0] != x.coords()[1])
        .enumerate()
    {
        let j = j as i64;
        let diff = if (j as usize) < small {
            2 * (j + 1)
        } else {
            window + 2 * j
        };
        offsets.insert(x, diff);
    }
    if small > p * p - p || 2 * small as i64 >= window {
        return Err(Error::Config(format!(
            "bench p = {p} with e0 = {e0} leaves no room for {small} small differences"
        )));
    }
    Ok(SweepPoint {
        domain,
        cube,
        edge: EdgeRule::Explicit(edges),
        selection: PartialSelection::MinIndex { arity: 1 },
        rho: RhoFamily::MinPlusOffsetTable(offsets),
    })
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|(x, _)| x.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|(_, y)| y.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Comparisons allowed at `p` with `k = 2`: `2^(k^2) p^(kt)`.
pub fn comparison_bound(p: usize, t: u32) -> u128 {
    16 * (p as u128).pow(2 * t)
}

pub const SLOPE_RANGE: (f64, f64) = (1.5, 2.5);

/// Structured-solver comparison counts over `config.bench.ps`.
pub fn run_bench(config: &ExperimentConfig) -> Result<(RunRecord, Timings, Vec<BenchRow>)> {
    let mut clock = Clock::start();
    let mut record = RunRecord::new("bench", config);
    let opts = config.label_options();
    let mut rows = Vec::new();
    let mut regular = Vec::new();
    let mut bounded = Vec::new();
    for &p in &config.bench.ps {
        let sp = sweep_point(p, config.bench.e0, config.t)?;
        let graph = build_induced(&sp.edge, &sp.domain, true)?;
        let h = h_rho(&graph, &sp.selection, &sp.rho, &opts)?;
        let report = check_regularity(&h, &sp.cube)?;
        regular.push(TrialOutcome::Checked(if report.is_regular {
            Vec::new()
        } else {
            vec![json!({"p": p})]
        }));
        let instances = build_instances(&h, &sp.rho, &IRule::Zero, &sp.cube)?;
        let start = Instant::now();
        let result = solve_structured(&instances, config.t, config.budgets.solver_cap)?;
        let wall_millis = start.elapsed().as_secs_f64() * 1e3;
        let bound = comparison_bound(p, config.t);
        bounded.push(TrialOutcome::Checked(if u128::from(result.comparisons) <= bound {
            Vec::new()
        } else {
            vec![json!({"p": p, "comparisons": result.comparisons, "bound": bound as u64})]
        }));
        rows.push(BenchRow {
            p,
            comparisons: result.comparisons,
            wall_millis,
        });
        clock.lap(&format!("p={p}"));
    }
    let slope = log_log_slope(
        &rows
            .iter()
            .map(|r| (r.p as f64, r.comparisons as f64))
            .collect::<Vec<_>>(),
    );
    record.stage(
        "sweep",
        json!({
            "rows": rows.iter().map(|r| json!({"p": r.p, "comparisons": r.comparisons})).collect::<Vec<_>>(),
            "slope": slope,
        }),
    );
    record.checks.push(Check::from_trials("regular", &regular));
    record.checks.push(Check::from_trials("comparisonBound", &bounded));
    let slope_outcome = match slope {
        Some(s) if (SLOPE_RANGE.0..=SLOPE_RANGE.1).contains(&s) => TrialOutcome::Checked(Vec::new()),
        Some(s) => TrialOutcome::Checked(vec![json!({"slope": s})]),
        None => TrialOutcome::Vacuous,
    };
    record.checks.push(Check::from_trials("slope", &[slope_outcome]));
    Ok((record.finish(), clock.timings, rows))
}

pub fn bench_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from("p,comparisons,wallMillis\n");
    for r in rows {
        out.push_str(&format!("{},{},{:.3}\n", r.p, r.comparisons, r.wall_millis));
    }
    out
}
