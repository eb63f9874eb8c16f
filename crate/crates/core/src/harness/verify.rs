//! Property suites. Each trial is independent and seeded by its index, so
//! trials run in parallel and are gathered back in index order.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::graph::{build_induced, DownwardGraph, EdgeRule};
use crate::labelers::{h_rho, s_hat, t_hat, LabelOptions, Labeling, RhoFamily};
use crate::lattice::{cap_restrict, is_capped_by, Cube, Domain};
use crate::regularity::{
    candidate_cubes, check_regularity, find_regular_cube, jump_free_check, RegularityReport,
    DEFAULT_CANDIDATE_CAP,
};
use crate::subsetsum::{solve_oracle, solve_structured, InstanceSet, SolveResult};

use super::config::VerifyPlan;
use super::generate::{
    graph_trial, nested_pair, regularity_trial, solver_instance, transfer_trial, trial_seed,
};

/// Witnesses kept per check.
pub const MAX_WITNESSES: usize = 8;

const GRAPH_TAG: u64 = 0x6AA;
const PAIR_TAG: u64 = 0x9A1;
const REGULARITY_TAG: u64 = 0x5E3;
const TRANSFER_TAG: u64 = 0x7F2;
const SOLVER_TAG: u64 = 0x501;
const FAULT_TAG: u64 = 0xFA7;

/// Attempts allowed per wanted capped-transfer find.
const TRANSFER_ATTEMPTS_PER_FIND: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Status {
    Pass,
    Fail,
    NoData,
}

impl Status {
    /// `Fail` dominates, then `Pass`; all `NoData` stays `NoData`.
    pub fn combine(statuses: impl IntoIterator<Item = Status>) -> Status {
        let mut out = Status::NoData;
        for s in statuses {
            match s {
                Status::Fail => return Status::Fail,
                Status::Pass => out = Status::Pass,
                Status::NoData => {}
            }
        }
        out
    }
}

/// Outcome of one named property over a batch of trials.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub trials: usize,
    /// Trials in which the property was actually exercised.
    pub checked: usize,
    /// Trials dropped for exceeding a budget.
    pub skipped: usize,
    pub violations: usize,
    pub witnesses: Vec<Value>,
}

impl Check {
    pub fn from_trials(name: &str, trials: &[TrialOutcome]) -> Check {
        let mut check = Check {
            name: name.to_string(),
            status: Status::NoData,
            trials: trials.len(),
            checked: 0,
            skipped: 0,
            violations: 0,
            witnesses: Vec::new(),
        };
        for t in trials {
            match t {
                TrialOutcome::Skipped => check.skipped += 1,
                TrialOutcome::Vacuous => {}
                TrialOutcome::Checked(witnesses) => {
                    check.checked += 1;
                    if !witnesses.is_empty() {
                        check.violations += 1;
                        let room = MAX_WITNESSES - check.witnesses.len().min(MAX_WITNESSES);
                        check.witnesses.extend(witnesses.iter().take(room).cloned());
                    }
                }
            }
        }
        check.status = if check.violations > 0 {
            Status::Fail
        } else if check.checked == 0 {
            Status::NoData
        } else {
            Status::Pass
        };
        check
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum TrialOutcome {
    /// The property was evaluated; an empty list means it held.
    Checked(Vec<Value>),
    /// Nothing to check in this trial.
    Vacuous,
    Skipped,
}

fn par_trials<T: Send>(n: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    (0..n).into_par_iter().map(f).collect()
}

/// A regular cube found by some suite, for the `k^k` bound.
#[derive(Clone, Debug)]
pub struct Find {
    pub suite: &'static str,
    pub trial: usize,
    pub report: RegularityReport,
}

pub struct VerifyOutput {
    pub checks: Vec<Check>,
    pub finds: Vec<Find>,
}

/// Runs every suite with a nonzero count in `plan`, plus the `k^k` bound
/// over whatever regular cubes the suites found.
pub fn run_suites(plan: &VerifyPlan, seed: u64) -> Result<VerifyOutput> {
    let mut checks = Vec::new();
    let mut finds = Vec::new();
    checks.extend(graph_suites(plan, seed));
    checks.extend(jump_free_suites(plan, seed));
    let (c, f) = regularity_suite(plan, seed)?;
    checks.push(c);
    finds.extend(f);
    let (c, f) = transfer_suite(plan, seed)?;
    checks.push(c);
    finds.extend(f);
    checks.push(kk_bound_check(&finds));
    checks.push(solver_suite(plan, seed)?);
    Ok(VerifyOutput { checks, finds })
}

fn labeled_graph(domain: &Domain, edge: &EdgeRule) -> DownwardGraph {
    build_induced(edge, domain, false).expect("predicate rules never fail to build")
}

fn is_budget(e: &Error) -> bool {
    matches!(
        e,
        Error::TupleBudgetExceeded { .. }
            | Error::CandidateBudgetExceeded { .. }
            | Error::SolverBudgetExceeded { .. }
    )
}

fn rho_variants(seed: u64) -> [RhoFamily; 3] {
    [
        RhoFamily::Min,
        RhoFamily::Max,
        RhoFamily::SeededOffset {
            max_offset: 5,
            seed,
        },
    ]
}

/// `ŝ(z) ≤ max(z)` with equality iff `Φ_z = ∅`, and the `ŝ`/`h^ρ`
/// committee equivalence for three `ρ`, on the same random graphs.
pub fn graph_suites(plan: &VerifyPlan, seed: u64) -> Vec<Check> {
    let opts = LabelOptions::default();
    let results: Vec<(TrialOutcome, TrialOutcome)> = par_trials(plan.graphs, |i| {
        let s = trial_seed(seed, GRAPH_TAG, i);
        let trial = graph_trial(s, plan.max_points, plan.max_arity);
        let g = labeled_graph(&trial.domain, &trial.edge);
        let shat = match s_hat(&g, &trial.selection, &opts) {
            Ok(l) => l,
            Err(_) => return (TrialOutcome::Skipped, TrialOutcome::Skipped),
        };
        let structure = TrialOutcome::Checked(structure_violations(&shat, i));
        let mut eq = Vec::new();
        for rho in rho_variants(s) {
            let mut h = match h_rho(&g, &trial.selection, &rho, &opts) {
                Ok(l) => l,
                Err(_) => return (structure, TrialOutcome::Skipped),
            };
            if plan.inject_fault {
                inject_fault(&mut h, s);
            }
            eq.extend(committee_violations(&shat, &h, &rho, i));
        }
        (structure, TrialOutcome::Checked(eq))
    });
    let (a, b): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    vec![
        Check::from_trials("sHatStructure", &a),
        Check::from_trials("committeeEquivalence", &b),
    ]
}

/// Adds one to the value of a seeded vertex.
pub fn inject_fault(h: &mut Labeling, seed: u64) {
    let n = h.domain().len() as u64;
    let idx = crate::seed::SeededHash::new(seed, FAULT_TAG).below(n) as usize;
    let p = h.domain().points()[idx].clone();
    let v = h.values()[idx];
    h.set_value(&p, v + 1).expect("point is in the domain");
}

pub fn structure_violations(s: &Labeling, trial: usize) -> Vec<Value> {
    s.iter()
        .zip(s.phi_empty_flags())
        .filter(|((z, v), &empty)| *v > z.max_coord() || (*v == z.max_coord()) != empty)
        .map(|((z, v), &empty)| json!({"trial": trial, "point": z, "value": v, "phiEmpty": empty}))
        .collect()
}

pub fn committee_violations(s: &Labeling, h: &Labeling, rho: &RhoFamily, trial: usize) -> Vec<Value> {
    let rho_values = match rho.evaluate(s.domain()) {
        Ok(v) => v,
        Err(e) => return vec![json!({"trial": trial, "error": e.to_string()})],
    };
    let mut out = Vec::new();
    for (i, z) in s.domain().points().iter().enumerate() {
        let (se, he) = (s.phi_empty_flags()[i], h.phi_empty_flags()[i]);
        let (sv, hv) = (s.values()[i], h.values()[i]);
        let ok = se == he && if se { hv == rho_values[i] } else { sv == hv };
        if !ok {
            out.push(json!({
                "trial": trial,
                "rho": rho.to_descriptor().name,
                "point": z,
                "sHat": sv,
                "hRho": hv,
                "rhoValue": rho_values[i],
                "phiEmpty": [se, he],
            }));
        }
    }
    out
}

/// Jump-freeness of `t̂` and `ŝ` on nested pairs, and `Φ^A_x ⊆ Φ^B_x` for
/// `ŝ` wherever the agreement antecedent held.
pub fn jump_free_suites(plan: &VerifyPlan, seed: u64) -> Vec<Check> {
    let opts = LabelOptions {
        retain_phi: true,
        ..LabelOptions::default()
    };
    let results: Vec<[TrialOutcome; 3]> = par_trials(plan.jump_free_pairs, |i| {
        let s = trial_seed(seed, PAIR_TAG, i);
        let pair = nested_pair(s, plan.max_points, plan.max_arity);
        let ga = labeled_graph(&pair.a, &pair.edge);
        let gb = labeled_graph(&pair.b, &pair.edge);

        let rt = jump_free_check(&t_hat(&ga), &t_hat(&gb));
        let t_out = jump_outcome(&rt, i);

        let (sa, sb) = match (s_hat(&ga, &pair.selection, &opts), s_hat(&gb, &pair.selection, &opts)) {
            (Ok(a), Ok(b)) => (a, b),
            _ => return [t_out, TrialOutcome::Skipped, TrialOutcome::Skipped],
        };
        let rs = jump_free_check(&sa, &sb);
        let s_out = jump_outcome(&rs, i);
        let phi_out = if rs.checked.is_empty() {
            TrialOutcome::Vacuous
        } else {
            TrialOutcome::Checked(
                rs.checked
                    .iter()
                    .filter(|z| {
                        let (pa, pb) = (sa.phi(z), sb.phi(z));
                        !matches!((pa, pb), (Some(pa), Some(pb)) if pa.is_subset(pb))
                    })
                    .map(|z| json!({"trial": i, "point": z, "phiA": sa.phi(z), "phiB": sb.phi(z)}))
                    .collect(),
            )
        };
        [t_out, s_out, phi_out]
    });
    let column = |j: usize| -> Vec<TrialOutcome> { results.iter().map(|r| r[j].clone()).collect() };
    vec![
        Check::from_trials("jumpFreeTHat", &column(0)),
        Check::from_trials("jumpFreeSHat", &column(1)),
        Check::from_trials("phiSubset", &column(2)),
    ]
}

fn jump_outcome(r: &crate::regularity::JumpFreeReport, trial: usize) -> TrialOutcome {
    if r.checked.is_empty() {
        return TrialOutcome::Vacuous;
    }
    TrialOutcome::Checked(
        r.witnesses
            .iter()
            .map(|w| json!({"trial": trial, "point": w.point, "fA": w.fa, "fB": w.fb}))
            .collect(),
    )
}

/// For every candidate `E` with `|E| = 2` inside a `k = 2` domain, `ŝ` and
/// `h^ρ` are regressively regular over `E` together or not at all.
pub fn regularity_suite(plan: &VerifyPlan, seed: u64) -> Result<(Check, Vec<Find>)> {
    let opts = LabelOptions::default();
    let results: Vec<(TrialOutcome, Vec<Find>)> = par_trials(plan.regularity_trials, |i| {
        let s = trial_seed(seed, REGULARITY_TAG, i);
        let trial = regularity_trial(s, plan.max_arity);
        let g = labeled_graph(&trial.domain, &trial.edge);
        let (sl, hl) = match (
            s_hat(&g, &trial.selection, &opts),
            h_rho(&g, &trial.selection, &trial.rho, &opts),
        ) {
            (Ok(a), Ok(b)) => (a, b),
            _ => return (TrialOutcome::Skipped, Vec::new()),
        };
        let cubes = candidate_cubes(&trial.domain, 2, DEFAULT_CANDIDATE_CAP)
            .expect("field has at most 8 elements");
        let mut witnesses = Vec::new();
        let mut finds = Vec::new();
        for cube in cubes {
            let rs = check_regularity(&sl, &cube).expect("cube lies in the domain");
            let rh = check_regularity(&hl, &cube).expect("cube lies in the domain");
            if rs.is_regular != rh.is_regular {
                witnesses.push(json!({
                    "trial": i,
                    "E": cube.base(),
                    "sHatRegular": rs.is_regular,
                    "hRhoRegular": rh.is_regular,
                }));
            }
            for r in [rs, rh] {
                if r.is_regular {
                    finds.push(Find {
                        suite: "regularityEquivalence",
                        trial: i,
                        report: r,
                    });
                }
            }
        }
        (TrialOutcome::Checked(witnesses), finds)
    });
    let (outcomes, finds): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    Ok((
        Check::from_trials("regularityEquivalence", &outcomes),
        finds.into_iter().flatten().collect(),
    ))
}

/// For regular finds of `h^ρ` on noisy cubes: `cap_restrict(D, E)` is
/// capped by `E^k`, and `h^ρ` recomputed there is still regular over `E`.
pub fn transfer_suite(plan: &VerifyPlan, seed: u64) -> Result<(Check, Vec<Find>)> {
    let wanted = plan.transfer_finds;
    let attempts = wanted * TRANSFER_ATTEMPTS_PER_FIND;
    let opts = LabelOptions::default();
    let results: Vec<Option<(TrialOutcome, Find)>> = par_trials(attempts, |i| {
        let s = trial_seed(seed, TRANSFER_TAG, i);
        let trial = transfer_trial(s, plan.max_arity);
        let family = |d: &Domain| h_rho(&labeled_graph(d, &trial.edge), &trial.selection, &trial.rho, &opts);
        let search = match find_regular_cube(&family, &trial.domain, trial.p, DEFAULT_CANDIDATE_CAP) {
            Ok(s) => s,
            Err(_) => return None,
        };
        let (cube, report) = search.found?;
        let outcome = match transfer_witnesses(&family, &trial.domain, &cube, i) {
            Ok(w) => TrialOutcome::Checked(w),
            Err(e) if is_budget(&e) => TrialOutcome::Skipped,
            Err(e) => TrialOutcome::Checked(vec![json!({"trial": i, "error": e.to_string()})]),
        };
        Some((
            outcome,
            Find {
                suite: "cappedTransfer",
                trial: i,
                report,
            },
        ))
    });
    let (outcomes, finds): (Vec<_>, Vec<_>) = results.into_iter().flatten().take(wanted).unzip();
    let mut check = Check::from_trials("cappedTransfer", &outcomes);
    if wanted > 0 && outcomes.len() < wanted {
        check.status = Status::Fail;
        check.witnesses.push(json!({
            "shortfall": format!("{} regular finds in {attempts} attempts, wanted {wanted}", outcomes.len())
        }));
    }
    Ok((check, finds))
}

fn transfer_witnesses(
    family: &dyn Fn(&Domain) -> Result<Labeling>,
    domain: &Domain,
    cube: &Cube,
    trial: usize,
) -> Result<Vec<Value>> {
    let capped = cap_restrict(domain, cube)?;
    let mut out = Vec::new();
    if !is_capped_by(&capped, cube)? {
        out.push(json!({"trial": trial, "E": cube.base(), "capped": false}));
    }
    let report = check_regularity(&family(&capped)?, cube)?;
    if !report.is_regular {
        out.push(json!({"trial": trial, "E": cube.base(), "regularAfterCapping": false, "report": report}));
    }
    Ok(out)
}

/// Every regular find carries at most `k^k` regressive values on `E^k`.
pub fn kk_bound_check(finds: &[Find]) -> Check {
    let outcomes: Vec<TrialOutcome> = finds
        .iter()
        .map(|f| {
            TrialOutcome::Checked(if f.report.within_kk_bound() {
                Vec::new()
            } else {
                vec![json!({
                    "suite": f.suite,
                    "trial": f.trial,
                    "E": f.report.cube.base(),
                    "regressiveValues": f.report.regressive_values,
                })]
            })
        })
        .collect();
    Check::from_trials("kkBound", &outcomes)
}

/// Structured solver against the meet-in-the-middle oracle and, up to 20
/// terms, against plain enumeration of all subsets.
pub fn solver_suite(plan: &VerifyPlan, seed: u64) -> Result<Check> {
    let results: Vec<Result<TrialOutcome>> = par_trials(plan.solver_instances, |i| {
        let (h, t) = solver_instance(trial_seed(seed, SOLVER_TAG, i))?;
        Ok(TrialOutcome::Checked(solver_disagreements(&h, t, i)?))
    });
    let outcomes = results.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(Check::from_trials("solverEquivalence", &outcomes))
}

pub fn solver_disagreements(h: &InstanceSet, t: u32, trial: usize) -> Result<Vec<Value>> {
    let structured = solve_structured(h, t, 30)?;
    let oracle = solve_oracle(h, 30)?;
    let mut out = Vec::new();
    let mut note = |what: &str| out.push(json!({"trial": trial, "instance": h, "mismatch": what}));
    if structured.solvable != oracle.solvable {
        note("decision");
    }
    for (name, r) in [("structured", &structured), ("oracle", &oracle)] {
        if !certificate_ok(h, r) {
            note(name);
        }
    }
    if h.len() <= 20 && enumerate_zero_sum(h) != oracle.solvable {
        note("enumeration");
    }
    Ok(out)
}

fn certificate_ok(h: &InstanceSet, r: &SolveResult) -> bool {
    match (&r.certificate, r.solvable) {
        (Some(c), true) => h.accepts_certificate(c),
        (None, false) => true,
        _ => false,
    }
}

/// Whether any of the `2^n - 1` nonempty subsets sums to 0.
pub fn enumerate_zero_sum(h: &InstanceSet) -> bool {
    let values: Vec<i64> = h.terms().iter().map(|t| t.value).collect();
    (1u64..1 << values.len()).any(|mask| {
        values
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &v)| v)
            .sum::<i64>()
            == 0
    })
}
