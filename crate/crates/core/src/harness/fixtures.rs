//! Bundled configs: the worked committee example and small starters for
//! each subcommand.

use crate::labelers::{PartialSelection, Report, RhoFamily};
use crate::lattice::Point;
use crate::rules::RuleDescriptor;

use super::config::{
    BenchPlan, Budgets, DomainSpec, Expectation, ExperimentConfig, Family, VerifyPlan,
    SCHEMA_VERSION,
};

fn pt(a: u64, b: u64) -> Point {
    Point::from([a, b])
}

fn rep(a: u64, b: u64, n: u64) -> Report {
    Report(pt(a, b), n)
}

/// The boss `(7,11)` with three committees reporting 4, 7 and 3.
///
/// Terminals report their `min`; the three intermediate vertices take the
/// values listed in their table rows. `E = {7, 11}`, so the cube's other
/// points are the isolated terminals `(7,7)`, `(11,11)` and `(11,7)`.
pub fn committee_example() -> ExperimentConfig {
    let terminals = [
        pt(2, 2),
        pt(3, 1),
        pt(4, 1),
        pt(5, 5),
        pt(6, 4),
        pt(7, 4),
        pt(8, 7),
        pt(8, 3),
        pt(9, 2),
        pt(7, 7),
        pt(11, 11),
    ];
    let inner = [pt(3, 5), pt(6, 8), pt(11, 7)];
    let boss = pt(7, 11);
    let points: Vec<Point> = terminals
        .iter()
        .chain(&inner)
        .chain([&boss])
        .cloned()
        .collect();

    let mut edges = Vec::new();
    let mut link = |from: Point, to: &[Point]| {
        for y in to {
            edges.push((from.clone(), y.clone()));
        }
    };
    link(pt(3, 5), &[pt(2, 2), pt(3, 1), pt(4, 1)]);
    link(pt(6, 8), &[pt(5, 5), pt(6, 4), pt(7, 4)]);
    link(pt(11, 7), &[pt(8, 3), pt(9, 2)]);
    link(boss.clone(), &[pt(3, 5), pt(6, 8), pt(8, 7), pt(8, 3)]);
    let edge_rule = RuleDescriptor::new("explicit").with_param(
        "edges",
        serde_json::to_value(&edges).expect("edges serialize"),
    );

    let table = PartialSelection::table(
        3,
        [
            (pt(3, 5), vec![rep(3, 1, 1), rep(2, 2, 2), rep(2, 2, 2)], 1),
            (pt(6, 8), vec![rep(5, 5, 5), rep(6, 4, 4), rep(7, 4, 4)], 1),
            (pt(11, 7), vec![rep(8, 3, 3), rep(9, 2, 2), rep(9, 2, 2)], 0),
            (boss.clone(), vec![rep(3, 5, 2), rep(6, 8, 4), rep(8, 7, 7)], 1),
            (boss.clone(), vec![rep(6, 8, 4), rep(8, 7, 7), rep(8, 7, 7)], 1),
            (boss.clone(), vec![rep(6, 8, 4), rep(8, 3, 3), rep(8, 3, 3)], 1),
        ],
    )
    .expect("table rows have arity 3");

    let expect = [
        (boss, 3),
        (pt(3, 5), 2),
        (pt(6, 8), 4),
        (pt(11, 7), 3),
        (pt(7, 7), 7),
        (pt(11, 11), 11),
        (pt(8, 7), 8),
    ]
    .into_iter()
    .map(|(point, value)| Expectation {
        family: Family::SHat,
        point,
        value,
    })
    .collect();

    ExperimentConfig {
        schema_version: SCHEMA_VERSION,
        seed: 0,
        k: 2,
        p: 2,
        r: 3,
        t: 1,
        edge_rule,
        selection_rule: table.to_descriptor(),
        rho_rule: RhoFamily::Max.to_descriptor(),
        i_rule: RuleDescriptor::new("zero"),
        domain: DomainSpec::Explicit { points },
        family: Family::SHat,
        budgets: Budgets::default(),
        verify: VerifyPlan::default(),
        bench: BenchPlan::default(),
        expect,
        output_path: None,
    }
}

/// Random graph on a noisy cube; good for `label`, `search` and `solve`.
pub fn noisy_cube() -> ExperimentConfig {
    ExperimentConfig {
        schema_version: SCHEMA_VERSION,
        seed: 11,
        k: 2,
        p: 2,
        r: 2,
        t: 1,
        edge_rule: RuleDescriptor::new("seeded-random")
            .with_param("density", 0.3)
            .with_seed(11),
        selection_rule: RuleDescriptor::new("seeded-choice")
            .with_param("arity", 2)
            .with_param("q", 0.6)
            .with_seed(11),
        rho_rule: RuleDescriptor::new("tlog-designed")
            .with_param("t", 1)
            .with_seed(11),
        i_rule: RuleDescriptor::new("zero"),
        domain: DomainSpec::CubeWithNoise {
            base: vec![4, 9],
            extra: 25,
            field_max: 9,
            seed: 11,
        },
        family: Family::HRho,
        budgets: Budgets::default(),
        verify: VerifyPlan::default(),
        bench: BenchPlan::default(),
        expect: Vec::new(),
        output_path: None,
    }
}

/// Every verify suite at a size that runs in seconds.
pub fn quick_verify() -> ExperimentConfig {
    ExperimentConfig {
        verify: VerifyPlan {
            graphs: 50,
            regularity_trials: 20,
            jump_free_pairs: 50,
            transfer_finds: 10,
            solver_instances: 50,
            ..VerifyPlan::default()
        },
        ..noisy_cube()
    }
}

/// Named fixtures, in the order `fixtures` writes them.
pub fn all() -> Vec<(&'static str, ExperimentConfig)> {
    vec![
        ("committee-example", committee_example()),
        ("noisy-cube", noisy_cube()),
        ("quick-verify", quick_verify()),
    ]
}
