//! Seeded generators for the verify suites. Trial `i` of a suite draws
//! everything from one ChaCha stream keyed by `(master seed, suite tag, i)`.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::graph::EdgeRule;
use crate::labelers::{PartialSelection, RhoFamily};
use crate::lattice::{Cube, Domain, Point};
use crate::seed::SeededHash;
use crate::subsetsum::{t_log_allowance, InstanceSet};

pub fn trial_seed(master: u64, tag: u64, i: usize) -> u64 {
    SeededHash::new(master, tag).u64(i as u64).finish()
}

pub fn trial_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_domain(rng: &mut impl Rng, k: usize, size: usize, field_max: u64) -> Domain {
    let points = (0..size).map(|_| {
        Point::new((0..k).map(|_| rng.gen_range(0..field_max)).collect()).expect("k >= 1")
    });
    Domain::new(k, points).expect("at least one point of arity k")
}

pub fn random_edge_rule(rng: &mut impl Rng, seed: u64) -> EdgeRule {
    EdgeRule::SeededRandom {
        density: rng.gen_range(0.05..=0.25),
        seed,
    }
}

/// One of the three stochastic-or-total built-in selection families.
pub fn random_selection(rng: &mut impl Rng, max_arity: usize, seed: u64) -> PartialSelection {
    let arity = rng.gen_range(1..=max_arity);
    match rng.gen_range(0..4) {
        0 => PartialSelection::MinIndex { arity },
        1 => PartialSelection::FixedIndex {
            arity,
            index: rng.gen_range(0..arity),
        },
        _ => PartialSelection::SeededChoice {
            arity,
            q: rng.gen_range(0.2..=0.9),
            seed,
        },
    }
}

pub fn random_rho(rng: &mut impl Rng, seed: u64) -> RhoFamily {
    match rng.gen_range(0..4) {
        0 => RhoFamily::Min,
        1 => RhoFamily::Max,
        2 => RhoFamily::SeededOffset {
            max_offset: rng.gen_range(1..=6),
            seed,
        },
        _ => RhoFamily::TLogDesigned { t: 1, seed },
    }
}

/// A random graph for the structure and committee-equivalence suites:
/// `k ∈ {2, 3}`, at most `max_points` points, arity at most `max_arity`.
#[derive(Clone, Debug)]
pub struct GraphTrial {
    pub domain: Domain,
    pub edge: EdgeRule,
    pub selection: PartialSelection,
}

pub fn graph_trial(seed: u64, max_points: usize, max_arity: usize) -> GraphTrial {
    let mut rng = trial_rng(seed);
    let k = rng.gen_range(2..=3);
    let size = rng.gen_range(1..=max_points);
    let field_max = rng.gen_range(4..=10);
    let domain = random_domain(&mut rng, k, size, field_max);
    GraphTrial {
        domain,
        edge: random_edge_rule(&mut rng, seed),
        selection: random_selection(&mut rng, max_arity, seed),
    }
}

/// `B`, a point `x ∈ B`, and `A = B_x ∪ {x} ∪ R` with `R` a random subset
/// of the points of `B` above `x`.
#[derive(Clone, Debug)]
pub struct NestedPair {
    pub a: Domain,
    pub b: Domain,
    pub x: Point,
    pub edge: EdgeRule,
    pub selection: PartialSelection,
}

pub fn nested_pair(seed: u64, max_points: usize, max_arity: usize) -> NestedPair {
    let mut rng = trial_rng(seed);
    let k = rng.gen_range(2..=3);
    let size = rng.gen_range(1..=max_points);
    let field_max = rng.gen_range(4..=10);
    let b = random_domain(&mut rng, k, size, field_max);
    let x = b.points().choose(&mut rng).expect("b is nonempty").clone();
    let keep = rng.gen_range(0.0..=1.0);
    let a_points: Vec<Point> = b
        .points()
        .iter()
        .filter(|z| {
            z.max_coord() < x.max_coord()
                || **z == x
                || (z.max_coord() > x.max_coord() && rng.gen_bool(keep))
        })
        .cloned()
        .collect();
    let a = Domain::new(k, a_points).expect("x is in A");
    NestedPair {
        a,
        b,
        x,
        edge: random_edge_rule(&mut rng, seed),
        selection: random_selection(&mut rng, max_arity, seed),
    }
}

/// `k = 2` domain on the field `0..8` that contains at least one `E^2`
/// with `|E| = 2`, plus the rules to label it.
#[derive(Clone, Debug)]
pub struct RegularityTrial {
    pub domain: Domain,
    pub edge: EdgeRule,
    pub selection: PartialSelection,
    pub rho: RhoFamily,
}

pub fn regularity_trial(seed: u64, max_arity: usize) -> RegularityTrial {
    let mut rng = trial_rng(seed);
    let base: BTreeSet<u64> = rand::seq::index::sample(&mut rng, 8, 2)
        .into_iter()
        .map(|v| v as u64)
        .collect();
    let cube = Cube::new(base, 2).expect("two distinct elements");
    let size = rng.gen_range(1..=30);
    let noise = random_domain(&mut rng, 2, size, 8);
    let domain = Domain::new(2, cube.points().chain(noise.points().iter().cloned()))
        .expect("points have arity 2");
    RegularityTrial {
        domain,
        edge: EdgeRule::SeededRandom {
            density: rng.gen_range(0.1..=0.4),
            seed,
        },
        selection: random_selection(&mut rng, max_arity, seed),
        rho: random_rho(&mut rng, seed),
    }
}

/// A noisy cube `E^k ∪ noise` with `k = 2`, `p ∈ {2, 3}`, for the
/// capped-transfer suite.
#[derive(Clone, Debug)]
pub struct TransferTrial {
    pub domain: Domain,
    pub p: usize,
    pub edge: EdgeRule,
    pub selection: PartialSelection,
    pub rho: RhoFamily,
}

pub fn transfer_trial(seed: u64, max_arity: usize) -> TransferTrial {
    let mut rng = trial_rng(seed);
    let p = rng.gen_range(2..=3);
    let base: BTreeSet<u64> = rand::seq::index::sample(&mut rng, 12, p)
        .into_iter()
        .map(|v| v as u64 + 1)
        .collect();
    let cube = Cube::new(base, 2).expect("p distinct elements");
    let size = rng.gen_range(1..=20);
    let noise = random_domain(&mut rng, 2, size, 15);
    let domain = Domain::new(2, cube.points().chain(noise.points().iter().cloned()))
        .expect("points have arity 2");
    TransferTrial {
        domain,
        p,
        edge: EdgeRule::SeededRandom {
            density: rng.gen_range(0.1..=0.4),
            seed,
        },
        selection: random_selection(&mut rng, max_arity, seed),
        rho: random_rho(&mut rng, seed),
    }
}

/// A synthetic instance meeting every precondition of the structured
/// solver: no middle block, fewer than `k^k` negatives whose magnitudes sum
/// below `e0 k^k`, and at most the t-log allowance of small positives.
/// Values lie in `[-100, 100]`, at most 24 terms. Returns `(instance, t)`.
pub fn solver_instance(seed: u64) -> Result<(InstanceSet, u32)> {
    let mut rng = trial_rng(seed);
    let k = rng.gen_range(2..=3usize);
    let p = rng.gen_range(2..=8usize);
    let t = rng.gen_range(1..=2u32);
    let kk = (k as u64).pow(k as u32);

    let n_neg = rng.gen_range(0..=(kk as usize - 1).min(6));
    let negatives: BTreeSet<i64> = rand::seq::index::sample(&mut rng, 100, n_neg)
        .into_iter()
        .map(|v| -(v as i64) - 1)
        .collect();
    let mass: u64 = negatives.iter().map(|v| v.unsigned_abs()).sum();
    // Smallest e0 with e0 k^k > mass, plus some slack.
    let e0 = (mass / kk + 1 + rng.gen_range(0..=12)).max(1);
    let window = e0 * kk;

    let allowance = t_log_allowance(k, p, t).min(12);
    let small_max = window.saturating_sub(1).min(100);
    let mut small: BTreeSet<i64> = BTreeSet::new();
    if small_max > 0 {
        let n_small = rng.gen_range(0..=allowance.min(small_max as usize));
        small.extend(
            rand::seq::index::sample(&mut rng, small_max as usize, n_small)
                .into_iter()
                .map(|v| v as i64 + 1),
        );
        // Plant a cancelling pair about half the time.
        if let Some(&v) = negatives.iter().next() {
            if rng.gen_bool(0.5) && small.len() < allowance && (-v as u64) <= small_max {
                small.insert(-v);
            }
        }
    }
    let mut delta2: BTreeSet<i64> = small;
    if window <= 100 {
        let n_large = rng.gen_range(0..=24 - n_neg - delta2.len()).min(6);
        for _ in 0..n_large {
            delta2.insert(rng.gen_range(window as i64..=100));
        }
    }
    if rng.gen_bool(0.1) && n_neg + delta2.len() < 24 {
        delta2.insert(0);
    }
    let instance = InstanceSet::new(k, p, e0, negatives, [], delta2)?;
    Ok((instance, t))
}
