//! Subset-sum instances built from the three blocks of `E^k`, the
//! structured solver that exploits regressive regularity, and a generic
//! meet-in-the-middle oracle.
//!
//! The problem decided everywhere here: does some nonempty subset of the
//! instance sum to exactly 0.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::labelers::{Labeling, RhoFamily};
use crate::lattice::{is_capped_by, Cube, Domain, Point};
use crate::regularity::{block_of, Block};
use crate::rules::RuleDescriptor;
use crate::seed::SeededHash;

/// Largest instance the meet-in-the-middle oracle accepts.
pub const DEFAULT_ORACLE_CAP: usize = 30;

const I_RULE_TAG: u64 = 0x1D;
const DESIGN_TAG: u64 = 0xDE5;

/// `e_0 · k^k`, the window below which positive differences count.
pub fn small_window(min_e: u64, k: usize) -> i128 {
    i128::from(min_e) * (k as i128).pow(k as u32)
}

/// `⌊t · log2(p^k)⌋`, the number of distinct small differences allowed.
pub fn t_log_allowance(k: usize, p: usize, t: u32) -> usize {
    let bound = f64::from(t) * k as f64 * (p as f64).log2();
    (bound + 1e-9).floor() as usize
}

fn require_capped(domain: &Domain, cube: &Cube) -> Result<()> {
    if is_capped_by(domain, cube)? {
        Ok(())
    } else {
        Err(Error::NotCapped)
    }
}

/// Whether `ρ_D` has at most `t · log2(p^k)` distinct differences
/// `ρ_D(x) - min(x)` in `(0, e_0 k^k)` over `E^k`. Requires `D` capped by `E^k`.
pub fn is_t_log_bounded(rho: &RhoFamily, domain: &Domain, cube: &Cube, t: u32) -> Result<bool> {
    require_capped(domain, cube)?;
    let values = rho.evaluate(domain)?;
    let window = small_window(cube.min_element(), cube.arity());
    let small: BTreeSet<i128> = cube
        .points()
        .map(|x| {
            let i = domain.index_of(&x).expect("cube is inside the domain");
            i128::from(values[i]) - i128::from(x.min_coord())
        })
        .filter(|&d| d > 0 && d < window)
        .collect();
    Ok(small.len() <= t_log_allowance(cube.arity(), cube.p(), t))
}

/// A min-dominant `ρ_D` that is `t`-log bounded over the cube capping `D`.
///
/// A seeded choice of at most `⌊t log2(p^k)⌋` cube points get distinct
/// differences inside the window; every other cube point gets a distinct
/// difference at or above `e_0 k^k`. Points off the cube get a seeded
/// offset in `0..=3`.
pub fn design_t_log_rho(domain: &Domain, cube: &Cube, t: u32, seed: u64) -> Result<RhoFamily> {
    require_capped(domain, cube)?;
    let k = cube.arity();
    let window = small_window(cube.min_element(), k);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ DESIGN_TAG);

    let mut cube_points: Vec<Point> = cube.points().collect();
    cube_points.shuffle(&mut rng);
    let small_slots = t_log_allowance(k, cube.p(), t)
        .min(cube_points.len())
        .min(usize::try_from((window - 1).max(0)).unwrap_or(usize::MAX));
    let pool: Vec<i128> = rand::seq::index::sample(
        &mut rng,
        usize::try_from(window - 1).unwrap_or(usize::MAX).max(small_slots),
        small_slots,
    )
    .into_iter()
    .map(|i| i as i128 + 1)
    .collect();

    let mut offsets = BTreeMap::new();
    for (j, x) in cube_points.iter().enumerate() {
        let diff = if j < small_slots {
            pool[j]
        } else {
            window + (j - small_slots) as i128
        };
        let diff = i64::try_from(diff)
            .map_err(|_| Error::InvalidRule("designed rho difference overflows".into()))?;
        offsets.insert(x.clone(), diff);
    }
    for p in domain.points() {
        if !offsets.contains_key(p) {
            let off = SeededHash::new(seed, DESIGN_TAG).point(p).below(4);
            offsets.insert(p.clone(), off as i64);
        }
    }
    Ok(RhoFamily::MinPlusOffsetTable(offsets))
}

/// The integer family `I_D` feeding the middle block.
#[derive(Clone, Debug, PartialEq)]
pub enum IRule {
    Zero,
    /// Listed values, 0 elsewhere.
    Table(BTreeMap<Point, i64>),
    /// Seeded value in `lo..=hi`.
    SeededHashRange { lo: i64, hi: i64, seed: u64 },
}

impl IRule {
    pub fn value(&self, x: &Point) -> i64 {
        match self {
            IRule::Zero => 0,
            IRule::Table(t) => t.get(x).copied().unwrap_or(0),
            IRule::SeededHashRange { lo, hi, seed } => {
                let span = (i128::from(*hi) - i128::from(*lo) + 1) as u64;
                let off = SeededHash::new(*seed, I_RULE_TAG).point(x).below(span);
                (i128::from(*lo) + i128::from(off)) as i64
            }
        }
    }

    pub fn to_descriptor(&self) -> RuleDescriptor {
        match self {
            IRule::Zero => RuleDescriptor::new("zero"),
            IRule::Table(t) => {
                let list: Vec<(Point, i64)> = t.iter().map(|(p, v)| (p.clone(), *v)).collect();
                RuleDescriptor::new("table")
                    .with_param("values", serde_json::to_value(list).expect("values serialize"))
            }
            IRule::SeededHashRange { lo, hi, seed } => RuleDescriptor::new("seeded-hash-range")
                .with_param("lo", *lo)
                .with_param("hi", *hi)
                .with_seed(*seed),
        }
    }

    pub fn from_descriptor(d: &RuleDescriptor) -> Result<Self> {
        match d.name.as_str() {
            "zero" => {
                d.only_params(&[])?;
                Ok(IRule::Zero)
            }
            "table" => {
                d.only_params(&["values"])?;
                let list: Vec<(Point, i64)> = d.param("values")?;
                Ok(IRule::Table(list.into_iter().collect()))
            }
            "seeded-hash-range" => {
                d.only_params(&["lo", "hi"])?;
                let lo: i64 = d.param("lo")?;
                let hi: i64 = d.param("hi")?;
                if lo > hi {
                    return Err(Error::InvalidRule(format!(
                        "seeded-hash-range: lo {lo} > hi {hi}"
                    )));
                }
                Ok(IRule::SeededHashRange {
                    lo,
                    hi,
                    seed: d.require_seed()?,
                })
            }
            _ => Err(d.unknown()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance(pub Point, pub Block, pub i64);

/// The three value sets built from the blocks `E^k_0`, `E^k_1`, `E^k_2`,
/// each sorted and duplicate-free, plus the cube parameters the structured
/// solver needs. `provenance` lists every contributing point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct InstanceSet {
    pub k: usize,
    pub p: usize,
    pub e0: u64,
    pub delta0: Vec<i64>,
    pub delta1: Vec<i64>,
    pub delta2: Vec<i64>,
    #[serde(default)]
    pub provenance: Vec<Provenance>,
}

impl InstanceSet {
    /// An instance without provenance; values are deduplicated per block.
    pub fn new(
        k: usize,
        p: usize,
        e0: u64,
        delta0: impl IntoIterator<Item = i64>,
        delta1: impl IntoIterator<Item = i64>,
        delta2: impl IntoIterator<Item = i64>,
    ) -> Result<Self> {
        let set = InstanceSet {
            k,
            p,
            e0,
            delta0: sorted_distinct(delta0),
            delta1: sorted_distinct(delta1),
            delta2: sorted_distinct(delta2),
            provenance: Vec::new(),
        };
        set.validate()?;
        Ok(set)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(v) = self.delta0.iter().find(|&&v| v >= 0) {
            return Err(Error::InvalidInstance(format!("delta0 holds nonnegative {v}")));
        }
        if let Some(v) = self.delta2.iter().find(|&&v| v < 0) {
            return Err(Error::InvalidInstance(format!("delta2 holds negative {v}")));
        }
        for d in [&self.delta0, &self.delta1, &self.delta2] {
            if d.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidInstance("blocks must be sorted and distinct".into()));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.delta0.len() + self.delta1.len() + self.delta2.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Every element tagged with its block, blocks in order.
    pub fn terms(&self) -> Vec<Term> {
        [
            (Block::E0, &self.delta0),
            (Block::E1, &self.delta1),
            (Block::E2, &self.delta2),
        ]
        .into_iter()
        .flat_map(|(block, values)| values.iter().map(move |&value| Term { block, value }))
        .collect()
    }

    fn block(&self, block: Block) -> &[i64] {
        match block {
            Block::E0 => &self.delta0,
            Block::E1 => &self.delta1,
            Block::E2 => &self.delta2,
        }
    }

    /// Whether `certificate` is a nonempty set of distinct terms of this
    /// instance summing to 0.
    pub fn accepts_certificate(&self, certificate: &[Term]) -> bool {
        let distinct: BTreeSet<&Term> = certificate.iter().collect();
        !certificate.is_empty()
            && distinct.len() == certificate.len()
            && certificate
                .iter()
                .all(|t| self.block(t.block).binary_search(&t.value).is_ok())
            && certificate.iter().map(|t| i128::from(t.value)).sum::<i128>() == 0
    }
}

fn sorted_distinct(values: impl IntoIterator<Item = i64>) -> Vec<i64> {
    values.into_iter().collect::<BTreeSet<_>>().into_iter().collect()
}

/// Builds the instance sets for `h` over `E^k`:
/// `h(x) - min(E)` on `E^k_0`, `I_D(x)` on `E^k_1`, `ρ_D(x) - min(x)` on `E^k_2`.
pub fn build_instances(
    h: &Labeling,
    rho: &RhoFamily,
    i_rule: &IRule,
    cube: &Cube,
) -> Result<InstanceSet> {
    let domain = h.domain();
    let rho_values = rho.evaluate(domain)?;
    let min_e = cube.min_element();
    let mut blocks: [BTreeSet<i64>; 3] = Default::default();
    let mut provenance = Vec::with_capacity(cube.len());
    for x in cube.points() {
        let i = domain
            .index_of(&x)
            .ok_or_else(|| Error::CubeNotContained { missing: x.clone() })?;
        let hv = h.values()[i];
        let block = block_of(&x, hv, min_e);
        let value = match block {
            Block::E0 => hv as i64 - min_e as i64,
            Block::E1 => i_rule.value(&x),
            Block::E2 => (rho_values[i] - x.min_coord()) as i64,
        };
        blocks[block as usize].insert(value);
        provenance.push(Provenance(x, block, value));
    }
    let [d0, d1, d2] = blocks;
    let set = InstanceSet {
        k: cube.arity(),
        p: cube.p(),
        e0: min_e,
        delta0: d0.into_iter().collect(),
        delta1: d1.into_iter().collect(),
        delta2: d2.into_iter().collect(),
        provenance,
    };
    set.validate()?;
    Ok(set)
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Term {
    pub block: Block,
    pub value: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SolveResult {
    pub solvable: bool,
    pub certificate: Option<Vec<Term>>,
    pub comparisons: u64,
}

/// Decides the instance the way regressive regularity allows:
///
/// 1. `0 ∈ Δ_2` solves it outright.
/// 2. Positive terms at or above `e_0 k^k` are dropped: the negative block
///    sums to less than that in absolute value.
/// 3. Every subset of negative terms is compared against every subset of
///    the remaining small positive terms, one comparison per pair.
///
/// Refuses instances outside the regime the procedure is sound for.
pub fn solve_structured(h: &InstanceSet, t: u32, cap: usize) -> Result<SolveResult> {
    h.validate()?;
    if !h.delta1.is_empty() {
        return Err(Error::SolverRefused(format!(
            "delta1 holds {} values; the configuration is not regressively regular",
            h.delta1.len()
        )));
    }
    let kk = (h.k as u128).pow(h.k as u32);
    if h.delta0.len() as u128 >= kk {
        return Err(Error::SolverRefused(format!(
            "delta0 holds {} values, needs fewer than k^k = {kk}",
            h.delta0.len()
        )));
    }
    let window = small_window(h.e0, h.k);
    let negative_mass: i128 = h.delta0.iter().map(|&v| -i128::from(v)).sum();
    if negative_mass >= window {
        return Err(Error::SolverRefused(format!(
            "negative terms sum to -{negative_mass}, magnitude must stay below e0*k^k = {window}"
        )));
    }
    let small: Vec<i64> = h
        .delta2
        .iter()
        .copied()
        .filter(|&v| v > 0 && i128::from(v) < window)
        .collect();
    let allowance = t_log_allowance(h.k, h.p, t);
    if small.len() > allowance {
        return Err(Error::SolverRefused(format!(
            "{} positive terms below e0*k^k, t-log allowance is {allowance}",
            small.len()
        )));
    }

    if h.delta2.first() == Some(&0) {
        return Ok(SolveResult {
            solvable: true,
            certificate: Some(vec![Term {
                block: Block::E2,
                value: 0,
            }]),
            comparisons: 0,
        });
    }
    if h.delta0.len() + small.len() > cap {
        return Err(Error::SolverBudgetExceeded {
            size: h.delta0.len() + small.len(),
            cap,
        });
    }

    let negative_sums = subset_sums(&h.delta0);
    let positive_sums = subset_sums(&small);
    let mut comparisons = 0u64;
    for (nmask, &sn) in negative_sums.iter().enumerate() {
        for (pmask, &sp) in positive_sums.iter().enumerate() {
            if nmask == 0 && pmask == 0 {
                continue;
            }
            comparisons += 1;
            if sn + sp == 0 {
                let mut certificate = masked_terms(Block::E0, &h.delta0, nmask);
                certificate.extend(masked_terms(Block::E2, &small, pmask));
                return Ok(SolveResult {
                    solvable: true,
                    certificate: Some(certificate),
                    comparisons,
                });
            }
        }
    }
    Ok(SolveResult {
        solvable: false,
        certificate: None,
        comparisons,
    })
}

/// Sum of every subset, indexed by bitmask.
fn subset_sums(values: &[i64]) -> Vec<i128> {
    let mut sums = vec![0i128; 1 << values.len()];
    for mask in 1..sums.len() {
        let low = mask.trailing_zeros() as usize;
        sums[mask] = sums[mask & (mask - 1)] + i128::from(values[low]);
    }
    sums
}

fn masked_terms(block: Block, values: &[i64], mask: usize) -> Vec<Term> {
    values
        .iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .map(|(_, &value)| Term { block, value })
        .collect()
}

/// Exact decision on any instance of at most `cap` terms: split the terms
/// in halves and match sorted half-sums. Counts one comparison per lookup.
pub fn solve_oracle(h: &InstanceSet, cap: usize) -> Result<SolveResult> {
    let terms = h.terms();
    if terms.len() > cap {
        return Err(Error::SolverBudgetExceeded {
            size: terms.len(),
            cap,
        });
    }
    let values: Vec<i64> = terms.iter().map(|t| t.value).collect();
    let (left, right) = values.split_at(values.len() / 2);
    let left_sums = subset_sums(left);
    let mut right_sums: Vec<(i128, usize)> = subset_sums(right)
        .into_iter()
        .enumerate()
        .map(|(mask, s)| (s, mask))
        .collect();
    right_sums.sort_unstable();

    let mut comparisons = 0u64;
    for (lmask, &sl) in left_sums.iter().enumerate() {
        comparisons += 1;
        let target = -sl;
        let start = right_sums.partition_point(|&(s, _)| s < target);
        let hit = right_sums[start..]
            .iter()
            .take_while(|&&(s, _)| s == target)
            .find(|&&(_, rmask)| lmask != 0 || rmask != 0);
        if let Some(&(_, rmask)) = hit {
            let full = lmask | (rmask << left.len());
            let certificate = terms
                .iter()
                .enumerate()
                .filter(|(i, _)| full >> i & 1 == 1)
                .map(|(_, t)| t.clone())
                .collect();
            return Ok(SolveResult {
                solvable: true,
                certificate: Some(certificate),
                comparisons,
            });
        }
    }
    Ok(SolveResult {
        solvable: false,
        certificate: None,
        comparisons,
    })
}
