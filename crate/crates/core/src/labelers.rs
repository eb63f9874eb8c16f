//! The recursive labelings on a downward graph: the terminal path label
//! `t̂_D`, the committee model `ŝ_D`, and `h^ρ_D`, which runs the same
//! committee recursion but initializes empty-committee vertices from a
//! min-dominant family `ρ`.
//!
//! Vertices are processed layer by layer in increasing max, so every value
//! read during the recursion belongs to a strictly lower layer.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::DownwardGraph;
use crate::lattice::{advance_odometer, Domain, Point};
use crate::rules::{check_probability, RuleDescriptor};
use crate::seed::SeededHash;

pub const DEFAULT_TUPLE_CAP: u64 = 20_000;

const SELECT_DEFINED_TAG: u64 = 0x5E1;
const SELECT_INDEX_TAG: u64 = 0x5E2;
const RHO_TAG: u64 = 0x240;

/// One committee member's report `(y_i, n_i)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Report(pub Point, pub u64);

impl Report {
    pub fn point(&self) -> &Point {
        &self.0
    }

    pub fn value(&self) -> u64 {
        self.1
    }
}

/// A partial selection function `F[z, (y_1,n_1), …, (y_r,n_r)]`.
///
/// Implementations return the *index* of the chosen report, so the value a
/// committee reports is always one of its members' values.
pub trait SelectionFunction {
    fn arity(&self) -> usize;

    fn select(&self, z: &Point, reports: &[Report]) -> Option<usize>;

    /// The value `F` returns; only test doubles should override this.
    fn evaluate(&self, z: &Point, reports: &[Report]) -> Option<u64> {
        self.select(z, reports).map(|i| reports[i].value())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum PartialSelection {
    /// Always defined; picks the smallest report, ties to the lowest index.
    MinIndex { arity: usize },
    /// Always defined; picks report `index` (0-based).
    FixedIndex { arity: usize, index: usize },
    /// Defined with probability `q` per tuple; picks a hash-chosen index.
    SeededChoice { arity: usize, q: f64, seed: u64 },
    /// Defined exactly on the listed invocations.
    Table {
        arity: usize,
        entries: BTreeMap<(Point, Vec<Report>), usize>,
    },
}

impl PartialSelection {
    pub fn table(
        arity: usize,
        entries: impl IntoIterator<Item = (Point, Vec<Report>, usize)>,
    ) -> Result<Self> {
        if arity == 0 {
            return Err(Error::InvalidRule("selection arity must be at least 1".into()));
        }
        let mut map = BTreeMap::new();
        for (z, reports, index) in entries {
            if reports.len() != arity || index >= arity {
                return Err(Error::InvalidRule(format!(
                    "table entry at {z} has {} reports and index {index}, arity is {arity}",
                    reports.len()
                )));
            }
            map.insert((z, reports), index);
        }
        Ok(PartialSelection::Table {
            arity,
            entries: map,
        })
    }

    pub fn to_descriptor(&self) -> RuleDescriptor {
        match self {
            PartialSelection::MinIndex { arity } => {
                RuleDescriptor::new("min-index").with_param("arity", *arity)
            }
            PartialSelection::FixedIndex { arity, index } => RuleDescriptor::new("fixed-index")
                .with_param("arity", *arity)
                .with_param("index", *index + 1),
            PartialSelection::SeededChoice { arity, q, seed } => {
                RuleDescriptor::new("seeded-choice")
                    .with_param("arity", *arity)
                    .with_param("q", *q)
                    .with_seed(*seed)
            }
            PartialSelection::Table { arity, entries } => {
                let list: Vec<TableEntryDoc> = entries
                    .iter()
                    .map(|((z, reports), &index)| TableEntryDoc {
                        z: z.clone(),
                        reports: reports.clone(),
                        select: index + 1,
                    })
                    .collect();
                RuleDescriptor::new("table")
                    .with_param("arity", *arity)
                    .with_param("entries", serde_json::to_value(list).expect("entries serialize"))
            }
        }
    }

    pub fn from_descriptor(d: &RuleDescriptor) -> Result<Self> {
        let arity: usize = d.param("arity")?;
        if arity == 0 {
            return Err(Error::InvalidRule("selection arity must be at least 1".into()));
        }
        match d.name.as_str() {
            "min-index" => {
                d.only_params(&["arity"])?;
                Ok(PartialSelection::MinIndex { arity })
            }
            "fixed-index" => {
                d.only_params(&["arity", "index"])?;
                let index: usize = d.param("index")?;
                if index == 0 || index > arity {
                    return Err(Error::InvalidRule(format!(
                        "fixed-index: index {index} outside 1..={arity}"
                    )));
                }
                Ok(PartialSelection::FixedIndex {
                    arity,
                    index: index - 1,
                })
            }
            "seeded-choice" => {
                d.only_params(&["arity", "q"])?;
                Ok(PartialSelection::SeededChoice {
                    arity,
                    q: check_probability("seeded-choice", d.param("q")?)?,
                    seed: d.require_seed()?,
                })
            }
            "table" => {
                d.only_params(&["arity", "entries"])?;
                let entries: Vec<TableEntryDoc> = d.param("entries")?;
                let mut parsed = Vec::with_capacity(entries.len());
                for e in entries {
                    if e.select == 0 {
                        return Err(Error::InvalidRule("table: select is 1-based".into()));
                    }
                    parsed.push((e.z, e.reports, e.select - 1));
                }
                PartialSelection::table(arity, parsed)
            }
            _ => Err(d.unknown()),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TableEntryDoc {
    z: Point,
    reports: Vec<Report>,
    select: usize,
}

impl SelectionFunction for PartialSelection {
    fn arity(&self) -> usize {
        match self {
            PartialSelection::MinIndex { arity }
            | PartialSelection::FixedIndex { arity, .. }
            | PartialSelection::SeededChoice { arity, .. }
            | PartialSelection::Table { arity, .. } => *arity,
        }
    }

    fn select(&self, z: &Point, reports: &[Report]) -> Option<usize> {
        match self {
            PartialSelection::MinIndex { .. } => reports
                .iter()
                .enumerate()
                .min_by_key(|(i, r)| (r.value(), *i))
                .map(|(i, _)| i),
            PartialSelection::FixedIndex { index, .. } => Some(*index),
            PartialSelection::SeededChoice { q, seed, .. } => {
                let mut h = SeededHash::new(*seed, SELECT_DEFINED_TAG).point(z);
                for r in reports {
                    h = h.point(r.point()).u64(r.value());
                }
                if h.unit() < *q {
                    Some(h.u64(SELECT_INDEX_TAG).below(reports.len() as u64) as usize)
                } else {
                    None
                }
            }
            PartialSelection::Table { entries, .. } => {
                entries.get(&(z.clone(), reports.to_vec())).copied()
            }
        }
    }
}

/// One recorded call of a selection function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Invocation {
    pub z: Point,
    pub reports: Vec<Report>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelectionViolation {
    pub invocation: Invocation,
    pub returned: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SelectionValidation {
    pub holds: bool,
    pub defined: usize,
    pub witnesses: Vec<SelectionViolation>,
}

/// Checks that every defined invocation returned one of its report values.
pub fn validate_selection(
    f: &dyn SelectionFunction,
    samples: &[Invocation],
) -> SelectionValidation {
    let mut out = SelectionValidation {
        holds: true,
        ..Default::default()
    };
    for inv in samples {
        if let Some(v) = f.evaluate(&inv.z, &inv.reports) {
            out.defined += 1;
            if !inv.reports.iter().any(|r| r.value() == v) {
                out.holds = false;
                out.witnesses.push(SelectionViolation {
                    invocation: inv.clone(),
                    returned: v,
                });
            }
        }
    }
    out
}

/// A min-dominant initializing family: `ρ_D(x) ≥ min(x)` for all `x ∈ D`.
#[derive(Clone, Debug, PartialEq)]
pub enum RhoFamily {
    Min,
    Max,
    /// `min(x) + offset(x)`, offset 0 for unlisted points. Negative offsets
    /// are accepted here and rejected when evaluated.
    MinPlusOffsetTable(BTreeMap<Point, i64>),
    /// `min(x) + h(x) mod (max_offset + 1)`.
    SeededOffset { max_offset: u64, seed: u64 },
    /// On a domain capped by some `E^k`, a `t`-log bounded design for that
    /// cube (see [`crate::subsetsum::design_t_log_rho`]); on any other
    /// domain, `SeededOffset { max_offset: 3, seed }`.
    TLogDesigned { t: u32, seed: u64 },
}

impl RhoFamily {
    /// `ρ_D` on every point of `domain`, in canonical order.
    pub fn evaluate(&self, domain: &Domain) -> Result<Vec<u64>> {
        let values: Vec<u64> = match self {
            RhoFamily::Min => domain.points().iter().map(Point::min_coord).collect(),
            RhoFamily::Max => domain.points().iter().map(Point::max_coord).collect(),
            RhoFamily::MinPlusOffsetTable(offsets) => {
                let mut out = Vec::with_capacity(domain.len());
                for p in domain.points() {
                    let off = offsets.get(p).copied().unwrap_or(0);
                    let v = i128::from(p.min_coord()) + i128::from(off);
                    if v < 0 {
                        return Err(Error::MinDominanceViolation {
                            point: p.clone(),
                            value: 0,
                            min: p.min_coord(),
                        });
                    }
                    out.push(u64::try_from(v).map_err(|_| {
                        Error::InvalidRule(format!("rho offset overflows at {p}"))
                    })?);
                }
                out
            }
            RhoFamily::SeededOffset { max_offset, seed } => domain
                .points()
                .iter()
                .map(|p| {
                    let off = SeededHash::new(*seed, RHO_TAG)
                        .point(p)
                        .below(max_offset.saturating_add(1));
                    p.min_coord() + off
                })
                .collect(),
            RhoFamily::TLogDesigned { t, seed } => {
                match crate::lattice::implied_cap_cube(domain) {
                    Ok(cube) => {
                        return crate::subsetsum::design_t_log_rho(domain, &cube, *t, *seed)?
                            .evaluate(domain)
                    }
                    Err(_) => {
                        return RhoFamily::SeededOffset {
                            max_offset: 3,
                            seed: *seed,
                        }
                        .evaluate(domain)
                    }
                }
            }
        };
        if let Some((p, &v)) = domain
            .points()
            .iter()
            .zip(&values)
            .find(|(p, &v)| v < p.min_coord())
        {
            return Err(Error::MinDominanceViolation {
                point: p.clone(),
                value: v,
                min: p.min_coord(),
            });
        }
        Ok(values)
    }

    pub fn to_descriptor(&self) -> RuleDescriptor {
        match self {
            RhoFamily::Min => RuleDescriptor::new("min"),
            RhoFamily::Max => RuleDescriptor::new("max"),
            RhoFamily::MinPlusOffsetTable(offsets) => {
                let list: Vec<(Point, i64)> =
                    offsets.iter().map(|(p, o)| (p.clone(), *o)).collect();
                RuleDescriptor::new("min-plus-offset-table")
                    .with_param("offsets", serde_json::to_value(list).expect("offsets serialize"))
            }
            RhoFamily::SeededOffset { max_offset, seed } => RuleDescriptor::new("seeded-offset")
                .with_param("maxOffset", *max_offset)
                .with_seed(*seed),
            RhoFamily::TLogDesigned { t, seed } => RuleDescriptor::new("tlog-designed")
                .with_param("t", *t)
                .with_seed(*seed),
        }
    }

    pub fn from_descriptor(d: &RuleDescriptor) -> Result<Self> {
        match d.name.as_str() {
            "min" => {
                d.only_params(&[])?;
                Ok(RhoFamily::Min)
            }
            "max" => {
                d.only_params(&[])?;
                Ok(RhoFamily::Max)
            }
            "min-plus-offset-table" => {
                d.only_params(&["offsets"])?;
                let list: Vec<(Point, i64)> = d.param("offsets")?;
                Ok(RhoFamily::MinPlusOffsetTable(list.into_iter().collect()))
            }
            "seeded-offset" => {
                d.only_params(&["maxOffset"])?;
                Ok(RhoFamily::SeededOffset {
                    max_offset: d.param("maxOffset")?,
                    seed: d.require_seed()?,
                })
            }
            "tlog-designed" => {
                d.only_params(&["t"])?;
                let t: u32 = d.param("t")?;
                if t == 0 {
                    return Err(Error::InvalidRule("tlog-designed: t must be at least 1".into()));
                }
                Ok(RhoFamily::TLogDesigned {
                    t,
                    seed: d.require_seed()?,
                })
            }
            _ => Err(d.unknown()),
        }
    }
}

/// A total labeling of a domain plus, per vertex, whether its committee
/// value set `Φ_z` was empty.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Labeling {
    domain: Domain,
    values: Vec<u64>,
    phi_empty: Vec<bool>,
    phi: Option<Vec<BTreeSet<u64>>>,
}

impl Labeling {
    pub fn from_parts(domain: Domain, values: Vec<u64>, phi_empty: Vec<bool>) -> Result<Self> {
        if values.len() != domain.len() || phi_empty.len() != domain.len() {
            return Err(Error::Config(format!(
                "labeling has {} values and {} flags for {} points",
                values.len(),
                phi_empty.len(),
                domain.len()
            )));
        }
        Ok(Labeling {
            domain,
            values,
            phi_empty,
            phi: None,
        })
    }

    /// `f(x)` for every point, with every `Φ` flagged empty.
    pub fn from_fn(domain: &Domain, f: impl Fn(&Point) -> u64) -> Self {
        Labeling {
            values: domain.points().iter().map(f).collect(),
            phi_empty: vec![true; domain.len()],
            domain: domain.clone(),
            phi: None,
        }
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn phi_empty_flags(&self) -> &[bool] {
        &self.phi_empty
    }

    pub fn value(&self, p: &Point) -> Option<u64> {
        self.domain.index_of(p).map(|i| self.values[i])
    }

    pub fn phi_empty(&self, p: &Point) -> Option<bool> {
        self.domain.index_of(p).map(|i| self.phi_empty[i])
    }

    /// `Φ_z` as a value set, when the labeling was computed with
    /// [`LabelOptions::retain_phi`].
    pub fn phi(&self, p: &Point) -> Option<&BTreeSet<u64>> {
        let i = self.domain.index_of(p)?;
        self.phi.as_ref().map(|sets| &sets[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Point, u64)> {
        self.domain.points().iter().zip(self.values.iter().copied())
    }

    /// Overwrites one value; used to inject faults in verification tests.
    pub fn set_value(&mut self, p: &Point, value: u64) -> Result<()> {
        let i = self
            .domain
            .index_of(p)
            .ok_or_else(|| Error::PointNotInDomain(p.clone()))?;
        self.values[i] = value;
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct LabelingDoc {
    values: Vec<(Point, u64)>,
    phi_empty: Vec<(Point, bool)>,
}

impl Serialize for Labeling {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        LabelingDoc {
            values: self.iter().map(|(p, v)| (p.clone(), v)).collect(),
            phi_empty: self
                .domain
                .points()
                .iter()
                .cloned()
                .zip(self.phi_empty.iter().copied())
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Labeling {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let doc = LabelingDoc::deserialize(d)?;
        let k = doc.values.first().map_or(1, |(p, _)| p.arity());
        let values: BTreeMap<Point, u64> = doc.values.into_iter().collect();
        let flags: BTreeMap<Point, bool> = doc.phi_empty.into_iter().collect();
        if values.keys().ne(flags.keys()) {
            return Err(D::Error::custom("values and phiEmpty cover different points"));
        }
        let domain = Domain::new(k, values.keys().cloned()).map_err(D::Error::custom)?;
        Labeling::from_parts(
            domain,
            values.into_values().collect(),
            flags.into_values().collect(),
        )
        .map_err(D::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelOptions {
    /// Largest `|G^z|^r` enumerated at one vertex.
    pub tuple_cap: u64,
    /// Keep every `Φ_z` value set on the labeling.
    pub retain_phi: bool,
    /// Shuffle the processing order inside each layer.
    pub shuffle_seed: Option<u64>,
}

impl Default for LabelOptions {
    fn default() -> Self {
        LabelOptions {
            tuple_cap: DEFAULT_TUPLE_CAP,
            retain_phi: false,
            shuffle_seed: None,
        }
    }
}

fn processing_order(graph: &DownwardGraph, shuffle_seed: Option<u64>) -> Vec<usize> {
    let mut order = graph.layer_order();
    if let Some(seed) = shuffle_seed {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let points = graph.points();
        let mut start = 0;
        while start < order.len() {
            let m = points[order[start]].max_coord();
            let end = order[start..]
                .iter()
                .position(|&i| points[i].max_coord() != m)
                .map_or(order.len(), |off| start + off);
            order[start..end].shuffle(&mut rng);
            start = end;
        }
    }
    order
}

/// `t̂_D`: `max(z)` at terminal `z`, otherwise the least `min` over the
/// terminal vertices reachable from `z`.
pub fn t_hat(graph: &DownwardGraph) -> Labeling {
    let n = graph.len();
    let points = graph.points();
    // Least min over reachable terminals, counting z itself when terminal.
    let mut reach_min = vec![0u64; n];
    let mut values = vec![0u64; n];
    let mut phi_empty = vec![false; n];
    for i in graph.layer_order() {
        let children = graph.children_of(i);
        if children.is_empty() {
            reach_min[i] = points[i].min_coord();
            values[i] = points[i].max_coord();
            phi_empty[i] = true;
        } else {
            let m = children
                .iter()
                .map(|&c| reach_min[c])
                .min()
                .expect("children are nonempty");
            reach_min[i] = m;
            values[i] = m;
        }
    }
    Labeling {
        domain: graph.domain().clone(),
        values,
        phi_empty,
        phi: None,
    }
}

/// `ŝ_D`: the committee model, with empty-committee vertices set to `max(z)`.
pub fn s_hat(
    graph: &DownwardGraph,
    selection: &dyn SelectionFunction,
    options: &LabelOptions,
) -> Result<Labeling> {
    let init: Vec<u64> = graph.points().iter().map(Point::max_coord).collect();
    committee_recursion(graph, selection, &init, options)
}

/// `h^ρ_D`: the committee model, with empty-committee vertices set to `ρ_D(z)`.
pub fn h_rho(
    graph: &DownwardGraph,
    selection: &dyn SelectionFunction,
    rho: &RhoFamily,
    options: &LabelOptions,
) -> Result<Labeling> {
    let init = rho.evaluate(graph.domain())?;
    committee_recursion(graph, selection, &init, options)
}

fn committee_recursion(
    graph: &DownwardGraph,
    selection: &dyn SelectionFunction,
    init: &[u64],
    options: &LabelOptions,
) -> Result<Labeling> {
    let r = selection.arity();
    if r == 0 {
        return Err(Error::InvalidRule("selection arity must be at least 1".into()));
    }
    let n = graph.len();
    let points = graph.points();
    let mut values = vec![0u64; n];
    let mut phi_empty = vec![true; n];
    let mut phi_sets = options.retain_phi.then(|| vec![BTreeSet::new(); n]);

    for z in processing_order(graph, options.shuffle_seed) {
        let children = graph.children_of(z);
        if children.is_empty() {
            values[z] = init[z];
            continue;
        }
        let tuples = (children.len() as u128).checked_pow(r as u32).unwrap_or(u128::MAX);
        if tuples > u128::from(options.tuple_cap) {
            return Err(Error::TupleBudgetExceeded {
                vertex: points[z].clone(),
                tuples,
                cap: options.tuple_cap,
            });
        }
        // n_i is ŝ(y_i) when Φ_{y_i} is nonempty and min(y_i) otherwise;
        // never ρ(y_i).
        let report_of = |c: usize| {
            let n = if phi_empty[c] { points[c].min_coord() } else { values[c] };
            Report(points[c].clone(), n)
        };
        let member_reports: Vec<Report> = children.iter().map(|&c| report_of(c)).collect();

        let mut best: Option<u64> = None;
        let mut set = BTreeSet::new();
        let mut digits = vec![0u64; r];
        let mut reports: Vec<Report> = vec![member_reports[0].clone(); r];
        loop {
            for (slot, &d) in reports.iter_mut().zip(&digits) {
                slot.clone_from(&member_reports[d as usize]);
            }
            if let Some(idx) = selection.select(&points[z], &reports) {
                if idx >= r {
                    return Err(Error::InvalidRule(format!(
                        "selection returned index {idx} for arity {r}"
                    )));
                }
                let v = reports[idx].value();
                best = Some(best.map_or(v, |b| b.min(v)));
                if phi_sets.is_some() {
                    set.insert(v);
                }
            }
            if !advance_odometer(&mut digits, children.len() as u64) {
                break;
            }
        }
        match best {
            Some(v) => {
                values[z] = v;
                phi_empty[z] = false;
            }
            None => values[z] = init[z],
        }
        if let Some(sets) = phi_sets.as_mut() {
            sets[z] = set;
        }
    }
    Ok(Labeling {
        domain: graph.domain().clone(),
        values,
        phi_empty,
        phi: phi_sets,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_induced, EdgeRule};
    use proptest::prelude::*;

    fn pt(c: &[u64]) -> Point {
        Point::new(c.to_vec()).unwrap()
    }

    fn graph(points: &[&[u64]], edges: &[(&[u64], &[u64])]) -> DownwardGraph {
        let d = Domain::new(2, points.iter().map(|c| pt(c))).unwrap();
        let rule = EdgeRule::Explicit(edges.iter().map(|(a, b)| (pt(a), pt(b))).collect());
        build_induced(&rule, &d, true).unwrap()
    }

    // Brute-force oracle: follow every path from z and collect the last
    // vertices of terminal ones.
    fn t_hat_by_paths(g: &DownwardGraph, z: usize) -> u64 {
        if g.is_terminal_index(z) {
            return g.points()[z].max_coord();
        }
        let mut terminal_mins = Vec::new();
        let mut stack = vec![z];
        while let Some(v) = stack.pop() {
            if g.is_terminal_index(v) {
                terminal_mins.push(g.points()[v].min_coord());
            } else {
                stack.extend_from_slice(g.children_of(v));
            }
        }
        terminal_mins.into_iter().min().unwrap()
    }

    #[test]
    fn t_hat_examples() {
        let g = graph(&[&[2, 5]], &[]);
        assert_eq!(t_hat(&g).value(&pt(&[2, 5])), Some(5));

        let g = graph(&[&[5, 6], &[1, 2]], &[(&[5, 6], &[1, 2])]);
        let t = t_hat(&g);
        assert_eq!(t.value(&pt(&[5, 6])), Some(1));
        assert_eq!(t.value(&pt(&[1, 2])), Some(2));

        let g = graph(
            &[&[4, 5], &[0, 3], &[2, 2]],
            &[(&[4, 5], &[0, 3]), (&[4, 5], &[2, 2])],
        );
        assert_eq!(t_hat(&g).value(&pt(&[4, 5])), Some(0));
    }

    #[test]
    fn t_hat_matches_path_enumeration() {
        for seed in 0..200u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            use rand::Rng;
            let n = rng.gen_range(1..=12);
            let d = Domain::new(
                2,
                (0..n).map(|_| pt(&[rng.gen_range(0..7), rng.gen_range(0..7)])),
            )
            .unwrap();
            let g = build_induced(
                &EdgeRule::SeededRandom {
                    density: rng.gen_range(0.1..0.7),
                    seed,
                },
                &d,
                true,
            )
            .unwrap();
            let t = t_hat(&g);
            for i in 0..g.len() {
                assert_eq!(t.values()[i], t_hat_by_paths(&g, i), "seed {seed} vertex {i}");
            }
        }
    }

    #[test]
    fn empty_committees_take_max() {
        let g = graph(&[&[1, 4], &[0, 2]], &[(&[1, 4], &[0, 2])]);
        // A selection that is never defined leaves every Φ empty.
        let never = PartialSelection::SeededChoice {
            arity: 2,
            q: 0.0,
            seed: 1,
        };
        let s = s_hat(&g, &never, &LabelOptions::default()).unwrap();
        assert_eq!(s.value(&pt(&[1, 4])), Some(4));
        assert_eq!(s.phi_empty(&pt(&[1, 4])), Some(true));
    }

    #[test]
    fn committee_reports_use_min_of_empty_children_not_rho() {
        // z=(3,6) -> y=(1,4) -> w=(0,2). F is only defined at z.
        let g = graph(
            &[&[3, 6], &[1, 4], &[0, 2]],
            &[(&[3, 6], &[1, 4]), (&[1, 4], &[0, 2])],
        );
        let f = PartialSelection::table(1, [(pt(&[3, 6]), vec![Report(pt(&[1, 4]), 1)], 0)]).unwrap();
        let rho = RhoFamily::MinPlusOffsetTable(BTreeMap::from([(pt(&[1, 4]), 2)]));
        let h = h_rho(&g, &f, &rho, &LabelOptions::default()).unwrap();
        // y has an empty committee, so h(y) = rho(y) = 3, but it reports
        // min(y) = 1 upward.
        assert_eq!(h.value(&pt(&[1, 4])), Some(3));
        assert_eq!(h.value(&pt(&[3, 6])), Some(1));
        assert_eq!(h.phi_empty(&pt(&[3, 6])), Some(false));
    }

    #[test]
    fn h_rho_with_max_is_s_hat_and_min_gives_min_on_terminals() {
        let g = graph(
            &[&[3, 6], &[1, 4], &[0, 2], &[5, 5]],
            &[(&[3, 6], &[1, 4]), (&[3, 6], &[0, 2]), (&[1, 4], &[0, 2])],
        );
        let f = PartialSelection::MinIndex { arity: 2 };
        let opts = LabelOptions::default();
        let s = s_hat(&g, &f, &opts).unwrap();
        assert_eq!(h_rho(&g, &f, &RhoFamily::Max, &opts).unwrap(), s);
        let hm = h_rho(&g, &f, &RhoFamily::Min, &opts).unwrap();
        assert_eq!(hm.value(&pt(&[0, 2])), Some(0));
        assert_eq!(hm.value(&pt(&[5, 5])), Some(5));
    }

    #[test]
    fn min_dominance_violation_is_reported() {
        let g = graph(&[&[2, 3]], &[]);
        let rho = RhoFamily::MinPlusOffsetTable(BTreeMap::from([(pt(&[2, 3]), -1)]));
        let err = h_rho(&g, &PartialSelection::MinIndex { arity: 1 }, &rho, &LabelOptions::default())
            .unwrap_err();
        assert!(matches!(err, Error::MinDominanceViolation { ref point, .. } if *point == pt(&[2, 3])));
    }

    #[test]
    fn tuple_budget_is_enforced() {
        let d = Domain::new(2, (0..12).map(|i| pt(&[i, 11])).chain([pt(&[20, 20])])).unwrap();
        let g = build_induced(&EdgeRule::FullDownward, &d, true).unwrap();
        let f = PartialSelection::MinIndex { arity: 3 };
        let opts = LabelOptions {
            tuple_cap: 1000,
            ..Default::default()
        };
        assert!(matches!(
            s_hat(&g, &f, &opts),
            Err(Error::TupleBudgetExceeded { tuples: 1728, .. })
        ));
    }

    struct OffByOne;

    impl SelectionFunction for OffByOne {
        fn arity(&self) -> usize {
            1
        }
        fn select(&self, _: &Point, _: &[Report]) -> Option<usize> {
            Some(0)
        }
        fn evaluate(&self, _: &Point, reports: &[Report]) -> Option<u64> {
            Some(reports[0].value() + 1)
        }
    }

    #[test]
    fn selection_validation() {
        let z = pt(&[5, 5]);
        let samples = vec![
            Invocation {
                z: z.clone(),
                reports: vec![Report(pt(&[1, 2]), 1)],
            },
            Invocation {
                z: z.clone(),
                reports: vec![Report(pt(&[0, 3]), 0)],
            },
        ];
        for f in [
            PartialSelection::MinIndex { arity: 1 },
            PartialSelection::FixedIndex { arity: 1, index: 0 },
            PartialSelection::SeededChoice {
                arity: 1,
                q: 0.5,
                seed: 3,
            },
        ] {
            assert!(validate_selection(&f, &samples).holds);
        }
        let bad = validate_selection(&OffByOne, &samples);
        assert!(!bad.holds);
        assert_eq!(bad.witnesses.len(), 2);
        assert_eq!(bad.witnesses[0].returned, 2);

        // Padding a two-member committee by repeating a member.
        let y = pt(&[6, 8]);
        let padded = PartialSelection::table(
            2,
            [(pt(&[7, 11]), vec![Report(y.clone(), 4), Report(y.clone(), 4)], 1)],
        )
        .unwrap();
        let reports = vec![Report(y.clone(), 4), Report(y, 4)];
        assert_eq!(padded.evaluate(&pt(&[7, 11]), &reports), Some(4));
        assert!(validate_selection(&padded, &[Invocation { z: pt(&[7, 11]), reports }]).holds);
    }

    #[test]
    fn descriptors_round_trip() {
        let sels = [
            PartialSelection::MinIndex { arity: 2 },
            PartialSelection::FixedIndex { arity: 3, index: 2 },
            PartialSelection::SeededChoice {
                arity: 2,
                q: 0.5,
                seed: 4,
            },
            PartialSelection::table(1, [(pt(&[2, 2]), vec![Report(pt(&[0, 1]), 0)], 0)]).unwrap(),
        ];
        for s in sels {
            let json = serde_json::to_string(&s.to_descriptor()).unwrap();
            let d: RuleDescriptor = serde_json::from_str(&json).unwrap();
            assert_eq!(PartialSelection::from_descriptor(&d).unwrap(), s);
        }
        let rhos = [
            RhoFamily::Min,
            RhoFamily::Max,
            RhoFamily::MinPlusOffsetTable(BTreeMap::from([(pt(&[1, 2]), 3)])),
            RhoFamily::SeededOffset {
                max_offset: 5,
                seed: 2,
            },
            RhoFamily::TLogDesigned { t: 1, seed: 8 },
        ];
        for r in rhos {
            let json = serde_json::to_string(&r.to_descriptor()).unwrap();
            let d: RuleDescriptor = serde_json::from_str(&json).unwrap();
            assert_eq!(RhoFamily::from_descriptor(&d).unwrap(), r);
        }
        assert!(PartialSelection::from_descriptor(
            &RuleDescriptor::new("fixed-index").with_param("arity", 2).with_param("index", 3)
        )
        .is_err());
        assert!(RhoFamily::from_descriptor(&RuleDescriptor::new("seeded-offset").with_param("maxOffset", 2)).is_err());
    }

    #[test]
    fn labeling_json() {
        let g = graph(&[&[1, 4], &[0, 2]], &[(&[1, 4], &[0, 2])]);
        let s = s_hat(&g, &PartialSelection::MinIndex { arity: 1 }, &LabelOptions::default()).unwrap();
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(
            json,
            r#"{"values":[[[0,2],2],[[1,4],0]],"phiEmpty":[[[0,2],true],[[1,4],false]]}"#
        );
        let back: Labeling = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
    }

    fn random_instance(seed: u64) -> (DownwardGraph, PartialSelection) {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = rng.gen_range(2..=3);
        let n = rng.gen_range(1..=30);
        let d = Domain::new(
            k,
            (0..n).map(|_| Point::new((0..k).map(|_| rng.gen_range(0..9)).collect()).unwrap()),
        )
        .unwrap();
        let g = build_induced(
            &EdgeRule::SeededRandom {
                density: rng.gen_range(0.05..0.3),
                seed,
            },
            &d,
            true,
        )
        .unwrap();
        let arity = rng.gen_range(1..=2);
        let f = match rng.gen_range(0..3) {
            0 => PartialSelection::MinIndex { arity },
            1 => PartialSelection::FixedIndex {
                arity,
                index: arity - 1,
            },
            _ => PartialSelection::SeededChoice {
                arity,
                q: rng.gen_range(0.1..0.9),
                seed,
            },
        };
        (g, f)
    }

    proptest! {
        #[test]
        fn s_hat_structure(seed in any::<u64>()) {
            let (g, f) = random_instance(seed);
            let s = s_hat(&g, &f, &LabelOptions::default()).unwrap();
            for (i, p) in g.points().iter().enumerate() {
                prop_assert!(s.values()[i] <= p.max_coord());
                prop_assert_eq!(s.values()[i] == p.max_coord(), s.phi_empty_flags()[i]);
            }
        }

        #[test]
        fn intra_layer_order_is_irrelevant(seed in any::<u64>(), shuffle in any::<u64>()) {
            let (g, f) = random_instance(seed);
            let a = s_hat(&g, &f, &LabelOptions::default()).unwrap();
            let b = s_hat(&g, &f, &LabelOptions { shuffle_seed: Some(shuffle), ..Default::default() }).unwrap();
            prop_assert_eq!(a, b);
        }

        #[test]
        fn h_rho_agrees_with_s_hat(seed in any::<u64>(), rho_seed in any::<u64>()) {
            let (g, f) = random_instance(seed);
            let opts = LabelOptions::default();
            let s = s_hat(&g, &f, &opts).unwrap();
            let rho = RhoFamily::SeededOffset { max_offset: 6, seed: rho_seed };
            let rv = rho.evaluate(g.domain()).unwrap();
            let h = h_rho(&g, &f, &rho, &opts).unwrap();
            prop_assert_eq!(s.phi_empty_flags(), h.phi_empty_flags());
            for (i, &r) in rv.iter().enumerate() {
                if h.phi_empty_flags()[i] {
                    prop_assert_eq!(h.values()[i], r);
                } else {
                    prop_assert_eq!(h.values()[i], s.values()[i]);
                }
            }
        }
    }
}
