//! Regressive values, regressive regularity over a cube, the three-block
//! partition of `E^k`, exhaustive search for regular cubes, and the
//! pairwise jump-free check.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::labelers::Labeling;
use crate::lattice::{binomial, rank_vector, Cube, Domain, OrderType, Point};

/// Witnesses kept per `Neither` class.
pub const MAX_CLASS_WITNESSES: usize = 8;

pub const DEFAULT_CANDIDATE_CAP: u64 = 1_000_000;

/// `{n : f(x) = n < min(x) for some x ∈ X}`.
pub fn regressive_values<'a>(
    f: &Labeling,
    points: impl IntoIterator<Item = &'a Point>,
) -> Result<BTreeSet<u64>> {
    let mut out = BTreeSet::new();
    for x in points {
        let v = f
            .value(x)
            .ok_or_else(|| Error::PointNotInDomain(x.clone()))?;
        if v < x.min_coord() {
            out.insert(v);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClassCase {
    /// Every member maps to the same value, below `min(E)`.
    ConstantBelowMin(u64),
    /// Every member satisfies `f(x) ≥ min(x)`.
    MinDominant,
    /// Neither; carries members with `f(x) < min(x)`.
    Neither(Vec<Point>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassVerdict {
    pub order_type: OrderType,
    pub members: usize,
    pub case: ClassCase,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegularityReport {
    pub cube: Cube,
    pub classes: Vec<ClassVerdict>,
    pub regressive_values: BTreeSet<u64>,
    pub is_regular: bool,
}

impl RegularityReport {
    /// Regular cubes carry at most `k^k` regressive values on `E^k`.
    pub fn within_kk_bound(&self) -> bool {
        let k = self.cube.arity() as u32;
        (self.regressive_values.len() as u128) <= u128::from(k).pow(k)
    }

    pub fn neither_classes(&self) -> impl Iterator<Item = &ClassVerdict> {
        self.classes
            .iter()
            .filter(|c| matches!(c.case, ClassCase::Neither(_)))
    }
}

fn labeled_cube(f: &Labeling, cube: &Cube) -> Result<Vec<(Point, u64)>> {
    if cube.arity() != f.domain().arity() {
        return Err(Error::ArityMismatch {
            expected: f.domain().arity(),
            found: cube.arity(),
        });
    }
    cube.points()
        .map(|x| match f.value(&x) {
            Some(v) => Ok((x, v)),
            None => Err(Error::CubeNotContained { missing: x }),
        })
        .collect()
}

/// Classifies every order-type class of `E^k` under `f`.
pub fn check_regularity(f: &Labeling, cube: &Cube) -> Result<RegularityReport> {
    let labeled = labeled_cube(f, cube)?;
    let min_e = cube.min_element();
    let mut by_class: BTreeMap<OrderType, Vec<(Point, u64)>> = BTreeMap::new();
    for (x, v) in &labeled {
        by_class
            .entry(rank_vector(x))
            .or_default()
            .push((x.clone(), *v));
    }
    let classes: Vec<ClassVerdict> = by_class
        .into_iter()
        .map(|(order_type, members)| {
            let first = members[0].1;
            let case = if first < min_e && members.iter().all(|(_, v)| *v == first) {
                ClassCase::ConstantBelowMin(first)
            } else if members.iter().all(|(x, v)| *v >= x.min_coord()) {
                ClassCase::MinDominant
            } else {
                ClassCase::Neither(
                    members
                        .iter()
                        .filter(|(x, v)| *v < x.min_coord())
                        .take(MAX_CLASS_WITNESSES)
                        .map(|(x, _)| x.clone())
                        .collect(),
                )
            };
            ClassVerdict {
                order_type,
                members: members.len(),
                case,
            }
        })
        .collect();
    let is_regular = classes
        .iter()
        .all(|c| !matches!(c.case, ClassCase::Neither(_)));
    let regressive_values = labeled
        .iter()
        .filter(|(x, v)| *v < x.min_coord())
        .map(|(_, v)| *v)
        .collect();
    Ok(RegularityReport {
        cube: cube.clone(),
        classes,
        regressive_values,
        is_regular,
    })
}

/// `E^k_0`, `E^k_1`, `E^k_2`, each in lexicographic order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockPartition {
    pub e0: Vec<Point>,
    pub e1: Vec<Point>,
    pub e2: Vec<Point>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Block {
    #[serde(rename = "E0")]
    E0,
    #[serde(rename = "E1")]
    E1,
    #[serde(rename = "E2")]
    E2,
}

/// Which block `x` falls in, given `h(x)` and `min(E)`.
pub fn block_of(x: &Point, value: u64, min_e: u64) -> Block {
    if value < min_e {
        Block::E0
    } else if value < x.min_coord() {
        Block::E1
    } else {
        Block::E2
    }
}

pub fn partition_blocks(f: &Labeling, cube: &Cube) -> Result<BlockPartition> {
    let mut out = BlockPartition::default();
    for (x, v) in labeled_cube(f, cube)? {
        match block_of(&x, v, cube.min_element()) {
            Block::E0 => out.e0.push(x),
            Block::E1 => out.e1.push(x),
            Block::E2 => out.e2.push(x),
        }
    }
    Ok(out)
}

/// `p`-subsets of `field` in colexicographic order.
fn colex_subsets(field: &[u64], p: usize) -> impl Iterator<Item = Vec<u64>> + '_ {
    let n = field.len();
    let mut idx: Vec<usize> = (0..p).collect();
    let mut done = p > n || p == 0;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let current = idx.iter().map(|&i| field[i]).collect();
        // Bump the lowest position that can move, reset everything below it.
        let mut j = 0;
        loop {
            let limit = if j + 1 < p { idx[j + 1] } else { n };
            if idx[j] + 1 < limit {
                idx[j] += 1;
                for (i, slot) in idx.iter_mut().enumerate().take(j) {
                    *slot = i;
                }
                break;
            }
            j += 1;
            if j == p {
                done = true;
                break;
            }
        }
        Some(current)
    })
}

/// Every cube `E^k ⊆ D` with `|E| = p`, in colex order of `E` over the
/// sorted field.
pub fn candidate_cubes(domain: &Domain, p: usize, cap: u64) -> Result<Vec<Cube>> {
    let field: Vec<u64> = domain.field().into_iter().collect();
    let subsets = binomial(field.len() as u64, p as u64);
    if subsets > u128::from(cap) {
        return Err(Error::CandidateBudgetExceeded {
            candidates: subsets,
            cap,
        });
    }
    let mut out = Vec::new();
    for base in colex_subsets(&field, p) {
        let cube = Cube::new(base, domain.arity())?;
        if domain.contains_cube(&cube) {
            out.push(cube);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CandidateFailure {
    #[serde(rename = "E")]
    pub base: Vec<u64>,
    pub neither_classes: Vec<OrderType>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CubeSearch {
    pub found: Option<(Cube, RegularityReport)>,
    /// `C(|field(D)|, p)`.
    pub subsets: u128,
    /// Subsets whose cube lies inside `D`.
    pub candidates: usize,
    /// Candidates examined before the search stopped.
    pub examined: usize,
    pub failures: Vec<CandidateFailure>,
}

impl CubeSearch {
    pub fn exhausted(&self) -> bool {
        self.found.is_none()
    }
}

/// Searches the `p`-subsets `E` of `field(D)` with `E^k ⊆ D` for one over
/// which `family(D)` is regressively regular. A finite search: finding
/// nothing is a legitimate outcome.
pub fn find_regular_cube(
    family: &dyn Fn(&Domain) -> Result<Labeling>,
    domain: &Domain,
    p: usize,
    candidate_cap: u64,
) -> Result<CubeSearch> {
    if p < 2 {
        return Err(Error::InvalidCube(format!("cube size p = {p} must be at least 2")));
    }
    let subsets = binomial(domain.field().len() as u64, p as u64);
    let cubes = candidate_cubes(domain, p, candidate_cap)?;
    let mut search = CubeSearch {
        found: None,
        subsets,
        candidates: cubes.len(),
        examined: 0,
        failures: Vec::new(),
    };
    if cubes.is_empty() {
        return Ok(search);
    }
    let f = family(domain)?;
    for cube in cubes {
        search.examined += 1;
        let report = check_regularity(&f, &cube)?;
        if report.is_regular {
            search.found = Some((cube, report));
            break;
        }
        search.failures.push(CandidateFailure {
            base: cube.base().to_vec(),
            neither_classes: report
                .neither_classes()
                .map(|c| c.order_type.clone())
                .collect(),
        });
    }
    Ok(search)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JumpWitness {
    pub point: Point,
    pub fa: u64,
    pub fb: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JumpFreeReport {
    pub holds: bool,
    /// Points of `A ∩ B` whose antecedent held.
    pub checked: Vec<Point>,
    pub witnesses: Vec<JumpWitness>,
}

/// For every `x ∈ A ∩ B` with `A_x ⊆ B_x` and `f_A = f_B` on `A_x`, checks
/// `f_A(x) ≥ f_B(x)`.
pub fn jump_free_check(fa: &Labeling, fb: &Labeling) -> JumpFreeReport {
    let mut sorted: Vec<&Point> = fa.domain().points().iter().collect();
    sorted.sort_by_key(|p| p.max_coord());
    let mut report = JumpFreeReport {
        holds: true,
        checked: Vec::new(),
        witnesses: Vec::new(),
    };
    // `agree` covers every point of A strictly below the current layer.
    let mut agree = true;
    let mut start = 0;
    while start < sorted.len() {
        let m = sorted[start].max_coord();
        let end = sorted[start..]
            .iter()
            .position(|p| p.max_coord() != m)
            .map_or(sorted.len(), |off| start + off);
        let layer = &sorted[start..end];
        if agree {
            for &x in layer {
                if let Some(vb) = fb.value(x) {
                    let va = fa.value(x).expect("x is in A");
                    report.checked.push(x.clone());
                    if va < vb {
                        report.holds = false;
                        report.witnesses.push(JumpWitness {
                            point: x.clone(),
                            fa: va,
                            fb: vb,
                        });
                    }
                }
            }
        }
        agree = agree && layer.iter().all(|&y| fb.value(y) == fa.value(y));
        start = end;
    }
    report
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct ClassDoc<'a> {
    ranks: &'a OrderType,
    case: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    value: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    witnesses: Option<&'a [Point]>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct ReportDoc<'a> {
    #[serde(rename = "E")]
    base: &'a [u64],
    regular: bool,
    classes: Vec<ClassDoc<'a>>,
    regressive_values: &'a BTreeSet<u64>,
}

impl Serialize for RegularityReport {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ReportDoc {
            base: self.cube.base(),
            regular: self.is_regular,
            classes: self
                .classes
                .iter()
                .map(|c| match &c.case {
                    ClassCase::ConstantBelowMin(v) => ClassDoc {
                        ranks: &c.order_type,
                        case: "const",
                        value: Some(*v),
                        witnesses: None,
                    },
                    ClassCase::MinDominant => ClassDoc {
                        ranks: &c.order_type,
                        case: "minDom",
                        value: None,
                        witnesses: None,
                    },
                    ClassCase::Neither(w) => ClassDoc {
                        ranks: &c.order_type,
                        case: "neither",
                        value: None,
                        witnesses: Some(w),
                    },
                })
                .collect(),
            regressive_values: &self.regressive_values,
        }
        .serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_induced, EdgeRule};
    use crate::labelers::{h_rho, s_hat, t_hat, LabelOptions, PartialSelection, RhoFamily};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pt(c: &[u64]) -> Point {
        Point::new(c.to_vec()).unwrap()
    }

    #[test]
    fn regressive_value_examples() {
        let d = Domain::new(2, [pt(&[3, 5]), pt(&[4, 4])]).unwrap();
        let f = Labeling::from_fn(&d, |p| p.min_coord());
        assert!(regressive_values(&f, d.points()).unwrap().is_empty());
        let g = Labeling::from_fn(&d, |p| if *p == pt(&[3, 5]) { 2 } else { 9 });
        assert_eq!(
            regressive_values(&g, [&pt(&[3, 5])]).unwrap(),
            BTreeSet::from([2])
        );
        let zero = Labeling::from_fn(&d, |_| 0);
        assert_eq!(regressive_values(&zero, d.points()).unwrap(), BTreeSet::from([0]));
        assert!(regressive_values(&zero, [&pt(&[9, 9])]).is_err());
    }

    #[test]
    fn regularity_trivial_cases() {
        let cube = Cube::new([3, 5, 8], 2).unwrap();
        let d = cube.to_domain();
        let constant = Labeling::from_fn(&d, |_| 1);
        let r = check_regularity(&constant, &cube).unwrap();
        assert!(r.is_regular);
        assert_eq!(r.classes.len(), 3);
        assert!(r.classes.iter().all(|c| c.case == ClassCase::ConstantBelowMin(1)));
        assert_eq!(r.regressive_values, BTreeSet::from([1]));

        let mins = Labeling::from_fn(&d, |p| p.min_coord());
        let r = check_regularity(&mins, &cube).unwrap();
        assert!(r.is_regular);
        assert!(r.classes.iter().all(|c| c.case == ClassCase::MinDominant));
        assert!(r.regressive_values.is_empty());

        let small = Cube::new([3, 4], 2).unwrap();
        assert!(check_regularity(&Labeling::from_fn(&small.to_domain(), |_| 0), &cube).is_err());
    }

    // Exhaustive per-class oracle written independently of `check_regularity`.
    fn class_ok(members: &[(Vec<u64>, u64)], min_e: u64) -> bool {
        let constant = members.iter().all(|(_, v)| *v == members[0].1 && *v < min_e);
        let dominant = members.iter().all(|(x, v)| *v >= *x.iter().min().unwrap());
        constant || dominant
    }

    #[test]
    fn diagonal_point_at_min_e() {
        // f = min(x) everywhere except f(e1,e1) = min(E): the diagonal
        // class then has (e0,e0) -> e0 >= e0 and (e1,e1) -> e0 < e1.
        let cube = Cube::new([2, 6], 2).unwrap();
        let d = cube.to_domain();
        let f = Labeling::from_fn(&d, |p| if *p == pt(&[6, 6]) { 2 } else { p.min_coord() });
        let r = check_regularity(&f, &cube).unwrap();
        assert!(!r.is_regular);
        let diag = r.classes.iter().find(|c| c.order_type.ranks() == [0, 0]).unwrap();
        assert_eq!(diag.case, ClassCase::Neither(vec![pt(&[6, 6])]));
        let oracle: Vec<(Vec<u64>, u64)> = vec![(vec![2, 2], 2), (vec![6, 6], 2)];
        assert!(!class_ok(&oracle, 2));
        assert_eq!(r.neither_classes().count(), 1);
    }

    #[test]
    fn blocks() {
        let cube = Cube::new([2, 6], 2).unwrap();
        let d = cube.to_domain();
        let mins = Labeling::from_fn(&d, |p| p.min_coord());
        let b = partition_blocks(&mins, &cube).unwrap();
        assert!(b.e0.is_empty() && b.e1.is_empty());
        assert_eq!(b.e2.len(), 4);
        let low = Labeling::from_fn(&d, |_| 1);
        let b = partition_blocks(&low, &cube).unwrap();
        assert_eq!(b.e0.len(), 4);
        let mixed = Labeling::from_fn(&d, |p| if *p == pt(&[6, 6]) { 3 } else { p.min_coord() });
        let b = partition_blocks(&mixed, &cube).unwrap();
        assert_eq!(b.e1, vec![pt(&[6, 6])]);
    }

    #[test]
    fn colex_order() {
        let subsets: Vec<Vec<u64>> = colex_subsets(&[1, 2, 3, 4], 2).collect();
        assert_eq!(
            subsets,
            vec![vec![1, 2], vec![1, 3], vec![2, 3], vec![1, 4], vec![2, 4], vec![3, 4]]
        );
        assert_eq!(colex_subsets(&[1, 2], 3).count(), 0);
        assert_eq!(colex_subsets(&[1, 2, 3, 4, 5], 3).count(), 10);
    }

    #[test]
    fn search_trivial_cases() {
        let cube = Cube::new([1, 4], 2).unwrap();
        let d = cube.to_domain();
        let mins = |d: &Domain| Ok(Labeling::from_fn(d, |p| p.min_coord()));
        let s = find_regular_cube(&mins, &d, 2, DEFAULT_CANDIDATE_CAP).unwrap();
        assert_eq!(s.found.unwrap().0, cube);

        let sparse = Domain::new(2, [pt(&[1, 4]), pt(&[4, 1])]).unwrap();
        let s = find_regular_cube(&mins, &sparse, 2, DEFAULT_CANDIDATE_CAP).unwrap();
        assert!(s.exhausted());
        assert_eq!(s.candidates, 0);

        let wide = Domain::new(2, (0..40).map(|i| pt(&[i, i]))).unwrap();
        assert!(matches!(
            find_regular_cube(&mins, &wide, 4, 1000),
            Err(Error::CandidateBudgetExceeded { .. })
        ));
        assert!(find_regular_cube(&mins, &d, 1, 10).is_err());
    }

    // Independent search oracle: all p-subsets by bitmask, containment by
    // membership, regularity by `class_ok`, first hit in colex order.
    fn oracle_search(f: &Labeling, d: &Domain, p: usize) -> Option<Vec<u64>> {
        let field: Vec<u64> = d.field().into_iter().collect();
        let n = field.len();
        let mut hits = Vec::new();
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize != p {
                continue;
            }
            let e: Vec<u64> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| field[i]).collect();
            let mut pts = Vec::new();
            for &a in &e {
                for &b in &e {
                    pts.push(vec![a, b]);
                }
            }
            if !pts.iter().all(|c| d.contains(&pt(c))) {
                continue;
            }
            type Class = Vec<(Vec<u64>, u64)>;
            let mut classes: BTreeMap<(bool, bool), Class> = BTreeMap::new();
            for c in pts {
                let key = (c[0] < c[1], c[0] == c[1]);
                let v = f.value(&pt(&c)).unwrap();
                classes.entry(key).or_default().push((c, v));
            }
            if classes.values().all(|m| class_ok(m, e[0])) {
                // colex key: compare from the largest element down
                let mut key = e.clone();
                key.reverse();
                hits.push((key, e));
            }
        }
        hits.sort();
        hits.into_iter().next().map(|(_, e)| e)
    }

    #[test]
    fn search_matches_oracle() {
        for seed in 0..150u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = rng.gen_range(4..30);
            let d = Domain::new(2, (0..n).map(|_| pt(&[rng.gen_range(0..8), rng.gen_range(0..8)]))).unwrap();
            let g = build_induced(&EdgeRule::SeededRandom { density: 0.3, seed }, &d, true).unwrap();
            let f = PartialSelection::SeededChoice { arity: 2, q: 0.5, seed };
            let family = |_: &Domain| s_hat(&g, &f, &LabelOptions::default());
            let s = find_regular_cube(&family, &d, 2, DEFAULT_CANDIDATE_CAP).unwrap();
            let labels = s_hat(&g, &f, &LabelOptions::default()).unwrap();
            let expected = oracle_search(&labels, &d, 2);
            assert_eq!(s.found.as_ref().map(|(c, _)| c.base().to_vec()), expected, "seed {seed}");
            if let Some((_, r)) = &s.found {
                assert!(r.within_kk_bound());
            }
        }
    }

    #[test]
    fn jump_free_identical() {
        let d = Domain::new(2, [pt(&[1, 2]), pt(&[3, 4])]).unwrap();
        let f = Labeling::from_fn(&d, |p| p.min_coord());
        let r = jump_free_check(&f, &f);
        assert!(r.holds);
        assert_eq!(r.checked.len(), 2);
    }

    #[test]
    fn size_labeling_is_not_jump_free() {
        // f_D(x) = |D| grows with the domain: A ⊂ B agree below x only if
        // nothing lies below x, so take x in the lowest layer.
        let b = Domain::new(2, [pt(&[1, 1]), pt(&[5, 5])]).unwrap();
        let a = Domain::new(2, [pt(&[1, 1])]).unwrap();
        let fa = Labeling::from_fn(&a, |_| a.len() as u64);
        let fb = Labeling::from_fn(&b, |_| b.len() as u64);
        let r = jump_free_check(&fa, &fb);
        assert!(!r.holds);
        assert_eq!(
            r.witnesses,
            vec![JumpWitness {
                point: pt(&[1, 1]),
                fa: 1,
                fb: 2
            }]
        );
    }

    #[test]
    fn t_hat_and_s_hat_are_jump_free_on_nested_pairs() {
        for seed in 0..300u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = rng.gen_range(2..25);
            let b = Domain::new(2, (0..n).map(|_| pt(&[rng.gen_range(0..9), rng.gen_range(0..9)]))).unwrap();
            let x = b.points()[rng.gen_range(0..b.len())].clone();
            let a = Domain::new(
                2,
                b.points()
                    .iter()
                    .filter(|z| z.max_coord() < x.max_coord() || **z == x || (z.max_coord() > x.max_coord() && rng.gen_bool(0.5)))
                    .cloned(),
            )
            .unwrap();
            let rule = EdgeRule::SeededRandom { density: 0.35, seed };
            let ga = build_induced(&rule, &a, true).unwrap();
            let gb = build_induced(&rule, &b, true).unwrap();
            let rt = jump_free_check(&t_hat(&ga), &t_hat(&gb));
            assert!(rt.holds, "seed {seed}: {:?}", rt.witnesses);
            assert!(rt.checked.contains(&x));
            let f = PartialSelection::SeededChoice { arity: 2, q: 0.6, seed };
            let opts = LabelOptions { retain_phi: true, ..Default::default() };
            let sa = s_hat(&ga, &f, &opts).unwrap();
            let sb = s_hat(&gb, &f, &opts).unwrap();
            let rs = jump_free_check(&sa, &sb);
            assert!(rs.holds, "seed {seed}: {:?}", rs.witnesses);
            for z in &rs.checked {
                assert!(sa.phi(z).unwrap().is_subset(sb.phi(z).unwrap()));
            }
        }
    }

    #[test]
    fn lemma_regularity_equivalence_small() {
        for seed in 0..100u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let d = Domain::new(2, (0..30).map(|_| pt(&[rng.gen_range(0..6), rng.gen_range(0..6)]))).unwrap();
            let g = build_induced(&EdgeRule::SeededRandom { density: 0.3, seed }, &d, true).unwrap();
            let f = PartialSelection::SeededChoice { arity: 1, q: 0.7, seed };
            let opts = LabelOptions::default();
            let s = s_hat(&g, &f, &opts).unwrap();
            let h = h_rho(&g, &f, &RhoFamily::SeededOffset { max_offset: 4, seed }, &opts).unwrap();
            for cube in candidate_cubes(&d, 2, DEFAULT_CANDIDATE_CAP).unwrap() {
                assert_eq!(
                    check_regularity(&s, &cube).unwrap().is_regular,
                    check_regularity(&h, &cube).unwrap().is_regular
                );
            }
        }
    }

    #[test]
    fn report_json() {
        let cube = Cube::new([2, 6], 2).unwrap();
        let f = Labeling::from_fn(&cube.to_domain(), |p| if p.coords()[0] < p.coords()[1] { 1 } else { p.min_coord() });
        let r = check_regularity(&f, &cube).unwrap();
        assert_eq!(
            serde_json::to_string(&r).unwrap(),
            r#"{"E":[2,6],"regular":true,"classes":[{"ranks":[0,0],"case":"minDom"},{"ranks":[0,1],"case":"const","value":1},{"ranks":[1,0],"case":"minDom"}],"regressiveValues":[1]}"#
        );
    }
}
