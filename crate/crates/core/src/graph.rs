//! Downward directed graphs induced on finite domains.
//!
//! Every edge `(x, y)` satisfies `max(x) > max(y)`. Adjacency is stored as
//! indices into the domain's canonical point order and computed once at
//! build time.

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Domain, Point};
use crate::rules::{check_probability, RuleDescriptor};
use crate::seed::SeededHash;

const EDGE_TAG: u64 = 0xED6E;

/// A named, reproducible edge predicate on `N^k`.
#[derive(Clone, Debug, PartialEq)]
pub enum EdgeRule {
    /// A fixed edge list; pairs outside the domain are ignored.
    Explicit(Vec<(Point, Point)>),
    /// Edge iff `max(x) > max(y)`.
    FullDownward,
    /// Each downward pair independently with probability `density`.
    SeededRandom { density: f64, seed: u64 },
    /// Edge iff `x` strictly dominates `y` in every coordinate.
    CoordinateDominance,
}

impl EdgeRule {
    /// The rule before the downward conjunct is applied.
    fn raw(&self, x: &Point, y: &Point) -> bool {
        match self {
            // Explicit rules are looked up through a set in `build_induced`.
            EdgeRule::Explicit(edges) => edges.iter().any(|(a, b)| a == x && b == y),
            EdgeRule::FullDownward => true,
            EdgeRule::SeededRandom { density, seed } => {
                SeededHash::new(*seed, EDGE_TAG).point(x).point(y).unit() < *density
            }
            EdgeRule::CoordinateDominance => x
                .coords()
                .iter()
                .zip(y.coords())
                .all(|(a, b)| a > b),
        }
    }

    /// `raw(x, y) && max(x) > max(y)`.
    pub fn holds(&self, x: &Point, y: &Point) -> bool {
        x.max_coord() > y.max_coord() && self.raw(x, y)
    }

    pub fn to_descriptor(&self) -> RuleDescriptor {
        match self {
            EdgeRule::Explicit(edges) => {
                let list: Vec<(Point, Point)> = edges.clone();
                RuleDescriptor::new("explicit")
                    .with_param("edges", serde_json::to_value(list).expect("points serialize"))
            }
            EdgeRule::FullDownward => RuleDescriptor::new("full-downward"),
            EdgeRule::SeededRandom { density, seed } => RuleDescriptor::new("seeded-random")
                .with_param("density", *density)
                .with_seed(*seed),
            EdgeRule::CoordinateDominance => RuleDescriptor::new("coordinate-dominance"),
        }
    }

    pub fn from_descriptor(d: &RuleDescriptor) -> Result<Self> {
        match d.name.as_str() {
            "explicit" => {
                d.only_params(&["edges"])?;
                Ok(EdgeRule::Explicit(d.param("edges")?))
            }
            "full-downward" => {
                d.only_params(&[])?;
                Ok(EdgeRule::FullDownward)
            }
            "seeded-random" => {
                d.only_params(&["density"])?;
                Ok(EdgeRule::SeededRandom {
                    density: check_probability("seeded-random", d.param("density")?)?,
                    seed: d.require_seed()?,
                })
            }
            "coordinate-dominance" => {
                d.only_params(&[])?;
                Ok(EdgeRule::CoordinateDominance)
            }
            _ => Err(d.unknown()),
        }
    }
}

/// `G_D`: a domain together with its induced downward edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DownwardGraph {
    domain: Domain,
    children: Vec<Vec<usize>>,
}

/// Builds `G_D` for `rule`. Predicate rules are intersected with the
/// downward relation. For explicit edge lists, strict mode turns a listed
/// pair that is not downward into an error; otherwise such pairs are dropped.
pub fn build_induced(rule: &EdgeRule, domain: &Domain, strict: bool) -> Result<DownwardGraph> {
    let points = domain.points();
    let mut children = vec![Vec::new(); points.len()];
    match rule {
        EdgeRule::Explicit(edges) => {
            let mut seen = HashSet::new();
            for (x, y) in edges {
                let (Some(i), Some(j)) = (domain.index_of(x), domain.index_of(y)) else {
                    continue;
                };
                if x.max_coord() <= y.max_coord() {
                    if strict {
                        return Err(Error::DownwardViolation {
                            from: x.clone(),
                            to: y.clone(),
                        });
                    }
                    continue;
                }
                if seen.insert((i, j)) {
                    children[i].push(j);
                }
            }
            for c in &mut children {
                c.sort_unstable();
            }
        }
        _ => {
            for (i, x) in points.iter().enumerate() {
                for (j, y) in points.iter().enumerate() {
                    if x.max_coord() > y.max_coord() && rule.raw(x, y) {
                        children[i].push(j);
                    }
                }
            }
        }
    }
    Ok(DownwardGraph {
        domain: domain.clone(),
        children,
    })
}

impl DownwardGraph {
    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn points(&self) -> &[Point] {
        self.domain.points()
    }

    pub fn len(&self) -> usize {
        self.children.len()
    }

    pub fn is_empty(&self) -> bool {
        self.children.is_empty()
    }

    /// Out-neighbour indices of the vertex at `index`.
    pub fn children_of(&self, index: usize) -> &[usize] {
        &self.children[index]
    }

    /// `G^z`.
    pub fn adjacency(&self, z: &Point) -> Result<BTreeSet<Point>> {
        let i = self
            .domain
            .index_of(z)
            .ok_or_else(|| Error::PointNotInDomain(z.clone()))?;
        Ok(self.children[i]
            .iter()
            .map(|&j| self.points()[j].clone())
            .collect())
    }

    pub fn is_terminal_index(&self, index: usize) -> bool {
        self.children[index].is_empty()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.children
            .iter()
            .enumerate()
            .flat_map(|(i, c)| c.iter().map(move |&j| (i, j)))
    }

    pub fn edge_count(&self) -> usize {
        self.children.iter().map(Vec::len).sum()
    }

    /// Vertices with no out-neighbours.
    pub fn terminal_vertices(&self) -> BTreeSet<Point> {
        (0..self.len())
            .filter(|&i| self.is_terminal_index(i))
            .map(|i| self.points()[i].clone())
            .collect()
    }

    /// Vertex indices ordered by `(max, point)`, i.e. layer by layer.
    pub fn layer_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by_key(|&i| self.points()[i].max_coord());
        order
    }

    /// The edge set as an explicit rule, for serializing a generated graph.
    pub fn to_explicit_rule(&self) -> EdgeRule {
        EdgeRule::Explicit(
            self.edges()
                .map(|(i, j)| (self.points()[i].clone(), self.points()[j].clone()))
                .collect(),
        )
    }
}

/// `D_{m_0}, …, D_{m_q}`: points bucketed by max, in increasing order.
pub fn layers(domain: &Domain) -> Result<Vec<(u64, BTreeSet<Point>)>> {
    if domain.is_empty() {
        return Err(Error::EmptyDomain);
    }
    let mut out: Vec<(u64, BTreeSet<Point>)> = Vec::new();
    let mut sorted: Vec<&Point> = domain.points().iter().collect();
    sorted.sort_by_key(|p| p.max_coord());
    for p in sorted {
        match out.last_mut() {
            Some((m, set)) if *m == p.max_coord() => {
                set.insert(p.clone());
            }
            _ => out.push((p.max_coord(), BTreeSet::from([p.clone()]))),
        }
    }
    Ok(out)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphDoc {
    k: usize,
    points: Vec<Point>,
    edges: Vec<[usize; 2]>,
}

impl Serialize for DownwardGraph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GraphDoc {
            k: self.domain.arity(),
            points: self.points().to_vec(),
            edges: self.edges().map(|(i, j)| [i, j]).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DownwardGraph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let doc = GraphDoc::deserialize(d)?;
        let n = doc.points.len();
        let domain = Domain::new(doc.k, doc.points.iter().cloned()).map_err(D::Error::custom)?;
        if domain.len() != n || domain.points() != doc.points.as_slice() {
            return Err(D::Error::custom("points must be distinct and in canonical order"));
        }
        let mut edges = Vec::with_capacity(doc.edges.len());
        for [i, j] in doc.edges {
            if i >= n || j >= n {
                return Err(D::Error::custom(format!("edge index out of range: [{i},{j}]")));
            }
            edges.push((doc.points[i].clone(), doc.points[j].clone()));
        }
        build_induced(&EdgeRule::Explicit(edges), &domain, true).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pt(c: &[u64]) -> Point {
        Point::new(c.to_vec()).unwrap()
    }

    fn dom(points: &[&[u64]]) -> Domain {
        Domain::new(points[0].len(), points.iter().map(|c| pt(c))).unwrap()
    }

    #[test]
    fn empty_rule_gives_edgeless_graph() {
        let d = dom(&[&[0, 1], &[2, 0], &[3, 3]]);
        let g = build_induced(&EdgeRule::Explicit(vec![]), &d, true).unwrap();
        assert_eq!(g.edge_count(), 0);
        assert_eq!(g.terminal_vertices().len(), 3);
        for p in d.points() {
            assert!(g.adjacency(p).unwrap().is_empty());
        }
    }

    #[test]
    fn full_downward_pair() {
        let d = dom(&[&[0, 1], &[2, 0]]);
        let g = build_induced(&EdgeRule::FullDownward, &d, true).unwrap();
        let edges: Vec<_> = g
            .edges()
            .map(|(i, j)| (g.points()[i].clone(), g.points()[j].clone()))
            .collect();
        assert_eq!(edges, vec![(pt(&[2, 0]), pt(&[0, 1]))]);
        assert_eq!(g.terminal_vertices(), BTreeSet::from([pt(&[0, 1])]));
    }

    #[test]
    fn strict_mode_rejects_upward_pairs() {
        let d = dom(&[&[0, 1], &[2, 0], &[1, 2]]);
        let rule = EdgeRule::Explicit(vec![(pt(&[0, 1]), pt(&[2, 0]))]);
        assert!(matches!(
            build_induced(&rule, &d, true),
            Err(Error::DownwardViolation { .. })
        ));
        // Equal max is not downward either.
        let flat = EdgeRule::Explicit(vec![(pt(&[2, 0]), pt(&[1, 2]))]);
        assert!(build_induced(&flat, &d, true).is_err());
        let g = build_induced(&rule, &d, false).unwrap();
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn adjacency_errors_outside_domain() {
        let d = dom(&[&[0, 1]]);
        let g = build_induced(&EdgeRule::FullDownward, &d, false).unwrap();
        assert!(matches!(
            g.adjacency(&pt(&[5, 5])),
            Err(Error::PointNotInDomain(_))
        ));
    }

    #[test]
    fn coordinate_dominance() {
        let d = dom(&[&[3, 3], &[1, 2], &[2, 3], &[0, 0]]);
        let g = build_induced(&EdgeRule::CoordinateDominance, &d, false).unwrap();
        assert_eq!(
            g.adjacency(&pt(&[3, 3])).unwrap(),
            BTreeSet::from([pt(&[1, 2]), pt(&[0, 0])])
        );
        // (2,3) has the same max as (3,3): no edge either way.
        assert_eq!(
            g.adjacency(&pt(&[2, 3])).unwrap(),
            BTreeSet::from([pt(&[1, 2]), pt(&[0, 0])])
        );
    }

    #[test]
    fn layers_examples() {
        let d = dom(&[&[1, 1]]);
        assert_eq!(layers(&d).unwrap(), vec![(1, BTreeSet::from([pt(&[1, 1])]))]);

        let d = dom(&[&[0, 2], &[2, 0], &[1, 3]]);
        assert_eq!(
            layers(&d).unwrap(),
            vec![
                (2, BTreeSet::from([pt(&[0, 2]), pt(&[2, 0])])),
                (3, BTreeSet::from([pt(&[1, 3])])),
            ]
        );

        let cube = crate::lattice::Cube::new([2, 4], 2).unwrap();
        let l = layers(&cube.to_domain()).unwrap();
        assert_eq!(l[0], (2, BTreeSet::from([pt(&[2, 2])])));
        assert!(layers(&Domain::new(2, []).unwrap()).is_err());
    }

    #[test]
    fn rule_descriptors_round_trip() {
        let rules = [
            EdgeRule::Explicit(vec![(pt(&[2, 1]), pt(&[0, 1]))]),
            EdgeRule::FullDownward,
            EdgeRule::SeededRandom {
                density: 0.25,
                seed: 9,
            },
            EdgeRule::CoordinateDominance,
        ];
        for r in rules {
            let d = r.to_descriptor();
            let json = serde_json::to_string(&d).unwrap();
            let back: RuleDescriptor = serde_json::from_str(&json).unwrap();
            assert_eq!(EdgeRule::from_descriptor(&back).unwrap(), r);
        }
        assert!(EdgeRule::from_descriptor(&RuleDescriptor::new("seeded-random").with_param("density", 0.5)).is_err());
        assert!(EdgeRule::from_descriptor(&RuleDescriptor::new("nope")).is_err());
    }

    #[test]
    fn graph_json() {
        let d = dom(&[&[0, 1], &[2, 0]]);
        let g = build_induced(&EdgeRule::FullDownward, &d, true).unwrap();
        let json = serde_json::to_string(&g).unwrap();
        assert_eq!(json, r#"{"k":2,"points":[[0,1],[2,0]],"edges":[[1,0]]}"#);
        let back: DownwardGraph = serde_json::from_str(&json).unwrap();
        assert_eq!(back, g);
        assert!(serde_json::from_str::<DownwardGraph>(r#"{"k":2,"points":[[0,1],[2,0]],"edges":[[0,1]]}"#).is_err());
    }

    fn arb_domain() -> impl Strategy<Value = Domain> {
        proptest::collection::vec(proptest::collection::vec(0u64..8, 2), 1..25)
            .prop_map(|pts| Domain::new(2, pts.into_iter().map(|c| Point::new(c).unwrap())).unwrap())
    }

    proptest! {
        #[test]
        fn downward_and_layer_invariants(d in arb_domain(), seed in any::<u64>(), q in 0.0f64..1.0) {
            let rule = EdgeRule::SeededRandom { density: q, seed };
            let g = build_induced(&rule, &d, true).unwrap();
            for (i, j) in g.edges() {
                prop_assert!(g.points()[i].max_coord() > g.points()[j].max_coord());
            }
            let ls = layers(&d).unwrap();
            prop_assert_eq!(ls.iter().map(|(_, s)| s.len()).sum::<usize>(), d.len());
            prop_assert!(ls.windows(2).all(|w| w[0].0 < w[1].0));
            for (m, s) in &ls {
                prop_assert!(s.iter().all(|p| p.max_coord() == *m));
            }
            let terminals = g.terminal_vertices();
            prop_assert!(ls[0].1.iter().all(|p| terminals.contains(p)));
        }

        #[test]
        fn induced_subgraph_is_restriction(d in arb_domain(), seed in any::<u64>(), mask in any::<u32>()) {
            let rule = EdgeRule::SeededRandom { density: 0.4, seed };
            let sub = Domain::new(2, d.points().iter().enumerate()
                .filter(|(i, _)| mask >> (i % 32) & 1 == 1).map(|(_, p)| p.clone())).unwrap();
            let gb = build_induced(&rule, &d, false).unwrap();
            let ga = build_induced(&rule, &sub, false).unwrap();
            for x in sub.points() {
                let restricted: BTreeSet<Point> = gb.adjacency(x).unwrap()
                    .into_iter().filter(|y| sub.contains(y)).collect();
                prop_assert_eq!(ga.adjacency(x).unwrap(), restricted);
            }
        }
    }
}
