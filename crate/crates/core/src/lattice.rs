//! Points of `N^k`, order types, cubes `E^k`, and set-max / capping structure.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest arity accepted by [`enumerate_order_types`] unless a caller
/// passes its own cap.
pub const DEFAULT_ORDER_TYPE_ARITY_CAP: usize = 4;

/// A point of `N^k`. Ordering is lexicographic on coordinates.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(Vec<u64>);

impl Point {
    pub fn new(coords: Vec<u64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::ZeroArity);
        }
        Ok(Point(coords))
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[u64] {
        &self.0
    }

    pub fn max_coord(&self) -> u64 {
        *self.0.iter().max().expect("points are nonempty")
    }

    pub fn min_coord(&self) -> u64 {
        *self.0.iter().min().expect("points are nonempty")
    }
}

impl<const N: usize> From<[u64; N]> for Point {
    fn from(coords: [u64; N]) -> Self {
        assert!(N > 0, "points are nonempty");
        Point(coords.to_vec())
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Canonical representative of an order-type class: the rank of every
/// coordinate among the distinct coordinate values.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OrderType(Vec<usize>);

impl OrderType {
    pub fn ranks(&self) -> &[usize] {
        &self.0
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    /// Number of distinct values in any tuple of this type.
    pub fn distinct_values(&self) -> usize {
        self.0.iter().max().map_or(0, |m| m + 1)
    }
}

pub fn rank_vector(x: &Point) -> OrderType {
    rank_coords(x.coords())
}

fn rank_coords(coords: &[u64]) -> OrderType {
    let mut distinct = coords.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    OrderType(
        coords
            .iter()
            .map(|c| distinct.binary_search(c).expect("value is present"))
            .collect(),
    )
}

pub fn order_equivalent(x: &Point, y: &Point) -> Result<bool> {
    if x.arity() != y.arity() {
        return Err(Error::ArityMismatch {
            expected: x.arity(),
            found: y.arity(),
        });
    }
    Ok(rank_vector(x) == rank_vector(y))
}

/// All order types of arity `k`, with `k` capped at
/// [`DEFAULT_ORDER_TYPE_ARITY_CAP`].
pub fn enumerate_order_types(k: usize) -> Result<BTreeSet<OrderType>> {
    enumerate_order_types_capped(k, DEFAULT_ORDER_TYPE_ARITY_CAP)
}

/// Canonicalizes every tuple over `{0, …, k-1}^k`; every class has a
/// representative there.
pub fn enumerate_order_types_capped(k: usize, cap: usize) -> Result<BTreeSet<OrderType>> {
    if k == 0 {
        return Err(Error::ZeroArity);
    }
    if k > cap {
        return Err(Error::ArityCapExceeded { k, cap });
    }
    let mut out = BTreeSet::new();
    let mut tuple = vec![0u64; k];
    loop {
        out.insert(rank_coords(&tuple));
        if !advance_odometer(&mut tuple, k as u64) {
            break;
        }
    }
    Ok(out)
}

/// Steps `digits` to the next tuple in base `radix`; false after the last one.
pub(crate) fn advance_odometer(digits: &mut [u64], radix: u64) -> bool {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < radix {
            return true;
        }
        *d = 0;
    }
    false
}

/// Surjections from a `k`-set onto a `j`-set, by inclusion-exclusion:
/// `sum_i (-1)^i C(j,i) (j-i)^k`.
pub fn surjection_count(k: u32, j: u32) -> u128 {
    if j > k || j == 0 {
        return u128::from(k == 0 && j == 0);
    }
    let mut total: i128 = 0;
    for i in 0..=j {
        let term = binomial(j as u64, i as u64) as i128 * (i128::from(j - i)).pow(k);
        if i % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total as u128
}

pub fn binomial(n: u64, r: u64) -> u128 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = acc * u128::from(n - i) / u128::from(i + 1);
    }
    acc
}

/// A finite set of points sharing one arity, kept in canonical
/// (lexicographic) order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Domain {
    k: usize,
    points: Vec<Point>,
}

impl Domain {
    /// Builds a domain; duplicate points collapse, mixed arity is rejected.
    pub fn new(k: usize, points: impl IntoIterator<Item = Point>) -> Result<Self> {
        if k == 0 {
            return Err(Error::ZeroArity);
        }
        let mut points: Vec<Point> = points.into_iter().collect();
        if let Some(bad) = points.iter().find(|p| p.arity() != k) {
            return Err(Error::ArityMismatch {
                expected: k,
                found: bad.arity(),
            });
        }
        points.sort_unstable();
        points.dedup();
        Ok(Domain { k, points })
    }

    pub fn arity(&self) -> usize {
        self.k
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.index_of(p).is_some()
    }

    pub fn index_of(&self, p: &Point) -> Option<usize> {
        self.points.binary_search(p).ok()
    }

    /// Every coordinate of every point.
    pub fn field(&self) -> BTreeSet<u64> {
        self.points
            .iter()
            .flat_map(|p| p.coords().iter().copied())
            .collect()
    }

    /// `D_x`: the points whose max is strictly below `bound`.
    pub fn below(&self, bound: u64) -> impl Iterator<Item = &Point> {
        self.points.iter().filter(move |p| p.max_coord() < bound)
    }

    pub fn is_subset_of(&self, other: &Domain) -> bool {
        self.points.iter().all(|p| other.contains(p))
    }

    pub fn contains_cube(&self, cube: &Cube) -> bool {
        self.missing_from_cube(cube).is_none()
    }

    fn missing_from_cube(&self, cube: &Cube) -> Option<Point> {
        if cube.arity() != self.k {
            return cube.points().next();
        }
        cube.points().find(|p| !self.contains(p))
    }

    fn require_cube(&self, cube: &Cube) -> Result<()> {
        if cube.arity() != self.k {
            return Err(Error::ArityMismatch {
                expected: self.k,
                found: cube.arity(),
            });
        }
        match self.missing_from_cube(cube) {
            Some(missing) => Err(Error::CubeNotContained { missing }),
            None => Ok(()),
        }
    }
}

/// The `k`-th Cartesian power of a base set `E` of `p` distinct integers.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cube {
    base: Vec<u64>,
    k: usize,
}

impl Cube {
    pub fn new(base: impl IntoIterator<Item = u64>, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::ZeroArity);
        }
        let raw: Vec<u64> = base.into_iter().collect();
        let mut base = raw.clone();
        base.sort_unstable();
        base.dedup();
        if base.len() != raw.len() {
            return Err(Error::InvalidCube(format!(
                "base {raw:?} has repeated elements"
            )));
        }
        if base.is_empty() {
            return Err(Error::InvalidCube("base is empty".into()));
        }
        Ok(Cube { base, k })
    }

    /// Sorted base `e_0 < … < e_{p-1}`.
    pub fn base(&self) -> &[u64] {
        &self.base
    }

    pub fn arity(&self) -> usize {
        self.k
    }

    pub fn p(&self) -> usize {
        self.base.len()
    }

    pub fn min_element(&self) -> u64 {
        self.base[0]
    }

    pub fn max_element(&self) -> u64 {
        *self.base.last().expect("base is nonempty")
    }

    pub fn len(&self) -> usize {
        self.base.len().pow(self.k as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `E^k` in lexicographic order.
    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        let p = self.base.len() as u64;
        let mut digits = vec![0u64; self.k];
        let mut done = false;
        std::iter::from_fn(move || {
            if done {
                return None;
            }
            let point = Point(digits.iter().map(|&d| self.base[d as usize]).collect());
            done = !advance_odometer(&mut digits, p);
            Some(point)
        })
    }

    pub fn to_domain(&self) -> Domain {
        Domain {
            k: self.k,
            points: self.points().collect(),
        }
    }
}

/// `(max(D), setmax(D))`.
pub fn set_max(domain: &Domain) -> Result<(u64, BTreeSet<Point>)> {
    let top = domain
        .points
        .iter()
        .map(Point::max_coord)
        .max()
        .ok_or(Error::EmptyDomain)?;
    let witnesses = domain
        .points
        .iter()
        .filter(|p| p.max_coord() == top)
        .cloned()
        .collect();
    Ok((top, witnesses))
}

/// `setmax(E^k)`: points of the cube with at least one coordinate `max(E)`.
pub fn cube_set_max(cube: &Cube) -> BTreeSet<Point> {
    let top = cube.max_element();
    cube.points().filter(|p| p.max_coord() == top).collect()
}

pub fn is_capped_by(domain: &Domain, cube: &Cube) -> Result<bool> {
    domain.require_cube(cube)?;
    let (_, witnesses) = set_max(domain)?;
    Ok(witnesses == cube_set_max(cube))
}

/// `D̂ = D_{e_{p-1}} ∪ setmax(E^k)`, which is always capped by `E^k`.
pub fn cap_restrict(domain: &Domain, cube: &Cube) -> Result<Domain> {
    domain.require_cube(cube)?;
    let top = cube.max_element();
    let cap = cube_set_max(cube);
    let points = domain
        .points
        .iter()
        .filter(|p| p.max_coord() < top)
        .cloned()
        .chain(cap);
    Domain::new(domain.k, points)
}

/// When `domain` is capped by some `E^k`, that cube is unique: its base is
/// the field of `setmax(D)`. Returns it after confirming the cap.
pub fn implied_cap_cube(domain: &Domain) -> Result<Cube> {
    if domain.k < 2 {
        return Err(Error::NotCapped);
    }
    let (_, top) = set_max(domain)?;
    let base: BTreeSet<u64> = top.iter().flat_map(|p| p.coords().iter().copied()).collect();
    let cube = Cube::new(base, domain.k)?;
    if domain.contains_cube(&cube) && is_capped_by(domain, &cube)? {
        Ok(cube)
    } else {
        Err(Error::NotCapped)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DomainDoc {
    k: usize,
    points: Vec<Vec<u64>>,
}

impl Serialize for Domain {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        DomainDoc {
            k: self.k,
            points: self.points.iter().map(|p| p.0.clone()).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Domain {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = DomainDoc::deserialize(d)?;
        let points = doc
            .points
            .into_iter()
            .map(Point::new)
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        Domain::new(doc.k, points).map_err(serde::de::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CubeDoc {
    #[serde(rename = "E")]
    base: Vec<u64>,
    k: usize,
}

impl Serialize for Cube {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CubeDoc {
            base: self.base.clone(),
            k: self.k,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Cube {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = CubeDoc::deserialize(d)?;
        Cube::new(doc.base, doc.k).map_err(serde::de::Error::custom)
    }
}
