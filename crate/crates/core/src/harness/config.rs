use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::graph::EdgeRule;
use crate::labelers::{
    LabelOptions, PartialSelection, RhoFamily, SelectionFunction, DEFAULT_TUPLE_CAP,
};
use crate::lattice::{Cube, Domain, Point};
use crate::regularity::DEFAULT_CANDIDATE_CAP;
use crate::rules::RuleDescriptor;
use crate::subsetsum::{IRule, DEFAULT_ORACLE_CAP};

pub const SCHEMA_VERSION: u32 = 1;

/// One experiment, as read from a single JSON document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    /// Master seed for everything the rules themselves do not seed.
    pub seed: u64,
    pub k: usize,
    pub p: usize,
    pub r: usize,
    pub t: u32,
    pub edge_rule: RuleDescriptor,
    pub selection_rule: RuleDescriptor,
    pub rho_rule: RuleDescriptor,
    #[serde(default = "zero_i_rule")]
    pub i_rule: RuleDescriptor,
    pub domain: DomainSpec,
    #[serde(default)]
    pub family: Family,
    #[serde(default)]
    pub budgets: Budgets,
    #[serde(default)]
    pub verify: VerifyPlan,
    #[serde(default)]
    pub bench: BenchPlan,
    /// Values a `label` run must reproduce.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub expect: Vec<Expectation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<String>,
}

fn zero_i_rule() -> RuleDescriptor {
    RuleDescriptor::new("zero")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase", deny_unknown_fields)]
pub enum DomainSpec {
    Explicit {
        points: Vec<Point>,
    },
    /// `size` seeded points with coordinates in `0..fieldMax`.
    #[serde(rename_all = "camelCase")]
    Random {
        size: usize,
        field_max: u64,
        seed: u64,
    },
    /// `E^k` itself.
    Cube {
        #[serde(rename = "E")]
        base: Vec<u64>,
    },
    /// `E^k` plus `extra` seeded points with coordinates in `0..fieldMax`.
    #[serde(rename_all = "camelCase")]
    CubeWithNoise {
        #[serde(rename = "E")]
        base: Vec<u64>,
        extra: usize,
        field_max: u64,
        seed: u64,
    },
}

/// The labeling `search` and `solve` work with.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Family {
    THat,
    SHat,
    #[default]
    HRho,
    /// `f(x) = min(x)`; no graph involved.
    Min,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields, default)]
pub struct Budgets {
    pub tuple_cap: u64,
    pub candidate_cap: u64,
    pub solver_cap: usize,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            tuple_cap: DEFAULT_TUPLE_CAP,
            candidate_cap: DEFAULT_CANDIDATE_CAP,
            solver_cap: DEFAULT_ORACLE_CAP,
        }
    }
}

/// Trial counts for the `verify` suites; a count of 0 yields "no data".
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields, default)]
pub struct VerifyPlan {
    /// Random graphs shared by the structure and committee-equivalence suites.
    pub graphs: usize,
    pub regularity_trials: usize,
    pub jump_free_pairs: usize,
    /// Regular finds wanted by the capped-transfer suite.
    pub transfer_finds: usize,
    pub solver_instances: usize,
    pub max_points: usize,
    pub max_arity: usize,
    /// Perturb `h^ρ` by one at one vertex per graph.
    pub inject_fault: bool,
}

impl Default for VerifyPlan {
    fn default() -> Self {
        VerifyPlan {
            graphs: 0,
            regularity_trials: 0,
            jump_free_pairs: 0,
            transfer_finds: 0,
            solver_instances: 0,
            max_points: 40,
            max_arity: 3,
            inject_fault: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields, default)]
pub struct BenchPlan {
    pub ps: Vec<usize>,
    /// Smallest element of every swept `E`.
    pub e0: u64,
}

impl Default for BenchPlan {
    fn default() -> Self {
        BenchPlan {
            ps: vec![4, 8, 16, 32],
            e0: 100,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Expectation {
    pub family: Family,
    pub point: Point,
    pub value: u64,
}

/// The rules of a config, parsed.
#[derive(Clone, Debug)]
pub struct ResolvedRules {
    pub edge: EdgeRule,
    pub selection: PartialSelection,
    pub rho: RhoFamily,
    pub i_rule: IRule,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "schemaVersion {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if !(2..=4).contains(&self.k) {
            return Err(Error::Config(format!("k = {} outside [2, 4]", self.k)));
        }
        if self.p < 2 {
            return Err(Error::Config(format!("p = {} must be at least 2", self.p)));
        }
        if self.r < 1 {
            return Err(Error::Config("r must be at least 1".into()));
        }
        if self.t < 1 {
            return Err(Error::Config("t must be at least 1".into()));
        }
        let rules = self.rules()?;
        if rules.selection.arity() != self.r {
            return Err(Error::Config(format!(
                "selection rule has arity {}, config r = {}",
                rules.selection.arity(),
                self.r
            )));
        }
        if self.verify.max_points == 0 || self.verify.max_arity == 0 {
            return Err(Error::Config("verify.maxPoints and verify.maxArity must be positive".into()));
        }
        if self.bench.ps.iter().any(|&p| p < 2) || self.bench.e0 < 2 {
            return Err(Error::Config("bench.ps entries and bench.e0 must be at least 2".into()));
        }
        self.build_domain()?;
        Ok(())
    }

    pub fn rules(&self) -> Result<ResolvedRules> {
        Ok(ResolvedRules {
            edge: EdgeRule::from_descriptor(&self.edge_rule)?,
            selection: PartialSelection::from_descriptor(&self.selection_rule)?,
            rho: RhoFamily::from_descriptor(&self.rho_rule)?,
            i_rule: IRule::from_descriptor(&self.i_rule)?,
        })
    }

    pub fn label_options(&self) -> LabelOptions {
        LabelOptions {
            tuple_cap: self.budgets.tuple_cap,
            ..LabelOptions::default()
        }
    }

    pub fn build_domain(&self) -> Result<Domain> {
        let k = self.k;
        match &self.domain {
            DomainSpec::Explicit { points } => Domain::new(k, points.iter().cloned()),
            DomainSpec::Random {
                size,
                field_max,
                seed,
            } => Domain::new(k, random_points(k, *size, *field_max, *seed)?),
            DomainSpec::Cube { base } => Ok(Cube::new(base.iter().copied(), k)?.to_domain()),
            DomainSpec::CubeWithNoise {
                base,
                extra,
                field_max,
                seed,
            } => {
                let cube = Cube::new(base.iter().copied(), k)?;
                Domain::new(
                    k,
                    cube.points()
                        .chain(random_points(k, *extra, *field_max, *seed)?),
                )
            }
        }
    }

    /// Replaces the master seed and every seed the rules and domain carry.
    pub fn override_seed(&mut self, seed: u64) {
        self.seed = seed;
        for d in [
            &mut self.edge_rule,
            &mut self.selection_rule,
            &mut self.rho_rule,
            &mut self.i_rule,
        ] {
            if d.seed.is_some() {
                d.seed = Some(seed);
            }
        }
        match &mut self.domain {
            DomainSpec::Random { seed: s, .. } | DomainSpec::CubeWithNoise { seed: s, .. } => {
                *s = seed
            }
            DomainSpec::Explicit { .. } | DomainSpec::Cube { .. } => {}
        }
    }

    /// Compact JSON with sorted keys.
    pub fn canonical_json(&self) -> String {
        let value = serde_json::to_value(self).expect("config serializes");
        serde_json::to_string(&value).expect("value serializes")
    }

    /// Hex SHA-256 of [`Self::canonical_json`].
    pub fn hash(&self) -> String {
        hex_digest(self.canonical_json().as_bytes())
    }
}

pub(crate) fn hex_digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn random_points(k: usize, size: usize, field_max: u64, seed: u64) -> Result<Vec<Point>> {
    if field_max == 0 {
        return Err(Error::Config("fieldMax must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..size)
        .map(|_| Point::new((0..k).map(|_| rng.gen_range(0..field_max)).collect()))
        .collect()
}
