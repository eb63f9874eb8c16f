//! Inputs shared by the criterion benches.

use jumpfree::harness::generate::solver_instance;
use jumpfree::harness::run::sweep_point;
use jumpfree::{build_induced, build_instances, h_rho, IRule, InstanceSet, LabelOptions, Result};

/// Instance set of the p-sweep at `p`: labels the sweep domain with `h^ρ`
/// and splits the cube's regressive values into blocks.
pub fn sweep_instances(p: usize, e0: u64, t: u32) -> Result<InstanceSet> {
    let sp = sweep_point(p, e0, t)?;
    let graph = build_induced(&sp.edge, &sp.domain, true)?;
    let h = h_rho(&graph, &sp.selection, &sp.rho, &LabelOptions::default())?;
    build_instances(&h, &sp.rho, &IRule::Zero, &sp.cube)
}

/// The first `n` generated solver instances with at least `min_terms` terms.
pub fn generated_instances(n: usize, min_terms: usize) -> Vec<(InstanceSet, u32)> {
    (0..)
        .filter_map(|s| solver_instance(s).ok())
        .filter(|(h, _)| h.len() >= min_terms)
        .take(n)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use jumpfree::solve_structured;

    #[test]
    fn sweep_instances_are_unsolvable() {
        for p in [4, 8] {
            let h = sweep_instances(p, 100, 1).unwrap();
            let r = solve_structured(&h, 1, 30).unwrap();
            assert!(!r.solvable);
            assert_eq!(r.comparisons, 2 * (p * p) as u64 - 1);
        }
    }

    #[test]
    fn generated_instances_are_large_enough() {
        let hs = generated_instances(5, 10);
        assert_eq!(hs.len(), 5);
        assert!(hs.iter().all(|(h, _)| h.len() >= 10));
    }
}
