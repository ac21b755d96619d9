use std::collections::BTreeMap;

use serde::Serialize;

use crate::degree::DegreeVector;
use crate::error::KGraphError;
use crate::grid::PathGrid;
use crate::kgraph::KGraph;

/// Outcome of the bounded aperiodicity search. This is a semi-decision
/// procedure: `Inconclusive` is an honest answer, not an error.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum AperiodicityOutcome {
    /// Every vertex starts a window consistent with no eventual period
    /// `|pᵢ| ≤ depth`; one witness window (edge ids) per vertex.
    AperiodicWitness {
        depth: usize,
        witnesses: BTreeMap<String, Vec<String>>,
    },
    /// Every tested window at every vertex is invariant under `period`
    /// (and under each of `all`).
    GlobalPeriod {
        period: DegreeVector,
        all: Vec<DegreeVector>,
    },
    Inconclusive {
        reason: String,
    },
}

/// Nonzero `p` with `|pᵢ| ≤ depth`, one of each `±p` pair (first nonzero
/// coordinate positive), ordered by `Σ|pᵢ|` and then lexicographically
/// descending so that unit vectors come first.
pub fn candidate_periods(k: usize, depth: usize) -> Vec<DegreeVector> {
    let d = depth as i64;
    let mut out: Vec<DegreeVector> = DegreeVector::box_iter(&DegreeVector::splat(k, -d), &DegreeVector::splat(k, d))
        .filter(|p| p.components().iter().find(|&&c| c != 0).is_some_and(|&c| c > 0))
        .collect();
    out.sort_by(|a, b| {
        let na: i64 = a.components().iter().map(|c| c.abs()).sum();
        let nb: i64 = b.components().iter().map(|c| c.abs()).sum();
        na.cmp(&nb).then_with(|| b.cmp(a))
    });
    out
}

/// For each depth `d`, one-sided windows `x(0, 3d·e)` are compared against
/// shifts `σ^a x` and `σ^b x` (`p = a − b`) on blocks of size `d·e`. A period
/// survives only if it holds at offset 0 in every window at every depth. A
/// witness window, searched at the full depth, has no candidate period at any
/// tail offset `m ≤ depth·e`.
pub fn aperiodicity_probe(kg: &KGraph, depth: usize) -> AperiodicityOutcome {
    let k = kg.k();
    let mut common: BTreeMap<DegreeVector, bool> = BTreeMap::new();
    let depth = depth.max(1);
    for d in 1..=depth {
        let len = DegreeVector::splat(k, 3 * d as i64);
        let windows = match kg.enumerate_morphisms(&len) {
            Ok(w) => w,
            Err(KGraphError::BoundExceeded { count, .. }) => {
                return AperiodicityOutcome::Inconclusive {
                    reason: format!("{count} windows at depth {d} exceed the enumeration cap"),
                }
            }
            Err(e) => return AperiodicityOutcome::Inconclusive { reason: e.to_string() },
        };
        let candidates = candidate_periods(k, d);
        for p in &candidates {
            common.entry(p.clone()).or_insert(true);
        }
        let size = DegreeVector::splat(k, d as i64);
        let zero = DegreeVector::zero(k);
        let mut witnesses: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for w in &windows {
            let grid = PathGrid::new(kg, w);
            let periodic_at = |p: &DegreeVector, m: &DegreeVector| {
                let a = p.positive_part();
                let b = (-p).positive_part();
                grid.blocks_equal(&(m + &a), &grid, &(m + &b), &size)
            };
            for p in &candidates {
                if common[p] && !periodic_at(p, &zero) {
                    common.insert(p.clone(), false);
                }
            }
            let vertex = kg.skeleton().vertex_id(w.range()).to_owned();
            if d < depth || witnesses.contains_key(&vertex) {
                continue;
            }
            let eventually_periodic = candidates
                .iter()
                .any(|p| DegreeVector::box_iter(&zero, &size).any(|m| periodic_at(p, &m)));
            if !eventually_periodic {
                witnesses.insert(vertex, kg.word_ids(w));
            }
        }
        if d == depth && witnesses.len() == kg.vertex_count() {
            return AperiodicityOutcome::AperiodicWitness { depth: d, witnesses };
        }
    }
    let order = candidate_periods(k, depth);
    let all: Vec<DegreeVector> = order.into_iter().filter(|p| common.get(p) == Some(&true)).collect();
    match all.first() {
        Some(p) => AperiodicityOutcome::GlobalPeriod { period: p.clone(), all },
        None => AperiodicityOutcome::Inconclusive {
            reason: format!("no common period and no aperiodic witness at every vertex up to depth {depth}"),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn candidate_order() {
        let c = candidate_periods(2, 1);
        assert_eq!(
            c,
            vec![
                DegreeVector::from([1, 0]),
                DegreeVector::from([0, 1]),
                DegreeVector::from([1, 1]),
                DegreeVector::from([1, -1]),
            ]
        );
        assert_eq!(candidate_periods(1, 3).len(), 3);
    }

    #[test]
    fn g1_has_witness() {
        match aperiodicity_probe(&catalog::g1(), 2) {
            AperiodicityOutcome::AperiodicWitness { witnesses, .. } => assert_eq!(witnesses.len(), 1),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn g4_is_fully_periodic() {
        match aperiodicity_probe(&catalog::g4(), 3) {
            AperiodicityOutcome::GlobalPeriod { period, all } => {
                assert_eq!(period, DegreeVector::from([1, 0]));
                assert_eq!(all.len(), candidate_periods(2, 3).len());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn interchangeable_colors_give_period_one_minus_one() {
        match aperiodicity_probe(&catalog::periodic_two_graph(), 2) {
            AperiodicityOutcome::GlobalPeriod { period, all } => {
                assert_eq!(period, DegreeVector::from([1, -1]));
                assert_eq!(all, vec![DegreeVector::from([1, -1]), DegreeVector::from([2, -2])]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn two_cycle_has_period_two() {
        match aperiodicity_probe(&catalog::two_cycle(), 2) {
            AperiodicityOutcome::GlobalPeriod { period, .. } => assert_eq!(period, DegreeVector::from([2])),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn cap_gives_inconclusive() {
        let g3 = catalog::g3().with_cap(10);
        assert!(matches!(
            aperiodicity_probe(&g3, 1),
            AperiodicityOutcome::Inconclusive { .. }
        ));
    }
}
