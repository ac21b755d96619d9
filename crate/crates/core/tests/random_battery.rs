//! The full invariant battery on seeded random skeletons, at depths scaled to
//! the size of each graph.

use kgraph_core::catalog::random;
use kgraph_core::checks::{run_suite, CheckConfig};
use kgraph_core::validate_skeleton;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const BUDGET: u64 = 1_000;

fn battery(k: usize, seeds: std::ops::Range<u64>) {
    for seed in seeds {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 * k as u64 + seed);
        let kg = random::graph(&mut rng, k, 6, 4);
        assert!(kg.vertex_count() <= 6);
        assert!(validate_skeleton(kg.skeleton()).is_valid());
        let cfg = CheckConfig {
            seed,
            ..CheckConfig::scaled(&kg, BUDGET)
        };
        let report = run_suite(&kg, &cfg);
        for c in &report.checks {
            assert!(c.passed, "k = {k}, seed = {seed}: {c:?}");
        }
    }
}

#[test]
fn random_one_graphs() {
    battery(1, 0..6);
}

#[test]
fn random_two_graphs() {
    battery(2, 0..4);
}

#[test]
fn random_three_graphs() {
    battery(3, 0..3);
}
