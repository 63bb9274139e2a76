//! Stress harness: exact-front equivalence of shared parallel runs against
//! brute-force enumeration across many seeds, strategies, and thread counts.

use moip::instgen::{generate, Family, GenSpec};
use moip::ipsolve::IpTally;
use moip::model::nondominated_filter;
use moip::oracle::enumerate_vectors;
use moip::sharing::{run_parallel_with, ParallelOptions, Strategy};

fn main() {
    let reps: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(3);
    let mut checked = 0u64;
    let mut shared_nonzero = 0u64;
    for rep in 0..reps {
        for seed in 0..12u64 {
            for (family, size, objectives) in [
                (Family::Knapsack, 10, 3),
                (Family::Knapsack, 8, 4),
                (Family::Assignment, 3, 3),
                (Family::Assignment, 4, 4),
                (Family::Tsp, 4, 3),
                (Family::Tsp, 5, 4),
            ] {
                let spec = GenSpec { family, size, num_objectives: objectives, seed };
                let inst = generate(&spec);
                let oracle = nondominated_filter(&enumerate_vectors(&inst).unwrap());
                for strategy in [Strategy::Cluster, Strategy::Spread] {
                    for t in [2usize, 3, objectives] {
                        let opts = ParallelOptions::new(t, strategy);
                        let out = run_parallel_with(&inst, &IpTally::new(), &opts).unwrap();
                        let got = out.front.sorted_vectors();
                        checked += 1;
                        let traffic: u64 = out
                            .per_thread
                            .iter()
                            .map(|s| s.bounds_in + s.ahat_in)
                            .sum();
                        if traffic > 0 {
                            shared_nonzero += 1;
                        }
                        if got != oracle {
                            let missing: Vec<_> =
                                oracle.iter().filter(|v| !got.contains(v)).collect();
                            let extra: Vec<_> =
                                got.iter().filter(|v| !oracle.contains(v)).collect();
                            eprintln!(
                                "MISMATCH rep={rep} {family} size={size} o={objectives} seed={seed} {strategy:?} t={t}\n  missing: {missing:?}\n  extra: {extra:?}"
                            );
                            std::process::exit(1);
                        }
                    }
                }
            }
        }
    }
    println!("ok: {checked} shared runs matched enumeration ({shared_nonzero} with nonzero exchange traffic)");
}
