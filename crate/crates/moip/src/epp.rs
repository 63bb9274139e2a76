//! Slab-parallel front computation: split the range of the last objective
//! into contiguous integer slabs and solve each slab independently.
//!
//! The range comes from the problem itself: the lower end is the plain
//! minimum of the last objective, the upper end is the largest last-objective
//! value among witnesses of the front of the one-fewer-objectives
//! restriction, which is computed recursively with the same thread budget.
//! Slab results are unioned and filtered once at the end; a vector that is
//! non-dominated within its slab can still be dominated from a lower slab,
//! so the final filter is required for exactness.

use std::time::Instant;

use crate::ipsolve::{solve_min, IpTally, SolverOutcome};
use crate::model::{
    evaluate_objectives, ConstraintRow, MoipInstance, ParetoArchive, Relation, Value,
};
use crate::oiplex::{OipSpec, Permutation};
use crate::recursion::{RecursionContext, SolveStats};
use crate::Result;

/// Integer cut points `b_0 = lower - 1 < b_1 < ... < b_m = upper` defining
/// slabs `(b_{i-1}, b_i]` that partition `{lower..=upper}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlabPartition {
    pub lower: Value,
    pub upper: Value,
    pub cuts: Vec<Value>,
}

impl SlabPartition {
    /// Half-open slabs as `(exclusive_low, inclusive_high)` pairs.
    pub fn slabs(&self) -> impl Iterator<Item = (Value, Value)> + '_ {
        self.cuts.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn len(&self) -> usize {
        self.cuts.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Split `{lower..=upper}` into at most `t` slabs of near-equal width.
///
/// Cut `i` sits at `lower - 1 + round(i * width / t)`; duplicate cuts from a
/// degenerate range collapse, so every slab is nonempty.
pub fn make_slabs(lower: Value, upper: Value, t: usize) -> SlabPartition {
    assert!(lower <= upper, "empty slab range {lower}..={upper}");
    assert!(t >= 1, "need at least one slab");
    let span = upper - lower + 1;
    let t = t as Value;
    let mut cuts = vec![lower - 1];
    for i in 1..=t {
        // Round half up, in integers.
        let offset = (2 * i * span + t) / (2 * t);
        let cut = lower - 1 + offset;
        if cut > *cuts.last().unwrap() {
            cuts.push(cut);
        }
    }
    debug_assert_eq!(*cuts.last().unwrap(), upper);
    SlabPartition { lower, upper, cuts }
}

/// Range `(L, U)` of the last objective: `L` by a direct minimization, `U`
/// from the recursive front of the restriction to the other objectives.
/// `None` when the instance is infeasible.
pub fn objective_range(
    inst: &MoipInstance,
    threads: usize,
    tally: &IpTally,
    deadline: Option<Instant>,
) -> Result<Option<(Value, Value)>> {
    let n = inst.num_objectives();
    assert!(n >= 2, "objective range needs at least two objectives");
    let restricted = inst.restrict_objectives(n - 1);
    let (prev_front, _) = run_epp_with(&restricted, threads, tally, deadline)?;
    if prev_front.is_empty() {
        return Ok(None);
    }
    // Witnesses live in the shared variable space, so the full instance can
    // evaluate the dropped objective on them. Any witness of a restricted
    // front vector sits at or above the true front maximum of the last
    // objective: a cheaper completion of the same projection would dominate.
    let upper = prev_front
        .iter()
        .map(|(_, w)| evaluate_objectives(inst, w).value(n))
        .max()
        .unwrap();
    let lower = match solve_min(inst, &[], n, tally, deadline)? {
        SolverOutcome::Optimal { value, .. } => value,
        SolverOutcome::Infeasible => return Ok(None),
    };
    Ok(Some((lower, upper)))
}

/// Whole-front solve with the last objective's range split across `t`
/// parallel slab workers.
pub fn run_epp(inst: &MoipInstance, t: usize) -> Result<ParetoArchive> {
    run_epp_with(inst, t, &IpTally::new(), None).map(|(front, _)| front)
}

pub fn run_epp_with(
    inst: &MoipInstance,
    t: usize,
    tally: &IpTally,
    deadline: Option<Instant>,
) -> Result<(ParetoArchive, SolveStats)> {
    assert!(t >= 1, "need at least one thread");
    let started = Instant::now();
    let local = tally.child();
    let n = inst.num_objectives();
    let mut front = ParetoArchive::new();
    let mut stats = SolveStats::default();

    if n == 1 {
        if let SolverOutcome::Optimal { value, witness } =
            solve_min(inst, &[], 1, &local, deadline)?
        {
            front.insert(crate::model::ObjectiveVector(vec![value]), witness);
        }
    } else if let Some((lower, upper)) = objective_range(inst, t, &local, deadline)? {
        let partition = make_slabs(lower, upper, t);
        let last_obj = inst.objective(n).to_vec();
        let results: Vec<Result<(ParetoArchive, SolveStats)>> =
            std::thread::scope(|scope| {
                let handles: Vec<_> = partition
                    .slabs()
                    .map(|(low_excl, high_incl)| {
                        let child = local.child();
                        let rows = vec![
                            ConstraintRow::new(last_obj.clone(), Relation::Ge, low_excl + 1),
                            ConstraintRow::new(last_obj.clone(), Relation::Le, high_incl),
                        ];
                        scope.spawn(move || {
                            let slab_inst = inst.with_extra_rows(rows);
                            let perm = Permutation::identity(n);
                            let mut ctx = RecursionContext::new(
                                &slab_inst,
                                perm.clone(),
                                child,
                                deadline,
                            );
                            ctx.solve_oip(&OipSpec::unconstrained(perm))?;
                            Ok(ctx.finish(started))
                        })
                    })
                    .collect();
                handles
                    .into_iter()
                    .map(|h| h.join().expect("slab thread panicked"))
                    .collect()
            });
        for result in results {
            let (archive, slab_stats) = result?;
            front.absorb(archive);
            stats.cache_hits += slab_stats.cache_hits;
        }
    }

    stats.ips_solved = local.count();
    stats.wall_ms = started.elapsed().as_millis() as u64;
    Ok((front, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instgen::{gen_knapsack, selection_instance, Family, GenSpec};
    use crate::model::{nondominated_filter, ObjectiveVector};
    use crate::oracle::enumerate_vectors;
    use crate::recursion::run_aira;

    fn ov(vals: &[Value]) -> ObjectiveVector {
        ObjectiveVector(vals.to_vec())
    }

    fn kp10() -> MoipInstance {
        gen_knapsack(&GenSpec {
            family: Family::Knapsack,
            size: 10,
            num_objectives: 3,
            seed: 11,
        })
    }

    #[test]
    fn slabs_even_split() {
        let p = make_slabs(0, 9, 2);
        assert_eq!(p.cuts, vec![-1, 4, 9]);
        assert_eq!(p.slabs().collect::<Vec<_>>(), vec![(-1, 4), (4, 9)]);
    }

    #[test]
    fn slabs_degenerate_range_collapses() {
        let p = make_slabs(5, 5, 3);
        assert_eq!(p.cuts, vec![4, 5]);
        assert_eq!(p.len(), 1);
    }

    #[test]
    fn slabs_rounded_sizes() {
        let p = make_slabs(0, 10, 3);
        let sizes: Vec<Value> = p.slabs().map(|(lo, hi)| hi - lo).collect();
        assert_eq!(sizes.iter().sum::<Value>(), 11);
        let mut sorted = sizes.clone();
        sorted.sort();
        assert_eq!(sorted, vec![3, 4, 4]);
        // Exact cover of 0..=10 by enumeration.
        for v in 0..=10 {
            let holders = p.slabs().filter(|(lo, hi)| *lo < v && v <= *hi).count();
            assert_eq!(holders, 1, "value {v}");
        }
    }

    #[test]
    fn slabs_cover_and_disjoint_randomized() {
        let mut rng = crate::rng::SeededRng::new(31);
        for _ in 0..200 {
            let lower = rng.uniform(-50, 50);
            let upper = lower + rng.uniform(0, 60);
            let t = rng.uniform(1, 8) as usize;
            let p = make_slabs(lower, upper, t);
            assert!(p.len() <= t);
            assert!(p.cuts.windows(2).all(|w| w[0] < w[1]));
            for v in lower..=upper {
                let holders = p.slabs().filter(|(lo, hi)| *lo < v && v <= *hi).count();
                assert_eq!(holders, 1);
            }
            if upper - lower + 1 >= t as Value {
                assert_eq!(p.len(), t);
            }
        }
    }

    #[test]
    fn range_on_single_point_instance() {
        let inst = selection_instance(&[vec![2, 5, 7]]);
        let got = objective_range(&inst, 2, &IpTally::new(), None).unwrap();
        assert_eq!(got, Some((7, 7)));
    }

    #[test]
    fn range_on_knapsack_matches_enumeration() {
        let inst = kp10();
        let (lower, upper) = objective_range(&inst, 2, &IpTally::new(), None)
            .unwrap()
            .unwrap();
        let all = enumerate_vectors(&inst).unwrap();
        let true_low = all.iter().map(|v| v.value(3)).min().unwrap();
        assert_eq!(lower, true_low);
        // The upper end must cover the front and stay within feasible values.
        let front = nondominated_filter(&all);
        let front_max = front.iter().map(|v| v.value(3)).max().unwrap();
        let feas_max = all.iter().map(|v| v.value(3)).max().unwrap();
        assert!(upper >= front_max);
        assert!(upper <= feas_max);
    }

    #[test]
    fn range_signals_infeasible() {
        let inst = MoipInstance::new(
            vec![vec![1], vec![1]],
            vec![
                ConstraintRow::new(vec![1], Relation::Ge, 1),
                ConstraintRow::new(vec![1], Relation::Le, 0),
            ],
            vec![crate::model::VarKind::Binary],
        )
        .unwrap();
        assert_eq!(objective_range(&inst, 2, &IpTally::new(), None).unwrap(), None);
        assert!(run_epp(&inst, 2).unwrap().is_empty());
    }

    #[test]
    fn one_slab_equals_sequential_front() {
        let inst = kp10();
        let epp = run_epp(&inst, 1).unwrap();
        let aira = run_aira(&inst).unwrap();
        assert_eq!(epp.sorted_vectors(), aira.sorted_vectors());
    }

    #[test]
    fn multi_slab_matches_enumeration() {
        let inst = kp10();
        let oracle = nondominated_filter(&enumerate_vectors(&inst).unwrap());
        for t in [2, 4] {
            let front = run_epp(&inst, t).unwrap();
            assert_eq!(front.sorted_vectors(), oracle, "t={t}");
        }
    }

    #[test]
    fn slab_local_vector_dominated_from_lower_slab_is_filtered() {
        // Points: a=(0,4,3), b=(1,1,1), d=(2,2,3). Globally b dominates d,
        // but d is non-dominated within the upper slab (it only meets a
        // there). The union of slab fronts therefore strictly contains the
        // true front and the final filter must remove d.
        let vectors = vec![vec![0, 4, 3], vec![1, 1, 1], vec![2, 2, 3]];
        let inst = selection_instance(&vectors);
        let front = run_epp(&inst, 2).unwrap();
        assert_eq!(front.sorted_vectors(), vec![ov(&[0, 4, 3]), ov(&[1, 1, 1])]);

        // Demonstrate that the union before filtering differs: solve the
        // upper slab (f_3 in (2, 3]) directly.
        let rows = vec![
            ConstraintRow::new(inst.objective(3).to_vec(), Relation::Ge, 3),
            ConstraintRow::new(inst.objective(3).to_vec(), Relation::Le, 3),
        ];
        let upper_slab = inst.with_extra_rows(rows);
        let slab_front = run_aira(&upper_slab).unwrap();
        assert!(slab_front.contains_vector(&ov(&[2, 2, 3])));
    }

    #[test]
    fn slab_order_independence() {
        // Solving slabs in any order yields the same final front; slabs are
        // independent subproblems, so it suffices that repeated runs agree.
        let inst = kp10();
        let reference = run_epp(&inst, 3).unwrap().sorted_vectors();
        for _ in 0..3 {
            assert_eq!(run_epp(&inst, 3).unwrap().sorted_vectors(), reference);
        }
    }
}
