//! Permutation selection, the shared bounds board, and the permutation-
//! sharing parallel front solver.
//!
//! Each worker thread solves the whole problem under its own objective
//! permutation and publishes, per permuted position, the upper bound it is
//! currently working under. Two threads whose permutations and bounds agree
//! on their final `j` positions may exchange the bound just before that
//! suffix: the sender has already found every solution of the common
//! subproblem above it, so the receiver loses nothing by skipping that
//! region. Agreement on zero positions is vacuous, which makes the bound at
//! the very last position globally shareable.
//!
//! The board is single-writer-per-slot and many-reader; a snapshot is always
//! some complete previously published state, never a torn mix.

use std::sync::{Arc, RwLock};
use std::time::Instant;

use crate::ipsolve::IpTally;
use crate::model::{MoipInstance, ParetoArchive, Value};
use crate::oiplex::{Bound, OipSpec, Permutation};
use crate::recursion::{RecursionContext, SolveStats};
use crate::{Error, Result};

/// How worker permutations are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Maximize pairwise suffix agreement: workers share deep, often.
    Cluster,
    /// Minimize pairwise suffix agreement: every objective ends up last on
    /// some worker, so last-position bounds reach everyone.
    Spread,
}

impl std::str::FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cluster" => Ok(Strategy::Cluster),
            "spread" => Ok(Strategy::Spread),
            other => Err(Error::Invalid(format!("unknown strategy '{other}'"))),
        }
    }
}

fn factorial_at_least(n: usize, t: usize) -> bool {
    let mut f: u128 = 1;
    for i in 1..=n {
        f = f.saturating_mul(i as u128);
        if f >= t as u128 {
            return true;
        }
    }
    f >= t as u128
}

/// `t` distinct permutations of `{1..n}` under the given strategy.
///
/// Cluster: the lexicographically first `t` permutations of `{1..m}` for the
/// smallest `m` with `m! >= t`, each fixing positions `m+1..n` in place.
/// Spread: the `n` cyclic rotations of the identity; then, for each pinned
/// suffix length `1, 2, ...`, the proper rotations of the remaining prefix;
/// then any still-missing permutations in lexicographic order.
pub fn select_permutations(n: usize, t: usize, strategy: Strategy) -> Result<Vec<Permutation>> {
    if t < 1 || !factorial_at_least(n, t) {
        return Err(Error::Invalid(format!(
            "thread count {t} out of range 1..={n}!"
        )));
    }
    let perms = match strategy {
        Strategy::Cluster => {
            let mut m = 1;
            while !factorial_at_least(m, t) {
                m += 1;
            }
            lex_permutations(m)
                .take(t)
                .map(|head| {
                    let mut images = head;
                    images.extend(m + 1..=n);
                    Permutation::new(images).unwrap()
                })
                .collect()
        }
        Strategy::Spread => {
            let mut out: Vec<Vec<usize>> = Vec::with_capacity(t);
            // Cyclic rotations of the identity.
            for r in 0..n.min(t) {
                out.push((0..n).map(|i| (i + r) % n + 1).collect());
            }
            // Proper rotations of the prefix with the suffix pinned.
            'outer: for pin in 1..n.saturating_sub(1) {
                let plen = n - pin;
                for r in 1..plen {
                    if out.len() == t {
                        break 'outer;
                    }
                    let mut images: Vec<usize> = (0..plen).map(|i| (i + r) % plen + 1).collect();
                    images.extend(plen + 1..=n);
                    out.push(images);
                }
            }
            if out.len() < t {
                for images in lex_permutations(n) {
                    if out.len() == t {
                        break;
                    }
                    if !out.contains(&images) {
                        out.push(images);
                    }
                }
            }
            out.truncate(t);
            out.into_iter()
                .map(|images| Permutation::new(images).unwrap())
                .collect()
        }
    };
    Ok(perms)
}

/// All permutations of `{1..m}` in lexicographic order.
fn lex_permutations(m: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut current: Option<Vec<usize>> = Some((1..=m).collect());
    std::iter::from_fn(move || {
        let out = current.clone()?;
        current = next_permutation(out.clone());
        Some(out)
    })
}

fn next_permutation(mut v: Vec<usize>) -> Option<Vec<usize>> {
    let n = v.len();
    if n < 2 {
        return None;
    }
    let mut i = n - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return None;
    }
    let mut j = n - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    Some(v)
}

/// Published state of one permuted position.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LevelState {
    /// Upper bound in effect on the objective at this position.
    pub bound: Bound,
    /// Maximum value of that objective attained in the current activation.
    pub attained: Option<Value>,
    /// Whether every solution above `bound` at this position has been found
    /// (by this thread or, transitively, by threads it adopted bounds from).
    pub above_complete: bool,
}

impl LevelState {
    fn initial() -> Self {
        LevelState { bound: Bound::Unbounded, attained: None, above_complete: false }
    }
}

/// A thread's published view: its permutation, the free prefix of the
/// subproblem it is currently solving, and per-position level states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThreadPublicState {
    pub perm: Permutation,
    pub free_prefix: usize,
    /// `levels[i]` describes position `i + 1`.
    pub levels: Vec<LevelState>,
}

impl ThreadPublicState {
    /// Pre-publication state: nothing bounded, nothing claimed.
    pub fn initial(perm: Permutation) -> Self {
        let n = perm.len();
        ThreadPublicState {
            perm,
            free_prefix: n,
            levels: vec![LevelState::initial(); n],
        }
    }
}

/// One atomically-swapped slot per worker; single writer per slot.
pub struct BoundsBoard {
    slots: Vec<RwLock<Arc<ThreadPublicState>>>,
}

impl BoundsBoard {
    pub fn new(perms: Vec<Permutation>) -> Self {
        BoundsBoard {
            slots: perms
                .into_iter()
                .map(|p| RwLock::new(Arc::new(ThreadPublicState::initial(p))))
                .collect(),
        }
    }

    pub fn slots(&self) -> usize {
        self.slots.len()
    }

    /// Replace slot contents with a complete new state. Owning thread only.
    pub fn publish(&self, slot: usize, state: ThreadPublicState) {
        *self.slots[slot].write().unwrap() = Arc::new(state);
    }

    /// Some previously-published complete state; may be stale, never torn.
    pub fn snapshot(&self, slot: usize) -> Arc<ThreadPublicState> {
        self.slots[slot].read().unwrap().clone()
    }
}

/// Connection from a solver context to the board.
#[derive(Clone)]
pub struct ShareHooks {
    pub board: Arc<BoundsBoard>,
    pub slot: usize,
}

/// One bound the receiver may adopt: an upper bound on `objective`, taken
/// from the sender's position `position = n - j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SharedBound {
    pub objective: usize,
    pub bound: Value,
    pub position: usize,
    pub j: usize,
}

/// Bounds `theirs` currently certifies that `mine` may use.
///
/// For each `j >= 0` with: `j < n - k` for both free prefixes, permutations
/// agreeing on the final `j` positions, bounds agreeing on the final `j`
/// positions, and the sender certifying completeness above its bound at
/// position `n - j`, the sender's bound there is usable by the receiver:
/// every solution of the common subproblem at or above it is already found.
/// `j = 0` needs no agreement at all and so carries the last position's
/// bound to every thread.
pub fn shareable_bounds(
    mine: &ThreadPublicState,
    theirs: &ThreadPublicState,
) -> Vec<SharedBound> {
    let n = mine.perm.len();
    assert_eq!(n, theirs.perm.len(), "boards mix different objective counts");
    let mut out = Vec::new();
    for j in 0..n {
        if j >= n - theirs.free_prefix.min(n) || j >= n - mine.free_prefix.min(n) {
            break;
        }
        if j > 0 {
            let q = n - j + 1;
            if mine.perm.image(q) != theirs.perm.image(q) {
                break;
            }
            if mine.levels[q - 1].bound != theirs.levels[q - 1].bound {
                break;
            }
        }
        let position = n - j;
        let level = &theirs.levels[position - 1];
        if level.above_complete {
            if let Bound::At(bound) = level.bound {
                out.push(SharedBound {
                    objective: theirs.perm.image(position),
                    bound,
                    position,
                    j,
                });
            }
        }
    }
    out
}

/// Options for [`run_parallel_with`].
#[derive(Debug, Clone)]
pub struct ParallelOptions {
    pub threads: usize,
    pub strategy: Strategy,
    pub share: bool,
    pub cache_enabled: bool,
    pub perms_override: Option<Vec<Permutation>>,
    pub deadline: Option<Instant>,
}

impl ParallelOptions {
    pub fn new(threads: usize, strategy: Strategy) -> Self {
        ParallelOptions {
            threads,
            strategy,
            share: true,
            cache_enabled: true,
            perms_override: None,
            deadline: None,
        }
    }
}

/// Result of a parallel run.
pub struct RunOutcome {
    pub front: ParetoArchive,
    pub per_thread: Vec<SolveStats>,
    pub perms: Vec<Permutation>,
    pub total_ips: u64,
}

/// Solve the whole front with `t` permuted workers exchanging bounds live.
pub fn run_parallel(inst: &MoipInstance, t: usize, strategy: Strategy) -> Result<ParetoArchive> {
    run_parallel_with(inst, &IpTally::new(), &ParallelOptions::new(t, strategy))
        .map(|outcome| outcome.front)
}

pub fn run_parallel_with(
    inst: &MoipInstance,
    tally: &IpTally,
    opts: &ParallelOptions,
) -> Result<RunOutcome> {
    let n = inst.num_objectives();
    let perms = match &opts.perms_override {
        Some(perms) => {
            if perms.len() != opts.threads {
                return Err(Error::Invalid(format!(
                    "{} permutations supplied for {} threads",
                    perms.len(),
                    opts.threads
                )));
            }
            for p in perms {
                if p.len() != n {
                    return Err(Error::Invalid(format!(
                        "permutation {p} does not cover {n} objectives"
                    )));
                }
            }
            perms.clone()
        }
        None => select_permutations(n, opts.threads, opts.strategy)?,
    };

    let board = Arc::new(BoundsBoard::new(perms.clone()));
    let started = Instant::now();
    let results: Vec<Result<(ParetoArchive, SolveStats)>> = std::thread::scope(|scope| {
        let handles: Vec<_> = perms
            .iter()
            .enumerate()
            .map(|(slot, perm)| {
                let board = board.clone();
                let child = tally.child();
                let perm = perm.clone();
                scope.spawn(move || {
                    let mut ctx = RecursionContext::new(inst, perm.clone(), child, opts.deadline)
                        .with_cache_enabled(opts.cache_enabled);
                    if opts.share && opts.threads > 1 {
                        ctx = ctx.with_hooks(ShareHooks { board, slot });
                    }
                    ctx.solve_oip(&OipSpec::unconstrained(perm))?;
                    Ok(ctx.finish(started))
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("solver thread panicked"))
            .collect()
    });

    let mut front = ParetoArchive::new();
    let mut per_thread = Vec::with_capacity(results.len());
    for result in results {
        let (archive, stats) = result?;
        front.absorb(archive);
        per_thread.push(stats);
    }
    let total_ips = per_thread.iter().map(|s| s.ips_solved).sum();
    Ok(RunOutcome { front, per_thread, perms, total_ips })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instgen::{gen_knapsack, Family, GenSpec};
    use crate::model::nondominated_filter;
    use crate::oiplex::suffix_agreement;
    use crate::oracle::enumerate_vectors;
    use crate::recursion::run_aira;

    fn perm(images: &[usize]) -> Permutation {
        Permutation::new(images.to_vec()).unwrap()
    }

    fn perm_set(perms: &[Permutation]) -> std::collections::BTreeSet<Vec<usize>> {
        perms.iter().map(|p| p.images().to_vec()).collect()
    }

    #[test]
    fn cluster_5_6_matches_published_set() {
        let got = select_permutations(5, 6, Strategy::Cluster).unwrap();
        let want = [
            vec![1, 2, 3, 4, 5],
            vec![1, 3, 2, 4, 5],
            vec![2, 1, 3, 4, 5],
            vec![2, 3, 1, 4, 5],
            vec![3, 1, 2, 4, 5],
            vec![3, 2, 1, 4, 5],
        ];
        assert_eq!(perm_set(&got), want.iter().cloned().collect());
    }

    #[test]
    fn spread_5_5_is_cyclic_rotations() {
        let got = select_permutations(5, 5, Strategy::Spread).unwrap();
        let want = [
            vec![1, 2, 3, 4, 5],
            vec![2, 3, 4, 5, 1],
            vec![3, 4, 5, 1, 2],
            vec![4, 5, 1, 2, 3],
            vec![5, 1, 2, 3, 4],
        ];
        assert_eq!(perm_set(&got), want.iter().cloned().collect());
    }

    #[test]
    fn spread_and_cluster_coincide_on_full_s3() {
        let cluster = select_permutations(3, 6, Strategy::Cluster).unwrap();
        let spread = select_permutations(3, 6, Strategy::Spread).unwrap();
        assert_eq!(perm_set(&cluster), perm_set(&spread));
        assert_eq!(cluster.len(), 6);
    }

    #[test]
    fn selection_rejects_out_of_range_thread_counts() {
        assert!(select_permutations(3, 0, Strategy::Spread).is_err());
        assert!(select_permutations(3, 7, Strategy::Spread).is_err());
        assert!(select_permutations(3, 7, Strategy::Cluster).is_err());
    }

    #[test]
    fn selected_permutations_are_distinct() {
        for strategy in [Strategy::Cluster, Strategy::Spread] {
            for n in 2..=5usize {
                let limit: usize = (1..=n).product();
                for t in 1..=limit.min(12) {
                    let perms = select_permutations(n, t, strategy).unwrap();
                    assert_eq!(perm_set(&perms).len(), t, "{strategy:?} n={n} t={t}");
                }
            }
        }
    }

    #[test]
    fn cluster_agreement_is_high_and_spread_agreement_zero() {
        let cluster = select_permutations(5, 6, Strategy::Cluster).unwrap();
        for a in &cluster {
            for b in &cluster {
                if a != b {
                    assert!(suffix_agreement(a, b) >= 2);
                }
            }
        }
        let spread = select_permutations(5, 5, Strategy::Spread).unwrap();
        for a in &spread {
            for b in &spread {
                if a != b {
                    assert_eq!(suffix_agreement(a, b), 0);
                }
            }
        }
    }

    fn example_state(
        images: &[usize],
        free_prefix: usize,
        bounds: &[Value],
    ) -> ThreadPublicState {
        let n = images.len();
        let levels = (1..=n)
            .map(|p| {
                if p <= free_prefix {
                    LevelState::initial()
                } else {
                    LevelState {
                        bound: Bound::At(bounds[p - free_prefix - 1]),
                        attained: None,
                        above_complete: true,
                    }
                }
            })
            .collect();
        ThreadPublicState { perm: perm(images), free_prefix, levels }
    }

    #[test]
    fn worked_example_round_one_last_position_bound_flows() {
        let p1 = example_state(&[5, 1, 4, 2, 3], 2, &[13, 15, 18]);
        let p2 = example_state(&[1, 4, 5, 2, 3], 2, &[8, 15, 14]);
        let to_p1 = shareable_bounds(&p1, &p2);
        // Bounds differ at the last position, so only j = 0 applies:
        // objective 3 (last of p2) at bound 14.
        assert_eq!(
            to_p1,
            vec![SharedBound { objective: 3, bound: 14, position: 5, j: 0 }]
        );
        // Symmetrically p2 sees p1's last-position bound 18, a no-op there.
        let to_p2 = shareable_bounds(&p2, &p1);
        assert_eq!(
            to_p2,
            vec![SharedBound { objective: 3, bound: 18, position: 5, j: 0 }]
        );
    }

    #[test]
    fn worked_example_round_two_deeper_bounds_flow() {
        // After adopting 14, the states agree on their final two positions.
        let p1 = example_state(&[5, 1, 4, 2, 3], 2, &[13, 15, 14]);
        let p2 = example_state(&[1, 4, 5, 2, 3], 2, &[8, 15, 14]);
        let to_p1 = shareable_bounds(&p1, &p2);
        assert!(to_p1.contains(&SharedBound { objective: 5, bound: 8, position: 3, j: 2 }));
        let to_p2 = shareable_bounds(&p2, &p1);
        assert!(to_p2.contains(&SharedBound { objective: 4, bound: 13, position: 3, j: 2 }));
    }

    #[test]
    fn identical_states_share_only_noops() {
        let p1 = example_state(&[1, 2, 3], 1, &[7, 9]);
        let p2 = example_state(&[1, 2, 3], 1, &[7, 9]);
        for sb in shareable_bounds(&p1, &p2) {
            // Everything offered is a bound the receiver already has.
            let pos_bound = p1.levels[sb.position - 1].bound;
            assert_eq!(pos_bound, Bound::At(sb.bound));
        }
    }

    #[test]
    fn fresh_board_shares_nothing() {
        let a = ThreadPublicState::initial(perm(&[1, 2, 3]));
        let b = ThreadPublicState::initial(perm(&[2, 3, 1]));
        assert!(shareable_bounds(&a, &b).is_empty());
    }

    #[test]
    fn publish_then_snapshot_roundtrips() {
        let board = BoundsBoard::new(vec![perm(&[1, 2]), perm(&[2, 1])]);
        let initial = board.snapshot(0);
        assert_eq!(initial.free_prefix, 2);
        assert!(initial.levels.iter().all(|l| l.bound == Bound::Unbounded));
        let state = example_state(&[1, 2], 1, &[42]);
        board.publish(0, state.clone());
        assert_eq!(*board.snapshot(0), state);
        // Slot 1 untouched.
        assert_eq!(board.snapshot(1).free_prefix, 2);
    }

    #[test]
    fn snapshots_are_never_torn() {
        // Writer publishes a known sequence of internally-consistent states;
        // every observed snapshot must be one of the published states (or
        // the initial state), never a mix.
        let make_state = |i: i64| {
            let levels = vec![
                LevelState {
                    bound: Bound::At(i),
                    attained: Some(i),
                    above_complete: true,
                };
                3
            ];
            ThreadPublicState { perm: perm(&[1, 2, 3]), free_prefix: 0, levels }
        };
        let initial = ThreadPublicState::initial(perm(&[1, 2, 3]));
        let board = Arc::new(BoundsBoard::new(vec![perm(&[1, 2, 3]), perm(&[1, 2, 3])]));
        let writer_board = board.clone();
        std::thread::scope(|scope| {
            scope.spawn(move || {
                for i in 0..20_000i64 {
                    writer_board.publish(0, make_state(i));
                }
            });
            for _ in 0..2 {
                let reader_board = board.clone();
                let initial = initial.clone();
                scope.spawn(move || {
                    for _ in 0..20_000 {
                        let snap = reader_board.snapshot(0);
                        let in_log = *snap == initial
                            || matches!(snap.levels[0].bound, Bound::At(i) if *snap == make_state(i));
                        assert!(in_log, "torn snapshot: {snap:?}");
                    }
                });
            }
        });
    }

    #[test]
    fn single_thread_run_equals_aira() {
        let inst = gen_knapsack(&GenSpec {
            family: Family::Knapsack,
            size: 9,
            num_objectives: 3,
            seed: 42,
        });
        let aira = run_aira(&inst).unwrap();
        for strategy in [Strategy::Cluster, Strategy::Spread] {
            let par = run_parallel(&inst, 1, strategy).unwrap();
            assert_eq!(par.sorted_vectors(), aira.sorted_vectors());
        }
    }

    #[test]
    fn parallel_fronts_match_enumeration() {
        let inst = gen_knapsack(&GenSpec {
            family: Family::Knapsack,
            size: 10,
            num_objectives: 3,
            seed: 8,
        });
        let oracle = nondominated_filter(&enumerate_vectors(&inst).unwrap());
        for strategy in [Strategy::Cluster, Strategy::Spread] {
            for t in [2, 3] {
                let front = run_parallel(&inst, t, strategy).unwrap();
                assert_eq!(front.sorted_vectors(), oracle, "{strategy:?} t={t}");
            }
        }
    }

    #[test]
    fn sharing_toggle_never_changes_front() {
        for seed in [1u64, 2, 3] {
            let inst = gen_knapsack(&GenSpec {
                family: Family::Knapsack,
                size: 10,
                num_objectives: 3,
                seed,
            });
            let tally = IpTally::new();
            let mut shared = ParallelOptions::new(3, Strategy::Spread);
            shared.share = true;
            let mut unshared = shared.clone();
            unshared.share = false;
            let a = run_parallel_with(&inst, &tally, &shared).unwrap();
            let b = run_parallel_with(&inst, &tally, &unshared).unwrap();
            assert_eq!(a.front.sorted_vectors(), b.front.sorted_vectors());
        }
    }

    #[test]
    fn repeated_runs_are_deterministic() {
        let inst = gen_knapsack(&GenSpec {
            family: Family::Knapsack,
            size: 9,
            num_objectives: 3,
            seed: 77,
        });
        let reference = run_parallel(&inst, 3, Strategy::Spread)
            .unwrap()
            .sorted_vectors();
        for _ in 0..5 {
            let again = run_parallel(&inst, 3, Strategy::Spread)
                .unwrap()
                .sorted_vectors();
            assert_eq!(again, reference);
        }
    }
}
