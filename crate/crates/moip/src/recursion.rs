//! The recursive constrained-lexicographic front solver with relaxation
//! reuse.
//!
//! [`RecursionContext::solve_oip`] computes the exact non-dominated set of an
//! [`OipSpec`] over a [`MoipInstance`]: at free prefix 1 (or 0) a single
//! hierarchical lexicographic solve; above that, a loop that repeatedly
//! solves the one-smaller-prefix subproblem under a decreasing upper bound on
//! the innermost free objective. After each round the bound drops to one
//! below the maximum attained value, which is exactly what makes the union of
//! the rounds the full answer for integer-valued objectives.
//!
//! Solved subproblems are cached per `(prefix, permutation suffix)`; an
//! exact cached set answers a tighter query whenever its bounds are looser,
//! every cached vector satisfies the tighter bounds, and the adopted side
//! bounds match.
//!
//! [`run_aira`] is the sequential whole-front baseline (identity permutation,
//! no sharing). When a context carries [`ShareHooks`], the loop additionally
//! publishes its per-position bounds to the bounds board and adopts
//! partners' published bounds at loop boundaries; see the [`crate::sharing`]
//! module for the exchange rules.

use std::collections::{BTreeSet, HashMap};
use std::time::Instant;

use crate::ipsolve::{solve_lex, IpTally, SideConstraint, SolverOutcome};
use crate::model::{
    evaluate_objectives, MoipInstance, ObjectiveVector, ParetoArchive, Value,
};
use crate::oiplex::{Bound, OipSpec, Permutation};
use crate::sharing::{LevelState, ShareHooks, ThreadPublicState};
use crate::{Error, Result};

/// Per-run, per-thread solve statistics.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SolveStats {
    /// Single-objective IP solves performed by this context.
    pub ips_solved: u64,
    /// Subproblems answered from the relaxation cache.
    pub cache_hits: u64,
    /// Foreign bounds adopted as side constraints.
    pub bounds_in: u64,
    /// Foreign bounds adopted directly into an active loop bound.
    pub ahat_in: u64,
    /// Own bound tightenings made visible to partners.
    pub bounds_out: u64,
    /// Wall-clock duration of the run.
    pub wall_ms: u64,
}

impl SolveStats {
    /// Flat `key=value` block consumed by the benchmark harness.
    pub fn to_kv_block(&self) -> String {
        format!(
            "ips_solved={}\ncache_hits={}\nbounds_in={}\nahat_in={}\nbounds_out={}\nwall_ms={}\n",
            self.ips_solved, self.cache_hits, self.bounds_in, self.ahat_in, self.bounds_out,
            self.wall_ms
        )
    }

    /// Componentwise sum, with `wall_ms` taking the maximum.
    pub fn merge(&mut self, other: &SolveStats) {
        self.ips_solved += other.ips_solved;
        self.cache_hits += other.cache_hits;
        self.bounds_in += other.bounds_in;
        self.ahat_in += other.ahat_in;
        self.bounds_out += other.bounds_out;
        self.wall_ms = self.wall_ms.max(other.wall_ms);
    }
}

/// Most recent solved subproblems per `(prefix, permutation suffix)` key.
///
/// Each entry records the positional bounds it was solved under and the
/// per-objective side bounds (adopted from partners) in effect at the time.
/// Entries are evicted oldest-first beyond a small per-key depth; eviction
/// only costs recomputation.
#[derive(Debug, Default)]
pub struct RelaxationCache {
    enabled: bool,
    entries: HashMap<(usize, Vec<usize>), Vec<CacheEntry>>,
}

#[derive(Debug)]
struct CacheEntry {
    bounds: Vec<Bound>,
    sides: Vec<Bound>,
    /// Whether the set is the exact answer for its subproblem. A walk that
    /// skipped bands on a partner's word produces a subset instead; such a
    /// set may only be replayed for the identical subproblem, where the
    /// partner's certificates still vouch for the difference.
    exact: bool,
    set: Vec<ObjectiveVector>,
}

const CACHE_DEPTH_PER_KEY: usize = 32;

impl RelaxationCache {
    pub fn new(enabled: bool) -> Self {
        RelaxationCache { enabled, entries: HashMap::new() }
    }

    fn key(spec: &OipSpec) -> (usize, Vec<usize>) {
        let suffix: Vec<usize> = (spec.free_prefix() + 1..=spec.n())
            .map(|p| spec.perm().image(p))
            .collect();
        (spec.free_prefix(), suffix)
    }

    fn store(&mut self, spec: &OipSpec, sides: &[Bound], exact: bool, set: Vec<ObjectiveVector>) {
        if !self.enabled {
            return;
        }
        let list = self.entries.entry(Self::key(spec)).or_default();
        list.retain(|e| e.bounds != spec.bounds() || e.sides != sides);
        if list.len() >= CACHE_DEPTH_PER_KEY {
            list.remove(0);
        }
        list.push(CacheEntry {
            bounds: spec.bounds().to_vec(),
            sides: sides.to_vec(),
            exact,
            set,
        });
    }

    /// An exact entry with the same side bounds, looser positional bounds,
    /// and no vector violating the query answers the query exactly. An
    /// inexact entry is replayed only for the identical subproblem.
    fn lookup(&self, spec: &OipSpec, sides: &[Bound]) -> Option<&[ObjectiveVector]> {
        if !self.enabled {
            return None;
        }
        let list = self.entries.get(&Self::key(spec))?;
        list.iter().rev().find_map(|entry| {
            if entry.sides != sides {
                return None;
            }
            let usable = if entry.exact {
                entry
                    .bounds
                    .iter()
                    .zip(spec.bounds())
                    .all(|(have, want)| have.at_least_as_loose_as(want))
                    && entry.set.iter().all(|v| spec.bounds_satisfied(v))
            } else {
                entry.bounds == spec.bounds()
            };
            if usable {
                Some(entry.set.as_slice())
            } else {
                None
            }
        })
    }
}

/// Look up a usable relaxation: an entry with the same prefix and permutation
/// suffix whose bounds are componentwise at least as loose and whose vectors
/// all satisfy the queried bounds. Such an entry answers the query exactly.
pub fn relaxation_lookup<'c>(
    cache: &'c RelaxationCache,
    spec: &OipSpec,
) -> Option<&'c [ObjectiveVector]> {
    let sides = vec![Bound::Unbounded; spec.n()];
    cache.lookup(spec, &sides)
}

#[derive(Debug, Clone, Copy)]
struct LevelInfo {
    /// This level's own walk bound on its loop objective.
    bound: Bound,
    attained: Option<Value>,
    certified: bool,
    /// Adopted side bound on the loop objective, frozen when the activation
    /// began; the walk's base solves enforce it, so partners may count on it.
    side_on_obj: Bound,
}

impl LevelInfo {
    fn blank() -> Self {
        LevelInfo {
            bound: Bound::Unbounded,
            attained: None,
            certified: false,
            side_on_obj: Bound::Unbounded,
        }
    }
}

/// One thread's solver state: archive, relaxation cache, optional connection
/// to the sharing board, and counters. The archive only grows during a run.
pub struct RecursionContext<'a> {
    inst: &'a MoipInstance,
    perm: Permutation,
    pub archive: ParetoArchive,
    cache: RelaxationCache,
    hooks: Option<ShareHooks>,
    pub stats: SolveStats,
    tally: IpTally,
    deadline: Option<Instant>,
    /// Per-position loop state (index 0 = position 1).
    levels: Vec<LevelInfo>,
    /// Run-long adopted upper bounds per objective (index 0 = objective 1);
    /// only position-n exchanges may persist here.
    received_global: Vec<Bound>,
    last_published: Vec<Bound>,
}

impl<'a> RecursionContext<'a> {
    pub fn new(
        inst: &'a MoipInstance,
        perm: Permutation,
        tally: IpTally,
        deadline: Option<Instant>,
    ) -> Self {
        assert_eq!(perm.len(), inst.num_objectives());
        let n = inst.num_objectives();
        RecursionContext {
            inst,
            perm,
            archive: ParetoArchive::new(),
            cache: RelaxationCache::new(true),
            hooks: None,
            stats: SolveStats::default(),
            tally,
            deadline,
            levels: vec![LevelInfo::blank(); n],
            received_global: vec![Bound::Unbounded; n],
            last_published: vec![Bound::Unbounded; n],
        }
    }

    pub fn with_cache_enabled(mut self, enabled: bool) -> Self {
        self.cache = RelaxationCache::new(enabled);
        self
    }

    pub fn with_hooks(mut self, hooks: ShareHooks) -> Self {
        self.hooks = Some(hooks);
        self
    }

    pub fn perm(&self) -> &Permutation {
        &self.perm
    }

    pub fn cache(&self) -> &RelaxationCache {
        &self.cache
    }

    /// Exact non-dominated set of `spec` over the context instance. Every
    /// solution found on the way enters the archive with its witness.
    pub fn solve_oip(&mut self, spec: &OipSpec) -> Result<Vec<ObjectiveVector>> {
        assert_eq!(spec.perm(), &self.perm, "spec permutation differs from context");
        let n = spec.n();
        for p in 1..=n {
            self.levels[p - 1] = if p > spec.free_prefix() {
                // Bounds handed in from outside carry no search history, so
                // they are not certified for sharing.
                LevelInfo {
                    bound: spec.bound_at_position(p),
                    attained: None,
                    certified: false,
                    side_on_obj: Bound::Unbounded,
                }
            } else {
                LevelInfo::blank()
            };
        }
        let sides = vec![Bound::Unbounded; n];
        self.solve_rec(spec, &sides)
    }

    /// `sides` carries the per-objective upper bounds adopted from partners
    /// that this subtree enforces. They are frozen for the lifetime of every
    /// activation below: a bound arriving mid-walk could reshape a
    /// subproblem whose earlier bands were already enumerated without it.
    /// New bounds are folded in only at top-level band boundaries, so each
    /// band's whole subtree runs as a plain exact solve of the side-bound-
    /// restricted problem.
    fn solve_rec(&mut self, spec: &OipSpec, sides: &[Bound]) -> Result<Vec<ObjectiveVector>> {
        self.check_deadline()?;
        if let Some(set) = self.cache.lookup(spec, sides) {
            self.stats.cache_hits += 1;
            return Ok(set.to_vec());
        }
        let adoptions_before = self.stats.ahat_in;
        let result = if spec.free_prefix() <= 1 {
            self.solve_base(spec, sides)?
        } else {
            self.solve_loop(spec, sides)?
        };
        // A band skipped on a partner's certificate makes this set a subset
        // of the exact answer.
        let exact = self.stats.ahat_in == adoptions_before;
        self.cache.store(spec, sides, exact, result.clone());
        Ok(result)
    }

    /// Free prefix 0 or 1: one hierarchical lexicographic solve over the full
    /// permuted order, under the spec's finite bounds plus adopted bounds.
    fn solve_base(&mut self, spec: &OipSpec, sides: &[Bound]) -> Result<Vec<ObjectiveVector>> {
        let n = spec.n();
        let order: Vec<usize> = (1..=n).map(|p| self.perm.image(p)).collect();
        let mut side: Vec<SideConstraint> = Vec::new();
        for p in spec.free_prefix() + 1..=n {
            if let Bound::At(b) = spec.bound_at_position(p) {
                side.push(SideConstraint { objective_index: self.perm.image(p), bound: b });
            }
        }
        for (i, bound) in sides.iter().enumerate() {
            if let Bound::At(b) = bound {
                side.push(SideConstraint { objective_index: i + 1, bound: *b });
            }
        }
        match solve_lex(self.inst, &side, &order, &self.tally, self.deadline)? {
            SolverOutcome::Infeasible => Ok(Vec::new()),
            SolverOutcome::Optimal { witness, .. } => {
                let v = evaluate_objectives(self.inst, &witness);
                self.archive.insert(v.clone(), witness);
                Ok(vec![v])
            }
        }
    }

    /// Free prefix `p >= 2`: enumerate bands of the objective at position `p`
    /// from the top down, solving the `(p-1)`-prefix subproblem per band.
    fn solve_loop(&mut self, spec: &OipSpec, sides: &[Bound]) -> Result<Vec<ObjectiveVector>> {
        let p = spec.free_prefix();
        let n = spec.n();
        let obj_p = self.perm.image(p);
        let outer = spec.bounds().to_vec();
        let mut active: Vec<Bound> = sides.to_vec();
        // "All solutions above an infinite bound" holds vacuously, so the
        // fresh activation is certified from the start.
        self.levels[p - 1] = LevelInfo {
            bound: Bound::Unbounded,
            attained: None,
            certified: true,
            side_on_obj: active[obj_p - 1],
        };
        let mut acc: BTreeSet<ObjectiveVector> = BTreeSet::new();
        loop {
            self.check_deadline()?;
            if p == n {
                // Top band boundary: the only place freshly received bounds
                // fold in. Excluding by an upper bound can never promote a
                // vector into the plain-dominance front, and the excluded
                // front vectors are exactly what the senders certified.
                for (slot, incoming) in active.iter_mut().zip(&self.received_global) {
                    *slot = slot.min(*incoming);
                }
                self.levels[p - 1].side_on_obj = active[obj_p - 1];
            }
            self.poll_partners(p);
            self.publish(p - 1);
            let mut child_bounds = vec![self.levels[p - 1].bound];
            child_bounds.extend(outer.iter().copied());
            let child = OipSpec::new(self.perm.clone(), p - 1, child_bounds)
                .expect("child spec bounds match positions");
            let y = self.solve_rec(&child, &active)?;
            if y.is_empty() {
                break;
            }
            let attained = y.iter().map(|v| v.value(obj_p)).max().unwrap();
            acc.extend(y);
            let level = &mut self.levels[p - 1];
            level.attained =
                Some(level.attained.map_or(attained, |a: Value| a.max(attained)));
            // Integer encoding of "strictly below the attained maximum".
            level.bound = level.bound.min(Bound::At(attained - 1));
        }
        self.levels[p - 1] = LevelInfo::blank();
        Ok(acc.into_iter().collect())
    }

    /// Snapshot of this context as partners may see it while it solves a
    /// child with free prefix `free_prefix`. Position `q` advertises the
    /// bound that level `q`'s walk actually enforces on its objective: its
    /// own band bound combined with the side bound frozen at its activation.
    fn public_state(&self, free_prefix: usize) -> ThreadPublicState {
        let n = self.perm.len();
        let levels = (1..=n)
            .map(|q| {
                if q <= free_prefix {
                    LevelState {
                        bound: Bound::Unbounded,
                        attained: None,
                        above_complete: false,
                    }
                } else {
                    let info = self.levels[q - 1];
                    LevelState {
                        bound: info.bound.min(info.side_on_obj),
                        attained: info.attained,
                        above_complete: info.certified,
                    }
                }
            })
            .collect();
        ThreadPublicState { perm: self.perm.clone(), free_prefix, levels }
    }

    fn publish(&mut self, free_prefix: usize) {
        let Some(hooks) = &self.hooks else { return };
        let state = self.public_state(free_prefix);
        for (q, level) in state.levels.iter().enumerate() {
            if level.bound.is_finite()
                && !level.bound.at_least_as_loose_as(&self.last_published[q])
            {
                self.stats.bounds_out += 1;
            }
            self.last_published[q] = level.bound;
        }
        hooks.board.publish(hooks.slot, state);
    }

    /// Adopt partners' published bounds at a loop boundary of level `p`.
    ///
    /// Only last-position exchanges are consumed. Such a bound is a claim
    /// about the whole front: every front vector above it on that objective
    /// is already in some archive. It parks in `received_global` to fold in
    /// at the next top-level band, and when it lands on this thread's own
    /// last objective at the top loop it tightens the walk bound directly.
    ///
    /// Deeper exchanges are published for partners to inspect but are not
    /// consumed as constraints or band jumps. Their certificates quantify
    /// over the solutions of one bounded subproblem; front vectors that only
    /// become visible once lower bands expose them are covered by no such
    /// certificate, yet skipping a band on one can jump the walk past the
    /// very vector whose attained maximum would have steered the walk into
    /// their window. Front-level claims close both holes at once: hiding
    /// does not exist at the top level, and a projected dominator is at
    /// least as good on every coordinate, so whatever hides beneath an
    /// excluded vector violates the same bound and is covered by the same
    /// claim.
    fn poll_partners(&mut self, p: usize) {
        let Some(hooks) = &self.hooks else { return };
        let board = hooks.board.clone();
        let my_slot = hooks.slot;
        let n = self.perm.len();
        let obj_p = self.perm.image(p);
        let mine = self.public_state(p - 1);
        for slot in 0..board.slots() {
            if slot == my_slot {
                continue;
            }
            let theirs = board.snapshot(slot);
            for sb in crate::sharing::shareable_bounds(&mine, &theirs) {
                if sb.j != 0 {
                    continue;
                }
                let incoming = Bound::At(sb.bound);
                let banked = &mut self.received_global[sb.objective - 1];
                if !incoming.at_least_as_loose_as(banked) {
                    *banked = incoming;
                    self.stats.bounds_in += 1;
                }
                if p == n && sb.objective == obj_p {
                    let walk = &mut self.levels[p - 1].bound;
                    if !incoming.at_least_as_loose_as(walk) {
                        *walk = incoming;
                        self.stats.ahat_in += 1;
                    }
                }
            }
        }
    }

    fn check_deadline(&self) -> Result<()> {
        if let Some(d) = self.deadline {
            if Instant::now() >= d {
                return Err(Error::Timeout);
            }
        }
        Ok(())
    }

    pub fn finish(mut self, started: Instant) -> (ParetoArchive, SolveStats) {
        self.stats.ips_solved = self.tally.count();
        self.stats.wall_ms = started.elapsed().as_millis() as u64;
        (self.archive, self.stats)
    }
}

/// Sequential whole-front baseline: identity permutation, relaxation cache
/// on, no sharing.
pub fn run_aira(inst: &MoipInstance) -> Result<ParetoArchive> {
    run_aira_with(inst, &IpTally::new(), None, true).map(|(front, _)| front)
}

pub fn run_aira_with(
    inst: &MoipInstance,
    tally: &IpTally,
    deadline: Option<Instant>,
    cache_enabled: bool,
) -> Result<(ParetoArchive, SolveStats)> {
    let started = Instant::now();
    let perm = Permutation::identity(inst.num_objectives());
    let mut ctx = RecursionContext::new(inst, perm.clone(), tally.child(), deadline)
        .with_cache_enabled(cache_enabled);
    ctx.solve_oip(&OipSpec::unconstrained(perm))?;
    Ok(ctx.finish(started))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instgen::{gen_knapsack, selection_instance, Family, GenSpec};
    use crate::model::{nondominated_filter, ConstraintRow, Relation, VarKind};
    use crate::oiplex::oip_filter;
    use crate::oracle::enumerate_vectors;
    use crate::rng::SeededRng;
    use crate::testutil::{random_perm, random_value_bound};

    fn ov(vals: &[Value]) -> ObjectiveVector {
        ObjectiveVector(vals.to_vec())
    }

    fn ctx_for(inst: &MoipInstance) -> RecursionContext<'_> {
        RecursionContext::new(
            inst,
            Permutation::identity(inst.num_objectives()),
            IpTally::new(),
            None,
        )
    }

    fn appendix_plus_dominated() -> Vec<Vec<Value>> {
        vec![
            vec![50, 24, 44],
            vec![46, 41, 41],
            vec![37, 46, 37],
            vec![37, 44, 42],
            vec![32, 39, 54],
            // Three dominated fillers to reach eight selectable points.
            vec![51, 25, 45],
            vec![46, 44, 42],
            vec![40, 50, 60],
        ]
    }

    #[test]
    fn infeasible_instance_yields_empty_set() {
        let inst = MoipInstance::new(
            vec![vec![1], vec![1]],
            vec![
                ConstraintRow::new(vec![1], Relation::Ge, 1),
                ConstraintRow::new(vec![1], Relation::Le, 0),
            ],
            vec![VarKind::Binary],
        )
        .unwrap();
        let mut ctx = ctx_for(&inst);
        let spec = OipSpec::unconstrained(Permutation::identity(2));
        assert!(ctx.solve_oip(&spec).unwrap().is_empty());
        assert!(ctx.archive.is_empty());
    }

    #[test]
    fn single_point_region_yields_its_vector() {
        // x fixed to 1 by equality; objectives (2x, -3x).
        let inst = MoipInstance::new(
            vec![vec![2], vec![-3]],
            vec![ConstraintRow::new(vec![1], Relation::Eq, 1)],
            vec![VarKind::Binary],
        )
        .unwrap();
        for bounds in [
            vec![Bound::Unbounded],
            vec![Bound::At(-3)],
        ] {
            let mut ctx = ctx_for(&inst);
            let spec = OipSpec::new(Permutation::identity(2), 1, bounds).unwrap();
            assert_eq!(ctx.solve_oip(&spec).unwrap(), vec![ov(&[2, -3])]);
        }
    }

    #[test]
    fn appendix_selection_full_prefix_recovers_front() {
        let inst = selection_instance(&appendix_plus_dominated());
        let mut ctx = ctx_for(&inst);
        let spec = OipSpec::unconstrained(Permutation::identity(3));
        let got = ctx.solve_oip(&spec).unwrap();
        let all: Vec<ObjectiveVector> = appendix_plus_dominated()
            .into_iter()
            .map(ObjectiveVector)
            .collect();
        assert_eq!(got, nondominated_filter(&all));
        assert_eq!(got.len(), 5);
    }

    #[test]
    fn lookup_misses_on_empty_cache() {
        let cache = RelaxationCache::new(true);
        let spec = OipSpec::unconstrained(Permutation::identity(3));
        assert!(relaxation_lookup(&cache, &spec).is_none());
    }

    #[test]
    fn lookup_hits_identical_spec() {
        let mut cache = RelaxationCache::new(true);
        let spec = OipSpec::new(
            Permutation::identity(3),
            2,
            vec![Bound::At(52)],
        )
        .unwrap();
        let no_sides = vec![Bound::Unbounded; 3];
        cache.store(&spec, &no_sides, true, vec![ov(&[1, 2, 3])]);
        assert_eq!(relaxation_lookup(&cache, &spec).unwrap(), &[ov(&[1, 2, 3])]);
    }

    #[test]
    fn lookup_rejects_violating_vector() {
        let mut cache = RelaxationCache::new(true);
        let loose = OipSpec::new(Permutation::identity(3), 2, vec![Bound::Unbounded]).unwrap();
        let no_sides = vec![Bound::Unbounded; 3];
        cache.store(
            &loose,
            &no_sides,
            true,
            vec![ov(&[50, 24, 44]), ov(&[46, 41, 41]), ov(&[37, 44, 42])],
        );
        let tight_43 = OipSpec::new(Permutation::identity(3), 2, vec![Bound::At(43)]).unwrap();
        assert!(relaxation_lookup(&cache, &tight_43).is_none());
        let tight_44 = OipSpec::new(Permutation::identity(3), 2, vec![Bound::At(44)]).unwrap();
        assert!(relaxation_lookup(&cache, &tight_44).is_some());
    }

    #[test]
    fn lookup_requires_matching_side_bounds() {
        let mut cache = RelaxationCache::new(true);
        let spec = OipSpec::new(Permutation::identity(2), 1, vec![Bound::At(9)]).unwrap();
        let foreign = vec![Bound::At(3), Bound::Unbounded];
        cache.store(&spec, &foreign, true, vec![ov(&[1, 2])]);
        // The public lookup assumes no adopted bounds, so a set computed
        // under foreign bounds must not answer it.
        assert!(relaxation_lookup(&cache, &spec).is_none());
        assert_eq!(cache.lookup(&spec, &foreign).unwrap(), &[ov(&[1, 2])]);
    }

    #[test]
    fn aira_on_single_point() {
        let inst = MoipInstance::new(
            vec![vec![1], vec![1]],
            vec![ConstraintRow::new(vec![1], Relation::Eq, 1)],
            vec![VarKind::Binary],
        )
        .unwrap();
        let front = run_aira(&inst).unwrap();
        assert_eq!(front.sorted_vectors(), vec![ov(&[1, 1])]);
    }

    #[test]
    fn aira_matches_brute_force_on_knapsack() {
        let inst = gen_knapsack(&GenSpec {
            family: Family::Knapsack,
            size: 10,
            num_objectives: 3,
            seed: 11,
        });
        let tally = IpTally::new();
        let (front, stats) = run_aira_with(&inst, &tally, None, true).unwrap();
        let oracle = nondominated_filter(&enumerate_vectors(&inst).unwrap());
        assert_eq!(front.sorted_vectors(), oracle);
        assert!(stats.ips_solved >= front.len() as u64);
        assert_eq!(stats.ips_solved, tally.count());
    }

    #[test]
    fn cache_transparency() {
        let inst = gen_knapsack(&GenSpec {
            family: Family::Knapsack,
            size: 9,
            num_objectives: 3,
            seed: 2,
        });
        let (with_cache, s1) = run_aira_with(&inst, &IpTally::new(), None, true).unwrap();
        let (without, s2) = run_aira_with(&inst, &IpTally::new(), None, false).unwrap();
        assert_eq!(with_cache.sorted_vectors(), without.sorted_vectors());
        assert_eq!(s2.cache_hits, 0);
        assert!(s1.ips_solved <= s2.ips_solved);
    }

    #[test]
    fn reference_equivalence_on_random_selection_instances() {
        let mut rng = SeededRng::new(2024);
        for _ in 0..120 {
            let n = rng.uniform(2, 4) as usize;
            let count = rng.uniform(1, 8) as usize;
            let vectors: Vec<Vec<Value>> = (0..count)
                .map(|_| (0..n).map(|_| rng.uniform(0, 9)).collect())
                .collect();
            let inst = selection_instance(&vectors);
            let enumerated: Vec<ObjectiveVector> =
                vectors.iter().cloned().map(ObjectiveVector).collect();

            let perm = random_perm(&mut rng, n);
            let k = rng.uniform(0, n as i64) as usize;
            let bounds: Vec<Bound> = (0..n - k)
                .map(|_| random_value_bound(&mut rng, 0, 9))
                .collect();
            let spec = OipSpec::new(perm.clone(), k, bounds).unwrap();

            let mut ctx = RecursionContext::new(&inst, perm, IpTally::new(), None);
            let got = ctx.solve_oip(&spec).unwrap();
            let want = oip_filter(&enumerated, &spec);
            assert_eq!(got, want, "spec {spec} over {vectors:?}");
        }
    }

    #[test]
    fn reference_equivalence_on_small_knapsacks() {
        let mut rng = SeededRng::new(5150);
        for seed in 0..25 {
            let n = if seed % 2 == 0 { 3 } else { 4 };
            let inst = gen_knapsack(&GenSpec {
                family: Family::Knapsack,
                size: 7,
                num_objectives: n,
                seed,
            });
            let enumerated = enumerate_vectors(&inst).unwrap();
            let perm = random_perm(&mut rng, n);
            let k = rng.uniform(1, n as i64) as usize;
            // Knapsack objectives are negated profits; bounds live in the
            // attainable (negative) range.
            let bounds: Vec<Bound> = (0..n - k)
                .map(|_| random_value_bound(&mut rng, -450, -50))
                .collect();
            let spec = OipSpec::new(perm.clone(), k, bounds).unwrap();
            let mut ctx = RecursionContext::new(&inst, perm, IpTally::new(), None);
            let got = ctx.solve_oip(&spec).unwrap();
            assert_eq!(got, oip_filter(&enumerated, &spec), "spec {spec} seed {seed}");
        }
    }

    #[test]
    fn archive_only_grows_to_front_members() {
        let inst = gen_knapsack(&GenSpec {
            family: Family::Knapsack,
            size: 8,
            num_objectives: 3,
            seed: 4,
        });
        let front = run_aira(&inst).unwrap();
        let oracle = nondominated_filter(&enumerate_vectors(&inst).unwrap());
        for v in front.vectors() {
            assert!(oracle.contains(v));
        }
        assert_eq!(front.len(), oracle.len());
    }
}
