//! Exact single-objective and hierarchical lexicographic integer solves.
//!
//! The backend is a depth-first branch and bound over variable fixings with a
//! coefficient-sign bound: at each node the objective is bounded below by the
//! fixed prefix's contribution plus the best-case contribution of every
//! unfixed variable. Constraint rows prune through interval arithmetic on the
//! same suffix tables. All variables are bounded, so every solve terminates
//! with a proven optimum or infeasibility.
//!
//! One invocation of [`solve_min`], and each stage of [`solve_lex`], counts
//! as one IP solve on the shared tally.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use std::time::Instant;

use crate::model::{
    evaluate_objectives, ConstraintRow, FeasibleWitness, MoipInstance, Relation, Value,
};
use crate::{Error, Result};

/// Upper bound `f_(objective_index) <= bound` imposed on a solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SideConstraint {
    /// Objective row the bound applies to (1-based).
    pub objective_index: usize,
    pub bound: Value,
}

/// Result of an exact solve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolverOutcome {
    Optimal { value: Value, witness: FeasibleWitness },
    Infeasible,
}

/// Shared, atomically incremented count of single-objective IP solves.
///
/// A tally may be split into children: each child keeps its own count (one
/// per worker thread) while forwarding every increment up to the shared run
/// total. Counts never decrease.
#[derive(Debug, Clone, Default)]
pub struct IpTally {
    count: Arc<AtomicU64>,
    parent: Option<Arc<IpTally>>,
}

impl IpTally {
    pub fn new() -> Self {
        IpTally::default()
    }

    /// A fresh counter that also feeds this one.
    pub fn child(&self) -> IpTally {
        IpTally {
            count: Arc::new(AtomicU64::new(0)),
            parent: Some(Arc::new(self.clone())),
        }
    }

    pub fn bump(&self) {
        self.count.fetch_add(1, Ordering::Relaxed);
        if let Some(parent) = &self.parent {
            parent.bump();
        }
    }

    pub fn count(&self) -> u64 {
        self.count.load(Ordering::Relaxed)
    }
}

/// Minimize objective `obj_index` (1-based) subject to the instance rows,
/// variable bounds, and `side`. Exactly one IP solve on the tally.
pub fn solve_min(
    inst: &MoipInstance,
    side: &[SideConstraint],
    obj_index: usize,
    tally: &IpTally,
    deadline: Option<Instant>,
) -> Result<SolverOutcome> {
    let extra = side_rows(inst, side);
    branch_and_bound(inst, &extra, obj_index, tally, deadline)
}

/// Hierarchical lexicographic solve: minimize `order[0]`, fix its value with
/// an equality row, minimize `order[1]`, and so on. Each stage is one IP
/// solve. Returns the final witness together with the value of `order[0]`.
pub fn solve_lex(
    inst: &MoipInstance,
    side: &[SideConstraint],
    order: &[usize],
    tally: &IpTally,
    deadline: Option<Instant>,
) -> Result<SolverOutcome> {
    assert!(!order.is_empty(), "lexicographic order must be nonempty");
    {
        let mut seen = vec![false; inst.num_objectives() + 1];
        for &i in order {
            assert!(
                (1..=inst.num_objectives()).contains(&i) && !seen[i],
                "lexicographic order must use distinct valid objective indices"
            );
            seen[i] = true;
        }
    }
    let mut extra = side_rows(inst, side);
    let mut first_value = None;
    let mut witness = None;
    for &obj in order {
        match branch_and_bound(inst, &extra, obj, tally, deadline)? {
            SolverOutcome::Infeasible => return Ok(SolverOutcome::Infeasible),
            SolverOutcome::Optimal { value, witness: w } => {
                extra.push(ConstraintRow::new(
                    inst.objective(obj).to_vec(),
                    Relation::Eq,
                    value,
                ));
                first_value.get_or_insert(value);
                witness = Some(w);
            }
        }
    }
    Ok(SolverOutcome::Optimal {
        value: first_value.unwrap(),
        witness: witness.unwrap(),
    })
}

/// Check an optimal claim: the witness must respect variable bounds, satisfy
/// every instance row and side constraint, and attain the reported value
/// exactly. Adapters returning [`SolverOutcome`]s must pass this.
pub fn verify_witness(
    inst: &MoipInstance,
    side: &[SideConstraint],
    obj_index: usize,
    outcome: &SolverOutcome,
) -> Result<()> {
    let SolverOutcome::Optimal { value, witness } = outcome else {
        return Ok(());
    };
    if witness.0.len() != inst.num_vars() {
        return Err(Error::Invalid(format!(
            "witness has {} entries, expected {}",
            witness.0.len(),
            inst.num_vars()
        )));
    }
    for (j, (kind, &x)) in inst.var_kinds().iter().zip(&witness.0).enumerate() {
        if !kind.contains(x) {
            return Err(Error::Invalid(format!("variable x{} = {} out of bounds", j + 1, x)));
        }
    }
    for (i, row) in inst.constraint_rows().iter().enumerate() {
        if !row.satisfied_by(&witness.0) {
            return Err(Error::Invalid(format!("constraint row {} violated", i + 1)));
        }
    }
    let objective_values = evaluate_objectives(inst, witness);
    for sc in side {
        if objective_values.value(sc.objective_index) > sc.bound {
            return Err(Error::Invalid(format!(
                "side constraint f_{} <= {} violated",
                sc.objective_index, sc.bound
            )));
        }
    }
    if objective_values.value(obj_index) != *value {
        return Err(Error::Invalid(format!(
            "reported value {} but witness attains {}",
            value,
            objective_values.value(obj_index)
        )));
    }
    Ok(())
}

/// Emit the subproblem in LP text format with deterministic variable names
/// `x1..xc`. Side constraints appear as rows `s1..`.
pub fn export_lp(inst: &MoipInstance, side: &[SideConstraint], obj_index: usize) -> String {
    let mut out = String::new();
    out.push_str("\\ exact integer subproblem\n");
    out.push_str("Minimize\n obj:");
    push_terms(&mut out, inst.objective(obj_index));
    out.push('\n');
    out.push_str("Subject To\n");
    for (i, row) in inst.constraint_rows().iter().enumerate() {
        out.push_str(&format!(" c{}:", i + 1));
        push_terms(&mut out, &row.coeffs);
        out.push_str(&format!(" {} {}\n", rel_str(row.relation), row.rhs));
    }
    for (i, sc) in side.iter().enumerate() {
        out.push_str(&format!(" s{}:", i + 1));
        push_terms(&mut out, inst.objective(sc.objective_index));
        out.push_str(&format!(" <= {}\n", sc.bound));
    }
    let integers: Vec<usize> = inst
        .var_kinds()
        .iter()
        .enumerate()
        .filter(|(_, k)| matches!(k, crate::model::VarKind::Integer { .. }))
        .map(|(j, _)| j)
        .collect();
    if !integers.is_empty() {
        out.push_str("Bounds\n");
        for &j in &integers {
            let kind = inst.var_kinds()[j];
            out.push_str(&format!(" {} <= x{} <= {}\n", kind.lb(), j + 1, kind.ub()));
        }
    }
    let binaries: Vec<usize> = inst
        .var_kinds()
        .iter()
        .enumerate()
        .filter(|(_, k)| matches!(k, crate::model::VarKind::Binary))
        .map(|(j, _)| j)
        .collect();
    if !binaries.is_empty() {
        out.push_str("Binary\n");
        for &j in &binaries {
            out.push_str(&format!(" x{}\n", j + 1));
        }
    }
    if !integers.is_empty() {
        out.push_str("General\n");
        for &j in &integers {
            out.push_str(&format!(" x{}\n", j + 1));
        }
    }
    out.push_str("End\n");
    out
}

fn rel_str(rel: Relation) -> &'static str {
    match rel {
        Relation::Le => "<=",
        Relation::Eq => "=",
        Relation::Ge => ">=",
    }
}

fn push_terms(out: &mut String, coeffs: &[Value]) {
    let mut any = false;
    for (j, &c) in coeffs.iter().enumerate() {
        if c == 0 {
            continue;
        }
        if !any {
            if c < 0 {
                out.push_str(&format!(" - {} x{}", -c, j + 1));
            } else {
                out.push_str(&format!(" {} x{}", c, j + 1));
            }
        } else if c < 0 {
            out.push_str(&format!(" - {} x{}", -c, j + 1));
        } else {
            out.push_str(&format!(" + {} x{}", c, j + 1));
        }
        any = true;
    }
    if !any {
        out.push_str(" 0 x1");
    }
}

fn side_rows(inst: &MoipInstance, side: &[SideConstraint]) -> Vec<ConstraintRow> {
    side.iter()
        .map(|sc| ConstraintRow::new(inst.objective(sc.objective_index).to_vec(), Relation::Le, sc.bound))
        .collect()
}

/// Interval pruning over a set of rows: tracks running partial sums and
/// precomputed best/worst suffix contributions per depth.
pub(crate) struct RowChecker {
    relations: Vec<Relation>,
    rhs: Vec<Value>,
    coeffs: Vec<Vec<Value>>,
    min_suffix: Vec<Vec<Value>>,
    max_suffix: Vec<Vec<Value>>,
    partial: Vec<Value>,
}

impl RowChecker {
    pub(crate) fn new(rows: &[ConstraintRow], kinds: &[crate::model::VarKind]) -> Self {
        let c = kinds.len();
        let mut min_suffix = Vec::with_capacity(rows.len());
        let mut max_suffix = Vec::with_capacity(rows.len());
        for row in rows {
            let mut mins = vec![0; c + 1];
            let mut maxs = vec![0; c + 1];
            for j in (0..c).rev() {
                let a = row.coeffs[j] * kinds[j].lb();
                let b = row.coeffs[j] * kinds[j].ub();
                mins[j] = mins[j + 1] + a.min(b);
                maxs[j] = maxs[j + 1] + a.max(b);
            }
            min_suffix.push(mins);
            max_suffix.push(maxs);
        }
        RowChecker {
            relations: rows.iter().map(|r| r.relation).collect(),
            rhs: rows.iter().map(|r| r.rhs).collect(),
            coeffs: rows.iter().map(|r| r.coeffs.clone()).collect(),
            min_suffix,
            max_suffix,
            partial: vec![0; rows.len()],
        }
    }

    /// Account for fixing variable `depth` to `value`.
    pub(crate) fn push(&mut self, depth: usize, value: Value) {
        for (r, p) in self.partial.iter_mut().enumerate() {
            *p += self.coeffs[r][depth] * value;
        }
    }

    pub(crate) fn pop(&mut self, depth: usize, value: Value) {
        for (r, p) in self.partial.iter_mut().enumerate() {
            *p -= self.coeffs[r][depth] * value;
        }
    }

    /// Whether some completion of the remaining variables `depth..` can still
    /// satisfy every row.
    pub(crate) fn feasible_at(&self, depth: usize) -> bool {
        for r in 0..self.partial.len() {
            let lo = self.partial[r] + self.min_suffix[r][depth];
            let hi = self.partial[r] + self.max_suffix[r][depth];
            let ok = match self.relations[r] {
                Relation::Le => lo <= self.rhs[r],
                Relation::Ge => hi >= self.rhs[r],
                Relation::Eq => lo <= self.rhs[r] && hi >= self.rhs[r],
            };
            if !ok {
                return false;
            }
        }
        true
    }
}

const DEADLINE_STRIDE: u64 = 4096;

struct Dfs<'a> {
    objective: &'a [Value],
    kinds: &'a [crate::model::VarKind],
    obj_min_suffix: Vec<Value>,
    rows: RowChecker,
    assignment: Vec<Value>,
    obj_partial: Value,
    incumbent: Option<(Value, Vec<Value>)>,
    nodes: u64,
    deadline: Option<Instant>,
}

impl Dfs<'_> {
    fn run(&mut self, depth: usize) -> Result<()> {
        self.nodes += 1;
        if self.nodes.is_multiple_of(DEADLINE_STRIDE) {
            if let Some(d) = self.deadline {
                if Instant::now() >= d {
                    return Err(Error::Timeout);
                }
            }
        }
        if !self.rows.feasible_at(depth) {
            return Ok(());
        }
        if let Some((best, _)) = &self.incumbent {
            if self.obj_partial + self.obj_min_suffix[depth] >= *best {
                return Ok(());
            }
        }
        if depth == self.kinds.len() {
            // Interval checks are exact at full depth, so this leaf is
            // feasible and improves on the incumbent.
            self.incumbent = Some((self.obj_partial, self.assignment.clone()));
            return Ok(());
        }
        let kind = self.kinds[depth];
        for v in kind.lb()..=kind.ub() {
            self.assignment[depth] = v;
            self.obj_partial += self.objective[depth] * v;
            self.rows.push(depth, v);
            let r = self.run(depth + 1);
            self.rows.pop(depth, v);
            self.obj_partial -= self.objective[depth] * v;
            r?;
        }
        Ok(())
    }
}

fn branch_and_bound(
    inst: &MoipInstance,
    extra_rows: &[ConstraintRow],
    obj_index: usize,
    tally: &IpTally,
    deadline: Option<Instant>,
) -> Result<SolverOutcome> {
    tally.bump();
    if let Some(d) = deadline {
        if Instant::now() >= d {
            return Err(Error::Timeout);
        }
    }
    let kinds = inst.var_kinds();
    let c = kinds.len();
    let objective = inst.objective(obj_index);
    let mut obj_min_suffix = vec![0; c + 1];
    for j in (0..c).rev() {
        let a = objective[j] * kinds[j].lb();
        let b = objective[j] * kinds[j].ub();
        obj_min_suffix[j] = obj_min_suffix[j + 1] + a.min(b);
    }
    let mut all_rows: Vec<ConstraintRow> = inst.constraint_rows().to_vec();
    all_rows.extend_from_slice(extra_rows);
    let mut dfs = Dfs {
        objective,
        kinds,
        obj_min_suffix,
        rows: RowChecker::new(&all_rows, kinds),
        assignment: vec![0; c],
        obj_partial: 0,
        incumbent: None,
        nodes: 0,
        deadline,
    };
    dfs.run(0)?;
    Ok(match dfs.incumbent {
        Some((value, assignment)) => SolverOutcome::Optimal {
            value,
            witness: FeasibleWitness(assignment),
        },
        None => SolverOutcome::Infeasible,
    })
}
