//! Guarded brute-force enumeration of the feasible objective space, used as
//! the ground truth at desk scale.
//!
//! The enumerator walks variable fixings depth-first, pruning any prefix
//! whose constraint intervals can no longer be satisfied, and collects every
//! distinct feasible objective vector. It shares the interval machinery with
//! the exact solver but follows no bound logic, so the two routes stay
//! independent where it matters: the oracle never consults objectives while
//! searching.

use std::collections::BTreeSet;

use crate::ipsolve::RowChecker;
use crate::model::{nondominated_filter, MoipInstance, ObjectiveVector, Value, VarKind};
use crate::{Error, Result};

const GUARD_BITS: u32 = 24;

/// Refuse instances whose raw assignment space is too large to walk: more
/// than 24 binary variables, or bounded-integer domains multiplying out past
/// `2^24`.
pub fn guard_check(inst: &MoipInstance) -> Result<()> {
    let binaries = inst
        .var_kinds()
        .iter()
        .filter(|k| matches!(k, VarKind::Binary))
        .count();
    if binaries > GUARD_BITS as usize {
        return Err(Error::OracleGuard(format!(
            "{binaries} binary variables exceed {GUARD_BITS}"
        )));
    }
    let mut product: u128 = 1;
    for kind in inst.var_kinds() {
        if let VarKind::Integer { lb, ub } = kind {
            product = product.saturating_mul((ub - lb + 1) as u128);
            if product > 1u128 << GUARD_BITS {
                return Err(Error::OracleGuard(format!(
                    "integer domain product exceeds 2^{GUARD_BITS}"
                )));
            }
        }
    }
    Ok(())
}

/// All distinct feasible objective vectors, sorted ascending.
pub fn enumerate_vectors(inst: &MoipInstance) -> Result<Vec<ObjectiveVector>> {
    guard_check(inst)?;
    let kinds = inst.var_kinds();
    let mut rows = RowChecker::new(inst.constraint_rows(), kinds);
    let mut assignment: Vec<Value> = vec![0; kinds.len()];
    let mut seen: BTreeSet<ObjectiveVector> = BTreeSet::new();
    walk(inst, kinds, &mut rows, &mut assignment, 0, &mut seen);
    Ok(seen.into_iter().collect())
}

fn walk(
    inst: &MoipInstance,
    kinds: &[VarKind],
    rows: &mut RowChecker,
    assignment: &mut Vec<Value>,
    depth: usize,
    seen: &mut BTreeSet<ObjectiveVector>,
) {
    if !rows.feasible_at(depth) {
        return;
    }
    if depth == kinds.len() {
        let values = inst
            .objectives()
            .iter()
            .map(|row| row.iter().zip(assignment.iter()).map(|(c, x)| c * x).sum())
            .collect();
        seen.insert(ObjectiveVector(values));
        return;
    }
    let kind = kinds[depth];
    for v in kind.lb()..=kind.ub() {
        assignment[depth] = v;
        rows.push(depth, v);
        walk(inst, kinds, rows, assignment, depth + 1, seen);
        rows.pop(depth, v);
    }
    assignment[depth] = 0;
}

/// The exact front by enumeration: all feasible vectors, filtered.
pub fn enumerate_front(inst: &MoipInstance) -> Result<Vec<ObjectiveVector>> {
    Ok(nondominated_filter(&enumerate_vectors(inst)?))
}
