//! Core problem representation: instances, objective vectors, dominance, and
//! non-dominated archives.
//!
//! All arithmetic on objective values is exact `i64` integer arithmetic.
//! Every objective is minimized; generators that model maximization negate
//! their coefficients.

use std::fmt;

use crate::Error;

/// Objective and constraint coefficients, variable values, bounds.
pub type Value = i64;

/// Relation of a constraint row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Le => "LE",
            Relation::Eq => "EQ",
            Relation::Ge => "GE",
        })
    }
}

/// One linear constraint row: `coeffs . x  <relation>  rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintRow {
    pub coeffs: Vec<Value>,
    pub relation: Relation,
    pub rhs: Value,
}

impl ConstraintRow {
    pub fn new(coeffs: Vec<Value>, relation: Relation, rhs: Value) -> Self {
        ConstraintRow { coeffs, relation, rhs }
    }

    /// Whether `assignment` satisfies this row.
    pub fn satisfied_by(&self, assignment: &[Value]) -> bool {
        let lhs: Value = self
            .coeffs
            .iter()
            .zip(assignment)
            .map(|(c, x)| c * x)
            .sum();
        match self.relation {
            Relation::Le => lhs <= self.rhs,
            Relation::Eq => lhs == self.rhs,
            Relation::Ge => lhs >= self.rhs,
        }
    }
}

/// Kind of a decision variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Binary,
    /// Bounded integer with inclusive bounds `lb <= x <= ub`.
    Integer { lb: Value, ub: Value },
}

impl VarKind {
    pub fn lb(&self) -> Value {
        match self {
            VarKind::Binary => 0,
            VarKind::Integer { lb, .. } => *lb,
        }
    }

    pub fn ub(&self) -> Value {
        match self {
            VarKind::Binary => 1,
            VarKind::Integer { ub, .. } => *ub,
        }
    }

    pub fn contains(&self, v: Value) -> bool {
        self.lb() <= v && v <= self.ub()
    }
}

/// A multi-objective integer program: minimize `n` linear objectives over the
/// integer points of `A x <= C` (with equality and `>=` rows permitted)
/// intersected with the variable boxes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MoipInstance {
    num_objectives: usize,
    num_vars: usize,
    objectives: Vec<Vec<Value>>,
    constraint_rows: Vec<ConstraintRow>,
    var_kinds: Vec<VarKind>,
}

impl MoipInstance {
    pub fn new(
        objectives: Vec<Vec<Value>>,
        constraint_rows: Vec<ConstraintRow>,
        var_kinds: Vec<VarKind>,
    ) -> Result<Self, Error> {
        let num_objectives = objectives.len();
        let num_vars = var_kinds.len();
        if num_objectives == 0 {
            return Err(Error::Invalid("instance needs at least one objective".into()));
        }
        if num_vars == 0 {
            return Err(Error::Invalid("instance needs at least one variable".into()));
        }
        for (i, row) in objectives.iter().enumerate() {
            if row.len() != num_vars {
                return Err(Error::Invalid(format!(
                    "objective {} has {} coefficients, expected {}",
                    i + 1,
                    row.len(),
                    num_vars
                )));
            }
        }
        for (i, row) in constraint_rows.iter().enumerate() {
            if row.coeffs.len() != num_vars {
                return Err(Error::Invalid(format!(
                    "constraint row {} has {} coefficients, expected {}",
                    i + 1,
                    row.coeffs.len(),
                    num_vars
                )));
            }
        }
        for (j, kind) in var_kinds.iter().enumerate() {
            if let VarKind::Integer { lb, ub } = kind {
                if lb > ub {
                    return Err(Error::Invalid(format!(
                        "variable {} has empty bounds {}..{}",
                        j + 1,
                        lb,
                        ub
                    )));
                }
            }
        }
        Ok(MoipInstance {
            num_objectives,
            num_vars,
            objectives,
            constraint_rows,
            var_kinds,
        })
    }

    pub fn num_objectives(&self) -> usize {
        self.num_objectives
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    /// Coefficients of objective `i` (1-based).
    pub fn objective(&self, i: usize) -> &[Value] {
        assert!(
            (1..=self.num_objectives).contains(&i),
            "objective index {i} out of 1..={}",
            self.num_objectives
        );
        &self.objectives[i - 1]
    }

    pub fn objectives(&self) -> &[Vec<Value>] {
        &self.objectives
    }

    pub fn constraint_rows(&self) -> &[ConstraintRow] {
        &self.constraint_rows
    }

    pub fn var_kinds(&self) -> &[VarKind] {
        &self.var_kinds
    }

    /// Same feasible region, keeping only the first `m` objectives.
    pub fn restrict_objectives(&self, m: usize) -> MoipInstance {
        assert!((1..=self.num_objectives).contains(&m));
        MoipInstance {
            num_objectives: m,
            num_vars: self.num_vars,
            objectives: self.objectives[..m].to_vec(),
            constraint_rows: self.constraint_rows.clone(),
            var_kinds: self.var_kinds.clone(),
        }
    }

    /// Same objectives, with extra constraint rows appended.
    pub fn with_extra_rows(&self, extra: Vec<ConstraintRow>) -> MoipInstance {
        let mut rows = self.constraint_rows.clone();
        rows.extend(extra);
        MoipInstance {
            constraint_rows: rows,
            ..self.clone()
        }
    }
}

/// The image of a feasible solution under the objectives: `n` integers.
///
/// `Ord` is lexicographic on the values, which doubles as the canonical
/// order used by front files.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ObjectiveVector(pub Vec<Value>);

impl ObjectiveVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[Value] {
        &self.0
    }

    /// Value of objective `i` (1-based).
    pub fn value(&self, i: usize) -> Value {
        self.0[i - 1]
    }
}

impl fmt::Display for ObjectiveVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

impl From<Vec<Value>> for ObjectiveVector {
    fn from(values: Vec<Value>) -> Self {
        ObjectiveVector(values)
    }
}

/// A feasible variable assignment, one value per variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeasibleWitness(pub Vec<Value>);

impl FeasibleWitness {
    pub fn values(&self) -> &[Value] {
        &self.0
    }
}

/// Evaluate all objectives of `inst` at `w` with exact integer arithmetic.
///
/// Panics on a dimension mismatch.
pub fn evaluate_objectives(inst: &MoipInstance, w: &FeasibleWitness) -> ObjectiveVector {
    assert_eq!(
        w.0.len(),
        inst.num_vars(),
        "witness has {} entries, instance has {} variables",
        w.0.len(),
        inst.num_vars()
    );
    ObjectiveVector(
        inst.objectives()
            .iter()
            .map(|row| row.iter().zip(&w.0).map(|(c, x)| c * x).sum())
            .collect(),
    )
}

/// Whether `w` satisfies every constraint row and variable bound of `inst`.
pub fn is_feasible(inst: &MoipInstance, w: &FeasibleWitness) -> bool {
    w.0.len() == inst.num_vars()
        && inst
            .var_kinds()
            .iter()
            .zip(&w.0)
            .all(|(kind, &x)| kind.contains(x))
        && inst.constraint_rows().iter().all(|row| row.satisfied_by(&w.0))
}

/// Componentwise dominance: `z` dominates `y` iff `z <= y` in every component
/// and `z < y` in at least one.
///
/// Panics on a length mismatch.
pub fn dominates(z: &ObjectiveVector, y: &ObjectiveVector) -> bool {
    assert_eq!(z.len(), y.len(), "dominance over unequal lengths");
    let mut strict = false;
    for (a, b) in z.0.iter().zip(&y.0) {
        if a > b {
            return false;
        }
        if a < b {
            strict = true;
        }
    }
    strict
}

/// All vectors of `vs` not dominated by any other element, deduplicated, in
/// canonical (lexicographic ascending) order.
///
/// Plain pairwise scan; accelerated structures must match this behavior.
pub fn nondominated_filter(vs: &[ObjectiveVector]) -> Vec<ObjectiveVector> {
    let mut unique: Vec<ObjectiveVector> = vs.to_vec();
    unique.sort();
    unique.dedup();
    let kept: Vec<ObjectiveVector> = unique
        .iter()
        .filter(|v| !unique.iter().any(|u| dominates(u, v)))
        .cloned()
        .collect();
    kept
}

/// Outcome of [`ParetoArchive::insert`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ArchiveInsert {
    /// Vector admitted; lists the vectors it displaced.
    Inserted { removed: Vec<ObjectiveVector> },
    /// An entry with an identical vector already exists; its witness is kept.
    Duplicate,
    /// Dominated by an existing entry; archive unchanged.
    Rejected,
}

/// A set of mutually non-dominated objective vectors, each with one witness.
///
/// Not safe for simultaneous mutation from several threads; confine to one
/// thread at a time and hand whole archives across at join points.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParetoArchive {
    entries: Vec<(ObjectiveVector, FeasibleWitness)>,
}

impl ParetoArchive {
    pub fn new() -> Self {
        ParetoArchive { entries: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(ObjectiveVector, FeasibleWitness)> {
        self.entries.iter()
    }

    pub fn vectors(&self) -> impl Iterator<Item = &ObjectiveVector> {
        self.entries.iter().map(|(v, _)| v)
    }

    pub fn contains_vector(&self, v: &ObjectiveVector) -> bool {
        self.entries.iter().any(|(u, _)| u == v)
    }

    /// Vectors in canonical lexicographic ascending order.
    pub fn sorted_vectors(&self) -> Vec<ObjectiveVector> {
        let mut vs: Vec<ObjectiveVector> = self.vectors().cloned().collect();
        vs.sort();
        vs
    }

    /// Insert `(v, w)`. Dominated vectors are rejected; an identical vector
    /// keeps the witness already present; otherwise `v` enters and every
    /// entry it dominates is removed.
    pub fn insert(&mut self, v: ObjectiveVector, w: FeasibleWitness) -> ArchiveInsert {
        if self.entries.iter().any(|(u, _)| u == &v) {
            return ArchiveInsert::Duplicate;
        }
        if self.entries.iter().any(|(u, _)| dominates(u, &v)) {
            return ArchiveInsert::Rejected;
        }
        let mut removed = Vec::new();
        self.entries.retain(|(u, _)| {
            if dominates(&v, u) {
                removed.push(u.clone());
                false
            } else {
                true
            }
        });
        self.entries.push((v, w));
        ArchiveInsert::Inserted { removed }
    }

    /// Insert every entry of `other` (first-seen witness wins on ties).
    pub fn absorb(&mut self, other: ParetoArchive) {
        for (v, w) in other.entries {
            self.insert(v, w);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ov(vals: &[Value]) -> ObjectiveVector {
        ObjectiveVector(vals.to_vec())
    }

    fn wit(vals: &[Value]) -> FeasibleWitness {
        FeasibleWitness(vals.to_vec())
    }

    /// Independent evaluator iterating coefficients in reverse index order.
    fn evaluate_reversed(inst: &MoipInstance, w: &FeasibleWitness) -> ObjectiveVector {
        ObjectiveVector(
            inst.objectives()
                .iter()
                .map(|row| {
                    let mut total = 0;
                    for j in (0..row.len()).rev() {
                        total += row[j] * w.0[j];
                    }
                    total
                })
                .collect(),
        )
    }

    fn appendix_vectors() -> Vec<ObjectiveVector> {
        vec![
            ov(&[50, 24, 44]),
            ov(&[46, 41, 41]),
            ov(&[37, 46, 37]),
            ov(&[37, 44, 42]),
            ov(&[32, 39, 54]),
        ]
    }

    #[test]
    fn evaluate_zero_assignment() {
        let inst = MoipInstance::new(
            vec![vec![3, -4], vec![5, 6]],
            vec![],
            vec![VarKind::Binary, VarKind::Binary],
        )
        .unwrap();
        assert_eq!(evaluate_objectives(&inst, &wit(&[0, 0])), ov(&[0, 0]));
    }

    #[test]
    fn evaluate_identity_coefficients() {
        let inst = MoipInstance::new(
            vec![vec![1, 0], vec![0, 1]],
            vec![],
            vec![
                VarKind::Integer { lb: 0, ub: 10 },
                VarKind::Integer { lb: 0, ub: 10 },
            ],
        )
        .unwrap();
        assert_eq!(evaluate_objectives(&inst, &wit(&[3, 5])), ov(&[3, 5]));
    }

    #[test]
    fn evaluate_matches_reverse_order_evaluator() {
        let inst = crate::instgen::gen_knapsack(&crate::instgen::GenSpec {
            family: crate::instgen::Family::Knapsack,
            size: 3,
            num_objectives: 3,
            seed: 7,
        });
        for bits in 0..8u32 {
            let w = wit(&[
                (bits & 1) as Value,
                ((bits >> 1) & 1) as Value,
                ((bits >> 2) & 1) as Value,
            ]);
            assert_eq!(evaluate_objectives(&inst, &w), evaluate_reversed(&inst, &w));
        }
    }

    #[test]
    #[should_panic(expected = "witness has")]
    fn evaluate_rejects_dimension_mismatch() {
        let inst = MoipInstance::new(vec![vec![1]], vec![], vec![VarKind::Binary]).unwrap();
        evaluate_objectives(&inst, &wit(&[1, 2]));
    }

    #[test]
    fn dominates_requires_a_strict_component() {
        assert!(!dominates(&ov(&[1, 2, 3]), &ov(&[1, 2, 3])));
    }

    #[test]
    fn dominates_fails_on_any_worse_component() {
        // 44 < 46 but 42 > 37, so no dominance in either direction.
        assert!(!dominates(&ov(&[37, 44, 42]), &ov(&[37, 46, 37])));
        assert!(!dominates(&ov(&[37, 46, 37]), &ov(&[37, 44, 42])));
    }

    #[test]
    fn dominates_strict_in_one() {
        assert!(dominates(&ov(&[0, 0]), &ov(&[0, 1])));
    }

    #[test]
    fn filter_empty() {
        assert!(nondominated_filter(&[]).is_empty());
    }

    #[test]
    fn filter_small_set_matches_pairwise_oracle() {
        let input = vec![ov(&[1, 1]), ov(&[2, 2]), ov(&[0, 3])];
        let got = nondominated_filter(&input);
        // Pairwise oracle: keep v iff no u dominates it.
        let expect: Vec<_> = {
            let mut keep: Vec<_> = input
                .iter()
                .filter(|v| !input.iter().any(|u| dominates(u, v)))
                .cloned()
                .collect();
            keep.sort();
            keep
        };
        assert_eq!(got, expect);
        assert_eq!(got, vec![ov(&[0, 3]), ov(&[1, 1])]);
    }

    #[test]
    fn filter_keeps_mutually_nondominated_appendix_set() {
        let vs = appendix_vectors();
        // Oracle over all 10 ordered pairs: none dominates another.
        for a in &vs {
            for b in &vs {
                if a != b {
                    assert!(!dominates(a, b), "{a} should not dominate {b}");
                }
            }
        }
        let mut expect = vs.clone();
        expect.sort();
        assert_eq!(nondominated_filter(&vs), expect);
    }

    #[test]
    fn filter_deduplicates() {
        let got = nondominated_filter(&[ov(&[1, 1]), ov(&[1, 1])]);
        assert_eq!(got, vec![ov(&[1, 1])]);
    }

    #[test]
    fn archive_insert_into_empty() {
        let mut a = ParetoArchive::new();
        let r = a.insert(ov(&[1, 2]), wit(&[0]));
        assert_eq!(r, ArchiveInsert::Inserted { removed: vec![] });
        assert_eq!(a.len(), 1);
    }

    #[test]
    fn archive_insert_removes_dominated() {
        let mut a = ParetoArchive::new();
        a.insert(ov(&[1, 1]), wit(&[0]));
        let r = a.insert(ov(&[0, 0]), wit(&[1]));
        assert_eq!(
            r,
            ArchiveInsert::Inserted { removed: vec![ov(&[1, 1])] }
        );
        assert_eq!(a.sorted_vectors(), vec![ov(&[0, 0])]);
    }

    #[test]
    fn archive_rejects_dominated_candidate() {
        let mut a = ParetoArchive::new();
        a.insert(ov(&[1, 1]), wit(&[0]));
        assert_eq!(a.insert(ov(&[2, 2]), wit(&[1])), ArchiveInsert::Rejected);
        assert_eq!(a.len(), 1);
    }

    #[test]
    fn archive_keeps_first_witness_on_duplicate() {
        let mut a = ParetoArchive::new();
        a.insert(ov(&[1, 1]), wit(&[7]));
        assert_eq!(a.insert(ov(&[1, 1]), wit(&[9])), ArchiveInsert::Duplicate);
        assert_eq!(a.iter().next().unwrap().1, wit(&[7]));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn vectors(n: usize) -> impl Strategy<Value = Vec<ObjectiveVector>> {
            proptest::collection::vec(
                proptest::collection::vec(0i64..10, n).prop_map(ObjectiveVector),
                0..12,
            )
        }

        proptest! {
            #[test]
            fn dominance_is_irreflexive_and_antisymmetric(
                a in proptest::collection::vec(0i64..10, 3),
                b in proptest::collection::vec(0i64..10, 3),
            ) {
                let a = ObjectiveVector(a);
                let b = ObjectiveVector(b);
                prop_assert!(!dominates(&a, &a));
                prop_assert!(!(dominates(&a, &b) && dominates(&b, &a)));
            }

            #[test]
            fn filter_is_idempotent(vs in vectors(3)) {
                let once = nondominated_filter(&vs);
                prop_assert_eq!(nondominated_filter(&once), once.clone());
            }

            #[test]
            fn archive_equals_batch_filter_in_any_order(
                vs in vectors(2),
                seed in 0u64..1000,
            ) {
                let mut shuffled = vs.clone();
                let mut rng = crate::rng::SeededRng::new(seed);
                for i in (1..shuffled.len()).rev() {
                    let j = rng.uniform(0, i as i64) as usize;
                    shuffled.swap(i, j);
                }
                let mut archive = ParetoArchive::new();
                for v in shuffled {
                    archive.insert(v, wit(&[0]));
                }
                prop_assert_eq!(archive.sorted_vectors(), nondominated_filter(&vs));
            }
        }
    }
}
