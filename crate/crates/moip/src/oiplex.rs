//! Reference semantics of ordered, constrained lexicographic problems over
//! explicit objective-vector sets, plus permutation utilities.
//!
//! An [`OipSpec`] describes a subproblem by a permutation `s` of the
//! objectives, a free-prefix length `k`, and upper bounds on the objectives
//! at permuted positions `k+1..=n`. [`oip_filter`] computes its exact set of
//! non-dominated vectors from an explicit vector set; the recursive solver is
//! tested against it on every instance small enough to enumerate.

use std::collections::BTreeMap;
use std::fmt;

use crate::model::{ObjectiveVector, Value};
use crate::Error;

/// A permutation of `{1..n}`; `image(i)` is the objective considered at
/// position `i` (both 1-based).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self, Error> {
        let n = images.len();
        if n == 0 {
            return Err(Error::Invalid("empty permutation".into()));
        }
        let mut seen = vec![false; n + 1];
        for &v in &images {
            if v < 1 || v > n || seen[v] {
                return Err(Error::Invalid(format!(
                    "not a permutation of 1..={n}: {images:?}"
                )));
            }
            seen[v] = true;
        }
        Ok(Permutation { images })
    }

    pub fn identity(n: usize) -> Self {
        Permutation { images: (1..=n).collect() }
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Image of position `i` (1-based).
    pub fn image(&self, i: usize) -> usize {
        self.images[i - 1]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.images.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

/// Upper bound on one objective: finite, or absent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Bound {
    At(Value),
    Unbounded,
}

impl Bound {
    pub fn satisfies(&self, v: Value) -> bool {
        match self {
            Bound::At(b) => v <= *b,
            Bound::Unbounded => true,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Bound::At(_))
    }

    pub fn finite(&self) -> Option<Value> {
        match self {
            Bound::At(b) => Some(*b),
            Bound::Unbounded => None,
        }
    }

    /// Tighter of the two bounds (`Unbounded` is loosest).
    pub fn min(self, other: Bound) -> Bound {
        match (self, other) {
            (Bound::Unbounded, b) | (b, Bound::Unbounded) => b,
            (Bound::At(a), Bound::At(b)) => Bound::At(a.min(b)),
        }
    }

    /// Whether `self` is at least as loose as `other`.
    pub fn at_least_as_loose_as(&self, other: &Bound) -> bool {
        match (self, other) {
            (Bound::Unbounded, _) => true,
            (Bound::At(_), Bound::Unbounded) => false,
            (Bound::At(a), Bound::At(b)) => a >= b,
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::At(v) => write!(f, "{v}"),
            Bound::Unbounded => write!(f, "inf"),
        }
    }
}

/// An ordered, constrained subproblem: permutation `s`, free-prefix length
/// `k`, and one upper bound per position in `k+1..=n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OipSpec {
    perm: Permutation,
    free_prefix: usize,
    /// `bounds[j]` bounds position `k + 1 + j`.
    bounds: Vec<Bound>,
}

impl OipSpec {
    pub fn new(perm: Permutation, free_prefix: usize, bounds: Vec<Bound>) -> Result<Self, Error> {
        let n = perm.len();
        if free_prefix > n {
            return Err(Error::Invalid(format!(
                "free prefix {free_prefix} exceeds {n} objectives"
            )));
        }
        if bounds.len() != n - free_prefix {
            return Err(Error::Invalid(format!(
                "expected {} bounds for positions {}..={}, got {}",
                n - free_prefix,
                free_prefix + 1,
                n,
                bounds.len()
            )));
        }
        Ok(OipSpec { perm, free_prefix, bounds })
    }

    /// Fully free problem: `k = n`, no bounds.
    pub fn unconstrained(perm: Permutation) -> Self {
        OipSpec { free_prefix: perm.len(), perm, bounds: Vec::new() }
    }

    pub fn n(&self) -> usize {
        self.perm.len()
    }

    pub fn perm(&self) -> &Permutation {
        &self.perm
    }

    pub fn free_prefix(&self) -> usize {
        self.free_prefix
    }

    pub fn bounds(&self) -> &[Bound] {
        &self.bounds
    }

    /// Bound at position `p` (1-based, `p > free_prefix`).
    pub fn bound_at_position(&self, p: usize) -> Bound {
        assert!(p > self.free_prefix && p <= self.n(), "position {p} is not bounded");
        self.bounds[p - self.free_prefix - 1]
    }

    /// Objective bounded at position `p`.
    pub fn objective_at_position(&self, p: usize) -> usize {
        self.perm.image(p)
    }

    /// Whether `v` satisfies every positional bound.
    pub fn bounds_satisfied(&self, v: &ObjectiveVector) -> bool {
        (self.free_prefix + 1..=self.n())
            .all(|p| self.bound_at_position(p).satisfies(v.value(self.perm.image(p))))
    }
}

impl fmt::Display for OipSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "OIP_{}^{}({}, (", self.perm, self.n(), self.free_prefix)?;
        for (i, b) in self.bounds.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{b}")?;
        }
        write!(f, "))")
    }
}

/// Exact non-dominated set of the subproblem over an explicit vector set.
///
/// Three steps: (a) drop vectors violating any positional bound; (b) among
/// survivors, drop vectors dominated in the projection onto the first `k`
/// permuted objectives; (c) within each class of equal first-`k` projections,
/// keep only the lexicographic minimum under the coordinate order
/// `s(k+1), ..., s(n)`. Output in canonical ascending order.
///
/// Panics if vector lengths do not match the spec.
pub fn oip_filter(vs: &[ObjectiveVector], spec: &OipSpec) -> Vec<ObjectiveVector> {
    let n = spec.n();
    let k = spec.free_prefix;
    for v in vs {
        assert_eq!(v.len(), n, "vector length {} does not match spec n={}", v.len(), n);
    }

    // (a) positional bounds
    let mut survivors: Vec<ObjectiveVector> = vs
        .iter()
        .filter(|v| spec.bounds_satisfied(v))
        .cloned()
        .collect();
    survivors.sort();
    survivors.dedup();

    // (b) dominance on the first k permuted coordinates
    let project = |v: &ObjectiveVector| -> Vec<Value> {
        (1..=k).map(|p| v.value(spec.perm.image(p))).collect()
    };
    let dominated_in_prefix = |v: &ObjectiveVector| {
        let pv = project(v);
        survivors.iter().any(|u| {
            if u == v {
                return false;
            }
            let pu = project(u);
            let mut strict = false;
            for (a, b) in pu.iter().zip(&pv) {
                if a > b {
                    return false;
                }
                if a < b {
                    strict = true;
                }
            }
            strict
        })
    };
    let survivors: Vec<ObjectiveVector> = survivors
        .iter()
        .filter(|v| !dominated_in_prefix(v))
        .cloned()
        .collect();

    // (c) lexicographic minimum per equal-prefix class, in suffix order
    let suffix_key = |v: &ObjectiveVector| -> Vec<Value> {
        (k + 1..=n).map(|p| v.value(spec.perm.image(p))).collect()
    };
    let mut best: BTreeMap<Vec<Value>, ObjectiveVector> = BTreeMap::new();
    for v in survivors {
        let class = project(&v);
        match best.get(&class) {
            Some(cur) if suffix_key(cur) <= suffix_key(&v) => {}
            _ => {
                best.insert(class, v);
            }
        }
    }
    let mut out: Vec<ObjectiveVector> = best.into_values().collect();
    out.sort();
    out
}

/// Largest `a` such that the permutations agree on their final `a` positions.
///
/// Panics on a size mismatch.
pub fn suffix_agreement(s: &Permutation, s2: &Permutation) -> usize {
    assert_eq!(s.len(), s2.len(), "suffix agreement over unequal sizes");
    let n = s.len();
    let mut a = 0;
    for i in (1..=n).rev() {
        if s.image(i) == s2.image(i) {
            a += 1;
        } else {
            break;
        }
    }
    a
}

/// Check the drop-one-bound inclusion between two specs that differ only in
/// the innermost bound: with `spec_kminus1 = (s, k-1, (a_k, rest...))` and
/// `spec_k = (s, k, rest)`, every vector non-dominated for the former is
/// non-dominated for the latter. Returns the inclusion verdict.
pub fn check_drop_k(
    vs: &[ObjectiveVector],
    spec_kminus1: &OipSpec,
    spec_k: &OipSpec,
) -> Result<bool, Error> {
    if spec_kminus1.perm != spec_k.perm {
        return Err(Error::Invalid("drop-k specs use different permutations".into()));
    }
    if spec_k.free_prefix != spec_kminus1.free_prefix + 1 {
        return Err(Error::Invalid(format!(
            "free prefixes {} and {} do not differ by one",
            spec_kminus1.free_prefix, spec_k.free_prefix
        )));
    }
    if spec_kminus1.bounds[1..] != spec_k.bounds[..] {
        return Err(Error::Invalid("drop-k specs disagree on outer bounds".into()));
    }
    let tight = oip_filter(vs, spec_kminus1);
    let loose = oip_filter(vs, spec_k);
    Ok(tight.iter().all(|v| loose.contains(v)))
}
