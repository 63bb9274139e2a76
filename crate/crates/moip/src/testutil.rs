//! Shared helpers for randomized tests, driven by the pinned generator so
//! failures reproduce from a seed.

use crate::model::{ObjectiveVector, Value};
use crate::oiplex::{Bound, Permutation};
use crate::rng::SeededRng;

pub(crate) fn random_perm(rng: &mut SeededRng, n: usize) -> Permutation {
    let mut images: Vec<usize> = (1..=n).collect();
    for i in (1..n).rev() {
        let j = rng.uniform(0, i as i64) as usize;
        images.swap(i, j);
    }
    Permutation::new(images).unwrap()
}

pub(crate) fn random_vectors(
    rng: &mut SeededRng,
    n: usize,
    max_len: usize,
) -> Vec<ObjectiveVector> {
    let len = rng.uniform(0, max_len as i64) as usize;
    (0..len)
        .map(|_| ObjectiveVector((0..n).map(|_| rng.uniform(0, 9)).collect()))
        .collect()
}

pub(crate) fn random_bound(rng: &mut SeededRng) -> Bound {
    if rng.uniform(0, 3) == 0 {
        Bound::Unbounded
    } else {
        Bound::At(rng.uniform(0, 9))
    }
}

pub(crate) fn random_value_bound(rng: &mut SeededRng, lo: Value, hi: Value) -> Bound {
    if rng.uniform(0, 3) == 0 {
        Bound::Unbounded
    } else {
        Bound::At(rng.uniform(lo, hi))
    }
}
