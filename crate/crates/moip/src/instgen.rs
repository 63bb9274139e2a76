//! Deterministic, seeded generators for the three benchmark families.
//!
//! All draws come from the pinned counter-based generator in [`crate::rng`],
//! in a documented order, so a `(family, size, objectives, seed)` tuple
//! reproduces the same instance byte for byte on any platform.
//!
//! Every objective is minimized. Knapsack profits are negated at generation
//! time; assignment and travel costs are minimized directly.

use std::fmt;
use std::str::FromStr;

use crate::model::{ConstraintRow, MoipInstance, Relation, Value, VarKind};
use crate::rng::SeededRng;
use crate::Error;

/// Benchmark family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Knapsack,
    Assignment,
    Tsp,
}

impl Family {
    /// Short code used in file names (`kp10_o3_s42.moip`).
    pub fn code(&self) -> &'static str {
        match self {
            Family::Knapsack => "kp",
            Family::Assignment => "ap",
            Family::Tsp => "tsp",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Knapsack => "knapsack",
            Family::Assignment => "assignment",
            Family::Tsp => "tsp",
        })
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "knapsack" | "kp" => Ok(Family::Knapsack),
            "assignment" | "ap" => Ok(Family::Assignment),
            "tsp" => Ok(Family::Tsp),
            other => Err(Error::Invalid(format!("unknown family '{other}'"))),
        }
    }
}

/// Parameters of one generated instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenSpec {
    pub family: Family,
    /// Items, agents, or cities.
    pub size: usize,
    pub num_objectives: usize,
    pub seed: u64,
}

/// Conventional file name `<family><size>_o<objectives>_s<seed>.moip`.
pub fn default_filename(spec: &GenSpec) -> String {
    format!(
        "{}{}_o{}_s{}.moip",
        spec.family.code(),
        spec.size,
        spec.num_objectives,
        spec.seed
    )
}

pub fn generate(spec: &GenSpec) -> MoipInstance {
    match spec.family {
        Family::Knapsack => gen_knapsack(spec),
        Family::Assignment => gen_assignment(spec),
        Family::Tsp => gen_tsp(spec),
    }
}

/// 0-1 knapsack: weights uniform in `{60..100}`, capacity half the total
/// weight (floored), per-objective profits uniform in `{60..100}` stored
/// negated. Draw order: weights, then objective 1's profits, objective 2's,
/// and so on, item by item.
pub fn gen_knapsack(spec: &GenSpec) -> MoipInstance {
    assert_eq!(spec.family, Family::Knapsack);
    assert!(spec.size >= 1);
    let mut rng = SeededRng::new(spec.seed);
    let weights: Vec<Value> = (0..spec.size).map(|_| rng.uniform(60, 100)).collect();
    let capacity = weights.iter().sum::<Value>() / 2;
    let objectives: Vec<Vec<Value>> = (0..spec.num_objectives)
        .map(|_| (0..spec.size).map(|_| -rng.uniform(60, 100)).collect())
        .collect();
    MoipInstance::new(
        objectives,
        vec![ConstraintRow::new(weights, Relation::Le, capacity)],
        vec![VarKind::Binary; spec.size],
    )
    .unwrap()
}

/// Assignment: `size^2` binaries `x_{agent,task}` (agent-major), one
/// equality row per agent and per task, costs uniform in `{0..20}`. Draw
/// order: per objective, agent-major over `(agent, task)`.
pub fn gen_assignment(spec: &GenSpec) -> MoipInstance {
    assert_eq!(spec.family, Family::Assignment);
    assert!(spec.size >= 1);
    let m = spec.size;
    let vars = m * m;
    let mut rng = SeededRng::new(spec.seed);
    let objectives: Vec<Vec<Value>> = (0..spec.num_objectives)
        .map(|_| (0..vars).map(|_| rng.uniform(0, 20)).collect())
        .collect();
    let mut rows = Vec::with_capacity(2 * m);
    for agent in 0..m {
        let mut coeffs = vec![0; vars];
        for task in 0..m {
            coeffs[agent * m + task] = 1;
        }
        rows.push(ConstraintRow::new(coeffs, Relation::Eq, 1));
    }
    for task in 0..m {
        let mut coeffs = vec![0; vars];
        for agent in 0..m {
            coeffs[agent * m + task] = 1;
        }
        rows.push(ConstraintRow::new(coeffs, Relation::Eq, 1));
    }
    MoipInstance::new(objectives, rows, vec![VarKind::Binary; vars]).unwrap()
}

/// Index of arc variable `a -> b` among the `size*(size-1)` arcs.
pub fn tsp_arc_index(a: usize, b: usize, size: usize) -> usize {
    debug_assert!(a != b && a < size && b < size);
    a * (size - 1) + if b > a { b - 1 } else { b }
}

/// Traveling salesman on a 1000x1000 grid: per objective an independent set
/// of integer city coordinates, arc cost the Euclidean distance rounded to
/// the nearest integer. Directed arc binaries, in/out degree equalities, and
/// order variables with the usual position-difference subtour rows
/// (`u_a - u_b + size * x_ab <= size - 1` for non-depot `a != b`; the depot's
/// order variable is fixed at 1). Draw order: per objective, per city, `x`
/// then `y`.
pub fn gen_tsp(spec: &GenSpec) -> MoipInstance {
    assert_eq!(spec.family, Family::Tsp);
    assert!(spec.size >= 3, "tsp needs at least three cities");
    let m = spec.size;
    let arcs = m * (m - 1);
    let vars = arcs + m;
    let mut rng = SeededRng::new(spec.seed);

    let mut objectives = Vec::with_capacity(spec.num_objectives);
    for _ in 0..spec.num_objectives {
        let coords: Vec<(Value, Value)> = (0..m)
            .map(|_| (rng.uniform(0, 1000), rng.uniform(0, 1000)))
            .collect();
        let mut coeffs = vec![0; vars];
        for a in 0..m {
            for b in 0..m {
                if a == b {
                    continue;
                }
                let dx = (coords[a].0 - coords[b].0) as f64;
                let dy = (coords[a].1 - coords[b].1) as f64;
                coeffs[tsp_arc_index(a, b, m)] = (dx * dx + dy * dy).sqrt().round() as Value;
            }
        }
        objectives.push(coeffs);
    }

    let mut rows = Vec::new();
    for a in 0..m {
        let mut coeffs = vec![0; vars];
        for b in 0..m {
            if a != b {
                coeffs[tsp_arc_index(a, b, m)] = 1;
            }
        }
        rows.push(ConstraintRow::new(coeffs, Relation::Eq, 1));
    }
    for b in 0..m {
        let mut coeffs = vec![0; vars];
        for a in 0..m {
            if a != b {
                coeffs[tsp_arc_index(a, b, m)] = 1;
            }
        }
        rows.push(ConstraintRow::new(coeffs, Relation::Eq, 1));
    }
    for a in 1..m {
        for b in 1..m {
            if a == b {
                continue;
            }
            let mut coeffs = vec![0; vars];
            coeffs[arcs + a] = 1;
            coeffs[arcs + b] = -1;
            coeffs[tsp_arc_index(a, b, m)] = m as Value;
            rows.push(ConstraintRow::new(coeffs, Relation::Le, m as Value - 1));
        }
    }

    let mut kinds = vec![VarKind::Binary; arcs];
    kinds.push(VarKind::Integer { lb: 1, ub: 1 }); // depot order fixed
    kinds.extend(std::iter::repeat_n(VarKind::Integer { lb: 2, ub: m as Value }, m - 1));
    MoipInstance::new(objectives, rows, kinds).unwrap()
}

/// Test and oracle helper: an instance whose feasible points select exactly
/// one of the given objective vectors (one binary per vector, summing to 1).
pub fn selection_instance(vectors: &[Vec<Value>]) -> MoipInstance {
    assert!(!vectors.is_empty());
    let n = vectors[0].len();
    assert!(vectors.iter().all(|v| v.len() == n));
    let m = vectors.len();
    let objectives: Vec<Vec<Value>> = (0..n)
        .map(|i| vectors.iter().map(|v| v[i]).collect())
        .collect();
    MoipInstance::new(
        objectives,
        vec![ConstraintRow::new(vec![1; m], Relation::Eq, 1)],
        vec![VarKind::Binary; m],
    )
    .unwrap()
}
