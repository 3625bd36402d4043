use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::graph::VertexField;
use crate::variational::ProblemSpec;

/// The vertices a zero minimum at `start` forces to vanish, found by
/// propagating along adjacency through the equation vertices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropagationWitness {
    pub start: String,
    pub forced_zero: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Positivity {
    pub nonneg: bool,
    pub strictly_positive_interior: bool,
    /// `max |u⁻|`.
    pub u_minus_norm: f64,
    pub witness: Option<PropagationWitness>,
}

/// Sign certificate for a solution of a truncated variant.
///
/// The negative part must be below `tol`; a value `≤ tol` at an equation
/// vertex is reported together with the set the maximum principle forces to zero.
pub fn certify_positivity(prob: &ProblemSpec, u: &VertexField, tol: f64) -> Positivity {
    let g = prob.graph();
    let u_minus_norm = u.negative_part().max_abs();
    let nonneg = u_minus_norm <= tol;
    let eq = prob.equation_vertices();
    let mut in_eq = vec![false; g.len()];
    for &x in &eq {
        in_eq[x] = true;
    }
    let witness = eq.iter().copied().find(|&x| u[x] <= tol).map(|start| {
        let mut seen = vec![false; g.len()];
        let mut order = Vec::new();
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(x) = queue.pop_front() {
            order.push(x);
            // only an equation vertex passes the zero on to its neighbours
            if !in_eq[x] {
                continue;
            }
            for &(y, _) in g.neighbors(x) {
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        order.sort_unstable();
        PropagationWitness {
            start: g.id(start).to_string(),
            forced_zero: order.into_iter().map(|x| g.id(x).to_string()).collect(),
        }
    });
    Positivity {
        nonneg,
        strictly_positive_interior: nonneg && witness.is_none(),
        u_minus_norm,
        witness,
    }
}
