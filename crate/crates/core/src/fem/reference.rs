//! Neumann Laplacian on a rectangle, the self-check for the element code.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::assembly::element_matrices;
use crate::eigensolve::{eig_sparse_shift_invert, TripletBuilder};
use crate::error::{Error, Result};
use crate::roots::loglog_slope;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RectangleCheck {
    pub a: f64,
    pub b: f64,
    pub exact: Vec<f64>,
    pub h: Vec<f64>,
    /// `computed[level][k]`.
    pub computed: Vec<Vec<f64>>,
    /// Largest relative error over the nonzero modes, per level.
    pub max_rel_error: Vec<f64>,
    /// Fitted convergence order of the worst relative error, `None` if it cannot be fitted.
    pub order: Option<f64>,
}

impl RectangleCheck {
    /// Fitted order within `[1.8, 2.2]`.
    pub fn passes(&self) -> bool {
        self.order.is_some_and(|o| (1.8..=2.2).contains(&o))
    }
}

/// Smallest `count` values of `π²(m²/a² + n²/b²)`, with multiplicity.
pub fn rectangle_exact(a: f64, b: f64, count: usize) -> Vec<f64> {
    let k = count + 2;
    let mut v: Vec<f64> = (0..k)
        .flat_map(|m| {
            (0..k).map(move |n| PI * PI * ((m * m) as f64 / (a * a) + (n * n) as f64 / (b * b)))
        })
        .collect();
    v.sort_by(f64::total_cmp);
    v.truncate(count);
    v
}

/// `count` smallest FEM eigenvalues on an `nx × ny` grid split into triangles.
pub fn rectangle_eigenvalues(
    a: f64,
    b: f64,
    nx: usize,
    ny: usize,
    count: usize,
) -> Result<Vec<f64>> {
    if nx == 0 || ny == 0 {
        return Err(Error::param(
            "h",
            "grid needs at least one division per side",
        ));
    }
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let pt = |i: usize, j: usize| [a * i as f64 / nx as f64, b * j as f64 / ny as f64];
    let n = (nx + 1) * (ny + 1);
    let mut kb = TripletBuilder::new(n);
    let mut mb = TripletBuilder::new(n);
    for j in 0..ny {
        for i in 0..nx {
            // alternate diagonals so the mesh has no preferred direction
            let tris = if (i + j) % 2 == 0 {
                [
                    [(i, j), (i + 1, j), (i + 1, j + 1)],
                    [(i, j), (i + 1, j + 1), (i, j + 1)],
                ]
            } else {
                [
                    [(i, j), (i + 1, j), (i, j + 1)],
                    [(i + 1, j), (i + 1, j + 1), (i, j + 1)],
                ]
            };
            for t in tris {
                let (ke, me) = element_matrices(t.map(|(p, q)| pt(p, q)));
                let g = t.map(|(p, q)| id(p, q));
                for r in 0..3 {
                    for c in 0..3 {
                        kb.add(g[r], g[c], ke[r][c]);
                        mb.add(g[r], g[c], me[r][c]);
                    }
                }
            }
        }
    }
    Ok(eig_sparse_shift_invert(&kb.build(), &mb.build(), -1.0, count, 1e-11)?.values)
}

/// Runs `levels` uniform refinements starting from `n0` divisions on the long side.
pub fn neumann_rectangle_check(
    a: f64,
    b: f64,
    count: usize,
    n0: usize,
    levels: usize,
) -> Result<RectangleCheck> {
    if levels < 2 {
        return Err(Error::param(
            "levels",
            "need at least two meshes to fit an order",
        ));
    }
    let exact = rectangle_exact(a, b, count);
    let mut h = Vec::new();
    let mut computed = Vec::new();
    let mut max_rel_error = Vec::new();
    for level in 0..levels {
        let nx = n0 << level;
        let ny = ((nx as f64) * b / a).round().max(1.0) as usize;
        let vals = rectangle_eigenvalues(a, b, nx, ny, count)?;
        let err = vals
            .iter()
            .zip(&exact)
            .filter(|(_, e)| **e > 0.0)
            .map(|(v, e)| (v - e).abs() / e)
            .fold(0.0, f64::max);
        h.push(a / nx as f64);
        computed.push(vals);
        max_rel_error.push(err);
    }
    let order = loglog_slope(&h, &max_rel_error);
    Ok(RectangleCheck {
        a,
        b,
        exact,
        h,
        computed,
        max_rel_error,
        order,
    })
}
