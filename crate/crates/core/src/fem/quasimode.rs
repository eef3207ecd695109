use serde::{Deserialize, Serialize};

use super::assembly::assemble_supercell_pencil;
use super::mesh::{build_supercell_mesh, Mesh};
use crate::eigensolve::{dot, SparseLu};
use crate::error::{Error, Result};
use crate::graph::{build_eigenfunction, GraphEigenfunction, GraphEigenvalue};
use crate::params::{LadderParams, SymmetryClass};

/// Tail size at which the truncated pseudo-mode is considered negligible.
const TAIL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuasimodeResidual {
    pub eps: f64,
    pub h: f64,
    pub omega: f64,
    pub lambda: f64,
    pub n_cells: usize,
    pub n_dof: usize,
    /// `‖K u − λ M u‖_{M⁻¹} / ‖u‖_{K+M}`.
    pub ratio_m_inv: f64,
    /// `‖K u − λ M u‖_{(K+M)⁻¹} / ‖u‖_{K+M}`, the discrete dual norm.
    pub ratio_dual: f64,
}

/// Supercell size making `|r|^n` smaller than the tail tolerance.
pub fn cells_for_decay(r: f64) -> usize {
    let n = (TAIL.ln() / r.abs().max(1e-300).ln()).ceil();
    (n as usize).clamp(6, 40)
}

/// Nodal values of the fattened graph eigenfunction on a supercell mesh.
///
/// Junctions carry the vertex values, strips the horizontal traces under a
/// linear stretch of the free length, rungs the vertical traces stretched
/// from `[−L/2 + ε, 0]` onto `[−L/2, 0]`.
pub fn pseudo_mode(mesh: &Mesh, f: &GraphEigenfunction) -> Result<Vec<f64>> {
    let p = &mesh.params;
    let (eps, half) = (p.eps, p.l() / 2.0);
    let strip_top = -half + eps;
    let w = |j: i64| p.rung_weight(j) * eps;
    let geom = 1e-12;
    mesh.vertices
        .iter()
        .map(|&[x, y]| {
            if y < -half - geom || y > geom {
                return Err(Error::Interpolation(format!(
                    "node ({x}, {y}) outside the half ladder"
                )));
            }
            let j = x.round() as i64;
            let in_rung = (x - j as f64).abs() <= w(j) / 2.0 + geom;
            if y > strip_top + geom {
                if !in_rung {
                    return Err(Error::Interpolation(format!(
                        "node ({x}, {y}) off every rung"
                    )));
                }
                return Ok(f.vertical(j, y / (1.0 - 2.0 * eps / p.l())));
            }
            if in_rung {
                return Ok(f.vertex_value(j));
            }
            // horizontal edge from vertex k to k + 1
            let k = x.floor() as i64;
            let start = k as f64 + w(k) / 2.0;
            let len = 1.0 - (w(k) + w(k + 1)) / 2.0;
            let s = ((x - start) / len).clamp(0.0, 1.0);
            Ok(f.horizontal(k, s))
        })
        .collect()
}

/// Residual ratio of the pseudo-mode of `graph_ev`, measured in the dual norm of `H¹`.
///
/// The `M⁻¹` variant is kept in [`QuasimodeResidual::ratio_m_inv`]; it sees the
/// derivative jumps across junction interfaces at the mesh scale and grows
/// like `h^{-1/2}`.
pub fn quasimode_residual(
    params: &LadderParams,
    class: SymmetryClass,
    graph_ev: &GraphEigenvalue,
    h: f64,
) -> Result<f64> {
    Ok(quasimode_residual_report(params, class, graph_ev, h)?.ratio_dual)
}

pub fn quasimode_residual_report(
    params: &LadderParams,
    class: SymmetryClass,
    graph_ev: &GraphEigenvalue,
    h: f64,
) -> Result<QuasimodeResidual> {
    if graph_ev.class != class {
        return Err(Error::param(
            "class",
            "graph eigenvalue belongs to the other class",
        ));
    }
    if (graph_ev.mu - params.mu).abs() > 1e-12 || (graph_ev.l - params.l()).abs() > 1e-12 {
        return Err(Error::param("graph_ev", "computed for different L or μ"));
    }
    let f = build_eigenfunction(graph_ev)?;
    let n_cells = cells_for_decay(f.r);
    let mesh = build_supercell_mesh(params, class, n_cells, h)?;
    let pencil = assemble_supercell_pencil(&mesh);
    let u = pencil.dofs.restrict(&pseudo_mode(&mesh, &f)?);
    let lambda = graph_ev.lambda;

    let ku = pencil.k.matvec(&u);
    let mu_ = pencil.m.matvec(&u);
    let r: Vec<f64> = ku.iter().zip(&mu_).map(|(a, b)| a - lambda * b).collect();
    let energy = dot(&u, &ku) + dot(&u, &mu_);
    let a = pencil.k.axpby(1.0, &pencil.m, 1.0);
    let dual = dot(&r, &SparseLu::factor(&a)?.solve(&r));
    let m_inv = dot(&r, &SparseLu::factor(&pencil.m)?.solve(&r));
    Ok(QuasimodeResidual {
        eps: params.eps,
        h,
        omega: graph_ev.omega,
        lambda,
        n_cells,
        n_dof: pencil.dofs.n_dof,
        ratio_m_inv: (m_inv / energy).sqrt(),
        ratio_dual: (dual / energy).sqrt(),
    })
}
