use serde::{Deserialize, Serialize};

use super::assembly::{assemble_supercell_pencil, element_matrices, HermitianPencil};
use super::bands::FemGap;
use super::mesh::{build_supercell_mesh, Mesh};
use super::SolverSettings;
use crate::eigensolve::{eig_sparse_with, ShiftInvertOptions};
use crate::error::{Error, Result};
use crate::graph::{discrete_eigenvalues, gaps, reflection_root, GraphEigenvalue};
use crate::params::{LadderParams, SymmetryClass};

/// Largest number of Ritz pairs requested while widening the search.
const MAX_NEV: usize = 64;

/// Relative mass below which a cell is treated as noise in the decay fit.
const MASS_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalizedMode {
    pub lambda: f64,
    pub omega: f64,
    pub backward_error: f64,
    /// Mass fractions per cell, index `k` is cell `k − n_cells`.
    pub cell_mass: Vec<f64>,
    /// Fraction of the mass in cells `−1, 0, 1`.
    pub central_fraction: f64,
    /// Fitted ratio of masses in consecutive cells.
    pub decay_ratio_sq: Option<f64>,
    /// Nearest eigenvalue of the limit graph with the same `μ`.
    pub graph_omega: Option<f64>,
    /// `r(ω_graph)²`.
    pub graph_r_sq: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalizedModes {
    pub params: LadderParams,
    pub class: SymmetryClass,
    pub window: (f64, f64),
    pub n_cells: usize,
    pub h: f64,
    pub n_dof: usize,
    pub sigma: f64,
    pub nev: usize,
    pub seed: u64,
    pub iterations: usize,
    pub modes: Vec<LocalizedMode>,
}

/// Report plus the data needed to export eigenfunctions.
#[derive(Debug, Clone)]
pub struct LocalizedSolve {
    pub report: LocalizedModes,
    pub mesh: Mesh,
    pub pencil: HermitianPencil<f64>,
    /// Nodal values of each mode, aligned with `report.modes`.
    pub nodal: Vec<Vec<f64>>,
}

/// A window strictly inside `gap`, shrunk by `margin` times its width on each side.
pub fn gap_window(gap: &FemGap, margin: f64) -> (f64, f64) {
    let w = gap.lambda_t() - gap.lambda_b();
    (gap.lambda_b() + margin * w, gap.lambda_t() - margin * w)
}

/// Eigenvalues of the perturbed supercell inside `window` (in `λ`).
pub fn localized_modes(
    params: &LadderParams,
    class: SymmetryClass,
    window: (f64, f64),
    n_cells: usize,
    h: f64,
) -> Result<LocalizedModes> {
    Ok(localized_modes_full(
        params,
        class,
        window,
        n_cells,
        h,
        &SolverSettings::default(),
    )?
    .report)
}

pub fn localized_modes_full(
    params: &LadderParams,
    class: SymmetryClass,
    window: (f64, f64),
    n_cells: usize,
    h: f64,
    settings: &SolverSettings,
) -> Result<LocalizedSolve> {
    let (lo, hi) = window;
    if !(lo.is_finite() && hi.is_finite() && lo < hi && lo >= 0.0) {
        return Err(Error::param(
            "window",
            format!("need 0 ≤ lo < hi, got ({lo}, {hi})"),
        ));
    }
    let mesh = build_supercell_mesh(params, class, n_cells, h)?;
    let pencil = assemble_supercell_pencil(&mesh);
    let n_dof = pencil.dofs.n_dof;
    let sigma = 0.5 * (lo + hi);

    let mut nev = 4.min(n_dof);
    let res = loop {
        let mut opts = ShiftInvertOptions::new(sigma, nev, settings.tol);
        opts.seed = settings.seed;
        opts.window = Some(window);
        let r = eig_sparse_with(&pencil.k, &pencil.m, &opts)?;
        // stop once the Ritz values spill outside the window
        if r.outside_window.iter().any(|&f| f) || nev >= MAX_NEV.min(n_dof) {
            break r;
        }
        nev = (2 * nev).min(MAX_NEV).min(n_dof);
    };

    let graph_evs = graph_eigenvalues_near(params, class, hi.sqrt() + 1.0);
    let vectors = res.vectors.as_deref().unwrap_or(&[]);
    let mut modes = Vec::new();
    let mut nodal = Vec::new();
    for (i, &lambda) in res.values.iter().enumerate() {
        if res.outside_window[i] {
            continue;
        }
        let u = pencil.dofs.expand(&vectors[i]);
        let cell_mass = cell_masses(&mesh, &u, n_cells);
        let n = n_cells;
        let central_fraction = cell_mass[n - 1] + cell_mass[n] + cell_mass[n + 1];
        let omega = lambda.max(0.0).sqrt();
        let nearest = graph_evs
            .iter()
            .min_by(|a, b| (a.omega - omega).abs().total_cmp(&(b.omega - omega).abs()));
        let graph_omega = nearest.map(|e| e.omega);
        let graph_r_sq = nearest
            .and_then(|e| reflection_root(e.omega, e.l, e.class).ok())
            .map(|r| r * r);
        modes.push(LocalizedMode {
            lambda,
            omega,
            backward_error: res.backward_errors[i],
            decay_ratio_sq: decay_ratio_sq(&cell_mass, n_cells),
            cell_mass,
            central_fraction,
            graph_omega,
            graph_r_sq,
        });
        nodal.push(u);
    }

    Ok(LocalizedSolve {
        report: LocalizedModes {
            params: *params,
            class,
            window,
            n_cells,
            h,
            n_dof,
            sigma: res.sigma,
            nev,
            seed: res.seed,
            iterations: res.iterations,
            modes,
        },
        mesh,
        pencil,
        nodal,
    })
}

fn graph_eigenvalues_near(
    params: &LadderParams,
    class: SymmetryClass,
    omega_max: f64,
) -> Vec<GraphEigenvalue> {
    let l = params.l();
    gaps(l, class, omega_max)
        .map(|gs| {
            gs.iter()
                .flat_map(|g| discrete_eigenvalues(l, params.mu, class, g))
                .collect()
        })
        .unwrap_or_default()
}

/// Mass fraction of `u` per cell, triangles assigned by centroid.
pub fn cell_masses(mesh: &Mesh, u: &[f64], n_cells: usize) -> Vec<f64> {
    let n = n_cells as i64;
    let mut mass = vec![0.0; 2 * n_cells + 1];
    for t in &mesh.triangles {
        let p = t.map(|i| mesh.vertices[i]);
        let (_, me) = element_matrices(p);
        let cx = (p[0][0] + p[1][0] + p[2][0]) / 3.0;
        let j = (cx.round() as i64).clamp(-n, n);
        let mut q = 0.0;
        for a in 0..3 {
            for b in 0..3 {
                q += u[t[a]] * me[a][b] * u[t[b]];
            }
        }
        mass[(j + n) as usize] += q;
    }
    let total: f64 = mass.iter().sum();
    if total > 0.0 {
        mass.iter_mut().for_each(|m| *m /= total);
    }
    mass
}

/// Least-squares slope of `ln m_j` over cells `1..=n−2`, masses averaged over `±j`.
pub fn decay_ratio_sq(cell_mass: &[f64], n_cells: usize) -> Option<f64> {
    let n = n_cells;
    let pts: Vec<(f64, f64)> = (1..n.saturating_sub(1))
        .map(|j| (j as f64, 0.5 * (cell_mass[n + j] + cell_mass[n - j])))
        .filter(|&(_, m)| m > MASS_FLOOR)
        .map(|(j, m)| (j, m.ln()))
        .collect();
    if pts.len() < 3 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some((sxy / sxx).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decay_fit_recovers_geometric_profile() {
        let n = 8;
        let r2: f64 = 0.3;
        let m: Vec<f64> = (-(n as i32)..=n as i32).map(|j| r2.powi(j.abs())).collect();
        let fit = decay_ratio_sq(&m, n).unwrap();
        assert!((fit - r2).abs() < 1e-12);
    }
}
