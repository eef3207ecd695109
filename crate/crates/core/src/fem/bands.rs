use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::assembly::assemble_bloch_pencil;
use super::mesh::{build_cell_mesh, Mesh};
use super::SolverSettings;
use crate::eigensolve::{eig_sparse_with, ShiftInvertOptions};
use crate::error::{Error, Result};
use crate::params::{LadderParams, SymmetryClass};
use crate::roots::golden_max;

/// Width in `θ` below which golden-section refinement stops.
const THETA_TOL: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandEdge {
    pub lambda: f64,
    /// Quasimomentum where the extremum was found.
    pub theta: f64,
}

impl BandEdge {
    pub fn omega(&self) -> f64 {
        self.lambda.max(0.0).sqrt()
    }
}

/// Range of branch `branch` (0-based rank) over the sampled quasimomenta.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FemBand {
    pub branch: usize,
    pub lo: BandEdge,
    pub hi: BandEdge,
}

/// Gap between branch `below` and branch `below + 1`, edges refined in `θ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FemGap {
    pub below: usize,
    pub bottom: BandEdge,
    pub top: BandEdge,
}

impl FemGap {
    pub fn lambda_b(&self) -> f64 {
        self.bottom.lambda
    }

    pub fn lambda_t(&self) -> f64 {
        self.top.lambda
    }

    pub fn contains(&self, lambda: f64) -> bool {
        lambda > self.bottom.lambda && lambda < self.top.lambda
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FemBlochBands {
    pub params: LadderParams,
    pub class: SymmetryClass,
    pub h: f64,
    pub nev: usize,
    pub n_dof: usize,
    pub settings: SolverSettings,
    pub thetas: Vec<f64>,
    /// `eigenvalues[i][n]`: branch `n` at `thetas[i]`.
    pub eigenvalues: Vec<Vec<f64>>,
    pub bands: Vec<FemBand>,
    pub gaps: Vec<FemGap>,
}

impl FemBlochBands {
    /// Whether every refined edge sits at `θ ∈ {0, π}` (logged, never assumed).
    pub fn edges_at_symmetry_points(&self, tol: f64) -> bool {
        self.gaps
            .iter()
            .flat_map(|g| [g.bottom.theta, g.top.theta])
            .all(|t| t < tol || (PI - t) < tol)
    }

    /// First gap whose interior contains `lambda`.
    pub fn gap_containing(&self, lambda: f64) -> Option<&FemGap> {
        self.gaps.iter().find(|g| g.contains(lambda))
    }
}

/// The `nev` smallest eigenvalues of the cell operator at `theta`.
pub fn cell_eigenvalues(
    mesh: &Mesh,
    theta: f64,
    nev: usize,
    settings: &SolverSettings,
) -> Result<Vec<f64>> {
    let p = assemble_bloch_pencil(mesh, theta)?;
    let mut opts = ShiftInvertOptions::new(-1.0, nev, settings.tol);
    opts.seed = settings.seed;
    opts.want_vectors = false;
    Ok(eig_sparse_with(&p.k, &p.m, &opts)?.values)
}

/// Dispersion curves of the thin ladder on `theta_grid` with gap extraction.
///
/// Branches are identified by rank. A gap is reported between consecutive
/// branches whenever the maximum of the lower one lies below the minimum of
/// the upper one; both edges are then refined by golden-section search in
/// `θ` around the extremal grid point.
pub fn fem_bloch_bands(
    params: &LadderParams,
    class: SymmetryClass,
    nev: usize,
    theta_grid: &[f64],
    h: f64,
) -> Result<FemBlochBands> {
    fem_bloch_bands_with(
        params,
        class,
        nev,
        theta_grid,
        h,
        &SolverSettings::default(),
    )
}

pub fn fem_bloch_bands_with(
    params: &LadderParams,
    class: SymmetryClass,
    nev: usize,
    theta_grid: &[f64],
    h: f64,
    settings: &SolverSettings,
) -> Result<FemBlochBands> {
    if nev == 0 {
        return Err(Error::param("nev", "must be at least 1"));
    }
    if theta_grid.is_empty() || theta_grid.iter().any(|t| !(0.0..=PI).contains(t)) {
        return Err(Error::param(
            "ntheta",
            "theta grid must be non-empty and inside [0, π]",
        ));
    }
    let mesh = build_cell_mesh(params, class, h)?;
    let n_dof = assemble_bloch_pencil(&mesh, 0.0)?.dofs.n_dof;
    let eigenvalues: Vec<Vec<f64>> = theta_grid
        .par_iter()
        .map(|&t| cell_eigenvalues(&mesh, t, nev, settings))
        .collect::<Result<_>>()?;

    let n_br = eigenvalues.iter().map(Vec::len).min().unwrap_or(0);
    let bands: Vec<FemBand> = (0..n_br)
        .map(|b| {
            let (mut lo, mut hi) = (0, 0);
            for i in 0..theta_grid.len() {
                if eigenvalues[i][b] < eigenvalues[lo][b] {
                    lo = i;
                }
                if eigenvalues[i][b] > eigenvalues[hi][b] {
                    hi = i;
                }
            }
            FemBand {
                branch: b,
                lo: BandEdge {
                    lambda: eigenvalues[lo][b],
                    theta: theta_grid[lo],
                },
                hi: BandEdge {
                    lambda: eigenvalues[hi][b],
                    theta: theta_grid[hi],
                },
            }
        })
        .collect();

    let neighbours = |t: f64| -> (f64, f64) {
        let i = theta_grid.iter().position(|&x| x == t).unwrap();
        let a = if i > 0 { theta_grid[i - 1] } else { t };
        let b = theta_grid.get(i + 1).copied().unwrap_or(t);
        (a, b)
    };
    let refine = |branch: usize, start: BandEdge, sign: f64| -> Result<BandEdge> {
        let (a, b) = neighbours(start.theta);
        if a == b {
            return Ok(start);
        }
        let mut err = None;
        let (t, v) = golden_max(
            |t| match cell_eigenvalues(&mesh, t, branch + 1, settings) {
                Ok(v) => sign * v[branch],
                Err(e) => {
                    err = Some(e);
                    f64::NEG_INFINITY
                }
            },
            a,
            b,
            THETA_TOL,
        );
        if let Some(e) = err {
            return Err(e);
        }
        let lambda = sign * v;
        // keep the grid value if refinement did not improve it
        Ok(if sign * lambda >= sign * start.lambda {
            BandEdge { lambda, theta: t }
        } else {
            start
        })
    };

    let candidates: Vec<usize> = (0..n_br.saturating_sub(1))
        .filter(|&b| bands[b].hi.lambda < bands[b + 1].lo.lambda)
        .collect();
    let gaps: Vec<FemGap> = candidates
        .par_iter()
        .map(|&b| -> Result<Option<FemGap>> {
            let bottom = refine(b, bands[b].hi, 1.0)?;
            let top = refine(b + 1, bands[b + 1].lo, -1.0)?;
            Ok((bottom.lambda < top.lambda).then_some(FemGap {
                below: b,
                bottom,
                top,
            }))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();

    Ok(FemBlochBands {
        params: *params,
        class,
        h,
        nev,
        n_dof,
        settings: *settings,
        thetas: theta_grid.to_vec(),
        eigenvalues,
        bands,
        gaps,
    })
}

/// `n` equispaced quasimomenta covering `[0, π]` including both ends.
pub fn theta_grid(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n)
            .map(|i| {
                if i + 1 == n {
                    PI
                } else {
                    PI * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::LengthSpec;

    #[test]
    fn first_gap_near_graph_edges() {
        let p = LadderParams::new(LengthSpec::integer(2), 0.1, 1.0).unwrap();
        let r =
            fem_bloch_bands(&p, SymmetryClass::Symmetric, 3, &theta_grid(9), 0.1 / 3.0).unwrap();
        assert_eq!(r.eigenvalues.len(), 9);
        assert!(r.eigenvalues[0][0].abs() < 1e-9);
        assert!(r.eigenvalues.iter().flatten().all(|&v| v >= -1e-10));
        let g = &r.gaps[0];
        let gg = crate::graph::gaps(2.0, SymmetryClass::Symmetric, 3.0).unwrap()[0];
        // edges move by O(ε) in ω
        assert!(
            (g.bottom.omega() - gg.omega_b).abs() < 2.0 * p.eps,
            "{g:?} {gg:?}"
        );
        assert!(
            (g.top.omega() - gg.omega_t).abs() < 2.0 * p.eps,
            "{g:?} {gg:?}"
        );
        assert!(r.edges_at_symmetry_points(1e-3));
    }

    #[test]
    fn grid_has_both_ends() {
        let g = theta_grid(64);
        assert_eq!(g.len(), 64);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[63], PI);
    }
}
