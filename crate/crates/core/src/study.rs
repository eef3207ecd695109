//! ε-sweeps comparing the thin ladder with its graph limit, with slope fits.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fem::{
    fem_bloch_bands_with, gap_window, localized_modes_full, quasimode_residual_report, theta_grid,
    FemBlochBands, FemGap, SolverSettings,
};
use crate::graph::{discrete_eigenvalues, gaps, Gap, GraphEigenvalue};
use crate::params::{LadderParams, LengthSpec, SymmetryClass};
use crate::roots::loglog_slope;

/// Accepted range for a fitted exponent; `hi = None` means unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeWindow {
    pub lo: f64,
    pub hi: Option<f64>,
}

impl SlopeWindow {
    pub fn new(lo: f64, hi: Option<f64>) -> Self {
        SlopeWindow { lo, hi }
    }

    pub fn contains(&self, s: f64) -> bool {
        s >= self.lo && self.hi.is_none_or(|h| s <= h)
    }
}

/// Mesh and solver resolution shared by the FEM sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Resolution {
    /// Mesh size as a fraction of `ε`.
    pub h_over_eps: f64,
    pub ntheta: usize,
    pub nev: usize,
    pub settings: SolverSettings,
}

impl Default for Resolution {
    fn default() -> Self {
        Resolution {
            h_over_eps: 0.25,
            ntheta: 9,
            nev: 4,
            settings: SolverSettings::default(),
        }
    }
}

fn check_eps(eps: &[f64]) -> Result<()> {
    if eps.len() < 2 {
        return Err(Error::param(
            "eps",
            "a convergence fit needs at least two values",
        ));
    }
    if eps.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::param("eps", "values must be strictly decreasing"));
    }
    Ok(())
}

fn graph_gap(l: f64, class: SymmetryClass, index: usize) -> Result<Gap> {
    let mut omega_max = 4.0 * std::f64::consts::PI;
    loop {
        let gs = gaps(l, class, omega_max)?;
        // the last gap may be cut by omega_max
        if gs.len() > index + 1 {
            return Ok(gs[index]);
        }
        if omega_max > 200.0 {
            return Err(Error::param(
                "gap",
                format!("no gap number {index} below ω = {omega_max}"),
            ));
        }
        omega_max *= 2.0;
    }
}

/// FEM gap closest to the graph gap, by the sum of edge distances in `ω`.
pub fn matching_fem_gap<'a>(bands: &'a FemBlochBands, target: &Gap) -> Option<&'a FemGap> {
    let d = |g: &FemGap| {
        (g.bottom.omega() - target.omega_b).abs() + (g.top.omega() - target.omega_t).abs()
    };
    bands.gaps.iter().min_by(|a, b| d(a).total_cmp(&d(b)))
}

fn sweep_bands(
    length: LengthSpec,
    mu: f64,
    class: SymmetryClass,
    eps: &[f64],
    res: &Resolution,
) -> Result<Vec<FemBlochBands>> {
    let grid = theta_grid(res.ntheta);
    eps.iter()
        .map(|&e| {
            // cell problems do not see μ
            let p = LadderParams::new(length, e, mu)?;
            fem_bloch_bands_with(&p, class, res.nev, &grid, e * res.h_over_eps, &res.settings)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeConvergence {
    pub length: LengthSpec,
    pub class: SymmetryClass,
    pub gap_index: usize,
    pub resolution: Resolution,
    pub graph_gap: Gap,
    pub eps: Vec<f64>,
    /// FEM edges in `ω`.
    pub fem_b: Vec<f64>,
    pub fem_t: Vec<f64>,
    /// Quasimomenta where the FEM edges were attained.
    pub theta_b: Vec<f64>,
    pub theta_t: Vec<f64>,
    pub err_b: Vec<f64>,
    pub err_t: Vec<f64>,
    pub slope_b: Option<f64>,
    pub slope_t: Option<f64>,
    pub window: SlopeWindow,
    pub pass: bool,
}

/// Distance between FEM and graph edges of gap `gap_index` as `ε` shrinks.
pub fn band_edge_convergence(
    length: LengthSpec,
    class: SymmetryClass,
    gap_index: usize,
    eps: &[f64],
    res: &Resolution,
    window: SlopeWindow,
) -> Result<EdgeConvergence> {
    check_eps(eps)?;
    let target = graph_gap(length.value(), class, gap_index)?;
    let sweeps = sweep_bands(length, 1.0, class, eps, res)?;
    let mut out = EdgeConvergence {
        length,
        class,
        gap_index,
        resolution: *res,
        graph_gap: target,
        eps: eps.to_vec(),
        fem_b: Vec::new(),
        fem_t: Vec::new(),
        theta_b: Vec::new(),
        theta_t: Vec::new(),
        err_b: Vec::new(),
        err_t: Vec::new(),
        slope_b: None,
        slope_t: None,
        window,
        pass: false,
    };
    for (b, &e) in sweeps.iter().zip(eps) {
        let g = matching_fem_gap(b, &target)
            .ok_or_else(|| Error::Study(format!("no FEM gap found at ε = {e}")))?;
        out.fem_b.push(g.bottom.omega());
        out.fem_t.push(g.top.omega());
        out.theta_b.push(g.bottom.theta);
        out.theta_t.push(g.top.theta);
        out.err_b.push((g.bottom.omega() - target.omega_b).abs());
        out.err_t.push((g.top.omega() - target.omega_t).abs());
    }
    out.slope_b = loglog_slope(eps, &out.err_b);
    out.slope_t = loglog_slope(eps, &out.err_t);
    out.pass = [out.slope_b, out.slope_t]
        .iter()
        .all(|s| s.is_some_and(|s| window.contains(s)));
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackedEigenvalue {
    pub graph: GraphEigenvalue,
    /// Matched FEM eigenvalue per `ε`, in `λ`.
    pub fem_lambda: Vec<Option<f64>>,
    /// `|λ_ε − λ_graph|`.
    pub err: Vec<Option<f64>>,
    pub monotone: bool,
    pub slope: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenConvergence {
    pub length: LengthSpec,
    pub mu: f64,
    pub class: SymmetryClass,
    pub gap_index: usize,
    pub n_cells: usize,
    pub resolution: Resolution,
    pub eps: Vec<f64>,
    /// Same-ε FEM gap per `ε`, in `λ`.
    pub fem_gaps: Vec<(f64, f64)>,
    /// All supercell eigenvalues found inside the FEM gap, per `ε`.
    pub in_gap: Vec<Vec<f64>>,
    pub tracked: Vec<TrackedEigenvalue>,
    pub window: SlopeWindow,
    pub pass: bool,
}

/// Supercell eigenvalues inside the same-ε FEM gap compared with the graph roots.
#[allow(clippy::too_many_arguments)]
pub fn eigenvalue_convergence(
    length: LengthSpec,
    mu: f64,
    class: SymmetryClass,
    gap_index: usize,
    eps: &[f64],
    n_cells: usize,
    res: &Resolution,
    window: SlopeWindow,
) -> Result<EigenConvergence> {
    check_eps(eps)?;
    let l = length.value();
    let target = graph_gap(l, class, gap_index)?;
    let graph_evs = discrete_eigenvalues(l, mu, class, &target);
    let sweeps = sweep_bands(length, mu, class, eps, res)?;

    let per_eps: Vec<((f64, f64), Vec<f64>)> = sweeps
        .par_iter()
        .zip(eps.par_iter())
        .map(|(b, &e)| -> Result<_> {
            let g = matching_fem_gap(b, &target)
                .ok_or_else(|| Error::Study(format!("no FEM gap found at ε = {e}")))?;
            let p = LadderParams::new(length, e, mu)?;
            let w = gap_window(g, 1e-6);
            let r = localized_modes_full(&p, class, w, n_cells, e * res.h_over_eps, &res.settings)?;
            Ok((
                (g.lambda_b(), g.lambda_t()),
                r.report.modes.iter().map(|m| m.lambda).collect(),
            ))
        })
        .collect::<Result<_>>()?;
    let (fem_gaps, in_gap): (Vec<_>, Vec<_>) = per_eps.into_iter().unzip();

    let tracked: Vec<TrackedEigenvalue> = graph_evs
        .iter()
        .enumerate()
        .map(|(k, ev)| {
            let fem_lambda: Vec<Option<f64>> = in_gap
                .iter()
                .map(|vals: &Vec<f64>| {
                    if vals.len() == graph_evs.len() {
                        Some(vals[k])
                    } else {
                        vals.iter()
                            .copied()
                            .min_by(|a, b| (a - ev.lambda).abs().total_cmp(&(b - ev.lambda).abs()))
                    }
                })
                .collect();
            let err: Vec<Option<f64>> = fem_lambda
                .iter()
                .map(|v| v.map(|v| (v - ev.lambda).abs()))
                .collect();
            let full: Option<Vec<f64>> = err.iter().copied().collect();
            let monotone = full
                .as_ref()
                .is_some_and(|e| e.windows(2).all(|w| w[1] < w[0]));
            let slope = full.as_ref().and_then(|e| loglog_slope(eps, e));
            TrackedEigenvalue {
                graph: *ev,
                fem_lambda,
                err,
                monotone,
                slope,
            }
        })
        .collect();

    let complete: Vec<&TrackedEigenvalue> = tracked
        .iter()
        .filter(|t| t.err.iter().all(Option::is_some))
        .collect();
    let pass = in_gap.iter().all(|v| !v.is_empty())
        && !complete.is_empty()
        && complete
            .iter()
            .all(|t| t.monotone && t.slope.is_some_and(|s| window.contains(s)));
    Ok(EigenConvergence {
        length,
        mu,
        class,
        gap_index,
        n_cells,
        resolution: *res,
        eps: eps.to_vec(),
        fem_gaps,
        in_gap,
        tracked,
        window,
        pass,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuasimodeSeries {
    pub graph: GraphEigenvalue,
    pub ratio_dual: Vec<f64>,
    pub ratio_m_inv: Vec<f64>,
    pub exponent_dual: Option<f64>,
    pub exponent_m_inv: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuasimodeStudy {
    pub length: LengthSpec,
    pub mu: f64,
    pub class: SymmetryClass,
    pub gap_index: usize,
    pub h_over_eps: f64,
    pub eps: Vec<f64>,
    pub series: Vec<QuasimodeSeries>,
    pub window: SlopeWindow,
    pub pass: bool,
}

/// Pseudo-mode residuals for every graph eigenvalue of gap `gap_index`.
pub fn quasimode_convergence(
    length: LengthSpec,
    mu: f64,
    class: SymmetryClass,
    gap_index: usize,
    eps: &[f64],
    h_over_eps: f64,
    window: SlopeWindow,
) -> Result<QuasimodeStudy> {
    check_eps(eps)?;
    let l = length.value();
    let target = graph_gap(l, class, gap_index)?;
    let series: Vec<QuasimodeSeries> = discrete_eigenvalues(l, mu, class, &target)
        .iter()
        .map(|ev| -> Result<QuasimodeSeries> {
            let rs: Vec<_> = eps
                .par_iter()
                .map(|&e| {
                    let p = LadderParams::new(length, e, mu)?;
                    quasimode_residual_report(&p, class, ev, e * h_over_eps)
                })
                .collect::<Result<_>>()?;
            let ratio_dual: Vec<f64> = rs.iter().map(|r| r.ratio_dual).collect();
            let ratio_m_inv: Vec<f64> = rs.iter().map(|r| r.ratio_m_inv).collect();
            Ok(QuasimodeSeries {
                graph: *ev,
                exponent_dual: loglog_slope(eps, &ratio_dual),
                exponent_m_inv: loglog_slope(eps, &ratio_m_inv),
                ratio_dual,
                ratio_m_inv,
            })
        })
        .collect::<Result<_>>()?;
    let pass = !series.is_empty()
        && series
            .iter()
            .all(|s| s.exponent_dual.is_some_and(|x| window.contains(x)));
    Ok(QuasimodeStudy {
        length,
        mu,
        class,
        gap_index,
        h_over_eps,
        eps: eps.to_vec(),
        series,
        window,
        pass,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlatBandStudy {
    pub length: LengthSpec,
    pub class: SymmetryClass,
    pub target_omega: f64,
    pub half_window: f64,
    pub resolution: Resolution,
    pub eps: Vec<f64>,
    /// The band whose lower edge lies within the window, in `ω`.
    pub bands: Vec<Option<(f64, f64)>>,
    pub widths: Vec<Option<f64>>,
    /// `width(ε_{k+1}) / width(ε_k)`.
    pub ratios: Vec<f64>,
    /// Smallest `C` with `width ≤ C ε` over the sweep.
    pub c_fit: Option<f64>,
    /// Accepted range of the width ratio when `ε` halves.
    pub ratio_window: (f64, f64),
    pub pass: bool,
}

/// Narrow FEM band grown out of a flat graph band near `target_omega`.
pub fn flat_band_splitting(
    length: LengthSpec,
    class: SymmetryClass,
    target_omega: f64,
    half_window: f64,
    eps: &[f64],
    res: &Resolution,
    ratio_window: (f64, f64),
) -> Result<FlatBandStudy> {
    check_eps(eps)?;
    let sweeps = sweep_bands(length, 1.0, class, eps, res)?;
    let (lo, hi) = (target_omega - half_window, target_omega + half_window);
    let bands: Vec<Option<(f64, f64)>> = sweeps
        .iter()
        .map(|s| {
            s.bands
                .iter()
                .map(|b| (b.lo.omega(), b.hi.omega()))
                .find(|&(a, _)| a > lo && a < hi)
        })
        .collect();
    let widths: Vec<Option<f64>> = bands.iter().map(|b| b.map(|(a, c)| c - a)).collect();
    let ratios: Vec<f64> = widths
        .windows(2)
        .filter_map(|w| Some(w[1]? / w[0]?))
        .collect();
    let c_fit = widths
        .iter()
        .zip(eps)
        .map(|(w, e)| w.map(|w| w / e))
        .collect::<Option<Vec<f64>>>()
        .map(|v| v.into_iter().fold(0.0, f64::max));
    let halving = eps.windows(2).all(|w| (w[1] / w[0] - 0.5).abs() < 1e-12);
    let pass = widths.iter().all(Option::is_some)
        && halving
        && ratios.len() + 1 == eps.len()
        && ratios
            .iter()
            .all(|r| *r >= ratio_window.0 && *r <= ratio_window.1);
    Ok(FlatBandStudy {
        length,
        class,
        target_omega,
        half_window,
        resolution: *res,
        eps: eps.to_vec(),
        bands,
        widths,
        ratios,
        c_fit,
        ratio_window,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_window_bounds() {
        let w = SlopeWindow::new(0.8, Some(1.2));
        assert!(w.contains(1.0) && !w.contains(1.3) && !w.contains(0.7));
        assert!(SlopeWindow::new(0.5, None).contains(9.0));
    }

    #[test]
    fn eps_must_decrease() {
        assert!(check_eps(&[0.1, 0.2]).is_err());
        assert!(check_eps(&[0.1]).is_err());
        assert!(check_eps(&[0.2, 0.1]).is_ok());
    }

    #[test]
    fn graph_gap_lookup() {
        let g = graph_gap(2.0, SymmetryClass::Symmetric, 0).unwrap();
        assert!((g.omega_b - 1.2310).abs() < 1e-4);
    }
}
