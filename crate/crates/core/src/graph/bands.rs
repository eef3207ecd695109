use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::dispersion::{
    f_minus, f_plus, is_in_spectrum, nearest_special_point, phi_l, special_points,
};
use super::{Band, ExtReal, Gap, GapType};
use crate::error::{Error, Result};
use crate::params::SymmetryClass;
use crate::roots::bisect_predicate;

/// Number of scan intervals on `[0, ω_max]` used for band-edge detection.
///
/// With `ω_max ≤ 20π` and `L ≤ 16` the step stays well below the width of
/// every gap of the first few dozen.
pub const DEFAULT_SCAN_DIVISIONS: usize = 20_000;

/// Band edges closer than this to a special point are snapped onto it.
const SNAP_TOL: f64 = 1e-9;

/// Bands of the class in `[0, omega_max]`, scanning with the default step.
pub fn essential_bands(l: f64, class: SymmetryClass, omega_max: f64) -> Vec<Band> {
    essential_bands_with_step(
        l,
        class,
        omega_max,
        omega_max / DEFAULT_SCAN_DIVISIONS as f64,
    )
}

/// Maximal closed intervals of `{ω : ω² ∈ σ_ess}` intersected with `[0, omega_max]`.
///
/// A fine scan of the membership test locates transitions, which are then
/// bisected well below `1e-10`. Special points are always part of the
/// spectrum; isolated ones become degenerate bands `[p, p]`.
pub fn essential_bands_with_step(
    l: f64,
    class: SymmetryClass,
    omega_max: f64,
    step: f64,
) -> Vec<Band> {
    assert!(omega_max > 0.0 && step > 0.0);
    let n = ((omega_max / step).ceil() as usize).max(2);
    let member = |w: f64| is_in_spectrum(w, l, class);
    let specials = special_points(l, class, omega_max);
    let snap = |w: f64| nearest_special_point(w, &specials, SNAP_TOL).unwrap_or(w);

    // bands hanging off a special point can be far narrower than the step,
    // so the special points are scan nodes too
    let mut grid: Vec<f64> = (1..=n).map(|i| omega_max * i as f64 / n as f64).collect();
    grid.extend(specials.iter().copied().filter(|&p| p > 0.0));
    grid.sort_by(f64::total_cmp);
    grid.dedup();

    let mut bands = Vec::new();
    let mut prev_w = 0.0;
    let mut prev_in = member(0.0);
    let mut open = prev_in.then_some(0.0);
    for w in grid {
        let now_in = member(w);
        if now_in != prev_in {
            let (lo, hi) = bisect_predicate(member, prev_w, w, prev_in, 0.0);
            if prev_in {
                let end = snap(lo);
                bands.push(Band {
                    omega_lo: open.take().unwrap(),
                    omega_hi: end,
                });
            } else {
                open = Some(snap(hi));
            }
        }
        prev_w = w;
        prev_in = now_in;
    }
    if let Some(start) = open {
        bands.push(Band {
            omega_lo: start,
            omega_hi: omega_max,
        });
    }

    for &p in &specials {
        if !bands.iter().any(|b| b.contains(p, SNAP_TOL)) {
            bands.push(Band {
                omega_lo: p,
                omega_hi: p,
            });
        }
    }
    bands.sort_by(|a, b| a.omega_lo.total_cmp(&b.omega_lo));

    let mut merged: Vec<Band> = Vec::with_capacity(bands.len());
    for b in bands {
        match merged.last_mut() {
            Some(last) if b.omega_lo <= last.omega_hi + 1e-13 => {
                last.omega_hi = last.omega_hi.max(b.omega_hi);
            }
            _ => merged.push(b),
        }
    }
    merged
}

/// Gaps of the class in `(0, omega_max)`, each tagged with its endpoint type.
///
/// A trailing interval that runs into `omega_max` has no known upper edge and
/// is not reported.
pub fn gaps(l: f64, class: SymmetryClass, omega_max: f64) -> Result<Vec<Gap>> {
    let bands = essential_bands(l, class, omega_max);
    gaps_from_bands(&bands, l, class)
}

pub fn gaps_from_bands(bands: &[Band], l: f64, class: SymmetryClass) -> Result<Vec<Gap>> {
    let mut out = Vec::new();
    let mut lower = 0.0;
    for b in bands {
        if b.omega_lo > lower {
            let gap_type = classify_gap(lower, b.omega_lo, l, class)?;
            out.push(Gap {
                omega_b: lower,
                omega_t: b.omega_lo,
                gap_type,
                class,
            });
        }
        lower = b.omega_hi;
    }
    Ok(out)
}

fn on_pi_multiple(w: f64) -> bool {
    let k = (w / PI).round();
    (w - k * PI).abs() <= SNAP_TOL
}

fn identity_holds(phi: ExtReal, target: f64) -> bool {
    match phi {
        ExtReal::Finite(p) => (p - target).abs() <= 1e-6 * (1.0 + target.abs()),
        _ => false,
    }
}

/// Endpoint type of the gap `(omega_b, omega_t)`.
///
/// - (i): `nπ < ω_b < ω_t < (n+1)π`, `φ_L(ω_b) = f⁺(ω_b)`, `φ_L(ω_t) = f⁻(ω_t)`
/// - (ii): `ω_b = nπ`, `φ_L(ω_b) ≤ 0`, `φ_L(ω_t) = f⁻(ω_t)`
/// - (iii): `ω_t = (n+1)π`, `φ_L(ω_b) = f⁺(ω_b)`, `φ_L(ω_t) ≥ 0`
pub fn classify_gap(omega_b: f64, omega_t: f64, l: f64, class: SymmetryClass) -> Result<GapType> {
    let fail = || Error::GapClassification { omega_b, omega_t };
    let b_on = on_pi_multiple(omega_b);
    let t_on = on_pi_multiple(omega_t);
    let n = if b_on {
        (omega_b / PI).round()
    } else {
        (omega_b / PI).floor()
    };
    if omega_t > (n + 1.0) * PI + SNAP_TOL || omega_t <= omega_b {
        return Err(fail());
    }
    let phi_b = phi_l(omega_b, l, class);
    let phi_t = phi_l(omega_t, l, class);
    let nonpos =
        |p: ExtReal| matches!(p, ExtReal::NegInfinity) || p.finite().is_some_and(|v| v <= 1e-9);
    let nonneg =
        |p: ExtReal| matches!(p, ExtReal::PosInfinity) || p.finite().is_some_and(|v| v >= -1e-9);
    match (b_on, t_on) {
        (false, false)
            if identity_holds(phi_b, f_plus(omega_b))
                && identity_holds(phi_t, f_minus(omega_t)) =>
        {
            Ok(GapType::I)
        }
        (true, false) if nonpos(phi_b) && identity_holds(phi_t, f_minus(omega_t)) => {
            Ok(GapType::II)
        }
        (false, true) if identity_holds(phi_b, f_plus(omega_b)) && nonneg(phi_t) => {
            Ok(GapType::III)
        }
        _ => Err(fail()),
    }
}

/// Result of checking that symmetric and antisymmetric bands cover `[0, ω_max]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverReport {
    pub l: f64,
    pub omega_max: f64,
    /// Uncovered open intervals, widest first.
    pub holes: Vec<(f64, f64)>,
    pub max_hole_width: f64,
}

impl CoverReport {
    pub fn covers(&self, tol: f64) -> bool {
        self.max_hole_width <= tol
    }
}

/// Uncovered parts of `[0, omega_max]` by the union of both classes' bands.
pub fn spectrum_cover_check(l: f64, omega_max: f64) -> CoverReport {
    let mut all: Vec<Band> = SymmetryClass::BOTH
        .iter()
        .flat_map(|&c| essential_bands(l, c, omega_max))
        .collect();
    all.sort_by(|a, b| a.omega_lo.total_cmp(&b.omega_lo));
    let mut holes = Vec::new();
    let mut reach = 0.0f64;
    for b in &all {
        if b.omega_lo > reach {
            holes.push((reach, b.omega_lo));
        }
        reach = reach.max(b.omega_hi);
    }
    if reach < omega_max {
        holes.push((reach, omega_max));
    }
    holes.sort_by(|a, b| (b.1 - b.0).total_cmp(&(a.1 - a.0)));
    let max_hole_width = holes.first().map_or(0.0, |h| h.1 - h.0);
    CoverReport {
        l,
        omega_max,
        holes,
        max_hole_width,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use SymmetryClass::*;

    #[test]
    fn first_symmetric_gap_for_l2() {
        let bands = essential_bands(2.0, Symmetric, PI);
        let b = (1.0f64 / 3.0).acos();
        let t = (-1.0f64 / 3.0).acos();
        assert_eq!(bands[0].omega_lo, 0.0);
        assert!((bands[0].omega_hi - b).abs() < 1e-10, "{bands:?}");
        assert!((bands[1].omega_lo - t).abs() < 1e-10);
        let g = gaps_from_bands(&bands, 2.0, Symmetric).unwrap();
        assert_eq!(g[0].gap_type, GapType::I);
        // φ_L(ω_b) = f⁺(ω_b) = 1/√2
        let p = phi_l(g[0].omega_b, 2.0, Symmetric).finite().unwrap();
        assert!((p - 0.5f64.sqrt()).abs() < 1e-8);
    }

    #[test]
    fn half_length_has_isolated_point_at_two_pi() {
        let bands = essential_bands(0.5, Symmetric, 3.0 * PI);
        let iso = bands
            .iter()
            .find(|b| (b.omega_lo - 2.0 * PI).abs() < 1e-9)
            .unwrap();
        assert_eq!(iso.omega_lo, iso.omega_hi);
        let g = gaps_from_bands(&bands, 0.5, Symmetric).unwrap();
        let left = g
            .iter()
            .find(|g| (g.omega_t - 2.0 * PI).abs() < 1e-9)
            .unwrap();
        let right = g
            .iter()
            .find(|g| (g.omega_b - 2.0 * PI).abs() < 1e-9)
            .unwrap();
        assert_eq!(left.gap_type, GapType::III);
        assert_eq!(right.gap_type, GapType::II);
    }

    #[test]
    fn antisymmetric_starts_with_a_gap() {
        let g = gaps(2.0, Antisymmetric, 2.0 * PI).unwrap();
        assert_eq!(g[0].omega_b, 0.0);
        assert_eq!(g[0].gap_type, GapType::II);
    }

    #[test]
    fn cover_for_l2() {
        let r = spectrum_cover_check(2.0, 10.0 * PI);
        assert!(r.covers(1e-8), "{:?}", r.holes);
    }
}
