use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use super::ExtReal;
use crate::params::SymmetryClass;
use crate::roots::bisect_open;

/// Relative tolerance for deciding that an angle sits on a pole or zero.
const ANGLE_TOL: f64 = 1e-12;

fn near_multiple_of_pi(x: f64) -> bool {
    let k = (x / PI).round();
    (x - k * PI).abs() <= ANGLE_TOL * (1.0 + x.abs())
}

fn near_odd_multiple_of_half_pi(x: f64) -> bool {
    near_multiple_of_pi(x - FRAC_PI_2)
}

/// Maps any quasimomentum onto `[0, π]` using evenness and `2π`-periodicity.
pub fn reduce_theta(theta: f64) -> f64 {
    let t = theta.rem_euclid(2.0 * PI);
    if t > PI {
        2.0 * PI - t
    } else {
        t
    }
}

/// `φ_L(ω)`: `2/tan(ωL/2)` (symmetric) or `−2 tan(ωL/2)` (antisymmetric).
pub fn phi_l(omega: f64, l: f64, class: SymmetryClass) -> ExtReal {
    let x = omega * l / 2.0;
    let (pole, zero) = match class {
        SymmetryClass::Symmetric => (near_multiple_of_pi(x), near_odd_multiple_of_half_pi(x)),
        SymmetryClass::Antisymmetric => (near_odd_multiple_of_half_pi(x), near_multiple_of_pi(x)),
    };
    if zero {
        return ExtReal::Finite(0.0);
    }
    let v = phi_l_raw(omega, l, class);
    if pole || !v.is_finite() {
        ExtReal::infinity_with_sign(v)
    } else {
        ExtReal::Finite(v)
    }
}

/// Plain floating-point `φ_L` without pole handling.
pub fn phi_l_raw(omega: f64, l: f64, class: SymmetryClass) -> f64 {
    let x = omega * l / 2.0;
    match class {
        SymmetryClass::Symmetric => 2.0 * x.cos() / x.sin(),
        SymmetryClass::Antisymmetric => -2.0 * x.tan(),
    }
}

/// `φ_2(ω) = 2/tan ω`.
pub fn phi_2(omega: f64) -> f64 {
    2.0 * omega.cos() / omega.sin()
}

/// `π`-periodic extension of `tan(ω/2)` on `[0, π)`.
pub fn f_plus(omega: f64) -> f64 {
    (omega.rem_euclid(PI) / 2.0).tan()
}

/// `π`-periodic extension of `−1/tan(ω/2)` on `[0, π)`.
pub fn f_minus(omega: f64) -> f64 {
    -1.0 / (omega.rem_euclid(PI) / 2.0).tan()
}

/// `g^μ(ω) = −cos ω + μ sin ω / φ_L(ω)`.
///
/// Infinite where `φ_L` vanishes and `sin ω ≠ 0`. At points where both
/// vanish (flat-band frequencies) the value `−cos ω` is returned.
pub fn g_mu_value(omega: f64, l: f64, mu: f64, class: SymmetryClass) -> ExtReal {
    let c = omega.cos();
    match phi_l(omega, l, class) {
        ExtReal::Finite(0.0) => {
            if near_multiple_of_pi(omega) {
                ExtReal::Finite(-c)
            } else {
                ExtReal::infinity_with_sign(mu * omega.sin())
            }
        }
        ExtReal::Finite(p) => ExtReal::Finite(-c + mu * omega.sin() / p),
        _ => ExtReal::Finite(-c),
    }
}

/// `g(ω) = g^1(ω)`.
pub fn g_value(omega: f64, l: f64, class: SymmetryClass) -> ExtReal {
    g_mu_value(omega, l, 1.0, class)
}

/// Fast `g` for scanning: `−cos ω + ½ sin ω tan(ωL/2)` or `−cos ω − ½ sin ω cot(ωL/2)`.
pub fn g_raw(omega: f64, l: f64, class: SymmetryClass) -> f64 {
    let x = omega * l / 2.0;
    match class {
        SymmetryClass::Symmetric => -omega.cos() + 0.5 * omega.sin() * x.tan(),
        SymmetryClass::Antisymmetric => -omega.cos() - 0.5 * omega.sin() * x.cos() / x.sin(),
    }
}

/// Left minus right side of the cell dispersion relation.
///
/// - symmetric: `2 cos(ωL/2)(cos ω − cos θ) − sin ω sin(ωL/2)`
/// - antisymmetric: `2 sin(ωL/2)(cos ω − cos θ) + sin ω cos(ωL/2)`
///
/// # Panics
/// If `theta` is outside `[0, π]`; use [`reduce_theta`] first.
pub fn dispersion_residual(theta: f64, omega: f64, l: f64, class: SymmetryClass) -> f64 {
    assert!(
        (0.0..=PI).contains(&theta),
        "quasimomentum {theta} outside [0, π]; reduce it first"
    );
    let x = omega * l / 2.0;
    let dc = omega.cos() - theta.cos();
    match class {
        SymmetryClass::Symmetric => 2.0 * x.cos() * dc - omega.sin() * x.sin(),
        SymmetryClass::Antisymmetric => 2.0 * x.sin() * dc + omega.sin() * x.cos(),
    }
}

/// Searches `θ ∈ [0, π]` with a vanishing dispersion residual at fixed `ω`.
///
/// The residual is monotone in `cos θ`, so a root exists iff the residual
/// changes sign between `θ = 0` and `θ = π`. Returns the certified root if
/// bisection drives `|residual|` below `tol`.
pub fn theta_root_certificate(omega: f64, l: f64, class: SymmetryClass, tol: f64) -> Option<f64> {
    if class == SymmetryClass::Antisymmetric && omega == 0.0 {
        return None;
    }
    let r = |t: f64| dispersion_residual(t, omega, l, class);
    let (r0, rpi) = (r(0.0), r(PI));
    if r0.abs() <= tol {
        return Some(0.0);
    }
    if rpi.abs() <= tol {
        return Some(PI);
    }
    if r0.signum() == rpi.signum() {
        return None;
    }
    let t = bisect_open(r, 0.0, PI, r0, 0.0);
    (r(t).abs() <= tol).then_some(t)
}

/// Frequencies in `[0, omega_max]` that always belong to the spectrum of the class.
///
/// Symmetric: `nπ` and `2πn/L` for `n ≥ 0`. Antisymmetric: `nπ` for `n ≥ 1`
/// and `(2n+1)π/L` for `n ≥ 0`.
pub fn special_points(l: f64, class: SymmetryClass, omega_max: f64) -> Vec<f64> {
    let mut pts = Vec::new();
    let start = match class {
        SymmetryClass::Symmetric => 0,
        SymmetryClass::Antisymmetric => 1,
    };
    let mut n = start;
    while (n as f64) * PI <= omega_max * (1.0 + 1e-15) {
        pts.push(n as f64 * PI);
        n += 1;
    }
    let mut n = 0u64;
    loop {
        let w = match class {
            SymmetryClass::Symmetric => 2.0 * PI * n as f64 / l,
            SymmetryClass::Antisymmetric => (2 * n + 1) as f64 * PI / l,
        };
        if w > omega_max * (1.0 + 1e-15) {
            break;
        }
        pts.push(w);
        n += 1;
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * (1.0 + a.abs()));
    pts
}

pub(crate) fn nearest_special_point(omega: f64, specials: &[f64], tol: f64) -> Option<f64> {
    let idx = specials.partition_point(|&p| p < omega);
    [idx.checked_sub(1), Some(idx)]
        .into_iter()
        .flatten()
        .filter_map(|i| specials.get(i).copied())
        .filter(|p| (p - omega).abs() <= tol)
        .min_by(|a, b| (a - omega).abs().total_cmp(&(b - omega).abs()))
}

/// Membership of `ω²` in the essential spectrum of the class.
///
/// Special points are always members; elsewhere the test is `|g(ω)| ≤ 1`.
pub fn is_in_spectrum(omega: f64, l: f64, class: SymmetryClass) -> bool {
    if omega < 0.0 {
        return false;
    }
    if class == SymmetryClass::Antisymmetric && omega == 0.0 {
        return false;
    }
    if is_special(omega, l, class) {
        return true;
    }
    g_raw(omega, l, class).abs() <= 1.0
}

fn is_special(omega: f64, l: f64, class: SymmetryClass) -> bool {
    let x = omega * l / 2.0;
    let on_pi =
        near_multiple_of_pi(omega) && !(class == SymmetryClass::Antisymmetric && omega < 1.0);
    let on_l = match class {
        SymmetryClass::Symmetric => near_multiple_of_pi(x),
        SymmetryClass::Antisymmetric => near_odd_multiple_of_half_pi(x),
    };
    on_pi || on_l
}

/// Bracket that the ω-scan could not resolve: the residual approaches zero
/// without changing sign, so two roots may hide between samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnresolvedBracket {
    pub theta: f64,
    pub omega_lo: f64,
    pub omega_hi: f64,
}

/// Dispersion curves of the graph cell operator: all `ω` roots per `θ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlochCurves {
    pub thetas: Vec<f64>,
    pub roots: Vec<Vec<f64>>,
    pub unresolved: Vec<UnresolvedBracket>,
}

pub fn bloch_curves(
    l: f64,
    class: SymmetryClass,
    omega_max: f64,
    theta_grid: &[f64],
) -> BlochCurves {
    bloch_curves_with_step(
        l,
        class,
        omega_max,
        theta_grid,
        omega_max / super::DEFAULT_SCAN_DIVISIONS as f64,
    )
}

pub fn bloch_curves_with_step(
    l: f64,
    class: SymmetryClass,
    omega_max: f64,
    theta_grid: &[f64],
    step: f64,
) -> BlochCurves {
    let n = ((omega_max / step).ceil() as usize).max(2);
    let grid: Vec<f64> = (0..=n).map(|i| omega_max * i as f64 / n as f64).collect();
    let specials = special_points(l, class, omega_max);
    let mut roots = Vec::with_capacity(theta_grid.len());
    let mut unresolved = Vec::new();
    for &theta in theta_grid {
        let d = |w: f64| dispersion_residual(theta, w, l, class);
        let vals: Vec<f64> = grid.iter().map(|&w| d(w)).collect();
        let mut found: Vec<f64> = Vec::new();
        for i in 1..grid.len() {
            let (a, b) = (vals[i - 1], vals[i]);
            if a == 0.0 {
                found.push(grid[i - 1]);
            } else if a.signum() != b.signum() && b != 0.0 {
                found.push(bisect_open(d, grid[i - 1], grid[i], a, 0.0));
            }
        }
        if *vals.last().unwrap() == 0.0 {
            found.push(omega_max);
        }
        // Roots at special points may be tangential; accept them by evaluation.
        for &p in &specials {
            if d(p).abs() <= 3e-10 {
                found.push(p);
            }
        }
        if class == SymmetryClass::Antisymmetric {
            found.retain(|&w| w > 1e-9);
        }
        found.sort_by(f64::total_cmp);
        found.dedup_by(|a, b| (*a - *b).abs() <= 1e-9);
        // Parabolic test for pairs of roots hidden between samples.
        for i in 1..grid.len() - 1 {
            let (a, m, b) = (vals[i - 1], vals[i], vals[i + 1]);
            if m == 0.0 || a.signum() != m.signum() || b.signum() != m.signum() {
                continue;
            }
            if m.abs() > a.abs() || m.abs() > b.abs() {
                continue;
            }
            let curv = a - 2.0 * m + b;
            if curv == 0.0 {
                continue;
            }
            let vertex = m - (b - a) * (b - a) / (8.0 * curv);
            if vertex.signum() != m.signum() {
                let (lo, hi) = (grid[i - 1], grid[i + 1]);
                if !found.iter().any(|&w| w >= lo - 1e-9 && w <= hi + 1e-9) {
                    unresolved.push(UnresolvedBracket {
                        theta,
                        omega_lo: lo,
                        omega_hi: hi,
                    });
                }
            }
        }
        roots.push(found);
    }
    BlochCurves {
        thetas: theta_grid.to_vec(),
        roots,
        unresolved,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use SymmetryClass::*;

    #[test]
    fn phi_markers() {
        assert!(phi_l(PI, 2.0, Symmetric).is_infinite());
        assert_eq!(phi_l(FRAC_PI_2, 2.0, Symmetric), ExtReal::Finite(0.0));
        // direct evaluation: 2/tan(1)
        let v = phi_l(1.0, 2.0, Symmetric).finite().unwrap();
        assert!((v - 2.0 / 1f64.tan()).abs() < 1e-15);
        assert!((v - 1.284_185_4).abs() < 1e-6);
        assert!(phi_l(FRAC_PI_2, 2.0, Antisymmetric).is_infinite());
        assert_eq!(phi_l(PI, 2.0, Antisymmetric), ExtReal::Finite(0.0));
    }

    #[test]
    fn g_markers_and_values() {
        assert!(g_value(FRAC_PI_2, 2.0, Symmetric).is_infinite());
        assert_eq!(g_mu_value(PI, 2.0, 0.25, Symmetric), ExtReal::Finite(1.0));
        let ga = g_value(1.0, 2.0, Antisymmetric).finite().unwrap();
        let direct = -(1f64.cos()) - 1f64.sin() / (2.0 * 1f64.tan());
        assert!((ga - direct).abs() < 1e-14);
        assert!((ga + 0.8105).abs() < 1e-3);
        for w in [0.3, 1.0, 2.2, 4.0] {
            for c in SymmetryClass::BOTH {
                assert_eq!(g_mu_value(w, 2.0, 1.0, c), g_value(w, 2.0, c));
                let g = g_value(w, 2.0, c).finite().unwrap();
                assert!((g - g_raw(w, 2.0, c)).abs() < 1e-12 * (1.0 + g.abs()));
            }
        }
    }

    #[test]
    fn residual_examples() {
        assert_eq!(dispersion_residual(0.0, 0.0, 2.0, Symmetric), 0.0);
        assert!(dispersion_residual(PI, PI, 2.0, Symmetric).abs() < 1e-15);
        let v = dispersion_residual(FRAC_PI_2, 1.0, 2.0, Symmetric);
        let direct = 2.0 * 1f64.cos().powi(2) - 1f64.sin().powi(2);
        assert!((v - direct).abs() < 1e-15);
        assert!((v + 0.124_2).abs() < 1e-4);
    }

    #[test]
    #[should_panic]
    fn residual_rejects_negative_theta() {
        dispersion_residual(-0.1, 1.0, 2.0, Symmetric);
    }

    #[test]
    fn theta_reduction() {
        assert!((reduce_theta(-0.3) - 0.3).abs() < 1e-15);
        assert!((reduce_theta(2.0 * PI - 0.3) - 0.3).abs() < 1e-12);
        assert_eq!(reduce_theta(PI), PI);
    }

    #[test]
    fn curves_contain_special_roots() {
        // ω = π solves the relation at θ = π (cos θ = cos ω), not at θ = 0
        let c = bloch_curves(2.0, Symmetric, 2.0 * PI, &[0.0, PI]);
        let r = &c.roots[0];
        assert!(r.iter().any(|&w| w.abs() < 1e-9), "{r:?}");
        assert!(r.iter().any(|&w| (w - 2.0 * PI).abs() < 1e-9), "{r:?}");
        assert!(!r.iter().any(|&w| (w - PI).abs() < 1e-6), "{r:?}");
        assert!(c.roots[1].iter().any(|&w| (w - PI).abs() < 1e-9));
        let c = bloch_curves(2.0, Symmetric, PI, &[FRAC_PI_2]);
        assert!(c.roots[0][0] > 0.0 && c.roots[0][0] < (1.0f64 / 3.0).acos());
        for t in [0.0, 0.7, PI] {
            let c = bloch_curves(2.0, Antisymmetric, 3.0 * PI, &[t]);
            assert!(c.roots[0].iter().all(|&w| w > 0.0));
        }
    }

    #[test]
    fn special_point_lists() {
        let s = special_points(2.0, Symmetric, 2.0 * PI);
        assert_eq!(s.len(), 3);
        let a = special_points(2.0, Antisymmetric, 2.0 * PI);
        // π, 2π and π/2, 3π/2
        assert_eq!(a.len(), 4);
        assert!(a.iter().all(|&w| w > 0.0));
    }
}
