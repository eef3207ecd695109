use super::dispersion::{g_raw, g_value, phi_2, phi_l_raw};
use super::{ExtReal, Gap, GapType, GraphEigenvalue};
use crate::error::{Error, Result};
use crate::params::SymmetryClass;
use crate::roots::bisect_open;

/// Samples per gap when looking for the zeros `c` and `d`.
const ZERO_SCAN: usize = 4000;

fn domain_check(omega: f64, l: f64, class: SymmetryClass, what: &'static str) -> Result<f64> {
    let g = g_raw(omega, l, class);
    if g.abs() > 1.0 || g.is_infinite() {
        Ok(g)
    } else {
        Err(Error::Domain {
            what,
            omega,
            g_abs: g.abs(),
        })
    }
}

/// `P(ω) = φ_L(φ_L + φ_2)`, so that `F = 1 − √(1 − P)`.
fn product_p(omega: f64, l: f64, class: SymmetryClass) -> f64 {
    let p = phi_l_raw(omega, l, class);
    p * (p + phi_2(omega))
}

/// `F(ω) = 1 − √(1 − φ_L(φ_L + φ_2))`, defined where `|g(ω)| > 1`.
pub fn capital_f(omega: f64, l: f64, class: SymmetryClass) -> Result<f64> {
    domain_check(omega, l, class, "F")?;
    Ok(1.0 - (1.0 - product_p(omega, l, class)).sqrt())
}

/// `F(ω) = 1 − √((g² − 1)/(g + cos ω)²)`, the same function written through `g`.
pub fn capital_f_via_g(omega: f64, l: f64, class: SymmetryClass) -> Result<f64> {
    domain_check(omega, l, class, "F")?;
    match g_value(omega, l, class) {
        ExtReal::Finite(g) => {
            let den = g + omega.cos();
            Ok(1.0 - ((g * g - 1.0) / (den * den)).sqrt())
        }
        _ => Ok(0.0),
    }
}

/// In-disc root of `r² + 2g r + 1 = 0` for `|g| > 1`.
///
/// Written as `−sign(g)/(|g| + √(g²−1))` to avoid cancellation for large `|g|`.
pub fn reflection_root_from_g(g: f64) -> Result<f64> {
    if !(g.abs() > 1.0) {
        return Err(Error::Domain {
            what: "reflection root",
            omega: f64::NAN,
            g_abs: g.abs(),
        });
    }
    if g.is_infinite() {
        return Ok(0.0);
    }
    Ok(-g.signum() / (g.abs() + (g * g - 1.0).sqrt()))
}

/// Decay rate `r(ω) ∈ (−1, 1)` of gap eigenfunctions at frequency `ω`.
pub fn reflection_root(omega: f64, l: f64, class: SymmetryClass) -> Result<f64> {
    let g = domain_check(omega, l, class, "reflection root")?;
    reflection_root_from_g(g)
}

/// Zeros of `f` on the open interval found by a sign-change scan.
fn interior_zeros(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> Vec<f64> {
    let w = hi - lo;
    let xs: Vec<f64> = (1..ZERO_SCAN)
        .map(|i| lo + w * i as f64 / ZERO_SCAN as f64)
        .collect();
    let mut out = Vec::new();
    for pair in xs.windows(2) {
        let (a, b) = (f(pair[0]), f(pair[1]));
        if a == 0.0 {
            out.push(pair[0]);
        } else if a.signum() != b.signum() && b != 0.0 && a.is_finite() && b.is_finite() {
            out.push(bisect_open(&f, pair[0], pair[1], a, 0.0));
        }
    }
    out
}

/// Roots of `F(ω) = μ` inside `gap`, each a simple eigenvalue of the perturbed graph.
///
/// `F = μ` is rewritten as `P(ω) = μ(2 − μ)` with `P = φ_L(φ_L + φ_2)`.
/// The zeros `c` of `φ_L` and `d` of `φ_L + φ_2` split the gap into
/// monotone branches, and each branch is bisected once:
///
/// - type (i): one root on `(ω_b, min(c, d))`, one on `(max(c, d), ω_t)`
/// - type (ii): one root on `(d, ω_t)`
/// - type (iii): one root on `(ω_b, d)`
///
/// No roots exist for `μ ≥ 1`.
pub fn discrete_eigenvalues(
    l: f64,
    mu: f64,
    class: SymmetryClass,
    gap: &Gap,
) -> Vec<GraphEigenvalue> {
    if !(mu > 0.0 && mu < 1.0) {
        return Vec::new();
    }
    let target = mu * (2.0 - mu);
    let h = |w: f64| product_p(w, l, class) - target;
    let (b, t) = (gap.omega_b, gap.omega_t);

    let mut zeros = interior_zeros(|w| phi_l_raw(w, l, class), b, t);
    zeros.extend(interior_zeros(|w| phi_l_raw(w, l, class) + phi_2(w), b, t));
    let zmin = zeros.iter().copied().fold(f64::INFINITY, f64::min);
    let zmax = zeros.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    // (lo, hi, sign of P − target just right of lo)
    let mut branches = Vec::new();
    match gap.gap_type {
        GapType::I => {
            if zeros.is_empty() {
                return Vec::new();
            }
            branches.push((b, zmin, 1.0));
            branches.push((zmax, t, -1.0));
        }
        GapType::II => branches.push((if zeros.is_empty() { b } else { zmax }, t, -1.0)),
        GapType::III => branches.push((b, if zeros.is_empty() { t } else { zmin }, 1.0)),
    }

    let mut out = Vec::new();
    for (lo, hi, s) in branches {
        // Sample just inside each end to confirm the bracket before bisecting.
        let dl = (hi - lo) * 1e-9;
        let (vl, vh) = (h(lo + dl), h(hi - dl));
        if !(vl.signum() == s && vh.signum() == -s) {
            continue;
        }
        let omega = bisect_open(h, lo, hi, s, 0.0);
        out.push(GraphEigenvalue {
            omega,
            lambda: omega * omega,
            gap: *gap,
            mu,
            l,
            class,
            multiplicity: 1,
        });
    }
    out
}
