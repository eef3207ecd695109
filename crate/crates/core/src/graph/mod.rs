//! Closed-form spectral theory of the limit quantum graph.
//!
//! The ladder collapses, as its thickness goes to zero, onto a periodic graph
//! made of two horizontal lines at `y = ±L/2` joined by vertical rungs of
//! length `L` at every integer abscissa. The Laplacian on that graph with
//! weighted Kirchhoff conditions splits into a symmetric and an
//! antisymmetric part (parity in `y`); both are handled by the same code
//! through the class-dependent function `φ_L`:
//!
//! - symmetric: `φ_L(ω) = 2 / tan(ωL/2)`
//! - antisymmetric: `φ_L(ω) = −2 tan(ωL/2)`
//!
//! so that `g(ω) = −cos ω + sin ω / φ_L(ω)` and `ω² ∈ σ_ess ⇔ |g(ω)| ≤ 1`
//! away from the special points.

mod bands;
mod defect;
mod dispersion;
mod eigenfunction;
mod flat;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::params::SymmetryClass;

pub use bands::{
    classify_gap, essential_bands, essential_bands_with_step, gaps, gaps_from_bands,
    spectrum_cover_check, CoverReport, DEFAULT_SCAN_DIVISIONS,
};
pub use defect::{
    capital_f, capital_f_via_g, discrete_eigenvalues, reflection_root, reflection_root_from_g,
};
pub use dispersion::{
    bloch_curves, bloch_curves_with_step, dispersion_residual, f_minus, f_plus, g_mu_value, g_raw,
    g_value, is_in_spectrum, phi_2, phi_l, phi_l_raw, reduce_theta, special_points,
    theta_root_certificate, BlochCurves, UnresolvedBracket,
};
pub use eigenfunction::{build_eigenfunction, GraphEigenfunction};
pub use flat::{flat_bands, FlatBandSet};

/// Real number extended with signed infinities, used at poles of `φ_L` and `g`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtReal {
    Finite(f64),
    PosInfinity,
    NegInfinity,
}

impl ExtReal {
    pub fn finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        !matches!(self, ExtReal::Finite(_))
    }

    /// Conversion to `f64`, mapping the markers to `±∞`.
    pub fn to_f64(self) -> f64 {
        match self {
            ExtReal::Finite(v) => v,
            ExtReal::PosInfinity => f64::INFINITY,
            ExtReal::NegInfinity => f64::NEG_INFINITY,
        }
    }

    pub(crate) fn infinity_with_sign(sign: f64) -> Self {
        if sign < 0.0 {
            ExtReal::NegInfinity
        } else {
            ExtReal::PosInfinity
        }
    }
}

/// Closed interval of the essential spectrum, in the frequency variable `ω`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub omega_lo: f64,
    pub omega_hi: f64,
}

impl Band {
    pub fn lambda_lo(&self) -> f64 {
        self.omega_lo * self.omega_lo
    }

    pub fn lambda_hi(&self) -> f64 {
        self.omega_hi * self.omega_hi
    }

    pub fn contains(&self, omega: f64, tol: f64) -> bool {
        omega >= self.omega_lo - tol && omega <= self.omega_hi + tol
    }

    pub fn width(&self) -> f64 {
        self.omega_hi - self.omega_lo
    }
}

/// Endpoint type of a gap.
///
/// - `I`: both ends strictly inside `(nπ, (n+1)π)`.
/// - `II`: lower end at `nπ`.
/// - `III`: upper end at `(n+1)π`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GapType {
    I,
    II,
    III,
}

impl GapType {
    pub fn as_str(self) -> &'static str {
        match self {
            GapType::I => "i",
            GapType::II => "ii",
            GapType::III => "iii",
        }
    }
}

impl fmt::Display for GapType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Open gap `(ω_b, ω_t)` of one symmetry class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gap {
    pub omega_b: f64,
    pub omega_t: f64,
    pub gap_type: GapType,
    pub class: SymmetryClass,
}

impl Gap {
    pub fn lambda_b(&self) -> f64 {
        self.omega_b * self.omega_b
    }

    pub fn lambda_t(&self) -> f64 {
        self.omega_t * self.omega_t
    }

    pub fn contains(&self, omega: f64) -> bool {
        omega > self.omega_b && omega < self.omega_t
    }

    pub fn width(&self) -> f64 {
        self.omega_t - self.omega_b
    }
}

/// Simple eigenvalue `λ = ω²` of the perturbed graph operator inside a gap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraphEigenvalue {
    pub omega: f64,
    pub lambda: f64,
    pub gap: Gap,
    pub mu: f64,
    pub l: f64,
    pub class: SymmetryClass,
    pub multiplicity: u32,
}
