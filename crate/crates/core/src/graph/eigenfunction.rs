use serde::{Deserialize, Serialize};

use super::defect::reflection_root;
use super::dispersion::g_mu_value;
use super::GraphEigenvalue;
use crate::error::{Error, Result};
use crate::params::SymmetryClass;

/// Tolerance of the check `r(ω) = −g^μ(ω)`.
pub const CONSISTENCY_TOL: f64 = 1e-8;

/// Defect mode of the limit graph, normalised in the weighted `L²` norm.
///
/// Vertex `j` of the lower line sits at `(j, −L/2)` and carries `u_j = A r^{|j|}`.
/// The upper line is the mirror image (sign flipped for the antisymmetric class).
/// Horizontal edge `j` joins vertices `j` and `j+1` with local coordinate
/// `s ∈ [0, 1]`; rung `j` is parametrised by `y ∈ [−L/2, L/2]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraphEigenfunction {
    pub ev: GraphEigenvalue,
    pub r: f64,
    pub amplitude: f64,
}

/// Builds the eigenfunction for a root returned by `discrete_eigenvalues`.
pub fn build_eigenfunction(ev: &GraphEigenvalue) -> Result<GraphEigenfunction> {
    let r = reflection_root(ev.omega, ev.l, ev.class)?;
    let gmu = g_mu_value(ev.omega, ev.l, ev.mu, ev.class).to_f64();
    let mismatch = (r + gmu).abs();
    if !(mismatch <= CONSISTENCY_TOL) {
        return Err(Error::Consistency { mismatch });
    }
    let mut f = GraphEigenfunction {
        ev: *ev,
        r,
        amplitude: 1.0,
    };
    f.amplitude = 1.0 / f.norm_squared().sqrt();
    Ok(f)
}

impl GraphEigenfunction {
    fn omega(&self) -> f64 {
        self.ev.omega
    }

    fn weight(&self, j: i64) -> f64 {
        if j == 0 {
            self.ev.mu
        } else {
            1.0
        }
    }

    pub fn vertex_value(&self, j: i64) -> f64 {
        self.amplitude * self.r.powi(j.unsigned_abs() as i32)
    }

    /// Value on the lower horizontal edge `j` at `s ∈ [0, 1]`.
    pub fn horizontal(&self, j: i64, s: f64) -> f64 {
        let w = self.omega();
        let (a, b) = (self.vertex_value(j), self.vertex_value(j + 1));
        (a * (w * (1.0 - s)).sin() + b * (w * s).sin()) / w.sin()
    }

    pub fn horizontal_ds(&self, j: i64, s: f64) -> f64 {
        let w = self.omega();
        let (a, b) = (self.vertex_value(j), self.vertex_value(j + 1));
        w * (-a * (w * (1.0 - s)).cos() + b * (w * s).cos()) / w.sin()
    }

    pub fn horizontal_dss(&self, j: i64, s: f64) -> f64 {
        let w = self.omega();
        let (a, b) = (self.vertex_value(j), self.vertex_value(j + 1));
        -w * w * (a * (w * (1.0 - s)).sin() + b * (w * s).sin()) / w.sin()
    }

    /// Value on rung `j` at height `y ∈ [−L/2, L/2]`.
    pub fn vertical(&self, j: i64, y: f64) -> f64 {
        let (w, h) = (self.omega(), self.ev.l / 2.0);
        let u = self.vertex_value(j);
        match self.ev.class {
            SymmetryClass::Symmetric => u * (w * y).cos() / (w * h).cos(),
            SymmetryClass::Antisymmetric => -u * (w * y).sin() / (w * h).sin(),
        }
    }

    pub fn vertical_dy(&self, j: i64, y: f64) -> f64 {
        let (w, h) = (self.omega(), self.ev.l / 2.0);
        let u = self.vertex_value(j);
        match self.ev.class {
            SymmetryClass::Symmetric => -u * w * (w * y).sin() / (w * h).cos(),
            SymmetryClass::Antisymmetric => -u * w * (w * y).cos() / (w * h).sin(),
        }
    }

    pub fn vertical_dyy(&self, j: i64, y: f64) -> f64 {
        -self.omega() * self.omega() * self.vertical(j, y)
    }

    /// Weighted sum of outgoing derivatives at the lower vertex `j`.
    pub fn kirchhoff_residual(&self, j: i64) -> f64 {
        let h = self.ev.l / 2.0;
        self.horizontal_ds(j, 0.0) - self.horizontal_ds(j - 1, 1.0)
            + self.weight(j) * self.vertical_dy(j, -h)
    }

    /// Weighted `L²` norm squared over the whole graph, in closed form.
    pub fn norm_squared(&self) -> f64 {
        let (w, r, a) = (self.omega(), self.r, self.amplitude);
        let h = self.ev.l / 2.0;
        let s = w.sin();
        let i1 = 0.5 - (2.0 * w).sin() / (4.0 * w);
        let x = 0.5 * (s / w - w.cos());
        let geo = 1.0 - r * r;
        let horizontal = 4.0 * a * a * (i1 * (1.0 + r * r) + 2.0 * r * x) / (geo * s * s);
        let v = match self.ev.class {
            SymmetryClass::Symmetric => {
                (h + (w * self.ev.l).sin() / (2.0 * w)) / (w * h).cos().powi(2)
            }
            SymmetryClass::Antisymmetric => {
                (h - (w * self.ev.l).sin() / (2.0 * w)) / (w * h).sin().powi(2)
            }
        };
        let vertical = a * a * v * (self.ev.mu + 2.0 * r * r / geo);
        horizontal + vertical
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{discrete_eigenvalues, gaps};

    fn gauss_legendre_5(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
        const X: [f64; 5] = [
            -0.906_179_845_938_664,
            -0.538_469_310_105_683,
            0.0,
            0.538_469_310_105_683,
            0.906_179_845_938_664,
        ];
        const W: [f64; 5] = [
            0.236_926_885_056_189,
            0.478_628_670_499_366,
            0.568_888_888_888_889,
            0.478_628_670_499_366,
            0.236_926_885_056_189,
        ];
        let hp = (b - a) / panels as f64;
        (0..panels)
            .map(|p| {
                let (lo, hi) = (a + p as f64 * hp, a + (p + 1) as f64 * hp);
                let (m, r) = (0.5 * (lo + hi), 0.5 * (hi - lo));
                X.iter()
                    .zip(W)
                    .map(|(x, w)| w * r * f(m + r * x))
                    .sum::<f64>()
            })
            .sum()
    }

    fn modes() -> Vec<GraphEigenfunction> {
        let mut out = Vec::new();
        for class in SymmetryClass::BOTH {
            for gap in gaps(2.0, class, 7.0).unwrap() {
                for ev in discrete_eigenvalues(2.0, 0.25, class, &gap) {
                    out.push(build_eigenfunction(&ev).unwrap());
                }
            }
        }
        assert!(out.len() >= 4);
        out
    }

    #[test]
    fn normalised_against_quadrature() {
        for f in modes() {
            let h = f.ev.l / 2.0;
            let mut total = 0.0;
            for j in -60..60 {
                total += 2.0 * gauss_legendre_5(|s| f.horizontal(j, s).powi(2), 0.0, 1.0, 8);
                total += f.weight(j) * gauss_legendre_5(|y| f.vertical(j, y).powi(2), -h, h, 8);
            }
            assert!((total - 1.0).abs() < 1e-8, "ω = {}: {total}", f.ev.omega);
        }
    }

    #[test]
    fn kirchhoff_and_edge_equation() {
        for f in modes() {
            let w2 = f.ev.omega * f.ev.omega;
            for j in -20..=20 {
                assert!(
                    f.kirchhoff_residual(j).abs() < 1e-8,
                    "j = {j}: {}",
                    f.kirchhoff_residual(j)
                );
                assert!((f.vertex_value(j) - f.vertex_value(-j)).abs() < 1e-15);
                for s in [0.1, 0.5, 0.9] {
                    assert!((f.horizontal_dss(j, s) + w2 * f.horizontal(j, s)).abs() < 1e-12);
                }
                // continuity at the vertex
                assert!((f.horizontal(j, 0.0) - f.vertical(j, -f.ev.l / 2.0)).abs() < 1e-12);
            }
            assert!(f.r.abs() < 1.0);
            assert!((f.vertex_value(3) / f.vertex_value(2) - f.r).abs() < 1e-12);
        }
    }
}
