use std::f64::consts::PI;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::params::{odd_numerator_witness, LengthSpec, SymmetryClass};

/// Eigenvalues of infinite multiplicity of the unperturbed graph operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlatBandSet {
    /// `L` is an irreducible fraction with odd numerator.
    pub in_qc: bool,
    pub witness: Option<(i64, i64)>,
    pub omegas: Vec<f64>,
    /// False for the antisymmetric class, whose condition is our own analogue.
    pub verified_by_theory: bool,
}

/// Flat-band frequencies `≤ omega_max`.
///
/// Symmetric class: `sin ω = cos(ωL/2) = 0`, which for `L = p/q` with `p`
/// odd gives `ω = q(2j+1)π`. Antisymmetric class: `sin ω = sin(ωL/2) = 0`,
/// i.e. `ω = nπ` with `n` a positive multiple of `2q/gcd(p, 2q)`.
/// Irrational lengths have none.
pub fn flat_bands(length: &LengthSpec, class: SymmetryClass, omega_max: f64) -> FlatBandSet {
    let witness = length.as_rational().and_then(odd_numerator_witness);
    let mut set = FlatBandSet {
        in_qc: witness.is_some(),
        witness,
        omegas: Vec::new(),
        verified_by_theory: class == SymmetryClass::Symmetric,
    };
    let Some(ratio) = length.as_rational() else {
        return set;
    };
    let (p, q) = (*ratio.numer(), *ratio.denom());
    let (first, step) = match class {
        SymmetryClass::Symmetric => {
            if witness.is_none() {
                return set;
            }
            (q, 2 * q)
        }
        SymmetryClass::Antisymmetric => {
            let n0 = 2 * q / p.gcd(&(2 * q));
            (n0, n0)
        }
    };
    let mut n = first;
    while n as f64 * PI <= omega_max {
        set.omegas.push(n as f64 * PI);
        n += step;
    }
    set
}

#[cfg(test)]
mod tests {
    use super::*;
    use SymmetryClass::*;

    #[test]
    fn half_length() {
        let s = flat_bands(&LengthSpec::rational(1, 2), Symmetric, 15.0 * PI);
        assert!(s.in_qc);
        assert_eq!(s.witness, Some((1, 2)));
        assert_eq!(s.omegas.len(), 4);
        assert!((s.omegas[0] - 2.0 * PI).abs() < 1e-15);
        assert!((s.omegas[1] - 6.0 * PI).abs() < 1e-14);
    }

    #[test]
    fn even_numerator_and_irrational() {
        assert!(flat_bands(&LengthSpec::integer(8), Symmetric, 100.0)
            .omegas
            .is_empty());
        assert!(!flat_bands(&LengthSpec::integer(8), Symmetric, 100.0).in_qc);
        let s = flat_bands(&LengthSpec::pi_multiple(10, 7), Symmetric, 100.0);
        assert!(!s.in_qc && s.omegas.is_empty());
        assert!(
            flat_bands(&LengthSpec::pi_multiple(10, 7), Antisymmetric, 100.0)
                .omegas
                .is_empty()
        );
    }

    #[test]
    fn conditions_hold() {
        for (p, q) in [(1, 2), (3, 1), (5, 4), (2, 3)] {
            let l = p as f64 / q as f64;
            for class in SymmetryClass::BOTH {
                for w in flat_bands(&LengthSpec::rational(p, q), class, 40.0 * PI).omegas {
                    assert!(w.sin().abs() < 1e-12);
                    let v = match class {
                        Symmetric => (w * l / 2.0).cos(),
                        Antisymmetric => (w * l / 2.0).sin(),
                    };
                    assert!(v.abs() < 1e-12, "{p}/{q} {class} {w}");
                }
            }
        }
    }
}
