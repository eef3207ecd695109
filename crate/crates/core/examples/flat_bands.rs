//! Eigenvalues of infinite multiplicity for rational rung lengths.

use ladder_spectra::graph::flat_bands;
use ladder_spectra::{LengthSpec, SymmetryClass};

fn main() {
    for length in [
        LengthSpec::rational(1, 2),
        LengthSpec::integer(3),
        LengthSpec::rational(3, 4),
        LengthSpec::integer(2),
        LengthSpec::pi_multiple(10, 7),
    ] {
        for class in SymmetryClass::BOTH {
            let f = flat_bands(&length, class, 30.0);
            let w: Vec<String> = f.omegas.iter().map(|w| format!("{w:.4}")).collect();
            let note = if f.verified_by_theory {
                ""
            } else {
                " (unverified)"
            };
            println!(
                "L = {length:<8} {class:>7}: in Q_c {}, ω = [{}]{note}",
                f.in_qc,
                w.join(", ")
            );
        }
    }
}
