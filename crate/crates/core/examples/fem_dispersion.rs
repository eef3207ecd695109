//! Bloch bands of the thin ladder from the 2-D cell problem.
//!
//! `cargo run --release --example fem_dispersion -- 0.1`

use ladder_spectra::fem::{fem_bloch_bands, theta_grid};
use ladder_spectra::graph::gaps;
use ladder_spectra::study::matching_fem_gap;
use ladder_spectra::{LadderParams, LengthSpec, SymmetryClass};

fn main() -> ladder_spectra::Result<()> {
    let eps: f64 = std::env::args()
        .nth(1)
        .map_or(0.1, |s| s.parse().expect("eps"));
    let p = LadderParams::new(LengthSpec::integer(2), eps, 1.0)?;
    for class in SymmetryClass::BOTH {
        let b = fem_bloch_bands(&p, class, 4, &theta_grid(9), eps / 4.0)?;
        println!("{class}: {} dofs, h = {}", b.n_dof, b.h);
        for (t, row) in b.thetas.iter().zip(&b.eigenvalues) {
            let w: Vec<String> = row
                .iter()
                .map(|l| format!("{:.5}", l.max(0.0).sqrt()))
                .collect();
            println!("  θ = {t:.4}  ω = {}", w.join("  "));
        }
        for g in &b.gaps {
            println!(
                "  FEM gap ({:.5}, {:.5}) at θ = ({:.3}, {:.3})",
                g.bottom.omega(),
                g.top.omega(),
                g.bottom.theta,
                g.top.theta
            );
        }
        // narrow gaps also open near ω = nπ; pair each graph gap with its nearest FEM gap
        for gg in gaps(2.0, class, 5.0)? {
            let near = matching_fem_gap(&b, &gg).filter(|g| {
                (g.bottom.omega() - gg.omega_b).abs() + (g.top.omega() - gg.omega_t).abs()
                    < gg.width()
            });
            if let Some(g) = near {
                println!(
                    "  graph gap ({:.5}, {:.5}) ↔ FEM ({:.5}, {:.5})",
                    gg.omega_b,
                    gg.omega_t,
                    g.bottom.omega(),
                    g.top.omega()
                );
            }
        }
    }
    Ok(())
}
