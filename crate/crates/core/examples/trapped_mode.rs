//! Modes trapped by a thinner central rung, computed on a supercell.
//!
//! The second part pushes ε to 0.3 to see how long the modes survive.

use ladder_spectra::fem::{fem_bloch_bands, gap_window, localized_modes, theta_grid};
use ladder_spectra::graph::{discrete_eigenvalues, gaps};
use ladder_spectra::{LadderParams, LengthSpec, SymmetryClass};

fn main() -> ladder_spectra::Result<()> {
    let class = SymmetryClass::Symmetric;
    let gap = gaps(2.0, class, 4.0)?[0];
    let graph: Vec<f64> = discrete_eigenvalues(2.0, 0.25, class, &gap)
        .iter()
        .map(|e| e.omega)
        .collect();
    println!("graph roots ω = {graph:.6?}");

    for eps in [0.3, 0.25, 0.2, 0.1, 0.05] {
        let p = LadderParams::new(LengthSpec::integer(2), eps, 0.25)?;
        let bands = fem_bloch_bands(&p, class, 3, &theta_grid(9), eps / 4.0)?;
        let Some(g) = bands.gaps.first() else {
            println!("ε = {eps}: no FEM gap");
            continue;
        };
        let r = localized_modes(&p, class, gap_window(g, 1e-3), 10, eps / 4.0)?;
        println!(
            "ε = {eps}: gap ω ∈ ({:.5}, {:.5}), {} trapped modes",
            g.bottom.omega(),
            g.top.omega(),
            r.modes.len()
        );
        for m in &r.modes {
            println!(
                "   ω = {:.6}  central share {:.3}  r² = {:.4?} (graph {:.4?})",
                m.omega, m.central_fraction, m.decay_ratio_sq, m.graph_r_sq
            );
        }
    }
    Ok(())
}
