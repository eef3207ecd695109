//! Gap edges of the ladder approaching those of the graph as ε → 0.

use ladder_spectra::study::{band_edge_convergence, Resolution, SlopeWindow};
use ladder_spectra::{LengthSpec, SymmetryClass};

fn main() -> ladder_spectra::Result<()> {
    let s = band_edge_convergence(
        LengthSpec::integer(2),
        SymmetryClass::Symmetric,
        0,
        &[0.2, 0.1, 0.05],
        &Resolution::default(),
        SlopeWindow::new(0.8, Some(1.2)),
    )?;
    println!(
        "graph gap ({:.6}, {:.6})",
        s.graph_gap.omega_b, s.graph_gap.omega_t
    );
    for i in 0..s.eps.len() {
        println!(
            "ε = {:<5} FEM ({:.6}, {:.6})  errors {:.3e} {:.3e}",
            s.eps[i], s.fem_b[i], s.fem_t[i], s.err_b[i], s.err_t[i]
        );
    }
    println!(
        "slopes {:.3?} {:.3?}, pass {}",
        s.slope_b, s.slope_t, s.pass
    );
    Ok(())
}
