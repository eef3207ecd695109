//! Graph eigenfunctions lifted to the ladder as approximate eigenfunctions.

use ladder_spectra::fem::quasimode_residual_report;
use ladder_spectra::graph::{discrete_eigenvalues, gaps};
use ladder_spectra::roots::loglog_slope;
use ladder_spectra::{LadderParams, LengthSpec, SymmetryClass};

fn main() -> ladder_spectra::Result<()> {
    let class = SymmetryClass::Symmetric;
    let gap = gaps(2.0, class, 4.0)?[0];
    let eps = [0.2, 0.1, 0.05];
    for ev in discrete_eigenvalues(2.0, 0.25, class, &gap) {
        let mut dual = Vec::new();
        for &e in &eps {
            let p = LadderParams::new(LengthSpec::integer(2), e, 0.25)?;
            let r = quasimode_residual_report(&p, class, &ev, e / 4.0)?;
            println!(
                "λ = {:.5} ε = {e}: dual {:.4e}  M⁻¹ {:.4e}  ({} cells)",
                ev.lambda, r.ratio_dual, r.ratio_m_inv, r.n_cells
            );
            dual.push(r.ratio_dual);
        }
        println!("   exponent {:.3?}", loglog_slope(&eps, &dual));
    }
    Ok(())
}
