//! Eigenvalues created in the gaps by a thinner (μ < 1) central rung.

use ladder_spectra::graph::{build_eigenfunction, discrete_eigenvalues, gaps};
use ladder_spectra::SymmetryClass;

fn main() -> ladder_spectra::Result<()> {
    let l = 2.0;
    for class in SymmetryClass::BOTH {
        let gs = gaps(l, class, 12.0)?;
        for mu in [0.1, 0.25, 0.5, 0.9, 1.0, 1.5] {
            let mut line = format!("{class:>7} μ={mu:<4}");
            for g in &gs {
                let evs = discrete_eigenvalues(l, mu, class, g);
                line += &format!(
                    " | gap {} ({:.3},{:.3}): {}",
                    g.gap_type,
                    g.omega_b,
                    g.omega_t,
                    evs.len()
                );
            }
            println!("{line}");
        }
    }

    // decay of the first trapped mode
    let gap = gaps(l, SymmetryClass::Symmetric, 4.0)?[0];
    for ev in discrete_eigenvalues(l, 0.25, SymmetryClass::Symmetric, &gap) {
        let u = build_eigenfunction(&ev)?;
        let vertex: Vec<String> = (0..5)
            .map(|j| format!("{:+.4}", u.vertex_value(j)))
            .collect();
        println!(
            "ω = {:.8}  r = {:+.5}  ‖u‖² = {:.4}  u(j) = {}",
            ev.omega,
            u.r,
            u.norm_squared(),
            vertex.join(" ")
        );
    }
    Ok(())
}
