//! Bands and gaps of the limit graph, plus the dispersion curves ω(θ).
//!
//! `cargo run --example graph_gaps -- 10pi/7`

use std::f64::consts::PI;

use ladder_spectra::graph::{bloch_curves, essential_bands, gaps};
use ladder_spectra::{LengthSpec, SymmetryClass};

fn main() -> ladder_spectra::Result<()> {
    let length: LengthSpec = std::env::args().nth(1).as_deref().unwrap_or("2").parse()?;
    let l = length.value();
    let omega_max = 4.0 * PI;
    for class in SymmetryClass::BOTH {
        println!("{class} class, L = {length}");
        for b in essential_bands(l, class, omega_max) {
            println!("  band [{:.6}, {:.6}]", b.omega_lo, b.omega_hi);
        }
        for g in gaps(l, class, omega_max)? {
            println!(
                "  gap  ({:.6}, {:.6}) type {}",
                g.omega_b, g.omega_t, g.gap_type
            );
        }
    }

    let thetas: Vec<f64> = (0..=8).map(|i| PI * i as f64 / 8.0).collect();
    let curves = bloch_curves(l, SymmetryClass::Symmetric, omega_max, &thetas);
    println!("\nθ/π    first three ω(θ), symmetric");
    for (t, r) in curves.thetas.iter().zip(&curves.roots) {
        let first: Vec<String> = r.iter().take(3).map(|w| format!("{w:.5}")).collect();
        println!("{:.3}  {}", t / PI, first.join("  "));
    }
    Ok(())
}
