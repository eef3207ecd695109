//! Symmetric and antisymmetric bands together leave no gap.

use std::f64::consts::PI;

use ladder_spectra::graph::spectrum_cover_check;

fn main() {
    for l in [0.5, 2.0, 8.0, 10.0 * PI / 7.0] {
        let r = spectrum_cover_check(l, 10.0 * PI);
        println!(
            "L = {l:.4}: {} holes, widest {:.2e}, covers: {}",
            r.holes.len(),
            r.max_hole_width,
            r.covers(1e-8)
        );
    }
}
