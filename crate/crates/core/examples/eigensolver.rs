//! The shift-invert solver on a 1-D Laplacian with known spectrum.

use std::f64::consts::PI;

use ladder_spectra::eigensolve::{eig_sparse_shift_invert, TripletBuilder};

fn main() -> ladder_spectra::Result<()> {
    // Neumann Laplacian on [0, 1], P1 elements
    let n = 2000;
    let h = 1.0 / n as f64;
    let mut k = TripletBuilder::new(n + 1);
    let mut m = TripletBuilder::new(n + 1);
    for e in 0..n {
        for (a, b) in [(e, e), (e + 1, e + 1), (e, e + 1), (e + 1, e)] {
            let diag = a == b;
            k.add(a, b, if diag { 1.0 / h } else { -1.0 / h });
            m.add(a, b, if diag { h / 3.0 } else { h / 6.0 });
        }
    }
    let sigma = 400.0;
    let r = eig_sparse_shift_invert(&k.build(), &m.build(), sigma, 5, 1e-10)?;
    println!("{} Lanczos steps, shift {}", r.iterations, r.sigma);
    for (v, be) in r.values.iter().zip(&r.backward_errors) {
        let j = (v.sqrt() / PI).round();
        let exact = (j * PI).powi(2);
        println!("λ = {v:.8}  exact {exact:.8}  backward error {be:.1e}");
    }
    Ok(())
}
