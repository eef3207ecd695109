//! Brute-force 1-D FEM on the truncated graph against the closed-form defect roots.

use ladder_spectra::graph::{discrete_eigenvalues, gaps};
use ladder_spectra::oracle::{discretize_graph, oracle_gap_eigenvalues, richardson_order};
use ladder_spectra::roots::loglog_slope;
use ladder_spectra::{LadderParams, LengthSpec, SymmetryClass};

fn main() -> ladder_spectra::Result<()> {
    let hs = [4e-3, 2e-3, 1e-3];
    for class in SymmetryClass::BOTH {
        let gap = gaps(2.0, class, 8.0)?[0];
        for mu in [0.25, 0.5] {
            let exact = discrete_eigenvalues(2.0, mu, class, &gap);
            let p = LadderParams::graph(LengthSpec::integer(2), mu)?;
            let mut errs = vec![Vec::new(); exact.len()];
            let mut vals = vec![Vec::new(); exact.len()];
            for &h in &hs {
                let t = std::time::Instant::now();
                let d = discretize_graph(&p, class, 40, h)?;
                let got = oracle_gap_eigenvalues(&d, (gap.lambda_b(), gap.lambda_t()))?;
                for (i, e) in exact.iter().enumerate() {
                    let near = got
                        .iter()
                        .copied()
                        .min_by(|a, b| (a - e.lambda).abs().total_cmp(&(b - e.lambda).abs()));
                    let rel = near.map_or(f64::INFINITY, |v| (v - e.lambda).abs() / e.lambda);
                    errs[i].push(rel);
                    vals[i].push(near.unwrap_or(f64::NAN));
                }
                println!(
                    "{class} μ={mu} h={h:.0e}: {} in gap, n={} ({:.2?})",
                    got.len(),
                    d.k.n,
                    t.elapsed()
                );
            }
            for ((e, errs), v) in exact.iter().zip(&errs).zip(&vals) {
                // differences of successive values cancel the h-independent truncation error
                let rich = richardson_order([v[0], v[1], v[2]]);
                println!(
                    "  λ={:.8} rel errors {errs:?} order vs exact {:.3} richardson {rich:.3}",
                    e.lambda,
                    loglog_slope(&hs, errs).unwrap_or(f64::NAN)
                );
            }
        }
    }
    Ok(())
}
