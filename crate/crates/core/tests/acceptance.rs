//! Acceptance criteria, one line each. Runs without the libtest harness so the
//! summary is printed by a plain `cargo test`.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use ladder_spectra::fem::neumann_rectangle_check;
use ladder_spectra::graph::{
    discrete_eigenvalues, essential_bands, g_raw, gaps, special_points, spectrum_cover_check,
    theta_root_certificate, Gap, GapType,
};
use ladder_spectra::oracle::{discretize_graph, oracle_gap_eigenvalues, richardson_order};
use ladder_spectra::study::{
    band_edge_convergence, eigenvalue_convergence, flat_band_splitting, quasimode_convergence,
    Resolution, SlopeWindow,
};
use ladder_spectra::{LadderParams, LengthSpec, Result, SymmetryClass};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use SymmetryClass::{Antisymmetric, Symmetric};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome {
        pass,
        detail: detail.into(),
    })
}

fn first_gaps(l: f64, class: SymmetryClass, count: usize) -> Result<Vec<Gap>> {
    let mut omega_max = 4.0 * PI;
    loop {
        let gs = gaps(l, class, omega_max)?;
        if gs.len() > count {
            return Ok(gs[..count].to_vec());
        }
        omega_max *= 2.0;
    }
}

fn sci(xs: &[f64]) -> String {
    let v: Vec<String> = xs.iter().map(|x| format!("{x:.2e}")).collect();
    format!("[{}]", v.join(", "))
}

fn near_zero(x: f64) -> bool {
    x.abs() < 1e-6
}

fn ac1() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED);
    let (mut checked, mut agree) = (0usize, 0usize);
    for l in [2.0, 8.0, 0.5] {
        for class in SymmetryClass::BOTH {
            let mut n = 0;
            while n < 10_000 {
                let w: f64 = rng.gen_range(0.0..6.0 * PI);
                // poles of g and the special points where it is undefined
                if near_zero((w * l / 2.0).sin())
                    || near_zero((w * l / 2.0).cos())
                    || near_zero(w.sin())
                {
                    continue;
                }
                n += 1;
                let member = g_raw(w, l, class).abs() <= 1.0;
                let root = theta_root_certificate(w, l, class, 1e-10).is_some();
                checked += 1;
                agree += usize::from(member == root);
            }
        }
    }
    outcome(agree == checked, format!("{agree}/{checked} samples agree"))
}

fn ac2() -> Result<Outcome> {
    let omega_max = 10.0 * PI;
    let (mut total, mut missing) = (0, Vec::new());
    for l in [2.0, 8.0, 0.5, 10.0 * PI / 7.0] {
        for class in SymmetryClass::BOTH {
            let bands = essential_bands(l, class, omega_max);
            for p in special_points(l, class, omega_max) {
                total += 1;
                if !bands.iter().any(|b| b.contains(p, 1e-9)) {
                    missing.push((l, class, p));
                }
            }
        }
    }
    outcome(
        missing.is_empty(),
        format!(
            "{} of {total} special points outside bands {missing:?}",
            missing.len()
        ),
    )
}

fn ac3() -> Result<Outcome> {
    let mut bad = Vec::new();
    let mut n = 0;
    for l in [2.0, 8.0] {
        for class in SymmetryClass::BOTH {
            for gap in first_gaps(l, class, 5)? {
                for mu in [0.1, 0.25, 0.5, 0.9, 1.0, 1.5] {
                    let count = discrete_eigenvalues(l, mu, class, &gap).len();
                    let ok = match (class, mu < 1.0) {
                        (_, false) => count == 0,
                        (Symmetric, true) => {
                            count == if gap.gap_type == GapType::I { 2 } else { 1 }
                        }
                        (Antisymmetric, true) => count == 1 || count == 2,
                    };
                    n += 1;
                    if !ok {
                        bad.push((l, class, gap.gap_type, mu, count));
                    }
                }
            }
        }
    }
    outcome(
        bad.is_empty(),
        format!(
            "{} of {n} (L, class, gap, μ) cases wrong {bad:?}",
            bad.len()
        ),
    )
}

fn ac4() -> Result<Outcome> {
    let hs = [4e-3, 2e-3, 1e-3];
    let cases: Vec<(SymmetryClass, f64)> = SymmetryClass::BOTH
        .iter()
        .flat_map(|&c| [(c, 0.25), (c, 0.5)])
        .collect();
    let rows: Vec<(f64, f64)> = cases
        .par_iter()
        .map(|&(class, mu)| -> Result<Vec<(f64, f64)>> {
            let gap = gaps(2.0, class, 8.0)?[0];
            let exact = discrete_eigenvalues(2.0, mu, class, &gap);
            let p = LadderParams::graph(LengthSpec::integer(2), mu)?;
            let mut vals = vec![Vec::new(); exact.len()];
            for &h in &hs {
                let d = discretize_graph(&p, class, 40, h)?;
                let got = oracle_gap_eigenvalues(&d, (gap.lambda_b(), gap.lambda_t()))?;
                for (e, v) in exact.iter().zip(&mut vals) {
                    let near = got
                        .iter()
                        .copied()
                        .min_by(|a, b| (a - e.lambda).abs().total_cmp(&(b - e.lambda).abs()));
                    v.push(near.unwrap_or(f64::NAN));
                }
            }
            Ok(exact
                .iter()
                .zip(&vals)
                .map(|(e, v)| {
                    (
                        (v[2] - e.lambda).abs() / e.lambda,
                        richardson_order([v[0], v[1], v[2]]),
                    )
                })
                .collect())
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let worst = rows.iter().map(|r| r.0).fold(0.0, f64::max);
    let orders: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let pass = rows.len() == 6 && worst <= 1e-4 && orders.iter().all(|o| (1.8..=2.2).contains(o));
    outcome(
        pass,
        format!(
            "{} roots, worst rel error {worst:.2e}, h-orders {orders:.3?}",
            rows.len()
        ),
    )
}

fn ac5() -> Result<Outcome> {
    let reports: Vec<_> = [2.0, 8.0]
        .iter()
        .map(|&l| spectrum_cover_check(l, 10.0 * PI))
        .collect();
    let widest: Vec<f64> = reports.iter().map(|r| r.max_hole_width).collect();
    outcome(
        reports.iter().all(|r| r.covers(1e-8)),
        format!("widest holes {widest:?}"),
    )
}

fn ac6() -> Result<Outcome> {
    let s = band_edge_convergence(
        LengthSpec::integer(2),
        Symmetric,
        0,
        &[0.2, 0.1, 0.05, 0.025],
        &Resolution::default(),
        SlopeWindow::new(0.8, Some(1.2)),
    )?;
    outcome(
        s.pass,
        format!(
            "slopes bottom {:.3?} top {:.3?}, errors {} / {}",
            s.slope_b,
            s.slope_t,
            sci(&s.err_b),
            sci(&s.err_t)
        ),
    )
}

fn ac7() -> Result<Outcome> {
    let s = eigenvalue_convergence(
        LengthSpec::integer(2),
        0.25,
        Symmetric,
        0,
        &[0.2, 0.1, 0.05],
        10,
        &Resolution::default(),
        SlopeWindow::new(0.8, None),
    )?;
    let counts: Vec<usize> = s.in_gap.iter().map(Vec::len).collect();
    let tracked: Vec<String> = s
        .tracked
        .iter()
        .map(|t| {
            format!(
                "λ={:.4} slope {:.3?} monotone {}",
                t.graph.lambda, t.slope, t.monotone
            )
        })
        .collect();
    outcome(
        s.pass,
        format!("in-gap counts {counts:?}; {}", tracked.join("; ")),
    )
}

fn ac8() -> Result<Outcome> {
    let s = quasimode_convergence(
        LengthSpec::integer(2),
        0.25,
        Symmetric,
        0,
        &[0.2, 0.1, 0.05],
        0.25,
        SlopeWindow::new(0.5, None),
    )?;
    let ex: Vec<String> = s
        .series
        .iter()
        .map(|q| format!("λ={:.4} exponent {:.3?}", q.graph.lambda, q.exponent_dual))
        .collect();
    outcome(s.pass, ex.join("; "))
}

fn ac9() -> Result<Outcome> {
    let res = Resolution {
        ntheta: 17,
        nev: 10,
        ..Resolution::default()
    };
    let s = flat_band_splitting(
        LengthSpec::rational(1, 2),
        Symmetric,
        2.0 * PI,
        0.5,
        &[0.1, 0.05],
        &res,
        (0.35, 0.65),
    )?;
    outcome(
        s.pass,
        format!(
            "widths {:.4?}, ratio {:.3?}, C = {:.3?}",
            s.widths, s.ratios, s.c_fit
        ),
    )
}

fn ac10() -> Result<Outcome> {
    let c = neumann_rectangle_check(1.0, 0.7, 6, 8, 3)?;
    outcome(
        c.passes(),
        format!(
            "order {:.3?}, max rel errors {}",
            c.order,
            sci(&c.max_rel_error)
        ),
    )
}

type Criterion = (&'static str, fn() -> Result<Outcome>, Duration);

fn main() -> ExitCode {
    let s = Duration::from_secs;
    let criteria: [Criterion; 10] = [
        ("AC1 membership equivalence", ac1, s(10)),
        ("AC2 special points in bands", ac2, s(5)),
        ("AC3 defect root counts", ac3, s(10)),
        ("AC4 oracle agreement", ac4, s(120)),
        ("AC5 full-operator cover", ac5, s(5)),
        ("AC6 band edge convergence", ac6, s(900)),
        ("AC7 trapped modes", ac7, s(1200)),
        ("AC8 quasimode residual", ac8, s(600)),
        ("AC9 flat-band splitting", ac9, s(600)),
        ("AC10 rectangle self-check", ac10, s(60)),
    ];
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = 0;
    for (name, run, budget) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let t = Instant::now();
        let r = run();
        let took = t.elapsed();
        let (pass, detail) = match r {
            Ok(o) => (o.pass && took <= budget, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        failed += usize::from(!pass);
        let verdict = if pass { "PASS" } else { "FAIL" };
        println!("{name}: {verdict} ({took:.1?} of {budget:?}) {detail}");
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
