//! The `ladder` command line: argument parsing, study orchestration and output.
//!
//! ```text
//! ladder graph bands|gaps|eigs   [--L 2] [--mu 0.25,0.5] [--class sym|antisym|both] [--omega-max 12]
//! ladder fem bands               [--L 2] [--eps 0.1] [--nev 5] [--ntheta 64] [--h 0.025]
//! ladder fem localized           [--L 2] [--eps 0.06] [--mu 0.25] [--cells 10] [--window lo,hi]
//! ladder study convergence       [--kind edges|eigenvalues|quasimode|flat-band] [--eps 0.2,0.1,0.05]
//! ```
//!
//! Results go to `<out>.csv` and `<out>.json` when `--out` is given, otherwise
//! the CSV is printed. Exit status: 0 on success, 2 on a configuration error,
//! 3 on a numerical failure. `LADDER_THREADS` caps the worker threads.

use std::f64::consts::PI;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fem::{
    fem_bloch_bands_with, gap_window, localized_modes_full, neumann_rectangle_check, theta_grid,
    SolverSettings,
};
use crate::graph::{discrete_eigenvalues, essential_bands, flat_bands, gaps_from_bands};
use crate::params::{LadderParams, LengthSpec, SymmetryClass};
use crate::report::{
    Cell, Command, CsvTable, GraphSection, SpectralReport, StudyConfig, StudyKind, StudyResult,
};
use crate::study::{
    band_edge_convergence, eigenvalue_convergence, flat_band_splitting, matching_fem_gap,
    quasimode_convergence, Resolution, SlopeWindow,
};

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "LADDER_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "ladder",
    version,
    about = "Spectra of thin periodic ladders and their graph limit"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Top,
}

#[derive(Debug, Subcommand)]
pub enum Top {
    /// Closed-form spectra of the limit graph.
    #[command(subcommand)]
    Graph(GraphCmd),
    /// Finite elements on the thin ladder.
    #[command(subcommand)]
    Fem(FemCmd),
    /// ε-sweeps with slope fits.
    #[command(subcommand)]
    Study(StudyCmd),
}

#[derive(Debug, Subcommand)]
pub enum GraphCmd {
    Bands(Opts),
    Gaps(Opts),
    Eigs(Opts),
}

#[derive(Debug, Subcommand)]
pub enum FemCmd {
    Bands(Opts),
    Localized(Opts),
}

#[derive(Debug, Subcommand)]
pub enum StudyCmd {
    Convergence(Opts),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum KindArg {
    Edges,
    Eigenvalues,
    Quasimode,
    FlatBand,
    Rectangle,
}

#[derive(Debug, Clone, Args)]
pub struct Opts {
    /// Ladder height: `2`, `1/2`, `10pi/7`.
    #[arg(long = "L", default_value = "2")]
    pub l: String,
    /// Thickness values (comma separated).
    #[arg(long, value_delimiter = ',', default_value = "0.1")]
    pub eps: Vec<f64>,
    /// Central rung ratios (comma separated).
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub mu: Vec<f64>,
    /// `sym`, `antisym` or `both`.
    #[arg(long, default_value = "sym")]
    pub class: String,
    #[arg(long = "omega-max", default_value_t = 4.0 * PI)]
    pub omega_max: f64,
    #[arg(long, default_value_t = 64)]
    pub ntheta: usize,
    /// Absolute mesh size (defaults to `--h-over-eps` times ε).
    #[arg(long)]
    pub h: Option<f64>,
    #[arg(long = "h-over-eps", default_value_t = 0.25)]
    pub h_over_eps: f64,
    /// Supercell half-length in cells.
    #[arg(long, default_value_t = 10)]
    pub cells: usize,
    #[arg(long, default_value_t = 5)]
    pub nev: usize,
    /// Eigenvalue window `lo,hi` in λ (defaults to the FEM gap `--gap`).
    #[arg(long)]
    pub window: Option<String>,
    /// Zero-based gap number.
    #[arg(long, default_value_t = 0)]
    pub gap: usize,
    /// Which convergence study to run.
    #[arg(long, value_enum, default_value = "edges")]
    pub kind: KindArg,
    /// Output prefix: writes `<out>.csv` and `<out>.json`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write each localized mode in the mesh text format.
    #[arg(long = "dump-modes")]
    pub dump_modes: bool,
    #[arg(long, default_value_t = 0x5EED)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
}

impl Opts {
    /// Validated configuration; every error names the offending flag.
    pub fn resolve(&self, command: Command) -> Result<StudyConfig> {
        let length: LengthSpec = self.l.parse()?;
        let classes = match self.class.trim().to_ascii_lowercase().as_str() {
            "both" => SymmetryClass::BOTH.to_vec(),
            c => vec![c.parse()?],
        };
        let window = self.window.as_deref().map(parse_window).transpose()?;
        let positive = |name: &'static str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::param(name, format!("must be positive, got {v}")))
            }
        };
        positive("omega-max", self.omega_max)?;
        positive("h-over-eps", self.h_over_eps)?;
        positive("tol", self.tol)?;
        if let Some(h) = self.h {
            positive("h", h)?;
        }
        if self.eps.is_empty() || self.mu.is_empty() {
            return Err(Error::param("eps", "lists must be non-empty"));
        }
        for &e in &self.eps {
            LadderParams::new(length, e, 1.0)?;
        }
        for &m in &self.mu {
            positive("mu", m)?;
        }
        if self.nev == 0 {
            return Err(Error::param("nev", "must be at least 1"));
        }
        if self.ntheta < 2 {
            return Err(Error::param("ntheta", "need at least 2 quasimomenta"));
        }
        let study = (command == Command::StudyConvergence).then_some(match self.kind {
            KindArg::Edges => StudyKind::Edges,
            KindArg::Eigenvalues => StudyKind::Eigenvalues,
            KindArg::Quasimode => StudyKind::Quasimode,
            KindArg::FlatBand => StudyKind::FlatBand,
            KindArg::Rectangle => StudyKind::Rectangle,
        });
        let min_eps = match study {
            Some(StudyKind::Rectangle) | None => 1,
            // the width ratio needs one halving
            Some(StudyKind::FlatBand) => 2,
            Some(_) => 3,
        };
        if self.eps.len() < min_eps {
            return Err(Error::param(
                "eps",
                format!("this study needs at least {min_eps} values"),
            ));
        }
        if study.is_some() && self.h.is_some() {
            return Err(Error::param(
                "h",
                "sweeps scale the mesh with ε, use --h-over-eps",
            ));
        }
        Ok(StudyConfig {
            command,
            length,
            eps: self.eps.clone(),
            mu: self.mu.clone(),
            classes,
            omega_max: self.omega_max,
            ntheta: self.ntheta,
            h: self.h,
            h_over_eps: self.h_over_eps,
            cells: self.cells,
            nev: self.nev,
            window,
            gap_index: self.gap,
            study,
            out: self.out.clone(),
            seed: self.seed,
            tol: self.tol,
        })
    }
}

fn parse_window(s: &str) -> Result<(f64, f64)> {
    let bad = || {
        Error::param(
            "window",
            format!("expected `lo,hi` with lo < hi, got `{s}`"),
        )
    };
    let (a, b) = s.split_once(',').ok_or_else(bad)?;
    let lo: f64 = a.trim().parse().map_err(|_| bad())?;
    let hi: f64 = b.trim().parse().map_err(|_| bad())?;
    if lo < hi {
        Ok((lo, hi))
    } else {
        Err(bad())
    }
}

/// Applies `LADDER_THREADS` to the global pool. Later calls are no-ops.
pub fn init_threads() -> Result<()> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        Error::param(
            "LADDER_THREADS",
            format!("expected a positive integer, got `{v}`"),
        )
    })?;
    // an already initialised pool keeps its size
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
    Ok(())
}

/// Everything one run produces.
#[derive(Debug)]
pub struct RunOutput {
    pub report: SpectralReport,
    pub table: CsvTable,
    /// Extra files (mode dumps) as `(suffix, contents)`.
    pub extra: Vec<(String, String)>,
}

/// Runs a resolved configuration without touching the file system.
pub fn execute(config: &StudyConfig, dump_modes: bool) -> Result<RunOutput> {
    let mut report = SpectralReport::new(config.clone());
    let mut extra = Vec::new();
    let table = match config.command {
        Command::GraphBands | Command::GraphGaps | Command::GraphEigs => {
            graph_command(config, &mut report)?
        }
        Command::FemBands => fem_bands_command(config, &mut report)?,
        Command::FemLocalized => {
            fem_localized_command(config, &mut report, dump_modes.then_some(&mut extra))?
        }
        Command::StudyConvergence => study_command(config, &mut report)?,
    };
    report.check_consistency()?;
    Ok(RunOutput {
        report,
        table,
        extra,
    })
}

const GRAPH_COLUMNS: [&str; 7] = [
    "omega", "lambda", "kind", "gap_type", "class", "mu", "index",
];

fn graph_command(config: &StudyConfig, report: &mut SpectralReport) -> Result<CsvTable> {
    let l = config.length.value();
    let mut t = CsvTable::new(&GRAPH_COLUMNS);
    let row = |omega: f64,
               kind: &str,
               gap_type: Option<&str>,
               class: SymmetryClass,
               mu: Option<f64>,
               index: usize| {
        vec![
            omega.into(),
            (omega * omega).into(),
            kind.into(),
            gap_type.into(),
            class.short_name().into(),
            mu.into(),
            index.into(),
        ]
    };
    for &class in &config.classes {
        let bands = essential_bands(l, class, config.omega_max);
        let gaps = gaps_from_bands(&bands, l, class)?;
        let flat = flat_bands(&config.length, class, config.omega_max);
        let mut section = GraphSection {
            l,
            class,
            omega_max: config.omega_max,
            bands: bands.clone(),
            gaps: gaps.clone(),
            eigenvalues: Vec::new(),
            flat: Some(flat.clone()),
        };
        match config.command {
            Command::GraphBands => {
                for (i, b) in bands.iter().enumerate() {
                    t.push(row(b.omega_lo, "band_edge", None, class, None, i));
                    t.push(row(b.omega_hi, "band_edge", None, class, None, i));
                }
                for (i, &w) in flat.omegas.iter().enumerate() {
                    t.push(row(w, "flat", None, class, None, i));
                }
            }
            Command::GraphGaps => {
                for (i, g) in gaps.iter().enumerate() {
                    let ty = g.gap_type.as_str();
                    t.push(row(g.omega_b, "gap_b", Some(ty), class, None, i));
                    t.push(row(g.omega_t, "gap_t", Some(ty), class, None, i));
                }
            }
            _ => {
                for &mu in &config.mu {
                    let mut evs = Vec::new();
                    for (i, g) in gaps.iter().enumerate() {
                        for e in discrete_eigenvalues(l, mu, class, g) {
                            t.push(row(
                                e.omega,
                                "eig",
                                Some(g.gap_type.as_str()),
                                class,
                                Some(mu),
                                i,
                            ));
                            evs.push(e);
                        }
                    }
                    section.eigenvalues.push((mu, evs));
                }
            }
        }
        report.graph.push(section);
    }
    Ok(t)
}

fn settings(config: &StudyConfig) -> SolverSettings {
    SolverSettings {
        tol: config.tol,
        seed: config.seed,
    }
}

fn fem_bands_command(config: &StudyConfig, report: &mut SpectralReport) -> Result<CsvTable> {
    let grid = theta_grid(config.ntheta);
    let mut t = CsvTable::new(&["eps", "class", "theta", "branch", "omega", "lambda"]);
    for &class in &config.classes {
        for &eps in &config.eps {
            let p = LadderParams::new(config.length, eps, 1.0)?;
            let b = fem_bloch_bands_with(
                &p,
                class,
                config.nev,
                &grid,
                config.h_for(eps),
                &settings(config),
            )?;
            for (theta, vals) in b.thetas.iter().zip(&b.eigenvalues) {
                for (k, &lambda) in vals.iter().enumerate() {
                    t.push(vec![
                        eps.into(),
                        class.short_name().into(),
                        (*theta).into(),
                        k.into(),
                        lambda.max(0.0).sqrt().into(),
                        lambda.into(),
                    ]);
                }
            }
            report.fem_bands.push(b);
        }
    }
    Ok(t)
}

fn fem_localized_command(
    config: &StudyConfig,
    report: &mut SpectralReport,
    mut dumps: Option<&mut Vec<(String, String)>>,
) -> Result<CsvTable> {
    let mut t = CsvTable::new(&[
        "eps",
        "mu",
        "class",
        "omega",
        "lambda",
        "window_lo",
        "window_hi",
        "central_fraction",
        "decay_ratio_sq",
        "graph_omega",
        "graph_r_sq",
        "backward_error",
    ]);
    let l = config.length.value();
    for &class in &config.classes {
        for &eps in &config.eps {
            let h = config.h_for(eps);
            let window = match config.window {
                Some(w) => w,
                None => {
                    let target = crate::graph::gaps(l, class, config.omega_max)?
                        .get(config.gap_index)
                        .copied()
                        .ok_or_else(|| {
                            Error::param(
                                "gap",
                                format!("no graph gap {} below omega-max", config.gap_index),
                            )
                        })?;
                    let p = LadderParams::new(config.length, eps, 1.0)?;
                    let nev = config.nev.max(config.gap_index + 3);
                    let b = fem_bloch_bands_with(
                        &p,
                        class,
                        nev,
                        &theta_grid(config.ntheta),
                        h,
                        &settings(config),
                    )?;
                    let g = matching_fem_gap(&b, &target)
                        .ok_or_else(|| Error::Study(format!("no FEM gap at ε = {eps}")))?;
                    gap_window(g, 1e-6)
                }
            };
            let solves: Vec<_> = config
                .mu
                .par_iter()
                .map(|&mu| {
                    let p = LadderParams::new(config.length, eps, mu)?;
                    localized_modes_full(&p, class, window, config.cells, h, &settings(config))
                })
                .collect::<Result<_>>()?;
            for s in solves {
                let r = &s.report;
                for (k, m) in r.modes.iter().enumerate() {
                    t.push(vec![
                        eps.into(),
                        r.params.mu.into(),
                        class.short_name().into(),
                        m.omega.into(),
                        m.lambda.into(),
                        window.0.into(),
                        window.1.into(),
                        m.central_fraction.into(),
                        m.decay_ratio_sq.into(),
                        m.graph_omega.into(),
                        m.graph_r_sq.into(),
                        m.backward_error.into(),
                    ]);
                    if let Some(d) = dumps.as_deref_mut() {
                        let field: Vec<(f64, f64)> = s.nodal[k].iter().map(|&u| (u, 0.0)).collect();
                        let name = format!(
                            "_{}_eps{}_mu{}_mode{}.txt",
                            class.short_name(),
                            eps,
                            r.params.mu,
                            k
                        );
                        d.push((name, s.mesh.to_text(Some(&field))));
                    }
                }
                report.localized.push(s.report);
            }
        }
    }
    Ok(t)
}

const STUDY_COLUMNS: [&str; 7] = [
    "quantity",
    "series",
    "eps",
    "value",
    "reference",
    "error",
    "pass",
];

fn study_command(config: &StudyConfig, report: &mut SpectralReport) -> Result<CsvTable> {
    let mut t = CsvTable::new(&STUDY_COLUMNS);
    let res = Resolution {
        h_over_eps: config.h_over_eps,
        ntheta: config.ntheta,
        nev: config.nev,
        settings: settings(config),
    };
    let point = |q: &str,
                 series: usize,
                 eps: f64,
                 value: Option<f64>,
                 reference: Option<f64>,
                 err: Option<f64>|
     -> Vec<Cell> {
        vec![
            q.into(),
            series.into(),
            eps.into(),
            value.into(),
            reference.into(),
            err.into(),
            Cell::Empty,
        ]
    };
    let fit =
        |q: &str, series: usize, value: Option<f64>, lo: Option<f64>, pass: bool| -> Vec<Cell> {
            vec![
                q.into(),
                series.into(),
                Cell::Empty,
                value.into(),
                lo.into(),
                Cell::Empty,
                (if pass { "pass" } else { "fail" }).into(),
            ]
        };
    let mu = config.mu[0];
    for &class in &config.classes {
        let result = match config.study.unwrap_or(StudyKind::Edges) {
            StudyKind::Edges => {
                let s = band_edge_convergence(
                    config.length,
                    class,
                    config.gap_index,
                    &config.eps,
                    &res,
                    SlopeWindow::new(0.8, Some(1.2)),
                )?;
                for (i, &e) in s.eps.iter().enumerate() {
                    t.push(point(
                        "edge_b",
                        0,
                        e,
                        Some(s.fem_b[i]),
                        Some(s.graph_gap.omega_b),
                        Some(s.err_b[i]),
                    ));
                    t.push(point(
                        "edge_t",
                        0,
                        e,
                        Some(s.fem_t[i]),
                        Some(s.graph_gap.omega_t),
                        Some(s.err_t[i]),
                    ));
                }
                t.push(fit("slope_b", 0, s.slope_b, Some(s.window.lo), s.pass));
                t.push(fit("slope_t", 0, s.slope_t, Some(s.window.lo), s.pass));
                StudyResult::Edges(s)
            }
            StudyKind::Eigenvalues => {
                let s = eigenvalue_convergence(
                    config.length,
                    mu,
                    class,
                    config.gap_index,
                    &config.eps,
                    config.cells,
                    &res,
                    SlopeWindow::new(0.8, None),
                )?;
                for (k, tr) in s.tracked.iter().enumerate() {
                    for (i, &e) in s.eps.iter().enumerate() {
                        t.push(point(
                            "eig",
                            k,
                            e,
                            tr.fem_lambda[i],
                            Some(tr.graph.lambda),
                            tr.err[i],
                        ));
                    }
                    t.push(fit(
                        "slope",
                        k,
                        tr.slope,
                        Some(s.window.lo),
                        tr.monotone && tr.slope.is_some_and(|x| s.window.contains(x)),
                    ));
                }
                StudyResult::Eigenvalues(s)
            }
            StudyKind::Quasimode => {
                let s = quasimode_convergence(
                    config.length,
                    mu,
                    class,
                    config.gap_index,
                    &config.eps,
                    res.h_over_eps,
                    SlopeWindow::new(0.5, None),
                )?;
                for (k, q) in s.series.iter().enumerate() {
                    for (i, &e) in s.eps.iter().enumerate() {
                        t.push(point("ratio_dual", k, e, Some(q.ratio_dual[i]), None, None));
                        t.push(point(
                            "ratio_m_inv",
                            k,
                            e,
                            Some(q.ratio_m_inv[i]),
                            None,
                            None,
                        ));
                    }
                    let ok = q.exponent_dual.is_some_and(|x| s.window.contains(x));
                    t.push(fit(
                        "exponent_dual",
                        k,
                        q.exponent_dual,
                        Some(s.window.lo),
                        ok,
                    ));
                }
                StudyResult::Quasimode(s)
            }
            StudyKind::FlatBand => {
                let flat = flat_bands(&config.length, class, config.omega_max);
                let target = *flat.omegas.iter().find(|&&w| w > 0.0).ok_or_else(|| {
                    Error::param(
                        "L",
                        format!(
                            "no flat band below omega-max for {} ({})",
                            config.length, class
                        ),
                    )
                })?;
                let s = flat_band_splitting(
                    config.length,
                    class,
                    target,
                    0.5,
                    &config.eps,
                    &res,
                    (0.35, 0.65),
                )?;
                for (i, &e) in s.eps.iter().enumerate() {
                    t.push(point("width", 0, e, s.widths[i], Some(target), None));
                }
                for &r in &s.ratios {
                    t.push(fit("width_ratio", 0, Some(r), Some(0.5), s.pass));
                }
                t.push(fit("c_fit", 0, s.c_fit, None, s.pass));
                StudyResult::FlatBand(s)
            }
            StudyKind::Rectangle => {
                let c = neumann_rectangle_check(1.0, 0.7, 8, 8, 3)?;
                for (i, &h) in c.h.iter().enumerate() {
                    t.push(point(
                        "rel_error",
                        0,
                        h,
                        Some(c.max_rel_error[i]),
                        None,
                        None,
                    ));
                }
                let pass = c.passes();
                t.push(fit("order", 0, c.order, Some(1.8), pass));
                StudyResult::Rectangle(c)
            }
        };
        report.studies.push(result);
    }
    Ok(t)
}

fn command_of(top: &Top) -> (Command, &Opts) {
    match top {
        Top::Graph(GraphCmd::Bands(o)) => (Command::GraphBands, o),
        Top::Graph(GraphCmd::Gaps(o)) => (Command::GraphGaps, o),
        Top::Graph(GraphCmd::Eigs(o)) => (Command::GraphEigs, o),
        Top::Fem(FemCmd::Bands(o)) => (Command::FemBands, o),
        Top::Fem(FemCmd::Localized(o)) => (Command::FemLocalized, o),
        Top::Study(StudyCmd::Convergence(o)) => (Command::StudyConvergence, o),
    }
}

/// Parses, runs and writes outputs.
pub fn run(cli: &Cli) -> Result<()> {
    init_threads()?;
    let (command, opts) = command_of(&cli.command);
    let config = opts.resolve(command)?;
    let out = execute(&config, opts.dump_modes)?;
    match &config.out {
        Some(prefix) => {
            let with = |suffix: &str| {
                let mut s = prefix.clone().into_os_string();
                s.push(suffix);
                PathBuf::from(s)
            };
            std::fs::write(with(".csv"), out.table.render(&config)?)?;
            out.report.write_json(&with(".json"))?;
            for (suffix, text) in &out.extra {
                std::fs::write(with(suffix), text)?;
            }
        }
        None => print!("{}", out.table.render(&config)?),
    }
    for s in &out.report.studies {
        eprintln!(
            "{}",
            if s.pass() {
                "study: pass"
            } else {
                "study: fail"
            }
        );
    }
    Ok(())
}

/// Exit status for a finished run.
pub fn exit_code(result: &Result<()>) -> u8 {
    match result {
        Ok(()) => 0,
        Err(e) if e.is_config_error() => 2,
        Err(_) => 3,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("ladder").chain(args.iter().copied())).unwrap()
    }

    fn config(args: &[&str]) -> Result<StudyConfig> {
        let cli = parse(args);
        let (c, o) = command_of(&cli.command);
        o.resolve(c)
    }

    #[test]
    fn graph_gaps_first_row() {
        let c = config(&[
            "graph",
            "gaps",
            "--L",
            "2",
            "--class",
            "sym",
            "--omega-max",
            "12",
        ])
        .unwrap();
        let out = execute(&c, false).unwrap();
        let r = &out.table.rows[0];
        assert_eq!(r[2], Cell::Text("gap_b".into()));
        assert_eq!(r[3], Cell::Text("i".into()));
        match (&r[0], &out.table.rows[1][0]) {
            (Cell::Num(b), Cell::Num(t)) => {
                assert!((b - 1.2310).abs() < 1e-4 && (t - 1.9106).abs() < 1e-4);
            }
            _ => panic!(),
        }
    }

    #[test]
    fn graph_eigs_counts() {
        let c = config(&[
            "graph",
            "eigs",
            "--L",
            "2",
            "--mu",
            "0.25",
            "--omega-max",
            "3",
        ])
        .unwrap();
        let out = execute(&c, false).unwrap();
        assert_eq!(
            out.table
                .rows
                .iter()
                .filter(|r| r[6] == Cell::Int(0))
                .count(),
            2
        );
        let c = config(&["graph", "eigs", "--L", "2", "--mu", "1.0"]).unwrap();
        assert!(execute(&c, false).unwrap().table.rows.is_empty());
    }

    #[test]
    fn config_errors_name_the_field() {
        let e = config(&["graph", "gaps", "--L", "two"]).unwrap_err();
        assert!(e.is_config_error() && e.to_string().contains("`L`"));
        let e = config(&["fem", "bands", "--eps", "1.5"]).unwrap_err();
        assert!(e.is_config_error());
        let e = config(&["graph", "gaps", "--class", "diagonal"]).unwrap_err();
        assert!(e.to_string().contains("`class`"));
        let e = config(&["fem", "localized", "--window", "3,1"]).unwrap_err();
        assert!(e.to_string().contains("`window`"));
        let e = config(&["study", "convergence", "--eps", "0.2,0.1"]).unwrap_err();
        assert!(e.to_string().contains("`eps`"));
        assert_eq!(exit_code(&Err(e)), 2);
        assert_eq!(exit_code(&Err(Error::SingularPivot { pivot: 0 })), 3);
    }

    #[test]
    fn exact_length_survives_resolution() {
        let c = config(&["graph", "bands", "--L", "10pi/7"]).unwrap();
        assert_eq!(c.length, LengthSpec::pi_multiple(10, 7));
        let c = config(&["graph", "bands", "--L", "1/2", "--class", "both"]).unwrap();
        assert_eq!(c.classes.len(), 2);
    }
}
