//! Serialisable study results and the CSV/JSON writers.
//!
//! Every output starts from the resolved [`StudyConfig`]. CSV files carry it
//! on `#` header lines together with the schema version; JSON reports embed
//! it as a field.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fem::{FemBlochBands, LocalizedModes, QuasimodeResidual, RectangleCheck};
use crate::graph::{Band, FlatBandSet, Gap, GraphEigenvalue};
use crate::params::{LengthSpec, SymmetryClass};
use crate::study::{EdgeConvergence, EigenConvergence, FlatBandStudy, QuasimodeStudy};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    GraphBands,
    GraphGaps,
    GraphEigs,
    FemBands,
    FemLocalized,
    StudyConvergence,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StudyKind {
    Edges,
    Eigenvalues,
    Quasimode,
    FlatBand,
    Rectangle,
}

/// Fully resolved inputs of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyConfig {
    pub command: Command,
    pub length: LengthSpec,
    pub eps: Vec<f64>,
    pub mu: Vec<f64>,
    pub classes: Vec<SymmetryClass>,
    pub omega_max: f64,
    pub ntheta: usize,
    /// Absolute mesh size; `None` means `h_over_eps · ε`.
    pub h: Option<f64>,
    pub h_over_eps: f64,
    pub cells: usize,
    pub nev: usize,
    /// Eigenvalue window in `λ`; `None` means the gap given by `gap_index`.
    pub window: Option<(f64, f64)>,
    pub gap_index: usize,
    pub study: Option<StudyKind>,
    pub out: Option<PathBuf>,
    pub seed: u64,
    pub tol: f64,
}

impl StudyConfig {
    /// Mesh size used at thickness `eps`.
    pub fn h_for(&self, eps: f64) -> f64 {
        self.h.unwrap_or(self.h_over_eps * eps)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphSection {
    pub l: f64,
    pub class: SymmetryClass,
    pub omega_max: f64,
    pub bands: Vec<Band>,
    pub gaps: Vec<Gap>,
    /// `(μ, roots)` pairs.
    pub eigenvalues: Vec<(f64, Vec<GraphEigenvalue>)>,
    pub flat: Option<FlatBandSet>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StudyResult {
    Edges(EdgeConvergence),
    Eigenvalues(EigenConvergence),
    Quasimode(QuasimodeStudy),
    FlatBand(FlatBandStudy),
    Rectangle(RectangleCheck),
}

impl StudyResult {
    pub fn pass(&self) -> bool {
        match self {
            StudyResult::Edges(s) => s.pass,
            StudyResult::Eigenvalues(s) => s.pass,
            StudyResult::Quasimode(s) => s.pass,
            StudyResult::FlatBand(s) => s.pass,
            StudyResult::Rectangle(r) => r.passes(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    pub schema_version: u32,
    pub config: StudyConfig,
    #[serde(default)]
    pub graph: Vec<GraphSection>,
    #[serde(default)]
    pub fem_bands: Vec<FemBlochBands>,
    #[serde(default)]
    pub localized: Vec<LocalizedModes>,
    #[serde(default)]
    pub quasimodes: Vec<QuasimodeResidual>,
    #[serde(default)]
    pub studies: Vec<StudyResult>,
}

impl SpectralReport {
    pub fn new(config: StudyConfig) -> Self {
        SpectralReport {
            schema_version: SCHEMA_VERSION,
            config,
            graph: Vec::new(),
            fem_bands: Vec::new(),
            localized: Vec::new(),
            quasimodes: Vec::new(),
            studies: Vec::new(),
        }
    }

    /// Checks that every reported eigenvalue sits strictly inside its gap or window.
    pub fn check_consistency(&self) -> Result<()> {
        let bad = |what: String| Err(Error::Study(format!("inconsistent report: {what}")));
        for g in &self.graph {
            for (mu, evs) in &g.eigenvalues {
                for e in evs {
                    if !e.gap.contains(e.omega) || !g.gaps.contains(&e.gap) {
                        return bad(format!(
                            "graph eigenvalue ω = {} (μ = {mu}) outside its gap",
                            e.omega
                        ));
                    }
                }
            }
        }
        for l in &self.localized {
            for m in &l.modes {
                if !(m.lambda > l.window.0 && m.lambda < l.window.1) {
                    return bad(format!(
                        "localized λ = {} outside window {:?}",
                        m.lambda, l.window
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let r: SpectralReport = serde_json::from_str(s)?;
        if r.schema_version != SCHEMA_VERSION {
            return Err(Error::param(
                "schema_version",
                format!("expected {SCHEMA_VERSION}, found {}", r.schema_version),
            ));
        }
        Ok(r)
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }
}

/// Lossless text form of a double: 17 significant digits, lowercase exponent.
pub fn fmt_num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.into())
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(x: Option<T>) -> Self {
        x.map_or(Cell::Empty, Into::into)
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(x) => fmt_num(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl CsvTable {
    pub fn new(columns: &[&'static str]) -> Self {
        CsvTable {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// CSV text with the schema and config header lines.
    pub fn render(&self, config: &StudyConfig) -> Result<String> {
        let mut s = String::new();
        writeln!(s, "# schema_version={SCHEMA_VERSION}").unwrap();
        writeln!(s, "# config={}", serde_json::to_string(config)?).unwrap();
        writeln!(s, "{}", self.columns.join(",")).unwrap();
        for r in &self.rows {
            let line: Vec<String> = r.iter().map(Cell::render).collect();
            writeln!(s, "{}", line.join(",")).unwrap();
        }
        Ok(s)
    }

    pub fn write(&self, config: &StudyConfig, w: &mut impl Write) -> Result<()> {
        w.write_all(self.render(config)?.as_bytes())?;
        Ok(())
    }
}

/// Splits CSV text into the embedded config and the data rows.
pub fn parse_csv(text: &str) -> Result<(StudyConfig, Vec<String>, Vec<Vec<String>>)> {
    let mut config = None;
    let mut lines = text.lines();
    let mut header = None;
    for line in lines.by_ref() {
        if let Some(c) = line.strip_prefix("# config=") {
            config = Some(serde_json::from_str(c)?);
        } else if !line.starts_with('#') {
            header = Some(line.split(',').map(String::from).collect());
            break;
        }
    }
    let config = config.ok_or_else(|| Error::param("csv", "missing config header"))?;
    let header = header.ok_or_else(|| Error::param("csv", "missing column header"))?;
    let rows = lines
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    Ok((config, header, rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn config() -> StudyConfig {
        StudyConfig {
            command: Command::GraphGaps,
            length: LengthSpec::pi_multiple(10, 7),
            eps: vec![0.1],
            mu: vec![0.25, 0.5],
            classes: vec![SymmetryClass::Symmetric],
            omega_max: 12.0,
            ntheta: 64,
            h: None,
            h_over_eps: 0.25,
            cells: 10,
            nev: 5,
            window: Some((1.0, 2.0)),
            gap_index: 0,
            study: None,
            out: None,
            seed: 7,
            tol: 1e-10,
        }
    }

    #[test]
    fn numbers_round_trip_through_text() {
        for x in [0.1, 1.0 / 3.0, 1.2309594173407745, 6.02e23, -2.5e-300, 0.0] {
            let s = fmt_num(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
            assert!(!s.contains('E'));
        }
        assert_eq!(fmt_num(1.5), "1.5000000000000000e0");
    }

    #[test]
    fn csv_embeds_config() {
        let mut t = CsvTable::new(&["omega", "kind"]);
        t.push(vec![1.25.into(), "gap_b".into()]);
        t.push(vec![Cell::Empty, Cell::Int(3)]);
        let text = t.render(&config()).unwrap();
        assert!(text.starts_with("# schema_version=1\n# config={"));
        let (c, h, rows) = parse_csv(&text).unwrap();
        assert_eq!(c, config());
        assert_eq!(h, vec!["omega", "kind"]);
        assert_eq!(rows[0][0].parse::<f64>().unwrap(), 1.25);
        assert_eq!(rows[1], vec!["", "3"]);
    }

    #[test]
    fn json_round_trip() {
        let r = SpectralReport::new(config());
        let back = SpectralReport::from_json(&r.to_json().unwrap()).unwrap();
        assert_eq!(back, r);
        let bumped = r
            .to_json()
            .unwrap()
            .replace("\"schema_version\": 1", "\"schema_version\": 9");
        assert!(SpectralReport::from_json(&bumped).is_err());
    }
}
