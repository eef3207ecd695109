//! Physical configuration of the ladder.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parity of a mode with respect to the horizontal axis `y = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SymmetryClass {
    #[serde(alias = "sym")]
    Symmetric,
    #[serde(alias = "antisym")]
    Antisymmetric,
}

impl SymmetryClass {
    pub const BOTH: [SymmetryClass; 2] = [SymmetryClass::Symmetric, SymmetryClass::Antisymmetric];

    pub fn short_name(self) -> &'static str {
        match self {
            SymmetryClass::Symmetric => "sym",
            SymmetryClass::Antisymmetric => "antisym",
        }
    }
}

impl fmt::Display for SymmetryClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for SymmetryClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "sym" | "symmetric" | "s" => Ok(SymmetryClass::Symmetric),
            "antisym" | "antisymmetric" | "a" => Ok(SymmetryClass::Antisymmetric),
            other => Err(Error::param(
                "class",
                format!("unknown symmetry class `{other}`"),
            )),
        }
    }
}

/// Ladder height, kept in exact form whenever the user supplied one.
///
/// Flat-band detection is number-theoretic, so the exact form is never
/// reconstructed from a float.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum LengthSpec {
    /// `p/q` in lowest terms.
    Rational(Ratio<i64>),
    /// `(p/q)·π`.
    PiMultiple(Ratio<i64>),
}

impl LengthSpec {
    pub fn rational(num: i64, den: i64) -> Self {
        LengthSpec::Rational(Ratio::new(num, den))
    }

    pub fn pi_multiple(num: i64, den: i64) -> Self {
        LengthSpec::PiMultiple(Ratio::new(num, den))
    }

    pub fn integer(n: i64) -> Self {
        LengthSpec::Rational(Ratio::from_integer(n))
    }

    pub fn value(&self) -> f64 {
        match self {
            LengthSpec::Rational(r) => ratio_to_f64(r),
            LengthSpec::PiMultiple(r) => ratio_to_f64(r) * PI,
        }
    }

    /// The exact rational value, `None` for irrational lengths.
    pub fn as_rational(&self) -> Option<Ratio<i64>> {
        match self {
            LengthSpec::Rational(r) => Some(*r),
            LengthSpec::PiMultiple(_) => None,
        }
    }
}

fn ratio_to_f64(r: &Ratio<i64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

impl fmt::Display for LengthSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LengthSpec::Rational(r) if r.is_integer() => write!(f, "{}", r.numer()),
            LengthSpec::Rational(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            LengthSpec::PiMultiple(r) => {
                let (n, d) = (*r.numer(), *r.denom());
                match (n, d) {
                    (1, 1) => write!(f, "pi"),
                    (n, 1) => write!(f, "{n}pi"),
                    (1, d) => write!(f, "pi/{d}"),
                    (n, d) => write!(f, "{n}pi/{d}"),
                }
            }
        }
    }
}

/// Parses an exact non-negative decimal or fraction: `2`, `0.5`, `1/2`, `2.5/3`.
fn parse_exact_ratio(s: &str) -> Option<Ratio<i64>> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((n, d)) = s.split_once('/') {
        let n = parse_exact_ratio(n)?;
        let d = parse_exact_ratio(d)?;
        if *d.numer() == 0 {
            return None;
        }
        return Some(n / d);
    }
    let (int_part, frac_part) = match s.split_once('.') {
        Some((i, f)) => (i, f),
        None => (s, ""),
    };
    if !int_part.chars().all(|c| c.is_ascii_digit())
        || !frac_part.chars().all(|c| c.is_ascii_digit())
    {
        return None;
    }
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let num: i64 = digits.parse().ok()?;
    let den = 10i64.checked_pow(frac_part.len() as u32)?;
    Some(Ratio::new(num, den))
}

impl FromStr for LengthSpec {
    type Err = Error;

    /// Accepts `2`, `0.5`, `1/2`, `pi`, `10pi/7`, `10*pi/7`, `pi/2`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || {
            Error::param(
                "L",
                format!("cannot parse `{s}` as an exact length (examples: 2, 1/2, 10pi/7)"),
            )
        };
        let t: String = s
            .trim()
            .to_ascii_lowercase()
            .chars()
            .filter(|c| !c.is_whitespace())
            .collect();
        let spec = if let Some(pos) = t.find("pi") {
            let before = t[..pos].trim_end_matches('*');
            let after = &t[pos + 2..];
            let coeff = if before.is_empty() {
                Ratio::from_integer(1)
            } else {
                parse_exact_ratio(before).ok_or_else(bad)?
            };
            let divisor = if after.is_empty() {
                Ratio::from_integer(1)
            } else {
                let d = after.strip_prefix('/').ok_or_else(bad)?;
                parse_exact_ratio(d).ok_or_else(bad)?
            };
            if *divisor.numer() == 0 {
                return Err(bad());
            }
            LengthSpec::PiMultiple(coeff / divisor)
        } else {
            LengthSpec::Rational(parse_exact_ratio(&t).ok_or_else(bad)?)
        };
        if spec.value() <= 0.0 {
            return Err(Error::param("L", "ladder height must be positive"));
        }
        Ok(spec)
    }
}

/// Whether `q` lies in the set of irreducible fractions with odd numerator.
///
/// Returns the witness `(num, den)` when it does.
pub fn odd_numerator_witness(q: Ratio<i64>) -> Option<(i64, i64)> {
    let (n, d) = (*q.numer(), *q.denom());
    if n > 0 && n.is_odd() {
        Some((n, d))
    } else {
        None
    }
}

/// Height `L`, rung thickness `ε` and central-rung width ratio `μ`.
///
/// The graph-limit computations ignore `eps`; it is only used by the 2-D
/// finite element code.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LadderParams {
    pub length: LengthSpec,
    pub eps: f64,
    pub mu: f64,
}

impl LadderParams {
    pub fn new(length: LengthSpec, eps: f64, mu: f64) -> Result<Self> {
        let p = LadderParams { length, eps, mu };
        p.validate()?;
        Ok(p)
    }

    /// Parameters for graph-only work; `eps` is set to a nominal admissible value.
    pub fn graph(length: LengthSpec, mu: f64) -> Result<Self> {
        let l = length.value();
        let eps = 0.25 * l.min(1.0);
        Self::new(length, eps, mu)
    }

    pub fn l(&self) -> f64 {
        self.length.value()
    }

    pub fn with_eps(mut self, eps: f64) -> Result<Self> {
        self.eps = eps;
        self.validate()?;
        Ok(self)
    }

    pub fn with_mu(mut self, mu: f64) -> Result<Self> {
        self.mu = mu;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let l = self.l();
        if !(l.is_finite() && l > 0.0) {
            return Err(Error::param("L", format!("must be positive, got {l}")));
        }
        if !(self.eps.is_finite() && self.eps > 0.0 && self.eps < l.min(2.0) / 2.0) {
            return Err(Error::param(
                "eps",
                format!(
                    "need 0 < eps < min(1, L/2) = {}, got {}",
                    (l / 2.0).min(1.0),
                    self.eps
                ),
            ));
        }
        if !(self.mu.is_finite() && self.mu > 0.0) {
            return Err(Error::param(
                "mu",
                format!("must be positive, got {}", self.mu),
            ));
        }
        Ok(())
    }

    /// Weight of vertical edge `j`: `μ` on the perturbed rung, 1 elsewhere.
    pub fn rung_weight(&self, j: i64) -> f64 {
        if j == 0 {
            self.mu
        } else {
            1.0
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_exact_lengths() {
        assert_eq!("2".parse::<LengthSpec>().unwrap(), LengthSpec::integer(2));
        assert_eq!(
            "1/2".parse::<LengthSpec>().unwrap(),
            LengthSpec::rational(1, 2)
        );
        assert_eq!(
            "0.5".parse::<LengthSpec>().unwrap(),
            LengthSpec::rational(1, 2)
        );
        assert_eq!(
            "10pi/7".parse::<LengthSpec>().unwrap(),
            LengthSpec::pi_multiple(10, 7)
        );
        assert_eq!(
            "10*pi/7".parse::<LengthSpec>().unwrap(),
            LengthSpec::pi_multiple(10, 7)
        );
        assert_eq!(
            "pi".parse::<LengthSpec>().unwrap(),
            LengthSpec::pi_multiple(1, 1)
        );
        assert!("abc".parse::<LengthSpec>().is_err());
        assert!("0".parse::<LengthSpec>().is_err());
        assert!("1/0".parse::<LengthSpec>().is_err());
    }

    #[test]
    fn display_round_trips() {
        for s in ["2", "1/2", "10pi/7", "pi", "3pi", "pi/4"] {
            let l: LengthSpec = s.parse().unwrap();
            assert_eq!(l.to_string(), s);
            assert_eq!(l.to_string().parse::<LengthSpec>().unwrap(), l);
        }
    }

    #[test]
    fn eps_bounds() {
        let l = LengthSpec::integer(2);
        assert!(LadderParams::new(l, 0.1, 0.25).is_ok());
        assert!(LadderParams::new(l, 1.0, 0.25).is_err());
        assert!(LadderParams::new(LengthSpec::rational(1, 2), 0.25, 1.0).is_err());
        assert!(LadderParams::new(LengthSpec::rational(1, 2), 0.1, 1.0).is_ok());
        assert!(LadderParams::new(l, 0.1, 0.0).is_err());
    }

    #[test]
    fn odd_numerators() {
        assert_eq!(odd_numerator_witness(Ratio::new(1, 2)), Some((1, 2)));
        assert_eq!(odd_numerator_witness(Ratio::new(8, 1)), None);
        assert_eq!(odd_numerator_witness(Ratio::new(6, 4)), Some((3, 2)));
    }
}
