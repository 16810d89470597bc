//! JSON encodings for the crate's value types and a float formatter that
//! prints every number with 17 significant digits, so serialized output is
//! byte-stable across runs and platforms.

use crate::ball::{BallError, FormalBall, GateWord};
use crate::linalg::{ComplexMatrix, LinalgError};
use crate::qwhile::RunReport;
use crate::state::{DensityMatrix, PureState, StateError};
use crate::valuation::{SimpleValuation, ValuationError};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum JsonError {
    #[error("json: {0}")]
    Serde(#[from] serde_json::Error),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Ball(#[from] BallError),
    #[error(transparent)]
    Valuation(#[from] ValuationError),
    #[error("invalid encoding: {0}")]
    Invalid(String),
}

/// serde_json formatter that writes every float as `{:.16e}`: one leading
/// digit plus sixteen fractional digits, enough to round-trip any f64.
struct SigDigits17;

impl serde_json::ser::Formatter for SigDigits17 {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W>(&mut self, writer: &mut W, value: f32) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        write!(writer, "{value:.16e}")
    }
}

/// Serializes with 17-significant-digit floats and a trailing newline.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String, JsonError> {
    let mut out = Vec::new();
    let mut serializer = serde_json::Serializer::with_formatter(&mut out, SigDigits17);
    value.serialize(&mut serializer)?;
    out.push(b'\n');
    Ok(String::from_utf8(out).expect("serde_json writes utf-8"))
}

/// Matrix wire format: row-major real and imaginary parts.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixJson {
    pub fn of(m: &ComplexMatrix) -> Self {
        let dim = m.dim();
        let re = (0..dim)
            .map(|i| (0..dim).map(|j| m[(i, j)].re).collect())
            .collect();
        let im = (0..dim)
            .map(|i| (0..dim).map(|j| m[(i, j)].im).collect())
            .collect();
        Self { dim, re, im }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix, JsonError> {
        if self.re.len() != self.dim
            || self.im.len() != self.dim
            || self.re.iter().any(|row| row.len() != self.dim)
            || self.im.iter().any(|row| row.len() != self.dim)
        {
            return Err(JsonError::Invalid(format!(
                "matrix rows do not match dim {}",
                self.dim
            )));
        }
        let mut entries = Vec::with_capacity(self.dim * self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                entries.push(Complex64::new(self.re[i][j], self.im[i][j]));
            }
        }
        Ok(ComplexMatrix::new(self.dim, entries)?)
    }
}

/// Density matrix wire format: the matrix plus its trace.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DensityJson {
    #[serde(flatten)]
    pub matrix: MatrixJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<f64>,
}

impl DensityJson {
    pub fn of(rho: &DensityMatrix) -> Self {
        Self {
            matrix: MatrixJson::of(rho.matrix()),
            trace: Some(rho.trace()),
        }
    }

    pub fn to_density(&self) -> Result<DensityMatrix, JsonError> {
        let mat = self.matrix.to_matrix()?;
        let rho = DensityMatrix::new(mat)?;
        if let Some(t) = self.trace {
            if (t - rho.trace()).abs() > 1e-6 {
                return Err(JsonError::Invalid(format!(
                    "declared trace {t} does not match computed {}",
                    rho.trace()
                )));
            }
        }
        Ok(rho)
    }
}

/// Amplitude vector wire format.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AmplitudesJson {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl AmplitudesJson {
    pub fn of(psi: &PureState) -> Self {
        Self {
            re: psi.amplitudes().iter().map(|z| z.re).collect(),
            im: psi.amplitudes().iter().map(|z| z.im).collect(),
        }
    }

    pub fn to_pure(&self) -> Result<PureState, JsonError> {
        if self.re.len() != self.im.len() {
            return Err(JsonError::Invalid(
                "re and im arrays differ in length".into(),
            ));
        }
        let amps = self
            .re
            .iter()
            .zip(&self.im)
            .map(|(&re, &im)| Complex64::new(re, im))
            .collect();
        Ok(PureState::new(amps)?)
    }
}

/// Formal ball wire format: either a gate-word center or explicit
/// amplitudes, plus a radius.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BallJson {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub word: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub qubits: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub center: Option<AmplitudesJson>,
    pub radius: f64,
}

impl BallJson {
    pub fn of_word(word: &GateWord, radius: f64) -> Self {
        Self {
            word: Some(word.to_string()),
            qubits: Some(word.qubits),
            center: None,
            radius,
        }
    }

    pub fn of_center(ball: &FormalBall) -> Self {
        Self {
            word: None,
            qubits: None,
            center: Some(AmplitudesJson::of(&ball.center)),
            radius: ball.radius,
        }
    }

    pub fn to_ball(&self) -> Result<FormalBall, JsonError> {
        if self.radius < 0.0 || !self.radius.is_finite() {
            return Err(JsonError::Invalid(format!(
                "radius {} must be non-negative",
                self.radius
            )));
        }
        let center = match (&self.word, &self.center) {
            (Some(w), None) => {
                let qubits = match self.qubits {
                    Some(n) => n,
                    None => {
                        let parsed = GateWord::parse(w, 4)?;
                        parsed
                            .letters
                            .iter()
                            .flat_map(|(_, ts)| ts.iter().copied())
                            .max()
                            .map_or(1, |m| m + 1)
                    }
                };
                GateWord::parse(w, qubits)?.state()?
            }
            (None, Some(c)) => c.to_pure()?,
            _ => {
                return Err(JsonError::Invalid(
                    "ball needs exactly one of \"word\" or \"center\"".into(),
                ))
            }
        };
        Ok(FormalBall::new(center, self.radius))
    }
}

/// One valuation atom: a ball with its weight.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AtomJson {
    #[serde(flatten)]
    pub ball: BallJson,
    pub weight: f64,
}

/// Simple valuation wire format.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ValuationJson {
    pub atoms: Vec<AtomJson>,
}

impl ValuationJson {
    pub fn of(v: &SimpleValuation) -> Self {
        Self {
            atoms: v
                .atoms()
                .iter()
                .map(|(ball, weight)| AtomJson {
                    ball: BallJson::of_center(ball),
                    weight: *weight,
                })
                .collect(),
        }
    }

    pub fn to_valuation(&self) -> Result<SimpleValuation, JsonError> {
        let atoms = self
            .atoms
            .iter()
            .map(|a| Ok((a.ball.to_ball()?, a.weight)))
            .collect::<Result<Vec<_>, JsonError>>()?;
        Ok(SimpleValuation::new(atoms)?)
    }
}

/// Finite poset wire format.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PosetJson {
    pub elements: Vec<String>,
    pub leq: Vec<Vec<bool>>,
}

/// Run report wire format.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReportJson {
    pub final_state: DensityJson,
    pub residual: f64,
    pub iterations: BTreeMap<String, usize>,
    pub converged: bool,
}

impl RunReportJson {
    pub fn of(report: &RunReport) -> Self {
        Self {
            final_state: DensityJson::of(&report.final_state),
            residual: report.residual,
            iterations: report
                .iterations
                .iter()
                .map(|(k, v)| (k.to_string(), *v))
                .collect(),
            converged: report.converged,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil;
    use proptest::prelude::*;

    #[test]
    fn float_formatting_is_17_digits() {
        let s = to_json_string(&0.5f64).unwrap();
        assert_eq!(s, "5.0000000000000000e-1\n");
        let s = to_json_string(&vec![1.0f64, 0.1]).unwrap();
        assert!(s.contains("1.0000000000000000e0"));
        assert!(s.contains("1.0000000000000001e-1"));
    }

    #[test]
    fn matrix_roundtrip() {
        let mut rng = testutil::rng(91);
        let m = testutil::random_hermitian(&mut rng, 4);
        let json = to_json_string(&MatrixJson::of(&m)).unwrap();
        let parsed: MatrixJson = serde_json::from_str(&json).unwrap();
        let back = parsed.to_matrix().unwrap();
        assert!(back.max_diff(&m) == 0.0, "17 digits round-trips exactly");
    }

    #[test]
    fn density_roundtrip_validates() {
        let mut rng = testutil::rng(92);
        let rho = testutil::random_density(&mut rng, 2);
        let json = to_json_string(&DensityJson::of(&rho)).unwrap();
        let parsed: DensityJson = serde_json::from_str(&json).unwrap();
        let back = parsed.to_density().unwrap();
        assert!(back.matrix().max_diff(rho.matrix()) == 0.0);

        // tampered trace is rejected
        let mut bad: DensityJson = serde_json::from_str(&json).unwrap();
        bad.trace = Some(0.2);
        assert!(bad.to_density().is_err());
    }

    #[test]
    fn ball_accepts_word_or_center() {
        let json = r#"{"word": "H(0)", "radius": 0.25}"#;
        let ball: BallJson = serde_json::from_str(json).unwrap();
        let b = ball.to_ball().unwrap();
        assert_eq!(b.dim(), 2);
        assert_eq!(b.radius, 0.25);

        let json = r#"{"center": {"re": [1.0, 0.0], "im": [0.0, 0.0]}, "radius": 0.0}"#;
        let ball: BallJson = serde_json::from_str(json).unwrap();
        assert_eq!(ball.to_ball().unwrap().radius, 0.0);

        let json = r#"{"radius": 0.1}"#;
        let ball: BallJson = serde_json::from_str(json).unwrap();
        assert!(ball.to_ball().is_err());
    }

    proptest! {
        #[test]
        fn json_floats_roundtrip_exactly(bits in any::<u64>()) {
            let x = f64::from_bits(bits);
            prop_assume!(x.is_finite());
            let s = to_json_string(&x).unwrap();
            let back: f64 = serde_json::from_str(s.trim()).unwrap();
            prop_assert_eq!(x.to_bits(), back.to_bits());
        }
    }
}
