//! Time-delay transfer-function model
//!
//! ```text
//!            b0 + b0_tau e^{-tau0 s}
//! G(s) = ------------------------------------------ e^{-tau s}
//!        s^3 + a2 s^2 + a1 s + a0 + a0_theta e^{-theta s}
//! ```
//!
//! evaluated on the imaginary axis `s = jω` and fitted to frequency-response
//! samples by least squares.

mod constraints;
mod dataset;
mod plot;
mod problem;

pub use constraints::{feasibility, min_denominator_magnitude, ConstraintGroup, FeasibilityReport};
pub use dataset::{FrequencySample, ObservationDataset, REFERENCE_SAMPLES, REFERENCE_STATIC_GAIN};
pub use plot::{bode_points, dataset_bode_points, log_grid, nyquist_points, BodePoint, PlotGrid};
pub use problem::{default_search_bounds, penalized_cost, IdentificationProblem, PenaltySettings};

use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Magnitudes below this are treated as an exact zero of a denominator.
pub const DEGENERATE_TOLERANCE: f64 = 1e-300;

/// Default tolerance turning strict inequalities into closed ones.
pub const DEFAULT_EPS: f64 = 1e-9;

/// The nine real parameters of the model.
///
/// Infeasible vectors are representable on purpose; see [`feasibility`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParameters {
    pub b0: f64,
    pub b0_tau: f64,
    pub tau0: f64,
    pub tau: f64,
    pub a2: f64,
    pub a1: f64,
    pub a0: f64,
    pub a0_theta: f64,
    pub theta: f64,
}

impl ModelParameters {
    pub const FIELD_NAMES: [&'static str; 9] =
        ["b0", "b0_tau", "tau0", "tau", "a2", "a1", "a0", "a0_theta", "theta"];

    pub fn from_array(v: [f64; 9]) -> Result<Self> {
        if let Some(i) = v.iter().position(|x| !x.is_finite()) {
            return Err(Error::InvalidParameters(format!(
                "{} is not finite",
                Self::FIELD_NAMES[i]
            )));
        }
        let [b0, b0_tau, tau0, tau, a2, a1, a0, a0_theta, theta] = v;
        Ok(Self { b0, b0_tau, tau0, tau, a2, a1, a0, a0_theta, theta })
    }

    pub fn to_array(&self) -> [f64; 9] {
        [
            self.b0,
            self.b0_tau,
            self.tau0,
            self.tau,
            self.a2,
            self.a1,
            self.a0,
            self.a0_theta,
            self.theta,
        ]
    }

    /// `(b0 + b0_tau) / (a0 + a0_theta)`, i.e. `G(0)`.
    pub fn static_gain(&self) -> Result<f64> {
        let den = self.a0 + self.a0_theta;
        if den.abs() < DEGENERATE_TOLERANCE {
            return Err(Error::DegenerateDenominator { what: "a0 + a0_theta", magnitude: den.abs() });
        }
        Ok((self.b0 + self.b0_tau) / den)
    }

    /// `G(jω)`. Negative frequencies are accepted and give the conjugate.
    pub fn transfer_value(&self, omega: f64) -> Result<Complex64> {
        let w2 = omega * omega;
        let num = self.b0 + self.b0_tau * Complex64::cis(-omega * self.tau0);
        // (jω)^3 = -jω^3 and (jω)^2 = -ω^2
        let den = Complex64::new(self.a0 - self.a2 * w2, omega * (self.a1 - w2))
            + self.a0_theta * Complex64::cis(-omega * self.theta);
        let magnitude = den.norm();
        if !(magnitude >= DEGENERATE_TOLERANCE) {
            return Err(Error::DegenerateDenominator { what: "denominator", magnitude });
        }
        Ok(num / den * Complex64::cis(-omega * self.tau))
    }

    /// Sum of squared real and imaginary residuals against `data`.
    pub fn cost(&self, data: &ObservationDataset) -> Result<f64> {
        data.samples().iter().try_fold(0.0, |acc, s| {
            let g = self.transfer_value(s.omega)?;
            let dr = g.re - s.re_value;
            let di = g.im - s.im_value;
            Ok(acc + dr * dr + di * di)
        })
    }

    /// Reads a `name,value` CSV holding all nine fields.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self, csv::Error> {
        let mut rdr = csv::Reader::from_reader(reader);
        let mut values: [Option<f64>; 9] = [None; 9];
        for row in rdr.deserialize::<(String, f64)>() {
            let (name, value) = row?;
            let name = name.trim();
            let idx = Self::FIELD_NAMES.iter().position(|n| *n == name).ok_or_else(|| {
                csv::Error::from(std::io::Error::new(
                    std::io::ErrorKind::InvalidData,
                    format!("unknown parameter `{name}`"),
                ))
            })?;
            values[idx] = Some(value);
        }
        let mut out = [0.0; 9];
        for (i, v) in values.iter().enumerate() {
            out[i] = v.ok_or_else(|| {
                csv::Error::from(std::io::Error::new(
                    std::io::ErrorKind::InvalidData,
                    format!("missing parameter `{}`", Self::FIELD_NAMES[i]),
                ))
            })?;
        }
        Self::from_array(out).map_err(|e| {
            csv::Error::from(std::io::Error::new(std::io::ErrorKind::InvalidData, e.to_string()))
        })
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), csv::Error> {
        let mut wtr = csv::Writer::from_writer(writer);
        wtr.write_record(["name", "value"])?;
        for (name, value) in Self::FIELD_NAMES.iter().zip(self.to_array()) {
            wtr.serialize((name, value))?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_csv(file).map_err(|e| Error::csv(path, e))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(file).map_err(|e| Error::csv(path, e))
    }
}

/// The eight searched genes. `b0_tau` is not free: it is recovered from the
/// static gain by [`complete_parameters`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FreeGenes(pub [f64; 8]);

impl FreeGenes {
    pub const NAMES: [&'static str; 8] = ["b0", "tau0", "tau", "a2", "a1", "a0", "a0_theta", "theta"];

    pub fn from_slice(genes: &[f64]) -> Result<Self> {
        let arr: [f64; 8] = genes
            .try_into()
            .map_err(|_| Error::LengthMismatch { expected: 8, actual: genes.len() })?;
        Ok(Self(arr))
    }

    /// Drops `b0_tau`.
    pub fn from_parameters(p: &ModelParameters) -> Self {
        Self([p.b0, p.tau0, p.tau, p.a2, p.a1, p.a0, p.a0_theta, p.theta])
    }
}

/// The double `c` next to `target - b0` for which `b0 + c` is closest to
/// `target`. Matters when `target` is tiny next to `b0`.
fn closest_complement(b0: f64, target: f64) -> f64 {
    let c = target - b0;
    if !c.is_finite() {
        return c;
    }
    let miss = |c: f64| {
        // exact b0 + c as hi + lo (Knuth two-sum)
        let hi = b0 + c;
        let bv = hi - b0;
        let lo = (b0 - (hi - bv)) + (c - bv);
        ((hi - target) + lo).abs()
    };
    [c.next_down(), c.next_up()]
        .into_iter()
        .fold(c, |best, cand| if miss(cand) < miss(best) { cand } else { best })
}

/// Builds the full parameter vector, choosing `b0_tau` so that the static gain
/// equals `k`.
pub fn complete_parameters(genes: &FreeGenes, k: f64) -> ModelParameters {
    let [b0, tau0, tau, a2, a1, a0, a0_theta, theta] = genes.0;
    ModelParameters {
        b0,
        b0_tau: closest_complement(b0, k * (a0 + a0_theta)),
        tau0,
        tau,
        a2,
        a1,
        a0,
        a0_theta,
        theta,
    }
}
