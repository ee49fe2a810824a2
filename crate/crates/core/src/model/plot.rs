//! Bode and Nyquist plot data.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{ModelParameters, ObservationDataset};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BodePoint {
    pub omega: f64,
    pub mag_db: f64,
    pub phase_deg: f64,
}

/// Log-spaced frequency grid settings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PlotGrid {
    pub omega_min: f64,
    pub omega_max: f64,
    pub points: usize,
}

impl Default for PlotGrid {
    fn default() -> Self {
        Self { omega_min: 1e-4, omega_max: 1e-1, points: 500 }
    }
}

impl PlotGrid {
    pub fn omegas(&self) -> Result<Vec<f64>> {
        log_grid(self.omega_min, self.omega_max, self.points)
    }
}

/// `n` log-spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo && hi.is_finite()) || n < 2 {
        return Err(Error::InvalidConfig(format!(
            "frequency grid needs 0 < min < max and at least 2 points (got [{lo}, {hi}], {n})"
        )));
    }
    let (l0, l1) = (lo.log10(), hi.log10());
    let step = (l1 - l0) / (n - 1) as f64;
    Ok((0..n)
        .map(|i| match i {
            0 => lo,
            _ if i == n - 1 => hi,
            _ => 10f64.powf(l0 + step * i as f64),
        })
        .collect())
}

fn check_increasing(omegas: &[f64]) -> Result<()> {
    if omegas.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidConfig("frequency grid must be strictly increasing".into()));
    }
    Ok(())
}

/// Magnitude in dB and phase in degrees, unwrapped so that consecutive
/// phases never differ by more than 180°.
fn bode_from_values(points: impl IntoIterator<Item = (f64, Complex64)>) -> Result<Vec<BodePoint>> {
    let mut out: Vec<BodePoint> = Vec::new();
    let mut prev: Option<f64> = None;
    for (omega, g) in points {
        let mag = g.norm();
        if !(mag > 0.0) {
            return Err(Error::ZeroMagnitude { omega });
        }
        let mut phase = g.arg();
        if let Some(p) = prev {
            phase -= 2.0 * PI * ((phase - p) / (2.0 * PI)).round();
        }
        prev = Some(phase);
        out.push(BodePoint { omega, mag_db: 20.0 * mag.log10(), phase_deg: phase.to_degrees() });
    }
    Ok(out)
}

pub fn bode_points(p: &ModelParameters, omegas: &[f64]) -> Result<Vec<BodePoint>> {
    check_increasing(omegas)?;
    let values = omegas
        .iter()
        .map(|&w| p.transfer_value(w).map(|g| (w, g)))
        .collect::<Result<Vec<_>>>()?;
    bode_from_values(values)
}

/// Bode data of the measured samples themselves.
pub fn dataset_bode_points(data: &ObservationDataset) -> Result<Vec<BodePoint>> {
    bode_from_values(
        data.samples()
            .iter()
            .map(|s| (s.omega, Complex64::new(s.re_value, s.im_value))),
    )
}

/// `(Re G(jω), Im G(jω))` per frequency.
pub fn nyquist_points(p: &ModelParameters, omegas: &[f64]) -> Result<Vec<(f64, f64)>> {
    omegas
        .iter()
        .map(|&w| p.transfer_value(w).map(|g| (g.re, g.im)))
        .collect()
}
