use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Measured frequency response of the reference plant: `(omega, A, B)` with
/// `G(jω) ≈ A + jB`.
pub const REFERENCE_SAMPLES: [(f64, f64, f64); 20] = [
    (0.0002, 0.03238, -0.00284),
    (0.0003, 0.03213, -0.00424),
    (0.0005, 0.03137, -0.00694),
    (0.0008, 0.02962, -0.01063),
    (0.001, 0.02813, -0.01278),
    (0.0012, 0.02645, -0.01465),
    (0.0015, 0.02371, -0.01692),
    (0.0018, 0.02087, -0.01857),
    (0.002, 0.01899, -0.01936),
    (0.003, 0.01063, -0.02054),
    (0.005, 0.00057, -0.01713),
    (0.008, -0.00540, -0.01110),
    (0.01, -0.00704, -0.00795),
    (0.011, -0.00757, -0.00658),
    (0.012, -0.00795, -0.00531),
    (0.014, -0.00843, -0.00296),
    (0.016, -0.00860, -0.00074),
    (0.018, -0.00846, 0.00147),
    (0.02, -0.00795, 0.00377),
    (0.025, -0.00346, 0.00982),
];

/// Known static gain of the reference plant.
pub const REFERENCE_STATIC_GAIN: f64 = 0.0322;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrequencySample {
    #[serde(rename = "omega")]
    pub omega: f64,
    #[serde(rename = "re")]
    pub re_value: f64,
    #[serde(rename = "im")]
    pub im_value: f64,
}

/// Frequency-response samples plus the static gain they are fitted under.
#[derive(Clone, Debug, PartialEq)]
pub struct ObservationDataset {
    samples: Vec<FrequencySample>,
    static_gain: f64,
}

impl ObservationDataset {
    pub fn new(samples: Vec<FrequencySample>, static_gain: f64) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidDataset("no samples".into()));
        }
        if !static_gain.is_finite() {
            return Err(Error::InvalidDataset("static gain is not finite".into()));
        }
        for (i, s) in samples.iter().enumerate() {
            if !(s.omega > 0.0) || !s.omega.is_finite() {
                return Err(Error::InvalidDataset(format!("row {}: omega must be positive", i + 1)));
            }
            if !s.re_value.is_finite() || !s.im_value.is_finite() {
                return Err(Error::InvalidDataset(format!("row {}: non-finite value", i + 1)));
            }
        }
        if let Some(i) = samples.windows(2).position(|w| w[1].omega <= w[0].omega) {
            return Err(Error::InvalidDataset(format!(
                "row {}: omegas must be strictly increasing",
                i + 2
            )));
        }
        Ok(Self { samples, static_gain })
    }

    /// The embedded reference dataset.
    pub fn reference() -> Self {
        let samples = REFERENCE_SAMPLES
            .iter()
            .map(|&(omega, re_value, im_value)| FrequencySample { omega, re_value, im_value })
            .collect();
        Self { samples, static_gain: REFERENCE_STATIC_GAIN }
    }

    pub fn samples(&self) -> &[FrequencySample] {
        &self.samples
    }

    pub fn static_gain(&self) -> f64 {
        self.static_gain
    }

    pub fn omegas(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.omega).collect()
    }

    /// Parses an `omega,re,im` CSV.
    pub fn read_csv<R: Read>(reader: R, static_gain: f64) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr
            .headers()
            .map_err(|e| Error::InvalidDataset(e.to_string()))?
            .clone();
        if headers.iter().collect::<Vec<_>>() != ["omega", "re", "im"] {
            return Err(Error::InvalidDataset(format!(
                "expected header `omega,re,im`, found `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let samples = rdr
            .deserialize()
            .collect::<Result<Vec<FrequencySample>, _>>()
            .map_err(|e| Error::InvalidDataset(e.to_string()))?;
        Self::new(samples, static_gain)
    }

    pub fn load(path: &Path, static_gain: f64) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_csv(file, static_gain)
            .map_err(|e| Error::InvalidDataset(format!("{}: {e}", path.display())))
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), csv::Error> {
        let mut wtr = csv::Writer::from_writer(writer);
        for s in &self.samples {
            wtr.serialize(s)?;
        }
        wtr.flush()?;
        Ok(())
    }
}
