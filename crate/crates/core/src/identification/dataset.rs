use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Aging condition of the cell a dataset was measured on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CycleLabel {
    Fresh,
    Aged1000,
    Aged3300,
}

impl CycleLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            CycleLabel::Fresh => "fresh",
            CycleLabel::Aged1000 => "aged1000",
            CycleLabel::Aged3300 => "aged3300",
        }
    }

    pub fn cycles(self) -> u32 {
        match self {
            CycleLabel::Fresh => 0,
            CycleLabel::Aged1000 => 1000,
            CycleLabel::Aged3300 => 3300,
        }
    }
}

impl fmt::Display for CycleLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CycleLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fresh" => Ok(CycleLabel::Fresh),
            "aged1000" => Ok(CycleLabel::Aged1000),
            "aged3300" => Ok(CycleLabel::Aged3300),
            other => Err(Error::invariant(
                "phase",
                format!("expected fresh, aged1000 or aged3300, got `{other}`"),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t_s: f64,
    pub voltage_v: f64,
}

pub const MIN_SAMPLES: usize = 10;

/// Constant-current voltage record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentalDataset {
    samples: Vec<Sample>,
    pub current_a: f64,
    pub temperature_k: f64,
    pub label: CycleLabel,
}

impl ExperimentalDataset {
    /// Samples may arrive in any order; they are stored sorted by time.
    pub fn new(mut samples: Vec<Sample>, current_a: f64, temperature_k: f64, label: CycleLabel) -> Result<Self> {
        if samples.len() < MIN_SAMPLES {
            return Err(Error::Dataset(format!(
                "need at least {MIN_SAMPLES} samples, got {}",
                samples.len()
            )));
        }
        if let Some(s) = samples.iter().find(|s| !(s.t_s.is_finite() && s.voltage_v.is_finite())) {
            return Err(Error::Dataset(format!("non-finite sample {s:?}")));
        }
        if samples.iter().any(|s| s.t_s < 0.0) {
            return Err(Error::Dataset("negative sample time".into()));
        }
        if !(current_a.is_finite() && current_a != 0.0) {
            return Err(Error::Dataset(format!("current must be finite and nonzero, got {current_a}")));
        }
        samples.sort_by(|a, b| a.t_s.total_cmp(&b.t_s));
        if samples.windows(2).any(|w| w[1].t_s == w[0].t_s) {
            return Err(Error::Dataset("duplicate sample time".into()));
        }
        Ok(Self {
            samples,
            current_a,
            temperature_k,
            label,
        })
    }

    /// Reads a two-column CSV, either `t_s,voltage_V` or `capacity_Ah,voltage_V`.
    /// Capacity is converted to time with the applied current. The first
    /// column must be strictly increasing.
    pub fn from_reader<R: std::io::Read>(
        reader: R,
        current_a: f64,
        temperature_k: f64,
        label: CycleLabel,
    ) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers().map_err(|e| Error::Dataset(e.to_string()))?.clone();
        let to_seconds = match headers.iter().collect::<Vec<_>>().as_slice() {
            ["t_s", "voltage_V"] => 1.0,
            ["capacity_Ah", "voltage_V"] => {
                if !(current_a.is_finite() && current_a != 0.0) {
                    return Err(Error::Dataset("capacity axis needs a nonzero current".into()));
                }
                3600.0 / current_a.abs()
            }
            other => {
                return Err(Error::Dataset(format!(
                    "expected header `t_s,voltage_V` or `capacity_Ah,voltage_V`, found `{}`",
                    other.join(",")
                )))
            }
        };
        let mut samples = Vec::new();
        for (k, record) in rdr.records().enumerate() {
            let record = record.map_err(|e| Error::Dataset(e.to_string()))?;
            let field = |i: usize| -> Result<f64> {
                record
                    .get(i)
                    .ok_or_else(|| Error::Dataset(format!("row {}: missing column", k + 2)))?
                    .parse::<f64>()
                    .map_err(|e| Error::Dataset(format!("row {}: {e}", k + 2)))
            };
            samples.push(Sample {
                t_s: field(0)? * to_seconds,
                voltage_v: field(1)?,
            });
        }
        if let Some(k) = samples.windows(2).position(|w| !(w[1].t_s > w[0].t_s)) {
            return Err(Error::Dataset(format!(
                "{} column not strictly increasing at row {}",
                &headers[0],
                k + 3
            )));
        }
        Self::new(samples, current_a, temperature_k, label)
    }

    pub fn from_csv(path: &Path, current_a: f64, temperature_k: f64, label: CycleLabel) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_reader(file, current_a, temperature_k, label)
    }

    /// Writes `t_s,voltage_V`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let to_err = |e: csv::Error| Error::Dataset(e.to_string());
        w.write_record(["t_s", "voltage_V"]).map_err(to_err)?;
        for s in &self.samples {
            w.write_record([format!("{:e}", s.t_s), format!("{:e}", s.voltage_v)])
                .map_err(to_err)?;
        }
        w.flush().map_err(|e| Error::Dataset(e.to_string()))
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(std::io::BufWriter::new(file))
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn last_time(&self) -> f64 {
        self.samples[self.samples.len() - 1].t_s
    }
}

/// Coulomb-counted SOC at each sample, starting from a full cell.
pub fn soc_exp_from_coulomb_counting(dataset: &ExperimentalDataset, nominal_capacity_ah: f64) -> Vec<f64> {
    dataset
        .samples()
        .iter()
        .map(|s| 1.0 - dataset.current_a * s.t_s / (3600.0 * nominal_capacity_ah))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn csv_text(header: &str, rows: usize) -> String {
        let mut s = format!("{header}\n");
        for k in 0..rows {
            s.push_str(&format!("{},{}\n", k as f64 * 0.5, 4.1 - 0.01 * k as f64));
        }
        s
    }

    #[test]
    fn capacity_axis_is_converted_to_time() {
        let d = ExperimentalDataset::from_reader(
            csv_text("capacity_Ah,voltage_V", 12).as_bytes(),
            2.0,
            298.15,
            CycleLabel::Fresh,
        )
        .unwrap();
        assert_eq!(d.samples()[1].t_s, 0.5 * 1800.0);
    }

    #[test]
    fn rejects_short_or_unsorted_files() {
        let short = csv_text("t_s,voltage_V", 5);
        assert!(ExperimentalDataset::from_reader(short.as_bytes(), 1.0, 298.15, CycleLabel::Fresh).is_err());
        let mut unsorted = csv_text("t_s,voltage_V", 12);
        unsorted.push_str("1.0,3.0\n");
        assert!(ExperimentalDataset::from_reader(unsorted.as_bytes(), 1.0, 298.15, CycleLabel::Fresh).is_err());
        let bad_header = csv_text("time,voltage", 12);
        assert!(ExperimentalDataset::from_reader(bad_header.as_bytes(), 1.0, 298.15, CycleLabel::Fresh).is_err());
    }

    #[test]
    fn coulomb_counting_reaches_zero_at_nominal_charge() {
        let samples: Vec<Sample> = (0..=10)
            .map(|k| Sample {
                t_s: k as f64 * 360.0,
                voltage_v: 4.0,
            })
            .collect();
        let d = ExperimentalDataset::new(samples, 12.4, 298.15, CycleLabel::Fresh).unwrap();
        let soc = soc_exp_from_coulomb_counting(&d, 12.4);
        assert_eq!(soc[0], 1.0);
        assert!(soc[10].abs() < 1e-12);
        assert!((soc[5] - 0.5).abs() < 1e-12);
    }
}
