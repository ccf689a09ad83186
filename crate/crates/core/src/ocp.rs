//! Open-circuit potential tables with monotone piecewise-cubic interpolation.

use std::path::Path;

use crate::error::{Error, Result};

/// Tabulated `theta -> U(theta)` curve.
///
/// Interpolation is Fritsch-Carlson monotone cubic Hermite (the slope rule
/// used by SciPy's `PchipInterpolator`), so a monotone table yields a
/// monotone, C1 curve. Outside the table the end slopes are extended
/// linearly.
#[derive(Debug, Clone, PartialEq)]
pub struct OcpCurve {
    theta: Vec<f64>,
    voltage: Vec<f64>,
    slope: Vec<f64>,
}

impl OcpCurve {
    /// Builds a curve from a table whose stoichiometries are strictly
    /// increasing inside [0, 1] and whose voltages are strictly decreasing.
    pub fn new(theta: Vec<f64>, voltage: Vec<f64>) -> Result<Self> {
        if theta.len() != voltage.len() {
            return Err(Error::Parse {
                what: "OCP table".into(),
                message: format!("{} stoichiometries but {} voltages", theta.len(), voltage.len()),
            });
        }
        if theta.len() < 2 {
            return Err(Error::Parse {
                what: "OCP table".into(),
                message: "need at least two rows".into(),
            });
        }
        if theta.iter().chain(&voltage).any(|v| !v.is_finite()) {
            return Err(Error::Parse {
                what: "OCP table".into(),
                message: "non-finite entry".into(),
            });
        }
        if theta[0] < 0.0 || theta[theta.len() - 1] > 1.0 {
            return Err(Error::Parse {
                what: "OCP table".into(),
                message: "stoichiometry must lie in [0, 1]".into(),
            });
        }
        for (k, w) in theta.windows(2).enumerate() {
            if w[1] <= w[0] {
                return Err(Error::Parse {
                    what: "OCP table".into(),
                    message: format!("theta not strictly increasing at row {}", k + 2),
                });
            }
        }
        for (k, w) in voltage.windows(2).enumerate() {
            if w[1] >= w[0] {
                return Err(Error::Parse {
                    what: "OCP table".into(),
                    message: format!("voltage not strictly decreasing at row {}", k + 2),
                });
            }
        }
        let slope = pchip_slopes(&theta, &voltage);
        Ok(Self {
            theta,
            voltage,
            slope,
        })
    }

    /// Reads a `theta,voltage` CSV with a header row.
    pub fn from_csv(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_reader(file).map_err(|e| match e {
            Error::Parse { message, .. } => Error::Parse {
                what: format!("OCP table {}", path.display()),
                message,
            },
            other => other,
        })
    }

    pub fn from_reader<R: std::io::Read>(reader: R) -> Result<Self> {
        let parse_err = |message: String| Error::Parse {
            what: "OCP table".into(),
            message,
        };
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers().map_err(|e| parse_err(e.to_string()))?.clone();
        if headers.len() != 2 || &headers[0] != "theta" || &headers[1] != "voltage" {
            return Err(parse_err(format!(
                "expected header `theta,voltage`, found `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut theta = Vec::new();
        let mut voltage = Vec::new();
        for (k, record) in rdr.records().enumerate() {
            let record = record.map_err(|e| parse_err(e.to_string()))?;
            let field = |i: usize| -> Result<f64> {
                record[i]
                    .parse::<f64>()
                    .map_err(|e| parse_err(format!("row {}: {e}", k + 2)))
            };
            theta.push(field(0)?);
            voltage.push(field(1)?);
        }
        Self::new(theta, voltage)
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn voltage(&self) -> &[f64] {
        &self.voltage
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.theta.len();
        if x <= self.theta[0] {
            return self.voltage[0] + self.slope[0] * (x - self.theta[0]);
        }
        if x >= self.theta[n - 1] {
            return self.voltage[n - 1] + self.slope[n - 1] * (x - self.theta[n - 1]);
        }
        // first index with theta > x, minus one
        let k = self.theta.partition_point(|&t| t <= x) - 1;
        let h = self.theta[k + 1] - self.theta[k];
        let s = (x - self.theta[k]) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        h00 * self.voltage[k]
            + h10 * h * self.slope[k]
            + h01 * self.voltage[k + 1]
            + h11 * h * self.slope[k + 1]
    }
}

fn pchip_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let delta: Vec<f64> = (0..n - 1).map(|k| (y[k + 1] - y[k]) / h[k]).collect();
    if n == 2 {
        return vec![delta[0], delta[0]];
    }
    let mut d = vec![0.0; n];
    for k in 1..n - 1 {
        if delta[k - 1] * delta[k] <= 0.0 {
            d[k] = 0.0;
        } else {
            let w1 = 2.0 * h[k] + h[k - 1];
            let w2 = h[k] + 2.0 * h[k - 1];
            d[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
        }
    }
    d[0] = end_slope(h[0], h[1], delta[0], delta[1]);
    d[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    d
}

// Three-point, shape-preserving end condition.
fn end_slope(h0: f64, h1: f64, m0: f64, m1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * m0 - h0 * m1) / (h0 + h1);
    if d.signum() != m0.signum() {
        0.0
    } else if m0.signum() != m1.signum() && d.abs() > 3.0 * m0.abs() {
        3.0 * m0
    } else {
        d
    }
}

/// The two electrode curves of a cell.
#[derive(Debug, Clone, PartialEq)]
pub struct OcpSet {
    pub positive: OcpCurve,
    pub negative: OcpCurve,
}
