//! Weighted coresets: the deterministic Contour construction, importance
//! sampling baselines, and an empirical quality estimate.

mod contour;
mod quality;
mod sampling;

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dataset::{compute_stats, write_atomic, Dataset};
use crate::error::{Error, Result};

pub use contour::{
    build_contour_coreset, first_contour_point, plan_region_counts, sort_data_in_regions,
    RegionAssignment, RegionPlan, DEFAULT_REGIONS,
};
pub use quality::{coreset_relative_error, QualitySummary};
pub use sampling::{build_d2_coreset, build_lightweight_coreset, build_uniform_coreset, D2Variant};

/// A dataset row chosen as a coreset representative.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedPoint {
    pub position: Vec<f64>,
    pub weight: f64,
    pub source_index: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoresetMethod {
    Contour,
    Lightweight,
    D2BflStyle,
    D2OneshotStyle,
    Uniform,
}

impl CoresetMethod {
    pub const ALL: [CoresetMethod; 5] = [
        CoresetMethod::Contour,
        CoresetMethod::Lightweight,
        CoresetMethod::D2BflStyle,
        CoresetMethod::D2OneshotStyle,
        CoresetMethod::Uniform,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CoresetMethod::Contour => "contour",
            CoresetMethod::Lightweight => "lightweight",
            CoresetMethod::D2BflStyle => "d2_bfl_style",
            CoresetMethod::D2OneshotStyle => "d2_oneshot_style",
            CoresetMethod::Uniform => "uniform",
        }
    }
}

impl fmt::Display for CoresetMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CoresetMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CoresetMethod::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::invalid(format!("unknown coreset method {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Coreset {
    pub points: Vec<WeightedPoint>,
    pub method: CoresetMethod,
    /// Region count for Contour, `None` for the sampling baselines.
    pub regions: Option<usize>,
    pub construct_seconds: f64,
}

impl Coreset {
    /// Wraps explicit weighted points, e.g. a whole dataset with unit weights.
    pub fn from_points(points: Vec<WeightedPoint>, method: CoresetMethod) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::invalid("coreset needs at least one point"));
        }
        let d = points[0].position.len();
        for p in &points {
            if p.position.len() != d {
                return Err(Error::invalid("coreset points differ in dimension"));
            }
            if !(p.weight > 0.0 && p.weight.is_finite()) {
                return Err(Error::invalid(format!("bad weight {}", p.weight)));
            }
        }
        Ok(Coreset {
            points,
            method,
            regions: None,
            construct_seconds: 0.0,
        })
    }

    /// Every dataset row with weight one.
    pub fn identity(data: &Dataset) -> Self {
        let points = data
            .rows()
            .enumerate()
            .map(|(i, r)| WeightedPoint {
                position: r.to_vec(),
                weight: 1.0,
                source_index: i,
            })
            .collect();
        Coreset {
            points,
            method: CoresetMethod::Uniform,
            regions: None,
            construct_seconds: 0.0,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dims(&self) -> usize {
        self.points.first().map_or(0, |p| p.position.len())
    }

    pub fn weights(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.weight).collect()
    }

    pub fn total_weight(&self) -> f64 {
        self.points.iter().map(|p| p.weight).sum()
    }

    /// Coreset points as a weight-free dataset, for running Lloyd on them.
    pub fn to_dataset(&self) -> Result<Dataset> {
        Dataset::from_rows(
            self.points.iter().map(|p| p.position.clone()).collect(),
            format!("{}-coreset", self.method),
        )
    }

    /// CSV body: `source_index,weight,x0,…`. Excludes timing so repeated
    /// deterministic constructions serialise identically.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("source_index,weight");
        for j in 0..self.dims() {
            out.push_str(&format!(",x{j}"));
        }
        out.push('\n');
        for p in &self.points {
            out.push_str(&format!("{},{}", p.source_index, p.weight));
            for v in &p.position {
                out.push_str(&format!(",{v}"));
            }
            out.push('\n');
        }
        out
    }

    pub fn sidecar(&self) -> CoresetSidecar {
        CoresetSidecar {
            method: self.method,
            k: self.regions,
            m: self.len(),
            construct_seconds: self.construct_seconds,
        }
    }

    /// Writes the CSV to `path` and the JSON sidecar next to it
    /// (`<path>.json`).
    pub fn write(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.to_csv_string().as_bytes())?;
        let json = serde_json::to_string_pretty(&self.sidecar())?;
        write_atomic(&sidecar_path(path), json.as_bytes())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut lines = text.lines().enumerate();
        lines.next();
        let mut points = Vec::new();
        for (i, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let cells: Vec<&str> = line.split(',').collect();
            let num = |c: usize| -> Result<f64> {
                cells
                    .get(c)
                    .and_then(|s| s.trim().parse::<f64>().ok())
                    .ok_or_else(|| Error::Parse {
                        row: i + 1,
                        column: c + 1,
                        message: "expected a number".into(),
                    })
            };
            if cells.len() < 3 {
                return Err(Error::Parse {
                    row: i + 1,
                    column: cells.len(),
                    message: "coreset rows need source_index, weight and coordinates".into(),
                });
            }
            let source_index = num(0)? as usize;
            let weight = num(1)?;
            let position = (2..cells.len()).map(num).collect::<Result<Vec<_>>>()?;
            points.push(WeightedPoint {
                position,
                weight,
                source_index,
            });
        }
        let side = sidecar_path(path);
        let (method, regions, secs) = match std::fs::read_to_string(&side) {
            Ok(s) => {
                let meta: CoresetSidecar = serde_json::from_str(&s)?;
                (meta.method, meta.k, meta.construct_seconds)
            }
            Err(_) => (CoresetMethod::Uniform, None, 0.0),
        };
        let mut cs = Coreset::from_points(points, method)?;
        cs.regions = regions;
        cs.construct_seconds = secs;
        Ok(cs)
    }
}

pub fn sidecar_path(path: &Path) -> std::path::PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    s.into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoresetSidecar {
    pub method: CoresetMethod,
    pub k: Option<usize>,
    pub m: usize,
    pub construct_seconds: f64,
}

/// Lightweight sampling distribution
/// `q(x) = 1/(2n) + ‖x − mean‖² / (2 Σ‖x' − mean‖²)`.
/// Falls back to uniform when every point coincides with the mean.
pub fn lightweight_distribution(data: &Dataset) -> Vec<f64> {
    let n = data.len();
    let mean = compute_stats(data).mean;
    let dist: Vec<f64> = data.rows().map(|r| sq_dist(r, &mean)).collect();
    let total: f64 = dist.iter().sum();
    if total <= 0.0 {
        return vec![1.0 / n as f64; n];
    }
    let floor = 0.5 / n as f64;
    dist.iter().map(|d| floor + 0.5 * d / total).collect()
}

pub fn lightweight_weight(q_x: f64, m: usize) -> Result<f64> {
    if !(q_x > 0.0) || m == 0 {
        return Err(Error::invalid(format!(
            "lightweight weight needs q > 0 and m > 0, got q={q_x}, m={m}"
        )));
    }
    Ok(1.0 / (m as f64 * q_x))
}

/// Builds any coreset kind. `regions` is only used by Contour and `seed`
/// only by the sampling baselines.
pub fn build_coreset(
    data: &Dataset,
    method: CoresetMethod,
    m: usize,
    regions: usize,
    seed: u64,
) -> Result<Coreset> {
    match method {
        CoresetMethod::Contour => build_contour_coreset(data, regions, m),
        CoresetMethod::Lightweight => build_lightweight_coreset(data, m, seed),
        CoresetMethod::D2BflStyle => build_d2_coreset(data, m, seed, D2Variant::BflStyle),
        CoresetMethod::D2OneshotStyle => build_d2_coreset(data, m, seed, D2Variant::OneshotStyle),
        CoresetMethod::Uniform => build_uniform_coreset(data, m, seed),
    }
}

pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}
