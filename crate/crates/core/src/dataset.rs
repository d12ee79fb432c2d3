//! Classical input data: synthetic uneven Gaussian blobs, CSV ingest and the
//! per-dimension statistics used by the region construction.

use std::fmt;
use std::fs::File;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::seeds;

/// `n` points in `d` dimensions, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    values: Vec<f64>,
    dims: usize,
    labels: Option<Vec<u8>>,
    name: String,
}

impl Dataset {
    pub fn from_rows(rows: Vec<Vec<f64>>, name: impl Into<String>) -> Result<Self> {
        let dims = rows.first().map(Vec::len).unwrap_or(0);
        if rows.iter().any(|r| r.len() != dims) {
            return Err(Error::invalid("rows have differing lengths"));
        }
        Self::from_flat(rows.into_iter().flatten().collect(), dims, name)
    }

    pub fn from_flat(values: Vec<f64>, dims: usize, name: impl Into<String>) -> Result<Self> {
        if dims == 0 || values.is_empty() {
            return Err(Error::invalid(
                "dataset needs at least one point and one dimension",
            ));
        }
        if values.len() % dims != 0 {
            return Err(Error::invalid(
                "value count is not a multiple of the dimension",
            ));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!(
                "non-finite coordinate at row {}, column {}",
                i / dims,
                i % dims
            )));
        }
        Ok(Dataset {
            values,
            dims,
            labels: None,
            name: name.into(),
        })
    }

    pub fn with_labels(mut self, labels: Vec<u8>) -> Result<Self> {
        if labels.len() != self.len() {
            return Err(Error::invalid(format!(
                "{} labels for {} points",
                labels.len(),
                self.len()
            )));
        }
        if labels.iter().any(|&l| l > 1) {
            return Err(Error::invalid("reference labels must be 0 or 1"));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.values.len() / self.dims
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn labels(&self) -> Option<&[u8]> {
        self.labels.as_deref()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.dims..(i + 1) * self.dims]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.values.chunks_exact(self.dims)
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.values
    }

    /// Returns a copy with every point shifted by `offset`.
    pub fn translated(&self, offset: &[f64]) -> Self {
        assert_eq!(offset.len(), self.dims);
        let mut out = self.clone();
        for row in out.values.chunks_exact_mut(self.dims) {
            for (v, t) in row.iter_mut().zip(offset) {
                *v += t;
            }
        }
        out
    }

    /// Per-feature min-max scaling to `[0, 1]`. Constant features map to 0.
    pub fn normalized(&self) -> Self {
        let stats = compute_stats(self);
        let mut out = self.clone();
        for row in out.values.chunks_exact_mut(self.dims) {
            for (j, v) in row.iter_mut().enumerate() {
                let range = stats.dim_range[j];
                *v = if range > 0.0 {
                    (*v - stats.dim_min[j]) / range
                } else {
                    0.0
                };
            }
        }
        out
    }

    /// Writes the dataset as CSV with a header row `x0,…,x{d-1}` and an
    /// optional trailing `label` column.
    pub fn write_csv(&self, path: &Path, include_labels: bool) -> Result<()> {
        let labels = if include_labels { self.labels() } else { None };
        let mut out = String::new();
        let mut header: Vec<String> = (0..self.dims).map(|j| format!("x{j}")).collect();
        if labels.is_some() {
            header.push("label".into());
        }
        out.push_str(&header.join(","));
        out.push('\n');
        for (i, row) in self.rows().enumerate() {
            let mut cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            if let Some(l) = labels {
                cells.push(l[i].to_string());
            }
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        write_atomic(path, out.as_bytes())
    }
}

/// Which CSV columns become features.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum FeatureColumns {
    #[default]
    All,
    Indices(Vec<usize>),
}

/// Loads numeric features from a comma-separated file. Rows and columns in
/// error messages are 1-based and count the header line.
pub fn load_csv(path: &Path, columns: &FeatureColumns, has_header: bool) -> Result<Dataset> {
    let table = read_table(path, has_header)?;
    let width = table.width;
    let selected: Vec<usize> = match columns {
        FeatureColumns::All => (0..width).collect(),
        FeatureColumns::Indices(idx) => {
            if idx.is_empty() {
                return Err(Error::invalid("no feature columns selected"));
            }
            if let Some(&bad) = idx.iter().find(|&&c| c >= width) {
                return Err(Error::invalid(format!(
                    "column {bad} out of range, file has {width} columns"
                )));
            }
            idx.clone()
        }
    };
    let mut values = Vec::with_capacity(table.rows.len() * selected.len());
    for (line, row) in &table.rows {
        for &c in &selected {
            values.push(parse_cell(&row[c], *line, c)?);
        }
    }
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    Dataset::from_flat(values, selected.len(), name)
}

/// Reads a dataset written by [`Dataset::write_csv`], or any numeric CSV.
/// A header is detected when the first row contains a non-numeric cell; a
/// header column named `label` becomes the reference labels.
pub fn read_dataset_csv(path: &Path) -> Result<Dataset> {
    let first = read_table(path, false)?;
    let has_header = first
        .rows
        .first()
        .map(|(_, r)| r.iter().any(|c| c.trim().parse::<f64>().is_err()))
        .unwrap_or(false);
    if !has_header {
        return load_csv(path, &FeatureColumns::All, false);
    }
    let header = &first.rows[0].1;
    let label_col = header.iter().position(|h| h.trim() == "label");
    let features: Vec<usize> = (0..first.width).filter(|&c| Some(c) != label_col).collect();
    let data = load_csv(path, &FeatureColumns::Indices(features), true)?;
    match label_col {
        None => Ok(data),
        Some(c) => {
            let mut labels = Vec::with_capacity(data.len());
            for (line, row) in first.rows.iter().skip(1) {
                let v = parse_cell(&row[c], *line, c)?;
                if v != 0.0 && v != 1.0 {
                    return Err(Error::Parse {
                        row: *line,
                        column: c + 1,
                        message: format!("label must be 0 or 1, got {v}"),
                    });
                }
                labels.push(v as u8);
            }
            data.with_labels(labels)
        }
    }
}

struct Table {
    width: usize,
    rows: Vec<(usize, Vec<String>)>,
}

fn read_table(path: &Path, skip_header: bool) -> Result<Table> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(file);
    let mut rows = Vec::new();
    let mut width = None;
    for (i, record) in reader.records().enumerate() {
        let line = i + 1;
        let record = record.map_err(|e| Error::Parse {
            row: line,
            column: 0,
            message: e.to_string(),
        })?;
        match width {
            None => width = Some(record.len()),
            Some(w) if w != record.len() => {
                return Err(Error::Parse {
                    row: line,
                    column: record.len().min(w) + 1,
                    message: format!("expected {w} columns, found {}", record.len()),
                })
            }
            _ => {}
        }
        if skip_header && i == 0 {
            continue;
        }
        rows.push((line, record.iter().map(str::to_owned).collect()));
    }
    if rows.is_empty() {
        return Err(Error::Parse {
            row: 0,
            column: 0,
            message: "no data rows".into(),
        });
    }
    Ok(Table {
        width: width.unwrap_or(0),
        rows,
    })
}

fn parse_cell(cell: &str, line: usize, column: usize) -> Result<f64> {
    let v: f64 = cell.trim().parse().map_err(|_| Error::Parse {
        row: line,
        column: column + 1,
        message: format!("not a number: {cell:?}"),
    })?;
    if !v.is_finite() {
        return Err(Error::Parse {
            row: line,
            column: column + 1,
            message: format!("non-finite value {cell:?}"),
        });
    }
    Ok(v)
}

pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    if let Some(dir) = dir {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let tmp = path.with_extension(format!(
        "{}.tmp",
        path.extension().and_then(|e| e.to_str()).unwrap_or("")
    ));
    let mut f = File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
    f.write_all(bytes).map_err(|e| Error::io(&tmp, e))?;
    f.sync_all().map_err(|e| Error::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetStats {
    pub mean: Vec<f64>,
    pub dim_min: Vec<f64>,
    pub dim_max: Vec<f64>,
    pub dim_range: Vec<f64>,
}

pub fn compute_stats(data: &Dataset) -> DatasetStats {
    let d = data.dims();
    let mut sum = vec![0.0; d];
    let mut dim_min = vec![f64::INFINITY; d];
    let mut dim_max = vec![f64::NEG_INFINITY; d];
    for row in data.rows() {
        for j in 0..d {
            sum[j] += row[j];
            dim_min[j] = dim_min[j].min(row[j]);
            dim_max[j] = dim_max[j].max(row[j]);
        }
    }
    let n = data.len() as f64;
    // Rounding in the sum can push the mean a hair outside the box.
    let mean = (0..d)
        .map(|j| (sum[j] / n).clamp(dim_min[j], dim_max[j]))
        .collect();
    let dim_range = (0..d).map(|j| dim_max[j] - dim_min[j]).collect();
    DatasetStats {
        mean,
        dim_min,
        dim_max,
        dim_range,
    }
}

/// Cluster size ratio `a:b`, both parts at least one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ratio {
    pub a: u32,
    pub b: u32,
}

impl Ratio {
    pub fn new(a: u32, b: u32) -> Result<Self> {
        if a == 0 || b == 0 {
            return Err(Error::invalid(format!(
                "ratio parts must be >= 1, got {a}:{b}"
            )));
        }
        Ok(Ratio { a, b })
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.a, self.b)
    }
}

impl FromStr for Ratio {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once(':')
            .ok_or_else(|| Error::invalid(format!("ratio must look like a:b, got {s:?}")))?;
        let parse = |p: &str| {
            p.trim()
                .parse::<u32>()
                .map_err(|_| Error::invalid(format!("bad ratio part {p:?}")))
        };
        Ratio::new(parse(a)?, parse(b)?)
    }
}

impl Serialize for Ratio {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Ratio {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Two isotropic Gaussian clusters of uneven size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlobSpec {
    pub n_total: usize,
    pub ratio: Ratio,
    #[serde(default = "default_dims")]
    pub dims: usize,
    #[serde(default = "default_std")]
    pub cluster_std: f64,
    #[serde(default = "default_separation")]
    pub center_separation: f64,
    #[serde(default)]
    pub seed: u64,
}

fn default_dims() -> usize {
    2
}
fn default_std() -> f64 {
    1.0
}
fn default_separation() -> f64 {
    6.0
}

impl BlobSpec {
    pub fn new(n_total: usize, ratio: Ratio, seed: u64) -> Self {
        BlobSpec {
            n_total,
            ratio,
            dims: default_dims(),
            cluster_std: default_std(),
            center_separation: default_separation(),
            seed,
        }
    }

    /// `(minority, majority)` cluster sizes.
    pub fn cluster_sizes(&self) -> (usize, usize) {
        let small = self.ratio.a.min(self.ratio.b) as f64;
        let total = (self.ratio.a + self.ratio.b) as f64;
        let minority = ((self.n_total as f64) * small / total).round() as usize;
        let minority = minority.clamp(1, self.n_total / 2);
        (minority, self.n_total - minority)
    }

    /// Centers of the minority and majority clusters.
    pub fn centers(&self) -> (Vec<f64>, Vec<f64>) {
        let minority = vec![0.0; self.dims];
        let mut majority = vec![0.0; self.dims];
        majority[0] = self.center_separation;
        (minority, majority)
    }
}

/// Draws the two clusters. Minority points come first and carry label 0.
pub fn generate_uneven_blobs(spec: &BlobSpec) -> Result<Dataset> {
    if spec.n_total < 2 {
        return Err(Error::invalid("n_total must be at least 2"));
    }
    if spec.dims == 0 {
        return Err(Error::invalid("dims must be at least 1"));
    }
    if !(spec.cluster_std > 0.0 && spec.cluster_std.is_finite()) {
        return Err(Error::invalid("cluster_std must be positive"));
    }
    if !(spec.center_separation > 0.0 && spec.center_separation.is_finite()) {
        return Err(Error::invalid("center_separation must be positive"));
    }
    Ratio::new(spec.ratio.a, spec.ratio.b)?;

    let (minority, majority) = spec.cluster_sizes();
    let (c0, c1) = spec.centers();
    let mut rng = seeds::rng(spec.seed);
    let mut values = Vec::with_capacity(spec.n_total * spec.dims);
    let mut labels = Vec::with_capacity(spec.n_total);
    for (center, count, label) in [(&c0, minority, 0u8), (&c1, majority, 1u8)] {
        for _ in 0..count {
            for c in center.iter() {
                let z: f64 = StandardNormal.sample(&mut rng);
                values.push(c + spec.cluster_std * z);
            }
            labels.push(label);
        }
    }
    let name = format!("uneven-{}", spec.ratio.to_string().replace(':', "-"));
    Dataset::from_flat(values, spec.dims, name)?.with_labels(labels)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ds(rows: &[&[f64]]) -> Dataset {
        Dataset::from_rows(rows.iter().map(|r| r.to_vec()).collect(), "t").unwrap()
    }

    #[test]
    fn ratio_one_to_ten_gives_50_and_500() {
        let spec = BlobSpec::new(550, Ratio::new(1, 10).unwrap(), 1);
        assert_eq!(spec.cluster_sizes(), (50, 500));
        let data = generate_uneven_blobs(&spec).unwrap();
        let zeros = data.labels().unwrap().iter().filter(|&&l| l == 0).count();
        assert_eq!(zeros, 50);
        assert_eq!(data.len(), 550);
    }

    #[test]
    fn even_ratio_splits_evenly() {
        let spec = BlobSpec::new(10, Ratio::new(1, 1).unwrap(), 3);
        assert_eq!(spec.cluster_sizes(), (5, 5));
    }

    #[test]
    fn same_seed_same_points() {
        let spec = BlobSpec::new(100, Ratio::new(1, 2).unwrap(), 42);
        assert_eq!(
            generate_uneven_blobs(&spec).unwrap(),
            generate_uneven_blobs(&spec).unwrap()
        );
    }

    #[test]
    fn rejects_bad_std_and_separation() {
        let mut spec = BlobSpec::new(10, Ratio::new(1, 2).unwrap(), 0);
        spec.cluster_std = 0.0;
        assert!(matches!(
            generate_uneven_blobs(&spec),
            Err(Error::InvalidArgument(_))
        ));
        spec.cluster_std = 1.0;
        spec.center_separation = -1.0;
        assert!(matches!(
            generate_uneven_blobs(&spec),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn ratio_parsing() {
        assert_eq!("4:5".parse::<Ratio>().unwrap(), Ratio { a: 4, b: 5 });
        assert!("0:1".parse::<Ratio>().is_err());
        assert!("12".parse::<Ratio>().is_err());
    }

    #[test]
    fn stats_examples() {
        let s = compute_stats(&ds(&[&[0.0, 0.0], &[2.0, 2.0]]));
        assert_eq!(s.mean, vec![1.0, 1.0]);
        assert_eq!(s.dim_range, vec![2.0, 2.0]);

        let s = compute_stats(&ds(&[&[0.3, -7.0]]));
        assert_eq!(s.mean, vec![0.3, -7.0]);
        assert_eq!(s.dim_range, vec![0.0, 0.0]);

        let s = compute_stats(&ds(&[&[-1.0], &[0.0], &[4.0]]));
        assert_eq!(s.mean, vec![1.0]);
        assert_eq!(s.dim_range, vec![5.0]);
    }

    #[test]
    fn label_length_checked() {
        let d = ds(&[&[0.0], &[1.0]]);
        assert!(d.clone().with_labels(vec![0]).is_err());
        assert!(d.with_labels(vec![0, 2]).is_err());
    }

    #[test]
    fn normalization_maps_to_unit_box() {
        let d = ds(&[&[-2.0, 5.0], &[2.0, 5.0], &[0.0, 5.0]]).normalized();
        assert_eq!(d.row(0), &[0.0, 0.0]);
        assert_eq!(d.row(1), &[1.0, 0.0]);
        assert_eq!(d.row(2), &[0.5, 0.0]);
    }
}
