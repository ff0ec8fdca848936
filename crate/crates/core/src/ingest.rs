//! Hyperedges from multivariate time series by multi-correlation
//! thresholding: `rho = sqrt(1 - det R)` over each node tuple.

use std::io::Read;

use itertools::Itertools;
use nalgebra::DMatrix;
use thiserror::Error;

use crate::exec::{map_ordered, Parallelism};
use crate::hypergraph::{complete_edge_count, Hypergraph, HypergraphError};

/// Largest number of tuples `build_hypergraph` will evaluate.
pub const MAX_TUPLES: u128 = 10_000_000;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("line {line}: value {value:?} is not a finite number")]
    Value { line: u64, value: String },
    #[error("channel {channel} has {got} samples, expected {expected}")]
    Ragged {
        channel: String,
        expected: usize,
        got: usize,
    },
    #[error("header names {labels} channels but {rows} rows follow")]
    HeaderCount { labels: usize, rows: usize },
    #[error("need at least 2 samples per channel, got {0}")]
    TooShort(usize),
    #[error("no channels")]
    Empty,
    #[error("channel {0} has zero variance")]
    ZeroVariance(String),
    #[error("tuple {tuple:?}: {reason}")]
    Tuple { tuple: Vec<usize>, reason: String },
    #[error("threshold must lie in [0, 1], got {0}")]
    Threshold(f64),
    #[error("order {k} needs 2 <= k <= {n}")]
    Order { k: usize, n: usize },
    #[error("C({n}, {k}) = {count} tuples exceeds {MAX_TUPLES}; subsample the channels")]
    TooManyTuples { n: usize, k: usize, count: u128 },
    #[error(transparent)]
    Hypergraph(#[from] HypergraphError),
}

/// `n` channels of `T` samples each.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeriesMatrix {
    labels: Vec<String>,
    signals: Vec<Vec<f64>>,
}

impl TimeSeriesMatrix {
    /// Channels are labelled `1..=n` unless `labels` is given.
    pub fn new(signals: Vec<Vec<f64>>, labels: Option<Vec<String>>) -> Result<Self, IngestError> {
        if signals.is_empty() {
            return Err(IngestError::Empty);
        }
        let labels = match labels {
            Some(l) if l.len() != signals.len() => {
                return Err(IngestError::HeaderCount {
                    labels: l.len(),
                    rows: signals.len(),
                })
            }
            Some(l) => l,
            None => (1..=signals.len()).map(|i| i.to_string()).collect(),
        };
        let t = signals[0].len();
        for (s, label) in signals.iter().zip(&labels) {
            if s.len() != t {
                return Err(IngestError::Ragged {
                    channel: label.clone(),
                    expected: t,
                    got: s.len(),
                });
            }
        }
        if t < 2 {
            return Err(IngestError::TooShort(t));
        }
        Ok(Self { labels, signals })
    }

    pub fn channels(&self) -> usize {
        self.signals.len()
    }

    pub fn samples(&self) -> usize {
        self.signals[0].len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn signal(&self, i: usize) -> &[f64] {
        &self.signals[i]
    }
}

/// One row per channel. With `has_header`, the first row holds the channel
/// labels (one per following row).
pub fn read_csv<R: Read>(reader: R, has_header: bool) -> Result<TimeSeriesMatrix, IngestError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut labels = None;
    let mut signals = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if i == 0 && has_header {
            labels = Some(rec.iter().map(str::to_string).collect::<Vec<_>>());
            continue;
        }
        let line = rec.position().map_or(i as u64 + 1, |p| p.line());
        let row = rec
            .iter()
            .map(|v| match v.parse::<f64>() {
                Ok(x) if x.is_finite() => Ok(x),
                _ => Err(IngestError::Value {
                    line,
                    value: v.to_string(),
                }),
            })
            .collect::<Result<Vec<_>, _>>()?;
        signals.push(row);
    }
    TimeSeriesMatrix::new(signals, labels)
}

/// Multi-correlation of one node tuple.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiCorrelation {
    pub tuple: Vec<usize>,
    pub rho: f64,
}

struct Standardized {
    /// Channel minus its mean, divided by `sqrt(sum of squares)`.
    z: Vec<Vec<f64>>,
}

impl Standardized {
    fn new(x: &TimeSeriesMatrix, channels: impl IntoIterator<Item = usize>) -> Result<Self, IngestError> {
        let mut z = vec![Vec::new(); x.channels()];
        for c in channels {
            let s = x.signal(c);
            let mean = s.iter().sum::<f64>() / s.len() as f64;
            let centered: Vec<f64> = s.iter().map(|v| v - mean).collect();
            let ss: f64 = centered.iter().map(|v| v * v).sum();
            let scale = s.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
            let floor = 1e-12 * scale * (s.len() as f64).sqrt();
            if ss.is_nan() || ss.sqrt() <= floor {
                return Err(IngestError::ZeroVariance(x.labels()[c].clone()));
            }
            let norm = ss.sqrt();
            z[c] = centered.into_iter().map(|v| v / norm).collect();
        }
        Ok(Self { z })
    }

    fn pearson(&self, i: usize, j: usize) -> f64 {
        let r: f64 = self.z[i].iter().zip(&self.z[j]).map(|(a, b)| a * b).sum();
        r.clamp(-1.0, 1.0)
    }
}

fn rho_from_matrix(r: DMatrix<f64>) -> f64 {
    let det = r.determinant();
    let det = if det.is_finite() { det.clamp(0.0, 1.0) } else { 0.0 };
    (1.0 - det).sqrt()
}

fn check_tuple(x: &TimeSeriesMatrix, tuple: &[usize]) -> Result<(), IngestError> {
    let fail = |reason: &str| IngestError::Tuple {
        tuple: tuple.to_vec(),
        reason: reason.to_string(),
    };
    if tuple.is_empty() {
        return Err(fail("empty tuple"));
    }
    if let Some(&c) = tuple.iter().find(|&&c| c >= x.channels()) {
        return Err(fail(&format!("channel index {c} out of range for {} channels", x.channels())));
    }
    if tuple.iter().duplicates().next().is_some() {
        return Err(fail("repeated channel"));
    }
    Ok(())
}

/// `rho = sqrt(1 - det R)` with `R` the Pearson correlation matrix of the
/// tuple's channels.
pub fn multi_correlation(x: &TimeSeriesMatrix, tuple: &[usize]) -> Result<MultiCorrelation, IngestError> {
    check_tuple(x, tuple)?;
    let st = Standardized::new(x, tuple.iter().copied())?;
    let k = tuple.len();
    let r = DMatrix::from_fn(k, k, |a, b| {
        if a == b {
            1.0
        } else {
            st.pearson(tuple[a], tuple[b])
        }
    });
    Ok(MultiCorrelation {
        tuple: tuple.to_vec(),
        rho: rho_from_matrix(r),
    })
}

/// Pearson correlation matrix of all channels.
pub fn correlation_matrix(x: &TimeSeriesMatrix) -> Result<DMatrix<f64>, IngestError> {
    let n = x.channels();
    let st = Standardized::new(x, 0..n)?;
    Ok(DMatrix::from_fn(n, n, |a, b| if a == b { 1.0 } else { st.pearson(a, b) }))
}

/// Documented thresholds: 0.95 for triples and 0.99 for quadruples.
pub fn default_threshold(k: usize) -> Option<f64> {
    match k {
        3 => Some(0.95),
        4 => Some(0.99),
        _ => None,
    }
}

/// `k`-uniform hypergraph on all channels with an edge for every tuple whose
/// multi-correlation exceeds `threshold`.
pub fn build_hypergraph(
    x: &TimeSeriesMatrix,
    k: usize,
    threshold: f64,
    parallelism: Parallelism,
) -> Result<Hypergraph, IngestError> {
    let n = x.channels();
    if !(0.0..=1.0).contains(&threshold) {
        return Err(IngestError::Threshold(threshold));
    }
    if k < 2 || k > n {
        return Err(IngestError::Order { k, n });
    }
    let count = complete_edge_count(n, k);
    if count > MAX_TUPLES {
        return Err(IngestError::TooManyTuples { n, k, count });
    }
    let r = correlation_matrix(x)?;
    let tuples: Vec<Vec<usize>> = (0..n).combinations(k).collect();
    let keep = map_ordered(parallelism, &tuples, |t| {
        let sub = DMatrix::from_fn(k, k, |a, b| r[(t[a], t[b])]);
        rho_from_matrix(sub) > threshold
    });
    let edges = tuples
        .into_iter()
        .zip(keep)
        .filter_map(|(t, k)| k.then_some(t))
        .collect();
    Ok(Hypergraph::new(n, edges)?)
}
