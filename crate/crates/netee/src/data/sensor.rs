use std::collections::BTreeMap;
use std::path::Path;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problems::{NodeWindows, Window};
use crate::rng::seeded;

/// Aligned temperature, humidity and label streams of one sensor node.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeSeries {
    pub temperature: Vec<f64>,
    pub humidity: Vec<f64>,
    pub labels: Vec<usize>,
}

impl NodeSeries {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    fn validate(&self) -> Result<()> {
        if self.temperature.len() != self.labels.len() || self.humidity.len() != self.labels.len() {
            return Err(Error::SensorData(format!(
                "misaligned streams: {} temperature, {} humidity, {} labels",
                self.temperature.len(),
                self.humidity.len(),
                self.labels.len()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SensorSeries {
    pub nodes: Vec<NodeSeries>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitMethod {
    Shuffle,
    Chronological,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SplitSpec {
    pub window_len: usize,
    pub stride: usize,
    pub train_fraction: f64,
    pub split_seed: u64,
    pub method: SplitMethod,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self {
            window_len: 150,
            stride: 30,
            train_fraction: 0.8,
            split_seed: 0,
            method: SplitMethod::Shuffle,
        }
    }
}

impl SplitSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.window_len > self.stride && self.stride > 0) {
            return Err(Error::Config(format!(
                "need window_len > stride > 0, got {} and {}",
                self.window_len, self.stride
            )));
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(Error::Config(format!(
                "train_fraction {} not in (0, 1)",
                self.train_fraction
            )));
        }
        Ok(())
    }

    /// Number of windows cut from a series of `len` samples.
    pub fn window_count(&self, len: usize) -> usize {
        if len < self.window_len {
            0
        } else {
            (len - self.window_len) / self.stride + 1
        }
    }
}

fn majority(labels: &[usize]) -> usize {
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for &l in labels {
        *counts.entry(l).or_default() += 1;
    }
    // BTreeMap iterates ascending, so `>` keeps the lowest label on ties.
    let mut best = (0, 0);
    for (label, n) in counts {
        if n > best.1 {
            best = (label, n);
        }
    }
    best.0
}

#[derive(Debug, Clone, Copy)]
struct Range {
    min: f64,
    max: f64,
}

impl Range {
    fn of<'a>(values: impl Iterator<Item = &'a f64>) -> Self {
        let mut r = Range {
            min: f64::INFINITY,
            max: f64::NEG_INFINITY,
        };
        for &v in values {
            r.min = r.min.min(v);
            r.max = r.max.max(v);
        }
        r
    }

    /// Min-max scaling clamped to `[0, 1]`; a degenerate range maps to 0.
    fn scale(&self, v: f64) -> f64 {
        let span = self.max - self.min;
        if span > 0.0 {
            ((v - self.min) / span).clamp(0.0, 1.0)
        } else {
            0.0
        }
    }
}

/// Cuts one node's series into windows, splits them into train and test and
/// min-max scales each modality using the training windows only.
pub fn make_windows(series: &NodeSeries, spec: &SplitSpec) -> Result<(Vec<Window>, Vec<Window>)> {
    spec.validate()?;
    series.validate()?;
    let n = spec.window_count(series.len());
    if n == 0 {
        return Err(Error::SensorData(format!(
            "series of {} samples is shorter than one window ({})",
            series.len(),
            spec.window_len
        )));
    }
    let offsets: Vec<usize> = (0..n).map(|k| k * spec.stride).collect();
    let mut order: Vec<usize> = (0..n).collect();
    if spec.method == SplitMethod::Shuffle {
        order.shuffle(&mut seeded(spec.split_seed));
    }
    let n_train = ((n as f64 * spec.train_fraction).round() as usize).clamp(1, n);
    let (train_idx, test_idx) = order.split_at(n_train);

    let span = |k: usize| offsets[k]..offsets[k] + spec.window_len;
    let temp = Range::of(train_idx.iter().flat_map(|&k| &series.temperature[span(k)]));
    let hum = Range::of(train_idx.iter().flat_map(|&k| &series.humidity[span(k)]));

    let build = |k: usize| {
        let r = span(k);
        let mut features = Vec::with_capacity(2 * spec.window_len);
        features.extend(series.temperature[r.clone()].iter().map(|&v| temp.scale(v)));
        features.extend(series.humidity[r.clone()].iter().map(|&v| hum.scale(v)));
        Window {
            features,
            label: majority(&series.labels[r]),
        }
    };
    Ok((
        train_idx.iter().map(|&k| build(k)).collect(),
        test_idx.iter().map(|&k| build(k)).collect(),
    ))
}

/// Windows every node, deriving a distinct split seed per node.
pub fn make_windows_all(series: &SensorSeries, spec: &SplitSpec) -> Result<Vec<NodeWindows>> {
    series
        .nodes
        .iter()
        .enumerate()
        .map(|(k, node)| {
            let node_spec = SplitSpec {
                split_seed: spec.split_seed ^ (k as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15),
                ..*spec
            };
            let (train, test) = make_windows(node, &node_spec)?;
            Ok(NodeWindows { train, test })
        })
        .collect()
}

#[derive(Debug, Serialize, Deserialize)]
struct Row {
    node: usize,
    timestamp: String,
    temperature: f64,
    humidity: f64,
    label: usize,
}

fn timestamp_order(a: &str, b: &str) -> std::cmp::Ordering {
    match (a.parse::<f64>(), b.parse::<f64>()) {
        (Ok(x), Ok(y)) => x.total_cmp(&y),
        _ => a.cmp(b),
    }
}

/// Reads `node,timestamp,temperature,humidity,label` rows. Node ids must be
/// dense from 0; rows of each node must already be sorted by timestamp.
pub fn parse_sensor_csv(text: &str) -> Result<SensorSeries> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| Error::SensorData(e.to_string()))?.clone();
    let want = ["node", "timestamp", "temperature", "humidity", "label"];
    if headers.iter().collect::<Vec<_>>() != want {
        return Err(Error::SensorData(format!(
            "expected header {}, found {}",
            want.join(","),
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut nodes: BTreeMap<usize, (NodeSeries, String)> = BTreeMap::new();
    for (k, rec) in reader.deserialize::<Row>().enumerate() {
        let line = k + 2;
        let row = rec.map_err(|e| Error::SensorData(format!("line {line}: {e}")))?;
        let (series, last) = nodes.entry(row.node).or_insert_with(|| {
            (
                NodeSeries {
                    temperature: Vec::new(),
                    humidity: Vec::new(),
                    labels: Vec::new(),
                },
                String::new(),
            )
        });
        if !series.is_empty() && timestamp_order(last, &row.timestamp).is_gt() {
            return Err(Error::SensorData(format!(
                "line {line}: timestamp {} precedes {last} for node {}",
                row.timestamp, row.node
            )));
        }
        series.temperature.push(row.temperature);
        series.humidity.push(row.humidity);
        series.labels.push(row.label);
        *last = row.timestamp;
    }
    if nodes.is_empty() {
        return Err(Error::SensorData("no rows".into()));
    }
    if nodes.keys().copied().ne(0..nodes.len()) {
        return Err(Error::SensorData("node ids must be 0..n without gaps".into()));
    }
    Ok(SensorSeries {
        nodes: nodes.into_values().map(|(s, _)| s).collect(),
    })
}

pub fn load_sensor_csv(path: impl AsRef<Path>) -> Result<SensorSeries> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_sensor_csv(&text)
}

/// Serializes with the sample index as timestamp.
pub fn write_sensor_csv(series: &SensorSeries) -> String {
    let mut out = String::from("node,timestamp,temperature,humidity,label\n");
    for (k, node) in series.nodes.iter().enumerate() {
        for t in 0..node.len() {
            out.push_str(&format!(
                "{k},{t},{},{},{}\n",
                node.temperature[t], node.humidity[t], node.labels[t]
            ));
        }
    }
    out
}
