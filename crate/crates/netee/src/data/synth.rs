//! Synthetic stand-in for a room of temperature/humidity sensor nodes.
//!
//! Generative model, per room:
//! - A shared label stream is built from segments of 90 to 360 samples.
//!   Presence alternates between 0 and 1; activity draws a new class
//!   uniformly among the other three.
//! - Each class sets a temperature and humidity excess. Node `k` sees that
//!   excess scaled by `1 / (1 + 0.3 k)` and through a first-order lag with a
//!   time constant of 30 samples.
//! - A slow room-wide drift (AR(1), phi = 0.995) is added to every node.
//! - Local disturbances are AR(1) processes (phi = 0.9) mixed across nodes
//!   with weights `0.5^|k - m|`, so correlation decays with index distance.
//! - Each node has a fixed offset and white measurement noise.
//!
//! The drift is comparable in size to the class effects, so a window's
//! absolute level is informative but not decisive.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::problems::Task;
use crate::rng::seeded;

use super::sensor::{NodeSeries, SensorSeries};

const PRESENCE_TEMP: [f64; 2] = [0.0, 0.8];
const PRESENCE_HUM: [f64; 2] = [0.0, 3.0];
const ACTIVITY_TEMP: [f64; 4] = [0.4, 0.6, 0.9, 1.2];
const ACTIVITY_HUM: [f64; 4] = [1.5, 2.0, 3.5, 2.5];

fn normal(sd: f64) -> Normal<f64> {
    Normal::new(0.0, sd).expect("positive standard deviation")
}

fn label_stream<R: Rng>(rng: &mut R, samples: usize, task: Task) -> Vec<usize> {
    let classes = task.classes();
    let mut labels = Vec::with_capacity(samples);
    let mut current = rng.random_range(0..classes);
    while labels.len() < samples {
        let dwell = rng.random_range(90..=360);
        labels.extend(std::iter::repeat_n(current, dwell.min(samples - labels.len())));
        current = match task {
            Task::Presence => 1 - current,
            Task::Activity => (current + rng.random_range(1..classes)) % classes,
        };
    }
    labels
}

fn ar1<R: Rng>(rng: &mut R, samples: usize, phi: f64, sd: f64) -> Vec<f64> {
    let noise = normal(sd);
    let mut x = 0.0;
    (0..samples)
        .map(|_| {
            x = phi * x + noise.sample(rng);
            x
        })
        .collect()
}

pub fn synth_sensor_rooms(seed: u64, nodes: usize, samples: usize, task: Task) -> Result<SensorSeries> {
    if nodes == 0 {
        return Err(Error::SensorData("need at least one node".into()));
    }
    if samples < 150 {
        return Err(Error::SensorData(format!("need at least 150 samples, got {samples}")));
    }
    let mut rng = seeded(seed);
    let labels = label_stream(&mut rng, samples, task);
    let (temp_fx, hum_fx): (&[f64], &[f64]) = match task {
        Task::Presence => (&PRESENCE_TEMP, &PRESENCE_HUM),
        Task::Activity => (&ACTIVITY_TEMP, &ACTIVITY_HUM),
    };

    let drift_t = ar1(&mut rng, samples, 0.995, 0.03);
    let drift_h = ar1(&mut rng, samples, 0.995, 0.1);
    let local_t: Vec<Vec<f64>> = (0..nodes).map(|_| ar1(&mut rng, samples, 0.9, 0.05)).collect();
    let local_h: Vec<Vec<f64>> = (0..nodes).map(|_| ar1(&mut rng, samples, 0.9, 0.2)).collect();
    let white_t = normal(0.02);
    let white_h = normal(0.1);

    let series = (0..nodes)
        .map(|k| {
            let gain = 1.0 / (1.0 + 0.3 * k as f64);
            let base_t = 21.0 + rng.random_range(-1.5..1.5);
            let base_h = 40.0 + rng.random_range(-4.0..4.0);
            let weights: Vec<f64> = (0..nodes).map(|m| 0.5f64.powi((k as i32 - m as i32).abs())).collect();
            let wsum: f64 = weights.iter().sum();
            let (mut resp_t, mut resp_h) = (0.0, 0.0);
            let mut temperature = Vec::with_capacity(samples);
            let mut humidity = Vec::with_capacity(samples);
            for t in 0..samples {
                resp_t += (gain * temp_fx[labels[t]] - resp_t) / 30.0;
                resp_h += (gain * hum_fx[labels[t]] - resp_h) / 30.0;
                let mix = |local: &[Vec<f64>]| -> f64 {
                    weights.iter().zip(local).map(|(w, l)| w * l[t]).sum::<f64>() / wsum
                };
                temperature.push(base_t + resp_t + drift_t[t] + mix(&local_t) + white_t.sample(&mut rng));
                humidity.push(base_h + resp_h + drift_h[t] + mix(&local_h) + white_h.sample(&mut rng));
            }
            NodeSeries {
                temperature,
                humidity,
                labels: labels.clone(),
            }
        })
        .collect();
    Ok(SensorSeries { nodes: series })
}
