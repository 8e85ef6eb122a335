//! Seeded substreams, running moments and small fitting helpers.
//!
//! Stochastic work is split into fixed-size chunks; chunk `i` draws from
//! ChaCha stream `i` of the master seed. Chunks may run on any number of
//! threads, and partial sums are combined in chunk order, so every result
//! is a function of the seed alone.

use std::ops::Range;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Samples per substream chunk.
pub const CHUNK: usize = 8192;

pub fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Runs `f(chunk_index, sample_range)` over `n` samples split into
/// [`CHUNK`]-sized pieces and returns the per-chunk results in order.
pub fn chunked<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, Range<usize>) -> T + Sync + Send,
{
    let chunks = n.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| f(c, c * CHUNK..((c + 1) * CHUNK).min(n)))
        .collect()
}

/// Draws `x + iy` with `x, y` independent centred normals of the given
/// per-component variance.
pub fn complex_gaussian<R: rand::Rng + ?Sized>(rng: &mut R, variance: f64) -> Complex64 {
    let s = variance.sqrt();
    let x: f64 = StandardNormal.sample(rng);
    let y: f64 = StandardNormal.sample(rng);
    Complex64::new(s * x, s * y)
}

/// Mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub std_err: f64,
}

impl Estimate {
    /// Deviation from `target` in units of the standard error.
    pub fn z_score(&self, target: f64) -> f64 {
        (self.value - target).abs() / self.std_err
    }

    pub fn within(&self, target: f64, sigmas: f64) -> bool {
        (self.value - target).abs() <= sigmas * self.std_err
    }
}

/// Complex mean with per-component standard errors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexEstimate {
    pub value: Complex64,
    pub std_err_re: f64,
    pub std_err_im: f64,
}

impl ComplexEstimate {
    /// Standard error of the complex mean, `√(σ_re² + σ_im²)`.
    pub fn std_err(&self) -> f64 {
        self.std_err_re.hypot(self.std_err_im)
    }

    /// True when both components lie within `sigmas` standard errors.
    pub fn within(&self, target: Complex64, sigmas: f64) -> bool {
        let d = self.value - target;
        d.re.abs() <= sigmas * self.std_err_re && d.im.abs() <= sigmas * self.std_err_im
    }
}

/// Running sums for a real sample mean.
#[derive(Debug, Clone, Copy, Default)]
pub struct Moments {
    n: usize,
    sum: f64,
    sum_sq: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        self.sum += x;
        self.sum_sq += x * x;
    }

    pub fn merge(&mut self, o: &Moments) {
        self.n += o.n;
        self.sum += o.sum;
        self.sum_sq += o.sum_sq;
    }

    pub fn count(&self) -> usize {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.sum / self.n as f64
    }

    pub fn estimate(&self) -> Estimate {
        let n = self.n as f64;
        let mean = self.sum / n;
        let var = if self.n > 1 {
            ((self.sum_sq - n * mean * mean) / (n - 1.0)).max(0.0)
        } else {
            0.0
        };
        Estimate {
            value: mean,
            std_err: (var / n).sqrt(),
        }
    }
}

/// Running sums for a complex sample mean.
#[derive(Debug, Clone, Copy, Default)]
pub struct ComplexMoments {
    re: Moments,
    im: Moments,
}

impl ComplexMoments {
    pub fn push(&mut self, z: Complex64) {
        self.re.push(z.re);
        self.im.push(z.im);
    }

    pub fn merge(&mut self, o: &ComplexMoments) {
        self.re.merge(&o.re);
        self.im.merge(&o.im);
    }

    pub fn estimate(&self) -> ComplexEstimate {
        let (r, i) = (self.re.estimate(), self.im.estimate());
        ComplexEstimate {
            value: Complex64::new(r.value, i.value),
            std_err_re: r.std_err,
            std_err_im: i.std_err,
        }
    }
}

/// Ordinary least-squares line `y = slope·x + intercept`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Slope of `ln y` against `ln x`.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    linear_fit(&lx, &ly).0
}

/// Two-sided Kolmogorov–Smirnov statistic of `samples` against `cdf`.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Asymptotic 99% Kolmogorov–Smirnov threshold `1.63/√n`.
pub fn ks_threshold_99(n: usize) -> f64 {
    1.63 / (n as f64).sqrt()
}
