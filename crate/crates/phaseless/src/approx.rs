//! Sinc-Gaussian approximation operators and their explicit error bounds.
//!
//! These are the two truncated sampling series the pipeline is built on: the
//! coarse-grid operator (samples at `k/s`, `|k| <= M`) and the fine-grid
//! operator (samples at `k/M`), together with evaluators for their error
//! bounds. The bounds are advisory diagnostics; nothing here enforces them.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::Centered;
use crate::kernels::eval_g;

const PI: f64 = std::f64::consts::PI;

/// Samples `f(k/s)` for `k in [-M, M]` of a bandlimited function, together
/// with the sampling rate and a declared bandwidth.
#[derive(Debug, Clone)]
pub struct BandlimitedSampleSet {
    samples: Centered<Complex64>,
    s: f64,
    b: f64,
    m: u32,
}

impl BandlimitedSampleSet {
    pub fn new(samples: Vec<Complex64>, s: f64, b: f64) -> Result<Self> {
        if samples.len() % 2 != 1 {
            return Err(Error::InvalidConfig(format!(
                "sample set needs odd length 2M+1, got {}",
                samples.len()
            )));
        }
        let m = (samples.len() / 2) as u32;
        if m < 1 {
            return Err(Error::InvalidConfig("sample set needs M >= 1".into()));
        }
        if !(s > 0.0) {
            return Err(Error::InvalidConfig(format!("sampling rate s = {s} must be positive")));
        }
        if b < 0.0 {
            return Err(Error::InvalidConfig(format!("bandwidth b = {b} must be nonnegative")));
        }
        if s <= b {
            return Err(Error::InvalidConfig(format!(
                "sampling rate s = {s} must exceed the bandwidth b = {b}"
            )));
        }
        Ok(BandlimitedSampleSet {
            samples: Centered::from_vec(samples),
            s,
            b,
            m,
        })
    }

    pub fn from_fn(f: impl Fn(f64) -> f64, s: f64, b: f64, m: u32) -> Result<Self> {
        let mi = m as i64;
        let samples = (-mi..=mi)
            .map(|k| Complex64::new(f(k as f64 / s), 0.0))
            .collect();
        Self::new(samples, s, b)
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn sample(&self, k: i64) -> Complex64 {
        self.samples[k]
    }
}

/// The truncated sinc-Gaussian series `sum_k f(k/s) G(z - k, M)`, an
/// approximation of `f(z/s)` for `Re(z)` well inside `[-M, M]`.
pub fn sinc_gauss_interpolate(set: &BandlimitedSampleSet, z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for k in set.samples.indices() {
        acc += set.samples[k] * eval_g(z - k as f64, set.m);
    }
    acc
}

/// The fine-grid operator `sum_k f(k/M) G(Mz - k, M)` for `values[k] = f(k/M)`,
/// `k in [-K, K]` with `K = floor(dM)`. Approximates `f(z)` for `|z| <= d/2`.
pub fn fine_grid_interpolate(values: &[Complex64], m: u32, z: f64) -> Complex64 {
    assert!(values.len() % 2 == 1, "fine-grid values need odd length");
    let half = (values.len() / 2) as i64;
    let mf = m as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, v) in values.iter().enumerate() {
        let k = i as i64 - half;
        acc += v * eval_g(Complex64::new(mf * z - k as f64, 0.0), m);
    }
    acc
}

/// Inputs for the error-bound evaluators. `C1` and `C2` are empirical
/// constants left unspecified by the theory; they default to 1 and are fitted
/// by the tests rather than asserted.
#[derive(Debug, Clone, Copy)]
pub struct BoundInputs {
    pub m: u32,
    pub b: f64,
    pub s: f64,
    /// Evaluation window half-width fraction, `Re(z) in [-dM, dM]`, `d < 1`.
    pub d: f64,
    /// Imaginary offset of the lifted line.
    pub c: f64,
    /// Half-width of the zero-free strip around the line.
    pub delta: f64,
    pub c1: f64,
    pub c2: f64,
}

impl BoundInputs {
    pub fn new(m: u32, b: f64, s: f64, d: f64, c: f64, delta: f64) -> Self {
        BoundInputs {
            m,
            b,
            s,
            d,
            c,
            delta,
            c1: 1.0,
            c2: 1.0,
        }
    }
}

/// The coarse-operator truncation bound
/// `C1 * M^{-1/2} * exp(-(pi(1-d)/2)(1 - b/s) M + 2 pi |Im z|)`.
pub fn thm3_bound(inp: &BoundInputs, im_z: f64) -> f64 {
    let mf = inp.m as f64;
    inp.c1
        * mf.powf(-0.5)
        * (-(PI * (1.0 - inp.d) / 2.0) * (1.0 - inp.b / inp.s) * mf + 2.0 * PI * im_z.abs()).exp()
}

/// The fine-operator truncation bound `C2 * K * (M/delta)^{1/2} * exp(-pi delta M / 4)`
/// for functions with `|f(z)| <= K |z|` in the strip; `K` folded into `C2`.
pub fn thm_fine_bound(inp: &BoundInputs) -> f64 {
    let mf = inp.m as f64;
    inp.c2 * (mf / inp.delta).sqrt() * (-PI * inp.delta * mf / 4.0).exp()
}

/// The end-to-end convergence rate of the reconstruction,
/// `rate = min(pi/16 (1 - 2b/s), pi delta / 8)` with additive exponent offset
/// `4 pi c`; the predicted error is `C * exp(-rate * M + offset)`.
pub fn main_rate_bound(inp: &BoundInputs) -> Result<(f64, f64)> {
    if inp.s <= 2.0 * inp.b {
        return Err(Error::InvalidRate {
            s: inp.s,
            double_b: 2.0 * inp.b,
        });
    }
    if !(inp.delta > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "zero-free strip half-width delta = {} must be positive",
            inp.delta
        )));
    }
    let rate = (PI / 16.0 * (1.0 - 2.0 * inp.b / inp.s)).min(PI * inp.delta / 8.0);
    Ok((rate, 4.0 * PI * inp.c))
}
