//! Exact bandlimited test signals and their magnitude samples.
//!
//! These provide the ground truth for the benchmark suite: the translated
//! Bessel function `J_1(x + 20)`, synthetic multitone signals, and the
//! classical undersampling counterexample pair `sin/cos(pi(x + 1/4))`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::Centered;
use crate::pipeline::MagnitudeSamples;

pub mod bessel;

const PI: f64 = std::f64::consts::PI;

/// A real-valued test signal with a known closed form and a declared
/// bandwidth (under the convention `type(f) <= pi * b`).
#[derive(Clone)]
pub struct TestSignal {
    pub name: String,
    pub bandwidth: f64,
    pub description: String,
    eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl TestSignal {
    pub fn new(
        name: impl Into<String>,
        bandwidth: f64,
        description: impl Into<String>,
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        TestSignal {
            name: name.into(),
            bandwidth,
            description: description.into(),
            eval: Arc::new(eval),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.eval)(x)
    }

    pub fn negated(&self) -> TestSignal {
        let inner = Arc::clone(&self.eval);
        TestSignal {
            name: format!("-{}", self.name),
            bandwidth: self.bandwidth,
            description: self.description.clone(),
            eval: Arc::new(move |x| -(inner)(x)),
        }
    }
}

impl std::fmt::Debug for TestSignal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TestSignal")
            .field("name", &self.name)
            .field("bandwidth", &self.bandwidth)
            .finish()
    }
}

/// `x -> J_1(x + shift)`. `J_1` has exponential type 1, so `b = 1/pi`.
pub fn bessel_j1_shifted(shift: f64) -> TestSignal {
    TestSignal::new(
        "bessel_j1_shifted",
        1.0 / PI,
        format!("translated Bessel function J1(x + {shift})"),
        move |x| bessel::j1(x + shift),
    )
}

/// A finite sum of sine tones, `sum_i amp_i * sin(2 pi freq_i x + phase_i)`,
/// with `b = 2 * max(freq_i)`.
pub fn multitone(frequencies: &[f64], amps: &[f64], phases: &[f64]) -> Result<TestSignal> {
    if frequencies.is_empty() || amps.is_empty() || phases.is_empty() {
        return Err(Error::EmptySpec);
    }
    if frequencies.len() != amps.len() || frequencies.len() != phases.len() {
        return Err(Error::InvalidConfig(
            "multitone arrays must have equal lengths".into(),
        ));
    }
    if frequencies.iter().any(|&f| !(f > 0.0)) {
        return Err(Error::InvalidConfig("tone frequencies must be positive".into()));
    }
    let b = 2.0 * frequencies.iter().cloned().fold(0.0f64, f64::max);
    let tones: Vec<(f64, f64, f64)> = frequencies
        .iter()
        .zip(amps)
        .zip(phases)
        .map(|((&f, &a), &p)| (f, a, p))
        .collect();
    Ok(TestSignal::new(
        "multitone",
        b,
        format!("{} sine tones, max frequency {}", tones.len(), b / 2.0),
        move |x| {
            tones
                .iter()
                .map(|&(f, a, p)| a * (2.0 * PI * f * x + p).sin())
                .sum()
        },
    ))
}

/// The documented 8-tone preset standing in for the paper's audio example.
/// Frequencies are fixed; amplitudes and phases are drawn from a seeded
/// generator so runs are reproducible. The leading tone dominates, keeping
/// the zeros of the sum close to the real axis.
pub fn multitone_preset(seed: u64) -> TestSignal {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let freqs: Vec<f64> = (0..8).map(|i| 0.02 + 0.025 * i as f64).collect();
    let mut amps = vec![1.0];
    amps.extend((1..8).map(|_| rng.gen_range(0.05..0.25)));
    let phases: Vec<f64> = (0..8).map(|_| rng.gen_range(0.0..2.0 * PI)).collect();
    multitone(&freqs, &amps, &phases).expect("preset arrays are nonempty")
}

/// Single tone at frequency 1/8: `sin(pi x / 4)`, `b = 1/4`.
pub fn sine_preset() -> TestSignal {
    multitone(&[0.125], &[1.0], &[0.0]).expect("nonempty")
}

/// The undersampling counterexample: `sin(pi(z + 1/4))` and
/// `cos(pi(z + 1/4))` agree in absolute value at every half-integer but are
/// distinct functions. Both have exponential type `pi`, so `b = 1`, and the
/// half-integer grid corresponds to `s = 2 = 2b`, exactly the critical rate.
pub fn counterexample_pair() -> (TestSignal, TestSignal) {
    let f1 = TestSignal::new(
        "counterexample_sin",
        1.0,
        "sin(pi(x + 1/4))",
        |x| (PI * (x + 0.25)).sin(),
    );
    let f2 = TestSignal::new(
        "counterexample_cos",
        1.0,
        "cos(pi(x + 1/4))",
        |x| (PI * (x + 0.25)).cos(),
    );
    (f1, f2)
}

/// `a_k = |sig(k/s)|` for `k in [-M, M]`.
pub fn sample_magnitudes(sig: &TestSignal, s: f64, m: u32) -> MagnitudeSamples {
    assert!(s > 0.0);
    let mi = m as i64;
    MagnitudeSamples::from_centered(Centered::from_fn(mi, |k| sig.eval(k as f64 / s).abs()))
}
