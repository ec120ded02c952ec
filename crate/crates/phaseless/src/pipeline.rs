//! The five-step magnitude-only reconstruction pipeline.
//!
//! Given `a_k = |f(k/s)|` for `k in [-M, M]` with `s > 2b`, the pipeline
//! lifts `a_k^2` to `g_M ~ f(.)^2` on a fine grid along a line shifted by
//! `ic` into the upper half plane (steps 1-2), integrates `Im(g'/g)` against
//! the averaged kernel `G*` to get unwrapped phase increments (step 3),
//! accumulates them into a continuous phase track (step 4), and resynthesizes
//! `f` on the real axis up to a global sign (step 5).
//!
//! Step 3 drops the printed `1/s` prefactor: the step-2 array is already the
//! derivative in the scaled variable `z`, so `Im(g'_M/g_M)` integrated in `z`
//! is exactly the phase increment of `g_M` along the line. Step 4 uses the
//! prefix relation `R[n] - R[n-1] = Q[n]`, which is the only alignment under
//! which every increment `Q[n] ~ arg g_M(n) - arg g_M(n-1)` is consumed once
//! and `R` covers its full index range.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

use crate::approx::{main_rate_bound, BoundInputs};
use crate::conv::{direct_fractional_convolve, fft_fractional_convolve};
use crate::error::{Error, Result};
use crate::grid::Centered;
use crate::kernels::{eval_g, eval_g_deriv, GStarCache, GStarTable};

/// Near-zero guard: step 3 refuses to divide by `g_M` values below this
/// fraction of the line maximum.
const NEAR_ZERO_RATIO: f64 = 1e-12;

/// Imaginary residue above this fraction of the output magnitude is surfaced
/// as a warning diagnostic.
const IMAG_RESIDUE_WARN: f64 = 1e-3;

/// Zero-padding policy for the FFT convolutions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
pub enum PadPolicy {
    #[default]
    NextPowerOfTwo,
}

/// All tunable parameters of a reconstruction run.
#[derive(Debug, Clone, Serialize)]
pub struct ReconstructionConfig {
    /// Half sample count and Gaussian localization parameter.
    pub m: u32,
    /// Sampling rate, `s > 2b`.
    pub s: f64,
    /// Bandwidth of the input signal.
    pub b: f64,
    /// Imaginary offset of the lifted line, `c > 0`; 0.01 to 0.25 works well.
    pub c: f64,
    /// Output grid density of step 5 (points per unit of the scaled variable).
    pub fine_factor: u32,
    /// Absolute tolerance for the G* tabulation.
    pub quad_tol: f64,
    pub fft_pad: PadPolicy,
}

impl ReconstructionConfig {
    pub fn new(m: u32, s: f64, b: f64, c: f64) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidConfig(format!("M = {m} must be at least 2")));
        }
        if !(s > 0.0) || b < 0.0 {
            return Err(Error::InvalidConfig(format!("need s > 0 and b >= 0, got s = {s}, b = {b}")));
        }
        if s <= 2.0 * b {
            return Err(Error::InvalidRate { s, double_b: 2.0 * b });
        }
        if !(c > 0.0) {
            return Err(Error::InvalidConfig(format!("line offset c = {c} must be positive")));
        }
        Ok(ReconstructionConfig {
            m,
            s,
            b,
            c,
            fine_factor: 8,
            quad_tol: 1e-12,
            fft_pad: PadPolicy::NextPowerOfTwo,
        })
    }

    pub fn with_fine_factor(mut self, n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidConfig("fine_factor must be positive".into()));
        }
        self.fine_factor = n;
        Ok(self)
    }

    pub fn with_quad_tol(mut self, tol: f64) -> Result<Self> {
        if !(tol > 0.0) {
            return Err(Error::InvalidConfig("quad_tol must be positive".into()));
        }
        self.quad_tol = tol;
        Ok(self)
    }
}

/// The unsigned input data `a_k = |f(k/s)|`, `k in [-M, M]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MagnitudeSamples {
    a: Centered<f64>,
}

impl MagnitudeSamples {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() % 2 != 1 {
            return Err(Error::InvalidConfig(format!(
                "magnitude array needs odd length 2M+1, got {}",
                values.len()
            )));
        }
        if values.iter().any(|v| !(*v >= 0.0)) {
            return Err(Error::InvalidConfig("magnitudes must be nonnegative".into()));
        }
        Ok(MagnitudeSamples {
            a: Centered::from_vec(values),
        })
    }

    pub fn from_centered(a: Centered<f64>) -> Self {
        assert!(a.iter().all(|v| *v >= 0.0));
        MagnitudeSamples { a }
    }

    pub fn m(&self) -> u32 {
        self.a.half() as u32
    }

    pub fn value(&self, k: i64) -> f64 {
        self.a[k]
    }

    pub fn values(&self) -> &[f64] {
        self.a.as_slice()
    }

    fn squared_weights(&self) -> Centered<Complex64> {
        Centered::from_fn(self.a.half(), |k| Complex64::new(self.a[k] * self.a[k], 0.0))
    }
}

/// `g_M` and `g'_M` evaluated at `z = n/M`, `n in [-M^2, M^2]`, along the
/// line `Im = c` of the scaled variable.
#[derive(Debug, Clone)]
pub struct FineGrid {
    pub g: Centered<Complex64>,
    pub gprime: Centered<Complex64>,
    pub m: u32,
    pub s: f64,
    pub c: f64,
}

fn assemble_fine(m: i64, outs: &[Centered<Complex64>]) -> Centered<Complex64> {
    Centered::from_fn(m * m, |n| {
        let q = n.div_euclid(m);
        let r = n.rem_euclid(m);
        outs[r as usize][q]
    })
}

fn lift(cfg: &ReconstructionConfig, mags: &MagnitudeSamples, kernel: impl Fn(f64) -> Complex64, direct: bool) -> Centered<Complex64> {
    assert_eq!(cfg.m, mags.m(), "config and magnitudes disagree on M");
    let m = cfg.m as i64;
    let weights = mags.squared_weights();
    let offsets: Vec<f64> = (0..m).map(|r| r as f64 / m as f64).collect();
    let outs = if direct {
        direct_fractional_convolve(&weights, kernel, &offsets)
    } else {
        fft_fractional_convolve(&weights, kernel, &offsets)
    };
    assemble_fine(m, &outs)
}

/// Step 1: `g[n] = sum_k a_k^2 G(n/M - k + ic, M)`, by `M` fractional-offset
/// FFT convolutions. The returned grid has `gprime` zero-filled until step 2.
pub fn step1_lift(cfg: &ReconstructionConfig, mags: &MagnitudeSamples) -> FineGrid {
    let c = cfg.c;
    let m = cfg.m;
    let g = lift(cfg, mags, |t| eval_g(Complex64::new(t, c), m), false);
    FineGrid {
        gprime: Centered::filled(g.half(), Complex64::new(0.0, 0.0)),
        g,
        m,
        s: cfg.s,
        c,
    }
}

/// Step 2: fills `gprime[n] = sum_k a_k^2 G'(n/M - k + ic, M)` with the
/// analytic derivative kernel.
pub fn step2_lift_deriv(cfg: &ReconstructionConfig, mags: &MagnitudeSamples, grid: &mut FineGrid) {
    let c = cfg.c;
    let m = cfg.m;
    grid.gprime = lift(cfg, mags, |t| eval_g_deriv(Complex64::new(t, c), m), false);
}

/// Direct-summation references for steps 1 and 2, used as oracles for the
/// FFT path.
pub fn step1_lift_direct(cfg: &ReconstructionConfig, mags: &MagnitudeSamples) -> FineGrid {
    let c = cfg.c;
    let m = cfg.m;
    let g = lift(cfg, mags, |t| eval_g(Complex64::new(t, c), m), true);
    FineGrid {
        gprime: Centered::filled(g.half(), Complex64::new(0.0, 0.0)),
        g,
        m,
        s: cfg.s,
        c,
    }
}

pub fn step2_lift_deriv_direct(cfg: &ReconstructionConfig, mags: &MagnitudeSamples, grid: &mut FineGrid) {
    let c = cfg.c;
    let m = cfg.m;
    grid.gprime = lift(cfg, mags, |t| eval_g_deriv(Complex64::new(t, c), m), true);
}

/// The quadrature increments `Q` and the accumulated unwrapped phase `R`.
#[derive(Debug, Clone, Default)]
pub struct PhaseTrack {
    /// `Q[n] ~ arg g_M(n) - arg g_M(n-1)` (continuous branch), `n in [-(M-2), M-1]`.
    pub q: BTreeMap<i64, f64>,
    /// `R[n] ~ arg g_M(n) - arg g_M(0)`, `n in [-(M-1), M-1]`.
    pub r: BTreeMap<i64, f64>,
}

/// Step 3: `Q[n] = sum_{k=(n-2)M}^{(n+1)M} Im(g'[k]/g[k]) G*(Mn - k, M)`.
///
/// Errors with `NearZeroOnLine` when `g_M` passes too close to zero anywhere
/// on the fine grid, which means the line `Im = c` runs near a complex zero
/// of `f^2` and the phase derivative is unreliable.
pub fn step3_phase_increments(
    cfg: &ReconstructionConfig,
    grid: &FineGrid,
    table: &GStarTable,
) -> Result<PhaseTrack> {
    assert_eq!(table.m(), cfg.m, "G* table built for a different M");
    let m = cfg.m as i64;

    let max_abs = grid.g.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
    let min_abs = grid.g.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
    if max_abs == 0.0 {
        // Identically zero input: the zero function, with zero phase.
        let q = (-(m - 2)..=(m - 1)).map(|n| (n, 0.0)).collect();
        return Ok(PhaseTrack { q, r: BTreeMap::new() });
    }
    if !(min_abs > NEAR_ZERO_RATIO * max_abs) {
        return Err(Error::NearZeroOnLine {
            min_ratio: if max_abs > 0.0 { min_abs / max_abs } else { 0.0 },
        });
    }

    let ratio_im = Centered::from_fn(m * m, |k| (grid.gprime[k] / grid.g[k]).im);

    let mut q = BTreeMap::new();
    for n in -(m - 2)..=(m - 1) {
        let mut acc = 0.0;
        for k in (n - 2) * m..=(n + 1) * m {
            acc += ratio_im[k] * table.value(m * n - k);
        }
        q.insert(n, acc);
    }
    Ok(PhaseTrack { q, r: BTreeMap::new() })
}

/// Step 4: prefix-sums the increments into `R` with `R[0] = 0`, upward
/// `R[n] = R[n-1] + Q[n]` and downward `R[n-1] = R[n] - Q[n]`.
pub fn step4_accumulate(track: &mut PhaseTrack) {
    let hi = *track.q.keys().next_back().expect("Q must be filled before step 4");
    let lo = *track.q.keys().next().expect("Q must be filled");
    track.r.clear();
    track.r.insert(0, 0.0);
    let mut acc = 0.0;
    for n in 1..=hi {
        acc += track.q[&n];
        track.r.insert(n, acc);
    }
    acc = 0.0;
    for n in (lo..=0).rev() {
        acc -= track.q[&n];
        track.r.insert(n - 1, acc);
    }
}

/// Per-run diagnostics attached to a reconstruction.
#[derive(Debug, Clone, Serialize)]
pub struct Diagnostics {
    /// Largest imaginary part of the step-5 sum before taking real parts.
    pub imag_residue: f64,
    /// Same, relative to the output magnitude.
    pub imag_residue_ratio: f64,
    /// `min |g_M|` on the lifted line; a rough proxy for distance to the
    /// nearest complex zero (no claim it estimates the strip width).
    pub min_abs_g_on_line: f64,
    pub max_abs_g_on_line: f64,
    /// Predicted exponential rate and exponent offset from the convergence
    /// bound, using `delta = c` as the strip proxy. `None` when the bound's
    /// hypotheses fail.
    pub predicted_rate: Option<f64>,
    pub predicted_offset: Option<f64>,
    /// Least-squares decay slope fitted across a benchmark sweep; only
    /// populated by benchmark drivers, never by a single run.
    pub fitted_decay_rate: Option<f64>,
    pub warnings: Vec<String>,
}

/// Real-valued reconstruction on the output grid, defined up to a global
/// sign.
#[derive(Debug, Clone, Serialize)]
pub struct ReconstructionResult {
    /// Output abscissae `z/s = j/(fine_factor * s)`.
    pub grid: Vec<f64>,
    /// `f_M` values at the grid points.
    pub values: Vec<f64>,
    /// Always false: magnitude-only data determines `f` only up to sign.
    pub sign_resolved: bool,
    /// Set by error measurement against a reference signal, when one exists.
    pub eta_hint: Option<i8>,
    pub fine_factor: u32,
    pub s: f64,
    pub diagnostics: Diagnostics,
}

impl ReconstructionResult {
    /// Half-width of the output grid in `j` units (`z = j / fine_factor`).
    pub fn j_half(&self) -> i64 {
        (self.values.len() / 2) as i64
    }

    pub fn value_at_j(&self, j: i64) -> f64 {
        self.values[(j + self.j_half()) as usize]
    }

    pub fn grid_at_j(&self, j: i64) -> f64 {
        self.grid[(j + self.j_half()) as usize]
    }
}

fn step5_impl(
    cfg: &ReconstructionConfig,
    grid: &FineGrid,
    track: &PhaseTrack,
    direct: bool,
) -> ReconstructionResult {
    let m = cfg.m as i64;
    let nf = cfg.fine_factor as i64;
    let c = cfg.c;

    // arg g_M(0): principal branch in (-pi, pi], anchoring the phase track.
    let arg0 = grid.g[0].arg();

    let weights = Centered::from_fn(m - 1, |k| {
        let mag = grid.g[k * m].norm().sqrt();
        let phase = 0.5 * (track.r[&k] + arg0);
        Complex64::from_polar(mag, phase)
    });

    let kernel = |t: f64| eval_g(Complex64::new(t, -c), cfg.m);
    let offsets: Vec<f64> = (0..nf).map(|r| r as f64 / nf as f64).collect();
    let outs = if direct {
        direct_fractional_convolve(&weights, kernel, &offsets)
    } else {
        fft_fractional_convolve(&weights, kernel, &offsets)
    };

    let j_half = nf * (m - 1);
    let mut values = Vec::with_capacity((2 * j_half + 1) as usize);
    let mut grid_x = Vec::with_capacity(values.capacity());
    let mut max_im = 0.0f64;
    let mut max_abs = 0.0f64;
    for j in -j_half..=j_half {
        let q = j.div_euclid(nf);
        let r = j.rem_euclid(nf);
        let v = outs[r as usize][q];
        max_im = max_im.max(v.im.abs());
        max_abs = max_abs.max(v.norm());
        values.push(v.re);
        grid_x.push(j as f64 / (nf as f64 * cfg.s));
    }

    let min_abs_g = grid.g.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
    let max_abs_g = grid.g.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
    let ratio = if max_abs > 0.0 { max_im / max_abs } else { 0.0 };
    let mut warnings = Vec::new();
    if ratio > IMAG_RESIDUE_WARN {
        warnings.push(format!(
            "imaginary residue {:.3e} of output magnitude exceeds {:.0e}; \
             the phase track may have slipped a branch",
            ratio, IMAG_RESIDUE_WARN
        ));
    }
    let bound = main_rate_bound(&BoundInputs::new(cfg.m, cfg.b, cfg.s, 0.75, cfg.c, cfg.c));

    ReconstructionResult {
        grid: grid_x,
        values,
        sign_resolved: false,
        eta_hint: None,
        fine_factor: cfg.fine_factor,
        s: cfg.s,
        diagnostics: Diagnostics {
            imag_residue: max_im,
            imag_residue_ratio: ratio,
            min_abs_g_on_line: min_abs_g,
            max_abs_g_on_line: max_abs_g,
            predicted_rate: bound.as_ref().ok().map(|(r, _)| *r),
            predicted_offset: bound.as_ref().ok().map(|(_, o)| *o),
            fitted_decay_rate: None,
            warnings,
        },
    }
}

/// Step 5: resynthesizes
/// `f_M(z/s) = sum_k sqrt(|g_M(k/s)|) e^{(i/2)(R[k] + arg g_M(0))} G(z - k - ic, M)`
/// on the output grid `z = j/fine_factor` via FFT convolutions, returning the
/// real part with the imaginary residue recorded in the diagnostics.
pub fn step5_resynthesize(
    cfg: &ReconstructionConfig,
    grid: &FineGrid,
    track: &PhaseTrack,
) -> ReconstructionResult {
    step5_impl(cfg, grid, track, false)
}

/// Direct-summation reference for step 5.
pub fn step5_resynthesize_direct(
    cfg: &ReconstructionConfig,
    grid: &FineGrid,
    track: &PhaseTrack,
) -> ReconstructionResult {
    step5_impl(cfg, grid, track, true)
}

/// Runs the whole pipeline. Deterministic for fixed inputs; G* tables are
/// fetched from (or inserted into) `cache` keyed by `(M, quad_tol)`.
pub fn reconstruct(
    cfg: &ReconstructionConfig,
    mags: &MagnitudeSamples,
    cache: &GStarCache,
) -> Result<ReconstructionResult> {
    let table = cache.get_or_build(cfg.m, cfg.quad_tol)?;
    let mut grid = step1_lift(cfg, mags);
    step2_lift_deriv(cfg, mags, &mut grid);
    let mut track = step3_phase_increments(cfg, &grid, &table)?;
    step4_accumulate(&mut track);
    Ok(step5_resynthesize(cfg, &grid, &track))
}

/// Fully direct (no-FFT) reference pipeline, for oracle comparisons.
pub fn reconstruct_direct(
    cfg: &ReconstructionConfig,
    mags: &MagnitudeSamples,
    cache: &GStarCache,
) -> Result<ReconstructionResult> {
    let table = cache.get_or_build(cfg.m, cfg.quad_tol)?;
    let mut grid = step1_lift_direct(cfg, mags);
    step2_lift_deriv_direct(cfg, mags, &mut grid);
    let mut track = step3_phase_increments(cfg, &grid, &table)?;
    step4_accumulate(&mut track);
    Ok(step5_impl(cfg, &grid, &track, true))
}

/// The symmetric integer error-measurement window
/// `I_{r,M} = [-(floor(r(M-1)) - 1), floor(r(M-1)) - 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorDomain {
    pub r: f64,
    pub m: u32,
    pub lo: i64,
    pub hi: i64,
}

impl ErrorDomain {
    pub fn new(r: f64, m: u32) -> Self {
        assert!(r > 0.0 && r <= 1.0);
        let hi = (r * (m as f64 - 1.0)).floor() as i64 - 1;
        ErrorDomain { r, m, lo: -hi, hi }
    }

    /// The benchmark metric window `I_{1/2, M+1}` for a run with half sample
    /// count `M`.
    pub fn benchmark_window(m: u32) -> Self {
        ErrorDomain::new(0.5, m + 1)
    }
}

/// Worst-case error over the grid points of `domain`, minimized over the
/// global sign. Returns the error and the minimizing sign.
pub fn worst_case_error(
    result: &ReconstructionResult,
    reference: impl Fn(f64) -> f64,
    domain: &ErrorDomain,
) -> Result<(f64, i8)> {
    let nf = result.fine_factor as i64;
    let j_lo = domain.lo * nf;
    let j_hi = domain.hi * nf;
    if j_lo < -result.j_half() || j_hi > result.j_half() {
        return Err(Error::DomainMismatch {
            lo: domain.lo,
            hi: domain.hi,
        });
    }
    let mut err_plus = 0.0f64;
    let mut err_minus = 0.0f64;
    for j in j_lo..=j_hi {
        let x = result.grid_at_j(j);
        let v = result.value_at_j(j);
        let fref = reference(x);
        err_plus = err_plus.max((v - fref).abs());
        err_minus = err_minus.max((v + fref).abs());
    }
    if err_plus <= err_minus {
        Ok((err_plus, 1))
    } else {
        Ok((err_minus, -1))
    }
}
