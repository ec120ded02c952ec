//! The regularized sinc kernels G, G' and G*.
//!
//! `G(z, M) = sin(pi z)/(pi z) * exp(-pi z^2 / (2M))` is the sinc-Gaussian
//! kernel; `G'` is its analytic derivative in `z`, and `G*` is the moving
//! average `(1/M) * integral of G over [z - M, z]`, which has no closed form
//! and is tabulated at integer arguments by adaptive quadrature.
//!
//! Note: a published form of `G'` divides the first and third bracket terms
//! by `pi z` instead of `z` and `pi z^2`; that expression is not the
//! derivative of `G`. This module implements the true analytic derivative,
//! which the reconstruction pipeline requires, and the test suite validates
//! it against central finite differences of `G`.

use std::collections::HashMap;
use std::io::{BufRead, Write};
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;

use crate::error::{Error, Result};

const PI: f64 = std::f64::consts::PI;

/// Evaluates `G(z, M) = sin(pi z)/(pi z) * exp(-pi z^2 / (2M))` at any
/// complex `z`. The removable singularity at `z = 0` is filled by a short
/// Taylor series below `|z| < 1e-6`.
pub fn eval_g(z: Complex64, m: u32) -> Complex64 {
    debug_assert!(m >= 2);
    let pz = PI * z;
    let sinc = if z.norm() < 1e-6 {
        let w = pz * pz;
        Complex64::new(1.0, 0.0) - w / 6.0 + w * w / 120.0
    } else {
        pz.sin() / pz
    };
    sinc * (-pz * z / (2.0 * m as f64)).exp()
}

/// Evaluates `G` for real arguments, avoiding complex arithmetic.
pub fn eval_g_real(x: f64, m: u32) -> f64 {
    debug_assert!(m >= 2);
    let px = PI * x;
    let sinc = if x.abs() < 1e-6 {
        let w = px * px;
        1.0 - w / 6.0 + w * w / 120.0
    } else {
        px.sin() / px
    };
    sinc * (-px * x / (2.0 * m as f64)).exp()
}

/// Evaluates the analytic derivative `dG/dz`:
///
/// `G'(z, M) = [cos(pi z)/z - sin(pi z)/(pi z^2) - sin(pi z)/M] * exp(-pi z^2/(2M))`
///
/// The bracket is odd and analytic; below `|z| < 1e-4` it is replaced by its
/// Taylor series to avoid cancellation.
pub fn eval_g_deriv(z: Complex64, m: u32) -> Complex64 {
    debug_assert!(m >= 2);
    let mf = m as f64;
    let pz = PI * z;
    let bracket = if z.norm() < 1e-4 {
        // cos(pi z)/z - sin(pi z)/(pi z^2) = -pi^2 z/3 + pi^4 z^3/30 + O(z^5)
        // sin(pi z)/M = (pi z - (pi z)^3/6)/M + O(z^5)
        let z2 = z * z;
        let sinc_deriv = -PI * PI * z / 3.0 + PI.powi(4) * z * z2 / 30.0;
        let sin_over_m = (pz - pz * pz * pz / 6.0) / mf;
        sinc_deriv - sin_over_m
    } else {
        pz.cos() / z - pz.sin() / (pz * z) - pz.sin() / mf
    };
    bracket * (-pz * z / (2.0 * mf)).exp()
}

// ---------------------------------------------------------------------------
// Adaptive quadrature (bisection with a fixed 15-point Gauss rule per panel).
// ---------------------------------------------------------------------------

const GAUSS_ORDER: usize = 15;
const MAX_DEPTH: u32 = 40;

fn gauss_legendre_15() -> &'static ([f64; GAUSS_ORDER], [f64; GAUSS_ORDER]) {
    static RULE: OnceLock<([f64; GAUSS_ORDER], [f64; GAUSS_ORDER])> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = GAUSS_ORDER;
        let mut nodes = [0.0; GAUSS_ORDER];
        let mut weights = [0.0; GAUSS_ORDER];
        for i in 0..n {
            // Newton iteration on P_n from the Chebyshev-like initial guess.
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre_and_deriv(n, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre_and_deriv(n, x);
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        (nodes, weights)
    })
}

fn legendre_and_deriv(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

fn gauss_panel(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let (nodes, weights) = gauss_legendre_15();
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut sum = 0.0;
    for i in 0..GAUSS_ORDER {
        sum += weights[i] * f(mid + half * nodes[i]);
    }
    sum * half
}

fn adapt(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> Result<f64> {
    let whole = gauss_panel(f, a, b);
    let mid = 0.5 * (a + b);
    let left = gauss_panel(f, a, mid);
    let right = gauss_panel(f, mid, b);
    let refined = left + right;
    if (refined - whole).abs() <= tol {
        return Ok(refined);
    }
    if depth >= MAX_DEPTH {
        return Err(Error::QuadratureNonConvergence { a, b, tol });
    }
    Ok(adapt(f, a, mid, 0.5 * tol, depth + 1)? + adapt(f, mid, b, 0.5 * tol, depth + 1)?)
}

/// Integrates `f` over `[a, b]` to absolute tolerance `tol` by adaptive
/// bisection. The interval is first split into unit-length panels so the
/// oscillations of the sinc factor never straddle a single panel.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let panels = (b - a).abs().ceil().max(1.0) as usize;
    let step = (b - a) / panels as f64;
    let panel_tol = tol / panels as f64;
    let mut total = 0.0;
    for i in 0..panels {
        let x0 = a + i as f64 * step;
        let x1 = if i + 1 == panels { b } else { a + (i + 1) as f64 * step };
        total += adapt(&f, x0, x1, panel_tol, 0)?;
    }
    Ok(total)
}

// ---------------------------------------------------------------------------
// G* tabulation.
// ---------------------------------------------------------------------------

/// `G*(m, M)` for a single integer argument, by adaptive quadrature to
/// absolute error `tol`.
pub fn gstar_value(arg: i64, m: u32, tol: f64) -> Result<f64> {
    let mf = m as f64;
    let lo = arg as f64 - mf;
    let hi = arg as f64;
    Ok(integrate(|t| eval_g_real(t, m), lo, hi, tol * mf)? / mf)
}

/// Table of `G*(m, M)` at every integer argument in `[-M, 2M]`, the exact
/// range requested by step 3 of the reconstruction pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct GStarTable {
    m: u32,
    quad_tolerance: f64,
    /// values[i] = G*(i - M, M)
    values: Vec<f64>,
}

impl GStarTable {
    pub fn build(m: u32, tol: f64) -> Result<Self> {
        assert!(m >= 2, "G* table requires M >= 2");
        assert!(tol > 0.0);
        let mi = m as i64;
        let mut values = Vec::with_capacity((3 * mi + 1) as usize);
        for arg in -mi..=2 * mi {
            let v = gstar_value(arg, m, tol)?;
            debug_assert!(v.abs() <= 2.0);
            values.push(v);
        }
        Ok(GStarTable {
            m,
            quad_tolerance: tol,
            values,
        })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn quad_tolerance(&self) -> f64 {
        self.quad_tolerance
    }

    pub fn value(&self, arg: i64) -> f64 {
        let mi = self.m as i64;
        assert!(
            arg >= -mi && arg <= 2 * mi,
            "G* argument {} outside tabulated range [{}, {}]",
            arg,
            -mi,
            2 * mi
        );
        self.values[(arg + mi) as usize]
    }

    pub fn entries(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        let mi = self.m as i64;
        self.values.iter().enumerate().map(move |(i, &v)| (i as i64 - mi, v))
    }

    /// Writes the on-disk cache format: a header line `M=<M> tol=<tol>`
    /// followed by one `m <tab> value` line per entry, 17 significant digits.
    pub fn write_to(&self, w: &mut impl Write) -> Result<()> {
        writeln!(w, "M={} tol={:e}", self.m, self.quad_tolerance)?;
        for (arg, v) in self.entries() {
            writeln!(w, "{}\t{:.16e}", arg, v)?;
        }
        Ok(())
    }

    pub fn read_from(r: impl BufRead) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty G* cache file".into()))??;
        let mut m = None;
        let mut tol = None;
        for tok in header.split_whitespace() {
            if let Some(v) = tok.strip_prefix("M=") {
                m = Some(v.parse::<u32>().map_err(|e| Error::Parse(format!("bad M: {e}")))?);
            } else if let Some(v) = tok.strip_prefix("tol=") {
                tol = Some(v.parse::<f64>().map_err(|e| Error::Parse(format!("bad tol: {e}")))?);
            }
        }
        let m = m.ok_or_else(|| Error::Parse("G* cache header missing M=".into()))?;
        let tol = tol.ok_or_else(|| Error::Parse("G* cache header missing tol=".into()))?;
        let mi = m as i64;
        let mut values = vec![f64::NAN; (3 * mi + 1) as usize];
        let mut seen = 0usize;
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let arg: i64 = parts
                .next()
                .ok_or_else(|| Error::Parse("missing argument column".into()))?
                .parse()
                .map_err(|e| Error::Parse(format!("bad argument: {e}")))?;
            let v: f64 = parts
                .next()
                .ok_or_else(|| Error::Parse("missing value column".into()))?
                .parse()
                .map_err(|e| Error::Parse(format!("bad value: {e}")))?;
            if arg < -mi || arg > 2 * mi {
                return Err(Error::Parse(format!("argument {} out of range", arg)));
            }
            values[(arg + mi) as usize] = v;
            seen += 1;
        }
        if seen != values.len() || values.iter().any(|v| v.is_nan()) {
            return Err(Error::Parse("G* cache file is missing entries".into()));
        }
        Ok(GStarTable {
            m,
            quad_tolerance: tol,
            values,
        })
    }
}

/// Process-wide cache of G* tables keyed by `(M, tol)`. Tables are immutable
/// once built and shared via `Arc`, so lookups are cheap and reconstructions
/// with the same parameters reuse the same table.
#[derive(Default)]
pub struct GStarCache {
    map: Mutex<HashMap<(u32, u64), Arc<GStarTable>>>,
}

impl GStarCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get_or_build(&self, m: u32, tol: f64) -> Result<Arc<GStarTable>> {
        let key = (m, tol.to_bits());
        if let Some(t) = self.map.lock().unwrap().get(&key) {
            return Ok(Arc::clone(t));
        }
        let table = Arc::new(GStarTable::build(m, tol)?);
        self.map
            .lock()
            .unwrap()
            .entry(key)
            .or_insert_with(|| Arc::clone(&table));
        Ok(table)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn trapezoid(f: impl Fn(f64) -> f64, a: f64, b: f64, step: f64) -> f64 {
        let n = ((b - a) / step).ceil() as usize;
        let h = (b - a) / n as f64;
        let mut sum = 0.5 * (f(a) + f(b));
        for i in 1..n {
            sum += f(a + i as f64 * h);
        }
        sum * h
    }

    #[test]
    fn g_at_zero_is_one() {
        assert_eq!(eval_g(Complex64::new(0.0, 0.0), 8), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn g_vanishes_at_nonzero_integers() {
        for k in [-7i64, -3, 1, 2, 5] {
            let v = eval_g(Complex64::new(k as f64, 0.0), 8);
            assert!(v.norm() < 1e-15, "G({k}) = {v}");
        }
    }

    #[test]
    fn g_at_half() {
        // (2/pi) * exp(-pi/64)
        let v = eval_g(Complex64::new(0.5, 0.0), 8);
        assert!((v.re - 0.60613).abs() < 1e-4);
        assert_eq!(v.im, 0.0);
    }

    #[test]
    fn g_on_imaginary_axis_exceeds_one() {
        // sinh(0.1 pi)/(0.1 pi) * exp(pi * 0.01 / 16), purely real and > 1
        let v = eval_g(Complex64::new(0.0, 0.1), 8);
        let expected = (0.1 * PI).sinh() / (0.1 * PI) * (PI * 0.01 / 16.0).exp();
        assert!((v.re - expected).abs() < 1e-12);
        assert!(v.im.abs() < 1e-15);
        assert!(v.re > 1.0);
    }

    #[test]
    fn g_series_switchover_is_smooth() {
        for &x in &[9.9e-7, 1.01e-6, 9.9e-5, 1.01e-4] {
            let a = eval_g(Complex64::new(x, 0.0), 8);
            let b = eval_g_real(x, 8);
            assert!((a.re - b).abs() < 1e-15);
        }
    }

    #[test]
    fn g_deriv_at_zero_is_zero() {
        let v = eval_g_deriv(Complex64::new(0.0, 0.0), 8);
        assert_eq!(v, Complex64::new(0.0, 0.0));
    }

    fn fd_deriv(z: Complex64, m: u32) -> Complex64 {
        let h = 1e-6;
        (eval_g(z + h, m) - eval_g(z - h, m)) / (2.0 * h)
    }

    #[test]
    fn g_deriv_matches_finite_difference_at_half() {
        let z = Complex64::new(0.5, 0.0);
        let d = eval_g_deriv(z, 8);
        let fd = fd_deriv(z, 8);
        assert!((d - fd).norm() / d.norm() < 1e-8);
    }

    #[test]
    fn g_deriv_matches_finite_difference_complex() {
        let z = Complex64::new(1.0, 0.1);
        let d = eval_g_deriv(z, 16);
        let fd = fd_deriv(z, 16);
        assert!((d - fd).norm() / d.norm() < 1e-7);
    }

    #[test]
    fn g_deriv_finite_difference_sweep() {
        // 1000 deterministic pseudo-random points in |Re z| <= 2M, |Im z| <= 1.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for &m in &[8u32, 16] {
            for _ in 0..500 {
                let re = rng.gen_range(-2.0 * m as f64..2.0 * m as f64);
                let im = rng.gen_range(-1.0..1.0);
                let z = Complex64::new(re, im);
                let d = eval_g_deriv(z, m);
                let fd = fd_deriv(z, m);
                let scale = d.norm() + eval_g(z, m).norm() * 1e-3 + 1e-300;
                assert!(
                    (d - fd).norm() <= 1e-6 * scale,
                    "mismatch at z = {z}, M = {m}: {d} vs {fd}"
                );
            }
        }
    }

    proptest! {
        #[test]
        fn g_even_symmetry(re in -20.0f64..20.0, im in -1.0f64..1.0) {
            let z = Complex64::new(re, im);
            let a = eval_g(z, 8);
            let b = eval_g(-z, 8);
            prop_assert!((a - b).norm() <= 1e-14 * (1.0 + a.norm()));
        }

        #[test]
        fn g_deriv_odd_symmetry(re in -20.0f64..20.0, im in -1.0f64..1.0) {
            let z = Complex64::new(re, im);
            let a = eval_g_deriv(z, 8);
            let b = eval_g_deriv(-z, 8);
            prop_assert!((a + b).norm() <= 1e-13 * (1.0 + a.norm()));
        }

        #[test]
        fn g_bounded_by_one_on_reals(x in -100.0f64..100.0) {
            prop_assert!(eval_g_real(x, 8).abs() <= 1.0 + 1e-15);
        }
    }

    #[test]
    fn quadrature_polynomial_exact() {
        let v = integrate(|x| x * x * x - 2.0 * x + 1.0, -1.0, 3.0, 1e-13).unwrap();
        // exact: [x^4/4 - x^2 + x] from -1 to 3
        let exact = (81.0 / 4.0 - 9.0 + 3.0) - (0.25 - 1.0 - 1.0);
        assert!((v - exact).abs() < 1e-12);
    }

    #[test]
    fn gstar_matches_trapezoid_oracle() {
        for &m in &[4u32, 8, 16] {
            let table = GStarTable::build(m, 1e-12).unwrap();
            for (arg, v) in table.entries() {
                let mf = m as f64;
                let oracle = trapezoid(|t| eval_g_real(t, m), arg as f64 - mf, arg as f64, 1e-3) / mf;
                assert!(
                    (v - oracle).abs() < 1e-6,
                    "G*({arg}, {m}) = {v} vs trapezoid {oracle}"
                );
            }
        }
    }

    #[test]
    fn gstar_tail_is_negligible() {
        for &m in &[16u32, 32] {
            let v = gstar_value(-(m as i64), m, 1e-13).unwrap();
            assert!(v.abs() < (-PI * m as f64 / 4.0).exp(), "tail at -M too large: {v}");
        }
    }

    #[test]
    fn gstar_at_m_is_half_over_m() {
        let m = 50u32;
        let v = gstar_value(m as i64, m, 1e-12).unwrap();
        let expected = 1.0 / (2.0 * m as f64);
        assert!((v - expected).abs() / expected < 0.1, "G*(M, M) = {v}");
    }

    #[test]
    fn gstar_cache_file_round_trip() {
        let table = GStarTable::build(8, 1e-12).unwrap();
        let mut buf = Vec::new();
        table.write_to(&mut buf).unwrap();
        let back = GStarTable::read_from(&buf[..]).unwrap();
        assert_eq!(table, back);

        let mut buf2 = Vec::new();
        back.write_to(&mut buf2).unwrap();
        assert_eq!(buf, buf2, "cache serialization must be byte-deterministic");
    }

    #[test]
    fn gstar_cache_reuses_tables() {
        let cache = GStarCache::new();
        let a = cache.get_or_build(8, 1e-12).unwrap();
        let b = cache.get_or_build(8, 1e-12).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
    }
}
