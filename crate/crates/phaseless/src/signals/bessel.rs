//! Bessel functions of the first kind, self-contained.
//!
//! `J_1` is the ground-truth oracle for the main benchmark, so it is
//! implemented in-repo: the ascending power series for small arguments and
//! Miller's backward recurrence with even-order normalization beyond.
//! Accuracy is ~1e-13 absolute over the benchmark domain.

/// Series cutoff: below this the alternating series loses fewer than ~3
/// digits to cancellation.
const SERIES_CUTOFF: f64 = 8.0;

/// `J_1(x)` via ascending series, `|x| <= SERIES_CUTOFF`.
fn j1_series(x: f64) -> f64 {
    let half = 0.5 * x;
    let neg_q = -half * half;
    let mut term = half;
    let mut sum = term;
    let mut k = 1.0f64;
    loop {
        term *= neg_q / (k * (k + 1.0));
        sum += term;
        if term.abs() < 1e-18 * sum.abs() + 1e-300 {
            return sum;
        }
        k += 1.0;
    }
}

/// Miller's backward recurrence: returns `J_n(x)` for all `0 <= n <= n_max`,
/// `x > 0`. Start order is far enough above both `x` and `n_max` that the
/// seeded minimal solution dominates after downward recursion.
fn miller(x: f64, n_max: usize) -> Vec<f64> {
    debug_assert!(x > 0.0);
    let start = ((x.ceil() as usize).max(n_max) + 60) & !1; // even
    let mut v = vec![0.0f64; start + 2];
    v[start] = 1e-30;
    for k in (1..=start).rev() {
        v[k - 1] = (2.0 * k as f64 / x) * v[k] - v[k + 1];
        if v[k - 1].abs() > 1e200 {
            for w in v[k - 1..].iter_mut() {
                *w *= 1e-200;
            }
        }
    }
    // Normalization: J0 + 2*(J2 + J4 + ...) = 1.
    let mut norm = v[0];
    let mut k = 2;
    while k <= start {
        norm += 2.0 * v[k];
        k += 2;
    }
    v.truncate(n_max + 1);
    for w in v.iter_mut() {
        *w /= norm;
    }
    v
}

/// `J_1(x)` for any real `x`.
pub fn j1(x: f64) -> f64 {
    if x < 0.0 {
        return -j1(-x);
    }
    if x <= SERIES_CUTOFF {
        j1_series(x)
    } else {
        miller(x, 1)[1]
    }
}

/// `J_n(x)` for small nonnegative `n`.
pub fn jn(n: usize, x: f64) -> f64 {
    if x < 0.0 {
        let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
        return sign * jn(n, -x);
    }
    if x == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    miller(x, n)[n]
}
