//! FFT-based fractional-offset linear convolution.
//!
//! Given weights `w_k`, `k in [-W, W]`, and a kernel sampler, computes
//! `out[q] = sum_k w_k * kernel(q - k + frac)` for `q in [-W, W]` and each
//! fractional offset `frac`. One zero-padded linear convolution per offset;
//! the kernel is sampled at integer-plus-frac arguments on `[-2W, 2W]` and
//! the transform length is the next power of two that fits the full linear
//! convolution, so no wraparound ever touches the extracted outputs. The
//! weight transform is shared across offsets.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::grid::Centered;

/// Convolves `weights` against a kernel at each fractional offset. Returns
/// one centered output array (half-width `W = weights.half()`) per offset.
/// Bit-for-bit deterministic for fixed inputs.
pub fn fft_fractional_convolve(
    weights: &Centered<Complex64>,
    kernel: impl Fn(f64) -> Complex64,
    offsets: &[f64],
) -> Vec<Centered<Complex64>> {
    let w = weights.half();
    let span = (4 * w + 1) as usize; // kernel support [-2W, 2W]
    let len = (weights.len() + span - 1).next_power_of_two();

    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(len);
    let ifft = planner.plan_fft_inverse(len);

    let mut wbuf = vec![Complex64::new(0.0, 0.0); len];
    for (i, v) in weights.iter().enumerate() {
        wbuf[i] = *v;
    }
    fft.process(&mut wbuf);

    let scale = 1.0 / len as f64;
    offsets
        .iter()
        .map(|&frac| {
            let mut kbuf = vec![Complex64::new(0.0, 0.0); len];
            for d in -2 * w..=2 * w {
                kbuf[(d + 2 * w) as usize] = kernel(d as f64 + frac);
            }
            fft.process(&mut kbuf);
            for (a, b) in kbuf.iter_mut().zip(&wbuf) {
                *a *= b;
            }
            ifft.process(&mut kbuf);
            // Output index q lands at position (q + W) + 2W in the full
            // linear convolution.
            Centered::from_fn(w, |q| kbuf[(q + 3 * w) as usize] * scale)
        })
        .collect()
}

/// Direct O(W^2) reference for the same computation. Kept independent of the
/// FFT path so it can serve as its oracle.
pub fn direct_fractional_convolve(
    weights: &Centered<Complex64>,
    kernel: impl Fn(f64) -> Complex64,
    offsets: &[f64],
) -> Vec<Centered<Complex64>> {
    let w = weights.half();
    offsets
        .iter()
        .map(|&frac| {
            Centered::from_fn(w, |q| {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in -w..=w {
                    acc += weights[k] * kernel((q - k) as f64 + frac);
                }
                acc
            })
        })
        .collect()
}
