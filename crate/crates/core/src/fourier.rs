//! Synthesis of real even functions on `ℤ_q` from their spectrum.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

/// `g(y) = Σ_r spectrum[r]·e(r·y/q)` for every `y ∈ [0, q)`, real part only.
///
/// The spectrum is expected to be symmetric (`spectrum[r] = spectrum[q − r]`),
/// in which case the imaginary part vanishes.
pub fn synthesize(spectrum: &[f64]) -> Vec<f64> {
    let n = spectrum.len();
    if n == 0 {
        return Vec::new();
    }
    let mut buf: Vec<Complex<f64>> = spectrum.iter().map(|&v| Complex::new(v, 0.0)).collect();
    let fft = FftPlanner::new().plan_fft_inverse(n);
    fft.process(&mut buf);
    buf.into_iter().map(|c| c.re).collect()
}

/// `cos(2πk/q)` for `k ∈ [0, q)`, computed from `min(k, q − k)` so that the
/// table is exactly symmetric.
pub fn cos_table(q: u64) -> Vec<f64> {
    (0..q)
        .map(|k| {
            let k = k.min(q - k);
            (std::f64::consts::TAU * k as f64 / q as f64).cos()
        })
        .collect()
}
