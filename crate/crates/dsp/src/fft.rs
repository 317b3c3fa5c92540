use num_complex::Complex64;
use std::f64::consts::PI;

use crate::{ensure_finite, DspError, Result};

fn check_pow2_len(n: usize) -> Result<()> {
    if n == 0 || !n.is_power_of_two() {
        return Err(DspError::InvalidArgument(format!(
            "FFT length must be a power of two, got {n}"
        )));
    }
    Ok(())
}

/// Unnormalized forward DFT, X[k] = sum_n x[n] e^(-j2πkn/N), radix-2 only.
pub fn fft(x: &[Complex64]) -> Result<Vec<Complex64>> {
    check_pow2_len(x.len())?;
    ensure_finite(x)?;
    let mut data = x.to_vec();
    transform(&mut data, -1.0);
    Ok(data)
}

/// Inverse DFT with 1/N normalization; `ifft(fft(x)) == x` up to rounding.
pub fn ifft(x: &[Complex64]) -> Result<Vec<Complex64>> {
    check_pow2_len(x.len())?;
    ensure_finite(x)?;
    let mut data = x.to_vec();
    transform(&mut data, 1.0);
    let inv_n = 1.0 / data.len() as f64;
    for v in &mut data {
        *v *= inv_n;
    }
    Ok(data)
}

/// Rotates a sequence right by floor(n/2) so bin 0 lands in the center.
pub fn fftshift<T: Clone>(x: &[T]) -> Vec<T> {
    let n = x.len();
    let half = n / 2;
    let mut out = Vec::with_capacity(n);
    out.extend_from_slice(&x[n - half..]);
    out.extend_from_slice(&x[..n - half]);
    out
}

// In-place iterative radix-2 Cooley-Tukey; `sign` is the exponent sign.
fn transform(data: &mut [Complex64], sign: f64) {
    let n = data.len();
    // bit-reversal permutation
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = (i.reverse_bits() >> (usize::BITS - bits)) as usize;
        if j > i {
            data.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let step = sign * 2.0 * PI / len as f64;
        for start in (0..n).step_by(len) {
            for k in 0..half {
                // direct twiddle evaluation keeps rounding error flat
                let w = Complex64::from_polar(1.0, step * k as f64);
                let a = data[start + k];
                let b = data[start + k + half] * w;
                data[start + k] = a + b;
                data[start + k + half] = a - b;
            }
        }
        len *= 2;
    }
}
