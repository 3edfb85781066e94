//! Minimal power-of-two complex FFT used by the padded-convolution
//! path. Iterative Cooley-Tukey with precomputed twiddles; plenty for
//! the grid sizes this crate works at (≤ 1024²).

use alloc::vec::Vec;
use num_complex::Complex64;

/// Forward/inverse transform plan for one power-of-two length.
pub struct FftPlan {
    len: usize,
    // twiddles for the forward transform; the inverse conjugates them
    twiddles: Vec<Complex64>,
}

impl FftPlan {
    pub fn new(len: usize) -> Self {
        assert!(len.is_power_of_two(), "fft length must be a power of two");
        let mut twiddles = Vec::with_capacity(len / 2);
        for j in 0..len / 2 {
            let ang = -2.0 * core::f64::consts::PI * j as f64 / len as f64;
            twiddles.push(Complex64::new(libm::cos(ang), libm::sin(ang)));
        }
        FftPlan { len, twiddles }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    fn transform(&self, data: &mut [Complex64], inverse: bool) {
        let n = self.len;
        assert_eq!(data.len(), n);
        // bit-reversal permutation
        let mut j = 0usize;
        for i in 1..n {
            let mut bit = n >> 1;
            while j & bit != 0 {
                j ^= bit;
                bit >>= 1;
            }
            j |= bit;
            if i < j {
                data.swap(i, j);
            }
        }
        let mut half = 1usize;
        while half < n {
            let stride = n / (2 * half);
            for start in (0..n).step_by(2 * half) {
                for m in 0..half {
                    let mut w = self.twiddles[m * stride];
                    if inverse {
                        w = w.conj();
                    }
                    let a = data[start + m];
                    let b = data[start + m + half] * w;
                    data[start + m] = a + b;
                    data[start + m + half] = a - b;
                }
            }
            half *= 2;
        }
    }

    pub fn forward(&self, data: &mut [Complex64]) {
        self.transform(data, false);
    }

    /// Unnormalized inverse; the caller divides by the grid size.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.transform(data, true);
    }
}

/// In-place 2D transform of a row-major `size × size` grid.
pub fn transform_2d(plan: &FftPlan, grid: &mut [Complex64], inverse: bool) {
    let size = plan.len();
    assert_eq!(grid.len(), size * size);
    let mut scratch = alloc::vec![Complex64::new(0.0, 0.0); size];
    for row in grid.chunks_exact_mut(size) {
        if inverse {
            plan.inverse(row);
        } else {
            plan.forward(row);
        }
    }
    for col in 0..size {
        for r in 0..size {
            scratch[r] = grid[r * size + col];
        }
        if inverse {
            plan.inverse(&mut scratch);
        } else {
            plan.forward(&mut scratch);
        }
        for r in 0..size {
            grid[r * size + col] = scratch[r];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_matches_dft() {
        let n = 16;
        let plan = FftPlan::new(n);
        let mut data: Vec<Complex64> = (0..n)
            .map(|i| Complex64::new((i as f64).sin(), (i as f64 * 0.7).cos()))
            .collect();
        let orig = data.clone();
        // compare against the naive DFT
        let mut naive = alloc::vec![Complex64::new(0.0, 0.0); n];
        for (k, out) in naive.iter_mut().enumerate() {
            for (j, &v) in orig.iter().enumerate() {
                let ang = -2.0 * core::f64::consts::PI * (k * j) as f64 / n as f64;
                *out += v * Complex64::new(libm::cos(ang), libm::sin(ang));
            }
        }
        plan.forward(&mut data);
        for (a, b) in data.iter().zip(&naive) {
            assert!((a - b).norm() < 1e-12);
        }
        plan.inverse(&mut data);
        for (a, b) in data.iter().zip(&orig) {
            assert!((a / n as f64 - b).norm() < 1e-13);
        }
    }
}
