//! Small in-place discrete Fourier transforms (radix 2, with a direct
//! O(n^2) fallback for other lengths).

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::math::{cos, sin};

/// `x_k <- sum_j x_j e^{-+ 2 pi i jk/n}` (sign `-` when `inverse` is false).
/// The inverse is unnormalised.
pub fn dft(x: &mut [Complex64], inverse: bool) {
    let n = x.len();
    if n <= 1 {
        return;
    }
    let sign = if inverse { 1.0 } else { -1.0 };
    if n.is_power_of_two() {
        let mut j = 0;
        for i in 1..n {
            let mut bit = n >> 1;
            while j & bit != 0 {
                j ^= bit;
                bit >>= 1;
            }
            j |= bit;
            if i < j {
                x.swap(i, j);
            }
        }
        let mut len = 2;
        while len <= n {
            let ang = sign * core::f64::consts::TAU / len as f64;
            for start in (0..n).step_by(len) {
                for k in 0..len / 2 {
                    let w = Complex64::new(cos(ang * k as f64), sin(ang * k as f64));
                    let a = x[start + k];
                    let b = x[start + k + len / 2] * w;
                    x[start + k] = a + b;
                    x[start + k + len / 2] = a - b;
                }
            }
            len <<= 1;
        }
    } else {
        let src: Vec<Complex64> = x.to_vec();
        for (k, out) in x.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, v) in src.iter().enumerate() {
                let ang = sign * core::f64::consts::TAU * ((j * k) % n) as f64 / n as f64;
                acc += v * Complex64::new(cos(ang), sin(ang));
            }
            *out = acc;
        }
    }
}

/// 2D transform of a row-major `nx x ny` array (`data[i + j nx]`).
pub fn dft2(data: &mut [Complex64], nx: usize, ny: usize, inverse: bool) {
    for j in 0..ny {
        dft(&mut data[j * nx..(j + 1) * nx], inverse);
    }
    let mut col = vec![Complex64::new(0.0, 0.0); ny];
    for i in 0..nx {
        for j in 0..ny {
            col[j] = data[i + j * nx];
        }
        dft(&mut col, inverse);
        for j in 0..ny {
            data[i + j * nx] = col[j];
        }
    }
    if inverse {
        let s = 1.0 / (nx * ny) as f64;
        for v in data.iter_mut() {
            *v *= s;
        }
    }
}
