//! Real-to-complex 3-D transforms on a cubic periodic grid.
//!
//! Physical arrays are `[z][y][x]` with `x` fastest. Spectral arrays are the
//! half spectrum `[kz][ky][kx]` with `kx` in `0..=n/2`. The x axis uses a
//! real transform; y and z use complex transforms on transposed buffers so
//! every 1-D pass runs over contiguous memory.

use std::sync::Arc;

use num_complex::Complex64;
use realfft::{ComplexToReal, RealFftPlanner, RealToComplex};
use rustfft::{Fft, FftPlanner};

pub struct Fft3 {
    n: usize,
    r2c: Arc<dyn RealToComplex<f64>>,
    c2r: Arc<dyn ComplexToReal<f64>>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Fft3 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fft3").field("n", &self.n).finish()
    }
}

fn transpose(src: &[Complex64], rows: usize, cols: usize, dst: &mut [Complex64]) {
    const B: usize = 16;
    for r0 in (0..rows).step_by(B) {
        for c0 in (0..cols).step_by(B) {
            for r in r0..(r0 + B).min(rows) {
                for c in c0..(c0 + B).min(cols) {
                    dst[c * rows + r] = src[r * cols + c];
                }
            }
        }
    }
}

impl Fft3 {
    pub fn new(n: usize) -> Self {
        let mut rp = RealFftPlanner::<f64>::new();
        let mut cp = FftPlanner::<f64>::new();
        Fft3 {
            n,
            r2c: rp.plan_fft_forward(n),
            c2r: rp.plan_fft_inverse(n),
            fwd: cp.plan_fft_forward(n),
            inv: cp.plan_fft_inverse(n),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Length of the x half spectrum.
    pub fn nh(&self) -> usize {
        self.n / 2 + 1
    }

    pub fn spectral_len(&self) -> usize {
        self.n * self.n * self.nh()
    }

    /// Unnormalized forward transform.
    pub fn forward(&self, data: &[f64]) -> Vec<Complex64> {
        let n = self.n;
        let nh = self.nh();
        assert_eq!(data.len(), n * n * n);
        let mut out = vec![Complex64::new(0.0, 0.0); n * n * nh];
        let mut row = vec![0.0; n];
        let mut scratch = self.r2c.make_scratch_vec();
        for (r, chunk) in data.chunks_exact(n).enumerate() {
            row.copy_from_slice(chunk);
            self.r2c
                .process_with_scratch(&mut row, &mut out[r * nh..(r + 1) * nh], &mut scratch)
                .expect("r2c lengths");
        }
        self.complex_passes(&mut out, &*self.fwd);
        out
    }

    /// Inverse transform including the `1/n^3` normalization.
    pub fn inverse(&self, spec: &[Complex64]) -> Vec<f64> {
        let n = self.n;
        let nh = self.nh();
        assert_eq!(spec.len(), n * n * nh);
        let mut buf = spec.to_vec();
        self.complex_passes(&mut buf, &*self.inv);
        let mut out = vec![0.0; n * n * n];
        let mut scratch = self.c2r.make_scratch_vec();
        let norm = 1.0 / (n * n * n) as f64;
        for (r, chunk) in buf.chunks_exact_mut(nh).enumerate() {
            let dst = &mut out[r * n..(r + 1) * n];
            // Roundoff leaves tiny imaginary parts on the kx = 0 and Nyquist
            // bins; realfft reports that but still produces the real output.
            let _ = self.c2r.process_with_scratch(chunk, dst, &mut scratch);
            for v in dst.iter_mut() {
                *v *= norm;
            }
        }
        out
    }

    /// y pass per z-plane, then z pass over the whole volume.
    fn complex_passes(&self, data: &mut [Complex64], fft: &dyn Fft<f64>) {
        let n = self.n;
        let nh = self.nh();
        let plane = n * nh;
        let mut tmp = vec![Complex64::new(0.0, 0.0); plane];
        let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        for z in 0..n {
            let p = &mut data[z * plane..(z + 1) * plane];
            transpose(p, n, nh, &mut tmp);
            fft.process_with_scratch(&mut tmp, &mut scratch);
            transpose(&tmp, nh, n, p);
        }
        let mut vol = vec![Complex64::new(0.0, 0.0); data.len()];
        transpose(data, n, plane, &mut vol);
        fft.process_with_scratch(&mut vol, &mut scratch);
        transpose(&vol, plane, n, data);
    }
}
