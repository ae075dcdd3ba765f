//! Unitary DFT (scaled by 1/sqrt(n) per axis), applied separably.

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use super::nd::for_each_line;

pub(crate) fn dft_nd(data: &mut [Complex64], dims: &[usize], axes: &[usize], inverse: bool) {
    let mut planner = FftPlanner::new();
    for &axis in axes {
        let n = dims[axis];
        if n == 1 {
            continue;
        }
        let fft = if inverse {
            planner.plan_fft_inverse(n)
        } else {
            planner.plan_fft_forward(n)
        };
        let scale = 1.0 / (n as f64).sqrt();
        let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
        for_each_line(data, dims, dims, axis, |line| {
            fft.process_with_scratch(line, &mut scratch);
            for v in line.iter_mut() {
                *v *= scale;
            }
        });
    }
}
