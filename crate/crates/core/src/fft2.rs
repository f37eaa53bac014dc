//! Thin wrappers around `rustfft` for 2-D and per-axis transforms.
//!
//! Conventions used throughout the crate:
//! - forward transform is unnormalized: `F[m] = sum_j f[j] exp(-2*pi*i*j*m/n)`;
//! - inverse transform carries the full `1/(rows*cols)` (or `1/len` per axis)
//!   normalization, so `inverse(forward(f)) == f` up to rounding.
//!
//! Rows are processed independently and may run on worker threads; each row is
//! summed in a fixed order, so results do not depend on the worker count.

use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use std::cell::RefCell;
use std::sync::Arc;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(len: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if forward {
            p.plan_fft_forward(len)
        } else {
            p.plan_fft_inverse(len)
        }
    })
}

fn process_rows(a: &mut Array2<Complex64>, forward: bool) {
    let cols = a.ncols();
    let slice = a.as_slice_mut().expect("contiguous row-major array");
    slice.par_chunks_mut(cols).for_each(|row| {
        plan(cols, forward).process(row);
    });
}

fn transpose_square(a: &mut Array2<Complex64>) {
    let n = a.nrows();
    debug_assert_eq!(n, a.ncols());
    for i in 0..n {
        for j in (i + 1)..n {
            let t = a[[i, j]];
            a[[i, j]] = a[[j, i]];
            a[[j, i]] = t;
        }
    }
}

/// In-place 2-D forward DFT of a square array.
pub fn fft2_forward(a: &mut Array2<Complex64>) {
    process_rows(a, true);
    transpose_square(a);
    process_rows(a, true);
    transpose_square(a);
}

/// In-place 2-D inverse DFT of a square array, normalized by `1/(n*n)`.
pub fn fft2_inverse(a: &mut Array2<Complex64>) {
    process_rows(a, false);
    transpose_square(a);
    process_rows(a, false);
    transpose_square(a);
    let scale = 1.0 / (a.len() as f64);
    a.mapv_inplace(|v| v * scale);
}

/// In-place 1-D DFT along the given ndarray axis (0 = rows move, 1 = columns move).
/// The inverse direction is normalized by `1/len`.
pub fn fft1_axis(a: &mut Array2<Complex64>, axis: usize, forward: bool) {
    match axis {
        1 => {
            process_rows(a, forward);
            if !forward {
                let scale = 1.0 / (a.ncols() as f64);
                a.mapv_inplace(|v| v * scale);
            }
        }
        0 => {
            transpose_square(a);
            fft1_axis(a, 1, forward);
            transpose_square(a);
        }
        _ => panic!("axis must be 0 or 1"),
    }
}

/// Zero-pad a square `n x n` array into the `[0..n, 0..n]` corner of a
/// `factor*n x factor*n` array (used for linear convolution by FFT).
pub fn pad_corner(a: &Array2<Complex64>, factor: usize) -> Array2<Complex64> {
    let n = a.nrows();
    let mut out = Array2::zeros((factor * n, factor * n));
    out.slice_mut(ndarray::s![0..n, 0..n]).assign(a);
    out
}

/// Extract the `[0..n, 0..n]` corner back out of a padded array.
pub fn unpad_corner(a: &Array2<Complex64>, n: usize) -> Array2<Complex64> {
    a.slice(ndarray::s![0..n, 0..n]).to_owned()
}
