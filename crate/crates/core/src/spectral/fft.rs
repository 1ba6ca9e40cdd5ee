use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

thread_local! {
    static PLANS: RefCell<HashMap<(usize, bool), Arc<dyn Fft<f64>>>> = RefCell::new(HashMap::new());
}

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANS.with(|p| {
        p.borrow_mut()
            .entry((n, inverse))
            .or_insert_with(|| {
                let mut planner = FftPlanner::new();
                if inverse {
                    planner.plan_fft_inverse(n)
                } else {
                    planner.plan_fft_forward(n)
                }
            })
            .clone()
    })
}

fn rows(data: &mut [Complex64], n: usize, inverse: bool) {
    // Small transforms are not worth the thread hand-off.
    if n >= 128 {
        data.par_chunks_mut(n)
            .for_each(|row| plan(n, inverse).process(row));
    } else {
        let fft = plan(n, inverse);
        for row in data.chunks_mut(n) {
            fft.process(row);
        }
    }
}

fn transpose(data: &mut [Complex64], n: usize) {
    const B: usize = 32;
    for bi in (0..n).step_by(B) {
        for bj in (bi..n).step_by(B) {
            for i in bi..(bi + B).min(n) {
                let start = if bi == bj { i + 1 } else { bj };
                for j in start..(bj + B).min(n) {
                    data.swap(i * n + j, j * n + i);
                }
            }
        }
    }
}

fn transform(data: &mut [Complex64], n: usize, inverse: bool) {
    assert_eq!(data.len(), n * n, "expected an n x n array");
    rows(data, n, inverse);
    transpose(data, n);
    rows(data, n, inverse);
    transpose(data, n);
}

/// Unnormalised forward 2D DFT of a row-major `n × n` array, in place.
pub fn fft2(data: &mut [Complex64], n: usize) {
    transform(data, n, false);
}

/// Unnormalised inverse 2D DFT of a row-major `n × n` array, in place.
pub fn ifft2(data: &mut [Complex64], n: usize) {
    transform(data, n, true);
}
