//! Thread-local FFT plans. Transforms are unnormalized.

use std::cell::RefCell;

use num_complex::Complex64;
use rustfft::FftPlanner;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

pub(crate) fn forward(buf: &mut [Complex64]) {
    let fft = PLANNER.with(|p| p.borrow_mut().plan_fft_forward(buf.len()));
    fft.process(buf);
}

pub(crate) fn inverse(buf: &mut [Complex64]) {
    let fft = PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(buf.len()));
    fft.process(buf);
}
