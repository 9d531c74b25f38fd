use std::f64::consts::PI;

use swehdg_core::diagnostics::linear_fit_slope;
use swehdg_core::integrators::{DenseSystem, IntegratorRegistry};

/// `(max |H - H0| / H0, fitted slope / H0)` over `periods` periods.
fn energy_error(steps_per_period: usize, periods: usize) -> (f64, f64) {
    let sys = DenseSystem::harmonic_oscillator(1.0, 1.0);
    let integ = IntegratorRegistry::with_defaults().get("seprk4").unwrap();
    let dt = 2.0 * PI / steps_per_period as f64;
    let mut y = vec![1.0, 0.0];
    let h = |y: &[f64]| 0.5 * (y[0] * y[0] + y[1] * y[1]);
    let h0 = h(&y);
    let mut hs = Vec::with_capacity(steps_per_period * periods + 1);
    hs.push(h0);
    for _ in 0..steps_per_period * periods {
        integ.step(&sys, dt, &mut y).unwrap();
        hs.push(h(&y));
    }
    let dev = hs.iter().map(|v| (v - h0).abs()).fold(0.0, f64::max) / h0;
    (dev, linear_fit_slope(&hs) / h0)
}

#[test]
fn seprk4_energy_is_bounded_over_many_periods() {
    let (coarse, slope) = energy_error(20, 10_000);
    let (fine, _) = energy_error(40, 1_000);
    assert!(slope.abs() <= 1e-12, "slope {slope:e}");
    let rate = (coarse / fine).log2();
    assert!((rate - 4.0).abs() < 0.3, "energy error ratio 2^{rate}");
}
