//! Small numerical-integration kernels shared across the crate:
//! the closed-form exponential integral that fills Gram matrices and
//! Duhamel terms, composite Simpson on uniform complex samples, and
//! panelled Gauss-Legendre for sampled integrands.

use num_complex::Complex64;

/// Closed form of `int_0^T exp(i*delta*t) dt`.
///
/// Written as `exp(i*delta*T/2) * 2*sin(delta*T/2)/delta`, which is exact
/// and free of cancellation for small `delta`; `delta == 0` returns `T`.
pub fn exp_integral(delta: f64, horizon: f64) -> Complex64 {
    if delta == 0.0 {
        return Complex64::new(horizon, 0.0);
    }
    let half = 0.5 * delta * horizon;
    Complex64::from_polar(1.0, half) * (2.0 * half.sin() / delta)
}

/// Composite Simpson rule on uniformly spaced complex samples with step `h`.
///
/// An odd interval count is handled by closing with the 3/8 rule on the
/// last three intervals, so any sample count >= 4 integrates at fourth order.
pub fn simpson(values: &[Complex64], h: f64) -> Complex64 {
    let m = values.len();
    assert!(m >= 2, "simpson needs at least two samples");
    let intervals = m - 1;
    if intervals == 1 {
        // trapezoid fallback, only reachable for degenerate two-point input
        return (values[0] + values[1]) * (0.5 * h);
    }
    if intervals.is_multiple_of(2) {
        simpson_even(values, h)
    } else if intervals == 3 {
        simpson38(values, h)
    } else {
        simpson_even(&values[..m - 3], h) + simpson38(&values[m - 4..], h)
    }
}

fn simpson_even(values: &[Complex64], h: f64) -> Complex64 {
    let m = values.len();
    debug_assert!(m >= 3 && (m - 1).is_multiple_of(2));
    let mut acc = values[0] + values[m - 1];
    for (j, &v) in values.iter().enumerate().take(m - 1).skip(1) {
        acc += v * if j % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * (h / 3.0)
}

fn simpson38(values: &[Complex64], h: f64) -> Complex64 {
    debug_assert_eq!(values.len(), 4);
    (values[0] + values[1] * 3.0 + values[2] * 3.0 + values[3]) * (3.0 * h / 8.0)
}

/// Abscissas of the 8-point Gauss-Legendre rule on [-1, 1] (positive half).
const GL8_NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];

/// Weights matching [`GL8_NODES`].
const GL8_WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// Panelled 8-point Gauss-Legendre integration of `f` over `[0, horizon]`.
pub fn gauss_legendre_panels<F>(f: F, horizon: f64, panels: usize) -> Complex64
where
    F: Fn(f64) -> Complex64,
{
    assert!(panels >= 1, "need at least one panel");
    let width = horizon / panels as f64;
    let half = 0.5 * width;
    let mut acc = Complex64::new(0.0, 0.0);
    for p in 0..panels {
        let center = (p as f64 + 0.5) * width;
        for (node, weight) in GL8_NODES.iter().zip(GL8_WEIGHTS.iter()) {
            let dx = half * node;
            acc += (f(center + dx) + f(center - dx)) * *weight;
        }
    }
    acc * half
}
