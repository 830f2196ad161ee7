//! Gram machinery for the exponential family `{exp(i*lambda_n*t)}` on
//! `(0, T)`: the Hermitian Gram matrix, the weighted observability
//! constant of the boundary observation at `x = 0`, invisible-mode
//! construction at resonance, and gamma-sweep scans.
//!
//! The smallest eigenvalue of the weighted Gramian is the best constant
//! `c` in `int_0^T |d_x z(t,0)|^2 dt >= c * ||z0||^2_{1/4}` over the
//! truncated mode span; it collapses to zero exactly when two eigenvalues
//! coincide, which is the computable face of the controllability
//! dichotomy.

use crate::eigen;
use crate::error::{Error, Result};
use crate::hilbert::{CoeffState, ThetaWeight};
use crate::quad::exp_integral;
use crate::spectrum::{MediumParams, Mode, ResonanceInfo};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

/// Hermitian Gram matrix `G[n][m] = int_0^T exp(i*(lambda_m - lambda_n)*t) dt`
/// of an exponential family, with eigenvalue-range diagnostics.
#[derive(Clone, Debug)]
pub struct GramData {
    horizon: f64,
    lambdas: Vec<f64>,
    matrix: DMatrix<Complex64>,
    eig_min: f64,
    eig_max: f64,
}

impl GramData {
    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    pub fn smallest_eigenvalue(&self) -> f64 {
        self.eig_min
    }

    pub fn largest_eigenvalue(&self) -> f64 {
        self.eig_max
    }

    /// Ratio of extreme eigenvalues; infinite when the matrix is singular
    /// to working precision.
    pub fn cond_proxy(&self) -> f64 {
        if self.eig_min <= 0.0 {
            f64::INFINITY
        } else {
            self.eig_max / self.eig_min
        }
    }

    /// Reciprocal condition number in [0, 1]; zero when singular.
    pub fn rcond(&self) -> f64 {
        (self.eig_min.max(0.0)) / self.eig_max.max(f64::MIN_POSITIVE)
    }

    /// Real quadratic form `v^H G v` (the L2(0,T) norm squared of the
    /// exponential sum with amplitudes `v`).
    pub fn quadratic_form(&self, v: &[Complex64]) -> Result<f64> {
        if v.len() != self.len() {
            return Err(Error::DimensionMismatch {
                left: v.len(),
                right: self.len(),
            });
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (n, vn) in v.iter().enumerate() {
            for (m, vm) in v.iter().enumerate() {
                acc += vn.conj() * self.matrix[(n, m)] * vm;
            }
        }
        Ok(acc.re)
    }
}

/// Builds the Gram matrix of `{exp(i*lambda_n*t)}` on `(0, horizon)` in
/// closed form. Entries with `lambda_m == lambda_n` are exactly `horizon`,
/// and Hermitian symmetry holds exactly by construction.
pub fn gram_matrix(lambdas: &[f64], horizon: f64) -> GramData {
    assert!(horizon > 0.0, "horizon must be positive");
    let n = lambdas.len();
    let mut matrix = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for row in 0..n {
        matrix[(row, row)] = Complex64::new(horizon, 0.0);
        for col in (row + 1)..n {
            let entry = exp_integral(lambdas[col] - lambdas[row], horizon);
            matrix[(row, col)] = entry;
            matrix[(col, row)] = entry.conj();
        }
    }
    let (eig_min, eig_max) = if n == 0 {
        (0.0, 0.0)
    } else {
        let ev = eigen::hermitian_eigenvalues(&matrix);
        (ev[0], ev[n - 1])
    };
    GramData {
        horizon,
        lambdas: lambdas.to_vec(),
        matrix,
        eig_min,
        eig_max,
    }
}

/// Boundary-weighted Gramian `Ghat[n][m] = trace0_n * trace0_m * G[n][m]`:
/// the quadratic form `c^H Ghat c` equals
/// `int_0^T |d_x z(t,0)|^2 dt` for the free solution with coefficients `c`.
pub fn boundary_gram(modes: &[Mode], horizon: f64) -> DMatrix<Complex64> {
    let lambdas: Vec<f64> = modes.iter().map(|m| m.lambda).collect();
    let gram = gram_matrix(&lambdas, horizon);
    let n = modes.len();
    DMatrix::from_fn(n, n, |r, c| {
        gram.matrix[(r, c)] * (modes[r].trace0 * modes[c].trace0)
    })
}

/// The boundary Gramian scaled to the H^1_0 grading:
/// `W = D^{-1/2} Ghat D^{-1/2}` with `D = diag(|lambda_n|^{1/2})`
/// (zero-mode weight substituted by 1).
pub fn weighted_observability_matrix(modes: &[Mode], horizon: f64) -> DMatrix<Complex64> {
    let ghat = boundary_gram(modes, horizon);
    let w = ThetaWeight::new(modes, 0.25);
    let scale: Vec<f64> = w.weights().iter().map(|&o| 1.0 / o.sqrt()).collect();
    let n = modes.len();
    DMatrix::from_fn(n, n, |r, c| ghat[(r, c)] * (scale[r] * scale[c]))
}

/// Best constant in the truncated observability inequality
/// `int_0^T |d_x z(t,0)|^2 dt >= c * ||z0||^2_{1/4}` over modes
/// `1..=n_modes`: the smallest eigenvalue of the weighted Gramian.
/// Nonnegative up to roundoff; collapses below 1e-10 exactly at resonance.
pub fn observability_constant(params: &MediumParams, n_modes: usize, horizon: f64) -> f64 {
    let modes = params.enumerate_modes(n_modes, crate::spectrum::DEFAULT_INT_TOL);
    let w = weighted_observability_matrix(&modes, horizon);
    eigen::hermitian_eigenvalues(&w)[0]
}

/// The normalized two-mode combination over a resonant pair `(p, q)` whose
/// boundary derivative trace vanishes identically: coefficients
/// `(q, -p) / sqrt(p^2 + q^2)` on modes `p` and `q`. It is invisible to
/// the observation and therefore uncontrollable.
pub fn invisible_mode(params: &MediumParams, pair: (usize, usize)) -> Result<CoeffState> {
    let info = params.resonance_check(crate::spectrum::DEFAULT_INT_TOL);
    if !info.pairs.contains(&pair) {
        return Err(Error::NotResonantPair {
            p: pair.0,
            q: pair.1,
            gamma: params.gamma(),
        });
    }
    let (p, q) = pair;
    let scale = 1.0 / ((p * p + q * q) as f64).sqrt();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); q];
    coeffs[p - 1] = Complex64::new(q as f64 * scale, 0.0);
    coeffs[q - 1] = Complex64::new(-(p as f64) * scale, 0.0);
    Ok(CoeffState::from_coefficients(*params, q, &coeffs)?
        .with_meta(format!("invisible mode over pair ({p}, {q})")))
}

/// One row of a gamma sweep.
#[derive(Clone, Debug)]
pub struct ScanRow {
    pub gamma: f64,
    pub constant: f64,
    pub resonance: ResonanceInfo,
}

/// Observability constants over a grid of gamma values (rows are
/// independent and computed in parallel; output order follows the input).
pub fn resonance_scan(
    gammas: &[f64],
    ell: f64,
    n_modes: usize,
    horizon: f64,
    int_tol: f64,
) -> Result<Vec<ScanRow>> {
    gammas
        .par_iter()
        .map(|&gamma| {
            let params = MediumParams::new(gamma, ell)?;
            Ok(ScanRow {
                gamma,
                constant: observability_constant(&params, n_modes, horizon),
                resonance: params.resonance_check(int_tol),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::simpson;
    use crate::spectrum::DEFAULT_INT_TOL;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn params(gamma: f64) -> MediumParams {
        MediumParams::new(gamma, PI).unwrap()
    }

    #[test]
    fn gram_scalar_and_resonant_block() {
        let g = gram_matrix(&[7.0], 2.5);
        assert_eq!(g.matrix()[(0, 0)], Complex64::new(2.5, 0.0));

        // Identical exponentials: rank-1 block of T's.
        let g = gram_matrix(&[-4.0, -4.0], 1.0);
        for r in 0..2 {
            for c in 0..2 {
                assert_eq!(g.matrix()[(r, c)], Complex64::new(1.0, 0.0));
            }
        }
        assert!(g.smallest_eigenvalue().abs() < 1e-14);
        assert_relative_eq!(g.largest_eigenvalue(), 2.0, max_relative = 1e-12);
        assert!(g.cond_proxy().is_infinite());
    }

    #[test]
    fn gram_off_diagonal_closed_form() {
        let g = gram_matrix(&[-2.0, 4.0], 1.0);
        let entry = g.matrix()[(0, 1)];
        assert_relative_eq!(entry.norm(), (3.0f64).sin().abs() / 3.0, max_relative = 1e-13);
        let direct = (Complex64::new(0.0, 6.0).exp() - 1.0) / Complex64::new(0.0, 6.0);
        assert_abs_diff_eq!(entry.re, direct.re, epsilon = 1e-14);
        assert_abs_diff_eq!(entry.im, direct.im, epsilon = 1e-14);
        // Hermitian exactly by construction
        assert_eq!(g.matrix()[(1, 0)], entry.conj());
        // distinct frequencies: strictly positive definite
        assert!(g.smallest_eigenvalue() > 0.0);
        assert!(g.cond_proxy().is_finite());
    }

    #[test]
    fn observability_dichotomy() {
        // Resonant: the invisible combination kills the constant.
        let resonant = observability_constant(&params(-5.0), 8, 1.0);
        assert!(resonant.abs() <= 1e-10, "constant = {resonant:.3e}");
        // Non-resonant: strictly positive and stable across both
        // eigenvalue methods.
        let p3 = params(-3.0);
        let clear = observability_constant(&p3, 16, 1.0);
        assert!(clear > 1e-6, "constant = {clear:.3e}");
        let w = weighted_observability_matrix(&p3.enumerate_modes(16, DEFAULT_INT_TOL), 1.0);
        let qr = eigen::hermitian_eigenvalues(&w);
        let bi = eigen::hermitian_eigenvalues_bisect(&w);
        let scale = qr.last().unwrap().abs();
        assert!((qr[0] - bi[0]).abs() <= 1e-8 * scale.max(1.0));
        assert_relative_eq!(clear, qr[0], max_relative = 1e-12);
    }

    #[test]
    fn scalar_observability_constant_formula() {
        let p = params(-3.0);
        let got = observability_constant(&p, 1, 1.0);
        // T * trace0_1^2 / |lambda_1|^{1/2}
        let want = 1.0 * p.trace0(1).powi(2) / 2.0f64.sqrt();
        assert_relative_eq!(got, want, max_relative = 1e-12);
    }

    #[test]
    fn invisible_mode_has_silent_trace() {
        let p = params(-5.0);
        let state = invisible_mode(&p, (1, 2)).unwrap();
        let c1 = state.coefficient_for(1);
        let c2 = state.coefficient_for(2);
        assert_relative_eq!(c1.re / c2.re, -2.0, max_relative = 1e-14);
        assert_relative_eq!(state.l2_norm(), 1.0, max_relative = 1e-14);
        let times: Vec<f64> = (0..1000).map(|j| j as f64 * 1e-3).collect();
        assert!(state.boundary_trace(&times).max_abs() <= 1e-12);

        let p25 = params(-25.0);
        let state = invisible_mode(&p25, (3, 4)).unwrap();
        assert_relative_eq!(state.coefficient_for(3).re, 4.0 / 5.0, max_relative = 1e-14);
        assert_relative_eq!(state.coefficient_for(4).re, -3.0 / 5.0, max_relative = 1e-14);
        let times: Vec<f64> = (0..500).map(|j| j as f64 * 2e-3).collect();
        assert!(state.boundary_trace(&times).max_abs() <= 1e-12);

        assert!(matches!(
            invisible_mode(&params(-3.0), (1, 2)),
            Err(Error::NotResonantPair { .. })
        ));
    }

    #[test]
    fn quadrature_matches_quadratic_form() {
        // int_0^T |d_x z(t,0)|^2 dt computed two ways: Simpson in time
        // versus the boundary Gram quadratic form.
        let p = params(-3.0);
        let n_modes = 6;
        let horizon = 1.0;
        let modes = p.enumerate_modes(n_modes, DEFAULT_INT_TOL);
        let ghat = boundary_gram(&modes, horizon);
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let points = 1 << 17;
        let times: Vec<f64> = (0..=points)
            .map(|j| j as f64 * horizon / points as f64)
            .collect();
        for _ in 0..10 {
            let coeffs: Vec<Complex64> = (0..n_modes)
                .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            let state = CoeffState::from_coefficients(p, n_modes, &coeffs).unwrap();
            let trace = state.boundary_trace(&times);
            let samples: Vec<Complex64> = trace
                .values()
                .iter()
                .map(|v| Complex64::new(v.norm_sqr(), 0.0))
                .collect();
            let by_time = simpson(&samples, horizon / points as f64).re;
            let mut form = Complex64::new(0.0, 0.0);
            for (r, cr) in state.coeffs().iter().enumerate() {
                for (c, cc) in state.coeffs().iter().enumerate() {
                    form += cr.conj() * ghat[(r, c)] * cc;
                }
            }
            assert_relative_eq!(by_time, form.re, max_relative = 1e-8);
        }
    }

    #[test]
    fn two_sided_bound_holds_for_random_states() {
        let p = params(-3.0);
        let n_modes = 8;
        let horizon = 1.0;
        let modes = p.enumerate_modes(n_modes, DEFAULT_INT_TOL);
        let ghat = boundary_gram(&modes, horizon);
        let w = weighted_observability_matrix(&modes, horizon);
        let ev = eigen::hermitian_eigenvalues(&w);
        let (c_t, big_c_t) = (ev[0], ev[n_modes - 1]);
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..100 {
            let coeffs: Vec<Complex64> = (0..n_modes)
                .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            let state = CoeffState::from_coefficients(p, n_modes, &coeffs).unwrap();
            let mut observed = Complex64::new(0.0, 0.0);
            for (r, cr) in state.coeffs().iter().enumerate() {
                for (c, cc) in state.coeffs().iter().enumerate() {
                    observed += cr.conj() * ghat[(r, c)] * cc;
                }
            }
            let graded = state.norm(0.25).powi(2);
            assert!(observed.re >= c_t * graded - 1e-8 * graded.max(1.0));
            assert!(observed.re <= big_c_t * graded + 1e-8 * graded.max(1.0));
        }
    }

    #[test]
    fn constant_is_monotone_in_horizon() {
        let p = params(-3.0);
        let c_half = observability_constant(&p, 8, 0.5);
        let c_one = observability_constant(&p, 8, 1.0);
        let c_two = observability_constant(&p, 8, 2.0);
        assert!(c_half <= c_one + 1e-12);
        assert!(c_one <= c_two + 1e-12);
        assert!(c_half > 0.0);
    }

    #[test]
    fn scan_dips_at_critical_points_only() {
        let gammas: Vec<f64> = (0..=40).map(|i| -6.0 + 2.0 * i as f64 / 40.0).collect();
        let rows = resonance_scan(&gammas, PI, 8, 1.0, DEFAULT_INT_TOL).unwrap();
        assert_eq!(rows.len(), gammas.len());
        for row in &rows {
            if (row.gamma + 5.0).abs() < 1e-12 {
                assert!(row.resonance.resonant);
                assert!(row.constant <= 1e-10);
            } else {
                assert!(!row.resonance.resonant, "gamma = {}", row.gamma);
                assert!(row.constant > 1e-8, "gamma = {}", row.gamma);
            }
        }

        // No critical point hides inside (-2.6, -2.5).
        let gammas: Vec<f64> = (0..=20).map(|i| -2.6 + 0.1 * i as f64 / 20.0).collect();
        let rows = resonance_scan(&gammas, PI, 8, 1.0, DEFAULT_INT_TOL).unwrap();
        assert!(rows.iter().all(|r| !r.resonance.resonant && r.constant > 1e-8));

        // Single-point grid, and invalid gamma propagates.
        assert_eq!(resonance_scan(&[-3.0], PI, 4, 1.0, DEFAULT_INT_TOL).unwrap().len(), 1);
        assert!(resonance_scan(&[1.0], PI, 4, 1.0, DEFAULT_INT_TOL).is_err());
    }

    #[test]
    fn invisible_mode_works_off_the_unit_interval_scale() {
        // Same s = 5 resonance realized on ell = 2; the silent combination
        // must survive the rescaling of traces and eigenvalues.
        let ell = 2.0;
        let gamma = -5.0 * (PI / ell).powi(2);
        let p = MediumParams::new(gamma, ell).unwrap();
        let state = invisible_mode(&p, (1, 2)).unwrap();
        let times: Vec<f64> = (0..400).map(|j| j as f64 * 5e-3).collect();
        assert!(state.boundary_trace(&times).max_abs() <= 1e-12);
        let constant = observability_constant(&p, 6, 1.0);
        assert!(constant.abs() <= 1e-10);
    }

    #[test]
    fn quadratic_form_matches_matrix_action() {
        let g = gram_matrix(&[-2.0, 4.0, 54.0], 1.0);
        let v = vec![
            Complex64::new(1.0, 0.5),
            Complex64::new(-0.3, 0.2),
            Complex64::new(0.0, -1.0),
        ];
        let direct = g.quadratic_form(&v).unwrap();
        // compare with naive loop over the matrix
        let mut acc = Complex64::new(0.0, 0.0);
        for r in 0..3 {
            for c in 0..3 {
                acc += v[r].conj() * g.matrix()[(r, c)] * v[c];
            }
        }
        assert_relative_eq!(direct, acc.re, max_relative = 1e-14);
        assert!(direct > 0.0);
        assert!(g.quadratic_form(&v[..2]).is_err());
    }
}
