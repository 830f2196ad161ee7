//! Closed-form spectral analysis of the hinged operator
//! `phi'''' - gamma * phi''` on `(0, ell)` with `gamma < 0`:
//! eigenvalues, boundary traces of the normalized eigenfunctions,
//! resonance detection, and gap/density diagnostics.
//!
//! The eigenfunctions are `Phi_n(x) = sqrt(2/ell) * sin(n*pi*x/ell)` with
//! eigenvalues `lambda_n = k^2 (k^2 + gamma)`, `k = n*pi/ell`. A double
//! eigenvalue appears exactly when `-gamma * (ell/pi)^2 = p^2 + q^2` for
//! integers `1 <= p < q`; those pairs make the boundary observation at
//! `x = 0` blind to one combination of the two modes.

use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Default relative tolerance for declaring `s = -gamma*(ell/pi)^2` integral.
///
/// `gamma` is a user-supplied float, so exact resonance is a measure-zero
/// event; near-resonance within this tolerance is surfaced explicitly.
pub const DEFAULT_INT_TOL: f64 = 1e-9;

/// Below this relative deviation a detected resonance is reported as exact;
/// between this and the declared `int_tol` it is merely ill-conditioned.
pub const EXACT_RESONANCE_TOL: f64 = 1e-12;

/// Relative threshold of the scale-aware zero-eigenvalue test.
pub const ZERO_EIGENVALUE_TOL: f64 = 1e-9;

/// Sign classification of an eigenvalue.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModeKind {
    Positive,
    Zero,
    Negative,
}

impl ModeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModeKind::Positive => "positive",
            ModeKind::Zero => "zero",
            ModeKind::Negative => "negative",
        }
    }
}

/// One spectral line of the hinged operator.
#[derive(Clone, Debug, PartialEq)]
pub struct Mode {
    /// 1-based sine index.
    pub n: usize,
    /// Wavenumber `k = n*pi/ell`.
    pub wavenumber: f64,
    /// Eigenvalue `k^2 (k^2 + gamma)`.
    pub lambda: f64,
    /// Left boundary trace `Phi_n'(0) = sqrt(2/ell) * k`, always positive.
    pub trace0: f64,
    /// Sign of the eigenvalue under the scale-aware zero test.
    pub kind: ModeKind,
    /// Index of the degenerate partner mode when `lambda_n = lambda_q`.
    pub partner: Option<usize>,
}

/// Outcome of scanning `s = -gamma*(ell/pi)^2` for integer representations.
#[derive(Clone, Debug, PartialEq)]
pub struct ResonanceInfo {
    /// True iff at least one pair `p < q` with `p^2 + q^2 = s` was found.
    pub resonant: bool,
    /// All pairs `(p, q)`, `p < q`, with `|p^2 + q^2 - s| <= tol`.
    pub pairs: Vec<(usize, usize)>,
    /// `p` with `p^2 = s`, i.e. the index carrying the zero eigenvalue.
    pub zero_mode: Option<usize>,
    /// The scanned value `s = -gamma*(ell/pi)^2` itself.
    pub s_value: f64,
}

impl ResonanceInfo {
    /// Largest relative deviation `|p^2 + q^2 - s| / max(1, s)` over the
    /// detected pairs; `None` when not resonant.
    pub fn worst_pair_deviation(&self) -> Option<f64> {
        let scale = self.s_value.max(1.0);
        self.pairs
            .iter()
            .map(|&(p, q)| ((p * p + q * q) as f64 - self.s_value).abs() / scale)
            .fold(None, |acc: Option<f64>, d| Some(acc.map_or(d, |a| a.max(d))))
    }

    /// True when every detected pair satisfies the integer equation to
    /// within [`EXACT_RESONANCE_TOL`]; ill-conditioned otherwise.
    pub fn is_exact(&self) -> bool {
        self.worst_pair_deviation()
            .map(|d| d <= EXACT_RESONANCE_TOL)
            .unwrap_or(false)
    }
}

/// Physical configuration: dispersion coefficient `gamma < 0`, interval
/// length `ell > 0`, and the derived threshold index `n0` past which all
/// eigenvalues are positive and strictly increasing.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MediumParams {
    gamma: f64,
    ell: f64,
    n0: usize,
}

impl MediumParams {
    /// Validates and derives `n0 = floor(ell*sqrt(|gamma|)/pi) + 1`.
    pub fn new(gamma: f64, ell: f64) -> Result<Self> {
        if !ell.is_finite() || ell <= 0.0 {
            return Err(Error::NonPositiveLength(ell));
        }
        if !gamma.is_finite() || gamma >= 0.0 {
            return Err(Error::NonNegativeGamma(gamma));
        }
        let n0 = (ell * (-gamma).sqrt() / PI).floor() as usize + 1;
        Ok(Self { gamma, ell, n0 })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn ell(&self) -> f64 {
        self.ell
    }

    pub fn n0(&self) -> usize {
        self.n0
    }

    /// Lower bound `-gamma^2/4` of the spectrum.
    pub fn spectral_floor(&self) -> f64 {
        -0.25 * self.gamma * self.gamma
    }

    /// `s = -gamma*(ell/pi)^2`; resonances are the integer values of `s`
    /// expressible as `p^2 + q^2` with `1 <= p < q`.
    pub fn resonance_s(&self) -> f64 {
        -self.gamma * (self.ell / PI).powi(2)
    }

    /// Wavenumber `k = n * (pi/ell)` of the n-th sine.
    pub fn wavenumber(&self, n: usize) -> f64 {
        n as f64 * (PI / self.ell)
    }

    /// Closed-form eigenvalue `k^2 (k^2 + gamma)` for any `n >= 1`.
    ///
    /// Increasing in `n` only from `n0` on; `enumerate_modes` handles
    /// ordering below the threshold.
    pub fn eigenvalue(&self, n: usize) -> f64 {
        assert!(n >= 1, "mode indices are 1-based");
        let k2 = self.wavenumber(n).powi(2);
        k2 * (k2 + self.gamma)
    }

    /// Left boundary trace `Phi_n'(0) = sqrt(2/ell) * k` of the
    /// L2-normalized eigenfunction; never vanishes.
    pub fn trace0(&self, n: usize) -> f64 {
        (2.0 / self.ell).sqrt() * self.wavenumber(n)
    }

    /// Value of the L2-normalized eigenfunction `Phi_n` at `x`.
    ///
    /// Both endpoints evaluate to exactly zero.
    pub fn eigenfunction(&self, n: usize, x: f64) -> f64 {
        if x == 0.0 || x == self.ell {
            return 0.0;
        }
        (2.0 / self.ell).sqrt() * (self.wavenumber(n) * x).sin()
    }

    /// Scale-aware zero test: `|lambda| <= tol * max(1, gamma^2/4)`.
    pub fn classify(&self, lambda: f64) -> ModeKind {
        let scale = (0.25 * self.gamma * self.gamma).max(1.0);
        if lambda.abs() <= ZERO_EIGENVALUE_TOL * scale {
            ModeKind::Zero
        } else if lambda > 0.0 {
            ModeKind::Positive
        } else {
            ModeKind::Negative
        }
    }

    /// Enumerates all integer pairs `p < q <= ceil(sqrt(s))` with
    /// `|p^2 + q^2 - s| <= int_tol * max(1, s)`, plus the zero-mode index
    /// `p` with `p^2 = s` under the same tolerance.
    pub fn resonance_check(&self, int_tol: f64) -> ResonanceInfo {
        assert!(int_tol >= 0.0, "int_tol must be nonnegative");
        let s = self.resonance_s();
        let tol = int_tol * s.max(1.0);
        let q_max = s.sqrt().ceil() as usize;
        let mut pairs = Vec::new();
        for q in 2..=q_max {
            for p in 1..q {
                if ((p * p + q * q) as f64 - s).abs() <= tol {
                    pairs.push((p, q));
                }
            }
        }
        let zero_mode = (1..=q_max.max(1)).find(|&p| ((p * p) as f64 - s).abs() <= tol);
        ResonanceInfo {
            resonant: !pairs.is_empty(),
            pairs,
            zero_mode,
            s_value: s,
        }
    }

    /// Modes `n = 1..=n_modes`, sorted by eigenvalue ascending (index as
    /// tie-break), with partner links filled from [`Self::resonance_check`].
    pub fn enumerate_modes(&self, n_modes: usize, int_tol: f64) -> Vec<Mode> {
        assert!(n_modes >= 1, "need at least one mode");
        let resonance = self.resonance_check(int_tol);
        let mut modes: Vec<Mode> = (1..=n_modes)
            .map(|n| {
                let lambda = self.eigenvalue(n);
                let partner = resonance.pairs.iter().find_map(|&(p, q)| {
                    if p == n {
                        Some(q)
                    } else if q == n {
                        Some(p)
                    } else {
                        None
                    }
                });
                Mode {
                    n,
                    wavenumber: self.wavenumber(n),
                    lambda,
                    trace0: self.trace0(n),
                    kind: self.classify(lambda),
                    partner,
                }
            })
            .collect();
        modes.sort_by(|a, b| {
            a.lambda
                .partial_cmp(&b.lambda)
                .expect("eigenvalues are finite")
                .then(a.n.cmp(&b.n))
        });
        modes
    }

    /// Residual of the characteristic equation at `lambda`:
    /// `sin(ell*eta)` for positive `lambda`, the product
    /// `sin(ell*xi) * sin(ell*xibar)` on the negative range, and
    /// `sin(ell*sqrt(|gamma|))` at `lambda = 0` (where the `xibar` factor
    /// degenerates identically). Zeros coincide with the spectrum.
    pub fn characteristic_residual(&self, lambda: f64) -> Result<f64> {
        let floor = self.spectral_floor();
        if lambda < floor {
            return Err(Error::LambdaBelowSpectralFloor { lambda, floor });
        }
        let root = (self.gamma * self.gamma + 4.0 * lambda).max(0.0).sqrt();
        if lambda > 0.0 {
            let eta = (0.5 * (root - self.gamma)).sqrt();
            Ok((self.ell * eta).sin())
        } else if lambda == 0.0 {
            Ok((self.ell * (-self.gamma).sqrt()).sin())
        } else {
            let xi = (0.5 * (root - self.gamma)).max(0.0).sqrt();
            let xibar = (0.5 * (-root - self.gamma)).max(0.0).sqrt();
            Ok((self.ell * xi).sin() * (self.ell * xibar).sin())
        }
    }

    /// First `count` spectrum points located by bisection on the two
    /// monotone branches of the characteristic equation, never touching
    /// the closed form. Returned sorted ascending, resonant values twice.
    ///
    /// The increasing branch `theta1 = sqrt((sqrt(gamma^2+4l)-gamma)/2)`
    /// covers `lambda >= floor`; the decreasing branch
    /// `theta2 = sqrt((-sqrt(gamma^2+4l)-gamma)/2)` covers
    /// `floor <= lambda < 0`. Each integer phase `m*pi/ell` crossed by a
    /// branch contributes one root.
    pub fn characteristic_roots(&self, count: usize) -> Vec<f64> {
        let floor = self.spectral_floor();
        let theta_floor = (0.5 * -self.gamma).sqrt();
        let theta1 = |lambda: f64| {
            let root = (self.gamma * self.gamma + 4.0 * lambda).max(0.0).sqrt();
            (0.5 * (root - self.gamma)).sqrt()
        };
        let theta2 = |lambda: f64| {
            let root = (self.gamma * self.gamma + 4.0 * lambda).max(0.0).sqrt();
            (0.5 * (-root - self.gamma)).max(0.0).sqrt()
        };

        let mut roots = Vec::with_capacity(count);
        for m in 1..=count {
            let target = m as f64 * PI / self.ell;
            if (target - theta_floor).abs() <= 1e-13 * theta_floor.max(1.0) {
                // Both branches meet here; single (simple) root at the floor.
                roots.push(floor);
            } else if target < theta_floor {
                // theta2 decreases from theta_floor to 0 across [floor, 0].
                roots.push(bisect_monotone(floor, 0.0, |l| target - theta2(l)));
            } else {
                // theta1 increases without bound; double out an upper bracket.
                let mut hi = floor.abs().max(1.0);
                while theta1(hi) < target {
                    hi *= 2.0;
                }
                roots.push(bisect_monotone(floor, hi, |l| theta1(l) - target));
            }
        }
        roots.sort_by(|a, b| a.partial_cmp(b).expect("finite roots"));
        roots
    }

    /// Smallest gap `lambda_{n+1} - lambda_n` over `n0 <= n < n_max`;
    /// strictly positive on that range.
    pub fn spectral_gap_floor(&self, n_max: usize) -> f64 {
        assert!(
            n_max > self.n0,
            "need n_max > n0 = {} to form at least one gap",
            self.n0
        );
        (self.n0..n_max)
            .map(|n| self.eigenvalue(n + 1) - self.eigenvalue(n))
            .fold(f64::INFINITY, f64::min)
    }

    /// Normalized trace ratio `|Phi_n'(0)| / lambda_n^{1/4}`, which tends
    /// to `sqrt(2/ell)`; defined for positive eigenvalues only.
    pub fn trace_ratio(&self, n: usize) -> Result<f64> {
        let lambda = self.eigenvalue(n);
        if lambda <= 0.0 {
            return Err(Error::NonPositiveEigenvalue { n, lambda });
        }
        Ok(self.trace0(n) / lambda.powf(0.25))
    }

    /// Sliding-window estimate of the upper density of the eigenvalue
    /// sequence: the maximum of `count / r` over windows `[a, a+r]`
    /// contained in `[lambda_1, lambda_N]`.
    pub fn upper_density_estimate(&self, r: f64, n_modes: usize) -> Result<f64> {
        assert!(r > 0.0, "window length must be positive");
        let mut lambdas: Vec<f64> = (1..=n_modes).map(|n| self.eigenvalue(n)).collect();
        lambdas.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
        let lo = lambdas[0];
        let hi = lambdas[n_modes - 1];
        if hi - lo <= r {
            return Err(Error::InsufficientModes { r, span: hi - lo });
        }
        let count_in = |a: f64| {
            let b = a + r;
            lambdas.iter().filter(|&&l| l >= a && l <= b).count()
        };
        // The count as a function of the anchor only jumps at eigenvalues
        // (window start) and at eigenvalue - r (window end), so those are
        // the only candidates.
        let mut best = 0usize;
        for &l in &lambdas {
            for a in [l, l - r] {
                let a = a.clamp(lo, hi - r);
                best = best.max(count_in(a));
            }
        }
        Ok(best as f64 / r)
    }
}

/// Element of the critical set nearest to the given parameters:
/// `(gamma_star, (p, q))` with `gamma_star = -(p^2+q^2)*(pi/ell)^2`
/// minimizing `|gamma - gamma_star|`.
pub fn nearest_critical(params: &MediumParams) -> (f64, (usize, usize)) {
    let s = params.resonance_s();
    let anchor = s.round().max(5.0) as i64;
    let mut best: Option<(f64, i64, (usize, usize))> = None;
    // Sums of two distinct positive squares have bounded gaps; a window of
    // width 50 around the anchor always contains several of them.
    for offset in 0..=50i64 {
        for candidate in [anchor - offset, anchor + offset] {
            if candidate < 5 {
                continue;
            }
            if let Some(pq) = two_distinct_squares(candidate as usize) {
                let dist = (candidate as f64 - s).abs();
                let better = match best {
                    None => true,
                    Some((d, c, _)) => dist < d || (dist == d && candidate < c),
                };
                if better {
                    best = Some((dist, candidate, pq));
                }
            }
        }
    }
    let (_, m, pq) = best.expect("window always contains a representable integer");
    (-(m as f64) * (PI / params.ell()).powi(2), pq)
}

/// Decomposes `m = p^2 + q^2` with `1 <= p < q` if possible, preferring
/// the smallest `p`.
pub fn two_distinct_squares(m: usize) -> Option<(usize, usize)> {
    let mut p = 1usize;
    while 2 * p * p < m {
        let rest = m - p * p;
        let q = (rest as f64).sqrt().round() as usize;
        if q > p && p * p + q * q == m {
            return Some((p, q));
        }
        p += 1;
    }
    None
}

/// Bisection for the root of a continuous function with `f(lo) <= 0 <= f(hi)`
/// or the reverse; caller guarantees a sign change (or a touching endpoint).
fn bisect_monotone<F: Fn(f64) -> f64>(mut lo: f64, mut hi: f64, f: F) -> f64 {
    let mut flo = f(lo);
    if flo == 0.0 {
        return lo;
    }
    if f(hi) == 0.0 {
        return hi;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (hi - lo).abs() <= 1e-15 * mid.abs().max(1.0) {
            return mid;
        }
        let fmid = f(mid);
        if fmid == 0.0 {
            return mid;
        }
        if (fmid > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
