//! Analysis windows used by the trace-class synthesis.
//!
//! `φ̂₁` is an amplitude-shifted Gaussian, `φ̂₂` a cubic B-spline squeezed
//! onto `[-1/4, 1/4]`, and `γ` a smooth plateau that is 1 on `[-2, 2]` and
//! vanishes outside `[-4, 4]`.

use serde::{Deserialize, Serialize};

use crate::covering::{AlphaCovering, Piece};
use crate::error::{Error, Result};
use crate::grid::{Fn1D, Grid1D};
use crate::quadrature::GaussLegendre;
use crate::scalar::{lit, to_f64, Complex, Real};
use crate::smooth::radial_plateau;

const SPLINE_SQUEEZE: f64 = 8.0;
const GAMMA_INNER: f64 = 2.0;
const GAMMA_OUTER: f64 = 4.0;
/// Exponent above which `e^{R₀²/2}` stops being comfortably finite.
const MAX_AMPLITUDE_EXP: f64 = 600.0;
const QUAD_POINTS: usize = 48;

/// Centred cubic B-spline on `[-2, 2]` with unit integral.
pub(crate) fn cubic_bspline(t: f64) -> f64 {
    let a = t.abs();
    if a >= 2.0 {
        0.0
    } else if a >= 1.0 {
        (2.0 - a).powi(3) / 6.0
    } else {
        2.0 / 3.0 - a * a + a * a * a / 2.0
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct WindowSet<T> {
    /// `min R_Q` of the covering the windows were built for.
    pub kappa2: T,
    /// `4 + 1/(4κ₂²)`; `φ̂₁ ≥ 1` exactly on `|ξ| ≤ r0`.
    pub r0: T,
    /// Multiplies `φ̂₂`; 1 unless deliberately degenerated.
    pub phi2_gain: T,
    /// `φ₁` on the spatial grid.
    pub phi1: Fn1D<T>,
    /// `φ₂` on the spatial grid.
    pub phi2: Fn1D<T>,
    pub phi1_hat: Fn1D<T>,
    pub phi2_hat: Fn1D<T>,
    /// `γ` on the dual grid.
    pub gamma: Fn1D<T>,
}

impl<T: Real> WindowSet<T> {
    pub fn phi1_hat_at(&self, xi: T) -> T {
        ((self.r0 * self.r0 - xi * xi) / lit(2.0)).exp()
    }

    pub fn phi1_at(&self, x: T) -> T {
        ((self.r0 * self.r0 - x * x) / lit(2.0)).exp() / (lit::<T>(2.0) * T::PI()).sqrt()
    }

    pub fn phi2_hat_at(&self, xi: T) -> T {
        self.phi2_gain * lit(cubic_bspline(SPLINE_SQUEEZE * to_f64(xi)))
    }

    /// `(1/16π) (sin(x/16) / (x/16))⁴`.
    pub fn phi2_at(&self, x: T) -> T {
        let s = x / lit(2.0 * SPLINE_SQUEEZE);
        let sinc = if s.abs() < lit(1e-8) { T::one() } else { s.sin() / s };
        self.phi2_gain * sinc.powi(4) / (lit::<T>(2.0 * SPLINE_SQUEEZE) * T::PI())
    }

    pub fn gamma_at(&self, xi: T) -> T {
        radial_plateau(xi, lit(GAMMA_INNER), lit(GAMMA_OUTER))
    }

    /// `‖φ̂₂‖_{L¹}`.
    pub fn phi2_hat_l1(&self) -> T {
        self.phi2_gain / lit(SPLINE_SQUEEZE)
    }

    /// Same windows with `φ̂₂` multiplied by `gain`.
    pub fn with_phi2_gain(&self, gain: T) -> Self {
        let mut out = self.clone();
        out.phi2_gain = self.phi2_gain * gain;
        for f in [&mut out.phi2, &mut out.phi2_hat] {
            f.values_mut().iter_mut().for_each(|v| *v = v.scale(gain));
        }
        out
    }

    /// Closed-form `∫_{-1/4}^{1/4} e^{-iηt} φ̂₁(y + t/rr) φ̂₂(t) dt`.
    ///
    /// For the pair `(Q, Q')` with `rr = R_Q R_{Q'}` this is the transform of
    /// the synthesis atom in the rescaled variables `((y - d_Q)/R_Q,
    /// (η - d_{Q'})/R_{Q'})`.
    pub fn rhat(&self, rr: T, y: T, eta: T) -> Complex<T> {
        let gl = GaussLegendre::new(QUAD_POINTS);
        self.rhat_with(&gl, rr, y, eta)
    }

    fn rhat_with(&self, gl: &GaussLegendre, rr: T, y: T, eta: T) -> Complex<T> {
        let (rr, y, eta) = (to_f64(rr), to_f64(y), to_f64(eta));
        let r0 = to_f64(self.r0);
        let gain = to_f64(self.phi2_gain);
        let v: Complex<f64> = gl.integrate_pieces(&[-0.25, -0.125, 0.0, 0.125, 0.25], |t| {
            let s = y + t / rr;
            let amp = ((r0 * r0 - s * s) / 2.0).exp() * gain * cubic_bspline(SPLINE_SQUEEZE * t);
            Complex::from_polar(amp, -eta * t)
        });
        Complex::new(lit(v.re), lit(v.im))
    }

    /// Transform of the synthesis atom of `(q, qp)` at `(y, η)` on the phase plane.
    pub fn atom_transform(&self, q: &Piece<T>, qp: &Piece<T>, y: T, eta: T) -> Complex<T> {
        let (r, rp) = (q.r_outer, qp.r_outer);
        self.rhat(r * rp, (y - q.d_outer) / r, (eta - qp.d_outer) / rp)
    }
}

/// Builds the windows for `cov`, sampled on `grid` and its dual.
pub fn build_windows<T: Real>(cov: &AlphaCovering<T>, grid: Grid1D<T>) -> Result<WindowSet<T>> {
    let kappa2 = cov.constants.kappa2;
    if !(kappa2 > T::zero()) {
        return Err(Error::InvalidCovering("covering has no positive radius".into()));
    }
    let r0 = lit::<T>(4.0) + (lit::<T>(4.0) * kappa2 * kappa2).recip();
    if to_f64(r0 * r0) / 2.0 > MAX_AMPLITUDE_EXP {
        return Err(Error::InvalidCovering(format!(
            "kappa2 = {} makes the Gaussian window overflow",
            to_f64(kappa2)
        )));
    }
    let band = grid.dual_half_width();
    if band < lit(GAMMA_OUTER) || grid.half_width() < lit(GAMMA_OUTER) {
        return Err(Error::GridTooCoarse(format!(
            "half-widths {} and {} cannot hold the cutoff support [-4, 4]",
            to_f64(grid.half_width()),
            to_f64(band)
        )));
    }
    let mut ws = WindowSet {
        kappa2,
        r0,
        phi2_gain: T::one(),
        phi1: Fn1D::zeros(grid),
        phi2: Fn1D::zeros(grid),
        phi1_hat: Fn1D::zeros(grid.dual()),
        phi2_hat: Fn1D::zeros(grid.dual()),
        gamma: Fn1D::zeros(grid.dual()),
    };
    ws.phi1 = Fn1D::from_real_fn(grid, |x| ws.phi1_at(x));
    ws.phi2 = Fn1D::from_real_fn(grid, |x| ws.phi2_at(x));
    ws.phi1_hat = Fn1D::from_real_fn(grid.dual(), |xi| ws.phi1_hat_at(xi));
    ws.phi2_hat = Fn1D::from_real_fn(grid.dual(), |xi| ws.phi2_hat_at(xi));
    ws.gamma = Fn1D::from_real_fn(grid.dual(), |xi| ws.gamma_at(xi));
    Ok(ws)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FloorReport {
    pub q_id: usize,
    pub qp_id: usize,
    /// `min |R̂|` over the lattice of `[-4, 4]²`.
    pub min_modulus: f64,
    /// `cos(1) ‖φ̂₂‖_{L¹}`, the lower bound forced by positivity of the windows.
    pub forced_floor: f64,
    /// Largest finite-difference estimate of a derivative of order at most 2.
    pub max_derivative: f64,
    pub lattice_points: usize,
}

/// Samples the rescaled transform of the `(q, qp)` atom on `[-4, 4]²` with
/// spacing `step`.
pub fn window_floor_check<T: Real>(ws: &WindowSet<T>, q: &Piece<T>, qp: &Piece<T>, step: f64) -> FloorReport {
    use rayon::prelude::*;

    let gl = GaussLegendre::new(QUAD_POINTS);
    let rr = q.r_outer * qp.r_outer;
    let m = (GAMMA_OUTER / step).round() as i64;
    let pts: Vec<f64> = (-m..=m).map(|k| k as f64 * GAMMA_OUTER / m as f64).collect();
    let fd = 1e-2;
    let eval = |y: f64, e: f64| ws.rhat_with(&gl, rr, lit(y), lit(e));
    let (min_modulus, max_derivative) = pts
        .par_iter()
        .map(|&y| {
            let mut lo = f64::INFINITY;
            let mut hi: f64 = 0.0;
            for &e in &pts {
                let c = eval(y, e);
                lo = lo.min(to_f64(c.norm()));
                let [yp, ym, ep, em] = [eval(y + fd, e), eval(y - fd, e), eval(y, e + fd), eval(y, e - fd)];
                let mixed = (eval(y + fd, e + fd) - eval(y + fd, e - fd) - eval(y - fd, e + fd)
                    + eval(y - fd, e - fd))
                    / lit::<T>(4.0 * fd * fd);
                let two = lit::<T>(2.0);
                let derivs = [
                    c,
                    (yp - ym) / lit::<T>(2.0 * fd),
                    (ep - em) / lit::<T>(2.0 * fd),
                    (yp - c * two + ym) / lit::<T>(fd * fd),
                    (ep - c * two + em) / lit::<T>(fd * fd),
                    mixed,
                ];
                for d in derivs {
                    hi = hi.max(to_f64(d.norm()));
                }
            }
            (lo, hi)
        })
        .reduce(|| (f64::INFINITY, 0.0), |a, b| (a.0.min(b.0), a.1.max(b.1)));
    FloorReport {
        q_id: q.id,
        qp_id: qp.id,
        min_modulus,
        forced_floor: 1f64.cos() * to_f64(ws.phi2_hat_l1()),
        max_derivative,
        lattice_points: pts.len() * pts.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covering::build_covering;

    fn setup() -> (AlphaCovering<f64>, WindowSet<f64>) {
        let cov = build_covering(0.5f64, 16.0, 1.0, 1.0).unwrap();
        let ws = build_windows(&cov, Grid1D::new(8.0, 64).unwrap()).unwrap();
        (cov, ws)
    }

    #[test]
    fn window_values() {
        let (_, ws) = setup();
        assert_eq!(ws.phi1_hat_at(ws.r0), 1.0);
        assert!(ws.phi1_hat_at(0.0) > 1.0);
        assert_eq!(ws.phi2_hat_at(0.25), 0.0);
        assert_eq!(ws.phi2_hat_at(-0.25), 0.0);
        assert!(ws.phi2_hat.values().iter().all(|v| v.re >= 0.0));
        assert_eq!(ws.gamma_at(1.9), 1.0);
        assert_eq!(ws.gamma_at(4.1), 0.0);
    }

    #[test]
    fn bspline_has_unit_mass() {
        let gl = GaussLegendre::new(8);
        let m = gl.integrate_pieces(&[-2.0, -1.0, 0.0, 1.0, 2.0], cubic_bspline);
        assert!((m - 1.0).abs() < 1e-14);
    }

    #[test]
    fn phi2_is_inverse_transform_of_spline() {
        let (_, ws) = setup();
        let gl = GaussLegendre::new(32);
        for x in [0.0, 1.5, 7.0, 30.0] {
            let v: Complex<f64> = gl.integrate_pieces(&[-0.25, -0.125, 0.0, 0.125, 0.25], |t| {
                Complex::from_polar(ws.phi2_hat_at(t), x * t)
            });
            let want = v.re / (2.0 * std::f64::consts::PI);
            assert!((ws.phi2_at(x) - want).abs() < 1e-14, "{x}");
        }
    }

    #[test]
    fn floor_holds_and_degenerates() {
        let (cov, ws) = setup();
        let (q, qp) = (&cov.pieces[3], &cov.pieces[5]);
        let rep = window_floor_check(&ws, q, qp, 0.5);
        assert!(rep.min_modulus >= 0.5 * rep.forced_floor, "{rep:?}");
        assert!(rep.max_derivative.is_finite());
        let flat = ws.with_phi2_gain(0.0);
        assert_eq!(window_floor_check(&flat, q, qp, 0.5).min_modulus, 0.0);
    }

    #[test]
    fn rejects_small_band() {
        let cov = build_covering(0.5, 16.0, 1.0, 1.0).unwrap();
        assert!(matches!(
            build_windows(&cov, Grid1D::new(8.0, 16).unwrap()),
            Err(Error::GridTooCoarse(_))
        ));
    }
}
