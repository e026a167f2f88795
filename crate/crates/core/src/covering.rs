//! α-coverings of the frequency line and their partitions of unity.
//!
//! A covering is described by a strictly increasing list of knots
//! `t_0 < t_1 < … < t_M`. Every interior knot `t_k` owns the open piece
//! `Q_k = (t_{k-1}, t_{k+1})` with designated point `ξ_Q = t_k`, so each
//! point of the line lies in at most two pieces.
//!
//! The window of `Q_k` rises across the midpoint `b_{k-1}` of the gap
//! `(t_{k-1}, t_k)` and falls across the midpoint `b_k` of `(t_k, t_{k+1})`.
//! Each transition has half-width `ρ·gap`, so it stays strictly inside its
//! gap, and the falling edge of one window is the exact complement of the
//! rising edge of the next.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::grid::{dft1d, Direction, Fn1D, Grid1D};
use crate::scalar::{lit, to_f64, Complex, Real};
use crate::smooth::rise;

/// Japanese bracket `⟨ξ⟩ = (1 + ξ²)^{1/2}`.
#[inline]
pub fn bracket<T: Real>(xi: T) -> T {
    (T::one() + xi * xi).sqrt()
}

/// One interval of a covering together with its ball geometry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Piece<T> {
    pub id: usize,
    pub lo: T,
    pub hi: T,
    /// Designated point `ξ_Q ∈ Q`.
    pub xi_q: T,
    /// Inscribed radius `r_Q`.
    pub r_inner: T,
    /// Circumscribed radius `R_Q`.
    pub r_outer: T,
    /// Inscribed centre `c_Q`.
    pub c_inner: T,
    /// Circumscribed centre `d_Q`.
    pub d_outer: T,
    pub measure: T,
}

impl<T: Real> Piece<T> {
    fn from_interval(id: usize, lo: T, hi: T, xi_q: T) -> Self {
        let half = (hi - lo) / lit(2.0);
        let mid = (hi + lo) / lit(2.0);
        Self {
            id,
            lo,
            hi,
            xi_q,
            r_inner: half,
            r_outer: half,
            c_inner: mid,
            d_outer: mid,
            measure: hi - lo,
        }
    }

    /// Open-interval membership.
    pub fn contains(&self, xi: T) -> bool {
        xi > self.lo && xi < self.hi
    }

    /// Range of `⟨ξ⟩` over `Q ∩ [a, b]`, or `None` when the intersection is empty.
    fn bracket_range(&self, a: T, b: T) -> Option<(T, T)> {
        let lo = self.lo.max(a);
        let hi = self.hi.min(b);
        if lo >= hi {
            return None;
        }
        bracket_range_on(lo, hi)
    }
}

fn bracket_range_on<T: Real>(lo: T, hi: T) -> Option<(T, T)> {
    if lo > hi {
        return None;
    }
    let max = bracket(lo).max(bracket(hi));
    let min = if lo <= T::zero() && hi >= T::zero() {
        T::one()
    } else {
        bracket(lo).min(bracket(hi))
    };
    Some((min, max))
}

/// Constants measured on a built covering.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct CoveringConstants<T> {
    /// Smallest `C` with `C⁻¹⟨ξ⟩^α ≤ |Q| ≤ C⟨ξ⟩^α` on the band.
    pub c_meas: T,
    /// `max R_Q / r_Q`.
    pub k_meas: T,
    /// Maximal number of pieces containing a point of the band.
    pub n0_meas: usize,
    /// `min |Q|`.
    pub kappa1: T,
    /// `min R_Q`.
    pub kappa2: T,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct AlphaCovering<T> {
    pub alpha: T,
    /// Half-width `Ω` of the band `[-Ω, Ω]` the covering is built for.
    pub omega: T,
    pub knots: Vec<T>,
    pub pieces: Vec<Piece<T>>,
    pub constants: CoveringConstants<T>,
}

fn check_alpha<T: Real>(alpha: T) -> Result<()> {
    if !(alpha >= T::zero() && alpha <= T::one()) {
        return Err(Error::InvalidCovering(format!("alpha = {} outside [0, 1]", to_f64(alpha))));
    }
    Ok(())
}

impl<T: Real> AlphaCovering<T> {
    /// Covering from an explicit knot list; each interior knot owns one piece.
    pub fn from_knots(alpha: T, omega: T, knots: Vec<T>) -> Result<Self> {
        check_alpha(alpha)?;
        if !(omega > T::zero()) {
            return Err(Error::InvalidCovering(format!("omega = {} must be positive", to_f64(omega))));
        }
        if knots.len() < 3 {
            return Err(Error::InvalidCovering("need at least three knots".into()));
        }
        if knots.windows(2).any(|w| !(w[1] > w[0])) || knots.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidCovering("knots must be finite and strictly increasing".into()));
        }
        if !(knots[0] < -omega && knots[knots.len() - 1] > omega) {
            return Err(Error::InvalidCovering("pieces do not cover [-omega, omega]".into()));
        }
        let pieces: Vec<Piece<T>> = (1..knots.len() - 1)
            .map(|k| Piece::from_interval(k - 1, knots[k - 1], knots[k + 1], knots[k]))
            .collect();
        let constants = measure_constants(alpha, omega, &pieces);
        Ok(Self { alpha, omega, knots, pieces, constants })
    }

    pub fn piece(&self, id: usize) -> Result<&Piece<T>> {
        self.pieces.get(id).ok_or(Error::UnknownPiece(id))
    }

    pub fn len(&self) -> usize {
        self.pieces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    /// Transition half-width at the midpoint of the gap `(t_k, t_{k+1})`.
    fn transition(&self, gap: usize, rho: T) -> (T, T) {
        let a = self.knots[gap];
        let b = self.knots[gap + 1];
        ((a + b) / lit(2.0), rho * (b - a))
    }

    /// Closed interval on which the windows built with `rho` sum to one.
    pub fn unity_band(&self, rho: T) -> (T, T) {
        let (c0, h0) = self.transition(0, rho);
        let (c1, h1) = self.transition(self.knots.len() - 2, rho);
        (c0 + h0, c1 - h1)
    }

    /// Support `[lo, hi]` of the window of piece `id` built with `rho`.
    pub fn window_support(&self, id: usize, rho: T) -> (T, T) {
        let (cl, hl) = self.transition(id, rho);
        let (cr, hr) = self.transition(id + 1, rho);
        (cl - hl, cr + hr)
    }

    /// Unnormalized window `χ_k(ξ)`.
    pub fn raw_window(&self, id: usize, rho: T, xi: T) -> T {
        let (cl, hl) = self.transition(id, rho);
        let (cr, hr) = self.transition(id + 1, rho);
        rise(xi, cl, hl) * (T::one() - rise(xi, cr, hr))
    }

    /// Complement of the covered region, so that `Σ χ_k + χ_out ≡ 1`.
    fn outside_window(&self, rho: T, xi: T) -> T {
        let (cl, hl) = self.transition(0, rho);
        let (cr, hr) = self.transition(self.knots.len() - 2, rho);
        (T::one() - rise(xi, cl, hl)) + rise(xi, cr, hr)
    }

    /// Stable content hash (hex SHA-256 of the JSON document).
    pub fn content_hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("covering serializes");
        hex::encode(Sha256::digest(&json))
    }
}

fn measure_constants<T: Real>(alpha: T, omega: T, pieces: &[Piece<T>]) -> CoveringConstants<T> {
    let mut c_meas = T::one();
    for q in pieces {
        if let Some((bmin, bmax)) = q.bracket_range(-omega, omega) {
            let lo = bmin.powf(alpha);
            let hi = bmax.powf(alpha);
            c_meas = c_meas.max(q.measure / lo).max(hi / q.measure);
        }
    }
    let k_meas = pieces.iter().map(|q| q.r_outer / q.r_inner).fold(T::one(), T::max);
    let kappa1 = pieces.iter().map(|q| q.measure).fold(T::infinity(), T::min);
    let kappa2 = pieces.iter().map(|q| q.r_outer).fold(T::infinity(), T::min);
    CoveringConstants { c_meas, k_meas, n0_meas: max_overlap(pieces, omega), kappa1, kappa2 }
}

/// Maximal multiplicity over `[-Ω, Ω]` of a family of open intervals.
fn max_overlap<T: Real>(pieces: &[Piece<T>], omega: T) -> usize {
    let mut pts: Vec<T> = pieces.iter().flat_map(|q| [q.lo, q.hi]).collect();
    pts.push(-omega);
    pts.push(omega);
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    let mut probes: Vec<T> = pts.windows(2).map(|w| (w[0] + w[1]) / lit(2.0)).collect();
    probes.extend(pts.iter().copied());
    probes
        .into_iter()
        .filter(|&x| x >= -omega && x <= omega)
        .map(|x| pieces.iter().filter(|q| q.contains(x)).count())
        .max()
        .unwrap_or(0)
}

/// Builds an α-covering by the knot recursion `t_{k+1} = t_k + max(δ, c⟨t_k⟩^α)`,
/// mirrored to negative frequencies.
///
/// Knots are generated until one exceeds `Ω`, plus one closing knot, so the
/// outermost pieces still reach past the band.
pub fn build_covering<T: Real>(alpha: T, omega: T, delta: T, c: T) -> Result<AlphaCovering<T>> {
    check_alpha(alpha)?;
    if !(omega > T::one()) || !omega.is_finite() {
        return Err(Error::InvalidCovering(format!("omega = {} must exceed 1", to_f64(omega))));
    }
    if !(delta > T::zero()) || !(c > T::zero()) {
        return Err(Error::InvalidCovering(format!(
            "delta = {} and c = {} must be positive",
            to_f64(delta),
            to_f64(c)
        )));
    }
    let mut pos = vec![T::zero()];
    loop {
        let t = *pos.last().unwrap();
        let next = t + delta.max(c * bracket(t).powf(alpha));
        pos.push(next);
        if t > omega {
            break;
        }
    }
    Ok(AlphaCovering::from_knots(alpha, omega, mirror(&pos))?)
}

fn mirror<T: Real>(pos: &[T]) -> Vec<T> {
    let mut knots: Vec<T> = pos.iter().skip(1).rev().map(|&t| -t).collect();
    knots.extend_from_slice(pos);
    knots
}

/// Dyadic preset with knots `0, ±2, ±4, ±8, …`: pieces `(-2, 2)` and
/// `±(2^{j-1}, 2^{j+1})` for `j ≥ 2`, plus `±(0, 4)` next to the centre.
pub fn dyadic_preset<T: Real>(omega: T) -> Result<AlphaCovering<T>> {
    if !(omega > T::one()) {
        return Err(Error::InvalidCovering(format!("omega = {} must exceed 1", to_f64(omega))));
    }
    let mut pos = vec![T::zero(), lit(2.0)];
    loop {
        let t = *pos.last().unwrap();
        pos.push(t * lit(2.0));
        if t > omega {
            break;
        }
    }
    AlphaCovering::from_knots(T::one(), omega, mirror(&pos))
}

/// Bounded admissible partition of unity sampled on the dual of `grid`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Bapu<T> {
    pub covering: AlphaCovering<T>,
    /// Spatial grid; windows live on `grid.dual()`.
    pub grid: Grid1D<T>,
    pub rho: T,
    pub windows: Vec<Fn1D<T>>,
    /// `‖F⁻¹ψ_Q‖_{L¹}` per piece.
    pub kernel_l1: Vec<T>,
}

impl<T: Real> Bapu<T> {
    pub fn window(&self, id: usize) -> Result<&Fn1D<T>> {
        self.windows.get(id).ok_or(Error::UnknownPiece(id))
    }

    pub fn alpha(&self) -> T {
        self.covering.alpha
    }

    pub fn sup_kernel_l1(&self) -> T {
        self.kernel_l1.iter().copied().fold(T::zero(), T::max)
    }

    /// Pieces whose window has a nonzero sample on the dual grid.
    pub fn active_pieces(&self) -> Vec<usize> {
        (0..self.windows.len()).filter(|&k| self.windows[k].max_abs() > T::zero()).collect()
    }
}

/// Samples `ψ_k = χ_k / Σ_j χ_j` on the dual nodes of `grid`.
pub fn build_bapu<T: Real>(cov: &AlphaCovering<T>, grid: Grid1D<T>, rho: T) -> Result<Bapu<T>> {
    if !(rho > T::zero() && rho < lit(0.5)) {
        return Err(Error::InvalidCovering(format!("rho = {} outside (0, 1/2)", to_f64(rho))));
    }
    let band = grid.dual_half_width();
    let (lo, _) = cov.window_support(0, rho);
    let (_, hi) = cov.window_support(cov.len() - 1, rho);
    if lo < -band || hi >= band {
        return Err(Error::GridTooCoarse(format!(
            "windows occupy [{:.3}, {:.3}] but the dual band is [-{:.3}, {:.3})",
            to_f64(lo),
            to_f64(hi),
            to_f64(band),
            to_f64(band)
        )));
    }
    let dual = grid.dual();
    let xis = grid.dual_nodes();
    let raw: Vec<Vec<T>> = (0..cov.len())
        .into_par_iter()
        .map(|k| xis.iter().map(|&xi| cov.raw_window(k, rho, xi)).collect())
        .collect();
    let mut total = vec![T::zero(); xis.len()];
    for (m, &xi) in xis.iter().enumerate() {
        let covered: T = raw.iter().map(|w| w[m]).sum();
        if xi.abs() <= cov.omega && covered <= T::zero() {
            return Err(Error::GridTooCoarse(format!(
                "no window is positive at dual node {:.4}",
                to_f64(xi)
            )));
        }
        total[m] = covered + cov.outside_window(rho, xi);
    }
    let windows: Vec<Fn1D<T>> = raw
        .into_iter()
        .map(|w| {
            let values = w
                .into_iter()
                .zip(&total)
                .map(|(v, &s)| Complex::new(if s > T::zero() { v / s } else { T::zero() }, T::zero()))
                .collect();
            Fn1D::new(dual, values).expect("window length matches grid")
        })
        .collect();
    let kernel_l1 = windows
        .par_iter()
        .map(|w| dft1d(w, Direction::Inverse).lp_norm(T::one()).expect("p = 1 is valid"))
        .collect();
    Ok(Bapu { covering: cov.clone(), grid, rho, windows, kernel_l1 })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct CoveringReport<T> {
    pub alpha: T,
    pub fattening_radius: T,
    pub n0_meas: usize,
    /// Largest neighbour count after fattening by `B(0, R)`.
    pub n0_prime: usize,
    /// Comparability of `⟨ξ⟩` across fattened-intersecting pieces.
    pub kappa_neighbors: T,
    /// Comparability of `⟨ξ⟩` within a single piece.
    pub kappa_within: T,
    pub kappa1: T,
    pub kappa2: T,
    pub k_meas: T,
    pub c_meas: T,
    pub c_cap: T,
    pub comparability_ok: bool,
    /// `max |ψ_Q|` at dual nodes outside `Q`.
    pub support_violation: T,
    /// `max |Σ ψ_Q - 1|` on dual nodes of the band.
    pub unity_error: T,
    pub kernel_l1_min: T,
    pub kernel_l1_max: T,
}

impl<T: Real> CoveringReport<T> {
    pub fn kernel_l1_spread(&self) -> T {
        self.kernel_l1_max / self.kernel_l1_min
    }
}

/// Default cap on the measured comparability constant.
pub const DEFAULT_C_CAP: f64 = 8.0;

/// Measures the covering axioms, the neighbour bounds after fattening by
/// `B(0, radius)`, and the BAPU conditions.
pub fn check_covering<T: Real>(cov: &AlphaCovering<T>, bapu: &Bapu<T>, radius: T) -> CoveringReport<T> {
    let pieces = &cov.pieces;
    let mut n0_prime = 0;
    let mut kappa_neighbors = T::one();
    for q in pieces {
        let (flo, fhi) = (q.lo - radius, q.hi + radius);
        let mut count = 0;
        for qp in pieces {
            if flo < qp.hi && qp.lo < fhi {
                count += 1;
                let (a, b) = (flo.max(qp.lo), fhi.min(qp.hi));
                let meet = bracket_range_on(a, b);
                let own = bracket_range_on(q.lo, q.hi);
                let other = bracket_range_on(qp.lo, qp.hi);
                if let (Some(m), Some(o), Some(p)) = (meet, own, other) {
                    kappa_neighbors = kappa_neighbors
                        .max(m.1 / o.0)
                        .max(o.1 / m.0)
                        .max(m.1 / p.0)
                        .max(p.1 / m.0);
                }
            }
        }
        n0_prime = n0_prime.max(count);
    }
    let kappa_within = pieces
        .iter()
        .filter_map(|q| bracket_range_on(q.lo, q.hi))
        .map(|(a, b)| b / a)
        .fold(T::one(), T::max);

    let xis = bapu.grid.dual_nodes();
    let mut support_violation = T::zero();
    let mut unity_error = T::zero();
    for (m, &xi) in xis.iter().enumerate() {
        let mut s = T::zero();
        for (k, q) in pieces.iter().enumerate() {
            let v = bapu.windows[k].values()[m].norm();
            s = s + bapu.windows[k].values()[m].re;
            if !q.contains(xi) {
                support_violation = support_violation.max(v);
            }
        }
        if xi.abs() <= cov.omega {
            unity_error = unity_error.max((s - T::one()).abs());
        }
    }
    let c_cap = lit(DEFAULT_C_CAP);
    CoveringReport {
        alpha: cov.alpha,
        fattening_radius: radius,
        n0_meas: cov.constants.n0_meas,
        n0_prime,
        kappa_neighbors,
        kappa_within,
        kappa1: cov.constants.kappa1,
        kappa2: cov.constants.kappa2,
        k_meas: cov.constants.k_meas,
        c_meas: cov.constants.c_meas,
        c_cap,
        comparability_ok: cov.constants.c_meas <= c_cap,
        support_violation,
        unity_error,
        kernel_l1_min: bapu.kernel_l1.iter().copied().fold(T::infinity(), T::min),
        kernel_l1_max: bapu.sup_kernel_l1(),
    }
}

/// Per-piece `‖∂^β F⁻¹ψ_Q‖_{L¹}` and its ratio to `⟨ξ_Q⟩^β`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct KernelDerivativeL1<T> {
    pub beta: u32,
    pub values: Vec<T>,
    pub ratios: Vec<T>,
}

/// Derivatives are taken spectrally: `∂^β F⁻¹ψ = F⁻¹[(iξ)^β ψ]`.
pub fn kernel_derivative_l1<T: Real>(bapu: &Bapu<T>, beta: u32) -> Result<KernelDerivativeL1<T>> {
    if beta > 4 {
        return Err(Error::OutOfRange(format!("beta = {beta} exceeds 4")));
    }
    let xis = bapu.grid.dual_nodes();
    let i = Complex::new(T::zero(), T::one());
    let values: Vec<T> = bapu
        .windows
        .par_iter()
        .map(|w| {
            let mut weighted = w.clone();
            for (v, &xi) in weighted.values_mut().iter_mut().zip(&xis) {
                *v = *v * (i * xi).powi(beta as i32);
            }
            dft1d(&weighted, Direction::Inverse).lp_norm(T::one()).expect("p = 1 is valid")
        })
        .collect();
    let ratios = values
        .iter()
        .zip(&bapu.covering.pieces)
        .map(|(&v, q)| v / bracket(q.xi_q).powi(beta as i32))
        .collect();
    Ok(KernelDerivativeL1 { beta, values, ratios })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn fine_grid() -> Grid1D<f64> {
        Grid1D::new(8.0 * PI, 2048).unwrap()
    }

    #[test]
    fn uniform_covering_reproduces_unit_lattice() {
        let cov = build_covering(0.0f64, 10.0, 1.0, 1.0).unwrap();
        for q in &cov.pieces {
            assert!((q.measure - 2.0).abs() < 1e-14);
            assert!((q.xi_q - q.xi_q.round()).abs() < 1e-14);
            assert!((q.lo - (q.xi_q - 1.0)).abs() < 1e-14);
        }
        for w in cov.knots.windows(2) {
            assert!((w[1] - w[0] - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn dyadic_like_covering_is_comparable() {
        let cov = build_covering(1.0, 64.0, 1.0, 1.0).unwrap();
        let ratios: Vec<f64> = cov.pieces.iter().map(|q| q.measure / bracket(q.xi_q)).collect();
        let c = ratios.iter().fold(1.0f64, |c, &r| c.max(r).max(1.0 / r));
        assert!(c <= 4.0, "{c}");
        assert!(cov.constants.c_meas <= 8.0);
        let widths: Vec<f64> = cov.pieces.iter().filter(|q| q.xi_q > 0.0).map(|q| q.measure).collect();
        assert!(widths.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn half_alpha_covering_overlap() {
        let cov = build_covering(0.5, 64.0, 1.0, 1.0).unwrap();
        assert!(cov.constants.n0_meas <= 3);
        let g = Grid1D::new(8.0 * PI, 4096).unwrap();
        for xi in g.dual_nodes().into_iter().filter(|x| x.abs() <= 64.0) {
            let n = cov.pieces.iter().filter(|q| q.contains(xi)).count();
            assert!((1..=3).contains(&n));
        }
        for q in &cov.pieces {
            let ratio = q.measure / bracket(q.xi_q).sqrt();
            assert!(ratio > 0.25 && ratio < 4.0, "{ratio}");
        }
    }

    #[test]
    fn build_covering_rejects_bad_parameters() {
        assert!(build_covering(1.5, 10.0, 1.0, 1.0).is_err());
        assert!(build_covering(0.5, 1.0, 1.0, 1.0).is_err());
        assert!(build_covering(0.5, 10.0, 0.0, 1.0).is_err());
        assert!(build_covering(0.5, 10.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn bapu_partition_and_support() {
        let cov = build_covering(0.5, 20.0, 1.0, 1.0).unwrap();
        let bapu = build_bapu(&cov, fine_grid(), 0.25).unwrap();
        let rep = check_covering(&cov, &bapu, 2.0);
        assert!(rep.unity_error <= 1e-8, "{}", rep.unity_error);
        assert!(rep.support_violation <= 1e-12);
        assert!(rep.kernel_l1_max.is_finite());
        for (k, q) in cov.pieces.iter().enumerate() {
            for xi in [q.lo - 0.01, q.hi + 0.01, q.lo - 5.0] {
                assert!(cov.raw_window(k, 0.25, xi) <= 1e-12);
            }
        }
    }

    #[test]
    fn uniform_kernels_are_translates() {
        let cov = build_covering(0.0f64, 10.0, 1.0, 1.0).unwrap();
        let bapu = build_bapu(&cov, fine_grid(), 0.25).unwrap();
        let vals = &bapu.kernel_l1;
        let (lo, hi) = vals.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
        assert!((hi - lo) / lo <= 1e-6, "{lo} {hi}");
    }

    #[test]
    fn uniform_neighbour_count() {
        let cov = build_covering(0.0f64, 10.0, 1.0, 1.0).unwrap();
        let bapu = build_bapu(&cov, fine_grid(), 0.25).unwrap();
        let rep = check_covering(&cov, &bapu, 2.0);
        assert!(rep.n0_prime <= 7, "{}", rep.n0_prime);
        assert!(rep.kappa_within.is_finite() && rep.kappa_neighbors.is_finite());
        assert_eq!(rep.n0_meas, 2);
        assert!(rep.comparability_ok);
    }

    #[test]
    fn single_piece_covering_flags_comparability() {
        let cov = AlphaCovering::from_knots(0.0, 64.0, vec![-256.0, 0.0, 256.0]).unwrap();
        let g = Grid1D::new(4.0 * PI, 2048).unwrap();
        let bapu = build_bapu(&cov, g, 0.1).unwrap();
        let rep = check_covering(&cov, &bapu, 2.0);
        assert!(!rep.comparability_ok);
        assert!(rep.c_meas >= 100.0);
    }

    #[test]
    fn bapu_rejects_small_band() {
        let cov = build_covering(0.0f64, 10.0, 1.0, 1.0).unwrap();
        let g = Grid1D::new(8.0 * PI, 64).unwrap();
        assert!(matches!(build_bapu(&cov, g, 0.25), Err(Error::GridTooCoarse(_))));
        assert!(build_bapu(&cov, fine_grid(), 0.5).is_err());
    }

    #[test]
    fn kernel_derivatives() {
        let cov = build_covering(1.0, 40.0, 1.0, 1.0).unwrap();
        let g = Grid1D::new(8.0 * PI, 4096).unwrap();
        let bapu = build_bapu(&cov, g, 0.25).unwrap();
        let d0 = kernel_derivative_l1(&bapu, 0).unwrap();
        for (a, b) in d0.values.iter().zip(&bapu.kernel_l1) {
            assert_eq!(a, b);
        }
        let d1 = kernel_derivative_l1(&bapu, 1).unwrap();
        let (lo, hi) = d1.ratios.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
        assert!(hi / lo <= 10.0, "{lo} {hi}");
        assert!(kernel_derivative_l1(&bapu, 5).is_err());

        let mut zeroed = bapu.clone();
        zeroed.windows[0] = Fn1D::zeros(g.dual());
        assert_eq!(kernel_derivative_l1(&zeroed, 2).unwrap().values[0], 0.0);
    }

    #[test]
    fn dyadic_preset_pieces() {
        let cov = dyadic_preset(64.0).unwrap();
        let centre = cov.pieces.iter().find(|q| q.xi_q == 0.0).unwrap();
        assert_eq!((centre.lo, centre.hi), (-2.0, 2.0));
        assert!(cov.pieces.iter().any(|q| q.lo == 4.0 && q.hi == 16.0));
    }

    #[test]
    fn canonical_width_distortion() {
        let uni = build_covering(0.0f64, 32.0, 1.0, 1.0).unwrap();
        assert!(uni.pieces.iter().all(|q| (q.measure / 2.0 - 1.0).abs() < 1e-12));
        let dy = build_covering(1.0f64, 64.0, 1.0, 1.0).unwrap();
        for q in dy.pieces.iter().filter(|q| q.xi_q.abs() >= 2.0) {
            // canonical dyadic pieces containing ξ_Q have widths 1.5·2^j
            let x = q.xi_q.abs();
            let ok = (1..12).any(|j: i32| {
                let (lo, hi) = (2f64.powi(j - 1), 2f64.powi(j + 1));
                x >= lo && x <= hi && {
                    let r = q.measure / (hi - lo);
                    (0.5..=2.0).contains(&r)
                }
            });
            assert!(ok, "piece at {x} width {}", q.measure);
        }
    }

    #[test]
    fn hash_is_stable() {
        let a = build_covering(0.5, 16.0, 1.0, 1.0).unwrap();
        let b = build_covering(0.5, 16.0, 1.0, 1.0).unwrap();
        assert_eq!(a.content_hash(), b.content_hash());
        let c = build_covering(0.5, 16.0, 1.0, 2.0).unwrap();
        assert_ne!(a.content_hash(), c.content_hash());
    }
}
