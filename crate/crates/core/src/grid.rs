//! Sampled functions on a truncated, periodized line and on the phase plane.
//!
//! A [`Grid1D`] with half-width `L` and `N` samples has nodes
//! `x_j = (j - N/2)·h` with `h = 2L/N`, and a dual grid with nodes
//! `ξ_m = (m - N/2)·π/L`. The product of the two spacings is exactly
//! `2π/N`, which makes the discrete transforms below exact inverses of each
//! other and gives an exact discrete Parseval identity.
//!
//! Transform conventions (physical ordering, never FFT-internal ordering):
//!
//! * forward: `F̂[m] = h · Σ_j e^{-i ξ_m x_j} f[j]`
//! * inverse: `f[j] = (h_ξ / 2π) · Σ_m e^{i x_j ξ_m} F̂[m]`
//!
//! Both directions map a function on a grid to a function on its dual, so
//! `dft1d(dft1d(f, Forward), Inverse)` lives on `grid.dual().dual() == grid`.

use std::sync::Arc;

use ndarray::{Array2, Axis};
use rayon::prelude::*;
use rustfft::{Fft, FftDirection, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Complex, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Inverse,
}

/// Uniform grid on `[-L, L)` with `N` nodes, together with its dual.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Grid1D<T> {
    half_width: T,
    dual_half_width: T,
    len: usize,
}

impl<T: Real> Grid1D<T> {
    pub fn new(half_width: T, len: usize) -> Result<Self> {
        if len < 4 || len % 2 != 0 {
            return Err(Error::InvalidGrid(format!("N = {len} must be even and at least 4")));
        }
        if !(half_width > T::zero()) || !half_width.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "half-width L = {} must be positive and finite",
                to_f64(half_width)
            )));
        }
        let n: T = lit(len as f64);
        Ok(Self {
            half_width,
            dual_half_width: n * T::PI() / (lit::<T>(2.0) * half_width),
            len,
        })
    }

    /// Grid whose physical and dual half-widths coincide, `L = sqrt(Nπ/2)`.
    pub fn symmetric(len: usize) -> Result<Self> {
        let l = (lit::<T>(len as f64) * T::PI() / lit(2.0)).sqrt();
        Self::new(l, len)
    }

    pub fn half_width(&self) -> T {
        self.half_width
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Node spacing `h = 2L/N`.
    pub fn spacing(&self) -> T {
        lit::<T>(2.0) * self.half_width / lit(self.len as f64)
    }

    /// Dual spacing `π/L`.
    pub fn dual_spacing(&self) -> T {
        T::PI() / self.half_width
    }

    /// Half-width of the dual band, `Nπ/(2L)`.
    pub fn dual_half_width(&self) -> T {
        self.dual_half_width
    }

    pub fn node(&self, j: usize) -> T {
        (lit::<T>(j as f64) - lit(self.len as f64 / 2.0)) * self.spacing()
    }

    pub fn dual_node(&self, m: usize) -> T {
        (lit::<T>(m as f64) - lit(self.len as f64 / 2.0)) * self.dual_spacing()
    }

    pub fn nodes(&self) -> Vec<T> {
        (0..self.len).map(|j| self.node(j)).collect()
    }

    pub fn dual_nodes(&self) -> Vec<T> {
        (0..self.len).map(|m| self.dual_node(m)).collect()
    }

    /// The dual grid as a grid in its own right; `g.dual().dual()` is `g`.
    pub fn dual(&self) -> Self {
        Self {
            half_width: self.dual_half_width,
            dual_half_width: self.half_width,
            len: self.len,
        }
    }

    /// Equality up to a relative tolerance of `1e-10` on the half-width.
    pub fn matches(&self, other: &Self) -> bool {
        self.len == other.len
            && (self.half_width - other.half_width).abs()
                <= lit::<T>(1e-10) * self.half_width.abs().max(other.half_width.abs())
    }

    /// Index of the node nearest to `x`, wrapping periodically.
    pub fn wrap_index(&self, x: T) -> usize {
        let n = self.len as i64;
        let k = ((x / self.spacing()).round().to_i64().unwrap_or(0) + n / 2).rem_euclid(n);
        k as usize
    }

    /// Maps `x` into `[-L, L)` by adding a multiple of `2L`.
    pub fn wrap(&self, x: T) -> T {
        let period = lit::<T>(2.0) * self.half_width;
        let shifted = x + self.half_width;
        shifted - (shifted / period).floor() * period - self.half_width
    }
}

fn check_same_grid<T: Real>(a: &Grid1D<T>, b: &Grid1D<T>, what: &str) -> Result<()> {
    if a.matches(b) {
        Ok(())
    } else {
        Err(Error::ShapeMismatch(format!(
            "{what}: grid (L = {}, N = {}) vs (L = {}, N = {})",
            to_f64(a.half_width),
            a.len,
            to_f64(b.half_width),
            b.len
        )))
    }
}

pub(crate) fn require_same_grid<T: Real>(a: &Grid1D<T>, b: &Grid1D<T>, what: &str) -> Result<()> {
    check_same_grid(a, b, what)
}

/// Complex samples of a function on a [`Grid1D`].
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Fn1D<T> {
    pub grid: Grid1D<T>,
    values: Vec<Complex<T>>,
}

impl<T: Real> Fn1D<T> {
    pub fn new(grid: Grid1D<T>, values: Vec<Complex<T>>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} samples for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Grid1D<T>) -> Self {
        Self { grid, values: vec![Complex::new(T::zero(), T::zero()); grid.len()] }
    }

    pub fn from_fn(grid: Grid1D<T>, f: impl Fn(T) -> Complex<T>) -> Self {
        let values = grid.nodes().into_iter().map(f).collect();
        Self { grid, values }
    }

    pub fn from_real_fn(grid: Grid1D<T>, f: impl Fn(T) -> T) -> Self {
        Self::from_fn(grid, |x| Complex::new(f(x), T::zero()))
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex<T>> {
        self.values
    }

    pub fn scale(&self, c: Complex<T>) -> Self {
        Self { grid: self.grid, values: self.values.iter().map(|&v| v * c).collect() }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_same_grid(&self.grid, &other.grid, "Fn1D::add")?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Ok(Self { grid: self.grid, values })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        check_same_grid(&self.grid, &other.grid, "Fn1D::sub")?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        Ok(Self { grid: self.grid, values })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        check_same_grid(&self.grid, &other.grid, "Fn1D::mul")?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect();
        Ok(Self { grid: self.grid, values })
    }

    /// Weighted inner product `h · Σ f conj(g)`.
    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        check_same_grid(&self.grid, &other.grid, "Fn1D::inner")?;
        let s: Complex<T> = self.values.iter().zip(&other.values).map(|(a, b)| a * b.conj()).sum();
        Ok(s * self.grid.spacing())
    }

    pub fn lp_norm(&self, p: T) -> Result<T> {
        lp_norm_weighted(self.values.iter(), self.grid.spacing(), p)
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().map(|v| v.norm()).fold(T::zero(), T::max)
    }
}

/// Samples `σ[j, m] ≈ σ(x_j, ξ_m)` on a product of two grids.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Symbol2D<T> {
    pub grid_x: Grid1D<T>,
    pub grid_xi: Grid1D<T>,
    values: Array2<Complex<T>>,
}

impl<T: Real> Symbol2D<T> {
    pub fn new(grid_x: Grid1D<T>, grid_xi: Grid1D<T>, values: Array2<Complex<T>>) -> Result<Self> {
        if values.dim() != (grid_x.len(), grid_xi.len()) {
            return Err(Error::ShapeMismatch(format!(
                "symbol of shape {:?} for grids of {} x {} nodes",
                values.dim(),
                grid_x.len(),
                grid_xi.len()
            )));
        }
        Ok(Self { grid_x, grid_xi, values })
    }

    /// Symbol sampled on `grid × grid.dual()`, the layout expected by quantization.
    pub fn on_phase_plane(grid: Grid1D<T>, f: impl Fn(T, T) -> Complex<T> + Sync) -> Self {
        Self::from_fn(grid, grid.dual(), f)
    }

    pub fn from_fn(grid_x: Grid1D<T>, grid_xi: Grid1D<T>, f: impl Fn(T, T) -> Complex<T> + Sync) -> Self {
        let xs = grid_x.nodes();
        let xis = grid_xi.nodes();
        let mut values = Array2::from_elem((xs.len(), xis.len()), Complex::new(T::zero(), T::zero()));
        values.axis_iter_mut(Axis(0)).into_par_iter().enumerate().for_each(|(j, mut row)| {
            for (m, v) in row.iter_mut().enumerate() {
                *v = f(xs[j], xis[m]);
            }
        });
        Self { grid_x, grid_xi, values }
    }

    pub fn zeros(grid_x: Grid1D<T>, grid_xi: Grid1D<T>) -> Self {
        let values = Array2::from_elem((grid_x.len(), grid_xi.len()), Complex::new(T::zero(), T::zero()));
        Self { grid_x, grid_xi, values }
    }

    /// Tensor product `(f ⊗ g)(x, ξ) = f(x) g(ξ)`.
    pub fn outer(f: &Fn1D<T>, g: &Fn1D<T>) -> Self {
        let values = Array2::from_shape_fn((f.grid.len(), g.grid.len()), |(j, m)| {
            f.values()[j] * g.values()[m]
        });
        Self { grid_x: f.grid, grid_xi: g.grid, values }
    }

    pub fn values(&self) -> &Array2<Complex<T>> {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut Array2<Complex<T>> {
        &mut self.values
    }

    pub fn into_values(self) -> Array2<Complex<T>> {
        self.values
    }

    pub fn cell_weight(&self) -> T {
        self.grid_x.spacing() * self.grid_xi.spacing()
    }

    pub fn same_grids(&self, other: &Self) -> bool {
        self.grid_x.matches(&other.grid_x) && self.grid_xi.matches(&other.grid_xi)
    }

    fn check_same(&self, other: &Self, what: &str) -> Result<()> {
        check_same_grid(&self.grid_x, &other.grid_x, what)?;
        check_same_grid(&self.grid_xi, &other.grid_xi, what)
    }

    pub fn scale(&self, c: Complex<T>) -> Self {
        Self { grid_x: self.grid_x, grid_xi: self.grid_xi, values: self.values.mapv(|v| v * c) }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other, "Symbol2D::add")?;
        Ok(Self { grid_x: self.grid_x, grid_xi: self.grid_xi, values: &self.values + &other.values })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other, "Symbol2D::sub")?;
        Ok(Self { grid_x: self.grid_x, grid_xi: self.grid_xi, values: &self.values - &other.values })
    }

    /// Weighted inner product `h_x h_ξ · Σ σ conj(τ)`.
    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        self.check_same(other, "Symbol2D::inner")?;
        let s: Complex<T> = self.values.iter().zip(other.values.iter()).map(|(a, b)| a * b.conj()).sum();
        Ok(s * self.cell_weight())
    }

    pub fn lp_norm(&self, p: T) -> Result<T> {
        lp_norm_weighted(self.values.iter(), self.cell_weight(), p)
    }

    /// Unweighted `(Σ |σ[j,m]|²)^{1/2}`.
    pub fn l2_sum(&self) -> T {
        self.values.iter().map(|v| v.norm_sqr()).sum::<T>().sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().map(|v| v.norm()).fold(T::zero(), T::max)
    }
}

/// `(Σ |v|^p · w)^{1/p}`, or `max |v|` when `p = ∞`.
pub fn lp_norm_weighted<'a, T: Real>(
    values: impl Iterator<Item = &'a Complex<T>>,
    cell_weight: T,
    p: T,
) -> Result<T> {
    check_exponent(p)?;
    if p.is_infinite() {
        return Ok(values.map(|v| v.norm()).fold(T::zero(), T::max));
    }
    let s: T = if p == T::one() {
        values.map(|v| v.norm()).sum()
    } else if p == lit(2.0) {
        values.map(|v| v.norm_sqr()).sum::<T>()
    } else {
        values.map(|v| v.norm().powf(p)).sum()
    };
    let total = s * cell_weight;
    Ok(if p == T::one() {
        total
    } else if p == lit(2.0) {
        total.sqrt()
    } else {
        total.powf(p.recip())
    })
}

pub(crate) fn check_exponent<T: Real>(p: T) -> Result<()> {
    if p.is_nan() || p < T::one() {
        Err(Error::InvalidExponent(to_f64(p)))
    } else {
        Ok(())
    }
}

/// Planned transform of one length; reused across the rows of a 2-D array.
pub(crate) struct Dft<T: Real> {
    len: usize,
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
}

impl<T: Real> Dft<T> {
    pub(crate) fn new(len: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            len,
            forward: planner.plan_fft(len, FftDirection::Forward),
            inverse: planner.plan_fft(len, FftDirection::Inverse),
        }
    }

    /// Transforms samples taken on a grid of spacing `src_spacing` in place.
    ///
    /// With `x_j = (j - N/2) h` and `ξ_m = (m - N/2) h_ξ`, the kernel
    /// `e^{∓i x_j ξ_m}` factors as `(-1)^{j+m+N/2} e^{∓2πi jm/N}`.
    pub(crate) fn apply(&self, buf: &mut [Complex<T>], dir: Direction, src_spacing: T) {
        debug_assert_eq!(buf.len(), self.len);
        for (j, v) in buf.iter_mut().enumerate() {
            if j % 2 == 1 {
                *v = -*v;
            }
        }
        let weight = match dir {
            Direction::Forward => {
                self.forward.process(buf);
                src_spacing
            }
            Direction::Inverse => {
                self.inverse.process(buf);
                src_spacing / (lit::<T>(2.0) * T::PI())
            }
        };
        let global = if (self.len / 2) % 2 == 1 { -weight } else { weight };
        for (m, v) in buf.iter_mut().enumerate() {
            *v = if m % 2 == 1 { *v * (-global) } else { *v * global };
        }
    }

    /// Applies the transform to every row of `a` in parallel.
    pub(crate) fn apply_rows(&self, a: &mut Array2<Complex<T>>, dir: Direction, src_spacing: T) {
        a.axis_iter_mut(Axis(0)).into_par_iter().for_each(|mut row| {
            if let Some(slice) = row.as_slice_mut() {
                self.apply(slice, dir, src_spacing);
            } else {
                let mut buf: Vec<Complex<T>> = row.iter().copied().collect();
                self.apply(&mut buf, dir, src_spacing);
                row.iter_mut().zip(buf).for_each(|(d, s)| *d = s);
            }
        });
    }
}

pub fn dft1d<T: Real>(f: &Fn1D<T>, dir: Direction) -> Fn1D<T> {
    let mut values = f.values.clone();
    Dft::new(f.grid.len()).apply(&mut values, dir, f.grid.spacing());
    Fn1D { grid: f.grid.dual(), values }
}

/// Transform along the first variable only (`x → y`).
pub fn dft_first<T: Real>(s: &Symbol2D<T>, dir: Direction) -> Symbol2D<T> {
    let mut t = s.values.t().as_standard_layout().into_owned();
    Dft::new(s.grid_x.len()).apply_rows(&mut t, dir, s.grid_x.spacing());
    Symbol2D {
        grid_x: s.grid_x.dual(),
        grid_xi: s.grid_xi,
        values: t.t().as_standard_layout().into_owned(),
    }
}

/// Transform along the second variable only (`ξ → η`).
pub fn dft_second<T: Real>(s: &Symbol2D<T>, dir: Direction) -> Symbol2D<T> {
    let mut values = s.values.as_standard_layout().into_owned();
    Dft::new(s.grid_xi.len()).apply_rows(&mut values, dir, s.grid_xi.spacing());
    Symbol2D { grid_x: s.grid_x, grid_xi: s.grid_xi.dual(), values }
}

/// Tensorized transform in both variables.
pub fn dft2d<T: Real>(s: &Symbol2D<T>, dir: Direction) -> Symbol2D<T> {
    dft_first(&dft_second(s, dir), dir)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_fn(grid: Grid1D<f64>, seed: u64) -> Fn1D<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = (0..grid.len())
            .map(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        Fn1D::new(grid, values).unwrap()
    }

    #[test]
    fn make_grid_small_example() {
        let g = Grid1D::new(PI, 8).unwrap();
        let nodes = g.nodes();
        assert!((nodes[0] + PI).abs() < 1e-15);
        assert!((nodes[7] - 3.0 * PI / 4.0).abs() < 1e-15);
        let dual = g.dual_nodes();
        for (m, d) in dual.iter().enumerate() {
            assert!((d - (m as f64 - 4.0)).abs() < 1e-15);
        }
        assert!((g.dual_spacing() - 1.0).abs() < 1e-15);
        assert!((g.spacing() * g.dual_spacing() - 2.0 * PI / 8.0).abs() < 1e-15);
    }

    #[test]
    fn make_grid_dual_span() {
        let g = Grid1D::new(16.0, 256).unwrap();
        assert!((g.dual_spacing() - PI / 16.0).abs() < 1e-15);
        assert!((g.dual_node(0) + 8.0 * PI / 2.0 * 2.0).abs() < 1e-12);
        assert!((g.dual_half_width() - 8.0 * PI).abs() < 1e-12);
        assert!(g.dual_nodes().windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn make_grid_rejects_bad_input() {
        assert!(Grid1D::new(1.0, 7).is_err());
        assert!(Grid1D::new(1.0, 2).is_err());
        assert!(Grid1D::new(0.0, 8).is_err());
        assert!(Grid1D::new(-1.0, 8).is_err());
        assert!(Grid1D::new(f64::NAN, 8).is_err());
    }

    #[test]
    fn dual_is_an_involution() {
        let g = Grid1D::new(3.7, 64).unwrap();
        let dd = g.dual().dual();
        assert_eq!(dd.half_width(), g.half_width());
        assert!(g.dual().matches(&Grid1D::new(64.0 * PI / 7.4, 64).unwrap()));
    }

    #[test]
    fn delta_transforms_to_constant() {
        let g = Grid1D::new(5.0, 32).unwrap();
        let mut f = Fn1D::zeros(g);
        f.values_mut()[16] = Complex::new(1.0, 0.0);
        let fh = dft1d(&f, Direction::Forward);
        for v in fh.values() {
            assert!((v - Complex::new(g.spacing(), 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn round_trip_random() {
        let g = Grid1D::new(4.0, 64).unwrap();
        let f = random_fn(g, 7);
        let back = dft1d(&dft1d(&f, Direction::Forward), Direction::Inverse);
        assert!(back.grid.matches(&g));
        let err = back.sub(&f).unwrap().max_abs();
        assert!(err <= 1e-12, "{err}");
    }

    #[test]
    fn forward_matches_naive_sum() {
        let g = Grid1D::new(2.5, 16).unwrap();
        let f = random_fn(g, 3);
        let fh = dft1d(&f, Direction::Forward);
        for m in 0..16 {
            let xi = g.dual_node(m);
            let naive: Complex<f64> = (0..16)
                .map(|j| f.values()[j] * Complex::from_polar(1.0, -xi * g.node(j)))
                .sum::<Complex<f64>>()
                * g.spacing();
            assert!((naive - fh.values()[m]).norm() < 1e-12);
        }
        let fi = dft1d(&f, Direction::Inverse);
        for m in 0..16 {
            let xi = g.dual_node(m);
            let naive: Complex<f64> = (0..16)
                .map(|j| f.values()[j] * Complex::from_polar(1.0, xi * g.node(j)))
                .sum::<Complex<f64>>()
                * g.spacing()
                / (2.0 * PI);
            assert!((naive - fi.values()[m]).norm() < 1e-12);
        }
    }

    #[test]
    fn parseval_is_exact() {
        let g = Grid1D::new(6.0, 128).unwrap();
        let f = random_fn(g, 11);
        let fh = dft1d(&f, Direction::Forward);
        let lhs = fh.lp_norm(2.0).unwrap().powi(2);
        let rhs = 2.0 * PI * f.lp_norm(2.0).unwrap().powi(2);
        assert!((lhs - rhs).abs() <= 1e-12 * rhs);
    }

    #[test]
    fn lp_norm_examples() {
        let g = Grid1D::new(PI, 64).unwrap();
        let one = Fn1D::from_real_fn(g, |_| 1.0);
        assert!((one.lp_norm(1.0).unwrap() - 2.0 * PI).abs() < 1e-13);
        let zero = Fn1D::zeros(g);
        for p in [1.0, 1.5, 2.0, f64::INFINITY] {
            assert_eq!(zero.lp_norm(p).unwrap(), 0.0);
        }
        assert!(one.lp_norm(0.5).is_err());
        assert!(one.lp_norm(f64::NAN).is_err());
        assert_eq!(one.lp_norm(f64::INFINITY).unwrap(), 1.0);
    }

    #[test]
    fn symbol_outer_transforms_as_outer() {
        let g = Grid1D::new(3.0, 32).unwrap();
        let f = random_fn(g, 1);
        let h = random_fn(g.dual(), 2);
        let s = Symbol2D::outer(&f, &h);
        let sh = dft2d(&s, Direction::Forward);
        let expect = Symbol2D::outer(&dft1d(&f, Direction::Forward), &dft1d(&h, Direction::Forward));
        assert!(sh.same_grids(&expect));
        let err = sh.sub(&expect).unwrap().max_abs();
        assert!(err <= 1e-12 * expect.max_abs(), "{err}");
    }

    #[test]
    fn symbol_shape_checked() {
        let g = Grid1D::new(3.0, 8).unwrap();
        assert!(Symbol2D::new(g, g, Array2::zeros((8, 4))).is_err());
        let a = Fn1D::<f64>::zeros(g);
        let b = Fn1D::<f64>::zeros(Grid1D::new(3.0, 16).unwrap());
        assert!(a.add(&b).is_err());
    }

    #[test]
    fn wrap_helpers() {
        let g = Grid1D::<f64>::new(2.0, 8).unwrap();
        assert!((g.wrap(2.5) + 1.5).abs() < 1e-15);
        assert!((g.wrap(-2.0) + 2.0).abs() < 1e-15);
        assert_eq!(g.wrap_index(g.node(3) + 4.0), 3);
    }
}
