//! Kohn–Nirenberg quantization on the periodized line.
//!
//! A symbol sampled on `grid × grid.dual()` becomes the matrix
//!
//! `A[j, k] = (1/N) Σ_m σ[j, m] e^{i (x_j - x_k) ξ_m}`,
//!
//! which is the discrete composition `f ↦ F⁻¹[σ(x_j, ·) F f](x_j)`. The
//! `1/N` comes from `h · h_ξ / 2π`.

use std::fmt::Write as _;

use ndarray::{Array2, Axis, Zip};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{dft1d, require_same_grid, Dft, Direction, Fn1D, Grid1D, Symbol2D};
use crate::scalar::{cis, lit, to_f64, Complex, Real};
use crate::smooth::radial_plateau;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Direct,
    Synthesized,
    Commutator,
}

/// Dense matrix acting on the samples of functions on `grid`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct OperatorMatrix<T> {
    pub grid: Grid1D<T>,
    entries: Array2<Complex<T>>,
    pub provenance: Provenance,
}

impl<T: Real> OperatorMatrix<T> {
    pub fn new(grid: Grid1D<T>, entries: Array2<Complex<T>>, provenance: Provenance) -> Result<Self> {
        let n = grid.len();
        if entries.dim() != (n, n) {
            return Err(Error::ShapeMismatch(format!("matrix {:?} for a grid of {n} nodes", entries.dim())));
        }
        Ok(Self { grid, entries, provenance })
    }

    pub fn zeros(grid: Grid1D<T>, provenance: Provenance) -> Self {
        let n = grid.len();
        Self { grid, entries: Array2::from_elem((n, n), Complex::new(T::zero(), T::zero())), provenance }
    }

    pub fn entries(&self) -> &Array2<Complex<T>> {
        &self.entries
    }

    pub fn entries_mut(&mut self) -> &mut Array2<Complex<T>> {
        &mut self.entries
    }

    pub fn into_entries(self) -> Array2<Complex<T>> {
        self.entries
    }

    pub fn dim(&self) -> usize {
        self.grid.len()
    }

    pub fn frobenius(&self) -> T {
        self.entries.iter().map(|v| v.norm_sqr()).sum::<T>().sqrt()
    }

    pub fn apply(&self, f: &Fn1D<T>) -> Result<Fn1D<T>> {
        require_same_grid(&self.grid, &f.grid, "OperatorMatrix::apply")?;
        let v = ndarray::ArrayView1::from(f.values());
        Fn1D::new(self.grid, self.entries.dot(&v).to_vec())
    }

    pub fn adjoint(&self) -> Self {
        let entries = self.entries.t().mapv(|v| v.conj());
        Self { grid: self.grid, entries, provenance: self.provenance }
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        require_same_grid(&self.grid, &other.grid, "OperatorMatrix::matmul")?;
        Ok(Self { grid: self.grid, entries: self.entries.dot(&other.entries), provenance: self.provenance })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        require_same_grid(&self.grid, &other.grid, "OperatorMatrix::add")?;
        Ok(Self { grid: self.grid, entries: &self.entries + &other.entries, provenance: self.provenance })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        require_same_grid(&self.grid, &other.grid, "OperatorMatrix::sub")?;
        Ok(Self { grid: self.grid, entries: &self.entries - &other.entries, provenance: self.provenance })
    }

    pub fn scale(&self, c: Complex<T>) -> Self {
        Self { grid: self.grid, entries: self.entries.mapv(|v| v * c), provenance: self.provenance }
    }

    /// Row-major CSV, one matrix row per line, `re,im` pairs interleaved.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for row in self.entries.rows() {
            let mut first = true;
            for v in row {
                if !first {
                    out.push(',');
                }
                first = false;
                let _ = write!(out, "{:.17e},{:.17e}", to_f64(v.re), to_f64(v.im));
            }
            out.push('\n');
        }
        out
    }

    /// Row-major little-endian `f64` dump, `re, im` interleaved.
    pub fn to_le_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.entries.len() * 16);
        for v in self.entries.iter() {
            out.extend_from_slice(&to_f64(v.re).to_le_bytes());
            out.extend_from_slice(&to_f64(v.im).to_le_bytes());
        }
        out
    }

    /// Inverse of [`to_le_bytes`](Self::to_le_bytes).
    pub fn from_le_bytes(grid: Grid1D<T>, bytes: &[u8], provenance: Provenance) -> Result<Self> {
        let n = grid.len();
        if bytes.len() != n * n * 16 {
            return Err(Error::ShapeMismatch(format!("{} bytes for a {n} x {n} matrix", bytes.len())));
        }
        let vals: Vec<Complex<T>> = bytes
            .chunks_exact(16)
            .map(|c| {
                let re = f64::from_le_bytes(c[..8].try_into().unwrap());
                let im = f64::from_le_bytes(c[8..].try_into().unwrap());
                Complex::new(lit(re), lit(im))
            })
            .collect();
        let entries = Array2::from_shape_vec((n, n), vals).expect("length checked");
        Self::new(grid, entries, provenance)
    }
}

fn require_phase_plane<T: Real>(sigma: &Symbol2D<T>) -> Result<()> {
    require_same_grid(&sigma.grid_x.dual(), &sigma.grid_xi, "symbol frequency grid")
}

/// `σ ↦ σ(X, D)` as a dense matrix.
pub fn quantize_kn<T: Real>(sigma: &Symbol2D<T>) -> Result<OperatorMatrix<T>> {
    require_phase_plane(sigma)?;
    let grid = sigma.grid_x;
    let n = grid.len();
    let xs = grid.nodes();
    let xis = grid.dual_nodes();
    let mut rows = sigma.values().as_standard_layout().into_owned();
    // row j: c_m = σ[j,m] e^{i x_j ξ_m}, then A[j,k] = (1/N) Σ_m c_m e^{-i x_k ξ_m}
    rows.axis_iter_mut(Axis(0)).into_par_iter().enumerate().for_each(|(j, mut row)| {
        for (m, v) in row.iter_mut().enumerate() {
            *v = *v * cis(xs[j] * xis[m]);
        }
    });
    Dft::new(n).apply_rows(&mut rows, Direction::Forward, lit::<T>(n as f64).recip());
    OperatorMatrix::new(grid, rows, Provenance::Direct)
}

/// `R_{Q,Q'}(f, g)(x, ξ) = f(x) conj(ĝ(ξ)) e^{-i (x / r) (ξ / r')}`.
pub fn rihaczek_mod<T: Real>(f: &Fn1D<T>, g: &Fn1D<T>, r: T, r_prime: T) -> Result<Symbol2D<T>> {
    if !(r > T::zero()) || !(r_prime > T::zero()) {
        return Err(Error::OutOfRange(format!(
            "scales must be positive, got {} and {}",
            to_f64(r),
            to_f64(r_prime)
        )));
    }
    require_same_grid(&f.grid, &g.grid, "rihaczek")?;
    let g_hat = dft1d(g, Direction::Forward);
    let xs = f.grid.nodes();
    let xis = g_hat.grid.nodes();
    let fv = f.values();
    let gv = g_hat.values();
    let values = Array2::from_shape_fn((xs.len(), xis.len()), |(j, m)| {
        fv[j] * gv[m].conj() * cis(-((xs[j] / r) * (xis[m] / r_prime)))
    });
    Symbol2D::new(f.grid, g_hat.grid, values)
}

/// `R(f, g)(x, ξ) = f(x) conj(ĝ(ξ)) e^{-i x ξ}`.
pub fn rihaczek<T: Real>(f: &Fn1D<T>, g: &Fn1D<T>) -> Result<Symbol2D<T>> {
    rihaczek_mod(f, g, T::one(), T::one())
}

/// Real-valued Lipschitz function with measured constants.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct LipschitzFn<T> {
    pub samples: Fn1D<T>,
    /// Largest difference quotient over adjacent nodes, seam pair included.
    pub lip_const: T,
    /// Largest forward difference quotient away from the seam.
    pub grad_sup: T,
}

impl<T: Real> LipschitzFn<T> {
    pub fn new(samples: Fn1D<T>) -> Result<Self> {
        let v = samples.values();
        if v.iter().any(|z| z.im != T::zero()) {
            return Err(Error::OutOfRange("Lipschitz samples must be real".into()));
        }
        if v.iter().any(|z| !z.re.is_finite()) {
            return Err(Error::NonFinite("Lipschitz samples"));
        }
        let h = samples.grid.spacing();
        let n = v.len();
        let grad_sup = (0..n - 1).map(|j| (v[j + 1].re - v[j].re).abs() / h).fold(T::zero(), T::max);
        let lip_const = grad_sup.max((v[0].re - v[n - 1].re).abs() / h);
        Ok(Self { samples, lip_const, grad_sup })
    }

    pub fn from_fn(grid: Grid1D<T>, a: impl Fn(T) -> T) -> Result<Self> {
        Self::new(Fn1D::from_real_fn(grid, a))
    }

    pub fn value_at_origin(&self) -> T {
        self.samples.values()[self.samples.grid.len() / 2].re
    }

    /// Admissible mollification range `ε(a)`.
    pub fn eps_max(&self) -> T {
        let a0 = self.value_at_origin().abs();
        if a0 == T::zero() {
            T::one()
        } else {
            (self.grad_sup / a0).min(T::one())
        }
    }
}

/// Flat-top bump with `φ(0) = 1`, `∫φ = 1` and support in `[-3/4, 3/4]`.
pub fn mollifier_bump<T: Real>(x: T) -> T {
    radial_plateau(x, lit(0.25), lit(0.75))
}

/// `a_ε(x) = φ(εx) (φ_ε ∗ a)(x)` with `φ_ε(x) = ε⁻¹ φ(x/ε)`.
///
/// The convolution is a periodic direct sum; the sampled kernel is
/// rescaled to unit Riemann mass so that constants and affine functions are
/// reproduced exactly where `φ(εx) = 1`.
pub fn mollify_lipschitz<T: Real>(a: &LipschitzFn<T>, eps: T) -> Result<Fn1D<T>> {
    let eps_max = a.eps_max();
    if !(eps > T::zero() && eps <= eps_max) {
        return Err(Error::OutOfRange(format!(
            "eps = {} outside (0, {}]",
            to_f64(eps),
            to_f64(eps_max)
        )));
    }
    let grid = a.samples.grid;
    let n = grid.len() as isize;
    let h = grid.spacing();
    let reach = (lit::<T>(0.75) * eps / h).floor().to_isize().unwrap_or(0).min(n / 2 - 1);
    let mut kernel: Vec<T> = (-reach..=reach)
        .map(|d| mollifier_bump(lit::<T>(d as f64) * h / eps) / eps)
        .collect();
    let mass: T = kernel.iter().copied().sum::<T>() * h;
    kernel.iter_mut().for_each(|k| *k = *k / mass);
    let v = a.samples.values();
    let xs = grid.nodes();
    let values = (0..n)
        .map(|j| {
            let conv: T = (-reach..=reach)
                .zip(&kernel)
                .map(|(d, &k)| k * v[(j - d).rem_euclid(n) as usize].re)
                .sum::<T>()
                * h;
            Complex::new(mollifier_bump(eps * xs[j as usize]) * conv, T::zero())
        })
        .collect();
    Fn1D::new(grid, values)
}

/// `[σ(X,D), a] = A·diag(a) - diag(a)·A`.
pub fn commutator<T: Real>(sigma: &Symbol2D<T>, a: &LipschitzFn<T>) -> Result<OperatorMatrix<T>> {
    require_same_grid(&sigma.grid_x, &a.samples.grid, "commutator")?;
    let mut m = quantize_kn(sigma)?;
    commute_in_place(&mut m, a.samples.values());
    m.provenance = Provenance::Commutator;
    Ok(m)
}

pub(crate) fn commute_in_place<T: Real>(m: &mut OperatorMatrix<T>, a: &[Complex<T>]) {
    Zip::indexed(m.entries_mut()).par_for_each(|(j, k), v| *v = *v * (a[k] - a[j]));
}
