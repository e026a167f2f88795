//! Superposition of rank-one atoms reproducing a localized piece.
//!
//! With `P̂` the transform of the piece and `φ` the transform of the sampled
//! atom, the weights `W = F⁻¹(γ_{Q,Q'} P̂ / φ)` satisfy `W ⊛ Φ = piece` for the
//! periodic convolution on the phase plane, because `γ_{Q,Q'} = 1` on the
//! support of `P̂`. Quantization is linear, so the piece operator is the
//! weighted sum of the quantized shifted atoms.

use ndarray::{Array2, Axis, Zip};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::atom::{atom_symbol, periodic_offset, shifted_left, shifted_right_hat};
use super::windows::WindowSet;
use crate::covering::Piece;
use crate::error::{Error, Result};
use crate::grid::{dft2d, Dft, Direction, Grid1D, Symbol2D};
use crate::quantize::{OperatorMatrix, Provenance};
use crate::scalar::{lit, to_f64, Complex, Real};

/// Smallest admissible `|φ|` on the support of `γ_{Q,Q'}`.
pub const DIVISION_FLOOR: f64 = 1e-6;
/// Relative spectral energy a piece may carry outside `Q × Q'`.
pub const LOCALIZATION_TOLERANCE: f64 = 1e-8;
/// Weights below this fraction of the largest one are dropped.
pub const WEIGHT_CUTOFF: f64 = 1e-12;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Synthesis<T> {
    pub q_id: usize,
    pub qp_id: usize,
    pub matrix: OperatorMatrix<T>,
    /// `W` on the phase plane.
    pub weights: Symbol2D<T>,
    /// `‖F⁻¹(γ_{Q,Q'}/φ)‖_{L¹}`.
    pub l1_of_corrector: T,
    /// `‖W‖_{L¹}` with Riemann weights.
    pub weights_l1: T,
    /// Smallest `|φ|` met on the support of `γ_{Q,Q'}`.
    pub min_division: T,
    pub kept_terms: usize,
    /// Fraction of `‖W‖_{L¹}` dropped by the cutoff.
    pub discarded_mass: T,
    /// `|Q|^{1/2} |Q'|^{1/2}`.
    pub scale_factor: T,
}

impl<T: Real> Synthesis<T> {
    /// `‖matrix‖_{I₁} / (|Q|^{1/2} |Q'|^{1/2} ‖W‖_{L¹})`, given the trace norm.
    pub fn chain_ratio(&self, trace_norm: T) -> Option<T> {
        let denom = self.scale_factor * self.weights_l1;
        (denom > T::zero()).then(|| trace_norm / denom)
    }
}

fn localization_defect<T: Real>(p_hat: &Symbol2D<T>, q: &Piece<T>, qp: &Piece<T>) -> T {
    let ys = p_hat.grid_x.nodes();
    let etas = p_hat.grid_xi.nodes();
    let mut total = T::zero();
    let mut outside = T::zero();
    for ((a, b), v) in p_hat.values().indexed_iter() {
        let e = v.norm_sqr();
        total = total + e;
        let inside = ys[a] >= q.lo && ys[a] <= q.hi && etas[b] >= qp.lo && etas[b] <= qp.hi;
        if !inside {
            outside = outside + e;
        }
    }
    if total > T::zero() {
        outside / total
    } else {
        T::zero()
    }
}

/// `γ((y - d)/R) γ((η - d')/R')` on the transform plane, with offsets taken periodically.
fn corrector_cutoff<T: Real>(ws: &WindowSet<T>, p_hat: &Symbol2D<T>, q: &Piece<T>, qp: &Piece<T>) -> Array2<T> {
    let gy: Vec<T> = p_hat
        .grid_x
        .nodes()
        .into_iter()
        .map(|y| ws.gamma_at(periodic_offset(&p_hat.grid_x, y - q.d_outer) / q.r_outer))
        .collect();
    let ge: Vec<T> = p_hat
        .grid_xi
        .nodes()
        .into_iter()
        .map(|e| ws.gamma_at(periodic_offset(&p_hat.grid_xi, e - qp.d_outer) / qp.r_outer))
        .collect();
    Array2::from_shape_fn(p_hat.values().dim(), |(a, b)| gy[a] * ge[b])
}

struct Corrector<T> {
    /// `γ_{Q,Q'}/φ` on the transform plane, zero off the support of `γ_{Q,Q'}`.
    ratio: Array2<Complex<T>>,
    min_division: T,
    l1: T,
}

fn corrector<T: Real>(ws: &WindowSet<T>, q: &Piece<T>, qp: &Piece<T>, grid: Grid1D<T>) -> Result<Corrector<T>> {
    let n = grid.len();
    let phi = dft2d(&atom_symbol(ws, q, qp, grid), Direction::Forward);
    let cutoff = corrector_cutoff(ws, &phi, q, qp);
    let mut ratio = Array2::from_elem((n, n), Complex::new(T::zero(), T::zero()));
    let mut min_division = T::infinity();
    for ((ab, &g), &p) in cutoff.indexed_iter().zip(phi.values().iter()) {
        if g > T::zero() {
            min_division = min_division.min(p.norm());
            ratio[ab] = Complex::new(g, T::zero()) / p;
        }
    }
    if min_division < lit(DIVISION_FLOOR) {
        return Err(Error::DivisionFloor { value: to_f64(min_division), floor: DIVISION_FLOOR });
    }
    let k = dft2d(&Symbol2D::new(phi.grid_x, phi.grid_xi, ratio.clone())?, Direction::Inverse);
    let l1 = k.values().iter().map(|v| v.norm()).sum::<T>() * k.cell_weight();
    Ok(Corrector { ratio, min_division, l1 })
}

/// `‖F⁻¹(γ_{Q,Q'}/φ)‖_{L¹}` on `grid`; independent of the symbol being synthesized.
pub fn corrector_l1<T: Real>(ws: &WindowSet<T>, q: &Piece<T>, qp: &Piece<T>, grid: Grid1D<T>) -> Result<T> {
    Ok(corrector(ws, q, qp, grid)?.l1)
}

pub fn synthesize_piece<T: Real>(
    piece: &Symbol2D<T>,
    ws: &WindowSet<T>,
    q: &Piece<T>,
    qp: &Piece<T>,
) -> Result<Synthesis<T>> {
    let grid = piece.grid_x;
    if !grid.dual().matches(&piece.grid_xi) {
        return Err(Error::ShapeMismatch("piece is not sampled on a phase plane".into()));
    }
    let n = grid.len();
    let zero = Complex::new(T::zero(), T::zero());
    let p_hat = dft2d(piece, Direction::Forward);
    let defect = localization_defect(&p_hat, q, qp);
    if defect > lit(LOCALIZATION_TOLERANCE) {
        return Err(Error::PieceNotLocalized(to_f64(defect)));
    }

    let Corrector { mut ratio, min_division, l1: l1_of_corrector } = corrector(ws, q, qp, grid)?;
    let cell = piece.cell_weight();

    Zip::from(&mut ratio).and(p_hat.values()).for_each(|r, &p| *r = *r * p);
    let weights = dft2d(&Symbol2D::new(p_hat.grid_x, p_hat.grid_xi, ratio)?, Direction::Inverse);
    let w = weights.values();
    let weights_l1 = w.iter().map(|v| v.norm()).sum::<T>() * cell;
    let w_max = w.iter().map(|v| v.norm()).fold(T::zero(), T::max);
    let cut = w_max * lit(WEIGHT_CUTOFF);

    let xs = grid.nodes();
    let xis = grid.dual_nodes();
    let shifts: Vec<(usize, usize)> = w
        .indexed_iter()
        .filter(|(_, v)| v.norm() > cut && w_max > T::zero())
        .map(|(ab, _)| ab)
        .collect();
    let dropped: T = w.iter().filter(|v| !(v.norm() > cut)).map(|v| v.norm()).sum::<T>() * cell;
    let discarded_mass = if weights_l1 > T::zero() { dropped / weights_l1 } else { T::zero() };

    // columns of `lefts` are weighted left vectors, columns of `rights` the right vectors
    let k = shifts.len();
    let h = grid.spacing();
    let mut lefts = Array2::from_elem((n, k), zero);
    let mut rights_hat = Array2::from_elem((k, n), zero);
    lefts
        .axis_iter_mut(Axis(1))
        .into_par_iter()
        .zip(rights_hat.axis_iter_mut(Axis(0)).into_par_iter())
        .zip(shifts.par_iter())
        .for_each(|((mut col, mut row), &(a, b))| {
            let (y, eta) = (xs[a], xis[b]);
            let c = w[[a, b]].scale(cell * h);
            for (d, v) in col.iter_mut().zip(shifted_left(ws, q, &grid, y, eta)) {
                *d = v * c;
            }
            for (d, v) in row.iter_mut().zip(shifted_right_hat(ws, qp, &grid, y, eta)) {
                *d = v;
            }
        });
    Dft::new(n).apply_rows(&mut rights_hat, Direction::Inverse, grid.dual_spacing());
    let entries = lefts.dot(&rights_hat.mapv(|v| v.conj()));

    Ok(Synthesis {
        q_id: q.id,
        qp_id: qp.id,
        matrix: OperatorMatrix::new(grid, entries, Provenance::Synthesized)?,
        weights,
        l1_of_corrector,
        weights_l1,
        min_division,
        kept_terms: k,
        discarded_mass,
        scale_factor: (q.measure * qp.measure).sqrt(),
    })
}
