//! Rank-one synthesis atoms `Φ_{Q,Q'}(X - y, D - η)`.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::windows::WindowSet;
use crate::covering::Piece;
use crate::error::Result;
use crate::grid::{Dft, Direction, Fn1D, Grid1D, Symbol2D};
use crate::quantize::{OperatorMatrix, Provenance};
use crate::scalar::{cis, lit, Complex, Real};

/// `x` shifted into `[-L, L)` along whole grid steps, so node differences
/// land exactly on nodes.
pub(crate) fn periodic_offset<T: Real>(grid: &Grid1D<T>, x: T) -> T {
    let h = grid.spacing();
    let n = grid.len() as i64;
    let k = (x / h).round();
    let frac = x - k * h;
    let idx = (k.to_i64().unwrap_or(0) + n / 2).rem_euclid(n) - n / 2;
    lit::<T>(idx as f64) * h + frac
}

/// Spatial factor `u(x) = R e^{i d x} φ₁(R x)`.
pub(crate) fn left_factor<T: Real>(ws: &WindowSet<T>, q: &Piece<T>, x: T) -> Complex<T> {
    cis(q.d_outer * x).scale(q.r_outer * ws.phi1_at(q.r_outer * x))
}

/// Frequency factor `c(ξ) = R' e^{i d' ξ} φ̂₂(R' ξ)`.
pub(crate) fn right_factor<T: Real>(ws: &WindowSet<T>, qp: &Piece<T>, xi: T) -> Complex<T> {
    cis(qp.d_outer * xi).scale(qp.r_outer * ws.phi2_hat_at(qp.r_outer * xi))
}

/// Unshifted atom `Φ(x, ξ) = u(x) c(ξ) e^{-ixξ}` sampled on `grid × grid.dual()`.
pub fn atom_symbol<T: Real>(ws: &WindowSet<T>, q: &Piece<T>, qp: &Piece<T>, grid: Grid1D<T>) -> Symbol2D<T> {
    Symbol2D::on_phase_plane(grid, |x, xi| left_factor(ws, q, x) * right_factor(ws, qp, xi) * cis(-x * xi))
}

/// `Φ_{Q,Q'}(X - y, D - η)` as `h · left ⊗ conj(right)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct RankOneAtom<T> {
    pub q_id: usize,
    pub qp_id: usize,
    pub y: T,
    pub eta: T,
    pub left: Fn1D<T>,
    pub right: Fn1D<T>,
    pub r: T,
    pub r_prime: T,
    pub d: T,
    pub d_prime: T,
}

impl<T: Real> RankOneAtom<T> {
    pub fn matrix(&self) -> OperatorMatrix<T> {
        let h = self.left.grid.spacing();
        let f = self.left.values();
        let g = self.right.values();
        let e = Array2::from_shape_fn((f.len(), g.len()), |(j, k)| f[j] * g[k].conj().scale(h));
        OperatorMatrix::new(self.left.grid, e, Provenance::Synthesized).expect("square by construction")
    }

    /// `h ‖left‖ ‖right‖`, exact for a rank-one matrix.
    pub fn trace_norm(&self) -> T {
        let norm = |v: &[Complex<T>]| v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        self.left.grid.spacing() * norm(self.left.values()) * norm(self.right.values())
    }

    /// `|Q|^{1/2} |Q'|^{1/2}` with `|Q| = 2R`.
    pub fn scale_factor(&self) -> T {
        (lit::<T>(4.0) * self.r * self.r_prime).sqrt()
    }

    /// The shifted atom sampled as a symbol, for comparison with the matrix.
    pub fn symbol(&self, ws: &WindowSet<T>, q: &Piece<T>, qp: &Piece<T>) -> Symbol2D<T> {
        let grid = self.left.grid;
        let dual = grid.dual();
        let (y, eta) = (self.y, self.eta);
        Symbol2D::on_phase_plane(grid, |x, xi| {
            left_factor(ws, q, periodic_offset(&grid, x - y))
                * right_factor(ws, qp, periodic_offset(&dual, xi - eta))
                * cis(-(x - y) * (xi - eta))
        })
    }
}

/// Left vector `e^{-iyη} e^{iηx} u(x - y)` of the shifted atom.
pub(crate) fn shifted_left<T: Real>(ws: &WindowSet<T>, q: &Piece<T>, grid: &Grid1D<T>, y: T, eta: T) -> Vec<Complex<T>> {
    let phase = cis(-y * eta);
    grid.nodes()
        .into_iter()
        .map(|x| phase * cis(eta * x) * left_factor(ws, q, periodic_offset(grid, x - y)))
        .collect()
}

/// Transform of the right vector, `conj(c(ξ - η)) e^{-iyξ}`, on the dual grid.
pub(crate) fn shifted_right_hat<T: Real>(
    ws: &WindowSet<T>,
    qp: &Piece<T>,
    grid: &Grid1D<T>,
    y: T,
    eta: T,
) -> Vec<Complex<T>> {
    let dual = grid.dual();
    dual.nodes()
        .into_iter()
        .map(|xi| right_factor(ws, qp, periodic_offset(&dual, xi - eta)).conj() * cis(-y * xi))
        .collect()
}

pub fn build_atom<T: Real>(
    ws: &WindowSet<T>,
    q: &Piece<T>,
    qp: &Piece<T>,
    y: T,
    eta: T,
    grid: Grid1D<T>,
) -> Result<RankOneAtom<T>> {
    let left = Fn1D::new(grid, shifted_left(ws, q, &grid, y, eta))?;
    let mut right = shifted_right_hat(ws, qp, &grid, y, eta);
    Dft::new(grid.len()).apply(&mut right, Direction::Inverse, grid.dual_spacing());
    Ok(RankOneAtom {
        q_id: q.id,
        qp_id: qp.id,
        y,
        eta,
        left,
        right: Fn1D::new(grid, right)?,
        r: q.r_outer,
        r_prime: qp.r_outer,
        d: q.d_outer,
        d_prime: qp.d_outer,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covering::build_covering;
    use crate::quantize::quantize_kn;
    use crate::schatten::{build_windows, singular_values};

    #[test]
    fn offset_lands_on_nodes() {
        let g = Grid1D::<f64>::new(4.0, 16).unwrap();
        for j in 0..16 {
            for a in 0..16 {
                let off = periodic_offset(&g, g.node(j) - g.node(a));
                let idx = (j + 16 - a + 8) % 16;
                assert!((off - g.node(idx)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn matrix_matches_quantized_symbol() {
        let cov = build_covering(0.0, 6.0, 1.0, 1.0).unwrap();
        let grid = Grid1D::<f64>::new(16.0, 128).unwrap();
        let ws = build_windows(&cov, grid).unwrap();
        let (q, qp) = (&cov.pieces[4], &cov.pieces[7]);
        for (y, eta) in [(0.0, 0.0), (grid.node(70), grid.dual_node(60)), (1.3, -0.7)] {
            let atom = build_atom(&ws, q, qp, y, eta, grid).unwrap();
            let m = atom.matrix();
            let direct = quantize_kn(&atom.symbol(&ws, q, qp)).unwrap();
            let rel = m.sub(&direct).unwrap().frobenius() / direct.frobenius();
            assert!(rel < 1e-10, "{rel}");
            let s = singular_values(&m).unwrap();
            assert!(s.values[1] <= 1e-10 * s.values[0]);
            assert!((s.values[0] - atom.trace_norm()).abs() < 1e-10 * s.values[0]);
        }
    }
}
