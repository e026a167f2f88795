//! Singular values, Schatten norms, and the trace-class certificates.

mod atom;
mod certificate;
mod synthesis;
mod windows;

pub use atom::{build_atom, RankOneAtom};
pub use atom::atom_symbol;
pub use certificate::{
    certify_commutator_bound, certify_hs_identity, certify_schatten_p, certify_trace_bound, hs_prediction, CertKind,
    CertOptions, CertParams, Certificate, ChainRow, HardCheck, HS_TOLERANCE, RECONSTRUCTION_TOLERANCE,
};
pub use synthesis::{corrector_l1, synthesize_piece, Synthesis, DIVISION_FLOOR};
pub use windows::{build_windows, window_floor_check, FloorReport, WindowSet};

use ndarray::{Array2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::check_exponent;
use crate::quantize::OperatorMatrix;
use crate::scalar::{lit, to_f64, Complex, Real};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct SingularSpectrum<T> {
    /// `s_1 ≥ s_2 ≥ … ≥ 0`.
    pub values: Vec<T>,
    pub rows: usize,
    pub cols: usize,
}

impl<T: Real> SingularSpectrum<T> {
    pub fn of(a: &Array2<Complex<T>>) -> Result<Self> {
        let (rows, cols) = a.dim();
        Ok(Self { values: T::dense_singular_values(a)?, rows, cols })
    }

    /// `(Σ s_j^p)^{1/p}`, or `s_1` for `p = ∞`.
    pub fn schatten(&self, p: T) -> Result<T> {
        check_exponent(p)?;
        let s = &self.values;
        if s.is_empty() {
            return Ok(T::zero());
        }
        if p.is_infinite() {
            return Ok(s[0]);
        }
        if p == T::one() {
            return Ok(s.iter().copied().sum());
        }
        // scaled by s_1 to keep large p finite
        let top = s[0];
        if top == T::zero() {
            return Ok(T::zero());
        }
        let sum: T = s.iter().map(|&v| (v / top).powf(p)).sum();
        Ok(top * sum.powf(p.recip()))
    }

    pub fn operator_norm(&self) -> T {
        self.values.first().copied().unwrap_or_else(T::zero)
    }
}

pub fn singular_values<T: Real>(a: &OperatorMatrix<T>) -> Result<SingularSpectrum<T>> {
    SingularSpectrum::of(a.entries())
}

pub fn schatten_norm<T: Real>(a: &OperatorMatrix<T>, p: T) -> Result<T> {
    check_exponent(p)?;
    singular_values(a)?.schatten(p)
}

/// Largest entry of `|XᴴX - I|`.
pub fn orthonormality_defect<T: Real>(x: &Array2<Complex<T>>) -> T {
    let gram = x.t().mapv(|v| v.conj()).dot(x);
    gram.indexed_iter()
        .map(|((i, j), v)| {
            let target = if i == j { T::one() } else { T::zero() };
            (v - Complex::new(target, T::zero())).norm()
        })
        .fold(T::zero(), T::max)
}

/// `(Σ_j |⟨A f_j, g_j⟩|^p)^{1/p}` over paired orthonormal columns of `f` and `g`.
pub fn ons_functional<T: Real>(a: &OperatorMatrix<T>, f: &Array2<Complex<T>>, g: &Array2<Complex<T>>, p: T) -> Result<T> {
    check_exponent(p)?;
    let n = a.dim();
    if f.nrows() != n || g.nrows() != n || f.ncols() != g.ncols() {
        return Err(Error::ShapeMismatch(format!(
            "systems of shape {:?} and {:?} for a {n} x {n} operator",
            f.dim(),
            g.dim()
        )));
    }
    let tol = lit::<T>(1e-10);
    for x in [f, g] {
        let defect = orthonormality_defect(x);
        if !(defect <= tol) {
            return Err(Error::NotOrthonormal(to_f64(defect)));
        }
    }
    let af = a.entries().dot(f);
    let pairings: Vec<T> = af
        .axis_iter(Axis(1))
        .zip(g.axis_iter(Axis(1)))
        .map(|(u, v)| u.iter().zip(v.iter()).map(|(x, y)| x * y.conj()).sum::<Complex<T>>().norm())
        .collect();
    let spectrum = SingularSpectrum { values: pairings, rows: n, cols: n };
    let mut sorted = spectrum.values.clone();
    sorted.sort_by(|x, y| y.partial_cmp(x).unwrap_or(std::cmp::Ordering::Equal));
    SingularSpectrum { values: sorted, ..spectrum }.schatten(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid1D;
    use crate::quantize::Provenance;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_op(n: usize, seed: u64) -> OperatorMatrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e = Array2::from_shape_fn((n, n), |_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        OperatorMatrix::new(Grid1D::new(1.0, n).unwrap(), e, Provenance::Direct).unwrap()
    }

    fn diag(vals: &[f64]) -> OperatorMatrix<f64> {
        let n = vals.len();
        let e = Array2::from_shape_fn((n, n), |(i, j)| Complex::new(if i == j { vals[i] } else { 0.0 }, 0.0));
        OperatorMatrix::new(Grid1D::new(1.0, n).unwrap(), e, Provenance::Direct).unwrap()
    }

    #[test]
    fn diagonal_spectrum() {
        let s = singular_values(&diag(&[3.0, -1.0, 0.0, 0.5])).unwrap();
        let want = [3.0, 1.0, 0.5, 0.0];
        for (a, b) in s.values.iter().zip(want) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn p_two_is_frobenius() {
        let a = random_op(16, 1);
        let s2 = schatten_norm(&a, 2.0).unwrap();
        assert!((s2 - a.frobenius()).abs() / s2 < 1e-12);
        assert!(schatten_norm(&a, 0.5).is_err());
        assert_eq!(schatten_norm(&a, f64::INFINITY).unwrap(), singular_values(&a).unwrap().values[0]);
    }

    #[test]
    fn ons_standard_basis_on_diagonal() {
        let a = diag(&[2.0, -1.0, 0.5, 0.0]);
        let id = Array2::from_shape_fn((4, 4), |(i, j)| Complex::new(if i == j { 1.0 } else { 0.0 }, 0.0));
        let v = ons_functional(&a, &id, &id, 1.0).unwrap();
        assert!((v - 3.5).abs() < 1e-14);
        let mut bad = id.clone();
        bad[[0, 0]] = Complex::new(2.0, 0.0);
        assert!(matches!(ons_functional(&a, &bad, &id, 1.0), Err(Error::NotOrthonormal(_))));
    }

    #[test]
    fn ons_equality_at_singular_vectors() {
        let a = random_op(12, 9);
        let svd = f64::dense_svd(a.entries()).unwrap();
        for p in [1.0, 1.5, 2.0] {
            let v = ons_functional(&a, &svd.v, &svd.u, p).unwrap();
            let s = schatten_norm(&a, p).unwrap();
            assert!((v - s).abs() < 1e-8 * s);
        }
    }
}
