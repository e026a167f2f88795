//! Machine-checkable records of one instance of a trace-class bound.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::synthesis::synthesize_piece;
use super::windows::WindowSet;
use super::{schatten_norm, singular_values};
use crate::covering::Bapu;
use crate::error::{Error, Result};
use crate::grid::Symbol2D;
use crate::quantize::{commutator, quantize_kn, LipschitzFn, OperatorMatrix};
use crate::scalar::{lit, to_f64, Real};
use crate::spaces::{filter_piece_2d, product_alpha_mod_norm, NormSpec, PieceTable, Ratio};

/// Relative tolerance of the discrete Hilbert–Schmidt identity.
pub const HS_TOLERANCE: f64 = 1e-12;
/// Relative Frobenius tolerance of a synthesized piece against direct quantization.
pub const RECONSTRUCTION_TOLERANCE: f64 = 1e-4;
/// Pieces with relative norm below this are left out of the synthesis chain.
const CHAIN_MASS_FLOOR: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertKind {
    Thm1,
    Thm2,
    SchattenP,
    HsIdentity,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct CertParams<T> {
    pub alpha: T,
    pub s1: T,
    pub s2: T,
    pub p: T,
    pub q: T,
    pub grid_half_width: T,
    pub grid_len: usize,
    pub covering_hash: String,
    pub label: String,
}

/// One piece of the synthesis chain `‖A_piece‖_{I₁} ≤ C |Q|^{1/2}|Q'|^{1/2} ‖W‖_{L¹}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct ChainRow<T> {
    pub q_id: usize,
    pub qp_id: usize,
    pub trace_norm: T,
    pub scale_factor: T,
    pub weights_l1: T,
    pub chain_ratio: Option<T>,
    pub reconstruction_error: T,
    pub l1_of_corrector: T,
    pub discarded_mass: T,
}

/// An exact identity checked alongside the inequality.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HardCheck {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl HardCheck {
    fn new(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self { name: name.into(), value, tolerance, pass: value <= tolerance }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Certificate<T> {
    pub kind: CertKind,
    pub lhs: T,
    /// Right-hand side without the unknown constant.
    pub rhs: T,
    pub ratio: Ratio<T>,
    pub params: CertParams<T>,
    /// `None` means the ratio is reported but never fails.
    pub cap: Option<T>,
    pub hard_checks: Vec<HardCheck>,
    pub pass: bool,
    pub chain: Vec<ChainRow<T>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table: Option<PieceTable<T>>,
}

impl<T: Real> Certificate<T> {
    #[allow(clippy::too_many_arguments)]
    fn finish(
        kind: CertKind,
        lhs: T,
        rhs: T,
        params: CertParams<T>,
        cap: Option<T>,
        hard_checks: Vec<HardCheck>,
        chain: Vec<ChainRow<T>>,
        table: Option<PieceTable<T>>,
    ) -> Self {
        let ratio = Ratio::of(lhs, rhs);
        let within_cap = match (cap, ratio.value()) {
            (Some(c), Some(r)) => r <= c,
            _ => true,
        };
        let pass = within_cap && hard_checks.iter().all(|c| c.pass);
        Self { kind, lhs, rhs, ratio, params, cap, hard_checks, pass, chain, table }
    }

    /// Names of the failing hard checks, plus `ratio_cap` when the cap is exceeded.
    pub fn failures(&self) -> Vec<String> {
        let mut out: Vec<String> = self.hard_checks.iter().filter(|c| !c.pass).map(|c| c.name.clone()).collect();
        if let (Some(c), Some(r)) = (self.cap, self.ratio.value()) {
            if r > c {
                out.push("ratio_cap".into());
            }
        }
        out
    }

    /// Largest `|l1_of_corrector|` over the chain divided by the smallest.
    pub fn corrector_spread(&self) -> Option<T> {
        spread(self.chain.iter().map(|r| r.l1_of_corrector))
    }
}

fn spread<T: Real>(vals: impl Iterator<Item = T>) -> Option<T> {
    let (lo, hi) = vals.fold((T::infinity(), T::zero()), |(lo, hi), v| (lo.min(v), hi.max(v)));
    (lo > T::zero() && lo.is_finite()).then(|| hi / lo)
}

#[derive(Clone, Debug, Default)]
pub struct CertOptions<'a, T> {
    pub cap: Option<T>,
    /// Windows for the per-piece synthesis chain; no chain when absent.
    pub chain_windows: Option<&'a WindowSet<T>>,
    pub label: String,
}

fn params<T: Real>(sigma: &Symbol2D<T>, bapu: &Bapu<T>, spec: &NormSpec<T>, label: &str) -> CertParams<T> {
    CertParams {
        alpha: spec.alpha,
        s1: spec.s1,
        s2: spec.s2,
        p: spec.p,
        q: spec.q,
        grid_half_width: sigma.grid_x.half_width(),
        grid_len: sigma.grid_x.len(),
        covering_hash: bapu.covering.content_hash(),
        label: label.to_string(),
    }
}

fn require_spec<T: Real>(spec: &NormSpec<T>, s1: T, s2: T, p: T, what: &str) -> Result<()> {
    let tol = lit::<T>(1e-12);
    let ok = (spec.s1 - s1).abs() <= tol
        && (spec.s2 - s2).abs() <= tol
        && (spec.p - p).abs() <= tol
        && (spec.q - p).abs() <= tol;
    if ok {
        Ok(())
    } else {
        Err(Error::OutOfRange(format!(
            "{what} needs (s1, s2, p, q) = ({}, {}, {}, {}), got ({}, {}, {}, {})",
            to_f64(s1),
            to_f64(s2),
            to_f64(p),
            to_f64(p),
            to_f64(spec.s1),
            to_f64(spec.s2),
            to_f64(spec.p),
            to_f64(spec.q)
        )))
    }
}

/// `N^{-1/2} ‖σ‖_{ℓ²}`, the Frobenius norm forced by Parseval.
pub fn hs_prediction<T: Real>(sigma: &Symbol2D<T>) -> T {
    sigma.values().iter().map(|v| v.norm_sqr()).sum::<T>().sqrt() / lit::<T>(sigma.grid_x.len() as f64).sqrt()
}

fn hs_error<T: Real>(a: &OperatorMatrix<T>, sigma: &Symbol2D<T>) -> f64 {
    let f = a.frobenius();
    let want = hs_prediction(sigma);
    if f == T::zero() && want == T::zero() {
        0.0
    } else {
        to_f64((f - want).abs() / f.max(want))
    }
}

/// Synthesizes every piece with nonnegligible norm and records the chain.
fn synthesis_chain<T: Real>(
    sigma: &Symbol2D<T>,
    bapu_x: &Bapu<T>,
    bapu_xi: &Bapu<T>,
    ws: &WindowSet<T>,
    table: &PieceTable<T>,
) -> Result<Vec<ChainRow<T>>> {
    let top = table.records.iter().map(|r| r.piece_norm).fold(T::zero(), T::max);
    let floor = top * lit(CHAIN_MASS_FLOOR);
    let pairs: Vec<(usize, usize)> = table
        .records
        .iter()
        .filter(|r| r.piece_norm > floor)
        .filter_map(|r| r.qp_id.map(|qp| (r.q_id, qp)))
        .collect();
    pairs
        .par_iter()
        .map(|&(q, qp)| {
            let piece = filter_piece_2d(sigma, bapu_x, bapu_xi, q, qp)?;
            let syn = synthesize_piece(&piece, ws, &bapu_x.covering.pieces[q], &bapu_xi.covering.pieces[qp])?;
            let direct = quantize_kn(&piece)?;
            let diff = syn.matrix.sub(&direct)?.frobenius();
            let reconstruction_error = if direct.frobenius() > T::zero() { diff / direct.frobenius() } else { diff };
            let trace_norm = singular_values(&syn.matrix)?.schatten(T::one())?;
            Ok(ChainRow {
                q_id: q,
                qp_id: qp,
                trace_norm,
                scale_factor: syn.scale_factor,
                weights_l1: syn.weights_l1,
                chain_ratio: syn.chain_ratio(trace_norm),
                reconstruction_error,
                l1_of_corrector: syn.l1_of_corrector,
                discarded_mass: syn.discarded_mass,
            })
        })
        .collect()
}

fn chain_checks<T: Real>(chain: &[ChainRow<T>]) -> Vec<HardCheck> {
    if chain.is_empty() {
        return Vec::new();
    }
    let worst = chain.iter().map(|r| to_f64(r.reconstruction_error)).fold(0.0, f64::max);
    vec![HardCheck::new("synthesis_reconstruction", worst, RECONSTRUCTION_TOLERANCE)]
}

/// `‖σ(X,D)‖_{I₁}` against the product norm with weights `(α/2, α/2)`, `p = q = 1`.
pub fn certify_trace_bound<T: Real>(
    sigma: &Symbol2D<T>,
    bapu_x: &Bapu<T>,
    bapu_xi: &Bapu<T>,
    spec: &NormSpec<T>,
    opts: &CertOptions<'_, T>,
) -> Result<Certificate<T>> {
    let half = spec.alpha / lit(2.0);
    require_spec(spec, half, half, T::one(), "trace bound")?;
    let a = quantize_kn(sigma)?;
    let lhs = schatten_norm(&a, T::one())?;
    let (rhs, table) = product_alpha_mod_norm(sigma, bapu_x, bapu_xi, spec)?;
    let chain = match opts.chain_windows {
        Some(ws) => synthesis_chain(sigma, bapu_x, bapu_xi, ws, &table)?,
        None => Vec::new(),
    };
    let checks = chain_checks(&chain);
    Ok(Certificate::finish(
        CertKind::Thm1,
        lhs,
        rhs,
        params(sigma, bapu_x, spec, &opts.label),
        opts.cap,
        checks,
        chain,
        Some(table),
    ))
}

/// `‖[σ(X,D), a]‖_{I₁}` against `‖∇a‖_∞` times the product norm with weights `(α/2, α+1)`.
pub fn certify_commutator_bound<T: Real>(
    sigma: &Symbol2D<T>,
    a: &LipschitzFn<T>,
    bapu_x: &Bapu<T>,
    bapu_xi: &Bapu<T>,
    spec: &NormSpec<T>,
    opts: &CertOptions<'_, T>,
) -> Result<Certificate<T>> {
    require_spec(spec, spec.alpha / lit(2.0), spec.alpha + T::one(), T::one(), "commutator bound")?;
    let lhs = schatten_norm(&commutator(sigma, a)?, T::one())?;
    let (norm, table) = product_alpha_mod_norm(sigma, bapu_x, bapu_xi, spec)?;
    Ok(Certificate::finish(
        CertKind::Thm2,
        lhs,
        a.grad_sup * norm,
        params(sigma, bapu_x, spec, &opts.label),
        opts.cap,
        Vec::new(),
        Vec::new(),
        Some(table),
    ))
}

/// `‖σ(X,D)‖_{I_p}` against the product norm with weights `α(1/p - 1/2)` and `p = q`.
///
/// At `p = 2` the discrete Hilbert–Schmidt identity is checked as well.
pub fn certify_schatten_p<T: Real>(
    sigma: &Symbol2D<T>,
    p: T,
    bapu_x: &Bapu<T>,
    bapu_xi: &Bapu<T>,
    opts: &CertOptions<'_, T>,
) -> Result<Certificate<T>> {
    if !(p >= T::one() && p <= lit(2.0)) {
        return Err(Error::InvalidExponent(to_f64(p)));
    }
    let alpha = bapu_x.alpha();
    let s = alpha * (p.recip() - lit(0.5));
    let spec = NormSpec::product(s, s, p, p, alpha)?;
    let a = quantize_kn(sigma)?;
    let lhs = schatten_norm(&a, p)?;
    let (rhs, table) = product_alpha_mod_norm(sigma, bapu_x, bapu_xi, &spec)?;
    let mut checks = Vec::new();
    if p == lit(2.0) {
        checks.push(HardCheck::new("hs_identity", hs_error(&a, sigma), HS_TOLERANCE));
    }
    let chain = match (opts.chain_windows, p == T::one()) {
        (Some(ws), true) => synthesis_chain(sigma, bapu_x, bapu_xi, ws, &table)?,
        _ => Vec::new(),
    };
    checks.extend(chain_checks(&chain));
    Ok(Certificate::finish(
        CertKind::SchattenP,
        lhs,
        rhs,
        params(sigma, bapu_x, &spec, &opts.label),
        opts.cap,
        checks,
        chain,
        Some(table),
    ))
}

/// `‖σ(X,D)‖_{Frobenius}` against `N^{-1/2} ‖σ‖_{ℓ²}`.
pub fn certify_hs_identity<T: Real>(sigma: &Symbol2D<T>, label: &str) -> Result<Certificate<T>> {
    let a = quantize_kn(sigma)?;
    let err = hs_error(&a, sigma);
    let two = lit::<T>(2.0);
    let params = CertParams {
        alpha: T::zero(),
        s1: T::zero(),
        s2: T::zero(),
        p: two,
        q: two,
        grid_half_width: sigma.grid_x.half_width(),
        grid_len: sigma.grid_x.len(),
        covering_hash: String::new(),
        label: label.to_string(),
    };
    Ok(Certificate::finish(
        CertKind::HsIdentity,
        a.frobenius(),
        hs_prediction(sigma),
        params,
        None,
        vec![HardCheck::new("hs_identity", err, HS_TOLERANCE)],
        Vec::new(),
        None,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covering::{build_bapu, build_covering};
    use crate::grid::Grid1D;
    use crate::scalar::Complex;
    use crate::smooth::radial_plateau;

    fn setup(alpha: f64) -> (Grid1D<f64>, Bapu<f64>, Bapu<f64>) {
        let grid = Grid1D::new(3.0 * std::f64::consts::PI, 64).unwrap();
        let cov = build_covering(alpha, 5.0, 1.0, 1.0).unwrap();
        let bx = build_bapu(&cov, grid, 0.25).unwrap();
        let bxi = build_bapu(&cov, grid.dual(), 0.25).unwrap();
        (grid, bx, bxi)
    }

    fn gaussian(grid: Grid1D<f64>) -> Symbol2D<f64> {
        Symbol2D::on_phase_plane(grid, |x, xi| Complex::new((-(x * x + xi * xi) / 2.0).exp(), 0.0))
    }

    #[test]
    fn zero_symbol_has_sentinel_ratio() {
        let (grid, bx, bxi) = setup(0.5);
        let spec = NormSpec::product(0.25, 0.25, 1.0, 1.0, 0.5).unwrap();
        let c = certify_trace_bound(&Symbol2D::zeros(grid, grid.dual()), &bx, &bxi, &spec, &CertOptions::default())
            .unwrap();
        assert_eq!(c.lhs, 0.0);
        assert_eq!(c.rhs, 0.0);
        assert_eq!(c.ratio, Ratio::Undefined);
        assert!(c.pass);
    }

    #[test]
    fn multiplier_trace_norm_is_sum_of_values() {
        let (grid, bx, bxi) = setup(0.0);
        let m = |xi: f64| radial_plateau(xi, 1.0, 3.0);
        let sigma = Symbol2D::on_phase_plane(grid, |_, xi| Complex::new(m(xi), 0.0));
        let spec = NormSpec::product(0.0, 0.0, 1.0, 1.0, 0.0).unwrap();
        let c = certify_trace_bound(&sigma, &bx, &bxi, &spec, &CertOptions::default()).unwrap();
        let want: f64 = grid.dual_nodes().into_iter().map(|x| m(x).abs()).sum();
        assert!((c.lhs - want).abs() < 1e-10 * want);
        assert!(c.ratio.value().unwrap().is_finite());
    }

    #[test]
    fn wrong_spec_rejected() {
        let (grid, bx, bxi) = setup(0.5);
        let spec = NormSpec::product(0.0, 0.0, 1.0, 1.0, 0.5).unwrap();
        assert!(certify_trace_bound(&gaussian(grid), &bx, &bxi, &spec, &CertOptions::default()).is_err());
    }

    #[test]
    fn schatten_two_checks_hs() {
        let (grid, bx, bxi) = setup(0.5);
        let c = certify_schatten_p(&gaussian(grid), 2.0, &bx, &bxi, &CertOptions::default()).unwrap();
        assert!(c.pass, "{:?}", c.hard_checks);
        assert!(certify_schatten_p(&gaussian(grid), 2.5, &bx, &bxi, &CertOptions::default()).is_err());
    }

    #[test]
    fn schatten_one_matches_trace_bound() {
        let (grid, bx, bxi) = setup(1.0);
        let spec = NormSpec::product(0.5, 0.5, 1.0, 1.0, 1.0).unwrap();
        let a = certify_trace_bound(&gaussian(grid), &bx, &bxi, &spec, &CertOptions::default()).unwrap();
        let b = certify_schatten_p(&gaussian(grid), 1.0, &bx, &bxi, &CertOptions::default()).unwrap();
        assert_eq!(a.lhs, b.lhs);
        assert_eq!(a.rhs, b.rhs);
    }

    #[test]
    fn commutator_with_constant() {
        let (grid, bx, bxi) = setup(0.0);
        let a = LipschitzFn::from_fn(grid, |_| 2.0).unwrap();
        let spec = NormSpec::product(0.0, 1.0, 1.0, 1.0, 0.0).unwrap();
        let c = certify_commutator_bound(&gaussian(grid), &a, &bx, &bxi, &spec, &CertOptions::default()).unwrap();
        assert_eq!(c.lhs, 0.0);
        assert!(c.pass);
    }
}
