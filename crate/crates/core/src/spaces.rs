//! Covering norms: α-modulation norms on the line and on the phase plane,
//! the weighted `L²_s` / `H^s` norms, and ratio probes between them.

use std::fmt::Write as _;

use ndarray::Axis;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::covering::{bracket, build_bapu, build_covering, dyadic_preset, Bapu};
use crate::error::{Error, Result};
use crate::grid::{
    check_exponent, dft1d, dft2d, dft_first, dft_second, require_same_grid, Direction, Fn1D, Grid1D, Symbol2D,
};
use crate::scalar::{lit, to_f64, Complex, Real};

/// Fraction of spectral `L²` energy above which a norm computation warns.
pub const LEAKAGE_WARN: f64 = 0.01;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct NormSpec<T> {
    /// Weight exponent on the first (or only) variable.
    pub s1: T,
    /// Weight exponent on the second variable; ignored on the line.
    pub s2: T,
    pub p: T,
    pub q: T,
    pub alpha: T,
}

impl<T: Real> NormSpec<T> {
    pub fn scalar(s: T, p: T, q: T, alpha: T) -> Result<Self> {
        Self::product(s, T::zero(), p, q, alpha)
    }

    pub fn product(s1: T, s2: T, p: T, q: T, alpha: T) -> Result<Self> {
        check_exponent(p)?;
        check_exponent(q)?;
        Ok(Self { s1, s2, p, q, alpha })
    }

    fn check_alpha(&self, bapu: &Bapu<T>) -> Result<()> {
        if (self.alpha - bapu.alpha()).abs() > lit(1e-12) {
            return Err(Error::AlphaMismatch { covering: to_f64(bapu.alpha()), spec: to_f64(self.alpha) });
        }
        Ok(())
    }

    /// `(weight · norm)` raised to the outer exponent, or left alone for `q = ∞`.
    fn contribution(&self, weighted: T) -> T {
        if self.q.is_infinite() || self.q == T::one() {
            weighted
        } else {
            weighted.powf(self.q)
        }
    }

    fn aggregate(&self, contributions: impl Iterator<Item = T>) -> T {
        if self.q.is_infinite() {
            contributions.fold(T::zero(), T::max)
        } else if self.q == T::one() {
            contributions.sum()
        } else {
            contributions.sum::<T>().powf(self.q.recip())
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct PieceRecord<T> {
    pub q_id: usize,
    /// Second piece for phase-plane norms.
    pub qp_id: Option<usize>,
    pub weight: T,
    pub piece_norm: T,
    pub contribution: T,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct PieceTable<T> {
    pub spec: NormSpec<T>,
    pub records: Vec<PieceRecord<T>>,
    pub total: T,
    /// Share of the spectral `L²` energy lying outside the covered band.
    pub leakage: T,
}

impl<T: Real> PieceTable<T> {
    /// CSV with columns `Qid,Q'id,weight,pieceNorm,contribution`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("Qid,Q'id,weight,pieceNorm,contribution\n");
        for r in &self.records {
            let qp = r.qp_id.map(|v| v.to_string()).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{:.17e},{:.17e},{:.17e}",
                r.q_id,
                qp,
                to_f64(r.weight),
                to_f64(r.piece_norm),
                to_f64(r.contribution)
            );
        }
        out
    }
}

/// `ψ_Q(D) f = F⁻¹[ψ_Q f̂]`.
pub fn filter_piece_1d<T: Real>(f: &Fn1D<T>, bapu: &Bapu<T>, id: usize) -> Result<Fn1D<T>> {
    require_same_grid(&f.grid, &bapu.grid, "filter_piece_1d")?;
    let window = bapu.window(id)?;
    let spectrum = dft1d(f, Direction::Forward);
    Ok(dft1d(&spectrum.mul(window)?, Direction::Inverse))
}

fn spectral_leakage<T: Real>(values: impl Iterator<Item = (T, Complex<T>)>, omega: T) -> T {
    let (mut outside, mut total) = (T::zero(), T::zero());
    for (xi, v) in values {
        let e = v.norm_sqr();
        total = total + e;
        if xi.abs() > omega {
            outside = outside + e;
        }
    }
    if total > T::zero() {
        outside / total
    } else {
        T::zero()
    }
}

fn warn_leakage<T: Real>(leakage: T, what: &str) {
    if leakage > lit(LEAKAGE_WARN) {
        log::warn!("{what}: {:.2}% of the spectral energy lies outside the covered band", 100.0 * to_f64(leakage));
    }
}

/// `(Σ_Q ⟨ξ_Q⟩^{sq} ‖ψ_Q(D) f‖_{L^p}^q)^{1/q}` over the pieces of `bapu`.
pub fn alpha_mod_norm_1d<T: Real>(f: &Fn1D<T>, bapu: &Bapu<T>, spec: &NormSpec<T>) -> Result<(T, PieceTable<T>)> {
    spec.check_alpha(bapu)?;
    require_same_grid(&f.grid, &bapu.grid, "alpha_mod_norm_1d")?;
    let spectrum = dft1d(f, Direction::Forward);
    let leakage = spectral_leakage(
        spectrum.grid.nodes().into_iter().zip(spectrum.values().iter().copied()),
        bapu.covering.omega,
    );
    warn_leakage(leakage, "alpha_mod_norm_1d");
    let records = bapu
        .covering
        .pieces
        .par_iter()
        .zip(&bapu.windows)
        .map(|(q, w)| {
            let piece = dft1d(&spectrum.mul(w)?, Direction::Inverse);
            let piece_norm = piece.lp_norm(spec.p)?;
            let weight = bracket(q.xi_q).powf(spec.s1);
            Ok(PieceRecord { q_id: q.id, qp_id: None, weight, piece_norm, contribution: spec.contribution(weight * piece_norm) })
        })
        .collect::<Result<Vec<_>>>()?;
    let total = spec.aggregate(records.iter().map(|r| r.contribution));
    Ok((total, PieceTable { spec: *spec, records, total, leakage }))
}

fn check_product_inputs<T: Real>(sigma: &Symbol2D<T>, bapu_x: &Bapu<T>, bapu_xi: &Bapu<T>) -> Result<()> {
    require_same_grid(&sigma.grid_x, &bapu_x.grid, "x-side partition")?;
    require_same_grid(&sigma.grid_xi, &bapu_xi.grid, "ξ-side partition")
}

fn scale_rows<T: Real>(s: &Symbol2D<T>, w: &Fn1D<T>) -> Symbol2D<T> {
    let mut out = s.clone();
    out.values_mut().axis_iter_mut(Axis(0)).zip(w.values()).for_each(|(mut row, &c)| row.mapv_inplace(|v| v * c));
    out
}

fn scale_cols<T: Real>(s: &Symbol2D<T>, w: &Fn1D<T>) -> Symbol2D<T> {
    let mut out = s.clone();
    out.values_mut().axis_iter_mut(Axis(1)).zip(w.values()).for_each(|(mut col, &c)| col.mapv_inplace(|v| v * c));
    out
}

/// `ψ_Q(D_x) ψ_{Q'}(D_ξ) σ = F⁻¹_{1,2}[(ψ_Q ⊗ ψ_{Q'}) F_{1,2} σ]`.
pub fn filter_piece_2d<T: Real>(
    sigma: &Symbol2D<T>,
    bapu_x: &Bapu<T>,
    bapu_xi: &Bapu<T>,
    q: usize,
    qp: usize,
) -> Result<Symbol2D<T>> {
    check_product_inputs(sigma, bapu_x, bapu_xi)?;
    let spectrum = dft2d(sigma, Direction::Forward);
    let masked = scale_cols(&scale_rows(&spectrum, bapu_x.window(q)?), bapu_xi.window(qp)?);
    Ok(dft2d(&masked, Direction::Inverse))
}

/// Product α-modulation norm
/// `(Σ_{Q,Q'} (⟨ξ_Q⟩^{s1} ⟨ξ_{Q'}⟩^{s2} ‖ψ_Q(D_x)ψ_{Q'}(D_ξ)σ‖_{L^p})^q)^{1/q}`.
///
/// Only pieces whose window is nonzero on the sampled band contribute.
pub fn product_alpha_mod_norm<T: Real>(
    sigma: &Symbol2D<T>,
    bapu_x: &Bapu<T>,
    bapu_xi: &Bapu<T>,
    spec: &NormSpec<T>,
) -> Result<(T, PieceTable<T>)> {
    spec.check_alpha(bapu_x)?;
    spec.check_alpha(bapu_xi)?;
    check_product_inputs(sigma, bapu_x, bapu_xi)?;
    let spectrum = dft2d(sigma, Direction::Forward);
    let leakage = {
        let ys = spectrum.grid_x.nodes();
        let etas = spectrum.grid_xi.nodes();
        let (ox, oxi) = (bapu_x.covering.omega, bapu_xi.covering.omega);
        let mut outside = T::zero();
        let mut total = T::zero();
        for ((j, m), v) in spectrum.values().indexed_iter() {
            let e = v.norm_sqr();
            total = total + e;
            if ys[j].abs() > ox || etas[m].abs() > oxi {
                outside = outside + e;
            }
        }
        if total > T::zero() { outside / total } else { T::zero() }
    };
    warn_leakage(leakage, "product_alpha_mod_norm");

    let xs = bapu_x.active_pieces();
    let xis = bapu_xi.active_pieces();
    let rows: Vec<Vec<PieceRecord<T>>> = xs
        .par_iter()
        .map(|&q| {
            let half = dft_first(&scale_rows(&spectrum, &bapu_x.windows[q]), Direction::Inverse);
            let wq = bracket(bapu_x.covering.pieces[q].xi_q).powf(spec.s1);
            xis.par_iter()
                .map(|&qp| {
                    let piece = dft_second(&scale_cols(&half, &bapu_xi.windows[qp]), Direction::Inverse);
                    let piece_norm = piece.lp_norm(spec.p)?;
                    let weight = wq * bracket(bapu_xi.covering.pieces[qp].xi_q).powf(spec.s2);
                    Ok(PieceRecord {
                        q_id: q,
                        qp_id: Some(qp),
                        weight,
                        piece_norm,
                        contribution: spec.contribution(weight * piece_norm),
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let records: Vec<PieceRecord<T>> = rows.into_iter().flatten().collect();
    let total = spec.aggregate(records.iter().map(|r| r.contribution));
    Ok((total, PieceTable { spec: *spec, records, total, leakage }))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct WeightedL2<T> {
    pub l2s: T,
    pub hs: T,
}

/// `‖⟨x;ξ⟩^s σ‖_{L²}` and `‖⟨y;η⟩^s σ̂‖_{L²}` with `⟨x;ξ⟩ = (1 + x² + ξ²)^{1/2}`.
pub fn weighted_l2_norms<T: Real>(sigma: &Symbol2D<T>, s: T) -> WeightedL2<T> {
    fn weighted<T: Real>(a: &Symbol2D<T>, s: T) -> T {
        let xs = a.grid_x.nodes();
        let xis = a.grid_xi.nodes();
        let sum: T = a
            .values()
            .indexed_iter()
            .map(|((j, m), v)| (T::one() + xs[j] * xs[j] + xis[m] * xis[m]).powf(s) * v.norm_sqr())
            .sum();
        (sum * a.cell_weight()).sqrt()
    }
    let spectrum = dft2d(sigma, Direction::Forward);
    WeightedL2 { l2s: weighted(sigma, s), hs: weighted(&spectrum, s) }
}

/// Ratio `target / source`; `Undefined` when both vanish.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real", rename_all = "lowercase")]
pub enum Ratio<T> {
    Value(T),
    Undefined,
}

impl<T: Real> Ratio<T> {
    pub fn of(target: T, source: T) -> Self {
        if source == T::zero() && target == T::zero() {
            Ratio::Undefined
        } else {
            Ratio::Value(target / source)
        }
    }

    pub fn value(&self) -> Option<T> {
        match self {
            Ratio::Value(v) => Some(*v),
            Ratio::Undefined => None,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct ProbePair<T> {
    pub target: String,
    pub source: String,
    /// One ratio per family member.
    pub ratios: Vec<Ratio<T>>,
    /// Largest defined ratio over the family.
    pub max: Option<T>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct ProbeTable<T> {
    pub norms: Vec<String>,
    /// `values[member][norm]`.
    pub values: Vec<Vec<T>>,
    pub pairs: Vec<ProbePair<T>>,
}

impl<T: Real> ProbeTable<T> {
    pub fn pair(&self, target: &str, source: &str) -> Option<&ProbePair<T>> {
        self.pairs.iter().find(|p| p.target == target && p.source == source)
    }
}

/// A named norm evaluated on members of a family.
pub type NamedNorm<'a, X, T> = (&'a str, &'a (dyn Fn(&X) -> Result<T> + Sync));

/// Evaluates every norm on every member and tabulates all ordered ratios.
pub fn embedding_probe<X: Sync, T: Real>(family: &[X], norms: &[NamedNorm<'_, X, T>]) -> Result<ProbeTable<T>> {
    if family.len() < 3 {
        return Err(Error::OutOfRange(format!("family has {} members, need at least 3", family.len())));
    }
    let values = family
        .par_iter()
        .map(|x| norms.iter().map(|(_, f)| f(x)).collect::<Result<Vec<T>>>())
        .collect::<Result<Vec<_>>>()?;
    let mut pairs = Vec::new();
    for (ti, (tname, _)) in norms.iter().enumerate() {
        for (si, (sname, _)) in norms.iter().enumerate() {
            if ti == si {
                continue;
            }
            let ratios: Vec<Ratio<T>> = values.iter().map(|v| Ratio::of(v[ti], v[si])).collect();
            let max = ratios.iter().filter_map(|r| r.value()).reduce(T::max);
            pairs.push(ProbePair { target: tname.to_string(), source: sname.to_string(), ratios, max });
        }
    }
    Ok(ProbeTable { norms: norms.iter().map(|(n, _)| n.to_string()).collect(), values, pairs })
}

/// `‖·‖_{M^{1,1}} / ‖·‖_{B^{1,1}_1}` and `‖·‖_{B^{1,1}_0} / ‖·‖_{M^{1,1}}` on
/// dilated Gaussians `exp(-(tx)²/2)`; both are bounded by the Besov/modulation
/// inclusions on the line.
pub fn besov_modulation_probe<T: Real>(grid: Grid1D<T>, omega: T, scales: &[T]) -> Result<ProbeTable<T>> {
    let modulation = build_bapu(&build_covering(T::zero(), omega, T::one(), T::one())?, grid, lit(0.25))?;
    let besov = build_bapu(&dyadic_preset(omega)?, grid, lit(0.25))?;
    let family: Vec<Fn1D<T>> = scales
        .iter()
        .map(|&t| Fn1D::from_real_fn(grid, |x| (-(t * x) * (t * x) / lit(2.0)).exp()))
        .collect();
    let (zero, one) = (T::zero(), T::one());
    let m_spec = NormSpec::scalar(zero, one, one, zero)?;
    let b1_spec = NormSpec::scalar(one, one, one, one)?;
    let b0_spec = NormSpec::scalar(zero, one, one, one)?;
    let m = |f: &Fn1D<T>| Ok(alpha_mod_norm_1d(f, &modulation, &m_spec)?.0);
    let b1 = |f: &Fn1D<T>| Ok(alpha_mod_norm_1d(f, &besov, &b1_spec)?.0);
    let b0 = |f: &Fn1D<T>| Ok(alpha_mod_norm_1d(f, &besov, &b0_spec)?.0);
    embedding_probe(&family, &[("M11", &m), ("B11_1", &b1), ("B11_0", &b0)])
}

/// `‖σ‖_{B^{1,1}_{(1/2,1/2)}}` against `‖σ‖_{L²_s} + ‖σ‖_{H^s}` on dilated
/// phase-plane Gaussians; bounded when `s > 2`.
pub fn sobolev_besov_probe<T: Real>(grid: Grid1D<T>, omega: T, s: T, scales: &[T]) -> Result<ProbeTable<T>> {
    let cov = dyadic_preset(omega)?;
    let bx = build_bapu(&cov, grid, lit(0.25))?;
    let bxi = build_bapu(&cov, grid.dual(), lit(0.25))?;
    let half = lit::<T>(0.5);
    let spec = NormSpec::product(half, half, T::one(), T::one(), T::one())?;
    let family: Vec<Symbol2D<T>> = scales
        .iter()
        .map(|&t| {
            Symbol2D::on_phase_plane(grid, |x, xi| {
                Complex::new((-(t * t) * (x * x + xi * xi) / lit(2.0)).exp(), T::zero())
            })
        })
        .collect();
    let besov = |sigma: &Symbol2D<T>| Ok(product_alpha_mod_norm(sigma, &bx, &bxi, &spec)?.0);
    let sobolev = |sigma: &Symbol2D<T>| {
        let w = weighted_l2_norms(sigma, s);
        Ok(w.l2s + w.hs)
    };
    embedding_probe(&family, &[("B11_half", &besov), ("L2s+Hs", &sobolev)])
}
