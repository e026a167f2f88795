//! Named symbol generators and the Lipschitz test corpus.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{dft2d, Direction, Fn1D, Grid1D, Symbol2D};
use crate::quantize::LipschitzFn;
use crate::scalar::{cis, lit, Complex, Real};
use crate::smooth::radial_plateau;

fn one() -> f64 {
    1.0
}

fn dilation_scales() -> Vec<f64> {
    vec![0.5, 1.0, 2.0]
}

/// A declared symbol family; every member is reproducible from these fields.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SymbolFamily {
    /// `exp(-((x - x0)² + (ξ - ξ0)²) / 2w²)`.
    Gaussian {
        #[serde(default = "one")]
        width: f64,
        #[serde(default)]
        center_x: f64,
        #[serde(default)]
        center_xi: f64,
    },
    /// `G(tx, tξ)` for each `t`, with `G` the unit Gaussian.
    GaussianDilation {
        #[serde(default = "dilation_scales")]
        scales: Vec<f64>,
    },
    /// `x`-independent smooth plateau in `ξ`.
    MultiplierBump {
        #[serde(default = "one")]
        inner: f64,
        #[serde(default = "default_outer")]
        outer: f64,
    },
    /// `a(x) b(ξ)` with modulated Gaussian factors.
    Separable {
        #[serde(default = "one")]
        x_width: f64,
        #[serde(default = "one")]
        xi_width: f64,
        #[serde(default)]
        x_freq: f64,
        #[serde(default)]
        xi_freq: f64,
    },
    /// Random complex coefficients on a box of the transform plane.
    RandomBandlimited {
        band_x: f64,
        band_xi: f64,
        #[serde(default = "one_count")]
        count: usize,
        seed: u64,
    },
}

fn default_outer() -> f64 {
    3.0
}

fn one_count() -> usize {
    1
}

/// One generated symbol with a label naming its parameters.
#[derive(Clone, Debug)]
pub struct Member<T> {
    pub label: String,
    pub symbol: Symbol2D<T>,
}

fn gaussian_1d<T: Real>(x: T, width: T) -> T {
    (-(x * x) / (lit::<T>(2.0) * width * width)).exp()
}

impl SymbolFamily {
    pub fn name(&self) -> &'static str {
        match self {
            SymbolFamily::Gaussian { .. } => "gaussian",
            SymbolFamily::GaussianDilation { .. } => "gaussian-dilation",
            SymbolFamily::MultiplierBump { .. } => "multiplier-bump",
            SymbolFamily::Separable { .. } => "separable",
            SymbolFamily::RandomBandlimited { .. } => "random-bandlimited",
        }
    }

    /// Default parameters for a generator name.
    pub fn by_name(name: &str, seed: u64) -> Result<Self> {
        Ok(match name {
            "gaussian" => SymbolFamily::Gaussian { width: 1.0, center_x: 0.0, center_xi: 0.0 },
            "gaussian-dilation" => SymbolFamily::GaussianDilation { scales: dilation_scales() },
            "multiplier-bump" => SymbolFamily::MultiplierBump { inner: 1.0, outer: default_outer() },
            "separable" => SymbolFamily::Separable { x_width: 1.0, xi_width: 1.0, x_freq: 0.0, xi_freq: 0.0 },
            "random-bandlimited" => SymbolFamily::RandomBandlimited { band_x: 4.0, band_xi: 4.0, count: 1, seed },
            other => return Err(Error::OutOfRange(format!("unknown symbol generator '{other}'"))),
        })
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::OutOfRange(format!("{}: {what}", self.name())));
        match self {
            SymbolFamily::Gaussian { width, .. } if !(*width > 0.0) => bad("width must be positive"),
            SymbolFamily::GaussianDilation { scales } if scales.iter().any(|t| !(*t > 0.0)) => {
                bad("scales must be positive")
            }
            SymbolFamily::MultiplierBump { inner, outer } if !(*inner >= 0.0 && outer > inner) => {
                bad("need 0 <= inner < outer")
            }
            SymbolFamily::Separable { x_width, xi_width, .. } if !(*x_width > 0.0 && *xi_width > 0.0) => {
                bad("widths must be positive")
            }
            SymbolFamily::RandomBandlimited { band_x, band_xi, .. } if !(*band_x > 0.0 && *band_xi > 0.0) => {
                bad("bands must be positive")
            }
            _ => Ok(()),
        }
    }

    /// Samples every member on `grid × grid.dual()`.
    pub fn generate<T: Real>(&self, grid: Grid1D<T>) -> Result<Vec<Member<T>>> {
        self.validate()?;
        let members = match self {
            SymbolFamily::Gaussian { width, center_x, center_xi } => {
                let (w, cx, cxi) = (lit::<T>(*width), lit::<T>(*center_x), lit::<T>(*center_xi));
                vec![Member {
                    label: format!("gaussian(w={width},x0={center_x},xi0={center_xi})"),
                    symbol: Symbol2D::on_phase_plane(grid, |x, xi| {
                        Complex::new(gaussian_1d(x - cx, w) * gaussian_1d(xi - cxi, w), T::zero())
                    }),
                }]
            }
            SymbolFamily::GaussianDilation { scales } => scales
                .iter()
                .map(|&t| {
                    let tt = lit::<T>(t);
                    Member {
                        label: format!("gaussian-dilation(t={t})"),
                        symbol: Symbol2D::on_phase_plane(grid, |x, xi| {
                            Complex::new(gaussian_1d(tt * x, T::one()) * gaussian_1d(tt * xi, T::one()), T::zero())
                        }),
                    }
                })
                .collect(),
            SymbolFamily::MultiplierBump { inner, outer } => {
                let (a, b) = (lit::<T>(*inner), lit::<T>(*outer));
                vec![Member {
                    label: format!("multiplier-bump(inner={inner},outer={outer})"),
                    symbol: Symbol2D::on_phase_plane(grid, |_, xi| Complex::new(radial_plateau(xi, a, b), T::zero())),
                }]
            }
            SymbolFamily::Separable { x_width, xi_width, x_freq, xi_freq } => {
                let (a, b) = separable_factors(grid, *x_width, *xi_width, *x_freq, *xi_freq);
                vec![Member {
                    label: format!("separable(wx={x_width},wxi={xi_width},kx={x_freq},kxi={xi_freq})"),
                    symbol: Symbol2D::outer(&a, &b),
                }]
            }
            SymbolFamily::RandomBandlimited { band_x, band_xi, count, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                (0..*count)
                    .map(|k| {
                        let symbol = random_bandlimited(grid, lit(*band_x), lit(*band_xi), &mut rng)?;
                        Ok(Member { label: format!("random-bandlimited(seed={seed},k={k})"), symbol })
                    })
                    .collect::<Result<Vec<_>>>()?
            }
        };
        Ok(members)
    }
}

/// The two factors of a separable member, `a` on `grid` and `b` on its dual.
pub fn separable_factors<T: Real>(
    grid: Grid1D<T>,
    x_width: f64,
    xi_width: f64,
    x_freq: f64,
    xi_freq: f64,
) -> (Fn1D<T>, Fn1D<T>) {
    let (wx, wxi, kx, kxi) = (lit::<T>(x_width), lit::<T>(xi_width), lit::<T>(x_freq), lit::<T>(xi_freq));
    let a = Fn1D::from_fn(grid, |x| cis(kx * x).scale(gaussian_1d(x, wx)));
    let b = Fn1D::from_fn(grid.dual(), |xi| cis(kxi * xi).scale(gaussian_1d(xi, wxi)));
    (a, b)
}

/// Uniform random coefficients on `|y| ≤ band_x, |η| ≤ band_xi`, transformed back.
pub fn random_bandlimited<T: Real, R: Rng>(grid: Grid1D<T>, band_x: T, band_xi: T, rng: &mut R) -> Result<Symbol2D<T>> {
    let spectral = Symbol2D::zeros(grid.dual(), grid);
    let ys = spectral.grid_x.nodes();
    let etas = spectral.grid_xi.nodes();
    let mut spectral = spectral;
    for ((a, b), v) in spectral.values_mut().indexed_iter_mut() {
        if ys[a].abs() <= band_x && etas[b].abs() <= band_xi {
            *v = Complex::new(lit(rng.gen_range(-1.0..1.0)), lit(rng.gen_range(-1.0..1.0)));
        }
    }
    Ok(dft2d(&spectral, Direction::Inverse))
}

/// `cos x`, `|sin x|` and `x` under a plateau cutoff reaching half the period.
pub fn lipschitz_corpus<T: Real>(grid: Grid1D<T>) -> Result<Vec<(String, LipschitzFn<T>)>> {
    let l = grid.half_width();
    Ok(vec![
        ("cos".to_string(), LipschitzFn::from_fn(grid, |x| x.cos())?),
        ("abs-sin".to_string(), LipschitzFn::from_fn(grid, |x| x.sin().abs())?),
        (
            "windowed-x".to_string(),
            LipschitzFn::from_fn(grid, |x| x * radial_plateau(x, l / lit(4.0), l / lit(2.0)))?,
        ),
    ])
}
