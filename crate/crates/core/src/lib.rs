//! Numerical α-modulation spaces, Kohn–Nirenberg quantization and Schatten
//! class certificates on finite periodic grids.

pub mod covering;
pub mod error;
pub mod families;
pub mod grid;
pub mod quadrature;
pub mod quantize;
pub mod scalar;
pub mod schatten;
pub mod smooth;
pub mod spaces;

pub use error::{Error, Result};
pub use scalar::{Complex, Real};

pub type Grid = grid::Grid1D<f64>;
pub type Fn1 = grid::Fn1D<f64>;
pub type Symbol = grid::Symbol2D<f64>;
pub type Covering = covering::AlphaCovering<f64>;
pub type Partition = covering::Bapu<f64>;
pub type Operator = quantize::OperatorMatrix<f64>;
pub type Windows = schatten::WindowSet<f64>;
pub type Cert = schatten::Certificate<f64>;
