pub mod band;
pub mod basis;
pub mod cplx;
pub mod error;
pub mod export;
pub mod grid;
pub mod grid_operator;
pub mod lower_norm;
pub mod measure;
pub mod oscillation;
pub mod params;
pub mod quadrature;
pub mod sampling;
pub mod shift;
pub mod spectra;
pub mod symbol;
pub mod symbol_lang;
pub mod toeplitz;

pub use basis::{basis_eval, BasisIndex, BasisMatrix};
pub use cplx::C64;
pub use error::{FockError, Result};
pub use grid::{build_grid, QuadratureGrid, Scheme};
pub use grid_operator::GridOperator;
pub use measure::{boundedness_criterion, duality_constant, hille_tamarkin_integral, lp_norm};
pub use params::FockParams;
pub use shift::{basis_shift, shift_operator};
pub use symbol::{SymbolFunction, SymbolTag};
pub use symbol_lang::parse_symbol;
pub use toeplitz::{apply_projection, assemble_toeplitz, berezin_transform};
