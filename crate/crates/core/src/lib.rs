#![allow(clippy::needless_range_loop, clippy::type_complexity)]

pub mod canon;
pub mod cyclicq;
pub mod dynkin;
pub mod error;
pub mod ffield;
pub mod ffrep;
pub mod hallalg;
pub mod kronecker;
pub mod laurent;
pub mod symchar;
pub mod triangular;

pub use error::{Error, Result};
pub use laurent::{quantum_factorial, quantum_int, LaurentPoly, Poly, RationalFunc, SqrtElem};
