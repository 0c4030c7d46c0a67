//! Fixtures shared by the benchmarks.

use hallcanon::dynkin::DynkinAlgebra;
use hallcanon::ffrep::{DimVector, Quiver};
use hallcanon::hallalg::Config;
use hallcanon::kronecker::KronAlgebra;

pub fn a3() -> Quiver {
    Quiver::parse("1->2,2->3").expect("valid quiver")
}

pub fn dim(v: &[u32]) -> DimVector {
    DimVector(v.to_vec())
}

/// A fresh algebra with no cache directory, so every run starts cold.
pub fn a3_algebra() -> DynkinAlgebra {
    DynkinAlgebra::new(a3(), Config::default()).expect("A3 is Dynkin")
}

pub fn kronecker_algebra() -> KronAlgebra {
    KronAlgebra::new(Config::default()).expect("default config")
}
