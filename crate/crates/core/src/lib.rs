//! Schematic finite spaces: finite ringed posets whose stalks are localized
//! polynomial algebras, with decision procedures for the affine, schematic
//! and semiseparated classes, Godement cohomology, and the roof calculus.

pub mod algebra;
pub mod classify;
pub mod cohomology;
pub mod error;
pub mod field;
pub mod fixtures;
pub mod graded;
pub mod groebner;
pub mod hom;
pub mod linalg;
pub mod module;
pub mod parse;
pub mod poly;
pub mod qcoh;
pub mod radical;
pub mod roofs;
pub mod serial;
pub mod space;

pub use algebra::{Elem, Grading, LocAlgebra};
pub use error::{Error, Result};
pub use field::{Field, Scalar};
pub use hom::{AlgHom, HomKind};
pub use module::{FpModule, ModHom};
pub use space::{FinSpace, SpaceMap};
pub use qcoh::{SheafModHom, SheafModule};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod chapter0 {}
    #[doc = include_str!("../../../book/src/spaces.md")]
    pub mod chapter1 {}
    #[doc = include_str!("../../../book/src/classify.md")]
    pub mod chapter2 {}
    #[doc = include_str!("../../../book/src/cohomology.md")]
    pub mod chapter3 {}
    #[doc = include_str!("../../../book/src/roofs.md")]
    pub mod chapter4 {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod chapter5 {}
}
