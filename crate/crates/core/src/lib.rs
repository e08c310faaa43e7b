//! Exact-arithmetic machinery for lifting mod-p semilinear representations to
//! mod-p²: truncated Witt vectors, skew-group-algebra modules, bar-resolution
//! cohomology and its obstruction calculus, the flag-lifting pipeline, a
//! symbolic good-filtration dévissage engine for flag-variety vanishing, and
//! cyclotomic/smooth closures of finite groups.

pub mod cohomology;
pub mod error;
pub mod extension;
pub mod group;
pub mod lifting;
pub mod matrix;
pub mod multilinear;
pub mod nonabelian;
pub mod oracles;
pub mod ring;
pub mod semilinear;

pub use error::{Error, Result};
pub use ring::{Elem, Ring};
