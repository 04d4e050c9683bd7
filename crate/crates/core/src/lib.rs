//! Exact p-adic computation of Iwasawa power series, Kubota-Leopoldt
//! series, Coleman maps of cyclotomic unit systems, intermediate Iwasawa
//! modules and Eisenstein quotients of weight-2 modular symbols.

pub mod arith;
pub mod characters;
pub mod coleman;
pub mod error;
pub mod lfun;
pub mod modsym;
pub mod padic;
pub mod presentation;
pub mod series;

pub use error::{Error, Result};
pub use padic::{ExtRing, ExtScalar, PadicScalar, RamRing, RamScalar};
pub use presentation::{ModuleMap, ModulePresentation};
