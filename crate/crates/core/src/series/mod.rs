//! Truncated power series over the coefficient rings: the one-variable
//! `R[[X]]`, the two-variable `R[[X, V]]`, and the diagonal calculus
//! `f(X + V + XV) = sum_k X^k (x) (X+1)^k f^(k)/k!`.

mod bi;
mod diag;
mod generator;
mod newton;
pub(crate) mod power;
mod weierstrass;

pub use bi::{BiSeries, BiSeriesJson};
pub use diag::{diagonal_expansion, diagonalize, tilde_xi_1, xi_n};
pub use generator::{Generator, GeneratorMode};
pub use newton::newton_interpolate;
pub use power::{PowerSeries, SeriesJson};
pub use weierstrass::{weierstrass_data, WeierstrassData};

use crate::error::Result;
use crate::padic::ExtScalar;

impl PowerSeries {
    /// Evaluate at `t^s - 1`.
    pub fn eval_at_ts(&self, s: i64, g: &Generator) -> Result<ExtScalar> {
        let x = ExtScalar::from_padic(self.ring(), &g.node(s));
        if s == 0 {
            return Ok(self.coeff(0).clone());
        }
        self.eval_at(&x)
    }
}
