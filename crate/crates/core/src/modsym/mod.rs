//! Weight-2 modular symbols of level `M` over `Z_p[zeta]/p^k`, for
//! `Gamma_1(M)` or with a nebentypus, with Hecke, diamond and Fricke
//! operators and the Eisenstein quotient of the cuspidal plus part.

mod eisenstein;
mod heilbronn;
mod oracle;
mod space;
mod sparse;

pub use eisenstein::{eisenstein_quotient, xi_zero_order, EisensteinQuotient};
pub use heilbronn::{merel, HeilbronnCache};
pub use oracle::{cusp_form_dimension, gamma0_index, gamma1_cusps, gamma1_genus};
pub use space::{
    cd_chain, lift_to_sl2z, manin_decomposition, varpi_formal, Cuspidal, HeckeOperator, Sign,
    SymbolRing, SymbolSpace, Twist,
};
