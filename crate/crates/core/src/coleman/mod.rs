//! Coleman power series of norm-compatible systems, the measure
//! `(1 - psi/p) log f`, its projection to a series in `X`, the ground-level
//! map, and the intermediate modules built from a series `alpha`.

mod capstone;
mod flat;
mod intermediate;
mod layer;
mod measure;
mod system;

pub use capstone::{
    capstone, capstone_ring, find_testcase_fixtures, CalibrationEntry, Capstone, CapstoneReport,
    FoldConvention, TestcaseFixture, CALIBRATION_WINDOW,
};
pub use flat::{col_vs_flat_check, coleman_flat, FlatAction, FlatReport};
pub use intermediate::{
    four_term_sequence, intermediate_modules, testcase_sequences, Coefficients, FixedPart,
    FourTermReport, IntermediateModules, IntermediateReport, OrderTable, TestcaseReport,
};
pub use layer::{layer_dim, LayerElement};
pub use measure::{
    coleman_measure, measure_to_series, omega_exponent, project_residue, project_residue_ramified,
    psi, residue_moments, theta_derivative, MeasureSeries, PadicMeasure,
};
pub use system::{
    coleman_series, eval_in_layer, ColemanSeries, NormSystem, SystemKind, AUDIT_LAYERS,
};

/// `C(n, k) mod q` for `k <= n <= size`.
pub(crate) fn binomial_table(size: usize, q: u64) -> Vec<Vec<u64>> {
    let mut t = vec![vec![0u64; size + 1]; size + 1];
    for n in 0..=size {
        t[n][0] = 1 % q;
        for k in 1..=n {
            t[n][k] = (t[n - 1][k - 1] + if k < n { t[n - 1][k] } else { 0 }) % q;
        }
    }
    t
}
