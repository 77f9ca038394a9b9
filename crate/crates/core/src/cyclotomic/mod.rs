//! Exact arithmetic in cyclotomic fields Q(ζ_m).

mod elem;
mod json;
mod poly;
mod valuation;

pub use elem::{Cyclotomic, ToReal};
pub(crate) use elem::reduce_i64_checked;
pub use poly::{cyclotomic_poly, CycPoly, MAX_CONDUCTOR};
pub use valuation::{
    lambda_divides, lambda_valuation, lambda_valuation_int, lambda_valuation_int_capped, LambdaValuation,
    Valuation,
};

#[cfg(test)]
mod tests;
