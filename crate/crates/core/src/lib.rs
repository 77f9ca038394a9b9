//! Exact and numeric evaluation of Kloosterman-type exponential sums, with
//! the supporting cyclotomic arithmetic, sieving and counting machinery.

pub mod combinatorics;
pub mod counting;
pub mod cyclotomic;
pub mod dd;
pub mod expsums;
pub mod kclass;
pub mod lemmas;
pub mod error;
pub mod modular;
pub mod multfun;
pub mod scalar;
pub mod sieve;
pub mod value;

pub use error::{Error, Result};

pub type Rational = num_rational::BigRational;
/// Element of Q(ζ_m) with arbitrary-precision rational coefficients.
pub type CycElem = cyclotomic::Cyclotomic<num_rational::BigRational>;
/// Element of Z(ζ_m) with arbitrary-precision integer coefficients.
pub type CycInt = cyclotomic::Cyclotomic<num_bigint::BigInt>;
/// Element of Z(ζ_m) with machine-integer coefficients.
pub type CycSmall = cyclotomic::Cyclotomic<i64>;
pub type ComplexDD = num_complex::Complex<dd::DoubleDouble>;
