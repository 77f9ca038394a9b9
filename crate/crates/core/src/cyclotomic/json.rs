use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::elem::Cyclotomic;

#[derive(Serialize, Deserialize)]
struct Wire {
    conductor: u64,
    coeffs: Vec<[String; 2]>,
}

impl Serialize for Cyclotomic<BigRational> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        Wire {
            conductor: self.conductor(),
            coeffs: self
                .coeffs()
                .iter()
                .map(|c| [c.numer().to_string(), c.denom().to_string()])
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Cyclotomic<BigRational> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let w = Wire::deserialize(d)?;
        let coeffs = w
            .coeffs
            .iter()
            .map(|[n, q]| {
                let n: BigInt = n.parse().map_err(D::Error::custom)?;
                let q: BigInt = q.parse().map_err(D::Error::custom)?;
                if q.is_zero() {
                    return Err(D::Error::custom("zero denominator"));
                }
                Ok(BigRational::new(n, q))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Cyclotomic::from_reduced(w.conductor, coeffs).map_err(D::Error::custom)
    }
}
