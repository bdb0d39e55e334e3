//! Scalar abstraction for edge weights.
//!
//! Algorithms only compare weights and sum them for reporting, so any
//! ordered additive scalar works. Rationals are the default because the
//! weighted lower-bound construction uses weights of the form `1/j`, which
//! must compare exactly.

use std::collections::hash_map::DefaultHasher;
use std::fmt::Debug;
use std::hash::{Hash, Hasher};
use std::ops::Add;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{FromPrimitive, One, Zero};

/// An edge weight. Must be strictly positive to be accepted in a graph.
pub trait Weight:
    Clone + PartialOrd + Debug + Send + Sync + Zero + Add<Output = Self> + FromPrimitive + 'static
{
    /// Token written in the graph file format.
    fn to_token(&self) -> String;

    /// Inverse of [`Weight::to_token`].
    fn parse_token(token: &str) -> Option<Self>;

    /// Hash of the value; equal weights hash equally.
    fn fingerprint(&self) -> u64 {
        hash_of(&self.to_token())
    }

    fn is_valid(&self) -> bool {
        *self > Self::zero()
    }
}

fn hash_of(v: &impl Hash) -> u64 {
    let mut h = DefaultHasher::new();
    v.hash(&mut h);
    h.finish()
}

fn parse_fraction(token: &str) -> Option<(&str, &str)> {
    match token.split_once('/') {
        Some((num, den)) => Some((num, den)),
        None => Some((token, "1")),
    }
}

impl Weight for BigRational {
    fn to_token(&self) -> String {
        format!("{}/{}", self.numer(), self.denom())
    }

    fn parse_token(token: &str) -> Option<Self> {
        let (num, den) = parse_fraction(token)?;
        let num: BigInt = num.parse().ok()?;
        let den: BigInt = den.parse().ok()?;
        if den.is_zero() {
            return None;
        }
        Some(BigRational::new(num, den))
    }

    fn fingerprint(&self) -> u64 {
        hash_of(self)
    }
}

impl Weight for Ratio<i64> {
    fn to_token(&self) -> String {
        format!("{}/{}", self.numer(), self.denom())
    }

    fn parse_token(token: &str) -> Option<Self> {
        let (num, den) = parse_fraction(token)?;
        let num: i64 = num.parse().ok()?;
        let den: i64 = den.parse().ok()?;
        if den == 0 {
            return None;
        }
        Some(Ratio::new(num, den))
    }

    fn fingerprint(&self) -> u64 {
        hash_of(self)
    }
}

macro_rules! impl_integer_weight {
    ($t:ty) => {
        impl Weight for $t {
            fn to_token(&self) -> String {
                format!("{}/1", self)
            }

            fn parse_token(token: &str) -> Option<Self> {
                let (num, den) = parse_fraction(token)?;
                if den != "1" {
                    return None;
                }
                num.parse().ok()
            }

            fn fingerprint(&self) -> u64 {
                hash_of(self)
            }
        }
    };
}

impl_integer_weight!(u32);
impl_integer_weight!(u64);

macro_rules! impl_float_weight {
    ($t:ty) => {
        impl Weight for $t {
            fn to_token(&self) -> String {
                // `{:?}` prints the shortest representation that round-trips.
                format!("{:?}", self)
            }

            fn parse_token(token: &str) -> Option<Self> {
                token.parse().ok()
            }

            fn fingerprint(&self) -> u64 {
                hash_of(&self.to_bits())
            }

            fn is_valid(&self) -> bool {
                self.is_finite() && *self > 0.0
            }
        }
    };
}

impl_float_weight!(f32);
impl_float_weight!(f64);

/// `1/j` as an exact rational.
pub fn unit_fraction(j: u64) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(j))
}
