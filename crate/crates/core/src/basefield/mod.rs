//! Exact arithmetic in the differential field K = Q(t) (or its constant
//! subfield Q), plus exact linear algebra over any such field.

mod linalg;
mod ratfunc;
mod rational;
mod unipoly;

use std::fmt::{Debug, Display};
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use rand::Rng;

pub use linalg::{nullspace, rank, rref, Echelon, Matrix, SparseEchelon};
pub use ratfunc::RatFunc;
pub use rational::{rat, Rational};
pub use unipoly::UniPoly;

/// An exact field usable as a coefficient domain.
pub trait Field:
    Clone
    + PartialEq
    + Eq
    + Debug
    + Display
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
{
    fn inv(&self) -> Option<Self>;

    fn from_rational(q: &Rational) -> Self;

    /// Pivoting heuristic: smaller is cheaper to eliminate with.
    fn cost(&self) -> usize;

    fn checked_div(&self, other: &Self) -> Option<Self> {
        other.inv().map(|i| self.clone() * &i)
    }

    fn from_i64(n: i64) -> Self {
        Self::from_rational(&rat(n, 1))
    }

    /// Rescale a row so its entries have no denominators (no-op by default).
    fn clear_denominators(_row: &mut [Self]) {}

    /// Whether the canonical rendering starts with a minus sign.
    fn is_negative(&self) -> bool;
}

/// A derivation on a field.
pub trait Derivation<F>: Debug + Send + Sync {
    fn derive(&self, a: &F) -> F;

    fn is_zero_derivation(&self) -> bool;
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ZeroDerivation;

impl<F: Field> Derivation<F> for ZeroDerivation {
    fn derive(&self, _a: &F) -> F {
        F::zero()
    }

    fn is_zero_derivation(&self) -> bool {
        true
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FieldMode {
    RationalFunctions,
    ConstantsOnly,
}

/// The differential field (Q(t), c(t)·d/dt), or Q(t) with the zero derivation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldConfig {
    mode: FieldMode,
    dt: RatFunc,
}

impl Default for FieldConfig {
    fn default() -> Self {
        FieldConfig::standard()
    }
}

impl FieldConfig {
    pub fn standard() -> Self {
        FieldConfig {
            mode: FieldMode::RationalFunctions,
            dt: RatFunc::one(),
        }
    }

    pub fn constants_only() -> Self {
        FieldConfig {
            mode: FieldMode::ConstantsOnly,
            dt: RatFunc::zero(),
        }
    }

    /// The derivation with ∂t = dt.
    pub fn with_dt(dt: RatFunc) -> Self {
        if dt.is_zero() {
            return FieldConfig::constants_only();
        }
        FieldConfig {
            mode: FieldMode::RationalFunctions,
            dt,
        }
    }

    pub fn mode(&self) -> FieldMode {
        self.mode
    }

    pub fn derivative_of_t(&self) -> &RatFunc {
        &self.dt
    }
}

impl Derivation<RatFunc> for FieldConfig {
    fn derive(&self, a: &RatFunc) -> RatFunc {
        match self.mode {
            FieldMode::ConstantsOnly => RatFunc::zero(),
            FieldMode::RationalFunctions => {
                let d = a.derivative_t();
                if self.dt.is_one() {
                    d
                } else {
                    d * &self.dt
                }
            }
        }
    }

    fn is_zero_derivation(&self) -> bool {
        self.mode == FieldMode::ConstantsOnly
    }
}

/// Random elements for property tests and verify suites.
pub trait Sample: Field {
    /// `size` loosely bounds degrees and coefficient heights.
    fn sample<R: Rng + ?Sized>(rng: &mut R, size: u32) -> Self;

    fn sample_nonzero<R: Rng + ?Sized>(rng: &mut R, size: u32) -> Self {
        loop {
            let x = Self::sample(rng, size);
            if !x.is_zero() {
                return x;
            }
        }
    }
}

pub fn factorial<F: Field>(n: usize) -> F {
    let mut acc = F::one();
    for k in 2..=n {
        acc = acc * &F::from_i64(k as i64);
    }
    acc
}

pub fn binomial<F: Field>(n: usize, k: usize) -> F {
    if k > n {
        return F::zero();
    }
    let mut acc = Rational::one();
    for i in 0..k {
        acc *= rat((n - i) as i64, (i + 1) as i64);
    }
    F::from_rational(&acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_only_derivation_is_zero() {
        let cfg = FieldConfig::constants_only();
        let r = RatFunc::t() * RatFunc::t() + RatFunc::one();
        assert!(cfg.derive(&r).is_zero());
        assert!(cfg.is_zero_derivation());
    }

    #[test]
    fn derive_t_is_configured_value() {
        let dt = RatFunc::t() * RatFunc::from_i64(3);
        let cfg = FieldConfig::with_dt(dt.clone());
        assert_eq!(cfg.derive(&RatFunc::t()), dt);
        assert_eq!(FieldConfig::standard().derive(&RatFunc::t()), RatFunc::one());
    }

    #[test]
    fn binomials_and_factorials() {
        assert_eq!(binomial::<Rational>(5, 2), rat(10, 1));
        assert_eq!(binomial::<Rational>(2, 5), rat(0, 1));
        assert_eq!(factorial::<Rational>(5), rat(120, 1));
    }
}
