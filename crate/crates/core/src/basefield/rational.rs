use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;

use super::{Field, Sample};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

impl Field for Rational {
    fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(self.recip())
        }
    }

    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }

    fn cost(&self) -> usize {
        (self.numer().bits() + self.denom().bits()) as usize
    }

    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }

    fn clear_denominators(row: &mut [Self]) {
        let mut l = BigInt::one();
        for x in row.iter() {
            if !x.is_zero() {
                l = l.lcm(x.denom());
            }
        }
        if !l.is_one() {
            let s = Rational::from_integer(l);
            for x in row.iter_mut() {
                if !x.is_zero() {
                    *x = x.clone() * &s;
                }
            }
        }
    }
}

impl Sample for Rational {
    fn sample<R: Rng + ?Sized>(rng: &mut R, size: u32) -> Self {
        let h = 2 + size as i64 * 3;
        let n = rng.gen_range(-h..=h);
        let d = rng.gen_range(1..=(1 + size as i64));
        rat(n, d)
    }
}

pub(crate) fn rational_to_text(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}
