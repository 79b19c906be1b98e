use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};
use rand::Rng;

use super::rational::{rat, Rational};
use super::unipoly::UniPoly;
use super::{Field, Sample};

/// An element num/den of Q(t) with gcd(num, den) = 1 and den monic.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RatFunc {
    num: UniPoly,
    den: UniPoly,
}

impl RatFunc {
    /// Returns `None` when `den` is zero.
    pub fn new(num: UniPoly, den: UniPoly) -> Option<Self> {
        if den.is_zero() {
            return None;
        }
        Some(RatFunc::reduce(num, den))
    }

    fn reduce(num: UniPoly, den: UniPoly) -> Self {
        if num.is_zero() {
            return RatFunc::zero();
        }
        let g = UniPoly::gcd(&num, &den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (num.exact_div(&g), den.exact_div(&g))
        };
        RatFunc::monic_den(num, den)
    }

    fn monic_den(num: UniPoly, den: UniPoly) -> Self {
        let l = den.lc().expect("nonzero denominator").clone();
        if l.is_one() {
            RatFunc { num, den }
        } else {
            let s = l.recip();
            RatFunc {
                num: num.scale(&s),
                den: den.scale(&s),
            }
        }
    }

    pub fn from_poly(p: UniPoly) -> Self {
        RatFunc {
            num: p,
            den: UniPoly::one(),
        }
    }

    pub fn constant(c: Rational) -> Self {
        RatFunc::from_poly(UniPoly::constant(c))
    }

    pub fn t() -> Self {
        RatFunc::from_poly(UniPoly::t())
    }

    pub fn num(&self) -> &UniPoly {
        &self.num
    }

    pub fn den(&self) -> &UniPoly {
        &self.den
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn as_constant(&self) -> Option<Rational> {
        if self.den.is_one() {
            self.num.as_constant()
        } else {
            None
        }
    }

    /// d/dt, by the quotient rule.
    pub fn derivative_t(&self) -> RatFunc {
        if self.den.is_one() {
            return RatFunc::from_poly(self.num.derivative());
        }
        let n = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        RatFunc::reduce(n, &self.den * &self.den)
    }

    /// Value at t = x, or `None` at a pole.
    pub fn eval(&self, x: &Rational) -> Option<Rational> {
        let d = self.den.eval(x);
        if d.is_zero() {
            None
        } else {
            Some(self.num.eval(x) / d)
        }
    }

    pub fn pow(&self, e: i32) -> Option<RatFunc> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc = RatFunc::one();
        for _ in 0..e.unsigned_abs() {
            acc = acc * &base;
        }
        Some(acc)
    }

    pub fn total_degree(&self) -> usize {
        self.num.deg0() + self.den.deg0()
    }

    fn add_ref(&self, o: &RatFunc) -> RatFunc {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        if self.den.is_one() && o.den.is_one() {
            return RatFunc::from_poly(&self.num + &o.num);
        }
        if self.den == o.den {
            return RatFunc::reduce(&self.num + &o.num, self.den.clone());
        }
        let n = &(&self.num * &o.den) + &(&o.num * &self.den);
        RatFunc::reduce(n, &self.den * &o.den)
    }

    fn mul_ref(&self, o: &RatFunc) -> RatFunc {
        if self.is_zero() || o.is_zero() {
            return RatFunc::zero();
        }
        if self.den.is_one() && o.den.is_one() {
            return RatFunc::from_poly(&self.num * &o.num);
        }
        let g1 = UniPoly::gcd(&self.num, &o.den);
        let g2 = UniPoly::gcd(&o.num, &self.den);
        let n = &self.num.exact_div(&g1) * &o.num.exact_div(&g2);
        let d = &self.den.exact_div(&g2) * &o.den.exact_div(&g1);
        RatFunc::monic_den(n, d)
    }
}

impl Zero for RatFunc {
    fn zero() -> Self {
        RatFunc {
            num: UniPoly::zero(),
            den: UniPoly::one(),
        }
    }

    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl One for RatFunc {
    fn one() -> Self {
        RatFunc::from_poly(UniPoly::one())
    }

    fn is_one(&self) -> bool {
        self.den.is_one() && self.num.is_one()
    }
}

impl Add for RatFunc {
    type Output = RatFunc;
    fn add(self, o: RatFunc) -> RatFunc {
        self.add_ref(&o)
    }
}

impl Add<&RatFunc> for RatFunc {
    type Output = RatFunc;
    fn add(self, o: &RatFunc) -> RatFunc {
        self.add_ref(o)
    }
}

impl<'a> Add<&'a RatFunc> for &'a RatFunc {
    type Output = RatFunc;
    fn add(self, o: &RatFunc) -> RatFunc {
        self.add_ref(o)
    }
}

impl Neg for RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc {
            num: -&self.num,
            den: self.den,
        }
    }
}

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Sub for RatFunc {
    type Output = RatFunc;
    fn sub(self, o: RatFunc) -> RatFunc {
        self.add_ref(&-o)
    }
}

impl Sub<&RatFunc> for RatFunc {
    type Output = RatFunc;
    fn sub(self, o: &RatFunc) -> RatFunc {
        self.add_ref(&-o)
    }
}

impl<'a> Sub<&'a RatFunc> for &'a RatFunc {
    type Output = RatFunc;
    fn sub(self, o: &RatFunc) -> RatFunc {
        self.add_ref(&-o)
    }
}

impl Mul for RatFunc {
    type Output = RatFunc;
    fn mul(self, o: RatFunc) -> RatFunc {
        self.mul_ref(&o)
    }
}

impl Mul<&RatFunc> for RatFunc {
    type Output = RatFunc;
    fn mul(self, o: &RatFunc) -> RatFunc {
        self.mul_ref(o)
    }
}

impl<'a> Mul<&'a RatFunc> for &'a RatFunc {
    type Output = RatFunc;
    fn mul(self, o: &RatFunc) -> RatFunc {
        self.mul_ref(o)
    }
}

/// Panics on division by zero; use [`Field::checked_div`] for untrusted input.
impl Div for RatFunc {
    type Output = RatFunc;
    fn div(self, o: RatFunc) -> RatFunc {
        self.checked_div(&o).expect("division by zero in Q(t)")
    }
}

impl Field for RatFunc {
    fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        Some(RatFunc::monic_den(self.den.clone(), self.num.clone()))
    }

    fn from_rational(q: &Rational) -> Self {
        RatFunc::constant(q.clone())
    }

    fn cost(&self) -> usize {
        if self.is_zero() {
            return 0;
        }
        let h = self.num.height().max(self.den.height()).min(4095) as usize;
        self.total_degree() * 4096 + h
    }

    fn is_negative(&self) -> bool {
        self.num.lc().is_some_and(Field::is_negative)
    }

    fn clear_denominators(row: &mut [Self]) {
        let mut l = UniPoly::one();
        for x in row.iter() {
            if !x.den.is_one() {
                let g = UniPoly::gcd(&l, &x.den);
                l = &l * &x.den.exact_div(&g);
            }
        }
        if !l.is_one() {
            let s = RatFunc::from_poly(l);
            for x in row.iter_mut() {
                if !x.is_zero() {
                    *x = x.mul_ref(&s);
                }
            }
        }
    }
}

impl Sample for RatFunc {
    fn sample<R: Rng + ?Sized>(rng: &mut R, size: u32) -> Self {
        let deg = rng.gen_range(0..=size.min(3) as usize);
        let h = 2 + size as i64;
        fn poly<R: Rng + ?Sized>(rng: &mut R, d: usize, h: i64) -> UniPoly {
            UniPoly::new((0..=d).map(|_| rat(rng.gen_range(-h..=h), 1)).collect())
        }
        let n = poly(rng, deg, h);
        if rng.gen_bool(0.5) {
            return RatFunc::from_poly(n);
        }
        let dd = rng.gen_range(1..=size.clamp(1, 2) as usize);
        let mut d = poly(rng, dd, h);
        while d.is_zero() {
            d = poly(rng, dd, h);
        }
        RatFunc::reduce(n, d)
    }
}

fn needs_parens(s: &str) -> bool {
    let body = s.strip_prefix('-').unwrap_or(s);
    body.contains([' ', '*', '/'])
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        let n = self.num.to_string();
        let d = self.den.to_string();
        let n = if needs_parens(&n) { format!("({})", n) } else { n };
        let d = if d == "t" { d } else { format!("({})", d) };
        write!(f, "{}/{}", n, d)
    }
}
