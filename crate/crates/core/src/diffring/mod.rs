//! Sparse differential polynomials in jet variables ∂^i x_j, with the total
//! derivation, degree truncation and the two-sided ring used for
//! comultiplication.

mod render;

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::ops::{Add, Mul, Neg, Sub};

use crate::basefield::{Derivation, Field};
use crate::error::{Error, Result};

pub use render::{default_var_name, order_suffix, render_with};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, serde::Serialize)]
pub enum Side {
    Single,
    Left,
    Right,
}

/// The jet coordinate ∂^order x_gen, tagged with a tensor side.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct JetVar {
    pub side: Side,
    pub gen: u16,
    pub order: u16,
}

impl JetVar {
    pub fn new(gen: usize, order: usize) -> Self {
        JetVar {
            side: Side::Single,
            gen: gen as u16,
            order: order as u16,
        }
    }

    pub fn left(gen: usize, order: usize) -> Self {
        JetVar::new(gen, order).with_side(Side::Left)
    }

    pub fn right(gen: usize, order: usize) -> Self {
        JetVar::new(gen, order).with_side(Side::Right)
    }

    pub fn with_side(self, side: Side) -> Self {
        JetVar { side, ..self }
    }

    pub fn with_order(self, order: usize) -> Self {
        JetVar {
            order: order as u16,
            ..self
        }
    }

    pub fn derived(self) -> Self {
        JetVar {
            order: self.order + 1,
            ..self
        }
    }

    pub fn gen(&self) -> usize {
        self.gen as usize
    }

    pub fn order(&self) -> usize {
        self.order as usize
    }
}

/// A product of jet variables, stored as sorted (variable, exponent) pairs.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Monomial(Vec<(JetVar, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: JetVar) -> Self {
        Monomial(vec![(v, 1)])
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (JetVar, u32)>) -> Self {
        let mut map: BTreeMap<JetVar, u32> = BTreeMap::new();
        for (v, e) in pairs {
            if e > 0 {
                *map.entry(v).or_default() += e;
            }
        }
        Monomial(map.into_iter().collect())
    }

    pub fn factors(&self) -> &[(JetVar, u32)] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    /// Σ order·exponent.
    pub fn weight(&self) -> u32 {
        self.0.iter().map(|(v, e)| v.order as u32 * e).sum()
    }

    pub fn exponent(&self, v: JetVar) -> u32 {
        self.0
            .iter()
            .find(|(w, _)| *w == v)
            .map_or(0, |(_, e)| *e)
    }

    pub fn max_order(&self) -> Option<usize> {
        self.0.iter().map(|(v, _)| v.order()).max()
    }

    pub fn as_var(&self) -> Option<JetVar> {
        match self.0.as_slice() {
            [(v, 1)] => Some(*v),
            _ => None,
        }
    }

    pub fn any_var(&self, pred: impl Fn(JetVar) -> bool) -> bool {
        self.0.iter().any(|(v, _)| pred(*v))
    }

    pub fn mul(&self, o: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + o.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < o.0.len() {
            match self.0[i].0.cmp(&o.0[j].0) {
                Ordering::Less => {
                    out.push(self.0[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(o.0[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((self.0[i].0, self.0[i].1 + o.0[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&o.0[j..]);
        Monomial(out)
    }

    /// Replace one factor v by w (v must divide the monomial).
    fn swap_factor(&self, v: JetVar, w: JetVar) -> Monomial {
        let mut pairs: Vec<(JetVar, u32)> = self.0.clone();
        let k = pairs.iter().position(|(x, _)| *x == v).expect("factor");
        pairs[k].1 -= 1;
        pairs.push((w, 1));
        Monomial::from_pairs(pairs)
    }

    pub fn map_vars(&self, f: impl Fn(JetVar) -> JetVar) -> Monomial {
        Monomial::from_pairs(self.0.iter().map(|(v, e)| (f(*v), *e)))
    }
}

impl Ord for Monomial {
    /// Graded: total degree first, then lexicographic on the variable key
    /// (side, gen, order), so x0^2 < x0*x0' < x0'^2.
    fn cmp(&self, o: &Self) -> Ordering {
        self.degree().cmp(&o.degree()).then_with(|| {
            for (a, b) in self.0.iter().zip(&o.0) {
                match a.0.cmp(&b.0) {
                    Ordering::Equal => match b.1.cmp(&a.1) {
                        Ordering::Equal => continue,
                        other => return other,
                    },
                    other => return other,
                }
            }
            self.0.len().cmp(&o.0.len())
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

fn min_trunc(a: Option<u32>, b: Option<u32>) -> Option<u32> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

/// Sparse polynomial in jet variables, optionally truncated at total degree D.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DiffPoly<F> {
    terms: BTreeMap<Monomial, F>,
    trunc: Option<u32>,
}

impl<F: Field> DiffPoly<F> {
    pub fn zero(trunc: Option<u32>) -> Self {
        DiffPoly {
            terms: BTreeMap::new(),
            trunc,
        }
    }

    pub fn constant(c: F, trunc: Option<u32>) -> Self {
        DiffPoly::monomial(c, Monomial::one(), trunc)
    }

    pub fn one(trunc: Option<u32>) -> Self {
        DiffPoly::constant(F::one(), trunc)
    }

    pub fn var(v: JetVar, trunc: Option<u32>) -> Self {
        DiffPoly::monomial(F::one(), Monomial::var(v), trunc)
    }

    pub fn monomial(c: F, m: Monomial, trunc: Option<u32>) -> Self {
        let mut p = DiffPoly::zero(trunc);
        p.add_term(m, c);
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, F)>, trunc: Option<u32>) -> Self {
        let mut p = DiffPoly::zero(trunc);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn trunc(&self) -> Option<u32> {
        self.trunc
    }

    /// Re-truncate at a (not larger) bound, or drop the bound with `None`.
    pub fn with_trunc(mut self, trunc: Option<u32>) -> Self {
        if let Some(d) = trunc {
            self.terms.retain(|m, _| m.degree() <= d);
        }
        self.trunc = trunc;
        self
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &F)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> F {
        self.terms.get(m).cloned().unwrap_or_else(F::zero)
    }

    pub fn constant_term(&self) -> F {
        self.coeff(&Monomial::one())
    }

    pub fn add_term(&mut self, m: Monomial, c: F) {
        if c.is_zero() || self.trunc.is_some_and(|d| m.degree() > d) {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get().clone() + &c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn add_scaled(&mut self, o: &DiffPoly<F>, c: &F) {
        if c.is_zero() {
            return;
        }
        for (m, a) in &o.terms {
            self.add_term(m.clone(), a.clone() * c);
        }
    }

    pub fn add_assign(&mut self, o: &DiffPoly<F>) {
        for (m, a) in &o.terms {
            self.add_term(m.clone(), a.clone());
        }
    }

    pub fn scale(&self, c: &F) -> Self {
        if c.is_zero() {
            return DiffPoly::zero(self.trunc);
        }
        DiffPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, a)| (m.clone(), a.clone() * c))
                .collect(),
            trunc: self.trunc,
        }
    }

    fn mul_ref(&self, o: &DiffPoly<F>) -> DiffPoly<F> {
        let trunc = min_trunc(self.trunc, o.trunc);
        let mut out = DiffPoly::zero(trunc);
        if self.is_zero() || o.is_zero() {
            return out;
        }
        let mut acc: HashMap<Monomial, F> = HashMap::new();
        for (ma, a) in &self.terms {
            let da = ma.degree();
            for (mb, b) in &o.terms {
                if trunc.is_some_and(|d| da + mb.degree() > d) {
                    break;
                }
                let m = ma.mul(mb);
                let c = a.clone() * b;
                match acc.entry(m) {
                    std::collections::hash_map::Entry::Vacant(e) => {
                        e.insert(c);
                    }
                    std::collections::hash_map::Entry::Occupied(mut e) => {
                        let s = e.get().clone() + &c;
                        *e.get_mut() = s;
                    }
                }
            }
        }
        out.terms = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = DiffPoly::one(self.trunc);
        for _ in 0..e {
            acc = acc.mul_ref(self);
        }
        acc
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn min_degree(&self) -> Option<u32> {
        self.terms.keys().next().map(Monomial::degree)
    }

    pub fn max_order(&self) -> Option<usize> {
        self.terms.keys().filter_map(Monomial::max_order).max()
    }

    pub fn variables(&self) -> BTreeSet<JetVar> {
        self.terms
            .keys()
            .flat_map(|m| m.factors().iter().map(|(v, _)| *v))
            .collect()
    }

    /// The total derivation: coefficients by `d`, ∂^i x_j ↦ ∂^{i+1} x_j on
    /// every side.
    pub fn total_derive(&self, d: &dyn Derivation<F>) -> Self {
        let mut out = DiffPoly::zero(self.trunc);
        let trivial = d.is_zero_derivation();
        for (m, c) in &self.terms {
            if !trivial {
                out.add_term(m.clone(), d.derive(c));
            }
            for &(v, e) in m.factors() {
                let c2 = c.clone() * &F::from_i64(e as i64);
                out.add_term(m.swap_factor(v, v.derived()), c2);
            }
        }
        out
    }

    pub fn total_derive_n(&self, d: &dyn Derivation<F>, n: usize) -> Self {
        let mut p = self.clone();
        for _ in 0..n {
            p = p.total_derive(d);
        }
        p
    }

    /// Ring homomorphism sending each variable to its image, truncated at
    /// `trunc` (defaults to the images' common bound).
    pub fn substitute(&self, images: &HashMap<JetVar, DiffPoly<F>>, trunc: Option<u32>) -> Result<Self> {
        self.substitute_with(|v| images.get(&v), trunc)
    }

    pub fn substitute_with<'a>(
        &self,
        images: impl Fn(JetVar) -> Option<&'a DiffPoly<F>>,
        trunc: Option<u32>,
    ) -> Result<Self> {
        let mut powers: HashMap<JetVar, Vec<DiffPoly<F>>> = HashMap::new();
        let mut out = DiffPoly::zero(trunc);
        for (m, c) in &self.terms {
            let mut low = 0;
            for &(v, e) in m.factors() {
                let img = images(v).ok_or_else(|| Error::MissingImage(default_var_name(v)))?;
                low += e * img.min_degree().unwrap_or(u32::MAX / 64);
            }
            if trunc.is_some_and(|d| low > d) {
                continue;
            }
            let mut acc = DiffPoly::constant(c.clone(), trunc);
            for &(v, e) in m.factors() {
                let img = images(v).expect("checked above");
                let pw = powers.entry(v).or_insert_with(|| vec![img.clone().with_trunc(trunc)]);
                while pw.len() < e as usize {
                    let next = pw.last().expect("nonempty").mul_ref(&pw[0]);
                    pw.push(next);
                }
                acc = acc.mul_ref(&pw[e as usize - 1]);
                if acc.is_zero() {
                    break;
                }
            }
            out.add_assign(&acc);
        }
        Ok(out)
    }

    /// Zero out every variable satisfying `pred`.
    pub fn kill_vars(&self, pred: impl Fn(JetVar) -> bool) -> Self {
        DiffPoly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| !m.any_var(&pred))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
            trunc: self.trunc,
        }
    }

    /// ι*: set all order-0 variables to zero.
    pub fn restrict_to_n(&self) -> Self {
        self.kill_vars(|v| v.order == 0)
    }

    pub fn linear_part(&self) -> BTreeMap<JetVar, F> {
        self.terms
            .iter()
            .filter_map(|(m, c)| m.as_var().map(|v| (v, c.clone())))
            .collect()
    }

    /// True iff every monomial contains an order-0 variable.
    pub fn in_augmentation(&self) -> bool {
        self.terms.keys().all(|m| m.any_var(|v| v.order == 0))
    }

    /// Split into (part in the augmentation ideal, rest).
    pub fn augmentation_split(&self) -> (Self, Self) {
        let mut a = DiffPoly::zero(self.trunc);
        let mut b = DiffPoly::zero(self.trunc);
        for (m, c) in &self.terms {
            if m.any_var(|v| v.order == 0) {
                a.terms.insert(m.clone(), c.clone());
            } else {
                b.terms.insert(m.clone(), c.clone());
            }
        }
        (a, b)
    }

    pub fn map_vars(&self, f: impl Fn(JetVar) -> JetVar) -> Self {
        let mut out = DiffPoly::zero(self.trunc);
        for (m, c) in &self.terms {
            out.add_term(m.map_vars(&f), c.clone());
        }
        out
    }

    pub fn with_side(&self, side: Side) -> Self {
        self.map_vars(|v| v.with_side(side))
    }

    pub fn map_coeffs<G: Field>(&self, f: impl Fn(&F) -> G) -> DiffPoly<G> {
        let mut out = DiffPoly::zero(self.trunc);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }
}

impl<'a, F: Field> Add<&'a DiffPoly<F>> for &'a DiffPoly<F> {
    type Output = DiffPoly<F>;
    fn add(self, o: &DiffPoly<F>) -> DiffPoly<F> {
        let mut out = self.clone().with_trunc(min_trunc(self.trunc, o.trunc));
        out.add_assign(o);
        out
    }
}

impl<'a, F: Field> Sub<&'a DiffPoly<F>> for &'a DiffPoly<F> {
    type Output = DiffPoly<F>;
    fn sub(self, o: &DiffPoly<F>) -> DiffPoly<F> {
        let mut out = self.clone().with_trunc(min_trunc(self.trunc, o.trunc));
        out.add_scaled(o, &-F::one());
        out
    }
}

impl<'a, F: Field> Mul<&'a DiffPoly<F>> for &'a DiffPoly<F> {
    type Output = DiffPoly<F>;
    fn mul(self, o: &DiffPoly<F>) -> DiffPoly<F> {
        self.mul_ref(o)
    }
}

impl<F: Field> Neg for &DiffPoly<F> {
    type Output = DiffPoly<F>;
    fn neg(self) -> DiffPoly<F> {
        self.scale(&-F::one())
    }
}

/// Shape of a jet-polynomial context.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RingConfig {
    pub g: usize,
    pub max_order: usize,
    pub trunc: Option<u32>,
    pub tensor_square: bool,
}

impl RingConfig {
    pub fn check<F: Field>(&self, p: &DiffPoly<F>) -> Result<()> {
        if self.g == 0 {
            return Err(Error::Input("ring needs at least one generator".into()));
        }
        for v in p.variables() {
            if v.order() > self.max_order {
                return Err(Error::OrderOverflow {
                    order: v.order(),
                    max: self.max_order,
                });
            }
            if v.gen() >= self.g {
                return Err(Error::Input(format!("generator {} out of range", v.gen)));
            }
            if (v.side == Side::Single) == self.tensor_square {
                return Err(Error::Input(format!(
                    "variable {} has the wrong side for this ring",
                    default_var_name(v)
                )));
            }
        }
        if let (Some(d), Some(deg)) = (self.trunc, p.degree()) {
            if deg > d {
                return Err(Error::Input(format!("degree {} exceeds truncation {}", deg, d)));
            }
        }
        Ok(())
    }

    /// Total derivative with an order-overflow check against this context.
    pub fn total_derive<F: Field>(&self, p: &DiffPoly<F>, d: &dyn Derivation<F>) -> Result<DiffPoly<F>> {
        if let Some(o) = p.max_order() {
            if o + 1 > self.max_order {
                return Err(Error::OrderOverflow {
                    order: o + 1,
                    max: self.max_order,
                });
            }
        }
        Ok(p.total_derive(d))
    }
}
