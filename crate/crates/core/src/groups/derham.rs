//! First de Rham cohomology of the catalog groups together with the
//! Gauss-Manin connection. A formal character Σ a_ij ∂^i ℓ_j comes from an
//! algebraic one exactly when Σ a_ij ∇^i[ω_j] vanishes.

use std::collections::BTreeMap;

use crate::basefield::{Derivation, Field};
use crate::diffring::JetVar;

/// Dense polynomial in the curve coordinate x, coefficients in F.
#[derive(Clone, Debug, PartialEq, Eq)]
struct XPoly<F>(Vec<F>);

impl<F: Field> XPoly<F> {
    fn new(mut v: Vec<F>) -> Self {
        while v.last().is_some_and(|c| c.is_zero()) {
            v.pop();
        }
        XPoly(v)
    }

    fn zero() -> Self {
        XPoly(Vec::new())
    }

    fn constant(c: F) -> Self {
        XPoly::new(vec![c])
    }

    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    fn coeff(&self, k: usize) -> F {
        self.0.get(k).cloned().unwrap_or_else(F::zero)
    }

    fn add(&self, o: &Self) -> Self {
        let n = self.0.len().max(o.0.len());
        XPoly::new((0..n).map(|k| self.coeff(k) + &o.coeff(k)).collect())
    }

    fn sub(&self, o: &Self) -> Self {
        let n = self.0.len().max(o.0.len());
        XPoly::new((0..n).map(|k| self.coeff(k) - o.coeff(k)).collect())
    }

    fn scale(&self, c: &F) -> Self {
        XPoly::new(self.0.iter().map(|a| a.clone() * c).collect())
    }

    fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return XPoly::zero();
        }
        let mut v = vec![F::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                v[i + j] = v[i + j].clone() + a.clone() * b;
            }
        }
        XPoly::new(v)
    }

    fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return XPoly::zero();
        }
        let mut v = vec![F::zero(); k];
        v.extend(self.0.iter().cloned());
        XPoly(v)
    }

    fn derivative(&self) -> Self {
        XPoly::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c.clone() * &F::from_i64(k as i64))
                .collect(),
        )
    }

    fn derive_coeffs(&self, d: &dyn Derivation<F>) -> Self {
        XPoly::new(self.0.iter().map(|c| d.derive(c)).collect())
    }

    fn div_rem(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("division by zero polynomial");
        let inv = d.0[dd].inv().expect("nonzero leading coefficient");
        let mut r = self.0.clone();
        if r.len() <= dd {
            return (XPoly::zero(), self.clone());
        }
        let mut q = vec![F::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = r[k + dd].clone() * &inv;
            if c.is_zero() {
                continue;
            }
            for (i, di) in d.0.iter().enumerate() {
                r[k + i] = r[k + i].clone() - c.clone() * di;
            }
            q[k] = c;
        }
        r.truncate(dd);
        (XPoly::new(q), XPoly::new(r))
    }

    /// (s, r) with s·a + r·b = 1, for coprime a and b.
    fn bezout(a: &Self, b: &Self) -> Option<(Self, Self)> {
        let (mut r0, mut r1) = (a.clone(), b.clone());
        let (mut s0, mut s1) = (XPoly::constant(F::one()), XPoly::zero());
        let (mut t0, mut t1) = (XPoly::zero(), XPoly::constant(F::one()));
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            let s = s0.sub(&q.mul(&s1));
            let t = t0.sub(&q.mul(&t1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
            t0 = t1;
            t1 = t;
        }
        if r0.degree() != Some(0) {
            return None;
        }
        let inv = r0.0[0].inv()?;
        Some((s0.scale(&inv), t0.scale(&inv)))
    }
}

/// The curve y^2 = f(x) with f a squarefree cubic, and the reduction of
/// forms A(x) dx / y^(2k+1) to the basis e1 = dx/(2y), e2 = x dx/(2y).
#[derive(Clone, Debug)]
struct HyperellipticCubic<F> {
    f: XPoly<F>,
    df: XPoly<F>,
    s: XPoly<F>,
    r: XPoly<F>,
}

impl<F: Field> HyperellipticCubic<F> {
    fn new(f: XPoly<F>) -> Option<Self> {
        let df = f.derivative();
        let (s, r) = XPoly::bezout(&f, &df)?;
        Some(HyperellipticCubic { f, df, s, r })
    }

    /// Coordinates of [A dx / y^(2k+1)] in (e1, e2).
    fn reduce(&self, a: &XPoly<F>, k: usize) -> [F; 2] {
        let mut a = a.clone();
        for k in (1..=k).rev() {
            // A = U f + V f' with deg V < deg f
            let u = a.mul(&self.s);
            let v = a.mul(&self.r);
            let (q, v0) = v.div_rem(&self.f);
            let u = u.add(&q.mul(&self.df));
            let c = F::from_i64(2).checked_div(&F::from_i64(2 * k as i64 - 1)).expect("char 0");
            a = u.add(&v0.derivative().scale(&c));
        }
        let lc = self.f.coeff(3);
        while let Some(deg) = a.degree() {
            if deg < 2 {
                break;
            }
            let j = deg - 2;
            // d(x^j y) = (j x^(j-1) f + x^j f'/2) dx/y
            let mut exact = self.df.shift(j).scale(&F::from_rational(&crate::basefield::rat(1, 2)));
            if j > 0 {
                exact = exact.add(&self.f.shift(j - 1).scale(&F::from_i64(j as i64)));
            }
            let lead = lc.clone() * &F::from_rational(&crate::basefield::rat(2 * j as i64 + 3, 2));
            let c = a.coeff(deg).checked_div(&lead).expect("nonzero leading coefficient");
            a = a.sub(&exact.scale(&c));
        }
        let two = F::from_i64(2);
        [a.coeff(0) * &two, a.coeff(1) * &two]
    }

    /// ∇ on the class c1 e1 + c2 e2.
    fn connection(&self, c: &[F], d: &dyn Derivation<F>) -> [F; 2] {
        let fd = self.f.derive_coeffs(d);
        let quarter = F::from_rational(&crate::basefield::rat(-1, 4));
        let rep = XPoly::new(vec![c[0].clone(), c[1].clone()]);
        let a = rep.mul(&fd).scale(&quarter);
        let [p, q] = self.reduce(&a, 1);
        [d.derive(&c[0]) + &p, d.derive(&c[1]) + &q]
    }
}

/// One direct summand of H^1_dR, attached to the generator `gen`.
#[derive(Clone, Debug)]
pub enum DeRhamBlock<F> {
    /// G_a: the invariant differential is exact.
    Additive { gen: usize },
    /// G_m: H = K·[du/u] with trivial connection.
    Multiplicative { gen: usize },
    /// Legendre curve y^2 = x(x-1)(x-λ), basis [dx/2y], [x dx/2y].
    Legendre { gen: usize, lambda: F },
}

impl<F: Field> DeRhamBlock<F> {
    pub fn gen(&self) -> usize {
        match self {
            DeRhamBlock::Additive { gen }
            | DeRhamBlock::Multiplicative { gen }
            | DeRhamBlock::Legendre { gen, .. } => *gen,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            DeRhamBlock::Additive { .. } => 0,
            DeRhamBlock::Multiplicative { .. } => 1,
            DeRhamBlock::Legendre { .. } => 2,
        }
    }

    fn shifted(&self, by: usize) -> Self {
        match self {
            DeRhamBlock::Additive { gen } => DeRhamBlock::Additive { gen: gen + by },
            DeRhamBlock::Multiplicative { gen } => DeRhamBlock::Multiplicative { gen: gen + by },
            DeRhamBlock::Legendre { gen, lambda } => DeRhamBlock::Legendre {
                gen: gen + by,
                lambda: lambda.clone(),
            },
        }
    }
}

/// H^1_dR(G) as a direct sum of per-factor blocks.
#[derive(Clone, Debug)]
pub struct DeRhamModel<F> {
    blocks: Vec<DeRhamBlock<F>>,
}

pub(crate) fn legendre_cubic<F: Field>(lambda: &F) -> Vec<F> {
    vec![F::zero(), lambda.clone(), -(F::one() + lambda), F::one()]
}

impl<F: Field> DeRhamModel<F> {
    pub fn new(blocks: Vec<DeRhamBlock<F>>) -> Self {
        DeRhamModel { blocks }
    }

    pub fn blocks(&self) -> &[DeRhamBlock<F>] {
        &self.blocks
    }

    pub fn dim(&self) -> usize {
        self.blocks.iter().map(DeRhamBlock::dim).sum()
    }

    pub fn shifted(&self, by: usize) -> Self {
        DeRhamModel {
            blocks: self.blocks.iter().map(|b| b.shifted(by)).collect(),
        }
    }

    pub fn direct_sum(parts: &[DeRhamModel<F>]) -> Self {
        DeRhamModel {
            blocks: parts.iter().flat_map(|p| p.blocks.iter().cloned()).collect(),
        }
    }

    fn block_of(&self, gen: usize) -> Option<(usize, &DeRhamBlock<F>)> {
        let mut off = 0;
        for b in &self.blocks {
            if b.gen() == gen {
                return Some((off, b));
            }
            off += b.dim();
        }
        None
    }

    /// Σ_i a_i ∇^i[ω_gen] inside the block of `gen`, as block coordinates.
    fn block_image(block: &DeRhamBlock<F>, coeffs: &[F], d: &dyn Derivation<F>) -> Vec<F> {
        match block {
            DeRhamBlock::Additive { .. } => Vec::new(),
            // ∇ = 0 and ω = e
            DeRhamBlock::Multiplicative { .. } => vec![coeffs.first().cloned().unwrap_or_else(F::zero)],
            DeRhamBlock::Legendre { lambda, .. } => {
                let curve = HyperellipticCubic::new(XPoly::new(legendre_cubic(lambda)))
                    .expect("Legendre cubic is squarefree");
                let mut class = [F::one(), F::zero()];
                let mut out = vec![F::zero(), F::zero()];
                for (i, a) in coeffs.iter().enumerate() {
                    if i > 0 {
                        class = curve.connection(&class, d);
                    }
                    if !a.is_zero() {
                        out[0] = out[0].clone() + a.clone() * &class[0];
                        out[1] = out[1].clone() + a.clone() * &class[1];
                    }
                }
                out
            }
        }
    }

    /// The class ∇^i[ω_gen] for i = 0..=n, one coordinate vector each.
    pub fn iterated_classes(&self, gen: usize, n: usize, d: &dyn Derivation<F>) -> Vec<Vec<F>> {
        (0..=n)
            .map(|i| {
                let mut a = vec![F::zero(); i + 1];
                a[i] = F::one();
                self.obstruction_of(&[(gen, a)], d)
            })
            .collect()
    }

    fn obstruction_of(&self, parts: &[(usize, Vec<F>)], d: &dyn Derivation<F>) -> Vec<F> {
        let mut out = vec![F::zero(); self.dim()];
        for (gen, coeffs) in parts {
            let Some((off, block)) = self.block_of(*gen) else {
                continue;
            };
            for (k, c) in DeRhamModel::block_image(block, coeffs, d).into_iter().enumerate() {
                out[off + k] = out[off + k].clone() + &c;
            }
        }
        out
    }

    /// Σ a_ij ∇^i[ω_j] for the linear part a of a formal character
    /// (a_ij = coefficient of ∂^i x_j).
    pub fn obstruction(&self, linear: &BTreeMap<JetVar, F>, d: &dyn Derivation<F>) -> Vec<F> {
        let mut per_gen: BTreeMap<usize, Vec<F>> = BTreeMap::new();
        for (v, c) in linear {
            let e = per_gen.entry(v.gen()).or_default();
            if e.len() <= v.order() {
                e.resize(v.order() + 1, F::zero());
            }
            e[v.order()] = c.clone();
        }
        let parts: Vec<(usize, Vec<F>)> = per_gen.into_iter().collect();
        self.obstruction_of(&parts, d)
    }
}
