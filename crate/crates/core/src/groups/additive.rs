//! Shared machinery for finding additive polynomials: monomial enumeration,
//! memoized ring homomorphisms, and the defect linear system.

use std::collections::HashMap;

use crate::basefield::{Field, SparseEchelon};
use crate::diffring::{default_var_name, DiffPoly, JetVar, Monomial, Side};
use crate::error::{Error, Result};

/// All monomials in `vars` with degree in `min_deg..=max_deg` and weight
/// (sum of orders) at most `max_weight`, in the ring's monomial order.
pub fn enumerate_monomials(vars: &[JetVar], min_deg: u32, max_deg: u32, max_weight: usize) -> Vec<Monomial> {
    fn go(
        vars: &[JetVar],
        start: usize,
        deg: u32,
        weight: usize,
        cur: &mut Vec<(JetVar, u32)>,
        out: &mut Vec<Monomial>,
        min_deg: u32,
        max_deg: u32,
        max_weight: usize,
    ) {
        if deg >= min_deg {
            out.push(Monomial::from_pairs(cur.iter().cloned()));
        }
        if deg == max_deg {
            return;
        }
        for i in start..vars.len() {
            let v = vars[i];
            if weight + v.order() > max_weight {
                continue;
            }
            match cur.last_mut() {
                Some(last) if last.0 == v => last.1 += 1,
                _ => cur.push((v, 1)),
            }
            go(vars, i, deg + 1, weight + v.order(), cur, out, min_deg, max_deg, max_weight);
            let last = cur.last_mut().expect("pushed");
            if last.1 == 1 {
                cur.pop();
            } else {
                last.1 -= 1;
            }
        }
    }
    let mut out = Vec::new();
    go(vars, 0, 0, 0, &mut Vec::new(), &mut out, min_deg, max_deg, max_weight);
    out.sort();
    out
}

/// A ring homomorphism given by variable images, with every monomial image
/// memoized so that families of related monomials share work.
pub struct ImageCache<F> {
    images: HashMap<JetVar, DiffPoly<F>>,
    memo: HashMap<Monomial, DiffPoly<F>>,
    trunc: Option<u32>,
}

impl<F: Field> ImageCache<F> {
    pub fn new(images: HashMap<JetVar, DiffPoly<F>>, trunc: Option<u32>) -> Self {
        let images = images.into_iter().map(|(v, p)| (v, p.with_trunc(trunc))).collect();
        ImageCache {
            images,
            memo: HashMap::new(),
            trunc,
        }
    }

    pub fn trunc(&self) -> Option<u32> {
        self.trunc
    }

    pub fn monomial(&mut self, m: &Monomial) -> Result<DiffPoly<F>> {
        if let Some(p) = self.memo.get(m) {
            return Ok(p.clone());
        }
        let Some(&(v, e)) = m.factors().last() else {
            return Ok(DiffPoly::one(self.trunc));
        };
        let img = self
            .images
            .get(&v)
            .ok_or_else(|| Error::MissingImage(default_var_name(v)))?
            .clone();
        let mut rest: Vec<(JetVar, u32)> = m.factors().to_vec();
        if e == 1 {
            rest.pop();
        } else {
            rest.last_mut().expect("nonempty").1 -= 1;
        }
        let rest = Monomial::from_pairs(rest);
        let out = if rest.is_one() {
            img
        } else {
            &self.monomial(&rest)? * &img
        };
        self.memo.insert(m.clone(), out.clone());
        Ok(out)
    }

    pub fn apply(&mut self, p: &DiffPoly<F>) -> Result<DiffPoly<F>> {
        let mut out = DiffPoly::zero(self.trunc);
        for (m, c) in p.terms() {
            let img = self.monomial(m)?;
            out.add_scaled(&img, c);
        }
        Ok(out)
    }
}

/// m(images) - m(Left) - m(Right).
pub fn monomial_defect<F: Field>(cache: &mut ImageCache<F>, m: &Monomial) -> Result<DiffPoly<F>> {
    let mut d = cache.monomial(m)?;
    let t = cache.trunc();
    d.add_scaled(&DiffPoly::monomial(F::one(), m.map_vars(|v| v.with_side(Side::Left)), t), &-F::one());
    d.add_scaled(&DiffPoly::monomial(F::one(), m.map_vars(|v| v.with_side(Side::Right)), t), &-F::one());
    Ok(d)
}

/// Basis of the K-linear combinations Σ c_k m_k whose images under `defect`
/// sum to zero; each returned vector is indexed like `defects`.
pub fn kernel_of<F: Field>(defects: &[DiffPoly<F>]) -> Vec<Vec<F>> {
    let mut rows: HashMap<&Monomial, Vec<(usize, F)>> = HashMap::new();
    for (k, d) in defects.iter().enumerate() {
        for (m, c) in d.terms() {
            rows.entry(m).or_default().push((k, c.clone()));
        }
    }
    let mut keys: Vec<&Monomial> = rows.keys().copied().collect();
    keys.sort();
    let mut ech = SparseEchelon::new(defects.len());
    for m in keys {
        if ech.is_full() {
            break;
        }
        ech.insert(rows.remove(m).expect("present"));
    }
    ech.nullspace()
}

/// Combine monomials with coefficient vectors.
pub fn combine<F: Field>(monomials: &[Monomial], v: &[F], trunc: Option<u32>) -> DiffPoly<F> {
    DiffPoly::from_terms(
        monomials
            .iter()
            .zip(v)
            .filter(|(_, c)| !c.is_zero())
            .map(|(m, c)| (m.clone(), c.clone())),
        trunc,
    )
}
