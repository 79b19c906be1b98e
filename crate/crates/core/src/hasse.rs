//! Prolonged ideals of affine schemes and the truncated-ring description of
//! jet points: a point of J^nX over K is a K-algebra map to D_n(K) = K[ε]/(ε^{n+1})
//! where K acts through the Hasse-Schmidt map exp_∂.

use std::collections::HashMap;

use rand::Rng;

use crate::basefield::{factorial, nullspace, rref, Derivation, Field, Matrix};
use crate::diffring::{DiffPoly, JetVar, Side};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct AffineScheme<F> {
    vars: Vec<String>,
    relations: Vec<DiffPoly<F>>,
}

impl<F: Field> AffineScheme<F> {
    pub fn new(vars: Vec<String>, relations: Vec<DiffPoly<F>>) -> Result<Self> {
        for r in &relations {
            for v in r.variables() {
                if v.order != 0 || v.side != Side::Single || v.gen() >= vars.len() {
                    return Err(Error::Input(format!(
                        "relation {} must use order-0 variables of the scheme only",
                        r
                    )));
                }
            }
        }
        Ok(AffineScheme { vars, relations })
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn relations(&self) -> &[DiffPoly<F>] {
        &self.relations
    }

    pub fn jet_var_name(&self, v: JetVar) -> String {
        format!(
            "{}{}",
            self.vars[v.gen()],
            crate::diffring::order_suffix(v.order())
        )
    }
}

/// Generators ∂^s f_k, stored as `generators[k][s]`.
#[derive(Clone, Debug)]
pub struct JetIdeal<F> {
    pub level: usize,
    generators: Vec<Vec<DiffPoly<F>>>,
}

impl<F: Field> JetIdeal<F> {
    pub fn generator(&self, k: usize, s: usize) -> &DiffPoly<F> {
        &self.generators[k][s]
    }

    pub fn len(&self) -> usize {
        self.generators.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = &DiffPoly<F>> {
        self.generators.iter().flatten()
    }
}

pub fn prolong_ideal<F: Field>(x: &AffineScheme<F>, n: usize, d: &dyn Derivation<F>) -> JetIdeal<F> {
    let generators = x
        .relations
        .iter()
        .map(|f| {
            let mut chain = vec![f.clone()];
            for s in 0..n {
                let next = chain[s].total_derive(d);
                chain.push(next);
            }
            chain
        })
        .collect();
    JetIdeal { level: n, generators }
}

/// An element b_0 + b_1 ε + ... + b_n ε^n of D_n(K).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedElement<F> {
    coeffs: Vec<F>,
}

impl<F: Field> TruncatedElement<F> {
    pub fn new(coeffs: Vec<F>) -> Self {
        assert!(!coeffs.is_empty(), "D_n needs n >= 0");
        TruncatedElement { coeffs }
    }

    pub fn zero(n: usize) -> Self {
        TruncatedElement::new(vec![F::zero(); n + 1])
    }

    pub fn constant(c: F, n: usize) -> Self {
        let mut e = TruncatedElement::zero(n);
        e.coeffs[0] = c;
        e
    }

    pub fn level(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// The projection D_{n} → D_{m}, m ≤ n.
    pub fn project(&self, m: usize) -> Self {
        TruncatedElement::new(self.coeffs[..=m].to_vec())
    }

    pub fn add(&self, o: &Self) -> Self {
        TruncatedElement::new(
            self.coeffs
                .iter()
                .zip(&o.coeffs)
                .map(|(a, b)| a.clone() + b)
                .collect(),
        )
    }

    pub fn mul(&self, o: &Self) -> Self {
        let n = self.level();
        let mut out = vec![F::zero(); n + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate().take(n + 1 - i) {
                if !b.is_zero() {
                    out[i + j] = out[i + j].clone() + a.clone() * b;
                }
            }
        }
        TruncatedElement::new(out)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = TruncatedElement::constant(F::one(), self.level());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }
}

/// exp_∂(r) = Σ ∂^i r / i! ε^i.
pub fn exp_del<F: Field>(r: &F, n: usize, d: &dyn Derivation<F>) -> TruncatedElement<F> {
    let mut coeffs = Vec::with_capacity(n + 1);
    let mut cur = r.clone();
    for i in 0..=n {
        let fi: F = factorial(i);
        coeffs.push(cur.checked_div(&fi).expect("char 0"));
        if i < n {
            cur = d.derive(&cur);
        }
    }
    TruncatedElement::new(coeffs)
}

/// Evaluate an order-0 polynomial at a D_n(K)-point, with K acting through exp_∂.
pub fn eval_truncated<F: Field>(
    f: &DiffPoly<F>,
    point: &[TruncatedElement<F>],
    n: usize,
    d: &dyn Derivation<F>,
) -> Result<TruncatedElement<F>> {
    let mut acc = TruncatedElement::zero(n);
    for (m, c) in f.terms() {
        let mut term = exp_del(c, n, d);
        for &(v, e) in m.factors() {
            if v.order != 0 {
                return Err(Error::Input("evalTruncated needs an order-0 polynomial".into()));
            }
            let p = point
                .get(v.gen())
                .ok_or_else(|| Error::MissingImage(crate::diffring::default_var_name(v)))?;
            term = term.mul(&p.project(n).pow(e));
        }
        acc = acc.add(&term);
    }
    Ok(acc)
}

/// Value of a polynomial at an assignment of all its variables.
pub fn eval_at<F: Field>(p: &DiffPoly<F>, values: &HashMap<JetVar, F>) -> Result<F> {
    let mut acc = F::zero();
    for (m, c) in p.terms() {
        let mut term = c.clone();
        for &(v, e) in m.factors() {
            let x = values
                .get(&v)
                .ok_or_else(|| Error::MissingImage(crate::diffring::default_var_name(v)))?;
            for _ in 0..e {
                term = term * x;
            }
        }
        acc = acc + term;
    }
    Ok(acc)
}

/// The D_n(K)-point x_j ↦ Σ_i value(∂^i x_j)/i! ε^i.
pub fn hs_point<F: Field>(values: &HashMap<JetVar, F>, g: usize, n: usize) -> Result<Vec<TruncatedElement<F>>> {
    (0..g)
        .map(|j| {
            let coeffs = (0..=n)
                .map(|i| {
                    let v = JetVar::new(j, i);
                    let x = values
                        .get(&v)
                        .ok_or_else(|| Error::Input(format!("no value for {}", crate::diffring::default_var_name(v))))?;
                    Ok(x.checked_div(&factorial(i)).expect("char 0"))
                })
                .collect::<Result<Vec<F>>>()?;
            Ok(TruncatedElement::new(coeffs))
        })
        .collect()
}

/// Decides membership of a jet point in J^nX twice: by vanishing of the
/// prolonged ideal, and by evaluating the relations in D_n(K). Disagreement is
/// an error.
pub fn jet_point_oracle<F: Field>(
    x: &AffineScheme<F>,
    n: usize,
    values: &HashMap<JetVar, F>,
    d: &dyn Derivation<F>,
) -> Result<bool> {
    let ideal = prolong_ideal(x, n, d);
    let mut by_ideal = true;
    for g in ideal.iter() {
        if !eval_at(g, values)?.is_zero() {
            by_ideal = false;
        }
    }
    let point = hs_point(values, x.vars.len(), n)?;
    let mut by_points = true;
    for f in &x.relations {
        if !eval_truncated(f, &point, n, d)?.is_zero() {
            by_points = false;
        }
    }
    if by_ideal != by_points {
        return Err(Error::Oracle(format!(
            "prolonged ideal says {}, D_{}(K) evaluation says {}",
            by_ideal, n, by_points
        )));
    }
    Ok(by_ideal)
}

/// Extend a K-point of X to a point of J^nX, level by level. At level s the
/// generators are affine-linear in the order-s variables with the Jacobian of
/// X at the base point as coefficient matrix; variables outside a pivot set
/// are drawn from `free`.
pub fn solve_jet<F: Field, R: Rng + ?Sized>(
    x: &AffineScheme<F>,
    base: &[F],
    n: usize,
    d: &dyn Derivation<F>,
    rng: &mut R,
    free: &mut dyn FnMut(&mut R) -> F,
) -> Result<HashMap<JetVar, F>> {
    let g = x.vars.len();
    if base.len() != g {
        return Err(Error::Input(format!("base point needs {} coordinates", g)));
    }
    let mut values: HashMap<JetVar, F> = (0..g).map(|j| (JetVar::new(j, 0), base[j].clone())).collect();
    for f in &x.relations {
        if !eval_at(f, &values)?.is_zero() {
            return Err(Error::Input(format!("base point does not satisfy {}", f)));
        }
    }
    let ideal = prolong_ideal(x, n, d);
    let r = x.relations.len();
    for s in 1..=n {
        for j in 0..g {
            values.insert(JetVar::new(j, s), F::zero());
        }
        let mut constant = Vec::with_capacity(r);
        for k in 0..r {
            constant.push(eval_at(ideal.generator(k, s), &values)?);
        }
        let mut jac = Matrix::zeros(r, g);
        for j in 0..g {
            values.insert(JetVar::new(j, s), F::one());
            for k in 0..r {
                let v = eval_at(ideal.generator(k, s), &values)? - &constant[k];
                jac.set(k, j, v);
            }
            values.insert(JetVar::new(j, s), F::zero());
        }
        let ech = rref(&jac);
        if ech.rank() < r {
            return Err(Error::Input(format!(
                "base point is singular: Jacobian rank {} < {} relations",
                ech.rank(),
                r
            )));
        }
        let mut chosen = vec![None; g];
        for j in (0..g).filter(|j| !ech.pivots.contains(j)) {
            chosen[j] = Some(free(rng));
        }
        // Solve J_P x_P = -c - J_free x_free via the nullspace of [J | b].
        let mut aug = Matrix::zeros(r, ech.rank() + 1);
        for k in 0..r {
            let mut rhs = -constant[k].clone();
            for (j, val) in chosen.iter().enumerate() {
                if let Some(val) = val {
                    rhs = rhs - jac.get(k, j).clone() * val;
                }
            }
            for (col, &p) in ech.pivots.iter().enumerate() {
                aug.set(k, col, jac.get(k, p).clone());
            }
            aug.set(k, ech.rank(), -rhs);
        }
        let ns = nullspace(&aug);
        let sol = ns
            .iter()
            .find(|v| !v[ech.rank()].is_zero())
            .ok_or_else(|| Error::Input("level system is inconsistent".into()))?;
        let scale = sol[ech.rank()].inv().expect("nonzero");
        for (col, &p) in ech.pivots.iter().enumerate() {
            chosen[p] = Some(sol[col].clone() * &scale);
        }
        for (j, val) in chosen.into_iter().enumerate() {
            values.insert(JetVar::new(j, s), val.expect("all assigned"));
        }
    }
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basefield::{FieldConfig, RatFunc};
    use num_traits::{One, Zero};
    use rand::SeedableRng;

    type P = DiffPoly<RatFunc>;

    fn v(gen: usize, order: usize) -> P {
        P::var(JetVar::new(gen, order), None)
    }

    fn k(c: RatFunc) -> P {
        P::constant(c, None)
    }

    fn legendre() -> AffineScheme<RatFunc> {
        let x = v(0, 0);
        let y = v(1, 0);
        let one = k(RatFunc::one());
        let t = k(RatFunc::t());
        let f = &(&y * &y) - &(&(&x * &(&x - &one)) * &(&x - &t));
        AffineScheme::new(vec!["x".into(), "y".into()], vec![f]).unwrap()
    }

    #[test]
    fn legendre_first_prolongation() {
        let d = FieldConfig::standard();
        let ideal = prolong_ideal(&legendre(), 1, &d);
        let (x, dx, y, dy) = (v(0, 0), v(0, 1), v(1, 0), v(1, 1));
        let one = k(RatFunc::one());
        let t = k(RatFunc::t());
        let two = k(RatFunc::from_i64(2));
        let expected = &(&(&(&two * &y) * &dy) - &(&(&dx * &(&x - &one)) * &(&x - &t)))
            - &(&(&(&x * &dx) * &(&x - &t)) + &(&(&x * &(&x - &one)) * &(&dx - &one)));
        assert_eq!(ideal.generator(0, 1), &expected);
    }

    #[test]
    fn prolongation_of_a_coordinate() {
        let d = FieldConfig::standard();
        let x = AffineScheme::new(vec!["x".into()], vec![v(0, 0)]).unwrap();
        let ideal = prolong_ideal(&x, 2, &d);
        let gens: Vec<P> = ideal.iter().cloned().collect();
        assert_eq!(gens, vec![v(0, 0), v(0, 1), v(0, 2)]);
        let free = AffineScheme::<RatFunc>::new(vec!["x".into()], vec![]).unwrap();
        assert!(prolong_ideal(&free, 3, &d).is_empty());
    }

    #[test]
    fn exp_del_examples() {
        let d = FieldConfig::standard();
        let t = RatFunc::t();
        assert_eq!(exp_del(&t, 2, &d).coeffs(), &[t.clone(), RatFunc::one(), RatFunc::zero()]);
        let t2 = t.clone() * &t;
        assert_eq!(
            exp_del(&t2, 2, &d).coeffs(),
            &[t2.clone(), RatFunc::from_i64(2) * &t, RatFunc::one()]
        );
    }

    #[test]
    fn twisted_scalar_action() {
        let d = FieldConfig::standard();
        let f = &k(RatFunc::t()) * &v(0, 0);
        let pt = vec![TruncatedElement::new(vec![RatFunc::one(), RatFunc::zero()])];
        let out = eval_truncated(&f, &pt, 1, &d).unwrap();
        assert_eq!(out.coeffs(), &[RatFunc::t(), RatFunc::one()]);
        let a = vec![TruncatedElement::new(vec![RatFunc::from_i64(3), RatFunc::t()])];
        assert_eq!(eval_truncated(&v(0, 0), &a, 1, &d).unwrap(), a[0]);
    }

    #[test]
    fn square_root_jet_evaluates_to_zero() {
        // x^2 - t^2 at the base point x = t.
        let d = FieldConfig::standard();
        let t = RatFunc::t();
        let f = &(&v(0, 0) * &v(0, 0)) - &k(t.clone() * &t);
        let x = AffineScheme::new(vec!["x".into()], vec![f.clone()]).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let vals = solve_jet(&x, std::slice::from_ref(&t), 3, &d, &mut rng, &mut |_| RatFunc::zero()).unwrap();
        assert_eq!(vals[&JetVar::new(0, 1)], RatFunc::one());
        assert!(vals[&JetVar::new(0, 2)].is_zero());
        let pt = hs_point(&vals, 1, 3).unwrap();
        assert!(eval_truncated(&f, &pt, 3, &d).unwrap().is_zero());
    }

    #[test]
    fn oracle_on_torsion_point_jets() {
        let d = FieldConfig::standard();
        let x = legendre();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let vals = solve_jet(&x, &[RatFunc::t(), RatFunc::zero()], 2, &d, &mut rng, &mut |r| {
            RatFunc::from_i64(r.gen_range(-3..=3))
        })
        .unwrap();
        assert_eq!(vals[&JetVar::new(0, 1)], RatFunc::one());
        assert!(jet_point_oracle(&x, 2, &vals, &d).unwrap());
        let mut bad = vals.clone();
        let dx = JetVar::new(0, 1);
        bad.insert(dx, bad[&dx].clone() + &RatFunc::one());
        assert!(!jet_point_oracle(&x, 2, &bad, &d).unwrap());
    }

    #[test]
    fn zero_jet_on_a_line() {
        let d = FieldConfig::standard();
        let x = AffineScheme::new(vec!["x".into()], vec![v(0, 0)]).unwrap();
        let vals: HashMap<JetVar, RatFunc> = (0..=2).map(|i| (JetVar::new(0, i), RatFunc::zero())).collect();
        assert!(jet_point_oracle(&x, 2, &vals, &d).unwrap());
    }
}
