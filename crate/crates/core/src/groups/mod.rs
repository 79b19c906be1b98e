//! Commutative formal group laws with identity at the origin, their jet
//! comultiplications, and the fibre structure of the jet groups.

pub mod additive;
mod catalog;
pub mod derham;
pub mod series;

use std::collections::HashMap;

use crate::basefield::{Derivation, Field};
use crate::diffring::{DiffPoly, JetVar, Side};
use crate::error::{Error, Result};

pub use catalog::{by_name, ga, gm, legendre, product, CATALOG};
pub use derham::{DeRhamBlock, DeRhamModel};

use additive::{combine, enumerate_monomials, kernel_of, monomial_defect, ImageCache};

/// How a law was built, so that it can be rebuilt at another truncation.
#[derive(Clone, Debug)]
enum Recipe<F> {
    /// An honest polynomial law (stored untruncated).
    Polynomial(Vec<DiffPoly<F>>),
    Legendre(F),
    Product(Vec<FormalGroupLaw<F>>),
}

/// F(X, Y) as g polynomials in Left (X) and Right (Y) order-0 variables,
/// truncated at total degree D.
#[derive(Clone, Debug)]
pub struct FormalGroupLaw<F> {
    name: String,
    g: usize,
    comul: Vec<DiffPoly<F>>,
    trunc: u32,
    exact: bool,
    ext_dim: Option<usize>,
    units: Vec<DiffPoly<F>>,
    derham: Option<DeRhamModel<F>>,
    recipe: Recipe<F>,
}

fn law_var<F: Field>(side: Side, gen: usize, trunc: Option<u32>) -> DiffPoly<F> {
    DiffPoly::var(JetVar::new(gen, 0).with_side(side), trunc)
}

fn shift_gens<F: Field>(p: &DiffPoly<F>, by: usize) -> DiffPoly<F> {
    p.map_vars(|v| JetVar::new(v.gen() + by, v.order()).with_side(v.side))
}

impl<F: Field> FormalGroupLaw<F> {
    /// A polynomial law; validated against the law axioms mod degree D+1.
    pub fn polynomial(name: &str, comul: Vec<DiffPoly<F>>, trunc: u32) -> Result<Self> {
        if comul.is_empty() {
            return Err(Error::Input("a group law needs at least one coordinate".into()));
        }
        let g = comul.len();
        let comul: Vec<DiffPoly<F>> = comul.into_iter().map(|p| p.with_trunc(None)).collect();
        for p in &comul {
            for v in p.variables() {
                if v.side == Side::Single || v.order() != 0 || v.gen() >= g {
                    return Err(Error::Input(format!(
                        "law polynomial uses {} outside the coordinates x0..x{} / y0..y{}",
                        crate::diffring::default_var_name(v),
                        g - 1,
                        g - 1
                    )));
                }
            }
        }
        let law = FormalGroupLaw {
            name: name.to_string(),
            g,
            comul: comul.iter().map(|p| p.clone().with_trunc(Some(trunc))).collect(),
            trunc,
            exact: comul.iter().all(|p| p.degree().unwrap_or(0) <= trunc),
            ext_dim: None,
            units: Vec::new(),
            derham: None,
            recipe: Recipe::Polynomial(comul),
        };
        law.check_axioms()?;
        Ok(law)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn g(&self) -> usize {
        self.g
    }

    pub fn comul(&self) -> &[DiffPoly<F>] {
        &self.comul
    }

    pub fn trunc(&self) -> u32 {
        self.trunc
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    /// Declared dim Ext(G, G_a), when known.
    pub fn ext_dim(&self) -> Option<usize> {
        self.ext_dim
    }

    /// Group-like units u(x) (u(F(X,Y)) = u(X)u(Y)), used as invertible
    /// coordinates by the polynomial character solver.
    pub fn units(&self) -> &[DiffPoly<F>] {
        &self.units
    }

    /// The factors, when the law was built as a product.
    pub fn factors(&self) -> Option<&[FormalGroupLaw<F>]> {
        match &self.recipe {
            Recipe::Product(fs) => Some(fs),
            _ => None,
        }
    }

    pub fn derham(&self) -> Option<&DeRhamModel<F>> {
        self.derham.as_ref()
    }

    pub fn with_name(mut self, name: &str) -> Self {
        self.name = name.to_string();
        self
    }

    pub fn with_ext_dim(mut self, r: Option<usize>) -> Self {
        self.ext_dim = r;
        self
    }

    pub fn with_derham(mut self, m: DeRhamModel<F>) -> Self {
        self.derham = Some(m);
        self
    }

    /// Attach group-like units, checking u(0) ≠ 0 and u(F) = u(X)u(Y).
    pub fn with_units(mut self, units: Vec<DiffPoly<F>>) -> Result<Self> {
        for u in &units {
            for v in u.variables() {
                if v.side != Side::Single || v.order() != 0 || v.gen() >= self.g {
                    return Err(Error::Input(format!("unit {} must be a polynomial in x0..x{}", u, self.g - 1)));
                }
            }
            if u.constant_term().is_zero() {
                return Err(Error::Input(format!("unit {} vanishes at the identity", u)));
            }
            let t = Some(self.trunc);
            let lhs = self.compose_single(u, t)?;
            let rhs = &u.with_side(Side::Left) * &u.with_side(Side::Right);
            if !(&lhs - &rhs.with_trunc(t)).is_zero() {
                return Err(Error::Axiom {
                    axiom: "unit".into(),
                    detail: format!("{} is not group-like", u),
                });
            }
        }
        self.units = units.into_iter().map(|u| u.with_trunc(None)).collect();
        Ok(self)
    }

    /// p(F(X, Y)) for p in Single order-0 variables.
    pub fn compose_single(&self, p: &DiffPoly<F>, trunc: Option<u32>) -> Result<DiffPoly<F>> {
        let images: HashMap<JetVar, DiffPoly<F>> = (0..self.g)
            .map(|j| (JetVar::new(j, 0), self.comul[j].clone()))
            .collect();
        p.substitute(&images, trunc)
    }

    /// The same group rebuilt at another truncation degree.
    pub fn at_trunc(&self, trunc: u32) -> Result<Self> {
        let base = match &self.recipe {
            Recipe::Polynomial(c) => FormalGroupLaw::polynomial(&self.name, c.clone(), trunc)?,
            Recipe::Legendre(l) => legendre(l.clone(), trunc)?,
            Recipe::Product(fs) => {
                let fs = fs.iter().map(|f| f.at_trunc(trunc)).collect::<Result<Vec<_>>>()?;
                product(&fs)?
            }
        };
        let mut out = base.with_name(&self.name).with_ext_dim(self.ext_dim);
        out.units = self.units.clone();
        out.derham = self.derham.clone();
        Ok(out)
    }

    /// Identity, commutativity and associativity mod degree D+1
    /// (associativity at degree min(D, 6) for non-polynomial laws).
    pub fn check_axioms(&self) -> Result<()> {
        let t = Some(self.trunc);
        let fail = |axiom: &str, j: usize, diff: &DiffPoly<F>| Error::Axiom {
            axiom: axiom.into(),
            detail: format!("coordinate {} differs by {}", j, diff),
        };
        for (j, f) in self.comul.iter().enumerate() {
            let left_only = f.kill_vars(|v| v.side == Side::Right);
            let d = &left_only - &law_var(Side::Left, j, t);
            if !d.is_zero() {
                return Err(fail("identity", j, &d));
            }
            let right_only = f.kill_vars(|v| v.side == Side::Left);
            let d = &right_only - &law_var(Side::Right, j, t);
            if !d.is_zero() {
                return Err(fail("identity", j, &d));
            }
            let swapped = f.map_vars(|v| {
                v.with_side(match v.side {
                    Side::Left => Side::Right,
                    Side::Right => Side::Left,
                    s => s,
                })
            });
            let d = f - &swapped;
            if !d.is_zero() {
                return Err(fail("commutativity", j, &d));
            }
        }
        let at = if matches!(self.recipe, Recipe::Polynomial(_)) {
            self.trunc
        } else {
            self.trunc.min(6)
        };
        let t = Some(at);
        let mut lhs_img = HashMap::new();
        let mut rhs_img = HashMap::new();
        for j in 0..self.g {
            let f = self.comul[j].clone().with_trunc(t);
            lhs_img.insert(JetVar::left(j, 0), f.clone());
            lhs_img.insert(JetVar::right(j, 0), law_var(Side::Single, j, t));
            rhs_img.insert(JetVar::left(j, 0), law_var(Side::Left, j, t));
            rhs_img.insert(
                JetVar::right(j, 0),
                f.map_vars(|v| {
                    v.with_side(match v.side {
                        Side::Left => Side::Right,
                        _ => Side::Single,
                    })
                }),
            );
        }
        for (j, f) in self.comul.iter().enumerate() {
            let f = f.clone().with_trunc(t);
            let d = &f.substitute(&lhs_img, t)? - &f.substitute(&rhs_img, t)?;
            if !d.is_zero() {
                return Err(fail("associativity", j, &d));
            }
        }
        Ok(())
    }

    /// ℓ(x) = ∫ dx / (∂F/∂Y)(x, 0), to degree D (one-dimensional laws).
    pub fn formal_log(&self) -> Result<Vec<F>> {
        if self.g != 1 {
            return Err(Error::Input("formal logarithm needs a one-dimensional law".into()));
        }
        let len = self.trunc as usize + 1;
        let mut dfdy = vec![F::zero(); len];
        let y = JetVar::right(0, 0);
        let x = JetVar::left(0, 0);
        for (m, c) in self.comul[0].terms() {
            if m.exponent(y) == 1 {
                let k = m.exponent(x) as usize;
                if k < len {
                    dfdy[k] = dfdy[k].clone() + c;
                }
            }
        }
        let omega = series::inverse(&dfdy, len);
        Ok(series::integrate(&omega, len))
    }

    pub fn jet_comul(&self, n: usize, d: &dyn Derivation<F>) -> JetComul<F> {
        JetComul::new(&self.comul, n, d)
    }

    /// The literal test: every ∂^i x_j with 1 ≤ i ≤ n maps to
    /// ∂^i x_j⊗1 + 1⊗∂^i x_j once all order-0 variables are set to 0.
    pub fn check_nn_additive(&self, n: usize, d: &dyn Derivation<F>) -> bool {
        let jc = self.jet_comul(n, d);
        let t = Some(self.trunc);
        (1..=n).all(|i| {
            (0..self.g).all(|j| {
                let r = jc.image(JetVar::new(j, i)).expect("in range").restrict_to_n();
                let want = &DiffPoly::var(JetVar::left(j, i), t) + &DiffPoly::var(JetVar::right(j, i), t);
                (&r - &want).is_zero()
            })
        })
    }

    /// Additive coordinates on N^nG: polynomials in the order-1..n jets
    /// that are additive for the restricted law and whose linear parts are
    /// the ∂^i x_j. Returns None when no such coordinate system exists.
    pub fn nn_coordinates(&self, n: usize, d: &dyn Derivation<F>) -> Result<Option<NnCoordinates<F>>> {
        if n == 0 {
            return Ok(Some(NnCoordinates {
                n,
                g: self.g,
                coords: Vec::new(),
                law: HashMap::new(),
            }));
        }
        if (self.trunc as usize) < n {
            return Err(Error::Input(format!(
                "truncation {} too small to determine N^{}G",
                self.trunc, n
            )));
        }
        let jc = self.jet_comul(n, d);
        let mut law = HashMap::new();
        let mut vars = Vec::new();
        for i in 1..=n {
            for j in 0..self.g {
                let v = JetVar::new(j, i);
                vars.push(v);
                law.insert(v, jc.image(v).expect("in range").restrict_to_n().with_trunc(None));
            }
        }
        let mut cache = ImageCache::new(law.clone(), None);
        let ms = enumerate_monomials(&vars, 1, n as u32, n);
        let defects = ms
            .iter()
            .map(|m| monomial_defect(&mut cache, m))
            .collect::<Result<Vec<_>>>()?;
        let sols: Vec<DiffPoly<F>> = kernel_of(&defects).iter().map(|v| combine(&ms, v, None)).collect();
        let mut coords = Vec::new();
        for v in &vars {
            // the solution whose linear part is exactly v
            let rows: Vec<Vec<F>> = sols
                .iter()
                .map(|s| {
                    let lin = s.linear_part();
                    vars.iter().map(|w| lin.get(w).cloned().unwrap_or_else(F::zero)).collect()
                })
                .collect();
            let target: Vec<F> = vars.iter().map(|w| if w == v { F::one() } else { F::zero() }).collect();
            let Some(c) = solve_combination(&rows, &target) else {
                return Ok(None);
            };
            let mut p = DiffPoly::zero(None);
            for (s, ck) in sols.iter().zip(&c) {
                p.add_scaled(s, ck);
            }
            coords.push(p);
        }
        Ok(Some(NnCoordinates {
            n,
            g: self.g,
            coords,
            law,
        }))
    }

    /// The degree-1 part of images(∂^n x_j) in order-n variables is
    /// ∂^n x_j⊗1 + 1⊗∂^n x_j.
    pub fn check_hn_linear(&self, n: usize, d: &dyn Derivation<F>) -> bool {
        let jc = self.jet_comul(n, d);
        (0..self.g).all(|j| {
            let lin = jc.image(JetVar::new(j, n)).expect("in range").linear_part();
            let top: Vec<(JetVar, F)> = lin.into_iter().filter(|(v, _)| v.order() == n).collect();
            top.len() == 2
                && top.iter().all(|(v, c)| {
                    c.is_one() && v.gen() == j && (v.side == Side::Left || v.side == Side::Right)
                })
        })
    }
}

/// Solve Σ c_k rows[k] = target, if possible.
fn solve_combination<F: Field>(rows: &[Vec<F>], target: &[F]) -> Option<Vec<F>> {
    let k = rows.len();
    let cols = target.len();
    // columns of the system are the rows; append the target as last unknown
    let mut ech = crate::basefield::SparseEchelon::new(k + 1);
    for c in 0..cols {
        let mut entries: Vec<(usize, F)> = (0..k).map(|i| (i, rows[i][c].clone())).collect();
        entries.push((k, -target[c].clone()));
        ech.insert(entries);
    }
    let ns = ech.nullspace();
    let v = ns.iter().find(|v| !v[k].is_zero())?;
    let s = v[k].inv()?;
    Some(v[..k].iter().map(|x| x.clone() * &s).collect())
}

/// An explicit isomorphism N^nG ≅ G_a^{ng}.
#[derive(Clone, Debug)]
pub struct NnCoordinates<F> {
    pub n: usize,
    pub g: usize,
    /// One additive polynomial per ∂^i x_j, i = 1..n, in that order.
    pub coords: Vec<DiffPoly<F>>,
    /// The restricted law on N^nG.
    pub law: HashMap<JetVar, DiffPoly<F>>,
}

/// images(∂^i x_j) for i ≤ level, built by repeated total derivation in the
/// tensor-square ring.
#[derive(Clone, Debug)]
pub struct JetComul<F> {
    level: usize,
    images: Vec<Vec<DiffPoly<F>>>,
}

impl<F: Field> JetComul<F> {
    pub fn new(base: &[DiffPoly<F>], level: usize, d: &dyn Derivation<F>) -> Self {
        let images = base
            .iter()
            .map(|b| {
                let mut v = vec![b.clone()];
                for _ in 0..level {
                    let next = v.last().expect("nonempty").total_derive(d);
                    v.push(next);
                }
                v
            })
            .collect();
        JetComul { level, images }
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn gens(&self) -> usize {
        self.images.len()
    }

    pub fn image(&self, v: JetVar) -> Option<&DiffPoly<F>> {
        if v.side != Side::Single {
            return None;
        }
        self.images.get(v.gen())?.get(v.order())
    }

    pub fn image_map(&self) -> HashMap<JetVar, DiffPoly<F>> {
        let mut m = HashMap::new();
        for (j, row) in self.images.iter().enumerate() {
            for (i, p) in row.iter().enumerate() {
                m.insert(JetVar::new(j, i), p.clone());
            }
        }
        m
    }

    pub fn apply(&self, p: &DiffPoly<F>) -> Result<DiffPoly<F>> {
        if let Some(o) = p.max_order() {
            if o > self.level {
                return Err(Error::OrderOverflow {
                    order: o,
                    max: self.level,
                });
            }
        }
        let t = self.images.first().and_then(|r| r[0].trunc());
        p.substitute_with(|v| self.image(v), t)
    }

    /// p(images) - p(Left) - p(Right).
    pub fn defect(&self, p: &DiffPoly<F>) -> Result<DiffPoly<F>> {
        let img = self.apply(p)?;
        let t = img.trunc();
        let l = p.with_side(Side::Left).with_trunc(t);
        let r = p.with_side(Side::Right).with_trunc(t);
        Ok(&(&img - &l) - &r)
    }
}

/// Every single-side jet variable ∂^i x_j with j < g and i ≤ n, ordered by
/// generator then order.
pub fn jet_vars(g: usize, n: usize) -> Vec<JetVar> {
    (0..g).flat_map(|j| (0..=n).map(move |i| JetVar::new(j, i))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basefield::{rat, FieldConfig, RatFunc, Rational, ZeroDerivation};

    fn lv(j: usize, i: usize) -> DiffPoly<Rational> {
        DiffPoly::var(JetVar::left(j, i), Some(8))
    }

    fn rv(j: usize, i: usize) -> DiffPoly<Rational> {
        DiffPoly::var(JetVar::right(j, i), Some(8))
    }

    #[test]
    fn gm_first_jet() {
        let g = gm::<Rational>(8);
        let jc = g.jet_comul(1, &ZeroDerivation);
        let want = &(&(&lv(0, 1) + &rv(0, 1)) + &(&lv(0, 1) * &rv(0, 0))) + &(&lv(0, 0) * &rv(0, 1));
        assert_eq!(jc.image(JetVar::new(0, 1)).unwrap(), &want);
    }

    #[test]
    fn gm_log_is_log() {
        let l = gm::<Rational>(5).formal_log().unwrap();
        assert_eq!(l, vec![rat(0, 1), rat(1, 1), rat(-1, 2), rat(1, 3), rat(-1, 4), rat(1, 5)]);
    }

    #[test]
    fn legendre_log_round_trip() {
        let g = legendre(RatFunc::t(), 6).unwrap();
        g.check_axioms().unwrap();
        let l = g.formal_log().unwrap();
        let x = DiffPoly::var(JetVar::left(0, 0), Some(6));
        let y = DiffPoly::var(JetVar::right(0, 0), Some(6));
        let lf = series::apply(&l, &g.comul()[0]);
        let sum = &series::apply(&l, &x) + &series::apply(&l, &y);
        assert!((&lf - &sum).is_zero());
        // F = X + Y + cubic terms
        let f = &g.comul()[0];
        assert!(f.terms().all(|(m, _)| m.degree() == 1 || m.degree() >= 3));
    }

    #[test]
    fn nn_literal_and_certificate() {
        let d = FieldConfig::standard();
        assert!(ga::<RatFunc>(6).check_nn_additive(3, &d));
        assert!(gm::<RatFunc>(6).check_nn_additive(1, &d));
        assert!(!gm::<RatFunc>(6).check_nn_additive(2, &d));
        let leg = legendre(RatFunc::t(), 6).unwrap();
        assert!(leg.check_nn_additive(2, &d));
        assert!(!leg.check_nn_additive(3, &d));
        for g in [gm::<RatFunc>(6), leg] {
            for n in 1..=3 {
                let c = g.nn_coordinates(n, &d).unwrap().expect("vector group");
                assert_eq!(c.coords.len(), n);
            }
        }
    }

    #[test]
    fn hn_linearity() {
        let d = FieldConfig::standard();
        let leg = legendre(RatFunc::t(), 6).unwrap();
        for n in 1..=3 {
            assert!(leg.check_hn_linear(n, &d));
            assert!(gm::<RatFunc>(6).check_hn_linear(n, &d));
        }
    }

    #[test]
    fn broken_law_rejected() {
        let bad = &(&lv(0, 0) + &rv(0, 0)) + &(&lv(0, 0) * &lv(0, 0));
        let e = FormalGroupLaw::polynomial("bad", vec![bad], 4).unwrap_err();
        assert!(matches!(e, Error::Axiom { .. }));
    }

    #[test]
    fn unit_must_be_group_like() {
        let one_plus_x = &DiffPoly::<Rational>::one(None) + &DiffPoly::var(JetVar::new(0, 0), None);
        assert!(gm::<Rational>(4).with_units(vec![one_plus_x.clone()]).is_ok());
        assert!(ga::<Rational>(4).with_units(vec![one_plus_x]).is_err());
    }

    #[test]
    fn rebuild_at_other_truncation() {
        let leg = legendre(RatFunc::t(), 4).unwrap();
        let bigger = leg.at_trunc(6).unwrap();
        assert_eq!(bigger.trunc(), 6);
        let back = bigger.comul()[0].clone().with_trunc(Some(4));
        assert_eq!(back, leg.comul()[0]);
    }
}
