//! Differential characters X_n(G): solving for them, the ∂-action, the
//! primitive dimensions l_n and h_n, splitting numbers and a primitive basis.

pub mod checks;
mod space;

use std::collections::HashMap;

use serde::Serialize;

use crate::basefield::{Derivation, Field, Matrix, SparseEchelon};
use crate::diffring::{DiffPoly, JetVar, Side};
use crate::error::{Error, Result};
use crate::groups::additive::{combine, enumerate_monomials, kernel_of, monomial_defect, ImageCache};
use crate::groups::{jet_vars, FormalGroupLaw, JetComul};

pub use space::{echelon_basis, span_rank};
use space::PolySpace;

/// Which linear system is used to find characters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveRoute {
    /// Formal when a de Rham model is known, polynomial otherwise.
    Auto,
    /// Polynomials in the coordinate jets and the jets of inverted units.
    Polynomial,
    /// Additive formal series, filtered by the Gauss-Manin obstruction.
    Formal,
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub route: SolveRoute,
    /// Degree bound of the polynomial ansatz in coordinate jets.
    pub ansatz_degree: u32,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            route: SolveRoute::Auto,
            ansatz_degree: 2,
        }
    }
}

/// A character Θ: J^nG → G_a, stored through its expansion at the identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Character<F> {
    pub level: usize,
    pub theta: DiffPoly<F>,
    /// Highest jet order with a nonzero linear coefficient.
    pub strict_order: Option<usize>,
    /// Coefficients of ∂^s x_0, …, ∂^s x_{g-1} at the strict order s.
    pub leading: Vec<F>,
}

impl<F: Field> Character<F> {
    pub fn new(theta: DiffPoly<F>, level: usize, g: usize) -> Self {
        let lin = theta.linear_part();
        let strict_order = lin
            .iter()
            .filter(|(v, c)| v.side == Side::Single && !c.is_zero())
            .map(|(v, _)| v.order())
            .max();
        let leading = match strict_order {
            Some(s) => (0..g)
                .map(|j| lin.get(&JetVar::new(j, s)).cloned().unwrap_or_else(F::zero))
                .collect(),
            None => vec![F::zero(); g],
        };
        Character {
            level,
            theta,
            strict_order,
            leading,
        }
    }

    /// Coefficient of ∂^i x_j in the linear part.
    pub fn linear_coeff(&self, j: usize, i: usize) -> F {
        self.theta.coeff(&crate::diffring::Monomial::var(JetVar::new(j, i)))
    }
}

/// p(images) - p(Left) - p(Right) under the level-n jet comultiplication.
pub fn additivity_defect<F: Field>(
    law: &FormalGroupLaw<F>,
    n: usize,
    p: &DiffPoly<F>,
    d: &dyn Derivation<F>,
) -> Result<DiffPoly<F>> {
    let jc = law.jet_comul(n, d);
    jc.defect(&p.clone().with_trunc(Some(law.trunc())))
}

fn resolve_route<F: Field>(law: &FormalGroupLaw<F>, route: SolveRoute) -> SolveRoute {
    match route {
        SolveRoute::Auto if law.derham().is_some() => SolveRoute::Formal,
        SolveRoute::Auto => SolveRoute::Polynomial,
        r => r,
    }
}

/// Basis of X_n(G) in canonical echelon form.
pub fn solve_characters<F: Field>(
    law: &FormalGroupLaw<F>,
    n: usize,
    d: &dyn Derivation<F>,
    opts: &SolveOptions,
) -> Result<Vec<Character<F>>> {
    let polys = solve_polys(law, n, d, opts)?;
    let ident: Vec<usize> = (0..law.g()).collect();
    Ok(echelon_basis(&polys, &ident)
        .into_iter()
        .map(|p| Character::new(p, n, law.g()))
        .collect())
}

fn solve_polys<F: Field>(
    law: &FormalGroupLaw<F>,
    n: usize,
    d: &dyn Derivation<F>,
    opts: &SolveOptions,
) -> Result<Vec<DiffPoly<F>>> {
    if let Some(factors) = law.factors() {
        // characters of a product are sums of characters of the factors
        let mut out = Vec::new();
        let mut off = 0;
        for f in factors {
            for p in solve_polys(f, n, d, opts)? {
                out.push(p.map_vars(|v| JetVar::new(v.gen() + off, v.order()).with_side(v.side)));
            }
            off += f.g();
        }
        return Ok(out);
    }
    match resolve_route(law, opts.route) {
        SolveRoute::Formal => solve_formal(law, n, d),
        _ => solve_polynomial(law, n, d, opts.ansatz_degree),
    }
}

fn solve_formal<F: Field>(law: &FormalGroupLaw<F>, n: usize, d: &dyn Derivation<F>) -> Result<Vec<DiffPoly<F>>> {
    let model = law
        .derham()
        .ok_or_else(|| Error::Input(format!("group {} has no de Rham model for the formal route", law.name())))?;
    let t = Some(law.trunc());
    let jc = law.jet_comul(n, d);
    let mut cache = ImageCache::new(jc.image_map(), t);
    let ms = enumerate_monomials(&jet_vars(law.g(), n), 1, law.trunc(), n);
    let defects = ms
        .iter()
        .map(|m| monomial_defect(&mut cache, m))
        .collect::<Result<Vec<_>>>()?;
    let sols: Vec<DiffPoly<F>> = kernel_of(&defects).iter().map(|v| combine(&ms, v, t)).collect();
    let h = model.dim();
    if h == 0 || sols.is_empty() {
        return Ok(sols);
    }
    let obs: Vec<Vec<F>> = sols.iter().map(|s| model.obstruction(&s.linear_part(), d)).collect();
    let mut ech = SparseEchelon::new(sols.len());
    for c in 0..h {
        ech.insert((0..sols.len()).map(|k| (k, obs[k][c].clone())));
    }
    Ok(ech
        .nullspace()
        .iter()
        .map(|beta| {
            let mut p = DiffPoly::zero(t);
            for (s, b) in sols.iter().zip(beta) {
                p.add_scaled(s, b);
            }
            p
        })
        .collect())
}

/// 1/u as a series truncated at degree `trunc`.
fn inverse_series<F: Field>(u: &DiffPoly<F>, trunc: u32) -> DiffPoly<F> {
    let t = Some(trunc);
    let c = u.constant_term();
    let cinv = c.inv().expect("unit with nonzero constant term");
    let mut r = u.clone().with_trunc(t);
    r.add_term(crate::diffring::Monomial::one(), -c);
    let q = r.scale(&-cinv.clone());
    // 1/u = c^{-1} Σ q^k
    let mut acc = DiffPoly::one(t);
    let mut pw = DiffPoly::one(t);
    for _ in 0..trunc {
        pw = &pw * &q;
        if pw.is_zero() {
            break;
        }
        acc.add_assign(&pw);
    }
    acc.scale(&cinv)
}

fn solve_polynomial<F: Field>(
    law: &FormalGroupLaw<F>,
    n: usize,
    d: &dyn Derivation<F>,
    degree: u32,
) -> Result<Vec<DiffPoly<F>>> {
    if !law.is_exact() {
        return Err(Error::Input(format!(
            "group {} is only known to degree {}; the polynomial route needs an exact law",
            law.name(),
            law.trunc()
        )));
    }
    let g = law.g();
    let units = law.units();
    let t = Some(law.trunc());
    let mut base: Vec<DiffPoly<F>> = law.comul().iter().map(|p| p.clone().with_trunc(None)).collect();
    for k in 0..units.len() {
        base.push(&DiffPoly::var(JetVar::left(g + k, 0), None) * &DiffPoly::var(JetVar::right(g + k, 0), None));
    }
    let jc = JetComul::new(&base, n, d);
    let mut coord = ImageCache::new(jc.image_map(), None);

    // expansions of coordinate jets at the identity, on each side
    let mut expansions: HashMap<Side, HashMap<JetVar, DiffPoly<F>>> = HashMap::new();
    for side in [Side::Single, Side::Left, Side::Right] {
        let mut m = HashMap::new();
        for j in 0..g {
            for i in 0..=n {
                let v = JetVar::new(j, i).with_side(side);
                m.insert(v, DiffPoly::var(v, t));
            }
        }
        for (k, u) in units.iter().enumerate() {
            let mut e = inverse_series(&u.with_side(side), law.trunc());
            for i in 0..=n {
                m.insert(JetVar::new(g + k, i).with_side(side), e.clone());
                e = e.total_derive(d);
            }
        }
        expansions.insert(side, m);
    }
    let mut pair: HashMap<JetVar, DiffPoly<F>> = expansions[&Side::Left].clone();
    pair.extend(expansions[&Side::Right].clone());
    let mut pair = ImageCache::new(pair, t);
    let mut single = ImageCache::new(expansions.remove(&Side::Single).expect("present"), t);

    let ms = enumerate_monomials(&jet_vars(g + units.len(), n), 0, degree, n);
    let mut defects = Vec::with_capacity(ms.len());
    for m in &ms {
        let exact = monomial_defect(&mut coord, m)?;
        defects.push(pair.apply(&exact)?);
    }
    kernel_of(&defects)
        .iter()
        .map(|v| single.apply(&combine(&ms, v, None)))
        .filter(|r| r.as_ref().map_or(true, |p| !p.is_zero()))
        .collect()
}

/// ∂Θ, re-verified to be a character of the next order.
pub fn del_action<F: Field>(law: &FormalGroupLaw<F>, ch: &Character<F>, d: &dyn Derivation<F>) -> Result<Character<F>> {
    let next = ch.theta.total_derive(d);
    let defect = additivity_defect(law, ch.level + 1, &next, d)?;
    if !defect.is_zero() {
        return Err(Error::invariant(
            "del-action",
            format!("the derivative of a character has defect {}", defect),
        ));
    }
    Ok(Character::new(next, ch.level + 1, law.g()))
}

/// l_i = dim X_i - dim(X_{i-1} + ∂X_{i-1}). Also checks ∂X_{i-1} ⊆ X_i.
pub fn primitive_dims<F: Field>(bases: &[Vec<Character<F>>], d: &dyn Derivation<F>) -> Result<Vec<usize>> {
    let mut l = Vec::with_capacity(bases.len());
    for (i, b) in bases.iter().enumerate() {
        if i == 0 {
            l.push(b.len());
            continue;
        }
        let w = lower_span(&bases[i - 1], d);
        let mut universe: Vec<&DiffPoly<F>> = b.iter().map(|c| &c.theta).collect();
        universe.extend(w.iter());
        let mut xi = PolySpace::new(universe.iter().copied(), &[]);
        for c in b {
            xi.insert(&c.theta);
        }
        if let Some(bad) = w.iter().find(|p| !xi.contains(p)) {
            return Err(Error::invariant(
                "del-action",
                format!("{} is not in X_{}", bad, i),
            ));
        }
        let r = span_rank(&w);
        l.push(b.len() - r);
    }
    Ok(l)
}

fn lower_span<F: Field>(prev: &[Character<F>], d: &dyn Derivation<F>) -> Vec<DiffPoly<F>> {
    let mut w: Vec<DiffPoly<F>> = prev.iter().map(|c| c.theta.clone()).collect();
    w.extend(prev.iter().map(|c| c.theta.total_derive(d)));
    w
}

/// h_0 = 0, h_1 = g - l_0 - l_1, h_n = h_{n-1} - l_n.
pub fn derive_h(l: &[usize], g: usize) -> Result<Vec<usize>> {
    let mut h: Vec<i64> = vec![0];
    for n in 1..l.len() {
        let v = if n == 1 {
            g as i64 - l[0] as i64 - l[1] as i64
        } else {
            h[n - 1] - l[n] as i64
        };
        if v < 0 {
            return Err(Error::invariant("h-nonnegative", format!("h_{} = {} for l = {:?}", n, v, l)));
        }
        if n >= 2 && v > h[n - 1] {
            return Err(Error::invariant("h-decreasing", format!("h_{} > h_{}", n, n - 1)));
        }
        h.push(v);
    }
    Ok(h.into_iter().map(|x| x as usize).collect())
}

/// (m_l, m_u): the first order with characters and the largest order with
/// primitive characters.
pub fn splitting_numbers(dims: &[usize], l: &[usize], g: usize) -> Result<(usize, usize)> {
    let total: usize = l.iter().sum();
    if total < g {
        return Err(Error::invariant(
            "primitive-count",
            format!(
                "only {} of {} primitive characters found up to order {}; raise --max-order",
                total,
                g,
                l.len().saturating_sub(1)
            ),
        ));
    }
    if total > g {
        return Err(Error::invariant("primitive-count", format!("{} primitive characters for g = {}", total, g)));
    }
    let m_l = dims.iter().position(|&x| x > 0).expect("total > 0");
    let m_u = l.iter().rposition(|&x| x > 0).expect("total > 0");
    if m_l > m_u {
        return Err(Error::invariant("splitting", format!("m_l = {} > m_u = {}", m_l, m_u)));
    }
    Ok((m_l, m_u))
}

/// g primitive characters Θ_i, their prolongations Θ̃_i = ∂^{m-o_i}Θ_i and
/// the matrix A of leading rows at order m.
#[derive(Clone, Debug)]
pub struct PrimitiveBasis<F> {
    pub characters: Vec<Character<F>>,
    pub orders: Vec<usize>,
    pub m: usize,
    pub tilde: Vec<Character<F>>,
    pub a: Matrix<F>,
}

pub fn primitive_basis<F: Field>(
    law: &FormalGroupLaw<F>,
    bases: &[Vec<Character<F>>],
    l: &[usize],
    d: &dyn Derivation<F>,
    gen_order: &[usize],
) -> Result<PrimitiveBasis<F>> {
    let g = law.g();
    let mut characters = Vec::new();
    for (i, b) in bases.iter().enumerate() {
        if l.get(i).copied().unwrap_or(0) == 0 {
            continue;
        }
        let w = if i == 0 { Vec::new() } else { lower_span(&bases[i - 1], d) };
        let mut universe: Vec<&DiffPoly<F>> = b.iter().map(|c| &c.theta).collect();
        universe.extend(w.iter());
        let mut ws = PolySpace::new(universe.iter().copied(), gen_order);
        for p in &w {
            ws.insert(p);
        }
        let residues: Vec<DiffPoly<F>> = b.iter().map(|c| ws.reduce(&c.theta)).filter(|p| !p.is_zero()).collect();
        let chosen = echelon_basis(&residues, gen_order);
        if chosen.len() != l[i] {
            return Err(Error::invariant(
                "primitive-quotient",
                format!("quotient at order {} has dimension {} but l = {}", i, chosen.len(), l[i]),
            ));
        }
        for p in chosen {
            characters.push(Character::new(p, i, g));
        }
    }
    if characters.len() != g {
        return Err(Error::invariant(
            "primitive-count",
            format!("{} primitive characters for g = {}", characters.len(), g),
        ));
    }
    primitive_from_characters(law, characters, d)
}

/// Prolongations and leading matrix for a given primitive family; A must be
/// invertible.
pub fn primitive_from_characters<F: Field>(
    law: &FormalGroupLaw<F>,
    characters: Vec<Character<F>>,
    d: &dyn Derivation<F>,
) -> Result<PrimitiveBasis<F>> {
    let g = law.g();
    if characters.len() != g {
        return Err(Error::Input(format!("{} characters given for g = {}", characters.len(), g)));
    }
    let orders: Vec<usize> = characters.iter().map(|c| c.level).collect();
    let m = *orders.iter().max().expect("g > 0");
    let mut tilde = Vec::with_capacity(g);
    for c in &characters {
        let mut cur = c.clone();
        for _ in c.level..m {
            cur = del_action(law, &cur, d)?;
        }
        tilde.push(cur);
    }
    let a = Matrix::from_rows(
        g,
        tilde
            .iter()
            .map(|c| (0..g).map(|j| c.linear_coeff(j, m)).collect())
            .collect(),
    );
    if crate::basefield::rank(&a) != g {
        return Err(Error::invariant("leading-matrix", format!("A is singular:\n{}", a)));
    }
    Ok(PrimitiveBasis {
        characters,
        orders,
        m,
        tilde,
        a,
    })
}

/// ι*Θ = L(Θ): setting all variables of order below the strict order to
/// zero leaves exactly A_s·∂^s x.
pub fn iota_leading_check<F: Field>(ch: &Character<F>) -> bool {
    let Some(s) = ch.strict_order else {
        return false;
    };
    let restricted = ch.theta.kill_vars(|v| v.order() < s);
    let mut lead = DiffPoly::zero(ch.theta.trunc());
    for (j, a) in ch.leading.iter().enumerate() {
        lead.add_term(crate::diffring::Monomial::var(JetVar::new(j, s)), a.clone());
    }
    (&restricted - &lead).is_zero()
}

#[derive(Clone, Debug)]
pub struct AnalyzeOptions {
    pub solve: SolveOptions,
    /// Generator priority for echelon pivots of the primitive basis.
    pub gen_order: Option<Vec<usize>>,
    /// Recompute at D+2 and compare dimensions (laws that are truncated
    /// somewhere: formal laws, or laws with unit inverses).
    pub check_stability: bool,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions {
            solve: SolveOptions::default(),
            gen_order: None,
            check_stability: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Stability {
    pub checked: bool,
    pub trunc: u32,
    pub compared_with: Option<u32>,
    pub dims_compared: Option<Vec<usize>>,
}

/// Everything computed about X_•(G) up to a maximal order.
#[derive(Clone, Debug)]
pub struct CharacterSpace<F> {
    pub g: usize,
    pub trunc: u32,
    pub max_order: usize,
    pub bases: Vec<Vec<Character<F>>>,
    pub dims: Vec<usize>,
    pub l: Vec<usize>,
    pub h: Vec<usize>,
    pub m_l: usize,
    pub m_u: usize,
    pub primitive: PrimitiveBasis<F>,
    pub stability: Stability,
}

pub fn analyze<F: Field>(
    law: &FormalGroupLaw<F>,
    max_order: usize,
    d: &dyn Derivation<F>,
    opts: &AnalyzeOptions,
) -> Result<CharacterSpace<F>> {
    let g = law.g();
    let bases = (0..=max_order)
        .map(|n| solve_characters(law, n, d, &opts.solve))
        .collect::<Result<Vec<_>>>()?;
    let dims: Vec<usize> = bases.iter().map(Vec::len).collect();
    let stability = if opts.check_stability && (!law.is_exact() || !law.units().is_empty()) {
        let hi = law.at_trunc(law.trunc() + 2)?;
        let dims_hi = (0..=max_order)
            .map(|n| solve_characters(&hi, n, d, &opts.solve).map(|b| b.len()))
            .collect::<Result<Vec<_>>>()?;
        if dims_hi != dims {
            return Err(Error::Truncation(format!(
                "dim X_n = {:?} at D = {} but {:?} at D = {}",
                dims,
                law.trunc(),
                dims_hi,
                law.trunc() + 2
            )));
        }
        Stability {
            checked: true,
            trunc: law.trunc(),
            compared_with: Some(law.trunc() + 2),
            dims_compared: Some(dims_hi),
        }
    } else {
        Stability {
            checked: false,
            trunc: law.trunc(),
            compared_with: None,
            dims_compared: None,
        }
    };
    let l = primitive_dims(&bases, d)?;
    let h = derive_h(&l, g)?;
    let (m_l, m_u) = splitting_numbers(&dims, &l, g)?;
    let gen_order = opts.gen_order.clone().unwrap_or_else(|| (0..g).collect());
    let primitive = primitive_basis(law, &bases, &l, d, &gen_order)?;
    Ok(CharacterSpace {
        g,
        trunc: law.trunc(),
        max_order,
        bases,
        dims,
        l,
        h,
        m_l,
        m_u,
        primitive,
        stability,
    })
}

/// Default maximal order: r + 2 when r is declared, else 4.
pub fn default_max_order(ext_dim: Option<usize>) -> usize {
    ext_dim.map_or(4, |r| r + 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basefield::{FieldConfig, RatFunc, Rational, ZeroDerivation};
    use crate::groups::{by_name, gm, legendre};
    use num_traits::One;

    fn cat(name: &str, trunc: u32) -> FormalGroupLaw<RatFunc> {
        by_name(name, trunc, &RatFunc::t()).unwrap()
    }

    fn dims(law: &FormalGroupLaw<RatFunc>, max: usize, route: SolveRoute) -> Vec<usize> {
        let opts = SolveOptions {
            route,
            ..SolveOptions::default()
        };
        (0..=max)
            .map(|n| solve_characters(law, n, &FieldConfig::standard(), &opts).unwrap().len())
            .collect()
    }

    #[test]
    fn gm_dlog_has_zero_defect() {
        let g = gm::<Rational>(8);
        let x = |i| DiffPoly::var(JetVar::new(0, i), Some(8));
        let geo: DiffPoly<Rational> = DiffPoly::from_terms(
            (0..8).map(|k| {
                (
                    crate::diffring::Monomial::from_pairs([(JetVar::new(0, 0), k)]),
                    Rational::from_i64(if k % 2 == 0 { 1 } else { -1 }),
                )
            }),
            Some(8),
        );
        let dlog = &x(1) * &geo;
        assert!(additivity_defect(&g, 1, &dlog, &ZeroDerivation).unwrap().is_zero());
        assert!(!additivity_defect(&g, 1, &x(1), &ZeroDerivation).unwrap().is_zero());
    }

    #[test]
    fn catalog_dimensions() {
        assert_eq!(dims(&cat("ga", 8), 2, SolveRoute::Auto), vec![1, 2, 3]);
        assert_eq!(dims(&cat("gm", 8), 3, SolveRoute::Auto), vec![0, 1, 2, 3]);
        assert_eq!(dims(&cat("legendre", 6), 3, SolveRoute::Auto), vec![0, 0, 1, 2]);
        assert_eq!(dims(&cat("ga*gm", 8), 2, SolveRoute::Auto), vec![1, 3, 5]);
    }

    #[test]
    fn routes_agree_on_exact_groups() {
        for name in ["gm", "ga*gm"] {
            let law = cat(name, 6);
            for n in 0..=2 {
                let d = FieldConfig::standard();
                let a = solve_characters(&law, n, &d, &SolveOptions { route: SolveRoute::Formal, ..Default::default() })
                    .unwrap();
                let b = solve_characters(
                    &law,
                    n,
                    &d,
                    &SolveOptions {
                        route: SolveRoute::Polynomial,
                        ..Default::default()
                    },
                )
                .unwrap();
                assert_eq!(a, b, "{name} at order {n}");
            }
        }
    }

    #[test]
    fn legendre_manin_character() {
        let law = legendre(RatFunc::t(), 6).unwrap();
        let d = FieldConfig::standard();
        let b = solve_characters(&law, 2, &d, &SolveOptions::default()).unwrap();
        assert_eq!(b.len(), 1);
        let c = &b[0];
        assert_eq!(c.strict_order, Some(2));
        let a2 = c.linear_coeff(0, 2);
        let t = RatFunc::t();
        let tt = t.clone() * &(RatFunc::one() - t.clone());
        assert_eq!(
            c.linear_coeff(0, 1).checked_div(&a2).unwrap(),
            (RatFunc::one() - t.clone() * &RatFunc::from_i64(2)).checked_div(&tt).unwrap()
        );
        assert_eq!(
            c.linear_coeff(0, 0).checked_div(&a2).unwrap(),
            RatFunc::from_i64(-1).checked_div(&(tt * &RatFunc::from_i64(4))).unwrap()
        );
        assert!(iota_leading_check(c));
    }

    #[test]
    fn full_analysis_of_catalog() {
        let d = FieldConfig::standard();
        let cases = [("ga", 8, 0, vec![1, 0, 0]), ("gm", 8, 1, vec![0, 1, 0]), ("legendre", 6, 2, vec![0, 0, 1, 0])];
        for (name, trunc, m_u, l) in cases {
            let law = cat(name, trunc);
            let n = default_max_order(law.ext_dim());
            let s = analyze(&law, n, &d, &AnalyzeOptions::default()).unwrap();
            assert_eq!(s.l, l, "{name}");
            assert_eq!(s.m_u, m_u);
            assert_eq!(s.m_l, m_u);
            assert!(checks::dim_identity(&s.dims, &s.l));
            assert!(checks::lemma_ee(&s));
            assert!(checks::xprim(&s));
        }
    }

    #[test]
    fn product_primitive_basis() {
        let d = FieldConfig::standard();
        let s = analyze(&cat("ga*gm", 8), 2, &d, &AnalyzeOptions::default()).unwrap();
        assert_eq!(s.primitive.orders, vec![0, 1]);
        assert_eq!(s.primitive.m, 1);
        assert_eq!(s.primitive.a, Matrix::identity(2));
        assert_eq!(s.primitive.characters[0].theta, DiffPoly::var(JetVar::new(0, 0), Some(8)));
    }

    #[test]
    fn h_sequences() {
        assert_eq!(derive_h(&[0, 0, 1, 0], 1).unwrap(), vec![0, 1, 0, 0]);
        assert_eq!(derive_h(&[1, 0, 0], 1).unwrap(), vec![0, 0, 0]);
        assert!(derive_h(&[2, 0], 1).is_err());
        assert!(splitting_numbers(&[0, 0], &[0, 0], 1).is_err());
    }
}
