//! Randomized property suites. Every case draws its own seed from the master
//! seed, so a failure can be replayed alone with [`run_case`].

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::basefield::{Derivation, Field, FieldConfig, RatFunc, Rational, Sample};
use crate::characters::{
    analyze, checks, del_action, primitive_basis, primitive_from_characters, AnalyzeOptions, Character, CharacterSpace,
    PrimitiveBasis,
};
use crate::diffring::{DiffPoly, JetVar, Monomial, Side};
use crate::error::{Error, Result};
use crate::groups::{by_name, legendre, FormalGroupLaw};
use crate::hasse::{eval_at, exp_del, jet_point_oracle, prolong_ideal, solve_jet, AffineScheme};
use crate::kernel::{basis_independence, vectorial_extension_report};

pub const DEFAULT_CASES: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Suite {
    Field,
    Ring,
    Oracle,
    Groups,
    Characters,
    Kernel,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 7] = ["field", "ring", "oracle", "groups", "characters", "kernel", "all"];

    pub fn properties(self) -> Vec<&'static str> {
        match self {
            Suite::Field => vec!["field-axioms", "rational-axioms", "derivation-leibniz"],
            Suite::Ring => vec!["ring-leibniz", "degree-preserving", "truncation-compatible", "deltaT-split"],
            Suite::Oracle => vec!["jet-oracle", "expdel-compatible", "prolongation-compatible"],
            Suite::Groups => vec!["law-axioms", "kk-square", "nn-additive", "hn-linear"],
            Suite::Characters => vec![
                "partlead",
                "strict-order-growth",
                "prop3-rank",
                "dim-identity",
                "lemma-ee",
                "order-bound",
            ],
            Suite::Kernel => vec!["kernel-ledger", "basis-independence"],
            Suite::All => [
                Suite::Field,
                Suite::Ring,
                Suite::Oracle,
                Suite::Groups,
                Suite::Characters,
                Suite::Kernel,
            ]
            .iter()
            .flat_map(|s| s.properties())
            .collect(),
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "field" => Suite::Field,
            "ring" => Suite::Ring,
            "oracle" => Suite::Oracle,
            "groups" => Suite::Groups,
            "characters" => Suite::Characters,
            "kernel" => Suite::Kernel,
            "all" => Suite::All,
            other => {
                return Err(Error::Input(format!(
                    "unknown suite '{}' (expected one of {})",
                    other,
                    Suite::NAMES.join(", ")
                )))
            }
        })
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let i = [
            Suite::Field,
            Suite::Ring,
            Suite::Oracle,
            Suite::Groups,
            Suite::Characters,
            Suite::Kernel,
            Suite::All,
        ]
        .iter()
        .position(|s| s == self)
        .expect("listed");
        f.write_str(Suite::NAMES[i])
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CaseFailure {
    pub property: String,
    pub case: usize,
    pub seed: u64,
    pub invariant: String,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct PropertyTally {
    pub property: String,
    pub cases: usize,
    pub failures: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteResult {
    pub suite: String,
    pub seed: u64,
    pub cases: usize,
    pub properties: Vec<PropertyTally>,
    pub failures: Vec<CaseFailure>,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn fnv1a(s: &str) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in s.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

/// Seed of case `case` of `property` under master seed `master`.
pub fn case_seed(master: u64, property: &str, case: usize) -> u64 {
    let mut r = ChaCha8Rng::seed_from_u64(master);
    r.set_stream(fnv1a(property));
    r.set_word_pos(2 * case as u128);
    r.next_u64()
}

/// Cached groups and analyses shared by the cases of one run.
pub struct Context {
    d: FieldConfig,
    laws: HashMap<&'static str, FormalGroupLaw<RatFunc>>,
    spaces: HashMap<&'static str, CharacterSpace<RatFunc>>,
    reference_dims: HashMap<String, Vec<usize>>,
    curve: AffineScheme<RatFunc>,
}

/// Groups used by the group-level properties, with the maximal order
/// analysed for each.
const GROUPS: [(&str, u32, usize); 5] = [("ga", 6, 3), ("gm", 6, 3), ("ga*gm", 6, 3), ("ga^2*gm", 6, 2), ("legendre", 6, 3)];

impl Default for Context {
    fn default() -> Self {
        Context::new()
    }
}

impl Context {
    pub fn new() -> Self {
        let x = DiffPoly::var(JetVar::new(0, 0), None);
        let y = DiffPoly::var(JetVar::new(1, 0), None);
        let t = DiffPoly::constant(RatFunc::t(), None);
        let one = DiffPoly::one(None);
        let rhs = &(&x * &(&x - &one)) * &(&x - &t);
        let curve = AffineScheme::new(vec!["x".into(), "y".into()], vec![&(&y * &y) - &rhs]).expect("valid curve");
        Context {
            d: FieldConfig::standard(),
            laws: HashMap::new(),
            spaces: HashMap::new(),
            reference_dims: HashMap::new(),
            curve,
        }
    }

    fn law(&mut self, name: &'static str) -> Result<FormalGroupLaw<RatFunc>> {
        if let Some(l) = self.laws.get(name) {
            return Ok(l.clone());
        }
        let (_, trunc, _) = GROUPS.iter().find(|g| g.0 == name).expect("known group");
        let l = by_name(name, *trunc, &RatFunc::t())?;
        self.laws.insert(name, l.clone());
        Ok(l)
    }

    fn space(&mut self, name: &'static str) -> Result<CharacterSpace<RatFunc>> {
        if let Some(s) = self.spaces.get(name) {
            return Ok(s.clone());
        }
        let (_, _, n) = *GROUPS.iter().find(|g| g.0 == name).expect("known group");
        let law = self.law(name)?;
        let s = analyze(&law, n, &self.d, &AnalyzeOptions::default())?;
        self.spaces.insert(name, s.clone());
        Ok(s)
    }
}

fn fail(id: &str, detail: impl Into<String>) -> Error {
    Error::invariant(id, detail)
}

fn ensure(ok: bool, id: &str, detail: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(fail(id, detail()))
    }
}

/// A random polynomial in `vars` with up to `terms` terms of degree ≤ `max_deg`.
pub fn sample_poly<F: Sample, R: Rng + ?Sized>(
    rng: &mut R,
    vars: &[JetVar],
    max_deg: u32,
    terms: usize,
    trunc: Option<u32>,
) -> DiffPoly<F> {
    let mut p = DiffPoly::zero(trunc);
    for _ in 0..rng.gen_range(1..=terms) {
        let deg = rng.gen_range(0..=max_deg);
        let m = Monomial::from_pairs((0..deg).map(|_| (vars[rng.gen_range(0..vars.len())], 1)));
        p.add_term(m, F::sample_nonzero(rng, 2));
    }
    p
}

fn single_vars(g: usize, max_order: usize) -> Vec<JetVar> {
    (0..=max_order).flat_map(|i| (0..g).map(move |j| JetVar::new(j, i))).collect()
}

fn pick<'a, T, R: Rng + ?Sized>(rng: &mut R, items: &'a [T]) -> &'a T {
    &items[rng.gen_range(0..items.len())]
}

fn check_field<F: Sample, R: Rng + ?Sized>(rng: &mut R) -> Result<()> {
    let a = F::sample(rng, 3);
    let b = F::sample(rng, 3);
    let c = F::sample(rng, 3);
    let id = "field-axiom";
    ensure((a.clone() + &b) + &c == a.clone() + &(b.clone() + &c), id, || "addition is not associative".into())?;
    ensure(a.clone() * &b == b.clone() * &a, id, || "multiplication is not commutative".into())?;
    ensure((a.clone() * &b) * &c == a.clone() * &(b.clone() * &c), id, || {
        "multiplication is not associative".into()
    })?;
    ensure(
        a.clone() * &(b.clone() + &c) == a.clone() * &b + a.clone() * &c,
        id,
        || format!("distributivity fails for {}, {}, {}", a, b, c),
    )?;
    ensure((a.clone() - &a).is_zero(), id, || "a - a is not zero".into())?;
    match a.inv() {
        Some(i) => ensure((i * &a).is_one(), id, || format!("{} times its inverse is not 1", a))?,
        None => ensure(a.is_zero(), id, || format!("nonzero {} has no inverse", a))?,
    }
    Ok(())
}

fn check_leibniz_field<R: Rng + ?Sized>(rng: &mut R) -> Result<()> {
    let d = if rng.gen_bool(0.5) {
        FieldConfig::standard()
    } else {
        FieldConfig::with_dt(RatFunc::sample_nonzero(rng, 2))
    };
    let a = RatFunc::sample(rng, 3);
    let b = RatFunc::sample_nonzero(rng, 3);
    let lhs = d.derive(&(a.clone() * &b));
    let rhs = d.derive(&a) * &b + a.clone() * &d.derive(&b);
    ensure(lhs == rhs, "field-leibniz", || format!("∂({} · {})", a, b))?;
    let q = a.checked_div(&b).expect("nonzero");
    let lhs = d.derive(&q) * &(b.clone() * &b);
    let rhs = d.derive(&a) * &b - a.clone() * &d.derive(&b);
    ensure(lhs == rhs, "quotient-rule", || format!("∂({} / {})", a, b))?;
    ensure(d.derive(&RatFunc::from_i64(rng.gen_range(-9..9))).is_zero(), "constants", || {
        "a rational constant has nonzero derivative".into()
    })
}

fn ring_vars<R: Rng + ?Sized>(rng: &mut R) -> Vec<JetVar> {
    let g = rng.gen_range(1..=2);
    let mut vars = single_vars(g, 2);
    if rng.gen_bool(0.3) {
        vars.extend((0..g).map(|j| JetVar::left(j, 1)));
        vars.extend((0..g).map(|j| JetVar::right(j, 0)));
    }
    vars
}

fn check_ring_leibniz<R: Rng + ?Sized>(rng: &mut R, d: &FieldConfig) -> Result<()> {
    let vars = ring_vars(rng);
    let p: DiffPoly<RatFunc> = sample_poly(rng, &vars, 3, 4, None);
    let q: DiffPoly<RatFunc> = sample_poly(rng, &vars, 3, 4, None);
    let lhs = (&p * &q).total_derive(d);
    let rhs = &(&p.total_derive(d) * &q) + &(&p * &q.total_derive(d));
    ensure(lhs == rhs, "ring-leibniz", || format!("∂(({}) · ({}))", p, q))?;
    let sum = (&p + &q).total_derive(d);
    ensure(sum == &p.total_derive(d) + &q.total_derive(d), "ring-additive", || {
        format!("∂ is not additive on {} and {}", p, q)
    })
}

fn check_degree<R: Rng + ?Sized>(rng: &mut R, d: &FieldConfig) -> Result<()> {
    let vars = ring_vars(rng);
    let p: DiffPoly<RatFunc> = sample_poly(rng, &vars, 4, 5, None);
    for (m, c) in p.terms() {
        let dm = DiffPoly::monomial(c.clone(), m.clone(), None).total_derive(d);
        for (m2, _) in dm.terms() {
            if m2.degree() != m.degree() {
                return Err(fail("degree-preserving", format!("∂ of {} produced a term of degree {}", m.degree(), m2.degree())));
            }
        }
    }
    Ok(())
}

fn check_truncation<R: Rng + ?Sized>(rng: &mut R) -> Result<()> {
    let vars = ring_vars(rng);
    let trunc = rng.gen_range(1..=4);
    let p: DiffPoly<RatFunc> = sample_poly(rng, &vars, 4, 5, None);
    let q: DiffPoly<RatFunc> = sample_poly(rng, &vars, 4, 5, None);
    let full = (&p * &q).with_trunc(Some(trunc));
    let cut = &p.clone().with_trunc(Some(trunc)) * &q.clone().with_trunc(Some(trunc));
    ensure(full == cut, "truncation-compatible", || format!("product of {} and {} at D = {}", p, q, trunc))
}

fn check_delta_t<R: Rng + ?Sized>(rng: &mut R, d: &FieldConfig) -> Result<()> {
    let g = rng.gen_range(1..=2);
    let vars = single_vars(g, 2);
    let h: DiffPoly<RatFunc> = sample_poly(rng, &vars, 3, 4, None);
    let x = DiffPoly::var(JetVar::new(rng.gen_range(0..g), 0), None);
    let f = &x * &h;
    if f.is_zero() {
        return Ok(());
    }
    ensure(f.in_augmentation(), "deltaT-input", || format!("{} is not in (x)", f))?;
    let df = f.total_derive(d);
    let (g1, g2) = df.augmentation_split();
    ensure(&g1 + &g2 == df, "deltaT-split", || "the split does not sum to ∂f".into())?;
    ensure(g1.in_augmentation(), "deltaT-split", || format!("{} is not in (x)", g1))?;
    let bound = f.max_order().unwrap_or(0).max(1);
    ensure(g2.max_order().unwrap_or(0) <= bound, "deltaT-split", || {
        format!("the remainder {} of ∂({}) has order above {}", g2, f, bound)
    })
}

fn check_jet_oracle<R: Rng + ?Sized>(rng: &mut R, ctx: &Context) -> Result<()> {
    let t = RatFunc::t();
    let bases = [
        [RatFunc::zero(), RatFunc::zero()],
        [RatFunc::one(), RatFunc::zero()],
        [t, RatFunc::zero()],
    ];
    let base = pick(rng, &bases);
    let n = rng.gen_range(0..=3);
    let vals = solve_jet(&ctx.curve, base, n, &ctx.d, rng, &mut |r| RatFunc::sample(r, 2))?;
    let valid = jet_point_oracle(&ctx.curve, n, &vals, &ctx.d)?;
    ensure(valid, "jet-oracle-valid", || format!("a solved jet at level {} was rejected", n))?;
    // perturb y at level 0, otherwise some x^(i) with i ≥ 1
    let mut bad = vals.clone();
    let target = if n == 0 {
        JetVar::new(1, 0)
    } else {
        JetVar::new(0, rng.gen_range(1..=n))
    };
    let delta = RatFunc::sample_nonzero(rng, 2);
    let v = bad.get_mut(&target).expect("assigned");
    *v = v.clone() + &delta;
    let invalid = jet_point_oracle(&ctx.curve, n, &bad, &ctx.d)?;
    ensure(!invalid, "jet-oracle-invalid", || {
        format!("a jet perturbed at {} was accepted at level {}", ctx.curve.jet_var_name(target), n)
    })
}

fn check_exp_del<R: Rng + ?Sized>(rng: &mut R, d: &FieldConfig) -> Result<()> {
    let n = rng.gen_range(0..=4);
    let a = RatFunc::sample(rng, 3);
    let b = RatFunc::sample(rng, 3);
    let e = exp_del(&a, n + 1, d);
    ensure(e.project(n) == exp_del(&a, n, d), "expdel-compatible", || format!("T(exp_∂({})) at n = {}", a, n))?;
    let prod = exp_del(&(a.clone() * &b), n, d);
    ensure(prod == exp_del(&a, n, d).mul(&exp_del(&b, n, d)), "expdel-multiplicative", || {
        format!("exp_∂ is not multiplicative on {}, {}", a, b)
    })?;
    let sum = exp_del(&(a.clone() + &b), n, d);
    ensure(sum == exp_del(&a, n, d).add(&exp_del(&b, n, d)), "expdel-additive", || {
        format!("exp_∂ is not additive on {}, {}", a, b)
    })
}

fn check_prolongation<R: Rng + ?Sized>(rng: &mut R, d: &FieldConfig) -> Result<()> {
    let nv = rng.gen_range(1..=2);
    let vars = single_vars(nv, 0);
    let k = rng.gen_range(1..=2);
    let rels: Vec<DiffPoly<RatFunc>> = (0..k).map(|_| sample_poly(rng, &vars, 3, 3, None)).collect();
    let names = (0..nv).map(|j| format!("z{}", j)).collect();
    let x = AffineScheme::new(names, rels)?;
    let n = rng.gen_range(0..=3);
    let lo = prolong_ideal(&x, n, d);
    let hi = prolong_ideal(&x, n + 1, d);
    for r in 0..k {
        for s in 0..=n {
            ensure(lo.generator(r, s) == hi.generator(r, s), "prolongation-compatible", || {
                format!("generator ∂^{} f_{} differs between levels {} and {}", s, r, n, n + 1)
            })?;
        }
        let top = hi.generator(r, n + 1);
        ensure(top == &lo.generator(r, n).total_derive(d), "prolongation-compatible", || {
            format!("top generator at level {} is not ∂ of the previous one", n + 1)
        })?;
    }
    Ok(())
}

fn random_law<R: Rng + ?Sized>(rng: &mut R) -> Result<FormalGroupLaw<RatFunc>> {
    let trunc = rng.gen_range(3..=6);
    if rng.gen_bool(0.25) {
        let mut lambda = RatFunc::sample(rng, 2);
        while lambda.is_zero() || lambda.is_one() {
            lambda = RatFunc::sample(rng, 2);
        }
        return legendre(lambda, trunc);
    }
    let k = rng.gen_range(1..=3);
    let name = (0..k).map(|_| *pick(rng, &["ga", "gm"])).collect::<Vec<_>>().join("*");
    by_name(&name, trunc, &RatFunc::t())
}

fn check_law_axioms<R: Rng + ?Sized>(rng: &mut R) -> Result<()> {
    let law = random_law(rng)?;
    law.check_axioms()
}

const KK_GROUPS: [&str; 4] = ["ga", "gm", "ga*gm", "legendre"];

fn check_kk<R: Rng + ?Sized>(rng: &mut R, ctx: &mut Context) -> Result<()> {
    let name = *pick(rng, &KK_GROUPS);
    let law = ctx.law(name)?;
    let n = rng.gen_range(1..=2);
    let p: DiffPoly<RatFunc> = sample_poly(rng, &single_vars(law.g(), n - 1), 3, 4, Some(law.trunc()));
    let jc = law.jet_comul(n, &ctx.d);
    let lhs = jc.apply(&p.total_derive(&ctx.d))?;
    let rhs = jc.apply(&p)?.total_derive(&ctx.d);
    ensure(lhs == rhs, "kk-square", || format!("m*(∂p) ≠ ∂ m*(p) for p = {} on {}", p, name))
}

fn check_nn<R: Rng + ?Sized>(rng: &mut R, ctx: &mut Context) -> Result<()> {
    let name = *pick(rng, &KK_GROUPS);
    let law = ctx.law(name)?;
    let n = rng.gen_range(1..=3);
    let nn = law
        .nn_coordinates(n, &ctx.d)?
        .ok_or_else(|| fail("nn-coordinates", format!("no additive coordinates on N^{}G for {}", n, name)))?;
    let vars: Vec<JetVar> = (1..=n).flat_map(|i| (0..law.g()).map(move |j| JetVar::new(j, i))).collect();
    for (c, v) in nn.coords.iter().zip(&vars) {
        let lin = c.linear_part();
        let only_v = lin.iter().all(|(w, a)| if w == v { a.is_one() } else { a.is_zero() }) && lin.contains_key(v);
        ensure(only_v, "nn-linear-part", || format!("coordinate {} does not have linear part {}", c, crate::diffring::default_var_name(*v)))?;
    }
    let mut xs = HashMap::new();
    for v in &vars {
        xs.insert(v.with_side(Side::Left), RatFunc::sample(rng, 2));
        xs.insert(v.with_side(Side::Right), RatFunc::sample(rng, 2));
    }
    let eval = |p: &DiffPoly<RatFunc>| crate::hasse::eval_at(p, &xs);
    let mut sum_point = HashMap::new();
    for v in &vars {
        sum_point.insert(*v, eval(&nn.law[v])?);
    }
    for c in &nn.coords {
        let at_sum = crate::hasse::eval_at(c, &sum_point)?;
        let sep = eval(&c.with_side(Side::Left))? + &eval(&c.with_side(Side::Right))?;
        ensure(at_sum == sep, "nn-additive", || format!("{} is not additive at a random point of N^{}G", c, n))?;
    }
    Ok(())
}

fn check_hn<R: Rng + ?Sized>(rng: &mut R, ctx: &mut Context) -> Result<()> {
    let name = *pick(rng, &KK_GROUPS);
    let law = ctx.law(name)?;
    let n = rng.gen_range(1..=3);
    ensure(law.check_hn_linear(n, &ctx.d), "hn-linear", || format!("H^{}G is not linear for {}", n, name))
}

const CHAR_GROUPS: [&str; 5] = ["ga", "gm", "ga*gm", "ga^2*gm", "legendre"];

/// A random character of strict order `k` in X_n, with n ≥ k.
fn random_character<R: Rng + ?Sized>(rng: &mut R, space: &CharacterSpace<RatFunc>) -> Option<Character<RatFunc>> {
    let n = rng.gen_range(0..=space.max_order);
    let basis = &space.bases[n];
    if basis.is_empty() {
        return None;
    }
    let mut p = DiffPoly::zero(basis[0].theta.trunc());
    for c in basis {
        if rng.gen_bool(0.6) {
            p.add_scaled(&c.theta, &RatFunc::sample(rng, 2));
        }
    }
    if p.is_zero() {
        p = basis[rng.gen_range(0..basis.len())].theta.clone();
    }
    Some(Character::new(p, n, space.g))
}

fn check_partlead<R: Rng + ?Sized>(rng: &mut R, ctx: &mut Context) -> Result<()> {
    let name = *pick(rng, &CHAR_GROUPS);
    let space = ctx.space(name)?;
    let law = ctx.law(name)?;
    let Some(ch) = random_character(rng, &space) else {
        return Ok(());
    };
    ensure(crate::characters::iota_leading_check(&ch), "iota-leading", || {
        format!("ι*Θ is not the leading term for {}", ch.theta)
    })?;
    let steps = if name == "legendre" { 1 } else { rng.gen_range(1..=2) };
    checks::partlead(&law, &ch, steps, &ctx.d)
}

fn check_strict_order<R: Rng + ?Sized>(rng: &mut R, ctx: &mut Context) -> Result<()> {
    let name = *pick(rng, &CHAR_GROUPS);
    let space = ctx.space(name)?;
    let law = ctx.law(name)?;
    let Some(ch) = random_character(rng, &space) else {
        return Ok(());
    };
    let k = ch.strict_order.ok_or_else(|| fail("strict-order", "a nonzero character has no linear part"))?;
    let steps = rng.gen_range(1..=3);
    let mut cur = ch.clone();
    for i in 1..=steps {
        cur = Character::new(cur.theta.total_derive(&ctx.d), cur.level + 1, law.g());
        ensure(cur.strict_order == Some(k + i), "strict-order", || {
            format!("∂^{} of a strict order {} character has strict order {:?}", i, k, cur.strict_order)
        })?;
    }
    let last = crate::characters::additivity_defect(&law, cur.level, &cur.theta, &ctx.d)?;
    ensure(last.is_zero(), "derived-character", || format!("∂^{} Θ is not a character", steps))
}

/// A random primitive family with the same orders: each Θ_i is rescaled
/// and shifted by derivatives of lower-index members of no larger order.
/// With `general` unset, members below the top order m only get rational
/// (constant) coefficients, the changes under which [Θ̃]_n is unchanged.
fn random_primitive<R: Rng + ?Sized>(
    rng: &mut R,
    law: &FormalGroupLaw<RatFunc>,
    prim: &PrimitiveBasis<RatFunc>,
    d: &FieldConfig,
    general: bool,
) -> Result<PrimitiveBasis<RatFunc>> {
    let g = law.g();
    let mut out: Vec<Character<RatFunc>> = Vec::with_capacity(g);
    for (i, c) in prim.characters.iter().enumerate() {
        let constant = !general && c.level < prim.m;
        let coeff = |r: &mut R, nonzero: bool| {
            if constant {
                let q = if nonzero { Rational::sample_nonzero(r, 2) } else { Rational::sample(r, 2) };
                RatFunc::from_rational(&q)
            } else if nonzero {
                RatFunc::sample_nonzero(r, 2)
            } else {
                RatFunc::sample(r, 2)
            }
        };
        let mut p = c.theta.scale(&coeff(rng, true));
        for other in prim.characters.iter().take(i) {
            if other.level <= c.level && rng.gen_bool(0.5) {
                let mut q = other.clone();
                for _ in other.level..c.level {
                    q = del_action(law, &q, d)?;
                }
                p.add_scaled(&q.theta, &coeff(rng, false));
            }
        }
        out.push(Character::new(p, c.level, g));
    }
    primitive_from_characters(law, out, d)
}

fn check_prop3<R: Rng + ?Sized>(rng: &mut R, ctx: &mut Context) -> Result<()> {
    let name = *pick(rng, &CHAR_GROUPS);
    let mut space = ctx.space(name)?;
    let law = ctx.law(name)?;
    space.primitive = random_primitive(rng, &law, &space.primitive, &ctx.d, true)?;
    space.max_order = rng.gen_range(space.m_u..=space.max_order + 1);
    let (rank, card) = checks::prop3_rank(&space, &ctx.d);
    ensure(rank == card, "prop3-rank", || format!("rank {} < {} shifts for {}", rank, card, name))
}

/// G_a^a × G_m^b in coordinates x = M·x̃ for a random invertible M.
fn conjugated_law<R: Rng + ?Sized>(rng: &mut R) -> Result<(FormalGroupLaw<RatFunc>, usize)> {
    let name = *pick(rng, &["ga", "gm", "ga*gm", "gm*gm", "ga*ga"]);
    let base = by_name::<RatFunc>(name, 6, &RatFunc::t())?;
    let g = base.g();
    let (m, minv) = loop {
        let m: Vec<Vec<Rational>> = (0..g).map(|_| (0..g).map(|_| Rational::sample(rng, 1)).collect()).collect();
        let mat = crate::basefield::Matrix::from_rows(g, m.clone());
        if crate::basefield::rank(&mat) == g {
            let inv = invert(&m);
            break (m, inv);
        }
    };
    let lin = |rows: &[Vec<Rational>], side: Side| -> Vec<DiffPoly<RatFunc>> {
        rows.iter()
            .map(|r| {
                let mut p = DiffPoly::zero(None);
                for (j, c) in r.iter().enumerate() {
                    p.add_term(Monomial::var(JetVar::new(j, 0).with_side(side)), RatFunc::from_rational(c));
                }
                p
            })
            .collect()
    };
    let images = |sides: &[(Side, &Vec<DiffPoly<RatFunc>>)]| -> HashMap<JetVar, DiffPoly<RatFunc>> {
        sides
            .iter()
            .flat_map(|(side, im)| (0..g).map(move |j| (JetVar::new(j, 0).with_side(*side), im[j].clone())))
            .collect()
    };
    let (left, right, single) = (lin(&m, Side::Left), lin(&m, Side::Right), lin(&m, Side::Single));
    let both = images(&[(Side::Left, &left), (Side::Right, &right)]);
    let mut comul = Vec::with_capacity(g);
    for row in &minv {
        let mut acc = DiffPoly::zero(None);
        for (j, c) in row.iter().enumerate() {
            let f = base.comul()[j].clone().with_trunc(None).substitute(&both, None)?;
            acc.add_scaled(&f, &RatFunc::from_rational(c));
        }
        comul.push(acc);
    }
    let on_single = images(&[(Side::Single, &single)]);
    let units = base
        .units()
        .iter()
        .map(|u| u.substitute(&on_single, None))
        .collect::<Result<Vec<_>>>()?;
    let law = FormalGroupLaw::polynomial(name, comul, 6)?
        .with_ext_dim(Some(0))
        .with_units(units)?;
    let max_order = if g == 1 { 3 } else { 2 };
    Ok((law, max_order))
}

fn invert(m: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let g = m.len();
    let mut a: Vec<Vec<Rational>> = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..g).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            row
        })
        .collect();
    for c in 0..g {
        let p = (c..g).find(|&r| !a[r][c].is_zero()).expect("invertible");
        a.swap(c, p);
        let inv = a[c][c].inv().expect("pivot");
        for x in a[c].iter_mut() {
            *x = x.clone() * &inv;
        }
        for r in 0..g {
            if r != c && !a[r][c].is_zero() {
                let f = a[r][c].clone();
                for k in 0..2 * g {
                    let v = a[c][k].clone() * &f;
                    a[r][k] = a[r][k].clone() - v;
                }
            }
        }
    }
    a.into_iter().map(|r| r[g..].to_vec()).collect()
}

fn check_dim_identity<R: Rng + ?Sized>(rng: &mut R, ctx: &mut Context) -> Result<()> {
    let (law, n) = conjugated_law(rng)?;
    let opts = AnalyzeOptions {
        check_stability: false,
        ..AnalyzeOptions::default()
    };
    let space = analyze(&law, n, &ctx.d, &opts)?;
    let reference = match ctx.reference_dims.get(law.name()) {
        Some(r) => r.clone(),
        None => {
            let plain = by_name::<RatFunc>(law.name(), 6, &RatFunc::t())?;
            let r = analyze(&plain, n, &ctx.d, &opts)?.dims;
            ctx.reference_dims.insert(law.name().to_string(), r.clone());
            r
        }
    };
    ensure(space.dims == reference, "coordinate-invariance", || {
        format!("dims {:?} after a linear change of coordinates, {:?} before", space.dims, reference)
    })?;
    ensure(checks::dim_identity(&space.dims, &space.l), "dim-identity", || {
        format!("dims {:?} against l {:?}", space.dims, space.l)
    })?;
    ensure(checks::xprim(&space), "xprim", || format!("l = {:?} for g = {}", space.l, space.g))?;
    ensure(space.h.windows(2).all(|w| w[0] >= w[1]), "h-decreasing", || format!("h = {:?}", space.h))
}

fn check_lemma_ee<R: Rng + ?Sized>(rng: &mut R, ctx: &mut Context) -> Result<()> {
    let name = *pick(rng, &CHAR_GROUPS);
    let mut space = ctx.space(name)?;
    let cut = rng.gen_range(space.m_u..=space.max_order);
    space.max_order = cut;
    space.dims.truncate(cut + 1);
    ensure(checks::lemma_ee(&space), "lemma-ee", || format!("dims {:?} for {}", space.dims, name))?;
    ensure(checks::hn_zero(&space), "hn-zero", || format!("h = {:?}, l = {:?}", space.h, space.l))?;
    ensure(space.m_l <= space.m_u, "mlmu", || format!("m_l = {} > m_u = {}", space.m_l, space.m_u))
}

fn check_order_bound<R: Rng + ?Sized>(rng: &mut R, ctx: &mut Context) -> Result<()> {
    let name = *pick(rng, &CHAR_GROUPS);
    let space = ctx.space(name)?;
    let law = ctx.law(name)?;
    let ch = &space.primitive.characters[rng.gen_range(0..space.g)];
    ensure(checks::order_bound(&space, law.ext_dim()) == Some(true), "order-bound", || {
        format!("m_u = {} with r = {:?}", space.m_u, law.ext_dim())
    })?;
    ensure(ch.level <= law.ext_dim().unwrap_or(0) + 1, "order-bound", || {
        format!("primitive character of order {} for {}", ch.level, name)
    })
}

const KERNEL_GROUPS: [&str; 4] = ["gm", "ga*gm", "ga^2*gm", "legendre"];

fn check_kernel<R: Rng + ?Sized>(rng: &mut R, ctx: &mut Context) -> Result<()> {
    let name = *pick(rng, &KERNEL_GROUPS);
    let space = ctx.space(name)?;
    let law = ctx.law(name)?;
    let prim = random_primitive(rng, &law, &space.primitive, &ctx.d, true)?;
    let extra = if name == "legendre" { 1 } else { 2 };
    let rep = vectorial_extension_report(&law, &prim, extra, &ctx.d)?;
    let g = law.g();
    ensure(rep.levels.iter().all(|l| l.dim_k == rep.m * g), "kernel-dim", || {
        format!("dim K^n G = {:?}, m g = {}", rep.levels.iter().map(|l| l.dim_k).collect::<Vec<_>>(), rep.m * g)
    })?;
    ensure(rep.dim_l == Some((rep.m - 1) * g), "vectorial-extension", || format!("dim L = {:?}", rep.dim_l))
}

fn check_basis_independence<R: Rng + ?Sized>(rng: &mut R, ctx: &mut Context) -> Result<()> {
    let name = *pick(rng, &KERNEL_GROUPS);
    let space = ctx.space(name)?;
    let law = ctx.law(name)?;
    let prim = if rng.gen_bool(0.5) {
        random_primitive(rng, &law, &space.primitive, &ctx.d, false)?
    } else {
        let mut order: Vec<usize> = (0..law.g()).collect();
        order.shuffle(rng);
        primitive_basis(&law, &space.bases, &space.l, &ctx.d, &order)?
    };
    let extra = if name == "legendre" { 0 } else { 1 };
    ensure(
        basis_independence(&law, &space.primitive, &prim, extra, &ctx.d)?,
        "basis-independence",
        || format!("[Θ̃] depends on the primitive basis for {}", name),
    )
}

/// Run one case of `property` with its own seed.
pub fn run_case(property: &str, seed: u64, ctx: &mut Context) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = ctx.d.clone();
    match property {
        "field-axioms" => check_field::<RatFunc, _>(&mut rng),
        "rational-axioms" => check_field::<Rational, _>(&mut rng),
        "derivation-leibniz" => check_leibniz_field(&mut rng),
        "ring-leibniz" => check_ring_leibniz(&mut rng, &d),
        "degree-preserving" => check_degree(&mut rng, &d),
        "truncation-compatible" => check_truncation(&mut rng),
        "deltaT-split" => check_delta_t(&mut rng, &d),
        "jet-oracle" => check_jet_oracle(&mut rng, ctx),
        "expdel-compatible" => check_exp_del(&mut rng, &d),
        "prolongation-compatible" => check_prolongation(&mut rng, &d),
        "law-axioms" => check_law_axioms(&mut rng),
        "kk-square" => check_kk(&mut rng, ctx),
        "nn-additive" => check_nn(&mut rng, ctx),
        "hn-linear" => check_hn(&mut rng, ctx),
        "partlead" => check_partlead(&mut rng, ctx),
        "strict-order-growth" => check_strict_order(&mut rng, ctx),
        "prop3-rank" => check_prop3(&mut rng, ctx),
        "dim-identity" => check_dim_identity(&mut rng, ctx),
        "lemma-ee" => check_lemma_ee(&mut rng, ctx),
        "order-bound" => check_order_bound(&mut rng, ctx),
        "kernel-ledger" => check_kernel(&mut rng, ctx),
        "basis-independence" => check_basis_independence(&mut rng, ctx),
        other => Err(Error::Input(format!("unknown property '{}'", other))),
    }
}

/// Run `cases` cases of each listed property.
pub fn run_properties(name: &str, properties: &[&str], seed: u64, cases: usize, ctx: &mut Context) -> SuiteResult {
    let mut tallies = Vec::new();
    let mut failures = Vec::new();
    for &p in properties {
        let mut failed = 0;
        for case in 0..cases {
            let s = case_seed(seed, p, case);
            if let Err(e) = run_case(p, s, ctx) {
                failed += 1;
                let (invariant, detail) = match e {
                    Error::Invariant { id, detail } => (id, detail),
                    other => (p.to_string(), other.to_string()),
                };
                failures.push(CaseFailure {
                    property: p.to_string(),
                    case,
                    seed: s,
                    invariant,
                    detail,
                });
            }
        }
        tallies.push(PropertyTally {
            property: p.to_string(),
            cases,
            failures: failed,
        });
    }
    SuiteResult {
        suite: name.to_string(),
        seed,
        cases: cases * properties.len(),
        properties: tallies,
        failures,
    }
}

pub fn run_suite(suite: Suite, seed: u64, cases: usize) -> SuiteResult {
    let mut ctx = Context::new();
    run_properties(&suite.to_string(), &suite.properties(), seed, cases, &mut ctx)
}

/// One trial of the jet-point oracle on a scheme spec.
#[derive(Clone, Debug, Serialize)]
pub struct OracleRecord {
    pub trial: usize,
    pub seed: u64,
    pub point: usize,
    pub level: usize,
    /// "valid" for a solved jet, "perturbed" for one shifted off the scheme.
    pub kind: &'static str,
    /// Common verdict of the two membership tests; null if they disagree.
    pub verdict: Option<bool>,
    pub pass: bool,
    pub detail: Option<String>,
}

/// Shift one coordinate of a point of J^nX so that it leaves J^nX. At level 0
/// the shift is redrawn until a relation stops vanishing; at a level s ≥ 1 it
/// moves a variable with a nonzero Jacobian column, on which the level-s
/// generators depend affinely.
fn perturb_off_scheme<R: Rng + ?Sized>(
    scheme: &AffineScheme<RatFunc>,
    vals: &HashMap<JetVar, RatFunc>,
    level: usize,
    d: &FieldConfig,
    rng: &mut R,
) -> Result<HashMap<JetVar, RatFunc>> {
    let g = scheme.vars().len();
    if level == 0 {
        for _ in 0..64 {
            let mut bad = vals.clone();
            let target = JetVar::new(rng.gen_range(0..g), 0);
            let v = bad.get_mut(&target).expect("assigned");
            *v = v.clone() + &RatFunc::sample_nonzero(rng, 2);
            let mut off = false;
            for f in scheme.relations() {
                off |= !eval_at(f, &bad)?.is_zero();
            }
            if off {
                return Ok(bad);
            }
        }
        return Err(Error::Oracle("could not move the base point off the scheme".into()));
    }
    let s = rng.gen_range(1..=level);
    let ideal = prolong_ideal(scheme, s, d);
    let mut movable = Vec::new();
    for j in 0..g {
        let mut shifted = vals.clone();
        let v = shifted.get_mut(&JetVar::new(j, s)).expect("assigned");
        *v = v.clone() + &RatFunc::one();
        for k in 0..scheme.relations().len() {
            let gen = ideal.generator(k, s);
            if eval_at(gen, &shifted)? != eval_at(gen, vals)? {
                movable.push(j);
                break;
            }
        }
    }
    let &j = movable
        .choose(rng)
        .ok_or_else(|| Error::Oracle(format!("no jet coordinate of order {} enters the relations", s)))?;
    let mut bad = vals.clone();
    let v = bad.get_mut(&JetVar::new(j, s)).expect("assigned");
    *v = v.clone() + &RatFunc::sample_nonzero(rng, 2);
    Ok(bad)
}

/// `trials` valid jets and as many perturbed ones over the given base
/// points at levels 0..=max_order. A record passes when both membership
/// tests agree and accept the valid jet, reject the perturbed one.
pub fn oracle_trials(
    scheme: &AffineScheme<RatFunc>,
    points: &[Vec<RatFunc>],
    max_order: usize,
    trials: usize,
    seed: u64,
    d: &FieldConfig,
) -> Result<Vec<OracleRecord>> {
    if points.is_empty() {
        return Err(Error::Input("the scheme spec lists no base points".into()));
    }
    let mut out = Vec::with_capacity(2 * trials);
    for trial in 0..trials {
        let s = case_seed(seed, "oracle-jets", trial);
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let point = trial % points.len();
        let level = rng.gen_range(0..=max_order);
        let vals = solve_jet(scheme, &points[point], level, d, &mut rng, &mut |r| RatFunc::sample(r, 2))?;
        let bad = perturb_off_scheme(scheme, &vals, level, d, &mut rng)?;
        for (kind, values) in [("valid", &vals), ("perturbed", &bad)] {
            let (verdict, detail) = match jet_point_oracle(scheme, level, values, d) {
                Ok(b) => (Some(b), None),
                Err(e @ Error::Oracle(_)) => (None, Some(e.to_string())),
                Err(e) => return Err(e),
            };
            let pass = verdict == Some(kind == "valid");
            out.push(OracleRecord {
                trial,
                seed: s,
                point,
                level,
                kind,
                verdict,
                pass,
                detail,
            });
        }
    }
    Ok(out)
}
