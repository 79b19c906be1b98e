//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

use std::process::ExitCode;
use std::time::Instant;

use num_traits::{One, Zero};

use jetchar::basefield::{nullspace, rat, Field, FieldConfig, Matrix, RatFunc, Rational, UniPoly};
use jetchar::characters::{analyze, checks, AnalyzeOptions, CharacterSpace};
use jetchar::groups::{by_name, FormalGroupLaw};
use jetchar::kernel::{vectorial_extension_report, KernelReport};
use jetchar::spec::{parse_spec, SpecFile};
use jetchar::verify::{oracle_trials, run_properties, Context};

const GROUPS: [&str; 5] = ["ga", "gm", "ga*gm", "ga^2*gm", "legendre"];
const DECLARED_R: [usize; 5] = [0, 0, 0, 0, 1];
const EXPECTED_MU: [usize; 5] = [0, 1, 1, 1, 2];
const SEED: u64 = 20240601;

struct Analysed {
    name: &'static str,
    law: FormalGroupLaw<RatFunc>,
    space: CharacterSpace<RatFunc>,
    kernel: KernelReport,
}

fn analyse(name: &'static str, d: &FieldConfig) -> Result<Analysed, String> {
    let (trunc, n) = if name == "legendre" { (6, 3) } else { (8, 4) };
    let law = by_name(name, trunc, &RatFunc::t()).map_err(|e| e.to_string())?;
    let space = analyze(&law, n, d, &AnalyzeOptions::default()).map_err(|e| format!("{name}: {e}"))?;
    let kernel = vectorial_extension_report(&law, &space.primitive, 2, d).map_err(|e| format!("{name}: {e}"))?;
    Ok(Analysed {
        name,
        law,
        space,
        kernel,
    })
}

fn report(id: usize, title: &str, outcome: Result<String, String>, start: Instant) -> bool {
    let secs = start.elapsed().as_secs_f64();
    match outcome {
        Ok(detail) => {
            println!("[PASS] {id:>2}. {title}: {detail} ({secs:.1}s)");
            true
        }
        Err(detail) => {
            println!("[FAIL] {id:>2}. {title}: {detail} ({secs:.1}s)");
            false
        }
    }
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn criterion_1(all: &[Analysed]) -> Result<String, String> {
    for a in all {
        let sum: usize = a.space.l.iter().sum();
        ensure(sum == a.law.g(), || format!("{}: sum of l = {} but g = {}", a.name, sum, a.law.g()))?;
        let k = a.space.primitive.characters.len();
        ensure(k == a.law.g(), || format!("{}: {} primitive characters, g = {}", a.name, k, a.law.g()))?;
    }
    Ok("sum of l_n = g and g primitive characters on all five groups".into())
}

fn criterion_2(all: &[Analysed]) -> Result<String, String> {
    let mu: Vec<usize> = all.iter().map(|a| a.space.m_u).collect();
    for (a, r) in all.iter().zip(DECLARED_R) {
        ensure(a.law.ext_dim() == Some(r), || format!("{}: declared r = {:?}", a.name, a.law.ext_dim()))?;
        ensure(a.space.m_u <= r + 1, || format!("{}: m_u = {} > r + 1 = {}", a.name, a.space.m_u, r + 1))?;
    }
    ensure(mu == EXPECTED_MU, || format!("m_u = {:?}, expected {:?}", mu, EXPECTED_MU))?;
    Ok(format!("m_u = {:?}", mu))
}

/// dim X_n = Σ_i (n - i + 1) l_i, recomputed here from the l sequence.
fn criterion_3(all: &[Analysed]) -> Result<String, String> {
    for a in all {
        let top = if a.name == "legendre" { 3 } else { 4 };
        ensure(a.space.dims.len() > top, || format!("{}: only {} orders", a.name, a.space.dims.len()))?;
        for n in 0..=top {
            let expected: usize = (0..=n).map(|i| (n - i + 1) * a.space.l[i]).sum();
            ensure(a.space.dims[n] == expected, || {
                format!("{}: dim X_{} = {} but the l sequence gives {}", a.name, n, a.space.dims[n], expected)
            })?;
        }
        ensure(checks::dim_identity(&a.space.dims, &a.space.l), || format!("{}: library identity check", a.name))?;
    }
    Ok("orders 0..4 on exact groups, 0..3 on legendre (D = 6)".into())
}

/// h is indexed from n = 1 on; h_0 is recorded as 0.
fn criterion_4(all: &[Analysed]) -> Result<String, String> {
    for a in all {
        let h = &a.space.h;
        ensure(h[0] == 0, || format!("{}: h_0 = {}", a.name, h[0]))?;
        ensure(h.iter().all(|&x| x <= a.law.g()), || format!("{}: h = {:?} out of range", a.name, h))?;
        ensure(h.windows(2).skip(1).all(|w| w[0] >= w[1]), || {
            format!("{}: h = {:?} not weakly decreasing", a.name, h)
        })?;
    }
    let leg = all.iter().find(|a| a.name == "legendre").expect("listed");
    let mut expected = vec![0; leg.space.h.len()];
    expected[1] = 1;
    ensure(leg.space.h == expected, || format!("legendre h = {:?}", leg.space.h))?;
    let hs: Vec<String> = all.iter().map(|a| format!("{} {:?}", a.name, a.space.h)).collect();
    Ok(hs.join(", "))
}

fn criterion_5(all: &[Analysed]) -> Result<String, String> {
    let leg = all.iter().find(|a| a.name == "legendre").expect("listed");
    let s = &leg.space;
    ensure((s.m_l, s.m_u) == (2, 2), || format!("m_l = {}, m_u = {}", s.m_l, s.m_u))?;
    ensure(s.dims[2] == 1, || format!("dim X_2 = {}", s.dims[2]))?;
    ensure(s.trunc == 6, || format!("D = {}", s.trunc))?;
    ensure(s.stability.checked && s.stability.compared_with == Some(8), || {
        format!("stability not checked at D = 8: {:?}", s.stability)
    })?;
    ensure(s.stability.dims_compared.as_ref() == Some(&s.dims), || "D = 8 dimensions differ".into())?;
    Ok(format!("m_l = m_u = 2, dim X_2 = 1, dims {:?} at D = 6 and D = 8", s.dims))
}

// Independent Picard–Fuchs oracle. Periods of ω = dx/y on y² = f(x) =
// x(x-1)(x-t): differentiate under the integral sign and reduce modulo exact
// forms d(x^k / y^(2j-1)), all written over the common denominator y^5.

type XPoly = Vec<RatFunc>;

fn xp_mul(a: &XPoly, b: &XPoly) -> XPoly {
    let mut out = vec![RatFunc::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].clone() + x.clone() * y;
        }
    }
    out
}

fn xp_add(a: &XPoly, b: &XPoly) -> XPoly {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| a.get(i).cloned().unwrap_or_else(RatFunc::zero) + b.get(i).cloned().unwrap_or_else(RatFunc::zero))
        .collect()
}

fn xp_scale(a: &XPoly, c: &RatFunc) -> XPoly {
    a.iter().map(|x| x.clone() * c).collect()
}

fn xp_shift(a: &XPoly, k: usize) -> XPoly {
    let mut out = vec![RatFunc::zero(); k];
    out.extend(a.iter().cloned());
    out
}

fn xp_deriv(a: &XPoly) -> XPoly {
    if a.len() <= 1 {
        return vec![RatFunc::zero()];
    }
    a.iter().enumerate().skip(1).map(|(i, c)| c.clone() * &RatFunc::from_i64(i as i64)).collect()
}

fn q(n: i64, d: i64) -> RatFunc {
    RatFunc::constant(rat(n, d))
}

/// Coefficients (c2, c1, c0) with c2 ∂²ω + c1 ∂ω + c0 ω exact, normalized to c2 = 1.
fn picard_fuchs_oracle() -> Result<(RatFunc, RatFunc), String> {
    let t = RatFunc::t();
    let x = vec![RatFunc::zero(), RatFunc::one()];
    let xm1 = vec![-RatFunc::one(), RatFunc::one()];
    let xmt = vec![-t.clone(), RatFunc::one()];
    let f = xp_mul(&xp_mul(&x, &xm1), &xmt);
    let fp = xp_deriv(&f);
    let f2 = xp_mul(&f, &f);
    let xx1 = xp_mul(&x, &xm1);
    // ∂_t f = -x(x-1); ∂_t y^(-k) = (k/2) x(x-1) y^(-k-2).
    let omega = f2.clone();
    let d_omega = xp_scale(&xp_mul(&xx1, &f), &q(1, 2));
    let dd_omega = xp_scale(&xp_mul(&xx1, &xx1), &q(3, 4));
    let mut columns = vec![dd_omega, d_omega, omega];
    // d(x^k / y^3) = (k x^(k-1) f - 3/2 x^k f') dx / y^5
    for k in 0..4 {
        let a = if k == 0 {
            vec![RatFunc::zero()]
        } else {
            xp_scale(&xp_shift(&f, k - 1), &RatFunc::from_i64(k as i64))
        };
        columns.push(xp_add(&a, &xp_scale(&xp_shift(&fp, k), &q(-3, 2))));
    }
    // d(x^k / y) = (k x^(k-1) f² - 1/2 x^k f f') dx / y^5
    let ffp = xp_mul(&f, &fp);
    for k in 0..2 {
        let a = if k == 0 {
            vec![RatFunc::zero()]
        } else {
            xp_scale(&xp_shift(&f2, k - 1), &RatFunc::from_i64(k as i64))
        };
        columns.push(xp_add(&a, &xp_scale(&xp_shift(&ffp, k), &q(-1, 2))));
    }
    let rows = columns.iter().map(Vec::len).max().expect("nonempty");
    let data = (0..rows)
        .map(|i| columns.iter().map(|c| c.get(i).cloned().unwrap_or_else(RatFunc::zero)).collect())
        .collect();
    let m = Matrix::from_rows(columns.len(), data);
    let relations: Vec<Vec<RatFunc>> = nullspace(&m).into_iter().filter(|v| !v[0].is_zero()).collect();
    let v = relations.first().ok_or("no relation among ω, ∂ω, ∂²ω")?;
    for w in &relations[1..] {
        let ok = (0..3).all(|i| w[i].clone() * &v[0] == v[i].clone() * &w[0]);
        ensure(ok, || "the relation is not unique".into())?;
    }
    let c1 = v[1].checked_div(&v[0]).expect("nonzero");
    let c0 = v[2].checked_div(&v[0]).expect("nonzero");
    Ok((c1, c0))
}

/// F(t) = Σ (binom(2k,k)/4^k)² t^k is a period of the Legendre family; check
/// that it solves F'' + c1 F' + c0 F = 0 to `len` terms.
fn series_check(c1: &RatFunc, c0: &RatFunc, len: usize) -> Result<(), String> {
    let mut coeffs = vec![Rational::one()];
    for k in 1..len + 2 {
        let r = rat((2 * k as i64 - 1) * (2 * k as i64 - 1), 4 * (k as i64) * (k as i64));
        coeffs.push(coeffs[k - 1].clone() * r);
    }
    let common = RatFunc::from_poly(c1.den().clone()) * &RatFunc::from_poly(c0.den().clone());
    let p2 = common.num().clone();
    let p1 = (c1.clone() * &common).num().clone();
    let p0 = (c0.clone() * &common).num().clone();
    let series = |p: &UniPoly, s: &[Rational], k: usize| -> Rational {
        (0..=k).fold(Rational::zero(), |acc, i| {
            let c = p.coeff(i);
            if c.is_zero() || k - i >= s.len() {
                acc
            } else {
                acc + c * &s[k - i]
            }
        })
    };
    let d1: Vec<Rational> = (1..coeffs.len()).map(|k| coeffs[k].clone() * rat(k as i64, 1)).collect();
    let d2: Vec<Rational> = (1..d1.len()).map(|k| d1[k].clone() * rat(k as i64, 1)).collect();
    for k in 0..len.min(d2.len()) {
        let v = series(&p2, &d2, k) + series(&p1, &d1, k) + series(&p0, &coeffs, k);
        ensure(v.is_zero(), || format!("period series fails at t^{}", k))?;
    }
    Ok(())
}

fn criterion_6(all: &[Analysed]) -> Result<String, String> {
    let (c1, c0) = picard_fuchs_oracle()?;
    series_check(&c1, &c0, 24)?;
    let t = RatFunc::t();
    let tt = t.clone() * &(RatFunc::one() - t.clone());
    let expected1 = (RatFunc::one() - t.clone() * &RatFunc::from_i64(2)).checked_div(&tt).expect("nonzero");
    let expected0 = RatFunc::from_i64(-1).checked_div(&(tt * &RatFunc::from_i64(4))).expect("nonzero");
    ensure(c1 == expected1 && c0 == expected0, || format!("oracle gives {} and {}", c1, c0))?;
    let leg = all.iter().find(|a| a.name == "legendre").expect("listed");
    let ch = leg.space.bases[2].first().ok_or("no order-2 character")?;
    let a2 = ch.linear_coeff(0, 2);
    let r1 = ch.linear_coeff(0, 1).checked_div(&a2).ok_or("zero leading coefficient")?;
    let r0 = ch.linear_coeff(0, 0).checked_div(&a2).ok_or("zero leading coefficient")?;
    ensure(r1 == c1, || format!("character ratio {} vs oracle {}", r1, c1))?;
    ensure(r0 == c0, || format!("character ratio {} vs oracle {}", r0, c0))?;
    Ok(format!("ratios {} and {}", r1, r0))
}

fn kernel_groups(all: &[Analysed]) -> Vec<&Analysed> {
    all.iter().filter(|a| ["gm", "ga*gm", "legendre"].contains(&a.name)).collect()
}

fn criterion_7(all: &[Analysed]) -> Result<String, String> {
    let mut parts = Vec::new();
    for a in kernel_groups(all) {
        let m = a.kernel.m;
        let g = a.law.g();
        let dims: Vec<usize> = a.kernel.levels.iter().map(|l| l.dim_k).collect();
        let ns: Vec<usize> = a.kernel.levels.iter().map(|l| l.n).collect();
        ensure(ns == vec![m, m + 1, m + 2], || format!("{}: levels {:?}", a.name, ns))?;
        ensure(dims.iter().all(|&k| k == m * g), || format!("{}: dim K = {:?}, m g = {}", a.name, dims, m * g))?;
        parts.push(format!("{} {:?}", a.name, dims));
    }
    Ok(parts.join(", "))
}

fn criterion_8(all: &[Analysed]) -> Result<String, String> {
    let mut parts = Vec::new();
    for a in all {
        let det_ok = nullspace(&a.space.primitive.a).is_empty() && a.space.primitive.a.rows() == a.law.g();
        ensure(det_ok, || format!("{}: A is singular", a.name))?;
    }
    for a in kernel_groups(all) {
        let m = a.kernel.m;
        let g = a.law.g();
        let dim_l = a.kernel.dim_l.ok_or_else(|| format!("{}: no L(G)", a.name))?;
        ensure(dim_l == (m - 1) * g, || format!("{}: dim L = {}, (m-1) g = {}", a.name, dim_l, (m - 1) * g))?;
        let km = a.kernel.levels[0].dim_k;
        ensure(dim_l + g == km, || format!("{}: dim L + g = {} vs dim K^m = {}", a.name, dim_l + g, km))?;
        parts.push(format!("{} dim L = {}", a.name, dim_l));
    }
    Ok(format!("{}; A invertible on all five", parts.join(", ")))
}

fn criterion_9() -> Result<String, String> {
    let text = "name = \"legendre curve\"\nvars = [\"x\", \"y\"]\nrelations = [\"y^2 - x*(x - 1)*(x - t)\"]\npoints = [[\"0\", \"0\"], [\"1\", \"0\"], [\"t\", \"0\"]]\n";
    let SpecFile::Scheme(s) = parse_spec(text, "legendre_curve.toml").map_err(|e| e.to_string())? else {
        return Err("not a scheme".into());
    };
    let records =
        oracle_trials(&s.scheme, &s.points, 3, 100, SEED, &FieldConfig::standard()).map_err(|e| e.to_string())?;
    let valid = records.iter().filter(|r| r.kind == "valid").count();
    let invalid = records.iter().filter(|r| r.kind == "perturbed").count();
    ensure(valid == 100 && invalid == 100, || format!("{} valid, {} perturbed", valid, invalid))?;
    let disagreements = records.iter().filter(|r| r.verdict.is_none()).count();
    let wrong_valid = records.iter().filter(|r| r.kind == "valid" && r.verdict != Some(true)).count();
    let wrong_invalid = records.iter().filter(|r| r.kind == "perturbed" && r.verdict != Some(false)).count();
    ensure(records.iter().all(|r| r.level <= 3), || "jet level above 3".into())?;
    ensure(disagreements == 0 && wrong_valid == 0 && wrong_invalid == 0, || {
        format!(
            "{} disagreements, {} valid jets rejected, {} perturbed jets accepted",
            disagreements, wrong_valid, wrong_invalid
        )
    })?;
    Ok("100 valid + 100 perturbed jets, 0 disagreements".into())
}

fn criterion_10() -> Result<String, String> {
    let props = ["partlead", "strict-order-growth", "prop3-rank", "nn-additive", "deltaT-split", "kk-square"];
    let mut ctx = Context::new();
    let res = run_properties("lemmas", &props, SEED, 200, &mut ctx);
    let tallies: Vec<String> = res
        .properties
        .iter()
        .map(|t| format!("{} {}/{}", t.property, t.cases - t.failures, t.cases))
        .collect();
    if let Some(f) = res.failures.first() {
        return Err(format!(
            "{} failures; first: {} case {} (seed {}) [{}] {}",
            res.failures.len(),
            f.property,
            f.case,
            f.seed,
            f.invariant,
            f.detail
        ));
    }
    ensure(res.properties.iter().all(|t| t.cases >= 200), || "fewer than 200 cases".into())?;
    Ok(tallies.join(", "))
}

fn main() -> ExitCode {
    let d = FieldConfig::standard();
    let start = Instant::now();
    let all: Result<Vec<Analysed>, String> = GROUPS.iter().map(|&n| analyse(n, &d)).collect();
    let mut passed = 0;
    let total = 10;
    match &all {
        Ok(all) => {
            println!("analysed {} groups in {:.1}s", all.len(), start.elapsed().as_secs_f64());
            let group_criteria: [(&str, fn(&[Analysed]) -> Result<String, String>); 8] = [
                ("primitive count", criterion_1),
                ("order bound", criterion_2),
                ("dimension identity", criterion_3),
                ("h sequences", criterion_4),
                ("legendre splitting numbers", criterion_5),
                ("Picard-Fuchs cross-check", criterion_6),
                ("kernel dimensions", criterion_7),
                ("L(G) ledger and invertible A", criterion_8),
            ];
            for (i, (title, f)) in group_criteria.iter().enumerate() {
                let s = Instant::now();
                passed += report(i + 1, title, f(all), s) as usize;
            }
        }
        Err(e) => {
            for i in 1..=8 {
                println!("[FAIL] {i:>2}. analysis failed: {e}");
            }
        }
    }
    let s = Instant::now();
    passed += report(9, "jet-point oracle", criterion_9(), s) as usize;
    let s = Instant::now();
    passed += report(10, "lemma property suites", criterion_10(), s) as usize;
    println!("{passed}/{total} criteria passed in {:.1}s", start.elapsed().as_secs_f64());
    if passed == total {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
