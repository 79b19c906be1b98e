use crate::basefield::Field;
use crate::diffring::{DiffPoly, JetVar, Side};
use crate::error::{Error, Result};

use super::derham::{DeRhamBlock, DeRhamModel};
use super::{series, shift_gens, FormalGroupLaw, Recipe};

/// Names accepted by [`by_name`], with a short description.
pub const CATALOG: &[(&str, &str)] = &[
    ("ga", "additive group, F = X + Y"),
    ("gm", "multiplicative group in x = u - 1, F = X + Y + XY"),
    ("legendre", "formal group of y^2 = x(x-1)(x-λ) at infinity"),
    ("<a>*<b>*...", "products, e.g. ga*gm or ga^2*gm"),
];

fn var<F: Field>(side: Side, trunc: Option<u32>) -> DiffPoly<F> {
    DiffPoly::var(JetVar::new(0, 0).with_side(side), trunc)
}

pub fn ga<F: Field>(trunc: u32) -> FormalGroupLaw<F> {
    let f = &var::<F>(Side::Left, None) + &var(Side::Right, None);
    FormalGroupLaw::polynomial("ga", vec![f], trunc)
        .expect("additive law")
        .with_ext_dim(Some(0))
        .with_derham(DeRhamModel::new(vec![DeRhamBlock::Additive { gen: 0 }]))
}

pub fn gm<F: Field>(trunc: u32) -> FormalGroupLaw<F> {
    let x = var::<F>(Side::Left, None);
    let y = var::<F>(Side::Right, None);
    let f = &(&x + &y) + &(&x * &y);
    let unit = &DiffPoly::one(None) + &var(Side::Single, None);
    FormalGroupLaw::polynomial("gm", vec![f], trunc)
        .expect("multiplicative law")
        .with_units(vec![unit])
        .expect("1 + x is group-like")
        .with_ext_dim(Some(0))
        .with_derham(DeRhamModel::new(vec![DeRhamBlock::Multiplicative { gen: 0 }]))
}

/// The formal group of y^2 = x(x-1)(x-λ) in the parameter z = -x/y,
/// obtained as ℓ^{-1}(ℓ(X) + ℓ(Y)).
pub fn legendre<F: Field>(lambda: F, trunc: u32) -> Result<FormalGroupLaw<F>> {
    if lambda.is_zero() || lambda.is_one() {
        return Err(Error::Input(format!("Legendre parameter {} gives a singular curve", lambda)));
    }
    if trunc == 0 {
        return Err(Error::Input("truncation degree must be positive".into()));
    }
    let d = trunc as usize;
    let a2 = -(F::one() + &lambda);
    let a4 = lambda.clone();
    // w = z^3 + a2 z^2 w + a4 z w^2, solved by fixed-point iteration
    let wlen = d + 4;
    let mut w = vec![F::zero(); wlen];
    for _ in 0..wlen {
        let w2 = series::mul(&w, &w, wlen);
        let mut next = vec![F::zero(); wlen];
        next[3] = F::one();
        for k in 0..wlen {
            if k >= 2 && !w[k - 2].is_zero() {
                next[k] = next[k].clone() + a2.clone() * &w[k - 2];
            }
            if k >= 1 && !w2[k - 1].is_zero() {
                next[k] = next[k].clone() + a4.clone() * &w2[k - 1];
            }
        }
        if next == w {
            break;
        }
        w = next;
    }
    // w = z^3 u, and ω/dz = -(w - z w')/(2w) = 1 + z u'/(2u)
    let u: Vec<F> = w[3..].to_vec();
    let du = series::derivative(&u);
    let ratio = series::mul(&du, &series::inverse(&u, d), d);
    let half = F::from_rational(&crate::basefield::rat(1, 2));
    let mut omega = vec![F::zero(); d];
    omega[0] = F::one();
    for k in 1..d {
        omega[k] = omega[k].clone() + ratio[k - 1].clone() * &half;
    }
    let log = series::integrate(&omega, d + 1);
    let exp = series::reversion(&log, d + 1);
    let t = Some(trunc);
    let s = &series::apply(&log, &var(Side::Left, t)) + &series::apply(&log, &var(Side::Right, t));
    let f = series::apply(&exp, &s);
    Ok(FormalGroupLaw {
        name: "legendre".into(),
        g: 1,
        comul: vec![f],
        trunc,
        exact: false,
        ext_dim: Some(1),
        units: Vec::new(),
        derham: Some(DeRhamModel::new(vec![DeRhamBlock::Legendre {
            gen: 0,
            lambda: lambda.clone(),
        }])),
        recipe: Recipe::Legendre(lambda),
    })
}

/// Block-diagonal product; all factors must share the truncation degree.
pub fn product<F: Field>(factors: &[FormalGroupLaw<F>]) -> Result<FormalGroupLaw<F>> {
    let Some(first) = factors.first() else {
        return Err(Error::Input("empty product".into()));
    };
    if factors.len() == 1 {
        return Ok(first.clone());
    }
    let trunc = first.trunc;
    if factors.iter().any(|f| f.trunc != trunc) {
        return Err(Error::Input("product factors have different truncations".into()));
    }
    let mut comul = Vec::new();
    let mut units = Vec::new();
    let mut derham = Vec::new();
    let mut ext = Some(0);
    let mut off = 0;
    for f in factors {
        comul.extend(f.comul.iter().map(|p| shift_gens(p, off)));
        units.extend(f.units.iter().map(|p| shift_gens(p, off)));
        derham.push(f.derham.as_ref().map(|m| m.shifted(off)));
        ext = match (ext, f.ext_dim) {
            (Some(a), Some(b)) => Some(a + b),
            _ => None,
        };
        off += f.g;
    }
    let derham = derham
        .into_iter()
        .collect::<Option<Vec<_>>>()
        .map(|ms| DeRhamModel::direct_sum(&ms));
    Ok(FormalGroupLaw {
        name: factors.iter().map(|f| f.name.as_str()).collect::<Vec<_>>().join("*"),
        g: off,
        comul,
        trunc,
        exact: factors.iter().all(|f| f.exact),
        ext_dim: ext,
        units,
        derham,
        recipe: Recipe::Product(factors.to_vec()),
    })
}

/// Resolve a catalog name such as `gm`, `legendre` or `ga^2*gm`.
pub fn by_name<F: Field>(name: &str, trunc: u32, lambda: &F) -> Result<FormalGroupLaw<F>> {
    let mut factors = Vec::new();
    for part in name.split('*').map(str::trim) {
        let (base, count) = match part.split_once('^') {
            Some((b, e)) => {
                let e: usize = e
                    .trim()
                    .parse()
                    .map_err(|_| Error::Input(format!("bad exponent in group name '{}'", part)))?;
                if e == 0 {
                    return Err(Error::Input(format!("zero exponent in group name '{}'", part)));
                }
                (b.trim(), e)
            }
            None => (part, 1),
        };
        let g = match base {
            "ga" => ga(trunc),
            "gm" => gm(trunc),
            "legendre" => legendre(lambda.clone(), trunc)?,
            other => return Err(Error::Input(format!("unknown group '{}'", other))),
        };
        for _ in 0..count {
            factors.push(g.clone());
        }
    }
    let mut g = product(&factors)?;
    g.name = name.to_string();
    Ok(g)
}
