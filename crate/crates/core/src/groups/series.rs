//! Univariate truncated power series, stored densely: `s[k]` multiplies z^k.

use crate::basefield::Field;
use crate::diffring::{DiffPoly, JetVar, Monomial};

pub fn mul<F: Field>(a: &[F], b: &[F], len: usize) -> Vec<F> {
    let mut out = vec![F::zero(); len];
    for (i, x) in a.iter().enumerate().take(len) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(len - i) {
            if !y.is_zero() {
                out[i + j] = out[i + j].clone() + x.clone() * y;
            }
        }
    }
    out
}

/// 1/a for a[0] ≠ 0.
pub fn inverse<F: Field>(a: &[F], len: usize) -> Vec<F> {
    let inv0 = a[0].inv().expect("series with invertible constant term");
    let mut out = vec![F::zero(); len];
    if len == 0 {
        return out;
    }
    out[0] = inv0.clone();
    for k in 1..len {
        let mut s = F::zero();
        for i in 1..=k.min(a.len() - 1) {
            if !a[i].is_zero() {
                s = s + a[i].clone() * &out[k - i];
            }
        }
        out[k] = -(s * &inv0);
    }
    out
}

pub fn derivative<F: Field>(a: &[F]) -> Vec<F> {
    a.iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c.clone() * &F::from_i64(k as i64))
        .collect()
}

/// Antiderivative with zero constant term.
pub fn integrate<F: Field>(a: &[F], len: usize) -> Vec<F> {
    let mut out = vec![F::zero(); len];
    for (k, c) in a.iter().enumerate() {
        if k + 1 < len {
            out[k + 1] = c.checked_div(&F::from_i64(k as i64 + 1)).expect("char 0");
        }
    }
    out
}

/// a(b(z)) for b[0] = 0.
pub fn compose<F: Field>(a: &[F], b: &[F], len: usize) -> Vec<F> {
    assert!(b.first().is_none_or(|c| c.is_zero()), "inner series must vanish at 0");
    let mut out = vec![F::zero(); len];
    for c in a.iter().rev() {
        out = mul(&out, b, len);
        out[0] = out[0].clone() + c;
    }
    out
}

/// Compositional inverse of a = z + O(z^2).
pub fn reversion<F: Field>(a: &[F], len: usize) -> Vec<F> {
    assert!(a.len() > 1 && a[0].is_zero() && a[1].is_one(), "series must be z + O(z^2)");
    let mut b = vec![F::zero(); len];
    if len > 1 {
        b[1] = F::one();
    }
    // Newton-free fixed point: b = z - (a(b) - b), one new coefficient per pass.
    for _ in 2..len {
        let ab = compose(a, &b, len);
        for k in 0..len {
            let ident = if k == 1 { F::one() } else { F::zero() };
            b[k] = b[k].clone() - (ab[k].clone() - ident);
        }
    }
    b
}

/// Σ s_k p^k, truncated at the bound of `p`.
pub fn apply<F: Field>(s: &[F], p: &DiffPoly<F>) -> DiffPoly<F> {
    let mut out = DiffPoly::zero(p.trunc());
    for c in s.iter().rev() {
        out = &out * p;
        out.add_term(Monomial::one(), c.clone());
    }
    out
}

pub fn to_poly<F: Field>(s: &[F], v: JetVar, trunc: Option<u32>) -> DiffPoly<F> {
    DiffPoly::from_terms(
        s.iter()
            .enumerate()
            .map(|(k, c)| (Monomial::from_pairs([(v, k as u32)]), c.clone())),
        trunc,
    )
}
