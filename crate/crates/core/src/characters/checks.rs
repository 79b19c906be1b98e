//! Structural identities that every computed character space must satisfy.

use crate::basefield::{Derivation, Field};
use crate::diffring::DiffPoly;
use crate::error::{Error, Result};
use crate::groups::FormalGroupLaw;

use super::{del_action, span_rank, Character, CharacterSpace};

/// dim X_n = (n+1) l_0 + n l_1 + … + l_n for every computed n.
pub fn dim_identity(dims: &[usize], l: &[usize]) -> bool {
    dims.iter().enumerate().all(|(n, &dim)| {
        let rhs: usize = (0..=n).map(|i| (n + 1 - i) * l[i]).sum();
        rhs == dim
    })
}

/// Leading rows survive s = 1..=steps derivatives and the strict order
/// grows by exactly one each time; every derivative is re-verified.
pub fn partlead<F: Field>(
    law: &FormalGroupLaw<F>,
    ch: &Character<F>,
    steps: usize,
    d: &dyn Derivation<F>,
) -> Result<()> {
    let Some(k) = ch.strict_order else {
        return Ok(());
    };
    let mut cur = ch.clone();
    for s in 1..=steps {
        cur = del_action(law, &cur, d)?;
        if cur.strict_order != Some(k + s) {
            return Err(Error::invariant(
                "strict-order",
                format!("∂^{} of a strict order {} character has strict order {:?}", s, k, cur.strict_order),
            ));
        }
        if cur.leading != ch.leading {
            return Err(Error::invariant("leading-row", format!("leading row changed after {} derivatives", s)));
        }
    }
    Ok(())
}

/// Rank and cardinality of {∂^s Θ_i : o_i + s ≤ N} over the primitive basis.
pub fn prop3_rank<F: Field>(space: &CharacterSpace<F>, d: &dyn Derivation<F>) -> (usize, usize) {
    let mut all: Vec<DiffPoly<F>> = Vec::new();
    for c in &space.primitive.characters {
        let mut p = c.theta.clone();
        for _ in c.level..=space.max_order {
            all.push(p.clone());
            p = p.total_derive(d);
        }
    }
    (span_rank(&all), all.len())
}

/// dim X_n - dim X_{n-1} = g for every computed n ≥ m_u + 1.
pub fn lemma_ee<F: Field>(space: &CharacterSpace<F>) -> bool {
    ((space.m_u + 1)..=space.max_order).all(|n| n == 0 || space.dims[n] - space.dims[n - 1] == space.g)
}

/// Once h_N = 0 (N ≥ 1), no primitive characters appear beyond N.
pub fn hn_zero<F: Field>(space: &CharacterSpace<F>) -> bool {
    match (1..space.h.len()).find(|&n| space.h[n] == 0) {
        Some(n0) => space.l.iter().skip(n0 + 1).all(|&x| x == 0),
        None => true,
    }
}

/// Σ l_i = g and the primitive basis has g members.
pub fn xprim<F: Field>(space: &CharacterSpace<F>) -> bool {
    space.l.iter().sum::<usize>() == space.g && space.primitive.characters.len() == space.g
}

/// m_u ≤ r + 1, when r is declared.
pub fn order_bound<F: Field>(space: &CharacterSpace<F>, r: Option<usize>) -> Option<bool> {
    r.map(|r| space.m_u <= r + 1)
}
