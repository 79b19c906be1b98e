use std::cmp::Reverse;
use std::collections::{BTreeSet, HashMap};

use crate::basefield::{Field, SparseEchelon};
use crate::diffring::{DiffPoly, Monomial};

/// Column order used for echelon forms of characters: linear monomials
/// first, highest jet order first and generators in `gen_order`, then all
/// other monomials in the ring order.
fn columns(monos: BTreeSet<Monomial>, gen_order: &[usize]) -> Vec<Monomial> {
    let rank = |g: usize| gen_order.iter().position(|&x| x == g).unwrap_or(g + gen_order.len());
    let (mut lin, rest): (Vec<Monomial>, Vec<Monomial>) = monos.into_iter().partition(|m| m.as_var().is_some());
    lin.sort_by_key(|m| {
        let v = m.as_var().expect("linear");
        (v.side, Reverse(v.order()), rank(v.gen()))
    });
    lin.extend(rest);
    lin
}

/// A subspace of a polynomial space, with a fixed column order.
pub(crate) struct PolySpace<F> {
    cols: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
    ech: SparseEchelon<F>,
    trunc: Option<u32>,
}

impl<F: Field> PolySpace<F> {
    /// The universe of columns is taken from `universe`.
    pub fn new<'a>(universe: impl IntoIterator<Item = &'a DiffPoly<F>>, gen_order: &[usize]) -> Self {
        let mut monos = BTreeSet::new();
        let mut trunc = None;
        for p in universe {
            trunc = p.trunc();
            monos.extend(p.terms().map(|(m, _)| m.clone()));
        }
        let cols = columns(monos, gen_order);
        let index = cols.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
        PolySpace {
            ech: SparseEchelon::new(cols.len()),
            cols,
            index,
            trunc,
        }
    }

    fn entries(&self, p: &DiffPoly<F>) -> Vec<(usize, F)> {
        p.terms()
            .map(|(m, c)| (*self.index.get(m).expect("monomial in universe"), c.clone()))
            .collect()
    }

    fn poly(&self, entries: &[(usize, F)]) -> DiffPoly<F> {
        DiffPoly::from_terms(entries.iter().map(|(j, c)| (self.cols[*j].clone(), c.clone())), self.trunc)
    }

    pub fn insert(&mut self, p: &DiffPoly<F>) -> bool {
        let e = self.entries(p);
        self.ech.insert(e)
    }

    pub fn rank(&self) -> usize {
        self.ech.rank()
    }

    pub fn reduce(&self, p: &DiffPoly<F>) -> DiffPoly<F> {
        let r = self.ech.reduce(self.entries(p));
        self.poly(&r)
    }

    pub fn contains(&self, p: &DiffPoly<F>) -> bool {
        self.reduce(p).is_zero()
    }

    /// Reduced echelon basis, ordered by pivot column.
    pub fn basis(&self) -> Vec<DiffPoly<F>> {
        self.ech.reduced_rows().iter().map(|(_, r)| self.poly(r)).collect()
    }
}

/// Canonical reduced echelon basis of the span of `polys`.
pub fn echelon_basis<F: Field>(polys: &[DiffPoly<F>], gen_order: &[usize]) -> Vec<DiffPoly<F>> {
    let mut s = PolySpace::new(polys, gen_order);
    for p in polys {
        s.insert(p);
    }
    s.basis()
}

pub fn span_rank<F: Field>(polys: &[DiffPoly<F>]) -> usize {
    let mut s = PolySpace::new(polys, &[]);
    for p in polys {
        s.insert(p);
    }
    s.rank()
}
