use std::collections::HashMap;

use jetchar::basefield::{nullspace, rank, Derivation, Field, FieldConfig, Matrix, RatFunc, Rational, SparseEchelon, UniPoly};
use jetchar::diffring::{DiffPoly, JetVar, Monomial};
use jetchar::groups::by_name;
use num_bigint::BigInt;
use proptest::prelude::*;

fn q(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

fn unipoly() -> impl Strategy<Value = UniPoly> {
    prop::collection::vec(-6i64..=6, 0..4).prop_map(|c| UniPoly::new(c.into_iter().map(q).collect()))
}

fn ratfunc() -> impl Strategy<Value = RatFunc> {
    (unipoly(), unipoly()).prop_map(|(n, d)| RatFunc::new(n, d).unwrap_or_else(RatFunc::t))
}

fn jetvar(g: usize, max_order: usize) -> impl Strategy<Value = JetVar> {
    (0..g, 0..=max_order).prop_map(|(j, i)| JetVar::new(j, i))
}

fn poly() -> impl Strategy<Value = DiffPoly<RatFunc>> {
    let term = (prop::collection::vec(jetvar(2, 2), 0..4), ratfunc());
    prop::collection::vec(term, 0..5).prop_map(|terms| {
        DiffPoly::from_terms(
            terms
                .into_iter()
                .map(|(vs, c)| (Monomial::from_pairs(vs.into_iter().map(|v| (v, 1))), c)),
            None,
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ratfunc_field_axioms(a in ratfunc(), b in ratfunc(), c in ratfunc()) {
        prop_assert_eq!(a.clone() + &b, b.clone() + &a);
        prop_assert_eq!((a.clone() * &b) * &c, a.clone() * &(b.clone() * &c));
        prop_assert_eq!(a.clone() * &(b.clone() + &c), a.clone() * &b + a.clone() * &c);
        if let Some(i) = a.inv() {
            prop_assert_eq!(i * &a, RatFunc::from_i64(1));
        }
    }

    #[test]
    fn derivation_is_leibniz(a in ratfunc(), b in ratfunc()) {
        let d = FieldConfig::standard();
        prop_assert_eq!(d.derive(&(a.clone() * &b)), d.derive(&a) * &b + a.clone() * &d.derive(&b));
    }

    #[test]
    fn total_derivative_is_leibniz(p in poly(), r in poly()) {
        let d = FieldConfig::standard();
        let lhs = (&p * &r).total_derive(&d);
        let rhs = &(&p.total_derive(&d) * &r) + &(&p * &r.total_derive(&d));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn rendering_round_trips_through_the_parser(p in poly()) {
        let mut names = HashMap::new();
        for j in 0..2 {
            for i in 0..=2 {
                let v = JetVar::new(j, i);
                names.insert(jetchar::diffring::default_var_name(v), v);
            }
        }
        let text = p.to_string();
        let back = jetchar::parse::parse_poly(&text, &names, &jetchar::parse::Origin::inline());
        prop_assert_eq!(back.unwrap(), p);
    }

    #[test]
    fn jet_comultiplication_commutes_with_the_derivation(
        which in 0usize..3,
        n in 1usize..=2,
        vars in prop::collection::vec(jetvar(1, 1), 1..4),
        c in ratfunc(),
    ) {
        let name = ["ga", "gm", "legendre"][which];
        let law = by_name(name, 5, &RatFunc::t()).unwrap();
        let d = FieldConfig::standard();
        let vars: Vec<JetVar> = vars.into_iter().filter(|v| v.order() < n).collect();
        let m = Monomial::from_pairs(vars.into_iter().map(|v| (v, 1)));
        let p = DiffPoly::monomial(c, m, Some(law.trunc()));
        let jc = law.jet_comul(n, &d);
        prop_assert_eq!(jc.apply(&p.total_derive(&d)).unwrap(), jc.apply(&p).unwrap().total_derive(&d));
    }

    #[test]
    fn nullspace_vectors_are_annihilated(rows in prop::collection::vec(prop::collection::vec(-4i64..=4, 4), 1..5)) {
        let m = Matrix::from_rows(4, rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect());
        let ns = nullspace(&m);
        prop_assert_eq!(ns.len() + rank(&m), 4);
        for v in &ns {
            prop_assert!(m.mul_vec(v).iter().all(|x| x == &q(0)));
        }
        let mut sparse = SparseEchelon::new(4);
        for r in m.row_vecs() {
            sparse.insert(r.iter().cloned().enumerate());
        }
        prop_assert_eq!(sparse.rank(), rank(&m));
        for v in sparse.nullspace() {
            prop_assert!(m.mul_vec(&v).iter().all(|x| x == &q(0)));
        }
    }
}
