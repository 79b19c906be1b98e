//! The prolonged primitive map [Θ̃]_n, the kernels K^nG at the linear level,
//! and the dimension ledger of the vectorial extension 0 → L → K(G) → G → 0.

use serde::Serialize;

use crate::basefield::{rank, Derivation, Field, Matrix};
use crate::characters::{del_action, Character, PrimitiveBasis};
use crate::error::{Error, Result};
use crate::groups::FormalGroupLaw;

/// Components {∂^s Θ̃_i : 0 ≤ s ≤ n - m} at level n, indexed [s][i].
#[derive(Clone, Debug)]
pub struct ThetaMap<F> {
    pub m: usize,
    pub g: usize,
    pub level: usize,
    pub components: Vec<Vec<Character<F>>>,
}

impl<F: Field> ThetaMap<F> {
    pub fn len(&self) -> usize {
        self.components.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = &Character<F>> {
        self.components.iter().flatten()
    }

    /// Linear parts in the (level+1)g coordinates ∂^i x_j, columns ordered
    /// by order then generator.
    pub fn jacobian(&self) -> Matrix<F> {
        let cols = (self.level + 1) * self.g;
        let rows = self
            .iter()
            .map(|c| {
                let mut r = vec![F::zero(); cols];
                for i in 0..=self.level {
                    for j in 0..self.g {
                        r[i * self.g + j] = c.linear_coeff(j, i);
                    }
                }
                r
            })
            .collect();
        Matrix::from_rows(cols, rows)
    }
}

/// Build [Θ̃]_n; every component is re-verified as a character.
pub fn build_theta_map<F: Field>(
    law: &FormalGroupLaw<F>,
    prim: &PrimitiveBasis<F>,
    n: usize,
    d: &dyn Derivation<F>,
) -> Result<ThetaMap<F>> {
    if n < prim.m {
        return Err(Error::Input(format!("level {} is below the primitive order {}", n, prim.m)));
    }
    let mut components = vec![prim.tilde.clone()];
    for c in &prim.tilde {
        let defect = crate::characters::additivity_defect(law, c.level, &c.theta, d)?;
        if !defect.is_zero() {
            return Err(Error::invariant("theta-component", format!("Θ̃ has defect {}", defect)));
        }
    }
    for _ in prim.m..n {
        let last = components.last().expect("nonempty");
        let next = last.iter().map(|c| del_action(law, c, d)).collect::<Result<Vec<_>>>()?;
        components.push(next);
    }
    Ok(ThetaMap {
        m: prim.m,
        g: law.g(),
        level: n,
        components,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KernelLevel {
    pub n: usize,
    pub dim_j: usize,
    pub jacobian_rank: usize,
    pub dim_k: usize,
    /// rank = (n - m + 1) g
    pub surjective: bool,
    /// Block-triangular Jacobian with diagonal blocks A.
    pub block_structure: bool,
}

pub fn kernel_dims<F: Field>(theta: &ThetaMap<F>, a: &Matrix<F>) -> Result<KernelLevel> {
    let g = theta.g;
    let n = theta.level;
    let jac = theta.jacobian();
    let r = rank(&jac);
    let dim_j = (n + 1) * g;
    let surjective = r == theta.len();
    if !surjective {
        return Err(Error::invariant(
            "theta-surjective",
            format!("Jacobian of [Θ̃]_{} has rank {} < {}", n, r, theta.len()),
        ));
    }
    let mut block_structure = true;
    for (s, block) in theta.components.iter().enumerate() {
        let top = theta.m + s;
        for (i, c) in block.iter().enumerate() {
            for j in 0..g {
                if &c.linear_coeff(j, top) != a.get(i, j) {
                    block_structure = false;
                }
                for above in top + 1..=n {
                    if !c.linear_coeff(j, above).is_zero() {
                        block_structure = false;
                    }
                }
            }
        }
    }
    Ok(KernelLevel {
        n,
        dim_j,
        jacobian_rank: r,
        dim_k: dim_j - r,
        surjective,
        block_structure,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KernelReport {
    pub m: usize,
    /// m = 0: [Θ̃]_0 is an isomorphism and the extension degenerates.
    pub degenerate: bool,
    pub levels: Vec<KernelLevel>,
    pub dim_l: Option<usize>,
    /// dim K^n G is the same at every computed level.
    pub stable: bool,
    /// dim K^m G = m g.
    pub dim_k_is_mg: bool,
    /// ∂ maps level-n components onto level-(n+1) components.
    pub d_stable: bool,
}

/// Kernel dimensions at levels m..=m+extra and the L(G) ledger.
pub fn vectorial_extension_report<F: Field>(
    law: &FormalGroupLaw<F>,
    prim: &PrimitiveBasis<F>,
    extra: usize,
    d: &dyn Derivation<F>,
) -> Result<KernelReport> {
    let m = prim.m;
    let g = law.g();
    let mut maps = Vec::new();
    let mut levels = Vec::new();
    for n in m..=m + extra {
        let t = build_theta_map(law, prim, n, d)?;
        let lv = kernel_dims(&t, &prim.a)?;
        if !lv.block_structure {
            return Err(Error::invariant("block-structure", format!("level {} Jacobian is not block triangular with diagonal A", n)));
        }
        levels.push(lv);
        maps.push(t);
    }
    let stable = levels.windows(2).all(|w| w[0].dim_k == w[1].dim_k);
    if !stable {
        return Err(Error::invariant(
            "kernel-stability",
            format!("dim K^n G varies: {:?}", levels.iter().map(|l| l.dim_k).collect::<Vec<_>>()),
        ));
    }
    let dim_k_is_mg = levels[0].dim_k == m * g;
    if !dim_k_is_mg {
        return Err(Error::invariant("kernel-dim", format!("dim K^m G = {} but m g = {}", levels[0].dim_k, m * g)));
    }
    let mut d_stable = true;
    for w in maps.windows(2) {
        for (s, block) in w[0].components.iter().enumerate() {
            for (i, c) in block.iter().enumerate() {
                if c.theta.total_derive(d) != w[1].components[s + 1][i].theta {
                    d_stable = false;
                }
            }
        }
    }
    if !d_stable {
        return Err(Error::invariant("d-stable", "a derived component is not a component of the next level"));
    }
    let dim_l = if m == 0 {
        None
    } else {
        // restrict the level-m linear parts to the N^m coordinates (orders ≥ 1)
        let jac = maps[0].jacobian();
        let rows = (0..jac.rows()).map(|r| jac.row(r)[g..].to_vec()).collect();
        let restricted = Matrix::from_rows(m * g, rows);
        let dl = m * g - rank(&restricted);
        if dl != (m - 1) * g || dl + g != levels[0].dim_k {
            return Err(Error::invariant(
                "vectorial-extension",
                format!("dim L = {} but (m-1)g = {} and dim K^m G = {}", dl, (m - 1) * g, levels[0].dim_k),
            ));
        }
        Some(dl)
    };
    Ok(KernelReport {
        m,
        degenerate: m == 0,
        levels,
        dim_l,
        stable,
        dim_k_is_mg,
        d_stable,
    })
}

/// The linear-part row spaces of [Θ̃]_n agree for two primitive bases at
/// every level m..=m+extra.
pub fn basis_independence<F: Field>(
    law: &FormalGroupLaw<F>,
    p1: &PrimitiveBasis<F>,
    p2: &PrimitiveBasis<F>,
    extra: usize,
    d: &dyn Derivation<F>,
) -> Result<bool> {
    if p1.m != p2.m {
        return Ok(false);
    }
    for n in p1.m..=p1.m + extra {
        let j1 = build_theta_map(law, p1, n, d)?.jacobian();
        let j2 = build_theta_map(law, p2, n, d)?.jacobian();
        let mut stacked = j1.clone();
        for r in j2.row_vecs() {
            stacked.push_row(r.clone());
        }
        let (r1, r2, rs) = (rank(&j1), rank(&j2), rank(&stacked));
        if r1 != r2 || rs != r1 {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basefield::{FieldConfig, RatFunc};
    use crate::characters::{analyze, AnalyzeOptions};
    use crate::groups::by_name;
    use num_traits::One;

    fn run(name: &str, trunc: u32, n: usize) -> (FormalGroupLaw<RatFunc>, KernelReport, PrimitiveBasis<RatFunc>) {
        let law = by_name(name, trunc, &RatFunc::t()).unwrap();
        let d = FieldConfig::standard();
        let s = analyze(&law, n, &d, &AnalyzeOptions::default()).unwrap();
        let rep = vectorial_extension_report(&law, &s.primitive, 2, &d).unwrap();
        (law, rep, s.primitive)
    }

    #[test]
    fn ga_is_degenerate() {
        let (_, rep, _) = run("ga", 8, 2);
        assert!(rep.degenerate);
        assert_eq!(rep.dim_l, None);
        assert!(rep.levels.iter().all(|l| l.dim_k == 0));
    }

    #[test]
    fn gm_kernel() {
        let (_, rep, _) = run("gm", 8, 2);
        assert_eq!(rep.m, 1);
        assert_eq!(rep.dim_l, Some(0));
        assert!(rep.levels.iter().all(|l| l.dim_k == 1));
        assert_eq!(rep.levels[0].jacobian_rank, 1);
    }

    #[test]
    fn legendre_kernel() {
        let (_, rep, _) = run("legendre", 6, 3);
        assert_eq!(rep.m, 2);
        assert_eq!(rep.dim_l, Some(1));
        assert_eq!(rep.levels.iter().map(|l| l.dim_k).collect::<Vec<_>>(), vec![2, 2, 2]);
    }

    #[test]
    fn product_theta_map_and_rescaled_basis() {
        let (law, _, prim) = run("ga*gm", 8, 2);
        let d = FieldConfig::standard();
        let t = build_theta_map(&law, &prim, 2, &d).unwrap();
        assert_eq!(t.len(), 4);
        let mut scaled = prim.clone();
        let c = RatFunc::one() + RatFunc::t();
        for ch in scaled.tilde.iter_mut().chain(scaled.characters.iter_mut()) {
            *ch = Character::new(ch.theta.scale(&c), ch.level, 2);
        }
        scaled.a = scaled.a.map(|x| x.clone() * &c);
        assert!(basis_independence(&law, &prim, &scaled, 2, &d).unwrap());
    }

    #[test]
    fn nonconstant_rescaling_below_the_top_order_moves_the_kernel() {
        let (law, _, prim) = run("ga*gm", 8, 2);
        let d = FieldConfig::standard();
        assert_eq!(prim.orders, vec![0, 1]);
        let mut chars = prim.characters.clone();
        chars[0] = Character::new(chars[0].theta.scale(&(RatFunc::one() + RatFunc::t())), 0, 2);
        let other = crate::characters::primitive_from_characters(&law, chars, &d).unwrap();
        assert!(!basis_independence(&law, &prim, &other, 1, &d).unwrap());
        let rep = vectorial_extension_report(&law, &other, 2, &d).unwrap();
        assert!(rep.levels.iter().all(|l| l.dim_k == 2));
        assert_eq!(rep.dim_l, Some(0));
    }
}
