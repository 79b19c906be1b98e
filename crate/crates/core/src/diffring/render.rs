use std::fmt;

use super::{DiffPoly, JetVar, Monomial, Side};
use crate::basefield::Field;

pub fn order_suffix(order: usize) -> String {
    match order {
        0 => String::new(),
        1 => "'".to_string(),
        2 => "''".to_string(),
        k => format!("^({})", k),
    }
}

/// `x0, x0', x0'', x0^(3)`; right-hand tensor variables use `y`.
pub fn default_var_name(v: JetVar) -> String {
    let base = match v.side {
        Side::Right => "y",
        Side::Single | Side::Left => "x",
    };
    format!("{}{}{}", base, v.gen, order_suffix(v.order()))
}

fn monomial_text(m: &Monomial, name: &dyn Fn(JetVar) -> String) -> String {
    m.factors()
        .iter()
        .map(|(v, e)| {
            if *e == 1 {
                name(*v)
            } else {
                format!("{}^{}", name(*v), e)
            }
        })
        .collect::<Vec<_>>()
        .join("*")
}

fn wrap(s: String) -> String {
    if s.contains([' ', '/']) {
        format!("({})", s)
    } else {
        s
    }
}

pub fn render_with<F: Field>(p: &DiffPoly<F>, name: &dyn Fn(JetVar) -> String) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (m, c)) in p.terms().enumerate() {
        let neg = c.is_negative();
        let a = if neg { -c.clone() } else { c.clone() };
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        if m.is_one() {
            out.push_str(&wrap(a.to_string()));
        } else if a.is_one() {
            out.push_str(&monomial_text(m, name));
        } else {
            out.push_str(&wrap(a.to_string()));
            out.push('*');
            out.push_str(&monomial_text(m, name));
        }
    }
    out
}

impl<F: Field> fmt::Display for DiffPoly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", render_with(self, &default_var_name))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basefield::RatFunc;
    use num_traits::One;

    type P = DiffPoly<RatFunc>;

    fn x(order: usize) -> P {
        P::var(JetVar::new(0, order), None)
    }

    #[test]
    fn variable_names() {
        assert_eq!(default_var_name(JetVar::new(0, 0)), "x0");
        assert_eq!(default_var_name(JetVar::new(1, 1)), "x1'");
        assert_eq!(default_var_name(JetVar::new(0, 2)), "x0''");
        assert_eq!(default_var_name(JetVar::new(0, 3)), "x0^(3)");
        assert_eq!(default_var_name(JetVar::right(2, 0)), "y2");
    }

    #[test]
    fn canonical_text() {
        let t = P::constant(RatFunc::t(), None);
        let half = P::constant(RatFunc::one().checked_div(&RatFunc::from_i64(-2)).unwrap(), None);
        let p = &(&(&x(1) - &(&x(0) * &x(1))) + &(&t * &x(3))) + &(&half * &(&x(1) * &x(1)));
        assert_eq!(p.to_string(), "x0' + t*x0^(3) - x0*x0' - (1/2)*x0'^2");
        let tp1 = P::constant(RatFunc::t() + RatFunc::one(), None);
        assert_eq!((&tp1 * &x(0)).to_string(), "(t + 1)*x0");
        assert_eq!(P::zero(None).to_string(), "0");
    }
}
