//! Group and scheme spec files. The container format is TOML; polynomial
//! strings inside it go through [`crate::parse`], with diagnostics pointing at
//! the line and column of the offending token in the file.
//!
//! ```toml
//! name = "gm"
//! dim = 1
//! vars = ["x0"]
//! comul = ["x0 + y0 + x0*y0"]
//! units = ["1 + x0"]
//! trunc = 8
//! ext_dim = 0
//! ```
//!
//! A file with a `relations` key is a scheme spec instead:
//!
//! ```toml
//! name = "legendre-curve"
//! vars = ["x", "y"]
//! relations = ["y^2 - x*(x - 1)*(x - t)"]
//! points = [["0", "0"], ["1", "0"], ["t", "0"]]
//! max_order = 3
//! ```

use std::collections::{HashMap, HashSet};
use std::ops::Range;
use std::path::Path;

use serde::Deserialize;
use toml::Spanned;

use crate::basefield::RatFunc;
use crate::diffring::{DiffPoly, JetVar};
use crate::error::{Error, Result};
use crate::groups::FormalGroupLaw;
use crate::hasse::AffineScheme;
use crate::parse::{parse_poly, parse_ratfunc, Origin};

pub const TRUNC_ENV: &str = "JETCHAR_TRUNC_DEFAULT";
pub const DEFAULT_TRUNC: u32 = 8;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGroup {
    name: String,
    dim: usize,
    vars: Vec<Spanned<String>>,
    right_vars: Option<Vec<Spanned<String>>>,
    comul: Vec<Spanned<String>>,
    units: Option<Vec<Spanned<String>>>,
    trunc: Option<Spanned<u32>>,
    ext_dim: Option<usize>,
    ansatz_degree: Option<u32>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScheme {
    name: String,
    vars: Vec<Spanned<String>>,
    relations: Vec<Spanned<String>>,
    #[serde(default)]
    points: Vec<Vec<Spanned<String>>>,
    max_order: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct GroupSpec {
    pub name: String,
    pub vars: Vec<String>,
    pub right_vars: Vec<String>,
    pub comul: Vec<DiffPoly<RatFunc>>,
    pub units: Vec<DiffPoly<RatFunc>>,
    pub trunc: Option<u32>,
    pub ext_dim: Option<usize>,
    pub ansatz_degree: Option<u32>,
}

impl GroupSpec {
    pub fn g(&self) -> usize {
        self.comul.len()
    }

    /// The law at truncation `trunc`, validated against the group axioms.
    pub fn law(&self, trunc: u32) -> Result<FormalGroupLaw<RatFunc>> {
        FormalGroupLaw::polynomial(&self.name, self.comul.clone(), trunc)?
            .with_ext_dim(self.ext_dim)
            .with_units(self.units.clone())
    }
}

#[derive(Clone, Debug)]
pub struct SchemeSpec {
    pub name: String,
    pub scheme: AffineScheme<RatFunc>,
    pub points: Vec<Vec<RatFunc>>,
    pub max_order: usize,
}

#[derive(Clone, Debug)]
pub enum SpecFile {
    Group(GroupSpec),
    Scheme(SchemeSpec),
}

/// Line and column (1-based, in characters) of a byte offset.
fn position(text: &str, offset: usize) -> (usize, usize) {
    let mut line = 1;
    let mut col = 1;
    for (i, c) in text.char_indices() {
        if i >= offset {
            break;
        }
        if c == '\n' {
            line += 1;
            col = 1;
        } else {
            col += 1;
        }
    }
    (line, col)
}

struct Source<'a> {
    path: &'a str,
    text: &'a str,
}

impl Source<'_> {
    fn error(&self, span: Range<usize>, msg: impl Into<String>) -> Error {
        let (line, col) = position(self.text, span.start);
        Error::Parse {
            path: self.path.to_string(),
            line,
            col,
            msg: msg.into(),
        }
    }

    /// Origin of the first character inside a string literal.
    fn origin(&self, span: Range<usize>) -> Origin {
        let raw = &self.text[span.clone()];
        let mut start = span.start;
        if raw.starts_with("\"\"\"") || raw.starts_with("'''") {
            start += 3;
            if self.text[start..].starts_with("\r\n") {
                start += 2;
            } else if self.text[start..].starts_with('\n') {
                start += 1;
            }
        } else if raw.starts_with('"') || raw.starts_with('\'') {
            start += 1;
        }
        let (line, col) = position(self.text, start);
        Origin {
            path: self.path.to_string(),
            line,
            col,
        }
    }

    fn from_toml(&self, e: toml::de::Error) -> Error {
        let span = e.span().unwrap_or(0..0);
        self.error(span, e.message().trim().to_string())
    }

    fn names(&self, vars: &[Spanned<String>], taken: &mut HashSet<String>) -> Result<Vec<String>> {
        let mut out = Vec::new();
        for v in vars {
            let name = v.get_ref();
            let ok = name.chars().next().is_some_and(|c| c.is_alphabetic() || c == '_')
                && name.chars().all(|c| c.is_alphanumeric() || c == '_');
            if !ok {
                return Err(self.error(v.span(), format!("'{}' is not a variable name", name)));
            }
            if name == "t" {
                return Err(self.error(v.span(), "'t' is reserved for the field parameter"));
            }
            if !taken.insert(name.clone()) {
                return Err(self.error(v.span(), format!("variable '{}' declared twice", name)));
            }
            out.push(name.clone());
        }
        Ok(out)
    }

    fn polys(&self, src: &[Spanned<String>], vars: &HashMap<String, JetVar>) -> Result<Vec<DiffPoly<RatFunc>>> {
        src.iter()
            .map(|s| parse_poly(s.get_ref(), vars, &self.origin(s.span())))
            .collect()
    }

    fn group(&self, raw: RawGroup) -> Result<GroupSpec> {
        let whole = 0..0;
        if raw.vars.len() != raw.dim {
            return Err(self.error(whole, format!("dim = {} but {} vars are declared", raw.dim, raw.vars.len())));
        }
        if raw.comul.len() != raw.dim {
            return Err(self.error(
                whole,
                format!("dim = {} but {} comul polynomials are given", raw.dim, raw.comul.len()),
            ));
        }
        if raw.dim == 0 {
            return Err(self.error(whole, "dim must be positive"));
        }
        let mut taken = HashSet::new();
        let vars = self.names(&raw.vars, &mut taken)?;
        let right_vars = match &raw.right_vars {
            Some(r) => {
                if r.len() != raw.dim {
                    return Err(self.error(whole, format!("right_vars needs {} names", raw.dim)));
                }
                self.names(r, &mut taken)?
            }
            None => {
                let mut out = Vec::new();
                for (v, sv) in vars.iter().zip(&raw.vars) {
                    let Some(rest) = v.strip_prefix('x') else {
                        return Err(self.error(
                            sv.span(),
                            format!("cannot derive a right-hand name from '{}'; give right_vars", v),
                        ));
                    };
                    let r = format!("y{}", rest);
                    if !taken.insert(r.clone()) {
                        return Err(self.error(sv.span(), format!("right-hand name '{}' clashes with a variable", r)));
                    }
                    out.push(r);
                }
                out
            }
        };
        let mut law_names = HashMap::new();
        let mut single_names = HashMap::new();
        for (j, (l, r)) in vars.iter().zip(&right_vars).enumerate() {
            law_names.insert(l.clone(), JetVar::left(j, 0));
            law_names.insert(r.clone(), JetVar::right(j, 0));
            single_names.insert(l.clone(), JetVar::new(j, 0));
        }
        let comul = self.polys(&raw.comul, &law_names)?;
        let units = match &raw.units {
            Some(u) => self.polys(u, &single_names)?,
            None => Vec::new(),
        };
        if let Some(t) = &raw.trunc {
            if *t.get_ref() < 2 {
                return Err(self.error(t.span(), "trunc must be at least 2"));
            }
        }
        Ok(GroupSpec {
            name: raw.name,
            vars,
            right_vars,
            comul,
            units,
            trunc: raw.trunc.map(|t| *t.get_ref()),
            ext_dim: raw.ext_dim,
            ansatz_degree: raw.ansatz_degree,
        })
    }

    fn scheme(&self, raw: RawScheme) -> Result<SchemeSpec> {
        let mut taken = HashSet::new();
        let vars = self.names(&raw.vars, &mut taken)?;
        if vars.is_empty() {
            return Err(self.error(0..0, "a scheme needs at least one variable"));
        }
        let names: HashMap<String, JetVar> = vars.iter().enumerate().map(|(j, v)| (v.clone(), JetVar::new(j, 0))).collect();
        let relations = self.polys(&raw.relations, &names)?;
        let scheme = AffineScheme::new(vars.clone(), relations)?;
        let mut points = Vec::new();
        for p in &raw.points {
            if p.len() != vars.len() {
                let at = p.first().map_or(0..0, |s| s.span());
                return Err(self.error(at, format!("a point needs {} coordinates", vars.len())));
            }
            points.push(
                p.iter()
                    .map(|s| parse_ratfunc(s.get_ref(), &self.origin(s.span())))
                    .collect::<Result<Vec<_>>>()?,
            );
        }
        Ok(SchemeSpec {
            name: raw.name,
            scheme,
            points,
            max_order: raw.max_order.unwrap_or(3),
        })
    }
}

/// Parse spec-file text; `path` is only used in diagnostics.
pub fn parse_spec(text: &str, path: &str) -> Result<SpecFile> {
    let src = Source { path, text };
    let table: toml::Table = toml::from_str(text).map_err(|e| src.from_toml(e))?;
    if table.contains_key("relations") {
        let raw: RawScheme = toml::from_str(text).map_err(|e| src.from_toml(e))?;
        Ok(SpecFile::Scheme(src.scheme(raw)?))
    } else {
        let raw: RawGroup = toml::from_str(text).map_err(|e| src.from_toml(e))?;
        Ok(SpecFile::Group(src.group(raw)?))
    }
}

pub fn load_spec(path: &Path) -> Result<SpecFile> {
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: shown.clone(),
        source,
    })?;
    parse_spec(&text, &shown)
}

/// Truncation degree: command line, then spec file, then the
/// `JETCHAR_TRUNC_DEFAULT` environment variable, then 8.
pub fn resolve_trunc(cli: Option<u32>, spec: Option<u32>) -> Result<u32> {
    let env = match std::env::var(TRUNC_ENV) {
        Ok(s) => Some(
            s.trim()
                .parse::<u32>()
                .map_err(|_| Error::Input(format!("{} = '{}' is not a nonnegative integer", TRUNC_ENV, s)))?,
        ),
        Err(_) => None,
    };
    let d = cli.or(spec).or(env).unwrap_or(DEFAULT_TRUNC);
    if d < 2 {
        return Err(Error::Input(format!("truncation degree {} is below 2", d)));
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    const GM: &str = r#"
name = "gm"
dim = 1
vars = ["x0"]
comul = ["x0 + y0 + x0*y0"]
units = ["1 + x0"]
trunc = 8
ext_dim = 0
"#;

    fn group(text: &str) -> Result<GroupSpec> {
        match parse_spec(text, "test.toml")? {
            SpecFile::Group(g) => Ok(g),
            SpecFile::Scheme(_) => panic!("expected a group"),
        }
    }

    #[test]
    fn gm_spec_builds_a_law() {
        let g = group(GM).unwrap();
        assert_eq!(g.right_vars, vec!["y0".to_string()]);
        let law = g.law(8).unwrap();
        assert_eq!(law.g(), 1);
        assert_eq!(law.ext_dim(), Some(0));
        assert_eq!(law.units().len(), 1);
        assert!(law.is_exact());
    }

    #[test]
    fn parse_error_points_into_the_file() {
        let text = "name = \"bad\"\ndim = 1\nvars = [\"x0\"]\ncomul = [\"x0 + * y0\"]\n";
        let e = group(text).unwrap_err();
        match e {
            Error::Parse { line, col, ref msg, .. } => {
                assert_eq!((line, col), (4, 16), "{msg}");
                assert!(msg.contains("'*'"));
            }
            other => panic!("{other}"),
        }
    }

    #[test]
    fn axiom_failure_names_the_axiom() {
        let text = "name = \"bad\"\ndim = 1\nvars = [\"x0\"]\ncomul = [\"2*x0 + y0\"]\n";
        let e = group(text).unwrap().law(6).unwrap_err();
        match e {
            Error::Axiom { axiom, .. } => assert!(axiom.contains("identity"), "{axiom}"),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn toml_errors_and_shape_errors() {
        assert!(matches!(parse_spec("name = ", "a.toml"), Err(Error::Parse { line: 1, .. })));
        let text = "name = \"g\"\ndim = 2\nvars = [\"x0\"]\ncomul = [\"x0 + y0\"]\n";
        assert!(matches!(group(text), Err(Error::Parse { .. })));
        let text = "name = \"g\"\ndim = 1\nvars = [\"t\"]\ncomul = [\"t\"]\n";
        assert!(matches!(group(text), Err(Error::Parse { line: 3, col: 9, .. })));
    }

    #[test]
    fn scheme_spec() {
        let text = r#"
name = "legendre-curve"
vars = ["x", "y"]
relations = ["y^2 - x*(x - 1)*(x - t)"]
points = [["0", "0"], ["t", "0"]]
"#;
        match parse_spec(text, "c.toml").unwrap() {
            SpecFile::Scheme(s) => {
                assert_eq!(s.points.len(), 2);
                assert_eq!(s.points[1][0], RatFunc::t());
                assert_eq!(s.max_order, 3);
                assert_eq!(s.scheme.relations().len(), 1);
            }
            SpecFile::Group(_) => panic!("expected a scheme"),
        }
    }

    #[test]
    fn trunc_precedence() {
        assert_eq!(resolve_trunc(Some(5), Some(7)).unwrap(), 5);
        assert_eq!(resolve_trunc(None, Some(7)).unwrap(), 7);
        assert!(resolve_trunc(Some(1), None).is_err());
    }
}
