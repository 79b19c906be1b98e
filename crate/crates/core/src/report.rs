//! The analysis pipeline (group → characters → kernel) and its JSON report.

use serde::Serialize;

use crate::basefield::{Derivation, FieldConfig, FieldMode, RatFunc};
use crate::characters::{analyze, checks, default_max_order, AnalyzeOptions, SolveOptions, Stability};
use crate::error::{Error, Result};
use crate::groups::FormalGroupLaw;
use crate::kernel::{vectorial_extension_report, KernelReport};

pub const SCHEMA_VERSION: u32 = 1;
pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroupInfo {
    pub name: String,
    pub g: usize,
    pub trunc: u32,
    pub exact: bool,
    pub lambda: Option<String>,
    pub declared_r: Option<usize>,
    pub field_mode: FieldMode,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrderRow {
    pub n: usize,
    pub dim_x: usize,
    pub l: usize,
    pub h: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrimitiveEntry {
    pub order: usize,
    pub character: String,
    pub leading: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundCheck {
    pub declared_r: Option<usize>,
    pub m_u: usize,
    /// m_u ≤ r + 1; null when r is not declared.
    pub holds: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub engine_version: String,
    pub group: GroupInfo,
    pub max_order: usize,
    pub orders: Vec<OrderRow>,
    pub m_l: usize,
    pub m_u: usize,
    pub primitive_basis: Vec<PrimitiveEntry>,
    pub leading_matrix: Vec<Vec<String>>,
    pub kernel: KernelReport,
    pub bound: BoundCheck,
    pub stability: Stability,
}

impl Report {
    pub fn dims(&self) -> Vec<usize> {
        self.orders.iter().map(|r| r.dim_x).collect()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// A few lines for the terminal.
    pub fn summary(&self) -> String {
        let list = |v: Vec<usize>| v.iter().map(usize::to_string).collect::<Vec<_>>().join(", ");
        let mut out = format!(
            "group {} (g = {}, D = {}{})\n",
            self.group.name,
            self.group.g,
            self.group.trunc,
            self.group.lambda.as_ref().map(|l| format!(", lambda = {}", l)).unwrap_or_default()
        );
        out += &format!("dim X_n  = [{}]\n", list(self.dims()));
        out += &format!("l_n      = [{}]\n", list(self.orders.iter().map(|r| r.l).collect()));
        out += &format!("h_n      = [{}]\n", list(self.orders.iter().map(|r| r.h).collect()));
        out += &format!("m_l = {}, m_u = {}\n", self.m_l, self.m_u);
        for p in &self.primitive_basis {
            out += &format!("primitive (order {}): {}\n", p.order, p.character);
        }
        if self.kernel.degenerate {
            out += "kernel: degenerate (m = 0)\n";
        } else {
            out += &format!(
                "kernel: dim K^n G = [{}] for n = {}..{}, dim L = {}\n",
                list(self.kernel.levels.iter().map(|l| l.dim_k).collect()),
                self.kernel.m,
                self.kernel.m + self.kernel.levels.len() - 1,
                self.kernel.dim_l.map_or("n/a".to_string(), |d| d.to_string())
            );
        }
        if let Some(h) = self.bound.holds {
            out += &format!(
                "bound m_u <= r + 1 with r = {}: {}\n",
                self.bound.declared_r.unwrap_or(0),
                if h { "holds" } else { "VIOLATED" }
            );
        }
        if self.stability.checked {
            out += &format!(
                "dimensions agree at D = {} and D = {}\n",
                self.stability.trunc,
                self.stability.compared_with.unwrap_or(self.stability.trunc)
            );
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct AnalysisRequest {
    pub law: FormalGroupLaw<RatFunc>,
    /// Recorded in the report for Legendre-type groups.
    pub lambda: Option<RatFunc>,
    /// Defaults to r + 2 when r is declared, else 4.
    pub max_order: Option<usize>,
    pub field: FieldConfig,
    pub solve: SolveOptions,
    /// Kernel levels m..=m+kernel_extra.
    pub kernel_extra: usize,
}

impl AnalysisRequest {
    pub fn new(law: FormalGroupLaw<RatFunc>) -> Self {
        AnalysisRequest {
            law,
            lambda: None,
            max_order: None,
            field: FieldConfig::standard(),
            solve: SolveOptions::default(),
            kernel_extra: 2,
        }
    }
}

pub fn analyze_group(req: &AnalysisRequest) -> Result<Report> {
    let law = &req.law;
    let d: &dyn Derivation<RatFunc> = &req.field;
    let max_order = req.max_order.unwrap_or_else(|| default_max_order(law.ext_dim()));
    let opts = AnalyzeOptions {
        solve: req.solve.clone(),
        ..AnalyzeOptions::default()
    };
    let space = analyze(law, max_order, d, &opts)?;
    if !checks::dim_identity(&space.dims, &space.l) {
        return Err(Error::invariant(
            "dim-identity",
            format!("dim X_n = {:?} does not match l = {:?}", space.dims, space.l),
        ));
    }
    if !checks::xprim(&space) {
        return Err(Error::invariant("primitive-count", "primitive orders do not sum to g"));
    }
    let kernel = vectorial_extension_report(law, &space.primitive, req.kernel_extra, d)?;
    let holds = checks::order_bound(&space, law.ext_dim());
    if holds == Some(false) {
        return Err(Error::invariant(
            "order-bound",
            format!("m_u = {} exceeds r + 1 = {}", space.m_u, law.ext_dim().unwrap_or(0) + 1),
        ));
    }
    let prim = &space.primitive;
    Ok(Report {
        schema_version: SCHEMA_VERSION,
        engine_version: ENGINE_VERSION.to_string(),
        group: GroupInfo {
            name: law.name().to_string(),
            g: law.g(),
            trunc: law.trunc(),
            exact: law.is_exact(),
            lambda: req.lambda.as_ref().map(ToString::to_string),
            declared_r: law.ext_dim(),
            field_mode: req.field.mode(),
        },
        max_order,
        orders: (0..=max_order)
            .map(|n| OrderRow {
                n,
                dim_x: space.dims[n],
                l: space.l[n],
                h: space.h[n],
            })
            .collect(),
        m_l: space.m_l,
        m_u: space.m_u,
        primitive_basis: prim
            .characters
            .iter()
            .map(|c| PrimitiveEntry {
                order: c.level,
                character: c.theta.to_string(),
                leading: c.leading.iter().map(ToString::to_string).collect(),
            })
            .collect(),
        leading_matrix: prim
            .a
            .row_vecs()
            .iter()
            .map(|r| r.iter().map(ToString::to_string).collect())
            .collect(),
        kernel,
        bound: BoundCheck {
            declared_r: law.ext_dim(),
            m_u: space.m_u,
            holds,
        },
        stability: space.stability,
    })
}
