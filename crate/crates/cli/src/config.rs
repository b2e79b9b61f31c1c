//! TOML problem description and its translation into library objects.

use std::fmt;
use std::path::PathBuf;

use greenbc::prelude::*;
use serde::{Deserialize, Serialize};

/// A complex number written as `[re, im]`.
pub type Cx = [f64; 2];

fn cx(z: Cx) -> C64 {
    C64::new(z[0], z[1])
}

fn is_zero(z: &Cx) -> bool {
    *z == [0.0, 0.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    #[serde(default)]
    pub method: MethodChoice,
    pub operator: OperatorConfig,
    pub domain: DomainConfig,
    pub boundary_conditions: Vec<ConditionConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub adjoint_boundary_conditions: Option<Vec<ConditionConfig>>,
    #[serde(default)]
    pub source: SourceConfig,
    /// One entry per boundary condition; empty means homogeneous data.
    #[serde(default)]
    pub boundary_data: Vec<DatumConfig>,
    pub discretization: DiscretizationConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub green: Option<GreenConfig>,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum MethodChoice {
    #[default]
    Direct,
    Recursive,
}

impl From<MethodChoice> for Method {
    fn from(m: MethodChoice) -> Self {
        match m {
            MethodChoice::Direct => Method::Direct,
            MethodChoice::Recursive => Method::Recursive,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchChoice {
    #[default]
    Outgoing,
    Incoming,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum OperatorConfig {
    #[serde(rename = "helmholtz_1d")]
    Helmholtz1D {
        k: Cx,
        #[serde(default)]
        branch: BranchChoice,
    },
    #[serde(rename = "modified_helmholtz_1d")]
    ModifiedHelmholtz1D {
        kappa: f64,
        #[serde(default)]
        branch: BranchChoice,
    },
    #[serde(rename = "laplace_2d")]
    Laplace2D,
    #[serde(rename = "helmholtz_2d")]
    Helmholtz2D { k: Cx },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainConfig {
    Interval { a: f64, b: f64 },
    Circle { center: [f64; 2], radius: f64 },
    Ellipse { center: [f64; 2], semi_axes: [f64; 2] },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ConditionConfig {
    /// a0 u(a) + a1 u'(a) + b0 u(b) + b1 u'(b)
    #[serde(rename = "local1d")]
    Local1D {
        #[serde(default, skip_serializing_if = "is_zero")]
        a0: Cx,
        #[serde(default, skip_serializing_if = "is_zero")]
        a1: Cx,
        #[serde(default, skip_serializing_if = "is_zero")]
        b0: Cx,
        #[serde(default, skip_serializing_if = "is_zero")]
        b1: Cx,
    },
    /// dirichlet·u + neumann·∂u/∂ν on the support.
    #[serde(rename = "field2d")]
    Field2D {
        #[serde(default, skip_serializing_if = "is_zero")]
        dirichlet: Cx,
        #[serde(default, skip_serializing_if = "is_zero")]
        neumann: Cx,
        #[serde(default)]
        support: SupportConfig,
    },
    /// identity·u(x̄) + ∫ b(x̄, ȳ) u(ȳ) dS(ȳ) on the support.
    Nonlocal {
        identity: Cx,
        kernel: KernelConfig,
        #[serde(default)]
        support: SupportConfig,
    },
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum SupportConfig {
    #[default]
    All,
    Arc { start: f64, end: f64 },
    Nodes { nodes: Vec<usize> },
}

/// Kernels are sampled at (support node, boundary node) pairs. The coordinate s is
/// x on an interval and the curve parameter on a closed curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum KernelConfig {
    Constant { value: Cx },
    /// amplitude·cos(mode·s)·cos(mode·s′)
    Cosine { amplitude: Cx, mode: u32 },
    /// Explicit rows, one per support node.
    Matrix { entries: Vec<Vec<Cx>> },
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum SourceConfig {
    #[default]
    Zero,
    Constant { c: Cx },
    Sine {
        amplitude: Cx,
        wavenumber: Vec<f64>,
        #[serde(default)]
        phase: f64,
    },
    /// Coefficients of 1, x, x², ...
    Polynomial { coeffs: Vec<Cx> },
    Gaussian { center: Vec<f64>, width: f64, amplitude: Cx },
    Sum { terms: Vec<SourceConfig> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum DatumConfig {
    Constant(Cx),
    /// One value per support node.
    Values(Vec<Cx>),
    /// Sum of monomials sampled at the support nodes of a closed-curve condition.
    Polynomial(Vec<MonomialConfig>),
}

/// c · x^px · y^py
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonomialConfig {
    pub c: Cx,
    #[serde(default)]
    pub px: u32,
    #[serde(default)]
    pub py: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscretizationConfig {
    pub boundary_nodes: usize,
    #[serde(default = "default_volume_nodes")]
    pub volume_nodes: usize,
}

fn default_volume_nodes() -> usize {
    32
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GreenConfig {
    pub sources: GridSpec,
    pub grid: GridSpec,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residuals: Option<PathBuf>,
    #[serde(default)]
    pub grid: GridSpec,
}

/// Either explicit `points` or `n` evenly spaced points from `from` to `to` (inclusive).
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub from: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub to: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    /// TOML syntax or schema error; the message carries line and column.
    Parse(String),
    /// A value that parsed but does not describe a valid problem.
    Field { field: String, message: String },
}

impl ConfigError {
    fn field(field: impl Into<String>, message: impl fmt::Display) -> Self {
        ConfigError::Field {
            field: field.into(),
            message: message.to_string(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Parse(msg) => write!(f, "config parse error: {}", msg.trim_end()),
            ConfigError::Field { field, message } => write!(f, "config field `{field}`: {message}"),
        }
    }
}

impl std::error::Error for ConfigError {}

type CfgResult<T> = std::result::Result<T, ConfigError>;

impl ProblemConfig {
    pub fn from_toml(text: &str) -> CfgResult<Self> {
        toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))
    }

    /// Canonical TOML form; parsing it back gives an equal config.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config values are always representable in TOML")
    }

    /// Validates the config and builds the library objects.
    pub fn build(&self) -> CfgResult<Problem> {
        let (op, branch) = self.operator.build()?;
        let domain = self.domain.build()?;
        if op.dim() != domain.dim() {
            return Err(ConfigError::field(
                "operator",
                format!("{}D operator on a {}D domain", op.dim(), domain.dim()),
            ));
        }
        let fs = FundamentalSolution::with_branch(op, branch).map_err(|e| ConfigError::field("operator", e))?;
        let bd = discretize_boundary(&domain, self.discretization.boundary_nodes)
            .map_err(|e| ConfigError::field("discretization.boundary_nodes", e))?;
        if self.discretization.volume_nodes == 0 {
            return Err(ConfigError::field("discretization.volume_nodes", "must be at least 1"));
        }

        if self.boundary_conditions.is_empty() {
            return Err(ConfigError::field("boundary_conditions", "at least one condition is required"));
        }
        let direct = build_conditions(&self.boundary_conditions, &bd, "boundary_conditions")?;
        let bcs = match &self.adjoint_boundary_conditions {
            Some(list) => {
                let adjoint = build_conditions(list, &bd, "adjoint_boundary_conditions")?;
                BoundaryConditionSet::with_adjoint(direct, adjoint)
                    .map_err(|e| ConfigError::field("adjoint_boundary_conditions", e))?
            }
            None => BoundaryConditionSet::new(direct).map_err(|e| ConfigError::field("boundary_conditions", e))?,
        };
        let rc = bcs.resolve(&op, &bd).map_err(|e| ConfigError::field("boundary_conditions", e))?;

        let source = self.source.build();
        source
            .validate(domain.dim())
            .map_err(|e| ConfigError::field("source", e))?;

        let data = if self.boundary_data.is_empty() {
            BoundaryData::zeros(bcs.m())
        } else if self.boundary_data.len() != bcs.m() {
            return Err(ConfigError::field(
                "boundary_data",
                format!("{} entries for {} boundary conditions", self.boundary_data.len(), bcs.m()),
            ));
        } else {
            let list = rc.list(Which::Direct);
            let components = self
                .boundary_data
                .iter()
                .zip(list)
                .enumerate()
                .map(|(j, (d, c))| match d {
                    DatumConfig::Constant(z) => Ok(BoundaryDatum::Constant(cx(*z))),
                    DatumConfig::Values(v) => Ok(BoundaryDatum::Values(v.iter().map(|z| cx(*z)).collect())),
                    DatumConfig::Polynomial(_) if bd.dim() == 1 => Err(ConfigError::field(
                        format!("boundary_data[{j}]"),
                        "polynomial data need a closed-curve domain",
                    )),
                    DatumConfig::Polynomial(terms) => Ok(BoundaryDatum::Values(
                        c.nodes
                            .iter()
                            .map(|&i| {
                                let p = bd.nodes()[i];
                                terms
                                    .iter()
                                    .map(|t| cx(t.c) * p.x().powi(t.px as i32) * p.y().powi(t.py as i32))
                                    .sum()
                            })
                            .collect(),
                    )),
                })
                .collect::<CfgResult<_>>()?;
            BoundaryData { components }
        };
        data.to_spinor(&rc).map_err(|e| ConfigError::field("boundary_data", e))?;

        let (green_sources, green_grid) = match &self.green {
            Some(g) => (
                g.sources.build(&domain, "green.sources")?,
                g.grid.build(&domain, "green.grid")?,
            ),
            None => (Vec::new(), Vec::new()),
        };
        let output_grid = self.output.grid.build(&domain, "output.grid")?;

        Ok(Problem {
            fs,
            domain,
            bd,
            bcs,
            source,
            data,
            volume_nodes: self.discretization.volume_nodes,
            method: self.method.into(),
            green_sources,
            green_grid,
            output_grid,
            output_path: self.output.path.clone(),
            residuals_path: self.output.residuals.clone(),
        })
    }
}

impl OperatorConfig {
    fn build(&self) -> CfgResult<(OperatorSpec, Branch)> {
        let branch = |b: &BranchChoice| match b {
            BranchChoice::Outgoing => Branch::Outgoing,
            BranchChoice::Incoming => Branch::Incoming,
        };
        let (op, br) = match self {
            OperatorConfig::Helmholtz1D { k, branch: b } => (OperatorSpec::Helmholtz1D { k: cx(*k) }, branch(b)),
            OperatorConfig::ModifiedHelmholtz1D { kappa, branch: b } => {
                (OperatorSpec::ModifiedHelmholtz1D { kappa: *kappa }, branch(b))
            }
            OperatorConfig::Laplace2D => (OperatorSpec::Laplace2D, Branch::Outgoing),
            OperatorConfig::Helmholtz2D { k } => (OperatorSpec::Helmholtz2D { k: cx(*k) }, Branch::Outgoing),
        };
        op.validate().map_err(|e| ConfigError::field("operator", e))?;
        Ok((op, br))
    }
}

impl DomainConfig {
    fn build(&self) -> CfgResult<Domain> {
        match self {
            DomainConfig::Interval { a, b } => Domain::interval(*a, *b),
            DomainConfig::Circle { center, radius } => Domain::circle(*center, *radius),
            DomainConfig::Ellipse { center, semi_axes } => Domain::ellipse(*center, *semi_axes),
        }
        .map_err(|e| ConfigError::field("domain", e))
    }
}

impl SupportConfig {
    fn build(&self) -> Support {
        match self {
            SupportConfig::All => Support::All,
            SupportConfig::Arc { start, end } => Support::Arc { start: *start, end: *end },
            SupportConfig::Nodes { nodes } => Support::Nodes(nodes.clone()),
        }
    }
}

/// Boundary coordinate used by the kernel catalog.
fn kernel_coordinate(bd: &BoundaryDiscretization, i: usize) -> f64 {
    if bd.dim() == 1 {
        bd.nodes()[i].x()
    } else {
        bd.params()[i]
    }
}

impl KernelConfig {
    fn build(&self, rows: &[usize], bd: &BoundaryDiscretization, field: &str) -> CfgResult<CMatrix> {
        let n = bd.len();
        match self {
            KernelConfig::Constant { value } => Ok(CMatrix::from_element(rows.len(), n, cx(*value))),
            KernelConfig::Cosine { amplitude, mode } => {
                let m = *mode as f64;
                Ok(CMatrix::from_fn(rows.len(), n, |r, c| {
                    let (s, sp) = (kernel_coordinate(bd, rows[r]), kernel_coordinate(bd, c));
                    cx(*amplitude) * (m * s).cos() * (m * sp).cos()
                }))
            }
            KernelConfig::Matrix { entries } => {
                if entries.len() != rows.len() || entries.iter().any(|r| r.len() != n) {
                    return Err(ConfigError::field(
                        format!("{field}.kernel.entries"),
                        format!("expected {} rows of {n} entries", rows.len()),
                    ));
                }
                Ok(CMatrix::from_fn(rows.len(), n, |r, c| cx(entries[r][c])))
            }
        }
    }
}

fn build_conditions(list: &[ConditionConfig], bd: &BoundaryDiscretization, name: &str) -> CfgResult<Vec<BoundaryCondition>> {
    list.iter()
        .enumerate()
        .map(|(j, c)| {
            let field = format!("{name}[{j}]");
            let bc = match c {
                ConditionConfig::Local1D { a0, a1, b0, b1 } => BoundaryCondition::Local1D {
                    a0: cx(*a0),
                    a1: cx(*a1),
                    b0: cx(*b0),
                    b1: cx(*b1),
                },
                ConditionConfig::Field2D {
                    dirichlet,
                    neumann,
                    support,
                } => BoundaryCondition::LocalField2D {
                    dirichlet_coeff: cx(*dirichlet),
                    neumann_coeff: cx(*neumann),
                    support: support.build(),
                },
                ConditionConfig::Nonlocal {
                    identity,
                    kernel,
                    support,
                } => {
                    let support = support.build();
                    let rows = support.resolve(bd).map_err(|e| ConfigError::field(&field, e))?;
                    let kernel = kernel.build(&rows, bd, &field)?;
                    BoundaryCondition::nonlocal(kernel, cx(*identity), support)
                }
            };
            if let Some(s) = bc.support() {
                s.resolve(bd).map_err(|e| ConfigError::field(&field, e))?;
            }
            Ok(bc)
        })
        .collect()
}

impl SourceConfig {
    fn build(&self) -> SourceField {
        match self {
            SourceConfig::Zero => SourceField::Zero,
            SourceConfig::Constant { c } => SourceField::Constant { c: cx(*c) },
            SourceConfig::Sine {
                amplitude,
                wavenumber,
                phase,
            } => SourceField::Sine {
                amplitude: cx(*amplitude),
                wavenumber: wavenumber.clone(),
                phase: *phase,
            },
            SourceConfig::Polynomial { coeffs } => SourceField::Polynomial {
                coeffs: coeffs.iter().map(|z| cx(*z)).collect(),
            },
            SourceConfig::Gaussian {
                center,
                width,
                amplitude,
            } => SourceField::Gaussian {
                center: center.clone(),
                width: *width,
                amplitude: cx(*amplitude),
            },
            SourceConfig::Sum { terms } => SourceField::Sum(terms.iter().map(|t| t.build()).collect()),
        }
    }
}

impl GridSpec {
    pub fn points(points: Vec<Vec<f64>>) -> Self {
        Self {
            points: Some(points),
            ..Self::default()
        }
    }

    pub fn line(from: Vec<f64>, to: Vec<f64>, n: usize) -> Self {
        Self {
            points: None,
            from: Some(from),
            to: Some(to),
            n: Some(n),
        }
    }

    fn build(&self, domain: &Domain, field: &str) -> CfgResult<Vec<Point>> {
        let raw: Vec<Vec<f64>> = match (&self.points, &self.from, &self.to, self.n) {
            (None, None, None, None) => Vec::new(),
            (Some(p), None, None, None) => p.clone(),
            (None, Some(from), Some(to), Some(n)) => {
                if from.len() != to.len() {
                    return Err(ConfigError::field(field, "`from` and `to` differ in dimension"));
                }
                (0..n)
                    .map(|i| {
                        let t = if n == 1 { 0.0 } else { i as f64 / (n - 1) as f64 };
                        from.iter().zip(to).map(|(a, b)| a + t * (b - a)).collect()
                    })
                    .collect()
            }
            _ => return Err(ConfigError::field(field, "give either `points` or all of `from`, `to`, `n`")),
        };
        raw.iter()
            .enumerate()
            .map(|(i, c)| {
                let p = Point::new(c).map_err(|e| ConfigError::field(format!("{field}[{i}]"), e))?;
                domain
                    .check_interior(&p)
                    .map_err(|e| ConfigError::field(format!("{field}[{i}]"), e))?;
                Ok(p)
            })
            .collect()
    }
}

/// A validated problem.
#[derive(Debug, Clone)]
pub struct Problem {
    pub fs: FundamentalSolution,
    pub domain: Domain,
    pub bd: BoundaryDiscretization,
    pub bcs: BoundaryConditionSet,
    pub source: SourceField,
    pub data: BoundaryData,
    pub volume_nodes: usize,
    pub method: Method,
    pub green_sources: Vec<Point>,
    pub green_grid: Vec<Point>,
    pub output_grid: Vec<Point>,
    pub output_path: Option<PathBuf>,
    pub residuals_path: Option<PathBuf>,
}

#[cfg(test)]
mod tests {
    use super::*;

    const DIRICHLET: &str = r#"
[operator]
type = "helmholtz_1d"
k = [1.0, 0.0]

[domain]
type = "interval"
a = 0.0
b = 1.0

[[boundary_conditions]]
type = "local1d"
a0 = [1.0, 0.0]

[[boundary_conditions]]
type = "local1d"
b0 = [1.0, 0.0]

[discretization]
boundary_nodes = 2

[output.grid]
from = [0.1]
to = [0.9]
n = 9
"#;

    #[test]
    fn parses_and_builds() {
        let cfg = ProblemConfig::from_toml(DIRICHLET).unwrap();
        let p = cfg.build().unwrap();
        assert_eq!(p.bcs.m(), 2);
        assert_eq!(p.output_grid.len(), 9);
        assert!((p.output_grid[4].x() - 0.5).abs() < 1e-15);
        assert_eq!(p.method, Method::Direct);
        assert_eq!(p.data, BoundaryData::zeros(2));
    }

    #[test]
    fn canonical_form_round_trips() {
        let cfg = ProblemConfig::from_toml(DIRICHLET).unwrap();
        let text = cfg.to_toml();
        assert_eq!(ProblemConfig::from_toml(&text).unwrap(), cfg);
        assert_eq!(ProblemConfig::from_toml(&text).unwrap().to_toml(), text);
    }

    #[test]
    fn parse_errors_carry_location() {
        let bad = DIRICHLET.replace("k = [1.0, 0.0]", "k = 1.0");
        let err = ProblemConfig::from_toml(&bad).unwrap_err().to_string();
        assert!(err.contains("line"), "{err}");
        let unknown = DIRICHLET.replace("boundary_nodes = 2", "boundary_nodes = 2\nnodes = 3");
        assert!(ProblemConfig::from_toml(&unknown).unwrap_err().to_string().contains("nodes"));
    }

    #[test]
    fn field_errors_name_the_field() {
        let cases = [
            ("b = 1.0\n", "b = -1.0\n", "domain"),
            ("to = [0.9]", "to = [1.0]", "output.grid[8]"),
            ("boundary_nodes = 2\n", "boundary_nodes = 2\nvolume_nodes = 0\n", "discretization.volume_nodes"),
            ("type = \"helmholtz_1d\"", "type = \"laplace_2d\"", "operator"),
        ];
        for (from, to, field) in cases {
            let cfg = ProblemConfig::from_toml(&DIRICHLET.replace(from, to)).unwrap();
            match cfg.build().unwrap_err() {
                ConfigError::Field { field: f, .. } => assert_eq!(f, field),
                other => panic!("{other:?}"),
            }
        }
    }

    #[test]
    fn boundary_data_count_is_checked() {
        let text = DIRICHLET.replacen("[operator]", "boundary_data = [{ constant = [1.0, 0.0] }]\n\n[operator]", 1);
        let err = ProblemConfig::from_toml(&text).unwrap().build().unwrap_err();
        assert!(matches!(err, ConfigError::Field { ref field, .. } if field == "boundary_data"));
    }

    #[test]
    fn nonlocal_kernels_have_the_support_shape() {
        let bd = discretize_boundary(&Domain::circle([0.0, 0.0], 1.0).unwrap(), 8).unwrap();
        let rows = vec![0, 1, 2];
        let k = KernelConfig::Cosine { amplitude: [2.0, 0.0], mode: 1 }.build(&rows, &bd, "k").unwrap();
        assert_eq!((k.nrows(), k.ncols()), (3, 8));
        assert!((k[(0, 0)].re - 2.0).abs() < 1e-15);
        assert!(KernelConfig::Matrix { entries: vec![vec![[0.0, 0.0]; 8]; 2] }
            .build(&rows, &bd, "k")
            .is_err());
    }

    #[test]
    fn polynomial_data_sample_the_support() {
        let text = r#"
boundary_data = [{ polynomial = [{ c = [2.0, 0.0], px = 1, py = 1 }] }]

[operator]
type = "laplace_2d"

[domain]
type = "circle"
center = [0.0, 0.0]
radius = 1.0

[[boundary_conditions]]
type = "field2d"
dirichlet = [1.0, 0.0]

[discretization]
boundary_nodes = 8
"#;
        let p = ProblemConfig::from_toml(text).unwrap().build().unwrap();
        let BoundaryDatum::Values(v) = &p.data.components[0] else { panic!() };
        assert_eq!(v.len(), 8);
        assert!((v[1].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn mixed_grid_forms_are_rejected() {
        let dom = Domain::interval(0.0, 1.0).unwrap();
        let g = GridSpec {
            points: Some(vec![vec![0.5]]),
            n: Some(3),
            ..GridSpec::default()
        };
        assert!(g.build(&dom, "g").is_err());
        assert!(GridSpec::default().build(&dom, "g").unwrap().is_empty());
    }
}
