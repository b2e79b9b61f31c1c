//! Inhomogeneous boundary value problems 𝔏u = f in Ω, B̂ū = Φ̂ on ∂Ω:
//!
//! ```text
//! u(x) = ∫_Ω G(x, y) f(y) dV(y) + ∫_∂Ω E(x, x̄) J_Φ(x̄) dS(x̄),   J_Φ = B̂ᵃ† ĝ⁻¹ Φ̂.
//! ```
//!
//! Writing G = E − (correction), every term except ∫E f is a boundary potential,
//! so the volume sources and the boundary data are folded into one boundary
//! density once; evaluating u is then one volume sum plus one potential row.

use crate::assembly::{contract, Density, GreenFunction, Method};
use crate::boundary::{ResolvedConditions, SpinorBoundaryFunction, Which};
use crate::geometry::{unit_gauss_legendre, Domain, Point, VolumeQuadrature};
use crate::potential;
use crate::{CVector, Error, Result, C64};

/// Right-hand side f.
#[derive(Debug, Clone, PartialEq)]
pub enum SourceField {
    Zero,
    Constant { c: C64 },
    /// amplitude · sin(k·x + phase)
    Sine { amplitude: C64, wavenumber: Vec<f64>, phase: f64 },
    /// Σ coeffs[i] xⁱ in the first coordinate.
    Polynomial { coeffs: Vec<C64> },
    /// amplitude · exp(−|x − center|² / (2 width²))
    Gaussian { center: Vec<f64>, width: f64, amplitude: C64 },
    Sum(Vec<SourceField>),
}

impl SourceField {
    pub fn eval(&self, p: &Point) -> C64 {
        let x = p.coords();
        match self {
            SourceField::Zero => C64::new(0.0, 0.0),
            SourceField::Constant { c } => *c,
            SourceField::Sine {
                amplitude,
                wavenumber,
                phase,
            } => {
                let arg: f64 = wavenumber.iter().zip(x).map(|(k, xi)| k * xi).sum::<f64>() + phase;
                amplitude * arg.sin()
            }
            SourceField::Polynomial { coeffs } => coeffs
                .iter()
                .rev()
                .fold(C64::new(0.0, 0.0), |acc, c| acc * x[0] + c),
            SourceField::Gaussian {
                center,
                width,
                amplitude,
            } => {
                let r2: f64 = center.iter().zip(x).map(|(c, xi)| (xi - c).powi(2)).sum();
                amplitude * (-r2 / (2.0 * width * width)).exp()
            }
            SourceField::Sum(parts) => parts.iter().map(|f| f.eval(p)).sum(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            SourceField::Zero => true,
            SourceField::Constant { c } => *c == C64::new(0.0, 0.0),
            SourceField::Sum(parts) => parts.iter().all(SourceField::is_zero),
            _ => false,
        }
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        match self {
            SourceField::Sine { wavenumber, .. } if wavenumber.len() != dim => {
                bad(format!("sine wavenumber needs {dim} components"))
            }
            SourceField::Gaussian { center, width, .. } if center.len() != dim || !(*width > 0.0) => {
                bad(format!("gaussian needs a {dim}D center and a positive width"))
            }
            SourceField::Sum(parts) => parts.iter().try_for_each(|f| f.validate(dim)),
            _ => Ok(()),
        }
    }
}

/// Φ_j for one condition.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundaryDatum {
    Constant(C64),
    /// One value per row of the condition (per support node on a curve).
    Values(Vec<C64>),
}

/// Φ̂ = (Φ_1, …, Φ_m).
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryData {
    pub components: Vec<BoundaryDatum>,
}

impl BoundaryData {
    pub fn zeros(m: usize) -> Self {
        Self {
            components: vec![BoundaryDatum::Constant(C64::new(0.0, 0.0)); m],
        }
    }

    pub fn constants(values: &[C64]) -> Self {
        Self {
            components: values.iter().map(|&v| BoundaryDatum::Constant(v)).collect(),
        }
    }

    pub fn to_spinor(&self, rc: &ResolvedConditions) -> Result<SpinorBoundaryFunction> {
        let list = rc.list(Which::Direct);
        if self.components.len() != list.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} boundary data components for {} conditions",
                self.components.len(),
                list.len()
            )));
        }
        let components = self
            .components
            .iter()
            .zip(list)
            .enumerate()
            .map(|(j, (d, c))| match d {
                BoundaryDatum::Constant(v) => Ok(CVector::from_element(c.rows(), *v)),
                BoundaryDatum::Values(v) if v.len() == c.rows() => Ok(CVector::from_vec(v.clone())),
                BoundaryDatum::Values(v) => Err(Error::ShapeMismatch(format!(
                    "boundary data {j} has {} values, condition has {} rows",
                    v.len(),
                    c.rows()
                ))),
            })
            .collect::<Result<_>>()?;
        Ok(SpinorBoundaryFunction { components })
    }
}

/// The field u with its evaluation data.
pub struct FieldSolution<'a> {
    green: &'a dyn GreenFunction,
    source: SourceField,
    volume: VolumeQuadrature,
    unit_rule: Vec<(f64, f64)>,
    density: Density,
    volume_trace: CVector,
    samples: Vec<(Point, C64)>,
}

impl<'a> FieldSolution<'a> {
    pub fn eval(&self, x: &Point) -> Result<C64> {
        let t = self.green.target(x)?;
        Ok(self.volume_term(x)? + contract(&t, &self.density))
    }

    /// ∫ E(x, y) f(y) dV(y). In 1D the rule is split at x, where E has a kink.
    fn volume_term(&self, x: &Point) -> Result<C64> {
        if self.source.is_zero() {
            return Ok(C64::new(0.0, 0.0));
        }
        let k = self.green.free_space();
        let mut acc = C64::new(0.0, 0.0);
        match *self.volume.domain() {
            Domain::Interval { a, b } => {
                let xv = x.x();
                for (lo, hi) in [(a, xv), (xv, b)] {
                    let len = hi - lo;
                    for &(s, w) in &self.unit_rule {
                        let y = Point::d1(lo + len * s);
                        acc += k.value(x, &y)? * self.source.eval(&y) * (w * len);
                    }
                }
            }
            Domain::ClosedCurve(_) => {
                for (y, w) in self.volume.nodes().iter().zip(self.volume.weights()) {
                    if x.distance(y) < 1e-12 {
                        continue;
                    }
                    acc += k.value(x, y)? * self.source.eval(y) * *w;
                }
            }
        }
        Ok(acc)
    }

    /// Boundary data (flattened: values, then derivatives in 1D) of u.
    pub fn boundary_trace(&self) -> CVector {
        &self.volume_trace + self.green.density_trace(&self.density)
    }

    /// max |B̂_j ū − Φ_j| per condition.
    pub fn boundary_residual(&self, phi: &BoundaryData) -> Result<Vec<f64>> {
        let rc = self.green.conditions();
        let spinor = phi.to_spinor(rc)?;
        let trace = self.boundary_trace();
        let ch = self.green.discretization().channels();
        (0..rc.m())
            .map(|j| {
                let b = rc.condition_matrix(Which::Direct, j, ch)?;
                Ok((b * &trace - &spinor.components[j]).camax())
            })
            .collect()
    }

    /// Evaluates u on `points` and keeps the values.
    pub fn sample(&mut self, points: &[Point]) -> Result<&[(Point, C64)]> {
        self.samples = points
            .iter()
            .map(|p| Ok((*p, self.eval(p)?)))
            .collect::<Result<_>>()?;
        Ok(&self.samples)
    }

    pub fn samples(&self) -> &[(Point, C64)] {
        &self.samples
    }

    pub fn source(&self) -> &SourceField {
        &self.source
    }

    pub fn green(&self) -> &'a dyn GreenFunction {
        self.green
    }

    pub fn method(&self) -> Method {
        self.green.method()
    }

    pub fn condition_estimate(&self) -> f64 {
        self.green.condition_estimate()
    }

    pub fn boundary_nodes(&self) -> usize {
        self.green.discretization().len()
    }

    pub fn volume_nodes(&self) -> usize {
        self.volume.len()
    }
}

/// Solves 𝔏u = f, B̂ū = Φ̂ with a constructed Green function. In 1D the volume
/// rule's node count sets the order of the split Gauss–Legendre rule.
pub fn solve_bvp<'a>(
    green: &'a dyn GreenFunction,
    vq: &VolumeQuadrature,
    f: &SourceField,
    phi: &BoundaryData,
) -> Result<FieldSolution<'a>> {
    let bd = green.discretization();
    if vq.domain() != bd.domain() {
        return Err(Error::ShapeMismatch("volume rule and boundary discretization use different domains".into()));
    }
    f.validate(bd.dim())?;
    let spinor = phi.to_spinor(green.conditions())?;
    let mut density = green.data_density(&spinor)?;
    let mut volume_trace = CVector::zeros(bd.n_dof());
    if !f.is_zero() {
        for (y, w) in vq.nodes().iter().zip(vq.weights()) {
            let fy = f.eval(y) * *w;
            if fy == C64::new(0.0, 0.0) {
                continue;
            }
            density.axpy(-fy, &green.source(y)?);
            volume_trace += potential::source_trace(green.free_space(), bd, y)? * fy;
        }
    }
    let unit_rule = if bd.dim() == 1 { unit_gauss_legendre(vq.len())? } else { Vec::new() };
    Ok(FieldSolution {
        green,
        source: f.clone(),
        volume: vq.clone(),
        unit_rule,
        density,
        volume_trace,
        samples: Vec::new(),
    })
}

/// A posteriori residuals of a solution.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    /// max |𝔏u − f| by central differences over the grid.
    pub pde: f64,
    /// max |B̂_j ū − Φ_j| per condition.
    pub boundary: Vec<f64>,
    /// Grid points whose stencil fit inside Ω.
    pub points_used: usize,
}

impl ResidualReport {
    pub fn boundary_max(&self) -> f64 {
        self.boundary.iter().copied().fold(0.0, f64::max)
    }
}

/// Finite-difference PDE residual (step `h`) on `grid` (or the cached samples when
/// `grid` is empty) and boundary residuals.
pub fn residual_report(sol: &FieldSolution, phi: &BoundaryData, grid: &[Point], h: f64) -> Result<ResidualReport> {
    let owned: Vec<Point>;
    let points = if grid.is_empty() {
        owned = sol.samples().iter().map(|(p, _)| *p).collect();
        &owned[..]
    } else {
        grid
    };
    let domain = sol.green.discretization().domain();
    let op = *sol.green.operator();
    let mut pde: f64 = 0.0;
    let mut used = 0;
    for x in points {
        let dirs: &[[f64; 2]] = if x.dim() == 1 { &[[1.0, 0.0]] } else { &[[1.0, 0.0], [0.0, 1.0]] };
        let stencil: Vec<Point> = dirs
            .iter()
            .flat_map(|d| [x.offset(&d[..x.dim()], h), x.offset(&d[..x.dim()], -h)])
            .collect();
        if !domain.contains(x) || stencil.iter().any(|p| domain.check_interior(p).is_err()) {
            continue;
        }
        let u0 = sol.eval(x)?;
        let mut lap = -u0 * (2.0 * dirs.len() as f64);
        for p in &stencil {
            lap += sol.eval(p)?;
        }
        lap /= h * h;
        pde = pde.max((op.apply(lap, u0) - sol.source.eval(x)).norm());
        used += 1;
    }
    Ok(ResidualReport {
        pde,
        boundary: sol.boundary_residual(phi)?,
        points_used: used,
    })
}
