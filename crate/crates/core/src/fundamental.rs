//! Free-space fundamental solutions and the [`Kernel`] abstraction.
//!
//! A kernel is anything that can be evaluated, together with its first-argument,
//! second-argument and mixed directional derivatives, at pairs of points. The
//! fundamental solution E is one; its adjoint Eᵃ(x, x′) = E*(x′, x) is another
//! ([`AdjointKernel`]), obtained by conjugate transposition rather than from a
//! separate catalog.
//!
//! In 1D the derivative of |x − x′| is undefined at coincidence. Boundary
//! assembly needs those values as one-sided limits, so the derivative methods
//! take a `side` hint: the sign of x − x′ to assume when the points coincide.
//! Without a hint, coincident derivative evaluations are an error.

use std::f64::consts::PI;

use crate::geometry::{BoundaryDiscretization, Point};
use crate::{CMatrix, Error, Result, C64};

/// The differential operator 𝔏 = Δ + c (c = k², −κ², or 0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OperatorSpec {
    /// u'' + k² u.
    Helmholtz1D { k: C64 },
    /// u'' − κ² u.
    ModifiedHelmholtz1D { kappa: f64 },
    /// Δu in the plane.
    Laplace2D,
    /// Δu + k² u in the plane. Declared but not implemented (needs Hankel functions).
    Helmholtz2D { k: C64 },
}

impl OperatorSpec {
    pub fn helmholtz_1d(k: f64) -> Self {
        OperatorSpec::Helmholtz1D { k: C64::new(k, 0.0) }
    }

    pub fn modified_helmholtz_1d(kappa: f64) -> Self {
        OperatorSpec::ModifiedHelmholtz1D { kappa }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            OperatorSpec::Helmholtz1D { k } => {
                if !(k.re.is_finite() && k.im.is_finite()) || k == C64::new(0.0, 0.0) {
                    return Err(Error::InvalidArgument(format!(
                        "Helmholtz1D needs a finite nonzero wavenumber, got {k}"
                    )));
                }
                Ok(())
            }
            OperatorSpec::ModifiedHelmholtz1D { kappa } => {
                if kappa.is_finite() && kappa > 0.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidArgument(format!(
                        "ModifiedHelmholtz1D needs kappa > 0, got {kappa}"
                    )))
                }
            }
            OperatorSpec::Laplace2D => Ok(()),
            OperatorSpec::Helmholtz2D { .. } => Err(Error::Unsupported(
                "2D Helmholtz fundamental solution (Hankel kernel) is not implemented".into(),
            )),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            OperatorSpec::Helmholtz1D { .. } | OperatorSpec::ModifiedHelmholtz1D { .. } => 1,
            OperatorSpec::Laplace2D | OperatorSpec::Helmholtz2D { .. } => 2,
        }
    }

    /// Formal self-adjointness: the zeroth-order coefficient is real.
    pub fn self_adjoint(&self) -> bool {
        self.zeroth_order().im == 0.0
    }

    /// The coefficient c in 𝔏 = Δ + c.
    pub fn zeroth_order(&self) -> C64 {
        match *self {
            OperatorSpec::Helmholtz1D { k } | OperatorSpec::Helmholtz2D { k } => k * k,
            OperatorSpec::ModifiedHelmholtz1D { kappa } => C64::new(-kappa * kappa, 0.0),
            OperatorSpec::Laplace2D => C64::new(0.0, 0.0),
        }
    }

    /// 𝔏u from the Laplacian and the value.
    pub fn apply(&self, laplacian: C64, value: C64) -> C64 {
        laplacian + self.zeroth_order() * value
    }
}

/// Which member of the class of fundamental solutions to use (1D operators only).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Branch {
    /// e^{ik|x−x′|}/(2ik); decaying −e^{−κ|x−x′|}/(2κ) for the modified operator.
    #[default]
    Outgoing,
    /// e^{−ik|x−x′|}/(−2ik); growing e^{κ|x−x′|}/(2κ) for the modified operator.
    Incoming,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arg {
    First,
    Second,
}

/// A kernel K(x, y) with analytic directional derivatives.
pub trait Kernel {
    fn dim(&self) -> usize;

    fn value(&self, x: &Point, y: &Point) -> Result<C64>;

    /// ∂/∂x along `u`.
    fn d_first(&self, x: &Point, y: &Point, u: &[f64], side: Option<f64>) -> Result<C64>;

    /// ∂/∂y along `v`.
    fn d_second(&self, x: &Point, y: &Point, v: &[f64], side: Option<f64>) -> Result<C64>;

    /// ∂²/∂x∂y along `u` and `v`.
    fn d_mixed(&self, x: &Point, y: &Point, u: &[f64], v: &[f64], side: Option<f64>)
        -> Result<C64>;

    /// Nyström matrix of the single-layer boundary operator for kernels that are
    /// singular on the boundary diagonal (None: pointwise evaluation is fine).
    fn single_layer(&self, _bd: &BoundaryDiscretization) -> Option<Result<CMatrix>> {
        None
    }
}

/// E for one operator of the catalog.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FundamentalSolution {
    op: OperatorSpec,
    branch: Branch,
}

impl FundamentalSolution {
    pub fn new(op: OperatorSpec) -> Result<Self> {
        Self::with_branch(op, Branch::Outgoing)
    }

    pub fn with_branch(op: OperatorSpec, branch: Branch) -> Result<Self> {
        op.validate()?;
        if branch == Branch::Incoming && op.dim() != 1 {
            return Err(Error::InvalidArgument(
                "only the 1D operators have an incoming branch".into(),
            ));
        }
        Ok(Self { op, branch })
    }

    pub fn operator(&self) -> &OperatorSpec {
        &self.op
    }

    pub fn branch(&self) -> Branch {
        self.branch
    }

    pub fn eval_e(&self, x: &Point, xp: &Point) -> Result<C64> {
        self.value(x, xp)
    }

    /// Eᵃ(x, x′) = E*(x′, x).
    pub fn eval_e_adjoint(&self, x: &Point, xp: &Point) -> Result<C64> {
        Ok(self.eval_e(xp, x)?.conj())
    }

    /// dE/dx (first argument) or dE/dx′ (second argument); 1D only.
    pub fn eval_de(&self, x: &Point, xp: &Point, arg: Arg) -> Result<C64> {
        if self.op.dim() != 1 {
            return Err(Error::Unsupported(
                "eval_de is the 1D derivative; use eval_directional in 2D".into(),
            ));
        }
        self.eval_directional(x, xp, arg, &[1.0])
    }

    pub fn eval_directional(&self, x: &Point, xp: &Point, arg: Arg, dir: &[f64]) -> Result<C64> {
        match arg {
            Arg::First => self.d_first(x, xp, dir, None),
            Arg::Second => self.d_second(x, xp, dir, None),
        }
    }

    fn check_dims(&self, x: &Point, y: &Point) -> Result<()> {
        let d = self.op.dim();
        if x.dim() != d || y.dim() != d {
            return Err(Error::ShapeMismatch(format!(
                "{d}D kernel evaluated at points of dimension {} and {}",
                x.dim(),
                y.dim()
            )));
        }
        Ok(())
    }

    /// Radial profile e(r) of a 1D kernel E(x, y) = e(|x − y|) with its first two
    /// r-derivatives.
    fn profile_1d(&self, r: f64) -> (C64, C64, C64) {
        let i = C64::i();
        match self.op {
            OperatorSpec::Helmholtz1D { k } => {
                let k = match self.branch {
                    Branch::Outgoing => k,
                    Branch::Incoming => -k,
                };
                let e = (i * k * r).exp() / (2.0 * i * k);
                (e, i * k * e, -k * k * e)
            }
            OperatorSpec::ModifiedHelmholtz1D { kappa } => {
                let kappa = match self.branch {
                    Branch::Outgoing => kappa,
                    Branch::Incoming => -kappa,
                };
                let e = C64::new(-(-kappa * r).exp() / (2.0 * kappa), 0.0);
                (e, -kappa * e, kappa * kappa * e)
            }
            _ => unreachable!("profile_1d on a 2D operator"),
        }
    }

    fn sign_1d(x: &Point, y: &Point, side: Option<f64>) -> Result<f64> {
        let s = x.x() - y.x();
        if s != 0.0 {
            Ok(s.signum())
        } else {
            side.map(f64::signum).ok_or_else(|| {
                Error::SingularEvaluation(format!(
                    "derivative of |x - x'| at coincident points x = x' = {}",
                    x.x()
                ))
            })
        }
    }

    fn laplace_geometry(x: &Point, y: &Point) -> Result<([f64; 2], f64)> {
        let d = x.diff(y);
        let r2 = d[0] * d[0] + d[1] * d[1];
        if r2 == 0.0 {
            return Err(Error::SingularEvaluation(format!(
                "logarithmic kernel at coincident points {:?}",
                x.coords()
            )));
        }
        Ok((d, r2))
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl Kernel for FundamentalSolution {
    fn dim(&self) -> usize {
        self.op.dim()
    }

    fn value(&self, x: &Point, y: &Point) -> Result<C64> {
        self.check_dims(x, y)?;
        match self.op {
            OperatorSpec::Laplace2D => {
                let (_, r2) = Self::laplace_geometry(x, y)?;
                Ok(C64::new(0.25 * r2.ln() / PI, 0.0))
            }
            _ => Ok(self.profile_1d((x.x() - y.x()).abs()).0),
        }
    }

    fn d_first(&self, x: &Point, y: &Point, u: &[f64], side: Option<f64>) -> Result<C64> {
        self.check_dims(x, y)?;
        match self.op {
            OperatorSpec::Laplace2D => {
                let (d, r2) = Self::laplace_geometry(x, y)?;
                Ok(C64::new(dot(&d, u) / (2.0 * PI * r2), 0.0))
            }
            _ => {
                let sigma = Self::sign_1d(x, y, side)?;
                let (_, e1, _) = self.profile_1d((x.x() - y.x()).abs());
                Ok(e1 * sigma * u[0])
            }
        }
    }

    fn d_second(&self, x: &Point, y: &Point, v: &[f64], side: Option<f64>) -> Result<C64> {
        self.check_dims(x, y)?;
        match self.op {
            OperatorSpec::Laplace2D => {
                let (d, r2) = Self::laplace_geometry(x, y)?;
                Ok(C64::new(-dot(&d, v) / (2.0 * PI * r2), 0.0))
            }
            _ => {
                let sigma = Self::sign_1d(x, y, side)?;
                let (_, e1, _) = self.profile_1d((x.x() - y.x()).abs());
                Ok(-e1 * sigma * v[0])
            }
        }
    }

    fn d_mixed(
        &self,
        x: &Point,
        y: &Point,
        u: &[f64],
        v: &[f64],
        side: Option<f64>,
    ) -> Result<C64> {
        self.check_dims(x, y)?;
        match self.op {
            OperatorSpec::Laplace2D => {
                let (d, r2) = Self::laplace_geometry(x, y)?;
                let val = -(dot(u, v) / r2 - 2.0 * dot(&d, u) * dot(&d, v) / (r2 * r2)) / (2.0 * PI);
                Ok(C64::new(val, 0.0))
            }
            _ => {
                // one-sided limit only: the distributional part at coincidence is excluded
                Self::sign_1d(x, y, side)?;
                let (_, _, e2) = self.profile_1d((x.x() - y.x()).abs());
                Ok(-e2 * u[0] * v[0])
            }
        }
    }

    fn single_layer(&self, bd: &BoundaryDiscretization) -> Option<Result<CMatrix>> {
        match self.op {
            OperatorSpec::Laplace2D => Some(crate::potential::laplace_single_layer(bd)),
            _ => None,
        }
    }
}

/// Kᵃ(x, y) = K*(y, x).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdjointKernel<K>(pub K);

impl<K: Kernel> Kernel for AdjointKernel<K> {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn value(&self, x: &Point, y: &Point) -> Result<C64> {
        Ok(self.0.value(y, x)?.conj())
    }

    fn d_first(&self, x: &Point, y: &Point, u: &[f64], side: Option<f64>) -> Result<C64> {
        Ok(self.0.d_second(y, x, u, side.map(|s| -s))?.conj())
    }

    fn d_second(&self, x: &Point, y: &Point, v: &[f64], side: Option<f64>) -> Result<C64> {
        Ok(self.0.d_first(y, x, v, side.map(|s| -s))?.conj())
    }

    fn d_mixed(
        &self,
        x: &Point,
        y: &Point,
        u: &[f64],
        v: &[f64],
        side: Option<f64>,
    ) -> Result<C64> {
        Ok(self.0.d_mixed(y, x, v, u, side.map(|s| -s))?.conj())
    }

    fn single_layer(&self, bd: &BoundaryDiscretization) -> Option<Result<CMatrix>> {
        let s = self.0.single_layer(bd)?;
        Some(s.map(|s| {
            // Kᵃ_{rc} w_c = conj(K_{cr}) w_c = conj(S_{cr}) w_c / w_r
            let w = bd.weights();
            let mut out = s.adjoint();
            for r in 0..out.nrows() {
                for c in 0..out.ncols() {
                    out[(r, c)] *= w[c] / w[r];
                }
            }
            out
        }))
    }
}
