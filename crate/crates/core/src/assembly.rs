//! Boundary-response matrix ĝ and the Green function
//!
//! ```text
//! G(x, x′) = E(x, x′) − ∫ dS(x̄) E(x, x̄) J_{x′}(x̄),   J_{x′} = B̂ᵃ† ĝ⁻¹ B̂ Ē_{x′},   ĝ = B̂ E B̂ᵃ†.
//! ```
//!
//! Discretely, with 𝔹 the stacked condition matrix, T the interior trace of the
//! boundary potential and p(x) the potential row at x, ĝ = 𝔹 T B̂ᵃ† and
//! G(x, x′) = E(x, x′) − p(x) B̂ᵃ† ĝ⁻¹ 𝔹 t(x′), where t(x′) is the boundary data of
//! E(·, x′).

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use crate::boundary::{BoundaryConditionSet, BoundaryFunction, ResolvedConditions, SpinorBoundaryFunction, Which};
use crate::fundamental::{AdjointKernel, FundamentalSolution, Kernel, OperatorSpec};
use crate::geometry::{BoundaryDiscretization, Point};
use crate::linalg::{one_norm, Inverse, Probes};
use crate::potential;
use crate::{CMatrix, CRowVector, CVector, Error, Result, C64};

/// Construction path of the Green function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    #[default]
    Direct,
    Recursive,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Direct => "direct",
            Method::Recursive => "recursive",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(Method::Direct),
            "recursive" => Ok(Method::Recursive),
            other => Err(Error::InvalidArgument(format!("unknown method '{other}'"))),
        }
    }
}

/// Rows that turn a [`Density`] into the correction term at one evaluation point.
#[derive(Debug, Clone, PartialEq)]
pub struct Target {
    pub rows: Vec<CRowVector>,
}

/// Coefficients of a boundary density, one part per row of the matching [`Target`].
#[derive(Debug, Clone, PartialEq)]
pub struct Density {
    pub parts: Vec<CVector>,
}

impl Density {
    pub fn zeros_like(&self) -> Self {
        Self {
            parts: self.parts.iter().map(|p| CVector::zeros(p.len())).collect(),
        }
    }

    /// self += a·other
    pub fn axpy(&mut self, a: C64, other: &Density) {
        for (p, q) in self.parts.iter_mut().zip(&other.parts) {
            *p += q * a;
        }
    }
}

pub fn contract(t: &Target, d: &Density) -> C64 {
    t.rows.iter().zip(&d.parts).map(|(r, p)| (r * p)[0]).sum()
}

/// A constructed Green function, independent of the construction path.
pub trait GreenFunction {
    fn discretization(&self) -> &BoundaryDiscretization;
    fn conditions(&self) -> &ResolvedConditions;
    fn operator(&self) -> &OperatorSpec;
    fn condition_estimate(&self) -> f64;
    fn method(&self) -> Method;
    /// The free-space kernel being corrected.
    fn free_space(&self) -> &dyn Kernel;

    /// Correction rows at an interior evaluation point.
    fn target(&self, x: &Point) -> Result<Target>;
    /// x-derivative (along `u`) of [`Self::target`].
    fn target_derivative(&self, x: &Point, u: &[f64]) -> Result<Target>;
    /// Density of the correction for an interior source point.
    fn source(&self, xp: &Point) -> Result<Density>;
    /// Density carrying inhomogeneous boundary data.
    fn data_density(&self, phi: &SpinorBoundaryFunction) -> Result<Density>;
    /// Boundary data (flattened) of the potential of a density.
    fn density_trace(&self, d: &Density) -> CVector;

    fn eval_g(&self, x: &Point, xp: &Point) -> Result<C64> {
        let t = self.target(x)?;
        let s = self.source(xp)?;
        Ok(self.free_space().value(x, xp)? - contract(&t, &s))
    }

    /// ∂G/∂x along `u`; `side` picks the one-sided limit at x = x′ (1D).
    fn eval_g_dx(&self, x: &Point, xp: &Point, u: &[f64], side: Option<f64>) -> Result<C64> {
        let t = self.target_derivative(x, u)?;
        let s = self.source(xp)?;
        Ok(self.free_space().d_first(x, xp, u, side)? - contract(&t, &s))
    }

    /// Gᵃ(x, x′) = G*(x′, x).
    fn eval_g_adjoint(&self, x: &Point, xp: &Point) -> Result<C64> {
        Ok(self.eval_g(xp, x)?.conj())
    }

    /// Boundary data (flattened) of G(·, x′).
    fn green_trace(&self, xp: &Point) -> Result<CVector> {
        let t0 = potential::source_trace(self.free_space(), self.discretization(), xp)?;
        Ok(t0 - self.density_trace(&self.source(xp)?))
    }

    /// max |B̂ Ḡ_{x′}| over all condition rows.
    fn boundary_condition_residual(&self, xp: &Point) -> Result<f64> {
        let b = self
            .conditions()
            .operator_matrix(Which::Direct, self.discretization().channels())?;
        Ok((b * self.green_trace(xp)?).camax())
    }
}

/// The assembled ĝ with its factorization.
#[derive(Debug, Clone)]
pub struct GMatrix {
    matrix: CMatrix,
    row_blocks: Vec<Range<usize>>,
    col_blocks: Vec<Range<usize>>,
    inverse: Inverse,
}

impl GMatrix {
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn m(&self) -> usize {
        self.row_blocks.len()
    }

    /// Block (i, j): condition i against adjoint condition j.
    pub fn block(&self, i: usize, j: usize) -> CMatrix {
        let (r, c) = (&self.row_blocks[i], &self.col_blocks[j]);
        self.matrix.view((r.start, c.start), (r.len(), c.len())).into_owned()
    }

    pub fn condition_estimate(&self) -> f64 {
        self.inverse.condition()
    }

    /// True when ĝ is rank deficient with a null space invisible to every source
    /// and evaluation point, and a pseudo-inverse is used.
    pub fn is_deflated(&self) -> bool {
        self.inverse.is_deflated()
    }

    pub fn solve(&self, b: &CMatrix) -> Result<CMatrix> {
        self.inverse.solve(b)
    }

    /// Row-major CSV, one matrix row per line as `re,im` pairs.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for r in 0..self.matrix.nrows() {
            let line: Vec<String> = self
                .matrix
                .row(r)
                .iter()
                .map(|z| format!("{:e},{:e}", z.re, z.im))
                .collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone)]
enum Oriented {
    Direct(FundamentalSolution),
    Adjoint(AdjointKernel<FundamentalSolution>),
}

impl Oriented {
    fn get(&self) -> &dyn Kernel {
        match self {
            Oriented::Direct(k) => k,
            Oriented::Adjoint(k) => k,
        }
    }
}

/// Interior-point probes for deflation decisions.
pub(crate) fn probes_for(
    bd: &BoundaryDiscretization,
    mut left: impl FnMut(&Point) -> Result<CVector>,
    mut right: impl FnMut(&Point) -> Result<CRowVector>,
) -> Result<Probes> {
    let pts = bd.domain().probe_points();
    Ok(Probes {
        left: pts.iter().map(&mut left).collect::<Result<_>>()?,
        right: pts.iter().map(&mut right).collect::<Result<_>>()?,
    })
}

/// Green function by direct assembly and inversion of ĝ.
#[derive(Debug, Clone)]
pub struct GreenOperator {
    fs: FundamentalSolution,
    kernel: Oriented,
    bcs: BoundaryConditionSet,
    bd: BoundaryDiscretization,
    resolved: ResolvedConditions,
    b: CMatrix,
    b_adj_dagger: CMatrix,
    trace: CMatrix,
    gmat: GMatrix,
    density_sign: f64,
}

impl GreenOperator {
    pub fn new(fs: &FundamentalSolution, bcs: &BoundaryConditionSet, bd: &BoundaryDiscretization) -> Result<Self> {
        let resolved = bcs.resolve(fs.operator(), bd)?;
        Self::build(*fs, Oriented::Direct(*fs), bcs.clone(), bd.clone(), resolved)
    }

    /// The adjoint problem assembled on its own: kernel Eᵃ, conditions B̂ᵃ, and B̂
    /// playing the role of the adjoint set. Its G is Gᵃ.
    pub fn adjoint_path(fs: &FundamentalSolution, bcs: &BoundaryConditionSet, bd: &BoundaryDiscretization) -> Result<Self> {
        let resolved = bcs.resolve(fs.operator(), bd)?.swapped();
        Self::build(*fs, Oriented::Adjoint(AdjointKernel(*fs)), bcs.clone(), bd.clone(), resolved)
    }

    fn build(
        fs: FundamentalSolution,
        kernel: Oriented,
        bcs: BoundaryConditionSet,
        bd: BoundaryDiscretization,
        resolved: ResolvedConditions,
    ) -> Result<Self> {
        if fs.operator().dim() != bd.dim() {
            return Err(Error::ShapeMismatch(format!(
                "{}D operator on a {}D domain",
                fs.operator().dim(),
                bd.dim()
            )));
        }
        let ch = bd.channels();
        let b = resolved.operator_matrix(Which::Direct, ch)?;
        let b_adj_dagger = resolved.dagger_matrix(Which::Adjoint, ch)?;
        let k = kernel.get();
        let trace = potential::trace_matrix(k, &bd)?;
        let matrix = &b * &trace * &b_adj_dagger;
        let scale = one_norm(&b) * one_norm(&trace) * one_norm(&b_adj_dagger);
        let inverse = Inverse::new(&matrix, scale, || {
            probes_for(
                &bd,
                |xp| Ok(&b * potential::source_trace(k, &bd, xp)?),
                |x| Ok(potential::potential_row(k, &bd, x)? * &b_adj_dagger),
            )
        })
        .map_err(|e| e.into_error())?;
        let gmat = GMatrix {
            matrix,
            row_blocks: resolved.row_ranges(Which::Direct),
            col_blocks: resolved.row_ranges(Which::Adjoint),
            inverse,
        };
        Ok(Self {
            fs,
            kernel,
            bcs,
            bd,
            resolved,
            b,
            b_adj_dagger,
            trace,
            gmat,
            density_sign: 1.0,
        })
    }

    pub fn gmat(&self) -> &GMatrix {
        &self.gmat
    }

    pub fn fundamental(&self) -> &FundamentalSolution {
        &self.fs
    }

    pub fn boundary_conditions(&self) -> &BoundaryConditionSet {
        &self.bcs
    }

    /// ĝ† with respect to the weighted spinor inner products: Ωᵃ⁻¹ ĝᴴ Ω.
    pub fn g_dagger(&self) -> CMatrix {
        let mut out = self.gmat.matrix.adjoint();
        for (c, o) in self.resolved.row_weights(Which::Direct).into_iter().enumerate() {
            out.column_mut(c).scale_mut(o);
        }
        for (r, o) in self.resolved.row_weights(Which::Adjoint).into_iter().enumerate() {
            out.row_mut(r).unscale_mut(o);
        }
        out
    }

    /// J_{x′} = B̂ᵃ† ĝ⁻¹ B̂ Ē_{x′}.
    pub fn boundary_density(&self, xp: &Point) -> Result<BoundaryFunction> {
        let d = &self.b_adj_dagger * &self.source(xp)?.parts[0];
        Ok(BoundaryFunction::from_dof(&d, self.bd.channels()))
    }

    /// Boundary data of G(x, ·) in its second argument.
    pub fn right_trace_row(&self, x: &Point) -> Result<CRowVector> {
        let k = self.kernel.get();
        let mut r0 = potential::potential_row(k, &self.bd, x)?;
        let n = self.bd.len();
        for c in 0..r0.len() {
            r0[c] /= self.bd.weights()[c % n];
        }
        let tt = potential::right_trace_matrix(k, &self.bd)?;
        let y = self.gmat.inverse.solve_unchecked(&(&self.b * tt));
        let t = self.target(x)?;
        Ok(r0 - (&t.rows[0] * y).scale(self.density_sign))
    }

    /// Largest adjoint-condition residual of G(x, ·) applied in the second argument.
    pub fn verify_right_action(&self, x: &Point) -> Result<f64> {
        let row = self.right_trace_row(x)?;
        let ba = self.resolved.operator_matrix(Which::Adjoint, self.bd.channels())?;
        Ok((row * ba.adjoint()).camax())
    }

    /// G(γ(t), x′) on the boundary curve, with the logarithmic singularity of the
    /// potential integrated exactly (Laplace only).
    pub fn eval_g_on_curve(&self, t: f64, xp: &Point) -> Result<C64> {
        if *self.fs.operator() != OperatorSpec::Laplace2D {
            return Err(Error::Unsupported("on-curve evaluation is implemented for Laplace2D".into()));
        }
        let curve = self.bd.curve().expect("2D discretization");
        let [x, y] = curve.point(t);
        let row = potential::laplace_single_layer_at(&self.bd, t)? * &self.b_adj_dagger;
        let s = self.source(xp)?;
        Ok(self.kernel.get().value(&Point::d2(x, y), xp)? - (row * &s.parts[0])[0])
    }

    /// Test hook: negate the boundary density, breaking the construction.
    #[doc(hidden)]
    pub fn flip_density_sign(&mut self) {
        self.density_sign = -self.density_sign;
    }
}

impl GreenFunction for GreenOperator {
    fn discretization(&self) -> &BoundaryDiscretization {
        &self.bd
    }

    fn conditions(&self) -> &ResolvedConditions {
        &self.resolved
    }

    fn operator(&self) -> &OperatorSpec {
        self.fs.operator()
    }

    fn condition_estimate(&self) -> f64 {
        self.gmat.condition_estimate()
    }

    fn method(&self) -> Method {
        Method::Direct
    }

    fn free_space(&self) -> &dyn Kernel {
        self.kernel.get()
    }

    fn target(&self, x: &Point) -> Result<Target> {
        self.bd.domain().check_interior(x)?;
        let p = potential::potential_row(self.kernel.get(), &self.bd, x)?;
        Ok(Target {
            rows: vec![p * &self.b_adj_dagger],
        })
    }

    fn target_derivative(&self, x: &Point, u: &[f64]) -> Result<Target> {
        self.bd.domain().check_interior(x)?;
        let p = potential::potential_row_derivative(self.kernel.get(), &self.bd, x, u)?;
        Ok(Target {
            rows: vec![p * &self.b_adj_dagger],
        })
    }

    fn source(&self, xp: &Point) -> Result<Density> {
        self.bd.domain().check_interior(xp)?;
        let t = potential::source_trace(self.kernel.get(), &self.bd, xp)?;
        let rhs = &self.b * t;
        // interior sources are consistent by construction (deflation was accepted on
        // interior probes); what falls outside the range is discretization error
        let c = self.gmat.inverse.solve_vec_unchecked(&rhs);
        Ok(Density {
            parts: vec![c * C64::new(self.density_sign, 0.0)],
        })
    }

    fn data_density(&self, phi: &SpinorBoundaryFunction) -> Result<Density> {
        let rows = self.resolved.total_rows(Which::Direct);
        let stacked = phi.stacked();
        if stacked.len() != rows {
            return Err(Error::ShapeMismatch(format!(
                "boundary data has {} entries, conditions have {rows} rows",
                stacked.len()
            )));
        }
        Ok(Density {
            parts: vec![self.gmat.inverse.solve_vec(&stacked)?],
        })
    }

    fn density_trace(&self, d: &Density) -> CVector {
        &self.trace * (&self.b_adj_dagger * &d.parts[0])
    }
}

/// ĝ for the given problem.
pub fn assemble_g(fs: &FundamentalSolution, bcs: &BoundaryConditionSet, bd: &BoundaryDiscretization) -> Result<GMatrix> {
    Ok(GreenOperator::new(fs, bcs, bd)?.gmat)
}

/// Green function with homogeneous Dirichlet conditions on all of ∂Ω.
pub fn dirichlet_green(fs: &FundamentalSolution, bd: &BoundaryDiscretization) -> Result<GreenOperator> {
    let bcs = if bd.dim() == 1 {
        BoundaryConditionSet::dirichlet_1d()
    } else {
        BoundaryConditionSet::dirichlet_2d()
    };
    GreenOperator::new(fs, &bcs, bd)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::BoundaryCondition;
    use crate::fundamental::Branch;
    use crate::geometry::{discretize_boundary, Domain};

    fn unit_interval() -> BoundaryDiscretization {
        discretize_boundary(&Domain::interval(0.0, 1.0).unwrap(), 2).unwrap()
    }

    fn helm(k: f64) -> FundamentalSolution {
        FundamentalSolution::new(OperatorSpec::helmholtz_1d(k)).unwrap()
    }

    fn dirichlet_oracle(k: f64, x: f64, xp: f64) -> f64 {
        let (lo, hi) = if x < xp { (x, xp) } else { (xp, x) };
        -(k * lo).sin() * (k * (1.0 - hi)).sin() / (k * k.sin())
    }

    #[test]
    fn dirichlet_g_matrix_entries() {
        let g = assemble_g(&helm(1.0), &BoundaryConditionSet::dirichlet_1d(), &unit_interval()).unwrap();
        let e01 = C64::new(1f64.sin() / 2.0, -1f64.cos() / 2.0);
        let expect = [C64::new(0.0, -0.5), e01, e01, C64::new(0.0, -0.5)];
        for (i, z) in expect.iter().enumerate() {
            assert!((g.matrix()[(i / 2, i % 2)] - z).norm() < 1e-15);
        }
        assert_eq!(g.m(), 2);
        assert_eq!(g.block(0, 1).shape(), (1, 1));
        assert!(g.condition_estimate() >= 1.0);
        assert!(!g.is_deflated());
    }

    #[test]
    fn dirichlet_eigenvalue_is_ill_posed() {
        let err = assemble_g(&helm(std::f64::consts::PI), &BoundaryConditionSet::dirichlet_1d(), &unit_interval())
            .unwrap_err();
        assert!(matches!(err, Error::IllPosed { .. } | Error::SingularMatrix { .. }), "{err:?}");
    }

    #[test]
    fn dirichlet_green_values() {
        let gop = dirichlet_green(&helm(1.0), &unit_interval()).unwrap();
        let g = gop.eval_g(&Point::d1(0.25), &Point::d1(0.75)).unwrap();
        assert!((g.re - dirichlet_oracle(1.0, 0.25, 0.75)).abs() < 1e-14);
        assert!((g.re + 0.0727401).abs() < 1e-7);
        assert!(g.im.abs() < 1e-14);
        // vanishes approaching the boundary
        assert!(gop.eval_g(&Point::d1(1e-6), &Point::d1(0.4)).unwrap().norm() < 1e-4);
        assert!(gop.eval_g(&Point::d1(1.0 - 1e-6), &Point::d1(0.4)).unwrap().norm() < 1e-4);
    }

    #[test]
    fn dirichlet_density_is_symmetric() {
        let gop = dirichlet_green(&helm(1.0), &unit_interval()).unwrap();
        let d = gop.boundary_density(&Point::d1(0.5)).unwrap();
        assert!((d.values[0] - d.values[1]).norm() < 1e-15);
        assert!(d.derivs.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn periodic_green_value() {
        let gop = GreenOperator::new(&helm(1.0), &BoundaryConditionSet::periodic_1d(), &unit_interval()).unwrap();
        let g = gop.eval_g(&Point::d1(0.2), &Point::d1(0.7)).unwrap();
        assert!((g.re - 1.0 / (2.0 * 0.5f64.sin())).abs() < 1e-13, "{g}");
        assert!((g.re - 1.042915).abs() < 1e-6);
        assert!(gop.verify_right_action(&Point::d1(0.35)).unwrap() < 1e-12);
    }

    #[test]
    fn right_action_dirichlet() {
        let gop = dirichlet_green(&helm(1.0), &unit_interval()).unwrap();
        for x in [0.1, 0.5, 0.77] {
            assert!(gop.verify_right_action(&Point::d1(x)).unwrap() < 1e-12);
        }
    }

    #[test]
    fn boundary_conditions_hold_for_robin() {
        let fs = FundamentalSolution::new(OperatorSpec::modified_helmholtz_1d(1.0)).unwrap();
        let bcs = BoundaryConditionSet::new(vec![
            BoundaryCondition::local_1d(1.0, -1.0, 0.0, 0.0),
            BoundaryCondition::local_1d(0.0, 0.0, 1.0, 1.0),
        ])
        .unwrap();
        let gop = GreenOperator::new(&fs, &bcs, &unit_interval()).unwrap();
        for xp in [0.1, 0.5, 0.9] {
            assert!(gop.boundary_condition_residual(&Point::d1(xp)).unwrap() < 1e-12);
            // symmetric real problem
            let (a, b) = (Point::d1(0.3), Point::d1(xp));
            let g1 = gop.eval_g(&a, &b).unwrap();
            assert!((g1 - gop.eval_g(&b, &a).unwrap()).norm() < 1e-14);
            assert!((g1 - gop.eval_g_adjoint(&a, &b).unwrap()).norm() < 1e-14);
        }
        assert!(gop.verify_right_action(&Point::d1(0.6)).unwrap() < 1e-12);
    }

    #[test]
    fn jump_of_constructed_green_function() {
        let gop = GreenOperator::new(&helm(1.0), &BoundaryConditionSet::periodic_1d(), &unit_interval()).unwrap();
        let xp = Point::d1(0.3);
        let jump = gop.eval_g_dx(&xp, &xp, &[1.0], Some(1.0)).unwrap() - gop.eval_g_dx(&xp, &xp, &[1.0], Some(-1.0)).unwrap();
        assert!((jump - C64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn branch_independence() {
        let bd = unit_interval();
        let out = helm(1.7);
        let inc = FundamentalSolution::with_branch(OperatorSpec::helmholtz_1d(1.7), Branch::Incoming).unwrap();
        for bcs in [BoundaryConditionSet::dirichlet_1d(), BoundaryConditionSet::periodic_1d()] {
            let g1 = GreenOperator::new(&out, &bcs, &bd).unwrap();
            let g2 = GreenOperator::new(&inc, &bcs, &bd).unwrap();
            assert!((g1.gmat().matrix() - g2.gmat().matrix()).camax() > 1e-3);
            for (x, xp) in [(0.2, 0.6), (0.9, 0.1), (0.5, 0.5)] {
                let (a, b) = (Point::d1(x), Point::d1(xp));
                assert!((g1.eval_g(&a, &b).unwrap() - g2.eval_g(&a, &b).unwrap()).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn adjoint_path_complex_robin() {
        let k = C64::new(1.3, 0.4);
        let fs = FundamentalSolution::new(OperatorSpec::Helmholtz1D { k }).unwrap();
        let (alpha, beta) = (C64::new(0.7, 0.3), C64::new(1.2, -0.5));
        // u'(0) = α u(0), u'(1) = β u(1); adjoint rows carry conj(α), conj(β)
        let row = |a0: C64, a1: f64, b0: C64, b1: f64| BoundaryCondition::Local1D {
            a0,
            a1: C64::new(a1, 0.0),
            b0,
            b1: C64::new(b1, 0.0),
        };
        let z = C64::new(0.0, 0.0);
        let bcs = BoundaryConditionSet::with_adjoint(
            vec![row(-alpha, 1.0, z, 0.0), row(z, 0.0, -beta, 1.0)],
            vec![row(-alpha.conj(), 1.0, z, 0.0), row(z, 0.0, -beta.conj(), 1.0)],
        )
        .unwrap();
        let bd = unit_interval();
        let direct = GreenOperator::new(&fs, &bcs, &bd).unwrap();
        let adjoint = GreenOperator::adjoint_path(&fs, &bcs, &bd).unwrap();
        assert!((adjoint.gmat().matrix() - direct.g_dagger()).camax() < 1e-12);
        for (x, xp) in [(0.2, 0.6), (0.8, 0.1), (0.45, 0.55)] {
            let (a, b) = (Point::d1(x), Point::d1(xp));
            let ga = adjoint.eval_g(&a, &b).unwrap();
            assert!((ga - direct.eval_g_adjoint(&a, &b).unwrap()).norm() < 1e-12);
        }
        assert!(direct.verify_right_action(&Point::d1(0.4)).unwrap() < 1e-12);
    }

    #[test]
    fn disk_dirichlet_matches_images() {
        let fs = FundamentalSolution::new(OperatorSpec::Laplace2D).unwrap();
        let bd = discretize_boundary(&Domain::circle([0.0, 0.0], 1.0).unwrap(), 128).unwrap();
        let gop = dirichlet_green(&fs, &bd).unwrap();
        assert!(gop.gmat().is_deflated());
        let s = gop.gmat().matrix();
        assert!((s - s.transpose()).camax() < 1e-12);
        let g = gop.eval_g(&Point::d2(0.5, 0.0), &Point::d2(0.0, 0.0)).unwrap();
        assert!((g.re - 0.5f64.ln() / (2.0 * std::f64::consts::PI)).abs() < 1e-10);
        assert!(gop.boundary_density(&Point::d2(0.0, 0.0)).unwrap().values.camax() < 1e-12);
        let xp = Point::d2(0.3, -0.4);
        for t in [0.01, 1.0, 2.5, 4.0] {
            assert!(gop.eval_g_on_curve(t + 0.5 * std::f64::consts::PI / 64.0, &xp).unwrap().norm() < 1e-5);
        }
        assert!(gop.verify_right_action(&Point::d2(0.1, 0.2)).unwrap() < 1e-5);
    }

    #[test]
    fn ellipse_is_not_deflated() {
        let fs = FundamentalSolution::new(OperatorSpec::Laplace2D).unwrap();
        let bd = discretize_boundary(&Domain::ellipse([0.0, 0.0], [1.5, 1.0]).unwrap(), 64).unwrap();
        let gop = dirichlet_green(&fs, &bd).unwrap();
        assert!(!gop.gmat().is_deflated());
        assert!(gop.boundary_condition_residual(&Point::d2(0.2, 0.1)).unwrap() < 1e-10);
    }

    #[test]
    fn csv_dump() {
        let g = assemble_g(&helm(1.0), &BoundaryConditionSet::dirichlet_1d(), &unit_interval()).unwrap();
        let csv = g.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0].split(',').count(), 4);
        let v: f64 = lines[0].split(',').nth(1).unwrap().parse().unwrap();
        assert!((v + 0.5).abs() < 1e-15);
    }

    #[test]
    fn method_parsing() {
        assert_eq!("recursive".parse::<Method>().unwrap(), Method::Recursive);
        assert_eq!(Method::Direct.to_string(), "direct");
        assert!("other".parse::<Method>().is_err());
    }

    #[test]
    fn flipped_density_breaks_the_boundary_condition() {
        let mut gop = dirichlet_green(&helm(1.0), &unit_interval()).unwrap();
        gop.flip_density_sign();
        assert!(gop.boundary_condition_residual(&Point::d1(0.4)).unwrap() > 1e-2);
    }
}
