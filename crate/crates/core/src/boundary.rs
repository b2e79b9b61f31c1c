//! Boundary operators B̂ = (b_1, …, b_m), their adjoint set B̂ᵃ, and their
//! discretized action on boundary functions.
//!
//! Every condition is resolved on a [`BoundaryDiscretization`] into two matrices
//! `V` (acting on values) and `D` (acting on derivative data), so that component
//! j of B̂f is `V_j f + D_j ∂f`. Rows carry quadrature weights `Ω` for the spinor
//! inner product: unit weights for 1D endpoint rows, node weights for rows
//! attached to nodes of a curve.

use std::ops::Range;

use crate::fundamental::{Kernel, OperatorSpec};
use crate::geometry::{BoundaryDiscretization, Point};
use crate::{CMatrix, CVector, Error, Result, C64};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Part of ∂Ω a condition lives on.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum Support {
    #[default]
    All,
    /// Curve parameters in [start, end), taken modulo 2π.
    Arc { start: f64, end: f64 },
    /// Explicit node indices.
    Nodes(Vec<usize>),
}

impl Support {
    pub fn resolve(&self, bd: &BoundaryDiscretization) -> Result<Vec<usize>> {
        match self {
            Support::All => Ok((0..bd.len()).collect()),
            Support::Arc { start, end } => {
                if bd.dim() != 2 {
                    return Err(Error::InvalidCondition("arc supports need a closed curve".into()));
                }
                let len = end - start;
                if !(len > 0.0 && len <= TWO_PI + 1e-12) {
                    return Err(Error::InvalidCondition(format!(
                        "arc [{start}, {end}) must have length in (0, 2π]"
                    )));
                }
                let nodes: Vec<usize> = bd
                    .params()
                    .iter()
                    .enumerate()
                    .filter(|(_, &t)| {
                        let mut d = (t - start).rem_euclid(TWO_PI);
                        if d > TWO_PI - 1e-12 {
                            d = 0.0;
                        }
                        d < len - 1e-12
                    })
                    .map(|(i, _)| i)
                    .collect();
                if nodes.is_empty() {
                    return Err(Error::InvalidCondition(format!(
                        "arc [{start}, {end}) contains no boundary nodes"
                    )));
                }
                Ok(nodes)
            }
            Support::Nodes(idx) => {
                if idx.is_empty() {
                    return Err(Error::InvalidCondition("empty node support".into()));
                }
                if let Some(&i) = idx.iter().find(|&&i| i >= bd.len()) {
                    return Err(Error::ShapeMismatch(format!(
                        "support node {i} out of range for {} nodes",
                        bd.len()
                    )));
                }
                Ok(idx.clone())
            }
        }
    }
}

/// One boundary kernel b_j.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundaryCondition {
    /// a0 u(a) + a1 u'(a) + b0 u(b) + b1 u'(b).
    Local1D { a0: C64, a1: C64, b0: C64, b1: C64 },
    /// dirichlet_coeff·u + neumann_coeff·∂_ν u at every node of the support.
    LocalField2D {
        dirichlet_coeff: C64,
        neumann_coeff: C64,
        support: Support,
    },
    /// identity·u(x̄) + ∫ b(x̄, ȳ) u(ȳ) dS(ȳ) for x̄ in the support. `kernel` holds
    /// b at (support node, boundary node) pairs.
    NonlocalKernel {
        kernel: CMatrix,
        identity: C64,
        support: Support,
    },
}

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

impl BoundaryCondition {
    /// Real-coefficient endpoint row.
    pub fn local_1d(a0: f64, a1: f64, b0: f64, b1: f64) -> Self {
        BoundaryCondition::Local1D {
            a0: re(a0),
            a1: re(a1),
            b0: re(b0),
            b1: re(b1),
        }
    }

    pub fn dirichlet_2d(support: Support) -> Self {
        BoundaryCondition::LocalField2D {
            dirichlet_coeff: re(1.0),
            neumann_coeff: re(0.0),
            support,
        }
    }

    pub fn nonlocal(kernel: CMatrix, identity: C64, support: Support) -> Self {
        BoundaryCondition::NonlocalKernel {
            kernel,
            identity,
            support,
        }
    }

    pub fn support(&self) -> Option<&Support> {
        match self {
            BoundaryCondition::Local1D { .. } => None,
            BoundaryCondition::LocalField2D { support, .. }
            | BoundaryCondition::NonlocalKernel { support, .. } => Some(support),
        }
    }

    fn is_real(&self) -> bool {
        match self {
            BoundaryCondition::Local1D { a0, a1, b0, b1 } => {
                [a0, a1, b0, b1].iter().all(|z| z.im == 0.0)
            }
            BoundaryCondition::LocalField2D {
                dirichlet_coeff,
                neumann_coeff,
                ..
            } => dirichlet_coeff.im == 0.0 && neumann_coeff.im == 0.0,
            BoundaryCondition::NonlocalKernel { kernel, identity, .. } => {
                identity.im == 0.0 && kernel.iter().all(|z| z.im == 0.0)
            }
        }
    }

    fn resolve(&self, bd: &BoundaryDiscretization) -> Result<ResolvedCondition> {
        let n = bd.len();
        let zero = re(0.0);
        match self {
            BoundaryCondition::Local1D { a0, a1, b0, b1 } => {
                if bd.dim() != 1 {
                    return Err(Error::InvalidCondition("Local1D rows need an interval".into()));
                }
                if [a0, a1, b0, b1].iter().all(|z| **z == zero) {
                    return Err(Error::InvalidCondition("Local1D row with all coefficients zero".into()));
                }
                Ok(ResolvedCondition {
                    v: CMatrix::from_row_slice(1, 2, &[*a0, *b0]),
                    d: CMatrix::from_row_slice(1, 2, &[*a1, *b1]),
                    omega: vec![1.0],
                    nodes: vec![0, 1],
                })
            }
            BoundaryCondition::LocalField2D {
                dirichlet_coeff,
                neumann_coeff,
                support,
            } => {
                if bd.dim() != 2 {
                    return Err(Error::InvalidCondition("LocalField2D needs a closed curve".into()));
                }
                if *dirichlet_coeff == zero && *neumann_coeff == zero {
                    return Err(Error::InvalidCondition(
                        "LocalField2D with both coefficients zero".into(),
                    ));
                }
                let nodes = support.resolve(bd)?;
                let r = nodes.len();
                let mut v = CMatrix::zeros(r, n);
                let mut d = CMatrix::zeros(r, n);
                for (row, &i) in nodes.iter().enumerate() {
                    v[(row, i)] = *dirichlet_coeff;
                    d[(row, i)] = *neumann_coeff;
                }
                let omega = nodes.iter().map(|&i| bd.weights()[i]).collect();
                Ok(ResolvedCondition { v, d, omega, nodes })
            }
            BoundaryCondition::NonlocalKernel {
                kernel,
                identity,
                support,
            } => {
                let nodes = support.resolve(bd)?;
                let r = nodes.len();
                if kernel.nrows() != r || kernel.ncols() != n {
                    return Err(Error::ShapeMismatch(format!(
                        "nonlocal kernel is {}x{}, support and boundary need {r}x{n}",
                        kernel.nrows(),
                        kernel.ncols()
                    )));
                }
                let mut v = kernel.clone();
                for c in 0..n {
                    v.column_mut(c).scale_mut(bd.weights()[c]);
                }
                for (row, &i) in nodes.iter().enumerate() {
                    v[(row, i)] += *identity;
                }
                let omega = if bd.dim() == 1 {
                    vec![1.0; r]
                } else {
                    nodes.iter().map(|&i| bd.weights()[i]).collect()
                };
                Ok(ResolvedCondition {
                    v,
                    d: CMatrix::zeros(r, n),
                    omega,
                    nodes,
                })
            }
        }
    }
}

/// Selects B̂ or B̂ᵃ.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    Direct,
    Adjoint,
}

/// The m conditions of a problem together with the adjoint set.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryConditionSet {
    conditions: Vec<BoundaryCondition>,
    adjoint: Option<Vec<BoundaryCondition>>,
}

impl BoundaryConditionSet {
    /// Conditions without an explicit adjoint set; see [`Self::adjoint_conditions`].
    pub fn new(conditions: Vec<BoundaryCondition>) -> Result<Self> {
        if conditions.is_empty() {
            return Err(Error::InvalidCondition("at least one condition is required".into()));
        }
        Ok(Self {
            conditions,
            adjoint: None,
        })
    }

    pub fn with_adjoint(
        conditions: Vec<BoundaryCondition>,
        adjoint: Vec<BoundaryCondition>,
    ) -> Result<Self> {
        if adjoint.len() != conditions.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} conditions but {} adjoint conditions",
                conditions.len(),
                adjoint.len()
            )));
        }
        let mut set = Self::new(conditions)?;
        set.adjoint = Some(adjoint);
        Ok(set)
    }

    /// u(a) = 0, u(b) = 0.
    pub fn dirichlet_1d() -> Self {
        Self::new(vec![
            BoundaryCondition::local_1d(1.0, 0.0, 0.0, 0.0),
            BoundaryCondition::local_1d(0.0, 0.0, 1.0, 0.0),
        ])
        .expect("two conditions")
    }

    /// u(a) − u(b) = 0, u'(a) − u'(b) = 0.
    pub fn periodic_1d() -> Self {
        Self::new(vec![
            BoundaryCondition::local_1d(1.0, 0.0, -1.0, 0.0),
            BoundaryCondition::local_1d(0.0, 1.0, 0.0, -1.0),
        ])
        .expect("two conditions")
    }

    /// Dirichlet on the whole curve.
    pub fn dirichlet_2d() -> Self {
        Self::new(vec![BoundaryCondition::dirichlet_2d(Support::All)]).expect("one condition")
    }

    pub fn m(&self) -> usize {
        self.conditions.len()
    }

    pub fn conditions(&self) -> &[BoundaryCondition] {
        &self.conditions
    }

    pub fn explicit_adjoint(&self) -> Option<&[BoundaryCondition]> {
        self.adjoint.as_deref()
    }

    /// The adjoint set: the explicit one if given, otherwise the conditions
    /// themselves when 𝔏 is formally self-adjoint and every coefficient is real.
    pub fn adjoint_conditions(&self, op: &OperatorSpec) -> Result<Vec<BoundaryCondition>> {
        if let Some(a) = &self.adjoint {
            return Ok(a.clone());
        }
        if op.self_adjoint() && self.conditions.iter().all(BoundaryCondition::is_real) {
            Ok(self.conditions.clone())
        } else {
            Err(Error::MissingAdjoint(
                "operator or coefficients are complex; pass the adjoint conditions explicitly".into(),
            ))
        }
    }

    /// Same conditions with the permutation `order` applied to both lists.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        check_permutation(order, self.m())?;
        Ok(Self {
            conditions: order.iter().map(|&i| self.conditions[i].clone()).collect(),
            adjoint: self
                .adjoint
                .as_ref()
                .map(|a| order.iter().map(|&i| a[i].clone()).collect()),
        })
    }

    pub fn resolve(&self, op: &OperatorSpec, bd: &BoundaryDiscretization) -> Result<ResolvedConditions> {
        let adjoint = self.adjoint_conditions(op)?;
        let direct = resolve_list(&self.conditions, bd)?;
        let adjoint = resolve_list(&adjoint, bd)?;
        for (j, (d, a)) in direct.iter().zip(&adjoint).enumerate() {
            if d.rows() != a.rows() {
                return Err(Error::ShapeMismatch(format!(
                    "condition {j} has {} rows but its adjoint has {}",
                    d.rows(),
                    a.rows()
                )));
            }
        }
        Ok(ResolvedConditions {
            direct,
            adjoint,
            weights: bd.weights().to_vec(),
        })
    }
}

pub(crate) fn check_permutation(order: &[usize], m: usize) -> Result<()> {
    let mut seen = vec![false; m];
    if order.len() != m {
        return Err(Error::InvalidArgument(format!("order has {} entries, expected {m}", order.len())));
    }
    for &i in order {
        if i >= m || seen[i] {
            return Err(Error::InvalidArgument(format!("{order:?} is not a permutation of 0..{m}")));
        }
        seen[i] = true;
    }
    Ok(())
}

fn resolve_list(list: &[BoundaryCondition], bd: &BoundaryDiscretization) -> Result<Vec<ResolvedCondition>> {
    let resolved = list.iter().map(|c| c.resolve(bd)).collect::<Result<Vec<_>>>()?;
    if bd.dim() == 2 {
        let mut covered = vec![false; bd.len()];
        for r in &resolved {
            for &i in &r.nodes {
                covered[i] = true;
            }
        }
        if let Some(i) = covered.iter().position(|c| !c) {
            return Err(Error::InvalidCondition(format!(
                "condition supports do not cover the boundary (node {i} is free)"
            )));
        }
    }
    Ok(resolved)
}

/// One condition on a concrete discretization.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedCondition {
    pub v: CMatrix,
    pub d: CMatrix,
    pub omega: Vec<f64>,
    /// Boundary nodes the condition is attached to.
    pub nodes: Vec<usize>,
}

impl ResolvedCondition {
    pub fn rows(&self) -> usize {
        self.v.nrows()
    }

    pub fn has_derivative_terms(&self) -> bool {
        self.d.iter().any(|z| z.norm() != 0.0)
    }
}

/// Both condition lists resolved on a discretization.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedConditions {
    direct: Vec<ResolvedCondition>,
    adjoint: Vec<ResolvedCondition>,
    weights: Vec<f64>,
}

impl ResolvedConditions {
    pub fn m(&self) -> usize {
        self.direct.len()
    }

    pub fn list(&self, which: Which) -> &[ResolvedCondition] {
        match which {
            Which::Direct => &self.direct,
            Which::Adjoint => &self.adjoint,
        }
    }

    /// Roles exchanged: the adjoint set becomes the direct one.
    pub fn swapped(&self) -> Self {
        Self {
            direct: self.adjoint.clone(),
            adjoint: self.direct.clone(),
            weights: self.weights.clone(),
        }
    }

    pub fn total_rows(&self, which: Which) -> usize {
        self.list(which).iter().map(|c| c.rows()).sum()
    }

    /// Row range of each condition in the stacked spinor.
    pub fn row_ranges(&self, which: Which) -> Vec<Range<usize>> {
        let mut start = 0;
        self.list(which)
            .iter()
            .map(|c| {
                let r = start..start + c.rows();
                start += c.rows();
                r
            })
            .collect()
    }

    pub fn row_weights(&self, which: Which) -> Vec<f64> {
        self.list(which).iter().flat_map(|c| c.omega.iter().copied()).collect()
    }

    /// Condition `j` as a matrix on the flattened boundary space
    /// (`channels` = 2: [V D]; `channels` = 1: V, derivative terms unsupported).
    pub fn condition_matrix(&self, which: Which, j: usize, channels: usize) -> Result<CMatrix> {
        let c = &self.list(which)[j];
        let n = self.weights.len();
        if channels == 1 {
            if c.has_derivative_terms() {
                return Err(Error::Unsupported(
                    "derivative-coupled conditions on a curve need double-layer operators".into(),
                ));
            }
            return Ok(c.v.clone());
        }
        let mut m = CMatrix::zeros(c.rows(), 2 * n);
        m.view_mut((0, 0), (c.rows(), n)).copy_from(&c.v);
        m.view_mut((0, n), (c.rows(), n)).copy_from(&c.d);
        Ok(m)
    }

    /// All conditions stacked.
    pub fn operator_matrix(&self, which: Which, channels: usize) -> Result<CMatrix> {
        let blocks = (0..self.m())
            .map(|j| self.condition_matrix(which, j, channels))
            .collect::<Result<Vec<_>>>()?;
        let cols = channels * self.weights.len();
        let rows = blocks.iter().map(|b| b.nrows()).sum();
        let mut out = CMatrix::zeros(rows, cols);
        let mut r = 0;
        for b in blocks {
            out.view_mut((r, 0), (b.nrows(), cols)).copy_from(&b);
            r += b.nrows();
        }
        Ok(out)
    }

    /// Dagger W⁻¹ 𝔹ᴴ Ω of a stacked or single-condition matrix.
    pub fn dagger_of(&self, b: &CMatrix, omega: &[f64]) -> CMatrix {
        let n = self.weights.len();
        let mut out = b.adjoint();
        for (c, &o) in omega.iter().enumerate() {
            out.column_mut(c).scale_mut(o);
        }
        for r in 0..out.nrows() {
            let w = self.weights[r % n];
            out.row_mut(r).unscale_mut(w);
        }
        out
    }

    pub fn dagger_matrix(&self, which: Which, channels: usize) -> Result<CMatrix> {
        Ok(self.dagger_of(&self.operator_matrix(which, channels)?, &self.row_weights(which)))
    }

    pub fn condition_dagger(&self, which: Which, j: usize, channels: usize) -> Result<CMatrix> {
        Ok(self.dagger_of(
            &self.condition_matrix(which, j, channels)?,
            &self.list(which)[j].omega,
        ))
    }

    fn check_function(&self, f: &BoundaryFunction) -> Result<()> {
        let n = self.weights.len();
        if f.values.len() != n || f.derivs.len() != n {
            return Err(Error::ShapeMismatch(format!(
                "boundary function has {}/{} entries, discretization has {n} nodes",
                f.values.len(),
                f.derivs.len()
            )));
        }
        Ok(())
    }

    fn check_spinor(&self, phi: &SpinorBoundaryFunction, which: Which) -> Result<()> {
        let list = self.list(which);
        if phi.components.len() != list.len() {
            return Err(Error::ShapeMismatch(format!(
                "spinor has {} components, expected {}",
                phi.components.len(),
                list.len()
            )));
        }
        for (j, (c, p)) in list.iter().zip(&phi.components).enumerate() {
            if c.rows() != p.len() {
                return Err(Error::ShapeMismatch(format!(
                    "spinor component {j} has {} entries, condition has {} rows",
                    p.len(),
                    c.rows()
                )));
            }
        }
        Ok(())
    }

    /// B̂f (or B̂ᵃf).
    pub fn apply_b(&self, f: &BoundaryFunction, which: Which) -> Result<SpinorBoundaryFunction> {
        self.check_function(f)?;
        Ok(SpinorBoundaryFunction {
            components: self
                .list(which)
                .iter()
                .map(|c| &c.v * &f.values + &c.d * &f.derivs)
                .collect(),
        })
    }

    /// B̂†φ (or B̂ᵃ†φ): the adjoint with respect to the weighted inner products.
    pub fn apply_b_dagger(&self, phi: &SpinorBoundaryFunction, which: Which) -> Result<BoundaryFunction> {
        self.check_spinor(phi, which)?;
        let n = self.weights.len();
        let mut values = CVector::zeros(n);
        let mut derivs = CVector::zeros(n);
        for (c, p) in self.list(which).iter().zip(&phi.components) {
            let wp = CVector::from_iterator(p.len(), p.iter().zip(&c.omega).map(|(z, o)| z * *o));
            values += c.v.adjoint() * &wp;
            derivs += c.d.adjoint() * &wp;
        }
        for i in 0..n {
            values[i] /= self.weights[i];
            derivs[i] /= self.weights[i];
        }
        Ok(BoundaryFunction { values, derivs })
    }

    pub fn apply_b_adjoint_dagger(&self, phi: &SpinorBoundaryFunction) -> Result<BoundaryFunction> {
        self.apply_b_dagger(phi, Which::Adjoint)
    }

    /// ⟨φ, ψ⟩ = Σ_j Σ_r Ω_r conj(φ_r) ψ_r.
    pub fn spinor_inner(
        &self,
        which: Which,
        phi: &SpinorBoundaryFunction,
        psi: &SpinorBoundaryFunction,
    ) -> Result<C64> {
        self.check_spinor(phi, which)?;
        self.check_spinor(psi, which)?;
        let mut acc = C64::new(0.0, 0.0);
        for (c, (p, q)) in self.list(which).iter().zip(phi.components.iter().zip(&psi.components)) {
            for r in 0..c.rows() {
                acc += p[r].conj() * q[r] * c.omega[r];
            }
        }
        Ok(acc)
    }

    /// ⟨f, g⟩ = Σ_i w_i (conj(f_i) g_i + conj(∂f_i) ∂g_i).
    pub fn function_inner(&self, f: &BoundaryFunction, g: &BoundaryFunction) -> Result<C64> {
        self.check_function(f)?;
        self.check_function(g)?;
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..self.weights.len() {
            acc += (f.values[i].conj() * g.values[i] + f.derivs[i].conj() * g.derivs[i]) * self.weights[i];
        }
        Ok(acc)
    }
}

/// A function on the boundary nodes with its derivative channel
/// (x-derivative in 1D, normal derivative in 2D).
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryFunction {
    pub values: CVector,
    pub derivs: CVector,
}

impl BoundaryFunction {
    pub fn new(values: CVector, derivs: CVector) -> Result<Self> {
        if values.len() != derivs.len() {
            return Err(Error::ShapeMismatch("value and derivative channels differ in length".into()));
        }
        Ok(Self { values, derivs })
    }

    /// Values only; derivative channel zero.
    pub fn from_values(values: CVector) -> Self {
        let n = values.len();
        Self {
            values,
            derivs: CVector::zeros(n),
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self::from_values(CVector::zeros(n))
    }

    /// Flattened form used by the assembly (values, then derivatives when
    /// `channels` = 2).
    pub fn to_dof(&self, channels: usize) -> CVector {
        if channels == 1 {
            return self.values.clone();
        }
        let n = self.values.len();
        CVector::from_iterator(2 * n, self.values.iter().chain(self.derivs.iter()).copied())
    }

    pub fn from_dof(v: &CVector, channels: usize) -> Self {
        if channels == 1 {
            return Self::from_values(v.clone());
        }
        let n = v.len() / 2;
        Self {
            values: v.rows(0, n).into_owned(),
            derivs: v.rows(n, n).into_owned(),
        }
    }
}

/// m-component boundary data, one vector per condition.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorBoundaryFunction {
    pub components: Vec<CVector>,
}

impl SpinorBoundaryFunction {
    pub fn stacked(&self) -> CVector {
        let n = self.components.iter().map(|c| c.len()).sum();
        CVector::from_iterator(n, self.components.iter().flat_map(|c| c.iter().copied()))
    }

    pub fn max_norm(&self) -> f64 {
        self.components
            .iter()
            .flat_map(|c| c.iter())
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

/// Boundary trace of K(·, x′) with its derivative channel.
pub fn trace_e(k: &dyn Kernel, bd: &BoundaryDiscretization, xp: &Point) -> Result<BoundaryFunction> {
    bd.domain().check_interior(xp)?;
    let n = bd.len();
    let mut values = CVector::zeros(n);
    let mut derivs = CVector::zeros(n);
    for (i, x) in bd.nodes().iter().enumerate() {
        values[i] = k.value(x, xp)?;
        derivs[i] = k.d_first(x, xp, bd.derivative_direction(i), None)?;
    }
    Ok(BoundaryFunction { values, derivs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fundamental::FundamentalSolution;
    use crate::geometry::{discretize_boundary, Domain};
    use proptest::prelude::*;

    fn interval() -> BoundaryDiscretization {
        discretize_boundary(&Domain::interval(0.0, 1.0).unwrap(), 2).unwrap()
    }

    fn circle(n: usize) -> BoundaryDiscretization {
        discretize_boundary(&Domain::circle([0.0, 0.0], 1.0).unwrap(), n).unwrap()
    }

    fn cv(v: &[(f64, f64)]) -> CVector {
        CVector::from_iterator(v.len(), v.iter().map(|&(a, b)| C64::new(a, b)))
    }

    #[test]
    fn dirichlet_rows_pick_endpoint_values() {
        let op = OperatorSpec::helmholtz_1d(1.0);
        let rc = BoundaryConditionSet::dirichlet_1d().resolve(&op, &interval()).unwrap();
        let f = BoundaryFunction::from_values(cv(&[(3.0, 0.0), (-2.0, 0.0)]));
        let s = rc.apply_b(&f, Which::Direct).unwrap();
        assert_eq!(s.components[0][0], re(3.0));
        assert_eq!(s.components[1][0], re(-2.0));
    }

    #[test]
    fn periodic_row_annihilates_equal_values() {
        let op = OperatorSpec::helmholtz_1d(1.0);
        let rc = BoundaryConditionSet::periodic_1d().resolve(&op, &interval()).unwrap();
        let f = BoundaryFunction::from_values(cv(&[(5.0, 0.0), (5.0, 0.0)]));
        assert_eq!(rc.apply_b(&f, Which::Direct).unwrap().components[0][0], re(0.0));
    }

    #[test]
    fn constant_nonlocal_kernel_integrates() {
        let bd = circle(64);
        let c = 0.7;
        let kernel = CMatrix::from_element(64, 64, re(c));
        let set = BoundaryConditionSet::new(vec![BoundaryCondition::nonlocal(kernel, re(0.0), Support::All)]).unwrap();
        let rc = set.resolve(&OperatorSpec::Laplace2D, &bd).unwrap();
        let f = BoundaryFunction::from_values(CVector::from_element(64, re(1.0)));
        let s = rc.apply_b(&f, Which::Direct).unwrap();
        for z in s.components[0].iter() {
            assert!((z.re - c * 2.0 * std::f64::consts::PI).abs() < 1e-12);
        }
    }

    #[test]
    fn dagger_of_single_point_rows() {
        let op = OperatorSpec::helmholtz_1d(1.0);
        let set = BoundaryConditionSet::new(vec![BoundaryCondition::local_1d(1.0, 0.0, 0.0, 0.0)]).unwrap();
        let rc = set.resolve(&op, &interval()).unwrap();
        let c = C64::new(0.3, -1.1);
        let f = rc
            .apply_b_adjoint_dagger(&SpinorBoundaryFunction { components: vec![cv(&[(0.3, -1.1)])] })
            .unwrap();
        assert_eq!(f.values[0], c);
        assert_eq!(f.values[1], re(0.0));
        assert_eq!(f.derivs, CVector::zeros(2));

        let zero = rc
            .apply_b_adjoint_dagger(&SpinorBoundaryFunction { components: vec![CVector::zeros(1)] })
            .unwrap();
        assert_eq!(zero, BoundaryFunction::zeros(2));

        let rc2 = BoundaryConditionSet::dirichlet_1d().resolve(&op, &interval()).unwrap();
        let f = rc2
            .apply_b_adjoint_dagger(&SpinorBoundaryFunction {
                components: vec![cv(&[(1.5, 0.0)]), cv(&[(0.0, 2.0)])],
            })
            .unwrap();
        assert_eq!(f.values, cv(&[(1.5, 0.0), (0.0, 2.0)]));
    }

    #[test]
    fn robin_dagger_fills_derivative_channel() {
        let op = OperatorSpec::modified_helmholtz_1d(1.0);
        let set = BoundaryConditionSet::with_adjoint(
            vec![BoundaryCondition::local_1d(1.0, -1.0, 0.0, 0.0)],
            vec![BoundaryCondition::Local1D { a0: C64::new(1.0, 2.0), a1: re(-1.0), b0: re(0.0), b1: re(0.0) }],
        )
        .unwrap();
        let rc = set.resolve(&op, &interval()).unwrap();
        let f = rc
            .apply_b_adjoint_dagger(&SpinorBoundaryFunction { components: vec![cv(&[(1.0, 0.0)])] })
            .unwrap();
        assert_eq!(f.values[0], C64::new(1.0, -2.0));
        assert_eq!(f.derivs[0], re(-1.0));
    }

    #[test]
    fn missing_adjoint_for_complex_coefficients() {
        let set = BoundaryConditionSet::new(vec![BoundaryCondition::Local1D {
            a0: C64::new(1.0, 1.0),
            a1: re(0.0),
            b0: re(0.0),
            b1: re(0.0),
        }])
        .unwrap();
        assert!(matches!(
            set.resolve(&OperatorSpec::helmholtz_1d(1.0), &interval()),
            Err(Error::MissingAdjoint(_))
        ));
        let complex_k = OperatorSpec::Helmholtz1D { k: C64::new(1.0, 0.5) };
        assert!(matches!(
            BoundaryConditionSet::dirichlet_1d().resolve(&complex_k, &interval()),
            Err(Error::MissingAdjoint(_))
        ));
    }

    #[test]
    fn malformed_conditions_rejected() {
        let op = OperatorSpec::helmholtz_1d(1.0);
        let zero = BoundaryConditionSet::new(vec![BoundaryCondition::local_1d(0.0, 0.0, 0.0, 0.0)]).unwrap();
        assert!(matches!(zero.resolve(&op, &interval()), Err(Error::InvalidCondition(_))));
        assert!(BoundaryConditionSet::new(vec![]).is_err());

        let bad_kernel = BoundaryConditionSet::new(vec![BoundaryCondition::nonlocal(
            CMatrix::zeros(3, 8),
            re(1.0),
            Support::All,
        )])
        .unwrap();
        assert!(matches!(
            bad_kernel.resolve(&OperatorSpec::Laplace2D, &circle(8)),
            Err(Error::ShapeMismatch(_))
        ));
    }

    #[test]
    fn arcs_must_cover_the_curve() {
        let bd = circle(16);
        let half = BoundaryConditionSet::new(vec![BoundaryCondition::dirichlet_2d(Support::Arc {
            start: 0.0,
            end: std::f64::consts::PI,
        })])
        .unwrap();
        assert!(matches!(half.resolve(&OperatorSpec::Laplace2D, &bd), Err(Error::InvalidCondition(_))));
        let both = BoundaryConditionSet::new(vec![
            BoundaryCondition::dirichlet_2d(Support::Arc { start: 0.0, end: std::f64::consts::PI }),
            BoundaryCondition::dirichlet_2d(Support::Arc { start: std::f64::consts::PI, end: 2.0 * std::f64::consts::PI }),
        ])
        .unwrap();
        let rc = both.resolve(&OperatorSpec::Laplace2D, &bd).unwrap();
        assert_eq!(rc.list(Which::Direct)[0].nodes, (0..8).collect::<Vec<_>>());
        assert_eq!(rc.list(Which::Direct)[1].nodes, (8..16).collect::<Vec<_>>());
    }

    #[test]
    fn wrapping_arc() {
        let bd = circle(8);
        let nodes = Support::Arc { start: 5.0, end: 7.5 }.resolve(&bd).unwrap();
        // t_i = iπ/4; the arc wraps to 7.5 - 2π = 1.217: 5.497 (7), 0 (0), 0.785 (1)
        assert_eq!(nodes, vec![0, 1, 7]);
    }

    #[test]
    fn trace_examples() {
        let fs = FundamentalSolution::new(OperatorSpec::helmholtz_1d(1.0)).unwrap();
        let bd = interval();
        let t = trace_e(&fs, &bd, &Point::d1(0.5)).unwrap();
        let e = C64::new(0.0, 0.5).exp() / C64::new(0.0, 2.0);
        assert!((t.values[0] - e).norm() < 1e-15 && (t.values[1] - e).norm() < 1e-15);
        let t = trace_e(&fs, &bd, &Point::d1(0.25)).unwrap();
        let d = C64::new(0.0, 0.75).exp() / 2.0;
        assert!((t.derivs[1] - d).norm() < 1e-15);
        assert!((t.derivs[1] - C64::new(0.36584, 0.34082)).norm() < 1e-4);
        assert!(matches!(trace_e(&fs, &bd, &Point::d1(1.0)), Err(Error::PointOnBoundary(_))));

        let lap = FundamentalSolution::new(OperatorSpec::Laplace2D).unwrap();
        let t = trace_e(&lap, &circle(32), &Point::d2(0.0, 0.0)).unwrap();
        assert!(t.values.iter().all(|z| z.norm() < 1e-15));
    }

    fn arb_c64() -> impl Strategy<Value = C64> {
        (-2.0f64..2.0, -2.0f64..2.0).prop_map(|(a, b)| C64::new(a, b))
    }

    fn arb_local_1d() -> impl Strategy<Value = BoundaryCondition> {
        (arb_c64(), arb_c64(), arb_c64(), arb_c64()).prop_map(|(a0, a1, b0, b1)| BoundaryCondition::Local1D {
            a0: a0 + 3.0,
            a1,
            b0,
            b1,
        })
    }

    proptest! {
        #[test]
        fn adjoint_pairing_1d(
            c1 in arb_local_1d(), c2 in arb_local_1d(),
            f in proptest::collection::vec(arb_c64(), 4),
            p in proptest::collection::vec(arb_c64(), 2),
        ) {
            let set = BoundaryConditionSet::with_adjoint(vec![c1.clone(), c2.clone()], vec![c1, c2]).unwrap();
            let rc = set.resolve(&OperatorSpec::helmholtz_1d(1.0), &interval()).unwrap();
            let f = BoundaryFunction::new(CVector::from_vec(f[..2].to_vec()), CVector::from_vec(f[2..].to_vec())).unwrap();
            let phi = SpinorBoundaryFunction { components: vec![CVector::from_vec(vec![p[0]]), CVector::from_vec(vec![p[1]])] };
            for which in [Which::Direct, Which::Adjoint] {
                let lhs = rc.spinor_inner(which, &rc.apply_b(&f, which).unwrap(), &phi).unwrap();
                let rhs = rc.function_inner(&f, &rc.apply_b_dagger(&phi, which).unwrap()).unwrap();
                prop_assert!((lhs - rhs).norm() < 1e-12 * (1.0 + lhs.norm()));
            }
        }

        #[test]
        fn adjoint_pairing_and_linearity_2d(
            seed in 0u64..1000, alpha in arb_c64(), beta in arb_c64(),
        ) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let bd = discretize_boundary(&Domain::ellipse([0.1, 0.0], [1.5, 1.0]).unwrap(), 16).unwrap();
            let mut rnd = |n: usize| CVector::from_iterator(n, (0..n).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))));
            let kernel = CMatrix::from_iterator(8, 16, rnd(128).iter().copied());
            let set = BoundaryConditionSet::with_adjoint(
                vec![
                    BoundaryCondition::nonlocal(kernel.clone(), C64::new(1.0, 0.0), Support::Arc { start: 0.0, end: std::f64::consts::PI }),
                    BoundaryCondition::LocalField2D { dirichlet_coeff: C64::new(1.0, 0.5), neumann_coeff: C64::new(0.2, 0.0), support: Support::Arc { start: std::f64::consts::PI, end: 2.0 * std::f64::consts::PI } },
                ],
                vec![
                    BoundaryCondition::nonlocal(kernel, C64::new(1.0, 0.0), Support::Arc { start: 0.0, end: std::f64::consts::PI }),
                    BoundaryCondition::dirichlet_2d(Support::Arc { start: std::f64::consts::PI, end: 2.0 * std::f64::consts::PI }),
                ],
            ).unwrap();
            let rc = set.resolve(&OperatorSpec::Laplace2D, &bd).unwrap();
            let f = BoundaryFunction::new(rnd(16), rnd(16)).unwrap();
            let g = BoundaryFunction::new(rnd(16), rnd(16)).unwrap();
            let phi = SpinorBoundaryFunction { components: vec![rnd(8), rnd(8)] };
            for which in [Which::Direct, Which::Adjoint] {
                let lhs = rc.spinor_inner(which, &rc.apply_b(&f, which).unwrap(), &phi).unwrap();
                let rhs = rc.function_inner(&f, &rc.apply_b_dagger(&phi, which).unwrap()).unwrap();
                prop_assert!((lhs - rhs).norm() < 1e-12 * (1.0 + lhs.norm()));

                let combo = BoundaryFunction::new(&f.values * alpha + &g.values * beta, &f.derivs * alpha + &g.derivs * beta).unwrap();
                let lin = rc.apply_b(&combo, which).unwrap();
                let (bf, bg) = (rc.apply_b(&f, which).unwrap(), rc.apply_b(&g, which).unwrap());
                for j in 0..2 {
                    let expect = &bf.components[j] * alpha + &bg.components[j] * beta;
                    prop_assert!((&lin.components[j] - expect).norm() < 1e-12);
                }
            }
        }

        #[test]
        fn support_locality(node in 8usize..16, bump in arb_c64()) {
            let bd = circle(16);
            let set = BoundaryConditionSet::new(vec![
                BoundaryCondition::dirichlet_2d(Support::Arc { start: 0.0, end: std::f64::consts::PI }),
                BoundaryCondition::dirichlet_2d(Support::Arc { start: std::f64::consts::PI, end: 2.0 * std::f64::consts::PI }),
            ]).unwrap();
            let rc = set.resolve(&OperatorSpec::Laplace2D, &bd).unwrap();
            let f = BoundaryFunction::from_values(CVector::from_element(16, C64::new(0.5, 0.1)));
            let mut g = f.clone();
            g.values[node] += bump;
            let (bf, bg) = (rc.apply_b(&f, Which::Direct).unwrap(), rc.apply_b(&g, Which::Direct).unwrap());
            prop_assert_eq!(&bf.components[0], &bg.components[0]);
        }
    }
}
