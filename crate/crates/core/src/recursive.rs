//! Block inversion and the stagewise construction of the Green function.
//!
//! Conditions are imposed one at a time. With G⁽⁰⁾ = E,
//!
//! ```text
//! G⁽ʲ⁾ = G⁽ʲ⁻¹⁾ − G⁽ʲ⁻¹⁾ b̂ᵃ_j† g_j⁻¹ b̂_j G⁽ʲ⁻¹⁾,   g_j = b̂_j G⁽ʲ⁻¹⁾ b̂ᵃ_j†,
//! ```
//!
//! and G = G⁽ᵐ⁾. Each stage keeps the interior-trace matrix of G⁽ʲ⁾ materialized,
//! which is all the next stage needs; interior evaluations replay the stage
//! factors. g_j is formed only on the nodes the condition touches, so endpoint
//! rows in 1D give scalar (or tiny) stage matrices.

use crate::assembly::{probes_for, Density, GreenFunction, Method, Target};
use crate::boundary::{check_permutation, BoundaryConditionSet, ResolvedConditions, SpinorBoundaryFunction, Which};
use crate::fundamental::{FundamentalSolution, Kernel, OperatorSpec};
use crate::geometry::{BoundaryDiscretization, Point};
use crate::linalg::{one_norm, Inverse};
use crate::potential;
use crate::{CMatrix, CRowVector, CVector, Error, Result};

/// Beyond this condition number a diagonal block counts as singular.
const BLOCK_CONDITION_LIMIT: f64 = 1e14;

/// [[A, B], [C, D]].
#[derive(Debug, Clone, PartialEq)]
pub struct BlockMatrix2x2 {
    pub a: CMatrix,
    pub b: CMatrix,
    pub c: CMatrix,
    pub d: CMatrix,
}

impl BlockMatrix2x2 {
    pub fn new(a: CMatrix, b: CMatrix, c: CMatrix, d: CMatrix) -> Result<Self> {
        let (k, l) = (a.nrows(), d.nrows());
        if !a.is_square() || !d.is_square() || b.shape() != (k, l) || c.shape() != (l, k) {
            return Err(Error::ShapeMismatch(format!(
                "incompatible blocks A {:?}, B {:?}, C {:?}, D {:?}",
                a.shape(),
                b.shape(),
                c.shape(),
                d.shape()
            )));
        }
        Ok(Self { a, b, c, d })
    }

    /// Splits a square matrix after the first `k` rows and columns.
    pub fn split(m: &CMatrix, k: usize) -> Result<Self> {
        if !m.is_square() || k == 0 || k >= m.nrows() {
            return Err(Error::ShapeMismatch(format!(
                "cannot split a {:?} matrix at {k}",
                m.shape()
            )));
        }
        let l = m.nrows() - k;
        Ok(Self {
            a: m.view((0, 0), (k, k)).into_owned(),
            b: m.view((0, k), (k, l)).into_owned(),
            c: m.view((k, 0), (l, k)).into_owned(),
            d: m.view((k, k), (l, l)).into_owned(),
        })
    }

    pub fn assemble(&self) -> CMatrix {
        let (k, l) = (self.a.nrows(), self.d.nrows());
        let mut m = CMatrix::zeros(k + l, k + l);
        m.view_mut((0, 0), (k, k)).copy_from(&self.a);
        m.view_mut((0, k), (k, l)).copy_from(&self.b);
        m.view_mut((k, 0), (l, k)).copy_from(&self.c);
        m.view_mut((k, k), (l, l)).copy_from(&self.d);
        m
    }
}

fn checked_inverse(m: &CMatrix, which: &str) -> Result<CMatrix> {
    let inv = m.clone().try_inverse().ok_or_else(|| Error::SingularBlock { which: which.into() })?;
    if one_norm(m) * one_norm(&inv) > BLOCK_CONDITION_LIMIT {
        return Err(Error::SingularBlock { which: which.into() });
    }
    Ok(inv)
}

/// Inverse through the Schur complement R = (D − C A⁻¹ B)⁻¹:
///
/// ```text
/// [[A⁻¹ + A⁻¹ B R C A⁻¹, −A⁻¹ B R], [−R C A⁻¹, R]]
/// ```
pub fn block_inverse(bm: &BlockMatrix2x2) -> Result<CMatrix> {
    let ai = checked_inverse(&bm.a, "A")?;
    let ai_b = &ai * &bm.b;
    let c_ai = &bm.c * &ai;
    let r = checked_inverse(&(&bm.d - &bm.c * &ai_b), "Schur complement D - C A^-1 B")?;
    let ai_b_r = &ai_b * &r;
    let out = BlockMatrix2x2 {
        a: &ai + &ai_b_r * &c_ai,
        b: -ai_b_r,
        c: -(&r * &c_ai),
        d: r,
    };
    Ok(out.assemble())
}

#[derive(Debug, Clone)]
struct Stage {
    b: CMatrix,
    p: CMatrix,
    /// T⁽ʲ⁻¹⁾ P_j
    tp: CMatrix,
    /// g_j⁻¹ 𝔹_j T⁽ʲ⁻¹⁾
    q: CMatrix,
    inverse: Inverse,
}

fn nonzero_columns(m: &CMatrix) -> Vec<usize> {
    (0..m.ncols()).filter(|&c| m.column(c).iter().any(|z| z.norm() != 0.0)).collect()
}

fn nonzero_rows(m: &CMatrix) -> Vec<usize> {
    (0..m.nrows()).filter(|&r| m.row(r).iter().any(|z| z.norm() != 0.0)).collect()
}

/// Partial construction after `stage()` conditions (in the chosen order).
#[derive(Debug, Clone)]
pub struct RecursiveState {
    fs: FundamentalSolution,
    bd: BoundaryDiscretization,
    resolved: ResolvedConditions,
    order: Vec<usize>,
    stages: Vec<Stage>,
    trace: CMatrix,
    right_trace: CMatrix,
}

impl RecursiveState {
    /// Stage 0 (G⁽⁰⁾ = E); conditions will be imposed in `order`.
    pub fn new(
        fs: &FundamentalSolution,
        bcs: &BoundaryConditionSet,
        bd: &BoundaryDiscretization,
        order: &[usize],
    ) -> Result<Self> {
        check_permutation(order, bcs.m())?;
        if fs.operator().dim() != bd.dim() {
            return Err(Error::ShapeMismatch(format!(
                "{}D operator on a {}D domain",
                fs.operator().dim(),
                bd.dim()
            )));
        }
        let resolved = bcs.resolve(fs.operator(), bd)?;
        // reject unsupported condition shapes up front
        resolved.operator_matrix(Which::Direct, bd.channels())?;
        resolved.operator_matrix(Which::Adjoint, bd.channels())?;
        Ok(Self {
            fs: *fs,
            bd: bd.clone(),
            resolved,
            order: order.to_vec(),
            stages: Vec::new(),
            trace: potential::trace_matrix(fs, bd)?,
            right_trace: potential::right_trace_matrix(fs, bd)?,
        })
    }

    pub fn stage(&self) -> usize {
        self.stages.len()
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn is_complete(&self) -> bool {
        self.stages.len() == self.order.len()
    }

    /// Interior-trace matrix of the current G⁽ʲ⁾.
    pub fn trace_matrix(&self) -> &CMatrix {
        &self.trace
    }

    /// Condition estimates of the stage matrices g_1, …, g_j.
    pub fn stage_conditions(&self) -> Vec<f64> {
        self.stages.iter().map(|s| s.inverse.condition()).collect()
    }

    /// Rows of the current kernel's potential at x: r⁽ⁱ⁻¹⁾(x) P_i for each stage, and
    /// the final r⁽ʲ⁾(x).
    fn rows_from(&self, mut r: CRowVector) -> (Vec<CRowVector>, CRowVector) {
        let mut rows = Vec::with_capacity(self.stages.len());
        for s in &self.stages {
            let rp = &r * &s.p;
            r -= &rp * &s.q;
            rows.push(rp);
        }
        (rows, r)
    }

    /// Stage coefficients of a source and the trace of the current G⁽ʲ⁾(·, x′).
    fn source_from(&self, mut t: CVector) -> Result<(Vec<CVector>, CVector)> {
        let mut parts = Vec::with_capacity(self.stages.len());
        for s in &self.stages {
            let c = s.inverse.solve_vec_unchecked(&(&s.b * &t));
            t -= &s.tp * &c;
            parts.push(c);
        }
        Ok((parts, t))
    }

    /// Boundary data of G⁽ʲ⁾(·, x′).
    pub fn stage_trace(&self, xp: &Point) -> Result<CVector> {
        self.bd.domain().check_interior(xp)?;
        Ok(self.source_from(potential::source_trace(&self.fs, &self.bd, xp)?)?.1)
    }

    /// max |b̂_k Ḡ⁽ʲ⁾_{x′}| for the condition imposed at stage `j` (1-based, any
    /// j ≤ m; conditions not imposed yet are generally violated).
    pub fn stage_residual(&self, j: usize, xp: &Point) -> Result<f64> {
        if j == 0 || j > self.order.len() {
            return Err(Error::InvalidArgument(format!("stage {j} out of range 1..={}", self.order.len())));
        }
        let b = self
            .resolved
            .condition_matrix(Which::Direct, self.order[j - 1], self.bd.channels())?;
        Ok((b * self.stage_trace(xp)?).camax())
    }

    /// Imposes the next condition.
    pub fn advance(&mut self) -> Result<()> {
        let j = self.stages.len();
        let idx = *self
            .order
            .get(j)
            .ok_or_else(|| Error::InvalidArgument("all conditions already imposed".into()))?;
        let ch = self.bd.channels();
        let b = self.resolved.condition_matrix(Which::Direct, idx, ch)?;
        let p = self.resolved.condition_dagger(Which::Adjoint, idx, ch)?;

        // reduced form: only the dofs the condition and its adjoint touch
        let cols = nonzero_columns(&b);
        let prow = nonzero_rows(&p);
        let tp = self.trace.select_columns(&prow) * p.select_rows(&prow);
        let g = b.select_columns(&cols) * tp.select_rows(&cols);

        let scale = one_norm(&b) * one_norm(&tp);
        let inverse = Inverse::new(&g, scale, || {
            probes_for(
                &self.bd,
                |xp| Ok(&b * self.source_from(potential::source_trace(&self.fs, &self.bd, xp)?)?.1),
                |x| Ok(self.rows_from(potential::potential_row(&self.fs, &self.bd, x)?).1 * &p),
            )
        })
        .map_err(|e| Error::StageSingular {
            stage: j + 1,
            condition: e.condition(),
        })?;

        let q = inverse.solve_unchecked(&(&b * &self.trace));
        let q_right = inverse.solve_unchecked(&(&b * &self.right_trace));
        self.trace -= &tp * &q;
        self.right_trace -= &tp * q_right;
        self.stages.push(Stage { b, p, tp, q, inverse });
        Ok(())
    }

    pub fn finish(mut self) -> Result<RecursiveGreen> {
        while !self.is_complete() {
            self.advance()?;
        }
        Ok(RecursiveGreen { state: self })
    }

    /// The flattened operator 𝕄 with G(x, x′) = E(x, x′) − p(x) 𝕄 t(x′), composed
    /// from the stage factors M_j = P_j g_j⁻¹ 𝔹_j:
    /// 𝕄 = Σ_j L_j M_j R_j with L_j = Π_{i<j}(I − M_i T⁽ⁱ⁻¹⁾), R_j = Π_{i<j}(I − T⁽ⁱ⁻¹⁾ M_i).
    pub fn composed_operator(&self) -> CMatrix {
        let n = self.bd.n_dof();
        let mut total = CMatrix::zeros(n, n);
        let mut left = CMatrix::identity(n, n);
        let mut right = CMatrix::identity(n, n);
        for s in &self.stages {
            let m = &s.p * s.inverse.solve_unchecked(&s.b);
            total += &left * &m * &right;
            // M_j T⁽ʲ⁻¹⁾ = P_j q_j and T⁽ʲ⁻¹⁾ M_j = tp_j g_j⁻¹ 𝔹_j
            left = &left * (CMatrix::identity(n, n) - &s.p * &s.q);
            right = (CMatrix::identity(n, n) - &s.tp * s.inverse.solve_unchecked(&s.b)) * &right;
        }
        total
    }
}

/// Green function built stage by stage.
#[derive(Debug, Clone)]
pub struct RecursiveGreen {
    state: RecursiveState,
}

impl RecursiveGreen {
    pub fn state(&self) -> &RecursiveState {
        &self.state
    }

    /// Boundary data of G(x, ·) in its second argument.
    pub fn right_trace_row(&self, x: &Point) -> Result<CRowVector> {
        let st = &self.state;
        let mut r0 = potential::potential_row(&st.fs, &st.bd, x)?;
        let n = st.bd.len();
        for c in 0..r0.len() {
            r0[c] /= st.bd.weights()[c % n];
        }
        // G(x, ȳ) = r0(x) minus the stagewise correction, using T̃ for the source side
        let mut t = potential::right_trace_matrix(&st.fs, &st.bd)?;
        let (rows, _) = st.rows_from(potential::potential_row(&st.fs, &st.bd, x)?);
        let mut out = r0;
        for (s, row) in st.stages.iter().zip(rows) {
            let c = s.inverse.solve_unchecked(&(&s.b * &t));
            out -= &row * &c;
            t -= &s.tp * c;
        }
        Ok(out)
    }

    /// Largest adjoint-condition residual of G(x, ·) in its second argument.
    pub fn verify_right_action(&self, x: &Point) -> Result<f64> {
        let row = self.right_trace_row(x)?;
        let ba = self.state.resolved.operator_matrix(Which::Adjoint, self.state.bd.channels())?;
        Ok((row * ba.adjoint()).camax())
    }
}

impl GreenFunction for RecursiveGreen {
    fn discretization(&self) -> &BoundaryDiscretization {
        &self.state.bd
    }

    fn conditions(&self) -> &ResolvedConditions {
        &self.state.resolved
    }

    fn operator(&self) -> &OperatorSpec {
        self.state.fs.operator()
    }

    fn condition_estimate(&self) -> f64 {
        self.state.stage_conditions().into_iter().fold(1.0, f64::max)
    }

    fn method(&self) -> Method {
        Method::Recursive
    }

    fn free_space(&self) -> &dyn Kernel {
        &self.state.fs
    }

    fn target(&self, x: &Point) -> Result<Target> {
        let st = &self.state;
        st.bd.domain().check_interior(x)?;
        let (rows, _) = st.rows_from(potential::potential_row(&st.fs, &st.bd, x)?);
        Ok(Target { rows })
    }

    fn target_derivative(&self, x: &Point, u: &[f64]) -> Result<Target> {
        let st = &self.state;
        st.bd.domain().check_interior(x)?;
        let (rows, _) = st.rows_from(potential::potential_row_derivative(&st.fs, &st.bd, x, u)?);
        Ok(Target { rows })
    }

    fn source(&self, xp: &Point) -> Result<Density> {
        let st = &self.state;
        st.bd.domain().check_interior(xp)?;
        let (parts, _) = st.source_from(potential::source_trace(&st.fs, &st.bd, xp)?)?;
        Ok(Density { parts })
    }

    fn data_density(&self, phi: &SpinorBoundaryFunction) -> Result<Density> {
        let st = &self.state;
        let ranges = st.resolved.row_ranges(Which::Direct);
        let stacked = phi.stacked();
        let rows = st.resolved.total_rows(Which::Direct);
        if stacked.len() != rows {
            return Err(Error::ShapeMismatch(format!(
                "boundary data has {} entries, conditions have {rows} rows",
                stacked.len()
            )));
        }
        let mut tau = CVector::zeros(st.bd.n_dof());
        let mut parts = Vec::with_capacity(st.stages.len());
        for (s, &idx) in st.stages.iter().zip(&st.order) {
            let r = &ranges[idx];
            let phi_j = stacked.rows(r.start, r.len()).into_owned();
            let c = s.inverse.solve_vec(&(phi_j - &s.b * &tau))?;
            tau += &s.tp * &c;
            parts.push(c);
        }
        Ok(Density { parts })
    }

    fn density_trace(&self, d: &Density) -> CVector {
        let mut out = CVector::zeros(self.state.bd.n_dof());
        for (s, c) in self.state.stages.iter().zip(&d.parts) {
            out += &s.tp * c;
        }
        out
    }
}

/// Recursive construction imposing the conditions in their given order.
pub fn recursive_green(fs: &FundamentalSolution, bcs: &BoundaryConditionSet, bd: &BoundaryDiscretization) -> Result<RecursiveGreen> {
    let order: Vec<usize> = (0..bcs.m()).collect();
    recursive_green_ordered(fs, bcs, bd, &order)
}

/// Recursive construction imposing condition `order[0]` first, then `order[1]`, ...
pub fn recursive_green_ordered(
    fs: &FundamentalSolution,
    bcs: &BoundaryConditionSet,
    bd: &BoundaryDiscretization,
    order: &[usize],
) -> Result<RecursiveGreen> {
    RecursiveState::new(fs, bcs, bd, order)?.finish()
}
