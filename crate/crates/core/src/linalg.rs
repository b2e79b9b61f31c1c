//! Dense factorizations with conditioning diagnostics.

use nalgebra::{Dyn, LU};

use crate::{CMatrix, CRowVector, CVector, Error, Result, ILL_POSED_THRESHOLD};

/// Singular values at or below this fraction of the largest are treated as null.
const NULL_RTOL: f64 = 1e-12;
/// Relative size allowed for the null-space components of probe vectors.
const PROBE_RTOL: f64 = 1e-8;

pub(crate) fn one_norm(a: &CMatrix) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Vectors used to decide whether a numerically singular matrix is still usable:
/// right-hand sides the solve will see (`left`) and rows the solution will be
/// contracted with (`right`). A null space invisible to both is harmless.
pub(crate) struct Probes {
    pub left: Vec<CVector>,
    pub right: Vec<CRowVector>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum FactorError {
    /// LU broke down.
    Singular { condition: f64 },
    /// Condition above threshold and the null space is not benign.
    IllConditioned { condition: f64 },
}

impl FactorError {
    pub fn into_error(self) -> Error {
        match self {
            FactorError::Singular { condition } => Error::SingularMatrix { condition },
            FactorError::IllConditioned { condition } => Error::IllPosed { condition },
        }
    }

    pub fn condition(&self) -> f64 {
        match *self {
            FactorError::Singular { condition } | FactorError::IllConditioned { condition } => {
                condition
            }
        }
    }
}

#[derive(Debug, Clone)]
enum Kind {
    Lu(LU<crate::C64, Dyn, Dyn>),
    Deflated { pinv: CMatrix, left_null: CMatrix },
}

#[derive(Debug, Clone)]
pub(crate) struct Inverse {
    kind: Kind,
    condition: f64,
}

impl Inverse {
    /// `scale` is the size of the products `a` was formed from; a matrix much
    /// smaller than its factors counts as singular even if it is well conditioned
    /// on its own (a 1×1 rounding residue, for instance).
    pub fn new<F>(a: &CMatrix, scale: f64, probes: F) -> std::result::Result<Self, FactorError>
    where
        F: FnOnce() -> Result<Probes>,
    {
        assert!(a.is_square());
        let scale = scale.max(one_norm(a));
        let lu = a.clone().lu();
        let inv = lu.try_inverse();
        let condition = match &inv {
            Some(inv) => {
                let c = scale * one_norm(inv);
                if c.is_finite() {
                    c.max(1.0)
                } else {
                    f64::INFINITY
                }
            }
            None => f64::INFINITY,
        };
        if condition <= ILL_POSED_THRESHOLD {
            return Ok(Self { kind: Kind::Lu(lu), condition });
        }
        Self::deflate(a, scale, probes).ok_or(if inv.is_none() {
            FactorError::Singular { condition }
        } else {
            FactorError::IllConditioned { condition }
        })
    }

    fn deflate<F>(a: &CMatrix, scale: f64, probes: F) -> Option<Self>
    where
        F: FnOnce() -> Result<Probes>,
    {
        let svd = a.clone().svd(true, true);
        let u = svd.u.as_ref()?;
        let v_t = svd.v_t.as_ref()?;
        let sigma = &svd.singular_values;
        let keep: Vec<usize> = (0..sigma.len()).filter(|&i| sigma[i] > NULL_RTOL * scale).collect();
        let null: Vec<usize> = (0..sigma.len()).filter(|&i| sigma[i] <= NULL_RTOL * scale).collect();
        if null.is_empty() {
            return None;
        }
        let left_null = u.select_columns(&null);
        let right_null = v_t.select_rows(&null).adjoint();

        let probes = probes().ok()?;
        for l in &probes.left {
            if (left_null.adjoint() * l).norm() > PROBE_RTOL * l.norm().max(f64::MIN_POSITIVE) {
                return None;
            }
        }
        for r in &probes.right {
            if (r * &right_null).norm() > PROBE_RTOL * r.norm().max(f64::MIN_POSITIVE) {
                return None;
            }
        }

        let n = a.nrows();
        let mut pinv = CMatrix::zeros(n, n);
        let mut smin = f64::INFINITY;
        for &i in &keep {
            smin = smin.min(sigma[i]);
            let ui = u.column(i);
            let vi = v_t.row(i).adjoint();
            pinv += (vi * ui.adjoint()).unscale(sigma[i]);
        }
        // condition of the restriction to the range; a zero matrix acts trivially
        let condition = if keep.is_empty() { 1.0 } else { (scale / smin).max(1.0) };
        Some(Self {
            kind: Kind::Deflated { pinv, left_null },
            condition,
        })
    }

    pub fn condition(&self) -> f64 {
        self.condition
    }

    pub fn is_deflated(&self) -> bool {
        matches!(self.kind, Kind::Deflated { .. })
    }

    /// Solves a x = b; on a deflated matrix, b must lie in the range.
    pub fn solve(&self, b: &CMatrix) -> Result<CMatrix> {
        match &self.kind {
            Kind::Lu(lu) => lu.solve(b).ok_or(Error::SingularMatrix {
                condition: self.condition,
            }),
            Kind::Deflated { pinv, left_null } => {
                for col in b.column_iter() {
                    let bn = col.norm();
                    let off = (left_null.adjoint() * col).norm();
                    if bn > 0.0 && off > PROBE_RTOL * bn {
                        return Err(Error::Inconsistent { residual: off / bn });
                    }
                }
                Ok(pinv * b)
            }
        }
    }

    /// Solves without the range check of a deflated matrix (least-squares part).
    pub fn solve_unchecked(&self, b: &CMatrix) -> CMatrix {
        match &self.kind {
            Kind::Lu(lu) => lu.solve(b).unwrap_or_else(|| CMatrix::from_element(b.nrows(), b.ncols(), crate::C64::new(f64::NAN, 0.0))),
            Kind::Deflated { pinv, .. } => pinv * b,
        }
    }

    pub fn solve_vec_unchecked(&self, b: &CVector) -> CVector {
        self.solve_unchecked(&CMatrix::from_column_slice(b.len(), 1, b.as_slice())).column(0).into_owned()
    }

    pub fn solve_vec(&self, b: &CVector) -> Result<CVector> {
        let m = self.solve(&CMatrix::from_column_slice(b.len(), 1, b.as_slice()))?;
        Ok(m.column(0).into_owned())
    }
}
