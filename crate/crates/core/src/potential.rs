//! Boundary potentials on a discretized boundary.
//!
//! Densities live in the flattened boundary space of [`BoundaryDiscretization`]:
//! `channels × nodes` entries, values first, then (1D only) derivative data. The
//! potential of a density `d` at an interior point x is
//!
//! ```text
//! Σ_c w_c [ K(x, ȳ_c) d_c + ∂_ȳ K(x, ȳ_c)·ν_c d_{N+c} ]
//! ```
//!
//! and its boundary trace (value and derivative channel, approached from the
//! interior) is `trace_matrix · d`.

use std::f64::consts::PI;

use crate::fundamental::Kernel;
use crate::geometry::{BoundaryDiscretization, Curve, Point};
use crate::{CMatrix, CRowVector, CVector, Error, Result, C64};

fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

/// Row of the Kress product-integration weights for ln(4 sin²((t − τ)/2)) at an
/// arbitrary parameter `t`, for 2n equispaced nodes.
fn log_weights(t: f64, params: &[f64]) -> Vec<f64> {
    let n = params.len() / 2;
    let nf = n as f64;
    params
        .iter()
        .map(|&tc| {
            let s = t - tc;
            let mut acc = 0.0;
            for m in 1..n {
                acc += (m as f64 * s).cos() / m as f64;
            }
            -2.0 * PI / nf * acc - PI / (nf * nf) * (nf * s).cos()
        })
        .collect()
}

/// Smooth remainder ln|γ(t) − γ(τ)| − ½ ln(4 sin²((t − τ)/2)).
fn log_remainder(curve: &Curve, t: f64, tau: f64) -> f64 {
    let s = t - tau;
    let half = (0.5 * s).sin();
    if half.abs() < 1e-14 {
        return curve.speed(t).ln();
    }
    let [x1, y1] = curve.point(t);
    let [x2, y2] = curve.point(tau);
    let d2 = (x1 - x2).powi(2) + (y1 - y2).powi(2);
    0.5 * d2.ln() - 0.5 * (4.0 * half * half).ln()
}

fn single_layer_row(curve: &Curve, bd: &BoundaryDiscretization, t: f64) -> CRowVector {
    let params = bd.params();
    let n = params.len() / 2;
    let lw = log_weights(t, params);
    CRowVector::from_iterator(
        params.len(),
        params.iter().enumerate().map(|(c, &tc)| {
            let k2 = log_remainder(curve, t, tc);
            let v = (0.5 * lw[c] + PI / n as f64 * k2) * curve.speed(tc) / (2.0 * PI);
            C64::new(v, 0.0)
        }),
    )
}

/// Nyström matrix of the Laplace single layer S φ(x̄) = ∫ ln|x̄ − ȳ|/(2π) φ(ȳ) dS(ȳ)
/// on a closed curve, with the logarithmic singularity integrated exactly against
/// the trigonometric interpolant (Kress' product rule). Quadrature weights are
/// included, so `S · φ` approximates the integral directly.
pub fn laplace_single_layer(bd: &BoundaryDiscretization) -> Result<CMatrix> {
    let curve = bd
        .curve()
        .ok_or_else(|| Error::Unsupported("single layer needs a closed curve".into()))?;
    let n_nodes = bd.len();
    let mut s = CMatrix::zeros(n_nodes, n_nodes);
    for (r, &t) in bd.params().iter().enumerate() {
        s.set_row(r, &single_layer_row(curve, bd, t));
    }
    Ok(s)
}

/// Row evaluating the single-layer potential at the boundary point γ(t), for any
/// parameter t (not only nodes).
pub fn laplace_single_layer_at(bd: &BoundaryDiscretization, t: f64) -> Result<CRowVector> {
    let curve = bd
        .curve()
        .ok_or_else(|| Error::Unsupported("single layer needs a closed curve".into()))?;
    Ok(single_layer_row(curve, bd, t))
}

/// Interior-limit trace of the potential: maps a density to (value, derivative)
/// boundary data. 1D coincident derivatives are one-sided limits from the interior.
pub fn trace_matrix(k: &dyn Kernel, bd: &BoundaryDiscretization) -> Result<CMatrix> {
    let n = bd.len();
    let nodes = bd.nodes();
    let w = bd.weights();
    if bd.channels() == 1 {
        if let Some(s) = k.single_layer(bd) {
            return s;
        }
        let mut t = CMatrix::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                t[(r, c)] = k.value(&nodes[r], &nodes[c])? * w[c];
            }
        }
        return Ok(t);
    }
    let mut t = CMatrix::zeros(2 * n, 2 * n);
    for r in 0..n {
        let side = Some(bd.inward_sign(r));
        let u = bd.derivative_direction(r);
        for c in 0..n {
            let v = bd.derivative_direction(c);
            let (x, y) = (&nodes[r], &nodes[c]);
            t[(r, c)] = k.value(x, y)? * w[c];
            t[(r, n + c)] = k.d_second(x, y, v, side)? * w[c];
            t[(n + r, c)] = k.d_first(x, y, u, side)? * w[c];
            t[(n + r, n + c)] = k.d_mixed(x, y, u, v, side)? * w[c];
        }
    }
    Ok(t)
}

/// Trace of the source response when the source point tends to the boundary:
/// column c holds the boundary data (in the first argument) of K(·, ȳ_c) and of
/// its ȳ-derivative, with ȳ approached from the interior. No weights.
pub fn right_trace_matrix(k: &dyn Kernel, bd: &BoundaryDiscretization) -> Result<CMatrix> {
    let n = bd.len();
    if bd.channels() == 1 {
        let mut t = trace_matrix(k, bd)?;
        for c in 0..n {
            let wc = bd.weights()[c];
            t.column_mut(c).unscale_mut(wc);
        }
        return Ok(t);
    }
    let nodes = bd.nodes();
    let mut t = CMatrix::zeros(2 * n, 2 * n);
    for c in 0..n {
        let side = Some(-bd.inward_sign(c));
        let v = bd.derivative_direction(c);
        for r in 0..n {
            let u = bd.derivative_direction(r);
            let (x, y) = (&nodes[r], &nodes[c]);
            t[(r, c)] = k.value(x, y)?;
            t[(r, n + c)] = k.d_second(x, y, v, side)?;
            t[(n + r, c)] = k.d_first(x, y, u, side)?;
            t[(n + r, n + c)] = k.d_mixed(x, y, u, v, side)?;
        }
    }
    Ok(t)
}

/// Boundary data of K(·, x′) for an interior source x′.
pub fn source_trace(k: &dyn Kernel, bd: &BoundaryDiscretization, xp: &Point) -> Result<CVector> {
    let n = bd.len();
    let mut t = CVector::zeros(bd.n_dof());
    for (r, x) in bd.nodes().iter().enumerate() {
        t[r] = k.value(x, xp)?;
        if bd.channels() == 2 {
            t[n + r] = k.d_first(x, xp, bd.derivative_direction(r), None)?;
        }
    }
    Ok(t)
}

/// Row p(x) with p(x)·d the potential of density d at the interior point x.
pub fn potential_row(k: &dyn Kernel, bd: &BoundaryDiscretization, x: &Point) -> Result<CRowVector> {
    let n = bd.len();
    let w = bd.weights();
    let mut p = CRowVector::from_element(bd.n_dof(), zero());
    for (c, y) in bd.nodes().iter().enumerate() {
        p[c] = k.value(x, y)? * w[c];
        if bd.channels() == 2 {
            p[n + c] = k.d_second(x, y, bd.derivative_direction(c), None)? * w[c];
        }
    }
    Ok(p)
}

/// Derivative of [`potential_row`] with respect to x along `u`.
pub fn potential_row_derivative(
    k: &dyn Kernel,
    bd: &BoundaryDiscretization,
    x: &Point,
    u: &[f64],
) -> Result<CRowVector> {
    let n = bd.len();
    let w = bd.weights();
    let mut p = CRowVector::from_element(bd.n_dof(), zero());
    for (c, y) in bd.nodes().iter().enumerate() {
        p[c] = k.d_first(x, y, u, None)? * w[c];
        if bd.channels() == 2 {
            p[n + c] = k.d_mixed(x, y, u, bd.derivative_direction(c), None)? * w[c];
        }
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fundamental::{FundamentalSolution, OperatorSpec};
    use crate::geometry::{discretize_boundary, Domain};

    fn laplace() -> FundamentalSolution {
        FundamentalSolution::new(OperatorSpec::Laplace2D).unwrap()
    }

    #[test]
    fn single_layer_of_constant_on_circle() {
        // ∫ ln|x̄ − ȳ| dS/(2π) = R ln R on the circle of radius R
        for radius in [0.5, 1.0, 2.0] {
            let bd = discretize_boundary(&Domain::circle([0.3, -0.1], radius).unwrap(), 64).unwrap();
            let s = laplace_single_layer(&bd).unwrap();
            let ones = CVector::from_element(64, C64::new(1.0, 0.0));
            let v = &s * ones;
            for z in v.iter() {
                assert!((z.re - radius * radius.ln()).abs() < 1e-12, "{z}");
            }
        }
    }

    #[test]
    fn single_layer_of_fourier_mode_on_unit_circle() {
        // S cos(mθ) = −cos(mθ)/(2m) on the unit circle
        let bd = discretize_boundary(&Domain::circle([0.0, 0.0], 1.0).unwrap(), 64).unwrap();
        let s = laplace_single_layer(&bd).unwrap();
        for m in [1usize, 3, 7] {
            let phi = CVector::from_iterator(64, bd.params().iter().map(|&t| C64::new((m as f64 * t).cos(), 0.0)));
            let v = &s * &phi;
            for (r, &t) in bd.params().iter().enumerate() {
                let exact = -(m as f64 * t).cos() / (2.0 * m as f64);
                assert!((v[r].re - exact).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn single_layer_on_ellipse_matches_off_node_row() {
        let bd = discretize_boundary(&Domain::ellipse([0.0, 0.0], [1.5, 1.0]).unwrap(), 48).unwrap();
        let s = laplace_single_layer(&bd).unwrap();
        for r in [0, 5, 17] {
            let row = laplace_single_layer_at(&bd, bd.params()[r]).unwrap();
            for c in 0..48 {
                assert!((row[c] - s[(r, c)]).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn single_layer_converges_on_ellipse() {
        // potential of a smooth density at a fixed boundary point, N vs 2N
        let dom = Domain::ellipse([0.0, 0.0], [1.5, 1.0]).unwrap();
        let value = |n: usize| {
            let bd = discretize_boundary(&dom, n).unwrap();
            let row = laplace_single_layer_at(&bd, 0.9).unwrap();
            let phi = CVector::from_iterator(n, bd.params().iter().map(|&t| C64::new((2.0 * t).sin() + 1.0, 0.0)));
            (row * phi)[0]
        };
        let (a, b, c) = (value(32), value(64), value(128));
        assert!((b - c).norm() < 1e-10);
        assert!((a - c).norm() < 1e-5);
    }

    #[test]
    fn trace_matrix_is_limit_of_potential_1d() {
        let fs = FundamentalSolution::new(OperatorSpec::Helmholtz1D { k: C64::new(1.3, 0.2) }).unwrap();
        let bd = discretize_boundary(&Domain::interval(-0.5, 1.0).unwrap(), 2).unwrap();
        let t = trace_matrix(&fs, &bd).unwrap();
        let d = CVector::from_vec(vec![
            C64::new(1.0, 0.5),
            C64::new(-0.3, 0.2),
            C64::new(0.7, -1.0),
            C64::new(0.1, 0.4),
        ]);
        let trace = &t * &d;
        let eps = 1e-9;
        for (r, x) in [(0usize, -0.5 + eps), (1, 1.0 - eps)] {
            let p = Point::d1(x);
            let val = (potential_row(&fs, &bd, &p).unwrap() * &d)[0];
            let der = (potential_row_derivative(&fs, &bd, &p, &[1.0]).unwrap() * &d)[0];
            assert!((val - trace[r]).norm() < 1e-8);
            assert!((der - trace[2 + r]).norm() < 1e-8);
        }
    }

    #[test]
    fn right_trace_is_limit_of_source_trace_1d() {
        let fs = FundamentalSolution::new(OperatorSpec::modified_helmholtz_1d(1.7)).unwrap();
        let bd = discretize_boundary(&Domain::interval(0.0, 2.0).unwrap(), 2).unwrap();
        let tt = right_trace_matrix(&fs, &bd).unwrap();
        let eps = 1e-5;
        for (c, y) in [(0usize, eps), (1, 2.0 - eps)] {
            let col = source_trace(&fs, &bd, &Point::d1(y)).unwrap();
            for r in 0..4 {
                assert!((col[r] - tt[(r, c)]).norm() < 1e-4);
            }
            // ȳ-derivative column via central difference of the source trace
            let h = 1e-7;
            let dcol = (source_trace(&fs, &bd, &Point::d1(y + h)).unwrap()
                - source_trace(&fs, &bd, &Point::d1(y - h)).unwrap())
                / C64::new(2.0 * h, 0.0);
            for r in 0..4 {
                assert!((dcol[r] - tt[(r, 2 + c)]).norm() < 1e-4, "r={r} c={c}");
            }
        }
    }

    #[test]
    fn potential_row_2d_integrates_kernel() {
        let bd = discretize_boundary(&Domain::circle([0.0, 0.0], 1.0).unwrap(), 128).unwrap();
        let p = potential_row(&laplace(), &bd, &Point::d2(0.2, 0.3)).unwrap();
        // mean-value property: (1/2π) ∫ ln|x − ȳ| dS = 0 for |x| < 1 on the unit circle
        let total: C64 = p.iter().sum();
        assert!(total.norm() < 1e-12);
    }
}
