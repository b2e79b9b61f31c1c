//! Independent references: closed-form Green functions, a finite-difference
//! two-point BVP solver, and a jump checker. Nothing here goes through the
//! boundary construction, so these can judge it.

pub mod suite;

use std::f64::consts::PI;

use crate::boundary::BoundaryCondition;
use crate::bvp::{BoundaryData, BoundaryDatum, SourceField};
use crate::fundamental::OperatorSpec;
use crate::geometry::Point;
use crate::{Error, Result, C64};

/// Distance from an eigenvalue below which a reference is refused.
const EIGEN_MARGIN: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AnalyticGreen {
    /// u″ + k²u on (a, b), u(a) = u(b) = 0.
    DirichletHelmholtz1D { k: f64, a: f64, b: f64 },
    /// u″ + k²u on (0, L), periodic.
    PeriodicHelmholtz1D { k: f64, l: f64 },
    /// Δu on the disk |x| < radius centred at the origin, u = 0 on the circle.
    DiskDirichletLaplace { radius: f64 },
}

fn near_multiple(x: f64, period: f64) -> bool {
    let r = (x / period).round();
    r != 0.0 && (x - r * period).abs() < EIGEN_MARGIN
}

impl AnalyticGreen {
    pub fn dirichlet_helmholtz_1d(k: f64, a: f64, b: f64) -> Result<Self> {
        if !(b > a) || !(k > 0.0) {
            return Err(Error::InvalidArgument("need k > 0 and a < b".into()));
        }
        if near_multiple(k * (b - a), PI) {
            return Err(Error::EigenvalueParameters(format!("k(b - a) = {} is a multiple of pi", k * (b - a))));
        }
        Ok(AnalyticGreen::DirichletHelmholtz1D { k, a, b })
    }

    pub fn periodic_helmholtz_1d(k: f64, l: f64) -> Result<Self> {
        if !(l > 0.0) || !(k > 0.0) {
            return Err(Error::InvalidArgument("need k > 0 and L > 0".into()));
        }
        if near_multiple(k * l, 2.0 * PI) {
            return Err(Error::EigenvalueParameters(format!("kL = {} is a multiple of 2 pi", k * l)));
        }
        Ok(AnalyticGreen::PeriodicHelmholtz1D { k, l })
    }

    pub fn disk_dirichlet_laplace(radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::InvalidArgument("radius must be positive".into()));
        }
        Ok(AnalyticGreen::DiskDirichletLaplace { radius })
    }

    pub fn dim(&self) -> usize {
        match self {
            AnalyticGreen::DiskDirichletLaplace { .. } => 2,
            _ => 1,
        }
    }

    pub fn operator(&self) -> OperatorSpec {
        match *self {
            AnalyticGreen::DirichletHelmholtz1D { k, .. } | AnalyticGreen::PeriodicHelmholtz1D { k, .. } => {
                OperatorSpec::helmholtz_1d(k)
            }
            AnalyticGreen::DiskDirichletLaplace { .. } => OperatorSpec::Laplace2D,
        }
    }

    fn check(&self, p: &Point) -> Result<()> {
        let inside = match *self {
            AnalyticGreen::DirichletHelmholtz1D { a, b, .. } => p.dim() == 1 && p.x() >= a && p.x() <= b,
            AnalyticGreen::PeriodicHelmholtz1D { l, .. } => p.dim() == 1 && p.x() >= 0.0 && p.x() <= l,
            AnalyticGreen::DiskDirichletLaplace { radius } => {
                p.dim() == 2 && p.x().hypot(p.y()) <= radius * (1.0 + 1e-14)
            }
        };
        if inside {
            Ok(())
        } else {
            Err(Error::PointOutsideDomain(p.coords().to_vec()))
        }
    }

    pub fn eval(&self, x: &Point, xp: &Point) -> Result<C64> {
        self.check(x)?;
        self.check(xp)?;
        let g = match *self {
            AnalyticGreen::DirichletHelmholtz1D { k, a, b } => {
                let (lo, hi) = if x.x() <= xp.x() { (x.x(), xp.x()) } else { (xp.x(), x.x()) };
                -(k * (lo - a)).sin() * (k * (b - hi)).sin() / (k * (k * (b - a)).sin())
            }
            AnalyticGreen::PeriodicHelmholtz1D { k, l } => {
                (k * ((x.x() - xp.x()).abs() - l / 2.0)).cos() / (2.0 * k * (k * l / 2.0).sin())
            }
            AnalyticGreen::DiskDirichletLaplace { radius } => {
                let r = x.distance(xp);
                if r == 0.0 {
                    return Err(Error::SingularEvaluation("x = x'".into()));
                }
                let s2 = xp.x() * xp.x() + xp.y() * xp.y();
                let image = if s2 == 0.0 {
                    // image at infinity: |x′|·|x − x′*| → radius²
                    radius
                } else {
                    let f = radius * radius / s2;
                    s2.sqrt() * (x.x() - f * xp.x()).hypot(x.y() - f * xp.y()) / radius
                };
                (r.ln() - image.ln()) / (2.0 * PI)
            }
        };
        Ok(C64::new(g, 0.0))
    }

    /// ∂G/∂x in 1D, one-sided at coincidence (side = +1 from the right).
    pub fn eval_dx(&self, x: f64, xp: f64, side: f64) -> Result<C64> {
        self.check(&Point::d1(x))?;
        self.check(&Point::d1(xp))?;
        let right = x > xp || (x == xp && side > 0.0);
        let d = match *self {
            AnalyticGreen::DirichletHelmholtz1D { k, a, b } => {
                let den = k * (k * (b - a)).sin();
                if right {
                    (k * (xp - a)).sin() * k * (k * (b - x)).cos() / den
                } else {
                    -k * (k * (x - a)).cos() * (k * (b - xp)).sin() / den
                }
            }
            AnalyticGreen::PeriodicHelmholtz1D { k, l } => {
                let s = if right { 1.0 } else { -1.0 };
                -s * k * (k * ((x - xp).abs() - l / 2.0)).sin() / (2.0 * k * (k * l / 2.0).sin())
            }
            AnalyticGreen::DiskDirichletLaplace { .. } => {
                return Err(Error::Unsupported("x-derivative is provided for the 1D references".into()))
            }
        };
        Ok(C64::new(d, 0.0))
    }
}

/// Central-difference solver for u″ + z u = f on [a, b] with two `Local1D` rows.
#[derive(Debug, Clone, PartialEq)]
pub struct FdSolver1D {
    operator: OperatorSpec,
    a: f64,
    b: f64,
    rows: [[C64; 4]; 2],
    n: usize,
}

impl FdSolver1D {
    pub fn new(operator: OperatorSpec, a: f64, b: f64, rows: &[BoundaryCondition], n: usize) -> Result<Self> {
        operator.validate()?;
        if operator.dim() != 1 {
            return Err(Error::Unsupported("finite differences are 1D only".into()));
        }
        if !(b > a) {
            return Err(Error::InvalidDomain(format!("interval ({a}, {b})")));
        }
        if n < 100 {
            return Err(Error::InvalidArgument(format!("grid size {n} below 100")));
        }
        if rows.len() != 2 {
            return Err(Error::InvalidCondition(format!("{} rows for a second-order operator", rows.len())));
        }
        let mut r = [[C64::new(0.0, 0.0); 4]; 2];
        for (dst, row) in r.iter_mut().zip(rows) {
            match *row {
                BoundaryCondition::Local1D { a0, a1, b0, b1 } => *dst = [a0, a1, b0, b1],
                _ => return Err(Error::InvalidCondition("finite differences take Local1D rows".into())),
            }
        }
        Ok(Self { operator, a, b, rows: r, n })
    }

    pub fn grid_size(&self) -> usize {
        self.n
    }

    pub fn step(&self) -> f64 {
        (self.b - self.a) / self.n as f64
    }
}

/// Grid values of a finite-difference solution.
#[derive(Debug, Clone, PartialEq)]
pub struct FdSolution {
    pub grid: Vec<f64>,
    pub values: Vec<C64>,
}

impl FdSolution {
    /// Cubic Lagrange interpolation on the four nearest grid points.
    pub fn interpolate(&self, x: f64) -> C64 {
        let n = self.grid.len();
        let (a, b) = (self.grid[0], self.grid[n - 1]);
        let h = (b - a) / (n - 1) as f64;
        let i = (((x - a) / h).floor() as isize - 1).clamp(0, n as isize - 4) as usize;
        let mut acc = C64::new(0.0, 0.0);
        for j in i..i + 4 {
            let mut l = 1.0;
            for m in i..i + 4 {
                if m != j {
                    l *= (x - self.grid[m]) / (self.grid[j] - self.grid[m]);
                }
            }
            acc += self.values[j] * l;
        }
        acc
    }
}

/// Thomas algorithm for a constant-coefficient tridiagonal system (off-diagonals 1).
fn tridiagonal(diag: C64, rhs: &[C64]) -> Result<Vec<C64>> {
    let n = rhs.len();
    let mut c = vec![C64::new(0.0, 0.0); n];
    let mut d = vec![C64::new(0.0, 0.0); n];
    let mut prev_c = C64::new(0.0, 0.0);
    let mut prev_d = C64::new(0.0, 0.0);
    for i in 0..n {
        let piv = diag - prev_c;
        if piv.norm() < 1e-14 {
            return Err(Error::SingularSystem("zero pivot in the interior equations".into()));
        }
        c[i] = C64::new(1.0, 0.0) / piv;
        d[i] = (rhs[i] - prev_d) / piv;
        prev_c = c[i];
        prev_d = d[i];
    }
    for i in (0..n - 1).rev() {
        let next = d[i + 1];
        d[i] -= c[i] * next;
    }
    Ok(d)
}

/// Solves the discretized problem. The interior equations are tridiagonal; the
/// two endpoint values are eliminated through a 2×2 system built from the
/// boundary rows with second-order one-sided derivative stencils.
pub fn fd_solve(solver: &FdSolver1D, f: &SourceField, phi: &BoundaryData) -> Result<FdSolution> {
    f.validate(1)?;
    if phi.components.len() != 2 {
        return Err(Error::ShapeMismatch(format!("{} boundary data components for 2 rows", phi.components.len())));
    }
    let data: Vec<C64> = phi
        .components
        .iter()
        .map(|d| match d {
            BoundaryDatum::Constant(v) => Ok(*v),
            BoundaryDatum::Values(v) if v.len() == 1 => Ok(v[0]),
            BoundaryDatum::Values(_) => Err(Error::ShapeMismatch("each 1D row takes one value".into())),
        })
        .collect::<Result<_>>()?;

    let n = solver.n;
    let h = solver.step();
    let grid: Vec<f64> = (0..=n).map(|i| solver.a + h * i as f64).collect();
    let diag = C64::new(-2.0, 0.0) + solver.operator.zeroth_order() * (h * h);
    let zero = C64::new(0.0, 0.0);
    let m = n - 1;

    let rhs: Vec<C64> = grid[1..n].iter().map(|&x| f.eval(&Point::d1(x)) * (h * h)).collect();
    let p = tridiagonal(diag, &rhs)?;
    let mut e = vec![zero; m];
    e[0] = C64::new(-1.0, 0.0);
    let h0 = tridiagonal(diag, &e)?;
    e[0] = zero;
    e[m - 1] = C64::new(-1.0, 0.0);
    let hn = tridiagonal(diag, &e)?;

    // u_i = p_i + u_0 h0_i + u_N hn_i for interior i; boundary row as α + β u_0 + γ u_N
    let interior = |v: &[C64], i: usize| v[i - 1];
    let mut sys = [[zero; 2]; 2];
    let mut b = [zero; 2];
    for (r, row) in solver.rows.iter().enumerate() {
        let [a0, a1, b0, b1] = *row;
        let (ca, cb) = (a1 / (2.0 * h), b1 / (2.0 * h));
        // affine parts of the stencils: (const, coeff of u_0, coeff of u_N)
        let lin = |i: usize| -> [C64; 3] {
            if i == 0 {
                [zero, C64::new(1.0, 0.0), zero]
            } else if i == n {
                [zero, zero, C64::new(1.0, 0.0)]
            } else {
                [interior(&p, i), interior(&h0, i), interior(&hn, i)]
            }
        };
        let mut acc = [zero; 3];
        let terms = [
            (0, a0 - 3.0 * ca),
            (1, 4.0 * ca),
            (2, -ca),
            (n, b0 + 3.0 * cb),
            (n - 1, -4.0 * cb),
            (n - 2, cb),
        ];
        for (i, w) in terms {
            let l = lin(i);
            for k in 0..3 {
                acc[k] += w * l[k];
            }
        }
        sys[r] = [acc[1], acc[2]];
        b[r] = data[r] - acc[0];
    }
    let det = sys[0][0] * sys[1][1] - sys[0][1] * sys[1][0];
    let scale = sys.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max);
    if det.norm() <= 1e-13 * scale * scale {
        return Err(Error::SingularSystem("boundary rows are dependent".into()));
    }
    let u0 = (b[0] * sys[1][1] - sys[0][1] * b[1]) / det;
    let un = (sys[0][0] * b[1] - sys[1][0] * b[0]) / det;

    let mut values = Vec::with_capacity(n + 1);
    values.push(u0);
    for i in 1..n {
        values.push(interior(&p, i) + u0 * interior(&h0, i) + un * interior(&hn, i));
    }
    values.push(un);
    Ok(FdSolution { grid, values })
}

/// |∂ₓG(x′⁺) − ∂ₓG(x′⁻) − 1| from one-sided second-order differences of
/// `g(x) = G(x, x′)` at step `h`.
pub fn jump_check<F>(g: F, xp: f64, h: f64) -> f64
where
    F: Fn(f64) -> C64,
{
    let g0 = g(xp);
    let right = (-3.0 * g0 + 4.0 * g(xp + h) - g(xp + 2.0 * h)) / (2.0 * h);
    let left = (3.0 * g0 - 4.0 * g(xp - h) + g(xp - 2.0 * h)) / (2.0 * h);
    (right - left - 1.0).norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::BoundaryConditionSet;
    use crate::fundamental::FundamentalSolution;
    use crate::fundamental::Kernel;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn dirichlet_rows() -> Vec<BoundaryCondition> {
        BoundaryConditionSet::dirichlet_1d().conditions().to_vec()
    }

    #[test]
    fn analytic_examples() {
        let d = AnalyticGreen::dirichlet_helmholtz_1d(1.0, 0.0, 1.0).unwrap();
        let g = d.eval(&Point::d1(0.25), &Point::d1(0.75)).unwrap();
        assert!((g.re + 0.25f64.sin().powi(2) / 1f64.sin()).abs() < 1e-15);
        assert!((g.re + 0.0727401).abs() < 1e-7);
        let p = AnalyticGreen::periodic_helmholtz_1d(1.0, 1.0).unwrap();
        let g = p.eval(&Point::d1(0.2), &Point::d1(0.7)).unwrap();
        assert!((g.re - 1.042915).abs() < 1e-6);
        let disk = AnalyticGreen::disk_dirichlet_laplace(1.0).unwrap();
        let g = disk.eval(&Point::d2(0.5, 0.0), &Point::d2(0.0, 0.0)).unwrap();
        assert!((g.re - 0.5f64.ln() / (2.0 * PI)).abs() < 1e-15);
        assert!((g.re + 0.110318).abs() < 1e-6);
    }

    #[test]
    fn eigenvalue_parameters_are_refused() {
        assert!(matches!(
            AnalyticGreen::dirichlet_helmholtz_1d(PI, 0.0, 1.0),
            Err(Error::EigenvalueParameters(_))
        ));
        assert!(matches!(
            AnalyticGreen::periodic_helmholtz_1d(2.0 * PI, 1.0),
            Err(Error::EigenvalueParameters(_))
        ));
        assert!(AnalyticGreen::dirichlet_helmholtz_1d(1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn references_have_unit_jump() {
        let d = AnalyticGreen::dirichlet_helmholtz_1d(1.0, 0.0, 1.0).unwrap();
        let p = AnalyticGreen::periodic_helmholtz_1d(1.0, 1.0).unwrap();
        for r in [d, p] {
            for xp in [0.3, 0.5, 0.71] {
                let j = jump_check(|x| r.eval(&Point::d1(x), &Point::d1(xp)).unwrap(), xp, 1e-5);
                assert!(j < 1e-7, "{r:?} {xp} {j}");
                let exact = r.eval_dx(xp, xp, 1.0).unwrap() - r.eval_dx(xp, xp, -1.0).unwrap();
                assert!((exact - 1.0).norm() < 1e-14);
            }
        }
        let e = FundamentalSolution::new(OperatorSpec::helmholtz_1d(1.0)).unwrap();
        let j = jump_check(|x| e.value(&Point::d1(x), &Point::d1(0.4)).unwrap(), 0.4, 1e-5);
        assert!(j < 1e-8);
    }

    #[test]
    fn references_satisfy_their_conditions() {
        let d = AnalyticGreen::dirichlet_helmholtz_1d(1.3, -0.5, 1.0).unwrap();
        for xp in [-0.2, 0.4] {
            assert!(d.eval(&Point::d1(-0.5), &Point::d1(xp)).unwrap().norm() < 1e-15);
            assert!(d.eval(&Point::d1(1.0), &Point::d1(xp)).unwrap().norm() < 1e-15);
        }
        let p = AnalyticGreen::periodic_helmholtz_1d(1.0, 2.0).unwrap();
        let xp = 0.7;
        let (g0, g1) = (p.eval(&Point::d1(0.0), &Point::d1(xp)).unwrap(), p.eval(&Point::d1(2.0), &Point::d1(xp)).unwrap());
        assert!((g0 - g1).norm() < 1e-14);
        let (d0, d1) = (p.eval_dx(0.0, xp, 1.0).unwrap(), p.eval_dx(2.0, xp, 1.0).unwrap());
        assert!((d0 - d1).norm() < 1e-14);
        let disk = AnalyticGreen::disk_dirichlet_laplace(2.0).unwrap();
        for t in [0.0, 1.0, 2.5] {
            let on = Point::d2(2.0 * f64::cos(t), 2.0 * f64::sin(t));
            assert!(disk.eval(&on, &Point::d2(0.3, -0.8)).unwrap().norm() < 1e-14);
        }
    }

    #[test]
    fn disk_reference_is_symmetric_and_harmonic() {
        let disk = AnalyticGreen::disk_dirichlet_laplace(1.0).unwrap();
        let (x, xp) = (Point::d2(0.2, 0.3), Point::d2(-0.5, 0.1));
        assert!((disk.eval(&x, &xp).unwrap() - disk.eval(&xp, &x).unwrap()).norm() < 1e-14);
        let h = 1e-3;
        let lap = [(h, 0.0), (-h, 0.0), (0.0, h), (0.0, -h)]
            .iter()
            .map(|(dx, dy)| disk.eval(&Point::d2(x.x() + dx, x.y() + dy), &xp).unwrap())
            .sum::<C64>()
            - disk.eval(&x, &xp).unwrap() * 4.0;
        assert!((lap / (h * h)).norm() < 1e-5);
    }

    #[test]
    fn fd_examples() {
        let s = FdSolver1D::new(OperatorSpec::helmholtz_1d(1.0), 0.0, 1.0, &dirichlet_rows(), 2000).unwrap();
        let u = fd_solve(&s, &SourceField::Constant { c: c(1.0) }, &BoundaryData::zeros(2)).unwrap();
        let exact = 1.0 + (1f64.cos() - 1.0) / 1f64.sin() * 0.5f64.sin() - 0.5f64.cos();
        assert!((u.interpolate(0.5).re - exact).abs() < 5e-7);
        let s = FdSolver1D::new(OperatorSpec::modified_helmholtz_1d(1.0), 0.0, 1.0, &dirichlet_rows(), 2000).unwrap();
        let u = fd_solve(&s, &SourceField::Zero, &BoundaryData::constants(&[c(1.0), c(0.0)])).unwrap();
        let exact = 0.5f64.sinh() / 1f64.sinh();
        assert!((u.interpolate(0.5).re - exact).abs() < 5e-7);
        assert!((exact - 0.443409).abs() < 1e-6);
        let u = fd_solve(&s, &SourceField::Zero, &BoundaryData::zeros(2)).unwrap();
        assert!(u.values.iter().all(|v| *v == c(0.0)));
        assert_eq!(u.grid.len(), 2001);
    }

    #[test]
    fn fd_second_order_convergence() {
        // u″ − u = 0, u(0) − u′(0) = 0, u(1) + u′(1) = 2e: u = eˣ
        let rows = [BoundaryCondition::local_1d(1.0, -1.0, 0.0, 0.0), BoundaryCondition::local_1d(0.0, 0.0, 1.0, 1.0)];
        let phi = BoundaryData::constants(&[c(0.0), c(2.0 * 1f64.exp())]);
        let err = |n: usize| {
            let s = FdSolver1D::new(OperatorSpec::modified_helmholtz_1d(1.0), 0.0, 1.0, &rows, n).unwrap();
            let u = fd_solve(&s, &SourceField::Zero, &phi).unwrap();
            u.grid.iter().zip(&u.values).map(|(x, v)| (v.re - x.exp()).abs()).fold(0.0, f64::max)
        };
        let (e1, e2) = (err(200), err(400));
        let order = (e1 / e2).log2();
        assert!(order >= 1.9, "{order}");
    }

    #[test]
    fn fd_periodic_source() {
        // u″ + 4u = sin(2π x) periodic on (0,1): u = sin(2πx)/(4 − 4π²)
        let rows = BoundaryConditionSet::periodic_1d().conditions().to_vec();
        let s = FdSolver1D::new(OperatorSpec::helmholtz_1d(2.0), 0.0, 1.0, &rows, 1000).unwrap();
        let f = SourceField::Sine { amplitude: c(1.0), wavenumber: vec![2.0 * PI], phase: 0.0 };
        let u = fd_solve(&s, &f, &BoundaryData::zeros(2)).unwrap();
        for x in [0.1, 0.35, 0.8] {
            let exact = (2.0 * PI * x).sin() / (4.0 - 4.0 * PI * PI);
            assert!((u.interpolate(x).re - exact).abs() < 1e-6);
        }
    }

    #[test]
    fn fd_rejects_bad_input() {
        let op = OperatorSpec::helmholtz_1d(1.0);
        assert!(FdSolver1D::new(op, 0.0, 1.0, &dirichlet_rows(), 50).is_err());
        assert!(FdSolver1D::new(op, 0.0, 1.0, &dirichlet_rows()[..1], 200).is_err());
        assert!(FdSolver1D::new(OperatorSpec::Laplace2D, 0.0, 1.0, &dirichlet_rows(), 200).is_err());
        // two copies of the same row
        let same = vec![BoundaryCondition::local_1d(1.0, 0.0, 0.0, 0.0); 2];
        let s = FdSolver1D::new(op, 0.0, 1.0, &same, 200).unwrap();
        assert!(matches!(fd_solve(&s, &SourceField::Zero, &BoundaryData::zeros(2)), Err(Error::SingularSystem(_))));
    }
}
