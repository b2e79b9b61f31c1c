//! Domains, boundary discretizations and volume quadrature.
//!
//! 1D boundaries are the two endpoints with unit (counting-measure) weights.
//! 2D boundaries come from a small analytic catalog of closed curves,
//! discretized with the periodic trapezoid rule in the curve parameter.

use std::f64::consts::PI;

use gauss_quad::legendre::GaussLegendre;

use crate::{Error, Result};

/// A point in 1 or 2 dimensions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    coords: [f64; 2],
    dim: usize,
}

impl Point {
    pub fn new(coords: &[f64]) -> Result<Self> {
        match coords {
            [x] if x.is_finite() => Ok(Self::d1(*x)),
            [x, y] if x.is_finite() && y.is_finite() => Ok(Self::d2(*x, *y)),
            [_] | [_, _] => Err(Error::InvalidArgument(format!(
                "non-finite coordinates {coords:?}"
            ))),
            _ => Err(Error::InvalidArgument(format!(
                "points must have 1 or 2 coordinates, got {}",
                coords.len()
            ))),
        }
    }

    pub fn d1(x: f64) -> Self {
        Self {
            coords: [x, 0.0],
            dim: 1,
        }
    }

    pub fn d2(x: f64, y: f64) -> Self {
        Self {
            coords: [x, y],
            dim: 2,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords[..self.dim]
    }

    pub fn x(&self) -> f64 {
        self.coords[0]
    }

    pub fn y(&self) -> f64 {
        self.coords[1]
    }

    /// `self - other`, padded with zeros to two components.
    pub fn diff(&self, other: &Point) -> [f64; 2] {
        [
            self.coords[0] - other.coords[0],
            self.coords[1] - other.coords[1],
        ]
    }

    pub fn distance(&self, other: &Point) -> f64 {
        let [dx, dy] = self.diff(other);
        dx.hypot(dy)
    }

    /// Shifts the point by `step` along `dir` (only the first `dim` entries of `dir` are used).
    pub fn offset(&self, dir: &[f64], step: f64) -> Point {
        let mut out = *self;
        for (c, d) in out.coords.iter_mut().zip(dir).take(self.dim) {
            *c += step * d;
        }
        out
    }
}

/// Closed curves with a 2π-periodic, positively oriented parametrization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Curve {
    Circle { center: [f64; 2], radius: f64 },
    Ellipse { center: [f64; 2], semi_axes: [f64; 2] },
}

impl Curve {
    pub fn period(&self) -> f64 {
        2.0 * PI
    }

    fn center(&self) -> [f64; 2] {
        match *self {
            Curve::Circle { center, .. } | Curve::Ellipse { center, .. } => center,
        }
    }

    fn axes(&self) -> [f64; 2] {
        match *self {
            Curve::Circle { radius, .. } => [radius, radius],
            Curve::Ellipse { semi_axes, .. } => semi_axes,
        }
    }

    fn validate(&self) -> Result<()> {
        let [cx, cy] = self.center();
        let [a, b] = self.axes();
        if !(cx.is_finite() && cy.is_finite()) {
            return Err(Error::InvalidDomain(format!("non-finite curve center {:?}", self.center())));
        }
        if !(a.is_finite() && b.is_finite() && a > 0.0 && b > 0.0) {
            return Err(Error::InvalidDomain(format!(
                "curve radii must be positive and finite, got {:?}",
                self.axes()
            )));
        }
        Ok(())
    }

    pub fn point(&self, t: f64) -> [f64; 2] {
        let [cx, cy] = self.center();
        let [a, b] = self.axes();
        [cx + a * t.cos(), cy + b * t.sin()]
    }

    /// γ'(t).
    pub fn tangent(&self, t: f64) -> [f64; 2] {
        let [a, b] = self.axes();
        [-a * t.sin(), b * t.cos()]
    }

    pub fn speed(&self, t: f64) -> f64 {
        let [tx, ty] = self.tangent(t);
        tx.hypot(ty)
    }

    pub fn outward_normal(&self, t: f64) -> [f64; 2] {
        let [tx, ty] = self.tangent(t);
        let s = tx.hypot(ty);
        [ty / s, -tx / s]
    }

    /// Normalized radial coordinate: < 1 inside, 1 on the curve, > 1 outside.
    fn level(&self, p: &Point) -> f64 {
        let [cx, cy] = self.center();
        let [a, b] = self.axes();
        ((p.x() - cx) / a).hypot((p.y() - cy) / b)
    }

    /// Distance to the curve (exact for circles, a lower bound for ellipses).
    fn distance(&self, p: &Point) -> f64 {
        match *self {
            Curve::Circle { center, radius } => {
                ((p.x() - center[0]).hypot(p.y() - center[1]) - radius).abs()
            }
            Curve::Ellipse { semi_axes, .. } => {
                (1.0 - self.level(p)).abs() * semi_axes[0].min(semi_axes[1])
            }
        }
    }

    pub fn area(&self) -> f64 {
        let [a, b] = self.axes();
        PI * a * b
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    Interval { a: f64, b: f64 },
    ClosedCurve(Curve),
}

impl Domain {
    pub fn interval(a: f64, b: f64) -> Result<Self> {
        let d = Domain::Interval { a, b };
        d.validate()?;
        Ok(d)
    }

    pub fn circle(center: [f64; 2], radius: f64) -> Result<Self> {
        let d = Domain::ClosedCurve(Curve::Circle { center, radius });
        d.validate()?;
        Ok(d)
    }

    pub fn ellipse(center: [f64; 2], semi_axes: [f64; 2]) -> Result<Self> {
        let d = Domain::ClosedCurve(Curve::Ellipse { center, semi_axes });
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Domain::Interval { a, b } => {
                if a.is_finite() && b.is_finite() && a < b {
                    Ok(())
                } else {
                    Err(Error::InvalidDomain(format!("interval requires a < b, got ({a}, {b})")))
                }
            }
            Domain::ClosedCurve(c) => c.validate(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Domain::Interval { .. } => 1,
            Domain::ClosedCurve(_) => 2,
        }
    }

    /// Distance from `p` to the boundary (for ellipses a lower bound).
    pub fn boundary_distance(&self, p: &Point) -> f64 {
        match self {
            Domain::Interval { a, b } => (p.x() - a).abs().min((p.x() - b).abs()),
            Domain::ClosedCurve(c) => c.distance(p),
        }
    }

    pub fn contains(&self, p: &Point) -> bool {
        if p.dim() != self.dim() {
            return false;
        }
        match self {
            Domain::Interval { a, b } => *a < p.x() && p.x() < *b,
            Domain::ClosedCurve(c) => c.level(p) < 1.0,
        }
    }

    /// Accepts interior points at least 1e-12 away from the boundary.
    pub fn check_interior(&self, p: &Point) -> Result<()> {
        if p.dim() != self.dim() {
            return Err(Error::ShapeMismatch(format!(
                "point of dimension {} in a {}D domain",
                p.dim(),
                self.dim()
            )));
        }
        if self.boundary_distance(p) < 1e-12 {
            return Err(Error::PointOnBoundary(p.coords().to_vec()));
        }
        if !self.contains(p) {
            return Err(Error::PointOutsideDomain(p.coords().to_vec()));
        }
        Ok(())
    }

    /// |Ω|: length in 1D, area in 2D.
    pub fn measure(&self) -> f64 {
        match self {
            Domain::Interval { a, b } => b - a,
            Domain::ClosedCurve(c) => c.area(),
        }
    }

    /// Fixed interior sample points, used to certify rank-deficient boundary operators.
    pub fn probe_points(&self) -> Vec<Point> {
        match *self {
            Domain::Interval { a, b } => [0.1371, 0.4129, 0.6883, 0.8647]
                .iter()
                .map(|s| Point::d1(a + (b - a) * s))
                .collect(),
            Domain::ClosedCurve(c) => {
                let [cx, cy] = c.center();
                let [ra, rb] = c.axes();
                [(0.31, 0.7), (0.47, 2.9), (0.23, 4.4), (0.52, 5.6), (0.12, 1.9)]
                    .iter()
                    .map(|&(r, phi): &(f64, f64)| {
                        Point::d2(cx + ra * r * phi.cos(), cy + rb * r * phi.sin())
                    })
                    .collect()
            }
        }
    }
}

/// Quadrature nodes on ∂Ω.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryDiscretization {
    domain: Domain,
    nodes: Vec<Point>,
    weights: Vec<f64>,
    params: Vec<f64>,
    normals: Vec<[f64; 2]>,
}

impl BoundaryDiscretization {
    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Curve parameters of the nodes (2D only, empty in 1D).
    pub fn params(&self) -> &[f64] {
        &self.params
    }

    /// Unit outward normals (2D only, empty in 1D).
    pub fn normals(&self) -> &[[f64; 2]] {
        &self.normals
    }

    /// Direction of the derivative channel at node `i`: +x in 1D (the endpoint
    /// calculus differentiates in x), the outward normal in 2D.
    pub fn derivative_direction(&self, i: usize) -> &[f64] {
        if self.dim() == 1 {
            &[1.0]
        } else {
            &self.normals[i][..]
        }
    }

    /// Sign of the inward direction along x at node `i` (1D only): +1 at a, -1 at b.
    pub fn inward_sign(&self, i: usize) -> f64 {
        if i == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// Channels per node in the flattened boundary space: value and x-derivative
    /// in 1D, value only in 2D.
    pub fn channels(&self) -> usize {
        if self.dim() == 1 {
            2
        } else {
            1
        }
    }

    pub fn n_dof(&self) -> usize {
        self.channels() * self.len()
    }

    pub fn curve(&self) -> Option<&Curve> {
        match &self.domain {
            Domain::ClosedCurve(c) => Some(c),
            Domain::Interval { .. } => None,
        }
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Discretizes ∂Ω. Intervals always give the two endpoints; closed curves need
/// an even node count.
pub fn discretize_boundary(domain: &Domain, n_nodes: usize) -> Result<BoundaryDiscretization> {
    domain.validate()?;
    if n_nodes < 2 {
        return Err(Error::InvalidArgument(format!("n_nodes must be >= 2, got {n_nodes}")));
    }
    match *domain {
        Domain::Interval { a, b } => Ok(BoundaryDiscretization {
            domain: *domain,
            nodes: vec![Point::d1(a), Point::d1(b)],
            weights: vec![1.0, 1.0],
            params: Vec::new(),
            normals: Vec::new(),
        }),
        Domain::ClosedCurve(curve) => {
            if n_nodes % 2 != 0 {
                return Err(Error::InvalidArgument(format!(
                    "closed curves need an even node count, got {n_nodes}"
                )));
            }
            let h = curve.period() / n_nodes as f64;
            let params: Vec<f64> = (0..n_nodes).map(|i| i as f64 * h).collect();
            let nodes = params
                .iter()
                .map(|&t| {
                    let [x, y] = curve.point(t);
                    Point::d2(x, y)
                })
                .collect();
            let weights = params.iter().map(|&t| curve.speed(t) * h).collect();
            let normals = params.iter().map(|&t| curve.outward_normal(t)).collect();
            Ok(BoundaryDiscretization {
                domain: *domain,
                nodes,
                weights,
                params,
                normals,
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VolumeQuadrature {
    domain: Domain,
    nodes: Vec<Point>,
    weights: Vec<f64>,
}

impl VolumeQuadrature {
    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Integrates `f` with this rule.
    pub fn integrate<F: FnMut(&Point) -> f64>(&self, mut f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(p, w)| w * f(p)).sum()
    }
}

/// Gauss–Legendre nodes and weights on [0, 1].
pub(crate) fn unit_gauss_legendre(n: usize) -> Result<Vec<(f64, f64)>> {
    let rule = GaussLegendre::new(n)
        .map_err(|e| Error::InvalidArgument(format!("Gauss-Legendre rule of order {n}: {e}")))?;
    let mut pairs: Vec<(f64, f64)> = rule
        .as_node_weight_pairs()
        .iter()
        .map(|&(x, w)| (0.5 * (x + 1.0), 0.5 * w))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(pairs)
}

/// Volume rule: Gauss–Legendre on intervals, and on curve domains a tensor polar
/// rule (Gauss–Legendre in radius, trapezoid in angle, `n_nodes` per axis)
/// mapped from the unit disk.
pub fn discretize_volume(domain: &Domain, n_nodes: usize) -> Result<VolumeQuadrature> {
    domain.validate()?;
    if n_nodes < 2 {
        return Err(Error::InvalidArgument(format!("n_nodes must be >= 2, got {n_nodes}")));
    }
    let gl = unit_gauss_legendre(n_nodes)?;
    let (nodes, weights) = match *domain {
        Domain::Interval { a, b } => gl
            .iter()
            .map(|&(s, w)| (Point::d1(a + (b - a) * s), (b - a) * w))
            .unzip(),
        Domain::ClosedCurve(curve) => {
            let [cx, cy] = curve.center();
            let [ra, rb] = curve.axes();
            let dtheta = 2.0 * PI / n_nodes as f64;
            let mut nodes = Vec::with_capacity(n_nodes * n_nodes);
            let mut weights = Vec::with_capacity(n_nodes * n_nodes);
            for &(r, wr) in &gl {
                for j in 0..n_nodes {
                    let theta = (j as f64 + 0.5) * dtheta;
                    nodes.push(Point::d2(cx + ra * r * theta.cos(), cy + rb * r * theta.sin()));
                    weights.push(ra * rb * r * wr * dtheta);
                }
            }
            (nodes, weights)
        }
    };
    Ok(VolumeQuadrature {
        domain: *domain,
        nodes,
        weights,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn interval_boundary_is_two_unit_weighted_endpoints() {
        let d = Domain::interval(0.0, 1.0).unwrap();
        for n in [2, 7, 100] {
            let bd = discretize_boundary(&d, n).unwrap();
            assert_eq!(bd.nodes(), &[Point::d1(0.0), Point::d1(1.0)]);
            assert_eq!(bd.weights(), &[1.0, 1.0]);
        }
    }

    #[test]
    fn unit_circle_weights() {
        let d = Domain::circle([0.0, 0.0], 1.0).unwrap();
        let bd = discretize_boundary(&d, 4).unwrap();
        for w in bd.weights() {
            assert_abs_diff_eq!(*w, PI / 2.0, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(bd.total_weight(), 2.0 * PI, epsilon = 1e-14);
    }

    #[test]
    fn circle_radius_two_length() {
        let d = Domain::circle([0.3, -0.2], 2.0).unwrap();
        let bd = discretize_boundary(&d, 128).unwrap();
        assert_abs_diff_eq!(bd.total_weight(), 4.0 * PI, epsilon = 1e-10);
    }

    #[test]
    fn ellipse_perimeter_converges_spectrally() {
        let d = Domain::ellipse([0.0, 0.0], [1.5, 1.0]).unwrap();
        let l32 = discretize_boundary(&d, 32).unwrap().total_weight();
        let l64 = discretize_boundary(&d, 64).unwrap().total_weight();
        let l16 = discretize_boundary(&d, 16).unwrap().total_weight();
        // Ramanujan-independent check: successive differences collapse.
        assert!((l64 - l32).abs() < 1e-2 * (l32 - l16).abs().max(1e-300) || (l64 - l32).abs() < 1e-14);
        // Known perimeter of the (1.5, 1) ellipse.
        assert_abs_diff_eq!(l64, 7.932_719_794_645_8, epsilon = 1e-10);
    }

    #[test]
    fn smooth_integrand_converges_spectrally_on_circle() {
        let d = Domain::circle([0.0, 0.0], 1.0).unwrap();
        let integrate = |n: usize| {
            let bd = discretize_boundary(&d, n).unwrap();
            bd.nodes()
                .iter()
                .zip(bd.weights())
                .map(|(p, w)| w * (p.x() + 0.5 * p.y()).exp() / (2.5 - p.x()))
                .sum::<f64>()
        };
        let (i16, i32, i64) = (integrate(16), integrate(32), integrate(64));
        assert!((i64 - i32).abs() < 1e-2 * (i32 - i16).abs());
    }

    #[test]
    fn boundary_nodes_lie_on_curve() {
        for d in [
            Domain::circle([1.0, 2.0], 0.7).unwrap(),
            Domain::ellipse([-0.5, 0.25], [2.0, 0.6]).unwrap(),
        ] {
            let bd = discretize_boundary(&d, 64).unwrap();
            let Domain::ClosedCurve(c) = d else { unreachable!() };
            for p in bd.nodes() {
                assert!((c.level(p) - 1.0).abs() < 1e-12);
            }
            for (i, n) in bd.normals().iter().enumerate() {
                assert_abs_diff_eq!(n[0].hypot(n[1]), 1.0, epsilon = 1e-14);
                // outward: moving along the normal leaves the domain
                let out = bd.nodes()[i].offset(n, 1e-6);
                assert!(!d.contains(&out));
            }
        }
    }

    #[test]
    fn odd_curve_node_count_rejected() {
        let d = Domain::circle([0.0, 0.0], 1.0).unwrap();
        assert!(matches!(discretize_boundary(&d, 7), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn malformed_domains_rejected() {
        assert!(matches!(Domain::interval(1.0, 0.0), Err(Error::InvalidDomain(_))));
        assert!(matches!(Domain::circle([0.0, 0.0], -1.0), Err(Error::InvalidDomain(_))));
        assert!(matches!(
            Domain::ellipse([0.0, f64::NAN], [1.0, 1.0]),
            Err(Error::InvalidDomain(_))
        ));
    }

    #[test]
    fn gauss_rule_on_interval() {
        let d = Domain::interval(0.0, 1.0).unwrap();
        let vq = discretize_volume(&d, 8).unwrap();
        assert_abs_diff_eq!(vq.integrate(|_| 1.0), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(vq.integrate(|p| p.x()), 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(vq.integrate(|p| p.x().powi(15)), 1.0 / 16.0, epsilon = 1e-14);
        assert!(vq.nodes().iter().all(|p| d.contains(p)));
    }

    #[test]
    fn polar_rule_on_disk() {
        let d = Domain::circle([0.0, 0.0], 1.0).unwrap();
        let vq = discretize_volume(&d, 32).unwrap();
        assert_abs_diff_eq!(vq.integrate(|_| 1.0), PI, epsilon = 1e-8);
        assert_abs_diff_eq!(vq.integrate(|p| p.x() * p.x()), PI / 4.0, epsilon = 1e-12);
        assert!(vq.nodes().iter().all(|p| d.contains(p)));
        let e = Domain::ellipse([0.0, 0.0], [2.0, 0.5]).unwrap();
        let vq = discretize_volume(&e, 16).unwrap();
        assert_abs_diff_eq!(vq.integrate(|_| 1.0), PI, epsilon = 1e-12);
    }

    #[test]
    fn interior_checks() {
        let d = Domain::interval(0.0, 1.0).unwrap();
        assert!(d.check_interior(&Point::d1(0.5)).is_ok());
        assert!(matches!(d.check_interior(&Point::d1(1.0)), Err(Error::PointOnBoundary(_))));
        assert!(matches!(d.check_interior(&Point::d1(2.0)), Err(Error::PointOutsideDomain(_))));
        let c = Domain::circle([0.0, 0.0], 1.0).unwrap();
        assert!(matches!(
            c.check_interior(&Point::d2(0.6, 0.8)),
            Err(Error::PointOnBoundary(_))
        ));
        assert!(c.probe_points().iter().all(|p| c.check_interior(p).is_ok()));
    }

    #[test]
    fn point_validation() {
        assert!(Point::new(&[1.0, 2.0, 3.0]).is_err());
        assert!(Point::new(&[f64::INFINITY]).is_err());
        assert_eq!(Point::new(&[0.5]).unwrap().coords(), &[0.5]);
    }
}
