//! Pinned-size verification runs comparing the construction against the
//! references in [`crate::oracle`].

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::assembly::{dirichlet_green, GreenFunction, GreenOperator};
use crate::boundary::{BoundaryCondition, BoundaryConditionSet, Support};
use crate::bvp::{solve_bvp, BoundaryData, BoundaryDatum, SourceField};
use crate::fundamental::{Branch, FundamentalSolution, OperatorSpec};
use crate::geometry::{discretize_boundary, discretize_volume, Domain, Point};
use crate::recursive::{block_inverse, recursive_green, recursive_green_ordered, BlockMatrix2x2};
use crate::{CMatrix, Error, Result, C64};

use super::{fd_solve, jump_check, AnalyticGreen, FdSolver1D};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    All,
    Assembly,
    Recursive,
    Bvp,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(Suite::All),
            "assembly" => Ok(Suite::Assembly),
            "recursive" => Ok(Suite::Recursive),
            "bvp" => Ok(Suite::Bvp),
            _ => Err(Error::InvalidArgument(format!("unknown suite `{s}`"))),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::All => "all",
            Suite::Assembly => "assembly",
            Suite::Recursive => "recursive",
            Suite::Bvp => "bvp",
        })
    }
}

/// Deliberate defects injected into the construction, to show the suite catches them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mutation {
    #[default]
    None,
    /// Negates the boundary density in G = E − p B^a† ĝ⁻¹ 𝔹 t.
    FlipDensitySign,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckRow {
    pub name: String,
    pub max_error: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckRow {
    fn new(name: &str, result: Result<f64>, tolerance: f64) -> Self {
        let max_error = result.unwrap_or(f64::NAN);
        Self {
            name: name.to_string(),
            max_error,
            tolerance,
            passed: max_error <= tolerance,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    Text,
}

pub fn run_suite(suite: Suite, mutation: Mutation) -> Vec<CheckRow> {
    let mut rows = Vec::new();
    if matches!(suite, Suite::All | Suite::Assembly) {
        assembly_checks(mutation, &mut rows);
    }
    if matches!(suite, Suite::All | Suite::Recursive) {
        recursive_checks(&mut rows);
    }
    if matches!(suite, Suite::All | Suite::Bvp) {
        bvp_checks(mutation, &mut rows);
    }
    rows
}

pub fn all_passed(rows: &[CheckRow]) -> bool {
    rows.iter().all(|r| r.passed)
}

pub fn format_table(rows: &[CheckRow], format: TableFormat) -> String {
    let verdict = |r: &CheckRow| if r.passed { "pass" } else { "fail" };
    let mut out = String::new();
    match format {
        TableFormat::Csv => {
            out.push_str("name,max_error,tolerance,result\n");
            for r in rows {
                out.push_str(&format!("{},{:e},{:e},{}\n", r.name, r.max_error, r.tolerance, verdict(r)));
            }
        }
        TableFormat::Text => {
            let w = rows.iter().map(|r| r.name.len()).max().unwrap_or(4).max(4);
            out.push_str(&format!("{:<w$}  {:>12}  {:>10}  result\n", "name", "max_error", "tolerance"));
            for r in rows {
                out.push_str(&format!(
                    "{:<w$}  {:>12.3e}  {:>10.1e}  {}\n",
                    r.name,
                    r.max_error,
                    r.tolerance,
                    verdict(r)
                ));
            }
        }
    }
    out
}

fn grid_1d(n: usize) -> Vec<f64> {
    (1..=n).map(|i| i as f64 / (n + 1) as f64).collect()
}

fn unit_interval_nodes() -> Result<crate::geometry::BoundaryDiscretization> {
    discretize_boundary(&Domain::interval(0.0, 1.0)?, 2)
}

fn helmholtz(k: f64) -> Result<FundamentalSolution> {
    FundamentalSolution::new(OperatorSpec::helmholtz_1d(k))
}

fn robin_set() -> Result<BoundaryConditionSet> {
    BoundaryConditionSet::new(vec![
        BoundaryCondition::local_1d(1.0, -1.0, 0.0, 0.0),
        BoundaryCondition::local_1d(0.0, 0.0, 1.0, 1.0),
    ])
}

fn max_grid_error(g: &dyn GreenFunction, reference: &AnalyticGreen) -> Result<f64> {
    let mut err: f64 = 0.0;
    for &x in &grid_1d(9) {
        for &xp in &grid_1d(9) {
            let (p, q) = (Point::d1(x), Point::d1(xp));
            err = err.max((g.eval_g(&p, &q)? - reference.eval(&p, &q)?).norm());
        }
    }
    Ok(err)
}

fn mutated(mut gop: GreenOperator, mutation: Mutation) -> GreenOperator {
    if mutation == Mutation::FlipDensitySign {
        gop.flip_density_sign();
    }
    gop
}

fn disk_points() -> (Vec<Point>, Vec<Point>) {
    let sources = [(0.0, 0.0), (0.5, 0.2), (-0.3, 0.6), (0.0, -0.7)];
    let fields = [(0.2, 0.3), (-0.6, -0.4), (0.85, 0.1), (0.0, 0.5)];
    (
        sources.iter().map(|&(x, y)| Point::d2(x, y)).collect(),
        fields.iter().map(|&(x, y)| Point::d2(x, y)).collect(),
    )
}

fn assembly_checks(mutation: Mutation, rows: &mut Vec<CheckRow>) {
    let dirichlet = AnalyticGreen::dirichlet_helmholtz_1d(1.0, 0.0, 1.0);
    let periodic = AnalyticGreen::periodic_helmholtz_1d(1.0, 1.0);

    rows.push(CheckRow::new(
        "oracle_reference_jumps",
        (|| {
            let mut err: f64 = 0.0;
            for r in [dirichlet.clone()?, periodic.clone()?] {
                for xp in [0.3, 0.5] {
                    err = err.max(jump_check(|x| r.eval(&Point::d1(x), &Point::d1(xp)).unwrap(), xp, 1e-5));
                }
            }
            Ok(err)
        })(),
        1e-7,
    ));

    let dir_gop = || -> Result<GreenOperator> {
        Ok(mutated(dirichlet_green(&helmholtz(1.0)?, &unit_interval_nodes()?)?, mutation))
    };
    rows.push(CheckRow::new(
        "dirichlet_helmholtz_1d_vs_closed_form",
        (|| max_grid_error(&dir_gop()?, &dirichlet.clone()?))(),
        1e-12,
    ));
    rows.push(CheckRow::new(
        "dirichlet_boundary_residual",
        (|| {
            let gop = dir_gop()?;
            grid_1d(9)
                .iter()
                .try_fold(0.0f64, |m, &xp| Ok(m.max(gop.boundary_condition_residual(&Point::d1(xp))?)))
        })(),
        1e-12,
    ));
    rows.push(CheckRow::new(
        "dirichlet_right_action",
        (|| {
            let gop = dir_gop()?;
            grid_1d(9)
                .iter()
                .try_fold(0.0f64, |m, &x| Ok(m.max(gop.verify_right_action(&Point::d1(x))?)))
        })(),
        1e-12,
    ));

    let per_gop = || -> Result<GreenOperator> {
        let gop = GreenOperator::new(&helmholtz(1.0)?, &BoundaryConditionSet::periodic_1d(), &unit_interval_nodes()?)?;
        Ok(mutated(gop, mutation))
    };
    rows.push(CheckRow::new(
        "periodic_helmholtz_1d_vs_closed_form",
        (|| max_grid_error(&per_gop()?, &periodic.clone()?))(),
        1e-12,
    ));
    rows.push(CheckRow::new(
        "periodic_unit_jump",
        (|| {
            let gop = per_gop()?;
            let xp = Point::d1(0.3);
            Ok(jump_check(|x| gop.eval_g(&Point::d1(x), &xp).unwrap(), 0.3, 1e-5))
        })(),
        1e-7,
    ));

    rows.push(CheckRow::new(
        "robin_boundary_residual",
        (|| {
            let fs = FundamentalSolution::new(OperatorSpec::modified_helmholtz_1d(1.0))?;
            let gop = mutated(GreenOperator::new(&fs, &robin_set()?, &unit_interval_nodes()?)?, mutation);
            grid_1d(9)
                .iter()
                .try_fold(0.0f64, |m, &xp| Ok(m.max(gop.boundary_condition_residual(&Point::d1(xp))?)))
        })(),
        1e-10,
    ));

    rows.push(CheckRow::new(
        "branch_independence",
        (|| {
            let bd = unit_interval_nodes()?;
            let out = mutated(dirichlet_green(&helmholtz(1.0)?, &bd)?, mutation);
            let inc = mutated(dirichlet_green(&FundamentalSolution::with_branch(OperatorSpec::helmholtz_1d(1.0), Branch::Incoming)?, &bd)?, mutation);
            let mut err: f64 = 0.0;
            for &x in &grid_1d(9) {
                for &xp in &grid_1d(9) {
                    let (p, q) = (Point::d1(x), Point::d1(xp));
                    err = err.max((out.eval_g(&p, &q)? - inc.eval_g(&p, &q)?).norm());
                }
            }
            Ok(err)
        })(),
        1e-10,
    ));

    rows.push(CheckRow::new(
        "disk_dirichlet_vs_images",
        (|| {
            let bd = discretize_boundary(&Domain::circle([0.0, 0.0], 1.0)?, 128)?;
            let fs = FundamentalSolution::new(OperatorSpec::Laplace2D)?;
            let gop = mutated(dirichlet_green(&fs, &bd)?, mutation);
            let reference = AnalyticGreen::disk_dirichlet_laplace(1.0)?;
            let (sources, fields) = disk_points();
            let mut err: f64 = 0.0;
            for xp in &sources {
                for x in &fields {
                    err = err.max((gop.eval_g(x, xp)? - reference.eval(x, xp)?).norm());
                }
            }
            Ok(err)
        })(),
        1e-6,
    ));
}

fn compare_paths(fs: &FundamentalSolution, bcs: &BoundaryConditionSet, bd: &crate::geometry::BoundaryDiscretization, pairs: &[(Point, Point)]) -> Result<f64> {
    let direct = GreenOperator::new(fs, bcs, bd)?;
    let rec = recursive_green(fs, bcs, bd)?;
    pairs.iter().try_fold(0.0f64, |m, (x, xp)| {
        Ok(m.max((direct.eval_g(x, xp)? - rec.eval_g(x, xp)?).norm()))
    })
}

fn pairs_1d() -> Vec<(Point, Point)> {
    let g = grid_1d(5);
    g.iter().flat_map(|&x| g.iter().map(move |&xp| (Point::d1(x), Point::d1(xp)))).collect()
}

fn recursive_checks(rows: &mut Vec<CheckRow>) {
    rows.push(CheckRow::new(
        "block_inverse_random",
        (|| {
            let mut rng = ChaCha8Rng::seed_from_u64(7);
            let mut err: f64 = 0.0;
            for _ in 0..50 {
                let n = rng.random_range(4..=12);
                let k = rng.random_range(1..n);
                let mut m = CMatrix::from_fn(n, n, |_, _| {
                    C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
                });
                for i in 0..n {
                    m[(i, i)] += C64::new(n as f64, 0.0);
                }
                let inv = block_inverse(&BlockMatrix2x2::split(&m, k)?)?;
                err = err.max((inv * &m - CMatrix::identity(n, n)).camax());
            }
            Ok(err)
        })(),
        1e-10,
    ));

    rows.push(CheckRow::new(
        "recursive_vs_direct_dirichlet",
        (|| compare_paths(&helmholtz(1.0)?, &BoundaryConditionSet::dirichlet_1d(), &unit_interval_nodes()?, &pairs_1d()))(),
        1e-10,
    ));
    rows.push(CheckRow::new(
        "recursive_vs_direct_periodic",
        (|| compare_paths(&helmholtz(1.0)?, &BoundaryConditionSet::periodic_1d(), &unit_interval_nodes()?, &pairs_1d()))(),
        1e-10,
    ));
    rows.push(CheckRow::new(
        "recursive_vs_direct_robin",
        (|| {
            let fs = FundamentalSolution::new(OperatorSpec::modified_helmholtz_1d(1.0))?;
            compare_paths(&fs, &robin_set()?, &unit_interval_nodes()?, &pairs_1d())
        })(),
        1e-10,
    ));

    let arcs = || {
        BoundaryConditionSet::new(vec![
            BoundaryCondition::dirichlet_2d(Support::Arc { start: 0.0, end: PI }),
            BoundaryCondition::dirichlet_2d(Support::Arc { start: PI, end: 2.0 * PI }),
        ])
    };
    let disk_pairs = || {
        let (sources, fields) = disk_points();
        fields
            .iter()
            .flat_map(|x| sources.iter().map(move |xp| (*x, *xp)))
            .collect::<Vec<_>>()
    };
    rows.push(CheckRow::new(
        "recursive_vs_direct_disk_arcs",
        (|| {
            let bd = discretize_boundary(&Domain::circle([0.0, 0.0], 1.0)?, 128)?;
            let fs = FundamentalSolution::new(OperatorSpec::Laplace2D)?;
            compare_paths(&fs, &arcs()?, &bd, &disk_pairs())
        })(),
        1e-5,
    ));
    rows.push(CheckRow::new(
        "recursive_order_invariance",
        (|| {
            let bd = unit_interval_nodes()?;
            let fs = FundamentalSolution::new(OperatorSpec::modified_helmholtz_1d(1.0))?;
            let bcs = robin_set()?;
            let a = recursive_green_ordered(&fs, &bcs, &bd, &[0, 1])?;
            let b = recursive_green_ordered(&fs, &bcs, &bd, &[1, 0])?;
            pairs_1d().iter().try_fold(0.0f64, |m, (x, xp)| {
                Ok(m.max((a.eval_g(x, xp)? - b.eval_g(x, xp)?).norm()))
            })
        })(),
        1e-10,
    ));
}

fn bvp_checks(mutation: Mutation, rows: &mut Vec<CheckRow>) {
    rows.push(CheckRow::new(
        "bvp_constant_source_dirichlet",
        (|| {
            let dom = Domain::interval(0.0, 1.0)?;
            let gop = mutated(dirichlet_green(&helmholtz(1.0)?, &unit_interval_nodes()?)?, mutation);
            let vq = discretize_volume(&dom, 32)?;
            let sol = solve_bvp(&gop, &vq, &SourceField::Constant { c: C64::new(1.0, 0.0) }, &BoundaryData::zeros(2))?;
            let a = (1f64.cos() - 1.0) / 1f64.sin();
            grid_1d(19).iter().try_fold(0.0f64, |m, &x| {
                let exact = 1.0 + a * x.sin() - x.cos();
                Ok(m.max((sol.eval(&Point::d1(x))? - exact).norm()))
            })
        })(),
        1e-10,
    ));

    let robin = || -> Result<(f64, f64)> {
        let dom = Domain::interval(0.0, 1.0)?;
        let fs = FundamentalSolution::new(OperatorSpec::modified_helmholtz_1d(1.0))?;
        let bcs = robin_set()?;
        let gop = mutated(GreenOperator::new(&fs, &bcs, &unit_interval_nodes()?)?, mutation);
        let f = SourceField::Sine { amplitude: C64::new(1.0, 0.0), wavenumber: vec![PI], phase: 0.0 };
        let phi = BoundaryData::zeros(2);
        let sol = solve_bvp(&gop, &discretize_volume(&dom, 32)?, &f, &phi)?;
        let fd = fd_solve(&FdSolver1D::new(*gop.operator(), 0.0, 1.0, bcs.conditions(), 4000)?, &f, &phi)?;
        let err = grid_1d(20).iter().try_fold(0.0f64, |m, &x| {
            Ok::<_, Error>(m.max((sol.eval(&Point::d1(x))? - fd.interpolate(x)).norm()))
        })?;
        let res = sol.boundary_residual(&phi)?.into_iter().fold(0.0, f64::max);
        Ok((err, res))
    };
    let r = robin();
    rows.push(CheckRow::new("bvp_robin_vs_finite_differences", r.clone().map(|v| v.0), 5e-6));
    rows.push(CheckRow::new("bvp_robin_boundary_residual", r.map(|v| v.1), 1e-10));

    rows.push(CheckRow::new(
        "bvp_disk_harmonic_extension",
        (|| {
            let dom = Domain::circle([0.0, 0.0], 1.0)?;
            let bd = discretize_boundary(&dom, 128)?;
            let gop = mutated(dirichlet_green(&FundamentalSolution::new(OperatorSpec::Laplace2D)?, &bd)?, mutation);
            let vals = bd.nodes().iter().map(|p| C64::new(p.x() * p.y(), 0.0)).collect();
            let phi = BoundaryData { components: vec![BoundaryDatum::Values(vals)] };
            let sol = solve_bvp(&gop, &discretize_volume(&dom, 8)?, &SourceField::Zero, &phi)?;
            let (_, fields) = disk_points();
            fields.iter().try_fold(0.0f64, |m, x| Ok(m.max((sol.eval(x)? - x.x() * x.y()).norm())))
        })(),
        1e-5,
    ));

    rows.push(CheckRow::new(
        "fd_reference_order_deficit",
        (|| {
            let rows = [BoundaryCondition::local_1d(1.0, 0.0, 0.0, 0.0), BoundaryCondition::local_1d(0.0, 0.0, 1.0, 0.0)];
            let phi = BoundaryData::constants(&[C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
            let exact = |x: f64| (1.0 - x).sinh() / 1f64.sinh();
            let err = |n: usize| -> Result<f64> {
                let s = FdSolver1D::new(OperatorSpec::modified_helmholtz_1d(1.0), 0.0, 1.0, &rows, n)?;
                let u = fd_solve(&s, &SourceField::Zero, &phi)?;
                Ok(u.grid.iter().zip(&u.values).map(|(x, v)| (v.re - exact(*x)).abs()).fold(0.0, f64::max))
            };
            let order = (err(200)? / err(400)?).log2();
            Ok((2.0 - order).max(0.0))
        })(),
        0.1,
    ));
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn assembly_suite_passes_and_catches_mutation() {
        let rows = run_suite(Suite::Assembly, Mutation::None);
        assert!(all_passed(&rows), "{}", format_table(&rows, TableFormat::Text));
        let bad = run_suite(Suite::Assembly, Mutation::FlipDensitySign);
        assert!(!all_passed(&bad));
        assert!(!bad.iter().find(|r| r.name == "dirichlet_helmholtz_1d_vs_closed_form").unwrap().passed);
    }

    #[test]
    fn recursive_suite_has_direct_comparison() {
        let rows = run_suite(Suite::Recursive, Mutation::None);
        assert!(all_passed(&rows), "{}", format_table(&rows, TableFormat::Text));
        assert!(rows.iter().any(|r| r.name == "recursive_vs_direct_dirichlet"));
    }

    #[test]
    fn bvp_suite_passes() {
        let rows = run_suite(Suite::Bvp, Mutation::None);
        assert!(all_passed(&rows), "{}", format_table(&rows, TableFormat::Text));
    }

    #[test]
    fn table_formats() {
        let rows = vec![CheckRow::new("a", Ok(1e-13), 1e-12), CheckRow::new("b", Err(Error::SingularSystem(String::new())), 1.0)];
        let csv = format_table(&rows, TableFormat::Csv);
        assert_eq!(csv.lines().next().unwrap(), "name,max_error,tolerance,result");
        assert!(csv.contains("a,1e-13,1e-12,pass"));
        assert!(csv.contains("b,NaN,1e0,fail"));
        assert!(format_table(&rows, TableFormat::Text).lines().count() == 3);
        assert_eq!("recursive".parse::<Suite>().unwrap(), Suite::Recursive);
        assert!("x".parse::<Suite>().is_err());
    }
}
