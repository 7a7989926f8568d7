//! Subcommand implementations: verification runs, field continuation over
//! grids, and kernel dumps.

use crate::curve::Curve;
use crate::goursat::BiharmonicField;
use crate::harness::config::{term_record, FamilySpec, RunConfig};
use crate::harness::report::{fmt, PointRecord, VerificationReport};
use crate::kernel::{self, Component, KernelSeries, Side};
use crate::reflection;
use crate::testgen;
use crate::{BoundaryCase, Error, Point, Result};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::io::Write;

/// Continuation operators the harness knows how to drive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Operator {
    Line,
    ClampedGeneral,
    ClampedCircle,
    General,
    CircleNavier,
}

impl Operator {
    pub fn name(self) -> &'static str {
        match self {
            Operator::Line => "continue_line",
            Operator::ClampedGeneral => "continue_clamped_general",
            Operator::ClampedCircle => "continue_clamped_circle",
            Operator::General => "continue_general",
            Operator::CircleNavier => "continue_circle_navier",
        }
    }

    /// Whether the operator is a pure point formula (tighter gate) or
    /// carries quadrature/series error.
    fn is_point_formula(self, case: BoundaryCase) -> bool {
        match self {
            Operator::ClampedGeneral | Operator::ClampedCircle => true,
            Operator::Line => matches!(case, BoundaryCase::I | BoundaryCase::II | BoundaryCase::V),
            Operator::General | Operator::CircleNavier => false,
        }
    }
}

/// Operators applicable to a (curve, case) pair. The circle Navier example
/// formula is radial-only and is attached per field.
pub fn operators_for(curve: &Curve, case: BoundaryCase) -> Vec<Operator> {
    match (curve, case) {
        (Curve::LineY0, BoundaryCase::I) => vec![Operator::Line, Operator::ClampedGeneral],
        (Curve::LineY0, _) => vec![Operator::Line, Operator::General],
        (Curve::Circle { .. }, BoundaryCase::I) => {
            vec![Operator::ClampedCircle, Operator::ClampedGeneral]
        }
        (Curve::Circle { .. }, _) => vec![Operator::General],
        (Curve::Implicit(_), BoundaryCase::I) => vec![Operator::ClampedGeneral],
        (Curve::Implicit(_), _) => vec![Operator::General],
    }
}

fn apply_operator(
    op: Operator,
    u: &BiharmonicField,
    cfg: &RunConfig,
    p: Point,
) -> Result<reflection::ContinuationResult> {
    match op {
        Operator::Line => reflection::continue_line(u, cfg.case, p, &cfg.quad),
        Operator::ClampedGeneral => reflection::continue_clamped_general(u, &cfg.curve, p),
        Operator::ClampedCircle => {
            let Curve::Circle { radius } = cfg.curve else {
                return Err(Error::Unsupported("circle formula needs a circle".into()));
            };
            reflection::continue_clamped_circle(u, radius, p)
        }
        Operator::General => {
            reflection::continue_general(u, &cfg.curve, cfg.case, p, &cfg.quad, cfg.k_max)
        }
        Operator::CircleNavier => reflection::continue_circle_navier(u, p, &cfg.quad),
    }
}

/// Deterministic sample of continuation points in U₁ at distances within the
/// configured band.
pub fn sample_points(cfg: &RunConfig) -> Result<Vec<Point>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = cfg.sample_count;
    let mut pts = Vec::with_capacity(n);
    match &cfg.curve {
        Curve::LineY0 => {
            for _ in 0..n {
                let x = rng.gen_range(-1.5..1.5);
                let d = rng.gen_range(cfg.dist_min..=cfg.dist_max);
                pts.push(Point::new(x, d));
            }
        }
        Curve::Circle { radius } => {
            for _ in 0..n {
                // keep a margin from θ = ±π so logarithmic fields stay off
                // the branch cut
                let th: f64 = rng.gen_range(-2.8..2.8);
                let r = radius + rng.gen_range(cfg.dist_min..=cfg.dist_max);
                pts.push(Point::new(r * th.cos(), r * th.sin()));
            }
        }
        Curve::Implicit(_) => {
            let on_curve = cfg.curve.boundary_samples(n)?;
            for p in on_curve {
                let d = rng.gen_range(cfg.dist_min..=cfg.dist_max);
                pts.push(cfg.curve.offset_into_u1(p, d)?);
            }
        }
    }
    Ok(pts)
}

fn build_fields(cfg: &RunConfig) -> Result<Vec<BiharmonicField>> {
    match cfg.family {
        FamilySpec::ClosedForm => Ok(testgen::closed_form_family(&cfg.curve, cfg.case)?.fields),
        FamilySpec::Collocation {
            basis_size,
            sample_size,
        } => Ok(testgen::collocation_family(&cfg.curve, cfg.case, basis_size, sample_size)?.fields),
        FamilySpec::Explicit => {
            if cfg.fields.is_empty() {
                return Err(Error::Config(
                    "explicit family with no [field] terms".into(),
                ));
            }
            Ok(cfg.fields.clone())
        }
    }
}

/// Runs the test family through every matching operator over the point
/// sample and writes `verify_records.csv` and `verify_summary.json`.
///
/// Per-point operator errors are recorded in the `status` column and do not
/// abort the run. The report's `passed` flag (summaries vs gates) drives the
/// process exit code.
pub fn cmd_verify(cfg: &RunConfig) -> Result<VerificationReport> {
    let fields = build_fields(cfg)?;
    let points = sample_points(cfg)?;
    let unit_circle = matches!(cfg.curve, Curve::Circle { radius } if (radius - 1.0).abs() < 1e-14);
    let base_ops = operators_for(&cfg.curve, cfg.case);

    let mut work: Vec<(usize, usize, Operator)> = Vec::new();
    for (fi, f) in fields.iter().enumerate() {
        let mut ops = base_ops.clone();
        if unit_circle && cfg.case == BoundaryCase::II && f.is_radial() {
            ops.push(Operator::CircleNavier);
        }
        for (pi, _) in points.iter().enumerate() {
            for &op in &ops {
                work.push((fi, pi, op));
            }
        }
    }

    let records: Vec<PointRecord> = work
        .par_iter()
        .map(|&(fi, pi, op)| {
            let u = &fields[fi];
            let p = points[pi];
            let truth = u.eval(p, 0, 0).unwrap_or(f64::NAN);
            match apply_operator(op, u, cfg, p) {
                Ok(r) => PointRecord {
                    field_index: fi,
                    point_index: pi,
                    operator: op.name().into(),
                    point: p,
                    true_value: truth,
                    continued_value: r.value,
                    abs_error: (r.value - truth).abs(),
                    correction: r.correction,
                    truncation_k_used: r.truncation_k_used,
                    quadrature_error_estimate: r.quadrature_error_estimate,
                    status: "ok".into(),
                },
                Err(e) => PointRecord {
                    field_index: fi,
                    point_index: pi,
                    operator: op.name().into(),
                    point: p,
                    true_value: truth,
                    continued_value: f64::NAN,
                    abs_error: f64::NAN,
                    correction: f64::NAN,
                    truncation_k_used: 0,
                    quadrature_error_estimate: f64::NAN,
                    status: error_tag(&e),
                },
            }
        })
        .collect();

    let mut gates = BTreeMap::new();
    for op in [
        Operator::Line,
        Operator::ClampedGeneral,
        Operator::ClampedCircle,
        Operator::General,
        Operator::CircleNavier,
    ] {
        let gate = if op.is_point_formula(cfg.case) {
            cfg.point_tol
        } else {
            cfg.quad_tol
        };
        gates.insert(op.name().to_string(), gate);
    }

    let report = VerificationReport::new(cfg.describe(), records, &gates);
    std::fs::create_dir_all(&cfg.out_dir)?;
    report.write_csv(&cfg.out_dir.join("verify_records.csv"))?;
    report.write_json(&cfg.out_dir.join("verify_summary.json"))?;
    Ok(report)
}

fn error_tag(e: &Error) -> String {
    match e {
        Error::OutsideValidity(_) => "OutsideValidity".into(),
        Error::NonConvergence(_) => "NonConvergence".into(),
        Error::NotConverged { .. } => "NotConverged".into(),
        Error::QuadratureFailure(_) => "QuadratureFailure".into(),
        Error::BranchCutCrossing => "BranchCutCrossing".into(),
        Error::DomainViolation(_) => "DomainViolation".into(),
        other => format!("{other:?}"),
    }
}

/// Continues the first configured field over the grid (which lies in U₂) and
/// writes `continued_field.csv` with one row per grid node. Returns the
/// number of rows flagged outside the validity neighborhood.
pub fn cmd_continue_field(cfg: &RunConfig) -> Result<usize> {
    let grid = cfg
        .grid
        .ok_or_else(|| Error::Config("continue-field needs a [grid] section".into()))?;
    let fields = build_fields(cfg)?;
    let u = &fields[0];
    let op = *operators_for(&cfg.curve, cfg.case)
        .first()
        .expect("every curve/case pair has an operator");

    std::fs::create_dir_all(&cfg.out_dir)?;
    let mut f = std::fs::File::create(cfg.out_dir.join("continued_field.csv"))?;
    writeln!(f, "x,y,u_continued,correction,status")?;
    let mut warnings = 0usize;
    for iy in 0..grid.ny {
        for ix in 0..grid.nx {
            let x = if grid.nx == 1 {
                grid.x_min
            } else {
                grid.x_min + (grid.x_max - grid.x_min) * ix as f64 / (grid.nx - 1) as f64
            };
            let y = if grid.ny == 1 {
                grid.y_min
            } else {
                grid.y_min + (grid.y_max - grid.y_min) * iy as f64 / (grid.ny - 1) as f64
            };
            let p = Point::new(x, y);
            let (value, correction, status) = if cfg.curve.is_on_curve(p, 1e-12) {
                (u.eval(p, 0, 0)?, 0.0, "on_curve".to_string())
            } else {
                match apply_operator(op, u, cfg, p) {
                    Ok(r) => (r.value, r.correction, "ok".to_string()),
                    Err(e) => {
                        warnings += 1;
                        (f64::NAN, f64::NAN, error_tag(&e))
                    }
                }
            };
            writeln!(
                f,
                "{},{},{},{},{}",
                fmt(x),
                fmt(y),
                fmt(value),
                fmt(correction),
                status
            )?;
        }
    }
    Ok(warnings)
}

/// Dumps coefficient tables `(k, |aₖ|, |bₖ|)` at sampled points near the
/// curve, with series-vs-closed-form residual columns where a closed form
/// exists (line: all cases; unit circle: case II).
pub fn cmd_kernel_dump(cfg: &RunConfig) -> Result<String> {
    if !cfg.case.has_series_kernel() {
        return Ok(
            "case i has no series kernel in scope; the clamped point formula applies\n".into(),
        );
    }
    let source = sample_points(cfg)?[0];
    let series = KernelSeries::for_source(cfg.case, &cfg.curve, cfg.k_max, source)?;
    let samples = kernel::matching_boundary_samples(&cfg.curve, source, 6)?;
    let unit_circle = matches!(cfg.curve, Curve::Circle { radius } if (radius - 1.0).abs() < 1e-14);

    let mut out = String::new();
    out.push_str("case,point_index,k,abs_a_k,abs_b_k,v2_series_vs_closed\n");
    for (pi, zc) in samples.iter().enumerate() {
        // evaluation point slightly inside U₂ so the series is non-trivial
        let p_on = Point::from_z(*zc);
        let (nx, ny) = cfg.curve.normal_into_u2(p_on)?;
        let p = Point::new(p_on.x + 0.05 * nx, p_on.y + 0.05 * ny);
        let z = p.to_z();
        let w = p.to_w();
        let closed = match (&cfg.curve, cfg.case) {
            (Curve::LineY0, c) => Some(kernel::v2_closed_line(
                c,
                z,
                w,
                series.source_z,
                series.source_w,
            )?),
            (Curve::Circle { .. }, BoundaryCase::II) if unit_circle => Some(
                kernel::v2_closed_circle_navier(z, w, series.source_z, series.source_w),
            ),
            _ => None,
        };
        let residual = match closed {
            Some(cv) => {
                let sv = series.eval(Component::V2, z, w, 0, 0)?.value;
                fmt((sv - cv).norm())
            }
            None => String::new(),
        };
        for k in 1..=cfg.k_max.min(12) {
            let a = series.coefficient(Side::A, k, z, w)?;
            let b = series.coefficient(Side::B, k, z, w)?;
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                cfg.case,
                pi,
                k,
                fmt(a.norm()),
                fmt(b.norm()),
                residual
            ));
        }
    }
    std::fs::create_dir_all(&cfg.out_dir)?;
    std::fs::write(cfg.out_dir.join("kernel_dump.csv"), &out)?;
    Ok(out)
}

/// Emits the configured test family in the `[field]` record format, both as
/// the returned string and as `testgen_fields.cfg` in the output directory.
pub fn cmd_testgen_dump(cfg: &RunConfig) -> Result<String> {
    let family = match cfg.family {
        FamilySpec::Collocation {
            basis_size,
            sample_size,
        } => testgen::collocation_family(&cfg.curve, cfg.case, basis_size, sample_size)?,
        _ => testgen::closed_form_family(&cfg.curve, cfg.case)?,
    };
    let mut out = String::new();
    out.push_str(&format!(
        "# case {} — {} fields, residual {}\n",
        family.case,
        family.fields.len(),
        fmt(family.residual)
    ));
    out.push_str("[field]\n");
    for (i, f) in family.fields.iter().enumerate() {
        if i > 0 {
            out.push_str("term = ---\n");
        }
        out.push_str(&format!("# field {i}\n"));
        for t in &f.phi {
            out.push_str(&format!("term = {}\n", term_record("phi", t)));
        }
        for t in &f.psi {
            out.push_str(&format!("term = {}\n", term_record("psi", t)));
        }
    }
    std::fs::create_dir_all(&cfg.out_dir)?;
    std::fs::write(cfg.out_dir.join("testgen_fields.cfg"), &out)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::RunConfig;

    #[test]
    fn verify_line_case_ii_passes() {
        let mut cfg = RunConfig::from_str_with_defaults(
            "[curve]\nspec = line\n[case]\ncase = ii\n[sample]\ncount = 20\n",
        )
        .unwrap();
        cfg.out_dir = tempfile::tempdir().unwrap().path().to_path_buf();
        let report = cmd_verify(&cfg).unwrap();
        assert!(report.passed, "{:#?}", report.summaries);
        // two operators on every field/point
        assert_eq!(report.summaries.len(), 2);
    }

    #[test]
    fn verify_is_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let text = "[curve]\nspec = line\n[case]\ncase = v\n[sample]\ncount = 9\nseed = 3\n";
        let mut cfg = RunConfig::from_str_with_defaults(text).unwrap();
        cfg.out_dir = dir.path().join("a");
        let a = cmd_verify(&cfg).unwrap();
        cfg.out_dir = dir.path().join("b");
        let b = cmd_verify(&cfg).unwrap();
        let strip = |r: &VerificationReport| {
            let mut v = serde_json::to_value(r).unwrap();
            v.as_object_mut().unwrap().remove("generated_at");
            v
        };
        assert_eq!(strip(&a), strip(&b));
    }

    #[test]
    fn continue_field_line_case_i() {
        let text = "\
[curve]
spec = line
[case]
case = i
[grid]
x_min = -0.4
x_max = 0.4
nx = 5
y_min = -0.5
y_max = -0.05
ny = 4
";
        let mut cfg = RunConfig::from_str_with_defaults(text).unwrap();
        let dir = tempfile::tempdir().unwrap();
        cfg.out_dir = dir.path().to_path_buf();
        let warnings = cmd_continue_field(&cfg).unwrap();
        assert_eq!(warnings, 0);
        let text = std::fs::read_to_string(dir.path().join("continued_field.csv")).unwrap();
        // first family member is y²: continued value must equal y² on every row
        for line in text.lines().skip(1) {
            let cols: Vec<&str> = line.split(',').collect();
            let y: f64 = cols[1].parse().unwrap();
            let v: f64 = cols[2].parse().unwrap();
            assert!((v - y * y).abs() < 1e-10, "row `{line}`");
        }
    }

    #[test]
    fn kernel_dump_line_case_ii_zero_tail() {
        let mut cfg = RunConfig::from_str_with_defaults(
            "[curve]\nspec = line\n[case]\ncase = ii\n[kernel]\nk_max = 8\n",
        )
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        cfg.out_dir = dir.path().to_path_buf();
        let out = cmd_kernel_dump(&cfg).unwrap();
        for line in out.lines().skip(1) {
            let cols: Vec<&str> = line.split(',').collect();
            let k: usize = cols[2].parse().unwrap();
            let a: f64 = cols[3].parse().unwrap();
            if k >= 2 {
                assert_eq!(a, 0.0, "a_{k} nonzero on line: `{line}`");
            }
        }
    }

    #[test]
    fn kernel_dump_case_i_notice() {
        let mut cfg =
            RunConfig::from_str_with_defaults("[curve]\nspec = line\n[case]\ncase = i\n").unwrap();
        cfg.out_dir = tempfile::tempdir().unwrap().path().to_path_buf();
        let out = cmd_kernel_dump(&cfg).unwrap();
        assert!(out.contains("no series kernel"));
    }

    #[test]
    fn testgen_dump_roundtrips_through_config() {
        let mut cfg =
            RunConfig::from_str_with_defaults("[curve]\nspec = circle:a=1\n[case]\ncase = ii\n")
                .unwrap();
        let dir = tempfile::tempdir().unwrap();
        cfg.out_dir = dir.path().to_path_buf();
        let dumped = cmd_testgen_dump(&cfg).unwrap();
        let parsed = RunConfig::from_str_with_defaults(&dumped).unwrap();
        assert_eq!(parsed.fields.len(), 4);
    }
}
