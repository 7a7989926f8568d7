//! The continuation (reflection) operators.
//!
//! For `y = 0` the five formulas are explicit: cases I, II, V are point to
//! point, cases III and IV carry a one-dimensional integral of `Δu` along the
//! vertical segment. For a general analytic curve, case I keeps a four-term
//! point formula in `S` and `S̃`, while cases II–V become `±u(Q)` plus a
//! path-integral correction `K̂` built from the series kernel `V = V₁ - V₂`
//! and integrated along any path from Γ to the reflected point `Q`.
//!
//! The sign of `±u(Q)` is fixed per case but is also recomputed at run time
//! from `(∂a₁/∂w)·S′ + (∂b₁/∂z)·S̃′` at `Q` and cross-checked, which guards
//! the coefficient conventions of the kernel module against drift.

use crate::curve::Curve;
use crate::goursat::BiharmonicField;
use crate::kernel::{KernelSeries, Side};
use crate::quad::QuadratureSpec;
use crate::{BoundaryCase, Error, Point, Result, C};

/// Continued value at `P` together with its decomposition and diagnostics.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ContinuationResult {
    pub value: f64,
    /// The `±u(Q)` (and derivative) part.
    pub point_term: f64,
    /// Integral or series correction; zero for point formulas.
    pub correction: f64,
    pub quadrature_error_estimate: f64,
    pub truncation_k_used: usize,
    /// Polyline actually integrated along (empty for point formulas).
    pub path: Vec<Point>,
}

impl ContinuationResult {
    fn point_formula(value: f64) -> Self {
        ContinuationResult {
            value,
            point_term: value,
            correction: 0.0,
            quadrature_error_estimate: 0.0,
            truncation_k_used: 0,
            path: vec![],
        }
    }
}

/// First- through third-order data of `u` needed by the integral formulas.
struct FieldData {
    u: f64,
    ux: f64,
    uy: f64,
    lap: f64,
    lap_x: f64,
    lap_y: f64,
}

fn field_data(u: &BiharmonicField, p: Point) -> Result<FieldData> {
    let (lap_x, lap_y) = u.laplacian_gradient(p)?;
    Ok(FieldData {
        u: u.eval(p, 0, 0)?,
        ux: u.eval(p, 1, 0)?,
        uy: u.eval(p, 0, 1)?,
        lap: u.laplacian(p)?,
        lap_x,
        lap_y,
    })
}

/// The five line formulas across `y = 0`, for `P = (x₀, y₀)`, `y₀ > 0`:
///
/// * I:   `-u(Q) - 2y₀·u_y(Q) - y₀²·Δu(Q)`
/// * II:  `-u(Q)`
/// * III: `-u(Q) - y₀·∫₀^{-y₀} Δu(x₀, y) dy`
/// * IV:  ` u(Q) - ∫₀^{-y₀} y·Δu(x₀, y) dy`
/// * V:   ` u(Q)`
///
/// with `Q = (x₀, -y₀)` and the integrals along the vertical segment.
pub fn continue_line(
    u: &BiharmonicField,
    case: BoundaryCase,
    p: Point,
    quad: &QuadratureSpec,
) -> Result<ContinuationResult> {
    let (x0, y0) = (p.x, p.y);
    let q = Point::new(x0, -y0);
    match case {
        BoundaryCase::I => {
            let d = field_data(u, q)?;
            Ok(ContinuationResult::point_formula(
                -d.u - 2.0 * y0 * d.uy - y0 * y0 * d.lap,
            ))
        }
        BoundaryCase::II => Ok(ContinuationResult::point_formula(-u.eval(q, 0, 0)?)),
        BoundaryCase::V => Ok(ContinuationResult::point_formula(u.eval(q, 0, 0)?)),
        BoundaryCase::III => {
            let mut f = |y: f64| Ok(C::new(u.laplacian(Point::new(x0, y))?, 0.0));
            let (integral, err) = quad.integrate(&mut f, 0.0, -y0)?;
            let point_term = -u.eval(q, 0, 0)?;
            let correction = -y0 * integral.re;
            Ok(ContinuationResult {
                value: point_term + correction,
                point_term,
                correction,
                quadrature_error_estimate: err * y0.abs(),
                truncation_k_used: 0,
                path: vec![Point::new(x0, 0.0), q],
            })
        }
        BoundaryCase::IV => {
            let mut f = |y: f64| Ok(C::new(y * u.laplacian(Point::new(x0, y))?, 0.0));
            let (integral, err) = quad.integrate(&mut f, 0.0, -y0)?;
            let point_term = u.eval(q, 0, 0)?;
            let correction = -integral.re;
            Ok(ContinuationResult {
                value: point_term + correction,
                point_term,
                correction,
                quadrature_error_estimate: err,
                truncation_k_used: 0,
                path: vec![Point::new(x0, 0.0), q],
            })
        }
    }
}

/// The clamped-case point formula for a general curve:
///
/// ```text
/// u(P) = -u(Q) - (x₀ - (S(z₀)+S̃(w₀))/2)·u_x(Q)
///              - (y₀ + (S(z₀)-S̃(w₀))/(2i))·u_y(Q)
///              - ¼(x₀²+y₀² - S(z₀)z₀ - S̃(w₀)w₀ + S(z₀)S̃(w₀))·Δu(Q)
/// ```
///
/// On the line this reduces to the case-I line formula; on the circle to the
/// classical circular-arc formula.
pub fn continue_clamped_general(
    u: &BiharmonicField,
    curve: &Curve,
    p: Point,
) -> Result<ContinuationResult> {
    let z0 = p.to_z();
    let w0 = p.to_w();
    let s = curve.schwarz(z0, 0)?;
    let st = curve.schwarz_inverse(w0, 0)?;
    let q = Point::new(((s + st) * 0.5).re, -((s - st) / C::new(0.0, 2.0)).re);
    // the coefficients are real for a real curve and a real point; the
    // imaginary residue only measures roundoff in the two Newton solves
    let cx = p.x - ((s + st) * 0.5).re;
    let cy = p.y + ((s - st) / C::new(0.0, 2.0)).re;
    let imag_residue = ((s + st) * 0.5)
        .im
        .abs()
        .max(((s - st) / C::new(0.0, 2.0)).im.abs());
    if imag_residue > 1e-9 * (1.0 + s.norm()) {
        return Err(Error::Internal(format!(
            "S(z₀) and S̃(w₀) are not conjugate: residue {imag_residue:.3e}"
        )));
    }
    let clap = 0.25 * (z0 * w0 - s * z0 - st * w0 + s * st).re;
    let d = field_data(u, q)?;
    Ok(ContinuationResult::point_formula(
        -d.u - cx * d.ux - cy * d.uy - clap * d.lap,
    ))
}

/// The circular-arc clamped formula for radius `a`:
///
/// ```text
/// u(P) = -u(Q) - ((r₀²-a²)/r₀²)·(r₀·∂u/∂r(Q) + ¼(r₀²-a²)·Δu(Q))
/// ```
///
/// with `Q` the circle inversion of `P`.
pub fn continue_clamped_circle(
    u: &BiharmonicField,
    radius: f64,
    p: Point,
) -> Result<ContinuationResult> {
    let r0 = p.norm();
    if r0 < 1e-12 {
        return Err(Error::OutsideValidity("point at circle center".into()));
    }
    let a2 = radius * radius;
    let q = Point::new(a2 * p.x / (r0 * r0), a2 * p.y / (r0 * r0));
    let d = field_data(u, q)?;
    let rq = q.norm();
    let ur = (q.x * d.ux + q.y * d.uy) / rq;
    let k = (r0 * r0 - a2) / (r0 * r0);
    Ok(ContinuationResult::point_formula(
        -d.u - k * (r0 * ur + 0.25 * (r0 * r0 - a2) * d.lap),
    ))
}

/// Diagnostics of a path-integral correction evaluation.
#[derive(Debug, Clone)]
pub struct KhatEval {
    pub value: f64,
    /// Imaginary residue of the (analytically real) integral.
    pub imag_residue: f64,
    pub quad_error: f64,
    pub k_used: usize,
    pub tail_bound: f64,
    pub path: Vec<Point>,
}

/// Default integration path from Γ to the reflected point: the vertical
/// segment for the line, the radial segment for the circle, the straight
/// foot-to-image segment for implicit curves.
pub fn default_path(curve: &Curve, p: Point) -> Result<Vec<Point>> {
    let r = curve.reflect_point(p)?;
    Ok(vec![r.foot, r.image])
}

/// Fallback path that hugs the curve: walks Γ from the foot of `P` toward
/// the foot of `Q` while easing into U₂, ending at `Q`. Used when the
/// straight segment exits the validity neighborhood; by closedness of the
/// integrand the value is unchanged.
pub fn curve_hugging_path(curve: &Curve, p: Point, legs: usize) -> Result<Vec<Point>> {
    let r = curve.reflect_point(p)?;
    let q_foot = curve.foot_point(r.image)?;
    let depth = r.image.dist(q_foot);
    let mut path = vec![r.foot];
    for i in 1..legs {
        let t = i as f64 / legs as f64;
        let lerp = Point::new(
            r.foot.x + t * (q_foot.x - r.foot.x),
            r.foot.y + t * (q_foot.y - r.foot.y),
        );
        let on_curve = curve.foot_point(lerp)?;
        // offset into U₂ (negative distance from the U₁ side)
        path.push(curve.offset_into_u1(on_curve, -t * depth)?);
    }
    path.push(r.image);
    Ok(path)
}

/// The correction term
///
/// ```text
/// K̂ = (1/8i) ∫ (V·Δu_y - Δu·V_y + ΔV·u_y - u·ΔV_y) dx
///            - (V·Δu_x - Δu·V_x + ΔV·u_x - u·ΔV_x) dy
/// ```
///
/// along the default path from Γ to `Q`, with `V = V₁ - V₂`. The result is
/// real; the imaginary residue is asserted against the quadrature tolerance
/// and discarded.
pub fn khat(
    u: &BiharmonicField,
    curve: &Curve,
    case: BoundaryCase,
    p: Point,
    quad: &QuadratureSpec,
    k_max: usize,
) -> Result<KhatEval> {
    let path = default_path(curve, p)?;
    match khat_along(u, curve, case, p, &path, quad, k_max) {
        // a straight segment can leave the validity strip of an implicit
        // curve; retry along a path that stays near Γ
        Err(Error::OutsideValidity(_)) if matches!(curve, Curve::Implicit(_)) => {
            let detour = curve_hugging_path(curve, p, 8)?;
            khat_along(u, curve, case, p, &detour, quad, k_max)
        }
        other => other,
    }
}

/// [`khat`] along an explicit polyline (used for path-independence checks
/// and detours around invalid regions).
pub fn khat_along(
    u: &BiharmonicField,
    curve: &Curve,
    case: BoundaryCase,
    p: Point,
    path: &[Point],
    quad: &QuadratureSpec,
    k_max: usize,
) -> Result<KhatEval> {
    if path.len() < 2 {
        return Err(Error::QuadratureFailure(
            "path needs at least 2 points".into(),
        ));
    }
    let series = KernelSeries::for_source(case, curve, k_max, p)?;
    monitor_path(&series, curve, path)?;

    let mut k_used = 0usize;
    let mut tail: f64 = 0.0;
    let mut total = C::new(0.0, 0.0);
    let mut err_total = 0.0;
    for seg in path.windows(2) {
        let (a, b) = (seg[0], seg[1]);
        let (dx, dy) = (b.x - a.x, b.y - a.y);
        let mut f = |t: f64| -> Result<C> {
            let pt = Point::new(a.x + t * dx, a.y + t * dy);
            let d = field_data(u, pt)?;
            let v = series.v_partials(pt.to_z(), pt.to_w())?;
            k_used = k_used.max(v.terms_used);
            tail = tail.max(v.tail_bound);
            let along_x = v.v * d.lap_y - d.lap * v.vy() + v.lap() * d.uy - d.u * v.lap_y();
            let along_y = v.v * d.lap_x - d.lap * v.vx() + v.lap() * d.ux - d.u * v.lap_x();
            Ok(along_x * dx - along_y * dy)
        };
        let (val, err) = quad.integrate(&mut f, 0.0, 1.0)?;
        total += val;
        err_total += err;
    }
    let value = total / C::new(0.0, 8.0);
    let imag_residue = value.im.abs();
    if imag_residue > 10.0 * quad.tol.max(tail) {
        return Err(Error::QuadratureFailure(format!(
            "correction integral has imaginary residue {imag_residue:.3e}"
        )));
    }
    Ok(KhatEval {
        value: value.re,
        imag_residue,
        quad_error: err_total / 8.0,
        k_used,
        tail_bound: tail,
        path: path.to_vec(),
    })
}

/// Walk the path at a fine ordered sampling and flag a crossing of the
/// branch structure: the arguments of `S(z)-w₀` and `S̃(w)-z₀` must move
/// continuously, and every sample must stay in the validity neighborhood.
fn monitor_path(series: &KernelSeries, curve: &Curve, path: &[Point]) -> Result<()> {
    let mut prev_args: Option<(f64, f64)> = None;
    for seg in path.windows(2) {
        let (a, b) = (seg[0], seg[1]);
        for i in 0..=24 {
            let t = i as f64 / 24.0;
            let pt = Point::new(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y));
            curve.validity_check(pt).map_err(|e| {
                Error::OutsideValidity(format!("path leaves validity neighborhood at {pt}: {e}"))
            })?;
            let xi = curve.schwarz(pt.to_z(), 0)? - series.source_w;
            let eta = curve.schwarz_inverse(pt.to_w(), 0)? - series.source_z;
            // endpoints of the path sit on the characteristics where the
            // arguments vanish; skip degenerate magnitudes
            if xi.norm() < 1e-12 || eta.norm() < 1e-12 {
                prev_args = None;
                continue;
            }
            let args = (xi.arg(), eta.arg());
            if let Some((pa, pb)) = prev_args {
                let d1 = wrap_angle(args.0 - pa).abs();
                let d2 = wrap_angle(args.1 - pb).abs();
                if d1 > 2.5 || d2 > 2.5 {
                    return Err(Error::BranchCutCrossing);
                }
            }
            prev_args = Some(args);
        }
    }
    Ok(())
}

fn wrap_angle(a: f64) -> f64 {
    let mut a = a;
    while a > std::f64::consts::PI {
        a -= 2.0 * std::f64::consts::PI;
    }
    while a < -std::f64::consts::PI {
        a += 2.0 * std::f64::consts::PI;
    }
    a
}

/// General-curve continuation for cases II–V: `±u(Q) + K̂`.
///
/// The hard-coded sign (−1 for II, III; +1 for IV, V) is cross-checked at
/// run time against `-½·((∂a₁/∂w)S′ + (∂b₁/∂z)S̃′)` evaluated at `Q`.
pub fn continue_general(
    u: &BiharmonicField,
    curve: &Curve,
    case: BoundaryCase,
    p: Point,
    quad: &QuadratureSpec,
    k_max: usize,
) -> Result<ContinuationResult> {
    let sign = case.point_sign().ok_or_else(|| {
        Error::Unsupported("case i is continued by the clamped point formula".into())
    })?;
    let refl = curve.reflect_point(p)?;
    let q = refl.image;

    let series = KernelSeries::for_source(case, curve, k_max, p)?;
    let zq = q.to_z();
    let wq = q.to_w();
    // ∂a₁/∂w is the w-linear part of a₁; same mirrored for b₁
    let da1_dw =
        series.coefficient(Side::A, 1, zq, wq + 1.0)? - series.coefficient(Side::A, 1, zq, wq)?;
    let db1_dz =
        series.coefficient(Side::B, 1, zq + 1.0, wq)? - series.coefficient(Side::B, 1, zq, wq)?;
    let sp = curve.schwarz(zq, 1)?;
    let stp = curve.schwarz_inverse(wq, 1)?;
    let runtime_sign = (-0.5 * (da1_dw * sp + db1_dz * stp)).re;
    if (runtime_sign - sign).abs() > 1e-8 {
        return Err(Error::Internal(format!(
            "runtime point-term sign {runtime_sign:.6} disagrees with case {case} sign {sign}"
        )));
    }

    let k = khat(u, curve, case, p, quad, k_max)?;
    let point_term = sign * u.eval(q, 0, 0)?;
    Ok(ContinuationResult {
        value: point_term + k.value,
        point_term,
        correction: k.value,
        quadrature_error_estimate: k.quad_error + k.tail_bound,
        truncation_k_used: k.k_used,
        path: k.path,
    })
}

/// The unit-circle Navier example:
///
/// ```text
/// u(r₀,θ₀) = -u(1/r₀,θ₀)
///          + ((r₀²-1)/4r₀)·∫₁^{1/r₀} ((1-r²)/r²)·(u_r/r + u_rr) dr
/// ```
///
/// along the ray θ = θ₀. The radial integrand is the printed form of the
/// summed kernel; it agrees with the general correction exactly when
/// `∂²u/∂θ²` vanishes along the ray, so this operator is for radial fields
/// (the verification harness applies it only to those).
pub fn continue_circle_navier(
    u: &BiharmonicField,
    p: Point,
    quad: &QuadratureSpec,
) -> Result<ContinuationResult> {
    let r0 = p.norm();
    if r0 < 1e-12 {
        return Err(Error::OutsideValidity("point at circle center".into()));
    }
    let th = p.y.atan2(p.x);
    let (ct, st) = (th.cos(), th.sin());
    let q = Point::new(ct / r0, st / r0);
    let mut f = |r: f64| -> Result<C> {
        let pt = Point::new(r * ct, r * st);
        let ux = u.eval(pt, 1, 0)?;
        let uy = u.eval(pt, 0, 1)?;
        let uxx = u.eval(pt, 2, 0)?;
        let uxy = u.eval(pt, 1, 1)?;
        let uyy = u.eval(pt, 0, 2)?;
        let ur = ct * ux + st * uy;
        let urr = ct * ct * uxx + 2.0 * ct * st * uxy + st * st * uyy;
        Ok(C::new((1.0 - r * r) / (r * r) * (ur / r + urr), 0.0))
    };
    let (integral, err) = quad.integrate(&mut f, 1.0, 1.0 / r0)?;
    let factor = (r0 * r0 - 1.0) / (4.0 * r0);
    let point_term = -u.eval(q, 0, 0)?;
    let correction = factor * integral.re;
    Ok(ContinuationResult {
        value: point_term + correction,
        point_term,
        correction,
        quadrature_error_estimate: err * factor.abs(),
        truncation_k_used: 0,
        path: vec![Point::new(ct, st), q],
    })
}

/// Green's-representation self-check: reproduce `u(P)` from the 8-term
/// boundary integral over a circle of `contour_radius` around `P`, with the
/// fundamental solution `G = -1/(16π)(G₁+G₂)`.
///
/// With this normalization `Δ²G = -δ`, so the paper's integrand reproduces
/// `+u(P)` when the contour is traversed clockwise.
pub fn green_representation(
    u: &BiharmonicField,
    p: Point,
    contour_radius: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    use crate::kernel::fundamental_g_partial;
    let z0 = p.to_z();
    let w0 = p.to_w();
    let rho = contour_radius;
    let mut f = |t: f64| -> Result<C> {
        // clockwise parameterization
        let (x, y) = (p.x + rho * t.cos(), p.y - rho * t.sin());
        let pt = Point::new(x, y);
        let (dx, dy) = (-rho * t.sin(), -rho * t.cos());
        let z = pt.to_z();
        let w = pt.to_w();
        let g = |a: usize, b: usize| fundamental_g_partial(z, w, z0, w0, a, b);
        let g00 = g(0, 0)?;
        let gx = g(1, 0)? + g(0, 1)?;
        let gy = C::new(0.0, 1.0) * (g(1, 0)? - g(0, 1)?);
        let lap = 4.0 * g(1, 1)?;
        let lap_x = 4.0 * (g(2, 1)? + g(1, 2)?);
        let lap_y = C::new(0.0, 4.0) * (g(2, 1)? - g(1, 2)?);
        let d = field_data(u, pt)?;
        let along_x = g00 * d.lap_y - d.lap * gy + lap * d.uy - d.u * lap_y;
        let along_y = g00 * d.lap_x - d.lap * gx + lap * d.ux - d.u * lap_x;
        Ok(along_x * dx - along_y * dy)
    };
    let (value, _err) = quad.integrate(&mut f, 0.0, 2.0 * std::f64::consts::PI)?;
    if value.im.abs() > 1e3 * quad.tol {
        return Err(Error::QuadratureFailure(format!(
            "green representation integral has imaginary residue {:.3e}",
            value.im
        )));
    }
    Ok(value.re)
}
