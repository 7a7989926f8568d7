//! Analytic curves, their complexification and Schwarz functions.
//!
//! A non-singular real-analytic curve `Γ = {f(x,y) = 0}` rewritten in the
//! characteristic variables `z = x+iy`, `w = x-iy` becomes `w = S(z)` (and
//! `z = S̃(w)` for the inverse branch), where `S` is the Schwarz function of
//! the curve. The anti-conformal point reflection across `Γ` is
//! `P ↦ conj(S(P))`.
//!
//! Three curve kinds are supported: the line `y = 0` (`S(z) = z`), the circle
//! of radius `a` about the origin (`S(z) = a²/z`), and an implicit algebraic
//! curve where `S` is evaluated by Newton continuation of
//! `f((z+w)/2, (z-w)/(2i)) = 0` from `w = conj(z)` and differentiated by
//! order-by-order solution of the same relation on jets.

use crate::jet::Jet;
use crate::{Error, Point, Result, C};

const NEWTON_TOL: f64 = 1e-13;
const NEWTON_MAX_ITER: usize = 50;
const HOMOTOPY_STEPS: usize = 8;
/// Operational validity window for |S'|.
const SPRIME_MIN: f64 = 1e-8;
const SPRIME_MAX: f64 = 1e8;

/// Bivariate real polynomial `Σ c_{ij} x^i y^j`, stored as sparse terms.
#[derive(Debug, Clone, PartialEq)]
pub struct BivariatePoly {
    terms: Vec<(u32, u32, f64)>,
}

impl BivariatePoly {
    pub fn new(terms: Vec<(u32, u32, f64)>) -> Self {
        BivariatePoly {
            terms: terms.into_iter().filter(|t| t.2 != 0.0).collect(),
        }
    }

    pub fn terms(&self) -> &[(u32, u32, f64)] {
        &self.terms
    }

    pub fn eval_real(&self, x: f64, y: f64) -> f64 {
        self.terms
            .iter()
            .map(|&(i, j, c)| c * x.powi(i as i32) * y.powi(j as i32))
            .sum()
    }

    pub fn eval_complex(&self, x: C, y: C) -> C {
        self.terms
            .iter()
            .map(|&(i, j, c)| x.powu(i) * y.powu(j) * c)
            .sum()
    }

    /// Evaluate on jets (same expansion point, equal lengths).
    pub fn eval_jets(&self, x: &Jet, y: &Jet) -> Jet {
        let len = x.len().min(y.len());
        let mut acc = Jet::constant(C::new(0.0, 0.0), len);
        // cache powers up to the degrees that occur
        let max_i = self.terms.iter().map(|t| t.0).max().unwrap_or(0) as usize;
        let max_j = self.terms.iter().map(|t| t.1).max().unwrap_or(0) as usize;
        let mut xp = Vec::with_capacity(max_i + 1);
        xp.push(Jet::constant(C::new(1.0, 0.0), len));
        for i in 1..=max_i {
            let prev = &xp[i - 1];
            xp.push(prev.mul(x));
        }
        let mut yp = Vec::with_capacity(max_j + 1);
        yp.push(Jet::constant(C::new(1.0, 0.0), len));
        for j in 1..=max_j {
            let prev = &yp[j - 1];
            yp.push(prev.mul(y));
        }
        for &(i, j, c) in &self.terms {
            acc = acc.add(&xp[i as usize].mul(&yp[j as usize]).scale(C::new(c, 0.0)));
        }
        acc
    }

    pub fn dx(&self) -> BivariatePoly {
        BivariatePoly::new(
            self.terms
                .iter()
                .filter(|t| t.0 > 0)
                .map(|&(i, j, c)| (i - 1, j, c * i as f64))
                .collect(),
        )
    }

    pub fn dy(&self) -> BivariatePoly {
        BivariatePoly::new(
            self.terms
                .iter()
                .filter(|t| t.1 > 0)
                .map(|&(i, j, c)| (i, j - 1, c * j as f64))
                .collect(),
        )
    }

    /// Magnitude bound of the polynomial on |x|,|y| ≤ r, used to scale the
    /// Newton residual tolerance.
    fn scale_at(&self, r: f64) -> f64 {
        let r = r.max(1.0);
        self.terms
            .iter()
            .map(|&(i, j, c)| c.abs() * r.powi((i + j) as i32))
            .sum::<f64>()
            .max(1.0)
    }
}

/// Implicit algebraic curve data: the defining polynomial, its partials, and
/// a reference point on the curve used to seed homotopies.
#[derive(Debug, Clone)]
pub struct ImplicitCurve {
    pub f: BivariatePoly,
    fx: BivariatePoly,
    fy: BivariatePoly,
    fxx: BivariatePoly,
    fxy: BivariatePoly,
    fyy: BivariatePoly,
    pub reference: Point,
}

impl ImplicitCurve {
    /// `F(z, w) = f((z+w)/2, (z-w)/(2i))`.
    fn big_f(&self, z: C, w: C) -> C {
        let x = (z + w) * 0.5;
        let y = (z - w) / C::new(0.0, 2.0);
        self.f.eval_complex(x, y)
    }

    /// `∂F/∂w = (f_x + i f_y)/2`.
    fn big_f_w(&self, z: C, w: C) -> C {
        let x = (z + w) * 0.5;
        let y = (z - w) / C::new(0.0, 2.0);
        (self.fx.eval_complex(x, y) + C::new(0.0, 1.0) * self.fy.eval_complex(x, y)) * 0.5
    }

    /// `∂F/∂z = (f_x - i f_y)/2`.
    fn big_f_z(&self, z: C, w: C) -> C {
        let x = (z + w) * 0.5;
        let y = (z - w) / C::new(0.0, 2.0);
        (self.fx.eval_complex(x, y) - C::new(0.0, 1.0) * self.fy.eval_complex(x, y)) * 0.5
    }
}

/// An analytic curve with evaluable Schwarz function.
#[derive(Debug, Clone)]
pub enum Curve {
    /// The line `y = 0`. `S(z) = z` exactly.
    LineY0,
    /// Circle of radius `a` centered at the origin. `S(z) = a²/z`.
    Circle { radius: f64 },
    /// Implicit algebraic curve `f(x, y) = 0`.
    Implicit(ImplicitCurve),
}

/// Result of the point reflection across a curve.
#[derive(Debug, Clone, Copy)]
pub struct ReflectedPoint {
    pub source: Point,
    pub image: Point,
    /// Point of Γ used as the start of integration paths.
    pub foot: Point,
}

/// Which slot of `F(z, w) = 0` the Newton continuation solves for.
#[derive(Clone, Copy, PartialEq)]
enum Slot {
    /// solve for `w = S(z)`
    W,
    /// solve for `z = S̃(w)`
    Z,
}

impl Curve {
    pub fn circle(radius: f64) -> Result<Self> {
        if radius <= 0.0 || !radius.is_finite() {
            return Err(Error::Config(format!(
                "circle radius must be positive, got {radius}"
            )));
        }
        Ok(Curve::Circle { radius })
    }

    /// Builds an implicit curve, checking that the reference point lies on it
    /// and is non-singular.
    pub fn implicit(f: BivariatePoly, reference: Point) -> Result<Self> {
        let fx = f.dx();
        let fy = f.dy();
        let scale = f.scale_at(reference.norm());
        if f.eval_real(reference.x, reference.y).abs() > 1e-9 * scale {
            return Err(Error::Config(format!(
                "reference point {reference} does not lie on f = 0"
            )));
        }
        let g = (
            fx.eval_real(reference.x, reference.y),
            fy.eval_real(reference.x, reference.y),
        );
        if g.0.hypot(g.1) < 1e-10 * scale {
            return Err(Error::Config(
                "gradient of f vanishes at the reference point".into(),
            ));
        }
        let fxx = fx.dx();
        let fxy = fx.dy();
        let fyy = fy.dy();
        Ok(Curve::Implicit(ImplicitCurve {
            f,
            fx,
            fy,
            fxx,
            fxy,
            fyy,
            reference,
        }))
    }

    /// `S⁽ᵒʳᵈᵉʳ⁾(z)`; order 0 is the Schwarz function itself.
    pub fn schwarz(&self, z: C, order: usize) -> Result<C> {
        Ok(self.schwarz_jet(z, order)?.nth_derivative(order))
    }

    /// `S̃⁽ᵒʳᵈᵉʳ⁾(w)` for the inverse branch.
    pub fn schwarz_inverse(&self, w: C, order: usize) -> Result<C> {
        Ok(self.schwarz_inverse_jet(w, order)?.nth_derivative(order))
    }

    /// Taylor jet of `S` at `z` with `order + 1` coefficients.
    pub fn schwarz_jet(&self, z: C, order: usize) -> Result<Jet> {
        match self {
            Curve::LineY0 => Ok(Jet::variable(z, order + 1)),
            Curve::Circle { radius } => circle_jet(*radius, z, order),
            Curve::Implicit(ic) => implicit_jet(ic, z, order, Slot::W),
        }
    }

    /// Taylor jet of `S̃` at `w`.
    pub fn schwarz_inverse_jet(&self, w: C, order: usize) -> Result<Jet> {
        match self {
            Curve::LineY0 => Ok(Jet::variable(w, order + 1)),
            // The circle's Schwarz function is an involution: S̃ = S.
            Curve::Circle { radius } => circle_jet(*radius, w, order),
            Curve::Implicit(ic) => implicit_jet(ic, w, order, Slot::Z),
        }
    }

    /// Anti-conformal reflection `P ↦ conj(S(P))`. Points on Γ map to
    /// themselves.
    pub fn reflect_point(&self, p: Point) -> Result<ReflectedPoint> {
        self.validity_check(p)?;
        let s = self.schwarz(p.to_z(), 0)?;
        let image = Point::new(s.re, -s.im);
        let foot = self.foot_point(p)?;
        Ok(ReflectedPoint {
            source: p,
            image,
            foot,
        })
    }

    /// Operational test for "sufficiently close to Γ": the Schwarz function
    /// must be evaluable at `P` with `|S'|` in a sane window.
    pub fn validity_check(&self, p: Point) -> Result<()> {
        let z = p.to_z();
        let jet = self
            .schwarz_jet(z, 1)
            .map_err(|e| Error::OutsideValidity(format!("S({z}) not evaluable: {e}")))?;
        let sp = jet.nth_derivative(1).norm();
        if !(SPRIME_MIN..=SPRIME_MAX).contains(&sp) {
            return Err(Error::OutsideValidity(format!(
                "|S'({z})| = {sp:.3e} outside [{SPRIME_MIN:.0e}, {SPRIME_MAX:.0e}]"
            )));
        }
        Ok(())
    }

    /// Start point on Γ for integration paths: the vertical projection for the
    /// line, the radial projection for the circle, the nearest point for
    /// implicit curves.
    pub fn foot_point(&self, p: Point) -> Result<Point> {
        match self {
            Curve::LineY0 => Ok(Point::new(p.x, 0.0)),
            Curve::Circle { radius } => {
                let r = p.norm();
                if r < SPRIME_MIN {
                    return Err(Error::OutsideValidity("point at circle center".into()));
                }
                Ok(Point::new(radius * p.x / r, radius * p.y / r))
            }
            Curve::Implicit(ic) => nearest_on_curve(ic, p),
        }
    }

    /// Unit normal at a point of Γ oriented from U₁ into U₂.
    ///
    /// Convention: U₁ is the upper half plane for the line, the exterior for
    /// the circle, and `{f > 0}` for implicit curves (which agrees with the
    /// circle convention for `f = x² + y² - a²`).
    pub fn normal_into_u2(&self, p: Point) -> Result<(f64, f64)> {
        if !self.is_on_curve(p, 1e-10) {
            return Err(Error::NotOnCurve);
        }
        match self {
            Curve::LineY0 => Ok((0.0, -1.0)),
            Curve::Circle { .. } => {
                let r = p.norm();
                Ok((-p.x / r, -p.y / r))
            }
            Curve::Implicit(ic) => {
                let gx = ic.fx.eval_real(p.x, p.y);
                let gy = ic.fy.eval_real(p.x, p.y);
                let n = gx.hypot(gy);
                if n == 0.0 {
                    return Err(Error::DerivativeSingular);
                }
                Ok((-gx / n, -gy / n))
            }
        }
    }

    pub fn is_on_curve(&self, p: Point, tol: f64) -> bool {
        match self {
            Curve::LineY0 => p.y.abs() <= tol,
            Curve::Circle { radius } => (p.norm() - radius).abs() <= tol,
            Curve::Implicit(ic) => {
                let g = ic.fx.eval_real(p.x, p.y).hypot(ic.fy.eval_real(p.x, p.y));
                ic.f.eval_real(p.x, p.y).abs() <= tol * g.max(1.0)
            }
        }
    }

    /// Deterministic sample of points on Γ. For the circle the samples avoid
    /// θ = ±π so that logarithmic fields stay off the branch cut.
    pub fn boundary_samples(&self, n: usize) -> Result<Vec<Point>> {
        match self {
            Curve::LineY0 => Ok((0..n)
                .map(|i| Point::new(-1.5 + 3.0 * (i as f64 + 0.5) / n as f64, 0.0))
                .collect()),
            Curve::Circle { radius } => Ok((0..n)
                .map(|i| {
                    let th = -std::f64::consts::PI
                        + 2.0 * std::f64::consts::PI * (i as f64 + 0.5) / n as f64;
                    Point::new(radius * th.cos(), radius * th.sin())
                })
                .collect()),
            Curve::Implicit(ic) => trace_samples(ic, n),
        }
    }

    /// Offset a boundary point into U₁ by distance `d` along the normal.
    pub fn offset_into_u1(&self, on_curve: Point, d: f64) -> Result<Point> {
        let (nx, ny) = self.normal_into_u2(on_curve)?;
        Ok(Point::new(on_curve.x - d * nx, on_curve.y - d * ny))
    }
}

fn circle_jet(radius: f64, z: C, order: usize) -> Result<Jet> {
    let r2 = radius * radius;
    if z.norm() * SPRIME_MAX.sqrt() < radius || z.norm() < 1e-300 {
        return Err(Error::OutsideValidity(format!(
            "|z| = {:.3e} too close to the circle center",
            z.norm()
        )));
    }
    // S(z) = a²/z, coefficient of δ^j is a²(-1)^j / z^{j+1}
    let mut c = Vec::with_capacity(order + 1);
    let mut cur = C::new(r2, 0.0) / z;
    c.push(cur);
    for _ in 0..order {
        cur = -cur / z;
        c.push(cur);
    }
    Ok(Jet::from_coeffs(c))
}

fn newton_solve(ic: &ImplicitCurve, fixed: C, start: C, slot: Slot) -> Result<C> {
    let tol = NEWTON_TOL * ic.f.scale_at(fixed.norm().max(start.norm()));
    let mut u = start;
    for _ in 0..NEWTON_MAX_ITER {
        let (r, d) = match slot {
            Slot::W => (ic.big_f(fixed, u), ic.big_f_w(fixed, u)),
            Slot::Z => (ic.big_f(u, fixed), ic.big_f_z(u, fixed)),
        };
        if r.norm() <= tol {
            return Ok(u);
        }
        if d.norm() < 1e-14 {
            return Err(Error::DerivativeSingular);
        }
        u -= r / d;
    }
    let r = match slot {
        Slot::W => ic.big_f(fixed, u),
        Slot::Z => ic.big_f(u, fixed),
    };
    if r.norm() <= tol {
        Ok(u)
    } else {
        Err(Error::NonConvergence(NEWTON_MAX_ITER))
    }
}

/// Newton continuation of the algebraic branch of `S` (or `S̃`), with an
/// 8-step homotopy from the reference point when the direct solve fails.
fn implicit_root(ic: &ImplicitCurve, at: C, slot: Slot) -> Result<C> {
    if let Ok(u) = newton_solve(ic, at, at.conj(), slot) {
        return Ok(u);
    }
    let zr = ic.reference.to_z();
    let (mut t_prev, mut u) = (zr, zr.conj());
    for step in 1..=HOMOTOPY_STEPS {
        let t = zr + (at - zr) * (step as f64 / HOMOTOPY_STEPS as f64);
        u = newton_solve(ic, t, u, slot).map_err(|_| {
            Error::OutsideValidity(format!(
                "homotopy stalled between {t_prev} and {t} while continuing the Schwarz branch"
            ))
        })?;
        t_prev = t;
    }
    Ok(u)
}

/// Order-by-order solution of `F(z, w(z)) = 0` on jets.
fn implicit_jet(ic: &ImplicitCurve, at: C, order: usize, slot: Slot) -> Result<Jet> {
    let root = implicit_root(ic, at, slot)?;
    let d = match slot {
        Slot::W => ic.big_f_w(at, root),
        Slot::Z => ic.big_f_z(root, at),
    };
    if d.norm() < 1e-14 * ic.f.scale_at(at.norm()) {
        return Err(Error::DerivativeSingular);
    }
    let len = order + 1;
    let own = Jet::variable(at, len);
    let mut sol = Jet::constant(root, len);
    for n in 1..=order {
        let (zj, wj) = match slot {
            Slot::W => (&own, &sol),
            Slot::Z => (&sol, &own),
        };
        let x = zj.add(wj).scale(C::new(0.5, 0.0));
        let y = zj.sub(wj).scale(C::new(1.0, 0.0) / C::new(0.0, 2.0));
        let res = ic.f.eval_jets(&x, &y);
        let cn = -res.coeff(n) / d;
        sol = {
            let mut c: Vec<C> = (0..len).map(|j| sol.coeff(j)).collect();
            c[n] = cn;
            Jet::from_coeffs(c)
        };
    }
    Ok(sol)
}

/// Nearest point of Γ to `p` by Newton on the distance stationarity system
/// `f(X) = 0`, `∇f(X) × (P - X) = 0`.
fn nearest_on_curve(ic: &ImplicitCurve, p: Point) -> Result<Point> {
    let scale = ic.f.scale_at(p.norm());
    // one gradient projection step to get near the curve
    let mut x = p.x;
    let mut y = p.y;
    let f0 = ic.f.eval_real(x, y);
    let (gx0, gy0) = (ic.fx.eval_real(x, y), ic.fy.eval_real(x, y));
    let g2 = gx0 * gx0 + gy0 * gy0;
    if g2 > 0.0 {
        x -= f0 * gx0 / g2;
        y -= f0 * gy0 / g2;
    }
    for _ in 0..60 {
        let f = ic.f.eval_real(x, y);
        let gx = ic.fx.eval_real(x, y);
        let gy = ic.fy.eval_real(x, y);
        let dx = p.x - x;
        let dy = p.y - y;
        let cross = gx * dy - gy * dx;
        if f.abs() <= 1e-12 * scale && cross.abs() <= 1e-11 * scale * (1.0 + dx.hypot(dy)) {
            return Ok(Point::new(x, y));
        }
        let gxx = ic.fxx.eval_real(x, y);
        let gxy = ic.fxy.eval_real(x, y);
        let gyy = ic.fyy.eval_real(x, y);
        // jacobian of (f, cross)
        let j11 = gx;
        let j12 = gy;
        let j21 = gxx * dy - gxy * dx + gy;
        let j22 = gxy * dy - gyy * dx - gx;
        let det = j11 * j22 - j12 * j21;
        if det.abs() < 1e-14 * scale * scale {
            return Err(Error::OutsideValidity(
                "degenerate foot-point system".into(),
            ));
        }
        x -= (f * j22 - cross * j12) / det;
        y -= (cross * j11 - f * j21) / det;
    }
    Err(Error::NonConvergence(60))
}

/// Walk along the curve with a tangent predictor and Newton corrector,
/// collecting `n` points. Deterministic.
fn trace_samples(ic: &ImplicitCurve, n: usize) -> Result<Vec<Point>> {
    let h = 0.12;
    let mut pts = Vec::with_capacity(n);
    let mut cur = ic.reference;
    for _ in 0..n {
        let gx = ic.fx.eval_real(cur.x, cur.y);
        let gy = ic.fy.eval_real(cur.x, cur.y);
        let g = gx.hypot(gy);
        if g == 0.0 {
            return Err(Error::DerivativeSingular);
        }
        let pred = Point::new(cur.x - h * gy / g, cur.y + h * gx / g);
        cur = nearest_on_curve(ic, pred)?;
        pts.push(cur);
    }
    Ok(pts)
}

/// The circle `x² + y² = a²` as an implicit curve; used to cross-check the
/// implicit machinery against the closed forms.
pub fn implicit_circle(radius: f64) -> Result<Curve> {
    Curve::implicit(
        BivariatePoly::new(vec![(2, 0, 1.0), (0, 2, 1.0), (0, 0, -radius * radius)]),
        Point::new(radius, 0.0),
    )
}
