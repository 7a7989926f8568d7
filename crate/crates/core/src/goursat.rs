//! Exact biharmonic fields in Goursat form.
//!
//! Every biharmonic function on a simply connected domain can be written
//! `u = Re(conj(z)·φ(z) + ψ(z))` with analytic `φ`, `ψ`. Restricting the pair
//! to a small term dictionary — integer powers `zⁿ`, `log z`, `z·log z` —
//! keeps all partial derivatives closed-form while spanning the polynomial
//! and radially-logarithmic test families used for verification.
//!
//! `Δu = 4·Re(φ'(z))` holds exactly in this representation, which gives an
//! independent route to the Laplacian besides second partials.

use crate::curve::Curve;
use crate::{Error, Point, Result, C};

/// Kind of analytic dictionary term.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum TermKind {
    /// `zⁿ`, `n` possibly negative.
    Power(i32),
    /// `log z`, principal branch.
    Log,
    /// `z·log z`, principal branch.
    ZLog,
}

/// One dictionary term with a complex coefficient.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct AnalyticTerm {
    pub kind: TermKind,
    pub coeff: C,
}

impl AnalyticTerm {
    pub fn power(n: i32, coeff: C) -> Self {
        AnalyticTerm {
            kind: TermKind::Power(n),
            coeff,
        }
    }

    pub fn log(coeff: C) -> Self {
        AnalyticTerm {
            kind: TermKind::Log,
            coeff,
        }
    }

    pub fn z_log(coeff: C) -> Self {
        AnalyticTerm {
            kind: TermKind::ZLog,
            coeff,
        }
    }

    /// `a`-th derivative of the term at `z`, `a ≤ 4`.
    fn derivative(&self, z: C, a: usize) -> C {
        match self.kind {
            TermKind::Power(n) => {
                if n >= 0 && (a as i32) > n {
                    return C::new(0.0, 0.0);
                }
                let mut fac = C::new(1.0, 0.0);
                for k in 0..a {
                    fac *= C::new((n - k as i32) as f64, 0.0);
                }
                self.coeff * fac * z.powi(n - a as i32)
            }
            TermKind::Log => {
                if a == 0 {
                    self.coeff * z.ln()
                } else {
                    // (log z)^(a) = (-1)^{a-1} (a-1)! z^{-a}
                    let sign = if a.is_multiple_of(2) { -1.0 } else { 1.0 };
                    let mut fac = 1.0;
                    for k in 1..a {
                        fac *= k as f64;
                    }
                    self.coeff * C::new(sign * fac, 0.0) * z.powi(-(a as i32))
                }
            }
            TermKind::ZLog => match a {
                0 => self.coeff * z * z.ln(),
                1 => self.coeff * (z.ln() + 1.0),
                _ => {
                    // (z log z)^(a) = (-1)^a (a-2)! z^{1-a} for a ≥ 2
                    let sign = if a.is_multiple_of(2) { 1.0 } else { -1.0 };
                    let mut fac = 1.0;
                    for k in 1..(a - 1) {
                        fac *= k as f64;
                    }
                    self.coeff * C::new(sign * fac, 0.0) * z.powi(1 - a as i32)
                }
            },
        }
    }

    fn is_singular_at_origin(&self) -> bool {
        match self.kind {
            TermKind::Power(n) => n < 0,
            TermKind::Log | TermKind::ZLog => true,
        }
    }

    fn has_branch_cut(&self) -> bool {
        matches!(self.kind, TermKind::Log | TermKind::ZLog)
    }
}

/// A biharmonic field `u = Re(conj(z)·φ(z) + ψ(z))`.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BiharmonicField {
    pub phi: Vec<AnalyticTerm>,
    pub psi: Vec<AnalyticTerm>,
}

impl BiharmonicField {
    pub fn new(phi: Vec<AnalyticTerm>, psi: Vec<AnalyticTerm>) -> Self {
        BiharmonicField { phi, psi }
    }

    pub fn zero() -> Self {
        BiharmonicField {
            phi: vec![],
            psi: vec![],
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        let map = |ts: &[AnalyticTerm]| {
            ts.iter()
                .map(|t| AnalyticTerm {
                    kind: t.kind,
                    coeff: t.coeff * s,
                })
                .collect()
        };
        BiharmonicField {
            phi: map(&self.phi),
            psi: map(&self.psi),
        }
    }

    /// Real linear combination `Σ cᵢ·fieldsᵢ` (term lists concatenate).
    pub fn linear_combination(fields: &[BiharmonicField], coeffs: &[f64]) -> Self {
        let mut out = BiharmonicField::zero();
        for (f, &c) in fields.iter().zip(coeffs) {
            if c == 0.0 {
                continue;
            }
            let s = f.scaled(c);
            out.phi.extend(s.phi);
            out.psi.extend(s.psi);
        }
        out
    }

    fn check_domain(&self, z: C) -> Result<()> {
        let singular = self
            .phi
            .iter()
            .chain(self.psi.iter())
            .any(|t| t.is_singular_at_origin());
        if singular && z.norm() < 1e-12 {
            return Err(Error::DomainViolation(format!(
                "field has a singular term at z = 0, evaluated at {z}"
            )));
        }
        let logs = self
            .phi
            .iter()
            .chain(self.psi.iter())
            .any(|t| t.has_branch_cut());
        if logs && z.im == 0.0 && z.re < 0.0 {
            return Err(Error::DomainViolation(format!(
                "logarithmic field evaluated on the branch cut at {z}"
            )));
        }
        Ok(())
    }

    fn phi_derivs(&self, z: C, up_to: usize) -> Vec<C> {
        (0..=up_to)
            .map(|a| self.phi.iter().map(|t| t.derivative(z, a)).sum())
            .collect()
    }

    fn psi_derivs(&self, z: C, up_to: usize) -> Vec<C> {
        (0..=up_to)
            .map(|a| self.psi.iter().map(|t| t.derivative(z, a)).sum())
            .collect()
    }

    /// `∂^{dx+dy} u / ∂x^{dx} ∂y^{dy}` at `p`, exactly, for `dx + dy ≤ 3`.
    ///
    /// The real derivative operator is expanded over Wirtinger monomials
    /// `∂_z^a ∂_z̄^b` using `∂_x = ∂_z + ∂_z̄`, `∂_y = i(∂_z - ∂_z̄)`; the
    /// Wirtinger derivatives of `Re(z̄φ + ψ)` are closed-form in `φ⁽ᵃ⁾, ψ⁽ᵃ⁾`.
    pub fn eval(&self, p: Point, dx: u32, dy: u32) -> Result<f64> {
        assert!(
            dx + dy <= 3,
            "derivatives above total order 3 not supported"
        );
        let z = p.to_z();
        self.check_domain(z)?;
        let order = (dx + dy) as usize;
        let phi = self.phi_derivs(z, order);
        let psi = self.psi_derivs(z, order);
        let zbar = z.conj();
        let i = C::new(0.0, 1.0);

        // expand (∂_z + ∂_z̄)^{dx} (i∂_z - i∂_z̄)^{dy}
        let mut ops: Vec<(usize, usize, C)> = vec![(0, 0, C::new(1.0, 0.0))];
        for _ in 0..dx {
            let mut next = Vec::with_capacity(ops.len() * 2);
            for &(a, b, c) in &ops {
                next.push((a + 1, b, c));
                next.push((a, b + 1, c));
            }
            ops = merge(next);
        }
        for _ in 0..dy {
            let mut next = Vec::with_capacity(ops.len() * 2);
            for &(a, b, c) in &ops {
                next.push((a + 1, b, c * i));
                next.push((a, b + 1, -c * i));
            }
            ops = merge(next);
        }

        // P1(a, b) = ∂_z^a ∂_z̄^b of (z̄ φ + ψ)/2; the conjugate-analytic half
        // is conj(P1(b, a)).
        let p1 = |a: usize, b: usize| -> C {
            match b {
                0 => (zbar * phi[a] + psi[a]) * 0.5,
                1 => phi[a] * 0.5,
                _ => C::new(0.0, 0.0),
            }
        };
        let mut acc = C::new(0.0, 0.0);
        for &(a, b, c) in &ops {
            acc += c * (p1(a, b) + p1(b, a).conj());
        }
        Ok(acc.re)
    }

    /// `Δu(p) = 4·Re(φ'(z))`, closed form.
    pub fn laplacian(&self, p: Point) -> Result<f64> {
        let z = p.to_z();
        self.check_domain(z)?;
        let d: C = self.phi.iter().map(|t| t.derivative(z, 1)).sum();
        Ok(4.0 * d.re)
    }

    /// Gradient of the (harmonic) Laplacian: `(Re 4φ'', -Im 4φ'')`.
    pub fn laplacian_gradient(&self, p: Point) -> Result<(f64, f64)> {
        let z = p.to_z();
        self.check_domain(z)?;
        let d2: C = self.phi.iter().map(|t| t.derivative(z, 2)).sum();
        Ok((4.0 * d2.re, -4.0 * d2.im))
    }

    /// Directional derivative of `u` (or of `Δu`) along the unit normal of
    /// `curve` at a point of Γ, normal oriented from U₁ into U₂.
    pub fn normal_derivative(
        &self,
        curve: &Curve,
        p_on_curve: Point,
        of_laplacian: bool,
    ) -> Result<f64> {
        let (nx, ny) = curve.normal_into_u2(p_on_curve)?;
        let (gx, gy) = if of_laplacian {
            self.laplacian_gradient(p_on_curve)?
        } else {
            (self.eval(p_on_curve, 1, 0)?, self.eval(p_on_curve, 0, 1)?)
        };
        Ok(nx * gx + ny * gy)
    }

    /// Numerical probe for harmonicity (`Δu ≡ 0`).
    pub fn is_harmonic(&self) -> bool {
        let probes = [
            Point::new(0.83, 0.31),
            Point::new(-0.42, 0.97),
            Point::new(1.21, -0.55),
            Point::new(0.3, 1.4),
            Point::new(-1.1, -0.6),
        ];
        let mut scale: f64 = 1.0;
        let mut worst: f64 = 0.0;
        for p in probes {
            match (self.laplacian(p), self.eval(p, 0, 0)) {
                (Ok(l), Ok(v)) => {
                    worst = worst.max(l.abs());
                    scale = scale.max(v.abs());
                }
                _ => return false,
            }
        }
        worst <= 1e-11 * scale
    }

    /// Whether `u` depends only on `r = |z|` (checked numerically).
    pub fn is_radial(&self) -> bool {
        for k in 0..5 {
            let th = 0.4 + 1.1 * k as f64;
            let p = Point::new(1.07 * th.cos(), 1.07 * th.sin());
            let (ux, uy) = match (self.eval(p, 1, 0), self.eval(p, 0, 1)) {
                (Ok(a), Ok(b)) => (a, b),
                _ => return false,
            };
            let u_theta = p.x * uy - p.y * ux;
            let scale = ux.abs().max(uy.abs()).max(1.0);
            if u_theta.abs() > 1e-10 * scale {
                return false;
            }
        }
        true
    }
}

fn merge(v: Vec<(usize, usize, C)>) -> Vec<(usize, usize, C)> {
    let mut out: Vec<(usize, usize, C)> = Vec::with_capacity(v.len());
    'outer: for item in v {
        for o in out.iter_mut() {
            if o.0 == item.0 && o.1 == item.1 {
                o.2 += item.2;
                continue 'outer;
            }
        }
        out.push(item);
    }
    out
}
