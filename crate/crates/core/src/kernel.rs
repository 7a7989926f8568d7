//! Series kernels for the reflected fundamental solutions.
//!
//! For the condition pairs II–V the reflected fundamental solution is built
//! from two one-sided series,
//!
//! ```text
//! G̃₁ = Σₖ bₖ(z,w,w₀) · f_k(S̃(w) - z₀),     G̃₂ = Σₖ aₖ(z,w,z₀) · f_k(S(z) - w₀),
//! ```
//!
//! where the special functions `f_k` place the logarithmic singularities on
//! the characteristics through the reflected point. The bare log multipliers
//!
//! ```text
//! V₁ = Σₖ bₖ (S̃(w)-z₀)ᵏ/k!,               V₂ = Σₖ aₖ (S(z)-w₀)ᵏ/k!
//! ```
//!
//! drive the path-integral correction of the reflection formulas through
//! `V = V₁ - V₂`.
//!
//! The coefficients satisfy `∂²aₖ/∂w² = 0`, i.e. each is linear in the
//! opposite characteristic variable. A side is therefore represented by two
//! jets in its own variable, `aₖ = pₖ(z) + qₖ(z)·w`, and the nested operator
//! `D̂ = ∂(1/S′ · )/∂z` is iterated on jets of the Schwarz function. On the
//! line and circle those jets are closed-form Laurent data, so the
//! coefficients come out machine-exact; on implicit curves they come from the
//! Newton jet solver and the series order is capped at 12.

use crate::curve::Curve;
use crate::jet::Jet;
use crate::{BoundaryCase, Error, Point, Result, C};

/// Coefficients of `-1/(16π)` in the fundamental solution split.
pub const G_PREFACTOR: f64 = -1.0 / (16.0 * std::f64::consts::PI);

/// Jet order carried through series evaluation (value + 3 derivatives).
const JET_ORDER: usize = 3;
/// Absolute floor of the relative truncation gate.
const GATE_REL: f64 = 1e-13;
/// A series whose terms are no longer decaying at this rate by `k_max` is
/// reported as not converged instead of returning a value. Tails of series
/// that do decay but miss the strict gate (the implicit-curve regime, where
/// the order cap rules the gate out) are returned as diagnostics instead.
const NOT_CONVERGED_RATIO: f64 = 0.97;
/// Implicit-curve series are capped at this order: the nested derivatives of
/// the jet-solved Schwarz function amplify noise past it.
const IMPLICIT_K_CAP: usize = 12;

/// `f_k(ξ) = ξᵏ/k!·(ln ξ - C_k)` for `k ≥ 0` (`C₀ = 0`, `C_k = Σ 1/l`), and
/// `f_k(ξ) = (-1)^{-k-1}(-k-1)!·ξᵏ` for `k ≤ -1`, so that `f_k' = f_{k-1}`.
pub fn f_k(k: i32, xi: C) -> Result<C> {
    if xi.re == 0.0 && xi.im == 0.0 {
        return Err(Error::SingularArgument);
    }
    if k >= 0 {
        let mut pow_over_fact = C::new(1.0, 0.0);
        let mut ck = 0.0;
        for i in 1..=k {
            pow_over_fact = pow_over_fact * xi / (i as f64);
            ck += 1.0 / (i as f64);
        }
        Ok(pow_over_fact * (xi.ln() - ck))
    } else {
        let m = (-k - 1) as usize;
        let sign = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
        let mut fact = 1.0;
        for i in 1..=m {
            fact *= i as f64;
        }
        Ok(xi.powi(k) * sign * fact)
    }
}

/// Which side of the kernel a coefficient belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `aₖ(z, w, z₀)`, series in `S(z) - w₀`.
    A,
    /// `bₖ(z, w, w₀)`, series in `S̃(w) - z₀`.
    B,
}

/// Which series to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Component {
    V1,
    V2,
    /// `V = V₁ - V₂`.
    V,
}

/// Value of a truncated series together with truncation diagnostics.
#[derive(Debug, Clone, Copy)]
pub struct SeriesValue {
    pub value: C,
    /// Estimated magnitude of the dropped tail.
    pub tail_bound: f64,
    pub terms_used: usize,
    /// Whether the three-term truncation gate was met before `k_max`.
    pub converged: bool,
}

/// Iterator producing the coefficient jets `(pₖ, qₖ)` of one side,
/// `coefficientₖ = pₖ + qₖ·(other variable)`, as jets in the side's own
/// variable.
struct CoeffLadder {
    case: BoundaryCase,
    /// S (or S̃) truncated to output length.
    s_q: Jet,
    /// 1/S′ truncated to output length.
    inv_q: Jet,
    /// full-length 1/S′ for the ladder.
    inv_sp: Jet,
    /// `E_{k-1}` at full remaining length.
    e_prev: Jet,
    /// `(1/S′)·E_{k-2}` truncated, i.e. `g_{k-1}`, for the cases that need it.
    g_prev: Option<Jet>,
    /// `(ζ - ζ₀)` as a jet in the own variable.
    var_minus_src: Jet,
    k: usize,
}

impl CoeffLadder {
    /// `s`: jet of S (a-side) or S̃ (b-side) at the own variable's value;
    /// its length bounds how many coefficients the ladder can produce.
    fn new(case: BoundaryCase, s: &Jet, own: C, own_source: C, out_len: usize) -> Self {
        let sp = s.derivative();
        let inv_sp = sp.recip();
        CoeffLadder {
            case,
            s_q: s.truncated(out_len),
            inv_q: inv_sp.truncated(out_len),
            inv_sp,
            e_prev: Jet::constant(C::new(1.0, 0.0), s.len() - 1),
            g_prev: None,
            var_minus_src: Jet::variable(own - own_source, out_len),
            k: 0,
        }
    }
}

impl Iterator for CoeffLadder {
    type Item = (Jet, Jet);

    fn next(&mut self) -> Option<(Jet, Jet)> {
        self.k += 1;
        let k = self.k;
        let out_len = self.s_q.len();
        if self.e_prev.len() < 2 {
            return None;
        }
        // g_k = (1/S′)·E_{k-1}; differentiating the same product advances the
        // ladder to E_k.
        let g_full = self.inv_sp.truncated(self.e_prev.len()).mul(&self.e_prev);
        let g_k = g_full.truncated(out_len);
        let d_k = self.g_prev.clone(); // (1/S′)·E_{k-2} = g_{k-1}
        self.e_prev = g_full.derivative();
        self.g_prev = Some(g_k.clone());

        let sign = |odd: bool| if odd { -1.0 } else { 1.0 };
        // (-1)^{k-1} and (-1)^k
        let s_km1 = sign(k.is_multiple_of(2));
        let s_k = sign(!k.is_multiple_of(2));

        let (p, q) = match (self.case, k) {
            (BoundaryCase::II, _) => {
                let q = g_k.scale(C::new(s_km1, 0.0));
                let mut p = self.s_q.mul(&q).scale(C::new(-1.0, 0.0));
                if k == 1 {
                    p = p.add(&self.var_minus_src);
                }
                (p, q)
            }
            (BoundaryCase::III, 1) => {
                let q = self.inv_q.clone();
                let p = self
                    .var_minus_src
                    .scale(C::new(-1.0, 0.0))
                    .sub(&self.s_q.mul(&self.inv_q));
                (p, q)
            }
            (BoundaryCase::III, _) => {
                let d = d_k.expect("ladder supplies g_{k-1} from k ≥ 2 on");
                let q = g_k.scale(C::new(-s_k, 0.0));
                let p = d
                    .scale(C::new(2.0 * k as f64, 0.0))
                    .add(&self.s_q.mul(&g_k))
                    .scale(C::new(s_k, 0.0));
                (p, q)
            }
            (BoundaryCase::IV, 1) => {
                let q = self.inv_q.scale(C::new(-1.0, 0.0));
                let p = self.var_minus_src.add(&self.s_q.mul(&self.inv_q));
                (p, q)
            }
            (BoundaryCase::IV, _) => {
                let q = g_k.scale(C::new(s_k, 0.0));
                let p = self.s_q.mul(&g_k).scale(C::new(-s_k, 0.0));
                (p, q)
            }
            (BoundaryCase::V, 1) => {
                let q = self.inv_q.scale(C::new(-1.0, 0.0));
                let p = self
                    .var_minus_src
                    .scale(C::new(-1.0, 0.0))
                    .add(&self.s_q.mul(&self.inv_q));
                (p, q)
            }
            (BoundaryCase::V, _) => {
                let d = d_k.expect("ladder supplies g_{k-1} from k ≥ 2 on");
                let q = g_k.scale(C::new(s_k, 0.0));
                let p = d
                    .scale(C::new((2 * k - 4) as f64, 0.0))
                    .add(&self.s_q.mul(&g_k))
                    .scale(C::new(s_km1, 0.0));
                (p, q)
            }
            (BoundaryCase::I, _) => unreachable!("case I has no series kernel"),
        };
        Some((p, q))
    }
}

/// Kind of multiplier attached to the coefficients.
#[derive(Clone, Copy, PartialEq)]
enum Multiplier {
    /// `ξᵏ/k!` — the bare series `V`.
    Power,
    /// `f_k(ξ)` — the reflected fundamental solution.
    Special,
}

/// One summed side: jets (in the own variable) of `Σ pₖ·mₖ` and `Σ qₖ·mₖ`.
struct SideSeries {
    a: Jet,
    b: Jet,
    terms_used: usize,
    converged: bool,
    tail_bound: f64,
}

fn side_series(
    case: BoundaryCase,
    s: &Jet,
    own: C,
    own_source: C,
    other_source: C,
    k_max: usize,
    mult: Multiplier,
) -> Result<SideSeries> {
    let out_len = JET_ORDER + 1;
    let xi_jet = s.truncated(out_len).add_scalar(-other_source);
    let xi0 = xi_jet.value();

    // fluctuation powers h^m/m! for composing f_k with the ξ jet
    let special_pows = if mult == Multiplier::Special {
        let h = xi_jet.add_scalar(-xi0);
        let h2 = h.mul(&h).scale(C::new(0.5, 0.0));
        let h3 = h.mul(&h).mul(&h).scale(C::new(1.0 / 6.0, 0.0));
        Some((h, h2, h3))
    } else {
        None
    };

    let mut ladder = CoeffLadder::new(case, s, own, own_source, out_len);
    let mut acc_a = Jet::constant(C::new(0.0, 0.0), out_len);
    let mut acc_b = Jet::constant(C::new(0.0, 0.0), out_len);
    let mut m_pow = Jet::constant(C::new(1.0, 0.0), out_len); // ξ^k/k!, starts at k=0
    let mut last3 = [f64::INFINITY; 3];
    let mut prev_mag = f64::INFINITY;
    let mut terms_used = 0;
    let mut converged = false;
    let mut last_ratio: f64 = 0.0;

    for k in 1..=k_max {
        let Some((p, q)) = ladder.next() else {
            return Err(Error::Internal(format!(
                "coefficient ladder exhausted at k = {k} (jet too short)"
            )));
        };
        let m_k = match mult {
            Multiplier::Power => {
                m_pow = m_pow.mul(&xi_jet).scale(C::new(1.0 / k as f64, 0.0));
                m_pow.clone()
            }
            Multiplier::Special => {
                let (h, h2, h3) = special_pows.as_ref().expect("set for Special");
                let f0 = f_k(k as i32, xi0)?;
                let f1 = f_k(k as i32 - 1, xi0)?;
                let f2 = f_k(k as i32 - 2, xi0)?;
                let f3 = f_k(k as i32 - 3, xi0)?;
                Jet::constant(f0, out_len)
                    .add(&h.scale(f1))
                    .add(&h2.scale(f2))
                    .add(&h3.scale(f3))
            }
        };
        let ta = p.mul(&m_k);
        let tb = q.mul(&m_k);
        acc_a = acc_a.add(&ta);
        acc_b = acc_b.add(&tb);
        terms_used = k;

        let mag = ta.max_coeff().max(tb.max_coeff());
        last_ratio = if prev_mag > 0.0 && prev_mag.is_finite() {
            mag / prev_mag
        } else {
            0.0
        };
        prev_mag = mag;
        last3[k % 3] = mag;
        let scale = acc_a.value().norm().max(acc_b.value().norm()).max(1.0);
        if last3.iter().all(|&m| m < GATE_REL * scale) {
            converged = true;
            break;
        }
    }

    let tail_bound = if converged {
        last3.iter().cloned().fold(0.0, f64::max)
    } else {
        if last_ratio >= NOT_CONVERGED_RATIO {
            return Err(Error::NotConverged {
                terms: terms_used,
                tail: if last_ratio >= 1.0 {
                    f64::INFINITY
                } else {
                    prev_mag * last_ratio / (1.0 - last_ratio)
                },
            });
        }
        prev_mag * last_ratio / (1.0 - last_ratio)
    };

    Ok(SideSeries {
        a: acc_a,
        b: acc_b,
        terms_used,
        converged,
        tail_bound,
    })
}

/// All mixed partials of `V = V₁ - V₂` needed by the path-integral
/// correction.
#[derive(Debug, Clone, Copy)]
pub struct VPartials {
    pub v: C,
    pub vz: C,
    pub vw: C,
    pub vzw: C,
    pub vzzw: C,
    pub vzww: C,
    pub terms_used: usize,
    pub tail_bound: f64,
}

impl VPartials {
    pub fn vx(&self) -> C {
        self.vz + self.vw
    }

    pub fn vy(&self) -> C {
        C::new(0.0, 1.0) * (self.vz - self.vw)
    }

    /// Real-variable Laplacian `Δ = 4 ∂²/∂z∂w`.
    pub fn lap(&self) -> C {
        4.0 * self.vzw
    }

    pub fn lap_x(&self) -> C {
        4.0 * (self.vzzw + self.vzww)
    }

    pub fn lap_y(&self) -> C {
        C::new(0.0, 4.0) * (self.vzzw - self.vzww)
    }
}

/// Truncated series data for `V₁`, `V₂` and the reflected fundamental
/// solution, for one boundary case, curve, and source point.
#[derive(Debug, Clone)]
pub struct KernelSeries {
    pub case: BoundaryCase,
    curve: Curve,
    pub k_max: usize,
    pub source_z: C,
    pub source_w: C,
}

impl KernelSeries {
    pub fn new(case: BoundaryCase, curve: &Curve, k_max: usize, z0: C, w0: C) -> Result<Self> {
        if !case.has_series_kernel() {
            return Err(Error::Unsupported(
                "case i uses the closed point formula, not a series kernel".into(),
            ));
        }
        let k_max = match curve {
            Curve::Implicit(_) => k_max.min(IMPLICIT_K_CAP),
            _ => k_max,
        };
        if k_max < 2 {
            return Err(Error::Config("kernel truncation must be at least 2".into()));
        }
        Ok(KernelSeries {
            case,
            curve: curve.clone(),
            k_max,
            source_z: z0,
            source_w: w0,
        })
    }

    /// Series for a real source point (`w₀ = conj z₀`).
    pub fn for_source(case: BoundaryCase, curve: &Curve, k_max: usize, p: Point) -> Result<Self> {
        KernelSeries::new(case, curve, k_max, p.to_z(), p.to_w())
    }

    fn jet_len_order(&self) -> usize {
        self.k_max + JET_ORDER + 1
    }

    fn a_side(&self, z: C, mult: Multiplier) -> Result<SideSeries> {
        let s = self.curve.schwarz_jet(z, self.jet_len_order())?;
        side_series(
            self.case,
            &s,
            z,
            self.source_z,
            self.source_w,
            self.k_max,
            mult,
        )
    }

    fn b_side(&self, w: C, mult: Multiplier) -> Result<SideSeries> {
        let st = self.curve.schwarz_inverse_jet(w, self.jet_len_order())?;
        side_series(
            self.case,
            &st,
            w,
            self.source_w,
            self.source_z,
            self.k_max,
            mult,
        )
    }

    /// Coefficient `aₖ` (side A) or `bₖ` (side B) at the point `(z, w)`.
    pub fn coefficient(&self, side: Side, k: usize, z: C, w: C) -> Result<C> {
        assert!(k >= 1);
        let order = k + JET_ORDER + 1;
        let (s, own, own_src, other) = match side {
            Side::A => (self.curve.schwarz_jet(z, order)?, z, self.source_z, w),
            Side::B => (
                self.curve.schwarz_inverse_jet(w, order)?,
                w,
                self.source_w,
                z,
            ),
        };
        let mut ladder = CoeffLadder::new(self.case, &s, own, own_src, 1);
        let (p, q) = ladder
            .nth(k - 1)
            .ok_or_else(|| Error::Internal("ladder exhausted".into()))?;
        Ok(p.value() + q.value() * other)
    }

    /// Truncated series value of `V₁`, `V₂` or `V` with term-wise mixed
    /// partials, `dz, dw ≤ 2`, `dz + dw ≤ 3`.
    pub fn eval(&self, comp: Component, z: C, w: C, dz: u32, dw: u32) -> Result<SeriesValue> {
        assert!(dz <= 2 && dw <= 2 && dz + dw <= 3);
        let (dz, dw) = (dz as usize, dw as usize);
        let v2 = |this: &Self| -> Result<SeriesValue> {
            let side = this.a_side(z, Multiplier::Power)?;
            let value = match dw {
                0 => side.a.nth_derivative(dz) + side.b.nth_derivative(dz) * w,
                1 => side.b.nth_derivative(dz),
                _ => C::new(0.0, 0.0),
            };
            Ok(SeriesValue {
                value,
                tail_bound: side.tail_bound,
                terms_used: side.terms_used,
                converged: side.converged,
            })
        };
        let v1 = |this: &Self| -> Result<SeriesValue> {
            let side = this.b_side(w, Multiplier::Power)?;
            let value = match dz {
                0 => side.a.nth_derivative(dw) + side.b.nth_derivative(dw) * z,
                1 => side.b.nth_derivative(dw),
                _ => C::new(0.0, 0.0),
            };
            Ok(SeriesValue {
                value,
                tail_bound: side.tail_bound,
                terms_used: side.terms_used,
                converged: side.converged,
            })
        };
        match comp {
            Component::V2 => v2(self),
            Component::V1 => v1(self),
            Component::V => {
                let one = v1(self)?;
                let two = v2(self)?;
                Ok(SeriesValue {
                    value: one.value - two.value,
                    tail_bound: one.tail_bound + two.tail_bound,
                    terms_used: one.terms_used.max(two.terms_used),
                    converged: one.converged && two.converged,
                })
            }
        }
    }

    /// Everything the path-integral correction needs at one point, in one
    /// pass over both sides.
    pub fn v_partials(&self, z: C, w: C) -> Result<VPartials> {
        let a = self.a_side(z, Multiplier::Power)?;
        let b = self.b_side(w, Multiplier::Power)?;
        // V₂ = A(z) + B(z)·w, V₁ = Cc(w) + Dd(w)·z
        let (a0, a1) = (a.a.nth_derivative(0), a.a.nth_derivative(1));
        let (b0, b1, b2) = (
            a.b.nth_derivative(0),
            a.b.nth_derivative(1),
            a.b.nth_derivative(2),
        );
        let (c0, c1) = (b.a.nth_derivative(0), b.a.nth_derivative(1));
        let (d0, d1, d2) = (
            b.b.nth_derivative(0),
            b.b.nth_derivative(1),
            b.b.nth_derivative(2),
        );
        Ok(VPartials {
            v: (c0 + d0 * z) - (a0 + b0 * w),
            vz: d0 - (a1 + b1 * w),
            vw: (c1 + d1 * z) - b0,
            vzw: d1 - b1,
            vzzw: -b2,
            vzww: d2,
            terms_used: a.terms_used.max(b.terms_used),
            tail_bound: a.tail_bound + b.tail_bound,
        })
    }

    /// Mixed partial `∂^dz_z ∂^dw_w G̃` of the reflected fundamental solution,
    /// including the `-1/(16π)` prefactor. Valid for `dz, dw ≤ 3` (each side
    /// is exactly linear in the opposite variable).
    pub fn reflected_g(&self, z: C, w: C) -> Result<ReflectedG> {
        let a = self.a_side(z, Multiplier::Special)?;
        let b = self.b_side(w, Multiplier::Special)?;
        Ok(ReflectedG { a, b, z, w })
    }
}

/// Partial-derivative table of the reflected fundamental solution at a point.
pub struct ReflectedG {
    a: SideSeries,
    b: SideSeries,
    z: C,
    w: C,
}

impl ReflectedG {
    pub fn partial(&self, dz: usize, dw: usize) -> C {
        assert!(dz <= JET_ORDER && dw <= JET_ORDER);
        let from_a = match dw {
            0 => self.a.a.nth_derivative(dz) + self.a.b.nth_derivative(dz) * self.w,
            1 => self.a.b.nth_derivative(dz),
            _ => C::new(0.0, 0.0),
        };
        let from_b = match dz {
            0 => self.b.a.nth_derivative(dw) + self.b.b.nth_derivative(dw) * self.z,
            1 => self.b.b.nth_derivative(dw),
            _ => C::new(0.0, 0.0),
        };
        (from_a + from_b) * G_PREFACTOR
    }

    pub fn terms_used(&self) -> usize {
        self.a.terms_used.max(self.b.terms_used)
    }

    pub fn tail_bound(&self) -> f64 {
        self.a.tail_bound + self.b.tail_bound
    }
}

/// Mixed partial `∂^dz_z ∂^dw_w G` of the fundamental solution
/// `G = -1/(16π)·[f₁(z-z₀)(w-w₀) + (z-z₀)f₁(w-w₀)]`.
pub fn fundamental_g_partial(z: C, w: C, z0: C, w0: C, dz: usize, dw: usize) -> Result<C> {
    let zfac = |d: usize, v: C| match d {
        0 => v,
        1 => C::new(1.0, 0.0),
        _ => C::new(0.0, 0.0),
    };
    let t1 = f_k(1 - dz as i32, z - z0)? * zfac(dw, w - w0);
    let t2 = zfac(dz, z - z0) * f_k(1 - dw as i32, w - w0)?;
    Ok((t1 + t2) * G_PREFACTOR)
}

/// Max violation of the case's two matching conditions between `G̃` and `G`
/// at a point of the real curve (`w = conj z`).
pub fn check_boundary_match(
    case: BoundaryCase,
    curve: &Curve,
    z_on_curve: C,
    z0: C,
    w0: C,
    k_max: usize,
) -> Result<f64> {
    let series = KernelSeries::new(case, curve, k_max, z0, w0)?;
    let z = z_on_curve;
    let w = z.conj();
    let gt = series.reflected_g(z, w)?;
    let diff = |dz: usize, dw: usize| -> Result<C> {
        Ok(gt.partial(dz, dw) - fundamental_g_partial(z, w, z0, w0, dz, dw)?)
    };
    let p = Point::from_z(z);
    let (nx, ny) = curve.normal_into_u2(p)?;
    let n = C::new(nx, ny);

    let value = || -> Result<C> { diff(0, 0) };
    let laplacian = || -> Result<C> { Ok(4.0 * diff(1, 1)?) };
    let normal = || -> Result<C> {
        let gx = diff(1, 0)? + diff(0, 1)?;
        let gy = C::new(0.0, 1.0) * (diff(1, 0)? - diff(0, 1)?);
        Ok(n.re * gx + n.im * gy)
    };
    let normal_lap = || -> Result<C> {
        let gx = 4.0 * (diff(2, 1)? + diff(1, 2)?);
        let gy = C::new(0.0, 4.0) * (diff(2, 1)? - diff(1, 2)?);
        Ok(n.re * gx + n.im * gy)
    };

    let (c1, c2) = match case {
        BoundaryCase::II => (value()?, laplacian()?),
        BoundaryCase::III => (normal()?, laplacian()?),
        BoundaryCase::IV => (value()?, normal_lap()?),
        BoundaryCase::V => (normal()?, normal_lap()?),
        BoundaryCase::I => {
            return Err(Error::Unsupported(
                "case i kernels are out of scope (point formula instead)".into(),
            ))
        }
    };
    Ok(c1.norm().max(c2.norm()))
}

/// Residuals of the Cauchy–Goursat characterization of `V₂` for case II:
///
/// 1. biharmonicity (second `w`-difference of values — `V₂` is linear in `w`),
/// 2. `V₂ = (z-z₀)(w-w₀)` on `Γ_ℂ`,
/// 3. `∂²V₂/∂z∂w = 1` on `Γ_ℂ` (the complexified Laplacian without the
///    factor 4),
/// 4. `V₂ = 0` on the characteristic `S(z) = w₀`,
/// 5. `∂V₂/∂z = (z-z₀)S′ + (w-S(z))` on the same characteristic.
pub fn check_cauchy_goursat(curve: &Curve, z0: C, w0: C, k_max: usize) -> Result<Vec<f64>> {
    let series = KernelSeries::new(BoundaryCase::II, curve, k_max, z0, w0)?;
    let boundary = matching_boundary_samples(curve, Point::from_z(z0), 16)?;

    // 1. second difference in w at off-curve probes; V₂ is linear in w, so
    // the stencil must vanish. Convergence of the series depends on z only.
    let mut r1: f64 = 0.0;
    let h = 1e-2;
    for zc in boundary.iter().step_by(4) {
        let p_on = Point::from_z(*zc);
        let (nx, ny) = curve.normal_into_u2(p_on)?;
        let z = zc - 0.03 * C::new(nx, ny);
        let w = z.conj() + C::new(0.01, 0.02);
        let vp = series.eval(Component::V2, z, w + h, 0, 0)?.value;
        let v0 = series.eval(Component::V2, z, w, 0, 0)?.value;
        let vm = series.eval(Component::V2, z, w - h, 0, 0)?.value;
        r1 = r1.max(((vp - 2.0 * v0 + vm) / (h * h)).norm());
    }

    // 2. and 3. on the complexified curve
    let mut r2: f64 = 0.0;
    let mut r3: f64 = 0.0;
    for zc in &boundary {
        let z = *zc;
        let w = curve.schwarz(z, 0)?;
        let v = series.eval(Component::V2, z, w, 0, 0)?.value;
        r2 = r2.max((v - (z - z0) * (w - w0)).norm());
        let vzw = series.eval(Component::V2, z, w, 1, 1)?.value;
        r3 = r3.max((vzw - 1.0).norm());
    }

    // 4. and 5. on the characteristic z = S̃(w₀)
    let z_star = curve.schwarz_inverse(w0, 0)?;
    let s_star = curve.schwarz(z_star, 0)?;
    let sp_star = curve.schwarz(z_star, 1)?;
    let mut r4: f64 = 0.0;
    let mut r5: f64 = 0.0;
    for off in [
        C::new(0.0, 0.0),
        C::new(0.1, 0.05),
        C::new(-0.07, 0.12),
        C::new(0.0, -0.15),
    ] {
        let w = z_star.conj() + off;
        let v = series.eval(Component::V2, z_star, w, 0, 0)?.value;
        r4 = r4.max(v.norm());
        let vz = series.eval(Component::V2, z_star, w, 1, 0)?.value;
        let want = (z_star - z0) * sp_star + (w - s_star);
        r5 = r5.max((vz - want).norm());
    }

    Ok(vec![r1, r2, r3, r4, r5])
}

/// Boundary points within the validity neighborhood of a source.
///
/// The series kernels converge on the part of `Γ_ℂ` reachable by the contour
/// deformation, which is a neighborhood of the source's foot point — for the
/// circle an arc, not the whole circle. On the line the series terminate and
/// any window works.
pub fn matching_boundary_samples(curve: &Curve, source: Point, n: usize) -> Result<Vec<C>> {
    matching_boundary_samples_arc(curve, source, n, 0.35)
}

/// [`matching_boundary_samples`] with an explicit arc half-width around the
/// foot point (shorter truncations need a narrower window).
pub fn matching_boundary_samples_arc(
    curve: &Curve,
    source: Point,
    n: usize,
    half_width: f64,
) -> Result<Vec<C>> {
    let foot = curve.foot_point(source)?;
    match curve {
        Curve::LineY0 => Ok((0..n)
            .map(|i| C::new(foot.x - 1.2 + 2.4 * (i as f64 + 0.5) / n as f64, 0.0))
            .collect()),
        Curve::Circle { radius } => {
            let th0 = foot.y.atan2(foot.x);
            Ok((0..n)
                .map(|i| {
                    let th = th0 - half_width + 2.0 * half_width * (i as f64 + 0.5) / n as f64;
                    C::from_polar(*radius, th)
                })
                .collect())
        }
        Curve::Implicit(_) => {
            let (nx, ny) = curve.normal_into_u2(foot)?;
            let (tx, ty) = (-ny, nx);
            let mut out = Vec::with_capacity(n);
            for i in 0..n {
                let s = -half_width + 2.0 * half_width * (i as f64 + 0.5) / n as f64;
                let target = Point::new(foot.x + s * tx, foot.y + s * ty);
                out.push(curve.foot_point(target)?.to_z());
            }
            Ok(out)
        }
    }
}

/// Closed form of `V₂` on the line (finite series), per case.
pub fn v2_closed_line(case: BoundaryCase, z: C, w: C, z0: C, w0: C) -> Result<C> {
    let xi = z - w0;
    match case {
        BoundaryCase::II => Ok((w - z0) * xi),
        BoundaryCase::III => Ok((-(z - z0) + (w - z)) * xi + 2.0 * xi * xi),
        BoundaryCase::IV => Ok(((z - z0) - (w - z)) * xi),
        BoundaryCase::V => Ok(-(w - z0) * xi),
        BoundaryCase::I => Err(Error::Unsupported("no case-i series".into())),
    }
}

/// The summed kernel of the unit-circle Navier example:
/// `V₂ = (z-z₀)(1/z-w₀) + (1/z-w)(1/w₀-z)`.
pub fn v2_closed_circle_navier(z: C, w: C, z0: C, w0: C) -> C {
    (z - z0) * (1.0 / z - w0) + (1.0 / z - w) * (1.0 / w0 - z)
}

/// Mirror of [`v2_closed_circle_navier`] under `z ↔ w`, `z₀ ↔ w₀`.
pub fn v1_closed_circle_navier(z: C, w: C, z0: C, w0: C) -> C {
    (w - w0) * (1.0 / w - z0) + (1.0 / w - z) * (1.0 / z0 - w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::implicit_circle;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn f_k_values() {
        assert_relative_eq!(f_k(0, c(1.0, 0.0)).unwrap().norm(), 0.0, epsilon = 1e-15);
        let e = std::f64::consts::E;
        assert!(f_k(1, c(e, 0.0)).unwrap().norm() < 1e-14);
        assert_relative_eq!(f_k(-1, c(2.0, 0.0)).unwrap().re, 0.5, epsilon = 1e-15);
        assert!(matches!(f_k(0, c(0.0, 0.0)), Err(Error::SingularArgument)));
    }

    #[test]
    fn f_ladder_derivative_identity() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let h = 1e-6;
        for k in -3..=6 {
            for _ in 0..20 {
                let xi = c(rng.gen_range(0.2..2.0), rng.gen_range(-1.0..1.0));
                let fd = (f_k(k, xi + h).unwrap() - f_k(k, xi - h).unwrap()) / (2.0 * h);
                let want = f_k(k - 1, xi).unwrap();
                assert!(
                    (fd - want).norm() <= 1e-7 * want.norm().max(1.0),
                    "d f_{k}/dξ != f_{} at ξ = {xi}",
                    k - 1
                );
            }
        }
    }

    #[test]
    fn line_coefficients_match_spec_examples() {
        let line = Curve::LineY0;
        let z = c(1.0, 1.0);
        let w = c(1.0, -1.0);
        let z0 = c(0.5, 0.0);
        let w0 = c(0.5, 0.0);
        let s2 = KernelSeries::new(BoundaryCase::II, &line, 8, z0, w0).unwrap();
        // a₁⁽²⁾ = z - z₀ + (w - z) = 0.5 - i
        let a1 = s2.coefficient(Side::A, 1, z, w).unwrap();
        assert_relative_eq!(a1.re, 0.5, epsilon = 1e-14);
        assert_relative_eq!(a1.im, -1.0, epsilon = 1e-14);
        // a₂⁽²⁾ = 0 on the line
        assert!(s2.coefficient(Side::A, 2, z, w).unwrap().norm() == 0.0);

        let s4 = KernelSeries::new(BoundaryCase::IV, &line, 8, z0, w0).unwrap();
        let a1 = s4.coefficient(Side::A, 1, z, w).unwrap();
        let want = (z - z0) - (w - z);
        assert!((a1 - want).norm() < 1e-14);
    }

    #[test]
    fn line_truncation_is_exact() {
        let line = Curve::LineY0;
        let z0 = c(0.3, 0.4);
        let w0 = z0.conj();
        let z = c(0.8, 0.2);
        let w = c(0.7, -0.3);
        for case in [
            BoundaryCase::II,
            BoundaryCase::III,
            BoundaryCase::IV,
            BoundaryCase::V,
        ] {
            let s = KernelSeries::new(case, &line, 16, z0, w0).unwrap();
            let cutoff = match case {
                BoundaryCase::III => 2,
                _ => 1,
            };
            for k in 1..=8usize {
                let a = s.coefficient(Side::A, k, z, w).unwrap();
                let b = s.coefficient(Side::B, k, z, w).unwrap();
                if k > cutoff {
                    assert_eq!(a.norm(), 0.0, "a_{k} nonzero on line, case {case}");
                    assert_eq!(b.norm(), 0.0, "b_{k} nonzero on line, case {case}");
                }
            }
        }
    }

    #[test]
    fn line_v2_matches_closed_forms() {
        let line = Curve::LineY0;
        let z0 = c(0.3, 0.4);
        let w0 = z0.conj();
        for case in [
            BoundaryCase::II,
            BoundaryCase::III,
            BoundaryCase::IV,
            BoundaryCase::V,
        ] {
            let s = KernelSeries::new(case, &line, 16, z0, w0).unwrap();
            for k in 0..6 {
                let z = c(0.1 * k as f64, 0.15);
                let w = c(0.4, -0.2 - 0.05 * k as f64);
                let got = s.eval(Component::V2, z, w, 0, 0).unwrap();
                let want = v2_closed_line(case, z, w, z0, w0).unwrap();
                assert!(
                    (got.value - want).norm() <= 1e-13 * want.norm().max(1.0),
                    "case {case}: {} vs {want}",
                    got.value
                );
                assert!(got.converged);
            }
        }
    }

    #[test]
    fn circle_series_sums_to_example_closed_form() {
        let circle = Curve::circle(1.0).unwrap();
        let z0 = c(1.2, 0.0);
        let w0 = c(1.2, 0.0);
        let s = KernelSeries::new(BoundaryCase::II, &circle, 40, z0, w0).unwrap();
        // spec example point: V₂(1.1, 1.1) = 0.08
        let got = s
            .eval(Component::V2, c(1.1, 0.0), c(1.1, 0.0), 0, 0)
            .unwrap();
        assert_relative_eq!(got.value.re, 0.08, epsilon = 1e-10);
        assert_relative_eq!(got.value.im, 0.0, epsilon = 1e-12);

        // sweep points and sources near the circle, both V₂ and V₁
        for k in 0..24 {
            let th = 0.26 * k as f64;
            let zs = C::from_polar(1.0 + 0.04 + 0.01 * (k % 5) as f64, th);
            let s = KernelSeries::new(BoundaryCase::II, &circle, 40, zs, zs.conj()).unwrap();
            let z = C::from_polar(0.94, th + 0.1);
            let w = z.conj();
            let v2 = s.eval(Component::V2, z, w, 0, 0).unwrap().value;
            let want2 = v2_closed_circle_navier(z, w, zs, zs.conj());
            assert!(
                (v2 - want2).norm() <= 1e-10 * want2.norm().max(1.0),
                "V2 mismatch at k={k}: {v2} vs {want2}"
            );
            let v1 = s.eval(Component::V1, z, w, 0, 0).unwrap().value;
            let want1 = v1_closed_circle_navier(z, w, zs, zs.conj());
            assert!((v1 - want1).norm() <= 1e-10 * want1.norm().max(1.0));
        }
    }

    #[test]
    fn circle_series_derivatives_match_closed_form_differences() {
        let circle = Curve::circle(1.0).unwrap();
        let z0 = C::from_polar(1.15, 0.4);
        let s = KernelSeries::new(BoundaryCase::II, &circle, 48, z0, z0.conj()).unwrap();
        let z = C::from_polar(0.95, 0.55);
        let w = C::from_polar(0.92, -0.35);
        let h = 1e-5;
        let closed = |z: C, w: C| v2_closed_circle_navier(z, w, z0, z0.conj());
        let dz_fd = (closed(z + h, w) - closed(z - h, w)) / (2.0 * h);
        let dz = s.eval(Component::V2, z, w, 1, 0).unwrap().value;
        assert!((dz - dz_fd).norm() <= 1e-8 * dz.norm().max(1.0));
        let dzw_fd = (closed(z + h, w + h) - closed(z + h, w - h) - closed(z - h, w + h)
            + closed(z - h, w - h))
            / (4.0 * h * h);
        let dzw = s.eval(Component::V2, z, w, 1, 1).unwrap().value;
        assert!((dzw - dzw_fd).norm() <= 1e-6 * dzw.norm().max(1.0));
    }

    #[test]
    fn source_on_curve_kills_series_at_source() {
        let circle = Curve::circle(1.0).unwrap();
        let z0 = C::from_polar(1.0, 0.3);
        let s = KernelSeries::new(BoundaryCase::III, &circle, 24, z0, z0.conj()).unwrap();
        let v = s.eval(Component::V2, z0, z0.conj(), 0, 0).unwrap();
        assert!(v.value.norm() < 1e-13);
    }

    #[test]
    fn b_side_is_mirror_of_a_side() {
        // On the circle S = S̃, so b_k(z, w, w₀) must equal the a_k formula
        // with swapped arguments; check through the implicit machinery, where
        // the two sides take genuinely different code paths.
        let closed = Curve::circle(1.0).unwrap();
        let imp = implicit_circle(1.0).unwrap();
        let z0 = C::from_polar(1.1, 0.7);
        let w0 = z0.conj();
        for case in [BoundaryCase::II, BoundaryCase::V] {
            let sc = KernelSeries::new(case, &closed, 10, z0, w0).unwrap();
            let si = KernelSeries::new(case, &imp, 10, z0, w0).unwrap();
            for k in 1..=4 {
                let z = C::from_polar(0.97, 0.5);
                let w = C::from_polar(1.04, -0.6);
                let b_closed = sc.coefficient(Side::B, k, z, w).unwrap();
                let b_imp = si.coefficient(Side::B, k, z, w).unwrap();
                assert!(
                    (b_closed - b_imp).norm() <= 1e-9 * b_closed.norm().max(1.0),
                    "case {case}, k = {k}"
                );
            }
        }
    }

    #[test]
    fn boundary_recurrences_hold_on_curve() {
        // Right-column recurrence (∂aₖ/∂w)S′ = -∂²a_{k-1}/∂w∂z on Γ_ℂ, i.e.
        // qₖS′ + q_{k-1}′ = 0, for the cases where it is the defining relation.
        let circle = Curve::circle(1.0).unwrap();
        let z = C::from_polar(1.0, 0.35);
        let s = circle.schwarz_jet(z, 12).unwrap();
        let sp = s.nth_derivative(1);
        for case in [BoundaryCase::II, BoundaryCase::III] {
            let mut ladder = CoeffLadder::new(case, &s, z, C::new(0.2, 0.1), 4);
            let mut prev_q: Option<Jet> = None;
            for k in 1..=6 {
                let (_, q) = ladder.next().unwrap();
                if let Some(pq) = prev_q {
                    let lhs = q.value() * sp + pq.nth_derivative(1);
                    // case III's k = 2 relation has the same right column
                    assert!(
                        lhs.norm() <= 1e-11 * q.value().norm().max(1.0),
                        "case {case}, k = {k}: residual {lhs}"
                    );
                }
                prev_q = Some(q);
            }
        }
        // Left-column relation aₖS′ = -∂a_{k-1}/∂z + (∂a_{k-1}/∂w)S′ on Γ_ℂ
        // for cases III and V (k ≥ 3).
        let w_on = circle.schwarz(z, 0).unwrap();
        for case in [BoundaryCase::III, BoundaryCase::V] {
            let mut ladder = CoeffLadder::new(case, &s, z, C::new(0.2, 0.1), 4);
            let mut prev: Option<(Jet, Jet)> = None;
            for k in 1..=6 {
                let (p, q) = ladder.next().unwrap();
                if k >= 3 {
                    let (pp, pq) = prev.unwrap();
                    let a_k = p.value() + q.value() * w_on;
                    let da_dz = pp.nth_derivative(1) + pq.nth_derivative(1) * w_on;
                    let da_dw = pq.value();
                    let res = a_k * sp + da_dz - da_dw * sp;
                    assert!(
                        res.norm() <= 1e-10 * a_k.norm().max(1.0),
                        "case {case}, k = {k}: residual {res}"
                    );
                }
                prev = Some((p, q));
            }
        }
    }

    #[test]
    fn reflected_g_line_closed_forms() {
        let line = Curve::LineY0;
        let z0 = c(0.4, 0.3);
        let w0 = z0.conj();
        let z = c(0.9, -0.2);
        let w = c(0.6, -0.5);
        let ln1 = |v: C| v.ln() - 1.0;

        let closed: [(BoundaryCase, C); 4] = [
            (
                BoundaryCase::II,
                (z - w0) * (w - z0) * ln1(w - z0) + (w - z0) * (z - w0) * ln1(z - w0),
            ),
            (
                BoundaryCase::III,
                -(2.0 * w - z - w0) * (w - z0) * ln1(w - z0)
                    + 2.0 * (w - z0) * (w - z0) * ((w - z0).ln() - 1.5)
                    - (2.0 * z - w - z0) * (z - w0) * ln1(z - w0)
                    + 2.0 * (z - w0) * (z - w0) * ((z - w0).ln() - 1.5),
            ),
            (
                BoundaryCase::IV,
                (2.0 * w - z - w0) * (w - z0) * ln1(w - z0)
                    + (2.0 * z - w - z0) * (z - w0) * ln1(z - w0),
            ),
            (
                BoundaryCase::V,
                -(z - w0) * (w - z0) * ln1(w - z0) - (w - z0) * (z - w0) * ln1(z - w0),
            ),
        ];
        for (case, want_sum) in closed {
            let s = KernelSeries::new(case, &line, 12, z0, w0).unwrap();
            let gt = s.reflected_g(z, w).unwrap();
            let want = want_sum * G_PREFACTOR;
            let got = gt.partial(0, 0);
            assert!(
                (got - want).norm() <= 1e-13 * want.norm().max(1.0),
                "case {case}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn reflected_g_case_iii_special_point() {
        // w = z₀ + 1 and z = w₀ + 1 make both logs vanish; the closed forms
        // collapse to G̃ = 1/(4π) independently of the source.
        let line = Curve::LineY0;
        for (z0, w0) in [(c(0.3, 0.2), c(0.3, -0.2)), (c(-0.4, 0.6), c(-0.4, -0.6))] {
            let s = KernelSeries::new(BoundaryCase::III, &line, 12, z0, w0).unwrap();
            let gt = s.reflected_g(w0 + 1.0, z0 + 1.0).unwrap();
            let got = gt.partial(0, 0);
            let want = 1.0 / (4.0 * std::f64::consts::PI);
            assert_relative_eq!(got.re, want, epsilon = 1e-13);
            assert_relative_eq!(got.im, 0.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn boundary_match_line_exact() {
        let line = Curve::LineY0;
        let z0 = c(0.2, 0.25);
        let w0 = z0.conj();
        for case in [
            BoundaryCase::II,
            BoundaryCase::III,
            BoundaryCase::IV,
            BoundaryCase::V,
        ] {
            for k in 0..50 {
                let z = c(-1.4 + 2.8 * k as f64 / 49.0, 0.0);
                let r = check_boundary_match(case, &line, z, z0, w0, 16).unwrap();
                assert!(r <= 1e-12, "case {case} at {z}: residual {r:.3e}");
            }
        }
    }

    #[test]
    fn boundary_match_circle_series() {
        let circle = Curve::circle(1.0).unwrap();
        let z0 = C::from_polar(1.15, 0.6);
        let w0 = z0.conj();
        let samples = matching_boundary_samples(&circle, Point::from_z(z0), 50).unwrap();
        for case in [
            BoundaryCase::II,
            BoundaryCase::III,
            BoundaryCase::IV,
            BoundaryCase::V,
        ] {
            let mut worst: f64 = 0.0;
            for &z in &samples {
                let r = check_boundary_match(case, &circle, z, z0, w0, 40).unwrap();
                worst = worst.max(r);
            }
            assert!(worst <= 1e-8, "case {case}: residual {worst:.3e}");
        }
    }

    #[test]
    fn cauchy_goursat_residuals() {
        let line = Curve::LineY0;
        let rs = check_cauchy_goursat(&line, c(0.1, 0.3), c(0.1, -0.3), 16).unwrap();
        // the biharmonicity residual carries second-difference roundoff
        // ~ ε/h² ≈ 1e-12; the on-curve and characteristic identities are exact
        for (i, r) in rs.iter().enumerate() {
            let gate = if i == 0 { 1e-10 } else { 1e-12 };
            assert!(*r <= gate, "line residual {i} = {r:.3e}");
        }
        let circle = Curve::circle(1.0).unwrap();
        let z0 = C::from_polar(1.1, 0.2);
        let rs = check_cauchy_goursat(&circle, z0, z0.conj(), 40).unwrap();
        for (i, r) in rs.iter().enumerate() {
            assert!(*r <= 1e-10, "circle residual {i} = {r:.3e}");
        }
    }

    #[test]
    fn series_outside_convergence_region_errors() {
        // boundary point diametrically opposite the source: the multiplier
        // ratio exceeds 1 and the terms grow
        let circle = Curve::circle(1.0).unwrap();
        let z0 = C::from_polar(1.2, 0.0);
        let s = KernelSeries::new(BoundaryCase::II, &circle, 40, z0, z0.conj()).unwrap();
        let z = C::from_polar(1.0, 3.0);
        let r = s.eval(Component::V2, z, z.conj(), 0, 0);
        assert!(
            matches!(r, Err(Error::NotConverged { .. })),
            "expected NotConverged, got {r:?}"
        );
    }

    #[test]
    fn implicit_circle_series_matches_closed_circle() {
        let closed = Curve::circle(1.0).unwrap();
        let imp = implicit_circle(1.0).unwrap();
        let z0 = C::from_polar(1.12, 0.5);
        let w0 = z0.conj();
        let sc = KernelSeries::new(BoundaryCase::II, &closed, 12, z0, w0).unwrap();
        let si = KernelSeries::new(BoundaryCase::II, &imp, 40, z0, w0).unwrap();
        assert_eq!(si.k_max, 12, "implicit series must be capped at 12 terms");
        for k in 0..10 {
            let z = C::from_polar(0.96, 0.5 + 0.03 * k as f64);
            let w = z.conj();
            let a = sc.v_partials(z, w).unwrap();
            let b = si.v_partials(z, w).unwrap();
            assert!((a.v - b.v).norm() < 1e-8);
            assert!((a.vzw - b.vzw).norm() < 1e-8);
        }
    }
}
