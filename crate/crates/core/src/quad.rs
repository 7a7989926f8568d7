//! Gauss–Legendre panels with adaptive bisection.
//!
//! Nodes and weights are computed at rule construction by Newton iteration on
//! the Legendre polynomial, so any node count is available without tables.
//! Integrands are complex-valued (real integrands embed trivially) and may
//! fail, e.g. when a kernel series is evaluated outside its convergence
//! region; failures propagate out of the integrator.

use crate::{Error, Result, C};

/// A fixed Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 2);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi-style initial guess, then Newton on P_n.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut pp = 0.0;
            for _ in 0..100 {
                let (p, dp) = legendre(n, x);
                pp = dp;
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            let w = 2.0 / ((1.0 - x * x) * pp * pp);
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Fixed-rule integral of `f` over `[a, b]`.
    pub fn integrate<F>(&self, f: &mut F, a: f64, b: f64) -> Result<C>
    where
        F: FnMut(f64) -> Result<C>,
    {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let mut acc = C::new(0.0, 0.0);
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += f(mid + half * x)? * *w;
        }
        Ok(acc * half)
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Quadrature configuration: Gauss–Legendre panels refined by adaptive
/// bisection until successive estimates agree to `tol` or `max_refinement`
/// levels are exhausted.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct QuadratureSpec {
    pub nodes_per_panel: usize,
    pub panel_count: usize,
    pub max_refinement: u32,
    pub tol: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            nodes_per_panel: 16,
            panel_count: 1,
            max_refinement: 12,
            tol: 1e-10,
        }
    }
}

impl QuadratureSpec {
    /// Integrate `f` over `[a, b]`, returning the value and an error estimate.
    ///
    /// The error estimate is the accumulated difference between the last two
    /// bisection levels on each accepted panel; if it ends up three orders of
    /// magnitude above `tol` the integral is reported as failed.
    pub fn integrate<F>(&self, f: &mut F, a: f64, b: f64) -> Result<(C, f64)>
    where
        F: FnMut(f64) -> Result<C>,
    {
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::QuadratureFailure("non-finite bounds".into()));
        }
        let rule = GaussLegendre::new(self.nodes_per_panel);
        let mut value = C::new(0.0, 0.0);
        let mut err = 0.0;
        let panels = self.panel_count.max(1);
        for k in 0..panels {
            let pa = a + (b - a) * k as f64 / panels as f64;
            let pb = a + (b - a) * (k + 1) as f64 / panels as f64;
            let whole = rule.integrate(f, pa, pb)?;
            let (v, e) = adapt(
                f,
                pa,
                pb,
                whole,
                &rule,
                self.tol / panels as f64,
                self.max_refinement,
            )?;
            value += v;
            err += e;
        }
        if err > 1e3 * self.tol.max(1e-300) {
            return Err(Error::QuadratureFailure(format!(
                "estimate {err:.3e} exceeds tolerance {:.1e} after max refinement",
                self.tol
            )));
        }
        Ok((value, err))
    }
}

fn adapt<F>(
    f: &mut F,
    a: f64,
    b: f64,
    whole: C,
    rule: &GaussLegendre,
    tol: f64,
    depth: u32,
) -> Result<(C, f64)>
where
    F: FnMut(f64) -> Result<C>,
{
    let m = 0.5 * (a + b);
    let left = rule.integrate(f, a, m)?;
    let right = rule.integrate(f, m, b)?;
    let split = left + right;
    let diff = (whole - split).norm();
    if diff <= tol * split.norm().max(1.0) || depth == 0 {
        return Ok((split, diff));
    }
    let (lv, le) = adapt(f, a, m, left, rule, tol * 0.5, depth - 1)?;
    let (rv, re) = adapt(f, m, b, right, rule, tol * 0.5, depth - 1)?;
    Ok((lv + rv, le + re))
}
