//! Truncated Taylor expansions ("jets") of analytic functions of one complex
//! variable.
//!
//! A jet stores the scaled derivatives `c[j] = f⁽ʲ⁾(x₀)/j!` of a function at a
//! fixed expansion point. Arithmetic truncates to the shorter operand, so the
//! number of valid coefficients is tracked by the vector length itself. Jets
//! carry the Schwarz-function derivatives through the coefficient recurrences
//! of the kernel series, where plain dual numbers would not reach high enough
//! order.

use crate::C;

#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    c: Vec<C>,
}

impl Jet {
    /// Jet of the constant function `v`.
    pub fn constant(v: C, len: usize) -> Self {
        assert!(len >= 1);
        let mut c = vec![C::new(0.0, 0.0); len];
        c[0] = v;
        Jet { c }
    }

    /// Jet of the identity evaluated at `v`, i.e. `[v, 1, 0, …]`.
    pub fn variable(v: C, len: usize) -> Self {
        assert!(len >= 1);
        let mut c = vec![C::new(0.0, 0.0); len];
        c[0] = v;
        if len > 1 {
            c[1] = C::new(1.0, 0.0);
        }
        Jet { c }
    }

    pub fn from_coeffs(c: Vec<C>) -> Self {
        assert!(!c.is_empty());
        Jet { c }
    }

    pub fn len(&self) -> usize {
        self.c.len()
    }

    pub fn is_empty(&self) -> bool {
        self.c.is_empty()
    }

    /// Value of the underlying function at the expansion point.
    pub fn value(&self) -> C {
        self.c[0]
    }

    pub fn coeff(&self, j: usize) -> C {
        self.c[j]
    }

    /// `f⁽ᵏ⁾(x₀)` recovered from the scaled coefficient.
    pub fn nth_derivative(&self, k: usize) -> C {
        let mut fact = 1.0;
        for i in 2..=k {
            fact *= i as f64;
        }
        self.c[k] * fact
    }

    /// Largest coefficient magnitude; a cheap size proxy for truncation gates.
    pub fn max_coeff(&self) -> f64 {
        self.c.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn truncated(&self, len: usize) -> Jet {
        let n = len.min(self.c.len());
        Jet {
            c: self.c[..n].to_vec(),
        }
    }

    pub fn scale(&self, s: C) -> Jet {
        Jet {
            c: self.c.iter().map(|v| v * s).collect(),
        }
    }

    pub fn add(&self, other: &Jet) -> Jet {
        let n = self.c.len().min(other.c.len());
        Jet {
            c: (0..n).map(|j| self.c[j] + other.c[j]).collect(),
        }
    }

    pub fn sub(&self, other: &Jet) -> Jet {
        let n = self.c.len().min(other.c.len());
        Jet {
            c: (0..n).map(|j| self.c[j] - other.c[j]).collect(),
        }
    }

    pub fn add_scalar(&self, s: C) -> Jet {
        let mut c = self.c.clone();
        c[0] += s;
        Jet { c }
    }

    /// Cauchy product truncated to the shorter operand.
    pub fn mul(&self, other: &Jet) -> Jet {
        let n = self.c.len().min(other.c.len());
        let mut c = vec![C::new(0.0, 0.0); n];
        for (j, out) in c.iter_mut().enumerate() {
            let mut s = C::new(0.0, 0.0);
            for i in 0..=j {
                s += self.c[i] * other.c[j - i];
            }
            *out = s;
        }
        Jet { c }
    }

    /// Jet of the derivative; one coefficient shorter.
    pub fn derivative(&self) -> Jet {
        assert!(self.c.len() >= 2, "cannot differentiate a length-1 jet");
        Jet {
            c: (1..self.c.len()).map(|j| self.c[j] * (j as f64)).collect(),
        }
    }

    /// Jet of `1/f`, by series inversion. The leading coefficient must be
    /// nonzero.
    pub fn recip(&self) -> Jet {
        let a0 = self.c[0];
        assert!(a0.norm() > 0.0, "reciprocal of a jet with zero value");
        let n = self.c.len();
        let mut b = vec![C::new(0.0, 0.0); n];
        b[0] = C::new(1.0, 0.0) / a0;
        for j in 1..n {
            let mut s = C::new(0.0, 0.0);
            for i in 1..=j {
                s += self.c[i] * b[j - i];
            }
            b[j] = -s / a0;
        }
        Jet { c: b }
    }
}
