//! Continuation of biharmonic functions across real-analytic plane curves.
//!
//! A function `u` with `Δ²u = 0` that satisfies a homogeneous boundary-condition
//! pair on a curve `Γ` can be continued from one side of `Γ` to the other. For a
//! straight line and the clamped pair the continuation is the classical
//! point-to-point reflection; for the other condition pairs and for curved
//! boundaries the reflection picks up either extra derivative terms at the
//! reflected point or a path-integral correction built from series kernels in
//! the Schwarz function of the curve.
//!
//! The crate provides:
//!
//! * [`curve`] — analytic curves (line, circle, implicit algebraic), their
//!   Schwarz functions `S`, inverses `S̃`, derivative jets, and the point
//!   reflection `P ↦ conj(S(P))`.
//! * [`goursat`] — exact biharmonic fields `u = Re(conj(z)·φ(z) + ψ(z))` with
//!   closed-form partial derivatives through third order.
//! * [`testgen`] — families of fields satisfying a chosen condition pair on a
//!   chosen curve, used as ground truth.
//! * [`kernel`] — the special functions `f_k`, the coefficient recurrences for
//!   the reflected fundamental solutions, and the series kernels `V₁`, `V₂`.
//! * [`reflection`] — the continuation operators themselves (line formulas,
//!   clamped point formulas, path-integral corrections, circle example,
//!   Green's-representation self-check).
//! * [`harness`] — config parsing, verification runs, and CSV/JSON reports
//!   behind the `birefl` command-line tool.
//!
//! ```
//! use biharmonic_reflect::{AnalyticTerm, BiharmonicField, BoundaryCase, Curve,
//!                          Point, QuadratureSpec, reflection};
//! use num_complex::Complex64;
//!
//! // u = r²·ln r - r² + 1 is hinged (u = Δu = 0) on the unit circle
//! let u = BiharmonicField::new(
//!     vec![
//!         AnalyticTerm::z_log(Complex64::new(1.0, 0.0)),
//!         AnalyticTerm::power(1, Complex64::new(-1.0, 0.0)),
//!     ],
//!     vec![AnalyticTerm::power(0, Complex64::new(1.0, 0.0))],
//! );
//! let circle = Curve::circle(1.0)?;
//! let p = Point::new(1.1, 0.35);
//!
//! // continue u from values on the other side of the circle and compare
//! let r = reflection::continue_general(
//!     &u, &circle, BoundaryCase::II, p, &QuadratureSpec::default(), 48,
//! )?;
//! let truth = u.eval(p, 0, 0)?;
//! assert!((r.value - truth).abs() < 1e-8);
//! assert_eq!(r.value, r.point_term + r.correction);
//! # Ok::<(), biharmonic_reflect::Error>(())
//! ```

use num_complex::Complex64;

pub mod curve;
pub mod goursat;
pub mod harness;
pub mod jet;
pub mod kernel;
pub mod quad;
pub mod reflection;
pub mod testgen;

pub use curve::{Curve, ReflectedPoint};
pub use goursat::{AnalyticTerm, BiharmonicField, TermKind};
pub use kernel::KernelSeries;
pub use quad::QuadratureSpec;
pub use reflection::ContinuationResult;
pub use testgen::TestFamily;

/// Complex number shorthand used throughout the crate.
pub type C = Complex64;

/// A point of the real plane.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    /// Characteristic coordinate `z = x + iy`.
    pub fn to_z(self) -> C {
        C::new(self.x, self.y)
    }

    /// Characteristic coordinate `w = x - iy`.
    pub fn to_w(self) -> C {
        C::new(self.x, -self.y)
    }

    pub fn from_z(z: C) -> Self {
        Point { x: z.re, y: z.im }
    }

    pub fn dist(self, other: Point) -> f64 {
        ((self.x - other.x).powi(2) + (self.y - other.y).powi(2)).sqrt()
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }
}

impl std::fmt::Display for Point {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// The five homogeneous boundary-condition pairs.
///
/// * `I`   — `u = ∂ₙu = 0` (clamped)
/// * `II`  — `u = Δu = 0` (hinged / Navier)
/// * `III` — `u = ∂ₙΔu = 0`
/// * `IV`  — `∂ₙu = Δu = 0`
/// * `V`   — `∂ₙu = ∂ₙΔu = 0`
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum BoundaryCase {
    I,
    II,
    III,
    IV,
    V,
}

impl BoundaryCase {
    pub const ALL: [BoundaryCase; 5] = [
        BoundaryCase::I,
        BoundaryCase::II,
        BoundaryCase::III,
        BoundaryCase::IV,
        BoundaryCase::V,
    ];

    /// Sign of the point term `±u(Q)` in the general reflection formula.
    ///
    /// Cases II and III reflect oddly, IV and V evenly. Case I has its own
    /// four-term point formula and no single sign.
    pub fn point_sign(self) -> Option<f64> {
        match self {
            BoundaryCase::I => None,
            BoundaryCase::II | BoundaryCase::III => Some(-1.0),
            BoundaryCase::IV | BoundaryCase::V => Some(1.0),
        }
    }

    /// Whether the case is covered by the series kernels (II–V).
    pub fn has_series_kernel(self) -> bool {
        !matches!(self, BoundaryCase::I)
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "i" | "1" => Ok(BoundaryCase::I),
            "ii" | "2" => Ok(BoundaryCase::II),
            "iii" | "3" => Ok(BoundaryCase::III),
            "iv" | "4" => Ok(BoundaryCase::IV),
            "v" | "5" => Ok(BoundaryCase::V),
            other => Err(Error::Config(format!(
                "unknown boundary case `{other}` (expected i|ii|iii|iv|v)"
            ))),
        }
    }
}

impl std::fmt::Display for BoundaryCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            BoundaryCase::I => "i",
            BoundaryCase::II => "ii",
            BoundaryCase::III => "iii",
            BoundaryCase::IV => "iv",
            BoundaryCase::V => "v",
        };
        write!(f, "{s}")
    }
}

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("newton iteration did not converge within {0} steps")]
    NonConvergence(usize),
    #[error("point outside the validity neighborhood: {0}")]
    OutsideValidity(String),
    #[error("derivative of the Schwarz function is singular or out of range")]
    DerivativeSingular,
    #[error("field evaluated at a singular point or on the branch cut: {0}")]
    DomainViolation(String),
    #[error("point does not lie on the curve")]
    NotOnCurve,
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("collocation produced an empty null space")]
    EmptyNullSpace,
    #[error("singular argument of f_k (log term at 0)")]
    SingularArgument,
    #[error("kernel series did not converge within {terms} terms (tail ~ {tail:.3e})")]
    NotConverged { terms: usize, tail: f64 },
    #[error("quadrature failure: {0}")]
    QuadratureFailure(String),
    #[error("integration path crosses a branch cut or singular characteristic")]
    BranchCutCrossing,
    #[error("config error: {0}")]
    Config(String),
    #[error("internal consistency check failed: {0}")]
    Internal(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
