//! Flat `key = value` configuration with `[section]` headers.
//!
//! The format is deliberately dependency-free so configs can be written and
//! parsed from any language: `#` starts a comment, section headers group
//! keys, and a repeated key appends (used for field term records). Keys are
//! addressed as `section.key` below.
//!
//! ```text
//! [curve]
//! spec = circle:a=1
//! [case]
//! case = ii
//! [family]
//! kind = closed_form            # or: collocation
//! basis_size = 12
//! sample_size = 26
//! [sample]
//! count = 100
//! dist_min = 0.05
//! dist_max = 0.3
//! seed = 42
//! [quad]
//! tol = 1e-10
//! nodes = 16
//! panels = 1
//! max_refinement = 12
//! [kernel]
//! k_max = 40
//! [gates]
//! point_tol = 1e-10
//! quad_tol = 1e-8
//! [grid]
//! x_min = -1.0
//! x_max = 1.0
//! nx = 20
//! y_min = -0.5
//! y_max = -0.05
//! ny = 10
//! [field]
//! # slot,kind,n,coeff_re,coeff_im — one `term` line per dictionary term
//! term = phi,power,1,0.5,0
//! term = psi,power,2,-0.5,0
//! ```
//!
//! Curve specs: `line`, `circle:a=<radius>`,
//! `implicit:poly=<i,j,c>+<i,j,c>+...:ref=<x>,<y>`.

use crate::curve::{BivariatePoly, Curve};
use crate::goursat::{AnalyticTerm, BiharmonicField, TermKind};
use crate::quad::QuadratureSpec;
use crate::{BoundaryCase, Error, Point, Result, C};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, PartialEq)]
pub enum FamilySpec {
    ClosedForm,
    Collocation {
        basis_size: usize,
        sample_size: usize,
    },
    /// Explicit fields from `[field]` sections.
    Explicit,
}

#[derive(Debug, Clone, Copy)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub y_min: f64,
    pub y_max: f64,
    pub ny: usize,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub curve: Curve,
    pub case: BoundaryCase,
    pub family: FamilySpec,
    pub fields: Vec<BiharmonicField>,
    pub sample_count: usize,
    pub dist_min: f64,
    pub dist_max: f64,
    pub seed: u64,
    pub quad: QuadratureSpec,
    pub k_max: usize,
    pub point_tol: f64,
    pub quad_tol: f64,
    pub grid: Option<GridSpec>,
    pub out_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            curve: Curve::LineY0,
            case: BoundaryCase::II,
            family: FamilySpec::ClosedForm,
            fields: vec![],
            sample_count: 100,
            dist_min: 0.05,
            dist_max: 0.3,
            seed: 42,
            quad: QuadratureSpec::default(),
            k_max: 40,
            point_tol: 1e-10,
            quad_tol: 1e-8,
            grid: None,
            out_dir: PathBuf::from("out"),
        }
    }
}

/// Raw parse result: ordered `(section.key, value)` pairs with repeats kept.
#[derive(Debug, Default)]
pub struct RawConfig {
    pairs: Vec<(String, String)>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut section = String::new();
        let mut pairs = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(i) => &raw[..i],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            if line.starts_with('[') {
                if !line.ends_with(']') {
                    return Err(Error::Config(format!(
                        "line {}: malformed section header `{raw}`",
                        lineno + 1
                    )));
                }
                section = line[1..line.len() - 1].trim().to_string();
                continue;
            }
            let Some(eq) = line.find('=') else {
                return Err(Error::Config(format!(
                    "line {}: expected `key = value`, got `{raw}`",
                    lineno + 1
                )));
            };
            let key = line[..eq].trim();
            let value = line[eq + 1..].trim();
            let full = if section.is_empty() {
                key.to_string()
            } else {
                format!("{section}.{key}")
            };
            pairs.push((full, value.to_string()));
        }
        Ok(RawConfig { pairs })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.pairs
            .iter()
            .rev()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn get_all(&self, key: &str) -> Vec<&str> {
        self.pairs
            .iter()
            .filter(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
            .collect()
    }

    fn get_f64(&self, key: &str) -> Result<Option<f64>> {
        self.get(key)
            .map(|v| {
                v.parse::<f64>()
                    .map_err(|_| Error::Config(format!("{key}: not a number: `{v}`")))
            })
            .transpose()
    }

    fn get_usize(&self, key: &str) -> Result<Option<usize>> {
        self.get(key)
            .map(|v| {
                v.parse::<usize>()
                    .map_err(|_| Error::Config(format!("{key}: not an integer: `{v}`")))
            })
            .transpose()
    }
}

/// Parses `line`, `circle:a=1.5`, or
/// `implicit:poly=2,0,1+0,2,1+0,0,-1:ref=1,0`.
pub fn parse_curve_spec(spec: &str) -> Result<Curve> {
    let spec = spec.trim();
    if spec == "line" {
        return Ok(Curve::LineY0);
    }
    if let Some(rest) = spec.strip_prefix("circle:") {
        let rest = rest.trim();
        let a = rest
            .strip_prefix("a=")
            .ok_or_else(|| Error::Config(format!("circle spec needs `a=<radius>`: `{spec}`")))?
            .parse::<f64>()
            .map_err(|_| Error::Config(format!("bad circle radius in `{spec}`")))?;
        return Curve::circle(a);
    }
    if let Some(rest) = spec.strip_prefix("implicit:") {
        let mut poly: Option<BivariatePoly> = None;
        let mut reference: Option<Point> = None;
        for part in rest.split(':') {
            if let Some(p) = part.strip_prefix("poly=") {
                let mut terms = Vec::new();
                for mono in p.split('+') {
                    let fields: Vec<&str> = mono.split(',').map(str::trim).collect();
                    if fields.len() != 3 {
                        return Err(Error::Config(format!(
                            "implicit monomial must be `i,j,c`: `{mono}`"
                        )));
                    }
                    let i = fields[0]
                        .parse::<u32>()
                        .map_err(|_| Error::Config(format!("bad x-power in `{mono}`")))?;
                    let j = fields[1]
                        .parse::<u32>()
                        .map_err(|_| Error::Config(format!("bad y-power in `{mono}`")))?;
                    let c = fields[2]
                        .parse::<f64>()
                        .map_err(|_| Error::Config(format!("bad coefficient in `{mono}`")))?;
                    terms.push((i, j, c));
                }
                poly = Some(BivariatePoly::new(terms));
            } else if let Some(r) = part.strip_prefix("ref=") {
                let fields: Vec<&str> = r.split(',').map(str::trim).collect();
                if fields.len() != 2 {
                    return Err(Error::Config(format!("ref needs `x,y`: `{r}`")));
                }
                let x = fields[0]
                    .parse::<f64>()
                    .map_err(|_| Error::Config(format!("bad ref x in `{r}`")))?;
                let y = fields[1]
                    .parse::<f64>()
                    .map_err(|_| Error::Config(format!("bad ref y in `{r}`")))?;
                reference = Some(Point::new(x, y));
            }
        }
        let poly = poly.ok_or_else(|| Error::Config("implicit spec needs poly=".into()))?;
        let reference =
            reference.ok_or_else(|| Error::Config("implicit spec needs ref=<x>,<y>".into()))?;
        return Curve::implicit(poly, reference);
    }
    Err(Error::Config(format!("unknown curve spec `{spec}`")))
}

/// One `slot,kind,n,coeff_re,coeff_im` record.
pub fn parse_term_record(record: &str) -> Result<(bool, AnalyticTerm)> {
    let fields: Vec<&str> = record.split(',').map(str::trim).collect();
    if fields.len() != 5 {
        return Err(Error::Config(format!(
            "field term must be `slot,kind,n,coeff_re,coeff_im`: `{record}`"
        )));
    }
    let is_phi = match fields[0] {
        "phi" => true,
        "psi" => false,
        other => return Err(Error::Config(format!("bad slot `{other}`"))),
    };
    let n = fields[2]
        .parse::<i32>()
        .map_err(|_| Error::Config(format!("bad power in `{record}`")))?;
    let kind = match fields[1] {
        "power" => TermKind::Power(n),
        "log" => TermKind::Log,
        "zlog" => TermKind::ZLog,
        other => return Err(Error::Config(format!("bad term kind `{other}`"))),
    };
    let cre = fields[3]
        .parse::<f64>()
        .map_err(|_| Error::Config(format!("bad coeff_re in `{record}`")))?;
    let cim = fields[4]
        .parse::<f64>()
        .map_err(|_| Error::Config(format!("bad coeff_im in `{record}`")))?;
    Ok((
        is_phi,
        AnalyticTerm {
            kind,
            coeff: C::new(cre, cim),
        },
    ))
}

/// Serialize one term back to the record format.
pub fn term_record(slot: &str, t: &AnalyticTerm) -> String {
    let (kind, n) = match t.kind {
        TermKind::Power(n) => ("power", n),
        TermKind::Log => ("log", 0),
        TermKind::ZLog => ("zlog", 0),
    };
    format!("{slot},{kind},{n},{:.17e},{:.17e}", t.coeff.re, t.coeff.im)
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_str_with_defaults(&text)
    }

    pub fn from_str_with_defaults(text: &str) -> Result<Self> {
        let raw = RawConfig::parse(text)?;
        let mut cfg = RunConfig::default();

        if let Some(spec) = raw.get("curve.spec") {
            cfg.curve = parse_curve_spec(spec)?;
        }
        if let Some(case) = raw.get("case.case") {
            cfg.case = BoundaryCase::parse(case)?;
        }
        match raw.get("family.kind") {
            None | Some("closed_form") => cfg.family = FamilySpec::ClosedForm,
            Some("collocation") => {
                let basis_size = raw.get_usize("family.basis_size")?.unwrap_or(8);
                let sample_size = raw.get_usize("family.sample_size")?.unwrap_or(2 * 8 + 4);
                cfg.family = FamilySpec::Collocation {
                    basis_size,
                    sample_size,
                };
            }
            Some("explicit") => cfg.family = FamilySpec::Explicit,
            Some(other) => return Err(Error::Config(format!("unknown family kind `{other}`"))),
        }
        // field terms: group consecutive `field.term` entries into one field
        // per `[field]` section occurrence is not tracked, so a blank
        // `term = ---` separator splits fields instead
        let mut current = (Vec::new(), Vec::new());
        let mut fields = Vec::new();
        for rec in raw.get_all("field.term") {
            if rec == "---" {
                if !(current.0.is_empty() && current.1.is_empty()) {
                    fields.push(BiharmonicField::new(
                        std::mem::take(&mut current.0),
                        std::mem::take(&mut current.1),
                    ));
                }
                continue;
            }
            let (is_phi, term) = parse_term_record(rec)?;
            if is_phi {
                current.0.push(term);
            } else {
                current.1.push(term);
            }
        }
        if !(current.0.is_empty() && current.1.is_empty()) {
            fields.push(BiharmonicField::new(current.0, current.1));
        }
        cfg.fields = fields;

        if let Some(v) = raw.get_usize("sample.count")? {
            cfg.sample_count = v;
        }
        if let Some(v) = raw.get_f64("sample.dist_min")? {
            cfg.dist_min = v;
        }
        if let Some(v) = raw.get_f64("sample.dist_max")? {
            cfg.dist_max = v;
        }
        if let Some(v) = raw.get("sample.seed") {
            cfg.seed = v
                .parse::<u64>()
                .map_err(|_| Error::Config(format!("bad seed `{v}`")))?;
        }
        if let Some(v) = raw.get_f64("quad.tol")? {
            cfg.quad.tol = v;
        }
        if let Some(v) = raw.get_usize("quad.nodes")? {
            cfg.quad.nodes_per_panel = v;
        }
        if let Some(v) = raw.get_usize("quad.panels")? {
            cfg.quad.panel_count = v;
        }
        if let Some(v) = raw.get_usize("quad.max_refinement")? {
            cfg.quad.max_refinement = v as u32;
        }
        if let Some(v) = raw.get_usize("kernel.k_max")? {
            cfg.k_max = v;
        }
        if let Some(v) = raw.get_f64("gates.point_tol")? {
            cfg.point_tol = v;
        }
        if let Some(v) = raw.get_f64("gates.quad_tol")? {
            cfg.quad_tol = v;
        }
        if let Some(v) = raw.get("output.dir") {
            cfg.out_dir = PathBuf::from(v);
        }

        let grid_keys = ["x_min", "x_max", "nx", "y_min", "y_max", "ny"];
        if grid_keys
            .iter()
            .any(|k| raw.get(&format!("grid.{k}")).is_some())
        {
            let need_f = |k: &str| -> Result<f64> {
                raw.get_f64(&format!("grid.{k}"))?
                    .ok_or_else(|| Error::Config(format!("grid needs `{k}`")))
            };
            let need_n = |k: &str| -> Result<usize> {
                raw.get_usize(&format!("grid.{k}"))?
                    .ok_or_else(|| Error::Config(format!("grid needs `{k}`")))
            };
            cfg.grid = Some(GridSpec {
                x_min: need_f("x_min")?,
                x_max: need_f("x_max")?,
                nx: need_n("nx")?,
                y_min: need_f("y_min")?,
                y_max: need_f("y_max")?,
                ny: need_n("ny")?,
            });
        }

        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.sample_count == 0 {
            return Err(Error::Config("empty point sample".into()));
        }
        for (name, v) in [
            ("quad.tol", self.quad.tol),
            ("gates.point_tol", self.point_tol),
            ("gates.quad_tol", self.quad_tol),
            ("sample.dist_min", self.dist_min),
            ("sample.dist_max", self.dist_max),
        ] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if self.dist_min > self.dist_max {
            return Err(Error::Config("dist_min exceeds dist_max".into()));
        }
        Ok(())
    }

    /// Summary of the effective settings, embedded in reports.
    pub fn describe(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        let curve = match &self.curve {
            Curve::LineY0 => "line".to_string(),
            Curve::Circle { radius } => format!("circle:a={radius}"),
            Curve::Implicit(_) => "implicit".to_string(),
        };
        m.insert("curve".into(), curve);
        m.insert("case".into(), self.case.to_string());
        m.insert(
            "family".into(),
            match self.family {
                FamilySpec::ClosedForm => "closed_form".into(),
                FamilySpec::Collocation {
                    basis_size,
                    sample_size,
                } => format!("collocation:{basis_size}/{sample_size}"),
                FamilySpec::Explicit => "explicit".into(),
            },
        );
        m.insert("sample_count".into(), self.sample_count.to_string());
        m.insert("seed".into(), self.seed.to_string());
        m.insert("k_max".into(), self.k_max.to_string());
        m.insert("quad_tol".into(), format!("{:e}", self.quad.tol));
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sections_and_overrides() {
        let text = "\
[curve]
spec = circle:a=1
[case]
case = iii
[sample]
count = 7
seed = 9 # trailing comment
";
        let cfg = RunConfig::from_str_with_defaults(text).unwrap();
        assert!(matches!(cfg.curve, Curve::Circle { .. }));
        assert_eq!(cfg.case, BoundaryCase::III);
        assert_eq!(cfg.sample_count, 7);
        assert_eq!(cfg.seed, 9);
    }

    #[test]
    fn parses_implicit_curve_spec() {
        let c = parse_curve_spec("implicit:poly=2,0,1+0,2,1+0,0,-1:ref=1,0").unwrap();
        assert!(matches!(c, Curve::Implicit(_)));
    }

    #[test]
    fn parses_field_terms() {
        let text = "\
[field]
term = phi,power,1,0.5,0
term = psi,power,2,-0.5,0
term = ---
term = psi,log,0,1,0
";
        let cfg = RunConfig::from_str_with_defaults(text).unwrap();
        assert_eq!(cfg.fields.len(), 2);
        assert_eq!(cfg.fields[0].phi.len(), 1);
        assert_eq!(cfg.fields[1].psi.len(), 1);
    }

    #[test]
    fn rejects_empty_sample() {
        let text = "[sample]\ncount = 0\n";
        assert!(matches!(
            RunConfig::from_str_with_defaults(text),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn rejects_garbage() {
        assert!(RawConfig::parse("key value no equals").is_err());
        assert!(parse_curve_spec("triangle").is_err());
    }
}
