//! Structural Jenkins-Serrin conditions for the three problem kinds.

use serde::Serialize;

use super::polygon::{enumerate_admissible_polygons, AdmissiblePolygon, PolygonMeasures};
use super::validate::{validate_domain, CURVATURE_SAMPLES};
use super::{ArcGeometry, ArcKind, CheckMode, DomainError, DomainSpec};
use crate::geom::{self, Point};
use crate::metric::NormalSide;

/// Orientation convention shared by the checker, solver and analysis reports.
pub const SIGN_CONVENTION: &str =
    "upward normal N = (X - grad u)/W; div(grad u/W) = H; the lower spherical cap of radius R has H = +2/R; curvatures use the inward normal of the domain";

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModeTag {
    Minimal,
    Cmc { h: f64 },
    Translating,
}

impl From<CheckMode> for ModeTag {
    fn from(m: CheckMode) -> Self {
        match m {
            CheckMode::Minimal => ModeTag::Minimal,
            CheckMode::Cmc { h } => ModeTag::Cmc { h },
            CheckMode::Translating => ModeTag::Translating,
        }
    }
}

/// Numerical slacks derived from the domain's length scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Slack {
    pub scale: f64,
    /// A strict inequality holds when its margin is below `−strict`.
    pub strict: f64,
    /// An equality holds within `equality`.
    pub equality: f64,
    /// Tolerance on sampled curvatures.
    pub curvature: f64,
}

impl Slack {
    pub fn for_scale(scale: f64) -> Self {
        Self {
            scale,
            strict: 1e-9 * scale,
            equality: 1e-6 * scale,
            curvature: 1e-6 / scale,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    /// No failure found, but some polygon side could not be computed.
    Indeterminate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Requirement {
    Strict,
    /// `∂Ω` with no C arcs: replaced by the global equality.
    Equality,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolygonRecord {
    pub id: String,
    pub vertices: Vec<usize>,
    pub is_whole_boundary: bool,
    pub indeterminate: bool,
    pub alpha: f64,
    pub beta: f64,
    pub perimeter: f64,
    pub area: f64,
    /// `2α − ℓ` (minus `H·Area` in CMC mode); must be negative.
    pub margin_alpha: f64,
    /// `2β − ℓ` (plus `H·Area` in CMC mode); absent in translating mode.
    pub margin_beta: Option<f64>,
    pub requirement: Requirement,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GlobalRecord {
    pub alpha_boundary: f64,
    pub beta_boundary: f64,
    pub area: f64,
    /// `α(∂Ω) − β(∂Ω) − H·Area(Ω)` when the equality applies (`H = 0` outside CMC).
    pub equality_residual: Option<f64>,
    pub equality_holds: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisRecord {
    pub name: String,
    pub subject: String,
    pub measured: f64,
    pub bound: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub kind: String,
    pub subject: String,
    pub margin: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub domain: String,
    pub mode: ModeTag,
    pub sign_convention: String,
    pub slack: Slack,
    pub hypotheses: Vec<HypothesisRecord>,
    pub global: GlobalRecord,
    pub polygons: Vec<PolygonRecord>,
    pub notes: Vec<String>,
    pub verdict: Verdict,
    pub certificate: Option<Certificate>,
}

impl CheckReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// Jenkins-Serrin conditions for the minimal surface equation.
pub fn check_minimal(spec: &DomainSpec) -> Result<CheckReport, DomainError> {
    run(spec, CheckMode::Minimal)
}

/// Sufficient conditions for translating graphs; B arcs are not allowed.
pub fn check_translating(spec: &DomainSpec) -> Result<CheckReport, DomainError> {
    if let Some(b) = spec.arcs.iter().find(|a| a.kind == ArcKind::B) {
        return Err(DomainError::HypothesisViolation(format!(
            "translating graphs admit no B arcs, found '{}'",
            b.id
        )));
    }
    if !spec.has_kind(ArcKind::C) {
        return Err(DomainError::HypothesisViolation(
            "the translating check requires at least one C arc".into(),
        ));
    }
    run(spec, CheckMode::Translating)
}

/// Conditions for constant mean curvature `h > 0` graphs (Euclidean metric).
pub fn check_cmc(spec: &DomainSpec, h: f64) -> Result<CheckReport, DomainError> {
    if !spec.metric.is_euclidean() {
        return Err(DomainError::UnsupportedMode(
            "the CMC check is defined for the Euclidean metric only".into(),
        ));
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(DomainError::InvalidParameter(format!(
            "H must be positive, got {h}"
        )));
    }
    run(spec, CheckMode::Cmc { h })
}

fn run(spec: &DomainSpec, mode: CheckMode) -> Result<CheckReport, DomainError> {
    let validation = validate_domain(spec, mode)?;
    let slack = Slack::for_scale(validation.length_scale);
    let polygons = enumerate_admissible_polygons(spec, mode)?;
    let h = match mode {
        CheckMode::Cmc { h } => h,
        _ => 0.0,
    };
    let has_c = spec.has_kind(ArcKind::C);

    let mut notes = Vec::new();
    let hypotheses = match mode {
        CheckMode::Cmc { h } => cmc_hypotheses(spec, h, &slack)?,
        _ => Vec::new(),
    };
    match mode {
        CheckMode::Translating => {
            notes.push("conditions are sufficient only; necessity is not claimed".into());
            notes.push("strictness is applied to every polygon including the whole boundary".into());
        }
        CheckMode::Cmc { .. } if !has_c => notes.push(
            "no C arcs: the whole boundary is held to the area-corrected equality instead of the strict inequalities".into(),
        ),
        CheckMode::Minimal if !has_c => notes.push(
            "no C arcs: the whole boundary is held to the equality alpha = beta instead of the strict inequalities".into(),
        ),
        _ => {}
    }

    let mut records = Vec::with_capacity(polygons.len());
    let mut global = None;
    for p in &polygons {
        let m = p.measure(spec)?;
        if m.alpha + m.beta > m.perimeter + slack.equality {
            return Err(DomainError::Internal(format!(
                "polygon {} has alpha + beta = {} above its perimeter {}",
                p.id(),
                m.alpha + m.beta,
                m.perimeter
            )));
        }
        if p.is_whole_boundary {
            let applies = !has_c && mode != CheckMode::Translating;
            let residual = m.alpha - m.beta - h * m.area;
            global = Some(GlobalRecord {
                alpha_boundary: m.alpha,
                beta_boundary: m.beta,
                area: m.area,
                equality_residual: applies.then_some(residual),
                equality_holds: applies.then_some(residual.abs() <= slack.equality),
            });
        }
        records.push(record(p, &m, mode, has_c, &slack));
    }
    let global = global.expect("the whole boundary is always enumerated");

    let mut certificate = None;
    for hy in &hypotheses {
        if !hy.holds {
            certificate = Some(Certificate {
                kind: "hypothesis".into(),
                subject: hy.subject.clone(),
                margin: hy.measured - hy.bound,
                detail: format!("{}: measured {} against bound {}", hy.name, hy.measured, hy.bound),
            });
            break;
        }
    }
    if certificate.is_none() {
        if let (Some(false), Some(r)) = (global.equality_holds, global.equality_residual) {
            certificate = Some(Certificate {
                kind: "equality".into(),
                subject: "boundary".into(),
                margin: r,
                detail: "alpha(boundary) - beta(boundary) - H*Area differs from 0".into(),
            });
        }
    }
    if certificate.is_none() {
        if let Some(r) = records.iter().find(|r| !r.holds) {
            let (margin, which) = match r.margin_beta {
                Some(b) if b > r.margin_alpha => (b, "beta"),
                _ => (r.margin_alpha, "alpha"),
            };
            certificate = Some(Certificate {
                kind: "polygon".into(),
                subject: r.id.clone(),
                margin,
                detail: format!("the {which} inequality is not strict (margin {margin})"),
            });
        }
    }
    let verdict = if certificate.is_some() {
        Verdict::Fail
    } else if records.iter().any(|r| r.indeterminate) {
        notes.push("some geodesic sides could not be computed; see indeterminate polygons".into());
        Verdict::Indeterminate
    } else {
        Verdict::Pass
    };
    Ok(CheckReport {
        domain: spec.name.clone(),
        mode: mode.into(),
        sign_convention: SIGN_CONVENTION.into(),
        slack,
        hypotheses,
        global,
        polygons: records,
        notes,
        verdict,
        certificate,
    })
}

fn record(
    p: &AdmissiblePolygon,
    m: &PolygonMeasures,
    mode: CheckMode,
    has_c: bool,
    slack: &Slack,
) -> PolygonRecord {
    let (margin_alpha, margin_beta) = match mode {
        CheckMode::Minimal => (
            2.0 * m.alpha - m.perimeter,
            Some(2.0 * m.beta - m.perimeter),
        ),
        CheckMode::Translating => (2.0 * m.alpha - m.perimeter, None),
        CheckMode::Cmc { h } => (
            2.0 * m.alpha - m.perimeter - h * m.area,
            Some(2.0 * m.beta - m.perimeter + h * m.area),
        ),
    };
    let requirement = if p.is_whole_boundary && !has_c && mode != CheckMode::Translating {
        Requirement::Equality
    } else {
        Requirement::Strict
    };
    let holds = match requirement {
        Requirement::Equality => true,
        Requirement::Strict => {
            margin_alpha < -slack.strict && margin_beta.is_none_or(|b| b < -slack.strict)
        }
    };
    PolygonRecord {
        id: p.id(),
        vertices: p.vertex_indices.clone(),
        is_whole_boundary: p.is_whole_boundary,
        indeterminate: p.indeterminate,
        alpha: m.alpha,
        beta: m.beta,
        perimeter: m.perimeter,
        area: m.area,
        margin_alpha,
        margin_beta,
        requirement,
        holds,
    }
}

fn cmc_hypotheses(
    spec: &DomainSpec,
    h: f64,
    slack: &Slack,
) -> Result<Vec<HypothesisRecord>, DomainError> {
    let mut out = Vec::new();
    for a in &spec.arcs {
        let ks = a.curvature_samples(&spec.metric, NormalSide::Left, CURVATURE_SAMPLES)?;
        let rec = match a.kind {
            ArcKind::A | ArcKind::B => {
                let target = if a.kind == ArcKind::A { h } else { -h };
                let dev = ks.iter().map(|k| (k.1 - target).abs()).fold(0.0, f64::max);
                HypothesisRecord {
                    name: format!("curvature of {} arc equals {}", a.kind, target),
                    subject: a.id.clone(),
                    measured: dev,
                    bound: slack.curvature,
                    holds: dev <= slack.curvature,
                }
            }
            ArcKind::C => {
                let min = ks.iter().map(|k| k.1).fold(f64::INFINITY, f64::min);
                HypothesisRecord {
                    name: "curvature of C arc at least H".into(),
                    subject: a.id.clone(),
                    measured: min,
                    bound: h - slack.curvature,
                    holds: min >= h - slack.curvature,
                }
            }
        };
        out.push(rec);
    }
    for a in spec.arcs.iter().filter(|a| a.kind == ArcKind::B) {
        let len = a.length(&spec.metric)?;
        let bound = std::f64::consts::PI / h;
        out.push(HypothesisRecord {
            name: "length of B arc below pi/H".into(),
            subject: a.id.clone(),
            measured: len,
            bound,
            holds: len < bound - slack.strict,
        });
    }
    let radius = reflected_domain_radius(spec);
    out.push(HypothesisRecord {
        name: "reflected domain fits in a disk of radius 1/H".into(),
        subject: "reflected_domain".into(),
        measured: radius,
        bound: 1.0 / h,
        holds: radius <= 1.0 / h + slack.equality,
    });
    Ok(out)
}

/// Smallest-enclosing-disk radius of the domain with every B arc reflected across its chord.
fn reflected_domain_radius(spec: &DomainSpec) -> f64 {
    let step = spec.euclidean_perimeter() / 4096.0;
    let mut pts: Vec<Point> = Vec::new();
    for a in &spec.arcs {
        let samples = match &a.geometry {
            ArcGeometry::Segment { p, q } => vec![*p, *q],
            g => g.discretize(step),
        };
        if a.kind == ArcKind::B {
            let (s, e) = (a.geometry.start(), a.geometry.end());
            pts.extend(samples.iter().map(|p| geom::reflect_across_line(*p, s, e)));
        } else {
            pts.extend(samples);
        }
    }
    geom::smallest_enclosing_disk(&pts).map_or(0.0, |d| d.1)
}
