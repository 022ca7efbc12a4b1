//! Scenario files: a TOML document describing one run.
//!
//! Every section and key is optional; missing values are filled from the
//! defaults below. Lengths left unset are derived from the source's
//! natural scale `ℓ` (its wavelength, or its support radius `a` when static).
//!
//! | key | default |
//! |---|---|
//! | `run` | taken from the subcommand |
//! | `seed` | 0 |
//! | `source.kind` | `dipole` when there is no `[source]` table; required inside one |
//! | dipole `moment, omega, sigma, axis, center` | 1, 2π, 0.05, `[0,0,1]`, origin |
//! | rotating `mode, omega, r_min, r_max, half_height` | 5, 1.5, 0.5, 1.0, 0.25 |
//! | rotating `amplitude, polarization, bound_charge` | 1, `azimuthal`, true |
//! | blob `charge, sigma, center` | 1, 0.2, origin |
//! | `switch_on_start`, `switch_on_duration` | 0, one period |
//! | `geometry.inner_radius, outer_radius, observer_distance` | reconstruct 10ℓ, 40ℓ, 20ℓ; cancellation 10ℓ, 20ℓ, 30ℓ |
//! | `geometry.theta, phi` | π/2, 0; decompose and scaling runs on a rotating source use its beam peak |
//! | `geometry.boundary_radii` | 20a, 40a, 80a, 160a |
//! | `geometry.observer_fraction` | 0.5 |
//! | `geometry.random_points` | 8 when no `points` are listed |
//! | `geometry.random_radius` | `[2a, 20a]`; validate `[0.5a, 10a]` |
//! | `geometry.time_offset` | 0 |
//! | `sweep.quantity, r0, ratio, count` | `field`, 20a, 2^(3/4), 5 |
//! | `sweep.observable, threshold` | `magnetic`, 0.5 |
//! | `numerics.tolerance, max_refinements, coordinates` | 1e-6, 3, `auto` |
//! | `numerics.pipeline, differentiation` | `from_potential`, `analytic` |
//! | `numerics.mesh_level, peak_level` | 5, 4 |
//! | `numerics.surface_tolerance, check_refinement` | 1e-3, false |
//! | `numerics.stencil` | `fourth` (h_x = ℓ/60, h_t = h_x/2) |
//! | `checks.closure_tolerance` | 2e-2 |
//! | `checks.reconstruction_tolerance` | 1e-2 |
//! | `checks.cancellation_tolerance` | 1e-3 |
//! | `checks.residual_tolerance, initial_tolerance` | 1e-2, 1e-10 |
//! | `checks.exponent_tolerance` | 0.02 (used with `expected_exponent`) |
//! | `output.csv, summary` | `results.csv`, `summary.json` |

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use fieldlab::quadrature::{Coordinates, QuadratureSpec};
use fieldlab::scaling::{Observable, Pipeline};
use fieldlab::source::{HertzianDipoleSource, Polarization, RotatingPolarizationSource, SourceModel, StaticChargeBlob, SwitchOn};
use fieldlab::validation::StencilOrder;
use fieldlab::Vec3;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunKind {
    Potential,
    Field,
    Decompose,
    Reconstruct,
    Cancellation,
    Scaling,
    Validate,
}

impl RunKind {
    pub const ALL: [RunKind; 7] = [
        RunKind::Potential,
        RunKind::Field,
        RunKind::Decompose,
        RunKind::Reconstruct,
        RunKind::Cancellation,
        RunKind::Scaling,
        RunKind::Validate,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            RunKind::Potential => "potential",
            RunKind::Field => "field",
            RunKind::Decompose => "decompose",
            RunKind::Reconstruct => "reconstruct",
            RunKind::Cancellation => "cancellation",
            RunKind::Scaling => "scaling",
            RunKind::Validate => "validate",
        }
    }
}

impl fmt::Display for RunKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RunKind {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        RunKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| ConfigError::Parse {
                line: None,
                message: format!("unknown run kind `{s}`, expected one of {}", valid_kinds()),
            })
    }
}

fn valid_kinds() -> String {
    RunKind::ALL.iter().map(|k| format!("`{k}`")).collect::<Vec<_>>().join(", ")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DipoleSpec {
    pub moment: f64,
    pub omega: f64,
    pub sigma: f64,
    pub axis: [f64; 3],
    pub center: [f64; 3],
    pub switch_on_start: f64,
    pub switch_on_duration: Option<f64>,
}

impl Default for DipoleSpec {
    fn default() -> Self {
        DipoleSpec {
            moment: 1.0,
            omega: 2.0 * PI,
            sigma: 0.05,
            axis: [0.0, 0.0, 1.0],
            center: [0.0; 3],
            switch_on_start: 0.0,
            switch_on_duration: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RotatingSpec {
    pub mode: u32,
    pub omega: f64,
    pub r_min: f64,
    pub r_max: f64,
    pub half_height: f64,
    pub amplitude: f64,
    pub polarization: Polarization,
    pub bound_charge: bool,
    pub switch_on_start: f64,
    pub switch_on_duration: Option<f64>,
}

impl Default for RotatingSpec {
    fn default() -> Self {
        RotatingSpec {
            mode: 5,
            omega: 1.5,
            r_min: 0.5,
            r_max: 1.0,
            half_height: 0.25,
            amplitude: 1.0,
            polarization: Polarization::Azimuthal,
            bound_charge: true,
            switch_on_start: 0.0,
            switch_on_duration: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BlobSpec {
    pub charge: f64,
    pub sigma: f64,
    pub center: [f64; 3],
}

impl Default for BlobSpec {
    fn default() -> Self {
        BlobSpec {
            charge: 1.0,
            sigma: 0.2,
            center: [0.0; 3],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SourceSpec {
    Dipole(DipoleSpec),
    Rotating(RotatingSpec),
    Blob(BlobSpec),
}

impl Default for SourceSpec {
    fn default() -> Self {
        SourceSpec::Dipole(DipoleSpec::default())
    }
}

fn vec3(a: [f64; 3]) -> Vec3 {
    Vec3::new(a[0], a[1], a[2])
}

fn switch_on(start: f64, duration: Option<f64>, omega: f64) -> fieldlab::Result<SwitchOn> {
    SwitchOn::new(start, duration.unwrap_or(2.0 * PI / omega))
}

impl SourceSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            SourceSpec::Dipole(_) => "dipole",
            SourceSpec::Rotating(_) => "rotating",
            SourceSpec::Blob(_) => "blob",
        }
    }

    pub fn build(&self) -> fieldlab::Result<Arc<dyn SourceModel>> {
        Ok(match self {
            SourceSpec::Dipole(d) => Arc::new(
                HertzianDipoleSource::new(d.moment, d.omega, d.sigma)?
                    .with_axis(vec3(d.axis))?
                    .with_center(vec3(d.center))
                    .with_switch_on(switch_on(d.switch_on_start, d.switch_on_duration, d.omega)?),
            ),
            SourceSpec::Rotating(r) => Arc::new(
                RotatingPolarizationSource::new(r.mode, r.omega, r.r_min, r.r_max, r.half_height)?
                    .with_amplitude(r.amplitude)
                    .with_polarization(r.polarization)
                    .with_bound_charge(r.bound_charge)
                    .with_switch_on(switch_on(r.switch_on_start, r.switch_on_duration, r.omega)?),
            ),
            SourceSpec::Blob(b) => Arc::new(StaticChargeBlob::new(b.charge, b.sigma)?.with_center(vec3(b.center))),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Geometry {
    pub inner_radius: Option<f64>,
    pub outer_radius: Option<f64>,
    pub observer_distance: Option<f64>,
    pub theta: Option<f64>,
    pub phi: Option<f64>,
    pub boundary_radii: Vec<f64>,
    pub observer_fraction: f64,
    pub points: Vec<[f64; 3]>,
    pub random_points: Option<usize>,
    pub random_radius: Option<[f64; 2]>,
    pub time_offset: f64,
}

impl Default for Geometry {
    fn default() -> Self {
        Geometry {
            inner_radius: None,
            outer_radius: None,
            observer_distance: None,
            theta: None,
            phi: None,
            boundary_radii: Vec::new(),
            observer_fraction: 0.5,
            points: Vec::new(),
            random_points: None,
            random_radius: None,
            time_offset: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepQuantity {
    #[default]
    Field,
    Gradient,
    SolidAngle,
    BoundaryTerm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSpec {
    pub quantity: SweepQuantity,
    pub r0: Option<f64>,
    pub ratio: f64,
    pub count: usize,
    pub observable: Observable,
    pub threshold: f64,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            quantity: SweepQuantity::Field,
            r0: None,
            ratio: 2f64.powf(0.75),
            count: 5,
            observable: Observable::Magnetic,
            threshold: 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DifferentiationKind {
    #[default]
    Analytic,
    FiniteDifference,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Numerics {
    pub tolerance: f64,
    pub max_refinements: u32,
    pub coordinates: Coordinates,
    pub counts: Option<[usize; 3]>,
    pub pipeline: Pipeline,
    pub differentiation: DifferentiationKind,
    pub fd_step: Option<f64>,
    pub mesh_level: u32,
    pub peak_level: u32,
    pub surface_tolerance: f64,
    pub check_refinement: bool,
    pub stencil: StencilOrder,
    pub h_x: Option<f64>,
}

impl Default for Numerics {
    fn default() -> Self {
        let q = QuadratureSpec::default();
        Numerics {
            tolerance: q.tolerance,
            max_refinements: q.max_refinements,
            coordinates: q.coordinates,
            counts: None,
            pipeline: Pipeline::FromPotential,
            differentiation: DifferentiationKind::Analytic,
            fd_step: None,
            mesh_level: 5,
            peak_level: 4,
            surface_tolerance: 1e-3,
            check_refinement: false,
            stencil: StencilOrder::Fourth,
            h_x: None,
        }
    }
}

impl Numerics {
    pub fn quadrature(&self) -> QuadratureSpec {
        QuadratureSpec {
            coordinates: self.coordinates,
            counts: self.counts,
            tolerance: self.tolerance,
            max_refinements: self.max_refinements,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Checks {
    pub closure_tolerance: f64,
    pub reconstruction_tolerance: f64,
    pub cancellation_tolerance: f64,
    pub residual_tolerance: f64,
    pub initial_tolerance: f64,
    pub expected_exponent: Option<f64>,
    pub exponent_tolerance: f64,
}

impl Default for Checks {
    fn default() -> Self {
        Checks {
            closure_tolerance: 2e-2,
            reconstruction_tolerance: 1e-2,
            cancellation_tolerance: 1e-3,
            residual_tolerance: 1e-2,
            initial_tolerance: 1e-10,
            expected_exponent: None,
            exponent_tolerance: 0.02,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: Option<String>,
    pub csv: String,
    pub summary: String,
    /// Not echoed: results do not depend on it.
    #[serde(skip_serializing)]
    pub workers: Option<usize>,
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec {
            dir: None,
            csv: "results.csv".into(),
            summary: "summary.json".into(),
            workers: None,
        }
    }
}

/// A fully defaulted scenario.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Scenario {
    pub run: Option<RunKind>,
    pub seed: u64,
    pub source: SourceSpec,
    pub geometry: Geometry,
    pub sweep: SweepSpec,
    pub numerics: Numerics,
    pub checks: Checks,
    pub output: OutputSpec,
}

/// One field-level problem, with the line it was found on when known.
#[derive(Debug, Clone, PartialEq)]
pub struct Issue {
    pub keys: Vec<String>,
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}: {}", self.keys.join(", "), self.message),
            None => write!(f, "{}: {}", self.keys.join(", "), self.message),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("{}", parse_text(*line, message))]
    Parse { line: Option<usize>, message: String },
    #[error("invalid scenario:\n{}", .0.iter().map(|i| format!("  {i}")).collect::<Vec<_>>().join("\n"))]
    Validation(Vec<Issue>),
}

fn parse_text(line: Option<usize>, message: &str) -> String {
    match line {
        Some(l) => format!("parse error at line {l}: {message}"),
        None => format!("parse error: {message}"),
    }
}

/// Resolved lengths for the shell runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShellGeometry {
    pub inner: f64,
    pub outer: f64,
    pub observer: f64,
}

impl Scenario {
    pub fn run_kind(&self) -> RunKind {
        self.run.unwrap_or(RunKind::Field)
    }

    /// Wavelength, or the support radius for static sources.
    pub fn scale_length(src: &dyn SourceModel) -> f64 {
        src.wavelength().unwrap_or_else(|| src.support().radius())
    }

    pub fn shell(&self, src: &dyn SourceModel) -> ShellGeometry {
        let l = Self::scale_length(src);
        let (i, o, d) = match self.run_kind() {
            RunKind::Cancellation => (10.0, 20.0, 30.0),
            _ => (10.0, 40.0, 20.0),
        };
        ShellGeometry {
            inner: self.geometry.inner_radius.unwrap_or(i * l),
            outer: self.geometry.outer_radius.unwrap_or(o * l),
            observer: self.geometry.observer_distance.unwrap_or(d * l),
        }
    }

    pub fn boundary_radii(&self, src: &dyn SourceModel) -> Vec<f64> {
        if self.geometry.boundary_radii.is_empty() {
            let a = src.support().radius();
            [20.0, 40.0, 80.0, 160.0].iter().map(|f| f * a).collect()
        } else {
            self.geometry.boundary_radii.clone()
        }
    }

    pub fn random_radius(&self, src: &dyn SourceModel) -> [f64; 2] {
        let a = src.support().radius();
        self.geometry.random_radius.unwrap_or(match self.run_kind() {
            RunKind::Validate => [0.5 * a, 10.0 * a],
            _ => [2.0 * a, 20.0 * a],
        })
    }

    pub fn random_points(&self) -> usize {
        self.geometry
            .random_points
            .unwrap_or(if self.geometry.points.is_empty() { 8 } else { 0 })
    }

    pub fn sweep_r0(&self, src: &dyn SourceModel) -> f64 {
        self.sweep.r0.unwrap_or(20.0 * src.support().radius())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario serializes to TOML")
    }
}

/// Parse and validate a scenario document.
pub fn parse_scenario(text: &str) -> Result<Scenario, ConfigError> {
    parse_scenario_for(text, None)
}

/// Parse a scenario for a run kind chosen on the command line. A `run`
/// key that names a different kind is an error.
pub fn parse_scenario_for(text: &str, run: Option<RunKind>) -> Result<Scenario, ConfigError> {
    let mut s: Scenario = toml::from_str(text).map_err(|e| ConfigError::Parse {
        line: e.span().map(|r| line_of(text, r.start)),
        message: e.message().trim().to_string(),
    })?;
    if let Some(kind) = run {
        match s.run {
            Some(set) if set != kind => {
                return Err(ConfigError::Validation(vec![Issue {
                    keys: vec!["run".into()],
                    line: locate(text, "run"),
                    message: format!("scenario is for a `{set}` run but `{kind}` was requested"),
                }]))
            }
            _ => s.run = Some(kind),
        }
    }
    let issues = validate(&s, text);
    if issues.is_empty() {
        Ok(s)
    } else {
        Err(ConfigError::Validation(issues))
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Line on which `section.key` is assigned, found by a scan of table
/// headers and key names.
pub fn locate(text: &str, dotted: &str) -> Option<usize> {
    let (section, key) = match dotted.rsplit_once('.') {
        Some((s, k)) => (s, k),
        None => ("", dotted),
    };
    let mut current = String::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.starts_with('[') && line.ends_with(']') {
            current = line.trim_matches(|c| c == '[' || c == ']').trim().to_string();
            continue;
        }
        if current != section {
            continue;
        }
        if let Some((k, _)) = line.split_once('=') {
            if k.trim().trim_matches('"') == key {
                return Some(i + 1);
            }
        }
    }
    None
}

struct Collector<'a> {
    text: &'a str,
    issues: Vec<Issue>,
}

impl Collector<'_> {
    fn push(&mut self, keys: &[&str], message: impl Into<String>) {
        let line = keys.iter().filter_map(|k| locate(self.text, k)).min();
        self.issues.push(Issue {
            keys: keys.iter().map(|k| k.to_string()).collect(),
            line,
            message: message.into(),
        });
    }

    fn positive(&mut self, key: &str, v: f64) {
        if !(v > 0.0 && v.is_finite()) {
            self.push(&[key], format!("must be positive and finite, got {v}"));
        }
    }
}

fn validate(s: &Scenario, text: &str) -> Vec<Issue> {
    let mut c = Collector {
        text,
        issues: Vec::new(),
    };
    let n = &s.numerics;
    c.positive("numerics.tolerance", n.tolerance);
    c.positive("numerics.surface_tolerance", n.surface_tolerance);
    if let Some(h) = n.fd_step {
        c.positive("numerics.fd_step", h);
    }
    if let Some(h) = n.h_x {
        c.positive("numerics.h_x", h);
    }
    if let Some(counts) = n.counts {
        if counts.iter().any(|&k| k < 2) {
            c.push(&["numerics.counts"], format!("node counts must be >= 2, got {counts:?}"));
        }
    }
    if n.mesh_level > 7 {
        c.push(&["numerics.mesh_level"], format!("at most 7, got {}", n.mesh_level));
    }
    if n.peak_level > 6 {
        c.push(&["numerics.peak_level"], format!("at most 6, got {}", n.peak_level));
    }
    let k = &s.checks;
    c.positive("checks.closure_tolerance", k.closure_tolerance);
    c.positive("checks.reconstruction_tolerance", k.reconstruction_tolerance);
    c.positive("checks.cancellation_tolerance", k.cancellation_tolerance);
    c.positive("checks.residual_tolerance", k.residual_tolerance);
    c.positive("checks.initial_tolerance", k.initial_tolerance);
    c.positive("checks.exponent_tolerance", k.exponent_tolerance);

    let src = match s.source.build() {
        Ok(src) => src,
        Err(e) => {
            c.push(&["source.kind"], e.to_string());
            return c.issues;
        }
    };
    let a = src.support().radius();
    let oscillating = matches!(src.frequency(), Some(w) if w > 0.0);
    let g = &s.geometry;

    if let (Some(i), Some(o)) = (g.inner_radius, g.outer_radius) {
        if i >= o {
            c.push(
                &["geometry.inner_radius", "geometry.outer_radius"],
                format!("inner radius {i} must be smaller than outer radius {o}"),
            );
        }
    }
    if !(g.observer_fraction > 0.0 && g.observer_fraction < 1.0) {
        c.push(&["geometry.observer_fraction"], format!("must lie in (0, 1), got {}", g.observer_fraction));
    }
    if let Some([lo, hi]) = g.random_radius {
        if !(lo >= 0.0 && hi > lo) {
            c.push(&["geometry.random_radius"], format!("needs 0 <= min < max, got [{lo}, {hi}]"));
        }
    }
    for (key, v) in [("geometry.theta", g.theta), ("geometry.phi", g.phi)] {
        if let Some(v) = v {
            if !v.is_finite() {
                c.push(&[key], "must be finite");
            }
        }
    }

    match s.run_kind() {
        RunKind::Reconstruct | RunKind::Cancellation => {
            let sh = s.shell(src.as_ref());
            let keys = ["geometry.inner_radius", "geometry.outer_radius"];
            if sh.inner >= sh.outer && !(g.inner_radius.is_some() && g.outer_radius.is_some()) {
                c.push(&keys, format!("inner radius {} must be smaller than outer radius {}", sh.inner, sh.outer));
            }
            if sh.inner <= a {
                c.push(&["geometry.inner_radius"], format!("inner sphere (radius {}) must enclose the source support (radius {a})", sh.inner));
            }
            if !oscillating {
                c.push(&["source.kind"], "shell runs need an oscillating source");
            }
            let ok = match s.run_kind() {
                RunKind::Reconstruct => sh.observer > sh.inner && sh.observer < sh.outer,
                _ => sh.observer > sh.outer,
            };
            if !ok {
                c.push(
                    &["geometry.observer_distance"],
                    match s.run_kind() {
                        RunKind::Reconstruct => format!(
                            "observer at {} must lie strictly between the inner ({}) and outer ({}) radii",
                            sh.observer, sh.inner, sh.outer
                        ),
                        _ => format!("observer at {} must lie outside the outer radius {}", sh.observer, sh.outer),
                    },
                );
            }
        }
        RunKind::Decompose => {
            if !oscillating {
                c.push(&["source.kind"], "decomposition needs an oscillating source");
            }
            for r in s.boundary_radii(src.as_ref()) {
                if !(r > a) {
                    c.push(&["geometry.boundary_radii"], format!("boundary radius {r} must exceed the support radius {a}"));
                }
            }
        }
        RunKind::Scaling => {
            let sw = &s.sweep;
            if sw.count < 4 {
                c.push(&["sweep.count"], format!("at least 4 radii are needed for a fit, got {}", sw.count));
            }
            if !(sw.ratio > 1.0 && sw.ratio <= 2.0) {
                c.push(&["sweep.ratio"], format!("must lie in (1, 2], got {}", sw.ratio));
            }
            let r0 = s.sweep_r0(src.as_ref());
            if !(r0 >= 10.0 * a) {
                c.push(&["sweep.r0"], format!("first radius {r0} is below 10 support radii ({})", 10.0 * a));
            }
            if !(sw.threshold > 0.0 && sw.threshold <= 1.0) {
                c.push(&["sweep.threshold"], format!("must lie in (0, 1], got {}", sw.threshold));
            }
            if matches!(sw.quantity, SweepQuantity::SolidAngle | SweepQuantity::BoundaryTerm) && !oscillating {
                c.push(&["sweep.quantity", "source.kind"], "beam and boundary-term sweeps need an oscillating source");
            }
            if n.pipeline == Pipeline::SourceTermOnly && (sw.observable == Observable::Electric || sw.quantity != SweepQuantity::Field) {
                c.push(
                    &["numerics.pipeline", "sweep.observable"],
                    "the source-term pipeline only provides the magnetic field itself",
                );
            }
        }
        RunKind::Potential | RunKind::Field | RunKind::Validate => {
            if s.geometry.points.is_empty() && s.random_points() == 0 {
                c.push(&["geometry.points", "geometry.random_points"], "no observation points");
            }
        }
    }
    c.issues
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_is_all_defaults() {
        let s = parse_scenario("").unwrap();
        assert_eq!(s, Scenario::default());
        assert_eq!(s.source, SourceSpec::Dipole(DipoleSpec::default()));
    }

    #[test]
    fn minimal_scaling_scenario_fills_defaults() {
        let s = parse_scenario("run = \"scaling\"\n[source]\nkind = \"dipole\"\n").unwrap();
        assert_eq!(s.run, Some(RunKind::Scaling));
        assert_eq!(s.sweep, SweepSpec::default());
        assert_eq!(s.sweep.count, 5);
        assert_eq!(s.numerics.tolerance, 1e-6);
        assert_eq!(s.checks.exponent_tolerance, 0.02);
    }

    #[test]
    fn unknown_run_kind_lists_valid_kinds() {
        let e = parse_scenario("run = \"foo\"\n").unwrap_err();
        let text = e.to_string();
        assert!(matches!(e, ConfigError::Parse { line: Some(1), .. }));
        for k in RunKind::ALL {
            assert!(text.contains(k.as_str()), "{text}");
        }
        assert!("foo".parse::<RunKind>().unwrap_err().to_string().contains("cancellation"));
    }

    #[test]
    fn inner_not_below_outer_names_both_keys() {
        let text = "run = \"reconstruct\"\n\n[geometry]\ninner_radius = 5.0\nouter_radius = 3.0\n";
        let ConfigError::Validation(issues) = parse_scenario(text).unwrap_err() else {
            panic!("expected a validation error");
        };
        let i = issues
            .iter()
            .find(|i| i.keys.contains(&"geometry.outer_radius".to_string()))
            .unwrap();
        assert!(i.keys.contains(&"geometry.inner_radius".to_string()));
        assert_eq!(i.line, Some(4));
    }

    #[test]
    fn unknown_keys_are_rejected_with_a_line() {
        let e = parse_scenario("[numerics]\ntolerance = 1e-6\nmesh_levle = 3\n").unwrap_err();
        assert!(matches!(e, ConfigError::Parse { line: Some(3), .. }), "{e:?}");
    }

    #[test]
    fn tolerances_must_be_positive() {
        let ConfigError::Validation(issues) = parse_scenario("[numerics]\n\ntolerance = -1.0\n").unwrap_err() else {
            panic!("expected a validation error");
        };
        assert_eq!(issues[0].line, Some(3));
        assert_eq!(issues[0].keys, vec!["numerics.tolerance".to_string()]);
    }

    #[test]
    fn rotating_source_parses() {
        let s = parse_scenario("[source]\nkind = \"rotating\"\nmode = 3\npolarization = \"radial\"\n").unwrap();
        let SourceSpec::Rotating(r) = &s.source else { panic!() };
        assert_eq!(r.mode, 3);
        assert_eq!(r.polarization, Polarization::Radial);
        assert_eq!(r.omega, 1.5);
        assert!(s.source.build().is_ok());
    }

    #[test]
    fn invalid_source_parameters_are_reported() {
        let ConfigError::Validation(issues) = parse_scenario("[source]\nkind = \"blob\"\nsigma = -1\n").unwrap_err() else {
            panic!("expected a validation error");
        };
        assert!(issues[0].message.contains("sigma"));
    }

    #[test]
    fn echo_round_trips() {
        let s = parse_scenario("run = \"cancellation\"\nseed = 9\n[source]\nkind = \"rotating\"\n[geometry]\ninner_radius = 9.0\n").unwrap();
        let back = parse_scenario(&s.to_toml()).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn subcommand_sets_or_must_match_the_run_key() {
        assert_eq!(parse_scenario_for("", Some(RunKind::Scaling)).unwrap().run, Some(RunKind::Scaling));
        assert!(parse_scenario_for("run = \"scaling\"\n", Some(RunKind::Scaling)).is_ok());
        let ConfigError::Validation(issues) = parse_scenario_for("\nrun = \"scaling\"\n", Some(RunKind::Field)).unwrap_err() else {
            panic!("expected a validation error");
        };
        assert_eq!(issues[0].line, Some(2));
    }

    #[test]
    fn locate_finds_keys_in_sections() {
        let text = "seed = 1\n[geometry]\n# comment\ninner_radius = 2\n[sweep]\ncount = 3\n";
        assert_eq!(locate(text, "seed"), Some(1));
        assert_eq!(locate(text, "geometry.inner_radius"), Some(4));
        assert_eq!(locate(text, "sweep.count"), Some(6));
        assert_eq!(locate(text, "sweep.ratio"), None);
    }
}
