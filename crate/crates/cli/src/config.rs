//! Scenario files: TOML with `spec_version = 1`.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const SPEC_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{origin}: {message}")]
    Parse { origin: String, message: String },
    #[error("{origin}: `{field}`: {message}")]
    Invalid {
        origin: String,
        field: String,
        message: String,
    },
    #[error("{0}")]
    Unknown(String),
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub spec_version: u32,
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub profile: ProfileSpec,
    #[serde(default)]
    pub model: Option<ModelSpec>,
    #[serde(default)]
    pub field: Option<FieldSpec>,
    #[serde(default)]
    pub barrier: Option<BarrierSpec>,
    #[serde(default)]
    pub audits: Vec<AuditSpec>,
    #[serde(default)]
    pub oracles: Vec<OracleSpec>,
    #[serde(default)]
    pub output: OutputSpec,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ProfileSpec {
    pub flux: FluxSpec,
    pub potential: PotentialSpec,
    pub range: [f64; 2],
    #[serde(default)]
    pub structure: Option<StructureSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FluxSpec {
    Linear,
    PLaplace { p: f64 },
    Polynomial { coefficients: Vec<f64> },
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PotentialSpec {
    AllenCahn {
        #[serde(default = "one")]
        scale: f64,
    },
    AllenCahnWell {
        #[serde(default = "one")]
        scale: f64,
    },
    Constant {
        value: f64,
    },
    Linear {
        slope: f64,
    },
    Polynomial {
        coefficients: Vec<f64>,
    },
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct StructureSpec {
    pub p: f64,
    #[serde(default)]
    pub tau: f64,
    pub c1: f64,
    pub c2: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
#[derive(Default)]
pub enum NormSpec {
    #[default]
    Euclidean,
    Lp {
        p: f64,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ModelSpec {
    Interval {
        a: f64,
        b: f64,
    },
    Circle {
        radius: f64,
    },
    FlatTorus {
        periods: Vec<f64>,
        #[serde(default)]
        norm: NormSpec,
    },
    SphereRadial {
        n: usize,
        radius: f64,
    },
    WarpedProduct {
        n: usize,
        interval: [f64; 2],
        kappa: f64,
        #[serde(default)]
        z0: f64,
    },
    RadialBall {
        n: usize,
        radius: f64,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FunctionSpec {
    /// `tanh((x - center) / width)`.
    Kink {
        width: f64,
        #[serde(default)]
        center: f64,
    },
    Constant {
        value: f64,
    },
    /// `amplitude sin(2 pi k . x / L)` on a flat torus.
    Sine {
        amplitude: f64,
        wavenumbers: Vec<f64>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum BoundarySpec {
    Dirichlet {
        #[serde(default)]
        left: Option<f64>,
        right: f64,
    },
    Neumann {
        bracket: [f64; 2],
    },
    Initial {
        value: f64,
        slope: f64,
    },
    Periodic {
        #[serde(default)]
        center: f64,
        slope_bracket: [f64; 2],
    },
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SeedSpec {
    Stripe {
        amplitude: f64,
        #[serde(default = "one_usize")]
        wavenumber: usize,
        #[serde(default)]
        axis: usize,
    },
    Diagonal {
        amplitude: f64,
        #[serde(default = "one_usize")]
        wavenumber: usize,
    },
    Checkerboard {
        amplitude: f64,
        #[serde(default = "one_usize")]
        wavenumber: usize,
    },
    Random {
        amplitude: f64,
        #[serde(default = "default_seed")]
        seed: u64,
    },
}

fn one_usize() -> usize {
    1
}

fn default_seed() -> u64 {
    42
}

fn default_points() -> Vec<usize> {
    vec![1025]
}

fn default_symmetric_tol() -> f64 {
    1e-8
}

fn default_relax_tol() -> f64 {
    1e-10
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FieldSpec {
    /// Closed-form samples on an interval model.
    Analytic {
        function: FunctionSpec,
        #[serde(default = "default_points")]
        points: Vec<usize>,
        #[serde(default = "default_symmetric_tol")]
        tolerance: f64,
    },
    Symmetric {
        boundary: BoundarySpec,
        #[serde(default = "default_points")]
        points: Vec<usize>,
        #[serde(default = "default_symmetric_tol")]
        tolerance: f64,
        #[serde(default)]
        polar_extent: Option<f64>,
    },
    Relax {
        seed: SeedSpec,
        resolutions: Vec<usize>,
        #[serde(default = "default_relax_tol")]
        tolerance: f64,
        #[serde(default)]
        pseudo_steps: Option<usize>,
    },
    /// Relaxation with the forcing manufactured from `function`, seeded with
    /// the exact samples; reports the distance to them.
    Manufactured {
        function: FunctionSpec,
        resolutions: Vec<usize>,
        #[serde(default = "default_relax_tol")]
        tolerance: f64,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "kebab-case")]
pub enum BarrierKindSpec {
    Flat,
    Warped,
    SphereFamily,
    Modica,
}

/// Target range of a barrier.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum RangeSpec {
    Named(RangeSource),
    Explicit([f64; 2]),
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "kebab-case")]
pub enum RangeSource {
    Field,
    Profile,
}

fn zero_list() -> Vec<f64> {
    vec![0.0]
}

fn barrier_points() -> usize {
    1025
}

fn ode_tol() -> f64 {
    1e-12
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct BarrierSpec {
    pub kind: BarrierKindSpec,
    /// Interval of the flat and warped barriers; defaults to the model's.
    #[serde(default)]
    pub interval: Option<[f64; 2]>,
    #[serde(default)]
    pub range: Option<RangeSpec>,
    /// Sweep of the flat-barrier perturbation.
    #[serde(default = "zero_list")]
    pub delta: Vec<f64>,
    /// Sweep of absolute levels (sphere family, Modica).
    #[serde(default)]
    pub c: Vec<f64>,
    /// Sweep of levels relative to `c_u`.
    #[serde(default)]
    pub c_offset: Vec<f64>,
    #[serde(default)]
    pub s0: f64,
    #[serde(default)]
    pub u0: f64,
    #[serde(default = "barrier_points")]
    pub grid_points: usize,
    #[serde(default = "ode_tol")]
    pub ode_tolerance: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[serde(rename_all = "kebab-case")]
pub enum AuditKind {
    TwoPoint,
    /// `max |Z|` over pairs ordered along the coordinate of a 1-D field.
    TwoPointEquality,
    Gradient,
    Modica,
    Rigidity,
    DirichletBoundary,
    /// `-(min phi' - sqrt(K^-1(c - c_u)))` of sphere-family curves.
    BarrierSlopeBound,
    /// Largest increase of the covered length as `c` grows.
    BarrierLengthMonotone,
    /// `min_order` minus the refinement order of the consistency residual.
    ResidualOrder,
    /// Sup distance between the relaxed and the manufactured samples.
    ManufacturedError,
}

fn floor() -> f64 {
    1e-9
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct AuditSpec {
    pub kind: AuditKind,
    #[serde(default = "floor")]
    pub floor: f64,
    #[serde(default)]
    pub c_tol: f64,
    #[serde(default)]
    pub min_order: Option<f64>,
    #[serde(default)]
    pub subsample: Option<usize>,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum OracleSpec {
    /// `K^-1(K(s)) = s` on the scenario profile and p-Laplace variants.
    KInverse {
        #[serde(default)]
        p: Vec<f64>,
        samples: Vec<f64>,
        tolerance: f64,
    },
    /// Numeric dual of an l^p norm against the Hoelder dual.
    DualNorm {
        p: f64,
        samples: usize,
        tolerance: f64,
    },
    /// 2-D relaxation on a thin torus against the periodic 1-D reduction.
    ThinTorus {
        length: f64,
        dims: [usize; 2],
        amplitude: f64,
        noise: f64,
        #[serde(default = "default_relax_tol")]
        relax_tolerance: f64,
        #[serde(default = "ode_points")]
        ode_points: usize,
        tolerance: f64,
    },
    /// `rho'' + kappa rho` at samples of an interval.
    WarpResidual {
        kappa: f64,
        z0: f64,
        interval: [f64; 2],
        samples: usize,
        tolerance: f64,
    },
    /// Modica quadrature against direct integration of its ODE.
    ModicaOde {
        p: Vec<f64>,
        potentials: Vec<PotentialSpec>,
        range: [f64; 2],
        c_offset: f64,
        tolerance: f64,
    },
}

fn ode_points() -> usize {
    4096
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default = "yes")]
    pub plots: bool,
    #[serde(default = "yes")]
    pub csv: bool,
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self {
            plots: true,
            csv: true,
        }
    }
}

impl OracleSpec {
    pub fn name(&self) -> &'static str {
        match self {
            OracleSpec::KInverse { .. } => "k-inverse",
            OracleSpec::DualNorm { .. } => "dual-norm",
            OracleSpec::ThinTorus { .. } => "thin-torus",
            OracleSpec::WarpResidual { .. } => "warp-residual",
            OracleSpec::ModicaOde { .. } => "modica-ode",
        }
    }
}

impl AuditKind {
    pub fn name(&self) -> &'static str {
        match self {
            AuditKind::TwoPoint => "two-point",
            AuditKind::TwoPointEquality => "two-point-equality",
            AuditKind::Gradient => "gradient",
            AuditKind::Modica => "modica",
            AuditKind::Rigidity => "rigidity",
            AuditKind::DirichletBoundary => "dirichlet-boundary",
            AuditKind::BarrierSlopeBound => "barrier-slope-bound",
            AuditKind::BarrierLengthMonotone => "barrier-length-monotone",
            AuditKind::ResidualOrder => "residual-order",
            AuditKind::ManufacturedError => "manufactured-error",
        }
    }

    /// Audits that compare a field against a barrier.
    pub fn needs_barrier(&self) -> bool {
        matches!(
            self,
            AuditKind::TwoPoint
                | AuditKind::TwoPointEquality
                | AuditKind::Gradient
                | AuditKind::DirichletBoundary
                | AuditKind::BarrierSlopeBound
                | AuditKind::BarrierLengthMonotone
        )
    }

    pub fn needs_field(&self) -> bool {
        !matches!(
            self,
            AuditKind::BarrierSlopeBound | AuditKind::BarrierLengthMonotone
        )
    }
}

/// Sweepable parameters accepted by `--sweep-only`.
pub const SWEEP_PARAMS: [&str; 3] = ["resolution", "c", "delta"];

impl Scenario {
    pub fn parse(text: &str, origin: &str) -> Result<Scenario, ConfigError> {
        let scenario: Scenario = toml::from_str(text).map_err(|e| ConfigError::Parse {
            origin: origin.to_string(),
            message: e.to_string(),
        })?;
        scenario.validate(origin)?;
        Ok(scenario)
    }

    pub fn load(path: &Path) -> Result<Scenario, ConfigError> {
        let origin = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Parse {
            origin: origin.clone(),
            message: e.to_string(),
        })?;
        Self::parse(&text, &origin)
    }

    pub fn resolutions(&self) -> Vec<usize> {
        match &self.field {
            Some(FieldSpec::Analytic { points, .. })
            | Some(FieldSpec::Symmetric { points, .. }) => points.clone(),
            Some(FieldSpec::Relax { resolutions, .. })
            | Some(FieldSpec::Manufactured { resolutions, .. }) => resolutions.clone(),
            None => Vec::new(),
        }
    }

    /// Replace the resolution list of the field.
    pub fn override_resolution(&mut self, n: usize) {
        match &mut self.field {
            Some(FieldSpec::Analytic { points, .. })
            | Some(FieldSpec::Symmetric { points, .. }) => *points = vec![n],
            Some(FieldSpec::Relax { resolutions, .. })
            | Some(FieldSpec::Manufactured { resolutions, .. }) => *resolutions = vec![n],
            None => {}
        }
    }

    /// Keep the full list of `param` and the first entry of every other
    /// sweep.
    pub fn restrict_sweeps(&mut self, param: &str) -> Result<(), ConfigError> {
        if !SWEEP_PARAMS.contains(&param) {
            return Err(ConfigError::Unknown(format!(
                "--sweep-only {param}: expected one of {}",
                SWEEP_PARAMS.join(", ")
            )));
        }
        if param != "resolution" {
            if let Some(first) = self.resolutions().first().copied() {
                self.override_resolution(first);
            }
        }
        if let Some(b) = &mut self.barrier {
            if param != "c" {
                b.c.truncate(1);
                b.c_offset.truncate(1);
            }
            if param != "delta" {
                b.delta.truncate(1);
            }
        }
        Ok(())
    }

    pub fn validate(&self, origin: &str) -> Result<(), ConfigError> {
        let bad = |field: &str, message: String| {
            Err(ConfigError::Invalid {
                origin: origin.to_string(),
                field: field.to_string(),
                message,
            })
        };
        if self.spec_version != SPEC_VERSION {
            return bad(
                "spec_version",
                format!(
                    "unsupported version {}, expected {SPEC_VERSION}",
                    self.spec_version
                ),
            );
        }
        if self.name.trim().is_empty() {
            return bad("name", "empty scenario name".into());
        }
        let [m, big_m] = self.profile.range;
        if !(m.is_finite() && big_m.is_finite() && m <= big_m) {
            return bad("profile.range", format!("invalid range [{m}, {big_m}]"));
        }
        if let Some(field) = &self.field {
            if self.model.is_none() {
                return bad("field", "a field needs a [model]".into());
            }
            let res = self.resolutions();
            if res.is_empty() {
                return bad("field", "resolution list is empty".into());
            }
            match field {
                FieldSpec::Relax { .. } | FieldSpec::Manufactured { .. } => {
                    if let Some(n) = res.iter().find(|n| !n.is_power_of_two()) {
                        return bad("field.resolutions", format!("{n} is not a power of two"));
                    }
                    if !matches!(self.model, Some(ModelSpec::FlatTorus { .. })) {
                        return bad("model", "relaxed fields live on flat tori".into());
                    }
                }
                FieldSpec::Analytic { function, .. } => {
                    if res.iter().any(|n| *n < 2) {
                        return bad("field.points", "need at least two points".into());
                    }
                    if !matches!(self.model, Some(ModelSpec::Interval { .. })) {
                        return bad(
                            "model",
                            "analytic fields are sampled on an interval model".into(),
                        );
                    }
                    if matches!(function, FunctionSpec::Sine { .. }) {
                        return bad(
                            "field.function",
                            "sine samples need a manufactured field".into(),
                        );
                    }
                }
                FieldSpec::Symmetric { .. } => {
                    if res.iter().any(|n| *n < 5) {
                        return bad("field.points", "need at least five points".into());
                    }
                }
            }
        }
        if let Some(b) = &self.barrier {
            if b.delta.is_empty() {
                return bad("barrier.delta", "sweep list is empty".into());
            }
            match b.kind {
                BarrierKindSpec::SphereFamily | BarrierKindSpec::Modica => {
                    if b.c.is_empty() == b.c_offset.is_empty() {
                        return bad(
                            "barrier.c",
                            "give exactly one nonempty sweep of `c` or `c_offset`".into(),
                        );
                    }
                }
                BarrierKindSpec::Flat | BarrierKindSpec::Warped => {
                    if !b.c.is_empty() || !b.c_offset.is_empty() {
                        return bad(
                            "barrier.c",
                            "levels apply to sphere-family and Modica barriers".into(),
                        );
                    }
                    if b.interval.is_none()
                        && !matches!(
                            self.model,
                            Some(ModelSpec::WarpedProduct { .. })
                                | Some(ModelSpec::Interval { .. })
                        )
                    {
                        return bad(
                            "barrier.interval",
                            "no interval and none implied by the model".into(),
                        );
                    }
                }
            }
            if b.kind == BarrierKindSpec::Warped
                && !matches!(self.model, Some(ModelSpec::WarpedProduct { .. }))
            {
                return bad(
                    "barrier.kind",
                    "warped barriers need a warped-product model".into(),
                );
            }
            if b.kind == BarrierKindSpec::SphereFamily
                && !matches!(self.model, Some(ModelSpec::SphereRadial { .. }))
            {
                return bad(
                    "barrier.kind",
                    "the sphere family needs a sphere-radial model".into(),
                );
            }
            if matches!(b.range, Some(RangeSpec::Named(RangeSource::Field))) && self.field.is_none()
            {
                return bad(
                    "barrier.range",
                    "range = \"field\" without a [field]".into(),
                );
            }
            if b.grid_points < 3 {
                return bad("barrier.grid_points", "need at least three points".into());
            }
        }
        for (i, a) in self.audits.iter().enumerate() {
            let at = format!("audits[{i}]");
            if a.kind.needs_barrier() && self.barrier.is_none() {
                return bad(&at, format!("{} needs a [barrier]", a.kind.name()));
            }
            if a.kind.needs_field() && self.field.is_none() {
                return bad(&at, format!("{} needs a [field]", a.kind.name()));
            }
            if a.kind == AuditKind::DirichletBoundary
                && !matches!(self.model, Some(ModelSpec::RadialBall { .. }))
            {
                return bad(&at, "dirichlet-boundary needs a radial-ball model".into());
            }
            if a.kind == AuditKind::ResidualOrder {
                if a.min_order.is_none() {
                    return bad(&at, "residual-order needs `min_order`".into());
                }
                if !matches!(self.field, Some(FieldSpec::Relax { .. })) {
                    return bad(&at, "residual-order applies to relaxed fields".into());
                }
            }
            if a.kind == AuditKind::ManufacturedError
                && !matches!(self.field, Some(FieldSpec::Manufactured { .. }))
            {
                return bad(&at, "manufactured-error needs a manufactured field".into());
            }
            if matches!(
                a.kind,
                AuditKind::BarrierSlopeBound | AuditKind::BarrierLengthMonotone
            ) && !matches!(
                self.barrier.as_ref().map(|b| &b.kind),
                Some(BarrierKindSpec::SphereFamily) | Some(BarrierKindSpec::Modica)
            ) {
                return bad(
                    &at,
                    "barrier level checks need a sphere-family or Modica barrier".into(),
                );
            }
            if !(a.floor >= 0.0 && a.c_tol >= 0.0) {
                return bad(&at, "tolerances must be nonnegative".into());
            }
        }
        for (i, o) in self.oracles.iter().enumerate() {
            let at = format!("oracles[{i}]");
            match o {
                OracleSpec::KInverse { samples, .. } if samples.is_empty() => {
                    return bad(&at, "empty sample list".into())
                }
                OracleSpec::ModicaOde { p, potentials, .. }
                    if p.is_empty() || potentials.is_empty() =>
                {
                    return bad(&at, "sweep list is empty".into())
                }
                OracleSpec::ThinTorus { dims, .. }
                    if !(dims[0].is_power_of_two() && dims[1].is_power_of_two()) =>
                {
                    return bad(&at, format!("dims {dims:?} are not powers of two"))
                }
                _ => {}
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
spec_version = 1
name = "t"
[profile]
flux = { kind = "linear" }
potential = { kind = "allen-cahn" }
range = [-1.0, 1.0]
"#;

    #[test]
    fn minimal_config_parses() {
        let s = Scenario::parse(MINIMAL, "inline").unwrap();
        assert_eq!(s.profile.potential, PotentialSpec::AllenCahn { scale: 1.0 });
        assert!(s.output.plots);
    }

    #[test]
    fn wrong_version_is_rejected() {
        let text = MINIMAL.replace("spec_version = 1", "spec_version = 2");
        let err = Scenario::parse(&text, "inline").unwrap_err();
        assert!(err.to_string().contains("spec_version"), "{err}");
    }

    #[test]
    fn unknown_key_reports_a_line() {
        let text = format!("{MINIMAL}bogus = 3\n");
        let err = Scenario::parse(&text, "inline").unwrap_err();
        assert!(err.to_string().contains("line"), "{err}");
    }

    #[test]
    fn resolutions_must_be_powers_of_two() {
        let text = format!(
            "{MINIMAL}[model]\nkind = \"flat-torus\"\nperiods = [1.0]\n[field]\nkind = \"relax\"\n\
             resolutions = [48]\nseed = {{ kind = \"stripe\", amplitude = 0.5 }}\n"
        );
        let err = Scenario::parse(&text, "inline").unwrap_err();
        assert!(err.to_string().contains("power of two"), "{err}");
    }

    #[test]
    fn sweep_restriction_keeps_one_list() {
        let text = format!(
            "{MINIMAL}[model]\nkind = \"sphere-radial\"\nn = 2\nradius = 1.0\n[barrier]\n\
             kind = \"sphere-family\"\nc_offset = [0.1, 0.01]\ndelta = [0.0, 0.1]\n"
        );
        let mut s = Scenario::parse(&text, "inline").unwrap();
        s.restrict_sweeps("c").unwrap();
        let b = s.barrier.unwrap();
        assert_eq!(b.c_offset.len(), 2);
        assert_eq!(b.delta.len(), 1);
    }
}
