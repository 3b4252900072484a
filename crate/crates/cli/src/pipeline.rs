//! profile -> model -> field -> barrier -> audits for one scenario.

use std::f64::consts::PI;

use barrier_bound::barriers::{
    invert_barrier, modica_barrier_with, modica_ode_curve, solve_flat_barrier_with,
    solve_sphere_family_with, solve_warped_barrier_with, BarrierCurve, BarrierOptions,
    InverseBarrier,
};
use barrier_bound::geometry::{
    distance, dual_norm, warp_factor, MinkowskiNorm, ModelManifold, TorusNorm,
};
use barrier_bound::numeric::ode::Dopri5;
use barrier_bound::pde::{
    manufactured_field, manufactured_forcing, relax_to_steady_with, seed_field,
    solve_symmetric_with, AnalyticFunction, BoundaryCondition, Grid, RelaxOptions, ScalarField,
    Seed, SymmetricOptions,
};
use barrier_bound::profiles::{coefficients_from_profile, Flux, Potential, VariationalProfile};
use barrier_bound::verify::{
    dirichlet_boundary_audit_with, gradient_audit_with, modica_audit_with, refinement_order,
    rigidity_audit_with, two_point_audit, RefinementLevel, Sampling, ToleranceModel, Verdict,
    VerificationReport, Witness,
};
use barrier_bound::Error;
use serde::Serialize;

use crate::config::{
    AuditKind, AuditSpec, BarrierKindSpec, BarrierSpec, BoundarySpec, FieldSpec, FluxSpec,
    FunctionSpec, ModelSpec, NormSpec, OracleSpec, PotentialSpec, ProfileSpec, RangeSource,
    RangeSpec, Scenario, SeedSpec,
};

/// One resolution of a check.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct LevelRecord {
    pub resolution: usize,
    pub h: f64,
    pub max_defect: f64,
    pub tolerance: f64,
    pub verdict: Option<Verdict>,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct CheckRecord {
    pub check: String,
    /// Sweep point label, empty when the check is not swept.
    pub sweep: String,
    pub max_defect: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
    pub witness: Witness,
    pub samples: usize,
    pub levels: Vec<LevelRecord>,
    pub refinement_order: Option<f64>,
    pub notes: Vec<String>,
}

impl CheckRecord {
    fn simple(check: &str, sweep: String, defect: f64, tolerance: f64, notes: Vec<String>) -> Self {
        Self {
            check: check.to_string(),
            sweep,
            max_defect: defect,
            tolerance,
            verdict: if defect <= tolerance {
                Verdict::Pass
            } else {
                Verdict::Fail
            },
            witness: Witness::None,
            samples: 0,
            levels: Vec::new(),
            refinement_order: None,
            notes,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct FieldSummary {
    pub resolution: usize,
    pub points: usize,
    pub h: f64,
    pub range: [f64; 2],
    pub residual_norm: f64,
    pub tolerance: f64,
    pub unregularized_residual: Option<f64>,
    pub consistency_residual: Option<f64>,
    pub solver_iterations: usize,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct BarrierSummary {
    pub sweep: String,
    pub resolution: Option<usize>,
    pub metadata: serde_json::Value,
    pub length: f64,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Report {
    pub schema: &'static str,
    pub spec_version: u32,
    pub scenario: String,
    pub description: String,
    pub generated_at: u64,
    pub profile: ProfileSpec,
    pub model: Option<ModelSpec>,
    pub fields: Vec<FieldSummary>,
    pub barriers: Vec<BarrierSummary>,
    pub checks: Vec<CheckRecord>,
    pub errors: Vec<String>,
    pub verdict: Status,
}

#[derive(Debug, Clone, Copy, Serialize, PartialEq, Eq, PartialOrd, Ord)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    ConstructionError,
}

impl Status {
    pub fn exit_code(&self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 2,
            Status::ConstructionError => 3,
        }
    }
}

pub struct BarrierArtifact {
    pub sweep: String,
    pub resolution: Option<usize>,
    pub curve: BarrierCurve,
    pub inverse: InverseBarrier,
    pub profile: VariationalProfile,
    pub c: Option<f64>,
}

/// In-memory results kept for plotting and tests.
#[derive(Default)]
pub struct Artifacts {
    pub fields: Vec<(usize, ScalarField)>,
    pub barriers: Vec<BarrierArtifact>,
    pub profile: Option<VariationalProfile>,
    pub model: Option<ModelManifold>,
}

pub struct Outcome {
    pub report: Report,
    pub artifacts: Artifacts,
}

pub const SCHEMA: &str = "barrier-bound-report/1";

pub fn build_potential(spec: &PotentialSpec) -> Potential {
    match spec {
        PotentialSpec::AllenCahn { scale } => Potential::allen_cahn(*scale),
        PotentialSpec::AllenCahnWell { scale } => Potential::allen_cahn_well(*scale),
        PotentialSpec::Constant { value } => Potential::constant(*value),
        PotentialSpec::Linear { slope } => Potential::linear(*slope),
        PotentialSpec::Polynomial { coefficients } => Potential::Polynomial(coefficients.clone()),
    }
}

pub fn build_profile(spec: &ProfileSpec) -> Result<VariationalProfile, Error> {
    let range = (spec.range[0], spec.range[1]);
    let potential = build_potential(&spec.potential);
    let profile = match &spec.flux {
        FluxSpec::Linear => VariationalProfile::linear(potential, range)?,
        FluxSpec::PLaplace { p } => VariationalProfile::p_laplace(*p, potential, range)?,
        FluxSpec::Polynomial { coefficients } => {
            VariationalProfile::new(Flux::Polynomial(coefficients.clone()), potential, range)?
        }
    };
    match spec.structure {
        Some(s) => profile.with_structure(s.p, s.tau, s.c1, s.c2),
        None => Ok(profile),
    }
}

pub fn build_model(spec: &ModelSpec) -> Result<ModelManifold, Error> {
    let model = match spec {
        ModelSpec::Interval { a, b } => ModelManifold::Interval { a: *a, b: *b },
        ModelSpec::Circle { radius } => ModelManifold::Circle { radius: *radius },
        ModelSpec::FlatTorus { periods, norm } => ModelManifold::FlatTorus {
            periods: periods.clone(),
            norm: match norm {
                NormSpec::Euclidean => TorusNorm::Euclidean,
                NormSpec::Lp { p } => TorusNorm::Minkowski(MinkowskiNorm::lp(*p)?),
            },
        },
        ModelSpec::SphereRadial { n, radius } => ModelManifold::SphereRadial {
            n: *n,
            radius: *radius,
        },
        ModelSpec::WarpedProduct {
            n,
            interval,
            kappa,
            z0,
        } => ModelManifold::WarpedProduct {
            n: *n,
            interval: (interval[0], interval[1]),
            warp: warp_factor(*kappa, *z0)?,
        },
        ModelSpec::RadialBall { n, radius } => ModelManifold::RadialBall {
            n: *n,
            radius: *radius,
        },
    };
    model.validate()?;
    Ok(model)
}

fn boundary(spec: &BoundarySpec) -> BoundaryCondition {
    match spec {
        BoundarySpec::Dirichlet { left, right } => BoundaryCondition::Dirichlet {
            left: *left,
            right: *right,
        },
        BoundarySpec::Neumann { bracket } => BoundaryCondition::Neumann {
            bracket: (bracket[0], bracket[1]),
        },
        BoundarySpec::Initial { value, slope } => BoundaryCondition::Initial {
            value: *value,
            slope: *slope,
        },
        BoundarySpec::Periodic {
            center,
            slope_bracket,
        } => BoundaryCondition::Periodic {
            center: *center,
            slope_bracket: (slope_bracket[0], slope_bracket[1]),
        },
    }
}

fn seed(spec: &SeedSpec) -> Seed {
    match spec {
        SeedSpec::Stripe {
            amplitude,
            wavenumber,
            axis,
        } => Seed::Stripe {
            amplitude: *amplitude,
            wavenumber: *wavenumber,
            axis: *axis,
        },
        SeedSpec::Diagonal {
            amplitude,
            wavenumber,
        } => Seed::Diagonal {
            amplitude: *amplitude,
            wavenumber: *wavenumber,
        },
        SeedSpec::Checkerboard {
            amplitude,
            wavenumber,
        } => Seed::Checkerboard {
            amplitude: *amplitude,
            wavenumber: *wavenumber,
        },
        SeedSpec::Random { amplitude, seed } => Seed::Random {
            amplitude: *amplitude,
            seed: *seed,
        },
    }
}

/// Value, first and second derivative of a one-variable closed form.
fn closed_form_1d(f: &FunctionSpec, x: f64) -> (f64, f64, f64) {
    match f {
        FunctionSpec::Kink { width, center } => {
            let u = ((x - center) / width).tanh();
            let du = (1.0 - u * u) / width;
            (u, du, -2.0 * u * du / width)
        }
        FunctionSpec::Constant { value } => (*value, 0.0, 0.0),
        FunctionSpec::Sine { .. } => unreachable!("rejected by validation"),
    }
}

fn analytic_function(f: &FunctionSpec, periods: &[f64]) -> Result<AnalyticFunction, Error> {
    match f {
        FunctionSpec::Constant { value } => Ok(AnalyticFunction::constant(*value)),
        FunctionSpec::Sine {
            amplitude,
            wavenumbers,
        } => {
            if wavenumbers.len() != periods.len() {
                return Err(Error::Parameter(format!(
                    "{} wavenumbers for a torus of dimension {}",
                    wavenumbers.len(),
                    periods.len()
                )));
            }
            let k: Vec<f64> = wavenumbers
                .iter()
                .zip(periods)
                .map(|(m, l)| 2.0 * PI * m / l)
                .collect();
            let a = *amplitude;
            let (k1, k2, k3) = (k.clone(), k.clone(), k);
            let phase = |k: &[f64], x: &[f64]| k.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
            Ok(AnalyticFunction::new(
                move |x| a * phase(&k1, x).sin(),
                move |x| {
                    let c = a * phase(&k2, x).cos();
                    k2.iter().map(|ki| c * ki).collect()
                },
                move |x| {
                    let s = -a * phase(&k3, x).sin();
                    k3.iter()
                        .map(|ki| k3.iter().map(|kj| s * ki * kj).collect())
                        .collect()
                },
            ))
        }
        FunctionSpec::Kink { .. } => Err(Error::Parameter(
            "a kink is not periodic; manufactured fields need sine or constant functions".into(),
        )),
    }
}

fn torus_periods(model: &ModelManifold) -> Vec<f64> {
    match model {
        ModelManifold::FlatTorus { periods, .. } => periods.clone(),
        _ => Vec::new(),
    }
}

struct BuiltField {
    field: ScalarField,
    /// Sup distance to the exact samples (manufactured fields).
    manufactured_error: Option<f64>,
}

fn build_field(
    spec: &FieldSpec,
    model: &ModelManifold,
    profile: &VariationalProfile,
    n: usize,
) -> Result<BuiltField, Error> {
    let coeffs = coefficients_from_profile(profile);
    let field = match spec {
        FieldSpec::Analytic {
            function,
            tolerance,
            ..
        } => {
            let (a, b) = match model {
                ModelManifold::Interval { a, b } => (*a, *b),
                _ => return Err(Error::Parameter("analytic fields need an interval".into())),
            };
            let grid = Grid::interval(a, b, n)?;
            let xs = grid.axis(0);
            let samples: Vec<(f64, f64, f64)> =
                xs.iter().map(|x| closed_form_1d(function, *x)).collect();
            let residual = samples
                .iter()
                .map(|(u, du, d2u)| (profile.lambda(du * du) * d2u + profile.q(*u)).abs())
                .fold(0.0, f64::max);
            let values = samples.iter().map(|s| s.0).collect();
            let grads = samples.iter().map(|s| s.1.abs()).collect();
            let mut f =
                ScalarField::analytic(model.clone(), grid, values, grads, residual, *tolerance)?;
            f.slope = Some(samples.iter().map(|s| s.1).collect());
            f
        }
        FieldSpec::Symmetric {
            boundary: bc,
            tolerance,
            polar_extent,
            ..
        } => {
            let mut opts = SymmetricOptions {
                points: n,
                tolerance: *tolerance,
                ..SymmetricOptions::default()
            };
            if let Some(e) = polar_extent {
                opts.polar_extent = *e;
            }
            solve_symmetric_with(model, &coeffs, boundary(bc), &opts)?
        }
        FieldSpec::Relax {
            seed: s,
            tolerance,
            pseudo_steps,
            ..
        } => {
            let dims = vec![n; model.dimension()];
            let start = seed_field(model, &dims, &seed(s))?;
            let mut opts = RelaxOptions::default();
            if let Some(k) = pseudo_steps {
                opts.pseudo_steps = *k;
            }
            relax_to_steady_with(model, profile, &start, *tolerance, &opts)?
        }
        FieldSpec::Manufactured {
            function,
            tolerance,
            ..
        } => {
            let periods = torus_periods(model);
            let u = analytic_function(function, &periods)?;
            let grid = Grid::periodic(&periods, &vec![n; periods.len()])?;
            let exact = manufactured_field(model, &grid, &u, *tolerance)?;
            let forcing = manufactured_forcing(model, &grid, &u, &coeffs)?;
            let start = seed_field(model, &grid.dims, &Seed::Values(exact.values.clone()))?;
            let opts = RelaxOptions {
                forcing: Some(forcing.q),
                ..RelaxOptions::default()
            };
            let relaxed = relax_to_steady_with(model, profile, &start, *tolerance, &opts)?;
            let err = relaxed
                .values
                .iter()
                .zip(&exact.values)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            return Ok(BuiltField {
                field: relaxed,
                manufactured_error: Some(err),
            });
        }
    };
    Ok(BuiltField {
        field,
        manufactured_error: None,
    })
}

fn field_spacing(field: &ScalarField) -> f64 {
    let h = field.grid.min_spacing();
    match &field.model {
        ModelManifold::SphereRadial { radius, .. } => h * radius,
        _ => h,
    }
}

fn summarize_field(n: usize, f: &ScalarField) -> FieldSummary {
    let (lo, hi) = f.range();
    FieldSummary {
        resolution: n,
        points: f.len(),
        h: field_spacing(f),
        range: [lo, hi],
        residual_norm: f.residual_norm,
        tolerance: f.tolerance,
        unregularized_residual: f.unregularized_residual,
        consistency_residual: f.consistency_residual,
        solver_iterations: f.history.len(),
    }
}

/// A point of the barrier sweep.
#[derive(Debug, Clone, Copy)]
enum SweepPoint {
    Delta(f64),
    Level(f64),
    Offset(f64),
    Single,
}

impl SweepPoint {
    fn label(&self) -> String {
        match self {
            SweepPoint::Delta(d) => format!("delta={d:e}"),
            SweepPoint::Level(c) => format!("c={c:e}"),
            SweepPoint::Offset(e) => format!("c_offset={e:e}"),
            SweepPoint::Single => String::new(),
        }
    }
}

fn sweep_points(b: &BarrierSpec) -> Vec<SweepPoint> {
    match b.kind {
        BarrierKindSpec::Flat => b.delta.iter().map(|d| SweepPoint::Delta(*d)).collect(),
        BarrierKindSpec::Warped => vec![SweepPoint::Single],
        BarrierKindSpec::SphereFamily | BarrierKindSpec::Modica => {
            if b.c.is_empty() {
                b.c_offset.iter().map(|e| SweepPoint::Offset(*e)).collect()
            } else {
                b.c.iter().map(|c| SweepPoint::Level(*c)).collect()
            }
        }
    }
}

fn barrier_interval(b: &BarrierSpec, model: &ModelManifold) -> Result<(f64, f64), Error> {
    if let Some([a, z]) = b.interval {
        return Ok((a, z));
    }
    match model {
        ModelManifold::Interval { a, b } => Ok((*a, *b)),
        ModelManifold::WarpedProduct { interval, .. } => Ok(*interval),
        _ => Err(Error::Parameter("barrier interval is not set".into())),
    }
}

fn build_barrier(
    spec: &BarrierSpec,
    point: SweepPoint,
    model: &ModelManifold,
    profile: &VariationalProfile,
    range: (f64, f64),
) -> Result<BarrierArtifact, Error> {
    let opts = BarrierOptions {
        grid_points: spec.grid_points,
        ode: Dopri5::with_tolerances(spec.ode_tolerance, spec.ode_tolerance),
        ..BarrierOptions::default()
    };
    let profile = profile.clone().with_range(range)?;
    let coeffs = coefficients_from_profile(&profile);
    let cu = profile.c_sup().value;
    let level = match point {
        SweepPoint::Level(c) => Some(c),
        SweepPoint::Offset(e) => Some(cu + e),
        _ => None,
    };
    let curve = match spec.kind {
        BarrierKindSpec::Flat => {
            let (a, b) = barrier_interval(spec, model)?;
            let delta = match point {
                SweepPoint::Delta(d) => d,
                _ => 0.0,
            };
            solve_flat_barrier_with(&coeffs, a, b, range, delta, &opts)?
        }
        BarrierKindSpec::Warped => {
            let (n, warp) = match model {
                ModelManifold::WarpedProduct { n, warp, .. } => (*n, *warp),
                _ => {
                    return Err(Error::Parameter(
                        "warped barrier without a warped model".into(),
                    ))
                }
            };
            let (a, b) = barrier_interval(spec, model)?;
            solve_warped_barrier_with(&coeffs, &warp, n, a, b, range, &opts)?
        }
        BarrierKindSpec::SphereFamily => {
            let n = match model {
                ModelManifold::SphereRadial { n, .. } => *n,
                _ => {
                    return Err(Error::Parameter(
                        "sphere family without a sphere model".into(),
                    ))
                }
            };
            let c = level.expect("levels are validated");
            solve_sphere_family_with(&profile, c, spec.u0, n, &opts)?
        }
        BarrierKindSpec::Modica => {
            let c = level.expect("levels are validated");
            modica_barrier_with(&profile, c, spec.s0, &opts)?
        }
    };
    let inverse = invert_barrier(&curve);
    Ok(BarrierArtifact {
        sweep: point.label(),
        resolution: None,
        curve,
        inverse,
        profile,
        c: level,
    })
}

fn tolerance(a: &AuditSpec) -> ToleranceModel {
    ToleranceModel::new(a.floor, a.c_tol)
}

fn sampling(a: &AuditSpec) -> Sampling {
    let d = Sampling::default();
    Sampling {
        subsample: a.subsample.unwrap_or(d.subsample),
        seed: a.seed.unwrap_or(d.seed),
        tolerance: tolerance(a),
        ..d
    }
}

/// `max |Z|` over pairs `x < y` of a one-dimensional field.
fn two_point_equality(
    field: &ScalarField,
    inverse: &InverseBarrier,
    model: &ModelManifold,
) -> Result<(f64, Witness), Error> {
    if field.grid.dims.len() != 1 {
        return Err(Error::Parameter(
            "two-point equality needs a 1-D field".into(),
        ));
    }
    let psi: Vec<f64> = field
        .values
        .iter()
        .map(|u| inverse.psi(*u))
        .collect::<Result<_, _>>()?;
    let pts: Vec<Vec<f64>> = (0..field.len()).map(|i| field.point(i)).collect();
    let mut best = (0.0f64, Witness::None);
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let z = (psi[j] - psi[i] - distance(model, &pts[i], &pts[j])?).abs();
            if z > best.0 {
                best = (z, Witness::Pair(pts[i].clone(), pts[j].clone()));
            }
        }
    }
    Ok(best)
}

fn verdict_for(defect: f64, tol: f64, levels: usize) -> Verdict {
    if defect <= tol {
        Verdict::Pass
    } else if levels < 2 {
        Verdict::Inconclusive
    } else {
        Verdict::Fail
    }
}

/// Combine per-resolution core reports of one check.
fn combine(
    check: &str,
    sweep: &str,
    per_level: Vec<(usize, VerificationReport)>,
) -> Result<CheckRecord, Error> {
    let levels: Vec<LevelRecord> = per_level
        .iter()
        .map(|(n, r)| LevelRecord {
            resolution: *n,
            h: r.refinement_history[0].h,
            max_defect: r.max_defect,
            tolerance: r.tolerance,
            verdict: Some(r.verdict),
        })
        .collect();
    let combined = VerificationReport::refine(per_level.into_iter().map(|(_, r)| r).collect())?;
    Ok(CheckRecord {
        check: check.to_string(),
        sweep: sweep.to_string(),
        max_defect: combined.max_defect,
        tolerance: combined.tolerance,
        verdict: combined.verdict,
        witness: combined.witness.clone(),
        samples: combined.samples,
        refinement_order: combined.refinement_order(),
        levels,
        notes: combined.notes,
    })
}

/// A check measured in the runner with the tolerance model of `audit`;
/// the finest level decides.
fn combine_measured(
    check: &str,
    sweep: &str,
    audit: &AuditSpec,
    per_level: Vec<(usize, f64, f64, Witness, usize)>,
) -> CheckRecord {
    let model = tolerance(audit);
    let mut per_level = per_level;
    per_level.sort_by(|a, b| b.1.total_cmp(&a.1));
    let count = per_level.len();
    let levels: Vec<LevelRecord> = per_level
        .iter()
        .enumerate()
        .map(|(k, (n, h, d, _, _))| {
            let tol = model.threshold(*h);
            LevelRecord {
                resolution: *n,
                h: *h,
                max_defect: *d,
                tolerance: tol,
                verdict: Some(verdict_for(*d, tol, k + 1)),
            }
        })
        .collect();
    let history: Vec<RefinementLevel> = levels
        .iter()
        .map(|l| RefinementLevel {
            h: l.h,
            max_defect: l.max_defect,
        })
        .collect();
    let (_, h, d, w, samples) = per_level.pop().expect("at least one level");
    let tol = model.threshold(h);
    CheckRecord {
        check: check.to_string(),
        sweep: sweep.to_string(),
        max_defect: d,
        tolerance: tol,
        verdict: verdict_for(d, tol, count),
        witness: w,
        samples,
        levels,
        refinement_order: refinement_order(&history),
        notes: Vec::new(),
    }
}

fn run_oracle(spec: &OracleSpec, profile: &VariationalProfile) -> Result<Vec<CheckRecord>, Error> {
    let name = spec.name();
    Ok(match spec {
        OracleSpec::KInverse {
            p,
            samples,
            tolerance,
        } => {
            let mut profiles = vec![("profile".to_string(), profile.clone())];
            for pv in p {
                profiles.push((
                    format!("p={pv}"),
                    VariationalProfile::p_laplace(*pv, profile.potential.clone(), profile.range)?,
                ));
            }
            let mut out = Vec::new();
            for (label, prof) in profiles {
                let mut worst = 0.0f64;
                for s in samples {
                    let back = prof.invert_k(prof.eval_k(*s)?)?;
                    worst = worst.max((back - s).abs() / s.abs().max(1.0));
                }
                out.push(CheckRecord::simple(
                    name,
                    label,
                    worst,
                    *tolerance,
                    vec!["relative |K^-1(K(s)) - s|".into()],
                ));
            }
            out
        }
        OracleSpec::DualNorm {
            p,
            samples,
            tolerance,
        } => {
            let h = MinkowskiNorm::lp(*p)?;
            let mut worst = 0.0f64;
            for k in 0..*samples {
                let t = 2.0 * PI * (k as f64 + 0.5) / *samples as f64;
                let r = 0.5 + (k % 3) as f64;
                let v = [r * t.cos(), r * t.sin()];
                let numeric = dual_norm(&h, &v)?;
                let holder = h.analytic_dual(&v).expect("l^p has a closed-form dual");
                worst = worst.max((numeric - holder).abs() / holder.max(1.0));
            }
            vec![CheckRecord::simple(
                name,
                format!("p={p}"),
                worst,
                *tolerance,
                vec![],
            )]
        }
        OracleSpec::ThinTorus {
            length,
            dims,
            amplitude,
            noise,
            relax_tolerance,
            ode_points,
            tolerance,
        } => {
            let gap = thin_torus_gap(
                profile,
                *length,
                *dims,
                *amplitude,
                *noise,
                *relax_tolerance,
                *ode_points,
            )?;
            vec![CheckRecord::simple(
                name,
                format!("{}x{}", dims[0], dims[1]),
                gap,
                *tolerance,
                vec!["sup gap after aligning the zero crossing".into()],
            )]
        }
        OracleSpec::WarpResidual {
            kappa,
            z0,
            interval,
            samples,
            tolerance,
        } => {
            let warp = warp_factor(*kappa, *z0)?;
            let worst = (0..=*samples)
                .map(|k| {
                    let z = interval[0] + (interval[1] - interval[0]) * k as f64 / *samples as f64;
                    (warp.d2rho(z) + kappa * warp.rho(z)).abs()
                })
                .fold(0.0, f64::max);
            vec![CheckRecord::simple(
                name,
                format!("kappa={kappa}"),
                worst,
                *tolerance,
                vec![],
            )]
        }
        OracleSpec::ModicaOde {
            p,
            potentials,
            range,
            c_offset,
            tolerance,
        } => {
            let mut out = Vec::new();
            let ode = Dopri5::with_tolerances(1e-12, 1e-12);
            for pv in p {
                for (k, pot) in potentials.iter().enumerate() {
                    let prof = VariationalProfile::p_laplace(
                        *pv,
                        build_potential(pot),
                        (range[0], range[1]),
                    )?;
                    let c = prof.c_sup().value + c_offset;
                    let curve = modica_barrier_with(&prof, c, 0.0, &BarrierOptions::default())?;
                    let direct = modica_ode_curve(&prof, c, &curve.grid, &ode)?;
                    let gap = direct
                        .iter()
                        .zip(&curve.phi)
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0, f64::max);
                    out.push(CheckRecord::simple(
                        name,
                        format!("p={pv},potential={k}"),
                        gap,
                        *tolerance,
                        vec![format!("c = {c:.17e}")],
                    ));
                }
            }
            out
        }
    })
}

/// Relax a stripe (plus noise) on an `L x L dims[1]/dims[0]` torus and
/// compare its mean row, up to translation, with the periodic orbit of the
/// one-variable reduction.
pub fn thin_torus_gap(
    profile: &VariationalProfile,
    length: f64,
    dims: [usize; 2],
    amplitude: f64,
    noise: f64,
    relax_tolerance: f64,
    ode_points: usize,
) -> Result<f64, Error> {
    let [nx, ny] = dims;
    let width = length * ny as f64 / nx as f64;
    let model = ModelManifold::FlatTorus {
        periods: vec![length, width],
        norm: TorusNorm::Euclidean,
    };
    let stripe = seed_field(
        &model,
        &dims,
        &Seed::Stripe {
            amplitude,
            wavenumber: 1,
            axis: 0,
        },
    )?;
    let jitter = seed_field(
        &model,
        &dims,
        &Seed::Random {
            amplitude: noise,
            seed: 42,
        },
    )?;
    let start: Vec<f64> = stripe
        .values
        .iter()
        .zip(&jitter.values)
        .map(|(a, b)| a + b)
        .collect();
    let start = seed_field(&model, &dims, &Seed::Values(start))?;
    let field = relax_to_steady_with(
        &model,
        profile,
        &start,
        relax_tolerance,
        &RelaxOptions::default(),
    )?;
    let row: Vec<f64> = (0..nx)
        .map(|i| (0..ny).map(|j| field.values[i + nx * j]).sum::<f64>() / ny as f64)
        .collect();

    let circle = ModelManifold::Circle {
        radius: length / (2.0 * PI),
    };
    let coeffs = coefficients_from_profile(profile);
    let opts = SymmetricOptions {
        points: ode_points,
        ..SymmetricOptions::default()
    };
    let reduced = solve_symmetric_with(
        &circle,
        &coeffs,
        BoundaryCondition::Periodic {
            center: 0.0,
            slope_bracket: (1e-2, 1.0),
        },
        &opts,
    )?;
    let slope = reduced
        .slope
        .clone()
        .ok_or_else(|| Error::Construction("periodic orbit without slopes".into()))?;
    let h1 = length / ode_points as f64;
    let orbit = |x: f64| {
        let x = x.rem_euclid(length);
        let k = ((x / h1).floor() as usize).min(ode_points - 1);
        let t = x / h1 - k as f64;
        let k1 = (k + 1) % ode_points;
        let (y0, y1) = (reduced.values[k], reduced.values[k1]);
        let (d0, d1) = (slope[k] * h1, slope[k1] * h1);
        let (t2, t3) = (t * t, t * t * t);
        (2.0 * t3 - 3.0 * t2 + 1.0) * y0
            + (t3 - 2.0 * t2 + t) * d0
            + (-2.0 * t3 + 3.0 * t2) * y1
            + (t3 - t2) * d1
    };
    let hx = length / nx as f64;
    let i0 = (0..nx)
        .find(|&i| row[i] < 0.0 && row[(i + 1) % nx] >= 0.0)
        .ok_or_else(|| Error::Construction("relaxed stripe has no upward zero crossing".into()))?;
    let shift = (i0 as f64 + row[i0] / (row[i0] - row[(i0 + 1) % nx])) * hx;
    Ok((0..nx)
        .map(|i| (row[i] - orbit(i as f64 * hx - shift)).abs())
        .fold(0.0, f64::max))
}

fn status_of(checks: &[CheckRecord], errors: &[String]) -> Status {
    if !errors.is_empty() {
        Status::ConstructionError
    } else if checks.iter().all(CheckRecord::passed) {
        Status::Pass
    } else {
        Status::Fail
    }
}

fn now() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

pub fn run_scenario(scenario: &Scenario) -> Outcome {
    let mut report = Report {
        schema: SCHEMA,
        spec_version: scenario.spec_version,
        scenario: scenario.name.clone(),
        description: scenario.description.clone(),
        generated_at: now(),
        profile: scenario.profile.clone(),
        model: scenario.model.clone(),
        fields: Vec::new(),
        barriers: Vec::new(),
        checks: Vec::new(),
        errors: Vec::new(),
        verdict: Status::Pass,
    };
    let mut artifacts = Artifacts::default();
    if let Err(e) = execute(scenario, &mut report, &mut artifacts) {
        report.errors.push(e.to_string());
    }
    report.verdict = status_of(&report.checks, &report.errors);
    Outcome { report, artifacts }
}

fn execute(scenario: &Scenario, report: &mut Report, art: &mut Artifacts) -> Result<(), Error> {
    let profile = build_profile(&scenario.profile)?;
    art.profile = Some(profile.clone());
    let model = scenario.model.as_ref().map(build_model).transpose()?;
    art.model = model.clone();

    let mut manufactured = Vec::new();
    if let (Some(spec), Some(model)) = (&scenario.field, &model) {
        for n in scenario.resolutions() {
            let built = build_field(spec, model, &profile, n)?;
            built.field.require_certified()?;
            report.fields.push(summarize_field(n, &built.field));
            if let Some(e) = built.manufactured_error {
                manufactured.push((n, field_spacing(&built.field), e));
            }
            art.fields.push((n, built.field));
        }
    }

    if let Some(spec) = &scenario.barrier {
        let model = model
            .as_ref()
            .ok_or_else(|| Error::Parameter("barriers need a model".into()))?;
        let source = match &spec.range {
            Some(RangeSpec::Explicit([m, big_m])) => Some((*m, *big_m)),
            Some(RangeSpec::Named(RangeSource::Profile)) => Some(profile.range),
            Some(RangeSpec::Named(RangeSource::Field)) => None,
            None if art.fields.is_empty() => Some(profile.range),
            None => None,
        };
        let targets: Vec<(Option<usize>, (f64, f64))> = match source {
            Some(r) => vec![(None, r)],
            None => art
                .fields
                .iter()
                .map(|(n, f)| (Some(*n), f.range()))
                .collect(),
        };
        for (resolution, range) in targets {
            for point in sweep_points(spec) {
                let mut b = build_barrier(spec, point, model, &profile, range)?;
                b.resolution = resolution;
                report.barriers.push(BarrierSummary {
                    sweep: b.sweep.clone(),
                    resolution,
                    metadata: b.curve.metadata_json(),
                    length: b.curve.length(),
                });
                art.barriers.push(b);
            }
        }
    }

    for audit in &scenario.audits {
        report.checks.extend(run_audit(audit, art, &manufactured)?);
    }
    for oracle in &scenario.oracles {
        report.checks.extend(run_oracle(oracle, &profile)?);
    }
    Ok(())
}

/// Barriers that apply to the field at resolution `n`.
fn barriers_for(art: &Artifacts, n: usize) -> Vec<&BarrierArtifact> {
    art.barriers
        .iter()
        .filter(|b| b.resolution.is_none_or(|r| r == n))
        .collect()
}

fn sweep_labels(art: &Artifacts) -> Vec<String> {
    let mut labels: Vec<String> = Vec::new();
    for b in &art.barriers {
        if !labels.contains(&b.sweep) {
            labels.push(b.sweep.clone());
        }
    }
    labels
}

fn run_audit(
    audit: &AuditSpec,
    art: &Artifacts,
    manufactured: &[(usize, f64, f64)],
) -> Result<Vec<CheckRecord>, Error> {
    let name = audit.kind.name();
    let profile = art.profile.as_ref().expect("profile is built first");
    let tol = tolerance(audit);
    let mut out = Vec::new();
    match audit.kind {
        AuditKind::Modica | AuditKind::Rigidity => {
            let mut per = Vec::new();
            for (n, f) in &art.fields {
                let r = if audit.kind == AuditKind::Modica {
                    modica_audit_with(f, profile, tol)?
                } else {
                    rigidity_audit_with(f, profile, tol)?
                };
                per.push((*n, r));
            }
            out.push(combine(name, "", per)?);
        }
        AuditKind::TwoPoint | AuditKind::Gradient | AuditKind::DirichletBoundary => {
            let model = art.model.as_ref().expect("validated");
            for label in sweep_labels(art) {
                let mut per = Vec::new();
                for (n, f) in &art.fields {
                    for b in barriers_for(art, *n)
                        .into_iter()
                        .filter(|b| b.sweep == label)
                    {
                        let r = match audit.kind {
                            AuditKind::TwoPoint => {
                                two_point_audit(f, &b.inverse, model, &sampling(audit))?
                            }
                            AuditKind::Gradient => {
                                gradient_audit_with(f, &b.curve, &b.inverse, tol)?
                            }
                            _ => dirichlet_boundary_audit_with(f, &b.inverse, model, tol)?,
                        };
                        per.push((*n, r));
                    }
                }
                out.push(combine(name, &label, per)?);
            }
        }
        AuditKind::TwoPointEquality => {
            let model = art.model.as_ref().expect("validated");
            for label in sweep_labels(art) {
                let mut per = Vec::new();
                for (n, f) in &art.fields {
                    for b in barriers_for(art, *n)
                        .into_iter()
                        .filter(|b| b.sweep == label)
                    {
                        let (d, w) = two_point_equality(f, &b.inverse, model)?;
                        let samples = f.len() * (f.len() - 1) / 2;
                        per.push((*n, field_spacing(f), d, w, samples));
                    }
                }
                out.push(combine_measured(name, &label, audit, per));
            }
        }
        AuditKind::BarrierSlopeBound => {
            for b in &art.barriers {
                let c = b.c.expect("level barriers carry c");
                let cu = b.profile.c_sup().value;
                let bound = b.profile.invert_k(c - cu)?.sqrt();
                let margin = b.curve.min_slope() - bound;
                let mut r = CheckRecord::simple(
                    name,
                    b.sweep.clone(),
                    -margin,
                    audit.floor,
                    vec![format!(
                        "min phi' = {:.17e}, sqrt(K^-1(c - c_u)) = {bound:.17e}",
                        b.curve.min_slope()
                    )],
                );
                r.samples = b.curve.grid.len();
                out.push(r);
            }
        }
        AuditKind::BarrierLengthMonotone => {
            let mut by_c: Vec<(f64, f64)> = art
                .barriers
                .iter()
                .map(|b| (b.c.expect("level barriers carry c"), b.curve.length()))
                .collect();
            by_c.sort_by(|a, b| a.0.total_cmp(&b.0));
            let worst = by_c
                .windows(2)
                .map(|w| w[1].1 - w[0].1)
                .fold(f64::NEG_INFINITY, f64::max);
            let notes = by_c
                .iter()
                .map(|(c, l)| format!("c = {c:.17e}: length {l:.17e}"))
                .collect();
            if by_c.len() < 2 {
                out.push(CheckRecord {
                    verdict: Verdict::Inconclusive,
                    ..CheckRecord::simple(name, String::new(), f64::NAN, audit.floor, notes)
                });
            } else {
                out.push(CheckRecord::simple(
                    name,
                    String::new(),
                    worst,
                    audit.floor,
                    notes,
                ));
            }
        }
        AuditKind::ResidualOrder => {
            let levels: Vec<RefinementLevel> = art
                .fields
                .iter()
                .filter_map(|(_, f)| {
                    f.consistency_residual.map(|c| RefinementLevel {
                        h: field_spacing(f),
                        max_defect: c,
                    })
                })
                .collect();
            let min_order = audit.min_order.expect("validated");
            let order = refinement_order(&levels);
            let mut r = match order {
                Some(o) => CheckRecord::simple(name, String::new(), min_order - o, 0.0, vec![]),
                None => CheckRecord {
                    verdict: Verdict::Inconclusive,
                    ..CheckRecord::simple(name, String::new(), f64::NAN, 0.0, vec![])
                },
            };
            r.refinement_order = order;
            r.levels = art
                .fields
                .iter()
                .map(|(n, f)| LevelRecord {
                    resolution: *n,
                    h: field_spacing(f),
                    max_defect: f.consistency_residual.unwrap_or(f64::NAN),
                    tolerance: f64::NAN,
                    verdict: None,
                })
                .collect();
            r.notes.push(format!(
                "order of the consistency residual, required >= {min_order}"
            ));
            out.push(r);
        }
        AuditKind::ManufacturedError => {
            let per = manufactured
                .iter()
                .map(|(n, h, e)| (*n, *h, *e, Witness::None, 0))
                .collect();
            out.push(combine_measured(name, "", audit, per));
        }
    }
    Ok(out)
}
