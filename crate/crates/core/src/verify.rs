//! Audits of the two-point, gradient, Modica, rigidity and Dirichlet
//! boundary estimates on computed fields.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::barriers::{BarrierCurve, InverseBarrier};
use crate::error::{Error, Result};
use crate::geometry::{distance, ModelManifold};
use crate::pde::ScalarField;
use crate::profiles::VariationalProfile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    TwoPoint,
    Gradient,
    Modica,
    Rigidity,
    DirichletBoundary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Witness {
    None,
    Point(Vec<f64>),
    Pair(Vec<f64>, Vec<f64>),
}

/// Pass threshold `max(floor, c_tol h^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ToleranceModel {
    pub floor: f64,
    pub c_tol: f64,
}

impl Default for ToleranceModel {
    fn default() -> Self {
        Self {
            floor: 1e-9,
            c_tol: 0.0,
        }
    }
}

impl ToleranceModel {
    pub fn new(floor: f64, c_tol: f64) -> Self {
        Self { floor, c_tol }
    }

    pub fn threshold(&self, h: f64) -> f64 {
        self.floor.max(self.c_tol * h * h)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RefinementLevel {
    pub h: f64,
    pub max_defect: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub check_kind: CheckKind,
    pub max_defect: f64,
    pub witness: Witness,
    pub tolerance_model: ToleranceModel,
    /// Threshold at the finest level.
    pub tolerance: f64,
    pub refinement_history: Vec<RefinementLevel>,
    pub verdict: Verdict,
    /// Defect within `1e-8` of zero: the estimate is attained.
    pub sharp: bool,
    pub samples: usize,
    pub notes: Vec<String>,
}

impl VerificationReport {
    fn new(
        kind: CheckKind,
        max_defect: f64,
        witness: Witness,
        model: ToleranceModel,
        h: f64,
        samples: usize,
    ) -> Self {
        let mut r = Self {
            check_kind: kind,
            max_defect,
            witness,
            tolerance_model: model,
            tolerance: model.threshold(h),
            refinement_history: vec![RefinementLevel { h, max_defect }],
            verdict: Verdict::Pass,
            sharp: max_defect.abs() <= 1e-8,
            samples,
            notes: Vec::new(),
        };
        r.settle();
        r
    }

    /// Pass iff the defect is within tolerance; a defect above tolerance is
    /// inconclusive while fewer than two refinement levels exist.
    fn settle(&mut self) {
        self.verdict = if self.max_defect <= self.tolerance {
            Verdict::Pass
        } else if self.refinement_history.len() < 2 {
            Verdict::Inconclusive
        } else {
            Verdict::Fail
        };
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// Combine reports of the same check at several resolutions; the finest
    /// level decides.
    pub fn refine(reports: Vec<VerificationReport>) -> Result<VerificationReport> {
        let mut reports = reports;
        if reports.is_empty() {
            return Err(Error::Parameter("no reports to combine".into()));
        }
        let kind = reports[0].check_kind;
        if reports.iter().any(|r| r.check_kind != kind) {
            return Err(Error::Parameter("reports of different checks".into()));
        }
        let mut history: Vec<RefinementLevel> = reports
            .iter()
            .flat_map(|r| r.refinement_history.iter().copied())
            .collect();
        history.sort_by(|a, b| b.h.total_cmp(&a.h));
        let finest = reports
            .iter()
            .enumerate()
            .min_by(|a, b| {
                a.1.refinement_history[0]
                    .h
                    .total_cmp(&b.1.refinement_history[0].h)
            })
            .map(|(i, _)| i)
            .unwrap_or(0);
        let mut out = reports.swap_remove(finest);
        out.refinement_history = history;
        out.settle();
        Ok(out)
    }

    /// Least-squares slope of `log |defect|` against `log h`.
    pub fn refinement_order(&self) -> Option<f64> {
        refinement_order(&self.refinement_history)
    }
}

pub fn refinement_order(history: &[RefinementLevel]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = history
        .iter()
        .filter(|l| l.h > 0.0 && l.max_defect != 0.0 && l.max_defect.is_finite())
        .map(|l| (l.h.ln(), l.max_defect.abs().ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Pair-scan plan for the two-point audit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sampling {
    /// Stratified subsample size for large grids.
    pub subsample: usize,
    /// Grids up to this size are scanned over all ordered pairs.
    pub full_scan_limit: usize,
    pub seed: u64,
    pub tolerance: ToleranceModel,
}

impl Default for Sampling {
    fn default() -> Self {
        Self {
            subsample: 2048,
            full_scan_limit: 4096,
            seed: 42,
            tolerance: ToleranceModel::default(),
        }
    }
}

fn field_spacing(field: &ScalarField) -> f64 {
    let h = field.grid.min_spacing();
    match &field.model {
        ModelManifold::SphereRadial { radius, .. } => h * radius,
        _ => h,
    }
}

/// Indices scanned by the two-point audit: every sample for small grids,
/// otherwise one jittered sample per block plus the extremal-value and
/// maximal-gradient samples.
pub fn sample_indices(field: &ScalarField, sampling: &Sampling) -> Vec<usize> {
    let n = field.len();
    if n <= sampling.full_scan_limit {
        return (0..n).collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(sampling.seed);
    let dims = &field.grid.dims;
    let mut idx = Vec::new();
    if dims.len() == 2 {
        let (nx, ny) = (dims[0], dims[1]);
        // blocks of t = 2^k cells, split as evenly as possible between axes
        let ratio = (n / sampling.subsample.max(1)).max(1);
        let t = 1usize << ratio.ilog2();
        let bx = (1usize << (t.ilog2() / 2)).min(nx);
        let by = (t / bx).clamp(1, ny);
        for j0 in (0..ny).step_by(by) {
            for i0 in (0..nx).step_by(bx) {
                let i = (i0 + rng.gen_range(0..bx)).min(nx - 1);
                let j = (j0 + rng.gen_range(0..by)).min(ny - 1);
                idx.push(i + nx * j);
            }
        }
    } else {
        let block = n.div_ceil(sampling.subsample.max(1));
        for start in (0..n).step_by(block) {
            idx.push((start + rng.gen_range(0..block)).min(n - 1));
        }
    }
    let steepest = (0..n)
        .max_by(|a, b| field.gradient_norm[*a].total_cmp(&field.gradient_norm[*b]))
        .unwrap_or(0);
    idx.extend([field.argmin(), field.argmax(), steepest]);
    idx.sort_unstable();
    idx.dedup();
    idx
}

fn psi_values(field: &ScalarField, inverse: &InverseBarrier) -> Result<Vec<f64>> {
    field.values.iter().map(|v| inverse.psi(*v)).collect()
}

/// Max of `Z(x, y) = psi(u(y)) - psi(u(x)) - d(x, y)` over ordered pairs
/// `x != y` of `points`, with its witness.
fn pair_scan(
    model: &ModelManifold,
    points: &[Vec<f64>],
    psi: &[f64],
) -> Result<(f64, usize, usize)> {
    let n = points.len();
    (0..n)
        .into_par_iter()
        .map(|a| -> Result<(f64, usize, usize)> {
            let mut best = (f64::NEG_INFINITY, a, a);
            for b in 0..n {
                if a == b {
                    continue;
                }
                let z = psi[b] - psi[a] - distance(model, &points[a], &points[b])?;
                if z > best.0 {
                    best = (z, a, b);
                }
            }
            Ok(best)
        })
        .try_reduce(
            || (f64::NEG_INFINITY, 0, 0),
            |x, y| {
                Ok(if y.0 > x.0 || (y.0 == x.0 && (y.1, y.2) < (x.1, x.2)) {
                    y
                } else {
                    x
                })
            },
        )
}

/// Two-point audit `max Z <= 0` on `model`.
pub fn two_point_audit(
    field: &ScalarField,
    inverse: &InverseBarrier,
    model: &ModelManifold,
    sampling: &Sampling,
) -> Result<VerificationReport> {
    field.require_certified()?;
    let idx = sample_indices(field, sampling);
    let points: Vec<Vec<f64>> = idx.iter().map(|&i| field.point(i)).collect();
    let psi_all = psi_values(field, inverse)?;
    let psi: Vec<f64> = idx.iter().map(|&i| psi_all[i]).collect();
    if points.len() < 2 {
        return Err(Error::Parameter(
            "two-point audit needs at least two samples".into(),
        ));
    }
    let (z, a, b) = pair_scan(model, &points, &psi)?;
    let mut report = VerificationReport::new(
        CheckKind::TwoPoint,
        z,
        Witness::Pair(points[a].clone(), points[b].clone()),
        sampling.tolerance,
        field_spacing(field),
        points.len(),
    );
    if idx.len() < field.len() {
        report
            .notes
            .push(format!("{} of {} samples scanned", idx.len(), field.len()));
    }
    Ok(report)
}

/// `max |Du| - phi'(psi(u))`.
pub fn gradient_audit(
    field: &ScalarField,
    curve: &BarrierCurve,
    inverse: &InverseBarrier,
) -> Result<VerificationReport> {
    gradient_audit_with(field, curve, inverse, ToleranceModel::default())
}

pub fn gradient_audit_with(
    field: &ScalarField,
    curve: &BarrierCurve,
    inverse: &InverseBarrier,
    tolerance: ToleranceModel,
) -> Result<VerificationReport> {
    field.require_certified()?;
    let mut best = (f64::NEG_INFINITY, 0);
    for (i, (u, g)) in field.values.iter().zip(&field.gradient_norm).enumerate() {
        let slope = if curve.is_constant() {
            0.0
        } else {
            inverse.slope_at(*u)?
        };
        let d = g - slope;
        if d > best.0 {
            best = (d, i);
        }
    }
    Ok(VerificationReport::new(
        CheckKind::Gradient,
        best.0,
        Witness::Point(field.point(best.1)),
        tolerance,
        field_spacing(field),
        field.len(),
    ))
}

/// `max K(|Du|^2) + Q(u) - c_u` with `c_u` the supremum of `Q` over the
/// field's range.
pub fn modica_audit(
    field: &ScalarField,
    profile: &VariationalProfile,
) -> Result<VerificationReport> {
    modica_audit_with(field, profile, ToleranceModel::default())
}

pub fn modica_audit_with(
    field: &ScalarField,
    profile: &VariationalProfile,
    tolerance: ToleranceModel,
) -> Result<VerificationReport> {
    field.require_certified()?;
    let (lo, hi) = field.range();
    let cu = profile.c_sup_on(lo, hi).value;
    let mut best = (f64::NEG_INFINITY, 0);
    for (i, (u, g)) in field.values.iter().zip(&field.gradient_norm).enumerate() {
        let d = profile.eval_k(g * g)? + profile.big_q(*u) - cu;
        if d > best.0 {
            best = (d, i);
        }
    }
    let mut r = VerificationReport::new(
        CheckKind::Modica,
        best.0,
        Witness::Point(field.point(best.1)),
        tolerance,
        field_spacing(field),
        field.len(),
    );
    r.notes
        .push(format!("c_u = {cu:.17e} on [{lo:.17e}, {hi:.17e}]"));
    Ok(r)
}

/// Two sub-checks on nonconstant fields: (i) `c_u` is attained at an end of
/// the range, (ii) no sample strictly inside the range is a critical point
/// of `Q` at level `c_u`. The reported defect is the (i) discrepancy; a
/// failure of (ii) makes the defect infinite.
pub fn rigidity_audit(
    field: &ScalarField,
    profile: &VariationalProfile,
) -> Result<VerificationReport> {
    rigidity_audit_with(field, profile, ToleranceModel::default())
}

pub fn rigidity_audit_with(
    field: &ScalarField,
    profile: &VariationalProfile,
    tolerance: ToleranceModel,
) -> Result<VerificationReport> {
    field.require_certified()?;
    let h = field_spacing(field);
    if field.is_constant() {
        let mut r = VerificationReport::new(
            CheckKind::Rigidity,
            0.0,
            Witness::None,
            tolerance,
            h,
            field.len(),
        );
        r.notes.push("constant field".into());
        return Ok(r);
    }
    let tol = tolerance.threshold(h);
    let (lo, hi) = field.range();
    let cu = profile.c_sup_on(lo, hi).value;
    let ends = profile.big_q(lo).max(profile.big_q(hi));
    let mut defect = (cu - ends).abs();
    let margin = 1e-6 * (hi - lo);
    let critical: Vec<usize> = (0..field.len())
        .filter(|&i| {
            let u = field.values[i];
            u > lo + margin
                && u < hi - margin
                && profile.big_q(u) >= cu - tol
                && profile.q(u).abs() <= tol
        })
        .collect();
    let witness = match critical.first() {
        Some(&i) => Witness::Point(field.point(i)),
        None => Witness::None,
    };
    if !critical.is_empty() {
        defect = f64::INFINITY;
    }
    let mut r = VerificationReport::new(
        CheckKind::Rigidity,
        defect,
        witness,
        tolerance,
        h,
        field.len(),
    );
    r.notes.push(format!(
        "c_u = {cu:.17e}, max(Q(inf u), Q(sup u)) = {ends:.17e}, interior critical samples = {}",
        critical.len()
    ));
    Ok(r)
}

/// Two-point audit on a radial ball with the chord distance, over pairs of
/// radial samples placed on rays at angles `k pi / 6`, skipping coincident
/// points.
pub fn dirichlet_boundary_audit(
    field: &ScalarField,
    inverse: &InverseBarrier,
    model: &ModelManifold,
) -> Result<VerificationReport> {
    dirichlet_boundary_audit_with(field, inverse, model, ToleranceModel::default())
}

pub fn dirichlet_boundary_audit_with(
    field: &ScalarField,
    inverse: &InverseBarrier,
    model: &ModelManifold,
    tolerance: ToleranceModel,
) -> Result<VerificationReport> {
    field.require_certified()?;
    let n = match model {
        ModelManifold::RadialBall { n, .. } => *n,
        _ => {
            return Err(Error::Parameter(format!(
                "Dirichlet boundary audit needs a radial ball, not {model:?}"
            )))
        }
    };
    if field.grid.dims.len() != 1 {
        return Err(Error::Parameter(
            "Dirichlet audit expects a radial field".into(),
        ));
    }
    let psi = psi_values(field, inverse)?;
    let radii = field.grid.axis(0);
    let angles: Vec<f64> = (0..=6)
        .map(|k| k as f64 * std::f64::consts::PI / 6.0)
        .collect();
    let embed = |r: f64, th: f64| -> Vec<f64> {
        let mut p = vec![0.0; n];
        p[0] = r * th.cos();
        if n > 1 {
            p[1] = r * th.sin();
        }
        p
    };
    let m = radii.len();
    let (z, wa, wb) = (0..m)
        .into_par_iter()
        .map(|a| -> Result<(f64, Vec<f64>, Vec<f64>)> {
            let x = embed(radii[a], 0.0);
            let mut best = (f64::NEG_INFINITY, x.clone(), x.clone());
            for (b, &rb) in radii.iter().enumerate() {
                for &th in &angles {
                    let y = embed(rb, th);
                    // the center lies on every ray
                    if y == x {
                        continue;
                    }
                    let z = psi[b] - psi[a] - distance(model, &x, &y)?;
                    if z > best.0 {
                        best = (z, x.clone(), y);
                    }
                }
            }
            Ok(best)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold((f64::NEG_INFINITY, Vec::new(), Vec::new()), |p, q| {
            if q.0 > p.0 {
                q
            } else {
                p
            }
        });
    Ok(VerificationReport::new(
        CheckKind::DirichletBoundary,
        z,
        Witness::Pair(wa, wb),
        tolerance,
        field_spacing(field),
        m * angles.len(),
    ))
}
