//! Classification and reconstruction of black-box automorphisms.
//!
//! Every hypothesis the classification relies on is probed on samples, the
//! (anti)unitary is rebuilt from the action on rank-one projections, and the
//! resulting descriptor is verified against the oracle. Nothing is proved:
//! the report records what was checked and on how many samples.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::effects::{rank_one_projection, Projection};
use crate::error::{Error, Result};
use crate::extension::{is_affine, AffinityWitness, DEFAULT_AFFINITY_TRIALS};
use crate::linalg::{
    eig_hermitian, haar_unitary_with, random_effect_with, random_hermitian_with,
    random_unit_vector_with, vdot, ComplexMatrix, CounterRng,
};
use crate::oracle::{Complemented, MapOracle, Scaled};
use crate::symmetry::{Family, Kind, Sign, SymmetryDescriptor};

pub const DEFAULT_ACCEPT_TOL: f64 = 1e-8;
pub const DEFAULT_PROBE_TOL: f64 = 1e-9;
pub const DEFAULT_SCALING_POINTS: usize = 17;
/// Rank-one certification: top eigenvalue within this of 1, the rest within this of 0.
pub const RANK_ONE_TOL: f64 = 1e-6;
/// Phase alignment fails when `|⟨f_j, R_j f_1⟩|` drops below this (ideal value 1/2).
pub const PHASE_DEGENERACY: f64 = 1e-6;
/// Extra rank-one projections checked after a reconstruction.
pub const RECONSTRUCTION_CHECKS: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RecoveryOptions {
    /// Residual acceptance tolerance.
    pub tol: f64,
    /// Tolerance for identity probes (affinity, triple product, projections, scaling).
    pub probe_tol: f64,
    /// Samples for the triple and preservation probes and for the final verification.
    pub trials: usize,
    pub affinity_trials: usize,
    pub scaling_points: usize,
    pub seed: u64,
}

impl Default for RecoveryOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_ACCEPT_TOL,
            probe_tol: DEFAULT_PROBE_TOL,
            trials: 32,
            affinity_trials: DEFAULT_AFFINITY_TRIALS,
            scaling_points: DEFAULT_SCALING_POINTS,
            seed: 0,
        }
    }
}

impl RecoveryOptions {
    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }

    pub fn with_trials(self, trials: usize) -> Self {
        Self { trials, ..self }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProbeProperty {
    Projection,
    Order,
    Orthogonality,
    Orthocomplement,
}

impl ProbeProperty {
    pub fn as_str(self) -> &'static str {
        match self {
            ProbeProperty::Projection => "projection preservation",
            ProbeProperty::Order => "order preservation",
            ProbeProperty::Orthogonality => "orthogonality preservation",
            ProbeProperty::Orthocomplement => "orthocomplement preservation",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProbeWitness {
    pub property: ProbeProperty,
    pub p: ComplexMatrix,
    /// Second projection for the pairwise properties.
    pub q: Option<ComplexMatrix>,
    pub deviation: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProbeReport {
    pub projections_preserved: bool,
    pub order_preserved: bool,
    pub orthogonality_preserved: bool,
    pub orthocomplement_preserved: bool,
    /// First failing input per property; empty iff every flag is set.
    pub witnesses: Vec<ProbeWitness>,
    pub samples_used: usize,
}

impl ProbeReport {
    pub fn passed(&self) -> bool {
        self.projections_preserved
            && self.order_preserved
            && self.orthogonality_preserved
            && self.orthocomplement_preserved
    }
}

struct ProbeAccumulator {
    witnesses: Vec<ProbeWitness>,
    tol: f64,
}

impl ProbeAccumulator {
    fn record(&mut self, property: ProbeProperty, deviation: f64, p: &Projection, q: Option<&Projection>) {
        let failed = !(deviation <= self.tol);
        if failed && !self.witnesses.iter().any(|w| w.property == property) {
            self.witnesses.push(ProbeWitness {
                property,
                p: p.matrix().clone(),
                q: q.map(|q| q.matrix().clone()),
                deviation,
            });
        }
    }

    fn ok(&self, property: ProbeProperty) -> bool {
        !self.witnesses.iter().any(|w| w.property == property)
    }
}

fn projection_deviation(x: &ComplexMatrix) -> f64 {
    x.hermitian_deviation().max((x * x).distance(x))
}

/// `max(0, −λ_min(Y − X))` on the Hermitian part.
fn order_deviation(x: &ComplexMatrix, y: &ComplexMatrix) -> Result<f64> {
    let d = (y - x).hermitian_part();
    Ok((-eig_hermitian(&d, f64::INFINITY)?.min()).max(0.0))
}

/// Checks that projections, their order, mutual orthogonality and
/// orthocomplements survive the map. `0` and `I` are always probed first.
pub fn preservation_probe(
    phi: &dyn MapOracle,
    trials: usize,
    tol: f64,
    rng: &mut CounterRng,
) -> Result<ProbeReport> {
    let dim = phi.dim();
    let identity = ComplexMatrix::identity(dim);
    let mut acc = ProbeAccumulator {
        witnesses: Vec::new(),
        tol,
    };

    for p in [Projection::zero(dim), Projection::identity(dim)] {
        let image = phi.eval_checked(p.matrix())?;
        acc.record(ProbeProperty::Projection, projection_deviation(&image), &p, None);
    }

    if dim >= 2 {
        for _ in 0..trials.max(1) {
            let v = haar_unitary_with(dim, rng)?;
            let r1 = rng.index_range(1, dim);
            let r2 = rng.index_range(r1, dim + 1);
            let r3 = rng.index_range(1, dim - r1 + 1);
            let p = Projection::onto_columns(&v, 0..r1);
            let above = Projection::onto_columns(&v, 0..r2);
            let orth = Projection::onto_columns(&v, r1..r1 + r3);
            let comp = p.complement();

            let fp = phi.eval_checked(p.matrix())?;
            let fa = phi.eval_checked(above.matrix())?;
            let fo = phi.eval_checked(orth.matrix())?;
            let fc = phi.eval_checked(comp.matrix())?;

            acc.record(ProbeProperty::Projection, projection_deviation(&fp), &p, None);
            acc.record(ProbeProperty::Order, order_deviation(&fp, &fa)?, &p, Some(&above));
            acc.record(
                ProbeProperty::Orthogonality,
                (&fp * &fo).frobenius_norm(),
                &p,
                Some(&orth),
            );
            acc.record(
                ProbeProperty::Orthocomplement,
                (&fp + &fc).distance(&identity),
                &p,
                Some(&comp),
            );
        }
    }

    Ok(ProbeReport {
        projections_preserved: acc.ok(ProbeProperty::Projection),
        order_preserved: acc.ok(ProbeProperty::Order),
        orthogonality_preserved: acc.ok(ProbeProperty::Orthogonality),
        orthocomplement_preserved: acc.ok(ProbeProperty::Orthocomplement),
        witnesses: acc.witnesses,
        samples_used: if dim >= 2 { trials.max(1) } else { 0 },
    })
}

/// Unit vector spanning a certified rank-one projection.
fn rank_one_vector(image: &ComplexMatrix) -> Result<Vec<Complex64>> {
    let deviation = image.hermitian_deviation();
    if deviation > RANK_ONE_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    let e = eig_hermitian(&image.hermitian_part(), f64::INFINITY)?;
    let n = e.dim();
    let top = e.eigenvalues[n - 1];
    let rest = e.eigenvalues[..n - 1]
        .iter()
        .fold(0.0f64, |m, x| m.max(x.abs()));
    if (top - 1.0).abs() > RANK_ONE_TOL || rest > RANK_ONE_TOL {
        return Err(Error::NotRankOne { top, rest });
    }
    Ok(e.eigenvector(n - 1))
}

fn unit(dim: usize, k: usize) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); dim];
    v[k] = Complex64::new(1.0, 0.0);
    v
}

#[derive(Clone, Debug, PartialEq)]
pub struct Reconstruction {
    /// Gauge-normalized.
    pub u: ComplexMatrix,
    pub kind: Kind,
    /// Largest mismatch on the extra rank-one checks.
    pub residual: f64,
}

/// Rebuilds `U` (and whether it acts antiunitarily) from the images of
/// rank-one projections, assuming `P_x ↦ P_{Ux}` or `P_x ↦ P_{U x̄}`.
pub fn reconstruct_unitary_from_projection_action(
    action: &dyn MapOracle,
    tol: f64,
    rng: &mut CounterRng,
) -> Result<Reconstruction> {
    let dim = action.dim();
    if dim < 2 {
        return Err(Error::DimensionTooSmall { dim, min: 2 });
    }
    let image_of = |x: &[Complex64]| -> Result<ComplexMatrix> {
        action.eval_checked(rank_one_projection(x)?.matrix())
    };

    let mut columns = Vec::with_capacity(dim);
    for k in 0..dim {
        columns.push(rank_one_vector(&image_of(&unit(dim, k))?)?);
    }
    for i in 0..dim {
        for j in (i + 1)..dim {
            let overlap = vdot(&columns[i], &columns[j]).norm();
            if overlap > RANK_ONE_TOL {
                return Err(Error::ImagesNotOrthogonal { i, j, overlap });
            }
        }
    }

    let s = Complex64::new(FRAC_1_SQRT_2, 0.0);
    for j in 1..dim {
        let mut x = vec![Complex64::new(0.0, 0.0); dim];
        x[0] = s;
        x[j] = s;
        let r = image_of(&x)?;
        let c = vdot(&columns[j], &r.mul_vec(&columns[0]));
        if c.norm() < PHASE_DEGENERACY {
            return Err(Error::DegeneratePhase {
                column: j,
                overlap: c.norm(),
            });
        }
        let gamma = c / c.norm();
        for z in columns[j].iter_mut() {
            *z *= gamma;
        }
    }

    let mut probe = vec![Complex64::new(0.0, 0.0); dim];
    probe[0] = s;
    probe[1] = Complex64::new(0.0, FRAC_1_SQRT_2);
    let observed = image_of(&probe)?;
    let combo = |sign: f64| -> Result<ComplexMatrix> {
        let v: Vec<Complex64> = columns[0]
            .iter()
            .zip(&columns[1])
            .map(|(a, b)| a + Complex64::new(0.0, sign) * b)
            .collect();
        Ok(rank_one_projection(&v)?.into_matrix())
    };
    let kind = if observed.distance(&combo(1.0)?) <= observed.distance(&combo(-1.0)?) {
        Kind::Unitary
    } else {
        Kind::Antiunitary
    };

    let u = crate::symmetry::gauge_normalize(&ComplexMatrix::from_columns(&columns));
    let mut residual = 0.0f64;
    for _ in 0..RECONSTRUCTION_CHECKS {
        let x = random_unit_vector_with(dim, rng);
        let source = match kind {
            Kind::Unitary => x.clone(),
            Kind::Antiunitary => x.iter().map(|z| z.conj()).collect(),
        };
        let expected = rank_one_projection(&u.mul_vec(&source))?.into_matrix();
        residual = residual.max(image_of(&x)?.distance(&expected));
    }
    if residual > tol {
        return Err(Error::VerificationFailed { residual });
    }
    Ok(Reconstruction { u, kind, residual })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScalingSample {
    pub lambda: f64,
    pub f: f64,
    /// `‖φ(λP) − f(λ)φ(P)‖_F`
    pub deviation: f64,
    pub proportional: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalingSamples {
    pub projection: Projection,
    pub samples: Vec<ScalingSample>,
}

/// `f(λ) = tr(φ(λP)φ(P)) / tr(φ(P)²)` for a rank-one `P`.
pub fn extract_scaling_function(
    phi: &dyn MapOracle,
    p: &Projection,
    lambdas: &[f64],
    tol: f64,
) -> Result<ScalingSamples> {
    let image = phi.eval_checked(p.matrix())?;
    rank_one_vector(&image)?;
    let norm2 = (&image * &image).trace().re;
    let mut samples = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        let x = phi.eval_checked(&p.matrix().scale_real(lambda))?;
        let f = (&x * &image).trace().re / norm2;
        let deviation = x.distance(&image.scale_real(f));
        samples.push(ScalingSample {
            lambda,
            f,
            deviation,
            proportional: deviation <= tol,
        });
    }
    Ok(ScalingSamples {
        projection: p.clone(),
        samples,
    })
}

/// `{k/(n−1) : k = 0..n}`.
pub fn scaling_grid(points: usize) -> Vec<f64> {
    let n = points.max(2);
    (0..n).map(|k| k as f64 / (n - 1) as f64).collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScalingCheck {
    pub passed: bool,
    pub all_proportional: bool,
    /// `max |f(λ) − λ|`
    pub max_deviation: f64,
    pub worst_lambda: f64,
    /// `max |f(λ²) − f(λ)²|` over grid points whose square is also sampled.
    pub multiplicative_deviation: Option<f64>,
    /// `max |f(t) + f(1−t) − 1|` over sampled pairs `t, 1−t` in `[0, 1]`.
    pub orthoadditive_deviation: Option<f64>,
}

pub fn check_scaling_identity(s: &ScalingSamples, tol: f64) -> ScalingCheck {
    let find = |x: f64| {
        s.samples
            .iter()
            .find(|p| (p.lambda - x).abs() <= 1e-12)
            .map(|p| p.f)
    };
    let mut max_deviation = 0.0f64;
    let mut worst_lambda = f64::NAN;
    let mut multiplicative: Option<f64> = None;
    let mut orthoadditive: Option<f64> = None;
    for p in &s.samples {
        let d = (p.f - p.lambda).abs();
        if worst_lambda.is_nan() || d > max_deviation {
            max_deviation = d;
            worst_lambda = p.lambda;
        }
        if let Some(f_sq) = find(p.lambda * p.lambda) {
            let d = (f_sq - p.f * p.f).abs();
            multiplicative = Some(multiplicative.map_or(d, |m| m.max(d)));
        }
        if (0.0..=1.0).contains(&p.lambda) {
            if let Some(f_rest) = find(1.0 - p.lambda) {
                let d = (p.f + f_rest - 1.0).abs();
                orthoadditive = Some(orthoadditive.map_or(d, |m| m.max(d)));
            }
        }
    }
    let all_proportional = s.samples.iter().all(|p| p.proportional);
    ScalingCheck {
        passed: all_proportional && max_deviation <= tol,
        all_proportional,
        max_deviation,
        worst_lambda,
        multiplicative_deviation: multiplicative,
        orthoadditive_deviation: orthoadditive,
    }
}

/// Inputs used for the final residual check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Domain {
    Effects,
    /// `G + G*` with complex Gaussian `G`.
    Hermitian,
}

/// `max ‖φ(A) − d(A)‖_F` over sampled inputs.
pub fn verify_descriptor(
    phi: &dyn MapOracle,
    d: &SymmetryDescriptor,
    domain: Domain,
    trials: usize,
    rng: &mut CounterRng,
) -> Result<f64> {
    let dim = phi.dim();
    if d.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: d.dim(),
        });
    }
    let mut worst = 0.0f64;
    for _ in 0..trials.max(1) {
        let a = match domain {
            Domain::Effects => random_effect_with(dim, rng)?.into_matrix(),
            Domain::Hermitian => random_hermitian_with(dim, rng),
        };
        worst = worst.max(phi.eval_checked(&a)?.distance(&d.apply(&a)?));
    }
    Ok(worst)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Canonical,
    Rejected,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Witness {
    Affinity(AffinityWitness),
    /// `‖φ(ABA) − φ(A)φ(B)φ(A)‖_F` above tolerance.
    TriplePair {
        a: ComplexMatrix,
        b: ComplexMatrix,
        deviation: f64,
    },
    Probe(ProbeWitness),
    Scaling {
        lambda: f64,
        f: f64,
    },
    /// A single evaluation that fails a required value (`φ(0)` or `φ(I)`).
    Evaluation {
        input: ComplexMatrix,
        output: ComplexMatrix,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct RecoveryReport {
    pub family: Family,
    pub verdict: Verdict,
    pub reason: Option<String>,
    pub descriptor: Option<SymmetryDescriptor>,
    pub max_residual: Option<f64>,
    pub probe: Option<ProbeReport>,
    pub scaling: Option<ScalingSamples>,
    pub scaling_check: Option<ScalingCheck>,
    pub witness: Option<Witness>,
    /// Oracle-probing samples drawn across all steps.
    pub samples_used: usize,
}

impl RecoveryReport {
    fn new(family: Family) -> Self {
        Self {
            family,
            verdict: Verdict::Rejected,
            reason: None,
            descriptor: None,
            max_residual: None,
            probe: None,
            scaling: None,
            scaling_check: None,
            witness: None,
            samples_used: 0,
        }
    }

    fn reject(mut self, reason: impl Into<String>, witness: Option<Witness>) -> Self {
        self.verdict = Verdict::Rejected;
        self.reason = Some(reason.into());
        self.witness = witness;
        self
    }

    pub fn is_canonical(&self) -> bool {
        self.verdict == Verdict::Canonical
    }
}

/// Structural failures become rejections; oracle failures propagate.
fn rejection_reason(e: Error) -> Result<String> {
    match e {
        Error::Oracle(_) => Err(e),
        other => Ok(other.to_string()),
    }
}

fn check_dim(dim: usize, family: Family) -> Result<()> {
    if dim < family.min_dim() {
        return Err(Error::DimensionTooSmall {
            dim,
            min: family.min_dim(),
        });
    }
    Ok(())
}

// rng streams per step, so adding samples to one step leaves the others unchanged
const STREAM_AFFINITY: u64 = 1;
const STREAM_PROBE: u64 = 2;
const STREAM_RECONSTRUCT: u64 = 3;
const STREAM_SCALING: u64 = 4;
const STREAM_VERIFY: u64 = 5;
const STREAM_TRIPLE: u64 = 6;

/// Affine bijections of `[0, I]`: `A ↦ UAU*` or `A ↦ U(I − A)U*`, `U` unitary or antiunitary.
pub fn recover_affine(phi: &dyn MapOracle, opts: &RecoveryOptions) -> Result<RecoveryReport> {
    let dim = phi.dim();
    check_dim(dim, Family::Affine)?;
    let root = CounterRng::new(opts.seed);
    let mut report = RecoveryReport::new(Family::Affine);

    let check = is_affine(
        phi,
        opts.affinity_trials,
        opts.probe_tol,
        &mut root.split(STREAM_AFFINITY),
    )?;
    report.samples_used += check.trials_run;
    if !check.affine {
        let reason = format!(
            "affinity violated: convex-combination deviation {:e}",
            check.max_deviation
        );
        return Ok(report.reject(reason, check.witness.map(Witness::Affinity)));
    }

    let zero = ComplexMatrix::zeros(dim);
    let identity = ComplexMatrix::identity(dim);
    let at_zero = phi.eval_checked(&zero)?;
    let complement = if at_zero.frobenius_norm() <= opts.tol {
        false
    } else if at_zero.distance(&identity) <= opts.tol {
        true
    } else {
        let witness = Witness::Evaluation {
            input: zero,
            output: at_zero,
        };
        return Ok(report.reject("φ(0) not in {0, I}", Some(witness)));
    };

    let complemented = Complemented(phi);
    let base: &dyn MapOracle = if complement { &complemented } else { phi };
    let descriptor = match shared_pipeline(base, opts, &root, &mut report, false)? {
        Some((u, kind)) => SymmetryDescriptor::new(kind, u, complement, Sign::Plus)?,
        None => return Ok(report),
    };
    finish(report, phi, descriptor, Domain::Effects, opts, &root)
}

/// Jordan-triple automorphisms of `[0, I]` for `dim ≥ 3`: `A ↦ UAU*`.
pub fn recover_triple(phi: &dyn MapOracle, opts: &RecoveryOptions) -> Result<RecoveryReport> {
    let dim = phi.dim();
    check_dim(dim, Family::TripleEffects)?;
    let root = CounterRng::new(opts.seed);
    let mut report = RecoveryReport::new(Family::TripleEffects);
    if let Some(rejected) = triple_probe(phi, opts, &root, &mut report)? {
        return Ok(rejected);
    }
    let descriptor = match shared_pipeline(phi, opts, &root, &mut report, true)? {
        Some((u, kind)) => SymmetryDescriptor::new(kind, u, false, Sign::Plus)?,
        None => return Ok(report),
    };
    finish(report, phi, descriptor, Domain::Effects, opts, &root)
}

/// Jordan-triple automorphisms of the Hermitian matrices for `dim ≥ 3`: `A ↦ ±UAU*`.
pub fn recover_triple_hermitian(
    phi: &dyn MapOracle,
    opts: &RecoveryOptions,
) -> Result<RecoveryReport> {
    let dim = phi.dim();
    check_dim(dim, Family::TripleHermitian)?;
    let root = CounterRng::new(opts.seed);
    let mut report = RecoveryReport::new(Family::TripleHermitian);

    let identity = ComplexMatrix::identity(dim);
    let at_identity = phi.eval_checked(&identity)?;
    let sign = if at_identity.distance(&identity) <= opts.tol {
        Sign::Plus
    } else if at_identity.distance(&-&identity) <= opts.tol {
        Sign::Minus
    } else {
        let witness = Witness::Evaluation {
            input: identity,
            output: at_identity,
        };
        return Ok(report.reject("φ(I) ∉ {I, −I}", Some(witness)));
    };

    let normalized = Scaled(phi, sign.value());
    if let Some(rejected) = triple_probe(&normalized, opts, &root, &mut report)? {
        return Ok(rejected);
    }
    let descriptor = match shared_pipeline(&normalized, opts, &root, &mut report, true)? {
        Some((u, kind)) => SymmetryDescriptor::new(kind, u, false, sign)?,
        None => return Ok(report),
    };
    finish(report, phi, descriptor, Domain::Hermitian, opts, &root)
}

/// `φ(ABA) = φ(A)φ(B)φ(A)` on sampled effect pairs. `Some` on rejection.
fn triple_probe(
    phi: &dyn MapOracle,
    opts: &RecoveryOptions,
    root: &CounterRng,
    report: &mut RecoveryReport,
) -> Result<Option<RecoveryReport>> {
    let dim = phi.dim();
    let mut rng = root.split(STREAM_TRIPLE);
    for _ in 0..opts.trials.max(1) {
        report.samples_used += 1;
        let a = random_effect_with(dim, &mut rng)?.into_matrix();
        let b = random_effect_with(dim, &mut rng)?.into_matrix();
        let aba = &(&a * &b) * &a;
        let fa = phi.eval_checked(&a)?;
        let rhs = &(&fa * &phi.eval_checked(&b)?) * &fa;
        let deviation = phi.eval_checked(&aba)?.distance(&rhs);
        if !(deviation <= opts.probe_tol) {
            let reason = format!("triple identity violated: deviation {deviation:e}");
            let witness = Witness::TriplePair { a, b, deviation };
            return Ok(Some(report.clone().reject(reason, Some(witness))));
        }
    }
    Ok(None)
}

/// Preservation probe, reconstruction and scaling samples on a map that fixes 0.
/// Returns `None` after recording a rejection in `report`.
fn shared_pipeline(
    base: &dyn MapOracle,
    opts: &RecoveryOptions,
    root: &CounterRng,
    report: &mut RecoveryReport,
    scaling_required: bool,
) -> Result<Option<(ComplexMatrix, Kind)>> {
    let dim = base.dim();
    let probe = preservation_probe(
        base,
        opts.trials,
        opts.probe_tol,
        &mut root.split(STREAM_PROBE),
    )?;
    report.samples_used += probe.samples_used;
    let failed = probe.witnesses.first().cloned();
    report.probe = Some(probe);
    if let Some(w) = failed {
        let reason = format!(
            "{} failed: deviation {:e}",
            w.property.as_str(),
            w.deviation
        );
        *report = report.clone().reject(reason, Some(Witness::Probe(w)));
        return Ok(None);
    }

    let recon = match reconstruct_unitary_from_projection_action(
        base,
        opts.tol,
        &mut root.split(STREAM_RECONSTRUCT),
    ) {
        Ok(r) => r,
        Err(e) => {
            let reason = format!("reconstruction failed: {}", rejection_reason(e)?);
            *report = report.clone().reject(reason, None);
            return Ok(None);
        }
    };
    report.samples_used += RECONSTRUCTION_CHECKS;

    let mut lambdas = scaling_grid(opts.scaling_points);
    if report.family == Family::TripleHermitian {
        lambdas.extend_from_slice(&[-1.0, -0.5, -0.25, 2.0]);
    }
    let mut rng = root.split(STREAM_SCALING);
    let p = rank_one_projection(&random_unit_vector_with(dim, &mut rng))?;
    match extract_scaling_function(base, &p, &lambdas, opts.probe_tol) {
        Ok(samples) => {
            let check = check_scaling_identity(&samples, opts.probe_tol);
            report.samples_used += samples.samples.len();
            report.scaling = Some(samples);
            report.scaling_check = Some(check);
            if scaling_required && !check.passed {
                let reason = format!(
                    "scaling function deviates from identity: |f({}) − {}| = {:e}",
                    check.worst_lambda, check.worst_lambda, check.max_deviation
                );
                let f = report
                    .scaling
                    .as_ref()
                    .and_then(|s| s.samples.iter().find(|x| x.lambda == check.worst_lambda))
                    .map_or(f64::NAN, |x| x.f);
                let witness = Witness::Scaling {
                    lambda: check.worst_lambda,
                    f,
                };
                *report = report.clone().reject(reason, Some(witness));
                return Ok(None);
            }
        }
        Err(e) => {
            let reason = format!("scaling extraction failed: {}", rejection_reason(e)?);
            *report = report.clone().reject(reason, None);
            return Ok(None);
        }
    }
    Ok(Some((recon.u, recon.kind)))
}

fn finish(
    mut report: RecoveryReport,
    phi: &dyn MapOracle,
    descriptor: SymmetryDescriptor,
    domain: Domain,
    opts: &RecoveryOptions,
    root: &CounterRng,
) -> Result<RecoveryReport> {
    let residual = verify_descriptor(
        phi,
        &descriptor,
        domain,
        opts.trials,
        &mut root.split(STREAM_VERIFY),
    )?;
    report.samples_used += opts.trials.max(1);
    report.max_residual = Some(residual);
    report.descriptor = Some(descriptor);
    if !(residual <= opts.tol) {
        let reason = format!(
            "residual {residual:e} exceeds tolerance {:e}",
            opts.tol
        );
        return Ok(report.reject(reason, None));
    }
    report.verdict = Verdict::Canonical;
    Ok(report)
}

/// Dispatches on the family.
pub fn recover(
    family: Family,
    phi: &dyn MapOracle,
    opts: &RecoveryOptions,
) -> Result<RecoveryReport> {
    match family {
        Family::Affine => recover_affine(phi, opts),
        Family::TripleEffects => recover_triple(phi, opts),
        Family::TripleHermitian => recover_triple_hermitian(phi, opts),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::haar_unitary;
    use crate::oracle::FnOracle;

    fn conj_by(u: ComplexMatrix) -> impl Fn(&ComplexMatrix) -> ComplexMatrix {
        move |a: &ComplexMatrix| &(&u * a) * &u.adjoint()
    }

    #[test]
    fn probe_examples() {
        let mut rng = CounterRng::new(1);
        let id = FnOracle::new(4, |a: &ComplexMatrix| a.clone());
        let r = preservation_probe(&id, 20, 1e-9, &mut rng).unwrap();
        assert!(r.passed() && r.witnesses.is_empty());

        let conj = FnOracle::new(4, conj_by(haar_unitary(4, 3).unwrap()));
        let r = preservation_probe(&conj, 20, 1e-9, &mut rng).unwrap();
        assert!(r.passed());

        let half = FnOracle::new(4, |a: &ComplexMatrix| a.scale_real(0.5));
        let r = preservation_probe(&half, 20, 1e-9, &mut rng).unwrap();
        assert!(!r.projections_preserved);
        let w = &r.witnesses[0];
        assert_eq!(w.property, ProbeProperty::Projection);
        assert_eq!(w.p, ComplexMatrix::identity(4));
        assert!(!r.orthocomplement_preserved);
        assert!(r.order_preserved && r.orthogonality_preserved);
        assert_eq!(r.witnesses.len(), 2);
    }

    #[test]
    fn reconstruct_examples() {
        let mut rng = CounterRng::new(2);
        let id = FnOracle::new(3, |a: &ComplexMatrix| a.clone());
        let r = reconstruct_unitary_from_projection_action(&id, 1e-9, &mut rng).unwrap();
        assert_eq!(r.kind, Kind::Unitary);
        assert!(r.u.distance(&ComplexMatrix::identity(3)) < 1e-14);

        let k = FnOracle::new(3, |a: &ComplexMatrix| a.conj());
        let r = reconstruct_unitary_from_projection_action(&k, 1e-9, &mut rng).unwrap();
        assert_eq!(r.kind, Kind::Antiunitary);
        assert!(r.u.distance(&ComplexMatrix::identity(3)) < 1e-14);

        let u0 = haar_unitary(4, 7).unwrap();
        let conj = FnOracle::new(4, conj_by(u0.clone()));
        let r = reconstruct_unitary_from_projection_action(&conj, 1e-9, &mut rng).unwrap();
        assert_eq!(r.kind, Kind::Unitary);
        assert!(r.residual <= 1e-9);
        assert!(r.u.distance(&crate::symmetry::gauge_normalize(&u0)) < 1e-12);
    }

    #[test]
    fn reconstruct_rejects_non_rank_one_images() {
        let mut rng = CounterRng::new(2);
        let half = FnOracle::new(3, |a: &ComplexMatrix| a.scale_real(0.5));
        assert!(matches!(
            reconstruct_unitary_from_projection_action(&half, 1e-9, &mut rng),
            Err(Error::NotRankOne { .. })
        ));
        let fixed = FnOracle::new(3, |_: &ComplexMatrix| {
            ComplexMatrix::from_real_diagonal(&[1.0, 0.0, 0.0])
        });
        assert!(matches!(
            reconstruct_unitary_from_projection_action(&fixed, 1e-9, &mut rng),
            Err(Error::ImagesNotOrthogonal { .. })
        ));
        let one = FnOracle::new(1, |a: &ComplexMatrix| a.clone());
        assert!(matches!(
            reconstruct_unitary_from_projection_action(&one, 1e-9, &mut rng),
            Err(Error::DimensionTooSmall { .. })
        ));
    }

    #[test]
    fn reconstruct_detects_mixed_behaviour() {
        // unitary on the (0,1) block, conjugating on index 2: no single (anti)unitary fits
        let mixed = FnOracle::new(3, |a: &ComplexMatrix| {
            let mut b = a.clone();
            for i in 0..3 {
                b[(i, 2)] = a[(i, 2)].conj();
                b[(2, i)] = a[(2, i)].conj();
            }
            b
        });
        let mut rng = CounterRng::new(5);
        assert!(matches!(
            reconstruct_unitary_from_projection_action(&mixed, 1e-9, &mut rng),
            Err(Error::VerificationFailed { .. })
        ));
    }

    #[test]
    fn scaling_examples() {
        let p = rank_one_projection(&[Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(0.5, 0.0)])
            .unwrap();
        let id = FnOracle::new(3, |a: &ComplexMatrix| a.clone());
        let s = extract_scaling_function(&id, &p, &[0.25], 1e-9).unwrap();
        assert!((s.samples[0].f - 0.25).abs() < 1e-15);

        let d = SymmetryDescriptor::new(Kind::Antiunitary, haar_unitary(3, 4).unwrap(), false, Sign::Plus).unwrap();
        let s = extract_scaling_function(&d, &p, &[0.0, 1.0], 1e-9).unwrap();
        assert!(s.samples[0].f.abs() < 1e-15);
        assert!((s.samples[1].f - 1.0).abs() < 1e-14);

        let grid = scaling_grid(17);
        let s = extract_scaling_function(&id, &p, &grid, 1e-9).unwrap();
        let c = check_scaling_identity(&s, 1e-9);
        assert!(c.passed && c.max_deviation < 1e-15);
        assert!(c.multiplicative_deviation.unwrap() < 1e-15);
        assert!(c.orthoadditive_deviation.unwrap() < 1e-15);
    }

    #[test]
    fn corrupt_scaling_table() {
        let p = rank_one_projection(&[Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)])
            .unwrap();
        let pm = p.matrix().clone();
        // φ(λP) := λ²P, identity elsewhere
        let corrupt = FnOracle::new(3, move |a: &ComplexMatrix| {
            let lambda = (a * &pm).trace().re;
            if a.distance(&pm.scale_real(lambda)) < 1e-12 {
                pm.scale_real(lambda * lambda)
            } else {
                a.clone()
            }
        });
        let s = extract_scaling_function(&corrupt, &p, &scaling_grid(17), 1e-9).unwrap();
        let half = s.samples.iter().find(|x| x.lambda == 0.5).unwrap();
        assert!((half.f - 0.25).abs() < 1e-15);
        let c = check_scaling_identity(&s, 1e-9);
        assert!(!c.passed);
        assert!((c.max_deviation - 0.25).abs() < 1e-15);
        assert_eq!(c.worst_lambda, 0.5);
        // λ² is multiplicative, so only the identity and orthoadditive checks fail
        assert!(c.multiplicative_deviation.unwrap() < 1e-15);
        assert!(c.orthoadditive_deviation.unwrap() > 0.1);
    }

    #[test]
    fn scaling_requires_rank_one_image() {
        let p = rank_one_projection(&[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)])
            .unwrap();
        let double = FnOracle::new(3, |a: &ComplexMatrix| a.scale_real(2.0));
        assert!(matches!(
            extract_scaling_function(&double, &p, &[0.5], 1e-9),
            Err(Error::NotRankOne { .. })
        ));
    }

    #[test]
    fn verify_examples() {
        let mut rng = CounterRng::new(6);
        let d = SymmetryDescriptor::new(Kind::Unitary, haar_unitary(3, 2).unwrap(), false, Sign::Plus).unwrap();
        assert!(verify_descriptor(&d, &d, Domain::Effects, 20, &mut rng).unwrap() < 1e-14);

        let id = FnOracle::new(3, |a: &ComplexMatrix| a.clone());
        let wrong = SymmetryDescriptor::new(Kind::Unitary, ComplexMatrix::identity(3), true, Sign::Plus).unwrap();
        assert!(verify_descriptor(&id, &wrong, Domain::Effects, 20, &mut rng).unwrap() > 0.1);

        let u = haar_unitary(3, 2).unwrap();
        let rotated = FnOracle::new(3, conj_by(u.scale(Complex64::from_polar(1.0, 1.3))));
        assert!(verify_descriptor(&rotated, &d, Domain::Hermitian, 20, &mut rng).unwrap() < 1e-13);
    }

    #[test]
    fn recover_affine_examples() {
        let opts = RecoveryOptions::default();
        let id = FnOracle::new(3, |a: &ComplexMatrix| a.clone());
        let r = recover_affine(&id, &opts).unwrap();
        assert!(r.is_canonical(), "{:?}", r.reason);
        let d = r.descriptor.unwrap();
        assert_eq!((d.kind(), d.complement()), (Kind::Unitary, false));
        assert!(d.u().distance(&ComplexMatrix::identity(3)) < 1e-14);

        let comp = FnOracle::new(3, |a: &ComplexMatrix| &ComplexMatrix::identity(3) - a);
        let r = recover_affine(&comp, &opts).unwrap();
        assert!(r.is_canonical());
        let d = r.descriptor.unwrap();
        assert_eq!((d.kind(), d.complement()), (Kind::Unitary, true));

        let u0 = haar_unitary(5, 42).unwrap();
        let target = SymmetryDescriptor::new(Kind::Antiunitary, u0, true, Sign::Plus).unwrap();
        let r = recover_affine(&target, &opts).unwrap();
        assert!(r.is_canonical());
        assert!(r.max_residual.unwrap() <= 1e-8);
        let d = r.descriptor.unwrap();
        assert_eq!((d.kind(), d.complement()), (Kind::Antiunitary, true));
        assert!(d.u().distance(target.u()) <= 1e-7);
    }

    #[test]
    fn recover_affine_rejections() {
        let opts = RecoveryOptions::default();
        let square = FnOracle::new(3, |a: &ComplexMatrix| a * a);
        let r = recover_affine(&square, &opts).unwrap();
        assert_eq!(r.verdict, Verdict::Rejected);
        assert!(matches!(r.witness, Some(Witness::Affinity(_))));

        let half_shift = FnOracle::new(3, |a: &ComplexMatrix| {
            &a.scale_real(0.5) + &ComplexMatrix::identity(3).scale_real(0.25)
        });
        let r = recover_affine(&half_shift, &opts).unwrap();
        assert_eq!(r.reason.as_deref(), Some("φ(0) not in {0, I}"));

        let half = FnOracle::new(3, |a: &ComplexMatrix| a.scale_real(0.5));
        let r = recover_affine(&half, &opts).unwrap();
        assert!(r.reason.unwrap().contains("projection preservation"));

        let one = FnOracle::new(1, |a: &ComplexMatrix| a.clone());
        assert!(matches!(
            recover_affine(&one, &opts),
            Err(Error::DimensionTooSmall { .. })
        ));
    }

    #[test]
    fn recover_triple_examples() {
        let opts = RecoveryOptions::default();
        let id = FnOracle::new(3, |a: &ComplexMatrix| a.clone());
        let r = recover_triple(&id, &opts).unwrap();
        assert!(r.is_canonical());
        assert_eq!(r.descriptor.unwrap().kind(), Kind::Unitary);

        let k = FnOracle::new(3, |a: &ComplexMatrix| a.conj());
        let r = recover_triple(&k, &opts).unwrap();
        assert!(r.is_canonical());
        let d = r.descriptor.unwrap();
        assert_eq!(d.kind(), Kind::Antiunitary);
        assert!(d.u().distance(&ComplexMatrix::identity(3)) < 1e-14);

        let comp = FnOracle::new(3, |a: &ComplexMatrix| &ComplexMatrix::identity(3) - a);
        let r = recover_triple(&comp, &opts).unwrap();
        assert_eq!(r.verdict, Verdict::Rejected);
        assert!(r.reason.unwrap().starts_with("triple identity violated"));
        match r.witness {
            Some(Witness::TriplePair { a, b, deviation }) => {
                let i = ComplexMatrix::identity(3);
                let lhs = &i - &(&(&a * &b) * &a);
                let ia = &i - &a;
                let rhs = &(&ia * &(&i - &b)) * &ia;
                assert!((lhs.distance(&rhs) - deviation).abs() < 1e-12);
                assert!(deviation > 1e-3);
            }
            other => panic!("unexpected witness {other:?}"),
        }

        let two = FnOracle::new(2, |a: &ComplexMatrix| a.clone());
        assert!(matches!(
            recover_triple(&two, &opts),
            Err(Error::DimensionTooSmall { dim: 2, min: 3 })
        ));
    }

    #[test]
    fn recover_hermitian_examples() {
        let opts = RecoveryOptions::default();
        let neg = FnOracle::new(3, |a: &ComplexMatrix| -a);
        let r = recover_triple_hermitian(&neg, &opts).unwrap();
        assert!(r.is_canonical(), "{:?}", r.reason);
        let d = r.descriptor.unwrap();
        assert_eq!((d.kind(), d.sign()), (Kind::Unitary, Sign::Minus));

        let u0 = haar_unitary(4, 9).unwrap();
        let target = SymmetryDescriptor::new(Kind::Antiunitary, u0, false, Sign::Plus).unwrap();
        let r = recover_triple_hermitian(&target, &opts).unwrap();
        assert!(r.is_canonical());
        let d = r.descriptor.unwrap();
        assert_eq!((d.kind(), d.sign()), (Kind::Antiunitary, Sign::Plus));
        assert!(d.u().distance(target.u()) < 1e-7);

        let shift = FnOracle::new(3, |a: &ComplexMatrix| a + &ComplexMatrix::identity(3));
        let r = recover_triple_hermitian(&shift, &opts).unwrap();
        assert_eq!(r.reason.as_deref(), Some("φ(I) ∉ {I, −I}"));
    }

    #[test]
    fn oracle_failures_propagate() {
        struct Broken;
        impl MapOracle for Broken {
            fn dim(&self) -> usize {
                3
            }
            fn eval(&self, _: &ComplexMatrix) -> Result<ComplexMatrix> {
                Err(Error::Oracle("offline".into()))
            }
        }
        let opts = RecoveryOptions::default();
        assert!(matches!(recover_affine(&Broken, &opts), Err(Error::Oracle(_))));
        assert!(matches!(recover_triple(&Broken, &opts), Err(Error::Oracle(_))));
    }
}
