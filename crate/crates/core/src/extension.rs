//! Affinity probing and the linear extension of an affine map on `[0, I]`.
//!
//! For `φ` affine on effects with `φ(0) = 0` the extension is built in three
//! stages:
//!
//! ```text
//! Φ₁(P) = ‖P‖ φ(P/‖P‖)                      P ≥ 0  (0 when P = 0)
//! Φ₂(H) = Φ₁(H⁺) − Φ₁(H⁻)                   H = H*
//! Φ(M)  = Φ₂(Re M) + i Φ₂(Im M)
//! ```

use num_complex::Complex64;

use crate::effects::real_imag_parts;
use crate::error::{Error, Result};
use crate::linalg::{
    eig_hermitian, operator_norm, random_effect_with, ComplexMatrix, CounterRng,
};
use crate::oracle::{Centered, MapOracle};

pub const DEFAULT_AFFINITY_TRIALS: usize = 64;
/// Positive operators with smaller norm are treated as zero by `Φ₁`.
pub const ZERO_NORM_CUTOFF: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct AffinityWitness {
    pub lambda: f64,
    pub a: ComplexMatrix,
    pub b: ComplexMatrix,
    /// `‖φ(λA + (1−λ)B) − λφ(A) − (1−λ)φ(B)‖_F`
    pub deviation: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AffinityCheck {
    pub affine: bool,
    pub trials_run: usize,
    pub max_deviation: f64,
    /// First violating triple.
    pub witness: Option<AffinityWitness>,
}

/// Samples `(λ, A, B)` and checks the convex-combination identity; stops at
/// the first violation.
pub fn is_affine<O: MapOracle + ?Sized>(
    phi: &O,
    trials: usize,
    tol: f64,
    rng: &mut CounterRng,
) -> Result<AffinityCheck> {
    let dim = phi.dim();
    let mut max_deviation = 0.0f64;
    for t in 0..trials.max(1) {
        let lambda = rng.uniform();
        let a = random_effect_with(dim, rng)?.into_matrix();
        let b = random_effect_with(dim, rng)?.into_matrix();
        let mix = &a.scale_real(lambda) + &b.scale_real(1.0 - lambda);
        let lhs = phi.eval_checked(&mix)?;
        let rhs = &phi.eval_checked(&a)?.scale_real(lambda)
            + &phi.eval_checked(&b)?.scale_real(1.0 - lambda);
        let deviation = lhs.distance(&rhs);
        max_deviation = max_deviation.max(deviation);
        if deviation > tol {
            return Ok(AffinityCheck {
                affine: false,
                trials_run: t + 1,
                max_deviation,
                witness: Some(AffinityWitness {
                    lambda,
                    a,
                    b,
                    deviation,
                }),
            });
        }
    }
    Ok(AffinityCheck {
        affine: true,
        trials_run: trials.max(1),
        max_deviation,
        witness: None,
    })
}

/// The linear extension `Φ` of an oracle vanishing at 0.
pub struct LinearExtension<O> {
    oracle: O,
}

impl<O: MapOracle> LinearExtension<O> {
    /// Requires `‖φ(0)‖_F ≤ tol` and a passing affinity probe.
    pub fn new(oracle: O, tol: f64, rng: &mut CounterRng) -> Result<Self> {
        let at_zero = oracle.eval_checked(&ComplexMatrix::zeros(oracle.dim()))?;
        let norm = at_zero.frobenius_norm();
        if norm > tol {
            return Err(Error::NonzeroAtZero(norm));
        }
        let check = is_affine(&oracle, DEFAULT_AFFINITY_TRIALS, tol, rng)?;
        if !check.affine {
            return Err(Error::NotAffine {
                deviation: check.max_deviation,
            });
        }
        Ok(Self { oracle })
    }

    /// Skips both checks; the caller vouches for `φ(0) = 0` and affinity.
    pub fn unchecked(oracle: O) -> Self {
        Self { oracle }
    }

    pub fn dim(&self) -> usize {
        self.oracle.dim()
    }

    /// `Φ₂` on a Hermitian matrix.
    pub fn eval_hermitian(&self, h: &ComplexMatrix) -> Result<ComplexMatrix> {
        let e = eig_hermitian(h, crate::DEFAULT_TOL)?;
        let pos_norm = e.max().max(0.0);
        let neg_norm = (-e.min()).max(0.0);
        let mut out = ComplexMatrix::zeros(h.dim());
        if pos_norm >= ZERO_NORM_CUTOFF {
            let unit = e.reconstruct_with(|x| x.max(0.0) / pos_norm).hermitian_part();
            out = &out + &self.oracle.eval_checked(&unit)?.scale_real(pos_norm);
        }
        if neg_norm >= ZERO_NORM_CUTOFF {
            let unit = e.reconstruct_with(|x| (-x).max(0.0) / neg_norm).hermitian_part();
            out = &out - &self.oracle.eval_checked(&unit)?.scale_real(neg_norm);
        }
        Ok(out)
    }

    /// `Φ(M) = Φ₂(Re M) + iΦ₂(Im M)`.
    pub fn eval(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        if m.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: m.dim(),
            });
        }
        let (re, im) = real_imag_parts(m);
        let real_image = self.eval_hermitian(&re)?;
        if im.frobenius_norm() == 0.0 {
            return Ok(real_image);
        }
        Ok(&real_image + &self.eval_hermitian(&im)?.scale(Complex64::new(0.0, 1.0)))
    }
}

/// One-shot `Φ(M)` with the checks of [`LinearExtension::new`].
pub fn extend_linear<O: MapOracle>(
    phi: O,
    m: &ComplexMatrix,
    tol: f64,
    seed: u64,
) -> Result<ComplexMatrix> {
    LinearExtension::new(phi, tol, &mut CounterRng::new(seed))?.eval(m)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundednessReport {
    /// Largest `‖Ψ(A)‖` over sampled effects; at most 2 for any map into `[0, I]`.
    pub effect_max: f64,
    /// Largest `‖Ψ(M)‖` over sampled `‖M‖ ≤ 1`; the four-effect split bounds it by 8.
    pub unit_ball_max: f64,
    pub samples: usize,
}

/// Operator norms of the extension of `ψ(A) = φ(A) − φ(0)` on sampled inputs.
pub fn boundedness_check<O: MapOracle>(
    phi: O,
    trials: usize,
    rng: &mut CounterRng,
) -> Result<BoundednessReport> {
    let dim = phi.dim();
    let psi = LinearExtension::unchecked(Centered::new(phi)?);
    let mut effect_max = 0.0f64;
    let mut unit_ball_max = 0.0f64;
    for _ in 0..trials.max(1) {
        let a = random_effect_with(dim, rng)?.into_matrix();
        effect_max = effect_max.max(operator_norm(&psi.eval(&a)?)?);

        let mut g = ComplexMatrix::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                g[(i, j)] = rng.complex_gaussian();
            }
        }
        let norm = operator_norm(&g)?;
        if norm > 0.0 {
            let m = g.scale_real(rng.uniform() / norm);
            unit_ball_max = unit_ball_max.max(operator_norm(&psi.eval(&m)?)?);
        }
    }
    Ok(BoundednessReport {
        effect_max,
        unit_ball_max,
        samples: trials.max(1),
    })
}
