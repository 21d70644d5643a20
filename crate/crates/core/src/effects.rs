//! The effect interval `[0, I]`: convex, order, partial-sum, orthocomplement
//! and Jordan-triple structure, and the positive/negative and real/imaginary
//! splittings used by the linear extension.

use std::ops::Range;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, operator_norm, vnorm, ComplexMatrix};
use crate::DEFAULT_TOL;

/// A Hermitian matrix with spectrum in `[0, 1]`.
///
/// Construction accepts eigenvalues in `[-tol, 1 + tol]` and clamps them into
/// `[0, 1]`; anything further out is rejected.
#[derive(Clone, Debug, PartialEq)]
pub struct Effect {
    matrix: ComplexMatrix,
    tol: f64,
}

impl Effect {
    pub fn new(matrix: ComplexMatrix, tol: f64) -> Result<Self> {
        let deviation = matrix.hermitian_deviation();
        if deviation > tol {
            return Err(Error::NotHermitian { deviation });
        }
        let h = matrix.hermitian_part();
        let e = eig_hermitian(&h, f64::INFINITY)?;
        let (lo, hi) = (e.min(), e.max());
        if lo < -tol || hi > 1.0 + tol {
            return Err(Error::NotAnEffect { min_eig: lo, max_eig: hi });
        }
        let matrix = if lo < 0.0 || hi > 1.0 {
            e.reconstruct_with(|x| x.clamp(0.0, 1.0)).hermitian_part()
        } else {
            h
        };
        Ok(Self { matrix, tol })
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::zeros(dim),
            tol: DEFAULT_TOL,
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim),
            tol: DEFAULT_TOL,
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    fn check_dim(&self, other: &Effect) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }

    /// `A B A`, which stays in `[0, I]` for any pair of effects.
    pub fn jordan_triple(&self, b: &Effect) -> Result<Effect> {
        self.check_dim(b)?;
        let aba = &(&self.matrix * &b.matrix) * &self.matrix;
        Effect::new(aba.hermitian_part(), self.tol)
    }

    /// `I − A`.
    pub fn orthocomplement(&self) -> Effect {
        Effect {
            matrix: &ComplexMatrix::identity(self.dim()) - &self.matrix,
            tol: self.tol,
        }
    }

    /// `λA + (1 − λ)B`.
    pub fn convex_combine(lambda: f64, a: &Effect, b: &Effect) -> Result<Effect> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::WeightOutOfRange(lambda));
        }
        a.check_dim(b)?;
        let m = &a.matrix.scale_real(lambda) + &b.matrix.scale_real(1.0 - lambda);
        Effect::new(m, a.tol)
    }

    /// `A ⊕ B = A + B`, defined only when the sum is again an effect.
    pub fn partial_add(&self, b: &Effect) -> Result<Effect> {
        self.check_dim(b)?;
        let sum = &self.matrix + &b.matrix;
        let max_eig = eig_hermitian(&sum, f64::INFINITY)?.max();
        if max_eig > 1.0 + self.tol {
            return Err(Error::NotSummable { max_eig });
        }
        Effect::new(sum, self.tol)
    }

    /// `A ≤ B`: the smallest eigenvalue of `B − A` is at least `−tol`.
    pub fn leq(&self, b: &Effect) -> Result<bool> {
        self.check_dim(b)?;
        is_psd(&(&b.matrix - &self.matrix), self.tol.max(b.tol))
    }

    /// Extreme points of `[0, I]` are exactly the projections.
    pub fn is_extreme(&self) -> bool {
        match eig_hermitian(&self.matrix, f64::INFINITY) {
            Ok(e) => e
                .eigenvalues
                .iter()
                .all(|&x| x.abs() <= self.tol || (x - 1.0).abs() <= self.tol),
            Err(_) => false,
        }
    }

    pub fn to_projection(&self) -> Result<Projection> {
        Projection::new(self.matrix.clone(), self.tol)
    }
}

/// `λ_min(M) ≥ −tol` for Hermitian `M`.
pub fn is_psd(m: &ComplexMatrix, tol: f64) -> Result<bool> {
    Ok(eig_hermitian(m, f64::INFINITY)?.min() >= -tol)
}

/// A Hermitian idempotent.
#[derive(Clone, Debug, PartialEq)]
pub struct Projection {
    matrix: ComplexMatrix,
}

impl Projection {
    pub fn new(matrix: ComplexMatrix, tol: f64) -> Result<Self> {
        let deviation = matrix.hermitian_deviation();
        if deviation > tol {
            return Err(Error::NotHermitian { deviation });
        }
        let h = matrix.hermitian_part();
        let idem = (&h * &h).distance(&h);
        if idem > tol {
            return Err(Error::NotAProjection { deviation: idem });
        }
        Ok(Self { matrix: h })
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::zeros(dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim),
        }
    }

    /// Projection onto the span of the given columns of a unitary `v`.
    pub fn onto_columns(v: &ComplexMatrix, columns: Range<usize>) -> Self {
        let n = v.dim();
        let mut m = ComplexMatrix::zeros(n);
        for k in columns {
            for i in 0..n {
                for j in 0..n {
                    m[(i, j)] += v[(i, k)] * v[(j, k)].conj();
                }
            }
        }
        Self {
            matrix: m.hermitian_part(),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// Rank read off the trace; errors when the trace is more than 0.01 from an integer.
    pub fn rank(&self) -> Result<usize> {
        let t = self.matrix.trace().re;
        let r = t.round();
        if (t - r).abs() > 0.01 || r < 0.0 {
            return Err(Error::RankNotInteger(t));
        }
        Ok(r as usize)
    }

    /// `I − P`.
    pub fn complement(&self) -> Projection {
        Projection {
            matrix: &ComplexMatrix::identity(self.dim()) - &self.matrix,
        }
    }

    pub fn as_effect(&self) -> Effect {
        Effect {
            matrix: self.matrix.clone(),
            tol: DEFAULT_TOL,
        }
    }
}

/// `P_x = x x*` for the normalized `x`.
pub fn rank_one_projection(x: &[Complex64]) -> Result<Projection> {
    let n = vnorm(x);
    if n == 0.0 || !n.is_finite() {
        return Err(Error::ZeroVector);
    }
    let unit: Vec<Complex64> = x.iter().map(|z| z / n).collect();
    Ok(Projection {
        matrix: ComplexMatrix::outer(&unit, &unit).hermitian_part(),
    })
}

/// `‖PQ‖_F ≤ tol`.
pub fn are_orthogonal(p: &Projection, q: &Projection, tol: f64) -> bool {
    (p.matrix() * q.matrix()).frobenius_norm() <= tol
}

/// `(A⁺, A⁻)` with `A = A⁺ − A⁻`, both positive semidefinite with `A⁺A⁻ = 0`.
pub fn positive_negative_parts(a: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let e = eig_hermitian(a, DEFAULT_TOL)?;
    let pos = e.reconstruct_with(|x| x.max(0.0)).hermitian_part();
    let neg = e.reconstruct_with(|x| (-x).max(0.0)).hermitian_part();
    Ok((pos, neg))
}

/// `(Re M, Im M) = ((M + M*)/2, (M − M*)/(2i))`.
pub fn real_imag_parts(m: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let adj = m.adjoint();
    let re = (m + &adj).scale_real(0.5);
    let im = (m - &adj).scale(Complex64::new(0.0, -0.5));
    (re, im)
}

/// Writes a matrix of operator norm at most `1 + tol` as `A₁ − A₂ + i(A₃ − A₄)`
/// with every `Aₖ` an effect.
pub fn decompose_unit_ball(m: &ComplexMatrix, tol: f64) -> Result<[Effect; 4]> {
    let norm = operator_norm(m)?;
    if norm > 1.0 + tol {
        return Err(Error::NormTooLarge(norm));
    }
    let (re, im) = real_imag_parts(m);
    let (a1, a2) = positive_negative_parts(&re)?;
    let (a3, a4) = positive_negative_parts(&im)?;
    Ok([
        Effect::new(a1, tol)?,
        Effect::new(a2, tol)?,
        Effect::new(a3, tol)?,
        Effect::new(a4, tol)?,
    ])
}
