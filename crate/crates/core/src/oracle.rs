//! Black-box maps on Hermitian matrices.
//!
//! Nothing about an oracle is assumed beyond determinism: affinity,
//! multiplicativity and bijectivity are probed by the callers.

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

pub trait MapOracle {
    fn dim(&self) -> usize;

    /// Image of a Hermitian matrix.
    fn eval(&self, a: &ComplexMatrix) -> Result<ComplexMatrix>;

    /// `eval` with dimension and finiteness checks on the output.
    fn eval_checked(&self, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        if a.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: a.dim(),
            });
        }
        let out = self.eval(a)?;
        if out.dim() != self.dim() {
            return Err(Error::Oracle(format!(
                "output has dimension {}, expected {}",
                out.dim(),
                self.dim()
            )));
        }
        if out
            .as_slice()
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::Oracle("output has a non-finite entry".into()));
        }
        Ok(out)
    }
}

impl<T: MapOracle + ?Sized> MapOracle for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn eval(&self, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        (**self).eval(a)
    }
}

impl<T: MapOracle + ?Sized> MapOracle for Box<T> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn eval(&self, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        (**self).eval(a)
    }
}

/// Wraps an infallible closure.
pub struct FnOracle<F> {
    dim: usize,
    f: F,
}

impl<F> FnOracle<F>
where
    F: Fn(&ComplexMatrix) -> ComplexMatrix,
{
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F> MapOracle for FnOracle<F>
where
    F: Fn(&ComplexMatrix) -> ComplexMatrix,
{
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval(&self, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        Ok((self.f)(a))
    }
}

/// `A ↦ I − φ(A)`.
pub struct Complemented<O>(pub O);

impl<O: MapOracle> MapOracle for Complemented<O> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn eval(&self, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        Ok(&ComplexMatrix::identity(self.dim()) - &self.0.eval(a)?)
    }
}

/// `A ↦ s·φ(A)`.
pub struct Scaled<O>(pub O, pub f64);

impl<O: MapOracle> MapOracle for Scaled<O> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn eval(&self, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        Ok(self.0.eval(a)?.scale_real(self.1))
    }
}

/// `A ↦ φ(A) − φ(0)`, with `φ(0)` evaluated once.
pub struct Centered<O> {
    inner: O,
    offset: ComplexMatrix,
}

impl<O: MapOracle> Centered<O> {
    pub fn new(inner: O) -> Result<Self> {
        let offset = inner.eval_checked(&ComplexMatrix::zeros(inner.dim()))?;
        Ok(Self { inner, offset })
    }

    pub fn offset(&self) -> &ComplexMatrix {
        &self.offset
    }
}

impl<O: MapOracle> MapOracle for Centered<O> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn eval(&self, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        Ok(&self.inner.eval(a)? - &self.offset)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adaptors() {
        let id = FnOracle::new(2, |a: &ComplexMatrix| a.clone());
        let a = ComplexMatrix::from_real_diagonal(&[0.25, 0.5]);
        assert_eq!(
            Complemented(&id).eval(&a).unwrap(),
            ComplexMatrix::from_real_diagonal(&[0.75, 0.5])
        );
        assert_eq!(
            Scaled(&id, -1.0).eval(&a).unwrap(),
            ComplexMatrix::from_real_diagonal(&[-0.25, -0.5])
        );
        let shifted = FnOracle::new(2, |a: &ComplexMatrix| a + &ComplexMatrix::identity(2));
        let c = Centered::new(&shifted).unwrap();
        assert_eq!(c.eval(&a).unwrap(), a);
    }

    #[test]
    fn checked_eval_catches_bad_outputs() {
        let bad = FnOracle::new(2, |_: &ComplexMatrix| ComplexMatrix::zeros(3));
        assert!(matches!(
            bad.eval_checked(&ComplexMatrix::zeros(2)),
            Err(Error::Oracle(_))
        ));
        let id = FnOracle::new(2, |a: &ComplexMatrix| a.clone());
        assert!(matches!(
            id.eval_checked(&ComplexMatrix::zeros(3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
