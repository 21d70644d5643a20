//! Canonical automorphisms of the effect interval and of the Hermitian
//! matrices, and the real-linear representation of affine maps.
//!
//! A descriptor acts as
//!
//! ```text
//! A ↦ sign · U κ(c(A)) U*,   κ = id or entrywise conjugation,
//!                            c = id or A ↦ I − A
//! ```
//!
//! An antiunitary operator is stored as `U∘K` with `K` the conjugation in the
//! canonical basis. On Hermitian inputs `U conj(A) U* = U Aᵀ U*`.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::oracle::MapOracle;

/// Entries with modulus at or below this are skipped when fixing the global phase.
pub const GAUGE_THRESHOLD: f64 = 1e-8;
/// Unitarity is accepted when `‖U*U − I‖_F ≤ UNITARY_TOL · dim`.
pub const UNITARY_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kind {
    Unitary,
    Antiunitary,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Unitary => "unitary",
            Kind::Antiunitary => "antiunitary",
        }
    }

    fn apply_conj(self, a: &ComplexMatrix) -> ComplexMatrix {
        match self {
            Kind::Unitary => a.clone(),
            Kind::Antiunitary => a.conj(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn from_i32(s: i32) -> Option<Sign> {
        match s {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }

    pub fn as_i32(self) -> i32 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    fn times(self, other: Sign) -> Sign {
        if self == other {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

/// Which classification a map is tested against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    /// Affine bijections of `[0, I]`: `A ↦ Φ(A)` or `A ↦ Φ(I − A)`.
    Affine,
    /// Jordan-triple automorphisms of `[0, I]`: `A ↦ UAU*` only.
    TripleEffects,
    /// Jordan-triple automorphisms of the Hermitian matrices: `A ↦ ±UAU*`.
    TripleHermitian,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::Affine => "affine",
            Family::TripleEffects => "triple_effects",
            Family::TripleHermitian => "triple_hermitian",
        }
    }

    pub fn parse(s: &str) -> Option<Family> {
        match s {
            "affine" => Some(Family::Affine),
            "triple_effects" => Some(Family::TripleEffects),
            "triple_hermitian" => Some(Family::TripleHermitian),
            _ => None,
        }
    }

    pub fn min_dim(self) -> usize {
        match self {
            Family::Affine => 2,
            Family::TripleEffects | Family::TripleHermitian => 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SymmetryDescriptor {
    kind: Kind,
    u: ComplexMatrix,
    complement: bool,
    sign: Sign,
}

impl SymmetryDescriptor {
    /// Validates unitarity and flag consistency, then fixes the global phase.
    pub fn new(kind: Kind, u: ComplexMatrix, complement: bool, sign: Sign) -> Result<Self> {
        let dim = u.dim();
        let deviation = (&u.adjoint() * &u).distance(&ComplexMatrix::identity(dim));
        if deviation > UNITARY_TOL * dim as f64 {
            return Err(Error::NotUnitary { deviation });
        }
        if complement && sign == Sign::Minus {
            return Err(Error::InvalidDescriptor(
                "complement and negative sign cannot be combined",
            ));
        }
        Ok(Self {
            kind,
            u: gauge_normalize(&u),
            complement,
            sign,
        })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            kind: Kind::Unitary,
            u: ComplexMatrix::identity(dim),
            complement: false,
            sign: Sign::Plus,
        }
    }

    pub fn dim(&self) -> usize {
        self.u.dim()
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn u(&self) -> &ComplexMatrix {
        &self.u
    }

    pub fn complement(&self) -> bool {
        self.complement
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    /// Whether the flags are admissible in `family`.
    pub fn fits(&self, family: Family) -> bool {
        match family {
            Family::Affine => self.sign == Sign::Plus,
            Family::TripleEffects => !self.complement && self.sign == Sign::Plus,
            Family::TripleHermitian => !self.complement,
        }
    }

    pub fn apply(&self, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        if a.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: a.dim(),
            });
        }
        let mut x = self.kind.apply_conj(a);
        if self.complement {
            x = &ComplexMatrix::identity(self.dim()) - &x;
        }
        let y = &(&self.u * &x) * &self.u.adjoint();
        Ok(y.scale_real(self.sign.value()))
    }

    /// `self ∘ other`, i.e. `A ↦ self(other(A))`.
    pub fn compose(&self, other: &SymmetryDescriptor) -> Result<SymmetryDescriptor> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        if (self.complement && other.sign == Sign::Minus)
            || (other.complement && self.sign == Sign::Minus)
        {
            return Err(Error::FamilyMismatch);
        }
        let kind = if self.kind == other.kind {
            Kind::Unitary
        } else {
            Kind::Antiunitary
        };
        let u = &self.u * &self.kind.apply_conj(&other.u);
        SymmetryDescriptor::new(
            kind,
            u,
            self.complement ^ other.complement,
            self.sign.times(other.sign),
        )
    }

    pub fn inverse(&self) -> SymmetryDescriptor {
        let u = self.kind.apply_conj(&self.u.adjoint());
        SymmetryDescriptor {
            kind: self.kind,
            u: gauge_normalize(&u),
            complement: self.complement,
            sign: self.sign,
        }
    }

    /// Expands the map over the Hermitian basis.
    pub fn to_affine_rep(&self) -> AffineMapRep {
        let dim = self.dim();
        let constant = self
            .apply(&ComplexMatrix::zeros(dim))
            .expect("dimension matches");
        let basis = hermitian_basis(dim);
        let n2 = basis.len();
        let mut linear = vec![0.0; n2 * n2];
        for (k, b) in basis.iter().enumerate() {
            let image = &self.apply(b).expect("dimension matches") - &constant;
            for (j, coord) in encode_hermitian(&image).into_iter().enumerate() {
                linear[j * n2 + k] = coord;
            }
        }
        AffineMapRep {
            dim,
            linear,
            constant: constant.hermitian_part(),
        }
    }
}

impl MapOracle for SymmetryDescriptor {
    fn dim(&self) -> usize {
        SymmetryDescriptor::dim(self)
    }
    fn eval(&self, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.apply(a)
    }
}

/// Multiplies `u` by a global phase so that the first entry of its first
/// column with modulus above [`GAUGE_THRESHOLD`] is real and positive.
pub fn gauge_normalize(u: &ComplexMatrix) -> ComplexMatrix {
    let pivot = (0..u.dim())
        .map(|i| u[(i, 0)])
        .find(|z| z.norm() > GAUGE_THRESHOLD);
    match pivot {
        Some(z) => {
            let mut out = u.scale(z.conj() / z.norm());
            // the pivot itself is exactly real
            if let Some(i) = (0..u.dim()).find(|&i| u[(i, 0)].norm() > GAUGE_THRESHOLD) {
                out[(i, 0)] = Complex64::new(z.norm(), 0.0);
            }
            out
        }
        None => u.clone(),
    }
}

/// Trace-orthonormal basis of the `dim × dim` Hermitian matrices: `E_kk` for
/// each `k`, then for each pair `k < l` in lexicographic order the symmetric
/// element `(E_kl + E_lk)/√2` followed by `(iE_kl − iE_lk)/√2`.
pub fn hermitian_basis(dim: usize) -> Vec<ComplexMatrix> {
    let mut out = Vec::with_capacity(dim * dim);
    for k in 0..dim {
        let mut m = ComplexMatrix::zeros(dim);
        m[(k, k)] = Complex64::new(1.0, 0.0);
        out.push(m);
    }
    for k in 0..dim {
        for l in (k + 1)..dim {
            let mut s = ComplexMatrix::zeros(dim);
            s[(k, l)] = Complex64::new(FRAC_1_SQRT_2, 0.0);
            s[(l, k)] = Complex64::new(FRAC_1_SQRT_2, 0.0);
            out.push(s);
            let mut a = ComplexMatrix::zeros(dim);
            a[(k, l)] = Complex64::new(0.0, FRAC_1_SQRT_2);
            a[(l, k)] = Complex64::new(0.0, -FRAC_1_SQRT_2);
            out.push(a);
        }
    }
    out
}

/// Coordinates `tr(B_k A)` of the Hermitian part of `a` in [`hermitian_basis`] order.
pub fn encode_hermitian(a: &ComplexMatrix) -> Vec<f64> {
    let dim = a.dim();
    let mut out = Vec::with_capacity(dim * dim);
    for k in 0..dim {
        out.push(a[(k, k)].re);
    }
    let s = FRAC_1_SQRT_2;
    for k in 0..dim {
        for l in (k + 1)..dim {
            let (akl, alk) = (a[(k, l)], a[(l, k)]);
            out.push((akl + alk).re * s);
            out.push((alk - akl).im * -s);
        }
    }
    out
}

/// Inverse of [`encode_hermitian`].
pub fn decode_hermitian(dim: usize, coords: &[f64]) -> ComplexMatrix {
    assert_eq!(coords.len(), dim * dim, "coordinate count must be dim²");
    let mut m = ComplexMatrix::zeros(dim);
    for k in 0..dim {
        m[(k, k)] = Complex64::new(coords[k], 0.0);
    }
    let mut idx = dim;
    for k in 0..dim {
        for l in (k + 1)..dim {
            let z = Complex64::new(coords[idx], coords[idx + 1]) * FRAC_1_SQRT_2;
            m[(k, l)] = z;
            m[(l, k)] = z.conj();
            idx += 2;
        }
    }
    m
}

/// `A ↦ L(A) + C` with `L` real-linear on Hermitian coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineMapRep {
    dim: usize,
    /// Row-major `dim² × dim²`.
    linear: Vec<f64>,
    constant: ComplexMatrix,
}

impl AffineMapRep {
    pub fn new(dim: usize, linear: Vec<Vec<f64>>, constant: ComplexMatrix) -> Result<Self> {
        if dim == 0 {
            return Err(Error::DimensionTooSmall { dim, min: 1 });
        }
        let n2 = dim * dim;
        if linear.len() != n2 {
            return Err(Error::BadLength {
                expected: n2,
                found: linear.len(),
            });
        }
        if let Some(row) = linear.iter().find(|r| r.len() != n2) {
            return Err(Error::BadLength {
                expected: n2,
                found: row.len(),
            });
        }
        let linear: Vec<f64> = linear.into_iter().flatten().collect();
        if linear.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        if constant.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: constant.dim(),
            });
        }
        let deviation = constant.hermitian_deviation();
        if deviation > crate::DEFAULT_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self {
            dim,
            linear,
            constant: constant.hermitian_part(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn constant(&self) -> &ComplexMatrix {
        &self.constant
    }

    pub fn linear_rows(&self) -> Vec<Vec<f64>> {
        self.linear.chunks(self.dim * self.dim).map(<[f64]>::to_vec).collect()
    }

    pub fn linear_entry(&self, row: usize, col: usize) -> f64 {
        self.linear[row * self.dim * self.dim + col]
    }

    fn apply_coords(&self, x: &[f64]) -> Vec<f64> {
        self.linear
            .chunks(self.dim * self.dim)
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `L(A)` for Hermitian `A`.
    pub fn apply_linear(&self, a: &ComplexMatrix) -> ComplexMatrix {
        decode_hermitian(self.dim, &self.apply_coords(&encode_hermitian(a)))
    }

    /// Complexification `L(Re M) + i L(Im M)` for arbitrary `M`.
    pub fn apply_linear_complex(&self, m: &ComplexMatrix) -> ComplexMatrix {
        let (re, im) = crate::effects::real_imag_parts(m);
        &self.apply_linear(&re) + &self.apply_linear(&im).scale(Complex64::new(0.0, 1.0))
    }

    pub fn apply(&self, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        if a.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: a.dim(),
            });
        }
        Ok(&self.apply_linear(a) + &self.constant)
    }
}

impl MapOracle for AffineMapRep {
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval(&self, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.apply(a)
    }
}
