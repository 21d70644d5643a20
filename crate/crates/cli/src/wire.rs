//! JSON wire formats for matrices, descriptors and affine maps.

use effsym::linalg::{Complex64, ComplexMatrix};
use effsym::symmetry::{AffineMapRep, Kind, Sign, SymmetryDescriptor};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub dim: usize,
    /// Row-major `[re, im]` pairs.
    pub data: Vec<Vec<[f64; 2]>>,
}

impl From<&ComplexMatrix> for MatrixJson {
    fn from(m: &ComplexMatrix) -> Self {
        let data = m
            .as_slice()
            .chunks(m.dim())
            .map(|row| row.iter().map(|z| [z.re, z.im]).collect())
            .collect();
        Self { dim: m.dim(), data }
    }
}

impl MatrixJson {
    pub fn to_matrix(&self) -> Result<ComplexMatrix, String> {
        if self.data.len() != self.dim || self.data.iter().any(|r| r.len() != self.dim) {
            return Err(format!("matrix data is not {0}×{0}", self.dim));
        }
        let flat = self
            .data
            .iter()
            .flatten()
            .map(|[re, im]| Complex64::new(*re, *im))
            .collect();
        ComplexMatrix::from_row_major(self.dim, flat).map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DescriptorJson {
    pub kind: String,
    pub u: MatrixJson,
    pub complement: bool,
    pub sign: i32,
}

impl From<&SymmetryDescriptor> for DescriptorJson {
    fn from(d: &SymmetryDescriptor) -> Self {
        Self {
            kind: d.kind().as_str().to_string(),
            u: d.u().into(),
            complement: d.complement(),
            sign: d.sign().as_i32(),
        }
    }
}

pub fn parse_kind(s: &str) -> Option<Kind> {
    match s {
        "unitary" => Some(Kind::Unitary),
        "antiunitary" => Some(Kind::Antiunitary),
        _ => None,
    }
}

impl DescriptorJson {
    pub fn to_descriptor(&self) -> Result<SymmetryDescriptor, String> {
        let kind = parse_kind(&self.kind).ok_or_else(|| format!("unknown kind {:?}", self.kind))?;
        let sign = Sign::from_i32(self.sign).ok_or_else(|| format!("sign must be 1 or -1, got {}", self.sign))?;
        SymmetryDescriptor::new(kind, self.u.to_matrix()?, self.complement, sign).map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AffineMapJson {
    pub dim: usize,
    pub linear: Vec<Vec<f64>>,
    pub constant: MatrixJson,
}

impl From<&AffineMapRep> for AffineMapJson {
    fn from(r: &AffineMapRep) -> Self {
        Self {
            dim: r.dim(),
            linear: r.linear_rows(),
            constant: r.constant().into(),
        }
    }
}

impl AffineMapJson {
    pub fn to_rep(&self) -> Result<AffineMapRep, String> {
        let constant = self.constant.to_matrix()?;
        if constant.dim() != self.dim {
            return Err("constant dimension differs from map dimension".into());
        }
        AffineMapRep::new(self.dim, self.linear.clone(), constant).map_err(|e| e.to_string())
    }
}

/// A map file: either form is accepted.
pub enum MapFile {
    Affine(AffineMapRep),
    Descriptor(SymmetryDescriptor),
}

impl MapFile {
    pub fn parse(text: &str) -> Result<Self, String> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| format!("malformed JSON: {e}"))?;
        let obj = value.as_object().ok_or("map file must be a JSON object")?;
        if obj.contains_key("linear") {
            let m: AffineMapJson = serde_json::from_value(value).map_err(|e| format!("bad affine map: {e}"))?;
            m.to_rep().map(MapFile::Affine)
        } else if obj.contains_key("kind") {
            let d: DescriptorJson = serde_json::from_value(value).map_err(|e| format!("bad descriptor: {e}"))?;
            d.to_descriptor().map(MapFile::Descriptor)
        } else {
            Err("map file is neither an affine map nor a descriptor".into())
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            MapFile::Affine(r) => r.dim(),
            MapFile::Descriptor(d) => d.dim(),
        }
    }
}
