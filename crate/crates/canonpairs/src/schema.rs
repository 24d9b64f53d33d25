//! File formats for operators, states, measurement families and dilations.
//! Complex arrays are stored as separate real and imaginary grids so the
//! files stay readable from any language.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{DomainSpec, LinearOperator, StateVector};
use crate::measure::{
    ElementOp, FamilyKind, MeasureElement, MeasureFamily, NeumarkDilation, OutcomeLabel,
};

fn matrix_parts(m: &DMatrix<Complex64>) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let re = (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)].re).collect())
        .collect();
    let im = (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)].im).collect())
        .collect();
    (re, im)
}

fn parts_matrix(re: &[Vec<f64>], im: &[Vec<f64>]) -> Result<DMatrix<Complex64>> {
    let rows = re.len();
    if rows == 0 {
        return Err(Error::InvalidParameter("empty matrix".into()));
    }
    let cols = re[0].len();
    if im.len() != rows
        || re.iter().any(|r| r.len() != cols)
        || im.iter().any(|r| r.len() != cols)
    {
        return Err(Error::InvalidParameter("ragged or mismatched re/im grids".into()));
    }
    Ok(DMatrix::from_fn(rows, cols, |i, j| Complex64::new(re[i][j], im[i][j])))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OperatorFile {
    pub domain: DomainSpec,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl OperatorFile {
    pub fn from_operator(op: &LinearOperator) -> Self {
        let (re, im) = matrix_parts(&op.matrix);
        OperatorFile { domain: op.domain.clone(), re, im }
    }

    pub fn to_operator(&self) -> Result<LinearOperator> {
        let m = parts_matrix(&self.re, &self.im)?;
        if m.nrows() != m.ncols() {
            return Err(Error::InvalidParameter("operator matrix must be square".into()));
        }
        LinearOperator::new(self.domain.clone(), m)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateFile {
    pub domain: DomainSpec,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl StateFile {
    pub fn from_state(psi: &StateVector) -> Self {
        StateFile {
            domain: psi.domain.clone(),
            re: psi.amplitudes.iter().map(|a| a.re).collect(),
            im: psi.amplitudes.iter().map(|a| a.im).collect(),
        }
    }

    pub fn to_state(&self) -> Result<StateVector> {
        if self.re.len() != self.im.len() {
            return Err(Error::InvalidParameter("mismatched re/im lengths".into()));
        }
        let v = DVector::from_fn(self.re.len(), |i, _| Complex64::new(self.re[i], self.im[i]));
        StateVector::new(self.domain.clone(), v)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FamilyElementFile {
    pub label: OutcomeLabel,
    pub weight: f64,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FamilyFile {
    pub domain: DomainSpec,
    /// "general" or "complete_on_subspace"
    pub kind: String,
    pub elements: Vec<FamilyElementFile>,
}

impl FamilyFile {
    pub fn from_family(family: &MeasureFamily) -> Self {
        let kind = match family.kind {
            FamilyKind::General => "general",
            FamilyKind::CompleteOnSubspace => "complete_on_subspace",
        };
        let elements = family
            .elements
            .iter()
            .map(|e| {
                let (re, im) = matrix_parts(&e.op.to_dense());
                FamilyElementFile { label: e.label.clone(), weight: e.weight, re, im }
            })
            .collect();
        FamilyFile { domain: family.domain.clone(), kind: kind.to_string(), elements }
    }

    pub fn to_family(&self) -> Result<MeasureFamily> {
        let kind = match self.kind.as_str() {
            "general" => FamilyKind::General,
            "complete_on_subspace" => FamilyKind::CompleteOnSubspace,
            other => {
                return Err(Error::InvalidFamily(format!("unknown family kind '{other}'")))
            }
        };
        let elements = self
            .elements
            .iter()
            .map(|e| {
                let m = parts_matrix(&e.re, &e.im)?;
                if m.nrows() != m.ncols() {
                    return Err(Error::InvalidFamily("element matrix must be square".into()));
                }
                Ok(MeasureElement {
                    label: e.label.clone(),
                    weight: e.weight,
                    op: ElementOp::Dense(m),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        MeasureFamily::new(self.domain.clone(), elements, kind)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixFile {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixFile {
    pub fn from_matrix(m: &DMatrix<Complex64>) -> Self {
        let (re, im) = matrix_parts(m);
        MatrixFile { re, im }
    }

    pub fn to_matrix(&self) -> Result<DMatrix<Complex64>> {
        parts_matrix(&self.re, &self.im)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DilationFile {
    /// n_outcomes x d embedding whose columns are orthonormal
    pub isometry: MatrixFile,
    /// completion of the isometry to the outcome space
    pub unitary: MatrixFile,
    pub reconstruction_deviation: f64,
}

impl DilationFile {
    pub fn from_dilation(d: &NeumarkDilation) -> Self {
        DilationFile {
            isometry: MatrixFile::from_matrix(&d.isometry),
            unitary: MatrixFile::from_matrix(&d.unitary),
            reconstruction_deviation: d.reconstruction_deviation,
        }
    }
}
