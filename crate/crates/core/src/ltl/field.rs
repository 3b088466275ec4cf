use std::ops::Deref;

use super::{OperatorError, Vec2};
use crate::mesh::Vec3;

/// One finite value per mesh vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexScalarField(Vec<f64>);

impl VertexScalarField {
    pub fn new(values: Vec<f64>, n_vertices: usize) -> Result<Self, OperatorError> {
        check_field(&values, n_vertices)?;
        Ok(Self(values))
    }

    pub(crate) fn from_vec(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for VertexScalarField {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// A tangent vector per vertex, stored both as `(a, b)` coefficients in the
/// vertex frame and as the ambient vector `a·e1 + b·e2`.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexTangentField {
    pub coeffs: Vec<Vec2>,
    pub ambient: Vec<Vec3>,
}

impl VertexTangentField {
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }
}

pub(crate) fn check_field(values: &[f64], n_vertices: usize) -> Result<(), OperatorError> {
    if values.len() != n_vertices {
        return Err(OperatorError::FieldLength {
            expected: n_vertices,
            got: values.len(),
        });
    }
    if let Some(vertex) = values.iter().position(|x| !x.is_finite()) {
        return Err(OperatorError::NonFiniteField { vertex });
    }
    Ok(())
}
