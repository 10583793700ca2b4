//! Evaluable fields. Polynomial fields expose their exact form so that
//! integrals over cells can bypass quadrature.

use nalgebra::Vector3;

use super::polynomial::{PolyVector, Polynomial};

pub trait ScalarField: Sync {
    fn value(&self, x: &Vector3<f64>) -> f64;

    fn as_polynomial(&self) -> Option<&Polynomial> {
        None
    }
}

pub trait VectorField: Sync {
    fn value(&self, x: &Vector3<f64>) -> Vector3<f64>;

    fn as_polynomial(&self) -> Option<&PolyVector> {
        None
    }
}

impl ScalarField for Polynomial {
    fn value(&self, x: &Vector3<f64>) -> f64 {
        self.eval(x)
    }

    fn as_polynomial(&self) -> Option<&Polynomial> {
        Some(self)
    }
}

impl VectorField for PolyVector {
    fn value(&self, x: &Vector3<f64>) -> Vector3<f64> {
        self.eval(x)
    }

    fn as_polynomial(&self) -> Option<&PolyVector> {
        Some(self)
    }
}

/// Closure-backed field.
pub struct FnField<F>(pub F);

impl<F: Fn(&Vector3<f64>) -> f64 + Sync> ScalarField for FnField<F> {
    fn value(&self, x: &Vector3<f64>) -> f64 {
        (self.0)(x)
    }
}

impl<F: Fn(&Vector3<f64>) -> Vector3<f64> + Sync> VectorField for FnField<F> {
    fn value(&self, x: &Vector3<f64>) -> Vector3<f64> {
        (self.0)(x)
    }
}
