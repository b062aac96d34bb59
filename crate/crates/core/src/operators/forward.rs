use std::fmt::Debug;
use std::sync::Arc;

use super::SmoothCoupling;
use crate::linalg::{spectral_norm, Matrix, Vector};

/// Single-valued monotone `L`-Lipschitz operator.
pub trait ForwardOperator: Debug + Send + Sync {
    fn apply(&self, z: &Vector) -> Vector;
    fn lipschitz(&self) -> f64;
}

#[derive(Debug, Clone, Copy)]
pub struct ZeroForward;

impl ForwardOperator for ZeroForward {
    fn apply(&self, z: &Vector) -> Vector {
        Vector::zeros(z.len())
    }

    fn lipschitz(&self) -> f64 {
        0.0
    }
}

/// `z -> S z + c`. Monotone iff the symmetric part of `S` is PSD.
#[derive(Debug, Clone)]
pub struct LinearForward {
    matrix: Matrix,
    offset: Vector,
    lipschitz: f64,
}

impl LinearForward {
    pub fn new(matrix: Matrix, offset: Vector) -> Self {
        let lipschitz = spectral_norm(&matrix);
        LinearForward { matrix, offset, lipschitz }
    }

    pub fn scaled_identity(n: usize, scale: f64) -> Self {
        Self::new(Matrix::identity(n, n) * scale, Vector::zeros(n))
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }
}

impl ForwardOperator for LinearForward {
    fn apply(&self, z: &Vector) -> Vector {
        &self.matrix * z + &self.offset
    }

    fn lipschitz(&self) -> f64 {
        self.lipschitz
    }
}

/// Saddle operator `B(x, y) = (∇ₓφ(x, y), −∇ᵧφ(x, y))` on `R^{p+d}`.
#[derive(Debug, Clone)]
pub struct SaddleForward {
    coupling: Arc<SmoothCoupling>,
}

impl SaddleForward {
    pub fn new(coupling: Arc<SmoothCoupling>) -> Self {
        SaddleForward { coupling }
    }

    pub fn coupling(&self) -> &SmoothCoupling {
        &self.coupling
    }

    /// Split `z` into its `(x, y)` blocks.
    pub fn split(&self, z: &Vector) -> (Vector, Vector) {
        let p = self.coupling.p();
        (z.rows(0, p).into_owned(), z.rows(p, self.coupling.d()).into_owned())
    }
}

impl ForwardOperator for SaddleForward {
    fn apply(&self, z: &Vector) -> Vector {
        let (x, y) = self.split(z);
        let gx = self.coupling.grad_x(&x, &y);
        let gy = self.coupling.grad_y(&x, &y);
        Vector::from_iterator(z.len(), gx.iter().copied().chain(gy.iter().map(|v| -v)))
    }

    fn lipschitz(&self) -> f64 {
        self.coupling.lipschitz()
    }
}
