use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};

/// Convex-concave quadratic coupling
///
/// `φ(x, y) = ½ xᵀPx + xᵀMy − ½ yᵀRy + aᵀx − bᵀy`
///
/// with `P, R ⪰ 0`. The bilinear family is `P = R = 0`. The Lipschitz
/// constant of `∇φ` is the spectral norm of the joint Hessian
/// `[[P, M], [Mᵀ, −R]]`, which for the bilinear family is `‖M‖`.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothCoupling {
    p_mat: Matrix,
    m: Matrix,
    r_mat: Matrix,
    a: Vector,
    b: Vector,
    lipschitz: f64,
}

impl SmoothCoupling {
    pub fn bilinear(m: Matrix, a: Vector, b: Vector) -> Result<Self> {
        let (p, d) = m.shape();
        Self::new(Matrix::zeros(p, p), m, Matrix::zeros(d, d), a, b)
    }

    pub fn quadratic(p_mat: Matrix, m: Matrix, r_mat: Matrix) -> Result<Self> {
        let (p, d) = m.shape();
        Self::new(p_mat, m, r_mat, Vector::zeros(p), Vector::zeros(d))
    }

    /// Identically zero coupling on `R^p x R^d`.
    pub fn zero(p: usize, d: usize) -> Self {
        Self::bilinear(Matrix::zeros(p, d), Vector::zeros(p), Vector::zeros(d)).expect("zero coupling")
    }

    pub fn new(p_mat: Matrix, m: Matrix, r_mat: Matrix, a: Vector, b: Vector) -> Result<Self> {
        let (p, d) = m.shape();
        let check = |context, expected, found| {
            if expected == found {
                Ok(())
            } else {
                Err(Error::DimensionMismatch { context, expected, found })
            }
        };
        check("coupling P rows", p, p_mat.nrows())?;
        check("coupling P cols", p, p_mat.ncols())?;
        check("coupling R rows", d, r_mat.nrows())?;
        check("coupling R cols", d, r_mat.ncols())?;
        check("coupling a", p, a.len())?;
        check("coupling b", d, b.len())?;
        for mat in [&p_mat, &r_mat] {
            if mat != &mat.transpose() {
                return Err(Error::NotPositiveSemidefinite);
            }
            if !mat.is_empty() && mat.symmetric_eigenvalues().min() < -1e-12 * mat.amax().max(1.0) {
                return Err(Error::NotPositiveSemidefinite);
            }
        }
        let mut hessian = Matrix::zeros(p + d, p + d);
        hessian.view_mut((0, 0), (p, p)).copy_from(&p_mat);
        hessian.view_mut((0, p), (p, d)).copy_from(&m);
        hessian.view_mut((p, 0), (d, p)).copy_from(&m.transpose());
        hessian.view_mut((p, p), (d, d)).copy_from(&(-&r_mat));
        let lipschitz = if p + d == 0 { 0.0 } else { hessian.symmetric_eigenvalues().amax() };
        Ok(SmoothCoupling { p_mat, m, r_mat, a, b, lipschitz })
    }

    pub fn p(&self) -> usize {
        self.m.nrows()
    }

    pub fn d(&self) -> usize {
        self.m.ncols()
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    pub fn coupling_matrix(&self) -> &Matrix {
        &self.m
    }

    pub fn linear_terms(&self) -> (&Vector, &Vector) {
        (&self.a, &self.b)
    }

    pub fn curvature(&self) -> (&Matrix, &Matrix) {
        (&self.p_mat, &self.r_mat)
    }

    pub fn value(&self, x: &Vector, y: &Vector) -> f64 {
        0.5 * x.dot(&(&self.p_mat * x)) + x.dot(&(&self.m * y)) - 0.5 * y.dot(&(&self.r_mat * y)) + self.a.dot(x)
            - self.b.dot(y)
    }

    pub fn grad_x(&self, x: &Vector, y: &Vector) -> Vector {
        &self.p_mat * x + &self.m * y + &self.a
    }

    pub fn grad_y(&self, x: &Vector, y: &Vector) -> Vector {
        self.m.tr_mul(x) - &self.r_mat * y - &self.b
    }

    /// Sum of couplings (all must share `p` and `d`).
    pub fn sum<'a>(parts: impl IntoIterator<Item = &'a SmoothCoupling>) -> Result<Self> {
        let mut iter = parts.into_iter();
        let first = iter.next().ok_or_else(|| Error::Unsupported("empty coupling sum".into()))?;
        let (mut pm, mut m, mut rm, mut a, mut b) =
            (first.p_mat.clone(), first.m.clone(), first.r_mat.clone(), first.a.clone(), first.b.clone());
        for c in iter {
            if c.m.shape() != m.shape() {
                return Err(Error::DimensionMismatch { context: "coupling sum", expected: m.nrows(), found: c.p() });
            }
            pm += &c.p_mat;
            m += &c.m;
            rm += &c.r_mat;
            a += &c.a;
            b += &c.b;
        }
        Self::new(pm, m, rm, a, b)
    }
}
