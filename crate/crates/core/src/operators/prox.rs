use std::fmt::Debug;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};

/// A family of resolvents `J_{tau A}` indexed by the step `tau > 0`.
///
/// For `A = ∂g` this is `prox_{tau g}`.
pub trait Resolvent: Debug + Send + Sync {
    fn apply(&self, tau: f64, point: &Vector) -> Vector;
}

/// Domain of the underlying function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    Full,
    Box,
    AffineZero,
    Custom,
}

/// Closed-form proximal maps.
#[derive(Debug, Clone, PartialEq)]
pub enum Prox {
    /// `g = 0`; the prox is the identity.
    Zero,
    /// `g(x) = weight * ||x||_1`; soft-thresholding.
    L1 { weight: f64 },
    /// Indicator of `[lo, hi]`. Bounds of length one broadcast.
    Box { lo: Vector, hi: Vector },
    /// `g(x) = ½ xᵀQx + qᵀx` with `Q` symmetric positive semidefinite.
    Quadratic { q_mat: Matrix, q_vec: Vector },
    /// Indicator of `{0}`; the prox is the constant zero map.
    ZeroSet,
}

impl Prox {
    pub fn l1(weight: f64) -> Result<Self> {
        if !(weight >= 0.0) {
            return Err(Error::Unsupported(format!("l1 weight must be nonnegative, got {weight}")));
        }
        Ok(Prox::L1 { weight })
    }

    pub fn boxed(lo: Vector, hi: Vector) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch { context: "box bounds", expected: lo.len(), found: hi.len() });
        }
        if let Some(k) = (0..lo.len()).find(|&k| lo[k] > hi[k]) {
            return Err(Error::InvertedBox(k));
        }
        Ok(Prox::Box { lo, hi })
    }

    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        Self::boxed(Vector::from_element(1, lo), Vector::from_element(1, hi))
    }

    pub fn quadratic(q_mat: Matrix, q_vec: Vector) -> Result<Self> {
        let n = q_mat.nrows();
        if q_mat.ncols() != n {
            return Err(Error::NotPositiveSemidefinite);
        }
        if q_vec.len() != n {
            return Err(Error::DimensionMismatch { context: "quadratic prox", expected: n, found: q_vec.len() });
        }
        if q_mat != q_mat.transpose() {
            return Err(Error::NotPositiveSemidefinite);
        }
        let scale = q_mat.amax().max(1.0);
        if n > 0 && q_mat.symmetric_eigenvalues().min() < -1e-12 * scale {
            return Err(Error::NotPositiveSemidefinite);
        }
        Ok(Prox::Quadratic { q_mat, q_vec })
    }

    pub fn domain(&self) -> Domain {
        match self {
            Prox::Zero | Prox::L1 { .. } | Prox::Quadratic { .. } => Domain::Full,
            Prox::Box { .. } => Domain::Box,
            Prox::ZeroSet => Domain::AffineZero,
        }
    }

    fn bound(v: &Vector, k: usize) -> f64 {
        if v.len() == 1 {
            v[0]
        } else {
            v[k]
        }
    }

    /// Function value, `+inf` outside the domain.
    pub fn value(&self, x: &Vector) -> f64 {
        match self {
            Prox::Zero => 0.0,
            Prox::L1 { weight } => weight * x.lp_norm(1),
            Prox::Box { lo, hi } => {
                let inside = x.iter().enumerate().all(|(k, &v)| v >= Self::bound(lo, k) && v <= Self::bound(hi, k));
                if inside {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            Prox::Quadratic { q_mat, q_vec } => 0.5 * x.dot(&(q_mat * x)) + q_vec.dot(x),
            Prox::ZeroSet => {
                if x.iter().all(|&v| v == 0.0) {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
        }
    }
}

impl Resolvent for Prox {
    fn apply(&self, tau: f64, point: &Vector) -> Vector {
        match self {
            Prox::Zero => point.clone(),
            Prox::L1 { weight } => {
                let t = tau * weight;
                point.map(|v| v.signum() * (v.abs() - t).max(0.0))
            }
            // indicator prox ignores tau
            Prox::Box { lo, hi } => {
                Vector::from_fn(point.len(), |k, _| point[k].clamp(Self::bound(lo, k), Self::bound(hi, k)))
            }
            Prox::Quadratic { q_mat, q_vec } => {
                let n = point.len();
                let system = Matrix::identity(n, n) + q_mat * tau;
                let rhs = point - q_vec * tau;
                system
                    .cholesky()
                    .expect("I + tau Q is positive definite for PSD Q")
                    .solve(&rhs)
            }
            Prox::ZeroSet => Vector::zeros(point.len()),
        }
    }
}

/// Closed-form prox of `sum_i g_i` when every summand has the same kind:
/// weights of `l1` add, boxes intersect, quadratics add.
pub fn sum_prox(parts: &[Prox]) -> Result<Prox> {
    let unsupported = || Error::Unsupported("no closed-form prox for this sum of functions".into());
    let Some(first) = parts.first() else {
        return Ok(Prox::Zero);
    };
    let mut acc = first.clone();
    for part in &parts[1..] {
        acc = match (acc, part) {
            (Prox::Zero, other) => other.clone(),
            (other, Prox::Zero) => other,
            (Prox::L1 { weight: a }, Prox::L1 { weight: b }) => Prox::L1 { weight: a + b },
            (Prox::Box { lo, hi }, Prox::Box { lo: lo2, hi: hi2 }) => {
                let len = lo.len().max(lo2.len());
                if lo.len() != lo2.len() && lo.len() != 1 && lo2.len() != 1 {
                    return Err(unsupported());
                }
                let lo_v = Vector::from_fn(len, |k, _| Prox::bound(&lo, k).max(Prox::bound(lo2, k)));
                let hi_v = Vector::from_fn(len, |k, _| Prox::bound(&hi, k).min(Prox::bound(hi2, k)));
                Prox::boxed(lo_v, hi_v).map_err(|_| Error::Unsupported("box intersection is empty".into()))?
            }
            (Prox::ZeroSet, Prox::ZeroSet) => Prox::ZeroSet,
            (Prox::Quadratic { q_mat, q_vec }, Prox::Quadratic { q_mat: m2, q_vec: v2 }) => {
                Prox::Quadratic { q_mat: q_mat + m2, q_vec: q_vec + v2 }
            }
            _ => return Err(unsupported()),
        };
    }
    Ok(acc)
}

/// `J_{tau (A x B)}(x, y) = (J_{tau A}(x), J_{tau B}(y))` on `R^{p+d}`.
#[derive(Debug, Clone)]
pub struct ProductResolvent {
    pub first: Arc<dyn Resolvent>,
    pub second: Arc<dyn Resolvent>,
    pub p: usize,
    pub d: usize,
}

impl ProductResolvent {
    pub fn new(first: Arc<dyn Resolvent>, second: Arc<dyn Resolvent>, p: usize, d: usize) -> Self {
        ProductResolvent { first, second, p, d }
    }

    pub fn try_apply(&self, tau: f64, point: &Vector) -> Result<Vector> {
        if point.len() != self.p + self.d {
            return Err(Error::DimensionMismatch {
                context: "product resolvent",
                expected: self.p + self.d,
                found: point.len(),
            });
        }
        let x = self.first.apply(tau, &point.rows(0, self.p).into_owned());
        let y = self.second.apply(tau, &point.rows(self.p, self.d).into_owned());
        Ok(Vector::from_iterator(self.p + self.d, x.iter().chain(y.iter()).copied()))
    }
}

impl Resolvent for ProductResolvent {
    fn apply(&self, tau: f64, point: &Vector) -> Vector {
        self.try_apply(tau, point).expect("product resolvent block dimensions")
    }
}

/// `J_{sigma C^{-1}}` obtained from a resolvent family of `C` through the
/// Moreau identity `J_{sigma C^{-1}}(y) = y - sigma J_{C / sigma}(y / sigma)`.
#[derive(Debug, Clone)]
pub struct InverseResolvent(pub Arc<dyn Resolvent>);

impl Resolvent for InverseResolvent {
    fn apply(&self, sigma: f64, point: &Vector) -> Vector {
        point - self.0.apply(1.0 / sigma, &(point / sigma)) * sigma
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(xs: &[f64]) -> Vector {
        Vector::from_column_slice(xs)
    }

    #[test]
    fn library_examples() {
        assert_eq!(Prox::l1(1.0).unwrap().apply(1.0, &v(&[3.0])), v(&[2.0]));
        assert_eq!(Prox::interval(-1.0, 1.0).unwrap().apply(5.0, &v(&[7.0])), v(&[1.0]));
        let quad = Prox::quadratic(Matrix::identity(1, 1), v(&[0.0])).unwrap();
        assert!((quad.apply(1.0, &v(&[4.0]))[0] - 2.0).abs() < 1e-15);
        assert_eq!(Prox::Zero.apply(3.0, &v(&[1.5, -2.0])), v(&[1.5, -2.0]));
        assert_eq!(Prox::ZeroSet.apply(3.0, &v(&[1.5, -2.0])), v(&[0.0, 0.0]));
    }

    #[test]
    fn library_errors() {
        assert!(matches!(Prox::interval(1.0, -1.0), Err(Error::InvertedBox(0))));
        let indefinite = Matrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert!(matches!(Prox::quadratic(indefinite, Vector::zeros(2)), Err(Error::NotPositiveSemidefinite)));
        let asym = Matrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]);
        assert!(Prox::quadratic(asym, Vector::zeros(2)).is_err());
    }

    #[test]
    fn product_resolvent_examples() {
        let pr = ProductResolvent::new(
            Arc::new(Prox::l1(1.0).unwrap()),
            Arc::new(Prox::interval(-1.0, 1.0).unwrap()),
            1,
            1,
        );
        assert_eq!(pr.apply(1.0, &v(&[3.0, 7.0])), v(&[2.0, 1.0]));
        assert!(pr.try_apply(1.0, &v(&[1.0, 2.0, 3.0])).is_err());

        let id = ProductResolvent::new(Arc::new(Prox::Zero), Arc::new(Prox::Zero), 2, 1);
        assert_eq!(id.apply(0.3, &v(&[1.0, 2.0, 3.0])), v(&[1.0, 2.0, 3.0]));

        let pin = ProductResolvent::new(Arc::new(Prox::ZeroSet), Arc::new(Prox::Zero), 1, 1);
        assert_eq!(pin.apply(0.3, &v(&[5.0, 2.0])), v(&[0.0, 2.0]));
    }

    #[test]
    fn sum_prox_rules() {
        let s = sum_prox(&[Prox::l1(0.5).unwrap(), Prox::l1(0.25).unwrap()]).unwrap();
        assert_eq!(s, Prox::L1 { weight: 0.75 });
        let s = sum_prox(&[Prox::interval(-1.0, 2.0).unwrap(), Prox::interval(0.0, 3.0).unwrap()]).unwrap();
        assert_eq!(s, Prox::Box { lo: v(&[0.0]), hi: v(&[2.0]) });
        assert!(sum_prox(&[Prox::l1(1.0).unwrap(), Prox::interval(0.0, 1.0).unwrap()]).is_err());
        assert_eq!(sum_prox(&[]).unwrap(), Prox::Zero);
    }

    #[test]
    fn inverse_resolvent_moreau() {
        // C = ∂(λ|.|): C^{-1} is the normal cone of [-λ, λ], so J_{σC^{-1}} is a clamp.
        let inv = InverseResolvent(Arc::new(Prox::l1(0.7).unwrap()));
        let y = v(&[2.0, -0.3, -5.0]);
        let out = inv.apply(2.5, &y);
        for k in 0..3 {
            assert!((out[k] - y[k].clamp(-0.7, 0.7)).abs() < 1e-14);
        }
        // C = N_{0}: J_{σC^{-1}} is the identity.
        let inv = InverseResolvent(Arc::new(Prox::ZeroSet));
        assert_eq!(inv.apply(0.4, &y), y);
    }

    fn arb_vec(n: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-10.0f64..10.0, n)
    }

    fn library() -> Vec<Prox> {
        let q = Matrix::from_row_slice(3, 3, &[2.0, 0.5, 0.0, 0.5, 1.0, 0.2, 0.0, 0.2, 0.5]);
        vec![
            Prox::Zero,
            Prox::l1(0.8).unwrap(),
            Prox::boxed(v(&[-1.0, 0.0, -2.0]), v(&[1.0, 0.5, 3.0])).unwrap(),
            Prox::quadratic(q, v(&[0.3, -0.1, 1.0])).unwrap(),
            Prox::ZeroSet,
        ]
    }

    proptest! {
        #[test]
        fn prox_is_firmly_nonexpansive(a in arb_vec(3), b in arb_vec(3), tau in 0.01f64..5.0) {
            let (a, b) = (v(&a), v(&b));
            for prox in library() {
                let (pa, pb) = (prox.apply(tau, &a), prox.apply(tau, &b));
                let diff = &pa - &pb;
                prop_assert!(diff.norm_squared() <= diff.dot(&(&a - &b)) + 1e-9);
            }
        }

        #[test]
        fn prox_satisfies_subgradient_inclusion(a in arb_vec(3), tau in 0.01f64..5.0) {
            let a = v(&a);
            let lib = library();
            // l1: (a - p)/tau ∈ weight * ∂|p|
            let p = lib[1].apply(tau, &a);
            for k in 0..3 {
                let g = (a[k] - p[k]) / tau;
                if p[k] != 0.0 {
                    prop_assert!((g - 0.8 * p[k].signum()).abs() <= 1e-9);
                } else {
                    prop_assert!(g.abs() <= 0.8 + 1e-9);
                }
            }
            // box: (a - p)/tau in the normal cone at p
            let p = lib[2].apply(tau, &a);
            if let Prox::Box { lo, hi } = &lib[2] {
                for k in 0..3 {
                    let g = (a[k] - p[k]) / tau;
                    if p[k] > lo[k] && p[k] < hi[k] {
                        prop_assert!(g.abs() <= 1e-9);
                    } else if p[k] == hi[k] && p[k] > lo[k] {
                        prop_assert!(g >= -1e-9);
                    } else if p[k] == lo[k] && p[k] < hi[k] {
                        prop_assert!(g <= 1e-9);
                    }
                }
            }
            // quadratic: (a - p)/tau = Qp + q
            let p = lib[3].apply(tau, &a);
            if let Prox::Quadratic { q_mat, q_vec } = &lib[3] {
                let resid = (&a - &p) / tau - (q_mat * &p + q_vec);
                prop_assert!(resid.amax() <= 1e-9 * (1.0 + a.amax()));
            }
        }
    }
}
