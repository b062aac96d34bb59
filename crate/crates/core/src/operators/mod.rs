//! Building blocks shared by every solver: resolvents (proximal maps),
//! smooth convex-concave couplings and the monotone forward operators they
//! induce.

mod coupling;
mod forward;
mod norm;
mod prox;

pub use coupling::SmoothCoupling;
pub use forward::{ForwardOperator, LinearForward, SaddleForward, ZeroForward};
pub use norm::estimate_operator_norm;
pub use prox::{sum_prox, Domain, InverseResolvent, ProductResolvent, Prox, Resolvent};
