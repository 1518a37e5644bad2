//! Deterministic numerical kernels: adaptive quadrature, Gaussian tail
//! functions, the interference constant and scalar root finding.

mod quadrature;
mod roots;
mod special;

pub use quadrature::{integrate, Integral, QuadratureSpec};
pub use roots::{bisect_root, find_root_quadratic, QuadraticRoots};
pub use special::{gaussian_cdf, gaussian_q, interference_constant};
