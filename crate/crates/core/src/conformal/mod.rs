//! Special functions, quadrature, and the quadrilateral conformal map.

pub mod hypergeometric;
pub mod quadrature;
pub mod quadrilateral;

pub use hypergeometric::{hyp2f1, hyp2f1_euler, hyp2f1_series};
pub use quadrature::{integrate, QuadOptions, QuadResult};
pub use quadrilateral::{QuadParams, QuadrilateralMap};
