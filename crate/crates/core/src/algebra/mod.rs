//! Pointwise exterior algebra on the 11-dimensional Lorentzian product.

pub mod blade;
pub mod oracle;
pub mod point_form;

pub use blade::{FormBasisIndex, MetricSignature, DIM};
pub use oracle::permutation_sign_oracle;
pub use point_form::{hodge_star, interior_time, minkowski_pairing, volume, wedge, PointForm};
