//! Observables: vortex charge, the exponential integral and the
//! frozen-excitation loss law.

pub mod loss;
pub mod quadrature;
pub mod special;
pub mod winding;

pub use loss::{
    loss_curve, loss_ratio_analytic, loss_ratio_from_fields, loss_ratio_numeric, write_loss_curve_csv,
    LossCurveRow, LossQuery,
};
pub use quadrature::{integrate, Integral, Tolerance};
pub use special::{exponential_integral_ei, scaled_e1};
pub use winding::{ring_radius, winding_number};
