//! Capacity bounds for noncoherent, time-correlated Rayleigh fading channels
//! with peak and average power constraints, at low SNR.
//!
//! All information quantities are in nats.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod continuous;
pub mod error;
pub mod fading;
pub mod mi_oracle;
pub mod onoff;
pub mod prediction;
pub mod quadrature;
pub mod single_letter;
pub mod spectral;
pub mod vector_channel;

pub use bounds::{
    asymptote_cll, asymptote_f, bound_cu, evaluate_bounds, theta_star, upper_bound_u,
    upper_bound_u_pred, BoundSet, PowerConstraints, UPred,
};
pub use continuous::{ct_capacity, ct_i, CtFadingModel};
pub use error::{Error, Result};
pub use fading::{FadingModel, ModelSpec};
pub use mi_oracle::{cll_monte_carlo, mi_monte_carlo, mi_quadrature_1d, MiEstimate, MiMethod};
pub use onoff::{lambda_convergence_report, lambda_n, ln_coefficient, optimal_duty, OnOffScheme};
pub use prediction::{
    causal_error, finite_window_error, noncausal_error, PredictionError, PredictionMode,
};
pub use single_letter::single_letter_mi_sup;
pub use spectral::{compute_i, compute_lambda_inf, compute_nu_inf, taylor_i, SpectralFunctionals};
pub use vector_channel::{mi_quadratic, InputDistribution, QuadraticMi};
