//! Curve fitting and closed-form coherence algebra.

pub mod coherence;
pub mod fits;
pub mod lm;
pub mod models;

pub use coherence::{
    combine_coherence, combine_lifetimes, error_from_t2star, estimate_scatter_lifetime, estimate_t2_doppler,
    estimate_t2_ground, extract_coherence, fit_error_law, fit_inverse_sqrt, fit_line, t2_prime_from_echo,
    t2_star_from_echo, CoherenceBudget, ErrorLawFit, LinearFit, ERROR_LAW_COEFFICIENT,
};
pub use fits::{
    extract_contrast, extract_contrast_with_frequency, fit, fit_cosine, fit_damped_cosine, fit_exponential_decay,
    fit_gaussian_decay, fit_parabola, fit_pi_train, fit_ramsey_kuhr, Contrast, FitFlag, FitModel, FitResult, XyData,
};
pub use models::{kuhr_envelope, kuhr_phase};
