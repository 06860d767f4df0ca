//! Published fit parameters of the `Q(σ̄)` response curves, used to annotate
//! `fit` output and by the acceptance suite.

use bv_noise::FitModel;

use crate::config::Family;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceFit {
    pub family: Family,
    pub n: usize,
    pub model: FitModel,
    /// `(a, b, c, d)`.
    pub params: [f64; 4],
    pub rms_error: f64,
}

const fn row(family: Family, n: usize, model: FitModel, params: [f64; 4], rms_error: f64) -> ReferenceFit {
    ReferenceFit {
        family,
        n,
        model,
        params,
        rms_error,
    }
}

pub const REFERENCE_FITS: [ReferenceFit; 12] = [
    row(Family::Uniform, 1, FitModel::GaussOnly, [0.59, 1.8, 0.0, 0.41], 0.0023),
    row(Family::Uniform, 2, FitModel::GaussOnly, [0.79, 2.6, 0.0, 0.19], 0.0046),
    row(Family::Uniform, 10, FitModel::GaussOnly, [0.99, 10.0, 0.0, 0.0], 0.0059),
    row(Family::Gaussian, 1, FitModel::GaussQuad, [0.19, 4.3, -0.31, 0.80], 0.0012),
    row(Family::Gaussian, 2, FitModel::GaussQuad, [0.43, 4.4, -0.33, 0.57], 0.0018),
    row(Family::Gaussian, 10, FitModel::GaussQuad, [0.95, 10.0, -0.052, 0.046], 0.0045),
    row(Family::Cauchy, 1, FitModel::GaussQuad, [0.25, 2.5, -0.27, 0.75], 0.00056),
    row(Family::Cauchy, 2, FitModel::GaussQuad, [0.52, 2.9, -0.26, 0.47], 0.0012),
    row(Family::Cauchy, 10, FitModel::GaussQuad, [0.95, 9.3, -0.044, 0.030], 0.0044),
    row(Family::Discrete, 1, FitModel::GaussQuad, [0.46, 5.5, -0.58, 0.52], 0.017),
    row(Family::Discrete, 2, FitModel::GaussQuad, [0.82, 7.6, -0.20, 0.16], 0.014),
    row(Family::Discrete, 10, FitModel::GaussPure, [0.99, 35.4, 0.0, 0.0], 0.0035),
];

pub fn reference_fit(family: Family, n: usize) -> Option<&'static ReferenceFit> {
    REFERENCE_FITS.iter().find(|r| r.family == family && r.n == n)
}

/// The model form used for `(family, n)` when none is requested.
pub fn default_fit_model(family: Family, n: usize) -> FitModel {
    match reference_fit(family, n) {
        Some(r) => r.model,
        None => match family {
            Family::Uniform => FitModel::GaussOnly,
            _ => FitModel::GaussQuad,
        },
    }
}
