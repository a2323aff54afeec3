//! Estimators and observables: correlations, spectra, reorganization energy,
//! transport efficiency, transfer time, localization and image readout.

mod correlation;
mod image;
mod localization;
mod spectrum;
mod transport;

pub use correlation::{acf, cross_covariance, sample_acf, sample_ccf, variance};
pub use image::{
    efficiency_from_intensity_image, parse_pixel_matrix, Ellipse, ImageEfficiency, Rect,
};
pub use localization::{eigen_site_distribution, ipr, EigenSiteDistribution};
pub use spectrum::{
    fit_reorganization_law, linear_fit, psd_periodogram, reorganization_energy, LinearFitResult,
    PsdScaling, SpectrumEstimate, DEFAULT_NFFT,
};
pub use transport::{
    efficiency_series, most_probable_site, sink_fraction, transfer_time, transport_efficiency,
    EfficiencyMode,
};
