//! Vectorial paraxial propagation of light beams through uniaxial phase
//! plates whose optical-axis orientation winds azimuthally (q-plates), with
//! spin and orbital angular-momentum accounting.
//!
//! All lengths are expressed in vacuum wavelengths, so the vacuum wavenumber
//! is exactly `2*pi` and half-wave thicknesses are the pure numbers
//! `(2m+1) / (2 |n_o - n_e|)`.
//!
//! Module map:
//! - [`grid`]: sampling grids, fields, quadrature, spectral derivatives;
//! - [`modes`]: Laguerre-Gaussian modes and polarized input beams;
//! - [`media`]: uniaxial dispersion relations and the homogeneous propagator;
//! - [`qplate`]: the space-variant-axis plate and its propagation kernels;
//! - [`observables`]: angular momenta per unit energy and closed-form changes;
//! - [`io`]: the QPSF binary field-dump format.

pub mod error;
pub mod fft2;
pub mod grid;
pub mod io;
pub mod jones;
pub mod media;
pub mod modes;
pub mod observables;
pub mod qplate;

pub use error::{Error, Result};
pub use grid::{quad_integral, spectral_derivative, Axis2, Grid, ScalarField, VectorField};
pub use jones::Jones2;
pub use media::{DispersionModel, UniaxialMedium, K0};
pub use modes::{lg_mode, make_input_field, spin_degree, BeamSpec, JonesVector, LgIndex};
pub use observables::{
    am_budget, am_report, delta_l_closed, delta_s_closed, orbital_am, spin_am, AmBudget, AmReport,
    DeltaPrediction, SpinMethod,
};
pub use qplate::{
    local_flip_matrix, thin_element_apply, ConvForm, KernelMode, PropagationOptions, QPlateSpec,
};
