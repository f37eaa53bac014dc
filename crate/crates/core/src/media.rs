//! Uniaxial medium parameters, exact plane-wave dispersion relations, and the
//! homogeneous (space-constant axis angle) angular-spectrum propagator.
//!
//! The optical axis lies in the transverse plane, so there is no walk-off and
//! absorption is neglected. Evanescent spectral components are kept with their
//! decaying exponentials rather than truncated; at paraxial scales they are
//! negligible, but the operator stays well defined on any grid.

use crate::error::{Error, Result};
use crate::fft2;
use crate::grid::VectorField;
use crate::jones::Jones2;
use crate::qplate::local_flip_matrix;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Vacuum wavenumber: all lengths are in vacuum-wavelength units, so `k0 = 2*pi`.
pub const K0: f64 = 2.0 * PI;

/// Uniaxial slab: ordinary/extraordinary indices and thickness (in wavelengths).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UniaxialMedium {
    n_o: f64,
    n_e: f64,
    d: f64,
}

impl UniaxialMedium {
    pub fn new(n_o: f64, n_e: f64, d: f64) -> Result<UniaxialMedium> {
        if !(n_o > 0.0 && n_o.is_finite() && n_e > 0.0 && n_e.is_finite()) {
            return Err(Error::BadIndices { no: n_o, ne: n_e });
        }
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::BadThickness(d));
        }
        Ok(UniaxialMedium { n_o, n_e, d })
    }

    pub fn n_o(&self) -> f64 {
        self.n_o
    }

    pub fn n_e(&self) -> f64 {
        self.n_e
    }

    pub fn thickness(&self) -> f64 {
        self.d
    }

    /// Ordinary Fresnel chirp rate `k0 n_o / (2 d)`.
    pub fn beta_o(&self) -> f64 {
        K0 * self.n_o / (2.0 * self.d)
    }

    /// Extraordinary Fresnel chirp rate `k0 (n_o^2 + n_e^2) / (4 n_e d)`.
    pub fn beta_e(&self) -> f64 {
        K0 * (self.n_o * self.n_o + self.n_e * self.n_e) / (4.0 * self.n_e * self.d)
    }

    /// Astigmatic chirp rate `k0 (n_o^2 - n_e^2) / (4 n_e d)`.
    pub fn delta_beta_e(&self) -> f64 {
        K0 * (self.n_o * self.n_o - self.n_e * self.n_e) / (4.0 * self.n_e * self.d)
    }

    /// `beta_o / beta_e = 2 n_o n_e / (n_o^2 + n_e^2)`, always in (0, 1].
    pub fn beta_ratio(&self) -> f64 {
        2.0 * self.n_o * self.n_e / (self.n_o * self.n_o + self.n_e * self.n_e)
    }

    /// `|delta_beta_e| / beta_e`; the approximated extraordinary kernel is
    /// trustworthy when this is small (warn above 0.1).
    pub fn kernel_approx_ratio(&self) -> f64 {
        (self.delta_beta_e() / self.beta_e()).abs()
    }

    /// Retardation phase `k0 |n_o - n_e| d`.
    pub fn retardation(&self) -> f64 {
        K0 * (self.n_o - self.n_e).abs() * self.d
    }

    /// Thickness of the m-th half-wave maximum, `(2m+1) / (2 |n_o - n_e|)`.
    /// Returns None for isotropic media.
    pub fn half_wave_thickness(&self, m: u32) -> Option<f64> {
        let dn = (self.n_o - self.n_e).abs();
        if dn == 0.0 {
            None
        } else {
            Some((2.0 * m as f64 + 1.0) / (2.0 * dn))
        }
    }
}

/// Dispersion handling for the homogeneous propagator: exact square roots, or
/// their second-order (paraxial) Taylor expansion for A/B comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DispersionModel {
    Exact,
    Paraxial,
}

/// Ordinary axial wavenumber `sqrt(k0^2 n_o^2 - q^2)`, principal branch:
/// real in the propagating cone, positive-imaginary (evanescent) outside.
pub fn kz_ordinary(qx: f64, qy: f64, m: &UniaxialMedium) -> Complex64 {
    let arg = K0 * K0 * m.n_o * m.n_o - qx * qx - qy * qy;
    Complex64::new(arg, 0.0).sqrt()
}

/// Extraordinary axial wavenumber for axis angle `alpha`:
/// `sqrt(k0^2 n_e^2 - q_par^2 n_e^2/n_o^2 - q_perp^2)` with `q_par`, `q_perp`
/// the wavevector components along and across the optical axis.
pub fn kz_extraordinary(qx: f64, qy: f64, alpha: f64, m: &UniaxialMedium) -> Complex64 {
    let (s, c) = alpha.sin_cos();
    let q_par = qx * c + qy * s;
    let q_perp = qx * s - qy * c;
    let arg = K0 * K0 * m.n_e * m.n_e - q_par * q_par * (m.n_e * m.n_e) / (m.n_o * m.n_o)
        - q_perp * q_perp;
    Complex64::new(arg, 0.0).sqrt()
}

fn kz_pair(qx: f64, qy: f64, alpha: f64, m: &UniaxialMedium, model: DispersionModel) -> (Complex64, Complex64) {
    match model {
        DispersionModel::Exact => (
            kz_ordinary(qx, qy, m),
            kz_extraordinary(qx, qy, alpha, m),
        ),
        DispersionModel::Paraxial => {
            let q2 = qx * qx + qy * qy;
            let (s, c) = alpha.sin_cos();
            let q_par = qx * c + qy * s;
            let q_perp = qx * s - qy * c;
            let ko = K0 * m.n_o - q2 / (2.0 * K0 * m.n_o);
            let ke = K0 * m.n_e
                - (q_par * q_par * (m.n_e * m.n_e) / (m.n_o * m.n_o) + q_perp * q_perp)
                    / (2.0 * K0 * m.n_e);
            (Complex64::new(ko, 0.0), Complex64::new(ke, 0.0))
        }
    }
}

/// The 2x2 spectral propagator for a homogeneous slab with axis angle `alpha`:
/// `(e^{i k_ez z} + e^{i k_oz z})/2 * I + (e^{i k_ez z} - e^{i k_oz z})/2 * M(alpha)`.
/// Unitary whenever both axial wavenumbers are real.
pub fn homogeneous_propagator(
    qx: f64,
    qy: f64,
    alpha: f64,
    z: f64,
    m: &UniaxialMedium,
    model: DispersionModel,
) -> Jones2 {
    let (koz, kez) = kz_pair(qx, qy, alpha, m, model);
    let eo = (Complex64::i() * koz * z).exp();
    let ee = (Complex64::i() * kez * z).exp();
    let half = Complex64::new(0.5, 0.0);
    let sym = half * (ee + eo);
    let dif = half * (ee - eo);
    Jones2::identity()
        .scale(sym)
        .add(&local_flip_matrix(alpha).scale(dif))
}

/// Propagate a sampled field a distance `z` through the homogeneous medium:
/// forward FFT, per-sample application of the spectral propagator, inverse FFT.
pub fn propagate_homogeneous(
    f: &VectorField,
    alpha: f64,
    z: f64,
    m: &UniaxialMedium,
    model: DispersionModel,
) -> VectorField {
    let grid = f.grid();
    let mut vx = f.vx().clone();
    let mut vy = f.vy().clone();
    fft2::fft2_forward(&mut vx);
    fft2::fft2_forward(&mut vy);
    let n = grid.n();
    let freqs = grid.freqs();
    let (sa, ca) = (2.0 * alpha).sin_cos();
    for iy in 0..n {
        let qy = freqs[iy];
        for ix in 0..n {
            let qx = freqs[ix];
            let (koz, kez) = kz_pair(qx, qy, alpha, m, model);
            let eo = (Complex64::i() * koz * z).exp();
            let ee = (Complex64::i() * kez * z).exp();
            let sym = 0.5 * (ee + eo);
            let dif = 0.5 * (ee - eo);
            let x = vx[[iy, ix]];
            let y = vy[[iy, ix]];
            vx[[iy, ix]] = sym * x + dif * (ca * x + sa * y);
            vy[[iy, ix]] = sym * y + dif * (sa * x - ca * y);
        }
    }
    fft2::fft2_inverse(&mut vx);
    fft2::fft2_inverse(&mut vy);
    VectorField::from_components(grid, vx, vy).expect("shape preserved")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::modes::{make_input_field, BeamSpec, JonesVector, LgIndex};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn medium(n_o: f64, n_e: f64, d: f64) -> UniaxialMedium {
        UniaxialMedium::new(n_o, n_e, d).unwrap()
    }

    #[test]
    fn constructor_validates_parameters() {
        assert!(UniaxialMedium::new(0.0, 1.5, 1.0).is_err());
        assert!(UniaxialMedium::new(1.5, -1.0, 1.0).is_err());
        assert!(UniaxialMedium::new(1.5, 1.7, 0.0).is_err());
        assert!(UniaxialMedium::new(1.5, 1.7, f64::INFINITY).is_err());
    }

    #[test]
    fn derived_rates_match_their_definitions() {
        let m = medium(1.5, 1.7, 2.5);
        assert_abs_diff_eq!(m.beta_o(), K0 * 1.5 / 5.0, epsilon = 1e-14);
        assert_abs_diff_eq!(m.beta_e(), K0 * (2.25 + 2.89) / (4.0 * 1.7 * 2.5), epsilon = 1e-14);
        assert_abs_diff_eq!(m.delta_beta_e(), K0 * (2.25 - 2.89) / (4.0 * 1.7 * 2.5), epsilon = 1e-14);
        assert_abs_diff_eq!(m.half_wave_thickness(0).unwrap(), 2.5, epsilon = 1e-14);
        assert_abs_diff_eq!(m.half_wave_thickness(1).unwrap(), 7.5, epsilon = 1e-14);
    }

    #[test]
    fn kz_ordinary_reference_points() {
        let m = medium(1.5, 1.7, 1.0);
        let k = kz_ordinary(0.0, 0.0, &m);
        assert_abs_diff_eq!(k.re, K0 * 1.5, epsilon = 1e-12);
        assert_abs_diff_eq!(k.im, 0.0);
        // on the light cone
        let edge = kz_ordinary(K0 * 1.5, 0.0, &m);
        assert_abs_diff_eq!(edge.norm(), 0.0, epsilon = 1e-6);
        // |q| = 0.1 k0 with n_o = 1.5: sqrt(2.25 - 0.01) k0
        let k = kz_ordinary(0.1 * K0, 0.0, &m);
        assert_abs_diff_eq!(k.re, K0 * 2.24_f64.sqrt(), epsilon = 1e-12);
        // evanescent outside the cone: positive imaginary part
        let ev = kz_ordinary(2.0 * K0, 0.0, &m);
        assert_abs_diff_eq!(ev.re, 0.0);
        assert!(ev.im > 0.0);
    }

    #[test]
    fn kz_extraordinary_reference_points() {
        let m = medium(1.5, 1.7, 1.0);
        for alpha in [0.0, 0.4, -1.2, PI] {
            let k = kz_extraordinary(0.0, 0.0, alpha, &m);
            assert_abs_diff_eq!(k.re, K0 * 1.7, epsilon = 1e-12);
        }
        // isotropic degeneracy
        let iso = medium(1.5, 1.5, 1.0);
        for (qx, qy, alpha) in [(0.3, -0.8, 0.0), (2.0, 1.0, 0.7), (9.0, 0.1, -2.0)] {
            let ke = kz_extraordinary(qx, qy, alpha, &iso);
            let ko = kz_ordinary(qx, qy, &iso);
            assert!((ke - ko).norm() < 1e-10);
        }
        // on-axis transverse wavevector with alpha = 0
        let qx = 0.7;
        let k = kz_extraordinary(qx, 0.0, 0.0, &m);
        let expected = (K0 * K0 * 1.7 * 1.7 - qx * qx * (1.7 * 1.7) / (1.5 * 1.5)).sqrt();
        assert_abs_diff_eq!(k.re, expected, epsilon = 1e-12);
    }

    #[test]
    fn propagator_is_identity_at_zero_distance() {
        let m = medium(1.5, 1.7, 1.0);
        let u = homogeneous_propagator(0.3, -0.2, 0.8, 0.0, &m, DispersionModel::Exact);
        assert!((u.xx - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        assert!((u.yy - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        assert!(u.xy.norm() < 1e-14);
        assert!(u.yx.norm() < 1e-14);
    }

    #[test]
    fn propagator_reduces_to_scalar_phase_when_isotropic() {
        let m = medium(1.5, 1.5, 1.0);
        let z = 3.0;
        let (qx, qy) = (0.4, 0.9);
        let u = homogeneous_propagator(qx, qy, 1.1, z, &m, DispersionModel::Exact);
        let phase = (Complex64::i() * kz_ordinary(qx, qy, &m) * z).exp();
        assert!((u.xx - phase).norm() < 1e-14);
        assert!((u.yy - phase).norm() < 1e-14);
        assert!(u.xy.norm() < 1e-14);
        assert!(u.yx.norm() < 1e-14);
    }

    #[test]
    fn normal_incidence_propagator_is_diagonal_retarder() {
        let m = medium(1.5, 1.7, 2.0);
        let u = homogeneous_propagator(0.0, 0.0, 0.0, m.thickness(), &m, DispersionModel::Exact);
        let ee = Complex64::from_polar(1.0, K0 * 1.7 * 2.0);
        let eo = Complex64::from_polar(1.0, K0 * 1.5 * 2.0);
        assert!((u.xx - ee).norm() < 1e-12);
        assert!((u.yy - eo).norm() < 1e-12);
        assert!(u.xy.norm() < 1e-14);
        assert!(u.yx.norm() < 1e-14);
    }

    #[test]
    fn propagator_is_unitary_inside_the_cone() {
        let m = medium(1.5, 1.7, 1.0);
        for (qx, qy, alpha) in [(0.0, 0.0, 0.0), (1.0, 2.0, 0.6), (-3.0, 4.0, -1.9), (5.0, 5.0, 2.4)] {
            let u = homogeneous_propagator(qx, qy, alpha, 7.7, &m, DispersionModel::Exact);
            assert!(u.unitarity_defect() < 1e-12);
        }
    }

    #[test]
    fn zero_distance_roundtrip_is_tight() {
        let grid = Grid::new(64, 40.0).unwrap();
        let f = make_input_field(
            BeamSpec {
                lg: LgIndex::new(1, 0, 10.0).unwrap(),
                pol: JonesVector::circular_left(),
            },
            grid,
        )
        .unwrap();
        let out = propagate_homogeneous(&f, 0.4, 0.0, &medium(1.5, 1.7, 1.0), DispersionModel::Exact);
        let mut worst: f64 = 0.0;
        for (a, b) in out.vx().iter().zip(f.vx().iter()) {
            worst = worst.max((a - b).norm());
        }
        for (a, b) in out.vy().iter().zip(f.vy().iter()) {
            worst = worst.max((a - b).norm());
        }
        assert!(worst < 1e-12, "roundtrip error {worst}");
    }

    #[test]
    fn gaussian_spreads_by_sqrt2_after_one_rayleigh_range() {
        let grid = Grid::new(256, 64.0).unwrap();
        let w0 = 10.0;
        let f = make_input_field(
            BeamSpec {
                lg: LgIndex::new(0, 0, w0).unwrap(),
                pol: JonesVector::linear(0.0),
            },
            grid,
        )
        .unwrap();
        let m = medium(1.5, 1.5, 1.0);
        let rayleigh = PI * 1.5 * w0 * w0;

        let second_moment = |g: &crate::grid::VectorField| -> f64 {
            let mut num = 0.0;
            let mut den = 0.0;
            for iy in 0..grid.n() {
                let y = grid.coord(iy);
                for ix in 0..grid.n() {
                    let x = grid.coord(ix);
                    let w = g.vx()[[iy, ix]].norm_sqr() + g.vy()[[iy, ix]].norm_sqr();
                    num += (x * x + y * y) * w;
                    den += w;
                }
            }
            num / den
        };
        // the analytic beam-spread law is paraxial; the paraxial dispersion
        // flag reproduces it to quadrature accuracy
        let out = propagate_homogeneous(&f, 0.0, rayleigh, &m, DispersionModel::Paraxial);
        let ratio = second_moment(&out) / second_moment(&f);
        assert_abs_diff_eq!(ratio, 2.0, epsilon = 1e-6);
        assert_abs_diff_eq!(out.energy(), f.energy(), epsilon = 1e-10);
        // exact dispersion carries a small genuine beyond-paraxial correction
        // of order 1/(k w0)^2
        let out = propagate_homogeneous(&f, 0.0, rayleigh, &m, DispersionModel::Exact);
        let ratio = second_moment(&out) / second_moment(&f);
        assert_abs_diff_eq!(ratio, 2.0, epsilon = 1e-3);
        assert_abs_diff_eq!(out.energy(), f.energy(), epsilon = 1e-10);
    }

    #[test]
    fn x_polarization_is_preserved_along_the_axis() {
        let grid = Grid::new(64, 40.0).unwrap();
        let f = make_input_field(
            BeamSpec {
                lg: LgIndex::new(0, 0, 10.0).unwrap(),
                pol: JonesVector::linear(0.0),
            },
            grid,
        )
        .unwrap();
        let out = propagate_homogeneous(&f, 0.0, 5.0, &medium(1.5, 1.7, 1.0), DispersionModel::Exact);
        let worst = out.vy().iter().map(|v| v.norm()).fold(0.0, f64::max);
        assert_eq!(worst, 0.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn beta_ratio_is_at_most_one(n_o in 0.1f64..3.0, n_e in 0.1f64..3.0) {
            let m = medium(n_o, n_e, 1.0);
            prop_assert!(m.beta_ratio() <= 1.0 + 1e-15);
            if (n_o - n_e).abs() > 1e-9 {
                prop_assert!(m.beta_ratio() < 1.0);
            }
        }
    }
}
