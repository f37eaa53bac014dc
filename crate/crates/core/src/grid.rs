//! Transverse sampling grids, sampled scalar/vector fields, quadrature and
//! spectral derivatives.
//!
//! All lengths are expressed in units of the vacuum wavelength, so the vacuum
//! wavenumber is exactly `2*pi` (see [`crate::media::K0`]).
//!
//! Layout convention (fixed): a grid with `n` samples per axis and half-extent
//! `half_width` has step `step = 2*half_width/n` and coordinates
//! `x_i = (i - n/2) * step` for `i in 0..n`. The coordinates are symmetric
//! about 0 except for the single edge sample at `-half_width`, which has no
//! positive partner (standard FFT-centered layout). Sample `(n/2, n/2)` sits
//! exactly at the origin. Arrays are indexed `[[iy, ix]]`: the row index walks
//! y, the column index walks x. The conjugate angular frequencies follow the
//! usual DFT ordering: `k_m = 2*pi*m/(n*step)` for `m < n/2` and
//! `k_m = 2*pi*(m-n)/(n*step)` otherwise.

use crate::error::{Error, Result};
use crate::fft2;
use ndarray::Array2;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Square transverse sampling grid. Cheap to copy; immutable after construction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    n: usize,
    half_width: f64,
    step: f64,
}

impl Grid {
    /// Build a grid with `n` samples per axis spanning `[-half_width, half_width)`.
    pub fn new(n: usize, half_width: f64) -> Result<Grid> {
        if n < 8 || n % 2 != 0 {
            return Err(Error::BadGridSize(n));
        }
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(Error::BadHalfWidth(half_width));
        }
        Ok(Grid {
            n,
            half_width,
            step: 2.0 * half_width / n as f64,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    /// Sample spacing `2*half_width/n`.
    pub fn step(&self) -> f64 {
        self.step
    }

    /// Physical coordinate of sample `i` along either axis.
    pub fn coord(&self, i: usize) -> f64 {
        (i as f64 - (self.n / 2) as f64) * self.step
    }

    /// Index of the sample sitting exactly at the origin.
    pub fn center(&self) -> usize {
        self.n / 2
    }

    /// Angular spatial frequency of DFT bin `m` (DFT ordering).
    pub fn freq(&self, m: usize) -> f64 {
        let m = m as isize;
        let n = self.n as isize;
        let folded = if m < n / 2 { m } else { m - n };
        2.0 * PI * folded as f64 / (self.n as f64 * self.step)
    }

    pub fn coords(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.coord(i)).collect()
    }

    pub fn freqs(&self) -> Vec<f64> {
        (0..self.n).map(|m| self.freq(m)).collect()
    }

    /// Area of one grid cell, `step^2`.
    pub fn cell_area(&self) -> f64 {
        self.step * self.step
    }
}

/// Complex scalar field sampled on a [`Grid`].
#[derive(Clone, Debug)]
pub struct ScalarField {
    grid: Grid,
    values: Array2<Complex64>,
}

impl ScalarField {
    pub fn zeros(grid: Grid) -> ScalarField {
        ScalarField {
            grid,
            values: Array2::zeros((grid.n(), grid.n())),
        }
    }

    /// Sample `f(x, y)` on the grid.
    pub fn from_fn(grid: Grid, mut f: impl FnMut(f64, f64) -> Complex64) -> ScalarField {
        let values = Array2::from_shape_fn((grid.n(), grid.n()), |(iy, ix)| {
            f(grid.coord(ix), grid.coord(iy))
        });
        ScalarField { grid, values }
    }

    pub fn from_values(grid: Grid, values: Array2<Complex64>) -> Result<ScalarField> {
        if values.nrows() != grid.n() || values.ncols() != grid.n() {
            return Err(Error::DimensionMismatch {
                rows: values.nrows(),
                cols: values.ncols(),
                n: grid.n(),
            });
        }
        Ok(ScalarField { grid, values })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn values(&self) -> &Array2<Complex64> {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut Array2<Complex64> {
        &mut self.values
    }

    pub fn into_values(self) -> Array2<Complex64> {
        self.values
    }
}

/// Two-component (Cartesian transverse) complex field on a shared [`Grid`].
#[derive(Clone, Debug)]
pub struct VectorField {
    grid: Grid,
    vx: Array2<Complex64>,
    vy: Array2<Complex64>,
}

impl VectorField {
    pub fn zeros(grid: Grid) -> VectorField {
        VectorField {
            grid,
            vx: Array2::zeros((grid.n(), grid.n())),
            vy: Array2::zeros((grid.n(), grid.n())),
        }
    }

    pub fn from_components(grid: Grid, vx: Array2<Complex64>, vy: Array2<Complex64>) -> Result<VectorField> {
        for a in [&vx, &vy] {
            if a.nrows() != grid.n() || a.ncols() != grid.n() {
                return Err(Error::DimensionMismatch {
                    rows: a.nrows(),
                    cols: a.ncols(),
                    n: grid.n(),
                });
            }
        }
        Ok(VectorField { grid, vx, vy })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn vx(&self) -> &Array2<Complex64> {
        &self.vx
    }

    pub fn vy(&self) -> &Array2<Complex64> {
        &self.vy
    }

    pub fn component(&self, axis: Axis2) -> &Array2<Complex64> {
        match axis {
            Axis2::X => &self.vx,
            Axis2::Y => &self.vy,
        }
    }

    pub fn into_components(self) -> (Array2<Complex64>, Array2<Complex64>) {
        (self.vx, self.vy)
    }

    /// Total energy `sum (|vx|^2 + |vy|^2) * step^2`.
    pub fn energy(&self) -> f64 {
        let s: f64 = self
            .vx
            .iter()
            .zip(self.vy.iter())
            .map(|(a, b)| a.norm_sqr() + b.norm_sqr())
            .sum();
        s * self.grid.cell_area()
    }

    /// Linear combination `alpha * self + beta * other` (shared grid required).
    pub fn linear_combination(&self, alpha: Complex64, other: &VectorField, beta: Complex64) -> Result<VectorField> {
        if self.grid != other.grid {
            return Err(Error::DimensionMismatch {
                rows: other.vx.nrows(),
                cols: other.vx.ncols(),
                n: self.grid.n(),
            });
        }
        let vx = Array2::from_shape_fn(self.vx.raw_dim(), |idx| {
            alpha * self.vx[idx] + beta * other.vx[idx]
        });
        let vy = Array2::from_shape_fn(self.vy.raw_dim(), |idx| {
            alpha * self.vy[idx] + beta * other.vy[idx]
        });
        Ok(VectorField {
            grid: self.grid,
            vx,
            vy,
        })
    }
}

/// Transverse axis selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis2 {
    X,
    Y,
}

/// Riemann-sum quadrature `sum f_ij * step^2`, summed in row-major order.
pub fn quad_integral(f: &ScalarField) -> Complex64 {
    let s: Complex64 = f.values().iter().sum();
    s * f.grid().cell_area()
}

/// L2 inner product `<a, b> = sum conj(a) b * step^2`.
pub fn inner_product(a: &ScalarField, b: &ScalarField) -> Complex64 {
    let s: Complex64 = a
        .values()
        .iter()
        .zip(b.values().iter())
        .map(|(x, y)| x.conj() * y)
        .sum();
    s * a.grid().cell_area()
}

/// Spectral partial derivative: multiply by `i*k` along the chosen axis in the
/// Fourier domain. Exact for fields that are band-limited and decayed at the
/// grid boundary.
///
/// The Nyquist bin has no partner of opposite sign, so its derivative
/// wavenumber is taken as zero; this keeps derivatives of real fields real
/// and makes `conj(d f) == d conj(f)` hold for every sampled field.
pub fn spectral_derivative(f: &ScalarField, axis: Axis2) -> ScalarField {
    let grid = f.grid();
    let mut a = f.values().clone();
    // x varies along ndarray axis 1, y along axis 0.
    let nd_axis = match axis {
        Axis2::X => 1,
        Axis2::Y => 0,
    };
    fft2::fft1_axis(&mut a, nd_axis, true);
    let n = grid.n();
    let k_deriv = |m: usize| if m == n / 2 { 0.0 } else { grid.freq(m) };
    for iy in 0..n {
        for ix in 0..n {
            let k = match axis {
                Axis2::X => k_deriv(ix),
                Axis2::Y => k_deriv(iy),
            };
            a[[iy, ix]] *= Complex64::new(0.0, k);
        }
    }
    fft2::fft1_axis(&mut a, nd_axis, false);
    ScalarField::from_values(grid, a).expect("shape preserved")
}

/// Azimuthal derivative `x * d/dy - y * d/dx`, evaluated spectrally.
pub fn azimuthal_derivative(f: &ScalarField) -> ScalarField {
    let grid = f.grid();
    let dx = spectral_derivative(f, Axis2::X);
    let dy = spectral_derivative(f, Axis2::Y);
    let values = Array2::from_shape_fn((grid.n(), grid.n()), |(iy, ix)| {
        let x = grid.coord(ix);
        let y = grid.coord(iy);
        x * dy.values()[[iy, ix]] - y * dx.values()[[iy, ix]]
    });
    ScalarField { grid, values }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fft2;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn gaussian_field(grid: Grid, w0: f64) -> ScalarField {
        // Continuum-normalized fundamental Gaussian, unit L2 norm.
        let norm = (2.0 / PI).sqrt() / w0;
        ScalarField::from_fn(grid, |x, y| {
            Complex64::new(norm * (-(x * x + y * y) / (w0 * w0)).exp(), 0.0)
        })
    }

    #[test]
    fn grid_steps_match_examples() {
        assert_abs_diff_eq!(Grid::new(256, 64.0).unwrap().step(), 0.5);
        assert_abs_diff_eq!(Grid::new(8, 4.0).unwrap().step(), 1.0);
    }

    #[test]
    fn grid_rejects_bad_parameters() {
        assert!(matches!(Grid::new(7, 4.0), Err(Error::BadGridSize(7))));
        assert!(matches!(Grid::new(6, 4.0), Err(Error::BadGridSize(6))));
        assert!(matches!(Grid::new(9, 4.0), Err(Error::BadGridSize(9))));
        assert!(matches!(Grid::new(8, 0.0), Err(Error::BadHalfWidth(_))));
        assert!(matches!(Grid::new(8, -1.0), Err(Error::BadHalfWidth(_))));
        assert!(matches!(Grid::new(8, f64::NAN), Err(Error::BadHalfWidth(_))));
    }

    #[test]
    fn coordinates_are_centered() {
        let g = Grid::new(16, 8.0).unwrap();
        assert_eq!(g.coord(g.center()), 0.0);
        assert_eq!(g.coord(0), -8.0);
        // every coordinate except the -half_width edge has its negative on the grid
        for i in 1..16 {
            let x = g.coord(i);
            assert!(g.coords().iter().any(|&v| v == -x));
        }
    }

    #[test]
    fn quad_of_one_is_the_area() {
        let g = Grid::new(64, 10.0).unwrap();
        let ones = ScalarField::from_fn(g, |_, _| Complex64::new(1.0, 0.0));
        assert_abs_diff_eq!(quad_integral(&ones).re, 400.0, epsilon = 1e-9);
        assert_abs_diff_eq!(quad_integral(&ones).im, 0.0, epsilon = 1e-12);
        let zeros = ScalarField::zeros(g);
        assert_eq!(quad_integral(&zeros), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn quad_of_normalized_gaussian_intensity_is_one() {
        let g = Grid::new(256, 40.0).unwrap();
        let u = gaussian_field(g, 8.0);
        let intensity = ScalarField::from_values(g, u.values().mapv(|v| Complex64::new(v.norm_sqr(), 0.0))).unwrap();
        assert_abs_diff_eq!(quad_integral(&intensity).re, 1.0, epsilon = 1e-6);
    }

    #[test]
    fn spectral_derivative_matches_analytic_gaussian() {
        let g = Grid::new(256, 40.0).unwrap();
        let w0 = 8.0;
        let u = gaussian_field(g, w0);
        let dx = spectral_derivative(&u, Axis2::X);
        let mut worst: f64 = 0.0;
        for iy in 0..g.n() {
            for ix in 0..g.n() {
                let x = g.coord(ix);
                let expected = -2.0 * x / (w0 * w0) * u.values()[[iy, ix]];
                worst = worst.max((dx.values()[[iy, ix]] - expected).norm());
            }
        }
        assert!(worst < 1e-8, "max abs error {worst}");
    }

    #[test]
    fn spectral_derivative_of_constant_vanishes() {
        let g = Grid::new(64, 10.0).unwrap();
        let c = ScalarField::from_fn(g, |_, _| Complex64::new(3.25, -1.5));
        for axis in [Axis2::X, Axis2::Y] {
            let d = spectral_derivative(&c, axis);
            let worst = d.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
            assert!(worst < 1e-13, "derivative of constant: {worst}");
        }
    }

    #[test]
    fn spectral_derivative_product_rule_case() {
        let g = Grid::new(256, 40.0).unwrap();
        let w0 = 8.0;
        let u = ScalarField::from_fn(g, |x, y| {
            Complex64::new(x * (-(x * x + y * y) / (w0 * w0)).exp(), 0.0)
        });
        let dx = spectral_derivative(&u, Axis2::X);
        let mut worst: f64 = 0.0;
        for iy in 0..g.n() {
            for ix in 0..g.n() {
                let x = g.coord(ix);
                let y = g.coord(iy);
                let env = (-(x * x + y * y) / (w0 * w0)).exp();
                let expected = (1.0 - 2.0 * x * x / (w0 * w0)) * env;
                worst = worst.max((dx.values()[[iy, ix]] - Complex64::new(expected, 0.0)).norm());
            }
        }
        assert!(worst < 1e-8, "max abs error {worst}");
    }

    #[test]
    fn parseval_holds_to_machine_precision() {
        let g = Grid::new(32, 4.0).unwrap();
        let f = ScalarField::from_fn(g, |x, y| Complex64::new((x * 0.7).sin() + 0.2 * y, (y * 1.3).cos()));
        let spatial: f64 = f.values().iter().map(|v| v.norm_sqr()).sum::<f64>() * g.cell_area();
        let mut a = f.values().clone();
        fft2::fft2_forward(&mut a);
        let spectral: f64 =
            a.iter().map(|v| v.norm_sqr()).sum::<f64>() * g.cell_area() / (g.n() * g.n()) as f64;
        assert!((spatial - spectral).abs() / spatial < 1e-12);
    }

    #[test]
    fn derivative_commutes_with_conjugation() {
        let g = Grid::new(16, 4.0).unwrap();
        // includes Nyquist content on purpose
        let f = ScalarField::from_fn(g, |x, y| Complex64::new((7.0 * x).sin(), (6.9 * y).cos() + x));
        for axis in [Axis2::X, Axis2::Y] {
            let lhs = spectral_derivative(&f, axis).values().mapv(|v| v.conj());
            let conj_f = ScalarField::from_values(g, f.values().mapv(|v| v.conj())).unwrap();
            let rhs = spectral_derivative(&conj_f, axis);
            let worst = lhs
                .iter()
                .zip(rhs.values().iter())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            assert!(worst < 1e-12, "conjugation symmetry violated: {worst}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn quad_is_linear(re_a in -2.0f64..2.0, im_a in -2.0f64..2.0, re_b in -2.0f64..2.0, seed in 0u64..1000) {
            let g = Grid::new(8, 2.0).unwrap();
            let alpha = Complex64::new(re_a, im_a);
            let beta = Complex64::new(re_b, 0.5);
            let f = ScalarField::from_fn(g, |x, y| Complex64::new(x + seed as f64 * 1e-3, y * x));
            let h = ScalarField::from_fn(g, |x, y| Complex64::new(y - x, 0.25 * x));
            let combo = ScalarField::from_values(
                g,
                Array2::from_shape_fn((8, 8), |idx| alpha * f.values()[idx] + beta * h.values()[idx]),
            ).unwrap();
            let lhs = quad_integral(&combo);
            let rhs = alpha * quad_integral(&f) + beta * quad_integral(&h);
            let scale = lhs.norm().max(rhs.norm()).max(1e-30);
            prop_assert!((lhs - rhs).norm() / scale < 1e-12);
        }
    }
}
