//! Space-variant-axis phase plates: the azimuthal axis map, the local
//! polarization-flip matrix, and the full real-space propagation through the
//! plate in thin-element, approximated-kernel and exact-kernel modes.
//!
//! The output field is the sum of two contributions sharing a common
//! `k0 n_o / (2 pi i d)` prefactor: a polarization-preserving term carrying
//! `(F_e + F_o)/2` and a polarization-flipping term carrying `(F_e - F_o)/2`
//! composed with the local flip matrix `M(alpha)`. Rearranged per sample with
//! `g = M(alpha) f`, this becomes `F_e * (f + g)/2 + F_o * (f - g)/2`, i.e.
//! two scalar Fresnel convolutions per component in the approximated-kernel
//! mode.
//!
//! Axis-angle convention: `alpha(phi) = q*phi + alpha0` with `phi` measured
//! counterclockwise from +x in `[-pi, pi)` (same convention as the mode
//! phases). The axis angle entering the propagation, both in `M` and in the
//! exact extraordinary kernel, is evaluated at the source point `(rho, phi')`:
//! the plate acts on the field where the field enters it.
//!
//! Central defect: for a space-variant plate (`q != 0`) the axis orientation
//! at the exact origin is undefined, and the origin grid cell contains every
//! orientation, so its azimuthally averaged flip action vanishes. The origin
//! sample therefore gets no flip term: the propagation integrals take
//! `g(0) = 0`, and the thin-element map applies the unitary flip-free phase
//! `exp(i (delta_e + delta_o)/2)` there. Giving that one cell the full flip
//! at `alpha0` instead would radiate a spurious point wave about four orders
//! of magnitude above the discretization floor. [`QPlateSpec::axis_angle`]
//! itself still reports `alpha0` at `phi = 0`.
//!
//! Global phases `exp(i k0 n_o d)` and `exp(i k0 n_e d)` are kept: their
//! difference is exactly the retardation that modulates the angular-momentum
//! exchange with thickness.

use crate::error::{Error, Result};
use crate::fft2;
use crate::grid::{Grid, VectorField};
use crate::jones::Jones2;
use crate::media::{UniaxialMedium, K0};
use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Axis pattern `alpha(phi) = q*phi + alpha0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QPlateSpec {
    /// Axis winding number; integers and half-integers are the physical cases.
    pub q: f64,
    /// Axis offset angle in radians.
    pub alpha0: f64,
}

impl QPlateSpec {
    pub fn new(q: f64, alpha0: f64) -> QPlateSpec {
        QPlateSpec { q, alpha0 }
    }

    /// True when `2q` is an integer, i.e. the axis pattern has no
    /// discontinuity lines, only the central defect. Non-(semi-)integer
    /// windings are accepted but should be flagged by callers.
    pub fn axis_is_defect_only(&self) -> bool {
        let twice = 2.0 * self.q;
        (twice - twice.round()).abs() < 1e-12
    }

    /// Local optical-axis orientation at azimuth `phi`.
    pub fn axis_angle(&self, phi: f64) -> f64 {
        self.q * phi + self.alpha0
    }
}

/// `M(alpha) = R(alpha) sigma_z R(-alpha) = [[cos 2a, sin 2a], [sin 2a, -cos 2a]]`;
/// real, symmetric, involutory, determinant -1.
pub fn local_flip_matrix(alpha: f64) -> Jones2 {
    let (s, c) = (2.0 * alpha).sin_cos();
    Jones2::from_real(c, s, s, -c)
}

/// Propagation kernel selection.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelMode {
    /// Per-sample Jones action of the retarder, no diffraction.
    ThinElement,
    /// Approximated extraordinary kernel (astigmatic term dropped); the two
    /// branches are shift-invariant convolutions evaluated by FFT.
    ApproxFresnel,
    /// Full extraordinary kernel by direct O(n^4) quadrature. Small-grid
    /// oracle for validating the approximated kernel; refused above the cap.
    ExactFresnel,
}

/// How the approximated-kernel convolutions are evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ConvForm {
    /// Real-space sampled chirp when the sampling criterion holds, otherwise
    /// the transfer-function form.
    #[default]
    Auto,
    /// Real-space sampled chirp, zero-padded 2x per axis so the FFT evaluates
    /// a linear (not circular) convolution.
    ImpulseResponse,
    /// Analytic Fourier-domain chirp applied on the unpadded grid (periodic
    /// boundary conditions; fine for fields decayed at the boundary).
    TransferFunction,
}

/// Tuning knobs for [`propagate_with`].
#[derive(Clone, Copy, Debug)]
pub struct PropagationOptions {
    pub conv_form: ConvForm,
    /// Largest grid accepted in `ExactFresnel` mode.
    pub exact_grid_cap: usize,
}

impl Default for PropagationOptions {
    fn default() -> Self {
        PropagationOptions {
            conv_form: ConvForm::Auto,
            exact_grid_cap: 96,
        }
    }
}

/// Real-space chirp sampling margin: the worst per-sample phase step of the
/// sampled kernel `exp(i beta |offset|^2)` over the padded offset domain,
/// `2 * beta * |offset|_max * step`, in units of pi. The largest radial offset
/// the padded convolution uses is the grid diagonal `2 sqrt(2) half_width`.
/// The impulse-response form is trustworthy when this is below 1.
pub fn kernel_sampling_margin(grid: Grid, m: &UniaxialMedium) -> f64 {
    let beta = m.beta_o().abs().max(m.beta_e().abs());
    let diagonal = 2.0 * std::f64::consts::SQRT_2 * grid.half_width();
    2.0 * beta * grid.step() * diagonal / PI
}

/// Resolve `Auto` into a concrete convolution form for this grid and medium.
pub fn resolve_conv_form(grid: Grid, m: &UniaxialMedium, form: ConvForm) -> ConvForm {
    match form {
        ConvForm::Auto => {
            if kernel_sampling_margin(grid, m) < 1.0 {
                ConvForm::ImpulseResponse
            } else {
                ConvForm::TransferFunction
            }
        }
        other => other,
    }
}

/// Per-sample Jones action of the plate: no diffraction, energy conserved
/// sample by sample.
pub fn thin_element_apply(f: &VectorField, plate: &QPlateSpec, m: &UniaxialMedium) -> VectorField {
    let grid = f.grid();
    let delta_o = K0 * m.n_o() * m.thickness();
    let delta_e = K0 * m.n_e() * m.thickness();
    let eo = Complex64::from_polar(1.0, delta_o);
    let ee = Complex64::from_polar(1.0, delta_e);
    let sym = 0.5 * (ee + eo);
    let dif = 0.5 * (ee - eo);
    // unitary flip-free action for the defect cell of a space-variant plate
    let mean = Complex64::from_polar(1.0, 0.5 * (delta_e + delta_o));
    let c0 = grid.center();
    let n = grid.n();
    let mut vx = Array2::zeros((n, n));
    let mut vy = Array2::zeros((n, n));
    for iy in 0..n {
        let y = grid.coord(iy);
        for ix in 0..n {
            let x = grid.coord(ix);
            let fx = f.vx()[[iy, ix]];
            let fy = f.vy()[[iy, ix]];
            if plate.q != 0.0 && iy == c0 && ix == c0 {
                vx[[iy, ix]] = mean * fx;
                vy[[iy, ix]] = mean * fy;
                continue;
            }
            let alpha = plate.axis_angle(y.atan2(x));
            let (s, c) = (2.0 * alpha).sin_cos();
            vx[[iy, ix]] = sym * fx + dif * (c * fx + s * fy);
            vy[[iy, ix]] = sym * fy + dif * (s * fx - c * fy);
        }
    }
    VectorField::from_components(grid, vx, vy).expect("shape preserved")
}

/// Ordinary Fresnel kernel `exp[i k0 n_o d + i beta_o |r - rho|^2]` in polar
/// coordinates; pure phase.
pub fn fresnel_kernel_ordinary(r: f64, phi: f64, rho: f64, varphi: f64, m: &UniaxialMedium) -> Complex64 {
    let sep2 = r * r + rho * rho - 2.0 * r * rho * (phi - varphi).cos();
    Complex64::from_polar(1.0, K0 * m.n_o() * m.thickness() + m.beta_o() * sep2)
}

/// Extraordinary Fresnel kernel in polar coordinates. With `exact` set, the
/// full astigmatic bracket is kept, with the axis angle evaluated at the
/// source azimuth `varphi`; otherwise the small-birefringence approximation
/// `exp[i k0 n_e d + i beta_e |r - rho|^2]` is returned. Pure phase either way.
pub fn fresnel_kernel_extraordinary(
    r: f64,
    phi: f64,
    rho: f64,
    varphi: f64,
    plate: &QPlateSpec,
    m: &UniaxialMedium,
    exact: bool,
) -> Complex64 {
    let sep2 = r * r + rho * rho - 2.0 * r * rho * (phi - varphi).cos();
    let mut phase = K0 * m.n_e() * m.thickness() + m.beta_e() * sep2;
    if exact {
        let alpha = plate.axis_angle(varphi);
        let bracket = r * r * (2.0 * (alpha - phi)).cos() + rho * rho * (2.0 * (alpha - varphi)).cos()
            - 2.0 * r * rho * (2.0 * alpha - phi - varphi).cos();
        phase += m.delta_beta_e() * bracket;
    }
    Complex64::from_polar(1.0, phase)
}

/// `g = M(alpha(phi)) f`, sample by sample; the defect cell of a
/// space-variant plate contributes no flip (see module docs).
fn flipped_copy(f: &VectorField, plate: &QPlateSpec) -> VectorField {
    let grid = f.grid();
    let n = grid.n();
    let c0 = grid.center();
    let mut gx = Array2::zeros((n, n));
    let mut gy = Array2::zeros((n, n));
    for iy in 0..n {
        let y = grid.coord(iy);
        for ix in 0..n {
            if plate.q != 0.0 && iy == c0 && ix == c0 {
                continue;
            }
            let x = grid.coord(ix);
            let alpha = plate.axis_angle(y.atan2(x));
            let (s, c) = (2.0 * alpha).sin_cos();
            let fx = f.vx()[[iy, ix]];
            let fy = f.vy()[[iy, ix]];
            gx[[iy, ix]] = c * fx + s * fy;
            gy[[iy, ix]] = s * fx - c * fy;
        }
    }
    VectorField::from_components(grid, gx, gy).expect("shape preserved")
}

/// One scalar branch of the approximated-kernel propagation: convolution with
/// the chirp of rate `beta` carrying the constant phase `k0 n d`, with the
/// common Eq-prefactor folded in (amplitude `beta_o / beta`).
fn fresnel_convolve(
    values: &Array2<Complex64>,
    grid: Grid,
    beta: f64,
    const_phase: f64,
    beta_o: f64,
    form: ConvForm,
) -> Array2<Complex64> {
    match form {
        ConvForm::TransferFunction => {
            let mut a = values.clone();
            fft2::fft2_forward(&mut a);
            let n = grid.n();
            let amp = beta_o / beta;
            for iy in 0..n {
                let qy = grid.freq(iy);
                for ix in 0..n {
                    let qx = grid.freq(ix);
                    let q2 = qx * qx + qy * qy;
                    let h = Complex64::from_polar(amp, const_phase - q2 / (4.0 * beta));
                    a[[iy, ix]] *= h;
                }
            }
            fft2::fft2_inverse(&mut a);
            a
        }
        ConvForm::ImpulseResponse => {
            let n = grid.n();
            let np = 2 * n;
            let step = grid.step();
            // Kernel in wrap-offset layout: index m encodes offset m for
            // m < n and m - 2n for m >= n, covering every offset a linear
            // convolution of two n-supported sequences can need.
            let mut kernel: Array2<Complex64> = Array2::zeros((np, np));
            for my in 0..np {
                let oy = if my < n { my as isize } else { my as isize - np as isize };
                let dy = oy as f64 * step;
                for mx in 0..np {
                    let ox = if mx < n { mx as isize } else { mx as isize - np as isize };
                    let dx = ox as f64 * step;
                    kernel[[my, mx]] =
                        Complex64::from_polar(1.0, const_phase + beta * (dx * dx + dy * dy));
                }
            }
            fft2::fft2_forward(&mut kernel);
            let mut padded = fft2::pad_corner(values, 2);
            fft2::fft2_forward(&mut padded);
            padded.zip_mut_with(&kernel, |v, k| *v *= k);
            fft2::fft2_inverse(&mut padded);
            // Common prefactor k0 n_o / (2 pi i d) = -i beta_o / pi, and the
            // quadrature measure step^2.
            let pref = Complex64::new(0.0, -beta_o / PI) * grid.cell_area();
            let mut out = fft2::unpad_corner(&padded, n);
            out.mapv_inplace(|v| v * pref);
            out
        }
        ConvForm::Auto => unreachable!("resolved before dispatch"),
    }
}

fn approx_fresnel(f: &VectorField, plate: &QPlateSpec, m: &UniaxialMedium, form: ConvForm) -> VectorField {
    let grid = f.grid();
    let g = flipped_copy(f, plate);
    let half = Complex64::new(0.5, 0.0);
    let hp = f.linear_combination(half, &g, half).expect("same grid");
    let hm = f.linear_combination(half, &g, -half).expect("same grid");
    let beta_o = m.beta_o();
    let beta_e = m.beta_e();
    let phase_o = K0 * m.n_o() * m.thickness();
    let phase_e = K0 * m.n_e() * m.thickness();
    let ex = fresnel_convolve(hp.vx(), grid, beta_e, phase_e, beta_o, form);
    let ey = fresnel_convolve(hp.vy(), grid, beta_e, phase_e, beta_o, form);
    let ox = fresnel_convolve(hm.vx(), grid, beta_o, phase_o, beta_o, form);
    let oy = fresnel_convolve(hm.vy(), grid, beta_o, phase_o, beta_o, form);
    let vx = &ex + &ox;
    let vy = &ey + &oy;
    VectorField::from_components(grid, vx, vy).expect("shape preserved")
}

/// Direct quadrature of the propagation integral with the exact extraordinary
/// kernel. The astigmatic bracket is evaluated in Cartesian offsets, with the
/// axis angle at the source sample:
/// `bracket = cos(2a) (dx^2 - dy^2) + 2 sin(2a) dx dy`.
fn exact_fresnel(f: &VectorField, plate: &QPlateSpec, m: &UniaxialMedium) -> VectorField {
    let grid = f.grid();
    let n = grid.n();
    let coords = grid.coords();
    let beta_o = m.beta_o();
    let beta_e = m.beta_e();
    let dbe = m.delta_beta_e();
    let phase_o = K0 * m.n_o() * m.thickness();
    let phase_e = K0 * m.n_e() * m.thickness();

    let g = flipped_copy(f, plate);
    let half = Complex64::new(0.5, 0.0);
    let hp = f.linear_combination(half, &g, half).expect("same grid");
    let hm = f.linear_combination(half, &g, -half).expect("same grid");

    // Per-source axis-angle trig, reused for every output sample.
    let mut cos2a = Array2::zeros((n, n));
    let mut sin2a = Array2::zeros((n, n));
    for jy in 0..n {
        for jx in 0..n {
            let alpha = plate.axis_angle(coords[jy].atan2(coords[jx]));
            let (s, c) = (2.0 * alpha).sin_cos();
            cos2a[[jy, jx]] = c;
            sin2a[[jy, jx]] = s;
        }
    }

    let pref = Complex64::new(0.0, -beta_o / PI) * grid.cell_area();
    let mut vx: Array2<Complex64> = Array2::zeros((n, n));
    let mut vy: Array2<Complex64> = Array2::zeros((n, n));
    let rows: Vec<usize> = (0..n).collect();
    let results: Vec<(usize, Vec<Complex64>, Vec<Complex64>)> = rows
        .par_iter()
        .map(|&iy| {
            let y = coords[iy];
            let mut row_x = vec![Complex64::new(0.0, 0.0); n];
            let mut row_y = vec![Complex64::new(0.0, 0.0); n];
            for ix in 0..n {
                let x = coords[ix];
                let mut acc_x = Complex64::new(0.0, 0.0);
                let mut acc_y = Complex64::new(0.0, 0.0);
                for jy in 0..n {
                    let dy = y - coords[jy];
                    for jx in 0..n {
                        let dx = x - coords[jx];
                        let sep2 = dx * dx + dy * dy;
                        let c = cos2a[[jy, jx]];
                        let s = sin2a[[jy, jx]];
                        let bracket = c * (dx * dx - dy * dy) + 2.0 * s * dx * dy;
                        let fe = Complex64::from_polar(1.0, phase_e + beta_e * sep2 + dbe * bracket);
                        let fo = Complex64::from_polar(1.0, phase_o + beta_o * sep2);
                        acc_x += fe * hp.vx()[[jy, jx]] + fo * hm.vx()[[jy, jx]];
                        acc_y += fe * hp.vy()[[jy, jx]] + fo * hm.vy()[[jy, jx]];
                    }
                }
                row_x[ix] = pref * acc_x;
                row_y[ix] = pref * acc_y;
            }
            (iy, row_x, row_y)
        })
        .collect();
    for (iy, row_x, row_y) in results {
        for ix in 0..n {
            vx[[iy, ix]] = row_x[ix];
            vy[[iy, ix]] = row_y[ix];
        }
    }
    VectorField::from_components(grid, vx, vy).expect("shape preserved")
}

/// Propagate through the plate with default options.
pub fn propagate(f: &VectorField, plate: &QPlateSpec, m: &UniaxialMedium, mode: KernelMode) -> Result<VectorField> {
    propagate_with(f, plate, m, mode, &PropagationOptions::default())
}

/// Propagate through the plate.
///
/// `ExactFresnel` is refused on grids with `n > opts.exact_grid_cap` instead
/// of running for hours. Callers working in `ApproxFresnel` mode should keep
/// `m.kernel_approx_ratio()` small (warn above 0.1); this function stays pure
/// and does not report it.
pub fn propagate_with(
    f: &VectorField,
    plate: &QPlateSpec,
    m: &UniaxialMedium,
    mode: KernelMode,
    opts: &PropagationOptions,
) -> Result<VectorField> {
    match mode {
        KernelMode::ThinElement => Ok(thin_element_apply(f, plate, m)),
        KernelMode::ApproxFresnel => {
            let form = resolve_conv_form(f.grid(), m, opts.conv_form);
            Ok(approx_fresnel(f, plate, m, form))
        }
        KernelMode::ExactFresnel => {
            let n = f.grid().n();
            if n > opts.exact_grid_cap {
                return Err(Error::ExactKernelGridCap {
                    n,
                    cap: opts.exact_grid_cap,
                });
            }
            Ok(exact_fresnel(f, plate, m))
        }
    }
}
