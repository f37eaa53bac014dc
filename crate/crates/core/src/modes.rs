//! Laguerre-Gaussian mode synthesis and polarized input beams.
//!
//! Modes are generated at the waist plane (no Gouy phase or wavefront
//! curvature): the phase plate is assumed to sit at the waist, and the
//! quantities computed downstream are width-independent, which makes the waist
//! plane the canonical choice.
//!
//! The radial profile uses the standard generalized-Laguerre form
//!
//! ```text
//! u(r, phi) = N * (sqrt(2) r / w0)^|l| * L_p^|l|(2 r^2/w0^2) * exp(-r^2/w0^2) * exp(i l phi)
//! N = sqrt(2 p! / (pi (p + |l|)!)) / w0
//! ```
//!
//! which has unit L2 norm in the continuum. Sampled modes are additionally
//! normalized numerically (divided by the measured norm), so unit input energy
//! holds by construction on every grid. Positive `l` means phase increasing
//! with the azimuth measured counterclockwise from +x, matching the plate
//! axis-angle convention in [`crate::qplate`].

use crate::error::{Error, Result};
use crate::grid::{quad_integral, Grid, ScalarField, VectorField};
use ndarray::Array2;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Laguerre-Gaussian mode indices plus waist (in vacuum wavelengths).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LgIndex {
    /// Topological charge (any sign).
    pub ell: i32,
    /// Radial node number, >= 0.
    pub p: u32,
    /// Waist in wavelength units, > 0.
    pub w0: f64,
}

impl LgIndex {
    pub fn new(ell: i32, p: u32, w0: f64) -> Result<LgIndex> {
        if !(w0 > 0.0) || !w0.is_finite() {
            return Err(Error::BadWaist(w0));
        }
        Ok(LgIndex { ell, p, w0 })
    }
}

/// Normalized transverse polarization amplitudes `(a, b)` for `(u_x, u_y)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JonesVector {
    a: Complex64,
    b: Complex64,
}

impl JonesVector {
    /// Normalizes the pair to `|a|^2 + |b|^2 = 1`.
    pub fn new(a: Complex64, b: Complex64) -> Result<JonesVector> {
        let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroJonesVector);
        }
        Ok(JonesVector {
            a: a / norm,
            b: b / norm,
        })
    }

    pub fn a(&self) -> Complex64 {
        self.a
    }

    pub fn b(&self) -> Complex64 {
        self.b
    }

    /// Linear polarization at `angle` from the +x axis.
    pub fn linear(angle: f64) -> JonesVector {
        JonesVector {
            a: Complex64::new(angle.cos(), 0.0),
            b: Complex64::new(angle.sin(), 0.0),
        }
    }

    /// `(1, i)/sqrt(2)`, spin degree +1.
    pub fn circular_left() -> JonesVector {
        let s = 1.0 / 2.0_f64.sqrt();
        JonesVector {
            a: Complex64::new(s, 0.0),
            b: Complex64::new(0.0, s),
        }
    }

    /// `(1, -i)/sqrt(2)`, spin degree -1.
    pub fn circular_right() -> JonesVector {
        let s = 1.0 / 2.0_f64.sqrt();
        JonesVector {
            a: Complex64::new(s, 0.0),
            b: Complex64::new(0.0, -s),
        }
    }

    /// The `(cos t, i sin t)` vector with spin degree exactly `sigma = sin(2t)`.
    pub fn with_spin(sigma: f64) -> Result<JonesVector> {
        if !(-1.0..=1.0).contains(&sigma) {
            return Err(Error::ZeroJonesVector);
        }
        let t = 0.5 * sigma.asin();
        Ok(JonesVector {
            a: Complex64::new(t.cos(), 0.0),
            b: Complex64::new(0.0, t.sin()),
        })
    }
}

/// Input beam: an LG spatial mode carrying a uniform Jones polarization.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BeamSpec {
    pub lg: LgIndex,
    pub pol: JonesVector,
}

/// Generalized Laguerre polynomial `L_p^k(x)` by the three-term recurrence.
pub(crate) fn laguerre(p: u32, k: f64, x: f64) -> f64 {
    match p {
        0 => 1.0,
        _ => {
            let mut lm1 = 1.0;
            let mut l = 1.0 + k - x;
            for m in 1..p {
                let m = m as f64;
                let next = ((2.0 * m + 1.0 + k - x) * l - (m + k) * lm1) / (m + 1.0);
                lm1 = l;
                l = next;
            }
            l
        }
    }
}

/// Radial amplitude profile of the mode (no azimuthal phase), continuum-normalized.
pub fn radial_profile(idx: LgIndex, r: f64) -> f64 {
    let la = idx.ell.unsigned_abs();
    let t = 2.0 * r * r / (idx.w0 * idx.w0);
    let norm = (2.0 * factorial(idx.p) / (PI * factorial(idx.p + la))).sqrt() / idx.w0;
    norm * t.powf(la as f64 / 2.0) * laguerre(idx.p, la as f64, t) * (-t / 2.0).exp()
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Sample the normalized mode `LG_{l,p}(r) exp(i l phi)` at the waist plane.
///
/// Errors if the waist is under-resolved (`w0 < 8 * step`). Adequate grid
/// half-width (field decayed at the boundary) is the caller's responsibility;
/// the experiment driver checks it explicitly.
pub fn lg_mode(idx: LgIndex, grid: Grid) -> Result<ScalarField> {
    if idx.w0 < 8.0 * grid.step() {
        return Err(Error::UnderResolvedMode {
            w0: idx.w0,
            min: 8.0 * grid.step(),
        });
    }
    let la = idx.ell.unsigned_abs() as f64;
    let norm = (2.0 * factorial(idx.p) / (PI * factorial(idx.p + idx.ell.unsigned_abs()))).sqrt()
        / idx.w0;
    let w2 = idx.w0 * idx.w0;
    let values = Array2::from_shape_fn((grid.n(), grid.n()), |(iy, ix)| {
        let x = grid.coord(ix);
        let y = grid.coord(iy);
        let r2 = x * x + y * y;
        let t = 2.0 * r2 / w2;
        let radial = norm * t.powf(la / 2.0) * laguerre(idx.p, la, t) * (-t / 2.0).exp();
        let phase = idx.ell as f64 * y.atan2(x);
        Complex64::from_polar(radial, phase)
    });
    let mut field = ScalarField::from_values(grid, values)?;
    // Numerical renormalization makes unit energy exact by construction.
    let norm_sq = quad_integral(&ScalarField::from_values(
        grid,
        field.values().mapv(|v| Complex64::new(v.norm_sqr(), 0.0)),
    )?)
    .re;
    if norm_sq <= 0.0 {
        return Err(Error::ZeroEnergy);
    }
    let scale = 1.0 / norm_sq.sqrt();
    field.values_mut().mapv_inplace(|v| v * scale);
    Ok(field)
}

/// Build the polarized input field `(a u, b u)` with `u` the normalized LG mode.
pub fn make_input_field(spec: BeamSpec, grid: Grid) -> Result<VectorField> {
    let u = lg_mode(spec.lg, grid)?;
    let vx = u.values().mapv(|v| spec.pol.a() * v);
    let vy = u.values().mapv(|v| spec.pol.b() * v);
    VectorField::from_components(grid, vx, vy)
}

/// Polarization spin degree `sigma = i (a b* - a* b)`, in [-1, 1].
pub fn spin_degree(pol: JonesVector) -> f64 {
    let z = pol.a() * pol.b().conj();
    // i (z - conj(z)) = 2 Im(conj(a) b) = -2 Im(a conj(b))
    -2.0 * z.im
}
