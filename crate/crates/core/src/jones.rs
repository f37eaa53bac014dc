//! Minimal 2x2 complex (Jones) matrix algebra for transverse polarization.

use num_complex::Complex64;

/// 2x2 complex matrix acting on `(vx, vy)` Jones components.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jones2 {
    pub xx: Complex64,
    pub xy: Complex64,
    pub yx: Complex64,
    pub yy: Complex64,
}

impl Jones2 {
    pub const fn new(xx: Complex64, xy: Complex64, yx: Complex64, yy: Complex64) -> Jones2 {
        Jones2 { xx, xy, yx, yy }
    }

    pub fn identity() -> Jones2 {
        Jones2::new(
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
        )
    }

    /// Matrix with real entries.
    pub fn from_real(xx: f64, xy: f64, yx: f64, yy: f64) -> Jones2 {
        Jones2::new(
            Complex64::new(xx, 0.0),
            Complex64::new(xy, 0.0),
            Complex64::new(yx, 0.0),
            Complex64::new(yy, 0.0),
        )
    }

    /// Counterclockwise rotation by `theta`.
    pub fn rotation(theta: f64) -> Jones2 {
        let (s, c) = theta.sin_cos();
        Jones2::from_real(c, -s, s, c)
    }

    pub fn apply(&self, v: (Complex64, Complex64)) -> (Complex64, Complex64) {
        (
            self.xx * v.0 + self.xy * v.1,
            self.yx * v.0 + self.yy * v.1,
        )
    }

    pub fn mul(&self, rhs: &Jones2) -> Jones2 {
        Jones2::new(
            self.xx * rhs.xx + self.xy * rhs.yx,
            self.xx * rhs.xy + self.xy * rhs.yy,
            self.yx * rhs.xx + self.yy * rhs.yx,
            self.yx * rhs.xy + self.yy * rhs.yy,
        )
    }

    pub fn scale(&self, c: Complex64) -> Jones2 {
        Jones2::new(c * self.xx, c * self.xy, c * self.yx, c * self.yy)
    }

    pub fn add(&self, rhs: &Jones2) -> Jones2 {
        Jones2::new(
            self.xx + rhs.xx,
            self.xy + rhs.xy,
            self.yx + rhs.yx,
            self.yy + rhs.yy,
        )
    }

    pub fn det(&self) -> Complex64 {
        self.xx * self.yy - self.xy * self.yx
    }

    /// Max elementwise deviation from the identity of `M * M^H`; 0 for unitary.
    pub fn unitarity_defect(&self) -> f64 {
        let m = *self;
        let gram = Jones2::new(
            m.xx * m.xx.conj() + m.xy * m.xy.conj(),
            m.xx * m.yx.conj() + m.xy * m.yy.conj(),
            m.yx * m.xx.conj() + m.yy * m.xy.conj(),
            m.yx * m.yx.conj() + m.yy * m.yy.conj(),
        );
        let id = Jones2::identity();
        [
            (gram.xx - id.xx).norm(),
            (gram.xy - id.xy).norm(),
            (gram.yx - id.yx).norm(),
            (gram.yy - id.yy).norm(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}
