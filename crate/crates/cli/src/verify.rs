//! Verification suite: one named check per module invariant, evaluated
//! against the configured tolerances, rendered one line per check.

use crate::config::{RunConfig, ScanConfig, ScanParameter};
use crate::runner::{run_scan, run_single, RunError};
use ndarray::Array2;
use num_complex::Complex64;
use qplate_core::fft2;
use qplate_core::media::{propagate_homogeneous, DispersionModel};
use qplate_core::observables::{am_report, delta_s_closed, spin_am, SpinMethod};
use qplate_core::qplate::{propagate_with, ConvForm, KernelMode, PropagationOptions, QPlateSpec};
use qplate_core::{
    lg_mode, make_input_field, quad_integral, BeamSpec, Grid, JonesVector, LgIndex, ScalarField,
    UniaxialMedium, VectorField,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Warn,
    Info,
}

#[derive(Clone, Debug)]
pub struct VerifyLine {
    pub name: &'static str,
    pub measured: f64,
    pub bound: f64,
    pub status: Status,
    pub note: String,
}

impl VerifyLine {
    fn check(name: &'static str, measured: f64, bound: f64) -> VerifyLine {
        VerifyLine {
            name,
            measured,
            bound,
            status: if measured.abs() <= bound {
                Status::Pass
            } else {
                Status::Fail
            },
            note: String::new(),
        }
    }

    fn check_at_least(name: &'static str, measured: f64, bound: f64) -> VerifyLine {
        VerifyLine {
            name,
            measured,
            bound,
            status: if measured >= bound {
                Status::Pass
            } else {
                Status::Fail
            },
            note: "(lower bound)".to_string(),
        }
    }

    fn info(name: &'static str, measured: f64, note: &str) -> VerifyLine {
        VerifyLine {
            name,
            measured,
            bound: f64::NAN,
            status: Status::Info,
            note: note.to_string(),
        }
    }

    fn fail_with(name: &'static str, note: String) -> VerifyLine {
        VerifyLine {
            name,
            measured: f64::NAN,
            bound: f64::NAN,
            status: Status::Fail,
            note,
        }
    }

    pub fn render(&self) -> String {
        let status = match self.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Warn => "WARN",
            Status::Info => "INFO",
        };
        if self.bound.is_nan() {
            format!("{} measured={} {} {}", self.name, self.measured, status, self.note)
                .trim_end()
                .to_string()
        } else {
            format!(
                "{} measured={} bound={} {} {}",
                self.name, self.measured, self.bound, status, self.note
            )
            .trim_end()
            .to_string()
        }
    }
}

pub struct VerifyReport {
    pub lines: Vec<VerifyLine>,
}

impl VerifyReport {
    pub fn overall_pass(&self) -> bool {
        self.lines.iter().all(|l| l.status != Status::Fail)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for line in &self.lines {
            out.push_str(&line.render());
            out.push('\n');
        }
        out.push_str(if self.overall_pass() {
            "OVERALL PASS\n"
        } else {
            "OVERALL FAIL\n"
        });
        out
    }
}

/// Least-squares fit of `y ~ a + b cos(omega x)`; returns `(a, b, r_squared)`.
pub fn fit_cosine(xs: &[f64], ys: &[f64], omega: f64) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let cs: Vec<f64> = xs.iter().map(|&x| (omega * x).cos()).collect();
    let c_mean = cs.iter().sum::<f64>() / n;
    let y_mean = ys.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var = 0.0;
    for (c, y) in cs.iter().zip(ys.iter()) {
        cov += (c - c_mean) * (y - y_mean);
        var += (c - c_mean) * (c - c_mean);
    }
    let b = if var > 0.0 { cov / var } else { 0.0 };
    let a = y_mean - b * c_mean;
    let mut ss_res = 0.0;
    let mut ss_tot = 0.0;
    for (c, y) in cs.iter().zip(ys.iter()) {
        let fit = a + b * c;
        ss_res += (y - fit) * (y - fit);
        ss_tot += (y - y_mean) * (y - y_mean);
    }
    let r2 = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    (a, b, r2)
}

fn rel_l2(a: &VectorField, b: &VectorField) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in a.vx().iter().zip(b.vx().iter()) {
        num += (x - y).norm_sqr();
        den += y.norm_sqr();
    }
    for (x, y) in a.vy().iter().zip(b.vy().iter()) {
        num += (x - y).norm_sqr();
        den += y.norm_sqr();
    }
    (num / den).sqrt()
}

/// Run every named invariant check. Config-validation failures become FAIL
/// lines (named criteria), not hard errors, so a deliberately broken config
/// produces a readable report with a nonzero exit.
pub fn run_verify(cfg: &RunConfig) -> Result<VerifyReport, RunError> {
    let mut lines = Vec::new();
    let tol = &cfg.tolerances;

    for failure in cfg.validation_failures() {
        let name: &'static str = if failure.starts_with("mode-resolution") {
            "sampling-mode-resolution"
        } else if failure.starts_with("boundary-decay") {
            "sampling-boundary-decay"
        } else if failure.starts_with("fresnel-sampling") {
            "sampling-fresnel-kernel"
        } else {
            "config-validation"
        };
        lines.push(VerifyLine::fail_with(name, failure));
    }
    for warning in cfg.warnings() {
        lines.push(VerifyLine {
            name: "config-warning",
            measured: f64::NAN,
            bound: f64::NAN,
            status: Status::Warn,
            note: warning,
        });
    }
    if !lines.iter().all(|l| l.status != Status::Fail) {
        // sampling criteria failed; the numerical suites would be meaningless
        return Ok(VerifyReport { lines });
    }

    let grid = cfg.grid()?;
    let medium = cfg.medium()?;
    let plate = cfg.plate();

    // grid: Parseval under the documented DFT normalization
    {
        let f = ScalarField::from_fn(grid, |x, y| {
            Complex64::new((0.02 * x).sin() + 1e-3 * y, (0.015 * y).cos())
        });
        let spatial: f64 =
            f.values().iter().map(|v| v.norm_sqr()).sum::<f64>() * grid.cell_area();
        let mut a = f.values().clone();
        fft2::fft2_forward(&mut a);
        let spectral: f64 = a.iter().map(|v| v.norm_sqr()).sum::<f64>() * grid.cell_area()
            / (grid.n() * grid.n()) as f64;
        lines.push(VerifyLine::check(
            "grid-parseval",
            (spatial - spectral).abs() / spatial,
            tol.parseval_rel,
        ));
    }

    // grid: quadrature linearity
    {
        let small = Grid::new(16, 4.0)?;
        let f = ScalarField::from_fn(small, |x, y| Complex64::new(x * y, x - y));
        let g = ScalarField::from_fn(small, |x, y| Complex64::new(y, 0.3 * x));
        let alpha = Complex64::new(0.7, -1.1);
        let beta = Complex64::new(-0.4, 0.2);
        let combo = ScalarField::from_values(
            small,
            Array2::from_shape_fn((16, 16), |idx| {
                alpha * f.values()[idx] + beta * g.values()[idx]
            }),
        )?;
        let lhs = quad_integral(&combo);
        let rhs = alpha * quad_integral(&f) + beta * quad_integral(&g);
        lines.push(VerifyLine::check(
            "grid-quad-linearity",
            (lhs - rhs).norm() / rhs.norm().max(1e-30),
            tol.quad_linearity_rel,
        ));
    }

    // modes: normalization, orbital readout, input energy, spin degree
    let beam = cfg.beam_spec()?;
    {
        let u = lg_mode(beam.lg, grid)?;
        let norm = quad_integral(&ScalarField::from_values(
            grid,
            u.values().mapv(|v| Complex64::new(v.norm_sqr(), 0.0)),
        )?)
        .re;
        lines.push(VerifyLine::check("mode-normalization", norm - 1.0, tol.mode_norm));

        let f = make_input_field(beam, grid)?;
        let report = am_report(&f)?;
        lines.push(VerifyLine::check(
            "mode-orbital-charge",
            report.w_lz - beam.lg.ell as f64,
            tol.orbital_charge,
        ));
        lines.push(VerifyLine::check(
            "input-energy",
            f.energy() - 1.0,
            tol.input_energy,
        ));
        lines.push(VerifyLine::check(
            "input-spin-degree",
            report.w_sz - qplate_core::spin_degree(beam.pol),
            tol.spin_degree,
        ));
        lines.push(VerifyLine::check(
            "spin-method-agreement",
            spin_am(&f, SpinMethod::Density)? - spin_am(&f, SpinMethod::RadialDerivative)?,
            tol.spin_method_agreement,
        ));
    }

    // media: unitarity and composition on the configured medium
    {
        let f = make_input_field(beam, grid)?;
        let out = propagate_homogeneous(&f, 0.4, medium.thickness(), &medium, DispersionModel::Exact);
        lines.push(VerifyLine::check(
            "media-unitarity",
            out.energy() / f.energy() - 1.0,
            tol.unitarity_rel,
        ));
        let (z1, z2) = (0.4 * medium.thickness(), 1.3 * medium.thickness());
        let two = propagate_homogeneous(
            &propagate_homogeneous(&f, 0.4, z1, &medium, DispersionModel::Exact),
            0.4,
            z2,
            &medium,
            DispersionModel::Exact,
        );
        let one = propagate_homogeneous(&f, 0.4, z1 + z2, &medium, DispersionModel::Exact);
        lines.push(VerifyLine::check(
            "media-composition",
            rel_l2(&two, &one),
            tol.composition_rel,
        ));
    }

    // qplate: thin-element energy conservation
    {
        let f = make_input_field(beam, grid)?;
        let out = propagate_with(
            &f,
            &plate,
            &medium,
            KernelMode::ThinElement,
            &cfg.propagation_options(),
        )?;
        lines.push(VerifyLine::check(
            "thin-element-energy",
            out.energy() / f.energy() - 1.0,
            tol.thin_energy_rel,
        ));
    }

    // qplate: approximated-kernel energy conservation in its validity domain
    {
        let gentle = UniaxialMedium::new(
            medium.n_o(),
            medium.n_o() + 0.05 * medium.n_o() * (if medium.n_e() >= medium.n_o() { 1.0 } else { -1.0 }),
            medium.thickness(),
        )?;
        let f = make_input_field(beam, grid)?;
        let out = propagate_with(
            &f,
            &plate,
            &gentle,
            KernelMode::ApproxFresnel,
            &cfg.propagation_options(),
        )?;
        lines.push(VerifyLine::check(
            "fresnel-energy-small-chi",
            out.energy() / f.energy() - 1.0,
            tol.fresnel_energy_rel,
        ));
        let chi = medium.kernel_approx_ratio();
        lines.push(VerifyLine::info(
            "eq-prefactor-energy-deficit",
            0.5 * chi * chi,
            "expected approximated-kernel energy deficit chi^2/2 for the configured medium (reported, not asserted)",
        ));
    }

    // qplate: linearity on a small grid
    {
        let small = Grid::new(64, 40.0)?;
        let f1 = make_input_field(
            BeamSpec {
                lg: LgIndex::new(0, 0, 10.0)?,
                pol: JonesVector::circular_left(),
            },
            small,
        )?;
        let f2 = make_input_field(
            BeamSpec {
                lg: LgIndex::new(1, 0, 12.0)?,
                pol: JonesVector::linear(0.5),
            },
            small,
        )?;
        let alpha = Complex64::new(0.7, -0.2);
        let beta = Complex64::new(-0.1, 1.1);
        let combo = f1.linear_combination(alpha, &f2, beta)?;
        let m = UniaxialMedium::new(1.5, 1.52, 30.0)?;
        let opts = PropagationOptions::default();
        let lhs = propagate_with(&combo, &plate, &m, KernelMode::ApproxFresnel, &opts)?;
        let rhs = propagate_with(&f1, &plate, &m, KernelMode::ApproxFresnel, &opts)?
            .linear_combination(
                alpha,
                &propagate_with(&f2, &plate, &m, KernelMode::ApproxFresnel, &opts)?,
                beta,
            )?;
        lines.push(VerifyLine::check(
            "qplate-linearity",
            rel_l2(&lhs, &rhs),
            tol.linearity_rel,
        ));
    }

    // qplate: handedness antisymmetry at the configured plate/medium
    {
        let mut deltas = Vec::new();
        for pol in [JonesVector::circular_left(), JonesVector::circular_right()] {
            let f = make_input_field(BeamSpec { lg: beam.lg, pol }, grid)?;
            let out = propagate_with(
                &f,
                &plate,
                &medium,
                KernelMode::ApproxFresnel,
                &cfg.propagation_options(),
            )?;
            let b = qplate_core::observables::am_budget(&f, &out)?;
            deltas.push((b.delta_w_lz, b.delta_w_sz));
        }
        lines.push(VerifyLine::check(
            "sigma-antisymmetry",
            (deltas[0].0 + deltas[1].0).abs().max((deltas[0].1 + deltas[1].1).abs()),
            tol.sigma_antisymmetry,
        ));
    }

    // observables: total angular momentum conservation for q = 1
    {
        let mut base = cfg.clone();
        base.plate.q = 1.0;
        base.scan = Some(ScanConfig {
            parameter: ScanParameter::D,
            start: 0.5,
            stop: 10.0,
            steps: 8,
        });
        let rows = run_scan(&base)?;
        let worst = rows
            .iter()
            .map(|r| r.delta_w_jz.abs())
            .fold(0.0, f64::max);
        lines.push(VerifyLine::check("q1-conservation", worst, tol.q1_conservation));
    }

    // observables: measured dL/dS ratio equals -q at the half-wave thickness
    {
        let d_half = medium
            .half_wave_thickness(0)
            .unwrap_or(2.5);
        let mut worst = 0.0_f64;
        for q in [0.5, 1.0, 1.5, 2.0] {
            let mut point = cfg.clone();
            point.plate.q = q;
            point.medium.d = d_half;
            point.beam.polarization = crate::config::PolarizationConfig::CircularLeft;
            let out = run_single(&point)?;
            if out.budget.delta_w_sz.abs() > 0.05 {
                let ratio = out.budget.delta_w_lz / out.budget.delta_w_sz;
                worst = worst.max((ratio + q).abs() / q);
            }
        }
        lines.push(VerifyLine::check("ratio-identity", worst, tol.ratio_identity_rel));
    }

    // observables: thickness modulation shape and closed-form proportionality
    {
        let mut base = cfg.clone();
        base.beam.polarization = crate::config::PolarizationConfig::CircularLeft;
        base.scan = Some(ScanConfig {
            parameter: ScanParameter::D,
            start: 0.5,
            stop: 10.0,
            steps: 41,
        });
        let rows = run_scan(&base)?;
        let omega = qplate_core::K0 * (medium.n_o() - medium.n_e()).abs();
        let xs: Vec<f64> = rows.iter().map(|r| r.value).collect();
        let ys: Vec<f64> = rows.iter().map(|r| r.delta_w_sz).collect();
        let (_, _, r2) = fit_cosine(&xs, &ys, omega);
        lines.push(VerifyLine::check_at_least("modulation-r2", r2, tol.modulation_r2));

        // peak-normalized measured curve against the peak-normalized closed form
        let meas_peak = ys.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let mut closed_peak = 0.0_f64;
        let closed: Vec<f64> = xs
            .iter()
            .map(|&d| {
                let m = UniaxialMedium::new(medium.n_o(), medium.n_e(), d).unwrap();
                let v = delta_s_closed(1.0, &m);
                closed_peak = closed_peak.max(v.abs());
                v
            })
            .collect();
        let mut worst = 0.0_f64;
        for (y, c) in ys.iter().zip(closed.iter()) {
            worst = worst.max((y / meas_peak - c / closed_peak).abs());
        }
        lines.push(VerifyLine::check(
            "closed-form-proportionality",
            worst,
            tol.proportionality_rel,
        ));
        lines.push(VerifyLine::info(
            "empirical-prefactor",
            meas_peak / closed_peak,
            "measured peak / closed-form peak (reported, not asserted)",
        ));

        // extrema sit at the half-wave thicknesses within one scan step
        let step = xs[1] - xs[0];
        let mut extrema = Vec::new();
        for i in 1..rows.len() - 1 {
            if ys[i] < ys[i - 1] && ys[i] < ys[i + 1] {
                extrema.push(xs[i]);
            }
        }
        let mut worst = 0.0_f64;
        let mut matched = true;
        for x in &extrema {
            let m = ((x * 2.0 * (medium.n_o() - medium.n_e()).abs() - 1.0) / 2.0).round();
            if m < 0.0 {
                matched = false;
                continue;
            }
            let d_half = (2.0 * m + 1.0) / (2.0 * (medium.n_o() - medium.n_e()).abs());
            worst = worst.max((x - d_half).abs());
        }
        lines.push(VerifyLine {
            name: "extrema-location",
            measured: worst,
            bound: step,
            status: if matched && !extrema.is_empty() && worst <= step {
                Status::Pass
            } else {
                Status::Fail
            },
            note: format!("{} extrema found", extrema.len()),
        });
    }

    // qplate: isotropic reduction against the angular-spectrum route
    {
        let iso = UniaxialMedium::new(medium.n_o(), medium.n_o(), medium.thickness())?;
        let f = make_input_field(beam, grid)?;
        let out = propagate_with(
            &f,
            &plate,
            &iso,
            KernelMode::ApproxFresnel,
            &cfg.propagation_options(),
        )?;
        let reference =
            propagate_homogeneous(&f, 0.0, iso.thickness(), &iso, DispersionModel::Exact);
        lines.push(VerifyLine::check(
            "isotropic-reduction",
            rel_l2(&out, &reference),
            tol.isotropic_reduction_l2,
        ));
    }

    // qplate: exact-kernel cross-check at the frozen small-birefringence point
    {
        let small = Grid::new(64, 40.0)?;
        let f = make_input_field(
            BeamSpec {
                lg: LgIndex::new(1, 0, 10.0)?,
                pol: JonesVector::circular_left(),
            },
            small,
        )?;
        let p = QPlateSpec::new(1.0, 0.0);
        let m = UniaxialMedium::new(1.5, 1.5005, 150.0)?;
        let ir = PropagationOptions {
            conv_form: ConvForm::ImpulseResponse,
            ..Default::default()
        };
        let approx = propagate_with(&f, &p, &m, KernelMode::ApproxFresnel, &ir)?;
        let exact = propagate_with(&f, &p, &m, KernelMode::ExactFresnel, &Default::default())?;
        lines.push(VerifyLine::check(
            "exact-kernel-crosscheck",
            rel_l2(&approx, &exact),
            tol.exact_kernel_l2,
        ));
    }

    // qplate: thin-element full conversion on a fine grid
    {
        let fine = Grid::new(512, 56.0)?;
        let f = make_input_field(
            BeamSpec {
                lg: LgIndex::new(0, 0, 16.0)?,
                pol: JonesVector::circular_left(),
            },
            fine,
        )?;
        let m = UniaxialMedium::new(1.5, 1.7, 2.5)?;
        let out = propagate_with(
            &f,
            &QPlateSpec::new(1.0, 0.0),
            &m,
            KernelMode::ThinElement,
            &Default::default(),
        )?;
        let report = am_report(&out)?;
        lines.push(VerifyLine::check(
            "thin-full-conversion",
            (report.w_lz - 2.0).abs().max((report.w_sz + 1.0).abs()),
            tol.thin_conversion,
        ));
    }

    Ok(VerifyReport { lines })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::load_config;

    #[test]
    fn cosine_fit_recovers_exact_coefficients() {
        let omega = 2.0 * std::f64::consts::PI * 0.2;
        let xs: Vec<f64> = (0..50).map(|i| 0.5 + 0.19 * i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| 1.5 - 0.75 * (omega * x).cos()).collect();
        let (a, b, r2) = fit_cosine(&xs, &ys, omega);
        assert!((a - 1.5).abs() < 1e-12);
        assert!((b + 0.75).abs() < 1e-12);
        assert!(r2 > 1.0 - 1e-12);
    }

    #[test]
    fn default_config_passes_every_check() {
        let cfg = load_config(None, &[]).unwrap();
        let report = run_verify(&cfg).unwrap();
        let rendered = report.render();
        assert!(report.overall_pass(), "verify failed:\n{rendered}");
        // the spec-named checks are present
        for name in [
            "grid-parseval",
            "q1-conservation",
            "ratio-identity",
            "modulation-r2",
            "closed-form-proportionality",
            "empirical-prefactor",
            "exact-kernel-crosscheck",
            "extrema-location",
        ] {
            assert!(rendered.contains(name), "missing {name}:\n{rendered}");
        }
    }

    #[test]
    fn undersized_grid_fails_with_named_sampling_criterion() {
        let cfg = load_config(None, &["grid.n=16".to_string()]).unwrap();
        let report = run_verify(&cfg).unwrap();
        assert!(!report.overall_pass());
        assert!(report
            .lines
            .iter()
            .any(|l| l.name == "sampling-mode-resolution" && l.status == Status::Fail));
    }
}
