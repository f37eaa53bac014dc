//! Run configuration: JSON schema with documented defaults, validation
//! against the sampling criteria, and `--set key=value` overrides.
//!
//! Every field has a default, so an empty config document (`{}`) is a valid,
//! runnable configuration. Defaults: 256-sample grid with auto half-width,
//! fundamental left-circular Gaussian beam with `w0 = 100` wavelengths,
//! medium `n_o = 1.5, n_e = 1.7` at the first half-wave thickness
//! `d = 2.5`, a `q = 1` plate, the approximated Fresnel kernel, and a
//! 48-point thickness scan over `[0.5, 10]`.

use qplate_core::qplate::{ConvForm, KernelMode, PropagationOptions, QPlateSpec};
use qplate_core::{
    modes, BeamSpec, Grid, JonesVector, LgIndex, UniaxialMedium, VectorField,
};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("bad --set override '{spec}': {reason}")]
    BadOverride { spec: String, reason: String },
    #[error("config validation failed: {}", failures.join("; "))]
    Validation { failures: Vec<String> },
    #[error("{0}")]
    Domain(#[from] qplate_core::Error),
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    /// Samples per axis (even, >= 8).
    pub n: usize,
    /// Physical half-extent in wavelengths; `null` sizes it automatically so
    /// the configured beam decays below 1e-9 of peak at the boundary
    /// (starting from `4*w0 + 64`).
    pub half_width: Option<f64>,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            n: 256,
            half_width: None,
        }
    }
}

/// Polarization state selector.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum PolarizationConfig {
    /// `(1, i)/sqrt(2)`, spin +1.
    CircularLeft,
    /// `(1, -i)/sqrt(2)`, spin -1.
    CircularRight,
    /// Linear at `angle` radians from +x, spin 0.
    Linear { angle: f64 },
    /// `(cos t, i sin t)` with `sin 2t = sigma`.
    Spin { sigma: f64 },
    /// Explicit Jones amplitudes as `[re, im]` pairs (normalized on load).
    Jones { a: [f64; 2], b: [f64; 2] },
}

impl PolarizationConfig {
    pub fn to_jones(&self) -> Result<JonesVector, qplate_core::Error> {
        match self {
            PolarizationConfig::CircularLeft => Ok(JonesVector::circular_left()),
            PolarizationConfig::CircularRight => Ok(JonesVector::circular_right()),
            PolarizationConfig::Linear { angle } => Ok(JonesVector::linear(*angle)),
            PolarizationConfig::Spin { sigma } => JonesVector::with_spin(*sigma),
            PolarizationConfig::Jones { a, b } => JonesVector::new(
                Complex64::new(a[0], a[1]),
                Complex64::new(b[0], b[1]),
            ),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct BeamConfig {
    pub ell: i32,
    pub p: u32,
    /// Waist in wavelengths.
    pub w0: f64,
    pub polarization: PolarizationConfig,
}

impl Default for BeamConfig {
    fn default() -> Self {
        BeamConfig {
            ell: 0,
            p: 0,
            w0: 100.0,
            polarization: PolarizationConfig::CircularLeft,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct MediumConfig {
    pub n_o: f64,
    pub n_e: f64,
    /// Thickness in wavelengths.
    pub d: f64,
}

impl Default for MediumConfig {
    fn default() -> Self {
        MediumConfig {
            n_o: 1.5,
            n_e: 1.7,
            d: 2.5,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct PlateConfig {
    pub q: f64,
    pub alpha0: f64,
}

impl Default for PlateConfig {
    fn default() -> Self {
        PlateConfig { q: 1.0, alpha0: 0.0 }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum KernelModeConfig {
    ThinElement,
    ApproxFresnel,
    ExactFresnel,
}

impl From<KernelModeConfig> for KernelMode {
    fn from(k: KernelModeConfig) -> KernelMode {
        match k {
            KernelModeConfig::ThinElement => KernelMode::ThinElement,
            KernelModeConfig::ApproxFresnel => KernelMode::ApproxFresnel,
            KernelModeConfig::ExactFresnel => KernelMode::ExactFresnel,
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum ConvFormConfig {
    Auto,
    ImpulseResponse,
    TransferFunction,
}

impl From<ConvFormConfig> for ConvForm {
    fn from(c: ConvFormConfig) -> ConvForm {
        match c {
            ConvFormConfig::Auto => ConvForm::Auto,
            ConvFormConfig::ImpulseResponse => ConvForm::ImpulseResponse,
            ConvFormConfig::TransferFunction => ConvForm::TransferFunction,
        }
    }
}

/// Scannable parameter.
#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum ScanParameter {
    D,
    Q,
    Alpha0,
    Sigma,
    W0,
    Ell,
    P,
}

impl ScanParameter {
    pub fn name(&self) -> &'static str {
        match self {
            ScanParameter::D => "d",
            ScanParameter::Q => "q",
            ScanParameter::Alpha0 => "alpha0",
            ScanParameter::Sigma => "sigma",
            ScanParameter::W0 => "w0",
            ScanParameter::Ell => "ell",
            ScanParameter::P => "p",
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct ScanConfig {
    pub parameter: ScanParameter,
    pub start: f64,
    pub stop: f64,
    /// Number of scan points, >= 2.
    pub steps: usize,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            parameter: ScanParameter::D,
            start: 0.5,
            stop: 10.0,
            steps: 48,
        }
    }
}

impl ScanConfig {
    pub fn values(&self) -> Vec<f64> {
        let n = self.steps.max(2);
        (0..n)
            .map(|i| self.start + (self.stop - self.start) * i as f64 / (n - 1) as f64)
            .collect()
    }
}

/// Tolerances used by the verification suite; all overridable.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub parseval_rel: f64,
    pub quad_linearity_rel: f64,
    pub mode_norm: f64,
    pub orbital_charge: f64,
    pub input_energy: f64,
    pub spin_degree: f64,
    pub unitarity_rel: f64,
    pub composition_rel: f64,
    pub thin_energy_rel: f64,
    pub fresnel_energy_rel: f64,
    pub linearity_rel: f64,
    pub sigma_antisymmetry: f64,
    pub spin_method_agreement: f64,
    pub q1_conservation: f64,
    pub ratio_identity_rel: f64,
    pub modulation_r2: f64,
    pub proportionality_rel: f64,
    pub exact_kernel_l2: f64,
    pub isotropic_reduction_l2: f64,
    pub thin_conversion: f64,
    pub boundary_decay: f64,
    pub kernel_approx_warn: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            parseval_rel: 1e-12,
            quad_linearity_rel: 1e-12,
            mode_norm: 1e-6,
            orbital_charge: 1e-4,
            input_energy: 1e-6,
            spin_degree: 1e-6,
            unitarity_rel: 1e-10,
            composition_rel: 1e-10,
            thin_energy_rel: 1e-12,
            fresnel_energy_rel: 1e-3,
            linearity_rel: 1e-10,
            sigma_antisymmetry: 2e-3,
            spin_method_agreement: 1e-3,
            q1_conservation: 2e-3,
            ratio_identity_rel: 0.01,
            modulation_r2: 0.999,
            proportionality_rel: 0.01,
            exact_kernel_l2: 1e-3,
            isotropic_reduction_l2: 1e-6,
            thin_conversion: 2e-3,
            boundary_decay: 1e-8,
            kernel_approx_warn: 0.1,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Default)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub grid: GridConfig,
    pub beam: BeamConfig,
    pub medium: MediumConfig,
    pub plate: PlateConfig,
    pub kernel_mode: Option<KernelModeConfig>,
    pub conv_form: Option<ConvFormConfig>,
    pub exact_grid_cap: Option<usize>,
    pub scan: Option<ScanConfig>,
    pub tolerances: Tolerances,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<RunConfig, ConfigError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn kernel_mode(&self) -> KernelMode {
        self.kernel_mode
            .unwrap_or(KernelModeConfig::ApproxFresnel)
            .into()
    }

    pub fn propagation_options(&self) -> PropagationOptions {
        PropagationOptions {
            conv_form: self.conv_form.unwrap_or(ConvFormConfig::Auto).into(),
            exact_grid_cap: self.exact_grid_cap.unwrap_or(96),
        }
    }

    pub fn lg_index(&self) -> Result<LgIndex, qplate_core::Error> {
        LgIndex::new(self.beam.ell, self.beam.p, self.beam.w0)
    }

    pub fn beam_spec(&self) -> Result<BeamSpec, qplate_core::Error> {
        Ok(BeamSpec {
            lg: self.lg_index()?,
            pol: self.beam.polarization.to_jones()?,
        })
    }

    pub fn medium(&self) -> Result<UniaxialMedium, qplate_core::Error> {
        UniaxialMedium::new(self.medium.n_o, self.medium.n_e, self.medium.d)
    }

    pub fn plate(&self) -> QPlateSpec {
        QPlateSpec::new(self.plate.q, self.plate.alpha0)
    }

    /// Resolved grid half-width: explicit value, or automatic sizing from the
    /// beam (grown from `4*w0 + 64` until the analytic radial profile decays
    /// below 1e-9 of its peak at the boundary).
    pub fn resolved_half_width(&self) -> Result<f64, qplate_core::Error> {
        if let Some(hw) = self.grid.half_width {
            return Ok(hw);
        }
        let idx = self.lg_index()?;
        let mut hw = 4.0 * self.beam.w0 + 64.0;
        for _ in 0..64 {
            if boundary_decay(idx, hw) <= 1e-9 {
                break;
            }
            hw *= 1.15;
        }
        Ok(hw)
    }

    pub fn grid(&self) -> Result<Grid, qplate_core::Error> {
        Grid::new(self.grid.n, self.resolved_half_width()?)
    }

    pub fn input_field(&self) -> Result<VectorField, qplate_core::Error> {
        modes::make_input_field(self.beam_spec()?, self.grid()?)
    }

    /// Named sampling-criteria checks. Empty when the configuration is sound.
    pub fn validation_failures(&self) -> Vec<String> {
        let mut failures = Vec::new();
        let grid = match self.grid() {
            Ok(g) => g,
            Err(e) => {
                failures.push(format!("grid: {e}"));
                return failures;
            }
        };
        let idx = match self.lg_index() {
            Ok(i) => i,
            Err(e) => {
                failures.push(format!("beam: {e}"));
                return failures;
            }
        };
        if let Err(e) = self.beam_spec() {
            failures.push(format!("polarization: {e}"));
        }
        if self.beam.w0 < 8.0 * grid.step() {
            failures.push(format!(
                "mode-resolution: w0 = {} < 8 * step = {}",
                self.beam.w0,
                8.0 * grid.step()
            ));
        }
        let decay = boundary_decay(idx, grid.half_width());
        if decay > self.tolerances.boundary_decay {
            failures.push(format!(
                "boundary-decay: profile at half_width is {decay:.3e} of peak, above {:.1e}",
                self.tolerances.boundary_decay
            ));
        }
        match self.medium() {
            Ok(m) => {
                if matches!(self.conv_form, Some(ConvFormConfig::ImpulseResponse))
                    && qplate_core::qplate::kernel_sampling_margin(grid, &m) >= 1.0
                {
                    failures.push(format!(
                        "fresnel-sampling: impulse-response kernel undersampled, margin = {:.3}",
                        qplate_core::qplate::kernel_sampling_margin(grid, &m)
                    ));
                }
            }
            Err(e) => failures.push(format!("medium: {e}")),
        }
        if matches!(self.kernel_mode(), KernelMode::ExactFresnel)
            && self.grid.n > self.propagation_options().exact_grid_cap
        {
            failures.push(format!(
                "exact-grid-cap: n = {} exceeds cap {}",
                self.grid.n,
                self.propagation_options().exact_grid_cap
            ));
        }
        if let Some(scan) = &self.scan {
            if scan.steps < 2 {
                failures.push(format!("scan-steps: {} < 2", scan.steps));
            }
        }
        failures
    }

    /// Non-fatal advisories (the run proceeds).
    pub fn warnings(&self) -> Vec<String> {
        let mut warnings = Vec::new();
        if let Ok(m) = self.medium() {
            let ratio = m.kernel_approx_ratio();
            if ratio > self.tolerances.kernel_approx_warn
                && matches!(self.kernel_mode(), KernelMode::ApproxFresnel)
            {
                warnings.push(format!(
                    "kernel-approx-ratio: |delta_beta_e|/beta_e = {ratio:.4} exceeds {}; \
                     the approximated extraordinary kernel loses ~chi^2/2 of the energy",
                    self.tolerances.kernel_approx_warn
                ));
            }
        }
        if !self.plate().axis_is_defect_only() {
            warnings.push(format!(
                "plate-winding: 2q = {} is not an integer; the axis pattern has \
                 discontinuity lines, not just a central defect",
                2.0 * self.plate.q
            ));
        }
        warnings
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let failures = self.validation_failures();
        if failures.is_empty() {
            Ok(())
        } else {
            Err(ConfigError::Validation { failures })
        }
    }

    /// Apply the scanned parameter value, returning the adjusted config.
    pub fn with_scan_value(&self, parameter: ScanParameter, value: f64) -> RunConfig {
        let mut cfg = self.clone();
        match parameter {
            ScanParameter::D => cfg.medium.d = value,
            ScanParameter::Q => cfg.plate.q = value,
            ScanParameter::Alpha0 => cfg.plate.alpha0 = value,
            ScanParameter::Sigma => {
                cfg.beam.polarization = PolarizationConfig::Spin { sigma: value }
            }
            ScanParameter::W0 => cfg.beam.w0 = value,
            ScanParameter::Ell => cfg.beam.ell = value.round() as i32,
            ScanParameter::P => cfg.beam.p = value.round().max(0.0) as u32,
        }
        cfg
    }
}

/// Boundary amplitude of the analytic radial profile relative to its peak.
fn boundary_decay(idx: LgIndex, half_width: f64) -> f64 {
    let samples = 2048;
    let mut peak = 0.0_f64;
    for i in 0..=samples {
        let r = half_width * i as f64 / samples as f64;
        peak = peak.max(modes::radial_profile(idx, r).abs());
    }
    if peak == 0.0 {
        return 1.0;
    }
    modes::radial_profile(idx, half_width).abs() / peak
}

/// Apply one `key.path=value` override onto a JSON config document. Values
/// parse as JSON when possible (numbers, booleans, objects), otherwise as
/// strings.
pub fn apply_set_override(doc: &mut serde_json::Value, spec: &str) -> Result<(), ConfigError> {
    let (path, raw) = spec.split_once('=').ok_or_else(|| ConfigError::BadOverride {
        spec: spec.to_string(),
        reason: "expected key.path=value".to_string(),
    })?;
    if path.is_empty() {
        return Err(ConfigError::BadOverride {
            spec: spec.to_string(),
            reason: "empty key path".to_string(),
        });
    }
    let value: serde_json::Value = serde_json::from_str(raw)
        .unwrap_or_else(|_| serde_json::Value::String(raw.to_string()));
    let mut cursor = doc;
    let parts: Vec<&str> = path.split('.').collect();
    for part in &parts[..parts.len() - 1] {
        if !cursor.is_object() {
            return Err(ConfigError::BadOverride {
                spec: spec.to_string(),
                reason: format!("'{part}' is not an object"),
            });
        }
        cursor = cursor
            .as_object_mut()
            .unwrap()
            .entry(part.to_string())
            .or_insert_with(|| serde_json::Value::Object(Default::default()));
    }
    match cursor.as_object_mut() {
        Some(map) => {
            map.insert(parts[parts.len() - 1].to_string(), value);
            Ok(())
        }
        None => Err(ConfigError::BadOverride {
            spec: spec.to_string(),
            reason: "parent is not an object".to_string(),
        }),
    }
}

/// Parse a config from JSON text (empty or missing text = all defaults),
/// apply overrides, and re-validate the schema.
pub fn load_config(text: Option<&str>, overrides: &[String]) -> Result<RunConfig, ConfigError> {
    let mut doc: serde_json::Value = match text {
        Some(t) if !t.trim().is_empty() => serde_json::from_str(t)?,
        _ => serde_json::Value::Object(Default::default()),
    };
    for spec in overrides {
        apply_set_override(&mut doc, spec)?;
    }
    Ok(serde_json::from_value(doc)?)
}
