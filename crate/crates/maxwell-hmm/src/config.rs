//! JSON run configuration. Every section and key is optional; missing
//! values take the defaults of the standard scattering setup.

use std::path::Path;

use hmm_core::cell::MicroCoefficients;
use hmm_core::hmm::HmmConfig;
use hmm_core::mesh::AxisBox;
use hmm_core::scatter::incident_plane_wave;
use hmm_core::C64;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxSpec {
    pub lo: [f64; 3],
    pub hi: [f64; 3],
}

impl BoxSpec {
    pub fn cube(a: f64, b: f64) -> Self {
        Self { lo: [a; 3], hi: [b; 3] }
    }

    pub fn to_box(self, what: &str) -> Result<AxisBox, CliError> {
        AxisBox::new(self.lo, self.hi).map_err(|e| CliError::Config(format!("{what}: {e}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Geometry {
    pub domain: BoxSpec,
    pub scatterer: BoxSpec,
}

impl Default for Geometry {
    fn default() -> Self {
        Self { domain: BoxSpec::cube(0.0, 1.0), scatterer: BoxSpec::cube(0.25, 0.75) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WaveConfig {
    pub k: f64,
    pub direction: [f64; 3],
    pub polarization: [f64; 3],
    /// `[re, im]`.
    pub amplitude: [f64; 2],
}

impl Default for WaveConfig {
    fn default() -> Self {
        Self { k: 12.0, direction: [1.0, 0.0, 0.0], polarization: [0.0, 1.0, 0.0], amplitude: [1.0, 0.0] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MicroConfig {
    pub n: usize,
    pub eps0_inv: f64,
    /// `[re, im]`.
    pub eps1_inv: [f64; 2],
    /// `null` for a cell without inclusion.
    pub inclusion: Option<BoxSpec>,
}

impl Default for MicroConfig {
    fn default() -> Self {
        Self { n: 12, eps0_inv: 1.0, eps1_inv: [1.0, -0.01], inclusion: Some(BoxSpec::cube(0.25, 0.75)) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MacroConfig {
    pub n: usize,
}

impl Default for MacroConfig {
    fn default() -> Self {
        Self { n: 12 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    /// Explicit grid; overrides `k_min`, `k_max` and `dk`.
    pub k_values: Option<Vec<f64>>,
    pub k_min: f64,
    pub k_max: f64,
    pub dk: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self { k_values: None, k_min: 5.0, k_max: 25.0, dk: 0.1 }
    }
}

impl SweepConfig {
    pub fn grid(&self) -> Result<Vec<f64>, CliError> {
        let grid = match &self.k_values {
            Some(v) => v.clone(),
            None => {
                if !(self.dk > 0.0 && self.k_max >= self.k_min && self.k_min.is_finite() && self.k_max.is_finite()) {
                    return Err(CliError::Config("sweep needs dk > 0 and k_max >= k_min".into()));
                }
                let m = ((self.k_max - self.k_min) / self.dk + 1e-9).floor() as usize;
                (0..=m).map(|i| self.k_min + i as f64 * self.dk).collect()
            }
        };
        if grid.is_empty() {
            return Err(CliError::Config("sweep grid is empty".into()));
        }
        if grid.iter().any(|k| !k.is_finite() || *k < 0.0) {
            return Err(CliError::Config("sweep wavenumbers must be finite and non-negative".into()));
        }
        if grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(CliError::Config("sweep grid must be strictly increasing".into()));
        }
        Ok(grid)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SliceConfig {
    pub axis: usize,
    pub offset: f64,
    /// Samples per direction.
    pub samples: usize,
}

impl Default for SliceConfig {
    fn default() -> Self {
        Self { axis: 1, offset: 0.545, samples: 64 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReconstructionConfig {
    /// Period of the microstructure.
    pub delta: f64,
    pub slice: SliceConfig,
}

impl Default for ReconstructionConfig {
    fn default() -> Self {
        Self { delta: 0.125, slice: SliceConfig::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceSpec {
    pub macro_n: usize,
    pub micro_n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StudyConfig {
    pub meshes: Vec<usize>,
    pub reference: Option<ReferenceSpec>,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self { meshes: vec![4, 8, 12], reference: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub vtk: bool,
    pub matrix_market: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { vtk: true, matrix_market: false }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub geometry: Geometry,
    pub wave: WaveConfig,
    pub micro: MicroConfig,
    #[serde(rename = "macro")]
    pub macro_mesh: MacroConfig,
    pub sweep: SweepConfig,
    pub reconstruction: ReconstructionConfig,
    pub study: StudyConfig,
    pub output: OutputConfig,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// `--k` replaces the wavenumber; `--mesh-n` the macro and micro resolution.
    pub fn apply_overrides(&mut self, k: Option<f64>, mesh_n: Option<usize>) {
        if let Some(k) = k {
            self.wave.k = k;
        }
        if let Some(n) = mesh_n {
            self.macro_mesh.n = n;
            self.micro.n = n;
        }
    }

    pub fn micro_coefficients(&self) -> Result<MicroCoefficients, CliError> {
        let c = MicroCoefficients {
            eps0_inv: self.micro.eps0_inv,
            eps1_inv: C64::new(self.micro.eps1_inv[0], self.micro.eps1_inv[1]),
        };
        c.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(c)
    }

    pub fn inclusion(&self) -> Result<Option<AxisBox>, CliError> {
        self.micro.inclusion.map(|b| b.to_box("micro.inclusion")).transpose()
    }

    pub fn hmm_config(&self) -> Result<HmmConfig, CliError> {
        let w = &self.wave;
        let amplitude = C64::new(w.amplitude[0], w.amplitude[1]);
        incident_plane_wave(w.k.max(0.0), w.direction, w.polarization, amplitude)
            .map_err(|e| CliError::Config(format!("wave: {e}")))?;
        let domain = self.geometry.domain.to_box("geometry.domain")?;
        let scatterer = self.geometry.scatterer.to_box("geometry.scatterer")?;
        if !domain.contains_box_strictly(&scatterer) {
            return Err(CliError::Config("geometry.scatterer must lie strictly inside geometry.domain".into()));
        }
        Ok(HmmConfig {
            domain,
            scatterer,
            direction: w.direction,
            polarization: w.polarization,
            amplitude,
            micro: self.micro_coefficients()?,
            inclusion: self.inclusion()?,
        })
    }

    pub fn wavenumber(&self) -> Result<f64, CliError> {
        let k = self.wave.k;
        if !(k.is_finite() && k > 0.0) {
            return Err(CliError::Config("wave.k must be positive".into()));
        }
        Ok(k)
    }

    /// Checks the settings every command relies on.
    pub fn validate(&self) -> Result<(), CliError> {
        self.hmm_config()?;
        if self.micro.n == 0 || self.macro_mesh.n == 0 {
            return Err(CliError::Config("mesh resolutions must be at least 1".into()));
        }
        let r = &self.reconstruction;
        if !(r.delta.is_finite() && r.delta > 0.0) {
            return Err(CliError::Config("reconstruction.delta must be positive".into()));
        }
        if r.slice.axis > 2 || r.slice.samples == 0 {
            return Err(CliError::Config("reconstruction.slice needs axis in 0..=2 and samples >= 1".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_partial_files() {
        let c = RunConfig::from_json(r#"{"wave": {"k": 9}, "micro": {"inclusion": null}}"#).unwrap();
        assert_eq!(c.wave.k, 9.0);
        assert_eq!(c.wave.polarization, [0.0, 1.0, 0.0]);
        assert!(c.micro.inclusion.is_none());
        assert_eq!(c.macro_mesh.n, 12);
        assert!(c.validate().is_ok());
    }

    #[test]
    fn unknown_keys_and_bad_values_are_rejected() {
        assert!(RunConfig::from_json(r#"{"wave": {"kk": 9}}"#).is_err());
        let c = RunConfig::from_json(r#"{"micro": {"eps0_inv": -1}}"#).unwrap();
        assert!(c.validate().is_err());
        let c = RunConfig::from_json(r#"{"wave": {"polarization": [1, 0, 0]}}"#).unwrap();
        assert!(c.validate().is_err());
    }

    #[test]
    fn sweep_grid() {
        let g = SweepConfig::default().grid().unwrap();
        assert_eq!(g.len(), 201);
        assert!((g[200] - 25.0).abs() < 1e-12);
        let s = SweepConfig { k_values: Some(vec![3.0, 2.0]), ..SweepConfig::default() };
        assert!(s.grid().is_err());
    }

    #[test]
    fn shipped_config_spells_out_the_defaults() {
        let c = RunConfig::from_json(include_str!("../configs/standard.json")).unwrap();
        let mut d = RunConfig::default();
        d.study.reference = Some(ReferenceSpec { macro_n: 24, micro_n: 12 });
        assert_eq!(c, d);
    }
}
