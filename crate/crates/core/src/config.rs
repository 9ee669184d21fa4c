//! JSON run configuration, its resolution into model types, and the run
//! manifest written next to every result.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::density::{Diagnostics, FrequencyGrid, PumpSpectrum, QuadratureSpec, SpectralFilter, TabulatedSpectrum};
use crate::dispersion::{solve_phase_matching_angle, CrystalConfig, GeometryConfig, Material};
use crate::error::{Error, Result};
use crate::kernel::BeamGeometry;
use crate::source::SourceConfig;
use crate::units::{omega_from_wavelength_nm, wavelength_nm_from_omega};

pub const DEFAULT_PUMP_CENTER_NM: f64 = 400.0;
pub const MANIFEST_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrystalSection {
    pub material: Material,
    pub length_mm: f64,
    pub cut_angle_deg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PumpSection {
    pub waist_um: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duration_fs: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center_nm: Option<f64>,
    /// CSV with columns wavelength_nm, re_amplitude, im_amplitude; relative
    /// paths are taken from the config file's directory.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectrum_file: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlphaSpec {
    Auto,
    Degrees(f64),
}

impl Serialize for AlphaSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            AlphaSpec::Auto => s.serialize_str("auto"),
            AlphaSpec::Degrees(d) => s.serialize_f64(*d),
        }
    }
}

impl<'de> Deserialize<'de> for AlphaSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match Value::deserialize(d)? {
            Value::String(s) if s == "auto" => Ok(AlphaSpec::Auto),
            Value::Number(n) => n
                .as_f64()
                .map(AlphaSpec::Degrees)
                .ok_or_else(|| serde::de::Error::custom("alpha_deg is not a finite number")),
            other => Err(serde::de::Error::custom(format!(
                "alpha_deg must be a number or \"auto\", got {other}"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CollectionSection {
    pub waist_um: f64,
    pub alpha_deg: AlphaSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterSection {
    pub fwhm_nm: f64,
    /// Defaults to the degenerate wavelength.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center_nm: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub lambda_min_nm: f64,
    pub lambda_max_nm: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSection {
    pub nz: usize,
    pub nzp: usize,
    pub nws: usize,
    /// ω_s half-window in units of 1/τ_p.
    #[serde(default = "default_window")]
    pub omega_s_window: f64,
}

fn default_window() -> f64 {
    QuadratureSpec::default().window
}

impl Default for QuadratureSection {
    fn default() -> Self {
        let q = QuadratureSpec::default();
        Self {
            nz: q.n_z,
            nzp: q.n_z_prime,
            nws: q.n_omega_s,
            omega_s_window: q.window,
        }
    }
}

/// The configuration document as written by the user.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub crystal: CrystalSection,
    pub pump: PumpSection,
    pub collection: CollectionSection,
    /// `null` or absent for an unfiltered source.
    #[serde(default)]
    pub filter: Option<FilterSection>,
    pub grid: GridSection,
    #[serde(default)]
    pub quadrature: QuadratureSection,
}

/// A configuration turned into model objects, with every default filled in.
#[derive(Debug, Clone)]
pub struct ResolvedConfig {
    /// The document with defaults materialized and paths made absolute.
    pub config: RunConfig,
    pub source: SourceConfig,
    pub grid: FrequencyGrid,
    pub quadrature: QuadratureSpec,
    pub alpha_deg: f64,
    pub alpha_solved: bool,
    pub hash: String,
}

fn positive(field: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::config(field, format!("must be positive, got {v}")))
    }
}

fn in_window(field: &str, material: Material, lambda_nm: f64) -> Result<()> {
    let (lo, hi) = material.transparency_window_um();
    if lambda_nm >= 1e3 * lo && lambda_nm <= 1e3 * hi {
        Ok(())
    } else {
        Err(Error::config(
            field,
            format!("{lambda_nm} nm outside the {} dispersion window [{}, {}] nm", material.name(), 1e3 * lo, 1e3 * hi),
        ))
    }
}

impl RunConfig {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text).map_err(|e| Error::config("<document>", e.to_string()))?;
        Self::from_value(value)
    }

    /// Accepts a configuration document or a run manifest (whose `config`
    /// member is used).
    pub fn from_value(value: Value) -> Result<Self> {
        let value = match value {
            Value::Object(mut map) if map.contains_key("manifest_version") => {
                map.remove("config").ok_or_else(|| Error::config("config", "manifest has no config member"))?
            }
            v => v,
        };
        serde_json::from_value(value).map_err(|e| {
            let msg = e.to_string();
            let field = msg
                .split('`')
                .nth(1)
                .map(str::to_string)
                .unwrap_or_else(|| "<document>".to_string());
            Error::config(field, msg)
        })
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::config("--config", format!("{}: {e}", path.display())))?;
        let mut cfg = Self::from_json_str(&text)?;
        if let Some(file) = &cfg.pump.spectrum_file {
            if file.is_relative() {
                let base = path.parent().unwrap_or(Path::new("."));
                cfg.pump.spectrum_file = Some(base.join(file));
            }
        }
        Ok(cfg)
    }

    pub fn to_value(&self) -> Value {
        serde_json::to_value(self).expect("config serializes")
    }

    /// Returns a copy with the member at `path` (dotted, e.g.
    /// `filter.fwhm_nm`) replaced.
    pub fn with_override(&self, path: &str, value: Value) -> Result<Self> {
        let mut doc = self.to_value();
        let pointer = format!("/{}", path.replace('.', "/"));
        match doc.pointer_mut(&pointer) {
            Some(slot) => *slot = value,
            None => return Err(Error::config(path, "no such member in this configuration")),
        }
        Self::from_value(doc)
    }

    /// Validates, fills defaults, loads spectra and solves for α if needed.
    pub fn resolve(&self) -> Result<ResolvedConfig> {
        let mut cfg = self.clone();
        let material = cfg.crystal.material;

        let length_um = 1e3 * positive("crystal.length_mm", cfg.crystal.length_mm)?;
        let cut = cfg.crystal.cut_angle_deg;
        if !(cut > 0.0 && cut < 90.0) {
            return Err(Error::config("crystal.cut_angle_deg", "must lie in (0, 90)"));
        }
        let crystal = CrystalConfig::new(material, length_um, cut.to_radians())?;

        let pump = match (&cfg.pump.spectrum_file, cfg.pump.duration_fs) {
            (Some(_), Some(_)) => {
                return Err(Error::config("pump", "give either duration_fs or spectrum_file, not both"));
            }
            (Some(file), None) => {
                if cfg.pump.center_nm.is_some() {
                    return Err(Error::config("pump.center_nm", "not used with spectrum_file"));
                }
                PumpSpectrum::Tabulated(TabulatedSpectrum::from_csv_path(file)?)
            }
            (None, Some(tau)) => {
                let center = *cfg.pump.center_nm.get_or_insert(DEFAULT_PUMP_CENTER_NM);
                positive("pump.center_nm", center)?;
                PumpSpectrum::gaussian(positive("pump.duration_fs", tau)?, omega_from_wavelength_nm(center))?
            }
            (None, None) => return Err(Error::config("pump", "need duration_fs or spectrum_file")),
        };
        let omega0 = 0.5 * pump.center();
        in_window("pump.center_nm", material, wavelength_nm_from_omega(2.0 * omega0))?;
        in_window("pump.center_nm", material, wavelength_nm_from_omega(omega0))?;

        let beams = BeamGeometry::new(cfg.pump.waist_um, cfg.collection.waist_um)?;

        let (alpha_deg, alpha_solved) = match cfg.collection.alpha_deg {
            AlphaSpec::Auto => (solve_phase_matching_angle(&crystal, omega0)?.to_degrees(), true),
            AlphaSpec::Degrees(d) => {
                if !(d >= 0.0 && d < 90.0) {
                    return Err(Error::config("collection.alpha_deg", "must lie in [0, 90)"));
                }
                (d, false)
            }
        };
        let geometry = GeometryConfig::new(alpha_deg.to_radians(), omega0)?;

        let filter = match &mut cfg.filter {
            Some(f) => {
                let center = *f.center_nm.get_or_insert(wavelength_nm_from_omega(omega0));
                Some(SpectralFilter::from_nm(positive("filter.fwhm_nm", f.fwhm_nm)?, positive("filter.center_nm", center)?)?)
            }
            None => None,
        };

        let g = &cfg.grid;
        if g.points < 2 {
            return Err(Error::config("grid.points", "must be at least 2"));
        }
        in_window("grid.lambda_min_nm", material, g.lambda_min_nm)?;
        in_window("grid.lambda_max_nm", material, g.lambda_max_nm)?;
        let grid = FrequencyGrid::from_wavelength_range(g.lambda_min_nm, g.lambda_max_nm, g.points)?;

        let q = &cfg.quadrature;
        let quadrature = QuadratureSpec {
            n_z: q.nz,
            n_z_prime: q.nzp,
            n_omega_s: q.nws,
            window: q.omega_s_window,
        };
        quadrature.validate()?;

        let hash = config_hash(&cfg)?;
        Ok(ResolvedConfig {
            config: cfg,
            source: SourceConfig {
                crystal,
                geometry,
                beams,
                pump,
                filter,
            },
            grid,
            quadrature,
            alpha_deg,
            alpha_solved,
            hash,
        })
    }
}

/// SHA-256 over the canonical JSON of the materialized configuration and,
/// for a tabulated pump, the bytes of the spectrum file.
pub fn config_hash(cfg: &RunConfig) -> Result<String> {
    let mut h = Sha256::new();
    h.update(serde_json::to_vec(cfg).expect("config serializes"));
    if let Some(file) = &cfg.pump.spectrum_file {
        h.update(std::fs::read(file).map_err(|e| Error::config("pump.spectrum_file", format!("{}: {e}", file.display())))?);
    }
    Ok(h.finalize().iter().map(|b| format!("{b:02x}")).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub compute_s: f64,
    pub total_s: f64,
}

/// Everything needed to reproduce a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub manifest_version: u32,
    pub tool_version: String,
    pub config: RunConfig,
    pub config_hash: String,
    pub alpha_deg: f64,
    pub alpha_solved: bool,
    pub quadrature: QuadratureSpec,
    pub threads: usize,
    pub diagnostics: Option<Diagnostics>,
    pub timings: Timings,
}

impl RunManifest {
    pub fn new(resolved: &ResolvedConfig, threads: usize) -> Self {
        Self {
            manifest_version: MANIFEST_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            config: resolved.config.clone(),
            config_hash: resolved.hash.clone(),
            alpha_deg: resolved.alpha_deg,
            alpha_solved: resolved.alpha_solved,
            quadrature: resolved.quadrature,
            threads,
            diagnostics: None,
            timings: Timings {
                compute_s: 0.0,
                total_s: 0.0,
            },
        }
    }
}
