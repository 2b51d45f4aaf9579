//! Configuration: one INI-style file holds every default; nothing
//! electrical is hard-coded in the models. A user file (via `--config` or
//! the `FERRO_CONFIG` environment variable) overrides individual keys.

use crate::device::{
    calibrate_drive, calibrate_kinetics, FeFetParams, MosfetParams, Polarity, SwitchingKinetics,
};
use crate::engine::SolverConfig;
use crate::units::parse_si;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::Path;
use thiserror::Error;

/// Embedded defaults; parsed at startup.
pub const DEFAULTS_INI: &str = include_str!("../defaults.ini");

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config line {0}: {1}")]
    Syntax(usize, String),
    #[error("config key [{0}] {1}: {2}")]
    BadValue(String, String, String),
    #[error("missing config key [{0}] {1}")]
    Missing(String, String),
    #[error("device calibration: {0}")]
    Calibration(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

/// Raw key/value view of the merged configuration.
#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    /// (section, key) -> value text
    entries: BTreeMap<(String, String), String>,
}

impl RawConfig {
    fn parse_into(&mut self, text: &str) -> Result<(), ConfigError> {
        let mut section = String::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
                continue;
            }
            if let Some(head) = line.strip_prefix('[') {
                let name = head
                    .strip_suffix(']')
                    .ok_or_else(|| ConfigError::Syntax(i + 1, "unterminated section".into()))?;
                section = name.trim().to_ascii_lowercase();
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| ConfigError::Syntax(i + 1, "expected key = value".into()))?;
            // strip trailing comments
            let v = v.split('#').next().unwrap().trim();
            self.entries
                .insert((section.clone(), k.trim().to_ascii_lowercase()), v.to_string());
        }
        Ok(())
    }

    fn get(&self, section: &str, key: &str) -> Result<&str, ConfigError> {
        self.entries
            .get(&(section.to_string(), key.to_string()))
            .map(|s| s.as_str())
            .ok_or_else(|| ConfigError::Missing(section.into(), key.into()))
    }

    fn num(&self, section: &str, key: &str) -> Result<f64, ConfigError> {
        let text = self.get(section, key)?;
        parse_si(text)
            .map_err(|e| ConfigError::BadValue(section.into(), key.into(), e.to_string()))
    }

    fn num_list(&self, section: &str, key: &str) -> Result<Vec<f64>, ConfigError> {
        let text = self.get(section, key)?;
        text.split(',')
            .map(|s| {
                parse_si(s.trim()).map_err(|e| {
                    ConfigError::BadValue(section.into(), key.into(), e.to_string())
                })
            })
            .collect()
    }

    /// Canonical text of the merged config, used for the manifest digest.
    pub fn canonical(&self) -> String {
        let mut out = String::new();
        let mut last_section = None;
        for ((section, key), value) in &self.entries {
            if last_section != Some(section) {
                out.push_str(&format!("[{section}]\n"));
                last_section = Some(section);
            }
            out.push_str(&format!("{key} = {value}\n"));
        }
        out
    }
}

/// Fully resolved configuration with calibrated device parameters.
#[derive(Debug, Clone)]
pub struct SimConfig {
    pub kinetics: SwitchingKinetics,
    /// Latch pull-down NMOS (M1/M3), drive calibrated.
    pub pd: MosfetParams,
    /// Access NMOS (M5/M6), drive calibrated.
    pub pg: MosfetParams,
    /// Baseline PMOS load, drive calibrated.
    pub pu_baseline: MosfetParams,
    /// Ferroelectric load device, drive calibrated on its LVT state.
    pub fefet: FeFetParams,
    pub segments: usize,

    pub c_bitline: f64,
    pub c_node: f64,
    pub vdd_nominal: f64,
    pub vdd_program: f64,
    pub t_program: f64,
    pub wl_program_boost: f64,
    pub restore_ramp: f64,
    pub read_threshold: f64,
    pub read_window: f64,

    pub solver: SolverConfig,

    pub snm_step: f64,
    pub bleed_siemens: f64,
    pub selfsustain_floor: f64,
    pub i_crit: f64,
    pub sweep_dwell: f64,

    pub protocol_step: f64,
    pub protocol_i_bias: f64,
    pub protocol_wl_boost: f64,
    pub protocol_targets: Vec<f64>,
    pub protocol_repetitions: usize,

    pub mc_sigma_vth: f64,
    pub mc_sigma_mw_rel: f64,
    pub mc_runs: usize,
    pub mc_seed: u64,

    /// SHA-256 of the canonical merged key/value text.
    pub digest: String,
}

impl SimConfig {
    /// Built-in defaults only.
    pub fn default_config() -> Self {
        Self::from_sources(&[DEFAULTS_INI]).expect("embedded defaults must be valid")
    }

    /// Defaults overlaid with a user file.
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let user = std::fs::read_to_string(path)?;
        Self::from_sources(&[DEFAULTS_INI, &user])
    }

    /// Defaults, then `FERRO_CONFIG` (if set), then an explicit file.
    pub fn resolve(explicit: Option<&Path>) -> Result<Self, ConfigError> {
        let mut sources = vec![DEFAULTS_INI.to_string()];
        if let Ok(env_path) = std::env::var("FERRO_CONFIG") {
            if !env_path.is_empty() {
                sources.push(std::fs::read_to_string(env_path)?);
            }
        }
        if let Some(p) = explicit {
            sources.push(std::fs::read_to_string(p)?);
        }
        let refs: Vec<&str> = sources.iter().map(|s| s.as_str()).collect();
        Self::from_sources(&refs)
    }

    pub fn from_sources(sources: &[&str]) -> Result<Self, ConfigError> {
        let mut raw = RawConfig::default();
        for s in sources {
            raw.parse_into(s)?;
        }
        Self::from_raw(&raw)
    }

    fn from_raw(raw: &RawConfig) -> Result<Self, ConfigError> {
        let kinetics = calibrate_kinetics(
            (raw.num("kinetics", "anchor1_v")?, raw.num("kinetics", "anchor1_w")?),
            (raw.num("kinetics", "anchor2_v")?, raw.num("kinetics", "anchor2_w")?),
        )
        .map_err(|e| ConfigError::Calibration(e.to_string()))?;

        let mosfet = |section: &str, polarity: Polarity| -> Result<MosfetParams, ConfigError> {
            let template = MosfetParams::new(
                polarity,
                raw.num(section, "vth0")?,
                1e-4,
                raw.num(section, "n_sub")?,
                raw.num(section, "lambda")?,
            );
            calibrate_drive(
                raw.num(section, "cal_current")?,
                raw.num(section, "cal_vgs")?,
                raw.num(section, "cal_vds")?,
                &template,
            )
            .map_err(|e| ConfigError::Calibration(format!("[{section}] {e}")))
        };

        let pd = mosfet("mosfet.pulldown", Polarity::N)?;
        let pg = mosfet("mosfet.access", Polarity::N)?;
        let pu_baseline = mosfet("mosfet.pullup", Polarity::P)?;

        // FeFET drive: calibrate the LVT-state device (vth0 + mw/2), then
        // carry the kprime back to the midpoint parameters.
        let fe_vth0 = raw.num("fefet.pullup", "vth0")?;
        let fe_mw = raw.num("fefet.pullup", "mw")?;
        let lvt_template = MosfetParams::new(
            Polarity::P,
            fe_vth0 + 0.5 * fe_mw,
            1e-4,
            raw.num("fefet.pullup", "n_sub")?,
            raw.num("fefet.pullup", "lambda")?,
        );
        let lvt_cal = calibrate_drive(
            raw.num("fefet.pullup", "cal_current")?,
            raw.num("fefet.pullup", "cal_vgs")?,
            raw.num("fefet.pullup", "cal_vds")?,
            &lvt_template,
        )
        .map_err(|e| ConfigError::Calibration(format!("[fefet.pullup] {e}")))?;
        let mut fe_base = lvt_cal;
        fe_base.vth0 = fe_vth0;
        let mut fefet = FeFetParams::new(fe_base, fe_mw, kinetics);
        fefet.pinning_fraction = raw.num("fefet.pullup", "pinning_fraction")?;
        let segments = raw.num("fefet.pullup", "segments")? as usize;

        let solver = SolverConfig {
            reltol: raw.num("solver", "reltol")?,
            vntol: raw.num("solver", "vntol")?,
            abstol: raw.num("solver", "abstol")?,
            max_newton_iters: raw.num("solver", "max_newton_iters")? as usize,
            gmin: raw.num("solver", "gmin")?,
            dtmax: 1e-9, // per-scenario; overridden by every analysis
            dt_shrink_factor: raw.num("solver", "dt_shrink_factor")?,
            max_dt_retries: raw.num("solver", "max_dt_retries")? as usize,
            theta: raw.num("solver", "theta")?,
            vstep_limit: raw.num("solver", "vstep_limit")?,
        };

        let digest = {
            let mut h = Sha256::new();
            h.update(raw.canonical().as_bytes());
            format!("{:x}", h.finalize())
        };

        Ok(Self {
            kinetics,
            pd,
            pg,
            pu_baseline,
            fefet,
            segments,
            c_bitline: raw.num("cell", "c_bitline")?,
            c_node: raw.num("cell", "c_node")?,
            vdd_nominal: raw.num("cell", "vdd_nominal")?,
            vdd_program: raw.num("cell", "vdd_program")?,
            t_program: raw.num("cell", "t_program")?,
            wl_program_boost: raw.num("cell", "wl_program_boost")?,
            restore_ramp: raw.num("cell", "restore_ramp")?,
            read_threshold: raw.num("cell", "read_threshold")?,
            read_window: raw.num("cell", "read_window")?,
            solver,
            snm_step: raw.num("analysis", "snm_step")?,
            bleed_siemens: raw.num("analysis", "bleed_siemens")?,
            selfsustain_floor: raw.num("analysis", "selfsustain_floor")?,
            i_crit: raw.num("analysis", "i_crit")?,
            sweep_dwell: raw.num("analysis", "sweep_dwell")?,
            protocol_step: raw.num("protocol", "step")?,
            protocol_i_bias: raw.num("protocol", "i_bias")?,
            protocol_wl_boost: raw.num("protocol", "wl_boost")?,
            protocol_targets: raw.num_list("protocol", "targets")?,
            protocol_repetitions: raw.num("protocol", "repetitions")? as usize,
            mc_sigma_vth: raw.num("montecarlo", "sigma_vth")?,
            mc_sigma_mw_rel: raw.num("montecarlo", "sigma_mw_rel")?,
            mc_runs: raw.num("montecarlo", "runs")? as usize,
            mc_seed: raw.num("montecarlo", "seed")? as u64,
            digest,
        })
    }
}
