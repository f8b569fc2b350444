//! Flat key = value configuration files.
//!
//! Keys mirror the sweep configuration fields; `#` starts a comment.
//! Command-line flags override file values.

use dcsk_core::channel::LinkGeometry;
use dcsk_core::sweep::{SweepConfig, SystemId};
use dcsk_core::{Error, Result};

pub fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<T>()
                .map_err(|_| Error::Parse(format!("invalid {what} entry '{s}'")))
        })
        .collect()
}

pub fn parse_systems(text: &str) -> Result<Vec<SystemId>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(SystemId::parse)
        .collect()
}

fn parse_bool(value: &str, key: &str) -> Result<bool> {
    match value {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        other => Err(Error::Parse(format!(
            "key '{key}': invalid boolean '{other}'"
        ))),
    }
}

/// Applies `key = value` lines onto `cfg`.
pub fn apply_file(cfg: &mut SweepConfig, text: &str) -> Result<()> {
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Parse(format!("config line {}: expected 'key = value'", ln + 1))
        })?;
        let key = key.trim();
        let value = value.trim();
        let bad =
            |what: &str| Error::Parse(format!("config line {}: invalid {what} '{value}'", ln + 1));
        match key {
            "systems" => cfg.systems = parse_systems(value)?,
            "grid_db" => cfg.grid_db = parse_list(value, "grid value")?,
            "n_users" => cfg.n_users = value.parse().map_err(|_| bad("user count"))?,
            "beta" => cfg.beta = value.parse().map_err(|_| bad("beta"))?,
            "m" => cfg.m = value.parse().map_err(|_| bad("fading factor"))?,
            "paths" => cfg.paths = value.parse().map_err(|_| bad("path count"))?,
            "delays" => cfg.delays = parse_list(value, "delay")?,
            "d_sd" => cfg.geometry.d_sd = value.parse().map_err(|_| bad("distance"))?,
            "d_sr" => cfg.geometry.d_sr = value.parse().map_err(|_| bad("distance"))?,
            "d_rd" => cfg.geometry.d_rd = value.parse().map_err(|_| bad("distance"))?,
            "min_errors" => cfg.min_errors = value.parse().map_err(|_| bad("error target"))?,
            "max_bits" => cfg.max_bits = value.parse().map_err(|_| bad("bit budget"))?,
            "master_seed" => cfg.master_seed = value.parse().map_err(|_| bad("seed"))?,
            "eb" => cfg.eb = value.parse().map_err(|_| bad("bit energy"))?,
            "noiseless" => cfg.noiseless = parse_bool(value, key)?,
            "workers" => cfg.workers = Some(value.parse().map_err(|_| bad("worker count"))?),
            other => {
                return Err(Error::Parse(format!(
                    "config line {}: unknown key '{other}'",
                    ln + 1
                )))
            }
        }
    }
    // Geometry re-validated as a whole after piecewise assignment.
    cfg.geometry = LinkGeometry::new(cfg.geometry.d_sd, cfg.geometry.d_sr, cfg.geometry.d_rd)?;
    Ok(())
}
