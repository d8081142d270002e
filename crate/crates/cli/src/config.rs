//! Flat `key = value` run configuration.
//!
//! ```text
//! # comment
//! n = 4096
//! period = 128pi
//! scheme = etdrk4
//! ```
//!
//! Unknown or repeated keys are errors. Numbers may carry a `pi` suffix (`640pi`).

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use num_complex::Complex64;
use whitham_core::grid::slot_of;
use whitham_core::oscillatory::geometric_times;
use whitham_core::scattering::log_sample_times;
use whitham_core::solver::{Dealias, InitialCondition, Nonlinearity, Scheme, SolverConfig};
use whitham_core::{GridSpec, Symbol, SymbolKind};

use crate::output::sig17;

pub const KEYS: &[&str] = &[
    "n",
    "period",
    "dt",
    "t_end",
    "scheme",
    "dealias",
    "epsilon",
    "nonlinearity",
    "symbol",
    "fkdv_alpha",
    "zero_threshold",
    "ic",
    "ic_width",
    "ic_center",
    "ic_file",
    "blowup_factor",
    "sobolev_index",
    "z_weight",
    "dtf_bands",
    "samples",
    "sample_count",
    "sample_start",
    "snapshots",
];

/// Raw parsed pairs, before interpretation.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct KeyValues {
    entries: BTreeMap<String, String>,
}

impl KeyValues {
    pub fn parse(text: &str, allowed: &[&str]) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected `key = value`, got `{line}`", no + 1))?;
            let (k, v) = (k.trim(), v.trim());
            if !allowed.contains(&k) {
                bail!("line {}: unknown key `{k}`", no + 1);
            }
            if entries.insert(k.to_string(), v.to_string()).is_some() {
                bail!("line {}: key `{k}` given twice", no + 1);
            }
        }
        Ok(KeyValues { entries })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    fn num(&self, key: &str, default: f64) -> Result<f64> {
        self.get(key).map_or(Ok(default), |v| parse_number(v).with_context(|| format!("key `{key}`")))
    }

    fn int(&self, key: &str, default: usize) -> Result<usize> {
        self.get(key).map_or(Ok(default), |v| {
            v.parse().with_context(|| format!("key `{key}`: expected a non-negative integer, got `{v}`"))
        })
    }
}

/// A float, optionally followed by `pi` (`2pi`, `0.5 pi`, `pi`).
pub fn parse_number(s: &str) -> Result<f64> {
    let t = s.trim();
    let (mant, scale) = match t.strip_suffix("pi") {
        Some(m) => (m.trim(), PI),
        None => (t, 1.0),
    };
    let v = if mant.is_empty() && scale == PI {
        1.0
    } else {
        mant.parse::<f64>().map_err(|_| anyhow!("expected a number, got `{s}`"))?
    };
    let out = v * scale;
    if !out.is_finite() {
        bail!("non-finite number `{s}`");
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sampling {
    /// `count` equally spaced times from 0 to `t_end`.
    Linear { count: usize },
    /// 0, then `count` geometric times from `start` to `t_end`.
    Log { start: f64, count: usize },
    /// 0, then log-spaced times fine enough for phase accumulation, including the dyads
    /// `t_end/2^m ≥ start`.
    Scattering { start: f64 },
}

impl Sampling {
    pub fn times(&self, t_end: f64) -> Result<Vec<f64>> {
        match *self {
            Sampling::Linear { count } => {
                if count < 2 {
                    bail!("linear sampling needs sample_count ≥ 2");
                }
                Ok((0..count).map(|i| t_end * i as f64 / (count - 1) as f64).collect())
            }
            Sampling::Log { start, count } => {
                if !(start > 0.0 && start < t_end) || count < 2 {
                    bail!("log sampling needs 0 < sample_start < t_end and sample_count ≥ 2");
                }
                let mut v = vec![0.0];
                v.extend(geometric_times(start, t_end, count));
                Ok(v)
            }
            Sampling::Scattering { start } => {
                if !(start > 0.0 && start < t_end) {
                    bail!("scattering sampling needs 0 < sample_start < t_end");
                }
                let mut v = vec![0.0];
                v.extend(log_sample_times(start, t_end, &dyadic_times(start, t_end)));
                Ok(v)
            }
        }
    }
}

/// `t_end/2^m` for all `m ≥ 0` with `t_end/2^m ≥ start`, ascending.
pub fn dyadic_times(start: f64, t_end: f64) -> Vec<f64> {
    let mut v: Vec<f64> = (0..)
        .map(|m| t_end / 2f64.powi(m))
        .take_while(|&t| t >= start * (1.0 - 1e-12))
        .collect();
    v.reverse();
    v
}

/// Everything `simulate` needs, with defaults filled in.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationSpec {
    pub solver: SolverConfig,
    pub sampling: Sampling,
    pub snapshots: bool,
    ic_file: Option<PathBuf>,
}

impl SimulationSpec {
    /// Parses a config file; relative `ic_file` paths are taken relative to it.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config file {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_text(&text, base).with_context(|| format!("in config file {}", path.display()))
    }

    pub fn from_text(text: &str, base: &Path) -> Result<Self> {
        let kv = KeyValues::parse(text, KEYS)?;
        let n = kv.int("n", 4096)?;
        let period = kv.num("period", 128.0 * PI)?;
        let grid = GridSpec::new(n, period)?;
        let mut cfg = SolverConfig::new(grid, kv.num("dt", 0.1)?, kv.num("t_end", 100.0)?);
        if let Some(s) = kv.get("scheme") {
            cfg.scheme = match s {
                "ifrk4" => Scheme::Ifrk4,
                "etdrk4" => Scheme::Etdrk4,
                _ => bail!("key `scheme`: expected ifrk4 or etdrk4, got `{s}`"),
            };
        }
        if let Some(s) = kv.get("dealias") {
            cfg.dealias = match s {
                "two-thirds" => Dealias::TwoThirds,
                "none" => Dealias::None,
                _ => bail!("key `dealias`: expected two-thirds or none, got `{s}`"),
            };
        }
        if let Some(s) = kv.get("nonlinearity") {
            cfg.nonlinearity = match s {
                "defocusing" => Nonlinearity::Defocusing,
                "focusing" => Nonlinearity::Focusing,
                "off" => Nonlinearity::Off,
                _ => bail!("key `nonlinearity`: expected defocusing, focusing or off, got `{s}`"),
            };
        }
        cfg.symbol = parse_symbol(kv.get("symbol").unwrap_or("whitham"), kv.get("fkdv_alpha"))?;
        if let Some(z) = kv.get("zero_threshold") {
            cfg.symbol = cfg.symbol.with_zero_threshold(parse_number(z)?)?;
        }
        cfg.epsilon = kv.num("epsilon", cfg.epsilon)?;
        cfg.blowup_factor = kv.num("blowup_factor", cfg.blowup_factor)?;
        cfg.sobolev_index = kv.num("sobolev_index", cfg.sobolev_index)?;
        cfg.z_weight = kv.num("z_weight", cfg.z_weight)?;
        if let Some(b) = kv.get("dtf_bands") {
            cfg.dtf_bands = parse_bands(b)?;
        }
        let mut ic_file = None;
        match kv.get("ic").unwrap_or("gaussian") {
            "gaussian" => {
                if kv.get("ic_file").is_some() {
                    bail!("key `ic_file` requires ic = file");
                }
                cfg.ic = InitialCondition::Gaussian {
                    width: kv.num("ic_width", 1.0)?,
                    center: kv.num("ic_center", 0.0)?,
                };
            }
            "file" => {
                let rel = kv.get("ic_file").ok_or_else(|| anyhow!("ic = file needs ic_file"))?;
                let path = base.join(rel);
                cfg.ic = InitialCondition::Spectral(read_spectrum(&path, grid)?);
                ic_file = Some(PathBuf::from(rel));
            }
            other => bail!("key `ic`: expected gaussian or file, got `{other}`"),
        }
        let start = kv.num("sample_start", 1.0)?;
        let sampling = match kv.get("samples").unwrap_or("linear") {
            "linear" => Sampling::Linear {
                count: kv.int("sample_count", 101)?,
            },
            "log" => Sampling::Log {
                start,
                count: kv.int("sample_count", 40)?,
            },
            "scattering" => Sampling::Scattering { start },
            other => bail!("key `samples`: expected linear, log or scattering, got `{other}`"),
        };
        let snapshots = match kv.get("snapshots").unwrap_or("true") {
            "true" => true,
            "false" => false,
            other => bail!("key `snapshots`: expected true or false, got `{other}`"),
        };
        cfg.validate()?;
        sampling.times(cfg.t_end)?;
        Ok(SimulationSpec {
            solver: cfg,
            sampling,
            snapshots,
            ic_file,
        })
    }

    pub fn sample_times(&self) -> Vec<f64> {
        self.sampling.times(self.solver.t_end).expect("validated at parse time")
    }

    /// Every key with its effective value, sorted; floats in 17 digits. Parsing this text
    /// gives back the same configuration.
    pub fn canonical(&self) -> String {
        let c = &self.solver;
        let mut kv: BTreeMap<&str, String> = BTreeMap::new();
        kv.insert("n", c.grid.n().to_string());
        kv.insert("period", sig17(c.grid.period()));
        kv.insert("dt", sig17(c.dt));
        kv.insert("t_end", sig17(c.t_end));
        kv.insert("scheme", match c.scheme {
            Scheme::Ifrk4 => "ifrk4",
            Scheme::Etdrk4 => "etdrk4",
        }
        .into());
        kv.insert("dealias", match c.dealias {
            Dealias::TwoThirds => "two-thirds",
            Dealias::None => "none",
        }
        .into());
        kv.insert("epsilon", sig17(c.epsilon));
        kv.insert("nonlinearity", match c.nonlinearity {
            Nonlinearity::Defocusing => "defocusing",
            Nonlinearity::Focusing => "focusing",
            Nonlinearity::Off => "off",
        }
        .into());
        let (name, alpha) = symbol_name(&c.symbol);
        kv.insert("symbol", name.into());
        if let Some(a) = alpha {
            kv.insert("fkdv_alpha", sig17(a));
        }
        kv.insert("zero_threshold", sig17(c.symbol.zero_threshold()));
        match (&c.ic, &self.ic_file) {
            (InitialCondition::Gaussian { width, center }, _) => {
                kv.insert("ic", "gaussian".into());
                kv.insert("ic_width", sig17(*width));
                kv.insert("ic_center", sig17(*center));
            }
            (InitialCondition::Spectral(_), file) => {
                kv.insert("ic", "file".into());
                let f = file.as_ref().map_or(String::new(), |p| p.display().to_string());
                kv.insert("ic_file", f);
            }
        }
        kv.insert("blowup_factor", sig17(c.blowup_factor));
        kv.insert("sobolev_index", sig17(c.sobolev_index));
        kv.insert("z_weight", sig17(c.z_weight));
        let bands: Vec<String> = c.dtf_bands.iter().map(i32::to_string).collect();
        kv.insert("dtf_bands", bands.join(","));
        match self.sampling {
            Sampling::Linear { count } => {
                kv.insert("samples", "linear".into());
                kv.insert("sample_count", count.to_string());
            }
            Sampling::Log { start, count } => {
                kv.insert("samples", "log".into());
                kv.insert("sample_start", sig17(start));
                kv.insert("sample_count", count.to_string());
            }
            Sampling::Scattering { start } => {
                kv.insert("samples", "scattering".into());
                kv.insert("sample_start", sig17(start));
            }
        }
        kv.insert("snapshots", self.snapshots.to_string());
        kv.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }
}

pub fn parse_symbol(name: &str, alpha: Option<&str>) -> Result<Symbol> {
    if alpha.is_some() && name != "fkdv" {
        bail!("fkdv_alpha is only meaningful with symbol = fkdv");
    }
    Ok(match name {
        "whitham" => Symbol::whitham(),
        "kdv" => Symbol::kdv(),
        "half-wave" => Symbol::half_wave(),
        "fkdv" => {
            let a = alpha.ok_or_else(|| anyhow!("symbol = fkdv needs fkdv_alpha"))?;
            Symbol::fractional_kdv(parse_number(a)?)?
        }
        other => bail!("unknown symbol `{other}` (whitham, kdv, half-wave, fkdv)"),
    })
}

fn symbol_name(sym: &Symbol) -> (&'static str, Option<f64>) {
    match sym.kind() {
        SymbolKind::Whitham => ("whitham", None),
        SymbolKind::KdV => ("kdv", None),
        SymbolKind::HalfWave => ("half-wave", None),
        SymbolKind::FractionalKdV { alpha } => ("fkdv", Some(alpha)),
    }
}

/// Comma-separated integers, or an inclusive range `a:b`.
pub fn parse_bands(s: &str) -> Result<Vec<i32>> {
    if let Some((a, b)) = s.split_once(':') {
        let (a, b): (i32, i32) = (a.trim().parse()?, b.trim().parse()?);
        if a > b {
            bail!("empty band range `{s}`");
        }
        return Ok((a..=b).collect());
    }
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| p.trim().parse::<i32>().map_err(|_| anyhow!("bad band index `{p}`")))
        .collect()
}

/// Reads a spectrum in snapshot layout (`xi_index,xi,re,im`, header line first).
pub fn read_spectrum(path: &Path, grid: GridSpec) -> Result<Vec<Complex64>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let n = grid.n();
    let mut out = vec![Complex64::default(); n];
    for (no, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 4 {
            bail!("{}:{}: expected 4 columns", path.display(), no + 1);
        }
        let m: i64 = f[0].trim().parse().with_context(|| format!("{}:{}", path.display(), no + 1))?;
        let slot = slot_of(m, n)
            .ok_or_else(|| anyhow!("{}:{}: index {m} outside the grid", path.display(), no + 1))?;
        out[slot] = Complex64::new(f[2].trim().parse()?, f[3].trim().parse()?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_with_pi() {
        assert_eq!(parse_number("2").unwrap(), 2.0);
        assert_eq!(parse_number("pi").unwrap(), PI);
        assert_eq!(parse_number("640pi").unwrap(), 640.0 * PI);
        assert_eq!(parse_number("0.5 pi").unwrap(), 0.5 * PI);
        assert!(parse_number("two").is_err());
        assert!(parse_number("1e400").is_err());
    }

    #[test]
    fn unknown_and_duplicate_keys_rejected() {
        let e = KeyValues::parse("n = 64\nperiode = 3\n", KEYS).unwrap_err();
        assert!(e.to_string().contains("unknown key `periode`"), "{e}");
        let e = KeyValues::parse("n = 64\nn = 32\n", KEYS).unwrap_err();
        assert!(e.to_string().contains("twice"));
        assert!(KeyValues::parse("n 64\n", KEYS).is_err());
    }

    #[test]
    fn canonical_round_trip() {
        let text = "# small run\nn = 256\nperiod = 64pi\nt_end = 10\ndt = 0.05 # step\nscheme = etdrk4\n\
                    samples = scattering\nsample_start = 1\ndtf_bands = -1:1\n";
        let spec = SimulationSpec::from_text(text, Path::new(".")).unwrap();
        assert_eq!(spec.solver.dtf_bands, vec![-1, 0, 1]);
        assert_eq!(spec.solver.scheme, Scheme::Etdrk4);
        let canon = spec.canonical();
        let again = SimulationSpec::from_text(&canon, Path::new(".")).unwrap();
        assert_eq!(again, spec);
        assert_eq!(again.canonical(), canon);
    }

    #[test]
    fn sampling_layouts() {
        let lin = Sampling::Linear { count: 11 }.times(100.0).unwrap();
        assert_eq!(lin.len(), 11);
        assert_eq!(lin[10], 100.0);
        let sc = Sampling::Scattering { start: 1.0 }.times(64.0).unwrap();
        assert_eq!(sc[0], 0.0);
        for d in dyadic_times(1.0, 64.0) {
            assert!(sc.iter().any(|&t| t == d), "dyad {d} missing");
        }
        assert!(sc.windows(2).skip(1).all(|w| (w[1] / w[0]).ln() <= 0.05 + 1e-12));
        assert_eq!(dyadic_times(1.0, 8.0), vec![1.0, 2.0, 4.0, 8.0]);
    }

    #[test]
    fn invalid_values_reported() {
        let base = Path::new(".");
        assert!(SimulationSpec::from_text("scheme = rk45\n", base).is_err());
        assert!(SimulationSpec::from_text("n = 64\nperiod = 8\nt_end = 100\n", base).is_err());
        assert!(SimulationSpec::from_text("fkdv_alpha = 1.5\n", base).is_err());
        let f = SimulationSpec::from_text("symbol = fkdv\nfkdv_alpha = 1.5\n", base).unwrap();
        assert_eq!(f.solver.symbol.kind(), SymbolKind::FractionalKdV { alpha: 1.5 });
    }
}
