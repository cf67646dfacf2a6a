//! Run configuration: preset defaults, then a key-value file, then flags.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use clap::ValueEnum;
use poppe::numerics::QuadratureScheme;
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Equation {
    Kdv,
    Nls,
    SmolConst,
    SmolGeneral,
    Prelaplace,
    Burgers,
    Spde,
    Quotient,
    Elliptic,
}

impl Equation {
    pub fn name(self) -> &'static str {
        match self {
            Equation::Kdv => "kdv",
            Equation::Nls => "nls",
            Equation::SmolConst => "smol-const",
            Equation::SmolGeneral => "smol-general",
            Equation::Prelaplace => "prelaplace",
            Equation::Burgers => "burgers",
            Equation::Spde => "spde",
            Equation::Quotient => "quotient",
            Equation::Elliptic => "elliptic",
        }
    }

    fn profiles(self) -> &'static [&'static str] {
        match self {
            Equation::Kdv => &["paper", "gaussian"],
            Equation::Nls => &["paper", "sech"],
            Equation::SmolConst | Equation::SmolGeneral | Equation::Prelaplace => &["exp"],
            Equation::Burgers => &["linear", "sine", "neg-tanh"],
            Equation::Spde => &["paper"],
            Equation::Quotient => &["heat", "odd"],
            Equation::Elliptic => &["rational", "tanh"],
        }
    }

    fn spectral(self) -> bool {
        matches!(self, Equation::Kdv | Equation::Nls | Equation::Spde | Equation::Quotient)
    }

    /// Preset parameter sets. `paper` exists for kdv, nls and spde; every equation has `default`.
    fn preset(self, name: &str) -> Option<Vec<(&'static str, String)>> {
        let s = |v: &str| v.to_string();
        let base = match self {
            Equation::Kdv => vec![
                ("domain-l", s("10")),
                ("grid-n", s("256")),
                ("t-final", s("15")),
                ("dt", s("1e-4")),
                ("checkpoints", s("4")),
                ("quadrature", s("riemann-left")),
                ("profile", s("paper")),
                ("amplitude", s("0.5")),
            ],
            Equation::Nls => vec![
                ("domain-l", s("40")),
                ("grid-n", s("256")),
                ("t-final", s("100")),
                ("dt", s("1e-2")),
                ("checkpoints", s("4")),
                ("quadrature", s("riemann-left")),
                ("profile", s("paper")),
                ("amplitude", s("0.5")),
            ],
            Equation::SmolConst => vec![
                ("domain-l", s("40")),
                ("grid-n", s("1024")),
                ("t-final", s("2")),
                ("dt", s("1e-3")),
                ("checkpoints", s("4")),
                ("quadrature", s("gregory")),
                ("profile", s("exp")),
            ],
            Equation::SmolGeneral => vec![
                ("domain-l", s("20")),
                ("grid-n", s("401")),
                ("t-final", s("1")),
                ("dt", s("2e-3")),
                ("quadrature", s("gregory")),
                ("profile", s("exp")),
                ("growth", s("0,-1")),
                ("coagulation", s("0.5")),
                ("loss-rate", s("1")),
            ],
            Equation::Prelaplace => vec![
                ("domain-l", s("4")),
                ("grid-n", s("257")),
                ("t-final", s("0.5")),
                ("quadrature", s("gregory")),
                ("profile", s("exp")),
                ("nu", s("0.1")),
            ],
            Equation::Burgers => vec![
                ("domain-l", s("6.283185307179586")),
                ("grid-n", s("257")),
                ("t-final", s("0.5")),
                ("checkpoints", s("4")),
                ("profile", s("sine")),
            ],
            Equation::Spde => vec![
                ("domain-l", s("6.283185307179586")),
                ("grid-n", s("32")),
                ("t-final", s("0.007")),
                ("dt", s("2.734375e-5")),
                ("checkpoints", s("4")),
                ("panels", s("256")),
                ("noise", s("0.001")),
                ("alpha", s("1")),
                ("beta", s("0")),
                ("gamma", s("10")),
                ("epsilon", s("1000")),
                ("isotropic-extension", s("off")),
                ("profile", s("paper")),
                ("seed", s("42")),
            ],
            Equation::Quotient => vec![
                ("domain-l", s("10")),
                ("grid-n", s("128")),
                ("t-final", s("0.05")),
                ("dt", s("1e-3")),
                ("checkpoints", s("2")),
                ("profile", s("heat")),
                ("amplitude", s("0.5")),
            ],
            Equation::Elliptic => vec![
                ("domain-l", s("3")),
                ("grid-n", s("1024")),
                ("profile", s("rational")),
            ],
        };
        let mut all = vec![
            ("seed", s("0")),
            ("compare-oracle", s("on")),
            ("threads", s("0")),
            ("out", s("out")),
        ];
        all.retain(|(k, _)| !base.iter().any(|(b, _)| b == k));
        all.extend(base);
        match name {
            "default" => Some(all),
            "paper" if matches!(self, Equation::Kdv | Equation::Nls | Equation::Spde) => Some(all),
            _ => None,
        }
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Keys accepted by the config file and as `--key` flags.
pub const KEYS: &[&str] = &[
    "alpha",
    "amplitude",
    "beta",
    "checkpoints",
    "coagulation",
    "compare-oracle",
    "domain-l",
    "dt",
    "epsilon",
    "gamma",
    "grid-n",
    "growth",
    "isotropic-extension",
    "loss-rate",
    "noise",
    "nu",
    "out",
    "panels",
    "preset",
    "profile",
    "quadrature",
    "seed",
    "t-final",
    "threads",
];

/// Keys that do not influence the numbers written.
const UNHASHED: &[&str] = &["out", "threads"];

pub fn parse_config_file(text: &str) -> Result<Vec<(String, String)>, Vec<String>> {
    let mut pairs = Vec::new();
    let mut errors = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        match line.split_once('=') {
            Some((k, v)) => pairs.push((k.trim().to_string(), v.trim().to_string())),
            None => errors.push(format!("config line {}: expected key = value", i + 1)),
        }
    }
    if errors.is_empty() {
        Ok(pairs)
    } else {
        Err(errors)
    }
}

/// Fully resolved and validated configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub equation: Equation,
    pub values: BTreeMap<String, String>,
}

impl RunConfig {
    /// Merge preset, file and flag values; report every violated precondition.
    pub fn resolve(
        equation: Equation,
        file: Option<&PathBuf>,
        flags: Vec<(String, String)>,
    ) -> Result<Self, CliError> {
        let mut layered: Vec<(String, String)> = Vec::new();
        if let Some(path) = file {
            let text = std::fs::read_to_string(path)
                .map_err(|source| CliError::ConfigFile { path: path.display().to_string(), source })?;
            layered.extend(parse_config_file(&text).map_err(CliError::Invalid)?);
        }
        layered.extend(flags);
        let mut errors = Vec::new();
        let preset = layered
            .iter()
            .rev()
            .find(|(k, _)| k == "preset")
            .map(|(_, v)| v.clone())
            .unwrap_or_else(|| "default".into());
        let mut values: BTreeMap<String, String> = match equation.preset(&preset) {
            Some(p) => p.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
            None => {
                errors.push(format!("preset: '{preset}' is not defined for {equation}"));
                equation.preset("default").unwrap().into_iter().map(|(k, v)| (k.to_string(), v)).collect()
            }
        };
        values.insert("preset".into(), preset);
        for (k, v) in layered {
            if !KEYS.contains(&k.as_str()) {
                errors.push(format!("{k}: unknown key"));
                continue;
            }
            values.insert(k, v);
        }
        let cfg = Self { equation, values };
        errors.extend(cfg.violations());
        if errors.is_empty() {
            Ok(cfg)
        } else {
            Err(CliError::Invalid(errors))
        }
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn f64(&self, key: &str) -> f64 {
        self.raw(key).and_then(|v| v.parse().ok()).unwrap_or(f64::NAN)
    }

    pub fn usize(&self, key: &str) -> usize {
        self.raw(key).and_then(|v| v.parse().ok()).unwrap_or(0)
    }

    pub fn u64(&self, key: &str) -> u64 {
        self.raw(key).and_then(|v| v.parse().ok()).unwrap_or(0)
    }

    pub fn str(&self, key: &str) -> &str {
        self.raw(key).unwrap_or("")
    }

    pub fn flag(&self, key: &str) -> bool {
        self.str(key) == "on"
    }

    pub fn list(&self, key: &str) -> Vec<f64> {
        self.str(key).split(',').filter(|s| !s.trim().is_empty()).map(|s| s.trim().parse().unwrap_or(f64::NAN)).collect()
    }

    pub fn out_dir(&self) -> PathBuf {
        PathBuf::from(self.str("out"))
    }

    pub fn scheme(&self) -> QuadratureScheme {
        match self.str("quadrature") {
            "trapezoid" => QuadratureScheme::Trapezoid,
            "gregory" => QuadratureScheme::Gregory,
            _ => QuadratureScheme::RiemannLeft,
        }
    }

    /// Time steps between `0` and `t-final`.
    pub fn steps(&self) -> usize {
        (self.f64("t-final") / self.f64("dt")).round() as usize
    }

    /// Every violated precondition, empty when the run can start.
    pub fn violations(&self) -> Vec<String> {
        let eq = self.equation;
        let mut v = Vec::new();
        let need_number = |key: &str, v: &mut Vec<String>| -> Option<f64> {
            match self.raw(key)?.parse::<f64>() {
                Ok(x) if x.is_finite() => Some(x),
                _ => {
                    v.push(format!("{key}: '{}' is not a finite number", self.str(key)));
                    None
                }
            }
        };
        for key in ["domain-l", "t-final", "dt", "amplitude", "nu", "noise", "alpha", "beta", "gamma", "epsilon", "coagulation", "loss-rate"] {
            need_number(key, &mut v);
        }
        for key in ["grid-n", "checkpoints", "panels", "threads", "seed"] {
            if let Some(raw) = self.raw(key) {
                if raw.parse::<u64>().is_err() {
                    v.push(format!("{key}: '{raw}' is not a non-negative integer"));
                }
            }
        }
        if let Some(l) = self.raw("domain-l").and_then(|x| x.parse::<f64>().ok()) {
            if !(l > 0.0) {
                v.push("domain-l: must be positive".into());
            }
        }
        if let Some(t) = self.raw("t-final").and_then(|x| x.parse::<f64>().ok()) {
            if t < 0.0 {
                v.push("t-final: must be non-negative".into());
            }
        }
        if let Some(dt) = self.raw("dt").and_then(|x| x.parse::<f64>().ok()) {
            if !(dt > 0.0) {
                v.push("dt: must be positive".into());
            }
        }
        let n = self.usize("grid-n");
        if eq.spectral() && !(n >= 2 && n.is_power_of_two()) {
            v.push(format!("grid-n: {n} modes, but the DFT needs a power of two"));
        } else if !eq.spectral() && n < if eq == Equation::Elliptic { 5 } else { 3 } {
            v.push(format!("grid-n: {n} nodes is too few"));
        }
        let profile = self.str("profile");
        if !eq.profiles().contains(&profile) {
            v.push(format!("profile: '{profile}' is not one of {}", eq.profiles().join(", ")));
        }
        let quad = self.str("quadrature");
        let allowed: &[&str] = match eq {
            Equation::Kdv | Equation::Nls => &["riemann-left", "trapezoid"],
            Equation::SmolConst | Equation::SmolGeneral | Equation::Prelaplace => &["riemann-left", "trapezoid", "gregory"],
            _ => &["riemann-left", "trapezoid", "gregory", ""],
        };
        if !allowed.contains(&quad) {
            v.push(format!("quadrature: '{quad}' is not one of {}", allowed.join(", ")));
        }
        for key in ["compare-oracle", "isotropic-extension"] {
            if let Some(raw) = self.raw(key) {
                if raw != "on" && raw != "off" {
                    v.push(format!("{key}: expected on or off, got '{raw}'"));
                }
            }
        }
        let uses_steps = matches!(eq, Equation::Kdv | Equation::Nls | Equation::Spde)
            || (eq == Equation::Quotient && profile == "odd");
        if uses_steps && v.is_empty() {
            let ratio = self.f64("t-final") / self.f64("dt");
            let steps = ratio.round();
            if steps < 1.0 || (ratio - steps).abs() > 1e-6 * steps.max(1.0) {
                v.push("dt: t-final must be a whole number of steps".into());
            } else {
                let c = self.usize("checkpoints").max(1);
                if !(steps as usize).is_multiple_of(c) {
                    v.push(format!("checkpoints: {c} does not divide the {steps} steps"));
                }
            }
        }
        if eq == Equation::Spde && v.is_empty() {
            let steps = self.steps();
            let panels = self.usize("panels");
            if !steps.is_power_of_two() {
                v.push(format!("dt: {steps} steps, the shared Brownian sheet needs a power of two"));
            }
            if !panels.is_power_of_two() {
                v.push(format!("panels: {panels} is not a power of two"));
            }
            if let Err(e) = self.spde_params().validate() {
                v.push(format!("spde parameters: {e}"));
            }
        }
        if eq == Equation::SmolGeneral && v.is_empty() {
            if let Err(e) = self.smol_coefficients().validate() {
                v.push(format!("growth/coagulation: {e}"));
            }
        }
        if eq == Equation::Prelaplace && v.is_empty() && !(self.f64("nu") > 0.0) {
            v.push("nu: must be positive".into());
        }
        v
    }

    pub fn spde_params(&self) -> poppe::spde::SpdeParams {
        poppe::spde::SpdeParams {
            alpha: self.f64("alpha"),
            beta: self.f64("beta"),
            gamma: self.f64("gamma"),
            epsilon: self.f64("epsilon"),
            isotropic_extension: self.flag("isotropic-extension"),
        }
    }

    pub fn smol_coefficients(&self) -> poppe::smoluchowski::SmolCoefficients {
        poppe::smoluchowski::SmolCoefficients {
            d: self.list("growth"),
            b: vec![self.f64("coagulation")],
            loss_rate: self.f64("loss-rate"),
            ..Default::default()
        }
    }

    /// Canonical `key=value` lines of every result-relevant key.
    pub fn canonical(&self) -> String {
        let mut s = format!("equation={}\n", self.equation);
        for (k, v) in &self.values {
            if !UNHASHED.contains(&k.as_str()) {
                s.push_str(&format!("{k}={v}\n"));
            }
        }
        s
    }

    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn resolve(eq: Equation, flags: &[(&str, &str)]) -> Result<RunConfig, CliError> {
        RunConfig::resolve(eq, None, flags.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect())
    }

    fn violations(eq: Equation, flags: &[(&str, &str)]) -> Vec<String> {
        match resolve(eq, flags) {
            Ok(_) => vec![],
            Err(CliError::Invalid(v)) => v,
            Err(e) => panic!("{e}"),
        }
    }

    #[test]
    fn presets_are_valid() {
        for eq in Equation::value_variants() {
            assert!(violations(*eq, &[]).is_empty(), "{eq}");
        }
        for eq in [Equation::Kdv, Equation::Nls, Equation::Spde] {
            assert!(violations(eq, &[("preset", "paper")]).is_empty());
        }
        assert_eq!(violations(Equation::Burgers, &[("preset", "paper")]).len(), 1);
    }

    #[test]
    fn single_violations() {
        let v = violations(Equation::Kdv, &[("grid-n", "100")]);
        assert_eq!(v.len(), 1);
        assert!(v[0].contains("power of two"));
        let v = violations(Equation::Nls, &[("dt", "-0.01")]);
        assert_eq!(v.len(), 1);
        assert!(v[0].starts_with("dt"));
        let v = violations(Equation::Spde, &[("beta", "0.5")]);
        assert_eq!(v.len(), 1);
        assert!(v[0].contains("isotropic"));
    }

    #[test]
    fn hash_ignores_output_location() {
        let a = resolve(Equation::Elliptic, &[("out", "a")]).unwrap();
        let b = resolve(Equation::Elliptic, &[("out", "b"), ("threads", "3")]).unwrap();
        let c = resolve(Equation::Elliptic, &[("grid-n", "512")]).unwrap();
        assert_eq!(a.hash(), b.hash());
        assert_ne!(a.hash(), c.hash());
    }

    #[test]
    fn config_file_syntax() {
        let pairs = parse_config_file("# comment\ngrid-n = 64\n\ndt=0.5 # trailing\n").unwrap();
        assert_eq!(pairs, vec![("grid-n".into(), "64".into()), ("dt".into(), "0.5".into())]);
        assert!(parse_config_file("grid-n 64").is_err());
    }
}
