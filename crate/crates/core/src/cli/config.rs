use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use crate::params::Params;
use crate::simulator::InitialCondition;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verb {
    Simulate,
    Spectrum,
    Boltzmann,
    Entropy,
    Chaos,
}

impl Verb {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verb::Simulate => "simulate",
            Verb::Spectrum => "spectrum",
            Verb::Boltzmann => "boltzmann",
            Verb::Entropy => "entropy",
            Verb::Chaos => "chaos",
        }
    }

    pub fn parse(s: &str) -> Option<Verb> {
        [Verb::Simulate, Verb::Spectrum, Verb::Boltzmann, Verb::Entropy, Verb::Chaos]
            .into_iter()
            .find(|v| v.as_str() == s)
    }

    fn uses_particles(&self) -> bool {
        matches!(self, Verb::Simulate | Verb::Spectrum | Verb::Entropy)
    }

    fn is_stochastic(&self) -> bool {
        matches!(self, Verb::Simulate | Verb::Entropy | Verb::Chaos)
    }

    fn has_time_grid(&self) -> bool {
        !matches!(self, Verb::Spectrum)
    }
}

#[derive(Debug)]
pub enum ConfigError {
    /// Missing required key or an inconsistent combination.
    Usage(String),
    UnknownKey(String),
    Malformed { key: String, value: String },
    Io { path: String, source: std::io::Error },
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Usage(m) => write!(f, "usage error: {m}"),
            ConfigError::UnknownKey(k) => write!(f, "unknown configuration key `{k}`"),
            ConfigError::Malformed { key, value } => write!(f, "malformed value for `{key}`: `{value}`"),
            ConfigError::Io { path, source } => write!(f, "{path}: {source}"),
        }
    }
}

impl std::error::Error for ConfigError {}

/// Effective configuration of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub verb: Verb,
    /// `n_particles` is 1 for verbs that do not use it.
    pub params: Params,
    pub seed: u64,
    pub replicas: usize,
    pub horizon: f64,
    /// Number of sample times on `[0, horizon]`, endpoints included.
    pub samples: usize,
    pub init: InitialCondition,
    /// Highest moment integrated by `boltzmann`.
    pub order: usize,
    /// Particle-number ladder for `chaos`.
    pub ns: Vec<usize>,
    /// Also compare moments with the moment hierarchy in `chaos`.
    pub compare: bool,
}

/// `key = value` lines; blank lines and lines starting with `#` are skipped.
pub fn parse_key_values(text: &str) -> Result<Vec<(String, String)>, ConfigError> {
    let mut out = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| ConfigError::Usage(format!("expected `key = value`, got `{line}`")))?;
        out.push((normalize_key(k.trim()), v.trim().to_string()));
    }
    Ok(out)
}

/// The `# key = value` block at the top of an emitted CSV.
pub fn parse_header(csv: &str) -> Result<Vec<(String, String)>, ConfigError> {
    let block: String = csv
        .lines()
        .take_while(|l| l.starts_with('#'))
        .map(|l| format!("{}\n", l.trim_start_matches('#')))
        .collect();
    parse_key_values(&block)
}

pub fn read_config_file(path: &Path) -> Result<Vec<(String, String)>, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_key_values(&text)
}

pub fn normalize_key(k: &str) -> String {
    k.replace('-', "_")
}

struct Keys {
    map: BTreeMap<String, String>,
    used: Vec<String>,
}

impl Keys {
    fn take(&mut self, key: &str) -> Option<String> {
        self.used.push(key.to_string());
        self.map.get(key).cloned()
    }

    fn parse<T: std::str::FromStr>(&mut self, key: &str) -> Result<Option<T>, ConfigError> {
        match self.take(key) {
            None => Ok(None),
            Some(v) => v.parse().map(Some).map_err(|_| ConfigError::Malformed {
                key: key.to_string(),
                value: v,
            }),
        }
    }

    fn finite(&mut self, key: &str) -> Result<Option<f64>, ConfigError> {
        let v: Option<f64> = self.parse(key)?;
        match v {
            Some(x) if !x.is_finite() => Err(ConfigError::Malformed {
                key: key.to_string(),
                value: x.to_string(),
            }),
            _ => Ok(v),
        }
    }

    fn require(&mut self, key: &str) -> Result<f64, ConfigError> {
        self.finite(key)?
            .ok_or_else(|| ConfigError::Usage(format!("missing required key `{key}`")))
    }

    fn leftover(&self) -> Option<String> {
        self.map.keys().find(|k| !self.used.contains(k)).cloned()
    }
}

fn positive(key: &str, x: f64) -> Result<f64, ConfigError> {
    if x > 0.0 {
        Ok(x)
    } else {
        Err(ConfigError::Usage(format!("`{key}` must be positive, got {x}")))
    }
}

impl RunConfig {
    /// Build from `key = value` pairs; later pairs override earlier ones.
    pub fn from_pairs(verb: Verb, pairs: &[(String, String)]) -> Result<Self, ConfigError> {
        let mut keys = Keys {
            map: pairs.iter().cloned().collect(),
            used: Vec::new(),
        };
        if let Some(v) = keys.take("verb") {
            if v != verb.as_str() {
                return Err(ConfigError::Usage(format!("config is for `{v}`, not `{}`", verb.as_str())));
            }
        }
        let mu = keys.require("mu")?;
        let lambda = keys.finite("lambda")?.unwrap_or(1.0);
        let beta = keys.finite("beta")?.unwrap_or(1.0);

        let n = if verb.uses_particles() {
            let n: Option<usize> = keys.parse("n")?;
            n.ok_or_else(|| ConfigError::Usage("missing required key `n`".into()))?
        } else {
            1
        };
        let params = Params::new(n, lambda, mu, beta).map_err(|e| ConfigError::Usage(e.to_string()))?;

        let mut cfg = RunConfig {
            verb,
            params,
            seed: 1,
            replicas: 1000,
            horizon: 0.0,
            samples: 0,
            init: InitialCondition::Gaussian { temperature: 1.0 / beta },
            order: 0,
            ns: Vec::new(),
            compare: false,
        };
        if verb.is_stochastic() {
            cfg.seed = keys.parse("seed")?.unwrap_or(1);
            cfg.replicas = keys.parse("replicas")?.unwrap_or(1000);
            if cfg.replicas == 0 {
                return Err(ConfigError::Usage("`replicas` must be positive".into()));
            }
        }
        if verb.has_time_grid() {
            let default = if mu > 0.0 { 6.0 / mu } else { 6.0 };
            cfg.horizon = positive("horizon", keys.finite("horizon")?.unwrap_or(default))?;
            cfg.samples = keys.parse("samples")?.unwrap_or(31);
            if cfg.samples < 2 {
                return Err(ConfigError::Usage("`samples` must be at least 2".into()));
            }
            cfg.init = parse_init(&mut keys, verb, n, beta)?;
        }
        match verb {
            Verb::Boltzmann => {
                cfg.order = keys.parse("order")?.unwrap_or(crate::boltzmann::DEFAULT_ORDER);
                if cfg.order < 2 {
                    return Err(ConfigError::Usage("`order` must be at least 2".into()));
                }
            }
            Verb::Chaos => {
                cfg.ns = match keys.take("ns") {
                    None => vec![10, 50, 250, 1250],
                    Some(list) => parse_list(&list).ok_or(ConfigError::Malformed {
                        key: "ns".into(),
                        value: list.clone(),
                    })?,
                };
                if cfg.ns.iter().any(|&n| n < 2) {
                    return Err(ConfigError::Usage("every entry of `ns` must be at least 2".into()));
                }
                cfg.compare = keys.parse("compare")?.unwrap_or(false);
            }
            _ => {}
        }
        if let Some(k) = keys.leftover() {
            return Err(ConfigError::UnknownKey(k));
        }
        Ok(cfg)
    }

    /// Effective configuration as ordered `key = value` pairs.
    pub fn to_pairs(&self) -> Vec<(String, String)> {
        let mut out: Vec<(String, String)> = Vec::new();
        let mut put = |k: &str, v: String| out.push((k.to_string(), v));
        let p = &self.params;
        put("verb", self.verb.as_str().into());
        if self.verb.uses_particles() {
            put("n", p.n_particles.to_string());
        }
        put("lambda", p.lambda.to_string());
        put("mu", p.mu.to_string());
        put("beta", p.beta.to_string());
        if self.verb.is_stochastic() {
            put("seed", self.seed.to_string());
            put("replicas", self.replicas.to_string());
        }
        if self.verb.has_time_grid() {
            put("horizon", self.horizon.to_string());
            put("samples", self.samples.to_string());
            match self.init {
                InitialCondition::Gaussian { temperature } => {
                    put("init", "gaussian".into());
                    put("temperature", temperature.to_string());
                    put("mean", 0.0f64.to_string());
                }
                InitialCondition::Shifted { mean, temperature } => {
                    put("init", "gaussian".into());
                    put("temperature", temperature.to_string());
                    put("mean", mean.to_string());
                }
                InitialCondition::TwoTemperature {
                    hot_fraction,
                    t_hot,
                    t_cold,
                } => {
                    put("init", "two-temperature".into());
                    put("hot_fraction", hot_fraction.to_string());
                    put("t_hot", t_hot.to_string());
                    put("t_cold", t_cold.to_string());
                }
                InitialCondition::Uniform { half_width } => {
                    put("init", "uniform".into());
                    put("half_width", half_width.to_string());
                }
            }
        }
        match self.verb {
            Verb::Boltzmann => put("order", self.order.to_string()),
            Verb::Chaos => {
                let ns: Vec<String> = self.ns.iter().map(|n| n.to_string()).collect();
                put("ns", ns.join(","));
                put("compare", self.compare.to_string());
            }
            _ => {}
        }
        out
    }

    pub fn header_lines(&self) -> Vec<String> {
        self.to_pairs().into_iter().map(|(k, v)| format!("{k} = {v}")).collect()
    }
}

fn parse_list(s: &str) -> Option<Vec<usize>> {
    let v: Option<Vec<usize>> = s.split(',').map(|x| x.trim().parse().ok()).collect();
    v.filter(|v| !v.is_empty())
}

fn parse_init(keys: &mut Keys, verb: Verb, n: usize, beta: f64) -> Result<InitialCondition, ConfigError> {
    let default_kind = if verb == Verb::Entropy { "two-temperature" } else { "gaussian" };
    let kind = keys.take("init").unwrap_or_else(|| default_kind.into());
    let init = match kind.as_str() {
        "gaussian" => {
            let k0 = if verb == Verb::Simulate { keys.finite("k0")? } else { None };
            let t = keys.finite("temperature")?;
            let temperature = match (k0, t) {
                (Some(_), Some(_)) => {
                    return Err(ConfigError::Usage("give either `k0` or `temperature`, not both".into()))
                }
                (Some(k0), None) => 2.0 * positive("k0", k0)? / n as f64,
                (None, Some(t)) => positive("temperature", t)?,
                (None, None) => 2.0 / beta,
            };
            let mean = keys.finite("mean")?.unwrap_or(0.0);
            if mean == 0.0 {
                InitialCondition::Gaussian { temperature }
            } else {
                InitialCondition::Shifted { mean, temperature }
            }
        }
        "two-temperature" => {
            let hot_fraction = keys.finite("hot_fraction")?.unwrap_or(0.1);
            if !(0.0..=1.0).contains(&hot_fraction) {
                return Err(ConfigError::Usage("`hot_fraction` must lie in [0, 1]".into()));
            }
            InitialCondition::TwoTemperature {
                hot_fraction,
                t_hot: positive("t_hot", keys.finite("t_hot")?.unwrap_or(5.0 / beta))?,
                t_cold: positive("t_cold", keys.finite("t_cold")?.unwrap_or(5.0 / (9.0 * beta)))?,
            }
        }
        "uniform" => InitialCondition::Uniform {
            half_width: positive("half_width", keys.finite("half_width")?.unwrap_or(2.0 / beta.sqrt()))?,
        },
        _ => {
            return Err(ConfigError::Malformed {
                key: "init".into(),
                value: kind,
            })
        }
    };
    Ok(init)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs(s: &[(&str, &str)]) -> Vec<(String, String)> {
        s.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
    }

    #[test]
    fn header_round_trip() {
        for verb in [Verb::Simulate, Verb::Spectrum, Verb::Boltzmann, Verb::Entropy, Verb::Chaos] {
            let cfg = RunConfig::from_pairs(
                verb,
                &pairs(&[("n", "7"), ("mu", "0.3"), ("lambda", "2.5"), ("beta", "1.7")])
                    .into_iter()
                    .filter(|(k, _)| k != "n" || verb.uses_particles())
                    .collect::<Vec<_>>(),
            )
            .unwrap();
            let text: String = cfg.header_lines().iter().map(|l| format!("# {l}\n")).collect();
            let back = RunConfig::from_pairs(verb, &parse_header(&(text + "a,b\n")).unwrap()).unwrap();
            assert_eq!(back, cfg);
        }
    }

    #[test]
    fn k0_sets_the_temperature() {
        let cfg = RunConfig::from_pairs(Verb::Simulate, &pairs(&[("n", "100"), ("mu", "1"), ("k0", "100")])).unwrap();
        assert_eq!(cfg.init, InitialCondition::Gaussian { temperature: 2.0 });
    }

    #[test]
    fn errors_are_classified() {
        let e = RunConfig::from_pairs(Verb::Entropy, &pairs(&[("n", "10")])).unwrap_err();
        assert!(matches!(e, ConfigError::Usage(_)));
        let e = RunConfig::from_pairs(Verb::Spectrum, &pairs(&[("n", "3"), ("mu", "1"), ("colour", "red")])).unwrap_err();
        assert!(matches!(e, ConfigError::UnknownKey(k) if k == "colour"));
        let e = RunConfig::from_pairs(Verb::Spectrum, &pairs(&[("n", "3"), ("mu", "one")])).unwrap_err();
        assert!(matches!(e, ConfigError::Malformed { .. }));
        // keys belonging to other verbs are unknown here
        let e = RunConfig::from_pairs(Verb::Spectrum, &pairs(&[("n", "3"), ("mu", "1"), ("seed", "4")])).unwrap_err();
        assert!(matches!(e, ConfigError::UnknownKey(_)));
    }

    #[test]
    fn key_value_text() {
        let kv = parse_key_values("# comment\n\nmu = 2\nhot-fraction=0.2\n").unwrap();
        assert_eq!(kv, pairs(&[("mu", "2"), ("hot_fraction", "0.2")]));
        assert!(parse_key_values("mu 2").is_err());
    }
}
