//! Run configuration files.
//!
//! Flat `key = value` lines, `#` comments, and an optional `[sweep]`
//! section:
//!
//! ```text
//! n = 1000
//! K = 36
//! P = 10000
//! d = 2
//! g = 0.9
//! trials = 500
//! seed = 7
//!
//! [sweep]
//! axis = g
//! values = 0.5, 0.75, 1.0
//! ```
//!
//! Instead of `values` a sweep may give `start`, `stop` and `step`.

use std::str::FromStr;

use rglab::theory::Axis;
use serde::Serialize;

/// Values read from a config file; absent keys stay `None` so command-line
/// flags can fill them in.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct RunConfig {
    pub n: Option<usize>,
    pub ring_size: Option<u64>,
    pub pool_size: Option<u64>,
    pub min_overlap: Option<u64>,
    pub friendship: Option<f64>,
    pub link_survival: Option<f64>,
    pub m: Option<u64>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub sweep: Option<SweepSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSpec {
    pub axis: Axis,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: usize,
    pub field: Option<String>,
    pub message: String,
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.field {
            Some(field) => write!(f, "line {}, field `{}`: {}", self.line, field, self.message),
            None => write!(f, "line {}: {}", self.line, self.message),
        }
    }
}

fn err(line: usize, field: Option<&str>, message: impl Into<String>) -> ConfigError {
    ConfigError {
        line,
        field: field.map(str::to_owned),
        message: message.into(),
    }
}

fn parse_value<T: FromStr>(line: usize, key: &str, raw: &str, what: &str) -> Result<T, ConfigError> {
    raw.parse()
        .map_err(|_| err(line, Some(key), format!("expected {what}, got `{raw}`")))
}

fn set_once<T>(slot: &mut Option<T>, value: T, line: usize, key: &str) -> Result<(), ConfigError> {
    if slot.is_some() {
        return Err(err(line, Some(key), "given more than once"));
    }
    *slot = Some(value);
    Ok(())
}

/// Evenly spaced values `start, start + step, ...` up to `stop` inclusive.
pub fn range_values(start: f64, stop: f64, step: f64) -> Result<Vec<f64>, String> {
    if !(start.is_finite() && stop.is_finite() && step.is_finite()) {
        return Err("range bounds must be finite".into());
    }
    if step <= 0.0 {
        return Err(format!("step must be positive, got {step}"));
    }
    if stop < start {
        return Err(format!("stop {stop} is below start {start}"));
    }
    let span = (stop - start) / step;
    let count = (span + 1e-9).floor() as u64 + 1;
    if count > 100_000 {
        return Err(format!("range has {count} points; at most 100000 allowed"));
    }
    // Rounding to 12 decimals keeps 0.5 + 2 * 0.05 from printing as 0.6000000000000001.
    Ok((0..count)
        .map(|i| {
            let v = start + i as f64 * step;
            (v * 1e12).round() / 1e12
        })
        .collect())
}

/// Parses a comma-separated value list.
pub fn list_values(raw: &str) -> Result<Vec<f64>, String> {
    raw.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|_| format!("`{s}` is not a number")))
        .collect()
}

#[derive(Default)]
struct SweepDraft {
    header_line: usize,
    axis: Option<Axis>,
    values: Option<Vec<f64>>,
    start: Option<f64>,
    stop: Option<f64>,
    step: Option<f64>,
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut cfg = RunConfig::default();
    let mut sweep: Option<SweepDraft> = None;

    for (idx, raw_line) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw_line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if content.starts_with('[') {
            if content != "[sweep]" {
                return Err(err(line, None, format!("unknown section `{content}`; only [sweep] is supported")));
            }
            if sweep.is_some() {
                return Err(err(line, None, "[sweep] section given more than once"));
            }
            sweep = Some(SweepDraft {
                header_line: line,
                ..SweepDraft::default()
            });
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(err(line, None, format!("expected `key = value`, got `{content}`")));
        };
        let (key, value) = (key.trim(), value.trim());
        if value.is_empty() {
            return Err(err(line, Some(key), "missing value"));
        }

        if let Some(draft) = sweep.as_mut() {
            match key {
                "axis" => {
                    let axis = value
                        .parse::<Axis>()
                        .map_err(|_| err(line, Some(key), format!("unknown axis `{value}`; expected g, n, m, K, P or f")))?;
                    set_once(&mut draft.axis, axis, line, key)?
                }
                "values" => {
                    let vals = list_values(value).map_err(|m| err(line, Some(key), m))?;
                    set_once(&mut draft.values, vals, line, key)?
                }
                "start" => set_once(&mut draft.start, parse_value(line, key, value, "a number")?, line, key)?,
                "stop" => set_once(&mut draft.stop, parse_value(line, key, value, "a number")?, line, key)?,
                "step" => set_once(&mut draft.step, parse_value(line, key, value, "a number")?, line, key)?,
                _ => return Err(err(line, Some(key), "unknown key in [sweep]; expected axis, values, start, stop or step")),
            }
            continue;
        }

        let int = "a non-negative integer";
        let num = "a number";
        match key {
            "n" => set_once(&mut cfg.n, parse_value(line, key, value, int)?, line, key)?,
            "K" | "k" => set_once(&mut cfg.ring_size, parse_value(line, key, value, int)?, line, key)?,
            "P" | "p" => set_once(&mut cfg.pool_size, parse_value(line, key, value, int)?, line, key)?,
            "d" => set_once(&mut cfg.min_overlap, parse_value(line, key, value, int)?, line, key)?,
            "f" => set_once(&mut cfg.friendship, parse_value(line, key, value, num)?, line, key)?,
            "g" => set_once(&mut cfg.link_survival, parse_value(line, key, value, num)?, line, key)?,
            "m" => set_once(&mut cfg.m, parse_value(line, key, value, int)?, line, key)?,
            "trials" => set_once(&mut cfg.trials, parse_value(line, key, value, int)?, line, key)?,
            "seed" => set_once(&mut cfg.seed, parse_value(line, key, value, int)?, line, key)?,
            _ => {
                return Err(err(
                    line,
                    Some(key),
                    "unknown key; expected n, K, P, d, f, g, m, trials or seed",
                ))
            }
        }
    }

    if let Some(draft) = sweep {
        let line = draft.header_line;
        let axis = draft
            .axis
            .ok_or_else(|| err(line, Some("axis"), "[sweep] needs an axis"))?;
        let values = match (draft.values, draft.start, draft.stop, draft.step) {
            (Some(v), None, None, None) => v,
            (None, Some(a), Some(b), Some(s)) => range_values(a, b, s).map_err(|m| err(line, Some("step"), m))?,
            (Some(_), _, _, _) => {
                return Err(err(line, Some("values"), "give either values or start/stop/step, not both"))
            }
            _ => {
                return Err(err(
                    line,
                    Some("values"),
                    "[sweep] needs values or all of start, stop and step",
                ))
            }
        };
        if values.is_empty() {
            return Err(err(line, Some("values"), "sweep has no values"));
        }
        cfg.sweep = Some(SweepSpec { axis, values });
    }
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_flat_keys_and_sweep() {
        let cfg = parse_config(
            "# desk scale\nn = 1000\nK = 36\nP = 10000\nd = 2\nf = 1\ng = 0.9 # link survival\n\
             trials = 500\nseed = 7\n\n[sweep]\naxis = g\nvalues = 0.5, 0.75,1\n",
        )
        .unwrap();
        assert_eq!(cfg.n, Some(1000));
        assert_eq!(cfg.ring_size, Some(36));
        assert_eq!(cfg.link_survival, Some(0.9));
        assert_eq!(cfg.m, None);
        let sweep = cfg.sweep.unwrap();
        assert_eq!(sweep.axis, Axis::G);
        assert_eq!(sweep.values, vec![0.5, 0.75, 1.0]);
    }

    #[test]
    fn range_has_inclusive_end() {
        let v = range_values(0.5, 1.0, 0.05).unwrap();
        assert_eq!(v.len(), 11);
        assert_eq!(v[2], 0.6);
        assert_eq!(*v.last().unwrap(), 1.0);
        let cfg = parse_config("[sweep]\naxis = n\nstart = 100\nstop = 400\nstep = 100\n").unwrap();
        assert_eq!(cfg.sweep.unwrap().values, vec![100.0, 200.0, 300.0, 400.0]);
    }

    #[test]
    fn diagnostics_name_line_and_field() {
        let e = parse_config("n = 10\nK = abc\n").unwrap_err();
        assert_eq!((e.line, e.field.as_deref()), (2, Some("K")));
        assert!(e.to_string().contains("line 2, field `K`"));

        let e = parse_config("n = 10\nbogus = 1\n").unwrap_err();
        assert_eq!(e.line, 2);
        assert_eq!(e.field.as_deref(), Some("bogus"));

        let e = parse_config("n 10\n").unwrap_err();
        assert_eq!((e.line, e.field), (1, None));

        let e = parse_config("n = 1\nn = 2\n").unwrap_err();
        assert_eq!(e.line, 2);

        let e = parse_config("[sweep]\naxis = q\n").unwrap_err();
        assert_eq!((e.line, e.field.as_deref()), (2, Some("axis")));

        let e = parse_config("\n[sweep]\naxis = g\n").unwrap_err();
        assert_eq!((e.line, e.field.as_deref()), (2, Some("values")));

        assert!(parse_config("[other]\n").is_err());
    }
}
