//! Text formats: 9-significant-digit floats, exact fractions, result CSV and
//! run manifests.

use std::fs;
use std::path::{Path, PathBuf};

use num::BigRational;
use rglab::experiments::ExperimentResult;
use serde::Serialize;
use sha2::{Digest, Sha256};

pub const CSV_HEADER: &str = "sweep_param,sweep_value,n,K,P,d,f,g,m,trials,successes,\
empirical_prob,ci_low,ci_high,alpha,predicted_limit,critical_value,seed";

/// Largest numerator/denominator length, in decimal digits, printed exactly.
pub const MAX_EXACT_DIGITS: usize = 64;

/// Formats `x` with 9 significant digits, trailing zeros removed.
///
/// Plain notation is used for decimal exponents in `-5..9`, scientific
/// notation otherwise.
pub fn sig9(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.8e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(char::is_ascii_digit).collect();
    let sign = if negative { "-" } else { "" };

    if !(-5..9).contains(&exp) {
        let m = trim_fraction(&format!("{}.{}", &digits[..1], &digits[1..]));
        return format!("{sign}{m}e{exp}");
    }
    let body = if exp >= 0 {
        let split = exp as usize + 1;
        format!("{}.{}", &digits[..split], &digits[split..])
    } else {
        format!("0.{}{}", "0".repeat((-exp - 1) as usize), digits)
    };
    format!("{sign}{}", trim_fraction(&body))
}

fn trim_fraction(s: &str) -> String {
    if !s.contains('.') {
        return s.to_owned();
    }
    s.trim_end_matches('0').trim_end_matches('.').to_owned()
}

/// `num/den` when both fit in [`MAX_EXACT_DIGITS`] digits.
pub fn exact_fraction(r: &BigRational) -> Option<String> {
    let num = r.numer().to_string();
    let den = r.denom().to_string();
    let digits = |s: &str| s.trim_start_matches('-').len();
    if digits(&num) > MAX_EXACT_DIGITS || digits(&den) > MAX_EXACT_DIGITS {
        return None;
    }
    Some(if den == "1" { num } else { format!("{num}/{den}") })
}

fn opt(x: Option<f64>) -> String {
    x.map(sig9).unwrap_or_default()
}

pub fn csv_row(r: &ExperimentResult) -> String {
    let p = &r.params;
    [
        r.sweep_param.map(|a| a.name().to_owned()).unwrap_or_default(),
        opt(r.sweep_value),
        p.n.to_string(),
        p.ring_size.to_string(),
        p.pool_size.to_string(),
        p.min_overlap.to_string(),
        sig9(p.friendship),
        sig9(p.link_survival),
        r.m.to_string(),
        r.trials.to_string(),
        r.successes.to_string(),
        sig9(r.empirical_prob),
        sig9(r.ci_low),
        sig9(r.ci_high),
        opt(r.alpha),
        opt(r.predicted_limit),
        opt(r.critical.map(|c| c.value)),
        r.seed.to_string(),
    ]
    .join(",")
}

pub fn csv_document(rows: &[ExperimentResult]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&csv_row(r));
        out.push('\n');
    }
    out
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, Serialize)]
pub struct OutputDigest {
    pub path: String,
    pub sha256: String,
}

/// Provenance record written next to every CSV.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest<C: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config: C,
    pub base_seed: u64,
    pub workers: usize,
    pub started_at: String,
    pub finished_at: String,
    pub outputs: Vec<OutputDigest>,
}

/// `results.csv` → `results.manifest.json`.
pub fn manifest_path(csv: &Path) -> PathBuf {
    let stem = csv
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "run".into());
    csv.with_file_name(format!("{stem}.manifest.json"))
}

/// Writes the CSV and its manifest; returns the manifest path.
pub fn write_csv_with_manifest<C: Serialize>(
    csv_path: &Path,
    csv: &str,
    mut manifest: RunManifest<C>,
) -> std::io::Result<PathBuf> {
    fs::write(csv_path, csv)?;
    manifest.outputs = vec![OutputDigest {
        path: csv_path.display().to_string(),
        sha256: sha256_hex(csv.as_bytes()),
    }];
    let path = manifest_path(csv_path);
    let json = serde_json::to_string_pretty(&manifest).map_err(std::io::Error::other)?;
    fs::write(&path, json + "\n")?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::BigInt;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(sig9(11.0 / 60.0), "0.183333333");
        assert_eq!(sig9(0.2), "0.2");
        assert_eq!(sig9(1.0), "1");
        assert_eq!(sig9(-2.5), "-2.5");
        assert_eq!(sig9(1000.0), "1000");
        assert_eq!(sig9(0.9999999999), "1");
        assert_eq!(sig9(123456789.4), "123456789");
        assert_eq!(sig9(1234567890.0), "1.23456789e9");
        assert_eq!(sig9(1.25e-7), "1.25e-7");
        assert_eq!(sig9(0.00012345678912), "0.000123456789");
        assert_eq!(sig9(std::f64::consts::E.recip()), "0.367879441");
        assert_eq!(sig9(f64::INFINITY), "inf");
    }

    #[test]
    fn exact_fraction_cutoff() {
        let r = BigRational::new(BigInt::from(11), BigInt::from(60));
        assert_eq!(exact_fraction(&r).unwrap(), "11/60");
        let whole = BigRational::from_integer(BigInt::from(1));
        assert_eq!(exact_fraction(&whole).unwrap(), "1");
        let big = BigRational::new(BigInt::from(1), BigInt::from(10).pow(64));
        assert!(exact_fraction(&big).is_none());
        let edge = BigRational::new(BigInt::from(1), BigInt::from(10).pow(63));
        assert!(exact_fraction(&edge).is_some());
    }

    #[test]
    fn header_has_frozen_columns() {
        let cols: Vec<&str> = CSV_HEADER.split(',').collect();
        assert_eq!(cols.len(), 18);
        assert_eq!(cols[0], "sweep_param");
        assert_eq!(cols[16], "critical_value");
        assert_eq!(cols[17], "seed");
    }

    #[test]
    fn manifest_sits_next_to_csv() {
        assert_eq!(
            manifest_path(Path::new("/tmp/out/run1.csv")),
            PathBuf::from("/tmp/out/run1.manifest.json")
        );
    }
}
