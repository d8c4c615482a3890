//! Small statistical helpers shared by the experiment harness.

use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.959_963_984_540_054;

/// Wilson score interval for `successes` out of `trials` at normal quantile `z`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    // Clamp so the interval always brackets the point estimate exactly.
    ((centre - half).max(0.0).min(p), (centre + half).min(1.0).max(p))
}

/// Total-variation distance between an empirical law (given as a sample)
/// and a reference pmf over the non-negative integers.
pub fn tv_distance_to_pmf(sample: &[usize], pmf: impl Fn(usize) -> f64) -> f64 {
    if sample.is_empty() {
        return 1.0;
    }
    let max_seen = sample.iter().copied().max().unwrap_or(0);
    let mut freq = vec![0usize; max_seen + 1];
    for &v in sample {
        freq[v] += 1;
    }
    let total = sample.len() as f64;
    let mut sum = 0.0;
    let mut reference_mass = 0.0;
    for (v, &c) in freq.iter().enumerate() {
        let q = pmf(v);
        reference_mass += q;
        sum += (c as f64 / total - q).abs();
    }
    // Reference mass beyond the largest observed value.
    sum += (1.0 - reference_mass).max(0.0);
    0.5 * sum
}

/// Pearson χ² goodness-of-fit of a sample against a pmf on the non-negative
/// integers. Cells are merged from both ends until each expected count is at
/// least `min_expected`. Returns `(statistic, degrees_of_freedom, p_value)`;
/// with fewer than two cells the test is undefined and `None` is returned.
pub fn chi_square_gof(
    sample: &[usize],
    pmf: impl Fn(usize) -> f64,
    min_expected: f64,
) -> Option<(f64, usize, f64)> {
    let total = sample.len() as f64;
    if sample.is_empty() {
        return None;
    }
    let max_seen = sample.iter().copied().max().unwrap_or(0);
    // Extend the range until the reference tail is negligible.
    let mut upper = max_seen;
    let mut cdf: f64 = (0..=upper).map(&pmf).sum();
    while 1.0 - cdf > 1e-12 && upper < max_seen + 10_000 {
        upper += 1;
        cdf += pmf(upper);
    }
    let mut observed = vec![0.0; upper + 1];
    for &v in sample {
        observed[v] += 1.0;
    }
    let mut expected: Vec<f64> = (0..=upper).map(|v| pmf(v) * total).collect();
    // Fold the reference tail mass into the last cell.
    let last = expected.len() - 1;
    expected[last] += (1.0 - cdf).max(0.0) * total;

    let mut cells: Vec<(f64, f64)> = Vec::new();
    let (mut o_acc, mut e_acc) = (0.0, 0.0);
    for (o, e) in observed.into_iter().zip(expected) {
        o_acc += o;
        e_acc += e;
        if e_acc >= min_expected {
            cells.push((o_acc, e_acc));
            o_acc = 0.0;
            e_acc = 0.0;
        }
    }
    if e_acc > 0.0 || o_acc > 0.0 {
        match cells.last_mut() {
            Some(cell) => {
                cell.0 += o_acc;
                cell.1 += e_acc;
            }
            None => cells.push((o_acc, e_acc)),
        }
    }
    if cells.len() < 2 {
        return None;
    }
    let stat: f64 = cells.iter().map(|(o, e)| (o - e) * (o - e) / e).sum();
    let dof = cells.len() - 1;
    let p = ChiSquared::new(dof as f64).ok()?.sf(stat);
    Some((stat, dof, p))
}
