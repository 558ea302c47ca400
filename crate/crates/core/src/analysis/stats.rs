use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Correlation {
    /// `None` when either variable has zero variance.
    pub r: Option<f64>,
    pub p_value: Option<f64>,
    pub n: usize,
}

fn two_sided_p(t: f64, df: f64) -> Option<f64> {
    if t.is_infinite() {
        return Some(0.0);
    }
    let dist = StudentsT::new(0.0, 1.0, df).ok()?;
    Some((2.0 * dist.sf(t.abs())).min(1.0))
}

/// Sample Pearson correlation with a two-sided p-value from the t
/// distribution with `n - 2` degrees of freedom.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<Correlation> {
    if x.len() != y.len() {
        return Err(Error::Validation(format!("pearson: {} vs {} values", x.len(), y.len())));
    }
    let n = x.len();
    if n < 3 {
        return Err(Error::Validation(format!("pearson needs at least 3 pairs, got {n}")));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::Validation("pearson: non-finite value".into()));
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Ok(Correlation { r: None, p_value: None, n });
    }
    let r = (sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0);
    let df = (n - 2) as f64;
    let t = if r.abs() == 1.0 {
        f64::INFINITY.copysign(r)
    } else {
        r * (df / (1.0 - r * r)).sqrt()
    };
    Ok(Correlation {
        r: Some(r),
        p_value: two_sided_p(t, df),
        n,
    })
}

/// Pearson over the pairs where both values are defined.
pub fn pearson_pairwise(x: &[Option<f64>], y: &[Option<f64>]) -> Result<Correlation> {
    let (a, b): (Vec<f64>, Vec<f64>) = x
        .iter()
        .zip(y)
        .filter_map(|(a, b)| Some(((*a)?, (*b)?)))
        .unzip();
    pearson(&a, &b)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TTest {
    /// `None` when the differences are a nonzero constant.
    pub t: Option<f64>,
    pub p_value: Option<f64>,
    pub n: usize,
    pub mean_difference: f64,
    pub zero_variance: bool,
}

/// Two-sided paired t-test on `a - b`.
pub fn paired_t_test(a: &[f64], b: &[f64]) -> Result<TTest> {
    if a.len() != b.len() {
        return Err(Error::Validation(format!("paired t-test: {} vs {} values", a.len(), b.len())));
    }
    let n = a.len();
    if n < 2 {
        return Err(Error::Validation(format!("paired t-test needs at least 2 pairs, got {n}")));
    }
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let mean = diffs.iter().sum::<f64>() / n as f64;
    let var = diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    if var == 0.0 {
        return Ok(TTest {
            t: (mean == 0.0).then_some(0.0),
            p_value: None,
            n,
            mean_difference: mean,
            zero_variance: true,
        });
    }
    let t = mean / (var / n as f64).sqrt();
    Ok(TTest {
        t: Some(t),
        p_value: two_sided_p(t, (n - 1) as f64),
        n,
        mean_difference: mean,
        zero_variance: false,
    })
}

/// Multiplies each p-value by `m`, capped at 1.
pub fn bonferroni(p_values: &[f64], m: usize) -> Vec<f64> {
    p_values.iter().map(|p| (p * m as f64).min(1.0)).collect()
}
