use crate::error::{Error, Result};

/// `‖v‖_p` for `1 ≤ p ≤ ∞` (`p = f64::INFINITY` gives the max norm).
pub fn norm_p(v: &[f64], p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::input(format!("p-norm needs p >= 1, got {p}")));
    }
    let max = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if p.is_infinite() || max == 0.0 {
        return Ok(max);
    }
    if p == 1.0 {
        return Ok(v.iter().map(|x| x.abs()).sum());
    }
    // factor out the max so the powers stay in range
    let sum: f64 = v.iter().map(|x| (x.abs() / max).powf(p)).sum();
    Ok(max * sum.powf(1.0 / p))
}
