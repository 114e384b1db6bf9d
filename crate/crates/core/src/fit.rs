//! Ordinary least squares in log-log space.

use crate::error::{Error, Result};

/// Slope and intercept of the equal-weight least-squares line through `(xs, ys)`.
pub fn least_squares(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    if xs.len() != ys.len() {
        return Err(Error::fit("abscissae and ordinates differ in length"));
    }
    if xs.len() < 2 {
        return Err(Error::fit(format!("need at least two points, got {}", xs.len())));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::fit("all abscissae coincide"));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

/// Power law `y = c * x^p` fitted in log-log space; returns `(p, c)`.
pub fn power_law(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    if let Some(bad) = xs.iter().chain(ys).find(|v| !(**v > 0.0) || !v.is_finite()) {
        return Err(Error::fit(format!(
            "log-log fit needs positive finite data, found {bad}"
        )));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let (slope, intercept) = least_squares(&lx, &ly)?;
    Ok((slope, intercept.exp()))
}
