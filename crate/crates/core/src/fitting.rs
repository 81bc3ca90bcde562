//! Least-squares line fits used for decay rates and growth exponents.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

/// Ordinary least squares y = a x + b with coefficient of determination.
pub fn fit_line(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::FitUnstable(format!(
            "need at least 2 paired points, got {}",
            xs.len().min(ys.len())
        )));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if sxx <= 0.0 {
        return Err(Error::FitUnstable("zero variance in abscissae".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy <= 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    Ok(LineFit { slope, intercept, r2 })
}

/// Fit `log y` against `log x`; points with non-positive coordinates are
/// rejected. Returns the exponent as `slope`.
pub fn fit_loglog(xs: &[f64], ys: &[f64], min_points: usize) -> Result<LineFit> {
    let mut lx = Vec::new();
    let mut ly = Vec::new();
    for (&x, &y) in xs.iter().zip(ys) {
        if x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite() {
            lx.push(x.ln());
            ly.push(y.ln());
        }
    }
    if lx.len() < min_points {
        return Err(Error::FitUnstable(format!(
            "log-log fit window has {} usable points, need {}",
            lx.len(),
            min_points
        )));
    }
    fit_line(&lx, &ly)
}

/// Fit `log y` against `x` (semilog); used for exponential decay rates.
pub fn fit_semilog(xs: &[f64], ys: &[f64], min_points: usize) -> Result<LineFit> {
    let mut lx = Vec::new();
    let mut ly = Vec::new();
    for (&x, &y) in xs.iter().zip(ys) {
        if y > 0.0 && x.is_finite() && y.is_finite() {
            lx.push(x);
            ly.push(y.ln());
        }
    }
    if lx.len() < min_points {
        return Err(Error::FitUnstable(format!(
            "semilog fit window has {} usable points, need {}",
            lx.len(),
            min_points
        )));
    }
    fit_line(&lx, &ly)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let xs: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 2.5 * x - 1.0).collect();
        let f = fit_line(&xs, &ys).unwrap();
        assert!((f.slope - 2.5).abs() < 1e-12);
        assert!((f.intercept + 1.0).abs() < 1e-12);
        assert!((f.r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn synthetic_power_law() {
        let xs: Vec<f64> = (1..30).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x.powf(-4.0 / 3.0)).collect();
        let f = fit_loglog(&xs, &ys, 5).unwrap();
        assert!((f.slope + 4.0 / 3.0).abs() < 1e-10);
        assert!((f.r2 - 1.0).abs() < 1e-10);
    }

    #[test]
    fn synthetic_exponential() {
        let xs: Vec<f64> = (0..50).map(|i| 0.1 * i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| (-3.0 * x).exp()).collect();
        let f = fit_semilog(&xs, &ys, 20).unwrap();
        assert!((f.slope + 3.0).abs() < 1e-10);
    }

    #[test]
    fn unstable_small_window() {
        assert!(matches!(
            fit_loglog(&[1.0, 2.0], &[1.0, 2.0], 5),
            Err(Error::FitUnstable(_))
        ));
    }
}
