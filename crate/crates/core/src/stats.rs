//! Small fitting helpers shared by tests and experiments.

/// Least-squares slope and intercept of `y` against `x`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    assert_eq!(x.len(), y.len());
    assert!(x.len() >= 2, "need at least two points");
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Slope of `ln v` against `ln k`.
pub fn loglog_slope(k: &[f64], v: &[f64]) -> f64 {
    let lx: Vec<f64> = k.iter().map(|a| a.ln()).collect();
    let ly: Vec<f64> = v.iter().map(|a| a.ln()).collect();
    linear_fit(&lx, &ly).0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let k = [32.0, 64.0, 128.0, 256.0];
        let v: Vec<f64> = k.iter().map(|x: &f64| 3.0 * x.powf(-0.75)).collect();
        assert!((loglog_slope(&k, &v) + 0.75).abs() < 1e-12);
    }
}
