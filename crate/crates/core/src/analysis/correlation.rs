use crate::error::{Error, Result};

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Population variance (denominator n).
pub fn variance(seq: &[f64]) -> Result<f64> {
    if seq.is_empty() {
        return Err(Error::Empty("sequence"));
    }
    let m = mean(seq);
    Ok(seq.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / seq.len() as f64)
}

/// (1/n) sum_{t} (x_{t+lag} - mean x)(y_t - mean y).
pub fn cross_covariance(x: &[f64], y: &[f64], lag: usize) -> Result<f64> {
    if x.is_empty() {
        return Err(Error::Empty("sequence"));
    }
    if x.len() != y.len() {
        return Err(Error::Dimension {
            expected: x.len(),
            actual: y.len(),
        });
    }
    let n = x.len();
    if lag >= n {
        return Err(Error::invalid(
            "lag",
            format!("{lag} is not below the length {n}"),
        ));
    }
    let (mx, my) = (mean(x), mean(y));
    let s: f64 = (0..n - lag).map(|t| (x[t + lag] - mx) * (y[t] - my)).sum();
    Ok(s / n as f64)
}

/// Normalized sample autocorrelation Acov(lag) / Acov(0).
pub fn sample_acf(seq: &[f64], lag: usize) -> Result<f64> {
    let c0 = cross_covariance(seq, seq, 0)?;
    if c0 == 0.0 {
        return Err(Error::ConstantSeries);
    }
    Ok(cross_covariance(seq, seq, lag)? / c0)
}

/// All normalized autocorrelations for lags 0..=max_lag.
pub fn acf(seq: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    let c0 = cross_covariance(seq, seq, 0)?;
    if c0 == 0.0 {
        return Err(Error::ConstantSeries);
    }
    (0..=max_lag)
        .map(|k| Ok(cross_covariance(seq, seq, k)? / c0))
        .collect()
}

/// Cross-covariance normalized by sqrt(Acov_x(0) Acov_y(0)), so that values
/// lie in [-1, 1] and a series against itself gives its ACF.
pub fn sample_ccf(x: &[f64], y: &[f64], lag: usize) -> Result<f64> {
    let cxy = cross_covariance(x, y, lag)?;
    let cx = cross_covariance(x, x, 0)?;
    let cy = cross_covariance(y, y, 0)?;
    if cx == 0.0 || cy == 0.0 {
        return Err(Error::ConstantSeries);
    }
    Ok(cxy / (cx * cy).sqrt())
}
