use super::{AnalysisError, Signal};

/// Trailing moving average: the value at `t_k` is the mean of all samples
/// with `t_k − window < t ≤ t_k`.
pub fn moving_average(signal: &Signal, window: f64) -> Result<Signal, AnalysisError> {
    if !(window > 0.0) || !window.is_finite() {
        return Err(AnalysisError::NonPositiveWindow(window));
    }
    let mut out = Vec::with_capacity(signal.len());
    let mut start = 0;
    // tolerance for time grids built from repeated float steps
    let eps = 1e-9 * window;
    for k in 0..signal.len() {
        while signal.t[start] <= signal.t[k] - window + eps {
            start += 1;
        }
        let span = &signal.v[start..=k];
        out.push(span.iter().sum::<f64>() / span.len() as f64);
    }
    Ok(Signal::new(signal.t.clone(), out))
}
