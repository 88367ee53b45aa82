use super::AssignError;

/// 1-based ranks; tied values share the mean of the ranks they span.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // ranks start+1 ..= end
        let rank = (start + 1 + end) as f64 / 2.0;
        for &idx in &order[start..end] {
            ranks[idx] = rank;
        }
        start = end;
    }
    ranks
}

/// Pearson correlation; 0 when either input has zero variance.
pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (da, db) = (a - mx, b - my);
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    if sxx == 0.0 || syy == 0.0 {
        return 0.0;
    }
    (sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0)
}

/// Spearman rank correlation with average ranks for ties.
///
/// Constant input has no rank variance and yields 0 rather than NaN.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64, AssignError> {
    if x.len() != y.len() {
        return Err(AssignError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 2 {
        return Err(AssignError::TooShort(x.len()));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(AssignError::NonFiniteInput);
    }
    Ok(pearson(&average_ranks(x), &average_ranks(y)))
}
