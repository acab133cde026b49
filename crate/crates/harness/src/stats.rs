/// Trailing moving average: entry `e` is the mean of episodes
/// `max(0, e - window + 1) ..= e`.
pub fn moving_average(values: &[f64], window: usize) -> Vec<f64> {
    assert!(window > 0, "window must be positive");
    (0..values.len())
        .map(|i| {
            let lo = (i + 1).saturating_sub(window);
            values[lo..=i].iter().sum::<f64>() / (i + 1 - lo) as f64
        })
        .collect()
}

/// Linearly interpolated quantile of an ascending slice: position
/// `q * (n - 1)`.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of an empty sample");
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SummaryRow {
    pub episode: usize,
    pub median: f64,
    pub q_low: f64,
    pub q_high: f64,
}

/// Per-episode median and quantile band across iterations.
pub fn summarize(curves: &[Vec<f64>], q_low: f64, q_high: f64) -> Vec<SummaryRow> {
    let episodes = curves.iter().map(Vec::len).min().unwrap_or(0);
    let mut column = Vec::with_capacity(curves.len());
    (0..episodes)
        .map(|e| {
            column.clear();
            column.extend(curves.iter().map(|c| c[e]));
            column.sort_by(f64::total_cmp);
            SummaryRow {
                episode: e,
                median: quantile_sorted(&column, 0.5),
                q_low: quantile_sorted(&column, q_low),
                q_high: quantile_sorted(&column, q_high),
            }
        })
        .collect()
}

/// Mean of the last `n` entries (all entries if fewer).
pub fn tail_mean(values: &[f64], n: usize) -> f64 {
    let tail = &values[values.len().saturating_sub(n)..];
    tail.iter().sum::<f64>() / tail.len().max(1) as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_window_is_identity() {
        let xs = [0.0, 1.0, 1.0, 0.0, 1.0];
        assert_eq!(moving_average(&xs, 1), xs);
    }

    #[test]
    fn warm_up_uses_available_episodes() {
        let ma = moving_average(&[2.0, 4.0, 6.0, 8.0], 3);
        assert_eq!(ma, vec![2.0, 3.0, 4.0, 6.0]);
    }

    #[test]
    fn quantiles_interpolate() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile_sorted(&xs, 0.5), 2.5);
        assert_eq!(quantile_sorted(&xs, 0.25), 1.75);
        assert_eq!(quantile_sorted(&xs, 1.0), 4.0);
        assert_eq!(quantile_sorted(&[5.0], 0.3), 5.0);
    }

    #[test]
    fn summary_is_per_episode() {
        let rows = summarize(
            &[vec![0.0, 1.0], vec![2.0, 3.0], vec![4.0, 5.0]],
            0.25,
            0.75,
        );
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[1].median, 3.0);
        assert_eq!(rows[0].q_low, 1.0);
        assert_eq!(rows[0].q_high, 3.0);
    }

    #[test]
    fn tail_mean_of_short_series() {
        assert_eq!(tail_mean(&[1.0, 3.0], 50), 2.0);
        assert_eq!(tail_mean(&[9.0, 1.0, 3.0], 2), 2.0);
    }
}
