//! Statistical checks for chain output: chi-square goodness of fit and
//! batch-means variance for correlated samples.

/// Batch-means summary of a correlated sample sequence.
#[derive(Clone, Copy, Debug)]
pub struct BatchMeans {
    pub mean: f64,
    /// Estimated asymptotic variance of the sequence: n * Var(sample mean).
    pub asymptotic_variance: f64,
    /// Standard error of the overall mean.
    pub std_error: f64,
    pub batches: usize,
    pub batch_len: usize,
}

/// Batch-means estimator with batch length floor(sqrt(n)); trailing samples
/// that do not fill a batch are dropped from the variance (not the mean).
pub fn batch_means(samples: &[f64]) -> BatchMeans {
    let n = samples.len();
    assert!(n >= 4, "need at least 4 samples for batch means");
    let batch_len = (n as f64).sqrt().floor() as usize;
    let batches = n / batch_len;
    let used = batches * batch_len;
    let mean = samples.iter().sum::<f64>() / n as f64;
    let grand = samples[..used].iter().sum::<f64>() / used as f64;
    let mut ss = 0.0;
    for b in 0..batches {
        let bm = samples[b * batch_len..(b + 1) * batch_len]
            .iter()
            .sum::<f64>()
            / batch_len as f64;
        ss += (bm - grand) * (bm - grand);
    }
    let var_of_batch_mean = ss / (batches.saturating_sub(1)).max(1) as f64;
    let asymptotic_variance = batch_len as f64 * var_of_batch_mean;
    let std_error = (asymptotic_variance / used as f64).sqrt();
    BatchMeans {
        mean,
        asymptotic_variance,
        std_error,
        batches,
        batch_len,
    }
}

/// Pearson chi-square statistic of observed counts against expected
/// proportions. Cells with zero expectation must have zero counts.
pub fn chi_square_stat(observed: &[u64], expected: &[f64]) -> f64 {
    assert_eq!(observed.len(), expected.len());
    let total: u64 = observed.iter().sum();
    let mut stat = 0.0;
    for (&o, &e) in observed.iter().zip(expected) {
        let exp_count = e * total as f64;
        if exp_count <= 0.0 {
            assert_eq!(o, 0, "observed mass in a zero-probability cell");
            continue;
        }
        let d = o as f64 - exp_count;
        stat += d * d / exp_count;
    }
    stat
}

/// Upper 0.001 quantile of the chi-square distribution by degrees of freedom.
pub fn chi_square_critical_001(df: usize) -> f64 {
    const TABLE: [f64; 16] = [
        10.828, 13.816, 16.266, 18.467, 20.515, 22.458, 24.322, 26.124, 27.877,
        29.588, 31.264, 32.909, 34.528, 36.123, 37.697, 39.252,
    ];
    assert!(
        (1..=TABLE.len()).contains(&df),
        "df {df} outside tabulated range"
    );
    TABLE[df - 1]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;

    #[test]
    fn batch_means_iid_matches_plain_variance() {
        let mut rng = RngStream::new(17, 0);
        let samples: Vec<f64> = (0..40_000).map(|_| rng.next_f64()).collect();
        let bm = batch_means(&samples);
        // iid uniform: asymptotic variance = 1/12.
        assert!((bm.mean - 0.5).abs() < 0.01, "mean {}", bm.mean);
        assert!(
            (bm.asymptotic_variance - 1.0 / 12.0).abs() < 0.02,
            "avar {}",
            bm.asymptotic_variance
        );
        assert_eq!(bm.batch_len, 200);
    }

    #[test]
    fn batch_means_sees_positive_correlation() {
        // AR(1) with coefficient 0.9 has asymptotic variance far above the
        // marginal variance; batch means must pick that up.
        let mut rng = RngStream::new(23, 0);
        let mut x = 0.0;
        let samples: Vec<f64> = (0..100_000)
            .map(|_| {
                x = 0.9 * x + rng.next_standard_normal();
                x
            })
            .collect();
        let bm = batch_means(&samples);
        let marginal = 1.0 / (1.0 - 0.81);
        assert!(bm.asymptotic_variance > 3.0 * marginal);
    }

    #[test]
    fn chi_square_on_exact_proportions_is_small() {
        let observed = [250u64, 250, 250, 250];
        let stat = chi_square_stat(&observed, &[0.25; 4]);
        assert_eq!(stat, 0.0);
    }

    #[test]
    fn chi_square_detects_gross_mismatch() {
        let observed = [900u64, 100];
        let stat = chi_square_stat(&observed, &[0.5, 0.5]);
        assert!(stat > chi_square_critical_001(1));
    }

    #[test]
    fn critical_values_are_monotone() {
        for df in 2..=16 {
            assert!(chi_square_critical_001(df) > chi_square_critical_001(df - 1));
        }
    }
}
