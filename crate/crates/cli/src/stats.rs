//! Small statistical helpers used by the harnesses.

/// Least-squares line fit; returns `(slope, intercept, rms_residual)`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    assert_eq!(xs.len(), ys.len());
    assert!(xs.len() >= 2, "need at least two points");
    let n = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let intercept = (sy - slope * sx) / n;
    let rms = (xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - slope * x - intercept).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    (slope, intercept, rms)
}

/// Two-sample Kolmogorov-Smirnov test. Returns `(d, p)` where `p` is the
/// asymptotic significance of the statistic `d` (Numerical Recipes
/// small-sample correction). With tied discrete data the test is
/// conservative.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> (f64, f64) {
    let mut xa = a.to_vec();
    let mut xb = b.to_vec();
    xa.sort_by(f64::total_cmp);
    xb.sort_by(f64::total_cmp);
    let (na, nb) = (xa.len(), xb.len());
    let mut d: f64 = 0.0;
    let (mut i, mut j) = (0usize, 0usize);
    while i < na && j < nb {
        let x = xa[i].min(xb[j]);
        while i < na && xa[i] <= x {
            i += 1;
        }
        while j < nb && xb[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na as f64 - j as f64 / nb as f64).abs());
    }
    let ne = (na as f64 * nb as f64) / (na + nb) as f64;
    let lambda = (ne.sqrt() + 0.12 + 0.11 / ne.sqrt()) * d;
    (d, kolmogorov_q(lambda))
}

/// `Q_KS(lambda) = 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 lambda^2)`.
fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for j in 1..=100 {
        let term = (-2.0 * (j as f64 * lambda).powi(2)).exp();
        sum += sign * term;
        if term < 1e-12 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fit_recovers_line() {
        let xs: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 2.5 * x - 1.0).collect();
        let (s, i, r) = linear_fit(&xs, &ys);
        assert!((s - 2.5).abs() < 1e-12);
        assert!((i + 1.0).abs() < 1e-10);
        assert!(r < 1e-10);
    }

    #[test]
    fn ks_identical_samples_high_p() {
        let a: Vec<f64> = (0..500).map(|i| (i % 37) as f64).collect();
        let (d, p) = ks_two_sample(&a, &a);
        assert_eq!(d, 0.0);
        assert!((p - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ks_separated_samples_reject() {
        let a: Vec<f64> = (0..300).map(|i| i as f64 * 0.01).collect();
        let b: Vec<f64> = (0..300).map(|i| 10.0 + i as f64 * 0.01).collect();
        let (d, p) = ks_two_sample(&a, &b);
        assert!((d - 1.0).abs() < 1e-12);
        assert!(p < 1e-6);
    }

    #[test]
    fn ks_same_distribution_does_not_reject() {
        // Deterministic interleaved quantiles of the same distribution.
        let a: Vec<f64> = (0..400).map(|i| ((i as f64 + 0.25) / 400.0).powi(2)).collect();
        let b: Vec<f64> = (0..400).map(|i| ((i as f64 + 0.75) / 400.0).powi(2)).collect();
        let (_, p) = ks_two_sample(&a, &b);
        assert!(p > 0.5, "p = {p}");
    }
}
