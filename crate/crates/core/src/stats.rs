//! Small estimators shared by the Monte-Carlo diagnostics.

/// Jackknife standard error of a statistic computed from leave-one-out values.
pub fn jackknife_se(leave_one_out: &[f64]) -> f64 {
    let m = leave_one_out.len();
    if m < 2 {
        return f64::NAN;
    }
    let mean = leave_one_out.iter().sum::<f64>() / m as f64;
    let ss: f64 = leave_one_out.iter().map(|x| (x - mean) * (x - mean)).sum();
    ((m as f64 - 1.0) / m as f64 * ss).sqrt()
}

/// Mean and standard error of the mean.
pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let m = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / m;
    if xs.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (m - 1.0);
    (mean, (var / m).sqrt())
}

/// Two-sample Kolmogorov–Smirnov distance `sup_x |F_a(x) − F_b(x)|`.
pub fn ks_distance(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = if a[i] <= b[j] { a[i] } else { b[j] };
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Asymptotic two-sample KS critical value at significance `level`:
/// `sqrt(−ln(level/2)/2) · sqrt((n+m)/(nm))`.
pub fn ks_critical(level: f64, n: usize, m: usize) -> f64 {
    let c = (-(level / 2.0).ln() / 2.0).sqrt();
    c * ((n + m) as f64 / (n as f64 * m as f64)).sqrt()
}

/// Least-squares slope and intercept of `y` on `x`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ks_identical_and_disjoint() {
        let a = [0.3, 0.1, 0.2];
        assert_eq!(ks_distance(&a, &a), 0.0);
        assert_eq!(ks_distance(&[0.0, 1.0], &[2.0, 3.0]), 1.0);
        assert!((ks_distance(&[1.0, 2.0, 3.0, 4.0], &[2.5, 3.5]) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn ks_critical_one_percent() {
        // c(0.01) = 1.6276 for the two-sample test.
        let c = ks_critical(0.01, 1, 1) / 2f64.sqrt();
        assert!((c - 1.6276).abs() < 1e-4);
    }

    #[test]
    fn fit_recovers_line() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v| 0.5 * v - 2.0).collect();
        let (m, b) = linear_fit(&x, &y);
        assert!((m - 0.5).abs() < 1e-14 && (b + 2.0).abs() < 1e-14);
    }

    #[test]
    fn jackknife_of_mean_matches_classical_se() {
        let xs = [1.0, 4.0, 2.0, 8.0, 5.0];
        let total: f64 = xs.iter().sum();
        let loo: Vec<f64> = xs.iter().map(|x| (total - x) / 4.0).collect();
        let (_, se) = mean_se(&xs);
        assert!((jackknife_se(&loo) - se).abs() < 1e-12);
    }
}
