/// Ordinary least-squares slope of `ys` against `xs`.
/// Returns `None` for fewer than two points or constant `xs`.
pub fn ls_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len();
    if n < 2 || ys.len() != n {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        None
    } else {
        Some(sxy / sxx)
    }
}

/// `n` points from `lo` to `hi` in geometric progression.
pub fn geometric(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let r = (hi / lo).ln() / (n - 1) as f64;
    (0..n).map(|i| lo * (r * i as f64).exp()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys: Vec<f64> = xs.iter().map(|x| 2.5 * x - 1.0).collect();
        assert!((ls_slope(&xs, &ys).unwrap() - 2.5).abs() < 1e-14);
        assert_eq!(ls_slope(&[1.0, 1.0], &[0.0, 1.0]), None);
    }

    #[test]
    fn geometric_endpoints() {
        let g = geometric(1e-3, 1e-1, 5);
        assert!((g[0] - 1e-3).abs() < 1e-18 && (g[4] - 1e-1).abs() < 1e-15);
        assert!((g[2] - 1e-2).abs() < 1e-16);
    }
}
