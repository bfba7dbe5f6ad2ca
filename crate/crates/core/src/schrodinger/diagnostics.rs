use num_complex::Complex64;
use rayon::prelude::*;

use super::{lyapunov_green, OperatorFamily, SchrodingerError};
use crate::green::EscapeParams;
use crate::numerics::{ls_slope, IntervalSet, NumericsError, SpectralMeasure};

/// Far-field check of the capacity: `gamma(E0) - ln|E0|` from the Thouless
/// formula, which tends to `-ln Cap`.
pub fn capacity_check(dos: &SpectralMeasure, e0: Complex64) -> Result<f64, SchrodingerError> {
    let (lo, hi) = dos.support_bounds();
    let radius = lo.abs().max(hi.abs());
    if e0.norm() < 100.0 * radius {
        return Err(SchrodingerError::InvalidArgument(format!(
            "|E0| = {} is not far from a support of radius {radius}",
            e0.norm()
        )));
    }
    Ok(dos.log_potential(e0)? - e0.norm().ln())
}

/// Same quantity through the dynamical Green function.
pub fn capacity_green(of: &OperatorFamily, e0: Complex64, ep: &EscapeParams) -> Result<f64, SchrodingerError> {
    Ok(lyapunov_green(of, e0, ep)?.gamma - e0.norm().ln())
}

/// Slope of `ln N(eps)` against `ln(1/eps)`.
pub fn box_dimension(s: &IntervalSet, eps: &[f64]) -> Result<f64, SchrodingerError> {
    if s.is_empty() {
        return Err(NumericsError::EmptySet.into());
    }
    if eps.len() < 4 {
        return Err(SchrodingerError::InvalidArgument(format!("{} scales, need 4", eps.len())));
    }
    let xs: Vec<f64> = eps.iter().map(|e| -e.ln()).collect();
    let ys: Vec<f64> = eps.iter().map(|&e| (s.box_count(e) as f64).ln()).collect();
    ls_slope(&xs, &ys).ok_or_else(|| SchrodingerError::InvalidArgument("repeated scales".into()))
}

/// Slope of `ln max_E k([E, E + delta))` against `ln delta`, where `k` is the
/// distribution function of `dos`.
pub fn holder_estimate_ids(dos: &SpectralMeasure, deltas: &[f64]) -> Result<f64, SchrodingerError> {
    if !dos.is_probability() {
        return Err(NumericsError::NotProbability.into());
    }
    if deltas.len() < 4 {
        return Err(SchrodingerError::InvalidArgument(format!("{} deltas, need 4", deltas.len())));
    }
    let xs: Vec<f64> = deltas.iter().map(|d| d.ln()).collect();
    let ys: Vec<f64> = deltas.iter().map(|&d| dos.max_mass_in_window(d).ln()).collect();
    ls_slope(&xs, &ys).ok_or_else(|| SchrodingerError::InvalidArgument("repeated deltas".into()))
}

/// Axis-aligned box in the energy plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub re_lo: f64,
    pub re_hi: f64,
    pub im_lo: f64,
    pub im_hi: f64,
}

/// Sum of the 5-point Laplacian of `f` over the cell centres of `rect`
/// (mesh `h`), which approximates the integral of the Laplacian over the box.
/// Centres sit at half-integer offsets, so a box symmetric about the real
/// axis never samples it.
pub fn integrated_laplacian<F>(f: F, rect: &Rect, h: f64) -> f64
where
    F: Fn(Complex64) -> f64 + Sync,
{
    let nx = ((rect.re_hi - rect.re_lo) / h).round() as usize;
    let ny = ((rect.im_hi - rect.im_lo) / h).round() as usize;
    // values on the grid padded by one cell on each side
    let at = |i: usize, j: usize| {
        Complex64::new(rect.re_lo + (i as f64 - 0.5) * h, rect.im_lo + (j as f64 - 0.5) * h)
    };
    let vals: Vec<Vec<f64>> =
        (0..nx + 2).into_par_iter().map(|i| (0..ny + 2).map(|j| f(at(i, j))).collect()).collect();
    let mut sum = 0.0;
    for i in 1..=nx {
        for j in 1..=ny {
            sum += vals[i - 1][j] + vals[i + 1][j] + vals[i][j - 1] + vals[i][j + 1] - 4.0 * vals[i][j];
        }
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::geometric;
    use crate::schrodinger::density_of_states;
    use std::f64::consts::PI;

    fn arcsine(n: usize) -> SpectralMeasure {
        SpectralMeasure::uniform((0..n).map(|j| 2.0 * ((j as f64 + 0.5) * PI / n as f64).cos()).collect()).unwrap()
    }

    #[test]
    fn capacity_of_the_free_interval() {
        let dos = arcsine(4000);
        let r = capacity_check(&dos, Complex64::new(0.0, 1e3)).unwrap();
        assert!(r.abs() < 1e-2);
        assert!(capacity_check(&dos, Complex64::new(0.0, 10.0)).is_err());
        let of = OperatorFamily::fibonacci(1.0);
        let g = capacity_green(&of, Complex64::new(0.0, 1e3), &EscapeParams::default()).unwrap();
        assert!(g.abs() < 1e-2);
    }

    #[test]
    fn log_energy_tracks_scaling() {
        let dos = arcsine(1000);
        // equilibrium measure of [-2, 2] has log energy ln 1 = 0
        assert!(dos.log_energy().abs() < 1e-2);
        assert!((dos.scaled(2.0).log_energy() - 2f64.ln()).abs() < 1e-2);
    }

    #[test]
    fn box_dimension_examples() {
        let eps = geometric(1e-4, 1e-1, 8);
        let unit = IntervalSet::from_intervals(vec![(0.0, 1.0)]);
        assert!((box_dimension(&unit, &eps).unwrap() - 1.0).abs() < 0.02);
        let mut cantor = vec![(0.0, 1.0)];
        for _ in 0..8 {
            cantor = cantor
                .into_iter()
                .flat_map(|(a, b)| {
                    let t = (b - a) / 3.0;
                    [(a, a + t), (b - t, b)]
                })
                .collect();
        }
        let cantor = IntervalSet::from_intervals(cantor);
        // scales commensurate with 1/3 put interval ends on box boundaries
        let eps = geometric(3e-4, 0.1, 12);
        let d = box_dimension(&cantor, &eps).unwrap();
        assert!((d - 2f64.ln() / 3f64.ln()).abs() < 0.05, "{d}");
        assert!(box_dimension(&IntervalSet::empty(), &eps).is_err());
    }

    #[test]
    fn ids_holder_examples() {
        let deltas = geometric(1e-3, 1e-1, 8);
        let t = holder_estimate_ids(&arcsine(20_000), &deltas).unwrap();
        assert!((t - 0.5).abs() < 0.05, "{t}");
        let uniform = SpectralMeasure::uniform((0..20_000).map(|i| i as f64 / 20_000.0).collect()).unwrap();
        assert!((holder_estimate_ids(&uniform, &deltas).unwrap() - 1.0).abs() < 0.02);
    }

    #[test]
    fn laplacian_of_a_log_potential() {
        let dos = arcsine(400);
        let f = |e: Complex64| dos.log_potential(e).unwrap();
        let inside = Rect { re_lo: -3.0, re_hi: 3.0, im_lo: -1.0, im_hi: 1.0 };
        let total = integrated_laplacian(f, &inside, 0.05);
        assert!((total - 2.0 * PI).abs() < 0.1 * 2.0 * PI, "{total}");
        let outside = Rect { re_lo: 3.5, re_hi: 5.0, im_lo: -0.5, im_hi: 0.5 };
        assert!(integrated_laplacian(f, &outside, 0.05).abs() < 1e-3);
    }

    #[test]
    fn free_dos_holder() {
        let of = OperatorFamily::fibonacci(0.0);
        let dos = density_of_states(&of, 2000, 2).unwrap();
        let t = holder_estimate_ids(&dos, &geometric(1e-3, 1e-1, 8)).unwrap();
        assert!((t - 0.5).abs() < 0.05, "{t}");
    }
}
