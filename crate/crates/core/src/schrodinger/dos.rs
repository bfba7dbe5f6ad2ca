use rayon::prelude::*;

use super::{OperatorFamily, SchrodingerError};
use crate::numerics::{tridiag_eigenvalues, SpectralMeasure};

/// Eigenvalues of the operator restricted to sites `offset .. offset + l`
/// with Dirichlet boundary conditions.
pub fn dirichlet_eigenvalues(of: &OperatorFamily, offset: usize, l: usize) -> Result<Vec<f64>, SchrodingerError> {
    if l == 0 {
        return Err(SchrodingerError::InvalidArgument("empty window".into()));
    }
    of.require(offset + l)?;
    Ok(tridiag_eigenvalues(&of.potential()[offset..offset + l], &vec![1.0; l - 1]))
}

/// Eigenvalue counting measure averaged over the windows at offsets
/// `0 .. n_windows`, each atom carrying weight `1 / (l * n_windows)`.
pub fn density_of_states(of: &OperatorFamily, l: usize, n_windows: usize) -> Result<SpectralMeasure, SchrodingerError> {
    if n_windows == 0 {
        return Err(SchrodingerError::InvalidArgument("no windows".into()));
    }
    of.require(l + n_windows - 1)?;
    let per_window: Vec<Vec<f64>> = (0..n_windows)
        .into_par_iter()
        .map(|k| dirichlet_eigenvalues(of, k, l))
        .collect::<Result<_, _>>()?;
    let w = 1.0 / (l * n_windows) as f64;
    let pairs = per_window.into_iter().flatten().map(|a| (a, w)).collect();
    Ok(SpectralMeasure::new(pairs)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn single_site_window() {
        let of = OperatorFamily::fibonacci(1.7);
        assert_eq!(dirichlet_eigenvalues(&of, 0, 1).unwrap(), vec![1.7]);
        assert_eq!(dirichlet_eigenvalues(&of, 1, 1).unwrap(), vec![0.0]);
    }

    #[test]
    fn free_window_closed_form() {
        let of = OperatorFamily::fibonacci(0.0);
        let ev = dirichlet_eigenvalues(&of, 3, 50).unwrap();
        for (j, v) in ev.iter().enumerate() {
            let exact = 2.0 * ((50 - j) as f64 * PI / 51.0).cos();
            assert!((v - exact).abs() < 1e-9);
        }
    }

    #[test]
    fn spectrum_respects_norm_bound() {
        for kappa in [-2.0, 0.5, 3.0] {
            let of = OperatorFamily::fibonacci(kappa);
            let ev = dirichlet_eigenvalues(&of, 17, 300).unwrap();
            let b = of.norm_bound() + 1e-9;
            assert!(ev.iter().all(|v| v.abs() <= b));
        }
    }

    #[test]
    fn free_dos_is_arcsine() {
        let of = OperatorFamily::fibonacci(0.0);
        let dos = density_of_states(&of, 400, 3).unwrap();
        assert!(dos.is_probability());
        let d = dos.kolmogorov_to(|e| 1.0 - (e / 2.0).clamp(-1.0, 1.0).acos() / PI).unwrap();
        assert!(d < 1e-2, "{d}");
    }

    #[test]
    fn dos_mean_is_coupling_times_frequency() {
        let kappa = 1.3;
        let of = OperatorFamily::fibonacci(kappa);
        let dos = density_of_states(&of, 1000, 4).unwrap();
        let freq = 2.0 / (1.0 + 5f64.sqrt());
        assert!((dos.mean() - kappa * freq).abs() < 1e-2);
        let (lo, hi) = dos.support_bounds();
        assert!(lo >= -of.norm_bound() && hi <= of.norm_bound());
    }

    #[test]
    fn window_must_fit() {
        let of = crate::schrodinger::OperatorFamily::new(crate::substitution::Substitution::fibonacci(), 1.0, 100).unwrap();
        assert!(matches!(density_of_states(&of, 90, 20), Err(SchrodingerError::PrefixTooShort { .. })));
    }
}
