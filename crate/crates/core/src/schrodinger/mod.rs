//! Discrete Schrödinger operators `(H xi)_n = xi_{n+1} + xi_{n-1} + kappa v(n) xi_n`
//! whose potential `v` reads the invariant word of a substitution (1 on `a`,
//! 0 on `b`).

mod diagnostics;
mod dos;
mod lyapunov;
mod mixed_bc;
mod spectrum;

pub use diagnostics::{
    box_dimension, capacity_check, capacity_green, holder_estimate_ids, integrated_laplacian, Rect,
};
pub use dos::{density_of_states, dirichlet_eigenvalues};
pub use lyapunov::{lyapunov_direct, lyapunov_green, lyapunov_green_weighted, lyapunov_thouless, LyapunovSample, Method};
pub use mixed_bc::{mixed_bc_eigenvalues, MixedBcRoots, PeriodicTrace};
pub use spectrum::{band_spectrum, spectrum_escape, EnergyGrid, SpectrumBracket};

use num_complex::Complex64;
use thiserror::Error;

use crate::green::GreenError;
use crate::numerics::{NumericsError, ScaledComplex};
use crate::substitution::{Letter, Substitution, SubstitutionError, Word};
use crate::surface::{Mat2, SurfaceError, SurfacePoint, TraceMap};

/// Prefix length used when none is given.
pub const DEFAULT_PREFIX_LEN: usize = 20_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SchrodingerError {
    #[error("prefix has {available} sites, {needed} needed")]
    PrefixTooShort { needed: usize, available: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("Green function did not converge at E = {0}")]
    Inconclusive(Complex64),
    #[error(transparent)]
    Substitution(#[from] SubstitutionError),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Green(#[from] GreenError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// The operator family of one substitution at one coupling, sampled along a
/// finite prefix of the invariant word.
#[derive(Debug, Clone)]
pub struct OperatorFamily {
    sub: Substitution,
    kappa: f64,
    prefix: Word,
    potential: Vec<f64>,
    trace_map: TraceMap,
}

impl OperatorFamily {
    pub fn new(sub: Substitution, kappa: f64, prefix_len: usize) -> Result<OperatorFamily, SchrodingerError> {
        if !kappa.is_finite() {
            return Err(SchrodingerError::InvalidArgument(format!("coupling {kappa}")));
        }
        let prefix = sub.invariant_word_prefix(prefix_len)?;
        let potential = prefix.letters().iter().map(|&l| if l == Letter::A { kappa } else { 0.0 }).collect();
        let trace_map = if sub == Substitution::fibonacci() {
            TraceMap::fibonacci()
        } else {
            TraceMap::new(sub.clone())?
        };
        Ok(OperatorFamily { sub, kappa, prefix, potential, trace_map })
    }

    pub fn fibonacci(kappa: f64) -> OperatorFamily {
        OperatorFamily::new(Substitution::fibonacci(), kappa, DEFAULT_PREFIX_LEN).expect("valid Fibonacci family")
    }

    pub fn substitution(&self) -> &Substitution {
        &self.sub
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn prefix(&self) -> &Word {
        &self.prefix
    }

    /// `kappa * v(n)` along the prefix.
    pub fn potential(&self) -> &[f64] {
        &self.potential
    }

    pub fn trace_map(&self) -> &TraceMap {
        &self.trace_map
    }

    /// `[-2 - |kappa|, 2 + |kappa|]`, which contains every spectrum.
    pub fn norm_bound(&self) -> f64 {
        2.0 + self.kappa.abs()
    }

    pub(crate) fn require(&self, needed: usize) -> Result<(), SchrodingerError> {
        if needed > self.potential.len() {
            Err(SchrodingerError::PrefixTooShort { needed, available: self.potential.len() })
        } else {
            Ok(())
        }
    }
}

/// `s(E) = (E - kappa, E, E(E - kappa) - 2)`, on the surface `D = 4 + kappa^2`.
pub fn schrodinger_point(e: Complex64, kappa: f64) -> SurfacePoint {
    let mut p = SurfacePoint::from_coords(e - kappa, e, e * (e - kappa) - 2.0);
    p.d = Complex64::new(4.0 + kappa * kappa, 0.0);
    p
}

/// Transfer matrix `[[E - V, -1], [1, 0]]` of one site.
pub fn site_matrix(e: Complex64, v: f64) -> Mat2 {
    Mat2::from_complex([[e - v, Complex64::new(-1.0, 0.0)], [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]])
}

/// `M_{N-1} ... M_0` over the first `n` sites.
pub fn transfer_product(of: &OperatorFamily, e: Complex64, n: usize) -> Result<Mat2, SchrodingerError> {
    of.require(n)?;
    let mut p = Mat2::identity().0;
    for &v in &of.potential[..n] {
        let d = ScaledComplex::from(e - v);
        let top = [d * p[0][0] - p[1][0], d * p[0][1] - p[1][1]];
        p = [top, p[0]];
    }
    let m = Mat2(p);
    if !m.is_finite() {
        return Err(NumericsError::ExponentOverflow.into());
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::fricke_invariant;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn curve_examples() {
        let p = schrodinger_point(c(0.0, 0.0), 0.0);
        assert_eq!(p.to_complex(), [c(0.0, 0.0), c(0.0, 0.0), c(-2.0, 0.0)]);
        assert!(p.invariant_residual().unwrap() < 1e-10);
        let p = schrodinger_point(c(2.0, 0.0), 1.0);
        assert_eq!(p.to_complex(), [c(1.0, 0.0), c(2.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(fricke_invariant(p.x, p.y, p.z).unwrap().to_complex(), c(5.0, 0.0));
    }

    #[test]
    fn curve_matches_transfer_traces() {
        for (e, kappa) in [(c(0.3, 0.2), 1.0), (c(-2.5, 0.0), 0.7), (c(3.0, -1.0), 2.0)] {
            let ma = site_matrix(e, kappa);
            let mb = site_matrix(e, 0.0);
            let p = schrodinger_point(e, kappa);
            let want = [ma.trace(), mb.trace(), (mb * ma).trace()].map(|v| v.to_complex());
            for (got, w) in p.to_complex().iter().zip(want) {
                assert!((got - w).norm() < 1e-12);
            }
            assert!(p.invariant_residual().unwrap() < 1e-10 * (1.0 + e.norm_sqr()).powi(2));
        }
    }

    #[test]
    fn transfer_product_examples() {
        let of = OperatorFamily::new(Substitution::fibonacci(), 1.5, 100).unwrap();
        let e = c(0.7, 0.1);
        let one = transfer_product(&of, e, 1).unwrap().to_complex();
        assert_eq!(one, site_matrix(e, 1.5).to_complex());
        // relative to the squared size of the entries, which the determinant cancels
        let m = transfer_product(&of, e, 100).unwrap();
        let err = (m.det() - ScaledComplex::ONE).ln_abs_or_neg_inf() - 2.0 * m.log_max_column_norm();
        assert!(err < (1e-8 * 100.0f64).ln());
        assert!(matches!(transfer_product(&of, e, 101), Err(SchrodingerError::PrefixTooShort { needed: 101, .. })));
    }

    #[test]
    fn free_transfer_is_chebyshev() {
        let of = OperatorFamily::new(Substitution::fibonacci(), 0.0, 20).unwrap();
        for e in [-1.7, 0.4, 1.9, 2.6] {
            // 2 T_N(E/2) by the three-term recurrence
            let (mut t0, mut t1) = (1.0, e / 2.0);
            for n in 1..=10 {
                let tr = transfer_product(&of, c(e, 0.0), n).unwrap().trace().to_complex();
                assert!((tr.re - 2.0 * t1).abs() < 1e-10 && tr.im.abs() < 1e-12);
                (t0, t1) = (t1, e * t1 - t0);
            }
        }
    }

    #[test]
    fn traces_follow_the_trace_map() {
        let of = OperatorFamily::new(Substitution::fibonacci(), 1.0, 100).unwrap();
        let e = c(0.37, 0.05);
        let mut p = schrodinger_point(e, 1.0);
        for n in 1..=6u32 {
            p = of.trace_map().apply(&p).unwrap();
            // the prefix starts with iota^n(a)
            let len = of.substitution().iterate_letter(Letter::A, n, 1000).unwrap().len();
            let tr = transfer_product(&of, e, len).unwrap().trace().to_complex();
            assert!((tr - p.x.to_complex()).norm() < 1e-9 * tr.norm().max(1.0));
        }
    }
}
