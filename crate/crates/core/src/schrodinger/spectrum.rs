use num_complex::Complex64;
use rayon::prelude::*;

use super::{mixed_bc_eigenvalues, schrodinger_point, OperatorFamily, SchrodingerError};
use crate::green::{green_plus, EscapeParams, GreenStatus};
use crate::numerics::IntervalSet;

/// Largest grid step accepted by [`spectrum_escape`].
pub const MAX_SCAN_STEP: f64 = 0.01;

/// Real energies `lo, lo + step, ...` up to `hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyGrid {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl EnergyGrid {
    pub fn new(lo: f64, hi: f64, step: f64) -> Result<EnergyGrid, SchrodingerError> {
        if !(step > 0.0) || !(hi >= lo) || !lo.is_finite() || !hi.is_finite() {
            return Err(SchrodingerError::InvalidArgument(format!("grid {lo}:{hi}:{step}")));
        }
        Ok(EnergyGrid { lo, hi, step })
    }

    pub fn points(&self) -> Vec<f64> {
        let n = ((self.hi - self.lo) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|i| self.lo + i as f64 * self.step).collect()
    }
}

/// Inner and outer approximations of the spectrum; undecided grid points
/// belong to the outer set only.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumBracket {
    pub outer: IntervalSet,
    pub inner: IntervalSet,
}

/// Spectrum as the set of energies whose curve point has a bounded orbit.
pub fn spectrum_escape(of: &OperatorFamily, grid: &EnergyGrid, ep: &EscapeParams) -> Result<SpectrumBracket, SchrodingerError> {
    if grid.step > MAX_SCAN_STEP {
        return Err(SchrodingerError::InvalidArgument(format!("step {} exceeds {MAX_SCAN_STEP}", grid.step)));
    }
    ep.validate()?;
    let pts = grid.points();
    let status: Vec<GreenStatus> = pts
        .par_iter()
        .map(|&e| {
            green_plus(of.trace_map(), &schrodinger_point(Complex64::new(e, 0.0), of.kappa()), ep).map(|g| g.status)
        })
        .collect::<Result<_, _>>()?;
    let pick = |keep: &dyn Fn(GreenStatus) -> bool| {
        let v: Vec<f64> = pts.iter().zip(&status).filter(|(_, s)| keep(**s)).map(|(e, _)| *e).collect();
        IntervalSet::from_samples(&v, grid.step)
    };
    Ok(SpectrumBracket {
        outer: pick(&|s| s != GreenStatus::Converged),
        inner: pick(&|s| s == GreenStatus::BoundedOrbit),
    })
}

/// Bands `{|tr M(iota^n(a))| <= 2}` of the periodic approximant.
pub fn band_spectrum(of: &OperatorFamily, n: u32) -> Result<IntervalSet, SchrodingerError> {
    let mut edges = mixed_bc_eigenvalues(of, n, 2.0)?.roots;
    edges.extend(mixed_bc_eigenvalues(of, n, -2.0)?.roots);
    edges.sort_by(f64::total_cmp);
    Ok(IntervalSet::from_intervals(edges.chunks(2).map(|c| (c[0], c[1])).collect()))
}
