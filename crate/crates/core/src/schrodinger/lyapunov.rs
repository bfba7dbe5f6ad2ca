use num_complex::Complex64;
use serde::Serialize;

use super::{schrodinger_point, transfer_product, OperatorFamily, SchrodingerError};
use crate::green::{green_plus, EscapeParams, GreenStatus};
use crate::numerics::{NumericsError, SpectralMeasure};

/// Shortest product accepted by [`lyapunov_direct`].
pub const MIN_DIRECT_SITES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Method {
    Direct,
    Green,
    Thouless,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LyapunovSample {
    pub e: (f64, f64),
    pub gamma: f64,
    pub method: Method,
}

impl LyapunovSample {
    fn new(e: Complex64, gamma: f64, method: Method) -> LyapunovSample {
        LyapunovSample { e: (e.re, e.im), gamma, method }
    }

    pub fn energy(&self) -> Complex64 {
        Complex64::new(self.e.0, self.e.1)
    }
}

/// `(1/N) ln |M_{N-1} ... M_0|` with the largest column norm.
pub fn lyapunov_direct(of: &OperatorFamily, e: Complex64, n: usize) -> Result<LyapunovSample, SchrodingerError> {
    if n < MIN_DIRECT_SITES {
        return Err(SchrodingerError::InvalidArgument(format!("N = {n} is below {MIN_DIRECT_SITES}")));
    }
    let m = transfer_product(of, e, n)?;
    Ok(LyapunovSample::new(e, m.log_max_column_norm() / n as f64, Method::Direct))
}

/// `G(s(E)) / (alpha + beta)`.
pub fn lyapunov_green(of: &OperatorFamily, e: Complex64, ep: &EscapeParams) -> Result<LyapunovSample, SchrodingerError> {
    lyapunov_green_weighted(of, e, ep, of.trace_map().abelian().alpha_plus_beta())
}

/// [`lyapunov_green`] with an explicit normalizing weight.
pub fn lyapunov_green_weighted(
    of: &OperatorFamily,
    e: Complex64,
    ep: &EscapeParams,
    alpha_plus_beta: f64,
) -> Result<LyapunovSample, SchrodingerError> {
    let g = green_plus(of.trace_map(), &schrodinger_point(e, of.kappa()), ep)?;
    if g.status == GreenStatus::Inconclusive {
        return Err(SchrodingerError::Inconclusive(e));
    }
    Ok(LyapunovSample::new(e, g.value / alpha_plus_beta, Method::Green))
}

/// Logarithmic potential of the density of states.
pub fn lyapunov_thouless(e: Complex64, dos: &SpectralMeasure) -> Result<LyapunovSample, NumericsError> {
    Ok(LyapunovSample::new(e, dos.log_potential(e)?, Method::Thouless))
}
