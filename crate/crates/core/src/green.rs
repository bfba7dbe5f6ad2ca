//! Dynamical Green functions `G(p) = lim lambda^-n log+ |f^n(p)|` and the
//! filled Julia set `K+ = {G = 0}`.

use num_complex::Complex64;
use thiserror::Error;

use crate::numerics::{ls_slope, NumericsError};
use crate::surface::{RootChoice, SurfaceError, SurfacePoint, TraceMap, Vertex};

/// Orbit points whose two sub-dominant ratios are below this are in the
/// affine chart of the vertex at infinity.
pub const CHART_RATIO: f64 = 0.1;

/// Minimum number of probes for [`holder_estimate`].
pub const MIN_HOLDER_PROBES: usize = 20;

/// Consecutive small increments needed to declare convergence.
const CAUCHY_RUN: usize = 3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GreenError {
    #[error("invalid escape parameters: {0}")]
    InvalidParams(String),
    #[error("arithmetic failure at iterate {iterate}: {source}")]
    Overflow { iterate: usize, source: SurfaceError },
    #[error("point is not near infinity (ratio {ratio:e})")]
    NotNearInfinity { ratio: f64 },
    #[error("orbit does not escape")]
    NoEscape,
    #[error("need at least {MIN_HOLDER_PROBES} usable probes, got {got}")]
    InsufficientProbes { got: usize },
    #[error(transparent)]
    Surface(#[from] SurfaceError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EscapeParams {
    pub r_escape: f64,
    pub n_max: usize,
    pub tol: f64,
}

impl Default for EscapeParams {
    fn default() -> Self {
        EscapeParams { r_escape: 1e3, n_max: 60, tol: 1e-9 }
    }
}

impl EscapeParams {
    pub fn validate(&self) -> Result<(), GreenError> {
        if !(self.r_escape > 10.0) {
            return Err(GreenError::InvalidParams(format!("escape radius {} must exceed 10", self.r_escape)));
        }
        if self.n_max < 5 {
            return Err(GreenError::InvalidParams(format!("n_max {} must be at least 5", self.n_max)));
        }
        if !(self.tol > 0.0) {
            return Err(GreenError::InvalidParams(format!("tolerance {} must be positive", self.tol)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum GreenStatus {
    Converged,
    BoundedOrbit,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenResult {
    pub value: f64,
    pub iterations: usize,
    /// First iterate with norm above the escape radius.
    pub escaped_at: Option<usize>,
    pub status: GreenStatus,
}

/// Membership in `K+` with the undecided boundary case kept separate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    Inside,
    Outside,
    Undecided,
}

fn renormalized_orbit<F>(step: F, lambda: f64, p: &SurfacePoint, ep: &EscapeParams) -> Result<GreenResult, GreenError>
where
    F: Fn(&SurfacePoint) -> Result<SurfacePoint, SurfaceError>,
{
    ep.validate()?;
    let ln_r = ep.r_escape.ln();
    let mut q = *p;
    let mut escaped_at = None;
    let mut prev: Option<f64> = None;
    let mut run = 0;
    let mut g = 0.0;
    let mut scale = 1.0;
    for n in 0..=ep.n_max {
        let ln = q.log_norm();
        if ln.is_nan() {
            let source = SurfaceError::Numerics(NumericsError::ExponentOverflow);
            return Err(GreenError::Overflow { iterate: n, source });
        }
        if escaped_at.is_none() && ln > ln_r {
            escaped_at = Some(n);
        }
        if escaped_at.is_some() {
            g = ln.max(0.0) / scale;
            if let Some(gp) = prev {
                if (g - gp).abs() < ep.tol * gp.max(1.0) {
                    run += 1;
                    if run >= CAUCHY_RUN {
                        return Ok(GreenResult { value: g, iterations: n, escaped_at, status: GreenStatus::Converged });
                    }
                } else {
                    run = 0;
                }
            }
            prev = Some(g);
        }
        if n == ep.n_max {
            break;
        }
        q = step(&q).map_err(|source| GreenError::Overflow { iterate: n + 1, source })?;
        scale *= lambda;
    }
    let status = if escaped_at.is_some() { GreenStatus::Inconclusive } else { GreenStatus::BoundedOrbit };
    Ok(GreenResult { value: g, iterations: ep.n_max, escaped_at, status })
}

/// Forward Green function, renormalized by the spectral radius of the
/// abelianization of the map that is iterated.
pub fn green_plus(tm: &TraceMap, p: &SurfacePoint, ep: &EscapeParams) -> Result<GreenResult, GreenError> {
    renormalized_orbit(|q| tm.apply(q), tm.lambda(), p, ep)
}

/// Backward Green function; needs the inverse word images.
pub fn green_minus(tm: &TraceMap, p: &SurfacePoint, ep: &EscapeParams) -> Result<GreenResult, GreenError> {
    if !tm.has_inverse() {
        return Err(SurfaceError::InverseWordsUnavailable.into());
    }
    renormalized_orbit(|q| tm.apply_inverse(q), tm.lambda(), p, ep)
}

pub fn membership(tm: &TraceMap, p: &SurfacePoint, ep: &EscapeParams) -> Result<Membership, GreenError> {
    Ok(match green_plus(tm, p, ep)?.status {
        GreenStatus::BoundedOrbit => Membership::Inside,
        GreenStatus::Converged => Membership::Outside,
        GreenStatus::Inconclusive => Membership::Undecided,
    })
}

/// Boolean form of [`membership`]; undecided points count as outside.
pub fn in_filled_julia(tm: &TraceMap, p: &SurfacePoint, ep: &EscapeParams) -> Result<bool, GreenError> {
    let m = membership(tm, p, ep)?;
    if m == Membership::Undecided {
        log::debug!("membership undecided after {} iterations at {:?}", ep.n_max, p.to_complex());
    }
    Ok(m == Membership::Inside)
}

/// Which weight multiplies the log of each coordinate ratio in the local
/// asymptotics `G = -w_i ln|p_i/p_k| - w_j ln|p_j/p_k| + o(1)` near the
/// vertex `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticAxes {
    pub vertex: Vertex,
    /// Weight per coordinate; zero at the dominant one.
    pub weights: [f64; 3],
}

impl AsymptoticAxes {
    /// Puts `first` on the lower-index sub-dominant coordinate.
    pub fn new(vertex: Vertex, first: f64, second: f64) -> AsymptoticAxes {
        let k = vertex.index();
        let mut weights = [0.0; 3];
        let mut it = [first, second].into_iter();
        for (i, w) in weights.iter_mut().enumerate() {
            if i != k {
                *w = it.next().unwrap();
            }
        }
        AsymptoticAxes { vertex, weights }
    }

    /// `G + sum_i w_i ln|p_i / p_k|` given `G`.
    pub fn residual(&self, g: f64, p: &SurfacePoint) -> Result<f64, GreenError> {
        let k = self.vertex.index();
        let logs = p.coords().map(|c| c.ln_abs_or_neg_inf());
        let ratio = (0..3).filter(|&i| i != k).map(|i| logs[i] - logs[k]).fold(f64::NEG_INFINITY, f64::max);
        if !(ratio < CHART_RATIO.ln()) {
            return Err(GreenError::NotNearInfinity { ratio: ratio.exp() });
        }
        Ok(g + (0..3).filter(|&i| i != k).map(|i| self.weights[i] * (logs[i] - logs[k])).sum::<f64>())
    }
}

/// `G(p) + w ln|X| + w' ln|Y|` at a point in the chart of the vertex.
pub fn local_asymptotics_residual(
    tm: &TraceMap,
    axes: &AsymptoticAxes,
    p: &SurfacePoint,
    ep: &EscapeParams,
) -> Result<f64, GreenError> {
    let g = green_plus(tm, p, ep)?;
    axes.residual(g.value, p)
}

/// Residuals along the orbit of `p0`, one per iterate inside the chart
/// (at most `steps` of them). `G(f^n p0)` is taken as `lambda^n G(p0)`.
pub fn residual_sequence(
    tm: &TraceMap,
    axes: &AsymptoticAxes,
    p0: &SurfacePoint,
    steps: usize,
    ep: &EscapeParams,
) -> Result<Vec<f64>, GreenError> {
    let g0 = green_plus(tm, p0, ep)?;
    if g0.status == GreenStatus::BoundedOrbit {
        return Err(GreenError::NoEscape);
    }
    let mut out = Vec::with_capacity(steps);
    let mut p = *p0;
    let mut scale = 1.0;
    for n in 0..(steps + ep.n_max) {
        if out.len() == steps {
            break;
        }
        match axes.residual(g0.value * scale, &p) {
            Ok(r) => out.push(r),
            Err(GreenError::NotNearInfinity { .. }) if out.is_empty() => {}
            Err(e) => return Err(e),
        }
        p = tm.apply(&p).map_err(|source| GreenError::Overflow { iterate: n + 1, source })?;
        scale *= tm.lambda();
    }
    Ok(out)
}

fn variance(v: &[f64]) -> f64 {
    let m = v.iter().sum::<f64>() / v.len() as f64;
    v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / v.len() as f64
}

/// Chooses how `(alpha, beta)` attach to the two chart coordinates by
/// minimizing the residual variance over a few probe orbits.
pub fn calibrate_axes(tm: &TraceMap, alpha: f64, beta: f64, ep: &EscapeParams) -> Result<AsymptoticAxes, GreenError> {
    let vertex = tm.infinity_vertex()?;
    let probes = [
        (Complex64::new(3.1, 0.0), Complex64::new(2.7, 0.3)),
        (Complex64::new(2.3, -0.7), Complex64::new(3.9, 0.2)),
        (Complex64::new(-4.2, 0.5), Complex64::new(1.9, -1.1)),
    ];
    let candidates = [AsymptoticAxes::new(vertex, alpha, beta), AsymptoticAxes::new(vertex, beta, alpha)];
    let mut best = (f64::INFINITY, candidates[0]);
    for axes in candidates {
        let mut total = 0.0;
        for (x, y) in probes {
            let p = SurfacePoint::on_surface(x, y, Complex64::new(0.0, 0.0), RootChoice::Larger);
            let r = residual_sequence(tm, &axes, &p, 8, ep)?;
            total += variance(&r[2..]);
        }
        if total < best.0 {
            best = (total, axes);
        }
    }
    Ok(best.1)
}

/// Least-squares exponent `tau` in `G ~ d^tau` from `(point, distance)`
/// probes; probes inside `K+` are skipped.
pub fn holder_estimate(tm: &TraceMap, probes: &[(SurfacePoint, f64)], ep: &EscapeParams) -> Result<f64, GreenError> {
    let mut xs = Vec::with_capacity(probes.len());
    let mut ys = Vec::with_capacity(probes.len());
    for (p, d) in probes {
        let g = green_plus(tm, p, ep)?;
        if g.value > 0.0 && *d > 0.0 {
            xs.push(d.ln());
            ys.push(g.value.ln());
        }
    }
    if xs.len() < MIN_HOLDER_PROBES {
        return Err(GreenError::InsufficientProbes { got: xs.len() });
    }
    ls_slope(&xs, &ys).ok_or(GreenError::InsufficientProbes { got: xs.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::geometric;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn s(e: Complex64, kappa: f64) -> SurfacePoint {
        SurfacePoint::from_coords(e - kappa, e, e * (e - kappa) - 2.0)
    }

    fn re(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn gamma0(e: f64) -> f64 {
        ((e.abs() + (e * e - 4.0).sqrt()) / 2.0).ln()
    }

    fn golden() -> f64 {
        (1.0 + 5f64.sqrt()) / 2.0
    }

    #[test]
    fn params_validation() {
        assert!(EscapeParams::default().validate().is_ok());
        for bad in [
            EscapeParams { r_escape: 5.0, ..Default::default() },
            EscapeParams { n_max: 3, ..Default::default() },
            EscapeParams { tol: 0.0, ..Default::default() },
        ] {
            assert!(matches!(bad.validate(), Err(GreenError::InvalidParams(_))));
        }
    }

    #[test]
    fn free_operator_values() {
        let tm = TraceMap::fibonacci();
        let ep = EscapeParams::default();
        let inside = green_plus(&tm, &s(re(1.0), 0.0), &ep).unwrap();
        assert_eq!(inside.status, GreenStatus::BoundedOrbit);
        assert_eq!(inside.value, 0.0);
        let out = green_plus(&tm, &s(re(3.0), 0.0), &ep).unwrap();
        assert_eq!(out.status, GreenStatus::Converged);
        let phi = golden();
        let want = phi.powi(3) / 5f64.sqrt() * gamma0(3.0);
        assert!((out.value - want).abs() < 1e-8, "{} vs {want}", out.value);
        assert!((out.value - 1.82325).abs() < 1e-5);
    }

    #[test]
    fn membership_examples() {
        let tm = TraceMap::fibonacci();
        let ep = EscapeParams::default();
        assert!(in_filled_julia(&tm, &s(re(1.0), 0.0), &ep).unwrap());
        let far = green_plus(&tm, &s(re(3.0), 0.0), &ep).unwrap();
        assert!(!in_filled_julia(&tm, &s(re(3.0), 0.0), &ep).unwrap());
        let near = green_plus(&tm, &s(re(2.0001), 0.0), &ep).unwrap();
        assert!(!in_filled_julia(&tm, &s(re(2.0001), 0.0), &ep).unwrap());
        assert!(near.escaped_at.unwrap() > far.escaped_at.unwrap() + 5, "{near:?} {far:?}");
    }

    #[test]
    fn functional_equation() {
        let tm = TraceMap::fibonacci();
        let ep = EscapeParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut checked = 0;
        while checked < 50 {
            let e = Complex64::new(rng.gen_range(-4.0..4.0), rng.gen_range(0.05..1.5));
            let p = s(e, rng.gen_range(0.0..2.0));
            let g = green_plus(&tm, &p, &ep).unwrap();
            if g.status != GreenStatus::Converged {
                continue;
            }
            let gf = green_plus(&tm, &tm.apply(&p).unwrap(), &ep).unwrap();
            assert!((gf.value - tm.lambda() * g.value).abs() <= 1e-6 * gf.value, "{gf:?} {g:?}");
            checked += 1;
        }
    }

    #[test]
    fn green_minus_matches_inverse_map() {
        let tm = TraceMap::fibonacci();
        let inv = tm.inverse().unwrap();
        let ep = EscapeParams::default();
        let p = s(re(3.0), 0.0);
        let gp = green_plus(&tm, &p, &ep).unwrap();
        let gm = green_minus(&inv, &p, &ep).unwrap();
        assert!((gp.value - gm.value).abs() < 1e-9);
        let back = green_minus(&tm, &tm.apply_inverse(&p).unwrap(), &ep).unwrap();
        let here = green_minus(&tm, &p, &ep).unwrap();
        assert!((back.value - tm.lambda() * here.value).abs() <= 1e-6 * back.value);
        assert_eq!(green_minus(&tm, &s(re(0.5), 0.0), &ep).unwrap().value, 0.0);
        let plain = TraceMap::new(crate::substitution::Substitution::fibonacci()).unwrap();
        assert!(green_minus(&plain, &p, &ep).is_err());
    }

    #[test]
    fn local_asymptotics() {
        let tm = TraceMap::fibonacci();
        let ep = EscapeParams::default();
        let phi = golden();
        let (alpha, beta) = (phi * phi / 5f64.sqrt(), phi / 5f64.sqrt());
        let axes = calibrate_axes(&tm, alpha, beta, &ep).unwrap();
        // alpha weighs y/z and beta weighs x/z
        assert_eq!(axes, AsymptoticAxes { vertex: Vertex::Z, weights: [beta, alpha, 0.0] });
        let mut constants = Vec::new();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        while constants.len() < 10 {
            let e = Complex64::new(rng.gen_range(2.5..4.0), rng.gen_range(0.1..1.0));
            let r = residual_sequence(&tm, &axes, &s(e, 0.0), 12, &ep).unwrap();
            for w in r[5..].windows(2) {
                assert!((w[1] - w[0]).abs() < 1e-3, "{r:?}");
            }
            constants.push(*r.last().unwrap());
        }
        let spread = constants.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b))
            - constants.iter().fold(f64::INFINITY, |a, &b| a.min(b));
        assert!(spread < 1e-2);

        let p = tm.apply(&tm.apply(&tm.apply(&s(re(3.0), 0.0)).unwrap()).unwrap()).unwrap();
        assert!(local_asymptotics_residual(&tm, &axes, &p, &ep).unwrap().abs() < 1e-2);
        assert!(matches!(
            local_asymptotics_residual(&tm, &axes, &s(re(3.0), 0.0), &ep),
            Err(GreenError::NotNearInfinity { .. })
        ));

        let wrong = AsymptoticAxes::new(Vertex::Z, beta, alpha + 0.1);
        let r = residual_sequence(&tm, &wrong, &s(Complex64::new(3.0, 0.2), 0.0), 12, &ep).unwrap();
        assert!((r[11] - r[10]).abs() > 1.0);
    }

    #[test]
    fn holder_exponent_at_band_edge() {
        let tm = TraceMap::fibonacci();
        let ep = EscapeParams::default();
        let probes: Vec<(SurfacePoint, f64)> = geometric(1e-6, 1e-2, 24).into_iter().map(|d| (s(re(2.0 + d), 0.0), d)).collect();
        let tau = holder_estimate(&tm, &probes, &ep).unwrap();
        assert!((tau - 0.5).abs() < 0.05, "{tau}");
        let doubled: Vec<(SurfacePoint, f64)> = probes.iter().map(|(p, d)| (*p, 2.0 * d)).collect();
        assert!((holder_estimate(&tm, &doubled, &ep).unwrap() - tau).abs() < 1e-12);
        assert!(matches!(
            holder_estimate(&tm, &probes[..5], &ep),
            Err(GreenError::InsufficientProbes { got: 5 })
        ));
    }

    fn gamma(tm: &TraceMap, e: Complex64, kappa: f64) -> f64 {
        let g = green_plus(tm, &s(e, kappa), &EscapeParams::default()).unwrap();
        g.value / tm.abelian().alpha_plus_beta()
    }

    #[test]
    fn harmonic_off_the_spectrum() {
        let tm = TraceMap::fibonacci();
        for (e0, kappa) in [(Complex64::new(3.0, 0.4), 0.0), (Complex64::new(4.2, 0.0), 1.0), (Complex64::new(0.5, 0.9), 1.0)] {
            let center = gamma(&tm, e0, kappa);
            let mean = (0..16)
                .map(|k| gamma(&tm, e0 + Complex64::from_polar(0.05, 2.0 * PI * k as f64 / 16.0), kappa))
                .sum::<f64>()
                / 16.0;
            assert!((mean - center).abs() < 1e-4, "{e0} {mean} {center}");
        }
    }

    #[test]
    fn subharmonic_everywhere() {
        let tm = TraceMap::fibonacci();
        for e0 in [-2.0, -1.0, 0.3, 2.0, 2.05] {
            let center = gamma(&tm, re(e0), 0.0);
            let mean = (0..16)
                .map(|k| gamma(&tm, re(e0) + Complex64::from_polar(0.05, 2.0 * PI * (k as f64 + 0.5) / 16.0), 0.0))
                .sum::<f64>()
                / 16.0;
            assert!(mean >= center - 1e-6, "{e0} {mean} {center}");
        }
    }

    #[test]
    fn longer_runs_never_readmit_points() {
        let tm = TraceMap::fibonacci();
        for i in 0..60 {
            let e = -3.5 + 7.0 * i as f64 / 59.0;
            let p = s(re(e), 1.0);
            let short = in_filled_julia(&tm, &p, &EscapeParams { n_max: 20, ..Default::default() }).unwrap();
            let long = in_filled_julia(&tm, &p, &EscapeParams { n_max: 60, ..Default::default() }).unwrap();
            assert!(short || !long, "E = {e}");
        }
    }

    #[test]
    fn nonnegative_and_zero_on_bounded_orbits() {
        let tm = TraceMap::fibonacci();
        let ep = EscapeParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let e = Complex64::new(rng.gen_range(-4.0..4.0), rng.gen_range(-0.5..0.5));
            let g = green_plus(&tm, &s(e, 1.0), &ep).unwrap();
            assert!(g.value >= 0.0);
            assert_eq!(g.status == GreenStatus::BoundedOrbit, g.value == 0.0);
        }
    }
}
