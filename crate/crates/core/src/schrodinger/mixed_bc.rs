//! Real solutions of `tr M(w) = t` for the period word `w = iota^n(a)`.
//!
//! For `|t| <= 2` these are the eigenvalues of the periodic operator with a
//! Floquet phase. Each of the `l` bands of the period-`l` operator carries
//! exactly one of them, and the Dirichlet eigenvalues of the sites
//! `1 .. l - 1` (one per closed gap) separate consecutive bands, so every
//! root has its own bracket and bisection cannot miss tangential roots at
//! closed gaps. For `|t| > 2` roots sit in pairs inside gaps (or singly
//! beyond the outer bands) and are separated by the critical point of the
//! trace.

use super::{OperatorFamily, SchrodingerError};
use crate::numerics::scaled::ldexp;
use crate::numerics::{tridiag::tridiag_eigenvalues_tol, SpectralMeasure};
use crate::substitution::{Letter, DEFAULT_WORD_CAP};

/// Absolute accuracy of the returned roots.
pub const ROOT_TOL: f64 = 1e-12;

/// Bracket endpoints this close to a root candidate are taken as the root.
const SNAP_DIST: f64 = 1e-6;

const RESCALE_EXP: i32 = 256;

/// Trace of the transfer matrix over one period, as a function of a real energy.
#[derive(Debug, Clone)]
pub struct PeriodicTrace {
    potential: Vec<f64>,
}

impl PeriodicTrace {
    pub fn new(potential: Vec<f64>) -> PeriodicTrace {
        assert!(!potential.is_empty(), "empty period");
        PeriodicTrace { potential }
    }

    pub fn period(&self) -> usize {
        self.potential.len()
    }

    pub fn potential(&self) -> &[f64] {
        &self.potential
    }

    /// `(tr, d tr / dE)`; saturates to infinities far outside the spectrum.
    pub fn eval(&self, e: f64) -> (f64, f64) {
        // product P and its derivative Q, rescaled together by powers of two
        let mut p = [[1.0, 0.0], [0.0, 1.0]];
        let mut q = [[0.0, 0.0], [0.0, 0.0]];
        let mut exp: i64 = 0;
        let big = 2f64.powi(RESCALE_EXP);
        for &v in &self.potential {
            let d = e - v;
            // M P with M = [[d, -1], [1, 0]]; M' = [[1, 0], [0, 0]]
            let np = [[d * p[0][0] - p[1][0], d * p[0][1] - p[1][1]], p[0]];
            let nq = [[d * q[0][0] - q[1][0] + p[0][0], d * q[0][1] - q[1][1] + p[0][1]], q[0]];
            p = np;
            q = nq;
            let m = p.iter().chain(q.iter()).flatten().fold(0.0f64, |a, x| a.max(x.abs()));
            if m > big {
                let s = 1.0 / big;
                p = p.map(|r| r.map(|x| x * s));
                q = q.map(|r| r.map(|x| x * s));
                exp += RESCALE_EXP as i64;
            }
        }
        (ldexp(p[0][0] + p[1][1], exp), ldexp(q[0][0] + q[1][1], exp))
    }

    pub fn trace(&self, e: f64) -> f64 {
        self.eval(e).0
    }

    /// Sign of the trace on the `j`-th band's right side, `j = 1 ..= l`.
    fn band_sign(&self, j: usize) -> f64 {
        if (self.period() - j) % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// Dirichlet eigenvalues of sites `1 .. l - 1`, the zeros of the
    /// upper-right entry of the period transfer matrix.
    fn separators(&self) -> Vec<f64> {
        let l = self.period();
        if l == 1 {
            return Vec::new();
        }
        tridiag_eigenvalues_tol(&self.potential[1..], &vec![1.0; l - 2], 1e-13)
    }

    fn outer_bound(&self) -> f64 {
        self.potential.iter().fold(0.0f64, |a, v| a.max(v.abs())) + 3.0
    }

    /// Leftmost point of `[lo, hi]` where `pred` holds, assuming it is
    /// monotone (false then true) and holds at `hi`. `pred` is never
    /// evaluated at `lo`, where rounding may flip it.
    fn bisect<F: Fn(f64) -> bool>(lo: f64, hi: f64, pred: F) -> f64 {
        let (mut lo, mut hi) = (lo, hi);
        while hi - lo > ROOT_TOL {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if pred(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Root of `tr = t` (`|t| <= 2`) inside band `j` of the bracket list.
    fn band_root(&self, brackets: &[f64], j: usize, t: f64) -> f64 {
        let s = self.band_sign(j);
        let (lo, hi) = (brackets[j - 1], brackets[j]);
        let mut r = Self::bisect(lo, hi, |e| s * (self.trace(e) - t) >= 0.0);
        // closed gaps: the root is the separator itself, known more precisely
        for end in [lo, hi] {
            if (r - end).abs() < SNAP_DIST && (self.trace(end) - t).abs() < 1e-7 {
                r = end;
            }
        }
        r
    }

    fn brackets(&self) -> Vec<f64> {
        let b = self.outer_bound();
        let mut v = vec![-b];
        v.extend(self.separators());
        v.push(b);
        v
    }

    /// All real roots of `tr(E) = t`, ascending, repeated by multiplicity
    /// where two bands touch.
    pub fn roots(&self, t: f64) -> Vec<f64> {
        let l = self.period();
        let brackets = self.brackets();
        if t.abs() <= 2.0 {
            return (1..=l).map(|j| self.band_root(&brackets, j, t)).collect();
        }
        let sign = t.signum();
        let edges: Vec<(f64, f64)> = (1..=l)
            .map(|j| {
                let s = self.band_sign(j);
                (self.band_root(&brackets, j, -2.0 * s), self.band_root(&brackets, j, 2.0 * s))
            })
            .collect();
        let mut out = Vec::new();
        // left of the first band the trace has the sign of the (missing) band 0
        let s0 = self.band_sign(1) * -1.0;
        if s0 == sign {
            let mut lo = edges[0].0 - 1.0;
            while s0 * self.trace(lo) < t.abs() {
                lo -= lo.abs().max(1.0);
            }
            out.push(Self::bisect(lo, edges[0].0, |e| s0 * self.trace(e) <= t.abs()));
        }
        for j in 1..l {
            let s = self.band_sign(j);
            let (a, b) = (edges[j - 1].1, edges[j].0);
            if s != sign || b <= a {
                continue;
            }
            // s * tr rises from 2 at a to its maximum at the critical point, then falls back
            let c = Self::bisect(a, b, |e| s * self.eval(e).1 <= 0.0);
            let top = s * self.trace(c);
            if top < t.abs() {
                continue;
            }
            out.push(Self::bisect(a, c, |e| s * self.trace(e) >= t.abs()));
            out.push(Self::bisect(c, b, |e| s * self.trace(e) < t.abs()));
        }
        if sign > 0.0 {
            let mut hi = edges[l - 1].1 + 1.0;
            while self.trace(hi) < t {
                hi += hi.abs().max(1.0);
            }
            out.push(Self::bisect(edges[l - 1].1, hi, |e| self.trace(e) >= t));
        }
        out.sort_by(f64::total_cmp);
        out
    }
}

/// Roots with multiplicity together with the period they came from.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedBcRoots {
    pub period: usize,
    pub target: f64,
    pub roots: Vec<f64>,
}

impl MixedBcRoots {
    /// Roots with coincident ones (closer than `tol`) merged.
    pub fn distinct(&self, tol: f64) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::new();
        for &r in &self.roots {
            if out.last().map_or(true, |&p| r - p > tol) {
                out.push(r);
            }
        }
        out
    }

    /// Uniform probability on the roots, counted with multiplicity.
    pub fn counting_measure(&self) -> Result<SpectralMeasure, SchrodingerError> {
        Ok(SpectralMeasure::uniform(self.roots.clone())?)
    }
}

/// Energies with `tr M(iota^n(a)) = target`.
pub fn mixed_bc_eigenvalues(of: &OperatorFamily, n: u32, target: f64) -> Result<MixedBcRoots, SchrodingerError> {
    if !target.is_finite() {
        return Err(SchrodingerError::InvalidArgument(format!("target {target}")));
    }
    let word = of.substitution().iterate_letter(Letter::A, n, DEFAULT_WORD_CAP)?;
    let kappa = of.kappa();
    let potential = word.letters().iter().map(|&l| if l == Letter::A { kappa } else { 0.0 }).collect();
    let pt = PeriodicTrace::new(potential);
    Ok(MixedBcRoots { period: pt.period(), target, roots: pt.roots(target) })
}
