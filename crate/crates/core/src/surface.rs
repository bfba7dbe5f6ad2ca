//! Cubic surfaces `x^2 + y^2 + z^2 = xyz + D`, SL2 lifts of their points and
//! the polynomial automorphisms induced by substitutions.
//!
//! A point `(x, y, z)` is the character of a pair `(A, B)` of SL2 matrices:
//! `x = tr A`, `y = tr B`, `z = tr AB`. A substitution `iota` acts by
//! `f(x, y, z) = (tr iota(a), tr iota(b), tr iota(ab))`, where a word
//! `u_1 u_2 ... u_n` is sent to the reversed product `rho(u_n) ... rho(u_1)`,
//! the convention of transfer matrices.

use std::fmt;
use std::ops::Mul;

use num_complex::Complex64;
use thiserror::Error;

use crate::numerics::{log_norm, NumericsError, ScaledComplex};
use crate::substitution::{AbelianData, Letter, Substitution, SubstitutionError, Word, DEFAULT_WORD_CAP};

/// Relative tolerance of the invariant check in [`SurfacePoint::new`].
pub const INVARIANT_TOL: f64 = 1e-8;

/// Steps used to detect the attracting vertex at infinity.
pub const PROBE_STEPS: usize = 25;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SurfaceError {
    #[error("point is off the surface: residual {residual:e}")]
    OffSurface { residual: f64 },
    #[error("word of length {len} exceeds the cap {cap}")]
    WordTooLong { len: usize, cap: usize },
    #[error("no inverse word images available for this map")]
    InverseWordsUnavailable,
    #[error("supplied inverse does not invert the substitution: {0}")]
    NotAnInverse(String),
    #[error("no escaping probe orbit found")]
    NoEscapeDetected,
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Substitution(#[from] SubstitutionError),
}

/// 2x2 complex matrix with extended-exponent entries.
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct Mat2(pub [[ScaledComplex; 2]; 2]);

impl Mat2 {
    pub fn identity() -> Mat2 {
        let (o, z) = (ScaledComplex::ONE, ScaledComplex::ZERO);
        Mat2([[o, z], [z, o]])
    }

    pub fn from_complex(m: [[Complex64; 2]; 2]) -> Mat2 {
        Mat2(m.map(|row| row.map(ScaledComplex::from)))
    }

    pub fn to_complex(&self) -> [[Complex64; 2]; 2] {
        self.0.map(|row| row.map(|v| v.to_complex()))
    }

    pub fn trace(&self) -> ScaledComplex {
        self.0[0][0] + self.0[1][1]
    }

    pub fn det(&self) -> ScaledComplex {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    /// Adjugate; the inverse for determinant one.
    pub fn adjugate(&self) -> Mat2 {
        let [[a, b], [c, d]] = self.0;
        Mat2([[d, -b], [-c, a]])
    }

    /// `ln` of the largest Euclidean column norm.
    pub fn log_max_column_norm(&self) -> f64 {
        let c0 = log_norm(&[self.0[0][0], self.0[1][0]]);
        let c1 = log_norm(&[self.0[0][1], self.0[1][1]]);
        c0.max(c1)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|v| v.is_finite())
    }
}

impl Mul for Mat2 {
    type Output = Mat2;

    fn mul(self, rhs: Mat2) -> Mat2 {
        let (a, b) = (self.0, rhs.0);
        let e = |i: usize, j: usize| a[i][0] * b[0][j] + a[i][1] * b[1][j];
        Mat2([[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]])
    }
}

/// `x^2 + y^2 + z^2 - xyz`.
pub fn fricke_invariant(
    x: ScaledComplex,
    y: ScaledComplex,
    z: ScaledComplex,
) -> Result<ScaledComplex, NumericsError> {
    let v = x * x + y * y + z * z - x * y * z;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(NumericsError::ExponentOverflow)
    }
}

/// A point of `S_D` together with the invariant `D` it was created on.
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct SurfacePoint {
    pub x: ScaledComplex,
    pub y: ScaledComplex,
    pub z: ScaledComplex,
    pub d: Complex64,
}

/// Which root of `t^2 - z t + 1` the lift uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootChoice {
    Larger,
    Smaller,
}

/// Vertices of the triangle at infinity, in homogeneous coordinates `[x:y:z:w]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Vertex {
    X,
    Y,
    Z,
}

impl Vertex {
    pub fn index(self) -> usize {
        match self {
            Vertex::X => 0,
            Vertex::Y => 1,
            Vertex::Z => 2,
        }
    }

    pub fn from_index(i: usize) -> Vertex {
        [Vertex::X, Vertex::Y, Vertex::Z][i]
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Vertex::X => "[1:0:0:0]",
            Vertex::Y => "[0:1:0:0]",
            Vertex::Z => "[0:0:1:0]",
        })
    }
}

impl SurfacePoint {
    /// Checked constructor: the Fricke relation must hold to
    /// `INVARIANT_TOL * max(1, |p|^2)`.
    pub fn new(x: Complex64, y: Complex64, z: Complex64, d: Complex64) -> Result<SurfacePoint, SurfaceError> {
        let p = SurfacePoint { x: x.into(), y: y.into(), z: z.into(), d };
        let residual = p.invariant_residual()?;
        let scale = (x.norm_sqr() + y.norm_sqr() + z.norm_sqr()).max(1.0);
        if !(residual <= INVARIANT_TOL * scale) {
            return Err(SurfaceError::OffSurface { residual });
        }
        Ok(p)
    }

    /// The point `(x, y, z)` on the surface through it.
    pub fn from_coords(x: Complex64, y: Complex64, z: Complex64) -> SurfacePoint {
        let d = x * x + y * y + z * z - x * y * z;
        SurfacePoint { x: x.into(), y: y.into(), z: z.into(), d }
    }

    /// Completes `(x, y)` to a point of `S_d`: `z` solves `z^2 - xy z + x^2 + y^2 - d = 0`.
    pub fn on_surface(x: Complex64, y: Complex64, d: Complex64, root: RootChoice) -> SurfacePoint {
        let b = x * y;
        let c = x * x + y * y - d;
        let disc = (b * b - 4.0 * c).sqrt();
        let (r1, r2) = ((b + disc) / 2.0, (b - disc) / 2.0);
        let (big, small) = if r1.norm() >= r2.norm() { (r1, r2) } else { (r2, r1) };
        let z = match root {
            RootChoice::Larger => big,
            RootChoice::Smaller => {
                // Vieta avoids cancellation in the small root
                if big.norm() > 0.0 {
                    c / big
                } else {
                    small
                }
            }
        };
        SurfacePoint { x: x.into(), y: y.into(), z: z.into(), d }
    }

    /// Builds an iterate without checking the relation.
    pub(crate) fn raw(coords: [ScaledComplex; 3], d: Complex64) -> SurfacePoint {
        SurfacePoint { x: coords[0], y: coords[1], z: coords[2], d }
    }

    pub fn coords(&self) -> [ScaledComplex; 3] {
        [self.x, self.y, self.z]
    }

    pub fn to_complex(&self) -> [Complex64; 3] {
        self.coords().map(|v| v.to_complex())
    }

    /// `ln |(x, y, z)|` (Euclidean).
    pub fn log_norm(&self) -> f64 {
        log_norm(&self.coords())
    }

    pub fn fricke(&self) -> Result<ScaledComplex, NumericsError> {
        fricke_invariant(self.x, self.y, self.z)
    }

    /// `|fricke - D|`, saturating to infinity for huge points.
    pub fn invariant_residual(&self) -> Result<f64, NumericsError> {
        let r = self.fricke()? - ScaledComplex::from(self.d);
        Ok(r.to_complex().norm())
    }

    /// Invariant drift relative to `max(1, |p|^2, |xyz|)`.
    pub fn drift(&self) -> Result<f64, NumericsError> {
        let r = self.fricke()? - ScaledComplex::from(self.d);
        if r.is_zero() {
            return Ok(0.0);
        }
        let scale = (2.0 * self.log_norm()).max((self.x * self.y * self.z).ln_abs_or_neg_inf()).max(0.0);
        Ok((r.log_abs()? - scale).exp())
    }
}

/// Roots of `t^2 - z t + 1`, larger modulus first (ties: positive real part,
/// then positive imaginary part).
fn lift_roots(z: ScaledComplex) -> (ScaledComplex, ScaledComplex) {
    let four = ScaledComplex::from(4.0);
    let disc = (z * z - four).sqrt();
    let half = |v: ScaledComplex| v.scale(0.5);
    let (r1, r2) = (half(z + disc), half(z - disc));
    let key = |v: &ScaledComplex| {
        let m = v.mantissa();
        (m.re > 0.0, m.im > 0.0)
    };
    let big = match r1.abs_cmp(&r2) {
        std::cmp::Ordering::Greater => r1,
        std::cmp::Ordering::Less => r2,
        std::cmp::Ordering::Equal => {
            if key(&r1) >= key(&r2) {
                r1
            } else {
                r2
            }
        }
    };
    // product of the roots is one
    (big, big.recip())
}

/// `A = [[x, -1], [1, 0]]`, `B = [[0, t], [-1/t, y]]` with `t + 1/t = z`.
pub fn lift(p: &SurfacePoint) -> (Mat2, Mat2) {
    lift_with(p, RootChoice::Larger)
}

pub fn lift_with(p: &SurfacePoint, root: RootChoice) -> (Mat2, Mat2) {
    let (big, small) = lift_roots(p.z);
    let (t, t_inv) = match root {
        RootChoice::Larger => (big, small),
        RootChoice::Smaller => (small, big),
    };
    let (o, z) = (ScaledComplex::ONE, ScaledComplex::ZERO);
    let a = Mat2([[p.x, -o], [o, z]]);
    let b = Mat2([[z, t], [-t_inv, p.y]]);
    (a, b)
}

/// `rho(u_n) ... rho(u_1)` for `w = u_1 ... u_n`.
pub fn word_matrix(a: &Mat2, b: &Mat2, w: &Word) -> Mat2 {
    let (ai, bi) = (a.adjugate(), b.adjugate());
    w.letters().iter().fold(Mat2::identity(), |acc, l| {
        let m = match l {
            Letter::A => a,
            Letter::B => b,
            Letter::AInv => &ai,
            Letter::BInv => &bi,
        };
        *m * acc
    })
}

/// Trace of the word under the lift of `p`.
pub fn word_trace(p: &SurfacePoint, w: &Word) -> Result<ScaledComplex, SurfaceError> {
    word_trace_with(p, w, RootChoice::Larger, DEFAULT_WORD_CAP)
}

pub fn word_trace_with(
    p: &SurfacePoint,
    w: &Word,
    root: RootChoice,
    cap: usize,
) -> Result<ScaledComplex, SurfaceError> {
    if w.len() > cap {
        return Err(SurfaceError::WordTooLong { len: w.len(), cap });
    }
    let (a, b) = lift_with(p, root);
    let t = word_matrix(&a, &b, w).trace();
    if !t.is_finite() {
        return Err(NumericsError::ExponentOverflow.into());
    }
    Ok(t)
}

/// Images of `a`, `b` and `ab` under a substitution.
#[derive(Debug, Clone, PartialEq)]
struct WordTriple {
    sub: Substitution,
    words: [Word; 3],
}

impl WordTriple {
    fn new(sub: Substitution) -> WordTriple {
        let ab = Word::parse("ab").expect("literal word");
        let words = [sub.image_a().clone(), sub.image_b().clone(), sub.apply(&ab)];
        WordTriple { sub, words }
    }

    fn apply(&self, p: &SurfacePoint) -> Result<SurfacePoint, SurfaceError> {
        let (a, b) = lift(p);
        let mut out = [ScaledComplex::ZERO; 3];
        for (o, w) in out.iter_mut().zip(&self.words) {
            *o = word_matrix(&a, &b, w).trace();
            if !o.is_finite() {
                return Err(NumericsError::ExponentOverflow.into());
            }
        }
        Ok(SurfacePoint::raw(out, p.d))
    }
}

/// The trace-map automorphism `f` of a hyperbolic substitution, with an
/// optional inverse.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceMap {
    forward: WordTriple,
    inverse: Option<WordTriple>,
    abelian: AbelianData,
}

impl TraceMap {
    pub fn new(sub: Substitution) -> Result<TraceMap, SurfaceError> {
        let abelian = sub.abelian_data()?;
        Ok(TraceMap { forward: WordTriple::new(sub), inverse: None, abelian })
    }

    /// Fibonacci map `(x, y, z) -> (z, x, xz - y)` with its inverse built in.
    pub fn fibonacci() -> TraceMap {
        TraceMap::new(Substitution::fibonacci())
            .and_then(|t| t.with_inverse(Substitution::fibonacci_inverse()))
            .expect("Fibonacci substitution is a hyperbolic automorphism")
    }

    /// Attaches inverse word images; both compositions must reduce to the identity.
    pub fn with_inverse(mut self, inv: Substitution) -> Result<TraceMap, SurfaceError> {
        let sub = &self.forward.sub;
        for l in [Letter::A, Letter::B] {
            let x = Word::letter(l);
            for (name, img) in [("forward after inverse", sub.apply(&inv.image(l))), ("inverse after forward", inv.apply(&sub.image(l)))] {
                if img.reduced() != x {
                    return Err(SurfaceError::NotAnInverse(format!("{name} sends {x} to {}", img.reduced())));
                }
            }
        }
        self.inverse = Some(WordTriple::new(inv));
        Ok(self)
    }

    pub fn substitution(&self) -> &Substitution {
        &self.forward.sub
    }

    pub fn inverse_substitution(&self) -> Option<&Substitution> {
        self.inverse.as_ref().map(|t| &t.sub)
    }

    pub fn abelian(&self) -> &AbelianData {
        &self.abelian
    }

    /// Growth rate used to renormalize the Green function.
    pub fn lambda(&self) -> f64 {
        self.abelian.lambda
    }

    /// The three words whose traces give the image point.
    pub fn words(&self) -> &[Word; 3] {
        &self.forward.words
    }

    pub fn has_inverse(&self) -> bool {
        self.inverse.is_some()
    }

    pub fn apply(&self, p: &SurfacePoint) -> Result<SurfacePoint, SurfaceError> {
        self.forward.apply(p)
    }

    pub fn apply_inverse(&self, p: &SurfacePoint) -> Result<SurfacePoint, SurfaceError> {
        self.inverse.as_ref().ok_or(SurfaceError::InverseWordsUnavailable)?.apply(p)
    }

    /// The map `f^-1`, with `f` as its inverse.
    pub fn inverse(&self) -> Result<TraceMap, SurfaceError> {
        let inv = self.inverse.clone().ok_or(SurfaceError::InverseWordsUnavailable)?;
        let abelian = inv.sub.abelian_data()?;
        Ok(TraceMap { forward: inv, inverse: Some(self.forward.clone()), abelian })
    }

    /// Vertex at infinity attracting escaping orbits: the coordinate that
    /// dominates after [`PROBE_STEPS`] iterations of a generic probe point.
    pub fn infinity_vertex(&self) -> Result<Vertex, SurfaceError> {
        let probes = [
            (Complex64::new(3.1, 0.0), Complex64::new(2.7, 0.3)),
            (Complex64::new(2.3, -0.7), Complex64::new(3.9, 0.2)),
            (Complex64::new(-4.2, 0.5), Complex64::new(1.9, -1.1)),
        ];
        for (x, y) in probes {
            let p = SurfacePoint::on_surface(x, y, Complex64::new(0.0, 0.0), RootChoice::Larger);
            if let Some(v) = self.probe_vertex(p)? {
                return Ok(v);
            }
        }
        Err(SurfaceError::NoEscapeDetected)
    }

    /// Dominant coordinate of a probe orbit, if the two sub-dominance ratios
    /// shrink over the last ten steps.
    fn probe_vertex(&self, mut p: SurfacePoint) -> Result<Option<Vertex>, SurfaceError> {
        let mut history = Vec::with_capacity(PROBE_STEPS);
        for _ in 0..PROBE_STEPS {
            p = self.apply(&p)?;
            history.push(p.coords().map(|c| c.ln_abs_or_neg_inf()));
        }
        let last = history.last().unwrap();
        let k = (0..3).max_by(|&i, &j| last[i].total_cmp(&last[j])).unwrap();
        let ratio = |h: &[f64; 3]| (0..3).filter(|&i| i != k).map(|i| h[i] - h[k]).fold(f64::NEG_INFINITY, f64::max);
        let tail: Vec<f64> = history[PROBE_STEPS - 10..].iter().map(ratio).collect();
        let shrinking = tail.windows(2).all(|w| w[1] < w[0]) && *tail.last().unwrap() < -10.0;
        Ok(shrinking.then(|| Vertex::from_index(k)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_point(rng: &mut ChaCha8Rng, scale: f64) -> SurfacePoint {
        let mut r = || c(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale));
        SurfacePoint::from_coords(r(), r(), r())
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * b.norm().max(1.0)
    }

    #[test]
    fn fricke_examples() {
        let z = ScaledComplex::ZERO;
        assert!(fricke_invariant(z, z, z).unwrap().is_zero());
        let two = ScaledComplex::from(2.0);
        assert_eq!(fricke_invariant(two, two, two).unwrap().to_complex(), c(4.0, 0.0));
        let p = [-1.0, 0.0, -2.0].map(ScaledComplex::from);
        assert_eq!(fricke_invariant(p[0], p[1], p[2]).unwrap().to_complex(), c(5.0, 0.0));
    }

    #[test]
    fn checked_constructor() {
        assert!(SurfacePoint::new(c(2.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(4.0, 0.0)).is_ok());
        assert!(matches!(
            SurfacePoint::new(c(2.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(4.1, 0.0)),
            Err(SurfaceError::OffSurface { .. })
        ));
        let p = SurfacePoint::on_surface(c(0.3, 1.0), c(-2.0, 0.5), c(4.0, 0.0), RootChoice::Smaller);
        assert!(p.invariant_residual().unwrap() < 1e-12);
    }

    #[test]
    fn lift_examples() {
        let p = SurfacePoint::from_coords(c(2.0, 0.0), c(2.0, 0.0), c(2.0, 0.0));
        let (a, b) = lift(&p);
        assert!(close(b.0[0][1].to_complex(), c(1.0, 0.0), 1e-12));
        assert!(close((a * b).trace().to_complex(), c(2.0, 0.0), 1e-12));
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let p = random_point(&mut rng, 5.0);
            for root in [RootChoice::Larger, RootChoice::Smaller] {
                let (a, b) = lift_with(&p, root);
                assert!(close(a.det().to_complex(), c(1.0, 0.0), 1e-9));
                assert!(close(b.det().to_complex(), c(1.0, 0.0), 1e-9));
                assert!(close(a.trace().to_complex(), p.x.to_complex(), 1e-12));
                assert!(close(b.trace().to_complex(), p.y.to_complex(), 1e-12));
                assert!(close((b * a).trace().to_complex(), p.z.to_complex(), 1e-9));
            }
        }
    }

    #[test]
    fn word_trace_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let p = random_point(&mut rng, 3.0);
            let [x, y, z] = p.to_complex();
            let tr = |s: &str| word_trace(&p, &Word::parse(s).unwrap()).unwrap().to_complex();
            assert!(close(tr("ab"), z, 1e-10));
            assert!(close(tr("aba"), x * z - y, 1e-10));
            assert!(close(tr("Ab"), x * y - z, 1e-10));
            assert!(close(tr("Ba"), x * y - z, 1e-10));
            assert!(close(tr(""), c(2.0, 0.0), 1e-12));
        }
    }

    #[test]
    fn word_cap() {
        let p = SurfacePoint::from_coords(c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0));
        let w = Word::parse("abab").unwrap();
        assert_eq!(
            word_trace_with(&p, &w, RootChoice::Larger, 3),
            Err(SurfaceError::WordTooLong { len: 4, cap: 3 })
        );
    }

    #[test]
    fn fibonacci_closed_forms() {
        let tm = TraceMap::fibonacci();
        let inv = tm.inverse().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let p = random_point(&mut rng, 4.0);
            let [x, y, z] = p.to_complex();
            let f = tm.apply(&p).unwrap().to_complex();
            for (got, want) in f.iter().zip([z, x, x * z - y]) {
                assert!(close(*got, want, 1e-9));
            }
            let g = tm.apply_inverse(&p).unwrap().to_complex();
            for (got, want) in g.iter().zip([y, x * y - z, x]) {
                assert!(close(*got, want, 1e-9));
            }
            assert_eq!(inv.apply(&p).unwrap().to_complex(), g);
            let back = tm.apply_inverse(&tm.apply(&p).unwrap()).unwrap().to_complex();
            for (got, want) in back.iter().zip([x, y, z]) {
                assert!(close(*got, want, 1e-8));
            }
        }
    }

    #[test]
    fn invariant_is_preserved() {
        let tm = TraceMap::fibonacci();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let p = random_point(&mut rng, 10.0);
            let q = tm.apply(&p).unwrap();
            assert!(q.drift().unwrap() < 1e-6);
        }
    }

    #[test]
    fn infinity_vertices() {
        let tm = TraceMap::fibonacci();
        assert_eq!(tm.infinity_vertex().unwrap(), Vertex::Z);
        assert_eq!(tm.inverse().unwrap().infinity_vertex().unwrap(), Vertex::Y);
        assert_eq!(Vertex::Y.to_string(), "[0:1:0:0]");
    }

    #[test]
    fn missing_inverse() {
        let tm = TraceMap::new(Substitution::parse("a>ab;b>aab").unwrap()).unwrap();
        let p = SurfacePoint::from_coords(c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0));
        assert_eq!(tm.apply_inverse(&p), Err(SurfaceError::InverseWordsUnavailable));
        let wrong = TraceMap::new(Substitution::fibonacci()).unwrap().with_inverse(Substitution::fibonacci());
        assert!(matches!(wrong, Err(SurfaceError::NotAnInverse(_))));
    }

    #[test]
    fn orbit_length_growth() {
        let fib = Substitution::fibonacci();
        let lens: Vec<usize> = (10..=16).map(|n| fib.iterate_letter(Letter::A, n, DEFAULT_WORD_CAP).unwrap().len()).collect();
        let lambda = TraceMap::fibonacci().lambda();
        for w in lens.windows(2).skip(2) {
            assert!((w[1] as f64 / w[0] as f64 / lambda - 1.0).abs() < 0.01);
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn word() -> impl Strategy<Value = Word> {
            prop::collection::vec(0usize..4, 0..=30).prop_map(|v| {
                Word::from_letters(v.into_iter().map(|i| [Letter::A, Letter::B, Letter::AInv, Letter::BInv][i]).collect())
            })
        }

        proptest! {
            #[test]
            fn trace_is_lift_independent(
                x in (-3.0f64..3.0, -3.0f64..3.0),
                y in (-3.0f64..3.0, -3.0f64..3.0),
                z in (-3.0f64..3.0, -3.0f64..3.0),
                w in word(),
            ) {
                let p = SurfacePoint::from_coords(c(x.0, x.1), c(y.0, y.1), c(z.0, z.1));
                let t1 = word_trace_with(&p, &w, RootChoice::Larger, 100).unwrap();
                let t2 = word_trace_with(&p, &w, RootChoice::Smaller, 100).unwrap();
                let (l1, l2) = (t1.ln_abs_or_neg_inf(), t2.ln_abs_or_neg_inf());
                let diff = (t1 - t2).ln_abs_or_neg_inf();
                // relative agreement, measured against the larger of the two traces
                prop_assert!(diff - l1.max(l2).max(0.0) < (1e-9f64).ln());
            }
        }
    }
}
