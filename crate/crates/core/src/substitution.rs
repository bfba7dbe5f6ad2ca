//! Words over the free group on `a`, `b`, substitutions acting on them, and the
//! abelianization data of a substitution (matrix, Perron root, non-negative
//! normal form and the eigenline coordinates `alpha`, `beta`).

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::ops::Mul;

use thiserror::Error;

/// Largest word materialized by default.
pub const DEFAULT_WORD_CAP: usize = 1_000_000;

/// Maximum depth of the normal-form search over GL2(Z) conjugations.
pub const NORMAL_FORM_DEPTH: usize = 20;

/// Largest power tried when looking for a seed letter of the invariant word.
pub const MAX_SEED_POWER: u32 = 4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SubstitutionError {
    #[error("parse error at column {column}: {message}")]
    Parse { column: usize, message: String },
    #[error("substitution images must be non-empty")]
    EmptyImage,
    #[error("substitution is not hyperbolic (det {det}, trace {trace})")]
    NotHyperbolic { det: i64, trace: i64 },
    #[error("no non-negative normal form found within depth {depth}")]
    NormalFormNotFound { depth: usize },
    #[error("eigenline projection is degenerate")]
    DegenerateEigenline,
    #[error("no letter x and power k <= {MAX_SEED_POWER} with the k-th image of x starting with x")]
    NoFixedSeed,
    #[error("substitution must be positive for this operation")]
    NotPositive,
    #[error("word length {len} exceeds the cap {cap}")]
    WordTooLong { len: usize, cap: usize },
    #[error("index {index} out of range for word of length {len}")]
    IndexOutOfRange { index: usize, len: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Letter {
    A,
    B,
    AInv,
    BInv,
}

impl Letter {
    pub fn inverse(self) -> Letter {
        match self {
            Letter::A => Letter::AInv,
            Letter::B => Letter::BInv,
            Letter::AInv => Letter::A,
            Letter::BInv => Letter::B,
        }
    }

    pub fn is_positive(self) -> bool {
        matches!(self, Letter::A | Letter::B)
    }

    /// The positive generator underlying this letter.
    pub fn base(self) -> Letter {
        match self {
            Letter::A | Letter::AInv => Letter::A,
            Letter::B | Letter::BInv => Letter::B,
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Letter::A => 'a',
            Letter::B => 'b',
            Letter::AInv => 'A',
            Letter::BInv => 'B',
        }
    }

    pub fn from_char(c: char) -> Option<Letter> {
        match c {
            'a' => Some(Letter::A),
            'b' => Some(Letter::B),
            'A' => Some(Letter::AInv),
            'B' => Some(Letter::BInv),
            _ => None,
        }
    }
}

/// A finite word in `a`, `b` and their inverses. Uppercase letters denote
/// inverses in the textual form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn empty() -> Word {
        Word(Vec::new())
    }

    pub fn from_letters(letters: Vec<Letter>) -> Word {
        Word(letters)
    }

    pub fn letter(l: Letter) -> Word {
        Word(vec![l])
    }

    pub fn parse(s: &str) -> Result<Word, SubstitutionError> {
        s.chars()
            .enumerate()
            .map(|(i, c)| {
                Letter::from_char(c).ok_or_else(|| SubstitutionError::Parse {
                    column: i + 1,
                    message: format!("unexpected character {c:?}"),
                })
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Word)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_positive(&self) -> bool {
        self.0.iter().all(|l| l.is_positive())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = Vec::with_capacity(self.len() + other.len());
        letters.extend_from_slice(&self.0);
        letters.extend_from_slice(&other.0);
        Word(letters)
    }

    /// Group inverse: reversed word with every letter inverted.
    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    /// Free reduction (cancels adjacent `x x^-1` pairs).
    pub fn reduced(&self) -> Word {
        let mut out: Vec<Letter> = Vec::with_capacity(self.len());
        for &l in &self.0 {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    pub fn is_prefix_of(&self, other: &Word) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn truncated(&self, n: usize) -> Word {
        Word(self.0[..n.min(self.len())].to_vec())
    }

    /// Signed letter counts `(#a, #b)`, inverse letters counting -1.
    pub fn abelian_counts(&self) -> [i64; 2] {
        let mut counts = [0i64; 2];
        for l in &self.0 {
            match l {
                Letter::A => counts[0] += 1,
                Letter::AInv => counts[0] -= 1,
                Letter::B => counts[1] += 1,
                Letter::BInv => counts[1] -= 1,
            }
        }
        counts
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            write!(f, "{}", l.to_char())?;
        }
        Ok(())
    }
}

/// Site potential of a word: 1 on `a`, 0 otherwise.
pub fn potential(prefix: &Word, i: usize) -> Result<u8, SubstitutionError> {
    prefix
        .letters()
        .get(i)
        .map(|l| u8::from(*l == Letter::A))
        .ok_or(SubstitutionError::IndexOutOfRange { index: i, len: prefix.len() })
}

/// 2x2 integer matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct IntMat2(pub [[i64; 2]; 2]);

impl IntMat2 {
    pub const IDENTITY: IntMat2 = IntMat2([[1, 0], [0, 1]]);

    pub fn det(&self) -> i64 {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn trace(&self) -> i64 {
        self.0[0][0] + self.0[1][1]
    }

    /// Inverse of a unimodular matrix; `None` when `|det| != 1`.
    pub fn unimodular_inverse(&self) -> Option<IntMat2> {
        let d = self.det();
        if d.abs() != 1 {
            return None;
        }
        let m = &self.0;
        Some(IntMat2([[m[1][1] * d, -m[0][1] * d], [-m[1][0] * d, m[0][0] * d]]))
    }

    pub fn neg(&self) -> IntMat2 {
        let m = &self.0;
        IntMat2([[-m[0][0], -m[0][1]], [-m[1][0], -m[1][1]]])
    }

    pub fn is_non_negative(&self) -> bool {
        self.0.iter().flatten().all(|&v| v >= 0)
    }

    pub fn pow(&self, n: u32) -> IntMat2 {
        (0..n).fold(IntMat2::IDENTITY, |acc, _| acc * *self)
    }

    fn max_abs(&self) -> i64 {
        self.0.iter().flatten().map(|v| v.abs()).max().unwrap_or(0)
    }

    /// Real eigenvalues `(larger, smaller)`, or `None` if complex.
    pub fn real_eigenvalues(&self) -> Option<(f64, f64)> {
        let tr = self.trace() as f64;
        let disc = tr * tr - 4.0 * self.det() as f64;
        if disc < 0.0 {
            return None;
        }
        let s = disc.sqrt();
        Some(((tr + s) / 2.0, (tr - s) / 2.0))
    }
}

impl Mul for IntMat2 {
    type Output = IntMat2;

    fn mul(self, rhs: IntMat2) -> IntMat2 {
        let (a, b) = (&self.0, &rhs.0);
        let mut out = [[0i64; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        IntMat2(out)
    }
}

impl fmt::Display for IntMat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = &self.0;
        write!(f, "[[{},{}],[{},{}]]", m[0][0], m[0][1], m[1][0], m[1][1])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Classification {
    pub positive: bool,
    pub unimodular: bool,
    pub hyperbolic: bool,
}

/// Abelianization data of a hyperbolic substitution.
#[derive(Debug, Clone, PartialEq)]
pub struct AbelianData {
    pub matrix: IntMat2,
    /// Spectral radius of `matrix`.
    pub lambda: f64,
    /// Non-negative representative of the PGL2(Z) conjugacy class of `matrix`.
    pub normal_form: IntMat2,
    /// `normal_form = sign * conjugator * matrix * conjugator^-1`.
    pub conjugator: IntMat2,
    pub sign: i64,
    pub alpha: f64,
    pub beta: f64,
}

impl AbelianData {
    pub fn alpha_plus_beta(&self) -> f64 {
        self.alpha + self.beta
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Substitution {
    image_a: Word,
    image_b: Word,
}

impl Substitution {
    pub fn new(image_a: Word, image_b: Word) -> Result<Substitution, SubstitutionError> {
        if image_a.is_empty() || image_b.is_empty() {
            return Err(SubstitutionError::EmptyImage);
        }
        Ok(Substitution { image_a, image_b })
    }

    /// `a -> ab`, `b -> a`.
    pub fn fibonacci() -> Substitution {
        Substitution {
            image_a: Word(vec![Letter::A, Letter::B]),
            image_b: Word(vec![Letter::A]),
        }
    }

    /// Inverse of the Fibonacci substitution: `a -> b`, `b -> B a`.
    pub fn fibonacci_inverse() -> Substitution {
        Substitution {
            image_a: Word(vec![Letter::B]),
            image_b: Word(vec![Letter::BInv, Letter::A]),
        }
    }

    pub fn identity() -> Substitution {
        Substitution { image_a: Word(vec![Letter::A]), image_b: Word(vec![Letter::B]) }
    }

    /// Parses `"a>ab;b>a"`. Rules may come in either order, whitespace is
    /// ignored, uppercase letters in images are inverses.
    pub fn parse(s: &str) -> Result<Substitution, SubstitutionError> {
        let perr = |column: usize, message: &str| SubstitutionError::Parse {
            column,
            message: message.to_string(),
        };
        let mut image_a: Option<Word> = None;
        let mut image_b: Option<Word> = None;
        let mut offset = 0usize;
        for rule in s.split(';') {
            let start = offset;
            offset += rule.chars().count() + 1;
            if rule.trim().is_empty() {
                continue;
            }
            let mut chars = rule.char_indices().filter(|(_, c)| !c.is_whitespace());
            let (i, head) = chars.next().ok_or_else(|| perr(start + 1, "empty rule"))?;
            let col = |byte_idx: usize| start + rule[..byte_idx].chars().count() + 1;
            let slot = match head {
                'a' => &mut image_a,
                'b' => &mut image_b,
                _ => return Err(perr(col(i), "rule must start with 'a' or 'b'")),
            };
            match chars.next() {
                Some((_, '>')) => {}
                Some((j, _)) => return Err(perr(col(j), "expected '>'")),
                None => return Err(perr(col(i) + 1, "expected '>'")),
            }
            let mut letters = Vec::new();
            for (j, c) in chars {
                letters.push(
                    Letter::from_char(c)
                        .ok_or_else(|| perr(col(j), &format!("unexpected character {c:?}")))?,
                );
            }
            if letters.is_empty() {
                return Err(perr(col(i), "empty image"));
            }
            if slot.is_some() {
                return Err(perr(col(i), "duplicate rule"));
            }
            *slot = Some(Word(letters));
        }
        match (image_a, image_b) {
            (Some(a), Some(b)) => Ok(Substitution { image_a: a, image_b: b }),
            (None, _) => Err(perr(s.chars().count() + 1, "missing rule for 'a'")),
            (_, None) => Err(perr(s.chars().count() + 1, "missing rule for 'b'")),
        }
    }

    pub fn image_a(&self) -> &Word {
        &self.image_a
    }

    pub fn image_b(&self) -> &Word {
        &self.image_b
    }

    pub fn image(&self, l: Letter) -> Word {
        match l {
            Letter::A => self.image_a.clone(),
            Letter::B => self.image_b.clone(),
            Letter::AInv => self.image_a.inverse(),
            Letter::BInv => self.image_b.inverse(),
        }
    }

    pub fn apply(&self, w: &Word) -> Word {
        let inv_a = self.image_a.inverse();
        let inv_b = self.image_b.inverse();
        let mut out = Vec::new();
        for l in w.letters() {
            let img = match l {
                Letter::A => &self.image_a,
                Letter::B => &self.image_b,
                Letter::AInv => &inv_a,
                Letter::BInv => &inv_b,
            };
            out.extend_from_slice(img.letters());
        }
        Word(out)
    }

    /// Like [`apply`](Self::apply) but fails instead of building a word longer than `cap`.
    pub fn apply_capped(&self, w: &Word, cap: usize) -> Result<Word, SubstitutionError> {
        let len: usize = w
            .letters()
            .iter()
            .map(|l| match l.base() {
                Letter::A => self.image_a.len(),
                _ => self.image_b.len(),
            })
            .sum();
        if len > cap {
            return Err(SubstitutionError::WordTooLong { len, cap });
        }
        Ok(self.apply(w))
    }

    /// `self ∘ other`: `x -> self(other(x))`.
    pub fn compose(&self, other: &Substitution) -> Substitution {
        Substitution {
            image_a: self.apply(&other.image_a),
            image_b: self.apply(&other.image_b),
        }
    }

    pub fn power(&self, n: u32) -> Substitution {
        (0..n).fold(Substitution::identity(), |acc, _| self.compose(&acc))
    }

    /// n-th iterate of the substitution applied to a single letter.
    pub fn iterate_letter(&self, l: Letter, n: u32, cap: usize) -> Result<Word, SubstitutionError> {
        let mut w = Word::letter(l);
        for _ in 0..n {
            w = self.apply_capped(&w, cap)?;
        }
        Ok(w)
    }

    /// Column j holds the signed letter counts of the image of the j-th generator.
    pub fn abelianization(&self) -> IntMat2 {
        let ca = self.image_a.abelian_counts();
        let cb = self.image_b.abelian_counts();
        IntMat2([[ca[0], cb[0]], [ca[1], cb[1]]])
    }

    pub fn is_positive(&self) -> bool {
        self.image_a.is_positive() && self.image_b.is_positive()
    }

    pub fn classify(&self) -> Classification {
        let m = self.abelianization();
        let (det, tr) = (m.det(), m.trace());
        Classification {
            positive: self.is_positive(),
            unimodular: det.abs() == 1,
            hyperbolic: (det == 1 && tr > 2) || (det == -1 && tr != 0),
        }
    }

    pub fn abelian_data(&self) -> Result<AbelianData, SubstitutionError> {
        let m = self.abelianization();
        if !self.classify().hyperbolic {
            return Err(SubstitutionError::NotHyperbolic { det: m.det(), trace: m.trace() });
        }
        let (e1, e2) = m.real_eigenvalues().ok_or(SubstitutionError::DegenerateEigenline)?;
        let lambda = e1.abs().max(e2.abs());
        let (normal_form, conjugator, sign) = normal_form_search(m, NORMAL_FORM_DEPTH)?;
        let (alpha, beta) = eigenline_projection(normal_form)?;
        Ok(AbelianData { matrix: m, lambda, normal_form, conjugator, sign, alpha, beta })
    }

    /// First `n` letters of the invariant infinite word.
    pub fn invariant_word_prefix(&self, n: usize) -> Result<Word, SubstitutionError> {
        if !self.is_positive() {
            return Err(SubstitutionError::NotPositive);
        }
        if n > DEFAULT_WORD_CAP {
            return Err(SubstitutionError::WordTooLong { len: n, cap: DEFAULT_WORD_CAP });
        }
        let (seed, power) = self.fixed_seed()?;
        let sigma = self.power(power);
        let first = sigma.image(seed);
        if first.len() == 1 {
            // the seed letter is fixed, so x x x ... is invariant
            return Ok(Word(vec![seed; n]));
        }
        let mut w = Word::letter(seed);
        while w.len() < n {
            let next = sigma.apply(&w);
            w = next.truncated(n);
        }
        Ok(w.truncated(n))
    }

    /// Seed letter and power `k` with `iota^k(x)` beginning with `x`; growing
    /// seeds are preferred.
    pub fn fixed_seed(&self) -> Result<(Letter, u32), SubstitutionError> {
        let mut fallback = None;
        for k in 1..=MAX_SEED_POWER {
            let sigma = self.power(k);
            for l in [Letter::A, Letter::B] {
                let img = sigma.image(l);
                if img.letters().first() == Some(&l) {
                    if img.len() > 1 {
                        return Ok((l, k));
                    }
                    fallback.get_or_insert((l, k));
                }
            }
        }
        fallback.ok_or(SubstitutionError::NoFixedSeed)
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a>{};b>{}", self.image_a, self.image_b)
    }
}

/// Breadth-first search over conjugations by the GL2(Z) generators (swap,
/// shear, inverse shear), up to global sign, for a non-negative matrix.
fn normal_form_search(
    m: IntMat2,
    depth: usize,
) -> Result<(IntMat2, IntMat2, i64), SubstitutionError> {
    let swap = IntMat2([[0, 1], [1, 0]]);
    let shear = IntMat2([[1, 1], [0, 1]]);
    let shear_inv = IntMat2([[1, -1], [0, 1]]);
    let gens = [(swap, swap), (shear, shear_inv), (shear_inv, shear)];

    let mut seen = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(m);
    queue.push_back((m, IntMat2::IDENTITY, 0usize));
    while let Some((x, p, d)) = queue.pop_front() {
        if x.is_non_negative() {
            return Ok((x, p, 1));
        }
        if x.neg().is_non_negative() {
            return Ok((x.neg(), p, -1));
        }
        if d == depth {
            continue;
        }
        for (g, g_inv) in gens {
            let y = g * x * g_inv;
            // entries only grow along useless branches; prune them
            if y.max_abs() > 1 << 40 {
                continue;
            }
            if seen.insert(y) {
                queue.push_back((y, g * p, d + 1));
            }
        }
    }
    Err(SubstitutionError::NormalFormNotFound { depth })
}

/// Coordinates of the projection of (1, 1) onto the Perron eigenline of `n`
/// along the other eigenline.
fn eigenline_projection(n: IntMat2) -> Result<(f64, f64), SubstitutionError> {
    let (lam, mu) = n.real_eigenvalues().ok_or(SubstitutionError::DegenerateEigenline)?;
    let eigvec = |e: f64| -> [f64; 2] {
        let m = &n.0;
        let (p, q, r, s) = (m[0][0] as f64, m[0][1] as f64, m[1][0] as f64, m[1][1] as f64);
        let v1 = [q, e - p];
        let v2 = [e - s, r];
        if v1[0].abs() + v1[1].abs() >= v2[0].abs() + v2[1].abs() {
            v1
        } else {
            v2
        }
    };
    let v = eigvec(lam);
    let w = eigvec(mu);
    let det = v[0] * w[1] - v[1] * w[0];
    if det.abs() < 1e-14 {
        return Err(SubstitutionError::DegenerateEigenline);
    }
    // (1,1) = c1 v + c2 w
    let c1 = (w[1] - w[0]) / det;
    let (alpha, beta) = (c1 * v[0], c1 * v[1]);
    if !(alpha > 0.0 && beta > 0.0) {
        return Err(SubstitutionError::DegenerateEigenline);
    }
    Ok((alpha, beta))
}
