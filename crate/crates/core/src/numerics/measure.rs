//! Finite atomic measures on the real line.

use std::io::{Read, Write};

use num_complex::Complex64;

use super::NumericsError;

/// Distance below which an evaluation point counts as sitting on an atom.
pub const AT_ATOM_EPS: f64 = 1e-14;

/// Sorted atoms with positive weights.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralMeasure {
    atoms: Vec<f64>,
    weights: Vec<f64>,
    /// `cumulative[i]` = total weight of atoms `0..=i`.
    cumulative: Vec<f64>,
}

impl SpectralMeasure {
    pub fn new(pairs: Vec<(f64, f64)>) -> Result<SpectralMeasure, NumericsError> {
        if pairs.is_empty() {
            return Err(NumericsError::InvalidMeasure("no atoms".into()));
        }
        if let Some((a, w)) = pairs.iter().find(|(a, w)| !a.is_finite() || !(*w > 0.0) || !w.is_finite()) {
            return Err(NumericsError::InvalidMeasure(format!("bad atom ({a}, {w})")));
        }
        let mut pairs = pairs;
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (atoms, weights): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        // compensated running sum, so that many equal weights add up to 1 exactly
        let mut cumulative = Vec::with_capacity(weights.len());
        let (mut sum, mut carry) = (0.0f64, 0.0f64);
        for &w in &weights {
            let t = sum + w;
            carry += if sum.abs() >= w { (sum - t) + w } else { (w - t) + sum };
            sum = t;
            cumulative.push(sum + carry);
        }
        Ok(SpectralMeasure { atoms, weights, cumulative })
    }

    /// Probability measure with equal weights on the given atoms.
    pub fn uniform(atoms: Vec<f64>) -> Result<SpectralMeasure, NumericsError> {
        let w = 1.0 / atoms.len().max(1) as f64;
        Self::new(atoms.into_iter().map(|a| (a, w)).collect())
    }

    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        *self.cumulative.last().unwrap_or(&0.0)
    }

    pub fn is_probability(&self) -> bool {
        (self.total_mass() - 1.0).abs() < 1e-12
    }

    pub fn support_bounds(&self) -> (f64, f64) {
        (self.atoms[0], *self.atoms.last().unwrap())
    }

    pub fn mean(&self) -> f64 {
        self.atoms.iter().zip(&self.weights).map(|(a, w)| a * w).sum::<f64>() / self.total_mass()
    }

    /// Mass of atoms `<= x` (right-continuous).
    pub fn cdf(&self, x: f64) -> f64 {
        let k = self.atoms.partition_point(|&a| a <= x);
        if k == 0 {
            0.0
        } else {
            self.cumulative[k - 1]
        }
    }

    /// Mass of atoms `< x`.
    pub fn cdf_left(&self, x: f64) -> f64 {
        let k = self.atoms.partition_point(|&a| a < x);
        if k == 0 {
            0.0
        } else {
            self.cumulative[k - 1]
        }
    }

    /// Image under `x -> factor * x` (`factor > 0`).
    pub fn scaled(&self, factor: f64) -> SpectralMeasure {
        let pairs = self.atoms.iter().map(|a| a * factor).zip(self.weights.iter().copied()).collect();
        SpectralMeasure::new(pairs).expect("scaling preserves validity")
    }

    /// Sup-distance between the two distribution functions.
    pub fn kolmogorov_distance(&self, other: &SpectralMeasure) -> Result<f64, NumericsError> {
        if !self.is_probability() || !other.is_probability() {
            return Err(NumericsError::NotProbability);
        }
        // both CDFs are step functions; the sup is attained at an atom of either
        let d = self
            .atoms
            .iter()
            .chain(other.atoms.iter())
            .map(|&x| (self.cdf(x) - other.cdf(x)).abs())
            .fold(0.0, f64::max);
        Ok(d)
    }

    /// Sup-distance to a continuous distribution function.
    pub fn kolmogorov_to<F: Fn(f64) -> f64>(&self, cdf: F) -> Result<f64, NumericsError> {
        if !self.is_probability() {
            return Err(NumericsError::NotProbability);
        }
        let mut d: f64 = 0.0;
        let mut below = 0.0;
        for (i, &a) in self.atoms.iter().enumerate() {
            let f = cdf(a);
            d = d.max((below - f).abs()).max((self.cumulative[i] - f).abs());
            below = self.cumulative[i];
        }
        Ok(d)
    }

    /// `sum_j w_j ln|e - atom_j|`.
    pub fn log_potential(&self, e: Complex64) -> Result<f64, NumericsError> {
        if !self.is_probability() {
            return Err(NumericsError::NotProbability);
        }
        let mut acc = 0.0;
        if e.im.abs() < AT_ATOM_EPS {
            let k = self.atoms.partition_point(|&a| a < e.re - AT_ATOM_EPS);
            if let Some(&a) = self.atoms.get(k) {
                if (a - e.re).abs() < AT_ATOM_EPS {
                    return Err(NumericsError::AtAtom(a));
                }
            }
        }
        let im2 = e.im * e.im;
        for (a, w) in self.atoms.iter().zip(&self.weights) {
            let dr = e.re - a;
            acc += w * (dr * dr + im2).ln();
        }
        Ok(0.5 * acc)
    }

    /// Largest mass carried by a half-open interval `(x, x + delta]`.
    pub fn max_mass_in_window(&self, delta: f64) -> f64 {
        let mut best: f64 = 0.0;
        let mut j = 0;
        for i in 0..self.atoms.len() {
            if j < i {
                j = i;
            }
            while j + 1 < self.atoms.len() && self.atoms[j + 1] - self.atoms[i] < delta {
                j += 1;
            }
            let before = if i == 0 { 0.0 } else { self.cumulative[i - 1] };
            best = best.max(self.cumulative[j] - before);
        }
        best
    }

    /// Logarithmic energy `sum_{i != j} w_i w_j ln|a_i - a_j|` (coincident atoms skipped).
    /// For an equilibrium-like measure this approximates the log of the capacity of its support.
    pub fn log_energy(&self) -> f64 {
        let n = self.atoms.len();
        let mut acc = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                let d = (self.atoms[j] - self.atoms[i]).abs();
                if d > 0.0 {
                    acc += 2.0 * self.weights[i] * self.weights[j] * d.ln();
                }
            }
        }
        acc / (self.total_mass() * self.total_mass())
    }

    /// CSV with columns `atom,weight`, preceded by optional `#` comment lines.
    pub fn write_csv<W: Write>(&self, mut out: W, comments: &[String]) -> Result<(), NumericsError> {
        for c in comments {
            writeln!(out, "# {c}").map_err(|e| NumericsError::Io(e.to_string()))?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["atom", "weight"]).map_err(csv_err)?;
        for (a, wt) in self.atoms.iter().zip(&self.weights) {
            w.write_record([format!("{a:e}"), format!("{wt:e}")]).map_err(csv_err)?;
        }
        w.flush().map_err(|e| NumericsError::Io(e.to_string()))
    }

    pub fn read_csv<R: Read>(input: R) -> Result<SpectralMeasure, NumericsError> {
        let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input);
        let mut pairs = Vec::new();
        for rec in r.records() {
            let rec = rec.map_err(csv_err)?;
            let parse = |i: usize| -> Result<f64, NumericsError> {
                rec.get(i)
                    .and_then(|s| s.trim().parse().ok())
                    .ok_or_else(|| NumericsError::Io(format!("bad record {rec:?}")))
            };
            pairs.push((parse(0)?, parse(1)?));
        }
        SpectralMeasure::new(pairs)
    }
}

pub(crate) fn csv_err(e: csv::Error) -> NumericsError {
    NumericsError::Io(e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn cdf_examples() {
        let m = SpectralMeasure::uniform(vec![4.0, 2.0, 1.0, 3.0]).unwrap();
        assert_eq!(m.cdf(0.0), 0.0);
        assert_eq!(m.cdf(10.0), m.total_mass());
        assert_eq!(m.cdf(2.5), 0.5);
        // right-continuity at atoms
        assert_eq!(m.cdf(2.0), 0.5);
        assert_eq!(m.cdf_left(2.0), 0.25);
    }

    #[test]
    fn kolmogorov_examples() {
        let m = SpectralMeasure::uniform(vec![0.3, 0.9, 1.4]).unwrap();
        assert_eq!(m.kolmogorov_distance(&m).unwrap(), 0.0);
        let d0 = SpectralMeasure::uniform(vec![0.0]).unwrap();
        let d1 = SpectralMeasure::uniform(vec![1.0]).unwrap();
        assert_eq!(d0.kolmogorov_distance(&d1).unwrap(), 1.0);
        let u = SpectralMeasure::uniform(vec![0.0, 1.0]).unwrap();
        assert_eq!(u.kolmogorov_distance(&d0).unwrap(), 0.5);
        let half = SpectralMeasure::new(vec![(0.0, 0.5)]).unwrap();
        assert_eq!(half.kolmogorov_distance(&d0), Err(NumericsError::NotProbability));
    }

    #[test]
    fn log_potential_examples() {
        let d0 = SpectralMeasure::uniform(vec![0.0]).unwrap();
        assert!((d0.log_potential(Complex64::new(std::f64::consts::E, 0.0)).unwrap() - 1.0).abs() < 1e-15);
        let u = SpectralMeasure::uniform(vec![-1.0, 1.0]).unwrap();
        assert!(u.log_potential(Complex64::new(0.0, 0.0)).unwrap().abs() < 1e-15);
        assert_eq!(u.log_potential(Complex64::new(1.0, 0.0)), Err(NumericsError::AtAtom(1.0)));
    }

    #[test]
    fn arcsine_log_potential() {
        // equilibrium measure of [-2, 2]: atoms 2cos(theta) at midpoint angles
        let n = 2000;
        let atoms = (0..n).map(|j| 2.0 * ((j as f64 + 0.5) * PI / n as f64).cos()).collect();
        let m = SpectralMeasure::uniform(atoms).unwrap();
        let v = m.log_potential(Complex64::new(3.0, 0.0)).unwrap();
        let exact = ((3.0 + 5f64.sqrt()) / 2.0).ln();
        assert!((v - exact).abs() < 2e-3, "{v} vs {exact}");
    }

    #[test]
    fn kolmogorov_to_continuous() {
        let n = 1000;
        let m = SpectralMeasure::uniform((0..n).map(|i| (i as f64 + 0.5) / n as f64).collect()).unwrap();
        let d = m.kolmogorov_to(|x| x.clamp(0.0, 1.0)).unwrap();
        assert!((d - 0.5 / n as f64).abs() < 1e-12);
    }

    #[test]
    fn window_mass() {
        let m = SpectralMeasure::uniform(vec![0.0, 0.1, 0.2, 1.0]).unwrap();
        assert_eq!(m.max_mass_in_window(0.25), 0.75);
        assert_eq!(m.max_mass_in_window(0.05), 0.25);
    }

    #[test]
    fn log_energy_shifts_by_log_of_scale() {
        let m = SpectralMeasure::uniform((0..200).map(|j| 2.0 * (j as f64 * 0.0157).cos()).collect())
            .unwrap();
        let shift = m.scaled(2.0).log_energy() - m.log_energy();
        let w2: f64 = m.weights().iter().map(|w| w * w).sum();
        assert!((shift - std::f64::consts::LN_2 * (1.0 - w2)).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_atoms() {
        assert!(SpectralMeasure::new(vec![]).is_err());
        assert!(SpectralMeasure::new(vec![(0.0, 0.0)]).is_err());
        assert!(SpectralMeasure::new(vec![(f64::NAN, 1.0)]).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn csv_round_trip(pairs in prop::collection::vec((-10.0f64..10.0, 1e-6f64..1.0), 1..50)) {
                let m = SpectralMeasure::new(pairs).unwrap();
                let mut buf = Vec::new();
                m.write_csv(&mut buf, &["manifest-sha256: abc".to_string()]).unwrap();
                let back = SpectralMeasure::read_csv(buf.as_slice()).unwrap();
                prop_assert_eq!(back.atoms(), m.atoms());
                prop_assert_eq!(back.weights(), m.weights());
            }

            #[test]
            fn cdf_monotone(atoms in prop::collection::vec(-5.0f64..5.0, 1..40), xs in prop::collection::vec(-6.0f64..6.0, 2..20)) {
                let m = SpectralMeasure::uniform(atoms).unwrap();
                let mut xs = xs;
                xs.sort_by(f64::total_cmp);
                for w in xs.windows(2) {
                    prop_assert!(m.cdf(w[0]) <= m.cdf(w[1]));
                }
                for &a in m.atoms() {
                    prop_assert!(m.cdf(a) >= m.cdf_left(a));
                    prop_assert_eq!(m.cdf(a), m.cdf(a + 1e-300_f64.max(a.abs() * 1e-17)).min(m.cdf(a)));
                }
            }
        }
    }
}
