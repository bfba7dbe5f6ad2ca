//! Finite unions of disjoint closed intervals.

use std::io::{Read, Write};

use super::measure::csv_err;
use super::NumericsError;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct IntervalSet {
    intervals: Vec<(f64, f64)>,
}

impl IntervalSet {
    pub fn empty() -> IntervalSet {
        IntervalSet::default()
    }

    /// Normalizes arbitrary closed intervals: sorts them and merges overlaps
    /// and touching neighbours.
    pub fn from_intervals(mut raw: Vec<(f64, f64)>) -> IntervalSet {
        raw.retain(|(lo, hi)| lo <= hi);
        raw.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut out: Vec<(f64, f64)> = Vec::with_capacity(raw.len());
        for (lo, hi) in raw {
            match out.last_mut() {
                Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
                _ => out.push((lo, hi)),
            }
        }
        IntervalSet { intervals: out }
    }

    /// Merges accepted grid points whose spacing is at most `step` into
    /// intervals. Isolated points become degenerate intervals.
    pub fn from_samples(points: &[f64], step: f64) -> IntervalSet {
        let mut pts = points.to_vec();
        pts.sort_by(f64::total_cmp);
        let slack = step * (1.0 + 1e-9);
        let mut out: Vec<(f64, f64)> = Vec::new();
        for p in pts {
            match out.last_mut() {
                Some(last) if p - last.1 <= slack => last.1 = p,
                _ => out.push((p, p)),
            }
        }
        IntervalSet { intervals: out }
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn total_length(&self) -> f64 {
        self.intervals.iter().map(|(lo, hi)| hi - lo).sum()
    }

    pub fn bounds(&self) -> Option<(f64, f64)> {
        Some((self.intervals.first()?.0, self.intervals.last()?.1))
    }

    pub fn contains(&self, x: f64) -> bool {
        let k = self.intervals.partition_point(|iv| iv.1 < x);
        self.intervals.get(k).is_some_and(|iv| iv.0 <= x)
    }

    pub fn distance_to(&self, x: f64) -> Result<f64, NumericsError> {
        if self.is_empty() {
            return Err(NumericsError::EmptySet);
        }
        let k = self.intervals.partition_point(|iv| iv.1 < x);
        let mut d = f64::INFINITY;
        if let Some(&(lo, _)) = self.intervals.get(k) {
            d = (lo - x).max(0.0);
        }
        if k > 0 {
            d = d.min(x - self.intervals[k - 1].1);
        }
        Ok(d)
    }

    pub fn is_subset_of(&self, other: &IntervalSet) -> bool {
        self.intervals.iter().all(|&(lo, hi)| {
            let k = other.intervals.partition_point(|iv| iv.1 < lo);
            other.intervals.get(k).is_some_and(|iv| iv.0 <= lo && hi <= iv.1)
        })
    }

    /// `sup_{a in self} d(a, other)`.
    fn directed_distance(&self, other: &IntervalSet) -> f64 {
        let mut d: f64 = 0.0;
        for &(lo, hi) in &self.intervals {
            d = d.max(other.distance_to(lo).unwrap()).max(other.distance_to(hi).unwrap());
            // inside [lo, hi] the distance to `other` peaks at midpoints of its gaps
            for w in other.intervals.windows(2) {
                let mid = 0.5 * (w[0].1 + w[1].0);
                if lo < mid && mid < hi {
                    d = d.max(mid - w[0].1);
                }
            }
        }
        d
    }

    pub fn hausdorff_distance(&self, other: &IntervalSet) -> Result<f64, NumericsError> {
        if self.is_empty() || other.is_empty() {
            return Err(NumericsError::EmptySet);
        }
        Ok(self.directed_distance(other).max(other.directed_distance(self)))
    }

    /// Number of half-open boxes `[k eps, (k+1) eps)` meeting the set.
    /// With this convention `[0, 1]` at `eps = 0.1` meets 11 boxes.
    pub fn box_count(&self, eps: f64) -> usize {
        let mut count = 0usize;
        let mut last: Option<i64> = None;
        for &(lo, hi) in &self.intervals {
            let a = (lo / eps).floor() as i64;
            let b = (hi / eps).floor() as i64;
            let a = match last {
                Some(l) if a <= l => l + 1,
                _ => a,
            };
            if b >= a {
                count += (b - a + 1) as usize;
            }
            last = Some(last.map_or(b, |l| l.max(b)));
        }
        count
    }

    pub fn write_csv<W: Write>(&self, mut out: W, comments: &[String]) -> Result<(), NumericsError> {
        for c in comments {
            writeln!(out, "# {c}").map_err(|e| NumericsError::Io(e.to_string()))?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["lo", "hi"]).map_err(csv_err)?;
        for (lo, hi) in &self.intervals {
            w.write_record([format!("{lo:e}"), format!("{hi:e}")]).map_err(csv_err)?;
        }
        w.flush().map_err(|e| NumericsError::Io(e.to_string()))
    }

    pub fn read_csv<R: Read>(input: R) -> Result<IntervalSet, NumericsError> {
        let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input);
        let mut raw = Vec::new();
        for rec in r.records() {
            let rec = rec.map_err(csv_err)?;
            let get = |i: usize| -> Result<f64, NumericsError> {
                rec.get(i)
                    .and_then(|s| s.trim().parse().ok())
                    .ok_or_else(|| NumericsError::Io(format!("bad record {rec:?}")))
            };
            raw.push((get(0)?, get(1)?));
        }
        Ok(IntervalSet::from_intervals(raw))
    }
}
