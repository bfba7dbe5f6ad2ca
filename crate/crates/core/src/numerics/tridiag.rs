//! Eigenvalues of real symmetric tridiagonal matrices by Sturm-count bisection.

/// Absolute accuracy of [`tridiag_eigenvalues`].
pub const EIGEN_TOL: f64 = 1e-10;

/// Pivot floor in the Sturm recurrence.
const PIVOT_FLOOR: f64 = 1e-300;

/// Number of eigenvalues strictly below `x`, from the signs of the pivots of
/// the shifted `LDL^T` factorization. `off_sq` holds the squared
/// off-diagonal entries.
pub fn sturm_count(diag: &[f64], off_sq: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = diag[0] - x;
    if q.abs() < PIVOT_FLOOR {
        q = -PIVOT_FLOOR;
    }
    if q < 0.0 {
        count += 1;
    }
    for i in 1..diag.len() {
        q = diag[i] - x - off_sq[i - 1] / q;
        if q.abs() < PIVOT_FLOOR {
            q = -PIVOT_FLOOR;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Gershgorin enclosure of the spectrum.
pub fn gershgorin_interval(diag: &[f64], offdiag: &[f64]) -> (f64, f64) {
    let n = diag.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let left = if i > 0 { offdiag[i - 1].abs() } else { 0.0 };
        let right = if i + 1 < n { offdiag[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - left - right);
        hi = hi.max(diag[i] + left + right);
    }
    (lo, hi)
}

/// All eigenvalues in ascending order, each to absolute accuracy [`EIGEN_TOL`].
///
/// Panics if `diag` is empty or `offdiag.len() != diag.len() - 1`.
pub fn tridiag_eigenvalues(diag: &[f64], offdiag: &[f64]) -> Vec<f64> {
    tridiag_eigenvalues_tol(diag, offdiag, EIGEN_TOL)
}

pub fn tridiag_eigenvalues_tol(diag: &[f64], offdiag: &[f64], tol: f64) -> Vec<f64> {
    assert!(!diag.is_empty(), "empty matrix");
    assert_eq!(offdiag.len(), diag.len() - 1, "off-diagonal length");
    let n = diag.len();
    if n == 1 {
        return vec![diag[0]];
    }
    let off_sq: Vec<f64> = offdiag.iter().map(|b| b * b).collect();
    let (lo, hi) = gershgorin_interval(diag, offdiag);
    let pad = 1e-9 * (1.0 + lo.abs().max(hi.abs()));
    let (lo, hi) = (lo - pad, hi + pad);

    let mut out = Vec::with_capacity(n);
    // (lo, hi, count(lo), count(hi)), bisected level by level so that the
    // Sturm sequences of one level run interleaved
    let mut active = vec![(lo, hi, 0usize, n)];
    while !active.is_empty() {
        let mut pending = Vec::with_capacity(active.len());
        for (a, b, ca, cb) in active.drain(..) {
            if ca == cb {
                continue;
            }
            let mid = 0.5 * (a + b);
            if b - a <= tol || mid <= a || mid >= b {
                out.extend(std::iter::repeat(mid).take(cb - ca));
            } else {
                pending.push((a, b, ca, cb));
            }
        }
        let mids: Vec<f64> = pending.iter().map(|(a, b, _, _)| 0.5 * (a + b)).collect();
        let counts = sturm_counts(diag, &off_sq, &mids);
        for ((a, b, ca, cb), (mid, cm)) in pending.into_iter().zip(mids.into_iter().zip(counts)) {
            active.push((a, mid, ca, cm));
            active.push((mid, b, cm, cb));
        }
    }
    out.sort_by(f64::total_cmp);
    out
}

const LANES: usize = 8;

/// [`sturm_count`] at several shifts, eight recurrences at a time.
pub fn sturm_counts(diag: &[f64], off_sq: &[f64], xs: &[f64]) -> Vec<usize> {
    let mut out = Vec::with_capacity(xs.len());
    for chunk in xs.chunks(LANES) {
        let mut x = [0.0; LANES];
        x[..chunk.len()].copy_from_slice(chunk);
        let mut count = [0usize; LANES];
        let mut q = [0.0; LANES];
        for l in 0..LANES {
            q[l] = diag[0] - x[l];
            if q[l].abs() < PIVOT_FLOOR {
                q[l] = -PIVOT_FLOOR;
            }
            count[l] += (q[l] < 0.0) as usize;
        }
        for i in 1..diag.len() {
            let (d, o) = (diag[i], off_sq[i - 1]);
            for l in 0..LANES {
                let mut v = d - x[l] - o / q[l];
                if v.abs() < PIVOT_FLOOR {
                    v = -PIVOT_FLOOR;
                }
                count[l] += (v < 0.0) as usize;
                q[l] = v;
            }
        }
        out.extend_from_slice(&count[..chunk.len()]);
    }
    out
}
