//! Independent oracles for the eigenvalue routines.

use nalgebra::{Complex, DMatrix};
use proptest::prelude::*;
use std::f64::consts::PI;

use tracelab::numerics::{geometric, tridiag_eigenvalues};
use tracelab::schrodinger::{band_spectrum, box_dimension, mixed_bc_eigenvalues, OperatorFamily, PeriodicTrace};

/// Eigenvalues of the period-`l` Bloch matrix with phase `theta` on the
/// wrap-around bond; `tr = 2 cos(theta)` at each of them.
fn bloch_eigenvalues(potential: &[f64], theta: f64) -> Vec<f64> {
    let l = potential.len();
    let mut h = DMatrix::<Complex<f64>>::zeros(l, l);
    for i in 0..l {
        h[(i, i)] = Complex::new(potential[i], 0.0);
        if i + 1 < l {
            h[(i, i + 1)] = Complex::new(1.0, 0.0);
            h[(i + 1, i)] = Complex::new(1.0, 0.0);
        }
    }
    let phase = Complex::from_polar(1.0, theta);
    h[(l - 1, 0)] += phase;
    h[(0, l - 1)] += phase.conj();
    let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[test]
fn mixed_roots_match_bloch_matrices() {
    for kappa in [0.0, 0.6, 1.0, 2.5] {
        let of = OperatorFamily::fibonacci(kappa);
        for n in [3u32, 5, 7] {
            for theta in [0.0, PI / 3.0, 1.1, PI] {
                let t = 2.0 * theta.cos();
                let roots = mixed_bc_eigenvalues(&of, n, t).unwrap();
                let potential = &of.potential()[..roots.period];
                let want = bloch_eigenvalues(potential, theta);
                let d = max_diff(&roots.roots, &want);
                assert!(d < 1e-8, "kappa {kappa} n {n} theta {theta}: {d}");
            }
        }
    }
}

#[test]
fn mixed_roots_outside_the_band_range_solve_the_trace_equation() {
    let of = OperatorFamily::fibonacci(1.0);
    let roots = mixed_bc_eigenvalues(&of, 8, 3.0).unwrap();
    let pt = PeriodicTrace::new(of.potential()[..roots.period].to_vec());
    assert!(!roots.roots.is_empty());
    for r in &roots.roots {
        let (tr, dtr) = pt.eval(*r);
        assert!((tr - 3.0).abs() < 1e-6 * dtr.abs().max(1.0), "{r}: {tr}");
    }
}

#[test]
fn tridiagonal_solver_matches_dense_solver() {
    let of = OperatorFamily::fibonacci(1.4);
    let l = 300;
    let pot = &of.potential()[7..7 + l];
    let fast = tridiag_eigenvalues(pot, &vec![1.0; l - 1]);
    let dense = DMatrix::<f64>::from_fn(l, l, |i, j| {
        if i == j {
            pot[i]
        } else if i.abs_diff(j) == 1 {
            1.0
        } else {
            0.0
        }
    });
    let mut want: Vec<f64> = dense.symmetric_eigenvalues().iter().copied().collect();
    want.sort_by(f64::total_cmp);
    assert!(max_diff(&fast, &want) < 1e-9);
}

#[test]
fn root_counts_match_sign_changes_off_the_band_range() {
    for kappa in [0.7, 1.0, 2.0] {
        let of = OperatorFamily::fibonacci(kappa);
        for n in [4u32, 6, 8] {
            for t in [-3.5, -2.2, 2.7, 6.0] {
                let roots = mixed_bc_eigenvalues(&of, n, t).unwrap();
                let pt = PeriodicTrace::new(of.potential()[..roots.period].to_vec());
                let b = kappa + 3.0;
                let steps = 400_000;
                let mut changes = Vec::new();
                let mut prev = pt.trace(-b) - t;
                for i in 1..=steps {
                    let e = -b + 2.0 * b * i as f64 / steps as f64;
                    let cur = pt.trace(e) - t;
                    if prev.signum() != cur.signum() {
                        changes.push(e);
                    }
                    prev = cur;
                }
                assert_eq!(roots.roots.len(), changes.len(), "kappa {kappa} n {n} t {t}");
                let h = 2.0 * b / steps as f64;
                for (r, c) in roots.roots.iter().zip(&changes) {
                    assert!(*c - h <= *r + 1e-12 && *r <= *c + 1e-12, "{r} vs {c}");
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn random_tridiagonal_matrices(
        diag in proptest::collection::vec(-3.0f64..3.0, 2..40),
        seed in proptest::collection::vec(0.05f64..2.0, 40),
    ) {
        let l = diag.len();
        let off = &seed[..l - 1];
        let fast = tridiag_eigenvalues(&diag, off);
        let dense = DMatrix::<f64>::from_fn(l, l, |i, j| {
            if i == j { diag[i] } else if i == j + 1 { off[j] } else if j == i + 1 { off[i] } else { 0.0 }
        });
        let mut want: Vec<f64> = dense.symmetric_eigenvalues().iter().copied().collect();
        want.sort_by(f64::total_cmp);
        prop_assert!(max_diff(&fast, &want) < 1e-9);
    }
}

#[test]
fn spectra_thin_out_with_coupling() {
    let eps = geometric(1e-4, 1e-2, 8);
    let dims: Vec<f64> = [0.5, 1.0, 2.0]
        .iter()
        .map(|&k| box_dimension(&band_spectrum(&OperatorFamily::fibonacci(k), 14).unwrap(), &eps).unwrap())
        .collect();
    println!("box dimensions {dims:?}");
    assert!(dims[0] > dims[1] && dims[1] > dims[2], "{dims:?}");
    assert!(dims.iter().all(|d| *d > 0.0 && *d < 1.0));
}
