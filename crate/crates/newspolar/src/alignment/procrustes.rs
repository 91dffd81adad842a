//! Closed-form orthogonal Procrustes fit: the orthogonal matrix Q
//! minimizing ||XQ - Y||_F is U V^T where U S V^T is the singular value
//! decomposition of X^T Y.

use nalgebra::DMatrix;

use super::AlignmentTransform;
use crate::{Error, Result};

/// Minimum seed pairs for a fit.
pub const MIN_SEED_PAIRS: usize = 10;
/// Relative singular-value threshold below which the cross-covariance
/// counts as rank-deficient (the minimizer is then not unique).
const RANK_TOL: f64 = 1e-10;

/// Fit the transform from row-aligned seed matrices (n x dim each, rows
/// unit-normalized). Rank deficiency of X^T Y is reported as a warning
/// with diagnostics; the returned Q follows the SVD convention with each
/// U column's largest-magnitude entry made positive (V flipped in step,
/// so Q is unchanged where it is unique).
pub fn fit_procrustes(
    x: &[Vec<f64>],
    y: &[Vec<f64>],
) -> Result<(AlignmentTransform, Vec<String>)> {
    if x.len() != y.len() {
        return Err(Error::domain(format!(
            "seed matrices disagree: {} source rows vs {} target rows",
            x.len(),
            y.len()
        )));
    }
    let n = x.len();
    if n < MIN_SEED_PAIRS {
        return Err(Error::domain(format!(
            "{n} seed pairs is below the minimum of {MIN_SEED_PAIRS}"
        )));
    }
    let dim = x[0].len();
    if dim == 0 || x.iter().chain(y).any(|row| row.len() != dim) {
        return Err(Error::domain("seed rows must share one nonzero dimension"));
    }

    let mut warnings = Vec::new();
    if n < dim {
        warnings.push(format!(
            "only {n} seed pairs for dimension {dim}; the fit is underdetermined"
        ));
    }

    // M = X^T Y, dim x dim.
    let xm = DMatrix::from_fn(n, dim, |r, c| x[r][c]);
    let ym = DMatrix::from_fn(n, dim, |r, c| y[r][c]);
    let m = xm.transpose() * &ym;

    let svd = m.svd(true, true);
    let mut u = svd.u.expect("SVD with u requested");
    let mut v_t = svd.v_t.expect("SVD with v_t requested");

    let max_sv = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let rank = svd
        .singular_values
        .iter()
        .filter(|s| **s > RANK_TOL * max_sv.max(1e-300))
        .count();
    if rank < dim {
        warnings.push(format!(
            "cross-covariance is rank deficient ({rank} of {dim}); \
             the minimizer is not unique, returning the SVD-convention solution"
        ));
    }

    // Canonical signs: make each U column's max-magnitude entry positive
    // and flip the matching V^T row, leaving U S V^T and U V^T intact.
    for col in 0..dim {
        let mut best = 0usize;
        let mut best_abs = 0.0;
        for row in 0..dim {
            let a = u[(row, col)].abs();
            if a > best_abs {
                best_abs = a;
                best = row;
            }
        }
        if u[(best, col)] < 0.0 {
            for row in 0..dim {
                u[(row, col)] = -u[(row, col)];
                v_t[(col, row)] = -v_t[(col, row)];
            }
        }
    }

    let q = u * v_t;

    // Diagnostic: mean cosine between mapped sources and their targets.
    let mapped = xm * &q;
    let mut cos_sum = 0.0;
    for r in 0..n {
        let mut dot = 0.0;
        let mut na = 0.0;
        let mut nb = 0.0;
        for c in 0..dim {
            dot += mapped[(r, c)] * ym[(r, c)];
            na += mapped[(r, c)] * mapped[(r, c)];
            nb += ym[(r, c)] * ym[(r, c)];
        }
        if na > 0.0 && nb > 0.0 {
            cos_sum += dot / (na.sqrt() * nb.sqrt());
        }
    }

    Ok((
        AlignmentTransform {
            q,
            seed_pairs: n,
            mean_seed_cosine: cos_sum / n as f64,
        },
        warnings,
    ))
}

/// Seeded random orthogonal matrix from the QR decomposition of a random
/// square matrix, with the sign ambiguity fixed by making R's diagonal
/// non-negative. Used for planted-rotation fixtures and rotation
/// invariance checks.
pub fn random_orthogonal(dim: usize, seed: u64) -> DMatrix<f64> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(seed);
    let a = DMatrix::from_fn(dim, dim, |_, _| rng.gen_range(-1.0..1.0));
    let qr = a.qr();
    let mut q = qr.q();
    let r = qr.r();
    for c in 0..dim {
        if r[(c, c)] < 0.0 {
            for row in 0..dim {
                q[(row, c)] = -q[(row, c)];
            }
        }
    }
    q
}

/// Seeded unit-norm rows, for fixtures.
pub fn random_unit_rows(n: usize, dim: usize, seed: u64) -> Vec<Vec<f64>> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let mut row: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
            row.iter_mut().for_each(|v| *v /= norm);
            row
        })
        .collect()
}
