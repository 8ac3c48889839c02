//! Small linear-algebra kernel: closed-form tridiagonal inverses, dominant
//! eigenpairs by power iteration and scalar bisection.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Tridiagonal matrix with diagonal `a_1..a_n`, superdiagonal `b_1..b_{n-1}`
/// and subdiagonal `c_1..c_{n-1}`. All superdiagonal entries must be nonzero.
#[derive(Clone, Debug)]
pub struct Tridiagonal {
    diag: Vec<f64>,
    sup: Vec<f64>,
    sub: Vec<f64>,
}

impl Tridiagonal {
    pub fn new(diag: Vec<f64>, sup: Vec<f64>, sub: Vec<f64>) -> Result<Self> {
        let n = diag.len();
        if n < 2 {
            return Err(Error::InvalidParameter(
                "tridiagonal matrix needs dimension >= 2".into(),
            ));
        }
        if sup.len() != n - 1 || sub.len() != n - 1 {
            return Err(Error::DimensionMismatch {
                expected: n - 1,
                got: sup.len().max(sub.len()),
            });
        }
        if let Some(j) = sup.iter().position(|&b| b == 0.0) {
            return Err(Error::InvalidParameter(format!(
                "superdiagonal entry {j} is zero"
            )));
        }
        Ok(Self { diag, sup, sub })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn to_dense(&self) -> Matrix {
        let n = self.dim();
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = self.diag[i];
            if i + 1 < n {
                m[(i, i + 1)] = self.sup[i];
                m[(i + 1, i)] = self.sub[i];
            }
        }
        m
    }

    /// The two pivot recursions of the closed-form inverse. `dd[t]` sweeps
    /// bottom-up, `del[t]` top-down; a vanishing pivot means the leading or
    /// trailing principal part is singular.
    fn pivot_recursions(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        let n = self.dim();
        let mut dd = vec![0.0; n];
        dd[n - 1] = self.diag[n - 1];
        for t in (1..n).rev() {
            if dd[t] == 0.0 {
                return Err(Error::SingularPivot {
                    index: t,
                    context: "tridiagonal d-recursion",
                });
            }
            dd[t - 1] = self.diag[t - 1] - self.sup[t - 1] * self.sub[t - 1] / dd[t];
        }
        let mut del = vec![0.0; n];
        del[0] = self.diag[0];
        for t in 0..n - 1 {
            if del[t] == 0.0 {
                return Err(Error::SingularPivot {
                    index: t,
                    context: "tridiagonal delta-recursion",
                });
            }
            del[t + 1] = self.diag[t + 1] - self.sup[t] * self.sub[t] / del[t];
        }
        if del[n - 1] == 0.0 {
            return Err(Error::SingularPivot {
                index: n - 1,
                context: "tridiagonal delta-recursion",
            });
        }
        Ok((dd, del))
    }

    /// Single entry `(T^{-1})_{ij}` (0-based) from the closed-form product
    /// formula. Products of pivots are folded as ratios so that long
    /// diagonals neither overflow nor underflow.
    pub fn inverse_entry(&self, i: usize, j: usize) -> Result<f64> {
        let n = self.dim();
        assert!(i < n && j < n, "index out of range");
        let (dd, del) = self.pivot_recursions()?;
        // suffix[t] = prod_{s >= t} dd[s] / del[s]
        let suffix = |t: usize| -> f64 { (t..n).map(|s| dd[s] / del[s]).product() };
        if i <= j {
            let band: f64 = (i..j).map(|t| self.sup[t] / del[t]).product();
            Ok(sign(i + j) * band * suffix(j + 1) / del[j])
        } else {
            let band: f64 = (j..i).map(|t| self.sub[t] / del[t]).product();
            Ok(sign(i + j) * band * suffix(i + 1) / del[i])
        }
    }

    /// Full inverse; the pivot recursions are computed once and each row and
    /// column is extended from the diagonal by single-factor updates.
    pub fn inverse(&self) -> Result<Matrix> {
        let n = self.dim();
        let (dd, del) = self.pivot_recursions()?;
        let mut suffix = vec![1.0; n + 1];
        for t in (0..n).rev() {
            suffix[t] = suffix[t + 1] * dd[t] / del[t];
        }
        let mut inv = Matrix::zeros(n, n);
        for i in 0..n {
            inv[(i, i)] = suffix[i + 1] / del[i];
        }
        for i in 0..n {
            for j in i + 1..n {
                inv[(i, j)] = -inv[(i, j - 1)] * self.sup[j - 1] / dd[j];
            }
        }
        for j in 0..n {
            for i in j + 1..n {
                inv[(i, j)] = -inv[(i - 1, j)] * self.sub[i - 1] / dd[i];
            }
        }
        Ok(inv)
    }
}

fn sign(parity: usize) -> f64 {
    if parity.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Dominant eigenpair as returned by [`dominant_eigenpair`].
#[derive(Clone, Debug)]
pub struct EigenPair {
    pub value: f64,
    /// Eigenvector scaled so its entry of largest magnitude is `+1`.
    pub vector: Vec<f64>,
    pub iterations: usize,
    /// `‖M v - λ v‖_∞` at termination.
    pub residual: f64,
}

/// Power iteration for the eigenvalue of largest modulus, run on the
/// two-dimensional block spanned by the all-ones vector and one fixed-seed
/// random vector. The ones vector lies in the interior of the positive
/// orthant, so positive matrices converge unconditionally; the random
/// companion covers dominant eigenspaces the ones vector misses exactly
/// (sign-alternating eigenvectors sum to zero against it). The eigenvalue
/// estimate is the dominant Ritz value of the projected 2x2 quotient, the
/// two-dimensional version of `(v·Mv)/(v·v)`, so negative dominant
/// eigenvalues stay representable and near-degenerate leading pairs are
/// separated without waiting out their gap.
///
/// Converged means successive estimates differ by less than `tol` and the
/// Ritz pair satisfies `‖Mv - λv‖_∞ <= tol·‖M‖_∞`. A leading pair of equal
/// modulus but distinct value (a ±tie or a complex pair) never satisfies the
/// exit test and is reported as non-convergence carrying the last estimate.
pub fn dominant_eigenpair(m: &Matrix, tol: f64, max_iter: usize) -> Result<EigenPair> {
    assert!(m.is_square(), "eigenproblem needs a square matrix");
    let n = m.rows();
    if n == 0 || tol <= 0.0 {
        return Err(Error::InvalidParameter(
            "need a nonempty matrix and tol > 0".into(),
        ));
    }
    let norm = m.inf_norm();
    if norm == 0.0 {
        // Zero matrix: λ = 0 with the start vector itself.
        return Ok(EigenPair {
            value: 0.0,
            vector: vec![1.0; n],
            iterations: 0,
            residual: 0.0,
        });
    }
    if n == 1 {
        return Ok(EigenPair {
            value: m[(0, 0)],
            vector: vec![1.0],
            iterations: 1,
            residual: 0.0,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0x4b72_656e);
    let ones = vec![1.0; n];
    let random: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut basis = orthonormal_pair(ones, random, &mut rng);

    let mut prev = f64::NAN;
    let mut last = f64::NAN;
    for iterations in 1..=max_iter {
        let images = [m.matvec(&basis[0]), m.matvec(&basis[1])];
        let quotient = [
            [dot(&basis[0], &images[0]), dot(&basis[0], &images[1])],
            [dot(&basis[1], &images[0]), dot(&basis[1], &images[1])],
        ];
        if let Some((lambda, secondary, weights)) = dominant_ritz(quotient) {
            last = lambda;
            // A second eigenvalue of the same modulus but different value
            // means there is no simple dominant eigenvalue to report.
            let tied = secondary.abs() >= lambda.abs() * (1.0 - 10.0 * tol)
                && (lambda - secondary).abs() > 10.0 * tol * lambda.abs();
            if !tied && (lambda - prev).abs() < tol {
                let raw: Vec<f64> = (0..n)
                    .map(|i| weights[0] * basis[0][i] + weights[1] * basis[1][i])
                    .collect();
                let image: Vec<f64> = (0..n)
                    .map(|i| weights[0] * images[0][i] + weights[1] * images[1][i])
                    .collect();
                let peak = peak_entry(&raw);
                if peak.abs() > f64::MIN_POSITIVE * n as f64 {
                    let vector: Vec<f64> = raw.iter().map(|x| x / peak).collect();
                    let residual = image
                        .iter()
                        .zip(&raw)
                        .map(|(mv, x)| (mv / peak - lambda * x / peak).abs())
                        .fold(0.0, f64::max);
                    if residual <= tol * norm {
                        return Ok(EigenPair {
                            value: lambda,
                            vector,
                            iterations,
                            residual,
                        });
                    }
                }
            }
            prev = lambda;
        } else {
            // complex leading pair of the projected quotient this step
            prev = f64::NAN;
        }
        let [y0, y1] = images;
        basis = orthonormal_pair(y0, y1, &mut rng);
    }
    Err(Error::NoConvergence {
        iterations: max_iter,
        last_estimate: last,
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Orthonormalizes two vectors by Gram-Schmidt; directions that collapse
/// (annihilated or parallel images) are replaced by fresh draws from the
/// deterministic generator.
fn orthonormal_pair(first: Vec<f64>, second: Vec<f64>, rng: &mut ChaCha8Rng) -> [Vec<f64>; 2] {
    let n = first.len();
    let fresh =
        |rng: &mut ChaCha8Rng| -> Vec<f64> { (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect() };
    let mut q0 = first;
    loop {
        let norm = dot(&q0, &q0).sqrt();
        if norm > f64::MIN_POSITIVE * n as f64 {
            q0.iter_mut().for_each(|x| *x /= norm);
            break;
        }
        q0 = fresh(rng);
    }
    let mut q1 = second;
    loop {
        let mut candidate = q1.clone();
        // projected twice: a single Gram-Schmidt pass leaks for nearly
        // parallel pairs
        for _ in 0..2 {
            let along = dot(&q0, &candidate);
            candidate
                .iter_mut()
                .zip(&q0)
                .for_each(|(y, q)| *y -= along * q);
        }
        let norm = dot(&candidate, &candidate).sqrt();
        let scale = dot(&q1, &q1).sqrt().max(1.0);
        if norm > 1e-14 * scale {
            candidate.iter_mut().for_each(|x| *x /= norm);
            return [q0, candidate];
        }
        q1 = fresh(rng);
    }
}

/// Real eigenvalues of the projected 2x2 quotient, largest modulus first,
/// with the coordinates of the dominant eigenvector in the block basis.
/// Returns `None` while the projected pair is complex.
fn dominant_ritz(b: [[f64; 2]; 2]) -> Option<(f64, f64, [f64; 2])> {
    let tr = b[0][0] + b[1][1];
    let det = b[0][0] * b[1][1] - b[0][1] * b[1][0];
    let disc = 0.25 * tr * tr - det;
    if disc < 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    let (lambda, secondary) = if (0.5 * tr + sq).abs() >= (0.5 * tr - sq).abs() {
        (0.5 * tr + sq, 0.5 * tr - sq)
    } else {
        (0.5 * tr - sq, 0.5 * tr + sq)
    };
    // (B - λI) w = 0 from whichever row is better conditioned.
    let row0 = [b[0][1], lambda - b[0][0]];
    let row1 = [lambda - b[1][1], b[1][0]];
    let n0 = row0[0].abs() + row0[1].abs();
    let n1 = row1[0].abs() + row1[1].abs();
    let weights = if n0 == 0.0 && n1 == 0.0 {
        [1.0, 0.0] // quotient is λ·I: every direction works
    } else if n0 >= n1 {
        row0
    } else {
        row1
    };
    Some((lambda, secondary, weights))
}

/// Signed entry of largest magnitude.
fn peak_entry(v: &[f64]) -> f64 {
    v.iter()
        .copied()
        .max_by(|a, b| a.abs().total_cmp(&b.abs()))
        .unwrap_or(0.0)
}

/// Bisection for a root of `f` on `[lo, hi]`; the bracket must change sign.
/// Returns the midpoint of a bracket of width at most `tol`.
pub fn bisection_root(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    if !(lo < hi) || tol <= 0.0 {
        return Err(Error::InvalidParameter(
            "bisection needs lo < hi and tol > 0".into(),
        ));
    }
    let mut lo = lo;
    let mut hi = hi;
    let mut f_lo = f(lo);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    let f_hi = f(hi);
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::NoSignChange { lo, hi });
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break; // bracket at floating-point resolution
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
