//! Hermitian eigendecomposition by cyclic complex Jacobi rotations.
//!
//! Each (p, q) step factors the off-diagonal phase into the rotation, so the
//! 2×2 subproblem reduces to the classical real symmetric case. Quadratic
//! convergence makes ~10 sweeps typical at the dimensions the oracle uses;
//! a hard sweep cap plus an explicit `‖HV − VΛ‖` check guard against silent
//! garbage.

use num_complex::Complex64;
use thiserror::Error;

use super::cmatrix::CMatrix;

const MAX_SWEEPS: usize = 60;
/// Off-diagonal Frobenius mass, relative to ‖H‖_F, at which we stop.
const OFF_TOL: f64 = 1e-14;
/// Eigen-equation residual, relative to max(1, ‖H‖_F), we insist on.
const RESIDUAL_TOL: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum JacobiError {
    #[error("jacobi sweep limit hit at dim {dim}: off-diagonal mass {off:.3e} after {MAX_SWEEPS} sweeps")]
    NoConvergence { dim: usize, off: f64 },
    #[error("eigendecomposition residual {residual:.3e} exceeds tolerance at dim {dim}")]
    ResidualTooLarge { dim: usize, residual: f64 },
}

/// Eigenvalues (ascending) and a unitary of eigenvectors-as-columns, so that
/// `h ≈ V diag(λ) V*`. The input is symmetrized first; callers pass matrices
/// that are Hermitian up to rounding.
pub fn hermitian_eigen(h: &CMatrix) -> Result<(Vec<f64>, CMatrix), JacobiError> {
    let n = h.dim();
    let mut w = h.add(&h.adjoint()).scale(Complex64::new(0.5, 0.0));
    let mut v = CMatrix::identity(n);
    let scale = w.frobenius();
    if n == 0 || scale == 0.0 {
        return Ok((vec![0.0; n], v));
    }

    let mut converged = false;
    for _sweep in 0..MAX_SWEEPS {
        if off_diagonal_norm(&w) <= OFF_TOL * scale {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut w, &mut v, p, q, scale);
            }
        }
    }
    if !converged && off_diagonal_norm(&w) > OFF_TOL * scale {
        return Err(JacobiError::NoConvergence {
            dim: n,
            off: off_diagonal_norm(&w),
        });
    }

    // Sort ascending, permuting eigenvector columns alongside.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| w.at(i, i).re.total_cmp(&w.at(j, j).re));
    let values: Vec<f64> = order.iter().map(|&i| w.at(i, i).re).collect();
    let vectors = CMatrix::from_fn(n, |i, j| v.at(i, order[j]));

    // H V = V Λ, checked against the *original* input.
    let lambda = CMatrix::diag(&values);
    let residual = h.mul(&vectors).sub(&vectors.mul(&lambda)).frobenius();
    if residual > RESIDUAL_TOL * scale.max(1.0) {
        return Err(JacobiError::ResidualTooLarge { dim: n, residual });
    }
    Ok((values, vectors))
}

fn off_diagonal_norm(w: &CMatrix) -> f64 {
    let n = w.dim();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += w.at(i, j).norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// One complex Jacobi rotation annihilating w[p][q], accumulated into v.
fn rotate(w: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize, scale: f64) {
    let b = w.at(p, q);
    let beta = b.norm();
    if beta <= 1e-18 * scale {
        return;
    }
    // Phase factor turns the 2×2 block real; then a classical rotation.
    let phase = b / beta;
    let a = w.at(p, p).re;
    let d = w.at(q, q).re;
    let tau = (d - a) / (2.0 * beta);
    let t = if tau == 0.0 {
        1.0
    } else {
        tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    let n = w.dim();
    let cphase = phase.conj();
    // W ← W G: columns p and q mix (G[q][p] = −s·conj(phase), G[q][q] = c·conj(phase)).
    for r in 0..n {
        let x = w.at(r, p);
        let y = w.at(r, q);
        w.set(r, p, x * c - y * cphase * s);
        w.set(r, q, x * s + y * cphase * c);
    }
    // W ← G* W: rows p and q mix with the conjugated coefficients.
    for col in 0..n {
        let x = w.at(p, col);
        let y = w.at(q, col);
        w.set(p, col, x * c - y * phase * s);
        w.set(q, col, x * s + y * phase * c);
    }
    // The rotated diagonal entries are real by construction; drop the dust.
    let dp = w.at(p, p);
    let dq = w.at(q, q);
    w.set(p, p, Complex64::new(dp.re, 0.0));
    w.set(q, q, Complex64::new(dq.re, 0.0));
    // V ← V G.
    for r in 0..n {
        let x = v.at(r, p);
        let y = v.at(r, q);
        v.set(r, p, x * c - y * cphase * s);
        v.set(r, q, x * s + y * cphase * c);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::cmatrix::vdot;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn diagonal_matrix_is_a_fixed_point() {
        let h = CMatrix::diag(&[3.0, 1.0, 2.0]);
        let (vals, vecs) = hermitian_eigen(&h).unwrap();
        assert_eq!(vals, vec![1.0, 2.0, 3.0]);
        // Eigenvectors are the permuted coordinate basis, no rotation noise.
        assert!((vecs.at(0, 2).re - 1.0).abs() < 1e-15);
        assert!((vecs.at(1, 0).re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn two_by_two_hermitian_hand_check() {
        // [[2, i], [-i, 2]] has eigenvalues 1 and 3.
        let mut h = CMatrix::zeros(2);
        h.set(0, 0, c(2.0, 0.0));
        h.set(0, 1, c(0.0, 1.0));
        h.set(1, 0, c(0.0, -1.0));
        h.set(1, 1, c(2.0, 0.0));
        let (vals, vecs) = hermitian_eigen(&h).unwrap();
        assert!((vals[0] - 1.0).abs() < 1e-12);
        assert!((vals[1] - 3.0).abs() < 1e-12);
        // Columns are orthonormal.
        let c0 = vecs.column(0);
        let c1 = vecs.column(1);
        assert!(vdot(&c0, &c1).norm() < 1e-12);
        assert!((vdot(&c0, &c0).re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reconstructs_random_hermitian() {
        // Deterministic pseudo-random Hermitian via a simple LCG.
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let n = 12;
        let mut h = CMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                let z = if i == j {
                    c(next(), 0.0)
                } else {
                    c(next(), next())
                };
                h.set(i, j, z);
                h.set(j, i, z.conj());
            }
        }
        let (vals, vecs) = hermitian_eigen(&h).unwrap();
        // V Λ V* reproduces H.
        let lambda = CMatrix::diag(&vals);
        let rebuilt = vecs.mul(&lambda).mul(&vecs.adjoint());
        assert!(rebuilt.sub(&h).frobenius() < 1e-10 * h.frobenius().max(1.0));
        // V unitary.
        let gram = vecs.adjoint().mul(&vecs);
        assert!(gram.sub(&CMatrix::identity(n)).frobenius() < 1e-10);
        // Ascending order.
        for k in 1..n {
            assert!(vals[k] >= vals[k - 1]);
        }
    }

    #[test]
    fn repeated_eigenvalues_are_harmless() {
        // 2·I ⊕ a rank-one bump: eigenvalues {2, 2, 5}.
        let mut h = CMatrix::identity(3).scale(c(2.0, 0.0));
        h.set(2, 2, c(5.0, 0.0));
        let (vals, _) = hermitian_eigen(&h).unwrap();
        assert!((vals[0] - 2.0).abs() < 1e-12);
        assert!((vals[1] - 2.0).abs() < 1e-12);
        assert!((vals[2] - 5.0).abs() < 1e-12);
    }

    #[test]
    fn zero_matrix() {
        let (vals, vecs) = hermitian_eigen(&CMatrix::zeros(4)).unwrap();
        assert_eq!(vals, vec![0.0; 4]);
        assert_eq!(vecs, CMatrix::identity(4));
    }
}
