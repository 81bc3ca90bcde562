//! Power iteration on A^H A for operator 2-norms.

use crate::cx::{c64, C64};

fn norm2(v: &[C64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest singular value of the operator given by `apply` / `apply_adj`.
/// Deterministic start vector; stops on relative stagnation below `tol` or
/// after `max_iters` sweeps.
pub fn operator_norm<F, G>(dim: usize, apply: F, apply_adj: G, max_iters: usize, tol: f64) -> f64
where
    F: Fn(&[C64]) -> Vec<C64>,
    G: Fn(&[C64]) -> Vec<C64>,
{
    if dim == 0 {
        return 0.0;
    }
    // fixed pseudo-random start, deterministic across runs and thread counts
    let mut v: Vec<C64> = (0..dim)
        .map(|i| {
            let t = (i as f64 + 1.0) * 0.7391;
            c64(t.sin() + 0.25, t.cos() * 0.5 + 0.1)
        })
        .collect();
    let nv = norm2(&v);
    for c in v.iter_mut() {
        *c /= nv;
    }
    let mut est = 0.0f64;
    for _ in 0..max_iters {
        let w = apply(&v);
        let nw = norm2(&w);
        if nw == 0.0 {
            return 0.0;
        }
        let mut u = apply_adj(&w);
        let nu = norm2(&u);
        if nu == 0.0 {
            return nw;
        }
        for c in u.iter_mut() {
            *c /= nu;
        }
        v = u;
        let new_est = nw;
        if est > 0.0 && (new_est - est).abs() <= tol * est {
            return new_est.max(est);
        }
        est = new_est;
    }
    est
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::cmatrix::CMatrix;
    use rand::{Rng, SeedableRng};

    #[test]
    fn matches_diagonal_norm() {
        let d = [3.0, -7.5, 2.0, 0.5];
        let apply = |v: &[C64]| -> Vec<C64> {
            v.iter().zip(&d).map(|(x, s)| x * C64::from(*s)).collect()
        };
        let n = operator_norm(4, apply, apply, 500, 1e-12);
        assert!((n - 7.5).abs() < 1e-9);
    }

    #[test]
    fn matches_gram_eigenvalue_for_random_matrix() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let n = 12;
        let mut a = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                a[(i, j)] = c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
        }
        let est = operator_norm(n, |v| a.matvec(v), |v| a.matvec_adj(v), 2000, 1e-13);
        // oracle: largest eigenvalue of A^H A through the QR eigensolver
        let gram = a.adjoint().matmul(&a);
        let eigs = crate::linalg::eig::eigenvalues(gram).unwrap();
        let lmax = eigs.iter().map(|z| z.re).fold(0.0f64, f64::max);
        assert!((est - lmax.sqrt()).abs() < 1e-7 * lmax.sqrt(), "{est} vs {}", lmax.sqrt());
    }
}
