//! Dense complex eigenvalues by Hessenberg reduction and shifted QR.

use super::cmatrix::CMatrix;
use crate::cx::{c64, C64};
use crate::error::{Error, Result};

/// Householder reduction to upper Hessenberg form (in place, similarity).
fn hessenberg_in_place(a: &mut CMatrix) {
    let n = a.n;
    for col in 0..n.saturating_sub(2) {
        // build reflector for the column below the subdiagonal
        let mut norm_sq = 0.0;
        for r in col + 1..n {
            norm_sq += a[(r, col)].norm_sqr();
        }
        let x0 = a[(col + 1, col)];
        let below_sq = norm_sq - x0.norm_sqr();
        if below_sq <= f64::EPSILON * f64::EPSILON * norm_sq.max(1e-300) {
            continue;
        }
        let alpha = if x0.norm() > 0.0 {
            -(x0 / x0.norm()) * norm_sq.sqrt()
        } else {
            c64(-norm_sq.sqrt(), 0.0)
        };
        // v = x - alpha e1, H = I - 2 v v^H / |v|^2
        let mut v: Vec<C64> = (col + 1..n).map(|r| a[(r, col)]).collect();
        v[0] -= alpha;
        let vn_sq: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vn_sq <= 0.0 {
            continue;
        }
        // A <- H A (rows col+1..n)
        for j in col..n {
            let mut dot = C64::from(0.0);
            for (idx, r) in (col + 1..n).enumerate() {
                dot += v[idx].conj() * a[(r, j)];
            }
            let f = dot * (2.0 / vn_sq);
            for (idx, r) in (col + 1..n).enumerate() {
                let d = f * v[idx];
                a[(r, j)] -= d;
            }
        }
        // A <- A H (columns col+1..n)
        for i in 0..n {
            let mut dot = C64::from(0.0);
            for (idx, cidx) in (col + 1..n).enumerate() {
                dot += a[(i, cidx)] * v[idx];
            }
            let f = dot * (2.0 / vn_sq);
            for (idx, cidx) in (col + 1..n).enumerate() {
                let d = f * v[idx].conj();
                a[(i, cidx)] -= d;
            }
        }
        for r in col + 2..n {
            a[(r, col)] = C64::from(0.0);
        }
        a[(col + 1, col)] = alpha;
    }
}

fn wilkinson_shift(h: &CMatrix, hi: usize) -> C64 {
    let a = h[(hi - 1, hi - 1)];
    let b = h[(hi - 1, hi)];
    let c = h[(hi, hi - 1)];
    let d = h[(hi, hi)];
    let tr = a + d;
    let det = a * d - b * c;
    let disc = (tr * tr * 0.25 - det).sqrt();
    let e1 = tr * 0.5 + disc;
    let e2 = tr * 0.5 - disc;
    if (e1 - d).norm() <= (e2 - d).norm() {
        e1
    } else {
        e2
    }
}

/// Eigenvalues of a general complex matrix. Single-shift QR with Wilkinson
/// shifts and occasional exceptional shifts; Hessenberg form is preserved by
/// working with Givens rotations.
pub fn eigenvalues(mut a: CMatrix) -> Result<Vec<C64>> {
    assert_eq!(a.n, a.m);
    let n = a.n;
    if n == 0 {
        return Ok(Vec::new());
    }
    hessenberg_in_place(&mut a);
    let h = &mut a;
    let mut eigs = vec![C64::from(0.0); n];
    let mut hi = n - 1;
    let mut iter_since_deflate = 0usize;
    let mut total_iters = 0usize;
    let max_total = 60 * n.max(4);
    loop {
        // deflate trailing 1x1 blocks
        loop {
            if hi == 0 {
                eigs[0] = h[(0, 0)];
                return Ok(eigs);
            }
            let sub = h[(hi, hi - 1)].norm();
            let scale = h[(hi - 1, hi - 1)].norm() + h[(hi, hi)].norm();
            if sub <= f64::EPSILON * scale.max(1e-300) {
                eigs[hi] = h[(hi, hi)];
                hi -= 1;
                iter_since_deflate = 0;
            } else {
                break;
            }
        }
        // active block lo..=hi
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let scale = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            if sub <= f64::EPSILON * scale.max(1e-300) {
                break;
            }
            lo -= 1;
        }
        if hi - lo == 1 {
            // solve the 2x2 block directly
            let (p, q) = (lo, hi);
            let tr = h[(p, p)] + h[(q, q)];
            let det = h[(p, p)] * h[(q, q)] - h[(p, q)] * h[(q, p)];
            let disc = (tr * tr * 0.25 - det).sqrt();
            eigs[p] = tr * 0.5 + disc;
            eigs[q] = tr * 0.5 - disc;
            if hi == 1 {
                return Ok(eigs);
            }
            hi = lo - 1;
            iter_since_deflate = 0;
            continue;
        }
        total_iters += 1;
        iter_since_deflate += 1;
        if total_iters > max_total {
            return Err(Error::NoConvergence(format!(
                "QR iteration exceeded {max_total} sweeps on dim {n}"
            )));
        }
        let mut mu = wilkinson_shift(h, hi);
        if iter_since_deflate % 12 == 0 {
            // exceptional shift breaks rare cycling
            mu = h[(hi, hi)] + C64::from(0.75 * h[(hi, hi - 1)].norm());
        }
        // explicit single-shift QR sweep on lo..=hi via Givens rotations:
        // H - mu I = Q R, then H <- R Q + mu I
        let mut rots: Vec<(C64, C64)> = Vec::with_capacity(hi - lo);
        for i in lo..=hi {
            h[(i, i)] -= mu;
        }
        for i in lo..hi {
            let x = h[(i, i)];
            let y = h[(i + 1, i)];
            let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
            if r == 0.0 {
                rots.push((C64::from(1.0), C64::from(0.0)));
                continue;
            }
            // [cu su; -conj(su) conj(cu)] maps (x, y) to (r, 0)
            let cu = x.conj() / r;
            let su = y.conj() / r;
            for j in i..=hi {
                let u = h[(i, j)];
                let w = h[(i + 1, j)];
                h[(i, j)] = cu * u + su * w;
                h[(i + 1, j)] = -su.conj() * u + cu.conj() * w;
            }
            rots.push((cu, su));
        }
        // RQ: apply the adjoint rotations on columns i, i+1
        for (idx, i) in (lo..hi).enumerate() {
            let (cu, su) = rots[idx];
            for r in lo..=(i + 1).min(hi) {
                let u = h[(r, i)];
                let w = h[(r, i + 1)];
                h[(r, i)] = u * cu.conj() + w * su.conj();
                h[(r, i + 1)] = -u * su + w * cu;
            }
        }
        for i in lo..=hi {
            h[(i, i)] += mu;
        }
    }
}
