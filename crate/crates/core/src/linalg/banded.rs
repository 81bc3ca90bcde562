//! Cyclic (periodic) tridiagonal systems via a fold reordering.
//!
//! The ring `0, 1, ..., n-1` is reordered as `0, n-1, 1, n-2, ...`, which
//! turns corner-coupled tridiagonal matrices into band matrices of bandwidth
//! two. A general banded LU with partial pivoting then factors them stably
//! in O(n); this avoids the conditioning hazard of Woodbury corrections when
//! the open-chain part happens to be near-singular.

use crate::cx::C64;
use crate::error::{Error, Result};

/// Banded LU with partial pivoting; LAPACK-style storage with `kl` extra
/// fill rows on top for pivoting.
struct BandedLu {
    n: usize,
    kl: usize,
    ku: usize,
    /// rows = 2*kl + ku + 1, column-major band storage:
    /// ab[kl + ku + i - j][j] = A[i][j]
    ab: Vec<C64>,
    rows: usize,
    piv: Vec<usize>,
}

impl BandedLu {
    fn idx(&self, r: usize, c: usize) -> usize {
        c * self.rows + r
    }

    fn factor(n: usize, kl: usize, ku: usize, entries: &[(usize, usize, C64)]) -> Result<Self> {
        let rows = 2 * kl + ku + 1;
        let mut me = BandedLu { n, kl, ku, ab: vec![C64::from(0.0); rows * n], rows, piv: vec![0; n] };
        for &(i, j, v) in entries {
            debug_assert!(j + kl >= i && i + ku >= j, "entry ({i},{j}) outside band");
            let r = kl + ku + i - j;
            let id = me.idx(r, j);
            me.ab[id] += v;
        }
        // gbtrf-style elimination
        let ku_eff = kl + ku; // fill-in widened upper bandwidth
        for col in 0..n {
            // pivot search within the kl subdiagonals
            let pmax = (col + kl).min(n - 1);
            let mut best = col;
            let mut bestv = me.band_get(col, col, ku_eff).norm();
            for r in col + 1..=pmax {
                let v = me.band_get(r, col, ku_eff).norm();
                if v > bestv {
                    bestv = v;
                    best = r;
                }
            }
            if !(bestv > 0.0) || !bestv.is_finite() {
                return Err(Error::SingularFactorization(format!(
                    "zero pivot at column {col} of banded LU"
                )));
            }
            me.piv[col] = best;
            if best != col {
                // swap rows col and best within their shared band columns
                let jmax = (col + ku_eff).min(n - 1);
                for j in col..=jmax {
                    let a = me.band_get(col, j, ku_eff);
                    let b = me.band_get(best, j, ku_eff);
                    me.band_set(col, j, b, ku_eff);
                    me.band_set(best, j, a, ku_eff);
                }
            }
            let d = me.band_get(col, col, ku_eff);
            for r in col + 1..=pmax {
                let f = me.band_get(r, col, ku_eff) / d;
                me.band_set(r, col, f, ku_eff);
                if f != C64::from(0.0) {
                    let jmax = (col + ku_eff).min(n - 1);
                    for j in col + 1..=jmax {
                        let v = me.band_get(r, j, ku_eff) - f * me.band_get(col, j, ku_eff);
                        me.band_set(r, j, v, ku_eff);
                    }
                }
            }
        }
        Ok(me)
    }

    fn band_get(&self, i: usize, j: usize, ku_eff: usize) -> C64 {
        if j > i + ku_eff || i > j + self.kl {
            return C64::from(0.0);
        }
        self.ab[self.idx(self.kl + self.ku + i - j, j)]
    }

    fn band_set(&mut self, i: usize, j: usize, v: C64, _ku_eff: usize) {
        let id = self.idx(self.kl + self.ku + i - j, j);
        self.ab[id] = v;
    }

    fn solve_in_place(&self, x: &mut [C64]) {
        let n = self.n;
        let ku_eff = self.kl + self.ku;
        for col in 0..n {
            let p = self.piv[col];
            if p != col {
                x.swap(col, p);
            }
            let pmax = (col + self.kl).min(n - 1);
            for r in col + 1..=pmax {
                let f = self.band_get(r, col, ku_eff);
                let d = f * x[col];
                x[r] -= d;
            }
        }
        for col in (0..n).rev() {
            let jmax = (col + ku_eff).min(n - 1);
            let mut acc = x[col];
            for j in col + 1..=jmax {
                acc -= self.band_get(col, j, ku_eff) * x[j];
            }
            x[col] = acc / self.band_get(col, col, ku_eff);
        }
    }
}

/// Periodic tridiagonal operator `sub, diag_i, sup` with wraparound corners
/// `A[0, n-1] = sub` and `A[n-1, 0] = sup` (the usual FD ring layout), with
/// factorizations of itself and its adjoint.
pub struct CyclicTridiag {
    n: usize,
    fold: Vec<usize>,
    lu: BandedLu,
    lu_adj: BandedLu,
}

impl CyclicTridiag {
    /// `diag` has length n; all sub/super diagonal couplings equal the given
    /// scalars, including the periodic corners.
    pub fn new(diag: &[C64], sub: C64, sup: C64) -> Result<Self> {
        let n = diag.len();
        assert!(n >= 4);
        // fold permutation: new position p of old index i
        let mut fold = vec![0usize; n];
        for j in 0..n {
            let old = if j % 2 == 0 { j / 2 } else { n - 1 - j / 2 };
            fold[old] = j;
        }
        let ring =
            |i: usize, j: usize| -> bool { (i + 1) % n == j };
        let mut entries = Vec::with_capacity(3 * n);
        let mut entries_adj = Vec::with_capacity(3 * n);
        for i in 0..n {
            entries.push((fold[i], fold[i], diag[i]));
            entries_adj.push((fold[i], fold[i], diag[i].conj()));
            let j = (i + 1) % n;
            debug_assert!(ring(i, j));
            // A[i][j] = sup on the ring (including corner), A[j][i] = sub
            entries.push((fold[i], fold[j], sup));
            entries.push((fold[j], fold[i], sub));
            entries_adj.push((fold[j], fold[i], sup.conj()));
            entries_adj.push((fold[i], fold[j], sub.conj()));
        }
        let lu = BandedLu::factor(n, 2, 2, &entries)?;
        let lu_adj = BandedLu::factor(n, 2, 2, &entries_adj)?;
        Ok(CyclicTridiag { n, fold, lu, lu_adj })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    fn permute(&self, b: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::from(0.0); self.n];
        for i in 0..self.n {
            out[self.fold[i]] = b[i];
        }
        out
    }

    fn unpermute(&self, x: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::from(0.0); self.n];
        for i in 0..self.n {
            out[i] = x[self.fold[i]];
        }
        out
    }

    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        let mut x = self.permute(b);
        self.lu.solve_in_place(&mut x);
        self.unpermute(&x)
    }

    /// solves A^H x = b
    pub fn solve_adjoint(&self, b: &[C64]) -> Vec<C64> {
        let mut x = self.permute(b);
        self.lu_adj.solve_in_place(&mut x);
        self.unpermute(&x)
    }
}
