//! Dense complex matrices with LU factorization (partial pivoting).

use crate::cx::C64;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    pub n: usize,
    pub m: usize,
    /// row-major
    pub data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(n: usize, m: usize) -> Self {
        CMatrix { n, m, data: vec![C64::from(0.0); n * m] }
    }

    pub fn identity(n: usize) -> Self {
        let mut a = Self::zeros(n, n);
        for i in 0..n {
            a[(i, i)] = C64::from(1.0);
        }
        a
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Self {
        let n = rows.len();
        let m = rows[0].len();
        let mut data = Vec::with_capacity(n * m);
        for r in rows {
            assert_eq!(r.len(), m);
            data.extend_from_slice(r);
        }
        CMatrix { n, m, data }
    }

    pub fn matmul(&self, o: &CMatrix) -> CMatrix {
        assert_eq!(self.m, o.n);
        let mut out = CMatrix::zeros(self.n, o.m);
        for i in 0..self.n {
            for k in 0..self.m {
                let aik = self[(i, k)];
                if aik == C64::from(0.0) {
                    continue;
                }
                for j in 0..o.m {
                    out[(i, j)] += aik * o[(k, j)];
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.m, v.len());
        (0..self.n)
            .map(|i| {
                let mut acc = C64::from(0.0);
                for j in 0..self.m {
                    acc += self[(i, j)] * v[j];
                }
                acc
            })
            .collect()
    }

    /// conj-transpose matvec
    pub fn matvec_adj(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.n, v.len());
        let mut out = vec![C64::from(0.0); self.m];
        for i in 0..self.n {
            let vi = v[i];
            for j in 0..self.m {
                out[j] += self[(i, j)].conj() * vi;
            }
        }
        out
    }

    pub fn sub(&self, o: &CMatrix) -> CMatrix {
        assert_eq!((self.n, self.m), (o.n, o.m));
        let data = self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect();
        CMatrix { n: self.n, m: self.m, data }
    }

    pub fn scale(&self, s: C64) -> CMatrix {
        CMatrix { n: self.n, m: self.m, data: self.data.iter().map(|a| a * s).collect() }
    }

    pub fn add(&self, o: &CMatrix) -> CMatrix {
        assert_eq!((self.n, self.m), (o.n, o.m));
        let data = self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect();
        CMatrix { n: self.n, m: self.m, data }
    }

    pub fn adjoint(&self) -> CMatrix {
        let mut out = CMatrix::zeros(self.m, self.n);
        for i in 0..self.n {
            for j in 0..self.m {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn lu(mut self) -> Result<LuFactors> {
        assert_eq!(self.n, self.m);
        let n = self.n;
        let mut piv = Vec::with_capacity(n);
        for col in 0..n {
            let mut pmax = self[(col, col)].norm();
            let mut prow = col;
            for r in col + 1..n {
                let v = self[(r, col)].norm();
                if v > pmax {
                    pmax = v;
                    prow = r;
                }
            }
            if !(pmax > 0.0) || !pmax.is_finite() {
                return Err(Error::SingularFactorization(format!(
                    "zero pivot in column {col} of {n}x{n} LU"
                )));
            }
            if prow != col {
                for j in 0..n {
                    self.data.swap(col * n + j, prow * n + j);
                }
            }
            piv.push(prow);
            let d = self[(col, col)];
            for r in col + 1..n {
                let f = self[(r, col)] / d;
                self[(r, col)] = f;
                if f != C64::from(0.0) {
                    for j in col + 1..n {
                        let s = self[(col, j)];
                        self[(r, j)] -= f * s;
                    }
                }
            }
        }
        Ok(LuFactors { lu: self, piv })
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.m + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.m + j]
    }
}

#[derive(Debug, Clone)]
pub struct LuFactors {
    lu: CMatrix,
    piv: Vec<usize>,
}

impl LuFactors {
    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        let n = self.lu.n;
        assert_eq!(b.len(), n);
        let mut x = b.to_vec();
        for i in 0..n {
            x.swap(i, self.piv[i]);
        }
        for i in 1..n {
            let mut acc = x[i];
            for j in 0..i {
                acc -= self.lu[(i, j)] * x[j];
            }
            x[i] = acc;
        }
        for i in (0..n).rev() {
            let mut acc = x[i];
            for j in i + 1..n {
                acc -= self.lu[(i, j)] * x[j];
            }
            x[i] = acc / self.lu[(i, i)];
        }
        x
    }

    /// X with A X = B
    pub fn solve_mat(&self, b: &CMatrix) -> CMatrix {
        let n = self.lu.n;
        assert_eq!(b.n, n);
        let mut out = CMatrix::zeros(n, b.m);
        for j in 0..b.m {
            let col: Vec<C64> = (0..n).map(|i| b[(i, j)]).collect();
            let x = self.solve(&col);
            for i in 0..n {
                out[(i, j)] = x[i];
            }
        }
        out
    }

    pub fn inverse(&self) -> CMatrix {
        self.solve_mat(&CMatrix::identity(self.lu.n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cx::c64;
    use rand::{Rng, SeedableRng};

    fn random_matrix(n: usize, seed: u64) -> CMatrix {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut a = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                a[(i, j)] = c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
        }
        a
    }

    #[test]
    fn lu_solves_random_systems() {
        for seed in 0..5u64 {
            let n = 20;
            let a = random_matrix(n, seed);
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed + 100);
            let x_true: Vec<C64> =
                (0..n).map(|_| c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            let b = a.matvec(&x_true);
            let x = a.clone().lu().unwrap().solve(&b);
            let err: f64 = x.iter().zip(&x_true).map(|(u, v)| (u - v).norm()).fold(0.0, f64::max);
            assert!(err < 1e-11, "err = {err}");
        }
    }

    #[test]
    fn singular_detected() {
        let mut a = CMatrix::zeros(3, 3);
        a[(0, 0)] = c64(1.0, 0.0);
        a[(1, 1)] = c64(1.0, 0.0);
        // row 2 all zero
        assert!(matches!(a.lu(), Err(Error::SingularFactorization(_))));
    }

    #[test]
    fn inverse_roundtrip() {
        let a = random_matrix(12, 42);
        let inv = a.clone().lu().unwrap().inverse();
        let prod = a.matmul(&inv);
        let err = prod.sub(&CMatrix::identity(12)).max_abs();
        assert!(err < 1e-12, "err = {err}");
    }
}
