//! 2x2 complex matrices for transfer-matrix work.

use crate::cx::C64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct M2 {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub d: C64,
}

impl M2 {
    pub fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        M2 { a, b, c, d }
    }

    pub fn identity() -> Self {
        M2::new(C64::from(1.0), C64::from(0.0), C64::from(0.0), C64::from(1.0))
    }

    pub fn zero() -> Self {
        M2::new(C64::from(0.0), C64::from(0.0), C64::from(0.0), C64::from(0.0))
    }

    pub fn det(&self) -> C64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> C64 {
        self.a + self.d
    }

    pub fn mul(&self, o: &M2) -> M2 {
        M2::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }

    pub fn add(&self, o: &M2) -> M2 {
        M2::new(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)
    }

    pub fn scale(&self, s: C64) -> M2 {
        M2::new(self.a * s, self.b * s, self.c * s, self.d * s)
    }

    pub fn apply(&self, v: (C64, C64)) -> (C64, C64) {
        (self.a * v.0 + self.b * v.1, self.c * v.0 + self.d * v.1)
    }

    pub fn conj(&self) -> M2 {
        M2::new(self.a.conj(), self.b.conj(), self.c.conj(), self.d.conj())
    }

    pub fn max_norm(&self) -> f64 {
        self.a.norm().max(self.b.norm()).max(self.c.norm()).max(self.d.norm())
    }

    pub fn sub(&self, o: &M2) -> M2 {
        M2::new(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)
    }
}
