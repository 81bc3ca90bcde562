//! Complex-scalar helpers with the branch policy used throughout the crate.

pub use num_complex::Complex64 as C64;

/// Square root with the branch fixed so that `Re sqrt(w) >= 0`.
///
/// The principal branch already satisfies this; the post-hoc flip makes the
/// policy explicit and pins the `Re = 0` edge (negative real axis) to the
/// `+i` side.
pub fn sqrt_re_nonneg(w: C64) -> C64 {
    let r = w.sqrt();
    if r.re < 0.0 || (r.re == 0.0 && r.im < 0.0) {
        -r
    } else {
        r
    }
}

pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}
