//! Domain, boundary condition, parity and mode bookkeeping.
//!
//! The spatial cell is the unit torus `{-1/2 <= x < 1/2} x {0 <= y < 1}` or
//! the unit square with Dirichlet/Neumann walls at `x = ±1/2`; the Laplacian
//! eigenvalues are `4 pi^2 (m^2 + n^2)`.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    Torus,
    Square,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Periodic,
    Dirichlet,
    Neumann,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Geometry {
    pub domain: Domain,
    pub boundary: Boundary,
}

impl Geometry {
    pub fn new(domain: Domain, boundary: Boundary) -> Result<Self> {
        match (domain, boundary) {
            (Domain::Torus, Boundary::Periodic) => Ok(Geometry { domain, boundary }),
            (Domain::Square, Boundary::Dirichlet) | (Domain::Square, Boundary::Neumann) => {
                Ok(Geometry { domain, boundary })
            }
            _ => Err(Error::InvalidGeometry(format!(
                "{:?} domain cannot carry {:?} boundary",
                domain, boundary
            ))),
        }
    }

    pub fn torus() -> Self {
        Geometry { domain: Domain::Torus, boundary: Boundary::Periodic }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn as_str(&self) -> &'static str {
        match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        }
    }
}

impl std::str::FromStr for Parity {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "even" => Ok(Parity::Even),
            "odd" => Ok(Parity::Odd),
            other => Err(Error::Usage(format!("unknown parity '{other}'"))),
        }
    }
}

/// Vertical Fourier index `n` (integer on the torus, half-integer on the
/// square), horizontal quantum number `m`, and mode parity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeIndex {
    pub n: f64,
    pub m: u32,
    pub parity: Parity,
}

impl ModeIndex {
    pub fn new(n: f64, m: u32, parity: Parity, geometry: Geometry) -> Result<Self> {
        let twice = 2.0 * n;
        if (twice - twice.round()).abs() > 1e-12 {
            return Err(Error::InvalidGeometry(format!("n = {n} is not a half-integer")));
        }
        match geometry.boundary {
            Boundary::Periodic => {
                if (n - n.round()).abs() > 1e-12 {
                    return Err(Error::InvalidGeometry(format!(
                        "torus modes need integer n, got {n}"
                    )));
                }
            }
            Boundary::Dirichlet => {
                if parity != Parity::Odd {
                    return Err(Error::ParityMismatch(
                        "Dirichlet square modes are odd-parity in x".into(),
                    ));
                }
                if n <= 0.0 {
                    return Err(Error::InvalidGeometry(
                        "Dirichlet square modes need n in (1/2)N \\ {0}".into(),
                    ));
                }
            }
            Boundary::Neumann => {
                if parity != Parity::Even {
                    return Err(Error::ParityMismatch(
                        "Neumann square modes are even-parity in x".into(),
                    ));
                }
                if n < 0.0 {
                    return Err(Error::InvalidGeometry("Neumann square modes need n >= 0".into()));
                }
            }
        }
        Ok(ModeIndex { n, m, parity })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometry_invariants() {
        assert!(Geometry::new(Domain::Torus, Boundary::Periodic).is_ok());
        assert!(Geometry::new(Domain::Torus, Boundary::Dirichlet).is_err());
        assert!(Geometry::new(Domain::Square, Boundary::Periodic).is_err());
        assert!(Geometry::new(Domain::Square, Boundary::Neumann).is_ok());
    }

    #[test]
    fn square_mode_parity_forced() {
        let g = Geometry::new(Domain::Square, Boundary::Dirichlet).unwrap();
        assert!(ModeIndex::new(0.5, 1, Parity::Odd, g).is_ok());
        assert!(matches!(
            ModeIndex::new(0.5, 1, Parity::Even, g),
            Err(Error::ParityMismatch(_))
        ));
        assert!(ModeIndex::new(0.0, 1, Parity::Odd, g).is_err());
    }

    #[test]
    fn torus_needs_integer_n() {
        let g = Geometry::torus();
        assert!(ModeIndex::new(3.0, 0, Parity::Even, g).is_ok());
        assert!(ModeIndex::new(2.5, 0, Parity::Even, g).is_err());
    }
}
