//! Closed-form spectral branches for strip damping.
//!
//! With `b` the indicator-strip coefficient, vertical mode `n` and
//! `z = i(1/h + zeta_tilde)`, separable eigenmodes reduce to a transcendental
//! quantization condition in the horizontal wavevector `k`. This module
//! solves those conditions by damped Newton iteration plus the slow-variable
//! coupling fixed point, and evaluates the branch asymptotics.

use crate::cx::{c64, sqrt_re_nonneg, C64};
use crate::error::{Error, Result};
use crate::geom::{Boundary, Parity};
use crate::mode::ModeSamples;
use crate::profile::DampingProfile;
use crate::quadrature::SimpsonGrid;
use std::f64::consts::PI;

/// Newton residual target on the quantization condition.
pub const NEWTON_TOL: f64 = 1e-12;
/// Outer fixed-point tolerance on |delta zeta_tilde|.
pub const COUPLING_TOL: f64 = 1e-13;
const MAX_NEWTON: usize = 80;
const MAX_COUPLING: usize = 40;

#[derive(Debug, Clone)]
pub struct BranchParams {
    pub btilde: f64,
    pub sigma: f64,
    pub parity: Parity,
    pub m: u32,
    /// Vertical index; `None` selects `n = round(1/(2 pi h))` per h.
    pub n: Option<f64>,
}

impl BranchParams {
    pub fn new(btilde: f64, sigma: f64, parity: Parity, m: u32) -> Result<Self> {
        if !(btilde > 0.0) || !(sigma > 0.0 && sigma < 0.5) {
            return Err(Error::InvalidProfile(format!(
                "branch needs btilde > 0 and sigma in (0,1/2); got {btilde}, {sigma}"
            )));
        }
        Ok(BranchParams { btilde, sigma, parity, m, n: None })
    }

    pub fn with_n(mut self, n: f64) -> Self {
        self.n = Some(n);
        self
    }

    pub fn sigma_prime(&self) -> f64 {
        0.5 - self.sigma
    }

    pub fn profile(&self) -> DampingProfile {
        DampingProfile::Strip { btilde: self.btilde, sigma: self.sigma }
    }

    /// Leading wavevector of the branch: k0 = pi (m + 1/2) / sigma (even),
    /// k0 = pi m / sigma (odd).
    fn k_leading(&self) -> f64 {
        match self.parity {
            Parity::Even => PI * (self.m as f64 + 0.5) / self.sigma,
            Parity::Odd => PI * self.m as f64 / self.sigma,
        }
    }

    fn n_for(&self, h: f64) -> f64 {
        match self.n {
            Some(n) => n,
            None => (1.0 / (2.0 * PI * h)).round().max(1.0),
        }
    }
}

/// Converged quantization root with the full variable chain.
#[derive(Debug, Clone)]
pub struct QuantizationRoot {
    pub h: f64,
    pub n: f64,
    pub k: C64,
    pub k_prime: C64,
    /// E = (h k)^2
    pub energy: C64,
    /// zeta = zeta_tilde (1 + h zeta_tilde / 2)
    pub zeta: C64,
    pub zeta_tilde: C64,
    /// B = btilde (1 + h zeta_tilde)
    pub coupling: C64,
    /// z = i (1/h + zeta_tilde)
    pub z: C64,
    pub residual: f64,
    pub newton_iters: u32,
}

/// |Re z| (Im z)^{3/2}; tends to the branch constant as h -> 0.
pub fn scaling_diagnostic(root: &QuantizationRoot) -> f64 {
    root.z.re.abs() * root.z.im.powf(1.5)
}

/// k = sqrt(E)/h and k' = sqrt(E - i h B)/h, both with Re >= 0.
pub fn wavevectors(energy: C64, h: f64, coupling: C64) -> (C64, C64) {
    let k = sqrt_re_nonneg(energy) / h;
    let kp = sqrt_re_nonneg(energy - c64(0.0, h) * coupling) / h;
    (k, kp)
}

/// Tangent-form quantization residual:
/// even `F = tan(k sigma) + (k'/k) tan(k' sigma')`,
/// odd  `F = tan(k sigma) + (k/k') tan(k' sigma')`,
/// with `k'` recomputed from `E = (hk)^2` and B.
pub fn quantization_residual(
    k: C64,
    h: f64,
    coupling: C64,
    params: &BranchParams,
) -> Result<C64> {
    let energy = (k * h) * (k * h);
    let (_, kp) = wavevectors(energy, h, coupling);
    let sg = params.sigma;
    let sp = params.sigma_prime();
    if (k * sg).cos().norm() < 1e-12 {
        return Err(Error::PoleProximity(format!(
            "|cos(k sigma)| = {:.3e} at k = {k}",
            (k * sg).cos().norm()
        )));
    }
    if (kp * sp).cos().norm() < 1e-12 {
        return Err(Error::PoleProximity(format!(
            "|cos(k' sigma')| = {:.3e} at k' = {kp}",
            (kp * sp).cos().norm()
        )));
    }
    let t1 = (k * sg).tan();
    let t2 = (kp * sp).tan();
    Ok(match params.parity {
        Parity::Even => t1 + (kp / k) * t2,
        Parity::Odd => t1 + (k / kp) * t2,
    })
}

/// Tangent-form residual evaluated directly from the spectral parameter z:
/// `k = sqrt(-(z^2 + 4 pi^2 n^2))`, `k' = sqrt(-(z^2 + btilde z + 4 pi^2 n^2))`,
/// both with Re >= 0. Equivalent to [`quantization_residual`] through
/// `z = i(1/h + zeta_tilde)` but free of the h-parametrization, so it also
/// applies to conjugate (lower half-plane) eigenvalues.
pub fn quantization_residual_z(z: C64, n: f64, params: &BranchParams) -> Result<C64> {
    let lam = c64(4.0 * PI * PI * n * n, 0.0);
    let k = sqrt_re_nonneg(-(z * z) - lam);
    let kp = sqrt_re_nonneg(-(z * z) - params.btilde * z - lam);
    let sg = params.sigma;
    let sp = params.sigma_prime();
    if (k * sg).cos().norm() < 1e-12 || (kp * sp).cos().norm() < 1e-12 {
        return Err(Error::PoleProximity("tangent pole in z-form residual".into()));
    }
    let t1 = (k * sg).tan();
    let t2 = (kp * sp).tan();
    Ok(match params.parity {
        Parity::Even => t1 + (kp / k) * t2,
        Parity::Odd => t1 + (k / kp) * t2,
    })
}

/// Entire (pole-free) form of the quantization condition; shares its roots
/// with the tangent form wherever the latter is finite. Newton iterates on
/// this form so that roots sitting near tangent poles (weak damping) stay
/// reachable.
fn entire_form(k: C64, h: f64, coupling: C64, params: &BranchParams) -> (C64, C64) {
    let sg = c64(params.sigma, 0.0);
    let sp = c64(params.sigma_prime(), 0.0);
    let energy = (k * h) * (k * h);
    let (_, kp) = wavevectors(energy, h, coupling);
    let dkp = k / kp; // from k'^2 = k^2 - iB/h
    let (s1, c1) = ((k * sg).sin(), (k * sg).cos());
    let (s2, c2) = ((kp * sp).sin(), (kp * sp).cos());
    match params.parity {
        Parity::Even => {
            let g = k * s1 * c2 + kp * c1 * s2;
            let dg = s1 * c2 + k * sg * c1 * c2 - k * s1 * s2 * sp * dkp
                + dkp * c1 * s2
                - kp * sg * s1 * s2
                + kp * c1 * c2 * sp * dkp;
            (g, dg)
        }
        Parity::Odd => {
            let g = k * c1 * s2 + kp * s1 * c2;
            let dg = c1 * s2 - k * sg * s1 * s2 + k * c1 * c2 * sp * dkp
                + dkp * s1 * c2
                + kp * sg * c1 * c2
                - kp * s1 * s2 * sp * dkp;
            (g, dg)
        }
    }
}

/// zeta and zeta_tilde recovered from a wavevector k at vertical index n.
fn zeta_chain(k: C64, h: f64, n: f64) -> (C64, C64) {
    let energy = (k * h) * (k * h);
    let vertical = (2.0 * PI * h * n).powi(2);
    let zeta = (energy + vertical - 1.0) / (2.0 * h);
    // invert zeta = zt (1 + h zt / 2): root of (h/2) zt^2 + zt - zeta closest
    // to zeta (the other root is O(1/h) away)
    let w = (c64(1.0, 0.0) + 2.0 * h * zeta).sqrt();
    let r1 = (w - 1.0) / h;
    let r2 = (-w - 1.0) / h;
    let zt = if (r1 - zeta).norm() <= (r2 - zeta).norm() { r1 } else { r2 };
    (zeta, zt)
}

fn newton_entire(
    mut k: C64,
    h: f64,
    coupling: C64,
    params: &BranchParams,
) -> Result<(C64, u32)> {
    let mut iters = 0u32;
    for _ in 0..MAX_NEWTON {
        let (g, dg) = entire_form(k, h, coupling, params);
        if dg.norm() < 1e-300 {
            return Err(Error::DegenerateDerivative(format!(
                "entire-form derivative vanished at k = {k}"
            )));
        }
        let step = g / dg;
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..50 {
            let cand = k - step * lambda;
            let (gc, _) = entire_form(cand, h, coupling, params);
            if gc.norm() < g.norm() {
                k = cand;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        iters += 1;
        if !accepted {
            // descent stalled: either converged to roundoff floor or stuck
            if g.norm() <= 1e-10 * k.norm().max(1.0) {
                return Ok((k, iters));
            }
            return Err(Error::NoConvergence(format!(
                "newton stalled at k = {k}, |G| = {:.3e}",
                g.norm()
            )));
        }
        if (step.norm() * lambda) <= 1e-15 * k.norm().max(1.0) {
            return Ok((k, iters));
        }
    }
    Err(Error::NoConvergence(format!("newton exceeded {MAX_NEWTON} iterations at k = {k}")))
}

/// Root window for branch identity: the converged Re k must stay inside the
/// half-open tangent cell around the branch's leading wavevector.
fn in_branch_window(k: C64, params: &BranchParams) -> bool {
    let cell = PI / params.sigma;
    let lo = match params.parity {
        Parity::Even => params.m as f64 * cell,
        Parity::Odd => (params.m as f64 - 0.5) * cell,
    };
    k.re > lo && k.re < lo + cell
}

fn solve_at_h_seeded(
    params: &BranchParams,
    h: f64,
    seed: C64,
    coupling0: C64,
) -> Result<QuantizationRoot> {
    let n = params.n_for(h);
    let mut coupling = coupling0;
    let mut k = seed;
    let mut zt_prev: Option<C64> = None;
    let mut iters_total = 0u32;
    for _ in 0..MAX_COUPLING {
        let (kk, it) = newton_entire(k, h, coupling, params)?;
        k = kk;
        iters_total += it;
        let (_, zt) = zeta_chain(k, h, n);
        coupling = params.btilde * (C64::from(1.0) + h * zt);
        if let Some(p) = zt_prev {
            if (zt - p).norm() <= COUPLING_TOL {
                break;
            }
        }
        zt_prev = Some(zt);
    }
    let (zeta, zeta_tilde) = zeta_chain(k, h, n);
    let coupling = params.btilde * (C64::from(1.0) + h * zeta_tilde);
    let energy = (k * h) * (k * h);
    let (_, k_prime) = wavevectors(energy, h, coupling);
    let z = c64(0.0, 1.0) * (C64::from(1.0 / h) + zeta_tilde);
    let residual = match quantization_residual(k, h, coupling, params) {
        Ok(f) => f.norm(),
        // near a tangent pole: report the scale-normalized entire form
        Err(_) => {
            let (g, _) = entire_form(k, h, coupling, params);
            g.norm() / k.norm().max(1.0)
        }
    };
    if !in_branch_window(k, params) {
        return Err(Error::NoConvergence(format!(
            "root k = {k} left the m = {} tangent cell",
            params.m
        )));
    }
    Ok(QuantizationRoot {
        h,
        n,
        k,
        k_prime,
        energy,
        zeta,
        zeta_tilde,
        coupling,
        z,
        residual,
        newton_iters: iters_total,
    })
}

fn asymptotic_seed(params: &BranchParams, h: f64) -> C64 {
    let k0 = params.k_leading();
    // relative seed perturbation sqrt(h) e^{i 3pi/4} / (sigma sqrt(btilde))
    let p = h.sqrt() / (params.sigma * params.btilde.sqrt());
    if p <= 0.5 {
        C64::from(k0) * (C64::from(1.0) + p * C64::from_polar(1.0, 3.0 * PI / 4.0))
    } else {
        C64::from(k0)
    }
}

/// Largest h at which the asymptotic seed is trusted for this branch: the
/// seed perturbation must stay small and the branch wavevector must stay
/// well below the damped-region wavevector scale sqrt(B/h).
fn seed_regime_h(params: &BranchParams) -> f64 {
    let k0 = params.k_leading();
    let cap_seed = 0.16 * params.sigma * params.sigma * params.btilde;
    let cap_regime = 0.2 * params.btilde / (k0 * k0);
    cap_seed.min(cap_regime)
}

/// Newton root of the quantization condition at a single h, with the
/// coupling fixed point `B = btilde (1 + h zeta_tilde)` iterated to
/// convergence.
///
/// Branch identity is defined by continuation: when h lies outside the
/// asymptotic seed's validity range, the root is continued in h from inside
/// that range, so the returned root is the deformation of the small-h branch
/// member rather than whatever root a detuned seed happens to reach.
pub fn solve_branch_at_h(params: &BranchParams, h: f64) -> Result<QuantizationRoot> {
    if params.parity == Parity::Odd && params.m == 0 {
        return Err(Error::OddMZero);
    }
    if !(h > 0.0) {
        return Err(Error::Usage(format!("h must be positive, got {h}")));
    }
    let h0 = seed_regime_h(params).min(h);
    let mut root =
        solve_at_h_seeded(params, h0, asymptotic_seed(params, h0), C64::from(params.btilde))?;
    let mut hc = h0;
    let mut steps = 0usize;
    while hc < h {
        hc = (hc * 1.25).min(h);
        root = solve_at_h_seeded(params, hc, root.k, root.coupling)
            .map_err(|e| Error::NoConvergence(format!("continuation failed at h = {hc}: {e}")))?;
        steps += 1;
        if steps > 400 {
            return Err(Error::NoConvergence("continuation exceeded 400 steps".into()));
        }
    }
    Ok(root)
}

/// Leading imaginary part of zeta_tilde along the branch:
/// even `h^{3/2} (pi(m+1/2))^2 / (sigma^3 sqrt(2 btilde))`,
/// odd  `h^{3/2} (pi m)^2 / (sigma^3 sqrt(2 btilde))` (m >= 1).
pub fn asymptotic_im_zeta(params: &BranchParams, h: f64) -> Result<f64> {
    let numer = match params.parity {
        Parity::Even => (PI * (params.m as f64 + 0.5)).powi(2),
        Parity::Odd => {
            if params.m == 0 {
                return Err(Error::OddMZero);
            }
            (PI * params.m as f64).powi(2)
        }
    };
    Ok(h.powf(1.5) * numer / (params.sigma.powi(3) * (2.0 * params.btilde).sqrt()))
}

/// Branch continuation over a descending list of h values; each root seeds
/// the next solve.
pub fn branch(params: &BranchParams, h_list: &[f64]) -> Result<Vec<QuantizationRoot>> {
    if h_list.is_empty() {
        return Err(Error::Usage("branch needs at least one h".into()));
    }
    if h_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Usage("h list must be strictly descending".into()));
    }
    let mut out = Vec::with_capacity(h_list.len());
    let mut prev: Option<QuantizationRoot> = None;
    for &h in h_list {
        let root = match &prev {
            None => solve_branch_at_h(params, h)?,
            Some(r) => solve_at_h_seeded(params, h, r.k, r.coupling)
                .or_else(|_| solve_branch_at_h(params, h))
                .map_err(|e| Error::NoConvergence(format!("branch stopped at h = {h}: {e}")))?,
        };
        prev = Some(root.clone());
        out.push(root);
    }
    Ok(out)
}

/// Samples the 1D eigenmode of a converged root on a quadrature grid aligned
/// to the strip edges.
pub fn mode_profile(
    root: &QuantizationRoot,
    params: &BranchParams,
    samples: usize,
) -> Result<ModeSamples> {
    let sg = params.sigma;
    let sp = params.sigma_prime();
    let (k, kp) = (root.k, root.k_prime);
    let (inner_edge, outer_edge) = match params.parity {
        Parity::Even => ((k * sg).cos(), (kp * sp).cos()),
        Parity::Odd => ((k * sg).sin(), (kp * sp).sin()),
    };
    if outer_edge.norm() < 1e-12 {
        return Err(Error::PoleProximity(format!(
            "outer matching factor vanished: |{}| at k' = {kp}",
            outer_edge.norm()
        )));
    }
    let beta = inner_edge / outer_edge;
    let grid = SimpsonGrid::on_pieces(-0.5, 0.5, &[-sg, sg], samples.max(64));
    let v: Vec<C64> = grid
        .x
        .iter()
        .map(|&x| {
            let ax = x.abs();
            match params.parity {
                Parity::Even => {
                    if ax <= sg {
                        (k * ax).cos()
                    } else {
                        beta * (kp * (0.5 - ax)).cos()
                    }
                }
                Parity::Odd => {
                    if ax <= sg {
                        (k * x).sin()
                    } else {
                        beta * x.signum() * (kp * (0.5 - ax)).sin()
                    }
                }
            }
        })
        .collect();
    Ok(ModeSamples::new(grid, v))
}

/// Relative mismatch of v' across the strip edge; a converged root keeps
/// this at the Newton tolerance scale.
pub fn derivative_jump(root: &QuantizationRoot, params: &BranchParams) -> f64 {
    let sg = params.sigma;
    let sp = params.sigma_prime();
    let (k, kp) = (root.k, root.k_prime);
    let (inner_edge, outer_edge, inner_d, outer_d_unit) = match params.parity {
        Parity::Even => (
            (k * sg).cos(),
            (kp * sp).cos(),
            -k * (k * sg).sin(),
            kp * (kp * sp).sin(),
        ),
        Parity::Odd => (
            (k * sg).sin(),
            (kp * sp).sin(),
            k * (k * sg).cos(),
            -kp * (kp * sp).cos(),
        ),
    };
    let beta = inner_edge / outer_edge;
    let outer_d = beta * outer_d_unit;
    let scale = inner_d.norm().max(outer_d.norm()).max(k.norm());
    (inner_d - outer_d).norm() / scale
}

/// Square-domain spectrum: Dirichlet walls select the odd-parity torus
/// branch, Neumann walls the even-parity one; n ranges over half-integers.
pub fn square_spectrum(
    params: &BranchParams,
    h: f64,
    bc: Boundary,
) -> Result<QuantizationRoot> {
    let forced = match bc {
        Boundary::Dirichlet => Parity::Odd,
        Boundary::Neumann => Parity::Even,
        Boundary::Periodic => {
            return Err(Error::InvalidGeometry("square spectrum needs Dirichlet or Neumann".into()))
        }
    };
    if params.parity != forced {
        return Err(Error::ParityMismatch(format!(
            "{:?} boundary forces {:?} parity, got {:?}",
            bc, forced, params.parity
        )));
    }
    let mut p = params.clone();
    if p.n.is_none() {
        // nearest half-integer honoring h n ~ 1/(2 pi)
        let n2 = (1.0 / (PI * h)).round().max(1.0);
        p.n = Some(n2 / 2.0);
    }
    solve_branch_at_h(&p, h)
}

/// CSV emission for branch sweeps (17 significant digits, LF endings).
pub fn branch_csv(params: &BranchParams, roots: &[QuantizationRoot]) -> String {
    let mut s = String::from(
        "parity,m,n,h,re_z,im_z,re_zeta,im_zeta,asymptotic_im_zeta,scaling_diagnostic,residual\n",
    );
    for r in roots {
        let asym = asymptotic_im_zeta(params, r.h).unwrap_or(f64::NAN);
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            params.parity.as_str(),
            params.m,
            r.n,
            crate::fmt_g17(r.h),
            crate::fmt_g17(r.z.re),
            crate::fmt_g17(r.z.im),
            crate::fmt_g17(r.zeta_tilde.re),
            crate::fmt_g17(r.zeta_tilde.im),
            crate::fmt_g17(asym),
            crate::fmt_g17(scaling_diagnostic(r)),
            crate::fmt_g17(r.residual),
        ));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(parity: Parity, m: u32) -> BranchParams {
        BranchParams::new(1.0, 0.25, parity, m).unwrap()
    }

    #[test]
    fn wavevectors_undamped() {
        let (k, kp) = wavevectors(C64::from(1.0), 1.0, C64::from(0.0));
        assert!((k - C64::from(1.0)).norm() < 1e-15);
        assert!((kp - C64::from(1.0)).norm() < 1e-15);
        // E = h^2 forces k = 1 for any h
        for h in [0.3, 0.05, 0.004] {
            let (k, _) = wavevectors(C64::from(h * h), h, C64::from(0.0));
            assert!((k - C64::from(1.0)).norm() < 1e-13);
        }
    }

    #[test]
    fn wavevector_damped_zero_energy() {
        // E = 0: k' = e^{-i pi/4} (B/h)^{1/2}
        let h = 1e-4;
        let (_, kp) = wavevectors(C64::from(0.0), h, C64::from(1.0));
        let expect = C64::from_polar(100.0, -PI / 4.0);
        assert!((kp - expect).norm() < 1e-9 * expect.norm());
        assert!(kp.re >= 0.0);
    }

    #[test]
    fn undamped_residual_vanishes_at_circle_eigenvalue() {
        // B = 0, k = k' real: F = tan(k sigma) + tan(k sigma') = 0 at k = 2 pi m'
        let p = params(Parity::Even, 0);
        let k = C64::from(2.0 * PI);
        // k sigma = pi/2 is a tangent pole: the guard must fire
        assert!(matches!(
            quantization_residual(k, 0.01, C64::from(0.0), &p),
            Err(Error::PoleProximity(_))
        ));
        // slightly detuned sigma keeps the combination finite and small
        let p2 = BranchParams::new(1.0, 0.2, Parity::Even, 0).unwrap();
        let f = quantization_residual(C64::from(2.0 * PI), 0.01, C64::from(0.0), &p2).unwrap();
        assert!(f.norm() < 1e-12, "|F| = {}", f.norm());
    }

    #[test]
    fn pole_dominance_for_large_damping() {
        // k at the exact tangent pole of the even condition errs; just off the
        // pole the residual is huge (~ |k'/k|)
        let p = params(Parity::Even, 0);
        let h = 0.001;
        let coupling = C64::from(1.0);
        let k = C64::from(PI * 0.5 / 0.25 + 1e-6);
        let f = quantization_residual(k, h, coupling, &p).unwrap();
        let (_, kp) = wavevectors((k * h) * (k * h), h, coupling);
        assert!(f.norm() > 0.1 * (kp / k).norm());
    }

    #[test]
    fn even_m0_branch_reference_values() {
        // frozen from an independent quadratic-pencil FD solve (companion
        // linearization) of the 1D mode problem at n = 8 and n = 16
        let p = params(Parity::Even, 0);
        let r = solve_branch_at_h(&p, 0.02).unwrap();
        assert_eq!(r.n, 8.0);
        assert!((r.z - c64(-0.1431503483720938, 50.46783484115731)).norm() < 1e-9, "z = {}", r.z);
        assert!(r.residual < 1e-12);

        let r = solve_branch_at_h(&p, 0.01).unwrap();
        assert_eq!(r.n, 16.0);
        assert!((r.z.re - -0.046473760) .abs() < 1e-8, "z = {}", r.z);
    }

    #[test]
    fn out_of_regime_roots_match_fd_oracle() {
        // h = 0.02 roots for higher m, continued from the asymptotic regime;
        // each value sits in the FD companion-linearization spectrum at n = 8
        let cases = [
            (Parity::Even, 1, c64(-0.249863435160, 53.668567456544)),
            (Parity::Odd, 1, c64(-0.249674108191, 51.779663112395)),
            (Parity::Odd, 2, c64(-0.249924336863, 56.189540324612)),
        ];
        for (parity, m, z_expect) in cases {
            let p = params(parity, m);
            let r = solve_branch_at_h(&p, 0.02).unwrap();
            assert!(
                (r.z - z_expect).norm() < 1e-8,
                "{:?} m={m}: z = {} expected {z_expect}",
                parity,
                r.z
            );
            assert!(r.residual < 1e-10);
        }
    }

    #[test]
    fn odd_m0_rejected() {
        let p = params(Parity::Odd, 0);
        assert!(matches!(solve_branch_at_h(&p, 0.01), Err(Error::OddMZero)));
        assert!(matches!(asymptotic_im_zeta(&p, 0.01), Err(Error::OddMZero)));
    }

    #[test]
    fn vanishing_damping_pushes_to_axis() {
        let p = BranchParams::new(1e-8, 0.25, Parity::Even, 0).unwrap();
        let r = solve_branch_at_h(&p, 0.01).unwrap();
        assert!(r.z.re.abs() <= 1e-3, "Re z = {}", r.z.re);
        assert!(r.zeta_tilde.im.abs() <= 1e-3);
    }

    #[test]
    fn asymptotic_values_frozen() {
        let p = params(Parity::Even, 0);
        let v = asymptotic_im_zeta(&p, 0.01).unwrap();
        assert!((v - 0.111662).abs() < 1e-6, "v = {v}");
        let po = params(Parity::Odd, 1);
        let vo = asymptotic_im_zeta(&po, 0.01).unwrap();
        assert!((vo - 4.0 * v).abs() < 1e-12);
        assert_eq!(asymptotic_im_zeta(&p, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn consistency_chain_holds() {
        let p = params(Parity::Even, 0);
        for h in [0.04, 0.02, 0.01, 0.005] {
            let r = solve_branch_at_h(&p, h).unwrap();
            let scale = r.z.norm();
            assert!((r.energy - (r.k * h) * (r.k * h)).norm() < 1e-12 * r.energy.norm().max(1.0));
            let z2 = c64(0.0, 1.0) * (C64::from(1.0 / h) + r.zeta_tilde);
            assert!((r.z - z2).norm() < 1e-12 * scale);
            let zeta2 = r.zeta_tilde * (C64::from(1.0) + 0.5 * h * r.zeta_tilde);
            assert!((r.zeta - zeta2).norm() < 1e-12 * r.zeta.norm().max(1.0));
            let b2 = p.btilde * (C64::from(1.0) + h * r.zeta_tilde);
            assert!((r.coupling - b2).norm() < 1e-12 * b2.norm());
            let kp2 = sqrt_re_nonneg(r.energy - c64(0.0, h) * r.coupling) / h;
            assert!((r.k_prime - kp2).norm() < 1e-12 * kp2.norm());
            // re-substitution
            let f = quantization_residual(r.k, h, r.coupling, &p).unwrap();
            assert!(f.norm() < 1e-10);
        }
    }

    #[test]
    fn spectral_band_re_z() {
        // -btilde/2 - tol <= Re z <= tol for all computed roots
        for (parity, m) in [(Parity::Even, 0), (Parity::Even, 1), (Parity::Odd, 1), (Parity::Odd, 2)]
        {
            let p = params(parity, m);
            for h in [0.02, 0.01] {
                let r = solve_branch_at_h(&p, h).unwrap();
                assert!(r.z.re <= 1e-9 && r.z.re >= -0.5 - 1e-9, "z = {}", r.z);
            }
        }
    }

    #[test]
    fn conjugation_symmetry() {
        // every root has a sister at conj(z); check it through the z-form
        // residual, which is parametrization-free
        for (parity, m) in [(Parity::Even, 0), (Parity::Odd, 1)] {
            let p = params(parity, m);
            let r = solve_branch_at_h(&p, 0.02).unwrap();
            let f = quantization_residual_z(r.z, r.n, &p).unwrap();
            assert!(f.norm() < 1e-9, "z-form residual {}", f.norm());
            let fc = quantization_residual_z(r.z.conj(), r.n, &p).unwrap();
            assert!(fc.norm() < 1e-9, "conjugate residual {}", fc.norm());
        }
    }

    #[test]
    fn branch_continuation_and_csv() {
        let p = params(Parity::Even, 0);
        let hs = [0.02, 0.01, 0.005];
        let roots = branch(&p, &hs).unwrap();
        assert_eq!(roots.len(), 3);
        let single = solve_branch_at_h(&p, 0.02).unwrap();
        assert!((roots[0].z - single.z).norm() < 1e-10);
        // scaling diagnostic approaches the branch constant from below
        let c0 = (PI / 2.0).powi(2) / (0.25f64.powi(3) * 2.0f64.sqrt());
        for r in &roots {
            let d = scaling_diagnostic(r);
            assert!(d > 0.0 && d < 1.1 * c0);
        }
        let csv = branch_csv(&p, &roots);
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "parity,m,n,h,re_z,im_z,re_zeta,im_zeta,asymptotic_im_zeta,scaling_diagnostic,residual"
        );
        assert_eq!(csv.lines().count(), 4);
        assert!(csv.lines().nth(1).unwrap().starts_with("even,0,8,2.0000000000000000e-2,"));
        assert!(branch(&p, &[0.01, 0.02]).is_err());
    }

    #[test]
    fn mode_profile_continuity_and_boundary_amplitude() {
        let p = params(Parity::Even, 0);
        let h = 0.01;
        let r = solve_branch_at_h(&p, h).unwrap();
        assert!(derivative_jump(&r, &p) < 1e-8);
        let mode = mode_profile(&r, &p, 4097).unwrap();
        // Rayleigh identity via quadrature
        assert!(mode.rayleigh_residual(r.z, &p.profile()) < 1e-5);

        // boundary amplitude law: v(sigma) matches
        // (-1)^{m+1} e^{i 3pi/4} h^{1/2} pi (m+1/2)/(sigma btilde^{1/2})
        // with an O(h) remainder; check magnitude scale and remainder order
        let hs = [0.01, 0.005, 0.0025, 0.00125];
        let mut errs = Vec::new();
        for &hh in &hs {
            let rr = solve_branch_at_h(&p, hh).unwrap();
            let v_sigma = (rr.k * p.sigma).cos();
            let lead = -C64::from_polar(1.0, 3.0 * PI / 4.0)
                * (hh.sqrt() * PI * 0.5 / (p.sigma * p.btilde.sqrt()));
            errs.push((v_sigma - lead).norm());
            let ratio = v_sigma.norm() / lead.norm();
            assert!(ratio > 0.5 && ratio < 1.5, "h = {hh}: |v(sigma)| ratio {ratio}");
        }
        let fit = crate::fitting::fit_loglog(&hs, &errs, 4).unwrap();
        assert!(fit.slope >= 0.9, "remainder order {}", fit.slope);
    }

    #[test]
    fn mode_profile_weak_damping_is_cosine_junction() {
        // btilde -> 0 with sigma = 1/4: the root sits at k ~ 2 pi and the
        // matched profile collapses to the single cosine cos(kx)
        let p = BranchParams::new(1e-8, 0.25, Parity::Even, 0).unwrap();
        let r = solve_branch_at_h(&p, 0.01).unwrap();
        assert!((r.k - C64::from(2.0 * PI)).norm() < 1e-6);
        let beta = (r.k * p.sigma).cos() / (r.k_prime * p.sigma_prime()).cos();
        assert!((beta + C64::from(1.0)).norm() < 1e-6, "beta = {beta}");
        let mode = mode_profile(&r, &p, 1025).unwrap();
        let max_err = mode
            .grid
            .x
            .iter()
            .zip(&mode.v)
            .map(|(&x, v)| (*v - (r.k * x).cos()).norm())
            .fold(0.0, f64::max);
        assert!(max_err < 1e-6, "cosine junction error {max_err}");
        assert!(derivative_jump(&r, &p) < 1e-8);
    }

    #[test]
    fn square_matches_torus_branch() {
        let pe = params(Parity::Even, 0).with_n(8.0);
        let po = params(Parity::Odd, 1).with_n(8.0);
        let torus_even = solve_branch_at_h(&pe, 0.02).unwrap();
        let torus_odd = solve_branch_at_h(&po, 0.02).unwrap();
        let neumann = square_spectrum(&pe, 0.02, Boundary::Neumann).unwrap();
        let dirichlet = square_spectrum(&po, 0.02, Boundary::Dirichlet).unwrap();
        assert!((neumann.z - torus_even.z).norm() < 1e-12);
        assert!((dirichlet.z - torus_odd.z).norm() < 1e-12);
        // parities forced
        assert!(matches!(
            square_spectrum(&pe, 0.02, Boundary::Dirichlet),
            Err(Error::ParityMismatch(_))
        ));
        let pd0 = params(Parity::Odd, 0);
        assert!(matches!(square_spectrum(&pd0, 0.02, Boundary::Dirichlet), Err(Error::OddMZero)));
        // half-integer n works
        let ph = params(Parity::Odd, 1).with_n(8.5);
        let rh = square_spectrum(&ph, 0.02, Boundary::Dirichlet).unwrap();
        assert!(rh.residual < 1e-10);
    }

    #[test]
    fn asymptotic_order_is_near_two_in_the_settled_regime() {
        // |Im zeta_tilde - asym| ~ h^2 once h is small enough that the
        // next-order and exponentially-oscillatory corrections are subdominant
        let p = params(Parity::Even, 0);
        let hs = [0.005, 0.0025, 0.00125, 0.000625];
        let mut errs = Vec::new();
        for &h in &hs {
            let r = solve_branch_at_h(&p, h).unwrap();
            let asym = asymptotic_im_zeta(&p, h).unwrap();
            errs.push((r.zeta_tilde.im - asym).abs());
        }
        let fit = crate::fitting::fit_loglog(&hs, &errs, 4).unwrap();
        assert!(fit.slope >= 1.8, "order {}", fit.slope);
    }
}
