//! General 1D eigensolver: complex monodromy matrices by RK4 transport,
//! Newton refinement with the analytic z-derivative, and argument-principle
//! root counting in rectangles.
//!
//! The vertical-mode reduction of the eigenvalue problem is
//! `v'' = q(x) v` with `q(x) = z b(x) + z^2 + 4 pi^2 n^2`; the monodromy
//! matrix transports `(v, v')` across one period of the cell.

use crate::cx::{c64, C64};
use crate::error::{Error, Result};
use crate::geom::{Boundary, Geometry};
use crate::linalg::M2;
use crate::mode::ModeSamples;
use crate::profile::DampingProfile;
use crate::quadrature::SimpsonGrid;
use rayon::prelude::*;
use std::f64::consts::PI;

#[derive(Debug, Clone)]
pub struct MonodromyResult {
    pub m: M2,
    pub dm_dz: M2,
    pub steps: usize,
    /// set when entries passed 1e300 during transport; the matrix is then
    /// unusable and callers must treat the evaluation as failed
    pub renormalized: bool,
}

/// Default step count: `max(256, 16 |z|)` rounded up to even, resolving at
/// least ~16 steps per oscillation of the fastest wave.
pub fn default_steps(z: C64) -> usize {
    let s = (16.0 * z.norm()).ceil() as usize;
    let s = s.max(256);
    s + s % 2
}

/// Integration pieces of the unit cell, split at profile breakpoints so the
/// coefficient is smooth inside each piece.
fn pieces(profile: &DampingProfile) -> Vec<(f64, f64)> {
    let mut cuts = vec![-0.5];
    for b in profile.breakpoints() {
        if b > -0.5 + 1e-12 && b < 0.5 - 1e-12 {
            cuts.push(b);
        }
    }
    cuts.push(0.5);
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.windows(2).map(|w| (w[0], w[1])).collect()
}

struct Transport {
    m: M2,
    d: M2,
}

/// One RK4 substep of `M' = C(x) M`, `D' = C(x) D + C_z(x) M` with
/// `C = [[0,1],[q,0]]` and `C_z = [[0,0],[b + 2z, 0]]`.
fn rk4_step<F: Fn(f64) -> f64>(
    t: &mut Transport,
    x: f64,
    hstep: f64,
    beval: &F,
    z: C64,
    lam: f64,
) {
    let q = |xx: f64| -> (C64, C64) {
        let b = beval(xx);
        (z * b + z * z + lam, C64::from(b) + 2.0 * z)
    };
    let apply = |qq: (C64, C64), m: &M2, d: &M2| -> (M2, M2) {
        let (qv, dq) = qq;
        let cm = M2::new(m.c, m.d, qv * m.a, qv * m.b);
        let cd = M2::new(d.c, d.d, qv * d.a + dq * m.a, qv * d.b + dq * m.b);
        (cm, cd)
    };
    let q1 = q(x);
    let q2 = q(x + 0.5 * hstep);
    let q4 = q(x + hstep);
    let (k1m, k1d) = apply(q1, &t.m, &t.d);
    let (k2m, k2d) = apply(q2, &t.m.add(&k1m.scale(C64::from(0.5 * hstep))), &t.d.add(&k1d.scale(C64::from(0.5 * hstep))));
    let (k3m, k3d) = apply(q2, &t.m.add(&k2m.scale(C64::from(0.5 * hstep))), &t.d.add(&k2d.scale(C64::from(0.5 * hstep))));
    let (k4m, k4d) = apply(q4, &t.m.add(&k3m.scale(C64::from(hstep))), &t.d.add(&k3d.scale(C64::from(hstep))));
    let w = C64::from(hstep / 6.0);
    t.m = t.m.add(&k1m.add(&k2m.scale(C64::from(2.0))).add(&k3m.scale(C64::from(2.0))).add(&k4m).scale(w));
    t.d = t.d.add(&k1d.add(&k2d.scale(C64::from(2.0))).add(&k3d.scale(C64::from(2.0))).add(&k4d).scale(w));
}

/// Fundamental matrix of `(v, v')` over one period, with its z-derivative
/// from the variational system, by fixed-step RK4 on breakpoint-aligned
/// pieces.
pub fn monodromy_matrix(
    z: C64,
    n: f64,
    profile: &DampingProfile,
    steps: usize,
) -> MonodromyResult {
    let steps = steps.max(64) + steps.max(64) % 2;
    let lam = 4.0 * PI * PI * n * n;
    let ps = pieces(profile);
    let mut t = Transport { m: M2::identity(), d: M2::zero() };
    let mut renormalized = false;
    let mut used = 0usize;
    for &(lo, hi) in &ps {
        let len = hi - lo;
        let sub = ((steps as f64) * len).ceil() as usize;
        let sub = sub.max(8);
        let hstep = len / sub as f64;
        // evaluate b strictly inside the piece so jumps at the edges read
        // their one-sided values
        let eps = 1e-12 * len;
        let beval = |x: f64| profile.eval(x.clamp(lo + eps, hi - eps));
        for i in 0..sub {
            let x = lo + hstep * i as f64;
            rk4_step(&mut t, x, hstep, &beval, z, lam);
        }
        used += sub;
        if t.m.max_norm() > 1e300 || t.d.max_norm() > 1e300 {
            renormalized = true;
        }
    }
    MonodromyResult { m: t.m, dm_dz: t.d, steps: used, renormalized }
}

/// Characteristic function whose zeros are eigenvalues, with its analytic
/// z-derivative. Periodic: `F = 2 - tr M`; Dirichlet walls: `F = M12`;
/// Neumann walls: `F = M21`.
pub fn characteristic(
    z: C64,
    n: f64,
    profile: &DampingProfile,
    geometry: Geometry,
    steps: usize,
) -> (C64, C64) {
    let mr = monodromy_matrix(z, n, profile, steps);
    match geometry.boundary {
        Boundary::Periodic => (C64::from(2.0) - mr.m.trace(), -mr.dm_dz.trace()),
        Boundary::Dirichlet => (mr.m.b, mr.dm_dz.b),
        Boundary::Neumann => (mr.m.c, mr.dm_dz.c),
    }
}

#[derive(Debug, Clone)]
pub struct EigenSolution {
    pub z: C64,
    pub n: f64,
    pub mode: ModeSamples,
    /// |F(z)| at the accepted step resolution
    pub residual: f64,
    /// boundary-condition defect of the reconstructed mode
    pub bc_residual: f64,
    pub newton_iters: u32,
    pub steps: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct RefineOptions {
    pub residual_tol: f64,
    /// step-doubling stops once successive roots agree within this
    pub z_tol: f64,
    pub max_newton: usize,
    pub mode_samples: usize,
}

impl Default for RefineOptions {
    fn default() -> Self {
        RefineOptions { residual_tol: 1e-10, z_tol: 2.5e-9, max_newton: 50, mode_samples: 2049 }
    }
}

fn newton_at_steps(
    z0: C64,
    n: f64,
    profile: &DampingProfile,
    geometry: Geometry,
    steps: usize,
    opts: &RefineOptions,
) -> Result<(C64, u32, f64)> {
    let mut z = z0;
    let mut iters = 0u32;
    let (mut f, mut df) = characteristic(z, n, profile, geometry, steps);
    for _ in 0..opts.max_newton {
        if f.norm() <= 1e-12 {
            return Ok((z, iters, f.norm()));
        }
        if df.norm() < 1e-14 {
            return Err(Error::DegenerateDerivative(format!(
                "|dF/dz| = {:.3e} at z = {z}; possible double eigenvalue",
                df.norm()
            )));
        }
        let step = f / df;
        let mut lambda = 1.0;
        let mut advanced = false;
        for _ in 0..30 {
            let cand = z - step * lambda;
            let (fc, dfc) = characteristic(cand, n, profile, geometry, steps);
            if fc.norm() < f.norm() {
                z = cand;
                f = fc;
                df = dfc;
                advanced = true;
                break;
            }
            lambda *= 0.5;
        }
        iters += 1;
        if !advanced {
            break;
        }
        if step.norm() * lambda <= 1e-16 * z.norm().max(1.0) {
            break;
        }
    }
    if f.norm() <= opts.residual_tol {
        Ok((z, iters, f.norm()))
    } else {
        Err(Error::NoConvergence(format!(
            "newton residual {:.3e} > {:.1e} at z = {z} ({} steps)",
            f.norm(),
            opts.residual_tol,
            steps
        )))
    }
}

/// Newton refinement of an eigenvalue seed, with RK4 step doubling until the
/// root stabilizes in z.
pub fn newton_refine(
    z0: C64,
    n: f64,
    profile: &DampingProfile,
    geometry: Geometry,
    opts: &RefineOptions,
) -> Result<EigenSolution> {
    let mut steps = default_steps(z0);
    let (mut z, mut iters, mut res) = newton_at_steps(z0, n, profile, geometry, steps, opts)?;
    for _ in 0..4 {
        let steps2 = steps * 2;
        let (z2, it2, res2) = newton_at_steps(z, n, profile, geometry, steps2, opts)?;
        let moved = (z2 - z).norm();
        z = z2;
        iters += it2;
        res = res2;
        steps = steps2;
        if moved <= opts.z_tol {
            break;
        }
    }
    let (mode, bc_residual) = reconstruct_mode(z, n, profile, geometry, steps, opts.mode_samples);
    Ok(EigenSolution { z, n, mode, residual: res, bc_residual, newton_iters: iters, steps })
}

/// Rebuilds the eigenmode by transporting the null vector of the boundary
/// problem across the cell, sampling on a breakpoint-aligned grid.
fn reconstruct_mode(
    z: C64,
    n: f64,
    profile: &DampingProfile,
    geometry: Geometry,
    steps: usize,
    samples: usize,
) -> (ModeSamples, f64) {
    let mr = monodromy_matrix(z, n, profile, steps);
    let m = &mr.m;
    let start: (C64, C64) = match geometry.boundary {
        Boundary::Periodic => {
            // null vector of M - I, larger of the two candidate rows
            let c1 = (m.b, C64::from(1.0) - m.a);
            let c2 = (C64::from(1.0) - m.d, m.c);
            let n1 = c1.0.norm_sqr() + c1.1.norm_sqr();
            let n2 = c2.0.norm_sqr() + c2.1.norm_sqr();
            if n1 >= n2 {
                c1
            } else {
                c2
            }
        }
        Boundary::Dirichlet => (C64::from(0.0), C64::from(1.0)),
        Boundary::Neumann => (C64::from(1.0), C64::from(0.0)),
    };
    let norm0 = (start.0.norm_sqr() + start.1.norm_sqr()).sqrt().max(1e-300);
    let start = (start.0 / norm0, start.1 / norm0);
    let endpoint = m.apply(start);
    let bc_residual = match geometry.boundary {
        Boundary::Periodic => {
            ((endpoint.0 - start.0).norm_sqr() + (endpoint.1 - start.1).norm_sqr()).sqrt()
        }
        Boundary::Dirichlet => endpoint.0.norm(),
        Boundary::Neumann => endpoint.1.norm(),
    };

    let grid = SimpsonGrid::on_pieces(-0.5, 0.5, &profile.breakpoints(), samples.max(257));
    let lam = 4.0 * PI * PI * n * n;
    let mut v = Vec::with_capacity(grid.len());
    let mut state = Transport {
        m: M2::new(start.0, C64::from(0.0), start.1, C64::from(0.0)),
        d: M2::zero(),
    };
    let mut xprev = -0.5;
    let total_len = 1.0;
    for (idx, &xs) in grid.x.iter().enumerate() {
        if idx == 0 {
            v.push(state.m.a);
            continue;
        }
        let len = xs - xprev;
        if len <= 0.0 {
            v.push(state.m.a);
            continue;
        }
        let sub = (((steps as f64) * len / total_len).ceil() as usize).max(2);
        let hstep = len / sub as f64;
        let mid = 0.5 * (xprev + xs);
        let beval = |x: f64| {
            // stay on the side of the sample interval to respect jumps
            let nudge = 1e-12;
            profile.eval(x.clamp(mid - len / 2.0 + nudge * len, mid + len / 2.0 - nudge * len))
        };
        for i in 0..sub {
            rk4_step(&mut state, xprev + hstep * i as f64, hstep, &beval, z, lam);
        }
        xprev = xs;
        v.push(state.m.a);
    }
    (ModeSamples::new(grid, v), bc_residual)
}

#[derive(Debug, Clone, Copy)]
pub struct BoxRegion {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl BoxRegion {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Self {
        assert!(re_max > re_min && im_max > im_min);
        BoxRegion { re_min, re_max, im_min, im_max }
    }

    fn corners(&self) -> [C64; 4] {
        [
            c64(self.re_min, self.im_min),
            c64(self.re_max, self.im_min),
            c64(self.re_max, self.im_max),
            c64(self.re_min, self.im_max),
        ]
    }

    fn center(&self) -> C64 {
        c64(0.5 * (self.re_min + self.re_max), 0.5 * (self.im_min + self.im_max))
    }

    fn contains(&self, z: C64) -> bool {
        z.re >= self.re_min && z.re <= self.re_max && z.im >= self.im_min && z.im <= self.im_max
    }

    fn diam(&self) -> f64 {
        let dr = self.re_max - self.re_min;
        let di = self.im_max - self.im_min;
        (dr * dr + di * di).sqrt()
    }

    fn split(&self) -> (BoxRegion, BoxRegion) {
        if self.re_max - self.re_min >= self.im_max - self.im_min {
            let mid = 0.5 * (self.re_min + self.re_max);
            (
                BoxRegion::new(self.re_min, mid, self.im_min, self.im_max),
                BoxRegion::new(mid, self.re_max, self.im_min, self.im_max),
            )
        } else {
            let mid = 0.5 * (self.im_min + self.im_max);
            (
                BoxRegion::new(self.re_min, self.re_max, self.im_min, mid),
                BoxRegion::new(self.re_min, self.re_max, mid, self.im_max),
            )
        }
    }

    fn nudged(&self, amount: f64) -> BoxRegion {
        BoxRegion::new(
            self.re_min - amount,
            self.re_max + amount,
            self.im_min - amount,
            self.im_max + amount,
        )
    }
}

#[derive(Debug, Clone, Copy)]
pub struct BoxOptions {
    pub boundary_points: usize,
    pub dedup_tol: f64,
    pub max_depth: usize,
    pub refine: RefineOptions,
}

impl Default for BoxOptions {
    fn default() -> Self {
        BoxOptions {
            boundary_points: 4096,
            dedup_tol: 1e-8,
            max_depth: 48,
            refine: RefineOptions::default(),
        }
    }
}

fn winding_steps(region: &BoxRegion) -> usize {
    let zmax = region
        .corners()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    let s = ((6.0 * zmax).ceil() as usize).max(256);
    s + s % 2
}

/// Winding number of F around the rectangle by the trapezoid rule on F'/F,
/// with point doubling until the value stabilizes on an integer within 0.01.
fn winding_number(
    region: &BoxRegion,
    n: f64,
    profile: &DampingProfile,
    geometry: Geometry,
    points: usize,
    steps: usize,
) -> Result<i64> {
    let mut pts = points.max(64);
    let mut prev: Option<i64> = None;
    for _ in 0..4 {
        let w = winding_once(region, n, profile, geometry, pts, steps)?;
        let rounded = w.round() as i64;
        if (w - w.round()).abs() <= 0.01 {
            if prev == Some(rounded) {
                return Ok(rounded);
            }
            prev = Some(rounded);
        } else {
            prev = None;
        }
        pts *= 2;
    }
    Err(Error::WindingInconsistency(format!(
        "winding failed to stabilize on rectangle [{}, {}] x [{}, {}]i",
        region.re_min, region.re_max, region.im_min, region.im_max
    )))
}

fn winding_once(
    region: &BoxRegion,
    n: f64,
    profile: &DampingProfile,
    geometry: Geometry,
    points: usize,
    steps: usize,
) -> Result<f64> {
    let corners = region.corners();
    let perim: f64 = 2.0 * ((region.re_max - region.re_min) + (region.im_max - region.im_min));
    // distribute points over edges proportionally to length
    let mut zs: Vec<C64> = Vec::with_capacity(points + 4);
    for e in 0..4 {
        let a = corners[e];
        let b = corners[(e + 1) % 4];
        let elen = (b - a).norm();
        let np = (((points as f64) * elen / perim).ceil() as usize).max(8);
        for i in 0..np {
            let t = i as f64 / np as f64;
            zs.push(a + (b - a) * t);
        }
    }
    let vals: Vec<(C64, C64)> = zs
        .par_iter()
        .map(|&z| characteristic(z, n, profile, geometry, steps))
        .collect();
    let mut acc = C64::from(0.0);
    let npts = zs.len();
    for i in 0..npts {
        let j = (i + 1) % npts;
        let (fi, dfi) = vals[i];
        let (fj, dfj) = vals[j];
        if fi.norm() < 1e-13 || fj.norm() < 1e-13 {
            return Err(Error::WindingInconsistency("zero on the contour".into()));
        }
        let gi = dfi / fi;
        let gj = dfj / fj;
        acc += (gi + gj) * 0.5 * (zs[j] - zs[i]);
    }
    // account for the wrap segment handled in the modular loop above
    Ok((acc / c64(0.0, 2.0 * PI)).re)
}

fn collect_roots(
    region: BoxRegion,
    n: f64,
    profile: &DampingProfile,
    geometry: Geometry,
    opts: &BoxOptions,
    depth: usize,
    points: usize,
    out: &mut Vec<EigenSolution>,
) -> Result<()> {
    let steps = winding_steps(&region);
    let count = match winding_number(&region, n, profile, geometry, points, steps) {
        Ok(c) => c,
        Err(_) => {
            // contour too close to a zero: nudge outward once, then give up
            let nudged = region.nudged(1e-6);
            winding_number(&nudged, n, profile, geometry, points, steps)?
        }
    };
    if count < 0 {
        return Err(Error::WindingInconsistency(format!(
            "negative winding {count}; F is analytic so this flags contour error"
        )));
    }
    if count == 0 {
        return Ok(());
    }
    let tiny = region.diam() <= opts.dedup_tol.max(1e-9) * 4.0;
    if count == 1 || tiny {
        match newton_refine(region.center(), n, profile, geometry, &opts.refine) {
            Ok(sol) if region.nudged(1e-7).contains(sol.z) => {
                out.push(sol);
                return Ok(());
            }
            Ok(_) | Err(_) if !tiny => { /* fall through to subdivision */ }
            Ok(sol) => {
                // tiny cell but the root drifted just outside: keep it, the
                // dedup pass sorts out duplicates
                out.push(sol);
                return Ok(());
            }
            Err(e) => {
                return Err(Error::WindingInconsistency(format!(
                    "cell with winding {count} failed refinement: {e}"
                )))
            }
        }
    }
    if depth >= opts.max_depth {
        return Err(Error::WindingInconsistency(format!(
            "subdivision depth {depth} exceeded with winding {count}"
        )));
    }
    let (a, b) = region.split();
    let child_points = (points / 2).max(512);
    collect_roots(a, n, profile, geometry, opts, depth + 1, child_points, out)?;
    collect_roots(b, n, profile, geometry, opts, depth + 1, child_points, out)?;
    Ok(())
}

/// All eigenvalues in the rectangle for the listed vertical modes, found by
/// winding-number subdivision and polished by Newton; deduplicated and
/// sorted by (Im z, Re z).
pub fn spectrum_in_box(
    region: BoxRegion,
    n_list: &[f64],
    profile: &DampingProfile,
    geometry: Geometry,
    opts: &BoxOptions,
) -> Result<Vec<EigenSolution>> {
    let mut all: Vec<EigenSolution> = Vec::new();
    let results: Vec<Result<Vec<EigenSolution>>> = n_list
        .par_iter()
        .map(|&n| {
            let mut out = Vec::new();
            collect_roots(
                region,
                n,
                profile,
                geometry,
                opts,
                0,
                opts.boundary_points,
                &mut out,
            )?;
            Ok(out)
        })
        .collect();
    for r in results {
        all.extend(r?);
    }
    // dedup within each n
    all.sort_by(|p, q| {
        (p.n, p.z.im, p.z.re)
            .partial_cmp(&(q.n, q.z.im, q.z.re))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut dedup: Vec<EigenSolution> = Vec::with_capacity(all.len());
    for sol in all {
        let dup = dedup
            .iter()
            .any(|s| s.n == sol.n && (s.z - sol.z).norm() <= opts.dedup_tol);
        if !dup {
            dedup.push(sol);
        }
    }
    dedup.sort_by(|p, q| {
        (p.z.im, p.z.re, p.n)
            .partial_cmp(&(q.z.im, q.z.re, q.n))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(dedup)
}

/// CSV emission for eigenvalue lists.
pub fn eigenvalues_csv(sols: &[EigenSolution]) -> String {
    let mut s = String::from("n,re_z,im_z,residual,newton_iters\n");
    for sol in sols {
        s.push_str(&format!(
            "{},{},{},{},{}\n",
            sol.n,
            crate::fmt_g17(sol.z.re),
            crate::fmt_g17(sol.z.im),
            crate::fmt_g17(sol.residual),
            sol.newton_iters
        ));
    }
    s
}

/// Two-column mode dump: x, Re v, Im v.
pub fn mode_dump(mode: &ModeSamples) -> String {
    let mut s = String::new();
    for (x, v) in mode.grid.x.iter().zip(&mode.v) {
        s.push_str(&format!("{} {} {}\n", crate::fmt_g17(*x), crate::fmt_g17(v.re), crate::fmt_g17(v.im)));
    }
    s
}
