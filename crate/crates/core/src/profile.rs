//! Damping coefficients b(x) on the unit cell and the gradient-growth
//! predicate `|b'(x)| <= C_eps b(x)^{1-eps}`.

use crate::error::{Error, Result};

/// x-dependent damping coefficient, even in x, defined on `[-1/2, 1/2)` and
/// extended periodically.
#[derive(Debug, Clone, PartialEq)]
pub enum DampingProfile {
    /// `b = 0` for `|x| <= sigma`, `b = btilde` for `sigma < |x| <= 1/2`.
    Strip { btilde: f64, sigma: f64 },
    /// `b = amplitude * exp(-1/tau^alpha)` with `tau = (|x|-sigma)/(1/2-sigma)`
    /// for `|x| > sigma`, and `b = 0` on `|x| <= sigma`.
    SmoothExp { alpha: f64, sigma: f64, amplitude: f64 },
    Constant { level: f64 },
    /// Samples on the uniform grid `x_i = -1/2 + i/len`, linearly interpolated.
    Sampled { values: Vec<f64> },
}

fn wrap(x: f64) -> f64 {
    let mut t = (x + 0.5).rem_euclid(1.0) - 0.5;
    if t >= 0.5 {
        t -= 1.0;
    }
    t
}

impl DampingProfile {
    pub fn strip(btilde: f64, sigma: f64) -> Result<Self> {
        if !(btilde > 0.0) {
            return Err(Error::InvalidProfile(format!("strip needs btilde > 0, got {btilde}")));
        }
        if !(sigma > 0.0 && sigma < 0.5) {
            return Err(Error::InvalidProfile(format!("strip needs sigma in (0,1/2), got {sigma}")));
        }
        Ok(DampingProfile::Strip { btilde, sigma })
    }

    pub fn smooth_exp(alpha: f64, sigma: f64, amplitude: f64) -> Result<Self> {
        if !(alpha > 0.0) || !(amplitude >= 0.0) || !(sigma > 0.0 && sigma < 0.5) {
            return Err(Error::InvalidProfile(format!(
                "smoothexp needs alpha > 0, amplitude >= 0, sigma in (0,1/2); got {alpha}, {amplitude}, {sigma}"
            )));
        }
        Ok(DampingProfile::SmoothExp { alpha, sigma, amplitude })
    }

    pub fn constant(level: f64) -> Result<Self> {
        if !(level >= 0.0) {
            return Err(Error::InvalidProfile(format!("constant needs level >= 0, got {level}")));
        }
        Ok(DampingProfile::Constant { level })
    }

    pub fn sampled(values: Vec<f64>) -> Result<Self> {
        if values.len() < 4 {
            return Err(Error::InvalidProfile("sampled profile needs >= 4 values".into()));
        }
        if values.iter().any(|v| !(*v >= 0.0)) {
            return Err(Error::InvalidProfile("sampled profile must be nonnegative".into()));
        }
        Ok(DampingProfile::Sampled { values })
    }

    pub fn zero() -> Self {
        DampingProfile::Constant { level: 0.0 }
    }

    /// b(x); total on R via periodic extension.
    pub fn eval(&self, x: f64) -> f64 {
        let x = wrap(x);
        match self {
            DampingProfile::Strip { btilde, sigma } => {
                if x.abs() <= *sigma {
                    0.0
                } else {
                    *btilde
                }
            }
            DampingProfile::SmoothExp { alpha, sigma, amplitude } => {
                let t = (x.abs() - sigma) / (0.5 - sigma);
                if t <= 0.0 {
                    0.0
                } else {
                    amplitude * (-t.powf(-alpha)).exp()
                }
            }
            DampingProfile::Constant { level } => *level,
            DampingProfile::Sampled { values } => {
                let n = values.len();
                let pos = (x + 0.5) * n as f64;
                let i = pos.floor() as usize % n;
                let frac = pos - pos.floor();
                let j = (i + 1) % n;
                values[i] * (1.0 - frac) + values[j] * frac
            }
        }
    }

    /// db/dx; analytic where the profile is smooth, central differences for
    /// sampled data, and the a.e. value (0) for the strip.
    pub fn gradient(&self, x: f64) -> f64 {
        let x = wrap(x);
        match self {
            DampingProfile::Strip { .. } => 0.0,
            DampingProfile::SmoothExp { alpha, sigma, amplitude } => {
                let sp = 0.5 - sigma;
                let t = (x.abs() - sigma) / sp;
                if t <= 0.0 {
                    0.0
                } else {
                    let b = amplitude * (-t.powf(-alpha)).exp();
                    let d = b * alpha * t.powf(-alpha - 1.0) / sp;
                    d * x.signum()
                }
            }
            DampingProfile::Constant { .. } => 0.0,
            DampingProfile::Sampled { values } => {
                let h = 1.0 / values.len() as f64;
                (self.eval(x + h) - self.eval(x - h)) / (2.0 * h)
            }
        }
    }

    /// sup of b over the cell.
    pub fn sup(&self) -> f64 {
        match self {
            DampingProfile::Strip { btilde, .. } => *btilde,
            DampingProfile::SmoothExp { amplitude, .. } => amplitude * (-1.0f64).exp(),
            DampingProfile::Constant { level } => *level,
            DampingProfile::Sampled { values } => values.iter().cloned().fold(0.0, f64::max),
        }
    }

    pub fn is_discontinuous(&self) -> bool {
        matches!(self, DampingProfile::Strip { .. })
    }

    /// Interior abscissae where smoothness degrades; integration grids and
    /// finite-difference meshes align to these.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            DampingProfile::Strip { sigma, .. } | DampingProfile::SmoothExp { sigma, .. } => {
                vec![-*sigma, *sigma]
            }
            _ => Vec::new(),
        }
    }

    /// Key=value serialization with exact decimal round-trip.
    pub fn to_config(&self) -> String {
        match self {
            DampingProfile::Strip { btilde, sigma } => {
                format!("kind=strip\nbtilde={btilde}\nsigma={sigma}\n")
            }
            DampingProfile::SmoothExp { alpha, sigma, amplitude } => {
                format!("kind=smoothexp\nalpha={alpha}\nsigma={sigma}\namplitude={amplitude}\n")
            }
            DampingProfile::Constant { level } => format!("kind=constant\nlevel={level}\n"),
            DampingProfile::Sampled { values } => {
                let vs: Vec<String> = values.iter().map(|v| format!("{v}")).collect();
                format!("kind=sampled\nvalues={}\n", vs.join(","))
            }
        }
    }

    pub fn from_config(text: &str) -> Result<Self> {
        let mut kind = None;
        let mut map = std::collections::BTreeMap::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Usage(format!("profile config line without '=': {line}")))?;
            let (k, v) = (k.trim(), v.trim());
            if k == "kind" {
                kind = Some(v.to_string());
            } else {
                map.insert(k.to_string(), v.to_string());
            }
        }
        let kind = kind.ok_or_else(|| Error::Usage("profile config missing 'kind'".into()))?;
        let take = |map: &mut std::collections::BTreeMap<String, String>, key: &str| -> Result<f64> {
            map.remove(key)
                .ok_or_else(|| Error::Usage(format!("profile config missing '{key}'")))?
                .parse::<f64>()
                .map_err(|e| Error::Usage(format!("bad float for '{key}': {e}")))
        };
        let profile = match kind.as_str() {
            "strip" => {
                let b = take(&mut map, "btilde")?;
                let s = take(&mut map, "sigma")?;
                DampingProfile::strip(b, s)?
            }
            "smoothexp" => {
                let a = take(&mut map, "alpha")?;
                let s = take(&mut map, "sigma")?;
                let amp = take(&mut map, "amplitude")?;
                DampingProfile::smooth_exp(a, s, amp)?
            }
            "constant" => DampingProfile::constant(take(&mut map, "level")?)?,
            "sampled" => {
                let raw = map
                    .remove("values")
                    .ok_or_else(|| Error::Usage("profile config missing 'values'".into()))?;
                let vals: Result<Vec<f64>> = raw
                    .split(',')
                    .map(|s| {
                        s.trim()
                            .parse::<f64>()
                            .map_err(|e| Error::Usage(format!("bad sample value: {e}")))
                    })
                    .collect();
                DampingProfile::sampled(vals?)?
            }
            other => return Err(Error::Usage(format!("unknown profile kind '{other}'"))),
        };
        if let Some(k) = map.keys().next() {
            return Err(Error::Usage(format!("unknown profile key '{k}'")));
        }
        Ok(profile)
    }
}

#[derive(Debug, Clone)]
pub struct GradientCondition {
    pub holds: bool,
    /// max over the grid of |b'| / b^{1-eps} restricted to {b > 0}
    pub c_eps_estimate: f64,
    /// C(2N)/C(N); a ratio drifting well above 1 flags blow-up under refinement
    pub refinement_ratio: f64,
    pub note: String,
}

/// Checks `|b'(x)| <= C_eps b(x)^{1-eps}` numerically on a grid of
/// `grid_size` points plus one refinement level.
pub fn check_gradient_condition(
    profile: &DampingProfile,
    eps: f64,
    grid_size: usize,
) -> Result<GradientCondition> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Usage(format!("eps must lie in (0,1), got {eps}")));
    }
    if profile.is_discontinuous() {
        // jump at |x| = sigma: the predicate fails for every finite C_eps
        return Ok(GradientCondition {
            holds: false,
            c_eps_estimate: f64::INFINITY,
            refinement_ratio: f64::INFINITY,
            note: "DiscontinuousProfile: strip damping jumps at |x| = sigma".into(),
        });
    }
    let level = |n: usize| -> f64 {
        let mut c: f64 = 0.0;
        for i in 0..n {
            let x = -0.5 + (i as f64 + 0.5) / n as f64;
            let b = profile.eval(x);
            if b > 0.0 {
                c = c.max(profile.gradient(x).abs() / b.powf(1.0 - eps));
            }
        }
        c
    };
    let n = grid_size.max(64);
    let c1 = level(n);
    let c2 = level(2 * n);
    let ratio = if c1 == 0.0 && c2 == 0.0 {
        1.0
    } else if c1 == 0.0 {
        f64::INFINITY
    } else {
        c2 / c1
    };
    let holds = c2.is_finite() && ratio <= 1.5;
    Ok(GradientCondition {
        holds,
        c_eps_estimate: c2,
        refinement_ratio: ratio,
        note: String::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strip_values() {
        let p = DampingProfile::strip(1.0, 0.25).unwrap();
        assert_eq!(p.eval(0.0), 0.0);
        assert_eq!(p.eval(0.4), 1.0);
        assert_eq!(p.eval(0.25), 0.0); // |x| <= sigma includes the edge
        assert_eq!(p.eval(-0.3), 1.0);
        assert_eq!(DampingProfile::zero().eval(0.1), 0.0);
    }

    #[test]
    fn profiles_are_even() {
        let profiles = [
            DampingProfile::strip(2.0, 0.3).unwrap(),
            DampingProfile::smooth_exp(1.5, 0.2, 0.7).unwrap(),
            DampingProfile::constant(0.4).unwrap(),
        ];
        for p in &profiles {
            for i in 0..200 {
                let x = -0.499 + 0.998 * (i as f64) / 199.0;
                assert!((p.eval(x) - p.eval(-x)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn smooth_exp_support() {
        let p = DampingProfile::smooth_exp(1.0, 0.25, 1.0).unwrap();
        assert_eq!(p.eval(0.1), 0.0);
        assert_eq!(p.eval(0.25), 0.0);
        assert!(p.eval(0.26) > 0.0);
        assert!(p.eval(0.49) > p.eval(0.3));
    }

    #[test]
    fn gradient_condition_smooth_exp_holds() {
        let p = DampingProfile::smooth_exp(1.0, 0.25, 1.0).unwrap();
        let r = check_gradient_condition(&p, 0.1, 512).unwrap();
        assert!(r.holds, "C(N)={} ratio={}", r.c_eps_estimate, r.refinement_ratio);
        assert!(r.c_eps_estimate.is_finite());
    }

    #[test]
    fn gradient_condition_strip_fails() {
        let p = DampingProfile::strip(1.0, 0.25).unwrap();
        let r = check_gradient_condition(&p, 0.1, 512).unwrap();
        assert!(!r.holds);
        assert!(r.note.contains("DiscontinuousProfile"));
    }

    #[test]
    fn gradient_condition_constant_trivial() {
        let p = DampingProfile::constant(1.0).unwrap();
        for eps in [0.05, 0.3, 0.9] {
            let r = check_gradient_condition(&p, eps, 256).unwrap();
            assert!(r.holds);
            assert_eq!(r.c_eps_estimate, 0.0);
        }
    }

    #[test]
    fn config_roundtrip_exact() {
        let ps = [
            DampingProfile::strip(1.0, 0.25).unwrap(),
            DampingProfile::strip(0.1234567890123456, 0.4999).unwrap(),
            DampingProfile::smooth_exp(2.0, 0.125, 0.3333333333333333).unwrap(),
            DampingProfile::constant(0.0).unwrap(),
            DampingProfile::sampled(vec![0.0, 0.5, 1.0, 0.5, 0.25]).unwrap(),
        ];
        for p in &ps {
            let q = DampingProfile::from_config(&p.to_config()).unwrap();
            assert_eq!(*p, q);
        }
    }

    #[test]
    fn config_rejects_unknown_keys() {
        let text = "kind=constant\nlevel=1\nbogus=3\n";
        assert!(matches!(DampingProfile::from_config(text), Err(Error::Usage(_))));
    }

    #[test]
    fn sampled_interpolation_and_gradient() {
        let n = 64;
        let values: Vec<f64> = (0..n)
            .map(|i| {
                let x: f64 = -0.5 + i as f64 / n as f64;
                (2.0 * std::f64::consts::PI * x).cos() + 1.0
            })
            .collect();
        let p = DampingProfile::sampled(values).unwrap();
        // interpolation error O(h^2), gradient error O(h^2)
        assert!((p.eval(0.13) - ((2.0 * std::f64::consts::PI * 0.13).cos() + 1.0)).abs() < 2e-3);
        let g_true = -2.0 * std::f64::consts::PI * (2.0 * std::f64::consts::PI * 0.13).sin();
        assert!((p.gradient(0.13) - g_true).abs() < 0.05);
    }
}
