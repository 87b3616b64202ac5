use crate::error::{Error, Result};
use crate::matcore::{c64, CMatrix};

/// Cubic momentum grid {−R, …, R}³ scaled by `spacing`, a radial dispersion and a
/// Coulomb-type transform V̂(k) = Z/|k|² (zero at k = 0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RutherfordSetup {
    pub half_extent: i32,
    pub spacing: f64,
    pub charge: f64,
}

impl RutherfordSetup {
    pub const MAX_HALF_EXTENT: i32 = 8;

    pub fn new(half_extent: i32, spacing: f64, charge: f64) -> Result<Self> {
        if half_extent < 1 || half_extent > Self::MAX_HALF_EXTENT {
            return Err(Error::invalid(format!(
                "grid half extent must lie in 1..={}, got {half_extent}",
                Self::MAX_HALF_EXTENT
            )));
        }
        if !(spacing > 0.0) || !spacing.is_finite() {
            return Err(Error::invalid(format!("grid spacing must be positive, got {spacing}")));
        }
        if !charge.is_finite() {
            return Err(Error::invalid("charge must be finite"));
        }
        Ok(RutherfordSetup {
            half_extent,
            spacing,
            charge,
        })
    }

    pub fn modes(&self) -> Vec<[f64; 3]> {
        let r = self.half_extent;
        let mut out = Vec::with_capacity(((2 * r + 1) as usize).pow(3));
        for x in -r..=r {
            for y in -r..=r {
                for z in -r..=r {
                    out.push([x as f64 * self.spacing, y as f64 * self.spacing, z as f64 * self.spacing]);
                }
            }
        }
        out
    }

    /// |Ω|, the number of grid modes.
    pub fn volume(&self) -> f64 {
        ((2 * self.half_extent + 1) as f64).powi(3)
    }

    pub fn transform(&self, k: [f64; 3]) -> f64 {
        let k2 = norm2(k);
        if k2 == 0.0 {
            0.0
        } else {
            self.charge / k2
        }
    }

    /// A = F(|p|) and B_qp = V̂(p−q)/|Ω| on the full grid, for cross-checks on small grids.
    pub fn model(&self, dispersion: &dyn Fn(f64) -> f64) -> (CMatrix, CMatrix) {
        let modes = self.modes();
        let n = modes.len();
        let vol = self.volume();
        let a = CMatrix::from_fn(n, n, |r, c| {
            if r == c {
                c64(dispersion(norm2(modes[r]).sqrt()), 0.0)
            } else {
                c64(0.0, 0.0)
            }
        });
        let b = CMatrix::from_fn(n, n, |q, p| c64(self.transform(sub(modes[p], modes[q])) / vol, 0.0));
        (a, b)
    }
}

fn norm2(k: [f64; 3]) -> f64 {
    k.iter().map(|x| x * x).sum()
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RutherfordResult {
    /// Σ_{|q−q₀|≤ε} |S⁽¹⁾_{q p₀}(τ)|².
    pub total: f64,
    pub shell_size: usize,
    /// Shell modes with F(q) = F(p₀) exactly.
    pub resonant_modes: usize,
}

/// Sums |S⁽¹⁾|² over the outgoing modes q of the grid with |q − q₀| ≤ ε, for the
/// incoming mode p₀, with S⁽¹⁾_{qp₀} = iτ/(¼(F(q)−F(p₀))²+τ²) · V̂(p₀−q)/|Ω|.
pub fn rutherford_demo(
    setup: &RutherfordSetup,
    dispersion: &dyn Fn(f64) -> f64,
    p0: [f64; 3],
    q0: [f64; 3],
    eps_shell: f64,
    tau: f64,
) -> Result<RutherfordResult> {
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(Error::invalid(format!("tau must be positive, got {tau}")));
    }
    if !(eps_shell >= 0.0) {
        return Err(Error::invalid(format!("shell radius must be nonnegative, got {eps_shell}")));
    }
    let modes = setup.modes();
    let mut radii: Vec<f64> = modes.iter().map(|&m| norm2(m).sqrt()).collect();
    radii.sort_by(|x, y| x.total_cmp(y));
    radii.dedup();
    if radii.windows(2).any(|w| !(dispersion(w[1]) > dispersion(w[0]))) {
        return Err(Error::invalid("dispersion must be strictly increasing in |p|"));
    }
    let e0 = dispersion(norm2(p0).sqrt());
    let vol = setup.volume();
    let mut total = 0.0;
    let mut shell_size = 0;
    let mut resonant_modes = 0;
    for &q in &modes {
        if norm2(sub(q, q0)).sqrt() > eps_shell {
            continue;
        }
        shell_size += 1;
        let d = dispersion(norm2(q).sqrt()) - e0;
        if d == 0.0 {
            resonant_modes += 1;
        }
        let amp = tau / (0.25 * d * d + tau * tau) * setup.transform(sub(p0, q)) / vol;
        total += amp * amp;
    }
    if shell_size == 0 {
        return Err(Error::invalid("scattering shell contains no grid modes"));
    }
    Ok(RutherfordResult {
        total,
        shell_size,
        resonant_modes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scattering::{s_series, ScatteringQuery};

    fn linear(p: f64) -> f64 {
        p
    }

    #[test]
    fn charge_scaling() {
        let p0 = [-3.0, 0.0, 0.0];
        let q0 = [3.0, 0.0, 0.0];
        let zero = RutherfordSetup::new(4, 1.0, 0.0).unwrap();
        assert_eq!(rutherford_demo(&zero, &linear, p0, q0, 2.0, 0.3).unwrap().total, 0.0);
        let one = RutherfordSetup::new(4, 1.0, 1.3).unwrap();
        let two = RutherfordSetup::new(4, 1.0, 2.6).unwrap();
        let r1 = rutherford_demo(&one, &linear, p0, q0, 2.0, 0.3).unwrap();
        let r2 = rutherford_demo(&two, &linear, p0, q0, 2.0, 0.3).unwrap();
        assert_eq!(r2.total, 4.0 * r1.total);
    }

    #[test]
    fn empty_shell_and_bad_dispersion() {
        let s = RutherfordSetup::new(2, 1.0, 1.0).unwrap();
        assert!(rutherford_demo(&s, &linear, [1.0, 0.0, 0.0], [0.5, 0.5, 0.5], 0.1, 0.2).is_err());
        assert!(rutherford_demo(&s, &|p: f64| -p, [1.0, 0.0, 0.0], [1.0, 0.0, 0.0], 1.0, 0.2).is_err());
        assert!(RutherfordSetup::new(9, 1.0, 1.0).is_err());
    }

    #[test]
    fn matches_series_on_small_grid() {
        let s = RutherfordSetup::new(1, 1.0, 0.8).unwrap();
        let (a, b) = s.model(&linear);
        let modes = s.modes();
        let p_idx = modes.iter().position(|&m| m == [-1.0, 0.0, 0.0]).unwrap();
        let tau = 0.4;
        let mut series_total = 0.0;
        for (q_idx, &q) in modes.iter().enumerate() {
            if norm2(sub(q, [1.0, 0.0, 0.0])) <= 1.0 + 1e-12 {
                let qy = ScatteringQuery::new(q_idx, p_idx, tau).unwrap();
                series_total += s_series(&a, &b, &qy, 1).unwrap().terms[1].norm_sqr();
            }
        }
        let demo = rutherford_demo(&s, &linear, [-1.0, 0.0, 0.0], [1.0, 0.0, 0.0], 1.0, tau).unwrap();
        assert!((demo.total - series_total).abs() < 1e-14 * series_total.max(1.0));
    }
}
