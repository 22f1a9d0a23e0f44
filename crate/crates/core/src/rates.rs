//! Spontaneous-decay transition rates at zero and finite temperature, the
//! free-space Green-function factor, the short-time (non-Markovian)
//! transition probability with a UV cutoff, and the quantum correction.
//!
//! Two independent routes exist for the decay rate: the closed form
//! Γ_{l,l-1} = Γ₀ l⁴/(2l+1) and the compositional route
//! (2μ₀/ħ) ω² Tr[dyad · Im G] built from the angular module; tests hold
//! them together.

use crate::angular::averaged_dyad;
use crate::constants::{gamma0, transition_frequency, MoleculeParams, PhysicalConstants};
use crate::error::{Error, Result};
use crate::quad::adaptive_simpson;

/// Isotropic diagonal of Im G(r, r, ω) in free space: ω/(6πc).
pub fn free_space_im_green(omega: f64, k: &PhysicalConstants) -> Result<f64> {
    if omega < 0.0 || !omega.is_finite() {
        return Err(Error::InvalidParameter(format!("omega must be >= 0, got {omega}")));
    }
    Ok(omega / (6.0 * std::f64::consts::PI * k.c))
}

/// Zero-temperature decay rate Γ_{l,l-1} = Γ₀ l⁴/(2l+1); zero for l = 0.
pub fn decay_rate(l: u32, m: &MoleculeParams, k: &PhysicalConstants) -> f64 {
    if l == 0 {
        return 0.0;
    }
    let lf = l as f64;
    gamma0(m, k) * lf.powi(4) / (2.0 * lf + 1.0)
}

/// Decay rate assembled as (2μ₀/ħ) ω² Tr[d⊗d* · Im G · 𝟙] from the averaged
/// dyad and the free-space Green factor. Equals [`decay_rate`] and is kept
/// as an independent consistency route.
pub fn decay_rate_green_route(l: u32, m: &MoleculeParams, k: &PhysicalConstants) -> Result<f64> {
    if l == 0 {
        return Ok(0.0);
    }
    let omega = transition_frequency(l, m, k);
    let dyad = averaged_dyad(l, m.dipole)?;
    let green = free_space_im_green(omega, k)?;
    Ok(2.0 * k.mu0 / k.hbar * omega * omega * dyad.trace() * green)
}

/// Bose–Einstein occupation n(ω, T) = 1/(exp(ħω/k_BT) - 1), evaluated with
/// expm1 for stability at ħω ≪ k_BT. T = 0 returns 0 without dividing.
pub fn bose_occupation(omega: f64, temperature: f64, k: &PhysicalConstants) -> f64 {
    if temperature == 0.0 || omega == 0.0 {
        return 0.0;
    }
    1.0 / (k.hbar * omega / (k.k_b * temperature)).exp_m1()
}

/// Downward and upward rates across the (l-1, l) link at temperature T.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalRates {
    /// Γ_{l,l-1}(T) = Γ_{l,l-1}(n+1), the l → l-1 rate
    pub down: f64,
    /// Γ_{l-1,l}(T) = Γ_{l,l-1}·n, the l-1 → l rate
    pub up: f64,
}

/// Temperature-dressed rates for the link l ↔ l-1 (l ≥ 1).
pub fn thermal_rates(l: u32, temperature: f64, m: &MoleculeParams, k: &PhysicalConstants) -> Result<ThermalRates> {
    if l == 0 {
        return Err(Error::InvalidQuantumNumber("thermal rates need l >= 1".into()));
    }
    if temperature < 0.0 || !temperature.is_finite() {
        return Err(Error::InvalidParameter(format!("temperature must be >= 0, got {temperature}")));
    }
    let bare = decay_rate(l, m, k);
    if temperature == 0.0 {
        return Ok(ThermalRates { down: bare, up: 0.0 });
    }
    // |ω_{l-1,l}| = ω_{l,l-1}
    let n = bose_occupation(transition_frequency(l, m, k), temperature, k);
    Ok(ThermalRates { down: bare * (n + 1.0), up: bare * n })
}

/// Quantum correction l³/((l+1)²(l+½)): 0, 1/6, 16/45 for l = 0, 1, 2.
pub fn quantum_correction(l: u32) -> f64 {
    let lf = l as f64;
    lf.powi(3) / ((lf + 1.0) * (lf + 1.0) * (lf + 0.5))
}

/// Ultraviolet frequency cutoff for the short-time regime.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffSpec {
    pub omega_c: f64,
}

impl CutoffSpec {
    pub fn new(omega_c: f64) -> Result<Self> {
        if !(omega_c > 0.0) || !omega_c.is_finite() {
            return Err(Error::InvalidParameter(format!("omega_c must be positive, got {omega_c}")));
        }
        Ok(Self { omega_c })
    }

    /// Default cutoff ω_c = 2mₑc²/ħ (electron pair-creation scale).
    pub fn electron_pair(k: &PhysicalConstants) -> Self {
        Self { omega_c: 2.0 * k.m_e * k.c * k.c / k.hbar }
    }

    /// Require ω_c / ω_{l,l-1} ≥ `min_ratio` for every modeled l ≤ l_max.
    pub fn validate_for(
        &self,
        l_max: u32,
        m: &MoleculeParams,
        k: &PhysicalConstants,
        min_ratio: f64,
    ) -> Result<()> {
        let top = transition_frequency(l_max.max(1), m, k);
        let ratio = self.omega_c / top;
        if ratio < min_ratio {
            return Err(Error::RegimeViolation {
                guard: "cutoff_ratio",
                detail: format!(
                    "omega_c/omega_{{l,l-1}} = {ratio:.3e} at l = {l_max}, need >= {min_ratio:.1e}"
                ),
            });
        }
        Ok(())
    }
}

/// Default required separation between ω_c and the fastest modeled
/// transition frequency.
pub const CUTOFF_MIN_RATIO: f64 = 1e3;

/// Short-time quadratic depletion coefficient
/// β = d²ω_c⁴/(24π²ħε₀c³) · l/(2l+1).
pub fn short_time_beta(l: u32, cutoff: &CutoffSpec, m: &MoleculeParams, k: &PhysicalConstants) -> f64 {
    let lf = l as f64;
    let geom = if l == 0 { 0.0 } else { lf / (2.0 * lf + 1.0) };
    m.dipole * m.dipole * cutoff.omega_c.powi(4)
        / (24.0 * std::f64::consts::PI.powi(2) * k.hbar * k.eps0 * k.c.powi(3))
        * geom
}

/// Survival probability of level l in the short-time regime, p = 1 - βt².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShortTimeProbability {
    /// p_l(t), clamped to 0 when perturbation theory has broken down
    pub survival: f64,
    /// quadratic coefficient β
    pub beta: f64,
    /// false when ω_c·t > 0.1 (outside the t ≪ 1/ω_c window)
    pub regime_ok: bool,
    /// false when βt² > 1 (clamped result, first-order theory invalid)
    pub perturbative: bool,
}

pub fn short_time_excited_probability(
    l: u32,
    t: f64,
    cutoff: &CutoffSpec,
    m: &MoleculeParams,
    k: &PhysicalConstants,
) -> Result<ShortTimeProbability> {
    if t < 0.0 || !t.is_finite() {
        return Err(Error::InvalidParameter(format!("t must be >= 0, got {t}")));
    }
    let beta = short_time_beta(l, cutoff, m, k);
    let depletion = beta * t * t;
    let perturbative = depletion <= 1.0;
    if !perturbative {
        log::warn!("short-time depletion beta*t^2 = {depletion:.3e} > 1: clamping survival to 0");
    }
    let regime_ok = cutoff.omega_c * t <= 0.1;
    if !regime_ok {
        log::warn!("omega_c*t = {:.3e} > 0.1: outside the short-time window", cutoff.omega_c * t);
    }
    Ok(ShortTimeProbability {
        survival: (1.0 - depletion).max(0.0),
        beta,
        regime_ok,
        perturbative,
    })
}

/// Total depletion Σ_{n≠i} p_n(t) by adaptive quadrature of the sin² kernel
///
/// ```text
/// (2μ₀d²)/(3π²ħc) · l/(2l+1) · ∫₀^{ω_c} dω ω³ sin²[(ω₀-ω)t/2]/(ω₀-ω)²
/// ```
///
/// split at the removable singularity ω = ω₀ = ω_{l,l-1}. Independent of the
/// closed-form β; at ω_c·t ≪ 1 it reproduces βt².
pub fn short_time_depletion_integral(
    l: u32,
    t: f64,
    cutoff: &CutoffSpec,
    m: &MoleculeParams,
    k: &PhysicalConstants,
) -> Result<f64> {
    if l == 0 {
        return Ok(0.0);
    }
    if t < 0.0 || !t.is_finite() {
        return Err(Error::InvalidParameter(format!("t must be >= 0, got {t}")));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let omega0 = transition_frequency(l, m, k);
    let kernel = move |omega: f64| -> f64 {
        let delta = omega0 - omega;
        let x = 0.5 * delta * t;
        // sin^2(x)/delta^2 has a removable singularity at delta = 0
        let s2 = if x.abs() < 1e-6 {
            let t2 = 0.5 * t;
            (t2 * t2) * (1.0 - x * x / 3.0)
        } else {
            let s = x.sin() / delta;
            s * s
        };
        omega.powi(3) * s2
    };
    let lf = l as f64;
    let pref = 2.0 * k.mu0 * m.dipole * m.dipole
        / (3.0 * std::f64::consts::PI.powi(2) * k.hbar * k.c)
        * lf
        / (2.0 * lf + 1.0);
    let scale = cutoff.omega_c.powi(4) * t * t / 16.0; // magnitude of the integral
    let lo = adaptive_simpson(&kernel, 0.0, omega0.min(cutoff.omega_c), 1e-10, 1e-12 * scale)?;
    let hi = if cutoff.omega_c > omega0 {
        adaptive_simpson(&kernel, omega0, cutoff.omega_c, 1e-10, 1e-12 * scale)?
    } else {
        0.0
    };
    Ok(pref * (lo + hi))
}

/// Precomputed downward (and at T > 0 upward) rates across adjacent levels,
/// the generator of the birth–death master equation.
#[derive(Debug, Clone)]
pub struct RateTable {
    l_max: u32,
    down: Vec<f64>,
    up: Option<Vec<f64>>,
    temperature: f64,
}

impl RateTable {
    /// Spontaneous-decay-only table (T = 0): down[l] = Γ₀ l⁴/(2l+1).
    pub fn zero_temperature(l_max: u32, m: &MoleculeParams, k: &PhysicalConstants) -> Result<Self> {
        Self::thermal(l_max, 0.0, m, k)
    }

    /// Finite-temperature table with detailed-balanced upward rates.
    pub fn thermal(l_max: u32, temperature: f64, m: &MoleculeParams, k: &PhysicalConstants) -> Result<Self> {
        if l_max == 0 {
            return Err(Error::InvalidParameter("l_max must be >= 1".into()));
        }
        if temperature < 0.0 || !temperature.is_finite() {
            return Err(Error::InvalidParameter(format!("temperature must be >= 0, got {temperature}")));
        }
        let mut down = vec![0.0; l_max as usize + 1];
        let mut up = vec![0.0; l_max as usize + 1];
        for l in 1..=l_max {
            let r = thermal_rates(l, temperature, m, k)?;
            down[l as usize] = r.down;
            up[l as usize] = r.up;
        }
        Ok(Self {
            l_max,
            down,
            up: (temperature > 0.0).then_some(up),
            temperature,
        })
    }

    pub fn l_max(&self) -> u32 {
        self.l_max
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn is_thermal(&self) -> bool {
        self.up.is_some()
    }

    /// Rate of the l → l-1 transition; zero for l = 0 or l > l_max.
    pub fn down(&self, l: u32) -> f64 {
        self.down.get(l as usize).copied().unwrap_or(0.0)
    }

    /// Rate of the l-1 → l transition; zero at T = 0, for l = 0 or l > l_max.
    pub fn up(&self, l: u32) -> f64 {
        match &self.up {
            Some(up) => up.get(l as usize).copied().unwrap_or(0.0),
            None => 0.0,
        }
    }

    /// Master-equation right-hand side
    /// ṗ_l = down_{l+1} p_{l+1} + up_l p_{l-1} − (down_l + up_{l+1}) p_l
    /// with a reflecting boundary at l = 0 and a closed top at l_max.
    pub fn rhs(&self, p: &[f64], dpdt: &mut [f64]) {
        let n = self.l_max as usize + 1;
        debug_assert_eq!(p.len(), n);
        debug_assert_eq!(dpdt.len(), n);
        for l in 0..n {
            let mut d = -self.down(l as u32) * p[l];
            if l + 1 < n {
                d += self.down(l as u32 + 1) * p[l + 1];
                d -= self.up(l as u32 + 1) * p[l];
            }
            if l >= 1 {
                d += self.up(l as u32) * p[l - 1];
            }
            dpdt[l] = d;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::gamma0;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn natural() -> (MoleculeParams, PhysicalConstants) {
        (MoleculeParams::natural(), PhysicalConstants::natural())
    }

    #[test]
    fn green_factor() {
        let k = PhysicalConstants::codata2018();
        assert_eq!(free_space_im_green(0.0, &k).unwrap(), 0.0);
        let g1 = free_space_im_green(1.0e12, &k).unwrap();
        let g2 = free_space_im_green(2.0e12, &k).unwrap();
        assert_relative_eq!(g2, 2.0 * g1, max_relative = 1e-14);
        let w = 6.0 * std::f64::consts::PI * k.c;
        assert_relative_eq!(free_space_im_green(w, &k).unwrap(), 1.0, max_relative = 1e-14);
        assert!(free_space_im_green(-1.0, &k).is_err());
    }

    #[test]
    fn decay_rates_small_l() {
        let (m, k) = natural();
        let g0 = gamma0(&m, &k);
        assert_eq!(decay_rate(0, &m, &k), 0.0);
        assert_relative_eq!(decay_rate(1, &m, &k), g0 / 3.0, max_relative = 1e-14);
        assert_relative_eq!(decay_rate(2, &m, &k), 16.0 * g0 / 5.0, max_relative = 1e-14);
    }

    #[test]
    fn green_route_matches_closed_form() {
        let k = PhysicalConstants::codata2018();
        let m = MoleculeParams::from_quantum(3.0e-30, 1.5e-46).unwrap();
        for l in 1..=20u32 {
            let closed = decay_rate(l, &m, &k);
            let composed = decay_rate_green_route(l, &m, &k).unwrap();
            assert_relative_eq!(composed, closed, max_relative = 1e-12);
        }
    }

    #[test]
    fn decay_rate_asymptotics() {
        let (m, k) = natural();
        let g0 = gamma0(&m, &k);
        let mut prev = 0.0;
        for l in 1..=200u32 {
            let g = decay_rate(l, &m, &k);
            assert!(g > prev);
            prev = g;
        }
        // Γ_l / (Γ₀ l³/2) → 1
        let l = 20_000u32;
        let ratio = decay_rate(l, &m, &k) / (g0 * (l as f64).powi(3) / 2.0);
        assert_relative_eq!(ratio, 1.0, max_relative = 1e-4);
    }

    #[test]
    fn thermal_detailed_balance() {
        let (m, k) = natural();
        for l in 1..=20u32 {
            for t in [0.3, 1.0, 3.0, 30.0] {
                let r = thermal_rates(l, t, &m, &k).unwrap();
                let expect = (-k.hbar * transition_frequency(l, &m, &k) / (k.k_b * t)).exp();
                assert_relative_eq!(r.up / r.down, expect, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn thermal_rates_edges() {
        let (m, k) = natural();
        let r = thermal_rates(3, 0.0, &m, &k).unwrap();
        assert_eq!(r.up, 0.0);
        assert_relative_eq!(r.down, decay_rate(3, &m, &k), max_relative = 1e-14);
        // k_B T = ħω: n = 1/(e-1), down/up = e
        let l = 2u32;
        let temp = k.hbar * transition_frequency(l, &m, &k) / k.k_b;
        let r = thermal_rates(l, temp, &m, &k).unwrap();
        let n = 1.0 / (1.0_f64.exp() - 1.0);
        assert_relative_eq!(r.up, decay_rate(l, &m, &k) * n, max_relative = 1e-12);
        assert_relative_eq!(r.down / r.up, 1.0_f64.exp(), max_relative = 1e-12);
        // T → ∞: up/down → 1
        let r = thermal_rates(l, 1e12, &m, &k).unwrap();
        assert_relative_eq!(r.up / r.down, 1.0, max_relative = 1e-10);
        assert!(thermal_rates(2, -1.0, &m, &k).is_err());
        assert!(thermal_rates(0, 1.0, &m, &k).is_err());
    }

    #[test]
    fn quantum_correction_values() {
        assert_eq!(quantum_correction(0), 0.0);
        assert_abs_diff_eq!(quantum_correction(1), 1.0 / 6.0, epsilon = 1e-15);
        assert_abs_diff_eq!(quantum_correction(2), 16.0 / 45.0, epsilon = 1e-15);
    }

    #[test]
    fn beta_level_dependence() {
        let (m, k) = natural();
        let cutoff = CutoffSpec::new(1e6).unwrap();
        let b1 = short_time_beta(1, &cutoff, &m, &k);
        let b_inf = short_time_beta(200_000, &cutoff, &m, &k);
        // l/(2l+1): 1/3 at l=1 against 1/2 asymptotically
        assert_relative_eq!(b_inf / b1, 1.5, max_relative = 1e-4);
        assert_eq!(short_time_beta(0, &cutoff, &m, &k), 0.0);
    }

    #[test]
    fn beta_independent_of_inertia() {
        let k = PhysicalConstants::codata2018();
        let cutoff = CutoffSpec::electron_pair(&k);
        let m1 = MoleculeParams::from_quantum(3.0e-30, 1.5e-46).unwrap();
        let m2 = MoleculeParams::from_quantum(3.0e-30, 7.5e-46).unwrap();
        assert_relative_eq!(
            short_time_beta(4, &cutoff, &m1, &k),
            short_time_beta(4, &cutoff, &m2, &k),
            max_relative = 1e-14
        );
    }

    #[test]
    fn short_time_survival_flags() {
        let (m, k) = natural();
        let cutoff = CutoffSpec::new(1e6).unwrap();
        let p = short_time_excited_probability(1, 0.0, &cutoff, &m, &k).unwrap();
        assert_eq!(p.survival, 1.0);
        assert!(p.regime_ok && p.perturbative);
        // far out of regime: clamped and double-flagged
        let p = short_time_excited_probability(1, 1.0, &cutoff, &m, &k).unwrap();
        assert_eq!(p.survival, 0.0);
        assert!(!p.regime_ok && !p.perturbative);
        assert!(short_time_excited_probability(1, -0.5, &cutoff, &m, &k).is_err());
    }

    #[test]
    fn depletion_integral_recovers_beta() {
        let (m, k) = natural();
        let cutoff = CutoffSpec::new(1e6).unwrap();
        for l in [1u32, 5] {
            let t = 1e-3 / cutoff.omega_c;
            let depl = short_time_depletion_integral(l, t, &cutoff, &m, &k).unwrap();
            let beta = short_time_beta(l, &cutoff, &m, &k);
            assert_relative_eq!(depl / (t * t), beta, max_relative = 1e-2);
        }
    }

    #[test]
    fn cutoff_guard() {
        let (m, k) = natural();
        let cutoff = CutoffSpec::new(1e6).unwrap();
        assert!(cutoff.validate_for(10, &m, &k, CUTOFF_MIN_RATIO).is_ok());
        let narrow = CutoffSpec::new(50.0).unwrap();
        let err = narrow.validate_for(10, &m, &k, CUTOFF_MIN_RATIO).unwrap_err();
        assert_eq!(err.code(), "cutoff_ratio");
    }

    #[test]
    fn rate_table_structure() {
        let (m, k) = natural();
        let t0 = RateTable::zero_temperature(5, &m, &k).unwrap();
        assert!(!t0.is_thermal());
        assert_eq!(t0.up(3), 0.0);
        assert_eq!(t0.down(0), 0.0);
        assert_eq!(t0.down(6), 0.0);
        assert_relative_eq!(t0.down(5), decay_rate(5, &m, &k), max_relative = 1e-14);

        let tt = RateTable::thermal(5, 2.0, &m, &k).unwrap();
        assert!(tt.is_thermal());
        for l in 1..=5u32 {
            assert!(tt.up(l) > 0.0);
            let expect = (-k.hbar * transition_frequency(l, &m, &k) / (k.k_b * 2.0)).exp();
            assert_relative_eq!(tt.up(l) / tt.down(l), expect, max_relative = 1e-12);
        }
    }

    #[test]
    fn rhs_conserves_total() {
        let (m, k) = natural();
        let table = RateTable::thermal(6, 1.5, &m, &k).unwrap();
        let p = [0.2, 0.1, 0.3, 0.05, 0.15, 0.1, 0.1];
        let mut dp = [0.0; 7];
        table.rhs(&p, &mut dp);
        let total: f64 = dp.iter().sum();
        assert_abs_diff_eq!(total, 0.0, epsilon = 1e-13);
    }
}
