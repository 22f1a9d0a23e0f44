//! Physical constants and rotor parameters.
//!
//! Everything downstream (rates, dynamics, classical limit) pulls ħ, c, ε₀,
//! μ₀, k_B, mₑ and the molecule's (d, I, q, μ) from here, so dimensional
//! consistency is decided in one place. Two unit systems are supported:
//! CODATA-2018 SI and a natural mode with ħ/I = 1 and Γ₀ = 1.

use crate::error::{Error, Result};

/// Elementary charge (C), CODATA 2018 (exact by SI definition).
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;

/// Fundamental constants. Immutable after construction; `new` enforces
/// positivity and the electromagnetic consistency μ₀ε₀c² = 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Reduced Planck constant ħ (J·s)
    pub hbar: f64,
    /// Speed of light c (m/s)
    pub c: f64,
    /// Vacuum permittivity ε₀ (F/m)
    pub eps0: f64,
    /// Vacuum permeability μ₀ (H/m)
    pub mu0: f64,
    /// Boltzmann constant k_B (J/K)
    pub k_b: f64,
    /// Electron mass mₑ (kg); sets the default UV cutoff ω_c = 2mₑc²/ħ
    pub m_e: f64,
}

impl PhysicalConstants {
    pub fn new(hbar: f64, c: f64, eps0: f64, mu0: f64, k_b: f64, m_e: f64) -> Result<Self> {
        let k = Self { hbar, c, eps0, mu0, k_b, m_e };
        k.validate()?;
        Ok(k)
    }

    /// CODATA 2018 recommended values.
    pub fn codata2018() -> Self {
        Self {
            hbar: 1.054_571_817e-34,
            c: 299_792_458.0,
            eps0: 8.854_187_812_8e-12,
            mu0: 1.256_637_062_12e-6,
            k_b: 1.380_649e-23,
            m_e: 9.109_383_701_5e-31,
        }
    }

    /// Natural units: ħ = c = ε₀ = μ₀ = k_B = mₑ = 1. Pair with
    /// [`MoleculeParams::natural`] to get ħ/I = 1 and Γ₀ = 1.
    pub fn natural() -> Self {
        Self { hbar: 1.0, c: 1.0, eps0: 1.0, mu0: 1.0, k_b: 1.0, m_e: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("hbar", self.hbar),
            ("c", self.c),
            ("eps0", self.eps0),
            ("mu0", self.mu0),
            ("k_b", self.k_b),
            ("m_e", self.m_e),
        ];
        for (name, v) in fields {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "constant {name} must be finite and positive, got {v}"
                )));
            }
        }
        let residual = (self.mu0 * self.eps0 * self.c * self.c - 1.0).abs();
        if residual > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "mu0*eps0*c^2 deviates from 1 by {residual:.3e} (limit 1e-12)"
            )));
        }
        Ok(())
    }
}

/// Rigid-rotor parameters: dipole norm d, moment of inertia I, pole charge q
/// and reduced mass μ, constrained by I = μd²/q².
///
/// Only the combination q²/μ = d²/I enters any derived quantity, so when a
/// rotor is specified by (d, I) alone the (q, μ) pair is fixed by the gauge
/// choice q = e.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoleculeParams {
    /// Dipole norm d (C·m)
    pub dipole: f64,
    /// Moment of inertia I (kg·m²)
    pub inertia: f64,
    /// Pole charge q (C)
    pub charge: f64,
    /// Reduced mass μ (kg)
    pub reduced_mass: f64,
}

impl MoleculeParams {
    /// Build from (μ, d, q); the moment of inertia follows as I = μd²/q².
    pub fn from_classical(reduced_mass: f64, dipole: f64, charge: f64) -> Result<Self> {
        check_positive("reduced_mass", reduced_mass)?;
        check_positive("dipole", dipole)?;
        check_positive("charge", charge)?;
        let inertia = reduced_mass * dipole * dipole / (charge * charge);
        Ok(Self { dipole, inertia, charge, reduced_mass })
    }

    /// Build from (d, I) with the q = e gauge; μ = Iq²/d² keeps I = μd²/q²
    /// exact.
    pub fn from_quantum(dipole: f64, inertia: f64) -> Result<Self> {
        Self::from_quantum_with_charge(dipole, inertia, ELEMENTARY_CHARGE)
    }

    /// Build from (d, I) with an explicit pole charge.
    pub fn from_quantum_with_charge(dipole: f64, inertia: f64, charge: f64) -> Result<Self> {
        check_positive("dipole", dipole)?;
        check_positive("inertia", inertia)?;
        check_positive("charge", charge)?;
        let reduced_mass = inertia * charge * charge / (dipole * dipole);
        Ok(Self { dipole, inertia, charge, reduced_mass })
    }

    /// Natural-units rotor: I = 1, d = √(3π), q = 1, μ = 1/(3π).
    /// With [`PhysicalConstants::natural`] this gives Γ₀ = 1 and ħ/I = 1.
    pub fn natural() -> Self {
        let dipole = (3.0 * std::f64::consts::PI).sqrt();
        Self {
            dipole,
            inertia: 1.0,
            charge: 1.0,
            reduced_mass: 1.0 / (3.0 * std::f64::consts::PI),
        }
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "{name} must be finite and positive, got {v}"
        )));
    }
    Ok(())
}

/// Radiation reaction time τ = q²/(6πε₀μc³).
pub fn radiation_reaction_time(m: &MoleculeParams, k: &PhysicalConstants) -> f64 {
    m.charge * m.charge
        / (6.0 * std::f64::consts::PI * k.eps0 * m.reduced_mass * k.c.powi(3))
}

/// Base decay rate Γ₀ = ħ²d²/(3πε₀I³c³); Γ_{l,l-1} = Γ₀·l⁴/(2l+1).
pub fn gamma0(m: &MoleculeParams, k: &PhysicalConstants) -> f64 {
    k.hbar * k.hbar * m.dipole * m.dipole
        / (3.0 * std::f64::consts::PI * k.eps0 * m.inertia.powi(3) * k.c.powi(3))
}

/// Level frequency ω_l = ħl(l+1)/(2I), so that E_l = ħω_l.
pub fn level_frequency(l: u32, m: &MoleculeParams, k: &PhysicalConstants) -> f64 {
    k.hbar * (l as f64) * (l as f64 + 1.0) / (2.0 * m.inertia)
}

/// Transition frequency ω_{l,l-1} = ω_l − ω_{l-1} = ħl/I; zero for l = 0
/// (no lower level).
pub fn transition_frequency(l: u32, m: &MoleculeParams, k: &PhysicalConstants) -> f64 {
    k.hbar * (l as f64) / m.inertia
}

/// State-resolved angular velocity Ω_l = (ħ/I)√(l(l+1)).
pub fn omega_level(l: u32, m: &MoleculeParams, k: &PhysicalConstants) -> f64 {
    k.hbar / m.inertia * ((l as f64) * (l as f64 + 1.0)).sqrt()
}
