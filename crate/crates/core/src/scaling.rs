//! Physical-to-dimensionless conversion and the six-way state classification.
//!
//! Lengths are measured in Landau radii `x = sqrt(beta) r`, energies in units of
//! `beta` (`curly_e = eps / beta`), and the Coulomb strength collapses to the single
//! number `a = alpha / sqrt(beta)`.

use std::fmt;
use std::str::FromStr;

use crate::error::{domain, Error, Result};

/// Width of the band around zero shifted energy that counts as case 2/5.
pub const TOL_ZERO: f64 = 1e-12;

/// Fundamental constants in SI units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Reduced Planck constant, J s.
    pub hbar: f64,
    /// Elementary charge, C.
    pub elementary_charge: f64,
    /// Vacuum permittivity, F/m.
    pub epsilon0: f64,
    /// Electron mass, kg.
    pub electron_mass: f64,
}

impl Default for PhysicalConstants {
    /// CODATA 2018 recommended values.
    fn default() -> Self {
        Self {
            hbar: 1.054_571_817e-34,
            elementary_charge: 1.602_176_634e-19,
            epsilon0: 8.854_187_812_8e-12,
            electron_mass: 9.109_383_701_5e-31,
        }
    }
}

impl PhysicalConstants {
    /// Apply `key = value` overrides on top of `self`.
    ///
    /// Blank lines and `#` comments are skipped. Keys not naming a constant are
    /// returned to the caller untouched so that other layers (tolerances, say)
    /// can share the same file.
    pub fn apply_overrides(&mut self, text: &str) -> Result<Vec<(String, String)>> {
        let mut rest = Vec::new();
        for (line, key, value) in parse_key_values(text)? {
            let slot = match key.as_str() {
                "hbar" => &mut self.hbar,
                "e" | "elementary_charge" => &mut self.elementary_charge,
                "epsilon0" | "eps0" => &mut self.epsilon0,
                "electron_mass" | "m_e" => &mut self.electron_mass,
                _ => {
                    rest.push((key, value));
                    continue;
                }
            };
            let v: f64 = value.parse().map_err(|_| Error::Config {
                line,
                msg: format!("`{value}` is not a number"),
            })?;
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config {
                    line,
                    msg: format!("constant `{key}` must be positive and finite"),
                });
            }
            *slot = v;
        }
        Ok(rest)
    }
}

/// Split `key = value` text into trimmed pairs with 1-based line numbers.
pub fn parse_key_values(text: &str) -> Result<Vec<(usize, String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(Error::Config {
                line: i + 1,
                msg: format!("expected `key = value`, got `{line}`"),
            });
        };
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() {
            return Err(Error::Config {
                line: i + 1,
                msg: "empty key".into(),
            });
        }
        out.push((i + 1, k.to_string(), v.to_string()));
    }
    Ok(out)
}

/// Field and charge parameters of one azimuthal sector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    /// `e B / hbar`, inverse area.
    pub beta: f64,
    /// `2 mu Z e^2 / (4 pi eps0 hbar^2)`, inverse length.
    pub alpha: f64,
    /// `alpha / sqrt(beta)`, dimensionless.
    pub a: f64,
    /// Azimuthal quantum number.
    pub m: i32,
}

impl Params {
    pub fn new(beta: f64, alpha: f64, m: i32) -> Result<Self> {
        if !(beta.is_finite() && beta > 0.0) {
            return domain(format!("beta must be positive, got {beta}"));
        }
        if !(alpha.is_finite() && alpha > 0.0) {
            return domain(format!("alpha must be positive, got {alpha}"));
        }
        Ok(Self {
            beta,
            alpha,
            a: alpha / beta.sqrt(),
            m,
        })
    }

    /// Parameters already in Landau units (`beta = 1`, so `alpha = a`).
    pub fn dimensionless(a: f64, m: i32) -> Result<Self> {
        Self::new(1.0, a, m)
    }
}

/// Convert `(Z, B, mu)` in SI units into [`Params`].
pub fn nondimensionalize(
    z: u32,
    b_tesla: f64,
    mu: f64,
    m: i32,
    constants: &PhysicalConstants,
) -> Result<Params> {
    if z == 0 {
        return domain("nuclear charge Z must be at least 1");
    }
    if !(b_tesla.is_finite() && b_tesla > 0.0) {
        return domain(format!("magnetic field must be positive, got {b_tesla} T"));
    }
    if !(mu.is_finite() && mu > 0.0) {
        return domain(format!("reduced mass must be positive, got {mu} kg"));
    }
    let PhysicalConstants {
        hbar,
        elementary_charge: e,
        epsilon0,
        ..
    } = *constants;
    let beta = e * b_tesla / hbar;
    let alpha = 2.0 * mu * f64::from(z) * e * e / (4.0 * std::f64::consts::PI * epsilon0 * hbar * hbar);
    Params::new(beta, alpha, m)
}

/// Sign of the interaction between the field and the orbital motion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    /// `m >= 0`: magnetic force pulls the electron towards the nucleus.
    Attractive,
    /// `m < 0`: magnetic force pushes the electron away.
    Repulsive,
}

impl Family {
    pub fn of(m: i32) -> Self {
        if m >= 0 {
            Family::Attractive
        } else {
            Family::Repulsive
        }
    }
}

/// Sign of the shifted energy `curly_e - (m + |m| + 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ShiftSign {
    Negative,
    Zero,
    Positive,
}

/// One of the six solution classes, numbered 1..=6.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CaseId {
    pub family: Family,
    pub sign: ShiftSign,
}

impl CaseId {
    pub fn new(family: Family, sign: ShiftSign) -> Self {
        Self { family, sign }
    }

    pub fn number(self) -> u8 {
        let base = match self.family {
            Family::Attractive => 0,
            Family::Repulsive => 3,
        };
        base + match self.sign {
            ShiftSign::Negative => 1,
            ShiftSign::Zero => 2,
            ShiftSign::Positive => 3,
        }
    }

    pub fn from_number(n: u8) -> Option<Self> {
        let family = match n {
            1..=3 => Family::Attractive,
            4..=6 => Family::Repulsive,
            _ => return None,
        };
        let sign = match (n - 1) % 3 {
            0 => ShiftSign::Negative,
            1 => ShiftSign::Zero,
            _ => ShiftSign::Positive,
        };
        Some(Self { family, sign })
    }

    /// The case a state with azimuthal number `m` and this shift sign falls in.
    pub fn for_m(m: i32, sign: ShiftSign) -> Self {
        Self::new(Family::of(m), sign)
    }

    /// True when `m` belongs to this case's family.
    pub fn admits(self, m: i32) -> bool {
        Family::of(m) == self.family
    }
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "case {}", self.number())
    }
}

impl FromStr for CaseId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let digits = s.trim().trim_start_matches("case").trim();
        digits
            .parse::<u8>()
            .ok()
            .and_then(CaseId::from_number)
            .ok_or_else(|| Error::Domain(format!("`{s}` is not a case number 1..=6")))
    }
}

/// `m + |m| + 1`: the energy offset separating the three sign cases.
pub fn energy_shift(m: i32) -> f64 {
    f64::from(m) + f64::from(m.abs()) + 1.0
}

/// `M = 2|m| + 1`.
pub fn centrifugal_index(m: i32) -> u32 {
    2 * m.unsigned_abs() + 1
}

pub fn classify(m: i32, curly_e: f64) -> CaseId {
    let shifted = curly_e - energy_shift(m);
    let sign = if shifted < -TOL_ZERO {
        ShiftSign::Negative
    } else if shifted > TOL_ZERO {
        ShiftSign::Positive
    } else {
        ShiftSign::Zero
    };
    CaseId::for_m(m, sign)
}

/// A single energy in the three unit systems in use.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyTriple {
    /// Landau units.
    pub curly_e: f64,
    /// `2 mu E / hbar^2`, inverse area.
    pub eps: f64,
    /// Joules, available when the reduced mass is known.
    pub joules: Option<f64>,
}

pub fn to_physical(
    curly_e: f64,
    params: &Params,
    mu: Option<f64>,
    constants: &PhysicalConstants,
) -> EnergyTriple {
    let eps = params.beta * curly_e;
    let joules = mu.map(|mu| constants.hbar * constants.hbar * eps / (2.0 * mu));
    EnergyTriple {
        curly_e,
        eps,
        joules,
    }
}

/// Caveats attached to results.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Warning {
    /// Repulsive sector: the state may lie past the field strength at which the
    /// electron no longer encloses the nucleus. That threshold is not computed.
    RepulsiveUnbindingUnchecked,
}

impl Warning {
    pub fn code(self) -> &'static str {
        match self {
            Warning::RepulsiveUnbindingUnchecked => "repulsive-sector: may be unphysical beyond the unbinding threshold (not checked)",
        }
    }
}

pub fn warnings_for(m: i32) -> Vec<Warning> {
    if m < 0 {
        vec![Warning::RepulsiveUnbindingUnchecked]
    } else {
        Vec::new()
    }
}
