use std::fs;
use std::path::Path;

use hydromag::oracle::{DEFAULT_L, DEFAULT_N_GRID};
use hydromag::scaling::nondimensionalize;
use hydromag::wavefun::TOL_TRUNC;
use hydromag::{Params, PhysicalConstants};

use crate::Failure;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InputMode {
    Dimensionless { a: f64 },
    Physical { z: u32, b_tesla: f64, mu: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tolerances {
    pub tol_trunc: f64,
    pub xmax: Option<f64>,
    pub residual_points: usize,
    pub fd_l: f64,
    pub fd_n_grid: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            tol_trunc: TOL_TRUNC,
            xmax: None,
            residual_points: 200,
            fd_l: DEFAULT_L,
            fd_n_grid: DEFAULT_N_GRID,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mode: InputMode,
    pub constants: PhysicalConstants,
    pub tolerances: Tolerances,
}

/// Dimensionless coupling plus, in physical mode, the parameters for unit conversion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resolved {
    pub a: f64,
    pub physical: Option<(Params, f64)>,
}

impl RunConfig {
    pub fn resolve(&self, m: i32) -> Result<Resolved, Failure> {
        match self.mode {
            InputMode::Dimensionless { a } => Ok(Resolved { a, physical: None }),
            InputMode::Physical { z, b_tesla, mu } => {
                let p = nondimensionalize(z, b_tesla, mu, m, &self.constants)?;
                Ok(Resolved {
                    a: p.a,
                    physical: Some((p, mu)),
                })
            }
        }
    }
}

/// Constants and tolerance defaults from a key-value file.
pub fn load(path: Option<&Path>) -> Result<(PhysicalConstants, Tolerances), Failure> {
    let mut constants = PhysicalConstants::default();
    let mut tol = Tolerances::default();
    let Some(path) = path else {
        return Ok((constants, tol));
    };
    let text = fs::read_to_string(path).map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
    for (key, value) in constants.apply_overrides(&text)? {
        let bad = |what: &str| Failure::usage(format!("config key {key}: expected {what}, got {value:?}"));
        match key.as_str() {
            "tol_trunc" => tol.tol_trunc = value.parse().map_err(|_| bad("a number"))?,
            "xmax" => tol.xmax = Some(value.parse().map_err(|_| bad("a number"))?),
            "residual_points" => tol.residual_points = value.parse().map_err(|_| bad("an integer"))?,
            "fd_l" => tol.fd_l = value.parse().map_err(|_| bad("a number"))?,
            "fd_n_grid" => tol.fd_n_grid = value.parse().map_err(|_| bad("an integer"))?,
            _ => return Err(Failure::usage(format!("unknown config key {key}"))),
        }
    }
    Ok((constants, tol))
}
