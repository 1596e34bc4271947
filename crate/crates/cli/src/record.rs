//! The per-state output row and its re-ingestion.

use std::fs;
use std::path::Path;

use hydromag::eigensolve::{energy_from_gamma, Eigenstate};
use hydromag::oracle::{residual_grid, residual_report};
use hydromag::scaling::{to_physical, warnings_for};
use hydromag::wavefun::{assemble, RadialSeries, StateSpec};
use hydromag::{CaseId, Error};
use serde::{Deserialize, Serialize};

use crate::config::{Resolved, RunConfig};
use crate::output::{csv_cell, fmt_f64, opt, Num};
use crate::Failure;

#[allow(non_snake_case)]
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumRecord {
    pub case: u8,
    pub m: i32,
    pub k: Option<usize>,
    pub branch: Option<usize>,
    pub a: Num,
    pub gamma: Option<Num>,
    pub curlyE: Option<Num>,
    pub eps: Option<Num>,
    pub E_joule: Option<Num>,
    /// Largest relative ODE residual on the check grid.
    pub residual: Option<Num>,
    pub root_residual: Option<Num>,
    pub truncation_N: Option<usize>,
    pub xmax: Option<Num>,
    pub tol_trunc: Num,
    pub integrable: Option<bool>,
    pub norm2: Option<Num>,
    /// Admissible roots in this (m, k) cell.
    pub branches: Option<usize>,
    pub warnings: Vec<String>,
    pub notes: Vec<String>,
    pub error: Option<String>,
    /// Assembly failed for numeric rather than input reasons.
    #[serde(skip)]
    pub numeric_failure: bool,
}

pub const CSV_HEADER: &str = "case,m,k,branch,a,gamma,curlyE,eps,E_joule,residual,root_residual,truncation_N,xmax,tol_trunc,integrable,norm2,branches,warnings,notes,error";

fn cell_num(x: &Option<Num>) -> String {
    x.map(|n| if n.0.is_finite() { fmt_f64(n.0) } else { String::new() }).unwrap_or_default()
}

fn cell<T: ToString>(x: &Option<T>) -> String {
    x.as_ref().map(ToString::to_string).unwrap_or_default()
}

impl SpectrumRecord {
    fn empty(case: CaseId, m: i32, a: f64, tol_trunc: f64) -> Self {
        SpectrumRecord {
            case: case.number(),
            m,
            k: None,
            branch: None,
            a: Num(a),
            gamma: None,
            curlyE: None,
            eps: None,
            E_joule: None,
            residual: None,
            root_residual: None,
            truncation_N: None,
            xmax: None,
            tol_trunc: Num(tol_trunc),
            integrable: None,
            norm2: None,
            branches: None,
            warnings: warnings_for(m).iter().map(|w| w.code().to_string()).collect(),
            notes: Vec::new(),
            error: None,
            numeric_failure: false,
        }
    }

    /// A row for an (m, k) cell where solving failed or found nothing.
    pub fn failed(case: CaseId, m: i32, k: Option<usize>, a: f64, tol_trunc: f64, msg: String) -> Self {
        let mut r = Self::empty(case, m, a, tol_trunc);
        r.k = k;
        r.branches = Some(0);
        r.error = Some(msg);
        r
    }

    pub fn csv_row(&self) -> String {
        [
            self.case.to_string(),
            self.m.to_string(),
            cell(&self.k),
            cell(&self.branch),
            fmt_f64(self.a.0),
            cell_num(&self.gamma),
            cell_num(&self.curlyE),
            cell_num(&self.eps),
            cell_num(&self.E_joule),
            cell_num(&self.residual),
            cell_num(&self.root_residual),
            cell(&self.truncation_N),
            cell_num(&self.xmax),
            fmt_f64(self.tol_trunc.0),
            cell(&self.integrable),
            cell_num(&self.norm2),
            cell(&self.branches),
            self.warnings.join("; "),
            self.notes.join("; "),
            self.error.clone().unwrap_or_default(),
        ]
        .iter()
        .map(|s| csv_cell(s))
        .collect::<Vec<_>>()
        .join(",")
    }
}

pub fn records_csv(records: &[SpectrumRecord]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in records {
        s.push_str(&r.csv_row());
        s.push('\n');
    }
    s
}

/// Assemble, check and describe one state.
pub fn build(spec: &StateSpec, res: &Resolved, cfg: &RunConfig) -> (SpectrumRecord, Option<RadialSeries>) {
    let tol = &cfg.tolerances;
    let m = spec.m();
    let mut rec = SpectrumRecord::empty(spec.case(), m, res.a, tol.tol_trunc);
    let curly_e = spec.curly_e();
    rec.gamma = opt(spec.gamma());
    rec.curlyE = Some(Num(curly_e));
    if let StateSpec::Eigen(s) = spec {
        rec.k = Some(s.k);
        rec.branch = Some(s.branch);
        rec.root_residual = Some(Num(s.residual));
        if s.numeric_only() {
            rec.notes.push(format!("numeric-only root (degree {})", s.degree));
        }
    } else {
        rec.notes.push("zero-shift state: energy fixed, no level index".into());
    }
    if let Some((params, mu)) = res.physical {
        let e = to_physical(curly_e, &params, Some(mu), &cfg.constants);
        rec.eps = Some(Num(e.eps));
        rec.E_joule = opt(e.joules);
    }
    let r = match assemble(spec, res.a, tol.xmax, tol.tol_trunc) {
        Ok(r) => r,
        Err(e) => {
            rec.numeric_failure = !matches!(e, Error::Domain(_) | Error::Config { .. });
            rec.error = Some(e.to_string());
            return (rec, None);
        }
    };
    rec.truncation_N = Some(r.truncation_n());
    rec.xmax = Some(Num(r.xmax));
    match residual_report(curly_e, &r, &residual_grid(&r, tol.residual_points)) {
        Ok(rep) => rec.residual = Some(Num(rep.max_rel)),
        Err(e) => rec.notes.push(format!("residual check failed: {e}")),
    }
    match r.norm2() {
        Ok(n) => {
            rec.integrable = Some(true);
            rec.norm2 = Some(Num(n));
        }
        Err(Error::Integrability { reason, .. }) => {
            rec.integrable = Some(false);
            rec.notes.push(format!("not square-integrable on the evidence: {reason}"));
        }
        Err(e) => rec.notes.push(format!("norm failed: {e}")),
    }
    (rec, Some(r))
}

/// The fields of a record needed to rebuild its wavefunction.
#[derive(Debug, Clone, Deserialize)]
pub struct RecordIn {
    pub case: u8,
    pub m: i32,
    pub k: Option<usize>,
    pub branch: Option<usize>,
    pub a: f64,
    pub gamma: Option<f64>,
    pub xmax: Option<f64>,
    pub tol_trunc: f64,
    #[serde(default)]
    pub root_residual: Option<f64>,
}

impl RecordIn {
    pub fn read(path: &Path, index: usize) -> Result<Self, Failure> {
        let text = fs::read_to_string(path).map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
        let value: serde_json::Value =
            serde_json::from_str(&text).map_err(|e| Failure::usage(format!("{}: not JSON: {e}", path.display())))?;
        let item = match value {
            serde_json::Value::Array(mut v) => {
                if index >= v.len() {
                    return Err(Failure::usage(format!("record index {index} out of range ({} records)", v.len())));
                }
                v.swap_remove(index)
            }
            other => other,
        };
        serde_json::from_value(item).map_err(|e| Failure::usage(format!("malformed record: {e}")))
    }

    pub fn spec(&self) -> Result<StateSpec, Failure> {
        let case = CaseId::from_number(self.case).ok_or_else(|| Failure::usage(format!("no case {}", self.case)))?;
        if !case.admits(self.m) {
            return Err(Failure::usage(format!("{case} does not admit m = {}", self.m)));
        }
        match (self.gamma, self.k) {
            (None, _) => Ok(StateSpec::Boundary { m: self.m }),
            (Some(gamma), Some(k)) => Ok(StateSpec::Eigen(Eigenstate {
                case,
                m: self.m,
                k,
                branch: self.branch.unwrap_or(0),
                gamma,
                curly_e: energy_from_gamma(case, self.m, Some(gamma)),
                residual: self.root_residual.unwrap_or(0.0),
                degree: 0,
            })),
            (Some(_), None) => Err(Failure::usage("record has gamma but no level k")),
        }
    }
}
