use std::fmt::Write as _;

use hydromag::eigensolve::{solve_level, Eigenstate};
use hydromag::oracle::{fd_match, fd_spectrum_below, landau_curly_e, FD_MATCH_TOL, RESIDUAL_PASS};
use hydromag::scaling::classify;
use hydromag::wavefun::{assemble, RadialSeries, StateSpec};
use hydromag::{CaseId, SeriesFamily};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{self, InputMode, Resolved, RunConfig, Tolerances};
use crate::output::{emit, fmt_f64, opt, to_json, Num};
use crate::record::{build, records_csv, RecordIn, SpectrumRecord};
use crate::{Cli, Cmd, Failure, Format, InputArgs, TolArgs};

pub fn run(cli: Cli) -> Result<(), Failure> {
    let (constants, file_tol) = config::load(cli.config.as_deref())?;
    let out = cli.out.as_deref();
    let text = match cli.cmd {
        Cmd::Classify { m, energy } => classify_cmd(m, energy, cli.format)?,
        Cmd::Solve { input, m, k, case, tol } => {
            let cfg = run_config(&input, &tol, constants, file_tol)?;
            solve_cmd(&cfg, m, k, case, cli.format.unwrap_or(Format::Json), out)?
        }
        Cmd::Spectrum {
            input,
            m_min,
            m_max,
            k_min,
            k_max,
            case,
            all_branches,
            tol,
        } => {
            let cfg = run_config(&input, &tol, constants, file_tol)?;
            let sweep = Sweep {
                m_min,
                m_max,
                k_min,
                k_max,
                case,
                all_branches,
            };
            spectrum_cmd(&cfg, &sweep, cli.format.unwrap_or(Format::Json))?
        }
        Cmd::Wavefunction {
            input,
            m,
            case,
            k,
            branch,
            from_record,
            record_index,
            points,
            normalize,
            tol,
        } => {
            let (spec, a, tolerances) = match from_record {
                Some(path) => {
                    let rec = RecordIn::read(&path, record_index)?;
                    let mut t = merge_tol(&tol, file_tol);
                    t.tol_trunc = rec.tol_trunc;
                    t.xmax = rec.xmax;
                    (rec.spec()?, rec.a, t)
                }
                None => {
                    let cfg = run_config(&input, &tol, constants, file_tol)?;
                    let (m, case) = (m.unwrap_or_default(), case.unwrap_or_default());
                    let res = cfg.resolve(m)?;
                    (pick_state(res.a, m, case, k, branch)?, res.a, cfg.tolerances)
                }
            };
            let r = assemble(&spec, a, tolerances.xmax, tolerances.tol_trunc)?;
            wavefunction_out(&r, points, normalize, cli.format.unwrap_or(Format::Csv))?
        }
        Cmd::Verify {
            input,
            m,
            k_max,
            fd_l,
            fd_n_grid,
            tol,
        } => {
            let mut cfg = run_config(&input, &tol, constants, file_tol)?;
            if let Some(l) = fd_l {
                cfg.tolerances.fd_l = l;
            }
            if let Some(n) = fd_n_grid {
                cfg.tolerances.fd_n_grid = n;
            }
            if cli.format == Some(Format::Csv) {
                return Err(Failure::usage("verify writes JSON only"));
            }
            verify_cmd(&cfg, m, k_max)?
        }
    };
    emit(&text, out)
}

fn merge_tol(args: &TolArgs, mut t: Tolerances) -> Tolerances {
    if let Some(v) = args.tol_trunc {
        t.tol_trunc = v;
    }
    if args.xmax.is_some() {
        t.xmax = args.xmax;
    }
    if let Some(v) = args.residual_points {
        t.residual_points = v;
    }
    t
}

fn run_config(
    input: &InputArgs,
    tol: &TolArgs,
    constants: hydromag::PhysicalConstants,
    file_tol: Tolerances,
) -> Result<RunConfig, Failure> {
    let mode = match (input.a, input.z, input.b, input.mu) {
        (Some(a), None, None, None) => {
            if !(a.is_finite() && a >= 0.0) {
                return Err(Failure::usage(format!("--a must be finite and non-negative, got {a}")));
            }
            InputMode::Dimensionless { a }
        }
        (None, Some(z), Some(b_tesla), Some(mu)) => InputMode::Physical { z, b_tesla, mu },
        _ => return Err(Failure::usage("give either --a, or all of --z --b --mu")),
    };
    let tolerances = merge_tol(tol, file_tol);
    if tolerances.residual_points < 2 {
        return Err(Failure::usage("--residual-points must be at least 2"));
    }
    Ok(RunConfig {
        mode,
        constants,
        tolerances,
    })
}

fn parse_case(n: u8) -> Result<CaseId, Failure> {
    CaseId::from_number(n).ok_or_else(|| Failure::usage(format!("case must be 1-6, got {n}")))
}

fn classify_cmd(m: i32, energy: f64, format: Option<Format>) -> Result<String, Failure> {
    if !energy.is_finite() {
        return Err(Failure::usage("energy must be finite"));
    }
    let case = classify(m, energy);
    Ok(match format {
        Some(Format::Json) => {
            #[allow(non_snake_case)]
            #[derive(Serialize)]
            struct Out {
                case: u8,
                m: i32,
                curlyE: Num,
            }
            to_json(&Out {
                case: case.number(),
                m,
                curlyE: Num(energy),
            })?
        }
        Some(Format::Csv) => format!("case,m,curlyE\n{},{m},{}\n", case.number(), fmt_f64(energy)),
        None => format!("{case}\n"),
    })
}

fn families_for(case: Option<u8>, m: i32) -> Result<Vec<SeriesFamily>, Failure> {
    let Some(n) = case else {
        return Ok(vec![SeriesFamily::Case14, SeriesFamily::Case36]);
    };
    let c = parse_case(n)?;
    if !c.admits(m) {
        return Err(Failure::usage(format!("{c} does not admit m = {m}")));
    }
    Ok(vec![SeriesFamily::of_case(c)])
}

fn level(family: SeriesFamily, a: f64, m: i32, k: usize) -> Result<Vec<Eigenstate>, Failure> {
    if k < family.min_level() {
        return Err(Failure::usage(format!(
            "level {k} is below the first level ({}) of {}",
            family.min_level(),
            family.label()
        )));
    }
    Ok(solve_level(family, a, m, k)?)
}

fn solve_cmd(
    cfg: &RunConfig,
    m: i32,
    k: Option<usize>,
    case: Option<u8>,
    format: Format,
    out: Option<&std::path::Path>,
) -> Result<String, Failure> {
    let res = cfg.resolve(m)?;
    let mut records = Vec::new();
    let specs: Vec<StateSpec> = match case.map(parse_case).transpose()? {
        Some(c) if c.sign == hydromag::ShiftSign::Zero => {
            if !c.admits(m) {
                return Err(Failure::usage(format!("{c} does not admit m = {m}")));
            }
            vec![StateSpec::Boundary { m }]
        }
        _ => {
            let k = k.ok_or_else(|| Failure::usage("--k is required outside cases 2 and 5"))?;
            if k == 0 {
                return Err(Failure::usage("--k must be at least 1"));
            }
            let mut specs = Vec::new();
            for family in families_for(case, m)? {
                if case.is_none() && k < family.min_level() {
                    continue;
                }
                specs.extend(level(family, res.a, m, k)?.into_iter().map(StateSpec::Eigen));
            }
            specs
        }
    };
    if specs.is_empty() {
        return Err(Failure::no_solution(format!("no admissible root for m = {m}, k = {}", k.unwrap_or(0))));
    }
    let mut numeric = None;
    for spec in &specs {
        let (mut rec, _) = build(spec, &res, cfg);
        if let StateSpec::Eigen(_) = spec {
            rec.branches = Some(specs.iter().filter(|s| s.case() == spec.case()).count());
        }
        if rec.numeric_failure && numeric.is_none() {
            numeric = rec.error.clone();
        }
        records.push(rec);
    }
    let text = render(&records, format)?;
    match numeric {
        // Records are still written when one of them failed numerically.
        Some(msg) => {
            emit(&text, out)?;
            Err(Failure::numeric(msg))
        }
        None => Ok(text),
    }
}

fn render(records: &[SpectrumRecord], format: Format) -> Result<String, Failure> {
    match format {
        Format::Json => to_json(&records),
        Format::Csv => Ok(records_csv(records)),
    }
}

pub struct Sweep {
    pub m_min: i32,
    pub m_max: i32,
    pub k_min: usize,
    pub k_max: usize,
    pub case: Option<u8>,
    pub all_branches: bool,
}

fn spectrum_cmd(cfg: &RunConfig, sweep: &Sweep, format: Format) -> Result<String, Failure> {
    if sweep.m_min > sweep.m_max || sweep.k_min > sweep.k_max || sweep.k_min == 0 {
        return Err(Failure::usage("empty or invalid m/k range"));
    }
    let families = match sweep.case {
        None => vec![SeriesFamily::Case14, SeriesFamily::Case36],
        Some(n) => {
            let f = SeriesFamily::of_case(parse_case(n)?);
            if f == SeriesFamily::Case25 {
                return Err(Failure::usage("cases 2 and 5 have no levels to sweep"));
            }
            vec![f]
        }
    };
    let mut cells = Vec::new();
    for m in sweep.m_min..=sweep.m_max {
        for &family in &families {
            for k in sweep.k_min..=sweep.k_max {
                cells.push((m, family, k));
            }
        }
    }
    let rows: Vec<Vec<SpectrumRecord>> = cells
        .par_iter()
        .map(|&(m, family, k)| spectrum_cell(cfg, m, family, k, sweep.all_branches))
        .collect();
    render(&rows.into_iter().flatten().collect::<Vec<_>>(), format)
}

fn spectrum_cell(cfg: &RunConfig, m: i32, family: SeriesFamily, k: usize, all_branches: bool) -> Vec<SpectrumRecord> {
    let case = family.case_for(m);
    let res = match cfg.resolve(m) {
        Ok(r) => r,
        Err(f) => return vec![SpectrumRecord::failed(case, m, Some(k), f64::NAN, cfg.tolerances.tol_trunc, f.msg)],
    };
    let states = match level(family, res.a, m, k) {
        Ok(s) => s,
        Err(f) => return vec![SpectrumRecord::failed(case, m, Some(k), res.a, cfg.tolerances.tol_trunc, f.msg)],
    };
    if states.is_empty() {
        return vec![SpectrumRecord::failed(
            case,
            m,
            Some(k),
            res.a,
            cfg.tolerances.tol_trunc,
            "no admissible root".into(),
        )];
    }
    let n = states.len();
    let take = if all_branches { n } else { 1 };
    states
        .into_iter()
        .take(take)
        .map(|s| {
            let (mut rec, _) = build(&StateSpec::Eigen(s), &res, cfg);
            rec.branches = Some(n);
            rec
        })
        .collect()
}

fn pick_state(a: f64, m: i32, case: u8, k: Option<usize>, branch: usize) -> Result<StateSpec, Failure> {
    let c = parse_case(case)?;
    if !c.admits(m) {
        return Err(Failure::usage(format!("{c} does not admit m = {m}")));
    }
    if c.sign == hydromag::ShiftSign::Zero {
        return Ok(StateSpec::Boundary { m });
    }
    let k = k.ok_or_else(|| Failure::usage("--k is required outside cases 2 and 5"))?;
    let states = level(SeriesFamily::of_case(c), a, m, k)?;
    let n = states.len();
    states
        .into_iter()
        .nth(branch)
        .map(StateSpec::Eigen)
        .ok_or_else(|| Failure::no_solution(format!("no admissible root with branch {branch} ({n} found)")))
}

fn wavefunction_out(r: &RadialSeries, points: usize, normalize: bool, format: Format) -> Result<String, Failure> {
    if points < 2 {
        return Err(Failure::usage("--points must be at least 2"));
    }
    let norm = if normalize { r.norm2().ok() } else { None };
    let c = norm.map_or(1.0, |n| 1.0 / n.sqrt());
    let samples: Vec<(f64, f64, f64)> = (0..points)
        .map(|i| {
            let x = if i + 1 == points { r.xmax } else { r.xmax * i as f64 / (points - 1) as f64 };
            let v = c * r.evaluate(x)?;
            Ok((x, v, v * x.sqrt()))
        })
        .collect::<Result<_, hydromag::Error>>()?;
    let normalized = norm.is_some();
    if normalize && !normalized {
        eprintln!("hydromag: norm not established; samples are in the a_0 = 1 gauge");
    }
    match format {
        Format::Csv => {
            let mut s = String::from("x,R,u,normalized\n");
            for (x, v, u) in samples {
                let _ = writeln!(s, "{},{},{},{normalized}", fmt_f64(x), fmt_f64(v), fmt_f64(u));
            }
            Ok(s)
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Sample {
                x: Num,
                #[serde(rename = "R")]
                r: Num,
                u: Num,
            }
            #[allow(non_snake_case)]
            #[derive(Serialize)]
            struct Out {
                case: u8,
                m: i32,
                gamma: Option<Num>,
                xmax: Num,
                truncation_N: usize,
                normalized: bool,
                samples: Vec<Sample>,
            }
            to_json(&Out {
                case: r.case.number(),
                m: r.m,
                gamma: opt(r.gamma),
                xmax: Num(r.xmax),
                truncation_N: r.truncation_n(),
                normalized,
                samples: samples
                    .into_iter()
                    .map(|(x, v, u)| Sample {
                        x: Num(x),
                        r: Num(v),
                        u: Num(u),
                    })
                    .collect(),
            })
        }
    }
}

#[allow(non_snake_case)]
#[derive(Serialize)]
struct StateCheck {
    case: u8,
    k: Option<usize>,
    branch: Option<usize>,
    gamma: Option<Num>,
    curlyE: Num,
    residual: Option<Num>,
    residual_pass: bool,
    fd_nearest: Option<Num>,
    fd_distance: Option<Num>,
    fd_match: bool,
    integrable: Option<bool>,
    norm2: Option<Num>,
}

#[allow(non_snake_case)]
#[derive(Serialize)]
struct LandauCheck {
    n_r: u32,
    expected: Num,
    fd: Option<Num>,
    distance: Option<Num>,
    pass: bool,
}

#[derive(Serialize)]
struct Orthogonality {
    labels: Vec<String>,
    /// Normalized overlaps; `null` where a norm does not exist.
    matrix: Vec<Vec<Option<Num>>>,
    max_offdiag: Option<Num>,
    pass: bool,
}

#[derive(Serialize)]
struct VerifyReport {
    a: Num,
    m: i32,
    k_max: usize,
    fd_l: Num,
    fd_n_grid: usize,
    fd_spectrum: Vec<Num>,
    states: Vec<StateCheck>,
    landau: Vec<LandauCheck>,
    orthogonality: Orthogonality,
    all_pass: bool,
}

fn verify_cmd(cfg: &RunConfig, m: i32, k_max: usize) -> Result<String, Failure> {
    let res: Resolved = cfg.resolve(m)?;
    let a = res.a;
    let mut specs = Vec::new();
    if a > 0.0 {
        for family in [SeriesFamily::Case14, SeriesFamily::Case36] {
            for k in family.min_level()..=k_max {
                specs.extend(solve_level(family, a, m, k)?.into_iter().map(StateSpec::Eigen));
            }
        }
    }
    specs.push(StateSpec::Boundary { m });
    let built: Vec<(SpectrumRecord, Option<RadialSeries>)> = specs.par_iter().map(|s| build(s, &res, cfg)).collect();

    let landau_levels = 3u32;
    let emax = specs
        .iter()
        .map(StateSpec::curly_e)
        .chain(std::iter::once(landau_curly_e(landau_levels, m)))
        .fold(f64::NEG_INFINITY, f64::max)
        + 1.0;
    let t = &cfg.tolerances;
    let fd = fd_spectrum_below(a, m, t.fd_l, t.fd_n_grid, emax)?;

    let mut all_pass = true;
    let states: Vec<StateCheck> = built
        .iter()
        .map(|(rec, _)| {
            let e = rec.curlyE.map_or(f64::NAN, |n| n.0);
            let near = fd_match(e, &fd);
            let fd_ok = near.is_some_and(|(_, d)| d < FD_MATCH_TOL);
            let res_ok = rec.residual.is_some_and(|r| r.0 < RESIDUAL_PASS);
            all_pass &= fd_ok && res_ok;
            StateCheck {
                case: rec.case,
                k: rec.k,
                branch: rec.branch,
                gamma: rec.gamma,
                curlyE: Num(e),
                residual: rec.residual,
                residual_pass: res_ok,
                fd_nearest: near.map(|n| Num(n.0)),
                fd_distance: near.map(|n| Num(n.1)),
                fd_match: fd_ok,
                integrable: rec.integrable,
                norm2: rec.norm2,
            }
        })
        .collect();

    let landau = if a == 0.0 {
        (0..landau_levels)
            .map(|n_r| {
                let expected = landau_curly_e(n_r, m);
                let near = fd_match(expected, &fd);
                let pass = near.is_some_and(|(_, d)| d < FD_MATCH_TOL);
                all_pass &= pass;
                LandauCheck {
                    n_r,
                    expected: Num(expected),
                    fd: near.map(|n| Num(n.0)),
                    distance: near.map(|n| Num(n.1)),
                    pass,
                }
            })
            .collect()
    } else {
        Vec::new()
    };

    let labels: Vec<String> = built
        .iter()
        .map(|(rec, _)| match (rec.k, rec.branch) {
            (Some(k), Some(b)) => format!("case {} k={k} branch={b}", rec.case),
            _ => format!("case {}", rec.case),
        })
        .collect();
    let n = built.len();
    let mut matrix = vec![vec![None; n]; n];
    let mut max_off: Option<f64> = None;
    let mut ortho_ok = true;
    for i in 0..n {
        for j in i..n {
            let v = match (&built[i].1, &built[j].1) {
                (Some(p), Some(q)) => p.overlap(q).ok(),
                _ => None,
            };
            matrix[i][j] = v.map(Num);
            matrix[j][i] = v.map(Num);
            if i != j {
                match v {
                    Some(x) => max_off = Some(max_off.map_or(x.abs(), |y: f64| y.max(x.abs()))),
                    None => ortho_ok = false,
                }
            }
        }
    }
    ortho_ok &= max_off.map_or(true, |x| x < 1e-6);
    all_pass &= ortho_ok;

    to_json(&VerifyReport {
        a: Num(a),
        m,
        k_max,
        fd_l: Num(t.fd_l),
        fd_n_grid: t.fd_n_grid,
        fd_spectrum: fd.into_iter().map(Num).collect(),
        states,
        landau,
        orthogonality: Orthogonality {
            labels,
            matrix,
            max_offdiag: opt(max_off),
            pass: ortho_ok,
        },
        all_pass,
    })
}
