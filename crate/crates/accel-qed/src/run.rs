//! Evaluation of a parsed run configuration into result tables and files.

use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use accel_qed_core::atom::{AtomModel, PolarizabilityModel};
use accel_qed_core::constants::{unruh_acceleration, unruh_temperature, Acceleration, CODATA};
use accel_qed_core::lamb::{comparable_acceleration, vf_shift, CutoffPolicy, CutoffShape};
use accel_qed_core::pair::{self, PairConfig, Term, Zone};
use accel_qed_core::quad::QuadConfig;
use accel_qed_core::wall::{total_wall_shift, ClosedFormKernel, WallConfig, WallKernel};
use accel_qed_core::Error;
use rayon::prelude::*;

use crate::config::{
    Body, CutoffSpec, Distance, Format, KernelSpec, LambConfig, LambMode, PairRunConfig, PolarizabilitySpec,
    RunConfig, UnruhInput, WallRunConfig,
};
use crate::error::CliError;
use crate::inputs::{load_atom, load_kernel_table, resolve};
use crate::output::{Cell, Table};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Default)]
pub struct Options {
    /// Output file, or output directory for a sweep.
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    /// Worker threads; `None` lets the pool decide.
    pub threads: Option<usize>,
    /// Directory relative paths in the config are resolved against.
    pub base_dir: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Report {
    pub rows: usize,
    pub failed: usize,
}

impl Report {
    /// 0 when every row converged, 2 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.failed == 0 {
            0
        } else {
            2
        }
    }
}

/// Metadata appended to every row.
struct Meta {
    quad: Option<QuadConfig>,
    hash: String,
}

impl Meta {
    fn columns(&self) -> Vec<&'static str> {
        let mut c = Vec::new();
        if self.quad.is_some() {
            c.extend(["rel_tol", "max_evaluations"]);
        }
        c.extend(["version", "config_hash", "converged", "message"]);
        c
    }

    fn cells(&self, outcome: &Result<(), String>) -> Vec<Cell> {
        let mut c = Vec::new();
        if let Some(q) = &self.quad {
            c.push(Cell::float(q.rel_tol));
            c.push(Cell::Int(q.max_evaluations as u64));
        }
        c.push(Cell::text(VERSION));
        c.push(Cell::text(&self.hash));
        c.push(Cell::Bool(outcome.is_ok()));
        c.push(match outcome {
            Ok(()) => Cell::Empty,
            Err(msg) => Cell::text(msg),
        });
        c
    }
}

/// Inputs of a row plus either its outputs or the reason it failed.
type RowResult = (Vec<Cell>, Result<Vec<Cell>, String>);

fn assemble(mut table: Table, outputs: &[&'static str], rows: Vec<RowResult>, meta: &Meta) -> (Table, usize) {
    table.columns.extend_from_slice(outputs);
    table.columns.extend(meta.columns());
    let mut failed = 0;
    for (mut inputs, result) in rows {
        let outcome = match result {
            Ok(values) => {
                debug_assert_eq!(values.len(), outputs.len());
                inputs.extend(values);
                Ok(())
            }
            Err(msg) => {
                failed += 1;
                inputs.extend(std::iter::repeat_n(Cell::Empty, outputs.len()));
                Err(msg)
            }
        };
        inputs.extend(meta.cells(&outcome));
        table.rows.push(inputs);
    }
    (table, failed)
}

fn setup_error(message: impl Into<String>) -> CliError {
    CliError::Input {
        path: PathBuf::from("config"),
        message: message.into(),
    }
}

fn shape_name(shape: CutoffShape) -> &'static str {
    match shape {
        CutoffShape::Hard => "hard",
        CutoffShape::Exponential => "exponential",
    }
}

fn cutoffs(spec: &CutoffSpec) -> Result<Vec<CutoffPolicy>, CliError> {
    spec.lambda
        .values()
        .into_iter()
        .map(|l| CutoffPolicy::new(l, spec.shape).map_err(|e| setup_error(e.to_string())))
        .collect()
}

fn acceleration(a: f64) -> Result<Acceleration, String> {
    Acceleration::new(a).map_err(|e| e.to_string())
}

/// Computes the table of a single (non-sweep) run. Returns the number of
/// rows that failed alongside it.
pub fn tabulate(cfg: &RunConfig, base_dir: &Path) -> Result<(Table, usize), CliError> {
    let hash = cfg.hash();
    match &cfg.body {
        Body::Unruh(u) => Ok(unruh(&u.input, hash)),
        Body::Lamb(l) => lamb(l, base_dir, hash),
        Body::Wall(w) => wall(w, base_dir, hash),
        Body::Pair(p) => pair_table(p, base_dir, hash),
        Body::Sweep(_) => Err(setup_error("a sweep produces several tables; use execute")),
    }
}

fn unruh(input: &UnruhInput, hash: String) -> (Table, usize) {
    let meta = Meta { quad: None, hash };
    let rows: Vec<RowResult> = match input {
        UnruhInput::Acceleration(grid) => grid
            .cm_per_s2()
            .into_par_iter()
            .map(|a| {
                let result = acceleration(a).map(|acc| vec![Cell::float(unruh_temperature(acc))]);
                (vec![Cell::float(a)], result)
            })
            .collect(),
        UnruhInput::Temperature(grid) => grid
            .values()
            .into_par_iter()
            .map(|t| {
                let result = unruh_acceleration(t)
                    .map(|a| vec![Cell::float(a.cm_per_s2())])
                    .map_err(|e| e.to_string());
                (vec![Cell::float(t)], result)
            })
            .collect(),
    };
    match input {
        UnruhInput::Acceleration(_) => assemble(Table::new(vec!["a_cm_s2"]), &["T_K"], rows, &meta),
        UnruhInput::Temperature(_) => assemble(Table::new(vec!["T_K"]), &["a_cm_s2"], rows, &meta),
    }
}

fn lamb(l: &LambConfig, base_dir: &Path, hash: String) -> Result<(Table, usize), CliError> {
    let atom = load_atom(&l.atom, base_dir)?;
    let q = l.quad.apply();
    let meta = Meta { quad: Some(q), hash };
    let policies = cutoffs(&l.cutoff)?;
    for p in &policies {
        p.validate_for(&atom).map_err(|e| setup_error(e.to_string()))?;
    }
    let label = |p: &CutoffPolicy| {
        vec![
            Cell::text(atom.name()),
            Cell::text(atom.state_label()),
            Cell::float(p.lambda()),
            Cell::text(shape_name(p.shape())),
        ]
    };
    let head = vec!["atom", "state", "lambda_rad_s", "cutoff_shape"];
    match &l.mode {
        LambMode::Shifts(grid) => {
            let accels = grid.cm_per_s2();
            let points: Vec<(CutoffPolicy, f64)> =
                policies.iter().flat_map(|p| accels.iter().map(move |&a| (*p, a))).collect();
            let rows = points
                .par_iter()
                .map(|(p, a)| {
                    let mut inputs = label(p);
                    inputs.push(Cell::float(*a));
                    let result = acceleration(*a).and_then(|acc| {
                        let b = vf_shift(&atom, acc, p, &q).map_err(|e| e.to_string())?;
                        Ok(vec![
                            Cell::float(unruh_temperature(acc)),
                            Cell::float(b.inertial_vf),
                            Cell::float(b.thermal_vf),
                            Cell::float(b.nonthermal_a2_bose),
                            Cell::float(b.nonthermal_a2_cutoff),
                            Cell::float(b.total_vf()),
                            Cell::float(b.rr),
                            Cell::float(b.total()),
                        ])
                    });
                    (inputs, result)
                })
                .collect();
            let mut columns = head;
            columns.push("a_cm_s2");
            let outputs = [
                "T_K",
                "inertial_vf_erg",
                "thermal_vf_erg",
                "nonthermal_a2_bose_erg",
                "nonthermal_a2_cutoff_erg",
                "vf_total_erg",
                "rr_erg",
                "total_erg",
            ];
            Ok(assemble(Table::new(columns), &outputs, rows, &meta))
        }
        LambMode::Crossing { lo, hi } => {
            let rows = policies
                .par_iter()
                .map(|p| {
                    let mut inputs = label(p);
                    inputs.extend([Cell::float(*lo), Cell::float(*hi)]);
                    let result = comparable_acceleration(&atom, p, (*lo, *hi), &q)
                        .map(|c| {
                            vec![
                                Cell::float(c.acceleration.cm_per_s2()),
                                Cell::float(unruh_temperature(c.acceleration)),
                                Cell::float(c.log_ratio),
                                Cell::float(c.thermal_vf),
                                Cell::float(c.nonthermal_vf),
                                Cell::Int(c.iterations as u64),
                            ]
                        })
                        .map_err(|e| e.to_string());
                    (inputs, result)
                })
                .collect();
            let mut columns = head;
            columns.extend(["bracket_lo_cm_s2", "bracket_hi_cm_s2"]);
            let outputs = ["a_star_cm_s2", "T_star_K", "log_ratio", "thermal_vf_erg", "nonthermal_vf_erg", "iterations"];
            Ok(assemble(Table::new(columns), &outputs, rows, &meta))
        }
    }
}

fn kernel_for(spec: &KernelSpec, atom: &AtomModel, base_dir: &Path) -> Result<(Box<dyn WallKernel>, String), CliError> {
    let c = CODATA.c;
    Ok(match spec {
        KernelSpec::Sin2 => {
            let k = ClosedFormKernel::new(
                move |w: f64, z0: f64, _a: f64| {
                    let s = (w * z0 / c).sin();
                    s * s
                },
                1.0,
            )
            .map_err(|e| setup_error(e.to_string()))?;
            (Box::new(k), "sin2".into())
        }
        KernelSpec::Damped { scale_rad_s } => {
            let s = scale_rad_s.unwrap_or_else(|| atom.min_abs_frequency());
            let k = ClosedFormKernel::new(move |w: f64, _z0: f64, _a: f64| w / (w + s) * (-w / s).exp(), 1.0)
                .map_err(|e| setup_error(e.to_string()))?;
            (Box::new(k), "damped".into())
        }
        KernelSpec::Tabulated { path } => (Box::new(load_kernel_table(path, base_dir)?), format!("tabulated:{path}")),
    })
}

fn wall(w: &WallRunConfig, base_dir: &Path, hash: String) -> Result<(Table, usize), CliError> {
    let atom = load_atom(&w.atom, base_dir)?;
    let (kernel, kernel_name) = kernel_for(&w.kernel, &atom, base_dir)?;
    let q = w.quad.apply();
    let meta = Meta { quad: Some(q), hash };
    let policies = cutoffs(&w.cutoff)?;
    for p in &policies {
        p.validate_for(&atom).map_err(|e| setup_error(e.to_string()))?;
    }
    let accels = w.acceleration.cm_per_s2();
    let mut points = Vec::new();
    for z0 in w.z0.values() {
        for &a in &accels {
            for p in &policies {
                points.push((z0, a, *p));
            }
        }
    }
    let kernel: &dyn WallKernel = kernel.as_ref();
    let rows = points
        .par_iter()
        .map(|&(z0, a, p)| {
            let inputs = vec![
                Cell::text(atom.name()),
                Cell::text(atom.state_label()),
                Cell::text(&kernel_name),
                Cell::float(z0),
                Cell::float(a),
                Cell::float(p.lambda()),
                Cell::text(shape_name(p.shape())),
            ];
            let result = acceleration(a).and_then(|acc| {
                let wc = WallConfig::new(z0, acc, p).map_err(|e| e.to_string())?;
                let s = total_wall_shift(&atom, kernel, &wc, &q).map_err(|e| e.to_string())?;
                Ok(vec![Cell::float(s.vf), Cell::float(s.rr), Cell::float(s.total)])
            });
            (inputs, result)
        })
        .collect();
    let columns = vec!["atom", "state", "kernel", "z0_cm", "a_cm_s2", "lambda_rad_s", "cutoff_shape"];
    Ok(assemble(Table::new(columns), &["vf_erg", "rr_erg", "total_erg"], rows, &meta))
}

fn polarizability(spec: &PolarizabilitySpec, atom: &AtomModel) -> Result<PolarizabilityModel, CliError> {
    let model = match spec {
        PolarizabilitySpec::Static { alpha0_cm3 } => PolarizabilityModel::constant(*alpha0_cm3),
        PolarizabilitySpec::Lorentz {
            alpha0_cm3,
            omega0_rad_s,
        } => PolarizabilityModel::lorentz(*alpha0_cm3, *omega0_rad_s),
        PolarizabilitySpec::LorentzMatched => PolarizabilityModel::lorentz_matched(atom),
        PolarizabilitySpec::Transitions => PolarizabilityModel::from_transitions(atom.clone()),
    };
    model.map_err(|e| setup_error(e.to_string()))
}

/// Missing values that are not failures: an exponent of a vanishing term, an
/// asymptote outside its zone.
fn optional(r: accel_qed_core::Result<f64>) -> Result<Cell, String> {
    match r {
        Ok(x) => Ok(Cell::float(x)),
        Err(Error::UndefinedExponent | Error::InvalidZone(_)) => Ok(Cell::Empty),
        Err(e) => Err(e.to_string()),
    }
}

fn pair_row(cfg: &PairConfig, dlog_r: f64, q: &QuadConfig) -> Result<Vec<Cell>, String> {
    let b = pair::total_interaction(cfg, q).map_err(|e| e.to_string())?;
    let relative = if b.static_term == 0.0 {
        Cell::Empty
    } else {
        Cell::float((b.linear_t_term + b.quadratic_t_term).abs() / b.static_term.abs())
    };
    let mut out = vec![
        Cell::Bool(b.beyond_validity),
        Cell::float(b.static_term),
        Cell::float(b.linear_t_term),
        Cell::float(b.quadratic_t_term),
        Cell::float(b.total),
        relative,
    ];
    let zone = cfg.zone();
    for which in Term::ALL {
        out.push(match zone {
            Zone::Intermediate => Cell::Empty,
            z => optional(pair::zone_asymptote(which, z, cfg, q))?,
        });
    }
    for which in Term::ALL {
        out.push(optional(pair::powerlaw_exponent(which, cfg, q, dlog_r))?);
    }
    Ok(out)
}

fn pair_table(p: &PairRunConfig, base_dir: &Path, hash: String) -> Result<(Table, usize), CliError> {
    let atom = load_atom(&p.atom, base_dir)?;
    let alpha_a = polarizability(&p.alpha_a, &atom)?;
    let alpha_b = polarizability(&p.alpha_b, &atom)?;
    let q = p.quad.apply();
    let meta = Meta { quad: Some(q), hash };
    let probe = PairConfig::new(1.0, Acceleration::ZERO, 0.0, alpha_a.clone(), alpha_b.clone())
        .map_err(|e| setup_error(e.to_string()))?;
    let distances: Vec<f64> = match &p.distance {
        Distance::Cm(g) => g.values(),
        Distance::Reduced(g) => {
            let w0 = probe
                .resonance()
                .ok_or_else(|| setup_error("R_reduced needs a frequency-dependent polarizability"))?;
            g.values().into_iter().map(|x| x * CODATA.c / w0).collect()
        }
    };
    let accels = p.acceleration.cm_per_s2();
    let times = p.t.values();
    let mut points = Vec::new();
    for &r in &distances {
        for &a in &accels {
            for &t in &times {
                points.push((r, a, t));
            }
        }
    }
    let rows = points
        .par_iter()
        .map(|&(r, a, t)| {
            let mut inputs = vec![Cell::float(r)];
            let built = acceleration(a)
                .and_then(|acc| PairConfig::new(r, acc, t, alpha_a.clone(), alpha_b.clone()).map_err(|e| e.to_string()));
            match built {
                Ok(cfg) => {
                    inputs.extend([
                        cfg.reduced_distance().map_or(Cell::Empty, Cell::float),
                        Cell::text(cfg.zone().name()),
                        Cell::float(a),
                        Cell::float(t),
                        Cell::float(cfg.expansion_parameter()),
                    ]);
                    (inputs, pair_row(&cfg, p.dlog_r, &q))
                }
                Err(msg) => {
                    inputs.extend([Cell::Empty, Cell::Empty, Cell::float(a), Cell::float(t), Cell::Empty]);
                    (inputs, Err(msg))
                }
            }
        })
        .collect();
    let columns = vec!["R_cm", "R_reduced", "zone", "a_cm_s2", "t_s", "a2t2_over_c2"];
    let outputs = [
        "beyond_validity",
        "E_static_erg",
        "E_linear_erg",
        "E_quadratic_erg",
        "E_total_erg",
        "relative_correction",
        "static_asymptote_erg",
        "linear_asymptote_erg",
        "quadratic_asymptote_erg",
        "static_exponent",
        "linear_exponent",
        "quadratic_exponent",
    ];
    Ok(assemble(Table::new(columns), &outputs, rows, &meta))
}

fn format_for(explicit: Option<Format>, configured: Option<Format>, path: Option<&Path>) -> Format {
    explicit.or(configured).unwrap_or_else(|| match path.and_then(Path::extension) {
        Some(ext) if ext == "json" => Format::Json,
        _ => Format::Csv,
    })
}

fn create(path: &Path) -> Result<File, CliError> {
    File::create(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn emit(table: &Table, format: Format, sink: &mut dyn Write, path: Option<&Path>) -> Result<(), CliError> {
    let mut buf = Vec::new();
    table.write(format, &mut buf)?;
    sink.write_all(&buf).map_err(|source| CliError::Io {
        path: path.map_or_else(|| PathBuf::from("<stdout>"), Path::to_path_buf),
        source,
    })
}

fn execute_one(cfg: &RunConfig, opts: &Options, pool: &rayon::ThreadPool, stdout: &mut dyn Write) -> Result<Report, CliError> {
    let path = opts.out.clone().or_else(|| cfg.output.path.as_ref().map(|p| resolve(&opts.base_dir, p)));
    let format = format_for(opts.format, cfg.output.format, path.as_deref());
    // open the destination before computing so an unwritable path fails fast
    let mut file = path.as_deref().map(create).transpose()?;
    let (table, failed) = pool.install(|| tabulate(cfg, &opts.base_dir))?;
    match file.as_mut() {
        Some(f) => emit(&table, format, f, path.as_deref())?,
        None => emit(&table, format, stdout, None)?,
    }
    Ok(Report {
        rows: table.rows.len(),
        failed,
    })
}

fn execute_sweep(runs: &[RunConfig], opts: &Options, pool: &rayon::ThreadPool) -> Result<Report, CliError> {
    let dir = opts.out.clone().unwrap_or_else(|| opts.base_dir.clone());
    let mut targets = Vec::new();
    for (i, run) in runs.iter().enumerate() {
        let format = format_for(opts.format, run.output.format, run.output.path.as_deref().map(Path::new));
        let name = run.output.path.clone().unwrap_or_else(|| format!("run-{i}.{}", format.name()));
        let path = resolve(&dir, &name);
        targets.push((create(&path)?, path, format));
    }
    let mut report = Report::default();
    for (run, (mut file, path, format)) in runs.iter().zip(targets) {
        let (table, failed) = pool.install(|| tabulate(run, &opts.base_dir))?;
        emit(&table, format, &mut file, Some(&path))?;
        report.rows += table.rows.len();
        report.failed += failed;
    }
    Ok(report)
}

/// Runs `cfg`, writing to `opts.out`, the configured path, or `stdout`.
pub fn execute(cfg: &RunConfig, opts: &Options, stdout: &mut dyn Write) -> Result<Report, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = opts.threads {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| CliError::Output(e.to_string()))?;
    match &cfg.body {
        Body::Sweep(runs) => execute_sweep(runs, opts, &pool),
        _ => execute_one(cfg, opts, &pool, stdout),
    }
}
