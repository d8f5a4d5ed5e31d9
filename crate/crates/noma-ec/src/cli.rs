//! Machinery behind the command-line front end: grid parsing, sweep
//! execution, figure-data regeneration, lemma reports and crossover
//! queries. Lives in the library so every piece is testable; `main.rs`
//! only parses flags and maps errors to exit codes.
//!
//! CSV conventions: fixed headers, '.' decimal separator, grid columns in
//! shortest round-trip form, computed columns with 12 significant digits.
//! Identical configurations (including the seed) produce byte-identical
//! files regardless of the worker count.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Deserialize;

use crate::analysis::{
    check_lemma1, check_lemma2, check_lemma3, check_lemma4, find_crossover, CrossoverOutcome,
    CrossoverResult, GapTarget, LemmaReport,
};
use crate::ec::{
    ec, ec1_noma_quadrature, ec2_noma_quadrature, ec_mc, ec_oma_quadrature, EcEstimate,
    EvalMethod, Method, PowerAllocation, QosExponent, Scheme, Snr, User,
};
use crate::error::Error;

/// Environment variable naming the default output directory.
pub const ENV_OUT_DIR: &str = "NOMA_EC_OUT_DIR";

/// Documented process exit codes.
pub mod exit_code {
    /// A requested check (lemma report) failed.
    pub const CHECKS_FAILED: i32 = 1;
    /// Bad flags or configuration.
    pub const USAGE: i32 = 2;
    /// Mathematically invalid input.
    pub const DOMAIN: i32 = 3;
    /// A numerical routine could not reach its accuracy target.
    pub const ACCURACY: i32 = 4;
    /// Filesystem trouble.
    pub const IO: i32 = 5;
}

/// CLI-level error with an exit-code mapping.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Math(Error),
    Io(std::io::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Math(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Math(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => exit_code::USAGE,
            CliError::Math(Error::Accuracy { .. }) => exit_code::ACCURACY,
            CliError::Math(_) => exit_code::DOMAIN,
            CliError::Io(_) => exit_code::IO,
        }
    }
}

// ---------------------------------------------------------------------------
// formatting

/// 12 significant digits, '.' separator; deterministic byte output.
pub fn fmt_sig(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else if v == 0.0 {
        "0".to_string()
    } else {
        format!("{v:.11e}")
    }
}

/// Shortest round-trip form for user-supplied grid values.
pub fn fmt_plain(v: f64) -> String {
    format!("{v}")
}

// ---------------------------------------------------------------------------
// grids and configuration

/// Parses a grid: comma-separated values where each element is a number or
/// an inclusive `start:stop:step` range, e.g. `-20:40:2` or `-1,-2,-3`.
pub fn parse_grid(text: &str) -> Result<Vec<f64>, CliError> {
    let mut out = Vec::new();
    for piece in text.split(',') {
        let piece = piece.trim();
        if piece.is_empty() {
            continue;
        }
        if let Some((start, rest)) = split_range(piece) {
            let (stop, step) = rest;
            if step <= 0.0 {
                return Err(CliError::Usage(format!(
                    "grid range '{piece}': step must be positive"
                )));
            }
            if stop < start {
                return Err(CliError::Usage(format!(
                    "grid range '{piece}': stop is below start"
                )));
            }
            let n = ((stop - start) / step).round() as i64;
            for i in 0..=n {
                let v = start + step * i as f64;
                if v <= stop + 1e-9 * step {
                    out.push(v);
                }
            }
        } else {
            out.push(piece.parse::<f64>().map_err(|_| {
                CliError::Usage(format!("cannot parse '{piece}' as a number or range"))
            })?);
        }
    }
    if out.is_empty() {
        return Err(CliError::Usage(format!("empty grid '{text}'")));
    }
    Ok(out)
}

/// Splits `start:stop:step` while leaving plain (possibly negative)
/// numbers alone.
fn split_range(piece: &str) -> Option<(f64, (f64, f64))> {
    let parts: Vec<&str> = piece.split(':').collect();
    if parts.len() != 3 {
        return None;
    }
    let start = parts[0].trim().parse::<f64>().ok()?;
    let stop = parts[1].trim().parse::<f64>().ok()?;
    let step = parts[2].trim().parse::<f64>().ok()?;
    Some((start, (stop, step)))
}

/// Evaluation method selector as it appears on the command line and in
/// config files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodKind {
    ClosedForm,
    Quadrature,
    MonteCarlo,
}

impl MethodKind {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        match text.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "closed_form" | "closed" => Ok(MethodKind::ClosedForm),
            "quadrature" | "quad" => Ok(MethodKind::Quadrature),
            "monte_carlo" | "mc" => Ok(MethodKind::MonteCarlo),
            other => Err(CliError::Usage(format!(
                "unknown method '{other}' (expected closed_form, quadrature or monte_carlo)"
            ))),
        }
    }

    fn label(&self) -> Method {
        match self {
            MethodKind::ClosedForm => Method::ClosedForm,
            MethodKind::Quadrature => Method::Quadrature,
            MethodKind::MonteCarlo => Method::MonteCarlo,
        }
    }
}

/// A full sweep description.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub rho_db_grid: Vec<f64>,
    pub beta1_grid: Vec<f64>,
    pub beta2_grid: Vec<f64>,
    pub p1_grid: Vec<f64>,
    pub method: MethodKind,
    pub mc_samples: u64,
    pub seed: u64,
    pub output_path: Option<PathBuf>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            rho_db_grid: parse_grid("-20:40:2").expect("static grid"),
            beta1_grid: vec![-1.0],
            beta2_grid: vec![-1.0],
            p1_grid: vec![0.2],
            method: MethodKind::Quadrature,
            mc_samples: 1_000_000,
            seed: 1,
            output_path: None,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        for (name, grid) in [
            ("rho_db", &self.rho_db_grid),
            ("beta1", &self.beta1_grid),
            ("beta2", &self.beta2_grid),
            ("p1", &self.p1_grid),
        ] {
            if grid.is_empty() {
                return Err(CliError::Usage(format!("{name} grid is empty")));
            }
        }
        if self.beta1_grid.iter().chain(&self.beta2_grid).any(|&b| b >= 0.0) {
            return Err(CliError::Usage(
                "delay exponents must be negative".to_string(),
            ));
        }
        if self.p1_grid.iter().any(|&p| p <= 0.0 || p >= 1.0) {
            return Err(CliError::Usage(
                "power coefficients p1 must lie in (0, 1)".to_string(),
            ));
        }
        if self.method == MethodKind::MonteCarlo && self.mc_samples < 1000 {
            return Err(CliError::Usage(
                "monte_carlo sweeps need at least 1000 samples per point".to_string(),
            ));
        }
        Ok(())
    }
}

/// Raw config file: JSON object, or `key = value` lines with `#` comments.
/// Grids may be arrays (JSON) or grid strings.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfigFile {
    pub rho_db_grid: Option<GridField>,
    pub beta1_grid: Option<GridField>,
    pub beta2_grid: Option<GridField>,
    pub p1_grid: Option<GridField>,
    pub method: Option<String>,
    pub mc_samples: Option<u64>,
    pub seed: Option<u64>,
    pub output_path: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum GridField {
    List(Vec<f64>),
    Text(String),
}

impl GridField {
    fn resolve(&self) -> Result<Vec<f64>, CliError> {
        match self {
            GridField::List(v) if v.is_empty() => {
                Err(CliError::Usage("empty grid in config file".into()))
            }
            GridField::List(v) => Ok(v.clone()),
            GridField::Text(s) => parse_grid(s),
        }
    }
}

impl SweepConfigFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        if text.trim_start().starts_with('{') {
            return serde_json::from_str(text)
                .map_err(|e| CliError::Usage(format!("bad JSON config: {e}")));
        }
        let mut cfg = SweepConfigFile::default();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Usage(format!("config line {}: expected key=value", lineno + 1))
            })?;
            let value = value.trim().trim_matches('"').to_string();
            match key.trim() {
                "rho_db_grid" => cfg.rho_db_grid = Some(GridField::Text(value)),
                "beta1_grid" => cfg.beta1_grid = Some(GridField::Text(value)),
                "beta2_grid" => cfg.beta2_grid = Some(GridField::Text(value)),
                "p1_grid" => cfg.p1_grid = Some(GridField::Text(value)),
                "method" => cfg.method = Some(value),
                "mc_samples" => {
                    cfg.mc_samples = Some(value.parse().map_err(|_| {
                        CliError::Usage(format!("config line {}: bad mc_samples", lineno + 1))
                    })?)
                }
                "seed" => {
                    cfg.seed = Some(value.parse().map_err(|_| {
                        CliError::Usage(format!("config line {}: bad seed", lineno + 1))
                    })?)
                }
                "output_path" => cfg.output_path = Some(value),
                other => {
                    return Err(CliError::Usage(format!(
                        "config line {}: unknown key '{other}'",
                        lineno + 1
                    )))
                }
            }
        }
        Ok(cfg)
    }

    /// Folds the file values over the given base configuration.
    pub fn apply(&self, mut base: SweepConfig) -> Result<SweepConfig, CliError> {
        if let Some(g) = &self.rho_db_grid {
            base.rho_db_grid = g.resolve()?;
        }
        if let Some(g) = &self.beta1_grid {
            base.beta1_grid = g.resolve()?;
        }
        if let Some(g) = &self.beta2_grid {
            base.beta2_grid = g.resolve()?;
        }
        if let Some(g) = &self.p1_grid {
            base.p1_grid = g.resolve()?;
        }
        if let Some(m) = &self.method {
            base.method = MethodKind::parse(m)?;
        }
        if let Some(n) = self.mc_samples {
            base.mc_samples = n;
        }
        if let Some(s) = self.seed {
            base.seed = s;
        }
        if let Some(p) = &self.output_path {
            base.output_path = Some(PathBuf::from(p));
        }
        Ok(base)
    }
}

// ---------------------------------------------------------------------------
// single-point evaluation with the documented fallback policy

/// One evaluated EC plus an optional fallback/failure note.
#[derive(Debug, Clone)]
pub struct EvalOutcome {
    pub est: EcEstimate,
    pub note: Option<String>,
}

fn quantity_name(scheme: Scheme, user: User) -> &'static str {
    match (scheme, user) {
        (Scheme::Noma, User::Weak) => "ec1_noma",
        (Scheme::Noma, User::Strong) => "ec2_noma",
        (Scheme::Oma, User::Weak) => "ec1_oma",
        (Scheme::Oma, User::Strong) => "ec2_oma",
    }
}

/// Evaluates one EC. `closed_form` requests fall back to quadrature when
/// the closed form does not apply (non-integer strong-user exponent) or
/// reports an accuracy failure; the note records that. Quadrature
/// failures surface the best estimate with a note instead of aborting.
#[allow(clippy::too_many_arguments)]
pub fn eval_one(
    snr: &Snr,
    pa: &PowerAllocation,
    qos: &QosExponent,
    scheme: Scheme,
    user: User,
    method: MethodKind,
    mc_samples: u64,
    seed: u64,
    stream_base: u64,
) -> EvalOutcome {
    let name = quantity_name(scheme, user);
    let beta = qos.beta();
    let run = |m: &EvalMethod| ec(snr, pa, qos, scheme, user, m);

    let outcome = match method {
        MethodKind::Quadrature => run(&EvalMethod::Quadrature).map(|e| (e, None)),
        MethodKind::MonteCarlo => {
            ec_mc(snr, pa, scheme, user, beta, mc_samples, seed, stream_base).map(|e| (e, None))
        }
        MethodKind::ClosedForm => match run(&EvalMethod::ClosedForm) {
            Ok(e) => Ok((e, None)),
            Err(Error::NonIntegerBeta2 { .. }) => run(&EvalMethod::Quadrature)
                .map(|e| (e, Some(format!("{name}:quadrature_fallback_noninteger_beta2")))),
            Err(Error::Accuracy { .. }) => run(&EvalMethod::Quadrature)
                .map(|e| (e, Some(format!("{name}:quadrature_fallback_accuracy")))),
            Err(e) => Err(e),
        },
    };

    match outcome {
        Ok((est, note)) => EvalOutcome { est, note },
        Err(e) => EvalOutcome {
            est: EcEstimate {
                value: e.estimate().unwrap_or(f64::NAN),
                method: method.label(),
                std_error: 0.0,
                samples: 0,
            },
            note: Some(format!("{name}:{}", short_error(&e))),
        },
    }
}

fn short_error(e: &Error) -> &'static str {
    match e {
        Error::Domain(_) => "domain_error",
        Error::Accuracy { .. } => "accuracy_failure",
        Error::NonIntegerBeta2 { .. } => "noninteger_beta2",
        Error::EmptySamples => "empty_samples",
    }
}

// ---------------------------------------------------------------------------
// sweep

/// One grid point of a sweep with all six EC quantities and both sums.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub rho_db: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub p1: f64,
    pub p2: f64,
    pub ec1_noma: f64,
    pub ec2_noma: f64,
    pub ec1_oma: f64,
    pub ec2_oma: f64,
    pub v_n: f64,
    pub v_o: f64,
    pub method: Method,
    pub samples: u64,
    pub seed: u64,
    pub status: String,
}

pub const SWEEP_HEADER: &str =
    "rho_db,beta1,beta2,p1,p2,ec1_noma,ec2_noma,ec1_oma,ec2_oma,v_n,v_o,method,samples,seed,status";

impl SweepRow {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            fmt_plain(self.rho_db),
            fmt_plain(self.beta1),
            fmt_plain(self.beta2),
            fmt_plain(self.p1),
            fmt_plain(self.p2),
            fmt_sig(self.ec1_noma),
            fmt_sig(self.ec2_noma),
            fmt_sig(self.ec1_oma),
            fmt_sig(self.ec2_oma),
            fmt_sig(self.v_n),
            fmt_sig(self.v_o),
            self.method,
            self.samples,
            self.seed,
            self.status
        )
    }
}

/// Runs a sweep. Rows come back in lexicographic grid order
/// (rho, beta1, beta2, p1) regardless of how the worker pool schedules
/// them; per-row failures land in the status column instead of aborting.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>, CliError> {
    cfg.validate()?;
    let mut points = Vec::new();
    for &rho_db in &cfg.rho_db_grid {
        for &b1 in &cfg.beta1_grid {
            for &b2 in &cfg.beta2_grid {
                for &p1 in &cfg.p1_grid {
                    points.push((rho_db, b1, b2, p1));
                }
            }
        }
    }

    let rows: Vec<SweepRow> = points
        .par_iter()
        .enumerate()
        .map(|(idx, &(rho_db, b1, b2, p1))| sweep_row(cfg, idx, rho_db, b1, b2, p1))
        .collect();
    Ok(rows)
}

fn sweep_row(
    cfg: &SweepConfig,
    idx: usize,
    rho_db: f64,
    beta1: f64,
    beta2: f64,
    p1: f64,
) -> SweepRow {
    // each row owns a disjoint block of RNG streams, fixed by its grid index
    let stream_base = idx as u64 * 256;
    let mut notes: Vec<String> = Vec::new();
    let mut samples = 0u64;

    let point = (|| -> Result<[EvalOutcome; 4], Error> {
        let snr = Snr::from_db(rho_db)?;
        let pa = PowerAllocation::new(p1)?;
        let q1 = QosExponent::from_beta(beta1)?;
        let q2 = QosExponent::from_beta(beta2)?;
        Ok([
            eval_one(&snr, &pa, &q1, Scheme::Noma, User::Weak, cfg.method, cfg.mc_samples, cfg.seed, stream_base),
            eval_one(&snr, &pa, &q2, Scheme::Noma, User::Strong, cfg.method, cfg.mc_samples, cfg.seed, stream_base + 64),
            eval_one(&snr, &pa, &q1, Scheme::Oma, User::Weak, cfg.method, cfg.mc_samples, cfg.seed, stream_base + 128),
            eval_one(&snr, &pa, &q2, Scheme::Oma, User::Strong, cfg.method, cfg.mc_samples, cfg.seed, stream_base + 192),
        ])
    })();

    let values = match point {
        Ok(outcomes) => {
            let vals: Vec<f64> = outcomes
                .iter()
                .map(|o| {
                    if o.est.method == Method::MonteCarlo {
                        samples = samples.max(o.est.samples);
                    }
                    if let Some(n) = &o.note {
                        notes.push(n.clone());
                    }
                    o.est.value
                })
                .collect();
            vals
        }
        Err(e) => {
            notes.push(short_error(&e).to_string());
            vec![f64::NAN; 4]
        }
    };

    SweepRow {
        rho_db,
        beta1,
        beta2,
        p1,
        p2: 1.0 - p1,
        ec1_noma: values[0],
        ec2_noma: values[1],
        ec1_oma: values[2],
        ec2_oma: values[3],
        v_n: values[0] + values[1],
        v_o: values[2] + values[3],
        method: cfg.method.label(),
        samples: if cfg.method == MethodKind::MonteCarlo {
            samples
        } else {
            0
        },
        seed: cfg.seed,
        status: if notes.is_empty() {
            "ok".to_string()
        } else {
            notes.join(";")
        },
    }
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::with_capacity(rows.len() * 160 + SWEEP_HEADER.len() + 1);
    out.push_str(SWEEP_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.csv_line());
        out.push('\n');
    }
    out
}

/// Prepends the default output directory to relative paths when
/// `NOMA_EC_OUT_DIR` is set.
pub fn resolve_out_path(p: &Path) -> PathBuf {
    if p.is_absolute() {
        return p.to_path_buf();
    }
    match std::env::var_os(ENV_OUT_DIR) {
        Some(dir) if !dir.is_empty() => PathBuf::from(dir).join(p),
        _ => p.to_path_buf(),
    }
}

// ---------------------------------------------------------------------------
// single-point report

/// Everything `noma-ec ec` prints for one operating point.
pub struct PointReport {
    pub rho_db: f64,
    pub p1: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub outcomes: [EvalOutcome; 4],
}

impl PointReport {
    pub fn compute(
        rho_db: f64,
        p1: f64,
        beta1: f64,
        beta2: f64,
        method: MethodKind,
        mc_samples: u64,
        seed: u64,
    ) -> Result<Self, CliError> {
        let snr = Snr::from_db(rho_db).map_err(usage)?;
        let pa = PowerAllocation::new(p1).map_err(usage)?;
        let q1 = QosExponent::from_beta(beta1).map_err(usage)?;
        let q2 = QosExponent::from_beta(beta2).map_err(usage)?;
        if method == MethodKind::MonteCarlo && mc_samples == 0 {
            return Err(CliError::Usage("monte_carlo needs --samples > 0".into()));
        }
        Ok(Self {
            rho_db,
            p1,
            beta1,
            beta2,
            outcomes: [
                eval_one(&snr, &pa, &q1, Scheme::Noma, User::Weak, method, mc_samples, seed, 0),
                eval_one(&snr, &pa, &q2, Scheme::Noma, User::Strong, method, mc_samples, seed, 64),
                eval_one(&snr, &pa, &q1, Scheme::Oma, User::Weak, method, mc_samples, seed, 128),
                eval_one(&snr, &pa, &q2, Scheme::Oma, User::Strong, method, mc_samples, seed, 192),
            ],
        })
    }
}

/// Maps math errors on user-supplied values to usage errors.
fn usage(e: Error) -> CliError {
    CliError::Usage(e.to_string())
}

impl fmt::Display for PointReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "rho = {} dB   P1 = {}   P2 = {}   beta1 = {}   beta2 = {}",
            fmt_plain(self.rho_db),
            fmt_plain(self.p1),
            fmt_plain(1.0 - self.p1),
            fmt_plain(self.beta1),
            fmt_plain(self.beta2)
        )?;
        let labels = ["EC1 NOMA", "EC2 NOMA", "EC1 OMA ", "EC2 OMA "];
        for (label, o) in labels.iter().zip(&self.outcomes) {
            write!(f, "{label} = {:<18}", fmt_sig(o.est.value))?;
            write!(f, " [{}]", o.est.method)?;
            if o.est.method == Method::MonteCarlo {
                write!(
                    f,
                    " +/- {} ({} samples)",
                    fmt_sig(o.est.std_error),
                    o.est.samples
                )?;
            }
            if let Some(n) = &o.note {
                write!(f, "  note: {n}")?;
            }
            writeln!(f)?;
        }
        let v_n = self.outcomes[0].est.value + self.outcomes[1].est.value;
        let v_o = self.outcomes[2].est.value + self.outcomes[3].est.value;
        writeln!(f, "V_N      = {}", fmt_sig(v_n))?;
        write!(f, "V_O      = {}", fmt_sig(v_o))
    }
}

// ---------------------------------------------------------------------------
// lemma reports and crossover

pub struct LemmaRun {
    pub reports: Vec<LemmaReport>,
    pub all_pass: bool,
}

pub fn run_lemmas(p1: f64, beta1: f64, beta2: f64) -> Result<LemmaRun, CliError> {
    let pa = PowerAllocation::new(p1).map_err(usage)?;
    if beta1 >= 0.0 || beta2 >= 0.0 {
        return Err(CliError::Usage(
            "delay exponents must be negative".to_string(),
        ));
    }
    let reports = vec![
        check_lemma1(&pa, beta1, beta2)?,
        check_lemma2(&pa, beta1)?,
        check_lemma3(&pa, beta2)?,
        check_lemma4(&pa, beta1, beta2)?,
    ];
    let all_pass = reports.iter().all(|r| r.overall);
    Ok(LemmaRun { reports, all_pass })
}

pub fn run_crossover(
    target: GapTarget,
    p1: f64,
    beta1: f64,
    beta2: f64,
    bracket_db: (f64, f64),
) -> Result<CrossoverResult, CliError> {
    let pa = PowerAllocation::new(p1).map_err(usage)?;
    let q1 = QosExponent::from_beta(beta1).map_err(usage)?;
    let q2 = QosExponent::from_beta(beta2).map_err(usage)?;
    Ok(find_crossover(target, &pa, &q1, &q2, bracket_db)?)
}

/// Human-readable switching rule for a crossover result.
pub fn switching_rule(r: &CrossoverResult) -> String {
    match r.outcome {
        CrossoverOutcome::Root {
            rho_star_db,
            ..
        } => {
            // direction from the sign at the top of the bracket
            let noma_above = matches!(r.target, GapTarget::Weak);
            if noma_above {
                format!(
                    "rule: pick OMA below {rho_star_db:.1} dB, NOMA above (weak user gains from full-bandwidth NOMA only at high SNR)"
                )
            } else {
                format!(
                    "rule: pick NOMA below {rho_star_db:.1} dB, OMA above (interference caps the NOMA side at high SNR)"
                )
            }
        }
        CrossoverOutcome::NoCrossover { gap_at_lo, .. } => {
            if gap_at_lo >= 0.0 {
                "rule: NOMA throughout this bracket".to_string()
            } else {
                "rule: OMA throughout this bracket".to_string()
            }
        }
    }
}

// ---------------------------------------------------------------------------
// figure datasets

const FIG_RHO_GRID: &str = "-20:40:2";
const FIG_BETAS: [f64; 2] = [-1.0, -2.0];
const FIG_BETAS_WIDE: [f64; 3] = [-1.0, -2.0, -3.0];
const FIG5_RHOS_DB: [f64; 5] = [1.0, 10.0, 30.0, 40.0, 50.0];
const FIG5_BETAS: [f64; 10] = [-8.0, -7.0, -6.0, -5.0, -4.0, -3.0, -2.0, -1.0, -0.5, -0.25];
const FIG_P1: f64 = 0.2;

struct QuadPoint {
    ec1_noma: f64,
    ec2_noma: f64,
    ec1_oma: f64,
    ec2_oma: f64,
}

fn quad_point(rho_db: f64, beta1: f64, beta2: f64, p1: f64) -> Result<QuadPoint, CliError> {
    let snr = Snr::from_db(rho_db)?;
    let pa = PowerAllocation::new(p1)?;
    Ok(QuadPoint {
        ec1_noma: ec1_noma_quadrature(&snr, &pa, beta1)?.value,
        ec2_noma: ec2_noma_quadrature(&snr, &pa, beta2)?.value,
        ec1_oma: ec_oma_quadrature(&snr, beta1, User::Weak)?.value,
        ec2_oma: ec_oma_quadrature(&snr, beta2, User::Strong)?.value,
    })
}

/// Writes fig2.csv ... fig9.csv into `out_dir` and returns the paths.
/// Quadrature throughout; `mc_samples > 0` adds Monte Carlo confirmation
/// columns to fig2.
pub fn run_figures(out_dir: &Path, mc_samples: u64, seed: u64) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(out_dir)?;
    let rho_grid = parse_grid(FIG_RHO_GRID)?;
    let mut written = Vec::new();

    // fig2: the four EC curves vs SNR at the default operating point
    {
        let mut rows: Vec<String> = Vec::new();
        let header = if mc_samples > 0 {
            "rho_db,ec1_noma,ec2_noma,ec1_oma,ec2_oma,ec1_noma_mc,ec2_noma_mc,ec1_oma_mc,ec2_oma_mc"
        } else {
            "rho_db,ec1_noma,ec2_noma,ec1_oma,ec2_oma"
        };
        let pts: Vec<(f64, Result<QuadPoint, CliError>)> = rho_grid
            .par_iter()
            .map(|&db| (db, quad_point(db, -1.0, -1.0, FIG_P1)))
            .collect();
        for (i, (db, p)) in pts.into_iter().enumerate() {
            let p = p?;
            let mut line = format!(
                "{},{},{},{},{}",
                fmt_plain(db),
                fmt_sig(p.ec1_noma),
                fmt_sig(p.ec2_noma),
                fmt_sig(p.ec1_oma),
                fmt_sig(p.ec2_oma)
            );
            if mc_samples > 0 {
                let snr = Snr::from_db(db)?;
                let pa = PowerAllocation::new(FIG_P1)?;
                let base = i as u64 * 256;
                for (scheme, user, off) in [
                    (Scheme::Noma, User::Weak, 0),
                    (Scheme::Noma, User::Strong, 64),
                    (Scheme::Oma, User::Weak, 128),
                    (Scheme::Oma, User::Strong, 192),
                ] {
                    let e = ec_mc(&snr, &pa, scheme, user, -1.0, mc_samples, seed, base + off)?;
                    line.push(',');
                    line.push_str(&fmt_sig(e.value));
                }
            }
            rows.push(line);
        }
        written.push(write_fig(out_dir, "fig2.csv", header, &rows)?);
    }

    // fig3/fig4: per-user NOMA EC vs SNR for several delay exponents
    for (name, pick) in [
        ("fig3.csv", 0usize),
        ("fig4.csv", 1usize),
    ] {
        let mut rows = Vec::new();
        for &beta in &FIG_BETAS_WIDE {
            let pts: Vec<(f64, Result<QuadPoint, CliError>)> = rho_grid
                .par_iter()
                .map(|&db| (db, quad_point(db, beta, beta, FIG_P1)))
                .collect();
            for (db, p) in pts {
                let p = p?;
                let v = if pick == 0 { p.ec1_noma } else { p.ec2_noma };
                rows.push(format!("{},{},{}", fmt_plain(db), fmt_plain(beta), fmt_sig(v)));
            }
        }
        let header = if pick == 0 {
            "rho_db,beta,ec1_noma"
        } else {
            "rho_db,beta,ec2_noma"
        };
        written.push(write_fig(out_dir, name, header, &rows)?);
    }

    // fig5: all four ECs vs delay exponent for several SNRs
    {
        let mut rows = Vec::new();
        for &db in &FIG5_RHOS_DB {
            let pts: Vec<(f64, Result<QuadPoint, CliError>)> = FIG5_BETAS
                .par_iter()
                .map(|&beta| (beta, quad_point(db, beta, beta, FIG_P1)))
                .collect();
            for (beta, p) in pts {
                let p = p?;
                rows.push(format!(
                    "{},{},{},{},{},{}",
                    fmt_plain(db),
                    fmt_plain(beta),
                    fmt_sig(p.ec1_noma),
                    fmt_sig(p.ec2_noma),
                    fmt_sig(p.ec1_oma),
                    fmt_sig(p.ec2_oma)
                ));
            }
        }
        written.push(write_fig(
            out_dir,
            "fig5.csv",
            "rho_db,beta,ec1_noma,ec2_noma,ec1_oma,ec2_oma",
            &rows,
        )?);
    }

    // fig6/fig7: per-user NOMA-minus-OMA gaps; fig8: both sums
    let mut rows6 = Vec::new();
    let mut rows7 = Vec::new();
    let mut rows8 = Vec::new();
    for &beta in &FIG_BETAS {
        let pts: Vec<(f64, Result<QuadPoint, CliError>)> = rho_grid
            .par_iter()
            .map(|&db| (db, quad_point(db, beta, beta, FIG_P1)))
            .collect();
        for (db, p) in pts {
            let p = p?;
            rows6.push(format!(
                "{},{},{}",
                fmt_plain(db),
                fmt_plain(beta),
                fmt_sig(p.ec1_noma - p.ec1_oma)
            ));
            rows7.push(format!(
                "{},{},{}",
                fmt_plain(db),
                fmt_plain(beta),
                fmt_sig(p.ec2_noma - p.ec2_oma)
            ));
            rows8.push(format!(
                "{},{},{},{}",
                fmt_plain(db),
                fmt_plain(beta),
                fmt_sig(p.ec1_noma + p.ec2_noma),
                fmt_sig(p.ec1_oma + p.ec2_oma)
            ));
        }
    }
    written.push(write_fig(out_dir, "fig6.csv", "rho_db,beta,ec1_noma_minus_oma", &rows6)?);
    written.push(write_fig(out_dir, "fig7.csv", "rho_db,beta,ec2_noma_minus_oma", &rows7)?);
    written.push(write_fig(out_dir, "fig8.csv", "rho_db,beta,v_n,v_o", &rows8)?);

    // fig9: sum-EC gap, varying one user's exponent with the other fixed
    {
        let mut rows = Vec::new();
        for (family, b1s, b2s) in [
            ("vary_weak", FIG_BETAS_WIDE.to_vec(), vec![-1.0]),
            ("vary_strong", vec![-1.0], FIG_BETAS_WIDE.to_vec()),
        ] {
            for &b1 in &b1s {
                for &b2 in &b2s {
                    let pts: Vec<(f64, Result<QuadPoint, CliError>)> = rho_grid
                        .par_iter()
                        .map(|&db| (db, quad_point(db, b1, b2, FIG_P1)))
                        .collect();
                    for (db, p) in pts {
                        let p = p?;
                        rows.push(format!(
                            "{},{},{},{},{}",
                            family,
                            fmt_plain(db),
                            fmt_plain(b1),
                            fmt_plain(b2),
                            fmt_sig(p.ec1_noma + p.ec2_noma - p.ec1_oma - p.ec2_oma)
                        ));
                    }
                }
            }
        }
        written.push(write_fig(
            out_dir,
            "fig9.csv",
            "family,rho_db,beta1,beta2,vn_minus_vo",
            &rows,
        )?);
    }

    Ok(written)
}

fn write_fig(
    out_dir: &Path,
    name: &str,
    header: &str,
    rows: &[String],
) -> Result<PathBuf, CliError> {
    let path = out_dir.join(name);
    let mut f = fs::File::create(&path)?;
    f.write_all(header.as_bytes())?;
    f.write_all(b"\n")?;
    for r in rows {
        f.write_all(r.as_bytes())?;
        f.write_all(b"\n")?;
    }
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("1,2,3").unwrap(), vec![1.0, 2.0, 3.0]);
        assert_eq!(parse_grid("-20:40:20").unwrap(), vec![-20.0, 0.0, 20.0, 40.0]);
        assert_eq!(parse_grid("-2").unwrap(), vec![-2.0]);
        assert_eq!(
            parse_grid("-1,-2,0:10:5").unwrap(),
            vec![-1.0, -2.0, 0.0, 5.0, 10.0]
        );
        let g = parse_grid("-20:40:2").unwrap();
        assert_eq!(g.len(), 31);
        assert!(parse_grid("").is_err());
        assert!(parse_grid("a,b").is_err());
        assert!(parse_grid("0:10:-1").is_err());
    }

    #[test]
    fn method_names() {
        assert_eq!(MethodKind::parse("closed-form").unwrap(), MethodKind::ClosedForm);
        assert_eq!(MethodKind::parse("quadrature").unwrap(), MethodKind::Quadrature);
        assert_eq!(MethodKind::parse("mc").unwrap(), MethodKind::MonteCarlo);
        assert!(MethodKind::parse("wild").is_err());
    }

    #[test]
    fn config_file_json_and_keyvalue_agree() {
        let json = r#"{ "rho_db_grid": [0, 10], "beta1_grid": "-1", "method": "quadrature", "seed": 9 }"#;
        let kv = "rho_db_grid = 0,10\nbeta1_grid = -1\nmethod = quadrature\nseed = 9\n# comment\n";
        let a = SweepConfigFile::parse(json)
            .unwrap()
            .apply(SweepConfig::default())
            .unwrap();
        let b = SweepConfigFile::parse(kv)
            .unwrap()
            .apply(SweepConfig::default())
            .unwrap();
        assert_eq!(a.rho_db_grid, b.rho_db_grid);
        assert_eq!(a.beta1_grid, b.beta1_grid);
        assert_eq!(a.seed, b.seed);
        assert_eq!(a.method, b.method);
    }

    #[test]
    fn config_rejects_unknown_keys() {
        assert!(SweepConfigFile::parse("bogus = 1\n").is_err());
        assert!(SweepConfigFile::parse(r#"{ "bogus": 1 }"#).is_err());
    }

    #[test]
    fn sweep_validation() {
        let mut cfg = SweepConfig::default();
        cfg.beta1_grid = vec![0.0];
        assert!(cfg.validate().is_err());
        let mut cfg = SweepConfig::default();
        cfg.p1_grid = vec![1.0];
        assert!(cfg.validate().is_err());
        let mut cfg = SweepConfig::default();
        cfg.method = MethodKind::MonteCarlo;
        cfg.mc_samples = 10;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn sweep_rows_are_internally_consistent() {
        let cfg = SweepConfig {
            rho_db_grid: vec![0.0, 10.0],
            beta1_grid: vec![-1.0],
            beta2_grid: vec![-1.0, -2.0],
            p1_grid: vec![0.2],
            method: MethodKind::Quadrature,
            ..Default::default()
        };
        let rows = run_sweep(&cfg).unwrap();
        assert_eq!(rows.len(), 4);
        // lexicographic order: rho outer, then beta2
        assert_eq!(rows[0].rho_db, 0.0);
        assert_eq!(rows[0].beta2, -1.0);
        assert_eq!(rows[1].beta2, -2.0);
        assert_eq!(rows[2].rho_db, 10.0);
        for r in &rows {
            assert!((r.v_n - (r.ec1_noma + r.ec2_noma)).abs() < 1e-12);
            assert!((r.v_o - (r.ec1_oma + r.ec2_oma)).abs() < 1e-12);
            assert_eq!(r.status, "ok");
            assert!((r.p1 + r.p2 - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn closed_form_sweep_falls_back_for_noninteger_beta2() {
        let cfg = SweepConfig {
            rho_db_grid: vec![10.0],
            beta1_grid: vec![-1.0],
            beta2_grid: vec![-1.5],
            p1_grid: vec![0.2],
            method: MethodKind::ClosedForm,
            ..Default::default()
        };
        let rows = run_sweep(&cfg).unwrap();
        assert_eq!(rows.len(), 1);
        assert!(rows[0]
            .status
            .contains("ec2_noma:quadrature_fallback_noninteger_beta2"));
        assert!(rows[0].ec2_noma.is_finite());
    }

    #[test]
    fn formatting_is_fixed_width_significant() {
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(f64::NAN), "nan");
        assert_eq!(fmt_sig(1.0), "1.00000000000e0");
        assert_eq!(fmt_plain(0.2), "0.2");
        assert_eq!(fmt_plain(-1.0), "-1");
    }

    #[test]
    fn point_report_runs_with_defaults() {
        let r = PointReport::compute(10.0, 0.2, -1.0, -1.0, MethodKind::Quadrature, 0, 1).unwrap();
        for o in &r.outcomes {
            assert!(o.est.value.is_finite() && o.est.value >= 0.0);
        }
        let text = r.to_string();
        assert!(text.contains("V_N"));
    }
}
