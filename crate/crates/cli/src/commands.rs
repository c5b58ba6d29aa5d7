//! The five commands. Each writes its artifact and returns the exit status.

use std::io::Write;
use std::path::Path;

use finespec::oracle::resolvent_growth_probe;
use finespec::spectral_sets::two_band_check;
use finespec::{
    classify_grid, spectrum_report, Classifier, Complex64, GridScanResult, SpectralError,
    SpectrumPart, Window,
};
use thiserror::Error;

use crate::args::ArgError;
use crate::config::{ConfigError, RunConfig};

/// Power-iteration steps used by `probe`.
pub const PROBE_ITERS: usize = 200;
/// Largest section size accepted by `probe`.
pub const MAX_PROBE_N: usize = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Ok = 0,
    Config = 2,
    Unresolved = 3,
    Io = 4,
    TwoBandFails = 5,
    SingularPivot = 6,
}

impl Exit {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Arg(#[from] ArgError),
    #[error("two-band check needs period 2, got period {0}")]
    WrongPeriod(usize),
    #[error("cannot write {target}: {source}")]
    Io {
        target: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Singular(SpectralError),
}

impl CliError {
    pub fn exit(&self) -> Exit {
        match self {
            CliError::Config(_) | CliError::Arg(_) | CliError::WrongPeriod(_) => Exit::Config,
            CliError::Io { .. } => Exit::Io,
            CliError::Singular(_) => Exit::SingularPivot,
        }
    }
}

fn io_err(target: &str) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        target: target.to_string(),
        source,
    }
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    out.write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .map_err(io_err("stdout"))
}

/// Writes `text` to `path`, or to `stdout` when no path is given.
fn deliver(path: Option<&Path>, stdout: &mut dyn Write, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(io_err(&p.display().to_string())),
        None => emit(stdout, text),
    }
}

/// Shortest round-trip rendering: `0.5`, `0.0`, `1e-9`.
fn short(x: f64) -> String {
    format!("{x:?}")
}

/// Fixed 17-significant-digit rendering used in CSV output.
pub fn csv_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// `re, im, phi_abs, part, goldberg, evidence-summary`
pub fn classify_record(cfg: &RunConfig, lambda: Complex64) -> (String, SpectrumPart) {
    let c = Classifier::new(&cfg.spec, cfg.exponent, cfg.options).classify(lambda);
    let line = format!(
        "{}, {}, {}, {}, {}, {}",
        short(lambda.re),
        short(lambda.im),
        short(c.evidence.region.phi_abs),
        c.part.as_str(),
        c.goldberg.as_str(),
        c.evidence.summary()
    );
    (line, c.part)
}

pub fn cmd_classify(
    cfg: &RunConfig,
    lambda: Complex64,
    stdout: &mut dyn Write,
) -> Result<Exit, CliError> {
    let (line, part) = classify_record(cfg, lambda);
    emit(stdout, &format!("{line}\n"))?;
    Ok(if part == SpectrumPart::Unresolved {
        Exit::Unresolved
    } else {
        Exit::Ok
    })
}

pub const GRID_HEADER: &str = "re,im,phi_abs,zone,part,goldberg";

/// CSV rows in index order: `im` ascending, then `re` ascending.
pub fn grid_csv(grid: &GridScanResult) -> String {
    let mut s = String::with_capacity(96 * (grid.cells.len() + 1));
    s.push_str(GRID_HEADER);
    s.push('\n');
    for cell in &grid.cells {
        let c = &cell.classification;
        s.push_str(&format!(
            "{},{},{},{},{},{}\n",
            csv_float(cell.lambda.re),
            csv_float(cell.lambda.im),
            csv_float(cell.phi_abs),
            c.evidence.region.zone.as_str(),
            c.part.as_str(),
            c.goldberg.as_str()
        ));
    }
    s
}

pub fn run_grid(cfg: &RunConfig, window: Window, resolution: (usize, usize)) -> GridScanResult {
    classify_grid(
        &cfg.spec,
        window,
        resolution,
        cfg.exponent,
        &cfg.options,
        cfg.parallelism,
    )
}

pub fn cmd_grid(
    cfg: &RunConfig,
    window: Window,
    resolution: (usize, usize),
    out: Option<&Path>,
    stdout: &mut dyn Write,
) -> Result<Exit, CliError> {
    let csv = grid_csv(&run_grid(cfg, window, resolution));
    deliver(out, stdout, &csv)?;
    Ok(Exit::Ok)
}

pub fn cmd_report(
    cfg: &RunConfig,
    out: Option<&Path>,
    stdout: &mut dyn Write,
) -> Result<Exit, CliError> {
    let report = spectrum_report(&cfg.spec, cfg.exponent, &cfg.options);
    deliver(out, stdout, &report.to_string())?;
    Ok(Exit::Ok)
}

/// Prints `holds_from` followed by a `k,lhs,rhs,margin` table.
/// `r` defaults to `norm_bound`, the range to `1..=k_max`.
pub fn cmd_twoband(
    cfg: &RunConfig,
    r: Option<f64>,
    k_range: Option<(usize, usize)>,
    stdout: &mut dyn Write,
) -> Result<Exit, CliError> {
    let spec = &cfg.spec;
    if spec.period() != 2 {
        return Err(CliError::WrongPeriod(spec.period()));
    }
    let (k_from, k_to) = k_range.unwrap_or((1, cfg.options.k_max));
    let r = match r {
        Some(r) if r.is_finite() && r > 0.0 => r,
        Some(r) => {
            return Err(ArgError {
                flag: "--R",
                value: r.to_string(),
                reason: "must be a positive number".into(),
            }
            .into())
        }
        None => spec.norm_bound(cfg.options.k_max),
    };
    let report =
        two_band_check(spec, r, k_from, k_to).map_err(|_| CliError::WrongPeriod(spec.period()))?;

    let mut s = String::with_capacity(80 * (report.margin_at.len() + 6));
    s.push_str(&format!("R = {}\n", short(report.r_used)));
    s.push_str(&format!(
        "k_range = {},{}\n",
        report.k_from, report.scanned_to
    ));
    s.push_str(&format!(
        "r_below_norm_bound = {}\n",
        report.r_below_norm_bound
    ));
    match report.holds_from {
        Some(n) => s.push_str(&format!("holds_from = {n}\n")),
        None => s.push_str("holds_from = none\n"),
    }
    s.push_str("k,lhs,rhs,margin\n");
    for &(k, lhs, rhs) in &report.margin_at {
        s.push_str(&format!(
            "{k},{},{},{}\n",
            csv_float(lhs),
            csv_float(rhs),
            csv_float(lhs - rhs)
        ));
    }
    emit(stdout, &s)?;
    Ok(if report.holds_from.is_some() {
        Exit::Ok
    } else {
        Exit::TwoBandFails
    })
}

/// `re, im, n, inv_norm_estimate, iterations, converged, saturated`
pub fn cmd_probe(
    cfg: &RunConfig,
    lambda: Complex64,
    n: usize,
    stdout: &mut dyn Write,
) -> Result<Exit, CliError> {
    if n == 0 || n > MAX_PROBE_N {
        return Err(ArgError {
            flag: "--n",
            value: n.to_string(),
            reason: format!("must be in 1..={MAX_PROBE_N}"),
        }
        .into());
    }
    let probe =
        resolvent_growth_probe(&cfg.spec, lambda, n, PROBE_ITERS).map_err(CliError::Singular)?;
    emit(
        stdout,
        &format!(
            "{}, {}, {}, {}, {}, {}, {}\n",
            short(lambda.re),
            short(lambda.im),
            probe.n,
            short(probe.inv_norm_estimate),
            probe.iterations,
            probe.converged,
            probe.saturated
        ),
    )?;
    Ok(Exit::Ok)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    fn shift() -> RunConfig {
        parse_config(include_str!("../configs/shift.cfg")).unwrap()
    }

    fn run(
        f: impl FnOnce(&mut Vec<u8>) -> Result<Exit, CliError>,
    ) -> (Result<Exit, CliError>, String) {
        let mut buf = Vec::new();
        let r = f(&mut buf);
        (r, String::from_utf8(buf).unwrap())
    }

    #[test]
    fn classify_records() {
        let cfg = shift();
        let (r, out) = run(|o| cmd_classify(&cfg, Complex64::new(0.5, 0.0), o));
        assert_eq!(r.unwrap(), Exit::Ok);
        assert_eq!(out, "0.5, 0.0, 0.5, Residual, C1uC2, interior\n");

        let (r, out) = run(|o| cmd_classify(&cfg, Complex64::new(1.0, 0.0), o));
        assert_eq!(r.unwrap(), Exit::Ok);
        assert_eq!(
            out,
            "1.0, 0.0, 1.0, Continuous, B2, boundary;adjoint-series:Diverges\n"
        );

        let (r, out) = run(|o| cmd_classify(&cfg, Complex64::new(2.0, 0.0), o));
        assert_eq!(r.unwrap(), Exit::Ok);
        assert!(out.contains(", Regular, None, exterior"), "{out}");
    }

    #[test]
    fn csv_floats_have_seventeen_digits() {
        assert_eq!(csv_float(0.5), "5.0000000000000000e-1");
        assert_eq!(csv_float(-2.0), "-2.0000000000000000e0");
        let x = 0.1_f64 + 0.2;
        assert_eq!(csv_float(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn small_grid_rows() {
        let cfg = shift();
        let g = run_grid(&cfg, Window::new(-2.0, 2.0, -2.0, 2.0), (2, 2));
        let csv = grid_csv(&g);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[0], GRID_HEADER);
        assert!(lines[1].starts_with("-2.0000000000000000e0,-2.0000000000000000e0,"));
        assert!(lines[2].starts_with("2.0000000000000000e0,-2.0000000000000000e0,"));
        assert!(lines[3].starts_with("-2.0000000000000000e0,2.0000000000000000e0,"));
        assert!(lines[1].ends_with(",exterior,Regular,None"));
    }

    #[test]
    fn twoband_exit_codes() {
        let cfg = shift();
        let (r, _) = run(|o| cmd_twoband(&cfg, None, None, o));
        assert_eq!(r.unwrap_err().exit(), Exit::Config);

        let cfg = parse_config(include_str!("../configs/periodic-two.cfg")).unwrap();
        let (r, out) = run(|o| cmd_twoband(&cfg, None, Some((1, 50)), o));
        assert_eq!(r.unwrap(), Exit::Ok);
        assert!(out.contains("holds_from = 1\n"), "{out}");
        assert!(out.contains("\n1,0.0000000000000000e0,0.0000000000000000e0,"));

        let cfg = parse_config(include_str!("../configs/paper-example.cfg")).unwrap();
        let (r, out) = run(|o| cmd_twoband(&cfg, Some(4.0), Some((1, 2)), o));
        assert_eq!(r.unwrap(), Exit::TwoBandFails);
        assert!(out.contains("holds_from = none\n"));
        let (r, _) = run(|o| cmd_twoband(&cfg, Some(-1.0), None, o));
        assert_eq!(r.unwrap_err().exit(), Exit::Config);
    }

    #[test]
    fn probe_records() {
        let cfg = shift();
        let (r, out) = run(|o| cmd_probe(&cfg, Complex64::new(2.0, 0.0), 200, o));
        assert_eq!(r.unwrap(), Exit::Ok);
        let fields: Vec<&str> = out.trim_end().split(", ").collect();
        assert_eq!(fields.len(), 7);
        assert_eq!(fields[2], "200");
        let est: f64 = fields[3].parse().unwrap();
        assert!((0.9..=1.1).contains(&est), "{est}");

        let (r, _) = run(|o| cmd_probe(&cfg, Complex64::new(0.0, 0.0), 10, o));
        assert_eq!(r.unwrap_err().exit(), Exit::SingularPivot);
        let (r, _) = run(|o| cmd_probe(&cfg, Complex64::new(2.0, 0.0), 0, o));
        assert_eq!(r.unwrap_err().exit(), Exit::Config);
    }

    #[test]
    fn report_to_unwritable_path() {
        let cfg = shift();
        let mut sink = Vec::new();
        let r = cmd_report(
            &cfg,
            Some(Path::new("/nonexistent-dir/x/report.txt")),
            &mut sink,
        );
        assert_eq!(r.unwrap_err().exit(), Exit::Io);
    }
}
