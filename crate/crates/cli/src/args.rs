//! Parsers for the comma-separated command-line values.

use finespec::{Complex64, Window};
use thiserror::Error;

/// Upper bound on grid nodes per scan.
pub const MAX_GRID_NODES: usize = 50_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid {flag} `{value}`: {reason}")]
pub struct ArgError {
    pub flag: &'static str,
    pub value: String,
    pub reason: String,
}

fn fail(flag: &'static str, value: &str, reason: impl Into<String>) -> ArgError {
    ArgError {
        flag,
        value: value.chars().take(64).collect(),
        reason: reason.into(),
    }
}

fn split_n<'a>(flag: &'static str, s: &'a str, n: usize) -> Result<Vec<&'a str>, ArgError> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != n {
        return Err(fail(
            flag,
            s,
            format!("expected {n} comma-separated values"),
        ));
    }
    Ok(parts)
}

fn finite(flag: &'static str, whole: &str, s: &str) -> Result<f64, ArgError> {
    let v: f64 = s
        .parse()
        .map_err(|_| fail(flag, whole, format!("`{s}` is not a number")))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(fail(flag, whole, "values must be finite"))
    }
}

fn count(flag: &'static str, whole: &str, s: &str) -> Result<usize, ArgError> {
    s.parse()
        .map_err(|_| fail(flag, whole, format!("`{s}` is not a non-negative integer")))
}

/// `RE,IM`
pub fn parse_lambda(s: &str) -> Result<Complex64, ArgError> {
    let p = split_n("--lambda", s, 2)?;
    Ok(Complex64::new(
        finite("--lambda", s, p[0])?,
        finite("--lambda", s, p[1])?,
    ))
}

/// `RE_MIN,RE_MAX,IM_MIN,IM_MAX`
pub fn parse_window(s: &str) -> Result<Window, ArgError> {
    let p = split_n("--window", s, 4)?;
    let v: Vec<f64> = p
        .iter()
        .map(|x| finite("--window", s, x))
        .collect::<Result<_, _>>()?;
    if !(v[0] < v[1] && v[2] < v[3]) {
        return Err(fail("--window", s, "bounds must satisfy a < b and c < d"));
    }
    if !((v[1] - v[0]).is_finite() && (v[3] - v[2]).is_finite()) {
        return Err(fail("--window", s, "window too wide"));
    }
    Ok(Window::new(v[0], v[1], v[2], v[3]))
}

/// `NX,NY`, each at least 2.
pub fn parse_resolution(s: &str) -> Result<(usize, usize), ArgError> {
    let p = split_n("--res", s, 2)?;
    let nx = count("--res", s, p[0])?;
    let ny = count("--res", s, p[1])?;
    if nx < 2 || ny < 2 {
        return Err(fail("--res", s, "each dimension must be at least 2"));
    }
    match nx.checked_mul(ny) {
        Some(n) if n <= MAX_GRID_NODES => Ok((nx, ny)),
        _ => Err(fail(
            "--res",
            s,
            format!("more than {MAX_GRID_NODES} nodes"),
        )),
    }
}

/// `FROM,TO` with `1 <= FROM <= TO`.
pub fn parse_k_range(s: &str) -> Result<(usize, usize), ArgError> {
    let p = split_n("--k-range", s, 2)?;
    let from = count("--k-range", s, p[0])?;
    let to = count("--k-range", s, p[1])?;
    if from < 1 || from > to {
        return Err(fail("--k-range", s, "need 1 <= FROM <= TO"));
    }
    Ok((from, to))
}
