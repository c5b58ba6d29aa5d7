//! The limit symbol `Φ(λ) = ∏(λ - p_i) / ∏ q_i`, the region it induces, the
//! series conditions behind the sets `S1..S6`, and the period-2 two-band
//! inequality.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::SpectralError;
use crate::fine_spectrum::eigen_index;
use crate::operator::pivot_floor;
use crate::options::Options;
use crate::sequence::{ExponentPair, SequenceSpec, Which};
use crate::series::{heuristic_verdict, HeuristicParams, SeriesState, SeriesVerdict};

pub fn symbol_ratio(spec: &SequenceSpec, lambda: Complex64) -> Complex64 {
    let num = spec
        .p_limits()
        .iter()
        .fold(Complex64::new(1.0, 0.0), |acc, &p| acc * (lambda - p));
    let den: f64 = spec.q_limits().iter().product();
    num / den
}

/// Position of `λ` relative to the curve `|Φ(λ)| = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Zone {
    Interior,
    Boundary,
    Exterior,
}

impl Zone {
    pub fn as_str(&self) -> &'static str {
        match self {
            Zone::Interior => "interior",
            Zone::Boundary => "boundary",
            Zone::Exterior => "exterior",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionVerdict {
    pub phi_abs: f64,
    pub zone: Zone,
    pub boundary_tol: f64,
}

pub fn zone_of(phi_abs: f64, boundary_tol: f64) -> Zone {
    if phi_abs < 1.0 - boundary_tol {
        Zone::Interior
    } else if phi_abs > 1.0 + boundary_tol {
        Zone::Exterior
    } else {
        Zone::Boundary
    }
}

pub fn region_indicator(
    spec: &SequenceSpec,
    lambda: Complex64,
    boundary_tol: f64,
) -> RegionVerdict {
    let phi_abs = symbol_ratio(spec, lambda).norm();
    RegionVerdict {
        phi_abs,
        zone: zone_of(phi_abs, boundary_tol),
        boundary_tol,
    }
}

fn heuristic_params(opts: &Options, exponent: f64) -> HeuristicParams {
    HeuristicParams {
        terms: opts.series_terms,
        tail_window: opts.tail_window,
        divergence_threshold: opts.divergence_threshold,
        log_slack: 2.0 * exponent * opts.boundary_tol,
    }
}

/// Logs of `|b_s ⋯ b_i / ((a_{s+1} - c) ⋯ (a_{i+1} - c))|^power` for
/// `i = s, s+1, ...`.
///
/// With `c = a_j` these are the terms of the eigenvector series; for a
/// general `c` they are the `m`-periodic tail of a resolvent column.
pub fn tail_series_log_terms(
    spec: &SequenceSpec,
    centre: Complex64,
    s: usize,
    power: f64,
) -> impl Iterator<Item = f64> + '_ {
    (s..).scan(0.0, move |acc, i| {
        *acc += power * (spec.b(i).abs().ln() - (spec.a(i + 1) - centre).norm().ln());
        Some(*acc)
    })
}

/// Logs of `|f_k|^power`, `f_k = ∏_{t<k} (λ - a_t) / b_t`, for `k = 2, 3, ...`.
pub fn adjoint_series_log_terms(
    spec: &SequenceSpec,
    lambda: Complex64,
    power: f64,
) -> impl Iterator<Item = f64> + '_ {
    (1..).scan(0.0, move |acc, t| {
        *acc += power * ((lambda - spec.a(t)).norm().ln() - spec.b(t).abs().ln());
        Some(*acc)
    })
}

/// Convergence of `Σ_{i>=s} |b_s⋯b_i / ((a_{s+1}-a_j)⋯(a_{i+1}-a_j))|^p`.
///
/// `s >= j` must satisfy `a_s = a_j` with no later scanned `a_n` equal to it.
pub fn series_tail_point(
    spec: &SequenceSpec,
    j: usize,
    s: usize,
    exp: ExponentPair,
    opts: &Options,
) -> Result<SeriesVerdict, SpectralError> {
    assert!(s >= j && j >= 1, "need 1 <= j <= s");
    let value = spec.a(j);
    let centre = Complex64::new(value, 0.0);
    let tol = opts.match_tolerance(value.abs()).max(pivot_floor(centre));
    if let Some(n) = (s + 1..=s + opts.series_terms + 1).find(|&n| (spec.a(n) - value).abs() <= tol)
    {
        return Err(SpectralError::RepeatedValue { j, n });
    }
    let region = region_indicator(spec, centre, opts.boundary_tol);
    match region.zone {
        Zone::Interior => Ok(SeriesVerdict::fast(
            SeriesState::Diverges,
            1.0 / region.phi_abs,
        )),
        Zone::Exterior => Ok(SeriesVerdict::fast(
            SeriesState::Converges,
            1.0 / region.phi_abs,
        )),
        Zone::Boundary => Ok(heuristic_verdict(
            tail_series_log_terms(spec, centre, s, exp.p()),
            spec.period(),
            &heuristic_params(opts, exp.p()),
        )),
    }
}

/// Convergence of the adjoint eigenvector series `Σ_{k>=2} |f_k|^q`.
pub fn series_adjoint(
    spec: &SequenceSpec,
    lambda: Complex64,
    exp: ExponentPair,
    opts: &Options,
) -> SeriesVerdict {
    let tol = opts.match_tolerance(lambda.norm());
    if let Some(j) = (1..=opts.series_terms).find(|&k| (spec.a(k) - lambda).norm() <= tol) {
        // f_k = 0 for k > j
        return SeriesVerdict {
            state: SeriesState::Converges,
            terms_used: j,
            last_partial_sum: adjoint_series_log_terms(spec, lambda, exp.q())
                .take(j - 1)
                .map(f64::exp)
                .sum(),
            ratio_estimate: Some(0.0),
        };
    }
    let region = region_indicator(spec, lambda, opts.boundary_tol);
    match region.zone {
        Zone::Interior => SeriesVerdict::fast(SeriesState::Converges, region.phi_abs),
        Zone::Exterior => SeriesVerdict::fast(SeriesState::Diverges, region.phi_abs),
        Zone::Boundary => heuristic_verdict(
            adjoint_series_log_terms(spec, lambda, exp.q()),
            spec.period(),
            &heuristic_params(opts, exp.q()),
        ),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SetId {
    S1,
    S2,
    S3,
    S4,
    S5,
    S6,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Membership {
    In,
    Out,
    Unresolved,
}

impl Membership {
    fn from_bool(b: bool) -> Self {
        if b {
            Membership::In
        } else {
            Membership::Out
        }
    }

    fn from_series(state: SeriesState) -> Self {
        match state {
            SeriesState::Converges => Membership::In,
            SeriesState::Diverges => Membership::Out,
            SeriesState::Inconclusive => Membership::Unresolved,
        }
    }
}

/// Membership of `λ` in one of the sets `S1..S6`, at the configured tolerances.
pub fn membership(
    spec: &SequenceSpec,
    lambda: Complex64,
    set: SetId,
    exp: ExponentPair,
    opts: &Options,
) -> Membership {
    let zone = region_indicator(spec, lambda, opts.boundary_tol).zone;
    let matched = || {
        eigen_index(
            spec,
            lambda,
            opts.k_max,
            opts.match_tolerance(lambda.norm()),
        )
    };
    match set {
        SetId::S1 => Membership::from_bool(zone != Zone::Exterior),
        SetId::S4 => Membership::from_bool(zone == Zone::Interior),
        SetId::S5 => Membership::from_bool(zone == Zone::Boundary),
        SetId::S2 => {
            if zone != Zone::Exterior {
                return Membership::Out;
            }
            match matched() {
                Ok(found) => Membership::from_bool(found.is_some()),
                Err(_) => Membership::Unresolved,
            }
        }
        SetId::S3 => {
            if zone != Zone::Boundary {
                return Membership::Out;
            }
            match matched() {
                Ok(None) => Membership::Out,
                Ok(Some(s)) => match series_tail_point(spec, s, s, exp, opts) {
                    Ok(v) => Membership::from_series(v.state),
                    Err(_) => Membership::Unresolved,
                },
                Err(_) => Membership::Unresolved,
            }
        }
        SetId::S6 => {
            if zone != Zone::Boundary {
                return Membership::Out;
            }
            Membership::from_series(series_adjoint(spec, lambda, exp, opts).state)
        }
    }
}

/// Finite-range evaluation of the period-2 two-band inequality
/// `|q1 q2| - |b_k b_{k+1}| >= 2R (|p_i - a_k| + |p_j - a_{k+1}|)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoBandReport {
    pub r_used: f64,
    /// `R` is smaller than `norm_bound`.
    pub r_below_norm_bound: bool,
    pub holds_from: Option<usize>,
    pub k_from: usize,
    pub scanned_to: usize,
    /// `(k, lhs, rhs)` for every scanned `k`.
    pub margin_at: Vec<(usize, f64, f64)>,
}

impl TwoBandReport {
    pub fn margin(&self, k: usize) -> Option<f64> {
        let idx = k.checked_sub(self.k_from)?;
        self.margin_at.get(idx).map(|&(_, l, r)| l - r)
    }
}

fn two_band_lhs(spec: &SequenceSpec, k: usize) -> f64 {
    let q = spec.q_limits();
    let qq = (q[0] * q[1]).abs();
    let qi = q[spec.class_of(k)];
    let qj = q[spec.class_of(k + 1)];
    let u = spec.deviation(Which::B, k) / qi;
    let v = spec.deviation(Which::B, k + 1) / qj;
    if 1.0 + u > 0.0 && 1.0 + v > 0.0 {
        // |b_k b_{k+1}| = |q_i q_j| (1 + u)(1 + v) without cancellation
        0.0 - qq * (u + v + u * v)
    } else {
        qq - (spec.b(k) * spec.b(k + 1)).abs()
    }
}

pub fn two_band_check(
    spec: &SequenceSpec,
    r: f64,
    k_from: usize,
    k_to: usize,
) -> Result<TwoBandReport, SpectralError> {
    if spec.period() != 2 {
        return Err(SpectralError::WrongPeriod { m: spec.period() });
    }
    let k_from = k_from.max(1);
    let margin_at: Vec<(usize, f64, f64)> = (k_from..=k_to)
        .map(|k| {
            let lhs = two_band_lhs(spec, k);
            let rhs = 2.0
                * r
                * (spec.deviation(Which::A, k).abs() + spec.deviation(Which::A, k + 1).abs());
            (k, lhs, rhs)
        })
        .collect();
    let mut holds_from = None;
    for &(k, lhs, rhs) in margin_at.iter().rev() {
        if lhs - rhs >= 0.0 {
            holds_from = Some(k);
        } else {
            break;
        }
    }
    Ok(TwoBandReport {
        r_used: r,
        r_below_norm_bound: r < spec.norm_bound(k_to.max(2) + 1),
        holds_from,
        k_from,
        scanned_to: k_to,
        margin_at,
    })
}

/// Points of `|Φ(λ)| = 1` found by bisection along `n_rays` rays from the
/// centroid of the limits `p_i`; the outermost crossing on each ray.
pub fn boundary_points(spec: &SequenceSpec, n_rays: usize) -> Vec<Complex64> {
    let p = spec.p_limits();
    let centre = Complex64::new(p.iter().sum::<f64>() / p.len() as f64, 0.0);
    let excess = |z: Complex64| symbol_ratio(spec, z).norm() - 1.0;
    (0..n_rays)
        .filter_map(|r| {
            let theta = 2.0 * PI * (r as f64 + 0.5) / n_rays as f64;
            let dir = Complex64::from_polar(1.0, theta);
            let at = |t: f64| centre + dir * t;
            let mut t_out = 1.0;
            while excess(at(t_out)) <= 0.0 {
                t_out *= 2.0;
                if t_out > 1e150 {
                    return None;
                }
            }
            const STEPS: usize = 512;
            let mut outer = t_out;
            let mut inner = None;
            for step in (0..STEPS).rev() {
                let t = t_out * step as f64 / STEPS as f64;
                if excess(at(t)) <= 0.0 {
                    inner = Some(t);
                    break;
                }
                outer = t;
            }
            let mut inner = inner?;
            for _ in 0..200 {
                let mid = 0.5 * (inner + outer);
                if mid <= inner || mid >= outer {
                    break;
                }
                if excess(at(mid)) <= 0.0 {
                    inner = mid;
                } else {
                    outer = mid;
                }
            }
            let (zi, zo) = (at(inner), at(outer));
            Some(if excess(zi).abs() <= excess(zo).abs() {
                zi
            } else {
                zo
            })
        })
        .collect()
}
