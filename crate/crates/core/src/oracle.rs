//! Independent numerical checks: brute-force partial sums, a finite-section
//! resolvent-norm probe, and audits of classified grids.

use num_complex::Complex64;

use crate::error::SpectralError;
use crate::fine_spectrum::{GridScanResult, SpectrumPart};
use crate::operator::{resolvent_adjoint_solve, resolvent_solve};
use crate::sequence::SequenceSpec;
use crate::series::{SeriesState, SeriesVerdict};
use crate::spectral_sets::{region_indicator, zone_of, Zone};

/// Double-double accumulator (TwoSum with a running low word).
#[derive(Debug, Clone, Copy, Default)]
struct DoubleDouble {
    hi: f64,
    lo: f64,
}

impl DoubleDouble {
    fn add(&mut self, x: f64) {
        let s = self.hi + x;
        let bb = s - self.hi;
        let err = (self.hi - (s - bb)) + (x - bb);
        let lo = self.lo + err;
        self.hi = s + lo;
        self.lo = lo - (self.hi - s);
    }

    fn value(&self) -> f64 {
        self.hi + self.lo
    }
}

const ORACLE_THRESHOLD: f64 = 1e12;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    /// `S_1, ..., S_n` (stops early once the threshold is passed).
    pub partial_sums: Vec<f64>,
    /// Least-squares slope of `ln S_k` against `k` over the last fifth.
    pub growth_slope: f64,
    /// Sum of the last fifth of the terms.
    pub tail_sum: f64,
    pub verdict: SeriesVerdict,
}

/// Sums `|t_k|`, `k = 1..=count`, in double-double precision.
pub fn partial_sum_oracle<F>(term: F, count: usize) -> OracleResult
where
    F: Fn(usize) -> f64,
{
    assert!(count >= 10, "oracle needs at least 10 terms");
    let mut acc = DoubleDouble::default();
    let mut partial_sums = Vec::with_capacity(count);
    let mut terms = Vec::with_capacity(count);
    for k in 1..=count {
        let t = term(k).abs();
        acc.add(t);
        terms.push(t);
        partial_sums.push(acc.value());
        if !(acc.value() <= ORACLE_THRESHOLD) {
            break;
        }
    }
    let n = partial_sums.len();
    let last = partial_sums[n - 1];
    let fifth = (n / 5).max(2).min(n);

    let pts: Vec<(f64, f64)> = (n - fifth..n)
        .filter(|&i| partial_sums[i] > 0.0 && partial_sums[i].is_finite())
        .map(|i| ((i + 1) as f64, partial_sums[i].ln()))
        .collect();
    let growth_slope = if pts.len() >= 2 {
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / pts.len() as f64;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / pts.len() as f64;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        sxy / sxx
    } else {
        0.0
    };
    let mut tail = DoubleDouble::default();
    for &t in &terms[n - fifth..] {
        tail.add(t);
    }
    let tail_sum = tail.value();

    let state = if !(last <= ORACLE_THRESHOLD) {
        SeriesState::Diverges
    } else if tail_sum < 1e-10 * (1.0 + last) {
        SeriesState::Converges
    } else if growth_slope > 0.0 && terms[n - 1] >= terms[n - fifth] && terms[n - 1] > 1e-300 {
        SeriesState::Diverges
    } else {
        SeriesState::Inconclusive
    };
    OracleResult {
        partial_sums,
        growth_slope,
        tail_sum,
        verdict: SeriesVerdict {
            state,
            terms_used: n,
            last_partial_sum: last,
            ratio_estimate: (n >= 2 && terms[n - 2] > 0.0).then(|| terms[n - 1] / terms[n - 2]),
        },
    }
}

/// Estimates capped here are reported as saturated.
pub const PROBE_CAP: f64 = 1e300;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeResult {
    pub n: usize,
    pub lambda: Complex64,
    pub inv_norm_estimate: f64,
    pub iterations: usize,
    pub converged: bool,
    pub saturated: bool,
}

fn norm2(v: &[Complex64]) -> f64 {
    let scale = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 || !scale.is_finite() {
        return scale;
    }
    scale
        * v.iter()
            .map(|z| (z.norm() / scale).powi(2))
            .sum::<f64>()
            .sqrt()
}

/// Power iteration on `M^* M` for `M = (Δ_n - λI)^{-1}`, estimating `‖M‖_2`.
///
/// Starts from the normalized all-ones vector. The estimate is the largest
/// `‖M v‖` seen over unit iterates, so it never decreases.
pub fn resolvent_growth_probe(
    spec: &SequenceSpec,
    lambda: Complex64,
    n: usize,
    iters: usize,
) -> Result<ProbeResult, SpectralError> {
    assert!(n >= 1, "probe needs n >= 1");
    let mut v = vec![Complex64::new(1.0 / (n as f64).sqrt(), 0.0); n];
    let mut estimate = 0.0_f64;
    let mut result = ProbeResult {
        n,
        lambda,
        inv_norm_estimate: 0.0,
        iterations: 0,
        converged: false,
        saturated: false,
    };
    for it in 1..=iters.max(1) {
        result.iterations = it;
        let w = resolvent_solve(spec, lambda, &v)?;
        let wn = norm2(&w);
        if !wn.is_finite() || wn >= PROBE_CAP {
            result.inv_norm_estimate = PROBE_CAP;
            result.saturated = true;
            return Ok(result);
        }
        let prev = estimate;
        estimate = estimate.max(wn);
        if it > 1 && (estimate - prev).abs() <= 1e-6 * estimate {
            result.converged = true;
            break;
        }
        let w: Vec<Complex64> = w.iter().map(|z| z / wn).collect();
        let u = resolvent_adjoint_solve(spec, lambda, &w)?;
        let un = norm2(&u);
        if !un.is_finite() {
            // ‖M^*‖ = ‖M‖ is beyond f64 range
            result.inv_norm_estimate = PROBE_CAP;
            result.saturated = true;
            return Ok(result);
        }
        if un == 0.0 {
            break;
        }
        v = u.iter().map(|z| z / un).collect();
    }
    result.inv_norm_estimate = estimate;
    Ok(result)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ViolationKind {
    /// (a) cells do not tile the grid, or Unresolved outside the boundary band
    Partition,
    /// (b) part and Goldberg tag disagree
    Goldberg,
    /// (c) mirrored nodes classified differently
    ConjugateSymmetry,
    /// (d) part impossible for the node's zone
    Zone,
    /// (e) finite-section resolvent norms do not separate interior from exterior
    Probe,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub node: Option<usize>,
    pub detail: String,
}

/// Section size and iteration count of the probe spot-check.
pub const AUDIT_PROBE_N: usize = 200;
pub const AUDIT_PROBE_ITERS: usize = 100;
const AUDIT_SAMPLES: usize = 5;

fn evenly_spaced<T: Copy>(items: &[T], count: usize) -> Vec<T> {
    if items.len() <= count {
        return items.to_vec();
    }
    (0..count)
        .map(|i| items[i * (items.len() - 1) / (count - 1).max(1)])
        .collect()
}

/// Structural and numerical checks over a classified grid. Empty when clean.
pub fn consistency_audit(spec: &SequenceSpec, grid: &GridScanResult) -> Vec<Violation> {
    let mut out = Vec::new();
    let (nx, ny) = grid.resolution;
    let tol = grid.boundary_tol;

    if grid.cells.len() != nx * ny {
        out.push(Violation {
            kind: ViolationKind::Partition,
            node: None,
            detail: format!("{} cells for a {nx}x{ny} grid", grid.cells.len()),
        });
        return out;
    }

    let zones: Vec<Zone> = grid
        .cells
        .iter()
        .map(|c| region_indicator(spec, c.lambda, tol).zone)
        .collect();

    for (idx, cell) in grid.cells.iter().enumerate() {
        let part = cell.classification.part;
        let zone = zones[idx];
        let expected = grid.lambda_at(idx % nx, idx / nx);
        if cell.lambda != expected {
            out.push(Violation {
                kind: ViolationKind::Partition,
                node: Some(idx),
                detail: format!("node holds {} instead of {expected}", cell.lambda),
            });
        }
        let ev = &cell.classification.evidence;
        if part == SpectrumPart::Unresolved && zone != Zone::Boundary && !ev.near_limit {
            out.push(Violation {
                kind: ViolationKind::Partition,
                node: Some(idx),
                detail: format!("Unresolved in {} zone", zone.as_str()),
            });
        }
        if cell.classification.goldberg != part.goldberg() {
            out.push(Violation {
                kind: ViolationKind::Goldberg,
                node: Some(idx),
                detail: format!(
                    "{} tagged {}",
                    part.as_str(),
                    cell.classification.goldberg.as_str()
                ),
            });
        }
        let forbidden = match zone {
            Zone::Interior => matches!(part, SpectrumPart::Regular | SpectrumPart::Continuous),
            Zone::Exterior => matches!(part, SpectrumPart::Residual | SpectrumPart::Continuous),
            Zone::Boundary => false,
        };
        if forbidden {
            out.push(Violation {
                kind: ViolationKind::Zone,
                node: Some(idx),
                detail: format!("{} node classified {}", zone.as_str(), part.as_str()),
            });
        }
    }

    if grid.window.is_conjugate_symmetric() {
        for j in 0..ny / 2 {
            for i in 0..nx {
                let a = j * nx + i;
                let b = (ny - 1 - j) * nx + i;
                let (pa, pb) = (
                    grid.cells[a].classification.part,
                    grid.cells[b].classification.part,
                );
                if pa != pb {
                    out.push(Violation {
                        kind: ViolationKind::ConjugateSymmetry,
                        node: Some(a),
                        detail: format!("{} vs mirrored {}", pa.as_str(), pb.as_str()),
                    });
                }
            }
        }
    }

    // probe spot-check on nodes well clear of the boundary curve
    let interior: Vec<usize> = (0..grid.cells.len())
        .filter(|&i| {
            zone_of(grid.cells[i].phi_abs, tol) == Zone::Interior && grid.cells[i].phi_abs <= 0.9
        })
        .collect();
    let exterior: Vec<usize> = (0..grid.cells.len())
        .filter(|&i| grid.cells[i].phi_abs >= 1.1)
        .collect();
    let probe = |idx: usize| match resolvent_growth_probe(
        spec,
        grid.cells[idx].lambda,
        AUDIT_PROBE_N,
        AUDIT_PROBE_ITERS,
    ) {
        Ok(r) => r.inv_norm_estimate,
        Err(_) => f64::INFINITY,
    };
    let inner = evenly_spaced(&interior, AUDIT_SAMPLES);
    let outer = evenly_spaced(&exterior, AUDIT_SAMPLES);
    if !inner.is_empty() && !outer.is_empty() {
        let min_in = inner
            .iter()
            .map(|&i| probe(i))
            .fold(f64::INFINITY, f64::min);
        let max_out = outer.iter().map(|&i| probe(i)).fold(0.0, f64::max);
        if !(min_in >= 10.0 * max_out) {
            out.push(Violation {
                kind: ViolationKind::Probe,
                node: None,
                detail: format!("interior min {min_in:e} < 10 x exterior max {max_out:e}"),
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shift() -> SequenceSpec {
        SequenceSpec::periodic(&[0.0], &[1.0]).unwrap()
    }

    #[test]
    fn oracle_geometric() {
        let r = partial_sum_oracle(|k| 0.5f64.powi(k as i32), 50);
        assert!((r.partial_sums.last().unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(r.verdict.state, SeriesState::Converges);
    }

    #[test]
    fn oracle_constant_diverges() {
        let r = partial_sum_oracle(|_| 1.0, 100);
        assert!(r.growth_slope > 0.0);
        assert_eq!(r.verdict.state, SeriesState::Diverges);
    }

    #[test]
    fn oracle_harmonic_is_inconclusive() {
        let r = partial_sum_oracle(|k| 1.0 / k as f64, 5000);
        let s = *r.partial_sums.last().unwrap();
        assert!((s - 9.094508852984).abs() < 1e-9);
        assert_eq!(r.verdict.state, SeriesState::Inconclusive);
    }

    #[test]
    fn oracle_stops_at_threshold() {
        let r = partial_sum_oracle(|k| 10f64.powi(k as i32), 100);
        assert_eq!(r.verdict.state, SeriesState::Diverges);
        assert!(r.partial_sums.len() < 20);
    }

    #[test]
    fn probe_closed_forms() {
        let r = resolvent_growth_probe(&shift(), Complex64::new(2.0, 0.0), 200, 500).unwrap();
        assert!(
            r.inv_norm_estimate >= 0.9 && r.inv_norm_estimate <= 1.1,
            "{r:?}"
        );
        let r = resolvent_growth_probe(&shift(), Complex64::new(0.5, 0.0), 60, 100).unwrap();
        assert!(r.inv_norm_estimate >= 1e10);
        let l = Complex64::new(0.3, 0.7);
        let r = resolvent_growth_probe(&shift(), l, 1, 10).unwrap();
        assert!((r.inv_norm_estimate - 1.0 / l.norm()).abs() < 1e-15);
        assert_eq!(
            resolvent_growth_probe(&shift(), Complex64::new(0.0, 0.0), 5, 10),
            Err(SpectralError::SingularPivot { k: 1 })
        );
    }

    #[test]
    fn probe_saturates() {
        let r = resolvent_growth_probe(&shift(), Complex64::new(0.1, 0.0), 400, 10).unwrap();
        assert!(r.saturated);
        assert_eq!(r.inv_norm_estimate, PROBE_CAP);
    }
}
