//! The lower-bidiagonal operator: application, finite sections, resolvent
//! entries and solves, and the column/row ℓ1 estimates of the resolvent.

use num_complex::Complex64;

use crate::error::SpectralError;
use crate::sequence::SequenceSpec;
use crate::series::{CompensatedSum, SeriesState, SeriesVerdict};
use crate::spectral_sets::symbol_ratio;

/// Offsets `i - j` above which resolvent entries are formed in log space.
const LOG_FORM_SPAN: usize = 50;

/// Pivots with `|a_k - λ|` at or below this are treated as singular.
pub fn pivot_floor(lambda: Complex64) -> f64 {
    1e-13 * (1.0 + lambda.norm())
}

fn pivot(spec: &SequenceSpec, lambda: Complex64, k: usize) -> Result<Complex64, SpectralError> {
    let d = spec.a(k) - lambda;
    if d.norm() <= pivot_floor(lambda) {
        Err(SpectralError::SingularPivot { k })
    } else {
        Ok(d)
    }
}

/// `y_k = a_k x_k + b_{k-1} x_{k-1}` on a finite vector.
pub fn apply(spec: &SequenceSpec, x: &[Complex64]) -> Vec<Complex64> {
    (1..=x.len())
        .map(|k| {
            let diag = x[k - 1] * spec.a(k);
            if k == 1 {
                diag
            } else {
                diag + x[k - 2] * spec.b(k - 1)
            }
        })
        .collect()
}

/// Leading `n x n` block of the infinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteSection {
    pub diag: Vec<f64>,
    pub subdiag: Vec<f64>,
}

impl FiniteSection {
    pub fn new(spec: &SequenceSpec, n: usize) -> Self {
        assert!(n >= 1, "finite section needs n >= 1");
        Self {
            diag: (1..=n).map(|k| spec.a(k)).collect(),
            subdiag: (1..n).map(|k| spec.b(k)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// `(A - λI) x` for the section `A`.
    pub fn shifted_mul(&self, lambda: Complex64, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.dim());
        (0..self.dim())
            .map(|i| {
                let mut y = x[i] * (self.diag[i] - lambda);
                if i > 0 {
                    y += x[i - 1] * self.subdiag[i - 1];
                }
                y
            })
            .collect()
    }
}

pub fn finite_section(spec: &SequenceSpec, n: usize) -> FiniteSection {
    FiniteSection::new(spec, n)
}

/// Entry `(i, j)` of `(Δ - λI)^{-1}`, 1-based.
pub fn resolvent_entry(
    spec: &SequenceSpec,
    lambda: Complex64,
    i: usize,
    j: usize,
) -> Result<Complex64, SpectralError> {
    assert!(i >= 1 && j >= 1, "indices are 1-based");
    if i < j {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let span = i - j;
    if span <= LOG_FORM_SPAN {
        let mut num = Complex64::new(1.0, 0.0);
        for t in j..i {
            num *= -spec.b(t);
        }
        let mut den = Complex64::new(1.0, 0.0);
        for t in j..=i {
            den *= pivot(spec, lambda, t)?;
        }
        return Ok(num / den);
    }
    // log-magnitude + phase
    let mut log_mag = 0.0;
    let mut phase = span as f64 * std::f64::consts::PI;
    for t in j..i {
        let b = spec.b(t);
        log_mag += b.abs().ln();
        if b < 0.0 {
            phase += std::f64::consts::PI;
        }
    }
    for t in j..=i {
        let d = pivot(spec, lambda, t)?;
        log_mag -= d.norm().ln();
        phase -= d.arg();
    }
    Ok(Complex64::from_polar(log_mag.exp(), phase))
}

/// Solves `(Δ_n - λI) x = y` by forward substitution, `n = y.len()`.
pub fn resolvent_solve(
    spec: &SequenceSpec,
    lambda: Complex64,
    y: &[Complex64],
) -> Result<Vec<Complex64>, SpectralError> {
    let mut x = Vec::with_capacity(y.len());
    for (idx, &rhs) in y.iter().enumerate() {
        let k = idx + 1;
        let d = pivot(spec, lambda, k)?;
        let carried = if k == 1 {
            rhs
        } else {
            rhs - x[idx - 1] * spec.b(k - 1)
        };
        x.push(carried / d);
    }
    Ok(x)
}

/// Solves `(Δ_n - λI)^* x = y` by back substitution.
///
/// The adjoint is upper bidiagonal with diagonal `conj(a_k - λ)` and
/// superdiagonal `b_k`.
pub fn resolvent_adjoint_solve(
    spec: &SequenceSpec,
    lambda: Complex64,
    y: &[Complex64],
) -> Result<Vec<Complex64>, SpectralError> {
    let n = y.len();
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for idx in (0..n).rev() {
        let k = idx + 1;
        let d = pivot(spec, lambda, k)?.conj();
        let carried = if k == n {
            y[idx]
        } else {
            y[idx] - x[idx + 1] * spec.b(k)
        };
        x[idx] = carried / d;
    }
    Ok(x)
}

/// Truncated ℓ1 norm of a resolvent column with a geometric tail bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolventColumnEstimate {
    pub k: usize,
    pub partial_sum: f64,
    pub tail_bound: Option<f64>,
    pub verdict: SeriesVerdict,
}

/// ℓ1 norm of column `k` of the resolvent over rows `k..=k+terms`.
///
/// When the `m`-step magnitude ratio stays at or below some `γ < 1` over the
/// last `3m` rows, the remainder is bounded by the last `m` terms times
/// `γ / (1 - γ)`. `γ` is the larger of the measured ratio and its limit
/// `1/|Φ(λ)|`.
pub fn column_norm(
    spec: &SequenceSpec,
    lambda: Complex64,
    k: usize,
    terms: usize,
    divergence_threshold: f64,
) -> Result<ResolventColumnEstimate, SpectralError> {
    let m = spec.period();
    let mut logs: Vec<f64> = Vec::with_capacity(terms + 1);
    let mut sum = CompensatedSum::new();
    let mut log_mag = -pivot(spec, lambda, k)?.norm().ln();
    for i in k..=k + terms {
        if i > k {
            log_mag += spec.b(i - 1).abs().ln() - pivot(spec, lambda, i)?.norm().ln();
        }
        logs.push(log_mag);
        sum.add(log_mag.exp());
        if sum.value() > divergence_threshold {
            return Ok(ResolventColumnEstimate {
                k,
                partial_sum: sum.value(),
                tail_bound: None,
                verdict: SeriesVerdict {
                    state: SeriesState::Diverges,
                    terms_used: logs.len(),
                    last_partial_sum: sum.value(),
                    ratio_estimate: None,
                },
            });
        }
    }
    let n = logs.len();
    let partial = sum.value();
    // the m-step ratio tends to 1/|Φ(λ)|; never take γ below that limit
    let limit_ratio = 1.0 / symbol_ratio(spec, lambda).norm();
    let gamma = (n > m).then(|| {
        let start = n.saturating_sub(3 * m).max(m);
        (start..n)
            .map(|t| (logs[t] - logs[t - m]).exp())
            .fold(limit_ratio, f64::max)
    });
    let tail_bound = gamma.filter(|&g| g < 1.0).map(|g| {
        let last: f64 = logs[n - m..].iter().map(|l| l.exp()).sum();
        last * g / (1.0 - g)
    });
    let state = if tail_bound.is_some() {
        SeriesState::Converges
    } else {
        SeriesState::Inconclusive
    };
    Ok(ResolventColumnEstimate {
        k,
        partial_sum: partial,
        tail_bound,
        verdict: SeriesVerdict {
            state,
            terms_used: n,
            last_partial_sum: partial,
            ratio_estimate: gamma,
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolventRowValue {
    pub beta: usize,
    pub value: f64,
}

/// Exact ℓ1 norm of row `beta` of the resolvent (a finite sum of `beta` terms).
pub fn row_norm(
    spec: &SequenceSpec,
    lambda: Complex64,
    beta: usize,
) -> Result<ResolventRowValue, SpectralError> {
    assert!(beta >= 1, "rows are 1-based");
    // walk j = beta, beta-1, ..., 1 in log space
    let mut logs = Vec::with_capacity(beta);
    let mut log_mag = -pivot(spec, lambda, beta)?.norm().ln();
    logs.push(log_mag);
    for j in (1..beta).rev() {
        log_mag += spec.b(j).abs().ln() - pivot(spec, lambda, j)?.norm().ln();
        logs.push(log_mag);
    }
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = CompensatedSum::new();
    for l in &logs {
        sum.add((l - top).exp());
    }
    Ok(ResolventRowValue {
        beta,
        value: top.exp() * sum.value(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequence::two_band_example;
    use approx::assert_relative_eq;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn shift() -> SequenceSpec {
        SequenceSpec::periodic(&[0.0], &[1.0]).unwrap()
    }

    #[test]
    fn apply_shift_and_example() {
        let y = apply(&shift(), &[c(1.0), c(1.0), c(1.0)]);
        assert_eq!(y, vec![c(0.0), c(1.0), c(1.0)]);
        let y = apply(&two_band_example(), &[c(1.0), c(0.0)]);
        assert_eq!(y, vec![c(0.0), c(1.0)]);
        assert!(apply(&shift(), &[]).is_empty());
    }

    #[test]
    fn sections() {
        let s = finite_section(&shift(), 2);
        assert_eq!(s.diag, vec![0.0, 0.0]);
        assert_eq!(s.subdiag, vec![1.0]);

        let s = finite_section(&two_band_example(), 3);
        assert_eq!(s.diag[0], 0.0);
        assert_eq!(s.diag[1], 0.25);
        assert_relative_eq!(s.diag[2], 8.0 / 9.0, epsilon = 1e-15);
        assert_eq!(s.subdiag, vec![1.0, 2.5]);

        let s = finite_section(&two_band_example(), 1);
        assert_eq!(s.diag, vec![0.0]);
        assert!(s.subdiag.is_empty());
    }

    #[test]
    fn closed_form_entries() {
        let l = c(2.0);
        assert_eq!(resolvent_entry(&shift(), l, 2, 1).unwrap(), c(-0.25));
        assert_eq!(resolvent_entry(&shift(), l, 3, 1).unwrap(), c(-0.125));
        assert_eq!(resolvent_entry(&shift(), l, 1, 2).unwrap(), c(0.0));
        assert_eq!(resolvent_entry(&shift(), l, 1, 1).unwrap(), c(-0.5));
        // log form beyond the span threshold: (-1)^60 / (-2)^61 = -2^-61
        let e = resolvent_entry(&shift(), l, 61, 1).unwrap();
        assert_relative_eq!(e.re, -(2f64).powi(-61), max_relative = 1e-12);
        assert!(e.im.abs() < 1e-30);
        assert_eq!(
            resolvent_entry(&shift(), c(0.0), 2, 1),
            Err(SpectralError::SingularPivot { k: 1 })
        );
    }

    #[test]
    fn log_form_agrees_with_direct_products() {
        let spec = two_band_example();
        let l = Complex64::new(4.0, 1.5);
        // direct product for a span above the log threshold
        let (i, j) = (70, 3);
        let mut direct = Complex64::new(1.0, 0.0);
        for t in j..i {
            direct *= -spec.b(t);
        }
        for t in j..=i {
            direct /= spec.a(t) - l;
        }
        let e = resolvent_entry(&spec, l, i, j).unwrap();
        assert_relative_eq!(e.re, direct.re, max_relative = 1e-10);
        assert_relative_eq!(e.im, direct.im, max_relative = 1e-10);
    }

    #[test]
    fn solve_closed_form() {
        let mut y = vec![c(0.0); 3];
        y[0] = c(1.0);
        let x = resolvent_solve(&shift(), c(2.0), &y).unwrap();
        assert_eq!(x, vec![c(-0.5), c(-0.25), c(-0.125)]);
        let x = resolvent_solve(&two_band_example(), c(3.0), &[c(0.0); 5]).unwrap();
        assert!(x.iter().all(|v| *v == c(0.0)));
        assert_eq!(
            resolvent_solve(&shift(), c(0.0), &y),
            Err(SpectralError::SingularPivot { k: 1 })
        );
    }

    #[test]
    fn adjoint_solve_inverts_the_adjoint() {
        let spec = two_band_example();
        let l = Complex64::new(4.0, -1.5);
        let n = 40;
        let y: Vec<Complex64> = (0..n)
            .map(|i| Complex64::new((i as f64).sin(), (i as f64 * 0.3).cos()))
            .collect();
        let x = resolvent_adjoint_solve(&spec, l, &y).unwrap();
        // (A - λI)^* x: row i gets conj(a_i - λ) x_i + b_i x_{i+1}
        for i in 0..n {
            let k = i + 1;
            let mut r = (spec.a(k) - l).conj() * x[i];
            if i + 1 < n {
                r += x[i + 1] * spec.b(k);
            }
            assert!((r - y[i]).norm() < 1e-12);
        }
    }

    #[test]
    fn example_residual_at_ten() {
        let spec = two_band_example();
        let l = c(10.0);
        let n = 200;
        let y: Vec<Complex64> = (0..n)
            .map(|i| Complex64::new(((i * 37) % 11) as f64 - 5.0, ((i * 13) % 7) as f64))
            .collect();
        let x = resolvent_solve(&spec, l, &y).unwrap();
        let r = finite_section(&spec, n).shifted_mul(l, &x);
        let worst = r
            .iter()
            .zip(&y)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(worst <= 1e-10);
    }

    #[test]
    fn column_norms() {
        let est = column_norm(&shift(), c(2.0), 1, 60, 1e12).unwrap();
        assert!((est.partial_sum - 1.0).abs() < 1e-12);
        assert_eq!(est.verdict.state, SeriesState::Converges);
        let tail = est.tail_bound.unwrap();
        assert!(est.partial_sum <= 1.0 && 1.0 <= est.partial_sum + tail);

        let est = column_norm(&shift(), c(0.5), 1, 60, 1e12).unwrap();
        assert_eq!(est.verdict.state, SeriesState::Diverges);

        let est = column_norm(&two_band_example(), c(10.0), 1, 200, 1e12).unwrap();
        assert_eq!(est.verdict.state, SeriesState::Converges);
        assert!(est.tail_bound.unwrap() < 1e-6);
    }

    #[test]
    fn row_norms() {
        assert_eq!(row_norm(&shift(), c(2.0), 3).unwrap().value, 0.875);
        let spec = two_band_example();
        let l = Complex64::new(1.5, 2.0);
        let r = row_norm(&spec, l, 1).unwrap().value;
        assert_relative_eq!(r, 1.0 / (spec.a(1) - l).norm(), max_relative = 1e-15);
        let r = row_norm(&spec, c(10.0), 100).unwrap().value;
        assert!(r.is_finite() && r <= 0.2);
        assert!(r >= 1.0 / (spec.a(100) - 10.0).abs());
    }
}
