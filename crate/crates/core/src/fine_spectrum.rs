//! Fine-spectrum classification: the point / residual / continuous partition
//! with Goldberg state tags, grid scans, and a whole-spectrum report.

use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::SpectralError;
use crate::options::Options;
use crate::sequence::{ExponentPair, PerturbationForm, SequenceSpec, Which};
use crate::series::{SeriesState, SeriesVerdict};
use crate::spectral_sets::{
    boundary_points, region_indicator, series_adjoint, series_tail_point, two_band_check,
    RegionVerdict, Zone,
};

/// Largest `k <= k_max` with `|a_k - λ| <= match_tol`.
///
/// Each residue class is monotone beyond its overrides, so the matching
/// indices of a class form a contiguous run that is located by bisection.
/// Fails with `NearLimitAmbiguous` when nothing matches but `λ` lies within
/// `match_tol` of a limit `p_i`.
pub fn eigen_index(
    spec: &SequenceSpec,
    lambda: Complex64,
    k_max: usize,
    match_tol: f64,
) -> Result<Option<usize>, SpectralError> {
    let near_limit = || {
        spec.p_limits()
            .iter()
            .position(|&p| (lambda - p).norm() <= match_tol)
    };
    if lambda.im.abs() > match_tol {
        return Ok(None);
    }
    let x = lambda.re;
    let tol = (match_tol * match_tol - lambda.im * lambda.im)
        .max(0.0)
        .sqrt();
    let overrides = spec.a_overrides();
    let mut best = overrides
        .iter()
        .filter(|(&k, &v)| k <= k_max && (v - x).abs() <= tol)
        .map(|(&k, _)| k)
        .max();

    let m = spec.period();
    for (r, class) in spec.a_classes().iter().enumerate() {
        let first = r + 1;
        if first > k_max {
            continue;
        }
        let last_j = (k_max - first) / m;
        let index = |j: usize| first + j * m;
        let gap = |j: usize| class.limit + class.perturbation.evaluate(index(j)) - x;
        let is_match = |j: usize| gap(j).abs() <= tol;

        // top of the contiguous run of matches, if any
        let top = match class.perturbation {
            PerturbationForm::ConstantZero => is_match(0).then_some(last_j),
            p if p.coeff() == 0.0 => is_match(0).then_some(last_j),
            p => {
                let decreasing = p.coeff() > 0.0;
                let inside = |j: usize| {
                    if decreasing {
                        gap(j) >= -tol
                    } else {
                        gap(j) <= tol
                    }
                };
                if !inside(0) {
                    None
                } else {
                    let (mut lo, mut hi) = (0usize, last_j);
                    while lo < hi {
                        let mid = lo + (hi - lo).div_ceil(2);
                        if inside(mid) {
                            lo = mid;
                        } else {
                            hi = mid - 1;
                        }
                    }
                    is_match(lo).then_some(lo)
                }
            }
        };
        let Some(mut j) = top else { continue };
        loop {
            if !overrides.contains_key(&index(j)) {
                best = best.max(Some(index(j)));
                break;
            }
            if j == 0 || !is_match(j - 1) {
                break;
            }
            j -= 1;
        }
    }
    match best {
        Some(k) => Ok(Some(k)),
        None => match near_limit() {
            Some(i) => Err(SpectralError::NearLimitAmbiguous { index: i + 1 }),
            None => Ok(None),
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpectrumPart {
    Regular,
    Point,
    Residual,
    Continuous,
    Unresolved,
}

impl SpectrumPart {
    pub fn as_str(&self) -> &'static str {
        match self {
            SpectrumPart::Regular => "Regular",
            SpectrumPart::Point => "Point",
            SpectrumPart::Residual => "Residual",
            SpectrumPart::Continuous => "Continuous",
            SpectrumPart::Unresolved => "Unresolved",
        }
    }

    /// Goldberg state implied by the part. Residual points are reported as the
    /// union `C1 ∪ C2`.
    pub fn goldberg(&self) -> Goldberg {
        match self {
            SpectrumPart::Point => Goldberg::C3,
            SpectrumPart::Residual => Goldberg::C1OrC2,
            SpectrumPart::Continuous => Goldberg::B2,
            SpectrumPart::Regular | SpectrumPart::Unresolved => Goldberg::None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Goldberg {
    None,
    C3,
    C1OrC2,
    B2,
}

impl Goldberg {
    pub fn as_str(&self) -> &'static str {
        match self {
            Goldberg::None => "None",
            Goldberg::C3 => "C3",
            Goldberg::C1OrC2 => "C1uC2",
            Goldberg::B2 => "B2",
        }
    }
}

/// What the decision was based on.
#[derive(Debug, Clone, PartialEq)]
pub struct Evidence {
    pub region: RegionVerdict,
    pub matched_index: Option<usize>,
    pub tail_series: Option<SeriesVerdict>,
    pub adjoint_series: Option<SeriesVerdict>,
    pub near_limit: bool,
    pub repeated_value: bool,
    /// An inconclusive boundary verdict was settled by the two-band condition.
    pub two_band_override: bool,
}

impl Evidence {
    fn new(region: RegionVerdict) -> Self {
        Self {
            region,
            matched_index: None,
            tail_series: None,
            adjoint_series: None,
            near_limit: false,
            repeated_value: false,
            two_band_override: false,
        }
    }

    /// `;`-separated summary, e.g. `boundary;adjoint-series:Diverges`.
    pub fn summary(&self) -> String {
        let mut parts = vec![self.region.zone.as_str().to_string()];
        if let Some(k) = self.matched_index {
            parts.push(format!("eigen:a_{k}"));
        }
        if self.near_limit {
            parts.push("near-limit".into());
        }
        if self.repeated_value {
            parts.push("repeated-value".into());
        }
        if let Some(v) = &self.tail_series {
            parts.push(format!("tail-series:{}", v.state.as_str()));
        }
        if let Some(v) = &self.adjoint_series {
            parts.push(format!("adjoint-series:{}", v.state.as_str()));
        }
        if self.two_band_override {
            parts.push("two-band".into());
        }
        parts.join(";")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumClassification {
    pub part: SpectrumPart,
    pub goldberg: Goldberg,
    pub evidence: Evidence,
}

impl SpectrumClassification {
    fn new(part: SpectrumPart, evidence: Evidence) -> Self {
        Self {
            part,
            goldberg: part.goldberg(),
            evidence,
        }
    }
}

/// Classifies points for one spec, caching the period-2 two-band verdict.
#[derive(Debug, Clone)]
pub struct Classifier<'a> {
    spec: &'a SequenceSpec,
    exp: ExponentPair,
    opts: Options,
    two_band_holds: bool,
}

impl<'a> Classifier<'a> {
    pub fn new(spec: &'a SequenceSpec, exp: ExponentPair, opts: Options) -> Self {
        let two_band_holds = spec.period() == 2
            && two_band_check(spec, spec.norm_bound(opts.k_max), 1, opts.k_max)
                .map(|r| r.holds_from.is_some())
                .unwrap_or(false);
        Self {
            spec,
            exp,
            opts,
            two_band_holds,
        }
    }

    pub fn two_band_holds(&self) -> bool {
        self.two_band_holds
    }

    pub fn options(&self) -> &Options {
        &self.opts
    }

    pub fn classify(&self, lambda: Complex64) -> SpectrumClassification {
        use SpectrumPart::*;
        let spec = self.spec;
        let opts = &self.opts;
        let region = region_indicator(spec, lambda, opts.boundary_tol);
        let mut ev = Evidence::new(region);
        if region.zone == Zone::Interior {
            return SpectrumClassification::new(Residual, ev);
        }
        let tol = opts.match_tolerance(lambda.norm());
        let matched = match eigen_index(spec, lambda, opts.k_max, tol) {
            Ok(m) => m,
            Err(_) => {
                ev.near_limit = true;
                return SpectrumClassification::new(Unresolved, ev);
            }
        };
        ev.matched_index = matched;

        if let Some(s) = matched {
            let tail = match series_tail_point(spec, s, s, self.exp, opts) {
                Ok(v) => v,
                Err(_) => {
                    ev.repeated_value = true;
                    return SpectrumClassification::new(Unresolved, ev);
                }
            };
            ev.tail_series = Some(tail);
            let part = match (region.zone, tail.state) {
                // the tail series converges whenever a_s is exterior
                (Zone::Exterior, _) => Point,
                (_, SeriesState::Converges) => Point,
                // adjoint series terminates at a_s: λ lies in S6 \ S3
                (_, SeriesState::Diverges) => Residual,
                (_, SeriesState::Inconclusive) => Unresolved,
            };
            return SpectrumClassification::new(part, ev);
        }
        if region.zone == Zone::Exterior {
            return SpectrumClassification::new(Regular, ev);
        }

        let adjoint = series_adjoint(spec, lambda, self.exp, opts);
        ev.adjoint_series = Some(adjoint);
        let part = match adjoint.state {
            SeriesState::Converges => Residual,
            SeriesState::Diverges => Continuous,
            SeriesState::Inconclusive if self.two_band_holds => {
                ev.two_band_override = true;
                Continuous
            }
            SeriesState::Inconclusive => Unresolved,
        };
        SpectrumClassification::new(part, ev)
    }
}

pub fn classify(
    spec: &SequenceSpec,
    lambda: Complex64,
    exp: ExponentPair,
    opts: &Options,
) -> SpectrumClassification {
    Classifier::new(spec, exp, *opts).classify(lambda)
}

/// Rectangle `[re_min, re_max] x [im_min, im_max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Window {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Self {
        Self {
            re_min,
            re_max,
            im_min,
            im_max,
        }
    }

    pub fn is_conjugate_symmetric(&self) -> bool {
        self.im_min == -self.im_max
    }
}

/// `i`-th of `n` equispaced nodes on `[lo, hi]`, computed from the midpoint
/// so that nodes mirrored about a zero midpoint are exact negatives.
pub fn grid_coord(lo: f64, hi: f64, i: usize, n: usize) -> f64 {
    if n < 2 {
        return 0.5 * (lo + hi);
    }
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let offset = (2 * i) as f64 - (n - 1) as f64;
    mid + half * (offset / (n - 1) as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridCell {
    pub lambda: Complex64,
    pub classification: SpectrumClassification,
    pub phi_abs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridScanResult {
    pub window: Window,
    pub resolution: (usize, usize),
    pub boundary_tol: f64,
    /// Row-major: imaginary part ascending, then real part ascending.
    pub cells: Vec<GridCell>,
}

impl GridScanResult {
    pub fn node(&self, i_re: usize, j_im: usize) -> &GridCell {
        &self.cells[j_im * self.resolution.0 + i_re]
    }

    pub fn lambda_at(&self, i_re: usize, j_im: usize) -> Complex64 {
        let (nx, ny) = self.resolution;
        let w = &self.window;
        Complex64::new(
            grid_coord(w.re_min, w.re_max, i_re, nx),
            grid_coord(w.im_min, w.im_max, j_im, ny),
        )
    }
}

/// Classifies every node of an `nx x ny` grid with `parallelism` threads.
/// The output is independent of the thread count.
pub fn classify_grid(
    spec: &SequenceSpec,
    window: Window,
    resolution: (usize, usize),
    exp: ExponentPair,
    opts: &Options,
    parallelism: usize,
) -> GridScanResult {
    let (nx, ny) = resolution;
    assert!(nx >= 2 && ny >= 2, "grid needs at least 2x2 nodes");
    let classifier = Classifier::new(spec, exp, *opts);
    let node = |idx: usize| {
        let lambda = Complex64::new(
            grid_coord(window.re_min, window.re_max, idx % nx, nx),
            grid_coord(window.im_min, window.im_max, idx / nx, ny),
        );
        let classification = classifier.classify(lambda);
        GridCell {
            lambda,
            phi_abs: classification.evidence.region.phi_abs,
            classification,
        }
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism.max(1))
        .build()
        .expect("thread pool");
    let cells = pool.install(|| (0..nx * ny).into_par_iter().map(node).collect());
    GridScanResult {
        window,
        resolution,
        boundary_tol: opts.boundary_tol,
        cells,
    }
}

/// An `a_k` outside the interior, with the verdict of its tail series.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenCandidate {
    pub k: usize,
    pub value: f64,
    pub phi_abs: f64,
    pub tail_series: Result<SeriesVerdict, SpectralError>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContinuousBasis {
    /// The period-2 two-band condition holds on the scan range.
    TwoBand,
    /// Every sampled boundary point has a divergent adjoint series.
    SampledAdjointSeries,
    /// Some sampled boundary point has a convergent or undecided series.
    Undetermined,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    pub p_limits: Vec<f64>,
    pub q_limits: Vec<f64>,
    pub norm_bound: f64,
    pub exponent: ExponentPair,
    pub k_max: usize,
    /// `S2`: exterior `a_k` (last occurrence of each value).
    pub s2: Vec<EigenCandidate>,
    /// `a_k` on the boundary curve; members of `S3` when the series converges.
    pub s3_candidates: Vec<EigenCandidate>,
    pub two_band_holds_from: Option<Option<usize>>,
    pub continuous_basis: ContinuousBasis,
    pub boundary_samples: Vec<Complex64>,
}

impl SpectrumReport {
    pub fn s3(&self) -> impl Iterator<Item = &EigenCandidate> {
        self.s3_candidates
            .iter()
            .filter(|c| matches!(&c.tail_series, Ok(v) if v.state == SeriesState::Converges))
    }

    pub fn point_spectrum_is_empty(&self) -> bool {
        self.s2.is_empty() && self.s3().next().is_none()
    }

    fn sigma_p_line(&self) -> String {
        if self.point_spectrum_is_empty() {
            return "empty".into();
        }
        let vals: Vec<String> = self
            .s2
            .iter()
            .chain(self.s3())
            .map(|c| format!("a_{}={}", c.k, c.value))
            .collect();
        format!("{{{}}}", vals.join(", "))
    }

    fn sigma_r_line(&self) -> String {
        let boundary_a_k = self.s3_candidates.len() > self.s3().count();
        let boundary_s6 = self.continuous_basis == ContinuousBasis::Undetermined;
        if boundary_a_k || boundary_s6 {
            "interior plus (s6 minus s3)".into()
        } else {
            "interior".into()
        }
    }

    fn sigma_c_line(&self) -> &'static str {
        match self.continuous_basis {
            ContinuousBasis::TwoBand | ContinuousBasis::SampledAdjointSeries => {
                "boundary minus {a_k}"
            }
            ContinuousBasis::Undetermined => "boundary minus s6",
        }
    }
}

fn list(vals: &[f64]) -> String {
    vals.iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

fn candidates(c: &[EigenCandidate]) -> String {
    let items: Vec<String> = c
        .iter()
        .map(|c| {
            let verdict = match &c.tail_series {
                Ok(v) => v.state.as_str().to_string(),
                Err(e) => format!("error({e})"),
            };
            format!(
                "a_{}={} (phi_abs={}, tail-series:{verdict})",
                c.k, c.value, c.phi_abs
            )
        })
        .collect();
    format!("{{{}}}", items.join(", "))
}

impl fmt::Display for SpectrumReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "limits.p = {}", list(&self.p_limits))?;
        writeln!(f, "limits.q = {}", list(&self.q_limits))?;
        writeln!(f, "exponent.p = {}", self.exponent.p())?;
        writeln!(f, "exponent.q = {}", self.exponent.q())?;
        writeln!(f, "norm_bound = {}", self.norm_bound)?;
        writeln!(f, "k_max = {}", self.k_max)?;
        writeln!(f, "s2 = {}", candidates(&self.s2))?;
        writeln!(f, "s3_candidates = {}", candidates(&self.s3_candidates))?;
        match self.two_band_holds_from {
            None => writeln!(f, "two_band = n/a")?,
            Some(None) => writeln!(f, "two_band = fails")?,
            Some(Some(n)) => writeln!(f, "two_band.holds_from = {n}")?,
        }
        let sigma = if self.s2.is_empty() {
            "interior plus boundary"
        } else {
            "interior plus boundary plus s2"
        };
        writeln!(f, "sigma = {sigma}")?;
        writeln!(f, "sigma_p = {}", self.sigma_p_line())?;
        writeln!(f, "sigma_r = {}", self.sigma_r_line())?;
        writeln!(f, "sigma_c = {}", self.sigma_c_line())?;
        let basis = match self.continuous_basis {
            ContinuousBasis::TwoBand => "two-band",
            ContinuousBasis::SampledAdjointSeries => "sampled-adjoint-series",
            ContinuousBasis::Undetermined => "undetermined",
        };
        writeln!(f, "sigma_c.basis = {basis}")?;
        let samples: Vec<String> = self
            .boundary_samples
            .iter()
            .map(|z| format!("{:.17e},{:.17e}", z.re, z.im))
            .collect();
        writeln!(f, "boundary_samples = {}", samples.join("; "))
    }
}

/// Number of rays used for the boundary samples in [`spectrum_report`].
pub const REPORT_RAYS: usize = 16;

pub fn spectrum_report(spec: &SequenceSpec, exp: ExponentPair, opts: &Options) -> SpectrumReport {
    let mut s2 = Vec::new();
    let mut s3_candidates = Vec::new();
    for k in 1..=opts.k_max {
        let value = spec.term(Which::A, k);
        let lambda = Complex64::new(value, 0.0);
        let region = region_indicator(spec, lambda, opts.boundary_tol);
        if region.zone == Zone::Interior {
            continue;
        }
        let tol = opts.match_tolerance(value.abs());
        // keep only the last occurrence of each value
        if eigen_index(spec, lambda, opts.k_max, tol) != Ok(Some(k)) {
            continue;
        }
        let candidate = EigenCandidate {
            k,
            value,
            phi_abs: region.phi_abs,
            tail_series: series_tail_point(spec, k, k, exp, opts),
        };
        match region.zone {
            Zone::Exterior => s2.push(candidate),
            _ => s3_candidates.push(candidate),
        }
    }

    let two_band_holds_from = (spec.period() == 2).then(|| {
        two_band_check(spec, spec.norm_bound(opts.k_max), 1, opts.k_max)
            .ok()
            .and_then(|r| r.holds_from)
    });
    let boundary_samples = boundary_points(spec, REPORT_RAYS);
    let continuous_basis = if matches!(two_band_holds_from, Some(Some(_))) {
        ContinuousBasis::TwoBand
    } else {
        let all_diverge = boundary_samples.iter().all(|&z| {
            let tol = opts.match_tolerance(z.norm());
            eigen_index(spec, z, opts.k_max, tol) == Ok(None)
                && series_adjoint(spec, z, exp, opts).state == SeriesState::Diverges
        });
        if all_diverge {
            ContinuousBasis::SampledAdjointSeries
        } else {
            ContinuousBasis::Undetermined
        }
    };
    SpectrumReport {
        p_limits: spec.p_limits(),
        q_limits: spec.q_limits(),
        norm_bound: spec.norm_bound(opts.k_max),
        exponent: exp,
        k_max: opts.k_max,
        s2,
        s3_candidates,
        two_band_holds_from,
        continuous_basis,
        boundary_samples,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequence::{two_band_example, Override, ResidueClass};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn shift() -> SequenceSpec {
        SequenceSpec::periodic(&[0.0], &[1.0]).unwrap()
    }

    fn spike() -> SequenceSpec {
        SequenceSpec::asymptotic(
            vec![ResidueClass::constant(0.0)],
            vec![ResidueClass::constant(1.0)],
            &[Override {
                which: Which::A,
                k: 1,
                value: 5.0,
            }],
        )
        .unwrap()
    }

    fn brute_eigen_index(
        spec: &SequenceSpec,
        lambda: Complex64,
        k_max: usize,
        tol: f64,
    ) -> Option<usize> {
        (1..=k_max)
            .rev()
            .find(|&k| (spec.a(k) - lambda).norm() <= tol)
    }

    #[test]
    fn eigen_index_cases() {
        assert_eq!(eigen_index(&spike(), c(5.0), 100_000, 1e-11), Ok(Some(1)));
        let ex = two_band_example();
        assert_eq!(eigen_index(&ex, c(0.25), 100_000, 1.25e-12), Ok(Some(2)));
        assert_eq!(brute_eigen_index(&ex, c(0.25), 100_000, 1.25e-12), Some(2));
        assert_eq!(eigen_index(&shift(), c(0.3), 100_000, 1e-12), Ok(None));
        assert_eq!(eigen_index(&shift(), c(0.0), 100, 1e-12), Ok(Some(100)));
        assert_eq!(
            eigen_index(&ex, c(1.0), 100_000, 2e-12),
            Err(SpectralError::NearLimitAmbiguous { index: 1 })
        );
        assert_eq!(
            eigen_index(&ex, Complex64::new(0.25, 1e-3), 100_000, 1e-12),
            Ok(None)
        );
    }

    #[test]
    fn eigen_index_agrees_with_brute_force() {
        let spec = SequenceSpec::asymptotic(
            vec![
                ResidueClass::new(2.0, PerturbationForm::CoeffOverK(3.0)),
                ResidueClass::new(-1.0, PerturbationForm::CoeffOverKSquared(-7.0)),
                ResidueClass::constant(0.5),
            ],
            vec![ResidueClass::constant(1.0); 3],
            &[
                Override {
                    which: Which::A,
                    k: 4,
                    value: 2.0 + 3.0 / 7.0,
                },
                Override {
                    which: Which::A,
                    k: 9,
                    value: 11.0,
                },
            ],
        )
        .unwrap();
        let k_max = 3000;
        let mut probes: Vec<f64> = (1..200).map(|k| spec.a(k)).collect();
        probes.extend([2.0, -1.0, 0.5, 11.0, 2.0 + 3.0 / 7.0, 3.3, -8.0]);
        for tol in [1e-12, 1e-6, 1e-3] {
            for &x in &probes {
                let l = c(x);
                let fast = eigen_index(&spec, l, k_max, tol);
                let brute = brute_eigen_index(&spec, l, k_max, tol);
                match fast {
                    Ok(found) => assert_eq!(found, brute, "x={x} tol={tol}"),
                    Err(SpectralError::NearLimitAmbiguous { .. }) => assert_eq!(brute, None),
                    Err(e) => panic!("{e}"),
                }
            }
        }
    }

    #[test]
    fn classify_closed_form_cases() {
        let exp = ExponentPair::new(2.0).unwrap();
        let o = Options::default();
        let r = classify(&shift(), c(0.5), exp, &o);
        assert_eq!(
            (r.part, r.goldberg),
            (SpectrumPart::Residual, Goldberg::C1OrC2)
        );
        assert_eq!(r.evidence.summary(), "interior");
        let r = classify(&shift(), c(1.0), exp, &o);
        assert_eq!(
            (r.part, r.goldberg),
            (SpectrumPart::Continuous, Goldberg::B2)
        );
        assert_eq!(r.evidence.summary(), "boundary;adjoint-series:Diverges");
        let r = classify(&shift(), c(2.0), exp, &o);
        assert_eq!(
            (r.part, r.goldberg),
            (SpectrumPart::Regular, Goldberg::None)
        );
        let r = classify(&spike(), c(5.0), exp, &o);
        assert_eq!((r.part, r.goldberg), (SpectrumPart::Point, Goldberg::C3));
        assert_eq!(r.evidence.matched_index, Some(1));
    }

    #[test]
    fn classify_example_real_boundary_root() {
        // real root of (λ - 1)(λ - 1/2) = 6 by bisection
        let (mut lo, mut hi) = (2.0f64, 4.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if (mid - 1.0) * (mid - 0.5) < 6.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!((lo - 3.21221).abs() < 1e-5);
        let exp = ExponentPair::new(2.0).unwrap();
        let r = classify(&two_band_example(), c(lo), exp, &Options::default());
        assert_eq!(r.part, SpectrumPart::Continuous);
    }

    #[test]
    fn grid_coordinates_mirror_exactly() {
        for n in [2, 3, 41, 81] {
            for j in 0..n {
                assert_eq!(
                    grid_coord(-4.0, 4.0, j, n),
                    -grid_coord(-4.0, 4.0, n - 1 - j, n)
                );
            }
        }
        assert_eq!(grid_coord(-2.0, 2.0, 0, 41), -2.0);
        assert_eq!(grid_coord(-2.0, 2.0, 40, 41), 2.0);
    }

    #[test]
    fn corner_grid() {
        let exp = ExponentPair::new(2.0).unwrap();
        let g = classify_grid(
            &shift(),
            Window::new(-2.0, 2.0, -2.0, 2.0),
            (2, 2),
            exp,
            &Options::default(),
            2,
        );
        assert_eq!(g.cells.len(), 4);
        assert_eq!(g.cells[0].lambda, Complex64::new(-2.0, -2.0));
        assert_eq!(g.cells[1].lambda, Complex64::new(2.0, -2.0));
        assert!(g
            .cells
            .iter()
            .all(|c| c.classification.part == SpectrumPart::Regular));
    }

    #[test]
    fn reports() {
        let exp = ExponentPair::new(2.0).unwrap();
        let o = Options::default();
        let r = spectrum_report(&two_band_example(), exp, &o);
        assert!(r.s2.is_empty() && r.s3_candidates.is_empty());
        assert_eq!(r.two_band_holds_from, Some(Some(3)));
        let text = r.to_string();
        assert!(text.contains("sigma_p = empty\n"));
        assert!(text.contains("sigma_r = interior\n"));
        assert!(text.contains("sigma_c = boundary minus {a_k}\n"));

        let r = spectrum_report(&shift(), exp, &o);
        assert_eq!(r.continuous_basis, ContinuousBasis::SampledAdjointSeries);
        assert!(r.point_spectrum_is_empty());
        assert_eq!(r.two_band_holds_from, None);

        let periodic = SequenceSpec::periodic(&[1.0, 0.5], &[2.0, 3.0]).unwrap();
        let r = spectrum_report(&periodic, exp, &o);
        assert!(r.s2.is_empty());

        let r = spectrum_report(&spike(), exp, &o);
        assert_eq!(r.s2.len(), 1);
        assert_eq!(r.s2[0].k, 1);
        assert!(r.to_string().contains("sigma_p = {a_1=5}"));
    }
}
