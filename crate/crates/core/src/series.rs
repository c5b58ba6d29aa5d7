//! Series verdicts and the partial-sum heuristic used on the boundary curve.

/// Outcome of a convergence test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SeriesState {
    Converges,
    Diverges,
    Inconclusive,
}

impl SeriesState {
    pub fn as_str(&self) -> &'static str {
        match self {
            SeriesState::Converges => "Converges",
            SeriesState::Diverges => "Diverges",
            SeriesState::Inconclusive => "Inconclusive",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesVerdict {
    pub state: SeriesState,
    pub terms_used: usize,
    pub last_partial_sum: f64,
    /// Per-period ratio of consecutive terms, when one was measured.
    pub ratio_estimate: Option<f64>,
}

impl SeriesVerdict {
    pub(crate) fn fast(state: SeriesState, ratio: f64) -> Self {
        Self {
            state,
            terms_used: 0,
            last_partial_sum: 0.0,
            ratio_estimate: Some(ratio),
        }
    }
}

/// Neumaier compensated sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Knobs of the boundary partial-sum heuristic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeuristicParams {
    pub terms: usize,
    pub tail_window: usize,
    pub divergence_threshold: f64,
    /// Allowed per-period decrease of `ln |t|` still counted as nondecreasing.
    pub log_slack: f64,
}

const TAIL_RELATIVE: f64 = 1e-10;
const VANISHING: f64 = 1e-300;

/// Applies the partial-sum heuristic to a series given by the natural logs
/// of its (nonnegative) terms, with period `m`.
///
/// Converges when the last `tail_window` terms sum below
/// `1e-10 * (1 + S)`; Diverges when the partial sum passes the threshold or
/// the term magnitudes at the last four period ends are nondecreasing and
/// not vanishing. Otherwise Inconclusive.
pub fn heuristic_verdict<I>(log_terms: I, m: usize, params: &HeuristicParams) -> SeriesVerdict
where
    I: IntoIterator<Item = f64>,
{
    let mut logs = Vec::with_capacity(params.terms);
    let mut sum = CompensatedSum::new();
    for l in log_terms.into_iter().take(params.terms) {
        logs.push(l);
        sum.add(l.exp());
        if sum.value() > params.divergence_threshold {
            return SeriesVerdict {
                state: SeriesState::Diverges,
                terms_used: logs.len(),
                last_partial_sum: sum.value(),
                ratio_estimate: None,
            };
        }
    }
    let n = logs.len();
    let partial = sum.value();
    let ratio = (n > m).then(|| (logs[n - 1] - logs[n - 1 - m]).exp());
    let verdict = |state| SeriesVerdict {
        state,
        terms_used: n,
        last_partial_sum: partial,
        ratio_estimate: ratio,
    };
    if n == 0 {
        return verdict(SeriesState::Converges);
    }

    let window = params.tail_window.min(n);
    let mut tail = CompensatedSum::new();
    for &l in &logs[n - window..] {
        tail.add(l.exp());
    }
    if tail.value() < TAIL_RELATIVE * (1.0 + partial) {
        return verdict(SeriesState::Converges);
    }

    if n > 3 * m {
        let ends = [
            logs[n - 1 - 3 * m],
            logs[n - 1 - 2 * m],
            logs[n - 1 - m],
            logs[n - 1],
        ];
        let nondecreasing = ends.windows(2).all(|w| w[1] - w[0] >= -params.log_slack);
        if nondecreasing && logs[n - 1] > VANISHING.ln() {
            return verdict(SeriesState::Diverges);
        }
    }
    verdict(SeriesState::Inconclusive)
}
