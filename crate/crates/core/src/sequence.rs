//! Coefficient sequences of the difference operator.
//!
//! A sequence is described per residue class modulo the period `m`: each
//! class has a limit and a perturbation that vanishes as `k` grows. A finite
//! table of explicit overrides covers irregular prefixes. All indices on the
//! public surface are 1-based.

use std::collections::BTreeMap;

use crate::error::{SpecError, SpectralError};

/// Perturbation added to a residue-class limit.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum PerturbationForm {
    #[default]
    ConstantZero,
    /// `coeff / k`
    CoeffOverK(f64),
    /// `coeff / k^2`
    CoeffOverKSquared(f64),
}

impl PerturbationForm {
    pub fn evaluate(&self, k: usize) -> f64 {
        let k = k as f64;
        match *self {
            PerturbationForm::ConstantZero => 0.0,
            PerturbationForm::CoeffOverK(c) => c / k,
            PerturbationForm::CoeffOverKSquared(c) => c / (k * k),
        }
    }

    pub fn coeff(&self) -> f64 {
        match *self {
            PerturbationForm::ConstantZero => 0.0,
            PerturbationForm::CoeffOverK(c) | PerturbationForm::CoeffOverKSquared(c) => c,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeff() == 0.0
    }

    /// Power of `k` in the denominator (0 for the zero form).
    pub(crate) fn order(&self) -> u32 {
        match self {
            PerturbationForm::ConstantZero => 0,
            PerturbationForm::CoeffOverK(_) => 1,
            PerturbationForm::CoeffOverKSquared(_) => 2,
        }
    }
}

/// Limit plus perturbation for one residue class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidueClass {
    pub limit: f64,
    pub perturbation: PerturbationForm,
}

impl ResidueClass {
    pub fn new(limit: f64, perturbation: PerturbationForm) -> Self {
        Self {
            limit,
            perturbation,
        }
    }

    pub fn constant(limit: f64) -> Self {
        Self::new(limit, PerturbationForm::ConstantZero)
    }

    pub(crate) fn value_at(&self, k: usize) -> f64 {
        self.limit + self.perturbation.evaluate(k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Which {
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Override {
    pub which: Which,
    pub k: usize,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Periodic,
    Asymptotic,
}

/// The sequences `a` (diagonal) and `b` (subdiagonal) of the operator.
///
/// Immutable once built. Class `r` (0-based) holds the indices
/// `k ≡ r + 1 (mod m)`, so `a_classes[0]` carries the limit `p_1` and
/// `a_classes[m - 1]` carries `p_m`.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceSpec {
    mode: Mode,
    a_classes: Vec<ResidueClass>,
    b_classes: Vec<ResidueClass>,
    a_overrides: BTreeMap<usize, f64>,
    b_overrides: BTreeMap<usize, f64>,
}

impl SequenceSpec {
    /// Periodic sequences cycling the given values.
    pub fn periodic(a_values: &[f64], b_values: &[f64]) -> Result<Self, SpecError> {
        if let Some(i) = b_values.iter().position(|&b| b == 0.0) {
            return Err(SpecError::ZeroB { k: i + 1 });
        }
        let a = a_values
            .iter()
            .copied()
            .map(ResidueClass::constant)
            .collect();
        let b = b_values
            .iter()
            .copied()
            .map(ResidueClass::constant)
            .collect();
        Self::build(Mode::Periodic, a, b, &[])
    }

    /// Asymptotically periodic sequences.
    pub fn asymptotic(
        a_classes: Vec<ResidueClass>,
        b_classes: Vec<ResidueClass>,
        overrides: &[Override],
    ) -> Result<Self, SpecError> {
        Self::build(Mode::Asymptotic, a_classes, b_classes, overrides)
    }

    /// Periodic spec from per-class descriptions; rejects anything non-periodic.
    pub fn periodic_from_classes(
        a_classes: Vec<ResidueClass>,
        b_classes: Vec<ResidueClass>,
        overrides: &[Override],
    ) -> Result<Self, SpecError> {
        let perturbed = a_classes
            .iter()
            .chain(&b_classes)
            .any(|c| !c.perturbation.is_zero());
        if perturbed || !overrides.is_empty() {
            return Err(SpecError::NotPeriodic);
        }
        Self::build(Mode::Periodic, a_classes, b_classes, &[])
    }

    fn build(
        mode: Mode,
        a_classes: Vec<ResidueClass>,
        b_classes: Vec<ResidueClass>,
        overrides: &[Override],
    ) -> Result<Self, SpecError> {
        if a_classes.is_empty() || b_classes.is_empty() {
            return Err(SpecError::EmptyPeriod);
        }
        if a_classes.len() != b_classes.len() {
            return Err(SpecError::PeriodMismatch {
                a: a_classes.len(),
                b: b_classes.len(),
            });
        }
        let finite = |c: &ResidueClass| c.limit.is_finite() && c.perturbation.coeff().is_finite();
        if !a_classes.iter().chain(&b_classes).all(finite) {
            return Err(SpecError::NonFinite);
        }
        let mut a_overrides = BTreeMap::new();
        let mut b_overrides = BTreeMap::new();
        for o in overrides {
            if o.k == 0 {
                return Err(SpecError::ZeroIndex);
            }
            if !o.value.is_finite() {
                return Err(SpecError::NonFinite);
            }
            match o.which {
                Which::A => a_overrides.insert(o.k, o.value),
                Which::B => b_overrides.insert(o.k, o.value),
            };
        }
        let spec = Self {
            mode,
            a_classes,
            b_classes,
            a_overrides,
            b_overrides,
        };
        spec.validate_b()?;
        Ok(spec)
    }

    /// Rejects any `b_k = 0`: overrides are checked directly, each analytic
    /// class by solving `q + c/k^e = 0` for `k`, and `k <= 10m` explicitly.
    fn validate_b(&self) -> Result<(), SpecError> {
        let m = self.period();
        for (i, class) in self.b_classes.iter().enumerate() {
            if class.limit == 0.0 {
                return Err(SpecError::ZeroQ { index: i + 1 });
            }
        }
        if let Some((&k, _)) = self.b_overrides.iter().find(|(_, &v)| v == 0.0) {
            return Err(SpecError::ZeroB { k });
        }
        for (r, class) in self.b_classes.iter().enumerate() {
            let c = class.perturbation.coeff();
            let order = class.perturbation.order();
            if c == 0.0 || order == 0 {
                continue;
            }
            // root of q + c/k^e in k
            let ratio = -c / class.limit;
            if ratio <= 0.0 {
                continue;
            }
            let root = if order == 1 { ratio } else { ratio.sqrt() };
            let centre = root.round();
            let lo = (centre - 2.0).max(1.0) as usize;
            let hi = (centre + 2.0).min(usize::MAX as f64 / 2.0) as usize;
            for k in lo..=hi {
                if (k - 1) % m == r
                    && !self.b_overrides.contains_key(&k)
                    && class.value_at(k) == 0.0
                {
                    return Err(SpecError::ZeroB { k });
                }
            }
        }
        for k in 1..=10 * m {
            if self.term(Which::B, k) == 0.0 {
                return Err(SpecError::ZeroB { k });
            }
        }
        Ok(())
    }

    pub fn period(&self) -> usize {
        self.a_classes.len()
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn a_classes(&self) -> &[ResidueClass] {
        &self.a_classes
    }

    pub fn b_classes(&self) -> &[ResidueClass] {
        &self.b_classes
    }

    pub fn overrides(&self) -> impl Iterator<Item = Override> + '_ {
        let a = self.a_overrides.iter().map(|(&k, &value)| Override {
            which: Which::A,
            k,
            value,
        });
        let b = self.b_overrides.iter().map(|(&k, &value)| Override {
            which: Which::B,
            k,
            value,
        });
        a.chain(b)
    }

    pub(crate) fn a_overrides(&self) -> &BTreeMap<usize, f64> {
        &self.a_overrides
    }

    /// Limits `p_1..p_m` of the diagonal.
    pub fn p_limits(&self) -> Vec<f64> {
        self.a_classes.iter().map(|c| c.limit).collect()
    }

    /// Limits `q_1..q_m` of the subdiagonal.
    pub fn q_limits(&self) -> Vec<f64> {
        self.b_classes.iter().map(|c| c.limit).collect()
    }

    /// 0-based residue class of the 1-based index `k`.
    pub fn class_of(&self, k: usize) -> usize {
        (k - 1) % self.period()
    }

    /// Largest overridden index, 0 if none.
    pub fn last_override(&self) -> usize {
        let a = self.a_overrides.keys().next_back().copied().unwrap_or(0);
        let b = self.b_overrides.keys().next_back().copied().unwrap_or(0);
        a.max(b)
    }

    /// Exact coefficient `a_k` or `b_k`, `k >= 1`.
    pub fn term(&self, which: Which, k: usize) -> f64 {
        assert!(k >= 1, "sequence indices are 1-based");
        let (classes, overrides) = match which {
            Which::A => (&self.a_classes, &self.a_overrides),
            Which::B => (&self.b_classes, &self.b_overrides),
        };
        if let Some(&v) = overrides.get(&k) {
            return v;
        }
        let v = classes[self.class_of(k)].value_at(k);
        debug_assert!(which == Which::A || v != 0.0, "b_{k} evaluated to zero");
        v
    }

    /// `a_k - p_r` or `b_k - q_r` for the residue class `r` of `k`.
    ///
    /// Uses the perturbation value directly when `k` is not overridden, so
    /// no cancellation occurs.
    pub fn deviation(&self, which: Which, k: usize) -> f64 {
        assert!(k >= 1, "sequence indices are 1-based");
        let (classes, overrides) = match which {
            Which::A => (&self.a_classes, &self.a_overrides),
            Which::B => (&self.b_classes, &self.b_overrides),
        };
        let class = &classes[self.class_of(k)];
        match overrides.get(&k) {
            Some(&v) => v - class.limit,
            None => class.perturbation.evaluate(k),
        }
    }

    pub fn a(&self, k: usize) -> f64 {
        self.term(Which::A, k)
    }

    pub fn b(&self, k: usize) -> f64 {
        self.term(Which::B, k)
    }

    /// `sup |a_k| + sup |b_k|` over `k <= k_max` and the class limits.
    ///
    /// Upper bound for the operator norm on every `l_p`.
    pub fn norm_bound(&self, k_max: usize) -> f64 {
        let sup = |which: Which, classes: &[ResidueClass]| {
            let limits = classes.iter().map(|c| c.limit.abs());
            (1..=k_max)
                .map(|k| self.term(which, k).abs())
                .chain(limits)
                .fold(0.0_f64, f64::max)
        };
        sup(Which::A, &self.a_classes) + sup(Which::B, &self.b_classes)
    }
}

/// Hölder-conjugate exponents `1/p + 1/q = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentPair {
    p: f64,
    q: f64,
}

impl ExponentPair {
    pub fn new(p: f64) -> Result<Self, SpectralError> {
        if !(p.is_finite() && p > 1.0) {
            return Err(SpectralError::BadExponent(p));
        }
        let q = p / (p - 1.0);
        if !q.is_finite() {
            return Err(SpectralError::BadExponent(p));
        }
        Ok(Self { p, q })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }
}

/// The worked example with `a_k = 1 - 1/k^2` (odd), `1/2 - 1/k^2` (even),
/// `b_k = 2 - 1/k` (odd), `3 - 1/k` (even).
pub fn two_band_example() -> SequenceSpec {
    use PerturbationForm::*;
    SequenceSpec::asymptotic(
        vec![
            ResidueClass::new(1.0, CoeffOverKSquared(-1.0)),
            ResidueClass::new(0.5, CoeffOverKSquared(-1.0)),
        ],
        vec![
            ResidueClass::new(2.0, CoeffOverK(-1.0)),
            ResidueClass::new(3.0, CoeffOverK(-1.0)),
        ],
        &[],
    )
    .expect("example coefficients are valid")
}
