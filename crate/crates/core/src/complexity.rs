//! Statistical complexity of finite function classes: exact and Monte-Carlo
//! Rademacher/Gaussian complexities (signed and absolute variants), the
//! Massart finite-class bound, and the numerical verifiers for the
//! robustness-sandwich, amplification, and concentration inequalities.
//!
//! A function class here is always materialized as a finite set `A` of real
//! `m`-vectors: one vector of function values per channel over a fixed
//! sample set. The empirical complexity is the expected normalized supremum
//! `E_w sup_{v in A} (1/m) <w, v>` over random weight vectors `w` — uniform
//! signs for the Rademacher variant, standard normal draws for the Gaussian
//! one; the absolute variants put `|.|` inside the supremum.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::channel::QuantumChannel;
use crate::classes::{augment, CircuitClass, DEFAULT_WORD_BUDGET};
use crate::error::{Error, Result};
use crate::rng::stream_rng;
use crate::sample::{function_vector, SampleDistribution, SampleSet};

/// Exact enumeration guard: at most `2^22` sign vectors.
pub const EXACT_SIGN_GUARD: usize = 22;
/// Function vectors closer than this (max-entry) are merged before the sup.
pub const VECTOR_DEDUP_TOL: f64 = 1e-12;
/// Inequality checks tolerate this much negative slack from rounding.
pub const SLACK_TOL: f64 = 1e-9;
/// Minimum Monte-Carlo draw count accepted by the set-level estimators.
pub const MIN_MC_SAMPLES: usize = 100;
/// Repetitions used internally to pin down an expected complexity before
/// measuring concentration tails around it.
const REFERENCE_REPS: usize = 2000;

/// Work-phase tags for [`stream_rng`] derivation.
const PHASE_EXPECTED: u64 = 1;
const PHASE_CONCENTRATION_REF: u64 = 2;
const PHASE_CONCENTRATION_TAIL: u64 = 3;

/// Random-weight family of a complexity estimate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightKind {
    Rademacher,
    Gaussian,
}

/// Whether the supremum runs over signed or absolute correlations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValueMode {
    Signed,
    Absolute,
}

/// One of the four complexity variants.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexityVariant {
    pub weights: WeightKind,
    pub mode: ValueMode,
}

impl ComplexityVariant {
    pub const RADEMACHER_SIGNED: Self = Self {
        weights: WeightKind::Rademacher,
        mode: ValueMode::Signed,
    };
    pub const RADEMACHER_ABSOLUTE: Self = Self {
        weights: WeightKind::Rademacher,
        mode: ValueMode::Absolute,
    };
    pub const GAUSSIAN_SIGNED: Self = Self {
        weights: WeightKind::Gaussian,
        mode: ValueMode::Signed,
    };
    pub const GAUSSIAN_ABSOLUTE: Self = Self {
        weights: WeightKind::Gaussian,
        mode: ValueMode::Absolute,
    };
}

/// How an estimate was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    MonteCarlo,
}

/// Dispatch selector for the class-level estimators.
#[derive(Clone, Copy, Debug)]
pub enum EstimatorMethod {
    Exact,
    MonteCarlo { n_samples: usize, seed: u64 },
}

/// A complexity value with its provenance. Exact estimates carry no
/// confidence interval; Monte-Carlo ones record draw count, 95% CI
/// half-width and seed.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComplexityEstimate {
    pub value: f64,
    pub method: Method,
    pub variant: ComplexityVariant,
    pub mc_samples: Option<usize>,
    pub ci95_halfwidth: Option<f64>,
    pub seed: Option<u64>,
}

impl ComplexityEstimate {
    fn exact(value: f64, variant: ComplexityVariant) -> Self {
        Self {
            value,
            method: Method::Exact,
            variant,
            mc_samples: None,
            ci95_halfwidth: None,
            seed: None,
        }
    }
}

fn validate_set(a: &[Vec<f64>]) -> Result<usize> {
    let Some(first) = a.first() else {
        return Err(Error::InvalidParameter(
            "complexity needs a nonempty vector set".into(),
        ));
    };
    let m = first.len();
    if m == 0 {
        return Err(Error::InvalidParameter(
            "complexity vectors need at least one coordinate".into(),
        ));
    }
    for v in a {
        if v.len() != m {
            return Err(Error::DimensionMismatch {
                context: "complexity vector length",
                expected: m,
                got: v.len(),
            });
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter(
                "complexity vectors must be finite".into(),
            ));
        }
    }
    Ok(m)
}

/// Merges vectors that agree within `tol` in every coordinate; the survivor
/// of each group is reported at the position of its earliest input
/// occurrence. Sort-assisted: candidates are compared only against survivors
/// whose leading coordinate is within `tol`.
pub fn dedupe_vectors(vectors: &[Vec<f64>], tol: f64) -> Vec<Vec<f64>> {
    let mut order: Vec<usize> = (0..vectors.len()).collect();
    order.sort_by(|&i, &j| {
        let (a, b) = (&vectors[i], &vectors[j]);
        for (x, y) in a.iter().zip(b.iter()) {
            match x.total_cmp(y) {
                std::cmp::Ordering::Equal => continue,
                other => return other,
            }
        }
        std::cmp::Ordering::Equal
    });
    let mut kept_sorted: Vec<usize> = Vec::new();
    for &idx in &order {
        let close = kept_sorted
            .iter()
            .rev()
            .take_while(|&&k| (vectors[k][0] - vectors[idx][0]).abs() <= tol)
            .any(|&k| {
                vectors[k]
                    .iter()
                    .zip(vectors[idx].iter())
                    .all(|(x, y)| (x - y).abs() <= tol)
            });
        if !close {
            kept_sorted.push(idx);
        }
    }
    // Restore input order, first representative wins.
    kept_sorted.sort_unstable();
    kept_sorted.into_iter().map(|i| vectors[i].clone()).collect()
}

fn sup_correlation(a: &[Vec<f64>], weights: &[f64], mode: ValueMode) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for v in a {
        let mut s = 0.0;
        for (w, x) in weights.iter().zip(v.iter()) {
            s += w * x;
        }
        let s = match mode {
            ValueMode::Signed => s,
            ValueMode::Absolute => s.abs(),
        };
        if s > best {
            best = s;
        }
    }
    best
}

fn set_exact(a: &[Vec<f64>], mode: ValueMode) -> Result<f64> {
    let m = validate_set(a)?;
    if m > EXACT_SIGN_GUARD {
        return Err(Error::GuardExceeded {
            what: "exact sign-vector enumeration length",
            limit: EXACT_SIGN_GUARD,
            requested: m,
        });
    }
    let total = 1u64 << m;
    let mut weights = vec![0.0f64; m];
    let mut acc = 0.0;
    for mask in 0..total {
        for (i, w) in weights.iter_mut().enumerate() {
            *w = if mask >> i & 1 == 1 { 1.0 } else { -1.0 };
        }
        acc += sup_correlation(a, &weights, mode);
    }
    Ok(acc / total as f64 / m as f64)
}

/// Exact signed Rademacher complexity of a finite vector set by full
/// enumeration of the `2^m` sign vectors. Guarded at `m <= 22`.
pub fn rademacher_set_exact(a: &[Vec<f64>]) -> Result<f64> {
    set_exact(a, ValueMode::Signed)
}

/// Exact absolute-variant Rademacher complexity (absolute value inside the
/// supremum). Same enumeration and guard as [`rademacher_set_exact`].
pub fn rademacher_set_exact_abs(a: &[Vec<f64>]) -> Result<f64> {
    set_exact(a, ValueMode::Absolute)
}

fn set_mc(
    a: &[Vec<f64>],
    variant: ComplexityVariant,
    n_samples: usize,
    seed: u64,
) -> Result<ComplexityEstimate> {
    let m = validate_set(a)?;
    if n_samples < MIN_MC_SAMPLES {
        return Err(Error::InvalidParameter(format!(
            "Monte-Carlo needs at least {MIN_MC_SAMPLES} draws, got {n_samples}"
        )));
    }
    let mut rng = stream_rng(seed, 0, 0);
    let mut weights = vec![0.0f64; m];
    let mut sum = 0.0;
    let mut sumsq = 0.0;
    for _ in 0..n_samples {
        for w in weights.iter_mut() {
            *w = match variant.weights {
                WeightKind::Rademacher => {
                    if rng.gen::<bool>() {
                        1.0
                    } else {
                        -1.0
                    }
                }
                WeightKind::Gaussian => rng.sample(StandardNormal),
            };
        }
        let v = sup_correlation(a, &weights, variant.mode) / m as f64;
        sum += v;
        sumsq += v * v;
    }
    let n = n_samples as f64;
    let mean = sum / n;
    let var = ((sumsq - n * mean * mean) / (n - 1.0)).max(0.0);
    let ci95 = 1.96 * (var / n).sqrt();
    Ok(ComplexityEstimate {
        value: mean,
        method: Method::MonteCarlo,
        variant,
        mc_samples: Some(n_samples),
        ci95_halfwidth: Some(ci95),
        seed: Some(seed),
    })
}

/// Monte-Carlo signed Rademacher complexity with a 95% confidence interval
/// from the sample standard deviation. Reproducible under `seed`.
pub fn rademacher_set_mc(a: &[Vec<f64>], n_samples: usize, seed: u64) -> Result<ComplexityEstimate> {
    set_mc(a, ComplexityVariant::RADEMACHER_SIGNED, n_samples, seed)
}

/// Monte-Carlo signed Gaussian complexity (standard-normal weights);
/// otherwise as [`rademacher_set_mc`].
pub fn gaussian_set_mc(a: &[Vec<f64>], n_samples: usize, seed: u64) -> Result<ComplexityEstimate> {
    set_mc(a, ComplexityVariant::GAUSSIAN_SIGNED, n_samples, seed)
}

/// Finite-class bound `max_{v in A} ||v||_2 sqrt(2 ln|A|) / m`. Natural
/// logarithm; a singleton set gives 0.
pub fn massart_bound(a: &[Vec<f64>]) -> Result<f64> {
    let m = validate_set(a)?;
    let max_norm = a
        .iter()
        .map(|v| v.iter().map(|x| x * x).sum::<f64>().sqrt())
        .fold(0.0f64, f64::max);
    Ok(max_norm * (2.0 * (a.len() as f64).ln()).sqrt() / m as f64)
}

/// The deduplicated function-vector set of a class on a sample set.
pub fn class_vectors(class: &CircuitClass, s: &SampleSet) -> Result<Vec<Vec<f64>>> {
    let mut vs = Vec::with_capacity(class.len());
    for chan in class.channels() {
        vs.push(function_vector(chan, s)?);
    }
    Ok(dedupe_vectors(&vs, VECTOR_DEDUP_TOL))
}

/// Empirical complexity of a circuit class on a sample set: builds the
/// deduplicated function-vector set and dispatches to the requested
/// set-level estimator. Exact Gaussian values are not provided (no
/// closed-form enumeration exists); request Monte-Carlo for that variant.
pub fn empirical_complexity(
    class: &CircuitClass,
    s: &SampleSet,
    variant: ComplexityVariant,
    method: EstimatorMethod,
) -> Result<ComplexityEstimate> {
    if class.is_empty() {
        return Err(Error::InvalidParameter(
            "empirical complexity needs a nonempty class".into(),
        ));
    }
    let a = class_vectors(class, s)?;
    match (method, variant.weights) {
        (EstimatorMethod::Exact, WeightKind::Rademacher) => {
            Ok(ComplexityEstimate::exact(set_exact(&a, variant.mode)?, variant))
        }
        (EstimatorMethod::Exact, WeightKind::Gaussian) => Err(Error::InvalidParameter(
            "exact evaluation is only available for the Rademacher variants; \
             use Monte-Carlo for Gaussian complexity"
                .into(),
        )),
        (EstimatorMethod::MonteCarlo { n_samples, seed }, _) => {
            set_mc(&a, variant, n_samples, seed)
        }
    }
}

/// Expected signed Rademacher complexity under a sample distribution:
/// averages the exact empirical value over `repetitions` seeded draws of
/// size `m`, reporting a 95% CI over repetitions.
pub fn expected_complexity(
    class: &CircuitClass,
    d: &SampleDistribution,
    m: usize,
    repetitions: usize,
    seed: u64,
) -> Result<ComplexityEstimate> {
    if repetitions < 10 {
        return Err(Error::InvalidParameter(format!(
            "expected complexity needs at least 10 repetitions, got {repetitions}"
        )));
    }
    let mut sum = 0.0;
    let mut sumsq = 0.0;
    for rep in 0..repetitions {
        let mut rng = stream_rng(seed, PHASE_EXPECTED, rep as u64);
        let s = d.draw(m, &mut rng)?;
        let a = class_vectors(class, &s)?;
        let v = set_exact(&a, ValueMode::Signed)?;
        sum += v;
        sumsq += v * v;
    }
    let n = repetitions as f64;
    let mean = sum / n;
    let var = ((sumsq - n * mean * mean) / (n - 1.0)).max(0.0);
    Ok(ComplexityEstimate {
        value: mean,
        method: Method::MonteCarlo,
        variant: ComplexityVariant::RADEMACHER_SIGNED,
        mc_samples: Some(repetitions),
        ci95_halfwidth: Some(1.96 * (var / n).sqrt()),
        seed: Some(seed),
    })
}

/// Amplification factor `min{1 + 2 gamma_max, (1 + 2 gamma_psi)^k}`; without
/// a `gamma_max` cap it is just the power term.
pub fn gamma_star(gamma_psi: f64, gamma_max: Option<f64>, k: usize) -> Result<f64> {
    if !(gamma_psi >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "gamma_psi must be >= 0, got {gamma_psi}"
        )));
    }
    let grown = (1.0 + 2.0 * gamma_psi).powi(k as i32);
    match gamma_max {
        None => Ok(grown),
        Some(g) => {
            if !(g >= 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "gamma_max must be >= 0, got {g}"
                )));
            }
            Ok(grown.min(1.0 + 2.0 * g))
        }
    }
}

/// Result of checking the one-use sandwich
/// `R(F(O)) <= R(F(O u {psi})) <= (1 + gamma) R(F(O))` on one sample set.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SandwichReport {
    pub m: usize,
    /// Exact signed complexity of the free class.
    pub lhs: f64,
    /// Exact signed complexity of the class with the resource appended.
    pub mid: f64,
    /// `(1 + gamma) * lhs`.
    pub rhs: f64,
    pub gamma: f64,
    pub slack_lower: f64,
    pub slack_upper: f64,
    pub ok: bool,
}

/// Checks the sandwich on the given sample set with a certified robustness
/// value `gamma` for `psi`. Both sides are computed exactly; `ok` means both
/// slacks are at least `-`[`SLACK_TOL`].
pub fn check_theorem1(
    o: &CircuitClass,
    psi: &QuantumChannel,
    s: &SampleSet,
    gamma: f64,
) -> Result<SandwichReport> {
    if !(gamma >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "robustness bound must be >= 0, got {gamma}"
        )));
    }
    let mut vectors: Vec<Vec<f64>> = o
        .channels()
        .iter()
        .map(|c| function_vector(c, s))
        .collect::<Result<_>>()?;
    let a_free = dedupe_vectors(&vectors, VECTOR_DEDUP_TOL);
    vectors.push(function_vector(psi, s)?);
    let a_aug = dedupe_vectors(&vectors, VECTOR_DEDUP_TOL);
    let lhs = set_exact(&a_free, ValueMode::Signed)?;
    let mid = set_exact(&a_aug, ValueMode::Signed)?;
    let rhs = (1.0 + gamma) * lhs;
    let slack_lower = mid - lhs;
    let slack_upper = rhs - mid;
    Ok(SandwichReport {
        m: s.m(),
        lhs,
        mid,
        rhs,
        gamma,
        slack_lower,
        slack_upper,
        ok: slack_lower >= -SLACK_TOL && slack_upper >= -SLACK_TOL,
    })
}

/// Result of checking the k-use amplification bound
/// `R(F(class(k))) <= gamma_star * R(F(O))` plus the nesting monotonicity
/// of the word classes in `k` at fixed depth.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AmplificationReport {
    pub k: usize,
    pub depth: usize,
    pub m: usize,
    /// Exact complexity of the word class for each resource budget `0..=k`.
    pub values: Vec<f64>,
    /// Class sizes for each budget, for the record.
    pub class_sizes: Vec<usize>,
    pub gamma_star_value: f64,
    /// `gamma_star * values[0]`.
    pub bound_rhs: f64,
    /// `bound_rhs - values[k]`.
    pub slack: f64,
    pub monotone_ok: bool,
    pub bound_ok: bool,
    pub ok: bool,
}

/// Checks the amplification bound on one sample set: builds the word class
/// of products of at most `depth` factors with resource budget `j` for every
/// `j <= k`, computes exact complexities, and verifies the
/// `gamma_star`-scaled bound and monotonicity in `j`.
pub fn check_theorem2(
    o: &CircuitClass,
    psi: &QuantumChannel,
    k: usize,
    depth: usize,
    s: &SampleSet,
    gamma_psi: f64,
    gamma_max: Option<f64>,
) -> Result<AmplificationReport> {
    let gs = gamma_star(gamma_psi, gamma_max, k)?;
    let mut values = Vec::with_capacity(k + 1);
    let mut class_sizes = Vec::with_capacity(k + 1);
    for j in 0..=k {
        let class = augment(o, psi, j, depth, DEFAULT_WORD_BUDGET)?;
        let a = class_vectors(&class, s)?;
        values.push(set_exact(&a, ValueMode::Signed)?);
        class_sizes.push(class.len());
    }
    let monotone_ok = values.windows(2).all(|w| w[1] >= w[0] - SLACK_TOL);
    let bound_rhs = gs * values[0];
    let slack = bound_rhs - values[k];
    let bound_ok = slack >= -SLACK_TOL;
    Ok(AmplificationReport {
        k,
        depth,
        m: s.m(),
        values,
        class_sizes,
        gamma_star_value: gs,
        bound_rhs,
        slack,
        monotone_ok,
        bound_ok,
        ok: monotone_ok && bound_ok,
    })
}

/// Result of measuring how often the empirical complexity strays from its
/// expectation by at least `t`, against the two-sided exponential tail bound
/// `2 exp(-2 m t^2)` for `[0, 1]`-valued functions.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConcentrationReport {
    pub m: usize,
    pub t: f64,
    pub trials: usize,
    /// High-repetition estimate of the expected complexity.
    pub expected_estimate: f64,
    /// Fraction of fresh draws with `|empirical - expected| >= t`.
    pub tail_frequency: f64,
    /// `2 exp(-2 m t^2)`.
    pub bound: f64,
    /// Binomial standard error of the measured frequency.
    pub binomial_se: f64,
    pub ok: bool,
}

/// Estimates the expected complexity by high-repetition averaging, then
/// measures the deviation tail over `trials` fresh draws and compares it to
/// the exponential bound plus three binomial standard errors.
pub fn check_concentration(
    class: &CircuitClass,
    d: &SampleDistribution,
    m: usize,
    t: f64,
    trials: usize,
    seed: u64,
) -> Result<ConcentrationReport> {
    if trials < 1000 {
        return Err(Error::InvalidParameter(format!(
            "concentration measurement needs at least 1000 trials, got {trials}"
        )));
    }
    if !(t > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "deviation threshold must be positive, got {t}"
        )));
    }
    let mut reference_sum = 0.0;
    for rep in 0..REFERENCE_REPS {
        let mut rng = stream_rng(seed, PHASE_CONCENTRATION_REF, rep as u64);
        let s = d.draw(m, &mut rng)?;
        let a = class_vectors(class, &s)?;
        reference_sum += set_exact(&a, ValueMode::Signed)?;
    }
    let expected_estimate = reference_sum / REFERENCE_REPS as f64;

    let mut hits = 0usize;
    for trial in 0..trials {
        let mut rng = stream_rng(seed, PHASE_CONCENTRATION_TAIL, trial as u64);
        let s = d.draw(m, &mut rng)?;
        let a = class_vectors(class, &s)?;
        let v = set_exact(&a, ValueMode::Signed)?;
        if (v - expected_estimate).abs() >= t {
            hits += 1;
        }
    }
    let tail_frequency = hits as f64 / trials as f64;
    let bound = 2.0 * (-2.0 * m as f64 * t * t).exp();
    let binomial_se = (tail_frequency * (1.0 - tail_frequency) / trials as f64).sqrt();
    Ok(ConcentrationReport {
        m,
        t,
        trials,
        expected_estimate,
        tail_frequency,
        bound,
        binomial_se,
        ok: tail_frequency <= bound + 3.0 * binomial_se,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::{class_from_spec, clifford_class};
    use crate::gates::parse_gate_word;
    use crate::sample::SampleSet;

    fn vecs(rows: &[&[f64]]) -> Vec<Vec<f64>> {
        rows.iter().map(|r| r.to_vec()).collect()
    }

    #[test]
    fn exact_singleton_is_zero() {
        let v = rademacher_set_exact(&vecs(&[&[0.3, -1.7, 2.2]])).unwrap();
        assert!(v.abs() < 1e-12);
    }

    #[test]
    fn exact_two_point_example() {
        let v = rademacher_set_exact(&vecs(&[&[1.0, 1.0], &[-1.0, -1.0]])).unwrap();
        assert!((v - 0.5).abs() < 1e-15);
    }

    #[test]
    fn exact_guard_fires() {
        let long = vec![vec![0.0; 23]];
        assert!(matches!(
            rademacher_set_exact(&long),
            Err(Error::GuardExceeded { .. })
        ));
        assert!(rademacher_set_exact(&[]).is_err());
    }

    #[test]
    fn convex_hull_leaves_exact_value_unchanged() {
        let a = vecs(&[&[1.0, 0.2, -0.5], &[0.0, 1.0, 0.3]]);
        let mut with_mix = a.clone();
        with_mix.push(
            a[0].iter()
                .zip(a[1].iter())
                .map(|(x, y)| 0.3 * x + 0.7 * y)
                .collect(),
        );
        let plain = rademacher_set_exact(&a).unwrap();
        let mixed = rademacher_set_exact(&with_mix).unwrap();
        assert!((plain - mixed).abs() < 1e-12);
    }

    #[test]
    fn absolute_variant_dominates_signed() {
        let a = vecs(&[&[1.0, 0.2, -0.5], &[0.0, -1.0, 0.3]]);
        let signed = rademacher_set_exact(&a).unwrap();
        let absolute = rademacher_set_exact_abs(&a).unwrap();
        assert!(absolute >= signed - 1e-15);
        assert!(absolute >= 0.0);
    }

    #[test]
    fn massart_examples() {
        let v = massart_bound(&vecs(&[&[1.0, 1.0], &[-1.0, -1.0]])).unwrap();
        assert!((v - 0.8325546111576978).abs() < 1e-15);
        assert_eq!(massart_bound(&vecs(&[&[3.0, 4.0]])).unwrap(), 0.0);
        // Scales linearly with the set.
        let a = vecs(&[&[1.0, 0.0], &[0.0, 1.0]]);
        let scaled: Vec<Vec<f64>> =
            a.iter().map(|v| v.iter().map(|x| 2.5 * x).collect()).collect();
        let b1 = massart_bound(&a).unwrap();
        let b2 = massart_bound(&scaled).unwrap();
        assert!((b2 - 2.5 * b1).abs() < 1e-12);
    }

    #[test]
    fn massart_dominates_exact_on_example() {
        let a = vecs(&[&[1.0, 1.0], &[-1.0, -1.0]]);
        let exact = rademacher_set_exact(&a).unwrap();
        let bound = massart_bound(&a).unwrap();
        assert!(exact <= bound);
    }

    #[test]
    fn mc_matches_exact_within_ci() {
        let a = vecs(&[&[1.0, 0.0, 0.4], &[0.2, -0.8, 0.1], &[-1.0, 0.3, 0.3]]);
        let exact = rademacher_set_exact(&a).unwrap();
        let est = rademacher_set_mc(&a, 20_000, 11).unwrap();
        let ci = est.ci95_halfwidth.unwrap();
        assert!(
            (est.value - exact).abs() <= 3.0 * ci,
            "mc {} exact {} ci {}",
            est.value,
            exact,
            ci
        );
        assert_eq!(est.mc_samples, Some(20_000));
        assert_eq!(est.seed, Some(11));
    }

    #[test]
    fn mc_is_reproducible_and_guarded() {
        let a = vecs(&[&[1.0, -1.0], &[0.5, 0.5]]);
        let e1 = rademacher_set_mc(&a, 500, 3).unwrap();
        let e2 = rademacher_set_mc(&a, 500, 3).unwrap();
        assert_eq!(e1.value.to_bits(), e2.value.to_bits());
        assert!(rademacher_set_mc(&a, 99, 3).is_err());
    }

    #[test]
    fn mc_ci_shrinks_with_draws() {
        let a = vecs(&[&[1.0, 0.0, 0.4, -0.2], &[0.2, -0.8, 0.1, 0.9]]);
        let mut narrow = 0.0;
        let mut wide = 0.0;
        for seed in 0..20 {
            wide += rademacher_set_mc(&a, 400, seed).unwrap().ci95_halfwidth.unwrap();
            narrow += rademacher_set_mc(&a, 800, seed).unwrap().ci95_halfwidth.unwrap();
        }
        let ratio = narrow / wide;
        let expected = 1.0 / 2.0f64.sqrt();
        assert!(
            (ratio - expected).abs() < 0.2 * expected,
            "ratio {ratio} vs {expected}"
        );
    }

    #[test]
    fn gaussian_singleton_pair_gives_half_normal_mean() {
        let a = vecs(&[&[1.0], &[-1.0]]);
        let est = gaussian_set_mc(&a, 40_000, 5).unwrap();
        let target = (2.0 / std::f64::consts::PI).sqrt();
        assert!(
            (est.value - target).abs() <= 3.0 * est.ci95_halfwidth.unwrap(),
            "got {} want {}",
            est.value,
            target
        );
    }

    #[test]
    fn gaussian_scaling_within_ci() {
        let a = vecs(&[&[1.0, 0.3], &[-0.2, 0.8]]);
        let scaled: Vec<Vec<f64>> =
            a.iter().map(|v| v.iter().map(|x| 3.0 * x).collect()).collect();
        let e1 = gaussian_set_mc(&a, 30_000, 9).unwrap();
        let e2 = gaussian_set_mc(&scaled, 30_000, 10).unwrap();
        let tol = 3.0 * (3.0 * e1.ci95_halfwidth.unwrap() + e2.ci95_halfwidth.unwrap());
        assert!((e2.value - 3.0 * e1.value).abs() <= tol);
    }

    #[test]
    fn dedupe_vectors_merges_and_keeps_order() {
        let a = vecs(&[
            &[1.0, 0.0],
            &[0.0, 1.0],
            &[1.0 + 1e-14, 0.0],
            &[1.0, 0.0],
        ]);
        let kept = dedupe_vectors(&a, 1e-12);
        assert_eq!(kept.len(), 2);
        assert_eq!(kept[0], vec![1.0, 0.0]);
        assert_eq!(kept[1], vec![0.0, 1.0]);
    }

    #[test]
    fn empirical_complexity_identity_hadamard_example() {
        // Two channels whose function vectors on S = ((0,0), (1,1)) are
        // (1, 1) and (1/2, 1/2); the exact signed value is 1/8.
        let class = crate::classes::CircuitClass::new(
            1,
            "pair",
            VECTOR_DEDUP_TOL,
            vec![
                crate::gates::identity_channel(1),
                parse_gate_word(1, "H0").unwrap(),
            ],
        );
        let s = SampleSet::from_indices(1, &[(0, 0), (1, 1)]).unwrap();
        let est = empirical_complexity(
            &class,
            &s,
            ComplexityVariant::RADEMACHER_SIGNED,
            EstimatorMethod::Exact,
        )
        .unwrap();
        assert!((est.value - 0.125).abs() < 1e-15);
        assert_eq!(est.method, Method::Exact);
        assert!(est.ci95_halfwidth.is_none());
    }

    #[test]
    fn empirical_complexity_monotone_under_class_union() {
        let small = class_from_spec("stab:1").unwrap();
        let big = class_from_spec("stab+T:1:2").unwrap();
        let s = SampleSet::from_indices(1, &[(0, 0), (0, 1), (1, 0)]).unwrap();
        let a = empirical_complexity(
            &small,
            &s,
            ComplexityVariant::RADEMACHER_SIGNED,
            EstimatorMethod::Exact,
        )
        .unwrap();
        let b = empirical_complexity(
            &big,
            &s,
            ComplexityVariant::RADEMACHER_SIGNED,
            EstimatorMethod::Exact,
        )
        .unwrap();
        assert!(b.value >= a.value - 1e-15);
    }

    #[test]
    fn empirical_gaussian_exact_rejected() {
        let class = class_from_spec("stab:1").unwrap();
        let s = SampleSet::from_indices(1, &[(0, 0)]).unwrap();
        assert!(empirical_complexity(
            &class,
            &s,
            ComplexityVariant::GAUSSIAN_SIGNED,
            EstimatorMethod::Exact,
        )
        .is_err());
    }

    #[test]
    fn expected_complexity_reproducible_and_guarded() {
        let class = class_from_spec("stab:1").unwrap();
        let d = SampleDistribution::uniform(1);
        let e1 = expected_complexity(&class, &d, 2, 40, 7).unwrap();
        let e2 = expected_complexity(&class, &d, 2, 40, 7).unwrap();
        assert_eq!(e1.value.to_bits(), e2.value.to_bits());
        assert!(expected_complexity(&class, &d, 2, 9, 7).is_err());
    }

    #[test]
    fn gamma_star_examples() {
        let g = gamma_star(std::f64::consts::SQRT_2 / 2.0, None, 1).unwrap();
        assert!((g - 2.414213562373095).abs() < 1e-15);
        assert_eq!(gamma_star(0.5, None, 0).unwrap(), 1.0);
        let capped = gamma_star(1.0, Some(0.2), 5).unwrap();
        assert!((capped - 1.4).abs() < 1e-15);
        assert!(gamma_star(-0.1, None, 1).is_err());
    }

    #[test]
    fn sandwich_trivial_when_resource_is_free() {
        let o = clifford_class(1).unwrap();
        let psi = parse_gate_word(1, "S0.H0").unwrap();
        let s = SampleSet::from_indices(1, &[(0, 0), (0, 1), (1, 1)]).unwrap();
        let rep = check_theorem1(&o, &psi, &s, 0.7).unwrap();
        assert!(rep.ok);
        assert!((rep.mid - rep.lhs).abs() < 1e-15, "same class, same value");
    }

    #[test]
    fn sandwich_on_resource_channel() {
        let o = clifford_class(1).unwrap();
        let t = parse_gate_word(1, "T0").unwrap();
        for s in crate::sample::all_sample_sets(1, 2).unwrap() {
            let rep = check_theorem1(&o, &t, &s, std::f64::consts::SQRT_2 / 2.0).unwrap();
            assert!(rep.ok, "failed on {:?}", s);
        }
    }

    #[test]
    fn sandwich_upper_fails_without_valid_robustness() {
        // A single-channel free class cannot affinely represent a Hadamard;
        // no finite robustness exists and the upper bound genuinely breaks:
        // the free complexity is 0 while the augmented one is positive.
        let o = crate::classes::CircuitClass::new(
            1,
            "identity-only",
            VECTOR_DEDUP_TOL,
            vec![crate::gates::identity_channel(1)],
        );
        let h = parse_gate_word(1, "H0").unwrap();
        let s = SampleSet::from_indices(1, &[(0, 0)]).unwrap();
        let rep = check_theorem1(&o, &h, &s, 1000.0).unwrap();
        assert!(rep.lhs.abs() < 1e-12);
        assert!(rep.mid > 0.2);
        assert!(!rep.ok);
    }

    #[test]
    fn amplification_k0_is_equality_for_closed_class() {
        let o = clifford_class(1).unwrap();
        let t = parse_gate_word(1, "T0").unwrap();
        let s = SampleSet::from_indices(1, &[(0, 0), (1, 0)]).unwrap();
        let rep = check_theorem2(&o, &t, 0, 3, &s, std::f64::consts::SQRT_2 / 2.0, None).unwrap();
        assert!(rep.ok);
        assert_eq!(rep.values.len(), 1);
        assert!((rep.bound_rhs - rep.values[0]).abs() < 1e-12);
    }

    #[test]
    fn amplification_bound_holds_on_seeded_draws() {
        let o = clifford_class(1).unwrap();
        let t = parse_gate_word(1, "T0").unwrap();
        let d = SampleDistribution::uniform(1);
        for i in 0..5u64 {
            let mut rng = stream_rng(99, 0, i);
            let s = d.draw(4, &mut rng).unwrap();
            let rep =
                check_theorem2(&o, &t, 2, 3, &s, std::f64::consts::SQRT_2 / 2.0, None).unwrap();
            assert!(rep.ok, "draw {i}: {rep:?}");
            assert_eq!(rep.class_sizes[0], 24);
        }
    }

    #[test]
    fn concentration_small_instance() {
        let class = crate::classes::CircuitClass::new(
            1,
            "pair",
            VECTOR_DEDUP_TOL,
            vec![
                crate::gates::identity_channel(1),
                parse_gate_word(1, "H0").unwrap(),
            ],
        );
        let d = SampleDistribution::uniform(1);
        let rep = check_concentration(&class, &d, 8, 0.3, 1000, 17).unwrap();
        assert!(rep.ok, "{rep:?}");
        assert!((rep.bound - 0.47385551736424353).abs() < 1e-15);
        assert!(check_concentration(&class, &d, 8, 0.3, 999, 17).is_err());
        assert!(check_concentration(&class, &d, 8, 0.0, 1000, 17).is_err());
    }

    #[test]
    fn concentration_tail_nonincreasing_in_t() {
        let class = class_from_spec("stab:1").unwrap();
        let d = SampleDistribution::uniform(1);
        let r1 = check_concentration(&class, &d, 8, 0.1, 1000, 4).unwrap();
        let r2 = check_concentration(&class, &d, 8, 0.2, 1000, 4).unwrap();
        assert!(r2.tail_frequency <= r1.tail_frequency + 1e-12);
    }
}
