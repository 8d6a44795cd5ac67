//! Sample sets over bit-string pairs, explicit distributions on them, and
//! the per-channel function vectors used by the complexity estimators.

use rand::Rng;

use crate::channel::{eval_f, BitString, QuantumChannel};
use crate::error::{Error, Result};

/// Tolerance for probability-table normalization.
pub const PROB_SUM_TOL: f64 = 1e-12;

/// An ordered list of `m >= 1` input/output bit-string pairs, all on the
/// same number of bits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleSet {
    n: usize,
    pairs: Vec<(BitString, BitString)>,
}

impl SampleSet {
    pub fn new(pairs: Vec<(BitString, BitString)>) -> Result<Self> {
        let Some((x0, _)) = pairs.first() else {
            return Err(Error::InvalidParameter("sample set needs m >= 1".into()));
        };
        let n = x0.n();
        for (x, y) in &pairs {
            if x.n() != n || y.n() != n {
                return Err(Error::DimensionMismatch {
                    context: "sample set pair width",
                    expected: n,
                    got: if x.n() != n { x.n() } else { y.n() },
                });
            }
        }
        Ok(Self { n, pairs })
    }

    /// Builds a sample set from `(x_index, y_index)` pairs on `n` bits.
    pub fn from_indices(n: usize, indices: &[(usize, usize)]) -> Result<Self> {
        let pairs = indices
            .iter()
            .map(|&(x, y)| Ok((BitString::from_index(n, x)?, BitString::from_index(n, y)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(pairs)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of samples.
    pub fn m(&self) -> usize {
        self.pairs.len()
    }

    pub fn pairs(&self) -> &[(BitString, BitString)] {
        &self.pairs
    }
}

/// Enumerates all `(4^n)^m` sample sets of size `m` on `n` bits, in
/// lexicographic order of the flattened pair indices. Guarded so the result
/// stays comfortably enumerable.
pub fn all_sample_sets(n: usize, m: usize) -> Result<Vec<SampleSet>> {
    const MAX_SETS: usize = 1 << 20;
    let pair_count = 1usize << (2 * n);
    let total = pair_count.checked_pow(m as u32).filter(|&t| t <= MAX_SETS);
    let Some(total) = total else {
        return Err(Error::GuardExceeded {
            what: "exhaustive sample-set enumeration",
            limit: MAX_SETS,
            requested: usize::MAX,
        });
    };
    if m == 0 {
        return Err(Error::InvalidParameter("sample set needs m >= 1".into()));
    }
    let d = 1usize << n;
    let mut out = Vec::with_capacity(total);
    for code in 0..total {
        let mut c = code;
        let mut indices = vec![(0usize, 0usize); m];
        // Least-significant digit = last sample, so increasing `code` scans
        // the final pair fastest.
        for slot in (0..m).rev() {
            let pair = c % pair_count;
            c /= pair_count;
            indices[slot] = (pair / d, pair % d);
        }
        out.push(SampleSet::from_indices(n, &indices)?);
    }
    Ok(out)
}

/// An explicit probability table over pairs `(x, y)` of `n`-bit strings.
/// Entry order: `x * 2^n + y`.
#[derive(Clone, Debug)]
pub struct SampleDistribution {
    n: usize,
    probs: Vec<f64>,
    cumulative: Vec<f64>,
}

impl SampleDistribution {
    pub fn new(n: usize, probs: Vec<f64>) -> Result<Self> {
        let expect = 1usize << (2 * n);
        if probs.len() != expect {
            return Err(Error::DimensionMismatch {
                context: "distribution table length",
                expected: expect,
                got: probs.len(),
            });
        }
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::InvalidParameter(
                "distribution entries must be finite and nonnegative".into(),
            ));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > PROB_SUM_TOL {
            return Err(Error::InvalidParameter(format!(
                "distribution sums to {sum}, expected 1 within {PROB_SUM_TOL:e}"
            )));
        }
        let mut cumulative = Vec::with_capacity(probs.len());
        let mut acc = 0.0;
        for p in &probs {
            acc += p;
            cumulative.push(acc);
        }
        // Make the inverse-CDF search immune to rounding at the top end.
        if let Some(last) = cumulative.last_mut() {
            *last = 1.0;
        }
        Ok(Self {
            n,
            probs,
            cumulative,
        })
    }

    /// Uniform over all `4^n` pairs.
    pub fn uniform(n: usize) -> Self {
        let len = 1usize << (2 * n);
        Self::new(n, vec![1.0 / len as f64; len]).expect("uniform table is valid")
    }

    /// Distribution generated by a channel: the marginal `mu` on inputs
    /// times the channel's conditional output distribution,
    /// `D(x, y) = mu(x) * f(x, y)`. Rows sum to `mu(x)` because the channel
    /// preserves trace, so the table is automatically normalized.
    pub fn from_channel(marginal_x: &[f64], target: &QuantumChannel) -> Result<Self> {
        let n = target.n();
        let d = 1usize << n;
        if marginal_x.len() != d {
            return Err(Error::DimensionMismatch {
                context: "input marginal length",
                expected: d,
                got: marginal_x.len(),
            });
        }
        if marginal_x.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::InvalidParameter(
                "input marginal entries must be finite and nonnegative".into(),
            ));
        }
        let sum: f64 = marginal_x.iter().sum();
        if (sum - 1.0).abs() > PROB_SUM_TOL {
            return Err(Error::InvalidParameter(format!(
                "input marginal sums to {sum}, expected 1 within {PROB_SUM_TOL:e}"
            )));
        }
        let mut probs = vec![0.0; d * d];
        for x in 0..d {
            let bx = BitString::from_index(n, x)?;
            for y in 0..d {
                let by = BitString::from_index(n, y)?;
                probs[x * d + y] = (marginal_x[x] * eval_f(target, &bx, &by)?).max(0.0);
            }
        }
        // Renormalize away float dust so `new` accepts the table.
        let total: f64 = probs.iter().sum();
        for p in &mut probs {
            *p /= total;
        }
        Self::new(n, probs)
    }

    /// [`Self::from_channel`] with the uniform input marginal.
    pub fn uniform_consistent(target: &QuantumChannel) -> Result<Self> {
        let d = 1usize << target.n();
        Self::from_channel(&vec![1.0 / d as f64; d], target)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, x: &BitString, y: &BitString) -> f64 {
        let d = 1usize << self.n;
        self.probs[x.index() * d + y.index()]
    }

    /// Draws an i.i.d. sample set of size `m` by inverse-CDF lookup.
    pub fn draw<R: Rng + ?Sized>(&self, m: usize, rng: &mut R) -> Result<SampleSet> {
        if m == 0 {
            return Err(Error::InvalidParameter("sample set needs m >= 1".into()));
        }
        let d = 1usize << self.n;
        let mut indices = Vec::with_capacity(m);
        for _ in 0..m {
            let u: f64 = rng.gen();
            let pos = self
                .cumulative
                .partition_point(|&c| c <= u)
                .min(self.cumulative.len() - 1);
            indices.push((pos / d, pos % d));
        }
        SampleSet::from_indices(self.n, &indices)
    }

    /// Exact expectation of `h(x, y)` under the table.
    pub fn expectation<F: FnMut(&BitString, &BitString) -> Result<f64>>(
        &self,
        mut h: F,
    ) -> Result<f64> {
        let d = 1usize << self.n;
        let mut acc = 0.0;
        for x in 0..d {
            let bx = BitString::from_index(self.n, x)?;
            for y in 0..d {
                let p = self.probs[x * d + y];
                if p == 0.0 {
                    continue;
                }
                let by = BitString::from_index(self.n, y)?;
                acc += p * h(&bx, &by)?;
            }
        }
        Ok(acc)
    }
}

/// The function vector `(f(z_1), ..., f(z_m))` of a channel on a sample set,
/// read directly off superoperator entries: with column-stacking,
/// `f(x, y) = Re S[y d + y, x d + x]`. Cross-checked against [`eval_f`] in
/// tests; this entry read is the hot path of the exhaustive theorem checks.
pub fn function_vector(phi: &QuantumChannel, s: &SampleSet) -> Result<Vec<f64>> {
    if phi.n() != s.n() {
        return Err(Error::DimensionMismatch {
            context: "function_vector qubit count",
            expected: phi.n(),
            got: s.n(),
        });
    }
    let d = phi.dim();
    let sop = phi.superop();
    Ok(s.pairs()
        .iter()
        .map(|(x, y)| sop[(y.index() * d + y.index(), x.index() * d + x.index())].re)
        .collect())
}
