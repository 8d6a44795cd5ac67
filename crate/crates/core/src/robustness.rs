//! Free robustness of a channel with respect to a finite free class: the
//! least total negative mass needed to write the channel as an affine
//! combination of free channels, computed by linear programming over the
//! Pauli-transfer representation (real-valued for Hermiticity-preserving
//! maps, which halves the constraint count versus split real/imaginary
//! superoperator parts).

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::channel::{
    cptp_report, kraus_channel, unitary_channel, QuantumChannel, CHANNEL_EQ_TOL,
};
use crate::classes::CircuitClass;
use crate::error::{Error, Result};
use crate::gates::parse_gate_word;
use crate::mat::{hermitian_inv_sqrt, max_abs, CMat};
use crate::rng::stream_rng;
use crate::simplex::{lp_solve, LinearProgram, LpStatus};

/// Work-phase tags for probe RNG derivation.
const PHASE_PROBE_UNITARY: u64 = 10;
const PHASE_PROBE_KRAUS: u64 = 11;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RobustnessStatus {
    Optimal,
    /// The target lies outside the affine span of the free class.
    Infeasible,
}

/// Outcome of a free-robustness computation. When optimal, the target
/// decomposes as `sum_i p_i F_i - sum_i q_i F_i` over the free channels
/// `F_i`, with `sum p = 1 + lambda_star` and `sum q = lambda_star`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RobustnessResult {
    pub status: RobustnessStatus,
    pub lambda_star: f64,
    /// Positive-part weights, one per free channel (class order).
    pub p: Vec<f64>,
    /// Negative-part weights, one per free channel (class order).
    pub q: Vec<f64>,
    /// Max-entry superoperator error of the reconstruction.
    pub residual: f64,
    /// Spec string of the free class the optimum is relative to.
    pub free_spec: String,
}

/// Computes the free robustness of `psi` with respect to the convex hull of
/// the finite class `free`: the LP `min sum q` subject to
/// `sum_i (p_i - q_i) PTM(F_i) = PTM(psi)` entrywise with `p, q >= 0`.
/// The `(0,0)` transfer entry of every trace-preserving channel is 1, so the
/// affine normalization `sum p - sum q = 1` is one of the equality rows.
/// A target already inside the class (within `tol`) short-circuits to 0.
pub fn free_robustness(
    psi: &QuantumChannel,
    free: &CircuitClass,
    tol: f64,
) -> Result<RobustnessResult> {
    if free.is_empty() {
        return Err(Error::InvalidParameter(
            "free robustness needs a nonempty free class".into(),
        ));
    }
    if psi.n() != free.n() {
        return Err(Error::DimensionMismatch {
            context: "free robustness target",
            expected: free.n(),
            got: psi.n(),
        });
    }
    let count = free.len();
    if let Some(hit) = free.channels().iter().position(|c| c.is_close(psi, tol)) {
        let mut p = vec![0.0; count];
        p[hit] = 1.0;
        let residual = free.channels()[hit].distance(psi);
        return Ok(RobustnessResult {
            status: RobustnessStatus::Optimal,
            lambda_star: 0.0,
            p,
            q: vec![0.0; count],
            residual,
            free_spec: free.spec().to_string(),
        });
    }

    let target = psi.ptm()?;
    let transfers: Vec<nalgebra::DMatrix<f64>> = free
        .channels()
        .iter()
        .map(|c| c.ptm())
        .collect::<Result<_>>()?;
    let rows = target.len();
    let mut constraints = Vec::with_capacity(rows);
    let mut rhs = Vec::with_capacity(rows);
    for idx in 0..rows {
        let mut row = Vec::with_capacity(2 * count);
        for t in &transfers {
            row.push(t[idx]);
        }
        for t in &transfers {
            row.push(-t[idx]);
        }
        constraints.push(row);
        rhs.push(target[idx]);
    }
    let mut objective = vec![0.0; 2 * count];
    objective[count..].fill(1.0);
    let lp = LinearProgram::new(objective, constraints, rhs)?;
    let sol = lp_solve(&lp)?;
    match sol.status {
        LpStatus::Infeasible => Ok(RobustnessResult {
            status: RobustnessStatus::Infeasible,
            lambda_star: f64::NAN,
            p: vec![0.0; count],
            q: vec![0.0; count],
            residual: f64::NAN,
            free_spec: free.spec().to_string(),
        }),
        LpStatus::Unbounded => Err(Error::Numerical(
            "free-robustness LP reported unbounded, which a nonnegative objective forbids".into(),
        )),
        LpStatus::Optimal => {
            let p = sol.x[..count].to_vec();
            let q = sol.x[count..].to_vec();
            let lambda_star = sol.objective_value;
            let mass: f64 =
                p.iter().sum::<f64>() - q.iter().sum::<f64>();
            if (mass - 1.0).abs() > 1e-9 {
                return Err(Error::Numerical(format!(
                    "decomposition mass {mass} deviates from 1"
                )));
            }
            let coeffs: Vec<f64> = p.iter().zip(q.iter()).map(|(a, b)| a - b).collect();
            let residual = decomposition_residual(psi, &coeffs, free.channels())?;
            Ok(RobustnessResult {
                status: RobustnessStatus::Optimal,
                lambda_star,
                p,
                q,
                residual,
                free_spec: free.spec().to_string(),
            })
        }
    }
}

fn decomposition_residual(
    psi: &QuantumChannel,
    coeffs: &[f64],
    channels: &[QuantumChannel],
) -> Result<f64> {
    let d2 = psi.superop().nrows();
    let mut acc = CMat::zeros(d2, d2);
    for (c, chan) in coeffs.iter().zip(channels.iter()) {
        if chan.n() != psi.n() {
            return Err(Error::DimensionMismatch {
                context: "decomposition channel",
                expected: psi.n(),
                got: chan.n(),
            });
        }
        if *c != 0.0 {
            acc += chan.superop().map(|z| z * Complex64::new(*c, 0.0));
        }
    }
    Ok(max_abs(&(acc - psi.superop())))
}

/// Max-entry superoperator residual of `sum_i coeffs_i channels_i - psi`.
pub fn verify_decomposition(
    psi: &QuantumChannel,
    coeffs: &[f64],
    channels: &[QuantumChannel],
) -> Result<f64> {
    if coeffs.len() != channels.len() {
        return Err(Error::DimensionMismatch {
            context: "decomposition coefficient count",
            expected: channels.len(),
            got: coeffs.len(),
        });
    }
    decomposition_residual(psi, coeffs, channels)
}

/// Reference certificate for the T-gate channel over the three phase
/// channels `S`, `SZ` and `Z`:
/// `T = (1/2 + sqrt2/2) S + (1/2) SZ - (sqrt2/2) Z`,
/// so a negative mass of `sqrt2/2` suffices. Returns
/// `(coefficients, channels, negative_mass)`. On the off-diagonal density
/// entry the four diagonal unitaries act by the multipliers
/// `exp(-i pi/4), -i, +i, -1` respectively, which makes this the unique
/// affine combination of the three phase channels reaching the T channel.
pub fn t_gate_certificate() -> Result<(Vec<f64>, Vec<QuantumChannel>, f64)> {
    let half_sqrt2 = std::f64::consts::SQRT_2 / 2.0;
    let coeffs = vec![0.5 + half_sqrt2, 0.5, -half_sqrt2];
    let channels = vec![
        parse_gate_word(1, "S0")?,
        parse_gate_word(1, "Z0.S0")?, // the S*Z product gate diag(1, -i)
        parse_gate_word(1, "Z0")?,
    ];
    Ok((coeffs, channels, half_sqrt2))
}

/// Outcome of probing for large free robustness.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GammaMaxBound {
    /// Largest robustness seen over the probes: a certified lower bound on
    /// the maximal free robustness over channels, never an upper bound.
    pub value: f64,
    pub probes_run: usize,
    pub probes_infeasible: usize,
    pub seed: u64,
}

fn random_complex_matrix<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMat {
    CMat::from_fn(d, d, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// A Haar-distributed unitary via QR of a complex Gaussian matrix, with the
/// standard phase correction from the triangular factor's diagonal.
fn random_unitary_matrix<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMat {
    let g = random_complex_matrix(d, rng);
    let qr = g.qr();
    let r = qr.r();
    let mut u = qr.q();
    for j in 0..d {
        let rj = r[(j, j)];
        let phase = if rj.norm() > 1e-12 {
            rj / rj.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..d {
            u[(i, j)] *= phase;
        }
    }
    u
}

/// A random channel with two Kraus operators: two complex Gaussian matrices
/// normalized jointly so the completeness sum is the identity.
fn random_rank2_channel<R: Rng + ?Sized>(n: usize, rng: &mut R, label: String) -> Result<QuantumChannel> {
    let d = 1usize << n;
    let g1 = random_complex_matrix(d, rng);
    let g2 = random_complex_matrix(d, rng);
    let gram = crate::mat::dagger(&g1) * &g1 + crate::mat::dagger(&g2) * &g2;
    let s = hermitian_inv_sqrt(&gram);
    kraus_channel(n, label, &[&g1 * &s, &g2 * &s])
}

/// Probes the maximal free robustness from below: runs [`free_robustness`]
/// on `n_probes` seeded random channels (alternating Haar unitary
/// conjugations and rank-2 Kraus channels) plus any caller-supplied probe
/// channels, and returns the largest optimal value. Probes outside the free
/// class's affine span are counted as infeasible and skipped.
pub fn gamma_max_lower_bound(
    free: &CircuitClass,
    n: usize,
    n_probes: usize,
    seed: u64,
    extra_probes: &[QuantumChannel],
) -> Result<GammaMaxBound> {
    if n != free.n() {
        return Err(Error::DimensionMismatch {
            context: "gamma_max probe qubit count",
            expected: free.n(),
            got: n,
        });
    }
    let mut value = 0.0f64;
    let mut probes_run = 0usize;
    let mut probes_infeasible = 0usize;
    let mut consider = |res: RobustnessResult| {
        probes_run += 1;
        match res.status {
            RobustnessStatus::Optimal => {
                if res.lambda_star > value {
                    value = res.lambda_star;
                }
            }
            RobustnessStatus::Infeasible => probes_infeasible += 1,
        }
    };
    for probe in extra_probes {
        consider(free_robustness(probe, free, CHANNEL_EQ_TOL)?);
    }
    for i in 0..n_probes {
        let probe = if i % 2 == 0 {
            let mut rng = stream_rng(seed, PHASE_PROBE_UNITARY, i as u64);
            let u = random_unitary_matrix(1 << n, &mut rng);
            unitary_channel(n, format!("probe-unitary-{i}"), &u)?
        } else {
            let mut rng = stream_rng(seed, PHASE_PROBE_KRAUS, i as u64);
            random_rank2_channel(n, &mut rng, format!("probe-kraus-{i}"))?
        };
        consider(free_robustness(&probe, free, CHANNEL_EQ_TOL)?);
    }
    Ok(GammaMaxBound {
        value,
        probes_run,
        probes_infeasible,
        seed,
    })
}

/// Checks that the mixture `(psi + sum_i q_i F_i) / (1 + lambda)` implied by
/// an optimal decomposition is itself a valid channel, which certifies the
/// decomposition geometrically.
pub fn mixture_is_cptp(
    psi: &QuantumChannel,
    result: &RobustnessResult,
    free: &CircuitClass,
) -> Result<bool> {
    if result.status != RobustnessStatus::Optimal {
        return Err(Error::InvalidParameter(
            "mixture check needs an optimal decomposition".into(),
        ));
    }
    let d2 = psi.superop().nrows();
    let mut acc = psi.superop().clone();
    for (qi, chan) in result.q.iter().zip(free.channels().iter()) {
        if *qi != 0.0 {
            acc += chan.superop().map(|z| z * Complex64::new(*qi, 0.0));
        }
    }
    let scale = Complex64::new(1.0 / (1.0 + result.lambda_star), 0.0);
    let mix = acc.map(|z| z * scale);
    debug_assert_eq!(mix.nrows(), d2);
    Ok(cptp_report(psi.n(), &mix).is_cptp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::DensityMatrix;
    use crate::classes::{clifford_class, CircuitClass, DEFAULT_DEDUP_TOL};
    use crate::mat::dagger;

    fn t_channel() -> QuantumChannel {
        parse_gate_word(1, "T0").unwrap()
    }

    fn phase_class() -> CircuitClass {
        let (_, channels, _) = t_gate_certificate().unwrap();
        CircuitClass::new(1, "phase-triple", DEFAULT_DEDUP_TOL, channels)
    }

    #[test]
    fn certificate_reconstructs_t_channel() {
        let (coeffs, channels, mass) = t_gate_certificate().unwrap();
        let residual = verify_decomposition(&t_channel(), &coeffs, &channels).unwrap();
        assert!(residual < 1e-12, "residual {residual}");
        assert!((mass - std::f64::consts::SQRT_2 / 2.0).abs() < 1e-15);
        let neg: f64 = coeffs.iter().filter(|c| **c < 0.0).map(|c| -c).sum();
        assert!((neg - mass).abs() < 1e-15);
    }

    #[test]
    fn transposing_the_last_two_certificate_channels_breaks_it() {
        // The same coefficients paired with (S, Z, SZ) instead of
        // (S, SZ, Z) miss the target badly; the valid pairing is unique.
        let (coeffs, channels, _) = t_gate_certificate().unwrap();
        let swapped = vec![channels[0].clone(), channels[2].clone(), channels[1].clone()];
        let residual = verify_decomposition(&t_channel(), &coeffs, &swapped).unwrap();
        assert!(residual > 1.0, "residual {residual}");
    }

    #[test]
    fn verify_decomposition_identity_and_perturbation() {
        let t = t_channel();
        let self_res = verify_decomposition(&t, &[1.0], &[t.clone()]).unwrap();
        assert_eq!(self_res, 0.0);
        let (mut coeffs, channels, _) = t_gate_certificate().unwrap();
        coeffs[1] += 0.01;
        let residual = verify_decomposition(&t, &coeffs, &channels).unwrap();
        assert!(residual >= 0.001, "residual {residual}");
        assert!(verify_decomposition(&t, &[1.0, 2.0], &[t.clone()]).is_err());
    }

    #[test]
    fn robustness_of_free_member_is_zero() {
        let free = clifford_class(1).unwrap();
        let member = parse_gate_word(1, "S0.H0").unwrap();
        let res = free_robustness(&member, &free, CHANNEL_EQ_TOL).unwrap();
        assert_eq!(res.status, RobustnessStatus::Optimal);
        assert_eq!(res.lambda_star, 0.0);
        assert!(res.residual < 1e-9);
        assert_eq!(res.p.iter().sum::<f64>(), 1.0);
        assert_eq!(res.q.iter().sum::<f64>(), 0.0);
    }

    #[test]
    fn t_robustness_over_phase_triple_is_half_sqrt2() {
        let res = free_robustness(&t_channel(), &phase_class(), CHANNEL_EQ_TOL).unwrap();
        assert_eq!(res.status, RobustnessStatus::Optimal);
        assert!(
            (res.lambda_star - std::f64::consts::SQRT_2 / 2.0).abs() < 1e-9,
            "lambda {}",
            res.lambda_star
        );
        assert!(res.residual < 1e-8);
    }

    #[test]
    fn t_robustness_over_full_class_matches_predicted_optimum() {
        // Over the whole 24-element group hull the optimum drops to
        // (sqrt2 - 1)/2: the decomposition
        // T = (sqrt2/2) I + (1/2) S - ((sqrt2 - 1)/2) SZ is feasible, and
        // no smaller negative mass exists even over all
        // stabilizer-preserving channels.
        let free = clifford_class(1).unwrap();
        let res = free_robustness(&t_channel(), &free, CHANNEL_EQ_TOL).unwrap();
        assert_eq!(res.status, RobustnessStatus::Optimal);
        let predicted = (std::f64::consts::SQRT_2 - 1.0) / 2.0;
        assert!(
            (res.lambda_star - predicted).abs() < 1e-9,
            "lambda {} vs predicted {predicted}",
            res.lambda_star
        );
        assert!(res.residual < 1e-8);
        // Monotone versus the restricted class, and below the certificate.
        assert!(res.lambda_star <= std::f64::consts::SQRT_2 / 2.0 + 1e-9);
    }

    #[test]
    fn infeasible_outside_affine_span() {
        let only_identity = CircuitClass::new(
            1,
            "identity-only",
            DEFAULT_DEDUP_TOL,
            vec![crate::gates::identity_channel(1)],
        );
        let h = parse_gate_word(1, "H0").unwrap();
        let res = free_robustness(&h, &only_identity, CHANNEL_EQ_TOL).unwrap();
        assert_eq!(res.status, RobustnessStatus::Infeasible);
    }

    #[test]
    fn decomposition_action_matches_target_on_random_states() {
        let free = clifford_class(1).unwrap();
        let t = t_channel();
        let res = free_robustness(&t, &free, CHANNEL_EQ_TOL).unwrap();
        let mut rng = stream_rng(5, 0, 0);
        for _ in 0..100 {
            let g = super::random_complex_matrix(2, &mut rng);
            let gram = &g * dagger(&g);
            let tr = gram.trace();
            let rho = DensityMatrix::new(1, gram.map(|z| z / tr)).unwrap();
            let direct = t.apply(&rho).unwrap();
            let mut acc = CMat::zeros(2, 2);
            for ((pi, qi), chan) in res.p.iter().zip(res.q.iter()).zip(free.channels()) {
                let w = pi - qi;
                if w != 0.0 {
                    acc += chan.apply(&rho).unwrap().matrix().map(|z| z * Complex64::new(w, 0.0));
                }
            }
            assert!(max_abs(&(acc - direct.matrix())) < 1e-8);
        }
    }

    #[test]
    fn optimal_mixture_is_cptp() {
        let free = clifford_class(1).unwrap();
        let t = t_channel();
        let res = free_robustness(&t, &free, CHANNEL_EQ_TOL).unwrap();
        assert!(res.lambda_star > 0.0);
        assert!(mixture_is_cptp(&t, &res, &free).unwrap());
    }

    #[test]
    fn gamma_max_probing_reaches_t_robustness() {
        let free = clifford_class(1).unwrap();
        let t = t_channel();
        let bound = gamma_max_lower_bound(&free, 1, 6, 3, &[t.clone()]).unwrap();
        let t_value = free_robustness(&t, &free, CHANNEL_EQ_TOL)
            .unwrap()
            .lambda_star;
        assert!(bound.value >= t_value - 1e-12);
        assert_eq!(bound.probes_run, 7);
        // Deterministic under the same seed.
        let again = gamma_max_lower_bound(&free, 1, 6, 3, &[t]).unwrap();
        assert_eq!(bound.value.to_bits(), again.value.to_bits());
        assert!(gamma_max_lower_bound(&free, 2, 1, 3, &[]).is_err());
    }

    #[test]
    fn random_probes_are_valid_channels() {
        let mut rng = stream_rng(1, 0, 0);
        let u = random_unitary_matrix(4, &mut rng);
        let chan = unitary_channel(2, "probe", &u).unwrap();
        assert!(crate::channel::is_cptp(&chan));
        let k = random_rank2_channel(1, &mut rng, "probe2".into()).unwrap();
        assert!(crate::channel::is_cptp(&k));
    }
}
