//! Finite circuit classes: the stabilizer-preserving unitary-channel group,
//! commuting-layer (diagonal-conjugated) circuit families, and generic
//! resource-augmented word classes with a budget on resource uses and word
//! length.
//!
//! Classes are ordered, deduplicated channel lists. Deduplication inside the
//! breadth-first closures uses a quantised hash of the superoperator entries:
//! every channel generated here has entries of the form `2^{-m/2}` times an
//! 8th root of unity, a discrete value lattice with spacing far coarser than
//! both the rounding grid (1e-6) and the equality tolerance (1e-9), so grid
//! rounding partitions channels exactly. The public [`dedupe`] works on
//! arbitrary channels and therefore uses a plain first-representative scan.

use std::collections::HashMap;

use crate::channel::{compose, QuantumChannel, CHANNEL_EQ_TOL};
use crate::error::{Error, Result};
use crate::gates::{gate_channel, identity_channel, parse_gate_word, GateSet};
use crate::mat::CMat;

/// Default tolerance for channel deduplication (max-entry superop distance).
pub const DEFAULT_DEDUP_TOL: f64 = CHANNEL_EQ_TOL;
/// Group closures refuse to run above this qubit count.
pub const CLIFFORD_MAX_QUBITS: usize = 2;
/// Default cap on the number of candidate words examined by [`augment`].
pub const DEFAULT_WORD_BUDGET: usize = 1_000_000;
/// Rounding grid used by the quantised superoperator hash.
const HASH_GRID: f64 = 1e6;

/// An ordered, deduplicated set of channels with provenance.
#[derive(Clone, Debug)]
pub struct CircuitClass {
    n: usize,
    spec: String,
    dedup_tol: f64,
    channels: Vec<QuantumChannel>,
}

impl CircuitClass {
    pub fn new(
        n: usize,
        spec: impl Into<String>,
        dedup_tol: f64,
        channels: Vec<QuantumChannel>,
    ) -> Self {
        Self {
            n,
            spec: spec.into(),
            dedup_tol,
            channels,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Provenance string; for the canonical families it is a class spec that
    /// [`class_from_spec`] reconstructs deterministically.
    pub fn spec(&self) -> &str {
        &self.spec
    }

    pub fn dedup_tol(&self) -> f64 {
        self.dedup_tol
    }

    pub fn channels(&self) -> &[QuantumChannel] {
        &self.channels
    }

    pub fn len(&self) -> usize {
        self.channels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.channels.is_empty()
    }

    /// Whether some member is within `tol` of `chan`.
    pub fn contains(&self, chan: &QuantumChannel, tol: f64) -> bool {
        self.channels.iter().any(|c| c.is_close(chan, tol))
    }
}

/// Quantised superoperator key. Exact for channels whose entries live on a
/// discrete lattice with spacing well above `1/HASH_GRID` (see module docs).
fn superop_key(m: &CMat) -> Vec<(i64, i64)> {
    m.iter()
        .map(|z| {
            let re = (z.re * HASH_GRID).round();
            let im = (z.im * HASH_GRID).round();
            // Collapse -0.0 so it hashes like +0.0.
            (re as i64, im as i64)
        })
        .collect()
}

/// Insertion-ordered channel interner keyed by the quantised superoperator.
struct Interner {
    map: HashMap<Vec<(i64, i64)>, usize>,
    channels: Vec<QuantumChannel>,
}

impl Interner {
    fn new() -> Self {
        Self {
            map: HashMap::new(),
            channels: Vec::new(),
        }
    }

    /// Returns `(index, inserted)`.
    fn intern(&mut self, chan: QuantumChannel) -> (usize, bool) {
        let key = superop_key(chan.superop());
        match self.map.entry(key) {
            std::collections::hash_map::Entry::Occupied(e) => (*e.get(), false),
            std::collections::hash_map::Entry::Vacant(e) => {
                let idx = self.channels.len();
                e.insert(idx);
                self.channels.push(chan);
                (idx, true)
            }
        }
    }

    #[cfg(test)]
    fn contains(&self, chan: &QuantumChannel) -> bool {
        self.map.contains_key(&superop_key(chan.superop()))
    }
}

/// Number of distinct unitary-conjugation channels generated by the
/// stabilizer gate set on `n` qubits (global phases do not matter at the
/// channel level): `2^{n^2 + 2n} * prod_{j=1..n} (4^j - 1)`.
pub fn clifford_group_order(n: usize) -> u128 {
    let mut order = 1u128 << (n * n + 2 * n);
    for j in 1..=n {
        order *= (1u128 << (2 * j)) - 1;
    }
    order
}

/// Closed-form count of pure stabilizer states: `2^n * prod_{j=1..n} (2^j + 1)`.
pub fn stabilizer_state_count_formula(n: usize) -> u128 {
    let mut count = 1u128 << n;
    for j in 1..=n {
        count *= (1u128 << j) + 1;
    }
    count
}

/// Breadth-first closure of the stabilizer gate set `{H_i, S_i, CX_ij}` at
/// the channel level. Deterministic: fixed generator order, FIFO frontier,
/// class order = discovery order. Guarded to `n <= 2` (the n=2 closure has
/// 11520 channels; n=3 would have ~9.2e7).
pub fn clifford_class(n: usize) -> Result<CircuitClass> {
    if n == 0 {
        return Err(Error::InvalidParameter("clifford_class needs n >= 1".into()));
    }
    if n > CLIFFORD_MAX_QUBITS {
        return Err(Error::GuardExceeded {
            what: "clifford closure qubit count",
            limit: CLIFFORD_MAX_QUBITS,
            requested: n,
        });
    }
    let gens: Vec<QuantumChannel> = GateSet::clifford()
        .placements(n)
        .iter()
        .map(|op| gate_channel(n, op))
        .collect::<Result<_>>()?;
    let mut interner = Interner::new();
    interner.intern(identity_channel(n));
    let mut next = 0usize;
    while next < interner.channels.len() {
        let cur = interner.channels[next].clone();
        next += 1;
        for g in &gens {
            let cand = compose(g, &cur)?;
            interner.intern(cand);
        }
    }
    Ok(CircuitClass::new(
        n,
        format!("stab:{n}"),
        DEFAULT_DEDUP_TOL,
        interner.channels,
    ))
}

/// Counts distinct pure stabilizer states as the orbit of `|0...0>` under
/// [`clifford_class`]. Cross-checked against
/// [`stabilizer_state_count_formula`] in tests.
pub fn stabilizer_state_count(n: usize) -> Result<usize> {
    let class = clifford_class(n)?;
    let zero = crate::channel::basis_state(&crate::channel::BitString::from_index(n, 0)?);
    let mut seen: HashMap<Vec<(i64, i64)>, ()> = HashMap::new();
    for chan in class.channels() {
        let out = chan.apply(&zero)?;
        seen.entry(superop_key(out.matrix())).or_insert(());
    }
    Ok(seen.len())
}

fn h_layer(n: usize) -> Result<QuantumChannel> {
    let mut chan = identity_channel(n);
    for q in 0..n {
        let h = gate_channel(n, &crate::gates::GateOp::single(crate::gates::GateKind::H, q))?;
        chan = compose(&h, &chan)?;
    }
    Ok(chan)
}

/// Diagonal-layer description: which Z, CZ and CCZ placements are switched on.
#[derive(Clone, Debug, Default)]
struct DiagonalPattern {
    z: Vec<usize>,
    cz: Vec<(usize, usize)>,
    ccz: Vec<(usize, usize, usize)>,
}

impl DiagonalPattern {
    fn word(&self, n: usize) -> String {
        let mut parts: Vec<String> = Vec::new();
        for q in 0..n {
            parts.push(format!("H{q}"));
        }
        for &q in &self.z {
            parts.push(format!("Z{q}"));
        }
        for &(a, b) in &self.cz {
            parts.push(format!("CZ{a}{b}"));
        }
        for &(a, b, c) in &self.ccz {
            parts.push(format!("CCZ{a}{b}{c}"));
        }
        for q in 0..n {
            parts.push(format!("H{q}"));
        }
        parts.join(".")
    }
}

fn pairs(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for a in 0..n {
        for b in (a + 1)..n {
            out.push((a, b));
        }
    }
    out
}

fn triples(n: usize) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for a in 0..n {
        for b in (a + 1)..n {
            for c in (b + 1)..n {
                out.push((a, b, c));
            }
        }
    }
    out
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let mut acc = 1u128;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Builds the commuting-layer classes: channels `H^(x)n . D . H^(x)n` where
/// `D` ranges over products of a Z-placement subset, a *nonempty*
/// CZ-placement subset, and (for `ccz_budget > 0`) at most `ccz_budget` CCZ
/// placements. Distinct placement patterns give distinct channels, so the
/// class size equals [`class_size_bound_iqp`].
fn diagonal_conjugated_class(n: usize, ccz_budget: usize, spec: String) -> Result<CircuitClass> {
    let hs = h_layer(n)?;
    let zs: Vec<usize> = (0..n).collect();
    let czs = pairs(n);
    let cczs = triples(n);
    let mut channels = Vec::new();
    // Deterministic order: Z subsets outer (lexicographic by mask), then
    // nonempty CZ subsets, then CCZ subsets of size <= budget.
    for z_mask in 0..(1usize << zs.len()) {
        for cz_mask in 1..(1usize << czs.len()) {
            for ccz_mask in 0..(1usize << cczs.len()) {
                if (ccz_mask as u32).count_ones() as usize > ccz_budget {
                    continue;
                }
                let pattern = DiagonalPattern {
                    z: zs
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| z_mask >> i & 1 == 1)
                        .map(|(_, &q)| q)
                        .collect(),
                    cz: czs
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| cz_mask >> i & 1 == 1)
                        .map(|(_, &p)| p)
                        .collect(),
                    ccz: cczs
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| ccz_mask >> i & 1 == 1)
                        .map(|(_, &t)| t)
                        .collect(),
                };
                let mut diag = identity_channel(n);
                for &q in &pattern.z {
                    let g = gate_channel(
                        n,
                        &crate::gates::GateOp::single(crate::gates::GateKind::Z, q),
                    )?;
                    diag = compose(&g, &diag)?;
                }
                for &(a, b) in &pattern.cz {
                    let g =
                        gate_channel(n, &crate::gates::GateOp::two(crate::gates::GateKind::Cz, a, b))?;
                    diag = compose(&g, &diag)?;
                }
                for &(a, b, c) in &pattern.ccz {
                    let g = gate_channel(
                        n,
                        &crate::gates::GateOp::three(crate::gates::GateKind::Ccz, a, b, c),
                    )?;
                    diag = compose(&g, &diag)?;
                }
                let mut chan = compose(&diag, &hs)?;
                chan = compose(&hs, &chan)?;
                chan.set_label(pattern.word(n));
                channels.push(chan);
            }
        }
    }
    // Distinct patterns are distinct channels; run the interner anyway to
    // enforce the class invariant.
    let mut interner = Interner::new();
    for c in channels {
        interner.intern(c);
    }
    Ok(CircuitClass::new(
        n,
        spec,
        DEFAULT_DEDUP_TOL,
        interner.channels,
    ))
}

/// The base commuting-layer class on `n in {2, 3}` qubits (no CCZ):
/// `2^n * (2^{C(n,2)} - 1)` channels.
pub fn iqp_class(n: usize) -> Result<CircuitClass> {
    if !(2..=3).contains(&n) {
        return Err(Error::InvalidParameter(format!(
            "iqp_class requires n in {{2, 3}}, got {n}"
        )));
    }
    diagonal_conjugated_class(n, 0, format!("iqp:{n}"))
}

/// The CCZ-augmented commuting-layer class: diagonal layers may additionally
/// contain up to `k` CCZ placements. `depth` is recorded in the provenance
/// string only — diagonal layers commute and square to the identity, so
/// stacking layers never leaves the canonical enumeration.
pub fn iqp_ccz_class(n: usize, k: usize, depth: usize) -> Result<CircuitClass> {
    if n != 3 {
        return Err(Error::InvalidParameter(format!(
            "iqp_ccz_class requires n = 3 (CCZ needs three qubits), got {n}"
        )));
    }
    let k_eff = k.min(triples(n).len());
    diagonal_conjugated_class(n, k_eff, format!("iqp+CCZ:{k}:{depth}"))
}

/// Size of the CCZ-augmented commuting-layer class:
/// `2^n (2^{C(n,2)} - 1) * sum_{j<=k} C(C(n,3), j)`.
pub fn class_size_bound_iqp(n: usize, k: usize) -> Result<u128> {
    if !(2..=3).contains(&n) {
        return Err(Error::InvalidParameter(format!(
            "class_size_bound_iqp requires n in {{2, 3}}, got {n}"
        )));
    }
    let base = (1u128 << n) * ((1u128 << (n * (n - 1) / 2)) - 1);
    let t = triples(n).len() as u128;
    let placements: u128 = (0..=(k as u128).min(t)).map(|j| binomial(t, j)).sum();
    Ok(base * placements)
}

/// First-representative deduplication of arbitrary channels at tolerance
/// `tol` (max-entry superoperator distance). O(kept * input) scan; intended
/// for moderate sizes. Ordering of survivors matches the input order.
pub fn dedupe(channels: Vec<QuantumChannel>, tol: f64) -> Vec<QuantumChannel> {
    let mut kept: Vec<QuantumChannel> = Vec::new();
    for c in channels {
        if !kept.iter().any(|k| k.is_close(&c, tol)) {
            kept.push(c);
        }
    }
    kept
}

/// Builds the resource-augmented word class: all products of at most `depth`
/// factors drawn from `base.channels() ∪ {psi}`, using `psi` at most `k`
/// times. Channel-level deduplication; per-channel bookkeeping keeps the
/// minimum resource count over all words reaching it, so a channel reachable
/// cheaply can still be extended with further resource uses.
///
/// `budget` caps the number of candidate words examined
/// (default [`DEFAULT_WORD_BUDGET`]); exceeding it is a guard error.
pub fn augment(
    base: &CircuitClass,
    psi: &QuantumChannel,
    k: usize,
    depth: usize,
    budget: usize,
) -> Result<CircuitClass> {
    if psi.n() != base.n() {
        return Err(Error::DimensionMismatch {
            context: "augment resource channel",
            expected: base.n(),
            got: psi.n(),
        });
    }
    if depth == 0 {
        return Err(Error::InvalidParameter(
            "augment needs depth >= 1".into(),
        ));
    }
    // Generators: base channels cost 0 resource uses, psi costs 1.
    let mut gens: Vec<(QuantumChannel, usize)> = base
        .channels()
        .iter()
        .map(|c| (c.clone(), 0usize))
        .collect();
    if k > 0 {
        gens.push((psi.clone(), 1));
    }
    let mut interner = Interner::new();
    let mut used: Vec<usize> = Vec::new(); // min resource uses per interned channel
    let mut candidates = 0usize;

    // Words of length exactly 1.
    for (g, cost) in &gens {
        let (idx, inserted) = interner.intern(g.clone());
        if inserted {
            used.push(*cost);
        } else if *cost < used[idx] {
            used[idx] = *cost;
        }
    }

    // Extension passes: after pass l the interner holds all words of length
    // <= l + 1 (with minimal resource counts). Newly updated entries are
    // rescanned within the same pass via the plain index loop, which can only
    // add words of length <= depth anyway because each pass multiplies by a
    // single generator and we run depth - 1 passes.
    for _ in 1..depth {
        let snapshot_len = interner.channels.len();
        for i in 0..snapshot_len {
            let word = interner.channels[i].clone();
            let word_used = used[i];
            for (g, cost) in &gens {
                let total = word_used + cost;
                if total > k {
                    continue;
                }
                candidates += 1;
                if candidates > budget {
                    return Err(Error::GuardExceeded {
                        what: "augment candidate words",
                        limit: budget,
                        requested: candidates,
                    });
                }
                let cand = compose(g, &word)?;
                let (idx, inserted) = interner.intern(cand);
                if inserted {
                    used.push(total);
                } else if total < used[idx] {
                    used[idx] = total;
                }
            }
        }
    }
    Ok(CircuitClass::new(
        base.n(),
        format!("augment({},psi={},k={k},L={depth})", base.spec(), psi.label()),
        base.dedup_tol(),
        interner.channels,
    ))
}

/// The 1-qubit stabilizer class augmented with the T-gate channel:
/// spec `stab+T:k:L`.
pub fn stab_t_class(k: usize, depth: usize) -> Result<CircuitClass> {
    let base = clifford_class(1)?;
    let t = parse_gate_word(1, "T0")?;
    let mut class = augment(&base, &t, k, depth, DEFAULT_WORD_BUDGET)?;
    class.spec = format!("stab+T:{k}:{depth}");
    Ok(class)
}

/// Parses the class-spec grammar:
/// `stab:n` | `iqp:n` | `stab+T:k:L` (n = 1) | `iqp+CCZ:k:L` (n = 3).
pub fn class_from_spec(spec: &str) -> Result<CircuitClass> {
    let parts: Vec<&str> = spec.split(':').collect();
    let parse_usize = |s: &str| -> Result<usize> {
        s.parse::<usize>()
            .map_err(|_| Error::InvalidSpec(spec.to_string()))
    };
    match parts.as_slice() {
        ["stab", n] => clifford_class(parse_usize(n)?),
        ["iqp", n] => iqp_class(parse_usize(n)?),
        ["stab+T", k, l] => stab_t_class(parse_usize(k)?, parse_usize(l)?),
        ["iqp+CCZ", k, l] => iqp_ccz_class(3, parse_usize(k)?, parse_usize(l)?),
        _ => Err(Error::InvalidSpec(spec.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::{parse_gate_word, GateKind, GateOp};

    #[test]
    fn clifford_class_n1_has_24_channels() {
        let c = clifford_class(1).unwrap();
        assert_eq!(c.len(), 24);
        assert_eq!(c.len() as u128, clifford_group_order(1));
        assert_eq!(c.spec(), "stab:1");
    }

    #[test]
    fn clifford_class_n1_is_closed_under_composition() {
        let c = clifford_class(1).unwrap();
        let mut interner = Interner::new();
        for chan in c.channels() {
            interner.intern(chan.clone());
        }
        for a in c.channels() {
            for b in c.channels() {
                let prod = compose(a, b).unwrap();
                assert!(interner.contains(&prod), "product left the class");
            }
        }
    }

    #[test]
    fn clifford_class_guard_and_formula() {
        assert!(matches!(
            clifford_class(3),
            Err(Error::GuardExceeded { .. })
        ));
        assert_eq!(clifford_group_order(2), 11520);
        assert_eq!(stabilizer_state_count_formula(1), 6);
        assert_eq!(stabilizer_state_count_formula(2), 60);
    }

    #[test]
    fn stabilizer_states_n1() {
        assert_eq!(stabilizer_state_count(1).unwrap(), 6);
    }

    #[test]
    fn iqp_class_n2_has_4_channels() {
        let c = iqp_class(2).unwrap();
        assert_eq!(c.len(), 4);
        // 2^2 Z subsets x 1 nonempty CZ subset.
        assert_eq!(class_size_bound_iqp(2, 0).unwrap(), 4);
        assert!(iqp_class(1).is_err());
        assert!(iqp_class(4).is_err());
    }

    #[test]
    fn iqp_ccz_bound_examples() {
        assert_eq!(class_size_bound_iqp(3, 0).unwrap(), 56);
        assert_eq!(class_size_bound_iqp(3, 1).unwrap(), 112);
        // Monotone in k, saturating once every placement is allowed.
        assert_eq!(
            class_size_bound_iqp(3, 2).unwrap(),
            class_size_bound_iqp(3, 1).unwrap()
        );
    }

    #[test]
    fn iqp_ccz_class_size_matches_bound() {
        let c = iqp_ccz_class(3, 1, 3).unwrap();
        assert_eq!(c.len() as u128, class_size_bound_iqp(3, 1).unwrap());
    }

    #[test]
    fn dedupe_first_representative() {
        let i1 = identity_channel(1);
        let i2 = identity_channel(1);
        let kept = dedupe(vec![i1.clone(), i2], DEFAULT_DEDUP_TOL);
        assert_eq!(kept.len(), 1);

        // S.S equals Z as a channel.
        let ss = parse_gate_word(1, "S0.S0").unwrap();
        let z = parse_gate_word(1, "Z0").unwrap();
        let kept = dedupe(vec![ss, z], DEFAULT_DEDUP_TOL);
        assert_eq!(kept.len(), 1);
        assert_eq!(kept[0].label(), "S0.S0");

        // Idempotent.
        let again = dedupe(kept.clone(), DEFAULT_DEDUP_TOL);
        assert_eq!(again.len(), kept.len());
    }

    #[test]
    fn augment_with_k0_on_closed_base_returns_base() {
        let base = clifford_class(1).unwrap();
        let t = parse_gate_word(1, "T0").unwrap();
        let aug = augment(&base, &t, 0, 3, DEFAULT_WORD_BUDGET).unwrap();
        assert_eq!(aug.len(), base.len());
        for chan in aug.channels() {
            assert!(base.contains(chan, DEFAULT_DEDUP_TOL));
        }
    }

    #[test]
    fn augment_k1_contains_base_and_resource() {
        let base = clifford_class(1).unwrap();
        let t = parse_gate_word(1, "T0").unwrap();
        let aug = augment(&base, &t, 1, 3, DEFAULT_WORD_BUDGET).unwrap();
        assert!(aug.len() > base.len());
        for chan in base.channels() {
            assert!(aug.contains(chan, DEFAULT_DEDUP_TOL));
        }
        assert!(aug.contains(&t, DEFAULT_DEDUP_TOL));
    }

    #[test]
    fn augment_classes_nest_in_k() {
        let base = clifford_class(1).unwrap();
        let t = parse_gate_word(1, "T0").unwrap();
        let a1 = augment(&base, &t, 1, 3, DEFAULT_WORD_BUDGET).unwrap();
        let a2 = augment(&base, &t, 2, 3, DEFAULT_WORD_BUDGET).unwrap();
        assert!(a2.len() >= a1.len());
        for chan in a1.channels() {
            assert!(a2.contains(chan, DEFAULT_DEDUP_TOL));
        }
    }

    #[test]
    fn augment_budget_guard_fires() {
        let base = clifford_class(1).unwrap();
        let t = parse_gate_word(1, "T0").unwrap();
        match augment(&base, &t, 1, 3, 10) {
            Err(Error::GuardExceeded { what, .. }) => {
                assert_eq!(what, "augment candidate words");
            }
            other => panic!("expected GuardExceeded, got {other:?}"),
        }
    }

    #[test]
    fn augment_rejects_mismatched_resource() {
        let base = clifford_class(1).unwrap();
        let cz = gate_channel(2, &GateOp::two(GateKind::Cz, 0, 1)).unwrap();
        assert!(augment(&base, &cz, 1, 2, DEFAULT_WORD_BUDGET).is_err());
    }

    #[test]
    fn class_from_spec_round_trip() {
        assert_eq!(class_from_spec("stab:1").unwrap().len(), 24);
        assert_eq!(class_from_spec("iqp:2").unwrap().len(), 4);
        let st = class_from_spec("stab+T:1:2").unwrap();
        assert_eq!(st.spec(), "stab+T:1:2");
        assert!(st.len() > 24);
        assert!(class_from_spec("stab").is_err());
        assert!(class_from_spec("iqp:9").is_err());
        assert!(class_from_spec("frob:1").is_err());
        assert!(class_from_spec("stab:x").is_err());
    }

    #[test]
    fn iqp_channels_have_gate_word_provenance() {
        let c = iqp_class(2).unwrap();
        for chan in c.channels() {
            let rebuilt = parse_gate_word(2, chan.label()).unwrap();
            assert!(rebuilt.is_close(chan, 1e-12), "label {}", chan.label());
        }
    }
}
