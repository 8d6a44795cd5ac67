//! Named gates, their placements on n qubits, and gate-word parsing.
//!
//! Gate labels are compact words such as `H0`, `T0`, `CX01`, `CZ12`,
//! `CCZ012`; a dot-separated sequence (`H0.T0.CX01`) denotes sequential
//! application left to right. Qubit indices are single digits (n <= 3).

use num_complex::Complex64;

use crate::channel::{unitary_channel, QuantumChannel};
use crate::error::{Error, Result};
use crate::mat::{identity, CMat, C_ONE, C_ZERO};

/// Gate vocabulary. `Cx` is a directed controlled-X (control listed first);
/// `Cz` and `Ccz` are symmetric phase gates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GateKind {
    I,
    H,
    S,
    T,
    X,
    Y,
    Z,
    Cx,
    Cz,
    Ccz,
}

impl GateKind {
    pub fn arity(&self) -> usize {
        match self {
            GateKind::Cx | GateKind::Cz => 2,
            GateKind::Ccz => 3,
            _ => 1,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            GateKind::I => "I",
            GateKind::H => "H",
            GateKind::S => "S",
            GateKind::T => "T",
            GateKind::X => "X",
            GateKind::Y => "Y",
            GateKind::Z => "Z",
            GateKind::Cx => "CX",
            GateKind::Cz => "CZ",
            GateKind::Ccz => "CCZ",
        }
    }
}

/// A gate applied at specific qubit positions.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GateOp {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
}

impl GateOp {
    pub fn single(kind: GateKind, q: usize) -> Self {
        Self {
            kind,
            qubits: vec![q],
        }
    }

    pub fn two(kind: GateKind, a: usize, b: usize) -> Self {
        Self {
            kind,
            qubits: vec![a, b],
        }
    }

    pub fn three(kind: GateKind, a: usize, b: usize, c: usize) -> Self {
        Self {
            kind,
            qubits: vec![a, b, c],
        }
    }

    pub fn label(&self) -> String {
        if self.kind == GateKind::I {
            return "I".into();
        }
        let digits: String = self.qubits.iter().map(|q| q.to_string()).collect();
        format!("{}{}", self.kind.name(), digits)
    }
}

/// The defining matrix of a one-qubit gate.
pub fn single_qubit_gate(kind: GateKind) -> CMat {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    match kind {
        GateKind::I => identity(2),
        GateKind::H => {
            let r = std::f64::consts::FRAC_1_SQRT_2;
            CMat::from_row_slice(2, 2, &[c(r, 0.0), c(r, 0.0), c(r, 0.0), c(-r, 0.0)])
        }
        GateKind::S => CMat::from_row_slice(2, 2, &[C_ONE, C_ZERO, C_ZERO, c(0.0, 1.0)]),
        GateKind::T => {
            let w = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
            CMat::from_row_slice(2, 2, &[C_ONE, C_ZERO, C_ZERO, w])
        }
        GateKind::X => CMat::from_row_slice(2, 2, &[C_ZERO, C_ONE, C_ONE, C_ZERO]),
        GateKind::Y => CMat::from_row_slice(2, 2, &[C_ZERO, c(0.0, -1.0), c(0.0, 1.0), C_ZERO]),
        GateKind::Z => CMat::from_row_slice(2, 2, &[C_ONE, C_ZERO, C_ZERO, c(-1.0, 0.0)]),
        _ => panic!("single_qubit_gate called with multi-qubit kind"),
    }
}

/// The defining matrix of a gate on its own `arity` qubits.
pub fn gate_matrix(kind: GateKind) -> CMat {
    match kind {
        GateKind::Cx => {
            let mut m = CMat::zeros(4, 4);
            m[(0, 0)] = C_ONE;
            m[(1, 1)] = C_ONE;
            m[(2, 3)] = C_ONE;
            m[(3, 2)] = C_ONE;
            m
        }
        GateKind::Cz => {
            let mut m = identity(4);
            m[(3, 3)] = Complex64::new(-1.0, 0.0);
            m
        }
        GateKind::Ccz => {
            let mut m = identity(8);
            m[(7, 7)] = Complex64::new(-1.0, 0.0);
            m
        }
        single => single_qubit_gate(single),
    }
}

/// Embeds a `2^k x 2^k` unitary acting on the ordered qubit list `qubits`
/// into the full `2^n x 2^n` space. Qubit `q` owns bit `n-1-q` of the basis
/// index (bit 0 is most significant).
pub fn embed_unitary(u: &CMat, qubits: &[usize], n: usize) -> Result<CMat> {
    let k = qubits.len();
    let dk = 1usize << k;
    if u.nrows() != dk || u.ncols() != dk {
        return Err(Error::DimensionMismatch {
            context: "embed_unitary gate matrix",
            expected: dk,
            got: u.nrows(),
        });
    }
    let mut seen = [false; 8];
    for &q in qubits {
        if q >= n {
            return Err(Error::InvalidParameter(format!(
                "qubit index {q} out of range for n={n}"
            )));
        }
        if seen[q] {
            return Err(Error::InvalidParameter(format!(
                "repeated qubit index {q} in gate placement"
            )));
        }
        seen[q] = true;
    }
    let d = 1usize << n;
    let bit_of = |b: usize, q: usize| (b >> (n - 1 - q)) & 1;
    let local_index = |b: usize| -> usize {
        qubits
            .iter()
            .fold(0usize, |acc, &q| (acc << 1) | bit_of(b, q))
    };
    let patch = |b: usize, local: usize| -> usize {
        let mut out = b;
        for (t, &q) in qubits.iter().enumerate() {
            let bit = (local >> (k - 1 - t)) & 1;
            let pos = n - 1 - q;
            out = (out & !(1 << pos)) | (bit << pos);
        }
        out
    };
    let mut m = CMat::zeros(d, d);
    for b in 0..d {
        let l = local_index(b);
        for lp in 0..dk {
            let bp = patch(b, lp);
            m[(bp, b)] += u[(lp, l)];
        }
    }
    Ok(m)
}

/// The full `2^n` unitary of a placed gate.
pub fn gate_unitary(n: usize, op: &GateOp) -> Result<CMat> {
    if op.kind == GateKind::I {
        return Ok(identity(1 << n));
    }
    if op.qubits.len() != op.kind.arity() {
        return Err(Error::InvalidParameter(format!(
            "gate {} expects {} qubit(s), got {}",
            op.kind.name(),
            op.kind.arity(),
            op.qubits.len()
        )));
    }
    embed_unitary(&gate_matrix(op.kind), &op.qubits, n)
}

/// The channel of a placed gate.
pub fn gate_channel(n: usize, op: &GateOp) -> Result<QuantumChannel> {
    unitary_channel(n, op.label(), &gate_unitary(n, op)?)
}

/// The identity channel on `n` qubits.
pub fn identity_channel(n: usize) -> QuantumChannel {
    unitary_channel(n, "I", &identity(1 << n)).expect("identity is unitary")
}

/// A named generating set together with its placement rule on `n` qubits.
#[derive(Clone, Debug)]
pub struct GateSet {
    pub name: &'static str,
    pub kinds: Vec<GateKind>,
}

impl GateSet {
    /// Generators whose closure is the finite group of stabilizer-preserving
    /// unitary channels.
    pub fn clifford() -> Self {
        Self {
            name: "clifford",
            kinds: vec![GateKind::H, GateKind::S, GateKind::Cx],
        }
    }

    /// Diagonal phase-type gates used for commuting-layer circuits.
    pub fn diagonal_phase() -> Self {
        Self {
            name: "diagonal-phase",
            kinds: vec![GateKind::Z, GateKind::Cz, GateKind::Ccz],
        }
    }

    /// All placements of the member gates on `n` qubits, in a fixed
    /// deterministic order: by gate kind, then lexicographic qubit tuples.
    /// Directed gates (`Cx`) enumerate ordered pairs; symmetric gates
    /// (`Cz`, `Ccz`) enumerate sorted tuples once.
    pub fn placements(&self, n: usize) -> Vec<GateOp> {
        let mut out = Vec::new();
        for &kind in &self.kinds {
            match kind.arity() {
                1 => {
                    for q in 0..n {
                        out.push(GateOp::single(kind, q));
                    }
                }
                2 => {
                    if kind == GateKind::Cx {
                        for a in 0..n {
                            for b in 0..n {
                                if a != b {
                                    out.push(GateOp::two(kind, a, b));
                                }
                            }
                        }
                    } else {
                        for a in 0..n {
                            for b in (a + 1)..n {
                                out.push(GateOp::two(kind, a, b));
                            }
                        }
                    }
                }
                3 => {
                    for a in 0..n {
                        for b in (a + 1)..n {
                            for c in (b + 1)..n {
                                out.push(GateOp::three(kind, a, b, c));
                            }
                        }
                    }
                }
                _ => unreachable!(),
            }
        }
        out
    }
}

/// Parses a single gate token such as `H0`, `CX01` or `CCZ012`. A one-qubit
/// gate with no digits defaults to qubit 0 (`"T"` means `T0`).
pub fn parse_gate_token(n: usize, token: &str) -> Result<GateOp> {
    let upper = token.to_ascii_uppercase();
    if upper == "I" {
        return Ok(GateOp {
            kind: GateKind::I,
            qubits: vec![],
        });
    }
    // Longest name first so CCZ does not parse as C + CZ.
    const NAMES: [(&str, GateKind); 9] = [
        ("CCZ", GateKind::Ccz),
        ("CX", GateKind::Cx),
        ("CZ", GateKind::Cz),
        ("H", GateKind::H),
        ("S", GateKind::S),
        ("T", GateKind::T),
        ("X", GateKind::X),
        ("Y", GateKind::Y),
        ("Z", GateKind::Z),
    ];
    let (kind, rest) = NAMES
        .iter()
        .find_map(|(name, kind)| upper.strip_prefix(name).map(|rest| (*kind, rest)))
        .ok_or_else(|| Error::InvalidSpec(format!("unknown gate `{token}`")))?;
    let qubits: Vec<usize> = if rest.is_empty() {
        if kind.arity() == 1 {
            vec![0]
        } else {
            return Err(Error::InvalidSpec(format!(
                "gate `{token}` needs {} qubit indices",
                kind.arity()
            )));
        }
    } else {
        rest.chars()
            .map(|c| {
                c.to_digit(10)
                    .map(|d| d as usize)
                    .ok_or_else(|| Error::InvalidSpec(format!("bad qubit digit in `{token}`")))
            })
            .collect::<Result<_>>()?
    };
    if qubits.len() != kind.arity() {
        return Err(Error::InvalidSpec(format!(
            "gate `{token}` expects {} qubit indices, got {}",
            kind.arity(),
            qubits.len()
        )));
    }
    for &q in &qubits {
        if q >= n {
            return Err(Error::InvalidSpec(format!(
                "qubit {q} out of range for n={n} in `{token}`"
            )));
        }
    }
    Ok(GateOp { kind, qubits })
}

/// Parses a dot-separated gate word (`"H0.T0.CX01"`) into the channel that
/// applies the gates left to right.
pub fn parse_gate_word(n: usize, word: &str) -> Result<QuantumChannel> {
    if word.trim().is_empty() {
        return Err(Error::InvalidSpec("empty gate word".into()));
    }
    let mut chan = identity_channel(n);
    for token in word.split('.') {
        let op = parse_gate_token(n, token.trim())?;
        if op.kind == GateKind::I {
            continue;
        }
        let g = gate_channel(n, &op)?;
        chan = crate::channel::compose(&g, &chan)?;
    }
    Ok(chan)
}
