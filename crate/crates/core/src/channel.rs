//! Bit strings, density matrices and quantum channels on n <= 3 qubits.
//!
//! Channels are stored as dense superoperators acting on column-stacked
//! density matrices: for a unitary conjugation rho -> U rho U^dag the
//! superoperator is `conj(U) (x) U`. The module also provides the Choi matrix
//! of a channel, the (real) Pauli transfer matrix, CPTP diagnostics, and the
//! input-output function
//!
//! ```text
//! f_Phi(x, y) = Tr{ Phi(|x><x|) |y><y| }
//! ```
//!
//! evaluated both directly ([`eval_f`]) and through the Choi matrix
//! ([`eval_f_choi`]); the two routes must agree and tests enforce it.
//!
//! Bit ordering: bit 0 of a [`BitString`] is the most significant bit of the
//! computational-basis index, i.e. `|x_0 x_1 ... x_{n-1}>` has index
//! `sum_i x_i 2^{n-1-i}`.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::mat::{
    dagger, identity, is_hermitian, max_abs_diff, min_hermitian_eigenvalue, trace_product,
    unvectorize, CMat, C_ONE, C_ZERO,
};

/// Largest qubit count any channel in this crate may act on.
pub const MAX_QUBITS: usize = 3;
/// Tolerance for trace preservation and for density-matrix invariants.
pub const TRACE_TOL: f64 = 1e-10;
/// Tolerance on the smallest Choi eigenvalue in complete-positivity checks.
pub const CHOI_PSD_TOL: f64 = 1e-8;
/// Tolerance for unitarity of gate matrices.
pub const UNITARY_TOL: f64 = 1e-10;
/// Default tolerance under which two channels count as equal (max-entry
/// distance between superoperators).
pub const CHANNEL_EQ_TOL: f64 = 1e-9;
/// Pauli-transfer-matrix entries must be real up to this tolerance.
pub const PTM_IMAG_TOL: f64 = 1e-9;

/// An ordered sequence of classical bits, most significant first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitString {
    bits: Vec<u8>,
}

impl BitString {
    /// Builds a bit string from raw bits; every entry must be 0 or 1.
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::InvalidParameter("empty bit string".into()));
        }
        if let Some(&b) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::InvalidParameter(format!(
                "bit string entries must be 0 or 1, got {b}"
            )));
        }
        Ok(Self { bits })
    }

    /// The `index`-th computational basis label on `n` bits.
    pub fn from_index(n: usize, index: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("empty bit string".into()));
        }
        if index >= (1 << n) {
            return Err(Error::InvalidParameter(format!(
                "index {index} out of range for {n} bits"
            )));
        }
        let bits = (0..n).map(|i| ((index >> (n - 1 - i)) & 1) as u8).collect();
        Ok(Self { bits })
    }

    pub fn n(&self) -> usize {
        self.bits.len()
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    /// Computational-basis index, bit 0 most significant.
    pub fn index(&self) -> usize {
        self.bits
            .iter()
            .fold(0usize, |acc, &b| (acc << 1) | b as usize)
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.bits {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits: Result<Vec<u8>> = s
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(Error::InvalidParameter(format!(
                    "invalid bit character `{other}`"
                ))),
            })
            .collect();
        Self::new(bits?)
    }
}

/// A validated density matrix on `n` qubits: Hermitian, unit trace,
/// positive semidefinite (all within [`TRACE_TOL`]).
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    n: usize,
    mat: CMat,
}

impl DensityMatrix {
    pub fn new(n: usize, mat: CMat) -> Result<Self> {
        let d = 1usize << n;
        if mat.nrows() != d || mat.ncols() != d {
            return Err(Error::DimensionMismatch {
                context: "density matrix",
                expected: d,
                got: mat.nrows(),
            });
        }
        if !is_hermitian(&mat, TRACE_TOL) {
            return Err(Error::InvalidParameter(
                "density matrix is not Hermitian".into(),
            ));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidParameter(format!(
                "density matrix trace {tr} differs from 1"
            )));
        }
        let min_eig = min_hermitian_eigenvalue(&mat);
        if min_eig < -TRACE_TOL {
            return Err(Error::InvalidParameter(format!(
                "density matrix has negative eigenvalue {min_eig:.3e}"
            )));
        }
        Ok(Self { n, mat })
    }

    /// Used internally when the invariants hold by construction (e.g. the
    /// output of a validated CPTP channel applied to a validated state).
    pub fn from_matrix_unchecked(n: usize, mat: CMat) -> Self {
        Self { n, mat }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }
}

/// The basis projector `|x><x|`.
pub fn basis_state(x: &BitString) -> DensityMatrix {
    let n = x.n();
    let d = 1usize << n;
    let mut mat = CMat::zeros(d, d);
    mat[(x.index(), x.index())] = C_ONE;
    DensityMatrix { n, mat }
}

/// Diagnostics produced by [`cptp_report`].
#[derive(Clone, Debug)]
pub struct CptpReport {
    /// Max deviation of `Tr Phi(E_ab)` from `delta_ab` over all matrix units.
    pub tp_residual: f64,
    /// Max-entry distance between the Choi matrix and its adjoint.
    pub choi_hermiticity_residual: f64,
    /// Smallest eigenvalue of the (symmetrised) Choi matrix.
    pub choi_min_eigenvalue: f64,
    pub trace_preserving: bool,
    pub completely_positive: bool,
}

impl CptpReport {
    pub fn is_cptp(&self) -> bool {
        self.trace_preserving && self.completely_positive
    }

    pub fn failure_reason(&self) -> String {
        let mut parts = Vec::new();
        if !self.trace_preserving {
            parts.push(format!("trace residual {:.3e}", self.tp_residual));
        }
        if !self.completely_positive {
            parts.push(format!(
                "Choi min eigenvalue {:.3e}, hermiticity residual {:.3e}",
                self.choi_min_eigenvalue, self.choi_hermiticity_residual
            ));
        }
        if parts.is_empty() {
            "none".into()
        } else {
            parts.join("; ")
        }
    }
}

/// A quantum channel on `n` qubits in dense superoperator form.
#[derive(Clone, Debug)]
pub struct QuantumChannel {
    n: usize,
    label: String,
    superop: CMat,
}

impl QuantumChannel {
    /// Validates dimensions and the CPTP property (trace preservation within
    /// [`TRACE_TOL`], Choi positivity within [`CHOI_PSD_TOL`]).
    pub fn new(n: usize, label: impl Into<String>, superop: CMat) -> Result<Self> {
        check_qubit_count(n)?;
        let dd = 1usize << (2 * n);
        if superop.nrows() != dd || superop.ncols() != dd {
            return Err(Error::DimensionMismatch {
                context: "superoperator",
                expected: dd,
                got: superop.nrows(),
            });
        }
        let report = cptp_report(n, &superop);
        if !report.is_cptp() {
            return Err(Error::NotCptp {
                reason: report.failure_reason(),
            });
        }
        Ok(Self {
            n,
            label: label.into(),
            superop,
        })
    }

    /// Skips the CPTP validation. Reserved for maps that are CPTP by
    /// construction (unitary conjugations, normalized Kraus sets) and for the
    /// affine combinations formed while verifying decompositions, which are
    /// deliberately allowed to leave the CPTP set.
    pub fn from_superop_unchecked(n: usize, label: impl Into<String>, superop: CMat) -> Self {
        Self {
            n,
            label: label.into(),
            superop,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1usize << self.n
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn set_label(&mut self, label: impl Into<String>) {
        self.label = label.into();
    }

    pub fn superop(&self) -> &CMat {
        &self.superop
    }

    /// Applies the channel: unvec(S vec(rho)).
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.n() != self.n {
            return Err(Error::DimensionMismatch {
                context: "channel application",
                expected: self.n,
                got: rho.n(),
            });
        }
        let d = self.dim();
        let v = nalgebra::DVector::from_vec(crate::mat::vectorize(rho.matrix()));
        let out = &self.superop * v;
        Ok(DensityMatrix::from_matrix_unchecked(
            self.n,
            unvectorize(out.as_slice(), d),
        ))
    }

    /// The Choi matrix `(Phi (x) Id)(|L><L|)` with `|L> = 2^{-n/2} sum_x |x>|x>`:
    /// a `4^n x 4^n` matrix equal to `(1/2^n) sum_ab Phi(E_ab) (x) E_ab`.
    /// For a CPTP channel it is PSD with unit trace.
    pub fn choi(&self) -> CMat {
        let d = self.dim();
        let inv_d = Complex64::new(1.0 / d as f64, 0.0);
        let mut c = CMat::zeros(d * d, d * d);
        for a in 0..d {
            for b in 0..d {
                // vec(E_ab) is the basis vector at column index b*d + a.
                let col = self.superop.column(b * d + a);
                let phi_eab = unvectorize(col.as_slice(), d);
                for i in 0..d {
                    for j in 0..d {
                        c[(i * d + a, j * d + b)] += inv_d * phi_eab[(i, j)];
                    }
                }
            }
        }
        c
    }

    /// The Pauli transfer matrix `R[a, b] = Tr(P_a Phi(P_b)) / 2^n`, a real
    /// `4^n x 4^n` matrix for any Hermiticity-preserving map. Errors if the
    /// imaginary residue exceeds [`PTM_IMAG_TOL`].
    pub fn ptm(&self) -> Result<nalgebra::DMatrix<f64>> {
        let d = self.dim();
        let num_paulis = d * d;
        let paulis: Vec<CMat> = (0..num_paulis).map(|a| pauli_string(self.n, a)).collect();
        let mut r = nalgebra::DMatrix::<f64>::zeros(num_paulis, num_paulis);
        for b in 0..num_paulis {
            let v = nalgebra::DVector::from_vec(crate::mat::vectorize(&paulis[b]));
            let image = &self.superop * v;
            let phi_pb = unvectorize(image.as_slice(), d);
            for a in 0..num_paulis {
                let tr = trace_product(&paulis[a], &phi_pb);
                let val = tr / d as f64;
                if val.im.abs() > PTM_IMAG_TOL {
                    return Err(Error::Numerical(format!(
                        "Pauli transfer entry ({a}, {b}) has imaginary part {:.3e}",
                        val.im
                    )));
                }
                r[(a, b)] = val.re;
            }
        }
        Ok(r)
    }

    /// Max-entry superoperator distance to another channel.
    pub fn distance(&self, other: &QuantumChannel) -> f64 {
        max_abs_diff(&self.superop, &other.superop)
    }

    pub fn is_close(&self, other: &QuantumChannel, tol: f64) -> bool {
        self.n == other.n && self.distance(other) <= tol
    }
}

fn check_qubit_count(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter("channel on zero qubits".into()));
    }
    if n > MAX_QUBITS {
        return Err(Error::GuardExceeded {
            what: "qubit count",
            limit: MAX_QUBITS,
            requested: n,
        });
    }
    Ok(())
}

/// CPTP diagnostics for a candidate superoperator.
pub fn cptp_report(n: usize, superop: &CMat) -> CptpReport {
    let d = 1usize << n;
    // Trace preservation: Tr Phi(E_ab) = delta_ab, i.e. summing the rows of
    // the superoperator that correspond to output diagonal entries must give
    // vec(I)^T back.
    let mut tp_residual = 0.0f64;
    for a in 0..d {
        for b in 0..d {
            let mut acc = C_ZERO;
            for i in 0..d {
                acc += superop[(i * d + i, b * d + a)];
            }
            let expected = if a == b { C_ONE } else { C_ZERO };
            tp_residual = tp_residual.max((acc - expected).norm());
        }
    }
    let chan = QuantumChannel {
        n,
        label: String::new(),
        superop: superop.clone(),
    };
    let choi = chan.choi();
    let herm = max_abs_diff(&choi, &choi.adjoint());
    let min_eig = min_hermitian_eigenvalue(&choi);
    CptpReport {
        tp_residual,
        choi_hermiticity_residual: herm,
        choi_min_eigenvalue: min_eig,
        trace_preserving: tp_residual <= TRACE_TOL,
        completely_positive: min_eig >= -CHOI_PSD_TOL && herm <= CHOI_PSD_TOL,
    }
}

/// Convenience wrapper around [`cptp_report`].
pub fn is_cptp(channel: &QuantumChannel) -> bool {
    cptp_report(channel.n(), channel.superop()).is_cptp()
}

/// The unitary-conjugation channel `rho -> U rho U^dag`, with superoperator
/// `conj(U) (x) U`. Errors unless `U` is unitary within [`UNITARY_TOL`].
pub fn unitary_channel(n: usize, label: impl Into<String>, u: &CMat) -> Result<QuantumChannel> {
    check_qubit_count(n)?;
    let d = 1usize << n;
    if u.nrows() != d || u.ncols() != d {
        return Err(Error::DimensionMismatch {
            context: "unitary matrix",
            expected: d,
            got: u.nrows(),
        });
    }
    let residual = max_abs_diff(&(u * dagger(u)), &identity(d));
    if residual > UNITARY_TOL {
        return Err(Error::NotUnitary { residual });
    }
    let superop = crate::mat::kron(&u.map(|z| z.conj()), u);
    Ok(QuantumChannel::from_superop_unchecked(n, label, superop))
}

/// The channel `rho -> sum_i K_i rho K_i^dag` with superoperator
/// `sum_i conj(K_i) (x) K_i`. Validates the trace-preservation condition
/// `sum_i K_i^dag K_i = I` and the full CPTP report.
pub fn kraus_channel(n: usize, label: impl Into<String>, kraus: &[CMat]) -> Result<QuantumChannel> {
    check_qubit_count(n)?;
    let d = 1usize << n;
    if kraus.is_empty() {
        return Err(Error::InvalidParameter(
            "kraus_channel needs at least one operator".into(),
        ));
    }
    let mut completeness = CMat::zeros(d, d);
    let mut superop = CMat::zeros(d * d, d * d);
    for k in kraus {
        if k.nrows() != d || k.ncols() != d {
            return Err(Error::DimensionMismatch {
                context: "Kraus operator",
                expected: d,
                got: k.nrows(),
            });
        }
        completeness += dagger(k) * k;
        superop += crate::mat::kron(&k.map(|z| z.conj()), k);
    }
    let residual = max_abs_diff(&completeness, &identity(d));
    if residual > TRACE_TOL {
        return Err(Error::NotCptp {
            reason: format!("Kraus completeness residual {residual:.3e}"),
        });
    }
    QuantumChannel::new(n, label, superop)
}

/// Joins two provenance labels in circuit order (first applied first),
/// dropping bare identity labels.
pub(crate) fn join_labels(first_applied: &str, then: &str) -> String {
    match (first_applied, then) {
        ("I", _) => then.to_string(),
        (_, "I") => first_applied.to_string(),
        _ => format!("{first_applied}.{then}"),
    }
}

/// Sequential composition `a` after `b` (apply `b` first): superoperator
/// product `S_a S_b`. The label records the circuit order `b.a`.
pub fn compose(a: &QuantumChannel, b: &QuantumChannel) -> Result<QuantumChannel> {
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch {
            context: "compose",
            expected: a.n(),
            got: b.n(),
        });
    }
    Ok(QuantumChannel::from_superop_unchecked(
        a.n(),
        join_labels(b.label(), a.label()),
        a.superop() * b.superop(),
    ))
}

/// Parallel composition `a (x) b`, with `a` on the leading (most significant)
/// qubits. Assembled entrywise from the factor superoperators:
/// the action on a matrix unit factorises as
/// `(a (x) b)(E_AB) = a(E_A) (x) b(E_B)`.
pub fn tensor(a: &QuantumChannel, b: &QuantumChannel) -> Result<QuantumChannel> {
    let n = a.n() + b.n();
    check_qubit_count(n)?;
    let da = a.dim();
    let db = b.dim();
    let d = da * db;
    let sa = a.superop();
    let sb = b.superop();
    let mut s = CMat::zeros(d * d, d * d);
    for i_a in 0..da {
        for i_b in 0..db {
            let i = i_a * db + i_b;
            for j_a in 0..da {
                for j_b in 0..db {
                    let j = j_a * db + j_b;
                    let row = j * d + i;
                    for k_a in 0..da {
                        for k_b in 0..db {
                            let k = k_a * db + k_b;
                            for l_a in 0..da {
                                for l_b in 0..db {
                                    let l = l_a * db + l_b;
                                    let col = l * d + k;
                                    s[(row, col)] = sa[(j_a * da + i_a, l_a * da + k_a)]
                                        * sb[(j_b * db + i_b, l_b * db + k_b)];
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(QuantumChannel::from_superop_unchecked(
        n,
        format!("({})x({})", a.label(), b.label()),
        s,
    ))
}

/// Rebuilds a superoperator from a Choi matrix (inverse of
/// [`QuantumChannel::choi`]): `S[(j d + i, b d + a)] = d * choi[(i d + a, j d + b)]`.
pub fn choi_to_superop(choi: &CMat, d: usize) -> CMat {
    assert_eq!(choi.nrows(), d * d, "choi_to_superop: dimension mismatch");
    let mut s = CMat::zeros(d * d, d * d);
    let scale = Complex64::new(d as f64, 0.0);
    for a in 0..d {
        for b in 0..d {
            for i in 0..d {
                for j in 0..d {
                    s[(j * d + i, b * d + a)] = scale * choi[(i * d + a, j * d + b)];
                }
            }
        }
    }
    s
}

/// `f_Phi(x, y) = Tr{ Phi(|x><x|) |y><y| }`, evaluated by applying the
/// channel. For CPTP channels the value is a conditional probability in
/// `[0, 1]` (up to arithmetic noise).
pub fn eval_f(phi: &QuantumChannel, x: &BitString, y: &BitString) -> Result<f64> {
    if x.n() != phi.n() || y.n() != phi.n() {
        return Err(Error::DimensionMismatch {
            context: "eval_f bit strings",
            expected: phi.n(),
            got: if x.n() != phi.n() { x.n() } else { y.n() },
        });
    }
    let out = phi.apply(&basis_state(x))?;
    let v = out.matrix()[(y.index(), y.index())];
    debug_assert!(v.im.abs() < 1e-9, "eval_f produced imaginary part {}", v.im);
    Ok(v.re)
}

/// The same function evaluated through the Choi matrix:
/// `f_Phi(x, y) = 2^n Tr{ choi(Phi) (|y><y| (x) |x><x|) }` — the output
/// projector sits on the leading block. Kept as an independent route so the
/// two evaluation paths can be cross-checked.
pub fn eval_f_choi(phi: &QuantumChannel, x: &BitString, y: &BitString) -> Result<f64> {
    if x.n() != phi.n() || y.n() != phi.n() {
        return Err(Error::DimensionMismatch {
            context: "eval_f_choi bit strings",
            expected: phi.n(),
            got: if x.n() != phi.n() { x.n() } else { y.n() },
        });
    }
    let d = phi.dim();
    let choi = phi.choi();
    let mut proj = CMat::zeros(d * d, d * d);
    proj[(y.index() * d + x.index(), y.index() * d + x.index())] = C_ONE;
    let tr = trace_product(&choi, &proj);
    debug_assert!(tr.im.abs() < 1e-9);
    Ok(tr.re * d as f64)
}

/// The `idx`-th Pauli string on `n` qubits: base-4 digits of `idx` select
/// I, X, Y, Z per qubit, most significant digit = qubit 0.
pub fn pauli_string(n: usize, idx: usize) -> CMat {
    let i2 = identity(2);
    let x = CMat::from_row_slice(2, 2, &[C_ZERO, C_ONE, C_ONE, C_ZERO]);
    let y = CMat::from_row_slice(
        2,
        2,
        &[
            C_ZERO,
            Complex64::new(0.0, -1.0),
            Complex64::new(0.0, 1.0),
            C_ZERO,
        ],
    );
    let z = CMat::from_row_slice(
        2,
        2,
        &[C_ONE, C_ZERO, C_ZERO, Complex64::new(-1.0, 0.0)],
    );
    let singles = [i2, x, y, z];
    let mut out = CMat::identity(1, 1);
    for q in 0..n {
        let digit = (idx >> (2 * (n - 1 - q))) & 3;
        out = crate::mat::kron(&out, &singles[digit]);
    }
    out
}

/// Traces out the trailing subsystem of dimension `d_last`.
pub fn partial_trace_last(m: &CMat, d_keep: usize, d_last: usize) -> CMat {
    assert_eq!(m.nrows(), d_keep * d_last);
    let mut out = CMat::zeros(d_keep, d_keep);
    for i in 0..d_keep {
        for j in 0..d_keep {
            for b in 0..d_last {
                out[(i, j)] += m[(i * d_last + b, j * d_last + b)];
            }
        }
    }
    out
}

/// Traces out the leading subsystem of dimension `d_first`.
pub fn partial_trace_first(m: &CMat, d_first: usize, d_keep: usize) -> CMat {
    assert_eq!(m.nrows(), d_first * d_keep);
    let mut out = CMat::zeros(d_keep, d_keep);
    for i in 0..d_keep {
        for j in 0..d_keep {
            for a in 0..d_first {
                out[(i, j)] += m[(a * d_keep + i, a * d_keep + j)];
            }
        }
    }
    out
}
