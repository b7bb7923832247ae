//! Density-operator algebra for one and two qubits.
//!
//! Two-qubit operators use the basis ordering `|00>, |01>, |10>, |11>` with
//! qubit A as the left tensor factor. Entropies are in bits.

use nalgebra::{DMatrix, Matrix3, SMatrix, SVector, Vector3};
pub use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Op<const N: usize> = SMatrix<Complex64, N, N>;
pub type Op2 = Op<2>;
pub type Op4 = Op<4>;
pub type Ket<const N: usize> = SVector<Complex64, N>;

/// Tolerance for the Hermitian, trace and PSD invariants.
pub const STATE_TOL: f64 = 1e-10;
/// Negative eigenvalues below this are rejected instead of clipped.
pub const NEGATIVE_EIGENVALUE_LIMIT: f64 = -1e-8;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub(crate) const I_UNIT: Complex64 = Complex64::new(0.0, 1.0);

pub(crate) fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// The qubit a local operation or measurement refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    A,
    B,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::A => Side::B,
            Side::B => Side::A,
        }
    }
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Side::A => f.write_str("A"),
            Side::B => f.write_str("B"),
        }
    }
}

impl std::str::FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A" | "a" => Ok(Side::A),
            "B" | "b" => Ok(Side::B),
            other => Err(Error::invalid(format!("unknown side '{other}'"))),
        }
    }
}

/// Identity and the three Pauli matrices, indexed 0..=3.
pub fn pauli(index: usize) -> Result<Op2> {
    match index {
        0 => Ok(Op2::identity()),
        1 => Ok(sigma_x()),
        2 => Ok(sigma_y()),
        3 => Ok(sigma_z()),
        _ => Err(Error::invalid(format!("pauli index {index} out of range 0..=3"))),
    }
}

pub fn sigma_x() -> Op2 {
    Op2::new(ZERO, ONE, ONE, ZERO)
}

pub fn sigma_y() -> Op2 {
    Op2::new(ZERO, -I_UNIT, I_UNIT, ZERO)
}

pub fn sigma_z() -> Op2 {
    Op2::new(ONE, ZERO, ZERO, -ONE)
}

pub(crate) fn paulis() -> [Op2; 4] {
    [Op2::identity(), sigma_x(), sigma_y(), sigma_z()]
}

/// `v . sigma` for a real 3-vector.
pub fn sigma_dot(v: &Vector3<f64>) -> Op2 {
    sigma_x() * c(v.x) + sigma_y() * c(v.y) + sigma_z() * c(v.z)
}

/// Kronecker product of two single-qubit operators; `a` acts on qubit A.
pub fn tensor(a: &Op2, b: &Op2) -> Op4 {
    Op4::from_fn(|r, col| a[(r / 2, col / 2)] * b[(r % 2, col % 2)])
}

pub fn tensor_ket(a: &Ket<2>, b: &Ket<2>) -> Ket<4> {
    Ket::<4>::from_fn(|r, _| a[r / 2] * b[r % 2])
}

pub fn ket0() -> Ket<2> {
    Ket::<2>::new(ONE, ZERO)
}

pub fn ket1() -> Ket<2> {
    Ket::<2>::new(ZERO, ONE)
}

pub fn ket_plus() -> Ket<2> {
    Ket::<2>::new(c(std::f64::consts::FRAC_1_SQRT_2), c(std::f64::consts::FRAC_1_SQRT_2))
}

pub fn ket_minus() -> Ket<2> {
    Ket::<2>::new(c(std::f64::consts::FRAC_1_SQRT_2), c(-std::f64::consts::FRAC_1_SQRT_2))
}

pub fn projector<const N: usize>(psi: &Ket<N>) -> Op<N> {
    psi * psi.adjoint()
}

/// Eigen-decomposition of a Hermitian matrix: eigenvalues ascending, with the
/// matching eigenvectors as columns.
pub fn hermitian_eigen<const N: usize>(m: &Op<N>) -> (SVector<f64, N>, Op<N>) {
    let dynamic = DMatrix::from_iterator(N, N, m.iter().copied());
    let eig = dynamic.symmetric_eigen();
    let mut order: Vec<usize> = (0..N).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = SVector::<f64, N>::from_fn(|i, _| eig.eigenvalues[order[i]]);
    let vectors = Op::<N>::from_fn(|r, col| eig.eigenvectors[(r, order[col])]);
    (values, vectors)
}

/// Square root of a Hermitian PSD matrix; eigenvalues in `[-STATE_TOL, 0)` are clipped.
pub fn sqrt_psd<const N: usize>(m: &Op<N>) -> Result<Op<N>> {
    let (values, vectors) = hermitian_eigen(m);
    let mut roots = SVector::<Complex64, N>::zeros();
    for (i, &v) in values.iter().enumerate() {
        roots[i] = c(clip_eigenvalue(v)?.sqrt());
    }
    Ok(vectors * Op::<N>::from_diagonal(&roots) * vectors.adjoint())
}

fn clip_eigenvalue(v: f64) -> Result<f64> {
    if v >= 0.0 {
        Ok(v)
    } else if v >= NEGATIVE_EIGENVALUE_LIMIT {
        Ok(0.0)
    } else {
        Err(Error::not_a_state(format!("eigenvalue {v:e} is negative")))
    }
}

pub(crate) fn hermitian_part<const N: usize>(m: &Op<N>) -> Op<N> {
    (m + m.adjoint()) * c(0.5)
}

/// Shannon entropy (bits) of a probability vector, `0 log 0 = 0`.
pub fn shannon_entropy(probabilities: &[f64]) -> f64 {
    probabilities
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum()
}

/// Entropy of a qubit whose Bloch vector has length `r`.
pub fn qubit_entropy_from_bloch_length(r: f64) -> f64 {
    let r = r.clamp(0.0, 1.0);
    shannon_entropy(&[(1.0 + r) / 2.0, (1.0 - r) / 2.0])
}

/// A Hermitian, unit-trace, positive semidefinite operator on one (`N = 2`) or
/// two (`N = 4`) qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator<const N: usize> {
    m: Op<N>,
}

pub type QubitState = DensityOperator<2>;
pub type TwoQubitState = DensityOperator<4>;

impl<const N: usize> DensityOperator<N> {
    /// Validates `m` against the state invariants.
    pub fn new(m: Op<N>) -> Result<Self> {
        if N != 2 && N != 4 {
            return Err(Error::invalid(format!("unsupported dimension {N}")));
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::not_a_state("non-finite entry"));
        }
        let asym = (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if asym > STATE_TOL {
            return Err(Error::not_a_state(format!("not Hermitian (deviation {asym:e})")));
        }
        let tr = m.trace();
        if (tr - ONE).norm() > STATE_TOL {
            return Err(Error::not_a_state(format!("trace {tr} differs from 1")));
        }
        let m = hermitian_part(&m);
        let (values, _) = hermitian_eigen(&m);
        if values[0] < -STATE_TOL {
            return Err(Error::not_a_state(format!("negative eigenvalue {:e}", values[0])));
        }
        Ok(DensityOperator { m })
    }

    /// Wraps a matrix that is a state by construction, symmetrising away roundoff.
    pub(crate) fn from_raw(m: Op<N>) -> Self {
        DensityOperator { m: hermitian_part(&m) }
    }

    pub fn pure(psi: &Ket<N>) -> Result<Self> {
        let norm = psi.norm();
        if norm < 1e-12 {
            return Err(Error::invalid("zero state vector"));
        }
        Self::new(projector(&(psi / c(norm))))
    }

    pub fn maximally_mixed() -> Self {
        DensityOperator { m: Op::<N>::identity() * c(1.0 / N as f64) }
    }

    pub fn dim(&self) -> usize {
        N
    }

    pub fn matrix(&self) -> &Op<N> {
        &self.m
    }

    pub fn into_matrix(self) -> Op<N> {
        self.m
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> SVector<f64, N> {
        hermitian_eigen(&self.m).0
    }

    /// `U rho U^dagger` for a unitary `U`.
    pub fn conjugate(&self, u: &Op<N>) -> Self {
        Self::from_raw(u * self.m * u.adjoint())
    }

    /// Real expectation value `Tr[rho O]` of a Hermitian observable.
    pub fn expectation(&self, observable: &Op<N>) -> f64 {
        (self.m * observable).trace().re
    }

    /// Largest entrywise modulus of the difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self.m - other.m).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Convex combination `w * self + (1 - w) * other`.
    pub fn mix(&self, other: &Self, w: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&w) {
            return Err(Error::invalid(format!("mixing weight {w} outside [0,1]")));
        }
        Ok(Self::from_raw(self.m * c(w) + other.m * c(1.0 - w)))
    }

    /// Row-major `(re, im)` pairs.
    pub fn to_pairs(&self) -> Vec<[f64; 2]> {
        let mut out = Vec::with_capacity(N * N);
        for r in 0..N {
            for col in 0..N {
                let z = self.m[(r, col)];
                out.push([z.re, z.im]);
            }
        }
        out
    }
}

impl QubitState {
    pub fn from_bloch(r: &BlochVector) -> Self {
        Self::from_raw((Op2::identity() + sigma_dot(&r.to_vector())) * c(0.5))
    }

    pub fn bloch_vector(&self) -> BlochVector {
        BlochVector::clamped(
            self.expectation(&sigma_x()),
            self.expectation(&sigma_y()),
            self.expectation(&sigma_z()),
        )
    }
}

impl TwoQubitState {
    pub fn product(a: &QubitState, b: &QubitState) -> Self {
        Self::from_raw(tensor(a.matrix(), b.matrix()))
    }
}

pub fn tensor_states(a: &QubitState, b: &QubitState) -> TwoQubitState {
    TwoQubitState::product(a, b)
}

/// Partial trace of a raw two-qubit operator, keeping `keep`.
pub fn partial_trace_op(m: &Op4, keep: Side) -> Op2 {
    Op2::from_fn(|r, col| match keep {
        Side::A => m[(2 * r, 2 * col)] + m[(2 * r + 1, 2 * col + 1)],
        Side::B => m[(r, col)] + m[(2 + r, 2 + col)],
    })
}

pub fn partial_trace(rho: &TwoQubitState, keep: Side) -> QubitState {
    QubitState::from_raw(partial_trace_op(rho.matrix(), keep))
}

/// Von Neumann entropy in bits.
pub fn von_neumann_entropy<const N: usize>(rho: &DensityOperator<N>) -> Result<f64> {
    let values = rho.eigenvalues();
    let mut clipped = Vec::with_capacity(N);
    for &v in values.iter() {
        clipped.push(clip_eigenvalue(v)?);
    }
    Ok(shannon_entropy(&clipped))
}

/// Squared Uhlmann fidelity `(Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2`.
pub fn fidelity<const N: usize>(rho: &DensityOperator<N>, sigma: &DensityOperator<N>) -> Result<f64> {
    let root = sqrt_psd(rho.matrix())?;
    let inner = hermitian_part(&(root * sigma.matrix() * root));
    let (values, _) = hermitian_eigen(&inner);
    let mut tr = 0.0;
    for &v in values.iter() {
        tr += clip_eigenvalue(v)?.sqrt();
    }
    Ok((tr * tr).clamp(0.0, 1.0))
}

/// Trace distance `||rho - sigma||_1 / 2`.
pub fn trace_distance<const N: usize>(rho: &DensityOperator<N>, sigma: &DensityOperator<N>) -> f64 {
    let diff = hermitian_part(&(rho.matrix() - sigma.matrix()));
    hermitian_eigen(&diff).0.iter().map(|v| v.abs()).sum::<f64>() / 2.0
}

/// Real 3-vector inside the unit ball.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub const ZERO: BlochVector = BlochVector { x: 0.0, y: 0.0, z: 0.0 };

    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let v = BlochVector { x, y, z };
        if !(x.is_finite() && y.is_finite() && z.is_finite()) || v.norm() > 1.0 + STATE_TOL {
            return Err(Error::invalid(format!("Bloch vector ({x}, {y}, {z}) outside the unit ball")));
        }
        Ok(v)
    }

    /// Rescales onto the unit sphere if roundoff pushed the vector just outside.
    pub(crate) fn clamped(x: f64, y: f64, z: f64) -> Self {
        let v = Vector3::new(x, y, z);
        let n = v.norm();
        let v = if n > 1.0 { v / n } else { v };
        BlochVector { x: v.x, y: v.y, z: v.z }
    }

    pub fn from_vector(v: &Vector3<f64>) -> Result<Self> {
        Self::new(v.x, v.y, v.z)
    }

    pub fn to_vector(&self) -> Vector3<f64> {
        Vector3::new(self.x, self.y, self.z)
    }

    pub fn norm(&self) -> f64 {
        self.to_vector().norm()
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

/// Marginal Bloch vectors plus the 3x3 correlation block of a two-qubit state:
/// `rho = (I⊗I + rA·σ⊗I + I⊗rB·σ + Σ beta_ij σi⊗σj) / 4`.
#[derive(Clone, Debug, PartialEq)]
pub struct FanoForm {
    pub r_a: BlochVector,
    pub r_b: BlochVector,
    pub beta: Matrix3<f64>,
}

impl FanoForm {
    pub fn new(r_a: BlochVector, r_b: BlochVector, beta: Matrix3<f64>) -> Result<Self> {
        let largest = beta.singular_values().max();
        if largest > 1.0 + 1e-9 {
            return Err(Error::invalid(format!("correlation block singular value {largest} exceeds 1")));
        }
        Ok(FanoForm { r_a, r_b, beta })
    }

    pub fn zero() -> Self {
        FanoForm { r_a: BlochVector::ZERO, r_b: BlochVector::ZERO, beta: Matrix3::zeros() }
    }
}

pub fn fano_decompose(rho: &TwoQubitState) -> FanoForm {
    let s = paulis();
    let id = Op2::identity();
    let r_a = BlochVector::clamped(
        rho.expectation(&tensor(&s[1], &id)),
        rho.expectation(&tensor(&s[2], &id)),
        rho.expectation(&tensor(&s[3], &id)),
    );
    let r_b = BlochVector::clamped(
        rho.expectation(&tensor(&id, &s[1])),
        rho.expectation(&tensor(&id, &s[2])),
        rho.expectation(&tensor(&id, &s[3])),
    );
    let beta = Matrix3::from_fn(|i, j| rho.expectation(&tensor(&s[i + 1], &s[j + 1])));
    FanoForm { r_a, r_b, beta }
}

pub fn fano_compose(f: &FanoForm) -> Result<TwoQubitState> {
    let s = paulis();
    let id = Op2::identity();
    let ra = f.r_a.as_array();
    let rb = f.r_b.as_array();
    let mut m = Op4::identity();
    for i in 0..3 {
        m += tensor(&s[i + 1], &id) * c(ra[i]);
        m += tensor(&id, &s[i + 1]) * c(rb[i]);
        for j in 0..3 {
            m += tensor(&s[i + 1], &s[j + 1]) * c(f.beta[(i, j)]);
        }
    }
    TwoQubitState::new(m * c(0.25))
}
