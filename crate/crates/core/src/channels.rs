//! Kraus channels, gates, the noise processes acting on the qubit pair, and
//! ideal preparation of every scenario state.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::str::FromStr;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::densop::{
    c, ket0, ket1, ket_minus, ket_plus, projector, sigma_dot, sigma_x, sigma_y, tensor, tensor_ket,
    DensityOperator, Op, Op2, Op4, Side, TwoQubitState, I_UNIT,
};
use crate::error::{Error, Result};

const COMPLETENESS_TOL: f64 = 1e-10;

/// A completely positive trace-preserving map given by its Kraus operators.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausChannel<const N: usize> {
    operators: Vec<Op<N>>,
}

impl<const N: usize> KrausChannel<N> {
    pub fn new(operators: Vec<Op<N>>) -> Result<Self> {
        if operators.is_empty() {
            return Err(Error::invalid("Kraus channel needs at least one operator"));
        }
        let sum: Op<N> = operators.iter().map(|k| k.adjoint() * k).sum();
        let dev = (sum - Op::<N>::identity()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if dev > COMPLETENESS_TOL {
            return Err(Error::invalid(format!("Kraus operators violate completeness by {dev:e}")));
        }
        Ok(KrausChannel { operators })
    }

    pub fn identity() -> Self {
        KrausChannel { operators: vec![Op::<N>::identity()] }
    }

    pub fn unitary(u: Op<N>) -> Result<Self> {
        Self::new(vec![u])
    }

    pub fn operators(&self) -> &[Op<N>] {
        &self.operators
    }

    pub fn dim(&self) -> usize {
        N
    }

    pub fn apply(&self, rho: &DensityOperator<N>) -> DensityOperator<N> {
        apply_raw(&self.operators, rho.matrix())
    }

    /// `other ∘ self`: first `self`, then `other`.
    pub fn then(&self, other: &Self) -> Self {
        let operators = other
            .operators
            .iter()
            .flat_map(|outer| self.operators.iter().map(move |inner| outer * inner))
            .collect();
        KrausChannel { operators }
    }
}

fn apply_raw<const N: usize>(operators: &[Op<N>], m: &Op<N>) -> DensityOperator<N> {
    let out: Op<N> = operators.iter().map(|k| k * m * k.adjoint()).sum();
    DensityOperator::from_raw(out)
}

pub fn apply_channel<const N: usize>(ch: &KrausChannel<N>, rho: &DensityOperator<N>) -> DensityOperator<N> {
    ch.apply(rho)
}

/// Decay `|1> -> |0>` with probability `p`.
pub fn amplitude_damping(p: f64) -> Result<KrausChannel<2>> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!("damping probability {p} outside [0,1]")));
    }
    let e0 = Op2::new(c(1.0), c(0.0), c(0.0), c((1.0 - p).sqrt()));
    let e1 = Op2::new(c(0.0), c(p.sqrt()), c(0.0), c(0.0));
    KrausChannel::new(vec![e0, e1])
}

/// Lifts a single-qubit channel to the pair, acting only on `which`.
pub fn on_qubit(ch: &KrausChannel<2>, which: Side) -> KrausChannel<4> {
    let id = Op2::identity();
    let operators = ch
        .operators()
        .iter()
        .map(|k| match which {
            Side::A => tensor(k, &id),
            Side::B => tensor(&id, k),
        })
        .collect();
    KrausChannel { operators }
}

/// `chA ⊗ chB`.
pub fn bilocal(a: &KrausChannel<2>, b: &KrausChannel<2>) -> KrausChannel<4> {
    let operators = a
        .operators()
        .iter()
        .flat_map(|ka| b.operators().iter().map(move |kb| tensor(ka, kb)))
        .collect();
    KrausChannel { operators }
}

/// Unit rotation axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct RotationAxis(Vector3<f64>);

impl RotationAxis {
    pub const X: RotationAxis = RotationAxis(Vector3::new(1.0, 0.0, 0.0));
    pub const Y: RotationAxis = RotationAxis(Vector3::new(0.0, 1.0, 0.0));
    pub const Z: RotationAxis = RotationAxis(Vector3::new(0.0, 0.0, 1.0));

    /// Accepts a vector of unit length (within 1e-9) and renormalises it.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let v = Vector3::new(x, y, z);
        let n = v.norm();
        if !n.is_finite() || (n - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(format!("rotation axis ({x}, {y}, {z}) is not unit length")));
        }
        Ok(RotationAxis(v / n))
    }

    /// Normalises any nonzero vector.
    pub fn along(v: &Vector3<f64>) -> Result<Self> {
        let n = v.norm();
        if !n.is_finite() || n < 1e-12 {
            return Err(Error::invalid("rotation axis must be nonzero"));
        }
        Ok(RotationAxis(v / n))
    }

    pub fn vector(&self) -> &Vector3<f64> {
        &self.0
    }
}

impl TryFrom<[f64; 3]> for RotationAxis {
    type Error = Error;

    fn try_from(v: [f64; 3]) -> Result<Self> {
        RotationAxis::along(&Vector3::from(v))
    }
}

impl From<RotationAxis> for [f64; 3] {
    fn from(n: RotationAxis) -> Self {
        [n.0.x, n.0.y, n.0.z]
    }
}

/// `exp(-i theta n·σ / 2) = cos(θ/2) I - i sin(θ/2) n·σ`.
pub fn rotation(n: &RotationAxis, theta: f64) -> Op2 {
    Op2::identity() * c((theta / 2.0).cos()) - sigma_dot(n.vector()) * (I_UNIT * (theta / 2.0).sin())
}

/// The same rotation on both qubits, `R_n(θ) ⊗ R_n(θ)`.
pub fn correlated_rotation(n: &RotationAxis, theta: f64) -> Op4 {
    let r = rotation(n, theta);
    tensor(&r, &r)
}

/// Complete correlated dephasing about `n`: the uniform average over θ of
/// `K_n(θ) ρ K_n(θ)†`, in closed Kraus form.
pub fn correlated_dephasing(n: &RotationAxis) -> KrausChannel<4> {
    let id = Op2::identity();
    let ns = sigma_dot(n.vector());
    let nn = tensor(&ns, &ns);
    let ii = Op4::identity();
    let k1 = (nn - ii) * c(FRAC_1_SQRT_2);
    let k2 = (ii + nn) * c(FRAC_1_SQRT_2);
    let k3 = (tensor(&ns, &id) + tensor(&id, &ns)) * c(FRAC_1_SQRT_2);
    let operators = vec![k1 * c(FRAC_1_SQRT_2), k2 * c(0.5), k3 * c(0.5)];
    KrausChannel { operators }
}

/// Riemann-sum version of correlated dephasing over `steps` equally spaced angles.
#[derive(Clone, Debug)]
pub struct AveragedDephasing {
    rotations: Vec<Op4>,
}

pub fn correlated_dephasing_averaged(n: &RotationAxis, steps: usize) -> Result<AveragedDephasing> {
    if steps < 4 {
        return Err(Error::invalid(format!("averaged dephasing needs at least 4 steps, got {steps}")));
    }
    let rotations = (0..steps)
        .map(|k| correlated_rotation(n, 2.0 * PI * k as f64 / steps as f64))
        .collect();
    Ok(AveragedDephasing { rotations })
}

impl AveragedDephasing {
    pub fn steps(&self) -> usize {
        self.rotations.len()
    }

    pub fn apply(&self, rho: &TwoQubitState) -> TwoQubitState {
        let m = rho.matrix();
        let sum: Op4 = self.rotations.iter().map(|k| k * m * k.adjoint()).sum();
        TwoQubitState::from_raw(sum * c(1.0 / self.rotations.len() as f64))
    }
}

#[derive(Clone, Debug)]
pub struct SeparableTerm {
    pub probability: f64,
    pub channel_a: KrausChannel<2>,
    pub channel_b: KrausChannel<2>,
}

/// Probabilistic mixture of bilocal channels `Σ p_i ε_i^A ⊗ ε_i^B`.
#[derive(Clone, Debug)]
pub struct SeparableChannel {
    terms: Vec<SeparableTerm>,
}

impl SeparableChannel {
    pub fn new(terms: Vec<SeparableTerm>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::invalid("separable channel needs at least one term"));
        }
        if let Some(t) = terms.iter().find(|t| t.probability.is_nan() || t.probability < 0.0) {
            return Err(Error::invalid(format!("negative term probability {}", t.probability)));
        }
        let total: f64 = terms.iter().map(|t| t.probability).sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::invalid(format!("term probabilities sum to {total}")));
        }
        Ok(SeparableChannel { terms })
    }

    /// Equal-weight mixture of `steps` identical rotations on both qubits.
    pub fn correlated_rotations(n: &RotationAxis, steps: usize) -> Result<Self> {
        if steps == 0 {
            return Err(Error::invalid("need at least one rotation angle"));
        }
        let terms = (0..steps)
            .map(|k| {
                let r = KrausChannel::unitary(rotation(n, 2.0 * PI * k as f64 / steps as f64))?;
                Ok(SeparableTerm { probability: 1.0 / steps as f64, channel_a: r.clone(), channel_b: r })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(terms)
    }

    pub fn terms(&self) -> &[SeparableTerm] {
        &self.terms
    }
}

pub fn apply_separable(ch: &SeparableChannel, rho: &TwoQubitState) -> TwoQubitState {
    let m = rho.matrix();
    let mut out = Op4::zeros();
    for term in ch.terms() {
        let local = bilocal(&term.channel_a, &term.channel_b);
        let applied: Op4 = local.operators().iter().map(|k| k * m * k.adjoint()).sum();
        out += applied * c(term.probability);
    }
    TwoQubitState::from_raw(out)
}

/// Mølmer–Sørensen interaction `exp(-i θ σx⊗σx)`.
pub fn ms_gate(theta: f64) -> Op4 {
    let xx = tensor(&sigma_x(), &sigma_x());
    Op4::identity() * c(theta.cos()) - xx * (I_UNIT * theta.sin())
}

/// `exp(-i θ σj⊗σj)` with `σj = (σx + σy)/√2`.
pub fn ms2_gate(theta: f64) -> Op4 {
    let sj = (sigma_x() + sigma_y()) * c(FRAC_1_SQRT_2);
    let jj = tensor(&sj, &sj);
    Op4::identity() * c(theta.cos()) - jj * (I_UNIT * theta.sin())
}

/// Ideal scenario states.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "id", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateSpec {
    /// Equal mixture of `|++>` and `|-->`.
    Rho1,
    /// `rho1` after the correlated rotation `K_y(π/8)`.
    Rho2,
    PlusPlus,
    Werner { p: f64 },
    /// `p |00><00| + (1-p) I/4`.
    WernerInput { p: f64 },
    BellPhiPlus,
}

impl StateSpec {
    pub const IDS: [&'static str; 6] = ["rho1", "rho2", "plus_plus", "werner", "werner_input", "bell_phi_plus"];

    pub fn parse(id: &str, p: Option<f64>) -> Result<Self> {
        let need_p = || p.ok_or_else(|| Error::invalid(format!("state '{id}' needs a parameter p")));
        match id {
            "rho1" => Ok(StateSpec::Rho1),
            "rho2" => Ok(StateSpec::Rho2),
            "plus_plus" => Ok(StateSpec::PlusPlus),
            "werner" => Ok(StateSpec::Werner { p: need_p()? }),
            "werner_input" => Ok(StateSpec::WernerInput { p: need_p()? }),
            "bell_phi_plus" => Ok(StateSpec::BellPhiPlus),
            other => Err(Error::invalid(format!(
                "unknown state id '{other}' (expected one of {})",
                Self::IDS.join(", ")
            ))),
        }
    }

    pub fn id(&self) -> &'static str {
        match self {
            StateSpec::Rho1 => "rho1",
            StateSpec::Rho2 => "rho2",
            StateSpec::PlusPlus => "plus_plus",
            StateSpec::Werner { .. } => "werner",
            StateSpec::WernerInput { .. } => "werner_input",
            StateSpec::BellPhiPlus => "bell_phi_plus",
        }
    }
}

impl fmt::Display for StateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateSpec::Werner { p } | StateSpec::WernerInput { p } => write!(f, "{}(p={p})", self.id()),
            _ => f.write_str(self.id()),
        }
    }
}

impl FromStr for StateSpec {
    type Err = Error;

    /// `rho1`, `werner:0.5`, ...
    fn from_str(s: &str) -> Result<Self> {
        match s.split_once(':') {
            Some((id, p)) => {
                let p: f64 = p.parse().map_err(|_| Error::invalid(format!("bad parameter in '{s}'")))?;
                StateSpec::parse(id, Some(p))
            }
            None => StateSpec::parse(s, None),
        }
    }
}

fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::invalid(format!("parameter p = {p} outside [0,1]")))
    }
}

pub fn rho1() -> TwoQubitState {
    let pp = projector(&tensor_ket(&ket_plus(), &ket_plus()));
    let mm = projector(&tensor_ket(&ket_minus(), &ket_minus()));
    TwoQubitState::from_raw((pp + mm) * c(0.5))
}

pub fn bell_phi_plus() -> TwoQubitState {
    let psi = (tensor_ket(&ket0(), &ket0()) + tensor_ket(&ket1(), &ket1())) * c(FRAC_1_SQRT_2);
    TwoQubitState::from_raw(projector(&psi))
}

pub fn prepare(spec: &StateSpec) -> Result<TwoQubitState> {
    match *spec {
        StateSpec::Rho1 => Ok(rho1()),
        StateSpec::Rho2 => Ok(rho1().conjugate(&correlated_rotation(&RotationAxis::Y, PI / 8.0))),
        StateSpec::PlusPlus => Ok(TwoQubitState::from_raw(projector(&tensor_ket(&ket_plus(), &ket_plus())))),
        StateSpec::Werner { p } => {
            check_probability(p)?;
            bell_phi_plus().mix(&TwoQubitState::maximally_mixed(), p)
        }
        StateSpec::WernerInput { p } => {
            check_probability(p)?;
            let zz = TwoQubitState::from_raw(projector(&tensor_ket(&ket0(), &ket0())));
            zz.mix(&TwoQubitState::maximally_mixed(), p)
        }
        StateSpec::BellPhiPlus => Ok(bell_phi_plus()),
    }
}

/// The Werner preparation protocol: `MS2(π/4)` applied to the classically
/// correlated input state.
pub fn werner_via_ms2(p: f64) -> Result<TwoQubitState> {
    let input = prepare(&StateSpec::WernerInput { p })?;
    Ok(input.conjugate(&ms2_gate(PI / 4.0)))
}
