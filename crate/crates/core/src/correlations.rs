//! Correlation quantifiers for two-qubit states: mutual information,
//! classical correlation and discord, tangle, the Pauli correlation matrix and
//! its rank, and the rank predictor for correlated dephasing.

use nalgebra::{Matrix3, Matrix4, Vector3};
use serde::Serialize;

use crate::channels::RotationAxis;
use crate::densop::{
    c, fano_decompose, hermitian_eigen, paulis, partial_trace, partial_trace_op,
    qubit_entropy_from_bloch_length, sigma_dot, sigma_y, tensor, von_neumann_entropy,
    BlochVector, FanoForm, Op2, QubitState, Side, TwoQubitState, NEGATIVE_EIGENVALUE_LIMIT,
};
use crate::error::{Error, Result};

/// Default relative tolerance for counting singular values of ideal states.
pub const DEFAULT_RANK_TOLERANCE: f64 = 1e-7;

/// `I = S(ρA) + S(ρB) - S(ρAB)` in bits.
pub fn mutual_information(rho: &TwoQubitState) -> Result<f64> {
    let sa = von_neumann_entropy(&partial_trace(rho, Side::A))?;
    let sb = von_neumann_entropy(&partial_trace(rho, Side::B))?;
    let sab = von_neumann_entropy(rho)?;
    Ok(sa + sb - sab)
}

/// Outcomes of the projective measurement `(I ± a·σ)/2` on `side`, each with
/// the post-measurement state of the other qubit.
pub fn conditional_ensemble(
    rho: &TwoQubitState,
    side: Side,
    axis: &BlochVector,
) -> Result<[(f64, QubitState); 2]> {
    if (axis.norm() - 1.0).abs() > 1e-9 {
        return Err(Error::invalid(format!("measurement axis has norm {}", axis.norm())));
    }
    let id = Op2::identity();
    let a_sigma = sigma_dot(&axis.to_vector());
    let outcome = |sign: f64| {
        let local = (id + a_sigma * c(sign)) * c(0.5);
        let proj = match side {
            Side::A => tensor(&local, &id),
            Side::B => tensor(&id, &local),
        };
        let unnormalised = partial_trace_op(&(proj * rho.matrix() * proj), side.other());
        let p = unnormalised.trace().re.max(0.0);
        if p < 1e-12 {
            (0.0, QubitState::maximally_mixed())
        } else {
            (p, QubitState::from_raw(unnormalised * c(1.0 / p)))
        }
    };
    Ok([outcome(1.0), outcome(-1.0)])
}

/// Settings for the deterministic measurement-axis search.
#[derive(Clone, Debug, PartialEq, Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OptimizerSettings {
    /// Number of Fibonacci-sphere axes in the coarse stage.
    pub grid_points: usize,
    /// Pattern search stops once its step drops below this (radians).
    pub axis_tolerance: f64,
    /// How many of the best grid axes are refined.
    pub refine_starts: usize,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        OptimizerSettings { grid_points: 312, axis_tolerance: 1e-4, refine_starts: 6 }
    }
}

impl OptimizerSettings {
    pub fn validate(&self) -> Result<()> {
        if self.grid_points < 8 {
            return Err(Error::invalid("optimizer needs at least 8 grid points"));
        }
        if !(self.axis_tolerance > 0.0 && self.axis_tolerance < 0.1) {
            return Err(Error::invalid(format!("axis tolerance {} outside (0, 0.1)", self.axis_tolerance)));
        }
        if self.refine_starts == 0 || self.refine_starts > self.grid_points {
            return Err(Error::invalid("refine_starts must be in 1..=grid_points"));
        }
        Ok(())
    }
}

/// Quasi-uniform axes on the unit sphere (golden-angle spiral).
pub fn fibonacci_sphere(n: usize) -> Vec<Vector3<f64>> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
            let radius = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * i as f64;
            Vector3::new(radius * phi.cos(), radius * phi.sin(), z)
        })
        .collect()
}

/// Post-measurement conditional entropy of the unmeasured qubit, computed
/// directly from the Fano form.
struct ConditionalEntropy {
    measured: Vector3<f64>,
    other: Vector3<f64>,
    /// Maps a measurement axis to the correlation part of the conditional Bloch vector.
    coupling: Matrix3<f64>,
}

impl ConditionalEntropy {
    fn new(f: &FanoForm, side: Side) -> Self {
        match side {
            Side::A => ConditionalEntropy {
                measured: f.r_a.to_vector(),
                other: f.r_b.to_vector(),
                coupling: f.beta.transpose(),
            },
            Side::B => ConditionalEntropy {
                measured: f.r_b.to_vector(),
                other: f.r_a.to_vector(),
                coupling: f.beta,
            },
        }
    }

    fn eval(&self, axis: &Vector3<f64>) -> f64 {
        let shift = self.coupling * axis;
        let bias = axis.dot(&self.measured);
        [1.0, -1.0]
            .iter()
            .map(|&s| {
                let weight = 1.0 + s * bias;
                let p = weight / 2.0;
                if p < 1e-12 {
                    0.0
                } else {
                    let bloch = (self.other + shift * s) / weight;
                    p * qubit_entropy_from_bloch_length(bloch.norm())
                }
            })
            .sum()
    }
}

fn canonical_axis(v: &Vector3<f64>) -> Vector3<f64> {
    let v = v.normalize();
    let first = v.iter().copied().find(|x| x.abs() > 1e-9).unwrap_or(0.0);
    if first < 0.0 {
        -v
    } else {
        v
    }
}

fn lexicographic_less(a: &Vector3<f64>, b: &Vector3<f64>) -> bool {
    for i in 0..3 {
        if a[i] < b[i] {
            return true;
        }
        if a[i] > b[i] {
            return false;
        }
    }
    false
}

fn tangent_basis(a: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let helper = if a.x.abs() < 0.9 { Vector3::x() } else { Vector3::y() };
    let t1 = a.cross(&helper).normalize();
    let t2 = a.cross(&t1);
    (t1, t2)
}

/// Minimises the conditional entropy over measurement axes.
fn minimise_conditional_entropy(
    objective: &ConditionalEntropy,
    settings: &OptimizerSettings,
) -> (f64, Vector3<f64>) {
    let grid = fibonacci_sphere(settings.grid_points);
    let mut scored: Vec<(f64, usize)> = grid.iter().enumerate().map(|(i, a)| (objective.eval(a), i)).collect();
    scored.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));

    let initial_step = (4.0 * std::f64::consts::PI / settings.grid_points as f64).sqrt();
    let mut candidates = Vec::with_capacity(settings.refine_starts);
    for &(value, index) in scored.iter().take(settings.refine_starts) {
        let mut axis = grid[index];
        let mut best = value;
        let mut step = initial_step;
        while step >= settings.axis_tolerance {
            let (t1, t2) = tangent_basis(&axis);
            let mut improved = false;
            for dir in [t1, -t1, t2, -t2, t1 + t2, t1 - t2, -t1 + t2, -t1 - t2] {
                let trial = (axis + dir * step).normalize();
                let v = objective.eval(&trial);
                if v < best {
                    best = v;
                    axis = trial;
                    improved = true;
                    break;
                }
            }
            if !improved {
                step /= 2.0;
            }
        }
        candidates.push((best, canonical_axis(&axis)));
    }

    let min = candidates.iter().map(|c| c.0).fold(f64::INFINITY, f64::min);
    let mut chosen = candidates[0];
    let mut have = false;
    for cand in candidates {
        if cand.0 <= min + 1e-9 && (!have || lexicographic_less(&cand.1, &chosen.1)) {
            chosen = cand;
            have = true;
        }
    }
    chosen
}

/// `J = S(ρ_other) - min_a Σ p_i S(ρ_other|i)` for von Neumann measurements on
/// `side`, with the optimal axis.
pub fn classical_correlation(rho: &TwoQubitState, side: Side) -> Result<(f64, BlochVector)> {
    classical_correlation_with(rho, side, &OptimizerSettings::default())
}

pub fn classical_correlation_with(
    rho: &TwoQubitState,
    side: Side,
    settings: &OptimizerSettings,
) -> Result<(f64, BlochVector)> {
    settings.validate()?;
    let f = fano_decompose(rho);
    let s_other = von_neumann_entropy(&partial_trace(rho, side.other()))?;
    let objective = ConditionalEntropy::new(&f, side);
    let (conditional, axis) = minimise_conditional_entropy(&objective, settings);
    Ok((s_other - conditional, BlochVector::clamped(axis.x, axis.y, axis.z)))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiscordResult {
    pub value: f64,
    pub measured_side: Side,
    pub optimal_axis: BlochVector,
    pub mutual_information: f64,
    pub classical_correlation: f64,
}

/// Quantum discord `D = I - J` with measurements on `side`.
pub fn discord(rho: &TwoQubitState, side: Side) -> Result<DiscordResult> {
    discord_with(rho, side, &OptimizerSettings::default())
}

pub fn discord_with(rho: &TwoQubitState, side: Side, settings: &OptimizerSettings) -> Result<DiscordResult> {
    let mi = mutual_information(rho)?;
    let (j, axis) = classical_correlation_with(rho, side, settings)?;
    let raw = mi - j;
    if raw < -1e-9 {
        return Err(Error::InternalInconsistency(format!(
            "classical correlation {j} exceeds mutual information {mi}"
        )));
    }
    Ok(DiscordResult {
        value: raw.max(0.0),
        measured_side: side,
        optimal_axis: axis,
        mutual_information: mi,
        classical_correlation: mi - raw.max(0.0),
    })
}

/// Squared concurrence.
pub fn tangle(rho: &TwoQubitState) -> Result<f64> {
    Ok(concurrence(rho)?.powi(2))
}

/// Wootters concurrence. With `ρ = Σ |w_i><w_i|` (`w_i = √λ_i v_i`), the
/// values `λ_i` are the singular values of `τ_ij = <w_i| σy⊗σy |w_j*>`.
pub fn concurrence(rho: &TwoQubitState) -> Result<f64> {
    let yy = tensor(&sigma_y(), &sigma_y());
    let (values, vectors) = hermitian_eigen(rho.matrix());
    let mut weighted = vectors;
    for (k, &v) in values.iter().enumerate() {
        if v < NEGATIVE_EIGENVALUE_LIMIT {
            return Err(Error::not_a_state(format!("eigenvalue {v:e} is negative")));
        }
        let scale = c(v.max(0.0).sqrt());
        for r in 0..4 {
            weighted[(r, k)] *= scale;
        }
    }
    let tau = weighted.transpose() * yy * weighted;
    let s = sorted_singular_values::<4>(tau.singular_values().iter().copied());
    Ok((s[0] - s[1] - s[2] - s[3]).max(0.0))
}

/// Pauli-basis expectation values `m_ij = Tr[ρ σi⊗σj]`, i,j over {I, σx, σy, σz}.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorrelationMatrix {
    pub m: Matrix4<f64>,
    /// Descending.
    pub singular_values: [f64; 4],
}

fn sorted_singular_values<const N: usize>(values: impl Iterator<Item = f64>) -> [f64; N] {
    let mut out = [0.0; N];
    for (slot, v) in out.iter_mut().zip(values) {
        *slot = v.max(0.0);
    }
    out.sort_by(|a, b| b.total_cmp(a));
    out
}

pub fn correlation_matrix(rho: &TwoQubitState) -> CorrelationMatrix {
    let s = paulis();
    let m = Matrix4::from_fn(|i, j| rho.expectation(&tensor(&s[i], &s[j])));
    let singular_values = sorted_singular_values(m.singular_values().iter().copied());
    CorrelationMatrix { m, singular_values }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RankReport {
    pub singular_values: [f64; 4],
    pub rank: usize,
    pub tolerance: f64,
    #[serde(skip)]
    pub beta_rank_inputs: FanoForm,
    /// Singular values of `beta - rA⊗rB`, descending.
    pub reduced_singular_values: [f64; 3],
}

/// Number of correlation-matrix singular values above `tolerance` times the
/// largest, cross-checked against `1 + rk(beta - rA⊗rB)`.
pub fn correlation_rank(rho: &TwoQubitState, tolerance: f64) -> Result<RankReport> {
    if !(tolerance > 0.0 && tolerance < 0.5) {
        return Err(Error::invalid(format!("rank tolerance {tolerance} outside (0, 0.5)")));
    }
    let cm = correlation_matrix(rho);
    let threshold = tolerance * cm.singular_values[0];
    let rank = cm.singular_values.iter().filter(|&&s| s > threshold).count();

    let f = fano_decompose(rho);
    let reduced = f.beta - f.r_a.to_vector() * f.r_b.to_vector().transpose();
    let reduced_singular_values: [f64; 3] = sorted_singular_values(reduced.singular_values().iter().copied());
    let reduced_rank = 1 + reduced_singular_values.iter().filter(|&&s| s > threshold).count();
    if reduced_rank != rank {
        return Err(Error::InternalInconsistency(format!(
            "correlation rank {rank} disagrees with 1 + rk(beta - rA rB^T) = {reduced_rank} \
             (singular values {:?} vs {:?})",
            cm.singular_values, reduced_singular_values
        )));
    }
    Ok(RankReport {
        singular_values: cm.singular_values,
        rank,
        tolerance,
        beta_rank_inputs: f,
        reduced_singular_values,
    })
}

/// How a rotation axis sits relative to a unit vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Alignment {
    Parallel,
    Orthogonal,
    Oblique,
}

const ALIGNMENT_TOL: f64 = 1e-9;
const CLASS_TOL: f64 = 1e-9;

pub fn alignment(n: &RotationAxis, u: &Vector3<f64>) -> Alignment {
    let d = n.vector().dot(u).abs();
    if d >= 1.0 - ALIGNMENT_TOL {
        Alignment::Parallel
    } else if d <= ALIGNMENT_TOL {
        Alignment::Orthogonal
    } else {
        Alignment::Oblique
    }
}

/// Correlation rank after correlated dephasing, keyed by the alignment of the
/// axis with the left (`v`) and right (`w`) singular vectors of `beta`.
pub fn rank_table(v: Alignment, w: Alignment) -> usize {
    use Alignment::*;
    match (v, w) {
        (Parallel, Parallel) => 2,
        (Parallel, Orthogonal) => 1,
        (Parallel, Oblique) => 2,
        (Orthogonal, Parallel) => 1,
        (Orthogonal, Orthogonal) => 3,
        (Orthogonal, Oblique) => 3,
        (Oblique, Parallel) => 2,
        (Oblique, Orthogonal) => 3,
        (Oblique, Oblique) => 4,
    }
}

/// State classes covered by the dephasing rank predictor.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum DephasingClass {
    Product,
    /// Rank 2 with maximally mixed marginals; holds the singular vectors of beta.
    CorrelatedMixedMarginals { v: Vector3<f64>, w: Vector3<f64> },
}

pub fn classify_for_dephasing(f: &FanoForm) -> Result<DephasingClass> {
    let ra = f.r_a.to_vector();
    let rb = f.r_b.to_vector();
    let reduced = f.beta - ra * rb.transpose();
    if reduced.singular_values().max() <= CLASS_TOL {
        return Ok(DephasingClass::Product);
    }
    if ra.norm() < CLASS_TOL && rb.norm() < CLASS_TOL {
        let svd = f.beta.svd(true, true);
        let (u, v_t) = (svd.u.expect("u requested"), svd.v_t.expect("v_t requested"));
        let mut order = [0usize, 1, 2];
        order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
        let significant = svd.singular_values.iter().filter(|&&s| s > CLASS_TOL).count();
        if significant == 1 {
            let top = order[0];
            return Ok(DephasingClass::CorrelatedMixedMarginals {
                v: u.column(top).into_owned(),
                w: v_t.row(top).transpose(),
            });
        }
    }
    Err(Error::UnsupportedStateClass(
        "rank prediction covers product states and rank-2 states with maximally mixed marginals".into(),
    ))
}

/// Predicted correlation rank after complete correlated dephasing about `n`.
pub fn predict_dephasing_rank(f: &FanoForm, n: &RotationAxis) -> Result<usize> {
    match classify_for_dephasing(f)? {
        DephasingClass::Product => {
            let along = |r: &BlochVector| {
                let len = r.norm();
                len < CLASS_TOL || (n.vector().dot(&r.to_vector()).abs() / len) >= (1e-6f64).cos()
            };
            if along(&f.r_a) || along(&f.r_b) {
                Ok(1)
            } else {
                Ok(3)
            }
        }
        DephasingClass::CorrelatedMixedMarginals { v, w } => Ok(rank_table(alignment(n, &v), alignment(n, &w))),
    }
}
