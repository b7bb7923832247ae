//! Random states, unitaries and channels for randomized validation.

use nalgebra::{DMatrix, Vector3};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal, UnitSphere};

use serde::Serialize;

use crate::channels::{KrausChannel, RotationAxis};
use crate::correlations::Alignment;
use crate::densop::{c, fano_compose, hermitian_part, BlochVector, DensityOperator, FanoForm, Op, Op2, TwoQubitState};

fn gaussian_complex<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
}

/// Ginibre-distributed mixed state of full rank (almost surely).
pub fn random_state<const N: usize, R: Rng + ?Sized>(rng: &mut R) -> DensityOperator<N> {
    let g = Op::<N>::from_fn(|_, _| gaussian_complex(rng));
    let m = g * g.adjoint();
    let tr = m.trace();
    DensityOperator::from_raw(hermitian_part(&(m / tr)))
}

pub fn random_two_qubit_state<R: Rng + ?Sized>(rng: &mut R) -> TwoQubitState {
    random_state::<4, R>(rng)
}

/// Haar-random unitary via QR of a Ginibre matrix with phase correction.
pub fn random_unitary<const N: usize, R: Rng + ?Sized>(rng: &mut R) -> Op<N> {
    let g = DMatrix::from_fn(N, N, |_, _| gaussian_complex(rng));
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    Op::<N>::from_fn(|i, j| {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { c(1.0) };
        q[(i, j)] * phase
    })
}

/// Random single-qubit channel with `kraus_rank` operators, from a random isometry.
pub fn random_qubit_channel<R: Rng + ?Sized>(rng: &mut R, kraus_rank: usize) -> KrausChannel<2> {
    let rows = 2 * kraus_rank.max(1);
    let g = DMatrix::from_fn(rows, 2, |_, _| gaussian_complex(rng));
    let q = g.qr().q();
    let operators = (0..kraus_rank.max(1))
        .map(|k| Op2::from_fn(|i, j| q[(2 * k + i, j)]))
        .collect();
    KrausChannel::new(operators).expect("isometry blocks are complete")
}

pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R) -> Vector3<f64> {
    let v: [f64; 3] = UnitSphere.sample(rng);
    Vector3::from(v)
}

pub fn random_axis<R: Rng + ?Sized>(rng: &mut R) -> RotationAxis {
    RotationAxis::along(&random_unit_vector(rng)).expect("unit sample")
}

/// A randomized validation case for the dephasing rank predictor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum RankCase {
    /// Rank-2 state with maximally mixed marginals; the axis sits at the given
    /// alignments to the left and right singular vectors of beta.
    Cell(Alignment, Alignment),
    /// Product state whose first Bloch vector is along the axis.
    ProductAlongA,
    /// Product state whose second Bloch vector is along the axis.
    ProductAlongB,
    /// Product state with neither Bloch vector along the axis.
    ProductGeneric,
}

impl RankCase {
    pub fn all() -> Vec<RankCase> {
        use Alignment::*;
        let mut cases = Vec::new();
        for v in [Parallel, Orthogonal, Oblique] {
            for w in [Parallel, Orthogonal, Oblique] {
                cases.push(RankCase::Cell(v, w));
            }
        }
        cases.extend([RankCase::ProductAlongA, RankCase::ProductAlongB, RankCase::ProductGeneric]);
        cases
    }

    pub fn label(&self) -> String {
        match self {
            RankCase::Cell(v, w) => format!("{v:?}/{w:?}").to_lowercase(),
            RankCase::ProductAlongA => "product/along_a".into(),
            RankCase::ProductAlongB => "product/along_b".into(),
            RankCase::ProductGeneric => "product/generic".into(),
        }
    }
}

fn orthogonal_unit<R: Rng + ?Sized>(rng: &mut R, n: &Vector3<f64>) -> Vector3<f64> {
    loop {
        let u = random_unit_vector(rng);
        let t = u - n * n.dot(&u);
        if t.norm() > 0.1 {
            return t.normalize();
        }
    }
}

fn oblique_unit<R: Rng + ?Sized>(rng: &mut R, n: &Vector3<f64>) -> Vector3<f64> {
    loop {
        let u = random_unit_vector(rng);
        let d = n.dot(&u).abs();
        if d > 0.05 && d < 0.95 {
            return u;
        }
    }
}

fn aligned_unit<R: Rng + ?Sized>(rng: &mut R, n: &Vector3<f64>, a: Alignment) -> Vector3<f64> {
    match a {
        Alignment::Parallel => {
            if rng.gen_bool(0.5) {
                *n
            } else {
                -n
            }
        }
        Alignment::Orthogonal => orthogonal_unit(rng, n),
        Alignment::Oblique => oblique_unit(rng, n),
    }
}

fn random_bloch<R: Rng + ?Sized>(rng: &mut R, direction: &Vector3<f64>) -> BlochVector {
    let len = rng.gen_range(0.1..=1.0);
    BlochVector::from_vector(&(direction * len)).expect("length at most one")
}

/// Draws a state and a dephasing axis realising `case`.
pub fn random_rank_case<R: Rng + ?Sized>(rng: &mut R, case: RankCase) -> (TwoQubitState, RotationAxis) {
    let axis = random_axis(rng);
    let n = *axis.vector();
    let fano = match case {
        RankCase::Cell(va, wa) => {
            let v = aligned_unit(rng, &n, va);
            let w = aligned_unit(rng, &n, wa);
            let strength = rng.gen_range(0.1..=1.0);
            FanoForm::new(BlochVector::ZERO, BlochVector::ZERO, v * w.transpose() * strength)
                .expect("singular value at most one")
        }
        RankCase::ProductAlongA | RankCase::ProductAlongB | RankCase::ProductGeneric => {
            let along = aligned_unit(rng, &n, Alignment::Parallel);
            let (da, db) = match case {
                RankCase::ProductAlongA => (along, random_unit_vector(rng)),
                RankCase::ProductAlongB => (random_unit_vector(rng), along),
                _ => (oblique_unit(rng, &n), oblique_unit(rng, &n)),
            };
            let (ra, rb) = (random_bloch(rng, &da), random_bloch(rng, &db));
            let beta = ra.to_vector() * rb.to_vector().transpose();
            FanoForm::new(ra, rb, beta).expect("product of Bloch vectors")
        }
    };
    (fano_compose(&fano).expect("valid by construction"), axis)
}
