//! Independent reference implementations shared by the integration tests.
//!
//! Nothing here calls the library's entropy, discord or optimizer code: the
//! discord oracle measures explicit projectors on a dense (theta, phi) grid and
//! refines the best cell by repeated zooming.

#![allow(dead_code)]

use std::f64::consts::PI;

use nalgebra::{DMatrix, Vector3};
use num_complex::Complex64;
use rand::Rng;

use qdiscord::channels::{KrausChannel, SeparableChannel, SeparableTerm};
use qdiscord::densop::{tensor, Op2, Op4, QubitState, Side, TwoQubitState};
use qdiscord::random::{random_qubit_channel, random_state, random_unitary};

fn h2(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        0.0
    } else {
        -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
    }
}

fn entropy_of_eigs(eigs: &[f64]) -> f64 {
    eigs.iter().filter(|&&l| l > 1e-300).map(|&l| -l * l.log2()).sum()
}

/// Entropy of a 2x2 Hermitian block with trace `t`, normalized by `t`.
fn qubit_block_entropy(m: &[[Complex64; 2]; 2], t: f64) -> f64 {
    if t < 1e-14 {
        return 0.0;
    }
    let half_gap = (((m[0][0].re - m[1][1].re) / 2.0).powi(2) + m[0][1].norm_sqr()).sqrt();
    h2(0.5 + half_gap / t)
}

fn matrix_entropy(m: &Op4) -> f64 {
    let d = DMatrix::from_fn(4, 4, |i, j| m[(i, j)]);
    let eig = d.symmetric_eigen();
    entropy_of_eigs(&eig.eigenvalues.iter().map(|l| l.max(0.0)).collect::<Vec<_>>())
}

/// Reduced 2x2 block of `m` keeping `keep`.
fn reduce(m: &Op4, keep: Side) -> [[Complex64; 2]; 2] {
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                out[i][j] += match keep {
                    Side::A => m[(2 * i + k, 2 * j + k)],
                    Side::B => m[(2 * k + i, 2 * k + j)],
                };
            }
        }
    }
    out
}

pub fn oracle_mutual_information(rho: &TwoQubitState) -> f64 {
    let m = rho.matrix();
    let s_a = qubit_block_entropy(&reduce(m, Side::A), 1.0);
    let s_b = qubit_block_entropy(&reduce(m, Side::B), 1.0);
    s_a + s_b - matrix_entropy(m)
}

fn projector(theta: f64, phi: f64, sign: f64) -> Op2 {
    let (x, y, z) = (theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos());
    let h = 0.5 * sign;
    Op2::new(
        Complex64::new(0.5 + h * z, 0.0),
        Complex64::new(h * x, -h * y),
        Complex64::new(h * x, h * y),
        Complex64::new(0.5 - h * z, 0.0),
    )
}

/// Average entropy of the unmeasured qubit after measuring `side` along (theta, phi).
fn conditional_entropy(m: &Op4, side: Side, theta: f64, phi: f64) -> f64 {
    let id = Op2::identity();
    [1.0, -1.0]
        .iter()
        .map(|&s| {
            let p = projector(theta, phi, s);
            let proj = match side {
                Side::A => tensor(&p, &id),
                Side::B => tensor(&id, &p),
            };
            let block = reduce(&(proj * m * proj), side.other());
            let prob = block[0][0].re + block[1][1].re;
            prob * qubit_block_entropy(&block, prob)
        })
        .sum()
}

/// Brute-force discord in bits: a 100 x 100 grid over the sphere followed by
/// 40 rounds of 11 x 11 zooming around the incumbent.
pub fn oracle_discord(rho: &TwoQubitState, side: Side) -> f64 {
    let m = rho.matrix();
    let n = 100;
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for i in 0..n {
        let theta = PI * (i as f64 + 0.5) / n as f64;
        for j in 0..n {
            let phi = 2.0 * PI * j as f64 / n as f64;
            let s = conditional_entropy(m, side, theta, phi);
            if s < best.0 {
                best = (s, theta, phi);
            }
        }
    }
    let mut span = (PI / n as f64, 2.0 * PI / n as f64);
    for _ in 0..40 {
        let (_, t0, p0) = best;
        for a in -5..=5 {
            for b in -5..=5 {
                let theta = t0 + span.0 * a as f64 / 5.0;
                let phi = p0 + span.1 * b as f64 / 5.0;
                let s = conditional_entropy(m, side, theta, phi);
                if s < best.0 {
                    best = (s, theta, phi);
                }
            }
        }
        span = (span.0 * 0.5, span.1 * 0.5);
    }
    let s_other = qubit_block_entropy(&reduce(m, side.other()), 1.0);
    let j = s_other - best.0;
    oracle_mutual_information(rho) - j
}

pub fn bits_to_nats(bits: f64) -> f64 {
    bits * std::f64::consts::LN_2
}

/// `Σ p_i |ψ_i><ψ_i| ⊗ ρ_i` with orthonormal `ψ_i` on A (or mirrored onto B).
pub fn random_classical_quantum<R: Rng>(rng: &mut R, classical: Side) -> TwoQubitState {
    let u = random_unitary::<2, R>(rng);
    let p: f64 = rng.gen_range(0.0..1.0);
    let mut m = Op4::zeros();
    for (k, w) in [p, 1.0 - p].into_iter().enumerate() {
        let psi = u.column(k).into_owned();
        let proj = psi * psi.adjoint();
        let other = random_state::<2, R>(rng);
        m += match classical {
            Side::A => tensor(&proj, other.matrix()),
            Side::B => tensor(other.matrix(), &proj),
        } * Complex64::new(w, 0.0);
    }
    TwoQubitState::new(m).unwrap()
}

/// Mixture of `terms` random product states (correlation rank at most `terms`).
pub fn random_separable_mixture<R: Rng>(rng: &mut R, terms: usize) -> TwoQubitState {
    let weights: Vec<f64> = (0..terms).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = weights.iter().sum();
    let mut m = Op4::zeros();
    for w in weights {
        let a: QubitState = random_state::<2, R>(rng);
        let b: QubitState = random_state::<2, R>(rng);
        m += tensor(a.matrix(), b.matrix()) * Complex64::new(w / total, 0.0);
    }
    TwoQubitState::new(m).unwrap()
}

pub fn random_separable_channel<R: Rng>(rng: &mut R, terms: usize) -> SeparableChannel {
    let weights: Vec<f64> = (0..terms).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = weights.iter().sum();
    let terms = weights
        .into_iter()
        .map(|w| SeparableTerm {
            probability: w / total,
            channel_a: random_kraus_rank_channel(rng),
            channel_b: random_kraus_rank_channel(rng),
        })
        .collect();
    SeparableChannel::new(terms).unwrap()
}

pub fn random_local_unitary<R: Rng>(rng: &mut R) -> Op4 {
    tensor(&random_unitary::<2, R>(rng), &random_unitary::<2, R>(rng))
}

pub fn random_kraus_rank_channel<R: Rng>(rng: &mut R) -> KrausChannel<2> {
    let kraus_rank = rng.gen_range(1..=4);
    random_qubit_channel(rng, kraus_rank)
}

pub fn unit(v: [f64; 3]) -> Vector3<f64> {
    Vector3::from(v).normalize()
}
