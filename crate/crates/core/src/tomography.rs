//! Simulated finite-shot two-qubit Pauli tomography: outcome sampling,
//! maximum-likelihood reconstruction and Monte Carlo projection-noise studies.
//!
//! Every sampling routine draws from a ChaCha20 stream derived from
//! `(seed, stream)`, so results are pure functions of their inputs.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::correlations::{correlation_matrix, discord_with, tangle, OptimizerSettings};
use crate::densop::{c, fidelity, ket0, ket1, ket_minus, ket_plus, projector, tensor, Ket, Op2, Op4, Side, TwoQubitState};
use crate::error::{Error, Result};

pub const RNG_NAME: &str = "ChaCha20Rng (rand_chacha 0.3), seed_from_u64(seed), one stream per copy";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PauliBasis {
    X,
    Y,
    Z,
}

impl PauliBasis {
    pub const ALL: [PauliBasis; 3] = [PauliBasis::X, PauliBasis::Y, PauliBasis::Z];

    /// Eigenvectors for the +1 and -1 outcomes.
    pub fn eigenvectors(self) -> [Ket<2>; 2] {
        match self {
            PauliBasis::X => [ket_plus(), ket_minus()],
            PauliBasis::Y => {
                let s = std::f64::consts::FRAC_1_SQRT_2;
                [
                    Ket::<2>::new(c(s), crate::densop::I_UNIT * s),
                    Ket::<2>::new(c(s), -crate::densop::I_UNIT * s),
                ]
            }
            PauliBasis::Z => [ket0(), ket1()],
        }
    }

    fn letter(self) -> char {
        match self {
            PauliBasis::X => 'X',
            PauliBasis::Y => 'Y',
            PauliBasis::Z => 'Z',
        }
    }

    fn from_letter(ch: char) -> Result<Self> {
        match ch {
            'X' => Ok(PauliBasis::X),
            'Y' => Ok(PauliBasis::Y),
            'Z' => Ok(PauliBasis::Z),
            _ => Err(Error::Parse(format!("unknown Pauli basis '{ch}'"))),
        }
    }
}

/// Product-Pauli measurement on both qubits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MeasurementSetting {
    pub basis_a: PauliBasis,
    pub basis_b: PauliBasis,
}

impl MeasurementSetting {
    /// The nine settings in the order XX, XY, XZ, YX, ..., ZZ.
    pub fn all() -> [MeasurementSetting; 9] {
        let mut out = [MeasurementSetting { basis_a: PauliBasis::X, basis_b: PauliBasis::X }; 9];
        for (i, slot) in out.iter_mut().enumerate() {
            slot.basis_a = PauliBasis::ALL[i / 3];
            slot.basis_b = PauliBasis::ALL[i % 3];
        }
        out
    }

    pub fn index(&self) -> usize {
        3 * (self.basis_a as usize) + self.basis_b as usize
    }

    /// Projectors for the outcomes `++, +-, -+, --`.
    pub fn projectors(&self) -> [Op4; 4] {
        let ea = self.basis_a.eigenvectors();
        let eb = self.basis_b.eigenvectors();
        let p = |k: &Ket<2>| -> Op2 { projector(k) };
        [
            tensor(&p(&ea[0]), &p(&eb[0])),
            tensor(&p(&ea[0]), &p(&eb[1])),
            tensor(&p(&ea[1]), &p(&eb[0])),
            tensor(&p(&ea[1]), &p(&eb[1])),
        ]
    }
}

impl fmt::Display for MeasurementSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.basis_a.letter(), self.basis_b.letter())
    }
}

impl FromStr for MeasurementSetting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut chars = s.chars();
        match (chars.next(), chars.next(), chars.next()) {
            (Some(a), Some(b), None) => Ok(MeasurementSetting {
                basis_a: PauliBasis::from_letter(a)?,
                basis_b: PauliBasis::from_letter(b)?,
            }),
            _ => Err(Error::Parse(format!("bad measurement setting '{s}'"))),
        }
    }
}

pub const OUTCOME_LABELS: [&str; 4] = ["++", "+-", "-+", "--"];

fn all_projectors() -> [[Op4; 4]; 9] {
    MeasurementSetting::all().map(|s| s.projectors())
}

/// Born-rule probabilities of the four outcomes of `setting`.
pub fn outcome_probabilities(rho: &TwoQubitState, setting: &MeasurementSetting) -> [f64; 4] {
    setting.projectors().map(|p| rho.expectation(&p).max(0.0))
}

/// Outcome counts for all nine settings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountRecord {
    /// Indexed by [`MeasurementSetting::index`], outcomes in `OUTCOME_LABELS` order.
    pub counts: [[u64; 4]; 9],
    pub shots_per_setting: u64,
    pub seed: u64,
    pub stream: u64,
}

impl CountRecord {
    pub fn new(counts: [[u64; 4]; 9], shots_per_setting: u64, seed: u64, stream: u64) -> Result<Self> {
        if shots_per_setting == 0 {
            return Err(Error::invalid("shots per setting must be at least 1"));
        }
        for (i, row) in counts.iter().enumerate() {
            let total: u64 = row.iter().sum();
            if total != shots_per_setting {
                return Err(Error::invalid(format!(
                    "setting {} has {total} counts, expected {shots_per_setting}",
                    MeasurementSetting::all()[i]
                )));
            }
        }
        Ok(CountRecord { counts, shots_per_setting, seed, stream })
    }

    pub fn count(&self, setting: &MeasurementSetting, outcome: usize) -> u64 {
        self.counts[setting.index()][outcome]
    }

    pub fn frequencies(&self) -> Frequencies {
        let n = self.shots_per_setting as f64;
        Frequencies(self.counts.map(|row| row.map(|k| k as f64 / n)))
    }

    /// Plain-text table: header lines, then one `setting outcome count` line per cell.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str("# qdiscord count record\n");
        let _ = writeln!(out, "shots_per_setting {}", self.shots_per_setting);
        let _ = writeln!(out, "seed {}", self.seed);
        let _ = writeln!(out, "stream {}", self.stream);
        for setting in MeasurementSetting::all() {
            for (k, label) in OUTCOME_LABELS.iter().enumerate() {
                let _ = writeln!(out, "{setting} {label} {}", self.count(&setting, k));
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut shots = None;
        let mut seed = None;
        let mut stream = None;
        let mut counts = [[None::<u64>; 4]; 9];
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let bad = || Error::Parse(format!("line {}: cannot parse '{line}'", lineno + 1));
            let num = |s: &str| s.parse::<u64>().map_err(|_| bad());
            match fields.as_slice() {
                ["shots_per_setting", v] => shots = Some(num(v)?),
                ["seed", v] => seed = Some(num(v)?),
                ["stream", v] => stream = Some(num(v)?),
                [setting, outcome, v] => {
                    let setting: MeasurementSetting = setting.parse()?;
                    let k = OUTCOME_LABELS.iter().position(|l| l == outcome).ok_or_else(bad)?;
                    let slot = &mut counts[setting.index()][k];
                    if slot.is_some() {
                        return Err(Error::Parse(format!("line {}: duplicate entry {setting} {outcome}", lineno + 1)));
                    }
                    *slot = Some(num(v)?);
                }
                _ => return Err(bad()),
            }
        }
        let shots = shots.ok_or_else(|| Error::Parse("missing shots_per_setting".into()))?;
        let mut filled = [[0u64; 4]; 9];
        for (i, row) in counts.iter().enumerate() {
            for (k, v) in row.iter().enumerate() {
                filled[i][k] = v.ok_or_else(|| {
                    Error::Parse(format!("missing count for {} {}", MeasurementSetting::all()[i], OUTCOME_LABELS[k]))
                })?;
            }
        }
        CountRecord::new(filled, shots, seed.unwrap_or(0), stream.unwrap_or(0))
    }
}

/// Observed outcome frequencies per setting; each row sums to one.
#[derive(Clone, Debug, PartialEq)]
pub struct Frequencies(pub [[f64; 4]; 9]);

impl Frequencies {
    /// Exact Born probabilities, i.e. the infinite-shot limit.
    pub fn exact(rho: &TwoQubitState) -> Self {
        Frequencies(MeasurementSetting::all().map(|s| outcome_probabilities(rho, &s)))
    }

    fn validate(&self) -> Result<()> {
        for row in &self.0 {
            if row.iter().any(|f| !(f.is_finite() && *f >= 0.0)) {
                return Err(Error::invalid("frequencies must be finite and nonnegative"));
            }
            let total: f64 = row.iter().sum();
            if (total - 1.0).abs() > 1e-9 {
                return Err(Error::invalid(format!("frequency row sums to {total}")));
            }
        }
        Ok(())
    }
}

fn rng_for(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn multinomial(rng: &mut ChaCha20Rng, n: u64, probabilities: &[f64; 4]) -> [u64; 4] {
    let mut out = [0u64; 4];
    let mut remaining = n;
    let mut mass = 1.0;
    for k in 0..3 {
        if remaining == 0 {
            break;
        }
        let p = if mass > 0.0 { (probabilities[k] / mass).clamp(0.0, 1.0) } else { 0.0 };
        let draw = Binomial::new(remaining, p).expect("probability clamped to [0,1]").sample(rng);
        out[k] = draw;
        remaining -= draw;
        mass -= probabilities[k];
    }
    out[3] = remaining;
    out
}

/// One multinomial draw of `shots` outcomes per setting.
pub fn sample_counts(rho: &TwoQubitState, shots: u64, seed: u64) -> Result<CountRecord> {
    sample_counts_stream(rho, shots, seed, 0)
}

pub fn sample_counts_stream(rho: &TwoQubitState, shots: u64, seed: u64, stream: u64) -> Result<CountRecord> {
    if shots < 1 {
        return Err(Error::invalid("shots must be at least 1"));
    }
    let mut rng = rng_for(seed, stream);
    let mut counts = [[0u64; 4]; 9];
    for setting in MeasurementSetting::all() {
        let mut probs = outcome_probabilities(rho, &setting);
        let total: f64 = probs.iter().sum();
        probs.iter_mut().for_each(|p| *p /= total);
        counts[setting.index()] = multinomial(&mut rng, shots, &probs);
    }
    CountRecord::new(counts, shots, seed, stream)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MleSettings {
    pub max_iterations: usize,
    /// Stop once a step improves the log-likelihood by less than this.
    pub tolerance: f64,
    /// Keep the log-likelihood of every accepted iterate.
    #[serde(skip)]
    pub record_history: bool,
}

impl Default for MleSettings {
    fn default() -> Self {
        MleSettings { max_iterations: 100_000, tolerance: 1e-10, record_history: false }
    }
}

#[derive(Clone, Debug)]
pub struct ReconstructionResult {
    pub rho_hat: TwoQubitState,
    /// `Σ f_k ln p_k(rho_hat)` over all 36 outcomes.
    pub log_likelihood: f64,
    pub iterations: usize,
    pub converged: bool,
    pub history: Vec<f64>,
}

const PROBABILITY_FLOOR: f64 = 1e-12;
const DILUTION: f64 = 0.1;

struct Likelihood {
    projectors: Vec<Op4>,
    weights: Vec<f64>,
}

impl Likelihood {
    fn new(freqs: &Frequencies) -> Self {
        let projectors: Vec<Op4> = all_projectors().into_iter().flatten().collect();
        let weights: Vec<f64> = freqs.0.iter().flatten().copied().collect();
        Likelihood { projectors, weights }
    }

    fn probabilities(&self, rho: &Op4) -> Vec<f64> {
        self.projectors.iter().map(|p| (p * rho).trace().re).collect()
    }

    fn log_likelihood(&self, probs: &[f64]) -> f64 {
        self.weights
            .iter()
            .zip(probs)
            .filter(|(w, _)| **w > 0.0)
            .map(|(w, p)| w * p.max(PROBABILITY_FLOOR).ln())
            .sum()
    }

    /// `R(ρ) = Σ (f_k / p_k) Π_k`, scaled so that `R = I` at a perfect fit.
    fn r_operator(&self, probs: &[f64]) -> Op4 {
        let total: f64 = self.weights.iter().sum();
        let mut r = Op4::zeros();
        for ((proj, &w), &p) in self.projectors.iter().zip(&self.weights).zip(probs) {
            if w > 0.0 {
                r += proj * c(w / (p.max(PROBABILITY_FLOOR) * total));
            }
        }
        r
    }
}

fn normalised(m: Op4) -> Op4 {
    let m = (m + m.adjoint()) * c(0.5);
    let tr = m.trace().re;
    m * c(1.0 / tr)
}

/// Maximum-likelihood reconstruction from counts.
pub fn mle_reconstruct(counts: &CountRecord, settings: &MleSettings) -> Result<ReconstructionResult> {
    mle_reconstruct_frequencies(&counts.frequencies(), settings)
}

/// Diluted iterative `RρR` reconstruction from frequencies.
pub fn mle_reconstruct_frequencies(freqs: &Frequencies, settings: &MleSettings) -> Result<ReconstructionResult> {
    freqs.validate()?;
    if settings.max_iterations == 0 {
        return Err(Error::invalid("max_iterations must be positive"));
    }
    let lik = Likelihood::new(freqs);
    let id = Op4::identity();
    let mut rho = id * c(0.25);
    let mut probs = lik.probabilities(&rho);
    let mut ll = lik.log_likelihood(&probs);
    let mut history = Vec::new();
    if settings.record_history {
        history.push(ll);
    }
    let mut converged = false;
    let mut iterations = 0;

    while iterations < settings.max_iterations {
        iterations += 1;
        let r = lik.r_operator(&probs);
        let mut candidate = normalised(r * rho * r);
        let mut cand_probs = lik.probabilities(&candidate);
        let mut cand_ll = lik.log_likelihood(&cand_probs);

        let mut eps = DILUTION;
        while cand_ll < ll && eps > 1e-12 {
            let step = id + r * c(eps);
            candidate = normalised(step * rho * step);
            cand_probs = lik.probabilities(&candidate);
            cand_ll = lik.log_likelihood(&cand_probs);
            eps /= 2.0;
        }
        if cand_ll < ll {
            // No ascent direction left at floating-point resolution.
            converged = true;
            break;
        }
        let improvement = cand_ll - ll;
        rho = candidate;
        probs = cand_probs;
        ll = cand_ll;
        if settings.record_history {
            history.push(ll);
        }
        if improvement < settings.tolerance {
            converged = true;
            break;
        }
    }

    Ok(ReconstructionResult {
        rho_hat: TwoQubitState::from_raw(rho),
        log_likelihood: ll,
        iterations,
        converged,
        history,
    })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Stat {
    pub mean: f64,
    pub std: f64,
}

impl Stat {
    /// Mean and sample standard deviation (n - 1 denominator).
    pub fn of(samples: &[f64]) -> Stat {
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let var = if samples.len() > 1 {
            samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        Stat { mean, std: var.sqrt() }
    }
}

/// Quantities evaluated on one reconstructed copy.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CopyProperties {
    pub discord_a: f64,
    pub discord_b: f64,
    pub tangle: f64,
    pub singular_values: [f64; 4],
    pub fidelity: f64,
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonteCarloSummary {
    pub copies: usize,
    pub shots: u64,
    pub seed: u64,
    pub discord_a: Stat,
    pub discord_b: Stat,
    pub tangle: Stat,
    pub singular_values: [Stat; 4],
    pub fidelity: Stat,
    pub unconverged_copies: usize,
    #[serde(skip)]
    pub samples: Vec<CopyProperties>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MonteCarloSettings {
    pub mle: MleSettings,
    pub optimizer: OptimizerSettings,
}

fn evaluate_copy(
    rho_ideal: &TwoQubitState,
    shots: u64,
    seed: u64,
    stream: u64,
    settings: &MonteCarloSettings,
) -> Result<CopyProperties> {
    let counts = sample_counts_stream(rho_ideal, shots, seed, stream)?;
    let rec = mle_reconstruct(&counts, &settings.mle)?;
    let rho = &rec.rho_hat;
    Ok(CopyProperties {
        discord_a: discord_with(rho, Side::A, &settings.optimizer)?.value,
        discord_b: discord_with(rho, Side::B, &settings.optimizer)?.value,
        tangle: tangle(rho)?,
        singular_values: correlation_matrix(rho).singular_values,
        fidelity: fidelity(rho, rho_ideal)?,
        converged: rec.converged,
    })
}

/// Samples `copies` independent count records (copy `i` uses stream `i`),
/// reconstructs each and summarises the derived quantities.
pub fn monte_carlo_study(
    rho_ideal: &TwoQubitState,
    shots: u64,
    copies: usize,
    seed: u64,
    settings: &MonteCarloSettings,
) -> Result<MonteCarloSummary> {
    if copies < 2 {
        return Err(Error::invalid("a Monte Carlo study needs at least 2 copies"));
    }
    let samples = (0..copies as u64)
        .into_par_iter()
        .map(|stream| evaluate_copy(rho_ideal, shots, seed, stream, settings))
        .collect::<Result<Vec<_>>>()?;

    let column = |f: &dyn Fn(&CopyProperties) -> f64| Stat::of(&samples.iter().map(f).collect::<Vec<_>>());
    Ok(MonteCarloSummary {
        copies,
        shots,
        seed,
        discord_a: column(&|s| s.discord_a),
        discord_b: column(&|s| s.discord_b),
        tangle: column(&|s| s.tangle),
        singular_values: [0, 1, 2, 3].map(|k| column(&|s| s.singular_values[k])),
        fidelity: column(&|s| s.fidelity),
        unconverged_copies: samples.iter().filter(|s| !s.converged).count(),
        samples,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Histogram {
    /// `bins + 1` ascending edges.
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
    pub mean: f64,
}

/// Equal-width histogram over the sample range; the last bin is closed.
pub fn histogram(samples: &[f64], bins: usize) -> Result<Histogram> {
    if bins < 2 {
        return Err(Error::invalid("histograms need at least 2 bins"));
    }
    if samples.is_empty() {
        return Err(Error::invalid("histogram of an empty sample"));
    }
    let lo = samples.iter().copied().fold(f64::INFINITY, f64::min);
    let mut hi = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi <= lo {
        hi = lo + 1e-12;
    }
    let width = (hi - lo) / bins as f64;
    let edges = (0..=bins).map(|i| lo + width * i as f64).collect();
    let mut counts = vec![0usize; bins];
    for &x in samples {
        let k = (((x - lo) / width) as usize).min(bins - 1);
        counts[k] += 1;
    }
    Ok(Histogram { edges, counts, mean: Stat::of(samples).mean })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SingularValueHistograms {
    pub shots: u64,
    pub copies: usize,
    pub seed: u64,
    /// CM1..CM4.
    pub histograms: [Histogram; 4],
}

pub fn singular_value_histogram(
    rho_ideal: &TwoQubitState,
    shots: u64,
    copies: usize,
    seed: u64,
    bins: usize,
    settings: &MonteCarloSettings,
) -> Result<SingularValueHistograms> {
    if bins < 2 {
        return Err(Error::invalid("histograms need at least 2 bins"));
    }
    let summary = monte_carlo_study(rho_ideal, shots, copies, seed, settings)?;
    histograms_from_summary(&summary, bins)
}

pub fn histograms_from_summary(summary: &MonteCarloSummary, bins: usize) -> Result<SingularValueHistograms> {
    let column = |k: usize| summary.samples.iter().map(|s| s.singular_values[k]).collect::<Vec<_>>();
    Ok(SingularValueHistograms {
        shots: summary.shots,
        copies: summary.copies,
        seed: summary.seed,
        histograms: [
            histogram(&column(0), bins)?,
            histogram(&column(1), bins)?,
            histogram(&column(2), bins)?,
            histogram(&column(3), bins)?,
        ],
    })
}
