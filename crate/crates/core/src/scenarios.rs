//! Figure and study runners producing [`Report`]s.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::channels::{
    amplitude_damping, correlated_dephasing, correlated_rotation, on_qubit, prepare, rho1, werner_via_ms2,
    RotationAxis, StateSpec,
};
use crate::config::ScenarioConfig;
use crate::correlations::{
    concurrence, conditional_ensemble, correlation_matrix, correlation_rank, discord_with, mutual_information,
    predict_dephasing_rank, rank_table, tangle,
};
use crate::densop::{fano_decompose, fidelity, partial_trace, von_neumann_entropy, BlochVector, Side, TwoQubitState};
use crate::error::Result;
use crate::random::{random_rank_case, RankCase};
use crate::report::{Cell, Report, Table};
use crate::tomography::{histograms_from_summary, monte_carlo_study, MonteCarloSettings, MonteCarloSummary};

const CM_COLUMNS: [&str; 4] = ["cm1", "cm2", "cm3", "cm4"];

fn cm_cells(rho: &TwoQubitState) -> Vec<Cell> {
    correlation_matrix(rho).singular_values.iter().map(|&s| s.into()).collect()
}

fn with_columns<'a>(head: &[&'a str], tail: &[&'a str]) -> Vec<&'a str> {
    head.iter().chain(tail).copied().collect()
}

/// State after amplitude damping of strength `p` on qubit B of `rho1`.
pub fn damped_rho1(p: f64) -> Result<TwoQubitState> {
    Ok(on_qubit(&amplitude_damping(p)?, Side::B).apply(&rho1()))
}

pub fn run_fig2(config: &ScenarioConfig) -> Result<Report> {
    config.validate()?;
    let mut report = Report::new("fig2", config);
    let columns = with_columns(
        &["p", "d_a", "d_b", "mutual_information"],
        &["prob_plus", "tau_plus_x", "tau_plus_y", "tau_plus_z"],
    );
    let columns = with_columns(&columns, &["prob_minus", "tau_minus_x", "tau_minus_y", "tau_minus_z"]);
    let columns = with_columns(&columns, &CM_COLUMNS);
    let mut table = Table::new("sweep", &columns);
    let x_axis = BlochVector::new(1.0, 0.0, 0.0)?;
    for &p in &config.damping_grid {
        let rho = damped_rho1(p)?;
        let mut row: Vec<Cell> = vec![
            p.into(),
            discord_with(&rho, Side::A, &config.optimizer)?.value.into(),
            discord_with(&rho, Side::B, &config.optimizer)?.value.into(),
            mutual_information(&rho)?.into(),
        ];
        for (prob, tau) in conditional_ensemble(&rho, Side::A, &x_axis)? {
            row.push(prob.into());
            row.extend(tau.bloch_vector().as_array().map(Cell::from));
        }
        row.extend(cm_cells(&rho));
        table.push(row);
        report.add_operator(format!("fig2_p={p}"), &rho);
    }
    report.tables.push(table);
    Ok(report)
}

/// One of the nine `fig3` / `fig4` scenario states.
#[derive(Clone, Debug)]
pub struct ScenarioState {
    pub label: &'static str,
    pub figure: &'static str,
    pub state: TwoQubitState,
    /// Predicted rank when the state is a dephasing output of a supported class.
    pub predicted_rank: Option<usize>,
}

fn dephased(input: &TwoQubitState) -> Result<(TwoQubitState, Option<usize>)> {
    let out = correlated_dephasing(&RotationAxis::Z).apply(input);
    let predicted = predict_dephasing_rank(&fano_decompose(input), &RotationAxis::Z).ok();
    Ok((out, predicted))
}

/// `|++>` dephased about z, then rotated by `K_y(π/2)`: the input to the final
/// dephasing of the `cd_rotated_cd_plus_plus` state.
pub fn fig4f_input() -> Result<TwoQubitState> {
    let once = correlated_dephasing(&RotationAxis::Z).apply(&prepare(&StateSpec::PlusPlus)?);
    Ok(once.conjugate(&correlated_rotation(&RotationAxis::Y, PI / 2.0)))
}

pub fn fig4f_state() -> Result<TwoQubitState> {
    Ok(correlated_dephasing(&RotationAxis::Z).apply(&fig4f_input()?))
}

pub fn scenario_states() -> Result<Vec<ScenarioState>> {
    let plain = |label, figure, state| ScenarioState { label, figure, state, predicted_rank: None };
    let rho2 = prepare(&StateSpec::Rho2)?;
    let plus = prepare(&StateSpec::PlusPlus)?;
    let (cd_rho1, pred_rho1) = dephased(&rho1())?;
    let (cd_rho2, pred_rho2) = dephased(&rho2)?;
    let (cd_plus, pred_plus) = dephased(&plus)?;
    let (cd_fig4f, pred_fig4f) = dephased(&fig4f_input()?)?;
    Ok(vec![
        plain("ad_p0", "fig3", damped_rho1(0.0)?),
        plain("ad_p0.79", "fig3", damped_rho1(0.79)?),
        plain("ad_p1", "fig3", damped_rho1(1.0)?),
        ScenarioState { label: "cd_rho1", figure: "fig4", state: cd_rho1, predicted_rank: pred_rho1 },
        plain("rho2", "fig4", rho2),
        ScenarioState { label: "cd_rho2", figure: "fig4", state: cd_rho2, predicted_rank: pred_rho2 },
        plain("plus_plus", "fig4", plus),
        ScenarioState { label: "cd_plus_plus", figure: "fig4", state: cd_plus, predicted_rank: pred_plus },
        ScenarioState { label: "cd_rotated_cd_plus_plus", figure: "fig4", state: cd_fig4f, predicted_rank: pred_fig4f },
    ])
}

fn run_states(name: &str, config: &ScenarioConfig, figures: &[&str]) -> Result<Report> {
    config.validate()?;
    let mut report = Report::new(name, config);
    let columns = with_columns(&["figure", "state"], &CM_COLUMNS);
    let columns = with_columns(&columns, &["rank", "predicted_rank", "d_a", "d_b", "tangle"]);
    let mut table = Table::new("states", &columns);
    for s in scenario_states()?.into_iter().filter(|s| figures.contains(&s.figure)) {
        let mut row: Vec<Cell> = vec![s.figure.into(), s.label.into()];
        row.extend(cm_cells(&s.state));
        row.push(correlation_rank(&s.state, config.rank_tolerance)?.rank.into());
        row.push(s.predicted_rank.map_or(Cell::from("n/a"), Cell::from));
        row.push(discord_with(&s.state, Side::A, &config.optimizer)?.value.into());
        row.push(discord_with(&s.state, Side::B, &config.optimizer)?.value.into());
        row.push(tangle(&s.state)?.into());
        table.push(row);
        report.add_operator(s.label, &s.state);
    }
    report.tables.push(table);
    Ok(report)
}

pub fn run_fig3_fig4(config: &ScenarioConfig) -> Result<Report> {
    run_states("fig3_fig4", config, &["fig3", "fig4"])
}

pub fn run_fig3(config: &ScenarioConfig) -> Result<Report> {
    run_states("fig3", config, &["fig3"])
}

pub fn run_fig4(config: &ScenarioConfig) -> Result<Report> {
    run_states("fig4", config, &["fig4"])
}

pub fn run_fig5(config: &ScenarioConfig) -> Result<Report> {
    config.validate()?;
    let mut report = Report::new("fig5", config);
    let columns = with_columns(
        &["p", "d_a", "d_b", "mutual_information", "concurrence", "tangle", "tangle_formula"],
        &["ms2_fidelity", "ms2_max_abs_diff"],
    );
    let columns = with_columns(&columns, &CM_COLUMNS);
    let mut table = Table::new("werner", &columns);
    for &p in &config.werner_grid {
        let rho = prepare(&StateSpec::Werner { p })?;
        let via_ms2 = werner_via_ms2(p)?;
        let formula = ((3.0 * p - 1.0) / 2.0).max(0.0).powi(2);
        let mut row: Vec<Cell> = vec![
            p.into(),
            discord_with(&rho, Side::A, &config.optimizer)?.value.into(),
            discord_with(&rho, Side::B, &config.optimizer)?.value.into(),
            mutual_information(&rho)?.into(),
            concurrence(&rho)?.into(),
            tangle(&rho)?.into(),
            formula.into(),
            fidelity(&via_ms2, &rho)?.into(),
            via_ms2.max_abs_diff(&rho).into(),
        ];
        row.extend(cm_cells(&rho));
        table.push(row);
        report.add_operator(format!("werner_p={p}"), &rho);
    }
    report.tables.push(table);
    Ok(report)
}

const STAT_COLUMNS: [&str; 16] = [
    "d_a_mean", "d_a_std", "d_b_mean", "d_b_std", "tangle_mean", "tangle_std", "cm1_mean", "cm1_std",
    "cm2_mean", "cm2_std", "cm3_mean", "cm3_std", "cm4_mean", "cm4_std", "fidelity_mean", "fidelity_std",
];

fn summary_row(s: &MonteCarloSummary) -> Vec<Cell> {
    let mut row: Vec<Cell> = vec![s.shots.into(), s.copies.into()];
    let mut stats = vec![s.discord_a, s.discord_b, s.tangle];
    stats.extend(s.singular_values);
    stats.push(s.fidelity);
    for st in stats {
        row.push(st.mean.into());
        row.push(st.std.into());
    }
    row.push(s.unconverged_copies.into());
    row
}

/// Projection-noise study on `rho1`: bias versus shots, plus singular-value
/// histograms at `config.shots`. Every shot count reuses `config.seed`.
pub fn run_supp_noise(config: &ScenarioConfig) -> Result<Report> {
    config.validate()?;
    let mut report = Report::new("supp-noise", config);
    let settings = MonteCarloSettings { mle: config.mle.clone(), optimizer: config.optimizer.clone() };
    let ideal = rho1();

    let columns = with_columns(&["shots", "copies"], &STAT_COLUMNS);
    let columns = with_columns(&columns, &["unconverged"]);
    let mut bias = Table::new("bias", &columns);
    let mut at_histogram_shots = None;
    for &shots in &config.shots_grid {
        let summary = monte_carlo_study(&ideal, shots, config.copies, config.seed, &settings)?;
        bias.push(summary_row(&summary));
        if shots == config.shots {
            at_histogram_shots = Some(summary);
        }
    }
    let summary = match at_histogram_shots {
        Some(s) => s,
        None => monte_carlo_study(&ideal, config.shots, config.copies, config.seed, &settings)?,
    };
    let hist = histograms_from_summary(&summary, config.histogram_bins)?;
    let mut table = Table::new("histogram", &["cm", "bin", "lower", "upper", "count"]);
    for (k, h) in hist.histograms.iter().enumerate() {
        for (b, &count) in h.counts.iter().enumerate() {
            table.push(vec![
                CM_COLUMNS[k].into(),
                b.into(),
                h.edges[b].into(),
                h.edges[b + 1].into(),
                count.into(),
            ]);
        }
    }
    report.tables.push(bias);
    report.tables.push(table);
    report.add_operator("rho1", &ideal);
    Ok(report)
}

/// Every quantifier evaluated on a single state.
pub fn run_state(config: &ScenarioConfig, label: &str, rho: &TwoQubitState) -> Result<Report> {
    config.validate()?;
    let mut report = Report::new("state", config);
    let mut table = Table::new("quantities", &["quantity", "value"]);
    let mut put = |name: &str, v: f64| table.push(vec![name.into(), v.into()]);

    for side in [Side::A, Side::B] {
        let d = discord_with(rho, side, &config.optimizer)?;
        let tag = side.to_string().to_lowercase();
        put(&format!("d_{tag}"), d.value);
        put(&format!("j_{tag}"), d.classical_correlation);
        for (axis, v) in ["x", "y", "z"].iter().zip(d.optimal_axis.as_array()) {
            put(&format!("axis_{tag}_{axis}"), v);
        }
    }
    put("mutual_information", mutual_information(rho)?);
    put("s_a", von_neumann_entropy(&partial_trace(rho, Side::A))?);
    put("s_b", von_neumann_entropy(&partial_trace(rho, Side::B))?);
    put("s_ab", von_neumann_entropy(rho)?);
    put("concurrence", concurrence(rho)?);
    put("tangle", tangle(rho)?);
    let rank = correlation_rank(rho, config.rank_tolerance)?;
    for (name, s) in CM_COLUMNS.iter().zip(rank.singular_values) {
        put(name, s);
    }
    put("rank", rank.rank as f64);
    let f = fano_decompose(rho);
    for (name, v) in ["r_a_x", "r_a_y", "r_a_z"].iter().zip(f.r_a.as_array()) {
        put(name, v);
    }
    for (name, v) in ["r_b_x", "r_b_y", "r_b_z"].iter().zip(f.r_b.as_array()) {
        put(name, v);
    }
    report.tables.push(table);
    report.add_operator(label, rho);
    Ok(report)
}

/// Randomized check of the dephasing rank predictor against the computed rank.
pub fn run_rank_table(config: &ScenarioConfig) -> Result<Report> {
    config.validate()?;
    let mut report = Report::new("rank-table", config);
    let mut table = Table::new(
        "rank_table",
        &["case", "expected_rank", "samples", "prediction_matches_expected", "prediction_matches_computed"],
    );
    for (index, case) in RankCase::all().into_iter().enumerate() {
        let expected = match case {
            RankCase::Cell(v, w) => rank_table(v, w),
            RankCase::ProductAlongA | RankCase::ProductAlongB => 1,
            RankCase::ProductGeneric => 3,
        };
        let mut rng = ChaCha20Rng::seed_from_u64(config.seed);
        rng.set_stream(index as u64);
        let (mut match_expected, mut match_computed) = (0usize, 0usize);
        for _ in 0..config.rank_table_samples {
            let (rho, axis) = random_rank_case(&mut rng, case);
            let predicted = predict_dephasing_rank(&fano_decompose(&rho), &axis)?;
            let computed = correlation_rank(&correlated_dephasing(&axis).apply(&rho), config.rank_tolerance)?.rank;
            match_expected += usize::from(predicted == expected);
            match_computed += usize::from(predicted == computed);
        }
        table.push(vec![
            case.label().into(),
            expected.into(),
            config.rank_table_samples.into(),
            match_expected.into(),
            match_computed.into(),
        ]);
    }
    report.tables.push(table);
    Ok(report)
}
