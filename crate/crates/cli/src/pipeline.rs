use std::collections::BTreeMap;
use std::path::Path;

use chandet_core::channels::cnot_matrix;
use chandet_core::measure::estimate_witness;
use chandet_core::pptdetect::{evaluate_ppt_witness, realizable_composite};
use chandet_core::{
    alpha_sru_optimize, build_sru_witness, classify, classify_violation, detect_npt, eb_witness,
    evaluate_witness, group_settings, hermitian_eig, operator_schmidt, pauli_decompose,
    ppt_witness, robustness_bounds, stabilizer_witness, Channel, ComplexMatrix, PauliString,
    Witness,
};

use crate::error::{CliError, Result};
use crate::report::{
    AlphaReport, Bounds, Details, Inputs, Report, SettingReport, ShotReport, TermReport,
};
use crate::spec::{matrix_to_spec, read_channel_spec};

pub const DEFAULT_SIMULATION_SHOTS: u64 = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Choi,
    Schmidt,
    DecomposeWitness,
    DetectEb,
    DetectSru,
    DetectSep,
    DetectNpt,
    Simulate,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Choi => "choi",
            Command::Schmidt => "schmidt",
            Command::DecomposeWitness => "decompose-witness",
            Command::DetectEb => "detect-eb",
            Command::DetectSru => "detect-sru",
            Command::DetectSep => "detect-sep",
            Command::DetectNpt => "detect-npt",
            Command::Simulate => "simulate",
        }
    }

    /// Whether the pipeline is only meaningful for trace-preserving maps.
    fn requires_tp(self) -> bool {
        matches!(
            self,
            Command::DetectEb | Command::DetectSru | Command::DetectNpt | Command::Simulate
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum WitnessChoice {
    Eb,
    Sru,
    Stabilizer,
    Ppt,
}

impl WitnessChoice {
    pub fn as_str(self) -> &'static str {
        match self {
            WitnessChoice::Eb => "eb",
            WitnessChoice::Sru => "sru",
            WitnessChoice::Stabilizer => "stabilizer",
            WitnessChoice::Ppt => "ppt",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Options {
    pub shots: Option<u64>,
    pub seed: u64,
    pub starts: usize,
    pub witness: Option<WitnessChoice>,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            shots: None,
            seed: 0,
            starts: chandet_core::detect::DEFAULT_STARTS,
            witness: None,
        }
    }
}

#[derive(Default)]
struct Draft {
    exact_expectation: Option<f64>,
    shot_estimate: Option<ShotReport>,
    thresholds: BTreeMap<String, f64>,
    verdict: Option<String>,
    bounds: Option<Bounds>,
    details: Option<Details>,
}

impl Draft {
    fn new(details: Details) -> Self {
        Self {
            details: Some(details),
            ..Self::default()
        }
    }
}

pub fn run_pipeline(command: Command, channel_file: &Path, opts: &Options) -> Result<Report> {
    let spec = read_channel_spec(channel_file)?;
    let ch = spec.build(command.requires_tp())?;
    let witness = match command {
        Command::DecomposeWitness | Command::Simulate => {
            Some(opts.witness.unwrap_or_else(|| default_witness(ch.dims())))
        }
        _ => None,
    };
    let draft = match command {
        Command::Choi => choi(&ch)?,
        Command::Schmidt => schmidt(&ch)?,
        Command::DecomposeWitness => decompose(&ch, witness.expect("set above"), opts)?,
        Command::DetectEb => detect_eb(&ch, opts)?,
        Command::DetectSru => detect_sru(&ch, opts, false)?,
        Command::DetectSep => detect_sru(&ch, opts, true)?,
        Command::DetectNpt => npt(&ch)?,
        Command::Simulate => simulate(&ch, witness.expect("set above"), opts)?,
    };
    Ok(Report {
        command: command.as_str().to_string(),
        inputs: Inputs {
            channel_file: channel_file.display().to_string(),
            spec,
            shots: opts.shots,
            seed: opts.seed,
            starts: opts.starts,
            witness: witness.map(|w| w.as_str().to_string()),
        },
        exact_expectation: draft.exact_expectation,
        shot_estimate: draft.shot_estimate,
        thresholds: draft.thresholds,
        verdict: draft.verdict,
        bounds: draft.bounds,
        details: draft.details,
        timing_ms: None,
        seed: opts.seed,
    })
}

fn default_witness(dims: &[usize]) -> WitnessChoice {
    if dims == [2] {
        WitnessChoice::Eb
    } else {
        WitnessChoice::Sru
    }
}

fn require_dims(ch: &Channel, allowed: &[&[usize]], command: &str) -> Result<()> {
    if allowed.iter().any(|d| *d == ch.dims()) {
        Ok(())
    } else {
        Err(CliError::Input(format!(
            "{command} needs dims {allowed:?}, got {:?}",
            ch.dims()
        )))
    }
}

fn require_unitary<'a>(ch: &'a Channel, command: &str) -> Result<&'a ComplexMatrix> {
    ch.as_unitary()
        .ok_or_else(|| CliError::Input(format!("{command} needs a unitary channel")))
}

fn bipartite(ch: &Channel, command: &str) -> Result<[usize; 2]> {
    match ch.dims() {
        [a, b] => Ok([*a, *b]),
        d => Err(CliError::Input(format!(
            "{command} needs two subsystems, got {d:?}"
        ))),
    }
}

fn bounds(c: f64, w: &Witness) -> Bounds {
    let b = robustness_bounds(c, w);
    Bounds {
        c: b.c,
        w_max: b.w_max,
        robustness_lb: b.robustness_lb,
        mu_c_lb: b.mu_c_lb,
    }
}

fn shot_report(ch: &Channel, w: &Witness, shots: u64, seed: u64) -> Result<ShotReport> {
    let est = estimate_witness(ch, w, shots, seed)?;
    Ok(ShotReport {
        value: est.value,
        std_error: est.std_error,
        shots_per_setting: est.shots_per_setting,
        seed: est.seed,
    })
}

fn choi(ch: &Channel) -> Result<Draft> {
    let c = ch.choi().matrix();
    let class = classify(ch);
    let tr = c.trace();
    Ok(Draft::new(Details::Choi {
        dims: c.dims().to_vec(),
        matrix: matrix_to_spec(c),
        trace: [tr.re, tr.im],
        min_eigenvalue: hermitian_eig(c)?.min(),
        cp: class.cp,
        tp: class.tp,
        unital: class.unital,
        tp_deficit: class.tp_deficit,
        unital_deficit: class.unital_deficit,
    }))
}

fn schmidt(ch: &Channel) -> Result<Draft> {
    let [da, db] = bipartite(ch, "schmidt")?;
    let u = require_unitary(ch, "schmidt")?;
    let s = operator_schmidt(u, da, db)?;
    Ok(Draft::new(Details::Schmidt {
        sigmas: s.sigmas.clone(),
        rank: s.rank,
        a_factors: s.a_factors.iter().map(matrix_to_spec).collect(),
        b_factors: s.b_factors.iter().map(matrix_to_spec).collect(),
    }))
}

/// `alpha_sru` for a target unitary: exact for CNOT, optimizer otherwise.
fn alpha_for(u: &ComplexMatrix, dims: [usize; 2], opts: &Options) -> Result<AlphaReport> {
    if dims == [2, 2] && u.max_abs_diff(&cnot_matrix()) < 1e-12 {
        return Ok(AlphaReport {
            alpha_sru: std::f64::consts::FRAC_1_SQRT_2,
            source: "exact".into(),
            starts: None,
            best_start: None,
        });
    }
    let opt = alpha_sru_optimize(u, dims, opts.starts, opts.seed)?;
    Ok(AlphaReport {
        alpha_sru: opt.alpha_sru,
        source: "optimizer".into(),
        starts: Some(opts.starts.max(1)),
        best_start: Some(opt.best_start),
    })
}

fn cnot_stabilizers() -> Vec<PauliString> {
    ["XXXI", "IXIX", "ZIZI", "ZZIZ"]
        .iter()
        .map(|s| s.parse().expect("valid Pauli string"))
        .collect()
}

fn build_witness(ch: &Channel, choice: WitnessChoice, opts: &Options) -> Result<Witness> {
    match choice {
        WitnessChoice::Eb => {
            require_dims(ch, &[&[2]], "eb witness")?;
            Ok(eb_witness())
        }
        WitnessChoice::Sru => {
            let dims = bipartite(ch, "sru witness")?;
            let u = require_unitary(ch, "sru witness")?;
            let alpha = alpha_for(u, dims, opts)?;
            Ok(build_sru_witness(u, dims, alpha.alpha_sru.powi(2))?)
        }
        WitnessChoice::Stabilizer => {
            require_dims(ch, &[&[2, 2]], "stabilizer witness")?;
            Ok(stabilizer_witness(&cnot_stabilizers())?)
        }
        WitnessChoice::Ppt => Ok(ppt_witness(ch)?.witness),
    }
}

fn decompose(ch: &Channel, choice: WitnessChoice, opts: &Options) -> Result<Draft> {
    let w = build_witness(ch, choice, opts)?;
    let terms = pauli_decompose(&w.operator)?;
    let settings = group_settings(&terms);
    Ok(Draft::new(Details::Decomposition {
        witness: choice.as_str().into(),
        terms: terms
            .iter()
            .map(|t| TermReport {
                string: t.string.label(),
                coefficient: t.coefficient,
            })
            .collect(),
        settings: settings
            .iter()
            .map(|s| SettingReport {
                bases: s.label(),
                covered_terms: s.covered_terms.clone(),
            })
            .collect(),
    }))
}

fn detect_eb(ch: &Channel, opts: &Options) -> Result<Draft> {
    require_dims(ch, &[&[2]], "detect-eb")?;
    let w = eb_witness();
    let value = evaluate_witness(&w, ch)?;
    let verdict = if value < 0.0 {
        "not_entanglement_breaking"
    } else {
        "undetected"
    };
    let mut d = Draft {
        exact_expectation: Some(value),
        thresholds: BTreeMap::from([("entanglement_breaking".to_string(), 0.0)]),
        verdict: Some(verdict.into()),
        bounds: Some(bounds(value, &w)),
        ..Draft::default()
    };
    if let Some(shots) = opts.shots.filter(|&s| s > 0) {
        d.shot_estimate = Some(shot_report(ch, &w, shots, opts.seed)?);
    }
    Ok(d)
}

fn detect_sru(ch: &Channel, opts: &Options, separable: bool) -> Result<Draft> {
    let command = if separable {
        "detect-sep"
    } else {
        "detect-sru"
    };
    require_dims(ch, &[&[2, 2], &[3, 3]], command)?;
    let dims = bipartite(ch, command)?;
    let u = require_unitary(ch, command)?;
    let schmidt = operator_schmidt(u, dims[0], dims[1])?;
    let alpha = alpha_for(u, dims, opts)?;
    let w = build_sru_witness(u, dims, alpha.alpha_sru.powi(2))?;
    let value = evaluate_witness(&w, ch)?;
    let alpha_s = schmidt.leading();

    let details = if separable {
        Details::Separable {
            alpha,
            alpha_s,
            sigmas: schmidt.sigmas.clone(),
        }
    } else {
        Details::Sru { alpha, alpha_s }
    };
    let mut d = Draft::new(details);
    d.exact_expectation = Some(value);
    d.thresholds.insert("sru".into(), 0.0);
    let (sru_sq, s_sq) = (
        w.alpha_sru_sq.expect("set by build_sru_witness"),
        w.alpha_s_sq.expect("set by build_sru_witness"),
    );
    d.thresholds.insert("separable".into(), sru_sq - s_sq);
    d.verdict = Some(classify_violation(value, &w)?.as_str().into());
    d.bounds = Some(bounds(value, &w));
    if let Some(shots) = opts.shots.filter(|&s| s > 0) {
        d.shot_estimate = Some(shot_report(ch, &w, shots, opts.seed)?);
    }
    Ok(d)
}

fn npt(ch: &Channel) -> Result<Draft> {
    if !matches!(ch.dims(), [a, b] if a == b) {
        return Err(CliError::Input(format!(
            "detect-npt needs two equal subsystems, got {:?}",
            ch.dims()
        )));
    }
    let r = detect_npt(ch)?;
    let mut d = Draft::new(Details::Npt {
        lambda_minus: r.lambda_minus,
        noise_p: r.noise_p,
        two_term_expectation: r.two_term_expectation,
        depolarized_term: r.depolarized_term,
        unital: r.unital,
        degenerate: r.degenerate,
        diagnostics: r.diagnostics.clone(),
    });
    d.exact_expectation = Some(r.expectation);
    d.thresholds.insert("threshold".into(), r.threshold);
    d.verdict = Some(r.verdict.as_str().into());
    Ok(d)
}

fn simulate(ch: &Channel, choice: WitnessChoice, opts: &Options) -> Result<Draft> {
    let w = build_witness(ch, choice, opts)?;
    let shots = opts.shots.unwrap_or(DEFAULT_SIMULATION_SHOTS);
    let (exact, measured) = if choice == WitnessChoice::Ppt {
        (evaluate_ppt_witness(&w, ch)?, realizable_composite(ch)?)
    } else {
        (evaluate_witness(&w, ch)?, ch.clone())
    };
    let mut d = Draft::new(Details::Simulation {
        witness: choice.as_str().into(),
    });
    d.exact_expectation = Some(exact);
    d.shot_estimate = Some(shot_report(&measured, &w, shots, opts.seed)?);
    Ok(d)
}
