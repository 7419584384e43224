use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::spec::{ChannelSpec, MatrixSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Inputs {
    pub channel_file: String,
    pub spec: ChannelSpec,
    pub shots: Option<u64>,
    pub seed: u64,
    pub starts: usize,
    pub witness: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShotReport {
    pub value: f64,
    pub std_error: f64,
    pub shots_per_setting: u64,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub c: f64,
    pub w_max: f64,
    pub robustness_lb: f64,
    pub mu_c_lb: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermReport {
    pub string: String,
    pub coefficient: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SettingReport {
    pub bases: String,
    pub covered_terms: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlphaReport {
    pub alpha_sru: f64,
    /// "exact" for gates with a known value, otherwise "optimizer".
    pub source: String,
    pub starts: Option<usize>,
    pub best_start: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Details {
    Choi {
        dims: Vec<usize>,
        matrix: MatrixSpec,
        trace: [f64; 2],
        min_eigenvalue: f64,
        cp: bool,
        tp: bool,
        unital: bool,
        tp_deficit: f64,
        unital_deficit: f64,
    },
    Schmidt {
        sigmas: Vec<f64>,
        rank: usize,
        a_factors: Vec<MatrixSpec>,
        b_factors: Vec<MatrixSpec>,
    },
    Decomposition {
        witness: String,
        terms: Vec<TermReport>,
        settings: Vec<SettingReport>,
    },
    Sru {
        alpha: AlphaReport,
        alpha_s: f64,
    },
    Separable {
        alpha: AlphaReport,
        alpha_s: f64,
        sigmas: Vec<f64>,
    },
    Npt {
        lambda_minus: f64,
        noise_p: f64,
        two_term_expectation: f64,
        depolarized_term: f64,
        unital: bool,
        degenerate: bool,
        diagnostics: Vec<String>,
    },
    Simulation {
        witness: String,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub inputs: Inputs,
    pub exact_expectation: Option<f64>,
    pub shot_estimate: Option<ShotReport>,
    pub thresholds: BTreeMap<String, f64>,
    pub verdict: Option<String>,
    pub bounds: Option<Bounds>,
    pub details: Option<Details>,
    /// Wall-clock milliseconds; only filled on request so reports stay
    /// reproducible byte for byte.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
    pub seed: u64,
}

pub fn render_report(r: &Report, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(r).expect("report is serializable");
            s.push('\n');
            s
        }
        Format::Text => render_text(r),
    }
}

fn line(out: &mut String, key: &str, value: impl std::fmt::Display) {
    let _ = writeln!(out, "{key:<24}{value}");
}

fn render_text(r: &Report) -> String {
    let mut out = String::new();
    line(&mut out, "command:", &r.command);
    line(&mut out, "channel:", &r.inputs.channel_file);
    line(&mut out, "dims:", format!("{:?}", r.inputs.spec.dims));
    line(&mut out, "seed:", r.seed);
    if let Some(w) = &r.inputs.witness {
        line(&mut out, "witness:", w);
    }
    match &r.details {
        Some(Details::Choi {
            trace,
            min_eigenvalue,
            cp,
            tp,
            unital,
            tp_deficit,
            ..
        }) => {
            line(&mut out, "trace:", format!("{:.12}", trace[0]));
            line(
                &mut out,
                "min eigenvalue:",
                format!("{min_eigenvalue:.12e}"),
            );
            line(
                &mut out,
                "cp / tp / unital:",
                format!("{cp} / {tp} / {unital}"),
            );
            line(&mut out, "tp deficit:", format!("{tp_deficit:.3e}"));
        }
        Some(Details::Schmidt { sigmas, rank, .. }) => {
            line(&mut out, "rank:", rank);
            for (i, s) in sigmas.iter().enumerate() {
                line(&mut out, &format!("sigma_{}:", i + 1), format!("{s:.12}"));
            }
        }
        Some(Details::Decomposition {
            terms, settings, ..
        }) => {
            for t in terms {
                line(
                    &mut out,
                    &format!("{}:", t.string),
                    format!("{:+.12}", t.coefficient),
                );
            }
            line(&mut out, "settings:", settings.len());
            for s in settings {
                line(&mut out, "", &s.bases);
            }
        }
        Some(Details::Sru { alpha, alpha_s }) => {
            line(
                &mut out,
                "alpha_sru:",
                format!("{:.12} ({})", alpha.alpha_sru, alpha.source),
            );
            line(&mut out, "alpha_s:", format!("{alpha_s:.12}"));
        }
        Some(Details::Separable {
            alpha,
            alpha_s,
            sigmas,
        }) => {
            let list: Vec<String> = sigmas.iter().map(|s| format!("{s:.12}")).collect();
            line(&mut out, "sigmas:", list.join(", "));
            line(&mut out, "alpha_s:", format!("{alpha_s:.12}"));
            line(
                &mut out,
                "alpha_sru:",
                format!("{:.12} ({})", alpha.alpha_sru, alpha.source),
            );
        }
        Some(Details::Npt {
            lambda_minus,
            noise_p,
            diagnostics,
            ..
        }) => {
            line(&mut out, "lambda_minus:", format!("{lambda_minus:.12}"));
            line(&mut out, "p:", format!("{noise_p:.12}"));
            for d in diagnostics {
                line(&mut out, "note:", d);
            }
        }
        Some(Details::Simulation { .. }) | None => {}
    }
    if let Some(v) = r.exact_expectation {
        line(&mut out, "expectation:", format!("{v:.12}"));
    }
    if let Some(s) = &r.shot_estimate {
        line(
            &mut out,
            "shot estimate:",
            format!(
                "{:.12} +/- {:.3e} ({} shots/setting)",
                s.value, s.std_error, s.shots_per_setting
            ),
        );
    }
    for (k, v) in &r.thresholds {
        line(&mut out, &format!("{k}:"), format!("{v:.12}"));
    }
    if let Some(b) = &r.bounds {
        line(
            &mut out,
            "robustness lb:",
            format!("{:.12}", b.robustness_lb),
        );
        line(&mut out, "mu_c lb:", format!("{:.12}", b.mu_c_lb));
    }
    if let Some(v) = &r.verdict {
        line(&mut out, "verdict:", v);
    }
    if let Some(t) = r.timing_ms {
        line(&mut out, "time (ms):", format!("{t:.3}"));
    }
    out
}
