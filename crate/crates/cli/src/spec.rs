//! Channel-spec files.
//!
//! ```json
//! {"dims": [2], "kind": "named", "name": "depolarizing", "params": {"p": 0.25}}
//! {"dims": [2], "kind": "kraus", "kraus": [[[[1, 0], [0, 0]], [[0, 0], [1, 0]]]]}
//! ```
//!
//! Matrices are row lists of `[re, im]` pairs.

use std::path::Path;

use chandet_core::{make_named_channel, Channel, ChannelName, ChannelParams, ComplexMatrix, C64};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub type MatrixSpec = Vec<Vec<[f64; 2]>>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpecKind {
    Named,
    Kraus,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<MatrixSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unitary: Option<MatrixSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probs: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unitaries: Option<Vec<MatrixSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_unitaries: Option<Vec<MatrixSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b_unitaries: Option<Vec<MatrixSpec>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSpec {
    pub dims: Vec<usize>,
    pub kind: SpecKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<ParamsSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kraus: Option<Vec<MatrixSpec>>,
}

pub fn matrix_from_spec(m: &MatrixSpec, dims: &[usize], field: &str) -> Result<ComplexMatrix> {
    let side: usize = dims.iter().product();
    if m.len() != side {
        return Err(CliError::Schema(format!(
            "{field}: expected {side} rows, got {}",
            m.len()
        )));
    }
    let mut rows = Vec::with_capacity(side);
    for (i, row) in m.iter().enumerate() {
        if row.len() != side {
            return Err(CliError::Schema(format!(
                "{field}[{i}]: expected {side} entries, got {}",
                row.len()
            )));
        }
        rows.push(row.iter().map(|[re, im]| C64::new(*re, *im)).collect());
    }
    Ok(ComplexMatrix::from_rows(&rows, dims.to_vec())?)
}

pub fn matrix_to_spec(m: &ComplexMatrix) -> MatrixSpec {
    m.rows()
        .map(|r| r.iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

fn matrices(
    list: &Option<Vec<MatrixSpec>>,
    dims: &[usize],
    field: &str,
) -> Result<Option<Vec<ComplexMatrix>>> {
    list.as_ref()
        .map(|ms| {
            ms.iter()
                .enumerate()
                .map(|(k, m)| matrix_from_spec(m, dims, &format!("{field}[{k}]")))
                .collect()
        })
        .transpose()
}

impl ChannelSpec {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Schema(e.to_string()))
    }

    /// Builds the channel. Trace preservation is enforced only when
    /// `require_tp` is set.
    pub fn build(&self, require_tp: bool) -> Result<Channel> {
        if self.dims.is_empty() || self.dims.iter().any(|&d| d < 2) {
            return Err(CliError::Schema(format!(
                "dims: every subsystem needs dimension >= 2, got {:?}",
                self.dims
            )));
        }
        match self.kind {
            SpecKind::Named => {
                let name = self
                    .name
                    .as_deref()
                    .ok_or_else(|| CliError::Schema("name: required for kind \"named\"".into()))?;
                let name: ChannelName = name
                    .parse()
                    .map_err(|_| CliError::Schema(format!("name: unknown channel `{name}`")))?;
                let params = self.params.clone().unwrap_or_default();
                let local = |k: usize| vec![self.dims.get(k).copied().unwrap_or(0)];
                let converted = ChannelParams {
                    p: params.p,
                    sigma: params
                        .sigma
                        .as_ref()
                        .map(|m| matrix_from_spec(m, &self.dims, "params.sigma"))
                        .transpose()?,
                    unitary: params
                        .unitary
                        .as_ref()
                        .map(|m| matrix_from_spec(m, &self.dims, "params.unitary"))
                        .transpose()?,
                    probs: params.probs.clone(),
                    unitaries: matrices(&params.unitaries, &self.dims, "params.unitaries")?,
                    a_unitaries: matrices(&params.a_unitaries, &local(0), "params.a_unitaries")?,
                    b_unitaries: matrices(&params.b_unitaries, &local(1), "params.b_unitaries")?,
                };
                Ok(make_named_channel(name, &converted, &self.dims)?)
            }
            SpecKind::Kraus => {
                let ops = matrices(&self.kraus, &self.dims, "kraus")?
                    .ok_or_else(|| CliError::Schema("kraus: required for kind \"kraus\"".into()))?;
                if ops.is_empty() {
                    return Err(CliError::Schema(
                        "kraus: at least one operator required".into(),
                    ));
                }
                Ok(Channel::new(ops, self.dims.clone(), require_tp)?)
            }
        }
    }
}

pub fn read_channel_spec(path: &Path) -> Result<ChannelSpec> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    ChannelSpec::parse(&text)
}

pub fn load_channel_spec(path: &Path, require_tp: bool) -> Result<Channel> {
    read_channel_spec(path)?.build(require_tp)
}
