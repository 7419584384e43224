//! Library side of the `chandet` command-line tool: channel-spec parsing,
//! detection pipelines and report rendering.

pub mod error;
pub mod pipeline;
pub mod report;
pub mod spec;

pub use error::{CliError, Result};
pub use pipeline::{run_pipeline, Command, Options, WitnessChoice};
pub use report::{render_report, Format, Report};
pub use spec::{load_channel_spec, ChannelSpec};
