use anyhow::{bail, Result};
use clap::ValueEnum;

pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_MAX_STATES: usize = 200_000;
pub const MAX_STATES_ENV: &str = "LUMPKIT_MAX_STATES";

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Dot,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub tol: f64,
    pub max_states: usize,
    pub slack: f64,
    pub format: Option<Format>,
}

impl RunConfig {
    /// Explicit flags win over `LUMPKIT_MAX_STATES`, which wins over the
    /// default cap.
    pub fn resolve(tol: f64, max_states: Option<usize>, slack: f64, format: Option<Format>) -> Result<Self> {
        let max_states = match max_states {
            Some(n) => n,
            None => match std::env::var(MAX_STATES_ENV) {
                Ok(v) => v
                    .trim()
                    .parse()
                    .map_err(|_| anyhow::anyhow!("{MAX_STATES_ENV}={v} is not a positive integer"))?,
                Err(_) => DEFAULT_MAX_STATES,
            },
        };
        if !(tol > 0.0) {
            bail!("tolerance must be positive, got {tol}");
        }
        if max_states == 0 {
            bail!("state cap must be at least 1");
        }
        if !(slack > 1.0) || !slack.is_finite() {
            bail!("uniformization slack must exceed 1, got {slack}");
        }
        Ok(Self {
            tol,
            max_states,
            slack,
            format,
        })
    }

    /// The requested format, or `default` when none was given; anything
    /// outside `allowed` is an input error.
    pub fn format_or(&self, default: Format, allowed: &[Format]) -> Result<Format> {
        let f = self.format.unwrap_or(default);
        if !allowed.contains(&f) {
            bail!("format {f:?} is not available for this command");
        }
        Ok(f)
    }
}
