//! Config file format: a sectioned key/value document (TOML syntax) with
//! `[game]`, `[world]`, `[population]`, `[tuning]`, `[run]` and an optional
//! `[sweep]` section. Unknown keys are rejected so typos in experiment
//! definitions fail loudly.

use serde::{Deserialize, Serialize};

use coopsim_core::experiments::{default_window, SweepConfig};
use coopsim_core::game;
use coopsim_core::{PopulationInit, Strategy, TuningCriterion, TuningRule, WorldConfig};

use crate::CliError;

fn default_delta() -> f64 {
    coopsim_core::tuning::DEFAULT_DELTA
}

fn default_repetitions() -> u32 {
    1
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub game: GameSection,
    #[serde(default)]
    pub world: WorldSection,
    pub population: PopulationSection,
    pub tuning: TuningSection,
    pub run: RunSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GameSection {
    pub strategy: String,
    pub b: f64,
    pub c: f64,
    /// Required by `run`; ignored by `sweep`, whose grid replaces it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<f64>,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct WorldSection {
    pub width: f64,
    pub height: f64,
    pub radius: f64,
    pub step_length: f64,
}

impl Default for WorldSection {
    fn default() -> Self {
        WorldSection {
            width: coopsim_core::world::DEFAULT_WIDTH,
            height: coopsim_core::world::DEFAULT_HEIGHT,
            radius: coopsim_core::world::DEFAULT_NEIGHBOR_RADIUS,
            step_length: coopsim_core::world::DEFAULT_STEP_LENGTH,
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PopulationSection {
    pub size: usize,
    pub ipc: f64,
    pub icpc: f64,
    pub icpd: f64,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TuningSection {
    pub rule: String,
    #[serde(default = "default_delta")]
    pub delta: f64,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub iterations: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<usize>,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub x_lo: f64,
    pub x_hi: f64,
    pub x_step: f64,
    #[serde(default = "default_repetitions")]
    pub repetitions: u32,
}

impl ConfigFile {
    /// Parse a config document; syntax errors carry line/column positions.
    pub fn parse(text: &str) -> Result<ConfigFile, CliError> {
        toml::from_str(text).map_err(|err| CliError::config(format!("config error: {err}")))
    }

    /// Re-serialize with normalized section and key ordering.
    #[allow(dead_code)] // exercised by the round-trip tests
    pub fn to_normalized_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    fn strategy(&self) -> Result<Strategy, CliError> {
        self.game
            .strategy
            .parse()
            .map_err(|err| CliError::config(format!("[game] strategy: {err}")))
    }

    fn tuning_rule(&self) -> Result<TuningRule, CliError> {
        let criterion: TuningCriterion = self
            .tuning
            .rule
            .parse()
            .map_err(|err| CliError::config(format!("[tuning] rule: {err}")))?;
        TuningRule::new(criterion, self.tuning.delta)
            .map_err(|err| CliError::config(format!("[tuning] delta: {err}")))
    }

    fn population(&self) -> Result<PopulationInit, CliError> {
        PopulationInit::new(
            self.population.size,
            self.population.ipc,
            self.population.icpc,
            self.population.icpd,
        )
        .map_err(|err| CliError::config(format!("[population] {err}")))
    }

    fn world_config_with_prob(&self, prob: f64, seed: u64) -> Result<WorldConfig, CliError> {
        let spec = game::GameSpec::new(self.strategy()?, self.game.b, self.game.c, prob)
            .map_err(|err| CliError::config(format!("[game] {err}")))?;
        let config = WorldConfig {
            width: self.world.width,
            height: self.world.height,
            neighbor_radius: self.world.radius,
            step_length: self.world.step_length,
            spec,
            tuning: self.tuning_rule()?,
            init: self.population()?,
            seed,
            iterations: self.run.iterations,
        };
        config
            .validate()
            .map_err(|err| CliError::config(format!("[world] {err}")))?;
        Ok(config)
    }

    /// Build the single-run config; `[game] x` is required here.
    pub fn to_world_config(&self, seed: u64) -> Result<WorldConfig, CliError> {
        let x = self
            .game
            .x
            .ok_or_else(|| CliError::config("[game] x: missing (required by run)".to_string()))?;
        self.world_config_with_prob(x, seed)
    }

    /// Build the sweep config; the `[sweep]` section is required here and
    /// its grid replaces `[game] x`.
    pub fn to_sweep_config(
        &self,
        seed: u64,
        window_override: Option<usize>,
    ) -> Result<SweepConfig, CliError> {
        let section = self
            .sweep
            .as_ref()
            .ok_or_else(|| CliError::config("[sweep] section missing (required by sweep)".to_string()))?;
        let base = self.world_config_with_prob(section.x_lo, seed)?;
        let window = window_override
            .or(self.run.window)
            .unwrap_or_else(|| default_window(self.run.iterations));
        let sweep = SweepConfig {
            base,
            x_lo: section.x_lo,
            x_hi: section.x_hi,
            x_step: section.x_step,
            repetitions: section.repetitions,
            window,
        };
        sweep
            .validate()
            .map_err(|err| CliError::config(format!("[sweep] {err}")))?;
        Ok(sweep)
    }

    /// Effective tail window for a single run.
    pub fn run_window(&self, window_override: Option<usize>) -> usize {
        window_override
            .or(self.run.window)
            .unwrap_or_else(|| default_window(self.run.iterations))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
[game]
strategy = \"KS\"
b = 4.0
c = 2.0
x = 0.75

[population]
size = 60
ipc = 0.5
icpc = 0.65
icpd = 0.35

[tuning]
rule = \"sf\"
delta = 0.01

[run]
iterations = 100
seed = 7
";

    #[test]
    fn parses_and_builds_a_world_config() {
        let file = ConfigFile::parse(SAMPLE).unwrap();
        let config = file.to_world_config(7).unwrap();
        assert_eq!(config.spec.strategy, Strategy::KinSelection);
        assert_eq!(config.spec.prob, 0.75);
        assert_eq!(config.init.population, 60);
        assert_eq!(config.width, 13.0);
        assert_eq!(config.iterations, 100);
    }

    #[test]
    fn unknown_keys_are_rejected_with_position() {
        let bad = SAMPLE.replace("icpd", "icdp");
        let err = ConfigFile::parse(&bad).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("icdp"), "{msg}");
        assert!(msg.contains("line"), "{msg}");
    }

    #[test]
    fn round_trip_is_stable() {
        let file = ConfigFile::parse(SAMPLE).unwrap();
        let once = file.to_normalized_string();
        let twice = ConfigFile::parse(&once).unwrap().to_normalized_string();
        assert_eq!(once, twice);
    }

    #[test]
    fn direct_reciprocity_at_one_names_the_field() {
        let bad = SAMPLE.replace("\"KS\"", "\"DR\"").replace("x = 0.75", "x = 1.0");
        let file = ConfigFile::parse(&bad).unwrap();
        let err = file.to_world_config(7).unwrap_err();
        assert!(err.to_string().contains("[game]"), "{err}");
        assert!(err.to_string().contains("w < 1"), "{err}");
    }

    #[test]
    fn missing_x_is_an_error_for_runs() {
        let no_x = SAMPLE.replace("x = 0.75\n", "");
        let file = ConfigFile::parse(&no_x).unwrap();
        let err = file.to_world_config(7).unwrap_err();
        assert!(err.to_string().contains("[game] x"), "{err}");
    }

    #[test]
    fn sweep_section_builds_a_sweep() {
        let with_sweep = format!(
            "{SAMPLE}\n[sweep]\nx_lo = 0.1\nx_hi = 0.9\nx_step = 0.2\nrepetitions = 2\n"
        );
        let file = ConfigFile::parse(&with_sweep).unwrap();
        let sweep = file.to_sweep_config(7, None).unwrap();
        assert_eq!(sweep.x_grid().len(), 5);
        assert_eq!(sweep.repetitions, 2);
        assert_eq!(sweep.window, 10);
    }
}
