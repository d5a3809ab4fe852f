//! Case-study scenario configurations bundled into the binary.

use crate::config::ProblemConfig;

#[derive(Clone, Copy, Debug)]
pub struct Scenario {
    pub name: &'static str,
    pub json: &'static str,
    /// Part of the combined robustness plot data.
    pub in_overview: bool,
}

impl Scenario {
    pub fn config(&self) -> ProblemConfig {
        ProblemConfig::from_json(self.json).unwrap_or_else(|e| panic!("bundled scenario {}: {e}", self.name))
    }
}

macro_rules! scenario {
    ($name:literal, $overview:expr) => {
        Scenario { name: $name, json: include_str!(concat!("../scenarios/", $name, ".json")), in_overview: $overview }
    };
}

/// Deterministic, `|u| <= 20`.
pub const SCENARIO_1: Scenario = scenario!("scenario-1", true);
/// `w0 = 0.2` with the nominal (non-robust) controller.
pub const SCENARIO_2: Scenario = scenario!("scenario-2", true);
/// `w0 = 0.2`, robust controller.
pub const SCENARIO_3: Scenario = scenario!("scenario-3", true);
/// `w0 = 0.5`, needs softening.
pub const SCENARIO_4: Scenario = scenario!("scenario-4", true);
/// Scenario 4 with `h_p = 1` (`H = 5`).
pub const SCENARIO_4_H5: Scenario = scenario!("scenario-4-h5", false);
/// Scenario 4 with `h_p = 0` (`H = 4`).
pub const SCENARIO_4_H4: Scenario = scenario!("scenario-4-h4", false);
/// `|u| <= 2`, `w0 = 0.2`: minimally violating.
pub const SCENARIO_5: Scenario = scenario!("scenario-5", true);

pub const ALL: [Scenario; 7] = [SCENARIO_1, SCENARIO_2, SCENARIO_3, SCENARIO_4, SCENARIO_4_H5, SCENARIO_4_H4, SCENARIO_5];

pub fn by_name(name: &str) -> Option<Scenario> {
    ALL.iter().copied().find(|s| s.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_configs_build() {
        for s in ALL {
            let p = s.config().build().unwrap();
            assert_eq!(p.formula.horizon(), 4, "{}", s.name);
            assert_eq!(p.steps, 30);
        }
    }
}
