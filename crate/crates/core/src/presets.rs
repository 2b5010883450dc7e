//! Named experiment presets: a rule on the default 200 × 200 layout.

use std::fmt;
use std::str::FromStr;

use crate::ca::{parse_rule, RuleParams};
use crate::config::SimConfig;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    Fig5,
    Fig6a,
    Fig6b,
    Fig6c,
    Fig6d,
    Fig6e,
    Fig6f,
}

impl Preset {
    pub const ALL: [Preset; 7] = [
        Preset::Fig5,
        Preset::Fig6a,
        Preset::Fig6b,
        Preset::Fig6c,
        Preset::Fig6d,
        Preset::Fig6e,
        Preset::Fig6f,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig5 => "fig5",
            Preset::Fig6a => "fig6a",
            Preset::Fig6b => "fig6b",
            Preset::Fig6c => "fig6c",
            Preset::Fig6d => "fig6d",
            Preset::Fig6e => "fig6e",
            Preset::Fig6f => "fig6f",
        }
    }

    pub fn rule_code(self) -> &'static str {
        match self {
            Preset::Fig5 => "2201",
            Preset::Fig6a => "1899",
            Preset::Fig6b => "1299",
            Preset::Fig6c => "2222",
            Preset::Fig6d => "2201",
            Preset::Fig6e => "2211",
            Preset::Fig6f => "2246",
        }
    }

    pub fn rule(self) -> RuleParams {
        parse_rule(self.rule_code()).expect("preset rule codes are valid")
    }

    pub fn config(self) -> SimConfig {
        SimConfig::square(200, self.rule())
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown preset {s:?}")))
    }
}
