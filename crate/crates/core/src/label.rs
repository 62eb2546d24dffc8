use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Binary inspection outcome. Ordering is lexicographic by name, which is the
/// tie-break order used by the classifiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
    Action,
    NoAction,
}

impl Label {
    pub const ALL: [Label; 2] = [Label::Action, Label::NoAction];

    pub fn name(self) -> &'static str {
        match self {
            Label::Action => "Action",
            Label::NoAction => "NoAction",
        }
    }

    pub fn other(self) -> Label {
        match self {
            Label::Action => Label::NoAction,
            Label::NoAction => Label::Action,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Label::Action => 0,
            Label::NoAction => 1,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Label {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace(['_', '-', ' '], "").as_str() {
            "action" => Ok(Label::Action),
            "noaction" => Ok(Label::NoAction),
            _ => Err(format!("unknown label {s:?}")),
        }
    }
}
