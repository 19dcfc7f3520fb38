use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::OpClass;

/// Which operation classes receive a depolarizing channel after the ideal gate.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OpClassMask {
    pub init: bool,
    pub disentangler: bool,
    pub cnot: bool,
    pub single_qubit: bool,
    pub conditional: bool,
}

impl OpClassMask {
    pub fn contains(&self, class: OpClass) -> bool {
        match class {
            OpClass::Init => self.init,
            OpClass::Disentangler => self.disentangler,
            OpClass::Cnot => self.cnot,
            OpClass::SingleQubit => self.single_qubit,
            OpClass::Conditional => self.conditional,
        }
    }

    pub fn all() -> Self {
        Self { init: true, disentangler: true, cnot: true, single_qubit: true, conditional: true }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum NoisePlacement {
    /// Two-qubit gates only.
    CnotOnly,
    /// Every gate of the scheme body, conditionals included, but not the
    /// initializer or disentangler.
    AllGates,
    /// Every gate, including initializer and disentangler.
    AllGatesIncludingBoundary,
    Custom(OpClassMask),
}

impl NoisePlacement {
    pub fn mask(&self) -> OpClassMask {
        match *self {
            NoisePlacement::CnotOnly => OpClassMask { cnot: true, ..Default::default() },
            NoisePlacement::AllGates => {
                OpClassMask { cnot: true, single_qubit: true, conditional: true, ..Default::default() }
            }
            NoisePlacement::AllGatesIncludingBoundary => OpClassMask::all(),
            NoisePlacement::Custom(m) => m,
        }
    }

    pub fn applies_to(&self, class: OpClass) -> bool {
        self.mask().contains(class)
    }

    /// The three named policies, in order.
    pub const NAMED: [NoisePlacement; 3] =
        [NoisePlacement::CnotOnly, NoisePlacement::AllGates, NoisePlacement::AllGatesIncludingBoundary];
}

impl fmt::Display for NoisePlacement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NoisePlacement::CnotOnly => f.write_str("cnot-only"),
            NoisePlacement::AllGates => f.write_str("all-gates"),
            NoisePlacement::AllGatesIncludingBoundary => f.write_str("all-gates-including-boundary"),
            NoisePlacement::Custom(m) => {
                let names: Vec<&str> = [
                    (m.init, "init"),
                    (m.disentangler, "disentangler"),
                    (m.cnot, "cnot"),
                    (m.single_qubit, "single-qubit"),
                    (m.conditional, "conditional"),
                ]
                .iter()
                .filter(|(on, _)| *on)
                .map(|(_, n)| *n)
                .collect();
                write!(f, "custom:{}", names.join("+"))
            }
        }
    }
}

impl FromStr for NoisePlacement {
    type Err = Error;

    /// Accepts the named policies or `custom:` followed by `+`-separated class names.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        match s.as_str() {
            "cnot-only" => return Ok(NoisePlacement::CnotOnly),
            "all-gates" => return Ok(NoisePlacement::AllGates),
            "all-gates-including-boundary" => return Ok(NoisePlacement::AllGatesIncludingBoundary),
            _ => {}
        }
        let rest = s
            .strip_prefix("custom:")
            .ok_or_else(|| Error::Config(format!("unknown noise placement '{s}'")))?;
        let mut m = OpClassMask::default();
        for part in rest.split('+').filter(|p| !p.is_empty()) {
            match part {
                "init" => m.init = true,
                "disentangler" => m.disentangler = true,
                "cnot" => m.cnot = true,
                "single-qubit" => m.single_qubit = true,
                "conditional" => m.conditional = true,
                other => return Err(Error::Config(format!("unknown op class '{other}'"))),
            }
        }
        Ok(NoisePlacement::Custom(m))
    }
}

impl TryFrom<String> for NoisePlacement {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<NoisePlacement> for String {
    fn from(p: NoisePlacement) -> String {
        p.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        let custom = NoisePlacement::Custom(OpClassMask { init: true, cnot: true, ..Default::default() });
        for p in NoisePlacement::NAMED.into_iter().chain([custom]) {
            assert_eq!(p.to_string().parse::<NoisePlacement>().unwrap(), p);
        }
        assert!("everywhere".parse::<NoisePlacement>().is_err());
        assert!("custom:cnot+measure".parse::<NoisePlacement>().is_err());
    }

    #[test]
    fn boundary_policy_covers_everything() {
        let p = NoisePlacement::AllGatesIncludingBoundary;
        assert!(p.applies_to(OpClass::Init) && p.applies_to(OpClass::Disentangler));
        assert!(!NoisePlacement::AllGates.applies_to(OpClass::Init));
        assert!(!NoisePlacement::CnotOnly.applies_to(OpClass::SingleQubit));
    }
}
