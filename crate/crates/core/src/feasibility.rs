//! Survival conditions for the flight strategy and the minimum code distance
//! that satisfies them.
//!
//! With `R = v_p * t_c * (delta + 1)` the front radius when the move begins
//! and `x0` the strike-to-hole distance at `t = 0`:
//!
//! * before the move: `R < (x0 - R) + l (d - 1)`
//! * at full radius: `r_max < (x0 - R) + move_displacement + l (d - 1)`
//!
//! Both inequalities are strict; equality is a failure.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::model::PhysicalParams;

/// Default upper bound of the code-distance search.
pub const DEFAULT_D_MAX: u32 = 500;

/// Where the strike lands relative to the qubit's holes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    /// Midway between the two holes.
    Halfway,
    /// On, or right next to, one hole (`x0 = 0`).
    AtHole,
}

impl ScenarioKind {
    pub const BOTH: [ScenarioKind; 2] = [ScenarioKind::Halfway, ScenarioKind::AtHole];

    pub fn as_str(&self) -> &'static str {
        match self {
            ScenarioKind::Halfway => "halfway",
            ScenarioKind::AtHole => "at_hole",
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScenarioKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "halfway" => Ok(ScenarioKind::Halfway),
            "at_hole" => Ok(ScenarioKind::AtHole),
            other => Err(format!(
                "unknown scenario `{other}` (expected halfway or at_hole)"
            )),
        }
    }
}

/// How the halfway offset `x0 = d/2` is turned into millimetres.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HalfwayConvention {
    /// `x0 = d / 2` taken directly as millimetres.
    #[default]
    Literal,
    /// `x0 = d * l / 2`, the physical half-separation of the holes.
    Physical,
}

impl HalfwayConvention {
    pub fn as_str(&self) -> &'static str {
        match self {
            HalfwayConvention::Literal => "literal",
            HalfwayConvention::Physical => "physical",
        }
    }
}

impl FromStr for HalfwayConvention {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "literal" => Ok(HalfwayConvention::Literal),
            "physical" => Ok(HalfwayConvention::Physical),
            other => Err(format!(
                "unknown halfway convention `{other}` (expected literal or physical)"
            )),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StrikeScenario {
    pub kind: ScenarioKind,
    pub convention: HalfwayConvention,
}

impl StrikeScenario {
    pub fn halfway() -> Self {
        StrikeScenario {
            kind: ScenarioKind::Halfway,
            convention: HalfwayConvention::default(),
        }
    }

    pub fn at_hole() -> Self {
        StrikeScenario {
            kind: ScenarioKind::AtHole,
            convention: HalfwayConvention::default(),
        }
    }

    pub fn new(kind: ScenarioKind, convention: HalfwayConvention) -> Self {
        StrikeScenario { kind, convention }
    }

    /// Strike-to-hole distance at `t = 0` (mm) for the code distance in `p`.
    pub fn x0(&self, p: &PhysicalParams) -> f64 {
        match (self.kind, self.convention) {
            (ScenarioKind::AtHole, _) => 0.0,
            (ScenarioKind::Halfway, HalfwayConvention::Literal) => f64::from(p.d) / 2.0,
            (ScenarioKind::Halfway, HalfwayConvention::Physical) => f64::from(p.d) * p.l / 2.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeasibilityVerdict {
    pub cond1: bool,
    pub cond2: bool,
    pub feasible: bool,
}

/// Result of the code-distance search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MinDistance {
    Found(u32),
    Infeasible,
}

impl MinDistance {
    pub fn value(&self) -> Option<u32> {
        match self {
            MinDistance::Found(d) => Some(*d),
            MinDistance::Infeasible => None,
        }
    }

    pub fn is_feasible(&self) -> bool {
        matches!(self, MinDistance::Found(_))
    }
}

impl fmt::Display for MinDistance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MinDistance::Found(d) => write!(f, "{d}"),
            MinDistance::Infeasible => f.write_str("INFEASIBLE"),
        }
    }
}

fn string_length(p: &PhysicalParams) -> f64 {
    p.l * f64::from(p.d.saturating_sub(1))
}

/// The qubit is not overrun before the move starts.
pub fn check_condition1(p: &PhysicalParams, s: &StrikeScenario) -> bool {
    let r = p.radius_at_move_start();
    r < (s.x0(p) - r) + string_length(p)
}

/// The holes end up far enough away once the front is at full radius.
pub fn check_condition2(p: &PhysicalParams, s: &StrikeScenario) -> bool {
    let r = p.radius_at_move_start();
    p.r_max < (s.x0(p) - r) + p.move_displacement + string_length(p)
}

pub fn verdict(p: &PhysicalParams, s: &StrikeScenario) -> FeasibilityVerdict {
    let cond1 = check_condition1(p, s);
    let cond2 = check_condition2(p, s);
    FeasibilityVerdict {
        cond1,
        cond2,
        feasible: cond1 && cond2,
    }
}

fn feasible_at(p: &PhysicalParams, s: &StrikeScenario, d: u32) -> bool {
    verdict(&p.with_d(d), s).feasible
}

/// Smallest `d` in `[2, d_max]` satisfying both conditions (`p.d` is ignored).
///
/// Both right-hand sides grow with `d` while the left-hand sides do not, so
/// feasibility is monotone in `d` and a bisection over the integers finds
/// the first feasible value.
pub fn min_code_distance(p: &PhysicalParams, s: &StrikeScenario, d_max: u32) -> MinDistance {
    if d_max < 2 || !feasible_at(p, s, d_max) {
        return MinDistance::Infeasible;
    }
    let (mut lo, mut hi) = (2u32, d_max);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if feasible_at(p, s, mid) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    MinDistance::Found(lo)
}
