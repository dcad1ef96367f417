//! Bundled demonstration scenes.
//!
//! `fig4_*` share one scene: a spiralling linear attractor in the unit ball
//! with a cuboid-like (p = 4) obstacle on its path. The original flow runs
//! through the obstacle and out of the workspace, obstacle-only modulation
//! avoids the obstacle but still leaves the workspace, and the full method
//! respects both.
//!
//! `fig6_*` place a ball that pokes through the workspace boundary between
//! the start and the target. The flow is pushed into the corner where the
//! two surfaces meet and slides along their intersection curve, in opposite
//! directions for the two sign preferences.

use crate::error::Result;
use crate::flow::{Method, SignPref};
use crate::scenario_io::{parse_scenario, Scenario};

pub const FIG4_SCENE: &str = "\
# Spiral attractor with a cuboid-like obstacle inside the unit ball.
[workspace]
center = (0, 0, 0)
axes = (1, 1, 1)
power = 1

[obstacle]
center = (0.3, -0.7, 0)
axes = (0.12, 0.12, 0.12)
power = 4
margin = 0.02

[ds]
kind = linear
matrix = ((1, -4, 0), (4, 1, 0), (0, 0, 1))
target = (-0.5, 0, 0)

[starts]
(0.8, 0.1, 0)
";

pub const FIG6_SCENE: &str = "\
# Ball obstacle crossing the workspace boundary between start and target.
[workspace]
center = (0, 0, 0)
axes = (1, 1, 1)
power = 1

[obstacle]
center = (0.7, 0, 0)
axes = (0.45, 0.45, 0.45)
power = 1

[ds]
kind = scaled_radial
gain = 1
target = (0.85, -0.5, 0)

[starts]
(0.85, 0.5, 0)
";

#[derive(Clone, Debug)]
pub struct DemoCase {
    pub name: &'static str,
    pub summary: &'static str,
    pub scenario: Scenario,
}

fn with(text: &str, method: Method, sign: SignPref) -> Result<Scenario> {
    let mut s = parse_scenario(text)?;
    s.flow.method = method;
    s.flow.sign_pref = sign;
    s.validate()?;
    Ok(s)
}

pub fn corpus() -> Vec<DemoCase> {
    let case = |name, summary, text, method, sign| DemoCase {
        name,
        summary,
        scenario: with(text, method, sign).expect("bundled scene is valid"),
    };
    vec![
        case("fig4a_original", "original flow, no modulation", FIG4_SCENE, Method::Original, SignPref::Along),
        case("fig4b_obstacle_only", "obstacle modulation only", FIG4_SCENE, Method::ObstacleOnly, SignPref::Along),
        case("fig4c_full", "full method", FIG4_SCENE, Method::Full, SignPref::Along),
        case("fig6_along", "intersection curve, along e_ow", FIG6_SCENE, Method::Full, SignPref::Along),
        case("fig6_opposite", "intersection curve, against e_ow", FIG6_SCENE, Method::Full, SignPref::Opposite),
    ]
}

pub fn find(name: &str) -> Option<DemoCase> {
    corpus().into_iter().find(|c| c.name == name)
}
