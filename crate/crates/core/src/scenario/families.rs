/*
  Copyright 2026 The reachgrasp Authors

  Licensed under the Apache License, Version 2.0 (the "License");
  you may not use this file except in compliance with the License.
  You may obtain a copy of the License at

      http://www.apache.org/licenses/LICENSE-2.0

  Unless required by applicable law or agreed to in writing, software
  distributed under the License is distributed on an "AS IS" BASIS,
  WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
  See the License for the specific language governing permissions and
  limitations under the License.
*/

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::{BaseLimits, PlacedMesh, Scenario};
use crate::error::ScenarioError;
use crate::geometry::{Transform, TriangleMesh};
use crate::robot::ready_configuration;

/// Board and wall thickness, meters.
const PLATE: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Shelf,
    UnderTable,
    NarrowGap,
    NarrowOpening,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::Shelf, Family::UnderTable, Family::NarrowGap, Family::NarrowOpening];

    /// Environment digit used in scenario ids.
    pub fn digit(self) -> u8 {
        match self {
            Family::Shelf => 1,
            Family::UnderTable => 2,
            Family::NarrowGap => 3,
            Family::NarrowOpening => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::Shelf => "shelf",
            Family::UnderTable => "under-table",
            Family::NarrowGap => "narrow-gap",
            Family::NarrowOpening => "narrow-opening",
        }
    }

    /// Whether difficulty grows with the parameter (setbacks) or shrinks (openings).
    pub fn increasing(self) -> bool {
        matches!(self, Family::Shelf | Family::UnderTable)
    }

    pub fn default_schedule(self) -> [f64; 5] {
        match self {
            Family::Shelf => [0.08, 0.18, 0.28, 0.38, 0.48],
            Family::UnderTable => [0.1, 0.2, 0.3, 0.4, 0.5],
            Family::NarrowGap | Family::NarrowOpening => [0.5, 0.42, 0.35, 0.3, 0.25],
        }
    }

    pub fn default_object(self) -> ObjectKind {
        match self {
            Family::Shelf => ObjectKind::Screwdriver,
            Family::UnderTable => ObjectKind::Ball,
            Family::NarrowGap => ObjectKind::Box,
            Family::NarrowOpening => ObjectKind::Banana,
        }
    }

    pub fn scenario_id(self, level: u8) -> String {
        format!("{:03}", self.digit() as u32 * 10 + level as u32)
    }
}

impl std::str::FromStr for Family {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s || f.digit().to_string() == s || format!("0{}", f.digit()) == s)
            .ok_or_else(|| format!("unknown family \"{s}\""))
    }
}

/// Built-in procedural target objects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ObjectKind {
    Ball,
    Box,
    Screwdriver,
    Banana,
}

impl ObjectKind {
    pub fn name(self) -> &'static str {
        match self {
            ObjectKind::Ball => "ball",
            ObjectKind::Box => "box",
            ObjectKind::Screwdriver => "screwdriver",
            ObjectKind::Banana => "banana",
        }
    }

    /// Mesh in a resting orientation (long axis horizontal), object frame.
    pub fn mesh(self) -> TriangleMesh {
        match self {
            ObjectKind::Ball => TriangleMesh::icosphere(0.035, 3),
            ObjectKind::Box => TriangleMesh::cuboid(Vector3::new(0.05, 0.025, 0.035)),
            ObjectKind::Screwdriver => TriangleMesh::cylinder(0.015, 0.18, 24)
                .transformed(&Transform::rot_x(std::f64::consts::FRAC_PI_2)),
            ObjectKind::Banana => TriangleMesh::curved_prism(0.12, 1.4, 0.018, 10, 14),
        }
    }
}

/// A family with its five-level difficulty schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioFamily {
    pub family: Family,
    pub schedule: [f64; 5],
}

impl ScenarioFamily {
    pub fn new(family: Family) -> Self {
        Self {
            family,
            schedule: family.default_schedule(),
        }
    }

    /// Setbacks must strictly increase, opening widths strictly decrease, all positive.
    pub fn validate(&self) -> Result<(), ScenarioError> {
        if self.schedule.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(ScenarioError::Schedule("values must be positive".into()));
        }
        let monotone = self.schedule.windows(2).all(|w| {
            if self.family.increasing() {
                w[1] > w[0]
            } else {
                w[1] < w[0]
            }
        });
        if !monotone {
            let dir = if self.family.increasing() { "increase" } else { "decrease" };
            return Err(ScenarioError::Schedule(format!(
                "{} schedule must strictly {dir}: {:?}",
                self.family.name(),
                self.schedule
            )));
        }
        Ok(())
    }
}

/// Axis-aligned box obstacle spanning `[min, max]`, stored centered in its own frame.
fn slab(name: &str, min: [f64; 3], max: [f64; 3]) -> PlacedMesh {
    let (min, max) = (Vector3::from(min), Vector3::from(max));
    let c = (min + max) * 0.5;
    PlacedMesh {
        name: name.to_string(),
        mesh: TriangleMesh::cuboid((max - min) * 0.5),
        pose: Transform::from_translation(c.x, c.y, c.z),
    }
}

/// Places `mesh` so its bounding box is centered on `(x, y)` and rests on `surface_z`.
fn rest_on(name: &str, mesh: TriangleMesh, x: f64, y: f64, surface_z: f64) -> PlacedMesh {
    let b = mesh.aabb();
    let c = b.center();
    PlacedMesh {
        name: name.to_string(),
        pose: Transform::from_translation(x - c.x, y - c.y, surface_z - b.min.z),
        mesh,
    }
}

/// Four legs and a top spanning `x × y`, top surface at `height`.
fn table(prefix: &str, x: [f64; 2], y: [f64; 2], height: f64) -> Vec<PlacedMesh> {
    const LEG: f64 = 0.04;
    let mut out = vec![slab(&format!("{prefix}_top"), [x[0], y[0], height - 0.04], [x[1], y[1], height])];
    for (i, (lx, ly)) in [(x[0], y[0]), (x[1] - LEG, y[0]), (x[0], y[1] - LEG), (x[1] - LEG, y[1] - LEG)]
        .into_iter()
        .enumerate()
    {
        out.push(slab(&format!("{prefix}_leg{i}"), [lx, ly, 0.0], [lx + LEG, ly + LEG, height - 0.04]));
    }
    out
}

/// Geometry constants of each family, meters.
mod layout {
    pub const SHELF_FRONT: f64 = 0.55;
    pub const SHELF_DEPTH: f64 = 0.7;
    pub const SHELF_HALF_WIDTH: f64 = 0.5;
    pub const SHELF_BOARDS: [f64; 4] = [0.0, 0.4, 0.72, 1.05];

    pub const TABLE_NEAR_EDGE: f64 = 0.45;
    pub const TABLE_HEIGHT: f64 = 0.55;
    pub const TABLE_X: [f64; 2] = [-0.3, 0.7];

    pub const WALL_X: f64 = 0.5;
    pub const WALL_HALF_SPAN: f64 = 1.5;
    pub const WALL_HEIGHT: f64 = 1.5;

    pub const PLATFORM_X: [f64; 2] = [0.75, 1.05];
    pub const PLATFORM_HEIGHT: f64 = 0.4;

    pub const WINDOW_CENTER_Z: f64 = 0.75;
    pub const OPENING_TABLE_X: [f64; 2] = [0.62, 0.95];
    pub const OPENING_TABLE_HEIGHT: f64 = 0.6;
}

fn shelf(setback: f64) -> (Vec<PlacedMesh>, (f64, f64, f64), BaseLimits) {
    use layout::*;
    let (x0, x1, w) = (SHELF_FRONT, SHELF_FRONT + SHELF_DEPTH, SHELF_HALF_WIDTH);
    let top = SHELF_BOARDS[SHELF_BOARDS.len() - 1] + PLATE;
    let mut obs: Vec<PlacedMesh> = SHELF_BOARDS
        .iter()
        .enumerate()
        .map(|(i, z)| slab(&format!("board{i}"), [x0, -w, *z], [x1, w, z + PLATE]))
        .collect();
    obs.push(slab("side_left", [x0, w, 0.0], [x1, w + PLATE, top]));
    obs.push(slab("side_right", [x0, -w - PLATE, 0.0], [x1, -w, top]));
    obs.push(slab("back", [x1, -w - PLATE, 0.0], [x1 + PLATE, w + PLATE, top]));
    let object_at = (x0 + setback, 0.0, SHELF_BOARDS[1] + PLATE);
    let limits = BaseLimits {
        x: [-0.5, 0.1],
        y: [-0.5, 0.5],
    };
    (obs, object_at, limits)
}

fn under_table(setback: f64) -> (Vec<PlacedMesh>, (f64, f64, f64), BaseLimits) {
    use layout::*;
    let y0 = TABLE_NEAR_EDGE;
    let obs = table("table", TABLE_X, [y0, y0 + 1.0], TABLE_HEIGHT);
    let object_at = (0.2, y0 + setback, 0.0);
    let limits = BaseLimits {
        x: [-0.5, 0.5],
        y: [-0.5, y0 - 0.25],
    };
    (obs, object_at, limits)
}

fn narrow_gap(width: f64) -> (Vec<PlacedMesh>, (f64, f64, f64), BaseLimits) {
    use layout::*;
    let (x0, x1) = (WALL_X, WALL_X + 0.05);
    let half = width / 2.0;
    let mut obs = vec![
        slab("wall_left", [x0, half, 0.0], [x1, WALL_HALF_SPAN, WALL_HEIGHT]),
        slab("wall_right", [x0, -WALL_HALF_SPAN, 0.0], [x1, -half, WALL_HEIGHT]),
    ];
    obs.push(slab(
        "platform",
        [PLATFORM_X[0], -0.2, 0.0],
        [PLATFORM_X[1], 0.2, PLATFORM_HEIGHT],
    ));
    let object_at = (0.5 * (PLATFORM_X[0] + PLATFORM_X[1]), 0.0, PLATFORM_HEIGHT);
    let limits = BaseLimits {
        x: [-0.5, 0.3],
        y: [-0.5, 0.5],
    };
    (obs, object_at, limits)
}

fn narrow_opening(width: f64) -> (Vec<PlacedMesh>, (f64, f64, f64), BaseLimits) {
    use layout::*;
    let (x0, x1) = (WALL_X, WALL_X + 0.05);
    let half = width / 2.0;
    let (zl, zh) = (WINDOW_CENTER_Z - half, WINDOW_CENTER_Z + half);
    let mut obs = vec![
        slab("wall_below", [x0, -WALL_HALF_SPAN, 0.0], [x1, WALL_HALF_SPAN, zl]),
        slab("wall_above", [x0, -WALL_HALF_SPAN, zh], [x1, WALL_HALF_SPAN, WALL_HEIGHT]),
        slab("wall_left", [x0, half, zl], [x1, WALL_HALF_SPAN, zh]),
        slab("wall_right", [x0, -WALL_HALF_SPAN, zl], [x1, -half, zh]),
    ];
    obs.extend(table("table", OPENING_TABLE_X, [-0.25, 0.25], OPENING_TABLE_HEIGHT));
    let object_at = (0.5 * (OPENING_TABLE_X[0] + OPENING_TABLE_X[1]), 0.0, OPENING_TABLE_HEIGHT);
    let limits = BaseLimits {
        x: [-0.5, 0.2],
        y: [-0.5, 0.5],
    };
    (obs, object_at, limits)
}

/// One scenario of `family` at `level` (1–5) with difficulty parameter `value`.
pub fn generate_scenario(
    family: Family,
    level: u8,
    value: f64,
    object: Option<(&str, &TriangleMesh)>,
) -> Scenario {
    let (obstacles, (x, y, z), base_limits) = match family {
        Family::Shelf => shelf(value),
        Family::UnderTable => under_table(value),
        Family::NarrowGap => narrow_gap(value),
        Family::NarrowOpening => narrow_opening(value),
    };
    let kind = family.default_object();
    let (name, mesh) = match object {
        Some((n, m)) => (n.to_string(), m.clone()),
        None => (kind.name().to_string(), kind.mesh()),
    };
    Scenario {
        id: family.scenario_id(level),
        family,
        level,
        difficulty: value,
        obstacles,
        target: rest_on(&name, mesh, x, y, z),
        base_limits,
        q_start: ready_configuration(),
        grasp_file: None,
        ik_file: None,
        source_dir: None,
    }
}

/// The five scenarios of a family, easiest first. Geometry is fully determined
/// by the schedule; an optional user mesh replaces the built-in object.
pub fn generate_family(
    spec: &ScenarioFamily,
    object: Option<(&str, &TriangleMesh)>,
) -> Result<Vec<Scenario>, ScenarioError> {
    spec.validate()?;
    Ok(spec
        .schedule
        .iter()
        .enumerate()
        .map(|(i, v)| generate_scenario(spec.family, i as u8 + 1, *v, object))
        .collect())
}
