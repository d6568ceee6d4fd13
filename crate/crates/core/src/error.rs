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

use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("mesh has no triangles")]
    EmptyMesh,
    #[error("vertex {0} has a non-finite coordinate")]
    NonFiniteVertex(usize),
    #[error("triangle {triangle} references vertex {index} but the mesh has {vertex_count} vertices")]
    IndexOutOfRange {
        triangle: usize,
        index: usize,
        vertex_count: usize,
    },
    #[error("triangle {triangle} is degenerate (area {area:e} m²)")]
    DegenerateTriangle { triangle: usize, area: f64 },
    #[error("OBJ line {line}: {message}")]
    Obj { line: usize, message: String },
    #[error("interpolation parameter {0} outside [0, 1]")]
    InterpolationOutOfRange(f64),
}

#[derive(Debug, Error)]
pub enum RobotError {
    #[error("unsupported robot description format {found} (expected {expected})")]
    FormatVersion { found: u32, expected: u32 },
    #[error("robot description must list exactly {expected} joints, found {found}")]
    JointCount { expected: usize, found: usize },
    #[error("joint {index}: {message}")]
    Joint { index: usize, message: String },
    #[error("collision spheres given for {found} links, expected {expected}")]
    LinkCount { expected: usize, found: usize },
    #[error("invalid transform in robot description: {0}")]
    Transform(String),
    #[error("robot description JSON: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Error)]
pub enum GraspError {
    #[error("invalid sampler parameters: {0}")]
    Params(String),
    #[error("no collision-free grasp candidates survived filtering")]
    NoSurvivors,
    #[error("invalid grasp set: {0}")]
    Invalid(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Error)]
pub enum PlanError {
    #[error("invalid planner parameters: {0}")]
    Params(String),
    #[error("start configuration is in collision or outside joint limits")]
    StartInCollision,
    #[error("target configuration is in collision or outside joint limits")]
    TargetInCollision,
    #[error("grasp set is empty")]
    NoGrasps,
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("{path}: unsupported format version {found} (expected {expected})")]
    FormatVersion {
        path: PathBuf,
        found: u32,
        expected: u32,
    },
    #[error("{path}: {source}")]
    Mesh {
        path: PathBuf,
        #[source]
        source: GeometryError,
    },
    #[error("{path}: {source}")]
    Robot {
        path: PathBuf,
        #[source]
        source: RobotError,
    },
    #[error("{path}: {message}")]
    Invalid { path: PathBuf, message: String },
    #[error("invalid difficulty schedule: {0}")]
    Schedule(String),
    #[error(transparent)]
    Grasp(#[from] GraspError),
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid benchmark parameters: {0}")]
    Params(String),
    #[error("no run records")]
    EmptyRecords,
    #[error("records mix scenarios or planners: {0}")]
    MixedRecords(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
