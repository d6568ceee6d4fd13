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

//! Repeated-trial benchmark runner, per-run records and aggregate statistics.
//!
//! Means and standard deviations are taken over all runs, failed ones included
//! at their stopping time. The standard deviation is the population form.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::BenchError;
use crate::grasping::GraspSet;
use crate::ik::IkSolutionSet;
use crate::par::Execution;
use crate::planners::{plan_ik_rrt, plan_jplus_rrt, PlanResult, Planner, PlannerParams, PlanningProblem};
use crate::robot::KinematicChain;
use crate::scenario::{IkFile, Scenario};

pub const RECORD_HEADER: [&str; 9] = [
    "scenario",
    "planner",
    "seed",
    "target",
    "success",
    "time_s",
    "iterations",
    "path_len",
    "final_dist",
];

/// Goal of a run: a specific grasp (IK-RRT) or the whole set (J⁺-RRT).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Target {
    Any,
    Grasp(usize),
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Any => f.write_str("any"),
            Target::Grasp(i) => write!(f, "{i}"),
        }
    }
}

impl FromStr for Target {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        if s == "any" {
            return Ok(Target::Any);
        }
        s.parse().map(Target::Grasp).map_err(|_| format!("invalid target \"{s}\""))
    }
}

impl Serialize for Target {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Target {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// One planner run; one CSV row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub scenario: String,
    pub planner: Planner,
    pub seed: u64,
    pub target: Target,
    pub success: bool,
    pub time_s: f64,
    pub iterations: u64,
    pub path_len: f64,
    pub final_dist: f64,
}

/// Sum of joint-space Euclidean segment lengths.
pub fn path_length(result: &PlanResult) -> f64 {
    result.path.windows(2).map(|w| w[0].distance(&w[1])).sum()
}

/// Seed of trial `trial`: the base seed plus the trial index, shared by every
/// scenario, planner and target so that runs are comparable across them.
pub fn trial_seed(base: u64, trial: u64) -> u64 {
    base.wrapping_add(trial)
}

/// A scenario with whatever annotations could be loaded for it.
#[derive(Debug, Clone)]
pub struct BenchScenario {
    pub scenario: Scenario,
    pub grasps: Result<GraspSet, String>,
    pub ik: Result<IkSolutionSet, String>,
    /// Time spent computing the IK set, kept apart from planning times.
    pub ik_time_s: Option<f64>,
}

impl BenchScenario {
    /// Reads the grasp and IK files the scenario manifest references.
    pub fn load(scenario: Scenario) -> Self {
        let grasps = match scenario.grasp_path() {
            None => Err("scenario has no grasp file".to_string()),
            Some(p) => std::fs::read_to_string(&p)
                .map_err(|e| format!("{}: {e}", p.display()))
                .and_then(|src| GraspSet::from_json(&src).map_err(|e| format!("{}: {e}", p.display()))),
        };
        let (ik, ik_time_s) = match scenario.ik_path() {
            None => (Err("scenario has no IK file".to_string()), None),
            Some(p) => match IkFile::load(&p) {
                Ok(f) => (Ok(f.to_set()), f.time_s),
                Err(e) => (Err(e.to_string()), None),
            },
        };
        Self {
            scenario,
            grasps,
            ik,
            ik_time_s,
        }
    }
}

/// Annotation sizes of one scenario, as reported next to the statistics.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ScenarioMeta {
    pub grasps: Option<usize>,
    pub ik_solutions: Option<usize>,
    pub ik_time_s: Option<f64>,
}

/// A (scenario, planner) pair that could not be benchmarked.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchFailure {
    pub scenario: String,
    pub planner: Planner,
    pub message: String,
}

#[derive(Debug, Clone, Default)]
pub struct BenchOutcome {
    pub records: Vec<RunRecord>,
    pub failures: Vec<BenchFailure>,
    pub meta: BTreeMap<String, ScenarioMeta>,
}

struct Job<'a> {
    input: &'a BenchScenario,
    planner: Planner,
    target: Target,
    trial: u64,
}

/// Runs `runs` trials of every planner on every scenario.
///
/// J⁺-RRT runs against the full grasp set; IK-RRT runs `runs` trials per IK
/// solution. Missing annotations become [`BenchFailure`]s and the run goes on.
/// Records come back ordered by (scenario, planner, target, trial).
pub fn run_benchmark(
    inputs: &[BenchScenario],
    robot: &KinematicChain,
    planners: &[Planner],
    runs: usize,
    params: &PlannerParams,
    exec: Execution,
) -> Result<BenchOutcome, BenchError> {
    if runs == 0 {
        return Err(BenchError::Params("runs must be at least 1".into()));
    }
    params.validate().map_err(|e| BenchError::Params(e.to_string()))?;
    let mut out = BenchOutcome::default();
    let mut jobs = Vec::new();
    for input in inputs {
        let id = &input.scenario.id;
        out.meta.insert(
            id.clone(),
            ScenarioMeta {
                grasps: input.grasps.as_ref().ok().map(GraspSet::len),
                ik_solutions: input.ik.as_ref().ok().map(IkSolutionSet::len),
                ik_time_s: input.ik_time_s,
            },
        );
        for &planner in planners {
            let targets: Vec<Target> = match (planner, &input.grasps, &input.ik) {
                (Planner::JPlusRrt, Ok(g), _) if !g.is_empty() => vec![Target::Any],
                (Planner::JPlusRrt, Ok(_), _) => {
                    out.failures.push(failure(id, planner, "grasp set is empty"));
                    continue;
                }
                (Planner::JPlusRrt, Err(e), _) => {
                    out.failures.push(failure(id, planner, e));
                    continue;
                }
                (Planner::IkRrt, _, Ok(ik)) => ik.solutions.iter().map(|s| Target::Grasp(s.grasp_index)).collect(),
                (Planner::IkRrt, _, Err(e)) => {
                    out.failures.push(failure(id, planner, e));
                    continue;
                }
            };
            for target in targets {
                for trial in 0..runs as u64 {
                    jobs.push(Job {
                        input,
                        planner,
                        target,
                        trial,
                    });
                }
            }
        }
    }

    let chains: BTreeMap<&str, KinematicChain> =
        inputs.iter().map(|i| (i.scenario.id.as_str(), i.scenario.chain(robot))).collect();
    let scenes: BTreeMap<&str, _> = inputs.iter().map(|i| (i.scenario.id.as_str(), i.scenario.scene())).collect();

    let results = exec.map(&jobs, |job| {
        let s = &job.input.scenario;
        let chain = &chains[s.id.as_str()];
        let problem = PlanningProblem::new(chain, &scenes[s.id.as_str()], s.q_start);
        let seed = trial_seed(params.seed, job.trial);
        let p = PlannerParams {
            seed,
            ..params.clone()
        };
        let result = match (job.planner, job.target) {
            (Planner::JPlusRrt, _) => plan_jplus_rrt(&problem, job.input.grasps.as_ref().expect("checked"), &p),
            (Planner::IkRrt, Target::Grasp(g)) => {
                let ik = job.input.ik.as_ref().expect("checked");
                let sol = ik.solutions.iter().find(|s| s.grasp_index == g).expect("target from IK set");
                let pose = job.input.grasps.as_ref().ok().and_then(|gs| gs.grasps.get(g)).map(|g| g.pose);
                plan_ik_rrt(&problem, &sol.q, pose.as_ref(), &p)
            }
            (Planner::IkRrt, Target::Any) => unreachable!("IK-RRT runs target a grasp"),
        };
        result.map(|r| RunRecord {
            scenario: s.id.clone(),
            planner: job.planner,
            seed,
            target: job.target,
            success: r.success,
            time_s: r.time_s,
            iterations: r.iterations,
            path_len: path_length(&r),
            final_dist: r.final_distance,
        })
    });

    let mut failed = BTreeMap::new();
    for (job, r) in jobs.iter().zip(results) {
        match r {
            Ok(rec) => out.records.push(rec),
            Err(e) => {
                failed
                    .entry((job.input.scenario.id.clone(), job.planner))
                    .or_insert_with(|| e.to_string());
            }
        }
    }
    for ((scenario, planner), message) in failed {
        out.failures.push(BenchFailure {
            scenario,
            planner,
            message,
        });
    }
    Ok(out)
}

fn failure(scenario: &str, planner: Planner, message: &str) -> BenchFailure {
    BenchFailure {
        scenario: scenario.to_string(),
        planner,
        message: message.to_string(),
    }
}

/// One row of the summary table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub scenario: String,
    pub planner: Planner,
    pub runs: usize,
    pub successes: usize,
    pub success_rate: f64,
    /// Over all runs; `None` when there are none.
    pub mean_time: Option<f64>,
    pub std_time: Option<f64>,
    pub mean_iterations: Option<f64>,
    /// |𝒢|, from the grasp file.
    pub grasps: Option<usize>,
    /// |𝒢_ik|, from the IK file.
    pub ik_solutions: Option<usize>,
    /// IK targets solved at least once (IK-RRT only).
    pub reachable_targets: Option<usize>,
    pub ik_time_s: Option<f64>,
    pub note: Option<String>,
}

pub const NO_IK_NOTE: &str = "no IK solutions";

/// Folds records into one row per (scenario, planner), independent of record order.
///
/// `meta` supplies |𝒢|, |𝒢_ik| and IK timing. A scenario whose IK set is empty
/// gets an IK-RRT row with zero runs and success rate 0 when `planners` includes IK-RRT.
pub fn summarize(records: &[RunRecord], meta: &BTreeMap<String, ScenarioMeta>, planners: &[Planner]) -> Vec<SummaryRow> {
    let mut groups: BTreeMap<(String, Planner), Vec<&RunRecord>> = BTreeMap::new();
    for r in records {
        groups.entry((r.scenario.clone(), r.planner)).or_default().push(r);
    }
    if planners.contains(&Planner::IkRrt) {
        for (id, m) in meta {
            if m.ik_solutions == Some(0) {
                groups.entry((id.clone(), Planner::IkRrt)).or_default();
            }
        }
    }
    groups
        .into_iter()
        .map(|((scenario, planner), recs)| {
            let m = meta.get(&scenario).cloned().unwrap_or_default();
            let runs = recs.len();
            let successes = recs.iter().filter(|r| r.success).count();
            let mut times: Vec<f64> = recs.iter().map(|r| r.time_s).collect();
            times.sort_by(f64::total_cmp);
            let (mean_time, std_time) = mean_std(&times);
            let mut iters: Vec<u64> = recs.iter().map(|r| r.iterations).collect();
            iters.sort_unstable();
            let mean_iterations = (runs > 0).then(|| iters.iter().map(|&i| i as f64).sum::<f64>() / runs as f64);
            let reachable_targets = (planner == Planner::IkRrt).then(|| {
                let mut hit: Vec<Target> = recs.iter().filter(|r| r.success).map(|r| r.target).collect();
                hit.sort();
                hit.dedup();
                hit.len()
            });
            let note = (planner == Planner::IkRrt && runs == 0 && m.ik_solutions == Some(0)).then(|| NO_IK_NOTE.to_string());
            SummaryRow {
                scenario,
                planner,
                runs,
                successes,
                success_rate: if runs == 0 { 0.0 } else { successes as f64 / runs as f64 },
                mean_time,
                std_time,
                mean_iterations,
                grasps: m.grasps,
                ik_solutions: m.ik_solutions,
                reachable_targets,
                ik_time_s: m.ik_time_s,
                note,
            }
        })
        .collect()
}

/// Mean and population standard deviation; `None` for an empty slice.
fn mean_std(values: &[f64]) -> (Option<f64>, Option<f64>) {
    if values.is_empty() {
        return (None, None);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (Some(mean), Some(var.sqrt()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveAxis {
    Time,
    Iterations,
}

/// Fraction of runs that succeeded at or before each grid value.
pub fn cumulative_success_curve(records: &[RunRecord], axis: CurveAxis, grid: &[f64]) -> Result<Vec<(f64, f64)>, BenchError> {
    let first = records.first().ok_or(BenchError::EmptyRecords)?;
    if let Some(r) = records
        .iter()
        .find(|r| r.scenario != first.scenario || r.planner != first.planner)
    {
        return Err(BenchError::MixedRecords(format!(
            "{}/{} and {}/{}",
            first.scenario, first.planner, r.scenario, r.planner
        )));
    }
    let mut at: Vec<f64> = records
        .iter()
        .filter(|r| r.success)
        .map(|r| match axis {
            CurveAxis::Time => r.time_s,
            CurveAxis::Iterations => r.iterations as f64,
        })
        .collect();
    at.sort_by(f64::total_cmp);
    let n = records.len() as f64;
    Ok(grid
        .iter()
        .map(|&x| (x, at.partition_point(|&v| v <= x) as f64 / n))
        .collect())
}

/// `count` evenly spaced points on `[0, max]`.
pub fn uniform_grid(max: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![max],
        _ => (0..count).map(|i| max * i as f64 / (count - 1) as f64).collect(),
    }
}

pub fn write_records<W: Write>(records: &[RunRecord], w: W) -> Result<(), BenchError> {
    let mut wr = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    wr.write_record(RECORD_HEADER)?;
    for r in records {
        wr.serialize(r)?;
    }
    wr.flush()?;
    Ok(())
}

pub fn read_records<R: Read>(r: R) -> Result<Vec<RunRecord>, BenchError> {
    let mut rd = csv::Reader::from_reader(r);
    let header: Vec<String> = rd.headers()?.iter().map(str::to_string).collect();
    if header != RECORD_HEADER {
        return Err(BenchError::Params(format!("unexpected record header {header:?}")));
    }
    Ok(rd.deserialize().collect::<Result<_, _>>()?)
}

pub fn write_curve<W: Write>(curve: &[(f64, f64)], axis: CurveAxis, w: W) -> Result<(), BenchError> {
    let mut wr = csv::Writer::from_writer(w);
    let x = match axis {
        CurveAxis::Time => "time_s",
        CurveAxis::Iterations => "iterations",
    };
    wr.write_record([x, "fraction"])?;
    for (x, f) in curve {
        wr.write_record([x.to_string(), f.to_string()])?;
    }
    wr.flush()?;
    Ok(())
}

/// Aligned plain-text table, one line per summary row.
pub fn format_table(rows: &[SummaryRow]) -> String {
    let opt = |v: Option<usize>| v.map_or("-".to_string(), |v| v.to_string());
    let header = [
        "scenario", "planner", "|G|", "|G_ik|", "reach", "runs", "success", "time mean/std [s]", "iters", "IK time [s]", "note",
    ];
    let body: Vec<[String; 11]> = rows
        .iter()
        .map(|r| {
            [
                r.scenario.clone(),
                r.planner.to_string(),
                opt(r.grasps),
                opt(r.ik_solutions),
                opt(r.reachable_targets),
                r.runs.to_string(),
                format!("{:.2}", r.success_rate),
                match (r.mean_time, r.std_time) {
                    (Some(m), Some(s)) => format!("{m:.2}/{s:.2}"),
                    _ => "-".into(),
                },
                r.mean_iterations.map_or("-".into(), |i| format!("{i:.0}")),
                r.ik_time_s.map_or("-".into(), |t| format!("{t:.2}")),
                r.note.clone().unwrap_or_default(),
            ]
        })
        .collect();
    let mut widths = header.map(str::len);
    for row in &body {
        for (w, c) in widths.iter_mut().zip(row) {
            *w = (*w).max(c.chars().count());
        }
    }
    let mut out = String::new();
    let mut line = |cells: &[String]| {
        let mut l = String::new();
        for (i, (c, w)) in cells.iter().zip(widths).enumerate() {
            if i > 0 {
                l.push_str("  ");
            }
            let pad = w - c.chars().count();
            // Text columns left-aligned, numbers right-aligned.
            if i < 2 || i == 10 {
                let _ = write!(l, "{c}{}", " ".repeat(pad));
            } else {
                let _ = write!(l, "{}{c}", " ".repeat(pad));
            }
        }
        out.push_str(l.trim_end());
        out.push('\n');
    };
    line(&header.map(str::to_string));
    for row in &body {
        line(row);
    }
    out
}
