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

//! `reachgrasp` command-line front end.
//!
//! Every command that writes files creates a fresh run directory under the
//! output root (`--out`, or `REACHGRASP_OUT`, or `./runs`) and records its full
//! parameterization in `manifest.json` there.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use log::warn;
use serde_json::{json, Value};

use reachgrasp::audit::{audit_grasps, audit_ik, audit_path, audit_scenario};
use reachgrasp::bench::{
    cumulative_success_curve, format_table, run_benchmark, summarize, uniform_grid, write_curve, write_records,
    BenchScenario, CurveAxis, RunRecord,
};
use reachgrasp::grasping::{generate_grasp_set, gripper_mesh, GraspSet, SamplerParams};
use reachgrasp::ik::IkParams;
use reachgrasp::par::{set_jobs, Execution};
use reachgrasp::planners::{plan_ik_rrt, plan_jplus_rrt, PathFile, Planner, PlannerParams, PlanningProblem};
use reachgrasp::robot::KinematicChain;
use reachgrasp::scenario::{
    annotate_scenario, compute_ik_for, generate_family, grasp_seed, load_scenario, save_scenario, Family, IkFile,
    Scenario, ScenarioFamily, GRASP_FILE, IK_FILE, MANIFEST_FILE,
};
use reachgrasp::geometry::TriangleMesh;

/// Environment variable naming the default output root.
const OUT_ENV: &str = "REACHGRASP_OUT";

#[derive(Parser, Debug)]
#[command(name = "reachgrasp", version, about = "Grasp synthesis, IK sets, J+-RRT / IK-RRT planning and benchmarks")]
struct Cli {
    /// Output root; each run writes into a fresh time-stamped directory below it.
    #[arg(long, global = true, env = OUT_ENV, default_value = "runs")]
    out: PathBuf,
    /// Worker threads for batch work (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Base random seed.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate scenario families as manifests, annotated with grasps and IK sets.
    GenScenarios(GenArgs),
    /// Sample a grasp set for a scenario.
    SampleGrasps(SampleArgs),
    /// Compute the IK set of a scenario's grasps.
    ComputeIk(IkArgs),
    /// Run one planner once and store the path.
    Plan(PlanArgs),
    /// Repeated-trial benchmark with records, summary and success curves.
    Bench(BenchArgs),
    /// Re-check a scenario, grasp, IK or path file.
    Validate(ValidateArgs),
}

#[derive(Args, Debug, Clone)]
struct PlannerFlags {
    /// Goal-sampling probability.
    #[arg(long, default_value_t = 0.01)]
    p_goal: f64,
    /// Largest per-joint step of one extension.
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    /// Task-space goal tolerance (1 mm ≡ 1°).
    #[arg(long, default_value_t = 50.0)]
    d_goal: f64,
    /// Wall-clock budget per run, seconds.
    #[arg(long, default_value_t = 120.0)]
    max_time: f64,
    /// Cap on random samples per run.
    #[arg(long)]
    max_iterations: Option<u64>,
    /// J+-RRT: sample goals proportionally to grasp score.
    #[arg(long)]
    score_bias: bool,
    /// IK-RRT tree connection distance (default: epsilon).
    #[arg(long)]
    connect_threshold: Option<f64>,
}

impl PlannerFlags {
    fn params(&self, seed: u64) -> Result<PlannerParams, CliError> {
        let p = PlannerParams {
            epsilon: self.epsilon,
            p_goal: self.p_goal,
            d_goal: self.d_goal,
            max_time: self.max_time,
            seed,
            score_bias: self.score_bias,
            connect_threshold: self.connect_threshold,
            max_iterations: self.max_iterations,
            ..PlannerParams::default()
        };
        p.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(p)
    }
}

#[derive(Args, Debug, Clone)]
struct SamplerFlags {
    /// Friction coefficient.
    #[arg(long, default_value_t = 1.0)]
    mu: f64,
    /// Rays cast per surface point inside the friction cone.
    #[arg(long, default_value_t = 16)]
    rays_per_point: usize,
    /// Approach directions per contact pair.
    #[arg(long, default_value_t = 6)]
    approach_directions: usize,
    /// Maximum gripper opening, meters.
    #[arg(long, default_value_t = 0.08)]
    max_opening: f64,
    /// Raw grasp candidates before filtering.
    #[arg(long, default_value_t = 20_000)]
    raw_budget: usize,
    /// Grasps kept after farthest-point thinning.
    #[arg(long, default_value_t = 200)]
    output_size: usize,
}

impl SamplerFlags {
    fn params(&self) -> Result<SamplerParams, CliError> {
        let p = SamplerParams {
            mu: self.mu,
            rays_per_point: self.rays_per_point,
            approach_directions: self.approach_directions,
            max_opening: self.max_opening,
            raw_budget: self.raw_budget,
            output_size: self.output_size,
        };
        p.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(p)
    }
}

#[derive(Args, Debug, Clone)]
struct IkFlags {
    /// IK success threshold in pose-distance units.
    #[arg(long, default_value_t = 1.0)]
    ik_threshold: f64,
    /// Iterations per IK attempt.
    #[arg(long, default_value_t = 300)]
    ik_max_iterations: usize,
    /// IK attempts per grasp.
    #[arg(long, default_value_t = 1)]
    ik_restarts: usize,
}

impl IkFlags {
    fn params(&self) -> Result<IkParams, CliError> {
        let p = IkParams {
            threshold: self.ik_threshold,
            max_iterations: self.ik_max_iterations,
            restarts: self.ik_restarts,
            ..IkParams::default()
        };
        p.validate().map_err(CliError::Usage)?;
        Ok(p)
    }
}

#[derive(Args, Debug)]
struct GenArgs {
    /// Families to generate (default: all four).
    #[arg(long, value_delimiter = ',')]
    family: Vec<Family>,
    /// Five difficulty values overriding the default schedule (one family only).
    #[arg(long, value_delimiter = ',', num_args = 5)]
    schedule: Option<Vec<f64>>,
    /// OBJ mesh replacing the built-in target object.
    #[arg(long)]
    object: Option<PathBuf>,
    /// Write manifests only, without grasp and IK files.
    #[arg(long)]
    no_annotate: bool,
    #[command(flatten)]
    sampler: SamplerFlags,
    #[command(flatten)]
    ik: IkFlags,
}

#[derive(Args, Debug)]
struct SampleArgs {
    /// Scenario directory or manifest.
    scenario: PathBuf,
    /// Write next to the scenario and update its manifest instead of the run directory.
    #[arg(long)]
    in_place: bool,
    #[command(flatten)]
    sampler: SamplerFlags,
}

#[derive(Args, Debug)]
struct IkArgs {
    /// Scenario directory or manifest.
    scenario: PathBuf,
    /// Grasp file (default: the one the scenario references).
    #[arg(long)]
    grasps: Option<PathBuf>,
    /// Write next to the scenario and update its manifest instead of the run directory.
    #[arg(long)]
    in_place: bool,
    #[command(flatten)]
    ik: IkFlags,
}

#[derive(Args, Debug)]
struct PlanArgs {
    /// Scenario directory or manifest.
    scenario: PathBuf,
    #[arg(long, default_value = "jplus-rrt")]
    planner: Planner,
    /// IK-RRT: grasp index to plan to (default: first IK solution).
    #[arg(long)]
    target: Option<usize>,
    #[command(flatten)]
    planner_flags: PlannerFlags,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// Scenario directories, manifests, or directories containing scenario directories.
    #[arg(required = true)]
    scenarios: Vec<PathBuf>,
    /// Planners to run (default: both).
    #[arg(long, value_delimiter = ',')]
    planner: Vec<Planner>,
    /// Trials per scenario (J+-RRT) or per IK target (IK-RRT).
    #[arg(long, default_value_t = 100)]
    runs: usize,
    /// Points per success-rate curve.
    #[arg(long, default_value_t = 101)]
    curve_points: usize,
    #[command(flatten)]
    planner_flags: PlannerFlags,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    /// Scenario directory/manifest, grasp file, IK file or path file.
    file: PathBuf,
    /// Scenario the file belongs to (needed for IK and path files).
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Grasp file (default: the one the scenario references).
    #[arg(long)]
    grasps: Option<PathBuf>,
}

#[derive(Debug)]
enum CliError {
    /// Bad invocation; exit code 2.
    Usage(String),
    /// Runtime or validation failure; exit code 1.
    Failure(String),
}

impl<E: std::error::Error> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError::Failure(e.to_string())
    }
}

fn fail(msg: impl Into<String>) -> CliError {
    CliError::Failure(msg.into())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(j) = cli.jobs {
        if j == 0 {
            eprintln!("error: --jobs must be at least 1");
            return ExitCode::from(2);
        }
        set_jobs(j);
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(CliError::Failure(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::GenScenarios(a) => gen_scenarios(cli, a),
        Command::SampleGrasps(a) => sample_grasps(cli, a),
        Command::ComputeIk(a) => compute_ik(cli, a),
        Command::Plan(a) => plan(cli, a),
        Command::Bench(a) => bench(cli, a),
        Command::Validate(a) => validate(a),
    }
}

/// A fresh `<root>/<command>-<unix seconds>[-n]` directory.
fn run_dir(root: &Path, command: &str) -> Result<(PathBuf, u64), CliError> {
    let stamp = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    fs::create_dir_all(root).map_err(|e| fail(format!("{}: {e}", root.display())))?;
    for n in 0.. {
        let name = if n == 0 {
            format!("{command}-{stamp}")
        } else {
            format!("{command}-{stamp}-{n}")
        };
        let dir = root.join(name);
        match fs::create_dir(&dir) {
            Ok(()) => return Ok((dir, stamp)),
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => continue,
            Err(e) => return Err(fail(format!("{}: {e}", dir.display()))),
        }
    }
    unreachable!()
}

fn write_manifest(dir: &Path, cli: &Cli, command: &str, created: u64, params: Value, outputs: &[String]) -> Result<(), CliError> {
    let manifest = json!({
        "tool": "reachgrasp",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "argv": std::env::args().collect::<Vec<_>>(),
        "created_unix": created,
        "seed": cli.seed,
        "jobs": cli.jobs,
        "params": params,
        "outputs": outputs,
    });
    write(&dir.join("manifest.json"), &serde_json::to_string_pretty(&manifest).expect("json"))
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| fail(format!("{}: {e}", path.display())))
}

fn load_grasps(path: &Path) -> Result<GraspSet, CliError> {
    let src = fs::read_to_string(path).map_err(|e| fail(format!("{}: {e}", path.display())))?;
    GraspSet::from_json(&src).map_err(|e| fail(format!("{}: {e}", path.display())))
}

fn scenario_grasps(s: &Scenario, explicit: Option<&Path>) -> Result<GraspSet, CliError> {
    match explicit {
        Some(p) => load_grasps(p),
        None => {
            let p = s
                .grasp_path()
                .ok_or_else(|| fail(format!("scenario {} references no grasp file; pass --grasps", s.id)))?;
            load_grasps(&p)
        }
    }
}

fn gen_scenarios(cli: &Cli, a: &GenArgs) -> Result<(), CliError> {
    let families = if a.family.is_empty() {
        Family::ALL.to_vec()
    } else {
        a.family.clone()
    };
    if a.schedule.is_some() && families.len() != 1 {
        return Err(CliError::Usage("--schedule needs exactly one --family".into()));
    }
    let sampler = a.sampler.params()?;
    let ik = a.ik.params()?;
    let object = match &a.object {
        Some(p) => {
            let src = fs::read_to_string(p).map_err(|e| fail(format!("{}: {e}", p.display())))?;
            let mesh = TriangleMesh::from_obj_str(&src).map_err(|e| fail(format!("{}: {e}", p.display())))?;
            if !mesh.is_closed() {
                return Err(fail(format!("{}: target mesh must be closed", p.display())));
            }
            let name = p.file_stem().map_or("object".into(), |s| s.to_string_lossy().into_owned());
            Some((name, mesh))
        }
        None => None,
    };
    let robot = KinematicChain::builtin();
    let (dir, created) = run_dir(&cli.out, "gen-scenarios")?;
    let mut outputs = Vec::new();
    println!("{:<6} {:<15} {:>6} {:>6} {:>7} {:>9}", "id", "family", "level", "|G|", "|G_ik|", "IK [s]");
    for family in families {
        let mut spec = ScenarioFamily::new(family);
        if let Some(s) = &a.schedule {
            spec.schedule.copy_from_slice(s);
        }
        let scenarios = generate_family(&spec, object.as_ref().map(|(n, m)| (n.as_str(), m)))
            .map_err(|e| CliError::Usage(e.to_string()))?;
        for mut s in scenarios {
            let sdir = dir.join(&s.id);
            if a.no_annotate {
                save_scenario(&s, &sdir)?;
                println!("{:<6} {:<15} {:>6} {:>6} {:>7} {:>9}", s.id, family.name(), s.level, "-", "-", "-");
            } else {
                let ann = annotate_scenario(&mut s, &sdir, &robot, &sampler, &ik, cli.seed, Execution::Parallel)?;
                if ann.grasps.incomplete {
                    warn!("scenario {}: only {} grasps survived filtering", s.id, ann.grasps.len());
                }
                println!(
                    "{:<6} {:<15} {:>6} {:>6} {:>7} {:>9.3}",
                    s.id,
                    family.name(),
                    s.level,
                    ann.grasps.len(),
                    ann.ik.len(),
                    ann.ik_time_s
                );
            }
            outputs.push(s.id.clone());
        }
    }
    write_manifest(
        &dir,
        cli,
        "gen-scenarios",
        created,
        json!({ "sampler": sampler, "ik": ik, "annotate": !a.no_annotate, "schedule": a.schedule, "object": a.object }),
        &outputs,
    )?;
    println!("wrote {}", dir.display());
    Ok(())
}

fn sample_grasps(cli: &Cli, a: &SampleArgs) -> Result<(), CliError> {
    let sampler = a.sampler.params()?;
    let mut s = load_scenario(&a.scenario)?;
    let seed = grasp_seed(cli.seed, &s.id);
    let t = std::time::Instant::now();
    let set = generate_grasp_set(&s.grasp_target(), &s.scene(), &gripper_mesh(), &sampler, seed, Execution::Parallel)?;
    let elapsed = t.elapsed().as_secs_f64();
    if set.incomplete {
        warn!("only {} grasps survived filtering", set.len());
    }
    println!("scenario {}: {} grasps in {elapsed:.3} s", s.id, set.len());
    if a.in_place {
        let dir = s.source_dir.clone().unwrap_or_default();
        write(&dir.join(GRASP_FILE), &set.to_json())?;
        s.grasp_file = Some(GRASP_FILE.into());
        save_scenario(&s, &dir)?;
        println!("wrote {}", dir.join(GRASP_FILE).display());
    } else {
        let (dir, created) = run_dir(&cli.out, "sample-grasps")?;
        write(&dir.join(GRASP_FILE), &set.to_json())?;
        write_manifest(
            &dir,
            cli,
            "sample-grasps",
            created,
            json!({ "scenario": a.scenario, "sampler": sampler, "grasp_seed": seed, "time_s": elapsed }),
            &[GRASP_FILE.into()],
        )?;
        println!("wrote {}", dir.join(GRASP_FILE).display());
    }
    Ok(())
}

fn compute_ik(cli: &Cli, a: &IkArgs) -> Result<(), CliError> {
    let params = a.ik.params()?;
    let mut s = load_scenario(&a.scenario)?;
    let grasps = scenario_grasps(&s, a.grasps.as_deref())?;
    let robot = KinematicChain::builtin();
    let (set, elapsed) = compute_ik_for(&s, &grasps, &robot, &params, cli.seed, Execution::Parallel);
    println!(
        "scenario {}: {} of {} grasps have IK solutions; batch time {elapsed:.3} s",
        s.id,
        set.len(),
        grasps.len()
    );
    let file = IkFile::new(&set, Some(params.clone()), Some(elapsed));
    if a.in_place {
        let dir = s.source_dir.clone().unwrap_or_default();
        file.save(&dir.join(IK_FILE))?;
        s.ik_file = Some(IK_FILE.into());
        save_scenario(&s, &dir)?;
        println!("wrote {}", dir.join(IK_FILE).display());
    } else {
        let (dir, created) = run_dir(&cli.out, "compute-ik")?;
        file.save(&dir.join(IK_FILE))?;
        write_manifest(
            &dir,
            cli,
            "compute-ik",
            created,
            json!({ "scenario": a.scenario, "ik": params, "time_s": elapsed }),
            &[IK_FILE.into()],
        )?;
        println!("wrote {}", dir.join(IK_FILE).display());
    }
    Ok(())
}

fn plan(cli: &Cli, a: &PlanArgs) -> Result<(), CliError> {
    let params = a.planner_flags.params(cli.seed)?;
    let s = load_scenario(&a.scenario)?;
    let robot = KinematicChain::builtin();
    let chain = s.chain(&robot);
    let scene = s.scene();
    let problem = PlanningProblem::new(&chain, &scene, s.q_start);
    let (result, target) = match a.planner {
        Planner::JPlusRrt => {
            let grasps = scenario_grasps(&s, None)?;
            (plan_jplus_rrt(&problem, &grasps, &params)?, None)
        }
        Planner::IkRrt => {
            let ik_path = s
                .ik_path()
                .ok_or_else(|| fail(format!("scenario {} references no IK file", s.id)))?;
            let ik = IkFile::load(&ik_path)?.to_set();
            let sol = match a.target {
                Some(t) => ik
                    .solutions
                    .iter()
                    .find(|x| x.grasp_index == t)
                    .ok_or_else(|| fail(format!("grasp {t} has no IK solution")))?,
                None => ik
                    .solutions
                    .first()
                    .ok_or_else(|| fail(format!("scenario {}: no IK solutions available", s.id)))?,
            };
            let pose = scenario_grasps(&s, None).ok().and_then(|g| g.grasps.get(sol.grasp_index).map(|g| g.pose));
            (plan_ik_rrt(&problem, &sol.q, pose.as_ref(), &params)?, Some(sol.grasp_index))
        }
    };
    let file = PathFile::new(&s.id, a.planner, target, &result, &params);
    let (dir, created) = run_dir(&cli.out, "plan")?;
    write(&dir.join("path.json"), &file.to_json())?;
    let stats = json!({
        "scenario": s.id,
        "planner": a.planner,
        "target": file.target,
        "success": result.success,
        "time_s": result.time_s,
        "iterations": result.iterations,
        "path_len": reachgrasp::bench::path_length(&result),
        "final_dist": result.final_distance,
        "nodes_in_path": result.path.len(),
    });
    write(&dir.join("stats.json"), &serde_json::to_string_pretty(&stats).expect("json"))?;
    write_manifest(
        &dir,
        cli,
        "plan",
        created,
        json!({ "scenario": a.scenario, "planner": a.planner, "target": a.target, "planner_params": params }),
        &["path.json".into(), "stats.json".into()],
    )?;
    println!(
        "{} on {}: success={} time={:.3}s iterations={} final_dist={:.2}",
        a.planner, s.id, result.success, result.time_s, result.iterations, result.final_distance
    );
    println!("wrote {}", dir.display());
    Ok(())
}

/// Expands directories holding several scenario directories; sorted for stable ordering.
fn collect_scenarios(paths: &[PathBuf]) -> Result<Vec<PathBuf>, CliError> {
    let mut out = Vec::new();
    for p in paths {
        if p.is_dir() && !p.join(MANIFEST_FILE).exists() {
            let mut found: Vec<PathBuf> = fs::read_dir(p)
                .map_err(|e| fail(format!("{}: {e}", p.display())))?
                .filter_map(Result::ok)
                .map(|e| e.path())
                .filter(|d| d.join(MANIFEST_FILE).exists())
                .collect();
            if found.is_empty() {
                return Err(fail(format!("{}: no scenarios found", p.display())));
            }
            found.sort();
            out.extend(found);
        } else {
            out.push(p.clone());
        }
    }
    Ok(out)
}

fn bench(cli: &Cli, a: &BenchArgs) -> Result<(), CliError> {
    if a.runs == 0 {
        return Err(CliError::Usage("--runs must be at least 1".into()));
    }
    let params = a.planner_flags.params(cli.seed)?;
    let planners = if a.planner.is_empty() {
        Planner::ALL.to_vec()
    } else {
        a.planner.clone()
    };
    let inputs = collect_scenarios(&a.scenarios)?
        .iter()
        .map(|p| load_scenario(p).map(BenchScenario::load))
        .collect::<Result<Vec<_>, _>>()?;
    let robot = KinematicChain::builtin();
    let outcome = run_benchmark(&inputs, &robot, &planners, a.runs, &params, Execution::Parallel)?;
    for f in &outcome.failures {
        eprintln!("warning: {} / {}: {}", f.scenario, f.planner, f.message);
    }
    let rows = summarize(&outcome.records, &outcome.meta, &planners);

    let (dir, created) = run_dir(&cli.out, "bench")?;
    let mut csv = Vec::new();
    write_records(&outcome.records, &mut csv)?;
    write(&dir.join("records.csv"), &String::from_utf8(csv).expect("utf-8"))?;
    let summary = json!({ "rows": rows, "failures": outcome.failures });
    write(&dir.join("summary.json"), &serde_json::to_string_pretty(&summary).expect("json"))?;
    let table = format_table(&rows);
    write(&dir.join("summary.txt"), &table)?;

    let curves = dir.join("curves");
    fs::create_dir_all(&curves).map_err(|e| fail(format!("{}: {e}", curves.display())))?;
    let mut outputs = vec!["records.csv".to_string(), "summary.json".into(), "summary.txt".into()];
    let mut groups: std::collections::BTreeMap<(String, Planner), Vec<RunRecord>> = Default::default();
    for r in &outcome.records {
        groups.entry((r.scenario.clone(), r.planner)).or_default().push(r.clone());
    }
    for ((scenario, planner), recs) in &groups {
        let max_iter = recs.iter().map(|r| r.iterations).max().unwrap_or(0) as f64;
        let max_time = recs.iter().map(|r| r.time_s).fold(params.max_time, f64::max);
        for (axis, grid, tag) in [
            (CurveAxis::Time, uniform_grid(max_time, a.curve_points), "time"),
            (CurveAxis::Iterations, uniform_grid(max_iter, a.curve_points), "iterations"),
        ] {
            let curve = cumulative_success_curve(recs, axis, &grid)?;
            let name = format!("{scenario}_{planner}_{tag}.csv");
            let mut buf = Vec::new();
            write_curve(&curve, axis, &mut buf)?;
            write(&curves.join(&name), &String::from_utf8(buf).expect("utf-8"))?;
            outputs.push(format!("curves/{name}"));
        }
    }
    write_manifest(
        &dir,
        cli,
        "bench",
        created,
        json!({
            "scenarios": a.scenarios,
            "planners": planners,
            "runs": a.runs,
            "planner_params": params,
            "std": "population",
            "times": "all runs, failures at their stopping time; IK-set time excluded",
        }),
        &outputs,
    )?;
    print!("{table}");
    println!("wrote {}", dir.display());
    Ok(())
}

fn kind_of(path: &Path) -> Result<String, CliError> {
    if path.is_dir() {
        return Ok("scenario".into());
    }
    let src = fs::read_to_string(path).map_err(|e| fail(format!("{}: {e}", path.display())))?;
    let v: Value = serde_json::from_str(&src).map_err(|e| fail(format!("{}: {e}", path.display())))?;
    v.get("kind")
        .and_then(Value::as_str)
        .map(str::to_string)
        .ok_or_else(|| fail(format!("{}: no \"kind\" field", path.display())))
}

fn validate(a: &ValidateArgs) -> Result<(), CliError> {
    let robot = KinematicChain::builtin();
    let kind = kind_of(&a.file)?;
    let need_scenario = || -> Result<Scenario, CliError> {
        let p = a
            .scenario
            .as_ref()
            .ok_or_else(|| CliError::Usage(format!("validating a {kind} file needs --scenario")))?;
        Ok(load_scenario(p)?)
    };
    let problems = match kind.as_str() {
        "scenario" => audit_scenario(&load_scenario(&a.file)?, &robot),
        "grasp_set" => {
            let set = load_grasps(&a.file)?;
            let s = a.scenario.as_ref().map(|p| load_scenario(p)).transpose()?;
            audit_grasps(&set, s.as_ref(), &gripper_mesh())
        }
        "ik_set" => {
            let s = need_scenario()?;
            let file = IkFile::load(&a.file)?;
            let grasps = scenario_grasps(&s, a.grasps.as_deref())?;
            audit_ik(&file.to_set(), &s, &grasps, &robot, &file.params.clone().unwrap_or_default())
        }
        "path" => {
            let s = need_scenario()?;
            let src = fs::read_to_string(&a.file).map_err(|e| fail(format!("{}: {e}", a.file.display())))?;
            let file = PathFile::from_json(&src).map_err(|e| fail(format!("{}: {e}", a.file.display())))?;
            let grasps = scenario_grasps(&s, a.grasps.as_deref()).ok();
            audit_path(&file, &s, grasps.as_ref(), &robot)
        }
        other => return Err(fail(format!("{}: unknown file kind \"{other}\"", a.file.display()))),
    };
    if problems.is_empty() {
        println!("{}: valid {kind}", a.file.display());
        Ok(())
    } else {
        for p in &problems {
            println!("{}: {p}", a.file.display());
        }
        Err(fail(format!("{} problem(s) found", problems.len())))
    }
}
