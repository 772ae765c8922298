//! `canard-scope` command-line front end.
//!
//! Every subcommand writes its results into the output directory and prints
//! the written paths. Exit status: 0 success, 2 usage error, 3 numeric failure.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use canard_scope::gsp::{
    self, build_singular_orbit, check_conditions, find_folded_singularities, strong_canard, strong_canard_checked,
    ConditionSet, FunnelMethod, Mode,
};
use canard_scope::io::{self as cio, Overrides};
use canard_scope::signature::{signature, signature_from_series, MmoSignature};
use canard_scope::simulate::{simulate, IntegratorConfig};
use canard_scope::sweep::{parse_grid, run_sweep, write_region_csv, Emit, Range, SweepSpec};
use canard_scope::{DimensionlessParams, State3};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "canard-scope", version, about = "Fast/slow climate model analysis")]
struct Cli {
    /// Output directory.
    #[arg(long, global = true, env = "CANARD_SCOPE_OUT", default_value = "canard-scope-out")]
    out: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the existence conditions (a)-(i).
    Check {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value = "strict")]
        mode: Mode,
    },
    /// Classify the folded singularities and predict the small-oscillation count.
    Node {
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Build the singular periodic orbit.
    Orbit {
        #[command(flatten)]
        params: ParamArgs,
        /// Funnel test: linear (tangent line) or numeric (strong canard).
        #[arg(long, default_value = "numeric")]
        funnel: FunnelMethod,
    },
    /// Approximate the strong canard from the lower folded node.
    Canard {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = -2.0, allow_negative_numbers = true)]
        x_stop: f64,
        /// Seed distance from the node; the default also runs a convergence check.
        #[arg(long)]
        seed_offset: Option<f64>,
    },
    /// Integrate the full system.
    Simulate {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        sim: SimArgs,
    },
    /// Extract the MMO signature from a trajectory file or a fresh run.
    Signature {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        sim: SimArgs,
        /// Trajectory CSV (t,x,y,z); simulates when absent.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Leading fraction of the time span to discard.
        #[arg(long, default_value_t = 0.5)]
        transient: f64,
    },
    /// Map the admissible region over an (a, p, m) grid at fixed delta.
    Sweep(SweepArgs),
    /// Scale a physical parameter file to dimensionless form.
    Nondim {
        /// Physical parameter JSON.
        #[arg(long)]
        physical: PathBuf,
    },
}

#[derive(Args)]
struct ParamArgs {
    /// Dimensionless parameter JSON.
    #[arg(long, conflicts_with = "preset")]
    params: Option<PathBuf>,
    /// Named parameter set: p1, p2, three-timescale. Default p1.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    k: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    p: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    a: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    b: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    m: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    lambda: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    r: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    epsilon: Option<f64>,
}

#[derive(Args)]
struct SimArgs {
    #[arg(long, default_value_t = 200.0)]
    t_end: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    x0: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    y0: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    z0: f64,
    #[arg(long, default_value_t = 1e-8)]
    rtol: f64,
    #[arg(long, default_value_t = 1e-10)]
    atol: f64,
    #[arg(long, default_value_t = 0.01)]
    h_max: f64,
}

#[derive(Args)]
struct SweepArgs {
    /// Sweep spec JSON; flags override its fields.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Value or min:max.
    #[arg(long, allow_negative_numbers = true)]
    a: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    p: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    m: Option<String>,
    /// Point counts as AxPxM, e.g. 50x50x1.
    #[arg(long)]
    grid: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    delta: Option<f64>,
    #[arg(long)]
    r: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    k: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    lambda: Option<f64>,
    #[arg(long)]
    mode: Option<Mode>,
    /// region: passing rows only; full: every grid point.
    #[arg(long)]
    emit: Option<Emit>,
    /// Require only (a)-(d), (g), (h).
    #[arg(long)]
    subset: bool,
}

enum Failure {
    Usage(anyhow::Error),
    Numeric(anyhow::Error),
}

impl From<canard_scope::Error> for Failure {
    fn from(e: canard_scope::Error) -> Self {
        if e.is_usage() {
            Failure::Usage(e.into())
        } else {
            Failure::Numeric(e.into())
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Numeric(e)
    }
}

type Outcome<T = ()> = Result<T, Failure>;

fn usage(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Usage(e.into())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Numeric(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}

fn run(cli: Cli) -> Outcome {
    let out = Output::new(cli.out)?;
    match cli.command {
        Command::Check { params, mode } => {
            let pr = params.resolve()?;
            let rep = check_conditions(&pr, mode);
            let verdict = rep.verdict(ConditionSet::Full);
            let mut doc = serde_json::to_value(rep).map_err(anyhow::Error::from)?;
            doc["params"] = json!(pr);
            doc["verdict"] = json!(verdict);
            doc["verdict_subset"] = json!(rep.verdict(ConditionSet::NoFunnel));
            out.json("check.json", &doc)?;
            println!("verdict: {verdict}");
        }
        Command::Node { params } => {
            let pr = params.resolve()?;
            let folds = find_folded_singularities(&pr);
            let doc = json!({
                "params": pr,
                "delta": gsp::delta(&pr),
                "folded_singularities": folds,
                "ordinary_singularities": gsp::ordinary_singularities(&pr),
            });
            out.json("node.json", &doc)?;
            let lower = &folds[0];
            println!("lower fold: {:?}", lower.classification);
            if let (Some(mu), Some(s)) = (lower.mu_ratio, lower.s_predicted) {
                println!("mu = {mu:.6}, s = {s}");
            }
        }
        Command::Orbit { params, funnel } => {
            let pr = params.resolve()?;
            let orbit = build_singular_orbit(&pr, funnel)?;
            out.write("orbit.csv", |f| orbit.write_csv(f))?;
            let mut doc = serde_json::to_value(&orbit).map_err(anyhow::Error::from)?;
            if let Some(obj) = doc.as_object_mut() {
                obj.remove("segments");
            }
            doc["params"] = json!(pr);
            out.json("orbit.json", &doc)?;
            println!("closed: {}", orbit.closed);
        }
        Command::Canard { params, x_stop, seed_offset } => {
            let pr = params.resolve()?;
            let (canard, check) = match seed_offset {
                Some(off) => (strong_canard(&pr, off, x_stop)?, Value::Null),
                None => {
                    let c = strong_canard_checked(&pr, x_stop)?;
                    let check = json!({
                        "refined_z_at_stop": c.refined_z_at_stop,
                        "offset_difference": c.offset_difference,
                    });
                    (c.canard, check)
                }
            };
            out.write("canard.csv", |f| {
                let mut w = csv::Writer::from_writer(f);
                w.write_record(["x", "z"])?;
                for [x, z] in &canard.samples {
                    w.write_record([format!("{x:?}"), format!("{z:?}")])?;
                }
                w.flush()?;
                Ok(())
            })?;
            let min_height = canard.heights_above_tangent().fold(f64::INFINITY, f64::min);
            let mut doc = serde_json::to_value(&canard).map_err(anyhow::Error::from)?;
            if let Some(obj) = doc.as_object_mut() {
                obj.remove("samples");
            }
            doc["params"] = json!(pr);
            doc["min_height_above_tangent"] = json!(min_height);
            doc["convergence"] = check;
            out.json("canard.json", &doc)?;
            println!("z at x = {x_stop}: {:.9}", canard.z_at_stop);
        }
        Command::Simulate { params, sim } => {
            let pr = params.resolve()?;
            let cfg = sim.config();
            let traj = simulate(&pr, sim.initial(), sim.t_end, &cfg)?;
            out.write("trajectory.csv", |f| traj.write_csv(f, ["x", "y", "z"]))?;
            let mut doc = serde_json::to_value(traj.sidecar(&cfg)).map_err(anyhow::Error::from)?;
            doc["params"] = json!(pr);
            doc["initial"] = json!(sim.initial());
            doc["t_end"] = json!(sim.t_end);
            out.json("trajectory.json", &doc)?;
            println!("{} points, {} steps", traj.len(), traj.step_stats.accepted);
        }
        Command::Signature { params, sim, input, transient } => {
            if !(0.0..1.0).contains(&transient) {
                return Err(usage(anyhow!("--transient must lie in [0, 1), got {transient}")));
            }
            let sig = match input {
                Some(path) => {
                    let file =
                        File::open(&path).with_context(|| format!("reading {}", path.display())).map_err(usage)?;
                    let table = cio::parse_trajectory_csv(file)?;
                    signature_from_series(&table.t, &table.x, transient)?
                }
                None => {
                    let pr = params.resolve()?;
                    let traj = simulate(&pr, sim.initial(), sim.t_end, &sim.config())?;
                    signature(&traj, transient)?
                }
            };
            out.json("signature.json", &signature_report(&sig))?;
            println!("signature: {}", sig.canonical);
        }
        Command::Sweep(args) => {
            let spec = args.resolve()?;
            let rows = run_sweep(&spec)?;
            out.write("region.csv", |f| write_region_csv(&rows, f))?;
            out.json(
                "region.json",
                &json!({ "spec": spec, "rows": rows.len(),
                "passing": rows.iter().filter(|r| r.verdict).count() }),
            )?;
            println!("{} rows, {} passing", rows.len(), rows.iter().filter(|r| r.verdict).count());
        }
        Command::Nondim { physical } => {
            let text = read(&physical)?;
            let phys = cio::parse_physical_json(&text)?;
            let nd = phys.nondimensionalize()?;
            out.json("nondim.json", &json!({ "physical": phys, "params": nd.params, "scales": nd.scales }))?;
            println!("epsilon = {}", nd.params.epsilon);
        }
    }
    Ok(())
}

fn signature_report(sig: &MmoSignature) -> Value {
    json!({
        "blocks": sig.blocks.iter().map(|b| b.to_string()).collect::<Vec<_>>(),
        "cycle": sig.cycle.iter().map(|b| b.to_string()).collect::<Vec<_>>(),
        "canonical_string": sig.canonical,
        "periodic": sig.periodic,
        "transient_blocks": sig.transient_blocks,
        "oscillation_table": sig.oscillations,
    })
}

fn read(path: &Path) -> Outcome<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display())).map_err(usage)
}

impl ParamArgs {
    fn resolve(&self) -> Outcome<DimensionlessParams> {
        let base = match (&self.params, &self.preset) {
            (Some(path), _) => cio::parse_dimensionless_json(&read(path)?)?,
            (None, Some(name)) => cio::preset(name)?,
            (None, None) => DimensionlessParams::P1,
        };
        let ov = Overrides {
            k: self.k,
            p: self.p,
            a: self.a,
            b: self.b,
            m: self.m,
            lambda: self.lambda,
            r: self.r,
            epsilon: self.epsilon,
        };
        Ok(ov.apply(base)?)
    }
}

impl SimArgs {
    fn config(&self) -> IntegratorConfig {
        IntegratorConfig { rtol: self.rtol, atol: self.atol, h_max: self.h_max, ..Default::default() }
    }

    fn initial(&self) -> State3 {
        State3::new(self.x0, self.y0, self.z0)
    }
}

/// `v` or `min:max`; count comes from the grid or the previous range.
fn parse_range(s: &str, count: usize) -> Outcome<Range> {
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| usage(anyhow!("'{s}' is not a value or min:max range")));
    match s.split_once(':') {
        Some((lo, hi)) => Ok(Range::new(num(lo)?, num(hi)?, count)),
        None => {
            let v = num(s)?;
            Ok(Range::new(v, v, count))
        }
    }
}

impl SweepArgs {
    fn resolve(&self) -> Outcome<SweepSpec> {
        let mut spec = match &self.spec {
            Some(path) => cio::parse_sweep_spec_json(&read(path)?)?,
            None => SweepSpec::default(),
        };
        if let Some(g) = &self.grid {
            let [na, np, nm] = parse_grid(g)?;
            spec.a.count = na;
            spec.p.count = np;
            spec.m.count = nm;
        }
        for (arg, range) in [(&self.a, &mut spec.a), (&self.p, &mut spec.p), (&self.m, &mut spec.m)] {
            if let Some(s) = arg {
                *range = parse_range(s, range.count)?;
            }
        }
        spec.delta = self.delta.unwrap_or(spec.delta);
        spec.r = self.r.unwrap_or(spec.r);
        spec.k = self.k.unwrap_or(spec.k);
        spec.lambda = self.lambda.unwrap_or(spec.lambda);
        spec.mode = self.mode.unwrap_or(spec.mode);
        spec.emit = self.emit.unwrap_or(spec.emit);
        spec.subset |= self.subset;
        spec.validate()?;
        Ok(spec)
    }
}

struct Output {
    dir: PathBuf,
}

impl Output {
    fn new(dir: PathBuf) -> Outcome<Self> {
        fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display())).map_err(usage)?;
        Ok(Output { dir })
    }

    fn write(&self, name: &str, body: impl FnOnce(BufWriter<File>) -> canard_scope::Result<()>) -> Outcome {
        let path = self.dir.join(name);
        let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        body(BufWriter::new(file)).with_context(|| format!("writing {}", path.display()))?;
        println!("wrote {}", path.display());
        Ok(())
    }

    fn json(&self, name: &str, doc: &Value) -> Outcome {
        self.write(name, |mut f| {
            serde_json::to_writer_pretty(&mut f, doc)?;
            std::io::Write::write_all(&mut f, b"\n")?;
            Ok(())
        })
    }
}
