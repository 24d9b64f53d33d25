//! Command-line front end. Builds coordinate/momentum pairs on the six
//! model spaces, validates and dilates measurement families, scans lattice
//! frame bounds, checks the coherent-state family, runs monitored-oscillator
//! ensembles and the domain-obstruction scenarios.
//!
//! All outputs are plain JSON/CSV with no timestamps or environment state,
//! so repeated runs with the same arguments are byte-identical.

use std::error::Error;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

use canonpairs::schema::{DilationFile, FamilyFile, OperatorFile};
use canonpairs::{coherent, linalg, measure, pairs, paradox, weak};
use canonpairs::{DomainSpec, StateVector};

type CliResult<T> = Result<T, Box<dyn Error>>;

#[derive(Parser)]
#[command(
    name = "canonpairs",
    version,
    about = "Canonical coordinate/momentum pairs on six model spaces, with \
             measurement families, frames, monitored dynamics and \
             domain-obstruction demos"
)]
struct Cli {
    #[command(subcommand)]
    cmd: TopCmd,
}

#[derive(Subcommand)]
enum TopCmd {
    /// Coordinate/momentum pair construction
    Pair {
        #[command(subcommand)]
        cmd: PairCmd,
    },
    /// Measurement family tools (JSON in, JSON out)
    Measure {
        #[command(subcommand)]
        cmd: MeasureCmd,
    },
    /// Coherent lattice frame analysis
    Frames {
        #[command(subcommand)]
        cmd: FramesCmd,
    },
    /// Coherent-state family checks
    Coherent {
        #[command(subcommand)]
        cmd: CoherentCmd,
    },
    /// Continuously monitored oscillator ensembles
    Weaksim {
        #[command(subcommand)]
        cmd: WeaksimCmd,
    },
    /// Boundary/domain obstruction scenarios
    Paradox {
        #[command(subcommand)]
        cmd: ParadoxCmd,
    },
}

#[derive(Subcommand)]
enum PairCmd {
    /// Build the pair for one case and write operator files plus a
    /// validation report into --out
    Build(BuildArgs),
}

#[derive(Args)]
struct BuildArgs {
    /// Model space: 1 line, 2 half line, 3 interval, 4 integer lattice,
    /// 5 natural lattice, 6 finite labels
    #[arg(long)]
    case: u8,
    /// Grid parameters, comma separated. Case 1/2: x_max,n. Case 3:
    /// length,n. Case 4: spacing,offset,n. Case 5: spacing,n. Case 6: dim.
    #[arg(long, value_delimiter = ',', required = true)]
    grid: Vec<f64>,
    /// Twist angle of the interval momentum family (case 3 only)
    #[arg(long, default_value_t = 0.0)]
    theta0: f64,
    /// Mode cutoff of the interval momentum family (case 3 only)
    #[arg(long, default_value_t = 16)]
    cutoff: usize,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum MeasureCmd {
    /// Check positivity, completeness and projectivity of a family file
    Validate {
        #[arg(long = "in")]
        input: PathBuf,
        /// Report destination; stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dilate a complete rank-one family to a projective measurement on the
    /// outcome space
    Dilate {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write a small example family file (input material for validate and
    /// dilate)
    Example {
        /// "tetrahedron" or "random"
        #[arg(long, default_value = "tetrahedron")]
        kind: String,
        /// Space dimension for --kind random
        #[arg(long, default_value_t = 2)]
        dim: usize,
        /// Outcome count for --kind random
        #[arg(long, default_value_t = 4)]
        outcomes: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum FramesCmd {
    /// Frame bounds of the square coherent lattice ab = 2*pi/N for each N
    Scan(FramesScanArgs),
}

#[derive(Args)]
struct FramesScanArgs {
    /// Points per phase-space cell, comma separated
    #[arg(long = "N", value_delimiter = ',', required = true)]
    n_per_cell: Vec<usize>,
    #[arg(long, default_value_t = 40)]
    fock: usize,
    /// Half-width of the lattice in units of the spacing
    #[arg(long, default_value_t = 8)]
    extent: i64,
    /// Levels kept in the frame-bound block; fock/3 when omitted
    #[arg(long)]
    block: Option<usize>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum CoherentCmd {
    /// Deviation of the disc-sampled coherent family from the identity,
    /// per integration step
    PovmCheck(PovmCheckArgs),
}

#[derive(Args)]
struct PovmCheckArgs {
    #[arg(long, default_value_t = 30)]
    fock: usize,
    /// Disc radius in phase space
    #[arg(long, default_value_t = 6.0)]
    radius: f64,
    /// Riemann steps to scan, comma separated
    #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.05])]
    steps: Vec<f64>,
    /// Levels of the block the deviation is measured on
    #[arg(long, default_value_t = 10)]
    block: usize,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum WeaksimCmd {
    /// Run an ensemble of monitored-oscillator trajectories
    Run(WeaksimRunArgs),
}

#[derive(Args)]
struct WeaksimRunArgs {
    #[arg(long)]
    seed: u64,
    /// Number of trajectories
    #[arg(long)]
    traj: usize,
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
    /// Time horizon
    #[arg(long = "T", default_value_t = 10.0)]
    t_final: f64,
    #[arg(long, default_value_t = 30)]
    fock: usize,
    /// Record the running quantities every this many steps
    #[arg(long, default_value_t = 100)]
    record_every: usize,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum ParadoxCmd {
    /// Run scenarios and write one report per scenario plus a summary;
    /// exits nonzero when any verdict fails
    Run(ParadoxRunArgs),
}

#[derive(Args)]
struct ParadoxRunArgs {
    /// Run every scenario
    #[arg(long, conflicts_with = "scenario")]
    all: bool,
    /// Scenario names, comma separated: constant-wf, sinc-moments,
    /// finite-well, energy-variance
    #[arg(long, value_delimiter = ',')]
    scenario: Vec<String>,
    /// Twist angle override (constant-wf)
    #[arg(long)]
    theta0: Option<f64>,
    /// Expansion cutoff override (constant-wf)
    #[arg(long)]
    m_max: Option<usize>,
    /// Momentum cutoffs override, comma separated (sinc-moments)
    #[arg(long, value_delimiter = ',')]
    cutoffs: Option<Vec<f64>>,
    /// Well depth ladder override, comma separated (finite-well)
    #[arg(long, value_delimiter = ',')]
    depths: Option<Vec<f64>>,
    /// Grid size override (finite-well, energy-variance)
    #[arg(long)]
    grid_points: Option<usize>,
    /// Bound-state index override (finite-well)
    #[arg(long)]
    eigenindex: Option<usize>,
    #[arg(long, default_value = "report")]
    out: PathBuf,
}

/// println that shrugs off a closed pipe (canonpairs ... | head)
fn say(msg: &str) {
    let mut out = std::io::stdout();
    let _ = writeln!(out, "{msg}");
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    say(&format!("wrote {}", path.display()));
    Ok(())
}

fn write_text(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text)?;
    say(&format!("wrote {}", path.display()));
    Ok(())
}

fn grid_usize(v: f64, what: &str) -> CliResult<usize> {
    if v <= 0.0 || v.fract() != 0.0 {
        return Err(format!("{what} must be a positive integer, got {v}").into());
    }
    Ok(v as usize)
}

fn expect_arity(grid: &[f64], n: usize, shape: &str) -> CliResult<()> {
    if grid.len() != n {
        return Err(format!(
            "this case takes --grid {shape} ({n} values), got {}",
            grid.len()
        )
        .into());
    }
    Ok(())
}

fn build_pair(args: &BuildArgs) -> CliResult<()> {
    fs::create_dir_all(&args.out)?;
    let out = |name: &str| args.out.join(name);
    let report = match args.case {
        1 => {
            expect_arity(&args.grid, 2, "x_max,n")?;
            let d = DomainSpec::real_line(args.grid[0], grid_usize(args.grid[1], "n")?)?;
            let x = pairs::position_operator(&d)?;
            let p = pairs::momentum_line(&d)?;
            let p_fd2 = pairs::momentum_line_fd2(&d)?;
            write_json(&out("position.json"), &OperatorFile::from_operator(&x))?;
            write_json(&out("momentum.json"), &OperatorFile::from_operator(&p))?;
            write_json(&out("momentum_fd2.json"), &OperatorFile::from_operator(&p_fd2))?;
            let weyl = pairs::weyl_phase_check(&x, &p, 0.3, 0.3)?;
            serde_json::json!({
                "case": 1,
                "domain": d,
                "x_hermitian_tol": x.hermitian_tol(),
                "p_hermitian_tol": p.hermitian_tol(),
                "displacement_check": {
                    "s": weyl.s,
                    "t": weyl.t,
                    "max_deviation": weyl.max_deviation,
                },
            })
        }
        2 => {
            expect_arity(&args.grid, 2, "x_max,n")?;
            let n = grid_usize(args.grid[1], "n")?;
            let d = DomainSpec::half_line(args.grid[0], n)?;
            let x = pairs::position_operator(&d)?;
            write_json(&out("position.json"), &OperatorFile::from_operator(&x))?;
            let deficiency = pairs::deficiency_evidence(&d)?;
            let samples = pairs::momentum_band(&d, 1.0, 2 * n + 1)?;
            let family = pairs::momentum_povm_halfline(&d, &samples)?;
            let fam_report = measure::validate_family(&family)?;
            serde_json::json!({
                "case": 2,
                "domain": d,
                "x_hermitian_tol": x.hermitian_tol(),
                "momentum_operator": "none: the generator is asymmetric on the \
                                      half line; see the deficiency evidence",
                "deficiency": deficiency,
                "momentum_family": {
                    "n_samples": samples.len(),
                    "completeness_deviation": fam_report.completeness_deviation,
                    "is_projective": fam_report.is_projective,
                    "max_pairwise_product": fam_report.max_pairwise_product,
                },
            })
        }
        3 => {
            expect_arity(&args.grid, 2, "length,n")?;
            let n = grid_usize(args.grid[1], "n")?;
            let length = args.grid[0];
            let d = DomainSpec::interval(length, n)?;
            let x = pairs::position_operator(&d)?;
            let ext = pairs::ExtensionParams::new(args.theta0, args.cutoff)?;
            let p = pairs::momentum_interval_extension(&d, &ext)?;
            write_json(&out("position.json"), &OperatorFile::from_operator(&x))?;
            write_json(&out("momentum.json"), &OperatorFile::from_operator(&p))?;
            let (vals, _) = linalg::eigh(&p.matrix);
            let mc = args.cutoff as i64;
            let mut eig_err = 0.0f64;
            for m in -mc..=mc {
                let target = (2.0 * std::f64::consts::PI * m as f64 + args.theta0) / length;
                let closest = vals
                    .iter()
                    .map(|v| (v - target).abs())
                    .fold(f64::INFINITY, f64::min);
                eig_err = eig_err.max(closest);
            }
            // the displacement must land on the grid; three fifths of the
            // box, far enough to push interior test states around the seam
            let h = d.spacing();
            let s = h * (3.0 * n as f64 / 5.0).round().max(1.0);
            let weyl = pairs::weyl_phase_check(&x, &p, s, std::f64::consts::PI)?;
            serde_json::json!({
                "case": 3,
                "domain": d,
                "theta0": args.theta0,
                "mode_cutoff": args.cutoff,
                "x_hermitian_tol": x.hermitian_tol(),
                "p_hermitian_tol": p.hermitian_tol(),
                "eigenvalue_max_error": eig_err,
                "displacement_check": {
                    "s": weyl.s,
                    "t": weyl.t,
                    "corrected_deviation": weyl.max_deviation,
                    "naive_deviation": weyl.naive_deviation,
                },
            })
        }
        4 => {
            expect_arity(&args.grid, 3, "spacing,offset,n")?;
            let d = DomainSpec::lattice_z(
                args.grid[0],
                args.grid[1],
                grid_usize(args.grid[2], "n")?,
            )?;
            let (x, p) = pairs::dual_pair_lattice(&d)?;
            write_json(&out("position.json"), &OperatorFile::from_operator(&x))?;
            write_json(&out("momentum.json"), &OperatorFile::from_operator(&p))?;
            let (vals, _) = linalg::eigh(&p.matrix);
            let band = std::f64::consts::PI / args.grid[0];
            let band_ratio = vals.iter().map(|v| v.abs()).fold(0.0, f64::max) / band;
            let ones = StateVector::from_fn(d.clone(), |_| Complex64::new(1.0, 0.0))?
                .normalized()?;
            let const_kill = p.apply(&ones)?.norm();
            serde_json::json!({
                "case": 4,
                "domain": d,
                "x_hermitian_tol": x.hermitian_tol(),
                "p_hermitian_tol": p.hermitian_tol(),
                "band_max_ratio": band_ratio,
                "constant_annihilation": const_kill,
            })
        }
        5 => {
            expect_arity(&args.grid, 2, "spacing,n")?;
            let n = grid_usize(args.grid[1], "n")?;
            let d = DomainSpec::lattice_n(args.grid[0], n)?;
            let x = pairs::position_operator(&d)?;
            write_json(&out("position.json"), &OperatorFile::from_operator(&x))?;
            let samples = pairs::momentum_band(&d, 1.0, 2 * n + 1)?;
            let family = pairs::momentum_povm_halfline(&d, &samples)?;
            let fam_report = measure::validate_family(&family)?;
            serde_json::json!({
                "case": 5,
                "domain": d,
                "x_hermitian_tol": x.hermitian_tol(),
                "momentum_operator": "none: the half lattice admits no shift \
                                      generator; the band family below is the \
                                      momentum measurement",
                "momentum_family": {
                    "n_samples": samples.len(),
                    "completeness_deviation": fam_report.completeness_deviation,
                    "is_projective": fam_report.is_projective,
                    "max_pairwise_product": fam_report.max_pairwise_product,
                },
            })
        }
        6 => {
            expect_arity(&args.grid, 1, "dim")?;
            let dim = grid_usize(args.grid[0], "dim")?;
            let x = pairs::position_operator(&DomainSpec::finite_dim(dim, 0)?)?;
            let p = pairs::momentum_finite(dim, 0)?;
            let (shift, clock) = pairs::discrete_weyl(dim, 0)?;
            write_json(&out("position.json"), &OperatorFile::from_operator(&x))?;
            write_json(&out("momentum.json"), &OperatorFile::from_operator(&p))?;
            write_json(&out("shift.json"), &OperatorFile::from_operator(&shift))?;
            write_json(&out("clock.json"), &OperatorFile::from_operator(&clock))?;
            let mut weyl_max = 0.0f64;
            for nn in 0..dim {
                for mm in 0..dim {
                    weyl_max = weyl_max
                        .max(pairs::weyl_relation_deviation(&shift, &clock, nn, mm, dim));
                }
            }
            serde_json::json!({
                "case": 6,
                "domain": x.domain,
                "x_hermitian_tol": x.hermitian_tol(),
                "p_hermitian_tol": p.hermitian_tol(),
                "shift_unitary_tol": shift.unitary_tol(),
                "clock_unitary_tol": clock.unitary_tol(),
                "weyl_max_deviation": weyl_max,
            })
        }
        other => return Err(format!("--case must be 1..=6, got {other}").into()),
    };
    write_json(&out("validation.json"), &report)
}

fn read_family(path: &Path) -> CliResult<measure::MeasureFamily> {
    let text = fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let file: FamilyFile = serde_json::from_str(&text)?;
    Ok(file.to_family()?)
}

fn run_measure(cmd: &MeasureCmd) -> CliResult<()> {
    match cmd {
        MeasureCmd::Validate { input, out } => {
            let family = read_family(input)?;
            let report = measure::validate_family(&family)?;
            match out {
                Some(path) => write_json(path, &report)?,
                None => say(&serde_json::to_string_pretty(&report)?),
            }
            Ok(())
        }
        MeasureCmd::Dilate { input, out } => {
            let family = read_family(input)?;
            let dilation = measure::neumark_dilate(&family)?;
            write_json(out, &DilationFile::from_dilation(&dilation))?;
            say(&format!("reconstruction_deviation {}", dilation.reconstruction_deviation));
            Ok(())
        }
        MeasureCmd::Example { kind, dim, outcomes, seed, out } => {
            let family = match kind.as_str() {
                "tetrahedron" => measure::tetrahedron_qubit_family(),
                "random" => measure::random_rank1_family(*dim, *outcomes, *seed)?,
                other => {
                    return Err(format!(
                        "unknown example kind '{other}' (tetrahedron, random)"
                    )
                    .into())
                }
            };
            write_json(out, &FamilyFile::from_family(&family))
        }
    }
}

fn run_frames_scan(args: &FramesScanArgs) -> CliResult<()> {
    fs::create_dir_all(&args.out)?;
    let block = args.block.unwrap_or(args.fock / 3).max(1);
    let mut rows = Vec::new();
    let mut csv = String::from("N,A,B,B_over_A\n");
    for &n in &args.n_per_cell {
        let spacing = coherent::square_lattice_spacing(n)?;
        let rep = coherent::lattice_frame(spacing, spacing, args.extent, args.fock, block)?;
        let _ = writeln!(csv, "{},{},{},{}", n, rep.lower, rep.upper, rep.ratio);
        rows.push(serde_json::json!({ "n_per_cell": n, "report": rep }));
    }
    write_text(&args.out.join("frames.csv"), &csv)?;
    write_json(
        &args.out.join("frames.json"),
        &serde_json::json!({
            "fock": args.fock,
            "block": block,
            "extent": args.extent,
            "rows": rows,
        }),
    )
}

fn run_povm_check(args: &PovmCheckArgs) -> CliResult<()> {
    fs::create_dir_all(&args.out)?;
    let mut rows = Vec::new();
    let mut csv = String::from("step,deviation\n");
    for &step in &args.steps {
        let dev = coherent::coherent_povm_deviation(args.fock, args.radius, step, args.block)?;
        let _ = writeln!(csv, "{step},{dev}");
        rows.push(serde_json::json!({ "step": step, "deviation": dev }));
    }
    write_text(&args.out.join("povm_check.csv"), &csv)?;
    write_json(
        &args.out.join("povm_check.json"),
        &serde_json::json!({
            "fock": args.fock,
            "radius": args.radius,
            "block": args.block,
            "rows": rows,
        }),
    )
}

fn run_weaksim(args: &WeaksimRunArgs) -> CliResult<()> {
    fs::create_dir_all(&args.out)?;
    let cfg = weak::WeakConfig {
        fock: args.fock,
        dt: args.dt,
        t_final: args.t_final,
        record_every: args.record_every,
        master_seed: args.seed,
        mean_level_limit: None,
    };
    let (records, summary) = weak::run_ensemble(&cfg, args.traj)?;
    let mut csv = String::from("traj,t,purity,mean_x,mean_p\n");
    for (i, r) in records.iter().enumerate() {
        for k in 0..r.times.len() {
            let _ = writeln!(
                csv,
                "{},{},{},{},{}",
                i, r.times[k], r.purity[k], r.mean_x[k], r.mean_p[k]
            );
        }
    }
    write_text(&args.out.join("trajectories.csv"), &csv)?;
    let final_purity: Vec<f64> = records.iter().map(|r| *r.purity.last().unwrap()).collect();
    let log_weight: Vec<f64> = records.iter().map(|r| r.log_weight).collect();
    write_json(
        &args.out.join("ensemble.json"),
        &serde_json::json!({
            "config": {
                "fock": args.fock,
                "dt": args.dt,
                "t_final": args.t_final,
                "seed": args.seed,
                "trajectories": args.traj,
                "record_every": args.record_every,
            },
            "summary": summary,
            "final_purity": final_purity,
            "log_weight": log_weight,
        }),
    )
}

fn series_csv(report: &paradox::ParadoxReport) -> String {
    let series = &report.series;
    let mut csv = String::new();
    csv.push_str(&series.param_name);
    for key in series.columns.keys() {
        csv.push(',');
        csv.push_str(key);
    }
    csv.push('\n');
    for (i, p) in series.params.iter().enumerate() {
        let _ = write!(csv, "{p}");
        for col in series.columns.values() {
            let _ = write!(csv, ",{}", col[i]);
        }
        csv.push('\n');
    }
    csv
}

fn run_paradox(args: &ParadoxRunArgs) -> CliResult<ExitCode> {
    let scenarios: Vec<paradox::Scenario> = if args.all {
        paradox::Scenario::all().to_vec()
    } else if args.scenario.is_empty() {
        return Err("select scenarios with --all or --scenario name[,name...]".into());
    } else {
        args.scenario
            .iter()
            .map(|s| paradox::Scenario::from_name(s))
            .collect::<canonpairs::Result<Vec<_>>>()?
    };
    let overrides = paradox::ScenarioOverrides {
        theta0: args.theta0,
        m_max: args.m_max,
        cutoffs: args.cutoffs.clone(),
        depths: args.depths.clone(),
        grid_points: args.grid_points,
        eigenindex: args.eigenindex,
    };
    fs::create_dir_all(&args.out)?;
    let mut summary_rows = Vec::new();
    let mut all_pass = true;
    for sc in scenarios {
        let report = paradox::run_scenario(sc, &overrides)?;
        write_json(&args.out.join(format!("{}.json", report.name)), &report)?;
        write_text(
            &args.out.join(format!("{}_series.csv", report.name)),
            &series_csv(&report),
        )?;
        let failed: Vec<&String> = report
            .verdicts
            .iter()
            .filter(|(_, v)| !v.pass)
            .map(|(k, _)| k)
            .collect();
        let pass = failed.is_empty();
        all_pass &= pass;
        summary_rows.push(serde_json::json!({
            "name": report.name,
            "pass": pass,
            "failed_verdicts": failed,
        }));
    }
    write_json(
        &args.out.join("summary.json"),
        &serde_json::json!({ "scenarios": summary_rows, "all_pass": all_pass }),
    )?;
    if all_pass {
        Ok(ExitCode::SUCCESS)
    } else {
        say("verdict failures recorded in summary.json");
        Ok(ExitCode::from(1))
    }
}

fn run(cli: Cli) -> CliResult<ExitCode> {
    match &cli.cmd {
        TopCmd::Pair { cmd: PairCmd::Build(args) } => {
            build_pair(args)?;
            Ok(ExitCode::SUCCESS)
        }
        TopCmd::Measure { cmd } => {
            run_measure(cmd)?;
            Ok(ExitCode::SUCCESS)
        }
        TopCmd::Frames { cmd: FramesCmd::Scan(args) } => {
            run_frames_scan(args)?;
            Ok(ExitCode::SUCCESS)
        }
        TopCmd::Coherent { cmd: CoherentCmd::PovmCheck(args) } => {
            run_povm_check(args)?;
            Ok(ExitCode::SUCCESS)
        }
        TopCmd::Weaksim { cmd: WeaksimCmd::Run(args) } => {
            run_weaksim(args)?;
            Ok(ExitCode::SUCCESS)
        }
        TopCmd::Paradox { cmd: ParadoxCmd::Run(args) } => run_paradox(args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
