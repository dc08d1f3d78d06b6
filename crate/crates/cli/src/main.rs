//! Command-line front end: classify lattice-free sets, emit intersection
//! cuts, and run the closure-bound verification sweeps.
//!
//! Exit codes: 0 success, 1 input error, 2 validation failure,
//! 3 verification failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use tworow::gauge::{cut, cut_to_json, instance_from_json};
use tworow::geom2d::{dec12, parse_rat, rat, rat_i, Rat};
use tworow::latticefree::{body_from_json, classify, LatticeFreeSet};
use tworow::lb_bounds::{
    closure_membership_check, g_quantities, maximize_q, triangle_samples,
};
use tworow::report::{
    membership_json, quantities_json, rat_json, ub_report_json, write_membership_csv,
    write_q_sweep_csv, write_ub_sweep_csv,
};
use tworow::sweep::Linspace;
use tworow::ub_bounds::{
    abc_coeffs, case2_min, default_case1_config, default_case2_config, min_over_region_q,
    overall_ub_certificate, random_case1_scenes, slope_identity_rhs,
};

const EXIT_INPUT: u8 = 1;
const EXIT_VALIDATION: u8 = 2;
const EXIT_VERIFICATION: u8 = 3;

/// Two-row intersection cuts from maximal lattice-free sets, with exact
/// verification of the closure approximation bounds.
#[derive(Parser)]
#[command(name = "tworow", version, about, long_about = None)]
struct Cli {
    /// Worker threads for the sweeps (default: available parallelism;
    /// the TWOROW_THREADS environment variable overrides the default).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a lattice-free set file and report its maximality.
    Classify {
        /// JSON set file: {"kind": "triangle"|"quadrilateral"|"split", ...}
        #[arg(long)]
        input: PathBuf,
    },
    /// Compute the intersection-cut coefficients of a set for an instance.
    Cut {
        /// JSON set file.
        #[arg(long)]
        set: PathBuf,
        /// JSON instance file: {"f": [[n,d],[n,d]], "rays": [...]}.
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Verify the quadrilateral-closure floors and the 1.71 certificate.
    ///
    /// Defaults run about a minute on one core: a 448-triple parameter
    /// grid with a 50x50 region grid for the common-region floor, and a
    /// 560-triple grid with 50 f-points each for the two-triangle floor.
    VerifyUb(VerifyUbArgs),
    /// Verify the 1.125 lower-bound family: q sweep plus closure membership.
    ///
    /// Defaults (t grid 0.05..10 step 0.05, 10000 samples) run in well
    /// under a minute on one core.
    VerifyLb(VerifyLbArgs),
    /// Check the excess identity (geometric vs slope form) on random scenes.
    AuditIdentity {
        /// Number of random scenes (must be at least 1).
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Emit the q sweep as CSV (stdout, or q_sweep.csv under --out).
    SweepQ {
        /// t grid as lo:hi:count.
        #[arg(long, default_value = "0.05:10:200")]
        grid_t: String,
        #[arg(long, default_value_t = 3)]
        refine: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
}

#[derive(Args)]
struct VerifyUbArgs {
    /// Common-region u grid as lo:hi:count.
    #[arg(long, default_value = "1.1:5:8")]
    grid_u: String,
    /// Common-region v grid as lo:hi:count.
    #[arg(long, default_value = "0.05:0.95:7")]
    grid_v: String,
    /// Common-region w grid as lo:hi:count.
    #[arg(long, default_value = "0.1:5:8")]
    grid_w: String,
    /// f-grid resolution per axis.
    #[arg(long, default_value_t = 50)]
    f_res: usize,
    /// Local refinement rounds (10x zoom per round).
    #[arg(long, default_value_t = 3)]
    refine: usize,
    /// Override the two-triangle sweep's u grid (lo:hi:count).
    #[arg(long)]
    c2_grid_u: Option<String>,
    /// Record every feasible evaluation in the report files.
    #[arg(long)]
    record_all: bool,
    /// Directory for case1_sweep and case2_sweep report files.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Required floor for the two-triangle relaxation minimum.
    #[arg(long, default_value = "0.5857")]
    require_case2_min: String,
    /// Required certificate range.
    #[arg(long, default_value = "1.70")]
    require_cert_min: String,
    #[arg(long, default_value = "1.7072")]
    require_cert_max: String,
}

#[derive(Args)]
struct VerifyLbArgs {
    /// t grid as lo:hi:count.
    #[arg(long, default_value = "0.05:10:200")]
    grid_t: String,
    #[arg(long, default_value_t = 3)]
    refine: usize,
    /// Number of maximal lattice-free triangle samples.
    #[arg(long, default_value_t = 10000)]
    samples: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Directory for q_sweep, membership and witness report files.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads(cli.threads);
    let code = match cli.command {
        Command::Classify { input } => cmd_classify(&input),
        Command::Cut {
            set,
            instance,
            format,
        } => cmd_cut(&set, &instance, format),
        Command::VerifyUb(args) => cmd_verify_ub(&args),
        Command::VerifyLb(args) => cmd_verify_lb(&args),
        Command::AuditIdentity { samples, seed } => cmd_audit_identity(samples, seed),
        Command::SweepQ {
            grid_t,
            refine,
            out,
            format,
        } => cmd_sweep_q(&grid_t, refine, out.as_deref(), format),
    };
    match code {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn input(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }
    fn validation(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_VALIDATION,
            message: message.into(),
        }
    }
    fn verification(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_VERIFICATION,
            message: message.into(),
        }
    }
}

fn configure_threads(flag: Option<usize>) {
    let from_env = std::env::var("TWOROW_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok());
    if let Some(n) = flag.or(from_env) {
        if n >= 1 {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global();
        }
    }
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))
}

fn parse_grid(spec: &str) -> Result<Linspace, CliError> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(CliError::input(format!(
            "grid {spec:?} must be lo:hi:count"
        )));
    }
    let lo = parse_rat(parts[0]).map_err(|e| CliError::input(e.to_string()))?;
    let hi = parse_rat(parts[1]).map_err(|e| CliError::input(e.to_string()))?;
    let count: usize = parts[2]
        .parse()
        .map_err(|_| CliError::input(format!("bad grid count in {spec:?}")))?;
    if count == 0 || lo > hi {
        return Err(CliError::input(format!("empty grid {spec:?}")));
    }
    Ok(Linspace::new(lo, hi, count))
}

fn parse_threshold(s: &str) -> Result<Rat, CliError> {
    parse_rat(s).map_err(|e| CliError::input(e.to_string()))
}

fn cmd_classify(input: &Path) -> Result<(), CliError> {
    let text = read_file(input)?;
    let body = body_from_json(&text).map_err(|e| CliError::input(e.to_string()))?;
    match classify(&body) {
        Ok(class) => {
            println!("{class}, maximal lattice-free");
            Ok(())
        }
        Err(tworow::Error::NotMaximalLatticeFree) => {
            Err(CliError::validation("not maximal lattice-free"))
        }
        Err(e) => Err(CliError::input(e.to_string())),
    }
}

fn cmd_cut(set_path: &Path, instance_path: &Path, format: Format) -> Result<(), CliError> {
    let set_text = read_file(set_path)?;
    let body = body_from_json(&set_text).map_err(|e| CliError::input(e.to_string()))?;
    let set = LatticeFreeSet::new(body)
        .map_err(|_| CliError::validation("set is not maximal lattice-free"))?;
    let inst_text = read_file(instance_path)?;
    let instance = instance_from_json(&inst_text).map_err(|e| CliError::input(e.to_string()))?;
    let inequality = match cut(&set, &instance) {
        Ok(c) => c,
        Err(tworow::Error::NotInterior) => {
            return Err(CliError::validation("f is not interior to the set"))
        }
        Err(e) => return Err(CliError::input(e.to_string())),
    };
    match format {
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(&cut_to_json(&inequality)).expect("serializable")
        ),
        _ => {
            let rendered: Vec<String> =
                inequality.coeffs.iter().map(|c| c.to_string()).collect();
            println!("{} >= 1", rendered.join(" "));
        }
    }
    Ok(())
}

fn write_out(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)
            .map_err(|e| CliError::input(format!("cannot create {}: {e}", dir.display())))?;
    }
    fs::write(path, contents)
        .map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))
}

fn cmd_verify_ub(args: &VerifyUbArgs) -> Result<(), CliError> {
    let mut c1_config = default_case1_config();
    c1_config.u = parse_grid(&args.grid_u)?;
    c1_config.v = parse_grid(&args.grid_v)?;
    c1_config.w = parse_grid(&args.grid_w)?;
    c1_config.f_res = args.f_res.max(1);
    c1_config.refine_rounds = args.refine;
    c1_config.record_all = args.record_all;
    let mut c2_config = default_case2_config();
    c2_config.refine_rounds = args.refine;
    c2_config.record_all = args.record_all;
    if let Some(spec) = &args.c2_grid_u {
        c2_config.u = parse_grid(spec)?;
    }

    let require_case2 = parse_threshold(&args.require_case2_min)?;
    let cert_min = parse_threshold(&args.require_cert_min)?;
    let cert_max = parse_threshold(&args.require_cert_max)?;

    let case1 = min_over_region_q(&c1_config);
    let case2 = case2_min(&c2_config);

    if let Some(dir) = &args.out {
        let (p1, p2) = match args.format {
            Format::Json => (dir.join("case1_sweep.json"), dir.join("case2_sweep.json")),
            _ => (dir.join("case1_sweep.csv"), dir.join("case2_sweep.csv")),
        };
        for (path, report) in [(&p1, &case1), (&p2, &case2)] {
            let mut buf = Vec::new();
            match args.format {
                Format::Json => {
                    buf = serde_json::to_vec_pretty(&ub_report_json(report)).expect("serializable")
                }
                _ => write_ub_sweep_csv(&mut buf, report)
                    .map_err(|e| CliError::input(e.to_string()))?,
            }
            write_out(path, &buf)?;
        }
    }

    let m1 = case1
        .min
        .clone()
        .ok_or_else(|| CliError::verification("common-region sweep found no feasible point"))?;
    let m2 = case2
        .min
        .clone()
        .ok_or_else(|| CliError::verification("two-triangle sweep found no feasible point"))?;
    let certificate = overall_ub_certificate(&case1, &case2)
        .map_err(|e| CliError::verification(e.to_string()))?;

    println!(
        "common-region floor: min = {} over {} evaluations (argmin u={} v={} w={} f=({}, {}))",
        dec12(&m1.value),
        case1.evaluations,
        dec12(&m1.u),
        dec12(&m1.v),
        dec12(&m1.w),
        dec12(&m1.f1),
        dec12(&m1.f2)
    );
    println!(
        "two-triangle floor:  min = {} over {} evaluations (argmin u={} v={} w={} f=({}, {}))",
        dec12(&m2.value),
        case2.evaluations,
        dec12(&m2.u),
        dec12(&m2.v),
        dec12(&m2.w),
        dec12(&m2.f1),
        dec12(&m2.f2)
    );
    println!("certificate: {}", dec12(&certificate));

    // exit gate: sqrt(3) floor via exact squaring, the stated floor for the
    // two-triangle relaxation, and the certificate window
    let sq_floor = rat_i(3) - rat(1, 1_000_000);
    if &m1.value * &m1.value < sq_floor {
        return Err(CliError::verification(format!(
            "common-region minimum {} fell below sqrt(3) at u={} v={} w={} f=({}, {})",
            dec12(&m1.value),
            dec12(&m1.u),
            dec12(&m1.v),
            dec12(&m1.w),
            dec12(&m1.f1),
            dec12(&m1.f2)
        )));
    }
    if m2.value < require_case2 {
        return Err(CliError::verification(format!(
            "two-triangle minimum {} fell below {} at u={} v={} w={} f=({}, {})",
            dec12(&m2.value),
            dec12(&require_case2),
            dec12(&m2.u),
            dec12(&m2.v),
            dec12(&m2.w),
            dec12(&m2.f1),
            dec12(&m2.f2)
        )));
    }
    if certificate < cert_min || certificate > cert_max {
        return Err(CliError::verification(format!(
            "certificate {} outside [{}, {}]",
            dec12(&certificate),
            dec12(&cert_min),
            dec12(&cert_max)
        )));
    }
    Ok(())
}

fn cmd_verify_lb(args: &VerifyLbArgs) -> Result<(), CliError> {
    if args.samples == 0 {
        return Err(CliError::input("sample count must be at least 1"));
    }
    let grid = parse_grid(&args.grid_t)?;
    let max = maximize_q(&grid, args.refine).map_err(|e| CliError::input(e.to_string()))?;
    println!("q sweep: t* = {}, q* = {}", dec12(&max.t_star), dec12(&max.q_star));

    let batch = triangle_samples(args.samples, args.seed)
        .map_err(|e| CliError::input(e.to_string()))?;
    let report = closure_membership_check(&rat_i(2), &batch.samples)
        .map_err(|e| CliError::input(e.to_string()))?;
    let min_slack = report
        .min_slack
        .clone()
        .ok_or_else(|| CliError::verification("no membership rows"))?;
    println!(
        "membership: {} samples, {} skipped, min slack = {}",
        report.rows.len(),
        report.skipped,
        dec12(&min_slack)
    );

    if let Some(dir) = &args.out {
        let witness = g_quantities(&max.t_star)
            .map(|g| quantities_json(&g))
            .unwrap_or(serde_json::Value::Null);
        let witness_doc = serde_json::json!({
            "t_star": rat_json(&max.t_star),
            "q_star": rat_json(&max.q_star),
            "quantities": witness,
        });
        write_out(
            &dir.join("witness.json"),
            &serde_json::to_vec_pretty(&witness_doc).expect("serializable"),
        )?;
        match args.format {
            Format::Json => {
                write_out(
                    &dir.join("q_sweep.json"),
                    &serde_json::to_vec_pretty(&tworow::report::q_rows_json(&max.rows))
                        .expect("serializable"),
                )?;
                write_out(
                    &dir.join("membership.json"),
                    &serde_json::to_vec_pretty(&membership_json(&report)).expect("serializable"),
                )?;
            }
            _ => {
                let mut buf = Vec::new();
                write_q_sweep_csv(&mut buf, &max.rows)
                    .map_err(|e| CliError::input(e.to_string()))?;
                write_out(&dir.join("q_sweep.csv"), &buf)?;
                let mut buf = Vec::new();
                write_membership_csv(&mut buf, &report)
                    .map_err(|e| CliError::input(e.to_string()))?;
                write_out(&dir.join("membership.csv"), &buf)?;
            }
        }
    }

    if batch.failures > 0 {
        return Err(CliError::verification(format!(
            "{} samples exhausted their retry budget",
            batch.failures
        )));
    }
    if min_slack < rat_i(0) {
        // serialize the offending triangle for inspection
        if let Some(row) = report.rows.iter().find(|r| r.slack < rat_i(0)) {
            if let Some(sample) = batch.samples.iter().find(|s| s.id == row.sample_id) {
                eprintln!(
                    "violating sample {}: {}",
                    sample.id,
                    serde_json::to_string(&tworow::latticefree::set_to_json(&sample.set))
                        .expect("serializable")
                );
            }
        }
        return Err(CliError::verification(format!(
            "membership slack {} is negative",
            dec12(&min_slack)
        )));
    }
    if max.q_star != rat(9, 8) {
        return Err(CliError::verification(format!(
            "q* = {} is not exactly 9/8",
            dec12(&max.q_star)
        )));
    }
    let t_err = {
        let d = &max.t_star - rat_i(2);
        if d < rat_i(0) { -d } else { d }
    };
    if t_err > rat(1, 1000) {
        return Err(CliError::verification(format!(
            "t* = {} is not within 1e-3 of 2",
            dec12(&max.t_star)
        )));
    }
    Ok(())
}

fn cmd_audit_identity(samples: usize, seed: u64) -> Result<(), CliError> {
    if samples == 0 {
        return Err(CliError::input("sample count must be at least 1"));
    }
    let scenes = random_case1_scenes(samples, seed);
    for scene in &scenes {
        let (a, b, c) =
            abc_coeffs(scene).map_err(|e| CliError::verification(e.to_string()))?;
        let geometric = a.recip() + b.recip() + c.recip();
        let slope_form = slope_identity_rhs(&scene.params, &scene.f);
        if geometric != slope_form {
            return Err(CliError::verification(format!(
                "identity mismatch at u={} v={} w={} f=({}, {}): {} vs {}",
                scene.params.u,
                scene.params.v,
                scene.params.w,
                scene.f.x,
                scene.f.y,
                geometric,
                slope_form
            )));
        }
    }
    println!("identity holds exactly on {samples} random scenes (seed {seed})");
    Ok(())
}

fn cmd_sweep_q(
    grid_t: &str,
    refine: usize,
    out: Option<&Path>,
    format: Format,
) -> Result<(), CliError> {
    let grid = parse_grid(grid_t)?;
    let max = maximize_q(&grid, refine).map_err(|e| CliError::input(e.to_string()))?;
    let bytes = match format {
        Format::Json => {
            serde_json::to_vec_pretty(&tworow::report::q_rows_json(&max.rows)).expect("serializable")
        }
        _ => {
            let mut buf = Vec::new();
            write_q_sweep_csv(&mut buf, &max.rows).map_err(|e| CliError::input(e.to_string()))?;
            buf
        }
    };
    match out {
        Some(dir) => {
            let name = if format == Format::Json {
                "q_sweep.json"
            } else {
                "q_sweep.csv"
            };
            write_out(&dir.join(name), &bytes)?;
            println!("t* = {}, q* = {}", dec12(&max.t_star), dec12(&max.q_star));
        }
        None => {
            use std::io::Write;
            std::io::stdout()
                .write_all(&bytes)
                .map_err(|e| CliError::input(e.to_string()))?;
        }
    }
    Ok(())
}
