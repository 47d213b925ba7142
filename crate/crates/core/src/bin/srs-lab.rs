//! `srs-lab`: classify, trace, decide and scan two-dimensional shift radix
//! system parameters.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use srs_lab::certified::{
    build_norm, decide_point_report, decide_region_with, total_area, CellVerdict, CertError,
    NormCertificate, RationalRect, RegionOptions, MAX_BOX_POINTS,
};
use srs_lab::dynamics::{iterate_orbit, OrbitOptions};
use srs_lab::param::{parse_rational, rational_to_f64};
use srs_lab::regions::{classify_with_tolerance, BOUNDARY_TOLERANCE};
use srs_lab::scan::{
    create_output, run_scan, write_csv, write_json, write_pgm, DecisionCache, Mode, ScanConfig,
    ScanError,
};
use srs_lab::{LatticePoint, OrbitOutcome, ParamVector, Status, Verdict};

const EXIT_USAGE: u8 = 64;
const EXIT_SOFTWARE: u8 = 70;
const EXIT_CANTCREAT: u8 = 73;

#[derive(Parser)]
#[command(name = "srs-lab", version, about = "Shift radix systems in dimension two")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form classification of one parameter.
    Classify {
        #[arg(allow_hyphen_values = true)]
        r0: String,
        #[arg(allow_hyphen_values = true)]
        r1: String,
        #[arg(long, default_value_t = BOUNDARY_TOLERANCE)]
        tolerance: f64,
    },
    /// Iterate the map from a starting vector.
    Orbit {
        #[arg(allow_hyphen_values = true)]
        r0: String,
        #[arg(allow_hyphen_values = true)]
        r1: String,
        /// Starting vector `a0,a1`.
        #[arg(long, allow_hyphen_values = true)]
        start: String,
        #[arg(long, default_value_t = 100_000)]
        budget: usize,
        /// Scalars to print before eliding.
        #[arg(long, default_value_t = 64)]
        show: usize,
    },
    /// Certified decision for an expanding rational parameter.
    Decide {
        #[arg(allow_hyphen_values = true)]
        r0: String,
        #[arg(allow_hyphen_values = true)]
        r1: String,
        #[arg(long)]
        rho: Option<f64>,
        #[arg(long, env = "SRS_LAB_CACHE")]
        cache: Option<PathBuf>,
    },
    /// Classify every pixel centre of a rectangle.
    Scan {
        /// `a,b,c,d` for `[a, b] x [c, d]`.
        #[arg(long, allow_hyphen_values = true)]
        rect: String,
        #[arg(long, default_value_t = 100)]
        res: usize,
        #[arg(long, default_value = "closed-form")]
        mode: Mode,
        /// PGM raster path.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
        /// JSON summary path; printed to stdout when no output is given.
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        #[arg(long, env = "SRS_LAB_CACHE")]
        cache: Option<PathBuf>,
        #[arg(long, default_value_t = BOUNDARY_TOLERANCE)]
        tolerance: f64,
        /// Witness box limit per certified pixel.
        #[arg(long, default_value_t = MAX_BOX_POINTS)]
        budget: u128,
        #[arg(long)]
        rho: Option<f64>,
    },
    /// Certified decision for a rectangle of expanding parameters.
    Region {
        #[arg(long, allow_hyphen_values = true)]
        rect: String,
        /// Cell report path.
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long, default_value_t = 20)]
        max_depth: usize,
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
}

fn usage(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_USAGE)
}

fn verdict_code(v: &Verdict) -> ExitCode {
    ExitCode::from(match v.status() {
        Status::InDStar => 0,
        Status::NotInDStar => 1,
        _ => 2,
    })
}

fn point(r0: &str, r1: &str) -> Result<ParamVector, ExitCode> {
    ParamVector::parse(&[r0, r1]).map_err(usage)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    let run = match cli.command {
        Command::Classify { r0, r1, tolerance } => classify(&r0, &r1, tolerance),
        Command::Orbit {
            r0,
            r1,
            start,
            budget,
            show,
        } => orbit(&r0, &r1, &start, budget, show),
        Command::Decide { r0, r1, rho, cache } => decide(&r0, &r1, rho, cache),
        Command::Scan {
            rect,
            res,
            mode,
            out,
            csv,
            json,
            jobs,
            cache,
            tolerance,
            budget,
            rho,
        } => {
            let rect = match RationalRect::parse(&rect) {
                Ok(r) => r,
                Err(e) => return usage(e),
            };
            let mut config = ScanConfig::new(rect, res, mode);
            config.jobs = jobs;
            config.tolerance = tolerance;
            config.max_box_points = budget;
            config.rho = rho;
            scan(&config, out, csv, json, cache)
        }
        Command::Region {
            rect,
            json,
            max_depth,
            jobs,
        } => region(&rect, json, max_depth, jobs),
    };
    run.unwrap_or_else(|code| code)
}

fn classify(r0: &str, r1: &str, tolerance: f64) -> Result<ExitCode, ExitCode> {
    let r = point(r0, r1)?;
    let v = classify_with_tolerance(&r, tolerance).map_err(usage)?;
    println!("{v}");
    Ok(verdict_code(&v))
}

fn orbit(r0: &str, r1: &str, start: &str, budget: usize, show: usize) -> Result<ExitCode, ExitCode> {
    let r = point(r0, r1)?;
    let entries: Vec<i64> = start
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<i64>())
        .collect::<Result<_, _>>()
        .map_err(|e| usage(format!("bad --start {start:?}: {e}")))?;
    if entries.len() != 2 {
        return Err(usage(format!("--start needs two integers, got {start:?}")));
    }
    let cert: Option<NormCertificate> = if r.is_exact() {
        build_norm(&r, None).ok()
    } else {
        None
    };
    let opts = OrbitOptions {
        budget,
        certificate: cert.as_ref().map(|c| c as _),
        heuristic_radius: if cert.is_some() {
            None
        } else {
            OrbitOptions::default().heuristic_radius
        },
    };
    let rec = iterate_orbit(&r, &LatticePoint::new(entries), &opts).map_err(usage)?;
    let scalars = rec.scalars();
    let shown: Vec<String> = scalars.iter().take(show).map(|x| x.to_string()).collect();
    let more = scalars.len().saturating_sub(show);
    println!(
        "scalars: {}{}",
        shown.join(" "),
        if more > 0 { format!(" ... ({more} more)") } else { String::new() }
    );
    let errors: Vec<String> = rec
        .errors
        .iter()
        .take(show)
        .map(|e| match &e.exact {
            Some(q) => q.to_string(),
            None => format!("{:.6}", e.approx),
        })
        .collect();
    println!("errors: {}", errors.join(" "));
    match &rec.outcome {
        OrbitOutcome::ReachedCycle(c) => println!("outcome: ReachedCycle period {} cycle={c}", c.period()),
        OrbitOutcome::ReachedZero => println!("outcome: ReachedZero"),
        OrbitOutcome::Escaped { step, reason } => println!("outcome: Escaped step {step} ({reason:?})"),
        OrbitOutcome::Undecided { budget } => println!("outcome: Undecided after {budget} steps"),
    }
    Ok(ExitCode::SUCCESS)
}

fn exact_point(r0: &str, r1: &str) -> Result<ParamVector, ExitCode> {
    let a = parse_rational(r0).map_err(usage)?;
    let b = parse_rational(r1).map_err(usage)?;
    ParamVector::from_rationals(&[a, b]).map_err(usage)
}

fn open_cache(path: &Option<PathBuf>) -> Result<Option<DecisionCache>, ExitCode> {
    match path {
        None => Ok(None),
        Some(p) => DecisionCache::open(p).map(Some).map_err(|e| {
            eprintln!("error: cannot open cache {}: {e}", p.display());
            ExitCode::from(EXIT_CANTCREAT)
        }),
    }
}

fn cert_code(e: &CertError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(match e {
        CertError::NotExpanding => 3,
        CertError::MarginTooSmall { .. } => 4,
        CertError::RhoOutOfRange { .. } | CertError::InvalidRect(_) => EXIT_USAGE,
        _ => 2,
    })
}

fn decide(r0: &str, r1: &str, rho: Option<f64>, cache: Option<PathBuf>) -> Result<ExitCode, ExitCode> {
    let r = exact_point(r0, r1)?;
    let [a, b] = [r.exact_at(0).unwrap(), r.exact_at(1).unwrap()];
    let mut cache = open_cache(&cache)?;
    if let Some(v) = cache.as_ref().and_then(|c| c.lookup(&a, &b)) {
        println!("{v}");
        println!("cached: {}", cache.as_ref().unwrap().path().display());
        return Ok(verdict_code(v));
    }
    let d = decide_point_report(&r, rho).map_err(|e| cert_code(&e))?;
    println!("{}", d.verdict);
    println!("witnesses: {}", d.witnesses);
    println!("rho: {}", d.rho);
    println!("margin: {:e}", d.margin);
    if d.cycles.len() > 1 {
        let all: Vec<String> = d.cycles.iter().map(|c| c.to_string()).collect();
        println!("cycles: {}", all.join(" "));
    }
    if let Some(c) = cache.as_mut() {
        c.store(&a, &b, &d.verdict).map_err(|e| {
            eprintln!("error: cannot write cache {}: {e}", c.path().display());
            ExitCode::from(EXIT_CANTCREAT)
        })?;
    }
    Ok(verdict_code(&d.verdict))
}

fn scan_error(e: ScanError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(match e {
        ScanError::Io { .. } => EXIT_CANTCREAT,
        ScanError::Config(_) => EXIT_USAGE,
        ScanError::Cert(_) => EXIT_SOFTWARE,
    })
}

fn scan(
    config: &ScanConfig,
    out: Option<PathBuf>,
    csv: Option<PathBuf>,
    json: Option<PathBuf>,
    cache: Option<PathBuf>,
) -> Result<ExitCode, ExitCode> {
    config.validate().map_err(scan_error)?;
    let open = |p: &Option<PathBuf>| p.as_deref().map(create_output).transpose().map_err(scan_error);
    let (out_w, csv_w, json_w) = (open(&out)?, open(&csv)?, open(&json)?);
    let mut cache = open_cache(&cache)?;
    let res = run_scan(config, cache.as_mut()).map_err(scan_error)?;

    let io = |p: &Option<PathBuf>, e: std::io::Error| {
        scan_error(ScanError::Io {
            path: p.clone().unwrap_or_default(),
            source: e,
        })
    };
    if let Some(w) = out_w {
        write_pgm(&res, w).map_err(|e| io(&out, e))?;
    }
    if let Some(w) = csv_w {
        write_csv(&res, w).map_err(|e| io(&csv, e))?;
    }
    match json_w {
        Some(w) => write_json(&res, w).map_err(|e| io(&json, e))?,
        None if out.is_none() && csv.is_none() => {
            write_json(&res, std::io::stdout().lock()).map_err(|e| io(&None, e))?
        }
        None => {}
    }
    let counts: Vec<String> = res.counts.iter().map(|(k, v)| format!("{k}={v}")).collect();
    eprintln!("{} pixels: {}", res.pixels.len(), counts.join(" "));
    Ok(ExitCode::SUCCESS)
}

fn region(rect: &str, json: Option<PathBuf>, max_depth: usize, jobs: usize) -> Result<ExitCode, ExitCode> {
    let k = RationalRect::parse(rect).map_err(usage)?;
    let json_w = json.as_deref().map(create_output).transpose().map_err(scan_error)?;
    let opts = RegionOptions {
        max_depth,
        ..RegionOptions::default()
    };
    let work = || decide_region_with(&k, &opts);
    let cells = if jobs == 0 {
        work()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(usage)?
            .install(work)
    }
    .map_err(|e| cert_code(&e))?;

    let full = rational_to_f64(&((k.r0()[1] - k.r0()[0]) * (k.r1()[1] - k.r1()[0])));
    let mut undecided = false;
    for (i, c) in cells.iter().enumerate() {
        undecided |= matches!(c.verdict, CellVerdict::Undecided { .. });
        let area = c.cell.double_area();
        let frac = area_f64(&area) / 2.0 / full;
        println!("cell {i}: {} in {} area={frac:.6}", c.verdict, c.rect);
    }
    let covered = area_f64(&total_area(&cells)) / full;
    println!("cells: {} coverage={covered:.6}", cells.len());
    if let (Some(mut w), Some(p)) = (json_w, json.as_ref()) {
        use std::io::Write;
        serde_json::to_writer_pretty(&mut w, &cells)
            .map_err(std::io::Error::from)
            .and_then(|_| w.flush())
            .map_err(|e| {
                scan_error(ScanError::Io {
                    path: p.clone(),
                    source: e,
                })
            })?;
    }
    Ok(ExitCode::from(if undecided { 2 } else { 0 }))
}

fn area_f64(q: &srs_lab::certified::Q) -> f64 {
    use num_traits::ToPrimitive;
    q.to_f64().unwrap_or(f64::NAN)
}
