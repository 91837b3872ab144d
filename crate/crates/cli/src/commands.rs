use std::fs::File;
use std::io::{self, BufWriter, Write};

use achronal::linespace::{additivity_check, causality_check, covariance_check, localization_probability, StateDensity};
use achronal::poincare::Spin;
use achronal::spectrum::{multiplicity_table, SpinContext};
use achronal::surfaces::{region_of_influence, AchronalSurface, Region};
use nalgebra::Vector3;
use serde::Serialize;

use crate::args::{Cli, Command, DecomposeArgs, InfluenceArgs, LocalizeArgs, MultiplicityArgs, VerifyArgs};
use crate::config::{Format, RunConfig, Thresholds};
use crate::error::{CliError, CliResult, EXIT_ASSERTION, EXIT_PASS};
use crate::inputs::{read_json, TransformSpec};
use crate::report::{write_json, Document, Header, SuiteReport, VerifyReport};
use crate::suites::{lattice, localization, spectrum, Suite};

/// Runs one parsed command line and returns its exit code.
pub fn execute(cli: &Cli) -> CliResult<u8> {
    let g = &cli.global;
    let thresholds = match &g.tolerance_file {
        Some(path) => Thresholds::from_file(path)?,
        None => Thresholds::default(),
    };
    if g.workers == Some(0) {
        return Err(CliError::Config("--workers must be at least 1".into()));
    }
    if g.samples == Some(0) {
        return Err(CliError::Config("--samples must be at least 1".into()));
    }
    let default_format = match cli.command {
        Command::Influence(_) | Command::Multiplicity(_) => Format::Csv,
        _ => Format::Json,
    };
    let cfg = RunConfig {
        seed: g.seed,
        samples: g.samples,
        workers: g.workers,
        format: g.format.unwrap_or(default_format),
        thresholds,
    };
    let mut out: Box<dyn Write + Send> = match &g.output {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).map_err(|e| CliError::Config(format!("cannot create {}: {e}", path.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout())),
    };
    let mut run = || match &cli.command {
        Command::Verify(a) => verify(&cfg, a, &mut out),
        Command::Localize(a) => localize(&cfg, a, &mut out),
        Command::Influence(a) => influence(&cfg, a, &mut out),
        Command::Decompose(a) => decompose(&cfg, a, &mut out),
        Command::Multiplicity(a) => multiplicity(&cfg, a, &mut out),
    };
    let code = match cfg.workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Config(format!("cannot start {n} workers: {e}")))?
            .install(run)?,
        None => run()?,
    };
    out.flush()?;
    Ok(code)
}

fn exit_code(passes: bool) -> u8 {
    if passes {
        EXIT_PASS
    } else {
        EXIT_ASSERTION
    }
}

fn report_failures(suites: &[SuiteReport]) {
    for s in suites {
        for p in s.failures() {
            eprintln!("FAIL {}/{}: worst {:e} > {:e}", s.suite, p.name, p.worst, p.tolerance);
        }
    }
}

fn state_or_standard(args: &VerifyArgs) -> CliResult<StateDensity> {
    args.state.as_deref().map_or(Ok(StateDensity::standard()), |p| read_json(p, "state"))
}

fn required<'a>(value: &'a Option<std::path::PathBuf>, flag: &str, suite: Suite) -> CliResult<&'a std::path::Path> {
    value.as_deref().ok_or_else(|| CliError::Config(format!("verify {} needs --{flag} with custom inputs", suite.name())))
}

/// The suite on user inputs when any are given.
fn custom_suite(cfg: &RunConfig, args: &VerifyArgs) -> CliResult<Option<SuiteReport>> {
    let inputs = [&args.state, &args.region, &args.target, &args.transform, &args.partition];
    let any_input = inputs.iter().any(|i| i.is_some());
    if args.universe.is_some() && args.suite != Suite::Lattice {
        return Err(CliError::Config("--universe applies to verify lattice only".into()));
    }
    if !any_input {
        return args.universe.as_deref().map(|u| lattice::run_universe(&lattice::resolve_universe(u)?)).transpose();
    }
    let n = cfg.n(100_000);
    let seed = cfg.seed_for(1000);
    let report = match args.suite {
        Suite::Causality => {
            let region: Region = read_json(required(&args.region, "region", args.suite)?, "region")?;
            let target: AchronalSurface = read_json(required(&args.target, "target", args.suite)?, "target surface")?;
            let r = causality_check(&state_or_standard(args)?, &region, &target, n, seed)?;
            let props = vec![localization::causality_property(&r, "causality")];
            SuiteReport::new("causality", props, serde_json::to_value(&r).expect("serializable"))
        }
        Suite::Covariance => {
            let region: Region = read_json(required(&args.region, "region", args.suite)?, "region")?;
            let spec: TransformSpec = read_json(required(&args.transform, "transform", args.suite)?, "transform")?;
            let r = covariance_check(&state_or_standard(args)?, &region, &spec.element()?, n, seed)?;
            let props = localization::covariance_properties(&r, "custom", cfg.thresholds.sigmas);
            SuiteReport::new("covariance", props, serde_json::to_value(&r).expect("serializable"))
        }
        Suite::Additivity => {
            let partition: Vec<Region> = read_json(required(&args.partition, "partition", args.suite)?, "partition")?;
            if partition.windows(2).any(|w| w[0].surface != w[1].surface) {
                return Err(CliError::Config("partition regions must share one surface".into()));
            }
            let r = additivity_check(&state_or_standard(args)?, &partition, n, seed)?;
            let props = vec![localization::additivity_property(&r, "partition-probabilities-sum-to-one")];
            SuiteReport::new("additivity", props, serde_json::to_value(&r).expect("serializable"))
        }
        other => {
            return Err(CliError::Config(format!("verify {} takes no input files", other.name())));
        }
    };
    Ok(Some(report))
}

fn verify(cfg: &RunConfig, args: &VerifyArgs, out: &mut impl Write) -> CliResult<u8> {
    let suites = match custom_suite(cfg, args)? {
        Some(r) => vec![r],
        None => args.suite.run(cfg)?,
    };
    report_failures(&suites);
    let report = VerifyReport::new(Header::new(format!("verify {}", args.suite.name()), cfg), suites);
    match cfg.format {
        Format::Json => write_json(out, &report)?,
        Format::Csv => report.write_csv(out)?,
    }
    Ok(exit_code(report.passes))
}

#[derive(Debug, Serialize)]
struct Localized {
    estimate: f64,
    std_error: f64,
    n: usize,
    seed: u64,
}

fn localize(cfg: &RunConfig, args: &LocalizeArgs, out: &mut impl Write) -> CliResult<u8> {
    let state: StateDensity = read_json(&args.state, "state")?;
    let region: Region = read_json(&args.region, "region")?;
    let n = cfg.n(100_000);
    let est = localization_probability(&state, &region, n, cfg.seed)?;
    let body = Localized { estimate: est.value, std_error: est.std_error, n, seed: cfg.seed };
    let header = Header::new("localize", cfg);
    match cfg.format {
        Format::Json => write_json(out, &Document { header, body })?,
        Format::Csv => {
            header.write_comments(out)?;
            let mut w = csv::Writer::from_writer(out);
            w.serialize(&body)?;
            w.flush()?;
        }
    }
    Ok(EXIT_PASS)
}

fn axis_points(lo: f64, hi: f64, steps: usize) -> impl Iterator<Item = f64> {
    (0..steps).map(move |k| if steps == 1 { lo } else { lo + (hi - lo) * k as f64 / (steps - 1) as f64 })
}

#[derive(Debug, Serialize)]
struct InfluenceRow {
    y1: f64,
    y2: f64,
    y3: f64,
    in_influence: u8,
}

#[derive(Debug, Serialize)]
struct InfluenceBody {
    points: Vec<InfluenceRow>,
}

fn influence(cfg: &RunConfig, args: &InfluenceArgs, out: &mut impl Write) -> CliResult<u8> {
    let region: Region = read_json(&args.region, "region")?;
    let target: AchronalSurface = read_json(&args.target, "target surface")?;
    if [args.min.len(), args.max.len(), args.steps.len()] != [3; 3] {
        return Err(CliError::Config("--min, --max and --steps take three comma-separated values".into()));
    }
    let (lo, hi) = (Vector3::from_column_slice(&args.min), Vector3::from_column_slice(&args.max));
    if !lo.iter().chain(hi.iter()).all(|c| c.is_finite()) || args.steps.contains(&0) {
        return Err(CliError::Config("grid needs finite corners and at least one step per axis".into()));
    }
    let mut points = Vec::new();
    for y1 in axis_points(lo.x, hi.x, args.steps[0]) {
        for y2 in axis_points(lo.y, hi.y, args.steps[1]) {
            for y3 in axis_points(lo.z, hi.z, args.steps[2]) {
                let inside = region_of_influence(&region, &target, &Vector3::new(y1, y2, y3))?;
                points.push(InfluenceRow { y1, y2, y3, in_influence: u8::from(inside) });
            }
        }
    }
    let header = Header::new("influence", cfg);
    match cfg.format {
        Format::Json => write_json(out, &Document { header, body: InfluenceBody { points } })?,
        Format::Csv => {
            header.write_comments(out)?;
            let mut w = csv::Writer::from_writer(out);
            points.iter().try_for_each(|r| w.serialize(r))?;
            w.flush()?;
        }
    }
    Ok(EXIT_PASS)
}

fn decompose(cfg: &RunConfig, args: &DecomposeArgs, out: &mut impl Write) -> CliResult<u8> {
    if cfg.format == Format::Csv {
        return Err(CliError::Config("decompose writes JSON only".into()));
    }
    let ctx = SpinContext::new(args.mu, args.spin, args.l_max)?;
    let suite = spectrum::run_decomposition(cfg, &ctx)?;
    report_failures(std::slice::from_ref(&suite));
    let report = VerifyReport::new(Header::new(format!("decompose --spin {} --mu {}", args.spin, args.mu), cfg), vec![suite]);
    write_json(out, &report)?;
    Ok(exit_code(report.passes))
}

#[derive(Debug, Serialize)]
struct MultiplicityRow {
    #[serde(rename = "J")]
    spin: Spin,
    j: Spin,
    nu: u32,
}

#[derive(Debug, Serialize)]
struct MultiplicityBody {
    table: Vec<MultiplicityRow>,
}

fn multiplicity(cfg: &RunConfig, args: &MultiplicityArgs, out: &mut impl Write) -> CliResult<u8> {
    let table: Vec<MultiplicityRow> = multiplicity_table(args.max_spin)
        .into_iter()
        .map(|(spin, j, nu)| MultiplicityRow { spin, j, nu })
        .collect();
    let header = Header::new(format!("multiplicity --max-spin {}", args.max_spin), cfg);
    match cfg.format {
        Format::Json => write_json(out, &Document { header, body: MultiplicityBody { table } })?,
        Format::Csv => {
            header.write_comments(out)?;
            let mut w = csv::Writer::from_writer(out);
            table.iter().try_for_each(|r| w.serialize(r))?;
            w.flush()?;
        }
    }
    Ok(EXIT_PASS)
}
