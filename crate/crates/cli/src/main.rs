// `!(x < y)` is used on purpose so NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use rayon::prelude::*;

mod commands;
mod config;
mod error;
mod table;

use commands::Context;
use config::{Format, RunConfig};
use error::CliError;
use table::{Cell, Table};

/// Maxwell-Bloch amplifier and ring-laser calculations driven by a JSON config.
#[derive(Debug, Parser)]
#[command(name = "mbloch", version)]
struct Args {
    /// Config file; `-` reads standard input.
    #[arg(short, long)]
    config: PathBuf,
    /// Output file (overrides `output.path`); standard output when neither is set.
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Output format (overrides `output.format` and the file extension).
    #[arg(short, long, value_enum)]
    format: Option<Format>,
    /// Worker threads for sweeps; 0 picks one per core.
    #[arg(short = 'j', long, env = "MBLOCH_THREADS", default_value_t = 0)]
    threads: usize,
    /// Seed for noise and tangent vectors (overrides `seed`).
    #[arg(long)]
    seed: Option<u64>,
    /// Validate the config and report diagnostics without running.
    #[arg(long)]
    check: bool,
}

fn read_config(path: &Path) -> io::Result<String> {
    if path == Path::new("-") {
        let mut text = String::new();
        io::stdin().read_to_string(&mut text)?;
        Ok(text)
    } else {
        std::fs::read_to_string(path)
    }
}

fn pick_format(args: &Args, cfg: &RunConfig, path: Option<&Path>) -> Format {
    let by_extension = path
        .and_then(|p| p.extension())
        .filter(|e| e.eq_ignore_ascii_case("json"))
        .map(|_| Format::Json);
    args.format.or(cfg.output.format).or(by_extension).unwrap_or(Format::Csv)
}

fn pool(threads: usize) -> Result<rayon::ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Solver(format!("cannot start worker threads: {e}")))
}

fn execute(args: &Args, cfg: &RunConfig, ctx: &Context) -> Result<Table, CliError> {
    let Some(sweep) = &cfg.sweep else {
        return cfg.job.run(ctx);
    };
    let points = sweep
        .values()
        .into_iter()
        .map(|x| cfg.job.with_param(&sweep.param_path, x).map(|job| (x, job)))
        .collect::<Result<Vec<_>, _>>()
        .map_err(CliError::Config)?;
    // collect keeps point order whatever the scheduling
    let results: Vec<Result<Table, CliError>> =
        pool(args.threads)?.install(|| points.par_iter().map(|(_, job)| job.run(ctx)).collect());

    let names = ["sweep_index".to_owned(), sweep.param_path.clone()];
    let mut out: Option<Table> = None;
    for (i, (result, (x, _))) in results.into_iter().zip(&points).enumerate() {
        let table = result.map_err(|e| annotate(e, i, &sweep.param_path, *x))?;
        let table = table.with_leading(&names, &[Cell::from(i), Cell::from(*x)]);
        match &mut out {
            None => out = Some(table),
            Some(acc) => acc.rows.extend(table.rows),
        }
    }
    Ok(out.unwrap_or_default())
}

fn annotate(e: CliError, i: usize, path: &str, x: f64) -> CliError {
    let at = format!("sweep point {i} ({path} = {x})");
    match e {
        CliError::Config(m) => CliError::Config(format!("{at}: {m}")),
        CliError::Solver(m) => CliError::Solver(format!("{at}: {m}")),
        CliError::Regime(m) => CliError::Regime(format!("{at}: {m}")),
        io @ CliError::Io(_) => io,
    }
}

fn write_table(table: &Table, format: Format, command: &str, path: Option<&Path>) -> io::Result<()> {
    match path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p)?);
            table.write(format, command, &mut w)?;
            w.flush()
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            table.write(format, command, &mut w)?;
            w.flush()
        }
    }
}

fn run(args: &Args) -> Result<(), CliError> {
    let text = read_config(&args.config)?;
    let text = if text.trim().is_empty() { "{}" } else { text.as_str() };
    let (cfg, diags) = config::validate(text);
    for d in &diags {
        eprintln!("{}: {d}", args.config.display());
    }
    let Some(cfg) = cfg else {
        let n = diags.iter().filter(|d| d.is_error()).count();
        return Err(CliError::Config(format!("{n} error(s) in {}", args.config.display())));
    };
    if args.check {
        eprintln!("{}: ok", args.config.display());
        return Ok(());
    }
    let ctx = Context {
        seed: args.seed.unwrap_or(cfg.seed),
        units: cfg.units,
    };
    let table = execute(args, &cfg, &ctx)?;
    let path = args.out.as_deref().or(cfg.output.path.as_deref());
    let format = pick_format(args, &cfg, path);
    write_table(&table, format, cfg.command.name(), path)?;
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        // a closed downstream pipe (e.g. `| head`) is not a failure
        Err(CliError::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("mbloch: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
