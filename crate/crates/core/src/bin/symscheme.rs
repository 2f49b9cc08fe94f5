use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use symscheme::experiments::{
    bundle_json, emit_bundle, emit_report, estimate_order, report_csv, report_json, run_experiment, sci,
    ExperimentSpec, Resolution, SchemeChoice, SchemeKind,
};
use symscheme::{Error, Ex3Variant};

#[derive(Parser)]
#[command(name = "symscheme", version, about = "Invariant vs standard difference schemes: error tables and plot data")]
struct Cli {
    /// Print JSON instead of CSV.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one example at the given resolutions.
    Run(RunArgs),
    /// Like `run`, and also print the observed orders.
    Convergence(RunArgs),
    /// Example 5 on [0, 6] across its pole.
    Singularity {
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.01,0.001")]
        h: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Invariant,
    Standard,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Blowup,
    Noblowup,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=5))]
    example: u8,
    #[arg(long, value_enum, default_value = "both")]
    scheme: SchemeArg,
    /// Step sizes (start-up spacing for the non-uniform examples).
    #[arg(long, value_delimiter = ',', conflicts_with = "intervals")]
    h: Option<Vec<f64>>,
    /// Uniform interval counts over the whole interval, instead of `--h`.
    #[arg(long, value_delimiter = ',')]
    intervals: Option<Vec<usize>>,
    #[arg(long, value_enum, default_value = "blowup")]
    variant: VariantArg,
    /// Interval override `a,b`.
    #[arg(long, value_delimiter = ',', num_args = 1)]
    interval: Option<Vec<f64>>,
    /// Initial-value override `y,y',...`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    initial: Option<Vec<f64>>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn default_resolutions(example: u8) -> Vec<Resolution> {
    match example {
        1 => [10, 100, 1000].map(Resolution::Intervals).to_vec(),
        2 => [1.0, 0.1, 0.01].map(Resolution::Step).to_vec(),
        4 => [0.02, 0.01, 0.005].map(Resolution::Step).to_vec(),
        _ => [0.1, 0.01, 0.001].map(Resolution::Step).to_vec(),
    }
}

fn spec_from(args: RunArgs) -> Result<ExperimentSpec, Error> {
    let resolutions = match (args.h, args.intervals) {
        (Some(h), _) => h.into_iter().map(Resolution::Step).collect(),
        (None, Some(n)) => n.into_iter().map(Resolution::Intervals).collect(),
        (None, None) => default_resolutions(args.example),
    };
    let interval = match args.interval.as_deref() {
        None => None,
        Some([a, b]) => Some((*a, *b)),
        Some(_) => return Err(Error::InvalidConfig("--interval expects a,b".into())),
    };
    Ok(ExperimentSpec {
        example: args.example,
        scheme: match args.scheme {
            SchemeArg::Invariant => SchemeChoice::Invariant,
            SchemeArg::Standard => SchemeChoice::Standard,
            SchemeArg::Both => SchemeChoice::Both,
        },
        resolutions,
        interval,
        initial: args.initial,
        variant: match args.variant {
            VariantArg::Blowup => Ex3Variant::Blowup,
            VariantArg::Noblowup => Ex3Variant::NoBlowup,
        },
        out_dir: args.out,
    })
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Run(args) => experiment(args, false, cli.json),
        Command::Convergence(args) => experiment(args, true, cli.json),
        Command::Singularity { h, out } => {
            let bundle = symscheme::experiments::singularity_run(&h)?;
            if let Some(dir) = out {
                emit_bundle(&bundle, &dir)?;
            }
            if cli.json {
                print!("{}", bundle_json(&bundle));
            } else {
                println!("reference stops at {}", bundle.reference_failure.map_or("-".into(), sci));
                for s in &bundle.standard {
                    println!("standard h={} stops at {}", sci(s.h), s.failure_x.map_or("-".into(), sci));
                }
                for (h, x) in &bundle.invariant_reach {
                    println!("invariant h={} reaches {}", sci(*h), sci(*x));
                }
                for d in &bundle.discrepancies {
                    println!("discrepancy h={} vs h={}: {}", sci(d.coarse_h), sci(d.fine_h), sci(d.relative));
                }
            }
            Ok(())
        }
    }
}

fn experiment(args: RunArgs, convergence: bool, json: bool) -> Result<(), Error> {
    let spec = spec_from(args)?;
    let report = run_experiment(&spec)?;
    if convergence {
        for kind in [SchemeKind::Invariant, SchemeKind::Standard] {
            let rows: Vec<(f64, f64)> = report
                .rows_for(kind)
                .filter(|r| r.failure.is_none())
                .map(|r| (r.h, r.endpoint_error.filter(|_| spec.example == 3).unwrap_or(r.max_error)))
                .collect();
            if report.rows_for(kind).next().is_some() {
                let orders = estimate_order(&rows)?;
                let text: Vec<String> = orders.iter().map(|p| format!("{p:.3}")).collect();
                eprintln!("{} orders: {}", kind.name(), text.join(", "));
            }
        }
    }
    if let Some(dir) = &spec.out_dir {
        emit_report(&report, dir)?;
    }
    if json {
        print!("{}", report_json(&report));
    } else {
        print!("{}", report_csv(&report)?);
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_spec_error() || matches!(e, Error::Io { .. } | Error::Output { .. }) {
                ExitCode::from(2)
            } else {
                ExitCode::from(3)
            }
        }
    }
}
