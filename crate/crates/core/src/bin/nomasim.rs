use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use nomasim::{
    parse_config, pdf_check, run, run_matrix, write_records, Error, RunSummary, ScenarioConfig,
    Scheme,
};

/// Mobile two-user downlink NOMA simulator.
#[derive(Parser, Debug)]
#[command(name = "nomasim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one scheme and write per-step records as CSV.
    Run(CommonArgs),
    /// Run several schemes on the same seed and write one summary row each.
    Compare(CommonArgs),
    /// Check a configuration and print it with all defaults filled in.
    Validate(CommonArgs),
    /// Test simulated BS distances against the analytic distance law.
    PdfCheck {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
    },
}

#[derive(Args, Debug)]
struct CommonArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    steps: Option<usize>,
    /// Scheme name; `compare` accepts a comma-separated list.
    #[arg(long, value_delimiter = ',')]
    scheme: Vec<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// KEY=VALUE override (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

enum Failure {
    Config(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_config_error() {
            Failure::Config(e.to_string())
        } else {
            Failure::Runtime(e.to_string())
        }
    }
}

impl CommonArgs {
    fn load(&self, allow_many_schemes: bool) -> Result<(ScenarioConfig, Vec<Scheme>), Failure> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| {
                    Failure::Config(format!("{}: {e}", path.display()))
                })?;
                parse_config(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?
            }
            None => ScenarioConfig::default(),
        };
        for assignment in &self.set {
            cfg.apply_assignment(assignment)?;
        }
        if let Some(seed) = self.seed {
            cfg.apply_override("seed", &seed.to_string())?;
        }
        if let Some(steps) = self.steps {
            cfg.apply_override("steps", &steps.to_string())?;
        }
        let schemes = self
            .scheme
            .iter()
            .map(|s| s.parse::<Scheme>())
            .collect::<Result<Vec<_>, _>>()?;
        if schemes.len() > 1 && !allow_many_schemes {
            return Err(Failure::Config("only one --scheme may be given here".into()));
        }
        if let Some(&first) = schemes.first() {
            cfg.scheduler.scheme = first;
        }
        Ok((cfg, schemes))
    }

    fn sink(&self) -> Result<(Box<dyn Write>, String), Failure> {
        match &self.out {
            Some(path) => {
                let f = File::create(path)
                    .map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))?;
                Ok((Box::new(BufWriter::new(f)), path.display().to_string()))
            }
            None => Ok((Box::new(io::stdout().lock()), "<stdout>".to_string())),
        }
    }
}

fn summary_block(s: &RunSummary) -> String {
    let positions: Vec<String> = s.switch_positions.iter().map(|p| p.to_string()).collect();
    format!(
        "scheme={}\nseed={}\nrecords={}\nmean_psc={}\nmean_r_near={}\nmean_r_far={}\n\
         n_switches={}\noutage_fraction={}\nswitch_positions={}\n",
        s.scheme,
        s.seed,
        s.n_records,
        s.mean_psc,
        s.mean_r_near,
        s.mean_r_far,
        s.n_switches,
        s.outage_fraction,
        positions.join(" ")
    )
}

fn write_all(out: &mut dyn Write, sink: &str, text: &str) -> Result<(), Failure> {
    out.write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| Failure::Runtime(format!("{sink}: {e}")))
}

fn execute(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Run(args) => {
            let (cfg, _) = args.load(false)?;
            let output = run(&cfg)?;
            let (mut out, sink) = args.sink()?;
            write_records(&output.records, &mut out, &sink)?;
            drop(out);
            let block = summary_block(&output.summary);
            // Keep stdout pure CSV when records go there.
            if args.out.is_some() {
                print!("{block}");
            } else {
                eprint!("{block}");
            }
        }
        Command::Compare(args) => {
            let (cfg, mut schemes) = args.load(true)?;
            if schemes.is_empty() {
                schemes = Scheme::ALL.to_vec();
            }
            let results = run_matrix(&cfg, &schemes)?;
            let mut text = String::from(
                "scheme,seed,steps,mean_psc,mean_r_near,mean_r_far,n_switches,outage_fraction\n",
            );
            for scheme in &schemes {
                let s = &results[scheme].summary;
                text.push_str(&format!(
                    "{},{},{},{},{},{},{},{}\n",
                    s.scheme,
                    s.seed,
                    cfg.n_steps,
                    s.mean_psc,
                    s.mean_r_near,
                    s.mean_r_far,
                    s.n_switches,
                    s.outage_fraction
                ));
            }
            let (mut out, sink) = args.sink()?;
            write_all(&mut out, &sink, &text)?;
        }
        Command::Validate(args) => {
            let (cfg, _) = args.load(false)?;
            let (mut out, sink) = args.sink()?;
            write_all(&mut out, &sink, &cfg.to_config_string())?;
        }
        Command::PdfCheck { common, samples } => {
            let (cfg, _) = common.load(false)?;
            let report = pdf_check(samples, &cfg)?;
            let (mut out, sink) = common.sink()?;
            write_all(&mut out, &sink, &report.to_string())?;
            if !report.passed {
                return Err(Failure::Runtime(format!(
                    "distance samples reject the analytic law (KS statistic {:.6} >= critical value {:.6})",
                    report.statistic, report.critical_value
                )));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("config error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
