use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use timed_dicke::config::{parse_echo, parse_pairs};
use timed_dicke::{parse_config, presets, runner, Error, RunConfig};

#[derive(Parser)]
#[command(name = "tdicke", version, about = "Timed-Dicke superradiance / subradiance runs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Propagate and write one CSV per run.
    Run(RunArgs),
    /// Write the sorted eigenvalues of the TD-basis generator.
    Spectrum(RunArgs),
    /// List the built-in presets.
    Presets,
}

#[derive(Args, Default)]
struct RunArgs {
    /// Base scenario (fig1a, fig1b, fig2, fig3, fig4).
    #[arg(long)]
    preset: Option<String>,
    /// Flat `key = value` config file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Re-run from the configuration echo at the top of an emitted CSV.
    #[arg(long, conflicts_with_all = ["config", "preset"])]
    replay: Option<PathBuf>,

    #[arg(long)]
    geometry: Option<String>,
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    radius: Option<String>,
    #[arg(long)]
    spacing: Option<String>,
    #[arg(long)]
    target_count: Option<String>,
    /// Wavevector as `x,y,z`.
    #[arg(long, allow_hyphen_values = true)]
    k0: Option<String>,
    #[arg(long)]
    sections: Option<String>,
    /// sine | exp
    #[arg(long)]
    kernel: Option<String>,
    /// plus | minus | ladder:<m> | section:<m>
    #[arg(long)]
    init: Option<String>,
    /// auto | rk4 | eigen
    #[arg(long)]
    solver: Option<String>,
    #[arg(long)]
    dt: Option<String>,
    #[arg(long)]
    t_max: Option<String>,
    #[arg(long)]
    stride: Option<String>,
    /// `all` or a comma list such as `plus,2,3,121`.
    #[arg(long)]
    tracked: Option<String>,
    #[arg(long)]
    gamma: Option<String>,
    #[arg(long)]
    output: Option<PathBuf>,
}

impl RunArgs {
    fn flag_pairs(&self) -> Vec<(String, String)> {
        let fields = [
            ("geometry", &self.geometry),
            ("n", &self.n),
            ("radius", &self.radius),
            ("spacing", &self.spacing),
            ("target_count", &self.target_count),
            ("k0", &self.k0),
            ("sections", &self.sections),
            ("kernel", &self.kernel),
            ("init", &self.init),
            ("solver", &self.solver),
            ("dt", &self.dt),
            ("t_max", &self.t_max),
            ("stride", &self.stride),
            ("tracked", &self.tracked),
            ("gamma", &self.gamma),
        ];
        let mut pairs: Vec<(String, String)> = fields
            .into_iter()
            .filter_map(|(k, v)| v.as_ref().map(|v| (k.to_string(), v.clone())))
            .collect();
        if let Some(out) = &self.output {
            pairs.push(("output".into(), out.display().to_string()));
        }
        pairs
    }

    fn resolve(&self) -> Result<Vec<RunConfig>, Error> {
        let file_pairs = match (&self.config, &self.replay) {
            (Some(path), _) => parse_pairs(&fs::read_to_string(path)?)?,
            (None, Some(path)) => parse_echo(&fs::read_to_string(path)?)?,
            (None, None) => Vec::new(),
        };
        parse_config(self.preset.as_deref(), &file_pairs, &self.flag_pairs())
    }
}

fn run(args: &RunArgs) -> Result<(), Error> {
    let runs = args.resolve()?;
    for summary in runner::run_all(&runs)? {
        println!(
            "wrote {} ({} atoms, {} solver, {} rows)",
            summary.output.display(),
            summary.atoms,
            summary.solver,
            summary.rows
        );
    }
    Ok(())
}

fn spectrum(args: &RunArgs) -> Result<(), Error> {
    for cfg in args.resolve()? {
        let path = runner::spectrum(&cfg)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(args) => run(args),
        Command::Spectrum(args) => spectrum(args),
        Command::Presets => {
            for name in presets::NAMES {
                println!("{name:<6} {}", presets::describe(name).unwrap_or_default());
            }
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err @ Error::Config { .. }) => {
            eprintln!("usage error: {err}");
            ExitCode::from(2)
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}
