use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use latrep::report::{run, Command, Format, RunConfig};
use latrep::tensor::Window;

#[derive(Parser)]
#[command(
    name = "latrep",
    version,
    about = "Exact verification of ℓ-adic lattice and tensor-pairing properties"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Root and weight lattices of S_n at ℓ: P/Q, stable lattices, perfect forms.
    VerifyCraig(Common),
    /// Well-roundedness of a user action (--action) or of S_n on P (--n, --ell).
    VerifyWellrounded(Common),
    /// Discriminant, composition factors and witness for S ⊗ Γ.
    VerifyTensor(Common),
    /// Stable lattices of S ⊗ Γ in a window and their factorization.
    ClassifyLattices(Common),
    /// SL2-stand-in ⊗ S_m weight lattice, tensored with the S_n root lattice.
    CompositeDemo(Common),
    /// The full acceptance grid.
    Suite(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Markdown,
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    ell: Option<u64>,
    #[arg(long)]
    m: Option<usize>,
    /// Action file (`action dim=.. ngens=.. ell=..` followed by matrices).
    #[arg(long)]
    action: Option<PathBuf>,
    /// Scenario file with [s_action], [f], [d_action] and optional [window], [gamma], [h].
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// `k` for k layers each way, or `below:above`.
    #[arg(long, value_parser = parse_window)]
    window: Option<Window>,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
    /// Report path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_window(s: &str) -> Result<Window, String> {
    let num = |x: &str| x.trim().parse::<u32>().map_err(|e| format!("`{x}`: {e}"));
    match s.split_once(':') {
        Some((b, a)) => Ok(Window {
            below: num(b)?,
            above: num(a)?,
        }),
        None => {
            let k = num(s)?;
            Ok(Window { below: k, above: k })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, c) = match cli.command {
        Cmd::VerifyCraig(c) => (Command::VerifyCraig, c),
        Cmd::VerifyWellrounded(c) => (Command::VerifyWellrounded, c),
        Cmd::VerifyTensor(c) => (Command::VerifyTensor, c),
        Cmd::ClassifyLattices(c) => (Command::ClassifyLattices, c),
        Cmd::CompositeDemo(c) => (Command::CompositeDemo, c),
        Cmd::Suite(c) => (Command::Suite, c),
    };
    let config = RunConfig {
        command,
        n: c.n,
        ell: c.ell,
        m: c.m,
        action: c.action,
        scenario: c.scenario,
        window: c.window,
        out: c.out.clone(),
        format: match c.format {
            FormatArg::Json => Format::Json,
            FormatArg::Markdown => Format::Markdown,
        },
        jobs: c.jobs,
    };
    match run(&config) {
        Ok(outcome) => {
            if c.out.is_none() {
                print!("{}", outcome.rendered);
            }
            ExitCode::from(outcome.exit_code as u8)
        }
        Err(e) => {
            eprintln!("latrep: {e}");
            ExitCode::from(2)
        }
    }
}
