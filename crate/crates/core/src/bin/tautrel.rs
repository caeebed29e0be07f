use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use tautrel::chiodo::{chiodo_chern_char, RelationSpec};
use tautrel::relgen::{pushforward_relation_with, MultiplicityModel};
use tautrel::strata::Limits;
use tautrel::verify::{verify_with, VerifyOptions};
use tautrel::wkint::{kappa_psi_integral, KappaPsiMonomial};
use tautrel::{enumerate_stable_graphs, Error, Rational, StableGraph};

#[derive(Parser)]
#[command(name = "tautrel", version, about = "Tautological relations from r-torsion line bundles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the JSON output to FILE instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Pushed-forward relation as a list of decorated strata.
    Generate(SpecArgs),
    /// Pair the relation with the complementary monomials.
    Verify {
        #[command(flatten)]
        spec: SpecArgs,
        /// Skip the lower bound of the degree window (sanity controls).
        #[arg(long)]
        allow_out_of_window: bool,
    },
    /// Integral of a ψ/κ monomial.
    Intersect {
        #[arg(long)]
        g: u32,
        #[arg(long, value_delimiter = ',')]
        psi: Vec<u32>,
        #[arg(long, value_delimiter = ',')]
        kappa: Vec<u32>,
    },
    /// Stable graphs of a given type.
    Graphs {
        #[arg(long)]
        g: u32,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        max_edges: Option<u32>,
    },
    /// Chern character of the derived pushforward of the root.
    Chern(SpecArgs),
}

#[derive(Args)]
struct SpecArgs {
    #[arg(long)]
    g: u32,
    #[arg(long)]
    n: u32,
    #[arg(long)]
    r: u32,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    a: Vec<u32>,
    #[arg(long)]
    d: u32,
    #[arg(long)]
    nontrivial_component: bool,
    /// Cap on the number of stable graphs per moduli space.
    #[arg(long, default_value_t = Limits::default().max_graphs)]
    max_graphs: usize,
    /// Cap on the number of terms in any intermediate product.
    #[arg(long, default_value_t = Limits::default().max_terms)]
    max_terms: usize,
}

impl SpecArgs {
    fn spec(&self) -> RelationSpec {
        RelationSpec {
            g: self.g,
            n: self.n,
            r: self.r,
            a: self.a.clone(),
            d: self.d,
            nontrivial_component: self.nontrivial_component,
        }
    }

    fn limits(&self) -> Limits {
        Limits { max_graphs: self.max_graphs, max_terms: self.max_terms }
    }
}

#[derive(Serialize)]
struct IntegralJson {
    genus: u32,
    psi: Vec<u32>,
    kappa: Vec<u32>,
    value: Rational,
}

#[derive(Serialize)]
struct GraphEntry {
    graph: StableGraph,
    edges: usize,
    aut_order: usize,
}

fn emit<T: Serialize>(value: &T, out: &Option<PathBuf>) -> Result<(), Error> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Integrity(e.to_string()))?;
    match out {
        Some(path) => std::fs::write(path, text + "\n").map_err(|e| Error::Parameter(format!("{}: {e}", path.display()))),
        None => match writeln!(std::io::stdout().lock(), "{text}") {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Error::Integrity(e.to_string())),
            _ => Ok(()),
        },
    }
}

fn run(cli: &Cli) -> Result<bool, Error> {
    match &cli.command {
        Command::Generate(args) => {
            let relation = pushforward_relation_with(&args.spec(), MultiplicityModel::FROZEN, &args.limits(), false)?;
            emit(&relation.to_json(), &cli.out)?;
        }
        Command::Verify { spec, allow_out_of_window } => {
            let options = VerifyOptions {
                allow_out_of_window: *allow_out_of_window,
                model: MultiplicityModel::FROZEN,
                limits: spec.limits(),
            };
            let report = verify_with(&spec.spec(), &options)?;
            emit(&report, &cli.out)?;
            return Ok(report.all_zero);
        }
        Command::Intersect { g, psi, kappa } => {
            let value = kappa_psi_integral(&KappaPsiMonomial::new(*g, psi.clone(), kappa.clone()))?;
            emit(&IntegralJson { genus: *g, psi: psi.clone(), kappa: kappa.clone(), value }, &cli.out)?;
        }
        Command::Graphs { g, n, max_edges } => {
            tautrel::graphs::check_stable_type(*g, *n)?;
            let max = max_edges.unwrap_or(3 * g + n - 3);
            let entries: Vec<GraphEntry> = enumerate_stable_graphs(*g, *n, max)?
                .into_iter()
                .map(|graph| GraphEntry { edges: graph.num_edges(), aut_order: graph.plain_aut_order(), graph })
                .collect();
            emit(&entries, &cli.out)?;
        }
        Command::Chern(args) => {
            let spec = args.spec();
            spec.validate_structure()?;
            emit(&chiodo_chern_char(&spec, args.d)?, &cli.out)?;
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Spec(_) | Error::Parameter(_) | Error::Dimension(_) | Error::Graph(_) => 2,
                Error::ResourceLimit(_) => 4,
                Error::Integrity(_) => 1,
            })
        }
    }
}
