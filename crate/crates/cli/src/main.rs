//! `hyperquot`: Betti tables, basis listings, operator application and
//! relation verification for the Fock-module model.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or domain error.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use hyperquot_core::fock::enumerate_basis;
use hyperquot_core::series::{betti_csv, betti_json, betti_rows, poincare_enumerate, poincare_product};
use hyperquot_core::yangian::{verify, Grid};
use hyperquot_core::{FockElement, Model, ModelParams, OperatorExpr};

#[derive(Debug, Parser)]
#[command(name = "hyperquot", version, about = "Exact Fock-module model for the cohomology of Hyperquot schemes on curves")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Flag length n.
    #[arg(long, global = true, default_value_t = 1)]
    n: usize,
    /// Rank r of V.
    #[arg(long, global = true, default_value_t = 1)]
    r: usize,
    /// Genus of the curve.
    #[arg(long, global = true, default_value_t = 0)]
    g: u32,
    /// Degree of V.
    #[arg(long = "degV", global = true, default_value_t = 0, allow_hyphen_values = true)]
    deg_v: i64,
    /// Truncation bound on d_n.
    #[arg(long, global = true, default_value_t = 3)]
    bound: u32,
    /// Comma-separated degree vector, e.g. `1,2`.
    #[arg(long, global = true, value_delimiter = ',')]
    dvec: Option<Vec<u32>>,
    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Cross-check the product formula against basis enumeration.
    #[arg(long, global = true)]
    check: bool,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Relation selector: R1..R12, BA, CONF or all.
    #[arg(long, global = true, default_value = "all")]
    relation: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Betti table from the product formula.
    Betti,
    /// Canonical basis monomials of one dvec, by cohomological degree.
    Basis,
    /// Apply an operator expression to an element.
    Act {
        /// Operator expression (JSON).
        #[arg(long)]
        expr: PathBuf,
        /// Fock element (JSON).
        #[arg(long)]
        element: PathBuf,
    },
    /// Check relations of the shifted Yangian on the truncated module.
    Verify {
        /// Optional grid (JSON) restricting superscripts, colors and basis.
        #[arg(long)]
        grid: Option<PathBuf>,
        /// Number of confluence samples.
        #[arg(long)]
        samples: Option<usize>,
    },
}

/// Command result: output text and whether a check failed.
struct Output {
    text: String,
    failed: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            if let Err(e) = emit(&cli, &out.text) {
                eprintln!("error: {e:#}");
                return ExitCode::from(2);
            }
            if out.failed {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn emit(cli: &Cli, text: &str) -> anyhow::Result<()> {
    match &cli.out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn params(cli: &Cli) -> anyhow::Result<ModelParams> {
    Ok(ModelParams::new(cli.n, cli.r, cli.g, cli.deg_v, cli.bound)?)
}

fn run(cli: &Cli) -> anyhow::Result<Output> {
    match &cli.command {
        Command::Betti => betti(cli),
        Command::Basis => basis(cli),
        Command::Act { expr, element } => act(cli, expr, element),
        Command::Verify { grid, samples } => verify_cmd(cli, grid.as_ref(), *samples),
    }
}

fn betti(cli: &Cli) -> anyhow::Result<Output> {
    let p = params(cli)?;
    let cells = match &cli.dvec {
        Some(d) => {
            p.check_dvec(d)?;
            vec![d.clone()]
        }
        None => p.cells(),
    };
    let series = poincare_product(&p);
    let mut rows = betti_rows(&series, &cells);
    let mut failed = false;
    if cli.check {
        for dvec in &cells {
            let agree = poincare_enumerate(&p, dvec)? == series.z_poly(dvec);
            failed |= !agree;
            for row in rows.iter_mut().filter(|r| &r.dvec == dvec) {
                row.agree = Some(agree);
            }
        }
    }
    let text = match cli.format.unwrap_or(Format::Csv) {
        Format::Csv => betti_csv(p.n, &rows),
        Format::Json => betti_json(&rows) + "\n",
        Format::Text => {
            let mut out = String::new();
            for dvec in &cells {
                let row: Vec<_> = rows.iter().filter(|r| &r.dvec == dvec).collect();
                let zdegs: Vec<String> = row.iter().map(|r| r.zdeg.to_string()).collect();
                let bettis: Vec<String> = row.iter().map(|r| r.betti.to_string()).collect();
                let dv: Vec<String> = dvec.iter().map(u32::to_string).collect();
                out.push_str(&format!("dvec ({}): betti {} at zdeg {}", dv.join(","), bettis.join(","), zdegs.join(",")));
                if let Some(Some(a)) = row.first().map(|r| r.agree) {
                    out.push_str(if a { " [agree]" } else { " [MISMATCH]" });
                }
                out.push('\n');
            }
            out
        }
    };
    Ok(Output { text, failed })
}

fn basis(cli: &Cli) -> anyhow::Result<Output> {
    let p = params(cli)?;
    let Some(dvec) = &cli.dvec else { bail!("basis requires --dvec") };
    let monomials = enumerate_basis(&p, dvec)?;
    let text = match cli.format.unwrap_or(Format::Text) {
        Format::Text => monomials.iter().map(|m| m.display(p.g) + "\n").collect(),
        Format::Csv => {
            let mut out = String::from("cohdeg,monomial\n");
            for m in &monomials {
                out.push_str(&format!("{},{}\n", m.cohdeg(p.g), m.display(p.g)));
            }
            out
        }
        Format::Json => {
            let docs: Vec<_> = monomials
                .iter()
                .map(|m| serde_json::json!({ "cohdeg": m.cohdeg(p.g), "gens": m.keys(), "text": m.display(p.g) }))
                .collect();
            serde_json::to_string_pretty(&docs)? + "\n"
        }
    };
    Ok(Output { text, failed: false })
}

fn act(cli: &Cli, expr_path: &PathBuf, element_path: &PathBuf) -> anyhow::Result<Output> {
    let expr_text = fs::read_to_string(expr_path).with_context(|| format!("reading {}", expr_path.display()))?;
    let element_text = fs::read_to_string(element_path).with_context(|| format!("reading {}", element_path.display()))?;
    let expr = OperatorExpr::from_json(&expr_text).with_context(|| format!("parsing {}", expr_path.display()))?;
    let (p, x) = FockElement::from_json(&element_text).with_context(|| format!("parsing {}", element_path.display()))?;
    let model = Model::new(p)?;
    let y = model.evaluate(&expr, &x)?;
    let text = match cli.format.unwrap_or(Format::Json) {
        Format::Json => y.to_json(&p) + "\n",
        Format::Text => y.display(p.g) + "\n",
        Format::Csv => bail!("act supports json and text output"),
    };
    Ok(Output { text, failed: false })
}

fn verify_cmd(cli: &Cli, grid_path: Option<&PathBuf>, samples: Option<usize>) -> anyhow::Result<Output> {
    let p = params(cli)?;
    let mut grid = match grid_path {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            Grid::from_json(&text)?
        }
        None => Grid::default(),
    };
    grid.seed = Some(cli.seed);
    if samples.is_some() {
        grid.samples = samples;
    }
    let report = verify(&cli.relation, &p, &grid)?;
    let text = match cli.format.unwrap_or(Format::Text) {
        Format::Text => report.to_text(),
        Format::Json => report.to_json() + "\n",
        Format::Csv => bail!("verify supports text and json output"),
    };
    Ok(Output { text, failed: !report.success() })
}
