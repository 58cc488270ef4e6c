//! `hodgejet`: batch front end over JSON documents.
//!
//! Exit codes: 0 success, 2 bad input or violated precondition, 3 scale
//! guard, 4 internal error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use hodgejet::connection::{hyperelliptic_data_with, CurvatureEntry, GammaCorrection};
use hodgejet::ideal::GroebnerDoc;
use hodgejet::jets::JetDoc;
use hodgejet::{
    alpha, beta, compute_xi, curvature, germ_contained, AlgebraicData,
    ConstraintVariety, Error, ExactPoly, Ideal, Jet, MonomialOrder, QMatrix, Rational,
};

#[derive(Parser)]
#[command(name = "hodgejet", version, about = "Exact jet computations for algebraic flat connections")]
struct Cli {
    /// Write the output document here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Connection data of the hyperelliptic family of the given genus.
    GenHyperelliptic {
        #[arg(long)]
        genus: usize,
        /// Use the classical ordering of the gamma block (not flat for genus >= 2).
        #[arg(long)]
        classical: bool,
    },
    /// Curvature test.
    CheckFlat { data: PathBuf },
    /// Derivative polynomials of flat frames up to the given order.
    Xi {
        data: PathBuf,
        #[arg(long)]
        order: usize,
    },
    /// Jet of the flat frame with initial value MATRIX along JET.
    BetaEval { data: PathBuf, jet: PathBuf, matrix: PathBuf },
    /// Inverse of beta-eval: the flag representative jet.
    AlphaEval { data: PathBuf, jet: PathBuf, matrix: PathBuf },
    /// Germ transport matrix at POINT with initial value MATRIX.
    Tau {
        data: PathBuf,
        point: PathBuf,
        matrix: PathBuf,
        #[arg(long)]
        order: usize,
    },
    /// Orbit test of alpha(JET, MATRIX) against a constraint variety.
    ConstraintTest {
        data: PathBuf,
        jet: PathBuf,
        variety: PathBuf,
        /// Initial frame value; the identity when omitted.
        #[arg(long)]
        matrix: Option<PathBuf>,
    },
    /// Germ containment of a transported function in a subvariety germ.
    GermTest { data: PathBuf, problem: PathBuf },
    /// Reduced Gröbner basis of an ideal.
    Groebner {
        ideal: PathBuf,
        #[arg(long, value_enum, default_value_t = Order::Grevlex)]
        order: Order,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Order {
    Grevlex,
    Lex,
}

/// Input of `germ-test`.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GermProblem {
    ideal: Ideal,
    #[serde(with = "hodgejet::rational::serde_vec")]
    point: Vec<Rational>,
    matrix: QMatrix,
    function: ExactPoly,
    order: usize,
}

#[derive(Serialize)]
struct FlatReport {
    flat: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    nonzero_entries: Option<Vec<CurvatureEntry>>,
}

#[derive(Serialize)]
struct GermReport {
    result: bool,
}

#[derive(Debug)]
enum Failure {
    Input(String),
    Scale(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::ScaleGuard(msg) => Failure::Scale(msg),
            other => Failure::Input(other.to_string()),
        }
    }
}

fn read<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn read_point(path: &Path) -> Result<Vec<Rational>, Failure> {
    let strings: Vec<String> = read(path)?;
    strings
        .iter()
        .map(|s| hodgejet::rational::parse(s).map_err(Failure::from))
        .collect()
}

fn read_jet(path: &Path, data: &AlgebraicData) -> Result<Jet, Failure> {
    let doc: JetDoc = read(path)?;
    Ok(Jet::from_doc(&doc, data.chart())?)
}

fn render<T: Serialize>(value: &T) -> Result<String, Failure> {
    let mut text = serde_json::to_string(value).map_err(|e| Failure::Input(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

fn run(command: &Command) -> Result<String, Failure> {
    match command {
        Command::GenHyperelliptic { genus, classical } => {
            if *genus == 0 {
                return Err(Failure::Input("genus must be at least 1".into()));
            }
            let variant = if *classical {
                GammaCorrection::Classical
            } else {
                GammaCorrection::Flat
            };
            render(&hyperelliptic_data_with(*genus, variant))
        }
        Command::CheckFlat { data } => {
            let data: AlgebraicData = read(data)?;
            let entries = curvature(&data).nonzero_entries();
            render(&FlatReport {
                flat: entries.is_empty(),
                nonzero_entries: (!entries.is_empty()).then_some(entries),
            })
        }
        Command::Xi { data, order } => {
            let data: AlgebraicData = read(data)?;
            render(&compute_xi(&data, *order).to_doc())
        }
        Command::BetaEval { data, jet, matrix } | Command::AlphaEval { data, jet, matrix } => {
            let data: AlgebraicData = read(data)?;
            let sigma = read_jet(jet, &data)?;
            let m0: QMatrix = read(matrix)?;
            let out = if matches!(command, Command::BetaEval { .. }) {
                beta(&data, &sigma, &m0)?
            } else {
                alpha(&data, &sigma, &m0)?
            };
            render(&out.to_doc())
        }
        Command::Tau {
            data,
            point,
            matrix,
            order,
        } => {
            let data: AlgebraicData = read(data)?;
            let s = read_point(point)?;
            let m0: QMatrix = read(matrix)?;
            render(&hodgejet::tau_germ(&data, &s, &m0, *order)?.to_doc())
        }
        Command::ConstraintTest {
            data,
            jet,
            variety,
            matrix,
        } => {
            let data: AlgebraicData = read(data)?;
            let sigma = read_jet(jet, &data)?;
            let w = ConstraintVariety::from_doc(&read(variety)?)?;
            let m0 = match matrix {
                Some(p) => read(p)?,
                None => QMatrix::identity(data.rank()),
            };
            render(&hodgejet::constraints::constraint_test_with(&sigma, &data, &w, &m0)?)
        }
        Command::GermTest { data, problem } => {
            let data: AlgebraicData = read(data)?;
            let p: GermProblem = read(problem)?;
            let result = germ_contained(&p.ideal, &p.point, &data, &p.matrix, &p.function, p.order)?;
            render(&GermReport { result })
        }
        Command::Groebner { ideal, order } => {
            let ideal: Ideal = read(ideal)?;
            let order = match order {
                Order::Grevlex => MonomialOrder::grevlex(),
                Order::Lex => MonomialOrder::lex(),
            };
            render(&GroebnerDoc::from(&ideal.groebner(&order)))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = std::panic::catch_unwind(|| run(&cli.command));
    let text = match outcome {
        Ok(Ok(text)) => text,
        Ok(Err(Failure::Input(msg))) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
        Ok(Err(Failure::Scale(msg))) => {
            eprintln!("error: {msg}");
            return ExitCode::from(3);
        }
        Err(_) => return ExitCode::from(4),
    };
    let written = match &cli.out {
        Some(path) => fs::write(path, &text),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(text.as_bytes())
        }
    };
    match written {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
