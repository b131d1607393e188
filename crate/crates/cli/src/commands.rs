use std::fs;
use std::io::Read;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use genuskit::checks;
use genuskit::order_genus::{self, OrderSpec};
use genuskit::{matrix_mod, Atom, Error, Limits, Result};

#[derive(Parser, Debug)]
#[command(
    name = "genuskit",
    version,
    about = "Genus counts of orders and stable polyhedral atoms"
)]
pub struct Cli {
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Maximum number of group or ring elements any enumeration may store
    #[arg(long, global = true, env = "GENUSKIT_CAP")]
    pub cap: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Euler's totient phi(m)
    Totient {
        #[arg(allow_negative_numbers = true)]
        m: i64,
    },
    /// Order of GL(r, Z/m) by exhaustive scan
    GlOrder {
        #[arg(allow_negative_numbers = true)]
        r: i64,
        #[arg(allow_negative_numbers = true)]
        m: i64,
    },
    /// Order of the image of GL(r, Z) in GL(r, Z/m)
    StableImage {
        #[arg(allow_negative_numbers = true)]
        r: i64,
        #[arg(allow_negative_numbers = true)]
        m: i64,
    },
    /// Double cosets Im(G^x) \ (G/mG)^x / (L/mG)^x for an order spec file ("-" for stdin)
    DoubleCosets { spec: PathBuf },
    /// Genus of the order described by a spec file ("-" for stdin)
    GenusOrder { spec: PathBuf },
    /// Genus of Z x_m Z, by enumeration and by closed form
    GenusPullback {
        #[arg(allow_negative_numbers = true)]
        m: i64,
    },
    /// Genus of a catalog atom, e.g. "A(5)@10" or "C(eta)@4"
    GenusAtom { atom: String },
    /// Genus table of the atoms A(v), v = 1..12
    #[command(name = "table-A")]
    TableA,
    /// Run the bundled self-checks
    Check {
        /// Seed for the randomized checks
        #[arg(long, default_value_t = checks::DEFAULT_SEED)]
        seed: u64,
    },
}

pub struct Output {
    pub text: String,
    pub failed: bool,
}

fn positive(name: &str, v: i64) -> Result<u64> {
    if v < 1 {
        Err(Error::InvalidArgument(format!(
            "{name} must be at least 1, got {v}"
        )))
    } else {
        Ok(v as u64)
    }
}

fn read_spec(path: &PathBuf) -> Result<OrderSpec> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Error::InvalidArgument(format!("cannot read stdin: {e}")))?;
        s
    } else {
        fs::read_to_string(path)
            .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?
    };
    OrderSpec::from_json(&text)
}

/// What one verb produced: the machine-readable inputs and result, plus
/// the human rendering.
struct Report {
    verb: &'static str,
    inputs: Value,
    result: Value,
    text: String,
    failed: bool,
}

fn report(verb: &'static str, inputs: Value, result: Value, text: String) -> Report {
    Report {
        verb,
        inputs,
        result,
        text,
        failed: false,
    }
}

pub fn run(cli: &Cli) -> Result<Output> {
    let limits = cli.cap.map(Limits::with_cap).unwrap_or_default();
    let start = Instant::now();
    let rep = execute(&cli.command, &limits)?;
    let text = match cli.format {
        Format::Text => {
            let mut t = rep.text;
            if !t.ends_with('\n') {
                t.push('\n');
            }
            t
        }
        Format::Json => {
            let obj = json!({
                "verb": rep.verb,
                "inputs": rep.inputs,
                "result": rep.result,
                "elapsedMs": start.elapsed().as_millis() as u64,
            });
            format!("{obj}\n")
        }
    };
    Ok(Output {
        text,
        failed: rep.failed,
    })
}

fn execute(command: &Command, limits: &Limits) -> Result<Report> {
    Ok(match command {
        Command::Totient { m } => {
            let phi = genuskit::totient(positive("m", *m)?)?;
            report("totient", json!({ "m": m }), json!(phi), phi.to_string())
        }
        Command::GlOrder { r, m } => {
            let (r, m) = (positive("r", *r)? as usize, positive("m", *m)?);
            let order = matrix_mod::enumerate_gl(r, m, limits)?.order();
            report(
                "gl-order",
                json!({ "r": r, "m": m }),
                json!(order),
                order.to_string(),
            )
        }
        Command::StableImage { r, m } => {
            let (r, m) = (positive("r", *r)? as usize, positive("m", *m)?);
            let image = matrix_mod::stable_image(r, m, limits)?.order();
            let gl = matrix_mod::enumerate_gl(r, m, limits)?.order();
            report(
                "stable-image",
                json!({ "r": r, "m": m }),
                json!({ "order": image, "glOrder": gl, "index": gl / image }),
                format!("order={image} gl_order={gl} index={}", gl / image),
            )
        }
        Command::DoubleCosets { spec } => {
            let order = read_spec(spec)?;
            let blocks = order_genus::double_cosets(&order, limits)?;
            let sizes: Vec<usize> = blocks.iter().map(Vec::len).collect();
            let sizes_text: Vec<String> = sizes.iter().map(ToString::to_string).collect();
            report(
                "double-cosets",
                json!({ "spec": serde_json::from_str::<Value>(&order.to_json()).expect("valid json") }),
                json!({ "count": blocks.len(), "blockSizes": sizes }),
                format!("count={} sizes={}", blocks.len(), sizes_text.join(",")),
            )
        }
        Command::GenusOrder { spec } => {
            let order = read_spec(spec)?;
            let g = order_genus::genus(&order, limits)?;
            report(
                "genus-order",
                json!({ "spec": serde_json::from_str::<Value>(&order.to_json()).expect("valid json") }),
                serde_json::to_value(g).expect("serializable"),
                format!(
                    "relative={} maximal={} total={} bound={}",
                    g.relative_count, g.maximal_count, g.total, g.bound
                ),
            )
        }
        Command::GenusPullback { m } => {
            let m = positive("m", *m)?;
            let brute = order_genus::genus(&order_genus::pullback_spec(m)?, limits)?.total;
            let formula = order_genus::genus_pullback_formula(m)?;
            let mut rep = report(
                "genus-pullback",
                json!({ "m": m }),
                json!({ "brute": brute, "formula": formula }),
                format!("brute={brute} formula={formula}"),
            );
            rep.failed = brute != formula;
            rep
        }
        Command::GenusAtom { atom } => {
            let a: Atom = atom.parse()?;
            let g = a.genus(limits)?;
            report(
                "genus-atom",
                json!({ "atom": a.to_string() }),
                json!({
                    "genus": g,
                    "torsion": a.is_torsion(),
                    "endo": serde_json::to_value(a.endo_order()).expect("serializable"),
                    "b0": a.rational_wedge(),
                }),
                g.to_string(),
            )
        }
        Command::TableA => {
            let rows = checks::atom_a_rows(limits)?;
            let mut text = format!(
                "{:>3} {:>3} {:>3} {:>9} {:>11}\n",
                "v", "d", "m", "g(brute)", "g(formula)"
            );
            for r in &rows {
                text.push_str(&format!(
                    "{:>3} {:>3} {:>3} {:>9} {:>11}\n",
                    r.v, r.d, r.m, r.brute, r.formula
                ));
            }
            let failed = rows.iter().any(|r| r.brute != r.formula);
            let mut rep = report(
                "table-A",
                json!({}),
                serde_json::to_value(&rows).expect("serializable"),
                text,
            );
            rep.failed = failed;
            rep
        }
        Command::Check { seed } => {
            let outcomes = checks::run_all(limits, *seed);
            let text: String = outcomes.iter().map(|o| o.line() + "\n").collect();
            let failed = outcomes.iter().any(|o| !o.passed);
            let result: Vec<Value> = outcomes
                .iter()
                .map(|o| {
                    json!({
                        "id": o.id,
                        "name": o.name,
                        "passed": o.passed,
                        "expected": o.expected,
                        "actual": o.actual,
                        "elapsedMs": o.elapsed.as_millis() as u64,
                    })
                })
                .collect();
            let mut rep = report("check", json!({ "seed": seed }), json!(result), text);
            rep.failed = failed;
            rep
        }
    })
}
