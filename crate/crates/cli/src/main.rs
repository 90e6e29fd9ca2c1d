use std::path::Path;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use newton_strata::affine_weyl::AffineWeylElt;
use newton_strata::empirics::{
    empirical_poset, predicate_campaign, run_campaign, search_witness, PredicateGrid, SampleConfig,
    SearchConfig,
};
use newton_strata::isocrystal::{fmt_q, slope_sequence, IsoMatrix, SlopeSeq};
use newton_strata::strata::{
    adlv_nonempty, codim, codim_roottheoretic, is_exceptional, poset_of, table_entry, witness_prec,
    witness_with, SlopeSource, Witness,
};
use newton_strata::Error;

const SEED_ENV: &str = "NEWTON_STRATA_SEED";

#[derive(Parser, Debug)]
#[command(
    name = "newton-strata",
    version,
    about = "Newton strata of Iwahori double cosets in SL3"
)]
struct Cli {
    #[command(flatten)]
    flags: Flags,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Flags {
    /// Residue characteristic.
    #[arg(long, global = true, default_value_t = 11)]
    p: u32,
    /// Working precision for parsed matrices.
    #[arg(long, global = true, default_value_t = 30)]
    prec: i32,
    #[arg(long, global = true, default_value_t = 10_000)]
    trials: u64,
    /// Defaults to $NEWTON_STRATA_SEED, then 0.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,
    #[arg(long, global = true)]
    json: bool,
}

impl Flags {
    fn seed(&self) -> Result<u64, Error> {
        if let Some(s) = self.seed {
            return Ok(s);
        }
        match std::env::var(SEED_ENV) {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("{SEED_ENV}={v:?} is not an integer"))),
            Err(_) => Ok(0),
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Slope sequence and Newton polygon of a matrix.
    Slopes {
        /// File path, or inline rows such as "t^-1,0,0; 0,1,0; 0,0,t".
        matrix: String,
    },
    /// Elements and covers of the poset of Newton strata.
    Poset {
        x: String,
        #[arg(long)]
        dot: bool,
    },
    /// Codimension of a stratum.
    Codim {
        x: String,
        lambda: String,
        /// Also print the root-theoretic value and exception membership.
        #[arg(long)]
        both: bool,
    },
    /// Non-emptiness of the affine Deligne-Lusztig variety.
    Adlv {
        x: String,
        #[arg(long, conflicts_with = "lambda", required_unless_present = "lambda")]
        b: Option<String>,
        #[arg(long)]
        lambda: Option<String>,
    },
    /// A matrix in the coset with prescribed slopes.
    Witness {
        x: String,
        lambda: String,
        /// Fall back to a random search when no formula applies.
        #[arg(long)]
        search: bool,
    },
    /// Histogram of slopes over random samples of the coset.
    Sample {
        x: String,
        #[arg(long)]
        csv: bool,
    },
    /// Compare closed-stratum descriptions with computed slopes on random samples.
    Campaign {
        #[arg(long, default_value_t = 2)]
        bound: i32,
        #[arg(long, default_value_t = 100)]
        samples: u64,
    },
    /// Generic slope and poset shape for each element of a grid.
    Tables {
        #[arg(long, default_value_t = 2)]
        bound: i32,
        /// Restrict to one finite Weyl part, e.g. s12.
        #[arg(long)]
        w: Option<String>,
        #[arg(long)]
        limit: Option<usize>,
        /// Compare with sampled supports.
        #[arg(long)]
        verify: bool,
    },
}

/// Exit code for a library error.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse(_)
        | Error::InvalidSlopes(_)
        | Error::InvalidElement(_)
        | Error::Dimension(_)
        | Error::ModulusMismatch(..)
        | Error::BadModulus(_)
        | Error::Config(_) => 2,
        Error::InsufficientPrecision { .. }
        | Error::NoCyclicVectorFound
        | Error::NotInvertible { .. } => 3,
        _ => 4,
    }
}

fn parse_x(s: &str) -> Result<AffineWeylElt, Error> {
    s.parse()
}

fn parse_lambda(s: &str) -> Result<SlopeSeq, Error> {
    s.parse()
}

fn read_matrix(arg: &str, flags: &Flags) -> Result<IsoMatrix, Error> {
    let text = if Path::new(arg).is_file() {
        std::fs::read_to_string(arg).map_err(|e| Error::Parse(format!("{arg}: {e}")))?
    } else {
        arg.to_string()
    };
    if text.trim_start().starts_with('{') {
        serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))
    } else {
        IsoMatrix::parse(&text, flags.p, flags.prec)
    }
}

fn print_json(v: &impl Serialize) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

type Outcome = Result<u8, Error>;

fn cmd_slopes(matrix: &str, flags: &Flags) -> Outcome {
    let a = read_matrix(matrix, flags)?;
    let lam = slope_sequence(&a)?;
    let poly = lam.polygon();
    let vertices: Vec<(usize, String)> =
        poly.vertices.iter().map(|(i, y)| (*i, fmt_q(y))).collect();
    if flags.json {
        print_json(&json!({ "slopes": lam.to_string(), "vertices": vertices }));
    } else {
        println!("{lam}");
        let v: Vec<String> = vertices.iter().map(|(i, y)| format!("({i},{y})")).collect();
        println!("vertices: {}", v.join(" "));
    }
    Ok(0)
}

fn cmd_poset(x: &str, dot: bool, flags: &Flags) -> Outcome {
    let x = parse_x(x)?;
    let pos = poset_of(&x);
    if dot {
        print!("{}", pos.poset.to_dot("strata"));
    } else if flags.json {
        print_json(&*pos);
    } else {
        println!("x: {x}");
        println!("nu_x: {}", pos.nu_x);
        println!("shape: {}", pos.shape);
        println!("elements:");
        for l in pos.elements() {
            println!("  {l}");
        }
        println!("covers:");
        for (lo, hi) in &pos.poset.cover {
            println!("  {} < {}", pos.elements()[*lo], pos.elements()[*hi]);
        }
    }
    Ok(0)
}

fn cmd_codim(x: &str, lambda: &str, both: bool, flags: &Flags) -> Outcome {
    let x = parse_x(x)?;
    let lam = parse_lambda(lambda)?;
    let c = codim(&x, &lam)?;
    let rt = match codim_roottheoretic(&x, &lam) {
        Ok(v) => Some(v),
        Err(Error::ExceptionBranchAtGeneric) => None,
        Err(e) => return Err(e),
    };
    let exc = is_exceptional(&x);
    if flags.json {
        let mut v = json!({ "x": x.to_string(), "lambda": lam.to_string(), "codim": c });
        if both {
            v["corollary"] = json!(rt);
            v["exceptional"] = json!(exc);
        }
        print_json(&v);
    } else if both {
        println!("codim: {c}");
        match rt {
            Some(r) => println!("corollary: {r}"),
            None => println!("corollary: undefined"),
        }
        println!("exceptional: {}", if exc { "yes" } else { "no" });
    } else {
        println!("{c}");
    }
    Ok(0)
}

fn cmd_adlv(x: &str, b: Option<&str>, lambda: Option<&str>, flags: &Flags) -> Outcome {
    let x = parse_x(x)?;
    let src = match (b, lambda) {
        (Some(m), _) => SlopeSource::Matrix(read_matrix(m, flags)?),
        (None, Some(l)) => SlopeSource::Slopes(parse_lambda(l)?),
        (None, None) => return Err(Error::Parse("one of --b or --lambda is required".into())),
    };
    let nonempty = adlv_nonempty(&x, &src)?;
    let word = if nonempty { "nonempty" } else { "empty" };
    if flags.json {
        print_json(&json!({ "x": x.to_string(), "nonempty": nonempty }));
    } else {
        println!("{word}");
    }
    Ok(if nonempty { 0 } else { 1 })
}

fn cmd_witness(x: &str, lambda: &str, search: bool, flags: &Flags) -> Outcome {
    let x = parse_x(x)?;
    let lam = parse_lambda(lambda)?;
    let prec = witness_prec(&x).max(flags.prec);
    let w: Witness = match witness_with(&x, &lam, flags.p, prec) {
        Ok(w) => w,
        Err(Error::NoWitnessFormula(s)) if search => {
            let cfg = SearchConfig {
                attempts: flags.trials,
                seed: flags.seed()?,
                p: flags.p,
                ..SearchConfig::default()
            };
            search_witness(&x, &lam, &cfg)?.ok_or(Error::NoWitnessFormula(s))?
        }
        Err(e) => return Err(e),
    };
    if flags.json {
        print_json(&w);
    } else {
        println!("formula: {}", w.formula);
        println!("{}", w.matrix);
    }
    Ok(0)
}

fn sample_config(x: &AffineWeylElt, flags: &Flags) -> Result<SampleConfig, Error> {
    Ok(SampleConfig::coset(x, flags.p, flags.trials, flags.seed()?)?.with_workers(flags.workers))
}

fn cmd_sample(x: &str, csv: bool, flags: &Flags) -> Outcome {
    let x = parse_x(x)?;
    let report = run_campaign(&x, &sample_config(&x, flags)?)?;
    if flags.json {
        print_json(&report);
    } else if csv {
        println!("slopes,count");
        for (k, v) in &report.histogram {
            println!("\"{k}\",{v}");
        }
    } else {
        for (k, v) in &report.histogram {
            println!("{k}\t{v}");
        }
        println!("unresolved\t{}", report.unresolved);
        for (k, v) in &report.failures {
            println!("failed ({k})\t{v}");
        }
    }
    Ok(0)
}

fn cmd_campaign(bound: i32, samples: u64, flags: &Flags) -> Outcome {
    let mut grid = PredicateGrid::new(bound, samples, flags.p, flags.seed()?);
    grid.workers = flags.workers;
    let r = predicate_campaign(&grid)?;
    if flags.json {
        print_json(&r);
        return Ok(0);
    }
    println!("case\tpairs\tsamples\tinside\tmismatches\tunresolved");
    for (k, c) in &r.cases {
        println!(
            "{k}\t{}\t{}\t{}\t{}\t{}",
            c.pairs, c.samples, c.inside, c.mismatches, c.unresolved
        );
    }
    for m in &r.mismatches {
        println!(
            "mismatch {} at {} ({}): predicate {} slopes {}\n{}",
            m.x, m.lam, m.case, m.predicate, m.slopes, m.matrix
        );
    }
    Ok(0)
}

#[derive(Serialize)]
struct TableRow {
    x: String,
    chamber: String,
    condition: String,
    nu_x: String,
    shape: String,
    size: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    verify: Option<Verify>,
}

#[derive(Serialize)]
struct Verify {
    sampled: usize,
    outside: Vec<String>,
    /// Strata missed by sampling but realized by a witness.
    covered: usize,
    uncovered: Vec<String>,
}

fn verify_row(x: &AffineWeylElt, flags: &Flags) -> Result<Verify, Error> {
    let pos = poset_of(x);
    let h = empirical_poset(x, &sample_config(x, flags)?)?;
    let outside = h
        .support()
        .into_iter()
        .filter(|l| !pos.contains(l))
        .map(|l| l.to_string())
        .collect();
    let mut covered = 0;
    let mut uncovered = Vec::new();
    for l in pos.elements().iter().filter(|l| !h.counts.contains_key(l)) {
        let found = match witness_with(x, l, flags.p, witness_prec(x)) {
            Ok(_) => true,
            Err(_) => {
                let cfg = SearchConfig {
                    seed: flags.seed()?,
                    p: flags.p,
                    ..SearchConfig::default()
                };
                search_witness(x, l, &cfg)?.is_some()
            }
        };
        if found {
            covered += 1;
        } else {
            uncovered.push(l.to_string());
        }
    }
    Ok(Verify {
        sampled: h.counts.len(),
        outside,
        covered,
        uncovered,
    })
}

fn cmd_tables(
    bound: i32,
    w: Option<&str>,
    limit: Option<usize>,
    verify: bool,
    flags: &Flags,
) -> Outcome {
    let w = w.map(str::parse).transpose()?;
    let xs: Vec<AffineWeylElt> = AffineWeylElt::grid(bound)
        .into_iter()
        .filter(|x| w.is_none_or(|w| x.w() == w))
        .take(limit.unwrap_or(usize::MAX))
        .collect();
    let mut rows = Vec::with_capacity(xs.len());
    let mut discrepancies = 0;
    for x in &xs {
        let e = table_entry(x);
        let pos = poset_of(x);
        let v = if verify {
            Some(verify_row(x, flags)?)
        } else {
            None
        };
        if let Some(v) = &v {
            discrepancies += v.outside.len() + v.uncovered.len();
        }
        rows.push(TableRow {
            x: x.to_string(),
            chamber: e.chamber.to_string(),
            condition: e.condition,
            nu_x: e.nu.to_string(),
            shape: e.shape.to_string(),
            size: pos.elements().len(),
            verify: v,
        });
    }
    if flags.json {
        print_json(&json!({ "rows": rows, "discrepancies": discrepancies }));
    } else {
        for r in &rows {
            let mut line = format!(
                "{}\tchamber {}\t{}\tnu_x {}\t{}\t|N| {}",
                r.x, r.chamber, r.condition, r.nu_x, r.shape, r.size
            );
            if let Some(v) = &r.verify {
                line.push_str(&format!(
                    "\tsampled {} outside {} witnessed {} uncovered {}",
                    v.sampled,
                    v.outside.len(),
                    v.covered,
                    v.uncovered.len()
                ));
            }
            println!("{line}");
        }
        if verify {
            println!("discrepancies: {discrepancies}");
        }
    }
    Ok(if discrepancies == 0 { 0 } else { 4 })
}

fn run(cli: &Cli) -> Outcome {
    let f = &cli.flags;
    match &cli.command {
        Command::Slopes { matrix } => cmd_slopes(matrix, f),
        Command::Poset { x, dot } => cmd_poset(x, *dot, f),
        Command::Codim { x, lambda, both } => cmd_codim(x, lambda, *both, f),
        Command::Adlv { x, b, lambda } => cmd_adlv(x, b.as_deref(), lambda.as_deref(), f),
        Command::Witness { x, lambda, search } => cmd_witness(x, lambda, *search, f),
        Command::Sample { x, csv } => cmd_sample(x, *csv, f),
        Command::Campaign { bound, samples } => cmd_campaign(*bound, *samples, f),
        Command::Tables {
            bound,
            w,
            limit,
            verify,
        } => cmd_tables(*bound, w.as_deref(), *limit, *verify, f),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
