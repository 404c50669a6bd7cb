use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use halfclose::blocks::{all_block_systems_limited, is_normal_block_system, quotient, BlockSystem};
use halfclose::closure::{closure_52, is_52_closed, k_closure, Caps};
use halfclose::cyclic_keys::{
    enumerate_keys, pi_group, sylow_classification_check, validate_key, SylowMode,
};
use halfclose::fixer::{fixer_data, pstab, wstab, FixerReport};
use halfclose::incidence::{aut_group, circulant, ColoredTupleSystem};
use halfclose::io::{group_to_json, parse_group};
use halfclose::verify::{list_suites, run_suite, SuiteParams, DEFAULT_SEED};
use halfclose::wreath::wreath;
use halfclose::{Error, PermGroup};

const DEFAULT_MAX_DEGREE: usize = 64;
const MAX_DEGREE_VAR: &str = "HALF_CLOSE_MAX_DEGREE";
const BLOCK_SYSTEM_LIMIT: usize = 10_000;

/// Permutation groups, fixer block systems and 5/2-closures.
///
/// Every command prints one JSON object with sorted keys on stdout, including
/// the resolved configuration under "config". Exit status is 0 on success, 1
/// when a check fails or a cap is hit, 2 on bad input. Groups are read from
/// files of the form {"degree": n, "generators": ["(0 1 2)(3 4)", ...]}.
/// HALF_CLOSE_MAX_DEGREE overrides the degree limit (default 64).
#[derive(Parser)]
#[command(name = "halfclose", version)]
struct Cli {
    /// Indent the JSON output.
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CapArgs {
    /// Groups up to this order get an exact subgroup-lattice treatment.
    #[arg(long)]
    order_cap: Option<usize>,
    /// Random supplements tried above the order cap.
    #[arg(long)]
    samples: Option<usize>,
    /// Seed for the sampled mode.
    #[arg(long)]
    seed: Option<u64>,
    /// Closure sweeps before giving up.
    #[arg(long)]
    max_sweeps: Option<usize>,
}

impl CapArgs {
    fn resolve(&self) -> Caps {
        let mut caps = Caps::default();
        if let Some(v) = self.order_cap {
            caps.subgroup_order_cap = v;
        }
        if let Some(v) = self.samples {
            caps.samples = v;
        }
        if let Some(v) = self.seed {
            caps.seed = v;
        }
        if let Some(v) = self.max_sweeps {
            caps.max_sweeps = v;
        }
        caps
    }
}

#[derive(Subcommand)]
enum Command {
    /// Order, degree and transitivity of a group.
    Order {
        #[arg(long)]
        group: PathBuf,
    },
    /// All block systems of a transitive group, each flagged normal or not.
    Blocks {
        #[arg(long)]
        group: PathBuf,
    },
    /// Wreath stabilizers, the two block relations and the fixer system of a
    /// normal block system ({"blocks": [[0,3,6],[1,4,7],[2,5,8]]}).
    Fixer {
        #[arg(long)]
        group: PathBuf,
        #[arg(long)]
        blocks: PathBuf,
    },
    /// Wreath stabilizer and pointwise block stabilizer of one block.
    Wstab {
        #[arg(long)]
        group: PathBuf,
        #[arg(long)]
        blocks: PathBuf,
        /// Index of the block in the canonical order (sorted by least point).
        #[arg(long)]
        block: usize,
    },
    /// Whether a transitive group is 5/2-closed, with a witness if not.
    Check52 {
        #[arg(long)]
        group: PathBuf,
        #[command(flatten)]
        caps: CapArgs,
    },
    /// The 5/2-closure of a transitive group.
    Closure52 {
        #[arg(long)]
        group: PathBuf,
        #[command(flatten)]
        caps: CapArgs,
    },
    /// The k-closure for k = 1, 2 or 3 at small degree.
    Kclosure {
        #[arg(long)]
        group: PathBuf,
        #[arg(long)]
        k: usize,
    },
    /// The action of a group on the blocks of a block system.
    Quotient {
        #[arg(long)]
        group: PathBuf,
        #[arg(long)]
        blocks: PathBuf,
    },
    /// The imprimitive wreath product, point (x, y) numbered x*n + y.
    Wreath {
        #[arg(long)]
        top: PathBuf,
        #[arg(long)]
        bottom: PathBuf,
    },
    /// The group of a primary key, e.g. --p 3 --key 0,0,2.
    Pi {
        #[arg(long)]
        p: usize,
        #[arg(long, value_delimiter = ',')]
        key: Vec<usize>,
    },
    /// All primary keys of length n.
    Keys {
        #[arg(long)]
        n: usize,
    },
    /// Checks that 5/2-closures of p-groups containing the full cycle are
    /// primary-key groups.
    SylowCheck {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        n: usize,
        /// Walk every subgroup of the Sylow subgroup containing the cycle.
        #[arg(long, conflicts_with = "samples")]
        exhaustive: bool,
        /// Number of random subgroups to test (default 40).
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Automorphism group of a coloured tuple system
    /// ({"points": n, "tuples": [{"t": [0, 1], "c": 0}, ...]}).
    Aut {
        #[arg(long)]
        tuples: PathBuf,
    },
    /// Coloured circulant digraph on Z_n, e.g. --conn 1:0,3:1 for residue 1
    /// in colour 0 and residue 3 in colour 1, with its automorphism group.
    Circulant {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        conn: String,
    },
    /// Runs a named verification suite; exits 1 if it fails.
    Verify {
        #[arg(long)]
        suite: String,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        max_degree: Option<usize>,
        /// Instance target; 0 picks the suite default.
        #[arg(long, default_value_t = 0)]
        instances: usize,
        /// Include wall-clock time, which makes output vary between runs.
        #[arg(long)]
        timing: bool,
    },
    /// Lists verification suites whose names contain the filter.
    Suites {
        #[arg(default_value = "")]
        filter: String,
    },
}

/// Why a command did not succeed, mapped to an exit status.
enum Failure {
    Input(String),
    Compute(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::CapExceeded { .. } => Failure::Compute(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

struct Outcome {
    body: Value,
    ok: bool,
}

impl Outcome {
    fn ok(body: Value) -> Self {
        Outcome { body, ok: true }
    }
}

fn max_degree() -> Result<usize, Failure> {
    match std::env::var(MAX_DEGREE_VAR) {
        Ok(v) => v.trim().parse().map_err(|_| {
            Failure::Input(format!(
                "{MAX_DEGREE_VAR} must be a positive integer, got {v:?}"
            ))
        }),
        Err(_) => Ok(DEFAULT_MAX_DEGREE),
    }
}

fn check_degree(degree: usize, limit: usize) -> Result<(), Failure> {
    if degree > limit {
        return Err(Error::DegreeTooLarge { degree, limit }.into());
    }
    Ok(())
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn in_file(path: &Path, e: Error) -> Failure {
    Failure::Input(format!("{}: {e}", path.display()))
}

fn load_group(path: &Path, limit: usize) -> Result<PermGroup, Failure> {
    let g = parse_group(&read(path)?).map_err(|e| in_file(path, e))?;
    check_degree(g.degree(), limit)?;
    Ok(g)
}

fn load_blocks(path: &Path, group: &PermGroup) -> Result<BlockSystem, Failure> {
    let system: BlockSystem = serde_json::from_str(&read(path)?).map_err(|e| {
        in_file(
            path,
            Error::Parse {
                line: e.line(),
                column: e.column(),
                message: e.to_string(),
            },
        )
    })?;
    if system.degree() != group.degree() {
        return Err(Error::DegreeMismatch {
            expected: group.degree(),
            found: system.degree(),
        }
        .into());
    }
    Ok(system)
}

/// JSON numbers for orders that fit in 64 bits, decimal strings otherwise.
fn order_json(order: u128) -> Value {
    match u64::try_from(order) {
        Ok(v) => json!(v),
        Err(_) => json!(order.to_string()),
    }
}

fn group_report(g: &PermGroup) -> Value {
    let mut v = group_to_json(g);
    v["order"] = order_json(g.order());
    v
}

fn parse_connection(text: &str) -> Result<Vec<(Vec<i64>, u32)>, Failure> {
    let bad =
        |part: &str| Failure::Input(format!("connection entry {part:?} is not residue:colour"));
    let mut classes: Vec<(Vec<i64>, u32)> = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (r, c) = part.split_once(':').ok_or_else(|| bad(part))?;
        let r: i64 = r.trim().parse().map_err(|_| bad(part))?;
        let c: u32 = c.trim().parse().map_err(|_| bad(part))?;
        match classes.iter_mut().find(|(_, colour)| *colour == c) {
            Some((residues, _)) => residues.push(r),
            None => classes.push((vec![r], c)),
        }
    }
    Ok(classes)
}

fn run(command: &Command) -> Result<Outcome, Failure> {
    let limit = max_degree()?;
    let with_config = |mut body: Value, config: Value| {
        let mut config = config;
        config["max_degree"] = json!(limit);
        body["config"] = config;
        body
    };
    let outcome = match command {
        Command::Order { group } => {
            let g = load_group(group, limit)?;
            let body = json!({
                "degree": g.degree(),
                "order": order_json(g.order()),
                "transitive": g.is_transitive(),
            });
            Outcome::ok(with_config(
                body,
                json!({"command": "order", "group": group}),
            ))
        }
        Command::Blocks { group } => {
            let g = load_group(group, limit)?;
            let systems = all_block_systems_limited(&g, BLOCK_SYSTEM_LIMIT)?;
            let listed = systems
                .iter()
                .map(|b| {
                    Ok(json!({
                        "blocks": b.blocks(),
                        "normal": is_normal_block_system(&g, b)?,
                    }))
                })
                .collect::<Result<Vec<_>, Error>>()?;
            let body = json!({"count": listed.len(), "systems": listed});
            Outcome::ok(with_config(
                body,
                json!({"command": "blocks", "group": group}),
            ))
        }
        Command::Fixer { group, blocks } => {
            let g = load_group(group, limit)?;
            let b = load_blocks(blocks, &g)?;
            let data = fixer_data(&g, &b)?;
            let body = serde_json::to_value(FixerReport::from(&data)).expect("reports serialize");
            Outcome::ok(with_config(
                body,
                json!({"command": "fixer", "group": group, "blocks": blocks}),
            ))
        }
        Command::Wstab {
            group,
            blocks,
            block,
        } => {
            let g = load_group(group, limit)?;
            let b = load_blocks(blocks, &g)?;
            let w = wstab(&g, &b, *block)?;
            let k = pstab(&g, &b, *block)?;
            let body = json!({
                "block": b.blocks().get(*block),
                "wstab": group_report(&w),
                "pstab": group_report(&k),
            });
            Outcome::ok(with_config(
                body,
                json!({"command": "wstab", "group": group, "blocks": blocks, "block": block}),
            ))
        }
        Command::Check52 { group, caps } => {
            let g = load_group(group, limit)?;
            let caps = caps.resolve();
            let verdict = is_52_closed(&g, &caps)?;
            let body = serde_json::to_value(&verdict).expect("verdicts serialize");
            Outcome::ok(with_config(
                body,
                json!({"command": "check52", "group": group, "caps": caps}),
            ))
        }
        Command::Closure52 { group, caps } => {
            let g = load_group(group, limit)?;
            let caps = caps.resolve();
            let c = closure_52(&g, &caps)?;
            let body = json!({
                "closure_order": order_json(c.group.order()),
                "adjoined": c.adjoined,
                "sweeps": c.sweeps,
                "exhaustive": c.exhaustive,
                "complete": c.complete,
                "closure": group_to_json(&c.group),
            });
            Outcome {
                body: with_config(
                    body,
                    json!({"command": "closure52", "group": group, "caps": caps}),
                ),
                ok: c.complete,
            }
        }
        Command::Kclosure { group, k } => {
            let g = load_group(group, limit)?;
            let c = k_closure(&g, *k)?;
            Outcome::ok(with_config(
                json!({"closure": group_report(&c)}),
                json!({"command": "kclosure", "group": group, "k": k}),
            ))
        }
        Command::Quotient { group, blocks } => {
            let g = load_group(group, limit)?;
            let b = load_blocks(blocks, &g)?;
            let q = quotient(&g, &b)?;
            Outcome::ok(with_config(
                json!({"quotient": group_report(&q)}),
                json!({"command": "quotient", "group": group, "blocks": blocks}),
            ))
        }
        Command::Wreath { top, bottom } => {
            let t = load_group(top, limit)?;
            let b = load_group(bottom, limit)?;
            check_degree(t.degree().saturating_mul(b.degree()), limit)?;
            let w = wreath(&t, &b)?;
            Outcome::ok(with_config(
                group_report(&w),
                json!({"command": "wreath", "top": top, "bottom": bottom}),
            ))
        }
        Command::Pi { p, key } => {
            let k = validate_key(key)?;
            let degree = u32::try_from(key.len())
                .ok()
                .and_then(|n| p.checked_pow(n))
                .unwrap_or(usize::MAX);
            check_degree(degree, limit)?;
            let g = pi_group(*p, &k)?;
            let mut body = group_report(&g);
            body["key"] = json!(k.to_string());
            Outcome::ok(with_config(
                body,
                json!({"command": "pi", "p": p, "key": key}),
            ))
        }
        Command::Keys { n } => {
            let keys = enumerate_keys(*n)?;
            let body = json!({
                "count": keys.len(),
                "keys": keys.iter().map(ToString::to_string).collect::<Vec<_>>(),
            });
            Outcome::ok(with_config(body, json!({"command": "keys", "n": n})))
        }
        Command::SylowCheck {
            p,
            n,
            exhaustive,
            samples,
            seed,
        } => {
            let degree = u32::try_from(*n)
                .ok()
                .and_then(|n| p.checked_pow(n))
                .unwrap_or(usize::MAX);
            check_degree(degree, limit)?;
            let mode = if *exhaustive {
                SylowMode::Exhaustive
            } else {
                SylowMode::Sampled {
                    samples: samples.unwrap_or(40),
                }
            };
            let mut caps = Caps::default();
            if let Some(s) = seed {
                caps.seed = *s;
            }
            let report = sylow_classification_check(*p, *n, mode, &caps)?;
            let ok = report.exceptions.is_empty();
            let mut body = serde_json::to_value(&report).expect("reports serialize");
            body["passed"] = json!(ok);
            Outcome {
                body: with_config(
                    body,
                    json!({"command": "sylow-check", "p": p, "n": n, "mode": mode, "caps": caps}),
                ),
                ok,
            }
        }
        Command::Aut { tuples } => {
            let system =
                ColoredTupleSystem::from_json(&read(tuples)?).map_err(|e| in_file(tuples, e))?;
            check_degree(system.points(), limit)?;
            let a = aut_group(&system)?;
            let body = json!({"automorphisms": group_report(&a), "transitive": a.is_transitive()});
            Outcome::ok(with_config(
                body,
                json!({"command": "aut", "tuples": tuples}),
            ))
        }
        Command::Circulant { n, conn } => {
            check_degree(*n, limit)?;
            let connection = parse_connection(conn)?;
            let system = circulant(*n, &connection)?;
            let a = aut_group(&system)?;
            let body = json!({
                "system": system,
                "automorphisms": group_report(&a),
                "transitive": a.is_transitive(),
            });
            Outcome::ok(with_config(
                body,
                json!({"command": "circulant", "n": n, "conn": conn}),
            ))
        }
        Command::Verify {
            suite,
            seed,
            max_degree,
            instances,
            timing,
        } => {
            let mut params = SuiteParams {
                seed: seed.unwrap_or(DEFAULT_SEED),
                instances: *instances,
                ..SuiteParams::default()
            };
            if let Some(d) = max_degree {
                params.max_degree = *d;
            }
            check_degree(params.max_degree, limit)?;
            let report = run_suite(suite, &params)?;
            let mut body = serde_json::to_value(&report).expect("reports serialize");
            if !timing {
                body.as_object_mut()
                    .expect("reports are objects")
                    .remove("elapsed_ms");
            }
            Outcome {
                ok: report.passed,
                body: with_config(body, json!({"command": "verify", "params": params})),
            }
        }
        Command::Suites { filter } => {
            let suites = list_suites(filter);
            let body = json!({"count": suites.len(), "suites": suites});
            Outcome::ok(with_config(
                body,
                json!({"command": "suites", "filter": filter}),
            ))
        }
    };
    Ok(outcome)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let render = |v: &Value| {
        if cli.pretty {
            serde_json::to_string_pretty(v)
        } else {
            serde_json::to_string(v)
        }
        .expect("values serialize")
    };
    match run(&cli.command) {
        Ok(outcome) => {
            println!("{}", render(&outcome.body));
            if outcome.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Compute(message)) => {
            eprintln!("{}", render(&json!({"error": message})));
            ExitCode::from(1)
        }
        Err(Failure::Input(message)) => {
            eprintln!("{}", render(&json!({"error": message})));
            ExitCode::from(2)
        }
    }
}
