//! `khv`: Kauffman bracket, Jones polynomial and Khovanov homology of link
//! diagrams given as PD codes, plus mechanical self-verification.
//!
//! Exit codes: 0 success, 1 verification failure (an engine bug was
//! detected), 2 input error.

use clap::{Args, Parser, Subcommand, ValueEnum};
use khovanov::bracket::{bracket_skein_oracle, jones_k, kauffman_bracket};
use khovanov::complex::{check_d_squared, KhovanovComplex};
use khovanov::framed::{framed_homology_table, long_exact_sequence_check, smooth_at, verify_skein_ses, FramedComplex};
use khovanov::homology::homology_table;
use khovanov::moves::{apply_script, parse_move_script, RMove};
use khovanov::polyring::{zc_homology_table, JWindow};
use khovanov::LinkDiagram;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "khv", version, about = "Khovanov homology and Kauffman bracket calculator for PD-coded link diagrams")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct Common {
    /// Input file, one PD line per diagram (`-` or omitted: stdin)
    input: Option<PathBuf>,
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Refuse diagrams with more crossings than this
    #[arg(long, default_value_t = khovanov::DEFAULT_MAX_CROSSINGS)]
    max_crossings: usize,
    /// Permute the crossing order with this seed before computing
    #[arg(long)]
    order_perm: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Kauffman bracket polynomial in A
    Bracket(Common),
    /// Jones polynomial in Khovanov's variable q
    Jones(Common),
    /// Integer Khovanov homology table
    Homology(Common),
    /// Framed homology table in the (I, J) gradings
    Framed(Common),
    /// Verify the skein short exact sequence and long homology sequence at
    /// one crossing
    SkeinCheck {
        #[command(flatten)]
        common: Common,
        /// The crossing to smooth (1-based)
        #[arg(long)]
        crossing: usize,
    },
    /// Windowed homology of the Z[c]-module complex
    Zc {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        j_min: i64,
        #[arg(long, allow_hyphen_values = true)]
        j_max: i64,
    },
    /// Run the structural self-checks (d^2 = 0, Euler identity, bracket
    /// oracle, framed re-indexing, ordering independence, move invariance)
    Verify {
        #[command(flatten)]
        common: Common,
        /// Reidemeister move script, e.g. "r1+ 2; r2 1 4; r3 1 2 3"
        #[arg(long)]
        moves: Option<String>,
        /// Seed for the ordering-independence permutations
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn read_diagrams(common: &Common) -> Result<Vec<LinkDiagram>, String> {
    let text = match &common.input {
        Some(p) if p.as_os_str() != "-" => {
            std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?
        }
        _ => {
            let mut s = String::new();
            std::io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| format!("stdin: {e}"))?;
            s
        }
    };
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let stripped = match line.find('#') {
            Some(p) => &line[..p],
            None => line,
        };
        if stripped.trim().is_empty() {
            continue;
        }
        let mut d = khovanov::parse_pd(stripped).map_err(|e| format!("line {}: {e}", lineno + 1))?;
        if let Some(seed) = common.order_perm {
            d = d.permute_crossings(&seeded_permutation(d.crossing_count(), seed));
        }
        out.push(d);
    }
    if out.is_empty() {
        return Err("no diagrams in input".into());
    }
    Ok(out)
}

fn seeded_permutation(n: usize, seed: u64) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    perm.shuffle(&mut rng);
    perm
}

/// Print per-diagram results: bare in text mode (with separators when there
/// are several diagrams), a single object or an array in JSON mode.
fn emit(format: Format, results: Vec<(String, serde_json::Value)>) {
    match format {
        Format::Text => {
            let many = results.len() > 1;
            for (n, (text, _)) in results.into_iter().enumerate() {
                if many {
                    println!("# diagram {}", n + 1);
                }
                print!("{text}");
                if !text.ends_with('\n') {
                    println!();
                }
            }
        }
        Format::Json => {
            let mut values: Vec<serde_json::Value> = results.into_iter().map(|(_, v)| v).collect();
            let out = if values.len() == 1 {
                values.pop().expect("nonempty")
            } else {
                serde_json::Value::Array(values)
            };
            println!("{out}");
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Bracket(common) => {
            let results = read_diagrams(&common)?
                .iter()
                .map(|d| {
                    let p = kauffman_bracket(d, common.max_crossings).map_err(|e| e.to_string())?;
                    Ok((p.to_string(), json!({"variable": "A", "terms": p.to_json()})))
                })
                .collect::<Result<_, String>>()?;
            emit(common.format, results);
            Ok(ExitCode::SUCCESS)
        }
        Command::Jones(common) => {
            let results = read_diagrams(&common)?
                .iter()
                .map(|d| {
                    let p = jones_k(d, common.max_crossings).map_err(|e| e.to_string())?;
                    Ok((p.to_string(), json!({"variable": "q", "terms": p.to_json()})))
                })
                .collect::<Result<_, String>>()?;
            emit(common.format, results);
            Ok(ExitCode::SUCCESS)
        }
        Command::Homology(common) => {
            let results = read_diagrams(&common)?
                .iter()
                .map(|d| {
                    let t = homology_table(d, common.max_crossings).map_err(|e| e.to_string())?;
                    Ok((t.render_text(), serde_json::to_value(t.to_json()).expect("serializable")))
                })
                .collect::<Result<_, String>>()?;
            emit(common.format, results);
            Ok(ExitCode::SUCCESS)
        }
        Command::Framed(common) => {
            let results = read_diagrams(&common)?
                .iter()
                .map(|d| {
                    let t = framed_homology_table(d, common.max_crossings).map_err(|e| e.to_string())?;
                    Ok((t.render_text(), serde_json::to_value(t.to_json()).expect("serializable")))
                })
                .collect::<Result<_, String>>()?;
            emit(common.format, results);
            Ok(ExitCode::SUCCESS)
        }
        Command::SkeinCheck { common, crossing } => {
            let mut all_pass = true;
            let mut results = Vec::new();
            for d in &read_diagrams(&common)? {
                if crossing == 0 || crossing > d.crossing_count() {
                    return Err(format!(
                        "crossing {} out of range 1..={}",
                        crossing,
                        d.crossing_count()
                    ));
                }
                let t = smooth_at(d, crossing - 1).map_err(|e| e.to_string())?;
                let ses = verify_skein_ses(&t, common.max_crossings).map_err(|e| e.to_string())?;
                let les = long_exact_sequence_check(&t, common.max_crossings)
                    .map_err(|e| e.to_string())?;
                all_pass &= ses.pass && les.pass;
                let mut text = String::new();
                text.push_str(&format!(
                    "ses: {}\n",
                    if ses.pass { "exact at every cell" } else { "FAILED" }
                ));
                for c in &ses.cells {
                    if !c.pass() {
                        text.push_str(&format!("  cell (I={}, J={}): {c:?}\n", c.I, c.J));
                    }
                }
                text.push_str(&format!(
                    "les: {}\n",
                    if les.pass { "exact at every node" } else { "FAILED" }
                ));
                for n in &les.nodes {
                    if !n.exact {
                        text.push_str(&format!(
                            "  node {}(I={}, J={}): dim {} rank_in {} rank_out {}\n",
                            n.complex, n.I, n.J, n.dim, n.rank_in, n.rank_out
                        ));
                    }
                }
                results.push((
                    text,
                    json!({
                        "ses": serde_json::to_value(&ses).expect("serializable"),
                        "les": serde_json::to_value(&les).expect("serializable"),
                    }),
                ));
            }
            emit(common.format, results);
            Ok(if all_pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Zc { common, j_min, j_max } => {
            let window = JWindow::new(j_min, j_max).map_err(|e| e.to_string())?;
            let results = read_diagrams(&common)?
                .iter()
                .map(|d| {
                    let t = zc_homology_table(d, window, common.max_crossings)
                        .map_err(|e| e.to_string())?;
                    Ok((t.render_text(), serde_json::to_value(t.to_json()).expect("serializable")))
                })
                .collect::<Result<_, String>>()?;
            emit(common.format, results);
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { common, moves, seed } => {
            let script = moves
                .as_deref()
                .map(parse_move_script)
                .transpose()
                .map_err(|e| e.to_string())?;
            let mut all_pass = true;
            let mut results = Vec::new();
            for d in &read_diagrams(&common)? {
                let (text, value, pass) =
                    verify_one(d, script.as_deref(), seed, common.max_crossings)?;
                all_pass &= pass;
                results.push((text, value));
            }
            emit(common.format, results);
            Ok(if all_pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
    }
}

fn verify_one(
    d: &LinkDiagram,
    script: Option<&[RMove]>,
    seed: u64,
    max_crossings: usize,
) -> Result<(String, serde_json::Value, bool), String> {
    let mut checks: Vec<(&str, bool)> = Vec::new();

    let cx = KhovanovComplex::new(d, max_crossings).map_err(|e| e.to_string())?;
    checks.push(("d_squared_zero", check_d_squared(&cx).is_zero()));

    let jones = jones_k(d, max_crossings).map_err(|e| e.to_string())?;
    let table = homology_table(d, max_crossings).map_err(|e| e.to_string())?;
    checks.push(("euler_chain_equals_jones", cx.graded_euler_char() == jones));
    checks.push(("euler_homology_equals_jones", table.graded_euler_char() == jones));

    let bracket = kauffman_bracket(d, max_crossings).map_err(|e| e.to_string())?;
    let oracle = bracket_skein_oracle(d, max_crossings).map_err(|e| e.to_string())?;
    checks.push(("bracket_oracle_agrees", bracket == oracle));

    // framed table re-indexes the unframed one
    let framed = FramedComplex::new(d, max_crossings).map_err(|e| e.to_string())?.homology();
    let w = d.writhe();
    let reindexed = table.iter().all(|(&(i, j), g)| framed.get(w - 2 * i, 3 * w - 2 * j) == Some(g))
        && framed.iter().count() == table.iter().count();
    checks.push(("framed_reindexes_unframed", reindexed));

    // ordering independence under three seeded permutations
    if d.crossing_count() > 1 {
        let base = table.to_json_string();
        let ok = (0..3).all(|k| {
            let perm = seeded_permutation(d.crossing_count(), seed.wrapping_add(k));
            let p = d.permute_crossings(&perm);
            homology_table(&p, max_crossings)
                .map(|t| t.to_json_string() == base)
                .unwrap_or(false)
        });
        checks.push(("ordering_independence", ok));
    }

    if let Some(script) = script {
        let moved = apply_script(d, script).map_err(|e| e.to_string())?;
        let moved_table = homology_table(&moved, max_crossings).map_err(|e| e.to_string())?;
        checks.push((
            "move_invariance_unframed",
            moved_table.to_json_string() == table.to_json_string(),
        ));
        let r1_free = script
            .iter()
            .all(|m| !matches!(m, RMove::R1Plus(_) | RMove::R1Minus(_)));
        if r1_free {
            let moved_framed = FramedComplex::new(&moved, max_crossings)
                .map_err(|e| e.to_string())?
                .homology();
            checks.push((
                "move_invariance_framed",
                moved_framed.to_json_string() == framed.to_json_string(),
            ));
        }
    }

    let pass = checks.iter().all(|&(_, ok)| ok);
    let mut text = String::new();
    for &(name, ok) in &checks {
        text.push_str(&format!("{name}: {}\n", if ok { "ok" } else { "FAIL" }));
    }
    let value = json!({
        "checks": checks
            .iter()
            .map(|&(name, ok)| json!({"name": name, "pass": ok}))
            .collect::<Vec<_>>(),
        "pass": pass,
    });
    Ok((text, value, pass))
}
