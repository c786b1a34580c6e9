//! `s4adm`: batch decisions about S4 formulas and inference rules.
//!
//! Results go to stdout, diagnostics to stderr. Exit codes: 0 for any
//! verdict (including negative ones), 2 for malformed input, 3 when a
//! resource cap cut a search short. With `--json` every result is a
//! single line of JSON; identical inputs produce byte-identical output.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

use s4adm_core::sdecomp;
use s4adm_core::{
    catalog, check_derivation, countermodel, find_supp2_witness, in_supp1, in_supp2,
    invalidity_witness, is_admissible, joint_inadmissible, to_rnf, Conclusion, Derivation, Error,
    Formula, KripkeModel, Limits, RnfRule, SuppConstraint,
};

#[derive(Parser)]
#[command(name = "s4adm", version, about = "Validity and admissibility of inference rules in S4")]
struct Cli {
    /// Emit machine-readable JSON instead of prose.
    #[arg(long, global = true)]
    json: bool,

    /// Tableau budget for the theorem prover.
    #[arg(long, global = true, value_name = "N")]
    node_cap: Option<u64>,

    /// Action budget for decompose.
    #[arg(long, global = true, value_name = "N")]
    step_cap: Option<u64>,

    /// Candidate budget for support-set searches.
    #[arg(long, global = true, value_name = "N")]
    subset_cap: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether a formula is a theorem of S4.
    Prove {
        /// Formula text, e.g. "<>(p1 -> []p1)".
        formula: String,
    },
    /// Check a derivation tree (JSON file) against the G1s schemas.
    CheckProof {
        file: PathBuf,
    },
    /// Bring a rule "f1, f2, ... / g" into reduced normal form.
    ToRnf {
        rule: String,
    },
    /// Decide whether a rule preserves global truth in every
    /// reflexive-transitive model.
    Valid {
        rule: String,
    },
    /// Decide whether every substitution proving the premises of a rule
    /// also proves its conclusion.
    Admissible {
        rule: String,
    },
    /// Decide whether one substitution rejects all given rules at once
    /// (one rule text per file).
    Joint {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Membership of a disjunct id set in the first support family.
    Supp1 {
        n: u32,
        /// JSON array of ids, e.g. "[2,3]".
        ids: String,
    },
    /// Membership of a disjunct id set in the second support family.
    Supp2 {
        n: u32,
        ids: String,
    },
    /// Smallest second-family set satisfying interval constraints
    /// (JSON file {"n": .., "constraints": [{"upper": [..], "lower": [..]}, ..]}).
    Witness {
        file: PathBuf,
    },
    /// Decompose a rule system (JSON file [{"W": [..], "J": [..]}, ..])
    /// into empty and canonical leaves.
    Decompose {
        file: PathBuf,
        /// Variable count; default is the smallest fitting the ids.
        #[arg(long)]
        n: Option<u32>,
    },
    /// Classify the built-in catalog of one-variable formulas.
    Catalog,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = match e.downcast_ref::<Error>() {
                Some(Error::ResourceLimit(_)) => 3,
                _ => 2,
            };
            ExitCode::from(code)
        }
    }
}

fn limits_from(cli: &Cli) -> Limits {
    let mut limits = Limits::default();
    if let Some(v) = cli.node_cap {
        limits.node_cap = v;
    }
    if let Some(v) = cli.step_cap {
        limits.step_cap = v;
    }
    if let Some(v) = cli.subset_cap {
        limits.subset_cap = v;
    }
    limits
}

fn run(cli: &Cli) -> anyhow::Result<()> {
    let limits = limits_from(cli);
    match &cli.command {
        Command::Prove { formula } => cmd_prove(cli, &limits, formula),
        Command::CheckProof { file } => cmd_check_proof(cli, file),
        Command::ToRnf { rule } => {
            let rnf = rule_to_rnf(rule, &limits)?;
            emit(cli, &rnf, describe_rnf(&rnf))
        }
        Command::Valid { rule } => cmd_valid(cli, &limits, rule),
        Command::Admissible { rule } => cmd_admissible(cli, &limits, rule),
        Command::Joint { files } => cmd_joint(cli, &limits, files),
        Command::Supp1 { n, ids } => cmd_supp(cli, *n, ids, in_supp1),
        Command::Supp2 { n, ids } => cmd_supp(cli, *n, ids, in_supp2),
        Command::Witness { file } => cmd_witness(cli, &limits, file),
        Command::Decompose { file, n } => cmd_decompose(cli, &limits, file, *n),
        Command::Catalog => cmd_catalog(cli, &limits),
    }
}

#[derive(Serialize)]
struct ProveOut {
    theorem: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    countermodel: Option<KripkeModel>,
}

fn cmd_prove(cli: &Cli, limits: &Limits, formula: &str) -> anyhow::Result<()> {
    let f: Formula = formula.parse()?;
    let model = countermodel(&f, limits)?;
    let human = match &model {
        None => "theorem".to_string(),
        Some(m) => format!("not a theorem\n{}", describe_model(m)),
    };
    emit(
        cli,
        &ProveOut {
            theorem: model.is_none(),
            countermodel: model,
        },
        human,
    )
}

#[derive(Serialize)]
struct CheckProofOut {
    accepted: bool,
    failure: Option<String>,
}

fn cmd_check_proof(cli: &Cli, file: &Path) -> anyhow::Result<()> {
    let text = fs::read_to_string(file)
        .with_context(|| format!("reading {}", file.display()))?;
    let tree: Derivation = serde_json::from_str(&text)
        .map_err(|e| Error::invalid(format!("{}: {e}", file.display())))?;
    let result = check_derivation(&tree);
    let human = match &result {
        Ok(()) => "accepted".to_string(),
        Err(f) => format!("rejected: {f}"),
    };
    emit(
        cli,
        &CheckProofOut {
            accepted: result.is_ok(),
            failure: result.err().map(|f| f.to_string()),
        },
        human,
    )
}

#[derive(Serialize)]
struct ValidOut {
    valid: bool,
    witness: Option<BTreeSet<u32>>,
}

fn cmd_valid(cli: &Cli, limits: &Limits, rule: &str) -> anyhow::Result<()> {
    let rnf = rule_to_rnf(rule, limits)?;
    let witness = invalidity_witness(&rnf, limits)?;
    let human = match &witness {
        None => "valid".to_string(),
        Some(w) => format!("invalid; rejecting support {}", fmt_ids(w)),
    };
    emit(
        cli,
        &ValidOut {
            valid: witness.is_none(),
            witness,
        },
        human,
    )
}

#[derive(Serialize)]
struct AdmissibleOut {
    admissible: bool,
    witness: Option<BTreeSet<u32>>,
    rnf: RnfRule,
}

fn cmd_admissible(cli: &Cli, limits: &Limits, rule: &str) -> anyhow::Result<()> {
    let rnf = rule_to_rnf(rule, limits)?;
    let (admissible, witness) = is_admissible(&rnf, limits)?;
    let human = match &witness {
        None => format!("admissible\n{}", describe_rnf(&rnf)),
        Some(w) => format!(
            "inadmissible; rejecting support {}\n{}",
            fmt_ids(w),
            describe_rnf(&rnf)
        ),
    };
    emit(
        cli,
        &AdmissibleOut {
            admissible,
            witness,
            rnf,
        },
        human,
    )
}

#[derive(Serialize)]
struct JointOut {
    jointly_inadmissible: bool,
    witness: Option<BTreeSet<u32>>,
}

fn cmd_joint(cli: &Cli, limits: &Limits, files: &[PathBuf]) -> anyhow::Result<()> {
    let mut rules = Vec::new();
    for file in files {
        let text = fs::read_to_string(file)
            .with_context(|| format!("reading {}", file.display()))?;
        rules.push(rule_to_rnf(text.trim(), limits)?);
    }
    let (jointly, witness) = joint_inadmissible(&rules, limits)?;
    let human = match &witness {
        Some(w) => format!("jointly inadmissible; rejecting support {}", fmt_ids(w)),
        None => "not jointly inadmissible".to_string(),
    };
    emit(
        cli,
        &JointOut {
            jointly_inadmissible: jointly,
            witness,
        },
        human,
    )
}

#[derive(Serialize)]
struct MemberOut {
    member: bool,
}

fn cmd_supp(
    cli: &Cli,
    n: u32,
    ids: &str,
    check: fn(u32, &BTreeSet<u32>) -> Result<bool, Error>,
) -> anyhow::Result<()> {
    let set: BTreeSet<u32> = serde_json::from_str(ids)
        .map_err(|e| Error::invalid(format!("id list {ids:?}: {e}")))?;
    let member = check(n, &set)?;
    let human = if member { "member" } else { "not a member" };
    emit(cli, &MemberOut { member }, human.to_string())
}

#[derive(Deserialize)]
struct WitnessFile {
    n: u32,
    constraints: Vec<SuppConstraint>,
}

#[derive(Serialize)]
struct WitnessOut {
    witness: Option<BTreeSet<u32>>,
}

fn cmd_witness(cli: &Cli, limits: &Limits, file: &Path) -> anyhow::Result<()> {
    let text = fs::read_to_string(file)
        .with_context(|| format!("reading {}", file.display()))?;
    let input: WitnessFile = serde_json::from_str(&text)
        .map_err(|e| Error::invalid(format!("{}: {e}", file.display())))?;
    let witness = find_supp2_witness(input.n, &input.constraints, limits)?;
    let human = match &witness {
        Some(w) => format!("witness {}", fmt_ids(w)),
        None => "no witness".to_string(),
    };
    emit(cli, &WitnessOut { witness }, human)
}

fn cmd_decompose(
    cli: &Cli,
    limits: &Limits,
    file: &Path,
    n: Option<u32>,
) -> anyhow::Result<()> {
    let text = fs::read_to_string(file)
        .with_context(|| format!("reading {}", file.display()))?;
    let entries: Vec<sdecomp::Entry> = serde_json::from_str(&text)
        .map_err(|e| Error::invalid(format!("{}: {e}", file.display())))?;
    let n = n.unwrap_or_else(|| minimal_n(&entries));
    let system = sdecomp::RuleSystem::new(n, entries)?;
    let result = sdecomp::decompose(&system, limits)?;

    let mut human = format!(
        "{} leaves ({})\n",
        result.leaves.len(),
        if result.complete { "complete" } else { "step cap hit" }
    );
    for (i, leaf) in result.leaves.iter().enumerate() {
        let kind = match leaf.kind {
            sdecomp::LeafKind::Empty => "empty",
            sdecomp::LeafKind::Canonical => "canonical",
            sdecomp::LeafKind::Pending => "pending",
        };
        let trace = if leaf.trace.is_empty() {
            "(no steps)".to_string()
        } else {
            leaf.trace.join(" ")
        };
        let _ = write!(human, "{:>3} [{kind}] {trace}: ", i + 1);
        let entries: Vec<String> = leaf
            .system
            .entries
            .iter()
            .map(|e| format!("{}/{}", fmt_ids(&e.w), fmt_ids(&e.j)))
            .collect();
        let _ = writeln!(human, "{}", entries.join("  "));
    }
    human.pop();
    emit(cli, &result, human)
}

fn cmd_catalog(cli: &Cli, limits: &Limits) -> anyhow::Result<()> {
    let statuses = catalog::classify(limits)?;
    let mut human = String::new();
    for s in &statuses {
        let mark = if s.star_star {
            "(**)"
        } else if s.star {
            "(*) "
        } else {
            "    "
        };
        let theorem = if s.theorem { " theorem" } else { "" };
        let _ = writeln!(human, "{:>2} {mark} {}{theorem}", s.index, s.formula);
    }
    human.pop();
    emit(cli, &statuses, human)
}

/// Parse rule text and normalize it.
fn rule_to_rnf(rule: &str, limits: &Limits) -> Result<RnfRule, Error> {
    let (premises, conclusion) = s4adm_core::rnf::parse_rule(rule)?;
    to_rnf(&premises, &conclusion, limits)
}

fn emit(cli: &Cli, json: &impl Serialize, human: String) -> anyhow::Result<()> {
    if cli.json {
        println!("{}", serde_json::to_string(json)?);
    } else {
        println!("{human}");
    }
    Ok(())
}

fn fmt_ids(ids: &BTreeSet<u32>) -> String {
    let inner: Vec<String> = ids.iter().map(|i| i.to_string()).collect();
    format!("{{{}}}", inner.join(","))
}

fn describe_rnf(rnf: &RnfRule) -> String {
    let conclusion = match &rnf.conclusion {
        Conclusion::Var(k) => format!("p{k}"),
        Conclusion::Set(j) => fmt_ids(j),
    };
    format!(
        "normal form: n={} premise {} conclusion {}",
        rnf.n,
        fmt_ids(&rnf.premise),
        conclusion
    )
}

fn describe_model(m: &KripkeModel) -> String {
    let mut out = String::new();
    let worlds: Vec<String> = m.worlds.iter().map(|w| w.to_string()).collect();
    let _ = writeln!(out, "countermodel worlds: {}", worlds.join(" "));
    let edges: Vec<String> = m
        .edges
        .iter()
        .map(|(a, b)| format!("{a}->{b}"))
        .collect();
    let _ = writeln!(out, "edges: {}", edges.join(" "));
    for (var, at) in &m.valuation {
        let at: Vec<String> = at.iter().map(|w| w.to_string()).collect();
        let _ = writeln!(out, "p{var} true at: {}", at.join(" "));
    }
    out.pop();
    out
}

fn minimal_n(entries: &[sdecomp::Entry]) -> u32 {
    let max_id = entries
        .iter()
        .flat_map(|e| e.w.iter().chain(e.j.iter()))
        .max()
        .copied()
        .unwrap_or(0);
    let mut n = 1;
    while u64::from(max_id) >= 1u64 << (2 * n) {
        n += 1;
    }
    n
}
