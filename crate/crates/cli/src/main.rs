use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde_json::{json, Value};

use netci::exactprob::{DistFile, JointDistribution};
use netci::finalg::{lrr_rank_check, CayleyFile, CayleyGroup, Field};
use netci::labeling::{check_fnf, recover_labeling, GroupLabeling, LabelError};
use netci::netmodel::{
    brute_force_solve, verify_linear, verify_linear_distribution, LinearCode, LinearCodeFile, Network, SolveOptions,
    SolveOutcome, DEFAULT_BUDGET,
};
use netci::predicates::{
    comp_check, conv13_check, conv32_check, end_check_witness_ij, eq_check, fnf_full, fnf_reduced, tri, ueq_semantic,
    PredicateReport,
};
use netci::reduction::{
    build_witness, build_witness_forced, ci_to_entropic, compile_ci, compile_network, normalize, verify_witness,
    ParsedWordProblem, ReductionError, WitnessSpec, WordProblemFile, WordProblemInstance, DISTRIBUTION_ATOM_CAP,
};

mod errors;

use errors::{CliError, Status};

#[derive(Parser)]
#[command(name = "netci", version, about = "Exact CI predicates, network codes and word-problem compilers")]
struct Cli {
    /// Print the report as JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Write the produced artifact (code, network, instance) here instead
    /// of stdout.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the Fano-non-Fano condition on A1..A123.
    CheckFnf { dist: PathBuf },
    /// Recover the abelian group labeling of an fnf distribution.
    RecoverLabeling { dist: PathBuf },
    /// Evaluate one predicate. Each SET is a comma-separated list of
    /// variable names; `-` is the empty set.
    CheckPredicate {
        dist: PathBuf,
        #[arg(value_enum)]
        predicate: Pred,
        sets: Vec<String>,
        /// Index pair for `end`.
        #[arg(long, default_value = "1,2")]
        ij: String,
    },
    /// Exhaustive search for a scalar code.
    Solve {
        net: PathBuf,
        #[arg(long)]
        q: u64,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u128,
        #[arg(long)]
        no_precheck: bool,
    },
    /// Check a linear code with the rank and distribution backends.
    VerifyLinear {
        net: PathBuf,
        code: PathBuf,
        /// Expected field of the code, `gf(p)` or `gf(p^2)`.
        #[arg(long)]
        field: Option<String>,
        #[command(flatten)]
        cap: Cap,
    },
    /// Reduce a word problem to relation triples with goal `x1 = e`.
    Normalize { words: PathBuf },
    /// Compile a word problem into a CI implication instance.
    CompileCi { words: PathBuf },
    /// Compile a word problem into a network.
    CompileNetwork {
        words: PathBuf,
        /// Emit Graphviz DOT instead of JSON.
        #[arg(long)]
        dot: bool,
    },
    /// Build and verify the linear code for a group assignment.
    Witness {
        words: PathBuf,
        #[arg(long)]
        group: PathBuf,
        /// Comma-separated element indices `x1,x2,…`.
        #[arg(long)]
        assign: String,
        #[arg(long, default_value_t = 2)]
        p: u32,
        #[command(flatten)]
        cap: Cap,
    },
    /// Verify a linear code on the network compiled from a word problem.
    VerifyWitness {
        words: PathBuf,
        code: PathBuf,
        #[command(flatten)]
        cap: Cap,
    },
    /// Entropic-vector form of the compiled CI instance.
    EntropicExport { words: PathBuf },
    /// Rank of λ(b) − I for every non-identity b.
    LrrRank {
        #[arg(long)]
        group: PathBuf,
        #[arg(long, default_value = "gf(2)")]
        field: String,
    },
}

#[derive(Args)]
struct Cap {
    /// Largest joint distribution to materialize.
    #[arg(long, default_value_t = DISTRIBUTION_ATOM_CAP)]
    atom_cap: u128,
}

#[derive(Clone, Copy, ValueEnum)]
enum Pred {
    Tri,
    Fnf,
    FnfReduced,
    Fd,
    Ci,
    Eq,
    Ueq,
    End,
    Conv13,
    Conv32,
    Comp,
}

/// Result of a subcommand: a status, the report, and an optional artifact.
struct Outcome {
    status: Status,
    human: String,
    report: Value,
    artifact: Option<String>,
}

impl Outcome {
    fn report(status: Status, human: impl Into<String>, report: Value) -> Outcome {
        Outcome { status, human: human.into(), report, artifact: None }
    }

    fn from_predicate(r: &PredicateReport) -> Outcome {
        Outcome::report(Status::from_bool(r.holds), r.render(), r.to_json())
    }

    fn with_artifact(mut self, a: String) -> Outcome {
        self.artifact = Some(a);
        self
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::malformed(format!("{}: {e}", path.display())))
}

fn load<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = read(path)?;
    serde_json::from_str(&text).map_err(|e| CliError::malformed(format!("{}: {e}", path.display())))
}

fn load_dist(path: &Path) -> Result<JointDistribution, CliError> {
    let f: DistFile = load(path)?;
    f.to_distribution().map_err(|e| CliError::malformed(format!("{}: {e}", path.display())))
}

fn load_network(path: &Path) -> Result<Network, CliError> {
    let net: Network = load(path)?;
    let problems = net.validate();
    if !problems.is_empty() {
        return Err(CliError::malformed(format!("{}: {}", path.display(), problems.join("; "))));
    }
    Ok(net)
}

fn load_group(path: &Path) -> Result<CayleyGroup, CliError> {
    let f: CayleyFile = load(path)?;
    CayleyGroup::from_file(&f).map_err(|e| CliError::malformed(format!("{}: {e}", path.display())))
}

fn load_code(path: &Path) -> Result<LinearCode, CliError> {
    let f: LinearCodeFile = load(path)?;
    LinearCode::from_file(&f).map_err(|e| CliError::malformed(format!("{}: {e}", path.display())))
}

/// Loads a word problem, normalizing the general form.
fn load_words(path: &Path) -> Result<WordProblemInstance, CliError> {
    let text = read(path)?;
    let malformed = |e: ReductionError| CliError::malformed(format!("{}: {e}", path.display()));
    match WordProblemFile::parse(&text).map_err(malformed)? {
        ParsedWordProblem::Instance(wp) => Ok(wp),
        ParsedWordProblem::General(gp) => normalize(&gp).map_err(malformed),
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

fn sets(raw: &[String]) -> Vec<Vec<&str>> {
    raw.iter()
        .map(|s| if s == "-" { Vec::new() } else { s.split(',').map(str::trim).filter(|x| !x.is_empty()).collect() })
        .collect()
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>, CliError> {
    s.split(',')
        .map(|x| x.trim().parse().map_err(|_| CliError::malformed(format!("{what}: cannot parse `{x}`"))))
        .collect()
}

fn labeling_of(d: &JointDistribution) -> Result<Result<GroupLabeling, LabelError>, CliError> {
    match recover_labeling(d) {
        Err(e @ (LabelError::NotFnf(_) | LabelError::Identity(_) | LabelError::FormsDisagree { .. })) => Ok(Err(e)),
        r => Ok(Ok(r?)),
    }
}

fn check_predicate(dist: &Path, pred: Pred, raw: &[String], ij: &str) -> Result<Outcome, CliError> {
    let d = load_dist(dist)?;
    let s = sets(raw);
    let arity = match pred {
        Pred::Fnf | Pred::FnfReduced => 0,
        Pred::Fd | Pred::Eq | Pred::Ueq => 2,
        Pred::Tri | Pred::Ci | Pred::End | Pred::Conv13 | Pred::Conv32 => 3,
        Pred::Comp => 7,
    };
    if s.len() != arity {
        return Err(CliError::malformed(format!("predicate takes {arity} variable sets, got {}", s.len())));
    }
    let bool_report = |name: &str, holds: bool, clause: String| {
        let r = if holds { PredicateReport::pass(name) } else { PredicateReport::fail(name, clause) };
        Outcome::from_predicate(&r)
    };
    let show = |x: &[&str]| x.join(" ");
    let needs_labeling = matches!(pred, Pred::Conv13 | Pred::Conv32 | Pred::Comp);
    let lab = if needs_labeling {
        match labeling_of(&d)? {
            Ok(l) => Some(l),
            Err(e) => return Ok(Outcome::from_predicate(&PredicateReport::fail("labeling", e.to_string()))),
        }
    } else {
        None
    };
    Ok(match pred {
        Pred::Tri => Outcome::from_predicate(&tri(&d, &s[0], &s[1], &s[2])?),
        Pred::Fnf => Outcome::from_predicate(&fnf_full(&d)?),
        Pred::FnfReduced => Outcome::from_predicate(&fnf_reduced(&d)?),
        Pred::Fd => bool_report("fd", d.is_function_of(&s[0], &s[1])?, format!("({}) ι≤ ({})", show(&s[0]), show(&s[1]))),
        Pred::Ci => bool_report(
            "ci",
            d.is_ci(&s[0], &s[1], &s[2])?,
            format!("({}) ⊥ ({}) | ({})", show(&s[0]), show(&s[1]), show(&s[2])),
        ),
        Pred::Eq => bool_report("eq", eq_check(&d, &s[0], &s[1])?, format!("({}) ι≤ ({})", show(&s[0]), show(&s[1]))),
        Pred::Ueq => bool_report(
            "ueq",
            ueq_semantic(&d, &s[0], &s[1])?,
            format!("({}) and ({}) are not equal up to a bijection with equal uniform laws", show(&s[0]), show(&s[1])),
        ),
        Pred::End => {
            let v: Vec<u8> = parse_list(ij, "--ij")?;
            let [i, j] = v[..] else {
                return Err(CliError::malformed("--ij takes two indices"));
            };
            Outcome::from_predicate(&end_check_witness_ij(&d, (i, j), &s[0], &s[1], &s[2])?)
        }
        Pred::Conv13 => Outcome::from_predicate(&conv13_check(&d, lab.as_ref().unwrap(), &s[0], &s[1], &s[2])?),
        Pred::Conv32 => Outcome::from_predicate(&conv32_check(&d, lab.as_ref().unwrap(), &s[0], &s[1], &s[2])?),
        Pred::Comp => Outcome::from_predicate(&comp_check(
            &d,
            lab.as_ref().unwrap(),
            &s[0],
            &s[1],
            &s[2],
            &s[3],
            &s[4],
            &s[5],
            &s[6],
        )?),
    })
}

fn linear_outcome(net: &Network, code: &LinearCode, atom_cap: u128) -> Result<Outcome, CliError> {
    let (rank, diag) = verify_linear(net, code)?;
    let dist = match verify_linear_distribution(net, code, atom_cap) {
        Ok(r) => Some(r),
        Err(e) if errors::is_cap(&e) => None,
        Err(e) => return Err(e.into()),
    };
    let agree = dist.as_ref().is_none_or(|d| d.holds == rank.holds);
    let mut human = format!("rank backend: {}", rank.render());
    match &dist {
        Some(d) => human.push_str(&format!("\ndistribution backend: {}", d.render())),
        None => human.push_str("\ndistribution backend: skipped (atom cap)"),
    }
    if !agree {
        human.push_str("\nbackends disagree");
    }
    let report = json!({
        "rank": rank.to_json(),
        "diagnosis": diag,
        "distribution": dist.as_ref().map(PredicateReport::to_json),
        "agree": agree,
    });
    let status = match (rank.holds, &dist) {
        _ if !agree => Status::Malformed,
        (true, Some(_)) => Status::Pass,
        // A passing rank check without the distribution backend is still
        // a proof for linear codes.
        (true, None) => Status::Pass,
        (false, _) => Status::Fail,
    };
    Ok(Outcome::report(status, human, report))
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::CheckFnf { dist } => {
            let d = load_dist(dist)?;
            let r = check_fnf(&d)?;
            let rep = match &r.failing_clause {
                None => PredicateReport::pass("fnf"),
                Some(c) => PredicateReport::fail("fnf", c.clone()),
            };
            Ok(Outcome::from_predicate(&rep))
        }
        Command::RecoverLabeling { dist } => {
            let d = load_dist(dist)?;
            match labeling_of(&d)? {
                Ok(l) => {
                    let f = l.to_file();
                    let human = format!("recovered a labeling by an abelian group of order {}", f.order);
                    Ok(Outcome::report(Status::Pass, human, json!({ "order": f.order })).with_artifact(to_json(&f)))
                }
                Err(e) => Ok(Outcome::report(Status::Fail, e.to_string(), json!({ "error": e.to_string() }))),
            }
        }
        Command::CheckPredicate { dist, predicate, sets, ij } => check_predicate(dist, *predicate, sets, ij),
        Command::Solve { net, q, budget, no_precheck } => {
            let n = load_network(net)?;
            let opts = SolveOptions { budget: *budget, precheck: !no_precheck };
            let out = brute_force_solve(&n, *q, opts)?;
            let report = serde_json::to_value(&out).expect("serializable");
            Ok(match out {
                SolveOutcome::Solvable { code } => {
                    Outcome::report(Status::Pass, format!("solvable at q = {q}"), json!({ "result": "solvable", "q": q }))
                        .with_artifact(to_json(&code))
                }
                SolveOutcome::UnsolvableAtQ { reason, .. } => {
                    let why = reason.map_or("exhaustive search found no code".to_string(), |r| r);
                    Outcome::report(Status::Fail, format!("unsolvable at q = {q}: {why}"), report)
                }
                SolveOutcome::BudgetExceeded { estimate, budget } => Outcome::report(
                    Status::Refused,
                    format!(
                        "refused: estimated cost {} exceeds the budget {budget}; nothing is known at q = {q}",
                        estimate.map_or("unknown".into(), |e| e.to_string())
                    ),
                    report,
                ),
            })
        }
        Command::VerifyLinear { net, code, field, cap } => {
            let n = load_network(net)?;
            let c = load_code(code)?;
            if let Some(f) = field {
                let want: Field = f.parse().map_err(|e: netci::finalg::AlgError| CliError::malformed(e.to_string()))?;
                if want != c.field {
                    return Err(CliError::malformed(format!("code is over {}, expected {want}", c.field)));
                }
            }
            linear_outcome(&n, &c, cap.atom_cap)
        }
        Command::Normalize { words } => {
            let wp = load_words(words)?;
            let human = format!("{} variables, {} relations, goal x1 = e", wp.k, wp.relations.len());
            Ok(Outcome::report(Status::Pass, human, json!({ "k": wp.k, "relations": wp.relations.len() }))
                .with_artifact(to_json(&wp)))
        }
        Command::CompileCi { words } => {
            let wp = load_words(words)?;
            let ci = compile_ci(&wp)?;
            let human = format!(
                "{} variables, {} antecedents (after adding the identity: k = {}, l = {})",
                ci.variables.len(),
                ci.antecedents.len(),
                ci.k,
                ci.l
            );
            let rep = json!({ "variables": ci.variables.len(), "antecedents": ci.antecedents.len(), "k": ci.k, "l": ci.l });
            Ok(Outcome::report(Status::Pass, human, rep).with_artifact(to_json(&ci)))
        }
        Command::CompileNetwork { words, dot } => {
            let wp = load_words(words)?;
            let cn = compile_network(&wp)?;
            let human = format!(
                "{} nodes, {} edges; final demand at `{}`",
                cn.network.nodes.len(),
                cn.network.edges.len(),
                cn.final_node
            );
            let rep = json!({
                "nodes": cn.network.nodes.len(),
                "edges": cn.network.edges.len(),
                "census": cn.census,
                "final_node": cn.final_node,
            });
            let art = if *dot { cn.network.to_dot() } else { cn.network.to_json() + "\n" };
            Ok(Outcome::report(Status::Pass, human, rep).with_artifact(art))
        }
        Command::Witness { words, group, assign, p, cap } => {
            let wp = load_words(words)?;
            let g = load_group(group)?;
            let assignment: Vec<u32> = parse_list(assign, "--assign")?;
            let spec = WitnessSpec { group: g, assignment, p: *p };
            let cn = compile_network(&wp)?;
            let identity_goal = spec.assignment.first() == Some(&spec.group.identity());
            let w = if identity_goal { build_witness_forced(&wp, &cn, &spec)? } else { build_witness(&wp, &cn, &spec)? };
            let r = verify_witness(&wp, &cn, &w.code, cap.atom_cap)?;
            let mut human = witness_text(&r);
            if identity_goal {
                human = format!(
                    "x1 is the identity, so U1 and E carry the same signal and {{U1, E, T}} take at most q^3 \
                     different values while {{A1, A2}} takes q^4: the final demand cannot be met\n{human}"
                );
            }
            let out = Outcome::report(Status::from_bool(r.holds()), human, r.to_json());
            Ok(if identity_goal { out } else { out.with_artifact(to_json(&w.code.to_file())) })
        }
        Command::VerifyWitness { words, code, cap } => {
            let wp = load_words(words)?;
            let c = load_code(code)?;
            let cn = compile_network(&wp)?;
            let r = verify_witness(&wp, &cn, &c, cap.atom_cap)?;
            Ok(Outcome::report(Status::from_bool(r.holds()), witness_text(&r), r.to_json()))
        }
        Command::EntropicExport { words } => {
            let wp = load_words(words)?;
            let ci = compile_ci(&wp)?;
            let ex = ci_to_entropic(&ci);
            let human = format!("{} coordinates; {} terms in a, {} in b", ex.k, ex.a.len(), ex.b.len());
            Ok(Outcome::report(Status::Pass, human, json!({ "k": ex.k, "a_terms": ex.a.len(), "b_terms": ex.b.len() }))
                .with_artifact(to_json(&ex)))
        }
        Command::LrrRank { group, field } => {
            let g = load_group(group)?;
            let f: Field = field.parse().map_err(|e: netci::finalg::AlgError| CliError::malformed(e.to_string()))?;
            let r = lrr_rank_check(&g, &f);
            let mut human = format!("|B| = {} over {}", r.group_order, r.field);
            for e in &r.entries {
                human.push_str(&format!(
                    "\n  b = {} (order {}): rank {} expected {}{}",
                    e.element,
                    e.element_order,
                    e.rank,
                    e.expected,
                    if e.ok { "" } else { "  MISMATCH" }
                ));
            }
            Ok(Outcome::report(Status::from_bool(r.all_ok), human, serde_json::to_value(&r).expect("serializable")))
        }
    }
}

fn witness_text(r: &netci::reduction::WitnessReport) -> String {
    let mut s = format!("coding constraints (rank): {}", r.coding.render());
    match &r.distribution {
        Some(d) => s.push_str(&format!("\ncoding constraints (distribution): {}", d.render())),
        None => s.push_str(&format!("\ndistribution backend skipped: {} atoms exceed the cap", r.atoms)),
    }
    if let Some(sem) = &r.semantic {
        s.push_str(&format!("\n{}", sem.render()));
    }
    s
}

fn emit(cli: &Cli, out: &Outcome) -> Result<(), CliError> {
    let report = if cli.json {
        to_json(&json!({ "status": out.status.name(), "report": out.report }))
    } else {
        format!("{}\n", out.human)
    };
    match (&out.artifact, &cli.output) {
        (Some(a), Some(path)) => {
            fs::write(path, a).map_err(|e| CliError::malformed(format!("{}: {e}", path.display())))?;
            print!("{report}");
        }
        (Some(a), None) => {
            print!("{a}");
            eprint!("{report}");
        }
        (None, _) => print!("{report}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|out| emit(&cli, &out).map(|_| out.status));
    match result {
        Ok(status) => status.code(),
        Err(e) => {
            if cli.json {
                println!("{}", json!({ "status": e.status.name(), "error": e.message }));
            }
            eprintln!("error: {}", e.message);
            e.status.code()
        }
    }
}
