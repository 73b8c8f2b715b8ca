use std::fs;
use std::io::{self, Read};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use reoptlab::artifacts::{generate, ArtifactKind, GenerateConfig};
use reoptlab::dot::gadget_to_dot;
use reoptlab::experiment::{run_experiment, ExperimentConfig, Scenario};
use reoptlab::sweep::{run_suite, Suite, SweepOptions};
use reoptlab::{HarnessError, EXIT_COUNTEREXAMPLE, EXIT_OK, EXIT_USAGE};
use reoptlab_core::cnf::{apply_changes, ChangeSet, Clause, CnfFormula, Literal};
use reoptlab_core::dimacs::{parse_changes, parse_dimacs, write_changes, write_dimacs};
use reoptlab_core::gadget::{
    apply_unit_edit, build_full_gadget, build_gadget, parse_gadget_json, write_gadget_json, Gadget,
    UnitEdit,
};
use reoptlab_core::graph::{decide_cover, parse_edge_list, CoverBudget, CoverOracle};
use reoptlab_core::plan_reductions::{goal_compilation, sat_to_replanning};
use reoptlab_core::sat_reductions::{make_nsat_instance, reduce_fixed_model, reduce_unique_model};
use reoptlab_core::solve::{solve_dpll, BruteForce};
use reoptlab_core::strips::{parse_instance_json, plan_exists, write_instance_json};

#[derive(Parser, Debug)]
#[command(name = "reoptlab", version, about = "Reductions, solvers and hint experiments for modified instances")]
struct Cli {
    /// Seed for every random choice of this invocation.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Largest alphabet the brute-force SAT oracle accepts.
    #[arg(long, global = true, default_value_t = 20)]
    oracle_limit: usize,
    /// Output file, or directory for commands writing several files.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write seeded random instances.
    Generate(GenerateArgs),
    /// Apply a reduction to an input file.
    Reduce {
        #[arg(value_enum)]
        reduction: Reduction,
        input: PathBuf,
    },
    /// Solve a CNF, graph, gadget or planning instance.
    Solve(SolveArgs),
    /// Apply changes to a formula or unit edits to a gadget.
    Mutate(MutateArgs),
    /// Run oracle-equivalence sweeps.
    Verify(VerifyArgs),
    /// Compare cold and hinted solving over seeded trials.
    Experiment(ExperimentArgs),
    /// Render a gadget (or the gadget of a CNF file) as Graphviz DOT.
    ExportDot { input: PathBuf },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Kind {
    Cnf,
    Graph,
    Gadget,
    Strips,
    Table,
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[arg(long, value_enum, default_value_t = Kind::Cnf)]
    kind: Kind,
    #[arg(long, default_value_t = 1)]
    count: usize,
    #[arg(long, default_value_t = 3)]
    vars: u32,
    #[arg(long, default_value_t = 4)]
    clauses: usize,
    #[arg(long, default_value_t = 3)]
    clause_size: usize,
    #[arg(long, default_value_t = 8)]
    nodes: usize,
    #[arg(long, default_value_t = 0.3)]
    density: f64,
    #[arg(long, default_value_t = 5)]
    conditions: usize,
    #[arg(long, default_value_t = 5)]
    operators: usize,
    #[arg(long, default_value_t = 3)]
    candidates: usize,
    #[arg(long, default_value_t = 2)]
    bound: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Reduction {
    FixedModel,
    UniqueModel,
    Nsat,
    Gadget,
    FullGadget,
    Replanning,
    GoalCompilation,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Problem {
    Sat,
    Vc,
    Gadget,
    Strips,
}

#[derive(Args, Debug)]
struct SolveArgs {
    input: PathBuf,
    /// Input kind; guessed from the file name when absent.
    #[arg(long, value_enum)]
    problem: Option<Problem>,
    /// Cover budget for graphs; without it a minimum cover is reported.
    #[arg(long)]
    budget: Option<usize>,
    /// Use the brute-force oracle instead of DPLL.
    #[arg(long)]
    brute: bool,
}

#[derive(Args, Debug)]
struct MutateArgs {
    input: PathBuf,
    /// Change-set file (`+ lits 0` / `- lits 0` lines).
    #[arg(long, conflicts_with_all = ["add_unit", "remove_unit"])]
    changes: Option<PathBuf>,
    /// Add the unit clause of this DIMACS literal.
    #[arg(long, allow_hyphen_values = true)]
    add_unit: Option<i64>,
    /// Remove the unit clause of this DIMACS literal.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "add_unit")]
    remove_unit: Option<i64>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Suites to run: sat-reductions, vc-gadget, plan-reductions,
    /// hint-tables, or `all`.
    #[arg(required = true, value_parser = parse_suites)]
    suites: Vec<Vec<Suite>>,
    /// Shift every gadget budget by this amount (mutation testing).
    #[arg(long, default_value_t = 0, allow_hyphen_values = true, hide = true)]
    budget_offset: isize,
}

fn parse_suites(s: &str) -> Result<Vec<Suite>, String> {
    if s == "all" {
        Ok(Suite::ALL.to_vec())
    } else {
        s.parse().map(|suite| vec![suite])
    }
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    #[arg(value_parser = |s: &str| s.parse::<Scenario>())]
    scenario: Scenario,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[arg(long, default_value_t = 4)]
    vars: u32,
    #[arg(long, default_value_t = 6)]
    clauses: usize,
    #[arg(long, default_value_t = 10)]
    nodes: usize,
    #[arg(long, default_value_t = 6)]
    conditions: usize,
    #[arg(long, default_value_t = 6)]
    operators: usize,
    #[arg(long, default_value_t = 4)]
    candidates: usize,
    #[arg(long, default_value_t = 2)]
    bound: usize,
}

fn read_input(path: &Path) -> anyhow::Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        return Ok(s);
    }
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn emit(out: &Option<PathBuf>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json(value: serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(&value).expect("json values serialize");
    s.push('\n');
    s
}

fn literal(value: i64) -> anyhow::Result<Literal> {
    Ok(Literal::from_dimacs(value)?)
}

fn name_of(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default()
}

fn is_gadget(path: &Path, text: &str) -> bool {
    name_of(path).ends_with(".gadget.json") || text.contains("\"built_from\"")
}

fn cmd_generate(cli: &Cli, a: &GenerateArgs) -> anyhow::Result<()> {
    let kind = match a.kind {
        Kind::Cnf => ArtifactKind::Cnf,
        Kind::Graph => ArtifactKind::Graph,
        Kind::Gadget => ArtifactKind::Gadget,
        Kind::Strips => ArtifactKind::Strips,
        Kind::Table => ArtifactKind::Table,
    };
    let cfg = GenerateConfig {
        count: a.count,
        vars: a.vars,
        clauses: a.clauses,
        clause_size: a.clause_size,
        nodes: a.nodes,
        density: a.density,
        conditions: a.conditions,
        operators: a.operators,
        candidates: a.candidates,
        bound: a.bound,
        ..GenerateConfig::new(kind, cli.seed)
    };
    let files = generate(&cfg)?;
    match &cli.out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            for (name, text) in &files {
                fs::write(dir.join(name), text)?;
            }
            eprintln!("wrote {} files to {}", files.len(), dir.display());
        }
        None => {
            for (name, text) in &files {
                if files.len() > 1 {
                    println!("==> {name} <==");
                }
                print!("{text}");
            }
        }
    }
    Ok(())
}

fn cmd_reduce(cli: &Cli, reduction: Reduction, input: &Path) -> anyhow::Result<()> {
    let text = read_input(input)?;
    let out = match reduction {
        Reduction::GoalCompilation => {
            let compiled = goal_compilation(&parse_instance_json(&text)?);
            write_instance_json(&compiled.instance)
        }
        _ => {
            let f = parse_dimacs(&text)?;
            match reduction {
                Reduction::FixedModel => {
                    let inst = reduce_fixed_model(&f);
                    json(serde_json::json!({
                        "formula": write_dimacs(inst.formula()),
                        "changes": write_changes(&inst.changes()),
                        "hint": inst.hint_model().true_vars().iter().map(|v| v.id()).collect::<Vec<_>>(),
                    }))
                }
                Reduction::UniqueModel => {
                    let inst = reduce_unique_model(&f)?;
                    json(serde_json::json!({
                        "formula": write_dimacs(inst.formula()),
                        "changes": write_changes(&inst.changes()),
                        "model": inst.expected_model().true_vars().iter().map(|v| v.id()).collect::<Vec<_>>(),
                    }))
                }
                Reduction::Nsat => {
                    let inst = make_nsat_instance(&f);
                    json(serde_json::json!({
                        "unary": inst.unary_part(),
                        "formula": write_dimacs(inst.formula()),
                    }))
                }
                Reduction::Gadget => write_gadget_json(&build_gadget(&f)?),
                Reduction::FullGadget => write_gadget_json(&build_full_gadget(f.alphabet())),
                Reduction::Replanning => {
                    let case = sat_to_replanning(&f);
                    let names = |s: &reoptlab_core::strips::State| {
                        s.iter().map(|c| c.name().to_owned()).collect::<Vec<_>>()
                    };
                    json(serde_json::json!({
                        "instance": serde_json::from_str::<serde_json::Value>(&write_instance_json(case.instance()))?,
                        "plan": case.original_plan().steps(),
                        "add_to_initial": names(case.add_to_initial()),
                        "remove_from_initial": names(case.remove_from_initial()),
                    }))
                }
                Reduction::GoalCompilation => unreachable!("handled above"),
            }
        }
    };
    emit(&cli.out, &out)
}

fn guess_problem(path: &Path, text: &str) -> Problem {
    let name = name_of(path);
    if name.ends_with(".cnf") || text.trim_start().starts_with('p') || text.trim_start().starts_with('c') {
        Problem::Sat
    } else if is_gadget(path, text) {
        Problem::Gadget
    } else if name.ends_with(".json") || text.trim_start().starts_with('{') {
        Problem::Strips
    } else {
        Problem::Vc
    }
}

fn cover_report(graph: &reoptlab_core::graph::Graph, budget: Option<usize>) -> anyhow::Result<String> {
    let (label, cover) = match budget {
        Some(k) => (format!("budget {k}"), decide_cover(graph, CoverBudget::for_graph(k, graph)?)),
        None => {
            let (size, cover) = CoverOracle::default().min_cover(graph)?;
            (format!("minimum {size}"), Some(cover))
        }
    };
    Ok(match cover {
        Some(c) => {
            let nodes: Vec<&str> = c.members().iter().map(|n| n.as_str()).collect();
            format!("s COVER {label}\nv {}\n", nodes.join(" "))
        }
        None => format!("s NO COVER {label}\n"),
    })
}

fn cmd_solve(cli: &Cli, a: &SolveArgs) -> anyhow::Result<()> {
    let text = read_input(&a.input)?;
    let out = match a.problem.unwrap_or_else(|| guess_problem(&a.input, &text)) {
        Problem::Sat => {
            let f = parse_dimacs(&text)?;
            let model = if a.brute {
                BruteForce::with_limit(cli.oracle_limit).solve(&f)?
            } else {
                solve_dpll(&f)
            };
            match model {
                Some(m) => {
                    let lits: Vec<String> = f
                        .alphabet()
                        .iter()
                        .map(|&v| {
                            let id = v.id() as i64;
                            if m.is_true(v) { id } else { -id }.to_string()
                        })
                        .collect();
                    format!("s SATISFIABLE\nv {} 0\n", lits.join(" "))
                }
                None => "s UNSATISFIABLE\n".to_owned(),
            }
        }
        Problem::Vc => cover_report(&parse_edge_list(&text)?, a.budget)?,
        Problem::Gadget => {
            let g = parse_gadget_json(&text)?;
            cover_report(g.graph(), Some(a.budget.unwrap_or(g.budget().get())))?
        }
        Problem::Strips => match plan_exists(&parse_instance_json(&text)?)? {
            Some(p) => format!("s PLAN\nv {p}\n"),
            None => "s NO PLAN\n".to_owned(),
        },
    };
    emit(&cli.out, &out)
}

fn cmd_mutate(cli: &Cli, a: &MutateArgs) -> anyhow::Result<()> {
    let text = read_input(&a.input)?;
    let edit = match (a.add_unit, a.remove_unit) {
        (Some(l), _) => Some(UnitEdit::Add(literal(l)?)),
        (_, Some(l)) => Some(UnitEdit::Remove(literal(l)?)),
        _ => None,
    };
    let out = if is_gadget(&a.input, &text) {
        let g: Gadget = parse_gadget_json(&text)?;
        let edit = edit.ok_or_else(|| anyhow!("gadgets take --add-unit or --remove-unit"))?;
        write_gadget_json(&apply_unit_edit(&g, edit)?)
    } else {
        let f: CnfFormula = parse_dimacs(&text)?;
        let changes = match (edit, &a.changes) {
            (Some(UnitEdit::Add(l)), _) => ChangeSet::adding([Clause::unit(l)]),
            (Some(UnitEdit::Remove(l)), _) => ChangeSet::deleting([Clause::unit(l)]),
            (None, Some(path)) => parse_changes(&read_input(path)?)?,
            (None, None) => bail!("give --changes, --add-unit or --remove-unit"),
        };
        write_dimacs(&apply_changes(&f, &changes))
    };
    emit(&cli.out, &out)
}

fn cmd_verify(cli: &Cli, a: &VerifyArgs) -> anyhow::Result<i32> {
    let opts = SweepOptions {
        seed: cli.seed,
        oracle_limit: cli.oracle_limit,
        budget_offset: a.budget_offset,
        ..SweepOptions::default()
    };
    let mut suites: Vec<Suite> = Vec::new();
    for s in a.suites.iter().flatten() {
        if !suites.contains(s) {
            suites.push(*s);
        }
    }
    let mut failed = false;
    let mut results = Vec::new();
    for suite in suites {
        let outcome = run_suite(suite, &opts)?;
        failed |= !outcome.passed();
        if cli.format == Format::Csv {
            println!(
                "{} {suite}: {} cases, {} counterexamples, {:.2?}",
                if outcome.passed() { "PASS" } else { "FAIL" },
                outcome.cases,
                outcome.counterexamples.len(),
                outcome.elapsed
            );
            if let Some(first) = outcome.counterexamples.first() {
                print!("  first counterexample: {first}");
            }
        }
        results.push(serde_json::json!({
            "suite": suite,
            "passed": outcome.passed(),
            "cases": outcome.cases,
            "counterexamples": outcome.counterexamples,
        }));
    }
    if cli.format == Format::Json {
        emit(&cli.out, &json(serde_json::json!({ "seed": cli.seed, "suites": results })))?;
    }
    Ok(if failed { EXIT_COUNTEREXAMPLE } else { EXIT_OK })
}

fn cmd_experiment(cli: &Cli, a: &ExperimentArgs) -> anyhow::Result<()> {
    let cfg = ExperimentConfig {
        vars: a.vars,
        clauses: a.clauses,
        nodes: a.nodes,
        conditions: a.conditions,
        operators: a.operators,
        candidates: a.candidates,
        bound: a.bound,
        ..ExperimentConfig::new(a.scenario, cli.seed, a.trials)
    };
    let report = run_experiment(&cfg)?;
    match &cli.out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            fs::write(dir.join("report.csv"), report.to_csv())?;
            fs::write(dir.join("report.json"), report.to_json())?;
        }
        None => print!(
            "{}",
            match cli.format {
                Format::Csv => report.to_csv(),
                Format::Json => report.to_json(),
            }
        ),
    }
    let s = &report.summary;
    eprintln!(
        "{} rows, hint used on {} ({:.1}%), cold work {}, hinted work {}",
        s.rows,
        s.hint_used,
        s.hint_rate * 100.0,
        s.cold_work,
        s.hinted_work
    );
    Ok(())
}

fn cmd_export_dot(cli: &Cli, input: &Path) -> anyhow::Result<()> {
    let text = read_input(input)?;
    let gadget = if is_gadget(input, &text) {
        parse_gadget_json(&text)?
    } else {
        build_gadget(&parse_dimacs(&text)?)?
    };
    emit(&cli.out, &gadget_to_dot(&gadget))
}

fn run(cli: &Cli) -> anyhow::Result<i32> {
    match &cli.command {
        Command::Generate(a) => cmd_generate(cli, a)?,
        Command::Reduce { reduction, input } => cmd_reduce(cli, *reduction, input)?,
        Command::Solve(a) => cmd_solve(cli, a)?,
        Command::Mutate(a) => cmd_mutate(cli, a)?,
        Command::Verify(a) => return cmd_verify(cli, a),
        Command::Experiment(a) => cmd_experiment(cli, a)?,
        Command::ExportDot { input } => cmd_export_dot(cli, input)?,
    }
    Ok(EXIT_OK)
}

fn exit_code_of(err: &anyhow::Error) -> i32 {
    if let Some(h) = err.downcast_ref::<HarnessError>() {
        return h.exit_code();
    }
    if let Some(core) = err.downcast_ref::<reoptlab_core::Error>() {
        return HarnessError::Core(core.clone()).exit_code();
    }
    EXIT_USAGE
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE as u8),
            };
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code_of(&e) as u8)
        }
    }
}
