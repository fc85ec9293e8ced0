use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use ratsub::automata::{compile_str, parse_automaton, to_dot, to_text};
use ratsub::groupfile::{build, parse_group_file, validate, Built, GroupDef, PartnerDef};
use ratsub::groups::{element_order, subgroup_automaton, Limits, Order};
use ratsub::oracle::{evaluate, RepKind};
use ratsub::rewriting::{saturate_with, MonadicSystem, SaturationOptions};
use ratsub::rid::rid_regular;
use ratsub::stats;
use ratsub::{Alphabet, InvolutiveAlphabet, Nfa, Word};

#[derive(Parser)]
#[command(name = "ratsub", version, about = "Rational subset membership in groups and monoids")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct Budgets {
    /// Rule-oracle calls allowed per saturation.
    #[arg(long, default_value_t = 1_000_000)]
    oracle_budget: u64,
    /// Branch-and-bound nodes allowed per integer program.
    #[arg(long, default_value_t = 100_000)]
    ilp_budget: u64,
    /// Print the construction tree and work counters to stderr.
    #[arg(long)]
    explain: bool,
}

impl Budgets {
    fn limits(&self) -> Limits {
        Limits {
            oracle_budget: Some(self.oracle_budget),
            ilp_budget: self.ilp_budget,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Member,
    Wordproblem,
    Subgroup,
    Order,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether a word lies in a rational subset.
    Check {
        group: PathBuf,
        /// Rational expression for the subset.
        #[arg(long, conflicts_with = "automaton")]
        subset: Option<String>,
        /// Automaton file for the subset.
        #[arg(long)]
        automaton: Option<PathBuf>,
        #[arg(long, allow_hyphen_values = true)]
        word: String,
        #[arg(long, value_enum, default_value = "member")]
        mode: Mode,
        /// Subgroup generators, comma separated (subgroup mode).
        #[arg(long, value_delimiter = ',')]
        gens: Vec<String>,
        #[command(flatten)]
        budgets: Budgets,
    },
    /// Order of the element a word represents.
    Order {
        group: PathBuf,
        #[arg(long)]
        word: String,
        #[command(flatten)]
        budgets: Budgets,
    },
    /// Membership in a finitely generated subgroup.
    Subgroup {
        group: PathBuf,
        #[arg(long, value_delimiter = ',')]
        gens: Vec<String>,
        #[arg(long)]
        word: String,
        #[command(flatten)]
        budgets: Budgets,
    },
    /// Saturate an automaton under a monadic rewriting system.
    Saturate {
        /// Generators; letters and their primed inverses form the alphabet.
        #[arg(long)]
        generators: String,
        #[arg(long, conflicts_with = "automaton")]
        subset: Option<String>,
        #[arg(long)]
        automaton: Option<PathBuf>,
        /// Rule file with lines `<letter or 1> <- <expression>`; free
        /// reduction when absent.
        #[arg(long)]
        rules: Option<PathBuf>,
        /// Emit DOT instead of the text format.
        #[arg(long)]
        dot: bool,
        #[command(flatten)]
        budgets: Budgets,
    },
    /// List construction-time checks with pass/fail.
    Validate {
        group: PathBuf,
        #[command(flatten)]
        budgets: Budgets,
    },
    /// Normal form of a word under a reference representation.
    #[command(hide = true)]
    OracleEval {
        /// free, abelian or free-product.
        #[arg(long)]
        kind: String,
        /// Generator names; `s:2` gives orders for free-product.
        #[arg(long)]
        generators: String,
        #[arg(long)]
        word: String,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load(path: &Path, limits: Limits) -> Result<(GroupDef, Built)> {
    let text = read(path)?;
    let def = parse_group_file(&text).with_context(|| format!("in {}", path.display()))?;
    let built = build(&def, limits).with_context(|| format!("building {}", def.name()))?;
    Ok((def, built))
}

/// Reads an automaton file and renames its letters into `target`.
fn load_automaton(path: &Path, target: &Alphabet) -> Result<Nfa> {
    let m = parse_automaton(&read(path)?).with_context(|| format!("in {}", path.display()))?;
    let src = m.alphabet().clone();
    let mut map = Vec::new();
    for l in src.letters() {
        let name = src.name(l);
        map.push(
            target
                .lookup(name)
                .ok_or_else(|| anyhow!("automaton letter `{name}` is not a group letter"))?,
        );
    }
    Ok(m.recode(target, |l| map[l.index()]))
}

fn subset(alphabet: &Alphabet, expr: &Option<String>, file: &Option<PathBuf>) -> Result<Nfa> {
    match (expr, file) {
        (Some(e), _) => Ok(compile_str(e, alphabet)?),
        (None, Some(p)) => load_automaton(p, alphabet),
        (None, None) => bail!("give --subset or --automaton"),
    }
}

fn word(alphabet: &Alphabet, text: &str) -> Result<Word> {
    alphabet.parse_word(text).with_context(|| format!("word `{text}`"))
}

fn verdict(b: bool) -> &'static str {
    if b {
        "MEMBER"
    } else {
        "NON-MEMBER"
    }
}

fn tree(def: &GroupDef, depth: usize, out: &mut String) {
    out.push_str(&format!("{}{} {}\n", "  ".repeat(depth), def.kind(), def.name()));
    match def {
        GroupDef::Overgroup { sub, .. } => tree(sub, depth + 1, out),
        GroupDef::GraphOfGroups { vertices, edges, .. } => {
            for (v, d) in vertices {
                out.push_str(&format!("{}vertex {v}\n", "  ".repeat(depth + 1)));
                tree(d, depth + 2, out);
            }
            for e in edges {
                out.push_str(&format!("{}edge {} {} -> {}\n", "  ".repeat(depth + 1), e.name, e.from, e.to));
            }
        }
        GroupDef::Product { partner, .. } => {
            let p = match partner {
                PartnerDef::Abelian { .. } => "abelian",
                PartnerDef::FreeCommutative(_) => "free_commutative",
                PartnerDef::FreeMonoid(_) => "free_monoid",
            };
            out.push_str(&format!("{}partner {p}\n", "  ".repeat(depth + 1)));
        }
        _ => {}
    }
}

fn explain(on: bool, def: Option<&GroupDef>, before: stats::Counters) {
    if !on {
        return;
    }
    let mut s = String::new();
    if let Some(d) = def {
        tree(d, 0, &mut s);
    }
    let c = stats::snapshot();
    s.push_str(&format!(
        "oracle_calls={} saturations={} saturation_rounds={} edges_added={} ilp_solves={} ilp_nodes={}\n",
        c.oracle_calls - before.oracle_calls,
        c.saturations - before.saturations,
        c.saturation_rounds - before.saturation_rounds,
        c.edges_added - before.edges_added,
        c.ilp_solves - before.ilp_solves,
        c.ilp_nodes - before.ilp_nodes,
    ));
    eprint!("{s}");
}

fn group_of(built: &Built) -> Result<&ratsub::groups::GroupDecider> {
    built.group().ok_or_else(|| anyhow!("this mode needs a group, not a monoid"))
}

fn run_subgroup(built: &Built, gens: &[String], w: &str) -> Result<String> {
    let d = group_of(built)?;
    let gens: Vec<Word> = gens.iter().map(|g| word(d.alphabet(), g.trim())).collect::<Result<_>>()?;
    let r = subgroup_automaton(d.generators(), &gens)?;
    Ok(verdict(d.member(&r, &word(d.alphabet(), w)?)?).to_string())
}

fn run_order(built: &Built, w: &str) -> Result<String> {
    let d = group_of(built)?;
    Ok(match element_order(d, &word(d.alphabet(), w)?)? {
        Order::Finite(n) => format!("ORDER {n}"),
        Order::Infinite => "ORDER INFINITE".to_string(),
    })
}

fn run(cli: Cli) -> Result<()> {
    let before = stats::snapshot();
    match cli.command {
        Command::Check {
            group,
            subset: expr,
            automaton,
            word: w,
            mode,
            gens,
            budgets,
        } => {
            let (def, built) = load(&group, budgets.limits())?;
            let a = built.alphabet().clone();
            let line = match mode {
                Mode::Member => verdict(built.member(&subset(&a, &expr, &automaton)?, &word(&a, &w)?)?).to_string(),
                Mode::Wordproblem => verdict(built.member(&compile_str("1", &a)?, &word(&a, &w)?)?).to_string(),
                Mode::Subgroup => run_subgroup(&built, &gens, &w)?,
                Mode::Order => run_order(&built, &w)?,
            };
            println!("{line}");
            explain(budgets.explain, Some(&def), before);
        }
        Command::Order { group, word: w, budgets } => {
            let (def, built) = load(&group, budgets.limits())?;
            println!("{}", run_order(&built, &w)?);
            explain(budgets.explain, Some(&def), before);
        }
        Command::Subgroup {
            group,
            gens,
            word: w,
            budgets,
        } => {
            let (def, built) = load(&group, budgets.limits())?;
            println!("{}", run_subgroup(&built, &gens, &w)?);
            explain(budgets.explain, Some(&def), before);
        }
        Command::Saturate {
            generators,
            subset: expr,
            automaton,
            rules,
            dot,
            budgets,
        } => {
            let g = InvolutiveAlphabet::from_generators(generators.split_whitespace())?;
            let a = g.alphabet();
            let m0 = subset(a, &expr, &automaton)?;
            let system = match rules {
                None => MonadicSystem::free_reduction(&g),
                Some(p) => parse_rules(&read(&p)?, a).with_context(|| format!("in {}", p.display()))?,
            };
            let opts = SaturationOptions {
                oracle_budget: Some(budgets.oracle_budget),
            };
            let (m, st) = saturate_with(&m0, &system, opts)?;
            print!("{}", if dot { to_dot(&m) } else { to_text(&m) });
            println!("rounds={} edges_added={}", st.rounds, st.edges_added);
            explain(budgets.explain, None, before);
        }
        Command::Validate { group, budgets } => {
            let text = read(&group)?;
            let def = parse_group_file(&text).with_context(|| format!("in {}", group.display()))?;
            let checks = validate(&def, budgets.limits())?;
            let mut ok = true;
            for c in &checks {
                println!("{} {}", if c.passed { "PASS" } else { "FAIL" }, c.name);
                ok &= c.passed;
            }
            explain(budgets.explain, Some(&def), before);
            if !ok {
                return Err(ChecksFailed.into());
            }
        }
        Command::OracleEval {
            kind,
            generators,
            word: w,
        } => {
            let specs: Vec<&str> = generators.split_whitespace().collect();
            let names: Vec<&str> = specs.iter().map(|s| s.split(':').next().unwrap_or(s)).collect();
            let g = InvolutiveAlphabet::from_generators(names.iter().copied())?;
            let a = g.alphabet();
            let rep = match kind.as_str() {
                "free" => RepKind::free(a, &names),
                "abelian" => RepKind::abelian(a, &names, &[]),
                "free-product" => {
                    let orders = specs
                        .iter()
                        .map(|s| {
                            let (n, k) = s.split_once(':').ok_or_else(|| anyhow!("expected name:order, got `{s}`"))?;
                            Ok((n, k.parse::<usize>().with_context(|| format!("order in `{s}`"))?))
                        })
                        .collect::<Result<Vec<_>>>()?;
                    RepKind::cyclic_free_product(a, &orders)
                }
                other => bail!("unknown representation `{other}`"),
            };
            println!("{:?}", evaluate(&rep, &word(a, &w)?)?);
        }
    }
    Ok(())
}

/// Lines `<letter or 1> <- <expression>`; rules for the same target are
/// united.
fn parse_rules(text: &str, a: &Alphabet) -> Result<MonadicSystem> {
    let mut by_target: Vec<(Option<ratsub::Letter>, Nfa)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (lhs, rhs) = line
            .split_once("<-")
            .ok_or_else(|| ratsub::Error::parse(i + 1, 1, "expected `<target> <- <expression>`"))?;
        let lhs = lhs.trim();
        let target = if lhs == "1" { None } else { Some(a.letter(lhs)?) };
        let lang = compile_str(rhs.trim(), a)?;
        match by_target.iter_mut().find(|(t, _)| *t == target) {
            Some((_, m)) => *m = m.union(&lang)?,
            None => by_target.push((target, lang)),
        }
    }
    let mut sys = MonadicSystem::new(a);
    for (t, m) in by_target {
        sys.add_rule(t, rid_regular(&m))?;
    }
    Ok(sys)
}

#[derive(Debug)]
struct ChecksFailed;

impl std::fmt::Display for ChecksFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("some checks failed")
    }
}

impl std::error::Error for ChecksFailed {}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if e.downcast_ref::<ChecksFailed>().is_some() {
                return ExitCode::from(1);
            }
            eprintln!("error: {e:#}");
            let budget = e.chain().any(|c| c.downcast_ref::<ratsub::Error>().is_some_and(|r| r.is_budget()));
            ExitCode::from(if budget { 3 } else { 2 })
        }
    }
}
