//! The `coxkit` command line: argument parsing, dispatch and report
//! rendering. Reports are `key: value` lines under a schema version line;
//! multi-line certificates follow their key, indented by two spaces.

use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::autcompat::{
    self, AutVerdict, AutomorphismSpec, CompatReport, GeneratingSetPair, GraphVerdict, ParabolicFailure, Relation,
    SmallWordsVerdict,
};
use crate::diagram::{self, CoxeterMatrix, IndexSet};
use crate::evenconj::{self, ConjConfig, ConjDecision, Retraction};
use crate::parabolic::{self, PcResult};
use crate::quotients::{SearchPlan, SeparationResult, Separator};
use crate::words::{CoxeterGroup, Element, Word};

pub const SCHEMA: &str = "coxkit-report/1";

/// Exit status for a decided answer.
pub const EXIT_DECIDED: i32 = 0;
/// Exit status for input errors.
pub const EXIT_INPUT: i32 = 1;
/// Exit status when a budget ran out before a decision.
pub const EXIT_UNKNOWN: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "coxkit", version, about = "Computations in Coxeter groups")]
pub struct Cli {
    #[command(flatten)]
    pub budgets: Budgets,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Budgets {
    /// Length bound for conjugator and witness searches.
    #[arg(long, global = true, default_value_t = 8, value_parser = clap::value_parser!(u64).range(1..))]
    pub radius: u64,
    /// Step budget for each word-engine operation.
    #[arg(long, global = true, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub steps: u64,
    /// Cap on cosets during coset enumeration.
    #[arg(long, global = true, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub cosets: u64,
    /// Re-check every certificate with the word engine.
    #[arg(long, global = true)]
    pub verify: bool,
    /// Comma-separated separation stages: abelian, retract, coset, special, compose.
    #[arg(long, global = true)]
    pub plan: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Diagram flags: even, right-angled, components, (4,4,2)-triangles.
    Classify { matrix: PathBuf },
    /// ShortLex normal form of a word.
    Reduce { matrix: PathBuf, word: String },
    /// Decide whether two words are conjugate.
    Conj { matrix: PathBuf, x: String, y: String },
    /// Parabolic closure of an element.
    Pc { matrix: PathBuf, word: String },
    /// Apply the retraction onto a standard parabolic subgroup.
    Retract { matrix: PathBuf, subset: String, word: String },
    /// Search for a finite quotient separating two conjugacy classes.
    Separate { matrix: PathBuf, x: String, y: String },
    /// Check an automorphism and its compatibility and inner-by-graph status.
    Autcheck { matrix: PathBuf, spec: PathBuf },
    /// Small-words pointwise-inner test.
    Smallwords { matrix: PathBuf, spec: PathBuf },
}

/// A finished run: exit status and the text for standard output (or, for
/// input errors, standard error).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub status: i32,
    pub output: String,
}

#[derive(Debug, Default)]
struct Report {
    lines: Vec<String>,
}

impl Report {
    fn kv(&mut self, key: &str, value: impl Display) {
        self.lines.push(format!("{key}: {value}"));
    }

    fn block(&mut self, key: &str, text: &str) {
        self.lines.push(format!("{key}:"));
        self.lines.extend(text.lines().map(|l| format!("  {l}")));
    }

    fn finish(self, status: i32) -> Outcome {
        let mut output = self.lines.join("\n");
        output.push('\n');
        Outcome { status, output }
    }
}

struct InputError(String);

impl<E: Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

type Res<T> = Result<T, InputError>;

fn context<T, E: Display>(r: Result<T, E>, what: impl Display) -> Res<T> {
    r.map_err(|e| InputError(format!("{what}: {e}")))
}

fn read_file(path: &Path) -> Res<String> {
    context(fs::read_to_string(path), path.display())
}

fn load_matrix(path: &Path) -> Res<CoxeterMatrix> {
    context(CoxeterMatrix::parse(&read_file(path)?), path.display())
}

fn parse_element(group: &CoxeterGroup, text: &str, name: &str) -> Res<Element> {
    let w = context(Word::parse(text, group.rank()), format!("argument {name} `{text}`"))?;
    Ok(group.reduce(&w)?)
}

fn plan(b: &Budgets) -> Res<SearchPlan> {
    let plan = SearchPlan {
        coset_cap: b.cosets as usize,
        ..SearchPlan::default()
    };
    match &b.plan {
        Some(text) => context(plan.with_stages(text), "--plan"),
        None => Ok(plan),
    }
}

/// Parse arguments (including the program name) and run.
pub fn run_args<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let status = if e.use_stderr() { EXIT_INPUT } else { EXIT_DECIDED };
            Outcome {
                status,
                output: e.render().to_string(),
            }
        }
    }
}

pub fn run(cli: &Cli) -> Outcome {
    match dispatch(cli) {
        Ok(o) => o,
        Err(InputError(msg)) => Outcome {
            status: EXIT_INPUT,
            output: format!("error: {msg}\n"),
        },
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Classify { .. } => "classify",
        Command::Reduce { .. } => "reduce",
        Command::Conj { .. } => "conj",
        Command::Pc { .. } => "pc",
        Command::Retract { .. } => "retract",
        Command::Separate { .. } => "separate",
        Command::Autcheck { .. } => "autcheck",
        Command::Smallwords { .. } => "smallwords",
    }
}

fn matrix_path(c: &Command) -> &Path {
    match c {
        Command::Classify { matrix }
        | Command::Reduce { matrix, .. }
        | Command::Conj { matrix, .. }
        | Command::Pc { matrix, .. }
        | Command::Retract { matrix, .. }
        | Command::Separate { matrix, .. }
        | Command::Autcheck { matrix, .. }
        | Command::Smallwords { matrix, .. } => matrix,
    }
}

fn dispatch(cli: &Cli) -> Res<Outcome> {
    let b = &cli.budgets;
    let path = matrix_path(&cli.command);
    let m = load_matrix(path)?;
    let plan = plan(b)?;
    let group = CoxeterGroup::new(m.clone()).with_step_budget(b.steps);
    let radius = b.radius as usize;

    let mut r = Report::default();
    r.kv("schema", SCHEMA);
    r.kv("command", command_name(&cli.command));
    r.kv("matrix", path.display());
    r.kv("rank", m.rank());
    r.kv("budget.radius", radius);
    r.kv("budget.steps", b.steps);
    r.kv("budget.cosets", b.cosets);
    r.kv("budget.plan", plan.describe());

    let status = match &cli.command {
        Command::Classify { .. } => classify(&m, &mut r),
        Command::Reduce { word, .. } => reduce(&group, word, b.verify, &mut r)?,
        Command::Conj { x, y, .. } => conj(&group, x, y, radius, plan, b.verify, &mut r)?,
        Command::Pc { word, .. } => pc(&group, word, radius, b.verify, &mut r)?,
        Command::Retract { subset, word, .. } => retract(&group, subset, word, &mut r)?,
        Command::Separate { x, y, .. } => separate(&group, x, y, &plan, b.verify, &mut r)?,
        Command::Autcheck { spec, .. } => autcheck(&group, spec, radius, b.verify, &mut r)?,
        Command::Smallwords { spec, .. } => smallwords(&group, spec, radius, b.verify, &mut r)?,
    };
    Ok(r.finish(status))
}

fn list<T: Display>(items: impl IntoIterator<Item = T>) -> String {
    let v: Vec<String> = items.into_iter().map(|x| x.to_string()).collect();
    if v.is_empty() {
        "-".into()
    } else {
        v.join(" ")
    }
}

fn classify(m: &CoxeterMatrix, r: &mut Report) -> i32 {
    let c = diagram::classify(m);
    r.kv("even", c.is_even);
    r.kv("right_angled", c.is_right_angled);
    r.kv("crystallographic", c.is_crystallographic);
    r.kv("spherical", c.is_spherical());
    r.kv("irreducible", c.is_irreducible());
    for (k, comp) in c.components.iter().enumerate() {
        let kind = if c.spherical[k] {
            "spherical"
        } else if c.affine[k] {
            "affine"
        } else {
            "other"
        };
        r.kv("component", format!("{comp} {kind}"));
    }
    if let Some(order) = diagram::spherical_order(m, m.full_set()) {
        r.kv("order", order);
    }
    r.kv("has_442_triangle", c.has_442_triangle);
    r.kv("has_affine_subdiagram_rank_ge3", c.has_affine_subdiagram_rank_ge3);
    r.kv("theorem12_applicable", diagram::theorem12_applicable(m));
    EXIT_DECIDED
}

fn reduce(group: &CoxeterGroup, word: &str, verify: bool, r: &mut Report) -> Res<i32> {
    let w = context(Word::parse(word, group.rank()), format!("argument word `{word}`"))?;
    let e = group.reduce(&w)?;
    r.kv("input", &w);
    r.kv("reduced_input", group.is_reduced(&w)?);
    r.kv("normal_form", &e);
    r.kv("length", e.length());
    if verify {
        r.kv("verified", group.tits_reduce(&w)? == e);
    }
    Ok(EXIT_DECIDED)
}

fn conj(group: &CoxeterGroup, x: &str, y: &str, radius: usize, plan: SearchPlan, verify: bool, r: &mut Report) -> Res<i32> {
    let (xe, ye) = (parse_element(group, x, "x")?, parse_element(group, y, "y")?);
    r.kv("x", &xe);
    r.kv("y", &ye);
    let config = ConjConfig {
        radius,
        plan,
        ..ConjConfig::default()
    };
    let d = evenconj::decide_conjugacy(group, &xe, &ye, &config)?;
    let status = match &d {
        ConjDecision::Conjugate(g) => {
            r.kv("verdict", "conjugate");
            r.kv("conjugator", g);
            EXIT_DECIDED
        }
        ConjDecision::NotConjugate(c) => {
            r.kv("verdict", "not_conjugate");
            r.block("certificate", &c.to_text());
            EXIT_DECIDED
        }
        ConjDecision::Unknown { radius } => {
            r.kv("verdict", "unknown");
            r.kv("searched_radius", radius);
            EXIT_UNKNOWN
        }
    };
    if verify {
        r.kv("verified", d.verify(group, &xe, &ye)?);
    }
    Ok(status)
}

fn pc(group: &CoxeterGroup, word: &str, radius: usize, verify: bool, r: &mut Report) -> Res<i32> {
    let x = parse_element(group, word, "word")?;
    r.kv("x", &x);
    let res = parabolic::pc_element(group, &x, radius)?;
    let status = match &res {
        PcResult::Exact(p) => {
            r.kv("verdict", "exact");
            r.kv("closure", p);
            EXIT_DECIDED
        }
        PcResult::Bounded(p, rad) => {
            r.kv("verdict", "bounded");
            r.kv("closure", p);
            r.kv("searched_radius", rad);
            EXIT_UNKNOWN
        }
        PcResult::Unknown(rad) => {
            r.kv("verdict", "unknown");
            r.kv("searched_radius", rad);
            EXIT_UNKNOWN
        }
    };
    if verify {
        if let Some(p) = res.parabolic() {
            r.kv("verified", p.contains(group, &x)?);
        }
    }
    Ok(status)
}

fn retract(group: &CoxeterGroup, subset: &str, word: &str, r: &mut Report) -> Res<i32> {
    let set: IndexSet = context(subset.parse(), format!("argument subset `{subset}`"))?;
    if !set.is_subset(group.matrix().full_set()) {
        return Err(InputError(format!("subset {set} exceeds rank {}", group.rank())));
    }
    let x = parse_element(group, word, "word")?;
    let rho = Retraction::new(group.matrix(), set)?;
    let image = rho.apply(group, &x)?;
    r.kv("subset", set);
    r.kv("x", &x);
    r.kv("image", &image);
    Ok(EXIT_DECIDED)
}

fn separate(group: &CoxeterGroup, x: &str, y: &str, plan: &SearchPlan, verify: bool, r: &mut Report) -> Res<i32> {
    let (xe, ye) = (parse_element(group, x, "x")?, parse_element(group, y, "y")?);
    r.kv("x", &xe);
    r.kv("y", &ye);
    let sep = Separator::new(group.matrix(), plan);
    let (res, transcript) = sep.separate_with_transcript(&xe, &ye);
    for t in &transcript {
        r.kv("tried", format!("{} {}", t.quotient, t.verdict));
    }
    Ok(match res {
        SeparationResult::Witness(w) => {
            r.kv("verdict", "separated");
            r.block("witness", &w.to_text());
            if verify {
                r.kv("verified", w.verify(group.matrix(), &xe, &ye));
            }
            EXIT_DECIDED
        }
        SeparationResult::NotFound { tried } => {
            r.kv("verdict", "not_found");
            r.kv("quotients_tried", tried);
            EXIT_UNKNOWN
        }
    })
}

fn load_spec(group: &CoxeterGroup, path: &Path) -> Res<AutomorphismSpec> {
    context(AutomorphismSpec::parse(&read_file(path)?, group.rank()), path.display())
}

fn render_compat(report: &CompatReport, r: &mut Report) {
    r.kv("reflection_compatible", report.reflection.label());
    match &report.reflection {
        Relation::Yes(ws) => {
            for w in ws {
                r.kv(
                    "reflection_witness",
                    format!("{} -> {} by {}", w.generator + 1, w.target + 1, w.conjugator),
                );
            }
        }
        Relation::No(f) => {
            r.kv("reflection_failure", f.generator + 1);
            for (k, c) in &f.certificates {
                r.block(&format!("reflection_certificate {}", k + 1), &c.to_text());
            }
        }
        Relation::Unknown(rad) => r.kv("reflection_radius", rad),
    }
    r.kv("angle_compatible", report.angle.label());
    match &report.angle {
        Relation::Yes(ws) => {
            for w in ws {
                r.kv(
                    "angle_witness",
                    format!(
                        "{},{} -> {},{} by {}",
                        w.pair.0 + 1,
                        w.pair.1 + 1,
                        w.targets.0 + 1,
                        w.targets.1 + 1,
                        w.conjugator
                    ),
                );
            }
        }
        Relation::No(autcompat::AngleFailure::NotReflectionCompatible) => {
            r.kv("angle_failure", "not reflection-compatible")
        }
        Relation::No(autcompat::AngleFailure::Pair(i, j)) => r.kv("angle_failure", format!("{},{}", i + 1, j + 1)),
        Relation::Unknown(rad) => r.kv("angle_radius", rad),
    }
    r.kv("parabolic_compatible", report.parabolic.label());
    match &report.parabolic {
        Relation::Yes(ws) => {
            for w in ws {
                r.kv("parabolic_witness", format!("{} -> {} by {}", w.j1, w.j2, w.conjugator));
            }
        }
        Relation::No(ParabolicFailure::Subset(j)) => r.kv("parabolic_failure", j),
        Relation::No(ParabolicFailure::NotParabolic {
            subset,
            element,
            certificate,
        }) => {
            r.kv("parabolic_failure", format!("{subset} not parabolic, essential element {element}"));
            r.kv("essential_certificate", format!("{certificate:?}"));
        }
        Relation::Unknown(rad) => r.kv("parabolic_radius", rad),
    }
}

fn render_graph(prefix: &str, v: &GraphVerdict, r: &mut Report) -> i32 {
    match v {
        GraphVerdict::InnerByGraph {
            conjugator,
            permutation,
        } => {
            r.kv(prefix, "yes");
            r.kv(&format!("{prefix}.conjugator"), conjugator);
            r.kv(&format!("{prefix}.permutation"), list(permutation.iter().map(|p| p + 1)));
            EXIT_DECIDED
        }
        GraphVerdict::NotInnerByGraph(f) => {
            r.kv(prefix, "no");
            r.kv(&format!("{prefix}.failed_condition"), f);
            EXIT_DECIDED
        }
        GraphVerdict::Unknown(rad) => {
            r.kv(prefix, "unknown");
            r.kv(&format!("{prefix}.searched_radius"), rad);
            EXIT_UNKNOWN
        }
    }
}

fn autcheck(group: &CoxeterGroup, path: &Path, radius: usize, verify: bool, r: &mut Report) -> Res<i32> {
    let spec = load_spec(group, path)?;
    r.kv("spec", path.display());
    match autcompat::verify_automorphism(group, &spec)? {
        AutVerdict::Verified => r.kv("automorphism", "verified"),
        AutVerdict::Invalid(reason) => {
            r.kv("automorphism", "invalid");
            r.kv("reason", reason);
            return Ok(EXIT_INPUT);
        }
    }
    let pair = GeneratingSetPair::automorphism(group, &spec)?;
    let report = autcompat::compat_report(group, &pair, radius)?;
    render_compat(&report, r);
    let graph = autcompat::inner_by_graph(group, &spec, radius)?;
    let status = render_graph("inner_by_graph", &graph, r);
    if group.matrix().is_crystallographic() {
        let cryst = autcompat::cryst_shortcut(group, &spec, radius)?;
        render_graph("cryst_shortcut", &cryst, r);
    }
    if verify {
        r.kv(
            "verified",
            report.verify(group, &pair)? && graph.verify(group, &spec)?,
        );
    }
    Ok(status)
}

fn smallwords(group: &CoxeterGroup, path: &Path, radius: usize, verify: bool, r: &mut Report) -> Res<i32> {
    let spec = load_spec(group, path)?;
    r.kv("spec", path.display());
    let v = autcompat::smallwords_inner(group, &spec, radius)?;
    let status = match &v {
        SmallWordsVerdict::Inner(g) => {
            r.kv("verdict", "inner");
            r.kv("conjugator", g);
            EXIT_DECIDED
        }
        SmallWordsVerdict::NotPointwiseSmall { word, certificate } => {
            r.kv("verdict", "not_pointwise_small");
            r.kv("witness_word", word);
            match certificate {
                Some(c) => r.block("certificate", &c.to_text()),
                None => r.kv("certificate", "finite class comparison"),
            }
            EXIT_DECIDED
        }
        SmallWordsVerdict::Unknown(rad) => {
            r.kv("verdict", "unknown");
            r.kv("searched_radius", rad);
            EXIT_UNKNOWN
        }
    };
    if verify {
        r.kv("verified", v.verify(group, &spec)?);
    }
    Ok(status)
}
