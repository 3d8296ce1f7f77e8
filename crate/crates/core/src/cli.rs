//! Command-line front end. Exit codes: 0 when every check passes, 1 when a property fails
//! (a counterexample is printed as JSON), 2 on usage or input errors.

use std::io::Write;
use std::path::Path;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::alba::{equivalent_over, rule_soundness_suite, Counterexample, Failure, Granularity, ModelClass, RuleId, SoundnessBounds, Verdict};
use crate::bitset::Set;
use crate::catalog::{builtin, enumerate_lattices, parse_lattice, parse_lattice_json, serialize, serialize_json, summary};
use crate::classical::church_rosser_sweep_exact;
use crate::lattice::FiniteLattice;
use crate::lplus::mml_to_lplus;
use crate::mml::standard_translation;
use crate::nation::{dgraph, scripted_derivation_up_to, verify_catalog, ChainBound, Variant, MAX_SCRIPTED_N};
use crate::presentation::presentation_of;
use crate::term::{counterexample, parse_term, TermError};
use crate::two_sorted::{YMode, DEFAULT_SEARCH_BUDGET};

/// Default cap on enumerated assignments; `LATCORR_BUDGET` overrides it.
pub const DEFAULT_BUDGET: u64 = 1 << 26;

#[derive(Debug, Parser)]
#[command(name = "latcorr", version, about = "Correspondence checks for finite lattices and their two-sorted frames")]
struct Cli {
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Enumerate or display lattices.
    #[command(subcommand)]
    Lattices(LatticesCmd),
    /// Check a lattice inequality by brute force.
    CheckIneq {
        #[command(flatten)]
        lattice: LatticeArg,
        #[arg(long)]
        lhs: String,
        #[arg(long)]
        rhs: String,
    },
    /// Validity of t_n ≤ s_n against D⁺-walks.
    #[command(subcommand)]
    Nation(NationCmd),
    /// The D or D⁺ relation of a lattice.
    Dchain {
        #[command(flatten)]
        lattice: LatticeArg,
        /// Use D⁺ instead of D.
        #[arg(long)]
        plus: bool,
        /// Also report the longest walk without repeated vertices.
        #[arg(long)]
        simple_paths: bool,
    },
    /// Scripted derivations.
    #[command(subcommand)]
    Alba(AlbaCmd),
    /// Rule soundness suites.
    #[command(subcommand)]
    Rules(RulesCmd),
    /// Compare ◇□p → □◇p, Church–Rosser and its reduced form on every frame.
    ChurchRosser {
        #[arg(long, default_value_t = 3)]
        max_states: usize,
    },
    /// Print the standard translation of a lattice term and its L⁺ form.
    Translate {
        #[arg(long)]
        term: String,
    },
}

#[derive(Debug, Subcommand)]
enum LatticesCmd {
    Enum {
        #[arg(long)]
        max_size: usize,
        /// Keep one lattice per isomorphism class.
        #[arg(long)]
        dedup: bool,
    },
    Show {
        /// Builtin name or file.
        source: String,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
}

#[derive(Debug, Subcommand)]
enum NationCmd {
    Verify {
        #[arg(long, default_value_t = 5)]
        max_size: usize,
        #[arg(long, default_value_t = 2)]
        max_n: usize,
        /// Skip the step-by-step equivalence of the derivation.
        #[arg(long)]
        no_steps: bool,
    },
}

#[derive(Debug, Subcommand)]
enum AlbaCmd {
    Trace {
        #[arg(long)]
        n: usize,
        /// Check every consecutive pair of systems for equi-validity on lattice frames.
        #[arg(long)]
        validate_steps: bool,
        #[arg(long, default_value_t = 4)]
        max_lattice: usize,
    },
}

#[derive(Debug, Subcommand)]
enum RulesCmd {
    Soundness {
        /// A single rule identifier; all rules when absent.
        #[arg(long)]
        rule: Option<String>,
        #[arg(long, default_value_t = 3)]
        max_x: usize,
        #[arg(long, default_value_t = 2)]
        max_y: usize,
        #[arg(long, default_value_t = 2)]
        depth: usize,
        #[arg(long, default_value_t = 5)]
        max_lattice: usize,
    },
}

#[derive(Debug, Args)]
struct LatticeArg {
    /// Builtin name or file.
    #[arg(long)]
    lattice: String,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

/// Outcome of a subcommand.
enum Outcome {
    Pass,
    /// A property failed; the value is the counterexample block.
    Fail(Value),
}

struct Usage(String);

impl<E: std::fmt::Display> From<E> for Usage {
    fn from(e: E) -> Usage {
        Usage(e.to_string())
    }
}

/// Parses `args` (including the program name), runs the command, and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    let budget = match budget() {
        Ok(b) => b,
        Err(Usage(m)) => {
            let _ = writeln!(err, "error: {m}");
            return 2;
        }
    };
    let mut ctx = Ctx { json: cli.json, budget, out };
    match ctx.dispatch(cli.command) {
        Ok(Outcome::Pass) => 0,
        Ok(Outcome::Fail(cex)) => {
            let block = json!({ "counterexample": cex });
            let _ = writeln!(ctx.out, "{}", serde_json::to_string_pretty(&block).expect("json"));
            1
        }
        Err(Usage(m)) => {
            let _ = writeln!(err, "error: {m}");
            2
        }
    }
}

fn budget() -> Result<u64, Usage> {
    match std::env::var("LATCORR_BUDGET") {
        Ok(v) => v.trim().parse().map_err(|_| Usage(format!("LATCORR_BUDGET must be a positive integer, got {v:?}"))),
        Err(_) => Ok(DEFAULT_BUDGET),
    }
}

/// A builtin lattice name, or a file in the text or JSON format.
pub fn load_lattice(source: &str, format: Option<&str>) -> Result<FiniteLattice, String> {
    if let Ok(l) = builtin(source) {
        return Ok(l);
    }
    let path = Path::new(source);
    if !path.exists() {
        return Err(format!("{source:?} is neither a builtin lattice nor a file"));
    }
    let text = std::fs::read_to_string(path).map_err(|e| format!("{source}: {e}"))?;
    let json = match format {
        Some(f) => f == "json",
        None => path.extension().is_some_and(|e| e == "json"),
    };
    let parsed = if json { parse_lattice_json(&text) } else { parse_lattice(&text) };
    parsed.map_err(|e| format!("{source}: {e}"))
}

fn set_indices(s: Set) -> Vec<usize> {
    s.iter().collect()
}

fn counterexample_json(c: &Counterexample) -> Value {
    json!({
        "model": c.model,
        "granularity": format!("{:?}", c.granularity),
        "satisfied_by": c.satisfied_by,
        "witness": c.witness.iter().map(|(n, s)| (n.clone(), json!(set_indices(*s)))).collect::<serde_json::Map<_, _>>(),
    })
}

struct Ctx<'a> {
    json: bool,
    budget: u64,
    out: &'a mut dyn Write,
}

impl Ctx<'_> {
    fn line(&mut self, s: impl AsRef<str>) -> Result<(), Usage> {
        writeln!(self.out, "{}", s.as_ref())?;
        Ok(())
    }

    fn emit_json(&mut self, v: &Value) -> Result<(), Usage> {
        let s = serde_json::to_string_pretty(v)?;
        self.line(s)
    }

    fn lattice(&self, a: &LatticeArg) -> Result<FiniteLattice, Usage> {
        let f = a.format.map(|f| match f {
            Format::Text => "text",
            Format::Json => "json",
        });
        load_lattice(&a.lattice, f).map_err(Usage)
    }

    fn dispatch(&mut self, cmd: Command) -> Result<Outcome, Usage> {
        match cmd {
            Command::Lattices(LatticesCmd::Enum { max_size, dedup }) => self.lattices_enum(max_size, dedup),
            Command::Lattices(LatticesCmd::Show { source, format }) => {
                self.lattices_show(LatticeArg { lattice: source, format })
            }
            Command::CheckIneq { lattice, lhs, rhs } => self.check_ineq(&lattice, &lhs, &rhs),
            Command::Nation(NationCmd::Verify { max_size, max_n, no_steps }) => self.nation_verify(max_size, max_n, !no_steps),
            Command::Dchain { lattice, plus, simple_paths } => self.dchain(&lattice, plus, simple_paths),
            Command::Alba(AlbaCmd::Trace { n, validate_steps, max_lattice }) => self.alba_trace(n, validate_steps, max_lattice),
            Command::Rules(RulesCmd::Soundness { rule, max_x, max_y, depth, max_lattice }) => {
                let bounds = SoundnessBounds { max_x, max_y, depth, max_lattice, budget: DEFAULT_SEARCH_BUDGET };
                self.rules_soundness(rule.as_deref(), &bounds)
            }
            Command::ChurchRosser { max_states } => self.church_rosser(max_states),
            Command::Translate { term } => self.translate(&term),
        }
    }

    fn lattices_enum(&mut self, max_size: usize, dedup: bool) -> Result<Outcome, Usage> {
        let ls = enumerate_lattices(max_size, dedup)?;
        if self.json {
            let v: Vec<Value> = ls
                .iter()
                .enumerate()
                .map(|(i, l)| serde_json::from_str(&serialize_json(&format!("L{i}"), l)).expect("spec json"))
                .collect();
            self.emit_json(&json!(v))?;
        } else {
            for (i, l) in ls.iter().enumerate() {
                let hasse: Vec<String> = l.hasse().iter().map(|&(a, b)| format!("{}<{}", l.label(a), l.label(b))).collect();
                self.line(format!("L{i} {} covers: {}", summary(l), hasse.join(" ")))?;
            }
            self.line(format!("{} lattices", ls.len()))?;
        }
        Ok(Outcome::Pass)
    }

    fn lattices_show(&mut self, a: LatticeArg) -> Result<Outcome, Usage> {
        let l = self.lattice(&a)?;
        let p = presentation_of(&l);
        let props = p.properties();
        let covers: Vec<(String, Vec<String>)> =
            (0..p.size()).map(|j| (p.label(j).to_string(), p.covers(j).iter().map(|&c| p.show_set(c)).collect())).collect();
        if self.json {
            let spec: Value = serde_json::from_str(&serialize_json(&a.lattice, &l))?;
            self.emit_json(&json!({
                "lattice": spec,
                "join_irreducibles": p.labels(),
                "minimal_covers": covers.iter().map(|(j, c)| (j.clone(), json!(c))).collect::<serde_json::Map<_, _>>(),
                "direct": props.direct(),
            }))?;
        } else {
            self.line(serialize(&a.lattice, &l).trim_end())?;
            self.line(format!("# {}", summary(&l)))?;
            for (j, c) in &covers {
                self.line(format!("# M({j}) = {}", c.join(" ")))?;
            }
            self.line(format!(
                "# presentation: monotone={} reflexive={} transitive={}",
                props.monotone, props.reflexive, props.transitive
            ))?;
        }
        Ok(Outcome::Pass)
    }

    fn check_ineq(&mut self, a: &LatticeArg, lhs: &str, rhs: &str) -> Result<Outcome, Usage> {
        let l = self.lattice(a)?;
        let (s, t) = (parse_term(lhs)?, parse_term(rhs)?);
        let found = match counterexample(&l, &s, &t, self.budget) {
            Ok(c) => c,
            Err(e @ TermError::BudgetExceeded { .. }) => return Err(Usage(e.to_string())),
            Err(e) => return Err(e.into()),
        };
        match found {
            None => {
                if self.json {
                    self.emit_json(&json!({ "lhs": s.to_string(), "rhs": t.to_string(), "valid": true }))?;
                } else {
                    self.line("VALID")?;
                }
                Ok(Outcome::Pass)
            }
            Some(v) => {
                let labels: serde_json::Map<String, Value> = v.iter().map(|(n, &e)| (n.clone(), json!(l.label(e)))).collect();
                if !self.json {
                    let shown: Vec<String> = labels.iter().map(|(n, e)| format!("{n}={}", e.as_str().unwrap_or(""))).collect();
                    self.line(format!("INVALID at {}", shown.join(" ")))?;
                }
                Ok(Outcome::Fail(json!({ "lhs": s.to_string(), "rhs": t.to_string(), "assignment": labels })))
            }
        }
    }

    fn nation_verify(&mut self, max_size: usize, max_n: usize, steps: bool) -> Result<Outcome, Usage> {
        let lattices: Vec<(String, FiniteLattice)> =
            enumerate_lattices(max_size, true)?.into_iter().enumerate().map(|(i, l)| (format!("L{i}"), l)).collect();
        if steps && max_n > MAX_SCRIPTED_N {
            return Err(Usage(format!("step checks are scripted up to n = {MAX_SCRIPTED_N}; pass --no-steps")));
        }
        let reports = verify_catalog(&lattices, max_n, self.budget, steps)?;
        let failed: Vec<_> = reports.iter().filter(|r| !r.passed()).collect();
        if self.json {
            self.emit_json(&json!(reports))?;
        } else {
            self.line(format!("{:<5} {:>3} {:>2} {:>8} {:>9} {:>6}  status", "name", "|L|", "n", "valid", "no-chain", "steps"))?;
            for r in &reports {
                let valid = r.validity.map_or("skipped".to_string(), |v| v.to_string());
                let status = if r.passed() { "ok" } else { "FAIL" };
                self.line(format!("{:<5} {:>3} {:>2} {:>8} {:>9} {:>6}  {status}", r.lattice, r.size, r.n, valid, r.no_chain, r.steps_checked))?;
                if let Some(n) = &r.notice {
                    self.line(format!("      {n}"))?;
                }
            }
            self.line(format!("{} checks, {} failed", reports.len(), failed.len()))?;
        }
        match failed.first() {
            None => Ok(Outcome::Pass),
            Some(r) => Ok(Outcome::Fail(json!(r))),
        }
    }

    fn dchain(&mut self, a: &LatticeArg, plus: bool, simple: bool) -> Result<Outcome, Usage> {
        let l = self.lattice(a)?;
        let g = dgraph(&l, if plus { Variant::Dplus } else { Variant::D });
        let mut edges: Vec<(String, String)> =
            g.edges.iter().map(|&(x, y)| (g.labels[x].clone(), g.labels[y].clone())).collect();
        edges.sort();
        let bound = g.max_finite_or_cyclic();
        let longest_simple = simple.then(|| (0..=g.size()).take_while(|&k| g.has_simple_chain(k)).last());
        if self.json {
            self.emit_json(&json!({
                "variant": if plus { "D+" } else { "D" },
                "vertices": g.labels,
                "edges": edges,
                "walks": match bound { ChainBound::Finite(n) => json!(n), ChainBound::Cyclic => json!("cyclic"), ChainBound::Empty => json!(null) },
                "longest_simple_path": longest_simple.flatten(),
            }))?;
        } else {
            self.line(format!("{} on J = {{{}}}", if plus { "D⁺" } else { "D" }, g.labels.join(",")))?;
            for (x, y) in &edges {
                self.line(format!("{x}→{y}"))?;
            }
            self.line(format!("{} edges; {bound}", edges.len()))?;
            if let Some(s) = longest_simple {
                self.line(match s {
                    Some(k) => format!("longest simple path {k}"),
                    None => "no vertices".to_string(),
                })?;
            }
        }
        Ok(Outcome::Pass)
    }

    fn alba_trace(&mut self, n: usize, validate: bool, max_lattice: usize) -> Result<Outcome, Usage> {
        let trace = scripted_derivation_up_to(n, MAX_SCRIPTED_N.max(n))?;
        if self.json {
            self.emit_json(&trace.to_json())?;
        } else {
            write!(self.out, "{}", trace.to_text())?;
        }
        if !validate {
            return Ok(Outcome::Pass);
        }
        let models = ModelClass::Lattices { max_size: max_lattice, y_mode: YMode::Powerset }.models(&Default::default())?;
        let systems: Vec<_> = trace.systems().collect();
        for (k, pair) in systems.windows(2).enumerate() {
            if let Verdict::Counterexample(c) = equivalent_over(&models, pair[0], pair[1], Granularity::Validity, DEFAULT_SEARCH_BUDGET)? {
                if !self.json {
                    self.line(format!("step {} is not equi-valid: {c}", k + 1))?;
                }
                return Ok(Outcome::Fail(json!({ "step": k + 1, "counterexample": counterexample_json(&c) })));
            }
        }
        if !self.json {
            self.line(format!("validated {} steps on {} lattice frames", systems.len() - 1, models.len()))?;
        }
        Ok(Outcome::Pass)
    }

    fn rules_soundness(&mut self, rule: Option<&str>, bounds: &SoundnessBounds) -> Result<Outcome, Usage> {
        let rules: Vec<RuleId> = match rule {
            Some(r) => vec![r.parse::<RuleId>().map_err(Usage)?],
            None => RuleId::ALL.to_vec(),
        };
        let mut rows = Vec::new();
        let mut first_failure = None;
        for r in rules {
            let start = Instant::now();
            let rep = rule_soundness_suite(r, bounds)?;
            let secs = start.elapsed().as_secs_f64();
            if !self.json {
                let status = if rep.passed() { "pass" } else { "FAIL" };
                self.line(format!("{status:<4} {:<16} {:>5} instances {:>9} comparisons {secs:>7.2}s", r.id(), rep.instances, rep.comparisons))?;
            }
            let failure = rep.failure.as_ref().map(|(label, f)| {
                let detail = match f {
                    Failure::Counterexample(c) => counterexample_json(c),
                    other => json!(other.to_string()),
                };
                json!({ "rule": r.id(), "instance": label, "failure": detail })
            });
            if first_failure.is_none() {
                first_failure = failure.clone();
            }
            rows.push(json!({
                "rule": r.id(), "passed": rep.passed(), "instances": rep.instances,
                "comparisons": rep.comparisons, "seconds": secs, "failure": failure,
            }));
        }
        if self.json {
            self.emit_json(&json!(rows))?;
        }
        Ok(first_failure.map_or(Outcome::Pass, Outcome::Fail))
    }

    fn church_rosser(&mut self, states: usize) -> Result<Outcome, Usage> {
        // frames on fewer states embed with isolated worlds, which change none of the three views
        let r = church_rosser_sweep_exact(states)?;
        if self.json {
            self.emit_json(&json!(r))?;
        } else if r.holds() {
            self.line(format!("{} frames, equivalence holds ({} Church–Rosser)", r.frames, r.church_rosser_frames))?;
        } else {
            self.line(format!("{} frames, {} disagreements", r.frames, r.disagreements.len()))?;
        }
        match r.disagreements.first() {
            None => Ok(Outcome::Pass),
            Some(d) => Ok(Outcome::Fail(json!(d))),
        }
    }

    fn translate(&mut self, term: &str) -> Result<Outcome, Usage> {
        let t = parse_term(term)?;
        let st = standard_translation(&t);
        let lp = mml_to_lplus(&st);
        if self.json {
            self.emit_json(&json!({ "term": t.to_string(), "st": st.to_string(), "lplus": lp.to_string() }))?;
        } else {
            self.line(format!("term: {t}"))?;
            self.line(format!("ST:   {st}"))?;
            self.line(format!("L+:   {lp}"))?;
        }
        Ok(Outcome::Pass)
    }
}
