//! Command-line surface.

use std::borrow::Cow;
use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::coefficient::Coefficient;
use crate::conservation::{self, Current, EquivalenceWitness, Multiplier};
use crate::embedding::{self, SymmetryHypothesis};
use crate::error::{Error, Result};
use crate::extension::{self, ExtensionPlan};
use crate::frontend::document::{parse_rational, Document};
use crate::frontend::registry;
use crate::jet::{self, Characteristic};
use crate::noether::{self, Shell, SymmetryWitness};
use crate::report::{Check, Report};
use crate::symbol::Symbol;

#[derive(Parser, Debug)]
#[command(name = "conslaw", version, about = "Exact checks for conservation laws, multipliers and adjoint-symmetries")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Default)]
struct Common {
    /// System document: a TOML path or the name of a shipped example.
    #[arg(long)]
    system: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    q: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    current: Option<String>,
    #[arg(long = "char", allow_hyphen_values = true)]
    characteristic: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    omega: Option<String>,
    /// Substitute a value for a constant or parameter, e.g. `p=1`.
    #[arg(long = "set", value_name = "NAME=VALUE")]
    set: Vec<String>,
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Euler operator of F q vanishes identically.
    Determining(Common),
    /// F q - D_mu J^mu vanishes identically.
    VerifyPair(Common),
    /// The multiplier named by --q solves the adjoint-symmetry equations.
    Adjoint(Common),
    /// The characteristic maps solutions to solutions.
    Symmetry(Common),
    /// Current of the auxiliary Lagrangian, optionally with rho := q.
    EmbedCurrent(Common),
    /// Product-rule split of the embedding current of F q.
    Split(Common),
    /// Certificate relating the embedding current to the variation of J.
    Theorem1 {
        #[command(flatten)]
        common: Common,
        /// Only require that the variation of F q vanishes on shell.
        #[arg(long)]
        product_only: bool,
    },
    /// Extended system with the parameters promoted to fields.
    Extend {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',')]
        params: Vec<String>,
    },
    /// Lift a parameterized pair to the extended system.
    Lift {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',')]
        params: Vec<String>,
    },
    /// Embedding current of the lifted multiplier at constant parameters.
    Theorem2 {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',')]
        params: Vec<String>,
    },
    /// Sufficient conditions for the variation of J to be a multiple of J.
    Scc {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',')]
        params: Vec<String>,
    },
    /// Lift, projection and embedding on the trivial extension.
    TrivialExtend(Common),
    /// Insert a scaling parameter into F, q and J.
    InsertParameter {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true, default_value = "1")]
        eta: String,
        #[arg(long, allow_hyphen_values = true, default_value = "0")]
        rho: String,
        #[arg(long, default_value = "g")]
        g: String,
    },
    /// Scaling weight of a current (or of a multiplier with --q).
    Weight(Common),
    /// Equivalence of two currents, with an optional witness.
    Equiv {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        current2: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        bar: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        hat: Option<String>,
    },
    /// Noether current of a Lagrangian symmetry.
    Noether {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        lagrangian: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        k: Option<String>,
        /// Check the symmetry modulo the solved form.
        #[arg(long)]
        on_shell: bool,
    },
    /// Integration by parts of the variation of an expression.
    Ibp {
        #[command(flatten)]
        common: Common,
        /// Lagrangian name, or an expression in the system's signature.
        #[arg(long, allow_hyphen_values = true)]
        lagrangian: Option<String>,
    },
    /// Shipped examples.
    Examples {
        #[command(subcommand)]
        action: ExamplesAction,
    },
}

#[derive(Subcommand, Debug)]
enum ExamplesAction {
    /// Run every applicable check on an example, or on all of them.
    Run {
        name: String,
        #[arg(long)]
        json: bool,
    },
    /// List the shipped examples.
    List,
}

/// Exit code and rendered output of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses `argv` (without the program name) and runs the command.
pub fn run_command<I, S>(argv: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let args = std::iter::once(std::ffi::OsString::from("conslaw")).chain(argv.into_iter().map(Into::into));
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let json = match &cli.command {
        Command::Examples { action: ExamplesAction::Run { json, .. } } => *json,
        Command::Examples { .. } => false,
        c => common(c).json,
    };
    let start = Instant::now();
    match execute(&cli.command) {
        Ok((prefix, mut report)) => {
            report.millis = start.elapsed().as_millis();
            let body = if json {
                format!("{}\n", serde_json::to_string_pretty(&report.to_json()).expect("json"))
            } else {
                report.to_string()
            };
            let stdout = match prefix {
                Some(p) if !json => format!("{p}\n{body}"),
                _ => body,
            };
            Outcome { code: if report.passed() { 0 } else { 1 }, stdout, stderr: String::new() }
        }
        Err(e) => {
            let code = if matches!(e, Error::Precondition(_)) { 1 } else { 2 };
            Outcome { code, stdout: String::new(), stderr: format!("error: {e}\n") }
        }
    }
}

fn common(c: &Command) -> &Common {
    match c {
        Command::Determining(x)
        | Command::VerifyPair(x)
        | Command::Adjoint(x)
        | Command::Symmetry(x)
        | Command::EmbedCurrent(x)
        | Command::Split(x)
        | Command::TrivialExtend(x)
        | Command::Weight(x) => x,
        Command::Theorem1 { common, .. }
        | Command::Extend { common, .. }
        | Command::Lift { common, .. }
        | Command::Theorem2 { common, .. }
        | Command::Scc { common, .. }
        | Command::InsertParameter { common, .. }
        | Command::Equiv { common, .. }
        | Command::Noether { common, .. }
        | Command::Ibp { common, .. } => common,
        Command::Examples { .. } => unreachable!("examples has its own flags"),
    }
}

fn load(c: &Common) -> Result<Document> {
    let name = c.system.as_deref().ok_or_else(|| Error::UnknownIdentifier("--system is required".into()))?;
    let doc = if Path::new(name).is_file() {
        Document::load(Path::new(name))?
    } else if let Some(src) = registry::source(Path::new(name).file_name().and_then(|s| s.to_str()).unwrap_or(name)) {
        Document::parse(src)?
    } else {
        return Err(Error::Io(format!("{name}: no such file or shipped example")));
    };
    let mut values = BTreeMap::new();
    for s in &c.set {
        let (k, v) = s
            .split_once('=')
            .ok_or_else(|| Error::Syntax { pos: 0, msg: format!("--set expects NAME=VALUE, found {s:?}") })?;
        let v = parse_rational(v).ok_or_else(|| Error::Syntax { pos: 0, msg: format!("invalid rational {v:?}") })?;
        values.insert(Symbol::new(k.trim()), v);
    }
    doc.specialize(&values)
}

fn need<'a>(v: &'a Option<String>, flag: &str) -> Result<&'a str> {
    v.as_deref().ok_or_else(|| Error::UnknownIdentifier(format!("{flag} is required")))
}

fn multiplier<'a>(doc: &'a Document, c: &Common) -> Result<Cow<'a, Multiplier>> {
    doc.resolve_multiplier(need(&c.q, "--q")?)
}

fn current<'a>(doc: &'a Document, c: &Common) -> Result<Cow<'a, Current>> {
    doc.resolve_current(need(&c.current, "--current")?)
}

fn characteristic<'a>(doc: &'a Document, c: &Common) -> Result<Cow<'a, Characteristic>> {
    doc.resolve_characteristic(need(&c.characteristic, "--char")?)
}

fn params(doc: &Document, names: &[String], delta: Option<&Characteristic>) -> Vec<Symbol> {
    if !names.is_empty() {
        return names.iter().map(|n| Symbol::new(n.trim())).collect();
    }
    let all = doc.system.sig.parameters.clone();
    match delta {
        Some(d) if d.iter().any(|(f, _)| all.contains(f)) => all,
        Some(_) => Vec::new(),
        None => all,
    }
}

fn coefficient(text: &str) -> Result<Coefficient> {
    parse_rational(text)
        .map(Coefficient::rational)
        .ok_or_else(|| Error::Syntax { pos: 0, msg: format!("invalid rational {text:?}") })
}

type Executed = (Option<String>, Report);

fn execute(cmd: &Command) -> Result<Executed> {
    let plain = |r: Report| Ok((None, r));
    match cmd {
        Command::Determining(c) => {
            let doc = load(c)?;
            plain(conservation::determining_report(&doc.system, &*multiplier(&doc, c)?)?)
        }
        Command::VerifyPair(c) => {
            let doc = load(c)?;
            plain(conservation::verify_multiplier_current_pair(
                &doc.system,
                &*multiplier(&doc, c)?,
                &*current(&doc, c)?,
            )?)
        }
        Command::Adjoint(c) => {
            let doc = load(c)?;
            plain(embedding::check_adjoint_symmetry(&doc.system, &*multiplier(&doc, c)?)?)
        }
        Command::Symmetry(c) => {
            let doc = load(c)?;
            let delta = characteristic(&doc, c)?;
            let delta = &*delta;
            let ps = params(&doc, &[], Some(delta));
            if ps.is_empty() {
                plain(embedding::check_system_symmetry(&doc.system, delta)?)
            } else {
                let ext = extension::extend_system(&doc.system, &ps)?;
                plain(embedding::check_system_symmetry(&ext.system, delta)?)
            }
        }
        Command::EmbedCurrent(c) => {
            let doc = load(c)?;
            let rho = c.q.as_ref().map(|_| multiplier(&doc, c)).transpose()?;
            let j = embedding::embedding_current(&doc.system, rho.as_deref(), &*characteristic(&doc, c)?)?;
            let mut r = Report::new("embed-current");
            r.output("j", &j);
            plain(r)
        }
        Command::Split(c) => {
            let doc = load(c)?;
            let s =
                embedding::split_embedding_current(&doc.system, &*multiplier(&doc, c)?, &*characteristic(&doc, c)?)?;
            let mut r = Report::new("split")
                .with_check(Check::zero("j_Fq - j_Fq~ - j_F~q = 0", s.full.sub(&s.frozen_q).sub(&s.frozen_f).0));
            r.output("j_Fq", &s.full);
            r.output("j_Fq~", &s.frozen_q);
            r.output("j_F~q", &s.frozen_f);
            plain(r)
        }
        Command::Theorem1 { common: c, product_only } => {
            let doc = load(c)?;
            let hyp = if *product_only { SymmetryHypothesis::ProductOnly } else { SymmetryHypothesis::System };
            plain(extension::theorem1_with_parameters(
                &doc.system,
                &*multiplier(&doc, c)?,
                &*current(&doc, c)?,
                &*characteristic(&doc, c)?,
                hyp,
            )?)
        }
        Command::Extend { common: c, params: ps } => {
            let doc = load(c)?;
            let ext = extension::extend_system(&doc.system, &params(&doc, ps, None))?;
            let mut r = Report::new("extend");
            r.output("fields", join(&ext.system.sig.fields));
            for (l, e) in &ext.system.equations {
                r.output(l.as_str(), e);
            }
            if let Some(s) = &ext.system.solved {
                for rule in s.rules() {
                    r.output(
                        format!("{}", crate::expr::Atom::Jet(rule.field.clone(), rule.lhs.clone())),
                        format!("-> {}", rule.rhs),
                    );
                }
            }
            plain(r)
        }
        Command::Lift { common: c, params: ps } => {
            let doc = load(c)?;
            let ext = extension::extend_system(&doc.system, &params(&doc, ps, None))?;
            let (_, _, r) =
                extension::lift_parameterized_multiplier(&ext, &*multiplier(&doc, c)?, &*current(&doc, c)?)?;
            plain(r)
        }
        Command::Theorem2 { common: c, params: ps } => {
            let doc = load(c)?;
            let delta = characteristic(&doc, c)?;
            let delta = &*delta;
            let qn = need(&c.q, "--q")?;
            let jn = need(&c.current, "--current")?;
            let expectation = doc
                .theorem2
                .iter()
                .find(|t| t.q == qn && t.current == jn && Some(&t.characteristic) == c.characteristic.as_ref());
            if let (Some(t), true) = (expectation, ps.is_empty()) {
                return plain(registry::theorem2_checks(&doc, t)?);
            }
            let ext = extension::extend_system(&doc.system, &params(&doc, ps, Some(delta)))?;
            let (_, r) =
                extension::theorem2_current(&ext, &*doc.resolve_multiplier(qn)?, &*doc.resolve_current(jn)?, delta)?;
            plain(r)
        }
        Command::Scc { common: c, params: ps } => {
            let doc = load(c)?;
            let delta = characteristic(&doc, c)?;
            let delta = &*delta;
            let ext = extension::extend_system(&doc.system, &params(&doc, ps, Some(delta)))?;
            let omega = coefficient(need(&c.omega, "--omega")?)?;
            plain(extension::scc_check(&ext, &*multiplier(&doc, c)?, delta, &omega)?)
        }
        Command::TrivialExtend(c) => {
            let doc = load(c)?;
            let delta = c.characteristic.as_ref().map(|_| characteristic(&doc, c)).transpose()?;
            plain(registry::trivial_extension_checks(
                &doc.system,
                &*multiplier(&doc, c)?,
                &*current(&doc, c)?,
                delta.as_deref(),
            )?)
        }
        Command::InsertParameter { common: c, eta, rho, g } => {
            let doc = load(c)?;
            let plan = ExtensionPlan { eta: coefficient(eta)?, rho: coefficient(rho)?, g: Symbol::new(g) };
            let ins = extension::insert_parameter(&doc.system, &*multiplier(&doc, c)?, &*current(&doc, c)?, &plan)?;
            let mut r = ins.report;
            for (l, e) in &ins.system.equations {
                r.output(l.as_str(), e);
            }
            for (l, e) in ins.q.iter() {
                r.output(format!("q.{l}"), e);
            }
            r.output("J", &ins.j);
            plain(r)
        }
        Command::Weight(c) => {
            let doc = load(c)?;
            let delta = characteristic(&doc, c)?;
            let delta = &*delta;
            let sig = &doc.system.sig;
            let w = match (&c.current, &c.q) {
                (Some(_), _) => conservation::current_weight(&doc.system, &*current(&doc, c)?, delta),
                (None, Some(_)) => {
                    let es: Vec<_> = multiplier(&doc, c)?.iter().map(|(_, e)| e.clone()).collect();
                    if es.iter().all(|e| e.is_zero()) {
                        None
                    } else {
                        jet::scaling_weight_all(sig, &es, delta)
                    }
                }
                (None, None) => return Err(Error::UnknownIdentifier("--current or --q is required".into())),
            };
            let mut r = Report::new("weight").with_check(Check::flag("homogeneous", w.is_some()));
            let text = w.map_or_else(|| "none".to_string(), |w| w.to_string());
            r.output("weight", &text);
            Ok((Some(text), r))
        }
        Command::Equiv { common: c, current2, bar, hat } => {
            let doc = load(c)?;
            let j1 = current(&doc, c)?;
            let j2 = doc.resolve_current(need(current2, "--current2")?)?;
            let zero = Current::zero(doc.system.dim());
            let witness = match (bar, hat) {
                (None, None) => None,
                _ => Some(EquivalenceWitness {
                    bar: bar
                        .as_deref()
                        .map(|n| doc.resolve_current(n).map(Cow::into_owned))
                        .transpose()?
                        .unwrap_or_else(|| zero.clone()),
                    hat: hat
                        .as_deref()
                        .map(|n| doc.resolve_current(n).map(Cow::into_owned))
                        .transpose()?
                        .unwrap_or(zero),
                }),
            };
            plain(conservation::currents_equivalent(&doc.system, &j1, &j2, witness.as_ref())?)
        }
        Command::Noether { common: c, lagrangian, k, on_shell } => {
            let doc = load(c)?;
            let l = doc.lagrangian(need(lagrangian, "--lagrangian")?)?;
            let w = SymmetryWitness {
                delta: characteristic(&doc, c)?.into_owned(),
                k: doc.resolve_current(need(k, "--k")?)?.into_owned(),
            };
            let shell = if *on_shell { Shell::On(doc.system.solved()?) } else { Shell::Off };
            let (cur, mut r) = noether::noether_current(&doc.system.sig, l, &w, shell)?;
            if let Some(name) = &c.current {
                r.push(Check::zero(format!("J - {name} = 0"), cur.sub(&*doc.resolve_current(name)?).0));
            }
            plain(r)
        }
        Command::Ibp { common: c, lagrangian } => {
            let doc = load(c)?;
            let text = need(lagrangian, "--lagrangian")?;
            let l = match doc.lagrangian(text) {
                Ok(l) => l.clone(),
                Err(_) => doc.expr(text)?,
            };
            let delta = characteristic(&doc, c)?;
            let delta = &*delta;
            let sig = &doc.system.sig;
            let (el, j) = noether::variation_split(sig, &l, delta);
            let mut r = Report::new("ibp").with_check(Check::zero(
                "δL - E(L) δu - D_mu j^mu = 0",
                [jet::variation(sig, &l, delta) - &el - jet::divergence(sig, &j.0)],
            ));
            r.output("E(L) δu", &el);
            r.output("j", &j);
            plain(r)
        }
        Command::Examples { action } => match action {
            ExamplesAction::List => {
                let mut r = Report::new("examples list");
                for n in registry::names() {
                    let doc = registry::load(n)?;
                    r.output(n, doc.notes);
                }
                plain(r)
            }
            ExamplesAction::Run { name, .. } => {
                if name == "all" {
                    let mut r = Report::new("examples run all");
                    for n in registry::names() {
                        r.absorb(n, registry::run(n)?);
                    }
                    plain(r)
                } else {
                    plain(registry::run(name)?)
                }
            }
        },
    }
}

fn join(names: &[Symbol]) -> String {
    names.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(", ")
}
