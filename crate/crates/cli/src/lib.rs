//! Command-line front end. `dispatch` routes the subcommands {parse, embed,
//! check, models, score, network, concept, search} and returns the process
//! exit code: 0 success, 1 domain failure, 2 unknown-verdict-dominated,
//! 64 usage, 65 data/format error.

pub mod corpus;
pub mod report;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use herm_core::adequacy::{self, ScoreCtx, UnknownPolicy, Weights};
use herm_core::argnet::role_fulfillment;
use herm_core::concept::{count_up_to_iso, intended_models, ontology_fit};
use herm_core::correctness::{check_correctness, CheckOptions, Overall};
use herm_core::engine;
use herm_core::{embed, normalize, parse, Budget, LogicSpec, ModalFormula, Reasoner, Term};

use corpus::{load, save, CandidateSec, LoadedDoc, PostulateSec};
use report::{fmt_f, machine_section};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_UNKNOWN: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_DATA: i32 = 65;

#[derive(Parser)]
#[command(
    name = "herm",
    version,
    about = "Search for logically correct, inferentially adequate formalizations of argument networks"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug, Clone, Default)]
struct BudgetArgs {
    /// Max worlds in countermodel search
    #[arg(long)]
    max_worlds: Option<usize>,
    /// Max individuals in countermodel search
    #[arg(long)]
    max_individuals: Option<usize>,
    /// Max tableau world depth
    #[arg(long)]
    depth: Option<usize>,
    /// Per-query wall clock limit
    #[arg(long)]
    timeout_ms: Option<u64>,
}

impl BudgetArgs {
    fn apply(&self, base: Budget) -> Budget {
        let mut b = corpus::env_budget(base);
        if let Some(v) = self.max_worlds {
            b.max_worlds = v;
        }
        if let Some(v) = self.max_individuals {
            b.max_individuals = v;
        }
        if let Some(v) = self.depth {
            b.max_depth = v;
        }
        if let Some(v) = self.timeout_ms {
            b.timeout_ms = v;
        }
        b
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Validate a corpus file, or parse a single formula against it
    Parse {
        file: PathBuf,
        /// Parse one formula instead of validating the whole file
        #[arg(long)]
        formula: Option<String>,
        /// Dump the formula sections as TPTP thf lines
        #[arg(long)]
        emit_tptp: bool,
        /// Import formulas from a TPTP file against the corpus signature
        #[arg(long)]
        import_tptp: Option<PathBuf>,
    },
    /// Expand a surface formula into its HOL truth set
    Embed {
        file: PathBuf,
        #[arg(long)]
        formula: String,
        /// Logic spec, e.g. K, S4, KB:actualist, frames(refl,eucl):local
        #[arg(long, default_value = "K")]
        logic: String,
    },
    /// Correctness reports for formalized arguments
    Check {
        file: PathBuf,
        /// Check one argument only
        #[arg(long)]
        arg: Option<String>,
        /// Skip the circularity test
        #[arg(long)]
        no_circularity: bool,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Find a model of an argument's premises plus theory
    Models {
        file: PathBuf,
        #[arg(long)]
        arg: Option<String>,
        /// Ad-hoc formula set (repeatable)
        #[arg(long = "formula")]
        formulas: Vec<String>,
        #[arg(long, default_value = "K")]
        logic: String,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Adequacy tables per sentence and candidate
    Score {
        file: PathBuf,
        /// Treat unknown verdicts as reliability unknowns
        #[arg(long)]
        strict: bool,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Realized attack/support relations against the intended network
    Network {
        file: PathBuf,
        /// Spurious-edge penalty
        #[arg(long, default_value_t = 0.5)]
        lambda: f64,
        /// Write the DOT graph here instead of stdout
        #[arg(long)]
        dot: Option<PathBuf>,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Intended-model counts and ontology-fit metrics
    Concept { file: PathBuf },
    /// Run the annealing search over formalization assignments
    Search {
        file: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        iters: Option<u64>,
        #[arg(long)]
        t0: Option<f64>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        stagnation: Option<u64>,
        #[arg(long)]
        promote_min: Option<usize>,
        /// Write the per-iteration trace here
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Write the updated corpus document here
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        budget: BudgetArgs,
    },
}

/// Entry point shared by `main` and the test harness.
pub fn dispatch<W: Write, E: Write>(args: &[String], out: &mut W, err: &mut E) -> i32 {
    let mut argv = vec!["herm".to_string()];
    argv.extend(args.iter().cloned());
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    return EXIT_OK;
                }
                _ => EXIT_USAGE,
            };
            let _ = write!(err, "{e}");
            let value = json!({
                "errors": [{ "location": "usage", "message": e.to_string() }]
            });
            let _ = write!(err, "{}", machine_section(&value));
            return code;
        }
    };
    match run_cmd(cli.cmd, out) {
        Ok(code) => code,
        Err(CmdError::Data(errors)) => {
            let _ = write!(out, "{}", report::error_section(&errors));
            EXIT_DATA
        }
        Err(CmdError::Message(msg)) => {
            let _ = writeln!(out, "error: {msg}");
            let value = json!({ "errors": [{ "location": "-", "message": msg }] });
            let _ = write!(out, "{}", machine_section(&value));
            EXIT_DATA
        }
    }
}

enum CmdError {
    Data(Vec<corpus::IntegrityError>),
    Message(String),
}

impl From<Vec<corpus::IntegrityError>> for CmdError {
    fn from(v: Vec<corpus::IntegrityError>) -> Self {
        CmdError::Data(v)
    }
}

impl From<String> for CmdError {
    fn from(m: String) -> Self {
        CmdError::Message(m)
    }
}

fn run_cmd<W: Write>(cmd: Cmd, out: &mut W) -> Result<i32, CmdError> {
    match cmd {
        Cmd::Parse {
            file,
            formula,
            emit_tptp,
            import_tptp,
        } => cmd_parse(
            &file,
            formula.as_deref(),
            emit_tptp,
            import_tptp.as_deref(),
            out,
        ),
        Cmd::Embed {
            file,
            formula,
            logic,
        } => cmd_embed(&file, &formula, &logic, out),
        Cmd::Check {
            file,
            arg,
            no_circularity,
            budget,
        } => cmd_check(&file, arg.as_deref(), no_circularity, &budget, out),
        Cmd::Models {
            file,
            arg,
            formulas,
            logic,
            budget,
        } => cmd_models(&file, arg.as_deref(), &formulas, &logic, &budget, out),
        Cmd::Score {
            file,
            strict,
            budget,
        } => cmd_score(&file, strict, &budget, out),
        Cmd::Network {
            file,
            lambda,
            dot,
            budget,
        } => cmd_network(&file, lambda, dot.as_deref(), &budget, out),
        Cmd::Concept { file } => cmd_concept(&file, out),
        Cmd::Search {
            file,
            seed,
            iters,
            t0,
            alpha,
            stagnation,
            promote_min,
            trace,
            out: out_path,
            budget,
        } => cmd_search(
            &file,
            SearchOverrides {
                seed,
                iters,
                t0,
                alpha,
                stagnation,
                promote_min,
                trace,
                out: out_path,
                budget,
            },
            out,
        ),
    }
}

fn wr<W: Write>(out: &mut W, s: &str) {
    let _ = out.write_all(s.as_bytes());
}

// ---------------------------------------------------------------------------

fn cmd_parse<W: Write>(
    file: &Path,
    formula: Option<&str>,
    emit_tptp: bool,
    import_tptp: Option<&Path>,
    out: &mut W,
) -> Result<i32, CmdError> {
    let doc = load(file)?;
    if let Some(src) = formula {
        let term = parse(src, &doc.sig).map_err(|e| e.to_string())?;
        let ty = term.ty().map_err(|e| e.to_string())?;
        let normal = normalize(&term);
        wr(out, &format!("formula: {term}\n"));
        wr(out, &format!("type:    {ty}\n"));
        wr(out, &format!("normal:  {normal}\n"));
        wr(
            out,
            &machine_section(&json!({
                "formula": term.to_string(),
                "type": ty.to_string(),
                "normal": normal.to_string(),
                "symbols": term.symbol_count(),
                "free": term.free_symbols().into_iter().collect::<Vec<_>>(),
            })),
        );
        return Ok(EXIT_OK);
    }
    if let Some(tptp_path) = import_tptp {
        return cmd_import_tptp(&doc, tptp_path, out);
    }
    if emit_tptp {
        for (sid, pool) in &doc.candidates {
            for (i, term) in pool.iter().enumerate() {
                wr(out, &format!("thf({sid}_{i}, hypothesis, {term}).\n"));
            }
        }
        for p in &doc.postulates {
            wr(out, &format!("thf({}, definition, {}).\n", p.label, p.term));
        }
        return Ok(EXIT_OK);
    }
    wr(
        out,
        &format!(
            "{}: ok ({} sentences, {} candidates, {} arguments, {} postulates, {} edges)\n",
            file.display(),
            doc.sentences.len(),
            doc.candidates.values().map(|p| p.len()).sum::<usize>(),
            doc.arguments.len(),
            doc.postulates.len(),
            doc.network.intended.len(),
        ),
    );
    wr(
        out,
        &machine_section(&json!({
            "sentences": doc.sentences.len(),
            "candidates": doc.candidates.values().map(|p| p.len()).sum::<usize>(),
            "arguments": doc.arguments.len(),
            "postulates": doc.postulates.len(),
            "edges": doc.network.intended.len(),
            "concept": doc.concept.is_some(),
        })),
    );
    Ok(EXIT_OK)
}

/// Reads `thf(label, role, formula).` entries produced by `--emit-tptp` (or
/// compatible tools) and validates them against the corpus signature.
fn cmd_import_tptp<W: Write>(doc: &LoadedDoc, path: &Path, out: &mut W) -> Result<i32, CmdError> {
    let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
    let mut count = 0usize;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let inner = line
            .strip_prefix("thf(")
            .and_then(|r| r.strip_suffix(")."))
            .ok_or_else(|| format!("line {}: not a thf(...) entry", lineno + 1))?;
        let mut parts = inner.splitn(3, ',');
        let label = parts.next().unwrap_or("").trim().to_string();
        let role = parts.next().unwrap_or("").trim().to_string();
        let formula = parts
            .next()
            .ok_or_else(|| format!("line {}: missing formula", lineno + 1))?
            .trim();
        let term = parse(formula, &doc.sig).map_err(|e| format!("line {}: {e}", lineno + 1))?;
        wr(out, &format!("{label} [{role}]: {term}\n"));
        count += 1;
    }
    wr(out, &format!("imported {count} formula(s)\n"));
    wr(out, &machine_section(&json!({ "imported": count })));
    Ok(EXIT_OK)
}

fn cmd_embed<W: Write>(
    file: &Path,
    formula: &str,
    logic: &str,
    out: &mut W,
) -> Result<i32, CmdError> {
    let doc = load(file)?;
    let spec: LogicSpec = logic
        .parse()
        .map_err(|e: herm_core::logic::LogicSpecError| e.to_string())?;
    let term = parse(formula, &doc.sig).map_err(|e| e.to_string())?;
    let mf = ModalFormula::new(term.clone(), &doc.sig).map_err(|e| e.to_string())?;
    let result = embed(&mf, &spec).map_err(|e| e.to_string())?;
    let valid = herm_core::validize(&result.hol, spec.mode).map_err(|e| e.to_string())?;
    wr(out, &format!("surface: {term}\n"));
    wr(out, &format!("logic:   {spec}\n"));
    wr(out, &format!("hol:     {}\n", result.hol));
    wr(out, &format!("closed:  {valid}\n"));
    if result.frame_theory.is_empty() {
        wr(out, "frame theory: (empty)\n");
    } else {
        wr(out, "frame theory:\n");
        for ax in &result.frame_theory {
            wr(out, &format!("  {}: {}\n", ax.label, ax.term));
        }
    }
    for (name, ty) in &result.aux {
        wr(out, &format!("aux: {name} : {ty}\n"));
    }
    wr(
        out,
        &machine_section(&json!({
            "surface": term.to_string(),
            "logic": spec.to_string(),
            "hol": result.hol.to_string(),
            "closed": valid.to_string(),
            "frame_theory": result.frame_theory.iter()
                .map(|ax| json!({"label": ax.label, "formula": ax.term.to_string()}))
                .collect::<Vec<_>>(),
            "aux": result.aux.iter()
                .map(|(n, t)| json!({"name": n, "type": t.to_string()}))
                .collect::<Vec<_>>(),
        })),
    );
    Ok(EXIT_OK)
}

fn cmd_check<W: Write>(
    file: &Path,
    only: Option<&str>,
    no_circularity: bool,
    budget_args: &BudgetArgs,
    out: &mut W,
) -> Result<i32, CmdError> {
    let doc = load(file)?;
    let budget = budget_args.apply(doc.engine.budget.clone());
    let opts = CheckOptions {
        check_circularity: !no_circularity,
        check_idle: true,
    };
    let ids: Vec<String> = match only {
        Some(id) => {
            if !doc.arguments.contains_key(id) {
                return Err(format!("unknown argument `{id}`").into());
            }
            vec![id.to_string()]
        }
        None => doc.arguments.keys().cloned().collect(),
    };
    let mut reasoner = Reasoner::new();
    let mut text = String::new();
    let mut machine = Vec::new();
    let mut worst = Overall::Pass;
    for id in &ids {
        let darg = &doc.arguments[id];
        let arg = doc
            .realized_argument(id)
            .ok_or_else(|| format!("argument `{id}` has unformalized sentences"))?;
        let theory = doc.theory_for(darg);
        let r = check_correctness(&arg, &theory, opts, &mut reasoner, &doc.sig, &budget)
            .map_err(|e| e.to_string())?;
        report::render_correctness(&mut text, &r, &arg.spec.name);
        machine.push(report::correctness_json(&r));
        worst = match (worst, r.overall) {
            (_, Overall::Fail) | (Overall::Fail, _) => Overall::Fail,
            (Overall::Unknown, _) | (_, Overall::Unknown) => Overall::Unknown,
            _ => Overall::Pass,
        };
    }
    report::render_stats(&mut text, &reasoner.stats);
    wr(out, &text);
    wr(out, &machine_section(&json!({ "reports": machine })));
    Ok(match worst {
        Overall::Pass => EXIT_OK,
        Overall::Fail => EXIT_FAIL,
        Overall::Unknown => EXIT_UNKNOWN,
    })
}

fn cmd_models<W: Write>(
    file: &Path,
    arg: Option<&str>,
    formulas: &[String],
    logic: &str,
    budget_args: &BudgetArgs,
    out: &mut W,
) -> Result<i32, CmdError> {
    let doc = load(file)?;
    let budget = budget_args.apply(doc.engine.budget.clone());
    let mut reasoner = Reasoner::new();
    let (terms, spec) = if let Some(id) = arg {
        let darg = doc
            .arguments
            .get(id)
            .ok_or_else(|| format!("unknown argument `{id}`"))?;
        let realized = doc
            .realized_argument(id)
            .ok_or_else(|| format!("argument `{id}` has unformalized sentences"))?;
        let mut terms: Vec<Term> = realized.premises.iter().map(|p| p.term.clone()).collect();
        terms.extend(doc.theory_for(darg).iter().map(|p| p.term.clone()));
        (terms, realized.spec.clone())
    } else {
        let spec: LogicSpec = logic
            .parse()
            .map_err(|e: herm_core::logic::LogicSpecError| e.to_string())?;
        let mut terms = Vec::new();
        for f in formulas {
            terms.push(parse(f, &doc.sig).map_err(|e| e.to_string())?);
        }
        (terms, spec)
    };
    if terms.is_empty() {
        return Err("nothing to check: pass --arg or --formula"
            .to_string()
            .into());
    }
    let verdict = reasoner
        .consistent(&terms, &spec, &doc.sig, &budget)
        .map_err(|e| e.to_string())?;
    let code = match &verdict {
        herm_core::SatVerdict::Sat(m) => {
            wr(out, &format!("sat {}\n{m}", m.id()));
            EXIT_OK
        }
        herm_core::SatVerdict::Unsat(p) => {
            wr(out, &format!("unsat {}\n", p.id()));
            EXIT_FAIL
        }
        herm_core::SatVerdict::Unknown(r) => {
            wr(out, &format!("unknown ({r})\n"));
            EXIT_UNKNOWN
        }
    };
    wr(
        out,
        &machine_section(&json!({
            "verdict": verdict.short(),
            "cert": report::sat_cert(&verdict),
            "logic": spec.to_string(),
        })),
    );
    Ok(code)
}

fn doc_arg_specs(doc: &LoadedDoc) -> BTreeMap<String, LogicSpec> {
    doc.arguments
        .iter()
        .map(|(id, a)| {
            (
                id.clone(),
                a.logics.first().cloned().unwrap_or_else(LogicSpec::k),
            )
        })
        .collect()
}

fn doc_corpus(doc: &LoadedDoc) -> adequacy::Corpus {
    adequacy::Corpus {
        sentences: doc.sentences.clone(),
        arguments: doc
            .arguments
            .iter()
            .map(|(id, a)| {
                (
                    id.clone(),
                    adequacy::CorpusArgument {
                        premises: a.premises.clone(),
                        conclusion: a.conclusion.clone(),
                        tag: a.tag,
                    },
                )
            })
            .collect(),
    }
}

fn cmd_score<W: Write>(
    file: &Path,
    strict: bool,
    budget_args: &BudgetArgs,
    out: &mut W,
) -> Result<i32, CmdError> {
    let doc = load(file)?;
    let budget = budget_args.apply(doc.engine.budget.clone());
    let corpus = doc_corpus(&doc);
    let arg_specs = doc_arg_specs(&doc);
    let theory: Vec<Term> = doc
        .postulates
        .iter()
        .filter(|p| doc.settled.contains(&p.label))
        .map(|p| p.term.clone())
        .collect();
    let weights = Weights::default();
    let mut reasoner = Reasoner::new();

    let mut text = String::new();
    let mut machine = BTreeMap::new();
    let mut any_violation = false;
    let mut any_unknown = false;

    for (sid, pool) in &doc.candidates {
        let max_pool = pool.iter().map(|t| t.symbol_count()).max().unwrap_or(0);
        text.push_str(&format!("sentence {sid}: {}\n", doc.sentences[sid]));
        text.push_str(&format!(
            "   {:<40} {:<8} {:>6} {:>6} {:>10}\n",
            "candidate", "reliable", "amb", "syms", "aggregate"
        ));
        let selected_idx = doc.selected.get(sid).copied().unwrap_or(0);
        let mut rows = Vec::new();
        for (i, cand) in pool.iter().enumerate() {
            // score the pool candidate in place of the selection
            let mut fmap = adequacy::FormalizationMap::default();
            for (other, other_pool) in &doc.candidates {
                let idx = if other == sid {
                    i
                } else {
                    doc.selected.get(other).copied().unwrap_or(0)
                };
                fmap.0
                    .insert(other.clone(), (other_pool[idx].clone(), LogicSpec::k()));
            }
            let ctx = ScoreCtx {
                corpus: &corpus,
                fmap: &fmap,
                arg_specs: &arg_specs,
                theory: &theory,
                sig: &doc.sig,
                budget: &budget,
                policy: if strict {
                    UnknownPolicy::Strict
                } else {
                    UnknownPolicy::Charitable
                },
                grammar_refs: None,
            };
            let score = adequacy::score_sentence(sid, &ctx, max_pool, &weights, &mut reasoner)
                .map_err(|e| e.to_string())?;
            let selected = i == selected_idx;
            if selected {
                if score.reliable == adequacy::Reliable::No {
                    any_violation = true;
                }
                if score.reliable == adequacy::Reliable::Unknown {
                    any_unknown = true;
                }
            }
            report::render_adequacy_row(&mut text, &cand.to_string(), selected, &score);
            rows.push(report::adequacy_json(&cand.to_string(), selected, &score));
        }
        machine.insert(sid.clone(), rows);
    }
    report::render_stats(&mut text, &reasoner.stats);
    wr(out, &text);
    wr(out, &machine_section(&json!({ "sentences": machine })));
    Ok(if any_violation {
        EXIT_FAIL
    } else if any_unknown {
        EXIT_UNKNOWN
    } else {
        EXIT_OK
    })
}

fn cmd_network<W: Write>(
    file: &Path,
    lambda: f64,
    dot: Option<&Path>,
    budget_args: &BudgetArgs,
    out: &mut W,
) -> Result<i32, CmdError> {
    let doc = load(file)?;
    let budget = budget_args.apply(doc.engine.budget.clone());
    let theory: Vec<Term> = doc
        .postulates
        .iter()
        .filter(|p| doc.settled.contains(&p.label))
        .map(|p| p.term.clone())
        .collect();
    let mut args = BTreeMap::new();
    for id in &doc.network.nodes {
        let arg = doc
            .realized_argument(id)
            .ok_or_else(|| format!("argument `{id}` has unformalized sentences"))?;
        args.insert(id.clone(), arg);
    }
    let mut reasoner = Reasoner::new();
    let r = role_fulfillment(
        &doc.network,
        &args,
        &theory,
        lambda,
        &mut reasoner,
        &doc.sig,
        &budget,
    )
    .map_err(|e| e.to_string())?;
    let mut text = String::new();
    report::render_network(&mut text, &r);
    report::render_stats(&mut text, &reasoner.stats);
    wr(out, &text);
    let dot_text = report::network_dot(&r, &doc.network.nodes);
    match dot {
        Some(path) => std::fs::write(path, &dot_text).map_err(|e| e.to_string())?,
        None => wr(out, &dot_text),
    }
    wr(out, &machine_section(&report::network_json(&r)));
    let all_realized = r.intended.iter().all(|e| e.realized) && r.spurious.is_empty();
    Ok(if all_realized { EXIT_OK } else { EXIT_FAIL })
}

fn cmd_concept<W: Write>(file: &Path, out: &mut W) -> Result<i32, CmdError> {
    let doc = load(file)?;
    let Some(concept) = &doc.concept else {
        return Err("document has no [concept] section".to_string().into());
    };
    let k = &concept.commitment;
    let intended = intended_models(k).map_err(|e| e.to_string())?;
    let axioms: Vec<Term> = concept.axioms.iter().map(|(_, t)| t.clone()).collect();
    let fit = ontology_fit(&axioms, k).map_err(|e| e.to_string())?;
    let d = k.structure.domain.len();
    let iso = count_up_to_iso(&intended, d);

    let mut text = String::new();
    text.push_str(&format!(
        "conceptualization: |D|={} |W|={} relations={}\n",
        d,
        k.structure.worlds.len(),
        k.structure.relations.len()
    ));
    text.push_str(&format!("intended models: {}\n", fit.intended_count));
    match iso {
        Some(n) => text.push_str(&format!("intended models up to isomorphism: {n}\n")),
        None => text.push_str("intended models up to isomorphism: unevaluated (|D| > 3)\n"),
    }
    text.push_str(&format!("all models over D: {}\n", fit.all_model_count));
    text.push_str(&format!(
        "axioms: {} (models: {})\n",
        axioms.len(),
        fit.axiom_model_count
    ));
    text.push_str(&format!("soundness: {}\n", fmt_f(fit.soundness)));
    text.push_str(&format!("coverage:  {}\n", fmt_f(fit.coverage)));
    wr(out, &text);
    wr(
        out,
        &machine_section(&json!({
            "domain": d,
            "worlds": k.structure.worlds.len(),
            "intended": fit.intended_count,
            "intended_up_to_iso": iso,
            "all_models": fit.all_model_count,
            "axiom_models": fit.axiom_model_count,
            "soundness": report::json_f(fit.soundness),
            "coverage": report::json_f(fit.coverage),
        })),
    );
    Ok(EXIT_OK)
}

struct SearchOverrides {
    seed: Option<u64>,
    iters: Option<u64>,
    t0: Option<f64>,
    alpha: Option<f64>,
    stagnation: Option<u64>,
    promote_min: Option<usize>,
    trace: Option<PathBuf>,
    out: Option<PathBuf>,
    budget: BudgetArgs,
}

fn cmd_search<W: Write>(file: &Path, ov: SearchOverrides, out: &mut W) -> Result<i32, CmdError> {
    let doc = load(file)?;
    let mut config = doc.engine.clone();
    if let Some(v) = ov.seed {
        config.seed = v;
    }
    if let Some(v) = ov.iters {
        config.iterations = v;
    }
    if let Some(v) = ov.t0 {
        config.t0 = v;
    }
    if let Some(v) = ov.alpha {
        config.alpha = v;
    }
    if let Some(v) = ov.stagnation {
        config.stagnation = v;
    }
    if let Some(v) = ov.promote_min {
        config.promote_min_args = v;
    }
    config.budget = ov.budget.apply(config.budget);

    let inputs = doc.engine_inputs();
    let outcome = engine::run(&inputs, &config).map_err(|e| e.to_string())?;

    // report
    let accepted = outcome.trace.iter().filter(|r| r.accepted).count() as u64;
    let mut text = String::new();
    text.push_str(&format!("termination: {}\n", outcome.termination));
    text.push_str(&format!(
        "iterations: {} ({} accepted moves)\n",
        outcome.iterations_run, accepted
    ));
    text.push_str(&format!(
        "best objective: {}{}\n",
        fmt_f(outcome.best_eval.total),
        if outcome.best_eval.structural_max {
            " (structural maximum)"
        } else {
            ""
        }
    ));
    text.push_str("arguments:\n");
    for (aid, b) in &outcome.best_eval.per_argument {
        text.push_str(&format!(
            "  {aid}: validity={} consistency={} circular={} idle={} overall={} points={}\n",
            b.validity,
            b.consistency,
            b.circular,
            if b.idle.is_empty() {
                "-".to_string()
            } else {
                b.idle.iter().cloned().collect::<Vec<_>>().join(",")
            },
            b.overall,
            fmt_f(b.points),
        ));
    }
    text.push_str("sentences:\n");
    for (sid, s) in &outcome.best_eval.per_sentence {
        text.push_str(&format!(
            "  {sid}: choice={} reliable={} amb={} syms={} aggregate={}\n",
            outcome.best_state.choice.get(sid).copied().unwrap_or(0),
            s.reliable,
            fmt_f(s.ambitiousness),
            s.simplicity,
            fmt_f(s.aggregate),
        ));
    }
    if let Some(net) = &outcome.best_eval.network {
        report::render_network(&mut text, net);
    }
    if outcome.promoted.is_empty() {
        text.push_str("promoted postulates: none\n");
    } else {
        text.push_str(&format!(
            "promoted postulates: {}\n",
            outcome.promoted.join(", ")
        ));
    }
    report::render_stats(&mut text, &outcome.reasoner_stats);
    wr(out, &text);
    wr(
        out,
        &machine_section(&report::run_outcome_json(&outcome, accepted)),
    );

    if let Some(path) = &ov.trace {
        let mut trace_text = String::new();
        for rec in &outcome.trace {
            trace_text.push_str(&report::trace_line(rec));
            trace_text.push('\n');
        }
        std::fs::write(path, trace_text).map_err(|e| e.to_string())?;
    }
    if let Some(path) = &ov.out {
        let updated = updated_document(&doc, &outcome);
        std::fs::write(path, save(&updated)).map_err(|e| e.to_string())?;
    }

    Ok(if outcome.best_eval.structural_max {
        EXIT_OK
    } else {
        EXIT_FAIL
    })
}

/// The output document: same schema, with the best state's candidate marked
/// selected, promoted postulates marked settled, and each argument's chosen
/// logic moved to the front of its admissible list.
fn updated_document(doc: &LoadedDoc, outcome: &engine::RunOutcome) -> corpus::HermDoc {
    let mut raw = doc.raw.clone();
    // recompute per-sentence positions in file order
    let mut counters: BTreeMap<String, usize> = BTreeMap::new();
    let new_candidates: Vec<CandidateSec> = raw
        .candidates
        .iter()
        .map(|c| {
            let idx = counters.entry(c.sentence.clone()).or_insert(0);
            let this = *idx;
            *idx += 1;
            CandidateSec {
                sentence: c.sentence.clone(),
                formula: c.formula.clone(),
                selected: outcome
                    .best_state
                    .choice
                    .get(&c.sentence)
                    .map(|chosen| *chosen == this)
                    .unwrap_or(false),
            }
        })
        .collect();
    raw.candidates = new_candidates;
    raw.postulates = raw
        .postulates
        .iter()
        .map(|p| PostulateSec {
            label: p.label.clone(),
            formula: p.formula.clone(),
            settled: outcome.promoted.contains(&p.label),
        })
        .collect();
    for arg in &mut raw.arguments {
        if let Some(spec) = outcome.best_state.specs.get(&arg.id) {
            let name = spec.to_string();
            arg.logics.retain(|l| *l != name);
            arg.logics.insert(0, name);
        }
    }
    raw
}
