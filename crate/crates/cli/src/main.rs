//! Command-line workbench over the `treelogic` library.

use std::collections::BTreeMap;
use std::io::{self, BufRead, Write};
use std::path::Path;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use treelogic::composition::{forest_compose, fuse, FusionMap};
use treelogic::games::{GameConfig, GameState, Move, ParamFrame, Player, Solver};
use treelogic::proof::check_proof_json;
use treelogic::structure::{check_tree_axioms, frame_to_json, parse_structure, Frame};
use treelogic::syntax::{free_variables, quantifier_depth};
use treelogic::testkit::{GenConfig, Generator, Violation};
use treelogic::transforms::{
    axiom_instance, chi_finiteness, chi_successor, lfp_to_mso, parse_bindings, relativize,
    tc_to_lfp, AxiomId,
};
use treelogic::{eval, parse_formula, render_formula, Assignment, Formula, LogicId, Vocabulary};

#[derive(Parser)]
#[command(name = "treelogic", version, about = "Logics on finite ordered trees")]
struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Exit with status 1 when the answer is negative.
    #[arg(long, global = true)]
    strict: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct VocabArgs {
    /// Vocabulary document such as `["edge/2", "P/1"]`.
    #[arg(long)]
    vocab: Option<String>,
    /// Number of labels `P1..Pk` of the default tree vocabulary.
    #[arg(long, default_value_t = 2)]
    labels: usize,
}

impl VocabArgs {
    fn resolve(&self) -> Result<Vocabulary> {
        match &self.vocab {
            Some(v) => {
                let value: Value = serde_json::from_str(&read_input(v)?)?;
                Ok(Vocabulary::from_json(&value)?)
            }
            None => Ok(Vocabulary::tree(self.labels)),
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse a formula and report its shape.
    Parse {
        #[arg(short, long)]
        formula: String,
        #[command(flatten)]
        vocab: VocabArgs,
    },
    /// Evaluate a formula on a structure.
    Eval {
        #[arg(short, long)]
        structure: String,
        #[arg(short, long)]
        formula: String,
        /// Assignment such as `x=0,X={1,2}`.
        #[arg(short, long, default_value = "")]
        g: String,
    },
    /// Decide n-round game equivalence of two structures.
    Equiv {
        #[arg(long)]
        logic: LogicId,
        #[arg(short, long)]
        n: usize,
        left: String,
        right: String,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Play a game against the engine on the terminal.
    Play {
        #[arg(long)]
        logic: LogicId,
        #[arg(short, long)]
        n: usize,
        left: String,
        right: String,
        #[arg(long, value_enum, default_value_t = Role::Spoiler)]
        human: Role,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Translate TC into LFP, or TC and LFP into MSO.
    Translate {
        #[arg(long, value_enum)]
        to: Target,
        #[arg(short, long)]
        formula: String,
        #[command(flatten)]
        vocab: VocabArgs,
    },
    /// Relativize a formula to the set defined by a guard.
    Rel {
        #[arg(short, long)]
        formula: String,
        #[arg(long)]
        guard: String,
        #[arg(long)]
        var: String,
        #[command(flatten)]
        vocab: VocabArgs,
    },
    /// Fuse the disjoint union of structures, or compose forests.
    Fuse {
        /// Fusion map document `{"f": {symbol: formula}}`.
        #[arg(long, required_unless_present = "forest")]
        map: Option<String>,
        /// Single-node tree `t` of a forest composition.
        #[arg(long, conflicts_with = "map")]
        forest: Option<String>,
        /// Forest placed below `t`.
        #[arg(long, requires = "forest")]
        below: Option<String>,
        /// Forest placed to the right of `t`.
        #[arg(long, requires = "forest")]
        right: Option<String>,
        components: Vec<String>,
    },
    /// Instantiate an axiom schema, or check the tree axioms on a structure.
    Axiom {
        #[arg(long, required_unless_present = "check")]
        id: Option<AxiomId>,
        /// Meta-variable binding `name=value`, repeatable.
        #[arg(long = "bind", value_parser = parse_kv)]
        bind: Vec<(String, String)>,
        /// Check all tree axioms on this structure.
        #[arg(long, conflicts_with = "id")]
        check: Option<String>,
        #[command(flatten)]
        vocab: VocabArgs,
    },
    /// The finiteness sentence, optionally evaluated on a structure.
    Chi {
        #[arg(short, long)]
        structure: Option<String>,
        /// Print the successor formula instead.
        #[arg(long)]
        successor: bool,
    },
    /// Check a proof document.
    Prove { proof: String },
    /// Generate a random structure or formula.
    Gen {
        #[arg(long, value_enum, default_value_t = Kind::Tree)]
        kind: Kind,
        #[arg(long, default_value_t = 6)]
        size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        labels: usize,
        #[arg(long, default_value = "mso")]
        logic: LogicId,
        #[arg(long, default_value_t = 2)]
        depth: usize,
        /// Roots of a forest.
        #[arg(long, default_value_t = 2)]
        roots: usize,
        /// Admissible sets of a listed frame.
        #[arg(long, default_value_t = 4)]
        count: usize,
        /// Damage applied by `near-tree`, e.g. `ExtraRoot`.
        #[arg(long)]
        violation: Option<String>,
    },
}

#[derive(Args, Clone, Default)]
struct ParamArgs {
    /// Element parameters on the left, e.g. `0,2`.
    #[arg(long, value_delimiter = ',')]
    left_elems: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    right_elems: Vec<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Role {
    Spoiler,
    Duplicator,
}

impl From<Role> for Player {
    fn from(r: Role) -> Player {
        match r {
            Role::Spoiler => Player::Spoiler,
            Role::Duplicator => Player::Duplicator,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Mso,
    Lfp,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Tree,
    Forest,
    Frame,
    Listed,
    NearTree,
    Formula,
    Sentence,
}

fn parse_kv(s: &str) -> Result<(String, String), String> {
    s.split_once('=')
        .map(|(k, v)| (k.trim().to_string(), v.to_string()))
        .ok_or_else(|| format!("expected name=value, got `{s}`"))
}

/// Inline JSON when the argument starts with `{` or `[`, a file otherwise.
fn read_input(arg: &str) -> Result<String> {
    let t = arg.trim_start();
    if t.starts_with('{') || t.starts_with('[') {
        return Ok(arg.to_string());
    }
    std::fs::read_to_string(Path::new(arg)).with_context(|| format!("cannot read {arg}"))
}

fn load_frame(arg: &str) -> Result<Frame> {
    parse_structure(&read_input(arg)?, None).with_context(|| format!("bad structure {arg}"))
}

fn load_json(arg: &str) -> Result<Value> {
    serde_json::from_str(&read_input(arg)?).with_context(|| format!("bad JSON in {arg}"))
}

/// A finished command: text for humans, the JSON form, and whether the
/// answer was positive.
struct Outcome {
    text: String,
    json: Value,
    positive: bool,
    /// Negative answers that fail even without `--strict`.
    hard: bool,
}

impl Outcome {
    fn new(text: impl Into<String>, json: Value) -> Outcome {
        Outcome {
            text: text.into(),
            json,
            positive: true,
            hard: false,
        }
    }

    fn answer(text: impl Into<String>, json: Value, positive: bool) -> Outcome {
        Outcome {
            text: text.into(),
            json,
            positive,
            hard: false,
        }
    }
}

fn config(logic: LogicId, n: usize, left: &str, right: &str, p: &ParamArgs) -> Result<GameConfig> {
    let l = ParamFrame::from(load_frame(left)?).with_elems(&p.left_elems);
    let r = ParamFrame::from(load_frame(right)?).with_elems(&p.right_elems);
    Ok(GameConfig::new(logic, n, l, r)?)
}

fn formula_outcome(f: &Formula) -> Outcome {
    let text = render_formula(f);
    Outcome::new(text.clone(), json!({ "formula": text }))
}

fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.cmd {
        Cmd::Parse { formula, vocab } => {
            let f = parse_formula(formula, &vocab.resolve()?)?;
            let free = free_variables(&f);
            let logic = LogicId::ALL.into_iter().find(|&l| f.check_logic(l).is_ok());
            let text = render_formula(&f);
            let human = format!(
                "{text}\nlogic: {}\ndepth: {}\nfree: {}",
                logic.map_or("none".to_string(), |l| l.to_string()),
                quantifier_depth(&f),
                free.elems
                    .iter()
                    .chain(&free.sets)
                    .cloned()
                    .collect::<Vec<_>>()
                    .join(", ")
            );
            Ok(Outcome::new(
                human,
                json!({
                    "formula": text,
                    "logic": logic,
                    "depth": quantifier_depth(&f),
                    "free_elems": free.elems,
                    "free_sets": free.sets,
                }),
            ))
        }
        Cmd::Eval {
            structure,
            formula,
            g,
        } => {
            let frame = load_frame(structure)?;
            let f = parse_formula(formula, frame.vocab())?;
            let a = Assignment::parse(g).map_err(|e| anyhow!(e))?;
            let v = eval(&frame, &a, &f)?;
            Ok(Outcome::answer(v.to_string(), json!({ "value": v }), v))
        }
        Cmd::Equiv {
            logic,
            n,
            left,
            right,
            params,
        } => {
            let cfg = config(*logic, *n, left, right, params)?;
            let w = treelogic::games::winner(&cfg)?;
            let eq = w == Player::Duplicator;
            Ok(Outcome::answer(
                w.to_string(),
                json!({ "logic": logic, "rounds": n, "winner": w, "equivalent": eq }),
                eq,
            ))
        }
        Cmd::Play {
            logic,
            n,
            left,
            right,
            human,
            params,
        } => {
            let cfg = config(*logic, *n, left, right, params)?;
            let stdin = io::stdin();
            // Keep stdout a single JSON document in --json mode.
            if cli.json {
                play(cfg, (*human).into(), &mut stdin.lock(), &mut io::stderr())
            } else {
                play(cfg, (*human).into(), &mut stdin.lock(), &mut io::stdout())
            }
        }
        Cmd::Translate { to, formula, vocab } => {
            let f = parse_formula(formula, &vocab.resolve()?)?;
            let g = match to {
                Target::Lfp => tc_to_lfp(&f),
                Target::Mso => lfp_to_mso(&tc_to_lfp(&f)),
            };
            Ok(formula_outcome(&g))
        }
        Cmd::Rel {
            formula,
            guard,
            var,
            vocab,
        } => {
            let v = vocab.resolve()?;
            let phi = parse_formula(formula, &v)?;
            let psi = parse_formula(guard, &v)?;
            Ok(formula_outcome(&relativize(&phi, &psi, var)?))
        }
        Cmd::Fuse {
            map,
            forest,
            below,
            right,
            components,
        } => {
            let frame = match (map, forest) {
                (Some(map), _) => {
                    if components.is_empty() {
                        bail!("fuse needs at least one component structure");
                    }
                    let frames = components
                        .iter()
                        .map(|c| load_frame(c))
                        .collect::<Result<Vec<_>>>()?;
                    let m =
                        FusionMap::from_json(&load_json(map)?, frames[0].vocab(), frames.len())?;
                    fuse(&frames, &m)?
                }
                (None, Some(single)) => {
                    let below = below.as_deref().map(load_frame).transpose()?;
                    let right = right.as_deref().map(load_frame).transpose()?;
                    forest_compose(&load_frame(single)?, below.as_ref(), right.as_ref())?
                }
                (None, None) => bail!("give --map or --forest"),
            };
            let doc = frame_to_json(&frame);
            Ok(Outcome::new(serde_json::to_string_pretty(&doc)?, doc))
        }
        Cmd::Axiom {
            id,
            bind,
            check,
            vocab,
        } => {
            if let Some(s) = check {
                let report = check_tree_axioms(&load_frame(s)?)?;
                let failed: Vec<String> = report.failed().iter().map(|a| a.to_string()).collect();
                let text = if failed.is_empty() {
                    "all tree axioms hold".to_string()
                } else {
                    format!("failed: {}", failed.join(", "))
                };
                return Ok(Outcome::answer(
                    text,
                    json!({ "results": report.results, "failed": failed }),
                    report.all(),
                ));
            }
            let id = id.ok_or_else(|| anyhow!("give --id or --check"))?;
            let raw: BTreeMap<String, String> = bind.iter().cloned().collect();
            let b = parse_bindings(&raw, &vocab.resolve()?)?;
            let f = axiom_instance(id, &b)?;
            let text = render_formula(&f);
            Ok(Outcome::new(
                text.clone(),
                json!({ "axiom": id, "formula": text }),
            ))
        }
        Cmd::Chi {
            structure,
            successor,
        } => {
            let f = if *successor {
                chi_successor()
            } else {
                chi_finiteness()
            };
            let text = render_formula(&f);
            match structure {
                None => Ok(Outcome::new(text.clone(), json!({ "formula": text }))),
                Some(s) => {
                    let frame = load_frame(s)?;
                    let v = eval(&frame, &Assignment::new(), &f)?;
                    Ok(Outcome::answer(
                        v.to_string(),
                        json!({ "formula": text, "value": v }),
                        v,
                    ))
                }
            }
        }
        Cmd::Prove { proof } => {
            let verdict = check_proof_json(&load_json(proof)?)?;
            let ok = verdict.is_accept();
            let text = match &verdict {
                treelogic::proof::Verdict::Accept => "accepted".to_string(),
                treelogic::proof::Verdict::Reject { line, reason } => {
                    format!("rejected at line {line}: {reason}")
                }
            };
            let mut o = Outcome::answer(text, serde_json::to_value(&verdict)?, ok);
            o.hard = true;
            Ok(o)
        }
        Cmd::Gen {
            kind,
            size,
            seed,
            labels,
            logic,
            depth,
            roots,
            count,
            violation,
        } => {
            let cfg = GenConfig {
                seed: *seed,
                min_size: *size,
                max_size: *size,
                vocab: Vocabulary::tree(*labels),
                max_depth: *depth,
                logic: *logic,
                ..GenConfig::default()
            };
            let mut g = Generator::new(cfg);
            let frame = match kind {
                Kind::Tree => g.tree_of_size(*size),
                Kind::Forest => g.forest_of_size(*size, *roots),
                Kind::Frame => g.frame_of_size(*size),
                Kind::Listed => g.listed_frame(*count),
                Kind::NearTree => {
                    let name = violation.as_deref().unwrap_or("ExtraRoot");
                    let v: Violation = serde_json::from_value(json!(name)).map_err(|_| {
                        anyhow!("unknown violation `{name}`; one of {:?}", Violation::ALL)
                    })?;
                    g.near_tree(v)
                }
                Kind::Formula => return Ok(formula_outcome(&g.formula(&["x"], &[]))),
                Kind::Sentence => return Ok(formula_outcome(&g.sentence())),
            };
            let doc = frame_to_json(&frame);
            Ok(Outcome::new(serde_json::to_string_pretty(&doc)?, doc))
        }
    }
}

/// Terminal game loop. The human types moves in the wire encoding
/// (`pt L 0`, `set R {1,2}`, ...), `moves`, `hint` or `quit`.
fn play(
    cfg: GameConfig,
    human: Player,
    input: &mut dyn BufRead,
    out: &mut dyn Write,
) -> Result<Outcome> {
    let cfg = Arc::new(cfg);
    let mut solver = Solver::new(cfg.clone());
    let mut state = GameState::new(cfg);
    let mut transcript: Vec<String> = Vec::new();
    let predicted = solver.value(&state)?;
    writeln!(out, "predicted winner: {predicted}")?;
    let mut line = String::new();
    while state.outcome().is_none() {
        if state.mover() == human {
            writeln!(
                out,
                "[rounds left {}] pebbles {:?} | {}",
                state.rounds_left,
                state.elem_pebbles,
                state.phase.describe()
            )?;
            write!(out, "> ")?;
            out.flush()?;
            line.clear();
            if input.read_line(&mut line)? == 0 {
                bail!("input ended before the game did");
            }
            match line.trim() {
                "" => continue,
                "quit" | "q" => bail!("game abandoned"),
                "moves" => {
                    let ms: Vec<String> = state.legal_moves().iter().map(Move::to_string).collect();
                    writeln!(out, "{}", ms.join(" | "))?;
                }
                "hint" => {
                    let m = solver.optimal_move(&state)?;
                    writeln!(
                        out,
                        "hint: {m} (predicted winner {})",
                        solver.value(&state)?
                    )?;
                }
                text => match text
                    .parse::<Move>()
                    .and_then(|m| state.apply_move(&m).map(|s| (m, s)))
                {
                    Ok((m, s)) => {
                        transcript.push(m.to_string());
                        state = s;
                    }
                    Err(e) => writeln!(out, "{e}")?,
                },
            }
        } else {
            let m = solver.optimal_move(&state)?;
            writeln!(out, "engine: {m}")?;
            state = state.apply_move(&m)?;
            transcript.push(m.to_string());
        }
    }
    let w = state.outcome().expect("loop ends on a decided state");
    Ok(Outcome::answer(
        format!("winner: {w}"),
        json!({ "winner": w, "transcript": transcript, "state": state.to_json() }),
        w == human,
    ))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(o) => {
            if cli.json {
                println!("{}", o.json);
            } else {
                println!("{}", o.text);
            }
            if !o.positive && (o.hard || cli.strict) {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            if cli.json {
                println!("{}", json!({ "error": format!("{e:#}") }));
            }
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
