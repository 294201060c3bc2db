//! Batch command-line surface over the fofs library.
//!
//! Exit codes: 0 for success / accepted / valid / empty report, 1 for a
//! mathematically negative but successfully computed verdict (rejected
//! proof, violation found, countermodel found, formula false), 2 for
//! usage or input errors.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use fofs::frameclasses::{check_membership, FrameClassSpec};
use fofs::proof::{
    check_proof, derive_schema, proof_from_json, proof_to_json, DerivedSchema, LogicId, Verdict,
};
use fofs::search::{find_countermodel, soundness_fuzz, CountermodelResult, SearchBounds};
use fofs::semantics::{
    check_persistence, eval_sentence, model_from_json, model_to_json, validate_frame, Model,
    Report,
};
use fofs::syntax::{parse_formula, parse_formula_inferred, Formula, Signature};
use fofs::trace::{build_trace_fragment, enumerate_ferrers, TheoryOracle, TraceVariant};

/// Default seed for the seeded subcommands, fixed for reproducibility.
pub const DEFAULT_SEED: u64 = 0xF0F5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Parser)]
#[command(
    name = "fofs",
    version,
    about = "First-order intuitionistic modal logic toolkit: proof checking, finite models, countermodel search, trace combinatorics"
)]
struct Cli {
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a formula and echo its canonical form
    Parse {
        /// The formula text
        #[arg(short = 'f', long)]
        formula: String,
        /// Signature file; names are inferred when absent
        #[arg(short = 's', long)]
        sig: Option<PathBuf>,
    },
    /// Check a proof file
    Check {
        #[arg(short = 'p', long)]
        proof: PathBuf,
    },
    /// Build a derived-schema proof and write it as a proof file
    Derive {
        /// Schema name: box-or-dist, dia-conj, dia-mp, eq-euclid,
        /// dia-forall, necessitation, under-box, generalize,
        /// exists-antecedent
        schema: String,
        /// Formula arguments, in schema order
        #[arg(short = 'f', long = "formula")]
        formulas: Vec<String>,
        /// Constant arguments, in schema order
        #[arg(short = 'c', long = "constant")]
        constants: Vec<String>,
        /// Variable arguments, in schema order
        #[arg(short = 'x', long = "variable")]
        variables: Vec<String>,
        /// Proof-file arguments, in schema order
        #[arg(short = 'p', long = "proof")]
        proofs: Vec<PathBuf>,
        /// Logic token (fs, fs-d, fs-4, fs-d4, fs-t, fs-s4, with
        /// optional +ni/+nd/+ni+nd suffix)
        #[arg(short = 'l', long, default_value = "fs")]
        logic: String,
        /// Output path; stdout when absent
        #[arg(short = 'o', long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a formula at a world of a model
    Eval {
        #[arg(short = 'm', long)]
        model: PathBuf,
        #[arg(short = 'w', long)]
        world: String,
        #[arg(short = 'f', long)]
        formula: String,
        #[arg(short = 's', long)]
        sig: Option<PathBuf>,
    },
    /// Validate a model file (frame, domain system, interpretation)
    Validate {
        #[arg(short = 'm', long)]
        model: PathBuf,
        #[arg(short = 's', long)]
        sig: Option<PathBuf>,
        /// Additionally run the sampled persistence check
        #[arg(long)]
        persistence: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Check membership of a model in a frame class
    Class {
        #[arg(short = 'm', long)]
        model: PathBuf,
        /// Class token (fs, fs-d, fs-4, fs-d4, fs-t, fs-s4, with
        /// optional +ni/+nd/+ni+nd suffix)
        #[arg(short = 'c', long)]
        class: String,
        #[arg(short = 's', long)]
        sig: Option<PathBuf>,
    },
    /// Fuzz the soundness of a logic's axioms over random models
    Fuzz {
        #[arg(short = 'l', long)]
        logic: String,
        #[arg(short = 'n', long, default_value_t = 200)]
        models: usize,
        #[arg(short = 'i', long, default_value_t = 50)]
        instances: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Search for a countermodel to a sequent within bounds
    Refute {
        /// The goal sentence
        #[arg(short = 'g', long)]
        goal: String,
        /// Assumption sentences (repeatable)
        #[arg(short = 'a', long = "assume")]
        assumptions: Vec<String>,
        /// Class token
        #[arg(short = 'c', long, default_value = "fs")]
        class: String,
        /// Bounds as worlds,domain
        #[arg(short = 'b', long, default_value = "3,3")]
        bounds: String,
        /// Report a witness minimal in worlds, then total domain size
        #[arg(long)]
        minimal: bool,
        /// Write a found countermodel to this path
        #[arg(short = 'o', long)]
        out: Option<PathBuf>,
    },
    /// Count or list Ferrers sets for a grid corner
    Ferrers {
        l: usize,
        m: usize,
        #[arg(long)]
        list: bool,
    },
    /// Build a trace fragment over an oracle file and validate it
    Trace {
        /// Oracle corpus file
        #[arg(short = 'o', long)]
        oracle: PathBuf,
        /// Depth as l,m
        #[arg(short = 'd', long, default_value = "2,2")]
        depth: String,
        /// Modal-relation variant: base, 4, t, s4
        #[arg(short = 'v', long, default_value = "base")]
        variant: String,
        /// Write the fragment frame to this path
        #[arg(long)]
        out: Option<PathBuf>,
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

fn read(path: &PathBuf) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_sig(path: &Option<PathBuf>) -> Result<Option<Signature>, String> {
    match path {
        None => Ok(None),
        Some(p) => {
            let text = read(p)?;
            let sig: Signature =
                serde_json::from_str(&text).map_err(|e| format!("{}: {e}", p.display()))?;
            Ok(Some(sig))
        }
    }
}

fn load_model(path: &PathBuf, sig: &Option<PathBuf>) -> Result<Model, String> {
    let sig = load_sig(sig)?;
    let text = read(path)?;
    model_from_json(&text, sig.as_ref()).map_err(|e| format!("{}: {e}", path.display()))
}

fn parse_sentence(text: &str, sig: Option<&Signature>) -> Result<Formula, String> {
    let f = match sig {
        Some(s) => parse_formula(text, s).map_err(|e| e.to_string())?,
        None => parse_formula_inferred(text).map_err(|e| e.to_string())?.formula,
    };
    if !f.is_sentence() {
        return Err(format!("{f} has free variables"));
    }
    Ok(f)
}

fn parse_pair(text: &str, what: &str) -> Result<(usize, usize), String> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 2 {
        return Err(format!("{what} must be two comma-separated numbers"));
    }
    let a = parts[0].trim().parse().map_err(|e| format!("{what}: {e}"))?;
    let b = parts[1].trim().parse().map_err(|e| format!("{what}: {e}"))?;
    Ok((a, b))
}

fn report_code(report: &Report) -> ExitCode {
    if report.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn print_report(format: Format, report: &Report) {
    match format {
        Format::Text => {
            if report.is_empty() {
                println!("ok");
            } else {
                print!("{report}");
            }
        }
        Format::Structured => {
            println!("{}", serde_json::to_string_pretty(report).unwrap());
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Parse { formula, sig } => {
            let sig = load_sig(&sig)?;
            let f = match &sig {
                Some(s) => parse_formula(&formula, s).map_err(|e| e.to_string())?,
                None => {
                    parse_formula_inferred(&formula)
                        .map_err(|e| e.to_string())?
                        .formula
                }
            };
            match cli.format {
                Format::Text => println!("{f}"),
                Format::Structured => println!(
                    "{}",
                    serde_json::json!({ "formula": f.to_string() })
                ),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Check { proof } => {
            let text = read(&proof)?;
            let p = proof_from_json(&text).map_err(|e| e.to_string())?;
            match check_proof(&p) {
                Verdict::Accepted => {
                    match cli.format {
                        Format::Text => println!("accepted"),
                        Format::Structured => {
                            println!("{}", serde_json::json!({ "verdict": "accepted" }))
                        }
                    }
                    Ok(ExitCode::SUCCESS)
                }
                Verdict::Rejected { line, reason } => {
                    match cli.format {
                        Format::Text => println!("rejected at line {line}: {reason}"),
                        Format::Structured => println!(
                            "{}",
                            serde_json::json!({
                                "verdict": "rejected",
                                "line": line,
                                "reason": reason,
                            })
                        ),
                    }
                    Ok(ExitCode::from(1))
                }
            }
        }
        Command::Derive {
            schema,
            formulas,
            constants,
            variables,
            proofs,
            logic,
            out,
        } => {
            let logic = LogicId::parse_token(&logic).map_err(|e| e.to_string())?;
            let parse_f = |t: &String| -> Result<Formula, String> {
                Ok(parse_formula_inferred(t).map_err(|e| e.to_string())?.formula)
            };
            let load_p = |p: &PathBuf| -> Result<fofs::Proof, String> {
                proof_from_json(&read(p)?).map_err(|e| e.to_string())
            };
            let need = |cond: bool, what: &str| -> Result<(), String> {
                if cond {
                    Ok(())
                } else {
                    Err(format!("schema {schema} needs {what}"))
                }
            };
            let built = match schema.as_str() {
                "box-or-dist" => {
                    need(!formulas.is_empty(), "at least one --formula")?;
                    DerivedSchema::BoxOrDist {
                        disjuncts: formulas.iter().map(parse_f).collect::<Result<_, _>>()?,
                    }
                }
                "dia-conj" => {
                    need(formulas.len() == 2, "two --formula arguments")?;
                    DerivedSchema::DiaConj {
                        phi: parse_f(&formulas[0])?,
                        psi: parse_f(&formulas[1])?,
                    }
                }
                "dia-mp" => {
                    need(formulas.len() == 2, "two --formula arguments")?;
                    DerivedSchema::DiaMp {
                        phi: parse_f(&formulas[0])?,
                        psi: parse_f(&formulas[1])?,
                    }
                }
                "eq-euclid" => {
                    need(constants.len() == 3, "three --constant arguments")?;
                    DerivedSchema::EqEuclid {
                        c1: constants[0].clone(),
                        c2: constants[1].clone(),
                        c3: constants[2].clone(),
                    }
                }
                "dia-forall" => {
                    need(
                        formulas.len() == 1 && variables.len() == 1 && constants.len() == 1,
                        "one --formula, one --variable, one --constant",
                    )?;
                    // the declared variable reads as a constant in the
                    // bare formula text; abstract it back out
                    let parsed = parse_f(&formulas[0])?;
                    let body =
                        fofs::syntax::abstract_constant(&parsed, &variables[0], &variables[0])
                            .map_err(|e| e.to_string())?;
                    DerivedSchema::DiaForallDist {
                        body,
                        var: variables[0].clone(),
                        fresh: constants[0].clone(),
                    }
                }
                "necessitation" => {
                    need(proofs.len() == 1, "one --proof argument")?;
                    DerivedSchema::Necessitation {
                        theorem: load_p(&proofs[0])?,
                    }
                }
                "under-box" => {
                    need(proofs.len() == 3, "three --proof arguments")?;
                    DerivedSchema::UnderBox {
                        box_phi: load_p(&proofs[0])?,
                        box_psi: load_p(&proofs[1])?,
                        imp: load_p(&proofs[2])?,
                    }
                }
                "generalize" => {
                    need(
                        proofs.len() == 1 && constants.len() == 1 && variables.len() == 1,
                        "one --proof, one --constant, one --variable",
                    )?;
                    DerivedSchema::Generalize {
                        premise: load_p(&proofs[0])?,
                        constant: constants[0].clone(),
                        variable: variables[0].clone(),
                    }
                }
                "exists-antecedent" => {
                    need(
                        proofs.len() == 1
                            && !constants.is_empty()
                            && constants.len() == variables.len(),
                        "one --proof and matching --constant/--variable lists",
                    )?;
                    DerivedSchema::ExistsAntecedent {
                        premise: load_p(&proofs[0])?,
                        constants: constants.clone(),
                        variables: variables.clone(),
                    }
                }
                other => return Err(format!("unknown schema {other}")),
            };
            let proof = derive_schema(logic, built).map_err(|e| e.to_string())?;
            let text = proof_to_json(&proof);
            match out {
                Some(path) => {
                    fs::write(&path, text).map_err(|e| format!("{}: {e}", path.display()))?;
                    match cli.format {
                        Format::Text => {
                            println!("wrote proof of {} to {}", proof.conclusion, path.display())
                        }
                        Format::Structured => println!(
                            "{}",
                            serde_json::json!({
                                "conclusion": proof.conclusion.to_string(),
                                "path": path.display().to_string(),
                            })
                        ),
                    }
                }
                None => println!("{text}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Eval {
            model,
            world,
            formula,
            sig,
        } => {
            let m = load_model(&model, &sig)?;
            let f = parse_sentence(&formula, Some(&m.signature))?;
            let w = m
                .world_index(&world)
                .ok_or_else(|| format!("unknown world {world}"))?;
            let value = eval_sentence(&m, w, &f).map_err(|e| e.to_string())?;
            match cli.format {
                Format::Text => println!("{value}"),
                Format::Structured => {
                    println!("{}", serde_json::json!({ "value": value }))
                }
            }
            Ok(if value {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Validate {
            model,
            sig,
            persistence,
            seed,
        } => {
            let m = load_model(&model, &sig)?;
            let mut report = m.validate();
            if let Some(samples) = persistence {
                report.merge(check_persistence(&m, samples, seed));
            }
            print_report(cli.format, &report);
            Ok(report_code(&report))
        }
        Command::Class { model, class, sig } => {
            let spec = FrameClassSpec::parse_token(&class).map_err(|e| e.to_string())?;
            let m = load_model(&model, &sig)?;
            let mut report = m.validate();
            report.merge(check_membership(&m, &spec));
            print_report(cli.format, &report);
            Ok(report_code(&report))
        }
        Command::Fuzz {
            logic,
            models,
            instances,
            seed,
        } => {
            let logic = LogicId::parse_token(&logic).map_err(|e| e.to_string())?;
            let report = soundness_fuzz(logic, models, instances, seed);
            print_report(cli.format, &report);
            Ok(report_code(&report))
        }
        Command::Refute {
            goal,
            assumptions,
            class,
            bounds,
            minimal,
            out,
        } => {
            let spec = FrameClassSpec::parse_token(&class).map_err(|e| e.to_string())?;
            let goal = parse_sentence(&goal, None)?;
            let gamma: Vec<Formula> = assumptions
                .iter()
                .map(|a| parse_sentence(a, None))
                .collect::<Result<_, _>>()?;
            let (w, d) = parse_pair(&bounds, "bounds")?;
            if w == 0 {
                return Err("bounds need at least one world".into());
            }
            let mut b = SearchBounds::new(w, d);
            if minimal {
                b = b.with_minimality();
            }
            match find_countermodel(&gamma, &goal, &spec, &b) {
                CountermodelResult::Found { model, world } => {
                    let text = model_to_json(&model);
                    if let Some(path) = &out {
                        fs::write(path, &text).map_err(|e| format!("{}: {e}", path.display()))?;
                    }
                    match cli.format {
                        Format::Text => {
                            println!("countermodel found, witness world {world}");
                            if out.is_none() {
                                println!("{text}");
                            }
                        }
                        Format::Structured => println!(
                            "{}",
                            serde_json::json!({
                                "found": true,
                                "world": world,
                                "model": serde_json::from_str::<serde_json::Value>(&text)
                                    .unwrap(),
                            })
                        ),
                    }
                    Ok(ExitCode::from(1))
                }
                CountermodelResult::NotFoundWithinBounds { examined } => {
                    match cli.format {
                        Format::Text => {
                            println!("no countermodel within bounds ({examined} models examined)")
                        }
                        Format::Structured => println!(
                            "{}",
                            serde_json::json!({ "found": false, "examined": examined })
                        ),
                    }
                    Ok(ExitCode::SUCCESS)
                }
            }
        }
        Command::Ferrers { l, m, list } => {
            let sets = enumerate_ferrers(l, m).map_err(|e| e.to_string())?;
            match cli.format {
                Format::Text => {
                    println!("{}", sets.len());
                    if list {
                        for s in &sets {
                            let cells: Vec<String> = s
                                .cells()
                                .iter()
                                .map(|(i, j)| format!("({i},{j})"))
                                .collect();
                            println!("{}", cells.join(" "));
                        }
                    }
                }
                Format::Structured => {
                    if list {
                        let sets_json: Vec<Vec<(usize, usize)>> =
                            sets.iter().map(|s| s.cells()).collect();
                        println!(
                            "{}",
                            serde_json::json!({ "count": sets.len(), "sets": sets_json })
                        );
                    } else {
                        println!("{}", serde_json::json!({ "count": sets.len() }));
                    }
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Trace {
            oracle,
            depth,
            variant,
            out,
        } => {
            let oracle = TheoryOracle::from_json(&read(&oracle)?).map_err(|e| e.to_string())?;
            let (l, m) = parse_pair(&depth, "depth")?;
            let variant = TraceVariant::parse_token(&variant)
                .ok_or_else(|| format!("unknown variant {variant}"))?;
            let fragment = build_trace_fragment(&oracle, (l, m), variant)
                .map_err(|e| e.to_string())?;
            let report = validate_frame(&fragment.frame);
            let pairs = |r: &fofs::semantics::Relation| -> Vec<(String, String)> {
                r.pairs()
                    .map(|(a, b)| {
                        (
                            fragment.frame.worlds[a].clone(),
                            fragment.frame.worlds[b].clone(),
                        )
                    })
                    .collect()
            };
            let doc = serde_json::json!({
                "variant": variant.token(),
                "worlds": fragment.frame.worlds,
                "int_leq": pairs(&fragment.frame.leq),
                "modal": pairs(&fragment.frame.modal),
                "validation": report,
            });
            if let Some(path) = &out {
                fs::write(path, serde_json::to_string_pretty(&doc).unwrap())
                    .map_err(|e| format!("{}: {e}", path.display()))?;
            }
            match cli.format {
                Format::Text => {
                    println!(
                        "{} worlds, {} intuitionistic edges, {} modal edges",
                        fragment.frame.worlds.len(),
                        fragment.frame.leq.pairs().count(),
                        fragment.frame.modal.pairs().count(),
                    );
                    if report.is_empty() {
                        println!("frame conditions: ok");
                    } else {
                        print!("{report}");
                    }
                }
                Format::Structured => println!("{}", serde_json::to_string_pretty(&doc).unwrap()),
            }
            Ok(report_code(&report))
        }
    }
}
