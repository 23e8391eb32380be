use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use pebbles::analysis::{determinism_witness, reverse_determinism_witness, validate};
use pebbles::runner::{default_budget, eval, run_with, RunOptions, Verdict};
use pebbles::symbol::{parse_word, render_word};
use pebbles::{builtins, compose, transforms, uniformize, Symbol, Transducer};

const OK: u8 = 0;
const NEGATIVE: u8 = 1;
const IO: u8 = 2;
const PRECONDITION: u8 = 3;

#[derive(Parser)]
#[command(name = "ptx", version, about = "Reversible pebble transducers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a deterministic machine on a word.
    Run {
        machine: PathBuf,
        #[arg(long)]
        input: String,
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long)]
        trace: bool,
    },
    /// Well-formedness, determinism and reverse-determinism verdicts.
    Check { machine: PathBuf },
    /// Machine for the reversed function.
    Reverse {
        machine: PathBuf,
        #[arg(short)]
        o: Option<PathBuf>,
    },
    /// Basic machine equivalent to one with equality tests.
    EliminateEq {
        machine: PathBuf,
        #[arg(short)]
        o: Option<PathBuf>,
    },
    /// Machine for the second function applied after the first.
    Compose {
        first: PathBuf,
        second: PathBuf,
        #[arg(short)]
        o: Option<PathBuf>,
    },
    /// Apply one normalization pass.
    Normalize {
        machine: PathBuf,
        #[arg(long)]
        pass: Pass,
        #[arg(short)]
        o: Option<PathBuf>,
    },
    /// Write the enumerator, the equality annotator and the pebbleless simulator.
    Decompose {
        machine: PathBuf,
        #[arg(short)]
        o: PathBuf,
    },
    /// Run the uniformization pipeline.
    Uniformize {
        machine: PathBuf,
        #[arg(long, default_value = "identity")]
        hook: Hook,
        #[arg(short)]
        o: Option<PathBuf>,
    },
    /// Write a builtin machine.
    Builtin {
        name: String,
        #[arg(long, default_value = "ab")]
        alphabet: String,
        #[arg(short)]
        o: Option<PathBuf>,
    },
    /// Differential checks against the library.
    Oracle {
        #[command(subcommand)]
        check: OracleCheck,
    },
}

#[derive(Subcommand)]
enum OracleCheck {
    /// Compare the composed machine with running both machines in sequence.
    Compose {
        first: PathBuf,
        second: PathBuf,
        #[arg(long, default_value_t = 4)]
        maxlen: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Pass {
    SplitOutputs,
    FullRead,
    SeparateMoves,
}

#[derive(Clone, Copy, ValueEnum)]
enum Hook {
    Identity,
}

struct Failure(u8, String);

impl Failure {
    fn io(e: impl std::fmt::Display) -> Self {
        Failure(IO, e.to_string())
    }

    fn pre(e: impl std::fmt::Display) -> Self {
        Failure(PRECONDITION, e.to_string())
    }
}

fn load(path: &Path) -> Result<Transducer, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::io(format!("{}: {e}", path.display())))?;
    ptx::parse(&text).map_err(|e| Failure::io(format!("{}: {e}", path.display())))
}

fn emit(m: &Transducer, out: Option<&Path>) -> Result<u8, Failure> {
    let text = ptx::serialize(m);
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::io(format!("{}: {e}", p.display())))?,
        None => print!("{text}"),
    }
    Ok(OK)
}

fn words(sigma: &[Symbol], max: usize) -> Vec<Vec<Symbol>> {
    let mut all = vec![vec![]];
    let mut layer: Vec<Vec<Symbol>> = vec![vec![]];
    for _ in 0..max {
        layer = layer.iter().flat_map(|w| sigma.iter().map(move |a| [w.clone(), vec![a.clone()]].concat())).collect();
        all.extend(layer.iter().cloned());
    }
    all
}

fn run(cmd: Command) -> Result<u8, Failure> {
    match cmd {
        Command::Run { machine, input, budget, trace } => {
            let m = load(&machine)?;
            let u = parse_word(&input).ok_or_else(|| Failure::io(format!("cannot parse word {input:?}")))?;
            let budget = budget.unwrap_or_else(|| default_budget(&m, &u));
            let r = run_with(&m, &u, RunOptions { budget: Some(budget), trace, detect_loop: false }).map_err(Failure::pre)?;
            for step in r.trace.iter().flatten() {
                let c = &step.config;
                eprintln!("{}  ->  {} peb={:?} h={}", m.describe(&m.transitions[step.transition]), m.state_name(c.state), c.peb, c.head);
            }
            match r.verdict {
                Verdict::Accept(v) => {
                    println!("{}", render_word(&v));
                    Ok(OK)
                }
                Verdict::Reject => {
                    println!("REJECT");
                    Ok(NEGATIVE)
                }
                Verdict::Diverge { steps, .. } => {
                    println!("DIVERGE after {steps} steps");
                    Ok(NEGATIVE)
                }
            }
        }
        Command::Check { machine } => {
            let m = load(&machine)?;
            let violations = validate(&m);
            for v in &violations {
                println!("invalid: {v}");
            }
            let fwd = determinism_witness(&m);
            let bwd = reverse_determinism_witness(&m);
            println!("valid: {}", violations.is_empty());
            println!("deterministic: {}", fwd.is_none());
            if let Some(w) = &fwd {
                println!("  witness: {}", w.describe(&m));
            }
            println!("reverse-deterministic: {}", bwd.is_none());
            if let Some(w) = &bwd {
                println!("  witness: {}", w.describe(&m));
            }
            let reversible = violations.is_empty() && fwd.is_none() && bwd.is_none();
            println!("reversible: {reversible}");
            Ok(if reversible { OK } else { NEGATIVE })
        }
        Command::Reverse { machine, o } => {
            let m = transforms::reverse_transducer(&load(&machine)?).map_err(Failure::pre)?;
            emit(&m, o.as_deref())
        }
        Command::EliminateEq { machine, o } => emit(&transforms::eliminate_equality(&load(&machine)?), o.as_deref()),
        Command::Compose { first, second, o } => {
            let m = compose::compose(&load(&first)?, &load(&second)?).map_err(Failure::pre)?;
            emit(&m, o.as_deref())
        }
        Command::Normalize { machine, pass, o } => {
            let m = load(&machine)?;
            let n = match pass {
                Pass::SplitOutputs => transforms::split_outputs(&m),
                Pass::FullRead => transforms::ensure_full_read(&m).map_err(Failure::pre)?,
                Pass::SeparateMoves => transforms::separate_drop_lift_moves(&m).map_err(Failure::pre)?,
            };
            emit(&n, o.as_deref())
        }
        Command::Decompose { machine, o } => {
            let m = load(&machine)?;
            if m.k == 0 {
                return Err(Failure::pre("decomposition needs at least one pebble"));
            }
            std::fs::create_dir_all(&o).map_err(|e| Failure::io(format!("{}: {e}", o.display())))?;
            let parts = [
                ("enumerator.ptx", uniformize::build_config_enumerator(m.k, &m.input_alphabet)),
                ("annotator.ptx", uniformize::build_equality_annotator(m.k, &m.input_alphabet)),
                ("simulator.ptx", uniformize::decompose(&m)),
            ];
            for (file, part) in &parts {
                emit(part, Some(&o.join(file)))?;
            }
            Ok(OK)
        }
        Command::Uniformize { machine, hook, o } => {
            let m = load(&machine)?;
            if m.k == 0 {
                return Err(Failure::pre("uniformization needs at least one pebble"));
            }
            let hook = match hook {
                Hook::Identity => uniformize::UniformizerHook::Identity,
            };
            let r = uniformize::uniformize_pipeline(&m, hook).map_err(Failure::pre)?;
            let md = &r.metadata;
            eprintln!("hook: {}", md.hook);
            eprintln!("outcome: {:?}", md.outcome);
            eprintln!("pebbles: {}", md.pebbles);
            eprintln!("simulator states: {}", md.simulator_states);
            for note in &md.not_reproduced {
                eprintln!("note: {note}");
            }
            emit(r.machine.as_ref().expect("identity hook builds a machine"), o.as_deref())
        }
        Command::Builtin { name, alphabet, o } => {
            let sigma: Vec<Symbol> = alphabet.chars().map(Symbol::plain).collect();
            let m = builtins::by_name(&name, &sigma).map_err(Failure::pre)?;
            emit(&m, o.as_deref())
        }
        Command::Oracle { check: OracleCheck::Compose { first, second, maxlen } } => {
            let (t, tp) = (load(&first)?, load(&second)?);
            let c = compose::compose(&t, &tp).map_err(Failure::pre)?;
            let mut bad = 0;
            let all = words(&t.input_alphabet, maxlen);
            for u in &all {
                let direct = eval(&c, u).map_err(Failure::pre)?;
                let chained = match eval(&t, u).map_err(Failure::pre)? {
                    Some(v) => eval(&tp, &v).map_err(Failure::pre)?,
                    None => None,
                };
                if direct != chained {
                    bad += 1;
                    let show = |w: &Option<Vec<Symbol>>| w.as_ref().map_or("REJECT".to_string(), |w| render_word(w));
                    println!("mismatch on {:?}: composed {} / chained {}", render_word(u), show(&direct), show(&chained));
                }
            }
            println!("{} words, {bad} mismatches", all.len());
            Ok(if bad == 0 { OK } else { NEGATIVE })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
