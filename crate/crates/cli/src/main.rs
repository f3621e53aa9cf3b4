use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use metafinite_core::gen;
use metafinite_core::rational;
use metafinite_core::*;

/// Toolkit for FO_R sentences over metafinite structures and the arithmetic
/// circuits that decide them.
#[derive(Parser)]
#[command(name = "metafinite", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct FormulaArgs {
    /// File holding one sentence.
    #[arg(long)]
    formula: PathBuf,
    /// Signature file: lines `skeleton|number|predicate|aux-index|aux-number name/arity`.
    #[arg(long)]
    sig: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Print the canonical form of a sentence.
    Parse {
        #[command(flatten)]
        f: FormulaArgs,
    },
    /// Decide a sentence on a structure; prints `true` or `false`.
    ModelCheck {
        #[command(flatten)]
        f: FormulaArgs,
        #[arg(long)]
        structure: PathBuf,
    },
    /// Compile a sentence into a circuit for one universe size.
    Compile {
        #[command(flatten)]
        f: FormulaArgs,
        #[arg(long)]
        u: Option<usize>,
        /// Structure file whose `[arb]` tables interpret the auxiliary
        /// symbols; also fixes `u` when `--u` is absent.
        #[arg(long)]
        structure: Option<PathBuf>,
        /// Accepted for clarity; gates are always numbered in post-order.
        #[arg(long)]
        numbered: bool,
        /// Print a DOT digraph instead of circuit text.
        #[arg(long)]
        emit_dot: bool,
    },
    /// Evaluate a circuit; inputs come from `--values` or an encoded structure.
    EvalCircuit {
        #[arg(long)]
        circuit: PathBuf,
        /// Comma-separated rationals such as `2,3,-1/2`.
        #[arg(long, allow_hyphen_values = true)]
        values: Option<String>,
        #[arg(long, requires = "sig")]
        structure: Option<PathBuf>,
        #[arg(long)]
        sig: Option<PathBuf>,
    },
    /// Rewrite a circuit; without flags all three passes run in order.
    Normalize {
        #[arg(long)]
        circuit: PathBuf,
        /// Replace gates of types 7..12.
        #[arg(long)]
        no_aux: bool,
        #[arg(long)]
        tree_like: bool,
        #[arg(long)]
        level: bool,
        #[arg(long)]
        emit_dot: bool,
    },
    /// Query the gate oracle; prints `t p_nr c`.
    Oracle {
        #[command(flatten)]
        f: FormulaArgs,
        /// Input length.
        #[arg(long)]
        n: usize,
        #[arg(long)]
        gate: u64,
        /// Predecessor index, starting at 1.
        #[arg(long, default_value_t = 1)]
        pred: usize,
        /// Structure file supplying `[arb]` tables.
        #[arg(long)]
        structure: Option<PathBuf>,
    },
    /// Turn a circuit into a sentence over `{f/1}` plus descriptor tables.
    Reverse {
        #[arg(long)]
        circuit: PathBuf,
        #[arg(long)]
        u: usize,
        /// Normalize the circuit first.
        #[arg(long)]
        normalize: bool,
        /// Write the tables here instead of after the sentence.
        #[arg(long)]
        arb_out: Option<PathBuf>,
    },
    /// Print `enc(D)`.
    Encode {
        #[arg(long)]
        sig: PathBuf,
        #[arg(long)]
        structure: PathBuf,
    },
    /// Compare the model checker with the compiled circuit on many structures.
    CheckEquiv {
        #[command(flatten)]
        f: FormulaArgs,
        #[arg(long)]
        u: usize,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Enumerate all structures with number entries in {0,1} when there
        /// are at most 4096 of them.
        #[arg(long)]
        exhaustive: bool,
    },
}

type Res<T> = Result<T, String>;

fn read(path: &Path) -> Res<String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_sig(path: &Path) -> Res<Signature> {
    Signature::parse(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_formula(f: &FormulaArgs) -> Res<(Formula, Signature)> {
    let sig = load_sig(&f.sig)?;
    let phi = parse_formula(read(&f.formula)?.trim(), &sig).map_err(|e| format!("{}: {e}", f.formula.display()))?;
    Ok((phi, sig))
}

fn load_structure(path: &Path, sig: &Signature) -> Res<(RStructure, ArbInterpretation)> {
    parse_structure(&read(path)?, sig).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_circuit(path: &Path) -> Res<Circuit> {
    Circuit::parse(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

fn show_values(v: &[Rational]) -> String {
    v.iter().map(rational::format).collect::<Vec<_>>().join(" ")
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// Makes a sentence compilable: `max` terms are rewritten away.
fn prepare(phi: &Formula) -> Res<Formula> {
    if phi.count_max() > 0 {
        eliminate_max(phi).map_err(err)
    } else {
        Ok(phi.clone())
    }
}

fn run(cli: Cli) -> Res<String> {
    match cli.command {
        Command::Parse { f } => Ok(print_formula(&load_formula(&f)?.0)),
        Command::ModelCheck { f, structure } => {
            let (phi, sig) = load_formula(&f)?;
            let (d, arb) = load_structure(&structure, &sig)?;
            Ok(satisfies(&phi, &d, &arb, &Assignment::new()).map_err(err)?.to_string())
        }
        Command::Compile {
            f,
            u,
            structure,
            numbered: _,
            emit_dot,
        } => {
            let (phi, sig) = load_formula(&f)?;
            let (u, arb) = match (&structure, u) {
                (Some(p), u) => {
                    let (d, arb) = load_structure(p, &sig)?;
                    (u.unwrap_or(d.universe_size()), arb)
                }
                (None, Some(u)) => (u, ArbInterpretation::new()),
                (None, None) => return Err("one of --u or --structure is required".into()),
            };
            let c = compile_numbered(&prepare(&phi)?, &sig, u, &arb).map_err(err)?;
            Ok(if emit_dot { c.to_dot() } else { c.to_text() })
        }
        Command::EvalCircuit {
            circuit,
            values,
            structure,
            sig,
        } => {
            let c = load_circuit(&circuit)?;
            let x = match (values, structure, sig) {
                (Some(v), None, _) => v
                    .split(',')
                    .map(|s| rational::parse(s.trim()).ok_or_else(|| format!("not a rational: `{}`", s.trim())))
                    .collect::<Res<Vec<_>>>()?,
                (None, Some(s), Some(sig)) => load_structure(&s, &load_sig(&sig)?)?.0.encode(),
                _ => return Err("give either --values or --structure with --sig".into()),
            };
            Ok(show_values(&c.evaluate(&x).map_err(err)?))
        }
        Command::Normalize {
            circuit,
            no_aux,
            tree_like,
            level,
            emit_dot,
        } => {
            let mut c = load_circuit(&circuit)?;
            let all = !(no_aux || tree_like || level);
            if all || no_aux {
                c = eliminate_aux_gates(&c).map_err(err)?;
            }
            if all || tree_like {
                c = make_tree_like(&c).map_err(err)?;
            }
            if all || level {
                c = level_paths(&c).map_err(err)?;
            }
            Ok(if emit_dot { c.to_dot() } else { c.to_text() })
        }
        Command::Oracle {
            f,
            n,
            gate,
            pred,
            structure,
        } => {
            let (phi, sig) = load_formula(&f)?;
            let arb = match structure {
                Some(p) => load_structure(&p, &sig)?.1,
                None => ArbInterpretation::new(),
            };
            Ok(gate_oracle(&prepare(&phi)?, &sig, n, &arb, gate, pred).map_err(err)?.to_string())
        }
        Command::Reverse {
            circuit,
            u,
            normalize,
            arb_out,
        } => {
            let mut c = load_circuit(&circuit)?;
            if normalize {
                c = level_paths(&make_tree_like(&eliminate_aux_gates(&c).map_err(err)?).map_err(err)?).map_err(err)?;
            }
            let desc = descriptor_from_circuit(&c, u).map_err(err)?;
            let sentence = print_formula(&build_sentence(&desc));
            let tables = desc.arb().to_text();
            match arb_out {
                Some(path) => {
                    fs::write(&path, format!("[arb]\n{tables}")).map_err(|e| format!("{}: {e}", path.display()))?;
                    Ok(sentence)
                }
                None => Ok(format!("{sentence}\n[arb]\n{}", tables.trim_end())),
            }
        }
        Command::Encode { sig, structure } => {
            let sig = load_sig(&sig)?;
            Ok(show_values(&load_structure(&structure, &sig)?.0.encode()))
        }
        Command::CheckEquiv {
            f,
            u,
            count,
            seed,
            exhaustive,
        } => {
            let (phi, sig) = load_formula(&f)?;
            if !sig.aux_symbols().is_empty() {
                return Err("check-equiv needs a signature without auxiliary symbols".into());
            }
            let c = compile(&prepare(&phi)?, &sig, u, &ArbInterpretation::new()).map_err(err)?;
            let ev = c.evaluator().map_err(err)?;
            let mut rng = gen::rng(seed);
            let structures: Vec<RStructure> = if exhaustive {
                gen::zero_one_sweep(&mut rng, &sig, u, 4096, count)
            } else {
                (0..count).map(|_| gen::random_structure(&mut rng, &sig, u, -2..=2)).collect()
            };
            let mut agree = 0;
            for d in &structures {
                let expected = rational::bool01(holds(&phi, d).map_err(err)?);
                if ev.eval(&d.encode()).map_err(err)? == vec![expected] {
                    agree += 1;
                }
            }
            let line = format!("{agree}/{} agree", structures.len());
            if agree == structures.len() {
                Ok(line)
            } else {
                println!("{line}");
                Err(format!("{} structures disagree", structures.len() - agree))
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(out) => {
            // A closed pipe (as with `| head`) is not an error worth reporting.
            let _ = writeln!(std::io::stdout().lock(), "{}", out.trim_end());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {}", e.replace('\n', " "));
            ExitCode::from(1)
        }
    }
}
