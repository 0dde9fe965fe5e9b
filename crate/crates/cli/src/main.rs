use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use hyinv_core::discretise::discretise_automaton;
use hyinv_core::exactnum::NfElem;
use hyinv_core::exactnum::NumberField;
use hyinv_core::flowclosure::one_param_closure;
use hyinv_core::hybrid::{
    check_inductive, collecting_closure, field_from_spec, field_spec, parse_automaton, parse_matrices, EngineOptions,
    HybridAutomaton, InvariantFamily, RawField,
};
use hyinv_core::oracle::{numeric_falsify, random_trajectories, ScheduleOptions};
use hyinv_core::polyideal::{parse_poly, set_step_budget, MonoOrder, PolyIdeal, Ring};
use hyinv_core::semigroup::semigroup_closure;

#[derive(Parser, Debug)]
#[command(
    name = "hyinv",
    version,
    about = "Strongest algebraic invariants of linear hybrid automata"
)]
struct Cli {
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Human, global = true)]
    format: Format,
    /// Cap on Gröbner reduction steps (overrides HYINV_STEP_BUDGET).
    #[arg(long, global = true)]
    step_budget: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Machine,
}

#[derive(Args, Debug, Clone, Copy)]
struct RealFlag {
    /// Restrict the output to real points (default).
    #[arg(long, conflicts_with = "complex")]
    real: bool,
    /// Keep the complex closure.
    #[arg(long)]
    complex: bool,
}

impl RealFlag {
    fn real(self) -> bool {
        !self.complex
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Zariski closure of the one-parameter group of a matrix.
    ClosureExp {
        matrix: PathBuf,
        #[command(flatten)]
        real: RealFlag,
    },
    /// Closure of the semigroup generated by the flows of several matrices.
    Semigroup {
        #[arg(required = true)]
        matrices: Vec<PathBuf>,
        #[command(flatten)]
        real: RealFlag,
    },
    /// Replace every flow by an equivalent discrete self-loop.
    Discretise { model: PathBuf },
    /// Per-location invariant ideals.
    Invariants {
        model: PathBuf,
        #[arg(long, default_value_t = 64)]
        max_rounds: usize,
        #[command(flatten)]
        real: RealFlag,
    },
    /// Exact inductiveness check of a candidate family.
    Check {
        model: PathBuf,
        #[arg(long)]
        candidate: PathBuf,
    },
    /// Numeric falsification of the computed invariants on random runs.
    Simulate {
        model: PathBuf,
        #[arg(long, default_value_t = 100)]
        schedules: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long, default_value_t = 64)]
        max_rounds: usize,
    },
    /// Dimension of the variety of an ideal file.
    Dimension { ideal: PathBuf },
}

/// Ideal file: variables, optional field, generators.
#[derive(Serialize, Deserialize, Debug)]
#[serde(deny_unknown_fields)]
struct RawIdeal {
    variables: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    field: Option<RawField>,
    ideal: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dimension: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    iterations_used: Option<usize>,
}

fn raw_ideal(ideal: &PolyIdeal<NfElem>, iterations: Option<usize>) -> Result<RawIdeal> {
    let k = &ideal.ring().ctx;
    Ok(RawIdeal {
        variables: ideal.ring().vars.clone(),
        field: if k.is_rationals() {
            None
        } else {
            let (minpoly, root) = field_spec(k);
            Some(RawField { minpoly, root })
        },
        ideal: ideal.groebner_basis()?.iter().map(|g| g.to_string()).collect(),
        dimension: Some(ideal.dimension()?),
        iterations_used: iterations,
    })
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("read stage: cannot open {}", path.display()))
}

fn load_model(path: &Path) -> Result<HybridAutomaton> {
    parse_automaton(&read(path)?).with_context(|| format!("parse stage: {}", path.display()))
}

struct Outcome {
    text: String,
    code: u8,
}

fn ok(text: String) -> Result<Outcome> {
    Ok(Outcome { text, code: 0 })
}

fn render_ideal(fmt: Format, ideal: &PolyIdeal<NfElem>, iterations: Option<usize>) -> Result<String> {
    let raw = raw_ideal(ideal, iterations)?;
    match fmt {
        Format::Machine => Ok(serde_json::to_string_pretty(&raw)? + "\n"),
        Format::Human => {
            let mut s = format!("dimension {}\n", raw.dimension.unwrap_or(-1));
            if let Some(n) = iterations {
                s += &format!("iterations_used {n}\n");
            }
            for g in &raw.ideal {
                s += &format!("  {g}\n");
            }
            Ok(s)
        }
    }
}

fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::ClosureExp { matrix, real } => {
            let m = parse_matrices(&[&read(matrix)?]).with_context(|| format!("parse stage: {}", matrix.display()))?;
            let mut ideal = one_param_closure(&m[0]).context("closure stage")?.ideal;
            if real.real() {
                ideal = ideal.real_restrict().context("real restriction stage")?;
            }
            ok(render_ideal(cli.format, &ideal, None)?)
        }
        Command::Semigroup { matrices, real } => {
            let texts = matrices.iter().map(|p| read(p)).collect::<Result<Vec<_>>>()?;
            let refs: Vec<&str> = texts.iter().map(|s| s.as_str()).collect();
            let m = parse_matrices(&refs).context("parse stage: matrix files")?;
            let s = semigroup_closure(&m).context("semigroup stage")?;
            let ideal = if real.real() { s.ideal.real_restrict()? } else { s.ideal };
            ok(render_ideal(cli.format, &ideal, Some(s.iterations_used))?)
        }
        Command::Discretise { model } => {
            let h = load_model(model)?;
            let (out, certs) = discretise_automaton(&h).context("discretisation stage")?;
            for (l, c) in h.locations.iter().zip(&certs) {
                if c.is_some() {
                    log::info!(
                        "location {}: cyclic closure of the self-loop equals the flow closure",
                        l.name
                    );
                }
            }
            ok(out.to_raw()?.to_json() + "\n")
        }
        Command::Invariants {
            model,
            max_rounds,
            real,
        } => {
            let h = load_model(model)?;
            let fam = collecting_closure(
                &h,
                EngineOptions {
                    max_rounds: *max_rounds,
                    real: real.real(),
                },
            )
            .context("fixpoint stage")?;
            let text = match cli.format {
                Format::Human => fam.to_human()?,
                Format::Machine => fam.to_machine()? + "\n",
            };
            Ok(Outcome {
                text,
                code: if fam.converged { 0 } else { 2 },
            })
        }
        Command::Check { model, candidate } => {
            let h = load_model(model)?;
            let cand = InvariantFamily::from_machine(&h, &read(candidate)?)
                .with_context(|| format!("parse stage: {}", candidate.display()))?;
            let r = check_inductive(&h, &cand).context("check stage")?;
            let text = match cli.format {
                Format::Human => r.to_string(),
                Format::Machine => {
                    let v: Vec<_> = r
                        .violations
                        .iter()
                        .map(|v| {
                            serde_json::json!({
                                "location": v.location,
                                "generator": v.generator,
                                "kind": format!("{:?}", v.kind).to_lowercase(),
                            })
                        })
                        .collect();
                    serde_json::to_string_pretty(&serde_json::json!({
                        "passed": r.passed(),
                        "checked": r.checked,
                        "violations": v,
                    }))? + "\n"
                }
            };
            Ok(Outcome {
                text,
                code: if r.passed() { 0 } else { 1 },
            })
        }
        Command::Simulate {
            model,
            schedules,
            seed,
            tol,
            max_rounds,
        } => {
            let h = load_model(model)?;
            let fam = collecting_closure(
                &h,
                EngineOptions {
                    max_rounds: *max_rounds,
                    real: true,
                },
            )
            .context("fixpoint stage")?;
            let trs =
                random_trajectories(&h, *schedules, *seed, ScheduleOptions::default()).context("simulation stage")?;
            let r = numeric_falsify(&fam, &trs, *tol)?;
            let text = match cli.format {
                Format::Human => format!("seed {seed}, {} trajectories\n{r}", trs.len()),
                Format::Machine => {
                    let rows: Vec<_> = r
                        .rows
                        .iter()
                        .map(|g| {
                            serde_json::json!({
                                "location": g.location,
                                "generator": g.generator,
                                "max_residual": g.max_residual,
                                "first_failure": g.first_failure,
                            })
                        })
                        .collect();
                    serde_json::to_string_pretty(&serde_json::json!({
                        "seed": seed,
                        "trajectories": trs.len(),
                        "tol": tol,
                        "passed": r.passed(),
                        "rows": rows,
                    }))? + "\n"
                }
            };
            let code = if !r.passed() {
                1
            } else if !fam.converged {
                2
            } else {
                0
            };
            Ok(Outcome { text, code })
        }
        Command::Dimension { ideal } => {
            let text = read(ideal)?;
            let raw: RawIdeal = serde_json::from_str(&text)
                .map_err(|e| anyhow!("parse stage: {}:{}:{}: {e}", ideal.display(), e.line(), e.column()))?;
            let k = match &raw.field {
                None => NumberField::rationals(),
                Some(f) => {
                    field_from_spec(&f.minpoly, &f.root).with_context(|| format!("parse stage: {}", ideal.display()))?
                }
            };
            let ring = Ring::<NfElem>::with_vars(&k, raw.variables.clone(), MonoOrder::Grevlex);
            let gens = raw
                .ideal
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    parse_poly(&ring, s).with_context(|| format!("parse stage: {}: ideal[{i}]", ideal.display()))
                })
                .collect::<Result<Vec<_>>>()?;
            let p = PolyIdeal::new(&ring, gens);
            let d = p.dimension().context("dimension stage")?;
            ok(match cli.format {
                Format::Human => format!("{d}\n"),
                Format::Machine => serde_json::to_string(&serde_json::json!({ "dimension": d }))? + "\n",
            })
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(n) = cli.step_budget {
        set_step_budget(n);
    }
    match run(&cli) {
        Ok(o) => {
            print!("{}", o.text);
            ExitCode::from(o.code)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
