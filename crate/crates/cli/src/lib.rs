//! Command-line front end for `quinrep`.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use quinrep::escalation::Theorem;
use quinrep::form::{exceeds_positivity_bound, positivity_bound};
use quinrep::local::{local_answer, RuleSet};
use quinrep::oracle::exceptions_csv;
use quinrep::verify::{self, SCOPE_NOTE};
use quinrep::{BinaryForm, GramLattice, Oracle, Representation};
use serde_json::json;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NOT_REPRESENTED: i32 = 1;
pub const EXIT_MISMATCH: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Parser, Debug)]
#[command(name = "quinrep", version, about = "Representations of binary forms by quaternary and quinary lattices")]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    /// Worker threads for `exceptions` and `verify` (default: all cores).
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    pub workers: Option<u32>,
    /// Rule table file; overrides QUINREP_TABLES.
    #[arg(long, global = true)]
    pub tables: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Args, Debug, Clone, Copy)]
pub struct FormArgs {
    #[arg(allow_negative_numbers = true)]
    pub a: i64,
    #[arg(allow_negative_numbers = true)]
    pub b: i64,
    #[arg(allow_negative_numbers = true)]
    pub c: i64,
}

impl FormArgs {
    fn form(self) -> BinaryForm {
        BinaryForm::new(self.a, self.b, self.c)
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Minkowski-reduce a form.
    Reduce {
        #[command(flatten)]
        form: FormArgs,
    },
    /// Certificate or exhaustion proof for one form.
    Represent {
        /// Diagonal entries `1,1,1,3,7` or `@path` to a JSON Gram matrix.
        #[arg(long)]
        lattice: String,
        #[command(flatten)]
        form: FormArgs,
    },
    /// All reduced forms with `c <= bound` that the lattice misses.
    Exceptions {
        #[arg(long)]
        lattice: String,
        #[arg(long, value_parser = clap::value_parser!(i64).range(1..))]
        bound: i64,
    },
    /// Representation over the p-adic integers by a quaternary lattice.
    Local {
        #[arg(long)]
        lattice: String,
        #[arg(long)]
        prime: i64,
        #[command(flatten)]
        form: FormArgs,
    },
    /// Re-derive published exception lists up to a bound.
    Verify {
        #[arg(long, value_enum)]
        theorem: VerifyTarget,
        #[arg(long, default_value_t = verify::DEFAULT_BOUND, value_parser = clap::value_parser!(i64).range(1..))]
        bound: i64,
    },
    /// Apply `[a - n s^2, b - n s t, c - n t^2]`.
    Transform {
        #[command(flatten)]
        form: FormArgs,
        #[arg(long, allow_negative_numbers = true)]
        n: i64,
        #[arg(long, allow_negative_numbers = true)]
        s: i64,
        #[arg(long, allow_negative_numbers = true)]
        t: i64,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum VerifyTarget {
    T2,
    T3a,
    T3b,
    Table1,
    All,
}

/// Parse `argv` and execute, writing results to `out` and diagnostics to `err`.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = if code == EXIT_OK { write!(out, "{}", e.render()) } else { write!(err, "{}", e.render()) };
            return code;
        }
    };
    let workers = cli.workers;
    let result = match workers {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n as usize).build() {
            Ok(pool) => {
                let mut buf = Vec::new();
                let r = pool.install(|| execute(&cli, &mut buf));
                let _ = out.write_all(&buf);
                r
            }
            Err(e) => Err(Failure::Usage(e.to_string())),
        },
        None => execute(&cli, out),
    };
    match result {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Io(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

enum Failure {
    Usage(String),
    Io(std::io::Error),
}

impl From<quinrep::Error> for Failure {
    fn from(e: quinrep::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

type Outcome = std::result::Result<i32, Failure>;

fn parse_lattice(spec: &str) -> Result<GramLattice, Failure> {
    match spec.strip_prefix('@') {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{path}: {e}")))?;
            Ok(GramLattice::from_json(&text)?)
        }
        None => Ok(spec.parse()?),
    }
}

fn rules(cli: &Cli) -> Result<RuleSet, Failure> {
    Ok(match &cli.tables {
        Some(path) => RuleSet::from_path(path)?,
        None => RuleSet::from_env()?,
    })
}

fn json_line(out: &mut dyn Write, value: &impl serde::Serialize) -> std::io::Result<()> {
    let s = serde_json::to_string_pretty(value).expect("report serializes");
    writeln!(out, "{s}")
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Outcome {
    let fmt = cli.format;
    match &cli.command {
        Command::Reduce { form } => {
            let f = form.form();
            let (r, t) = f.minkowski_reduce()?;
            match fmt {
                Format::Text => writeln!(out, "{r}")?,
                Format::Csv => writeln!(out, "a,b,c\n{},{},{}", r.a, r.b, r.c)?,
                Format::Json => json_line(out, &json!({ "form": f, "reduced": r, "transform": t }))?,
            }
            Ok(EXIT_OK)
        }
        Command::Represent { lattice, form } => {
            let l = parse_lattice(lattice)?;
            let f = form.form();
            let rep = Oracle::new(l.clone())?.represents(&f)?;
            match fmt {
                Format::Json => json_line(out, &json!({ "lattice": l, "form": f, "result": rep }))?,
                Format::Csv => {
                    writeln!(out, "a,b,c,represented")?;
                    writeln!(out, "{},{},{},{}", f.a, f.b, f.c, rep.is_represented())?;
                }
                Format::Text => match &rep {
                    Representation::Represented { certificate } => {
                        writeln!(out, "{f} is represented by {l}")?;
                        writeln!(out, "  v1 = {:?}", certificate.v1)?;
                        writeln!(out, "  v2 = {:?}", certificate.v2)?;
                    }
                    Representation::NotRepresented { proof } => {
                        writeln!(out, "{f} is not represented by {l}")?;
                        writeln!(
                            out,
                            "  exhausted {} x {} vectors of norms {} and {} ({} pairs)",
                            proof.counts[0], proof.counts[1], proof.norms[0], proof.norms[1], proof.pairs_checked
                        )?;
                    }
                },
            }
            Ok(if rep.is_represented() { EXIT_OK } else { EXIT_NOT_REPRESENTED })
        }
        Command::Exceptions { lattice, bound } => {
            let l = parse_lattice(lattice)?;
            let forms = Oracle::new(l.clone())?.exceptions_up_to(*bound)?;
            match fmt {
                Format::Csv => write!(out, "{}", exceptions_csv(&forms))?,
                Format::Json => json_line(
                    out,
                    &json!({ "lattice": l, "bound": bound, "exceptions": forms, "note": SCOPE_NOTE }),
                )?,
                Format::Text => {
                    let list: Vec<String> = forms.iter().map(|f| f.to_string()).collect();
                    writeln!(out, "{} exceptions of {l} with c <= {bound}: {}", forms.len(), list.join(" "))?;
                    writeln!(out, "note: {SCOPE_NOTE}")?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Local { lattice, prime, form } => {
            let l = parse_lattice(lattice)?;
            let f = form.form();
            let ans = local_answer(&l, &f, *prime)?;
            match fmt {
                Format::Json => json_line(out, &json!({ "lattice": l, "form": f, "prime": prime, "answer": ans }))?,
                Format::Csv => {
                    writeln!(out, "a,b,c,prime,represented")?;
                    writeln!(out, "{},{},{},{},{}", f.a, f.b, f.c, prime, ans.represented)?;
                }
                Format::Text => {
                    let verb = if ans.represented { "is" } else { "is not" };
                    writeln!(out, "{f} {verb} represented by {l} over Z_{prime} ({:?})", ans.method)?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Verify { theorem, bound } => {
            let rules = rules(cli)?;
            let (ok, text, value) = match theorem {
                VerifyTarget::All => {
                    let r = verify::verify_all(*bound, &rules)?;
                    (r.ok(), r.to_text(), serde_json::to_value(&r))
                }
                VerifyTarget::Table1 => {
                    let r = verify::verify_table1(*bound)?;
                    (r.consistent, r.to_text(), serde_json::to_value(&r))
                }
                t => {
                    let id = match t {
                        VerifyTarget::T2 => Theorem::T2,
                        VerifyTarget::T3a => Theorem::T3a,
                        _ => Theorem::T3b,
                    };
                    let r = verify::verify_theorem(id, *bound, &rules)?;
                    (r.ok(), r.to_text(), serde_json::to_value(&r))
                }
            };
            match fmt {
                Format::Json => json_line(out, &value.expect("report serializes"))?,
                Format::Csv | Format::Text => write!(out, "{text}")?,
            }
            Ok(if ok { EXIT_OK } else { EXIT_MISMATCH })
        }
        Command::Transform { form, n, s, t } => {
            let f = form.form();
            let g = f.transform_st(*n, *s, *t);
            let above = exceeds_positivity_bound(f.a, *n, *s, *t);
            let bound = positivity_bound(*n, *s, *t);
            match fmt {
                Format::Json => json_line(
                    out,
                    &json!({
                        "form": f, "n": n, "s": s, "t": t, "result": g,
                        "positive_definite": g.is_positive_definite(),
                        "positivity_bound": bound.to_string(),
                        "above_positivity_bound": above,
                    }),
                )?,
                Format::Csv => {
                    writeln!(out, "a,b,c,positive_definite")?;
                    writeln!(out, "{},{},{},{}", g.a, g.b, g.c, g.is_positive_definite())?;
                }
                Format::Text => {
                    writeln!(out, "{g}")?;
                    writeln!(
                        out,
                        "positive definite: {}; a > {bound}: {above}",
                        g.is_positive_definite()
                    )?;
                }
            }
            Ok(EXIT_OK)
        }
    }
}
