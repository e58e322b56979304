use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dualform::analysis::{curried_signature, validate};
use dualform::assembler::{assemble_with, AssemblyOptions};

use dualform_cli::scenario::{self, RequestAction, Resolved};
use dualform_cli::{demos, tensor_file};

/// Check, assemble and demonstrate multilinear forms with dual spaces.
#[derive(Parser)]
#[command(name = "dualform", version)]
struct Cli {
    /// Quadrature degree used for every integral instead of the estimate.
    #[arg(long, global = true)]
    quadrature_degree: Option<u32>,
    /// Directory for tensor files (defaults to the current directory).
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate every requested form and print its signature.
    Check { file: PathBuf },
    /// Assemble the requested forms and write tensor files.
    Assemble { file: PathBuf },
    /// Run a built-in worked example.
    Demo {
        /// One of the names listed by `dualform demo list`.
        name: String,
    },
    /// Re-serialize a scenario in canonical form.
    Dump { file: PathBuf },
}

const SEMANTIC: u8 = 1;
const PARSE: u8 = 2;

struct Failure {
    code: u8,
}

type Outcome = Result<(), Failure>;

fn semantic(code: &str, message: impl std::fmt::Display) -> Failure {
    eprintln!("{code}: {message}");
    Failure { code: SEMANTIC }
}

fn load(path: &Path) -> Result<scenario::Scenario, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        eprintln!("IO_ERROR: cannot read {}: {e}", path.display());
        Failure { code: PARSE }
    })?;
    scenario::parse(&text).map_err(|e| {
        match e.position() {
            Some((line, col)) => eprintln!("PARSE_ERROR at {}:{line}:{col}: {e}", path.display()),
            None => eprintln!("PARSE_ERROR in {}: {e}", path.display()),
        }
        Failure { code: PARSE }
    })
}

fn resolve(s: &scenario::Scenario) -> Result<Resolved, Failure> {
    scenario::resolve(s).map_err(|e| semantic(&e.code, e.message))
}

fn check(path: &Path) -> Outcome {
    let s = load(path)?;
    let mut r = resolve(&s)?;
    let mut failed = false;
    let mut targets: Vec<&str> = s.requests.iter().map(|q| q.target.as_str()).collect();
    if targets.is_empty() {
        targets = s.forms.keys().map(String::as_str).collect();
    }
    targets.dedup();
    for target in targets {
        let form = match r.form(target) {
            Ok(f) => f,
            Err(e) => {
                eprintln!("{}: {target}: {}", e.code, e.message);
                failed = true;
                continue;
            }
        };
        match validate(&form) {
            Ok(sig) => println!("{target}: {}", curried_signature(&sig, &r.names)),
            Err(diags) => {
                failed = true;
                for d in diags {
                    eprintln!("{target}: {d}");
                }
            }
        }
    }
    if failed {
        Err(Failure { code: SEMANTIC })
    } else {
        Ok(())
    }
}

fn output_path(dir: &Option<PathBuf>, name: &str) -> PathBuf {
    match dir {
        Some(d) => d.join(name),
        None => PathBuf::from(name),
    }
}

fn write_file(path: &Path, text: &str) -> Outcome {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| semantic("IO_ERROR", e))?;
    }
    std::fs::write(path, text)
        .map_err(|e| semantic("IO_ERROR", format!("cannot write {}: {e}", path.display())))
}

fn assemble(path: &Path, cli: &Cli) -> Outcome {
    let s = load(path)?;
    let mut r = resolve(&s)?;
    let options = AssemblyOptions {
        quadrature_degree: cli.quadrature_degree,
    };
    for req in &s.requests {
        let form = r.form(&req.target).map_err(|e| semantic(&e.code, e.message))?;
        let sig = validate(&form).map_err(|diags| {
            for d in &diags {
                eprintln!("{}: {d}", req.target);
            }
            Failure { code: SEMANTIC }
        })?;
        match req.action {
            RequestAction::Validate | RequestAction::Signature => {
                println!("{}: {}", req.target, curried_signature(&sig, &r.names));
            }
            RequestAction::Assemble => {
                let t = assemble_with(&form, &options)
                    .map_err(|e| semantic(e.code(), format!("{}: {e}", req.target)))?;
                let name = req
                    .output
                    .clone()
                    .unwrap_or_else(|| format!("{}.tensor", req.target));
                let out = output_path(&cli.output_dir, &name);
                write_file(&out, &tensor_file::write(&t, &r.names))?;
                let shape: Vec<String> = t.shape().iter().map(usize::to_string).collect();
                println!(
                    "{}: {} [{}] -> {}",
                    req.target,
                    t.kind(),
                    shape.join("×"),
                    out.display()
                );
            }
        }
    }
    Ok(())
}

fn demo(name: &str, cli: &Cli) -> Outcome {
    if name == "list" {
        for n in demos::NAMES {
            println!("{n}");
        }
        return Ok(());
    }
    let out = match demos::run(name) {
        None => {
            return Err(semantic(
                "UNKNOWN_DEMO",
                format!("no demo `{name}`; available: {}", demos::NAMES.join(", ")),
            ))
        }
        Some(r) => r.map_err(|e| semantic(e.code(), e))?,
    };
    print!("{}", out.text);
    if let Some(dir) = &cli.output_dir {
        for (i, (_, t)) in out.tensors.iter().enumerate() {
            let path = dir.join(format!("{name}_{i}.tensor"));
            write_file(&path, &tensor_file::write(t, &Default::default()))?;
        }
    }
    Ok(())
}

fn dump(path: &Path) -> Outcome {
    let s = load(path)?;
    print!("{}", scenario::dump(&s));
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Check { file } => check(file),
        Command::Assemble { file } => assemble(file, &cli),
        Command::Demo { name } => demo(name, &cli),
        Command::Dump { file } => dump(file),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => ExitCode::from(f.code),
    }
}
