use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use vl_core::bench::{run_grid, CSV_HEADER};
use vl_core::driver::{Compilation, DriverError};
use vl_core::lambdavl::{eval, parse_lterm};
use vl_core::surface::{discover_registry, load_repository, parse_module, SurfaceError};

/// Inference runs recursively over the syntax tree; deep programs need
/// more than the default main-thread stack.
const STACK_BYTES: usize = 256 << 20;

#[derive(Parser)]
#[command(name = "vlc", version, about = "Compiler for VL programs that mix module versions")]
struct Cli {
    /// Directory holding <Module>/<version>/<Module>.vl trees (repeatable).
    /// Defaults to the entry file's directory.
    #[arg(long = "module-path", global = true)]
    module_path: Vec<PathBuf>,

    /// Dump an intermediate artifact during `check`.
    #[arg(long, global = true, value_enum)]
    emit: Option<Emit>,

    /// Print the specialized program before running it.
    #[arg(long, global = true)]
    trace: bool,

    /// Seed for the bench workload.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Evaluation step budget.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    fuel: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Emit {
    Constraints,
    Interface,
    Smt2,
}

#[derive(Subcommand)]
enum Command {
    /// Type-check and version-check every definition of the entry module.
    Check {
        file: PathBuf,
        /// Directory for `--emit smt2` output.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Compile and evaluate the entry definition.
    Run {
        file: PathBuf,
        #[arg(long, default_value = "main")]
        entry: String,
    },
    /// Write the version-specialized program.
    Build {
        file: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "main")]
        entry: String,
    },
    /// Evaluate a core-calculus term and print its reduction trace.
    CoreEval { file: PathBuf },
    /// Time constraint solving on the synthetic list workload.
    Bench {
        #[arg(long, default_value_t = 4)]
        mods: usize,
        #[arg(long, default_value_t = 4)]
        vers: usize,
        #[arg(long, default_value_t = 10)]
        reps: usize,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl From<DriverError> for Failure {
    fn from(e: DriverError) -> Self {
        Failure { code: e.exit_code() as u8, message: e.to_string() }
    }
}

impl From<SurfaceError> for Failure {
    fn from(e: SurfaceError) -> Self {
        Failure { code: 2, message: e.to_string() }
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure { code: 2, message: format!("{}: {e}", path.display()) }
}

fn compile(cli: &Cli, file: &Path) -> Result<Compilation, Failure> {
    let src = fs::read_to_string(file).map_err(|e| io_failure(file, e))?;
    let entry = parse_module(&src).map_err(|e| SurfaceError::InFile { path: file.to_path_buf(), source: Box::new(e) })?;
    let roots = if cli.module_path.is_empty() {
        vec![file.parent().map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("."))]
    } else {
        cli.module_path.clone()
    };
    let reg = discover_registry(&roots)?;
    let repo = load_repository(&roots, &reg)?;
    Ok(Compilation::new(&repo, &entry)?)
}

fn execute(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Check { file, out } => {
            let comp = compile(cli, file)?;
            match cli.emit {
                Some(Emit::Constraints) => print!("{}", comp.emit_constraints()),
                Some(Emit::Interface) => print!("{}", comp.emit_interface()),
                Some(Emit::Smt2) => {
                    fs::create_dir_all(out).map_err(|e| io_failure(out, e))?;
                    let stem = file.file_stem().and_then(|s| s.to_str()).unwrap_or("entry");
                    for name in &comp.entry_defs {
                        let path = out.join(format!("{stem}.{name}.smt2"));
                        fs::write(&path, comp.emit_smt2(name)?).map_err(|e| io_failure(&path, e))?;
                        println!("wrote {}", path.display());
                    }
                }
                None => {}
            }
            for (name, a) in comp.check()? {
                let d = comp.entry_def(&name)?;
                match a.get(&d.outer()) {
                    Some(l) if !l.is_empty() => println!("{name} : {l}"),
                    _ => println!("{name} : ok"),
                }
            }
            Ok(())
        }
        Command::Run { file, entry } => {
            let comp = compile(cli, file)?;
            if cli.trace {
                eprint!("{}", comp.specialize(entry)?);
            }
            println!("{}", comp.run(entry, cli.fuel)?);
            Ok(())
        }
        Command::Build { file, out, entry } => {
            let comp = compile(cli, file)?;
            let prog = comp.specialize(entry)?;
            fs::create_dir_all(out).map_err(|e| io_failure(out, e))?;
            let path = out.join(format!("{}.vl", comp.entry_module));
            fs::write(&path, prog.to_string())
                .map_err(|e| io_failure(&path, e))?;
            println!("wrote {}", path.display());
            Ok(())
        }
        Command::CoreEval { file } => {
            let src = fs::read_to_string(file).map_err(|e| io_failure(file, e))?;
            let t = parse_lterm(&src).map_err(|e| Failure { code: 2, message: format!("{}: {e}", file.display()) })?;
            let mut step = 0usize;
            let res = eval(&t, cli.fuel as usize, &mut |u| {
                println!("{step:>4}  {u}");
                step += 1;
            });
            match res {
                Ok(o) if o.value => {
                    println!("value after {} steps", o.steps);
                    Ok(())
                }
                Ok(o) => Err(Failure { code: 1, message: format!("stuck after {} steps: {}", o.steps, o.term) }),
                Err(e) => Err(Failure { code: 1, message: e.to_string() }),
            }
        }
        Command::Bench { mods, vers, reps } => {
            println!("{CSV_HEADER}");
            for row in run_grid((*mods).max(1), (*vers).max(1), *reps, cli.seed)? {
                println!("{row}");
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let worker = std::thread::Builder::new().stack_size(STACK_BYTES).spawn(move || execute(&cli));
    let result = match worker {
        Ok(h) => h.join().unwrap_or_else(|_| Err(Failure { code: 1, message: "internal error".into() })),
        Err(e) => Err(Failure { code: 1, message: e.to_string() }),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.message);
            ExitCode::from(f.code)
        }
    }
}
