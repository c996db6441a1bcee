//! `mtlab` command-line driver.
//!
//! Exit codes: 0 on success, 2 on usage or validation errors, 1 on runtime
//! failures such as unreadable files.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mtlab::corpus::{synth, LabeledCorpus, Scheme};
use mtlab::harness::{
    evaluate_formula, fit_formula, load_records, report, run_sweep, FitReport, SweepGrid,
    SweepOptions,
};
use mtlab::symreg::{Expr, GpConfig};
use mtlab::tasksim::simulate_tasks;
use mtlab::Error;

#[derive(Parser)]
#[command(name = "mtlab", version, about = "Multitask generalization laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate synthetic label columns from a labeled corpus.
    Simulate {
        /// CoNLL corpus (IOB1 unless --scheme says otherwise); the bundled corpus when absent.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "iob1")]
        scheme: SchemeArg,
        /// Number of synthetic tasks.
        #[arg(long)]
        tasks: usize,
        /// Comma-separated alphas, one per synthetic task, or one for all.
        #[arg(long, value_delimiter = ',', required = true)]
        alpha: Vec<f64>,
        /// Tokens to label; the whole corpus when absent.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run (or resume) a sweep described by a JSON grid file.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Worker threads.
        #[arg(long, env = "MTLAB_PARALLEL")]
        parallel: Option<usize>,
        /// Stop after this many newly computed cells.
        #[arg(long)]
        max_cells: Option<usize>,
        /// Suppress per-cell progress lines.
        #[arg(long)]
        quiet: bool,
    },
    /// Fit a formula to sweep records with genetic programming.
    Fit {
        #[arg(long)]
        records: PathBuf,
        /// Comma-separated input columns, bound to x1, x2, ... in order.
        #[arg(long, value_delimiter = ',', required = true)]
        inputs: Vec<String>,
        #[arg(long, default_value = "f1_mean")]
        target: String,
        /// Factor applied to the target before fitting.
        #[arg(long, default_value_t = 100.0)]
        scale: f64,
        #[arg(long, default_value_t = 20)]
        generations: usize,
        #[arg(long, default_value_t = 1000)]
        population: usize,
        #[arg(long, default_value_t = 0.2)]
        parsimony: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Report file; `<records>.fit.json` when absent.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Mean squared error of a given formula on sweep records.
    Eval {
        /// S-expression such as `mul(sqrt(x1), 20)`.
        #[arg(long)]
        expr: String,
        #[arg(long)]
        records: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        inputs: Vec<String>,
        #[arg(long, default_value = "f1_mean")]
        target: String,
        #[arg(long, default_value_t = 100.0)]
        scale: f64,
    },
    /// Summary tables and SVG line charts of sweep records.
    Report {
        #[arg(long)]
        records: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Write the synthetic newswire corpus as CoNLL text.
    Corpus {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = synth::BUNDLED_TOKENS)]
        tokens: usize,
        #[arg(long, default_value_t = synth::BUNDLED_SEED)]
        seed: u64,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum SchemeArg {
    Iob1,
    Iob2,
    Io,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Iob1 => Scheme::Iob1,
            SchemeArg::Iob2 => Scheme::Iob2,
            SchemeArg::Io => Scheme::Io,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_validation() { 2 } else { 1 })
        }
    }
}

fn run(command: Command) -> mtlab::Result<()> {
    match command {
        Command::Simulate {
            input,
            scheme,
            tasks,
            alpha,
            samples,
            seed,
            out,
        } => simulate(input.as_deref(), scheme.into(), tasks, &alpha, samples, seed, &out),
        Command::Sweep {
            config,
            out,
            parallel,
            max_cells,
            quiet,
        } => {
            let grid = SweepGrid::read(&config)?;
            let opts = SweepOptions {
                output: Some(out.clone()),
                parallel,
                max_new_cells: max_cells,
                progress: !quiet,
            };
            let outcome = run_sweep(&grid, &opts)?;
            if outcome.computed == 0 && outcome.complete {
                println!("all cells present in {}", out.display());
            } else {
                println!(
                    "computed {} cells, kept {}; {} of {} cells present in {}",
                    outcome.computed,
                    outcome.skipped,
                    outcome.records.len(),
                    grid.cells().len(),
                    out.display()
                );
            }
            Ok(())
        }
        Command::Fit {
            records,
            inputs,
            target,
            scale,
            generations,
            population,
            parsimony,
            seed,
            report,
        } => {
            let rs = load_records(&records, None)?;
            let inputs: Vec<&str> = inputs.iter().map(String::as_str).collect();
            let gp = GpConfig {
                population_size: population,
                generations,
                parsimony,
                seed,
                ..GpConfig::default()
            };
            let fit = fit_formula(&rs, &inputs, &target, scale, &gp)?;
            let summary = FitReport::new(&fit, &inputs, &target, seed, rs.len());
            let path = report.unwrap_or_else(|| records.with_extension("fit.json"));
            std::fs::write(&path, summary.to_json()? + "\n")?;
            println!("{} = {}", target, summary.infix);
            println!("sexpr: {}", summary.sexpr);
            println!("train MSE: {}", summary.train_mse);
            match summary.test_mse {
                Some(m) => println!("test MSE: {m}"),
                None => println!("test MSE: n/a"),
            }
            println!("report: {}", path.display());
            Ok(())
        }
        Command::Eval {
            expr,
            records,
            inputs,
            target,
            scale,
        } => {
            let e: Expr = expr.parse()?;
            let rs = load_records(&records, None)?;
            let inputs: Vec<&str> = inputs.iter().map(String::as_str).collect();
            let mse = evaluate_formula(&e, &rs, &inputs, &target, scale)?;
            println!("{}", e.to_infix());
            println!("MSE: {mse}");
            Ok(())
        }
        Command::Report { records, out_dir } => {
            let rs = load_records(&records, None)?;
            for path in report::write_report(&rs, &out_dir)? {
                println!("{}", path.display());
            }
            Ok(())
        }
        Command::Corpus { out, tokens, seed } => {
            synth::generate(tokens, seed).write(&out)?;
            println!("wrote {}", out.display());
            Ok(())
        }
    }
}

fn simulate(
    input: Option<&Path>,
    scheme: Scheme,
    synthetic: usize,
    alpha: &[f64],
    samples: Option<usize>,
    seed: u64,
    out: &Path,
) -> mtlab::Result<()> {
    let corpus = match input {
        Some(path) => LabeledCorpus::read(path, scheme)?,
        None => synth::bundled(),
    };
    let io = if corpus.scheme() == Scheme::Io {
        corpus
    } else {
        corpus.convert_iob_to_io()?
    };
    let alphas = match alpha {
        [a] => vec![*a; synthetic],
        _ if alpha.len() == synthetic => alpha.to_vec(),
        _ => {
            return Err(Error::InvalidConfig(format!(
                "{} alphas for {synthetic} synthetic tasks",
                alpha.len()
            )))
        }
    };
    let real = io.label_indices();
    let n = samples.unwrap_or(real.len());
    let ts = simulate_tasks(&real, io.label_set(), synthetic + 1, n, &alphas, seed)?;
    std::fs::write(out, ts.to_json()? + "\n")?;
    println!("task\talpha\tami");
    for (t, (a, m)) in ts.alphas.iter().zip(&ts.ami).enumerate() {
        println!("{}\t{a}\t{m:.6}", t + 1);
    }
    Ok(())
}
