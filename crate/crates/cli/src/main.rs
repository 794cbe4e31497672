use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use gradus::cli::{emit, parse_window, run, CommandConfig, Format, Verb};

/// Exact local cohomology and local homology over F_p[x_1..x_n].
///
/// Verbs: hilbert, dim, depth, cm, sop, koszul, lc, lh, ndim, width, cocm,
/// verify <prop21|cor22|prop23|prop24|cocm|thm31|cor32|thm34>.
/// `lh`, `ndim`, `width`, `cocm` and `verify thm34` act on the graded dual of
/// the module file.
#[derive(Parser, Debug)]
#[command(name = "gradus", version)]
struct Args {
    verb: String,
    statement: Option<String>,
    #[arg(long)]
    module: Option<PathBuf>,
    /// Comma-separated ideal generators (default: the variables).
    #[arg(long)]
    ideal: Option<String>,
    /// Comma-separated sequence (system of parameters, regular sequence, ...).
    #[arg(long)]
    sop: Option<String>,
    /// Degree window `lo..hi`.
    #[arg(long, allow_hyphen_values = true)]
    window: Option<String>,
    #[arg(long)]
    levels: Option<u32>,
    #[arg(long, default_value_t = 2)]
    streak: u32,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 20)]
    trials: u32,
    /// (Co)homological index for koszul, lc and lh.
    #[arg(long)]
    index: Option<usize>,
    #[arg(long, default_value = "text")]
    format: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn config(args: Args) -> gradus::Result<CommandConfig> {
    let mut cfg = CommandConfig::new(Verb::parse(&args.verb, args.statement.as_deref())?);
    cfg.module = args.module;
    cfg.ideal = args.ideal;
    cfg.sop = args.sop;
    cfg.window = args.window.as_deref().map(parse_window).transpose()?;
    cfg.levels = args.levels;
    cfg.streak = args.streak;
    cfg.seed = args.seed;
    cfg.trials = args.trials;
    cfg.index = args.index;
    cfg.format = args.format.parse::<Format>()?;
    cfg.out = args.out;
    Ok(cfg)
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    if let Some(n) = std::env::var("GRADUS_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let cfg = match config(args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let outcome = match run(&cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let text = emit(&outcome.envelope, cfg.format);
    match &cfg.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(1);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(outcome.exit_code as u8)
}
