use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use condtest::adaptive::PrimitiveMode;
use condtest::trials::{run_batch, Algorithm, BatchConfig, Property};

#[derive(Parser)]
#[command(
    name = "condtest",
    version,
    about = "Seeded trial batches of conditional-sampling testers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Adaptive uniformity test of --dist.
    TestUniformity(Common),
    /// Adaptive identity test of --dist against --known.
    TestIdentity(Common),
    /// Non-adaptive identity test of --dist against --known.
    TestIdentityNonadaptive(Common),
    /// Non-adaptive uniformity test of --dist.
    TestUniformityNonadaptive(Common),
    /// Learn --dist up to relabeling.
    Learn(Common),
    /// Test a label-invariant property of --dist.
    TestLabelInvariant(Common),
    /// Test whether --dist and --known agree up to relabeling, both unknown.
    CompareUnknown(Common),
    /// Identity test through the balanced-string reduction.
    ReduceString(Common),
}

#[derive(Args)]
struct Common {
    /// Domain size, for specs that leave it out.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 0.3)]
    epsilon: f64,
    #[arg(long, default_value_t = 1.0 / 3.0)]
    delta: f64,
    #[arg(long, default_value_t = 1)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Multiplier on sample-count formulas.
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    /// Unknown distribution spec, e.g. uniform:1000 or zipf:64:1.
    #[arg(long)]
    dist: Option<String>,
    /// Known distribution spec (second unknown one for compare-unknown).
    #[arg(long)]
    known: Option<String>,
    /// Reference for the learner's min_perm_tv (default: --dist).
    #[arg(long)]
    reference: Option<String>,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long, default_value = "empirical")]
    mode: PrimitiveMode,
    /// Add wall_ms to each record (output is then no longer reproducible).
    #[arg(long)]
    timing: bool,
    /// Learner: multiplier on the ratio estimator's sample count.
    #[arg(long, default_value_t = 1.0)]
    estimator_scale: f64,
    /// Non-adaptive: multiplier on the smallest collision-set size.
    #[arg(long, default_value_t = 1.0)]
    set_scale: f64,
    /// Label-invariant property: uniform or even-uniblock.
    #[arg(long, default_value = "uniform")]
    property: Property,
    /// Label-invariant: also accept distributions eps/2-close to the property.
    #[arg(long)]
    tolerant: bool,
    /// Reduction: the bit string x (default: random of length n/2).
    #[arg(long)]
    bits: Option<String>,
    /// Reduction: bit-query budget per trial.
    #[arg(long)]
    budget: Option<u64>,
}

impl Command {
    fn into_config(self) -> BatchConfig {
        let (algorithm, c) = match self {
            Command::TestUniformity(c) => (Algorithm::TestUniformity, c),
            Command::TestIdentity(c) => (Algorithm::TestIdentity, c),
            Command::TestIdentityNonadaptive(c) => (Algorithm::TestIdentityNonadaptive, c),
            Command::TestUniformityNonadaptive(c) => (Algorithm::TestUniformityNonadaptive, c),
            Command::Learn(c) => (Algorithm::Learn, c),
            Command::TestLabelInvariant(c) => (Algorithm::TestLabelInvariant, c),
            Command::CompareUnknown(c) => (Algorithm::CompareUnknown, c),
            Command::ReduceString(c) => (Algorithm::ReduceString, c),
        };
        BatchConfig {
            algorithm,
            n: c.n,
            epsilon: c.epsilon,
            delta: c.delta,
            trials: c.trials,
            seed: c.seed,
            scale: c.scale,
            dist: c.dist,
            known: c.known,
            reference: c.reference,
            jobs: c.jobs,
            mode: c.mode,
            timing: c.timing,
            estimator_scale: c.estimator_scale,
            set_scale: c.set_scale,
            property: c.property,
            tolerant: c.tolerant,
            bits: c.bits,
            budget: c.budget,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let batch = match run_batch(&cli.command.into_config()) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let mut out = std::io::stdout().lock();
    if out
        .write_all(batch.to_jsonl().as_bytes())
        .and_then(|_| out.flush())
        .is_err()
    {
        return ExitCode::from(2);
    }
    eprintln!("{}", batch.summary);
    if batch.summary.errors > 0 {
        ExitCode::from(3)
    } else {
        ExitCode::SUCCESS
    }
}
