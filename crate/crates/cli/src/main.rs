mod analyze;
mod compare;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rankgroup::bootstrap::BootstrapConfig;
use rankgroup::ingest::{self, Counting, Dataset, Selection};
use rankgroup::netbuild::EdgeWeights;
use rankgroup::pairstats::{z_critical, Z_01, Z_05};

#[derive(Parser)]
#[command(name = "rankgroup", version, about = "Group universities by statistically indistinguishable ranking indicators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build networks, groupings and reports for each scope.
    Analyze(AnalyzeArgs),
    /// Cramér's V between classifications, plus top-group lists.
    Compare(CompareArgs),
    /// Write the descending curve of pairwise effect sizes per scope.
    Distribution(DistributionArgs),
    /// Check the input table for consistency problems.
    Validate(ValidateArgs),
}

#[derive(Args, Clone)]
struct InputArgs {
    /// Ranking table in CSV form.
    #[arg(long)]
    input: PathBuf,
    /// Restrict to a country; may be repeated.
    #[arg(long)]
    country: Vec<String>,
    /// Include the whole-table scope.
    #[arg(long)]
    world: bool,
    #[arg(long)]
    field: Option<String>,
    #[arg(long)]
    period: Option<String>,
    /// fractional or full.
    #[arg(long, value_parser = parse_counting)]
    counting: Option<Counting>,
    /// Name output files with underscores instead of spaces.
    #[arg(long)]
    slugify: bool,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args, Clone)]
struct MethodArgs {
    #[arg(long, value_enum, default_values_t = [CriterionArg::All])]
    criterion: Vec<CriterionArg>,
    /// Significance level for a z threshold; may be repeated.
    #[arg(long)]
    alpha: Vec<f64>,
    /// Link pairs with |z| below this value; may be repeated.
    #[arg(long = "z-max")]
    z_max: Vec<f64>,
    /// Link pairs with w below this value; may be repeated.
    #[arg(long = "w-max")]
    w_max: Vec<f64>,
    /// Divide each significance level by the number of pairs in the scope.
    #[arg(long)]
    bonferroni: bool,
    #[arg(long, value_enum, default_value_t = WeightsArg::Binary)]
    edge_weights: WeightsArg,
    #[arg(long, default_value_t = 1.0)]
    resolution: f64,
    #[arg(long, env = "RANKGROUP_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1000)]
    bootstrap_replicates: usize,
    #[arg(long, default_value_t = 0.95)]
    coverage: f64,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    methods: MethodArgs,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    methods: MethodArgs,
    /// Groups CSV to compare instead of computing the default methods; may
    /// be repeated.
    #[arg(long)]
    classification: Vec<PathBuf>,
}

#[derive(Args)]
struct DistributionArgs {
    #[command(flatten)]
    input: InputArgs,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    input: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CriterionArg {
    Z,
    W,
    Overlap,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum WeightsArg {
    Binary,
    Raw,
}

fn parse_counting(raw: &str) -> Result<Counting, String> {
    Counting::parse(raw).ok_or_else(|| format!("unknown counting mode {raw:?}"))
}

/// Which networks to build and how to partition them.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub z: bool,
    pub w: bool,
    pub overlap: bool,
    /// Nominal |z| cut-offs, descending.
    pub z_thresholds: Vec<f64>,
    /// w cut-offs, descending.
    pub w_thresholds: Vec<f64>,
    pub bonferroni: bool,
    pub weights: EdgeWeights,
    pub resolution: f64,
    pub seed: u64,
    pub bootstrap: BootstrapConfig,
    pub slugify: bool,
}

fn sorted_desc(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| b.total_cmp(a));
    v.dedup();
    v
}

impl RunConfig {
    fn from_args(m: &MethodArgs, slugify: bool) -> anyhow::Result<Self> {
        let all = m.criterion.contains(&CriterionArg::All);
        let has = |c| all || m.criterion.contains(&c);

        for &a in &m.alpha {
            if !(a > 0.0 && a < 1.0) {
                bail!("--alpha must lie in (0, 1), got {a}");
            }
        }
        let mut z: Vec<f64> = m.z_max.clone();
        z.extend(m.alpha.iter().map(|&a| z_critical(a)));
        if z.is_empty() {
            z = vec![Z_05, Z_01];
        }
        let w = if m.w_max.is_empty() { vec![0.1, 0.3] } else { m.w_max.clone() };
        if let Some(t) = z.iter().chain(&w).find(|t| !(**t > 0.0 && t.is_finite())) {
            bail!("thresholds must be positive, got {t}");
        }
        if m.resolution.is_nan() || m.resolution <= 0.0 {
            bail!("--resolution must be positive");
        }

        Ok(RunConfig {
            z: has(CriterionArg::Z),
            w: has(CriterionArg::W),
            overlap: has(CriterionArg::Overlap),
            z_thresholds: sorted_desc(z),
            w_thresholds: sorted_desc(w),
            bonferroni: m.bonferroni,
            weights: match m.edge_weights {
                WeightsArg::Binary => EdgeWeights::Binary,
                WeightsArg::Raw => EdgeWeights::Raw,
            },
            resolution: m.resolution,
            seed: m.seed,
            bootstrap: BootstrapConfig {
                replicates: m.bootstrap_replicates,
                coverage: m.coverage,
                seed: m.seed,
            },
            slugify,
        })
    }
}

/// The table restricted by field, period and counting mode.
fn load(args: &InputArgs) -> anyhow::Result<Dataset> {
    let ds = ingest::read_csv_path(&args.input).with_context(|| format!("reading {}", args.input.display()))?;
    let base = Selection {
        country: None,
        field: args.field.clone(),
        period: args.period.clone(),
        counting: args.counting,
    };
    Ok(ds.filter(&base))
}

/// `(name, slice)` per requested scope. With no country and no `--world`,
/// every country plus the whole table.
fn scopes(ds: &Dataset, args: &InputArgs) -> anyhow::Result<Vec<(String, Dataset)>> {
    let (countries, world) = if args.country.is_empty() && !args.world {
        (ds.countries(), true)
    } else {
        (args.country.clone(), args.world)
    };
    let mut out = Vec::new();
    for c in countries {
        let slice = ds.filter(&Selection::country(c.as_str()));
        let Some(first) = slice.records.first() else {
            bail!("no records for country {c:?}");
        };
        out.push((first.country.clone(), slice));
    }
    if world {
        out.push((rankgroup::pajek::WORLD.to_string(), ds.clone()));
    }
    Ok(out)
}

fn write_files(dir: &std::path::Path, files: &[(String, Vec<u8>)]) -> anyhow::Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    for (name, bytes) in files {
        let path = dir.join(name);
        std::fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn validate(args: &ValidateArgs) -> anyhow::Result<ExitCode> {
    let ds = ingest::read_csv_path(&args.input).with_context(|| format!("reading {}", args.input.display()))?;
    let violations = ingest::validate(&ds);
    for v in &violations {
        println!("{}: {} ({})", v.university, v.rule, v.observed);
    }
    println!("{} records, {} violations", ds.len(), violations.len());
    Ok(if violations.is_empty() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Analyze(a) => {
            let cfg = RunConfig::from_args(&a.methods, a.input.slugify)?;
            analyze::run(&a.input, &cfg)
        }
        Command::Compare(a) => {
            let cfg = RunConfig::from_args(&a.methods, a.input.slugify)?;
            compare::run_compare(&a.input, &cfg, &a.classification)
        }
        Command::Distribution(a) => compare::run_distribution(&a.input),
        Command::Validate(a) => validate(&a),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
