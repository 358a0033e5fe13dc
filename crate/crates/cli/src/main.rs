use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use freevis_core::audit::{default_grid, parse_grid};
use freevis_core::casebook::{self, CasebookOptions};
use freevis_core::metric::DEFAULT_BUDGET;
use freevis_core::morphism::is_primitive;
use freevis_core::{
    classify_per_inn, estimate_seminorm, frontier, gromov_product, metric_equiv_audit,
    pseudometric_dbar, qie_frontier, sigma, AuditConfig, Basis, Endomorphism, Error, Gamma,
    GeneratingSet, HolderFrontier, StallingsGraph, VisualMetricSpec, Word,
};

/// Word metrics, visual metrics and Hölder audits on free groups.
#[derive(Debug, Parser)]
#[command(name = "freevis", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Word-metric distance between two words.
    Dist(PairArgs),
    /// Gromov product (g|h)_p.
    Gromov(PairArgs),
    /// Visual metric value between two words.
    Sigma(PairArgs),
    /// Decide whether an automorphism is a permutation times an inner automorphism.
    Classify(MorphismArgs),
    /// Hölder and quasi-isometry audits.
    #[command(subcommand)]
    Audit(AuditCommand),
    /// Reproduce the worked examples.
    #[command(subcommand)]
    Casebook(CasebookCommand),
    /// Invert an automorphism and print (or write) it as JSON.
    Invert {
        #[command(flatten)]
        morphism: MorphismArgs,
        /// Write the inverse here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide whether a word is primitive.
    Primitive {
        word: String,
        #[command(flatten)]
        common: Common,
    },
    /// Fold the subgroup generated by the given words.
    Fold {
        #[arg(required = true)]
        words: Vec<String>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Args)]
struct Common {
    /// Basis names, e.g. `a,b`.
    #[arg(long, default_value = "a,b")]
    basis: String,
    /// Node-expansion budget for each shortest-word search.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// Worker threads (0 = all cores). Never changes the output.
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

#[derive(Debug, Args)]
struct MetricArgs {
    /// Basepoint word.
    #[arg(long, default_value = "")]
    p: String,
    /// `ln2` or a positive rational.
    #[arg(long, default_value = "ln2")]
    gamma: String,
    /// Generating-set file; the basis is used when absent.
    #[arg(long)]
    genset: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PairArgs {
    g: String,
    h: String,
    #[command(flatten)]
    metric: MetricArgs,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct MorphismArgs {
    /// Morphism JSON file.
    #[arg(long)]
    morphism: PathBuf,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Csv,
}

#[derive(Debug, Args)]
struct AuditArgs {
    /// Largest radius; radii 1..=N are audited.
    #[arg(long, default_value_t = 4)]
    radius: usize,
    /// Comma-separated grid of positive rationals.
    #[arg(long)]
    grid: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Pairs scanned exhaustively before switching to sampling.
    #[arg(long, default_value_t = AuditConfig::default().pair_budget)]
    pair_budget: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Debug, Subcommand)]
enum AuditCommand {
    /// Q_min(P, R) for Gromov products.
    Frontier {
        #[command(flatten)]
        morphism: MorphismArgs,
        #[command(flatten)]
        metric: MetricArgs,
        #[command(flatten)]
        audit: AuditArgs,
    },
    /// Finite-radius estimate of the Hölder seminorm.
    Seminorm {
        #[command(flatten)]
        morphism: MorphismArgs,
        #[command(flatten)]
        metric: MetricArgs,
        #[command(flatten)]
        audit: AuditArgs,
    },
    /// Estimate of the pseudometric between two automorphisms.
    Dbar {
        #[command(flatten)]
        morphism: MorphismArgs,
        /// Second morphism JSON file.
        #[arg(long)]
        psi: PathBuf,
        #[command(flatten)]
        metric: MetricArgs,
        #[command(flatten)]
        audit: AuditArgs,
    },
    /// Quasi-isometric embedding frontier in the word metric.
    Qie {
        #[command(flatten)]
        morphism: MorphismArgs,
        #[command(flatten)]
        audit: AuditArgs,
    },
    /// Compare the Gromov products of two generating sets.
    MetricEquiv {
        #[arg(long)]
        genset: PathBuf,
        #[arg(long)]
        genset2: PathBuf,
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        audit: AuditArgs,
    },
}

#[derive(Debug, Subcommand)]
enum CasebookCommand {
    /// Run the cases, one report per line.
    Run {
        /// One of noten-violation, noten-uc, fauind, hnn, revcon.
        #[arg(long)]
        case: Option<String>,
        /// Size for fauind and hnn.
        #[arg(long)]
        n: Option<u32>,
        /// Allow n = 3.
        #[arg(long)]
        extended: bool,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        #[arg(long, default_value_t = 0)]
        threads: usize,
    },
}

enum Failure {
    Domain(String),
    Budget(String),
    Casebook(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_resource() {
            Failure::Budget(e.to_string())
        } else {
            Failure::Domain(e.to_string())
        }
    }
}

type Outcome = Result<String, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::Domain(format!("cannot read {}: {e}", path.display())))
}

fn load_morphism(path: &Path) -> Result<Endomorphism, Failure> {
    Ok(Endomorphism::from_json(&read(path)?)?)
}

fn load_genset(path: &Path) -> Result<GeneratingSet, Failure> {
    Ok(GeneratingSet::from_text(&read(path)?)?)
}

fn metric_spec(m: &MetricArgs, basis: &Basis, budget: u64) -> Result<VisualMetricSpec, Failure> {
    let genset = match &m.genset {
        Some(path) => load_genset(path)?,
        None => GeneratingSet::basis(basis),
    };
    let p = genset.ambient_basis().parse_word(&m.p)?;
    let gamma = Gamma::parse(&m.gamma)?;
    Ok(VisualMetricSpec::new(genset, p, gamma, 4.0)?.with_budget(budget))
}

fn words(spec: &VisualMetricSpec, g: &str, h: &str) -> Result<(Word, Word), Failure> {
    let b = spec.genset.ambient_basis();
    Ok((b.parse_word(g)?, b.parse_word(h)?))
}

fn audit_config(a: &AuditArgs, search_budget: u64) -> AuditConfig {
    AuditConfig {
        pair_budget: a.pair_budget,
        seed: a.seed,
        search_budget,
        ..AuditConfig::default()
    }
}

fn grid(a: &AuditArgs) -> Result<Vec<freevis_core::Rational>, Failure> {
    Ok(match &a.grid {
        Some(g) => parse_grid(g)?,
        None => default_grid(),
    })
}

fn radii(a: &AuditArgs) -> Result<Vec<usize>, Failure> {
    if a.radius == 0 {
        return Err(Failure::Domain("--radius must be at least 1".into()));
    }
    Ok((1..=a.radius).collect())
}

fn header(a: &AuditArgs, budget: u64) -> String {
    format!(
        "# seed={} pair_budget={} budget={budget}\n",
        a.seed, a.pair_budget
    )
}

fn render_frontier(f: &HolderFrontier, a: &AuditArgs, budget: u64) -> String {
    let body = match a.format {
        Format::Csv => f.to_csv(),
        Format::Text => f.to_text(),
    };
    header(a, budget) + &body
}

fn run_audit(cmd: AuditCommand) -> Outcome {
    match cmd {
        AuditCommand::Frontier {
            morphism,
            metric,
            audit,
        } => {
            let phi = load_morphism(&morphism.morphism)?;
            let budget = morphism.common.budget;
            let spec = metric_spec(&metric, phi.basis(), budget)?;
            let f = frontier(
                &phi,
                &grid(&audit)?,
                &radii(&audit)?,
                &spec,
                &audit_config(&audit, budget),
            )?;
            Ok(render_frontier(&f, &audit, budget))
        }
        AuditCommand::Seminorm {
            morphism,
            metric,
            audit,
        } => {
            let phi = load_morphism(&morphism.morphism)?;
            let budget = morphism.common.budget;
            let spec = metric_spec(&metric, phi.basis(), budget)?;
            let est = estimate_seminorm(
                &phi,
                &grid(&audit)?,
                &radii(&audit)?,
                &spec,
                &audit_config(&audit, budget),
            )?;
            Ok(header(&audit, budget) + &est.to_text())
        }
        AuditCommand::Dbar {
            morphism,
            psi,
            metric,
            audit,
        } => {
            let phi = load_morphism(&morphism.morphism)?;
            let psi = load_morphism(&psi)?;
            let budget = morphism.common.budget;
            let spec = metric_spec(&metric, phi.basis(), budget)?;
            let est = pseudometric_dbar(
                &phi,
                &psi,
                &grid(&audit)?,
                &radii(&audit)?,
                &spec,
                &audit_config(&audit, budget),
            )?;
            Ok(header(&audit, budget) + &est.to_text())
        }
        AuditCommand::Qie { morphism, audit } => {
            let phi = load_morphism(&morphism.morphism)?;
            let budget = morphism.common.budget;
            let f = qie_frontier(
                &phi,
                &grid(&audit)?,
                &radii(&audit)?,
                &audit_config(&audit, budget),
            )?;
            Ok(render_frontier(&f, &audit, budget))
        }
        AuditCommand::MetricEquiv {
            genset,
            genset2,
            common,
            audit,
        } => {
            let a = load_genset(&genset)?;
            let a2 = load_genset(&genset2)?;
            let f = metric_equiv_audit(
                &a,
                &a2,
                &grid(&audit)?,
                &radii(&audit)?,
                &audit_config(&audit, common.budget),
            )?;
            Ok(render_frontier(&f, &audit, common.budget))
        }
    }
}

fn run_casebook(opts: CasebookOptions) -> Outcome {
    let reports = casebook::run_casebook(&opts)?;
    let mut out = String::new();
    for r in &reports {
        let _ = writeln!(out, "{r}");
    }
    if reports.iter().all(|r| r.pass) {
        Ok(out)
    } else {
        Err(Failure::Casebook(out))
    }
}

fn fold(words: &[String], common: &Common) -> Outcome {
    let basis = Basis::parse_list(&common.basis)?;
    let gens = words
        .iter()
        .map(|w| basis.parse_word(w))
        .collect::<Result<Vec<_>, _>>()?;
    let g = StallingsGraph::new(basis.rank(), &gens);
    let mut out = format!(
        "vertices: {}\nedges: {}\nrank: {}\nwhole_group: {}\n",
        g.vertex_count(),
        g.edge_count(),
        g.rank(),
        g.is_whole_group()
    );
    for (from, letter, to) in g.edges() {
        let _ = writeln!(
            out,
            "{from} {} {to}",
            basis.format_word(&Word::letter(letter))
        );
    }
    Ok(out)
}

fn dispatch(command: Command) -> Outcome {
    match command {
        Command::Dist(a) => {
            let spec = metric_spec(
                &a.metric,
                &Basis::parse_list(&a.common.basis)?,
                a.common.budget,
            )?;
            let (g, h) = words(&spec, &a.g, &a.h)?;
            Ok(format!("{}\n", spec.genset.dist(&g, &h, a.common.budget)?))
        }
        Command::Gromov(a) => {
            let spec = metric_spec(
                &a.metric,
                &Basis::parse_list(&a.common.basis)?,
                a.common.budget,
            )?;
            let (g, h) = words(&spec, &a.g, &a.h)?;
            Ok(format!("{}\n", gromov_product(&spec, &g, &h)?))
        }
        Command::Sigma(a) => {
            let spec = metric_spec(
                &a.metric,
                &Basis::parse_list(&a.common.basis)?,
                a.common.budget,
            )?;
            let (g, h) = words(&spec, &a.g, &a.h)?;
            Ok(format!("{}\n", sigma(&spec, &g, &h)?))
        }
        Command::Classify(m) => {
            let phi = load_morphism(&m.morphism)?;
            Ok(classify_per_inn(&phi).render(phi.basis()))
        }
        Command::Audit(cmd) => run_audit(cmd),
        Command::Casebook(CasebookCommand::Run {
            case,
            n,
            extended,
            budget,
            ..
        }) => run_casebook(CasebookOptions {
            case,
            n,
            extended,
            budget,
        }),
        Command::Invert { morphism, out } => {
            let phi = load_morphism(&morphism.morphism)?;
            let json = phi.invert()?.to_json() + "\n";
            match out {
                Some(path) => {
                    std::fs::write(&path, &json).map_err(|e| {
                        Failure::Domain(format!("cannot write {}: {e}", path.display()))
                    })?;
                    Ok(String::new())
                }
                None => Ok(json),
            }
        }
        Command::Primitive { word, common } => {
            let basis = Basis::parse_list(&common.basis)?;
            let w = basis.parse_word(&word)?;
            Ok(format!("primitive: {}\n", is_primitive(&w, basis.rank())))
        }
        Command::Fold { words, common } => fold(&words, &common),
    }
}

fn threads(command: &Command) -> usize {
    match command {
        Command::Dist(a) | Command::Gromov(a) | Command::Sigma(a) => a.common.threads,
        Command::Classify(m) | Command::Invert { morphism: m, .. } => m.common.threads,
        Command::Audit(
            AuditCommand::Frontier { morphism: m, .. }
            | AuditCommand::Seminorm { morphism: m, .. }
            | AuditCommand::Dbar { morphism: m, .. }
            | AuditCommand::Qie { morphism: m, .. },
        ) => m.common.threads,
        Command::Audit(AuditCommand::MetricEquiv { common, .. }) => common.threads,
        Command::Casebook(CasebookCommand::Run { threads, .. }) => *threads,
        Command::Primitive { common, .. } | Command::Fold { common, .. } => common.threads,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(threads(&cli.command))
        .build()
    {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let outcome = pool.install(|| dispatch(cli.command));
    let mut stdout = std::io::stdout().lock();
    match outcome {
        Ok(out) => {
            let _ = stdout.write_all(out.as_bytes());
            ExitCode::SUCCESS
        }
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Budget(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
        Err(Failure::Casebook(report)) => {
            let _ = stdout.write_all(report.as_bytes());
            eprintln!("error: casebook failure");
            ExitCode::from(4)
        }
    }
}
