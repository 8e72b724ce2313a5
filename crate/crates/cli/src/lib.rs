//! Command-line front end: generate instances, add noise, cluster, evaluate,
//! check properties and run sweeps.
//!
//! Exit status is 0 on success, 2 for invalid input or usage, 1 otherwise.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use rhc::eval::{
    best_pruning_error, classification_error, noise_sweep, LinkageRunner, RmnlRunner, Runner,
};
use rhc::inductive::{fit_inductive, required_sample_size, InductiveConfig, DEFAULT_SAMPLE_CONSTANT};
use rhc::io::{self, MergeTreeFile, Provenance};
use rhc::linkage::linkage_from_similarity;
use rhc::properties::{check_good_neighborhood, check_strict_separation, check_weak_good_neighborhood, PropertyReport};
use rhc::rmnl::{MergeOrder, Neighborhood};
use rhc::synth::{self, AIStatSpec, NoiseKind, NoisyData, PlantedSpec};
use rhc::{Error, Labeling, Linkage, NoiseParams, Rmnl, RmnlConfig, SimilarityMatrix};

#[derive(Parser, Debug)]
#[command(name = "rhc", version, about = "Robust hierarchical clustering toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a synthetic instance (`<out>.sim`) and its target (`<out>.labels`).
    Generate(GenerateArgs),
    /// Add noise to a similarity matrix or attribute table.
    Noise(NoiseArgs),
    /// Build a merge tree.
    Cluster(ClusterArgs),
    /// Cluster a sample and label every point through the sample tree.
    Inductive(InductiveArgs),
    /// Print the classification error of a tree's best pruning or of a labeling.
    Eval(EvalArgs),
    /// Check a similarity property against a target.
    Check(CheckArgs),
    /// Error table over noise levels and seeds.
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Kind {
    Aistat,
    MatchedPairs,
    Planted,
    Ward,
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output path prefix.
    #[arg(long, default_value = "instance")]
    out: PathBuf,
    /// Number of points (aistat, matched-pairs).
    #[arg(long)]
    n: Option<usize>,
    /// Group size multiplier (ward).
    #[arg(long, default_value_t = 5)]
    m: usize,
    #[arg(long, default_value_t = 0.0)]
    extra_alpha: f64,
    #[arg(long, default_value_t = 0.0)]
    extra_nu: f64,
    /// Cluster sizes (planted), comma-separated.
    #[arg(long, value_delimiter = ',', default_values_t = [30, 30])]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    #[arg(long, default_value_t = 0.0)]
    nu: f64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum NoiseKindArg {
    AttrCorrupt,
    SimCorrupt,
    AttrGauss,
}

impl From<NoiseKindArg> for NoiseKind {
    fn from(k: NoiseKindArg) -> Self {
        match k {
            NoiseKindArg::AttrCorrupt => NoiseKind::AttrCorrupt,
            NoiseKindArg::SimCorrupt => NoiseKind::SimCorrupt,
            NoiseKindArg::AttrGauss => NoiseKind::AttrGauss,
        }
    }
}

#[derive(Args, Debug)]
struct NoiseArgs {
    /// A similarity file, or an attribute table for the attribute kinds.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum)]
    kind: NoiseKindArg,
    #[arg(long)]
    p: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Also write the noisy attributes converted to similarities.
    #[arg(long)]
    similarity_out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Algo {
    Rmnl,
    Single,
    Average,
    Complete,
    Ward,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OrderArg {
    BestFirst,
    Component,
}

#[derive(Args, Debug, Clone)]
struct RmnlOpts {
    #[arg(long, value_enum, default_value_t = OrderArg::BestFirst)]
    merge_order: OrderArg,
    /// Do not count a point among its own nearest neighbors.
    #[arg(long)]
    exclude_self: bool,
    /// Disable attaching leftover singletons to their best blob.
    #[arg(long)]
    no_speedup: bool,
}

impl RmnlOpts {
    fn config(&self) -> RmnlConfig {
        RmnlConfig {
            merge_order: match self.merge_order {
                OrderArg::BestFirst => MergeOrder::BestFirst,
                OrderArg::Component => MergeOrder::Component,
            },
            neighborhood: if self.exclude_self {
                Neighborhood::ExcludeSelf
            } else {
                Neighborhood::IncludeSelf
            },
            speedup: !self.no_speedup,
        }
    }
}

#[derive(Args, Debug)]
struct ClusterArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = Algo::Rmnl)]
    algo: Algo,
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    #[arg(long, default_value_t = 0.0)]
    nu: f64,
    #[command(flatten)]
    rmnl: RmnlOpts,
    /// Output tree file (defaults to the input with a `.tree` extension).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct InductiveArgs {
    #[arg(long)]
    input: PathBuf,
    /// Number of draws; defaults to the bound from alpha, nu and delta.
    #[arg(long)]
    sample_n: Option<usize>,
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    nu: f64,
    #[arg(long, default_value_t = 0.2)]
    delta: f64,
    #[arg(long, default_value_t = DEFAULT_SAMPLE_CONSTANT)]
    sample_constant: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of clusters in the extended labeling.
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// Target used to pick the pruning (best pruning on the sample);
    /// without it the largest nodes are split until `k` remain.
    #[arg(long)]
    target: Option<PathBuf>,
    #[command(flatten)]
    rmnl: RmnlOpts,
    /// Output prefix: writes `<out>.tree` and `<out>.labels`.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[arg(long)]
    target: PathBuf,
    #[arg(long, conflicts_with = "pred")]
    tree: Option<PathBuf>,
    #[arg(long)]
    pred: Option<PathBuf>,
    /// Pruning size (defaults to the target's cluster count).
    #[arg(long)]
    k: Option<usize>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PropertyArg {
    Strict,
    Good,
    Weak,
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    target: PathBuf,
    #[arg(long, value_enum)]
    property: PropertyArg,
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    #[arg(long, default_value_t = 0.0)]
    nu: f64,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    /// Bad points, comma-separated.
    #[arg(long, value_delimiter = ',')]
    bad: Vec<usize>,
    /// Labeling whose groups are the subsets `A_p` (weak property); defaults
    /// to the target clusters minus the bad points.
    #[arg(long)]
    subsets: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SweepNoise {
    /// Extra cross-field perfect matches per point.
    Alpha,
    /// Flipped points.
    Nu,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long, value_enum, default_value_t = SweepNoise::Alpha)]
    noise: SweepNoise,
    #[arg(long, value_delimiter = ',', default_values_t = [0.0])]
    levels: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [0])]
    seeds: Vec<u64>,
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [Algo::Rmnl, Algo::Single, Algo::Average, Algo::Complete])]
    algos: Vec<Algo>,
    #[arg(long, default_value_t = 512)]
    n: usize,
    /// Write the table here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Runs the command line and returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let command = args
        .iter()
        .skip(1)
        .map(|a| a.to_string_lossy().into_owned())
        .collect::<Vec<_>>()
        .join(" ");
    match dispatch(cli.command, &command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                2
            } else {
                1
            }
        }
    }
}

type Res = rhc::Result<()>;

fn dispatch(cmd: Command, line: &str) -> Res {
    match cmd {
        Command::Generate(a) => generate(a, line),
        Command::Noise(a) => noise(a, line),
        Command::Cluster(a) => cluster(a, line),
        Command::Inductive(a) => inductive(a, line),
        Command::Eval(a) => eval(a),
        Command::Check(a) => check(a),
        Command::Sweep(a) => sweep(a, line),
    }
}

fn base_provenance(line: &str) -> Provenance {
    Provenance::new().with("command", format!("rhc {line}")).with("prng", synth::PRNG)
}

fn with_ext(prefix: &Path, ext: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

fn generate(a: GenerateArgs, line: &str) -> Res {
    let prov = base_provenance(line).with("kind", format!("{:?}", a.kind).to_lowercase()).with("seed", a.seed);
    let mut extra: Vec<(&str, Labeling)> = Vec::new();
    let (sim, target, prov) = match a.kind {
        Kind::Aistat => {
            let spec = AIStatSpec {
                n: a.n.unwrap_or(512),
                extra_alpha: a.extra_alpha,
                extra_nu: a.extra_nu,
                seed: a.seed,
                ..AIStatSpec::default()
            };
            let d = synth::generate_aistat(&spec)?;
            extra.push(("split-ai", d.split_ai.clone()));
            extra.push(("split-stats", d.split_stats.clone()));
            extra.push(("areas", d.areas.clone()));
            let bad: Vec<String> = d.bad_set.iter().map(|b| b.to_string()).collect();
            let prov = prov
                .with("n", spec.n)
                .with("extra_alpha", spec.extra_alpha)
                .with("extra_nu", spec.extra_nu)
                .with("bad_set", bad.join(","));
            (d.sim, d.fields, prov)
        }
        Kind::MatchedPairs => {
            let n = a.n.unwrap_or(64);
            let d = synth::generate_matched_pairs(n)?;
            extra.push(("alt", d.alt_target.clone()));
            extra.push(("regions", d.regions.clone()));
            (d.sim, d.target, prov.with("n", n))
        }
        Kind::Planted => {
            let params = NoiseParams::new(a.alpha, a.nu)?;
            let d = synth::generate_planted_good_neighborhood(&PlantedSpec::new(a.sizes.clone(), params, a.seed))?;
            let bad: Vec<String> = d.bad_set.iter().map(|b| b.to_string()).collect();
            let sizes: Vec<String> = a.sizes.iter().map(|s| s.to_string()).collect();
            let prov = prov
                .with("sizes", sizes.join(","))
                .with("alpha", a.alpha)
                .with("nu", a.nu)
                .with("bad_set", bad.join(","));
            (d.sim, d.target, prov)
        }
        Kind::Ward => {
            let w = synth::generate_ward_counterexample(a.m)?;
            let table = synth::AttributeTable::new(w.coords.len(), 1, w.coords.clone())?;
            let sim = synth::attributes_to_similarity(&table);
            let prov = prov.with("m", a.m).with("similarity", "1 - 2 d^2 / max d^2 over line coordinates");
            (sim, w.target, prov)
        }
    };
    io::write_similarity(with_ext(&a.out, "sim"), &sim, &prov)?;
    io::write_labels(with_ext(&a.out, "labels"), &target, &prov)?;
    for (name, labels) in extra {
        io::write_labels(with_ext(&a.out, &format!("{name}.labels")), &labels, &prov)?;
    }
    Ok(())
}

fn noise(a: NoiseArgs, line: &str) -> Res {
    let kind = NoiseKind::from(a.kind);
    let text = std::fs::read_to_string(&a.input)?;
    let data = match kind {
        NoiseKind::SimCorrupt => NoisyData::Similarity(io::parse_similarity(&text)?.0),
        _ => NoisyData::Attributes(io::parse_attributes(&text)?.0),
    };
    let prov = base_provenance(line).with("noise", kind).with("p", a.p).with("seed", a.seed);
    match synth::inject_noise(&data, kind, a.p, a.seed)? {
        NoisyData::Similarity(s) => io::write_similarity(&a.out, &s, &prov)?,
        NoisyData::Attributes(t) => {
            std::fs::write(&a.out, io::format_attributes(&t, &prov))?;
            if let Some(path) = &a.similarity_out {
                let prov = prov.with("similarity", "1 - 2 d^2 / max d^2 over rows");
                io::write_similarity(path, &synth::attributes_to_similarity(&t), &prov)?;
            }
        }
    }
    Ok(())
}

fn linkage_of(algo: Algo) -> Option<Linkage> {
    match algo {
        Algo::Rmnl => None,
        Algo::Single => Some(Linkage::Single),
        Algo::Average => Some(Linkage::Average),
        Algo::Complete => Some(Linkage::Complete),
        Algo::Ward => Some(Linkage::Ward),
    }
}

fn cluster(a: ClusterArgs, line: &str) -> Res {
    let (sim, _) = io::read_similarity(&a.input)?;
    let mut prov = base_provenance(line).with("input", a.input.display());
    let tree = match linkage_of(a.algo) {
        Some(method) => {
            prov = prov.with("algorithm", method).with("dissimilarity", "1 - sim");
            linkage_from_similarity(&sim, method)
        }
        None => {
            let params = NoiseParams::new(a.alpha, a.nu)?;
            let config = a.rmnl.config();
            prov = prov
                .with("algorithm", "rmnl")
                .with("alpha", a.alpha)
                .with("nu", a.nu)
                .with("config", format!("{config:?}"));
            Rmnl::new(params).with_config(config).cluster(&sim)?
        }
    };
    let out = a.out.unwrap_or_else(|| a.input.with_extension("tree"));
    MergeTreeFile { provenance: prov, tree }.write(out)
}

fn inductive(a: InductiveArgs, line: &str) -> Res {
    let (sim, _) = io::read_similarity(&a.input)?;
    let params = NoiseParams::new(a.alpha, a.nu)?;
    let draws = match a.sample_n {
        Some(n) => n,
        None => required_sample_size(a.alpha, a.nu, a.delta, a.sample_constant)?.min(sim.len()),
    };
    let config = InductiveConfig {
        rmnl: a.rmnl.config(),
        ..InductiveConfig::default()
    };
    let model = fit_inductive(&sim, draws, params, a.seed, config)?;
    let pruning = match &a.target {
        Some(path) => {
            let (target, _) = io::read_labels(path)?;
            let sub = target.restrict(&model.sample_ids);
            best_pruning_error(&model.tree, &sub, a.k)?.nodes
        }
        None => model.tree.split_largest(a.k),
    };
    let labels = model.extend_labeling(&sim, &pruning)?;
    let ids: Vec<String> = model.sample_ids.iter().map(|i| i.to_string()).collect();
    let prov = base_provenance(line)
        .with("input", a.input.display())
        .with("alpha", a.alpha)
        .with("nu", a.nu)
        .with("seed", a.seed)
        .with("draws", draws)
        .with("sample_ids", ids.join(","));
    MergeTreeFile {
        provenance: prov.clone(),
        tree: model.tree.clone(),
    }
    .write(with_ext(&a.out, "tree"))?;
    io::write_labels(with_ext(&a.out, "labels"), &labels, &prov)
}

fn eval(a: EvalArgs) -> Res {
    let (target, _) = io::read_labels(&a.target)?;
    let error = match (&a.tree, &a.pred) {
        (Some(path), None) => {
            let tree = MergeTreeFile::read(path)?.tree;
            let r = best_pruning_error(&tree, &target, a.k.unwrap_or(target.k()))?;
            if !r.exact_size {
                eprintln!("note: no pruning of the requested size; used {} nodes", r.nodes.len());
            }
            r.error
        }
        (None, Some(path)) => classification_error(&io::read_labels(path)?.0, &target)?,
        _ => return Err(Error::InvalidSpec("give exactly one of --tree or --pred".into())),
    };
    println!("{error:.4}");
    Ok(())
}

fn print_report(r: &PropertyReport) {
    let mut out = String::new();
    let _ = writeln!(out, "property: {}", r.property);
    let _ = writeln!(out, "holds: {}", r.holds);
    if let Some(a) = r.minimal_alpha {
        let _ = writeln!(out, "minimal_alpha: {a:.6}");
    }
    if let Some(b) = r.binding_beta {
        let _ = writeln!(out, "binding_beta: {b:.6}");
    }
    let _ = writeln!(out, "bad_set: {:?}", r.bad_set);
    for w in &r.witness {
        let _ = writeln!(out, "witness: {w:?}");
    }
    if let Some(note) = &r.note {
        let _ = writeln!(out, "note: {note}");
    }
    print!("{out}");
}

fn check(a: CheckArgs) -> Res {
    let (sim, _) = io::read_similarity(&a.input)?;
    let (target, _) = io::read_labels(&a.target)?;
    let report = match a.property {
        PropertyArg::Strict => check_strict_separation(&sim, &target, &a.bad)?,
        PropertyArg::Good => check_good_neighborhood(&sim, &target, a.alpha, &a.bad)?,
        PropertyArg::Weak => {
            let groups = match &a.subsets {
                Some(path) => io::read_labels(path)?.0,
                None => target.clone(),
            };
            let clusters = groups.clusters();
            let family: Vec<Vec<usize>> = (0..sim.len())
                .map(|p| {
                    clusters[groups.label(p) - 1]
                        .iter()
                        .copied()
                        .filter(|q| !a.bad.contains(q))
                        .collect()
                })
                .collect();
            let params = NoiseParams::new(a.alpha, a.nu)?;
            check_weak_good_neighborhood(&sim, &target, params, a.beta, &a.bad, &family)?
        }
    };
    print_report(&report);
    Ok(())
}

fn sweep(a: SweepArgs, line: &str) -> Res {
    let rmnl = RmnlRunner::default();
    let linkages: Vec<LinkageRunner> = a.algos.iter().filter_map(|&x| linkage_of(x)).map(LinkageRunner).collect();
    let mut runners: Vec<&dyn Runner> = Vec::new();
    if a.algos.iter().any(|x| matches!(x, Algo::Rmnl)) {
        runners.push(&rmnl);
    }
    runners.extend(linkages.iter().map(|l| l as &dyn Runner));
    let n = a.n;
    let noise = a.noise;
    let table = noise_sweep(
        &runners,
        |level, seed| {
            let mut spec = AIStatSpec {
                n,
                seed,
                ..AIStatSpec::default()
            };
            match noise {
                SweepNoise::Alpha => spec.extra_alpha = level,
                SweepNoise::Nu => spec.extra_nu = level,
            }
            let d = synth::generate_aistat(&spec)?;
            Ok::<(SimilarityMatrix, Labeling), Error>((d.sim, d.fields))
        },
        &a.levels,
        &a.seeds,
    )?;
    let mut text = String::new();
    for (k, v) in &base_provenance(line).entries {
        let _ = writeln!(text, "# {k}: {v}");
    }
    text.push_str(&table.to_tsv());
    match a.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}
