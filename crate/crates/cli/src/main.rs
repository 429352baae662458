//! Command-line harness for the stable-matching toolkit.
//!
//! Subcommands: `gen`, `solve`, `check`, `sample`, `sweep`, `fit`.
//! Exit codes: 0 success (stable, for `check`), 1 unstable matching from
//! `check`, 2 usage errors, 3 runtime errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use stablematch::generate::{gen_smti, gen_sm_ic, GenParams};
use stablematch::lattice::{build_lattice, sampling_metrics, EnumLimits};
use stablematch::model::{Instance, Matching, Mode};
use stablematch::search::{run_search, SearchParams, Variant};
use stablematch::stability::{blocking_pairs, evaluate};
use stablematch::{parse_instance, serialize_instance};

use stablematch_cli::fit::{fit_blocking_decay, fit_tmed, tmed_r_squared, FitResult};
use stablematch_cli::output::{self, SCHEMA_VERSION};
use stablematch_cli::svg::{line_chart, Series};
use stablematch_cli::sweep::{derive_seed, run_sweep, SweepSpec};

#[derive(Parser)]
#[command(name = "stablematch", version, about = "Stable-matching toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Sm,
    Smti,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    Sml,
    Sml1,
    Sml2,
    Ltiu,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Variant {
        match v {
            VariantArg::Sml => Variant::Sml,
            VariantArg::Sml1 => Variant::Sml1,
            VariantArg::Sml2 => Variant::Sml2,
            VariantArg::Ltiu => Variant::Ltiu,
        }
    }
}

fn variant_name(v: Variant) -> &'static str {
    match v {
        Variant::Sml => "sml",
        Variant::Sml1 => "sml1",
        Variant::Sml2 => "sml2",
        Variant::Ltiu => "ltiu",
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelArg {
    BlockingDecay,
    Tmed,
}

#[derive(Subcommand)]
enum Command {
    /// Generate random instance files and a manifest.
    Gen {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(short, long)]
        n: usize,
        /// Deletion probability (ties-and-incomplete kind only).
        #[arg(long)]
        p1: Option<f64>,
        /// Tie probability (ties-and-incomplete kind only).
        #[arg(long)]
        p2: Option<f64>,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1000)]
        max_retries: usize,
    },
    /// Run a solver on one instance file and report the outcome.
    Solve {
        instance: PathBuf,
        #[arg(long, value_enum)]
        variant: VariantArg,
        #[arg(long, default_value_t = 0.2)]
        p_walk: f64,
        #[arg(long, default_value_t = 50_000)]
        max_steps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        timeout_ms: Option<u64>,
        /// Write the per-step trace as CSV.
        #[arg(long)]
        trace_out: Option<PathBuf>,
        /// Write the best matching found.
        #[arg(long)]
        matching_out: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
        format: FormatArg,
    },
    /// Verify a matching file against an instance; exit 0 iff stable.
    Check {
        instance: PathBuf,
        matching: PathBuf,
        /// Cap on listed blocking pairs.
        #[arg(long, default_value_t = 20)]
        max_list: usize,
        #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
        format: FormatArg,
    },
    /// Repeated solver runs against the exhaustive lattice: sampling
    /// fairness metrics per instance file.
    Sample {
        #[arg(required = true)]
        instances: Vec<PathBuf>,
        #[arg(long, default_value_t = 500)]
        runs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = VariantArg::Sml2)]
        variant: VariantArg,
        #[arg(long, default_value_t = 0.2)]
        p_walk: f64,
        #[arg(long, default_value_t = 50_000)]
        max_steps: usize,
        /// Enumeration cap for the lattice.
        #[arg(long, default_value_t = 30)]
        max_lattice_n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
        format: FormatArg,
    },
    /// Batch experiments over instance grids with per-cell aggregates.
    Sweep {
        #[arg(long, value_enum)]
        kind: KindArg,
        /// Sizes for strict-complete sweeps, e.g. 100,200,300.
        #[arg(long)]
        sizes: Option<String>,
        /// Size for ties-and-incomplete sweeps.
        #[arg(short, long)]
        n: Option<usize>,
        /// p1 grid: list 0.1,0.5 or range 0.1:0.8:0.1.
        #[arg(long)]
        p1: Option<String>,
        /// p2 grid: list or range.
        #[arg(long)]
        p2: Option<String>,
        #[arg(long, default_value_t = 100)]
        instances: usize,
        #[arg(long, default_value_t = 1)]
        runs_per_instance: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum)]
        variant: Option<VariantArg>,
        #[arg(long, default_value_t = 0.2)]
        p_walk: f64,
        #[arg(long, default_value_t = 50_000)]
        max_steps: usize,
        #[arg(long, default_value_t = 1000)]
        max_retries: usize,
        /// Output directory for the CSV dataset.
        #[arg(long)]
        out: PathBuf,
        /// Worker threads (0 = one per CPU).
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        /// Also emit SVG charts (strict-complete sweeps).
        #[arg(long)]
        svg: bool,
    },
    /// Fit a scaling-law model to a sweep dataset.
    Fit {
        #[arg(long, value_enum)]
        model: ModelArg,
        /// decay.csv (blocking-decay) or medians.csv (tmed).
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
        format: FormatArg,
    },
}

fn main() {
    let cli = Cli::parse();
    let code = match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            3
        }
    };
    std::process::exit(code);
}

fn usage(msg: &str) -> Result<i32> {
    eprintln!("usage error: {msg}");
    Ok(2)
}

fn dispatch(command: Command) -> Result<i32> {
    match command {
        Command::Gen {
            kind,
            n,
            p1,
            p2,
            count,
            seed,
            out,
            max_retries,
        } => cmd_gen(kind, n, p1, p2, count, seed, &out, max_retries),
        Command::Solve {
            instance,
            variant,
            p_walk,
            max_steps,
            seed,
            timeout_ms,
            trace_out,
            matching_out,
            out,
            format,
        } => cmd_solve(
            &instance,
            variant.into(),
            p_walk,
            max_steps,
            seed,
            timeout_ms,
            trace_out.as_deref(),
            matching_out.as_deref(),
            out.as_deref(),
            format,
        ),
        Command::Check {
            instance,
            matching,
            max_list,
            format,
        } => cmd_check(&instance, &matching, max_list, format),
        Command::Sample {
            instances,
            runs,
            seed,
            variant,
            p_walk,
            max_steps,
            max_lattice_n,
            out,
            format,
        } => cmd_sample(
            &instances,
            runs,
            seed,
            variant.into(),
            p_walk,
            max_steps,
            max_lattice_n,
            out.as_deref(),
            format,
        ),
        Command::Sweep {
            kind,
            sizes,
            n,
            p1,
            p2,
            instances,
            runs_per_instance,
            seed,
            variant,
            p_walk,
            max_steps,
            max_retries,
            out,
            jobs,
            svg,
        } => cmd_sweep(
            kind,
            sizes.as_deref(),
            n,
            p1.as_deref(),
            p2.as_deref(),
            instances,
            runs_per_instance,
            seed,
            variant,
            p_walk,
            max_steps,
            max_retries,
            &out,
            jobs,
            svg,
        ),
        Command::Fit {
            model,
            input,
            out,
            format,
        } => cmd_fit(model, &input, out.as_deref(), format),
    }
}

fn load_instance(path: &Path) -> Result<Instance> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_instance(&text).with_context(|| format!("parsing {}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => output::write_text(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_gen(
    kind: KindArg,
    n: usize,
    p1: Option<f64>,
    p2: Option<f64>,
    count: usize,
    seed: u64,
    out: &Path,
    max_retries: usize,
) -> Result<i32> {
    if kind == KindArg::Smti && (p1.is_none() || p2.is_none()) {
        return usage("--p1 and --p2 are required for --kind smti");
    }
    if kind == KindArg::Sm && (p1.is_some() || p2.is_some()) {
        return usage("--p1/--p2 only apply to --kind smti");
    }
    fs::create_dir_all(out)?;

    let prefix = match kind {
        KindArg::Sm => "sm",
        KindArg::Smti => "smti",
    };
    let mut manifest = csv::Writer::from_path(out.join("manifest.csv"))?;
    manifest.write_record([
        "schema_version",
        "kind",
        "n",
        "p1",
        "p2",
        "index",
        "seed",
        "file",
        "error",
    ])?;

    let mut failures = 0;
    for i in 0..count {
        let file_seed = derive_seed(seed, &[i as u64]);
        let name = format!("{prefix}_n{n}_s{seed}_i{i:04}.txt");
        let (text, error) = match kind {
            KindArg::Sm => (Some(serialize_instance(&gen_sm_ic(n, file_seed))), None),
            KindArg::Smti => {
                let mut params = GenParams::new(n, p1.unwrap(), p2.unwrap(), file_seed)
                    .map_err(|e| anyhow::anyhow!("{e}"))?;
                params.max_retries = max_retries;
                match gen_smti(&params) {
                    Ok(inst) => (Some(serialize_instance(&inst)), None),
                    Err(e) => (None, Some(e.to_string())),
                }
            }
        };
        if let Some(text) = &text {
            fs::write(out.join(&name), text)?;
        } else {
            failures += 1;
            eprintln!("instance {i}: {}", error.as_deref().unwrap_or("failed"));
        }
        manifest.write_record([
            SCHEMA_VERSION.to_string(),
            prefix.to_string(),
            n.to_string(),
            p1.map(|v| v.to_string()).unwrap_or_default(),
            p2.map(|v| v.to_string()).unwrap_or_default(),
            i.to_string(),
            file_seed.to_string(),
            if text.is_some() { name } else { String::new() },
            error.unwrap_or_default(),
        ])?;
    }
    manifest.flush()?;
    println!(
        "wrote {} instance file(s) to {}",
        count - failures,
        out.display()
    );
    Ok(if failures > 0 { 3 } else { 0 })
}

#[derive(Serialize)]
struct SolveReport<'a> {
    schema_version: &'a str,
    file: String,
    variant: &'a str,
    p_walk: f64,
    max_steps: usize,
    seed: u64,
    found_stable: bool,
    found_perfect: bool,
    steps: usize,
    restarts: usize,
    best_size: usize,
    best_singles: usize,
    best_nbp: usize,
    best_ns: usize,
    best_f: usize,
    wall_ms: f64,
}

#[allow(clippy::too_many_arguments)]
fn cmd_solve(
    instance: &Path,
    variant: Variant,
    p_walk: f64,
    max_steps: usize,
    seed: u64,
    timeout_ms: Option<u64>,
    trace_out: Option<&Path>,
    matching_out: Option<&Path>,
    out: Option<&Path>,
    format: FormatArg,
) -> Result<i32> {
    let inst = load_instance(instance)?;
    let mut params = SearchParams::new(variant, seed);
    params.p_walk = p_walk;
    params.max_steps = max_steps;
    params.wall_timeout = timeout_ms.map(Duration::from_millis);
    if let Err(e) = params.validate_for(&inst) {
        return usage(&e.to_string());
    }

    let started = Instant::now();
    let result = run_search(&inst, &params).map_err(|e| anyhow::anyhow!("{e}"))?;
    let wall_ms = started.elapsed().as_secs_f64() * 1e3;

    if let Some(path) = trace_out {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record([
            "schema_version",
            "step",
            "nbp",
            "ns",
            "f",
            "walked",
            "restarted",
        ])?;
        for rec in &result.trace {
            w.write_record([
                SCHEMA_VERSION.to_string(),
                rec.step.to_string(),
                rec.nbp.to_string(),
                rec.ns.to_string(),
                rec.f.to_string(),
                rec.walked.to_string(),
                rec.restarted.to_string(),
            ])?;
        }
        w.flush()?;
    }
    if let Some(path) = matching_out {
        output::write_text(path, &output::serialize_matching(&result.best))?;
    }

    let report = SolveReport {
        schema_version: SCHEMA_VERSION,
        file: instance.display().to_string(),
        variant: variant_name(variant),
        p_walk,
        max_steps,
        seed,
        found_stable: result.found_stable,
        found_perfect: result.found_perfect,
        steps: result.steps_taken,
        restarts: result.restarts,
        best_size: result.best.size(),
        best_singles: result.best.singles(),
        best_nbp: result.best_eval.nbp,
        best_ns: result.best_eval.ns,
        best_f: result.best_eval.f(),
        wall_ms,
    };
    let text = match format {
        FormatArg::Json => format!("{}\n", serde_json::to_string_pretty(&report)?),
        FormatArg::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record([
                "schema_version",
                "file",
                "variant",
                "p_walk",
                "max_steps",
                "seed",
                "found_stable",
                "found_perfect",
                "steps",
                "restarts",
                "best_size",
                "best_singles",
                "best_nbp",
                "best_ns",
                "best_f",
                "wall_ms",
            ])?;
            w.write_record([
                SCHEMA_VERSION.to_string(),
                report.file.clone(),
                report.variant.to_string(),
                report.p_walk.to_string(),
                report.max_steps.to_string(),
                report.seed.to_string(),
                report.found_stable.to_string(),
                report.found_perfect.to_string(),
                report.steps.to_string(),
                report.restarts.to_string(),
                report.best_size.to_string(),
                report.best_singles.to_string(),
                report.best_nbp.to_string(),
                report.best_ns.to_string(),
                report.best_f.to_string(),
                format!("{:.3}", report.wall_ms),
            ])?;
            String::from_utf8(w.into_inner()?)?
        }
    };
    emit(out, &text)?;
    Ok(0)
}

fn cmd_check(
    instance: &Path,
    matching: &Path,
    max_list: usize,
    format: FormatArg,
) -> Result<i32> {
    let inst = load_instance(instance)?;
    let text = fs::read_to_string(matching)
        .with_context(|| format!("reading {}", matching.display()))?;
    let m = output::parse_matching_file(&text, inst.n())
        .with_context(|| format!("parsing {}", matching.display()))?;
    m.validate_for(&inst)
        .map_err(|e| anyhow::anyhow!("invalid matching: {e}"))?;

    let eval = evaluate(&inst, &m);
    let full = blocking_pairs(&inst, &m);
    let stable = eval.is_stable();

    match format {
        FormatArg::Json => {
            #[derive(Serialize)]
            struct CheckReport {
                schema_version: &'static str,
                nbp: usize,
                ns: usize,
                f: usize,
                stable: bool,
                blocking_pairs: Vec<(usize, usize)>,
            }
            let report = CheckReport {
                schema_version: SCHEMA_VERSION,
                nbp: eval.nbp,
                ns: eval.ns,
                f: eval.f(),
                stable,
                blocking_pairs: full
                    .pairs
                    .iter()
                    .take(max_list)
                    .map(|p| (p.man, p.woman))
                    .collect(),
            };
            println!("{}", serde_json::to_string_pretty(&report)?);
        }
        FormatArg::Csv => {
            println!("nbp: {}", eval.nbp);
            println!("ns: {}", eval.ns);
            println!("f: {}", eval.f());
            if !full.pairs.is_empty() {
                println!(
                    "blocking pairs (showing {} of {}):",
                    full.pairs.len().min(max_list),
                    full.pairs.len()
                );
                for p in full.pairs.iter().take(max_list) {
                    println!("  ({}, {})", p.man, p.woman);
                }
            }
            println!("verdict: {}", if stable { "STABLE" } else { "UNSTABLE" });
        }
    }
    Ok(if stable { 0 } else { 1 })
}

#[derive(Serialize)]
struct SampleRow {
    schema_version: &'static str,
    file: String,
    n: usize,
    lattice_size: usize,
    height: usize,
    runs: usize,
    distinct: usize,
    entropy_bits: f64,
    normalized_entropy: f64,
    mean_normalized_distance: f64,
}

#[allow(clippy::too_many_arguments)]
fn cmd_sample(
    instances: &[PathBuf],
    runs: usize,
    seed: u64,
    variant: Variant,
    p_walk: f64,
    max_steps: usize,
    max_lattice_n: usize,
    out: Option<&Path>,
    format: FormatArg,
) -> Result<i32> {
    if variant == Variant::Ltiu {
        return usage("sample requires a strict-complete variant (the lattice is defined there)");
    }
    if runs == 0 {
        return usage("--runs must be positive");
    }
    let limits = EnumLimits {
        sm_cap: max_lattice_n,
        ..EnumLimits::default()
    };

    let mut rows: Vec<SampleRow> = Vec::new();
    for (file_idx, path) in instances.iter().enumerate() {
        let inst = load_instance(path)?;
        if inst.mode() != Mode::SmStrictComplete {
            anyhow::bail!("{}: sampling needs a strict-complete instance", path.display());
        }
        let lattice = build_lattice(&inst, &limits)
            .map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;

        let mut results: Vec<Matching> = Vec::with_capacity(runs);
        for r in 0..runs {
            let mut params = SearchParams::new(variant, derive_seed(seed, &[file_idx as u64, r as u64]));
            params.p_walk = p_walk;
            params.max_steps = max_steps;
            let result = run_search(&inst, &params).map_err(|e| anyhow::anyhow!("{e}"))?;
            if !result.found_stable {
                anyhow::bail!(
                    "{}: run {r} hit the step limit before stability; raise --max-steps",
                    path.display()
                );
            }
            results.push(result.best);
        }
        let stats = sampling_metrics(&lattice, &results)
            .map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
        rows.push(SampleRow {
            schema_version: SCHEMA_VERSION,
            file: path.display().to_string(),
            n: inst.n(),
            lattice_size: lattice.len(),
            height: lattice.height(),
            runs,
            distinct: stats.distinct,
            entropy_bits: stats.entropy_bits,
            normalized_entropy: stats.normalized_entropy,
            mean_normalized_distance: stats.mean_normalized_distance,
        });
    }

    let mean = |f: fn(&SampleRow) -> f64| -> f64 {
        rows.iter().map(f).sum::<f64>() / rows.len() as f64
    };
    let aggregate = SampleRow {
        schema_version: SCHEMA_VERSION,
        file: "(mean)".into(),
        n: 0,
        lattice_size: 0,
        height: 0,
        runs,
        distinct: 0,
        entropy_bits: mean(|r| r.entropy_bits),
        normalized_entropy: mean(|r| r.normalized_entropy),
        mean_normalized_distance: mean(|r| r.mean_normalized_distance),
    };

    let text = match format {
        FormatArg::Json => {
            #[derive(Serialize)]
            struct SampleReport<'a> {
                rows: &'a [SampleRow],
                aggregate: &'a SampleRow,
            }
            format!(
                "{}\n",
                serde_json::to_string_pretty(&SampleReport {
                    rows: &rows,
                    aggregate: &aggregate,
                })?
            )
        }
        FormatArg::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record([
                "schema_version",
                "file",
                "n",
                "lattice_size",
                "height",
                "runs",
                "distinct",
                "entropy_bits",
                "normalized_entropy",
                "mean_normalized_distance",
            ])?;
            for r in rows.iter().chain([&aggregate]) {
                w.write_record([
                    r.schema_version.to_string(),
                    r.file.clone(),
                    r.n.to_string(),
                    r.lattice_size.to_string(),
                    r.height.to_string(),
                    r.runs.to_string(),
                    r.distinct.to_string(),
                    format!("{:.6}", r.entropy_bits),
                    format!("{:.6}", r.normalized_entropy),
                    format!("{:.6}", r.mean_normalized_distance),
                ])?;
            }
            String::from_utf8(w.into_inner()?)?
        }
    };
    emit(out, &text)?;
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    kind: KindArg,
    sizes: Option<&str>,
    n: Option<usize>,
    p1: Option<&str>,
    p2: Option<&str>,
    instances: usize,
    runs_per_instance: usize,
    seed: u64,
    variant: Option<VariantArg>,
    p_walk: f64,
    max_steps: usize,
    max_retries: usize,
    out: &Path,
    jobs: usize,
    svg: bool,
) -> Result<i32> {
    let (variant, sizes, p1_grid, p2_grid) = match kind {
        KindArg::Sm => {
            let Some(sizes) = sizes else {
                return usage("--sizes is required for --kind sm");
            };
            let variant = variant.map(Variant::from).unwrap_or(Variant::Sml2);
            if variant == Variant::Ltiu {
                return usage("--kind sm takes a strict-complete variant");
            }
            (variant, output::parse_sizes(sizes)?, Vec::new(), Vec::new())
        }
        KindArg::Smti => {
            let Some(n) = n else {
                return usage("-n is required for --kind smti");
            };
            let (Some(p1), Some(p2)) = (p1, p2) else {
                return usage("--p1 and --p2 grids are required for --kind smti");
            };
            let variant = variant.map(Variant::from).unwrap_or(Variant::Ltiu);
            if variant != Variant::Ltiu {
                return usage("--kind smti runs the ties-and-incomplete variant");
            }
            (
                variant,
                vec![n],
                output::parse_grid(p1)?,
                output::parse_grid(p2)?,
            )
        }
    };

    let mut spec = SweepSpec::new(variant, sizes, seed);
    spec.p1_grid = p1_grid;
    spec.p2_grid = p2_grid;
    spec.instances_per_cell = instances;
    spec.runs_per_instance = runs_per_instance;
    spec.p_walk = p_walk;
    spec.max_steps = max_steps;
    spec.max_retries = max_retries;
    spec.jobs = jobs;
    if let Err(e) = spec.validate() {
        return usage(&e.to_string());
    }

    let collect_decay = kind == KindArg::Sm;
    let outcome = run_sweep(&spec, collect_decay).map_err(|e| anyhow::anyhow!("{e}"))?;

    fs::create_dir_all(out)?;
    let name = variant_name(variant);
    output::write_runs_csv(&out.join("runs.csv"), name, &outcome.runs)?;
    output::write_cells_csv(&out.join("cells.csv"), name, &outcome.cells)?;
    if collect_decay {
        output::write_decay_csv(&out.join("decay.csv"), &outcome.decay)?;
        output::write_medians_csv(&out.join("medians.csv"), &outcome.medians)?;
        if svg {
            let medians = Series {
                label: "median steps".into(),
                points: outcome
                    .medians
                    .iter()
                    .map(|&(n, m)| (n as f64, m))
                    .collect(),
            };
            output::write_text(
                &out.join("steps_vs_n.svg"),
                &line_chart("median steps to stability", "n", "steps", &[medians]),
            )?;
            let mut by_n: Vec<usize> = outcome.decay.iter().map(|r| r.n).collect();
            by_n.sort_unstable();
            by_n.dedup();
            let series: Vec<Series> = by_n
                .iter()
                .map(|&n| Series {
                    label: format!("n={n}"),
                    points: outcome
                        .decay
                        .iter()
                        .filter(|r| r.n == n)
                        .map(|r| (r.t as f64 / n as f64, r.mean_nbp / n as f64))
                        .collect(),
                })
                .collect();
            output::write_text(
                &out.join("decay.svg"),
                &line_chart("blocking pairs during search", "t / n", "nbp / n", &series),
            )?;
        }
    }

    let failed = outcome.cells.iter().filter(|c| c.error.is_some()).count();
    println!(
        "sweep complete: {} run(s), {} cell(s){} -> {}",
        outcome.runs.len(),
        outcome.cells.len(),
        if failed > 0 {
            format!(" ({failed} failed)")
        } else {
            String::new()
        },
        out.display()
    );
    Ok(0)
}

fn cmd_fit(model: ModelArg, input: &Path, out: Option<&Path>, format: FormatArg) -> Result<i32> {
    let (fit, r2): (FitResult, Option<f64>) = match model {
        ModelArg::BlockingDecay => {
            let rows = output::read_decay_csv(input)?;
            let fit = fit_blocking_decay(&rows).map_err(|e| anyhow::anyhow!("{e}"))?;
            (fit, None)
        }
        ModelArg::Tmed => {
            let rows = output::read_medians_csv(input)?;
            let fit = fit_tmed(&rows).map_err(|e| anyhow::anyhow!("{e}"))?;
            let r2 = tmed_r_squared(&rows, &fit);
            (fit, Some(r2))
        }
    };

    let text = match format {
        FormatArg::Json => {
            #[derive(Serialize)]
            struct FitReport {
                schema_version: &'static str,
                model: &'static str,
                param_a: f64,
                param_b: f64,
                residual: f64,
                #[serde(skip_serializing_if = "Option::is_none")]
                r_squared: Option<f64>,
            }
            format!(
                "{}\n",
                serde_json::to_string_pretty(&FitReport {
                    schema_version: SCHEMA_VERSION,
                    model: match model {
                        ModelArg::BlockingDecay => "blocking_decay",
                        ModelArg::Tmed => "tmed",
                    },
                    param_a: fit.params.0,
                    param_b: fit.params.1,
                    residual: fit.residual,
                    r_squared: r2,
                })?
            )
        }
        FormatArg::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record([
                "schema_version",
                "model",
                "param_a",
                "param_b",
                "residual",
                "r_squared",
            ])?;
            w.write_record([
                SCHEMA_VERSION.to_string(),
                match model {
                    ModelArg::BlockingDecay => "blocking_decay".into(),
                    ModelArg::Tmed => "tmed".into(),
                },
                format!("{}", fit.params.0),
                format!("{}", fit.params.1),
                format!("{}", fit.residual),
                r2.map(|v| format!("{v}")).unwrap_or_default(),
            ])?;
            String::from_utf8(w.into_inner()?)?
        }
    };
    emit(out, &text)?;
    Ok(0)
}
