use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde::Serialize;

use b2scope_core::equations::{b2_system, satisfies};
use b2scope_core::markov::Chain;
use b2scope_core::orbits::equivalence_classes;
use b2scope_core::runner::analyze_all;
use b2scope_core::simplify::simplify_with_trace;
use b2scope_core::solve::{free_parameters_ift, free_parameters_rank, sample_solution};
use b2scope_core::template::{
    builtin_template, diamond_propeller, load_template_file, template_to_json, FractalTemplate,
    BUILTIN_NAMES,
};
use b2scope_core::wordspace::{
    check_b2_direct, check_transitivity, mass, word_space, Assignment, MassDistribution, Word,
};

/// Templates whose full table takes long enough to need `--extended`.
const EXTENDED: [&str; 2] = ["pentagasket-filled", "hexagasket"];

#[derive(Parser)]
#[command(
    name = "b2scope",
    version,
    about = "Free-parameter analysis of self-similar fractal IFS variants"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct TemplateArg {
    /// Built-in template name.
    template: Option<String>,
    /// JSON template file, used instead of a built-in.
    #[arg(long)]
    template_file: Option<PathBuf>,
}

impl TemplateArg {
    fn load(&self) -> anyhow::Result<FractalTemplate> {
        match (&self.template, &self.template_file) {
            (_, Some(path)) => Ok(load_template_file(path)?),
            (Some(name), None) => Ok(builtin_template(name)?),
            (None, None) => bail!("give a template name or --template-file"),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Built-in templates with cell count, group order and equation count.
    ListTemplates {
        #[arg(long)]
        template_file: Option<PathBuf>,
    },
    /// Equations and free-parameter count of one assignment.
    Analyze {
        #[command(flatten)]
        template: TemplateArg,
        /// Comma-separated codes such as `r0,r0,f1`; defaults to all `r0`.
        #[arg(long)]
        assignment: Option<String>,
        /// Weights `p/q,...` to test against the equations.
        #[arg(long)]
        weights: Option<String>,
        #[arg(long)]
        dump_equations: bool,
        /// Print each simplification step to stderr.
        #[arg(long)]
        trace_simplify: bool,
    },
    /// One line per equivalence class: representative and orbit size.
    Classes {
        #[command(flatten)]
        template: TemplateArg,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Histogram of free parameters over all IFS of a template.
    Table {
        #[command(flatten)]
        template: TemplateArg,
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
        /// Allow the long-running templates.
        #[arg(long)]
        extended: bool,
    },
    /// Brute-force checks of one assignment and weight vector.
    Verify {
        #[command(flatten)]
        template: TemplateArg,
        #[arg(long)]
        assignment: Option<String>,
        #[arg(long)]
        weights: String,
        #[arg(long, default_value_t = 4)]
        depth: usize,
    },
    /// Writes the n-diamond propeller template as JSON.
    Propeller {
        n: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn assignment(t: &FractalTemplate, text: Option<&str>) -> anyhow::Result<Assignment> {
    match text {
        None => Ok(t.canonical_assignment()),
        Some(s) => Ok(Assignment::parse(t, s)?),
    }
}

fn emit(text: &str, output: Option<&Path>) -> anyhow::Result<()> {
    match output {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn list_templates(extra: Option<&Path>) -> anyhow::Result<bool> {
    let mut templates: Vec<FractalTemplate> = BUILTIN_NAMES
        .iter()
        .map(|n| builtin_template(n))
        .collect::<Result<_, _>>()?;
    if let Some(p) = extra {
        templates.push(load_template_file(p)?);
    }
    for t in &templates {
        println!(
            "{} N={} mappings={} equations={}",
            t.name,
            t.n(),
            t.group.len(),
            t.equation_count()
        );
    }
    Ok(true)
}

#[derive(Serialize)]
struct AnalyzeReport {
    schema: u32,
    template: String,
    assignment: String,
    word_space: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    equations: Option<Vec<String>>,
    free_equations: Vec<String>,
    fixed: Vec<String>,
    free_variables: Vec<String>,
    free_parameters: usize,
    method: &'static str,
    warning: bool,
    rank_count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    sample_solution: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sample_verified: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    weights_satisfy: Option<bool>,
}

fn fractions(m: &MassDistribution) -> Vec<String> {
    m.weights().iter().map(BigRational::to_string).collect()
}

fn analyze(
    t: &FractalTemplate,
    a: &Assignment,
    weights: Option<&str>,
    dump: bool,
    trace: bool,
) -> anyhow::Result<bool> {
    let system = b2_system(t, a)?;
    let state = simplify_with_trace(&system, trace)?;
    for line in &state.trace {
        eprintln!("{line}");
    }
    let result = free_parameters_ift(&state, &system);
    let rank = free_parameters_rank(&system);
    let (sample, verified) = if result.count >= 1 {
        let m = sample_solution(&system);
        let ok = satisfies(&system, &m) && check_b2_direct(t, a, &m, 4).pass;
        (Some(fractions(&m)), Some(ok))
    } else {
        (None, None)
    };
    let weights_satisfy = match weights {
        Some(w) => Some(satisfies(&system, &MassDistribution::parse(w)?)),
        None => None,
    };
    let report = AnalyzeReport {
        schema: 1,
        template: t.name.clone(),
        assignment: a.encode(t),
        word_space: word_space(t, a).render(t.n()),
        equations: dump.then(|| system.render()),
        free_equations: state
            .free_equations
            .iter()
            .map(ToString::to_string)
            .collect(),
        fixed: state
            .fix_equations
            .iter()
            .map(|f| format!("m{} = {}", f.variable + 1, f.definition))
            .collect(),
        free_variables: state
            .free_variables
            .iter()
            .map(|v| format!("m{}", v + 1))
            .collect(),
        free_parameters: result.count,
        method: result.method.as_str(),
        warning: result.warning,
        rank_count: rank,
        sample_solution: sample,
        sample_verified: verified,
        weights_satisfy,
    };
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(result.count == rank && verified != Some(false))
}

fn classes(t: &FractalTemplate, format: Format) -> anyhow::Result<bool> {
    let records = equivalence_classes(t);
    match format {
        Format::Csv => {
            println!("representative,orbit_size");
            for r in &records {
                println!("\"{}\",{}", r.representative.encode(t), r.size);
            }
        }
        Format::Json => {
            let rows: Vec<serde_json::Value> = records
                .iter()
                .map(|r| serde_json::json!({"representative": r.representative.encode(t), "orbit_size": r.size}))
                .collect();
            println!("{}", serde_json::to_string_pretty(&rows)?);
        }
    }
    Ok(true)
}

fn table(
    t: &FractalTemplate,
    jobs: usize,
    checkpoint: Option<&Path>,
    format: Format,
    output: Option<&Path>,
    extended: bool,
) -> anyhow::Result<bool> {
    if EXTENDED.contains(&t.name.as_str()) && !extended {
        log::warn!(
            "{} enumerates {} IFS and is excluded from default runs; pass --extended to run it",
            t.name,
            t.total_assignments()
        );
        return Ok(false);
    }
    let result = analyze_all(t, jobs, checkpoint)?;
    let text = match format {
        Format::Json => result.to_json()? + "\n",
        Format::Csv => result.to_csv(),
    };
    emit(&text, output)?;
    Ok(result.warnings == 0)
}

#[derive(Serialize)]
struct VerifyReport {
    schema: u32,
    transitivity: bool,
    b2: bool,
    b2_classes_checked: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    b2_witness: Option<Vec<String>>,
    green_identity: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    green_witness: Option<String>,
}

fn verify(
    t: &FractalTemplate,
    a: &Assignment,
    weights: &str,
    depth: usize,
) -> anyhow::Result<bool> {
    let m = MassDistribution::parse(weights)?;
    if m.len() != t.n() {
        bail!("{} weights given, template has {} cells", m.len(), t.n());
    }
    let transitivity = check_transitivity(t, a, depth);
    let b2 = check_b2_direct(t, a, &m, depth);
    let chain = Chain::new(t, a, &m);
    let root = Word::empty();
    let green_witness = (1..=depth)
        .flat_map(|len| Word::all(t.n(), len))
        .find(|w| chain.green(&root, w) != mass(&m, w));
    let report = VerifyReport {
        schema: 1,
        transitivity,
        b2: b2.pass,
        b2_classes_checked: b2.classes_checked,
        b2_witness: b2
            .witness
            .map(|c| c.iter().map(|w| w.render(t.n())).collect()),
        green_identity: green_witness.is_none(),
        green_witness: green_witness.map(|w| w.render(t.n())),
    };
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(report.transitivity && report.b2 && report.green_identity)
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Command::ListTemplates { template_file } => list_templates(template_file.as_deref()),
        Command::Analyze {
            template,
            assignment: text,
            weights,
            dump_equations,
            trace_simplify,
        } => {
            let t = template.load()?;
            let a = assignment(&t, text.as_deref())?;
            analyze(&t, &a, weights.as_deref(), dump_equations, trace_simplify)
        }
        Command::Classes { template, format } => classes(&template.load()?, format),
        Command::Table {
            template,
            jobs,
            checkpoint,
            format,
            output,
            extended,
        } => {
            let jobs =
                jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
            table(
                &template.load()?,
                jobs,
                checkpoint.as_deref(),
                format,
                output.as_deref(),
                extended,
            )
        }
        Command::Verify {
            template,
            assignment: text,
            weights,
            depth,
        } => {
            let t = template.load()?;
            let a = assignment(&t, text.as_deref())?;
            verify(&t, &a, &weights, depth)
        }
        Command::Propeller { n, output } => {
            let t = diamond_propeller(n)?;
            emit(&(template_to_json(&t)? + "\n"), output.as_deref())?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            let usage = matches!(
                e.downcast_ref::<b2scope_core::Error>(),
                Some(
                    b2scope_core::Error::Parse(_)
                        | b2scope_core::Error::InvalidParameter(_)
                        | b2scope_core::Error::NotFound(_)
                )
            );
            ExitCode::from(if usage { 2 } else { 1 })
        }
    }
}
