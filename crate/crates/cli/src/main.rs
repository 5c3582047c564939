//! `setopt`: batch front end for the set optimization library.
//!
//! Every command loads or generates an instance, calls one library
//! operation and writes a short summary to stdout. With `-o` the machine
//! report goes to that path as JSON, or as CSV when the path ends in `.csv`.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use setopt_core::instance::{discretize_map, instance_distance, PolyShape, EXAMPLE_NAMES};
use setopt_core::plot::{render, Rendering};
use setopt_core::vectorizer::{covering_p_bound, covering_p_bound_global, DEFAULT_GAMMA};
use setopt_core::verifier::{agreement_ratios, convex_experiment, run_suite, ConvexConfig, SuiteConfig, SuiteReport};
use setopt_core::{
    make_example, solve_direct, solve_weighted_sum, Concept, ExampleParams, Instance, Rational, Scalar, Vectorizer,
    VpKind,
};

#[derive(Parser)]
#[command(name = "setopt", version, about = "Set optimization under the lower set less relation")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Args, Clone)]
struct Io {
    /// Instance JSON file.
    #[arg(short = 'i', long = "instance")]
    instance: PathBuf,
    /// Report path; `.csv` selects CSV, anything else JSON.
    #[arg(short = 'o', long = "out")]
    out: Option<PathBuf>,
    /// Exact rational arithmetic instead of f64.
    #[arg(long)]
    exact: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConceptArg {
    Weak,
    Type1,
    Type2,
}

impl From<ConceptArg> for Concept {
    fn from(c: ConceptArg) -> Self {
        match c {
            ConceptArg::Weak => Concept::Weak,
            ConceptArg::Type1 => Concept::TypeOne,
            ConceptArg::Type2 => Concept::TypeTwo,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Weak,
    Min,
}

impl From<KindArg> for VpKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Weak => VpKind::Weak,
            KindArg::Min => VpKind::Min,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ShapeArg {
    Random,
    Constant,
    Shifted,
}

impl From<ShapeArg> for PolyShape {
    fn from(s: ShapeArg) -> Self {
        match s {
            ShapeArg::Random => PolyShape::Random,
            ShapeArg::Constant => PolyShape::Constant,
            ShapeArg::Shifted => PolyShape::Shifted,
        }
    }
}

#[derive(Subcommand)]
enum Verb {
    /// Solution set of the set problem.
    Solve {
        #[command(flatten)]
        io: Io,
        #[arg(long, value_enum, default_value = "weak")]
        concept: ConceptArg,
        /// Shift epsilon (`0.1`, `1/10`).
        #[arg(long, default_value = "0")]
        eps: String,
    },
    /// Membership in the vectorized problem with budget p.
    Vectorize {
        #[command(flatten)]
        io: Io,
        #[arg(long, default_value_t = 1)]
        p: usize,
        #[arg(long, default_value = "0")]
        eps: String,
        #[arg(long, value_enum, default_value = "weak")]
        kind: KindArg,
    },
    /// Smallest budget at which a decision becomes a member.
    MinimalP {
        #[command(flatten)]
        io: Io,
        /// Decision label.
        #[arg(long)]
        x: String,
        #[arg(long, default_value = "0")]
        eps: String,
        #[arg(long, value_enum, default_value = "weak")]
        kind: KindArg,
    },
    /// Covering-number budget guaranteeing weak membership.
    CoveringP {
        #[command(flatten)]
        io: Io,
        /// Decision label; omitted means the maximum over weakly minimal decisions.
        #[arg(long)]
        x: Option<String>,
        #[arg(long, default_value = "1")]
        eps: String,
        #[arg(long, default_value_t = DEFAULT_GAMMA.to_string())]
        gamma: String,
    },
    /// Weighted-sum scalarization with one weight per component.
    WeightedSum {
        #[command(flatten)]
        io: Io,
        /// Weight vectors, `;` between vectors and `,` between entries: `1,0;0,1`.
        #[arg(long)]
        weights: String,
    },
    /// Generate a built-in instance.
    Example {
        /// One of t_one, strict_min, cantor, mfdvp, mfdvp_polytope, random_finite, convex_polyhedral.
        name: String,
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
        #[arg(long)]
        exact: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        grid: Option<usize>,
        /// Cantor truncation T.
        #[arg(long, default_value_t = 3)]
        t: usize,
        /// Cantor image truncation N (default T + 1).
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 6)]
        size: usize,
        #[arg(long, default_value_t = 4)]
        max_image: usize,
        #[arg(long, default_value_t = 1)]
        denom: i64,
        #[arg(long)]
        polytope: bool,
        #[arg(long)]
        skew_cone: bool,
        #[arg(long, default_value_t = 1)]
        dim: usize,
        #[arg(long, value_enum, default_value = "random")]
        shape: ShapeArg,
    },
    /// Replace every image by an internal epsilon-cover.
    Discretize {
        #[command(flatten)]
        io: Io,
        #[arg(long)]
        eps: String,
    },
    /// Largest Hausdorff distance between corresponding images.
    Distance {
        #[command(flatten)]
        io: Io,
        /// Second instance.
        #[arg(long)]
        to: PathBuf,
    },
    /// Run the property suite; exits 1 on a hard failure.
    Verify {
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
        #[arg(long)]
        exact: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of random finite instances.
        #[arg(long, default_value_t = 50)]
        count: u64,
        #[arg(long, default_value_t = 20)]
        polytopes: usize,
        #[arg(long, default_value_t = 8)]
        size: usize,
        #[arg(long, default_value_t = 6)]
        max_image: usize,
        /// Corrupt the brute-force oracle to exercise failure reporting.
        #[arg(long)]
        inject_fault: bool,
        /// Include wall-clock time in the report.
        #[arg(long)]
        timing: bool,
        /// Comma-separated check-name prefixes to run, e.g. `golden,vectorizer.oracle`.
        #[arg(long, value_delimiter = ',')]
        only: Vec<String>,
    },
    /// Compare grid set solutions with VP_{n+1} on convex polyhedral instances.
    ConvexExp {
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
        #[arg(long)]
        exact: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 17)]
        grid: usize,
        /// Decision dimension.
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long, value_enum, default_value = "random")]
        shape: ShapeArg,
        #[arg(long)]
        timing: bool,
    },
    /// SVG of the image sets (CSV of coordinates unless m = 2).
    Plot {
        #[command(flatten)]
        io: Io,
        #[arg(long, value_enum, default_value = "weak")]
        concept: ConceptArg,
        #[arg(long, default_value = "0")]
        eps: String,
    },
}

/// Outcome of a command: its report and whether a hard check failed.
struct Outcome {
    report: Report,
    failed: bool,
}

enum Report {
    Json { value: Value, csv: Option<String> },
    Text(String),
}

impl Outcome {
    fn json(value: Value, csv: Option<String>) -> Self {
        Outcome {
            report: Report::Json { value, csv },
            failed: false,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let exact = match &cli.verb {
        Verb::Solve { io, .. }
        | Verb::Vectorize { io, .. }
        | Verb::MinimalP { io, .. }
        | Verb::CoveringP { io, .. }
        | Verb::WeightedSum { io, .. }
        | Verb::Discretize { io, .. }
        | Verb::Distance { io, .. }
        | Verb::Plot { io, .. } => io.exact,
        Verb::Example { exact, .. } | Verb::Verify { exact, .. } | Verb::ConvexExp { exact, .. } => *exact,
    };
    let result = if exact { run::<Rational>(&cli.verb) } else { run::<f64>(&cli.verb) };
    match result.and_then(|o| emit(&cli.verb, o)) {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn out_path(verb: &Verb) -> Option<&Path> {
    match verb {
        Verb::Solve { io, .. }
        | Verb::Vectorize { io, .. }
        | Verb::MinimalP { io, .. }
        | Verb::CoveringP { io, .. }
        | Verb::WeightedSum { io, .. }
        | Verb::Discretize { io, .. }
        | Verb::Distance { io, .. }
        | Verb::Plot { io, .. } => io.out.as_deref(),
        Verb::Example { out, .. } | Verb::Verify { out, .. } | Verb::ConvexExp { out, .. } => out.as_deref(),
    }
}

fn emit(verb: &Verb, outcome: Outcome) -> anyhow::Result<bool> {
    let Some(path) = out_path(verb) else {
        if let (Verb::Example { .. } | Verb::Discretize { .. }, Report::Json { value, .. }) = (verb, &outcome.report) {
            println!("{}", serde_json::to_string_pretty(value)?);
        }
        return Ok(outcome.failed);
    };
    let is_csv = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    let text = match outcome.report {
        Report::Text(t) => t,
        Report::Json { csv: Some(c), .. } if is_csv => c,
        Report::Json { csv: None, .. } if is_csv => bail!("this command has no CSV report"),
        Report::Json { value, .. } => serde_json::to_string_pretty(&value)? + "\n",
    };
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(outcome.failed)
}

fn scalar<T: Scalar>(s: &str, what: &str) -> anyhow::Result<T> {
    T::parse_scalar(s).map_err(|e| anyhow!("--{what}: {e}"))
}

fn text<T: Scalar>(v: &T) -> String {
    match v.to_json() {
        Value::String(s) => s,
        other => other.to_string(),
    }
}

fn load<T: Scalar>(io: &Io) -> anyhow::Result<Instance<T>> {
    Instance::<T>::load(&io.instance).with_context(|| format!("loading {}", io.instance.display()))
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn run<T: Scalar>(verb: &Verb) -> anyhow::Result<Outcome> {
    match verb {
        Verb::Solve { io, concept, eps } => {
            let inst = load::<T>(io)?;
            let eps = scalar::<T>(eps, "eps")?;
            let r = solve_direct(&inst, (*concept).into(), &eps)?;
            println!("{} members at eps={}: [{}]", r.concept.name(), text(&eps), r.members.join(", "));
            let mut csv = String::from("label,member");
            if r.thresholds.is_some() {
                csv.push_str(",threshold");
            }
            csv.push('\n');
            for (k, label) in inst.labels().iter().enumerate() {
                csv.push_str(&format!("{},{}", csv_field(label), r.is_member(label)));
                if let Some(th) = &r.thresholds {
                    csv.push_str(&format!(",{}", text(&th[k].1)));
                }
                csv.push('\n');
            }
            Ok(Outcome::json(r.to_json(), Some(csv)))
        }
        Verb::Vectorize { io, p, eps, kind } => {
            let inst = load::<T>(io)?;
            let eps = scalar::<T>(eps, "eps")?;
            let r = Vectorizer::new(&inst)?.membership(*p, &eps, (*kind).into())?;
            println!(
                "{} members of VP_{p} at eps={}: [{}]",
                r.kind.name(),
                text(&eps),
                r.members.join(", ")
            );
            if !r.incomplete.is_empty() {
                println!("candidate pools incomplete for: [{}]", r.incomplete.join(", "));
            }
            let mut csv = String::from("label,member,pool_complete\n");
            for label in inst.labels() {
                csv.push_str(&format!(
                    "{},{},{}\n",
                    csv_field(&label),
                    r.is_member(&label),
                    !r.incomplete.contains(&label)
                ));
            }
            Ok(Outcome::json(r.to_json(), Some(csv)))
        }
        Verb::MinimalP { io, x, eps, kind } => {
            let inst = load::<T>(io)?;
            let eps = scalar::<T>(eps, "eps")?;
            let idx = inst.index_of(x)?;
            let r = Vectorizer::new(&inst)?.minimal_p(idx, &eps, (*kind).into())?;
            match r.p_star() {
                Some(p) => println!("p_star={p}"),
                None => println!("p_star=none"),
            }
            let mut v = r.to_json();
            v["x"] = json!(x);
            v["epsilon"] = eps.to_json();
            v["kind"] = json!(VpKind::from(*kind).name());
            Ok(Outcome::json(v, None))
        }
        Verb::CoveringP { io, x, eps, gamma } => {
            let inst = load::<T>(io)?;
            let eps = scalar::<T>(eps, "eps")?;
            let gamma = scalar::<T>(gamma, "gamma")?;
            let p = match x {
                Some(label) => covering_p_bound(&inst, inst.index_of(label)?, &eps, &gamma)?,
                None => covering_p_bound_global(&inst, &eps, &gamma)?,
            };
            println!("p={p}");
            Ok(Outcome::json(
                json!({ "x": x, "epsilon": eps.to_json(), "gamma": gamma.to_json(), "p": p }),
                None,
            ))
        }
        Verb::WeightedSum { io, weights } => {
            let inst = load::<T>(io)?;
            let w = weights
                .split(';')
                .map(|v| v.split(',').map(|c| scalar::<T>(c, "weights")).collect())
                .collect::<anyhow::Result<Vec<Vec<T>>>>()?;
            let sols = solve_weighted_sum(&inst, &w)?;
            let labels: Vec<&str> = sols.iter().map(|s| s.label.as_str()).collect();
            println!("minimizers: [{}]", labels.join(", "));
            let mut csv = String::from("label,value\n");
            for s in &sols {
                csv.push_str(&format!("{},{}\n", csv_field(&s.label), text(&s.value)));
            }
            let v = json!({
                "weights": w.iter().map(|r| r.iter().map(Scalar::to_json).collect::<Vec<_>>()).collect::<Vec<_>>(),
                "solutions": sols.iter().map(|s| s.to_json()).collect::<Vec<_>>(),
            });
            Ok(Outcome::json(v, Some(csv)))
        }
        Verb::Example {
            name,
            seed,
            grid,
            t,
            n,
            size,
            max_image,
            denom,
            polytope,
            skew_cone,
            dim,
            shape,
            ..
        } => {
            if !EXAMPLE_NAMES.contains(&name.as_str()) {
                bail!("unknown example `{name}` (expected one of {})", EXAMPLE_NAMES.join(", "));
            }
            let params = ExampleParams {
                grid: *grid,
                t: *t,
                n: *n,
                seed: *seed,
                size: *size,
                max_image: *max_image,
                denom: *denom,
                polytope: *polytope,
                skew_cone: *skew_cone,
                dim: *dim,
                shape: (*shape).into(),
            };
            let inst = make_example::<T>(name, &params)?;
            eprintln!("{name}: {} decisions, image dimension {}", inst.len(), inst.image_dim());
            Ok(Outcome::json(inst.to_json(), None))
        }
        Verb::Discretize { io, eps } => {
            let inst = load::<T>(io)?;
            let eps = scalar::<T>(eps, "eps")?;
            let d = discretize_map(&inst, &eps)?;
            let before: usize = inst.images.iter().map(|i| i.len()).sum();
            let after: usize = d.images.iter().map(|i| i.len()).sum();
            eprintln!("points: {before} -> {after}");
            Ok(Outcome::json(d.to_json(), None))
        }
        Verb::Distance { io, to } => {
            let a = load::<T>(io)?;
            let b = Instance::<T>::load(to).with_context(|| format!("loading {}", to.display()))?;
            let d = instance_distance(&a, &b)?;
            println!("distance={}", text(&d));
            Ok(Outcome::json(json!({ "distance": d.to_json() }), None))
        }
        Verb::Verify {
            seed,
            count,
            polytopes,
            size,
            max_image,
            inject_fault,
            timing,
            only,
            ..
        } => {
            let config = SuiteConfig::<T> {
                seeds: (*seed..*seed + *count).collect(),
                polytope_count: *polytopes,
                size: *size,
                max_image: *max_image,
                inject_fault: *inject_fault,
                only: (!only.is_empty()).then(|| only.clone()),
                ..Default::default()
            };
            let report = run_suite(&config);
            print_suite(&report);
            Ok(Outcome {
                failed: !report.all_hard_passed(),
                report: Report::Json {
                    value: report.to_json(*timing),
                    csv: Some(suite_csv(&report)),
                },
            })
        }
        Verb::ConvexExp {
            seed,
            grid,
            n,
            count,
            shape,
            timing,
            ..
        } => {
            let config = ConvexConfig {
                seed: *seed,
                grid: *grid,
                n: *n,
                count: *count,
                shape: (*shape).into(),
            };
            let report = convex_experiment::<T>(&config);
            let ratios = agreement_ratios(&report);
            let mean = if ratios.is_empty() { 1.0 } else { ratios.iter().sum::<f64>() / ratios.len() as f64 };
            println!("instances={} mean_agreement={mean:.4}", ratios.len());
            // disagreements are empirical findings, never a hard failure
            Ok(Outcome::json(report.to_json(*timing), Some(suite_csv(&report))))
        }
        Verb::Plot { io, concept, eps } => {
            let inst = load::<T>(io)?;
            let eps = scalar::<T>(eps, "eps")?;
            let r = solve_direct(&inst, (*concept).into(), &eps)?;
            let title = format!("{} solution at eps={}", r.concept.name(), text(&eps));
            let rendering = render(&inst, &r.members, &title)?;
            match &rendering {
                Rendering::Svg(_) => println!("svg: {} image sets", inst.len()),
                Rendering::Csv(_) => println!("image dimension {} is not 2: csv of coordinates", inst.image_dim()),
            }
            Ok(Outcome {
                report: Report::Text(rendering.as_str().to_string()),
                failed: false,
            })
        }
    }
}

fn print_suite(report: &SuiteReport) {
    for (name, pass, fail) in report.summary() {
        println!("{:<8} {name} ({pass} passed, {fail} failed)", if fail == 0 { "PASS" } else { "FAIL" });
    }
    for f in report.hard_failures() {
        println!("hard failure: {} on {}", f.name, f.instance);
    }
}

fn suite_csv(report: &SuiteReport) -> String {
    let mut csv = String::from("check,instance,hard,passed\n");
    for c in &report.checks {
        csv.push_str(&format!("{},{},{},{}\n", c.name, csv_field(&c.instance), c.hard, c.passed));
    }
    csv
}
