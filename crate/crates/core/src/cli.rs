//! Command-line front end. `run` takes the argument list and output streams
//! so the binary and the tests drive the same code.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::elicitation::{build_partition, validate_partition};
use crate::error::{Error, Result};
use crate::eval::{compare, simulate};
use crate::fuzzy::LinguisticVariable;
use crate::inference::{explain, plot_csv, Engine, RuleBase, DEFAULT_RESOLUTION};
use crate::tcp::{self, Dataset, ScheduleMode};
use crate::{defaults, io};

#[derive(Debug, Parser)]
#[command(name = "fuzzy-tcp", version, about = "Fuzzy-inference test case prioritization")]
pub struct Cli {
    /// Linguistic-variable file (defaults to the bundled partitions)
    #[arg(long, global = true, value_name = "PATH")]
    pub variables: Option<PathBuf>,

    /// Rule-base file (defaults to the bundled 20-rule base)
    #[arg(long, global = true, value_name = "PATH")]
    pub rules: Option<PathBuf>,

    /// Centroid sample count
    #[arg(long, global = true, default_value_t = DEFAULT_RESOLUTION)]
    pub resolution: usize,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Structured,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Order {
    /// Fuzzy ranking
    Fuzzy,
    /// Dataset file order (unsorted baseline)
    Dataset,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Priority of a single (execution time, failure rate) pair
    #[command(allow_negative_numbers = true)]
    Infer {
        exec_time: f64,
        failure_rate: f64,
        /// Print the full inference trace
        #[arg(long)]
        explain: bool,
        /// Write the aggregated output function as x,mu CSV
        #[arg(long, value_name = "PATH")]
        plot_out: Option<PathBuf>,
    },
    /// Rank the test cases of a dataset
    Prioritize {
        #[arg(long, value_name = "PATH")]
        dataset: Option<PathBuf>,
    },
    /// Emit a prerequisite-respecting execution plan
    Schedule {
        #[arg(long, value_name = "PATH")]
        dataset: Option<PathBuf>,
        #[arg(long, default_value_t = ScheduleMode::RunOnce)]
        mode: ScheduleMode,
        #[arg(long, value_enum, default_value_t = Order::Fuzzy)]
        order: Order,
        /// Also write the plan export to this file
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Simulate plans against a fault model and compare them
    Evaluate {
        #[arg(required = true, value_name = "PLAN")]
        plans: Vec<PathBuf>,
        #[arg(long, value_name = "PATH")]
        faults: PathBuf,
        #[arg(long, value_name = "PATH")]
        dataset: Option<PathBuf>,
    },
    /// Build a partition from Direct Rating survey rows
    Elicit {
        survey: PathBuf,
        /// Variable whose name, universe and term order the survey targets
        #[arg(long = "var", value_name = "NAME")]
        var: String,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Check variables, rules and dataset
    Validate {
        #[arg(long, value_name = "PATH")]
        dataset: Option<PathBuf>,
    },
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return e.exit_code();
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

fn write_out(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes())
        .map_err(|e| Error::io("<stdout>", e))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn load_variable_set(cli: &Cli) -> Result<Vec<LinguisticVariable>> {
    match &cli.variables {
        Some(p) => io::load_variables(p),
        None => Ok(defaults::variables()),
    }
}

fn load_rule_base(cli: &Cli) -> Result<RuleBase> {
    match &cli.rules {
        Some(p) => io::load_rules(p),
        None => Ok(defaults::rules()),
    }
}

fn load_engine(cli: &Cli) -> Result<Engine> {
    Engine::new(load_variable_set(cli)?, load_rule_base(cli)?, cli.resolution)
}

fn load_data(path: &Option<PathBuf>) -> Result<Dataset> {
    match path {
        Some(p) => io::load_dataset_any(p),
        None => Ok(defaults::dataset()),
    }
}

fn normalize(name: &str) -> String {
    name.chars()
        .filter(|c| c.is_alphanumeric())
        .flat_map(char::to_lowercase)
        .collect()
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    match &cli.command {
        Command::Infer {
            exec_time,
            failure_rate,
            explain: want_explain,
            plot_out,
        } => {
            let engine = load_engine(cli)?;
            let trace = engine.infer(&[
                (tcp::EXECUTION_TIME, *exec_time),
                (tcp::FAILURE_RATE, *failure_rate),
            ])?;
            let level = engine.output().dominant_term(trace.crisp_output).label.clone();
            if let Some(path) = plot_out {
                write_file(path, &plot_csv(&trace))?;
            }
            match cli.format {
                Format::Text => {
                    if *want_explain {
                        write_out(out, &explain(&trace, engine.rules()))?;
                    }
                    write_out(out, &format!("priority {:.2} ({level})\n", trace.crisp_output))?;
                }
                Format::Structured => {
                    let mut doc = json!({
                        "exec_time": exec_time,
                        "failure_rate": failure_rate,
                        "priority": trace.crisp_output,
                        "level": level,
                        "fired": trace.fired.iter().map(|f| json!({
                            "rule": f.rule_id,
                            "activation": f.activation,
                            "consequent": f.consequent,
                        })).collect::<Vec<_>>(),
                    });
                    if *want_explain {
                        doc["fuzzified"] = trace
                            .fuzzified
                            .iter()
                            .map(|f| {
                                let degrees: serde_json::Map<_, _> =
                                    f.degrees.iter().map(|(l, d)| (l.clone(), json!(d))).collect();
                                (f.variable.clone(), json!({"input": f.input, "degrees": degrees}))
                            })
                            .collect::<serde_json::Map<_, _>>()
                            .into();
                    }
                    write_out(out, &format!("{}\n", serde_json::to_string_pretty(&doc).unwrap()))?;
                }
            }
            Ok(0)
        }

        Command::Prioritize { dataset } => {
            let engine = load_engine(cli)?;
            let dataset = load_data(dataset)?;
            let ranked = tcp::prioritize(dataset.tests(), &engine)?;
            let name = |id| dataset.get(id).map(|t| t.name.clone()).unwrap_or_default();
            match cli.format {
                Format::Text => {
                    let mut text = format!(
                        "{:>4} {:>4}  {:<22} {:>7} {:>7}  {:<9} {:<9} promoted\n",
                        "rank", "id", "name", "raw", "final", "level", "final"
                    );
                    for (i, p) in ranked.iter().enumerate() {
                        text.push_str(&format!(
                            "{:>4} {:>4}  {:<22} {:>7.2} {:>7.2}  {:<9} {:<9} {}\n",
                            i + 1,
                            p.id,
                            name(p.id),
                            p.raw_score,
                            p.final_score,
                            p.level,
                            p.final_level,
                            if p.promoted { "yes" } else { "no" }
                        ));
                    }
                    write_out(out, &text)?;
                }
                Format::Structured => {
                    let rows: Vec<_> = ranked
                        .iter()
                        .enumerate()
                        .map(|(i, p)| {
                            json!({
                                "rank": i + 1,
                                "id": p.id,
                                "name": name(p.id),
                                "raw_score": p.raw_score,
                                "level": p.level,
                                "promoted": p.promoted,
                                "final_level": p.final_level,
                                "final_score": p.final_score,
                            })
                        })
                        .collect();
                    write_out(out, &format!("{}\n", serde_json::to_string_pretty(&rows).unwrap()))?;
                }
            }
            Ok(0)
        }

        Command::Schedule {
            dataset,
            mode,
            order,
            out: plan_out,
        } => {
            let dataset = load_data(dataset)?;
            let plan = match order {
                Order::Fuzzy => {
                    let engine = load_engine(cli)?;
                    let ranked = tcp::prioritize(dataset.tests(), &engine)?;
                    tcp::schedule(&ranked, &dataset, *mode)?
                }
                Order::Dataset => tcp::schedule_in_order(&dataset.ids(), &dataset, *mode)?,
            };
            let export = io::plan_to_json(&plan, &dataset);
            if let Some(path) = plan_out {
                write_file(path, &export)?;
            }
            match cli.format {
                Format::Text => write_out(out, &io::plan_to_text(&plan, &dataset))?,
                Format::Structured => write_out(out, &export)?,
            }
            Ok(0)
        }

        Command::Evaluate {
            plans,
            faults,
            dataset,
        } => {
            let dataset = load_data(dataset)?;
            let faults = io::load_fault_model(faults, &dataset)?;
            let mut reports = Vec::with_capacity(plans.len());
            for path in plans {
                let plan = io::load_plan(path)?;
                tcp::verify_plan(&plan, &dataset).map_err(|e| Error::parse(path, e.to_string()))?;
                let label = path
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| path.display().to_string());
                reports.push(simulate(label, &plan, &dataset, &faults)?);
            }
            match cli.format {
                Format::Text => write_out(out, &compare(&reports))?,
                Format::Structured => {
                    write_out(out, &format!("{}\n", serde_json::to_string_pretty(&reports).unwrap()))?
                }
            }
            Ok(0)
        }

        Command::Elicit {
            survey,
            var,
            out: var_out,
        } => {
            let variables = load_variable_set(cli)?;
            let template = variables
                .iter()
                .find(|v| normalize(v.name()) == normalize(var))
                .ok_or_else(|| Error::UnknownVariable(var.clone()))?;
            let survey = io::load_survey_csv(survey, template)?;
            let variable = build_partition(&survey)?;
            let doc = io::variable_to_json(&variable);
            if let Some(path) = var_out {
                write_file(path, &doc)?;
            }
            write_out(out, &doc)?;
            Ok(0)
        }

        Command::Validate { dataset } => {
            let mut findings: Vec<String> = Vec::new();
            let variables = match &cli.variables {
                Some(p) => io::load_variables_unchecked(p)?,
                None => defaults::variables(),
            };
            for v in &variables {
                findings.extend(validate_partition(v).iter().map(|f| format!("{}: {f}", v.name())));
            }
            if findings.is_empty() {
                // Rule references and data are only meaningful on a sound partition.
                if let Err(e) = Engine::new(variables, load_rule_base(cli)?, cli.resolution) {
                    findings.push(format!("rules: {e}"));
                }
                if let Err(e) = load_data(dataset) {
                    findings.push(format!("dataset: {e}"));
                }
            }
            match cli.format {
                Format::Text if findings.is_empty() => write_out(out, "ok\n")?,
                Format::Text => write_out(out, &findings.iter().map(|f| format!("{f}\n")).collect::<String>())?,
                Format::Structured => write_out(
                    out,
                    &format!("{}\n", serde_json::to_string_pretty(&json!({ "findings": findings })).unwrap()),
                )?,
            }
            Ok(if findings.is_empty() { 0 } else { 1 })
        }
    }
}
