//! Command-line driver for the `g2mut` engine.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use g2mut::bwb::CohomologyProfile;
use g2mut::mutation::{gram, ExcCollection, ProbeBox};
use g2mut::proof::{emit, paper_script, run, Format, RunConfig};
use g2mut::sheaf::{DeterminacyReport, FilteredBundle, ParseError, SheafCalc};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "g2mut",
    version,
    about = "Verify the G2 mutation sequence and query cohomology on F and M"
)]
pub struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Log every check as it is evaluated.
    #[arg(long, global = true)]
    pub trace: bool,
    /// Probe rectangle a0 a1 b0 b1 for class comparisons.
    #[arg(long, global = true, num_args = 4, value_names = ["A0", "A1", "B0", "B1"], allow_negative_numbers = true)]
    pub probe_box: Option<Vec<i64>>,
    /// Fixed emission timestamp.
    #[arg(long, global = true)]
    pub timestamp: Option<String>,
    /// TOML file with defaults for the flags above.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Space {
    #[value(name = "F")]
    F,
    #[value(name = "M")]
    M,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Replay the proof script and print the certificate.
    Verify,
    /// Cohomology of a bundle expression on F or M.
    Cohomology {
        #[arg(value_enum)]
        space: Space,
        expr: String,
    },
    /// Ext between two bundle expressions on F or M.
    Ext {
        #[arg(value_enum)]
        space: Space,
        a: String,
        b: String,
    },
    /// Gram matrix of the initial, final, or an intermediate collection.
    Gram { which: String },
    /// Print the proof script.
    Script {
        #[command(subcommand)]
        action: ScriptAction,
    },
}

#[derive(Debug, Subcommand)]
pub enum ScriptAction {
    Dump,
}

/// Flag defaults read from `--config`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileDefaults {
    pub json: Option<bool>,
    pub trace: Option<bool>,
    pub probe_box: Option<[i64; 4]>,
    pub timestamp: Option<String>,
}

pub fn parse_config(text: &str) -> Result<FileDefaults> {
    let d: FileDefaults = toml::from_str(text).context("invalid config file")?;
    if let Some([a0, a1, b0, b1]) = d.probe_box {
        if a0 > a1 || b0 > b1 {
            bail!("probe_box must satisfy a0 <= a1 and b0 <= b1");
        }
    }
    Ok(d)
}

fn load_config(path: &Path) -> Result<FileDefaults> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_config(&text)
}

/// Flags after merging the config file; command-line values win.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Settings {
    pub json: bool,
    pub trace: bool,
    pub probes: ProbeBox,
    pub timestamp: Option<String>,
}

impl Settings {
    pub fn resolve(cli: &Cli) -> Result<Settings> {
        let file = match &cli.config {
            Some(p) => load_config(p)?,
            None => FileDefaults::default(),
        };
        let probe = match (&cli.probe_box, file.probe_box) {
            (Some(v), _) => [v[0], v[1], v[2], v[3]],
            (None, Some(b)) => b,
            (None, None) => {
                let d = ProbeBox::default();
                [d.a0, d.a1, d.b0, d.b1]
            }
        };
        if probe[0] > probe[1] || probe[2] > probe[3] {
            bail!("probe box must satisfy a0 <= a1 and b0 <= b1");
        }
        Ok(Settings {
            json: cli.json || file.json.unwrap_or(false),
            trace: cli.trace || file.trace.unwrap_or(false),
            probes: ProbeBox {
                a0: probe[0],
                a1: probe[1],
                b0: probe[2],
                b1: probe[3],
            },
            timestamp: cli.timestamp.clone().or(file.timestamp),
        })
    }

    fn run_config(&self) -> RunConfig {
        RunConfig {
            probes: self.probes,
            timestamp: self.timestamp.clone(),
            ..RunConfig::default()
        }
    }
}

/// Bad input from the user (as opposed to a failed verification).
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for UsageError {}

fn parse_bundle(src: &str) -> Result<FilteredBundle> {
    FilteredBundle::parse(src).map_err(|e: ParseError| {
        let caret = format!("{}^", " ".repeat(e.position));
        anyhow::Error::new(UsageError(format!("{e}\n  {src}\n  {caret}")))
    })
}

#[derive(Serialize)]
struct ProfileOutput<'a> {
    space: &'a str,
    input: Vec<String>,
    profile: &'a CohomologyProfile,
    status: String,
    lower: &'a CohomologyProfile,
    upper: &'a CohomologyProfile,
    conflicts: &'a [String],
}

fn print_profile(
    out: &mut dyn Write,
    settings: &Settings,
    space: Space,
    input: Vec<String>,
    letter: &str,
    got: &(CohomologyProfile, DeterminacyReport),
) -> Result<i32> {
    let (p, r) = got;
    let space_name = match space {
        Space::F => "F",
        Space::M => "M",
    };
    if settings.json {
        let doc = ProfileOutput {
            space: space_name,
            input,
            profile: p,
            status: r.status.to_string(),
            lower: &r.lower,
            upper: &r.upper,
            conflicts: &r.conflicts,
        };
        writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)?;
    } else if r.is_determined() {
        writeln!(out, "{} ({})", p.describe(letter), r.status)?;
    } else {
        writeln!(
            out,
            "{} ({}; lower bound {})",
            p.describe(letter),
            r.status,
            r.lower.describe(letter)
        )?;
        for c in &r.conflicts {
            writeln!(out, "  {c}")?;
        }
    }
    Ok(if r.is_determined() {
        EXIT_OK
    } else {
        EXIT_FAIL
    })
}

fn collection_for(which: &str, config: &RunConfig) -> Result<ExcCollection> {
    let script = paper_script();
    if which == "initial" {
        return Ok(script.initial.clone());
    }
    let cert = run(&script, config)?;
    let record = match which {
        "final" => cert.steps.last(),
        id => cert.steps.iter().find(|s| s.id == id),
    };
    let Some(record) = record else {
        let ids: Vec<&str> = script.steps.iter().map(|s| s.id.as_str()).collect();
        return Err(UsageError(format!(
            "unknown collection {which:?}; use initial, final, or one of {}",
            ids.join(", ")
        ))
        .into());
    };
    if record.collection_after.is_empty() {
        bail!("step {} did not pass, no collection to show", record.id);
    }
    let entries = record
        .collection_after
        .iter()
        .filter(|n| !n.starts_with('Φ'))
        .map(|n| {
            parse_bundle(n).map(|b| {
                g2mut::mutation::Entry::Object(g2mut::mutation::CollectionObject::given(b))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ExcCollection::new(entries))
}

#[derive(Serialize)]
struct GramOutput {
    objects: Vec<String>,
    matrix: Vec<Vec<i128>>,
    upper_unitriangular: bool,
}

fn execute(cli: &Cli, settings: &Settings, out: &mut dyn Write) -> Result<i32> {
    let calc = SheafCalc::default();
    match &cli.command {
        Command::Verify => {
            let cert = run(&paper_script(), &settings.run_config())?;
            let format = if settings.json {
                Format::Json
            } else {
                Format::Text
            };
            write!(out, "{}", emit(&cert, format)?)?;
            Ok(if cert.overall_pass {
                EXIT_OK
            } else {
                EXIT_FAIL
            })
        }
        Command::Cohomology { space, expr } => {
            let v = parse_bundle(expr)?;
            let got = match space {
                Space::F => calc.cohomology_f(&v)?,
                Space::M => calc.cohomology_m(&v)?,
            };
            print_profile(out, settings, *space, vec![v.name()], "H", &got)
        }
        Command::Ext { space, a, b } => {
            let (a, b) = (parse_bundle(a)?, parse_bundle(b)?);
            let got = match space {
                Space::F => calc.ext_f(&a, &b)?,
                Space::M => calc.ext_m(&a, &b)?,
            };
            print_profile(out, settings, *space, vec![a.name(), b.name()], "Ext", &got)
        }
        Command::Gram { which } => {
            let coll = collection_for(which, &settings.run_config())?;
            let objs = coll.objects();
            let models: Vec<&FilteredBundle> = objs.iter().map(|o| &o.model).collect();
            let g = gram(&calc, &models)?;
            let names: Vec<String> = objs.iter().map(|o| o.name()).collect();
            if settings.json {
                let doc = GramOutput {
                    objects: names,
                    matrix: g.0.clone(),
                    upper_unitriangular: g.is_upper_unitriangular(),
                };
                writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)?;
            } else {
                writeln!(out, "{}", names.join(", "))?;
                write!(out, "{g}")?;
            }
            Ok(EXIT_OK)
        }
        Command::Script {
            action: ScriptAction::Dump,
        } => {
            let script = paper_script();
            if settings.json {
                writeln!(out, "{}", serde_json::to_string_pretty(&script)?)?;
            } else {
                writeln!(out, "initial: <{}>", script.initial.display().join(", "))?;
                for s in &script.steps {
                    writeln!(out, "{} {:?}: {}", s.id, s.kind(), s.quote)?;
                    if let Some(after) = &s.expected_after {
                        writeln!(out, "    => <{}>", after.join(", "))?;
                    }
                }
            }
            Ok(EXIT_OK)
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn main_with(
    args: impl IntoIterator<Item = OsString>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{text}")
            } else {
                write!(out, "{text}")
            };
            return code;
        }
    };
    let settings = match Settings::resolve(&cli) {
        Ok(s) => s,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            return EXIT_USAGE;
        }
    };
    if settings.trace {
        let _ = env_logger::Builder::new()
            .filter_level(log::LevelFilter::Trace)
            .target(env_logger::Target::Stderr)
            .try_init();
    }
    match execute(&cli, &settings, out) {
        Ok(code) => code,
        Err(e) => {
            if e.downcast_ref::<std::io::Error>()
                .is_some_and(|io| io.kind() == std::io::ErrorKind::BrokenPipe)
            {
                return EXIT_OK;
            }
            let _ = writeln!(err, "error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                EXIT_USAGE
            } else {
                EXIT_FAIL
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("g2mut")
            .chain(args.iter().copied())
            .map(OsString::from);
        let code = main_with(argv, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn cohomology_line() {
        let (code, out, _) = call(&["cohomology", "F", "O(3h-2H)"]);
        assert_eq!(code, 0);
        assert_eq!(out.trim(), "H^1 = 1 (Determined)");
    }

    #[test]
    fn ext_on_m() {
        let (code, out, _) = call(&["ext", "M", "dual(U)(-h)", "U"]);
        assert_eq!(code, 0);
        assert_eq!(out.trim(), "Ext^1 = 1 (Determined)");
    }

    #[test]
    fn ambiguous_exits_one() {
        let (code, out, _) = call(&["ext", "M", "U", "U"]);
        assert_eq!(code, 1);
        assert!(out.contains("Ambiguous"));
    }

    #[test]
    fn parse_error_exits_two() {
        let (code, _, err) = call(&["cohomology", "F", "O(3h-2Q)"]);
        assert_eq!(code, 2);
        assert!(err.contains("position"));
        let (code, _, _) = call(&["cohomology", "X", "O"]);
        assert_eq!(code, 2);
    }

    #[test]
    fn config_parsing() {
        let d = parse_config("json = true\nprobe_box = [-1, 1, -1, 1]\n").unwrap();
        assert_eq!(d.json, Some(true));
        assert_eq!(d.probe_box, Some([-1, 1, -1, 1]));
        assert!(parse_config("colour = 3").is_err());
        assert!(parse_config("probe_box = [2, 1, 0, 0]").is_err());
    }

    #[test]
    fn gram_initial() {
        let (code, out, _) = call(&["gram", "initial", "--json"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["upper_unitriangular"], true);
        assert_eq!(v["objects"].as_array().unwrap().len(), 6);
    }

    #[test]
    fn unknown_step_is_usage_error() {
        let (code, _, err) = call(&["gram", "move-99"]);
        assert_eq!(code, 2);
        assert!(err.contains("move-01"));
    }
}
