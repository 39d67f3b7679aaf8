//! The mutation argument as data, its replay, and the resulting certificate.

pub mod axioms;
pub mod reproduce;
pub mod script;

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::bwb::{canonical, FlagVariety, LineClass, PicCalibration};
use crate::lie::LieError;
use crate::mutation::{
    is_exceptional, is_semiorthogonal, Check, ExcCollection, Mutator, ProbeBox, StepError, StepKind,
};
use crate::sheaf::SheafCalc;

pub use axioms::{AxiomResolver, AxiomTable};
pub use reproduce::Report;
pub use script::{paper_script, ProofScript, THEOREM_FUNCTOR};

#[derive(Debug, thiserror::Error)]
pub enum ProofError {
    #[error("script error in {step}: {source}")]
    Step {
        step: String,
        #[source]
        source: StepError,
    },
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error("certificate serialization failed: {0}")]
    Serialize(#[from] serde_json::Error),
}

/// Parameters of a run. The defaults are the shipped values.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub calibration: PicCalibration,
    pub k_m: LineClass,
    pub probes: ProbeBox,
    /// Emission time; the current Unix time when absent.
    pub timestamp: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            calibration: PicCalibration::SHIPPED,
            k_m: canonical::K_M,
            probes: ProbeBox::default(),
            timestamp: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Header {
    pub calibration: String,
    pub model_limitations: Vec<String>,
    pub tool_version: String,
    pub timestamp: String,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepStatus {
    Passed,
    Failed,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepRecord {
    pub id: String,
    pub quote: String,
    pub kind: StepKind,
    pub status: StepStatus,
    pub checks: Vec<Check>,
    pub collection_after: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub header: Header,
    pub calibration: Report,
    pub lemma1: Report,
    pub corollary: Report,
    pub proposition: Report,
    pub initial: Report,
    pub steps: Vec<StepRecord>,
    pub final_identification: Report,
    pub functor_string: String,
    pub overall_pass: bool,
}

impl Certificate {
    /// `(section, check)` of the first failing check, in document order.
    pub fn first_failure(&self) -> Option<(String, &Check)> {
        let sections = [
            ("calibration", &self.calibration),
            ("lemma1", &self.lemma1),
            ("corollary", &self.corollary),
            ("proposition", &self.proposition),
            ("initial", &self.initial),
        ];
        for (name, r) in sections {
            if let Some(c) = r.first_failure() {
                return Some((name.to_string(), c));
            }
        }
        for s in &self.steps {
            if let Some(c) = s.checks.iter().find(|c| !c.pass) {
                return Some((s.id.clone(), c));
            }
        }
        self.final_identification
            .first_failure()
            .map(|c| ("final_identification".to_string(), c))
    }

    /// All checks decided by the fallback rather than by factor bookkeeping.
    pub fn axiom_checks(&self) -> Vec<&Check> {
        let mut out: Vec<&Check> = Vec::new();
        for r in [&self.initial, &self.final_identification] {
            out.extend(r.checks.iter());
        }
        for s in &self.steps {
            out.extend(s.checks.iter());
        }
        out.retain(|c| c.justification == crate::mutation::Justification::Axiom);
        out
    }
}

const MODEL_LIMITATIONS: [&str; 4] = [
    "bundles are modelled by line-bundle filtration factors; extension classes are not represented",
    "class equality of mutation results is numerical equality against the probe line bundles, not equality in K(M)",
    "cohomology is certified only when degree bookkeeping forces it; other cases go through the logged fallback",
    "the D(X) and D(Y) components are opaque blocks tracked by position",
];

fn now_string() -> String {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs().to_string())
        .unwrap_or_else(|_| "0".to_string())
}

/// Replays `script` and collects every check into a certificate.
pub fn run(script: &ProofScript, config: &RunConfig) -> Result<Certificate, ProofError> {
    let flag = FlagVariety::with_calibration(config.calibration);
    let calc = SheafCalc::new(flag);
    let resolver = AxiomResolver::new(calc.clone(), script.axioms.clone());
    let mutator = Mutator {
        resolver: &resolver,
        k_m: config.k_m,
        probes: config.probes.probes(),
    };

    let calibration = reproduce::verify_calibration(calc.flag())?;
    let lemma1 = reproduce::verify_lemma1(&calc)?;
    let corollary = reproduce::verify_corollary(&calc)?;
    let proposition = reproduce::verify_proposition(&calc)?;

    let mut initial_checks = Vec::new();
    for obj in script.initial.objects() {
        initial_checks.push(is_exceptional(&resolver, obj)?);
    }
    initial_checks.extend(is_semiorthogonal(&resolver, &script.initial)?.checks);
    let initial = Report::from_checks(initial_checks);

    let mut steps = Vec::with_capacity(script.steps.len());
    let mut current: Option<ExcCollection> = initial.pass.then(|| script.initial.clone());
    for step in &script.steps {
        let Some(coll) = current.take() else {
            steps.push(StepRecord {
                id: step.id.clone(),
                quote: step.quote.clone(),
                kind: step.kind(),
                status: StepStatus::Skipped,
                checks: Vec::new(),
                collection_after: Vec::new(),
            });
            continue;
        };
        let outcome = mutator
            .apply_step(&coll, step)
            .map_err(|source| ProofError::Step {
                step: step.id.clone(),
                source,
            })?;
        let status = if outcome.pass() {
            StepStatus::Passed
        } else {
            StepStatus::Failed
        };
        log::info!("{}: {:?}", step.id, status);
        for c in &outcome.checks {
            log::trace!(
                "{}: {} expected {} found {} pass {}",
                step.id,
                c.name,
                c.expected,
                c.found,
                c.pass
            );
        }
        let collection_after = outcome
            .collection
            .as_ref()
            .map(|c| c.display())
            .unwrap_or_default();
        steps.push(StepRecord {
            id: step.id.clone(),
            quote: step.quote.clone(),
            kind: step.kind(),
            status,
            checks: outcome.checks,
            collection_after,
        });
        current = outcome.collection;
    }

    let final_coll = current;
    let functor_string = final_coll
        .as_ref()
        .and_then(|c| c.blocks().next().map(|b| b.functor_string()))
        .unwrap_or_default();
    let mut final_checks = Vec::new();
    if let Some(expected) = &script.expected_functor {
        let mut c = Check::direct(
            "block functor equals the stated composition",
            expected,
            &functor_string,
        );
        c.pass = script::squash_ws(expected) == script::squash_ws(&functor_string);
        final_checks.push(c);
    }
    let mut final_identification = Report::from_checks(final_checks);
    if script.identify_final {
        match &final_coll {
            Some(coll) => {
                let r = reproduce::verify_final_identification(&resolver, coll)?;
                final_identification.checks.extend(r.checks);
            }
            None => final_identification
                .checks
                .push(Check::boolean("replay reached the final collection", false)),
        }
        final_identification = Report::from_checks(final_identification.checks);
    }

    let overall_pass = [
        &calibration,
        &lemma1,
        &corollary,
        &proposition,
        &initial,
        &final_identification,
    ]
    .iter()
    .all(|r| r.pass)
        && steps.iter().all(|s| s.status == StepStatus::Passed);

    let mut notes = vec![
        "fullness of the cited collections on Q and G is assumed, not checked".to_string(),
        "move ids are sequential and do not follow any external numbering".to_string(),
    ];
    if config.k_m != canonical::K_M {
        notes.push(format!("K_M overridden to {}", config.k_m));
    }
    let header = Header {
        calibration: config.calibration.to_string(),
        model_limitations: MODEL_LIMITATIONS.iter().map(|s| s.to_string()).collect(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        timestamp: config.timestamp.clone().unwrap_or_else(now_string),
        notes,
    };
    Ok(Certificate {
        header,
        calibration,
        lemma1,
        corollary,
        proposition,
        initial,
        steps,
        final_identification,
        functor_string,
        overall_pass,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

/// Deterministic serialization.
pub fn emit(cert: &Certificate, format: Format) -> Result<String, ProofError> {
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(cert)? + "\n"),
        Format::Text => Ok(emit_text(cert)),
    }
}

fn mark(pass: bool) -> &'static str {
    if pass {
        "ok"
    } else {
        "FAIL"
    }
}

fn write_checks(out: &mut String, checks: &[Check]) {
    for c in checks {
        let how = match c.justification {
            crate::mutation::Justification::Direct => "",
            crate::mutation::Justification::Axiom => " [axiom]",
        };
        let _ = writeln!(out, "    {:4} {}: {}{}", mark(c.pass), c.name, c.found, how);
        if !c.pass {
            let _ = writeln!(out, "         expected {}", c.expected);
        }
        if !c.pass || c.justification == crate::mutation::Justification::Axiom {
            for d in &c.detail {
                let _ = writeln!(out, "         - {d}");
            }
        }
    }
}

fn emit_text(cert: &Certificate) -> String {
    let mut out = String::new();
    let h = &cert.header;
    let _ = writeln!(out, "g2mut {} (timestamp {})", h.tool_version, h.timestamp);
    let _ = writeln!(out, "calibration: {}", h.calibration);
    for n in &h.notes {
        let _ = writeln!(out, "note: {n}");
    }
    for (name, r) in [
        ("calibration", &cert.calibration),
        ("lemma", &cert.lemma1),
        ("corollary", &cert.corollary),
        ("proposition", &cert.proposition),
        ("initial collection", &cert.initial),
    ] {
        let _ = writeln!(out, "[{}] {name} ({} checks)", mark(r.pass), r.checks.len());
        if !r.pass {
            write_checks(&mut out, &r.checks);
        }
    }
    for s in &cert.steps {
        let status = match s.status {
            StepStatus::Passed => "ok",
            StepStatus::Failed => "FAIL",
            StepStatus::Skipped => "skip",
        };
        let _ = writeln!(out, "[{status}] {} {:?}: {}", s.id, s.kind, s.quote);
        let shown: Vec<Check> = s
            .checks
            .iter()
            .filter(|c| {
                !c.pass
                    || c.justification == crate::mutation::Justification::Axiom
                    || !c.name.starts_with("semiorthogonal")
            })
            .cloned()
            .collect();
        write_checks(&mut out, &shown);
        if !s.collection_after.is_empty() {
            let _ = writeln!(out, "    => <{}>", s.collection_after.join(", "));
        }
    }
    let r = &cert.final_identification;
    let _ = writeln!(out, "[{}] final identification", mark(r.pass));
    write_checks(&mut out, &r.checks);
    let _ = writeln!(out, "functor: {}", cert.functor_string);
    let _ = writeln!(
        out,
        "overall: {}",
        if cert.overall_pass { "PASS" } else { "FAIL" }
    );
    out
}
