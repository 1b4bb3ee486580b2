//! Command bodies. Each one returns the finished stdout text plus the
//! process exit code, so `main` stays a flag-to-function dispatcher.
//!
//! Exit codes: 0 when a decision was reached or an audited property holds,
//! 1 for usage and input errors, 2 when an audit finds a violation (the
//! witness is printed), 3 when an enumeration exceeds its budget.

use std::path::{Path, PathBuf};

use serde_json::json;
use sybilvote::{
    amendment_agenda, check_liveness_binary, check_liveness_ordinal, check_liveness_parameter,
    check_safety_instance, conservatism, default_grid, exhaustive_safety_binary,
    exhaustive_safety_ordinal, exhaustive_safety_parameter, less_conservative_check,
    majority_base_rule, min_safe_delta, sigma_point_plus_margin, sigma_upper_bound, simple_update,
    supermajority_condorcet_rule, supermajority_rule, suppress_outer_sigma, AltId, AuditVerdict,
    BinaryLivenessWitness, BinaryProfile, BinaryRule, BinarySafetyWitness, BinaryVote, Contest,
    ContestStage, DecisionOutcome, Delta, DeltaPolicy, Direction, Electorate, Error,
    InspectionSample, InstanceUniverse, MedianBand, OrdinalLivenessWitness, OrdinalProfile,
    OrdinalSafetyWitness, ParamRule, ParameterDominanceWitness, ParameterLivenessWitness,
    ParameterSafetyWitness, Property, Rational, SigmaBound, Variant,
};

use crate::election::{parse_election, Election, ElectionDoc};

pub struct CmdOutput {
    pub stdout: String,
    pub code: u8,
}

pub struct Failure {
    pub message: String,
    pub code: u8,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure {
            message: message.into(),
            code: 1,
        }
    }

    pub fn from_error(e: Error) -> Self {
        match e {
            Error::BudgetExceeded { required, budget } => Failure {
                message: format!(
                    "budget exceeded: the universe holds {required} instances, budget {budget}; \
                     raise --budget or shrink the universe"
                ),
                code: 3,
            },
            other => Failure::usage(other.to_string()),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Structured,
}

impl Format {
    pub fn from_flag(flag: &str) -> Result<Self, Failure> {
        match flag {
            "text" => Ok(Format::Text),
            "structured" => Ok(Format::Structured),
            other => Err(Failure::usage(format!(
                "unknown format '{other}' (expected text or structured)"
            ))),
        }
    }
}

fn parse_delta_flag(text: &str) -> Result<Delta, Failure> {
    text.parse()
        .map_err(|e: Error| Failure::usage(format!("bad delta '{text}': {e}")))
}

fn parse_sigma_flag(text: &str) -> Result<SigmaBound, Failure> {
    text.parse()
        .map_err(|e: Error| Failure::usage(format!("bad sigma '{text}': {e}")))
}

fn load_election(path: &Path) -> Result<ElectionDoc, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
    parse_election(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn pretty(doc: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("a serializable document");
    s.push('\n');
    s
}

fn ids_line(ids: impl IntoIterator<Item = impl std::fmt::Display>) -> String {
    ids.into_iter()
        .map(|a| a.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

// ---------------------------------------------------------------- decide

pub struct DecideSpec {
    pub file: PathBuf,
    pub rule: String,
    pub variant: Option<String>,
    pub delta: Option<String>,
    pub sigma: Option<String>,
    pub order: Option<String>,
}

/// Margin resolution: an explicit --delta wins, then the file header's
/// delta, then sigma/2 when a sigma is known, then zero.
fn resolve_delta(
    flag: &Option<String>,
    doc: &ElectionDoc,
    sigma_flag: Option<SigmaBound>,
) -> Result<Delta, Failure> {
    if let Some(text) = flag {
        return parse_delta_flag(text);
    }
    if doc.delta.is_none() {
        if let Some(s) = sigma_flag {
            return Ok(min_safe_delta(s));
        }
    }
    Ok(doc.default_delta())
}

pub fn decide(spec: &DecideSpec, format: Format) -> Result<CmdOutput, Failure> {
    let doc = load_election(&spec.file)?;
    let sigma_flag = match &spec.sigma {
        Some(text) => Some(parse_sigma_flag(text)?),
        None => None,
    };
    let sigma = sigma_flag.or(doc.sigma);
    let delta = resolve_delta(&spec.delta, &doc, sigma_flag)?;

    match (&doc.election, spec.rule.as_str()) {
        (Election::Binary(profile), "supermajority") => {
            let outcome = supermajority_rule(profile, delta).map_err(Failure::from_error)?;
            Ok(decision_output(
                "binary", "supermajority", Some(delta), sigma, None, None, &outcome, format,
            ))
        }
        (Election::Binary(profile), "majority") => {
            let outcome = majority_base_rule(profile).map_err(Failure::from_error)?;
            Ok(decision_output(
                "binary", "majority", None, sigma, None, None, &outcome, format,
            ))
        }
        (Election::Ordinal(profile), "condorcet") => {
            let variant = parse_variant(&spec.variant)?;
            let outcome = supermajority_condorcet_rule(profile, delta, variant)
                .map_err(Failure::from_error)?;
            Ok(decision_output(
                "ordinal",
                "condorcet",
                Some(delta),
                sigma,
                Some(variant),
                None,
                &outcome,
                format,
            ))
        }
        (Election::Ordinal(profile), "agenda") => {
            let variant = parse_variant(&spec.variant)?;
            let order = agenda_order(profile, &spec.order);
            let outcome = amendment_agenda(profile, delta, variant, &order)
                .map_err(Failure::from_error)?;
            Ok(decision_output(
                "ordinal",
                "agenda",
                Some(delta),
                sigma,
                Some(variant),
                Some(&order),
                &outcome,
                format,
            ))
        }
        (Election::Parameter(profile), rule @ ("suppress-outer" | "simple-update")) => {
            let sigma = sigma.unwrap_or_else(SigmaBound::zero);
            let value = match rule {
                "suppress-outer" => suppress_outer_sigma(profile, sigma),
                _ => simple_update(profile, sigma),
            }
            .map_err(Failure::from_error)?;
            Ok(parameter_output(rule, sigma, profile.reality, value, format))
        }
        (election, rule) => Err(Failure::usage(format!(
            "rule '{rule}' does not apply to a {} election (binary: supermajority, majority; \
             ordinal: condorcet, agenda; parameter: suppress-outer, simple-update)",
            election.kind()
        ))),
    }
}

fn parse_variant(flag: &Option<String>) -> Result<Variant, Failure> {
    flag.as_deref()
        .unwrap_or("conservative")
        .parse()
        .map_err(|e: Error| Failure::usage(e.to_string()))
}

/// An explicit --order is taken verbatim; otherwise the file's alternative
/// order with the status quo moved to the front.
fn agenda_order(profile: &OrdinalProfile, flag: &Option<String>) -> Vec<AltId> {
    match flag {
        Some(text) => text
            .split(',')
            .map(|t| AltId(t.trim().to_string()))
            .collect(),
        None => {
            let alts = profile.alternatives();
            let mut order = vec![alts.reality_id().clone()];
            order.extend(alts.ids().iter().filter(|a| *a != alts.reality_id()).cloned());
            order
        }
    }
}

fn stage_name(stage: ContestStage) -> &'static str {
    match stage {
        ContestStage::Viability => "viability",
        ContestStage::Sequence => "sequence",
        ContestStage::FinalCheck => "final-check",
        ContestStage::CondorcetScan => "condorcet-scan",
        ContestStage::Decision => "decision",
    }
}

fn contest_line(c: &Contest) -> String {
    let need = if c.weak { ">=" } else { ">" };
    let status = match (c.cleared, c.at_threshold) {
        (true, true) => "cleared at the threshold",
        (true, false) => "cleared",
        (false, true) => "failed at the threshold",
        (false, false) => "failed",
    };
    format!(
        "{}: {} vs {}, support {}/{}, need {need} 1/2 + {}, {status}",
        stage_name(c.stage),
        c.challenger,
        c.defender,
        c.support,
        c.total,
        c.delta
    )
}

#[allow(clippy::too_many_arguments)]
fn decision_output(
    kind: &str,
    rule: &str,
    delta: Option<Delta>,
    sigma: Option<SigmaBound>,
    variant: Option<Variant>,
    order: Option<&[AltId]>,
    outcome: &DecisionOutcome,
    format: Format,
) -> CmdOutput {
    let stdout = match format {
        Format::Structured => {
            let mut doc = json!({
                "command": "decide",
                "kind": kind,
                "rule": rule,
                "elected": outcome.winners,
                "trace": outcome.trace,
            });
            let entries = doc.as_object_mut().expect("a json object");
            if let Some(d) = delta {
                entries.insert("delta".into(), json!(d));
            }
            if let Some(s) = sigma {
                entries.insert("sigma".into(), json!(s));
            }
            if let Some(v) = variant {
                entries.insert("variant".into(), json!(v));
            }
            if let Some(o) = order {
                entries.insert("order".into(), json!(o));
            }
            pretty(&doc)
        }
        Format::Text => {
            let mut out = String::new();
            out.push_str(&format!("kind: {kind}\nrule: {rule}\n"));
            if let Some(v) = variant {
                out.push_str(&format!("variant: {v}\n"));
            }
            if let Some(d) = delta {
                out.push_str(&format!("delta: {d}\n"));
            }
            if let Some(s) = sigma {
                out.push_str(&format!("sigma: {s}\n"));
            }
            if let Some(o) = order {
                out.push_str(&format!("order: {}\n", ids_line(o)));
            }
            out.push_str(&format!("elected: {}\n", ids_line(&outcome.winners)));
            if !outcome.trace.is_empty() {
                out.push_str("trace:\n");
                for c in &outcome.trace {
                    out.push_str(&format!("  {}\n", contest_line(c)));
                }
            }
            out
        }
    };
    CmdOutput { stdout, code: 0 }
}

fn parameter_output(
    rule: &str,
    sigma: SigmaBound,
    reality: Rational,
    value: Rational,
    format: Format,
) -> CmdOutput {
    let direction = match value.cmp(&reality) {
        std::cmp::Ordering::Greater => Direction::Up,
        std::cmp::Ordering::Less => Direction::Down,
        std::cmp::Ordering::Equal => Direction::Stay,
    };
    let stdout = match format {
        Format::Structured => pretty(&json!({
            "command": "decide",
            "kind": "parameter",
            "rule": rule,
            "sigma": sigma,
            "current": reality,
            "value": value,
            "direction": direction,
        })),
        Format::Text => format!(
            "kind: parameter\nrule: {rule}\nsigma: {sigma}\ncurrent value: {reality}\n\
             new value: {value}\ndirection: {}\n",
            direction_name(direction)
        ),
    };
    CmdOutput { stdout, code: 0 }
}

fn direction_name(d: Direction) -> &'static str {
    match d {
        Direction::Up => "up",
        Direction::Down => "down",
        Direction::Stay => "stay",
    }
}

// ----------------------------------------------------------------- curve

/// Conservatism surface as CSV. Without --deltas every row takes the
/// minimal safe margin delta = sigma/2, where rho works out to
/// sigma/(1-sigma).
pub fn curve(
    sigmas: &Option<String>,
    deltas: &Option<String>,
    format: Format,
) -> Result<CmdOutput, Failure> {
    let sigma_grid: Vec<SigmaBound> = match sigmas {
        Some(text) => text
            .split(',')
            .map(|t| parse_sigma_flag(t.trim()))
            .collect::<Result<_, _>>()?,
        None => (0..=10)
            .map(|i| {
                SigmaBound::new(Rational::new(i, 20).expect("a fixed grid fraction"))
                    .expect("grid values stay inside [0, 1]")
            })
            .collect(),
    };
    let delta_grid: Option<Vec<Delta>> = match deltas {
        Some(text) => Some(
            text.split(',')
                .map(|t| parse_delta_flag(t.trim()))
                .collect::<Result<_, _>>()?,
        ),
        None => None,
    };

    let mut rows = Vec::new();
    for &sigma in &sigma_grid {
        let per_sigma = match &delta_grid {
            Some(ds) => ds.clone(),
            None => vec![min_safe_delta(sigma)],
        };
        for delta in per_sigma {
            match conservatism(sigma, delta) {
                Ok(point) => rows.push((
                    sigma,
                    delta,
                    point.rho.to_string(),
                    point.achievable,
                )),
                // A fully sybil electorate: no genuine margin exists.
                Err(Error::NoGenuineAgents) => {
                    rows.push((sigma, delta, "inf".to_string(), false))
                }
                Err(e) => return Err(Failure::from_error(e)),
            }
        }
    }

    let stdout = match format {
        Format::Structured => {
            let entries: Vec<_> = rows
                .iter()
                .map(|(sigma, delta, rho, achievable)| {
                    json!({
                        "sigma": sigma,
                        "delta": delta,
                        "rho": rho,
                        "achievable": achievable,
                    })
                })
                .collect();
            pretty(&json!({ "command": "curve", "rows": entries }))
        }
        Format::Text => {
            let mut out = String::from("sigma,delta,rho,achievable\n");
            for (sigma, delta, rho, achievable) in &rows {
                out.push_str(&format!("{sigma},{delta},{rho},{achievable}\n"));
            }
            out
        }
    };
    Ok(CmdOutput { stdout, code: 0 })
}

// ----------------------------------------------------------------- audit

pub struct AuditSpec {
    pub file: Option<PathBuf>,
    pub kind: Option<String>,
    pub property: String,
    pub rule: Option<String>,
    pub base: Option<String>,
    pub delta: Option<String>,
    pub sigma: Option<String>,
    pub penetration: Option<String>,
    pub n: Option<u64>,
    pub m: Option<usize>,
    pub budget: u64,
}

impl AuditSpec {
    fn n_max(&self) -> Result<u64, Failure> {
        self.n
            .ok_or_else(|| Failure::usage("--n (largest electorate size) is required"))
    }

    fn sigma(&self) -> Result<SigmaBound, Failure> {
        match &self.sigma {
            Some(text) => parse_sigma_flag(text),
            None => Err(Failure::usage("--sigma is required for this audit")),
        }
    }

    fn refuse(&self, present: bool, message: &str) -> Result<(), Failure> {
        if present {
            Err(Failure::usage(message))
        } else {
            Ok(())
        }
    }
}

pub fn audit(spec: &AuditSpec, format: Format) -> Result<CmdOutput, Failure> {
    let property: Property = spec
        .property
        .parse()
        .map_err(|e: Error| Failure::usage(e.to_string()))?;

    if let Some(path) = &spec.file {
        return file_audit(spec, path, property, format);
    }
    let kind = spec
        .kind
        .as_deref()
        .ok_or_else(|| Failure::usage("audit needs --file (one recorded election) or --kind (a whole universe)"))?;

    match (kind, property) {
        ("binary", Property::Safety) => binary_safety_audit(spec, format),
        ("binary", Property::Liveness) => binary_liveness_audit(spec, format),
        ("ordinal", Property::Safety) => ordinal_safety_audit(spec, format),
        ("ordinal", Property::Liveness) => ordinal_liveness_audit(spec, format),
        ("parameter", Property::Safety) => parameter_safety_audit(spec, format),
        ("parameter", Property::Liveness) => parameter_liveness_audit(spec, format),
        ("parameter", Property::LessConservative) => dominance_audit(spec, format),
        ("binary" | "ordinal", Property::LessConservative) => Err(Failure::usage(
            "the less-conservative ordering is audited for parameter rules only",
        )),
        _ => Err(Failure::usage(format!(
            "unknown kind '{kind}' (expected binary, ordinal or parameter)"
        ))),
    }
}

/// A file audit replays the one recorded instance: did the rule elect
/// something the genuine ballots alone would not have? The header must
/// carry `sybils=k`; the last k ballots are treated as sybil-cast.
fn file_audit(
    spec: &AuditSpec,
    path: &Path,
    property: Property,
    format: Format,
) -> Result<CmdOutput, Failure> {
    if property != Property::Safety {
        return Err(Failure::usage(
            "a file audit checks safety of the recorded instance; drop --file to audit a universe",
        ));
    }
    let doc = load_election(path)?;
    if let Some(kind) = &spec.kind {
        if kind != doc.election.kind() {
            return Err(Failure::usage(format!(
                "--kind {kind} does not match the {} election in {}",
                doc.election.kind(),
                path.display()
            )));
        }
    }
    let Election::Binary(full) = &doc.election else {
        return Err(Failure::usage(
            "file audits cover binary elections; ordinal and parameter guarantees are audited by universe (--kind)",
        ));
    };
    let sybils = doc.sybils.ok_or_else(|| {
        Failure::usage("a file audit needs `sybils=k` in the header, marking the last k ballots as sybil-cast")
    })?;
    let n = full.len();
    if sybils >= n {
        return Err(Failure::usage(
            "sybils must leave at least one genuine ballot",
        ));
    }
    let sigma_flag = match &spec.sigma {
        Some(text) => Some(parse_sigma_flag(text)?),
        None => None,
    };
    let delta = resolve_delta(&spec.delta, &doc, sigma_flag)?;
    let rule = match spec.rule.as_deref().unwrap_or("supermajority") {
        "supermajority" => BinaryRule::Supermajority { delta },
        "majority" => BinaryRule::Majority,
        other => {
            return Err(Failure::usage(format!(
                "unknown binary rule '{other}' (expected supermajority or majority)"
            )))
        }
    };
    let base = parse_base(&spec.base)?;
    let electorate = Electorate::with_counts(n - sybils, sybils).map_err(Failure::from_error)?;
    let honest = BinaryProfile::new(full.votes()[..(n - sybils) as usize].to_vec());
    let verdict =
        check_safety_instance(rule, base, &electorate, full, &honest).map_err(Failure::from_error)?;
    let universe = InstanceUniverse {
        n_max: n,
        sigma: None,
        ballot_space: "the recorded binary votes".into(),
        budget: spec.budget,
    };
    Ok(audit_output(universe, verdict, describe_binary_safety, format))
}

fn parse_base(flag: &Option<String>) -> Result<BinaryRule, Failure> {
    match flag.as_deref().unwrap_or("majority") {
        "majority" => Ok(BinaryRule::Majority),
        "always-reality" => Ok(BinaryRule::AlwaysReality),
        other => Err(Failure::usage(format!(
            "unknown base rule '{other}' (expected majority or always-reality)"
        ))),
    }
}

fn binary_safety_audit(spec: &AuditSpec, format: Format) -> Result<CmdOutput, Failure> {
    spec.refuse(spec.m.is_some(), "--m applies to ordinal audits")?;
    spec.refuse(
        spec.penetration.is_some(),
        "only parameter safety audits take --penetration; for binary audits --sigma bounds the sybil share",
    )?;
    if let Some(rule) = spec.rule.as_deref() {
        spec.refuse(
            rule != "supermajority",
            "the binary safety sweep audits the supermajority rule",
        )?;
    }
    let base = parse_base(&spec.base)?;
    // Margin policy: an explicit --delta is held fixed across every
    // partition; otherwise each partition gets the minimal safe margin
    // for its true sybil share.
    let policy = match &spec.delta {
        Some(text) => DeltaPolicy::Fixed(parse_delta_flag(text)?),
        None => DeltaPolicy::HalfSigma,
    };
    let penetration = match &spec.sigma {
        Some(text) => Some(parse_sigma_flag(text)?),
        None => None,
    };
    let n_max = spec.n_max()?;
    let verdict = exhaustive_safety_binary(policy, base, n_max, penetration, spec.budget)
        .map_err(Failure::from_error)?;
    let universe = InstanceUniverse {
        n_max,
        sigma: penetration,
        ballot_space: "binary votes".into(),
        budget: spec.budget,
    };
    Ok(audit_output(universe, verdict, describe_binary_safety, format))
}

fn binary_liveness_audit(spec: &AuditSpec, format: Format) -> Result<CmdOutput, Failure> {
    spec.refuse(spec.m.is_some(), "--m applies to ordinal audits")?;
    spec.refuse(
        spec.penetration.is_some(),
        "only parameter safety audits take --penetration",
    )?;
    let sigma = match &spec.sigma {
        Some(text) => parse_sigma_flag(text)?,
        None => {
            return Err(Failure::usage(
                "liveness asks whether a given sybil share can veto; --sigma is required",
            ))
        }
    };
    let delta = match &spec.delta {
        Some(text) => parse_delta_flag(text)?,
        None => min_safe_delta(sigma),
    };
    let rule = match spec.rule.as_deref().unwrap_or("supermajority") {
        "supermajority" => BinaryRule::Supermajority { delta },
        "majority" => BinaryRule::Majority,
        "always-reality" => BinaryRule::AlwaysReality,
        other => {
            return Err(Failure::usage(format!(
                "unknown binary rule '{other}' (expected supermajority, majority or always-reality)"
            )))
        }
    };
    let n_max = spec.n_max()?;
    let verdict = check_liveness_binary(rule, sigma, n_max, spec.budget)
        .map_err(Failure::from_error)?;
    let universe = InstanceUniverse {
        n_max,
        sigma: Some(sigma),
        ballot_space: "binary votes".into(),
        budget: spec.budget,
    };
    Ok(audit_output(universe, verdict, describe_binary_liveness, format))
}

fn ordinal_safety_audit(spec: &AuditSpec, format: Format) -> Result<CmdOutput, Failure> {
    spec.refuse(
        spec.delta.is_some() || spec.sigma.is_some(),
        "the ordinal safety sweep fixes delta = sigma/2 for each partition; --delta and --sigma do not apply",
    )?;
    spec.refuse(
        spec.penetration.is_some(),
        "only parameter safety audits take --penetration",
    )?;
    let m_max = spec.m.unwrap_or(3);
    let n_max = spec.n_max()?;
    let verdict =
        exhaustive_safety_ordinal(m_max, n_max, spec.budget).map_err(Failure::from_error)?;
    let universe = InstanceUniverse {
        n_max,
        sigma: None,
        ballot_space: format!("rankings over up to {m_max} alternatives"),
        budget: spec.budget,
    };
    Ok(audit_output(universe, verdict, describe_ordinal_safety, format))
}

fn ordinal_liveness_audit(spec: &AuditSpec, format: Format) -> Result<CmdOutput, Failure> {
    spec.refuse(
        spec.penetration.is_some(),
        "only parameter safety audits take --penetration",
    )?;
    spec.refuse(
        spec.delta.is_some(),
        "ordinal liveness runs at the minimal safe margin delta = sigma/2; --delta does not apply",
    )?;
    let sigma = spec.sigma()?;
    let m = spec.m.unwrap_or(3);
    let n_max = spec.n_max()?;
    let verdict = check_liveness_ordinal(m, sigma, n_max, spec.budget)
        .map_err(Failure::from_error)?;
    let universe = InstanceUniverse {
        n_max,
        sigma: Some(sigma),
        ballot_space: format!("rankings over {m} alternatives"),
        budget: spec.budget,
    };
    Ok(audit_output(universe, verdict, describe_ordinal_liveness, format))
}

fn parameter_safety_audit(spec: &AuditSpec, format: Format) -> Result<CmdOutput, Failure> {
    spec.refuse(spec.m.is_some(), "--m applies to ordinal audits")?;
    spec.refuse(
        spec.delta.is_some(),
        "parameter rules take their margin from --sigma; --delta does not apply",
    )?;
    let sigma = spec.sigma()?;
    // The rule trims by sigma; the enumerated sybil share may be bounded
    // tighter via --penetration (it defaults to the trim bound itself).
    let penetration = match &spec.penetration {
        Some(text) => parse_sigma_flag(text)?,
        None => sigma,
    };
    let n_max = spec.n_max()?;
    let grid = default_grid();
    let verdict = exhaustive_safety_parameter(sigma, penetration, n_max, &grid, spec.budget)
        .map_err(Failure::from_error)?;
    let universe = InstanceUniverse {
        n_max,
        sigma: Some(penetration),
        ballot_space: format!("ideal points on a {}-point grid", grid.len()),
        budget: spec.budget,
    };
    Ok(audit_output(universe, verdict, describe_parameter_safety, format))
}

fn parameter_liveness_audit(spec: &AuditSpec, format: Format) -> Result<CmdOutput, Failure> {
    spec.refuse(spec.m.is_some(), "--m applies to ordinal audits")?;
    spec.refuse(
        spec.delta.is_some(),
        "parameter rules take their margin from --sigma; --delta does not apply",
    )?;
    spec.refuse(
        spec.penetration.is_some(),
        "only parameter safety audits take --penetration",
    )?;
    let sigma = spec.sigma()?;
    let n_max = spec.n_max()?;
    let grid = default_grid();
    let verdict = check_liveness_parameter(sigma, n_max, &grid, spec.budget)
        .map_err(Failure::from_error)?;
    let universe = InstanceUniverse {
        n_max,
        sigma: Some(sigma),
        ballot_space: format!("ideal points on a {}-point grid", grid.len()),
        budget: spec.budget,
    };
    Ok(audit_output(universe, verdict, describe_parameter_liveness, format))
}

fn parse_param_rule(name: &str, sigma: SigmaBound) -> Result<ParamRule, Failure> {
    match name {
        "suppress-outer" => Ok(ParamRule::SuppressOuter { sigma }),
        "simple-update" => Ok(ParamRule::SimpleUpdate { sigma }),
        other => Err(Failure::usage(format!(
            "unknown parameter rule '{other}' (expected suppress-outer or simple-update)"
        ))),
    }
}

/// Does --rule always move at least as far from the status quo as --base,
/// with --base's output in between? Both rules run at the same sigma.
fn dominance_audit(spec: &AuditSpec, format: Format) -> Result<CmdOutput, Failure> {
    spec.refuse(spec.m.is_some(), "--m applies to ordinal audits")?;
    spec.refuse(
        spec.delta.is_some(),
        "parameter rules take their margin from --sigma; --delta does not apply",
    )?;
    spec.refuse(
        spec.penetration.is_some(),
        "only parameter safety audits take --penetration",
    )?;
    let sigma = spec.sigma()?;
    let rule_a = parse_param_rule(spec.rule.as_deref().unwrap_or("suppress-outer"), sigma)?;
    let rule_b = parse_param_rule(spec.base.as_deref().unwrap_or("simple-update"), sigma)?;
    let n_max = spec.n_max()?;
    let grid = default_grid();
    let verdict = less_conservative_check(rule_a, rule_b, n_max, &grid, spec.budget)
        .map_err(Failure::from_error)?;
    let universe = InstanceUniverse {
        n_max,
        sigma: None,
        ballot_space: format!("ideal points on a {}-point grid", grid.len()),
        budget: spec.budget,
    };
    Ok(audit_output(universe, verdict, describe_dominance, format))
}

fn audit_output<W: serde::Serialize>(
    universe: InstanceUniverse,
    verdict: AuditVerdict<W>,
    describe: impl Fn(&W) -> String,
    format: Format,
) -> CmdOutput {
    let code = if verdict.holds { 0 } else { 2 };
    let stdout = match format {
        Format::Structured => pretty(&json!({
            "command": "audit",
            "universe": universe,
            "verdict": verdict,
        })),
        Format::Text => {
            let mut out = String::new();
            out.push_str(&format!("property: {}\n", verdict.property));
            let share = match &universe.sigma {
                Some(s) => format!(", sybil share {s}"),
                None => String::new(),
            };
            let plural = if verdict.universe_size == 1 { "" } else { "s" };
            out.push_str(&format!(
                "universe: {} instance{plural} of {}, n <= {}{share}\n",
                verdict.universe_size, universe.ballot_space, universe.n_max
            ));
            out.push_str(&format!(
                "verdict: {}\n",
                if verdict.holds { "holds" } else { "violated" }
            ));
            if let Some(w) = &verdict.witness {
                out.push_str("witness:\n");
                for line in describe(w).lines() {
                    out.push_str("  ");
                    out.push_str(line);
                    out.push('\n');
                }
            }
            out
        }
    };
    CmdOutput { stdout, code }
}

// ------------------------------------------------------ witness rendering

fn binary_rule_name(rule: &BinaryRule) -> String {
    match rule {
        BinaryRule::Supermajority { delta } => format!("supermajority, delta {delta}"),
        BinaryRule::Majority => "majority".into(),
        BinaryRule::AlwaysReality => "always-reality".into(),
    }
}

fn vote_letter(v: &BinaryVote) -> &'static str {
    match v {
        BinaryVote::Proposal => "p",
        BinaryVote::Reality => "r",
    }
}

fn starred_votes(electorate: &Electorate, votes: &[BinaryVote]) -> String {
    votes
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let agent = electorate.agents()[i];
            if electorate.is_sybil(agent) {
                format!("{}*", vote_letter(v))
            } else {
                vote_letter(v).to_string()
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn electorate_line(e: &Electorate) -> String {
    format!(
        "electorate: {} genuine + {} sybil",
        e.genuine_count(),
        e.sybil_count()
    )
}

fn describe_binary_safety(w: &BinarySafetyWitness) -> String {
    format!(
        "rule: {}\nbase: {}\n{}\nvotes (sybil-cast starred): {}\nrule elects: {}\nbase on the genuine votes elects: {}",
        binary_rule_name(&w.rule),
        binary_rule_name(&w.base),
        electorate_line(&w.electorate),
        starred_votes(&w.electorate, w.votes.votes()),
        ids_line(&w.rule_winners),
        ids_line(&w.base_winners),
    )
}

fn describe_binary_liveness(w: &BinaryLivenessWitness) -> String {
    format!(
        "rule: {}\n{}\nsybil votes: {}\nattempted (every genuine agent for the proposal): {}\nrule elects: {}",
        binary_rule_name(&w.rule),
        electorate_line(&w.electorate),
        w.sybil_votes
            .iter()
            .map(vote_letter)
            .collect::<Vec<_>>()
            .join(" "),
        starred_votes(&w.electorate, w.attempted.votes()),
        ids_line(&w.rule_winners),
    )
}

fn starred_rankings(electorate: &Electorate, profile: &OrdinalProfile) -> String {
    let alts = profile.alternatives();
    profile
        .rankings()
        .iter()
        .enumerate()
        .map(|(i, ranking)| {
            let ids = ranking
                .iter()
                .map(|&j| alts.id(j).0.as_str())
                .collect::<Vec<_>>()
                .join(",");
            let agent = electorate.agents()[i];
            if electorate.is_sybil(agent) {
                format!("  {ids} *")
            } else {
                format!("  {ids}")
            }
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn describe_ordinal_safety(w: &OrdinalSafetyWitness) -> String {
    format!(
        "delta: {}\n{}\nballots (sybil-cast starred):\n{}\ncontested set: {}\nrule elects: {}\nbase on the genuine ballots elects: {}",
        w.delta,
        electorate_line(&w.electorate),
        starred_rankings(&w.electorate, &w.profile),
        ids_line(&w.contested),
        ids_line(&w.rule_winners),
        ids_line(&w.base_winners),
    )
}

fn describe_ordinal_liveness(w: &OrdinalLivenessWitness) -> String {
    let sybil_lines = w
        .sybil_ballots
        .iter()
        .map(|b| {
            format!(
                "  {}",
                b.iter().map(|a| a.0.as_str()).collect::<Vec<_>>().join(",")
            )
        })
        .collect::<Vec<_>>()
        .join("\n");
    format!(
        "target: {}\n{}\nsybil ballots:\n{}\nattempted (every genuine agent ranks the target first):\n{}\nrule elects: {}",
        w.target,
        electorate_line(&w.electorate),
        sybil_lines,
        starred_rankings(&w.electorate, &w.attempted),
        ids_line(&w.rule_winners),
    )
}

fn starred_ideals(electorate: &Electorate, ideals: &[Rational]) -> String {
    ideals
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let agent = electorate.agents()[i];
            if electorate.is_sybil(agent) {
                format!("{v}*")
            } else {
                v.to_string()
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn band_line(band: &MedianBand) -> String {
    match band.direction {
        Direction::Stay => format!("genuine ballots admit: stay at {}", band.reality),
        Direction::Up => format!("genuine ballots admit: up to at most {}", band.v_star),
        Direction::Down => format!("genuine ballots admit: down to at least {}", band.v_star),
    }
}

fn describe_parameter_safety(w: &ParameterSafetyWitness) -> String {
    format!(
        "sigma: {}\n{}\ncurrent value: {}\nideals (sybil-cast starred): {}\nrule output: {}\n{}",
        w.sigma,
        electorate_line(&w.electorate),
        w.profile.reality,
        starred_ideals(&w.electorate, &w.profile.ideals),
        w.rule_output,
        band_line(&w.base),
    )
}

fn describe_parameter_liveness(w: &ParameterLivenessWitness) -> String {
    format!(
        "blocked direction: {}\n{}\ncurrent value: {}\nsybil ideals: {}\nattempted (unanimous genuine ideal, sybil-cast starred): {}\nrule output: {}",
        direction_name(w.direction),
        electorate_line(&w.electorate),
        w.attempted.reality,
        ids_line(&w.sybil_ideals),
        starred_ideals(&w.electorate, &w.attempted.ideals),
        w.rule_output,
    )
}

fn param_rule_name(rule: &ParamRule) -> String {
    match rule {
        ParamRule::SuppressOuter { sigma } => format!("suppress-outer, sigma {sigma}"),
        ParamRule::SimpleUpdate { sigma } => format!("simple-update, sigma {sigma}"),
    }
}

fn describe_dominance(w: &ParameterDominanceWitness) -> String {
    format!(
        "rule a (claimed to move at least as far): {}\nrule b (claimed to stay between the status quo and rule a): {}\ncurrent value: {}\nideals: {}\nrule a output: {}\nrule b output: {}",
        param_rule_name(&w.rule_a),
        param_rule_name(&w.rule_b),
        w.profile.reality,
        ids_line(&w.profile.ideals),
        w.output_a,
        w.output_b,
    )
}

// -------------------------------------------------------- estimate-sigma

pub fn estimate_sigma(
    k: u64,
    s: u64,
    p: f64,
    epsilon: &Option<String>,
    format: Format,
) -> Result<CmdOutput, Failure> {
    let sample = InspectionSample::new(k, s, p).map_err(Failure::from_error)?;
    let bound = sigma_upper_bound(sample).map_err(Failure::from_error)?;
    let point = match epsilon {
        Some(text) => {
            let eps: Rational = text
                .parse()
                .map_err(|e: Error| Failure::usage(format!("bad epsilon '{text}': {e}")))?;
            Some((eps, sigma_point_plus_margin(sample, eps).map_err(Failure::from_error)?))
        }
        None => None,
    };

    let stdout = match format {
        Format::Structured => {
            let mut doc = json!({
                "command": "estimate-sigma",
                "sample": {
                    "inspected": k,
                    "sybils_observed": s,
                    "tail_probability": p,
                },
                "upper_bound": bound_entry(bound),
            });
            if let Some((eps, pm)) = &point {
                let mut entry = bound_entry(*pm);
                entry
                    .as_object_mut()
                    .expect("a json object")
                    .insert("epsilon".into(), json!(eps));
                doc.as_object_mut()
                    .expect("a json object")
                    .insert("point_plus_margin".into(), entry);
            }
            pretty(&doc)
        }
        Format::Text => {
            let mut out = String::new();
            out.push_str(&format!("sample: {k} inspected, {s} identified as sybils\n"));
            out.push_str(&format!("tail probability: {p}\n"));
            out.push_str(&bound_lines(bound, "sigma upper bound"));
            if let Some((eps, pm)) = &point {
                out.push_str(&bound_lines(
                    *pm,
                    &format!("point estimate plus margin {eps}"),
                ));
            }
            out
        }
    };
    Ok(CmdOutput { stdout, code: 0 })
}

fn one_third() -> Rational {
    Rational::new(1, 3).expect("a fixed fraction")
}

fn bound_lines(bound: SigmaBound, label: &str) -> String {
    let delta = min_safe_delta(bound);
    let liveness = if bound.value() < one_third() {
        "attainable (bound below 1/3)".to_string()
    } else {
        "blocked (bound at or above 1/3; at delta = sigma/2 the sybils can veto every proposal)"
            .to_string()
    };
    format!(
        "{label}: {:.6} (exactly {})\nrecommended delta: {:.6} (exactly {})\nliveness: {liveness}\n",
        bound.value().to_f64(),
        bound.value(),
        delta.value().to_f64(),
        delta.value(),
    )
}

fn bound_entry(bound: SigmaBound) -> serde_json::Value {
    let delta = min_safe_delta(bound);
    json!({
        "sigma": bound,
        "sigma_decimal": bound.value().to_f64(),
        "delta": delta,
        "delta_decimal": delta.value().to_f64(),
        "liveness_attainable": bound.value() < one_third(),
    })
}
