use std::path::Path;
use std::process::ExitCode;

use tribell_core::inequality::{catalog, certify_face_in, ch_lift, dedup, reduce_two_settings};
use tribell_core::membership::decompose_in;
use tribell_core::records::{
    from_json, to_json, to_json_lines, to_json_lines_array, EvaluationReport, InequalityRecord, LiftedRecord,
    MembershipRecord, TensorRecord, TrialRecord, VertexCatalog,
};
use tribell_core::signfn::{enumerate_admissible, one_variable_per_party, SignFunctionRecord, MAX_EXHAUSTIVE_PARTIES};
use tribell_core::verify::{run_suite, CheckOutcome, SuiteConfig};
use tribell_core::{Enumeration, Inequality, Polytope, Scenario, SignFunction};

use crate::io::{read_text, write_output, CliError, CliResult};
use crate::{Command, EnumArgs, ScenarioArgs, MAX_SAMPLE_CAP};

pub fn run(command: Command) -> CliResult<ExitCode> {
    match command {
        Command::Vertices { scenario, out } => vertices(scenario, out.as_deref()),
        Command::Signfns { scenario, enumeration, out } => signfns(scenario, enumeration, out.as_deref()),
        Command::Generate { scenario, enumeration, out } => generate(scenario, enumeration, out.as_deref()),
        Command::Evaluate { input, catalog, enumeration, out } => {
            evaluate(&input, catalog.as_deref(), enumeration, out.as_deref())
        }
        Command::Verify { scenario, enumeration, catalog, samples, trials, trials_out, out } => verify(
            scenario,
            enumeration,
            catalog.as_deref(),
            samples,
            trials,
            trials_out.as_deref(),
            out.as_deref(),
        ),
        Command::Reduce { scenario, enumeration, input, out } => {
            reduce(scenario, enumeration, input.as_deref(), out.as_deref())
        }
        Command::ChLift { catalog, out } => lift(catalog.as_deref(), out.as_deref()),
        Command::Member { input, out } => member(&input, out.as_deref()),
    }
}

fn scenario_of(a: ScenarioArgs) -> CliResult<Scenario> {
    Scenario::new(a.parties, a.settings).map_err(|e| CliError::Usage(e.to_string()))
}

/// Exhaustive when the table is small or when asked; sampled otherwise.
fn enumeration_for(s: Scenario, e: EnumArgs) -> CliResult<Enumeration> {
    if e.exhaustive || (s.index_vars() <= 4 && s.parties() <= MAX_EXHAUSTIVE_PARTIES) {
        return Ok(Enumeration::Exhaustive);
    }
    if e.cap > MAX_SAMPLE_CAP {
        return Err(CliError::Usage(format!(
            "--cap {} exceeds {MAX_SAMPLE_CAP} for {s}; pass --exhaustive for the full enumeration",
            e.cap
        )));
    }
    Ok(Enumeration::Sample { cap: e.cap, seed: e.seed })
}

fn certified_records(p: &Polytope, iqs: &[Inequality]) -> CliResult<Vec<InequalityRecord>> {
    let mut out = Vec::with_capacity(iqs.len());
    for iq in iqs {
        out.push(InequalityRecord::from_certificate(&certify_face_in(p, iq)?)?);
    }
    Ok(out)
}

fn load_catalog(path: &Path) -> CliResult<Vec<InequalityRecord>> {
    let records: Vec<InequalityRecord> = from_json(&read_text(path)?)?;
    if records.is_empty() {
        return Err(CliError::Usage(format!("{}: catalog is empty", path.display())));
    }
    Ok(records)
}

fn inequalities(records: &[InequalityRecord], s: Scenario) -> CliResult<Vec<Inequality>> {
    records
        .iter()
        .enumerate()
        .map(|(i, r)| {
            if r.scenario != s {
                return Err(CliError::Usage(format!("catalog entry {i} is for {}, expected {s}", r.scenario)));
            }
            Ok(r.inequality()?)
        })
        .collect()
}

fn vertices(a: ScenarioArgs, out: Option<&Path>) -> CliResult<ExitCode> {
    let p = Polytope::new(scenario_of(a)?)?;
    write_output(out, &VertexCatalog::from_polytope(&p)?.to_json()?)?;
    Ok(ExitCode::SUCCESS)
}

fn signfns(a: ScenarioArgs, e: EnumArgs, out: Option<&Path>) -> CliResult<ExitCode> {
    let s = scenario_of(a)?;
    let sfs = enumerate_admissible(s, enumeration_for(s, e)?)?;
    let records: Vec<SignFunctionRecord> = sfs.iter().map(SignFunctionRecord::from).collect();
    write_output(out, &to_json_lines_array(&records)?)?;
    Ok(ExitCode::SUCCESS)
}

fn generate(a: ScenarioArgs, e: EnumArgs, out: Option<&Path>) -> CliResult<ExitCode> {
    let s = scenario_of(a)?;
    let p = Polytope::new(s)?;
    let records = certified_records(&p, &catalog(s, enumeration_for(s, e)?)?)?;
    write_output(out, &to_json_lines_array(&records)?)?;
    let face_size = 1usize << s.index_vars();
    let bad = records.iter().filter(|r| !r.tight || r.saturating_count != face_size).count();
    if bad > 0 {
        eprintln!("{bad} of {} records are not facets with {face_size} saturating vertices", records.len());
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}

fn evaluate(input: &Path, cat: Option<&Path>, e: EnumArgs, out: Option<&Path>) -> CliResult<ExitCode> {
    let tensor_rec: TensorRecord = from_json(&read_text(input)?)?;
    let tensor = tensor_rec.tensor()?;
    let s = tensor.scenario();
    let iqs = match cat {
        Some(path) => inequalities(&load_catalog(path)?, s)?,
        None => catalog(s, enumeration_for(s, e)?)?,
    };
    write_output(out, &EvaluationReport::new(&iqs, &tensor)?.to_json()?)?;
    Ok(ExitCode::SUCCESS)
}

/// Compares each record's stored certificate fields with a fresh certificate.
fn record_claims(p: &Polytope, records: &[InequalityRecord]) -> CheckOutcome {
    let mut mismatches = Vec::new();
    for (i, r) in records.iter().enumerate() {
        let fresh = r
            .inequality()
            .and_then(|iq| certify_face_in(p, &iq))
            .map(|c| (c.is_tight(), c.saturating_count()));
        match fresh {
            Ok(got) if got == (r.tight, r.saturating_count) => {}
            Ok((tight, count)) => mismatches.push(format!(
                "entry {i} ({}) records tight={} count={}, recomputed tight={tight} count={count}",
                r.provenance, r.tight, r.saturating_count
            )),
            Err(err) => mismatches.push(format!("entry {i} ({}): {err}", r.provenance)),
        }
    }
    CheckOutcome {
        name: "catalog records".into(),
        passed: mismatches.is_empty(),
        detail: format!("{} records, {} mismatches", records.len(), mismatches.len())
            + &mismatches.first().map(|m| format!(", first {m}")).unwrap_or_default(),
        seed: None,
    }
}

fn verify(
    a: ScenarioArgs,
    e: EnumArgs,
    cat: Option<&Path>,
    samples: usize,
    trials: usize,
    trials_out: Option<&Path>,
    out: Option<&Path>,
) -> CliResult<ExitCode> {
    let s = scenario_of(a)?;
    let cfg = SuiteConfig { scenario: s, seed: e.seed, samples, trials, enumeration: enumeration_for(s, e)? };
    let p = Polytope::new(s)?;
    let (mut outcomes, completeness) = match cat {
        Some(path) => {
            let records = load_catalog(path)?;
            let iqs = inequalities(&records, s)?;
            let report = run_suite(&cfg, Some(&iqs))?;
            let mut outcomes = vec![record_claims(&p, &records)];
            outcomes.extend(report.outcomes);
            (outcomes, report.completeness)
        }
        None => {
            let report = run_suite(&cfg, None)?;
            (report.outcomes, report.completeness)
        }
    };
    outcomes.sort_by_key(|o| !o.passed);
    for o in &outcomes {
        println!("{o}");
    }
    if let Some(path) = out {
        write_output(Some(path), &to_json_lines(&outcomes)?)?;
    }
    if let Some(path) = trials_out {
        let records: Vec<TrialRecord> =
            completeness.iter().flat_map(|r| r.trials.iter().map(TrialRecord::from)).collect();
        write_output(Some(path), &to_json_lines(&records)?)?;
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    if failed > 0 {
        eprintln!("{failed} of {} checks failed", outcomes.len());
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}

fn reduce(a: ScenarioArgs, e: EnumArgs, input: Option<&Path>, out: Option<&Path>) -> CliResult<ExitCode> {
    let sfs: Vec<SignFunction> = match input {
        Some(path) => {
            let records: Vec<SignFunctionRecord> = from_json(&read_text(path)?)?;
            records.into_iter().map(SignFunction::try_from).collect::<Result<_, _>>()?
        }
        None => {
            let s = scenario_of(a)?;
            if s.settings_per_party() != 3 {
                return Err(CliError::Usage("reduce starts from three settings per party".into()));
            }
            enumerate_admissible(s, enumeration_for(s, e)?)?.into_iter().filter(one_variable_per_party).collect()
        }
    };
    let Some(first) = sfs.first() else {
        return Err(CliError::Usage("no sign functions to reduce".into()));
    };
    let target = Scenario::new(first.parties(), 2)?;
    let mut reduced = Vec::with_capacity(sfs.len());
    for sf in &sfs {
        let r = reduce_two_settings(sf)?;
        if r.inequality.scenario() != target {
            return Err(CliError::Usage(format!("{sf} does not share the party count of {first}")));
        }
        reduced.push(r.inequality);
    }
    let p = Polytope::new(target)?;
    let records = certified_records(&p, &dedup(reduced))?;
    write_output(out, &to_json_lines_array(&records)?)?;
    Ok(ExitCode::SUCCESS)
}

fn lift(cat: Option<&Path>, out: Option<&Path>) -> CliResult<ExitCode> {
    let s = Scenario::new(2, 3)?;
    let iqs = match cat {
        Some(path) => inequalities(&load_catalog(path)?, s)?,
        None => catalog(s, Enumeration::Exhaustive)?,
    };
    let lifted = ch_lift(s, &iqs)?;
    let records: Vec<LiftedRecord> = lifted.inequalities.iter().map(LiftedRecord::new).collect::<Result<_, _>>()?;
    let vertices: Vec<Vec<i64>> = lifted
        .vertices
        .iter()
        .map(|v| v.to_i64s().ok_or_else(|| CliError::Io("lifted vertex out of range".into())))
        .collect::<CliResult<_>>()?;
    let rows = |items: Vec<String>| items.join(",\n");
    let text = format!(
        "{{\"slot_labels\":{},\n\"vertices\":[\n{}\n],\n\"inequalities\":[\n{}\n]}}\n",
        to_json(&lifted.slot_labels)?,
        rows(vertices.iter().map(to_json).collect::<Result<_, _>>()?),
        rows(records.iter().map(to_json).collect::<Result<_, _>>()?)
    );
    write_output(out, &text)?;
    Ok(ExitCode::SUCCESS)
}

fn member(input: &Path, out: Option<&Path>) -> CliResult<ExitCode> {
    let rec: TensorRecord = from_json(&read_text(input)?)?;
    let values = rec.raw_values()?;
    let p = Polytope::new(rec.scenario)?;
    let result = decompose_in(&p, &values)?;
    if !result.is_sound(&p, &values) {
        eprintln!("witness failed exact re-check");
        return Ok(ExitCode::from(1));
    }
    write_output(out, &(to_json(&MembershipRecord::new(&p, &result)?)? + "\n"))?;
    Ok(ExitCode::SUCCESS)
}
