use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use kgraph_core::checks::{self, CheckConfig, CheckOutcome, WindowUniverse, MEASURE_TOL};
use kgraph_core::construct::opposite_graph;
use kgraph_core::document::{ConfigOverrides, SpecDocument};
use kgraph_core::dynamics::{
    bracket, distance, local_product_enum, mixing_lag_with_threshold, sample_windows, shift, MetricParams, Sampling,
    Window,
};
use kgraph_core::measure::{conditional_measure, parry_measure, CylinderSet, Side};
use kgraph_core::relations::{asymptotic_equiv, stable_equiv, unstable_equiv};
use kgraph_core::spectral::generator_matrix;
use kgraph_core::{
    af_multiplicities, aperiodicity_probe, classify_connectivity, perron_data, validate_skeleton, vertex_matrix,
    DegreeVector, KGraph, KGraphError, Morphism, Result, VertexMatrix,
};

use crate::config::Config;
use crate::report::{Inputs, Report, ReportViolation, Status};

/// Enumerations behind the check batteries stay below this many morphisms;
/// the default depths fit comfortably for graphs the size of the examples.
pub const CHECK_BUDGET: u64 = 1 << 17;
/// Morphism and cylinder listings are truncated past this length.
pub const LIST_CAP: usize = 256;
const SAMPLED_WINDOWS: usize = 8;
const PROBE_DEPTH: usize = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Command {
    Validate,
    Enumerate,
    Spectral,
    Measure,
    Dynamics,
    Relations,
    Suite,
}

impl Command {
    pub const ALL: [Command; 7] = [
        Command::Validate,
        Command::Enumerate,
        Command::Spectral,
        Command::Measure,
        Command::Dynamics,
        Command::Relations,
        Command::Suite,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Enumerate => "enumerate",
            Command::Spectral => "spectral",
            Command::Measure => "measure",
            Command::Dynamics => "dynamics",
            Command::Relations => "relations",
            Command::Suite => "suite",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown command {s:?}"))
    }
}

/// Command-line settings layered on top of the document's own config.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Flags {
    pub overrides: ConfigOverrides,
    pub degree: Option<DegreeVector>,
}

/// SHA-256 of the compact serialization of the document. Field order is fixed
/// by the document type, so equal documents hash equally regardless of the
/// whitespace or key order of the source text.
pub fn digest(doc: &SpecDocument) -> String {
    let canonical = serde_json::to_string(doc).expect("documents serialize");
    hex::encode(Sha256::digest(canonical.as_bytes()))
}

pub fn error_kind(e: &KGraphError) -> &'static str {
    match e {
        KGraphError::Parse { .. } => "parse",
        KGraphError::MalformedSkeleton { .. } => "malformed_skeleton",
        KGraphError::ValidationFailure(_) => "validation_failure",
        KGraphError::BoundExceeded { .. } => "bound_exceeded",
        KGraphError::NotComposable { .. } => "not_composable",
        KGraphError::DegreeMismatch(_) => "degree_mismatch",
        KGraphError::RankMismatch(..) => "rank_mismatch",
        KGraphError::NotIrreducible => "not_irreducible",
        KGraphError::NoPositiveCombination(_) => "no_positive_combination",
        KGraphError::NotConverged { .. } => "not_converged",
        KGraphError::GraphMismatch(_) => "graph_mismatch",
        KGraphError::RadiusExhausted { .. } => "radius_exhausted",
        KGraphError::RadiusMismatch(..) => "radius_mismatch",
        KGraphError::NotBracketable => "not_bracketable",
        KGraphError::OutOfBox { .. } => "out_of_box",
        KGraphError::NotPrimitive => "not_primitive",
        KGraphError::NotComposableInGroupoid(_) => "not_composable_in_groupoid",
        KGraphError::InvalidParameter(_) => "invalid_parameter",
    }
}

/// Problems with the input or the requested sizes are input errors; anything
/// the mathematics rejects is a violation.
pub fn error_status(e: &KGraphError) -> Status {
    match e {
        KGraphError::Parse { .. }
        | KGraphError::MalformedSkeleton { .. }
        | KGraphError::BoundExceeded { .. }
        | KGraphError::DegreeMismatch(_)
        | KGraphError::RankMismatch(..)
        | KGraphError::GraphMismatch(_)
        | KGraphError::RadiusExhausted { .. }
        | KGraphError::RadiusMismatch(..)
        | KGraphError::OutOfBox { .. }
        | KGraphError::InvalidParameter(_) => Status::InputError,
        _ => Status::Violation,
    }
}

fn error_violations(e: &KGraphError) -> Vec<ReportViolation> {
    match e {
        KGraphError::ValidationFailure(report) => skeleton_violations(report),
        _ => vec![ReportViolation::new(error_kind(e), e.to_string())],
    }
}

fn skeleton_violations(report: &kgraph_core::ValidationReport) -> Vec<ReportViolation> {
    report
        .violations
        .iter()
        .map(|v| {
            let detail = serde_json::to_value(v).expect("violations serialize");
            let kind = detail["kind"].as_str().unwrap_or("violation").to_owned();
            ReportViolation::new(kind, v.to_string()).with_detail(detail)
        })
        .collect()
}

fn check_violations(outcomes: &[CheckOutcome]) -> Vec<ReportViolation> {
    outcomes
        .iter()
        .filter(|c| !c.passed)
        .map(|c| {
            let message = format!("{}: {} of {} cases failed", c.name, c.failures, c.cases);
            ReportViolation::new("check_failed", message).with_detail(to_value(c))
        })
        .collect()
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("results serialize")
}

/// Results plus the violations they imply.
struct Outcome {
    results: Value,
    violations: Vec<ReportViolation>,
}

impl Outcome {
    fn with_checks(mut results: Value, outcomes: Vec<CheckOutcome>) -> Outcome {
        let violations = check_violations(&outcomes);
        results["checks"] = to_value(&outcomes);
        Outcome { results, violations }
    }
}

fn input_error(command: Command, config: Config, digest: Option<String>, e: &KGraphError) -> Report {
    Report {
        command: command.name().to_owned(),
        status: Status::InputError,
        inputs: Inputs { digest, config },
        results: Value::Null,
        violations: vec![ReportViolation::new(error_kind(e), e.to_string())],
        timing: None,
    }
}

/// Parses `text` and runs `command` on it. Syntax errors produce an
/// input-error report rather than a Rust error.
pub fn run_text(command: Command, text: &str, flags: &Flags) -> Report {
    match kgraph_core::document::parse_spec(text) {
        Ok(doc) => run(command, &doc, flags),
        Err(e) => {
            let config = Config::default().apply(&flags.overrides);
            input_error(command, config, None, &e)
        }
    }
}

/// Runs one command on a parsed document.
pub fn run(command: Command, doc: &SpecDocument, flags: &Flags) -> Report {
    let mut config = Config::default()
        .apply(&doc.config.clone().unwrap_or_default())
        .apply(&flags.overrides);
    config.degree = flags.degree.clone();
    let digest = Some(digest(doc));
    if let Err(e) = config.check(doc.k) {
        return input_error(command, config, digest, &e);
    }
    let finish = |status: Status, outcome: Outcome| Report {
        command: command.name().to_owned(),
        status,
        inputs: Inputs {
            digest: digest.clone(),
            config: config.clone(),
        },
        results: outcome.results,
        violations: outcome.violations,
        timing: None,
    };
    let skeleton = match doc.to_skeleton() {
        Ok(sk) => sk,
        // `validate` reports a malformed document instead of rejecting it
        Err(e) if command == Command::Validate => {
            let outcome = Outcome {
                results: json!({"valid": false}),
                violations: error_violations(&e),
            };
            return finish(Status::Violation, outcome);
        }
        Err(e) => return input_error(command, config.clone(), digest.clone(), &e),
    };
    if command == Command::Validate {
        let report = validate_skeleton(&skeleton);
        let outcome = Outcome {
            results: json!({
                "valid": report.is_valid(),
                "k": skeleton.k(),
                "vertices": skeleton.vertex_count(),
                "edges": skeleton.edges().len(),
                "square_entries": report.square_entries,
                "cube_words": report.cube_words,
            }),
            violations: skeleton_violations(&report),
        };
        let status = if report.is_valid() {
            Status::Pass
        } else {
            Status::Violation
        };
        return finish(status, outcome);
    }
    let result = KGraph::new(skeleton).and_then(|kg| {
        let kg = kg.with_cap(config.enumeration_cap);
        match command {
            Command::Validate => unreachable!("handled above"),
            Command::Enumerate => enumerate(&kg, &config),
            Command::Spectral => spectral(&kg, &config),
            Command::Measure => measure(&kg, &config),
            Command::Dynamics => dynamics(&kg, &config),
            Command::Relations => relations(&kg, &config),
            Command::Suite => suite(&kg, &config),
        }
    });
    match result {
        Ok(outcome) => {
            let status = if outcome.violations.is_empty() {
                Status::Pass
            } else {
                Status::Violation
            };
            finish(status, outcome)
        }
        Err(e) => finish(
            error_status(&e),
            Outcome {
                results: Value::Null,
                violations: error_violations(&e),
            },
        ),
    }
}

/// The battery settings for a graph: the configured radius, tolerances and
/// seed, with enumeration depths scaled to [`CHECK_BUDGET`].
pub fn check_config(kg: &KGraph, config: &Config) -> CheckConfig {
    CheckConfig {
        radius: config.radius,
        metric_r: config.metric_r,
        tol: config.tol,
        seed: config.seed,
        search_bound: config.search_bound,
        ..CheckConfig::scaled(kg, CHECK_BUDGET)
    }
}

fn count_value(c: &num_bigint::BigUint) -> Value {
    match kgraph_core::kgraph::count_to_u64(c) {
        Some(n) => json!(n),
        None => json!(c.to_string()),
    }
}

/// Rows indexed by range, columns by source.
fn matrix_value(m: &VertexMatrix) -> Value {
    match m.to_u64_rows() {
        Some(rows) => json!(rows),
        None => json!(m.to_string_rows()),
    }
}

fn morphism_value(kg: &KGraph, m: &Morphism) -> Value {
    let sk = kg.skeleton();
    json!({
        "edges": kg.word_ids(m),
        "range": sk.vertex_id(m.range()),
        "source": sk.vertex_id(m.source()),
    })
}

fn vertex_ids(kg: &KGraph) -> Value {
    json!(kg.skeleton().vertex_ids())
}

fn enumerate(kg: &KGraph, config: &Config) -> Result<Outcome> {
    let d = config.degree_or_ones(kg.k());
    let count = kg.count(&d);
    let matrix = vertex_matrix(kg, &d);
    let morphisms = kg.enumerate_morphisms(&d)?;
    let mut violations = Vec::new();
    if num_bigint::BigUint::from(morphisms.len()) != matrix.total() {
        violations.push(ReportViolation::new(
            "count_mismatch",
            format!(
                "enumerated {} morphisms, the vertex matrix counts {}",
                morphisms.len(),
                matrix.total()
            ),
        ));
    }
    let listed: Vec<Value> = morphisms.iter().take(LIST_CAP).map(|m| morphism_value(kg, m)).collect();
    Ok(Outcome {
        results: json!({
            "degree": d,
            "count": count_value(&count),
            "vertices": vertex_ids(kg),
            "matrix": matrix_value(&matrix),
            "morphisms": listed,
            "truncated": morphisms.len() > LIST_CAP,
        }),
        violations,
    })
}

fn spectral(kg: &KGraph, config: &Config) -> Result<Outcome> {
    let k = kg.k();
    let ones = DegreeVector::ones(k);
    let conn = classify_connectivity(kg, &DegreeVector::splat(k, config.search_bound));
    let generators: Vec<Value> = (0..k).map(|c| matrix_value(&generator_matrix(kg, c))).collect();
    let af = af_multiplicities(kg, &ones, &ones);
    let counts = |v: &[num_bigint::BigUint]| v.iter().map(count_value).collect::<Vec<_>>();
    let mut results = json!({
        "vertices": vertex_ids(kg),
        "generators": generators,
        "vertex_matrix": matrix_value(&vertex_matrix(kg, &ones)),
        "connectivity": conn,
        "af": {
            "m": af.m,
            "n": af.n,
            "block_dims": counts(&af.block_dims),
            "multiplicity": matrix_value(&af.multiplicity),
            "next_block_dims": counts(&af.next_block_dims),
            "consistent": af.consistent,
        },
        "aperiodicity": aperiodicity_probe(kg, PROBE_DEPTH),
    });
    let cc = check_config(kg, config);
    let mut outcomes = vec![
        checks::check_semigroup(kg, cc.matrix_depth),
        checks::check_generator_commutation(kg),
        checks::check_matrix_counts(kg, cc.split_depth),
        checks::check_af(kg, cc.split_depth),
    ];
    let pd = perron_data(kg, config.tol)?;
    results["perron"] = to_value(&pd);
    outcomes.push(checks::check_perron(kg, &pd, cc.matrix_depth, config.tol));
    Ok(Outcome::with_checks(results, outcomes))
}

fn measure(kg: &KGraph, config: &Config) -> Result<Outcome> {
    let d = config.degree_or_ones(kg.k());
    let pd = perron_data(kg, config.tol)?;
    let morphisms = kg.enumerate_morphisms(&d)?;
    let mut total = 0.0;
    let mut cylinders = Vec::new();
    for m in &morphisms {
        let mu = parry_measure(kg, &pd, &CylinderSet::at_origin(m.clone()))?;
        total += mu.value;
        if cylinders.len() < LIST_CAP {
            cylinders.push(json!({
                "edges": kg.word_ids(m),
                "measure": mu,
                "stable_fiber": conditional_measure(kg, &pd, Side::Stable, m)?.value,
                "unstable_fiber": conditional_measure(kg, &pd, Side::Unstable, m)?.value,
            }));
        }
    }
    let cc = check_config(kg, config);
    let outcomes = vec![
        checks::check_expansion(kg, &pd, cc.cylinder_depth, cc.split_depth),
        checks::check_total_mass(kg, &pd),
        checks::check_product_decomposition(kg, &pd, cc.radius),
        checks::check_haar_scaling(kg, &pd, cc.cylinder_depth),
        checks::check_trace_scaling(kg, &pd, 2, cc.seed),
        checks::check_disintegration(kg, &pd, cc.cylinder_depth),
    ];
    let mut outcome = Outcome::with_checks(
        json!({
            "degree": d,
            "t": pd.t,
            "cylinders": cylinders,
            "truncated": morphisms.len() > LIST_CAP,
            "total": total,
        }),
        outcomes,
    );
    if (total - 1.0).abs() > MEASURE_TOL {
        outcome.violations.push(ReportViolation::new(
            "total_mass",
            format!("cylinders of degree {d} carry total mass {total}"),
        ));
    }
    Ok(outcome)
}

fn records(kg: &KGraph, ws: &[Window]) -> Value {
    json!(ws.iter().map(|w| w.to_record(kg)).collect::<Vec<_>>())
}

fn dynamics(kg: &KGraph, config: &Config) -> Result<Outcome> {
    let k = kg.k();
    let n = config.radius;
    let params = MetricParams::new(config.metric_r)?;
    let pd = perron_data(kg, config.tol)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let windows = sample_windows(kg, n, SAMPLED_WINDOWS, Sampling::Parry(&pd), &mut rng)?;
    let mut pairs = Vec::new();
    for (x, y) in windows.iter().zip(windows.iter().skip(1)) {
        let bracketed = match bracket(kg, x, y) {
            Ok(w) => to_value(&w.to_record(kg)),
            Err(KGraphError::NotBracketable) => Value::Null,
            Err(e) => return Err(e),
        };
        pairs.push(json!({
            "x": x.to_record(kg),
            "y": y.to_record(kg),
            "distance": distance(x, y, &params)?,
            "bracket": bracketed,
        }));
    }
    let shifts: Vec<Value> = if n > 1 {
        (0..k)
            .map(|c| {
                let e = DegreeVector::unit(k, c);
                Ok(json!({"n": e, "window": shift(kg, &windows[0], &e)?.to_record(kg)}))
            })
            .collect::<Result<_>>()?
    } else {
        Vec::new()
    };
    let local: Vec<Value> = kg
        .vertices()
        .map(|v| {
            let lp = local_product_enum(kg, v, n)?;
            Ok(json!({
                "vertex": kg.skeleton().vertex_id(v),
                "e_fiber": lp.e_fiber.len(),
                "f_fiber": lp.f_fiber.len(),
                "windows": lp.windows,
                "product": lp.check,
            }))
        })
        .collect::<Result<_>>()?;
    let conn = classify_connectivity(kg, &DegreeVector::splat(k, config.search_bound));
    let mixing = match conn.primitivity_threshold.filter(|_| conn.primitive) {
        Some(m) => {
            let d = DegreeVector::ones(k);
            let u = CylinderSet::at_origin(checks::random_path(kg, &mut rng, &d, None)?);
            let v = CylinderSet::new(checks::random_path(kg, &mut rng, &d, None)?, d.clone());
            to_value(&mixing_lag_with_threshold(kg, &m, &u, &v)?)
        }
        None => Value::Null,
    };
    let universe = WindowUniverse::new(kg, n)?;
    let outcomes = vec![
        checks::check_window_blocks(&universe),
        checks::check_shift_semigroup(&universe),
        checks::check_expansiveness(&universe, &params, config.seed),
        checks::check_contraction(&universe, &params, config.seed),
        checks::check_bracket_axioms(&universe, config.seed),
        checks::check_local_product(kg, n),
        checks::check_mixing(kg, 20, config.search_bound, config.seed),
    ];
    Ok(Outcome::with_checks(
        json!({
            "radius": n,
            "window_count": count_value(&kg.count(&DegreeVector::splat(k, 2 * n as i64))),
            "samples": records(kg, &windows),
            "pairs": pairs,
            "shifts": shifts,
            "local_product": local,
            "mixing_lag": mixing,
        }),
        outcomes,
    ))
}

fn relation_flags(x: &Window, y: &Window, m: &DegreeVector) -> Result<Value> {
    let asymptotic = if m.is_nonneg() {
        json!(asymptotic_equiv(x, y, m)?)
    } else {
        Value::Null
    };
    Ok(json!({
        "m": m,
        "stable": stable_equiv(x, y, m)?,
        "unstable": unstable_equiv(x, y, m)?,
        "asymptotic": asymptotic,
    }))
}

fn relations(kg: &KGraph, config: &Config) -> Result<Outcome> {
    let k = kg.k();
    let n = config.radius;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let windows = sample_windows(kg, n, SAMPLED_WINDOWS, Sampling::Uniform, &mut rng)?;
    let reach = (n as i64 - 1).min(1);
    let offsets: Vec<DegreeVector> =
        DegreeVector::box_iter(&DegreeVector::splat(k, -reach), &DegreeVector::splat(k, reach)).collect();
    let mut sweeps = Vec::new();
    for (i, (x, y)) in windows.iter().zip(windows.iter().skip(1)).enumerate() {
        // besides the sampled pair, the bracket [y, x] shares the future of x
        let mut candidates = vec![("sampled", y.clone())];
        if let Ok(w) = bracket(kg, y, x) {
            candidates.push(("bracket", w));
        }
        for (kind, other) in candidates {
            let flags: Vec<Value> = offsets
                .iter()
                .map(|m| relation_flags(x, &other, m))
                .collect::<Result<_>>()?;
            sweeps.push(json!({
                "pair": i,
                "kind": kind,
                "x": x.to_record(kg),
                "y": other.to_record(kg),
                "offsets": flags,
            }));
        }
    }
    let universe = WindowUniverse::new(kg, n)?;
    let op = opposite_graph(kg)?;
    let (conjugation, fibered) = checks::check_shift_relations(&universe, 1, config.seed);
    let outcomes = vec![
        checks::check_stable_nesting(&universe, config.seed),
        checks::check_stable_class(&universe),
        conjugation,
        fibered,
        checks::check_asymptotic(&universe, &op, config.seed),
        checks::check_opposite_involution(&universe, &op, config.seed),
        checks::check_semidirect(&universe, config.seed),
    ];
    Ok(Outcome::with_checks(json!({"radius": n, "sweeps": sweeps}), outcomes))
}

fn suite(kg: &KGraph, config: &Config) -> Result<Outcome> {
    let cc = check_config(kg, config);
    let report = checks::run_suite(kg, &cc);
    let passed = report.checks.iter().filter(|c| c.passed).count();
    Ok(Outcome::with_checks(
        json!({
            "settings": cc,
            "passed": passed,
            "failed": report.checks.len() - passed,
        }),
        report.checks,
    ))
}
