use std::collections::BTreeMap;
use std::fmt::Write as _;

use curvagraph::curvature::higuchi_bound;
use curvagraph::isoperimetry::{check_isoperimetric_inequality, interior_ball, DEFAULT_MAX_SETS};
use curvagraph::polar::check_reconstruction;
use curvagraph::rational::FaceCurvature;
use curvagraph::*;
use serde_json::{json, Value};

use crate::input::{load, Input};
use crate::{Command, RunConfig};

const RECONSTRUCTION_TRIALS: usize = 10;
const LISTED: usize = 20;

pub struct Report {
    pub text: String,
    pub json: Value,
    /// A checked property failed, or the search found what it looks for.
    pub finding: bool,
}

pub fn run(command: Command, config: &RunConfig) -> Result<Report, String> {
    let input = load(config)?;
    let result = match command {
        Command::Curvature => curvature(&input),
        Command::Classify => classify_map(&input, config),
        Command::GaussBonnet => gauss_bonnet_sum(&input, config),
        Command::Embed => embedding(&input, config),
        Command::Cutlocus => cutlocus(&input, config),
        Command::Admissibility => admissibility(&input, config),
        Command::Bigons => bigons(&input, config),
        Command::Growth => growth(&input, config),
        Command::Cheeger => cheeger(&input, config),
        Command::Spectrum => spectrum(&input, config),
        Command::Polar => polar(&input, config),
        Command::Eigensearch => eigensearch(&input, config),
    };
    let (mut text, mut json, finding) = result.map_err(|e| e.to_string())?;
    text.insert_str(0, &format!("map: {} ({} vertices)\n", input.label, input.map.num_vertices()));
    if let Value::Object(fields) = &mut json {
        fields.insert("map".into(), json!(input.label));
        fields.insert("vertices".into(), json!(input.map.num_vertices()));
        fields.insert("finding".into(), json!(finding));
    }
    Ok(Report { text, json, finding })
}

type Outcome = Result<(String, Value, bool)>;

fn face_curvature_text(k: &FaceCurvature) -> String {
    match k {
        FaceCurvature::Value(r) => r.to_string(),
        FaceCurvature::UnboundedNegative => "-inf".into(),
    }
}

fn opt<T: ToString>(x: &Option<T>) -> String {
    x.as_ref().map_or("n/a".into(), T::to_string)
}

fn ball_vertices(map: &CombinatorialMap, root: VertexId, radius: usize) -> Vec<VertexId> {
    let dist = distances_from(map, &[root]);
    map.vertices().filter(|&v| dist[v].is_some_and(|d| d <= radius)).collect()
}

fn curvature(input: &Input) -> Outcome {
    let map = &input.map;
    let faces = trace_faces(map);
    let report = CurvatureReport::compute(map, &faces);
    let mut text = String::new();
    writeln!(text, "sup kappa_C = {}", opt(&report.sup_corner)).unwrap();
    writeln!(text, "sup kappa_V = {}", opt(&report.sup_vertex)).unwrap();
    writeln!(text, "sup kappa_F = {}", report.sup_face.as_ref().map_or("n/a".into(), face_curvature_text)).unwrap();

    let mut groups: BTreeMap<Rational, usize> = BTreeMap::new();
    for k in report.vertices.values() {
        *groups.entry(k.clone()).or_default() += 1;
    }
    writeln!(text, "evaluated vertices: {}", report.vertices.len()).unwrap();
    if groups.len() == 1 {
        let (k, _) = groups.iter().next().unwrap();
        writeln!(text, "kappa_V = {k} at all evaluated vertices").unwrap();
    } else {
        for (k, n) in groups.iter().rev() {
            writeln!(text, "kappa_V = {k} at {n} vertices").unwrap();
        }
    }

    let outcome = higuchi_gap(map, &faces);
    let (gap, finding) = match &outcome {
        Ok(HiguchiOutcome::Holds { sup }) => (format!("holds: sup kappa_V = {sup} <= {}", higuchi_bound()), false),
        Ok(HiguchiOutcome::Violated { sup, witnesses }) => {
            (format!("VIOLATED: sup kappa_V = {sup}, {} vertices above {}", witnesses.len(), higuchi_bound()), true)
        }
        Ok(HiguchiOutcome::NotApplicable { vertex, curvature }) => {
            (format!("not applicable: vertex {vertex} has kappa_V = {curvature}"), false)
        }
        Err(e) => (format!("not applicable: {e}"), false),
    };
    writeln!(text, "negative curvature gap: {gap}").unwrap();

    let json = json!({
        "command": "curvature",
        "sup_corner": report.sup_corner.as_ref().map(|k| k.to_string()),
        "sup_vertex": report.sup_vertex.as_ref().map(|k| k.to_string()),
        "sup_face": report.sup_face.as_ref().map(face_curvature_text),
        "vertex_curvature": report.vertices.iter().map(|(v, k)| (v.to_string(), json!(k.to_string()))).collect::<serde_json::Map<_, _>>(),
        "face_curvature": report.faces.iter().map(|(f, k)| (f.to_string(), json!(face_curvature_text(k)))).collect::<serde_json::Map<_, _>>(),
        "gap": gap,
    });
    Ok((text, json, finding))
}

fn classify_map(input: &Input, config: &RunConfig) -> Outcome {
    let faces = trace_faces(&input.map);
    let result = classify(&input.map, &faces, config.root)?;
    let mut text = String::new();
    writeln!(text, "class: {:?}", result.class).unwrap();
    writeln!(text, "certified radius: {}", opt(&result.certified_radius)).unwrap();
    writeln!(text, "infinite faces: {}", result.has_infinite_faces).unwrap();
    let irregular = result.extended_edges.iter().filter(|e| !e.regular).count();
    writeln!(text, "extended edges: {} ({irregular} not regular)", result.extended_edges.len()).unwrap();
    writeln!(text, "witnesses: {}", result.witnesses.len()).unwrap();
    for w in result.witnesses.iter().take(LISTED) {
        writeln!(text, "  {w:?}").unwrap();
    }
    let json = json!({
        "command": "classify",
        "class": format!("{:?}", result.class),
        "certified_radius": result.certified_radius,
        "has_infinite_faces": result.has_infinite_faces,
        "extended_edges": result.extended_edges.len(),
        "witnesses": result.witnesses.iter().map(|w| format!("{w:?}")).collect::<Vec<_>>(),
    });
    Ok((text, json, false))
}

fn gauss_bonnet_sum(input: &Input, config: &RunConfig) -> Outcome {
    let map = &input.map;
    let w: Vec<VertexId> =
        if config.all { map.vertices().collect() } else { ball_vertices(map, config.root, input.horizon) };
    let total = gauss_bonnet(map, &w)?;
    let two = Rational::from_integer(2.into());
    let finding = total != two;
    let mut text = format!("W: {} vertices\n", w.len());
    if finding {
        writeln!(text, "sum = {total} (expected 2)").unwrap();
    } else {
        text.push_str("sum = 2 exact\n");
    }
    let json = json!({ "command": "gauss-bonnet", "subset_size": w.len(), "sum": total.to_string() });
    Ok((text, json, finding))
}

fn embedding(input: &Input, config: &RunConfig) -> Outcome {
    let map = &input.map;
    let w = ball_vertices(map, config.root, config.k);
    let result = embed(map, &w, &config.eps, input.horizon)?;
    let report = verify_properties(&result, map, &w)?;
    let mut text = String::new();
    writeln!(text, "W = B_{}({}): {} vertices, eps = {}", config.k, config.root, w.len(), config.eps).unwrap();
    writeln!(text, "closing parameter: {}", result.closing_parameter).unwrap();
    writeln!(text, "materialized radius: {} (horizon {})", result.materialized_radius, result.horizon).unwrap();
    writeln!(text, "supergraph vertices: {}", result.supergraph.num_vertices()).unwrap();
    let trees: usize = result.added_trees.iter().map(|(_, n)| n).sum();
    writeln!(text, "trees added: {trees}").unwrap();
    writeln!(text, "faces closed: {}", result.closed_faces.len()).unwrap();
    for c in &report.checks {
        let status = match (c.applicable, c.passed) {
            (false, _) => "n/a",
            (true, true) => "ok",
            (true, false) => "FAIL",
        };
        writeln!(text, "{}: {status}", c.name).unwrap();
        for f in c.failures.iter().take(LISTED) {
            writeln!(text, "  {f}").unwrap();
        }
    }
    writeln!(text, "closed faces large: {}", report.closed_faces_large).unwrap();
    writeln!(text, "complete faces are polygons: {}", report.complete_faces_polygons).unwrap();
    let json = json!({
        "command": "embed",
        "subset_size": w.len(),
        "eps": config.eps.to_string(),
        "closing_parameter": result.closing_parameter,
        "materialized_radius": result.materialized_radius,
        "supergraph_vertices": result.supergraph.num_vertices(),
        "trees_added": trees,
        "faces_closed": result.closed_faces.len(),
        "checks": report.checks.iter().map(|c| json!({
            "name": c.name, "passed": c.passed, "applicable": c.applicable, "failures": c.failures,
        })).collect::<Vec<_>>(),
        "closed_faces_large": report.closed_faces_large,
        "complete_faces_polygons": report.complete_faces_polygons,
    });
    Ok((text, json, !report.all_passed()))
}

fn cutlocus(input: &Input, config: &RunConfig) -> Outcome {
    let locus = cut_locus(&input.map, config.root, input.horizon)?;
    let mut text = format!("horizon: {}\ncut locus: {} vertices\n", input.horizon, locus.len());
    if !locus.is_empty() {
        let shown: Vec<String> = locus.iter().take(LISTED).map(|v| v.to_string()).collect();
        writeln!(text, "  {}", shown.join(" ")).unwrap();
    }
    let json = json!({ "command": "cutlocus", "horizon": input.horizon, "cut_locus": locus });
    Ok((text, json, !locus.is_empty()))
}

fn admissibility(input: &Input, config: &RunConfig) -> Outcome {
    let report = check_admissibility(&input.map, config.root, input.horizon)?;
    let mut text = format!("horizon: {}\n", input.horizon);
    for (i, passed) in report.passed.iter().enumerate() {
        writeln!(text, "property ({}): {}", i + 1, if *passed { "ok" } else { "FAIL" }).unwrap();
    }
    for v in report.violations.iter().take(LISTED) {
        writeln!(text, "  ({}) at level {}: {}", v.property, v.level, v.detail).unwrap();
    }
    let json = json!({
        "command": "admissibility",
        "horizon": input.horizon,
        "passed": report.passed,
        "violations": report.violations.iter().map(|v| json!({
            "property": v.property, "level": v.level, "detail": v.detail,
        })).collect::<Vec<_>>(),
    });
    Ok((text, json, !report.all_passed()))
}

fn bigons(input: &Input, config: &RunConfig) -> Outcome {
    let report = minimal_bigons(&input.map, config.root, input.horizon)?;
    let with_interior: Vec<&Bigon> = report.with_nonempty_interior().collect();
    let mut text = String::new();
    writeln!(text, "horizon: {}", input.horizon).unwrap();
    writeln!(text, "endpoints searched: {}", report.starts).unwrap();
    writeln!(text, "minimal bigons: {}", report.bigons.len()).unwrap();
    let mut lengths: BTreeMap<usize, usize> = BTreeMap::new();
    for b in &report.bigons {
        *lengths.entry(b.length()).or_default() += 1;
    }
    for (l, n) in &lengths {
        writeln!(text, "  length {l}: {n}").unwrap();
    }
    writeln!(text, "with nonempty interior: {}", with_interior.len()).unwrap();
    for b in with_interior.iter().take(LISTED) {
        writeln!(text, "  {:?} / {:?} encloses {:?}", b.first, b.second, b.interior).unwrap();
    }
    let json = json!({
        "command": "bigons",
        "horizon": input.horizon,
        "endpoints": report.starts,
        "bigons": report.bigons.iter().map(|b| json!({
            "first": b.first, "second": b.second, "interior": b.interior,
        })).collect::<Vec<_>>(),
    });
    Ok((text, json, !with_interior.is_empty()))
}

fn growth(input: &Input, config: &RunConfig) -> Outcome {
    let g = growth_check(&input.map, config.root, input.horizon)?;
    let mut text = String::new();
    writeln!(text, "horizon: {}", input.horizon).unwrap();
    writeln!(text, "sup kappa_V = {}, max degree {}, max face degree {}", g.vertex_curvature_sup, g.max_vertex_degree, g.max_face_degree)
        .unwrap();
    writeln!(text, "factor: {}", g.lower_factor).unwrap();
    writeln!(text, "{:>4} {:>10} {:>10}", "n", "|S_n|", "|B_n|").unwrap();
    for (n, (s, b)) in g.sphere_sizes.iter().zip(&g.ball_sizes).enumerate() {
        writeln!(text, "{n:>4} {s:>10} {b:>10}").unwrap();
    }
    writeln!(text, "violations: {:?}", g.violations).unwrap();
    writeln!(
        text,
        "mu estimate {:.6} (ratio {:.6}), bounds [{:.6}, {:.6}]: {}",
        g.mu_estimate,
        g.mu_ratio_estimate,
        g.mu_bounds.0,
        g.mu_bounds.1,
        if g.mu_within_bounds() { "ok" } else { "outside" }
    )
    .unwrap();
    let json = json!({
        "command": "growth",
        "horizon": input.horizon,
        "sphere_sizes": g.sphere_sizes,
        "ball_sizes": g.ball_sizes,
        "factor": g.lower_factor.to_string(),
        "violations": g.violations,
        "mu_estimate": g.mu_estimate,
        "mu_ratio_estimate": g.mu_ratio_estimate,
        "mu_bounds": [g.mu_bounds.0, g.mu_bounds.1],
    });
    Ok((text, json, !g.inequality_holds() || !g.mu_within_bounds()))
}

fn lower_bounds_json(lb: &LowerBounds) -> Value {
    json!({
        "p": lb.p,
        "q": lb.q.to_string(),
        "alpha": lb.alpha.to_string(),
        "beta": lb.beta.to_string(),
        "curvature": lb.curvature.as_ref().map(|c| json!({
            "constant": c.constant.to_string(),
            "sup_curvature": c.sup_curvature.to_string(),
            "alpha": c.alpha.to_string(),
            "beta": c.beta.to_string(),
        })),
    })
}

fn cheeger(input: &Input, config: &RunConfig) -> Outcome {
    let map = &input.map;
    let region: Vec<VertexId> = if config.all {
        map.vertices().filter(|&v| !map.is_frontier(v)).collect()
    } else {
        interior_ball(map, config.root, input.horizon)
    };
    let faces = trace_faces(map);
    let lower = cheeger_lower_bounds(map, &faces, &region)?;
    let est = cheeger_bruteforce(map, &region, config.k, DEFAULT_MAX_SETS)?;
    let ineq = check_isoperimetric_inequality(map, config.root, &region, config.k, DEFAULT_MAX_SETS)?;

    let mut text = String::new();
    writeln!(text, "region: {} vertices, |W| <= {}", region.len(), config.k).unwrap();
    writeln!(text, "p = {}, q = {}", lower.p, lower.q).unwrap();
    writeln!(text, "alpha >= {}", lower.alpha).unwrap();
    writeln!(text, "beta >= {}", lower.beta).unwrap();
    if let Some(c) = &lower.curvature {
        writeln!(text, "C = {}, sup kappa = {}: alpha >= {}, beta >= {}", c.constant, c.sup_curvature, c.alpha, c.beta).unwrap();
    }
    writeln!(text, "connected sets: {}", est.sets).unwrap();
    writeln!(text, "alpha <= {} at {:?}", opt(&est.alpha_upper), est.alpha_witness).unwrap();
    writeln!(text, "beta <= {} at {:?}", opt(&est.beta_upper), est.beta_witness).unwrap();
    writeln!(text, "bounds consistent: {}", est.consistent()).unwrap();
    writeln!(
        text,
        "isoperimetric inequality: {} checked, {} skipped, {} violations",
        ineq.checked,
        ineq.skipped,
        ineq.violations.len()
    )
    .unwrap();
    for v in ineq.violations.iter().take(LISTED) {
        writeln!(text, "  {v:?}").unwrap();
    }
    let json = json!({
        "command": "cheeger",
        "region_size": region.len(),
        "max_size": config.k,
        "lower": lower_bounds_json(&lower),
        "sets": est.sets,
        "alpha_upper": est.alpha_upper.as_ref().map(|x| x.to_string()),
        "alpha_witness": est.alpha_witness,
        "beta_upper": est.beta_upper.as_ref().map(|x| x.to_string()),
        "beta_witness": est.beta_witness,
        "consistent": est.consistent(),
        "inequality_checked": ineq.checked,
        "inequality_skipped": ineq.skipped,
        "inequality_violations": ineq.violations,
    });
    Ok((text, json, !est.consistent() || !ineq.violations.is_empty()))
}

fn spectrum(input: &Input, config: &RunConfig) -> Outcome {
    let radii: Vec<usize> = (1..=input.horizon).collect();
    let report = verify_spectral_bounds(&input.map, config.root, &radii, config.tol)?;
    let mut text = String::new();
    writeln!(text, "alpha >= {}, p = {}", report.alpha_lower, report.p).unwrap();
    writeln!(text, "bound (normalized): {} = {:.12}", report.bound_normalized, report.bound_normalized.to_f64()).unwrap();
    writeln!(text, "bound (combinatorial): {} = {:.12}", report.bound_combinatorial, report.bound_combinatorial.to_f64()).unwrap();
    writeln!(text, "{:>6} {:>8} {:>16} {:>16}", "r", "domain", "bottom", "bottom normalized").unwrap();
    for row in &report.rows {
        writeln!(
            text,
            "{:>6} {:>8} {:>16.10} {:>16.10}",
            row.radius, row.domain_size, row.bottom_combinatorial, row.bottom_normalized
        )
        .unwrap();
    }
    writeln!(text, "bounds hold: {}", report.bounds_hold()).unwrap();
    writeln!(text, "nonincreasing: {}", report.nonincreasing()).unwrap();
    let json = json!({
        "command": "spectrum",
        "alpha_lower": report.alpha_lower.to_string(),
        "p": report.p,
        "bound_normalized": report.bound_normalized.to_string(),
        "bound_combinatorial": report.bound_combinatorial.to_string(),
        "rows": report.rows.iter().map(|r| json!({
            "radius": r.radius,
            "domain_size": r.domain_size,
            "bottom": r.bottom_combinatorial,
            "bottom_normalized": r.bottom_normalized,
        })).collect::<Vec<_>>(),
        "bounds_hold": report.bounds_hold(),
        "nonincreasing": report.nonincreasing(),
    });
    Ok((text, json, !report.bounds_hold() || !report.nonincreasing()))
}

fn polar(input: &Input, config: &RunConfig) -> Outcome {
    let map = &input.map;
    let a = NearestNeighborOperator::laplacian(map);
    let decomposition = polar_decompose(map, &a, config.root, input.horizon)?;
    let agreed = check_reconstruction(map, &a, &decomposition, RECONSTRUCTION_TRIALS, config.seed);
    let checks = check_e_structure(&decomposition);
    let mut text = String::new();
    writeln!(text, "horizon: {}", input.horizon).unwrap();
    writeln!(text, "sphere sizes: {:?}", decomposition.spheres.iter().map(Vec::len).collect::<Vec<_>>()).unwrap();
    writeln!(text, "reconstruction: {agreed}/{RECONSTRUCTION_TRIALS} random vectors agree").unwrap();
    writeln!(text, "{:>4} {:>8} {:>6} {:>6} {:>10} {:>10}", "n", "E_n", "rank", "method", "injective", "structure").unwrap();
    for c in &checks {
        writeln!(
            text,
            "{:>4} {:>8} {:>6} {:>6} {:>10} {:>10}",
            c.n,
            format!("{}x{}", c.rows, c.cols),
            c.rank,
            format!("{:?}", c.method).to_lowercase(),
            c.injective(),
            c.structure_holds()
        )
        .unwrap();
    }
    let injective = checks.iter().all(|c| c.injective());
    let json = json!({
        "command": "polar",
        "horizon": input.horizon,
        "sphere_sizes": decomposition.spheres.iter().map(Vec::len).collect::<Vec<_>>(),
        "reconstruction_agreed": agreed,
        "reconstruction_trials": RECONSTRUCTION_TRIALS,
        "blocks": checks.iter().map(|c| json!({
            "n": c.n,
            "rows": c.rows,
            "cols": c.cols,
            "rank": c.rank,
            "method": format!("{:?}", c.method),
            "columns_nonzero": c.columns_nonzero,
            "rows_one_or_two": c.rows_one_or_two,
            "pairs_succeed": c.pairs_succeed,
            "columns_overlap": c.columns_overlap,
            "injective": c.injective(),
        })).collect::<Vec<_>>(),
    });
    Ok((text, json, agreed != RECONSTRUCTION_TRIALS || !injective))
}

fn eigensearch(input: &Input, config: &RunConfig) -> Outcome {
    let map = &input.map;
    let a = NearestNeighborOperator::laplacian(map);
    let search = finitely_supported_eigenfunctions(map, &a, config.root, input.horizon)?;
    let mut text = String::new();
    writeln!(text, "horizon: {}", input.horizon).unwrap();
    writeln!(text, "support region: {} vertices", search.support_region).unwrap();
    writeln!(text, "unobservable dimension: {}", search.unobservable_dimension).unwrap();
    writeln!(text, "candidates tested: {}, unresolved: {}", search.candidates_tested, search.unresolved).unwrap();
    writeln!(text, "eigenfunctions found: {}", search.found.len()).unwrap();
    for f in &search.found {
        writeln!(text, "  lambda = {}, support size {}, multiplicity {}", f.lambda, f.values.len(), f.multiplicity).unwrap();
        let values: Vec<String> = f.values.iter().map(|(v, x)| format!("{v}:{x}")).collect();
        writeln!(text, "    {}", values.join(" ")).unwrap();
    }
    let json = json!({
        "command": "eigensearch",
        "horizon": input.horizon,
        "support_region": search.support_region,
        "unobservable_dimension": search.unobservable_dimension,
        "candidates_tested": search.candidates_tested,
        "unresolved": search.unresolved,
        "found": search.found.iter().map(|f| json!({
            "lambda": f.lambda.to_string(),
            "support_size": f.values.len(),
            "multiplicity": f.multiplicity,
            "values": f.values.iter().map(|(v, x)| json!([v, x.to_string()])).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
    });
    Ok((text, json, !search.found.is_empty()))
}
