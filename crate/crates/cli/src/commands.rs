//! One function per subcommand, each returning a [`Report`] in all formats.

use grauert::adapted::{adapted_block, jacobi_spectrum, singular_parameters};
use grauert::catalog::{restricted_datum, Catalog, SpaceDescriptor, Verdict};
use grauert::domain::{boundary_parameter, max_tube_radius, omega_from_gamma, omega_polytope, strongly_orthogonal_roots};
use grauert::exact::{add, vec_to_f64, PiMultiple, Rational};
use grauert::hermitian::{
    audit as table_audit, classify as classify_space, embedding_data, embedding_pairs, hermitian_entries,
    rank_condition, theorem7_check,
};
use grauert::psh::{psh_check as run_psh, PshReport};
use grauert::Error;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::render::{csv_cell, fmt_f64, object_csv, round_json, symbolic_envelope, table_text};
use crate::{CliError, Common, Format};

/// Default absolute tolerance on `J^2 + I`.
pub const ADAPTED_TOL: f64 = 1e-10;

/// Samples per independently seeded `psh-check` chunk.
const PSH_CHUNK: usize = 10;

pub struct Report {
    pub json: Value,
    pub csv: String,
    pub text: String,
    /// Set when a verification step failed; the report is still written.
    pub failure: Option<String>,
}

impl Report {
    fn new(json: Value, csv: String, text: String) -> Self {
        Report {
            json,
            csv,
            text,
            failure: None,
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut v = self.json.clone();
                round_json(&mut v);
                let mut s = serde_json::to_string_pretty(&v).expect("values are serializable");
                s.push('\n');
                s
            }
            Format::Csv => self.csv.clone(),
            Format::Text => self.text.clone(),
        }
    }
}

fn space_of(catalog: &Catalog, c: &Common, cmd: &str) -> Result<SpaceDescriptor, CliError> {
    let label = c
        .space
        .as_deref()
        .ok_or_else(|| CliError::Usage(format!("`{cmd}` needs --space LABEL")))?;
    Ok(catalog.lookup(label)?)
}

fn strings(v: &[Rational]) -> Vec<String> {
    v.iter().map(|x| x.to_string()).collect()
}

fn pis(v: &[Rational]) -> Vec<String> {
    v.iter().map(|x| PiMultiple(*x).to_string()).collect()
}

pub fn info(catalog: &Catalog, c: &Common) -> Result<Report, CliError> {
    let space = space_of(catalog, c, "info")?;
    let d = restricted_datum(&space);
    let rs = &d.root_system;
    let mut v = space.to_json_value();
    v["root_family"] = json!(rs.family.to_string());
    v["ambient_dim"] = json!(rs.ambient_dim);
    v["roots"] = json!(rs.roots.len());
    v["positive_roots"] = json!(rs
        .positive_roots()
        .iter()
        .map(|r| json!({"root": strings(r.vector.coords()), "mult": r.mult}))
        .collect::<Vec<_>>());
    v["metric_scale"] = json!(d.metric_scale.to_string());
    v["r_max"] = json!(max_tube_radius(&d).to_string());
    let mut text = format!(
        "{} = {}\nrank {}, dim {}, hermitian {}\nroot system {} ({} roots), metric scale {}\nr_max = {}\n",
        space.canonical_label(),
        space.display_name,
        space.rank,
        space.dim,
        space.hermitian,
        rs.family,
        rs.roots.len(),
        d.metric_scale,
        max_tube_radius(&d),
    );
    for r in rs.positive_roots() {
        text.push_str(&format!("  ({}) x{}\n", strings(r.vector.coords()).join(", "), r.mult));
    }
    Ok(Report::new(v.clone(), object_csv(&v), text))
}

pub fn omega(catalog: &Catalog, c: &Common) -> Result<Report, CliError> {
    let space = space_of(catalog, c, "omega")?;
    let om = omega_polytope(&restricted_datum(&space));
    let mut v = om.to_json_value();
    v["space"] = json!(space.canonical_label());
    let mut text = format!("{}: {} facet pairs |alpha(H)| <= pi/2\n", space, om.halfspaces.len());
    let mut csv = String::from("vertex");
    for i in 1..=om.ambient_dim {
        csv.push_str(&format!(",x{i}"));
    }
    csv.push('\n');
    match &om.vertices {
        Some(vs) => {
            text.push_str(&format!("{} vertices\n", vs.len()));
            for (i, x) in vs.iter().enumerate() {
                text.push_str(&format!("  ({})\n", pis(x).join(", ")));
                csv.push_str(&format!("{i},{}\n", pis(x).join(",")));
            }
        }
        None => text.push_str(&format!("vertices not enumerated above rank {}\n", grauert::domain::MAX_VERTEX_RANK)),
    }
    Ok(Report::new(v, csv, text))
}

pub fn radius(catalog: &Catalog, c: &Common) -> Result<Report, CliError> {
    let space = space_of(catalog, c, "radius")?;
    let r = max_tube_radius(&restricted_datum(&space)).to_string();
    let v = json!({ "r_max": r });
    Ok(Report::new(v.clone(), object_csv(&v), format!("r_max = {r}\n")))
}

pub fn classify(catalog: &Catalog, c: &Common) -> Result<Report, CliError> {
    let space = space_of(catalog, c, "classify")?;
    let cl = classify_space(catalog, &space)?;
    let envelope = cl.envelope_space.as_ref().map(|e| e.canonical_label());
    let mut text = format!("{}: {}", cl.space, cl.verdict.as_str());
    if let Some(e) = &envelope {
        text.push_str(&format!(" {e}"));
    }
    text.push('\n');
    for e in &cl.evidence {
        let rc = match e.rank_condition {
            Some(true) => "rank condition holds",
            Some(false) => "rank condition fails",
            None => "no envelope",
        };
        text.push_str(&format!("  [{}] {}: {rc}\n", e.source, e.pair));
    }
    let csv = format!(
        "space,verdict,envelope\n{},{},{}\n",
        csv_cell(&cl.space.canonical_label()),
        cl.verdict.as_str(),
        envelope.as_deref().map(csv_cell).unwrap_or_default()
    );
    Ok(Report::new(cl.to_json_value(), csv, text))
}

struct RowOutcome {
    row: u32,
    heading: String,
    cell: String,
    instances: usize,
    mismatches: Vec<Value>,
}

pub fn table(catalog: &'static Catalog, max_pq: u32, max_n: u32) -> Result<Report, CliError> {
    let rows = catalog.paper_table();
    let outcomes: Vec<RowOutcome> = rows
        .par_iter()
        .map(|row| -> Result<RowOutcome, Error> {
            let instances = row.instances(catalog, max_pq, max_n);
            let mut mismatches = Vec::new();
            let mut kind = None;
            for (space, b) in &instances {
                let cl = classify_space(catalog, space)?;
                let expected = match &row.verdict {
                    Verdict::Envelope(t) => Some(t.instantiate_label(b)?),
                    _ => None,
                };
                let got = cl.envelope_space.as_ref().map(|e| e.canonical_label());
                if cl.verdict.as_str() != row.verdict.kind() || got != expected {
                    mismatches.push(json!({
                        "space": space.canonical_label(),
                        "expected": row.verdict.kind(),
                        "expected_envelope": expected,
                        "got": cl.verdict.as_str(),
                        "got_envelope": got,
                    }));
                }
                kind.get_or_insert(cl.verdict);
            }
            let cell = match (kind, &row.verdict) {
                (None, _) => "unverified".to_string(),
                _ if !mismatches.is_empty() => format!("MISMATCH ({} instances)", mismatches.len()),
                (Some(_), Verdict::Envelope(t)) => symbolic_envelope(catalog, t),
                (Some(k), _) => k.as_str().to_string(),
            };
            Ok(RowOutcome {
                row: row.row,
                heading: row.space.clone(),
                cell,
                instances: instances.len(),
                mismatches,
            })
        })
        .collect::<Result<_, _>>()?;

    let text = table_text(&outcomes.iter().map(|o| (o.row, o.heading.clone(), o.cell.clone())).collect::<Vec<_>>());
    let mut csv = String::from("row,space,verdict,instances,mismatches\n");
    for o in &outcomes {
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            o.row,
            csv_cell(&o.heading),
            csv_cell(&o.cell),
            o.instances,
            o.mismatches.len()
        ));
    }
    let v = json!({
        "grid": { "max_pq": max_pq, "max_n": max_n },
        "rows": outcomes.iter().zip(rows).map(|(o, r)| json!({
            "row": o.row,
            "space": o.heading,
            "verdict": r.verdict.kind(),
            "cell": o.cell,
            "instances": o.instances,
            "mismatches": o.mismatches,
        })).collect::<Vec<_>>(),
    });
    let mut report = Report::new(v, csv, text);
    let bad: Vec<String> = outcomes
        .iter()
        .filter(|o| o.instances == 0 || !o.mismatches.is_empty())
        .map(|o| o.row.to_string())
        .collect();
    if !bad.is_empty() {
        report.failure = Some(format!("table rows {} not reproduced", bad.join(", ")));
    }
    Ok(report)
}

fn parse_direction(s: &str, dim: usize) -> Result<Vec<Rational>, CliError> {
    let h: Vec<Rational> = s
        .split(',')
        .map(|x| x.trim().parse::<Rational>().map_err(|_| CliError::Usage(format!("bad rational `{x}` in --h"))))
        .collect::<Result<_, _>>()?;
    if h.len() != dim {
        return Err(CliError::Usage(format!("--h needs {dim} coordinates, got {}", h.len())));
    }
    Ok(h)
}

pub fn adapted(catalog: &Catalog, c: &Common, h: Option<&str>, grid: usize, t_max: Option<f64>) -> Result<Report, CliError> {
    let space = space_of(catalog, c, "adapted")?;
    let d = restricted_datum(&space);
    let rs = &d.root_system;
    let h = match h {
        Some(s) => parse_direction(s, rs.ambient_dim)?,
        None => rs
            .positive_roots()
            .iter()
            .fold(vec![Rational::default(); rs.ambient_dim], |acc, r| add(&acc, r.vector.coords())),
    };
    if grid < 2 {
        return Err(CliError::Usage("--grid must be at least 2".into()));
    }
    let tol = c.tol.unwrap_or(ADAPTED_TOL);
    let s_star = boundary_parameter(&d, &h)?;
    let poles = singular_parameters(&d, &h, 3.0 * s_star.to_f64())?;
    let hf = vec_to_f64(&h);
    let spectrum = jacobi_spectrum(&d, &hf);
    let lambdas: Vec<f64> = spectrum.eigenvalues.iter().map(|(e, _)| (-e).max(0.0).sqrt()).collect();

    let mut csv = String::from("lambda,t,s,j11,j12,j21,j22,residual\n");
    let (mut max_abs, mut max_rel, mut points, mut singular) = (0.0f64, 0.0f64, 0usize, 0usize);
    let s_top = s_star.to_f64();
    let t_max = t_max.unwrap_or(s_top);
    for &lambda in &lambdas {
        for i in 0..grid {
            let t = -t_max + 2.0 * t_max * i as f64 / (grid - 1) as f64;
            for j in 0..grid {
                let s = s_top * (j + 1) as f64 / (grid + 1) as f64;
                points += 1;
                let Ok(block) = adapted_block(lambda, Complex64::new(t, s)) else {
                    singular += 1;
                    continue;
                };
                let sq = block.squared();
                let res = [sq[0][0] + 1.0, sq[0][1], sq[1][0], sq[1][1] + 1.0]
                    .iter()
                    .fold(0.0f64, |m, x| m.max(x.abs()));
                let big = block.matrix.iter().flatten().fold(1.0f64, |m, x| m.max(x.abs()));
                max_abs = max_abs.max(res);
                max_rel = max_rel.max(res / (big * big));
                let m = block.matrix;
                csv.push_str(&format!(
                    "{},{},{},{},{},{},{},{}\n",
                    fmt_f64(lambda),
                    fmt_f64(t),
                    fmt_f64(s),
                    fmt_f64(m[0][0]),
                    fmt_f64(m[0][1]),
                    fmt_f64(m[1][0]),
                    fmt_f64(m[1][1]),
                    fmt_f64(res)
                ));
            }
        }
    }
    let v = json!({
        "space": space.canonical_label(),
        "h": strings(&h),
        "boundary_parameter": s_star.to_string(),
        "singular_parameters": poles.iter().map(|p| json!({
            "s": p.s.to_string(),
            "roots": p.roots.iter().map(|r| strings(r)).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
        "jacobi_spectrum": spectrum.eigenvalues.iter().map(|(e, m)| json!({"eigenvalue": e, "mult": m})).collect::<Vec<_>>(),
        "grid": { "t": [-t_max, t_max], "s": ["0", s_star.to_string()], "points_per_lambda": grid * grid },
        "points": points,
        "singular_points": singular,
        "max_abs_residual": max_abs,
        "max_rel_residual": max_rel,
        "tol": tol,
    });
    let text = format!(
        "{space}: H = ({}), s* = {s_star}\nfirst pole {}\n{} blocks, {singular} singular, max |J^2 + I| = {} (relative {})\n",
        strings(&h).join(", "),
        poles.first().map(|p| p.s.to_string()).unwrap_or_else(|| "none".into()),
        points,
        fmt_f64(max_abs),
        fmt_f64(max_rel),
    );
    let mut report = Report::new(v, csv, text);
    if max_abs > tol {
        report.failure = Some(format!("max |J^2 + I| = {} exceeds {}", fmt_f64(max_abs), fmt_f64(tol)));
    }
    Ok(report)
}

fn merge(into: &mut PshReport, part: PshReport) {
    into.samples += part.samples;
    into.non_regular += part.non_regular;
    into.min_hessian_eigenvalue = into.min_hessian_eigenvalue.min(part.min_hessian_eigenvalue);
    into.min_eigenvalue_overall = into.min_eigenvalue_overall.min(part.min_eigenvalue_overall);
    into.max_route_discrepancy = into.max_route_discrepancy.max(part.max_route_discrepancy);
    into.max_cross_residual = into.max_cross_residual.max(part.max_cross_residual);
    into.failures.extend(part.failures);
}

/// Chunk `k` draws from stream `k` of the seeded generator, so the result
/// does not depend on the number of workers.
pub fn psh_check(catalog: &Catalog, c: &Common, non_regular: Option<usize>) -> Result<Report, CliError> {
    let space = space_of(catalog, c, "psh-check")?;
    let d = restricted_datum(&space);
    let samples = c.samples.unwrap_or(100);
    let nr = non_regular.unwrap_or(samples / 10).min(samples);
    let margin = c.tol.unwrap_or(0.0);
    let first_nr = samples - nr;
    let chunks: Vec<(usize, usize)> = (0..samples.div_ceil(PSH_CHUNK))
        .map(|k| (k * PSH_CHUNK, ((k + 1) * PSH_CHUNK).min(samples)))
        .collect();
    let parts: Vec<PshReport> = chunks
        .par_iter()
        .enumerate()
        .map(|(k, &(lo, hi))| {
            let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
            rng.set_stream(k as u64);
            let chunk_nr = hi.saturating_sub(first_nr.max(lo));
            run_psh(&d, hi - lo, chunk_nr, &mut rng)
        })
        .collect::<Result<_, _>>()?;
    let mut parts = parts.into_iter();
    let mut total = match parts.next() {
        Some(p) => p,
        None => return Err(CliError::Usage("--samples must be positive".into())),
    };
    parts.for_each(|p| merge(&mut total, p));

    let mut v = total.to_json_value();
    v["seed"] = json!(c.seed);
    v["margin"] = json!(margin);
    let text = format!(
        "{}: {} samples ({} non-regular), min Hess u eigenvalue {}, min Levi eigenvalue {}, {} failures\n",
        total.space,
        total.samples,
        total.non_regular,
        fmt_f64(total.min_hessian_eigenvalue),
        fmt_f64(total.min_eigenvalue_overall),
        total.failures.len()
    );
    let csv = format!(
        "space,samples,non_regular,min_hessian_eigenvalue,min_eigenvalue_overall,failures\n{},{},{},{},{},{}\n",
        csv_cell(&total.space),
        total.samples,
        total.non_regular,
        fmt_f64(total.min_hessian_eigenvalue),
        fmt_f64(total.min_eigenvalue_overall),
        total.failures.len()
    );
    let mut report = Report::new(v, csv, text);
    if !total.passed() {
        report.failure = Some(format!("{} sample points failed", total.failures.len()));
    } else if total.min_eigenvalue_overall <= margin || total.min_hessian_eigenvalue <= margin {
        report.failure = Some(format!("smallest eigenvalue not above margin {}", fmt_f64(margin)));
    }
    Ok(report)
}

pub fn audit(catalog: &Catalog, max_pq: u32, max_n: u32) -> Result<Report, CliError> {
    let r = table_audit(catalog, max_pq, max_n)?;

    let mut disagreements = Vec::new();
    let (mut pairs_checked, mut pairs_skipped) = (0usize, 0usize);
    for (pair, m, n) in embedding_pairs(catalog, max_pq, max_n) {
        let cert = match embedding_data(&pair, &m, &n).and_then(|e| theorem7_check(&e)) {
            Ok(c) => c,
            Err(Error::Unsupported(_)) => {
                pairs_skipped += 1;
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        pairs_checked += 1;
        let rc = rank_condition(&m, &n)?;
        if cert.holds != rc {
            disagreements.push(json!({"m": m.canonical_label(), "n": n.canonical_label(), "polytope": cert.holds, "rank": rc}));
        }
    }

    let mut cube_failures = Vec::new();
    let entries = hermitian_entries(catalog);
    for s in &entries {
        let d = restricted_datum(s);
        let same = strongly_orthogonal_roots(&d).map(|g| omega_from_gamma(&g).vertices == omega_polytope(&d).vertices);
        if !matches!(same, Ok(true)) {
            cube_failures.push(s.canonical_label());
        }
    }

    let v = json!({
        "grid": { "max_pq": max_pq, "max_n": max_n },
        "spaces_checked": r.spaces_checked,
        "table_mismatches": r.table_mismatches.iter().map(|m| json!({
            "row": m.row, "space": m.space, "expected": m.expected, "got": m.got,
        })).collect::<Vec<_>>(),
        "ambiguous": r.ambiguous.iter().map(|(s, e)| json!({"space": s, "envelopes": e})).collect::<Vec<_>>(),
        "overlapping_rows": r.overlapping_rows.iter().map(|(s, rows)| json!({"space": s, "rows": rows})).collect::<Vec<_>>(),
        "embedding_pairs_checked": pairs_checked,
        "embedding_pairs_skipped": pairs_skipped,
        "criterion_disagreements": disagreements,
        "hermitian_entries_checked": entries.len(),
        "gamma_cube_failures": cube_failures,
    });
    let clean = r.is_clean() && disagreements.is_empty() && cube_failures.is_empty();
    let text = format!(
        "{} spaces: {} table mismatches, {} ambiguous, {} overlapping rows\n\
         {pairs_checked} embedding pairs ({pairs_skipped} skipped): {} criterion disagreements\n\
         {} Hermitian entries: {} gamma-cube failures\n",
        r.spaces_checked,
        r.table_mismatches.len(),
        r.ambiguous.len(),
        r.overlapping_rows.len(),
        disagreements.len(),
        entries.len(),
        cube_failures.len(),
    );
    let csv = format!(
        "spaces_checked,table_mismatches,ambiguous,overlapping_rows,embedding_pairs_checked,criterion_disagreements,gamma_cube_failures\n{},{},{},{},{},{},{}\n",
        r.spaces_checked,
        r.table_mismatches.len(),
        r.ambiguous.len(),
        r.overlapping_rows.len(),
        pairs_checked,
        disagreements.len(),
        cube_failures.len()
    );
    let mut report = Report::new(v, csv, text);
    if !clean {
        report.failure = Some("audit found inconsistencies".into());
    }
    Ok(report)
}
