use std::io::Read;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::report::{RunReport, Stopwatch};
use super::{Cli, Command, GenerateKind, GlobalArgs};
use crate::bundle::{build_bundle, flat_holonomy, section_exists, BuildOutcome, Bundle, BundleFile, SectionVerdict};
use crate::cochain::{
    check_cocycle, h1, solve_coboundary, CoboundarySolution, Cochain1, CochainFile, CocycleVerdict, Coefficients,
    Convention, H1Description,
};
use crate::cover::{
    analyze, brick_cover_with, circle_arcs, cover_order, is_refinement, random_interval_cover, refine_intervals_order1,
    unit_interval_sample, BrickLayout, BrickParams, Cover, CoverFile,
};
use crate::error::{Error, Result};
use crate::groups::GroupSpec;
use crate::lift::{lift_cocycle, HomSpec, LiftStatus};
use crate::nerve::{build_nerve, Cycle, Nerve};
use crate::pou::{partition_of_unity, solve_function_cocycle, FunctionCochainFile};

pub enum Output {
    Report(RunReport),
    /// Printed verbatim (generated fixtures).
    Raw(String),
}

fn read_input(path: &Path) -> Result<String> {
    if path.as_os_str() == "-" {
        let mut text = String::new();
        std::io::stdin().read_to_string(&mut text)?;
        Ok(text)
    } else {
        std::fs::read_to_string(path)
            .map_err(|e| Error::input(format!("cannot read {}: {e}", path.display())))
    }
}

fn path_value(path: &Path) -> Value {
    Value::String(path.display().to_string())
}

fn load_cover(path: &Path) -> Result<Arc<Cover>> {
    Ok(Arc::new(Cover::from_json(&read_input(path)?)?))
}

fn nerve_of(cover: &Cover, g: &GlobalArgs) -> Result<Arc<Nerve>> {
    Ok(Arc::new(build_nerve(cover, g.max_dim)?))
}

/// `--group` (with `--n`) must agree with the file; `--eps` overrides it.
fn resolve_spec(file: GroupSpec, g: &GlobalArgs) -> Result<GroupSpec> {
    let mut spec = file;
    if let Some(name) = &g.group {
        let text = match (name.contains(':'), g.n) {
            (false, Some(n)) => format!("{name}:{n}"),
            _ => name.clone(),
        };
        let wanted = GroupSpec::parse_short(&text)?;
        if wanted.kind() != file.kind() {
            return Err(Error::GroupMismatch { expected: wanted.name(), found: file.name() });
        }
    }
    if let Some(eps) = g.eps {
        spec = GroupSpec::with_eps(spec.kind(), eps)?;
    }
    Ok(spec)
}

fn load_cochain1(path: &Path, nerve: Arc<Nerve>, g: &GlobalArgs) -> Result<Cochain1> {
    let file = CochainFile::from_json(&read_input(path)?)?;
    let spec = resolve_spec(file.spec, g)?;
    CochainFile { spec, ..file }.into_cochain1(nerve)
}

fn load_bundle(path: &Path, g: &GlobalArgs) -> Result<BuildOutcome> {
    let mut file = BundleFile::from_json(&read_input(path)?)?;
    file.spec = resolve_spec(file.spec, g)?;
    if g.convention.is_some() {
        file.convention = convention(g)?;
    }
    let base = match path.parent() {
        Some(p) if path.as_os_str() != "-" => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    build_bundle(file.into_spec(&base)?)
}

fn convention(g: &GlobalArgs) -> Result<Convention> {
    Convention::parse(g.convention.as_deref().unwrap_or("abg"))
}

fn cycle_value(cycle: &Cycle) -> Value {
    json!({ "closing_edge": cycle.closing_edge, "vertices": cycle.vertices })
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializes")
}

pub fn execute(cli: &Cli) -> Result<Output> {
    let g = &cli.global;
    let mut report = RunReport::new(cli.command.name(), g.seed);
    let mut clock = Stopwatch::start();
    match &cli.command {
        Command::Analyze { cover } => {
            report.input("cover", path_value(cover));
            let c = load_cover(cover)?;
            clock.lap("load");
            let a = analyze(&c)?;
            report.ok(
                "ok",
                json!({
                    "order": a.order,
                    "empty_order": a.order < 0,
                    "covers_space": a.covers_space,
                    "adjacency_classes": a.adjacency_classes,
                    "max_multiplicity_witness": a.max_multiplicity_witness,
                    "uncovered": a.uncovered,
                    "sets": c.len(),
                    "points": c.space().len(),
                }),
            );
        }
        Command::Nerve { cover } => {
            report.input("cover", path_value(cover));
            report.input("max_dim", g.max_dim);
            let c = load_cover(cover)?;
            clock.lap("load");
            let nerve = nerve_of(&c, g)?;
            let cycles: Vec<Value> = nerve.fundamental_cycles().iter().map(cycle_value).collect();
            let mut result = to_value(&nerve.to_export());
            result["counts"] = json!({
                "vertices": nerve.vertex_count(),
                "edges": nerve.edges().len(),
                "triangles": nerve.triangles().len(),
                "components": nerve.component_count(),
            });
            result["fundamental_cycles"] = Value::Array(cycles);
            report.ok("ok", result);
        }
        Command::Check { cochain, cover } => {
            report.input("cochain", path_value(cochain));
            report.input("cover", path_value(cover));
            report.input("convention", convention(g)?.name());
            let c = load_cover(cover)?;
            let r = load_cochain1(cochain, nerve_of(&c, g)?, g)?;
            clock.lap("load");
            match check_cocycle(&r, convention(g)?)? {
                CocycleVerdict::Ok => report.ok("cocycle", json!({ "triangles": r.nerve().triangles().len() })),
                CocycleVerdict::Violation { triangle, value } => report.obstructed(
                    "violation",
                    Value::Null,
                    json!({
                        "triangle": triangle,
                        "value": r.spec().element_to_json(&value),
                    }),
                ),
            }
        }
        Command::Solve { cochain, cover } => {
            report.input("cochain", path_value(cochain));
            report.input("cover", path_value(cover));
            report.input("convention", convention(g)?.name());
            let c = load_cover(cover)?;
            let r = load_cochain1(cochain, nerve_of(&c, g)?, g)?;
            clock.lap("load");
            match solve_coboundary(&r, convention(g)?)? {
                CoboundarySolution::Solved(t) => {
                    report.ok("solved", json!({ "solution": to_value(&CochainFile::from_cochain0(&t)) }))
                }
                CoboundarySolution::Obstructed { cycle, holonomy } => report.obstructed(
                    "obstructed",
                    Value::Null,
                    json!({ "cycle": cycle_value(&cycle), "holonomy": r.spec().element_to_json(&holonomy) }),
                ),
            }
        }
        Command::Lift { cochain, cover, via } => {
            report.input("cochain", path_value(cochain));
            report.input("cover", path_value(cover));
            report.input("via", via.as_str());
            let hom = HomSpec::parse(via)?;
            let c = load_cover(cover)?;
            let file = CochainFile::from_json(&read_input(cochain)?)?;
            if file.spec.kind() != hom.target().kind() {
                return Err(Error::GroupMismatch { expected: hom.target().name(), found: file.spec.name() });
            }
            let spec = resolve_spec(file.spec, g)?;
            let rho = CochainFile { spec, ..file }.into_cochain1(nerve_of(&c, g)?)?;
            clock.lap("load");
            let lifted = lift_cocycle(&rho, &hom)?;
            let mut result = lifted.to_json_value();
            result["homomorphism"] = Value::String(hom.name());
            match lifted.status {
                LiftStatus::Obstructed => {
                    let cert = lifted.certificate.as_ref().map(|c| {
                        json!({
                            "functional": c.functional.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                            "modulus": c.modulus.to_string(),
                        })
                    });
                    let obstruction = result["obstruction"].clone();
                    report.obstructed("Obstructed", result, json!({ "obstruction": obstruction, "certificate": cert }))
                }
                LiftStatus::Strict => report.ok("Strict", result),
                LiftStatus::CorrectedStrict => report.ok("CorrectedStrict", result),
            }
        }
        Command::H1 { cover, coeff } => {
            report.input("cover", path_value(cover));
            let coeff = match (coeff.as_str(), g.n) {
                ("zmod", Some(n)) => format!("zmod:{n}"),
                _ => coeff.clone(),
            };
            report.input("coefficients", coeff.as_str());
            let coefficients = Coefficients::parse(&coeff)?;
            let c = load_cover(cover)?;
            let nerve = nerve_of(&c, g)?;
            clock.lap("load");
            let d = h1(&nerve, coefficients)?;
            let mut result = to_value(&d);
            result["summary"] = Value::String(h1_summary(&d));
            result["trivial"] = Value::Bool(d.is_trivial());
            report.ok("ok", result);
        }
        Command::Section { bundle } => {
            report.input("bundle", path_value(bundle));
            let outcome = load_bundle(bundle, g)?;
            clock.lap("load");
            if let Some(b) = valid_or_reject(outcome, &mut report) {
                match section_exists(&b)? {
                    SectionVerdict::Section { fibers, winding } => {
                        let mut result = json!({ "section": to_value(&CochainFile::from_cochain0(&fibers)) });
                        if let Some(w) = winding {
                            result["winding"] = w
                                .iter()
                                .map(|(c, k)| json!({ "cycle": cycle_value(c), "class": k }))
                                .collect();
                        }
                        report.ok("section", result);
                    }
                    SectionVerdict::Obstructed { cycle, holonomy } => report.obstructed(
                        "no-section",
                        Value::Null,
                        json!({ "cycle": cycle_value(&cycle), "holonomy": b.transitions().spec().element_to_json(&holonomy) }),
                    ),
                }
            }
        }
        Command::Holonomy { bundle } => {
            report.input("bundle", path_value(bundle));
            let outcome = load_bundle(bundle, g)?;
            clock.lap("load");
            if let Some(b) = valid_or_reject(outcome, &mut report) {
                let spec = *b.transitions().spec();
                let hol = flat_holonomy(&b)?;
                let trivial = hol.iter().all(|(_, h)| spec.is_identity(h));
                let cycles: Vec<Value> = hol
                    .iter()
                    .map(|(c, h)| json!({ "cycle": cycle_value(c), "holonomy": spec.element_to_json(h) }))
                    .collect();
                report.ok(if trivial { "trivial" } else { "nontrivial" }, json!({ "cycles": cycles }));
            }
        }
        Command::RefineIntervals { cover } => {
            report.input("cover", path_value(cover));
            let c = load_cover(cover)?;
            clock.lap("load");
            let refined = refine_intervals_order1(&c)?;
            let order = cover_order(&refined)?;
            report.ok(
                "ok",
                json!({
                    "order": order.order,
                    "covers_space": refined.covers_space(),
                    "refines_input": is_refinement(&refined, &c)?.holds(),
                    "cover": to_value(&CoverFile::from_cover(&refined)),
                }),
            );
        }
        Command::Generate { kind, out } => {
            let cover = generate(kind, g.seed)?;
            clock.lap("generate");
            let text = cover.to_json();
            let Some(out) = out else {
                return Ok(Output::Raw(text));
            };
            std::fs::write(out, format!("{text}\n"))?;
            report.input("out", path_value(out));
            report.ok("ok", json!({ "sets": cover.len(), "points": cover.space().len() }));
        }
        Command::PouSolve { cover, cochain } => {
            report.input("cover", path_value(cover));
            report.input("cochain", path_value(cochain));
            let c = load_cover(cover)?;
            let nerve = Arc::new(build_nerve(&c, 1)?);
            let r = FunctionCochainFile::from_json(&read_input(cochain)?)?.into_cochain(c.clone(), nerve)?;
            clock.lap("load");
            let eta = partition_of_unity(c)?;
            let t = solve_function_cocycle(&r, &eta)?;
            let potentials: Vec<Value> = t
                .tables
                .iter()
                .enumerate()
                .map(|(a, table)| {
                    json!({
                        "set": a,
                        "table": table.iter().map(|(p, v)| json!({ "point": p, "value": v })).collect::<Vec<_>>(),
                    })
                })
                .collect();
            report.ok(
                "solved",
                json!({
                    "potentials": potentials,
                    "max_residual": t.residual(&r),
                    "normalization_error": eta.normalization_error(),
                }),
            );
        }
    }
    clock.lap("compute");
    if !g.no_timings {
        report.timings_ms = Some(clock.into_map());
    }
    Ok(Output::Report(report))
}

fn valid_or_reject(outcome: BuildOutcome, report: &mut RunReport) -> Option<Bundle> {
    match outcome {
        BuildOutcome::Valid(b) => Some(b),
        BuildOutcome::Rejected { triangle, value, point } => {
            report.obstructed(
                "invalid-bundle",
                Value::Null,
                json!({ "triangle": triangle, "value": value.to_string(), "point": point }),
            );
            None
        }
    }
}

fn h1_summary(d: &H1Description) -> String {
    match d {
        H1Description::Integer { free_rank, torsion } => format!("rank {free_rank}, torsion {torsion:?}"),
        H1Description::Real { dimension } => format!("dimension {dimension}"),
        H1Description::Modular { n, invariants } => format!("Z/{n} coefficients, invariants {invariants:?}"),
    }
}

fn generate(kind: &GenerateKind, seed: u64) -> Result<Cover> {
    match *kind {
        GenerateKind::Brick { rows, cols, inflate, aligned, resolution } => brick_cover_with(&BrickParams {
            rows,
            cols,
            eps: inflate,
            layout: if aligned { BrickLayout::Aligned } else { BrickLayout::Shifted },
            resolution,
        }),
        GenerateKind::Intervals { count, step, max_width } => {
            let space = Arc::new(unit_interval_sample(step, 0.0, 1.0)?);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            random_interval_cover(&mut rng, space, count, max_width)
        }
        GenerateKind::CircleArcs { arcs, samples, overlap } => circle_arcs(arcs, samples, overlap),
    }
}
