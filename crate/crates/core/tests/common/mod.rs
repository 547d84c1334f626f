#![allow(dead_code)]

pub mod gen;

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

/// Runs the binary inside the fixture directory so report paths stay relative.
pub fn cech(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cech"))
        .args(args)
        .current_dir(fixtures())
        .output()
        .expect("binary runs")
}

pub struct GoldenCase {
    pub name: &'static str,
    pub args: &'static [&'static str],
    pub exit: i32,
}

pub const GOLDEN_CASES: &[GoldenCase] = &[
    GoldenCase { name: "analyze_disjoint", args: &["analyze", "disjoint_pair.json"], exit: 0 },
    GoldenCase { name: "analyze_partial", args: &["analyze", "partial_cover.json"], exit: 0 },
    GoldenCase { name: "analyze_brick", args: &["analyze", "brick_3x3.json"], exit: 0 },
    GoldenCase { name: "analyze_malformed", args: &["analyze", "malformed.json"], exit: 1 },
    GoldenCase { name: "nerve_line", args: &["nerve", "line_balls.json"], exit: 0 },
    GoldenCase { name: "nerve_circle", args: &["nerve", "circle_arcs.json", "--max-dim", "1"], exit: 0 },
    GoldenCase { name: "check_triangle", args: &["check", "triangle_z2.json", "--cover", "triangle.json"], exit: 0 },
    GoldenCase {
        name: "check_quaternion_gba",
        args: &["check", "quaternion_ijk.json", "--cover", "triangle.json", "--convention", "gba"],
        exit: 2,
    },
    GoldenCase { name: "solve_coboundary", args: &["solve", "coboundary_z.json", "--cover", "circle_arcs.json"], exit: 0 },
    GoldenCase { name: "solve_cycle_ones", args: &["solve", "cycle_ones_z.json", "--cover", "circle_arcs.json"], exit: 2 },
    GoldenCase { name: "solve_mobius", args: &["solve", "mobius_sign.json", "--cover", "circle_arcs.json"], exit: 2 },
    GoldenCase {
        name: "solve_group_mismatch",
        args: &["solve", "coboundary_z.json", "--cover", "circle_arcs.json", "--group", "zmod", "--n", "3"],
        exit: 1,
    },
    GoldenCase {
        name: "lift_triangle_z2",
        args: &["lift", "triangle_z2.json", "--cover", "triangle.json", "--via", "z-to-zmod:2"],
        exit: 0,
    },
    GoldenCase {
        name: "lift_thirds",
        args: &["lift", "thirds_t.json", "--cover", "circle_arcs.json", "--via", "r-to-t"],
        exit: 0,
    },
    GoldenCase {
        name: "lift_rp2_obstructed",
        args: &["lift", "rp2_generator_z2.json", "--cover", "rp2.json", "--via", "z-to-zmod:2"],
        exit: 2,
    },
    GoldenCase { name: "h1_circle_z", args: &["h1", "circle_arcs.json", "--coeff", "z"], exit: 0 },
    GoldenCase { name: "h1_circle_r", args: &["h1", "circle_arcs.json", "--coeff", "r"], exit: 0 },
    GoldenCase { name: "h1_circle_z3", args: &["h1", "circle_arcs.json", "--coeff", "zmod", "--n", "3"], exit: 0 },
    GoldenCase { name: "h1_triangle", args: &["h1", "triangle.json"], exit: 0 },
    GoldenCase { name: "h1_rp2_z2", args: &["h1", "rp2.json", "--coeff", "zmod:2"], exit: 0 },
    GoldenCase { name: "section_product", args: &["section", "product_bundle.json"], exit: 0 },
    GoldenCase { name: "section_mobius", args: &["section", "mobius_bundle.json"], exit: 2 },
    GoldenCase { name: "section_circle", args: &["section", "circle_bundle.json"], exit: 0 },
    GoldenCase { name: "holonomy_mobius", args: &["holonomy", "mobius_bundle.json"], exit: 0 },
    GoldenCase { name: "refine_intervals", args: &["refine-intervals", "intervals.json"], exit: 0 },
    GoldenCase { name: "refine_balls_unsupported", args: &["refine-intervals", "line_balls.json"], exit: 1 },
    GoldenCase { name: "pou_solve", args: &["pou-solve", "line_balls.json", "line_function_cochain.json"], exit: 0 },
    GoldenCase { name: "generate_brick", args: &["generate", "brick", "--rows", "2", "--cols", "2"], exit: 0 },
    GoldenCase { name: "generate_aligned", args: &["generate", "brick", "--aligned", "--resolution", "8"], exit: 0 },
    GoldenCase { name: "generate_intervals", args: &["generate", "intervals", "--count", "4", "--step", "0.1"], exit: 0 },
    GoldenCase { name: "generate_circle_arcs", args: &["generate", "circle-arcs", "--arcs", "4", "--samples", "24"], exit: 0 },
    GoldenCase {
        name: "generate_circle_arcs_sparse",
        args: &["generate", "circle-arcs", "--arcs", "4", "--samples", "12"],
        exit: 1,
    },
    GoldenCase { name: "unknown_command", args: &["frobnicate"], exit: 1 },
];

pub fn golden_path(name: &str) -> PathBuf {
    fixtures().join("golden").join(format!("{name}.json"))
}

/// Stdout of the case with `--no-timings`, its exit code and stderr.
pub fn run_case(case: &GoldenCase) -> (String, i32, String) {
    let mut args: Vec<&str> = case.args.to_vec();
    args.push("--no-timings");
    let out = cech(&args);
    (
        String::from_utf8(out.stdout).expect("utf-8 stdout"),
        out.status.code().expect("exit code"),
        String::from_utf8(out.stderr).expect("utf-8 stderr"),
    )
}

/// Compares against the stored golden output; `UPDATE_GOLDEN=1` rewrites it.
pub fn check_golden(case: &GoldenCase) -> Result<(), String> {
    let (stdout, code, _) = run_case(case);
    if code != case.exit {
        return Err(format!("{}: exit {code}, expected {}", case.name, case.exit));
    }
    let (again, code2, _) = run_case(case);
    if again != stdout || code2 != code {
        return Err(format!("{}: output differs between identical runs", case.name));
    }
    let path = golden_path(case.name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &stdout).map_err(|e| e.to_string())?;
        return Ok(());
    }
    let expected = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    if expected != stdout {
        return Err(format!("{}: output differs from {}", case.name, path.display()));
    }
    Ok(())
}
