use clap::{Parser, Subcommand};
use hs_inscribe::graph::{
    check_c2, find_two_cycle_cover, lp_feasible, synthesize_by_cycles, verify_w1_w2,
    ColoredGraph, COVER_SEARCH_BOUND,
};
use hs_inscribe::io::{weighted_from_parts, GraphFile, PolygonFile, PolyhedronFile};
use hs_inscribe::metric::{red_interior_phase_residual, shape_parameters, verify_vertex_relations};
use hs_inscribe::polyhedron::{
    generate_two_circle, random_phases, regular_phases, verify_admissible, IdealPolyhedron,
};
use hs_inscribe::report::{digest, Report, EXIT_INPUT, EXIT_PASS, EXIT_VIOLATED};
use hs_inscribe::{enumerate, hull};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::path::PathBuf;
use std::process::ExitCode;

/// Checks whether graphs are 1-skeleta of polyhedra weakly inscribed to a
/// sphere, synthesizes witness weights, and verifies the angle and metric
/// data of explicit polyhedra on the two-sheeted hyperboloid.
#[derive(Parser)]
#[command(name = "hs-inscribe", version)]
struct Cli {
    /// Numerical tolerance (also via HS_INSCRIBE_TOL).
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Seed for randomized commands; fixed seeds are bit-reproducible.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output format.
    #[arg(long, global = true, value_parser = ["json", "text"], default_value = "text")]
    format: String,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide whether a colored graph is admissible (cover, alternating
    /// cycles, exact LP cross-check); synthesize weights on success.
    CheckGraph { path: PathBuf },
    /// Full verification of an explicit polyhedron file: hull structure,
    /// edge classification, angle conditions, shape-parameter identities.
    Verify { path: PathBuf },
    /// Emit a two-circle polyhedron file (regular phases, or seeded random
    /// ones with --seed).
    Generate {
        p: usize,
        q: usize,
        t: f64,
        /// Flow vertices down to height ±T2 afterwards.
        #[arg(long, value_name = "T2")]
        deform: Option<f64>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Report on a horocyclic polygon file.
    Horogon {
        path: PathBuf,
        /// Print the cone angle only.
        #[arg(long)]
        cone_angle: bool,
        /// Apply the cosh-ratio deformation with factor K.
        #[arg(long, value_name = "K")]
        deform: Option<f64>,
    },
    /// Run the bundled corpus with its expected outcomes.
    Corpus {
        #[arg(long)]
        run_all: bool,
    },
}

fn tolerance(cli: &Cli) -> f64 {
    cli.tol
        .or_else(|| {
            std::env::var("HS_INSCRIBE_TOL")
                .ok()
                .and_then(|s| s.parse().ok())
        })
        .unwrap_or(1e-9)
}

fn emit(report: &Report, format: &str) -> ExitCode {
    if format == "json" {
        println!("{}", report.to_json());
    } else {
        print!("{}", report.to_text());
    }
    ExitCode::from(report.exit_status as u8)
}

fn input_error(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_INPUT as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let tol = tolerance(&cli);
    match &cli.command {
        Cmd::CheckGraph { path } => cmd_check_graph(path, tol, &cli),
        Cmd::Verify { path } => cmd_verify(path, tol, &cli),
        Cmd::Generate {
            p,
            q,
            t,
            deform,
            output,
        } => cmd_generate(*p, *q, *t, *deform, output.as_deref(), &cli),
        Cmd::Horogon {
            path,
            cone_angle,
            deform,
        } => cmd_horogon(path, *cone_angle, *deform, tol, &cli),
        Cmd::Corpus { run_all } => cmd_corpus(*run_all, tol, &cli),
    }
}

/// The shared admissibility pipeline; also used by the corpus runner.
fn check_graph_report(text: &str, _tol: f64) -> Result<Report, String> {
    let file = GraphFile::parse(text).map_err(|e| e.to_string())?;
    let (mut graph, weights) = file.to_colored().map_err(|e| e.to_string())?;
    let mut report = Report::new("check-graph", digest(text.as_bytes()));

    // Polyhedral preconditions.
    let n = graph.n;
    let edges: BTreeSet<(usize, usize)> = graph.edges().collect();
    let adj: Vec<Vec<usize>> = {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        adj
    };
    let three_conn = hull::connectivity_at_least(&adj, 3);
    report.condition("three_connected", three_conn, None, None);
    let edge_list: Vec<(usize, usize)> = edges.iter().copied().collect();
    let planar = n <= COVER_SEARCH_BOUND && enumerate::is_planar(n, &edge_list);
    report.condition("planar", planar, None, None);
    if !three_conn || !planar {
        report.note("input is not a polyhedral (3-connected planar) graph");
        return Ok(report);
    }

    // Condition C1: a two-cycle cover, provided or searched.
    if graph.cover.is_none() {
        let colors = if graph.colors.is_empty() {
            None
        } else {
            Some(&graph.colors)
        };
        match find_two_cycle_cover(n, &edges, colors, COVER_SEARCH_BOUND) {
            Ok(Some(cover)) => {
                let derived =
                    ColoredGraph::from_cover(n, &edges, cover).map_err(|e| e.to_string())?;
                graph = derived;
            }
            Ok(None) => {
                report.condition("c1_two_cycle_cover", false, None, None);
                return Ok(report);
            }
            Err(e) => return Err(e.to_string()),
        }
    }
    let cover = graph.cover.clone().expect("cover present");
    report.condition(
        "c1_two_cycle_cover",
        true,
        None,
        Some(format!(
            "cycles of length {} and {}",
            cover.cycles[0].len(),
            cover.cycles[1].len()
        )),
    );

    // Condition C2 via the directed lift, and the exact LP as cross-check.
    let c2 = check_c2(&graph).map_err(|e| e.to_string())?;
    report.condition(
        "c2_alternating_cycles",
        c2.ok,
        None,
        Some(if c2.ok {
            format!("{} witness cycles", c2.witnesses.len())
        } else {
            format!("failing edges: {:?}", c2.failing_edges)
        }),
    );
    let lp = lp_feasible(&graph).map_err(|e| e.to_string())?;
    report.condition(
        "w_system_feasible",
        lp.feasible,
        None,
        Some(format!("margin {}", lp.margin)),
    );
    report.condition("checker_equals_lp", c2.ok == lp.feasible, None, None);

    if c2.ok {
        if c2.apex_case {
            report.note("apex dominates: blue-blue-red witness triangles through the 1-cycle");
        }
        for w in c2.witnesses.iter().take(4) {
            report.note(format!("witness cycle {:?}", w.vertices));
        }
        match synthesize_by_cycles(&graph) {
            Ok(wg) => {
                let ok = verify_w1_w2(&wg).is_ok();
                report.condition("synthesized_weights_w1_w2", ok, None, None);
                for (e, w) in &wg.weights {
                    report.note(format!("w{e:?} = {w} pi"));
                }
            }
            Err(e) => {
                report.condition("synthesized_weights_w1_w2", false, None, Some(e.to_string()))
            }
        }
    }

    if let Some(ws) = weights {
        let wg = weighted_from_parts(graph.clone(), ws).map_err(|e| e.to_string())?;
        match verify_w1_w2(&wg) {
            Ok(()) => report.condition("provided_weights_w1_w2", true, None, None),
            Err(e) => report.condition("provided_weights_w1_w2", false, None, Some(e)),
        }
    }
    Ok(report)
}

fn cmd_check_graph(path: &PathBuf, tol: f64, cli: &Cli) -> ExitCode {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return input_error(&format!("{}: {e}", path.display())),
    };
    match check_graph_report(&text, tol) {
        Ok(report) => emit(&report, &cli.format),
        Err(msg) => input_error(&msg),
    }
}

/// Full polyhedron verification; shared with the corpus runner.
fn verify_polyhedron_report(
    poly: &IdealPolyhedron,
    dig: String,
    tol: f64,
) -> Result<Report, String> {
    let mut report = Report::new("verify", dig);
    report.note(format!("p = {}, q = {}, n = {}", poly.p, poly.q, poly.n()));

    report.condition(
        "hull_euler",
        poly.hull.euler_characteristic() == 2,
        None,
        Some(format!("V - E + F = {}", poly.hull.euler_characteristic())),
    );
    report.condition(
        "skeleton_three_connected",
        poly.hull.is_three_connected(),
        None,
        None,
    );
    let colors_ok = poly.classify_edges().is_ok();
    report.condition("edge_classification_consistent", colors_ok, None, None);

    let angles = poly.dihedral_angles().map_err(|e| e.to_string())?;
    let apexes: BTreeSet<usize> = (0..poly.n()).filter(|&v| poly.is_apex(v)).collect();
    let adm = verify_admissible(&angles, &apexes, tol);
    report.condition("a1_angle_ranges", adm.a1_ok, None, None);
    report.condition("a2_vertex_sums", adm.a2_ok, Some(adm.a2_max_residual), None);
    report.condition(
        "a3_blue_sum",
        adm.a3_ok,
        None,
        Some(format!(
            "sum {}, equality expected: {}, observed: {}",
            adm.a3_blue_sum, adm.a3_equality_expected, adm.a3_equality_observed
        )),
    );

    // The combinatorial side of the forward map: cover from the interior
    // complex, alternating-cycle check, LP cross-check.
    let ic = poly.interior_complex().map_err(|e| e.to_string())?;
    let (plus_cycle, minus_cycle) = ic.cycle_cover();
    let edges: BTreeSet<(usize, usize)> = poly.hull.edges.iter().map(|e| (e.u, e.v)).collect();
    let colored = ColoredGraph::from_cover(
        poly.n(),
        &edges,
        hs_inscribe::graph::CycleCover {
            cycles: [plus_cycle, minus_cycle],
        },
    )
    .map_err(|e| e.to_string())?;
    let c2 = check_c2(&colored).map_err(|e| e.to_string())?;
    report.condition("c2_alternating_cycles", c2.ok, None, None);
    let lp = lp_feasible(&colored).map_err(|e| e.to_string())?;
    report.condition("w_system_feasible", lp.feasible, None, None);

    // Vertex figures: turning angles match the dihedral angles.
    let mut worst_turn: f64 = 0.0;
    let mut worst_sum: f64 = 0.0;
    for v in 0..poly.n() {
        let fig = poly.vertex_figure(v).map_err(|e| e.to_string())?;
        let target = if poly.is_apex(v) { -2.0 * PI } else { 0.0 };
        worst_sum = worst_sum.max((fig.turning_sum - target).abs());
        for e in &fig.entries {
            let want = angles.weights[&e.edge];
            worst_turn = worst_turn.max((e.turning - want).abs());
        }
    }
    report.condition(
        "vertex_figure_turnings",
        worst_turn <= 1e-7,
        Some(worst_turn),
        None,
    );
    report.condition(
        "vertex_figure_closure",
        worst_sum <= tol.max(1e-9),
        Some(worst_sum),
        None,
    );

    // Shape parameters and their identities.
    let sp = shape_parameters(poly).map_err(|e| e.to_string())?;
    let rel = verify_vertex_relations(&sp);
    report.condition(
        "shape_eq1_product",
        rel.max_product_residual <= 1e-8,
        Some(rel.max_product_residual),
        None,
    );
    report.condition(
        "shape_eq2_closure",
        rel.max_closure_residual <= 1e-8,
        Some(rel.max_closure_residual),
        None,
    );
    report.condition(
        "shearing_vertex_sums",
        rel.max_shearing_sum <= 1e-8,
        Some(rel.max_shearing_sum),
        None,
    );
    let phase = red_interior_phase_residual(poly, &sp).map_err(|e| e.to_string())?;
    report.condition("red_interior_phase", phase <= 1e-7, Some(phase), None);
    Ok(report)
}

fn cmd_verify(path: &PathBuf, tol: f64, cli: &Cli) -> ExitCode {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return input_error(&format!("{}: {e}", path.display())),
    };
    let file = match PolyhedronFile::parse(&text) {
        Ok(f) => f,
        Err(e) => return input_error(&e.to_string()),
    };
    // Degenerations and off-quadric points are input errors, reported with
    // their taxonomy.
    let poly = match file.build(tol) {
        Ok(p) => p,
        Err(e) => return input_error(&e.to_string()),
    };
    match verify_polyhedron_report(&poly, digest(text.as_bytes()), tol) {
        Ok(report) => emit(&report, &cli.format),
        Err(msg) => input_error(&msg),
    }
}

fn generate_polyhedron(
    p: usize,
    q: usize,
    t: f64,
    seed: Option<u64>,
    deform: Option<f64>,
) -> Result<IdealPolyhedron, String> {
    let (pp, qq) = match seed {
        Some(s) => {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            (
                random_phases(&mut rng, p.max(2), 0.25),
                random_phases(&mut rng, q.max(2), 0.25),
            )
        }
        None => (
            regular_phases(p.max(2), 0.0),
            regular_phases(q.max(2), PI / q as f64),
        ),
    };
    let poly = generate_two_circle(p, q, t, &pp, &qq).map_err(|e| e.to_string())?;
    match deform {
        Some(t2) => poly.deform_toward_planes(t2).map_err(|e| e.to_string()),
        None => Ok(poly),
    }
}

fn cmd_generate(
    p: usize,
    q: usize,
    t: f64,
    deform: Option<f64>,
    output: Option<&std::path::Path>,
    cli: &Cli,
) -> ExitCode {
    let poly = match generate_polyhedron(p, q, t, cli.seed, deform) {
        Ok(p) => p,
        Err(e) => return input_error(&e),
    };
    let file = PolyhedronFile::from_polyhedron(
        &poly,
        Some(format!(
            "two-circle p={p} q={q} t={t} seed={:?} deform={:?}",
            cli.seed, deform
        )),
    );
    let json = serde_json::to_string_pretty(&file).expect("serializable");
    match output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, json + "\n") {
                return input_error(&format!("{}: {e}", path.display()));
            }
        }
        None => println!("{json}"),
    }
    ExitCode::from(EXIT_PASS as u8)
}

fn horogon_report(
    text: &str,
    cone_only: bool,
    deform: Option<f64>,
    tol: f64,
) -> Result<Report, (i32, String)> {
    let file = PolygonFile::parse(text).map_err(|e| (EXIT_INPUT, e.to_string()))?;
    let mut report = Report::new("horogon", digest(text.as_bytes()));
    let poly = match file.build() {
        Ok(p) => p,
        Err(e) => return Err((EXIT_VIOLATED, format!("polygon does not embed: {e}"))),
    };
    let ell = poly.cone_angle();
    report.condition(
        "cone_angle_below_2pi",
        ell > 0.0 && ell < 2.0 * PI,
        Some(2.0 * PI - ell),
        Some(format!("cone angle = {ell:.12}")),
    );
    if !cone_only {
        let worst = (0..poly.len())
            .map(|i| poly.angle_distance_residual(i))
            .fold(0.0f64, f64::max);
        report.condition(
            "cosh_delta_sin_half_alpha",
            worst <= tol.max(1e-9),
            Some(worst),
            None,
        );
    }
    if let Some(k) = deform {
        match poly.deform(k) {
            Ok((deformed, residuals)) => {
                let worst = residuals.iter().copied().fold(0.0f64, f64::max);
                report.condition(
                    "deform_common_horocycle",
                    worst <= tol.max(1e-9),
                    Some(worst),
                    Some(format!(
                        "k = {k}, new cone angle = {:.12}",
                        deformed.cone_angle()
                    )),
                );
            }
            Err(e) => {
                report.condition("deform_common_horocycle", false, None, Some(e.to_string()));
            }
        }
    }
    Ok(report)
}

fn cmd_horogon(
    path: &PathBuf,
    cone_only: bool,
    deform: Option<f64>,
    tol: f64,
    cli: &Cli,
) -> ExitCode {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return input_error(&format!("{}: {e}", path.display())),
    };
    match horogon_report(&text, cone_only, deform, tol) {
        Ok(report) => emit(&report, &cli.format),
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code as u8)
        }
    }
}

const CORPUS_WHEEL4: &str = include_str!("../../../corpus/wheel4.json");
const CORPUS_CUBE: &str = include_str!("../../../corpus/cube_matching.json");
const CORPUS_NESTED: &str = include_str!("../../../corpus/nested_squares_reconstruction.json");
const CORPUS_2GON: &str = include_str!("../../../corpus/horogon_2gon.json");

fn cmd_corpus(_run_all: bool, tol: f64, cli: &Cli) -> ExitCode {
    let seed = cli.seed.unwrap_or(0);
    let mut report = Report::new("corpus", digest(seed.to_string().as_bytes()));

    // Graph instances with expected outcomes.
    for (name, text, expect_ok) in [
        ("wheel4", CORPUS_WHEEL4, true),
        ("cube_matching", CORPUS_CUBE, true),
        ("nested_squares_reconstruction", CORPUS_NESTED, false),
    ] {
        match check_graph_report(text, tol) {
            Ok(sub) => {
                let admissible = sub.exit_status == EXIT_PASS;
                report.condition(
                    &format!("graph_{name}"),
                    admissible == expect_ok,
                    None,
                    Some(if expect_ok {
                        "expected admissible".into()
                    } else {
                        "expected infeasible (negative control; reconstruction)".into()
                    }),
                );
            }
            Err(e) => report.condition(&format!("graph_{name}"), false, None, Some(e)),
        }
    }

    // Generated polyhedra run the full verification pipeline.
    for (p, q, t) in [
        (1usize, 4usize, 2.0f64),
        (3, 4, 1.8),
        (3, 3, 2.0),
        (2, 5, 1.5),
    ] {
        let name = format!("polyhedron_{p}_{q}");
        match generate_polyhedron(p, q, t, None, None)
            .and_then(|poly| verify_polyhedron_report(&poly, "generated".into(), tol))
        {
            Ok(sub) => report.condition(&name, sub.all_pass(), None, None),
            Err(e) => report.condition(&name, false, None, Some(e)),
        }
    }
    // Seeded random instances.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..4 {
        let name = format!("random_polyhedron_{i}");
        let result = hs_inscribe::polyhedron::random_simplicial(&mut rng, 2 + i % 3, 3 + i % 2)
            .map_err(|e| e.to_string())
            .and_then(|poly| verify_polyhedron_report(&poly, "generated".into(), tol));
        match result {
            Ok(sub) => report.condition(&name, sub.all_pass(), None, None),
            Err(e) => report.condition(&name, false, None, Some(e)),
        }
    }

    // The bundled 2-gon, with identity and deformation checks.
    match horogon_report(CORPUS_2GON, false, Some(0.5), tol) {
        Ok(sub) => report.condition("horogon_2gon", sub.all_pass(), None, None),
        Err((_, e)) => report.condition("horogon_2gon", false, None, Some(e)),
    }

    emit(&report, &cli.format)
}
