use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dpw_cmc::bessel::scalar_matrix_correspondence;
use dpw_cmc::flow::{
    self, closing_report, monodromy, monodromy_with_initial, trace_law_error, FlowConfig,
    MonodromyReport, PathSpec, TraceSign,
};
use dpw_cmc::ode::OdeConfig;
use dpw_cmc::potential::{
    cylinder_alpha, gauge_chain_residual, gauge_reduction_residual, verify_mu_alpha_identity,
    verify_symmetry_relations, BesselOrder, CylinderPotential, DelaunayResidue,
};
use dpw_cmc::surface::{
    build_surface, delaunay_reference, reflection_symmetry_check, PipelineConfig,
};

use crate::config::{RunConfig, Start};
use crate::export::export_mesh;
use crate::report::Report;
use crate::CliError;

pub const UNITARITY_TOL: f64 = 1e-6;
pub const IDENTITY_TOL: f64 = 1e-8;
pub const DERIVATIVE_TOL: f64 = 1e-5;
pub const TRACE_TOL: f64 = 1e-6;
pub const MU_ALPHA_TOL: f64 = 1e-12;
pub const GAUGE_TOL: f64 = 1e-10;
pub const POTENTIAL_SYMMETRY_TOL: f64 = 1e-12;
pub const REFLECTION_TOL: f64 = 1e-3;
pub const INVOLUTION_TOL: f64 = 1e-8;
pub const FRAME_TOL: f64 = 1e-7;
pub const WRONSKIAN_TOL: f64 = 1e-9;
pub const SEAM_TOL: f64 = 1e-5;
pub const H_SPREAD_TOL: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Check {
    Monodromy,
    Gauge,
    Symmetry,
    Bessel,
    TraceLaw,
    MuAlpha,
}

impl Check {
    pub fn name(self) -> &'static str {
        match self {
            Check::Monodromy => "monodromy",
            Check::Gauge => "gauge",
            Check::Symmetry => "symmetry",
            Check::Bessel => "bessel",
            Check::TraceLaw => "trace-law",
            Check::MuAlpha => "mu-alpha",
        }
    }
}

fn flow_config(cfg: &RunConfig) -> FlowConfig {
    FlowConfig {
        ode: OdeConfig::with_tol(cfg.ode_tol),
        ..FlowConfig::default()
    }
}

fn pipeline_config(cfg: &RunConfig) -> PipelineConfig {
    let mut p = PipelineConfig::with_degree(cfg.degree);
    p.flow = flow_config(cfg);
    p
}

fn numerical(stage: &str) -> impl Fn(String) -> CliError + '_ {
    move |msg| CliError::Numerical {
        stage: stage.into(),
        msg,
    }
}

/// Fixed-seed sample points `(z, λ)` away from the branch cuts.
fn samples(n: usize) -> Vec<(C64, C64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x00d9_cc31);
    (0..n)
        .map(|_| {
            let z = C64::from_polar(rng.random_range(0.2..3.0), rng.random_range(-3.0..3.0));
            let l = C64::from_polar(1.0, rng.random_range(-3.0..3.0));
            (z, l)
        })
        .collect()
}

fn closing(cfg: &RunConfig, start: Start) -> Result<MonodromyReport, CliError> {
    let p = cfg.params()?;
    let grid = cfg.lambda_grid()?;
    let ls = grid.points();
    let fc = flow_config(cfg);
    let xi = CylinderPotential::new(p);
    let err = numerical("monodromy");
    let m = match start {
        Start::Identity => monodromy(&xi, &ls, &fc),
        Start::Unitarized => flow::cylinder_initial_frames(&p, &ls, &fc)
            .and_then(|phi0| monodromy_with_initial(&xi, &phi0, &ls, &fc)),
    }
    .map_err(|e| err(e.to_string()))?;
    let mut rep = closing_report(&grid, &m).map_err(|e| err(e.to_string()))?;
    let res = DelaunayResidue::from_cylinder(&p);
    // the trace is unchanged by the diagonal start
    rep.trace_law_error = Some(trace_law_error(&res, &ls, &m, TraceSign::Flipped));
    Ok(rep)
}

fn gate_closing(r: &mut Report, rep: &MonodromyReport) {
    r.gate("unitarity", rep.unitarity_error, UNITARITY_TOL)
        .gate("identity_at_one", rep.identity_error, IDENTITY_TOL)
        .gate("derivative_at_one", rep.derivative_error, DERIVATIVE_TOL)
        .info("identity_sign", rep.identity_sign);
}

pub fn verify(cfg: &RunConfig, check: Check) -> Result<Report, CliError> {
    cfg.validate()?;
    let p = cfg.params()?;
    let mut r = Report::new(check.name(), cfg);
    match check {
        Check::Monodromy => {
            let rep = closing(cfg, cfg.start)?;
            gate_closing(&mut r, &rep);
            let other = match cfg.start {
                Start::Identity => Start::Unitarized,
                Start::Unitarized => Start::Identity,
            };
            let alt = closing(cfg, other)?;
            let key = match other {
                Start::Identity => "unitarity_identity_start",
                Start::Unitarized => "unitarity_unitarized_start",
            };
            r.info("start", cfg.start).info(key, alt.unitarity_error);
        }
        Check::TraceLaw => {
            let grid = cfg.lambda_grid()?;
            let ls = grid.points();
            let m = monodromy(&CylinderPotential::new(p), &ls, &flow_config(cfg))
                .map_err(|e| numerical("monodromy")(e.to_string()))?;
            let res = DelaunayResidue::from_cylinder(&p);
            r.gate("trace_law", trace_law_error(&res, &ls, &m, TraceSign::Flipped), TRACE_TOL)
                .gate("trace_at_one", (m[0].trace() - 2.0).norm(), TRACE_TOL)
                .info("trace_law_unflipped", trace_law_error(&res, &ls, &m, TraceSign::Plain));
        }
        Check::MuAlpha => {
            let ls = cfg.lambda_grid()?.points();
            r.gate("mu_alpha", verify_mu_alpha_identity(&p, &ls), MU_ALPHA_TOL);
        }
        Check::Gauge => {
            let s = samples(100);
            let offset = C64::new(cfg.alpha_offset, 0.0);
            let err = numerical("gauge");
            let chain = gauge_chain_residual(&p, offset, &s).map_err(|e| err(e.to_string()))?;
            let order = BesselOrder::Cylinder { r: p.r(), offset };
            let reduction = gauge_reduction_residual(order, &s).map_err(|e| err(e.to_string()))?;
            r.gate("gauge_chain", chain, GAUGE_TOL)
                .gate("bessel_reduction", reduction, GAUGE_TOL)
                .info("samples", s.len())
                .info("alpha_offset", cfg.alpha_offset);
        }
        Check::Symmetry => {
            let xi = CylinderPotential::new(p);
            let rel = verify_symmetry_relations(&xi, &samples(100))
                .map_err(|e| numerical("symmetry")(e.to_string()))?;
            let mesh = build_surface(&p, &cfg.domain()?, &cfg.lambda_grid()?, &pipeline_config(cfg))
                .map_err(|e| numerical("surface")(e.to_string()))?;
            let s = reflection_symmetry_check(&mesh);
            r.gate("potential_relations", rel, POTENTIAL_SYMMETRY_TOL)
                .gate("reflection_deviation", s.max_deviation, REFLECTION_TOL)
                .gate("involution", s.involution_residual, INVOLUTION_TOL)
                .info("plane_normal", [s.normal.x, s.normal.y, s.normal.z])
                .info("plane_offset", s.offset);
        }
        Check::Bessel => {
            let path = PathSpec::polyline(&[C64::new(0.0, 0.0), C64::new(3f64.ln(), 0.0)])
                .map_err(|e| numerical("bessel")(e.to_string()))?;
            let alphas = [
                C64::new(0.0, 0.0),
                C64::new(0.5, 0.0),
                C64::new(0.3, 0.1),
                cylinder_alpha(p.r(), C64::from_polar(1.0, 0.75 * PI)),
            ];
            let (mut frame, mut wr) = (0.0_f64, 0.0_f64);
            for a in alphas {
                let rep = scalar_matrix_correspondence(a, &path, &flow_config(cfg))
                    .map_err(|e| numerical("bessel")(e.to_string()))?;
                frame = frame.max(rep.frame_error);
                wr = wr.max(rep.wronskian_drift);
            }
            r.gate("frame", frame, FRAME_TOL).gate("wronskian", wr, WRONSKIAN_TOL);
        }
    }
    Ok(r)
}

/// Builds the surface and its Delaunay reference, writes both meshes and
/// the report.
pub fn generate(cfg: &RunConfig) -> Result<Report, CliError> {
    cfg.validate()?;
    let p = cfg.params()?;
    let grid = cfg.lambda_grid()?;
    let dom = cfg.domain()?;
    let pc = pipeline_config(cfg);

    let mut r = Report::new("generate", cfg);
    let rep = closing(cfg, Start::Unitarized)?;
    gate_closing(&mut r, &rep);
    r.gate("trace_law", rep.trace_law_error.unwrap_or(f64::NAN), TRACE_TOL)
        .info("unitarity_identity_start", closing(cfg, Start::Identity)?.unitarity_error)
        .info("closing_start", Start::Unitarized);

    let mesh = build_surface(&p, &dom, &grid, &pc).map_err(|e| numerical("surface")(e.to_string()))?;
    let (a, b) = dpw_cmc::potential::delaunay_ab(&p);
    let res = DelaunayResidue::new(a, b, 0.0).map_err(|e| numerical("delaunay")(e.to_string()))?;
    let reference =
        delaunay_reference(&res, &dom, &grid, &pc).map_err(|e| numerical("delaunay")(e.to_string()))?;
    let sym = reflection_symmetry_check(&mesh);

    r.gate("seam", mesh.seam_residual, SEAM_TOL)
        .gate("h_relative_spread", mesh.h_stats.relative_spread(), H_SPREAD_TOL)
        .gate("reflection_deviation", sym.max_deviation, REFLECTION_TOL)
        .gate("iwasawa_unitarity", mesh.iwasawa.unitarity, 1e-8)
        .gate("iwasawa_plus_loop_tail", mesh.iwasawa.plus_loop_tail, 1e-8)
        .gate("iwasawa_reconstruction", mesh.iwasawa.reconstruction, 1e-8)
        .info("h_mean", mesh.h_stats.mean)
        .info("h_stddev", mesh.h_stats.stddev)
        .info("h_vertices", mesh.h_stats.count)
        .info("degenerate_triangles", mesh.h_stats.degenerate_triangles)
        .info("sym_hermitian_defect", mesh.sym_defect)
        .info("involution_residual", sym.involution_residual)
        .info("delaunay_kind", res.kind().to_string())
        .info("delaunay_a", a)
        .info("delaunay_b", b)
        .info("delaunay_h_mean", reference.h_stats.mean)
        .info("vertices", mesh.vertices.len())
        .info("faces", mesh.faces.len());

    let ext = cfg.format.extension();
    export_mesh(&mesh, cfg.format, &cfg.out)?;
    export_mesh(&reference, cfg.format, &cfg.sibling("_delaunay", ext))?;
    r.write(&cfg.sibling("_report", "json"))?;
    Ok(r)
}
