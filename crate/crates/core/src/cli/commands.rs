use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::PathBuf;

use serde::Serialize;
use serde_json::{json, Map, Value};

use super::{Check, CocycleArgs, Outcome, OutputSet, VerifyArgs, DEFAULT_OUT_DIR};
use crate::cocycle::{total_flux, FluxReport, Triangulation};
use crate::config::{parse_flux, DisplacementSpec, Settings, Units};
use crate::error::{Error, Result};
use crate::geometry::TorusGeometry;
use crate::levels::{fit_deviation_decay, BumpReport, LandauLevel};
use crate::lll_basis::{BoundaryPhases, GroundBasis, Representation};
use crate::quadrature::TorusGrid;
use crate::tolerances as tol;
use crate::translations::{commutator_check, density_shift_defect, Translation, TranslationReport};
use crate::verify::{self, SuiteOptions, FIGURE_FLUXES};

/// Grid on which the boundary checks run.
const BOUNDARY_GRID: usize = 32;
/// Grid used for density shift comparisons.
const SHIFT_GRID: usize = 24;

fn out_dir(settings: &Settings) -> PathBuf {
    settings.out_dir.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
}

fn grid_for(settings: &Settings, g: TorusGeometry) -> Result<TorusGrid> {
    match settings.grid {
        Some(n) => TorusGrid::new(g, n, n),
        None => Ok(TorusGrid::default_for(g)),
    }
}

fn geometry_json(g: &TorusGeometry) -> Value {
    json!({ "N": g.flux(), "L1": g.l1(), "L2": g.l2() })
}

fn parameters(settings: &Settings, resolved: Value) -> Result<Value> {
    Ok(json!({ "settings": serde_json::to_value(settings)?, "resolved": resolved }))
}

fn extra(value: Value) -> Map<String, Value> {
    match value {
        Value::Object(m) => m,
        _ => Map::new(),
    }
}

fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, f64::max)
}

#[derive(Serialize)]
struct BasisReport {
    flux: u32,
    nu: usize,
    l1: f64,
    l2: f64,
    grid: usize,
    norm_const: f64,
    duality_max_relative: f64,
    boundary_grid: usize,
    boundary_max_relative_fourier: f64,
    boundary_max_relative_gaussian: f64,
    double_shift_max_relative: f64,
    double_shift_sign: i32,
}

pub fn basis(settings: &Settings) -> Result<Outcome> {
    let g = settings.geometry()?;
    let nu = settings.nu.unwrap_or(0);
    if nu >= g.flux() as usize {
        return Err(Error::InvalidParameter(format!(
            "nu = {nu} is out of range: N = {} has ground states 0..={}",
            g.flux(),
            g.flux() - 1
        )));
    }
    let grid = grid_for(settings, g)?;
    let basis = GroundBasis::normalized(&grid)?;
    let f = basis.function(nu);
    let samples = grid.sample(|z| {
        let v = f.eval(Representation::Fourier, z);
        let w = f.weighted_derivative(Representation::Fourier, z, 0);
        (v.re, v.im, w.norm_sqr(), verify::duality_error(&basis, nu, z))
    });
    let check_grid = TorusGrid::new(g, BOUNDARY_GRID, BOUNDARY_GRID)?;
    let boundary = check_grid.sample(|z| {
        let fourier = f.boundary_check(Representation::Fourier, z, BoundaryPhases::zero()).relative();
        let gaussian = f.boundary_check(Representation::Gaussian, z, BoundaryPhases::zero()).relative();
        (fourier, gaussian, f.double_shift(Representation::Fourier, z).relative_spread())
    });
    let report = BasisReport {
        flux: g.flux(),
        nu,
        l1: g.l1(),
        l2: g.l2(),
        grid: grid.nx(),
        norm_const: f.norm_const(),
        duality_max_relative: max_of(samples.iter().map(|s| s.3)),
        boundary_grid: BOUNDARY_GRID,
        boundary_max_relative_fourier: max_of(boundary.iter().map(|b| b.0)),
        boundary_max_relative_gaussian: max_of(boundary.iter().map(|b| b.1)),
        double_shift_max_relative: max_of(boundary.iter().map(|b| b.2)),
        double_shift_sign: if g.flux() % 2 == 0 { 1 } else { -1 },
    };

    let mut out = OutputSet::create(&out_dir(settings))?;
    let format = settings.format.unwrap_or_default();
    let field = |name: &str, pick: fn(&(f64, f64, f64, f64)) -> f64| {
        crate::levels::GridField::from_samples(name, &grid, Some(0), samples.iter().map(pick).collect())
    };
    let meta = extra(json!({ "nu": nu }));
    out.write_field(&format!("psi_re_nu{nu}"), &field("re_psi", |s| s.0), format, meta.clone())?;
    out.write_field(&format!("psi_im_nu{nu}"), &field("im_psi", |s| s.1), format, meta.clone())?;
    out.write_field(&format!("density_nu{nu}"), &field("weighted_abs_psi_squared", |s| s.2), format, meta)?;
    out.write_json("basis_report.json", &report)?;

    let checks = vec![
        Check::below("duality", report.duality_max_relative, tol::DUALITY),
        Check::below(
            "boundary",
            report.boundary_max_relative_fourier.max(report.boundary_max_relative_gaussian),
            tol::BOUNDARY,
        ),
        Check::below("double_shift", report.double_shift_max_relative, tol::DOUBLE_SHIFT),
    ];
    let summary = format!(
        "psi_{nu} on N = {} ({}x{} grid): duality {:.2e}, boundary {:.2e}, double shift {:.2e}\n",
        g.flux(),
        grid.nx(),
        grid.ny(),
        report.duality_max_relative,
        report.boundary_max_relative_fourier.max(report.boundary_max_relative_gaussian),
        report.double_shift_max_relative
    );
    let params = parameters(settings, json!({ "geometry": geometry_json(&g), "nu": nu, "grid": grid.nx() }))?;
    let manifest = out.finish("basis", params, checks)?;
    Ok(Outcome { manifest, summary })
}

#[derive(Serialize)]
struct DensityRow {
    flux: u32,
    grid: usize,
    max_deviation: f64,
    mean: f64,
    total_weight: f64,
    shift_defect: f64,
    bumps: BumpReport,
    extrema_on_lattice: bool,
}

pub fn density(settings: &Settings) -> Result<Outcome> {
    let level = settings.level.unwrap_or(0);
    let mut geometries = settings.geometries(&FIGURE_FLUXES)?;
    geometries.sort_by_key(|g| g.flux());
    let format = settings.format.unwrap_or_default();
    let mut out = OutputSet::create(&out_dir(settings))?;
    let mut rows = Vec::new();
    let mut checks = Vec::new();
    for g in &geometries {
        let n = g.flux();
        let grid = grid_for(settings, *g)?;
        let lvl = LandauLevel::build(*g, level, &grid, Representation::Fourier)?;
        let map = lvl.density_map(&grid)?;
        let shift_grid = TorusGrid::new(*g, SHIFT_GRID, SHIFT_GRID)?;
        let shift_defect = max_of([(1, 0), (0, 1)].map(|(n1, n2)| {
            density_shift_defect(&lvl, Translation::lattice(g, n1, n2).displacement(), &shift_grid)
        }));
        let bumps = map.bump_report();
        let row = DensityRow {
            flux: n,
            grid: grid.nx(),
            max_deviation: map.max_deviation,
            mean: map.mean,
            total_weight: map.total_weight(),
            shift_defect,
            bumps,
            extrema_on_lattice: bumps.on_lattice(),
        };
        out.write_field(
            &format!("deviation_N{n}_level{level}"),
            &map.deviation,
            format,
            extra(serde_json::to_value(&row)?),
        )?;
        checks.push(Check::holds(
            format!("N{n}_extrema_on_lattice"),
            row.extrema_on_lattice,
            format!("{} of {} lattice points at maxima, {} at minima", bumps.lattice_at_maxima, bumps.lattice_points, bumps.lattice_at_minima),
        ));
        checks.push(Check::below(format!("N{n}_shift_invariance"), shift_defect, tol::SHIFT_INVARIANCE));
        checks.push(Check::above(format!("N{n}_nonuniform"), row.max_deviation, 0.0));
        rows.push(row);
    }

    let points: Vec<(u32, f64)> = rows.iter().map(|r| (r.flux, r.max_deviation)).collect();
    let fit = (points.len() >= 2).then(|| fit_deviation_decay(&points));
    let mut table = String::from("N,d,ln_d,fit_ln_d\n");
    for (n, d) in &points {
        let fitted = fit.as_ref().map_or(f64::NAN, |f| f.intercept + f.slope * *n as f64);
        writeln!(table, "{n},{d:e},{:e},{fitted:e}", d.ln()).expect("string write");
    }
    out.write_text(&format!("decay_level{level}.csv"), &table)?;
    if let Some(fit) = fit.as_ref().filter(|_| points.len() >= 3) {
        checks.push(Check::holds("decay_strictly_decreasing", fit.strictly_decreasing, "d(N) over increasing N"));
        checks.push(Check::below("decay_fit_residual", fit.relative_residual, tol::DECAY_FIT));
    }
    out.write_json("density_report.json", &json!({ "level": level, "maps": rows, "decay_fit": fit }))?;

    let mut summary = format!("level {level} deviation from uniformity\n");
    for r in &rows {
        writeln!(
            summary,
            "  N = {:>2}: d = {:.3e}, extrema on lattice {}, shift defect {:.1e}",
            r.flux, r.max_deviation, r.extrema_on_lattice, r.shift_defect
        )
        .expect("string write");
    }
    if let Some(fit) = &fit {
        writeln!(summary, "  ln d(N) ~ {:.3} {:+.3} N (residual {:.1}% of range)", fit.intercept, fit.slope, 100.0 * fit.relative_residual)
            .expect("string write");
    }
    let params = parameters(
        settings,
        json!({ "level": level, "geometries": geometries.iter().map(geometry_json).collect::<Vec<_>>() }),
    )?;
    let manifest = out.finish("density", params, checks)?;
    Ok(Outcome { manifest, summary })
}

pub fn translate(settings: &Settings) -> Result<Outcome> {
    let g = settings.geometry()?;
    let level_index = settings.level.unwrap_or(0);
    let spec: DisplacementSpec = settings
        .a
        .as_deref()
        .unwrap_or("lattice:1,0")
        .parse()
        .map_err(Error::InvalidParameter)?;
    let t = spec.resolve(&g);
    let grid = grid_for(settings, g)?;
    let level = LandauLevel::build(g, level_index, &grid, Representation::Fourier)?;
    let report = TranslationReport::new(&t, &level, &grid)?;
    let shift_defect = density_shift_defect(&level, t.displacement(), &TorusGrid::new(g, SHIFT_GRID, SHIFT_GRID)?);
    let flagged = report.projection_defect > tol::LATTICE_PROJECTION;

    let mut checks = vec![Check::holds(
        "density_invariance_matches_projection",
        (report.projection_defect < tol::LATTICE_PROJECTION) == (shift_defect < tol::SHIFT_INVARIANCE),
        format!("projection defect {:.2e}, density shift defect {:.2e}", report.projection_defect, shift_defect),
    )];
    let mut commutator = None;
    if report.lattice {
        checks.push(Check::below("unitarity", report.unitarity_defect, tol::UNITARITY));
        checks.push(Check::below("stays_in_level", report.projection_defect, tol::LATTICE_PROJECTION));
        let step = Translation::lattice(&g, 0, 1).displacement();
        let c = commutator_check(&level, t.displacement(), step, &grid)?;
        checks.push(Check::below("commutator_with_y_step", c.defect, tol::COMMUTATOR));
        commutator = Some(c.defect);
    }

    let mut out = OutputSet::create(&out_dir(settings))?;
    let mut value = serde_json::to_value(&report)?;
    value["density_shift_defect"] = json!(shift_defect);
    value["projection_defect_flagged"] = json!(flagged);
    value["commutator_defect"] = json!(commutator);
    out.write_json("translate_report.json", &value)?;

    let summary = format!(
        "a = {:+.6}{:+.6}i on N = {}, level {}: {}; unitarity {:.2e}, projection defect {:.2e}{}\n",
        report.a[0],
        report.a[1],
        g.flux(),
        level_index,
        match report.lattice_indices {
            Some((n1, n2)) => format!("lattice point ({n1}, {n2})"),
            None => "not a lattice point".to_string(),
        },
        report.unitarity_defect,
        report.projection_defect,
        if flagged { " (leaves the level)" } else { "" }
    );
    let params = parameters(
        settings,
        json!({ "geometry": geometry_json(&g), "level": level_index, "a": report.a, "grid": grid.nx() }),
    )?;
    let manifest = out.finish("translate", params, checks)?;
    Ok(Outcome { manifest, summary })
}

#[derive(Serialize)]
struct CocycleSummary {
    l1: f64,
    l2: f64,
    field: f64,
    vertices: usize,
    triangles: usize,
    #[serde(flatten)]
    report: FluxSummary,
}

#[derive(Serialize)]
struct FluxSummary {
    sum_c: f64,
    flux: f64,
    flux_over_two_pi: f64,
    theorem_holds: bool,
    weil_integral: bool,
    boundary_terms_sum: f64,
    max_identity_defect: f64,
    identity_holds_everywhere: bool,
}

impl From<&FluxReport> for FluxSummary {
    fn from(r: &FluxReport) -> Self {
        Self {
            sum_c: r.sum_c,
            flux: r.flux,
            flux_over_two_pi: r.flux_over_two_pi,
            theorem_holds: r.theorem_holds,
            weil_integral: r.weil_integral,
            boundary_terms_sum: r.boundary_terms_sum,
            max_identity_defect: r.max_identity_defect,
            identity_holds_everywhere: r.identity_holds_everywhere,
        }
    }
}

pub fn cocycle(settings: &Settings, args: &CocycleArgs) -> Result<Outcome> {
    let flux = settings.flux.as_deref().map(parse_flux).transpose().map_err(Error::InvalidParameter)?;
    let mesh = match &args.mesh {
        Some(path) => {
            let mut mesh = Triangulation::load(path)?;
            if let Some(flux) = flux {
                mesh.field = flux / mesh.area();
            }
            mesh
        }
        None => {
            let n = settings.mesh_n.unwrap_or(8);
            let natural = settings.units.unwrap_or_default() == Units::Natural;
            let (l1, l2, default_flux) = match (settings.l1, settings.l2) {
                (Some(l1), Some(l2)) if natural && settings.flux_quanta.is_none() => (l1, l2, 2.0 * l1 * l2),
                _ => {
                    let g = settings.geometry()?;
                    (g.l1(), g.l2(), 2.0 * PI * g.flux() as f64)
                }
            };
            Triangulation::with_flux(l1, l2, flux.unwrap_or(default_flux), n)?
        }
    };
    let report = total_flux(&mesh)?;

    let mut out = OutputSet::create(&out_dir(settings))?;
    out.write_text("mesh.json", &(mesh.to_json()? + "\n"))?;
    out.write_json(
        "cocycle_report.json",
        &CocycleSummary {
            l1: mesh.l1,
            l2: mesh.l2,
            field: mesh.field,
            vertices: mesh.vertices.len(),
            triangles: mesh.triangles.len(),
            report: (&report).into(),
        },
    )?;
    if args.triangles {
        let mut table = String::from("triangle,c,lhs,rhs,defect\n");
        for t in &report.triangles {
            writeln!(table, "{},{:e},{:e},{:e},{:e}", t.index, t.cocycle, t.lhs, t.rhs, t.defect).expect("string write");
        }
        out.write_text("triangles.csv", &table)?;
    }

    let checks = vec![
        Check::holds(
            "triangle_identity",
            report.identity_holds_everywhere,
            format!("max |lhs - rhs| {:.2e}", report.max_identity_defect),
        ),
        Check::holds(
            "flux_theorem",
            report.theorem_holds,
            format!("sum c = {:.12}, B L1 L2 = {:.12}", report.sum_c, report.flux),
        ),
    ];
    let summary = format!(
        "{} triangles: sum c = {:.12}, flux = {:.12} ({:.6} x 2pi); theorem {}, Weil integrality {}\n",
        mesh.triangles.len(),
        report.sum_c,
        report.flux,
        report.flux_over_two_pi,
        if report.theorem_holds { "holds" } else { "FAILS" },
        if report.weil_integral { "satisfied" } else { "violated (flux not in 2 pi Z)" }
    );
    let params = parameters(
        settings,
        json!({ "L1": mesh.l1, "L2": mesh.l2, "B": mesh.field, "triangles": mesh.triangles.len(), "mesh": args.mesh }),
    )?;
    let manifest = out.finish("cocycle", params, checks)?;
    Ok(Outcome { manifest, summary })
}

pub fn verify(settings: &Settings, args: &VerifyArgs) -> Result<Outcome> {
    if args.n_max == 0 {
        return Err(Error::InvalidParameter("--n-max must be at least 1".into()));
    }
    let opts = SuiteOptions {
        n_max: args.n_max,
        seed: settings.seed.unwrap_or(0),
        fault: args.inject_fault,
    };
    let results = verify::run_suite(&opts)?;
    let mut out = OutputSet::create(&out_dir(settings))?;
    out.write_json("verify_report.json", &json!({ "options": opts, "criteria": results }))?;
    let checks = results
        .iter()
        .map(|r| Check::holds(format!("{:02}_{}", r.id, r.name.replace(' ', "_")), r.passed, r.detail.clone()))
        .collect();
    let manifest = out.finish("verify", parameters(settings, serde_json::to_value(opts)?)?, checks)?;
    Ok(Outcome {
        manifest,
        summary: verify::render(&results),
    })
}
