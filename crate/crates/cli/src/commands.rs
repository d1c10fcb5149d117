//! The five commands: curvature tables, thickness-corrected potential
//! profiles, gauge checks, spectra and the general-vs-closed-form
//! consistency report.

use thinlayer::em::{gauge_check, FieldConfig};
use thinlayer::geometry::{curvature, fundamental_forms, ChartPoint, SurfaceChart};
use thinlayer::potentials::{
    geometric_potential, hprime_coefficients_at, hprime_consistency,
    modified_geometric_potential, ThicknessParams,
};
use thinlayer::solver::{
    assemble_h0, assemble_hprime, lowest_eigenpairs, SurfaceGrid, GAUGE_TOLERANCE,
};
use thinlayer::Error;

use crate::output::{
    BlockOut, CommandOutput, ComplexOut, GaugeOutcome, GridOut, PointOut, SpectrumOutcome, Table,
};
use crate::scenario::{Prepared, SurfaceSpec, UnitSystem};
use crate::CliError;

fn solver_error(e: Error) -> CliError {
    match e {
        Error::ConvergenceFailure(_) => CliError::Solver(e.to_string()),
        other => CliError::Validation(other.to_string()),
    }
}

/// Uniform samples of the first chart coordinate: closed interval (both
/// endpoints) on periodic coordinates, half-step interior points on bounded
/// ones (whose endpoints may be singular, like the sphere's poles).
fn coordinate_samples(chart: &SurfaceChart, samples: usize) -> Result<Vec<f64>, CliError> {
    if samples < 2 {
        return Err(CliError::Validation(format!(
            "samples: need at least 2, got {samples}"
        )));
    }
    let r = chart.domain()[0];
    let values = if r.is_periodic() {
        (0..samples)
            .map(|i| r.lo + i as f64 * r.span() / (samples - 1) as f64)
            .collect()
    } else {
        (0..samples)
            .map(|i| r.lo + (i as f64 + 0.5) * r.span() / samples as f64)
            .collect()
    };
    Ok(values)
}

fn second_coordinate_midpoint(chart: &SurfaceChart) -> f64 {
    let r = chart.domain()[1];
    r.lo + 0.5 * r.span()
}

/// The divisor for energy-valued outputs under the chosen unit system, plus
/// its label.
pub fn energy_divisor(prep: &Prepared, units: UnitSystem) -> Result<(f64, &'static str), CliError> {
    match units {
        UnitSystem::Internal => Ok((1.0, "internal")),
        UnitSystem::V0 => prep
            .scenario
            .energy_unit(&prep.scale)
            .map(|v0| (v0, "v0"))
            .ok_or_else(|| {
                CliError::Validation(
                    "units: V0 is undefined for flat surfaces; use internal units".into(),
                )
            }),
    }
}

/// Curvature table: theta, M, K and the geometric potential, sampled along
/// the first coordinate at the mid-second-coordinate.
pub fn cmd_curvature(
    prep: &Prepared,
    samples: usize,
    units: UnitSystem,
) -> Result<CommandOutput, CliError> {
    let (divisor, label) = energy_divisor(prep, units)?;
    let q2 = second_coordinate_midpoint(&prep.chart);
    let vg_column = if label == "v0" { "vg_over_v0" } else { "vg" };

    let mut rows = Vec::with_capacity(samples);
    for theta in coordinate_samples(&prep.chart, samples)? {
        let p = ChartPoint::new(theta, q2);
        let forms = fundamental_forms(&prep.chart, p).map_err(solver_error)?;
        let curv = curvature(&forms);
        let vg = geometric_potential(&curv, &prep.scale);
        rows.push(vec![theta, curv.mean, curv.gaussian, vg / divisor]);
    }
    Ok(CommandOutput::Table(Table {
        columns: vec![
            "theta".into(),
            "mean_curvature".into(),
            "gaussian_curvature".into(),
            vg_column.into(),
        ],
        rows,
    }))
}

/// Thickness-corrected potential profiles, one column per offset value.
pub fn cmd_profile(
    prep: &Prepared,
    q3_list: &[f64],
    samples: usize,
    units: UnitSystem,
) -> Result<CommandOutput, CliError> {
    if q3_list.is_empty() {
        return Err(CliError::Validation("q3 list must not be empty".into()));
    }
    let (divisor, label) = energy_divisor(prep, units)?;
    let q2 = second_coordinate_midpoint(&prep.chart);

    let mut columns = vec!["theta".to_string()];
    for q3 in q3_list {
        if label == "v0" {
            columns.push(format!("vgp_over_v0[q3={q3}]"));
        } else {
            columns.push(format!("vgp[q3={q3}]"));
        }
    }

    let mut rows = Vec::with_capacity(samples);
    for theta in coordinate_samples(&prep.chart, samples)? {
        let p = ChartPoint::new(theta, q2);
        let forms = fundamental_forms(&prep.chart, p).map_err(solver_error)?;
        let curv = curvature(&forms);
        let mut row = vec![theta];
        for &q3 in q3_list {
            let v = modified_geometric_potential(&curv, &prep.scale, ThicknessParams::new(q3))
                .map_err(solver_error)?;
            row.push(v / divisor);
        }
        rows.push(row);
    }
    Ok(CommandOutput::Table(Table { columns, rows }))
}

/// Surface Coulomb-gauge diagnostics over the scenario grid. The boolean
/// outcome follows the assembly tolerance; the caller maps `passed = false`
/// to exit code 1.
pub fn cmd_gauge_check(
    prep: &Prepared,
    debug_non_gauge_field: bool,
) -> Result<CommandOutput, CliError> {
    let field = if debug_non_gauge_field {
        let SurfaceSpec::Torus { minor_radius, .. } = prep.scenario.surface else {
            return Err(CliError::Validation(
                "--debug-non-gauge-field is only defined on the torus".into(),
            ));
        };
        // A deliberately non-solenoidal field used to exercise the failure
        // path.
        FieldConfig::from_fns(move |p: ChartPoint| minor_radius * minor_radius * p.q1.cos(), |_| 0.0)
    } else {
        prep.field.clone()
    };

    let report = gauge_check(&prep.chart, &field, prep.grid).map_err(solver_error)?;
    Ok(CommandOutput::Gauge(GaugeOutcome {
        max_div: report.max_abs,
        rms_div: report.rms,
        worst_point: PointOut { q1: report.worst_point.q1, q2: report.worst_point.q2 },
        passed: report.max_abs <= GAUGE_TOLERANCE,
        grid: GridOut { n1: prep.grid.n1, n2: prep.grid.n2 },
    }))
}

/// Low-lying spectrum of the surface Hamiltonian; the potential is the
/// geometric one, thickness-corrected (with the kinetic correction added)
/// when requested. A zero offset skips the correction entirely, so the
/// output is identical to the uncorrected run byte for byte.
pub fn cmd_spectrum(
    prep: &Prepared,
    k: usize,
    with_thickness: bool,
    symmetrize: bool,
    units: UnitSystem,
) -> Result<CommandOutput, CliError> {
    let (divisor, _) = energy_divisor(prep, units)?;
    let grid = SurfaceGrid::sample(&prep.chart, prep.grid).map_err(solver_error)?;
    let q3 = prep.scenario.thickness;
    let thick = with_thickness && q3 != 0.0;
    let t = ThicknessParams::new(q3);

    let mut potential = Vec::with_capacity(grid.len());
    for &p in grid.points() {
        let curv = curvature(&fundamental_forms(&prep.chart, p).map_err(solver_error)?);
        let v = if thick {
            modified_geometric_potential(&curv, &prep.scale, t).map_err(solver_error)?
        } else {
            geometric_potential(&curv, &prep.scale)
        };
        potential.push(v);
    }

    let mut h = assemble_h0(&grid, &prep.field, &potential, &prep.scale).map_err(solver_error)?;
    if thick {
        let coeffs: Vec<_> = grid
            .points()
            .iter()
            .map(|&p| hprime_coefficients_at(&prep.chart, p, &prep.field, t, &prep.scale))
            .collect::<Result<_, _>>()
            .map_err(solver_error)?;
        let hp = assemble_hprime(&grid, &coeffs).map_err(solver_error)?;
        h = h.add(&hp).map_err(solver_error)?;
    }

    let spectrum = lowest_eigenpairs(&h, k, symmetrize).map_err(solver_error)?;
    Ok(CommandOutput::Spectrum(SpectrumOutcome {
        eigenvalues: spectrum.eigenvalues.iter().map(|e| e / divisor).collect(),
        imaginary_parts: spectrum.imaginary_parts.iter().map(|e| e / divisor).collect(),
        residuals: spectrum.residuals.clone(),
        hermiticity_deviation: spectrum.hermiticity_deviation,
        discarded_antihermitian_norm: spectrum.discarded_antihermitian_norm,
        grid: GridOut { n1: prep.grid.n1, n2: prep.grid.n2 },
        k,
        with_thickness,
        symmetrize,
    }))
}

/// General-vs-torus comparison of the thickness correction, block by block,
/// over a deterministic point lattice. Always exits 0: mismatches are the
/// report's content, not an error.
pub fn cmd_consistency(prep: &Prepared, n_points: usize) -> Result<CommandOutput, CliError> {
    let SurfaceSpec::Torus { minor_radius, major_radius } = prep.scenario.surface else {
        return Err(CliError::Validation(
            "the consistency report compares against the torus closed forms; scenario surface must be a torus"
                .into(),
        ));
    };
    if n_points == 0 {
        return Err(CliError::Validation("points: need at least 1".into()));
    }

    let side = (n_points as f64).sqrt().ceil() as usize;
    let d = prep.chart.domain();
    let mut points = Vec::with_capacity(n_points);
    'outer: for i in 0..side {
        for j in 0..side {
            if points.len() == n_points {
                break 'outer;
            }
            points.push(ChartPoint::new(
                d[0].lo + (i as f64 + 0.5) / side as f64 * d[0].span(),
                d[1].lo + (j as f64 + 0.5) / side as f64 * d[1].span(),
            ));
        }
    }

    let report = hprime_consistency(
        minor_radius,
        major_radius,
        &points,
        prep.scenario.field.b0,
        prep.scenario.field.b1,
        prep.scenario.thickness,
        &prep.scale,
    )
    .map_err(solver_error)?;

    Ok(CommandOutput::Consistency(crate::output::ConsistencyOutcome {
        q3: report.q3,
        sample_count: report.sample_count,
        blocks: report
            .blocks
            .iter()
            .map(|b| BlockOut {
                block: b.block.to_string(),
                max_abs_discrepancy: b.max_abs_discrepancy,
                relative_discrepancy: b.relative_discrepancy(),
                reference_scale: b.reference_scale,
                at_point: PointOut { q1: b.at_point.q1, q2: b.at_point.q2 },
                general_value: ComplexOut { re: b.general_value.re, im: b.general_value.im },
                closed_form_value: ComplexOut {
                    re: b.closed_form_value.re,
                    im: b.closed_form_value.im,
                },
            })
            .collect(),
    }))
}
