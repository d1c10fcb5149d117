//! Spectral properties of the discretized surface Hamiltonian.

use nalgebra::DVector;
use num_complex::Complex64;

use thinlayer::em::{torus_vector_potential, FieldConfig};
use thinlayer::geometry::{
    builtin_chart, curvature, fundamental_forms, BuiltinSurface, ChartPoint, SurfaceChart,
};
use thinlayer::potentials::{
    geometric_potential, hprime_coefficients_at, PhysicalScale, ThicknessParams,
};
use thinlayer::solver::{
    assemble_h0, assemble_hprime, convergence_study, lowest_eigenpairs, EigenOptions, GridSpec,
    SurfaceGrid,
};

const SCALE: PhysicalScale = PhysicalScale { kinetic_coeff: 1.0, charge_coeff: 1.0 };

fn torus_chart() -> SurfaceChart {
    builtin_chart(BuiltinSurface::Torus { minor_radius: 10.0, major_radius: 20.0 }).unwrap()
}

fn geometric_potential_of(chart: &SurfaceChart, p: ChartPoint) -> f64 {
    geometric_potential(&curvature(&fundamental_forms(chart, p).unwrap()), &SCALE)
}

#[test]
fn hermiticity_deviation_stays_at_roundoff_across_grid_sizes() {
    let chart = torus_chart();
    for n in [8, 16, 24, 32] {
        let grid = SurfaceGrid::sample(&chart, GridSpec::new(n, n).unwrap()).unwrap();
        let v: Vec<f64> = grid.points().iter().map(|&p| geometric_potential_of(&chart, p)).collect();

        let free = assemble_h0(&grid, &FieldConfig::zero(), &v, &SCALE).unwrap();
        assert!(free.hermiticity_deviation() <= 1e-10, "n = {n}");

        let field = torus_vector_potential(10.0, 20.0, 1.0, 0.5).unwrap();
        let magnetic = assemble_h0(&grid, &field, &v, &SCALE).unwrap();
        assert!(magnetic.hermiticity_deviation() <= 1e-10, "n = {n} with field");
    }
}

#[test]
fn hermitian_spectra_are_real() {
    let chart = torus_chart();
    let grid = SurfaceGrid::sample(&chart, GridSpec::new(16, 16).unwrap()).unwrap();
    let field = torus_vector_potential(10.0, 20.0, 0.8, 0.3).unwrap();
    let v: Vec<f64> = grid.points().iter().map(|&p| geometric_potential_of(&chart, p)).collect();
    let h = assemble_h0(&grid, &field, &v, &SCALE).unwrap();
    let spec = lowest_eigenpairs(&h, 5, false).unwrap();
    for im in &spec.imaginary_parts {
        assert!(im.abs() <= 1e-10);
    }
}

#[test]
fn charge_conjugation_leaves_the_spectrum_unchanged() {
    // e -> -e is complex conjugation of the magnetic Schrödinger operator;
    // flipping the field sign realizes it here.
    let chart = torus_chart();
    let grid = SurfaceGrid::sample(&chart, GridSpec::new(16, 16).unwrap()).unwrap();
    let v: Vec<f64> = grid.points().iter().map(|&p| geometric_potential_of(&chart, p)).collect();

    let field = torus_vector_potential(10.0, 20.0, 1.0, 0.6).unwrap();
    let flipped = torus_vector_potential(10.0, 20.0, -1.0, -0.6).unwrap();
    let a = lowest_eigenpairs(&assemble_h0(&grid, &field, &v, &SCALE).unwrap(), 4, false).unwrap();
    let b =
        lowest_eigenpairs(&assemble_h0(&grid, &flipped, &v, &SCALE).unwrap(), 4, false).unwrap();
    for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
        assert!((x - y).abs() <= 1e-8, "{x} vs {y}");
    }
}

#[test]
fn torus_ground_state_localizes_in_the_potential_well() {
    // V_g is deepest at theta = pi (inner equator); the ground state must
    // put most of its mass there.
    let chart = torus_chart();
    let grid = SurfaceGrid::sample(&chart, GridSpec::new(32, 32).unwrap()).unwrap();
    let v: Vec<f64> = grid.points().iter().map(|&p| geometric_potential_of(&chart, p)).collect();
    let h = assemble_h0(&grid, &FieldConfig::zero(), &v, &SCALE).unwrap();
    let spec = lowest_eigenpairs(&h, 1, false).unwrap();

    let measure = h.measure();
    let ground = &spec.eigenvectors[0];
    let mut inner_mass = 0.0;
    let mut total = 0.0;
    for (i, p) in grid.points().iter().enumerate() {
        let weight = measure[i] * ground[i].norm_sqr();
        total += weight;
        if p.q1.cos() < 0.0 {
            // theta in (pi/2, 3pi/2)
            inner_mass += weight;
        }
    }
    // The well is shallow compared with the kinetic scale here, so the
    // localization is preferential rather than sharp: a uniform state
    // carries only 0.5 - 1/(2 pi) ~ 0.34 of its mass in this band.
    let fraction = inner_mass / total;
    assert!(fraction > 0.5, "inner mass fraction {fraction}");
}

#[test]
fn thickness_correction_is_reported_non_hermitian_and_symmetrizable() {
    let chart = torus_chart();
    let grid = SurfaceGrid::sample(&chart, GridSpec::new(16, 16).unwrap()).unwrap();
    let t = ThicknessParams::new(0.5);
    let field = FieldConfig::zero();
    let coeffs: Vec<_> = grid
        .points()
        .iter()
        .map(|&p| hprime_coefficients_at(grid.chart(), p, &field, t, &SCALE).unwrap())
        .collect();
    let hp = assemble_hprime(&grid, &coeffs).unwrap();
    // The raw thickness correction is not measure-Hermitian.
    assert!(hp.hermiticity_deviation() > 1e-6);

    let v: Vec<f64> = grid.points().iter().map(|&p| geometric_potential_of(&chart, p)).collect();
    let h0 = assemble_h0(&grid, &field, &v, &SCALE).unwrap();
    let total = h0.add(&hp).unwrap();
    assert!(total.hermiticity_deviation() > 1e-8);

    let sym = lowest_eigenpairs(&total, 3, true).unwrap();
    assert!(sym.discarded_antihermitian_norm.unwrap() > 0.0);
    for im in &sym.imaginary_parts {
        assert_eq!(*im, 0.0);
    }
    for r in &sym.residuals {
        assert!(*r <= 1e-8);
    }

    // Unsymmetrized general solve still reports near-real Ritz values for
    // this small perturbation.
    let raw = lowest_eigenpairs(&total, 3, false).unwrap();
    for (a, b) in sym.eigenvalues.iter().zip(&raw.eigenvalues) {
        assert!((a - b).abs() < 1e-4, "{a} vs {b}");
    }
}

#[test]
fn degenerate_flat_box_level_spans_the_fourier_subspace() {
    // The first excited level of the flat box is 4-fold degenerate; the
    // computed eigenvectors must span the same subspace as the four Fourier
    // modes (subspace angles, not vector identity).
    let l = 1.0;
    let n = 16;
    let chart = builtin_chart(BuiltinSurface::FlatBox { l1: l, l2: l }).unwrap();
    let grid = SurfaceGrid::sample(&chart, GridSpec::new(n, n).unwrap()).unwrap();
    let h = assemble_h0(&grid, &FieldConfig::zero(), &vec![0.0; grid.len()], &SCALE).unwrap();
    let spec = lowest_eigenpairs(&h, 5, false).unwrap();

    let clusters = spec.degenerate_clusters(1e-9);
    assert_eq!(clusters.len(), 2);
    assert_eq!(clusters[1].len(), 4);

    // Fourier modes exp(2 pi i (m1 q1 + m2 q2) / l), measure-normalized.
    let modes = [(1i32, 0i32), (-1, 0), (0, 1), (0, -1)];
    let total_area = l * l;
    let fourier: Vec<DVector<Complex64>> = modes
        .iter()
        .map(|&(m1, m2)| {
            DVector::from_fn(grid.len(), |i, _| {
                let p = grid.points()[i];
                let phase =
                    2.0 * std::f64::consts::PI * (m1 as f64 * p.q1 + m2 as f64 * p.q2) / l;
                Complex64::new(phase.cos(), phase.sin()) / Complex64::from(total_area.sqrt())
            })
        })
        .collect();

    // Every computed eigenvector of the cluster lies in the Fourier span:
    // the projection onto the four modes recovers the full measure norm.
    for idx in clusters[1].clone() {
        let v = &spec.eigenvectors[idx];
        let mut projected_norm_sq = 0.0;
        for mode in &fourier {
            projected_norm_sq += h.measure_inner(mode, v).norm_sqr();
        }
        assert!(
            (projected_norm_sq - 1.0).abs() < 1e-8,
            "eigenvector {idx} projection {projected_norm_sq}"
        );
    }
}

#[test]
fn torus_spectrum_self_converges_at_second_order() {
    let chart = torus_chart();
    let grids: Vec<GridSpec> =
        [16, 32, 64].iter().map(|&n| GridSpec::new(n, n).unwrap()).collect();
    let study = convergence_study(
        &chart,
        &FieldConfig::zero(),
        &|p| geometric_potential_of(&chart, p),
        &SCALE,
        &grids,
        2,
        &EigenOptions::default(),
    )
    .unwrap();

    // Cauchy sequence: refinement gaps shrink.
    let gaps = study.cauchy_gaps();
    for level in 0..2 {
        assert!(gaps[1][level] < gaps[0][level]);
    }
    let orders = study.observed_orders();
    for order in orders[0].iter().flatten() {
        assert!((order - 2.0).abs() < 0.4, "observed order {order}");
    }
}
