//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

mod common;

use std::f64::consts::PI;
use std::process::ExitCode;

use biquat_core::action::{
    action_cross_decompose, action_volume, tube_interaction_action, tube_kinetic_action, Region4D,
    TubeQuadrature,
};
use biquat_core::calculus::{
    cauchy_fueter_reconstruct, regularity_residual, Hypersurface, Operator, QuadratureSpec,
    QuaternionField,
};
use biquat_core::maxwell::{
    extract_eh, potential_catalog, source_residual, vacuum_residual, CatalogName, FieldStrength,
};
use biquat_core::quadrature::{self, Rule};
use biquat_core::worldline::{
    coupling_ratios, weiss_tube_patch, TubeResolution, Worldline, FINE_STRUCTURE,
};
use biquat_core::{
    make_transformer, minkowski_interval, Biquaternion, FourEvent, Result, ReversalVariant,
    TransformKind,
};
use common::*;
use num_complex::Complex64;
use rand::Rng;

/// A deviation and the bound it must stay under.
struct Check {
    label: &'static str,
    deviation: f64,
    tolerance: f64,
}

impl Check {
    fn new(label: &'static str, deviation: f64, tolerance: f64) -> Self {
        Self {
            label,
            deviation,
            tolerance,
        }
    }

    fn passed(&self) -> bool {
        self.deviation < self.tolerance
    }
}

fn report(id: usize, title: &str, outcome: Result<Vec<Check>>) -> bool {
    match outcome {
        Ok(checks) => {
            let passed = checks.iter().all(Check::passed);
            let detail: Vec<String> = checks
                .iter()
                .map(|c| {
                    let mark = if c.passed() { "ok" } else { "FAILED" };
                    format!(
                        "{} {:.3e} < {:.0e} {mark}",
                        c.label, c.deviation, c.tolerance
                    )
                })
                .collect();
            println!(
                "criterion {id} {title}: {} [{}]",
                if passed { "PASS" } else { "FAIL" },
                detail.join("; ")
            );
            passed
        }
        Err(e) => {
            println!("criterion {id} {title}: FAIL [error: {e}]");
            false
        }
    }
}

fn max_event_diff(a: &FourEvent, b: [f64; 4]) -> f64 {
    (0..4)
        .map(|k| (a.coords()[k] - b[k]).abs())
        .fold(0.0, f64::max)
}

fn algebra_laws() -> Result<Vec<Check>> {
    let mut r = rng(101);
    let (mut assoc, mut conj, mut rev_t, mut rev_s, mut invol, mut matrix) =
        (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..10_000 {
        let (a, b, c) = (
            random_biquaternion(&mut r),
            random_biquaternion(&mut r),
            random_biquaternion(&mut r),
        );
        let ab = a * b;
        assoc = assoc.max((ab * c).max_abs_diff(&(a * (b * c))));
        conj = conj.max(ab.conj().max_abs_diff(&(b.conj() * a.conj())));
        for (v, slot) in [
            (ReversalVariant::Transpose, &mut rev_t),
            (ReversalVariant::Starred, &mut rev_s),
        ] {
            *slot = slot.max(
                ab.reversal(v)
                    .max_abs_diff(&(b.reversal(v) * a.reversal(v))),
            );
            invol = invol.max(a.reversal(v).reversal(v).max_abs_diff(&a));
        }
        invol = invol
            .max(a.conj().conj().max_abs_diff(&a))
            .max(a.biconj().biconj().max_abs_diff(&a))
            .max(a.complex_star().complex_star().max_abs_diff(&a));
        matrix = matrix
            .max(ab.max_abs_diff(&matrix_product(&a, &b)))
            .max(ab.max_abs_diff(&from_m2(&m2_mul(&to_m2(&a), &to_m2(&b)))));
    }
    Ok(vec![
        Check::new("associativity", assoc, 1e-12),
        Check::new("conj anti-automorphism", conj, 1e-12),
        Check::new("transpose reversal", rev_t, 1e-12),
        Check::new("starred reversal", rev_s, 1e-12),
        Check::new("involutions", invol, 1e-12),
        Check::new("matrix product", matrix, 1e-12),
    ])
}

fn lorentz() -> Result<Vec<Check>> {
    let mut r = rng(102);
    let (mut additivity, mut interval, mut matrices) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..1000 {
        let n = random_unit_vector(&mut r);
        let (p1, p2) = (r.gen_range(-1.5..1.5), r.gen_range(-1.5..1.5));
        let angle = r.gen_range(-PI..PI);
        let x = FourEvent::new(
            r.gen_range(-2.0..2.0),
            std::array::from_fn(|_| r.gen_range(-2.0..2.0)),
        );
        let b1 = make_transformer(TransformKind::Boost, n, p1)?;
        let b2 = make_transformer(TransformKind::Boost, n, p2)?;
        let sum = make_transformer(TransformKind::Boost, n, p1 + p2)?;
        let rot = make_transformer(TransformKind::Rotation, n, angle)?;
        additivity = additivity.max(b1.compose(&b2).element().max_abs_diff(&sum.element()));
        let s = minkowski_interval(&x);
        for l in [b1, rot, rot.compose(&b1)] {
            interval = interval.max((minkowski_interval(&l.transform(&x)) - s).abs());
        }
        matrices = matrices
            .max(max_event_diff(
                &b1.transform(&x),
                m4_apply(&boost_matrix(n, p1), x.coords()),
            ))
            .max(max_event_diff(
                &rot.transform(&x),
                m4_apply(&rotation_matrix(n, angle), x.coords()),
            ));
    }
    Ok(vec![
        Check::new("rapidity additivity", additivity, 1e-12),
        Check::new("interval", interval, 1e-12),
        Check::new("4x4 matrices", matrices, 1e-12),
    ])
}

fn shell_probes(r: &mut impl Rng, count: usize) -> Vec<FourEvent> {
    (0..count)
        .map(|_| {
            let radius = r.gen_range(0.5..2.0);
            let mut d: [f64; 4] = std::array::from_fn(|_| r.gen_range(-1.0..1.0));
            let n = d.iter().map(|c| c * c).sum::<f64>().sqrt();
            d = d.map(|c| c * radius / n);
            FourEvent::from_coords(d)
        })
        .collect()
}

fn fueter_regularity() -> Result<Vec<Check>> {
    let mut r = rng(103);
    let kernel = QuaternionField::fueter_kernel(FourEvent::origin()).numeric_only();
    let mut probes = shell_probes(&mut r, 200);
    probes.push(FourEvent::new(0.5, [0.0; 3]));
    probes.push(FourEvent::new(0.0, [0.0, 0.0, 2.0]));
    let residual = regularity_residual(&kernel, &probes, 1e-4, Operator::EUCLIDEAN)?;
    let coarse = regularity_residual(&kernel, &probes, 2e-2, Operator::EUCLIDEAN)?;
    let fine = regularity_residual(&kernel, &probes, 1e-2, Operator::EUCLIDEAN)?;
    Ok(vec![
        Check::new("residual at h=1e-4", residual, 1e-5),
        Check::new("|halving ratio - 4|", (coarse / fine - 4.0).abs(), 0.5),
    ])
}

fn reconstruction() -> Result<Vec<Check>> {
    let quad = QuadratureSpec { nodes: 32 };
    let constant = Biquaternion::new(
        Complex64::new(0.3, -0.2),
        [
            Complex64::new(1.0, 0.5),
            Complex64::new(-0.7, 0.0),
            Complex64::new(0.2, 0.9),
        ],
    );
    let fields = [
        QuaternionField::constant(constant),
        QuaternionField::fueter_kernel(FourEvent::new(3.0, [0.0; 3])),
    ];
    let directions = [
        [0.0, 0.0, 0.0, 0.0],
        [1.0, 0.0, 0.0, 0.0],
        [0.0, -1.0, 0.0, 0.0],
        [0.0, 0.0, 0.6, 0.8],
        [0.5, 0.5, -0.5, 0.5],
    ];
    let mut worst = 0.0f64;
    for radius in [0.5, 1.0, 1.5] {
        let sphere = Hypersurface::sphere(FourEvent::origin(), radius)?;
        for field in &fields {
            for d in directions {
                let x = FourEvent::from_coords(d.map(|c| 0.4 * radius * c));
                let got = cauchy_fueter_reconstruct(field, &sphere, &x, quad)?;
                let want = field.eval(&x);
                worst = worst.max(got.max_abs_diff(&want) / want.magnitude());
            }
        }
    }
    let unit = Hypersurface::sphere(FourEvent::origin(), 1.0)?;
    let outside = cauchy_fueter_reconstruct(
        &fields[0],
        &unit,
        &FourEvent::new(0.0, [3.0, 0.0, 0.0]),
        quad,
    )?;
    Ok(vec![
        Check::new("interior relative error", worst, 1e-3),
        Check::new("exterior magnitude", outside.magnitude(), 1e-3),
    ])
}

fn maxwell_residuals() -> Result<Vec<Check>> {
    let h = 1e-4;
    let mut r = rng(105);
    let probes = probes(&mut r, 50, 2.0, 0.5);
    let plane = potential_catalog("plane-wave")?;
    let coulomb = potential_catalog("coulomb")?;
    let plane_res = vacuum_residual(
        &FieldStrength::from_potential(&plane.potential.numeric_only(), h),
        &probes,
        h,
    )?;
    let coulomb_res = vacuum_residual(
        &FieldStrength::from_potential(&coulomb.potential.numeric_only(), h),
        &probes,
        h,
    )?;
    let wire = potential_catalog("wire")?;
    let wire_probes: Vec<FourEvent> = probes
        .iter()
        .filter(|p| (p.x[0].hypot(p.x[1]) - 1.0).abs() > 0.05)
        .copied()
        .collect();
    let current = wire.current.as_ref().expect("wire has a current");
    let wire_res = source_residual(&wire.field, current, &wire_probes, h)?;
    let mut gauge = 0.0f64;
    let base = plane.potential.numeric_only();
    let field = FieldStrength::from_potential(&base, h);
    for _ in 0..100 {
        let g = GaussianGauge::random(&mut r);
        let chi = QuaternionField::new("chi", move |x| {
            Biquaternion::scalar(Complex64::new(g.value(x), 0.0))
        })
        .with_partials(move |x| {
            g.gradient(x)
                .map(|v| Biquaternion::scalar(Complex64::new(v, 0.0)))
        });
        let shifted = FieldStrength::from_potential(&base.gauge_shifted(&chi, h).numeric_only(), h);
        for p in probes.iter().take(5) {
            gauge = gauge.max(shifted.eval(p).max_abs_diff(&field.eval(p)));
        }
    }
    Ok(vec![
        Check::new("plane-wave vacuum", plane_res, 1e-5),
        Check::new("coulomb vacuum", coulomb_res, 1e-5),
        Check::new("wire source", wire_res, 1e-4),
        Check::new("gauge invariance", gauge, 1e-6),
    ])
}

/// Outward Poynting flux through a sphere of radius `big` at time `t`.
fn radiated_power(w: &Worldline, big: f64, t: f64) -> Result<f64> {
    let mus = quadrature::nodes(Rule::Gauss, 24, -1.0, 1.0)?;
    let phis = quadrature::nodes(Rule::Midpoint, 48, 0.0, 2.0 * PI)?;
    let mut total = 0.0;
    for &(mu, wmu) in &mus {
        let st = (1.0 - mu * mu).sqrt();
        for &(phi, wphi) in &phis {
            let n = [st * phi.cos(), st * phi.sin(), mu];
            let x = FourEvent::new(t, n.map(|c| c * big));
            let (e, h) = extract_eh(&w.lw_field(&x, 0.1)?)?;
            let s = [
                e[1] * h[2] - e[2] * h[1],
                e[2] * h[0] - e[0] * h[2],
                e[0] * h[1] - e[1] * h[0],
            ];
            let radial: f64 = (0..3).map(|k| s[k] * n[k]).sum();
            total += radial / (4.0 * PI) * big * big * wmu * wphi;
        }
    }
    Ok(total)
}

fn lienard_wiechert() -> Result<Vec<Check>> {
    let mut r = rng(106);
    let origin = [0.2, 0.0, -0.1];
    let v = [0.3, 0.4, -0.2];
    let uniform = Worldline::uniform(origin, v, 1.0)?;
    let mut boosted = 0.0f64;
    for x in probes(&mut r, 200, 4.0, 1.0) {
        let a = uniform.lw_potential(&x)?;
        let (phi, vec) = boosted_coulomb(1.0, origin, v, &x);
        let oracle = Biquaternion::new(
            Complex64::new(0.0, phi),
            vec.map(|c| Complex64::new(c, 0.0)),
        );
        boosted = boosted.max(a.max_abs_diff(&oracle) / phi.abs());
    }
    let circular = Worldline::circular([0.0; 3], 1.0, 0.3, 0.0, 1.0)?;
    let magnitude = |d: f64| -> Result<f64> {
        let x = FourEvent::new(d, [0.0, 0.6 * d, 0.8 * d]);
        let (e, _) = extract_eh(&circular.lw_field(&x, 1e-2)?)?;
        Ok(e.iter().map(|c| c * c).sum::<f64>().sqrt())
    };
    let ratio = magnitude(1000.0)? / magnitude(2000.0)?;
    // Slow circular orbit: |a| = R omega^2 is constant.
    let (radius, omega) = (1.0, 0.05);
    let slow = Worldline::circular([0.0; 3], radius, omega, 0.0, 1.0)?;
    let power = radiated_power(&slow, 4000.0, 4000.0)?;
    let larmor = 2.0 / 3.0 * (radius * omega * omega).powi(2);
    Ok(vec![
        Check::new("uniform vs boosted coulomb", boosted, 1e-8),
        Check::new("|far-field ratio - 2|/2", (ratio - 2.0).abs() / 2.0, 0.03),
        Check::new("larmor relative", (power - larmor).abs() / larmor, 0.05),
    ])
}

fn weiss_tube() -> Result<Vec<Check>> {
    let res = TubeResolution::default();
    let xi0 = 0.3;
    let resting = Worldline::stationary([0.1, 0.2, 0.3], 1.0);
    let patch = weiss_tube_patch(&resting, xi0, (0.0, 1.0), res)?;
    let measure = patch
        .slices
        .iter()
        .map(|s| (s.area() - 4.0 * PI * xi0 * xi0).abs())
        .fold(0.0, f64::max);
    let mut xi_dev = 0.0f64;
    let worldlines = [
        resting,
        Worldline::uniform([0.0; 3], [0.5, 0.0, 0.3], 1.0)?,
        Worldline::circular([0.0; 3], 1.0, 0.4, 0.3, 1.0)?,
    ];
    for w in &worldlines {
        for p in weiss_tube_patch(w, xi0, (0.0, 2.0), res)?.points() {
            xi_dev = xi_dev.max((w.retarded_frame(&p.event)?.xi - xi0).abs());
        }
    }
    Ok(vec![
        Check::new("slice measure - 4 pi xi0^2", measure, 1e-6),
        Check::new("retarded xi - xi0", xi_dev, 1e-8),
    ])
}

fn action() -> Result<Vec<Check>> {
    let region = Region4D::cube(
        [(0.0, 1.0), (-1.5, 1.5), (-1.5, 1.5), (-1.0, 2.0)],
        [3, 6, 6, 6],
        Rule::Gauss,
    )
    .excluding([0.0; 3], 0.4);
    let mut residue = 0.0f64;
    for name in CatalogName::ALL {
        let v = action_volume(
            &potential_catalog(name.as_str())?.field,
            &region,
            ReversalVariant::Starred,
        )?;
        residue = residue.max(v.imaginary_residue / v.value.norm().max(f64::MIN_POSITIVE));
    }
    let mut additivity = 0.0f64;
    let pairs = [
        ("coulomb", "uniform-E"),
        ("plane-wave", "uniform-H"),
        ("wire", "coulomb"),
        ("uniform-E", "plane-wave"),
    ];
    for (a, b) in pairs {
        for v in [ReversalVariant::Starred, ReversalVariant::Transpose] {
            let terms = action_cross_decompose(
                &potential_catalog(a)?.field,
                &potential_catalog(b)?.field,
                &region,
                v,
            )?;
            additivity = additivity.max(terms.additivity_error());
        }
    }
    let quad = TubeQuadrature::default();
    let resting = Worldline::stationary([0.0, 0.0, 1.0], 1.0);
    let kinetic = tube_kinetic_action(&resting, 0.5, (0.0, 1.0), &quad)?;
    let kinetic_err = (kinetic.quadrature - 1.0).abs();
    let sweep: Vec<f64> = [0.4, 0.2, 0.1]
        .iter()
        .map(|&xi| tube_kinetic_action(&resting, xi, (0.0, 1.0), &quad).map(|k| k.quadrature * xi))
        .collect::<Result<_>>()?;
    let scaling = sweep
        .iter()
        .map(|p| (p / sweep[0] - 1.0).abs())
        .fold(0.0, f64::max);

    let uniform_e = potential_catalog("uniform-E")?.potential;
    let fixed = tube_interaction_action(&resting, &uniform_e, 0.05, (0.0, 1.0), &quad)?;
    let static_conv = (fixed.value - fixed.textbook).norm() / fixed.textbook.norm();
    let surface = (fixed.surface_form + fixed.textbook).norm() / fixed.textbook.norm();

    let orbit = Worldline::circular([0.0; 3], 1.0, 0.3, 0.0, 1.0)?;
    let wave = potential_catalog("plane-wave")?.potential;
    let xis = [0.4, 0.2, 0.1, 0.05];
    let runs: Vec<_> = xis
        .iter()
        .map(|&xi| tube_interaction_action(&orbit, &wave, xi, (0.0, 1.0), &quad))
        .collect::<Result<_>>()?;
    let last = &runs[3];
    let orbit_conv = (last.value - last.textbook).norm() / last.textbook.norm();
    // Least-squares slope through the origin.
    let slope: Complex64 = runs
        .iter()
        .zip(xis)
        .map(|(r, x)| r.correction() * x)
        .sum::<Complex64>()
        / xis.iter().map(|x| x * x).sum::<f64>();
    let linearity = runs
        .iter()
        .zip(xis)
        .map(|(r, x)| (r.correction() - slope * x).norm() / (slope * x).norm())
        .fold(0.0, f64::max);
    Ok(vec![
        Check::new("starred imaginary residue", residue, 1e-10),
        Check::new("additivity", additivity, 1e-10),
        Check::new("kinetic vs e^2/(2 xi0)", kinetic_err, 0.02),
        Check::new("1/xi0 scaling", scaling, 0.02),
        Check::new("static interaction vs textbook", static_conv, 0.03),
        Check::new("static surface form vs -textbook", surface, 0.03),
        Check::new("orbit interaction vs textbook", orbit_conv, 0.03),
        Check::new("correction linearity", linearity, 1e-6),
    ])
}

fn constants() -> Result<Vec<Check>> {
    let c = coupling_ratios(FINE_STRUCTURE)?;
    Ok(vec![
        Check::new("|2hc/e^2 - 1722.0|", (c.two_hc_over_e2 - 1722.0).abs(), 0.5),
        Check::new(
            "|(3/2) hc/e^2 - 205.55|",
            (c.mass_ratio - 205.55).abs(),
            0.05,
        ),
    ])
}

fn main() -> ExitCode {
    let results = [
        report(1, "algebra laws", algebra_laws()),
        report(2, "lorentz transformations", lorentz()),
        report(3, "fueter kernel regularity", fueter_regularity()),
        report(4, "cauchy-fueter reconstruction", reconstruction()),
        report(5, "maxwell residuals", maxwell_residuals()),
        report(6, "lienard-wiechert fields", lienard_wiechert()),
        report(7, "weiss tube", weiss_tube()),
        report(8, "action", action()),
        report(9, "coupling constants", constants()),
    ];
    let failed = results.iter().filter(|p| !**p).count();
    println!(
        "acceptance: {} of {} criteria passed",
        results.len() - failed,
        results.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
