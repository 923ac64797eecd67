use std::f64::consts::PI;
use std::fs::File;

use biquat_core::action::{
    action_cross_decompose, action_volume, tube_interaction_action, tube_kinetic_action,
    ActionReport, InteractionAction, Region4D, TubeQuadrature,
};
use biquat_core::calculus::{
    cauchy_fueter_reconstruct, regularity_residual, Hypersurface, Operator, QuadratureSpec,
    QuaternionField,
};
use biquat_core::maxwell::{
    field_map, lorenz_scalar, potential_catalog, source_residual, vacuum_residual, FieldStrength,
};
use biquat_core::quadrature::Rule;
use biquat_core::worldline::{coupling_ratios, weiss_tube_patch, TubeResolution, Worldline};
use biquat_core::{
    make_transformer, minkowski_interval, Biquaternion, FourEvent, ReversalVariant, TransformKind,
};
use clap::ValueEnum;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::config::{
    GridConfig, ReconstructField, RegularityField, RunConfig, WorldlineConfig, WorldlineKind,
};
use crate::report::{CheckResult, FieldMap, Report};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    AlgebraCheck,
    Regularity,
    Reconstruct,
    MaxwellCheck,
    LwField,
    TubeAction,
    Constants,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::AlgebraCheck => "algebra-check",
            Command::Regularity => "regularity",
            Command::Reconstruct => "reconstruct",
            Command::MaxwellCheck => "maxwell-check",
            Command::LwField => "lw-field",
            Command::TubeAction => "tube-action",
            Command::Constants => "constants",
        }
    }
}

/// Problems with the run's inputs that surface only once the run starts.
#[derive(Debug, Error)]
pub enum RunError {
    #[error("cannot read worldline table {path}: {source}")]
    TableIo {
        path: String,
        source: std::io::Error,
    },
    #[error("invalid worldline: {0}")]
    Worldline(biquat_core::Error),
}

pub struct Outcome {
    pub report: Report,
    pub maps: Vec<FieldMap>,
}

/// Collects checks, turning library errors into failed checks.
#[derive(Default)]
struct Checks(Vec<CheckResult>);

impl Checks {
    fn below(&mut self, name: &str, value: biquat_core::Result<f64>, tolerance: f64) {
        self.0.push(match value {
            Ok(v) => CheckResult::below(name, v, tolerance),
            Err(e) => CheckResult::failed(name, tolerance, e),
        });
    }
}

pub fn run(command: Command, config: &RunConfig) -> Result<Outcome, RunError> {
    let mut checks = Checks::default();
    let mut maps = Vec::new();
    let (inputs, details) = match command {
        Command::AlgebraCheck => algebra_check(config, &mut checks),
        Command::Regularity => regularity(config, &mut checks),
        Command::Reconstruct => reconstruct(config, &mut checks),
        Command::MaxwellCheck => maxwell_check(config, &mut checks, &mut maps),
        Command::LwField => lw_field(config, &mut checks, &mut maps)?,
        Command::TubeAction => tube_action(config, &mut checks)?,
        Command::Constants => constants(config, &mut checks),
    };
    let mut outputs: Vec<String> = maps.iter().map(FieldMap::file_name).collect();
    outputs.push("report.json".into());
    let checks = checks.0;
    let report = Report {
        command: command.name().into(),
        seed: config.seed,
        passed: checks.iter().all(|c| c.passed),
        inputs: json!({ "variant": config.variant, "section": inputs }),
        checks,
        details,
        outputs,
    };
    Ok(Outcome { report, maps })
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_biquaternion(r: &mut impl Rng) -> Biquaternion {
    let mut c = || Complex64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0));
    Biquaternion::new(c(), [c(), c(), c()])
}

fn random_unit_vector(r: &mut impl Rng) -> [f64; 3] {
    loop {
        let v: [f64; 3] = std::array::from_fn(|_| r.gen_range(-1.0..1.0));
        let n = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        if n > 0.1 && n <= 1.0 {
            return v.map(|c| c / n);
        }
    }
}

fn algebra_check(config: &RunConfig, checks: &mut Checks) -> (Value, Value) {
    let cfg = &config.algebra;
    let tol = cfg.tolerance;
    let mut r = rng(config.seed);
    let (mut assoc, mut conj, mut reversal, mut invol) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..cfg.samples {
        let (a, b, c) = (
            random_biquaternion(&mut r),
            random_biquaternion(&mut r),
            random_biquaternion(&mut r),
        );
        let ab = a * b;
        assoc = assoc.max((ab * c).max_abs_diff(&(a * (b * c))));
        conj = conj
            .max(ab.conj().max_abs_diff(&(b.conj() * a.conj())))
            .max(ab.biconj().max_abs_diff(&(b.biconj() * a.biconj())));
        for v in [ReversalVariant::Transpose, ReversalVariant::Starred] {
            reversal = reversal.max(
                ab.reversal(v)
                    .max_abs_diff(&(b.reversal(v) * a.reversal(v))),
            );
            invol = invol.max(a.reversal(v).reversal(v).max_abs_diff(&a));
        }
        invol = invol
            .max(a.conj().conj().max_abs_diff(&a))
            .max(a.biconj().biconj().max_abs_diff(&a))
            .max(a.complex_star().complex_star().max_abs_diff(&a));
    }
    checks.below("associativity", Ok(assoc), tol);
    checks.below("conjugation reverses products", Ok(conj), tol);
    checks.below("reversal reverses products", Ok(reversal), tol);
    checks.below("involutions", Ok(invol), tol);

    let mut interval = Ok(0.0f64);
    let mut additivity = Ok(0.0f64);
    let mut inverse = Ok(0.0f64);
    for _ in 0..cfg.transforms {
        let n = random_unit_vector(&mut r);
        let (p1, p2) = (r.gen_range(-1.5..1.5), r.gen_range(-1.5..1.5));
        let angle = r.gen_range(-PI..PI);
        let x = FourEvent::new(
            r.gen_range(-2.0..2.0),
            std::array::from_fn(|_| r.gen_range(-2.0..2.0)),
        );
        let step = (|| {
            let b1 = make_transformer(TransformKind::Boost, n, p1)?;
            let b2 = make_transformer(TransformKind::Boost, n, p2)?;
            let sum = make_transformer(TransformKind::Boost, n, p1 + p2)?;
            let rot = make_transformer(TransformKind::Rotation, n, angle)?;
            let s = minkowski_interval(&x);
            let mut di = 0.0f64;
            let mut dv = 0.0f64;
            for l in [b1, rot, rot.compose(&b1)] {
                let y = l.transform(&x);
                di = di.max((minkowski_interval(&y) - s).abs());
                let back = l.inverse().transform(&y);
                dv = dv.max(
                    (0..4)
                        .map(|k| (back.coords()[k] - x.coords()[k]).abs())
                        .fold(0.0, f64::max),
                );
            }
            Ok((
                di,
                b1.compose(&b2).element().max_abs_diff(&sum.element()),
                dv,
            ))
        })();
        let merge = |acc: &mut biquat_core::Result<f64>, v: biquat_core::Result<f64>| {
            if let (Ok(a), Ok(b)) = (acc.as_ref(), v.as_ref()) {
                *acc = Ok(a.max(*b));
            } else if acc.is_ok() {
                *acc = v;
            }
        };
        merge(&mut interval, step.clone().map(|s| s.0));
        merge(&mut additivity, step.clone().map(|s| s.1));
        merge(&mut inverse, step.map(|s| s.2));
    }
    checks.below("interval preservation", interval, tol);
    checks.below("rapidity additivity", additivity, tol);
    checks.below("inverse round trip", inverse, tol);
    (to_value(cfg), Value::Null)
}

/// Points with `|x - center|` uniform in `[inner, outer]` and uniformly
/// random direction.
fn shell_probes(r: &mut impl Rng, count: usize, inner: f64, outer: f64) -> Vec<FourEvent> {
    (0..count)
        .map(|_| {
            let radius = if outer > inner {
                r.gen_range(inner..outer)
            } else {
                inner
            };
            let d = loop {
                let d: [f64; 4] = std::array::from_fn(|_| r.gen_range(-1.0..1.0));
                let n = d.iter().map(|c| c * c).sum::<f64>().sqrt();
                if n > 0.1 && n <= 1.0 {
                    break d.map(|c| c / n);
                }
            };
            FourEvent::from_coords(d.map(|c| c * radius))
        })
        .collect()
}

fn regularity(config: &RunConfig, checks: &mut Checks) -> (Value, Value) {
    let cfg = &config.regularity;
    let field = match cfg.field {
        RegularityField::FueterKernel => QuaternionField::fueter_kernel(FourEvent::origin()),
        RegularityField::Identity => QuaternionField::identity(),
        RegularityField::Constant => {
            QuaternionField::constant(Biquaternion::real(1.0, [2.0, 3.0, 4.0]))
        }
    }
    .numeric_only();
    let probes = shell_probes(
        &mut rng(config.seed),
        cfg.probes,
        cfg.inner_radius,
        cfg.outer_radius,
    );
    checks.below(
        "max |D F|",
        regularity_residual(&field, &probes, cfg.h, Operator::EUCLIDEAN),
        cfg.tolerance,
    );
    let mut details = Value::Null;
    if cfg.check_order && cfg.field == RegularityField::FueterKernel {
        let coarse_h = 0.04 * cfg.inner_radius;
        let coarse = regularity_residual(&field, &probes, coarse_h, Operator::EUCLIDEAN);
        let fine = regularity_residual(&field, &probes, coarse_h / 2.0, Operator::EUCLIDEAN);
        let ratio = coarse.and_then(|c| fine.map(|f| c / f));
        if let Ok(ratio) = ratio {
            details = json!({ "coarse_step": coarse_h, "halving_ratio": ratio });
        }
        checks.below("|halving ratio - 4|", ratio.map(|q| (q - 4.0).abs()), 0.5);
    }
    (to_value(cfg), details)
}

fn reconstruct(config: &RunConfig, checks: &mut Checks) -> (Value, Value) {
    let cfg = &config.reconstruct;
    let field = match cfg.field {
        ReconstructField::Constant => QuaternionField::constant(Biquaternion::real(
            cfg.value[0],
            [cfg.value[1], cfg.value[2], cfg.value[3]],
        )),
        ReconstructField::ExteriorKernel => {
            QuaternionField::fueter_kernel(FourEvent::from_coords(cfg.pole))
        }
    };
    let quad = QuadratureSpec { nodes: cfg.nodes };
    let center = FourEvent::from_coords(cfg.center);
    let distance = |x: &FourEvent| {
        (0..4)
            .map(|k| (x.coords()[k] - cfg.center[k]).powi(2))
            .sum::<f64>()
            .sqrt()
    };
    let mut interior: biquat_core::Result<f64> = Ok(0.0);
    let mut exterior: biquat_core::Result<f64> = Ok(0.0);
    let mut rows = Vec::new();
    for &radius in &cfg.radii {
        let points: Vec<FourEvent> = cfg
            .points
            .iter()
            .map(|d| FourEvent::from_coords(std::array::from_fn(|k| cfg.center[k] + radius * d[k])))
            .chain(std::iter::once(FourEvent::from_coords(cfg.exterior_point)))
            .collect();
        let sphere = match Hypersurface::sphere(center, radius) {
            Ok(s) => s,
            Err(e) => {
                interior = Err(e);
                break;
            }
        };
        for x in &points {
            let inside = distance(x) < radius;
            let got = match cauchy_fueter_reconstruct(&field, &sphere, x, quad) {
                Ok(g) => g,
                Err(e) => {
                    let slot = if inside { &mut interior } else { &mut exterior };
                    if slot.is_ok() {
                        *slot = Err(e);
                    }
                    continue;
                }
            };
            let (error, slot) = if inside {
                let want = field.eval(x);
                (
                    got.max_abs_diff(&want) / want.magnitude().max(f64::MIN_POSITIVE),
                    &mut interior,
                )
            } else {
                (got.magnitude(), &mut exterior)
            };
            if let Ok(worst) = slot {
                *worst = worst.max(error);
            }
            rows.push(
                json!({ "radius": radius, "point": x.coords(), "inside": inside, "error": error }),
            );
        }
    }
    checks.below("interior relative error", interior, cfg.tolerance);
    checks.below("exterior magnitude", exterior, cfg.tolerance);
    (to_value(cfg), json!({ "evaluations": rows }))
}

/// Uniform in `[-extent, extent]^4`, keeping points whose spatial distance
/// from the origin is at least `min_radius`.
fn box_probes(r: &mut impl Rng, count: usize, extent: f64, min_radius: f64) -> Vec<FourEvent> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let x: [f64; 3] = std::array::from_fn(|_| r.gen_range(-extent..extent));
        if x.iter().map(|c| c * c).sum::<f64>().sqrt() >= min_radius {
            out.push(FourEvent::new(r.gen_range(-extent..extent), x));
        }
    }
    out
}

/// Cell-centered `n^3` spatial grid on `[-extent, extent]^3` at time `t`,
/// x varying slowest.
fn grid_points(grid: &GridConfig) -> Vec<FourEvent> {
    let n = grid.points_per_axis;
    let step = 2.0 * grid.extent / n as f64;
    let coord = |i: usize| -grid.extent + (i as f64 + 0.5) * step;
    let mut out = Vec::with_capacity(n * n * n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                out.push(FourEvent::new(grid.t, [coord(i), coord(j), coord(k)]));
            }
        }
    }
    out
}

/// `chi = p(x) exp(-|x - c|^2 / w^2)` with random quadratic `p`.
#[derive(Clone, Copy)]
struct GaussianGauge {
    constant: f64,
    linear: [f64; 4],
    quadratic: [[f64; 4]; 4],
    center: [f64; 4],
    width: f64,
}

impl GaussianGauge {
    fn random(r: &mut impl Rng) -> Self {
        let mut quadratic = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in i..4 {
                let q = r.gen_range(-1.0..1.0);
                quadratic[i][j] = q;
                quadratic[j][i] = q;
            }
        }
        Self {
            constant: r.gen_range(-1.0..1.0),
            linear: std::array::from_fn(|_| r.gen_range(-1.0..1.0)),
            quadratic,
            center: std::array::from_fn(|_| r.gen_range(-0.5..0.5)),
            width: r.gen_range(0.8..2.0),
        }
    }

    fn eval(&self, x: &FourEvent) -> (f64, [f64; 4]) {
        let c = x.coords();
        let mut p = self.constant;
        let mut dp = self.linear;
        for i in 0..4 {
            p += self.linear[i] * c[i];
            for j in 0..4 {
                p += 0.5 * self.quadratic[i][j] * c[i] * c[j];
                dp[i] += self.quadratic[i][j] * c[j];
            }
        }
        let w2 = self.width * self.width;
        let d2: f64 = (0..4).map(|i| (c[i] - self.center[i]).powi(2)).sum();
        let g = (-d2 / w2).exp();
        let grad = std::array::from_fn(|i| (dp[i] - 2.0 * p * (c[i] - self.center[i]) / w2) * g);
        (p * g, grad)
    }

    fn field(self) -> QuaternionField {
        QuaternionField::new("gauge", move |x| {
            Biquaternion::scalar(Complex64::new(self.eval(x).0, 0.0))
        })
        .with_partials(move |x| {
            self.eval(x)
                .1
                .map(|g| Biquaternion::scalar(Complex64::new(g, 0.0)))
        })
    }
}

fn maxwell_check(
    config: &RunConfig,
    checks: &mut Checks,
    maps: &mut Vec<FieldMap>,
) -> (Value, Value) {
    let cfg = &config.maxwell;
    let entry = match potential_catalog(cfg.field.as_str()) {
        Ok(e) => e,
        Err(e) => {
            checks.0.push(CheckResult::failed("catalog", 0.0, e));
            return (to_value(cfg), Value::Null);
        }
    };
    let h = cfg.h;
    let mut r = rng(config.seed);
    // Keep clear of declared singular sets, where differences straddle a kink.
    let clearance = 0.05f64.max(4.0 * h);
    let probes: Vec<FourEvent> = box_probes(&mut r, cfg.probes, cfg.extent, cfg.min_radius)
        .into_iter()
        .filter(|p| {
            entry
                .field
                .field
                .singularities()
                .iter()
                .all(|s| s.distance(p) > clearance)
        })
        .collect();
    let potential = entry.potential.numeric_only();
    let derived = FieldStrength::from_potential(&potential, h);

    match &entry.current {
        None => checks.below(
            "max |nabla B|",
            vacuum_residual(&derived, &probes, h),
            cfg.tolerance,
        ),
        Some(current) => checks.below(
            "max |nabla B + 4 pi J|",
            source_residual(&derived, current, &probes, h),
            cfg.source_tolerance,
        ),
    }
    let consistency = probes
        .iter()
        .map(|p| derived.eval(p).max_abs_diff(&entry.field.eval(p)))
        .fold(0.0, f64::max);
    checks.below(
        "potential-derived field vs exact",
        Ok(consistency),
        cfg.tolerance,
    );

    let gauge_probes = &probes[..probes.len().min(5)];
    let base: Vec<Biquaternion> = gauge_probes.iter().map(|p| derived.eval(p)).collect();
    let mut gauge = 0.0f64;
    for _ in 0..cfg.gauge_samples {
        let chi = GaussianGauge::random(&mut r).field();
        let shifted =
            FieldStrength::from_potential(&potential.gauge_shifted(&chi, h).numeric_only(), h);
        for (p, b) in gauge_probes.iter().zip(&base) {
            gauge = gauge.max(shifted.eval(p).max_abs_diff(b));
        }
    }
    checks.below("gauge invariance", Ok(gauge), cfg.gauge_tolerance);

    let lorenz = probes.iter().try_fold(0.0f64, |worst, p| {
        let numeric = lorenz_scalar(&potential, p, h)?;
        Ok::<_, biquat_core::Error>(worst.max((numeric - (entry.lorenz_scalar)(p)).norm()))
    });

    if cfg.grid.points_per_axis > 0 {
        match field_map(&entry.field, &grid_points(&cfg.grid), h) {
            Ok(rows) => maps.push(FieldMap {
                name: cfg.field.as_str().to_string(),
                rows,
            }),
            Err(e) => checks.0.push(CheckResult::failed("field map", 0.0, e)),
        }
    }
    let details = json!({
        "probes_used": probes.len(),
        "lorenz_scalar_deviation": lorenz.ok(),
        "gauge": entry.potential.gauge_label,
        "reversal_asymmetry": {
            "transpose": entry.potential.reversal_asymmetry(&probes, ReversalVariant::Transpose),
            "starred": entry.potential.reversal_asymmetry(&probes, ReversalVariant::Starred),
        },
    });
    (to_value(cfg), details)
}

pub fn build_worldline(cfg: &WorldlineConfig) -> Result<Worldline, RunError> {
    match cfg.kind {
        WorldlineKind::Static => Ok(Worldline::stationary(cfg.position, cfg.charge)),
        WorldlineKind::Uniform => {
            Worldline::uniform(cfg.position, cfg.velocity, cfg.charge).map_err(RunError::Worldline)
        }
        WorldlineKind::Circular => {
            Worldline::circular(cfg.center, cfg.radius, cfg.omega, cfg.phase, cfg.charge)
                .map_err(RunError::Worldline)
        }
        WorldlineKind::Table => {
            let path = cfg
                .table
                .as_ref()
                .expect("validated: table kind has a path");
            let file = File::open(path).map_err(|source| RunError::TableIo {
                path: path.display().to_string(),
                source,
            })?;
            Worldline::from_csv(file, cfg.charge).map_err(RunError::Worldline)
        }
    }
}

fn lw_field(
    config: &RunConfig,
    checks: &mut Checks,
    maps: &mut Vec<FieldMap>,
) -> Result<(Value, Value), RunError> {
    let cfg = &config.lw_field;
    let w = build_worldline(&config.worldline)?;
    let points = grid_points(&cfg.grid);
    let inputs = json!({ "worldline": config.worldline, "lw_field": cfg });

    let frames: Vec<_> = points.iter().map(|p| w.retarded_frame(p)).collect();
    let null = frames.iter().try_fold(0.0f64, |worst, f| {
        f.as_ref()
            .map(|f| worst.max(f.null_residual()))
            .map_err(Clone::clone)
    });
    checks.below("retarded null residual", null, cfg.null_tolerance);
    // Finite differences lose accuracy near the charge.
    let checked: Vec<bool> = frames
        .iter()
        .map(|f| f.as_ref().is_ok_and(|f| f.xi >= cfg.min_xi))
        .collect();

    let field = w.field_strength(cfg.h);
    match field_map(&field, &points, cfg.h) {
        Ok(rows) => {
            let worst = rows
                .iter()
                .zip(&checked)
                .filter(|(_, &c)| c)
                .map(|(r, _)| r.residual)
                .fold(0.0, f64::max);
            checks.below("max vacuum residual", Ok(worst), cfg.residual_tolerance);
            maps.push(FieldMap {
                name: "lw".into(),
                rows,
            });
        }
        Err(e) => checks.0.push(CheckResult::failed(
            "max vacuum residual",
            cfg.residual_tolerance,
            e,
        )),
    }

    let potential = w.potential_field().numeric_only();
    let lorenz =
        points
            .iter()
            .zip(&checked)
            .filter(|(_, &c)| c)
            .try_fold(0.0f64, |worst, (p, _)| {
                Ok::<_, biquat_core::Error>(worst.max(lorenz_scalar(&potential, p, cfg.h)?.norm()))
            });
    checks.below("max |Lorenz scalar|", lorenz, cfg.lorenz_tolerance);
    let details = json!({
        "worldline": w.kind_label(),
        "points": points.len(),
        "points_checked": checked.iter().filter(|&&c| c).count(),
    });
    Ok((inputs, details))
}

/// Least-squares slope through the origin of `correction(xi0)` and the
/// worst relative departure from it.
fn linearity(runs: &[InteractionAction]) -> (Complex64, f64) {
    let slope: Complex64 = runs
        .iter()
        .map(|r| r.correction() * r.xi0)
        .sum::<Complex64>()
        / runs.iter().map(|r| r.xi0 * r.xi0).sum::<f64>();
    if slope.norm() == 0.0 {
        return (slope, 0.0);
    }
    let worst = runs
        .iter()
        .map(|r| (r.correction() - slope * r.xi0).norm() / (slope * r.xi0).norm())
        .fold(0.0, f64::max);
    (slope, worst)
}

fn tube_action(config: &RunConfig, checks: &mut Checks) -> Result<(Value, Value), RunError> {
    let cfg = &config.tube;
    let w = build_worldline(&config.worldline)?;
    let inputs = json!({ "worldline": config.worldline, "tube": cfg });
    let tau = (cfg.tau_range[0], cfg.tau_range[1]);
    let quad = TubeQuadrature {
        resolution: TubeResolution {
            n_tau: cfg.n_tau,
            n_theta: cfg.n_theta,
            n_phi: cfg.n_phi,
        },
        relative_step: cfg.relative_step,
        variant: config.variant,
    };

    let measure = weiss_tube_patch(&w, cfg.xi0, tau, quad.resolution).map(|patch| {
        patch
            .slices
            .iter()
            .map(|s| {
                (s.area() - 4.0 * PI * cfg.xi0 * cfg.xi0).abs() / (4.0 * PI * cfg.xi0 * cfg.xi0)
            })
            .fold(0.0, f64::max)
    });
    checks.below("tube slice measure vs 4 pi xi0^2", measure, 1e-6);

    let xis: Vec<f64> = std::iter::once(cfg.xi0)
        .chain(cfg.sweep.iter().copied())
        .collect();
    let kinetic: Vec<_> = xis
        .iter()
        .map(|&xi| tube_kinetic_action(&w, xi, tau, &quad))
        .collect();
    let kinetic_err = kinetic.iter().try_fold(0.0f64, |worst, k| {
        k.as_ref()
            .map(|k| worst.max(k.relative_error()))
            .map_err(Clone::clone)
    });
    checks.below(
        "kinetic vs e^2/(2 xi0) per unit tau",
        kinetic_err,
        cfg.kinetic_tolerance,
    );
    let sweep: Vec<_> = kinetic.into_iter().filter_map(Result::ok).collect();

    let external = potential_catalog(cfg.external.as_str());
    let mut runs = Vec::new();
    match &external {
        Ok(entry) => {
            for &xi in &cfg.interaction_sweep {
                match tube_interaction_action(&w, &entry.potential, xi, tau, &quad) {
                    Ok(r) => runs.push(r),
                    Err(e) => {
                        checks.0.push(CheckResult::failed(
                            "interaction",
                            cfg.interaction_tolerance,
                            e,
                        ));
                        break;
                    }
                }
            }
        }
        Err(e) => checks.0.push(CheckResult::failed(
            "interaction",
            cfg.interaction_tolerance,
            e,
        )),
    }
    let mut slope = None;
    if let Some(last) = runs.iter().min_by(|a, b| a.xi0.total_cmp(&b.xi0)) {
        let conv =
            (last.value - last.textbook).norm() / last.textbook.norm().max(f64::MIN_POSITIVE);
        checks.below(
            "interaction vs textbook at smallest xi0",
            Ok(conv),
            cfg.interaction_tolerance,
        );
        let (s, worst) = linearity(&runs);
        checks.below(
            "correction linear in xi0",
            Ok(worst),
            cfg.linearity_tolerance,
        );
        slope = Some(s);
    }

    // The volume split needs the charge to stay put inside the shell.
    let mut terms = None;
    let mut residue = 0.0;
    if config.worldline.kind == WorldlineKind::Static {
        if let Ok(entry) = &external {
            let region = Region4D::shell(
                tau,
                config.worldline.position,
                (cfg.shell_radii[0], cfg.shell_radii[1]),
                cfg.shell_nodes,
                Rule::Gauss,
            );
            let own = w.field_strength(cfg.relative_step * cfg.shell_radii[0]);
            match action_cross_decompose(&own, &entry.field, &region, config.variant) {
                Ok(t) => {
                    checks.below(
                        "decomposition additivity",
                        Ok(t.additivity_error()),
                        cfg.volume_tolerance,
                    );
                    terms = Some(t);
                }
                Err(e) => checks.0.push(CheckResult::failed(
                    "decomposition additivity",
                    cfg.volume_tolerance,
                    e,
                )),
            }
            if config.variant == ReversalVariant::Starred {
                let total = FieldStrength::superpose(1.0, &own, 1.0, &entry.field);
                let v = action_volume(&total, &region, config.variant)
                    .map(|v| v.imaginary_residue / v.value.norm().max(f64::MIN_POSITIVE));
                if let Ok(r) = &v {
                    residue = *r;
                }
                checks.below("starred imaginary residue", v, cfg.volume_tolerance);
            }
        }
    }

    let report = ActionReport {
        variant: config.variant,
        terms,
        imaginary_residue: residue,
        quadrature: quad,
        xi0_sweep: sweep,
    };
    let details = json!({
        "action": report,
        "interaction": runs,
        "correction_slope": slope,
    });
    Ok((inputs, details))
}

fn constants(config: &RunConfig, checks: &mut Checks) -> (Value, Value) {
    let cfg = &config.constants;
    let ratios = coupling_ratios(cfg.alpha);
    checks.below(
        "|2hc/e^2 - expected|",
        ratios
            .as_ref()
            .map(|c| (c.two_hc_over_e2 - cfg.two_hc_expected).abs())
            .map_err(Clone::clone),
        cfg.two_hc_tolerance,
    );
    checks.below(
        "|(3/2) hc/e^2 - expected|",
        ratios
            .as_ref()
            .map(|c| (c.mass_ratio - cfg.mass_ratio_expected).abs())
            .map_err(Clone::clone),
        cfg.mass_ratio_tolerance,
    );
    (to_value(cfg), to_value(&ratios.ok()))
}
