//! Quaternionic derivative, Fueter regularity, and numerical Cauchy-Fueter
//! reconstruction over hyperspheres.
//!
//! The derivative is `nabla F = sum_mu e_mu d_mu F` with the units acting
//! from the left. In [`Mode::Minkowski`] the time derivative is taken with
//! respect to `it`, so `d_0 = -i d/dt`; in [`Mode::Euclidean`] the point is
//! the real quaternion `[x0; x]` and `d_0 = d/dx0`. The barred operator
//! negates the vector units.
//!
//! Reconstruction uses the inward-oriented surface element together with
//! the `-1/(2 pi^2)` prefactor. Flipping both the orientation and the sign
//! of the prefactor gives the same value, so outward-oriented surfaces are
//! integrated with `+1/(2 pi^2)`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{norm3, Biquaternion, FourEvent};
use crate::error::{Error, Result};
use crate::quadrature::{self, pairwise_sum, Rule};

type EvalFn = Arc<dyn Fn(&FourEvent) -> Biquaternion + Send + Sync>;
type PartialsFn = Arc<dyn Fn(&FourEvent) -> [Biquaternion; 4] + Send + Sync>;
type DistanceFn = Arc<dyn Fn(&FourEvent) -> f64 + Send + Sync>;

/// Minimum ratio of finite-difference step to coordinate scale.
pub const MIN_RELATIVE_STEP: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Real quaternions `[x0; x]`.
    Euclidean,
    /// Events `[it; x]`, `d_0 = d/d(it)`.
    Minkowski,
}

/// `nabla` or `nabla-bar` in a given mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Operator {
    pub mode: Mode,
    pub barred: bool,
}

impl Operator {
    pub const EUCLIDEAN: Self = Self {
        mode: Mode::Euclidean,
        barred: false,
    };
    pub const MINKOWSKI: Self = Self {
        mode: Mode::Minkowski,
        barred: false,
    };
    pub const MINKOWSKI_BARRED: Self = Self {
        mode: Mode::Minkowski,
        barred: true,
    };

    /// Combine coordinate partials `d F / d c_mu` into `sum_mu e_mu d_mu F`.
    pub fn combine(&self, partials: &[Biquaternion; 4]) -> Biquaternion {
        let time = match self.mode {
            Mode::Euclidean => partials[0],
            Mode::Minkowski => partials[0] * Complex64::new(0.0, -1.0),
        };
        let sign = if self.barred { -1.0 } else { 1.0 };
        (1..=3).fold(time, |acc, k| {
            acc + Biquaternion::unit(k) * partials[k] * sign
        })
    }
}

/// Where a field is not defined.
#[derive(Clone)]
pub enum Singularity {
    Point {
        label: String,
        at: FourEvent,
    },
    /// A charge at rest: the spatial point `at` for every time.
    StaticLine {
        label: String,
        at: [f64; 3],
    },
    Custom {
        label: String,
        distance: DistanceFn,
    },
}

impl Singularity {
    pub fn static_line(label: impl Into<String>, at: [f64; 3]) -> Self {
        Singularity::StaticLine {
            label: label.into(),
            at,
        }
    }

    pub fn label(&self) -> &str {
        match self {
            Singularity::Point { label, .. }
            | Singularity::StaticLine { label, .. }
            | Singularity::Custom { label, .. } => label,
        }
    }

    /// Euclidean distance in coordinate space from `x` to the singular set.
    pub fn distance(&self, x: &FourEvent) -> f64 {
        match self {
            Singularity::Point { at, .. } => {
                let c = (*x - *at).coords();
                c.iter().map(|v| v * v).sum::<f64>().sqrt()
            }
            Singularity::StaticLine { at, .. } => {
                norm3(&[x.x[0] - at[0], x.x[1] - at[1], x.x[2] - at[2]])
            }
            Singularity::Custom { distance, .. } => distance(x),
        }
    }
}

impl fmt::Debug for Singularity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Singularity::Point { label, at } => write!(f, "Point({label}, {at:?})"),
            Singularity::StaticLine { label, at } => write!(f, "StaticLine({label}, {at:?})"),
            Singularity::Custom { label, .. } => write!(f, "Custom({label})"),
        }
    }
}

/// A biquaternion-valued function of a space-time point.
#[derive(Clone)]
pub struct QuaternionField {
    name: String,
    eval: EvalFn,
    partials: Option<PartialsFn>,
    singularities: Vec<Singularity>,
}

impl fmt::Debug for QuaternionField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("QuaternionField")
            .field("name", &self.name)
            .field("analytic", &self.partials.is_some())
            .field("singularities", &self.singularities)
            .finish()
    }
}

impl QuaternionField {
    pub fn new<F>(name: impl Into<String>, eval: F) -> Self
    where
        F: Fn(&FourEvent) -> Biquaternion + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            eval: Arc::new(eval),
            partials: None,
            singularities: Vec::new(),
        }
    }

    /// Attach exact coordinate partials `[dF/dc0, dF/dc1, dF/dc2, dF/dc3]`
    /// with `c0 = t` (or `x0`).
    pub fn with_partials<P>(mut self, partials: P) -> Self
    where
        P: Fn(&FourEvent) -> [Biquaternion; 4] + Send + Sync + 'static,
    {
        self.partials = Some(Arc::new(partials));
        self
    }

    pub fn with_singularity(mut self, singularity: Singularity) -> Self {
        self.singularities.push(singularity);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn eval(&self, x: &FourEvent) -> Biquaternion {
        (self.eval)(x)
    }

    pub fn has_analytic_partials(&self) -> bool {
        self.partials.is_some()
    }

    pub fn analytic_partials(&self, x: &FourEvent) -> Option<[Biquaternion; 4]> {
        self.partials.as_ref().map(|p| p(x))
    }

    pub fn singularities(&self) -> &[Singularity] {
        &self.singularities
    }

    /// Error if `x` is within `radius` of a declared singularity.
    pub fn check_clear(&self, x: &FourEvent, radius: f64) -> Result<()> {
        for s in &self.singularities {
            let distance = s.distance(x);
            if distance <= radius {
                return Err(Error::Singular {
                    label: s.label().to_string(),
                    distance,
                });
            }
        }
        Ok(())
    }

    /// The field without its analytic partials, so every derivative is
    /// taken by finite differences.
    pub fn numeric_only(&self) -> Self {
        Self {
            partials: None,
            ..self.clone()
        }
    }

    /// `a F + b G`, keeping analytic partials when both sides have them.
    pub fn linear_combination(a: Complex64, f: &Self, b: Complex64, g: &Self) -> Self {
        let (fe, ge) = (f.eval.clone(), g.eval.clone());
        let mut out = Self::new(format!("({a})*{} + ({b})*{}", f.name, g.name), move |x| {
            fe(x) * a + ge(x) * b
        });
        if let (Some(fp), Some(gp)) = (f.partials.clone(), g.partials.clone()) {
            out.partials = Some(Arc::new(move |x| {
                let (p, q) = (fp(x), gp(x));
                std::array::from_fn(|mu| p[mu] * a + q[mu] * b)
            }));
        }
        out.singularities = f
            .singularities
            .iter()
            .chain(g.singularities.iter())
            .cloned()
            .collect();
        out
    }

    pub fn constant(value: Biquaternion) -> Self {
        Self::new("constant", move |_| value).with_partials(|_| [Biquaternion::ZERO; 4])
    }

    /// `F(q) = q` on real quaternions (Euclidean mode).
    pub fn identity() -> Self {
        Self::new("identity", |x| Biquaternion::real(x.t, x.x))
            .with_partials(|_| std::array::from_fn(Biquaternion::unit))
    }

    /// The Fueter kernel `conj(q - c)/|q - c|^4`, regular on both sides
    /// away from `c` (Euclidean mode).
    pub fn fueter_kernel(center: FourEvent) -> Self {
        let rel = move |x: &FourEvent| {
            let d = *x - center;
            Biquaternion::real(d.t, d.x)
        };
        Self::new("fueter-kernel", move |x| fueter_kernel(&rel(x)))
            .with_partials(move |x| {
                let q = rel(x);
                let c = [q.s.re, q.v[0].re, q.v[1].re, q.v[2].re];
                let r2: f64 = c.iter().map(|v| v * v).sum();
                let inv4 = 1.0 / (r2 * r2);
                let inv6 = inv4 / r2;
                let qc = q.conj();
                std::array::from_fn(|mu| {
                    Biquaternion::unit(mu).conj() * inv4 - qc * (4.0 * c[mu] * inv6)
                })
            })
            .with_singularity(Singularity::Point {
                label: "kernel pole".into(),
                at: center,
            })
    }
}

/// `conj(q)/|q|^4` with `|q|^2 = q conj(q)`.
pub fn fueter_kernel(q: &Biquaternion) -> Biquaternion {
    let r2 = (*q * q.conj()).s;
    q.conj() * (r2 * r2).inv()
}

fn check_step(x: &FourEvent, h: f64) -> Result<()> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::NonPositive {
            name: "h",
            value: h,
        });
    }
    let scale = x.coords().iter().fold(1.0f64, |m, c| m.max(c.abs()));
    if h < MIN_RELATIVE_STEP * scale {
        return Err(Error::StepUnderflow { h, scale });
    }
    Ok(())
}

/// Second-order central-difference partials along the four coordinates.
pub fn central_partials(field: &QuaternionField, x: &FourEvent, h: f64) -> [Biquaternion; 4] {
    std::array::from_fn(|mu| {
        (field.eval(&x.shifted(mu, h)) - field.eval(&x.shifted(mu, -h))) / (2.0 * h)
    })
}

/// `sum_mu e_mu d_mu F` at `x`, using analytic partials when the field has
/// them and central differences with step `h` otherwise.
pub fn nabla(field: &QuaternionField, x: &FourEvent, h: f64, op: Operator) -> Result<Biquaternion> {
    check_step(x, h)?;
    field.check_clear(x, 2.0 * h)?;
    let partials = match field.analytic_partials(x) {
        Some(p) => p,
        None => central_partials(field, x, h),
    };
    Ok(op.combine(&partials))
}

/// Like [`nabla`] but always by central differences.
pub fn nabla_finite_difference(
    field: &QuaternionField,
    x: &FourEvent,
    h: f64,
    op: Operator,
) -> Result<Biquaternion> {
    check_step(x, h)?;
    field.check_clear(x, 2.0 * h)?;
    Ok(op.combine(&central_partials(field, x, h)))
}

/// Max over `probes` of the magnitude of `nabla F`.
pub fn regularity_residual(
    field: &QuaternionField,
    probes: &[FourEvent],
    h: f64,
    op: Operator,
) -> Result<f64> {
    if probes.is_empty() {
        return Err(Error::EmptyProbes);
    }
    probes.iter().try_fold(0.0f64, |worst, p| {
        Ok(worst.max(nabla(field, p, h, op)?.magnitude()))
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Orientation {
    Outward,
    Inward,
}

impl Orientation {
    fn sign(self) -> f64 {
        match self {
            Orientation::Outward => 1.0,
            Orientation::Inward => -1.0,
        }
    }
}

type ParamFn = Arc<dyn Fn([f64; 3]) -> FourEvent + Send + Sync>;
type MeasureFn = Arc<dyn Fn([f64; 3]) -> Biquaternion + Send + Sync>;
type ResolutionFn = Arc<dyn Fn(usize) -> f64 + Send + Sync>;

/// A closed 3-surface parametrized over the unit cube, with its
/// quaternion-valued surface element.
#[derive(Clone)]
pub struct Hypersurface {
    label: String,
    param: ParamFn,
    /// Outward element `n dS` per unit parameter volume.
    measure: MeasureFn,
    clearance: DistanceFn,
    resolution: ResolutionFn,
    pub orientation: Orientation,
}

impl fmt::Debug for Hypersurface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Hypersurface")
            .field("label", &self.label)
            .field("orientation", &self.orientation)
            .finish()
    }
}

impl Hypersurface {
    /// The 3-sphere of `radius` around `center` (Euclidean coordinates),
    /// parametrized by hyperspherical angles and oriented inward.
    pub fn sphere(center: FourEvent, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::NonPositive {
                name: "radius",
                value: radius,
            });
        }
        let normal = |u: [f64; 3]| {
            let (psi, theta, phi) = (PI * u[0], PI * u[1], 2.0 * PI * u[2]);
            let (sp, st) = (psi.sin(), theta.sin());
            (
                [
                    psi.cos(),
                    sp * theta.cos(),
                    sp * st * phi.cos(),
                    sp * st * phi.sin(),
                ],
                sp * sp * st,
            )
        };
        let jacobian = radius.powi(3) * 2.0 * PI * PI * PI;
        Ok(Self {
            label: format!("sphere(r={radius})"),
            param: Arc::new(move |u| {
                let (n, _) = normal(u);
                FourEvent::from_coords(std::array::from_fn(|k| center.coords()[k] + radius * n[k]))
            }),
            measure: Arc::new(move |u| {
                let (n, w) = normal(u);
                Biquaternion::real(n[0], [n[1], n[2], n[3]]) * (w * jacobian)
            }),
            clearance: Arc::new(move |x| {
                let d = (*x - center).coords();
                (d.iter().map(|v| v * v).sum::<f64>().sqrt() - radius).abs()
            }),
            resolution: Arc::new(move |n| radius * PI / n as f64),
            orientation: Orientation::Inward,
        })
    }

    pub fn with_orientation(mut self, orientation: Orientation) -> Self {
        self.orientation = orientation;
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn point(&self, u: [f64; 3]) -> FourEvent {
        (self.param)(u)
    }

    /// Oriented element `dSigma` per unit parameter volume.
    pub fn element(&self, u: [f64; 3]) -> Biquaternion {
        (self.measure)(u) * self.orientation.sign()
    }

    /// Distance from `x` to the surface.
    pub fn clearance(&self, x: &FourEvent) -> f64 {
        (self.clearance)(x)
    }

    /// Node spacing of an `n`-per-axis rule.
    pub fn resolution(&self, nodes: usize) -> f64 {
        (self.resolution)(nodes)
    }

    /// Product Gauss-Legendre integral of `integrand(point, dSigma)` over
    /// the parameter cube. Slabs along the first axis run in parallel;
    /// their sums are reduced pairwise in slab order.
    pub fn integrate<F>(&self, nodes: usize, integrand: F) -> Result<Biquaternion>
    where
        F: Fn(&FourEvent, &Biquaternion) -> Biquaternion + Sync,
    {
        let rule = quadrature::nodes(Rule::Gauss, nodes, 0.0, 1.0)?;
        let slabs: Vec<Biquaternion> = rule
            .par_iter()
            .map(|&(u0, w0)| {
                let mut terms = Vec::with_capacity(rule.len() * rule.len());
                for &(u1, w1) in &rule {
                    for &(u2, w2) in &rule {
                        let u = [u0, u1, u2];
                        let y = self.point(u);
                        terms.push(integrand(&y, &self.element(u)) * (w0 * w1 * w2));
                    }
                }
                pairwise_sum(&terms)
            })
            .collect();
        Ok(pairwise_sum(&slabs))
    }

    /// Sum of `|dSigma|` over the surface; `2 pi^2 r^3` for a sphere.
    pub fn total_measure(&self, nodes: usize) -> Result<f64> {
        Ok(self
            .integrate(nodes, |_, d| Biquaternion::real(d.magnitude(), [0.0; 3]))?
            .s
            .re)
    }
}

/// Quadrature settings for surface integrals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    /// Gauss-Legendre nodes per parameter axis.
    pub nodes: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { nodes: 32 }
    }
}

/// `F(X) = (-1/(2 pi^2)) oint conj(R)/|R|^4 dSigma F(Y)`, `R = Y - X`, for
/// `F` left-regular inside `surface` (Euclidean mode). Returns zero for
/// exterior `X`, up to quadrature error.
pub fn cauchy_fueter_reconstruct(
    field: &QuaternionField,
    surface: &Hypersurface,
    x: &FourEvent,
    quad: QuadratureSpec,
) -> Result<Biquaternion> {
    if quad.nodes == 0 {
        return Err(Error::QuadratureUnderflow("zero nodes per axis".into()));
    }
    let resolution = surface.resolution(quad.nodes);
    let clearance = surface.clearance(x);
    if clearance < resolution {
        return Err(Error::OnSurface {
            clearance,
            resolution,
        });
    }
    let origin = Biquaternion::real(x.t, x.x);
    let integral = surface.integrate(quad.nodes, |y, d_sigma| {
        let r = Biquaternion::real(y.t, y.x) - origin;
        fueter_kernel(&r) * *d_sigma * field.eval(y)
    })?;
    if !integral.is_finite() {
        return Err(Error::QuadratureUnderflow(
            "non-finite surface integral".into(),
        ));
    }
    let prefactor = match surface.orientation {
        Orientation::Inward => -1.0,
        Orientation::Outward => 1.0,
    } / (2.0 * PI * PI);
    Ok(integral * prefactor)
}
