//! Point-charge worldlines and their retarded fields.
//!
//! A worldline is parametrized by proper time `tau`. Its position is the
//! event `X(tau) = [i t; x]`, its four-velocity `U = dX/dtau = [i gamma;
//! gamma v]` satisfies `U conj(U) = -1`, and `Udot = dU/dtau`.
//!
//! For a field point `X` the retarded separation `R = X - X(tau_ret)` is
//! null (`R conj(R) = 0`) with `X` in the future of the charge, and the
//! retarded distance is `xi = -Scal(R conj(U))`, which is positive and
//! equals the ordinary distance for a charge at rest. The Liénard-Wiechert
//! potential is `A = e U / xi`.
//!
//! The constant-retarded-distance tube of radius `xi0` consists of the
//! events `X(tau) + xi0 (U + N)` where `N` runs over the unit spacelike
//! vectors orthogonal to `U`, i.e. the boosted images of `[0; n]`.

use std::f64::consts::PI;
use std::io::Read;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{norm3, Biquaternion, FourEvent, UnitTransformer};
use crate::calculus::{QuaternionField, Singularity};
use crate::error::{Error, Result};
use crate::maxwell::{self, FieldStrength, FourPotential};
use crate::quadrature::{self, Rule};

const MAX_BRACKET_STEPS: usize = 200;
/// Relative width at which bisection hands over to Newton.
const BISECTION_TOL: f64 = 1e-10;
const NEWTON_STEPS: usize = 2;
/// Field points closer than this (in retarded distance) are on the worldline.
pub const ON_WORLDLINE_XI: f64 = 1e-9;

/// Position, velocity and acceleration at one proper time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Kinematics {
    pub tau: f64,
    pub position: FourEvent,
    pub u: Biquaternion,
    pub udot: Biquaternion,
}

#[derive(Clone, Debug)]
pub enum WorldlineKind {
    Static {
        at: [f64; 3],
    },
    /// `x(t) = origin + velocity t`.
    Uniform {
        origin: [f64; 3],
        velocity: [f64; 3],
    },
    /// Circle in the plane `z = center.z`:
    /// `x(t) = center + radius (cos(omega t + phase), sin(omega t + phase), 0)`.
    Circular {
        center: [f64; 3],
        radius: f64,
        omega: f64,
        phase: f64,
    },
    Tabulated(Arc<Table>),
    /// Image of another worldline under a Lorentz transformation.
    Transformed {
        inner: Box<Worldline>,
        transformer: UnitTransformer,
    },
}

#[derive(Clone, Debug)]
pub struct Worldline {
    kind: WorldlineKind,
    pub charge: f64,
}

fn lorentz_gamma(speed: f64) -> f64 {
    1.0 / (1.0 - speed * speed).sqrt()
}

fn four_velocity(gamma: f64, dx_dtau: [f64; 3]) -> Biquaternion {
    Biquaternion::new(
        Complex64::new(0.0, gamma),
        dx_dtau.map(|c| Complex64::new(c, 0.0)),
    )
}

impl Worldline {
    pub fn stationary(at: [f64; 3], charge: f64) -> Self {
        Self {
            kind: WorldlineKind::Static { at },
            charge,
        }
    }

    pub fn uniform(origin: [f64; 3], velocity: [f64; 3], charge: f64) -> Result<Self> {
        let speed = norm3(&velocity);
        if !(speed < 1.0) {
            return Err(Error::InvalidWorldline(format!(
                "speed {speed} is not below 1"
            )));
        }
        Ok(Self {
            kind: WorldlineKind::Uniform { origin, velocity },
            charge,
        })
    }

    pub fn circular(
        center: [f64; 3],
        radius: f64,
        omega: f64,
        phase: f64,
        charge: f64,
    ) -> Result<Self> {
        let speed = (radius * omega).abs();
        if !(speed < 1.0) || radius < 0.0 {
            return Err(Error::InvalidWorldline(format!(
                "circular speed {speed} is not below 1 (radius {radius}, omega {omega})"
            )));
        }
        Ok(Self {
            kind: WorldlineKind::Circular {
                center,
                radius,
                omega,
                phase,
            },
            charge,
        })
    }

    pub fn tabulated(table: Table, charge: f64) -> Self {
        Self {
            kind: WorldlineKind::Tabulated(Arc::new(table)),
            charge,
        }
    }

    /// Reads `tau,t,x,y,z` rows (with a header line).
    pub fn from_csv<R: Read>(reader: R, charge: f64) -> Result<Self> {
        Ok(Self::tabulated(Table::from_csv(reader)?, charge))
    }

    /// This worldline seen after applying `transformer` to every event.
    pub fn transformed(&self, transformer: UnitTransformer) -> Self {
        Self {
            kind: WorldlineKind::Transformed {
                inner: Box::new(self.clone()),
                transformer,
            },
            charge: self.charge,
        }
    }

    pub fn kind(&self) -> &WorldlineKind {
        &self.kind
    }

    pub fn kind_label(&self) -> &'static str {
        match self.kind {
            WorldlineKind::Static { .. } => "static",
            WorldlineKind::Uniform { .. } => "uniform",
            WorldlineKind::Circular { .. } => "circular",
            WorldlineKind::Tabulated(_) => "tabulated",
            WorldlineKind::Transformed { .. } => "transformed",
        }
    }

    /// Proper-time interval on which the worldline is defined.
    pub fn domain(&self) -> (f64, f64) {
        match &self.kind {
            WorldlineKind::Tabulated(table) => table.domain(),
            WorldlineKind::Transformed { inner, .. } => inner.domain(),
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    pub fn kinematics(&self, tau: f64) -> Kinematics {
        match &self.kind {
            WorldlineKind::Static { at } => Kinematics {
                tau,
                position: FourEvent::new(tau, *at),
                u: four_velocity(1.0, [0.0; 3]),
                udot: Biquaternion::ZERO,
            },
            WorldlineKind::Uniform { origin, velocity } => {
                let gamma = lorentz_gamma(norm3(velocity));
                let t = gamma * tau;
                Kinematics {
                    tau,
                    position: FourEvent::new(
                        t,
                        std::array::from_fn(|k| origin[k] + velocity[k] * t),
                    ),
                    u: four_velocity(gamma, velocity.map(|v| gamma * v)),
                    udot: Biquaternion::ZERO,
                }
            }
            WorldlineKind::Circular {
                center,
                radius,
                omega,
                phase,
            } => {
                let gamma = lorentz_gamma(radius * omega);
                let t = gamma * tau;
                let angle = omega * t + phase;
                let (s, c) = angle.sin_cos();
                let speed = radius * omega * gamma;
                let accel = -radius * omega * omega * gamma * gamma;
                Kinematics {
                    tau,
                    position: FourEvent::new(
                        t,
                        [center[0] + radius * c, center[1] + radius * s, center[2]],
                    ),
                    u: four_velocity(gamma, [-speed * s, speed * c, 0.0]),
                    udot: four_velocity(0.0, [accel * c, accel * s, 0.0]),
                }
            }
            WorldlineKind::Tabulated(table) => table.kinematics(tau),
            WorldlineKind::Transformed { inner, transformer } => {
                let k = inner.kinematics(tau);
                Kinematics {
                    tau,
                    position: transformer.transform(&k.position),
                    u: transformer.apply(&k.u),
                    udot: transformer.apply(&k.udot),
                }
            }
        }
    }

    /// Max of `|U conj(U) + 1|` over `taus`.
    pub fn normalization_residual(&self, taus: &[f64]) -> f64 {
        taus.iter()
            .map(|&tau| {
                let u = self.kinematics(tau).u;
                ((u * u.conj()).s + 1.0).norm()
            })
            .fold(0.0, f64::max)
    }

    /// Max of `|Re Scal(Udot conj(U))|` over `taus`.
    pub fn orthogonality_residual(&self, taus: &[f64]) -> f64 {
        taus.iter()
            .map(|&tau| {
                let k = self.kinematics(tau);
                (k.udot * k.u.conj()).s.re.abs()
            })
            .fold(0.0, f64::max)
    }

    /// A proper time whose coordinate time is not before `t`.
    fn tau_not_before(&self, t: f64) -> Result<f64> {
        let (lo, hi) = self.domain();
        let mut tau = 0.0f64.clamp(lo, hi);
        for _ in 0..MAX_BRACKET_STEPS {
            let deficit = t - self.kinematics(tau).position.t;
            if deficit <= 0.0 {
                return Ok(tau);
            }
            if tau >= hi {
                return Err(Error::BracketFailure(format!(
                    "field time {t} is beyond the worldline domain"
                )));
            }
            // dt/dtau >= 1, so stepping by the deficit reaches t
            tau = (tau + deficit).min(hi);
        }
        Err(Error::BracketFailure("no upper bracket".into()))
    }

    /// Past-light-cone intersection for the field point `x`.
    pub fn retarded_frame(&self, x: &FourEvent) -> Result<RetardedFrame> {
        let cone = |tau: f64| {
            let k = self.kinematics(tau);
            let d = *x - k.position;
            d.t - d.spatial_norm()
        };
        let (domain_lo, _) = self.domain();
        let mut hi = self.tau_not_before(x.t)?;
        let f_hi = cone(hi);
        if f_hi > 0.0 {
            return Err(Error::BracketFailure(
                "field point is outside the future light cone of the domain end".into(),
            ));
        }
        if f_hi == 0.0 {
            return self.frame_at(x, hi);
        }
        let mut step = self.kinematics(hi).position.t - x.t;
        step = step
            .max((*x - self.kinematics(hi).position).spatial_norm())
            .max(1e-6);
        let mut lo = hi - step;
        let mut steps = 0;
        loop {
            if lo < domain_lo {
                lo = domain_lo;
                if cone(lo) <= 0.0 {
                    return Err(Error::BracketFailure(
                        "worldline domain exhausted before the light cone".into(),
                    ));
                }
                break;
            }
            if cone(lo) > 0.0 {
                break;
            }
            hi = lo;
            step *= 2.0;
            lo = hi - step;
            steps += 1;
            if steps > MAX_BRACKET_STEPS {
                return Err(Error::BracketFailure("no lower bracket".into()));
            }
        }
        let scale = hi.abs().max(lo.abs()).max(1.0);
        while hi - lo > BISECTION_TOL * scale {
            let mid = 0.5 * (lo + hi);
            if cone(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let slack = BISECTION_TOL * scale;
        let mut tau = 0.5 * (lo + hi);
        for _ in 0..NEWTON_STEPS {
            let k = self.kinematics(tau);
            let d = *x - k.position;
            let r = d.spatial_norm();
            let f = d.t - r;
            // df/dtau = -dt/dtau + (r_hat . dx/dtau)
            let slope = -k.u.s.im + (0..3).map(|i| d.x[i] * k.u.v[i].re).sum::<f64>() / r;
            if f == 0.0 || !slope.is_finite() || slope == 0.0 {
                break;
            }
            let next = tau - f / slope;
            if next < lo - slack || next > hi + slack {
                break;
            }
            tau = next;
        }
        self.frame_at(x, tau)
    }

    fn frame_at(&self, x: &FourEvent, tau: f64) -> Result<RetardedFrame> {
        let k = self.kinematics(tau);
        let r = x.to_biquaternion() - k.position.to_biquaternion();
        let xi = -(r * k.u.conj()).s.re;
        if !(xi >= ON_WORLDLINE_XI) {
            return Err(Error::OnWorldline { xi });
        }
        Ok(RetardedFrame {
            tau_ret: tau,
            r,
            u: k.u,
            udot: k.udot,
            xi,
        })
    }

    /// `e U(tau_ret) / xi` in the form `[i phi; A]`.
    pub fn lw_potential(&self, x: &FourEvent) -> Result<Biquaternion> {
        let frame = self.retarded_frame(x)?;
        Ok(frame.u * (self.charge / frame.xi))
    }

    /// The Liénard-Wiechert potential as a field, singular where the
    /// retarded distance vanishes. Points where the retarded solve fails
    /// evaluate to NaN.
    pub fn potential_field(&self) -> FourPotential {
        let w = self.clone();
        let w_dist = self.clone();
        let field = QuaternionField::new(format!("lw[{}]", self.kind_label()), move |x| {
            w.lw_potential(x)
                .unwrap_or(Biquaternion::scalar(Complex64::new(f64::NAN, f64::NAN)))
        })
        .with_singularity(Singularity::Custom {
            label: "worldline".into(),
            distance: Arc::new(move |x| w_dist.retarded_frame(x).map_or(0.0, |f| f.xi)),
        });
        FourPotential::new(field, "lorenz")
    }

    /// Retarded field strength, by central differences of the potential.
    pub fn field_strength(&self, h: f64) -> FieldStrength {
        FieldStrength::from_potential(&self.potential_field(), h)
    }

    /// `nabla-bar ^ A` of the Liénard-Wiechert potential at `x`.
    pub fn lw_field(&self, x: &FourEvent, h: f64) -> Result<Biquaternion> {
        self.retarded_frame(x)?;
        maxwell::field_from_potential(&self.potential_field(), x, h)
    }
}

/// Retarded kinematics of a worldline seen from one field point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RetardedFrame {
    pub tau_ret: f64,
    /// `X - X(tau_ret)`, null.
    pub r: Biquaternion,
    pub u: Biquaternion,
    pub udot: Biquaternion,
    pub xi: f64,
}

impl RetardedFrame {
    /// `|R conj(R)|`.
    pub fn null_residual(&self) -> f64 {
        (self.r * self.r.conj()).s.norm()
    }
}

pub fn retarded_frame(w: &Worldline, x: &FourEvent) -> Result<RetardedFrame> {
    w.retarded_frame(x)
}

pub fn lw_potential(w: &Worldline, x: &FourEvent) -> Result<Biquaternion> {
    w.lw_potential(x)
}

pub fn lw_field(w: &Worldline, x: &FourEvent, h: f64) -> Result<Biquaternion> {
    w.lw_field(x, h)
}

/// Natural cubic spline through `(tau, t, x, y, z)` samples.
#[derive(Clone, Debug)]
pub struct Table {
    tau: Vec<f64>,
    coords: [Spline; 4],
}

#[derive(Clone, Debug)]
struct Spline {
    y: Vec<f64>,
    /// Second derivatives at the knots.
    m: Vec<f64>,
}

impl Spline {
    fn natural(x: &[f64], y: &[f64]) -> Self {
        let n = x.len();
        let mut m = vec![0.0; n];
        if n > 2 {
            // Thomas algorithm on the interior knots.
            let mut c = vec![0.0; n];
            let mut d = vec![0.0; n];
            for i in 1..n - 1 {
                let (h0, h1) = (x[i] - x[i - 1], x[i + 1] - x[i]);
                let a = h0 / 6.0;
                let b = (h0 + h1) / 3.0;
                let cc = h1 / 6.0;
                let rhs = (y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0;
                let denom = b - a * c[i - 1];
                c[i] = cc / denom;
                d[i] = (rhs - a * d[i - 1]) / denom;
            }
            for i in (1..n - 1).rev() {
                m[i] = d[i] - c[i] * m[i + 1];
            }
        }
        Self { y: y.to_vec(), m }
    }

    /// Value, first and second derivative on segment `i`.
    fn eval(&self, x: &[f64], i: usize, at: f64) -> (f64, f64, f64) {
        let h = x[i + 1] - x[i];
        let (a, b) = ((x[i + 1] - at) / h, (at - x[i]) / h);
        let (m0, m1) = (self.m[i], self.m[i + 1]);
        let (y0, y1) = (self.y[i], self.y[i + 1]);
        let value = a * y0 + b * y1 + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0;
        let slope =
            (y1 - y0) / h - (3.0 * a * a - 1.0) * h * m0 / 6.0 + (3.0 * b * b - 1.0) * h * m1 / 6.0;
        let curvature = a * m0 + b * m1;
        (value, slope, curvature)
    }
}

#[derive(Debug, Deserialize)]
struct TableRow {
    tau: f64,
    t: f64,
    x: f64,
    y: f64,
    z: f64,
}

impl Table {
    /// Rows are `(tau, [t, x, y, z])` with strictly increasing `tau`.
    pub fn new(rows: &[(f64, [f64; 4])]) -> Result<Self> {
        if rows.len() < 4 {
            return Err(Error::InvalidWorldline(format!(
                "tabulated worldline needs at least 4 samples, got {}",
                rows.len()
            )));
        }
        if rows.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(Error::InvalidWorldline(
                "tau must be strictly increasing".into(),
            ));
        }
        if rows.windows(2).any(|w| !(w[1].1[0] > w[0].1[0])) {
            return Err(Error::InvalidWorldline(
                "t must be strictly increasing".into(),
            ));
        }
        let tau: Vec<f64> = rows.iter().map(|r| r.0).collect();
        let coords = std::array::from_fn(|c| {
            let y: Vec<f64> = rows.iter().map(|r| r.1[c]).collect();
            Spline::natural(&tau, &y)
        });
        Ok(Self { tau, coords })
    }

    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut rows = Vec::new();
        for (i, rec) in rdr.deserialize::<TableRow>().enumerate() {
            let r = rec.map_err(|e| Error::InvalidWorldline(format!("row {}: {e}", i + 1)))?;
            rows.push((r.tau, [r.t, r.x, r.y, r.z]));
        }
        Self::new(&rows)
    }

    /// Samples `w` at `n` equally spaced proper times on `[lo, hi]`.
    pub fn sample(w: &Worldline, lo: f64, hi: f64, n: usize) -> Result<Self> {
        let rows: Vec<(f64, [f64; 4])> = (0..n)
            .map(|i| {
                let tau = lo + (hi - lo) * i as f64 / (n.max(2) - 1) as f64;
                (tau, w.kinematics(tau).position.coords())
            })
            .collect();
        Self::new(&rows)
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.tau[0], self.tau[self.tau.len() - 1])
    }

    fn kinematics(&self, tau: f64) -> Kinematics {
        let n = self.tau.len();
        let seg = match self.tau.partition_point(|&k| k <= tau) {
            0 => 0,
            p if p >= n => n - 2,
            p => p - 1,
        };
        let e: [(f64, f64, f64); 4] =
            std::array::from_fn(|c| self.coords[c].eval(&self.tau, seg, tau));
        Kinematics {
            tau,
            position: FourEvent::new(e[0].0, [e[1].0, e[2].0, e[3].0]),
            u: Biquaternion::new(
                Complex64::new(0.0, e[0].1),
                [e[1].1, e[2].1, e[3].1].map(|c| Complex64::new(c, 0.0)),
            ),
            udot: Biquaternion::new(
                Complex64::new(0.0, e[0].2),
                [e[1].2, e[2].2, e[3].2].map(|c| Complex64::new(c, 0.0)),
            ),
        }
    }
}

/// One tube sample: the event, the unit spacelike normal `N`, and the
/// rest-frame area weight (`xi0^2 dOmega`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TubePoint {
    pub event: FourEvent,
    pub normal: Biquaternion,
    pub area_weight: f64,
    /// Rest-frame direction of the sample.
    pub direction: [f64; 3],
}

/// The tube cross-section at one proper time.
#[derive(Clone, Debug, PartialEq)]
pub struct TubeSlice {
    pub kinematics: Kinematics,
    /// Quadrature weight in proper time.
    pub tau_weight: f64,
    pub points: Vec<TubePoint>,
}

impl TubeSlice {
    /// Total 2-measure of the cross-section, `4 pi xi0^2`.
    pub fn area(&self) -> f64 {
        self.points.iter().map(|p| p.area_weight).sum()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TubePatch {
    pub xi0: f64,
    pub tau_range: (f64, f64),
    pub slices: Vec<TubeSlice>,
}

impl TubePatch {
    pub fn points(&self) -> impl Iterator<Item = &TubePoint> {
        self.slices.iter().flat_map(|s| s.points.iter())
    }
}

/// `(n_tau, n_theta, n_phi)`: Gauss-Legendre in `tau` and `cos(theta)`,
/// equally spaced in `phi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TubeResolution {
    pub n_tau: usize,
    pub n_theta: usize,
    pub n_phi: usize,
}

impl Default for TubeResolution {
    fn default() -> Self {
        Self {
            n_tau: 8,
            n_theta: 16,
            n_phi: 32,
        }
    }
}

/// Samples the constant-retarded-distance tube `xi = xi0` over `tau_range`.
pub fn weiss_tube_patch(
    w: &Worldline,
    xi0: f64,
    tau_range: (f64, f64),
    resolution: TubeResolution,
) -> Result<TubePatch> {
    if !(xi0 > 0.0) {
        return Err(Error::NonPositive {
            name: "xi0",
            value: xi0,
        });
    }
    if resolution.n_phi == 0 {
        return Err(Error::QuadratureUnderflow("n_phi must be positive".into()));
    }
    let (lo, hi) = w.domain();
    if tau_range.0 < lo || tau_range.1 > hi {
        return Err(Error::InvalidWorldline(format!(
            "tau range {tau_range:?} is outside the worldline domain ({lo}, {hi})"
        )));
    }
    let taus = quadrature::nodes(Rule::Gauss, resolution.n_tau, tau_range.0, tau_range.1)?;
    let mus = quadrature::nodes(Rule::Gauss, resolution.n_theta, -1.0, 1.0)?;
    let dphi = 2.0 * PI / resolution.n_phi as f64;
    let slices = taus
        .par_iter()
        .map(|&(tau, tau_weight)| {
            let k = w.kinematics(tau);
            let boost = UnitTransformer::rest_to(&k.u);
            let mut points = Vec::with_capacity(mus.len() * resolution.n_phi);
            for &(mu, mu_weight) in &mus {
                let sin_theta = (1.0 - mu * mu).max(0.0).sqrt();
                for j in 0..resolution.n_phi {
                    let phi = (j as f64 + 0.5) * dphi;
                    let n = [sin_theta * phi.cos(), sin_theta * phi.sin(), mu];
                    let normal = boost.apply(&Biquaternion::real(0.0, n));
                    let r = (k.u + normal) * xi0;
                    let event = FourEvent::from_biquaternion(&(k.position.to_biquaternion() + r));
                    points.push(TubePoint {
                        event,
                        normal,
                        area_weight: xi0 * xi0 * mu_weight * dphi,
                        direction: n,
                    });
                }
            }
            TubeSlice {
                kinematics: k,
                tau_weight,
                points,
            }
        })
        .collect();
    Ok(TubePatch {
        xi0,
        tau_range,
        slices,
    })
}

/// `k U - (2/3) i e^2 Udot`.
pub fn canonical_momentum(u: &Biquaternion, udot: &Biquaternion, k: f64, e: f64) -> Biquaternion {
    *u * k - *udot * Complex64::new(0.0, 2.0 / 3.0 * e * e)
}

/// `2hc/e^2 = 4 pi / alpha` and the heavy-to-light mass ratio `(3/2)/alpha`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CouplingRatios {
    pub two_hc_over_e2: f64,
    pub mass_ratio: f64,
}

/// CODATA 2018 fine-structure constant.
pub const FINE_STRUCTURE: f64 = 1.0 / 137.035999;

pub fn coupling_ratios(alpha: f64) -> Result<CouplingRatios> {
    if !(alpha > 0.0) {
        return Err(Error::NonPositive {
            name: "alpha",
            value: alpha,
        });
    }
    Ok(CouplingRatios {
        two_hc_over_e2: 4.0 * PI / alpha,
        mass_ratio: 1.5 / alpha,
    })
}
