//! Four-potentials, field strengths and Maxwell residuals in quaternion
//! form (Gaussian units, `c = 1`).
//!
//! Potentials and currents have the event form `A = [i phi; A]`,
//! `J = [i rho; j]`. The field strength is the vector part of
//! `nabla-bar A`, which expands to
//!
//! ```text
//! nabla-bar A = [ d_t phi + div A ; -H + i E ]
//! ```
//!
//! so a field sample `[0; w]` carries `E = Im w` and `H = -Re w`. This is
//! `i [0; E + iH]`; [`extract_eh`] and [`pack_eh`] are the only places that
//! convert. With that dictionary
//!
//! ```text
//! nabla B = [ div H - i div E ; (d_t E - curl H) + i (d_t H + curl E) ]
//! ```
//!
//! and `nabla B = -4 pi J` is the full set of Maxwell equations.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{norm3, Biquaternion, FourEvent, ReversalVariant};
use crate::calculus::{self, nabla, Operator, QuaternionField, Singularity};
use crate::error::{Error, Result};

/// Scalar parts below this count as zero for bivector checks.
pub const BIVECTOR_TOL: f64 = 1e-12;

/// A potential `[i phi; A]` with real `phi`, `A`.
#[derive(Clone, Debug)]
pub struct FourPotential {
    pub field: QuaternionField,
    pub gauge_label: String,
}

impl FourPotential {
    pub fn new(field: QuaternionField, gauge_label: impl Into<String>) -> Self {
        Self {
            field,
            gauge_label: gauge_label.into(),
        }
    }

    pub fn eval(&self, x: &FourEvent) -> Biquaternion {
        self.field.eval(x)
    }

    /// Copy whose derivatives are always finite differences.
    pub fn numeric_only(&self) -> FourPotential {
        FourPotential::new(self.field.numeric_only(), self.gauge_label.clone())
    }

    /// Largest violation of the `[i phi; A]` form over `probes`.
    pub fn form_residual(&self, probes: &[FourEvent]) -> f64 {
        probes
            .iter()
            .map(|p| FourEvent::form_residual(&self.eval(p)))
            .fold(0.0, f64::max)
    }

    /// Largest `|A - A~|` over `probes`. Zero when the potential is fixed by
    /// the chosen reversal; reported, never enforced.
    pub fn reversal_asymmetry(&self, probes: &[FourEvent], variant: ReversalVariant) -> f64 {
        probes
            .iter()
            .map(|p| {
                let a = self.eval(p);
                a.max_abs_diff(&a.reversal(variant))
            })
            .fold(0.0, f64::max)
    }

    /// `A + nabla chi` for a real scalar gauge function `chi` (stored as the
    /// scalar part of `chi_field`). Uses the unbarred gradient
    /// `[-i d_t chi; grad chi]`, which shifts `phi -> phi - d_t chi`.
    pub fn gauge_shifted(&self, chi_field: &QuaternionField, h: f64) -> FourPotential {
        let (a, chi) = (self.field.clone(), chi_field.clone());
        let mut shifted =
            QuaternionField::new(format!("{}+grad({})", a.name(), chi.name()), move |x| {
                let partials = chi
                    .analytic_partials(x)
                    .unwrap_or_else(|| calculus::central_partials(&chi, x, h));
                a.eval(x) + Operator::MINKOWSKI.combine(&partials)
            });
        for s in self.field.singularities() {
            shifted = shifted.with_singularity(s.clone());
        }
        FourPotential::new(shifted, format!("{}+gauge", self.gauge_label))
    }
}

/// A scalar-free field `[0; -H + iE]`.
#[derive(Clone, Debug)]
pub struct FieldStrength {
    pub field: QuaternionField,
}

impl FieldStrength {
    pub fn eval(&self, x: &FourEvent) -> Biquaternion {
        self.field.eval(x)
    }

    /// Field of `potential`, differentiated analytically when possible and
    /// with central differences of step `h` otherwise.
    pub fn from_potential(potential: &FourPotential, h: f64) -> Self {
        let a = potential.field.clone();
        let mut field = QuaternionField::new(format!("B[{}]", a.name()), move |x| {
            let partials = a
                .analytic_partials(x)
                .unwrap_or_else(|| calculus::central_partials(&a, x, h));
            Operator::MINKOWSKI_BARRED.combine(&partials).vector_part()
        });
        for s in potential.field.singularities() {
            field = field.with_singularity(s.clone());
        }
        Self { field }
    }

    /// Field given directly by `(E, H)`.
    pub fn from_eh<F>(name: impl Into<String>, eh: F) -> Self
    where
        F: Fn(&FourEvent) -> ([f64; 3], [f64; 3]) + Send + Sync + 'static,
    {
        Self {
            field: QuaternionField::new(name, move |x| {
                let (e, h) = eh(x);
                pack_eh(e, h)
            }),
        }
    }

    pub fn with_singularity(mut self, singularity: Singularity) -> Self {
        self.field = self.field.with_singularity(singularity);
        self
    }

    /// `a B1 + b B2`.
    pub fn superpose(a: f64, b1: &FieldStrength, b: f64, b2: &FieldStrength) -> FieldStrength {
        FieldStrength {
            field: QuaternionField::linear_combination(
                Complex64::new(a, 0.0),
                &b1.field,
                Complex64::new(b, 0.0),
                &b2.field,
            ),
        }
    }

    /// Largest scalar part over `probes`.
    pub fn scalar_residual(&self, probes: &[FourEvent]) -> f64 {
        probes
            .iter()
            .map(|p| self.eval(p).s.norm())
            .fold(0.0, f64::max)
    }
}

/// A source `[i rho; j]`.
#[derive(Clone, Debug)]
pub struct FourCurrent {
    pub field: QuaternionField,
}

impl FourCurrent {
    pub fn eval(&self, x: &FourEvent) -> Biquaternion {
        self.field.eval(x)
    }

    /// Max over `probes` of `|d_t rho + div j|`, the scalar part of
    /// `nabla-bar J`.
    pub fn continuity_residual(&self, probes: &[FourEvent], h: f64) -> Result<f64> {
        if probes.is_empty() {
            return Err(Error::EmptyProbes);
        }
        probes.iter().try_fold(0.0f64, |worst, p| {
            Ok(worst.max(
                nabla(&self.field, p, h, Operator::MINKOWSKI_BARRED)?
                    .s
                    .norm(),
            ))
        })
    }
}

/// `[0; -H + iE]`.
pub fn pack_eh(e: [f64; 3], h: [f64; 3]) -> Biquaternion {
    Biquaternion::vector(std::array::from_fn(|k| Complex64::new(-h[k], e[k])))
}

/// Inverse of [`pack_eh`]: `E = Im v`, `H = -Re v`.
pub fn extract_eh(b: &Biquaternion) -> Result<([f64; 3], [f64; 3])> {
    let scalar = b.s.norm();
    if scalar > BIVECTOR_TOL * b.magnitude().max(1.0) {
        return Err(Error::NotBivector { scalar });
    }
    Ok((b.v.map(|c| c.im), b.v.map(|c| -c.re)))
}

/// Vector part of `nabla-bar A` at `x`.
pub fn field_from_potential(
    potential: &FourPotential,
    x: &FourEvent,
    h: f64,
) -> Result<Biquaternion> {
    Ok(nabla(&potential.field, x, h, Operator::MINKOWSKI_BARRED)?.vector_part())
}

/// Scalar part of `nabla-bar A`, i.e. `d_t phi + div A`. Zero in Lorenz gauge.
pub fn lorenz_scalar(potential: &FourPotential, x: &FourEvent, h: f64) -> Result<Complex64> {
    Ok(nabla(&potential.field, x, h, Operator::MINKOWSKI_BARRED)?.s)
}

/// Max over `probes` of `|nabla B|`. The magnitude is the root-sum-square of
/// the four classical residuals `div E`, `div H`, `curl E + d_t H` and
/// `curl H - d_t E`.
pub fn vacuum_residual(field: &FieldStrength, probes: &[FourEvent], h: f64) -> Result<f64> {
    calculus::regularity_residual(&field.field, probes, h, Operator::MINKOWSKI)
}

/// Max over `probes` of `|nabla B + 4 pi J|`.
pub fn source_residual(
    field: &FieldStrength,
    current: &FourCurrent,
    probes: &[FourEvent],
    h: f64,
) -> Result<f64> {
    if probes.is_empty() {
        return Err(Error::EmptyProbes);
    }
    probes.iter().try_fold(0.0f64, |worst, p| {
        let lhs = nabla(&field.field, p, h, Operator::MINKOWSKI)?;
        Ok(worst.max((lhs + current.eval(p) * (4.0 * PI)).magnitude()))
    })
}

/// The four classical vacuum residuals at one point, by central differences
/// of `E` and `H` directly.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassicalResiduals {
    pub div_e: f64,
    pub div_h: f64,
    pub faraday: [f64; 3],
    pub ampere: [f64; 3],
}

impl ClassicalResiduals {
    pub fn root_sum_square(&self) -> f64 {
        (self.div_e.powi(2)
            + self.div_h.powi(2)
            + self
                .faraday
                .iter()
                .chain(&self.ampere)
                .map(|v| v * v)
                .sum::<f64>())
        .sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        [self.div_e, self.div_h]
            .iter()
            .chain(&self.faraday)
            .chain(&self.ampere)
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

pub fn classical_residuals(
    field: &FieldStrength,
    x: &FourEvent,
    h: f64,
) -> Result<ClassicalResiduals> {
    field.field.check_clear(x, 2.0 * h)?;
    // d[mu][k]: derivative along coordinate mu of component k.
    let mut de = [[0.0; 3]; 4];
    let mut dh = [[0.0; 3]; 4];
    for mu in 0..4 {
        let (ep, hp) = extract_eh(&field.eval(&x.shifted(mu, h)))?;
        let (em, hm) = extract_eh(&field.eval(&x.shifted(mu, -h)))?;
        for k in 0..3 {
            de[mu][k] = (ep[k] - em[k]) / (2.0 * h);
            dh[mu][k] = (hp[k] - hm[k]) / (2.0 * h);
        }
    }
    let curl = |d: &[[f64; 3]; 4]| [d[2][2] - d[3][1], d[3][0] - d[1][2], d[1][1] - d[2][0]];
    let (curl_e, curl_h) = (curl(&de), curl(&dh));
    Ok(ClassicalResiduals {
        div_e: de[1][0] + de[2][1] + de[3][2],
        div_h: dh[1][0] + dh[2][1] + dh[3][2],
        faraday: std::array::from_fn(|k| curl_e[k] + dh[0][k]),
        ampere: std::array::from_fn(|k| curl_h[k] - de[0][k]),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CatalogName {
    Coulomb,
    PlaneWave,
    #[serde(rename = "uniform-E", alias = "uniform-e")]
    UniformE,
    #[serde(rename = "uniform-H", alias = "uniform-h")]
    UniformH,
    Wire,
}

impl CatalogName {
    pub const ALL: [CatalogName; 5] = [
        CatalogName::Coulomb,
        CatalogName::PlaneWave,
        CatalogName::UniformE,
        CatalogName::UniformH,
        CatalogName::Wire,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CatalogName::Coulomb => "coulomb",
            CatalogName::PlaneWave => "plane-wave",
            CatalogName::UniformE => "uniform-E",
            CatalogName::UniformH => "uniform-H",
            CatalogName::Wire => "wire",
        }
    }
}

impl std::str::FromStr for CatalogName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CatalogName::ALL
            .into_iter()
            .find(|c| c.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownName {
                what: "catalog entry",
                name: s.to_string(),
            })
    }
}

/// An analytic potential with its exact field and, where sourced, its
/// current.
#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: CatalogName,
    pub potential: FourPotential,
    pub field: FieldStrength,
    pub current: Option<FourCurrent>,
    /// Exact `d_t phi + div A`.
    pub lorenz_scalar: fn(&FourEvent) -> f64,
}

/// Catalog entry by name, with unit parameters:
///
/// * `coulomb`: charge 1 at rest at the origin
/// * `plane-wave`: `A = y cos(z - t)`, `phi = 0`
/// * `uniform-E`: `phi = -z` (E = z-hat)
/// * `uniform-H`: `A = (-y, x, 0)/2` (H = z-hat)
/// * `wire`: current 1 along the z axis, uniform over radius 1
pub fn potential_catalog(name: &str) -> Result<CatalogEntry> {
    let name: CatalogName = name.parse()?;
    Ok(match name {
        CatalogName::Coulomb => coulomb(1.0, [0.0; 3]),
        CatalogName::PlaneWave => plane_wave(),
        CatalogName::UniformE => uniform_e(1.0),
        CatalogName::UniformH => uniform_h(1.0),
        CatalogName::Wire => wire(1.0, 1.0),
    })
}

fn real3(v: [f64; 3]) -> [Complex64; 3] {
    v.map(|c| Complex64::new(c, 0.0))
}

fn potential(phi: f64, a: [f64; 3]) -> Biquaternion {
    Biquaternion::new(Complex64::new(0.0, phi), real3(a))
}

fn zero_lorenz(_: &FourEvent) -> f64 {
    0.0
}

/// Point charge `charge` at rest at `at`.
pub fn coulomb(charge: f64, at: [f64; 3]) -> CatalogEntry {
    let rel = move |x: &FourEvent| [x.x[0] - at[0], x.x[1] - at[1], x.x[2] - at[2]];
    let pole = Singularity::static_line("point charge", at);
    let field = QuaternionField::new("coulomb", move |x| {
        potential(charge / norm3(&rel(x)), [0.0; 3])
    })
    .with_partials(move |x| {
        let d = rel(x);
        let r3 = norm3(&d).powi(3);
        let mut p = [Biquaternion::ZERO; 4];
        for k in 0..3 {
            p[k + 1] = potential(-charge * d[k] / r3, [0.0; 3]);
        }
        p
    })
    .with_singularity(pole.clone());
    let eh = FieldStrength::from_eh("coulomb-E", move |x| {
        let d = rel(x);
        let r3 = norm3(&d).powi(3);
        (d.map(|c| charge * c / r3), [0.0; 3])
    })
    .with_singularity(pole.clone());
    let current = QuaternionField::constant(Biquaternion::ZERO)
        .renamed("point-charge")
        .with_singularity(pole);
    CatalogEntry {
        name: CatalogName::Coulomb,
        potential: FourPotential::new(field, "coulomb"),
        field: eh,
        current: Some(FourCurrent { field: current }),
        lorenz_scalar: zero_lorenz,
    }
}

/// Linearly polarized wave moving along +z: `A = y-hat cos(z - t)`.
pub fn plane_wave() -> CatalogEntry {
    let field = QuaternionField::new("plane-wave", |x| {
        potential(0.0, [0.0, (x.x[2] - x.t).cos(), 0.0])
    })
    .with_partials(|x| {
        let s = (x.x[2] - x.t).sin();
        [
            potential(0.0, [0.0, s, 0.0]),
            Biquaternion::ZERO,
            Biquaternion::ZERO,
            potential(0.0, [0.0, -s, 0.0]),
        ]
    });
    let eh = FieldStrength::from_eh("plane-wave-EH", |x| {
        let s = (x.x[2] - x.t).sin();
        ([0.0, -s, 0.0], [s, 0.0, 0.0])
    });
    CatalogEntry {
        name: CatalogName::PlaneWave,
        potential: FourPotential::new(field, "lorenz"),
        field: eh,
        current: None,
        lorenz_scalar: zero_lorenz,
    }
}

/// `phi = -e0 z`.
pub fn uniform_e(e0: f64) -> CatalogEntry {
    let field = QuaternionField::new("uniform-E", move |x| potential(-e0 * x.x[2], [0.0; 3]))
        .with_partials(move |_| {
            [
                Biquaternion::ZERO,
                Biquaternion::ZERO,
                Biquaternion::ZERO,
                potential(-e0, [0.0; 3]),
            ]
        });
    CatalogEntry {
        name: CatalogName::UniformE,
        potential: FourPotential::new(field, "coulomb"),
        field: FieldStrength::from_eh("uniform-E", move |_| ([0.0, 0.0, e0], [0.0; 3])),
        current: None,
        lorenz_scalar: zero_lorenz,
    }
}

/// `A = (h0 z-hat) x r / 2`.
pub fn uniform_h(h0: f64) -> CatalogEntry {
    let field = QuaternionField::new("uniform-H", move |x| {
        potential(0.0, [-0.5 * h0 * x.x[1], 0.5 * h0 * x.x[0], 0.0])
    })
    .with_partials(move |_| {
        [
            Biquaternion::ZERO,
            potential(0.0, [0.0, 0.5 * h0, 0.0]),
            potential(0.0, [-0.5 * h0, 0.0, 0.0]),
            Biquaternion::ZERO,
        ]
    });
    CatalogEntry {
        name: CatalogName::UniformH,
        potential: FourPotential::new(field, "coulomb"),
        field: FieldStrength::from_eh("uniform-H", move |_| ([0.0; 3], [0.0, 0.0, h0])),
        current: None,
        lorenz_scalar: zero_lorenz,
    }
}

/// Straight wire on the z axis carrying `current` spread uniformly over
/// `radius`. The potential is `A_z = -I r^2/a^2` inside and
/// `-I (1 + 2 ln(r/a))` outside; its surface `r = a` is declared singular
/// because the potential has a kink there.
pub fn wire(current: f64, radius: f64) -> CatalogEntry {
    let (i, a) = (current, radius);
    let rho = |x: &FourEvent| x.x[0].hypot(x.x[1]);
    let surface = Singularity::Custom {
        label: "wire surface".into(),
        distance: std::sync::Arc::new(move |x: &FourEvent| (x.x[0].hypot(x.x[1]) - a).abs()),
    };
    let field = QuaternionField::new("wire", move |x| {
        let r = rho(x);
        let az = if r < a {
            -i * r * r / (a * a)
        } else {
            -i * (1.0 + 2.0 * (r / a).ln())
        };
        potential(0.0, [0.0, 0.0, az])
    })
    .with_partials(move |x| {
        let r = rho(x);
        // dA_z/dr divided by r
        let g = if r < a {
            -2.0 * i / (a * a)
        } else {
            -2.0 * i / (r * r)
        };
        [
            Biquaternion::ZERO,
            potential(0.0, [0.0, 0.0, g * x.x[0]]),
            potential(0.0, [0.0, 0.0, g * x.x[1]]),
            Biquaternion::ZERO,
        ]
    })
    .with_singularity(surface.clone());
    let eh = FieldStrength::from_eh("wire-H", move |x| {
        let r = rho(x);
        let g = if r < a {
            2.0 * i / (a * a)
        } else {
            2.0 * i / (r * r)
        };
        ([0.0; 3], [-g * x.x[1], g * x.x[0], 0.0])
    })
    .with_singularity(surface.clone());
    let jz = i / (PI * a * a);
    let j = QuaternionField::new("wire-current", move |x| {
        let inside = rho(x) < a;
        potential(0.0, [0.0, 0.0, if inside { jz } else { 0.0 }])
    })
    .with_partials(|_| [Biquaternion::ZERO; 4])
    .with_singularity(surface);
    CatalogEntry {
        name: CatalogName::Wire,
        potential: FourPotential::new(field, "coulomb"),
        field: eh,
        current: Some(FourCurrent { field: j }),
        lorenz_scalar: zero_lorenz,
    }
}

/// One row of a field-map CSV.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "PascalCase")]
pub struct FieldRow {
    #[serde(rename = "t")]
    pub t: f64,
    #[serde(rename = "x")]
    pub x: f64,
    #[serde(rename = "y")]
    pub y: f64,
    #[serde(rename = "z")]
    pub z: f64,
    pub ex: f64,
    pub ey: f64,
    pub ez: f64,
    pub hx: f64,
    pub hy: f64,
    pub hz: f64,
    #[serde(rename = "residual")]
    pub residual: f64,
}

impl FieldRow {
    pub fn new(x: &FourEvent, e: [f64; 3], h: [f64; 3], residual: f64) -> Self {
        Self {
            t: x.t,
            x: x.x[0],
            y: x.x[1],
            z: x.x[2],
            ex: e[0],
            ey: e[1],
            ez: e[2],
            hx: h[0],
            hy: h[1],
            hz: h[2],
            residual,
        }
    }
}

/// Sample `field` at `points` (in order) with the local vacuum residual.
pub fn field_map(field: &FieldStrength, points: &[FourEvent], h: f64) -> Result<Vec<FieldRow>> {
    points
        .par_iter()
        .map(|p| {
            let (e, hv) = extract_eh(&field.eval(p))?;
            let residual = nabla(&field.field, p, h, Operator::MINKOWSKI)?.magnitude();
            Ok(FieldRow::new(p, e, hv, residual))
        })
        .collect()
}

/// Write rows as CSV with header `t,x,y,z,Ex,Ey,Ez,Hx,Hy,Hz,residual`.
pub fn write_field_csv<W: Write>(rows: &[FieldRow], out: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row).map_err(std::io::Error::other)?;
    }
    w.flush()
}
