//! The field Lagrangian `conj(B) B + (conj(B) B)~`, its volume integral and
//! bilinear split, and the same terms evaluated on the
//! constant-retarded-distance tube around a point charge.
//!
//! Field samples use the [`crate::maxwell`] dictionary `[0; -H + iE]`. The
//! density is evaluated on the canonical form `-i B = [0; E + iH]`, for
//! which `conj(B) B = E^2 - H^2 + 2i E.H`; the starred reversal then gives
//! the real density `2 (E^2 - H^2)`.
//!
//! Tube integrals contract the potential with the field through the
//! spacelike unit normal `N` of the tube cross-section:
//!
//! ```text
//! P = conj(A) (N B)            density = Scal(P + P~) / (16 pi)
//! ```
//!
//! with rest-frame area weight `xi0^2 dOmega`. For a charge at rest this
//! gives exactly `e^2 / (2 xi0)` per unit proper time.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{norm3, Biquaternion, FourEvent, ReversalVariant};
use crate::calculus::Singularity;
use crate::error::{Error, Result};
use crate::maxwell::{FieldStrength, FourPotential, BIVECTOR_TOL};
use crate::quadrature::{self, pairwise_sum, Rule};
use crate::worldline::{weiss_tube_patch, TubePatch, TubeResolution, Worldline};

/// Normalization of field-action volume terms relative to the tube terms.
pub const VOLUME_NORMALIZATION: f64 = 1.0 / (16.0 * PI);
/// Reversal variant used unless a caller selects another one.
pub const DEFAULT_VARIANT: ReversalVariant = ReversalVariant::Starred;

fn canonical(b: &Biquaternion) -> Result<Biquaternion> {
    let scalar = b.s.norm();
    if scalar > BIVECTOR_TOL * b.magnitude().max(1.0) {
        return Err(Error::NotBivector { scalar });
    }
    Ok(*b * Complex64::new(0.0, -1.0))
}

fn symmetrized(p: &Biquaternion, variant: ReversalVariant) -> Complex64 {
    p.s + p.reversal(variant).s
}

/// `Scal(conj(B) B + (conj(B) B)~)`.
pub fn lagrangian_density(b: &Biquaternion, variant: ReversalVariant) -> Result<Complex64> {
    let c = canonical(b)?;
    Ok(symmetrized(&(c.conj() * c), variant))
}

/// Cross density `Scal(2 conj(B1).B2 + (...)~)` with the symmetric product
/// `conj(B1).B2 = (conj(B1) B2 + conj(B2) B1) / 2`.
pub fn cross_density(
    b1: &Biquaternion,
    b2: &Biquaternion,
    variant: ReversalVariant,
) -> Result<Complex64> {
    let (c1, c2) = (canonical(b1)?, canonical(b2)?);
    Ok(symmetrized(&(c1.conj() * c2 + c2.conj() * c1), variant))
}

/// Spherical hole cut out of a box region.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Exclusion {
    pub center: [f64; 3],
    pub radius: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "shape")]
pub enum Geometry {
    /// `[t, x, y, z]` intervals.
    Box { bounds: [(f64, f64); 4] },
    /// Time interval times a spherical shell; nodes are `[t, r, cos(theta), phi]`.
    Shell {
        time: (f64, f64),
        center: [f64; 3],
        radii: (f64, f64),
    },
}

/// Integration domain for volume actions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Region4D {
    pub geometry: Geometry,
    pub nodes: [usize; 4],
    pub rule: Rule,
    #[serde(default)]
    pub exclusion: Option<Exclusion>,
}

impl Region4D {
    pub fn cube(bounds: [(f64, f64); 4], nodes: [usize; 4], rule: Rule) -> Self {
        Self {
            geometry: Geometry::Box { bounds },
            nodes,
            rule,
            exclusion: None,
        }
    }

    pub fn shell(
        time: (f64, f64),
        center: [f64; 3],
        radii: (f64, f64),
        nodes: [usize; 4],
        rule: Rule,
    ) -> Self {
        Self {
            geometry: Geometry::Shell {
                time,
                center,
                radii,
            },
            nodes,
            rule,
            exclusion: None,
        }
    }

    pub fn excluding(mut self, center: [f64; 3], radius: f64) -> Self {
        self.exclusion = Some(Exclusion { center, radius });
        self
    }

    fn validate(&self) -> Result<()> {
        if self.nodes.contains(&0) {
            return Err(Error::InvalidRegion("node counts must be positive".into()));
        }
        let ok = match self.geometry {
            Geometry::Box { bounds } => bounds.iter().all(|(a, b)| b > a),
            Geometry::Shell { time, radii, .. } => {
                time.1 > time.0 && radii.0 >= 0.0 && radii.1 > radii.0
            }
        };
        if !ok {
            return Err(Error::InvalidRegion("extents must be positive".into()));
        }
        Ok(())
    }

    fn excluded(&self, x: &[f64; 3]) -> bool {
        self.exclusion.is_some_and(|ex| {
            norm3(&[
                x[0] - ex.center[0],
                x[1] - ex.center[1],
                x[2] - ex.center[2],
            ]) < ex.radius
        })
    }

    fn contains_spatial(&self, p: &[f64; 3]) -> bool {
        if self.excluded(p) {
            return false;
        }
        match self.geometry {
            Geometry::Box { bounds } => {
                (0..3).all(|k| bounds[k + 1].0 <= p[k] && p[k] <= bounds[k + 1].1)
            }
            Geometry::Shell { center, radii, .. } => {
                let r = norm3(&[p[0] - center[0], p[1] - center[1], p[2] - center[2]]);
                radii.0 <= r && r <= radii.1
            }
        }
    }

    fn check_singularities(&self, singularities: &[Singularity]) -> Result<()> {
        for s in singularities {
            let inside = match s {
                Singularity::StaticLine { at, .. } => self.contains_spatial(at),
                Singularity::Point { at, .. } => {
                    let (t0, t1) = match self.geometry {
                        Geometry::Box { bounds } => bounds[0],
                        Geometry::Shell { time, .. } => time,
                    };
                    t0 <= at.t && at.t <= t1 && self.contains_spatial(&at.x)
                }
                // Checked node by node during integration.
                Singularity::Custom { .. } => false,
            };
            if inside {
                return Err(Error::SingularRegion {
                    label: s.label().to_string(),
                });
            }
        }
        Ok(())
    }

    /// `(event, weight)` pairs for every node, grouped by time node.
    fn time_slabs(&self) -> Result<Vec<Vec<(FourEvent, f64)>>> {
        self.validate()?;
        match self.geometry {
            Geometry::Box { bounds } => {
                let axes: Vec<Vec<(f64, f64)>> = (0..4)
                    .map(|k| quadrature::nodes(self.rule, self.nodes[k], bounds[k].0, bounds[k].1))
                    .collect::<Result<_>>()?;
                Ok(axes[0]
                    .iter()
                    .map(|&(t, wt)| {
                        let mut slab = Vec::new();
                        for &(x, wx) in &axes[1] {
                            for &(y, wy) in &axes[2] {
                                for &(z, wz) in &axes[3] {
                                    if !self.excluded(&[x, y, z]) {
                                        slab.push((
                                            FourEvent::new(t, [x, y, z]),
                                            wt * wx * wy * wz,
                                        ));
                                    }
                                }
                            }
                        }
                        slab
                    })
                    .collect())
            }
            Geometry::Shell {
                time,
                center,
                radii,
            } => {
                let ts = quadrature::nodes(self.rule, self.nodes[0], time.0, time.1)?;
                let rs = quadrature::nodes(self.rule, self.nodes[1], radii.0, radii.1)?;
                let mus = quadrature::nodes(self.rule, self.nodes[2], -1.0, 1.0)?;
                let phis = quadrature::nodes(Rule::Midpoint, self.nodes[3], 0.0, 2.0 * PI)?;
                Ok(ts
                    .iter()
                    .map(|&(t, wt)| {
                        let mut slab = Vec::new();
                        for &(r, wr) in &rs {
                            for &(mu, wmu) in &mus {
                                let st = (1.0 - mu * mu).max(0.0).sqrt();
                                for &(phi, wphi) in &phis {
                                    let x = [
                                        center[0] + r * st * phi.cos(),
                                        center[1] + r * st * phi.sin(),
                                        center[2] + r * mu,
                                    ];
                                    if !self.excluded(&x) {
                                        slab.push((
                                            FourEvent::new(t, x),
                                            wt * wr * wmu * wphi * r * r,
                                        ));
                                    }
                                }
                            }
                        }
                        slab
                    })
                    .collect())
            }
        }
    }

    /// Integrates `density` over the region, in parallel over time nodes
    /// with an order-fixed pairwise reduction.
    fn integrate<F>(&self, singularities: &[Singularity], density: F) -> Result<Complex64>
    where
        F: Fn(&FourEvent) -> Result<Complex64> + Sync,
    {
        self.check_singularities(singularities)?;
        let slabs = self.time_slabs()?;
        let sums: Vec<Complex64> = slabs
            .par_iter()
            .map(|slab| {
                let terms: Vec<Complex64> = slab
                    .iter()
                    .map(|(x, w)| {
                        for s in singularities {
                            if s.distance(x) <= 0.0 {
                                return Err(Error::SingularRegion {
                                    label: s.label().to_string(),
                                });
                            }
                        }
                        let d = density(x)?;
                        if !(d.re.is_finite() && d.im.is_finite()) {
                            return Err(Error::SingularRegion {
                                label: format!("non-finite density at {x:?}"),
                            });
                        }
                        Ok(d * *w)
                    })
                    .collect::<Result<_>>()?;
                Ok(pairwise_sum(&terms))
            })
            .collect::<Result<_>>()?;
        Ok(pairwise_sum(&sums))
    }
}

/// Raw `int d^4x density`, its imaginary part, and the value scaled by
/// [`VOLUME_NORMALIZATION`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VolumeIntegral {
    pub value: Complex64,
    pub imaginary_residue: f64,
    pub normalized: Complex64,
    pub variant: ReversalVariant,
}

impl VolumeIntegral {
    fn new(value: Complex64, variant: ReversalVariant) -> Self {
        Self {
            value,
            imaginary_residue: value.im.abs(),
            normalized: value * VOLUME_NORMALIZATION,
            variant,
        }
    }
}

pub fn action_volume(
    field: &FieldStrength,
    region: &Region4D,
    variant: ReversalVariant,
) -> Result<VolumeIntegral> {
    let value = region.integrate(field.field.singularities(), |x| {
        lagrangian_density(&field.eval(x), variant)
    })?;
    Ok(VolumeIntegral::new(value, variant))
}

/// The three bilinear pieces of the action of `B1 + B2`, and the action of
/// the sum computed on its own.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActionBreakdown {
    pub self_term: Complex64,
    pub cross_term: Complex64,
    pub external_term: Complex64,
    pub total: Complex64,
    pub reversal_variant: ReversalVariant,
}

impl ActionBreakdown {
    pub fn sum_of_terms(&self) -> Complex64 {
        self.self_term + self.cross_term + self.external_term
    }

    /// `|total - sum| / max(|total|, tiny)`.
    pub fn additivity_error(&self) -> f64 {
        let diff = (self.total - self.sum_of_terms()).norm();
        let scale = self.total.norm().max(f64::MIN_POSITIVE);
        if diff == 0.0 {
            0.0
        } else {
            diff / scale
        }
    }
}

pub fn action_cross_decompose(
    b1: &FieldStrength,
    b2: &FieldStrength,
    region: &Region4D,
    variant: ReversalVariant,
) -> Result<ActionBreakdown> {
    let mut singular: Vec<Singularity> = b1.field.singularities().to_vec();
    singular.extend(b2.field.singularities().iter().cloned());
    let self_term = region.integrate(b1.field.singularities(), |x| {
        lagrangian_density(&b1.eval(x), variant)
    })?;
    let external_term = region.integrate(b2.field.singularities(), |x| {
        lagrangian_density(&b2.eval(x), variant)
    })?;
    let cross_term = region.integrate(&singular, |x| {
        cross_density(&b1.eval(x), &b2.eval(x), variant)
    })?;
    let total = action_volume(&FieldStrength::superpose(1.0, b1, 1.0, b2), region, variant)?.value;
    Ok(ActionBreakdown {
        self_term,
        cross_term,
        external_term,
        total,
        reversal_variant: variant,
    })
}

/// Kinetic term of the self-field on the tube, next to its closed form.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KineticAction {
    pub xi0: f64,
    /// `e^2 / (2 xi0)` times the proper-time length.
    pub closed_form: f64,
    /// Tube surface quadrature of the self-field contraction.
    pub quadrature: f64,
    pub imaginary_residue: f64,
}

impl KineticAction {
    pub fn relative_error(&self) -> f64 {
        (self.quadrature - self.closed_form).abs() / self.closed_form.abs()
    }
}

/// Tube settings shared by the kinetic and interaction terms.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TubeQuadrature {
    pub resolution: TubeResolution,
    /// Finite-difference step for the self-field, relative to `xi0`.
    pub relative_step: f64,
    pub variant: ReversalVariant,
}

impl Default for TubeQuadrature {
    fn default() -> Self {
        Self {
            resolution: TubeResolution::default(),
            relative_step: 1e-3,
            variant: DEFAULT_VARIANT,
        }
    }
}

fn tube_sum<F>(patch: &TubePatch, integrand: F) -> Result<Complex64>
where
    F: Fn(&FourEvent, &Biquaternion) -> Result<Complex64> + Sync,
{
    let slabs: Vec<Complex64> = patch
        .slices
        .par_iter()
        .map(|slice| {
            let terms: Vec<Complex64> = slice
                .points
                .iter()
                .map(|p| Ok(integrand(&p.event, &p.normal)? * (p.area_weight * slice.tau_weight)))
                .collect::<Result<_>>()?;
            Ok(pairwise_sum(&terms))
        })
        .collect::<Result<_>>()?;
    Ok(pairwise_sum(&slabs))
}

pub fn tube_kinetic_action(
    w: &Worldline,
    xi0: f64,
    tau_range: (f64, f64),
    quad: &TubeQuadrature,
) -> Result<KineticAction> {
    let closed_form = mass_from_cutoff(w.charge, xi0)? * (tau_range.1 - tau_range.0);
    let patch = weiss_tube_patch(w, xi0, tau_range, quad.resolution)?;
    let h = quad.relative_step * xi0;
    let value = tube_sum(&patch, |x, normal| {
        let a = w.lw_potential(x)?;
        let b = w.lw_field(x, h)?;
        Ok(symmetrized(&(a.conj() * (*normal * b)), quad.variant))
    })? * VOLUME_NORMALIZATION;
    Ok(KineticAction {
        xi0,
        closed_form,
        quadrature: value.re,
        imaginary_residue: value.im.abs(),
    })
}

/// Interaction of a charge with an external potential.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InteractionAction {
    pub xi0: f64,
    /// `e int dtau Scal(conj(A) (U + i xi0 Udot))`.
    pub value: Complex64,
    /// `e int dtau Scal(conj(A) U) = -e int dt (phi - v.A)`.
    pub textbook: Complex64,
    /// `2 oint conj(A) (d^2X B_self)` on the tube, with the kinetic
    /// contraction. Tends to `-textbook` as `xi0 -> 0`.
    pub surface_form: Complex64,
}

impl InteractionAction {
    /// `value - textbook`, the acceleration-dependent part.
    pub fn correction(&self) -> Complex64 {
        self.value - self.textbook
    }
}

pub fn tube_interaction_action(
    w: &Worldline,
    external: &FourPotential,
    xi0: f64,
    tau_range: (f64, f64),
    quad: &TubeQuadrature,
) -> Result<InteractionAction> {
    if !(xi0 > 0.0) {
        return Err(Error::NonPositive {
            name: "xi0",
            value: xi0,
        });
    }
    let taus = quadrature::nodes(Rule::Gauss, quad.resolution.n_tau, tau_range.0, tau_range.1)?;
    let i_xi = Complex64::new(0.0, xi0);
    let mut value_terms = Vec::with_capacity(taus.len());
    let mut textbook_terms = Vec::with_capacity(taus.len());
    for &(tau, weight) in &taus {
        let k = w.kinematics(tau);
        external.field.check_clear(&k.position, 0.0)?;
        let a = external.eval(&k.position).conj();
        value_terms.push(a.scalar_product(&(k.u + k.udot * i_xi)) * (w.charge * weight));
        textbook_terms.push(a.scalar_product(&k.u) * (w.charge * weight));
    }
    let patch = weiss_tube_patch(w, xi0, tau_range, quad.resolution)?;
    let h = quad.relative_step * xi0;
    let surface_form = tube_sum(&patch, |x, normal| {
        external.field.check_clear(x, 0.0)?;
        let a = external.eval(x);
        let b = w.lw_field(x, h)?;
        Ok(symmetrized(&(a.conj() * (*normal * b)), quad.variant) * 2.0)
    })? * VOLUME_NORMALIZATION;
    Ok(InteractionAction {
        xi0,
        value: pairwise_sum(&value_terms),
        textbook: pairwise_sum(&textbook_terms),
        surface_form,
    })
}

/// `m = e^2 / (2 xi0)` (magnitude; `c = 1`).
pub fn mass_from_cutoff(e: f64, xi0: f64) -> Result<f64> {
    if !(xi0 > 0.0) {
        return Err(Error::NonPositive {
            name: "xi0",
            value: xi0,
        });
    }
    Ok(e * e / (2.0 * xi0))
}

/// Serializable summary of an action run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActionReport {
    pub variant: ReversalVariant,
    pub terms: Option<ActionBreakdown>,
    pub imaginary_residue: f64,
    pub quadrature: TubeQuadrature,
    pub xi0_sweep: Vec<KineticAction>,
}
