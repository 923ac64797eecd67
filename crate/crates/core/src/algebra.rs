//! Biquaternion arithmetic.
//!
//! A [`Biquaternion`] is a quaternion `[s; v]` whose four coefficients are
//! complex numbers. Real quaternions are the subset with vanishing imaginary
//! parts and are closed under every operation defined here.
//!
//! Space-time events use the imaginary-time embedding `X = [it; x]`, so that
//! `X * conj(X)` is the real Minkowski interval `|x|^2 - t^2`. Lorentz
//! transformations act as `X' = L X biconj(L)` with `L * conj(L) = 1`.
//!
//! Four involutions are provided:
//!
//! | name          | action on `[s; v]`                 | kind              |
//! |---------------|------------------------------------|-------------------|
//! | complex star  | conjugate every coefficient        | automorphism      |
//! | quat conj     | `[s; -v]`                          | anti-automorphism |
//! | biconjugation | quat conj composed with star       | anti-automorphism |
//! | reversal      | see [`ReversalVariant`]            | anti-automorphism |

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Quaternion with complex coefficients: scalar `s` plus vector `v`.
#[derive(Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Biquaternion {
    pub s: Complex64,
    pub v: [Complex64; 3],
}

/// Selects how order reversal treats the complex coefficients.
///
/// Both variants reverse products, `(ab)~ = b~ a~`, and fix real scalars.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReversalVariant {
    /// Transposition in the 2x2 complex matrix representation:
    /// `[s; (v1, v2, v3)] -> [s; (v1, -v2, v3)]`.
    #[default]
    Transpose,
    /// Transposition composed with complex conjugation. Makes the field
    /// Lagrangian density real, so the action module defaults to it.
    Starred,
}

impl ReversalVariant {
    pub fn label(self) -> &'static str {
        match self {
            ReversalVariant::Transpose => "transpose",
            ReversalVariant::Starred => "starred",
        }
    }
}

impl fmt::Display for ReversalVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for ReversalVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "transpose" => Ok(ReversalVariant::Transpose),
            "starred" => Ok(ReversalVariant::Starred),
            other => Err(Error::UnknownName {
                what: "reversal variant",
                name: other.to_string(),
            }),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Involution {
    ComplexStar,
    QuatConj,
    Biconj,
    Reversal(ReversalVariant),
}

impl Biquaternion {
    pub const ZERO: Self = Self {
        s: ZERO,
        v: [ZERO; 3],
    };
    pub const ONE: Self = Self {
        s: ONE,
        v: [ZERO; 3],
    };

    pub const fn new(s: Complex64, v: [Complex64; 3]) -> Self {
        Self { s, v }
    }

    /// Real quaternion `[s; v]`.
    pub fn real(s: f64, v: [f64; 3]) -> Self {
        Self {
            s: Complex64::new(s, 0.0),
            v: v.map(|c| Complex64::new(c, 0.0)),
        }
    }

    pub fn scalar(s: Complex64) -> Self {
        Self { s, v: [ZERO; 3] }
    }

    pub fn vector(v: [Complex64; 3]) -> Self {
        Self { s: ZERO, v }
    }

    /// Quaternion unit `e_k` for `k` in `1..=3`; `e_0` is the identity.
    pub fn unit(k: usize) -> Self {
        let mut q = Self::ZERO;
        match k {
            0 => q.s = ONE,
            1..=3 => q.v[k - 1] = ONE,
            _ => panic!("quaternion unit index {k} out of range"),
        }
        q
    }

    /// Components in the order `(s, v1, v2, v3)`.
    pub fn components(&self) -> [Complex64; 4] {
        [self.s, self.v[0], self.v[1], self.v[2]]
    }

    pub fn from_components(c: [Complex64; 4]) -> Self {
        Self {
            s: c[0],
            v: [c[1], c[2], c[3]],
        }
    }

    pub fn scalar_part(&self) -> Complex64 {
        self.s
    }

    pub fn vector_part(&self) -> Self {
        Self::vector(self.v)
    }

    pub fn complex_star(&self) -> Self {
        Self {
            s: self.s.conj(),
            v: self.v.map(|c| c.conj()),
        }
    }

    pub fn conj(&self) -> Self {
        Self {
            s: self.s,
            v: self.v.map(|c| -c),
        }
    }

    pub fn biconj(&self) -> Self {
        self.conj().complex_star()
    }

    pub fn reversal(&self, variant: ReversalVariant) -> Self {
        let t = Self {
            s: self.s,
            v: [self.v[0], -self.v[1], self.v[2]],
        };
        match variant {
            ReversalVariant::Transpose => t,
            ReversalVariant::Starred => t.complex_star(),
        }
    }

    pub fn involution(&self, kind: Involution) -> Self {
        match kind {
            Involution::ComplexStar => self.complex_star(),
            Involution::QuatConj => self.conj(),
            Involution::Biconj => self.biconj(),
            Involution::Reversal(variant) => self.reversal(variant),
        }
    }

    /// Frobenius magnitude over the eight real coefficients.
    pub fn magnitude(&self) -> f64 {
        self.components()
            .iter()
            .map(|c| c.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Largest absolute coefficient difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.components()
            .iter()
            .zip(other.components().iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest imaginary part among the coefficients.
    pub fn max_imag(&self) -> f64 {
        self.components()
            .iter()
            .map(|c| c.im.abs())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.components()
            .iter()
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Scalar part of `self * other`, the contraction used for
    /// quaternionic dot products.
    pub fn scalar_product(&self, other: &Self) -> Complex64 {
        self.s * other.s - dot(&self.v, &other.v)
    }
}

/// Bilinear (non-Hermitian) dot product of complex 3-vectors.
pub(crate) fn dot(a: &[Complex64; 3], b: &[Complex64; 3]) -> Complex64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: &[Complex64; 3], b: &[Complex64; 3]) -> [Complex64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Hamilton product `[a.s b.s - a.v.b.v ; a.s b.v + b.s a.v + a.v x b.v]`.
pub fn multiply(a: &Biquaternion, b: &Biquaternion) -> Biquaternion {
    let c = cross(&a.v, &b.v);
    Biquaternion {
        s: a.s * b.s - dot(&a.v, &b.v),
        v: [
            a.s * b.v[0] + b.s * a.v[0] + c[0],
            a.s * b.v[1] + b.s * a.v[1] + c[1],
            a.s * b.v[2] + b.s * a.v[2] + c[2],
        ],
    }
}

impl fmt::Debug for Biquaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}; ({}, {}, {})]",
            self.s, self.v[0], self.v[1], self.v[2]
        )
    }
}

impl Add for Biquaternion {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self {
            s: self.s + rhs.s,
            v: [
                self.v[0] + rhs.v[0],
                self.v[1] + rhs.v[1],
                self.v[2] + rhs.v[2],
            ],
        }
    }
}

impl AddAssign for Biquaternion {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl Sub for Biquaternion {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl SubAssign for Biquaternion {
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}

impl Neg for Biquaternion {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            s: -self.s,
            v: self.v.map(|c| -c),
        }
    }
}

impl Mul for Biquaternion {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        multiply(&self, &rhs)
    }
}

impl Mul<Complex64> for Biquaternion {
    type Output = Self;
    fn mul(self, rhs: Complex64) -> Self {
        Self {
            s: self.s * rhs,
            v: self.v.map(|c| c * rhs),
        }
    }
}

impl Mul<Biquaternion> for Complex64 {
    type Output = Biquaternion;
    fn mul(self, rhs: Biquaternion) -> Biquaternion {
        rhs * self
    }
}

impl Mul<f64> for Biquaternion {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        Self {
            s: self.s * rhs,
            v: self.v.map(|c| c * rhs),
        }
    }
}

impl Mul<Biquaternion> for f64 {
    type Output = Biquaternion;
    fn mul(self, rhs: Biquaternion) -> Biquaternion {
        rhs * self
    }
}

impl Div<f64> for Biquaternion {
    type Output = Self;
    fn div(self, rhs: f64) -> Self {
        self * rhs.recip()
    }
}

impl std::iter::Sum for Biquaternion {
    fn sum<It: Iterator<Item = Self>>(iter: It) -> Self {
        iter.fold(Self::ZERO, |acc, q| acc + q)
    }
}

/// Space-time point `[it; x]` with real `t` and real `x`.
///
/// In Euclidean mode (real-quaternion analysis) the `t` slot carries the
/// real coordinate `x0` instead; see [`crate::calculus::Mode`].
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct FourEvent {
    pub t: f64,
    pub x: [f64; 3],
}

impl FourEvent {
    pub const fn new(t: f64, x: [f64; 3]) -> Self {
        Self { t, x }
    }

    pub fn origin() -> Self {
        Self::default()
    }

    /// `(t, x1, x2, x3)`.
    pub fn coords(&self) -> [f64; 4] {
        [self.t, self.x[0], self.x[1], self.x[2]]
    }

    pub fn from_coords(c: [f64; 4]) -> Self {
        Self {
            t: c[0],
            x: [c[1], c[2], c[3]],
        }
    }

    /// The event shifted by `h` along coordinate axis `mu` (0 = time).
    pub fn shifted(&self, mu: usize, h: f64) -> Self {
        let mut c = self.coords();
        c[mu] += h;
        Self::from_coords(c)
    }

    /// Embedding `[it; x]`.
    pub fn to_biquaternion(&self) -> Biquaternion {
        Biquaternion {
            s: Complex64::new(0.0, self.t),
            v: self.x.map(|c| Complex64::new(c, 0.0)),
        }
    }

    /// Inverse of [`FourEvent::to_biquaternion`]; the real part of the
    /// scalar and the imaginary parts of the vector are dropped.
    pub fn from_biquaternion(q: &Biquaternion) -> Self {
        Self {
            t: q.s.im,
            x: q.v.map(|c| c.re),
        }
    }

    /// Largest coefficient that violates the `[it; x]` form.
    pub fn form_residual(q: &Biquaternion) -> f64 {
        q.s.re
            .abs()
            .max(q.v.iter().map(|c| c.im.abs()).fold(0.0, f64::max))
    }

    pub fn spatial_norm(&self) -> f64 {
        norm3(&self.x)
    }
}

impl Sub for FourEvent {
    type Output = FourEvent;
    fn sub(self, rhs: Self) -> Self {
        FourEvent {
            t: self.t - rhs.t,
            x: [
                self.x[0] - rhs.x[0],
                self.x[1] - rhs.x[1],
                self.x[2] - rhs.x[2],
            ],
        }
    }
}

impl Add for FourEvent {
    type Output = FourEvent;
    fn add(self, rhs: Self) -> Self {
        FourEvent {
            t: self.t + rhs.t,
            x: [
                self.x[0] + rhs.x[0],
                self.x[1] + rhs.x[1],
                self.x[2] + rhs.x[2],
            ],
        }
    }
}

pub(crate) fn norm3(v: &[f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// `X conj(X) = |x|^2 - t^2`.
pub fn minkowski_interval(event: &FourEvent) -> f64 {
    let q = event.to_biquaternion();
    let p = q * q.conj();
    debug_assert!(p.s.im.abs() < 1e-14 * (1.0 + p.s.re.abs()));
    p.s.re
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TransformKind {
    Rotation,
    Boost,
}

/// Unit biquaternion `L` (`L conj(L) = 1`) acting on events by
/// `X -> L X biconj(L)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitTransformer {
    l: Biquaternion,
}

const UNIT_TOL: f64 = 1e-12;
const AXIS_TOL: f64 = 1e-10;

impl UnitTransformer {
    pub fn identity() -> Self {
        Self {
            l: Biquaternion::ONE,
        }
    }

    /// Wraps `l`, checking `l conj(l) = 1` to 1e-12.
    pub fn from_biquaternion(l: Biquaternion) -> Result<Self> {
        let deviation = (l * l.conj()).max_abs_diff(&Biquaternion::ONE);
        if deviation > UNIT_TOL {
            return Err(Error::NotUnit { deviation });
        }
        Ok(Self { l })
    }

    pub fn element(&self) -> Biquaternion {
        self.l
    }

    /// Apply `other` first, then `self`.
    pub fn compose(&self, other: &UnitTransformer) -> UnitTransformer {
        UnitTransformer {
            l: self.l * other.l,
        }
    }

    pub fn inverse(&self) -> UnitTransformer {
        UnitTransformer { l: self.l.conj() }
    }

    /// `L q biconj(L)` for an arbitrary biquaternion (events, potentials,
    /// velocities).
    pub fn apply(&self, q: &Biquaternion) -> Biquaternion {
        self.l * *q * self.l.biconj()
    }

    pub fn transform(&self, event: &FourEvent) -> FourEvent {
        FourEvent::from_biquaternion(&self.apply(&event.to_biquaternion()))
    }

    /// The pure boost taking the rest four-velocity `[i; 0]` to `u`.
    ///
    /// `u` must have the four-velocity form `[i gamma; gamma v]`.
    pub fn rest_to(u: &Biquaternion) -> UnitTransformer {
        let p = u.v.map(|c| c.re);
        let sinh = norm3(&p);
        if sinh == 0.0 {
            return UnitTransformer::identity();
        }
        let axis = p.map(|c| c / sinh);
        boost_unchecked(axis, -sinh.asinh())
    }
}

fn boost_unchecked(axis: [f64; 3], rapidity: f64) -> UnitTransformer {
    let (c, s) = ((0.5 * rapidity).cosh(), (0.5 * rapidity).sinh());
    UnitTransformer {
        l: Biquaternion {
            s: Complex64::new(c, 0.0),
            v: axis.map(|a| I * (s * a)),
        },
    }
}

/// Rotation `[cos(a/2); sin(a/2) n]` or boost `[cosh(p/2); i sinh(p/2) n]`.
///
/// A boost with rapidity `p` along `n` maps `t -> t cosh p - z sinh p`,
/// `z -> z cosh p - t sinh p` for `z` the component along `n`.
pub fn make_transformer(
    kind: TransformKind,
    axis: [f64; 3],
    angle_or_rapidity: f64,
) -> Result<UnitTransformer> {
    let norm = norm3(&axis);
    if (norm - 1.0).abs() > AXIS_TOL || !norm.is_finite() {
        return Err(Error::NonUnitAxis { norm });
    }
    Ok(match kind {
        TransformKind::Rotation => {
            let half = 0.5 * angle_or_rapidity;
            UnitTransformer {
                l: Biquaternion::real(half.cos(), axis.map(|a| a * half.sin())),
            }
        }
        TransformKind::Boost => boost_unchecked(axis, angle_or_rapidity),
    })
}

pub fn transform(l: &UnitTransformer, event: &FourEvent) -> FourEvent {
    l.transform(event)
}
