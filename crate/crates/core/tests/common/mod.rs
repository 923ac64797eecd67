//! Independent oracles shared by the integration tests. Nothing here calls
//! into the library's arithmetic except to convert to and from
//! `Biquaternion`.

#![allow(dead_code)]

use biquat_core::worldline::Kinematics;
use biquat_core::{Biquaternion, FourEvent};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type C = Complex64;
pub type M2 = [[C; 2]; 2];

const I: C = C::new(0.0, 1.0);

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_complex(r: &mut impl Rng) -> C {
    C::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))
}

pub fn random_biquaternion(r: &mut impl Rng) -> Biquaternion {
    Biquaternion::new(
        random_complex(r),
        std::array::from_fn(|_| random_complex(r)),
    )
}

pub fn random_unit_vector(r: &mut impl Rng) -> [f64; 3] {
    loop {
        let v: [f64; 3] = std::array::from_fn(|_| r.gen_range(-1.0..1.0));
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 0.1 && n <= 1.0 {
            return v.map(|c| c / n);
        }
    }
}

/// 2x2 complex matrix image with `e_k -> -i sigma_k`.
pub fn to_m2(q: &Biquaternion) -> M2 {
    let [v1, v2, v3] = q.v;
    [[q.s - I * v3, -I * v1 - v2], [-I * v1 + v2, q.s + I * v3]]
}

pub fn from_m2(m: &M2) -> Biquaternion {
    let s = (m[0][0] + m[1][1]) / 2.0;
    let v1 = I * (m[0][1] + m[1][0]) / 2.0;
    let v2 = (m[1][0] - m[0][1]) / 2.0;
    let v3 = (m[1][1] - m[0][0]) / (2.0 * I);
    Biquaternion::new(s, [v1, v2, v3])
}

pub fn m2_mul(a: &M2, b: &M2) -> M2 {
    std::array::from_fn(|i| std::array::from_fn(|j| a[i][0] * b[0][j] + a[i][1] * b[1][j]))
}

pub fn m2_transpose(a: &M2) -> M2 {
    [[a[0][0], a[1][0]], [a[0][1], a[1][1]]]
}

/// Left-multiplication matrix of the Hamilton product on `(s, v1, v2, v3)`.
pub fn left_matrix(a: &Biquaternion) -> [[C; 4]; 4] {
    let [a0, a1, a2, a3] = a.components();
    [
        [a0, -a1, -a2, -a3],
        [a1, a0, -a3, a2],
        [a2, a3, a0, -a1],
        [a3, -a2, a1, a0],
    ]
}

pub fn matrix_product(a: &Biquaternion, b: &Biquaternion) -> Biquaternion {
    let l = left_matrix(a);
    let c = b.components();
    Biquaternion::from_components(std::array::from_fn(|i| {
        (0..4).map(|j| l[i][j] * c[j]).sum()
    }))
}

pub type M4 = [[f64; 4]; 4];

/// Standard boost on `(t, x, y, z)` with rapidity `phi` along unit `n`.
pub fn boost_matrix(n: [f64; 3], phi: f64) -> M4 {
    let (ch, sh) = (phi.cosh(), phi.sinh());
    let mut m = [[0.0; 4]; 4];
    m[0][0] = ch;
    for i in 0..3 {
        m[0][i + 1] = -sh * n[i];
        m[i + 1][0] = -sh * n[i];
        for j in 0..3 {
            m[i + 1][j + 1] = if i == j { 1.0 } else { 0.0 } + (ch - 1.0) * n[i] * n[j];
        }
    }
    m
}

/// Right-handed rotation by `angle` about unit `n` (Rodrigues).
pub fn rotation_matrix(n: [f64; 3], angle: f64) -> M4 {
    let (c, s) = (angle.cos(), angle.sin());
    let mut m = [[0.0; 4]; 4];
    m[0][0] = 1.0;
    let cross = [[0.0, -n[2], n[1]], [n[2], 0.0, -n[0]], [-n[1], n[0], 0.0]];
    for i in 0..3 {
        for j in 0..3 {
            m[i + 1][j + 1] =
                if i == j { c } else { 0.0 } + s * cross[i][j] + (1.0 - c) * n[i] * n[j];
        }
    }
    m
}

pub fn m4_apply(m: &M4, x: [f64; 4]) -> [f64; 4] {
    std::array::from_fn(|i| (0..4).map(|j| m[i][j] * x[j]).sum())
}

pub fn m4_mul(a: &M4, b: &M4) -> M4 {
    std::array::from_fn(|i| std::array::from_fn(|j| (0..4).map(|k| a[i][k] * b[k][j]).sum()))
}

pub fn m4_max_diff(a: &M4, b: &M4) -> f64 {
    (0..4)
        .flat_map(|i| (0..4).map(move |j| (i, j)))
        .map(|(i, j)| (a[i][j] - b[i][j]).abs())
        .fold(0.0, f64::max)
}

/// Retarded coordinate time for a charge on `x(t) = origin + v t`, from the
/// quadratic light-cone equation.
pub fn uniform_retarded_time(origin: [f64; 3], v: [f64; 3], x: &FourEvent) -> f64 {
    let d: [f64; 3] = std::array::from_fn(|k| x.x[k] - origin[k]);
    let v2: f64 = v.iter().map(|c| c * c).sum();
    let dv: f64 = (0..3).map(|k| d[k] * v[k]).sum();
    let d2: f64 = d.iter().map(|c| c * c).sum();
    let b = x.t - dv;
    (b - (b * b + (1.0 - v2) * (d2 - x.t * x.t)).sqrt()) / (1.0 - v2)
}

/// `(phi, A)` of a uniformly moving charge through `origin` at `t = 0`,
/// obtained by boosting the rest-frame Coulomb potential.
pub fn boosted_coulomb(
    charge: f64,
    origin: [f64; 3],
    v: [f64; 3],
    x: &FourEvent,
) -> (f64, [f64; 3]) {
    let speed = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    let n = v.map(|c| c / speed);
    let phi_rap = speed.atanh();
    let lab = [
        x.t,
        x.x[0] - origin[0],
        x.x[1] - origin[1],
        x.x[2] - origin[2],
    ];
    let rest = m4_apply(&boost_matrix(n, phi_rap), lab);
    let r = (rest[1] * rest[1] + rest[2] * rest[2] + rest[3] * rest[3]).sqrt();
    let a_rest = [charge / r, 0.0, 0.0, 0.0];
    let a = m4_apply(&boost_matrix(n, -phi_rap), a_rest);
    (a[0], [a[1], a[2], a[3]])
}

/// Lab-frame quantities of a worldline in coordinate time.
pub struct LabState {
    pub t: f64,
    pub x: [f64; 3],
    pub v: [f64; 3],
    pub a: [f64; 3],
}

/// Converts proper-time kinematics to lab-frame position, velocity and
/// acceleration.
pub fn lab_state(k: &Kinematics) -> LabState {
    let gamma = k.u.s.im;
    let v: [f64; 3] = std::array::from_fn(|i| k.u.v[i].re / gamma);
    let gamma_dot = k.udot.s.im / gamma;
    // udot = d(gamma v)/dtau = gamma (dgamma/dt v + gamma a)
    let a = std::array::from_fn(|i| (k.udot.v[i].re / gamma - gamma_dot * v[i]) / gamma);
    LabState {
        t: k.position.t,
        x: k.position.x,
        v,
        a,
    }
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Textbook retarded `(E, H)` for a worldline given in proper time. The
/// retarded time is found by plain bisection on `t - t_w - |x - x_w|`.
pub fn textbook_lw_field<K>(charge: f64, kinematics: K, x: &FourEvent) -> ([f64; 3], [f64; 3])
where
    K: Fn(f64) -> Kinematics,
{
    let cone = |tau: f64| {
        let k = kinematics(tau);
        let d: [f64; 3] = std::array::from_fn(|i| x.x[i] - k.position.x[i]);
        x.t - k.position.t - dot(d, d).sqrt()
    };
    let mut hi = x.t;
    while cone(hi) < 0.0 {
        hi -= 1.0;
    }
    let mut lo = hi - 1.0;
    while cone(lo) < 0.0 {
        hi = lo;
        lo -= 1.0;
    }
    while cone(hi) > 0.0 {
        hi += 1.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if cone(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let s = lab_state(&kinematics(0.5 * (lo + hi)));
    let d: [f64; 3] = std::array::from_fn(|i| x.x[i] - s.x[i]);
    let r = dot(d, d).sqrt();
    let n = d.map(|c| c / r);
    let kappa = 1.0 - dot(n, s.v);
    let nv: [f64; 3] = std::array::from_fn(|i| n[i] - s.v[i]);
    let v2 = dot(s.v, s.v);
    let rad = cross(n, cross(nv, s.a));
    let e: [f64; 3] = std::array::from_fn(|i| {
        charge * (nv[i] * (1.0 - v2) / (kappa.powi(3) * r * r) + rad[i] / (kappa.powi(3) * r))
    });
    (e, cross(n, e))
}

/// Gauge function `chi = p(x) exp(-|x - c|^2 / w^2)` on `(t, x, y, z)`,
/// with `p` a quadratic polynomial, and its gradient.
#[derive(Clone, Copy, Debug)]
pub struct GaussianGauge {
    pub constant: f64,
    pub linear: [f64; 4],
    pub quadratic: [[f64; 4]; 4],
    pub center: [f64; 4],
    pub width: f64,
}

impl GaussianGauge {
    pub fn random(r: &mut impl Rng) -> Self {
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

    fn poly(&self, c: &[f64; 4]) -> (f64, [f64; 4]) {
        let mut p = self.constant;
        let mut grad = self.linear;
        for i in 0..4 {
            p += self.linear[i] * c[i];
            for j in 0..4 {
                p += 0.5 * self.quadratic[i][j] * c[i] * c[j];
                grad[i] += self.quadratic[i][j] * c[j];
            }
        }
        (p, grad)
    }

    pub fn value(&self, x: &FourEvent) -> f64 {
        let c = x.coords();
        let d2: f64 = (0..4).map(|i| (c[i] - self.center[i]).powi(2)).sum();
        self.poly(&c).0 * (-d2 / (self.width * self.width)).exp()
    }

    pub fn gradient(&self, x: &FourEvent) -> [f64; 4] {
        let c = x.coords();
        let w2 = self.width * self.width;
        let d2: f64 = (0..4).map(|i| (c[i] - self.center[i]).powi(2)).sum();
        let g = (-d2 / w2).exp();
        let (p, dp) = self.poly(&c);
        std::array::from_fn(|i| (dp[i] - p * 2.0 * (c[i] - self.center[i]) / w2) * g)
    }
}

/// Deterministic probe points inside `[-r, r]^3` at times in `[-r, r]`,
/// each at least `min_radius` from the spatial origin.
pub fn probes(r: &mut impl Rng, count: usize, extent: f64, min_radius: f64) -> Vec<FourEvent> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let x: [f64; 3] = std::array::from_fn(|_| r.gen_range(-extent..extent));
        if dot(x, x).sqrt() >= min_radius {
            out.push(FourEvent::new(r.gen_range(-extent..extent), x));
        }
    }
    out
}
