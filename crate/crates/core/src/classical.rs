//! Classical relative motion in a vector Coulomb potential.
//!
//! The kinetic energy of the relative motion is u = λ + α/r for the attractive
//! potential V = −α/r. The orbit is integrated as θ(r) = ∫ L / (r² q_r) dr, which
//! is the trajectory integrand in u times |du/dr| = α/r². Working in r keeps the
//! free limit α = 0 (where u ≡ λ) on the same code path.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::angular::gauss_legendre;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Regime {
    Elliptic,
    Parabolic,
    Hyperbolic,
}

/// Invariant mass λ, angular momentum L, coupling α (V = −α/r) and the two masses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrbitParams {
    pub lambda: f64,
    pub l: f64,
    pub alpha: f64,
    pub m1: f64,
    pub m2: f64,
}

impl OrbitParams {
    pub fn new(lambda: f64, l: f64, alpha: f64, m1: f64, m2: f64) -> Result<Self> {
        let ok = [lambda, l, alpha, m1, m2].iter().all(|v| v.is_finite());
        if !ok || lambda <= 0.0 || l < 0.0 || alpha < 0.0 || m1 < 0.0 || m2 < 0.0 {
            return Err(Error::domain("orbit parameters must be finite with λ > 0 and L, α, m ≥ 0"));
        }
        Ok(Self { lambda, l, alpha, m1, m2 })
    }

    /// u = λ + α/r.
    pub fn u(&self, r: f64) -> f64 {
        self.lambda + self.alpha / r
    }

    /// q_r² at radius r.
    pub fn radicand(&self, r: f64) -> f64 {
        momentum_squared(self.u(r), self.m1, self.m2) - self.l * self.l / (r * r)
    }

    /// The quartic under the root of dθ/du.
    pub fn quartic(&self, u: f64) -> f64 {
        let s = self.m1 * self.m1 + self.m2 * self.m2;
        let d = self.m1 * self.m1 - self.m2 * self.m2;
        let k = 2.0 * self.l / self.alpha;
        let u2 = u * u;
        u2 * u2 - k * k * u2 * (self.lambda - u).powi(2) - 2.0 * s * u2 + d * d
    }
}

/// Relative momentum squared at total energy u: [u² − (m₁+m₂)²][u² − (m₁−m₂)²]/(4u²).
fn momentum_squared(u: f64, m1: f64, m2: f64) -> f64 {
    let a = (u - m1 - m2) * (u + m1 + m2);
    let b = (u - m1 + m2) * (u + m1 - m2);
    a * b / (4.0 * u * u)
}

/// Radial momentum q_r at radius r; errors in the classically forbidden region.
pub fn radial_momentum(r: f64, lambda: f64, l: f64, m1: f64, m2: f64, alpha: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::domain(format!("radius must be positive, got {r}")));
    }
    let p = OrbitParams::new(lambda, l, alpha, m1, m2)?;
    let rad = p.radicand(r);
    if rad < 0.0 {
        return Err(Error::domain(format!("classically forbidden at r = {r:e}: q_r² = {rad:e}")));
    }
    Ok(rad.sqrt())
}

/// Orbit type: the sign of L − α/2 for equal masses, the sign of the binding energy otherwise.
pub fn classify(p: &OrbitParams) -> Regime {
    let order = if p.m1 == p.m2 && p.alpha > 0.0 {
        (0.5 * p.alpha).total_cmp(&p.l)
    } else {
        (p.lambda - p.m1 - p.m2).total_cmp(&0.0).reverse()
    };
    match order {
        std::cmp::Ordering::Less => Regime::Elliptic,
        std::cmp::Ordering::Equal => Regime::Parabolic,
        std::cmp::Ordering::Greater => Regime::Hyperbolic,
    }
}

/// Radial turning points (q_r = 0), ascending.
pub fn turning_points(p: &OrbitParams) -> Vec<f64> {
    if p.alpha == 0.0 {
        let q2 = momentum_squared(p.lambda, p.m1, p.m2);
        return if q2 > 0.0 && p.l > 0.0 { vec![p.l / q2.sqrt()] } else { vec![] };
    }
    let s = p.m1 * p.m1 + p.m2 * p.m2;
    let d = p.m1 * p.m1 - p.m2 * p.m2;
    let k2 = (2.0 * p.l / p.alpha).powi(2);
    let lam = p.lambda;
    // Q(u) = c4 u⁴ + c3 u³ + c2 u² + d², with the u = 0 double root removed for equal masses
    let c4 = 1.0 - k2;
    let c3 = 2.0 * k2 * lam;
    let c2 = -k2 * lam * lam - 2.0 * s;
    let coeffs: Vec<f64> = if d == 0.0 { vec![c4, c3, c2] } else { vec![c4, c3, c2, 0.0, d * d] };
    let mut roots: Vec<f64> = real_roots(&coeffs)
        .into_iter()
        .map(|u| polish(|x| p.quartic(x), u))
        .filter(|&u| u > lam)
        .map(|u| p.alpha / (u - lam))
        .filter(|&r| r > 0.0 && p.radicand(r * (1.0 + 1e-9)).abs() < 1e-6 * (1.0 + p.lambda * p.lambda))
        .collect();
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs());
    roots
}

/// Real roots of a polynomial with coefficients in descending order.
fn real_roots(coeffs: &[f64]) -> Vec<f64> {
    let mut c = coeffs.to_vec();
    while c.len() > 1 && c[0] == 0.0 {
        c.remove(0);
    }
    let n = c.len() - 1;
    match n {
        0 => vec![],
        1 => vec![-c[1] / c[0]],
        _ => {
            let comp = DMatrix::from_fn(n, n, |i, j| {
                if i == 0 {
                    -c[j + 1] / c[0]
                } else if i == j + 1 {
                    1.0
                } else {
                    0.0
                }
            });
            comp.complex_eigenvalues()
                .iter()
                .filter(|z| z.im.abs() <= 1e-7 * (1.0 + z.re.abs()))
                .map(|z| z.re)
                .collect()
        }
    }
}

fn polish(f: impl Fn(f64) -> f64, mut x: f64) -> f64 {
    for _ in 0..8 {
        let h = 1e-7 * (1.0 + x.abs());
        let d = (f(x + h) - f(x - h)) / (2.0 * h);
        if d == 0.0 {
            break;
        }
        let step = f(x) / d;
        x -= step;
        if step.abs() <= 1e-15 * (1.0 + x.abs()) {
            break;
        }
    }
    x
}

/// One sample of an orbit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrbitPoint {
    pub r: f64,
    pub u: f64,
    pub theta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrbitSample {
    pub params: OrbitParams,
    pub regime: Regime,
    pub turning_points: Vec<f64>,
    pub points: Vec<OrbitPoint>,
}

/// Integration interval [a, b]. Endpoints that are turning points are divided out
/// of the radicand polynomial so q_r² keeps full relative accuracy next to them.
struct Interval<'a> {
    p: &'a OrbitParams,
    a: f64,
    b: f64,
    root_a: bool,
    root_b: bool,
    /// Deflated polynomial in u (descending), or in r for α = 0.
    rest: Vec<f64>,
}

/// Coefficients (descending) of the radicand numerator: Q(u) = 4u² q_r², reduced by u²
/// for equal masses.
fn radicand_polynomial(p: &OrbitParams) -> Vec<f64> {
    let s = p.m1 * p.m1 + p.m2 * p.m2;
    let d = p.m1 * p.m1 - p.m2 * p.m2;
    let k2 = (2.0 * p.l / p.alpha).powi(2);
    let lam = p.lambda;
    let (c4, c3, c2) = (1.0 - k2, 2.0 * k2 * lam, -k2 * lam * lam - 2.0 * s);
    if d == 0.0 {
        vec![c4, c3, c2]
    } else {
        vec![c4, c3, c2, 0.0, d * d]
    }
}

fn deflate(c: &[f64], root: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(c.len() - 1);
    let mut acc = 0.0;
    for &ci in &c[..c.len() - 1] {
        acc = acc * root + ci;
        out.push(acc);
    }
    out
}

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().fold(0.0, |acc, &ci| acc * x + ci)
}

impl<'a> Interval<'a> {
    fn new(p: &'a OrbitParams, a: f64, b: f64, tps: &[f64]) -> Self {
        let is_root = |x: f64| tps.iter().any(|&t| (t - x).abs() <= 1e-10 * x);
        let (root_a, root_b) = (is_root(a), is_root(b));
        let mut rest = if p.alpha == 0.0 {
            // r² q_r² = q² r² − L²
            vec![momentum_squared(p.lambda, p.m1, p.m2), 0.0, -p.l * p.l]
        } else {
            radicand_polynomial(p)
        };
        let var = |r: f64| if p.alpha == 0.0 { r } else { p.u(r) };
        if root_a {
            rest = deflate(&rest, var(a));
        }
        if root_b {
            rest = deflate(&rest, var(b));
        }
        Self { p, a, b, root_a, root_b, rest }
    }

    /// q_r² from the exact offsets to both endpoints.
    fn radicand(&self, r: f64, from_a: f64, from_b: f64) -> f64 {
        let p = self.p;
        if !(self.root_a || self.root_b) {
            return p.radicand(r);
        }
        if p.alpha == 0.0 {
            // only one turning point; the factor is r − r_t
            let f = if self.root_a { from_a } else { -from_b };
            return f * horner(&self.rest, r) / (r * r);
        }
        let u = p.u(r);
        let mut num = horner(&self.rest, u);
        if self.root_a {
            num *= -p.alpha * from_a / (r * self.a);
        }
        if self.root_b {
            num *= p.alpha * from_b / (r * self.b);
        }
        let d = p.m1 * p.m1 - p.m2 * p.m2;
        if d == 0.0 {
            num / 4.0
        } else {
            num / (4.0 * u * u)
        }
    }

    /// dθ/dt with r = a + (b − a)(1 − cos t)/2, which absorbs inverse-square-root
    /// branch points at either end.
    fn integrand(&self, t: f64) -> Result<f64> {
        let half = 0.5 * (self.b - self.a);
        let from_a = half * 2.0 * (0.5 * t).sin().powi(2);
        let from_b = half * 2.0 * (0.5 * t).cos().powi(2);
        let r = if from_a < from_b { self.a + from_a } else { self.b - from_b };
        let dr_dt = half * t.sin();
        let rad = self.radicand(r, from_a, from_b);
        if rad <= 0.0 {
            if dr_dt == 0.0 {
                return Ok(0.0);
            }
            return Err(Error::domain(format!("orbit leaves the allowed region at r = {r:e}")));
        }
        Ok(self.p.l / (r * r * rad.sqrt()) * dr_dt)
    }

    fn r_at(&self, t: f64) -> f64 {
        self.a + 0.5 * (self.b - self.a) * (1.0 - t.cos())
    }

    fn panel(&self, t0: f64, t1: f64, nodes: &(Vec<f64>, Vec<f64>)) -> Result<f64> {
        let (c, h) = (0.5 * (t0 + t1), 0.5 * (t1 - t0));
        let mut acc = 0.0;
        for (x, w) in nodes.0.iter().zip(&nodes.1) {
            acc += w * self.integrand(c + h * x)?;
        }
        Ok(acc * h)
    }

    fn adaptive(&self, t0: f64, t1: f64, whole: f64, depth: u32, nodes: &(Vec<f64>, Vec<f64>)) -> Result<f64> {
        let m = 0.5 * (t0 + t1);
        let left = self.panel(t0, m, nodes)?;
        let right = self.panel(m, t1, nodes)?;
        let sum = left + right;
        if (sum - whole).abs() <= 1e-13 * sum.abs() + 1e-300 {
            return Ok(sum);
        }
        if depth == 0 {
            if (sum - whole).abs() > 1e-10 * sum.abs() {
                return Err(Error::Accuracy("orbit quadrature did not converge".into()));
            }
            return Ok(sum);
        }
        Ok(self.adaptive(t0, m, left, depth - 1, nodes)? + self.adaptive(m, t1, right, depth - 1, nodes)?)
    }
}

/// ∫ dθ over [r_a, r_b] with `samples` ≥ 2 output points.
pub fn integrate_trajectory(p: &OrbitParams, r_range: (f64, f64), samples: usize) -> Result<OrbitSample> {
    let (a, b) = r_range;
    if !(a > 0.0 && b > a && b.is_finite()) {
        return Err(Error::domain(format!("radial range must satisfy 0 < r_a < r_b, got ({a}, {b})")));
    }
    if samples < 2 {
        return Err(Error::config("an orbit needs at least two samples"));
    }
    let tps = turning_points(p);
    for &r in &tps {
        // a double root at an endpoint makes the angle diverge logarithmically
        let h = 1e-6 * r;
        let slope = (p.radicand(r + h) - p.radicand(r - h)) / (2.0 * h);
        let near_end = (r - a).abs() <= 1e-9 * a || (r - b).abs() <= 1e-9 * b;
        if near_end && slope.abs() * r <= 1e-8 * (p.l * p.l / (r * r)).max(f64::MIN_POSITIVE) {
            return Err(Error::domain(format!("degenerate orbit: branch points coincide at r = {r:e}")));
        }
    }
    let iv = Interval::new(p, a, b, &tps);
    let nodes = gauss_legendre(10);
    let mut points = Vec::with_capacity(samples);
    let mut theta = 0.0;
    let dt = std::f64::consts::PI / (samples - 1) as f64;
    for i in 0..samples {
        let t = i as f64 * dt;
        if i > 0 {
            let t0 = t - dt;
            let whole = iv.panel(t0, t, &nodes)?;
            theta += iv.adaptive(t0, t, whole, 30, &nodes)?;
        }
        let r = if i + 1 == samples { b } else { iv.r_at(t) };
        points.push(OrbitPoint { r, u: p.u(r), theta });
    }
    Ok(OrbitSample { params: *p, regime: classify(p), turning_points: tps, points })
}

/// Angle swept during one radial period of a bound orbit.
pub fn radial_period_angle(p: &OrbitParams) -> Result<f64> {
    let tps = turning_points(p);
    let (a, b) = match tps.as_slice() {
        [.., a, b] if p.radicand(0.5 * (a + b)) > 0.0 => (*a, *b),
        _ => return Err(Error::domain("no bounded radial motion for these parameters")),
    };
    let sample = integrate_trajectory(p, (a, b), 2)?;
    Ok(2.0 * sample.points[1].theta)
}
