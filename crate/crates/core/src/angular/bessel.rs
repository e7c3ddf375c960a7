//! Spherical Bessel functions of the first kind.

/// j_ℓ(x) for x ≥ 0 (odd extension for x < 0).
pub fn spherical_bessel(l: u32, x: f64) -> f64 {
    if x < 0.0 {
        let v = spherical_bessel(l, -x);
        return if l % 2 == 0 { v } else { -v };
    }
    if x == 0.0 {
        return if l == 0 { 1.0 } else { 0.0 };
    }
    if x <= 1.0 {
        return power_series(l, x);
    }
    if x > f64::from(l) {
        upward(l, x)
    } else {
        miller(l, x)
    }
}

fn power_series(l: u32, x: f64) -> f64 {
    // x^ℓ/(2ℓ+1)!! Σ_k (−x²/2)^k / (k! (2ℓ+3)(2ℓ+5)…(2ℓ+2k+1))
    let mut lead = 1.0;
    for k in 1..=l {
        lead *= x / (2.0 * f64::from(k) + 1.0);
    }
    let h = -0.5 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..60 {
        let kf = f64::from(k);
        term *= h / (kf * (2.0 * f64::from(l) + 2.0 * kf + 1.0));
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    lead * sum
}

fn upward(l: u32, x: f64) -> f64 {
    let (s, c) = x.sin_cos();
    let j0 = s / x;
    if l == 0 {
        return j0;
    }
    let mut prev = j0;
    let mut cur = (s / x - c) / x;
    for n in 1..l {
        let next = (2.0 * f64::from(n) + 1.0) / x * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

fn miller(l: u32, x: f64) -> f64 {
    let start = l + 20 + (40.0 * f64::from(l.max(1))).sqrt() as u32 + x as u32;
    let mut next = 0.0;
    let mut cur = 1e-300;
    let mut at_l = 0.0;
    let mut f1 = 0.0;
    let mut n = start;
    while n > 0 {
        // f_{n−1} = (2n+1)/x f_n − f_{n+1}
        let prev = (2.0 * f64::from(n) + 1.0) / x * cur - next;
        next = cur;
        cur = prev;
        n -= 1;
        if n + 1 == l {
            at_l = next;
        }
        if n == 1 {
            f1 = cur;
        }
        if cur.abs() > 1e250 {
            cur *= 1e-250;
            next *= 1e-250;
            at_l *= 1e-250;
            f1 *= 1e-250;
        }
    }
    if l == 0 {
        at_l = cur;
    }
    let (s, c) = x.sin_cos();
    let j0 = s / x;
    let j1 = (s / x - c) / x;
    // normalize against whichever of j0, j1 is better conditioned
    if j0.abs() >= j1.abs() {
        at_l * (j0 / cur)
    } else {
        at_l * (j1 / f1)
    }
}
