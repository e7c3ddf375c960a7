//! Clebsch-Gordan coefficients (Condon-Shortley phases) via the Racah formula.
//!
//! Arguments are doubled so that half-integers stay exact.

use crate::{Error, Result};

fn ln_factorial(n: i32) -> f64 {
    debug_assert!(n >= 0);
    (1..=n).map(|k| f64::from(k).ln()).sum()
}

fn is_even(n: i32) -> bool {
    n % 2 == 0
}

/// ⟨j1 m1 j2 m2 | J M⟩ with every argument doubled. Returns 0 when a selection rule fails.
pub fn cg2(tj1: i32, tm1: i32, tj2: i32, tm2: i32, tj: i32, tm: i32) -> f64 {
    if tj1 < 0 || tj2 < 0 || tj < 0 {
        return 0.0;
    }
    if tm1 + tm2 != tm || tm1.abs() > tj1 || tm2.abs() > tj2 || tm.abs() > tj {
        return 0.0;
    }
    if !is_even(tj1 + tm1) || !is_even(tj2 + tm2) || !is_even(tj + tm) {
        return 0.0;
    }
    if tj > tj1 + tj2 || tj < (tj1 - tj2).abs() || !is_even(tj1 + tj2 + tj) {
        return 0.0;
    }
    // halve: all combinations below are integers
    let a = (tj1 + tj2 - tj) / 2;
    let b = (tj1 - tm1) / 2;
    let c = (tj2 + tm2) / 2;
    let d = (tj - tj2 + tm1) / 2;
    let e = (tj - tj1 - tm2) / 2;
    let kmin = 0.max(-d).max(-e);
    let kmax = a.min(b).min(c);
    if kmin > kmax {
        return 0.0;
    }
    let pre = 0.5
        * (f64::from(tj + 1).ln()
            + ln_factorial((tj + tj1 - tj2) / 2)
            + ln_factorial((tj - tj1 + tj2) / 2)
            + ln_factorial(a)
            - ln_factorial((tj1 + tj2 + tj) / 2 + 1)
            + ln_factorial((tj + tm) / 2)
            + ln_factorial((tj - tm) / 2)
            + ln_factorial(b)
            + ln_factorial((tj1 + tm1) / 2)
            + ln_factorial((tj2 - tm2) / 2)
            + ln_factorial(c));
    let mut sum = 0.0;
    for k in kmin..=kmax {
        let den = ln_factorial(k)
            + ln_factorial(a - k)
            + ln_factorial(b - k)
            + ln_factorial(c - k)
            + ln_factorial(d + k)
            + ln_factorial(e + k);
        let term = (pre - den).exp();
        sum += if is_even(k) { term } else { -term };
    }
    sum
}

fn doubled(x: f64, what: &str) -> Result<i32> {
    let t = 2.0 * x;
    if !x.is_finite() || (t - t.round()).abs() > 1e-9 || t.abs() > 1e6 {
        return Err(Error::domain(format!("{what} = {x} is not a half-integer")));
    }
    Ok(t.round() as i32)
}

/// ⟨j1 m1 j2 m2 | J M⟩ for half-integer arguments.
pub fn clebsch_gordan(j1: f64, m1: f64, j2: f64, m2: f64, j: f64, m: f64) -> Result<f64> {
    let v = [
        doubled(j1, "j1")?,
        doubled(m1, "m1")?,
        doubled(j2, "j2")?,
        doubled(m2, "m2")?,
        doubled(j, "J")?,
        doubled(m, "M")?,
    ];
    if v[0] < 0 || v[2] < 0 || v[4] < 0 {
        return Err(Error::domain("angular momenta must be non-negative"));
    }
    Ok(cg2(v[0], v[1], v[2], v[3], v[4], v[5]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    /// Independent construction: lower |J J⟩ built from |j1 j1⟩|j2 (J−j1)⟩ with ladder operators,
    /// tracking coefficients in the uncoupled basis (doubled m indices).
    fn ladder_cg(tj1: i32, tj2: i32, tj: i32) -> std::collections::HashMap<(i32, i32, i32), f64> {
        use std::collections::HashMap;
        let jp = |tj: i32, tm: i32| -> f64 {
            // J− |j m⟩ = sqrt((j+m)(j−m+1)) |j m−1⟩, doubled inputs
            let j = f64::from(tj) / 2.0;
            let m = f64::from(tm) / 2.0;
            ((j + m) * (j - m + 1.0)).max(0.0).sqrt()
        };
        // highest state |J J⟩: solve J+ |J J⟩ = 0 in the basis m1 + m2 = J
        let mut top: HashMap<i32, f64> = HashMap::new();
        let mut tm1 = tj1;
        let mut coeff = 1.0;
        loop {
            let tm2 = tj - tm1;
            if tm2.abs() > tj2 || tm1 < -tj1 {
                break;
            }
            top.insert(tm1, coeff);
            // J+ acting: c(m1) a+(j1, m1 - 1 -> m1) ... recurrence from vanishing raising
            // c(m1−1) · sqrt((j1−m1+1)(j1+m1)) + c(m1) · sqrt((j2−m2)(j2+m2+1)) = 0
            let j1 = f64::from(tj1) / 2.0;
            let m1 = f64::from(tm1) / 2.0;
            let j2 = f64::from(tj2) / 2.0;
            let m2 = f64::from(tm2) / 2.0;
            let up1 = ((j1 - m1 + 1.0) * (j1 + m1)).sqrt();
            let up2 = ((j2 - m2) * (j2 + m2 + 1.0)).sqrt();
            if up1 == 0.0 {
                break;
            }
            coeff = -coeff * up2 / up1;
            tm1 -= 2;
        }
        let norm: f64 = top.values().map(|c| c * c).sum::<f64>().sqrt();
        // positive coefficient for m1 = j1 per Condon-Shortley
        let mut state: HashMap<(i32, i32), f64> =
            top.iter().map(|(&m1, &c)| ((m1, tj - m1), c / norm)).collect();
        let mut out = HashMap::new();
        let mut tm = tj;
        loop {
            for (&(m1, m2), &c) in &state {
                out.insert((m1, m2, tm), c);
            }
            if tm == -tj {
                break;
            }
            let mut next: HashMap<(i32, i32), f64> = HashMap::new();
            for (&(m1, m2), &c) in &state {
                let a = jp(tj1, m1);
                if a != 0.0 {
                    *next.entry((m1 - 2, m2)).or_default() += c * a;
                }
                let b = jp(tj2, m2);
                if b != 0.0 {
                    *next.entry((m1, m2 - 2)).or_default() += c * b;
                }
            }
            let lower = jp(tj, tm);
            for v in next.values_mut() {
                *v /= lower;
            }
            state = next;
            tm -= 2;
        }
        out
    }

    #[test]
    fn triplet_middle_component() {
        // ⟨j m 1 0 | j m⟩ = m/√(j(j+1))
        assert_relative_eq!(clebsch_gordan(1.0, 1.0, 1.0, 0.0, 1.0, 1.0).unwrap(), 0.5f64.sqrt(), max_relative = 1e-14);
        for (j, m) in [(2.0, 1.0), (3.0, -2.0), (4.0, 4.0)] {
            let expect = m / (j * (j + 1.0f64)).sqrt();
            assert_relative_eq!(clebsch_gordan(j, m, 1.0, 0.0, j, m).unwrap(), expect, max_relative = 1e-13);
        }
    }

    #[test]
    fn selection_rules() {
        assert_eq!(clebsch_gordan(1.0, 2.0, 1.0, -1.0, 1.0, 1.0).unwrap(), 0.0);
        assert_eq!(clebsch_gordan(1.0, 0.0, 1.0, 0.0, 1.0, 1.0).unwrap(), 0.0);
        assert_eq!(clebsch_gordan(1.0, 0.0, 1.0, 0.0, 3.0, 0.0).unwrap(), 0.0);
        assert!(clebsch_gordan(0.3, 0.0, 1.0, 0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn matches_ladder_construction() {
        for (tj1, tj2) in [(2, 2), (1, 2), (3, 2), (4, 2), (6, 2), (5, 1), (4, 4)] {
            let mut tj = (tj1 - tj2 as i32).abs();
            while tj <= tj1 + tj2 {
                let table = ladder_cg(tj1, tj2, tj);
                for ((m1, m2, m), c) in table {
                    let v = cg2(tj1, m1, tj2, m2, tj, m);
                    assert!((v - c).abs() < 1e-12, "({tj1} {m1} {tj2} {m2}|{tj} {m}) {v} vs {c}");
                }
                tj += 2;
            }
        }
        // the example ⟨1 1 1 −1 | 1 0⟩ = 1/√2
        assert_relative_eq!(cg2(2, 2, 2, -2, 2, 0), 0.5f64.sqrt(), max_relative = 1e-13);
    }

    proptest! {
        #[test]
        fn completeness(tj1 in 0i32..12, tj2 in 0i32..6, pick in 0i32..40, mpick in 0i32..40) {
            let lo = (tj1 - tj2).abs();
            let count = (tj1 + tj2 - lo) / 2 + 1;
            let tj = lo + 2 * (pick % count);
            let tm = -tj + 2 * (mpick % (tj + 1));
            let mut s = 0.0;
            let mut tm1 = -tj1;
            while tm1 <= tj1 {
                let c = cg2(tj1, tm1, tj2, tm - tm1, tj, tm);
                s += c * c;
                tm1 += 2;
            }
            prop_assert!((s - 1.0).abs() < 1e-12);
        }
    }
}
