//! Exact arithmetic for trigonometric number fields K = Q(cos(pi/N)):
//! membership of 2cos(2*pi*p/q) in K, the Table-1 angle lists, the x^2 - 2
//! doubling dynamics, field intersections, the Felikson discreteness table
//! and rational-angle recognition.
//!
//! Membership is decided by pure integer modular arithmetic: with
//! L = lcm(q, 2N) and t = pL/q, the value 2cos(2*pi*p/q) lies in K exactly
//! when every unit k of Z/L with k = +-1 (mod 2N) satisfies kt = +-t
//! (mod L); this is the Galois-fixing criterion for the maximal real
//! subfield of the L-th cyclotomic field over Q(cos(pi/N)).

use crate::chains::RationalAngle;
use num_integer::Integer;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum TrigError {
    #[error("field parameter N = {n} must be at least 3")]
    BadSpec { n: u64 },
    #[error("invalid cosine-argument fraction {p}/{q}: need 0 < p/q <= 1/2 in lowest terms")]
    BadCosValue { p: u64, q: u64 },
    #[error("triangle entries must be positive, got {num}/{den}")]
    NonPositiveEntry { num: i64, den: i64 },
}

/// The field K = Q(cos(pi/N)); N = 3 encodes Q, N = 4 encodes Q(sqrt 2),
/// N = 5 encodes Q(sqrt 5).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub n: u64,
}

impl FieldSpec {
    pub fn new(n: u64) -> Result<FieldSpec, TrigError> {
        if n < 3 {
            return Err(TrigError::BadSpec { n });
        }
        Ok(FieldSpec { n })
    }
}

/// Euler's totient by trial-division factorization.
pub fn euler_phi(mut m: u64) -> u64 {
    let mut result = m;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            while m % p == 0 {
                m /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result
}

/// Degree of Q(cos(pi/N)) over Q: phi(2N)/2.
pub fn field_degree(spec: FieldSpec) -> u64 {
    euler_phi(2 * spec.n) / 2
}

/// The real number 2cos(2*pi*p/q) with 0 < p/q <= 1/2 in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CosValue {
    pub p: u64,
    pub q: u64,
}

impl CosValue {
    pub fn new(p: u64, q: u64) -> Result<CosValue, TrigError> {
        if p == 0 || q == 0 || 2 * p > q || p.gcd(&q) != 1 {
            return Err(TrigError::BadCosValue { p, q });
        }
        Ok(CosValue { p, q })
    }

    /// Canonicalizes an arbitrary fraction of the full turn into the
    /// fundamental domain [0, 1/2] using cos(2*pi*s) = cos(2*pi*(1-s));
    /// returns None for s = 0 (value 2, representable only as a raw
    /// trajectory state).
    pub fn from_turn_fraction(p: i64, q: i64) -> Option<CosValue> {
        if q == 0 {
            return None;
        }
        let qq = q.unsigned_abs();
        let mut pp = p.rem_euclid(q.abs()) as u64;
        if 2 * pp > qq {
            pp = qq - pp;
        }
        if pp == 0 {
            return None;
        }
        let g = pp.gcd(&qq);
        Some(CosValue {
            p: pp / g,
            q: qq / g,
        })
    }

    pub fn value(&self) -> f64 {
        2.0 * (2.0 * PI * self.p as f64 / self.q as f64).cos()
    }
}

/// Exact membership 2cos(2*pi*p/q) in Q(cos(pi/N)) by the Galois-fixing
/// criterion (integer modular arithmetic only).
pub fn member(x: CosValue, spec: FieldSpec) -> bool {
    let two_n = 2 * spec.n;
    let l = x.q.lcm(&two_n);
    let t = x.p * (l / x.q);
    for k in 1..l {
        if k.gcd(&l) != 1 {
            continue;
        }
        let r = k % two_n;
        if r != 1 && r != two_n - 1 {
            continue;
        }
        let kt = (k % l) * (t % l) % l;
        let same = kt == t % l;
        let opposite = (kt + t) % l == 0;
        if !(same || opposite) {
            return false;
        }
    }
    true
}

/// All r in pi*Q intersect (0, 2*pi) with 2cos(r/2) in K, sorted
/// increasing. Candidates are bounded by Lehmer's criterion: the degree of
/// 2cos(2*pi*p/q) is phi(q)/2, so members require phi(q) <= 2*deg(K).
pub fn list_angles(spec: FieldSpec) -> Vec<RationalAngle> {
    let bound = 2 * field_degree(spec);
    // phi(q) >= sqrt(q/2) for all q, so phi(q) <= bound forces
    // q <= 2*(bound+1)^2; scan a safe superset.
    let q_max = 2 * (bound + 1) * (bound + 1) + 4;
    let mut out: Vec<RationalAngle> = Vec::new();
    for q in 2..=q_max {
        if euler_phi(q) > bound {
            continue;
        }
        for p in 1..q {
            // Strict p/q < 1/2: the half-turn value -2 corresponds to
            // r = 2*pi, outside (0, 2*pi).
            if 2 * p >= q || p.gcd(&q) != 1 {
                continue;
            }
            let x = CosValue { p, q };
            if member(x, spec) {
                // 2cos(r/2) = 2cos(2*pi*p/q) with r/2 in (0, pi) gives
                // r = 4*pi*p/q.
                let r = RationalAngle::new(4 * p as i64, q as i64)
                    .expect("0 < 4p/q < 2 by construction");
                out.push(r);
            }
        }
    }
    out.sort_by(|a, b| a.value().partial_cmp(&b.value()).unwrap());
    out.dedup();
    out
}

/// One state of the x -> x^2 - 2 trajectory: the turn fraction p/q in
/// [0, 1/2] (p may be 0 for the fixed value 2), its real value, and whether
/// it lies in the field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PreperStep {
    pub p: u64,
    pub q: u64,
    pub value: f64,
    pub member: bool,
}

/// The forward trajectory of x under f(x) = x^2 - 2 (angle doubling on the
/// turn fraction, reflected into [0, 1/2]), run until the first repeated
/// state; the repeat is included as the final entry.
pub fn preper_orbit(x: CosValue, spec: FieldSpec) -> Vec<PreperStep> {
    let mut seen: Vec<(u64, u64)> = Vec::new();
    let mut steps = Vec::new();
    let (mut p, mut q) = (x.p, x.q);
    loop {
        let is_member = if p == 0 {
            true // the value 2 is rational
        } else {
            member(CosValue { p, q }, spec)
        };
        let value = 2.0 * (2.0 * PI * p as f64 / q as f64).cos();
        steps.push(PreperStep {
            p,
            q,
            value,
            member: is_member,
        });
        if seen.contains(&(p, q)) {
            break;
        }
        seen.push((p, q));
        // Double the angle and reflect.
        let mut p2 = (2 * p) % q;
        if 2 * p2 > q {
            p2 = q - p2;
        }
        let g = p2.gcd(&q).max(1);
        p = p2 / g;
        q = if p2 == 0 { 1 } else { q / g };
    }
    steps
}

/// Parameter of the intersection Q(cos(pi/a)) intersect Q(cos(pi/b)) =
/// Q(cos(pi/gcd(a,b))), clamped to 3 (encoding Q) when the gcd is 1 or 2.
pub fn intersection_n(a: u64, b: u64) -> u64 {
    let g = a.gcd(&b);
    if g <= 2 {
        3
    } else {
        g
    }
}

/// A positive rational triangle parameter (angle pi/(num/den)).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rational {
    pub num: i64,
    pub den: i64,
}

impl Rational {
    pub fn new(num: i64, den: i64) -> Result<Rational, TrigError> {
        if num <= 0 || den <= 0 {
            return Err(TrigError::NonPositiveEntry { num, den });
        }
        let g = num.gcd(&den);
        Ok(Rational {
            num: num / g,
            den: den / g,
        })
    }

    pub fn integer(v: i64) -> Result<Rational, TrigError> {
        Rational::new(v, 1)
    }

    fn is_integer(&self) -> bool {
        self.den == 1
    }

    /// The integer a with self = a/2, if the denominator divides 2.
    fn twice(&self) -> Option<i64> {
        match self.den {
            1 => Some(2 * self.num),
            2 => Some(self.num),
            _ => None,
        }
    }

    fn equals_int(&self, v: i64) -> bool {
        self.den == 1 && self.num == v
    }

    /// self == v/k exactly.
    fn equals_frac(&self, v: i64, k: i64) -> bool {
        self.num as i128 * k as i128 == v as i128 * self.den as i128
    }
}

/// Discreteness of the triangle group with angles (pi/p, pi/q, pi/r) for
/// rational p, q, r: true exactly when the triple matches, up to
/// permutation, a row of the classification table
/// (a,b,c); (a/2,b,b) with 1/a+1/b < 1/2; (2,a/2,a), (a/2,a,a),
/// (3,a/3,a), (a/4,a,a), (a/2,a/2,a/2) each with a >= 7; (3,7/2,7).
/// Triples matching no row (including non-hyperbolic ones) return false.
pub fn is_discrete_triangle(p: Rational, q: Rational, r: Rational) -> Result<bool, TrigError> {
    for e in [p, q, r] {
        if e.num <= 0 || e.den <= 0 {
            return Err(TrigError::NonPositiveEntry {
                num: e.num,
                den: e.den,
            });
        }
    }
    let perms = [
        (p, q, r),
        (p, r, q),
        (q, p, r),
        (q, r, p),
        (r, p, q),
        (r, q, p),
    ];
    for (x, y, z) in perms {
        // (a, b, c) integers, hyperbolic: bc + ac + ab < abc.
        if x.is_integer() && y.is_integer() && z.is_integer() {
            let (a, b, c) = (x.num as i128, y.num as i128, z.num as i128);
            if b * c + a * c + a * b < a * b * c {
                return Ok(true);
            }
        }
        // (a/2, b, b) with 1/a + 1/b < 1/2, i.e. 2(a+b) < ab.
        if let Some(a) = x.twice() {
            if y == z && y.is_integer() {
                let b = y.num;
                if 2 * (a as i128 + b as i128) < a as i128 * b as i128 {
                    return Ok(true);
                }
            }
        }
        // (2, a/2, a) with a >= 7.
        if x.equals_int(2) && z.is_integer() && z.num >= 7 && y.equals_frac(z.num, 2) {
            return Ok(true);
        }
        // (a/2, a, a) with a >= 7.
        if y == z && y.is_integer() && y.num >= 7 && x.equals_frac(y.num, 2) {
            return Ok(true);
        }
        // (3, a/3, a) with a >= 7.
        if x.equals_int(3) && z.is_integer() && z.num >= 7 && y.equals_frac(z.num, 3) {
            return Ok(true);
        }
        // (a/4, a, a) with a >= 7.
        if y == z && y.is_integer() && y.num >= 7 && x.equals_frac(y.num, 4) {
            return Ok(true);
        }
        // (a/2, a/2, a/2) with a >= 7.
        if x == y && y == z {
            if let Some(a) = x.twice() {
                if a >= 7 {
                    return Ok(true);
                }
            }
        }
        // (3, 7/2, 7).
        if x.equals_int(3) && y.equals_frac(7, 2) && z.equals_int(7) {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Finds the unique rational multiple p*pi/q of pi within `tol` of `x` with
/// q <= max_den, if any: continued-fraction convergents of x/pi first, then
/// an exhaustive denominator sweep as a safety net for semiconvergents.
pub fn recognize_rational_angle(x: f64, max_den: i64, tol: f64) -> Option<RationalAngle> {
    if !(x > 0.0 && x < 2.0 * PI) || max_den < 1 {
        return None;
    }
    let y = x / PI;
    let test = |p: i64, q: i64| -> Option<RationalAngle> {
        if p >= 1 && q >= 1 && q <= max_den && (x - p as f64 * PI / q as f64).abs() < tol {
            RationalAngle::new(p, q).ok()
        } else {
            None
        }
    };
    // Continued-fraction convergents of y.
    let mut frac = y;
    let (mut h0, mut h1) = (1i64, y.floor() as i64);
    let (mut k0, mut k1) = (0i64, 1i64);
    for _ in 0..30 {
        if let Some(r) = test(h1, k1) {
            return Some(r);
        }
        let rem = frac - frac.floor();
        if rem.abs() < 1e-15 || k1 > max_den {
            break;
        }
        frac = 1.0 / rem;
        let a = frac.floor() as i64;
        let h2 = a.checked_mul(h1).and_then(|v| v.checked_add(h0));
        let k2 = a.checked_mul(k1).and_then(|v| v.checked_add(k0));
        match (h2, k2) {
            (Some(h2), Some(k2)) => {
                h0 = h1;
                h1 = h2;
                k0 = k1;
                k1 = k2;
            }
            _ => break,
        }
    }
    // Safety net: best approximations need not all be convergents.
    for q in 1..=max_den {
        let p = (y * q as f64).round() as i64;
        if let Some(r) = test(p, q) {
            return Some(r);
        }
    }
    None
}
