//! Four-punctured-sphere toolkit: Fricke coefficients of the relative
//! character variety, Okamoto transformations in theta-space, the
//! Benedetto-Goldman SL(2,R)/SU(2) discriminant, and recovery of the angle
//! vector from a quadruple of peripheral traces.

use crate::chains::AngleVector;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Tolerance used for the boundary-trace test |t| = 2.
const BOUNDARY_EPS: f64 = 1e-12;
/// Componentwise tolerance for deduplicating trace quadruples.
const DEDUP_TOL: f64 = 1e-12;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum FrickeError {
    #[error("trace {t} lies outside [-2, 2]")]
    OutOfRange { t: f64 },
    #[error("trace {t} lies on the boundary |t| = 2")]
    BoundaryTrace { t: f64 },
    #[error("trace quadruple lifts to SU(2); no hyperbolic angle vector exists")]
    SuTwoInput,
}

/// Peripheral traces (a, b, c, d) of a 4-punctured-sphere representation,
/// each in [-2, 2].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceQuad {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl TraceQuad {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<TraceQuad, FrickeError> {
        for t in [a, b, c, d] {
            if !(t.abs() <= 2.0 + BOUNDARY_EPS) {
                return Err(FrickeError::OutOfRange { t });
            }
        }
        Ok(TraceQuad { a, b, c, d })
    }

    pub fn entries(&self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    fn from_entries(e: [f64; 4]) -> TraceQuad {
        TraceQuad {
            a: e[0],
            b: e[1],
            c: e[2],
            d: e[3],
        }
    }
}

/// Coefficients (A, B, C, D) of the relative character variety equation
/// X^2 + Y^2 + Z^2 + XYZ - AX - BY - CZ - D = 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrickeCoeffs {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

/// Trace parameters (theta_a, theta_b, theta_c, theta_d) measured in
/// multiples of pi, so the traces are t = 2cos(pi * theta). Okamoto images
/// may leave [0, 2].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaQuad {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl ThetaQuad {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> ThetaQuad {
        ThetaQuad { a, b, c, d }
    }

    pub fn entries(&self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d]
    }
}

/// A = ab + cd, B = bc + ad, C = ac + bd,
/// D = 4 - a^2 - b^2 - c^2 - d^2 - abcd.
pub fn fricke_coeffs(t: TraceQuad) -> FrickeCoeffs {
    let TraceQuad { a, b, c, d } = t;
    FrickeCoeffs {
        a: a * b + c * d,
        b: b * c + a * d,
        c: a * c + b * d,
        d: 4.0 - a * a - b * b - c * c - d * d - a * b * c * d,
    }
}

/// Left-hand side of the character variety equation; zero on the surface.
pub fn fricke_residual(x: f64, y: f64, z: f64, f: FrickeCoeffs) -> f64 {
    x * x + y * y + z * z + x * y * z - f.a * x - f.b * y - f.c * z - f.d
}

/// Okamoto transformation: row i maps theta to
/// (theta_i - sum of the others)/2 + 1.
pub fn okamoto(t: ThetaQuad) -> ThetaQuad {
    let s = t.a + t.b + t.c + t.d;
    let row = |x: f64| (2.0 * x - s) / 2.0 + 1.0;
    ThetaQuad::new(row(t.a), row(t.b), row(t.c), row(t.d))
}

/// The companion transformation with matrix rows
/// (1,-1,-1,1)/2, (-1,1,-1,1)/2, (-1,-1,1,1)/2, (1,1,1,1)/2 and no offset.
pub fn okamoto_tilde(t: ThetaQuad) -> ThetaQuad {
    let ThetaQuad { a, b, c, d } = t;
    ThetaQuad::new(
        (a - b - c + d) / 2.0,
        (-a + b - c + d) / 2.0,
        (-a - b + c + d) / 2.0,
        (a + b + c + d) / 2.0,
    )
}

/// Traces t_i = 2cos(pi * theta_i).
pub fn traces_from_theta(t: ThetaQuad) -> TraceQuad {
    let tr = |x: f64| 2.0 * (PI * x).cos();
    TraceQuad {
        a: tr(t.a),
        b: tr(t.b),
        c: tr(t.c),
        d: tr(t.d),
    }
}

fn permutations4() -> Vec<[usize; 4]> {
    let mut out = Vec::with_capacity(24);
    for i in 0..4 {
        for j in 0..4 {
            if j == i {
                continue;
            }
            for k in 0..4 {
                if k == i || k == j {
                    continue;
                }
                let l = 6 - i - j - k;
                out.push([i, j, k, l]);
            }
        }
    }
    out
}

/// Trace quadruples generated from {theta, Ok(theta), OkTilde(theta)} by
/// entry permutations and the global sign flip, with any quadruple
/// containing an entry outside the open interval (-2, 2) dropped, then
/// deduplicated (componentwise within 1e-12) and sorted.
pub fn quad_variants(theta: ThetaQuad) -> Vec<TraceQuad> {
    let bases = [theta, okamoto(theta), okamoto_tilde(theta)];
    let perms = permutations4();
    let mut out: Vec<TraceQuad> = Vec::new();
    for base in bases {
        let t = traces_from_theta(base).entries();
        for perm in &perms {
            for sign in [1.0, -1.0] {
                let cand = [
                    sign * t[perm[0]],
                    sign * t[perm[1]],
                    sign * t[perm[2]],
                    sign * t[perm[3]],
                ];
                if cand.iter().any(|v| v.abs() >= 2.0 - BOUNDARY_EPS) {
                    continue;
                }
                let dup = out.iter().any(|q| {
                    q.entries()
                        .iter()
                        .zip(cand.iter())
                        .all(|(x, y)| (x - y).abs() <= DEDUP_TOL)
                });
                if !dup {
                    out.push(TraceQuad::from_entries(cand));
                }
            }
        }
    }
    out.sort_by(|p, q| {
        p.entries()
            .partial_cmp(&q.entries())
            .expect("finite traces")
    });
    out
}

/// Verdict of the Benedetto-Goldman discriminant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LiftTarget {
    Sl2r,
    Su2,
}

impl std::fmt::Display for LiftTarget {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LiftTarget::Sl2r => write!(f, "SL(2,R)"),
            LiftTarget::Su2 => write!(f, "SU(2)"),
        }
    }
}

/// Benedetto-Goldman discriminant: the quadruple of elliptic traces arises
/// from an SL(2,R) representation exactly when
/// 2(a^2+b^2+c^2+d^2) - abcd - 16 > sqrt((4-a^2)(4-b^2)(4-c^2)(4-d^2)),
/// and from SU(2) otherwise. Traces on the boundary |t| = 2 are rejected.
pub fn benedetto_goldman(t: TraceQuad) -> Result<LiftTarget, FrickeError> {
    for v in t.entries() {
        if (v.abs() - 2.0).abs() <= BOUNDARY_EPS {
            return Err(FrickeError::BoundaryTrace { t: v });
        }
        if v.abs() > 2.0 {
            return Err(FrickeError::OutOfRange { t: v });
        }
    }
    let TraceQuad { a, b, c, d } = t;
    let lhs = 2.0 * (a * a + b * b + c * c + d * d) - a * b * c * d - 16.0;
    let rhs = ((4.0 - a * a) * (4.0 - b * b) * (4.0 - c * c) * (4.0 - d * d)).sqrt();
    if lhs > rhs {
        Ok(LiftTarget::Sl2r)
    } else {
        Ok(LiftTarget::Su2)
    }
}

/// The two sides (LHS, RHS) of the Benedetto-Goldman inequality, for
/// reporting.
pub fn benedetto_goldman_margin(t: TraceQuad) -> (f64, f64) {
    let TraceQuad { a, b, c, d } = t;
    let lhs = 2.0 * (a * a + b * b + c * c + d * d) - a * b * c * d - 16.0;
    let rhs = ((4.0 - a * a) * (4.0 - b * b) * (4.0 - c * c) * (4.0 - d * d)).sqrt();
    (lhs, rhs)
}

/// Recovers the angle vector of a hyperbolic 4-punctured-sphere
/// representation from its peripheral traces: lift each trace to
/// theta in (0, 2pi) with 2cos(theta/2) = t, replace it by
/// alpha-bar = max(theta, 2pi - theta), sort decreasingly, and decide the
/// last entry by the sign of abcd: abcd < 0 keeps alpha-bar, abcd > 0
/// flips the smallest entry to 2pi - alpha-bar, abcd = 0 means the smallest
/// entry is pi and no decision is needed.
pub fn angle_vector_from_traces(t: TraceQuad) -> Result<AngleVector, FrickeError> {
    match benedetto_goldman(t)? {
        LiftTarget::Sl2r => {}
        LiftTarget::Su2 => return Err(FrickeError::SuTwoInput),
    }
    let mut bars: Vec<f64> = t
        .entries()
        .iter()
        .map(|&v| {
            let theta = 2.0 * (v / 2.0).acos();
            theta.max(2.0 * PI - theta)
        })
        .collect();
    bars.sort_by(|p, q| q.partial_cmp(p).expect("finite angles"));
    let prod = t.a * t.b * t.c * t.d;
    if prod > 0.0 {
        bars[3] = 2.0 * PI - bars[3];
    }
    Ok(AngleVector::from_floats(&bars).expect("entries lie strictly inside (0, 2*pi)"))
}

/// Traces t_i = +-2cos(alpha_i/2) with the signs chosen consistently with
/// the angle-extraction convention: all alpha_i > pi forces abcd < 0 (flip
/// the entry of smallest alpha), an entry below pi forces abcd > 0, and an
/// entry equal to pi (zero trace) leaves abcd = 0 with nothing to decide.
pub fn traces_for_alpha(alpha: &[f64; 4]) -> Result<TraceQuad, FrickeError> {
    let mut t: Vec<f64> = alpha.iter().map(|&a| 2.0 * (a / 2.0).cos()).collect();
    let prod: f64 = t.iter().product();
    let min_idx = alpha
        .iter()
        .enumerate()
        .min_by(|(_, x), (_, y)| x.partial_cmp(y).expect("finite angles"))
        .map(|(i, _)| i)
        .expect("non-empty");
    let min_alpha = alpha[min_idx];
    if min_alpha > PI && prod > 0.0 {
        t[min_idx] = -t[min_idx];
    } else if min_alpha < PI && prod < 0.0 {
        t[min_idx] = -t[min_idx];
    }
    TraceQuad::new(t[0], t[1], t[2], t[3])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chains::validate_alpha;

    const TOL: f64 = 1e-9;

    fn approx_eq(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    /// Deterministic linear congruential generator for property samples.
    struct Lcg(u64);

    impl Lcg {
        fn next_f64(&mut self) -> f64 {
            self.0 = self
                .0
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (self.0 >> 11) as f64 / (1u64 << 53) as f64
        }
    }

    #[test]
    fn coeff_examples() {
        let f = fricke_coeffs(TraceQuad::new(0.0, 0.0, 0.0, 0.0).unwrap());
        assert_eq!((f.a, f.b, f.c, f.d), (0.0, 0.0, 0.0, 4.0));
        let f = fricke_coeffs(TraceQuad::new(2.0, 2.0, 2.0, 2.0).unwrap());
        assert_eq!((f.a, f.b, f.c, f.d), (8.0, 8.0, 8.0, -28.0));
    }

    #[test]
    fn coeff_double_sign_flip() {
        // (a,b,c,d) -> (-a,-b,c,d) keeps A and D, negates B and C.
        let t = TraceQuad::new(0.3, -1.1, 0.7, 1.9).unwrap();
        let f = fricke_coeffs(t);
        let g = fricke_coeffs(TraceQuad::new(-t.a, -t.b, t.c, t.d).unwrap());
        assert!(approx_eq(g.a, f.a, TOL));
        assert!(approx_eq(g.b, -f.b, TOL));
        assert!(approx_eq(g.c, -f.c, TOL));
        assert!(approx_eq(g.d, f.d, TOL));
    }

    #[test]
    fn residual_examples() {
        let f = FrickeCoeffs {
            a: 0.0,
            b: 0.0,
            c: 0.0,
            d: 4.0,
        };
        assert_eq!(fricke_residual(0.0, 0.0, 0.0, f), -4.0);
        assert_eq!(fricke_residual(2.0, 2.0, 2.0, f), 16.0);
    }

    #[test]
    fn okamoto_examples() {
        let o = okamoto(ThetaQuad::new(1.0, 1.0, 1.0, 1.0));
        assert_eq!(o.entries(), [0.0, 0.0, 0.0, 0.0]);
        let o = okamoto_tilde(ThetaQuad::new(1.0, 1.0, 1.0, 1.0));
        assert_eq!(o.entries(), [0.0, 0.0, 0.0, 2.0]);
    }

    #[test]
    fn okamoto_preserves_fricke_coeffs() {
        let mut rng = Lcg(0x5eed_0001);
        for _ in 0..100 {
            let th = ThetaQuad::new(
                2.0 * rng.next_f64(),
                2.0 * rng.next_f64(),
                2.0 * rng.next_f64(),
                2.0 * rng.next_f64(),
            );
            let f0 = fricke_coeffs(traces_from_theta(th));
            for img in [okamoto(th), okamoto_tilde(th)] {
                let f1 = fricke_coeffs(traces_from_theta(img));
                assert!(approx_eq(f1.a, f0.a, TOL), "A: {} vs {}", f1.a, f0.a);
                assert!(approx_eq(f1.b, f0.b, TOL));
                assert!(approx_eq(f1.c, f0.c, TOL));
                assert!(approx_eq(f1.d, f0.d, TOL));
            }
        }
    }

    #[test]
    fn variants_boundary_case_is_empty() {
        assert!(quad_variants(ThetaQuad::new(0.0, 0.0, 0.0, 0.0)).is_empty());
    }

    #[test]
    fn variants_share_coeffs_and_respect_bound() {
        let th = ThetaQuad::new(0.3, 0.45, 0.8, 1.25);
        let vars = quad_variants(th);
        assert!(!vars.is_empty());
        assert!(vars.len() <= 144);
        let f0 = fricke_coeffs(traces_from_theta(th));
        for v in &vars {
            assert!(v.entries().iter().all(|t| t.abs() < 2.0));
            let f = fricke_coeffs(*v);
            assert!(approx_eq(f.d, f0.d, TOL), "D differs: {} vs {}", f.d, f0.d);
            // A, B, C may be permuted among themselves by entry
            // permutations; compare as multisets.
            let mut s0 = [f0.a, f0.b, f0.c];
            let mut s1 = [f.a, f.b, f.c];
            s0.sort_by(|x, y| x.partial_cmp(y).unwrap());
            s1.sort_by(|x, y| x.partial_cmp(y).unwrap());
            for (x, y) in s0.iter().zip(s1.iter()) {
                assert!(approx_eq(*x, *y, TOL));
            }
        }
    }

    #[test]
    fn bg_frozen_margins() {
        // (alpha vector, expected LHS, expected RHS), margins frozen from
        // independent evaluation.
        let cases: [([f64; 4], f64, f64); 5] = [
            (
                [10.0 * PI / 7.0, 12.0 * PI / 7.0, 12.0 * PI / 7.0, 12.0 * PI / 7.0],
                13.887690830, 1.021770264,
            ),
            (
                [4.0 * PI / 3.0, 12.0 * PI / 7.0, 12.0 * PI / 7.0, 12.0 * PI / 7.0],
                11.332732698, 1.131802729,
            ),
            (
                [11.0 * PI / 6.0, 11.0 * PI / 6.0, 11.0 * PI / 6.0, 11.0 * PI / 6.0],
                27.784609691, 0.071796770,
            ),
            (
                [7.0 * PI / 4.0, 7.0 * PI / 4.0, 7.0 * PI / 4.0, 7.0 * PI / 4.0],
                22.970562748, 0.343145751,
            ),
            (
                [7.0 * PI / 4.0, 7.0 * PI / 4.0, 7.0 * PI / 4.0, PI],
                4.485281374, 0.896683058,
            ),
        ];
        for (alpha, lhs_exp, rhs_exp) in cases {
            let t = traces_for_alpha(&alpha).unwrap();
            let (lhs, rhs) = benedetto_goldman_margin(t);
            assert!(approx_eq(lhs, lhs_exp, 1e-6), "LHS {lhs} vs {lhs_exp}");
            assert!(approx_eq(rhs, rhs_exp, 1e-6), "RHS {rhs} vs {rhs_exp}");
            assert_eq!(benedetto_goldman(t).unwrap(), LiftTarget::Sl2r);
        }
    }

    #[test]
    fn bg_su2_and_boundary() {
        let t = TraceQuad::new(0.0, 0.0, 0.0, 0.1).unwrap();
        assert_eq!(benedetto_goldman(t).unwrap(), LiftTarget::Su2);
        let t = TraceQuad::new(2.0, 0.0, 0.0, 0.0).unwrap();
        assert_eq!(
            benedetto_goldman(t),
            Err(FrickeError::BoundaryTrace { t: 2.0 })
        );
        assert!(TraceQuad::new(2.5, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn bg_symmetries() {
        let t = TraceQuad::new(0.4, -1.2, 1.7, -0.3).unwrap();
        let base = benedetto_goldman(t).unwrap();
        let e = t.entries();
        for perm in permutations4() {
            let p = TraceQuad::from_entries([e[perm[0]], e[perm[1]], e[perm[2]], e[perm[3]]]);
            assert_eq!(benedetto_goldman(p).unwrap(), base);
            let m = TraceQuad::from_entries([-e[perm[0]], -e[perm[1]], -e[perm[2]], -e[perm[3]]]);
            assert_eq!(benedetto_goldman(m).unwrap(), base);
        }
    }

    #[test]
    fn angle_vector_round_trip() {
        let mut rng = Lcg(0x5eed_0002);
        let mut accepted = 0;
        while accepted < 200 {
            let t = TraceQuad::new(
                4.0 * rng.next_f64() - 2.0,
                4.0 * rng.next_f64() - 2.0,
                4.0 * rng.next_f64() - 2.0,
                4.0 * rng.next_f64() - 2.0,
            )
            .unwrap();
            match benedetto_goldman(t) {
                Ok(LiftTarget::Sl2r) => {}
                _ => continue,
            }
            accepted += 1;
            let alpha = angle_vector_from_traces(t).unwrap();
            let vals = alpha.values();
            let total: f64 = vals.iter().sum();
            assert!(total > 6.0 * PI + 1e-9, "sum {} not above 6*pi", total);
            validate_alpha(&alpha).expect("angle condition");
            // Trace magnitudes are reproduced componentwise as multisets.
            let mut got: Vec<f64> = vals.iter().map(|&a| (2.0 * (a / 2.0).cos()).abs()).collect();
            let mut want: Vec<f64> = t.entries().iter().map(|v| v.abs()).collect();
            got.sort_by(|x, y| x.partial_cmp(y).unwrap());
            want.sort_by(|x, y| x.partial_cmp(y).unwrap());
            for (g, w) in got.iter().zip(want.iter()) {
                assert!(approx_eq(*g, *w, 1e-9), "|t| mismatch {g} vs {w}");
            }
            // The sign convention reproduces the product sign.
            let arr = [vals[0], vals[1], vals[2], vals[3]];
            let back = traces_for_alpha(&arr).unwrap();
            let p0 = t.a * t.b * t.c * t.d;
            let p1 = back.a * back.b * back.c * back.d;
            assert!(
                p0.abs() < 1e-12 || p0.signum() == p1.signum(),
                "product sign mismatch: {p0} vs {p1}"
            );
        }
    }

    #[test]
    fn angle_vector_rejects_su2() {
        let t = TraceQuad::new(0.0, 0.0, 0.0, 0.1).unwrap();
        assert_eq!(angle_vector_from_traces(t), Err(FrickeError::SuTwoInput));
    }

    #[test]
    fn angle_vector_zero_trace_case() {
        // abcd = 0: the smallest entry equals pi and stays put.
        let t = TraceQuad::new(0.0, -1.9, -1.9, -1.9).unwrap();
        assert_eq!(benedetto_goldman(t).unwrap(), LiftTarget::Sl2r);
        let alpha = angle_vector_from_traces(t).unwrap();
        let vals = alpha.values();
        assert!(approx_eq(vals[3], PI, 1e-12));
        assert!(vals.windows(2).all(|w| w[0] >= w[1] - 1e-12));
    }
}
