//! Triangle chains, action-angle coordinates and the moment polytope.
//!
//! A chain for peripheral angles alpha_1..alpha_n consists of n-2 clockwise
//! hyperbolic triangles sharing vertices B_1..B_{n-3}: the first triangle is
//! (C1, C2, B1) with angles (pi - a1/2, pi - a2/2, pi - b1/2), the middle
//! triangle T_k is (B_{k-1}, C_{k+1}, B_k) with angles (b_{k-1}/2,
//! pi - a_{k+1}/2, pi - b_k/2), and the last is (B_{n-3}, C_{n-1}, C_n) with
//! angles (b_{n-3}/2, pi - a_{n-1}/2, pi - a_n/2). The action coordinates
//! beta determine all triangle shapes; the angle coordinates gamma_i measure
//! the anticlockwise angle at B_i from the ray B_i -> C_{i+2} to the ray
//! B_i -> C_{i+1}. A triangle with zero polytope slack collapses to a point
//! and removes one gamma coordinate.

use crate::hyperbolic::{
    acw_between, direction, point_at, side_from_angles, wrap_angle, HPoint, HypError, TWO_PI,
};
use num_integer::Integer;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;

/// Slack below which a triangle counts as degenerate.
pub const DEGEN_SLACK_TOL: f64 = 1e-9;
/// Euclidean coordinate distance below which chain vertices count as
/// coincident.
pub const COINCIDE_TOL: f64 = 1e-7;
/// Tolerance for chain-consistency checks in extraction.
pub const CHAIN_CHECK_TOL: f64 = 1e-6;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ChainError {
    #[error("invalid rational angle {num}*pi/{den}: value must lie in (0, 2*pi)")]
    BadRational { num: i64, den: i64 },
    #[error("angle entry {value} outside (0, 2*pi)")]
    BadAngleValue { value: f64 },
    #[error("need at least {min} punctures, got {n}")]
    TooFewPunctures { n: usize, min: usize },
    #[error("angle condition violated: sum(alpha) = {sum} <= 2*pi*(n-1) = {bound}")]
    AngleCondition { sum: f64, bound: f64 },
    #[error("expected {expected} entries for {what}, got {got}")]
    WrongLength {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("moment polytope violated: slack[{index}] = {slack}")]
    PolytopeViolation { index: usize, slack: f64 },
    #[error("degeneracy mask disagrees with polytope slacks at triangle {index}")]
    MaskMismatch { index: usize },
    #[error("gamma[{slot}] must be present for this degeneracy pattern")]
    MissingGamma { slot: usize },
    #[error("gamma[{slot}] must be absent for this degeneracy pattern")]
    UnexpectedGamma { slot: usize },
    #[error("beta must be strictly increasing: beta[{index}] >= beta[{index_next}]")]
    BetaNotIncreasing { index: usize, index_next: usize },
    #[error("chain violates invariants: {0}")]
    InvariantViolation(String),
    #[error(transparent)]
    Hyp(#[from] HypError),
}

/// An exact angle num*pi/den in (0, 2*pi), stored in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct RationalAngle {
    pub num: i64,
    pub den: i64,
}

impl RationalAngle {
    pub fn new(num: i64, den: i64) -> Result<RationalAngle, ChainError> {
        if den == 0 || num <= 0 || den < 0 || num >= 2 * den {
            return Err(ChainError::BadRational { num, den });
        }
        let g = num.gcd(&den);
        Ok(RationalAngle {
            num: num / g,
            den: den / g,
        })
    }

    pub fn value(&self) -> f64 {
        self.num as f64 * PI / self.den as f64
    }
}

impl fmt::Display for RationalAngle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.num, self.den) {
            (1, 1) => write!(f, "pi"),
            (n, 1) => write!(f, "{n}pi"),
            (1, d) => write!(f, "pi/{d}"),
            (n, d) => write!(f, "{n}pi/{d}"),
        }
    }
}

impl<'de> Deserialize<'de> for RationalAngle {
    fn deserialize<D>(deserializer: D) -> Result<Self, D::Error>
    where
        D: serde::Deserializer<'de>,
    {
        #[derive(Deserialize)]
        struct Raw {
            num: i64,
            den: i64,
        }
        let raw = Raw::deserialize(deserializer)?;
        RationalAngle::new(raw.num, raw.den).map_err(serde::de::Error::custom)
    }
}

/// An angle that is either an exact rational multiple of pi or a float.
/// Serialized as {"num": int, "den": int} or {"float": real}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Angle {
    Rational(RationalAngle),
    Float { float: f64 },
}

impl Angle {
    pub fn rational(num: i64, den: i64) -> Result<Angle, ChainError> {
        Ok(Angle::Rational(RationalAngle::new(num, den)?))
    }

    pub fn float(v: f64) -> Angle {
        Angle::Float { float: v }
    }

    pub fn value(&self) -> f64 {
        match self {
            Angle::Rational(r) => r.value(),
            Angle::Float { float } => *float,
        }
    }

    pub fn as_rational(&self) -> Option<RationalAngle> {
        match self {
            Angle::Rational(r) => Some(*r),
            Angle::Float { .. } => None,
        }
    }
}

impl From<RationalAngle> for Angle {
    fn from(r: RationalAngle) -> Angle {
        Angle::Rational(r)
    }
}

/// The peripheral angle vector (alpha_1, ..., alpha_n).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AngleVector {
    pub entries: Vec<Angle>,
}

impl AngleVector {
    pub fn new(entries: Vec<Angle>) -> Result<AngleVector, ChainError> {
        for e in &entries {
            let v = e.value();
            if !(v > 0.0 && v < TWO_PI) {
                return Err(ChainError::BadAngleValue { value: v });
            }
        }
        Ok(AngleVector { entries })
    }

    /// Builds an exact vector from (num, den) pairs.
    pub fn from_rationals(pairs: &[(i64, i64)]) -> Result<AngleVector, ChainError> {
        let entries = pairs
            .iter()
            .map(|&(num, den)| Ok(Angle::Rational(RationalAngle::new(num, den)?)))
            .collect::<Result<Vec<_>, ChainError>>()?;
        Ok(AngleVector { entries })
    }

    pub fn from_floats(values: &[f64]) -> Result<AngleVector, ChainError> {
        AngleVector::new(values.iter().map(|&v| Angle::float(v)).collect())
    }

    pub fn n(&self) -> usize {
        self.entries.len()
    }

    pub fn values(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.value()).collect()
    }
}

/// Validates the angle condition and returns the excess
/// lambda = sum(alpha) - 2*pi*(n-1) > 0.
pub fn validate_alpha(alpha: &AngleVector) -> Result<f64, ChainError> {
    let n = alpha.n();
    if n < 3 {
        return Err(ChainError::TooFewPunctures { n, min: 3 });
    }
    for e in &alpha.entries {
        let v = e.value();
        if !(v > 0.0 && v < TWO_PI) {
            return Err(ChainError::BadAngleValue { value: v });
        }
    }
    let sum: f64 = alpha.values().iter().sum();
    let bound = TWO_PI * (n as f64 - 1.0);
    let lambda = sum - bound;
    if lambda <= 0.0 {
        return Err(ChainError::AngleCondition { sum, bound });
    }
    Ok(lambda)
}

/// Action-angle coordinates: beta_1 < ... < beta_{n-3}, optional gamma_i in
/// [0, 2*pi), and one degeneracy flag per triangle. Gamma entries are absent
/// exactly where the degeneracy pattern removes them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionAngle {
    pub beta: Vec<f64>,
    pub gamma: Vec<Option<f64>>,
    pub degenerate: Vec<bool>,
}

/// Which gamma slots survive a given triangle degeneracy pattern.
///
/// For a maximal run of degenerate triangles T_a..T_b (1-indexed among the
/// n-2 triangles): a run touching the start removes slots 1..b; a run
/// touching the end removes slots a-1..n-3; an interior run removes slots
/// a-1..b-1 while slot b survives and carries the merged angle.
pub fn gamma_presence_mask(degenerate: &[bool]) -> Vec<bool> {
    let tri_count = degenerate.len();
    let slot_count = tri_count.saturating_sub(1);
    let mut present = vec![true; slot_count];
    let mut t = 0;
    while t < tri_count {
        if !degenerate[t] {
            t += 1;
            continue;
        }
        let a = t + 1; // 1-indexed run start
        while t < tri_count && degenerate[t] {
            t += 1;
        }
        let b = t; // 1-indexed run end
        let (lo, hi) = if a == 1 {
            (1, b)
        } else if b == tri_count {
            (a - 1, slot_count)
        } else {
            (a - 1, b - 1)
        };
        for s in lo..=hi.min(slot_count) {
            present[s - 1] = false;
        }
    }
    present
}

impl ActionAngle {
    /// Builds coordinates from beta and optional gamma entries, deriving the
    /// degeneracy mask from the polytope slacks for `alpha` and validating
    /// the gamma presence pattern against it.
    pub fn from_parts(
        alpha: &AngleVector,
        beta: Vec<f64>,
        gamma: Vec<Option<f64>>,
    ) -> Result<ActionAngle, ChainError> {
        let n = alpha.n();
        if n < 4 {
            return Err(ChainError::TooFewPunctures { n, min: 4 });
        }
        if beta.len() != n - 3 {
            return Err(ChainError::WrongLength {
                what: "beta",
                expected: n - 3,
                got: beta.len(),
            });
        }
        if gamma.len() != n - 3 {
            return Err(ChainError::WrongLength {
                what: "gamma",
                expected: n - 3,
                got: gamma.len(),
            });
        }
        let slacks = moment_polytope_check(alpha, &beta);
        for (idx, &s) in slacks.iter().enumerate() {
            if s < -DEGEN_SLACK_TOL {
                return Err(ChainError::PolytopeViolation { index: idx, slack: s });
            }
        }
        let degenerate: Vec<bool> = slacks.iter().map(|&s| s <= DEGEN_SLACK_TOL).collect();
        let gamma: Vec<Option<f64>> = gamma
            .into_iter()
            .map(|g| g.map(wrap_angle))
            .collect();
        let coords = ActionAngle {
            beta,
            gamma,
            degenerate,
        };
        coords.validate(alpha)?;
        Ok(coords)
    }

    /// Checks all structural invariants against `alpha`.
    pub fn validate(&self, alpha: &AngleVector) -> Result<(), ChainError> {
        let n = alpha.n();
        if self.beta.len() != n - 3 {
            return Err(ChainError::WrongLength {
                what: "beta",
                expected: n - 3,
                got: self.beta.len(),
            });
        }
        if self.gamma.len() != n - 3 {
            return Err(ChainError::WrongLength {
                what: "gamma",
                expected: n - 3,
                got: self.gamma.len(),
            });
        }
        if self.degenerate.len() != n - 2 {
            return Err(ChainError::WrongLength {
                what: "degenerate",
                expected: n - 2,
                got: self.degenerate.len(),
            });
        }
        for b in &self.beta {
            if !(*b > 0.0 && *b < TWO_PI) {
                return Err(ChainError::BadAngleValue { value: *b });
            }
        }
        for k in 0..self.beta.len().saturating_sub(1) {
            if self.beta[k + 1] <= self.beta[k] - DEGEN_SLACK_TOL {
                return Err(ChainError::BetaNotIncreasing {
                    index: k,
                    index_next: k + 1,
                });
            }
        }
        let slacks = moment_polytope_check(alpha, &self.beta);
        for (idx, &s) in slacks.iter().enumerate() {
            if s < -DEGEN_SLACK_TOL {
                return Err(ChainError::PolytopeViolation { index: idx, slack: s });
            }
            if self.degenerate[idx] != (s <= DEGEN_SLACK_TOL) {
                return Err(ChainError::MaskMismatch { index: idx });
            }
        }
        let present = gamma_presence_mask(&self.degenerate);
        for (slot0, (&p, g)) in present.iter().zip(self.gamma.iter()).enumerate() {
            match (p, g) {
                (true, None) => return Err(ChainError::MissingGamma { slot: slot0 + 1 }),
                (false, Some(_)) => {
                    return Err(ChainError::UnexpectedGamma { slot: slot0 + 1 })
                }
                _ => {}
            }
        }
        for g in self.gamma.iter().flatten() {
            if !(*g >= 0.0 && *g < TWO_PI) {
                return Err(ChainError::BadAngleValue { value: *g });
            }
        }
        Ok(())
    }
}

/// The polytope slacks for beta given alpha: slack[t] is the distance of
/// triangle t+1 from degeneracy; valid coordinates have all slacks >= 0 and
/// a zero slack collapses the corresponding triangle.
pub fn moment_polytope_check(alpha: &AngleVector, beta: &[f64]) -> Vec<f64> {
    let a = alpha.values();
    let n = a.len();
    let mut slacks = Vec::with_capacity(n - 2);
    slacks.push(beta[0] - (2.0 * TWO_PI - a[0] - a[1]));
    for t in 2..=n - 3 {
        slacks.push(beta[t - 1] - beta[t - 2] - (TWO_PI - a[t]));
    }
    slacks.push((a[n - 2] + a[n - 1] - TWO_PI) - beta[n - 4]);
    slacks
}

/// A chain of n-2 hyperbolic triangles: exterior vertices C_1..C_n and
/// shared vertices B_1..B_{n-3}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriangleChain {
    pub exterior: Vec<HPoint>,
    pub shared: Vec<HPoint>,
}

impl TriangleChain {
    pub fn n(&self) -> usize {
        self.exterior.len()
    }

    /// Vertices of triangle `t` (1-indexed, 1 <= t <= n-2) in chain order.
    pub fn triangle(&self, t: usize) -> (HPoint, HPoint, HPoint) {
        let n = self.n();
        if t == 1 {
            (self.exterior[0], self.exterior[1], self.shared[0])
        } else if t == n - 2 {
            (
                self.shared[n - 4],
                self.exterior[n - 2],
                self.exterior[n - 1],
            )
        } else {
            (self.shared[t - 2], self.exterior[t], self.shared[t - 1])
        }
    }

    fn triangle_degenerate(&self, t: usize) -> bool {
        let (p, q, r) = self.triangle(t);
        coincide(p, q) && coincide(q, r) && coincide(p, r)
    }
}

fn coincide(p: HPoint, q: HPoint) -> bool {
    (p.x - q.x).abs() <= COINCIDE_TOL && (p.y - q.y).abs() <= COINCIDE_TOL
}

/// Unsigned interior angle at `p` of the triangle (p, q, r), in (0, pi).
fn corner_angle(p: HPoint, q: HPoint, r: HPoint) -> Result<f64, ChainError> {
    let d1 = direction(p, q)?;
    let d2 = direction(p, r)?;
    let diff = wrap_angle(d1 - d2);
    Ok(diff.min(TWO_PI - diff))
}

/// Builds the canonical chain for `coords`: C1 = (0,1) and the edge C1->C2
/// launched straight up; each triangle is laid out clockwise, and the ray to
/// the next triangle's exterior vertex is the previous exterior ray rotated
/// clockwise by the corresponding gamma.
pub fn build_chain(alpha: &AngleVector, coords: &ActionAngle) -> Result<TriangleChain, ChainError> {
    let n = alpha.n();
    if n < 4 {
        return Err(ChainError::TooFewPunctures { n, min: 4 });
    }
    validate_alpha(alpha)?;
    coords.validate(alpha)?;
    let a: Vec<f64> = alpha.values().iter().map(|v| PI - v / 2.0).collect();
    let beta = &coords.beta;
    let deg = &coords.degenerate;

    let mut exterior: Vec<HPoint> = Vec::with_capacity(n);
    let mut shared: Vec<HPoint> = Vec::with_capacity(n - 3);
    let c1 = HPoint::i();
    // (hub, exterior-ray direction at hub) after the last regular triangle.
    let mut refdir: Option<f64> = None;
    let mut hub = c1;

    // First triangle (C1, C2, B1) with angles (a1, a2, pi - beta1/2).
    if deg[0] {
        exterior.push(c1);
        exterior.push(c1);
        shared.push(c1);
    } else {
        let ang_b = PI - beta[0] / 2.0;
        let edge_c = side_from_angles(a[0], a[1], ang_b)?;
        let edge_b = side_from_angles(a[0], ang_b, a[1])?;
        let c2 = point_at(c1, PI / 2.0, edge_c);
        let b1 = point_at(c1, PI / 2.0 - a[0], edge_b);
        exterior.push(c1);
        exterior.push(c2);
        shared.push(b1);
        hub = b1;
        refdir = Some(direction(b1, c2)?);
    }

    // Middle triangles T_t = (B_{t-1}, C_{t+1}, B_t), t = 2..n-3.
    for t in 2..=n - 3 {
        if deg[t - 1] {
            exterior.push(hub);
            shared.push(hub);
            continue;
        }
        let phi = launch_direction(refdir, &coords.gamma, t - 1)?;
        let ang_hub = beta[t - 2] / 2.0;
        let ang_c = a[t];
        let ang_b = PI - beta[t - 1] / 2.0;
        let edge_c = side_from_angles(ang_hub, ang_c, ang_b)?;
        let edge_b = side_from_angles(ang_hub, ang_b, ang_c)?;
        let c_new = point_at(hub, phi, edge_c);
        let b_new = point_at(hub, phi - ang_hub, edge_b);
        exterior.push(c_new);
        shared.push(b_new);
        hub = b_new;
        refdir = Some(direction(b_new, c_new)?);
    }

    // Last triangle (B_{n-3}, C_{n-1}, C_n) with angles
    // (beta_{n-3}/2, a_{n-1}, a_n).
    if deg[n - 3] {
        exterior.push(hub);
        exterior.push(hub);
    } else {
        let phi = launch_direction(refdir, &coords.gamma, n - 3)?;
        let ang_hub = beta[n - 4] / 2.0;
        let edge_first = side_from_angles(ang_hub, a[n - 2], a[n - 1])?;
        let edge_second = side_from_angles(ang_hub, a[n - 1], a[n - 2])?;
        let c_second_last = point_at(hub, phi, edge_first);
        let c_last = point_at(hub, phi - ang_hub, edge_second);
        exterior.push(c_second_last);
        exterior.push(c_last);
    }

    let chain = TriangleChain { exterior, shared };
    let lambda = validate_alpha(alpha)?;
    let total: f64 = triangle_areas(&chain).iter().sum();
    if (total - lambda / 2.0).abs() > 1e-7 {
        return Err(ChainError::InvariantViolation(format!(
            "total area {total} differs from lambda/2 = {}",
            lambda / 2.0
        )));
    }
    Ok(chain)
}

/// Direction of the ray from the current hub to the next exterior vertex:
/// the previous exterior ray rotated clockwise by gamma at the given slot
/// (1-indexed), or straight up when no regular triangle precedes.
fn launch_direction(
    refdir: Option<f64>,
    gamma: &[Option<f64>],
    slot: usize,
) -> Result<f64, ChainError> {
    match refdir {
        None => Ok(PI / 2.0),
        Some(r) => {
            let g = gamma[slot - 1].ok_or(ChainError::MissingGamma { slot })?;
            Ok(r - g)
        }
    }
}

/// Recovers action-angle coordinates from a chain: beta from the interior
/// angles at the shared vertices, gamma from the calibrated ray convention,
/// degeneracy from vertex coincidence.
pub fn extract_coords(chain: &TriangleChain, alpha: &AngleVector) -> Result<ActionAngle, ChainError> {
    let n = alpha.n();
    if n < 4 {
        return Err(ChainError::TooFewPunctures { n, min: 4 });
    }
    if chain.exterior.len() != n {
        return Err(ChainError::WrongLength {
            what: "exterior",
            expected: n,
            got: chain.exterior.len(),
        });
    }
    if chain.shared.len() != n - 3 {
        return Err(ChainError::WrongLength {
            what: "shared",
            expected: n - 3,
            got: chain.shared.len(),
        });
    }
    let a_vals = alpha.values();
    let degenerate: Vec<bool> = (1..=n - 2).map(|t| chain.triangle_degenerate(t)).collect();

    // Consistency: regular triangles must show the prescribed angle at their
    // exterior vertex.
    for t in 1..=n - 2 {
        if degenerate[t - 1] {
            continue;
        }
        let (p, q, r) = chain.triangle(t);
        let expected = PI - exterior_alpha(&a_vals, t, n) / 2.0;
        let got = corner_angle(q, p, r)?;
        if (got - expected).abs() > CHAIN_CHECK_TOL {
            return Err(ChainError::InvariantViolation(format!(
                "triangle {t} has exterior angle {got}, expected {expected}"
            )));
        }
    }

    // beta from shared-vertex angles; pinned to the wall value when both
    // incident triangles are degenerate.
    let mut beta = vec![0.0f64; n - 3];
    for k in 1..=n - 3 {
        if !degenerate[k - 1] {
            // Angle of T_k at B_k is pi - beta_k/2.
            let (p, q, r) = chain.triangle(k);
            let ang = corner_angle(r, p, q)?;
            beta[k - 1] = 2.0 * (PI - ang);
        } else if !degenerate[k] {
            // Angle of T_{k+1} at B_k is beta_k/2.
            let (p, q, r) = chain.triangle(k + 1);
            let ang = corner_angle(p, q, r)?;
            beta[k - 1] = 2.0 * ang;
        } else if k == 1 {
            beta[0] = 2.0 * TWO_PI - a_vals[0] - a_vals[1];
        } else {
            beta[k - 1] = beta[k - 2] + TWO_PI - a_vals[k];
        }
    }

    // gamma via the dual of the construction walk.
    let mut gamma: Vec<Option<f64>> = vec![None; n - 3];
    let mut refdir: Option<f64> = None;
    let mut hub = chain.exterior[0];
    if !degenerate[0] {
        hub = chain.shared[0];
        refdir = Some(direction(chain.shared[0], chain.exterior[1])?);
    }
    for t in 2..=n - 2 {
        if degenerate[t - 1] {
            continue;
        }
        let target = chain.exterior[t]; // C_{t+1}
        if let Some(r) = refdir {
            let phi = direction(hub, target)?;
            let mut g = acw_between(phi, r);
            // Rounding can land an exact zero just below 2*pi; keep it at 0.
            if TWO_PI - g < DEGEN_SLACK_TOL {
                g = 0.0;
            }
            gamma[t - 2] = Some(g);
        }
        if t <= n - 3 {
            hub = chain.shared[t - 1];
            refdir = Some(direction(chain.shared[t - 1], target)?);
        }
    }

    let present = gamma_presence_mask(&degenerate);
    for (slot0, (&p, g)) in present.iter().zip(gamma.iter()).enumerate() {
        if p != g.is_some() {
            return Err(ChainError::InvariantViolation(format!(
                "gamma slot {} presence disagrees with degeneracy pattern",
                slot0 + 1
            )));
        }
    }

    // Cross-check the measured beta against the polytope mask.
    let slacks = moment_polytope_check(alpha, &beta);
    for (idx, &s) in slacks.iter().enumerate() {
        let geometric = degenerate[idx];
        if geometric && s.abs() > CHAIN_CHECK_TOL {
            return Err(ChainError::InvariantViolation(format!(
                "triangle {} is collapsed but has slack {s}",
                idx + 1
            )));
        }
        if !geometric && s < -CHAIN_CHECK_TOL {
            return Err(ChainError::PolytopeViolation { index: idx, slack: s });
        }
    }

    Ok(ActionAngle {
        beta,
        gamma,
        degenerate,
    })
}

fn exterior_alpha(a_vals: &[f64], t: usize, n: usize) -> f64 {
    // The exterior vertex checked for triangle t: C2 for T1, C_{t+1} for
    // middle triangles, C_{n-1} for the last.
    if t == 1 {
        a_vals[1]
    } else if t == n - 2 {
        a_vals[n - 2]
    } else {
        a_vals[t]
    }
}

/// Areas (angle defects) of the n-2 triangles; degenerate triangles have
/// area zero. Valid chains satisfy sum = lambda/2.
pub fn triangle_areas(chain: &TriangleChain) -> Vec<f64> {
    let n = chain.n();
    let mut areas = Vec::with_capacity(n - 2);
    for t in 1..=n - 2 {
        let (p, q, r) = chain.triangle(t);
        if coincide(p, q) || coincide(q, r) || coincide(p, r) {
            areas.push(0.0);
            continue;
        }
        let sum = corner_angle(p, q, r).unwrap_or(PI)
            + corner_angle(q, p, r).unwrap_or(0.0)
            + corner_angle(r, p, q).unwrap_or(0.0);
        areas.push((PI - sum).max(0.0));
    }
    areas
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperbolic::elliptic_from;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "expected {b}, got {a} (tol {tol})");
    }

    fn worked_example_alpha() -> AngleVector {
        AngleVector::from_rationals(&[(12, 7), (12, 7), (10, 7), (12, 7)]).unwrap()
    }

    #[test]
    fn rational_angle_reduces_and_validates() {
        let r = RationalAngle::new(6, 4).unwrap();
        assert_eq!((r.num, r.den), (3, 2));
        assert_close(r.value(), 1.5 * PI, 1e-15);
        assert!(RationalAngle::new(2, 1).is_err());
        assert!(RationalAngle::new(0, 3).is_err());
        assert!(RationalAngle::new(-1, 3).is_err());
        assert_eq!(RationalAngle::new(14, 7).err(), Some(ChainError::BadRational { num: 14, den: 7 }));
    }

    #[test]
    fn angle_json_round_trip() {
        let r: Angle = RationalAngle::new(12, 7).unwrap().into();
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(s, r#"{"num":12,"den":7}"#);
        assert_eq!(serde_json::from_str::<Angle>(&s).unwrap(), r);
        let f = Angle::float(1.25);
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(s, r#"{"float":1.25}"#);
        assert_eq!(serde_json::from_str::<Angle>(&s).unwrap(), f);
    }

    #[test]
    fn validate_alpha_examples() {
        let lam = validate_alpha(&worked_example_alpha()).unwrap();
        assert_close(lam, 4.0 * PI / 7.0, 1e-12);
        let six = AngleVector::from_rationals(&[(12, 7); 6]).unwrap();
        assert_close(validate_alpha(&six).unwrap(), 2.0 * PI / 7.0, 1e-12);
        let flat = AngleVector::from_rationals(&[(1, 1); 4]).unwrap();
        assert!(matches!(
            validate_alpha(&flat),
            Err(ChainError::AngleCondition { .. })
        ));
    }

    #[test]
    fn polytope_slacks_jester_basepoint() {
        let alpha = AngleVector::from_rationals(&[(12, 7); 6]).unwrap();
        let beta = [2.0 * PI / 3.0, PI, 4.0 * PI / 3.0];
        let slacks = moment_polytope_check(&alpha, &beta);
        assert_eq!(slacks.len(), 4);
        assert_close(slacks[0], 2.0 * PI / 21.0, 1e-12);
        assert_close(slacks[1], PI / 21.0, 1e-12);
        assert_close(slacks[2], PI / 21.0, 1e-12);
        assert_close(slacks[3], 2.0 * PI / 21.0, 1e-12);
    }

    #[test]
    fn polytope_negative_slack_reported_not_thrown() {
        let alpha = worked_example_alpha();
        let slacks = moment_polytope_check(&alpha, &[0.1]);
        assert!(slacks[0] < 0.0);
    }

    #[test]
    fn gamma_mask_cluster_rules() {
        // n = 6: 4 triangles, 3 slots.
        assert_eq!(gamma_presence_mask(&[false, false, false, false]), vec![true; 3]);
        // Run touching the start removes slots 1..b.
        assert_eq!(
            gamma_presence_mask(&[true, true, false, false]),
            vec![false, false, true]
        );
        // Run touching the end removes slots a-1..n-3.
        assert_eq!(
            gamma_presence_mask(&[false, false, true, true]),
            vec![true, false, false]
        );
        // Interior run keeps the merged slot b.
        assert_eq!(
            gamma_presence_mask(&[false, true, false, false]),
            vec![false, true, true]
        );
        // n = 4 single slot.
        assert_eq!(gamma_presence_mask(&[true, false]), vec![false]);
        assert_eq!(gamma_presence_mask(&[false, true]), vec![false]);
        assert_eq!(gamma_presence_mask(&[false, false]), vec![true]);
    }

    #[test]
    fn from_parts_detects_degeneracy() {
        let alpha = worked_example_alpha();
        // North pole: beta = alpha3 + alpha4 - 2pi = 8pi/7, last slack 0.
        let np = ActionAngle::from_parts(&alpha, vec![8.0 * PI / 7.0], vec![None]).unwrap();
        assert_eq!(np.degenerate, vec![false, true]);
        // Interior point needs gamma.
        assert!(matches!(
            ActionAngle::from_parts(&alpha, vec![PI], vec![None]),
            Err(ChainError::MissingGamma { slot: 1 })
        ));
        let ok = ActionAngle::from_parts(&alpha, vec![PI], vec![Some(0.75 * PI)]).unwrap();
        assert_eq!(ok.degenerate, vec![false, false]);
        // Gamma on a singular point is rejected.
        assert!(matches!(
            ActionAngle::from_parts(&alpha, vec![8.0 * PI / 7.0], vec![Some(0.1)]),
            Err(ChainError::UnexpectedGamma { slot: 1 })
        ));
    }

    #[test]
    fn build_extract_round_trip_worked_example() {
        let alpha = worked_example_alpha();
        let coords =
            ActionAngle::from_parts(&alpha, vec![PI], vec![Some(0.75 * PI)]).unwrap();
        let chain = build_chain(&alpha, &coords).unwrap();
        assert!(chain.exterior[0].approx_eq(&HPoint::i(), 1e-12));
        let back = extract_coords(&chain, &alpha).unwrap();
        assert_close(back.beta[0], PI, 1e-9);
        assert_close(back.gamma[0].unwrap(), 0.75 * PI, 1e-9);
        assert_eq!(back.degenerate, vec![false, false]);
    }

    #[test]
    fn build_chain_jester_basepoint_coincidences() {
        let alpha = AngleVector::from_rationals(&[(12, 7); 6]).unwrap();
        let coords = ActionAngle::from_parts(
            &alpha,
            vec![2.0 * PI / 3.0, PI, 4.0 * PI / 3.0],
            vec![
                Some(2.0 * PI / 3.0),
                Some(0.0),
                Some(2.0 * PI / 3.0),
            ],
        )
        .unwrap();
        let chain = build_chain(&alpha, &coords).unwrap();
        assert!(
            chain.exterior[2].approx_eq(&chain.exterior[3], 1e-9),
            "C3 = {:?} vs C4 = {:?}",
            chain.exterior[2],
            chain.exterior[3]
        );
        assert!(
            chain.exterior[0].approx_eq(&chain.exterior[5], 1e-9),
            "C1 = {:?} vs C6 = {:?}",
            chain.exterior[0],
            chain.exterior[5]
        );
        let back = extract_coords(&chain, &alpha).unwrap();
        assert_close(back.beta[0], 2.0 * PI / 3.0, 1e-9);
        assert_close(back.beta[1], PI, 1e-9);
        assert_close(back.beta[2], 4.0 * PI / 3.0, 1e-9);
        assert_close(back.gamma[0].unwrap(), 2.0 * PI / 3.0, 1e-9);
        assert_close(back.gamma[1].unwrap(), 0.0, 1e-9);
        assert_close(back.gamma[2].unwrap(), 2.0 * PI / 3.0, 1e-9);
    }

    #[test]
    fn north_pole_chain_has_single_triangle() {
        let alpha = worked_example_alpha();
        let coords =
            ActionAngle::from_parts(&alpha, vec![8.0 * PI / 7.0], vec![None]).unwrap();
        let chain = build_chain(&alpha, &coords).unwrap();
        // Last triangle collapses: C3 = C4 = B1.
        assert!(chain.exterior[2].approx_eq(&chain.shared[0], 1e-12));
        assert!(chain.exterior[3].approx_eq(&chain.shared[0], 1e-12));
        let back = extract_coords(&chain, &alpha).unwrap();
        assert_close(back.beta[0], 8.0 * PI / 7.0, 1e-9);
        assert!(back.gamma[0].is_none());
        let areas = triangle_areas(&chain);
        assert_close(areas[1], 0.0, 1e-12);
        let lam = validate_alpha(&alpha).unwrap();
        assert_close(areas.iter().sum::<f64>(), lam / 2.0, 1e-9);
    }

    #[test]
    fn south_pole_chain_has_single_triangle() {
        let alpha = worked_example_alpha();
        // South pole: beta = 4pi - alpha1 - alpha2 = 4pi/7, first slack 0.
        let coords =
            ActionAngle::from_parts(&alpha, vec![4.0 * PI / 7.0], vec![None]).unwrap();
        let chain = build_chain(&alpha, &coords).unwrap();
        assert!(chain.exterior[0].approx_eq(&chain.exterior[1], 1e-12));
        assert!(chain.exterior[0].approx_eq(&chain.shared[0], 1e-12));
        let back = extract_coords(&chain, &alpha).unwrap();
        assert_close(back.beta[0], 4.0 * PI / 7.0, 1e-9);
        assert!(back.gamma[0].is_none());
    }

    #[test]
    fn areas_sum_to_half_lambda_and_are_isometry_invariant() {
        let alpha = worked_example_alpha();
        let coords =
            ActionAngle::from_parts(&alpha, vec![1.1 * PI], vec![Some(2.0)]).unwrap();
        let chain = build_chain(&alpha, &coords).unwrap();
        let lam = validate_alpha(&alpha).unwrap();
        let areas = triangle_areas(&chain);
        assert_close(areas.iter().sum::<f64>(), lam / 2.0, 1e-9);
        // Apply a global isometry; areas must be unchanged.
        let g = elliptic_from(HPoint::new(0.4, 1.9).unwrap(), 1.234).unwrap();
        let moved = TriangleChain {
            exterior: chain.exterior.iter().map(|p| g.apply(*p)).collect(),
            shared: chain.shared.iter().map(|p| g.apply(*p)).collect(),
        };
        let moved_areas = triangle_areas(&moved);
        for (x, y) in areas.iter().zip(moved_areas.iter()) {
            assert_close(*x, *y, 1e-9);
        }
    }

    #[test]
    fn build_rejects_polytope_violation() {
        let alpha = worked_example_alpha();
        let bad = ActionAngle {
            beta: vec![0.1],
            gamma: vec![Some(1.0)],
            degenerate: vec![false, false],
        };
        assert!(matches!(
            build_chain(&alpha, &bad),
            Err(ChainError::PolytopeViolation { .. })
        ));
    }

    #[test]
    fn round_trip_many_random_interior_points() {
        // Deterministic LCG exercise across n = 4, 5, 6 interior points.
        let mut state: u64 = 0x9e3779b97f4a7c15;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for &n in &[4usize, 5, 6] {
            let alpha = AngleVector::from_rationals(&vec![(12, 7); n]).unwrap();
            let a = alpha.values();
            for _ in 0..60 {
                // Sample beta inside the polytope by stick-breaking the slack.
                let lambda = validate_alpha(&alpha).unwrap();
                let mut cuts: Vec<f64> = (0..n - 3).map(|_| next()).collect();
                cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
                let mut beta = Vec::with_capacity(n - 3);
                let mut lower = 2.0 * TWO_PI - a[0] - a[1];
                for (k, c) in cuts.iter().enumerate() {
                    if k > 0 {
                        lower += TWO_PI - a[k + 1];
                    }
                    // Spread cuts into (0, lambda) with margins.
                    let amount = lambda * (0.05 + 0.9 * c);
                    beta.push(lower + amount);
                }
                // Enforce strict increase with the wall offsets.
                let mut ok = true;
                let slacks = moment_polytope_check(&alpha, &beta);
                for &s in &slacks {
                    if s < 1e-3 {
                        ok = false;
                    }
                }
                if !ok {
                    continue;
                }
                let gamma: Vec<Option<f64>> =
                    (0..n - 3).map(|_| Some(next() * (TWO_PI - 1e-6))).collect();
                let coords = ActionAngle::from_parts(&alpha, beta.clone(), gamma.clone()).unwrap();
                let chain = build_chain(&alpha, &coords).unwrap();
                let back = extract_coords(&chain, &alpha).unwrap();
                for k in 0..n - 3 {
                    assert_close(back.beta[k], beta[k], 1e-9);
                    let g0 = gamma[k].unwrap();
                    let g1 = back.gamma[k].unwrap();
                    let d = (g0 - g1).abs();
                    assert!(d < 1e-9 || (TWO_PI - d) < 1e-9, "gamma mismatch {g0} vs {g1}");
                }
            }
        }
    }
}
