//! Upper half-plane model of the hyperbolic plane and PSL(2,R) isometries.
//!
//! Isometries are kept as determinant-one 2x2 real matrices, canonicalized so
//! that the first entry of (a, b, c, d) exceeding `SIGN_EPS` in absolute value
//! is positive; this fixes a representative of the +-Id coset. Elliptic
//! elements rotate the tangent plane at their fixed point anticlockwise by
//! their rotation angle in (0, 2*pi).

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Default comparison tolerance for traces, distances and matrix entries.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Guard band for branch decisions (trace^2 = 2, vanishing entries).
pub const BRANCH_EPS: f64 = 1e-12;
/// Threshold below which a matrix entry is treated as zero when choosing the
/// sign representative.
pub const SIGN_EPS: f64 = 1e-12;

pub const TWO_PI: f64 = 2.0 * PI;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum HypError {
    #[error("matrix is singular or has non-positive determinant (det = {det})")]
    InvalidMatrix { det: f64 },
    #[error("point ({x}, {y}) is not in the open upper half-plane")]
    InvalidPoint { x: f64, y: f64 },
    #[error("element with |trace| = {abs_trace} is not elliptic")]
    NotElliptic { abs_trace: f64 },
    #[error("elliptic closed form undefined: lower-left entry vanishes")]
    DegenerateElement,
    #[error("angles ({a}, {b}, {c}) do not bound a hyperbolic triangle")]
    NotHyperbolicTriangle { a: f64, b: f64, c: f64 },
    #[error("direction between coincident points is undefined")]
    CoincidentPoints,
}

/// A point x + iy of the open upper half-plane (y > 0).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HPoint {
    pub x: f64,
    pub y: f64,
}

impl HPoint {
    pub fn new(x: f64, y: f64) -> Result<HPoint, HypError> {
        if !(x.is_finite() && y.is_finite() && y > 0.0) {
            return Err(HypError::InvalidPoint { x, y });
        }
        Ok(HPoint { x, y })
    }

    /// The canonical basepoint i.
    pub fn i() -> HPoint {
        HPoint { x: 0.0, y: 1.0 }
    }

    pub fn approx_eq(&self, other: &HPoint, tol: f64) -> bool {
        (self.x - other.x).abs() <= tol && (self.y - other.y).abs() <= tol
    }
}

/// Hyperbolic distance between two half-plane points.
pub fn distance(p: HPoint, q: HPoint) -> f64 {
    let dx = p.x - q.x;
    let dy = p.y - q.y;
    let arg = 1.0 + (dx * dx + dy * dy) / (2.0 * p.y * q.y);
    arg.max(1.0).acosh()
}

/// Classification of a non-identity isometry by trace, with a tolerance band
/// around |trace| = 2 collapsing to `Parabolic`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IsometryClass {
    Elliptic,
    Parabolic,
    Hyperbolic,
}

/// A determinant-one matrix [[a, b], [c, d]] acting on the upper half-plane
/// by z -> (az + b)/(cz + d), canonicalized to a fixed +-Id representative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Isometry {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Isometry {
    /// Builds an isometry from matrix entries, renormalizing the determinant
    /// to one and fixing the sign representative.
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Isometry, HypError> {
        let det = a * d - b * c;
        if !det.is_finite() || det <= 0.0 {
            return Err(HypError::InvalidMatrix { det });
        }
        let s = det.sqrt();
        let mut m = Isometry {
            a: a / s,
            b: b / s,
            c: c / s,
            d: d / s,
        };
        m.canonicalize_sign();
        Ok(m)
    }

    fn canonicalize_sign(&mut self) {
        for e in [self.a, self.b, self.c, self.d] {
            if e.abs() > SIGN_EPS {
                if e < 0.0 {
                    self.a = -self.a;
                    self.b = -self.b;
                    self.c = -self.c;
                    self.d = -self.d;
                }
                return;
            }
        }
    }

    pub fn identity() -> Isometry {
        Isometry {
            a: 1.0,
            b: 0.0,
            c: 0.0,
            d: 1.0,
        }
    }

    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    /// True when the canonical representative is within `tol` of the identity
    /// (i.e. the matrix is +-Id up to `tol`).
    pub fn is_identity(&self, tol: f64) -> bool {
        (self.a - 1.0).abs() <= tol
            && self.b.abs() <= tol
            && self.c.abs() <= tol
            && (self.d - 1.0).abs() <= tol
    }

    pub fn inverse(&self) -> Isometry {
        // (d, -b, -c, a) has the same determinant; renormalization keeps
        // products of many inverses well conditioned.
        Isometry::new(self.d, -self.b, -self.c, self.a)
            .expect("inverse of a determinant-one matrix is determinant-one")
    }

    /// Matrix product self * rhs (self applied after rhs), renormalized.
    pub fn compose(&self, rhs: &Isometry) -> Isometry {
        Isometry::new(
            self.a * rhs.a + self.b * rhs.c,
            self.a * rhs.b + self.b * rhs.d,
            self.c * rhs.a + self.d * rhs.c,
            self.c * rhs.b + self.d * rhs.d,
        )
        .expect("product of determinant-one matrices is determinant-one")
    }

    /// Moebius action on a half-plane point.
    pub fn apply(&self, p: HPoint) -> HPoint {
        let (a, b, c, d) = (self.a, self.b, self.c, self.d);
        let denom = (c * p.x + d).powi(2) + (c * p.y).powi(2);
        HPoint {
            x: ((a * p.x + b) * (c * p.x + d) + a * c * p.y * p.y) / denom,
            y: p.y / denom,
        }
    }

    pub fn classify(&self, tol: f64) -> IsometryClass {
        let t = self.trace().abs();
        if t < 2.0 - tol {
            IsometryClass::Elliptic
        } else if t > 2.0 + tol {
            IsometryClass::Hyperbolic
        } else {
            IsometryClass::Parabolic
        }
    }

    /// Rotation angle in (0, 2*pi) of an elliptic element, measured
    /// anticlockwise at the fixed point.
    ///
    /// Implemented as the closed form
    /// atan2(sgn * t * sqrt(4 - t^2), t^2 - 2) with t = trace and
    /// sgn = -c/|c|, wrapped into (0, 2*pi); this reproduces the three-case
    /// epsilon correction of the arctan formula, and atan2 routes the
    /// boundary t^2 = 2 deterministically to +-pi/2 before wrapping.
    pub fn rotation_angle(&self) -> Result<f64, HypError> {
        let t = self.trace();
        if t.abs() >= 2.0 - BRANCH_EPS {
            return Err(HypError::NotElliptic { abs_trace: t.abs() });
        }
        if self.c.abs() <= BRANCH_EPS {
            return Err(HypError::DegenerateElement);
        }
        let sgn = if self.c > 0.0 { -1.0 } else { 1.0 };
        let y = sgn * t * (4.0 - t * t).sqrt();
        let v = y.atan2(t * t - 2.0);
        Ok(if v <= 0.0 { v + TWO_PI } else { v })
    }

    /// Fixed point of an elliptic element.
    pub fn fixed_point(&self) -> Result<HPoint, HypError> {
        let t = self.trace();
        if t.abs() >= 2.0 - BRANCH_EPS {
            return Err(HypError::NotElliptic { abs_trace: t.abs() });
        }
        if self.c.abs() <= BRANCH_EPS {
            return Err(HypError::DegenerateElement);
        }
        Ok(HPoint {
            x: (self.a - self.d) / (2.0 * self.c),
            y: (4.0 - t * t).sqrt() / (2.0 * self.c.abs()),
        })
    }
}

/// The elliptic isometry fixing `p` and rotating tangent vectors at `p`
/// anticlockwise by `angle`.
pub fn elliptic_from(p: HPoint, angle: f64) -> Result<Isometry, HypError> {
    if !(p.y > 0.0) {
        return Err(HypError::InvalidPoint { x: p.x, y: p.y });
    }
    let cs = (angle / 2.0).cos();
    let sn = (angle / 2.0).sin();
    let (x, y) = (p.x, p.y);
    Isometry::new(
        cs - x / y * sn,
        (x * x / y + y) * sn,
        -sn / y,
        cs + x / y * sn,
    )
}

/// The rotation-free isometry mapping i to `p` (upper triangular with
/// positive diagonal); it maps the upward direction at i to the upward
/// direction at `p`.
pub fn translate_to(p: HPoint) -> Isometry {
    let s = p.y.sqrt();
    Isometry {
        a: s,
        b: p.x / s,
        c: 0.0,
        d: 1.0 / s,
    }
}

/// The point at hyperbolic distance `dist` from `p` along the geodesic ray
/// with initial direction `dir` (Euclidean tangent angle at `p`;
/// pi/2 is straight up).
pub fn point_at(p: HPoint, dir: f64, dist: f64) -> HPoint {
    let m = translate_to(p).compose(
        &elliptic_from(HPoint::i(), dir - PI / 2.0).expect("i is a valid point"),
    );
    m.apply(HPoint {
        x: 0.0,
        y: dist.exp(),
    })
}

/// Initial direction (Euclidean tangent angle at `p`) of the geodesic ray
/// from `p` to `q`.
pub fn direction(p: HPoint, q: HPoint) -> Result<f64, HypError> {
    let w = translate_to(p).inverse().apply(q);
    let (u, v) = (w.x, w.y);
    if u.abs() < BRANCH_EPS && (v - 1.0).abs() < BRANCH_EPS {
        return Err(HypError::CoincidentPoints);
    }
    if u.abs() < BRANCH_EPS {
        // Vertical ray through i.
        return Ok(if v > 1.0 { PI / 2.0 } else { -PI / 2.0 });
    }
    // Geodesic through i and w is the semicircle centred at (s, 0); the
    // tangent at i pointing toward w is (1, s) when u > 0, (-1, -s) when
    // u < 0.
    let s = (u * u + v * v - 1.0) / (2.0 * u);
    Ok(if u > 0.0 {
        s.atan2(1.0)
    } else {
        (-s).atan2(-1.0)
    })
}

/// Side length opposite the angle `c` in a hyperbolic triangle with interior
/// angles `a`, `b`, `c` (dual law of cosines).
pub fn side_from_angles(a: f64, b: f64, c: f64) -> Result<f64, HypError> {
    // The angle-sum check needs a margin so that flat (Euclidean) triangles
    // assembled from rounded floats are still rejected.
    if !(a > 0.0 && b > 0.0 && c > 0.0 && a + b + c < PI - 1e-12) {
        return Err(HypError::NotHyperbolicTriangle { a, b, c });
    }
    let ch = (a.cos() * b.cos() + c.cos()) / (a.sin() * b.sin());
    Ok(ch.max(1.0).acosh())
}

/// Normalizes an angle into [0, 2*pi).
pub fn wrap_angle(t: f64) -> f64 {
    let mut v = t % TWO_PI;
    if v < 0.0 {
        v += TWO_PI;
    }
    if v >= TWO_PI {
        v = 0.0;
    }
    v
}

/// Anticlockwise angle in [0, 2*pi) from direction `from` to direction `to`.
pub fn acw_between(from: f64, to: f64) -> f64 {
    wrap_angle(to - from)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "expected {b}, got {a} (tol {tol})");
    }

    #[test]
    fn elliptic_about_i_is_rotation_matrix() {
        let m = elliptic_from(HPoint::i(), PI).unwrap();
        assert_close(m.a, 0.0, 1e-15);
        assert_close(m.b, 1.0, 1e-15);
        assert_close(m.c, -1.0, 1e-15);
        assert_close(m.d, 0.0, 1e-15);
        assert_close(m.rotation_angle().unwrap(), PI, 1e-15);
        let f = m.fixed_point().unwrap();
        assert!(f.approx_eq(&HPoint::i(), 1e-15));
    }

    #[test]
    fn elliptic_round_trip_generic_point() {
        let p = HPoint::new(0.3, 1.7).unwrap();
        for angle in [0.1, 1.0, PI / 2.0, PI, 4.0, 6.0] {
            let m = elliptic_from(p, angle).unwrap();
            assert_close(m.det(), 1.0, 1e-12);
            assert_close(m.rotation_angle().unwrap(), angle, 1e-9);
            assert!(m.fixed_point().unwrap().approx_eq(&p, 1e-9));
            assert!(m.apply(p).approx_eq(&p, 1e-12));
        }
    }

    #[test]
    fn rotation_angle_covers_all_branches() {
        // Rotation about i by theta has trace 2*cos(theta/2); testing angles
        // in each of the three epsilon branches plus the boundary.
        for theta in [0.3, 1.2, PI / 2.0, PI, 3.0, 5.0, 6.2] {
            let m = elliptic_from(HPoint::i(), theta).unwrap();
            assert_close(m.rotation_angle().unwrap(), theta, 1e-12);
        }
    }

    #[test]
    fn rotation_angle_rejects_non_elliptic() {
        let m = Isometry::new(2.0, 0.0, 0.0, 0.5).unwrap();
        assert!(matches!(
            m.rotation_angle(),
            Err(HypError::NotElliptic { .. })
        ));
        // An upper-triangular matrix has real eigenvalues, so |trace| >= 2.
        let r = Isometry::new(0.5, 0.5, 0.0, 2.0).unwrap();
        assert!(matches!(
            r.rotation_angle(),
            Err(HypError::NotElliptic { .. })
        ));
        // Numerically elliptic trace but a vanishing lower-left entry: the
        // fixed point is unresolvable.
        let a = 0.9999999f64;
        let c = 1e-14f64;
        let b = (a * a - 1.0) / c;
        let r = Isometry::new(a, b, c, a).unwrap();
        assert!(matches!(
            r.rotation_angle(),
            Err(HypError::DegenerateElement)
        ));
    }

    #[test]
    fn distance_along_imaginary_axis() {
        let p = HPoint::i();
        let q = HPoint::new(0.0, std::f64::consts::E).unwrap();
        assert_close(distance(p, q), 1.0, 1e-15);
        assert_close(distance(q, p), 1.0, 1e-15);
        assert_close(distance(p, p), 0.0, 1e-15);
    }

    #[test]
    fn side_from_angles_frozen_values() {
        // Values frozen from an independent high-precision evaluation of the
        // dual law of cosines.
        assert_close(
            side_from_angles(PI / 3.0, PI / 7.0, PI / 2.0).unwrap(),
            0.6206717375563866,
            1e-12,
        );
        assert_close(
            side_from_angles(PI / 7.0, PI / 7.0, PI / 2.0).unwrap(),
            2.1408097231178886,
            1e-12,
        );
        assert_close(
            side_from_angles(PI / 7.0, PI / 2.0, PI / 7.0).unwrap(),
            1.3600518497395677,
            1e-12,
        );
    }

    #[test]
    fn side_from_angles_rejects_non_hyperbolic() {
        assert!(side_from_angles(PI / 2.0, PI / 3.0, PI / 6.0).is_err());
        assert!(side_from_angles(-0.1, 0.2, 0.3).is_err());
    }

    #[test]
    fn translate_to_moves_i() {
        let p = HPoint::new(-1.25, 0.4).unwrap();
        assert!(translate_to(p).apply(HPoint::i()).approx_eq(&p, 1e-12));
    }

    #[test]
    fn point_at_direction_round_trip() {
        let p = HPoint::new(0.7, 2.3).unwrap();
        for dir in [-2.0, -0.5, 0.0, PI / 2.0, 2.8] {
            for dist in [0.3, 1.0, 2.5] {
                let q = point_at(p, dir, dist);
                assert_close(distance(p, q), dist, 1e-10);
                let back = direction(p, q).unwrap();
                let diff = wrap_angle(back - dir);
                assert!(diff < 1e-9 || (TWO_PI - diff) < 1e-9, "dir mismatch {diff}");
            }
        }
    }

    #[test]
    fn direction_of_vertical_rays() {
        let p = HPoint::i();
        let up = HPoint::new(0.0, 3.0).unwrap();
        let down = HPoint::new(0.0, 0.2).unwrap();
        assert_close(direction(p, up).unwrap(), PI / 2.0, 1e-15);
        assert_close(direction(p, down).unwrap(), -PI / 2.0, 1e-15);
        assert!(matches!(direction(p, p), Err(HypError::CoincidentPoints)));
    }

    #[test]
    fn conjugation_preserves_angle_and_maps_fixed_point() {
        let f = elliptic_from(HPoint::new(0.4, 1.1).unwrap(), 2.2).unwrap();
        let g = Isometry::new(1.0, 0.7, 0.3, 1.3).unwrap();
        let h = g.compose(&f).compose(&g.inverse());
        assert_close(
            h.rotation_angle().unwrap(),
            f.rotation_angle().unwrap(),
            1e-9,
        );
        let moved = g.apply(f.fixed_point().unwrap());
        assert!(h.fixed_point().unwrap().approx_eq(&moved, 1e-9));
    }

    #[test]
    fn classify_uses_trace_band() {
        let e = elliptic_from(HPoint::i(), 1.0).unwrap();
        assert_eq!(e.classify(DEFAULT_TOL), IsometryClass::Elliptic);
        let h = Isometry::new(2.0, 0.0, 0.0, 0.5).unwrap();
        assert_eq!(h.classify(DEFAULT_TOL), IsometryClass::Hyperbolic);
        let p = Isometry::new(1.0, 1.0, 0.0, 1.0).unwrap();
        assert_eq!(p.classify(DEFAULT_TOL), IsometryClass::Parabolic);
        assert!(Isometry::identity().is_identity(0.0));
    }

    #[test]
    fn sign_canonicalization_fixes_representative() {
        let m = Isometry::new(-1.0, 0.5, -0.25, -1.125).unwrap();
        assert!(m.a > 0.0);
        let n = Isometry::new(0.0, -2.0, 0.5, 0.0).unwrap();
        // First entry is zero; second must be made positive.
        assert!(n.b > 0.0 && n.c < 0.0);
    }

    #[test]
    fn apply_is_isometric() {
        let m = Isometry::new(0.9, -0.3, 0.2, 1.2).unwrap();
        let p = HPoint::new(-0.4, 0.9).unwrap();
        let q = HPoint::new(1.3, 2.1).unwrap();
        assert_close(
            distance(m.apply(p), m.apply(q)),
            distance(p, q),
            1e-12,
        );
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        assert!(Isometry::new(1.0, 0.0, 0.0, -1.0).is_err());
        assert!(Isometry::new(1.0, 2.0, 2.0, 4.0).is_err());
        assert!(HPoint::new(0.0, 0.0).is_err());
        assert!(HPoint::new(0.0, -1.0).is_err());
        assert!(elliptic_from(HPoint { x: 0.0, y: -1.0 }, 1.0).is_err());
    }
}
