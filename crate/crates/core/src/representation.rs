//! Holonomy representations attached to triangle chains and the two twist
//! actions (algebraic conjugation and geometric rotation surgery).
//!
//! A chain for alpha determines the representation rho(c_i) = elliptic
//! rotation by alpha_i about C_i; the product rho(c_1)...rho(c_n) is +-Id.
//! The twist tau_{i,j} along b' = (c_i...c_j)^-1 acts algebraically by
//! conjugating the block rho(c_i)..rho(c_j) by W = rho(c_i...c_j)
//! (`TwistDirection::Direct`, the default) or by W^-1
//! (`TwistDirection::Inverse`, the group inverse of the same twist).
//! Geometrically the direct twist rotates the exterior vertices outside the
//! block anticlockwise by beta' = rotation angle of rho(b') about its fixed
//! point B'.

use crate::chains::{
    build_chain, extract_coords, ActionAngle, AngleVector, ChainError, TriangleChain,
    COINCIDE_TOL,
};
use crate::hyperbolic::{
    direction, distance, elliptic_from, point_at, side_from_angles, wrap_angle, HPoint, HypError,
    Isometry, TWO_PI,
};
use crate::surface::{TwistGen, TwistWord};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Tolerance for the defining representation invariants (determinant,
/// boundary product, peripheral rotation angles).
pub const REP_TOL: f64 = 1e-9;
/// Required agreement between the algebraic and geometric twist paths.
pub const TWIST_AGREE_TOL: f64 = 1e-6;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum RepError {
    #[error("boundary product is not +-identity (defect {defect})")]
    BoundaryProduct { defect: f64 },
    #[error("generator {index} has rotation angle {got}, expected {expected}")]
    WrongAngle {
        index: usize,
        got: f64,
        expected: f64,
    },
    #[error("twist indices ({i},{j}) out of range for n = {n}")]
    BadTwist { i: usize, j: usize, n: usize },
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error("hyperbolic geometry failure: {0}")]
    Hyp(#[from] HypError),
}

/// Reading convention for a twist or twist word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TwistDirection {
    /// Conjugate the block by W (the worked-example convention).
    #[default]
    Direct,
    /// Conjugate the block by W^-1 (the convention under which the bundled
    /// classification tables' words reproduce their cells).
    Inverse,
}

impl TwistDirection {
    pub fn flipped(self) -> TwistDirection {
        match self {
            TwistDirection::Direct => TwistDirection::Inverse,
            TwistDirection::Inverse => TwistDirection::Direct,
        }
    }
}

/// A totally elliptic representation of the n-punctured sphere group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Representation {
    pub alpha: AngleVector,
    pub rho: Vec<Isometry>,
}

impl Representation {
    /// Builds rho(c_i) = rotation by alpha_i about C_i from a chain and
    /// verifies the boundary relation.
    pub fn from_chain(chain: &TriangleChain, alpha: &AngleVector) -> Result<Representation, RepError> {
        let n = alpha.n();
        let values = alpha.values();
        let mut rho = Vec::with_capacity(n);
        for (k, &p) in chain.exterior.iter().enumerate() {
            rho.push(elliptic_from(p, values[k])?);
        }
        let rep = Representation {
            alpha: alpha.clone(),
            rho,
        };
        rep.check_boundary()?;
        Ok(rep)
    }

    pub fn n(&self) -> usize {
        self.rho.len()
    }

    fn check_boundary(&self) -> Result<(), RepError> {
        let mut prod = Isometry::identity();
        for m in &self.rho {
            prod = prod.compose(m);
        }
        let defect = [
            (prod.a - 1.0).abs(),
            prod.b.abs(),
            prod.c.abs(),
            (prod.d - 1.0).abs(),
        ]
        .into_iter()
        .fold(0.0f64, f64::max);
        if defect > REP_TOL {
            return Err(RepError::BoundaryProduct { defect });
        }
        Ok(())
    }

    /// The holonomy W = rho(c_i ... c_j).
    pub fn block_product(&self, i: usize, j: usize) -> Isometry {
        let mut w = self.rho[i - 1];
        for k in i..j {
            w = w.compose(&self.rho[k]);
        }
        w
    }

    /// The algebraic action of tau_{i,j}: conjugates rho(c_i)..rho(c_j) by
    /// W = rho(c_i...c_j) (or W^-1 for the inverse direction), leaving the
    /// other generators fixed.
    pub fn twist_with_direction(&self, t: TwistGen, dir: TwistDirection) -> Representation {
        let w = self.block_product(t.i, t.j);
        let conj = match dir {
            TwistDirection::Direct => w,
            TwistDirection::Inverse => w.inverse(),
        };
        let conj_inv = conj.inverse();
        let mut rho = self.rho.clone();
        for k in t.i - 1..t.j {
            rho[k] = conj.compose(&rho[k]).compose(&conj_inv);
        }
        Representation {
            alpha: self.alpha.clone(),
            rho,
        }
    }

    /// Applies a twist word leftmost-letter-first. `dir` is the reading
    /// convention for positive letters; inverse letters flip it.
    pub fn apply_word(&self, word: &TwistWord, dir: TwistDirection) -> Representation {
        let mut rep = self.clone();
        for letter in &word.letters {
            let eff = if letter.inverse { dir.flipped() } else { dir };
            rep = rep.twist_with_direction(letter.gen, eff);
        }
        rep
    }
}

/// The direct algebraic twist (worked-example convention).
pub fn twist_algebraic(rep: &Representation, t: TwistGen) -> Representation {
    rep.twist_with_direction(t, TwistDirection::Direct)
}

/// Action-angle coordinates of a representation: beta_i is the rotation
/// angle of rho(c_1...c_{i+1})^-1 (fixed point B_i), the chain is rebuilt
/// from the elliptic fixed points, and gamma/degeneracy are read off
/// geometrically.
pub fn coords_from_rep(rep: &Representation) -> Result<ActionAngle, RepError> {
    let n = rep.n();
    let mut exterior = Vec::with_capacity(n);
    for m in &rep.rho {
        exterior.push(m.fixed_point()?);
    }
    let mut shared = Vec::with_capacity(n - 3);
    let mut beta = Vec::with_capacity(n - 3);
    let mut acc = rep.rho[0];
    for k in 1..=n - 3 {
        acc = acc.compose(&rep.rho[k]);
        let m = acc.inverse();
        beta.push(m.rotation_angle()?);
        shared.push(m.fixed_point()?);
    }
    let chain = TriangleChain { exterior, shared };
    let mut coords = extract_coords(&chain, &rep.alpha)?;
    coords.beta = beta;
    Ok(coords)
}

/// Result of a geometric twist: the new coordinates plus the rotation angle
/// beta' of the twisting curve's holonomy that drove the surgery.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometricTwist {
    pub coords: ActionAngle,
    pub b_prime: f64,
}

/// The geometric twist path: build the chain, form the auxiliary chain for
/// the cyclic presentation starting at c_i, locate B'_{j-i} and beta'_{j-i}
/// by triangle completion, rotate the exterior vertices outside the block
/// about B' (anticlockwise by beta' for `Direct`, by -beta' for `Inverse`),
/// and re-extract coordinates from the rebuilt chain. Matrix arithmetic is
/// never used.
pub fn twist_geometric_with_direction(
    alpha: &AngleVector,
    coords: &ActionAngle,
    t: TwistGen,
    dir: TwistDirection,
) -> Result<GeometricTwist, RepError> {
    let n = alpha.n();
    if !(1 <= t.i && t.i < t.j && t.j <= n - 1) {
        return Err(RepError::BadTwist { i: t.i, j: t.j, n });
    }
    let chain = build_chain(alpha, coords)?;
    let a_vals = alpha.values();
    let span = t.j - t.i;

    // Walk the auxiliary chain for the cyclic order (c_i, c_{i+1}, ...) far
    // enough to locate B'_{span} and beta'_{span}.
    let ext_at = |k: usize| chain.exterior[(t.i - 1 + k) % n];
    let alpha_at = |k: usize| a_vals[(t.i - 1 + k) % n];
    let mut hub = ext_at(0);
    let mut hub_angle = PI - alpha_at(0) / 2.0;
    let mut b_prime_val = 0.0f64;
    for m in 1..=span {
        let c = ext_at(m);
        let c_angle = PI - alpha_at(m) / 2.0;
        if points_coincide(hub, c) {
            // Degenerate auxiliary triangle: B'_m stays put and the
            // rotation angles add at the shared fixed point.
            b_prime_val = if m == 1 {
                wrap_angle(2.0 * TWO_PI - alpha_at(0) - alpha_at(1))
            } else {
                wrap_angle(b_prime_val + TWO_PI - alpha_at(m))
            };
        } else {
            let (pos, beta_new) = complete_triangle(hub, hub_angle, c, c_angle)?;
            hub = pos;
            b_prime_val = beta_new;
        }
        hub_angle = b_prime_val / 2.0;
    }

    let rotation = match dir {
        TwistDirection::Direct => b_prime_val,
        TwistDirection::Inverse => TWO_PI - b_prime_val,
    };
    let mut new_ext = chain.exterior.clone();
    if wrap_angle(rotation) > 1e-13 {
        let rot = elliptic_from(hub, rotation)?;
        for k in 1..=n {
            if k < t.i || k > t.j {
                new_ext[k - 1] = rot.apply(chain.exterior[k - 1]);
            }
        }
    }

    // Rebuild the shared vertices of the standard chain from the moved
    // exterior vertices alone.
    let mut shared = Vec::with_capacity(n - 3);
    let mut hub = new_ext[0];
    let mut hub_angle = PI - a_vals[0] / 2.0;
    let mut prev_beta = 0.0f64;
    for m in 1..=n - 3 {
        let c = new_ext[m];
        let c_angle = PI - a_vals[m] / 2.0;
        if points_coincide(hub, c) {
            prev_beta = if m == 1 {
                2.0 * TWO_PI - a_vals[0] - a_vals[1]
            } else {
                prev_beta + TWO_PI - a_vals[m]
            };
        } else {
            let (pos, beta_new) = complete_triangle(hub, hub_angle, c, c_angle)?;
            hub = pos;
            prev_beta = beta_new;
        }
        shared.push(hub);
        hub_angle = prev_beta / 2.0;
    }
    let new_chain = TriangleChain {
        exterior: new_ext,
        shared,
    };
    let coords = extract_coords(&new_chain, alpha)?;
    Ok(GeometricTwist {
        coords,
        b_prime: b_prime_val,
    })
}

/// The geometric twist in the default (direct) convention.
pub fn twist_geometric(
    alpha: &AngleVector,
    coords: &ActionAngle,
    t: TwistGen,
) -> Result<ActionAngle, RepError> {
    Ok(twist_geometric_with_direction(alpha, coords, t, TwistDirection::Direct)?.coords)
}

fn points_coincide(p: HPoint, q: HPoint) -> bool {
    (p.x - q.x).abs() <= COINCIDE_TOL && (p.y - q.y).abs() <= COINCIDE_TOL
}

/// Given the clockwise triangle (P, Q, X) with known vertex positions P, Q
/// and known interior angles at them, returns X and the value beta with
/// interior angle pi - beta/2 at X (triangle completion via the dual law of
/// cosines).
fn complete_triangle(
    p: HPoint,
    ang_p: f64,
    q: HPoint,
    ang_q: f64,
) -> Result<(HPoint, f64), RepError> {
    let l = distance(p, q);
    let cos_x = (l.cosh() * ang_p.sin() * ang_q.sin() - ang_p.cos() * ang_q.cos()).clamp(-1.0, 1.0);
    let ang_x = cos_x.acos();
    let side = side_from_angles(ang_p, ang_x, ang_q)?;
    let dir_pq = direction(p, q)?;
    let x = point_at(p, dir_pq - ang_p, side);
    Ok((x, 2.0 * (PI - ang_x)))
}
