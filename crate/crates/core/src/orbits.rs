//! Breadth-first enumeration of mapping-class-group orbits in action-angle
//! coordinates, with canonical-key deduplication, an infinite-orbit cutoff,
//! golden-table verification and the beta-membership report.

use crate::chains::{build_chain, validate_alpha, ActionAngle, Angle, AngleVector, RationalAngle};
use crate::representation::{coords_from_rep, twist_algebraic, Representation, TwistDirection};
use crate::surface::{generator_set, parse_word, TwistWord};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

const TWO_PI: f64 = 2.0 * PI;
/// Default dedup tolerance; nearest distinct table values differ by >= pi/21.
pub const DEFAULT_TOL: f64 = 1e-6;
/// Default cutoff: reaching this many points yields the Exhausted verdict.
pub const DEFAULT_MAX_POINTS: usize = 20000;
/// Hard cap on BFS depth.
const MAX_LAYERS: usize = 200;
/// Quantization grid for the deterministic output ordering.
const SORT_GRID: f64 = 1e-7;
/// Golden-table words are written in the inverse-twist convention: each
/// letter acts by conjugating the bracketed block with the inverse of the
/// enclosing holonomy, applied leftmost-first. Calibrated against the
/// bundled tables' cells.
pub const TABLE_WORD_DIRECTION: TwistDirection = TwistDirection::Inverse;

#[derive(Debug, thiserror::Error)]
pub enum OrbitError {
    #[error(transparent)]
    Chain(#[from] crate::chains::ChainError),
    #[error(transparent)]
    Rep(#[from] crate::representation::RepError),
    #[error(transparent)]
    Surface(#[from] crate::surface::SurfaceError),
    #[error("table error: {0}")]
    Table(String),
}

/// Quantized, mask-aware key; equal for coordinates within the grid cell,
/// with gamma reduced circularly.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalKey {
    pub mask: Vec<bool>,
    pub qbeta: Vec<i64>,
    pub qgamma: Vec<i64>,
}

/// Quantizes coordinates at cell size `tol`: beta by plain rounding, the
/// present gamma entries by rounding modulo the number of cells in a full
/// turn (so values straddling 0 and 2*pi collide). Absent gamma entries are
/// recorded in the mask only.
pub fn canonicalize(coords: &ActionAngle, tol: f64) -> CanonicalKey {
    let cells = (TWO_PI / tol).round().max(1.0) as i64;
    let qbeta = coords.beta.iter().map(|b| (b / tol).round() as i64).collect();
    let qgamma = coords
        .gamma
        .iter()
        .flatten()
        .map(|g| ((g / tol).round() as i64).rem_euclid(cells))
        .collect();
    CanonicalKey {
        mask: coords.degenerate.clone(),
        qbeta,
        qgamma,
    }
}

fn circular_dist(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TWO_PI);
    d.min(TWO_PI - d)
}

/// True when the two coordinate tuples agree: identical masks, beta within
/// `tol` componentwise, and present gamma within `tol` circularly.
pub fn coordinates_match(a: &ActionAngle, b: &ActionAngle, tol: f64) -> bool {
    if a.degenerate != b.degenerate || a.beta.len() != b.beta.len() {
        return false;
    }
    if !a
        .beta
        .iter()
        .zip(b.beta.iter())
        .all(|(x, y)| (x - y).abs() <= tol)
    {
        return false;
    }
    a.gamma.iter().zip(b.gamma.iter()).all(|(x, y)| match (x, y) {
        (None, None) => true,
        (Some(u), Some(v)) => circular_dist(*u, *v) <= tol,
        _ => false,
    })
}

/// Insert-if-absent set over action-angle coordinates: cell map at cell
/// size `tol` with neighbor probing, so any two points within `tol` always
/// collide even across cell boundaries.
struct Dedup {
    tol: f64,
    gamma_cells: i64,
    cells: HashMap<Vec<i64>, Vec<usize>>,
}

impl Dedup {
    fn new(tol: f64) -> Dedup {
        Dedup {
            tol,
            gamma_cells: (TWO_PI / tol).ceil().max(1.0) as i64,
            cells: HashMap::new(),
        }
    }

    /// Cell coordinates: mask bits, floor-quantized beta, floor-quantized
    /// gamma clamped into one turn.
    fn cell_of(&self, c: &ActionAngle) -> Vec<i64> {
        let mut key: Vec<i64> = c.degenerate.iter().map(|&m| m as i64).collect();
        key.extend(c.beta.iter().map(|b| (b / self.tol).floor() as i64));
        key.extend(
            c.gamma
                .iter()
                .flatten()
                .map(|g| ((g / self.tol).floor() as i64).clamp(0, self.gamma_cells - 1)),
        );
        key
    }

    fn scan(&self, cell: &[i64], c: &ActionAngle, all: &[ActionAngle]) -> Option<usize> {
        self.cells.get(cell).and_then(|v| {
            v.iter()
                .copied()
                .find(|&i| coordinates_match(&all[i], c, self.tol))
        })
    }

    fn query(&self, c: &ActionAngle, all: &[ActionAngle]) -> Option<usize> {
        let base = self.cell_of(c);
        if let Some(i) = self.scan(&base, c, all) {
            return Some(i);
        }
        // Probe every neighbor cell of the real-valued dimensions: all
        // offset vectors in {-1, 0, 1}^dims except the base cell.
        let mask_len = c.degenerate.len();
        let nbeta = c.beta.len();
        let dims = base.len() - mask_len;
        let total = 3usize.pow(dims as u32);
        for combo in 0..total {
            let mut k = combo;
            let mut cell = base.clone();
            let mut all_zero = true;
            for d in 0..dims {
                let off = (k % 3) as i64 - 1;
                k /= 3;
                if off == 0 {
                    continue;
                }
                all_zero = false;
                let idx = mask_len + d;
                if d < nbeta {
                    cell[idx] += off;
                } else {
                    cell[idx] = (cell[idx] + off).rem_euclid(self.gamma_cells);
                }
            }
            if all_zero {
                continue;
            }
            if let Some(i) = self.scan(&cell, c, all) {
                return Some(i);
            }
        }
        None
    }

    fn insert(&mut self, c: &ActionAngle, idx: usize) {
        let cell = self.cell_of(c);
        self.cells.entry(cell).or_default().push(idx);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrbitStatus {
    Finite,
    Exhausted,
}

impl std::fmt::Display for OrbitStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            OrbitStatus::Finite => write!(f, "finite"),
            OrbitStatus::Exhausted => write!(f, "exhausted"),
        }
    }
}

/// One discovered orbit point with its shortest witness word from the seed
/// (BFS order; ties broken by parent order, then generator index).
#[derive(Debug, Clone)]
pub struct OrbitPoint {
    pub coords: ActionAngle,
    pub word: TwistWord,
    pub discovered_at: usize,
}

#[derive(Debug, Clone)]
pub struct OrbitResult {
    pub status: OrbitStatus,
    pub points: Vec<OrbitPoint>,
    pub layers: Vec<usize>,
}

#[derive(Debug, Clone, Copy)]
pub struct OrbitOptions {
    pub tol: f64,
    pub max_points: usize,
}

impl Default for OrbitOptions {
    fn default() -> OrbitOptions {
        OrbitOptions {
            tol: DEFAULT_TOL,
            max_points: DEFAULT_MAX_POINTS,
        }
    }
}

/// Layered breadth-first enumeration of the orbit of `seed` under all
/// half-twist generators, deduplicating in action-angle coordinates.
/// Returns Finite exactly when a layer closes with no new points before the
/// cutoff; Exhausted when `max_points` or the layer cap is hit. The output
/// is deterministic: points are sorted by canonical key.
pub fn enumerate(
    alpha: &AngleVector,
    seed: &ActionAngle,
    opts: &OrbitOptions,
) -> Result<OrbitResult, OrbitError> {
    validate_alpha(alpha)?;
    seed.validate(alpha)?;
    let n = alpha.n();
    let gens = generator_set(n)?;

    let chain = build_chain(alpha, seed)?;
    let rep0 = Representation::from_chain(&chain, alpha)?;
    let coords0 = coords_from_rep(&rep0)?;

    let mut dedup = Dedup::new(opts.tol);
    let mut coords: Vec<ActionAngle> = vec![coords0.clone()];
    let mut points: Vec<OrbitPoint> = vec![OrbitPoint {
        coords: coords0,
        word: TwistWord::empty(),
        discovered_at: 0,
    }];
    let mut reps: Vec<Representation> = vec![rep0];
    dedup.insert(&points[0].coords, 0);

    let mut layers = vec![1usize];
    let mut frontier: Vec<usize> = vec![0];
    let mut status = OrbitStatus::Exhausted;

    'layers: for layer in 1..=MAX_LAYERS {
        let candidates: Vec<(usize, usize)> = frontier
            .iter()
            .flat_map(|&p| (0..gens.len()).map(move |g| (p, g)))
            .collect();
        let expanded: Vec<Result<(Representation, ActionAngle), OrbitError>> = candidates
            .par_iter()
            .map(|&(p, g)| {
                let rep = twist_algebraic(&reps[p], gens[g]);
                let c = coords_from_rep(&rep)?;
                Ok((rep, c))
            })
            .collect();

        let mut new_frontier = Vec::new();
        for (&(p, g), item) in candidates.iter().zip(expanded) {
            let (rep, c) = item?;
            if dedup.query(&c, &coords).is_some() {
                continue;
            }
            if points.len() >= opts.max_points {
                layers.push(new_frontier.len());
                status = OrbitStatus::Exhausted;
                break 'layers;
            }
            let idx = points.len();
            let mut word = points[p].word.clone();
            word.push(gens[g], false);
            dedup.insert(&c, idx);
            coords.push(c.clone());
            points.push(OrbitPoint {
                coords: c,
                word,
                discovered_at: layer,
            });
            reps.push(rep);
            new_frontier.push(idx);
        }
        layers.push(new_frontier.len());
        if new_frontier.is_empty() {
            status = OrbitStatus::Finite;
            break;
        }
        frontier = new_frontier;
    }

    points.sort_by_cached_key(|p| canonicalize(&p.coords, SORT_GRID));
    Ok(OrbitResult {
        status,
        points,
        layers,
    })
}

/// The 15 rational angles that the beta coordinates of every regular point
/// of a finite orbit must take:
/// {2pi/3, pi, 4pi/3} U {pi/2, 3pi/2} U {2k*pi/5} U {2k*pi/7}.
pub fn beta_angle_set() -> Vec<RationalAngle> {
    [
        (2, 3),
        (1, 1),
        (4, 3),
        (1, 2),
        (3, 2),
        (2, 5),
        (4, 5),
        (6, 5),
        (8, 5),
        (2, 7),
        (4, 7),
        (6, 7),
        (8, 7),
        (10, 7),
        (12, 7),
    ]
    .iter()
    .map(|&(n, d)| RationalAngle::new(n, d).expect("static angle list"))
    .collect()
}

#[derive(Debug, Clone)]
pub struct BetaPointReport {
    pub point_index: usize,
    pub regular: bool,
    pub matches: Vec<Option<RationalAngle>>,
    pub ok: bool,
}

#[derive(Debug, Clone)]
pub struct BetaReport {
    pub all_ok: bool,
    pub entries: Vec<BetaPointReport>,
}

/// Checks each regular orbit point's beta entries against the 15-angle
/// list: every entry must be recognized (denominator at most 7) as one of
/// the listed values within `tol`. Singular points are reported but not
/// constrained.
pub fn beta_membership_check(result: &OrbitResult, tol: f64) -> BetaReport {
    let set = beta_angle_set();
    let mut entries = Vec::with_capacity(result.points.len());
    for (i, p) in result.points.iter().enumerate() {
        let regular = p.coords.degenerate.iter().all(|&d| !d);
        if !regular {
            entries.push(BetaPointReport {
                point_index: i,
                regular,
                matches: Vec::new(),
                ok: true,
            });
            continue;
        }
        let matches: Vec<Option<RationalAngle>> = p
            .coords
            .beta
            .iter()
            .map(|&b| {
                crate::trigfields::recognize_rational_angle(b, 7, tol)
                    .filter(|r| set.contains(r))
            })
            .collect();
        let ok = matches.iter().all(|m| m.is_some());
        entries.push(BetaPointReport {
            point_index: i,
            regular,
            matches,
            ok,
        });
    }
    BetaReport {
        all_ok: entries.iter().all(|e| e.ok),
        entries,
    }
}

/// Serialized orbit document; also the golden-table format.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OrbitDocument {
    pub n: usize,
    pub alpha: Vec<Angle>,
    pub tol: f64,
    pub status: OrbitStatus,
    pub points: Vec<PointRecord>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PointRecord {
    pub beta: Vec<f64>,
    pub gamma: Vec<Option<f64>>,
    pub mask: Vec<bool>,
    pub word: String,
}

impl OrbitDocument {
    pub fn alpha_vector(&self) -> Result<AngleVector, crate::chains::ChainError> {
        AngleVector::new(self.alpha.clone())
    }

    pub fn point_coords(&self) -> Vec<ActionAngle> {
        self.points
            .iter()
            .map(|p| ActionAngle {
                beta: p.beta.clone(),
                gamma: p.gamma.clone(),
                degenerate: p.mask.clone(),
            })
            .collect()
    }
}

/// Packs an enumeration result into the serializable document.
pub fn to_document(result: &OrbitResult, alpha: &AngleVector, tol: f64) -> OrbitDocument {
    OrbitDocument {
        n: alpha.n(),
        alpha: alpha.entries.clone(),
        tol,
        status: result.status,
        points: result
            .points
            .iter()
            .map(|p| PointRecord {
                beta: p.coords.beta.clone(),
                gamma: p.coords.gamma.clone(),
                mask: p.coords.degenerate.clone(),
                word: p.word.to_string(),
            })
            .collect(),
    }
}

/// CSV mirror of the document fields, one row per point; the word column is
/// quoted since generator names contain commas.
pub fn to_csv(doc: &OrbitDocument) -> String {
    let nb = doc.n.saturating_sub(3);
    let ng = doc.n.saturating_sub(2);
    let mut out = String::new();
    for k in 1..=nb {
        out.push_str(&format!("beta_{k},"));
    }
    for k in 1..=nb {
        out.push_str(&format!("gamma_{k},"));
    }
    for k in 1..=ng {
        out.push_str(&format!("mask_{k},"));
    }
    out.push_str("word\n");
    for p in &doc.points {
        for b in &p.beta {
            out.push_str(&format!("{b},"));
        }
        for g in &p.gamma {
            match g {
                Some(v) => out.push_str(&format!("{v},")),
                None => out.push(','),
            }
        }
        for m in &p.mask {
            out.push_str(&format!("{m},"));
        }
        out.push_str(&format!("\"{}\"\n", p.word));
    }
    out
}

/// Directory holding the golden tables: ORBITFORGE_DATA if set, else
/// ./data.
pub fn data_dir() -> PathBuf {
    std::env::var_os("ORBITFORGE_DATA")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("data"))
}

/// Loads an orbit document from an explicit path, falling back to the data
/// directory for bare names.
pub fn load_document(name: &str) -> Result<OrbitDocument, OrbitError> {
    let direct = Path::new(name);
    let path = if direct.exists() {
        direct.to_path_buf()
    } else {
        data_dir().join(name)
    };
    let text = std::fs::read_to_string(&path)
        .map_err(|e| OrbitError::Table(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| OrbitError::Table(format!("cannot parse {}: {e}", path.display())))
}

#[derive(Debug, Clone)]
pub struct VerifyReport {
    /// Number of reference rows matched one-to-one by computed points.
    pub matched: usize,
    /// Reference row indices with no matching computed point.
    pub missing: Vec<usize>,
    /// Computed point indices matching no reference row.
    pub extra: Vec<usize>,
    /// Reference row indices whose word replay does not land on the row.
    pub displaced: Vec<usize>,
    /// Total number of reference rows.
    pub rows: usize,
}

impl VerifyReport {
    pub fn ok(&self) -> bool {
        self.missing.is_empty() && self.extra.is_empty() && self.displaced.is_empty()
    }
}

/// Verifies an enumeration result against a golden table: a one-to-one
/// match between computed points and reference rows within `tol`, plus a
/// replay check applying each row's word (in the table convention) to the
/// table's basepoint row.
pub fn verify_against_table(
    result: &OrbitResult,
    reference: &OrbitDocument,
    tol: f64,
) -> Result<VerifyReport, OrbitError> {
    let alpha = reference.alpha_vector()?;
    validate_alpha(&alpha)?;
    let rows = reference.point_coords();
    for (coords, rec) in rows.iter().zip(reference.points.iter()) {
        coords.validate(&alpha).map_err(|e| {
            OrbitError::Table(format!("invalid reference row (word \"{}\"): {e}", rec.word))
        })?;
    }

    // Bijection between computed points and reference rows.
    let mut used = vec![false; result.points.len()];
    let mut missing = Vec::new();
    let mut matched = 0usize;
    for (ri, row) in rows.iter().enumerate() {
        let found = result
            .points
            .iter()
            .enumerate()
            .find(|(pi, p)| !used[*pi] && coordinates_match(&p.coords, row, tol));
        match found {
            Some((pi, _)) => {
                used[pi] = true;
                matched += 1;
            }
            None => missing.push(ri),
        }
    }
    let extra: Vec<usize> = used
        .iter()
        .enumerate()
        .filter(|(_, &u)| !u)
        .map(|(i, _)| i)
        .collect();

    // Word replay from the table's basepoint (the empty-word row).
    let base_idx = reference
        .points
        .iter()
        .position(|p| p.word.trim().is_empty())
        .ok_or_else(|| OrbitError::Table("reference has no basepoint (empty word) row".into()))?;
    let base_chain = build_chain(&alpha, &rows[base_idx])?;
    let base_rep = Representation::from_chain(&base_chain, &alpha)?;
    let mut displaced = Vec::new();
    for (ri, rec) in reference.points.iter().enumerate() {
        let word = parse_word(&rec.word, reference.n)?;
        let rep = base_rep.apply_word(&word, TABLE_WORD_DIRECTION);
        let got = coords_from_rep(&rep)?;
        if !coordinates_match(&got, &rows[ri], tol) {
            displaced.push(ri);
        }
    }

    Ok(VerifyReport {
        matched,
        missing,
        extra,
        displaced,
        rows: rows.len(),
    })
}
