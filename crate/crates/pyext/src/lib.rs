//! Python bindings for the orbitforge core: orbit enumeration, twist words,
//! chain rendering, golden-table verification, trigonometric fields and the
//! Fricke/lifting toolkit.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use orbitforge::chains::{build_chain, ActionAngle, Angle, AngleVector};
use orbitforge::fricke::{
    angle_vector_from_traces, benedetto_goldman, benedetto_goldman_margin, fricke_coeffs,
    okamoto, okamoto_tilde, quad_variants, traces_for_alpha, ThetaQuad, TraceQuad,
};
use orbitforge::orbits::{
    beta_membership_check, enumerate, load_document, to_csv, to_document, verify_against_table,
    OrbitDocument, OrbitOptions, OrbitResult, OrbitStatus,
};
use orbitforge::render::{chain_svg, Model};
use orbitforge::representation::{coords_from_rep, Representation, TwistDirection};
use orbitforge::surface::{generator_set, parse_word, sigma_to_tau};
use orbitforge::trigfields::{
    field_degree, is_discrete_triangle, list_angles, member, CosValue, FieldSpec, Rational,
};

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Angles arrive from Python either as `(num, den)` rational multiples of pi
/// or as plain floats.
#[derive(FromPyObject)]
enum AngleIn {
    Rational(i64, i64),
    Float(f64),
}

fn angle_vector(alpha: Vec<AngleIn>) -> PyResult<AngleVector> {
    let mut entries = Vec::with_capacity(alpha.len());
    for a in alpha {
        entries.push(match a {
            AngleIn::Rational(num, den) => Angle::rational(num, den).map_err(err)?,
            AngleIn::Float(v) => Angle::float(v),
        });
    }
    AngleVector::new(entries).map_err(err)
}

fn seed_coords(
    alpha: &AngleVector,
    beta: Vec<f64>,
    gamma: Vec<Option<f64>>,
) -> PyResult<ActionAngle> {
    ActionAngle::from_parts(alpha, beta, gamma).map_err(err)
}

fn representation(alpha: &AngleVector, coords: &ActionAngle) -> PyResult<Representation> {
    let chain = build_chain(alpha, coords).map_err(err)?;
    Representation::from_chain(&chain, alpha).map_err(err)
}

/// One orbit point: action-angle coordinates, degeneracy mask and the
/// shortest twist word reaching it from the seed.
#[pyclass(frozen)]
struct OrbitPointPy {
    #[pyo3(get)]
    beta: Vec<f64>,
    #[pyo3(get)]
    gamma: Vec<Option<f64>>,
    #[pyo3(get)]
    mask: Vec<bool>,
    #[pyo3(get)]
    word: String,
    #[pyo3(get)]
    discovered_at: usize,
}

#[pymethods]
impl OrbitPointPy {
    fn __repr__(&self) -> String {
        format!(
            "OrbitPoint(beta={:?}, gamma={:?}, word={:?})",
            self.beta, self.gamma, self.word
        )
    }
}

/// Result of an orbit enumeration, with serialization helpers.
#[pyclass]
struct OrbitRun {
    result: OrbitResult,
    doc: OrbitDocument,
    #[pyo3(get)]
    status: String,
    #[pyo3(get)]
    layers: Vec<usize>,
}

#[pymethods]
impl OrbitRun {
    #[getter]
    fn points(&self) -> Vec<OrbitPointPy> {
        self.result
            .points
            .iter()
            .map(|p| OrbitPointPy {
                beta: p.coords.beta.clone(),
                gamma: p.coords.gamma.clone(),
                mask: p.coords.degenerate.clone(),
                word: p.word.to_string(),
                discovered_at: p.discovered_at,
            })
            .collect()
    }

    fn __len__(&self) -> usize {
        self.result.points.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "OrbitRun(status={:?}, points={}, layers={:?})",
            self.status,
            self.result.points.len(),
            self.layers
        )
    }

    /// Document form of the run as pretty-printed JSON.
    fn json(&self) -> PyResult<String> {
        serde_json::to_string_pretty(&self.doc).map_err(err)
    }

    /// CSV mirror of the document, one row per point.
    fn csv(&self) -> String {
        to_csv(&self.doc)
    }

    /// True when every regular point's beta values lie in the finite-orbit
    /// angle list.
    #[pyo3(signature = (tol = 1e-6))]
    fn beta_membership_ok(&self, tol: f64) -> bool {
        beta_membership_check(&self.result, tol).all_ok
    }
}

/// Enumerates the twist orbit of a seed. `alpha` entries are `(num, den)`
/// multiples of pi or floats; `gamma` entries may be None in degenerate
/// slots.
#[pyfunction]
#[pyo3(signature = (alpha, beta, gamma, tol = 1e-6, max_points = 20000))]
fn enumerate_orbit(
    alpha: Vec<AngleIn>,
    beta: Vec<f64>,
    gamma: Vec<Option<f64>>,
    tol: f64,
    max_points: usize,
) -> PyResult<OrbitRun> {
    let alpha = angle_vector(alpha)?;
    let seed = seed_coords(&alpha, beta, gamma)?;
    let opts = OrbitOptions { tol, max_points };
    let result = enumerate(&alpha, &seed, &opts).map_err(err)?;
    let doc = to_document(&result, &alpha, tol);
    Ok(OrbitRun {
        status: result.status.to_string(),
        layers: result.layers.clone(),
        result,
        doc,
    })
}

/// Applies a twist word (e.g. "t(1,2)^2 t(2,3)^-1") to a seed and returns
/// the resulting `(beta, gamma)` coordinates.
#[pyfunction]
fn twist(
    alpha: Vec<AngleIn>,
    beta: Vec<f64>,
    gamma: Vec<Option<f64>>,
    word: &str,
) -> PyResult<(Vec<f64>, Vec<Option<f64>>)> {
    let alpha = angle_vector(alpha)?;
    let coords = seed_coords(&alpha, beta, gamma)?;
    let rep = representation(&alpha, &coords)?;
    let word = parse_word(word, alpha.n()).map_err(err)?;
    let twisted = rep.apply_word(&word, TwistDirection::Direct);
    let out = coords_from_rep(&twisted).map_err(err)?;
    Ok((out.beta, out.gamma))
}

/// SVG drawing of the triangle chain for a seed, in the "halfplane" or
/// "disk" model.
#[pyfunction]
#[pyo3(signature = (alpha, beta, gamma, model = "halfplane"))]
fn render_chain(
    alpha: Vec<AngleIn>,
    beta: Vec<f64>,
    gamma: Vec<Option<f64>>,
    model: &str,
) -> PyResult<String> {
    let alpha = angle_vector(alpha)?;
    let coords = seed_coords(&alpha, beta, gamma)?;
    let chain = build_chain(&alpha, &coords).map_err(err)?;
    let model = match model {
        "halfplane" => Model::HalfPlane,
        "disk" => Model::Disk,
        other => return Err(err(format!("unknown model {other:?}"))),
    };
    Ok(chain_svg(&chain, model))
}

/// Re-enumerates a stored orbit table from its basepoint row and checks the
/// one-to-one match plus word replay. Returns a dict with keys ok, matched,
/// rows, missing, extra, displaced and status.
#[pyfunction]
#[pyo3(signature = (path, tol = None))]
fn verify_table(py: Python<'_>, path: &str, tol: Option<f64>) -> PyResult<Py<PyDict>> {
    let doc = load_document(path).map_err(err)?;
    let alpha = doc.alpha_vector().map_err(err)?;
    let base = doc
        .points
        .iter()
        .position(|p| p.word.trim().is_empty())
        .ok_or_else(|| err("table has no basepoint (empty word) row"))?;
    let seed = doc.point_coords()[base].clone();
    let tol = tol.unwrap_or(doc.tol);
    let opts = OrbitOptions {
        tol,
        max_points: 20000,
    };
    let result = enumerate(&alpha, &seed, &opts).map_err(err)?;
    let report = verify_against_table(&result, &doc, tol).map_err(err)?;
    let dict = PyDict::new(py);
    dict.set_item("ok", report.ok() && result.status == OrbitStatus::Finite)?;
    dict.set_item("matched", report.matched)?;
    dict.set_item("rows", report.rows)?;
    dict.set_item("missing", report.missing)?;
    dict.set_item("extra", report.extra)?;
    dict.set_item("displaced", report.displaced)?;
    dict.set_item("status", result.status.to_string())?;
    Ok(dict.into())
}

/// Names of the half-twist generators acting on n punctures.
#[pyfunction]
fn generator_names(n: usize) -> PyResult<Vec<String>> {
    Ok(generator_set(n)
        .map_err(err)?
        .into_iter()
        .map(|g| g.to_string())
        .collect())
}

/// The half-twist sigma_{i,j} rewritten as a word in the tau generators.
#[pyfunction]
fn sigma_word(i: usize, j: usize, n: usize) -> PyResult<String> {
    Ok(sigma_to_tau(i, j, n).map_err(err)?.to_string())
}

/// Degree of Q(cos(pi/N)) over Q.
#[pyfunction]
#[pyo3(name = "field_degree")]
fn field_degree_py(n: u64) -> PyResult<u64> {
    Ok(field_degree(FieldSpec::new(n).map_err(err)?))
}

/// Whether 2cos(2pi*p/q) lies in Q(cos(pi/N)).
#[pyfunction]
fn field_contains(n: u64, p: u64, q: u64) -> PyResult<bool> {
    let spec = FieldSpec::new(n).map_err(err)?;
    let x = CosValue::new(p, q).map_err(err)?;
    Ok(member(x, spec))
}

/// Angles theta in (0, 2pi) with 2cos(theta/2) in Q(cos(pi/N)), as reduced
/// `(num, den)` multiples of pi.
#[pyfunction]
fn field_angles(n: u64) -> PyResult<Vec<(i64, i64)>> {
    let spec = FieldSpec::new(n).map_err(err)?;
    Ok(list_angles(spec).into_iter().map(|a| (a.num, a.den)).collect())
}

/// Rational parameters arrive as ints or `(num, den)` pairs.
#[derive(FromPyObject)]
enum RatIn {
    Pair(i64, i64),
    Int(i64),
}

impl RatIn {
    fn build(self) -> PyResult<Rational> {
        match self {
            RatIn::Pair(num, den) => Rational::new(num, den).map_err(err),
            RatIn::Int(v) => Rational::integer(v).map_err(err),
        }
    }
}

/// Discreteness of the rational triangle group with parameters p, q, r.
#[pyfunction]
fn discrete_triangle(p: RatIn, q: RatIn, r: RatIn) -> PyResult<bool> {
    is_discrete_triangle(p.build()?, q.build()?, r.build()?).map_err(err)
}

/// Coefficients (A, B, C, D) of the Fricke relation for boundary traces
/// (a, b, c, d).
#[pyfunction]
fn fricke_coefficients(a: f64, b: f64, c: f64, d: f64) -> PyResult<(f64, f64, f64, f64)> {
    let t = TraceQuad::new(a, b, c, d).map_err(err)?;
    let f = fricke_coeffs(t);
    Ok((f.a, f.b, f.c, f.d))
}

/// Lifting verdict for boundary traces: "SL(2,R)" or "SU(2)".
#[pyfunction]
fn lift_type(a: f64, b: f64, c: f64, d: f64) -> PyResult<String> {
    let t = TraceQuad::new(a, b, c, d).map_err(err)?;
    Ok(benedetto_goldman(t).map_err(err)?.to_string())
}

/// The two sides (LHS, RHS) of the lifting inequality.
#[pyfunction]
fn lift_margin(a: f64, b: f64, c: f64, d: f64) -> PyResult<(f64, f64)> {
    let t = TraceQuad::new(a, b, c, d).map_err(err)?;
    Ok(benedetto_goldman_margin(t))
}

/// Rotation angles recovered from boundary traces, sorted decreasing.
#[pyfunction]
fn alpha_from_traces(a: f64, b: f64, c: f64, d: f64) -> PyResult<Vec<f64>> {
    let t = TraceQuad::new(a, b, c, d).map_err(err)?;
    Ok(angle_vector_from_traces(t).map_err(err)?.values())
}

/// Boundary traces 2cos(alpha_i / 2) for an angle vector of length four.
#[pyfunction]
fn traces_from_alpha(alpha: Vec<f64>) -> PyResult<(f64, f64, f64, f64)> {
    let arr: [f64; 4] = alpha
        .try_into()
        .map_err(|_| err("alpha must have exactly four entries"))?;
    let t = traces_for_alpha(&arr).map_err(err)?;
    let [a, b, c, d] = t.entries();
    Ok((a, b, c, d))
}

/// Okamoto transformation on theta parameters (multiples of pi); pass
/// tilde=True for the conjugated variant.
#[pyfunction]
#[pyo3(signature = (theta, tilde = false))]
fn okamoto_map(theta: (f64, f64, f64, f64), tilde: bool) -> (f64, f64, f64, f64) {
    let t = ThetaQuad::new(theta.0, theta.1, theta.2, theta.3);
    let out = if tilde { okamoto_tilde(t) } else { okamoto(t) };
    let [a, b, c, d] = out.entries();
    (a, b, c, d)
}

/// Trace quadruples reachable from theta by sign and integer-shift moves,
/// filtered to entries inside (-2, 2).
#[pyfunction]
fn theta_variants(theta: (f64, f64, f64, f64)) -> Vec<(f64, f64, f64, f64)> {
    let t = ThetaQuad::new(theta.0, theta.1, theta.2, theta.3);
    quad_variants(t)
        .into_iter()
        .map(|q| {
            let [a, b, c, d] = q.entries();
            (a, b, c, d)
        })
        .collect()
}

#[pymodule]
fn orbitforge_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<OrbitRun>()?;
    m.add_class::<OrbitPointPy>()?;
    m.add_function(wrap_pyfunction!(enumerate_orbit, m)?)?;
    m.add_function(wrap_pyfunction!(twist, m)?)?;
    m.add_function(wrap_pyfunction!(render_chain, m)?)?;
    m.add_function(wrap_pyfunction!(verify_table, m)?)?;
    m.add_function(wrap_pyfunction!(generator_names, m)?)?;
    m.add_function(wrap_pyfunction!(sigma_word, m)?)?;
    m.add_function(wrap_pyfunction!(field_degree_py, m)?)?;
    m.add_function(wrap_pyfunction!(field_contains, m)?)?;
    m.add_function(wrap_pyfunction!(field_angles, m)?)?;
    m.add_function(wrap_pyfunction!(discrete_triangle, m)?)?;
    m.add_function(wrap_pyfunction!(fricke_coefficients, m)?)?;
    m.add_function(wrap_pyfunction!(lift_type, m)?)?;
    m.add_function(wrap_pyfunction!(lift_margin, m)?)?;
    m.add_function(wrap_pyfunction!(alpha_from_traces, m)?)?;
    m.add_function(wrap_pyfunction!(traces_from_alpha, m)?)?;
    m.add_function(wrap_pyfunction!(okamoto_map, m)?)?;
    m.add_function(wrap_pyfunction!(theta_variants, m)?)?;
    Ok(())
}
