//! Python bindings, importable as `knn_minimax`.

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyModule;

use knn_minimax::analysis::{self, MarginSample, RateQuery, Side, TailForm, TailSample, TailSpec};
use knn_minimax::harness::{self, DensityChoice, ExperimentConfig, ModelSpec, RatesConfig};
use knn_minimax::models::{AssouadNetwork, Bandwidth, DensityVariant, FeatureLaw, KdeModel, LocationModel};
use knn_minimax::rng::{RngStream, StreamRng};
use knn_minimax::rules::{self, DensitySource, KSchedule};
use knn_minimax::{Backend, Dataset, Error, OwnedNeighborIndex};

fn err(e: Error) -> PyErr {
    match e {
        Error::Io(e) => PyIOError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn json_to_py<'py>(py: Python<'py>, value: &impl serde::Serialize) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn parse_backend(name: &str) -> PyResult<Backend> {
    match name {
        "tree" | "kdtree" => Ok(Backend::Tree),
        "brute" => Ok(Backend::Brute),
        other => Err(PyValueError::new_err(format!("unknown backend `{other}` (tree or brute)"))),
    }
}

/// Labeled points with a common dimension and labels in {0, 1}.
#[pyclass(name = "Dataset", module = "knn_minimax", skip_from_py_object)]
#[derive(Clone)]
struct PyDataset {
    inner: Dataset,
}

#[pymethods]
impl PyDataset {
    #[new]
    fn new(x: Vec<Vec<f64>>, y: Vec<i64>) -> PyResult<Self> {
        if x.len() != y.len() {
            return Err(PyValueError::new_err(format!("{} points but {} labels", x.len(), y.len())));
        }
        let inner = Dataset::from_raw(x.into_iter().zip(y)).map_err(err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn from_csv(path: &str) -> PyResult<Self> {
        let file = std::fs::File::open(path).map_err(|e| PyIOError::new_err(e.to_string()))?;
        let inner = Dataset::read_csv(std::io::BufReader::new(file)).map_err(err)?;
        Ok(Self { inner })
    }

    fn to_csv(&self, path: &str) -> PyResult<()> {
        let file = std::fs::File::create(path).map_err(|e| PyIOError::new_err(e.to_string()))?;
        self.inner.write_csv(std::io::BufWriter::new(file)).map_err(err)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    /// Coordinates of point `i`.
    fn x(&self, i: usize) -> PyResult<Vec<f64>> {
        self.check(i)?;
        Ok(self.inner.x(i).to_vec())
    }

    fn y(&self, i: usize) -> PyResult<u8> {
        self.check(i)?;
        Ok(self.inner.y(i))
    }

    #[getter]
    fn labels(&self) -> Vec<u8> {
        self.inner.labels().to_vec()
    }

    /// All coordinates as a list of rows.
    #[getter]
    fn points(&self) -> Vec<Vec<f64>> {
        self.inner.points().map(|(x, _)| x.to_vec()).collect()
    }

    fn __repr__(&self) -> String {
        format!("Dataset(len={}, dim={})", self.inner.len(), self.inner.dim())
    }
}

impl PyDataset {
    fn check(&self, i: usize) -> PyResult<()> {
        if i < self.inner.len() {
            Ok(())
        } else {
            Err(pyo3::exceptions::PyIndexError::new_err(format!("index {i} out of range")))
        }
    }
}

/// Exact k-nearest-neighbor search over a copy of a dataset.
#[pyclass(name = "NeighborIndex", module = "knn_minimax")]
struct PyNeighborIndex {
    inner: OwnedNeighborIndex,
}

#[pymethods]
impl PyNeighborIndex {
    #[new]
    #[pyo3(signature = (dataset, backend = "tree"))]
    fn new(dataset: &PyDataset, backend: &str) -> PyResult<Self> {
        let inner = OwnedNeighborIndex::build(dataset.inner.clone(), parse_backend(backend)?).map_err(err)?;
        Ok(Self { inner })
    }

    /// `[(index, distance, label), ...]` sorted by distance then index.
    fn k_nearest(&self, query: Vec<f64>, k: usize) -> PyResult<Vec<(usize, f64, u8)>> {
        let list = self.inner.k_nearest(&query, k).map_err(err)?;
        Ok(list.into_iter().map(|n| (n.index, n.distance, n.label)).collect())
    }

    /// Majority vote of the `k` nearest labels (ties go to 0).
    fn classify(&self, query: Vec<f64>, k: usize) -> PyResult<u8> {
        let list = self.inner.k_nearest(&query, k).map_err(err)?;
        Ok(rules::vote_prefix(list.iter().map(|n| n.label), k))
    }

    /// `η̂(query)` with `k` neighbors.
    fn eta_hat(&self, query: Vec<f64>, k: usize) -> PyResult<f64> {
        let list = self.inner.k_nearest(&query, k).map_err(err)?;
        let labels: Vec<u8> = list.iter().map(|n| n.label).collect();
        rules::eta_hat(&labels).map_err(err)
    }

    fn __len__(&self) -> usize {
        self.inner.data().len()
    }
}

/// A location model or a lower-bound network.
#[pyclass(name = "Model", module = "knn_minimax", skip_from_py_object)]
#[derive(Clone)]
struct PyModel {
    inner: ModelSpec,
}

#[pymethods]
impl PyModel {
    /// Parses a JSON descriptor or a bare family name.
    #[new]
    fn new(descriptor: &str) -> PyResult<Self> {
        Ok(Self { inner: ModelSpec::parse(descriptor).map_err(err)? })
    }

    #[staticmethod]
    #[pyo3(signature = (sigma = 1.0, b = 1.0))]
    fn gauss(sigma: f64, b: f64) -> PyResult<Self> {
        Ok(LocationModel::gauss(sigma, b).map_err(err)?.into())
    }

    #[staticmethod]
    #[pyo3(signature = (lam = 1.0, b = 1.0))]
    fn laplace(lam: f64, b: f64) -> PyResult<Self> {
        Ok(LocationModel::laplace(lam, b).map_err(err)?.into())
    }

    #[staticmethod]
    #[pyo3(signature = (gamma = 1.0, b = 1.0))]
    fn cauchy(gamma: f64, b: f64) -> PyResult<Self> {
        Ok(LocationModel::cauchy(gamma, b).map_err(err)?.into())
    }

    #[staticmethod]
    #[pyo3(signature = (g = 1.0, b = 0.5))]
    fn power_law(g: f64, b: f64) -> PyResult<Self> {
        Ok(LocationModel::power_law(g, b).map_err(err)?.into())
    }

    /// Network with `m` balls at scale `1/q`; `tent_gamma` selects the tent density.
    #[staticmethod]
    #[pyo3(signature = (q, m, omega, sigma = None, c_phi = 1.0, tent_gamma = None))]
    fn assouad(q: u32, m: u32, omega: f64, sigma: Option<Vec<i8>>, c_phi: f64, tent_gamma: Option<f64>) -> PyResult<Self> {
        let variant = match tent_gamma {
            Some(gamma) => DensityVariant::TentDensity { gamma },
            None => DensityVariant::ConstantDensity,
        };
        let sigma = sigma.unwrap_or_else(|| vec![1; m as usize]);
        let net = AssouadNetwork::new(q, m, omega, sigma, c_phi, variant).map_err(err)?;
        Ok(Self { inner: net.into() })
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.as_model().dim()
    }

    fn to_json(&self) -> String {
        self.inner.to_json().to_string()
    }

    fn eta(&self, x: Vec<f64>) -> PyResult<f64> {
        self.check_dim(&x)?;
        Ok(self.inner.as_model().eta(&x))
    }

    fn density(&self, x: Vec<f64>) -> PyResult<f64> {
        self.check_dim(&x)?;
        Ok(self.inner.as_model().density(&x))
    }

    fn bayes_classify(&self, x: Vec<f64>) -> PyResult<u8> {
        self.check_dim(&x)?;
        Ok(self.inner.as_model().bayes_classify(&x))
    }

    fn bayes_risk(&self) -> PyResult<f64> {
        self.inner.as_model().bayes_risk().map_err(err)
    }

    /// `n` labeled draws from stream `(seed, stream)`.
    #[pyo3(signature = (n, seed, stream = 0))]
    fn sample(&self, n: usize, seed: u64, stream: u64) -> PyDataset {
        PyDataset { inner: self.inner.as_model().sample(n, &RngStream::new(seed, stream)) }
    }

    fn __repr__(&self) -> String {
        format!("Model({})", self.inner.name())
    }
}

impl PyModel {
    fn check_dim(&self, x: &[f64]) -> PyResult<()> {
        let d = self.inner.as_model().dim();
        if x.len() == d {
            Ok(())
        } else {
            Err(err(Error::DimMismatch { expected: d, found: x.len() }))
        }
    }
}

impl From<LocationModel> for PyModel {
    fn from(m: LocationModel) -> Self {
        Self { inner: m.into() }
    }
}

/// Gaussian kernel density estimate with Silverman's bandwidth (or a fixed one).
#[pyclass(name = "Kde", module = "knn_minimax")]
struct PyKde {
    inner: KdeModel,
}

#[pymethods]
impl PyKde {
    #[new]
    #[pyo3(signature = (points, bandwidth = None))]
    fn new(points: Vec<Vec<f64>>, bandwidth: Option<f64>) -> PyResult<Self> {
        let bw = bandwidth.map_or(Bandwidth::Silverman, Bandwidth::Fixed);
        Ok(Self { inner: knn_minimax::models::kde_fit(&points, bw).map_err(err)? })
    }

    #[getter]
    fn bandwidth(&self) -> f64 {
        self.inner.bandwidth()
    }

    fn eval(&self, x: Vec<f64>) -> PyResult<f64> {
        if x.len() != self.inner.dim() {
            return Err(err(Error::DimMismatch { expected: self.inner.dim(), found: x.len() }));
        }
        Ok(self.inner.eval(&x))
    }
}

/// Stand-in law with a known density value, for slicing without a model.
struct PointDensity {
    dim: usize,
    value: f64,
}

impl FeatureLaw for PointDensity {
    fn dim(&self) -> usize {
        self.dim
    }

    fn density(&self, _: &[f64]) -> f64 {
        self.value
    }

    fn draw(&self, _: &mut StreamRng) -> Vec<f64> {
        vec![0.0; self.dim]
    }
}

/// Number of neighbors for a schedule (`fixed<k>`, `compact`, `general`,
/// `standard`, `sliced`, `sliced_theoretical`). Sliced schedules need the
/// density value at the query point.
#[pyfunction]
#[pyo3(signature = (schedule, n, d = 1, alpha = 1.0, density = None))]
fn choose_k(schedule: &str, n: usize, d: usize, alpha: f64, density: Option<f64>) -> PyResult<usize> {
    let schedule = KSchedule::parse(schedule, alpha).map_err(err)?;
    let law = density.map(|value| PointDensity { dim: d, value });
    let source = law.as_ref().map(|l| DensitySource::Analytic(l));
    let x = vec![0.0; d];
    rules::choose_k(&schedule, n, d, Some(&x), source.as_ref()).map_err(err)
}

#[pyfunction]
fn hoeffding_bound(k: usize, s: f64) -> f64 {
    analysis::hoeffding_bound(k, s)
}

#[pyfunction]
fn misclass_bound(k: usize, eps: f64, delta_bias: f64) -> f64 {
    analysis::misclass_bound(k, eps, delta_bias)
}

#[pyfunction]
fn bias_bound(lipschitz: f64, kappa: f64, k: usize, n: usize, a: f64, d: usize) -> f64 {
    analysis::bias_bound(lipschitz, kappa, k, n, a, d)
}

/// Least-squares slope of `ln y` on `ln n`: `(slope, intercept, r2)`.
#[pyfunction]
fn fit_rate(points: Vec<(f64, f64)>) -> PyResult<(f64, f64, f64)> {
    let fit = analysis::fit_rate(&points).map_err(err)?;
    Ok((fit.slope, fit.intercept, fit.r2))
}

fn parse_psi(text: &str, c: f64) -> PyResult<TailSpec> {
    let bad = || PyValueError::new_err(format!("bad psi `{text}`: expected id, power:g or powerlog:g,r"));
    let form = match text.split_once(':') {
        None if text == "id" => TailForm::Identity,
        Some(("power", g)) => TailForm::Power { g: g.parse().map_err(|_| bad())? },
        Some(("powerlog", rest)) => {
            let (g, r) = rest.split_once(',').ok_or_else(bad)?;
            TailForm::PowerLog { g: g.parse().map_err(|_| bad())?, r: r.parse().map_err(|_| bad())? }
        }
        _ => return Err(bad()),
    };
    Ok(TailSpec { form, c })
}

/// Solves the balance equation; returns `{"scale", "rate", "k"}`.
#[pyfunction]
#[pyo3(signature = (n, psi = "id", alpha = 1.0, d = 1, side = "upper", c = 1.0))]
fn solve_balance<'py>(
    py: Python<'py>,
    n: f64,
    psi: &str,
    alpha: f64,
    d: usize,
    side: &str,
    c: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let side = match side {
        "upper" => Side::Upper,
        "lower" => Side::Lower,
        other => return Err(PyValueError::new_err(format!("side must be upper or lower, got `{other}`"))),
    };
    let sol = analysis::solve_balance(&parse_psi(psi, c)?, &RateQuery { alpha, d, n, side }).map_err(err)?;
    json_to_py(py, &sol)
}

/// `P(μ(X) < eps)` by Monte Carlo: `(estimate, standard_error)`.
#[pyfunction]
#[pyo3(signature = (model, eps, samples = 1_000_000, seed = 1))]
fn empirical_tail(py: Python<'_>, model: &PyModel, eps: f64, samples: usize, seed: u64) -> PyResult<(f64, f64)> {
    let spec = model.inner.clone();
    let est = py
        .detach(|| TailSample::draw(spec.as_model(), samples, &RngStream::new(seed, 0)).map(|s| s.fraction_below(eps)))
        .map_err(err)?;
    Ok((est.estimate, est.mc_se))
}

/// `P(0 < |η(X) − 1/2| ≤ t)` by Monte Carlo: `(estimate, standard_error)`.
#[pyfunction]
#[pyo3(signature = (model, t, samples = 1_000_000, seed = 1))]
fn empirical_margin(py: Python<'_>, model: &PyModel, t: f64, samples: usize, seed: u64) -> PyResult<(f64, f64)> {
    let spec = model.inner.clone();
    let est = py
        .detach(|| MarginSample::draw(spec.as_model(), samples, &RngStream::new(seed, 0)).map(|s| s.fraction_within(t)))
        .map_err(err)?;
    Ok((est.estimate, est.mc_se))
}

/// Paired Monte Carlo excess risk; returns one dict per schedule.
#[pyfunction]
#[pyo3(signature = (model, n_train, schedules, replications = 100, n_test = 200, seed = 1, alpha = 1.0, density = "kde"))]
#[allow(clippy::too_many_arguments)]
fn run_excess_risk<'py>(
    py: Python<'py>,
    model: &PyModel,
    n_train: usize,
    schedules: Vec<String>,
    replications: usize,
    n_test: usize,
    seed: u64,
    alpha: f64,
    density: &str,
) -> PyResult<Bound<'py, PyAny>> {
    let schedules = schedules
        .iter()
        .map(|s| KSchedule::parse(s, alpha))
        .collect::<knn_minimax::Result<Vec<_>>>()
        .map_err(err)?;
    let density_source = match density {
        "kde" => DensityChoice::Kde,
        "analytic" => DensityChoice::Analytic,
        other => return Err(PyValueError::new_err(format!("density must be kde or analytic, got `{other}`"))),
    };
    let config = ExperimentConfig {
        model: model.inner.clone(),
        n_train,
        n_test,
        replications,
        schedules,
        seed,
        density_source,
    };
    let res = py.detach(|| harness::run_excess_risk(&config)).map_err(err)?;
    json_to_py(py, &res)
}

/// The five-row standard versus sliced comparison; one dict per cell.
#[pyfunction]
#[pyo3(signature = (seed = 1, replications = 1000, sizes = vec![100, 500, 1000], n_test = 200))]
fn run_table2<'py>(
    py: Python<'py>,
    seed: u64,
    replications: usize,
    sizes: Vec<usize>,
    n_test: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let cells = py
        .detach(|| harness::run_table2(seed, replications, &sizes, n_test))
        .map_err(err)?;
    json_to_py(py, &cells)
}

/// Rate curves for power-law tails; one dict per `g`.
#[pyfunction]
#[pyo3(signature = (g_list, n_grid, replications = 200, seed = 1, n_test = 200, b = 0.5))]
fn run_rates<'py>(
    py: Python<'py>,
    g_list: Vec<f64>,
    n_grid: Vec<usize>,
    replications: usize,
    seed: u64,
    n_test: usize,
    b: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let mut config = RatesConfig::new(g_list, n_grid, replications, seed);
    config.n_test = n_test;
    config.b = b;
    let curves = py.detach(|| harness::run_rates(&config)).map_err(err)?;
    json_to_py(py, &curves)
}

/// KS distance between the two Poissonized constructions of `η̂(x)` for the
/// class laws of a location model.
#[pyfunction]
#[pyo3(signature = (model, x, n = 50, k = 5, replications = 10_000, seed = 1))]
fn poissonization_check(
    py: Python<'_>,
    model: &PyModel,
    x: f64,
    n: usize,
    k: usize,
    replications: usize,
    seed: u64,
) -> PyResult<f64> {
    let ModelSpec::Location(m) = model.inner else {
        return Err(PyValueError::new_err("poissonization_check needs a location model"));
    };
    let res = py
        .detach(|| harness::poissonization_check(&m.class_law(0), &m.class_law(1), &[x], n, k, replications, seed))
        .map_err(err)?;
    Ok(res.ks_distance)
}

#[pymodule]
#[pyo3(name = "knn_minimax")]
fn knn_minimax_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDataset>()?;
    m.add_class::<PyNeighborIndex>()?;
    m.add_class::<PyModel>()?;
    m.add_class::<PyKde>()?;
    m.add_function(wrap_pyfunction!(choose_k, m)?)?;
    m.add_function(wrap_pyfunction!(hoeffding_bound, m)?)?;
    m.add_function(wrap_pyfunction!(misclass_bound, m)?)?;
    m.add_function(wrap_pyfunction!(bias_bound, m)?)?;
    m.add_function(wrap_pyfunction!(fit_rate, m)?)?;
    m.add_function(wrap_pyfunction!(solve_balance, m)?)?;
    m.add_function(wrap_pyfunction!(empirical_tail, m)?)?;
    m.add_function(wrap_pyfunction!(empirical_margin, m)?)?;
    m.add_function(wrap_pyfunction!(run_excess_risk, m)?)?;
    m.add_function(wrap_pyfunction!(run_table2, m)?)?;
    m.add_function(wrap_pyfunction!(run_rates, m)?)?;
    m.add_function(wrap_pyfunction!(poissonization_check, m)?)?;
    Ok(())
}
