//! Python bindings. Features cross the boundary row-per-point (`n x p`
//! nested sequences, numpy arrays work too); class ids are zero-based.

use std::path::PathBuf;

use mcda::eval::{
    default_gamma_grid, default_k, evaluate_method, fit_tuned, split_folds, EvalReport as CoreEvalReport,
    Method, MethodConfig, ParamChoice,
};
use mcda::generate::{
    generate_gaussian_mixture, generate_multilabel, generate_nullspace_toy, MultiLabelSpec, ToyGenSpec,
};
use mcda::io::{load_csv, report_to_string, write_csv, CsvSchema};
use mcda::{analyze, projected_separation, ErrorKind, LabeledDataset, MultiLabelDataset};
use nalgebra::DMatrix;
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;

create_exception!(mcda_py, McdaError, PyException, "Base class of every library error.");
create_exception!(mcda_py, ConfigError, McdaError, "Invalid configuration or tuning failure.");
create_exception!(mcda_py, DataError, McdaError, "Malformed or inconsistent input data.");
create_exception!(mcda_py, InfeasibleError, McdaError, "The method cannot be applied to this data.");
create_exception!(mcda_py, NumericalError, McdaError, "Numerical breakdown or degenerate statistics.");

fn to_py(e: mcda::Error) -> PyErr {
    let msg = e.to_string();
    match e.kind() {
        ErrorKind::Config => ConfigError::new_err(msg),
        ErrorKind::Data => DataError::new_err(msg),
        ErrorKind::Infeasible => InfeasibleError::new_err(msg),
        ErrorKind::Numerical => NumericalError::new_err(msg),
    }
}

trait OrPy<T> {
    fn or_py(self) -> PyResult<T>;
}

impl<T> OrPy<T> for mcda::Result<T> {
    fn or_py(self) -> PyResult<T> {
        self.map_err(to_py)
    }
}

/// `rows` is one inner sequence per output row.
fn from_rows(rows: &[Vec<f64>]) -> PyResult<DMatrix<f64>> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if let Some(i) = rows.iter().position(|r| r.len() != ncols) {
        return Err(DataError::new_err(format!(
            "row {i} has {} entries, expected {ncols}",
            rows[i].len()
        )));
    }
    Ok(DMatrix::from_fn(nrows, ncols, |i, j| rows[i][j]))
}

fn to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn parse_param(value: Option<&Bound<'_, PyAny>>) -> PyResult<ParamChoice> {
    let Some(v) = value else {
        return Ok(ParamChoice::Auto);
    };
    if let Ok(s) = v.extract::<String>() {
        return match s.as_str() {
            "auto" => Ok(ParamChoice::Auto),
            "tune" => Ok(ParamChoice::Tune(default_gamma_grid())),
            _ => Err(ConfigError::new_err(format!("expected a number, 'auto' or 'tune', got '{s}'"))),
        };
    }
    if let Ok(grid) = v.extract::<Vec<f64>>() {
        return Ok(ParamChoice::Tune(grid));
    }
    Ok(ParamChoice::Fixed(v.extract::<f64>()?))
}

fn method_config(
    method: &str,
    gamma: Option<&Bound<'_, PyAny>>,
    mu: Option<&Bound<'_, PyAny>>,
    seed: u64,
) -> PyResult<MethodConfig> {
    let method: Method = method.parse().or_py()?;
    let mut config = MethodConfig::new(method)
        .with_gamma(parse_param(gamma)?)
        .with_mu(parse_param(mu)?);
    config.tune_seed = seed;
    Ok(config)
}

/// Labeled points, single- or multi-label.
#[pyclass(frozen, module = "mcda_py")]
pub struct Dataset {
    inner: mcda::Dataset,
}

#[pymethods]
impl Dataset {
    /// Single-label data from `n x p` features and `n` class ids in `0..K`.
    #[new]
    #[pyo3(signature = (features, labels, class_count = None))]
    fn new(features: Vec<Vec<f64>>, labels: Vec<usize>, class_count: Option<usize>) -> PyResult<Self> {
        let x = from_rows(&features)?.transpose();
        let d = match class_count {
            Some(k) => LabeledDataset::new(x, labels, k),
            None => LabeledDataset::from_labels(x, labels),
        }
        .or_py()?;
        Ok(Dataset { inner: d.into() })
    }

    /// Multi-label data from `n x p` features and an `n x K` 0/1 indicator
    /// (bools or numbers).
    #[staticmethod]
    fn multilabel(features: Vec<Vec<f64>>, indicator: Vec<Vec<f64>>) -> PyResult<Self> {
        let x = from_rows(&features)?.transpose();
        let mut bits = Vec::with_capacity(indicator.len());
        for (i, row) in indicator.iter().enumerate() {
            let row: PyResult<Vec<bool>> = row
                .iter()
                .map(|&v| match v {
                    0.0 => Ok(false),
                    1.0 => Ok(true),
                    _ => Err(DataError::new_err(format!("indicator row {i}: {v} is not 0 or 1"))),
                })
                .collect();
            bits.push(row?);
        }
        let d = MultiLabelDataset::new(x, bits).or_py()?;
        Ok(Dataset { inner: d.into() })
    }

    #[staticmethod]
    fn load_csv(path: PathBuf) -> PyResult<Self> {
        Ok(Dataset {
            inner: load_csv(&path, CsvSchema::Detect).or_py()?,
        })
    }

    #[staticmethod]
    #[pyo3(signature = (class_count, points_per_class, dim, separation, seed = 0))]
    fn gaussian_mixture(
        class_count: usize,
        points_per_class: usize,
        dim: usize,
        separation: f64,
        seed: u64,
    ) -> PyResult<Self> {
        let d = generate_gaussian_mixture(class_count, points_per_class, dim, separation, seed).or_py()?;
        Ok(Dataset { inner: d.into() })
    }

    /// Small-sample toy whose class structure sits in a low-dimensional
    /// subspace, so the within-class scatter has a null space.
    #[staticmethod]
    #[pyo3(signature = (seed = 0, noise_scale = 0.1, class_count = 3, points_per_class = 10, ambient_dim = 40, intrinsic_dim = 3))]
    fn nullspace_toy(
        seed: u64,
        noise_scale: f64,
        class_count: usize,
        points_per_class: usize,
        ambient_dim: usize,
        intrinsic_dim: usize,
    ) -> PyResult<Self> {
        let spec = ToyGenSpec {
            class_count,
            points_per_class,
            ambient_dim,
            intrinsic_dim,
            noise_scale,
            seed,
            ..ToyGenSpec::default()
        };
        Ok(Dataset {
            inner: generate_nullspace_toy(&spec).or_py()?.into(),
        })
    }

    #[staticmethod]
    #[pyo3(signature = (label_count, n, dim, seed = 0))]
    fn multilabel_synthetic(label_count: usize, n: usize, dim: usize, seed: u64) -> PyResult<Self> {
        let d = generate_multilabel(&MultiLabelSpec::new(label_count, n, dim, seed)).or_py()?;
        Ok(Dataset { inner: d.into() })
    }

    fn write_csv(&self, path: PathBuf) -> PyResult<()> {
        write_csv(&self.inner, &path).or_py()
    }

    /// Features as `n x p` rows.
    fn features(&self) -> Vec<Vec<f64>> {
        to_rows(&self.inner.features().transpose())
    }

    /// Class ids (single-label) or `None` for multi-label data.
    fn labels(&self) -> Option<Vec<usize>> {
        match &self.inner {
            mcda::Dataset::Single(d) => Some(d.labels().to_vec()),
            mcda::Dataset::Multi(_) => None,
        }
    }

    /// The `n x K` indicator; one-hot rows for single-label data.
    fn indicator(&self) -> Vec<Vec<bool>> {
        match &self.inner {
            mcda::Dataset::Single(d) => d.to_one_hot().indicator().to_vec(),
            mcda::Dataset::Multi(d) => d.indicator().to_vec(),
        }
    }

    #[getter]
    fn n_points(&self) -> usize {
        self.inner.n_points()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn class_count(&self) -> usize {
        self.inner.class_count()
    }

    #[getter]
    fn is_multilabel(&self) -> bool {
        matches!(self.inner, mcda::Dataset::Multi(_))
    }

    fn __len__(&self) -> usize {
        self.inner.n_points()
    }

    fn __repr__(&self) -> String {
        format!(
            "Dataset(n={}, p={}, K={}, multilabel={})",
            self.inner.n_points(),
            self.inner.dim(),
            self.inner.class_count(),
            self.is_multilabel()
        )
    }
}

/// Between, within and total scatter matrices (`p x p` rows).
#[pyclass(frozen, get_all, module = "mcda_py")]
pub struct Scatter {
    between: Vec<Vec<f64>>,
    within: Vec<Vec<f64>>,
    total: Vec<Vec<f64>>,
}

#[pyfunction]
fn scatter(dataset: &Dataset) -> Scatter {
    let (_, s) = analyze(&dataset.inner);
    Scatter {
        between: to_rows(&s.between),
        within: to_rows(&s.within),
        total: to_rows(&s.total),
    }
}

/// The balancing gamma that equates the within term and the pair sum at
/// the full space.
#[pyfunction]
fn default_gamma(dataset: &Dataset) -> PyResult<f64> {
    let (stats, s) = analyze(&dataset.inner);
    mcda::mcda::default_gamma(&stats, &s).or_py()
}

#[pyclass(frozen, get_all, module = "mcda_py")]
pub struct SolverReport {
    gamma: f64,
    objective_trace: Vec<f64>,
    iterations: usize,
    converged: bool,
    final_objective: f64,
    final_within_trace: f64,
    final_min_pair_distance: f64,
}

impl From<mcda::SolverReport> for SolverReport {
    fn from(r: mcda::SolverReport) -> Self {
        SolverReport {
            gamma: r.gamma,
            objective_trace: r.objective_trace,
            iterations: r.iterations,
            converged: r.converged,
            final_objective: r.final_objective,
            final_within_trace: r.final_within_trace,
            final_min_pair_distance: r.final_min_pair_distance,
        }
    }
}

#[pymethods]
impl SolverReport {
    fn __repr__(&self) -> String {
        format!(
            "SolverReport(iterations={}, converged={}, objective={:.6e}, gamma={:.6e})",
            self.iterations, self.converged, self.final_objective, self.gamma
        )
    }
}

/// Projected between/within traces and the smallest projected pairwise
/// mean distance.
#[pyclass(frozen, get_all, module = "mcda_py")]
pub struct Separation {
    between_trace: f64,
    within_trace: f64,
    within_ratio: f64,
    min_pair_distance: f64,
}

/// A fitted linear map `p x k` plus what the method reported.
#[pyclass(frozen, module = "mcda_py")]
pub struct Fit {
    method: Method,
    matrix: DMatrix<f64>,
    #[pyo3(get)]
    gamma: Option<f64>,
    #[pyo3(get)]
    mu: Option<f64>,
    solver: Option<mcda::SolverReport>,
}

#[pymethods]
impl Fit {
    #[getter]
    fn method(&self) -> &'static str {
        self.method.name()
    }

    #[getter]
    fn k(&self) -> usize {
        self.matrix.ncols()
    }

    /// The map as `p x k` rows.
    fn matrix(&self) -> Vec<Vec<f64>> {
        to_rows(&self.matrix)
    }

    #[getter]
    fn solver(&self) -> Option<SolverReport> {
        self.solver.clone().map(Into::into)
    }

    /// Projects `n x p` rows to `n x k` rows.
    fn transform(&self, features: Vec<Vec<f64>>) -> PyResult<Vec<Vec<f64>>> {
        let x = from_rows(&features)?;
        if x.ncols() != self.matrix.nrows() {
            return Err(DataError::new_err(format!(
                "features have {} columns, map expects {}",
                x.ncols(),
                self.matrix.nrows()
            )));
        }
        Ok(to_rows(&(x * &self.matrix)))
    }

    fn separation(&self, dataset: &Dataset) -> PyResult<Separation> {
        if dataset.inner.dim() != self.matrix.nrows() {
            return Err(DataError::new_err("dataset dimension does not match the map"));
        }
        let (stats, s) = analyze(&dataset.inner);
        let sep = projected_separation(&self.matrix, &stats, &s);
        Ok(Separation {
            between_trace: sep.between_trace,
            within_trace: sep.within_trace,
            within_ratio: sep.within_ratio,
            min_pair_distance: sep.min_pair_distance,
        })
    }

    fn __repr__(&self) -> String {
        format!("Fit(method='{}', p={}, k={})", self.method, self.matrix.nrows(), self.matrix.ncols())
    }
}

/// Fits one method. `gamma`/`mu` accept a number, `"auto"`, `"tune"` or a
/// list of grid values to tune over.
#[pyfunction]
#[pyo3(signature = (dataset, method = "mcda", k = None, gamma = None, mu = None, knn = 3, seed = 0))]
fn fit(
    dataset: &Dataset,
    method: &str,
    k: Option<usize>,
    gamma: Option<&Bound<'_, PyAny>>,
    mu: Option<&Bound<'_, PyAny>>,
    knn: usize,
    seed: u64,
) -> PyResult<Fit> {
    let config = method_config(method, gamma, mu, seed)?;
    let k = k.unwrap_or_else(|| default_k(&dataset.inner));
    let fitted = fit_tuned(&dataset.inner, k, &config, knn).or_py()?;
    Ok(Fit {
        method: config.method,
        matrix: fitted.map.into_matrix(),
        gamma: fitted.gamma,
        mu: fitted.mu,
        solver: fitted.solver,
    })
}

#[pyclass(frozen, module = "mcda_py")]
pub struct EvalReport {
    inner: CoreEvalReport,
}

#[pymethods]
impl EvalReport {
    #[getter]
    fn method(&self) -> &str {
        &self.inner.method
    }

    #[getter]
    fn mean_accuracy(&self) -> Option<f64> {
        self.inner.mean_accuracy()
    }

    #[getter]
    fn mean_macro_f1(&self) -> Option<f64> {
        self.inner.mean.as_ref().map(|m| m.macro_f1)
    }

    #[getter]
    fn mean_micro_f1(&self) -> Option<f64> {
        self.inner.mean.as_ref().map(|m| m.micro_f1)
    }

    #[getter]
    fn fold_accuracies(&self) -> Vec<f64> {
        self.inner.folds.iter().map(|f| f.metrics.accuracy).collect()
    }

    #[getter]
    fn infeasible(&self) -> Option<String> {
        self.inner.infeasible.clone()
    }

    /// The full report in the same JSON form the CLI writes.
    fn to_json(&self) -> PyResult<String> {
        report_to_string(&self.inner).or_py()
    }

    fn __repr__(&self) -> String {
        match self.inner.mean_accuracy() {
            Some(a) => format!("EvalReport(method='{}', accuracy={a:.4})", self.inner.method),
            None => format!("EvalReport(method='{}', infeasible)", self.inner.method),
        }
    }
}

/// Cross-validated KNN evaluation; parameters are tuned on training folds
/// only.
#[pyfunction]
#[pyo3(signature = (dataset, method = "mcda", k = None, gamma = None, mu = None, folds = 5, knn = 3, seed = 0))]
#[allow(clippy::too_many_arguments)]
fn evaluate(
    dataset: &Dataset,
    method: &str,
    k: Option<usize>,
    gamma: Option<&Bound<'_, PyAny>>,
    mu: Option<&Bound<'_, PyAny>>,
    folds: usize,
    knn: usize,
    seed: u64,
) -> PyResult<EvalReport> {
    let config = method_config(method, gamma, mu, seed)?;
    let k = k.unwrap_or_else(|| default_k(&dataset.inner));
    let plan = split_folds(&dataset.inner, folds, seed).or_py()?;
    let report = evaluate_method(&dataset.inner, &config, k, &plan, knn).or_py()?;
    Ok(EvalReport { inner: report })
}

/// Method names accepted by `fit` and `evaluate`.
#[pyfunction]
fn methods() -> Vec<&'static str> {
    Method::ALL.iter().map(Method::name).collect()
}

#[pymodule]
fn mcda_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add_class::<Dataset>()?;
    m.add_class::<Scatter>()?;
    m.add_class::<SolverReport>()?;
    m.add_class::<Separation>()?;
    m.add_class::<Fit>()?;
    m.add_class::<EvalReport>()?;
    m.add_function(wrap_pyfunction!(scatter, m)?)?;
    m.add_function(wrap_pyfunction!(default_gamma, m)?)?;
    m.add_function(wrap_pyfunction!(fit, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(methods, m)?)?;
    m.add("McdaError", py.get_type::<McdaError>())?;
    m.add("ConfigError", py.get_type::<ConfigError>())?;
    m.add("DataError", py.get_type::<DataError>())?;
    m.add("InfeasibleError", py.get_type::<InfeasibleError>())?;
    m.add("NumericalError", py.get_type::<NumericalError>())?;
    Ok(())
}
