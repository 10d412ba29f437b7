//! Python bindings. Rationals cross the boundary as `fractions.Fraction`;
//! inputs may be `Fraction`, `int` or `"p/q"` strings, never `float`.

use ergocap::birkhoff::{asymptotic_independence_choquet, birkhoff_limit, component_means, verify_multivalue_lln};
use ergocap::cli::verify::verify_sweep;
use ergocap::fec::{
    decompose_invariant, ergodic_core_measures, fec_decompose, full_decomposition, is_fz_ergodic, zero_one_condition,
    zero_one_witness, FecResult,
};
use ergocap::koopman::eigenvalue_one_multiplicity;
use ergocap::measure::cesaro_limit as structural_cesaro;
use ergocap::noninvariant::{irreducible_partition, noninvariant_independence, noninvariant_lln, verify_construction};
use ergocap::rational::{format_rational, parse_rational};
use ergocap::{Error, FunctionOnSpace, Prob, Rational, SubsetMask, Transformation, UpperProb};
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyTypeError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyFloat, PyList};

create_exception!(pyergocap, ErgocapError, PyException, "Invalid input or unmet precondition.");
create_exception!(pyergocap, NotFecError, ErgocapError, "The capacity does not have finite ergodic components.");

fn error(e: Error) -> PyErr {
    match e {
        Error::NotFec { .. } => NotFecError::new_err(e.to_string()),
        _ => ErgocapError::new_err(e.to_string()),
    }
}

fn to_rational(value: &Bound<'_, PyAny>) -> PyResult<Rational> {
    if value.is_instance_of::<PyFloat>() {
        return Err(PyTypeError::new_err(format!("float {value} is not exact; use Fraction or \"p/q\"")));
    }
    parse_rational(&value.str()?.to_cow()?).map_err(ErgocapError::new_err)
}

fn to_rationals(values: &Bound<'_, PyAny>) -> PyResult<Vec<Rational>> {
    values.iter()?.map(|v| to_rational(&v?)).collect()
}

fn fraction(py: Python<'_>, value: &Rational) -> PyResult<PyObject> {
    let class = py.import_bound("fractions")?.getattr("Fraction")?;
    Ok(class.call1((format_rational(value),))?.unbind())
}

fn fractions(py: Python<'_>, values: &[Rational]) -> PyResult<PyObject> {
    let items = values.iter().map(|v| fraction(py, v)).collect::<PyResult<Vec<_>>>()?;
    Ok(PyList::new_bound(py, items).into_any().unbind())
}

fn prob(values: &Bound<'_, PyAny>) -> PyResult<Prob> {
    Prob::new(to_rationals(values)?).map_err(error)
}

fn function(values: &Bound<'_, PyAny>) -> PyResult<FunctionOnSpace> {
    FunctionOnSpace::new(to_rationals(values)?).map_err(error)
}

fn subset(width: usize, points: Vec<usize>) -> PyResult<SubsetMask> {
    SubsetMask::from_points(width, points).map_err(error)
}

fn points(set: SubsetMask) -> Vec<usize> {
    set.points().collect()
}

fn fec_dict<'py>(py: Python<'py>, fec: &FecResult) -> PyResult<Bound<'py, PyDict>> {
    let dict = PyDict::new_bound(py);
    dict.set_item("cells", fec.cells().iter().map(|c| points(*c)).collect::<Vec<_>>())?;
    let measures = fec.ergodic_measures().iter().map(|q| fractions(py, q.mass())).collect::<PyResult<Vec<_>>>()?;
    dict.set_item("ergodic_measures", measures)?;
    Ok(dict)
}

/// An upper probability given as the envelope of finitely many probabilities.
#[pyclass(module = "pyergocap", frozen)]
struct UpperProbability {
    inner: UpperProb,
}

#[pymethods]
impl UpperProbability {
    #[new]
    fn new(generators: Vec<Bound<'_, PyAny>>) -> PyResult<Self> {
        let generators = generators.iter().map(prob).collect::<PyResult<Vec<_>>>()?;
        Ok(Self { inner: UpperProb::envelope(generators).map_err(error)? })
    }

    /// `V(A)` for a set given as a list of points.
    fn value(&self, py: Python<'_>, set: Vec<usize>) -> PyResult<PyObject> {
        fraction(py, self.inner.value(subset(self.inner.width(), set)?))
    }

    fn choquet_integral(&self, py: Python<'_>, f: &Bound<'_, PyAny>) -> PyResult<PyObject> {
        fraction(py, &self.inner.choquet_integral(&function(f)?))
    }

    fn core_contains(&self, p: &Bound<'_, PyAny>) -> PyResult<bool> {
        Ok(self.inner.core_contains(&prob(p)?))
    }

    fn core_vertices(&self, py: Python<'_>) -> PyResult<Vec<PyObject>> {
        self.inner.core_vertices().iter().map(|p| fractions(py, p.mass())).collect()
    }

    fn __repr__(&self) -> String {
        format!("UpperProbability(width={}, generators={})", self.inner.width(), self.inner.generators().len())
    }
}

/// A map on `{0, …, m−1}` with an upper probability.
#[pyclass(module = "pyergocap", frozen)]
struct System {
    map: Transformation,
    capacity: UpperProb,
}

impl System {
    fn fec_result(&self) -> PyResult<FecResult> {
        fec_decompose(&self.capacity, &self.map).map_err(error)
    }
}

#[pymethods]
impl System {
    #[new]
    fn new(map: Vec<usize>, generators: Vec<Bound<'_, PyAny>>) -> PyResult<Self> {
        let map = Transformation::new(map).map_err(error)?;
        let generators = generators.iter().map(prob).collect::<PyResult<Vec<_>>>()?;
        let capacity = UpperProb::envelope(generators).map_err(error)?;
        if capacity.width() != map.size() {
            return Err(ErgocapError::new_err("generators and map have different sizes"));
        }
        Ok(Self { map, capacity })
    }

    #[getter]
    fn capacity(&self) -> UpperProbability {
        UpperProbability { inner: self.capacity.clone() }
    }

    fn is_invariant(&self) -> bool {
        self.capacity.is_invariant_capacity(&self.map)
    }

    fn zero_one(&self) -> PyResult<bool> {
        zero_one_condition(&self.capacity, &self.map).map_err(error)
    }

    /// An invariant set with capacity strictly between 0 and 1, if any.
    fn zero_one_witness(&self) -> Option<Vec<usize>> {
        zero_one_witness(&self.capacity, &self.map).map(points)
    }

    fn is_fz_ergodic(&self) -> PyResult<bool> {
        is_fz_ergodic(&self.capacity, &self.map).map_err(error)
    }

    /// Cells and ergodic measures; raises `NotFecError` otherwise.
    fn fec<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        fec_dict(py, &self.fec_result()?)
    }

    fn koopman_multiplicity(&self) -> PyResult<usize> {
        eigenvalue_one_multiplicity(&self.capacity, &self.map).map_err(error)
    }

    fn ergodic_core_measures(&self, py: Python<'_>) -> PyResult<Vec<PyObject>> {
        ergodic_core_measures(&self.capacity, &self.map).iter().map(|q| fractions(py, q.mass())).collect()
    }

    /// Weights of an invariant core probability over the ergodic components.
    fn decompose(&self, py: Python<'_>, p: &Bound<'_, PyAny>) -> PyResult<PyObject> {
        let fec = self.fec_result()?;
        let d = decompose_invariant(&self.capacity, &self.map, &fec, &prob(p)?).map_err(error)?;
        fractions(py, &d.coefficients)
    }

    /// Split over the ergodic core measures plus a singular residual.
    /// Requires an invertible map.
    fn full_decomposition<'py>(&self, py: Python<'py>, p: &Bound<'_, PyAny>) -> PyResult<Bound<'py, PyDict>> {
        let d = full_decomposition(&self.capacity, &self.map, &prob(p)?).map_err(error)?;
        let dict = PyDict::new_bound(py);
        dict.set_item("coefficients", fractions(py, &d.coefficients)?)?;
        dict.set_item("residual_weight", fraction(py, &d.residual_weight)?)?;
        let residual = d.residual.as_ref().map(|q| fractions(py, q.mass())).transpose()?;
        dict.set_item("residual", residual)?;
        dict.set_item("residual_in_core", d.residual_in_core)?;
        Ok(dict)
    }

    fn birkhoff_limit(&self, py: Python<'_>, f: &Bound<'_, PyAny>) -> PyResult<PyObject> {
        fractions(py, birkhoff_limit(&self.map, &function(f)?).values())
    }

    fn component_means(&self, py: Python<'_>, f: &Bound<'_, PyAny>) -> PyResult<PyObject> {
        fractions(py, component_means(&self.fec_result()?, &function(f)?).values())
    }

    fn verify_lln(&self, f: &Bound<'_, PyAny>) -> PyResult<bool> {
        Ok(verify_multivalue_lln(&self.capacity, &self.map, &self.fec_result()?, &function(f)?))
    }

    /// Both sides of the Choquet independence identity for sets `b`, `c`.
    fn independence(&self, py: Python<'_>, b: Vec<usize>, c: Vec<usize>) -> PyResult<(PyObject, PyObject)> {
        let m = self.map.size();
        let check = asymptotic_independence_choquet(&self.capacity, &self.map, &self.fec_result()?, subset(m, b)?, subset(m, c)?);
        Ok((fraction(py, &check.lhs)?, fraction(py, &check.rhs)?))
    }

    fn __repr__(&self) -> String {
        format!("System(map={:?}, generators={})", self.map.table(), self.capacity.generators().len())
    }
}

/// A probability that need not be invariant, under a permutation.
#[pyclass(module = "pyergocap", frozen)]
struct NoninvariantSystem {
    inner: ergocap::noninvariant::NoninvariantSystem,
}

#[pymethods]
impl NoninvariantSystem {
    #[new]
    fn new(map: Vec<usize>, probability: &Bound<'_, PyAny>) -> PyResult<Self> {
        let map = Transformation::new(map).map_err(error)?;
        let inner = ergocap::noninvariant::NoninvariantSystem::new(prob(probability)?, map).map_err(error)?;
        Ok(Self { inner })
    }

    /// Cells, conditionals and limits of the irreducible partition.
    fn partition<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let partition = irreducible_partition(&self.inner).map_err(error)?;
        let dict = PyDict::new_bound(py);
        dict.set_item("cells", partition.cells.cells().iter().map(|c| points(*c)).collect::<Vec<_>>())?;
        let list = |probs: &[Prob]| probs.iter().map(|p| fractions(py, p.mass())).collect::<PyResult<Vec<_>>>();
        dict.set_item("conditionals", list(&partition.conditionals)?)?;
        dict.set_item("limits", list(&partition.limits)?)?;
        Ok(dict)
    }

    /// Whether the generated capacity passes every structural check.
    fn verify(&self) -> PyResult<bool> {
        Ok(verify_construction(&self.inner).map_err(error)?.all_pass())
    }

    fn lln(&self, f: &Bound<'_, PyAny>) -> PyResult<bool> {
        let partition = irreducible_partition(&self.inner).map_err(error)?;
        Ok(noninvariant_lln(&self.inner, &partition, &function(f)?))
    }

    fn independence(&self, py: Python<'_>, b: Vec<usize>, c: Vec<usize>) -> PyResult<(PyObject, PyObject)> {
        let m = self.inner.map().size();
        let partition = irreducible_partition(&self.inner).map_err(error)?;
        let check = noninvariant_independence(&self.inner, &partition, subset(m, b)?, subset(m, c)?);
        Ok((fraction(py, &check.lhs)?, fraction(py, &check.rhs)?))
    }
}

/// Choquet integral of `f` against the envelope of `generators`.
#[pyfunction]
fn choquet_integral(py: Python<'_>, generators: Vec<Bound<'_, PyAny>>, f: &Bound<'_, PyAny>) -> PyResult<PyObject> {
    UpperProbability::new(generators)?.choquet_integral(py, f)
}

/// Every invariant set of the map, as sorted point lists.
#[pyfunction]
fn invariant_sets(map: Vec<usize>) -> PyResult<Vec<Vec<usize>>> {
    let map = Transformation::new(map).map_err(error)?;
    let mut sets: Vec<Vec<usize>> = map.invariant_sets().into_iter().map(points).collect();
    sets.sort();
    Ok(sets)
}

/// Limit of the Cesàro averages of the pushforwards of `p`.
#[pyfunction]
fn cesaro_limit(py: Python<'_>, map: Vec<usize>, p: &Bound<'_, PyAny>) -> PyResult<PyObject> {
    let map = Transformation::new(map).map_err(error)?;
    fractions(py, structural_cesaro(&prob(p)?, &map).mass())
}

/// Seeded random sweep of every check against the brute-force oracle.
/// Returns `{check: (passed, total)}`.
#[pyfunction]
#[pyo3(signature = (seed = 42, instances = 50))]
fn oracle_verify<'py>(py: Python<'py>, seed: u64, instances: usize) -> PyResult<Bound<'py, PyDict>> {
    let tally = py.allow_threads(|| verify_sweep(seed, instances));
    let dict = PyDict::new_bound(py);
    for (check, counts) in tally.counts() {
        dict.set_item(*check, *counts)?;
    }
    Ok(dict)
}

#[pymodule]
fn pyergocap(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("ErgocapError", m.py().get_type_bound::<ErgocapError>())?;
    m.add("NotFecError", m.py().get_type_bound::<NotFecError>())?;
    m.add_class::<UpperProbability>()?;
    m.add_class::<System>()?;
    m.add_class::<NoninvariantSystem>()?;
    m.add_function(wrap_pyfunction!(choquet_integral, m)?)?;
    m.add_function(wrap_pyfunction!(invariant_sets, m)?)?;
    m.add_function(wrap_pyfunction!(cesaro_limit, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_verify, m)?)?;
    Ok(())
}
