//! Python bindings: `import slatsim`.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use slatsim::atam::{self, TileSystem};
use slatsim::compiler::{self, Backend, CompiledSystem};
use slatsim::render::{self, RenderSpec, Target};
use slatsim::{asam, doc, fixtures, iomark, verify, Error};

fn err(e: Error) -> PyErr {
    match e {
        Error::Schema { .. } | Error::VersionUnsupported(_) | Error::OddCooperativity(_) | Error::CooperativityTooSmall(_) => {
            PyValueError::new_err(e.to_string())
        }
        e => PyRuntimeError::new_err(e.to_string()),
    }
}

fn json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("reports serialize")
}

type Placed = Vec<(i32, i32, String)>;

#[pyclass(name = "TileSystem", module = "slatsim")]
struct PyTileSystem {
    inner: TileSystem,
}

#[pymethods]
impl PyTileSystem {
    /// Parse a `v1` tile-system document.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let d = doc::parse_atam(text).map_err(err)?;
        Ok(PyTileSystem { inner: d.system.to_system().map_err(err)? })
    }

    #[staticmethod]
    fn fixture(name: &str) -> PyResult<Self> {
        Ok(PyTileSystem { inner: fixtures::load(name).map_err(err)? })
    }

    fn to_json(&self) -> String {
        doc::to_canonical(&doc::AtamDocument::new(&self.inner))
    }

    #[getter]
    fn temperature(&self) -> u32 {
        self.inner.temperature
    }

    #[getter]
    fn tile_names(&self) -> Vec<String> {
        self.inner.tiles.iter().map(|t| t.name.clone()).collect()
    }

    /// Seeded run; returns `[(x, y, tile_name)]` of the final assembly.
    #[pyo3(signature = (max_tiles=10_000, seed=0))]
    fn run(&self, max_tiles: usize, seed: u64) -> Vec<(i32, i32, String)> {
        let a = atam::run_atam(&self.inner, max_tiles, seed).final_assembly();
        a.iter().map(|(p, t)| (p.0, p.1, self.inner.tiles[t].name.clone())).collect()
    }

    /// Number of IO-marked tile types.
    fn iomark_count(&self) -> PyResult<usize> {
        Ok(iomark::io_mark(&self.inner).map_err(err)?.system.tiles.len())
    }

    #[pyo3(signature = (bound=8))]
    fn classify(&self, bound: usize) -> PyResult<String> {
        let ms = iomark::io_mark(&self.inner).map_err(err)?;
        Ok(iomark::classify(&ms, bound).class.key().to_string())
    }

    /// Compile with backend `cls` (`auto`, `zigzag`, `standard`,
    /// `standard-atg`, `directed`, `full`) at cooperativity `coop`.
    #[pyo3(signature = (cls="auto", coop=4))]
    fn compile(&self, cls: &str, coop: usize) -> PyResult<PyCompiled> {
        let backend = if cls == "auto" {
            let ms = iomark::io_mark(&self.inner).map_err(err)?;
            Backend::for_class(iomark::classify(&ms, 8).class)
        } else {
            Backend::from_key(cls).ok_or_else(|| PyValueError::new_err(format!("unknown class {cls:?}")))?
        };
        Ok(PyCompiled { inner: compiler::compile(&self.inner, backend, coop).map_err(err)? })
    }
}

#[pyclass(name = "CompiledSystem", module = "slatsim")]
struct PyCompiled {
    inner: CompiledSystem,
}

#[pymethods]
impl PyCompiled {
    #[getter]
    fn backend(&self) -> &'static str {
        self.inner.backend.key()
    }

    #[getter]
    fn cooperativity(&self) -> u32 {
        self.inner.c
    }

    #[getter]
    fn scale(&self) -> i32 {
        self.inner.scale()
    }

    #[getter]
    fn slat_count(&self) -> usize {
        self.inner.sas.slats.len()
    }

    fn to_json(&self) -> String {
        doc::to_canonical(&self.inner.to_document())
    }

    /// `(side, max slats per macrotile, max slat length)`.
    fn bounds(&self) -> PyResult<(u32, usize, u32)> {
        let r = compiler::check_resource_bounds(&self.inner).map_err(err)?;
        Ok((r.macrotile_side, r.max_slats_per_macrotile, r.max_slat_length))
    }

    /// Seeded slat run; returns `(slats, terminal, represented)` where
    /// `represented` is `[(x, y, tile_name)]`.
    #[pyo3(signature = (max_slats=5000, seed=0))]
    fn run(&self, max_slats: usize, seed: u64) -> PyResult<(usize, bool, Placed)> {
        let run = asam::run_asam(&self.inner.sas, max_slats, seed);
        let img = verify::represent_assembly(&self.inner, &run.assembly).map_err(err)?;
        let tiles = &self.inner.marked.unmarked.tiles;
        let v = img.iter().map(|(p, t)| (p.0, p.1, tiles[t].name.clone())).collect();
        Ok((run.assembly.len(), run.terminal, v))
    }

    /// JSON verification report.
    #[pyo3(signature = (bound=4, runs=20, steps=1000, seed=0))]
    fn verify(&self, bound: usize, runs: usize, steps: usize, seed: u64) -> PyResult<String> {
        Ok(json(&verify::verify_all(&self.inner, bound, runs, steps, seed).map_err(err)?))
    }

    /// SVG (or text grid with `text=True`) of a seeded run.
    #[pyo3(signature = (max_slats=2000, seed=0, text=false))]
    fn render(&self, max_slats: usize, seed: u64, text: bool) -> String {
        let run = asam::run_asam(&self.inner.sas, max_slats, seed);
        let spec = RenderSpec {
            target: if text { Target::Text } else { Target::Svg },
            macrotile_grid: Some(self.inner.scale() as u32),
            ..Default::default()
        };
        render::render_compiled(&self.inner, &run.assembly, &spec)
    }
}

#[pyfunction]
fn fixture_names() -> Vec<&'static str> {
    fixtures::NAMES.to_vec()
}

#[pymodule]
#[pyo3(name = "slatsim")]
fn py_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyTileSystem>()?;
    m.add_class::<PyCompiled>()?;
    m.add_function(wrap_pyfunction!(fixture_names, m)?)?;
    m.add("TEMPLATE_VERSION", compiler::TEMPLATE_VERSION)?;
    Ok(())
}
