use pyo3::prelude::*;
use pyo3::types::{PyDict, PyModule};

fn with_module<F: FnOnce(&Bound<'_, PyModule>) -> PyResult<()>>(f: F) {
    Python::attach(|py| {
        let m = PyModule::new(py, "pygravdec")?;
        pygravdec::pygravdec(&m)?;
        f(&m)
    })
    .unwrap();
}

#[test]
fn scalar_functions() {
    with_module(|m| {
        let f0: f64 = m.getattr("cutoff_f")?.call1((0.0,))?.extract()?;
        assert!((f0 - 1.0 / 6.0).abs() < 1e-15);
        let k: f64 = m
            .getattr("contract_k")?
            .call1(((1.0, 0.0, 0.0), (0.0, 1.0, 0.0)))?
            .extract()?;
        assert_eq!(k, 3.0);
        let p: f64 = m
            .getattr("projector_component")?
            .call1((1, 1, 1, 1))?
            .extract()?;
        assert_eq!(p, 4.0);
        assert!(m.getattr("g_of_x")?.call1((-1.0,)).is_err());
        Ok(())
    });
}

#[test]
fn params_round_trip() {
    with_module(|m| {
        let py = m.py();
        let kwargs = PyDict::new(py);
        kwargs.set_item("gamma", 0.0)?;
        let p = m.getattr("DecoherenceParams")?.call(
            (1.0, 1.0, (1.0, 0.0, 0.0), (0.0, 1.0, 0.0), 10.0),
            Some(&kwargs),
        )?;
        let closed = p.call_method0("gamma_closed")?;
        let quad = p.call_method0("gamma_quadrature")?;
        let a: f64 = closed.get_item("total")?.extract()?;
        let b: f64 = quad.get_item("total")?.extract()?;
        assert!((a - b).abs() < 1e-6 * a);
        let cross: f64 = closed.get_item("cross")?.extract()?;
        assert_eq!(cross, 0.0);
        Ok(())
    });
}

#[test]
fn invalid_params_raise_value_error() {
    with_module(|m| {
        let err = m
            .getattr("DecoherenceParams")?
            .call1((-1.0, 1.0, (1.0, 0.0, 0.0), (0.0, 1.0, 0.0), 10.0))
            .unwrap_err();
        assert!(err.is_instance_of::<pyo3::exceptions::PyValueError>(m.py()));
        Ok(())
    });
}
