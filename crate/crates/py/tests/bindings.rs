use pyo3::prelude::*;
use pyo3::types::PyDict;

fn with_module<F: for<'py> FnOnce(Python<'py>, &Bound<'py, PyDict>)>(f: F) {
    Python::attach(|py| {
        let m = PyModule::new(py, "cellwait").unwrap();
        cellwait_py::register(&m).unwrap();
        let globals = PyDict::new(py);
        globals.set_item("cw", m).unwrap();
        f(py, &globals);
    });
}

fn eval(py: Python<'_>, globals: &Bound<'_, PyDict>, code: &str) -> f64 {
    let code = std::ffi::CString::new(code).unwrap();
    py.eval(&code, Some(globals), None).unwrap().extract().unwrap()
}

#[test]
fn closed_form_through_python() {
    with_module(|py, g| {
        let code = "cw.coverage(cw.NetworkConfig.reference().noiseless(), cw.AccessScenario(10.0, 10.0), 1.0)";
        let via_py = eval(py, g, code);
        let cfg = cellwait::NetworkConfig::reference().noiseless();
        let scen = cellwait::AccessScenario::new(10.0, 10.0).unwrap();
        let direct = cellwait::analytic::coverage_closed_form(&cfg, &scen, 1.0).unwrap().value;
        assert_eq!(via_py, direct);
    });
}

#[test]
fn probabilities_sum_to_one() {
    with_module(|py, g| {
        let s = eval(
            py,
            g,
            "sum(cw.access_probabilities(cw.NetworkConfig.reference(), cw.AccessScenario(10.0, 10.0)).values())",
        );
        assert!((s - 1.0).abs() < 1e-15);
    });
}

#[test]
fn invalid_input_raises_value_error() {
    with_module(|py, g| {
        let code = std::ffi::CString::new("cw.NetworkConfig(0.005, 0.5, 0.5, 0.5, 0.1, 0.1)").unwrap();
        let err = py.eval(&code, Some(g), None).unwrap_err();
        assert!(err.is_instance_of::<pyo3::exceptions::PyValueError>(py));
        assert!(err.to_string().contains("sum to 1"));
    });
}
