use pyo3::prelude::*;
use pyo3::types::PyDict;

fn run(code: &str) {
    Python::initialize();
    Python::attach(|py| {
        let module = pyo3::wrap_pymodule!(qshare::qshare)(py);
        let globals = PyDict::new(py);
        globals.set_item("qshare", module).unwrap();
        let code = std::ffi::CString::new(code).unwrap();
        if let Err(e) = py.run(&code, Some(&globals), None) {
            e.print(py);
            panic!("python snippet failed: {e}");
        }
    });
}

#[test]
fn prop3_through_the_bindings() {
    run(r#"
inst = qshare.Instance.named("prop3")
assert inst.quantile_share(1, "4/9") == "0/1"
assert inst.maximin()[0] == "4/9"
assert sum(int(w) for _, w in inst.distribution(1)) == 729
assert repr(inst) == "Instance(n=3, m=6)"
"#);
}

#[test]
fn errors_map_to_exception_classes() {
    run(r#"
assert issubclass(qshare.BudgetError, qshare.QshareError)
try:
    qshare.lab_search(3, 5)
    raise AssertionError("no refusal")
except qshare.BudgetError:
    pass
try:
    qshare.Instance.named("prop3").quantile_share(9, "1/2")
    raise AssertionError("agent out of range accepted")
except ValueError:
    pass
try:
    qshare.Instance.named("nope")
    raise AssertionError("unknown instance accepted")
except qshare.QshareError:
    pass
"#);
}

#[test]
fn search_results_are_plain_dicts() {
    run(r#"
r = qshare.lab_search(2, 2)
assert r["status"] == "exhausted", r
w = qshare.lab_search(3, 4, budget=36)
assert w["status"] == "counterexample" and w["zero_counts"] == ["36", "36", "36"], w
assert qshare.lemma9(4, 2)["holds"] is True
assert "prop3" in qshare.REPRO_TARGETS
"#);
}
