//! Browser bindings. Every export takes plain arguments and returns a JSON
//! string; failures come back as `{"error": "..."}`.

use nimseq::optimize::BoundReport;
use nimseq::wythoff::{analyze_rows, grundy_table};
use nimseq::{detect, verify_certificate, DetectMethod, DifferenceBounds, ProblemInstance};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Largest Wythoff table the page asks for.
const MAX_ROWS: usize = 8;
const MAX_COLS: usize = 64;

fn error(msg: impl std::fmt::Display) -> String {
    json!({ "error": msg.to_string() }).to_string()
}

/// Values `G_y(x)` for `y < rows`, `x < cols` and the certified period table.
#[wasm_bindgen]
pub fn wythoff(rows: usize, cols: usize) -> String {
    let rows = rows.clamp(1, MAX_ROWS);
    let cols = cols.clamp(1, MAX_COLS);
    let table = grundy_table(rows, cols);
    let periods: Result<Vec<Value>, _> = analyze_rows(rows - 1, None).map(|rs| {
        rs.iter()
            .map(|r| {
                json!({
                    "y": r.row_y,
                    "preperiod": r.certificate.preperiod,
                    "period": r.certificate.period,
                    "diff_period": r.certificate.diff_period,
                })
            })
            .collect()
    });
    match periods {
        Ok(p) => json!({ "values": table, "periods": p }).to_string(),
        Err(e) => error(e),
    }
}

/// Certificate and first terms for an instance given as JSON.
#[wasm_bindgen]
pub fn detect_instance(instance_json: &str, method: &str, budget: usize) -> String {
    let inst: ProblemInstance = match serde_json::from_str(instance_json) {
        Ok(i) => i,
        Err(e) => return error(format!("invalid instance: {e}")),
    };
    if let Err(e) = nimseq::instance::validate_instance(&inst) {
        return error(e);
    }
    let method: DetectMethod = match method.parse() {
        Ok(m) => m,
        Err(e) => return error(e),
    };
    let budget = (budget > 0).then_some(budget);
    let cert = match detect(&inst, method, budget) {
        Ok(c) => c,
        Err(e) => return error(e),
    };
    let verified = verify_certificate(&inst, &cert)
        .map(|v| v.valid)
        .unwrap_or(false);
    let len = (cert.preperiod + 2 * cert.period).clamp(20, 200);
    let values = nimseq::generate(&inst, len).unwrap_or_default();
    let bounds = inst.bounds();
    json!({
        "certificate": cert,
        "verified": verified,
        "values": values,
        "mu": bounds.mu,
        "nu": bounds.nu,
    })
    .to_string()
}

/// All period and preperiod constants for `μ`, `ν`, `p` and `K̂`.
#[wasm_bindgen]
pub fn bound_report(mu: i32, nu: i32, p: usize, k_hat: u32) -> String {
    if p == 0 {
        return error("p must be positive");
    }
    let report = BoundReport::new(
        &DifferenceBounds::new(mu.into(), nu.into()),
        p,
        k_hat.into(),
    );
    serde_json::to_string(&report).unwrap_or_else(error)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Value {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn wythoff_rows() {
        let v = parse(&wythoff(4, 6));
        assert_eq!(v["values"][1], json!([1, 2, 0, 4, 5, 3]));
        assert_eq!(v["periods"][3]["preperiod"], 8);
        assert_eq!(v["periods"][3]["diff_period"], json!([2, 3, -2, -4, 3, -2]));
    }

    #[test]
    fn detect_simple() {
        let v = parse(&detect_instance(
            r#"{"p":1,"diff_sets":[[0,1]],"seed":[]}"#,
            "cuts",
            0,
        ));
        assert_eq!(v["certificate"]["diff_period"], json!([2, -1, -1]));
        assert_eq!(v["verified"], true);
        let w = parse(&detect_instance(
            r#"{"p":1,"diff_sets":[[0,1]],"seed":[]}"#,
            "window",
            0,
        ));
        assert_eq!(w["certificate"], v["certificate"]);
    }

    #[test]
    fn errors_are_json() {
        let v = parse(&detect_instance("{", "cuts", 0));
        assert!(v["error"].as_str().unwrap().contains("line 1"));
        let v = parse(&detect_instance(
            r#"{"p":1,"diff_sets":[[0,1]],"seed":[]}"#,
            "bogus",
            0,
        ));
        assert!(v.get("error").is_some());
        assert!(parse(&bound_report(-2, 2, 0, 0)).get("error").is_some());
    }

    #[test]
    fn bounds() {
        let v = parse(&bound_report(-3, 3, 1, 0));
        assert_eq!(v["k_paper"], 6);
        assert_eq!(v["binomial_bound"], 20);
    }
}
