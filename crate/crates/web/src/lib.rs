//! Browser bindings. Every function takes text input and returns a JSON string;
//! failures come back as `{"error": "..."}` so the page has one code path.

use quinrep::{BinaryForm, GramLattice, Oracle};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Largest bound accepted by [`exceptions`]; keeps the page responsive.
pub const MAX_BOUND: i64 = 60;

fn respond(r: Result<Value, String>) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e }).to_string(),
    }
}

fn form(s: &str) -> Result<BinaryForm, String> {
    s.parse().map_err(|e: quinrep::Error| e.to_string())
}

fn lattice(s: &str) -> Result<GramLattice, String> {
    let s = s.trim();
    let l = if s.starts_with('[') || s.starts_with('{') { GramLattice::from_json(s) } else { s.parse() };
    l.map_err(|e| e.to_string())
}

/// Reduced form and the change of basis reaching it.
#[wasm_bindgen]
pub fn reduce(form_spec: &str) -> String {
    respond((|| {
        let f = form(form_spec)?;
        let (r, t) = f.minkowski_reduce().map_err(|e| e.to_string())?;
        Ok(json!({ "form": f, "reduced": r, "text": r.to_string(), "transform": t }))
    })())
}

/// Certificate or exhaustion record for `form_spec` in `lattice_spec`.
#[wasm_bindgen]
pub fn represent(lattice_spec: &str, form_spec: &str) -> String {
    respond((|| {
        let l = lattice(lattice_spec)?;
        let f = form(form_spec)?;
        let r = Oracle::new(l.clone()).and_then(|o| o.represents(&f)).map_err(|e| e.to_string())?;
        Ok(json!({ "lattice": l.to_string(), "form": f.to_string(), "result": r }))
    })())
}

/// Reduced forms with `c <= bound` missed by the lattice.
#[wasm_bindgen]
pub fn exceptions(lattice_spec: &str, bound: i32) -> String {
    respond((|| {
        let bound = i64::from(bound);
        if !(1..=MAX_BOUND).contains(&bound) {
            return Err(format!("bound must be between 1 and {MAX_BOUND}"));
        }
        let l = lattice(lattice_spec)?;
        let forms = Oracle::new(l.clone()).and_then(|o| o.exceptions_up_to(bound)).map_err(|e| e.to_string())?;
        let text: Vec<String> = forms.iter().map(|f| f.to_string()).collect();
        Ok(json!({ "lattice": l.to_string(), "bound": bound, "exceptions": text }))
    })())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: String) -> Value {
        serde_json::from_str(&s).unwrap()
    }

    #[test]
    fn reduce_json() {
        assert_eq!(parse(reduce("10,5,3"))["text"], "[2,1,3]");
        assert!(parse(reduce("[1,5,1]"))["error"].is_string());
    }

    #[test]
    fn represent_json() {
        let v = parse(represent("1,1,1,3,7", "[2,1,3]"));
        assert_eq!(v["result"]["outcome"], "not-represented");
        let v = parse(represent("[[1,0],[0,1]]", "<1,1>"));
        assert_eq!(v["result"]["outcome"], "represented");
    }

    #[test]
    fn exceptions_json() {
        let v = parse(exceptions("1,1,2,3,5", 10));
        assert_eq!(v["exceptions"], json!(["[2,1,2]", "[5,2,5]", "[6,3,6]"]));
        assert!(parse(exceptions("1,1,2,3,5", 1000))["error"].is_string());
    }
}
