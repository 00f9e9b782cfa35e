use std::io::{self, Write};
use std::path::Path;

use lattice_ortho::BigComplex;
use serde_json::{json, Value};

pub fn complex(v: &BigComplex) -> Value {
    let (re, im) = v.to_decimal_strings();
    json!({ "re": re, "im": im })
}

/// Non-finite values become the strings `"inf"`, `"-inf"` or `"nan"`.
pub fn real(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x.is_nan() {
        json!("nan")
    } else if x > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

pub fn error_object(kind: &str, message: &str) -> Value {
    json!({ "error": { "kind": kind, "message": message } })
}

pub fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values always serialize");
    s.push('\n');
    s
}

/// CSV text from a header and rows.
pub fn csv_text(header: &[&str], rows: &[Vec<String>]) -> io::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv of utf-8 fields is utf-8"))
}

/// Writes `body` to `out` through a temporary file in the same directory,
/// or to standard output.
pub fn emit(out: Option<&Path>, body: &str) -> io::Result<()> {
    match out {
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(body.as_bytes())?;
            stdout.flush()
        }
        Some(path) => {
            let dir = match path.parent() {
                Some(p) if !p.as_os_str().is_empty() => p,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
            tmp.write_all(body.as_bytes())?;
            tmp.as_file().sync_all()?;
            tmp.persist(path).map_err(|e| e.error)?;
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_quotes_fields() {
        let t = csv_text(&["a", "b"], &[vec!["1".into(), "x,y".into()]]).unwrap();
        assert_eq!(t, "a,b\n1,\"x,y\"\n");
    }

    #[test]
    fn non_finite_reals() {
        assert_eq!(real(f64::INFINITY), json!("inf"));
        assert_eq!(real(0.5), json!(0.5));
    }

    #[test]
    fn atomic_write() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.json");
        emit(Some(&path), "first").unwrap();
        emit(Some(&path), "second").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "second");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
