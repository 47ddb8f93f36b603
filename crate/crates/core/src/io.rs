//! JSON and CSV helpers shared by the command-line front end and reports.

use serde::de::DeserializeOwned;

use crate::error::{Error, Result};

/// Parses JSON, reporting the line and column of the first error.
pub fn parse_json<T: DeserializeOwned>(text: &str, what: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| {
        Error::Parse(format!("{what}: {e} (line {}, column {})", e.line(), e.column()))
    })
}

/// Fixed-format number for CSV output: 17 significant digits, `inf` for
/// infinity. NaN is a hard error upstream and never reaches here.
pub fn fmt_num(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

pub fn parse_num(s: &str) -> Result<f64> {
    let t = s.trim();
    match t {
        "inf" | "+inf" | "infinity" => Ok(f64::INFINITY),
        "-inf" | "-infinity" => Ok(f64::NEG_INFINITY),
        _ => {
            let v: f64 = t.parse().map_err(|_| Error::Parse(format!("not a number: `{t}`")))?;
            if v.is_nan() {
                return Err(Error::NotANumber("csv field"));
            }
            Ok(v)
        }
    }
}

/// CSV text from a header and rows of numbers.
pub fn csv_table(header: &[&str], rows: &[Vec<f64>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|&x| fmt_num(x)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Rows of numbers from CSV text with the given number of columns; a
/// non-numeric first line is taken as a header and skipped.
pub fn read_points(text: &str, dim: usize) -> Result<Vec<Vec<f64>>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if i == 0 && fields.iter().any(|f| matches!(parse_num(f), Err(Error::Parse(_)))) {
            continue;
        }
        if fields.len() != dim {
            return Err(Error::Parse(format!("line {}: expected {dim} columns, got {}", i + 1, fields.len())));
        }
        let row = fields.iter().map(|f| parse_num(f)).collect::<Result<Vec<f64>>>()?;
        out.push(row);
    }
    Ok(out)
}

/// Serde adapter for reals that may be `∞`, written as a JSON number or as
/// the string `"inf"`.
pub mod extended {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_infinite() {
            s.serialize_str(if *x > 0.0 { "inf" } else { "-inf" })
        } else {
            s.serialize_f64(*x)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(x),
            Repr::Text(t) => super::parse_num(&t).map_err(de::Error::custom),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde::{Deserialize, Serialize};

    #[derive(Debug, Serialize, Deserialize, PartialEq)]
    struct Q {
        #[serde(with = "extended")]
        q: f64,
    }

    #[test]
    fn extended_round_trip() {
        let q: Q = parse_json(r#"{"q": "inf"}"#, "q").unwrap();
        assert_eq!(q.q, f64::INFINITY);
        assert_eq!(serde_json::to_string(&q).unwrap(), r#"{"q":"inf"}"#);
        let q: Q = parse_json(r#"{"q": 2.5}"#, "q").unwrap();
        assert_eq!(q.q, 2.5);
    }

    #[test]
    fn json_errors_carry_position() {
        let err = parse_json::<Q>("{\n  \"q\": ,\n}", "params").unwrap_err().to_string();
        assert!(err.contains("line 2"), "{err}");
    }

    #[test]
    fn points_with_header() {
        let pts = read_points("x,y\n1,2\n3.5,-1\n", 2).unwrap();
        assert_eq!(pts, vec![vec![1.0, 2.0], vec![3.5, -1.0]]);
        assert!(read_points("1,2,3\n", 2).is_err());
        assert!(read_points("1,NaN\n", 2).is_err());
    }
}
