//! Interchange formats: domain lists, `vertex_id,value` field tables, trace
//! tables and content hashes.
//!
//! Floats are written with 17 significant digits so every file round-trips
//! bit-exactly.

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::graph::{DomainDecomposition, VertexField, WeightedGraph};
use crate::solvers::TraceEntry;

/// 17 significant digits.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

/// A domain file is a JSON list of vertex ids.
pub fn parse_domain(g: &WeightedGraph, text: &str) -> Result<DomainDecomposition> {
    let ids: Vec<String> = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    DomainDecomposition::from_ids(g, &ids)
}

pub fn domain_to_json(g: &WeightedGraph, dom: &DomainDecomposition) -> String {
    let ids: Vec<&str> = dom.omega().iter().map(|&x| g.id(x)).collect();
    serde_json::to_string(&ids).expect("string list serializes")
}

pub fn field_to_csv(g: &WeightedGraph, u: &VertexField) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["vertex_id", "value"]).expect("in-memory write");
    for x in 0..g.len() {
        w.write_record([g.id(x), &fmt_float(u[x])]).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
}

/// Reads a `vertex_id,value` table; every vertex must appear exactly once.
pub fn parse_field_csv(g: &WeightedGraph, text: &str) -> Result<VertexField> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let headers = r.headers().map_err(csv_err)?.clone();
    if headers.len() != 2 || &headers[0] != "vertex_id" || &headers[1] != "value" {
        return Err(Error::Parse("expected header `vertex_id,value`".into()));
    }
    let mut values = vec![None; g.len()];
    for record in r.records() {
        let record = record.map_err(csv_err)?;
        let x = g
            .vertex(&record[0])
            .map_err(|_| Error::VertexMismatch(format!("unknown vertex `{}`", &record[0])))?;
        let v: f64 = record[1]
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad value `{}` for vertex `{}`", &record[1], &record[0])))?;
        if values[x].replace(v).is_some() {
            return Err(Error::VertexMismatch(format!("vertex `{}` listed twice", &record[0])));
        }
    }
    let values = values
        .into_iter()
        .enumerate()
        .map(|(x, v)| v.ok_or_else(|| Error::VertexMismatch(format!("vertex `{}` missing", g.id(x)))))
        .collect::<Result<Vec<f64>>>()?;
    let u = VertexField::new(values);
    u.validate(g)?;
    Ok(u)
}

pub fn trace_to_csv(trace: &[TraceEntry]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["iteration", "energy_before", "energy", "grad_norm"])
        .expect("in-memory write");
    for t in trace {
        w.write_record([
            t.iteration.to_string(),
            fmt_float(t.energy_before),
            fmt_float(t.energy),
            fmt_float(t.grad_norm),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
}

pub fn parse_trace_csv(text: &str) -> Result<Vec<TraceEntry>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    r.records()
        .map(|rec| {
            let rec = rec.map_err(csv_err)?;
            let f = |i: usize| -> Result<f64> {
                rec[i].parse().map_err(|_| Error::Parse(format!("bad number `{}`", &rec[i])))
            };
            Ok(TraceEntry {
                iteration: rec[0].parse().map_err(|_| Error::Parse(format!("bad iteration `{}`", &rec[0])))?,
                energy_before: f(1)?,
                energy: f(2)?,
                grad_norm: f(3)?,
            })
        })
        .collect()
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Hash of the canonical graph JSON.
pub fn graph_hash(g: &WeightedGraph) -> String {
    sha256_hex(g.to_spec().to_json().as_bytes())
}

pub fn domain_hash(g: &WeightedGraph, dom: &DomainDecomposition) -> String {
    sha256_hex(domain_to_json(g, dom).as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::generate::{generate, Family, MeasureRule, WeightRule};

    fn path(n: usize) -> WeightedGraph {
        generate(&Family::Path(n), MeasureRule::Unit, &WeightRule::Unit).unwrap()
    }

    #[test]
    fn field_round_trip_is_bit_exact() {
        let g = path(4);
        let u = VertexField::new(vec![0.1, -1.0 / 3.0, 1e-300, 2.0f64.sqrt()]);
        let back = parse_field_csv(&g, &field_to_csv(&g, &u)).unwrap();
        for x in 0..4 {
            assert_eq!(u[x].to_bits(), back[x].to_bits());
        }
    }

    #[test]
    fn field_mismatches() {
        let g = path(2);
        let missing = "vertex_id,value\na,1\n";
        assert!(matches!(parse_field_csv(&g, missing), Err(Error::VertexMismatch(_))));
        let twice = "vertex_id,value\na,1\na,2\nb,0\n";
        assert!(matches!(parse_field_csv(&g, twice), Err(Error::VertexMismatch(_))));
        let unknown = "vertex_id,value\na,1\nb,0\nz,0\n";
        assert!(matches!(parse_field_csv(&g, unknown), Err(Error::VertexMismatch(_))));
        assert!(matches!(parse_field_csv(&g, "id,v\na,1\n"), Err(Error::Parse(_))));
    }

    #[test]
    fn domain_round_trip() {
        let g = path(5);
        let dom = parse_domain(&g, r#"["b","c","d"]"#).unwrap();
        assert_eq!(dom.interior(), [2]);
        let again = parse_domain(&g, &domain_to_json(&g, &dom)).unwrap();
        assert_eq!(again, dom);
        assert_eq!(domain_hash(&g, &dom), domain_hash(&g, &again));
    }

    #[test]
    fn trace_round_trip() {
        let trace = vec![TraceEntry {
            iteration: 3,
            energy_before: 1.5,
            energy: 1.25,
            grad_norm: 1e-3,
        }];
        assert_eq!(parse_trace_csv(&trace_to_csv(&trace)).unwrap(), trace);
    }
}
