//! Columnar text format for feature matrices.
//!
//! ```text
//! # glyphrec-features v1
//! # kind=shadow dimension=24 samples=2
//! label,f0,f1,...,f23
//! 3,0.5,1,...
//! 17,0,0.25,...
//! ```
//!
//! Values use Rust's shortest round-trip float formatting, so reading a
//! written file reproduces every value exactly. `kind` is a feature kind
//! name or `concat` for arbitrary stacked vectors.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};

const MAGIC_LINE: &str = "# glyphrec-features v1";

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub kind: String,
    pub dimension: usize,
    pub rows: Vec<(usize, Vec<f64>)>,
}

impl FeatureMatrix {
    pub fn new(kind: impl Into<String>, dimension: usize) -> Self {
        FeatureMatrix {
            kind: kind.into(),
            dimension,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, label: usize, values: Vec<f64>) -> Result<()> {
        if values.len() != self.dimension {
            return Err(glyphrec_core::Error::DimensionMismatch {
                expected: self.dimension,
                found: values.len(),
            }
            .into());
        }
        self.rows.push((label, values));
        Ok(())
    }

    pub fn write_to(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "{MAGIC_LINE}")?;
        writeln!(
            out,
            "# kind={} dimension={} samples={}",
            self.kind,
            self.dimension,
            self.rows.len()
        )?;
        let mut wtr = csv::Writer::from_writer(out);
        let header = std::iter::once("label".to_string()).chain((0..self.dimension).map(|i| format!("f{i}")));
        wtr.write_record(header)?;
        for (label, values) in &self.rows {
            let rec = std::iter::once(label.to_string()).chain(values.iter().map(f64::to_string));
            wtr.write_record(rec)?;
        }
        wtr.flush()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.write_to(&mut out).expect("writing to memory");
        out
    }

    pub fn read_from(mut input: impl BufRead) -> Result<Self> {
        let fail = |d: &str| Error::format("feature matrix", d.to_string());
        let mut line = String::new();
        input.read_line(&mut line).map_err(|e| fail(&e.to_string()))?;
        if line.trim_end() != MAGIC_LINE {
            return Err(fail("missing format line"));
        }
        line.clear();
        input.read_line(&mut line).map_err(|e| fail(&e.to_string()))?;
        let meta = line
            .trim_end()
            .strip_prefix("# ")
            .ok_or_else(|| fail("missing metadata line"))?;
        let (mut kind, mut dimension, mut samples) = (None, None, None);
        for field in meta.split_whitespace() {
            match field.split_once('=') {
                Some(("kind", v)) => kind = Some(v.to_string()),
                Some(("dimension", v)) => dimension = v.parse::<usize>().ok(),
                Some(("samples", v)) => samples = v.parse::<usize>().ok(),
                _ => return Err(fail(&format!("unknown metadata field {field:?}"))),
            }
        }
        let (Some(kind), Some(dimension), Some(samples)) = (kind, dimension, samples) else {
            return Err(fail("metadata needs kind, dimension and samples"));
        };
        let mut m = FeatureMatrix::new(kind, dimension);
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
        let headers = rdr.headers().map_err(|e| fail(&e.to_string()))?;
        if headers.len() != dimension + 1 {
            return Err(fail("column count does not match dimension"));
        }
        for rec in rdr.records() {
            let rec = rec.map_err(|e| fail(&e.to_string()))?;
            let label = rec[0].parse().map_err(|_| fail("bad label"))?;
            let values = rec
                .iter()
                .skip(1)
                .map(|v| v.parse::<f64>().map_err(|_| fail(&format!("bad value {v:?}"))))
                .collect::<Result<Vec<_>>>()?;
            m.push(label, values)?;
        }
        if m.rows.len() != samples {
            return Err(fail("sample count does not match metadata"));
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_and_round_trip() {
        let mut m = FeatureMatrix::new("shadow", 2);
        m.push(3, vec![0.1 + 0.2, 1.0]).unwrap();
        m.push(0, vec![2.5e-3, -0.0]).unwrap();
        let bytes = m.to_bytes();
        let text = String::from_utf8(bytes.clone()).unwrap();
        assert_eq!(
            text,
            "# glyphrec-features v1\n# kind=shadow dimension=2 samples=2\nlabel,f0,f1\n\
             3,0.30000000000000004,1\n0,0.0025,-0\n"
        );
        let back = FeatureMatrix::read_from(bytes.as_slice()).unwrap();
        assert_eq!(back.kind, "shadow");
        for ((la, a), (lb, b)) in m.rows.iter().zip(&back.rows) {
            assert_eq!(la, lb);
            assert!(a.iter().zip(b).all(|(x, y)| x.to_bits() == y.to_bits()));
        }
    }

    #[test]
    fn rejects_inconsistent_files() {
        let no_magic = "kind=shadow\n";
        assert!(FeatureMatrix::read_from(no_magic.as_bytes()).is_err());
        let short = "# glyphrec-features v1\n# kind=x dimension=2 samples=1\nlabel,f0,f1\n1,0.5\n";
        assert!(FeatureMatrix::read_from(short.as_bytes()).is_err());
        let count = "# glyphrec-features v1\n# kind=x dimension=1 samples=2\nlabel,f0\n1,0.5\n";
        assert!(FeatureMatrix::read_from(count.as_bytes()).is_err());
    }
}
