use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Rows of integer states, one column per vertex label.
///
/// Rows may carry weights; sampled and CSV data have unit weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    columns: Vec<String>,
    data: Vec<usize>,
    weights: Option<Vec<f64>>,
}

impl Dataset {
    pub fn from_parts(columns: Vec<String>, data: Vec<usize>) -> Result<Dataset> {
        if columns.is_empty() || data.len() % columns.len() != 0 {
            return Err(Error::Precondition("data length is not a multiple of the column count".into()));
        }
        Ok(Dataset { columns, data, weights: None })
    }

    /// Dataset whose rows count with the given non-negative weights.
    pub fn weighted(columns: Vec<String>, data: Vec<usize>, weights: Vec<f64>) -> Result<Dataset> {
        let mut d = Self::from_parts(columns, data)?;
        if weights.len() != d.n() || weights.iter().any(|&w| !(w >= 0.0)) {
            return Err(Error::Precondition("need one non-negative weight per row".into()));
        }
        d.weights = Some(weights);
        Ok(d)
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn n(&self) -> usize {
        self.data.len() / self.columns.len()
    }

    pub fn row(&self, i: usize) -> &[usize] {
        let k = self.columns.len();
        &self.data[i * k..(i + 1) * k]
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights.as_ref().map_or(1.0, |w| w[i])
    }

    pub fn column(&self, label: &str) -> Result<usize> {
        self.columns
            .iter()
            .position(|c| c == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    /// Largest observed state plus one, per column.
    pub fn observed_cards(&self) -> Vec<usize> {
        let k = self.columns.len();
        let mut out = vec![1; k];
        for i in 0..self.n() {
            for (j, &s) in self.row(i).iter().enumerate() {
                out[j] = out[j].max(s + 1);
            }
        }
        out
    }

    /// Reads a CSV file whose header row holds the labels.
    pub fn read_csv<R: Read>(reader: R) -> Result<Dataset> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let columns: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
        let mut data = Vec::new();
        for (k, rec) in rdr.records().enumerate() {
            let rec = rec?;
            for field in rec.iter() {
                let s = field.parse::<usize>().map_err(|_| Error::Parse {
                    line: k + 2,
                    msg: format!("`{field}` is not a state index"),
                })?;
                data.push(s);
            }
        }
        Self::from_parts(columns, data)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(&self.columns)?;
        for i in 0..self.n() {
            w.write_record(self.row(i).iter().map(|s| s.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Dataset> {
        Self::read_csv(std::fs::File::open(path)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let d = Dataset::from_parts(vec!["A".into(), "Y".into()], vec![0, 1, 1, 1, 2, 0]).unwrap();
        let mut buf = Vec::new();
        d.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "A,Y\n0,1\n1,1\n2,0\n");
        assert_eq!(Dataset::read_csv(&buf[..]).unwrap(), d);
        assert_eq!(d.observed_cards(), vec![3, 2]);
    }

    #[test]
    fn bad_field() {
        let e = Dataset::read_csv("A,Y\n0,1\n0,x\n".as_bytes()).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }), "{e:?}");
    }
}
