//! Word embedding tables in the textual word2vec/fastText format:
//! a `count dimension` header, then `word v1 ... vd` per line.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use super::{LearnerError, Result};

#[derive(Clone, Debug, Default, PartialEq)]
pub struct EmbeddingTable {
    dimension: usize,
    index: HashMap<String, usize>,
    words: Vec<String>,
    vectors: Vec<Vec<f64>>,
}

impl EmbeddingTable {
    pub fn new(dimension: usize) -> Self {
        EmbeddingTable {
            dimension,
            ..Default::default()
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Replaces the vector of an existing word.
    pub fn insert(&mut self, word: impl Into<String>, vector: Vec<f64>) -> Result<()> {
        if vector.len() != self.dimension {
            return Err(LearnerError::DimensionMismatch {
                expected: self.dimension,
                found: vector.len(),
            });
        }
        let word = word.into();
        match self.index.get(&word) {
            Some(&i) => self.vectors[i] = vector,
            None => {
                self.index.insert(word.clone(), self.words.len());
                self.words.push(word);
                self.vectors.push(vector);
            }
        }
        Ok(())
    }

    pub fn get(&self, word: &str) -> Option<&[f64]> {
        self.index.get(word).map(|&i| self.vectors[i].as_slice())
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn read(reader: impl BufRead, source: &str) -> Result<Self> {
        let parse_err = |line: usize, reason: String| LearnerError::Parse {
            path: source.to_string(),
            line,
            reason,
        };
        let mut lines = reader.lines();
        let header = lines.next().ok_or_else(|| parse_err(1, "empty file".into()))??;
        let mut fields = header.split_whitespace();
        let (count, dimension) = match (fields.next(), fields.next(), fields.next()) {
            (Some(c), Some(d), None) => (
                c.parse::<usize>().map_err(|e| parse_err(1, e.to_string()))?,
                d.parse::<usize>().map_err(|e| parse_err(1, e.to_string()))?,
            ),
            _ => return Err(parse_err(1, "expected header `count dimension`".into())),
        };
        if dimension == 0 {
            return Err(parse_err(1, "dimension must be positive".into()));
        }
        let mut table = EmbeddingTable::new(dimension);
        for (idx, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let mut fields = line.split_whitespace();
            let word = fields.next().unwrap();
            let vector = fields
                .map(|v| v.parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| parse_err(idx + 2, e.to_string()))?;
            if vector.len() != dimension {
                return Err(parse_err(
                    idx + 2,
                    format!("vector of length {}, expected {dimension}", vector.len()),
                ));
            }
            table.insert(word, vector)?;
        }
        if table.len() != count {
            log::warn!("{source}: header announces {count} vectors, found {}", table.len());
        }
        Ok(table)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::read(BufReader::new(File::open(path)?), &path.display().to_string())
    }

    pub fn write(&self, out: &mut impl Write) -> std::io::Result<()> {
        writeln!(out, "{} {}", self.len(), self.dimension)?;
        for (w, v) in self.words.iter().zip(&self.vectors) {
            write!(out, "{w}")?;
            for x in v {
                write!(out, " {x}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

/// Mean of the vectors of in-vocabulary tokens; zero vector when there are none.
pub fn embed_average<T: AsRef<str>>(tokens: &[T], table: &EmbeddingTable) -> Vec<f64> {
    let mut sum = vec![0.0; table.dimension()];
    let mut n = 0usize;
    for v in tokens.iter().filter_map(|t| table.get(t.as_ref())) {
        sum.iter_mut().zip(v).for_each(|(s, x)| *s += x);
        n += 1;
    }
    if n > 0 {
        sum.iter_mut().for_each(|s| *s /= n as f64);
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> EmbeddingTable {
        EmbeddingTable::read("3 2\nx 1 0\ny 0 1\nz 2 2\n".as_bytes(), "t").unwrap()
    }

    #[test]
    fn averages() {
        let t = table();
        assert_eq!(embed_average(&["x"], &t), vec![1.0, 0.0]);
        assert_eq!(embed_average(&["x", "y"], &t), vec![0.5, 0.5]);
        assert_eq!(embed_average(&["z", "oov"], &t), vec![2.0, 2.0]);
        assert_eq!(embed_average::<&str>(&[], &t), vec![0.0, 0.0]);
    }

    #[test]
    fn bad_vector_length_rejected() {
        let err = EmbeddingTable::read("1 3\nx 1 2\n".as_bytes(), "t").unwrap_err();
        assert!(matches!(err, LearnerError::Parse { line: 2, .. }));
    }

    #[test]
    fn text_round_trip() {
        let t = table();
        let mut buf = Vec::new();
        t.write(&mut buf).unwrap();
        assert_eq!(EmbeddingTable::read(buf.as_slice(), "t").unwrap(), t);
    }
}
