//! Labelled integer tables and their canonical serializations.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde_json::{json, Value};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DimensionTable {
    pub label: String,
    pub axes: Vec<String>,
    pub cells: BTreeMap<Vec<i64>, i64>,
    pub metadata: BTreeMap<String, String>,
}

impl DimensionTable {
    pub fn new(label: &str, axes: &[&str]) -> Self {
        DimensionTable {
            label: label.to_string(),
            axes: axes.iter().map(|s| s.to_string()).collect(),
            cells: BTreeMap::new(),
            metadata: BTreeMap::new(),
        }
    }

    pub fn with_meta(mut self, key: &str, value: impl ToString) -> Self {
        self.metadata.insert(key.to_string(), value.to_string());
        self
    }

    pub fn set_meta(&mut self, key: &str, value: impl ToString) {
        self.metadata.insert(key.to_string(), value.to_string());
    }

    pub fn set(&mut self, coords: &[i64], value: i64) {
        assert_eq!(coords.len(), self.axes.len(), "coordinate arity");
        self.cells.insert(coords.to_vec(), value);
    }

    pub fn get(&self, coords: &[i64]) -> Option<i64> {
        self.cells.get(coords).copied()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Sum of the values over all cells.
    pub fn total(&self) -> i64 {
        self.cells.values().sum()
    }

    /// True if every cell of the rectangle `ranges` (one inclusive range per axis) is present.
    pub fn is_complete(&self, ranges: &[(i64, i64)]) -> bool {
        fn go(t: &DimensionTable, ranges: &[(i64, i64)], cur: &mut Vec<i64>) -> bool {
            if cur.len() == ranges.len() {
                return t.cells.contains_key(cur);
            }
            let (lo, hi) = ranges[cur.len()];
            for v in lo..=hi {
                cur.push(v);
                let ok = go(t, ranges, cur);
                cur.pop();
                if !ok {
                    return false;
                }
            }
            true
        }
        ranges.len() == self.axes.len() && go(self, ranges, &mut Vec::new())
    }

    /// Cells as `[coords..., value]` rows, in coordinate order.
    pub fn to_value(&self) -> Value {
        let cells: Vec<Value> = self
            .cells
            .iter()
            .map(|(k, v)| Value::Array(k.iter().chain(std::iter::once(v)).map(|x| json!(x)).collect()))
            .collect();
        json!({
            "label": self.label,
            "axes": self.axes,
            "cells": cells,
            "metadata": self.metadata,
        })
    }

    pub fn from_value(v: &Value) -> Result<Self> {
        let bad = |m: &str| Error::Io(format!("malformed table: {m}"));
        let label = v["label"].as_str().ok_or_else(|| bad("label"))?.to_string();
        let axes: Vec<String> = v["axes"]
            .as_array()
            .ok_or_else(|| bad("axes"))?
            .iter()
            .map(|a| a.as_str().map(str::to_string).ok_or_else(|| bad("axis name")))
            .collect::<Result<_>>()?;
        let mut cells = BTreeMap::new();
        for row in v["cells"].as_array().ok_or_else(|| bad("cells"))? {
            let row: Vec<i64> = row
                .as_array()
                .ok_or_else(|| bad("cell"))?
                .iter()
                .map(|x| x.as_i64().ok_or_else(|| bad("cell entry")))
                .collect::<Result<_>>()?;
            if row.len() != axes.len() + 1 {
                return Err(bad("cell arity"));
            }
            cells.insert(row[..axes.len()].to_vec(), row[axes.len()]);
        }
        let mut metadata = BTreeMap::new();
        if let Some(m) = v["metadata"].as_object() {
            for (k, x) in m {
                metadata.insert(k.clone(), x.as_str().ok_or_else(|| bad("metadata value"))?.to_string());
            }
        }
        Ok(DimensionTable { label, axes, cells, metadata })
    }

    /// Canonical JSON: sorted keys, two-space indent, trailing newline.
    pub fn to_json(&self) -> String {
        canonical_json(&self.to_value())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text).map_err(|e| Error::Io(e.to_string()))?;
        Self::from_value(&v)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for a in &self.axes {
            s.push_str(a);
            s.push(',');
        }
        s.push_str("value\n");
        for (k, v) in &self.cells {
            for x in k {
                let _ = write!(s, "{x},");
            }
            let _ = writeln!(s, "{v}");
        }
        s
    }

    /// Aligned columns under a header naming the table and its metadata.
    pub fn to_text(&self) -> String {
        let mut s = format!("# {}\n", self.label);
        for (k, v) in &self.metadata {
            let _ = writeln!(s, "# {k}: {v}");
        }
        let mut rows: Vec<Vec<String>> = vec![self.axes.iter().cloned().chain(["value".to_string()]).collect()];
        for (k, v) in &self.cells {
            rows.push(k.iter().chain(std::iter::once(v)).map(|x| x.to_string()).collect());
        }
        let ncol = self.axes.len() + 1;
        let widths: Vec<usize> = (0..ncol).map(|c| rows.iter().map(|r| r[c].len()).max().unwrap_or(0)).collect();
        for r in rows {
            let line: Vec<String> = r.iter().zip(&widths).map(|(x, w)| format!("{x:>w$}")).collect();
            s.push_str(line.join("  ").trim_end());
            s.push('\n');
        }
        s
    }
}

/// Serialize with sorted object keys (serde_json's map is ordered).
pub fn canonical_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn formats() {
        let mut t = DimensionTable::new("hh", &["n", "w"]).with_meta("algebra", "cusp");
        t.set(&[1, 5], 2);
        t.set(&[0, 0], 1);
        assert_eq!(t.to_csv(), "n,w,value\n0,0,1\n1,5,2\n");
        let j = t.to_json();
        assert!(j.find("\"axes\"").unwrap() < j.find("\"cells\"").unwrap());
        assert_eq!(DimensionTable::from_json(&j).unwrap(), t);
        assert!(t.to_text().contains("n  w  value"));
        assert!(!t.is_complete(&[(0, 1), (0, 5)]));
    }

    proptest! {
        #[test]
        fn json_round_trip(cells in proptest::collection::btree_map((0i64..5, -3i64..9), 0i64..100, 0..20)) {
            let mut t = DimensionTable::new("t", &["a", "b"]).with_meta("k", "v");
            for ((a, b), v) in &cells {
                t.set(&[*a, *b], *v);
            }
            let j = t.to_json();
            let back = DimensionTable::from_json(&j).unwrap();
            prop_assert_eq!(back.to_json(), j);
            prop_assert_eq!(back, t);
        }
    }
}
