use std::io::{Read, Write};
use std::path::Path;

use super::{Dataset, Provenance};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LabelColumn {
    #[default]
    Last,
    /// Zero-based column index.
    Index(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct LoadOptions {
    pub label_column: LabelColumn,
}

/// Loads a comma-separated file: header row, `.` decimal point, empty cell =
/// missing, label in the last column unless configured otherwise.
pub fn load_csv(path: impl AsRef<Path>, options: &LoadOptions) -> Result<Dataset> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut ds = parse_csv(file, options)?;
    ds.provenance.source = Some(path.to_path_buf());
    Ok(ds)
}

pub fn parse_csv<R: Read>(reader: R, options: &LoadOptions) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let csv_err = |e: csv::Error| {
        let row = e.position().map_or(0, |p| p.line() as usize);
        Error::Parse {
            row,
            column: 0,
            message: e.to_string(),
        }
    };
    let headers: Vec<String> = rdr
        .headers()
        .map_err(csv_err)?
        .iter()
        .map(str::to_string)
        .collect();
    if headers.len() < 2 {
        return Err(Error::Data(
            "need at least one feature column and a label column".into(),
        ));
    }
    let label_idx = match options.label_column {
        LabelColumn::Last => headers.len() - 1,
        LabelColumn::Index(i) if i < headers.len() => i,
        LabelColumn::Index(i) => {
            return Err(Error::Usage(format!(
                "label column {i} out of range for {} columns",
                headers.len()
            )))
        }
    };
    let mut sorted = headers.clone();
    sorted.sort();
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::Data(format!("duplicate header name {:?}", w[0])));
    }
    let feature_names: Vec<String> = headers
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != label_idx)
        .map(|(_, h)| h.clone())
        .collect();

    let mut features = Vec::new();
    let mut raw_labels = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(csv_err)?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let mut row = Vec::with_capacity(feature_names.len());
        for (j, cell) in record.iter().enumerate() {
            if j == label_idx {
                if cell.is_empty() {
                    return Err(Error::Parse {
                        row: line,
                        column: j + 1,
                        message: "missing label".into(),
                    });
                }
                raw_labels.push(cell.to_string());
            } else if cell.is_empty() {
                row.push(f64::NAN);
            } else {
                match cell.parse::<f64>() {
                    Ok(v) if v.is_finite() => row.push(v),
                    _ => {
                        return Err(Error::Parse {
                            row: line,
                            column: j + 1,
                            message: format!("non-numeric feature value {cell:?}"),
                        })
                    }
                }
            }
        }
        features.push(row);
    }
    if features.is_empty() {
        return Err(Error::Data("dataset has no rows".into()));
    }

    let class_names = class_order(&raw_labels);
    let labels = raw_labels
        .iter()
        .map(|l| class_names.iter().position(|c| c == l).expect("collected"))
        .collect();
    let ds = Dataset {
        features,
        labels,
        class_names,
        feature_names,
        provenance: Provenance {
            source: None,
            transforms: vec![format!("load_csv(label_column={:?})", options.label_column)],
        },
    };
    ds.check_shape()?;
    Ok(ds)
}

/// Distinct labels, numerically ordered when every label is a number and
/// lexicographically otherwise.
fn class_order(labels: &[String]) -> Vec<String> {
    let mut classes: Vec<String> = labels.to_vec();
    classes.sort();
    classes.dedup();
    let numeric: Option<Vec<f64>> = classes.iter().map(|c| c.parse::<f64>().ok()).collect();
    if let Some(values) = numeric {
        let mut paired: Vec<(f64, String)> = values.into_iter().zip(classes).collect();
        paired.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
        return paired.into_iter().map(|(_, c)| c).collect();
    }
    classes
}

/// Writes the dataset in the loader's format with the label last, header
/// `label`. Values use the shortest round-trip decimal form; missing cells
/// are written empty.
pub fn write_csv<W: Write>(ds: &Dataset, mut out: W) -> std::io::Result<()> {
    let mut header = ds.feature_names.join(",");
    header.push_str(",label\n");
    out.write_all(header.as_bytes())?;
    for (row, &label) in ds.features.iter().zip(&ds.labels) {
        let mut line = String::new();
        for v in row {
            if !v.is_nan() {
                line.push_str(&v.to_string());
            }
            line.push(',');
        }
        line.push_str(&ds.class_names[label]);
        line.push('\n');
        out.write_all(line.as_bytes())?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Dataset> {
        parse_csv(text.as_bytes(), &LoadOptions::default())
    }

    #[test]
    fn simple_file() {
        let ds = parse("a,b,y\n1,2,x\n3,4.5,y\n-1,0,x\n").unwrap();
        assert_eq!(ds.n_rows(), 3);
        assert_eq!(ds.n_features(), 2);
        assert_eq!(ds.features[1], vec![3.0, 4.5]);
        assert_eq!(ds.labels, vec![0, 1, 0]);
        assert_eq!(ds.class_names, vec!["x", "y"]);
    }

    #[test]
    fn empty_cell_is_missing() {
        let ds = parse("a,b,y\n1,,0\n3,4,1\n").unwrap();
        assert!(ds.features[0][1].is_nan());
        assert_eq!(ds.missing_count(), 1);
    }

    #[test]
    fn header_only_is_error() {
        assert!(matches!(parse("a,b,y\n"), Err(Error::Data(_))));
    }

    #[test]
    fn bad_cell_reports_position() {
        match parse("a,b,y\n1,2,0\n1,zz,1\n") {
            Err(Error::Parse { row, column, .. }) => {
                assert_eq!(row, 3);
                assert_eq!(column, 2);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn duplicate_headers_rejected() {
        assert!(matches!(parse("a,a,y\n1,2,0\n"), Err(Error::Data(_))));
    }

    #[test]
    fn label_column_override() {
        let opts = LoadOptions {
            label_column: LabelColumn::Index(0),
        };
        let ds = parse_csv("y,a,b\n2,1,1\n10,0,1\n".as_bytes(), &opts).unwrap();
        assert_eq!(ds.feature_names, vec!["a", "b"]);
        // Numeric ordering: 2 before 10.
        assert_eq!(ds.class_names, vec!["2", "10"]);
        assert_eq!(ds.labels, vec![0, 1]);
    }

    #[test]
    fn write_then_parse_round_trips() {
        let ds = parse("a,b,label\n0.1,,c0\n3,4,c1\n").unwrap();
        let mut buf = Vec::new();
        write_csv(&ds, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf.clone()).unwrap(),
            "a,b,label\n0.1,,c0\n3,4,c1\n"
        );
        let back = parse_csv(buf.as_slice(), &LoadOptions::default()).unwrap();
        assert_eq!(back.labels, ds.labels);
        assert_eq!(back.features[1], ds.features[1]);
    }
}
