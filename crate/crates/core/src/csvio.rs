//! CSV conventions shared by every output: LF line endings, '.' decimal
//! separator, nine significant digits.

use std::path::Path;

use crate::error::{Error, Result};
use crate::fusion::{FusedFeature, FUSED_NAMES};

/// Formats like C's `%.9g`.
pub fn fmt_num(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{v:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        trim_fraction(format!("{v:.decimals$}"))
    } else {
        let mantissa = trim_fraction(mantissa.to_string());
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    }
}

fn trim_fraction(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// A fused-feature table with an optional label column and any extra columns
/// carried through untouched (for example `ref`, `test`, `pred`).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FusedTable {
    pub features: Vec<FusedFeature>,
    pub mos: Option<Vec<f64>>,
    pub extra_headers: Vec<String>,
    pub extra: Vec<Vec<String>>,
}

impl FusedTable {
    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    /// Value of an extra column, parsed as a number.
    pub fn numeric_column(&self, name: &str) -> Result<Vec<f64>> {
        let idx = self
            .extra_headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Schema(format!("missing column '{name}'")))?;
        self.extra
            .iter()
            .enumerate()
            .map(|(row, r)| {
                r[idx].parse::<f64>().map_err(|_| Error::Data {
                    row,
                    reason: format!("column '{name}' holds '{}'", r[idx]),
                })
            })
            .collect()
    }
}

pub fn read_fused_csv(path: &Path) -> Result<FusedTable> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_fused_csv(file)
}

/// Reads a fused dataset. Every one of the eight feature columns must be
/// present; `mos` is optional; unknown columns are kept as text.
pub fn parse_fused_csv<R: std::io::Read>(input: R) -> Result<FusedTable> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(input);
    let headers: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let find = |name: &str| headers.iter().position(|h| h == name);

    let mut feature_idx = [0usize; 8];
    for (slot, name) in feature_idx.iter_mut().zip(FUSED_NAMES) {
        *slot = find(name).ok_or_else(|| Error::Schema(format!("missing column '{name}'")))?;
    }
    let mos_idx = find("mos");
    let extra_idx: Vec<usize> = (0..headers.len())
        .filter(|i| !feature_idx.contains(i) && Some(*i) != mos_idx)
        .collect();

    let mut table = FusedTable {
        extra_headers: extra_idx.iter().map(|&i| headers[i].clone()).collect(),
        mos: mos_idx.map(|_| Vec::new()),
        ..Default::default()
    };
    for (row, record) in rdr.records().enumerate() {
        let record = record?;
        let num = |i: usize| -> Result<f64> {
            let cell = &record[i];
            match cell.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(Error::Data {
                    row,
                    reason: format!("column '{}' holds '{cell}'", headers[i]),
                }),
            }
        };
        let mut z = [0.0; 8];
        for (v, &i) in z.iter_mut().zip(&feature_idx) {
            *v = num(i)?;
        }
        table.features.push(FusedFeature::from_array(z));
        if let (Some(i), Some(mos)) = (mos_idx, table.mos.as_mut()) {
            mos.push(num(i)?);
        }
        table
            .extra
            .push(extra_idx.iter().map(|&i| record[i].to_string()).collect());
    }
    Ok(table)
}

/// Writes the table: extra columns first, then the eight features, then `mos`,
/// then any `appended` columns (name, values).
pub fn write_fused_csv<W: std::io::Write>(
    out: W,
    table: &FusedTable,
    appended: &[(&str, &[f64])],
) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    let mut header: Vec<&str> = table.extra_headers.iter().map(String::as_str).collect();
    header.extend(FUSED_NAMES);
    if table.mos.is_some() {
        header.push("mos");
    }
    header.extend(appended.iter().map(|(n, _)| *n));
    wtr.write_record(&header)?;
    for i in 0..table.len() {
        let mut row: Vec<String> = table.extra.get(i).cloned().unwrap_or_default();
        row.extend(table.features[i].to_array().iter().map(|&v| fmt_num(v)));
        if let Some(mos) = &table.mos {
            row.push(fmt_num(mos[i]));
        }
        row.extend(appended.iter().map(|(_, v)| fmt_num(v[i])));
        wtr.write_record(&row)?;
    }
    wtr.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}
