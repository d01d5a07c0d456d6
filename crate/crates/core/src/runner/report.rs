//! Feature statistics for instance sets: average/std/min/max rows, box-plot
//! five-number summaries and set diversity.

use serde::Serialize;

use crate::diversity::set_diversity;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub set: String,
    pub feature: String,
    pub count: usize,
    pub average: f64,
    /// Sample standard deviation.
    pub std: f64,
    pub min: f64,
    pub max: f64,
    #[serde(rename = "D_s")]
    pub d_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoxRow {
    pub set: String,
    pub feature: String,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

fn median_sorted(v: &[f64]) -> f64 {
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

/// Five-number summary with quartiles as medians of the lower and upper
/// halves; for odd sizes the median belongs to both halves.
pub fn five_numbers(values: &[f64]) -> Result<[f64; 5]> {
    if values.len() < 2 {
        return Err(Error::Usage(format!(
            "box statistics need at least 2 values, got {}",
            values.len()
        )));
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    let half = n.div_ceil(2);
    let lower = &v[..half];
    let upper = &v[n - half..];
    Ok([v[0], median_sorted(lower), median_sorted(&v), median_sorted(upper), v[n - 1]])
}

pub fn summarize(set: &str, feature: &str, values: &[f64]) -> Result<(SummaryRow, BoxRow)> {
    if values.len() < 3 {
        return Err(Error::Usage(format!(
            "set `{set}` has {} members; at least 3 are needed",
            values.len()
        )));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let average = sorted.iter().sum::<f64>() / n;
    let std = (sorted.iter().map(|x| (x - average).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    let [min, q1, median, q3, max] = five_numbers(&sorted)?;
    Ok((
        SummaryRow {
            set: set.to_owned(),
            feature: feature.to_owned(),
            count: sorted.len(),
            average,
            std,
            min,
            max,
            d_s: set_diversity(&sorted)?,
        },
        BoxRow {
            set: set.to_owned(),
            feature: feature.to_owned(),
            min,
            q1,
            median,
            q3,
            max,
        },
    ))
}

pub fn write_csv<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Usage(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_example() {
        let (s, b) = summarize("a", "ft1", &[8.0, 1.0, 7.0, 3.0]).unwrap();
        assert_eq!((s.min, s.max, s.average, s.d_s), (1.0, 8.0, 4.75, 12.0));
        assert_eq!([b.q1, b.median, b.q3], [2.0, 5.0, 7.5]);
        assert!(summarize("a", "ft1", &[1.0]).is_err());
    }

    #[test]
    fn odd_quartiles_include_median() {
        assert_eq!(five_numbers(&[5.0, 1.0, 3.0, 2.0, 4.0]).unwrap(), [1.0, 2.0, 3.0, 4.0, 5.0]);
        assert_eq!(five_numbers(&[1.0, 2.0, 3.0]).unwrap(), [1.0, 1.5, 2.0, 2.5, 3.0]);
        assert!(five_numbers(&[1.0]).is_err());
    }

    #[test]
    fn csv_has_header() {
        let (s, _) = summarize("a", "ft1", &[1.0, 3.0, 7.0, 8.0]).unwrap();
        let text = write_csv(&[s]).unwrap();
        assert_eq!(text.lines().next().unwrap(), "set,feature,count,average,std,min,max,D_s");
    }
}
