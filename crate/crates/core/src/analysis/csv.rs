//! Series CSV format.
//!
//! Header is exactly
//! `iteration,mean_total_value,min_total_value,max_total_value,mean_active_players`,
//! one row per iteration starting at 1, LF line endings. Reals carry six
//! significant digits in plain decimal notation with trailing zeros kept, so
//! `2.0` is written `2.00000` and `1234567.0` is written `1234570`.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Result, SimError};
use crate::harness::AggregateSeries;
use crate::record::{IterationRecord, ModelExtras};

pub const SERIES_HEADER: &str =
    "iteration,mean_total_value,min_total_value,max_total_value,mean_active_players";

const SIG_DIGITS: usize = 6;

/// Six significant digits, plain decimal notation.
pub fn format_sig6(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return format!("{:.*}", SIG_DIGITS - 1, 0.0);
    }
    // Rust's exponent formatting rounds correctly; re-place the point.
    let sci = format!("{:.*e}", SIG_DIGITS - 1, x.abs());
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    let sign = if x < 0.0 { "-" } else { "" };
    let body = if exp < 0 {
        format!("0.{}{}", "0".repeat((-exp - 1) as usize), digits)
    } else if (exp as usize) < SIG_DIGITS - 1 {
        let (int, frac) = digits.split_at(exp as usize + 1);
        format!("{int}.{frac}")
    } else {
        format!("{digits}{}", "0".repeat(exp as usize + 1 - SIG_DIGITS))
    };
    format!("{sign}{body}")
}

pub fn write_series_csv<W: Write>(series: &AggregateSeries, mut out: W) -> Result<()> {
    writeln!(out, "{SERIES_HEADER}")?;
    for i in 0..series.len() {
        writeln!(
            out,
            "{},{},{},{},{}",
            i + 1,
            format_sig6(series.mean_total_value[i]),
            format_sig6(series.min_total_value[i]),
            format_sig6(series.max_total_value[i]),
            format_sig6(series.mean_active_players[i]),
        )?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_series_csv_file(series: &AggregateSeries, path: &Path) -> Result<()> {
    let file = File::create(path)?;
    write_series_csv(series, BufWriter::new(file))
}

/// Parse a series written by [`write_series_csv`].
pub fn read_series_csv<R: Read>(input: R) -> Result<AggregateSeries> {
    let mut reader = ::csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header = reader.headers()?.iter().collect::<Vec<_>>().join(",");
    if header != SERIES_HEADER {
        return Err(SimError::MalformedCsv(format!("unexpected header `{header}`")));
    }
    let mut series = AggregateSeries {
        mean_total_value: Vec::new(),
        min_total_value: Vec::new(),
        max_total_value: Vec::new(),
        mean_active_players: Vec::new(),
    };
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        let field = |col: usize| -> Result<f64> {
            record
                .get(col)
                .and_then(|s| s.trim().parse::<f64>().ok())
                .ok_or_else(|| SimError::MalformedCsv(format!("row {}: bad column {col}", row + 1)))
        };
        let iteration = field(0)?;
        if iteration != (row + 1) as f64 {
            return Err(SimError::MalformedCsv(format!(
                "row {}: iteration {iteration} out of sequence",
                row + 1
            )));
        }
        series.mean_total_value.push(field(1)?);
        series.min_total_value.push(field(2)?);
        series.max_total_value.push(field(3)?);
        series.mean_active_players.push(field(4)?);
    }
    Ok(series)
}

pub fn read_series_csv_file(path: &Path) -> Result<AggregateSeries> {
    read_series_csv(File::open(path)?)
}

pub const RECORDS_HEADER: &str = "iteration,total_value,active_players,joins,departures,\
nfts_minted,staked_total,per_nft_reward,fragments_drawn,payout_total,winner_count";

/// Raw per-iteration records of one repeat. Columns that do not apply to the
/// model are left empty.
pub fn write_records_csv<W: Write>(records: &[IterationRecord], mut out: W) -> Result<()> {
    writeln!(out, "{RECORDS_HEADER}")?;
    for r in records {
        let extras = match &r.extra {
            ModelExtras::ServerFi {
                nfts_minted,
                staked_total,
                per_nft_reward,
                fragments_drawn,
            } => format!(
                "{nfts_minted},{staked_total},{},{fragments_drawn},,",
                format_sig6(*per_nft_reward)
            ),
            ModelExtras::Retention {
                payout_total,
                winner_count,
            } => format!(",,,,{},{winner_count}", format_sig6(*payout_total)),
        };
        writeln!(
            out,
            "{},{},{},{},{},{extras}",
            r.iteration,
            format_sig6(r.total_value.get()),
            r.active_players,
            r.joins,
            r.departures,
        )?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_records_csv_file(records: &[IterationRecord], path: &Path) -> Result<()> {
    write_records_csv(records, BufWriter::new(File::create(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(values: &[f64]) -> AggregateSeries {
        AggregateSeries {
            mean_total_value: values.to_vec(),
            min_total_value: values.iter().map(|v| v * 0.5).collect(),
            max_total_value: values.iter().map(|v| v * 2.0).collect(),
            mean_active_players: values.to_vec(),
        }
    }

    #[test]
    fn six_significant_digits() {
        assert_eq!(format_sig6(2.0), "2.00000");
        assert_eq!(format_sig6(0.0), "0.00000");
        assert_eq!(format_sig6(4562.374), "4562.37");
        assert_eq!(format_sig6(123456.7), "123457");
        assert_eq!(format_sig6(1234567.0), "1234570");
        assert_eq!(format_sig6(999999.6), "1000000");
        assert_eq!(format_sig6(0.00123456789), "0.00123457");
        assert_eq!(format_sig6(9.999996), "10.0000");
        assert_eq!(format_sig6(-1.5), "-1.50000");
    }

    #[test]
    fn three_rows_plus_header() {
        let mut buf = Vec::new();
        write_series_csv(&series(&[1.0, 2.0, 3.0]), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert!(!text.contains('\r'));
        assert_eq!(text.lines().next().unwrap(), SERIES_HEADER);
        assert_eq!(text.lines().nth(2).unwrap(), "2,2.00000,1.00000,4.00000,2.00000");
    }

    #[test]
    fn rewrite_is_byte_identical() {
        let s = series(&[0.1, 17.25, 1e7 / 3.0]);
        let mut a = Vec::new();
        let mut b = Vec::new();
        write_series_csv(&s, &mut a).unwrap();
        write_series_csv(&s, &mut b).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_foreign_header() {
        let err = read_series_csv("a,b\n1,2\n".as_bytes()).unwrap_err();
        assert!(matches!(err, SimError::MalformedCsv(_)));
        let err = read_series_csv(format!("{SERIES_HEADER}\n2,1,1,1,1\n").as_bytes()).unwrap_err();
        assert!(err.to_string().contains("out of sequence"));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn round_trip_keeps_six_digits(values in proptest::collection::vec(1e-6f64..1e9, 1..40)) {
                let s = series(&values);
                let mut buf = Vec::new();
                write_series_csv(&s, &mut buf).unwrap();
                let back = read_series_csv(buf.as_slice()).unwrap();
                prop_assert_eq!(back.len(), s.len());
                for (a, b) in s.mean_total_value.iter().zip(&back.mean_total_value) {
                    prop_assert!((a - b).abs() <= 5e-6 * a.abs());
                }
                for (a, b) in s.max_total_value.iter().zip(&back.max_total_value) {
                    prop_assert!((a - b).abs() <= 5e-6 * a.abs());
                }
            }

            #[test]
            fn formatting_is_idempotent(x in -1e12f64..1e12) {
                let once = format_sig6(x);
                let twice = format_sig6(once.parse().unwrap());
                prop_assert_eq!(once, twice);
            }
        }
    }
}
