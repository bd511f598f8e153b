//! CSV interchange: one sample per line in, `index,distance,nn_index` out.

use std::io::{self, Read, Write};

use diagmp::{MatrixProfile, TimeSeries};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ReadError {
    #[error("line {line}: cannot parse {text:?} as a number")]
    Parse { line: u64, text: String },
    #[error("input holds no samples")]
    EmptyInput,
    #[error(transparent)]
    Series(#[from] diagmp::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Reads a series from CSV. Only the first column is used; a first line that
/// does not parse as a number is taken as a header.
pub fn read_series_csv<R: Read>(source: R) -> Result<TimeSeries, ReadError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(source);
    let mut values = Vec::new();
    let mut record = csv::StringRecord::new();
    let mut first = true;
    loop {
        match reader.read_record(&mut record) {
            Ok(true) => {}
            Ok(false) => break,
            Err(e) => return Err(csv_error(e)),
        }
        let line = record.position().map_or(0, |p| p.line());
        let field = record.get(0).unwrap_or("");
        match field.parse::<f64>() {
            Ok(v) => values.push(v),
            Err(_) if first => {}
            Err(_) => {
                return Err(ReadError::Parse {
                    line,
                    text: field.to_string(),
                })
            }
        }
        first = false;
    }
    if values.is_empty() {
        return Err(ReadError::EmptyInput);
    }
    Ok(TimeSeries::new(values)?)
}

fn csv_error(e: csv::Error) -> ReadError {
    let line = e.position().map_or(0, |p| p.line());
    match e.into_kind() {
        csv::ErrorKind::Io(err) => ReadError::Io(err),
        other => ReadError::Parse {
            line,
            text: format!("{other:?}"),
        },
    }
}

/// Writes `values` under a `value` header using the shortest representation
/// that parses back to the same number.
pub fn write_series_csv<W: Write>(values: &[f64], sink: W) -> io::Result<()> {
    let mut out = io::BufWriter::new(sink);
    writeln!(out, "value")?;
    for v in values {
        writeln!(out, "{v}")?;
    }
    out.flush()
}

/// Writes a profile as `index,distance,nn_index`, distances with 9
/// significant digits. Entries without a neighbor have distance `inf` and an
/// empty index.
pub fn write_profile_csv<W: Write>(profile: &MatrixProfile, sink: W) -> io::Result<()> {
    let mut out = io::BufWriter::new(sink);
    writeln!(out, "index,distance,nn_index")?;
    for (i, (d, nn)) in profile.distances.iter().zip(&profile.nn_index).enumerate() {
        match nn {
            Some(j) => writeln!(out, "{i},{},{j}", format_sig9(*d))?,
            None => writeln!(out, "{i},{},", format_sig9(*d))?,
        }
    }
    out.flush()
}

/// Fixed-point rendering with 9 significant digits (`0` gives `0.00000000`).
pub fn format_sig9(v: f64) -> String {
    if !v.is_finite() {
        return if v.is_nan() {
            "nan".into()
        } else if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    // Scientific formatting does the rounding; its exponent tells how many
    // decimals keep 9 significant digits.
    let sci = format!("{v:.8e}");
    let exp: i32 = sci
        .rsplit('e')
        .next()
        .and_then(|e| e.parse().ok())
        .unwrap_or(0);
    let decimals = (8 - exp).max(0) as usize;
    format!("{v:.decimals$}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use diagmp::{matrix_profile, DistanceKind, ProfileConfig};
    use proptest::prelude::*;

    #[test]
    fn header_is_skipped() {
        let ts = read_series_csv("value\n0\n1\n2\n".as_bytes()).unwrap();
        assert_eq!(ts.values(), &[0.0, 1.0, 2.0]);
    }

    #[test]
    fn first_column_is_used() {
        let ts = read_series_csv("1.5,99\n2.5,98\n".as_bytes()).unwrap();
        assert_eq!(ts.values(), &[1.5, 2.5]);
    }

    #[test]
    fn crlf_and_blank_lines() {
        let ts = read_series_csv("t\r\n1\r\n\r\n 2 \r\n3".as_bytes()).unwrap();
        assert_eq!(ts.values(), &[1.0, 2.0, 3.0]);
    }

    #[test]
    fn bad_line_is_reported() {
        match read_series_csv("1\nabc\n".as_bytes()) {
            Err(ReadError::Parse { line, text }) => {
                assert_eq!(line, 2);
                assert_eq!(text, "abc");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn empty_short_and_nonfinite() {
        assert!(matches!(
            read_series_csv("".as_bytes()),
            Err(ReadError::EmptyInput)
        ));
        assert!(matches!(
            read_series_csv("value\n".as_bytes()),
            Err(ReadError::EmptyInput)
        ));
        assert!(matches!(
            read_series_csv("4\n".as_bytes()),
            Err(ReadError::Series(diagmp::Error::TooShort { len: 1 }))
        ));
        assert!(matches!(
            read_series_csv("1\nNaN\n".as_bytes()),
            Err(ReadError::Series(diagmp::Error::NonFinite { index: 1, .. }))
        ));
    }

    #[test]
    fn sig9_rendering() {
        assert_eq!(format_sig9(0.0), "0.00000000");
        assert_eq!(format_sig9(3f64.sqrt()), "1.73205081");
        assert_eq!(format_sig9(12.0f64.sqrt()), "3.46410162");
        assert_eq!(format_sig9(123.456789012), "123.456789");
        assert_eq!(format_sig9(0.000123456789012), "0.000123456789");
        assert_eq!(format_sig9(9.999999999), "10.0000000");
        assert_eq!(format_sig9(1e12), "1000000000000");
        assert_eq!(format_sig9(f64::INFINITY), "inf");
    }

    #[test]
    fn e1_profile_csv() {
        let ts = TimeSeries::new(vec![0.0, 1.0, 2.0, 1.0, 0.0, 1.0, 2.0]).unwrap();
        let mp = matrix_profile(&ts, &ProfileConfig::new(3, DistanceKind::Euclidean)).unwrap();
        let mut buf = Vec::new();
        write_profile_csv(&mp, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "index,distance,nn_index\n\
             0,0.00000000,4\n\
             1,1.73205081,0\n\
             2,1.73205081,1\n\
             3,1.73205081,0\n\
             4,0.00000000,0\n"
        );
    }

    #[test]
    fn single_entry_profile() {
        let ts = TimeSeries::new(vec![1.0, 2.0]).unwrap();
        let cfg = ProfileConfig::new(1, DistanceKind::Euclidean);
        let mp = matrix_profile(&ts, &cfg).unwrap();
        assert_eq!(mp.len(), 2);
        let single = MatrixProfile {
            distances: vec![0.5],
            nn_index: vec![None],
            ..mp
        };
        let mut buf = Vec::new();
        write_profile_csv(&single, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "index,distance,nn_index\n0,0.500000000,\n"
        );
    }

    struct Broken;

    impl Write for Broken {
        fn write(&mut self, _: &[u8]) -> io::Result<usize> {
            Err(io::Error::new(io::ErrorKind::BrokenPipe, "closed"))
        }
        fn flush(&mut self) -> io::Result<()> {
            Err(io::Error::new(io::ErrorKind::BrokenPipe, "closed"))
        }
    }

    #[test]
    fn unwritable_sink_is_an_error() {
        let ts = TimeSeries::new(vec![0.0, 1.0, 2.0]).unwrap();
        let mp = matrix_profile(&ts, &ProfileConfig::new(1, DistanceKind::Euclidean)).unwrap();
        assert!(write_profile_csv(&mp, Broken).is_err());
    }

    proptest! {
        #[test]
        fn series_round_trip(values in prop::collection::vec(-1e12f64..1e12, 2..200)) {
            let mut buf = Vec::new();
            write_series_csv(&values, &mut buf).unwrap();
            let back = read_series_csv(buf.as_slice()).unwrap();
            prop_assert_eq!(back.values(), values.as_slice());
        }

        #[test]
        fn sig9_keeps_nine_digits(v in 1e-6f64..1e9) {
            let back: f64 = format_sig9(v).parse().unwrap();
            prop_assert!((back - v).abs() <= 5e-9 * v);
        }
    }
}
