//! CSV field files: header `x0[,x1[,x2]],value`, one node per line in grid order.

use std::io::{Read, Write};

use super::{DiscreteField, GridSpec};
use crate::error::{Error, Result};

const AXIS_NAMES: [&str; 3] = ["x0", "x1", "x2"];

/// Round-trip float formatting shared with the JSON reports.
pub(crate) fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv<W: Write>(field: &DiscreteField, out: W) -> Result<()> {
    let grid = field.grid();
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<&str> = AXIS_NAMES[..grid.dim].to_vec();
    header.push("value");
    w.write_record(&header).map_err(csv_to_io)?;
    for (i, v) in field.values().iter().enumerate() {
        let p = grid.node(i);
        let mut rec: Vec<String> = p[..grid.dim].iter().map(|&c| fmt_f64(c)).collect();
        rec.push(fmt_f64(*v));
        w.write_record(&rec).map_err(csv_to_io)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a field written on `grid`; node coordinates must match the grid.
pub fn read_csv<R: Read>(grid: &GridSpec, input: R) -> Result<DiscreteField> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let headers = r.headers().map_err(|e| parse_err(1, e.to_string()))?.clone();
    let expected: Vec<&str> = AXIS_NAMES[..grid.dim].iter().copied().chain(["value"]).collect();
    let got: Vec<&str> = headers.iter().map(str::trim).collect();
    if got != expected {
        return Err(parse_err(1, format!("header {got:?}, expected {expected:?}")));
    }
    let tol = 1e-9 * grid.half_width;
    let mut values = Vec::with_capacity(grid.len());
    for (i, rec) in r.records().enumerate() {
        let line = i as u64 + 2;
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(line, |p| p.line());
            parse_err(line, e.to_string())
        })?;
        if i >= grid.len() {
            return Err(parse_err(line, format!("more than {} data rows", grid.len())));
        }
        let nums = rec
            .iter()
            .map(|f| {
                f.trim()
                    .parse::<f64>()
                    .map_err(|e| parse_err(line, format!("`{f}`: {e}")))
            })
            .collect::<Result<Vec<f64>>>()?;
        let node = grid.node(i);
        for axis in 0..grid.dim {
            if (nums[axis] - node[axis]).abs() > tol {
                return Err(parse_err(
                    line,
                    format!("coordinate {} = {} but grid node is {}", AXIS_NAMES[axis], nums[axis], node[axis]),
                ));
            }
        }
        let v = nums[grid.dim];
        if !v.is_finite() {
            return Err(parse_err(line, format!("non-finite value {v}")));
        }
        values.push(v);
    }
    if values.len() != grid.len() {
        return Err(parse_err(
            values.len() as u64 + 2,
            format!("expected {} data rows, found {}", grid.len(), values.len()),
        ));
    }
    DiscreteField::from_values(*grid, values)
}

fn parse_err(line: u64, msg: String) -> Error {
    Error::Parse { line, msg }
}

fn csv_to_io(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::random_smooth_field;

    #[test]
    fn round_trip_is_exact() {
        let g = GridSpec::new(2, 3.0, 8, true).unwrap();
        let f = random_smooth_field(&g, 11, 0.4).unwrap();
        let mut buf = Vec::new();
        write_csv(&f, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("x0,x1,value\n"));
        assert_eq!(read_csv(&g, buf.as_slice()).unwrap(), f);
    }

    #[test]
    fn malformed_rows_report_line() {
        let g = GridSpec::new(1, 1.0, 8, true).unwrap();
        let f = DiscreteField::sample(g, |x| x[0]).unwrap();
        let mut buf = Vec::new();
        write_csv(&f, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines: Vec<String> = text.lines().map(String::from).collect();
        lines[4] = "-0.125,abc".into();
        let err = read_csv(&g, lines.join("\n").as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 5, .. }), "{err}");

        let short = lines[..6].join("\n");
        assert!(matches!(read_csv(&g, short.as_bytes()), Err(Error::Parse { .. })));

        let mut wrong = text.lines().map(String::from).collect::<Vec<_>>();
        wrong[2] = "0.5,1.0".into();
        let err = read_csv(&g, wrong.join("\n").as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
    }
}
