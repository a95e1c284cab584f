use std::io::{self, Write};

use super::sweep::{ResultRow, ResultTable};

pub const HEADER: &str =
    "sweep_param,sweep_value,protocol,destination,estimator,p_out,stderr,ci_low,ci_high,trials,phases_mean";

/// `%.6e` as printf writes it: six fraction digits and an exponent with
/// sign and at least two digits.
pub fn sci(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let s = format!("{x:.6e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

fn row_line(r: &ResultRow) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{},{}\n",
        r.sweep_param.name(),
        sci(r.sweep_value),
        r.protocol.name(),
        r.destination.name(),
        r.estimator.name(),
        sci(r.p_out),
        sci(r.stderr),
        sci(r.ci_low),
        sci(r.ci_high),
        r.trials,
        sci(r.phases_mean),
    )
}

pub fn write_csv<W: Write>(table: &ResultTable, mut out: W) -> io::Result<()> {
    out.write_all(HEADER.as_bytes())?;
    out.write_all(b"\n")?;
    for r in &table.rows {
        out.write_all(row_line(r).as_bytes())?;
    }
    out.flush()
}

pub fn to_csv(table: &ResultTable) -> String {
    let mut buf = Vec::new();
    write_csv(table, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("ascii output")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::config::SweepParameter;
    use crate::experiments::sweep::Estimator;
    use crate::geometry::Destination;
    use crate::protocols::ProtocolKind;

    #[test]
    fn printf_style_exponent() {
        assert_eq!(sci(1.23456e-4), "1.234560e-04");
        assert_eq!(sci(0.0), "0.000000e+00");
        assert_eq!(sci(1.0), "1.000000e+00");
        assert_eq!(sci(5000.0), "5.000000e+03");
        assert_eq!(sci(-2.5e-120), "-2.500000e-120");
        assert_eq!(sci(0.9999999), "9.999999e-01");
        assert_eq!(sci(0.99999996), "1.000000e+00");
    }

    #[test]
    fn one_line_per_row_with_lf() {
        let table = ResultTable {
            rows: vec![ResultRow {
                sweep_param: SweepParameter::Lambda,
                sweep_value: 0.005,
                protocol: ProtocolKind::CoopNoma,
                destination: Destination::D2,
                estimator: Estimator::Mc,
                p_out: 0.25,
                stderr: 0.01,
                ci_low: 0.2304,
                ci_high: 0.2696,
                trials: 1875,
                phases_mean: 2.0,
            }],
            redraws: 0,
        };
        assert_eq!(
            to_csv(&table),
            format!(
                "{HEADER}\nlambda,5.000000e-03,coop_noma,D2,mc,2.500000e-01,1.000000e-02,\
                 2.304000e-01,2.696000e-01,1875,2.000000e+00\n"
            )
        );
    }
}
