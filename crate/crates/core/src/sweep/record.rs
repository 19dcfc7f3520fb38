use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::circuit::Scheme;
use crate::error::{Error, Result};

/// Column order of every emitted CSV. Downstream plotting depends on it.
pub const CSV_HEADER: [&str; 12] = [
    "scheme",
    "n",
    "p",
    "q",
    "success_recorded",
    "success_true",
    "fidelity",
    "hellinger",
    "stderr",
    "shots",
    "seed",
    "oracle_diff",
];

/// Significant digits of every real-valued CSV field.
pub const SIGNIFICANT_DIGITS: usize = 12;

/// One grid point of a sweep.
///
/// Real fields are stored already rounded to [`SIGNIFICANT_DIGITS`], so a
/// record survives a CSV round trip unchanged.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurfaceRecord {
    pub scheme: Scheme,
    pub n: usize,
    pub p: f64,
    pub q: f64,
    pub success_recorded: f64,
    pub success_true: f64,
    pub fidelity: Option<f64>,
    pub hellinger: Option<f64>,
    pub stderr: Option<f64>,
    pub shots: Option<u64>,
    pub seed: Option<u64>,
    pub oracle_diff: Option<f64>,
}

impl SurfaceRecord {
    /// Rounds every real field to the CSV precision.
    pub fn quantized(self) -> Self {
        let r = round_sig;
        let o = |v: Option<f64>| v.map(round_sig);
        Self {
            p: r(self.p),
            q: r(self.q),
            success_recorded: r(self.success_recorded),
            success_true: r(self.success_true),
            fidelity: o(self.fidelity),
            hellinger: o(self.hellinger),
            stderr: o(self.stderr),
            oracle_diff: o(self.oracle_diff),
            ..self
        }
    }

    fn fields(&self) -> [String; 12] {
        let o = |v: Option<f64>| v.map(format_sig).unwrap_or_default();
        let u = |v: Option<u64>| v.map(|x| x.to_string()).unwrap_or_default();
        [
            self.scheme.as_str().to_string(),
            self.n.to_string(),
            format_sig(self.p),
            format_sig(self.q),
            format_sig(self.success_recorded),
            format_sig(self.success_true),
            o(self.fidelity),
            o(self.hellinger),
            o(self.stderr),
            u(self.shots),
            u(self.seed),
            o(self.oracle_diff),
        ]
    }
}

/// Formats `x` with [`SIGNIFICANT_DIGITS`] significant digits, trailing
/// zeros removed; plain decimal for `1e-4 ≤ |x| < 1e12`, otherwise exponent form.
pub fn format_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    let s = if (-4..12).contains(&exp) {
        let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        let s = format!("{x:.prec$e}", prec = SIGNIFICANT_DIGITS - 1);
        let (mantissa, e) = s.split_once('e').expect("exponent form");
        let mantissa = mantissa.trim_end_matches('0').trim_end_matches('.');
        format!("{mantissa}e{e}")
    };
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

pub fn round_sig(x: f64) -> f64 {
    format_sig(x).parse().unwrap_or(x)
}

pub fn write_csv<W: Write>(out: W, records: &[SurfaceRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record(r.fields())?;
    }
    w.flush()?;
    Ok(())
}

pub fn to_csv_string(records: &[SurfaceRecord]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(&mut buf, records)?;
    Ok(String::from_utf8(buf).expect("CSV output is UTF-8"))
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<SurfaceRecord>> {
    let mut rdr = csv::Reader::from_reader(input);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        return Err(Error::Parse { line: 1, msg: format!("unexpected header {header:?}") });
    }
    let mut out = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let row = row?;
        let line = i + 2;
        let bad = |col: &str, v: &str| Error::Parse { line, msg: format!("bad {col} '{v}'") };
        let real = |k: usize| row[k].parse::<f64>().map_err(|_| bad(CSV_HEADER[k], &row[k]));
        let opt_real = |k: usize| if row[k].is_empty() { Ok(None) } else { real(k).map(Some) };
        let opt_int = |k: usize| {
            if row[k].is_empty() {
                Ok(None)
            } else {
                row[k].parse::<u64>().map(Some).map_err(|_| bad(CSV_HEADER[k], &row[k]))
            }
        };
        out.push(SurfaceRecord {
            scheme: row[0].parse().map_err(|_| bad("scheme", &row[0]))?,
            n: row[1].parse().map_err(|_| bad("n", &row[1]))?,
            p: real(2)?,
            q: real(3)?,
            success_recorded: real(4)?,
            success_true: real(5)?,
            fidelity: opt_real(6)?,
            hellinger: opt_real(7)?,
            stderr: opt_real(8)?,
            shots: opt_int(9)?,
            seed: opt_int(10)?,
            oracle_diff: opt_real(11)?,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(format_sig(0.5), "0.5");
        assert_eq!(format_sig(1.0), "1");
        assert_eq!(format_sig(2.0 / 3.0), "0.666666666667");
        assert_eq!(format_sig(123.456), "123.456");
        assert_eq!(format_sig(1.5e-13), "1.5e-13");
        assert_eq!(format_sig(-1e-20 * 0.0), "0");
        assert_eq!(format_sig(0.000123456789012345), "0.000123456789012");
    }

    #[test]
    fn round_sig_is_idempotent() {
        for x in [1.0 / 3.0, 0.1 + 0.2, 9.99999999999951e-1, 1.234567890123456e-9] {
            let r = round_sig(x);
            assert_eq!(round_sig(r), r);
        }
    }

    #[test]
    fn header_mismatch_is_rejected() {
        let text = "scheme,n\nswap,3\n";
        assert!(matches!(read_csv(text.as_bytes()), Err(Error::Parse { line: 1, .. })));
    }
}
