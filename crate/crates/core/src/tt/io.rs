//! Plain-text train format.
//!
//! ```text
//! imgtn-tt 1
//! n=3
//! bonds=1 2 ... 1
//! core 1 0
//! <l_0 lines of l_1 values>
//! core 1 1
//! ...
//! ```
//!
//! Values use the shortest representation that parses back to the same `f64`.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;

use super::TensorTrain;
use crate::error::{Error, Result};

const MAGIC: &str = "imgtn-tt 1";

pub fn write_tt(tt: &TensorTrain) -> String {
    let mut out = String::new();
    let bonds: Vec<String> = tt.bond_dims().iter().map(|l| l.to_string()).collect();
    let _ = writeln!(out, "{MAGIC}\nn={}\nbonds={}", tt.side(), bonds.join(" "));
    for (k, pair) in tt.cores().iter().enumerate() {
        for (bit, m) in pair.iter().enumerate() {
            let _ = writeln!(out, "core {} {bit}", k + 1);
            for r in 0..m.nrows() {
                let row: Vec<String> = m.row(r).iter().map(|v| format!("{v}")).collect();
                let _ = writeln!(out, "{}", row.join(" "));
            }
        }
    }
    out
}

pub fn save_tt(tt: &TensorTrain, path: &Path) -> Result<()> {
    std::fs::write(path, write_tt(tt))?;
    Ok(())
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn field<'a>(line: Option<(usize, &'a str)>, key: &str) -> Result<(usize, &'a str)> {
    let (no, text) = line.ok_or_else(|| parse_err(0, format!("missing {key} line")))?;
    let value = text
        .strip_prefix(key)
        .and_then(|t| t.strip_prefix('='))
        .ok_or_else(|| parse_err(no, format!("expected {key}=")))?;
    Ok((no, value))
}

pub fn parse_tt(text: &str) -> Result<TensorTrain> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    match lines.next() {
        Some((_, l)) if l == MAGIC => {}
        Some((no, l)) => return Err(parse_err(no, format!("unknown header {l:?}"))),
        None => return Err(parse_err(0, "empty input")),
    }
    let (no, n) = field(lines.next(), "n")?;
    let n: usize = n.parse().map_err(|_| parse_err(no, "bad side"))?;
    let (no, bonds) = field(lines.next(), "bonds")?;
    let bonds: Vec<usize> = bonds
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| parse_err(no, format!("bad bond {t:?}"))))
        .collect::<Result<_>>()?;
    if bonds.len() != n * n + 1 {
        return Err(parse_err(no, format!("expected {} bonds, got {}", n * n + 1, bonds.len())));
    }

    let mut cores = Vec::with_capacity(n * n);
    for k in 0..n * n {
        let (rows, cols) = (bonds[k], bonds[k + 1]);
        let mut pair = [DMatrix::zeros(rows, cols), DMatrix::zeros(rows, cols)];
        for (bit, m) in pair.iter_mut().enumerate() {
            let expected = format!("core {} {bit}", k + 1);
            match lines.next() {
                Some((_, l)) if l == expected => {}
                Some((no, l)) => return Err(parse_err(no, format!("expected {expected:?}, got {l:?}"))),
                None => return Err(parse_err(0, format!("missing {expected:?}"))),
            }
            for r in 0..rows {
                let (no, l) = lines
                    .next()
                    .ok_or_else(|| parse_err(0, format!("{expected}: missing row {}", r + 1)))?;
                let values: Vec<f64> = l
                    .split_whitespace()
                    .map(|t| t.parse().map_err(|_| parse_err(no, format!("bad value {t:?}"))))
                    .collect::<Result<_>>()?;
                if values.len() != cols {
                    return Err(parse_err(no, format!("expected {cols} values, got {}", values.len())));
                }
                for (c, v) in values.into_iter().enumerate() {
                    m[(r, c)] = v;
                }
            }
        }
        cores.push(pair);
    }
    if let Some((no, _)) = lines.next() {
        return Err(parse_err(no, "trailing content"));
    }
    TensorTrain::new(n, cores)
}

pub fn load_tt(path: &Path) -> Result<TensorTrain> {
    parse_tt(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::images::gen_rectangle_outlines;
    use crate::tt::tt_from_family;

    #[test]
    fn round_trip_is_exact() {
        let f = gen_rectangle_outlines(4, 3).unwrap();
        let tt = tt_from_family(&f, 1e-9).unwrap();
        let text = write_tt(&tt);
        let back = parse_tt(&text).unwrap();
        assert_eq!(back, tt);
        assert_eq!(write_tt(&back), text);
    }

    #[test]
    fn rejects_damage() {
        let f = gen_rectangle_outlines(3, 3).unwrap();
        let text = write_tt(&tt_from_family(&f, 1e-9).unwrap());
        assert!(parse_tt(&text.replace("imgtn-tt 1", "imgtn-tt 2")).is_err());
        assert!(parse_tt(&text.replacen("core 2 0", "core 3 0", 1)).is_err());
        assert!(parse_tt(&format!("{text}1\n")).is_err());
        let truncated: String = text.lines().take(6).map(|l| format!("{l}\n")).collect();
        assert!(parse_tt(&truncated).is_err());
    }
}
