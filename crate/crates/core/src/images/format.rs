//! Text format for image families.
//!
//! ```text
//! n=<int> name=<string> seed=<int|none>
//! <n² characters in {0,1}, row-major>   one line per member
//! ```
//!
//! Lines starting with `#` and empty lines are ignored. Writing a parsed
//! file reproduces it byte for byte when it contains no comments.

use std::fs;
use std::io::Write;
use std::path::Path;

use super::{BinaryImage, FamilyMeta, ImageFamily};
use crate::error::{Error, Result};

pub fn write_family<W: Write>(family: &ImageFamily, mut w: W) -> Result<()> {
    let seed = match family.meta().seed {
        Some(s) => s.to_string(),
        None => "none".to_string(),
    };
    writeln!(
        w,
        "n={} name={} seed={}",
        family.side(),
        family.meta().name,
        seed
    )?;
    for m in family.members() {
        writeln!(w, "{m}")?;
    }
    Ok(())
}

pub fn save_family(family: &ImageFamily, path: impl AsRef<Path>) -> Result<()> {
    let mut buf = Vec::new();
    write_family(family, &mut buf)?;
    fs::write(path, buf)?;
    Ok(())
}

fn parse_header(line: &str, line_no: usize) -> Result<(usize, FamilyMeta)> {
    let err = |message: String| Error::Parse {
        line: line_no,
        message,
    };
    let mut n = None;
    let mut name = None;
    let mut seed = None;
    for field in line.split_whitespace() {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| err(format!("header field {field:?} is not key=value")))?;
        match key {
            "n" => {
                let v: usize = value
                    .parse()
                    .map_err(|_| err(format!("bad side length {value:?}")))?;
                if v == 0 {
                    return Err(err("side length must be positive".into()));
                }
                n = Some(v);
            }
            "name" => name = Some(value.to_string()),
            "seed" => {
                seed = Some(if value == "none" {
                    None
                } else {
                    Some(
                        value
                            .parse::<u64>()
                            .map_err(|_| err(format!("bad seed {value:?}")))?,
                    )
                })
            }
            other => return Err(err(format!("unknown header field {other:?}"))),
        }
    }
    match (n, name, seed) {
        (Some(n), Some(name), Some(seed)) => Ok((n, FamilyMeta { name, seed })),
        _ => Err(err("header must carry n=, name= and seed=".into())),
    }
}

pub fn parse_family(text: &str) -> Result<ImageFamily> {
    let mut family: Option<ImageFamily> = None;
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match family.as_mut() {
            None => {
                let (n, meta) = parse_header(line, line_no)?;
                family = Some(ImageFamily::new(n, meta));
            }
            Some(f) => {
                let n = f.side();
                if line.len() != n * n {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("expected {} pixels, found {}", n * n, line.len()),
                    });
                }
                let image = BinaryImage::parse(n, line).map_err(|e| Error::Parse {
                    line: line_no,
                    message: e.to_string(),
                })?;
                if !f.insert(image)? {
                    return Err(Error::Parse {
                        line: line_no,
                        message: "duplicate member".into(),
                    });
                }
            }
        }
    }
    family.ok_or(Error::Parse {
        line: 0,
        message: "missing header line".into(),
    })
}

pub fn load_family(path: impl AsRef<Path>) -> Result<ImageFamily> {
    let text = fs::read_to_string(path)?;
    parse_family(&text)
}
