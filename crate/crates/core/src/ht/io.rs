//! Plain-text network format.
//!
//! ```text
//! imgtn-ht 1
//! n=4 input=4 form=generalized
//! channels=2 3 ... 1
//! ranks 1 2 2 ...
//! ...
//! leaf 1 1 1
//! 0 1
//! node 2 1 1 0
//! <generalized: l_{i-1} rows of l_{i-1} values; diagonal: one row>
//! ```
//!
//! Blocks follow `(i, j, k, m)` order.

use std::fmt::Write as _;
use std::path::Path;

use super::{Form, HtNetwork, TreeIndex};
use crate::error::{Error, Result};

const MAGIC: &str = "imgtn-ht 1";

fn join<T: ToString>(xs: impl IntoIterator<Item = T>) -> String {
    xs.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

pub fn write_ht(net: &HtNetwork) -> String {
    let mut out = String::new();
    let tree = net.tree();
    let _ = writeln!(
        out,
        "{MAGIC}\nn={} input={} form={}\nchannels={}",
        net.side(),
        net.input_side(),
        net.form().name(),
        join(net.channels())
    );
    for (i, ranks) in net.node_ranks().iter().enumerate() {
        let _ = writeln!(out, "ranks {} {}", i + 1, join(ranks));
    }
    for (node, map) in tree.layer(1).iter().zip(net.leaves()) {
        let _ = writeln!(out, "leaf 1 {} {}\n{}", node.j, node.k, join(map));
    }
    for i in 2..=tree.layer_count() {
        let inp = net.channels()[i - 2];
        let out_width = net.channels()[i - 1];
        for (node, p) in tree.layer(i).iter().zip(&net.params()[i - 2]) {
            let per_channel = p.len() / out_width;
            for m in 0..out_width {
                let _ = writeln!(out, "node {i} {} {} {}", node.j, node.k, m + 1);
                let block = &p[m * per_channel..(m + 1) * per_channel];
                let width = match net.form() {
                    Form::Generalized => inp,
                    Form::Diagonal => per_channel,
                };
                for row in block.chunks(width) {
                    let _ = writeln!(out, "{}", join(row.iter().map(|v| format!("{v}"))));
                }
            }
        }
    }
    out
}

pub fn save_ht(net: &HtNetwork, path: &Path) -> Result<()> {
    std::fs::write(path, write_ht(net))?;
    Ok(())
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

struct Lines<'a> {
    inner: Box<dyn Iterator<Item = (usize, &'a str)> + 'a>,
}

impl<'a> Lines<'a> {
    fn next(&mut self, what: &str) -> Result<(usize, &'a str)> {
        self.inner
            .next()
            .ok_or_else(|| parse_err(0, format!("unexpected end of input, expected {what}")))
    }

    fn expect(&mut self, header: &str) -> Result<()> {
        let (no, l) = self.next(header)?;
        if l != header {
            return Err(parse_err(no, format!("expected {header:?}, got {l:?}")));
        }
        Ok(())
    }

    fn numbers<T: std::str::FromStr>(&mut self, what: &str, count: usize) -> Result<Vec<T>> {
        let (no, l) = self.next(what)?;
        let values: Vec<T> = l
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| parse_err(no, format!("bad value {t:?}"))))
            .collect::<Result<_>>()?;
        if values.len() != count {
            return Err(parse_err(no, format!("{what}: expected {count} values, got {}", values.len())));
        }
        Ok(values)
    }
}

fn key_value<'a>(no: usize, token: &'a str, key: &str) -> Result<&'a str> {
    token
        .strip_prefix(key)
        .and_then(|t| t.strip_prefix('='))
        .ok_or_else(|| parse_err(no, format!("expected {key}=")))
}

pub fn parse_ht(text: &str) -> Result<HtNetwork> {
    let mut lines = Lines {
        inner: Box::new(
            text.lines()
                .enumerate()
                .map(|(i, l)| (i + 1, l.trim()))
                .filter(|(_, l)| !l.is_empty() && !l.starts_with('#')),
        ),
    };
    lines.expect(MAGIC)?;

    let (no, header) = lines.next("header")?;
    let tokens: Vec<&str> = header.split_whitespace().collect();
    if tokens.len() != 3 {
        return Err(parse_err(no, "expected n=, input= and form="));
    }
    let n: usize = key_value(no, tokens[0], "n")?.parse().map_err(|_| parse_err(no, "bad n"))?;
    let input: usize = key_value(no, tokens[1], "input")?
        .parse()
        .map_err(|_| parse_err(no, "bad input side"))?;
    let form = match key_value(no, tokens[2], "form")? {
        "generalized" => Form::Generalized,
        "diagonal" => Form::Diagonal,
        other => return Err(parse_err(no, format!("unknown form {other:?}"))),
    };
    if input == 0 || input > n || input.next_power_of_two().max(2) != n {
        return Err(parse_err(no, format!("input side {input} does not pad to {n}")));
    }
    let tree = super::tree_structure(n)?;
    let layers = tree.layer_count();

    let (no, l) = lines.next("channels")?;
    let channels: Vec<usize> = key_value(no, l, "channels")?
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| parse_err(no, format!("bad channel count {t:?}"))))
        .collect::<Result<_>>()?;
    if channels.len() != layers || channels.contains(&0) {
        return Err(parse_err(no, format!("expected {layers} positive channel counts")));
    }

    let mut node_ranks = Vec::with_capacity(layers);
    for i in 1..=layers {
        let (no, l) = lines.next("ranks")?;
        let prefix = format!("ranks {i}");
        let rest = l
            .strip_prefix(&prefix)
            .ok_or_else(|| parse_err(no, format!("expected {prefix:?}")))?;
        let ranks: Vec<usize> = rest
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| parse_err(no, format!("bad rank {t:?}"))))
            .collect::<Result<_>>()?;
        if ranks.len() != tree.layer_len(i) {
            return Err(parse_err(no, format!("layer {i}: expected {} ranks", tree.layer_len(i))));
        }
        node_ranks.push(ranks);
    }

    let mut leaves = Vec::with_capacity(n * n);
    for node in tree.layer(1) {
        lines.expect(&format!("leaf 1 {} {}", node.j, node.k))?;
        leaves.push(lines.numbers::<u8>("leaf map", channels[0])?);
    }

    let mut params = Vec::with_capacity(layers - 1);
    for i in 2..=layers {
        let inp = channels[i - 2];
        let (rows, width) = match form {
            Form::Generalized => (inp, inp),
            Form::Diagonal => (1, inp),
        };
        let mut layer = Vec::with_capacity(tree.layer_len(i));
        for TreeIndex { j, k, .. } in tree.layer(i) {
            let mut p = Vec::with_capacity(channels[i - 1] * rows * width);
            for m in 1..=channels[i - 1] {
                lines.expect(&format!("node {i} {j} {k} {m}"))?;
                for _ in 0..rows {
                    p.extend(lines.numbers::<f64>("parameters", width)?);
                }
            }
            layer.push(p);
        }
        params.push(layer);
    }
    if let Some((no, _)) = lines.inner.next() {
        return Err(parse_err(no, "trailing content"));
    }

    let mut net = HtNetwork::from_parts(n, form, channels, leaves, params)?;
    net.input_side = input;
    net.node_ranks = node_ranks;
    Ok(net)
}

pub fn load_ht(path: &Path) -> Result<HtNetwork> {
    parse_ht(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ht::{diagonalize, ht_from_family};
    use crate::images::{gen_rectangle_outlines, gen_vertical_bars};

    #[test]
    fn round_trip_both_forms() {
        let f = gen_rectangle_outlines(4, 3).unwrap();
        let net = ht_from_family(&f, 1e-9).unwrap();
        for candidate in [net.clone(), diagonalize(&net).unwrap()] {
            let text = write_ht(&candidate);
            let back = parse_ht(&text).unwrap();
            assert_eq!(back, candidate);
            assert_eq!(write_ht(&back), text);
        }
    }

    #[test]
    fn keeps_padding() {
        let f = gen_vertical_bars(3, 2).unwrap();
        let net = ht_from_family(&f, 1e-9).unwrap();
        let back = parse_ht(&write_ht(&net)).unwrap();
        assert_eq!(back.input_side(), 3);
        assert!(back.is_padded());
    }

    #[test]
    fn rejects_damage() {
        let f = gen_rectangle_outlines(4, 3).unwrap();
        let text = write_ht(&ht_from_family(&f, 1e-9).unwrap());
        assert!(parse_ht(&text.replace("form=generalized", "form=tucker")).is_err());
        assert!(parse_ht(&text.replace("input=4", "input=2")).is_err());
        assert!(parse_ht(&text.replacen("node 2 1 1 1", "node 2 1 2 1", 1)).is_err());
        assert!(parse_ht(&format!("{text}0\n")).is_err());
    }
}
