//! The `qmux-cfg 1` text format.
//!
//! ```text
//! qmux-cfg 1
//! blocks 3
//! photon 0: 0 1
//! photon 1: 1 2
//! photon 2: 2 0
//! ```
//!
//! Blank lines and lines starting with `#` are ignored anywhere in the file.
//! Photon ids are 0-based and must appear in order.

use std::path::Path;

use super::MultiplexConfig;
use crate::error::{Error, Result};

pub const CFG_MAGIC: &str = "qmux-cfg 1";

pub fn format_config(config: &MultiplexConfig) -> String {
    let mut out = format!("{CFG_MAGIC}\nblocks {}\n", config.num_blocks());
    for (j, slots) in config.photon_slots().iter().enumerate() {
        out.push_str(&format!("photon {j}:"));
        for b in slots {
            out.push_str(&format!(" {b}"));
        }
        out.push('\n');
    }
    out
}

pub fn read_config_file(path: impl AsRef<Path>) -> Result<MultiplexConfig> {
    let text = std::fs::read_to_string(path.as_ref())
        .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<MultiplexConfig> {
    let err = |line: usize, reason: String| Error::Parse { line, reason };
    let mut lines = text
        .split('\n')
        .enumerate()
        .map(|(i, l)| (i + 1, l.strip_suffix('\r').unwrap_or(l)))
        .filter(|(_, l)| {
            let t = l.trim();
            !t.is_empty() && !t.starts_with('#')
        });

    let (ln, magic) = lines
        .next()
        .ok_or_else(|| err(1, format!("empty file, expected `{CFG_MAGIC}`")))?;
    if magic.trim() != CFG_MAGIC {
        return Err(err(ln, format!("expected `{CFG_MAGIC}`, found `{}`", magic.trim())));
    }

    let (blocks_line, decl) = lines
        .next()
        .ok_or_else(|| err(ln, "missing `blocks <B>` line".into()))?;
    let num_blocks = match decl.split_whitespace().collect::<Vec<_>>()[..] {
        ["blocks", n] => n
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| err(blocks_line, format!("invalid block count `{n}`")))?,
        _ => {
            return Err(err(
                blocks_line,
                format!("expected `blocks <B>`, found `{}`", decl.trim()),
            ))
        }
    };

    let mut slots: Vec<Vec<usize>> = Vec::new();
    let mut used = vec![false; num_blocks];
    let mut last_line = blocks_line;
    for (ln, line) in lines {
        last_line = ln;
        let (head, body) = line
            .split_once(':')
            .ok_or_else(|| err(ln, "expected `photon <id>: <blocks...>`".into()))?;
        let id = match head.split_whitespace().collect::<Vec<_>>()[..] {
            ["photon", id] => id
                .parse::<usize>()
                .map_err(|_| err(ln, format!("invalid photon id `{id}`")))?,
            _ => return Err(err(ln, format!("expected `photon <id>:`, found `{}`", head.trim()))),
        };
        if id != slots.len() {
            return Err(err(
                ln,
                format!("photon id {id} out of sequence, expected {}", slots.len()),
            ));
        }
        let mut photon = Vec::new();
        for tok in body.split_whitespace() {
            let b: usize = tok
                .parse()
                .map_err(|_| err(ln, format!("invalid block index `{tok}`")))?;
            if b >= num_blocks {
                return Err(err(
                    ln,
                    format!("block index {b} out of range (blocks {num_blocks})"),
                ));
            }
            used[b] = true;
            photon.push(b);
        }
        if photon.is_empty() {
            return Err(err(ln, format!("photon {id} carries no qubit")));
        }
        slots.push(photon);
    }
    if slots.is_empty() {
        return Err(err(last_line, "no photon lines".into()));
    }
    if let Some(b) = used.iter().position(|u| !u) {
        return Err(err(blocks_line, format!("block {b} holds no qubit")));
    }
    MultiplexConfig::new(num_blocks, slots).map_err(|e| match e {
        Error::Contract(reason) => err(last_line, reason),
        other => other,
    })
}
