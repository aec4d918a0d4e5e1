use std::path::Path;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use fkdet::{folner_window, parse_ring_element, FolnerWindow, GroupDescriptor, RingElement};
use num_bigint::BigInt;

/// Reads an element from a `.gre` file, or from inline text where `;`
/// separates lines (`--f "3 0; 1 1; 1 -1" --group Z^1`).
pub fn load_element(source: &str, group: Option<&str>) -> Result<RingElement> {
    let path = Path::new(source);
    let text = if path.is_file() {
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?
    } else if source.ends_with(".gre") {
        bail!("element file {source} does not exist");
    } else {
        source.replace(';', "\n")
    };
    let has_group = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'))
        .is_some_and(|l| l.starts_with("group"));
    let (text, offset) = match (has_group, group) {
        (false, Some(g)) => (format!("group {g}\n{text}"), 1),
        (false, None) => bail!("no group given: add a `group` line or pass --group"),
        (true, _) => (text, 0),
    };
    // Line numbers refer to the caller's text, not the prepended group line.
    let f = parse_ring_element(&text).map_err(|e| match e {
        fkdet::Error::Parse { line, message } if line > offset => fkdet::Error::Parse {
            line: line - offset,
            message,
        },
        e => e,
    })?;
    if let Some(g) = group {
        let wanted = GroupDescriptor::from_str(g)?;
        if &wanted != f.descriptor() {
            return Err(fkdet::Error::DescriptorMismatch(format!(
                "--group {wanted} but the element is over {}",
                f.descriptor()
            ))
            .into());
        }
    }
    Ok(f)
}

/// Window levels: `10,100,1000` or an inclusive range `4..6`.
pub fn parse_levels(text: &str) -> Result<Vec<usize>> {
    let text = text.trim();
    let levels: Vec<usize> = if let Some((a, b)) = text.split_once("..") {
        let a: usize = a.trim().parse().with_context(|| format!("bad range start in `{text}`"))?;
        let b: usize = b.trim().parse().with_context(|| format!("bad range end in `{text}`"))?;
        (a..=b).collect()
    } else {
        text.split(',')
            .map(|t| t.trim().parse::<usize>().with_context(|| format!("bad level `{t}`")))
            .collect::<Result<_>>()?
    };
    if levels.is_empty() {
        bail!("empty schedule `{text}`");
    }
    Ok(levels)
}

pub fn schedule(f: &RingElement, text: &str) -> Result<Vec<FolnerWindow>> {
    parse_levels(text)?
        .into_iter()
        .map(|n| Ok(folner_window(f.descriptor(), n)?))
        .collect()
}

/// A coordinate box `lo..hi` (the same range in every coordinate) or
/// `lo1,lo2..hi1,hi2`.
pub fn parse_box(group: &GroupDescriptor, text: &str) -> Result<FolnerWindow> {
    let arity = group.arity().context("boxes need a group with coordinates")?;
    let (lo, hi) = text.split_once("..").with_context(|| format!("box `{text}` is not lo..hi"))?;
    let coords = |s: &str| -> Result<Vec<i64>> {
        let v: Vec<i64> = s
            .split(',')
            .map(|t| t.trim().parse::<i64>().with_context(|| format!("bad coordinate `{t}` in `{text}`")))
            .collect::<Result<_>>()?;
        match v.len() {
            1 => Ok(vec![v[0]; arity]),
            n if n == arity => Ok(v),
            n => bail!("box `{text}` has {n} coordinates, {group} needs {arity}"),
        }
    };
    Ok(FolnerWindow::coordinate_box(group.clone(), coords(lo)?, coords(hi)?)?)
}

/// Integer matrix rows from CSV (commas or whitespace).
pub fn load_matrix(path: &str) -> Result<Vec<Vec<BigInt>>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row: Vec<BigInt> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<BigInt>()
                    .map_err(|_| fkdet::Error::Parse { line: i + 1, message: format!("bad integer `{t}`") })
            })
            .collect::<std::result::Result<_, _>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        bail!("{path} holds no matrix rows");
    }
    Ok(rows)
}

/// A pair `a,b`.
pub fn parse_pair(text: &str) -> Result<(f64, f64)> {
    let (a, b) = text.split_once(',').with_context(|| format!("`{text}` is not a,b"))?;
    Ok((a.trim().parse()?, b.trim().parse()?))
}
