//! The `.gre` text format.
//!
//! ```text
//! # 3 + u + u^-1 over Z
//! group Z^1
//! 3 0
//! 1 1
//! 1 -1
//! ```
//!
//! The first significant line names the group; every further line is a
//! coefficient (integer or `p/q`) followed by the element's coordinates.
//! Free-group elements are written as words such as `a b a^-1`, the empty
//! word as `e`. A single `p/q` coefficient makes the whole element rational;
//! rational elements serialise every coefficient as `p/q`.

use std::fmt::Write;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::{RingElement, Scalar, ScalarDomain};
use crate::error::{Error, Result};
use crate::groups::{GroupDescriptor, GroupElement, LETTER_A, LETTER_B};

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_coefficient(token: &str, line: usize) -> Result<(BigRational, bool)> {
    if let Some((p, q)) = token.split_once('/') {
        let p: BigInt = p.parse().map_err(|_| parse_err(line, format!("bad numerator `{p}`")))?;
        let q: BigInt = q.parse().map_err(|_| parse_err(line, format!("bad denominator `{q}`")))?;
        if q.is_zero() {
            return Err(parse_err(line, "zero denominator"));
        }
        Ok((BigRational::new(p, q), true))
    } else {
        let v: BigInt = token
            .parse()
            .map_err(|_| parse_err(line, format!("bad coefficient `{token}`")))?;
        Ok((BigRational::from_integer(v), false))
    }
}

fn parse_letter(token: &str, line: usize) -> Result<Option<i64>> {
    let code = match token {
        "e" => return Ok(None),
        "a" => LETTER_A,
        "a^-1" => -LETTER_A,
        "b" => LETTER_B,
        "b^-1" => -LETTER_B,
        other => return Err(parse_err(line, format!("bad free-group letter `{other}`"))),
    };
    Ok(Some(code))
}

fn parse_element(
    descriptor: &GroupDescriptor,
    tokens: &[&str],
    line: usize,
) -> Result<GroupElement> {
    let coords: Vec<i64> = match descriptor {
        GroupDescriptor::FreeGroupRank2 => {
            let mut word = Vec::new();
            for t in tokens {
                word.extend(parse_letter(t, line)?);
            }
            word
        }
        _ => tokens
            .iter()
            .map(|t| t.parse::<i64>().map_err(|_| parse_err(line, format!("bad coordinate `{t}`"))))
            .collect::<Result<_>>()?,
    };
    descriptor
        .element(&coords)
        .map_err(|e| parse_err(line, e.to_string()))
}

/// Parses `.gre` text. Errors carry the 1-based line number.
pub fn parse_ring_element(text: &str) -> Result<RingElement> {
    let mut descriptor: Option<GroupDescriptor> = None;
    let mut raw: Vec<(GroupElement, BigRational)> = Vec::new();
    let mut rational = false;
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = content.split_whitespace().collect();
        match &descriptor {
            None => {
                if tokens.len() != 2 || tokens[0] != "group" {
                    return Err(parse_err(lineno, "expected `group <descriptor>`"));
                }
                descriptor = Some(
                    tokens[1]
                        .parse()
                        .map_err(|_| parse_err(lineno, format!("unknown group `{}`", tokens[1])))?,
                );
            }
            Some(d) => {
                let (c, is_ratio) = parse_coefficient(tokens[0], lineno)?;
                rational |= is_ratio;
                raw.push((parse_element(d, &tokens[1..], lineno)?, c));
            }
        }
    }
    let descriptor = descriptor.ok_or_else(|| parse_err(0, "missing `group` line"))?;
    if rational {
        RingElement::from_terms(
            descriptor,
            ScalarDomain::ExactRational,
            raw.into_iter().map(|(g, c)| (g, Scalar::Rat(c))),
        )
    } else {
        RingElement::from_terms(
            descriptor,
            ScalarDomain::ExactInteger,
            raw.into_iter().map(|(g, c)| (g, Scalar::Int(c.to_integer()))),
        )
    }
}

fn format_element(descriptor: &GroupDescriptor, g: &GroupElement) -> String {
    match descriptor {
        GroupDescriptor::FreeGroupRank2 if g.coords().is_empty() => "e".to_string(),
        GroupDescriptor::FreeGroupRank2 => g
            .coords()
            .iter()
            .map(|&l| match l {
                LETTER_A => "a",
                l if l == -LETTER_A => "a^-1",
                LETTER_B => "b",
                _ => "b^-1",
            })
            .collect::<Vec<_>>()
            .join(" "),
        _ => g
            .coords()
            .iter()
            .map(i64::to_string)
            .collect::<Vec<_>>()
            .join(" "),
    }
}

/// Canonical `.gre` text: terms in element order, no comments.
pub fn serialize_ring_element(f: &RingElement) -> Result<String> {
    if f.domain() == ScalarDomain::ComplexFloat {
        return Err(Error::ScalarDomainMismatch(
            "complex coefficients have no .gre representation".into(),
        ));
    }
    let mut out = format!("group {}\n", f.descriptor());
    for (g, c) in f.terms() {
        writeln!(out, "{} {}", c, format_element(f.descriptor(), g)).expect("string write");
    }
    Ok(out)
}
