//! Line-oriented text format for models.
//!
//! ```text
//! hmm <emitting_states> <symbols> <normalized:0|1>
//! <symbol> <symbol> ...            escaped: `\s` space, `\\` backslash
//! <entry costs>
//! <transition row>                 one line per emitting state
//! <exit costs>
//! <emission row>                   one line per emitting state
//! ```
//!
//! Costs are written with 17 significant digits and `inf` for forbidden
//! arcs, so finite values round-trip bit for bit.

use std::fmt::Write as _;

use super::{Cost, Hmm, INF};
use crate::error::{Error, Result};

pub fn escape_symbol(s: &str) -> Result<String> {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\n' => return Err(Error::InvalidInput("symbols cannot contain a newline".into())),
            ' ' => out.push_str("\\s"),
            '\\' => out.push_str("\\\\"),
            c => out.push(c),
        }
    }
    if out.is_empty() {
        return Err(Error::InvalidInput("symbols cannot be empty".into()));
    }
    Ok(out)
}

pub fn unescape_symbol(s: &str) -> std::result::Result<String, String> {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c == '\\' {
            match chars.next() {
                Some('s') => out.push(' '),
                Some('\\') => out.push('\\'),
                Some('n') => return Err("newline escape is not allowed".into()),
                other => {
                    return Err(format!(
                        "bad escape sequence \\{}",
                        other.map(String::from).unwrap_or_default()
                    ))
                }
            }
        } else {
            out.push(c);
        }
    }
    Ok(out)
}

pub fn format_cost(c: Cost) -> String {
    if c == INF {
        "inf".to_string()
    } else {
        format!("{c:.16e}")
    }
}

fn parse_cost(s: &str) -> Option<Cost> {
    if s == "inf" {
        return Some(INF);
    }
    s.parse::<f64>().ok().filter(|c| c.is_finite())
}

fn write_row(out: &mut String, row: &[Cost]) {
    let line: Vec<String> = row.iter().map(|&c| format_cost(c)).collect();
    out.push_str(&line.join(" "));
    out.push('\n');
}

/// Serialize `hmm` with the given symbol labels (one per symbol).
pub fn write_hmm(hmm: &Hmm, labels: &[String]) -> Result<String> {
    if labels.len() != hmm.symbol_count() {
        return Err(Error::InvalidInput(format!(
            "{} labels for {} symbols",
            labels.len(),
            hmm.symbol_count()
        )));
    }
    let mut out = String::new();
    let _ = writeln!(
        out,
        "hmm {} {} {}",
        hmm.states(),
        hmm.symbol_count(),
        u8::from(hmm.is_normalized())
    );
    let escaped = labels.iter().map(|l| escape_symbol(l)).collect::<Result<Vec<_>>>()?;
    out.push_str(&escaped.join(" "));
    out.push('\n');
    write_row(&mut out, hmm.entry_costs());
    for i in 0..hmm.states() {
        write_row(&mut out, hmm.transition_row(i));
    }
    write_row(&mut out, hmm.exit_costs());
    for j in 0..hmm.states() {
        write_row(&mut out, hmm.emission_row(j));
    }
    Ok(out)
}

/// Parse a model block from `lines`, advancing the iterator past it.
/// `first_line` is the 1-based line number of the header, for diagnostics.
pub fn read_hmm_lines<'a>(lines: &mut impl Iterator<Item = &'a str>, first_line: usize) -> Result<(Hmm, Vec<String>)> {
    let mut lineno = first_line;
    let mut next = |what: &str| -> Result<(usize, &'a str)> {
        let l = lines
            .next()
            .ok_or_else(|| Error::data(lineno, format!("unexpected end of model, expected {what}")))?;
        let n = lineno;
        lineno += 1;
        Ok((n, l))
    };
    let (n, header) = next("header")?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let (states, symbols, normalized) = match fields.as_slice() {
        ["hmm", s, m, f] => {
            let s: usize = s.parse().map_err(|_| Error::data(n, "bad state count"))?;
            let m: usize = m.parse().map_err(|_| Error::data(n, "bad symbol count"))?;
            let f = match *f {
                "0" => false,
                "1" => true,
                _ => return Err(Error::data(n, "normalized flag must be 0 or 1")),
            };
            (s, m, f)
        }
        _ => return Err(Error::data(n, "expected `hmm <states> <symbols> <0|1>`")),
    };
    let (n, sym_line) = next("symbol line")?;
    let labels = sym_line
        .split(' ')
        .map(|s| unescape_symbol(s).map_err(|e| Error::data(n, e)))
        .collect::<Result<Vec<_>>>()?;
    if labels.len() != symbols {
        return Err(Error::data(
            n,
            format!("expected {symbols} symbols, found {}", labels.len()),
        ));
    }
    let mut row = |what: &str, width: usize| -> Result<Vec<Cost>> {
        let (n, l) = next(what)?;
        let v = l
            .split_whitespace()
            .map(|t| parse_cost(t).ok_or_else(|| Error::data(n, format!("bad cost {t:?}"))))
            .collect::<Result<Vec<_>>>()?;
        if v.len() != width {
            return Err(Error::data(
                n,
                format!("{what}: expected {width} values, found {}", v.len()),
            ));
        }
        Ok(v)
    };
    let entry = row("entry costs", states)?;
    let mut transitions = Vec::with_capacity(states * states);
    for _ in 0..states {
        transitions.extend(row("transition row", states)?);
    }
    let exit = row("exit costs", states)?;
    let mut emissions = Vec::with_capacity(states * symbols);
    for _ in 0..states {
        emissions.extend(row("emission row", symbols)?);
    }
    let hmm = Hmm::from_costs(states, symbols, entry, transitions, exit, emissions, normalized)
        .map_err(|e| Error::data(first_line, e.to_string()))?;
    Ok((hmm, labels))
}

pub fn read_hmm(text: &str) -> Result<(Hmm, Vec<String>)> {
    read_hmm_lines(&mut text.lines(), 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hmm::test_models::two_state;
    use proptest::prelude::*;

    #[test]
    fn round_trip_is_bit_exact() {
        let h = two_state();
        let labels = vec![" ".to_string(), "\\".to_string()];
        let text = write_hmm(&h, &labels).unwrap();
        assert!(text.starts_with("hmm 2 2 1\n\\s \\\\\n"));
        assert!(text.contains("inf"));
        let (back, back_labels) = read_hmm(&text).unwrap();
        assert_eq!(back, h);
        assert_eq!(back_labels, labels);
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(read_hmm("hmm 1 1 2\na\n0\n0\n0\n0\n").is_err());
        assert!(read_hmm("hmm 1 1 1\na\n0\n0\n").is_err());
        assert!(read_hmm("hmm 1 1 1\na\n0\nx\n0\n0\n").is_err());
        assert!(read_hmm("hmm 1 1 1\n\\n\n0\n0\n0\n0\n").is_err());
        assert!(escape_symbol("a\nb").is_err());
    }

    proptest! {
        #[test]
        fn costs_round_trip(c in 0.0f64..1e6) {
            prop_assert_eq!(parse_cost(&format_cost(c)).unwrap().to_bits(), c.to_bits());
        }

        #[test]
        fn symbols_round_trip(s in "[ a-z\\\\]{1,5}") {
            prop_assert_eq!(unescape_symbol(&escape_symbol(&s).unwrap()).unwrap(), s);
        }
    }
}
