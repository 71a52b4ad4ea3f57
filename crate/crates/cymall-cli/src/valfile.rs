//! Parser for valuation files — the inverse of [`Valuation`]'s display.
//!
//! A file is a sequence of lines; blank lines and `#` comments are
//! skipped.  Carriers must be declared before the relations that use
//! them:
//!
//! ```text
//! # two points and a singleton
//! carrier A = 2
//! carrier B = 1
//! rel R : A -> B = {(0,0), (1,0)}
//! rel S : B -> A = {}
//! ```
//!
//! The output of `model search` is in exactly this format, so a witness
//! can be fed straight back into `model check --val`.

use cymall::{Rel, Valuation};

/// Parses the textual valuation format; errors carry the line number.
pub fn parse_valuation(src: &str) -> Result<Valuation, String> {
    let mut v = Valuation::new();
    for (idx, raw) in src.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let at = |msg: String| format!("line {}: {msg}", idx + 1);
        if let Some(rest) = line.strip_prefix("carrier ") {
            let (name, size) = rest
                .split_once('=')
                .ok_or_else(|| at("expected `carrier NAME = SIZE`".into()))?;
            let size: usize = size
                .trim()
                .parse()
                .map_err(|_| at(format!("bad carrier size `{}`", size.trim())))?;
            v.set_carrier(name.trim(), size).map_err(|e| at(e.to_string()))?;
        } else if let Some(rest) = line.strip_prefix("rel ") {
            let (head, pairs) = rest
                .split_once('=')
                .ok_or_else(|| at("expected `rel NAME : A -> B = {(i,j), ...}`".into()))?;
            let (var, endpoints) = head
                .split_once(':')
                .ok_or_else(|| at("expected `NAME : A -> B` before `=`".into()))?;
            let (dom, cod) = endpoints
                .split_once("->")
                .ok_or_else(|| at("expected `A -> B` endpoints".into()))?;
            let carrier = |name: &str| {
                v.carrier(name.trim())
                    .ok_or_else(|| at(format!("carrier `{}` is not declared", name.trim())))
            };
            let rel = Rel::from_pairs(carrier(dom)?, carrier(cod)?, &parse_pairs(pairs, &at)?)
                .map_err(|e| at(e.to_string()))?;
            v.set_rel(var.trim(), rel).map_err(|e| at(e.to_string()))?;
        } else {
            return Err(at("expected a `carrier` or `rel` line".into()));
        }
    }
    Ok(v)
}

/// Parses `{(0,1), (2,0)}` (whitespace-insensitive; `{}` is empty).
fn parse_pairs(
    src: &str,
    at: &dyn Fn(String) -> String,
) -> Result<Vec<(usize, usize)>, String> {
    let body = src.trim();
    let body = body
        .strip_prefix('{')
        .and_then(|b| b.strip_suffix('}'))
        .ok_or_else(|| at(format!("expected a braced pair set, got `{body}`")))?;
    let mut pairs = Vec::new();
    for chunk in body.split('(').skip(1) {
        let inner = chunk
            .split_once(')')
            .ok_or_else(|| at("unclosed `(` in pair set".into()))?
            .0;
        let (i, j) = inner
            .split_once(',')
            .ok_or_else(|| at(format!("expected `i,j` inside parentheses, got `{inner}`")))?;
        let num = |s: &str| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| at(format!("bad index `{}`", s.trim())))
        };
        pairs.push((num(i)?, num(j)?));
    }
    Ok(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_displayed_valuations() {
        let src = "# comment\ncarrier A = 2\ncarrier B = 1\n\nrel R : A -> B = {(0,0), (1,0)}\nrel S : B -> A = {}\n";
        let v = parse_valuation(src).unwrap();
        let again = parse_valuation(&v.to_string()).unwrap();
        assert_eq!(v, again);
        assert_eq!(v.rel("R").unwrap().pairs(), vec![(0, 0), (1, 0)]);
        assert!(v.rel("S").unwrap().is_empty());
    }

    #[test]
    fn reports_line_numbers() {
        let err = parse_valuation("carrier A = 1\nrel R : A -> Z = {}\n").unwrap_err();
        assert!(err.starts_with("line 2:"), "{err}");
        assert!(err.contains("`Z`"), "{err}");
        assert!(parse_valuation("nonsense\n").unwrap_err().starts_with("line 1:"));
        assert!(parse_valuation("carrier A = x\n").unwrap_err().contains("bad carrier size"));
        assert!(parse_valuation("carrier A = 1\nrel R : A -> A = {(0,2)}\n")
            .unwrap_err()
            .contains("outside"));
    }
}
