//! Plain-text matrix format: a `rows cols` header followed by row-major
//! entries written as `num` or `num/den`. `#` starts a comment.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::{ExactMatrix, Rat};

/// Whitespace tokens with their 1-based line numbers, comments stripped.
#[derive(Clone, Debug)]
pub struct Tokens {
    items: Vec<(usize, String)>,
    pos: usize,
}

impl Tokens {
    pub fn new(text: &str) -> Self {
        Self::from_lines(text.lines().enumerate().map(|(i, l)| (i + 1, l)))
    }

    pub fn from_lines<'a>(lines: impl IntoIterator<Item = (usize, &'a str)>) -> Self {
        let items = lines
            .into_iter()
            .flat_map(|(n, line)| {
                let body = line.split('#').next().unwrap_or("");
                body.split_whitespace()
                    .map(move |t| (n, t.to_string()))
                    .collect::<Vec<_>>()
            })
            .collect();
        Tokens { items, pos: 0 }
    }

    pub fn is_empty(&self) -> bool {
        self.pos >= self.items.len()
    }

    pub fn line(&self) -> usize {
        self.items
            .get(self.pos)
            .or(self.items.last())
            .map_or(0, |t| t.0)
    }

    pub fn next_token(&mut self) -> Result<(usize, &str)> {
        let line = self.line();
        let t = self.items.get(self.pos).ok_or(Error::Parse {
            line,
            msg: "unexpected end of input".into(),
        })?;
        self.pos += 1;
        Ok((t.0, t.1.as_str()))
    }

    pub fn peek(&self) -> Option<&str> {
        self.items.get(self.pos).map(|t| t.1.as_str())
    }

    pub fn next_usize(&mut self) -> Result<usize> {
        let (line, t) = self.next_token()?;
        t.parse().map_err(|_| Error::Parse {
            line,
            msg: format!("expected a count, got `{t}`"),
        })
    }

    pub fn next_rational(&mut self) -> Result<Rat> {
        let (line, t) = self.next_token()?;
        parse_rational(t).map_err(|msg| Error::Parse { line, msg })
    }

    /// Reads one `rows cols` block.
    pub fn next_matrix(&mut self) -> Result<ExactMatrix> {
        let line = self.line();
        let rows = self.next_usize()?;
        let cols = self.next_usize()?;
        if rows == 0 || cols == 0 {
            return Err(Error::Parse {
                line,
                msg: format!("empty shape {rows}x{cols}"),
            });
        }
        let data = (0..rows * cols)
            .map(|_| self.next_rational())
            .collect::<Result<Vec<_>>>()?;
        ExactMatrix::new(rows, cols, data)
    }
}

pub fn parse_rational(t: &str) -> std::result::Result<Rat, String> {
    let bad = || format!("expected `num` or `num/den`, got `{t}`");
    match t.split_once('/') {
        None => t
            .parse::<BigInt>()
            .map(Rat::from_integer)
            .map_err(|_| bad()),
        Some((n, d)) => {
            let n: BigInt = n.parse().map_err(|_| bad())?;
            let d: BigInt = d.parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(format!("zero denominator in `{t}`"));
            }
            Ok(Rat::new(n, d))
        }
    }
}

/// Parses a text holding exactly one matrix.
pub fn parse_matrix(text: &str) -> Result<ExactMatrix> {
    let mut tokens = Tokens::new(text);
    let m = tokens.next_matrix()?;
    if !tokens.is_empty() {
        return Err(Error::Parse {
            line: tokens.line(),
            msg: "trailing tokens after matrix".into(),
        });
    }
    Ok(m)
}

pub fn format_matrix(m: &ExactMatrix) -> String {
    let mut out = format!("{} {}\n", m.rows(), m.cols());
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(ToString::to_string).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::arith::{frac, rat};

    #[test]
    fn parses_fractions_and_comments() {
        let m = parse_matrix("# a form\n2 2\n1 1/2 # first row\n-3/6 0\n").unwrap();
        assert_eq!(*m.get(0, 1), frac(1, 2));
        assert_eq!(*m.get(1, 0), frac(-1, 2));
        assert_eq!(*m.get(1, 1), rat(0));
    }

    #[test]
    fn format_round_trips() {
        let m = parse_matrix("2 3\n1 2/3 -4\n0 5/7 1\n").unwrap();
        assert_eq!(parse_matrix(&format_matrix(&m)).unwrap(), m);
    }

    #[test]
    fn errors_carry_line_numbers() {
        match parse_matrix("2 2\n1 2\n3 x\n") {
            Err(Error::Parse { line: 3, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_matrix("2 2\n1 2\n3"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(parse_matrix("1 1\n1/0"), Err(Error::Parse { .. })));
        assert!(matches!(parse_matrix("1 1\n1 2"), Err(Error::Parse { .. })));
    }
}
