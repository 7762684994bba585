//! `lattice ell=<p>` and `form kind=<kind> ell=<p>` blocks, each followed by
//! one matrix in the linear-algebra text format.

use super::{BilinearForm, FormKind, Lattice};
use crate::error::{Error, Result};
use crate::linalg::text::{format_matrix, Tokens};

fn keyed<'a>(tokens: &'a mut Tokens, key: &str) -> Result<(usize, &'a str)> {
    let (line, t) = tokens.next_token()?;
    match t.split_once('=') {
        Some((k, v)) if k == key => Ok((line, v)),
        _ => Err(Error::Parse {
            line,
            msg: format!("expected `{key}=...`, got `{t}`"),
        }),
    }
}

fn ell_value(tokens: &mut Tokens) -> Result<u64> {
    let (line, v) = keyed(tokens, "ell")?;
    v.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("bad prime `{v}`"),
    })
}

fn expect_word(tokens: &mut Tokens, word: &str) -> Result<()> {
    let (line, t) = tokens.next_token()?;
    if t != word {
        return Err(Error::Parse {
            line,
            msg: format!("expected `{word}`, got `{t}`"),
        });
    }
    Ok(())
}

fn finish(tokens: &Tokens) -> Result<()> {
    if tokens.is_empty() {
        Ok(())
    } else {
        Err(Error::Parse {
            line: tokens.line(),
            msg: "trailing tokens".into(),
        })
    }
}

pub fn read_lattice(tokens: &mut Tokens) -> Result<Lattice> {
    expect_word(tokens, "lattice")?;
    let ell = ell_value(tokens)?;
    Lattice::new(tokens.next_matrix()?, ell)
}

pub fn read_form(tokens: &mut Tokens) -> Result<BilinearForm> {
    expect_word(tokens, "form")?;
    let (line, kind) = keyed(tokens, "kind")?;
    let kind: FormKind = kind.parse().map_err(|e: Error| Error::Parse {
        line,
        msg: e.to_string(),
    })?;
    let ell = ell_value(tokens)?;
    BilinearForm::new(tokens.next_matrix()?, kind, ell)
}

pub fn parse_lattice(text: &str) -> Result<Lattice> {
    let mut t = Tokens::new(text);
    let l = read_lattice(&mut t)?;
    finish(&t)?;
    Ok(l)
}

pub fn parse_form(text: &str) -> Result<BilinearForm> {
    let mut t = Tokens::new(text);
    let f = read_form(&mut t)?;
    finish(&t)?;
    Ok(f)
}

pub fn format_lattice(l: &Lattice) -> String {
    format!("lattice ell={}\n{}", l.ell(), format_matrix(l.basis()))
}

pub fn format_form(f: &BilinearForm) -> String {
    format!(
        "form kind={} ell={}\n{}",
        f.kind().as_str(),
        f.ell(),
        format_matrix(f.gram())
    )
}
