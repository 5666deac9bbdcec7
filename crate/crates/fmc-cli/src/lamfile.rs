//! Lambda-term files: a header of declarations, then the term.
//!
//! ```text
//! -- comment
//! base o
//! val a b : o
//! comp k : o -> o
//! cell c : o
//! var f : o -> o
//! (\x:o. f x) a
//! ```
//!
//! `var` lines give the typing context, leftmost first.

use fmc_translate::lambda::{parse_lambda, parse_ltype, LContext, LSignature, LType, Lambda};

use crate::CliError;

#[derive(Clone, Debug)]
pub struct LambdaFile {
    pub sig: LSignature,
    pub ctx: LContext,
    pub term: Lambda,
}

fn names_and_type(rest: &str, line: usize) -> Result<(Vec<&str>, LType), CliError> {
    let (names, ty) = rest
        .split_once(':')
        .ok_or_else(|| CliError::Domain(format!("line {line}: expected `NAMES : TYPE`")))?;
    let ty = parse_ltype(ty.trim()).map_err(|e| CliError::Domain(format!("line {line}: {e}")))?;
    let names: Vec<&str> = names.split_whitespace().collect();
    if names.is_empty() {
        return Err(CliError::Domain(format!("line {line}: no names declared")));
    }
    Ok((names, ty))
}

pub fn parse_lambda_file(text: &str) -> Result<LambdaFile, CliError> {
    let mut sig = LSignature::new();
    let mut ctx = LContext::new();
    let mut body = Vec::new();
    let mut in_header = true;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split("--").next().unwrap_or("").trim();
        let n = i + 1;
        if line.is_empty() {
            continue;
        }
        let (kw, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        if in_header {
            match kw {
                "base" => {
                    for b in rest.split_whitespace() {
                        sig = sig.with_base(b);
                    }
                    continue;
                }
                "val" => {
                    let (names, ty) = names_and_type(rest, n)?;
                    for v in names {
                        sig = sig.with_value(v, ty.clone());
                    }
                    continue;
                }
                "comp" => {
                    let (names, ty) = names_and_type(rest, n)?;
                    let LType::Arrow(dom, cod) = ty else {
                        return Err(CliError::Domain(format!(
                            "line {n}: a computation constant needs an arrow type"
                        )));
                    };
                    for c in names {
                        sig = sig.with_computation(c, (*dom).clone(), (*cod).clone());
                    }
                    continue;
                }
                "cell" => {
                    let (names, ty) = names_and_type(rest, n)?;
                    for c in names {
                        sig = sig.with_cell(c, ty.clone());
                    }
                    continue;
                }
                "var" => {
                    let (names, ty) = names_and_type(rest, n)?;
                    for x in names {
                        ctx = ctx.with(x, ty.clone());
                    }
                    continue;
                }
                _ => in_header = false,
            }
        }
        body.push(line);
    }
    let term = parse_lambda(&body.join("\n")).map_err(|e| CliError::Domain(e.to_string()))?;
    Ok(LambdaFile { sig, ctx, term })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_then_term() {
        let f = parse_lambda_file("-- twice\nbase o\nval a b : o\nvar f : o -> o\n\\x:o.\n  f (f x)\n").unwrap();
        assert_eq!(f.sig.values.len(), 2);
        assert_eq!(f.ctx.to_string(), "f:o -> o");
        assert_eq!(f.term.to_string(), "\\x:o. f (f x)");
    }

    #[test]
    fn computation_constants_need_arrows() {
        assert!(parse_lambda_file("base o\ncomp k : o\nk@#a").is_err());
    }
}
