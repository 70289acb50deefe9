use num_bigint::BigInt;

use super::{Expr, ExprError};

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: impl Into<String>) -> ExprError {
        ExprError::Parse {
            pos: self.pos,
            msg: msg.into(),
        }
    }

    fn skip_ws(&mut self) {
        let rest = &self.src[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn expect(&mut self, c: char) -> Result<(), ExprError> {
        self.skip_ws();
        if self.src[self.pos..].starts_with(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected `{c}`")))
        }
    }

    fn atom(&mut self) -> Result<&'a str, ExprError> {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        let len = rest
            .find(|c: char| c.is_whitespace() || c == '(' || c == ')')
            .unwrap_or(rest.len());
        if len == 0 {
            return Err(self.err("expected an atom"));
        }
        self.pos += len;
        Ok(&rest[..len])
    }

    fn peek_close(&mut self) -> bool {
        self.skip_ws();
        self.src[self.pos..].starts_with(')')
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        self.expect('(')?;
        let head_pos = self.pos;
        let head = self.atom()?;
        let e = match head {
            "var" => {
                let a = self.atom()?;
                Expr::Var(a.parse().map_err(|_| self.err("bad variable index"))?)
            }
            "int" => {
                let a = self.atom()?;
                Expr::Int(a.parse::<BigInt>().map_err(|_| self.err("bad integer"))?)
            }
            "tanh" => Expr::tanh(self.expr()?),
            "add" | "sub" | "mul" => {
                let mut acc = self.expr()?;
                let mut n = 1;
                while !self.peek_close() {
                    let rhs = self.expr()?;
                    acc = match head {
                        "add" => Expr::add(acc, rhs),
                        "sub" => Expr::sub(acc, rhs),
                        _ => Expr::mul(acc, rhs),
                    };
                    n += 1;
                }
                if n < 2 {
                    return Err(self.err(format!("`{head}` needs at least two operands")));
                }
                acc
            }
            other => {
                return Err(ExprError::Parse {
                    pos: head_pos,
                    msg: format!("unknown node `{other}`"),
                })
            }
        };
        self.expect(')')?;
        Ok(e)
    }
}

/// Parse `(add (mul (var 0) (tanh (var 1))) (int 3))`-style text.
/// `add`, `sub` and `mul` accept two or more operands and associate to the left.
pub fn parse_sexpr(src: &str) -> Result<Expr, ExprError> {
    let mut p = Parser { src, pos: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != src.len() {
        return Err(p.err("trailing input"));
    }
    Ok(e)
}
