use std::sync::Arc;

use super::{LinearOdeSystem, OdeError, OdeKind, StepIndex};
use crate::dyadic_ball::{Ball, Precision};
use crate::expr::{parse_sexpr, Expr, ExprVec};

fn perr(line: usize, msg: impl Into<String>) -> OdeError {
    OdeError::Parse {
        line,
        msg: msg.into(),
    }
}

/// Parse a system description.
///
/// ```text
/// # f <- f + A f + B over the environment [f.., h.., counter, y..]
/// dim 1
/// aux 0
/// params 1
/// kind length          # or `plain`
/// A 0 0 (int 1)        # entry A[i][j]; missing entries are 0
/// B 0 (int 0)
/// u 0 (mul (var 0) (int 1))   # alternatively, an update split into A f + B
/// init 0 (var 0)       # initial value over the parameters y
/// h 0 (var 0)          # auxiliary value over the counter
/// ```
pub fn parse_ode_file(text: &str) -> Result<(LinearOdeSystem, OdeKind), OdeError> {
    let mut dim = None;
    let mut n_aux = 0usize;
    let mut n_y = 0usize;
    let mut kind = OdeKind::LengthDerivation;
    let mut a_entries = Vec::new();
    let mut b_entries = Vec::new();
    let mut u_entries = Vec::new();
    let mut init_entries = Vec::new();
    let mut h_entries = Vec::new();

    for (ln, raw) in text.lines().enumerate() {
        let line_no = ln + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        let int = |s: &str| -> Result<usize, OdeError> {
            s.parse()
                .map_err(|_| perr(line_no, format!("expected an index, got `{s}`")))
        };
        let expr = |s: &str| -> Result<Expr, OdeError> {
            parse_sexpr(s).map_err(|e| perr(line_no, e.to_string()))
        };
        let split_idx = |s: &str| -> Result<(usize, String), OdeError> {
            let (i, e) = s
                .split_once(char::is_whitespace)
                .ok_or_else(|| perr(line_no, "expected `<index> <expr>`"))?;
            Ok((int(i)?, e.trim().to_string()))
        };
        match key {
            "dim" => dim = Some(int(rest)?),
            "aux" => n_aux = int(rest)?,
            "params" => n_y = int(rest)?,
            "kind" => {
                kind = match rest {
                    "length" => OdeKind::LengthDerivation,
                    "plain" => OdeKind::PlainDerivation,
                    other => return Err(perr(line_no, format!("unknown kind `{other}`"))),
                }
            }
            "A" => {
                let (i, rest) = split_idx(rest)?;
                let (j, e) = split_idx(&rest)?;
                a_entries.push((line_no, i, j, expr(&e)?));
            }
            "B" | "u" | "init" | "h" => {
                let (i, e) = split_idx(rest)?;
                let entry = (line_no, i, expr(&e)?);
                match key {
                    "B" => b_entries.push(entry),
                    "u" => u_entries.push(entry),
                    "init" => init_entries.push(entry),
                    _ => h_entries.push(entry),
                }
            }
            other => return Err(perr(line_no, format!("unknown directive `{other}`"))),
        }
    }

    let dim = dim.ok_or_else(|| perr(0, "missing `dim`"))?;
    let place = |entries: Vec<(usize, usize, Expr)>, len: usize, what: &str| {
        let mut v = vec![Expr::int(0); len];
        for (ln, i, e) in entries {
            if i >= len {
                return Err(perr(ln, format!("{what} index {i} out of range")));
            }
            v[i] = e;
        }
        Ok(v)
    };
    let init = ExprVec::new(place(init_entries, dim, "init")?, n_y)?;
    let h = place(h_entries, n_aux, "h")?;
    if let Some(e) = h.iter().find(|e| e.arity() > 1) {
        return Err(perr(
            0,
            format!("auxiliary expression {e} may only use the counter (var 0)"),
        ));
    }
    let aux = Arc::new(move |step: &StepIndex, p: Precision| -> Vec<Ball> {
        let env = [Ball::exact(step.counter())];
        h.iter()
            .map(|e| {
                e.eval(&env, p)
                    .expect("aux expressions use only the counter")
            })
            .collect()
    });

    let sys = if !u_entries.is_empty() {
        if !a_entries.is_empty() || !b_entries.is_empty() {
            return Err(perr(0, "use either `u` lines or `A`/`B` lines, not both"));
        }
        let arity = dim + n_aux + 1 + n_y;
        let u = ExprVec::new(place(u_entries, dim, "u")?, arity)?;
        LinearOdeSystem::from_update(u, init, n_aux, n_y, aux)?
    } else {
        let mut a = vec![vec![Expr::int(0); dim]; dim];
        for (ln, i, j, e) in a_entries {
            if i >= dim || j >= dim {
                return Err(perr(ln, format!("A index ({i}, {j}) out of range")));
            }
            a[i][j] = e;
        }
        let b = place(b_entries, dim, "B")?;
        LinearOdeSystem::new(a, b, init, n_aux, n_y, aux)?
    };
    Ok((sys, kind))
}
