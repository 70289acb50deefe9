use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{Expr, ExprError, ExprVec};

/// `u = A f + B` with every entry of `A` and `B` essentially constant in `f_vars`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearDecomposition {
    pub a: Vec<Vec<Expr>>,
    pub b: Vec<Expr>,
    pub f_vars: Vec<usize>,
}

/// A monomial: integer coefficient times a product of atoms (variables or `tanh` nodes).
struct Term {
    coef: BigInt,
    atoms: Vec<Expr>,
}

fn expand(e: &Expr) -> Vec<Term> {
    match e {
        Expr::Var(_) | Expr::Tanh(_) => vec![Term {
            coef: BigInt::one(),
            atoms: vec![e.clone()],
        }],
        Expr::Int(v) => vec![Term {
            coef: v.clone(),
            atoms: vec![],
        }],
        Expr::Add(a, b) => {
            let mut t = expand(a);
            t.extend(expand(b));
            t
        }
        Expr::Sub(a, b) => {
            let mut t = expand(a);
            t.extend(expand(b).into_iter().map(|x| Term {
                coef: -x.coef,
                atoms: x.atoms,
            }));
            t
        }
        Expr::Mul(a, b) => {
            let (ta, tb) = (expand(a), expand(b));
            let mut out = Vec::with_capacity(ta.len() * tb.len());
            for x in &ta {
                for y in &tb {
                    let mut atoms = x.atoms.clone();
                    atoms.extend(y.atoms.iter().cloned());
                    out.push(Term {
                        coef: &x.coef * &y.coef,
                        atoms,
                    });
                }
            }
            out
        }
    }
}

fn rebuild(coef: &BigInt, atoms: Vec<Expr>) -> Expr {
    if atoms.is_empty() {
        return Expr::Int(coef.clone());
    }
    let prod = Expr::product(atoms);
    if coef.is_one() {
        prod
    } else {
        Expr::mul(Expr::Int(coef.clone()), prod)
    }
}

/// Split every component into `A f + B` after fully distributing products over sums.
pub fn decompose_linear(u: &ExprVec, f_vars: &[usize]) -> Result<LinearDecomposition, ExprError> {
    for &v in f_vars {
        if v >= u.arity() {
            return Err(ExprError::VarOutOfRange {
                var: v,
                arity: u.arity(),
            });
        }
    }
    let d = f_vars.len();
    let mut a = vec![vec![Vec::new(); d]; u.len()];
    let mut b = vec![Vec::new(); u.len()];
    for (ci, comp) in u.components().iter().enumerate() {
        for term in expand(comp) {
            if term.coef.is_zero() {
                continue;
            }
            let hits: Vec<usize> = term
                .atoms
                .iter()
                .enumerate()
                .filter(|(_, at)| matches!(at, Expr::Var(i) if f_vars.contains(i)))
                .map(|(k, _)| k)
                .collect();
            match hits.len() {
                0 => b[ci].push(rebuild(&term.coef, term.atoms)),
                1 => {
                    let k = hits[0];
                    let Expr::Var(v) = term.atoms[k] else {
                        unreachable!()
                    };
                    let j = f_vars.iter().position(|&x| x == v).expect("f var");
                    let mut rest = term.atoms;
                    rest.remove(k);
                    a[ci][j].push(rebuild(&term.coef, rest));
                }
                n => {
                    return Err(ExprError::NotEssentiallyLinear {
                        component: ci,
                        term: rebuild(&term.coef, term.atoms).to_string(),
                        degree: n as u32,
                    })
                }
            }
        }
    }
    Ok(LinearDecomposition {
        a: a.into_iter()
            .map(|row| row.into_iter().map(Expr::sum).collect())
            .collect(),
        b: b.into_iter().map(Expr::sum).collect(),
        f_vars: f_vars.to_vec(),
    })
}
