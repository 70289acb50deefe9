use std::collections::BTreeSet;
use std::fmt;

use super::TuringError;
use crate::dyadic_ball::{Ball, Dyadic};

/// Tape alphabet; `0` is the blank.
pub const SYMBOLS: [u8; 3] = [0, 1, 3];

pub(crate) fn symbol_index(s: u8) -> Result<usize, TuringError> {
    match s {
        0 => Ok(0),
        1 => Ok(1),
        3 => Ok(2),
        other => Err(TuringError::InvalidSymbol(other)),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Move {
    L,
    R,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Transition {
    pub next: usize,
    pub write: u8,
    pub mv: Move,
}

impl Transition {
    pub fn new(next: usize, write: u8, mv: Move) -> Self {
        Transition { next, write, mv }
    }
}

/// Single-tape machine over `{0, 1, 3}` with a total transition function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TuringMachine {
    init: usize,
    accept: BTreeSet<usize>,
    delta: Vec<[Transition; 3]>,
}

impl TuringMachine {
    pub fn new(
        states: usize,
        init: usize,
        accept: impl IntoIterator<Item = usize>,
        transitions: impl IntoIterator<Item = ((usize, u8), Transition)>,
    ) -> Result<Self, TuringError> {
        if states == 0 {
            return Err(TuringError::NoStates);
        }
        let check_state = |q: usize| {
            if q < states {
                Ok(q)
            } else {
                Err(TuringError::StateOutOfRange { state: q, states })
            }
        };
        check_state(init)?;
        let accept = accept
            .into_iter()
            .map(check_state)
            .collect::<Result<BTreeSet<_>, _>>()?;
        let mut table: Vec<[Option<Transition>; 3]> = vec![[None; 3]; states];
        for ((q, a), tr) in transitions {
            check_state(q)?;
            check_state(tr.next)?;
            symbol_index(tr.write)?;
            let slot = &mut table[q][symbol_index(a)?];
            if slot.is_some() {
                return Err(TuringError::DuplicateTransition {
                    state: q,
                    symbol: a,
                });
            }
            *slot = Some(tr);
        }
        let mut delta = Vec::with_capacity(states);
        for (q, row) in table.into_iter().enumerate() {
            let mut full = [Transition::new(0, 0, Move::R); 3];
            for (i, t) in row.into_iter().enumerate() {
                full[i] = t.ok_or(TuringError::MissingTransition {
                    state: q,
                    symbol: SYMBOLS[i],
                })?;
            }
            delta.push(full);
        }
        Ok(TuringMachine {
            init,
            accept,
            delta,
        })
    }

    pub fn states(&self) -> usize {
        self.delta.len()
    }

    pub fn init(&self) -> usize {
        self.init
    }

    pub fn accept(&self) -> &BTreeSet<usize> {
        &self.accept
    }

    pub fn delta(&self, q: usize, a: u8) -> Transition {
        self.delta[q][symbol_index(a).expect("tape symbol")]
    }

    /// Parse the text format: a header `states N init Q0 accept [list]` followed by
    /// lines `Q sym -> Q' sym' L|R`. `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, TuringError> {
        let err = |line: usize, msg: String| TuringError::Parse { line, msg };
        let mut header: Option<Header> = None;
        let mut rules = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            if header.is_none() {
                header = Some(parse_header(&toks).map_err(|m| err(line_no, m))?);
                continue;
            }
            if toks.len() != 6 || toks[2] != "->" {
                return Err(err(
                    line_no,
                    format!("expected `Q sym -> Q' sym' L|R`, got `{line}`"),
                ));
            }
            let num = |s: &str, what: &str| {
                s.parse::<usize>()
                    .map_err(|_| err(line_no, format!("invalid {what} `{s}`")))
            };
            let sym = |s: &str| match s {
                "0" => Ok(0u8),
                "1" => Ok(1),
                "3" => Ok(3),
                _ => Err(err(
                    line_no,
                    format!("invalid symbol `{s}` (expected 0, 1 or 3)"),
                )),
            };
            let mv = match toks[5] {
                "L" | "l" => Move::L,
                "R" | "r" => Move::R,
                other => return Err(err(line_no, format!("invalid move `{other}`"))),
            };
            rules.push((
                line_no,
                (num(toks[0], "state")?, sym(toks[1])?),
                Transition::new(num(toks[3], "state")?, sym(toks[4])?, mv),
            ));
        }
        let (states, init, accept) = header.ok_or_else(|| err(0, "missing header".into()))?;
        // Re-check rule by rule so that errors carry the offending line.
        let mut seen = BTreeSet::new();
        for (line_no, (q, a), tr) in &rules {
            for s in [*q, tr.next] {
                if s >= states {
                    return Err(err(*line_no, format!("state {s} out of range 0..{states}")));
                }
            }
            if !seen.insert((*q, *a)) {
                return Err(err(
                    *line_no,
                    format!("duplicate transition for ({q}, {a})"),
                ));
            }
        }
        TuringMachine::new(
            states,
            init,
            accept,
            rules.into_iter().map(|(_, k, t)| (k, t)),
        )
    }

    pub fn to_text(&self) -> String {
        let acc: Vec<String> = self.accept.iter().map(|q| q.to_string()).collect();
        let mut s = format!(
            "states {} init {} accept {}\n",
            self.states(),
            self.init,
            acc.join(" ")
        );
        for (q, row) in self.delta.iter().enumerate() {
            for (i, t) in row.iter().enumerate() {
                let mv = if t.mv == Move::L { "L" } else { "R" };
                s.push_str(&format!(
                    "{q} {} -> {} {} {mv}\n",
                    SYMBOLS[i], t.next, t.write
                ));
            }
        }
        s
    }
}

type Header = (usize, usize, Vec<usize>);

fn parse_header(toks: &[&str]) -> Result<Header, String> {
    if toks.len() < 5 || toks[0] != "states" || toks[2] != "init" || toks[4] != "accept" {
        return Err("expected header `states N init Q0 accept [list]`".into());
    }
    let n: usize = toks[1]
        .parse()
        .map_err(|_| format!("invalid state count `{}`", toks[1]))?;
    let q0: usize = toks[3]
        .parse()
        .map_err(|_| format!("invalid initial state `{}`", toks[3]))?;
    if n == 0 {
        return Err("machine needs at least one state".into());
    }
    if q0 >= n {
        return Err(format!("initial state {q0} out of range 0..{n}"));
    }
    let rest = toks[5..].join(" ");
    let mut accept = Vec::new();
    for t in rest
        .split(|c: char| c == ',' || c == '[' || c == ']' || c.is_whitespace())
        .filter(|t| !t.is_empty())
    {
        let q: usize = t
            .parse()
            .map_err(|_| format!("invalid accepting state `{t}`"))?;
        if q >= n {
            return Err(format!("accepting state {q} out of range 0..{n}"));
        }
        accept.push(q);
    }
    Ok((n, q0, accept))
}

/// Exact configuration. `left` lists cells from the head outwards, `right` starts at the head cell.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Config {
    pub q: usize,
    pub left: Vec<u8>,
    pub right: Vec<u8>,
}

fn trim(mut w: Vec<u8>) -> Vec<u8> {
    while w.last() == Some(&0) {
        w.pop();
    }
    w
}

impl Config {
    pub fn new(q: usize, left: Vec<u8>, right: Vec<u8>) -> Self {
        Config {
            q,
            left: trim(left),
            right: trim(right),
        }
    }

    /// `(q_init, empty, input)`: the input on the right tape with the head on its first symbol.
    pub fn initial(machine: &TuringMachine, input: &[u8]) -> Self {
        Config::new(machine.init(), Vec::new(), input.to_vec())
    }

    pub fn head(&self) -> u8 {
        self.right.first().copied().unwrap_or(0)
    }

    /// Cells used on the larger side.
    pub fn extent(&self) -> usize {
        self.left.len().max(self.right.len())
    }

    /// Both tapes are words over `{1, 3}`, i.e. their encodings lie in the Cantor image.
    pub fn is_cantor(&self) -> bool {
        !self.left.contains(&0) && !self.right.contains(&0)
    }

    pub fn step(&self, machine: &TuringMachine) -> Config {
        step_interpreter(machine, self)
    }
}

impl fmt::Display for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |w: &[u8]| w.iter().map(|s| char::from(b'0' + s)).collect::<String>();
        let left: Vec<u8> = self.left.iter().rev().copied().collect();
        write!(f, "q{} {}[{}]", self.q, show(&left), show(&self.right))
    }
}

/// One exact step.
pub fn step_interpreter(machine: &TuringMachine, c: &Config) -> Config {
    let t = machine.delta(c.q, c.head());
    let tail = c.right.get(1..).unwrap_or(&[]);
    match t.mv {
        Move::R => {
            let mut left = Vec::with_capacity(c.left.len() + 1);
            left.push(t.write);
            left.extend_from_slice(&c.left);
            Config::new(t.next, left, tail.to_vec())
        }
        Move::L => {
            let l0 = c.left.first().copied().unwrap_or(0);
            let mut right = Vec::with_capacity(tail.len() + 2);
            right.push(l0);
            right.push(t.write);
            right.extend_from_slice(tail);
            Config::new(t.next, c.left.get(1..).unwrap_or(&[]).to_vec(), right)
        }
    }
}

/// `Gamma(w) = sum_n w_n 4^-(n+1)`, exact.
pub fn encode_word(w: &[u8]) -> Result<Dyadic, TuringError> {
    let mut acc = Dyadic::zero();
    for &s in w.iter().rev() {
        symbol_index(s)?;
        acc = (&acc + &Dyadic::from_int(i64::from(s))).shl(-2);
    }
    Ok(acc)
}

/// Parse a word written with the characters `0`, `1`, `3`.
pub fn parse_word(s: &str) -> Result<Vec<u8>, TuringError> {
    s.trim()
        .chars()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            '3' => Ok(3),
            _ => Err(TuringError::InvalidChar(c)),
        })
        .collect()
}

pub fn word_to_string(w: &[u8]) -> String {
    w.iter().map(|s| char::from(b'0' + s)).collect()
}

/// Nearest point of `4^-digits Z`, read back as a word without trailing blanks; `None` if a
/// base-4 digit is `2` or the value is outside `[0, 1)`.
pub fn decode_word(x: &Dyadic, digits: usize) -> Option<Vec<u8>> {
    let k = x.shl(2 * digits as i64).nearest_int();
    if k.sign() == num_bigint::Sign::Minus || k.bits() > 2 * digits as u64 {
        return None;
    }
    let mut w = Vec::with_capacity(digits);
    for i in (0..digits).rev() {
        let d = ((&k >> (2 * i)) & num_bigint::BigInt::from(3))
            .to_u32_digits()
            .1
            .first()
            .copied()
            .unwrap_or(0) as u8;
        if d == 2 {
            return None;
        }
        w.push(d);
    }
    Some(trim(w))
}

/// Configuration encoded as three balls `(q, Gamma(left), Gamma(right))`.
#[derive(Clone, Debug, PartialEq)]
pub struct EncodedConfig {
    pub q: Ball,
    pub l: Ball,
    pub r: Ball,
}

impl EncodedConfig {
    pub fn exact(c: &Config) -> Self {
        EncodedConfig {
            q: Ball::from_int(c.q as i64),
            l: Ball::exact(encode_word(&c.left).expect("config symbols")),
            r: Ball::exact(encode_word(&c.right).expect("config symbols")),
        }
    }

    pub fn to_vec(&self) -> Vec<Ball> {
        vec![self.q.clone(), self.l.clone(), self.r.clone()]
    }

    pub fn from_slice(v: &[Ball]) -> Self {
        EncodedConfig {
            q: v[0].clone(),
            l: v[1].clone(),
            r: v[2].clone(),
        }
    }

    /// Shift the tape channels by `sl * delta` and `sr * delta`.
    pub fn perturbed(&self, delta: &Dyadic, sl: i8, sr: i8) -> Self {
        let sh = |b: &Ball, s: i8| {
            if s >= 0 {
                b.add_dyadic(delta)
            } else {
                b.add_dyadic(&-delta)
            }
        };
        EncodedConfig {
            q: self.q.clone(),
            l: sh(&self.l, sl),
            r: sh(&self.r, sr),
        }
    }

    /// Deviation of each channel centre from the exact encoding of `c`.
    pub fn deviation(&self, c: &Config) -> Deviation {
        let exact = EncodedConfig::exact(c);
        let d = |a: &Ball, b: &Ball| (a.center() - b.center()).abs();
        Deviation {
            q: d(&self.q, &exact.q),
            l: d(&self.l, &exact.l),
            r: d(&self.r, &exact.r),
            l_radius: self.l.radius().clone(),
            r_radius: self.r.radius().clone(),
        }
    }

    /// Nearest exact configuration with tapes of at most `digits` cells.
    pub fn decode(&self, digits: usize) -> Option<Config> {
        let q = self.q.center().nearest_int();
        let q = usize::try_from(q).ok()?;
        Some(Config::new(
            q,
            decode_word(self.l.center(), digits)?,
            decode_word(self.r.center(), digits)?,
        ))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Deviation {
    pub q: Dyadic,
    pub l: Dyadic,
    pub r: Dyadic,
    pub l_radius: Dyadic,
    pub r_radius: Dyadic,
}

impl Deviation {
    /// Tape channels within `2^-m + radius` and `q` within `1/4`.
    pub fn within(&self, m: u32) -> bool {
        let tol = Dyadic::pow2(-i64::from(m));
        self.q <= Dyadic::ratio(1, 2)
            && self.l <= &tol + &self.l_radius
            && self.r <= &tol + &self.r_radius
    }

    /// Largest tape-channel deviation.
    pub fn tape_max(&self) -> Dyadic {
        self.l.clone().max(self.r.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("step {step}: configuration uses {cells} cells, more than the space bound {bound}")]
    SpaceExceeded {
        step: u64,
        cells: usize,
        bound: usize,
    },
    #[error(
        "step {step}: blank inside the written tape ({config}); the encoding leaves the Cantor set"
    )]
    NotCantor { step: u64, config: String },
}

/// Exact run `c_0, ..., c_steps`, checking the space bound and the Cantor condition at every step.
pub fn reference_run(
    machine: &TuringMachine,
    start: &Config,
    steps: u64,
    space: Option<usize>,
) -> Result<Vec<Config>, OracleError> {
    let mut out = Vec::with_capacity(steps as usize + 1);
    let mut c = start.clone();
    for t in 0..=steps {
        if !c.is_cantor() {
            return Err(OracleError::NotCantor {
                step: t,
                config: c.to_string(),
            });
        }
        if let Some(bound) = space {
            if c.extent() > bound {
                return Err(OracleError::SpaceExceeded {
                    step: t,
                    cells: c.extent(),
                    bound,
                });
            }
        }
        let next = if t < steps {
            Some(c.step(machine))
        } else {
            None
        };
        out.push(c);
        match next {
            Some(n) => c = n,
            None => break,
        }
    }
    Ok(out)
}
