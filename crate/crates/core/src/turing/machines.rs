//! Sample machines. All of them keep both tapes inside `{1, 3}*`: they never write a blank
//! inside the written region and never move left off an empty left tape.

use super::machine::{Move, Transition, TuringMachine};

fn build(states: usize, accept: &[usize], rules: &[(usize, u8, usize, u8, Move)]) -> TuringMachine {
    TuringMachine::new(
        states,
        0,
        accept.iter().copied(),
        rules
            .iter()
            .map(|&(q, a, n, w, mv)| ((q, a), Transition::new(n, w, mv))),
    )
    .expect("well-formed sample machine")
}

use Move::{L, R};

/// One state, writes `1` and moves right forever.
pub fn right_mover() -> TuringMachine {
    build(1, &[], &[(0, 0, 0, 1, R), (0, 1, 0, 1, R), (0, 3, 0, 1, R)])
}

/// Binary increment, least significant bit first, with `1` for bit 1 and `3` for bit 0.
/// Halts by oscillating at the right end of the tape (states 1 and 2).
pub fn binary_increment() -> TuringMachine {
    build(
        3,
        &[1, 2],
        &[
            (0, 1, 0, 3, R),
            (0, 3, 1, 1, R),
            (0, 0, 1, 1, R),
            (1, 1, 1, 1, R),
            (1, 3, 1, 3, R),
            (1, 0, 2, 0, L),
            (2, 1, 1, 1, R),
            (2, 3, 1, 3, R),
            (2, 0, 2, 1, R),
        ],
    )
}

/// Unary copier: `1^n` becomes `3^n 3 1^n`, then the head oscillates in place.
pub fn unary_copier() -> TuringMachine {
    const S0: usize = 0;
    const G: usize = 1;
    const H: usize = 2;
    const D: usize = 3;
    const E: usize = 4;
    const A: usize = 5;
    const B: usize = 6;
    const C: usize = 7;
    const HR: usize = 8;
    const HL: usize = 9;
    build(
        10,
        &[HR, HL],
        &[
            (S0, 1, G, 3, R),
            (S0, 3, S0, 1, R),
            (S0, 0, HR, 0, R),
            (G, 1, G, 1, R),
            (G, 0, H, 3, R),
            (G, 3, G, 1, R),
            (H, 0, D, 1, L),
            (H, 1, H, 1, R),
            (H, 3, H, 1, R),
            (D, 1, D, 1, L),
            (D, 3, E, 3, L),
            (D, 0, D, 1, R),
            (E, 1, E, 1, L),
            (E, 3, A, 3, R),
            (E, 0, E, 1, R),
            (A, 1, B, 3, R),
            (A, 3, HR, 3, R),
            (A, 0, A, 1, R),
            (B, 1, B, 1, R),
            (B, 3, C, 3, R),
            (B, 0, B, 1, R),
            (C, 1, C, 1, R),
            (C, 0, D, 1, L),
            (C, 3, C, 1, R),
            (HR, 0, HL, 0, L),
            (HR, 1, HL, 1, L),
            (HR, 3, HL, 3, L),
            (HL, 0, HR, 0, R),
            (HL, 1, HR, 1, R),
            (HL, 3, HR, 3, R),
        ],
    )
}

/// Three states cycling `q -> q + 1 mod 3`; on input `3` the head bounces between two cells.
pub fn looper3() -> TuringMachine {
    let mut rules = Vec::new();
    for q in 0..3 {
        let n = (q + 1) % 3;
        rules.push((q, 3, n, 3, R));
        rules.push((q, 1, n, 1, L));
        rules.push((q, 0, n, 1, L));
    }
    build(3, &[], &rules)
}

/// Two states flipping the symbols of a two-cell tape in place forever (input `1`).
pub fn toggler() -> TuringMachine {
    build(
        2,
        &[],
        &[
            (0, 1, 1, 3, R),
            (0, 3, 1, 1, R),
            (0, 0, 1, 1, R),
            (1, 0, 0, 1, L),
            (1, 1, 0, 3, L),
            (1, 3, 0, 1, L),
        ],
    )
}

/// Identity after every even number of steps: step right, step back.
pub fn oscillator() -> TuringMachine {
    build(
        2,
        &[0, 1],
        &[
            (0, 0, 1, 0, R),
            (0, 1, 1, 1, R),
            (0, 3, 1, 3, R),
            (1, 0, 0, 0, L),
            (1, 1, 0, 1, L),
            (1, 3, 0, 3, L),
        ],
    )
}

/// Name, machine and a default input word for each sample.
pub fn catalog() -> Vec<(&'static str, TuringMachine, Vec<u8>)> {
    vec![
        ("binary-increment", binary_increment(), vec![1, 1]),
        ("unary-copier", unary_copier(), vec![1, 1, 1]),
        ("looper3", looper3(), vec![3]),
        ("toggler", toggler(), vec![1]),
        ("right-mover", right_mover(), vec![1]),
        ("oscillator", oscillator(), vec![1, 3]),
    ]
}
