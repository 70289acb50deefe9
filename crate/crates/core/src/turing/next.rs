use super::machine::{Move, TuringMachine, SYMBOLS};
use crate::discrete_ode::{trajectory, DiscreteOde, OdeKind, StepIndex};
use crate::dyadic_ball::{centered_eval, Ball, Dual, Dyadic, Precision, Scalar, VectorMap};
use crate::funlib::sigtanh_unchecked;
use crate::funlib::{sigma1, tt_tanh, SendTable};

use super::machine::EncodedConfig;

// Transition data is read through three tables keyed by `4 q + a` (`a` the head symbol):
// move right (0/1), written symbol, next state. A fourth table snaps `q` to its integer.
#[derive(Clone, Debug)]
struct Selectors {
    snap_q: SendTable,
    right: SendTable,
    write: SendTable,
    next_q: SendTable,
}

impl Selectors {
    fn new(machine: &TuringMachine) -> Self {
        let keyed = |f: &dyn Fn(usize, u8) -> Dyadic| {
            let entries = (0..machine.states())
                .flat_map(|q| SYMBOLS.iter().map(move |&a| (q, a)))
                .map(|(q, a)| (4 * q as i64 + i64::from(a), f(q, a)));
            SendTable::new(entries.collect::<Vec<_>>()).expect("distinct keys")
        };
        Selectors {
            snap_q: SendTable::new((0..machine.states() as i64).map(|q| (q, Dyadic::from_int(q))))
                .expect("non-empty state set"),
            right: keyed(&|q, a| Dyadic::from_int(i64::from(machine.delta(q, a).mv == Move::R))),
            write: keyed(&|q, a| Dyadic::from_int(i64::from(machine.delta(q, a).write))),
            next_q: keyed(&|q, a| Dyadic::from_int(machine.delta(q, a).next as i64)),
        }
    }
}

/// Analytic one-step simulator of a machine on encoded configurations whose tapes fit in
/// `space` cells.
///
/// Each tape channel is first rounded to the grid `4^-(S+1)` with `sigma1`, which absorbs
/// input errors up to `4^-(S+2)` with margin; the output is then within `2^-m_eff` of the exact
/// successor, `m_eff = m + 2S + 4`, so it is again a valid input.
#[derive(Clone, Debug)]
pub struct NextMap {
    m: u32,
    space: usize,
    rounding: bool,
    selectors: Selectors,
}

impl NextMap {
    pub fn new(machine: &TuringMachine, m: u32, space: usize) -> Self {
        NextMap {
            m,
            space: space.max(1),
            rounding: true,
            selectors: Selectors::new(machine),
        }
    }

    /// Enable or disable the input rounding (disabled only as a negative control).
    pub fn with_rounding(mut self, rounding: bool) -> Self {
        self.rounding = rounding;
        self
    }

    pub fn rounding(&self) -> bool {
        self.rounding
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn space(&self) -> usize {
        self.space
    }

    pub fn effective_m(&self) -> u32 {
        self.m + 2 * self.space as u32 + 4
    }

    /// Working precision used by [`NextMap::apply`] and the exec solvers. The rounding ramps
    /// have gains near `2^(m_eff + 16)` on arguments up to `4^(S+1)`; both add to the target.
    pub fn precision(&self) -> Precision {
        Precision::new(2 * i64::from(self.effective_m()) + 2 * self.space as i64 + 32)
            .expect("positive")
    }

    /// Largest admissible input error per tape channel.
    pub fn input_tolerance(&self) -> Dyadic {
        Dyadic::pow2(-2 * (self.space as i64 + 2))
    }

    /// `round_(S+1)(x) = sigma1(4^(S+1) x - 1/8) / 4^(S+1)`. The shift centres the band of
    /// `sigma1` on the grid, so errors up to `3/2 4^-(S+2)` are absorbed.
    pub fn round_tape<T: Scalar>(&self, x: &T, p: Precision) -> T {
        let shift = 2 * (self.space as i64 + 1);
        let levels = 2 * self.space as u32 + 3;
        let y = x.shl(shift).add_dyadic(&Dyadic::ratio(-1, 3));
        sigma1(self.m + 7, levels, &y, p).shl(-shift)
    }

    /// Head symbol reader `sig(1/4, 3/4, x) + 2 sig(9/4, 11/4, x)`: `0`, `1`, `3` on
    /// `x = 0`, `[1, 2]`, `[3, 4]`.
    fn symbol<T: Scalar>(acc: u32, x: &T, p: Precision) -> T {
        let a = i64::from(acc);
        let low = sigtanh_unchecked(a + 1, &Dyadic::ratio(1, 2), &Dyadic::ratio(3, 2), x, p);
        let high = sigtanh_unchecked(a + 2, &Dyadic::ratio(9, 2), &Dyadic::ratio(11, 2), x, p);
        low.add(&high.shl(1))
    }

    /// `(q, round(l), round(r))`, or the input unchanged when rounding is disabled.
    pub fn clean<T: Scalar>(&self, c: &[T], p: Precision) -> Vec<T> {
        if !self.rounding {
            return c.to_vec();
        }
        vec![
            c[0].clone(),
            self.round_tape(&c[1], p),
            self.round_tape(&c[2], p),
        ]
    }

    pub fn step<T: Scalar>(&self, q: &T, l: &T, r: &T, p: Precision) -> (T, T, T) {
        let me = self.effective_m();
        let (l, r) = if self.rounding {
            (self.round_tape(l, p), self.round_tape(r, p))
        } else {
            (l.clone(), r.clone())
        };
        let (l4, r4) = (l.shl(2), r.shl(2));
        let l0 = Self::symbol(me + 2, &l4, p);
        let r0 = Self::symbol(me + 2, &r4, p);
        let l_tail = l4.sub(&l0);
        let r_tail = r4.sub(&r0);

        let s = &self.selectors;
        let key = s.snap_q.eval(5, q, p).shl(2).add(&r0);
        let right = s.right.eval(4, &key, p);
        let left = right.neg().add_dyadic(&Dyadic::one());
        let write = s.write.eval(me + 2, &key, p);
        let q_next = s.next_q.eval(me, &key, p);

        let gate = |d: &T, v: &T| tt_tanh(me + 2, d, v, p);
        let l_new = gate(&right, &l.add(&write).shl(-2)).add(&gate(&left, &l_tail));
        let r_left = r_tail.add(&write).shl(-4).add(&l0.shl(-2));
        let r_new = gate(&right, &r_tail).add(&gate(&left, &r_left));
        (q_next.round(p), l_new.round(p), r_new.round(p))
    }

    /// One step on balls in centered form, so that the output radius tracks the true
    /// Lipschitz constant of the map instead of the interval blow-up of its ramps.
    pub fn apply(&self, c: &EncodedConfig) -> EncodedConfig {
        EncodedConfig::from_slice(&centered_eval(self, &c.to_vec()))
    }
}

impl VectorMap for NextMap {
    fn eval<T: Scalar>(&self, x: &[T]) -> Vec<T> {
        let (q, l, r) = self.step(&x[0], &x[1], &x[2], self.precision());
        vec![q, l, r]
    }
}

/// The iteration `C <- Next(C)` as a discrete ODE in the three channels `(q, l, r)`,
/// started at the cleaned parameter vector.
#[derive(Clone, Debug)]
pub struct ExecSystem {
    next: NextMap,
}

impl ExecSystem {
    pub fn new(next: NextMap) -> Self {
        ExecSystem { next }
    }

    pub fn next_map(&self) -> &NextMap {
        &self.next
    }
}

struct Cleaner<'a>(&'a NextMap);

impl VectorMap for Cleaner<'_> {
    fn eval<T: Scalar>(&self, x: &[T]) -> Vec<T> {
        self.0.clean(x, self.0.precision())
    }
}

impl DiscreteOde<Ball> for ExecSystem {
    fn dim(&self) -> usize {
        3
    }

    fn initial(&self, y: &[Ball], _p: Precision) -> Vec<Ball> {
        centered_eval(&Cleaner(&self.next), y)
    }

    fn step(
        &self,
        f: &[Ball],
        _aux: &[Ball],
        _step: &StepIndex,
        _y: &[Ball],
        _p: Precision,
    ) -> Vec<Ball> {
        centered_eval(&self.next, f)
    }
}

impl DiscreteOde<Dual> for ExecSystem {
    fn dim(&self) -> usize {
        3
    }

    fn initial(&self, y: &[Dual], p: Precision) -> Vec<Dual> {
        self.next.clean(y, p)
    }

    fn step(
        &self,
        f: &[Dual],
        _aux: &[Ball],
        _step: &StepIndex,
        _y: &[Dual],
        p: Precision,
    ) -> Vec<Dual> {
        let (q, l, r) = self.next.step(&f[0], &f[1], &f[2], p);
        vec![q, l, r]
    }
}

fn run(sys: &ExecSystem, kind: OdeKind, steps: u64, c0: &EncodedConfig) -> Vec<EncodedConfig> {
    let p = sys.next.precision();
    trajectory(sys, kind, steps, &c0.to_vec(), p)
        .iter()
        .map(|v| EncodedConfig::from_slice(v))
        .collect()
}

/// Time-bounded simulation: `t` applications of Next as a length-ODE (`Exec(2^(t+1)) =
/// Next(Exec(2^t))`), with space bound `S = t + initial_cells`.
pub fn exec_time(
    machine: &TuringMachine,
    m: u32,
    t: u64,
    c0: &EncodedConfig,
    initial_cells: usize,
) -> EncodedConfig {
    exec_time_trajectory(machine, m, t, c0, initial_cells, true)
        .pop()
        .expect("non-empty trajectory")
}

/// All iterates of [`exec_time`].
pub fn exec_time_trajectory(
    machine: &TuringMachine,
    m: u32,
    t: u64,
    c0: &EncodedConfig,
    initial_cells: usize,
    rounding: bool,
) -> Vec<EncodedConfig> {
    let space = t as usize + initial_cells;
    let sys = ExecSystem::new(NextMap::new(machine, m, space).with_rounding(rounding));
    run(&sys, OdeKind::LengthDerivation, t, c0)
}

/// Space-bounded simulation: `t` applications of Next as a plain discrete ODE.
pub fn exec_space(
    machine: &TuringMachine,
    m: u32,
    space: usize,
    t: u64,
    c0: &EncodedConfig,
) -> EncodedConfig {
    exec_space_trajectory(machine, m, space, t, c0, true)
        .pop()
        .expect("non-empty trajectory")
}

/// All iterates of [`exec_space`].
pub fn exec_space_trajectory(
    machine: &TuringMachine,
    m: u32,
    space: usize,
    t: u64,
    c0: &EncodedConfig,
    rounding: bool,
) -> Vec<EncodedConfig> {
    let sys = ExecSystem::new(NextMap::new(machine, m, space).with_rounding(rounding));
    run(&sys, OdeKind::PlainDerivation, t, c0)
}
