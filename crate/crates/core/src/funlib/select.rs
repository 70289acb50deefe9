use std::collections::{BTreeMap, BTreeSet};

use super::{sigtanh_unchecked, FunError};
use crate::dyadic_ball::{Dyadic, Precision, Scalar};

/// Select-or-zero gate: within `2^-m` of `0` when `|d| <= 1/4` and of `ell` when
/// `|d - 1| <= 1/4`, for `ell` in `[0, 1]`.
///
/// With the cleaned selector `s`, the gate is `4 sig(1, 2, 1/2 + s + ell/4) - 4 sig(1, 2, 1/2 + s)`:
/// both ramps vanish for `s <= 1/4` and their difference is exactly `ell` for `s` in `[1/2, 5/4]`.
pub fn tt_tanh<T: Scalar>(m: u32, d: &T, ell: &T, p: Precision) -> T {
    let m = i64::from(m);
    let (one, two) = (Dyadic::one(), Dyadic::from_int(2));
    let clean = sigtanh_unchecked(m + 1, &Dyadic::ratio(1, 2), &Dyadic::ratio(3, 2), d, p);
    let base = clean.add_dyadic(&Dyadic::ratio(1, 1));
    let with_ell = sigtanh_unchecked(m + 3, &one, &two, &base.add(&ell.shl(-2)), p);
    let without = sigtanh_unchecked(m + 3, &one, &two, &base, p);
    with_ell.sub(&without).shl(2).round(p)
}

/// Lookup table `alpha_i -> V_i` over distinct integer keys, sorted by key.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SendTable {
    entries: Vec<(i64, Dyadic)>,
    /// Smallest `c` with `n * max_j |V_(j+1) - V_j| <= 2^c`.
    c: i64,
}

impl SendTable {
    pub fn new(entries: impl IntoIterator<Item = (i64, Dyadic)>) -> Result<Self, FunError> {
        let mut map = BTreeMap::new();
        for (k, v) in entries {
            if map.insert(k, v).is_some() {
                return Err(FunError::DuplicateKey(k));
            }
        }
        if map.is_empty() {
            return Err(FunError::EmptyTable);
        }
        let entries: Vec<(i64, Dyadic)> = map.into_iter().collect();
        let gap = entries
            .windows(2)
            .map(|w| (&w[1].1 - &w[0].1).abs())
            .max()
            .unwrap_or_else(Dyadic::zero);
        let spread = &gap * &Dyadic::from_int(entries.len() as i64);
        let c = match spread.magnitude_exp() {
            None => 0,
            Some(e) if spread == Dyadic::pow2(e) => e,
            Some(e) => e + 1,
        };
        Ok(SendTable { entries, c })
    }

    pub fn entries(&self) -> &[(i64, Dyadic)] {
        &self.entries
    }

    /// Value at `alpha` if `x` is within `1/4` of a key.
    pub fn lookup(&self, x: &Dyadic) -> Option<&Dyadic> {
        let quarter = Dyadic::ratio(1, 2);
        self.entries
            .iter()
            .find(|(k, _)| (x - &Dyadic::from_int(*k)).abs() <= quarter)
            .map(|(_, v)| v)
    }

    pub fn eval<T: Scalar>(&self, m: u32, x: &T, p: Precision) -> T {
        let e = i64::from(m) + self.c;
        let (lo, hi) = (Dyadic::ratio(1, 2), Dyadic::ratio(3, 2));
        let mut acc = T::from_dyadic(self.entries[0].1.clone());
        for w in self.entries.windows(2) {
            let step = &w[1].1 - &w[0].1;
            if step.is_zero() {
                continue;
            }
            let s = sigtanh_unchecked(e, &lo, &hi, &x.add_dyadic(&Dyadic::from_int(-w[0].0)), p);
            acc = acc.add(&s.scale(&step));
        }
        acc.round(p)
    }
}

/// Within `2^-m` of `V_i` whenever `|x - alpha_i| <= 1/4`.
pub fn send_tanh<T: Scalar>(
    m: u32,
    table: &[(i64, Dyadic)],
    x: &T,
    p: Precision,
) -> Result<T, FunError> {
    Ok(SendTable::new(table.iter().cloned())?.eval(m, x, p))
}

/// Within `2^-m` of `V_(i,j)` whenever `|x - alpha_i| <= 1/4` and `|y - j| <= 1/4`.
///
/// Both coordinates are first snapped to within `1/8` of their keys, so the combined key
/// `N x + y` stays inside the quarter band of the outer table.
pub fn send_pairs_tanh<T: Scalar>(
    m: u32,
    table: &[((i64, i64), Dyadic)],
    x: &T,
    y: &T,
    p: Precision,
) -> Result<T, FunError> {
    if table.is_empty() {
        return Err(FunError::EmptyTable);
    }
    let alphas: BTreeSet<i64> = table.iter().map(|((a, _), _)| *a).collect();
    let js: BTreeSet<i64> = table.iter().map(|((_, j), _)| *j).collect();
    let n = js.iter().max().copied().unwrap_or(0) + 1;
    if let Some(missing) = (0..n).find(|j| !js.contains(j)) {
        return Err(FunError::NonContiguous(missing));
    }
    if js.iter().any(|&j| j < 0) {
        return Err(FunError::NonContiguous(-1));
    }
    let inner_bits = 64 - (n as u64 + 1).leading_zeros() + 3;
    let snap_x = SendTable::new(alphas.iter().map(|&a| (a, Dyadic::from_int(a))))?;
    let snap_y = SendTable::new((0..n).map(|j| (j, Dyadic::from_int(j))))?;
    let outer = SendTable::new(table.iter().map(|((a, j), v)| (n * a + j, v.clone())))?;
    let xs = snap_x.eval(inner_bits, x, p);
    let ys = snap_y.eval(inner_bits, y, p);
    let key = xs.scale(&Dyadic::from_int(n)).add(&ys);
    Ok(outer.eval(m, &key, p))
}
