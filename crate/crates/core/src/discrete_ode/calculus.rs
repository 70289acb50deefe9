use crate::dyadic_ball::{Ball, Scalar};

/// Dense square-or-rectangular matrix over a [`Scalar`].
#[derive(Clone, Debug)]
pub struct Matrix<T> {
    rows: Vec<Vec<T>>,
}

impl<T: Scalar> Matrix<T> {
    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        Matrix { rows }
    }

    pub fn identity(d: usize) -> Self {
        Matrix {
            rows: (0..d)
                .map(|i| (0..d).map(|j| T::from_int(i64::from(i == j))).collect())
                .collect(),
        }
    }

    pub fn rows(&self) -> &[Vec<T>] {
        &self.rows
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.rows[i][j]
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn mul(&self, o: &Matrix<T>) -> Matrix<T> {
        let n = o.rows.first().map_or(0, Vec::len);
        let rows = self
            .rows
            .iter()
            .map(|r| {
                (0..n)
                    .map(|j| {
                        r.iter()
                            .zip(&o.rows)
                            .map(|(a, orow)| a.mul(&orow[j]))
                            .reduce(|x, y| x.add(&y))
                            .unwrap_or_else(|| T::from_int(0))
                    })
                    .collect()
            })
            .collect();
        Matrix { rows }
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        self.rows
            .iter()
            .map(|r| {
                r.iter()
                    .zip(v)
                    .map(|(a, b)| a.mul(b))
                    .reduce(|x, y| x.add(&y))
                    .unwrap_or_else(|| T::from_int(0))
            })
            .collect()
    }

    /// `I + self`.
    pub fn one_plus(&self) -> Matrix<T> {
        let rows = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                r.iter()
                    .enumerate()
                    .map(|(j, a)| {
                        if i == j {
                            a.add(&T::from_int(1))
                        } else {
                            a.clone()
                        }
                    })
                    .collect()
            })
            .collect();
        Matrix { rows }
    }

    pub fn map(&self, f: impl Fn(&T) -> T) -> Matrix<T> {
        Matrix {
            rows: self
                .rows
                .iter()
                .map(|r| r.iter().map(&f).collect())
                .collect(),
        }
    }
}

/// `f(x + 1) - f(x)`.
pub fn discrete_derivative<F>(f: F, x: i64) -> Ball
where
    F: Fn(i64) -> Ball,
{
    &f(x + 1) - &f(x)
}

/// `sum_{x=a}^{b-1} f(x)`; zero when `a = b`, negated sum over `[b, a)` when `a > b`.
pub fn discrete_integral<F>(f: F, a: i64, b: i64) -> Ball
where
    F: Fn(i64) -> Ball,
{
    if a <= b {
        (a..b).fold(Ball::zero(), |acc, x| &acc + &f(x))
    } else {
        -discrete_integral(f, b, a)
    }
}

/// Ordered product `(1 + U'(x-1)) ... (1 + U'(0))`; the identity for `x <= 0`.
pub fn falling_exponential<F>(uprime: F, x: i64, d: usize) -> Matrix<Ball>
where
    F: Fn(i64) -> Matrix<Ball>,
{
    let mut acc = Matrix::identity(d);
    for t in 0..x.max(0) {
        acc = uprime(t).one_plus().mul(&acc);
    }
    acc
}
