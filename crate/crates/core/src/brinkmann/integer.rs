//! Exact solver for `γ·α^a = δ·β^b` over `a, b ∈ ℕ₀` subject to
//! `a·d + l ≥ b·d + m`.
//!
//! Magnitudes are compared through valuations over a coprime base of the four
//! inputs, which turns the equation into linear equations in `(a, b)`; signs
//! become a parity condition.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decision::{Certificate, Decision};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegerExpInstance {
    pub gamma: i64,
    pub alpha: i64,
    pub delta: i64,
    pub beta: i64,
    pub d: u64,
    pub l: i64,
    pub m: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IntegerError {
    #[error("zero is not allowed as a coefficient or base")]
    Zero,
}

impl IntegerExpInstance {
    /// Instance without a constraint.
    pub fn unconstrained(gamma: i64, alpha: i64, delta: i64, beta: i64) -> Self {
        IntegerExpInstance {
            gamma,
            alpha,
            delta,
            beta,
            d: 0,
            l: 0,
            m: 0,
        }
    }

    pub fn satisfies_constraint(&self, a: u64, b: u64) -> bool {
        let d = self.d as i128;
        a as i128 * d + self.l as i128 >= b as i128 * d + self.m as i128
    }
}

fn gcd(a: u128, b: u128) -> u128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Pairwise coprime numbers such that each input is a product of their powers.
fn coprime_base(nums: &[u128]) -> Vec<u128> {
    let mut base: Vec<u128> = nums.iter().copied().filter(|&n| n > 1).collect();
    base.sort_unstable();
    base.dedup();
    'outer: loop {
        for i in 0..base.len() {
            for j in i + 1..base.len() {
                let g = gcd(base[i], base[j]);
                if g > 1 {
                    let (x, y) = (base[i], base[j]);
                    base.swap_remove(j);
                    base.swap_remove(i);
                    base.extend([g, x / g, y / g].into_iter().filter(|&n| n > 1));
                    base.sort_unstable();
                    base.dedup();
                    continue 'outer;
                }
            }
        }
        return base;
    }
}

fn valuation(mut n: u128, q: u128) -> i128 {
    let mut v = 0;
    while n.is_multiple_of(q) {
        n /= q;
        v += 1;
    }
    v
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

fn div_floor(a: i128, b: i128) -> i128 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) != (b < 0)) {
        q - 1
    } else {
        q
    }
}

fn div_ceil(a: i128, b: i128) -> i128 {
    -div_floor(-a, b)
}

/// Solution set of the magnitude equations.
enum Family {
    Empty,
    Point(i128, i128),
    /// `(a0 + da·k, b0 + db·k)` for `k ≥ 0`, with `a0, b0 ≥ 0`.
    Ray { a0: i128, b0: i128, da: i128, db: i128 },
    Plane,
}

/// Solves `A·a − B·b = C` for every row simultaneously over `a, b ≥ 0`.
fn solve_rows(rows: &[(i128, i128, i128)]) -> Family {
    let mut first: Option<(i128, i128, i128)> = None;
    for &(a, b, c) in rows {
        if a == 0 && b == 0 {
            if c != 0 {
                return Family::Empty;
            }
            continue;
        }
        match first {
            None => first = Some((a, b, c)),
            Some((a1, b1, c1)) => {
                let det = a * b1 - a1 * b;
                if det != 0 {
                    // two independent lines meet in one point
                    let an = b1 * c - b * c1;
                    let bn = a1 * c - a * c1;
                    if an % det != 0 || bn % det != 0 {
                        return Family::Empty;
                    }
                    let (pa, pb) = (an / det, bn / det);
                    if pa < 0 || pb < 0 {
                        return Family::Empty;
                    }
                    if rows.iter().all(|&(x, y, z)| x * pa - y * pb == z) {
                        return Family::Point(pa, pb);
                    }
                    return Family::Empty;
                }
                // parallel: must be the same line
                if a * c1 != a1 * c || b * c1 != b1 * c {
                    return Family::Empty;
                }
            }
        }
    }
    let Some((a, b, c)) = first else {
        return Family::Plane;
    };
    if b == 0 {
        if c % a != 0 || c / a < 0 {
            return Family::Empty;
        }
        return Family::Ray {
            a0: c / a,
            b0: 0,
            da: 0,
            db: 1,
        };
    }
    if a == 0 {
        if c % b != 0 || -c / b < 0 {
            return Family::Empty;
        }
        return Family::Ray {
            a0: 0,
            b0: -c / b,
            da: 1,
            db: 0,
        };
    }
    let (g, x, y) = ext_gcd(a, b);
    if c % g != 0 {
        return Family::Empty;
    }
    // a·x + b·y = g, so a·(x·c/g) − b·(−y·c/g) = c
    let (pa, pb) = (x * (c / g), -y * (c / g));
    let (da, db) = (b / g, a / g);
    // shift to the least k with both coordinates nonnegative
    let k = div_ceil(-pa, da).max(div_ceil(-pb, db));
    Family::Ray {
        a0: pa + da * k,
        b0: pb + db * k,
        da,
        db,
    }
}

/// Least solution by `(a + b, a)`, or `No` with a prime-support certificate.
pub fn integer_exp_solve(inst: &IntegerExpInstance) -> Result<Decision<(u64, u64)>, IntegerError> {
    let IntegerExpInstance {
        gamma,
        alpha,
        delta,
        beta,
        d,
        l,
        m,
    } = *inst;
    if gamma == 0 || alpha == 0 || delta == 0 || beta == 0 {
        return Err(IntegerError::Zero);
    }
    let mags = [gamma, alpha, delta, beta].map(|x| x.unsigned_abs() as u128);
    let base = coprime_base(&mags);
    let rows: Vec<(i128, i128, i128)> = base
        .iter()
        .map(|&q| {
            let [g, a, dl, b] = mags.map(|x| valuation(x, q));
            (a, b, dl - g)
        })
        .collect();
    let family = solve_rows(&rows);

    // sign: sgn γ · sgn α^a = sgn δ · sgn β^b
    let pa = i128::from(alpha < 0);
    let pb = i128::from(beta < 0);
    let want = i128::from((gamma < 0) != (delta < 0));
    let parity_ok = |a: i128, b: i128| (pa * a + pb * b).rem_euclid(2) == want;
    let d = d as i128;
    let slack = (l as i128) - (m as i128);
    let constraint_ok = |a: i128, b: i128| d * (a - b) + slack >= 0;
    let ok = |a: i128, b: i128| parity_ok(a, b) && constraint_ok(a, b);

    let found = match family {
        Family::Empty => None,
        Family::Point(a, b) => ok(a, b).then_some((a, b)),
        Family::Ray { a0, b0, da, db } => {
            // constraint: e + slope·k ≥ 0
            let e = d * (a0 - b0) + slack;
            let slope = d * (da - db);
            let (lo, hi) = if slope > 0 {
                (div_ceil(-e, slope).max(0), None)
            } else if slope == 0 {
                if e >= 0 {
                    (0, None)
                } else {
                    (1, Some(0))
                }
            } else {
                (0, Some(div_floor(e, -slope)))
            };
            [lo, lo + 1]
                .into_iter()
                .filter(|&k| hi.is_none_or(|h| k <= h))
                .map(|k| (a0 + da * k, b0 + db * k))
                .find(|&(a, b)| ok(a, b))
        }
        Family::Plane => {
            // the constraint forces a − b ≥ need
            let need = if slack >= 0 {
                0
            } else if d == 0 {
                i128::MAX
            } else {
                div_ceil(-slack, d)
            };
            if need == i128::MAX {
                None
            } else {
                (0..=need + 2)
                    .flat_map(|s| (0..=s).map(move |a| (a, s - a)))
                    .find(|&(a, b)| ok(a, b))
            }
        }
    };
    Ok(match found {
        Some((a, b)) => Decision::Yes((a as u64, b as u64)),
        None => Decision::No(Certificate::PrimeSupport),
    })
}
