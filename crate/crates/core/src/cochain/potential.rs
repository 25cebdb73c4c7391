//! Solving `δτ = φ` for a normalized 2-cochain `τ`.
//!
//! The unknowns are `τ(x,y)` for nonzero `x, y`, valued in `(1/M)Z/Z` with
//! `M = N·e`, `N` the denominator of `φ` and `e` the exponent of the group;
//! since `e` kills `H²`, any solution can be moved into that range. The
//! linear system over `Z/M` is split into
//! prime-power parts, each solved by elimination over the local ring
//! `Z/p^k` with full pivoting on minimal `p`-valuation, then recombined.

use super::{Cochain2, Cochain3, Phase};
use crate::error::{Error, Result};

/// Largest group order the solver accepts; the system has `(|G|-1)³` rows.
pub const MAX_ORDER: usize = 16;

/// A normalized `τ` with `δτ = φ`, or [`Error::NotACoboundary`].
pub fn solve_potential(phi: &Cochain3) -> Result<Cochain2> {
    let g = phi.group();
    let n = g.order();
    if n > MAX_ORDER {
        return Err(Error::TooLarge(format!(
            "potential solver limited to groups of order ≤ {MAX_ORDER}, got {n}"
        )));
    }
    if phi.is_zero() {
        return Ok(Cochain2::zero(g));
    }
    let scale = g.exponent();
    let big_n = phi.denominator() * scale;
    let m = n - 1;
    let var = |x: usize, y: usize| (x - 1) * m + (y - 1);
    let cols = m * m;

    // δτ(x,y,z) = τ(y,z) − τ(x+y,z) + τ(x,y+z) − τ(x,y); zero-argument
    // entries of τ drop out.
    let mut rows: Vec<(Vec<i64>, u64)> = Vec::new();
    for x in 1..n {
        for y in 1..n {
            for z in 1..n {
                let mut row = vec![0i64; cols];
                let mut put = |a: usize, b: usize, s: i64| {
                    if a != 0 && b != 0 {
                        row[var(a, b)] += s;
                    }
                };
                put(y, z, 1);
                put(g.add(x, y), z, -1);
                put(x, g.add(y, z), 1);
                put(x, y, -1);
                rows.push((row, phi.raw(x, y, z) * scale));
            }
        }
    }

    let mut solution = vec![0u64; cols];
    let mut modulus = 1u64;
    for (p, k) in factorize(big_n) {
        let q = p.pow(k);
        let part = solve_local(&rows, cols, p, k).ok_or(Error::NotACoboundary)?;
        for (s, &r) in solution.iter_mut().zip(&part) {
            *s = crt(*s, modulus, r, q);
        }
        modulus *= q;
    }

    let tau = Cochain2::from_fn(g, |x, y| {
        if x == 0 || y == 0 {
            Phase::ZERO
        } else {
            Phase::new(solution[var(x, y)] as i64, big_n)
        }
    })?;
    debug_assert_eq!(tau.coboundary(), *phi);
    Ok(tau)
}

fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        let mut k = 0;
        while n % p == 0 {
            n /= p;
            k += 1;
        }
        if k > 0 {
            out.push((p, k));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn valuation(mut a: u64, p: u64) -> u32 {
    let mut v = 0;
    while a != 0 && a % p == 0 {
        a /= p;
        v += 1;
    }
    v
}

fn inv_mod(a: u64, m: u64) -> u64 {
    let (mut t, mut nt, mut r, mut nr) = (0i128, 1i128, m as i128, a as i128);
    while nr != 0 {
        let q = r / nr;
        (t, nt) = (nt, t - q * nt);
        (r, nr) = (nr, r - q * nr);
    }
    debug_assert_eq!(r, 1, "not invertible");
    t.rem_euclid(m as i128) as u64
}

fn crt(a: u64, m: u64, b: u64, n: u64) -> u64 {
    // x ≡ a (mod m), x ≡ b (mod n), gcd(m, n) = 1.
    let diff = (b as i128 - a as i128).rem_euclid(n as i128) as u64;
    let t = (diff as u128 * inv_mod(m % n, n) as u128 % n as u128) as u64;
    a + m * t
}

/// Solve `A x = b` over `Z/p^k`; `b` is given mod `N`, reduced here.
fn solve_local(rows: &[(Vec<i64>, u64)], cols: usize, p: u64, k: u32) -> Option<Vec<u64>> {
    let q = p.pow(k);
    let mut a: Vec<Vec<u64>> = rows
        .iter()
        .map(|(r, _)| r.iter().map(|&v| v.rem_euclid(q as i64) as u64).collect())
        .collect();
    let mut b: Vec<u64> = rows.iter().map(|(_, v)| v % q).collect();
    let nrows = a.len();
    let mut perm: Vec<usize> = (0..cols).collect();
    let mut pivots = Vec::new();

    let mut r = 0;
    while r < nrows.min(cols) {
        let mut best: Option<(u32, usize, usize)> = None;
        'search: for i in r..nrows {
            for j in r..cols {
                let v = a[i][j];
                if v != 0 {
                    let val = valuation(v, p);
                    if best.is_none_or(|(bv, _, _)| val < bv) {
                        best = Some((val, i, j));
                        if val == 0 {
                            break 'search;
                        }
                    }
                }
            }
        }
        let Some((v, i, j)) = best else { break };
        a.swap(r, i);
        b.swap(r, i);
        for row in a.iter_mut() {
            row.swap(r, j);
        }
        perm.swap(r, j);

        let pv = p.pow(v);
        let unit_inv = inv_mod(a[r][r] / pv, q);
        let (head, tail) = a.split_at_mut(r + 1);
        let pivot_row = &head[r];
        for (off, row) in tail.iter_mut().enumerate() {
            let e = row[r];
            if e == 0 {
                continue;
            }
            let f = (e / pv) as u128 * unit_inv as u128 % q as u128;
            for c in r..cols {
                let sub = f * pivot_row[c] as u128 % q as u128;
                row[c] = ((row[c] as u128 + q as u128 - sub) % q as u128) as u64;
            }
            let bi = r + 1 + off;
            let sub = f * b[r] as u128 % q as u128;
            b[bi] = ((b[bi] as u128 + q as u128 - sub) % q as u128) as u64;
        }
        pivots.push(v);
        r += 1;
    }
    let rank = r;
    if b[rank..].iter().any(|&v| v != 0) {
        return None;
    }

    let mut y = vec![0u64; cols];
    for r in (0..rank).rev() {
        let mut t = b[r] as i128;
        for c in r + 1..cols {
            t -= a[r][c] as i128 * y[c] as i128;
        }
        let t = t.rem_euclid(q as i128) as u64;
        let pv = p.pow(pivots[r]);
        if t % pv != 0 {
            return None;
        }
        let unit = a[r][r] / pv;
        let reduced = q / pv;
        y[r] = ((t / pv) as u128 * inv_mod(unit % reduced, reduced) as u128 % reduced as u128) as u64;
    }
    let mut x = vec![0u64; cols];
    for (pos, &orig) in perm.iter().enumerate() {
        x[orig] = y[pos];
    }
    Some(x)
}
