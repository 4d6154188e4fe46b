//! Dense univariate polynomial helpers on coefficient slices.

use crate::Real;

pub(crate) fn eval<T: Real>(c: &[T], x: T) -> T {
    c.iter().rev().fold(T::zero(), |acc, &a| acc * x + a)
}

pub(crate) fn eval_derivs<T: Real>(c: &[T], x: T) -> [T; 3] {
    let (mut v, mut d1, mut d2) = (T::zero(), T::zero(), T::zero());
    for &a in c.iter().rev() {
        d2 = d2 * x + d1;
        d1 = d1 * x + v;
        v = v * x + a;
    }
    [v, d1, d2 + d2]
}

#[allow(dead_code)]
pub(crate) fn trim<T: Real>(mut a: Vec<T>, cap: Option<usize>) -> Vec<T> {
    if let Some(n) = cap {
        a.truncate(n + 1);
    }
    a
}

pub(crate) fn add<T: Real>(a: &[T], b: &[T]) -> Vec<T> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| {
            a.get(i).copied().unwrap_or_else(T::zero) + b.get(i).copied().unwrap_or_else(T::zero)
        })
        .collect()
}

pub(crate) fn scale<T: Real>(a: &[T], f: T) -> Vec<T> {
    a.iter().map(|&x| x * f).collect()
}

pub(crate) fn add_const<T: Real>(a: &[T], c: T) -> Vec<T> {
    let mut r = if a.is_empty() {
        vec![T::zero()]
    } else {
        a.to_vec()
    };
    r[0] = r[0] + c;
    r
}

/// Multiplies by `x^k`.
pub(crate) fn shift<T: Real>(a: &[T], k: usize) -> Vec<T> {
    let mut r = vec![T::zero(); k];
    r.extend_from_slice(a);
    r
}

pub(crate) fn mul<T: Real>(a: &[T], b: &[T], cap: Option<usize>) -> Vec<T> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut n = a.len() + b.len() - 1;
    if let Some(c) = cap {
        n = n.min(c + 1);
    }
    let mut r = vec![T::zero(); n];
    for (i, &x) in a.iter().enumerate().take(n) {
        if x.is_zero() {
            continue;
        }
        for (j, &y) in b.iter().enumerate().take(n - i) {
            r[i + j] = r[i + j] + x * y;
        }
    }
    r
}

/// Truncated reciprocal of a series with nonzero constant term.
pub(crate) fn reciprocal<T: Real>(a: &[T], n: usize) -> Vec<T> {
    let mut r = vec![T::zero(); n + 1];
    r[0] = T::one() / a[0];
    for k in 1..=n {
        let mut s = T::zero();
        for j in 1..=k.min(a.len() - 1) {
            s = s + a[j] * r[k - j];
        }
        r[k] = -s * r[0];
    }
    r
}
