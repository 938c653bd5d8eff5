//! Brute-force reference computations, written without the library's
//! algorithms, for cross-checking.

use mukai_core::{Int, Rat};
use num_integer::Integer;
use num_traits::Signed;

/// (ℓ+ℓ′)/(r+r′) ≤ β < ℓ′/r′ with ℓ′ = a·ℓ, by direct substitution.
pub fn extension_inequality(degree: &Rat, rank: i64, a: i64, r_prime: i64, beta: &Rat) -> bool {
    let lp = degree * Rat::from_integer(a.into());
    let left = (degree + &lp) / Rat::from_integer((rank + r_prime).into());
    let right = lp / Rat::from_integer(r_prime.into());
    left <= *beta && *beta < right
}

/// First (a, r′) in order of r′, then a, with r′ ≥ `min_r_prime` and
/// r′ ≤ `max_r_prime`, satisfying [`extension_inequality`]. Scans every a whose ℓ′/r′
/// lands in (β, β + 1].
pub fn extension_search(degree: &Rat, rank: i64, beta: &Rat, min_r_prime: i64, max_r_prime: i64) -> Option<(i64, i64)> {
    assert!(degree.is_positive());
    for rp in min_r_prime.max(1)..=max_r_prime {
        let rpq = Rat::from_integer(rp.into());
        let lo = (beta * &rpq / degree).floor().to_integer();
        let hi = (beta * Rat::from_integer((rank + rp).into()) / degree)
            .ceil()
            .to_integer();
        let (lo, hi): (i64, i64) = (lo.try_into().ok()?, hi.try_into().ok()?);
        for a in lo..=hi {
            if extension_inequality(degree, rank, a, rp, beta) {
                return Some((a, rp));
            }
        }
    }
    None
}

/// Number of unordered coprime factorizations n = r·s, counted by
/// scanning every divisor r ≤ √n.
pub fn coprime_split_classes(n: u64) -> u64 {
    let mut count = 0;
    let mut r = 1;
    while r * r <= n {
        if n.is_multiple_of(r) && r.gcd(&(n / r)) == 1 {
            count += 1;
        }
        r += 1;
    }
    count
}

/// Number of distinct primes dividing n, by repeated smallest-factor
/// division.
pub fn omega(mut n: u64) -> u32 {
    let mut k = 0;
    let mut p = 2;
    while n > 1 {
        if n.is_multiple_of(p) {
            k += 1;
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    k
}

/// Smallest s′ with χ(F, E) = r·s′ + (r+r′)s − ℓ.(ℓ+ℓ′) > 0, by stepping
/// through s′ from `start`. `l_dot_sum` is ℓ.(ℓ+ℓ′).
pub fn sprime_scan(r: &Int, s: &Int, r_prime: &Int, l_dot_sum: &Int, start: &Int) -> Int {
    let chi = |sp: &Int| r * sp + (r + r_prime) * s - l_dot_sum;
    let mut sp = start.clone();
    while chi(&sp).is_positive() {
        sp -= 1;
    }
    while !chi(&sp).is_positive() {
        sp += 1;
    }
    sp
}
