//! Error-free transformations on binary64.
//!
//! Every function here returns a rounded result together with the exact
//! rounding error, so that `a op b == hi + lo` holds in real arithmetic.

/// Knuth's branch-free two-sum: `s = fl(a + b)` and `a + b = s + e` exactly.
#[inline(always)]
pub fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

/// Dekker's fast two-sum. Exact only when `a == 0` or `|a| >= |b|`.
#[inline(always)]
pub fn fast_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let e = b - (s - a);
    (s, e)
}

/// `p = fl(a * b)` and `a * b = p + e` exactly.
///
/// Uses a fused multiply-add when the build target guarantees one in
/// hardware, Dekker/Veltkamp splitting otherwise.
#[inline(always)]
pub fn two_prod(a: f64, b: f64) -> (f64, f64) {
    if cfg!(target_feature = "fma") {
        two_prod_fma(a, b)
    } else {
        two_prod_dekker(a, b)
    }
}

/// Two-product through `f64::mul_add`, which is always correctly rounded
/// (in software when the target has no FMA unit).
#[inline(always)]
pub fn two_prod_fma(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let e = a.mul_add(b, -p);
    (p, e)
}

const SPLITTER: f64 = 134_217_729.0; // 2^27 + 1

/// Veltkamp split of `a` into two halves of at most 26 significant bits each.
#[inline(always)]
pub fn split(a: f64) -> (f64, f64) {
    let t = SPLITTER * a;
    let hi = t - (t - a);
    (hi, a - hi)
}

/// Dekker's two-product. Valid while `|a|, |b| < 2^996` and the error term
/// does not underflow.
#[inline(always)]
pub fn two_prod_dekker(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    let e = ((ah * bh - p) + ah * bl + al * bh) + al * bl;
    (p, e)
}

/// Unit in the last place of a finite binary64 value (the gap above `|x|`).
pub fn ulp(x: f64) -> f64 {
    let x = x.abs();
    if x == 0.0 {
        return f64::from_bits(1);
    }
    let bits = x.to_bits();
    let exp = (bits >> 52) as i32;
    if exp == 0 {
        // subnormal: fixed spacing
        f64::from_bits(1)
    } else {
        // 2^(exp - 1075)
        let e = exp - 1075;
        if e >= -1074 {
            ldexp(1.0, e)
        } else {
            f64::from_bits(1)
        }
    }
}

/// `x * 2^e` computed exactly (no intermediate overflow for the ranges used here).
pub(crate) fn ldexp(mut x: f64, mut e: i32) -> f64 {
    while e > 1000 {
        x *= f64::from_bits(0x7E70_0000_0000_0000); // 2^1000
        e -= 1000;
    }
    while e < -1000 {
        x *= f64::from_bits(0x0170_0000_0000_0000); // 2^-1000
        e += 1000;
    }
    let pow = if e >= -1022 {
        f64::from_bits(((e + 1023) as u64) << 52)
    } else {
        // 2^e as a subnormal
        f64::from_bits(1u64 << (e + 1074))
    };
    x * pow
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_sum_small_addend_is_its_own_error() {
        let tiny = ldexp(1.0, -60);
        assert_eq!(two_sum(1.0, tiny), (1.0, tiny));
        assert_eq!(two_sum(-3.5, 0.0), (-3.5, 0.0));
    }

    #[test]
    fn two_sum_at_the_integer_limit() {
        let big = ldexp(1.0, 53);
        let (s, e) = two_sum(big, 1.0);
        // 2^53 + 1 ties to even: 2^53
        assert_eq!(s, big);
        assert_eq!(e, 1.0);
    }

    #[test]
    fn both_two_prod_paths_agree() {
        let a = 1.0 + ldexp(1.0, -27);
        assert_eq!(two_prod_fma(a, a), two_prod_dekker(a, a));
        assert_eq!(two_prod_fma(3.0, 1.0 / 3.0), two_prod_dekker(3.0, 1.0 / 3.0));
        assert_eq!(two_prod(1.0, 0.1), (0.1, 0.0));
    }

    #[test]
    fn split_halves_recombine() {
        for &a in &[0.1, -7.25e290, 3.0e-200, 1.0 / 3.0] {
            let (h, l) = split(a);
            assert_eq!(h + l, a);
        }
    }

    #[test]
    fn ulp_of_one() {
        assert_eq!(ulp(1.0), ldexp(1.0, -52));
        assert_eq!(ulp(-1.5), ldexp(1.0, -52));
        assert_eq!(ulp(0.75), ldexp(1.0, -53));
    }
}
