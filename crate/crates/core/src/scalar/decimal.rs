//! Exact decimal formatting and parsing for sums of binary64 components.

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid decimal literal {input:?}")]
pub struct ParseDecimalError {
    pub input: String,
}

/// Significant decimal digits that guarantee a round trip for a significand
/// of `bits` bits.
pub fn round_trip_digits(bits: u32) -> usize {
    (bits as f64 * 0.302 + 2.0).ceil() as usize
}

/// Exact rational value of a finite component list.
pub fn exact_value(components: &[f64]) -> BigRational {
    components
        .iter()
        .map(|&c| BigRational::from_float(c).expect("finite component"))
        .fold(BigRational::zero(), |a, b| a + b)
}

fn pow10(k: u32) -> BigInt {
    num_traits::pow(BigInt::from(10u32), k as usize)
}

/// Scientific notation `d.ddd…e±x` with `digits` significant digits,
/// rounded half-away-from-zero.
pub fn format_components(components: &[f64], digits: usize, trim: bool) -> String {
    let lead = components[0];
    if lead.is_nan() || components.iter().any(|c| c.is_nan()) {
        return "NaN".to_string();
    }
    if lead.is_infinite() {
        return if lead > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let digits = digits.max(1);
    if lead == 0.0 {
        let sign = if lead.is_sign_negative() { "-" } else { "" };
        return if trim || digits == 1 {
            format!("{sign}0e0")
        } else {
            format!("{sign}0.{}e0", "0".repeat(digits - 1))
        };
    }
    let value = exact_value(components);
    let negative = value.is_negative();
    let magnitude = value.abs();

    let mut k = lead.abs().log10().floor() as i64;
    let mantissa = loop {
        let shift = digits as i64 - 1 - k;
        let scaled = if shift >= 0 {
            &magnitude * BigRational::from_integer(pow10(shift as u32))
        } else {
            &magnitude / BigRational::from_integer(pow10((-shift) as u32))
        };
        let m = scaled.round().to_integer();
        if m >= pow10(digits as u32) {
            k += 1;
        } else if m < pow10(digits as u32 - 1) {
            k -= 1;
        } else {
            break m;
        }
    };
    let text = mantissa.to_str_radix(10);
    let (head, tail) = text.split_at(1);
    let tail = if trim { tail.trim_end_matches('0') } else { tail };
    let sign = if negative { "-" } else { "" };
    if tail.is_empty() {
        format!("{sign}{head}e{k}")
    } else {
        format!("{sign}{head}.{tail}e{k}")
    }
}

/// Parses a decimal literal into `n` binary64 components whose exact sum is
/// the literal rounded component by component (not yet renormalized).
pub fn parse_components(input: &str, n: usize) -> Result<Vec<f64>, ParseDecimalError> {
    let err = || ParseDecimalError { input: input.to_string() };
    let s = input.trim();
    let (negative, body) = match s.as_bytes().first() {
        Some(b'-') => (true, &s[1..]),
        Some(b'+') => (false, &s[1..]),
        _ => (false, s),
    };
    let lower = body.to_ascii_lowercase();
    let mut out = vec![0.0; n];
    if lower == "inf" || lower == "infinity" {
        out[0] = if negative { f64::NEG_INFINITY } else { f64::INFINITY };
        return Ok(out);
    }
    if lower == "nan" {
        out[0] = f64::NAN;
        return Ok(out);
    }

    let (mant, exp) = match lower.find('e') {
        Some(pos) => {
            let e: i64 = lower[pos + 1..].parse().map_err(|_| err())?;
            (&lower[..pos], e)
        }
        None => (lower.as_str(), 0),
    };
    let (int_part, frac_part) = match mant.find('.') {
        Some(pos) => (&mant[..pos], &mant[pos + 1..]),
        None => (mant, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(err());
    }
    let digits = format!("{int_part}{frac_part}");
    let digits = digits.trim_start_matches('0');
    if digits.is_empty() {
        out[0] = if negative { -0.0 } else { 0.0 };
        return Ok(out);
    }
    let exp10 = exp - frac_part.len() as i64;
    // Literals beyond this range saturate to infinity or zero in every format.
    let approx_mag = exp10 + digits.len() as i64;
    if approx_mag > 400 {
        out[0] = if negative { f64::NEG_INFINITY } else { f64::INFINITY };
        return Ok(out);
    }
    if approx_mag < -400 {
        out[0] = if negative { -0.0 } else { 0.0 };
        return Ok(out);
    }
    let int = BigInt::parse_bytes(digits.as_bytes(), 10).ok_or_else(err)?;
    let int = if negative { -int } else { int };
    let mut rem = if exp10 >= 0 {
        BigRational::from_integer(int * pow10(exp10 as u32))
    } else {
        BigRational::new(int, pow10((-exp10) as u32))
    };
    rem = round_to_significand(&rem, 53 * n as i64);
    for slot in out.iter_mut() {
        if rem.is_zero() {
            break;
        }
        let c = nearest_f64(&rem);
        *slot = c;
        if !c.is_finite() || c == 0.0 {
            break;
        }
        rem -= BigRational::from_float(c).expect("finite");
    }
    Ok(out)
}

/// Rounds a nonzero rational to `bits` significant bits (not below the
/// binary64 subnormal quantum), so a parsed literal lands on the format's
/// grid instead of carrying the literal's sub-ulp excess in its tail.
fn round_to_significand(q: &BigRational, bits: i64) -> BigRational {
    let mag = q.abs();
    let (num, den) = (mag.numer(), mag.denom());
    // e = floor(log2 |q|)
    let mut e = num.bits() as i64 - den.bits() as i64;
    let pow2 = |k: i64| -> BigRational {
        if k >= 0 {
            BigRational::from_integer(BigInt::from(1) << k as usize)
        } else {
            BigRational::new(BigInt::from(1), BigInt::from(1) << (-k) as usize)
        }
    };
    if mag < pow2(e) {
        e -= 1;
    }
    let quantum = pow2((e - bits + 1).max(-1074));
    (q / &quantum).round() * quantum
}

/// Binary64 value closest to a rational (ties resolved by the integer
/// conversion; callers refine with further components).
fn nearest_f64(r: &BigRational) -> f64 {
    if let Some(x) = r.to_f64() {
        if x.is_finite() && (x != 0.0 || r.is_zero()) {
            return x;
        }
    }
    // Fall back to scaling by a power of two.
    let numer = r.numer();
    let denom = r.denom();
    let shift = denom.bits() as i64 - numer.bits() as i64 + 64;
    let scaled = if shift >= 0 {
        (numer << shift as usize) / denom
    } else {
        numer / (denom << (-shift) as usize)
    };
    let (sign, mag) = scaled.into_parts();
    let m = mag.to_f64().unwrap_or(f64::INFINITY);
    let v = super::eft::ldexp(m, (-shift).clamp(-1200, 1200) as i32);
    if sign == Sign::Minus {
        -v
    } else {
        v
    }
}
