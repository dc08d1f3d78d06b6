//! Exact rational scalars and their text renderings.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

/// Arbitrary-precision rational scalar. `num`'s `Ratio` keeps the value in
/// canonical form: positive denominator, gcd(numerator, denominator) = 1.
pub type Rat = num_rational::BigRational;

/// Rational from an integer pair. Panics on a zero denominator.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// Rational from an integer.
pub fn rat_i(num: i64) -> Rat {
    Rat::from_integer(BigInt::from(num))
}

pub fn rat_is_integer(r: &Rat) -> bool {
    r.denom().is_one()
}

/// Largest integer <= r.
pub fn rat_floor(r: &Rat) -> BigInt {
    r.floor().to_integer()
}

/// Smallest integer >= r.
pub fn rat_ceil(r: &Rat) -> BigInt {
    r.ceil().to_integer()
}

/// Smallest integer strictly greater than r.
pub fn strict_ceil(r: &Rat) -> BigInt {
    if rat_is_integer(r) {
        r.to_integer() + 1
    } else {
        rat_ceil(r)
    }
}

/// Largest integer strictly smaller than r.
pub fn strict_floor(r: &Rat) -> BigInt {
    if rat_is_integer(r) {
        r.to_integer() - 1
    } else {
        rat_floor(r)
    }
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Parses "3/4", "-2", or a decimal like "1.25" into an exact rational.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty rational".into()));
    }
    if let Some((n, d)) = s.split_once('/') {
        let num: BigInt = n
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad numerator in {s:?}")))?;
        let den: BigInt = d
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad denominator in {s:?}")))?;
        if den.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(Rat::new(num, den));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        let frac_digits = frac_part.len() as u32;
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::Parse(format!("bad decimal {s:?}")));
        }
        let negative = int_part.starts_with('-');
        let int_val: BigInt = if int_part == "-" || int_part.is_empty() {
            BigInt::zero()
        } else {
            int_part
                .parse()
                .map_err(|_| Error::Parse(format!("bad decimal {s:?}")))?
        };
        let frac_val: BigInt = frac_part
            .parse()
            .map_err(|_| Error::Parse(format!("bad decimal {s:?}")))?;
        let scale = BigInt::from(10u32).pow(frac_digits);
        let mut num = int_val.abs() * &scale + frac_val;
        if negative {
            num = -num;
        }
        return Ok(Rat::new(num, scale));
    }
    let num: BigInt = s
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
    Ok(Rat::from_integer(num))
}

/// Renders r with 12 significant digits, by exact long division.
///
/// Values whose magnitude is outside [1e-4, 1e15) use scientific notation;
/// everything the sweeps produce stays in plain decimal.
pub fn dec12(r: &Rat) -> String {
    dec_sig(r, 12)
}

pub fn dec_sig(r: &Rat, sig: u32) -> String {
    assert!(unchecked_sig_ok(sig));
    if r.is_zero() {
        return "0".to_string();
    }
    let negative = r.is_negative();
    let num = r.numer().abs();
    let den = r.denom().clone();

    // exponent e with 10^e <= num/den < 10^(e+1)
    let mut e: i64 = num.to_string().len() as i64 - den.to_string().len() as i64;
    let pow = |k: i64| -> (BigInt, BigInt) {
        // returns (num*10^max(0,-k), den*10^max(0,k)) so ratio = r / 10^k
        if k >= 0 {
            (num.clone(), &den * BigInt::from(10u32).pow(k as u32))
        } else {
            (&num * BigInt::from(10u32).pow((-k) as u32), den.clone())
        }
    };
    {
        let (n, d) = pow(e);
        if n < d {
            e -= 1;
        }
    }
    {
        let (n, d) = pow(e + 1);
        if n >= d {
            e += 1;
        }
    }

    // digits = round(num/den * 10^(sig-1-e)), giving exactly `sig` digits
    let shift = sig as i64 - 1 - e;
    let (mut sn, mut sd) = (num.clone(), den.clone());
    if shift >= 0 {
        sn *= BigInt::from(10u32).pow(shift as u32);
    } else {
        sd *= BigInt::from(10u32).pow((-shift) as u32);
    }
    let (q, rem) = sn.div_rem(&sd);
    let mut digits = q;
    if &rem * 2 >= sd {
        digits += 1;
    }
    let mut ds = digits.to_string();
    if ds.len() as u32 > sig {
        // rounding carried over, e.g. 999.995 -> 1000.00
        e += 1;
        ds.truncate(sig as usize);
    }

    let sign = if negative { "-" } else { "" };
    if e >= -4 && e < 15 {
        if e >= sig as i64 - 1 {
            // integer with trailing zeros
            let mut out = ds;
            out.push_str(&"0".repeat((e - (sig as i64 - 1)) as usize));
            format!("{sign}{out}")
        } else if e >= 0 {
            let (int_part, frac_part) = ds.split_at((e + 1) as usize);
            format!("{sign}{int_part}.{frac_part}")
        } else {
            let zeros = "0".repeat((-e - 1) as usize);
            format!("{sign}0.{zeros}{ds}")
        }
    } else {
        let (first, rest) = ds.split_at(1);
        format!("{sign}{first}.{rest}e{e}")
    }
}

fn unchecked_sig_ok(sig: u32) -> bool {
    (1..=50).contains(&sig)
}
