//! Integer arithmetic shared by constant evaluation, ground-term evaluation
//! and the SAT encoders.
//!
//! Partial operations return `Ok(None)` when undefined and `Err(Overflow)`
//! when the mathematical result does not fit in 64 bits.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Overflow;

pub type ArithResult = Result<Option<i64>, Overflow>;

/// Floor division; undefined for a zero divisor.
pub fn div(a: i64, b: i64) -> ArithResult {
    if b == 0 {
        return Ok(None);
    }
    let q = a.checked_div(b).ok_or(Overflow)?;
    let r = a - q * b;
    if r != 0 && ((r < 0) != (b < 0)) {
        Ok(Some(q - 1))
    } else {
        Ok(Some(q))
    }
}

/// `a - b * floor(a / b)`; undefined for a zero divisor.
pub fn modulo(a: i64, b: i64) -> ArithResult {
    if b == 0 {
        return Ok(None);
    }
    if b == -1 {
        return Ok(Some(0));
    }
    let r = a % b;
    if r != 0 && ((r < 0) != (b < 0)) {
        Ok(Some(r + b))
    } else {
        Ok(Some(r))
    }
}

/// Integer power; undefined for `0**0` and negative exponents.
pub fn pow(base: i64, exp: i64) -> ArithResult {
    if exp < 0 || (base == 0 && exp == 0) {
        return Ok(None);
    }
    let mut result: i64 = 1;
    let mut b = base;
    let mut e = exp;
    // small bases never overflow however large the exponent
    match base {
        0 => return Ok(Some(0)),
        1 => return Ok(Some(1)),
        -1 => return Ok(Some(if exp % 2 == 0 { 1 } else { -1 })),
        _ => {}
    }
    while e > 0 {
        if e & 1 == 1 {
            result = result.checked_mul(b).ok_or(Overflow)?;
        }
        e >>= 1;
        if e > 0 {
            b = b.checked_mul(b).ok_or(Overflow)?;
        }
    }
    Ok(Some(result))
}

/// Factorial of `0..=20`; undefined outside that range.
pub fn factorial(x: i64) -> ArithResult {
    if !(0..=20).contains(&x) {
        return Ok(None);
    }
    Ok(Some((1..=x).product()))
}

/// Bit count of the 64-bit two's complement representation.
pub fn popcount(x: i64) -> i64 {
    (x as u64).count_ones() as i64
}

pub fn add(a: i64, b: i64) -> Result<i64, Overflow> {
    a.checked_add(b).ok_or(Overflow)
}

pub fn sub(a: i64, b: i64) -> Result<i64, Overflow> {
    a.checked_sub(b).ok_or(Overflow)
}

pub fn mul(a: i64, b: i64) -> Result<i64, Overflow> {
    a.checked_mul(b).ok_or(Overflow)
}

pub fn neg(a: i64) -> Result<i64, Overflow> {
    a.checked_neg().ok_or(Overflow)
}

pub fn abs(a: i64) -> Result<i64, Overflow> {
    a.checked_abs().ok_or(Overflow)
}

/// Total division used after partial functions are removed: 0 when undefined.
pub fn safe_div(a: i64, b: i64) -> Result<i64, Overflow> {
    div(a, b).map(|r| r.unwrap_or(0))
}

pub fn safe_mod(a: i64, b: i64) -> Result<i64, Overflow> {
    modulo(a, b).map(|r| r.unwrap_or(0))
}

pub fn safe_pow(a: i64, b: i64) -> Result<i64, Overflow> {
    pow(a, b).map(|r| r.unwrap_or(0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floor_division_examples() {
        assert_eq!(div(3, 2), Ok(Some(1)));
        assert_eq!(div(-3, 2), Ok(Some(-2)));
        assert_eq!(div(3, -2), Ok(Some(-2)));
        assert_eq!(div(-3, -2), Ok(Some(1)));
        assert_eq!(div(5, 0), Ok(None));
    }

    #[test]
    fn modulo_examples() {
        assert_eq!(modulo(3, 2), Ok(Some(1)));
        assert_eq!(modulo(-3, 2), Ok(Some(1)));
        assert_eq!(modulo(3, -2), Ok(Some(-1)));
        assert_eq!(modulo(-3, -2), Ok(Some(-1)));
        assert_eq!(modulo(i64::MIN, -1), Ok(Some(0)));
    }

    #[test]
    fn division_identity_exhaustive() {
        for a in -50i64..=50 {
            for b in -50i64..=50 {
                if b == 0 {
                    continue;
                }
                let q = div(a, b).unwrap().unwrap();
                let r = modulo(a, b).unwrap().unwrap();
                assert_eq!(a, b * q + r);
                assert_eq!(q, (a as f64 / b as f64).floor() as i64);
            }
        }
    }

    #[test]
    fn power_cases() {
        assert_eq!(pow(2, 10), Ok(Some(1024)));
        assert_eq!(pow(-2, 3), Ok(Some(-8)));
        assert_eq!(pow(0, 0), Ok(None));
        assert_eq!(pow(3, -1), Ok(None));
        assert_eq!(pow(0, 5), Ok(Some(0)));
        assert_eq!(pow(2, 63), Err(Overflow));
        assert_eq!(pow(-1, 1_000_001), Ok(Some(-1)));
    }

    #[test]
    fn factorial_and_popcount() {
        assert_eq!(factorial(5), Ok(Some(120)));
        assert_eq!(factorial(0), Ok(Some(1)));
        assert_eq!(factorial(20), Ok(Some(2_432_902_008_176_640_000)));
        assert_eq!(factorial(-1), Ok(None));
        assert_eq!(factorial(21), Ok(None));
        assert_eq!(popcount(-1), 64);
        assert_eq!(popcount(7), 3);
    }
}
