//! Exact Gaussian-rational scalars.
//!
//! Operator coefficients are kept as complex numbers with `BigRational` real
//! and imaginary parts so that nilpotency and rank computations are exact.
//! The ubiquitous 1/sqrt(2) prefactor of the lift constructions is *not*
//! representable here; it is tracked separately as a power-of-(1/sqrt2)
//! scale on whole operators and matrices.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use num_complex::Complex64;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

/// A complex number with exact rational real and imaginary parts.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct Coeff {
    pub re: BigRational,
    pub im: BigRational,
}

impl Coeff {
    pub fn zero() -> Self {
        Coeff {
            re: BigRational::zero(),
            im: BigRational::zero(),
        }
    }

    pub fn one() -> Self {
        Coeff {
            re: BigRational::one(),
            im: BigRational::zero(),
        }
    }

    pub fn i() -> Self {
        Coeff {
            re: BigRational::zero(),
            im: BigRational::one(),
        }
    }

    pub fn from_int(n: i64) -> Self {
        Coeff {
            re: BigRational::from_integer(BigInt::from(n)),
            im: BigRational::zero(),
        }
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Coeff {
            re: BigRational::new(BigInt::from(num), BigInt::from(den)),
            im: BigRational::zero(),
        }
    }

    pub fn from_parts(re: BigRational, im: BigRational) -> Self {
        Coeff { re, im }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Coeff {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(rat_to_f64(&self.re), rat_to_f64(&self.im))
    }

    pub fn abs_f64(&self) -> f64 {
        self.to_c64().norm()
    }

    /// Parse a scalar in the operator text format: `3`, `-1/2`, `i`, `1+i`,
    /// `2-3/4i`. Decimal literals such as `0.5` are read exactly.
    pub fn parse(s: &str) -> Option<Self> {
        let s = s.trim();
        if s.is_empty() {
            return None;
        }
        // Split into real and imaginary parts at a '+'/'-' that is not leading
        // and not part of an exponent (the format has no exponents).
        let bytes = s.as_bytes();
        let mut split = None;
        for (k, &b) in bytes.iter().enumerate().skip(1) {
            if (b == b'+' || b == b'-') && bytes[k - 1] != b'/' {
                split = Some(k);
            }
        }
        if s.ends_with('i') || s.ends_with('I') {
            match split {
                Some(k) => {
                    let re = parse_rational(&s[..k])?;
                    let im_str = &s[k..s.len() - 1];
                    let im = if im_str == "+" || im_str == "-" {
                        let one = BigRational::one();
                        if im_str == "-" {
                            -one
                        } else {
                            one
                        }
                    } else {
                        parse_rational(im_str)?
                    };
                    Some(Coeff { re, im })
                }
                None => {
                    let im_str = &s[..s.len() - 1];
                    let im = if im_str.is_empty() || im_str == "+" {
                        BigRational::one()
                    } else if im_str == "-" {
                        -BigRational::one()
                    } else {
                        parse_rational(im_str)?
                    };
                    Some(Coeff {
                        re: BigRational::zero(),
                        im,
                    })
                }
            }
        } else {
            Some(Coeff {
                re: parse_rational(s)?,
                im: BigRational::zero(),
            })
        }
    }
}

/// Parse `p`, `p/q`, or a decimal literal into an exact rational.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num.trim().parse().ok()?;
        let d: BigInt = den.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.trim_start().starts_with('-');
        let i: BigInt = if int.is_empty() || int == "-" || int == "+" {
            BigInt::zero()
        } else {
            int.parse().ok()?
        };
        let f: BigInt = if frac.is_empty() {
            BigInt::zero()
        } else {
            frac.parse().ok()?
        };
        if f.is_negative() {
            return None;
        }
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let mag = i.abs() * &scale + f;
        let signed = if neg { -mag } else { mag };
        return Some(BigRational::new(signed, scale));
    }
    let n: BigInt = s.parse().ok()?;
    Some(BigRational::from_integer(n))
}

pub fn rat_to_f64(r: &BigRational) -> f64 {
    // BigRational has no direct f64 conversion; go through a scaled quotient.
    let num = r.numer();
    let den = r.denom();
    match (num.to_string().parse::<f64>(), den.to_string().parse::<f64>()) {
        (Ok(n), Ok(d)) if d.is_finite() && n.is_finite() => n / d,
        _ => {
            // Fall back to long division for huge components.
            let q = num / den;
            q.to_string().parse::<f64>().unwrap_or(f64::NAN)
        }
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", fmt_rational(&self.re))
        } else if self.re.is_zero() {
            write!(f, "{}i", fmt_rational(&self.im))
        } else if self.im.is_negative() {
            write!(
                f,
                "{}-{}i",
                fmt_rational(&self.re),
                fmt_rational(&(-self.im.clone()))
            )
        } else {
            write!(f, "{}+{}i", fmt_rational(&self.re), fmt_rational(&self.im))
        }
    }
}

impl Add for Coeff {
    type Output = Coeff;
    fn add(self, rhs: Coeff) -> Coeff {
        Coeff {
            re: self.re + rhs.re,
            im: self.im + rhs.im,
        }
    }
}

impl AddAssign for Coeff {
    fn add_assign(&mut self, rhs: Coeff) {
        self.re += rhs.re;
        self.im += rhs.im;
    }
}

impl Sub for Coeff {
    type Output = Coeff;
    fn sub(self, rhs: Coeff) -> Coeff {
        Coeff {
            re: self.re - rhs.re,
            im: self.im - rhs.im,
        }
    }
}

impl Neg for Coeff {
    type Output = Coeff;
    fn neg(self) -> Coeff {
        Coeff {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl Mul for Coeff {
    type Output = Coeff;
    fn mul(self, rhs: Coeff) -> Coeff {
        &self * &rhs
    }
}

impl Mul for &Coeff {
    type Output = Coeff;
    fn mul(self, rhs: &Coeff) -> Coeff {
        Coeff {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display_round_trip() {
        for s in ["3", "-1/2", "i", "-i", "1+i", "2-3/4i", "0", "5/3+1/7i"] {
            let c = Coeff::parse(s).unwrap();
            let back = Coeff::parse(&c.to_string()).unwrap();
            assert_eq!(c, back, "round trip failed for {s}");
        }
    }

    #[test]
    fn parse_decimal_exact() {
        let c = Coeff::parse("0.5").unwrap();
        assert_eq!(c, Coeff::from_ratio(1, 2));
        let c = Coeff::parse("-0.25").unwrap();
        assert_eq!(c, Coeff::from_ratio(-1, 4));
    }

    #[test]
    fn complex_mul() {
        let a = Coeff::parse("1+i").unwrap();
        let b = Coeff::parse("1-i").unwrap();
        assert_eq!(a * b, Coeff::from_int(2));
        let i = Coeff::i();
        assert_eq!(i.clone() * i, Coeff::from_int(-1));
    }
}
