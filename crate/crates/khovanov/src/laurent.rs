//! Exact Laurent polynomials in a single named variable.
//!
//! The variable is a `const` parameter, so bracket values in `A` and Jones
//! values in `q` are distinct types and cannot be mixed up by accident.
//! Coefficients are arbitrary-precision integers and the representation is
//! canonical: no zero coefficient is ever stored.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

/// Integer Laurent polynomial in the variable `V` (`'A'` or `'q'`).
#[derive(Clone, PartialEq, Eq, Default)]
pub struct Laurent<const V: char> {
    coeffs: BTreeMap<i64, BigInt>,
}

/// Kauffman-bracket values live in the variable `A`.
pub type APoly = Laurent<'A'>;
/// Jones-polynomial values live in Khovanov's variable `q`.
pub type QPoly = Laurent<'q'>;

impl<const V: char> Laurent<V> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(0, BigInt::one())
    }

    /// The monomial `c · V^exp`. Zero coefficients collapse to the zero polynomial.
    pub fn monomial(exp: i64, coeff: impl Into<BigInt>) -> Self {
        let coeff = coeff.into();
        let mut coeffs = BTreeMap::new();
        if !coeff.is_zero() {
            coeffs.insert(exp, coeff);
        }
        Self { coeffs }
    }

    /// The variable itself, `V^1`.
    pub fn var() -> Self {
        Self::monomial(1, 1)
    }

    pub fn from_terms<I, C>(terms: I) -> Self
    where
        I: IntoIterator<Item = (i64, C)>,
        C: Into<BigInt>,
    {
        let mut p = Self::zero();
        for (e, c) in terms {
            p.add_term(e, c.into());
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, exp: i64) -> BigInt {
        self.coeffs.get(&exp).cloned().unwrap_or_else(BigInt::zero)
    }

    /// Terms in ascending exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigInt)> {
        self.coeffs.iter().map(|(e, c)| (*e, c))
    }

    pub fn add_term(&mut self, exp: i64, coeff: BigInt) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(exp).or_insert_with(BigInt::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.coeffs.remove(&exp);
        }
    }

    /// Multiply by the monomial `c · V^exp` in place.
    pub fn mul_monomial(&self, exp: i64, coeff: impl Into<BigInt>) -> Self {
        let coeff = coeff.into();
        if coeff.is_zero() {
            return Self::zero();
        }
        Self {
            coeffs: self
                .coeffs
                .iter()
                .map(|(e, c)| (e + exp, c * &coeff))
                .collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// JSON form: list of `[exponent, coefficient]` pairs, ascending by exponent.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.terms()
                .map(|(e, c)| serde_json::json!([e, c.to_string().parse::<serde_json::Number>().map(serde_json::Value::Number).unwrap_or_else(|_| serde_json::Value::String(c.to_string()))]))
                .collect(),
        )
    }
}

impl QPoly {
    /// Substitute `q = -A^{-2}`, landing in the `A` variable.
    pub fn substitute_q_neg_a_inv_sq(&self) -> APoly {
        let mut p = APoly::zero();
        for (e, c) in self.terms() {
            // q^e = (-1)^e A^{-2e}
            let sign = if e.rem_euclid(2) == 0 { 1 } else { -1 };
            p.add_term(-2 * e, c * BigInt::from(sign));
        }
        p
    }
}

impl<const V: char> Add for &Laurent<V> {
    type Output = Laurent<V>;
    fn add(self, rhs: Self) -> Laurent<V> {
        let mut out = self.clone();
        for (e, c) in rhs.terms() {
            out.add_term(e, c.clone());
        }
        out
    }
}

impl<const V: char> Add for Laurent<V> {
    type Output = Laurent<V>;
    fn add(self, rhs: Self) -> Laurent<V> {
        &self + &rhs
    }
}

impl<const V: char> AddAssign<&Laurent<V>> for Laurent<V> {
    fn add_assign(&mut self, rhs: &Laurent<V>) {
        for (e, c) in rhs.terms() {
            self.add_term(e, c.clone());
        }
    }
}

impl<const V: char> Sub for &Laurent<V> {
    type Output = Laurent<V>;
    fn sub(self, rhs: Self) -> Laurent<V> {
        let mut out = self.clone();
        for (e, c) in rhs.terms() {
            out.add_term(e, -c.clone());
        }
        out
    }
}

impl<const V: char> Neg for Laurent<V> {
    type Output = Laurent<V>;
    fn neg(self) -> Laurent<V> {
        Laurent {
            coeffs: self.coeffs.into_iter().map(|(e, c)| (e, -c)).collect(),
        }
    }
}

impl<const V: char> Mul for &Laurent<V> {
    type Output = Laurent<V>;
    fn mul(self, rhs: Self) -> Laurent<V> {
        let mut out = Laurent::zero();
        for (e1, c1) in self.terms() {
            for (e2, c2) in rhs.terms() {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        out
    }
}

impl<const V: char> Mul for Laurent<V> {
    type Output = Laurent<V>;
    fn mul(self, rhs: Self) -> Laurent<V> {
        &self * &rhs
    }
}

impl<const V: char> fmt::Display for Laurent<V> {
    /// Text form used by the CLI: terms ascending by exponent,
    /// e.g. `-A^-2 - A^2` or `q^-1 + q`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms() {
            let neg = c.is_negative();
            let abs = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let unit = abs.is_one();
            match (e, unit) {
                (0, _) => write!(f, "{abs}")?,
                (1, true) => write!(f, "{V}")?,
                (1, false) => write!(f, "{abs}{V}")?,
                (_, true) => write!(f, "{V}^{e}")?,
                (_, false) => write!(f, "{abs}{V}^{e}")?,
            }
        }
        Ok(())
    }
}

impl<const V: char> fmt::Debug for Laurent<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_no_zero_terms() {
        let mut p = APoly::monomial(2, 3);
        p.add_term(2, BigInt::from(-3));
        assert!(p.is_zero());
        assert_eq!(p.to_string(), "0");
    }

    #[test]
    fn display_matches_cli_format() {
        let delta = APoly::from_terms([(2, -1), (-2, -1)]);
        assert_eq!(delta.to_string(), "-A^-2 - A^2");
        let k = QPoly::from_terms([(1, 1), (-1, 1)]);
        assert_eq!(k.to_string(), "q^-1 + q");
        let sq = &delta * &delta;
        assert_eq!(sq.to_string(), "A^-4 + 2 + A^4");
    }

    #[test]
    fn substitution_q_to_a() {
        // q + q^-1  ->  -A^-2 - A^2
        let k = QPoly::from_terms([(1, 1), (-1, 1)]);
        let a = k.substitute_q_neg_a_inv_sq();
        assert_eq!(a, APoly::from_terms([(-2, -1), (2, -1)]));
    }

    #[test]
    fn pow_and_mul() {
        let delta = APoly::from_terms([(2, -1), (-2, -1)]);
        assert_eq!(delta.pow(0), APoly::one());
        assert_eq!(
            delta.pow(2),
            APoly::from_terms([(4, 1), (0, 2), (-4, 1)])
        );
    }
}
