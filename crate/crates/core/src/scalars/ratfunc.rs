//! Elements of ℚ(x₁,…,xₙ) in canonical reduced form.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{One, Zero};

use super::poly::{gcd, Poly, Var, Q};

/// Reduced fraction with monic denominator. Equal functions compare equal.
#[derive(Clone, PartialEq, Eq)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl Default for RatFunc {
    fn default() -> Self {
        RatFunc::zero()
    }
}

impl RatFunc {
    pub fn zero() -> Self {
        RatFunc {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Self {
        RatFunc::constant(Q::one())
    }

    pub fn constant(c: Q) -> Self {
        RatFunc {
            num: Poly::constant(c),
            den: Poly::one(),
        }
    }

    pub fn var(v: &Var) -> Self {
        RatFunc::from_poly(Poly::var(v))
    }

    pub fn from_poly(p: Poly) -> Self {
        RatFunc {
            num: p,
            den: Poly::one(),
        }
    }

    /// Reduces `num/den`; `None` when `den` is zero.
    pub fn new(num: Poly, den: Poly) -> Option<Self> {
        if den.is_zero() {
            return None;
        }
        if num.is_zero() {
            return Some(RatFunc::zero());
        }
        if let Some(c) = den.as_constant() {
            return Some(RatFunc {
                num: num.scale(&c.recip()),
                den: Poly::one(),
            });
        }
        let g = gcd(&num, &den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (
                num.exact_div(&g).expect("gcd divides"),
                den.exact_div(&g).expect("gcd divides"),
            )
        };
        let lc = den.leading().map(|(_, c)| c.clone()).unwrap();
        let inv = lc.recip();
        Some(RatFunc {
            num: num.scale(&inv),
            den: den.scale(&inv),
        })
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn as_constant(&self) -> Option<Q> {
        if self.den.is_one() {
            self.num.as_constant()
        } else {
            None
        }
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut v = self.num.vars();
        v.extend(self.den.vars());
        v
    }

    pub fn add(&self, other: &RatFunc) -> RatFunc {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.den == other.den {
            return RatFunc::new(&self.num + &other.num, self.den.clone()).unwrap();
        }
        if self.den.is_one() {
            return RatFunc {
                num: &(&self.num * &other.den) + &other.num,
                den: other.den.clone(),
            };
        }
        if other.den.is_one() {
            return RatFunc {
                num: &self.num + &(&other.num * &self.den),
                den: self.den.clone(),
            };
        }
        let g = gcd(&self.den, &other.den);
        let a = self.den.exact_div(&g).unwrap();
        let b = other.den.exact_div(&g).unwrap();
        let num = &(&self.num * &b) + &(&other.num * &a);
        let den = &(&a * &b) * &g;
        RatFunc::new(num, den).unwrap()
    }

    pub fn neg(&self) -> RatFunc {
        RatFunc {
            num: -&self.num,
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, other: &RatFunc) -> RatFunc {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &RatFunc) -> RatFunc {
        if self.is_zero() || other.is_zero() {
            return RatFunc::zero();
        }
        if self.den.is_one() && other.den.is_one() {
            return RatFunc::from_poly(&self.num * &other.num);
        }
        // Cross-cancel so the product is already reduced.
        let g1 = gcd(&self.num, &other.den);
        let g2 = gcd(&other.num, &self.den);
        let n1 = self.num.exact_div(&g1).unwrap();
        let d2 = other.den.exact_div(&g1).unwrap();
        let n2 = other.num.exact_div(&g2).unwrap();
        let d1 = self.den.exact_div(&g2).unwrap();
        let num = &n1 * &n2;
        let den = &d1 * &d2;
        let lc = den.leading().map(|(_, c)| c.clone()).unwrap();
        let inv = lc.recip();
        RatFunc {
            num: num.scale(&inv),
            den: den.scale(&inv),
        }
    }

    pub fn recip(&self) -> Option<RatFunc> {
        if self.is_zero() {
            return None;
        }
        let lc = self.num.leading().map(|(_, c)| c.clone()).unwrap();
        let inv = lc.recip();
        Some(RatFunc {
            num: self.den.scale(&inv),
            den: self.num.scale(&inv),
        })
    }

    pub fn div(&self, other: &RatFunc) -> Option<RatFunc> {
        Some(self.mul(&other.recip()?))
    }

    pub fn scale(&self, c: &Q) -> RatFunc {
        if c.is_zero() {
            return RatFunc::zero();
        }
        RatFunc {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn powi(&self, e: i32) -> Option<RatFunc> {
        if e < 0 {
            return self.recip()?.powi(-e);
        }
        let e = e as u32;
        Some(RatFunc {
            num: self.num.pow(e),
            den: self.den.pow(e),
        })
    }

    pub fn derivative(&self, v: &Var) -> RatFunc {
        if self.den.is_one() {
            return RatFunc::from_poly(self.num.derivative(v));
        }
        let dn = self.num.derivative(v);
        let dd = self.den.derivative(v);
        let num = &(&dn * &self.den) - &(&self.num * &dd);
        RatFunc::new(num, &self.den * &self.den).unwrap()
    }

    /// Exact value, `Err(())` when the denominator vanishes or a variable is missing.
    pub fn eval_q(&self, point: &dyn Fn(&Var) -> Option<Q>) -> Result<Q, RatEvalError> {
        let d = self.den.eval_q(point).ok_or(RatEvalError::MissingVariable)?;
        if d.is_zero() {
            return Err(RatEvalError::DenominatorVanishes);
        }
        let n = self.num.eval_q(point).ok_or(RatEvalError::MissingVariable)?;
        Ok(n / d)
    }

    pub fn eval_f64(&self, point: &dyn Fn(&Var) -> Option<f64>) -> Result<f64, RatEvalError> {
        let ev = |p: &Poly| -> Result<f64, RatEvalError> {
            let mut acc = 0.0;
            for (m, c) in p.terms() {
                let mut t = q_to_f64(c);
                for (v, e) in m.factors() {
                    let x = point(v).ok_or(RatEvalError::MissingVariable)?;
                    t *= x.powi(*e as i32);
                }
                acc += t;
            }
            Ok(acc)
        };
        let d = ev(&self.den)?;
        if d == 0.0 {
            return Err(RatEvalError::DenominatorVanishes);
        }
        Ok(ev(&self.num)? / d)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RatEvalError {
    DenominatorVanishes,
    MissingVariable,
}

pub fn q_to_f64(c: &Q) -> f64 {
    use num_traits::ToPrimitive;
    c.to_f64().unwrap_or_else(|| {
        let n = c.numer().to_f64().unwrap_or(f64::NAN);
        let d = c.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        let n = if self.num.len() > 1 || self.num.as_constant().is_none() {
            format!("({})", self.num)
        } else {
            format!("{}", self.num)
        };
        write!(f, "{n}/({})", self.den)
    }
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
