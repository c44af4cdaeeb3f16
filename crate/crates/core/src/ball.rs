//! Certified real arithmetic: dyadic numbers, interval (ball) evaluation, and
//! a rigorous enclosure of pi.
//!
//! Balls carry exact dyadic endpoints. Arithmetic routes through exact
//! rational computation and rounds outward to a working precision, so every
//! enclosure is rigorous by construction; the precision parameter only trades
//! tightness for mantissa growth. Strict sign verdicts from a ball are proofs.
//! A ball can never certify that a quantity is exactly zero; that question
//! belongs to the symbolic layer.

use crate::error::{PexError, Result};
use crate::rat::{rat_i, Rat};
use num::bigint::BigInt;
use num::{One, Signed, Zero};
use std::cmp::Ordering;
use std::fmt;

/// mant * 2^exp, normalized: odd mantissa (or zero with exp 0).
#[derive(Clone, PartialEq, Eq)]
pub struct Dyadic {
    mant: BigInt,
    exp: i64,
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*2^{}", self.mant, self.exp)
    }
}

impl Dyadic {
    pub fn new(mant: BigInt, exp: i64) -> Dyadic {
        if mant.is_zero() {
            return Dyadic { mant, exp: 0 };
        }
        let tz = mant.trailing_zeros().unwrap_or(0);
        Dyadic {
            mant: mant >> tz,
            exp: exp + tz as i64,
        }
    }

    pub fn zero() -> Dyadic {
        Dyadic { mant: BigInt::zero(), exp: 0 }
    }

    pub fn from_int(n: i64) -> Dyadic {
        Dyadic::new(BigInt::from(n), 0)
    }

    pub fn to_rat(&self) -> Rat {
        if self.exp >= 0 {
            Rat::from_integer(&self.mant * (BigInt::one() << self.exp as u64))
        } else {
            Rat::new(self.mant.clone(), BigInt::one() << (-self.exp) as u64)
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.mant.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let d = self.exp - other.exp;
        if d >= 0 {
            (&self.mant << d as u64).cmp(&other.mant)
        } else {
            self.mant.cmp(&(&other.mant << (-d) as u64))
        }
    }
}

/// Largest dyadic with denominator 2^prec that is <= r.
pub fn dyadic_floor(r: &Rat, prec: u32) -> Dyadic {
    let scaled = r * Rat::from_integer(BigInt::one() << prec as u64);
    Dyadic::new(scaled.floor().to_integer(), -(prec as i64))
}

/// Smallest dyadic with denominator 2^prec that is >= r.
pub fn dyadic_ceil(r: &Rat, prec: u32) -> Dyadic {
    let scaled = r * Rat::from_integer(BigInt::one() << prec as u64);
    Dyadic::new(scaled.ceil().to_integer(), -(prec as i64))
}

/// Closed interval [lo, hi] with dyadic endpoints. Invariant: lo <= hi.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Ball {
    lo: Dyadic,
    hi: Dyadic,
}

impl Ball {
    pub fn from_endpoints(lo: Dyadic, hi: Dyadic) -> Ball {
        assert!(lo <= hi, "inverted ball endpoints");
        Ball { lo, hi }
    }

    /// Tightest prec-grid ball around an exact rational.
    pub fn from_rat(r: &Rat, prec: u32) -> Ball {
        Ball {
            lo: dyadic_floor(r, prec),
            hi: dyadic_ceil(r, prec),
        }
    }

    fn from_rat_bounds(lo: &Rat, hi: &Rat, prec: u32) -> Ball {
        debug_assert!(lo <= hi);
        Ball {
            lo: dyadic_floor(lo, prec),
            hi: dyadic_ceil(hi, prec),
        }
    }

    pub fn lo(&self) -> &Dyadic {
        &self.lo
    }

    pub fn hi(&self) -> &Dyadic {
        &self.hi
    }

    pub fn lo_rat(&self) -> Rat {
        self.lo.to_rat()
    }

    pub fn hi_rat(&self) -> Rat {
        self.hi.to_rat()
    }

    pub fn width(&self) -> Rat {
        self.hi.to_rat() - self.lo.to_rat()
    }

    pub fn contains_rat(&self, r: &Rat) -> bool {
        self.lo.to_rat() <= *r && *r <= self.hi.to_rat()
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    /// Certified strict sign: every point of the ball is positive.
    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.hi.is_negative()
    }

    pub fn neg(&self) -> Ball {
        Ball {
            lo: Dyadic::new(-self.hi.mant.clone(), self.hi.exp),
            hi: Dyadic::new(-self.lo.mant.clone(), self.lo.exp),
        }
    }

    pub fn add(&self, o: &Ball, prec: u32) -> Ball {
        Ball::from_rat_bounds(
            &(self.lo.to_rat() + o.lo.to_rat()),
            &(self.hi.to_rat() + o.hi.to_rat()),
            prec,
        )
    }

    pub fn sub(&self, o: &Ball, prec: u32) -> Ball {
        self.add(&o.neg(), prec)
    }

    pub fn mul(&self, o: &Ball, prec: u32) -> Ball {
        let (a, b) = (self.lo.to_rat(), self.hi.to_rat());
        let (c, d) = (o.lo.to_rat(), o.hi.to_rat());
        let mut cands = [&a * &c, &a * &d, &b * &c, &b * &d];
        cands.sort();
        let [lo, _, _, hi] = cands;
        Ball::from_rat_bounds(&lo, &hi, prec)
    }

    pub fn recip(&self, prec: u32) -> Result<Ball> {
        if self.contains_zero() {
            return Err(PexError::Degenerate(
                "reciprocal of a ball containing zero".into(),
            ));
        }
        let a = self.lo.to_rat();
        let b = self.hi.to_rat();
        Ok(Ball::from_rat_bounds(&b.recip(), &a.recip(), prec))
    }

    pub fn div(&self, o: &Ball, prec: u32) -> Result<Ball> {
        Ok(self.mul(&o.recip(prec + 8)?, prec))
    }
}

/// Rational enclosure of arctan(1/x) for integer x >= 2, with gap below eps.
/// Alternating series: consecutive partial sums bracket the value.
fn atan_inv_bounds(x: i64, eps: &Rat) -> (Rat, Rat) {
    assert!(x >= 2);
    let x2_inv = rat_i(1) / rat_i(x * x);
    let mut pow = rat_i(1) / rat_i(x); // x^{-(2k+1)}
    let mut s = Rat::zero();
    let mut k: i64 = 0;
    loop {
        let term = &pow / rat_i(2 * k + 1);
        if k % 2 == 0 {
            s += &term;
        } else {
            s -= &term;
        }
        pow *= &x2_inv;
        k += 1;
        let next = &pow / rat_i(2 * k + 1);
        if next < *eps {
            // Next term has sign (-1)^k; the value lies between s and the next
            // partial sum.
            return if k % 2 == 0 {
                (s.clone(), s + next)
            } else {
                (&s - &next, s)
            };
        }
    }
}

/// Rigorous enclosure of pi at the given precision, from the identity
/// pi = 16 arctan(1/5) - 4 arctan(1/239). Width is below 2^(-prec+2).
pub fn pi_ball(prec: u32) -> Ball {
    let eps = Rat::new(BigInt::one(), BigInt::one() << (prec as u64 + 8));
    let (a5_lo, a5_hi) = atan_inv_bounds(5, &eps);
    let (a239_lo, a239_hi) = atan_inv_bounds(239, &eps);
    let lo = rat_i(16) * &a5_lo - rat_i(4) * &a239_hi;
    let hi = rat_i(16) * &a5_hi - rat_i(4) * &a239_lo;
    Ball::from_rat_bounds(&lo, &hi, prec)
}

/// Expression tree over rationals and pi, evaluated to a certified ball.
#[derive(Clone, Debug)]
pub enum RealExpr {
    Const(Rat),
    Pi,
    Neg(Box<RealExpr>),
    Add(Box<RealExpr>, Box<RealExpr>),
    Sub(Box<RealExpr>, Box<RealExpr>),
    Mul(Box<RealExpr>, Box<RealExpr>),
    Div(Box<RealExpr>, Box<RealExpr>),
}

impl RealExpr {
    pub fn constant(r: Rat) -> RealExpr {
        RealExpr::Const(r)
    }

    pub fn eval(&self, prec: u32) -> Result<Ball> {
        Ok(match self {
            RealExpr::Const(r) => Ball::from_rat(r, prec),
            RealExpr::Pi => pi_ball(prec),
            RealExpr::Neg(e) => e.eval(prec)?.neg(),
            RealExpr::Add(a, b) => a.eval(prec)?.add(&b.eval(prec)?, prec),
            RealExpr::Sub(a, b) => a.eval(prec)?.sub(&b.eval(prec)?, prec),
            RealExpr::Mul(a, b) => a.eval(prec)?.mul(&b.eval(prec)?, prec),
            RealExpr::Div(a, b) => a.eval(prec)?.div(&b.eval(prec)?, prec)?,
        })
    }
}
