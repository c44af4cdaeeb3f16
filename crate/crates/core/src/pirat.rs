//! Exact arithmetic in the field Q(pi): rational functions in a single
//! transcendental.
//!
//! Transcendence carries the whole weight here: a polynomial with rational
//! coefficients vanishes at pi if and only if it is the zero polynomial, so
//! equality in Q(pi) is decidable by pure algebra. Strict inequalities are
//! delegated to ball evaluation, which terminates because a nonzero element
//! is bounded away from zero.

use crate::ball::{pi_ball, Ball};
use crate::error::{PexError, Result};
use crate::rat::{rat_i, Rat};
use num::{One, Zero};
use std::fmt;

/// Polynomial over Q, little-endian coefficients, no trailing zeros.
#[derive(Clone, PartialEq, Eq)]
pub struct PiPoly {
    coeffs: Vec<Rat>,
}

impl fmt::Debug for PiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => format!("{c}"),
                1 => format!("({c})*pi"),
                _ => format!("({c})*pi^{i}"),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

impl PiPoly {
    pub fn new(mut coeffs: Vec<Rat>) -> PiPoly {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        PiPoly { coeffs }
    }

    pub fn zero() -> PiPoly {
        PiPoly { coeffs: vec![] }
    }

    pub fn constant(r: Rat) -> PiPoly {
        PiPoly::new(vec![r])
    }

    pub fn pi() -> PiPoly {
        PiPoly::new(vec![Rat::zero(), Rat::one()])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    fn lead(&self) -> &Rat {
        self.coeffs.last().expect("lead of zero polynomial")
    }

    pub fn add(&self, o: &PiPoly) -> PiPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let a = self.coeffs.get(i).cloned().unwrap_or_else(Rat::zero);
            let b = o.coeffs.get(i).cloned().unwrap_or_else(Rat::zero);
            out.push(a + b);
        }
        PiPoly::new(out)
    }

    pub fn neg(&self) -> PiPoly {
        PiPoly {
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
        }
    }

    pub fn sub(&self, o: &PiPoly) -> PiPoly {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &PiPoly) -> PiPoly {
        if self.is_zero() || o.is_zero() {
            return PiPoly::zero();
        }
        let mut out = vec![Rat::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        PiPoly::new(out)
    }

    pub fn scale(&self, r: &Rat) -> PiPoly {
        PiPoly::new(self.coeffs.iter().map(|c| c * r).collect())
    }

    /// Euclidean division: (quotient, remainder) with deg r < deg divisor.
    pub fn div_rem(&self, d: &PiPoly) -> (PiPoly, PiPoly) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let mut r = self.clone();
        let mut q = PiPoly::zero();
        while !r.is_zero() && r.coeffs.len() >= d.coeffs.len() {
            let shift = r.coeffs.len() - d.coeffs.len();
            let factor = r.lead() / d.lead();
            let mut term = vec![Rat::zero(); shift + 1];
            term[shift] = factor;
            let term = PiPoly::new(term);
            q = q.add(&term);
            r = r.sub(&term.mul(d));
        }
        (q, r)
    }

    /// Monic gcd.
    pub fn gcd(&self, o: &PiPoly) -> PiPoly {
        let mut a = self.clone();
        let mut b = o.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        if a.is_zero() {
            a
        } else {
            let l = a.lead().clone();
            a.scale(&(Rat::one() / l))
        }
    }

    /// Enclosure of the value at pi, by Horner evaluation over balls.
    pub fn eval_ball(&self, prec: u32) -> Ball {
        let pi = pi_ball(prec);
        let mut acc = Ball::from_rat(&Rat::zero(), prec);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(&pi, prec).add(&Ball::from_rat(c, prec), prec);
        }
        acc
    }

    /// Exact sign of the value at pi. Zero iff the polynomial is zero, by
    /// transcendence; otherwise refine the ball until the sign resolves.
    pub fn sign(&self) -> i8 {
        if self.is_zero() {
            return 0;
        }
        let mut prec = 64u32;
        loop {
            let b = self.eval_ball(prec);
            if b.is_positive() {
                return 1;
            }
            if b.is_negative() {
                return -1;
            }
            prec *= 2;
            assert!(prec <= 1 << 20, "sign refinement runaway");
        }
    }
}

/// Element of Q(pi): num/den with den nonzero, reduced, den monic.
#[derive(Clone)]
pub struct PiRat {
    num: PiPoly,
    den: PiPoly,
}

impl fmt::Debug for PiRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}) / ({:?})", self.num, self.den)
    }
}

impl PartialEq for PiRat {
    fn eq(&self, other: &Self) -> bool {
        // Reduced with monic denominator is a canonical form.
        self.num == other.num && self.den == other.den
    }
}

impl Eq for PiRat {}

impl PiRat {
    pub fn new(num: PiPoly, den: PiPoly) -> Result<PiRat> {
        if den.is_zero() {
            return Err(PexError::Degenerate("zero denominator in Q(pi)".into()));
        }
        let mut num = num;
        let mut den = den;
        let g = num.gcd(&den);
        if !g.is_zero() && g.degree() != Some(0) {
            num = num.div_rem(&g).0;
            den = den.div_rem(&g).0;
        }
        let l = den.lead().clone();
        Ok(PiRat {
            num: num.scale(&(Rat::one() / &l)),
            den: den.scale(&(Rat::one() / l)),
        })
    }

    pub fn zero() -> PiRat {
        PiRat {
            num: PiPoly::zero(),
            den: PiPoly::constant(Rat::one()),
        }
    }

    pub fn one() -> PiRat {
        PiRat::from_rat(Rat::one())
    }

    pub fn from_rat(r: Rat) -> PiRat {
        PiRat {
            num: PiPoly::constant(r),
            den: PiPoly::constant(Rat::one()),
        }
    }

    pub fn from_int(n: i64) -> PiRat {
        PiRat::from_rat(rat_i(n))
    }

    pub fn pi() -> PiRat {
        PiRat {
            num: PiPoly::pi(),
            den: PiPoly::constant(Rat::one()),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// The exact rational value if the element lies in Q, else None.
    /// Sound because reduction leaves a constant denominator exactly
    /// when pi cancels from the quotient.
    pub fn as_rat(&self) -> Option<Rat> {
        if self.num.degree().unwrap_or(0) == 0 && self.den.degree() == Some(0) {
            let n = self.num.coeffs.first().cloned().unwrap_or_else(Rat::zero);
            Some(n / self.den.coeffs[0].clone())
        } else {
            None
        }
    }

    pub fn add(&self, o: &PiRat) -> PiRat {
        PiRat::new(
            self.num.mul(&o.den).add(&o.num.mul(&self.den)),
            self.den.mul(&o.den),
        )
        .expect("nonzero denominators")
    }

    pub fn sub(&self, o: &PiRat) -> PiRat {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> PiRat {
        PiRat {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, o: &PiRat) -> PiRat {
        PiRat::new(self.num.mul(&o.num), self.den.mul(&o.den)).expect("nonzero denominators")
    }

    pub fn div(&self, o: &PiRat) -> Result<PiRat> {
        if o.is_zero() {
            return Err(PexError::Degenerate("division by zero in Q(pi)".into()));
        }
        PiRat::new(self.num.mul(&o.den), self.den.mul(&o.num))
    }

    /// Exact sign at pi: sign(num at pi) * sign(den at pi).
    pub fn sign(&self) -> i8 {
        self.num.sign() * self.den.sign()
    }

    pub fn is_positive(&self) -> bool {
        self.sign() > 0
    }

    /// Certified enclosure; fails only if the denominator enclosure straddles
    /// zero at this precision (the caller can retry higher).
    pub fn eval_ball(&self, prec: u32) -> Result<Ball> {
        self.num.eval_ball(prec).div(&self.den.eval_ball(prec), prec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    fn int(n: i64) -> PiRat {
        PiRat::from_int(n)
    }

    #[test]
    fn poly_division_and_gcd() {
        // (x^2 - 1) / (x - 1) = x + 1 exactly.
        let p = PiPoly::new(vec![rat_i(-1), rat_i(0), rat_i(1)]);
        let d = PiPoly::new(vec![rat_i(-1), rat_i(1)]);
        let (q, r) = p.div_rem(&d);
        assert!(r.is_zero());
        assert_eq!(q, PiPoly::new(vec![rat_i(1), rat_i(1)]));
        // gcd(x^2 - 1, x^2 + 2x + 1) = x + 1 (monic).
        let a = PiPoly::new(vec![rat_i(-1), rat_i(0), rat_i(1)]);
        let b = PiPoly::new(vec![rat_i(1), rat_i(2), rat_i(1)]);
        assert_eq!(a.gcd(&b), PiPoly::new(vec![rat_i(1), rat_i(1)]));
    }

    #[test]
    fn field_identities() {
        let pi = PiRat::pi();
        // pi * pi - pi^2 = 0 symbolically.
        let sq = pi.mul(&pi);
        let sq2 = PiRat::new(
            PiPoly::new(vec![rat_i(0), rat_i(0), rat_i(1)]),
            PiPoly::constant(rat_i(1)),
        )
        .unwrap();
        assert!(sq.sub(&sq2).is_zero());
        // (6 - pi)/(12 - pi) constructed two ways agrees.
        let s3 = int(6).sub(&pi).div(&int(12).sub(&pi)).unwrap();
        let s3b = PiRat::new(
            PiPoly::new(vec![rat_i(6), rat_i(-1)]),
            PiPoly::new(vec![rat_i(12), rat_i(-1)]),
        )
        .unwrap();
        assert!(s3.sub(&s3b).is_zero());
        assert_eq!(s3, s3b);
        // Reciprocal relation: s3 * (12 - pi) = 6 - pi.
        let lhs = s3.mul(&int(12).sub(&pi));
        assert!(lhs.sub(&int(6).sub(&pi)).is_zero());
    }

    #[test]
    fn cancellation_is_exact() {
        let pi = PiRat::pi();
        // ((6-pi)/(12-pi)) * ((12-pi)/(6-pi)) = 1 with full cancellation.
        let a = int(6).sub(&pi).div(&int(12).sub(&pi)).unwrap();
        let b = int(12).sub(&pi).div(&int(6).sub(&pi)).unwrap();
        let prod = a.mul(&b);
        assert!(prod.sub(&PiRat::one()).is_zero());
    }

    #[test]
    fn signs() {
        let pi = PiRat::pi();
        assert_eq!(int(6).sub(&pi).sign(), 1);
        assert_eq!(int(3).sub(&pi).sign(), -1);
        assert_eq!(pi.sub(&pi).sign(), 0);
        // 1 - pi/6 in (0, 1).
        let c = PiRat::one().sub(&pi.div(&int(6)).unwrap());
        assert_eq!(c.sign(), 1);
        assert_eq!(c.sub(&PiRat::one()).sign(), -1);
        // pi^2 - 9 > 0, pi^2 - 10 < 0.
        let sq = pi.mul(&pi);
        assert_eq!(sq.sub(&int(9)).sign(), 1);
        assert_eq!(sq.sub(&int(10)).sign(), -1);
    }

    #[test]
    fn ball_evaluation_consistent() {
        let pi = PiRat::pi();
        let s3 = int(6).sub(&pi).div(&int(12).sub(&pi)).unwrap();
        let b = s3.eval_ball(128).unwrap();
        assert!(b.is_positive());
        assert!(b.hi_rat() < rat_i(1));
        // Numeric sanity: (6 - 3.14159)/(12 - 3.14159) is about 0.3226.
        assert!(b.lo_rat() > rat(32, 100));
        assert!(b.hi_rat() < rat(33, 100));
    }
}
