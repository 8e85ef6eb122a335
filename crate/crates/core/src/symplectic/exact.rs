//! Exact scalars for phase polynomials.
//!
//! Coefficients live in the field Q(√2, i): every value is
//! `(a + b√2) + i(c + d√2)` with arbitrary-precision rationals `a..d`.
//! This is the smallest field closed under the substitution
//! `q = (z + z̄)/√2`, `p = -i(z - z̄)/√2`, so bracket identities and the
//! normal-coordinate round trip hold exactly rather than to rounding.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// Real element `rat + root2·√2` of Q(√2).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
struct Surd {
    rat: BigRational,
    root2: BigRational,
}

impl Surd {
    fn zero() -> Self {
        Surd {
            rat: BigRational::zero(),
            root2: BigRational::zero(),
        }
    }

    fn is_zero(&self) -> bool {
        self.rat.is_zero() && self.root2.is_zero()
    }

    fn to_f64(&self) -> f64 {
        let r = self.rat.to_f64().unwrap_or(f64::NAN);
        let s = self.root2.to_f64().unwrap_or(f64::NAN);
        r + s * std::f64::consts::SQRT_2
    }

    fn add(&self, o: &Surd) -> Surd {
        Surd {
            rat: &self.rat + &o.rat,
            root2: &self.root2 + &o.root2,
        }
    }

    fn sub(&self, o: &Surd) -> Surd {
        Surd {
            rat: &self.rat - &o.rat,
            root2: &self.root2 - &o.root2,
        }
    }

    fn mul(&self, o: &Surd) -> Surd {
        let two = BigRational::from_integer(BigInt::from(2));
        Surd {
            rat: &self.rat * &o.rat + two * (&self.root2 * &o.root2),
            root2: &self.rat * &o.root2 + &self.root2 * &o.rat,
        }
    }

    fn neg(&self) -> Surd {
        Surd {
            rat: -self.rat.clone(),
            root2: -self.root2.clone(),
        }
    }
}

/// Exact complex scalar in Q(√2, i).
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Exact {
    re: Surd,
    im: Surd,
}

impl Exact {
    pub fn zero() -> Self {
        Exact {
            re: Surd::zero(),
            im: Surd::zero(),
        }
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        Exact {
            re: Surd::zero(),
            im: Surd {
                rat: BigRational::one(),
                root2: BigRational::zero(),
            },
        }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_ratio(n, 1)
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Exact {
            re: Surd {
                rat: BigRational::new(BigInt::from(num), BigInt::from(den)),
                root2: BigRational::zero(),
            },
            im: Surd::zero(),
        }
    }

    /// Gaussian rational `re + i·im` with integer parts.
    pub fn gaussian(re: i64, im: i64) -> Self {
        Self::from_int(re) + Self::i() * Self::from_int(im)
    }

    /// Exact conversion of a finite double (every f64 is a dyadic rational).
    pub fn from_f64(x: f64) -> Option<Self> {
        let rat = BigRational::from_float(x)?;
        Some(Exact {
            re: Surd {
                rat,
                root2: BigRational::zero(),
            },
            im: Surd::zero(),
        })
    }

    /// Exact conversion of a complex double with finite parts.
    pub fn from_complex(z: Complex64) -> Option<Self> {
        Some(Self::from_f64(z.re)? + Self::i() * Self::from_f64(z.im)?)
    }

    /// `1/√2 = √2/2`.
    pub fn inv_sqrt2() -> Self {
        Exact {
            re: Surd {
                rat: BigRational::zero(),
                root2: BigRational::new(BigInt::from(1), BigInt::from(2)),
            },
            im: Surd::zero(),
        }
    }

    pub fn sqrt2() -> Self {
        Exact {
            re: Surd {
                rat: BigRational::zero(),
                root2: BigRational::one(),
            },
            im: Surd::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Exact {
            re: self.re.clone(),
            im: self.im.neg(),
        }
    }

    /// True when the imaginary part vanishes exactly.
    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn scale_int(&self, k: i64) -> Self {
        self * &Exact::from_int(k)
    }
}

impl fmt::Debug for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({} + {}√2) + i({} + {}√2)",
            self.re.rat, self.re.root2, self.im.rat, self.im.root2
        )
    }
}

impl fmt::Display for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let z = self.to_complex();
        if z.im == 0.0 {
            write!(f, "{}", z.re)
        } else {
            write!(f, "({}{:+}i)", z.re, z.im)
        }
    }
}

impl<'a> Add<&'a Exact> for &'a Exact {
    type Output = Exact;
    fn add(self, o: &Exact) -> Exact {
        Exact {
            re: self.re.add(&o.re),
            im: self.im.add(&o.im),
        }
    }
}

impl<'a> Sub<&'a Exact> for &'a Exact {
    type Output = Exact;
    fn sub(self, o: &Exact) -> Exact {
        Exact {
            re: self.re.sub(&o.re),
            im: self.im.sub(&o.im),
        }
    }
}

impl<'a> Mul<&'a Exact> for &'a Exact {
    type Output = Exact;
    fn mul(self, o: &Exact) -> Exact {
        Exact {
            re: self.re.mul(&o.re).sub(&self.im.mul(&o.im)),
            im: self.re.mul(&o.im).add(&self.im.mul(&o.re)),
        }
    }
}

impl Neg for &Exact {
    type Output = Exact;
    fn neg(self) -> Exact {
        Exact {
            re: self.re.neg(),
            im: self.im.neg(),
        }
    }
}

impl Add for Exact {
    type Output = Exact;
    fn add(self, o: Exact) -> Exact {
        &self + &o
    }
}

impl Sub for Exact {
    type Output = Exact;
    fn sub(self, o: Exact) -> Exact {
        &self - &o
    }
}

impl Mul for Exact {
    type Output = Exact;
    fn mul(self, o: Exact) -> Exact {
        &self * &o
    }
}

impl Neg for Exact {
    type Output = Exact;
    fn neg(self) -> Exact {
        -&self
    }
}
