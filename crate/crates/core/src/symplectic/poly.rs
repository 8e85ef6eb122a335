//! Exact multivariate polynomials in canonical or normal coordinates.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use super::exact::Exact;
use crate::error::{domain, Error, Result};

/// Default maximum total degree.
pub const DEFAULT_DEGREE_CAP: u32 = 16;

/// Coordinate system the polynomial is written in.
///
/// Pair `k` occupies exponent slots `2k` and `2k + 1`: `(q_k, p_k)` in the
/// canonical basis, `(z_k, z̄_k)` in the normal basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Basis {
    Canonical,
    Normal,
}

/// A single ring variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    Q(usize),
    P(usize),
    Z(usize),
    Zbar(usize),
}

impl Var {
    fn basis(self) -> Basis {
        match self {
            Var::Q(_) | Var::P(_) => Basis::Canonical,
            Var::Z(_) | Var::Zbar(_) => Basis::Normal,
        }
    }

    fn slot(self) -> usize {
        match self {
            Var::Q(k) | Var::Z(k) => 2 * k,
            Var::P(k) | Var::Zbar(k) => 2 * k + 1,
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::Q(k) => write!(f, "q{k}"),
            Var::P(k) => write!(f, "p{k}"),
            Var::Z(k) => write!(f, "z{k}"),
            Var::Zbar(k) => write!(f, "zbar{k}"),
        }
    }
}

type Monomial = Vec<u32>;

/// Phase function as an exact polynomial.
///
/// Zero coefficients are never stored, so structural equality is
/// mathematical equality.
#[derive(Clone, PartialEq, Eq)]
pub struct PhasePolynomial {
    pairs: usize,
    basis: Basis,
    cap: u32,
    terms: BTreeMap<Monomial, Exact>,
}

impl PhasePolynomial {
    pub fn zero(pairs: usize, basis: Basis) -> Self {
        PhasePolynomial {
            pairs,
            basis,
            cap: DEFAULT_DEGREE_CAP,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(pairs: usize, basis: Basis, c: Exact) -> Self {
        let mut p = Self::zero(pairs, basis);
        p.insert(vec![0; 2 * pairs], c);
        p
    }

    /// The polynomial consisting of one variable.
    pub fn var(pairs: usize, v: Var) -> Result<Self> {
        let slot = v.slot();
        if slot >= 2 * pairs {
            return domain(format!("variable {v} outside a ring of {pairs} pairs"));
        }
        let mut e = vec![0; 2 * pairs];
        e[slot] = 1;
        let mut p = Self::zero(pairs, v.basis());
        p.insert(e, Exact::one());
        Ok(p)
    }

    /// Single-pair shorthand for `q`.
    pub fn q() -> Self {
        Self::var(1, Var::Q(0)).expect("pair 0 exists")
    }

    /// Single-pair shorthand for `p`.
    pub fn p() -> Self {
        Self::var(1, Var::P(0)).expect("pair 0 exists")
    }

    /// `z_k = (q_k + i p_k)/√2` written in canonical coordinates.
    pub fn z_in_canonical(pairs: usize, k: usize) -> Result<Self> {
        let q = Self::var(pairs, Var::Q(k))?;
        let p = Self::var(pairs, Var::P(k))?;
        Ok((&q + &p.scale(&Exact::i())).scale(&Exact::inv_sqrt2()))
    }

    /// `z̄_k = (q_k - i p_k)/√2` written in canonical coordinates.
    pub fn zbar_in_canonical(pairs: usize, k: usize) -> Result<Self> {
        let q = Self::var(pairs, Var::Q(k))?;
        let p = Self::var(pairs, Var::P(k))?;
        Ok((&q - &p.scale(&Exact::i())).scale(&Exact::inv_sqrt2()))
    }

    /// Oscillator Hamiltonian `ω Σ_k (q_k² + p_k²)/2` in canonical coordinates.
    pub fn oscillator_hamiltonian(pairs: usize, omega: f64) -> Result<Self> {
        let w = Exact::from_f64(omega)
            .ok_or_else(|| Error::Parameter(format!("non-finite omega {omega}")))?;
        let half = Exact::from_ratio(1, 2);
        let mut h = Self::zero(pairs, Basis::Canonical);
        for k in 0..pairs {
            let q = Self::var(pairs, Var::Q(k))?;
            let p = Self::var(pairs, Var::P(k))?;
            h = &h + &(&q.mul(&q)? + &p.mul(&p)?);
        }
        Ok(h.scale(&(&w * &half)))
    }

    /// Builds a polynomial from `(exponents, coefficient)` terms.
    pub fn from_terms(
        pairs: usize,
        basis: Basis,
        terms: impl IntoIterator<Item = (Vec<u32>, Exact)>,
    ) -> Result<Self> {
        let mut p = Self::zero(pairs, basis);
        for (e, c) in terms {
            if e.len() != 2 * pairs {
                return domain(format!(
                    "monomial has {} exponents, ring has {}",
                    e.len(),
                    2 * pairs
                ));
            }
            let d: u32 = e.iter().sum();
            if d > p.cap {
                return Err(Error::Capacity {
                    degree: d,
                    cap: p.cap,
                });
            }
            let prev = p.terms.remove(&e).unwrap_or_else(Exact::zero);
            p.insert(e, &prev + &c);
        }
        Ok(p)
    }

    /// Sets the degree cap; fails if existing terms already exceed it.
    pub fn with_cap(mut self, cap: u32) -> Result<Self> {
        let d = self.degree();
        if d > cap {
            return Err(Error::Capacity { degree: d, cap });
        }
        self.cap = cap;
        Ok(self)
    }

    fn insert(&mut self, e: Monomial, c: Exact) {
        if !c.is_zero() {
            self.terms.insert(e, c);
        }
    }

    pub fn pairs(&self) -> usize {
        self.pairs
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &Exact)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    pub fn coefficient(&self, exponents: &[u32]) -> Exact {
        self.terms
            .get(exponents)
            .cloned()
            .unwrap_or_else(Exact::zero)
    }

    /// Total degree; 0 for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &Exact) -> Self {
        let mut out = Self {
            terms: BTreeMap::new(),
            ..self.clone()
        };
        for (e, a) in &self.terms {
            out.insert(e.clone(), a * c);
        }
        out
    }

    fn check_compatible(&self, o: &Self) -> Result<()> {
        if self.pairs != o.pairs {
            return domain(format!(
                "rings differ: {} pairs vs {} pairs",
                self.pairs, o.pairs
            ));
        }
        if self.basis != o.basis {
            return domain("operands written in different coordinate bases");
        }
        Ok(())
    }

    pub fn checked_add(&self, o: &Self) -> Result<Self> {
        self.check_compatible(o)?;
        Ok(self + o)
    }

    /// Exact product; errors if any term would exceed the degree cap.
    pub fn mul(&self, o: &Self) -> Result<Self> {
        self.check_compatible(o)?;
        let cap = self.cap.max(o.cap);
        let d = self.degree() + o.degree();
        if !self.is_zero() && !o.is_zero() && d > cap {
            return Err(Error::Capacity { degree: d, cap });
        }
        let mut acc: BTreeMap<Monomial, Exact> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &o.terms {
                let e: Monomial = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                let c = ca * cb;
                match acc.get_mut(&e) {
                    Some(v) => *v = &*v + &c,
                    None => {
                        acc.insert(e, c);
                    }
                }
            }
        }
        acc.retain(|_, c| !c.is_zero());
        Ok(PhasePolynomial {
            pairs: self.pairs,
            basis: self.basis,
            cap,
            terms: acc,
        })
    }

    pub fn pow(&self, n: u32) -> Result<Self> {
        let mut out = Self::constant(self.pairs, self.basis, Exact::one());
        out.cap = self.cap;
        for _ in 0..n {
            out = out.mul(self)?;
        }
        Ok(out)
    }

    /// Partial derivative with respect to a variable of this polynomial's basis.
    pub fn derivative(&self, v: Var) -> Result<Self> {
        self.check_var(v)?;
        let slot = v.slot();
        let mut out = Self {
            terms: BTreeMap::new(),
            ..self.clone()
        };
        for (e, c) in &self.terms {
            let k = e[slot];
            if k == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[slot] -= 1;
            out.insert(e2, c.scale_int(k as i64));
        }
        Ok(out)
    }

    pub(crate) fn check_var(&self, v: Var) -> Result<()> {
        if v.basis() != self.basis {
            return domain(format!(
                "variable {v} does not belong to the {:?} basis",
                self.basis
            ));
        }
        if v.slot() >= 2 * self.pairs {
            return domain(format!(
                "variable {v} outside a ring of {} pairs",
                self.pairs
            ));
        }
        Ok(())
    }

    /// Variables `(first, second)` of pair `k` in this basis.
    pub fn pair_vars(&self, k: usize) -> (Var, Var) {
        match self.basis {
            Basis::Canonical => (Var::Q(k), Var::P(k)),
            Basis::Normal => (Var::Z(k), Var::Zbar(k)),
        }
    }

    /// Complex conjugate of the phase function for real `(q, p)`.
    ///
    /// In the normal basis conjugation also exchanges `z` and `z̄`.
    pub fn conj(&self) -> Self {
        let mut out = Self {
            terms: BTreeMap::new(),
            ..self.clone()
        };
        for (e, c) in &self.terms {
            let e2 = match self.basis {
                Basis::Canonical => e.clone(),
                Basis::Normal => e.chunks(2).flat_map(|w| [w[1], w[0]]).collect(),
            };
            out.insert(e2, c.conj());
        }
        out
    }

    /// Substitutes each pair's variables by linear forms in the target basis.
    fn substitute(&self, target: Basis, first: &Self, second: &Self) -> Result<Self> {
        // `first`/`second` are one-pair images; lift them to pair k.
        let lift = |img: &Self, k: usize| -> Self {
            let mut out = Self::zero(self.pairs, target);
            out.cap = self.cap;
            for (e, c) in &img.terms {
                let mut e2 = vec![0; 2 * self.pairs];
                e2[2 * k] = e[0];
                e2[2 * k + 1] = e[1];
                out.insert(e2, c.clone());
            }
            out
        };
        let mut powers: Vec<(Vec<Self>, Vec<Self>)> = Vec::with_capacity(self.pairs);
        let max_deg = self.degree();
        for k in 0..self.pairs {
            let a = lift(first, k);
            let b = lift(second, k);
            let mut pa = vec![Self::constant(self.pairs, target, Exact::one()).with_cap(self.cap)?];
            let mut pb = pa.clone();
            for n in 1..=max_deg as usize {
                pa.push(pa[n - 1].mul(&a)?);
                pb.push(pb[n - 1].mul(&b)?);
            }
            powers.push((pa, pb));
        }
        let mut out = Self::zero(self.pairs, target);
        out.cap = self.cap;
        for (e, c) in &self.terms {
            let mut term = Self::constant(self.pairs, target, c.clone()).with_cap(self.cap)?;
            for k in 0..self.pairs {
                let (pa, pb) = &powers[k];
                term = term.mul(&pa[e[2 * k] as usize])?;
                term = term.mul(&pb[e[2 * k + 1] as usize])?;
            }
            out = &out + &term;
        }
        Ok(out)
    }

    /// Re-expresses the polynomial in normal coordinates `(z, z̄)`.
    pub fn to_normal(&self) -> Result<Self> {
        if self.basis == Basis::Normal {
            return Ok(self.clone());
        }
        let h = Exact::inv_sqrt2();
        let z = Self::from_terms(1, Basis::Normal, [(vec![1, 0], h.clone())])?;
        let zb = Self::from_terms(1, Basis::Normal, [(vec![0, 1], h.clone())])?;
        // q = (z + z̄)/√2, p = -i(z - z̄)/√2
        let q = &z + &zb;
        let p = (&z - &zb).scale(&-Exact::i());
        self.substitute(Basis::Normal, &q, &p)
    }

    /// Re-expresses the polynomial in canonical coordinates `(q, p)`.
    pub fn to_canonical(&self) -> Result<Self> {
        if self.basis == Basis::Canonical {
            return Ok(self.clone());
        }
        let h = Exact::inv_sqrt2();
        let q = Self::from_terms(1, Basis::Canonical, [(vec![1, 0], h.clone())])?;
        let ip = Self::from_terms(1, Basis::Canonical, [(vec![0, 1], &h * &Exact::i())])?;
        let z = &q + &ip;
        let zb = &q - &ip;
        self.substitute(Basis::Canonical, &z, &zb)
    }

    pub fn in_basis(&self, basis: Basis) -> Result<Self> {
        match basis {
            Basis::Canonical => self.to_canonical(),
            Basis::Normal => self.to_normal(),
        }
    }

    /// Evaluates at complex values of the basis variables.
    pub fn eval(&self, point: &[Complex64]) -> Result<Complex64> {
        if point.len() != 2 * self.pairs {
            return domain(format!(
                "evaluation point has {} coordinates, ring has {}",
                point.len(),
                2 * self.pairs
            ));
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (e, c) in &self.terms {
            let mut m = c.to_complex();
            for (x, &k) in point.iter().zip(e) {
                m *= x.powu(k);
            }
            acc += m;
        }
        Ok(acc)
    }

    /// Evaluates a canonical-basis polynomial at a real phase point.
    pub fn eval_real(&self, x: &[f64]) -> Result<Complex64> {
        if self.basis != Basis::Canonical {
            return domain("real evaluation requires canonical coordinates");
        }
        let pt: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.eval(&pt)
    }
}

impl<'a> std::ops::Add<&'a PhasePolynomial> for &'a PhasePolynomial {
    type Output = PhasePolynomial;
    /// Panics on incompatible rings; use `checked_add` for fallible addition.
    fn add(self, o: &PhasePolynomial) -> PhasePolynomial {
        self.check_compatible(o)
            .expect("incompatible polynomial rings");
        let mut out = self.clone();
        out.cap = self.cap.max(o.cap);
        for (e, c) in &o.terms {
            let prev = out.terms.remove(e).unwrap_or_else(Exact::zero);
            out.insert(e.clone(), &prev + c);
        }
        out
    }
}

impl<'a> std::ops::Sub<&'a PhasePolynomial> for &'a PhasePolynomial {
    type Output = PhasePolynomial;
    fn sub(self, o: &PhasePolynomial) -> PhasePolynomial {
        self + &o.scale(&Exact::from_int(-1))
    }
}

impl std::ops::Neg for &PhasePolynomial {
    type Output = PhasePolynomial;
    fn neg(self) -> PhasePolynomial {
        self.scale(&Exact::from_int(-1))
    }
}

impl fmt::Debug for PhasePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for PhasePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}")?;
            for (slot, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let pair = slot / 2;
                let v = match (self.basis, slot % 2) {
                    (Basis::Canonical, 0) => Var::Q(pair),
                    (Basis::Canonical, _) => Var::P(pair),
                    (Basis::Normal, 0) => Var::Z(pair),
                    (Basis::Normal, _) => Var::Zbar(pair),
                };
                if k == 1 {
                    write!(f, "·{v}")?;
                } else {
                    write!(f, "·{v}^{k}")?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_coefficients_not_stored() {
        let q = PhasePolynomial::q();
        let d = &q - &q;
        assert!(d.is_zero());
        assert_eq!(d.terms().count(), 0);
    }

    #[test]
    fn degree_cap_is_enforced() {
        let q = PhasePolynomial::q().with_cap(3).unwrap();
        let q2 = q.mul(&q).unwrap();
        assert_eq!(q2.degree(), 2);
        assert_eq!(q2.mul(&q2), Err(Error::Capacity { degree: 4, cap: 3 }));
        assert!(PhasePolynomial::q().pow(17).is_err());
    }

    #[test]
    fn q_maps_to_sum_of_normal_variables() {
        let q = PhasePolynomial::q().to_normal().unwrap();
        let h = Exact::inv_sqrt2();
        let expected = PhasePolynomial::from_terms(
            1,
            Basis::Normal,
            [(vec![1, 0], h.clone()), (vec![0, 1], h)],
        )
        .unwrap();
        assert_eq!(q, expected);
    }

    #[test]
    fn conj_swaps_normal_variables() {
        let z = PhasePolynomial::var(1, Var::Z(0)).unwrap();
        let zb = PhasePolynomial::var(1, Var::Zbar(0)).unwrap();
        assert_eq!(z.conj(), zb);
    }

    #[test]
    fn wrong_basis_variable_rejected() {
        let q = PhasePolynomial::q();
        assert!(matches!(q.derivative(Var::Z(0)), Err(Error::Domain(_))));
        assert!(matches!(q.derivative(Var::Q(3)), Err(Error::Domain(_))));
    }

    #[test]
    fn evaluation_matches_direct_formula() {
        let h = PhasePolynomial::oscillator_hamiltonian(1, 2.0).unwrap();
        let v = h.eval_real(&[0.5, -1.5]).unwrap();
        assert!((v.re - 2.0 * (0.25 + 2.25) / 2.0).abs() < 1e-15);
        assert_eq!(v.im, 0.0);
    }
}
