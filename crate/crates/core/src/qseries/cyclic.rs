//! The group ring Z[x]/(x^N − 1), used as a fast accumulator for products of
//! sparse factors at a root of unity: multiplying by a monomial is a cyclic
//! shift, and the map x ↦ ζ_N to the cyclotomic field is applied once at the
//! end.

use rug::Integer;

use super::generator::Lp;
use crate::cyclotomic::CycNum;

#[derive(Clone, Debug)]
pub(crate) struct CyclicVec {
    c: Vec<Integer>,
}

/// The point y = ζ_n^h at which sparse polynomials are evaluated.
#[derive(Clone, Copy, Debug)]
pub(crate) struct RingPoint {
    pub n: u32,
    pub h: u64,
}

impl RingPoint {
    fn index(&self, e: i64) -> usize {
        (e as i128 * self.h as i128).rem_euclid(self.n as i128) as usize
    }

    pub fn lift(&self, lp: &Lp) -> CyclicVec {
        let mut c = vec![Integer::new(); self.n as usize];
        for &(coef, e) in lp.terms() {
            c[self.index(e)] += coef;
        }
        CyclicVec { c }
    }

    pub fn one(&self) -> CyclicVec {
        self.lift(&Lp::one())
    }

    pub fn zero(&self) -> CyclicVec {
        CyclicVec {
            c: vec![Integer::new(); self.n as usize],
        }
    }

    /// Product with a sparse polynomial evaluated at this point.
    pub fn mul_lp(&self, v: &CyclicVec, lp: &Lp) -> CyclicVec {
        let n = self.n as usize;
        let mut out = vec![Integer::new(); n];
        for &(coef, e) in lp.terms() {
            let shift = self.index(e);
            for (i, x) in v.c.iter().enumerate() {
                if *x != 0 {
                    let dst = &mut out[(i + shift) % n];
                    *dst += Integer::from(x * coef);
                }
            }
        }
        CyclicVec { c: out }
    }

    /// Exact value of a sparse polynomial as a field element.
    pub fn eval(&self, lp: &Lp) -> CycNum {
        self.to_cycnum(&self.lift(lp))
    }

    pub fn to_cycnum(&self, v: &CyclicVec) -> CycNum {
        CycNum::from_cyclic(self.n, &v.c, Integer::from(1))
    }

    /// Canonical key of a sparse polynomial at this point (index → coefficient).
    pub fn key(&self, lp: &Lp) -> Vec<(usize, i64)> {
        let mut m = std::collections::BTreeMap::new();
        for &(coef, e) in lp.terms() {
            *m.entry(self.index(e)).or_insert(0i64) += coef;
        }
        m.into_iter().filter(|&(_, c)| c != 0).collect()
    }
}

impl CyclicVec {
    pub fn add_assign(&mut self, other: &CyclicVec) {
        for (a, b) in self.c.iter_mut().zip(&other.c) {
            *a += b;
        }
    }
}
