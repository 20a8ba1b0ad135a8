//! Ring elements over power-of-two moduli and the vector/matrix containers built on them.

use crate::error::{Error, Result};
use crate::mul;
use crate::pack;
use crate::params::{Reduction, SchemeParams};

#[inline]
pub(crate) fn mask(width: u32) -> u32 {
    if width >= 32 {
        u32::MAX
    } else {
        (1u32 << width) - 1
    }
}

/// A polynomial with coefficients in `Z_{2^width}`, constant term first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    coeffs: Vec<u16>,
    width: u32,
}

impl Poly {
    pub fn zero(n: usize, width: u32) -> Self {
        assert!((1..=16).contains(&width));
        Poly { coeffs: vec![0; n], width }
    }

    /// Builds a polynomial, reducing every coefficient modulo `2^width`.
    pub fn from_coeffs(coeffs: Vec<u16>, width: u32) -> Self {
        assert!((1..=16).contains(&width));
        let m = mask(width) as u16;
        Poly { coeffs: coeffs.into_iter().map(|c| c & m).collect(), width }
    }

    /// Builds a polynomial from signed values, mapping them into `Z_{2^width}`.
    pub fn from_signed(values: &[i32], width: u32) -> Self {
        let m = mask(width);
        Poly::from_coeffs(values.iter().map(|&v| (v as u32 & m) as u16).collect(), width)
    }

    pub fn coeffs(&self) -> &[u16] {
        &self.coeffs
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn modmask(&self) -> u16 {
        mask(self.width) as u16
    }

    fn check_same(&self, other: &Poly) -> Result<()> {
        if self.width != other.width {
            return Err(Error::WidthMismatch(self.width, other.width));
        }
        if self.len() != other.len() {
            return Err(Error::Length { expected: self.len(), got: other.len() });
        }
        Ok(())
    }

    pub fn add(&self, other: &Poly) -> Result<Poly> {
        self.check_same(other)?;
        let m = self.modmask();
        let coeffs =
            self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.wrapping_add(*b) & m).collect();
        Ok(Poly { coeffs, width: self.width })
    }

    pub fn sub(&self, other: &Poly) -> Result<Poly> {
        self.check_same(other)?;
        let m = self.modmask();
        let coeffs =
            self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.wrapping_sub(*b) & m).collect();
        Ok(Poly { coeffs, width: self.width })
    }

    /// Adds `c` to every coefficient.
    pub fn add_const(&self, c: u16) -> Poly {
        let m = self.modmask();
        Poly { coeffs: self.coeffs.iter().map(|a| a.wrapping_add(c) & m).collect(), width: self.width }
    }

    /// Logical right shift of every coefficient; the result lives in `Z_{2^(width-k)}`.
    pub fn shift_right(&self, k: u32) -> Poly {
        assert!(k < self.width, "shift amount must be below the width");
        Poly { coeffs: self.coeffs.iter().map(|a| a >> k).collect(), width: self.width - k }
    }

    /// Left shift of every coefficient, staying modulo `2^width`.
    pub fn shift_left(&self, k: u32) -> Poly {
        let m = self.modmask();
        Poly {
            coeffs: self.coeffs.iter().map(|a| ((*a as u32) << k) as u16 & m).collect(),
            width: self.width,
        }
    }

    /// Reinterprets the coefficients modulo `2^width`, which may be narrower or wider.
    /// Narrowing is reduction; widening keeps the same representatives.
    pub fn with_width(&self, width: u32) -> Poly {
        Poly::from_coeffs(self.coeffs.clone(), width)
    }

    /// Ring product using the Toom-Cook/Karatsuba chain.
    pub fn mul(&self, other: &Poly, params: &SchemeParams) -> Result<Poly> {
        self.mul_with(other, params.reduction, mul::fast)
    }

    /// Ring product by the quadratic reference algorithm.
    pub fn mul_schoolbook(&self, other: &Poly, params: &SchemeParams) -> Result<Poly> {
        self.mul_with(other, params.reduction, mul::schoolbook)
    }

    fn mul_with(
        &self,
        other: &Poly,
        reduction: Reduction,
        f: fn(&[u32], &[u32]) -> Vec<u32>,
    ) -> Result<Poly> {
        self.check_same(other)?;
        let a: Vec<u32> = self.coeffs.iter().map(|&c| c as u32).collect();
        let b: Vec<u32> = other.coeffs.iter().map(|&c| c as u32).collect();
        let mut full = f(&a, &b);
        let reduced = mul::reduce(&mut full, self.len(), reduction);
        let m = mask(self.width);
        Ok(Poly { coeffs: reduced.into_iter().map(|c| (c & m) as u16).collect(), width: self.width })
    }

    pub fn pack(&self, width: u32) -> Result<Vec<u8>> {
        pack::pack_bits(&self.coeffs, width)
    }

    pub fn unpack(bytes: &[u8], width: u32, n: usize) -> Result<Poly> {
        Ok(Poly { coeffs: pack::unpack_bits(bytes, width, n)?, width })
    }
}

/// `l` polynomials of one width.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyVec {
    elems: Vec<Poly>,
}

impl PolyVec {
    pub fn new(elems: Vec<Poly>) -> Result<Self> {
        if let Some(first) = elems.first() {
            for e in &elems {
                if e.width != first.width {
                    return Err(Error::WidthMismatch(first.width, e.width));
                }
            }
        }
        Ok(PolyVec { elems })
    }

    pub fn zero(l: usize, n: usize, width: u32) -> Self {
        PolyVec { elems: vec![Poly::zero(n, width); l] }
    }

    pub fn elems(&self) -> &[Poly] {
        &self.elems
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn width(&self) -> u32 {
        self.elems.first().map_or(0, |p| p.width)
    }

    pub fn map(&self, f: impl Fn(&Poly) -> Poly) -> PolyVec {
        PolyVec { elems: self.elems.iter().map(f).collect() }
    }

    pub fn zip_with(
        &self,
        other: &PolyVec,
        f: impl Fn(&Poly, &Poly) -> Result<Poly>,
    ) -> Result<PolyVec> {
        if self.len() != other.len() {
            return Err(Error::Length { expected: self.len(), got: other.len() });
        }
        let elems = self.elems.iter().zip(&other.elems).map(|(a, b)| f(a, b)).collect::<Result<_>>()?;
        Ok(PolyVec { elems })
    }

    pub fn add(&self, other: &PolyVec) -> Result<PolyVec> {
        self.zip_with(other, Poly::add)
    }

    /// Inner product `sum_i self[i] * other[i]`.
    pub fn inner(&self, other: &PolyVec, params: &SchemeParams) -> Result<Poly> {
        if self.len() != other.len() {
            return Err(Error::Length { expected: self.len(), got: other.len() });
        }
        let mut acc = Poly::zero(params.n, self.width());
        for (a, b) in self.elems.iter().zip(&other.elems) {
            acc = acc.add(&a.mul(b, params)?)?;
        }
        Ok(acc)
    }

    /// Concatenated coefficients, polynomial-major.
    pub fn flat_coeffs(&self) -> Vec<u16> {
        self.elems.iter().flat_map(|p| p.coeffs.iter().copied()).collect()
    }

    pub fn from_flat(coeffs: &[u16], n: usize, width: u32) -> PolyVec {
        PolyVec {
            elems: coeffs.chunks(n).map(|c| Poly::from_coeffs(c.to_vec(), width)).collect(),
        }
    }

    pub fn pack(&self, width: u32) -> Result<Vec<u8>> {
        pack::pack_bits(&self.flat_coeffs(), width)
    }

    pub fn unpack(bytes: &[u8], width: u32, l: usize, n: usize) -> Result<PolyVec> {
        let flat = pack::unpack_bits(bytes, width, l * n)?;
        Ok(PolyVec::from_flat(&flat, n, width))
    }
}

/// An `l x l` matrix of polynomials, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMatrix {
    rows: Vec<PolyVec>,
}

impl PolyMatrix {
    pub fn new(rows: Vec<PolyVec>) -> Self {
        PolyMatrix { rows }
    }

    pub fn rows(&self) -> &[PolyVec] {
        &self.rows
    }

    pub fn get(&self, i: usize, j: usize) -> &Poly {
        &self.rows[i].elems[j]
    }

    /// `A * s`
    pub fn mul_vec(&self, s: &PolyVec, params: &SchemeParams) -> Result<PolyVec> {
        let elems = self.rows.iter().map(|row| row.inner(s, params)).collect::<Result<_>>()?;
        Ok(PolyVec { elems })
    }

    /// `A^T * s`
    pub fn mul_vec_transposed(&self, s: &PolyVec, params: &SchemeParams) -> Result<PolyVec> {
        let l = self.rows.len();
        let mut out = Vec::with_capacity(l);
        for i in 0..l {
            let mut acc = Poly::zero(params.n, s.width());
            for j in 0..l {
                acc = acc.add(&self.get(j, i).mul(&s.elems[j], params)?)?;
            }
            out.push(acc);
        }
        Ok(PolyVec { elems: out })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{Scheme, ESPADA, FLORETE};
    use rand::{Rng, SeedableRng};

    fn monomial(n: usize, deg: usize, width: u32) -> Poly {
        let mut c = vec![0u16; n];
        c[deg] = 1;
        Poly::from_coeffs(c, width)
    }

    fn random_poly(rng: &mut impl Rng, n: usize, width: u32) -> Poly {
        Poly::from_coeffs((0..n).map(|_| rng.gen()).collect(), width)
    }

    #[test]
    fn add_small_and_wrap() {
        let a = Poly::from_coeffs(vec![1, 2, 1023], 10);
        let b = Poly::from_coeffs(vec![3, 4, 1], 10);
        assert_eq!(a.add(&b).unwrap().coeffs(), &[4, 6, 0]);
        assert_eq!(b.sub(&a).unwrap().coeffs(), &[2, 2, 2]);
    }

    #[test]
    fn width_mismatch_is_rejected() {
        let a = Poly::zero(4, 10);
        let b = Poly::zero(4, 9);
        assert_eq!(a.add(&b), Err(Error::WidthMismatch(10, 9)));
        assert!(a.mul(&b, &ESPADA).is_err());
    }

    #[test]
    fn shifts() {
        let z = Poly::zero(8, 13);
        for k in 0..13 {
            assert_eq!(z.shift_right(k).coeffs(), &[0; 8]);
        }
        let a = Poly::from_coeffs(vec![0b1000, 0x3ff], 10);
        assert_eq!(a.shift_right(3).coeffs(), &[1, 0x7f]);
        assert_eq!(a.shift_right(3).width(), 7);
        assert_eq!(a.shift_left(1).coeffs(), &[0b10000, 0x3fe]);
        assert_eq!(a.add_const(1).coeffs(), &[0b1001, 0]);
    }

    #[test]
    fn negacyclic_wrap() {
        let x63 = monomial(64, 63, 15);
        let x = monomial(64, 1, 15);
        let prod = x63.mul(&x, &ESPADA).unwrap();
        let mut expect = vec![0u16; 64];
        expect[0] = (1 << 15) - 1;
        assert_eq!(prod.coeffs(), &expect[..]);
        assert_eq!(x63.mul_schoolbook(&x, &ESPADA).unwrap(), prod);
    }

    #[test]
    fn trinomial_wrap() {
        let x384 = monomial(768, 384, 10);
        let prod = x384.mul(&x384, &FLORETE).unwrap();
        let mut expect = vec![0u16; 768];
        expect[384] = 1;
        expect[0] = 1023;
        assert_eq!(prod.coeffs(), &expect[..]);
        // x^767 * x^767 = x^1534 = x^766 * x^768 = x^766 (x^384 - 1) = x^1150 - x^766
        //              = x^382 (x^384 - 1) - x^766 = -x^382
        let x767 = monomial(768, 767, 10);
        let prod = x767.mul_schoolbook(&x767, &FLORETE).unwrap();
        let mut expect = vec![0u16; 768];
        expect[382] = 1023;
        assert_eq!(prod.coeffs(), &expect[..]);
    }

    #[test]
    fn fast_matches_schoolbook_and_ring_laws() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for scheme in Scheme::ALL {
            let p = scheme.params();
            for _ in 0..1000 {
                let a = random_poly(&mut rng, p.n, p.eps_q);
                let b = random_poly(&mut rng, p.n, p.eps_q);
                let c = random_poly(&mut rng, p.n, p.eps_q);
                let ab = a.mul(&b, p).unwrap();
                assert_eq!(ab, a.mul_schoolbook(&b, p).unwrap());
                assert_eq!(ab, b.mul(&a, p).unwrap());
                let lhs = a.mul(&b.add(&c).unwrap(), p).unwrap();
                let rhs = ab.add(&a.mul(&c, p).unwrap()).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn transposed_product() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(3);
        let p = &ESPADA;
        let rows: Vec<PolyVec> = (0..3)
            .map(|_| PolyVec::new((0..3).map(|_| random_poly(&mut rng, p.n, 15)).collect()).unwrap())
            .collect();
        let a = PolyMatrix::new(rows);
        let s = PolyVec::new((0..3).map(|_| random_poly(&mut rng, p.n, 15)).collect()).unwrap();
        let at = PolyMatrix::new(
            (0..3)
                .map(|i| PolyVec::new((0..3).map(|j| a.get(j, i).clone()).collect()).unwrap())
                .collect(),
        );
        assert_eq!(a.mul_vec_transposed(&s, p).unwrap(), at.mul_vec(&s, p).unwrap());
    }
}
