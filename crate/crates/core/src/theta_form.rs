//! Quadratic forms over GF(2) refining the mod-2 symplectic pairing.
//!
//! A theta characteristic of a genus-`g` curve is encoded by its quadratic
//! form `q : Z_2^{2g} -> Z_2` satisfying the Riemann-Mumford relation
//! `q(x + y) = q(x) + q(y) + x.y`, where `x.y` is the mod-2 reduction of the
//! cup pairing.  Such a form is determined by its `2g` values on the basis
//! `e_1..e_g, f_1..f_g`, so there are exactly `2^{2g}` of them.  Forms are
//! stored as basis bit masks, never as value tables.

use thiserror::Error;

use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::klein::RealCurveModel;
use crate::lattice::Int;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormError {
    #[error("expected {expected} bits for genus {genus}, got {found}")]
    LengthMismatch {
        genus: usize,
        expected: usize,
        found: usize,
    },
    #[error("bit values must be 0 or 1")]
    NotABit,
    #[error("genus {0} exceeds the supported bit width")]
    GenusTooLarge(usize),
}

/// Supported upper bound on the genus for mask-based forms.
pub const MAX_GENUS: usize = 14;

/// A vector in `Z_2^{2g}`, bit `i` for `e_{i+1}`, bit `g+i` for `f_{i+1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Z2Vector {
    genus: usize,
    bits: u32,
}

impl Z2Vector {
    pub fn new(genus: usize, bits: u32) -> Result<Self, FormError> {
        if genus > MAX_GENUS {
            return Err(FormError::GenusTooLarge(genus));
        }
        if bits >> (2 * genus) != 0 {
            return Err(FormError::LengthMismatch {
                genus,
                expected: 2 * genus,
                found: 32 - bits.leading_zeros() as usize,
            });
        }
        Ok(Z2Vector { genus, bits })
    }

    pub fn zero(genus: usize) -> Self {
        Z2Vector { genus, bits: 0 }
    }

    pub fn from_coords(genus: usize, coords: &[u8]) -> Result<Self, FormError> {
        if coords.len() != 2 * genus {
            return Err(FormError::LengthMismatch {
                genus,
                expected: 2 * genus,
                found: coords.len(),
            });
        }
        let mut bits = 0u32;
        for (i, &c) in coords.iter().enumerate() {
            if c > 1 {
                return Err(FormError::NotABit);
            }
            bits |= (c as u32) << i;
        }
        Z2Vector::new(genus, bits)
    }

    /// Mod-2 reduction of an integer lattice vector.
    pub fn from_lattice_vector(v: &[Int]) -> Self {
        debug_assert!(v.len().is_multiple_of(2));
        let genus = v.len() / 2;
        let mut bits = 0u32;
        for (i, e) in v.iter().enumerate() {
            bits |= (e.mod_floor(&Int::from(2)).to_u32().unwrap()) << i;
        }
        Z2Vector { genus, bits }
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn coords(&self) -> Vec<u8> {
        (0..2 * self.genus)
            .map(|i| ((self.bits >> i) & 1) as u8)
            .collect()
    }

    pub fn add(&self, other: &Z2Vector) -> Z2Vector {
        assert_eq!(self.genus, other.genus, "genus mismatch");
        Z2Vector {
            genus: self.genus,
            bits: self.bits ^ other.bits,
        }
    }

    /// Mod-2 symplectic pairing `x.y`.
    pub fn pairing(&self, other: &Z2Vector) -> u8 {
        assert_eq!(self.genus, other.genus, "genus mismatch");
        let g = self.genus;
        let mask = if g == 0 { 0 } else { (1u32 << g) - 1 };
        let cross =
            (self.bits & mask & (other.bits >> g)) ^ ((self.bits >> g) & (other.bits & mask));
        (cross.count_ones() & 1) as u8
    }
}

/// A quadratic form on `Z_2^{2g}` whose polarization is the mod-2 symplectic
/// pairing; equivalently, a theta characteristic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct QuadraticFormZ2 {
    genus: usize,
    basis_bits: u32,
}

impl QuadraticFormZ2 {
    /// The form vanishing on the whole basis.
    pub fn zero(genus: usize) -> Self {
        QuadraticFormZ2 {
            genus,
            basis_bits: 0,
        }
    }

    /// Form with the given basis values `q(e_1), .., q(f_g)`.
    pub fn from_bits(genus: usize, bits: &[u8]) -> Result<Self, FormError> {
        let v = Z2Vector::from_coords(genus, bits)?;
        Ok(QuadraticFormZ2 {
            genus,
            basis_bits: v.bits(),
        })
    }

    pub fn from_mask(genus: usize, mask: u32) -> Result<Self, FormError> {
        let v = Z2Vector::new(genus, mask)?;
        Ok(QuadraticFormZ2 {
            genus,
            basis_bits: v.bits(),
        })
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn basis_values(&self) -> Vec<u8> {
        Z2Vector {
            genus: self.genus,
            bits: self.basis_bits,
        }
        .coords()
    }

    pub fn basis_mask(&self) -> u32 {
        self.basis_bits
    }

    /// Evaluation via the basis expansion: the linear part plus the sum of
    /// pairwise basis pairings, which for the standard pairing is
    /// `sum_i x_i y_i`.
    pub fn eval(&self, v: &Z2Vector) -> u8 {
        assert_eq!(self.genus, v.genus(), "genus mismatch");
        let g = self.genus;
        let mask = if g == 0 { 0 } else { (1u32 << g) - 1 };
        let linear = (self.basis_bits & v.bits()).count_ones();
        let quad = (v.bits() & mask & (v.bits() >> g)).count_ones();
        ((linear + quad) & 1) as u8
    }

    /// Arf invariant `sum_i q(e_i) q(f_i)`.
    pub fn arf(&self) -> u8 {
        let g = self.genus;
        let mask = if g == 0 { 0 } else { (1u32 << g) - 1 };
        ((self.basis_bits & mask & (self.basis_bits >> g)).count_ones() & 1) as u8
    }

    /// The translated form `q'(x) = q(x) + x.eta`.
    pub fn translate(&self, eta: &Z2Vector) -> QuadraticFormZ2 {
        assert_eq!(self.genus, eta.genus(), "genus mismatch");
        let g = self.genus;
        let mask = if g == 0 { 0 } else { (1u32 << g) - 1 };
        // pairing a basis vector against eta swaps the halves of eta
        let shift = (eta.bits() >> g) | ((eta.bits() & mask) << g);
        QuadraticFormZ2 {
            genus: self.genus,
            basis_bits: self.basis_bits ^ shift,
        }
    }
}

/// All `2^{2g}` forms in deterministic order (basis bits as a binary
/// counter, least significant bit = `q(e_1)`).
pub fn enumerate_theta(genus: usize) -> impl Iterator<Item = QuadraticFormZ2> {
    assert!(genus <= MAX_GENUS, "genus {genus} out of range");
    (0u64..1 << (2 * genus)).map(move |mask| QuadraticFormZ2 {
        genus,
        basis_bits: mask as u32,
    })
}

/// Whether `q` is fixed by the involution induced on the 2-torsion points.
///
/// The criterion is `q(T x) = q(x)` for `T` the mod-2 reduction of `iota*`
/// (which agrees with the reduction of the Picard involution).  Both sides
/// are quadratic forms with the same polarization, so agreement on the basis
/// suffices.
pub fn is_real_theta(q: &QuadraticFormZ2, model: &RealCurveModel) -> bool {
    let g = model.genus();
    assert_eq!(q.genus(), g, "genus mismatch");
    let t = model.iota_star().matrix();
    for i in 0..2 * g {
        let col: Vec<Int> = (0..2 * g).map(|r| t[(r, i)].clone()).collect();
        let image = Z2Vector::from_lattice_vector(&col);
        let basis = Z2Vector::new(g, 1 << i).unwrap();
        if q.eval(&image) != q.eval(&basis) {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::klein::{standard_model, TopologicalType};

    fn v(g: usize, coords: &[u8]) -> Z2Vector {
        Z2Vector::from_coords(g, coords).unwrap()
    }

    #[test]
    fn eval_matches_riemann_mumford_examples() {
        let q = QuadraticFormZ2::zero(1);
        assert_eq!(q.eval(&v(1, &[0, 0])), 0);
        assert_eq!(q.eval(&v(1, &[1, 1])), 1); // q(e+f) = 0 + 0 + e.f

        let q = QuadraticFormZ2::from_bits(1, &[1, 1]).unwrap();
        assert_eq!(q.eval(&v(1, &[1, 1])), 1); // 1 + 1 + 1 mod 2
    }

    #[test]
    fn riemann_mumford_relation_exhaustive() {
        for g in 0..=3usize {
            for q in enumerate_theta(g) {
                for x in 0u32..1 << (2 * g) {
                    for y in 0u32..1 << (2 * g) {
                        let vx = Z2Vector::new(g, x).unwrap();
                        let vy = Z2Vector::new(g, y).unwrap();
                        let lhs = q.eval(&vx.add(&vy));
                        let rhs = (q.eval(&vx) + q.eval(&vy) + vx.pairing(&vy)) % 2;
                        assert_eq!(lhs, rhs, "g={g} q={:?} x={x:b} y={y:b}", q.basis_values());
                    }
                }
            }
        }
    }

    #[test]
    fn arf_by_zero_count_oracle() {
        // an even form has 2^{2g-1} + 2^{g-1} zeros, an odd one 2^{2g-1} - 2^{g-1}
        for g in 1..=3usize {
            for q in enumerate_theta(g) {
                let zeros = (0u32..1 << (2 * g))
                    .filter(|&m| q.eval(&Z2Vector::new(g, m).unwrap()) == 0)
                    .count() as i64;
                let expected =
                    (1i64 << (2 * g - 1)) + (1i64 << (g - 1)) * if q.arf() == 0 { 1 } else { -1 };
                assert_eq!(zeros, expected, "g={g} bits={:?}", q.basis_values());
            }
        }
        // the all-ones form at g=1 has a single zero, hence arf 1
        let q = QuadraticFormZ2::from_bits(1, &[1, 1]).unwrap();
        assert_eq!(q.arf(), 1);
        assert_eq!(QuadraticFormZ2::zero(2).arf(), 0);
    }

    #[test]
    fn census_counts() {
        for g in 0..=4usize {
            let total = enumerate_theta(g).count();
            assert_eq!(total, 1 << (2 * g));
            let even = enumerate_theta(g).filter(|q| q.arf() == 0).count() as i64;
            let odd = enumerate_theta(g).filter(|q| q.arf() == 1).count() as i64;
            if g == 0 {
                assert_eq!((even, odd), (1, 0));
            } else {
                assert_eq!(even, (1i64 << (g - 1)) * ((1 << g) + 1));
                assert_eq!(odd, (1i64 << (g - 1)) * ((1 << g) - 1));
            }
        }
        let arf_one_g2 = enumerate_theta(2).filter(|q| q.arf() == 1).count();
        assert_eq!(arf_one_g2, 6);
    }

    #[test]
    fn translate_is_a_free_transitive_action() {
        let q = QuadraticFormZ2::zero(1);
        assert_eq!(q.translate(&Z2Vector::zero(1)), q);
        let shifted = q.translate(&v(1, &[1, 1]));
        assert_eq!(shifted.basis_values(), vec![1, 1]);

        for g in 0..=2usize {
            let base = QuadraticFormZ2::zero(g);
            let mut seen: Vec<u32> = (0..1u32 << (2 * g))
                .map(|m| base.translate(&Z2Vector::new(g, m).unwrap()).basis_mask())
                .collect();
            seen.sort_unstable();
            seen.dedup();
            assert_eq!(seen.len(), 1 << (2 * g), "orbit misses forms at g={g}");
        }
    }

    #[test]
    fn arf_shifts_by_value_under_translation() {
        for g in 1..=2usize {
            for q in enumerate_theta(g) {
                for m in 0u32..1 << (2 * g) {
                    let eta = Z2Vector::new(g, m).unwrap();
                    let lhs = q.translate(&eta).arf();
                    let rhs = (q.arf() + q.eval(&eta)) % 2;
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn real_forms_for_standard_models() {
        let annulus = standard_model(TopologicalType::new(1, 2, 0)).unwrap();
        assert!(enumerate_theta(1).all(|q| is_real_theta(&q, &annulus)));

        let moebius = standard_model(TopologicalType::new(1, 1, 1)).unwrap();
        let real: Vec<_> = enumerate_theta(1)
            .filter(|q| is_real_theta(q, &moebius))
            .collect();
        assert_eq!(real.len(), 2);
        for q in &real {
            assert_eq!(q.basis_values()[0], 1, "realness forces q(e) = 1");
        }
    }

    #[test]
    fn realness_is_translation_equivariant() {
        for tt in [TopologicalType::new(2, 1, 0), TopologicalType::new(2, 2, 1)] {
            let model = standard_model(tt).unwrap();
            let t2: Vec<u32> = (0..4)
                .map(|i| {
                    let col: Vec<Int> = (0..4)
                        .map(|r| model.iota_star().matrix()[(r, i)].clone())
                        .collect();
                    Z2Vector::from_lattice_vector(&col).bits()
                })
                .collect();
            for m in 0u32..16 {
                let eta = Z2Vector::new(2, m).unwrap();
                let image_bits =
                    (0..4).fold(
                        0u32,
                        |acc, i| {
                            if (m >> i) & 1 == 1 {
                                acc ^ t2[i]
                            } else {
                                acc
                            }
                        },
                    );
                if image_bits != m {
                    continue;
                }
                for q in enumerate_theta(2) {
                    if is_real_theta(&q, &model) {
                        assert!(is_real_theta(&q.translate(&eta), &model));
                    }
                }
            }
        }
    }

    #[test]
    fn genus_zero_has_one_form() {
        let forms: Vec<_> = enumerate_theta(0).collect();
        assert_eq!(forms.len(), 1);
        assert_eq!(forms[0].eval(&Z2Vector::zero(0)), 0);
        assert_eq!(forms[0].arf(), 0);
    }
}
