//! Appell-Humbert data: semi-characters and line-bundle descriptors on the
//! Picard torus.
//!
//! A holomorphic line bundle on a complex torus `V / Lambda` is classified by
//! a pair `(H, alpha)`: a Hermitian form whose imaginary part `E` is integral
//! on the lattice, and an `E`-semi-character `alpha : Lambda -> S^1`
//! satisfying
//!
//! ```text
//! alpha(l + m) = alpha(l) alpha(m) e^{pi i E(l, m)}.
//! ```
//!
//! Only the exact part of the pair is stored here: the integer alternating
//! form `E` and the semi-character as rational angles (`zeta` stands for the
//! circle value `e^{2 pi i zeta}`).  The Hermitian form is reconstructed from
//! `(E, J)` on demand by [`crate::analytic::hermitian_from_alt`], so floating
//! point never leaks into the descriptor itself.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use num_complex::Complex64;

use crate::analytic::{AnalyticError, PeriodData};
use crate::lattice::{
    smith_normal_form, AntiSymplecticInvolution, Int, IntegerMatrix, SymplecticLattice, Vector,
};
use crate::theta_form::{QuadraticFormZ2, Z2Vector};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DatumError {
    #[error("expected {expected} basis angles, got {found}")]
    AngleCount { expected: usize, found: usize },
    #[error("form must be a skew-symmetric square matrix of even size")]
    NotAlternating,
    #[error("semi-character is adapted to a different form")]
    FormMismatch,
    #[error("genus mismatch between data of genus {0} and {1}")]
    GenusMismatch(usize, usize),
}

fn mod1(r: BigRational) -> BigRational {
    let f = r.floor();
    r - f
}

/// A semi-character stored as exact rational angles on the lattice basis,
/// together with the alternating form it is adapted to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SemiCharacter {
    basis_angles: Vec<BigRational>,
    form: IntegerMatrix,
}

impl SemiCharacter {
    pub fn new(basis_angles: Vec<BigRational>, form: IntegerMatrix) -> Result<Self, DatumError> {
        if !form.is_skew_symmetric() || !form.rows().is_multiple_of(2) {
            return Err(DatumError::NotAlternating);
        }
        if basis_angles.len() != form.rows() {
            return Err(DatumError::AngleCount {
                expected: form.rows(),
                found: basis_angles.len(),
            });
        }
        Ok(SemiCharacter {
            basis_angles: basis_angles.into_iter().map(mod1).collect(),
            form,
        })
    }

    /// The trivial character adapted to the zero form of rank `2g`.
    pub fn trivial(genus: usize) -> Self {
        SemiCharacter {
            basis_angles: vec![BigRational::zero(); 2 * genus],
            form: IntegerMatrix::zeros(2 * genus, 2 * genus),
        }
    }

    pub fn rank(&self) -> usize {
        self.basis_angles.len()
    }

    pub fn genus(&self) -> usize {
        self.basis_angles.len() / 2
    }

    pub fn form(&self) -> &IntegerMatrix {
        &self.form
    }

    pub fn basis_angles(&self) -> &[BigRational] {
        &self.basis_angles
    }

    /// Exact angle of `alpha(lambda)` in `[0, 1)`.
    ///
    /// Extending from the basis along any decomposition gives the same
    /// value: reordering two summands changes the exponent by an even
    /// multiple of `pi i E`, which is invisible on the circle.  The closed
    /// form used here is
    /// `sum_i c_i zeta_i + (1/2) sum_{i<j} c_i c_j E(b_i, b_j)  (mod 1)`,
    /// so the denominator divides twice the lcm of the basis denominators.
    pub fn angle(&self, lambda: &[Int]) -> BigRational {
        let n = self.rank();
        assert_eq!(lambda.len(), n, "lattice vector length mismatch");
        let mut acc = BigRational::zero();
        for (c, zeta) in lambda.iter().zip(&self.basis_angles) {
            acc += BigRational::from(c.clone()) * zeta;
        }
        let mut half_sum = Int::zero();
        for i in 0..n {
            if lambda[i].is_zero() {
                continue;
            }
            for j in i + 1..n {
                half_sum += &lambda[i] * &lambda[j] * &self.form[(i, j)];
            }
        }
        acc += BigRational::new(half_sum, BigInt::from(2));
        mod1(acc)
    }

    /// Circle value `e^{2 pi i angle}` as a complex double.
    pub fn value(&self, lambda: &[Int]) -> Complex64 {
        let theta = self.angle(lambda).to_f64().unwrap();
        Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * theta)
    }

    /// The conjugate character, adapted to `-E`.
    pub fn conjugate(&self) -> SemiCharacter {
        SemiCharacter {
            basis_angles: self.basis_angles.iter().map(|a| mod1(-a)).collect(),
            form: self.form.neg(),
        }
    }
}

/// Descriptor of a holomorphic line bundle on the Picard torus: an integral
/// alternating form together with an adapted semi-character.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AHDatum {
    form: IntegerMatrix,
    alpha: SemiCharacter,
}

impl AHDatum {
    pub fn new(form: IntegerMatrix, alpha: SemiCharacter) -> Result<Self, DatumError> {
        if !form.is_skew_symmetric() || !form.rows().is_multiple_of(2) {
            return Err(DatumError::NotAlternating);
        }
        if alpha.form() != &form {
            return Err(DatumError::FormMismatch);
        }
        Ok(AHDatum { form, alpha })
    }

    /// The flat trivial bundle of rank `2g`.
    pub fn trivial(genus: usize) -> Self {
        AHDatum {
            form: IntegerMatrix::zeros(2 * genus, 2 * genus),
            alpha: SemiCharacter::trivial(genus),
        }
    }

    /// Flat bundle of order two given by the pairing against `eta`:
    /// `alpha(l) = (-1)^{l . eta}`.
    pub fn flat_order_two(eta: &Z2Vector) -> Self {
        let g = eta.genus();
        let lat = SymplecticLattice::new(g);
        let eta_lift: Vector = eta.coords().iter().map(|&b| Int::from(b)).collect();
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        let mut angles = Vec::with_capacity(2 * g);
        for i in 0..2 * g {
            let mut basis = vec![Int::zero(); 2 * g];
            basis[i] = Int::one();
            let bit = lat.pairing(&basis, &eta_lift).mod_floor(&Int::from(2));
            angles.push(&half * BigRational::from(bit));
        }
        AHDatum {
            form: IntegerMatrix::zeros(2 * g, 2 * g),
            alpha: SemiCharacter {
                basis_angles: angles,
                form: IntegerMatrix::zeros(2 * g, 2 * g),
            },
        }
    }

    pub fn genus(&self) -> usize {
        self.form.rows() / 2
    }

    pub fn form(&self) -> &IntegerMatrix {
        &self.form
    }

    pub fn alpha(&self) -> &SemiCharacter {
        &self.alpha
    }

    /// The dual descriptor `(-E, conj alpha)`.
    pub fn dual(&self) -> AHDatum {
        AHDatum {
            form: self.form.neg(),
            alpha: self.alpha.conjugate(),
        }
    }
}

/// Tensor product of descriptors: forms add, characters multiply.
pub fn tensor(d1: &AHDatum, d2: &AHDatum) -> Result<AHDatum, DatumError> {
    if d1.genus() != d2.genus() {
        return Err(DatumError::GenusMismatch(d1.genus(), d2.genus()));
    }
    let form = d1.form.add(&d2.form);
    let angles = d1
        .alpha
        .basis_angles
        .iter()
        .zip(&d2.alpha.basis_angles)
        .map(|(a, b)| mod1(a + b))
        .collect();
    Ok(AHDatum {
        alpha: SemiCharacter {
            basis_angles: angles,
            form: form.clone(),
        },
        form,
    })
}

/// Descriptor of the symmetric theta bundle attached to a theta form.
///
/// The form is the standard cup pairing and the character has angle
/// `q(lambda mod 2) / 2`, i.e. `alpha(lambda) = (-1)^{q(lambda mod 2)}`.
/// This is a valid semi-character precisely because `q` satisfies the
/// Riemann-Mumford relation; the identification of mod-2 homology with
/// mod-2 cohomology classes is the coordinate identity throughout.
pub fn alpha_from_theta(q: &QuadraticFormZ2) -> AHDatum {
    let g = q.genus();
    let form = SymplecticLattice::new(g).cup_form();
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let mut angles = Vec::with_capacity(2 * g);
    for i in 0..2 * g {
        let basis = Z2Vector::new(g, 1 << i).unwrap();
        angles.push(&half * BigRational::from(Int::from(q.eval(&basis))));
    }
    AHDatum {
        alpha: SemiCharacter {
            basis_angles: angles,
            form: form.clone(),
        },
        form,
    }
}

/// Number of independent sections of a line bundle with nondegenerate
/// positive alternating form, or the degenerate flag.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SectionCount {
    /// Product of the elementary-divisor pairs (the Pfaffian of `E`).  For a
    /// positive-polarizing form this is the dimension of the space of
    /// sections; in general it is the Pfaffian magnitude.
    Sections(Int),
    /// `E` has nontrivial kernel.
    Degenerate,
}

/// Section count of the bundle with alternating form `e`.
pub fn section_count(e: &IntegerMatrix) -> Result<SectionCount, DatumError> {
    if !e.is_skew_symmetric() || !e.rows().is_multiple_of(2) {
        return Err(DatumError::NotAlternating);
    }
    let snf = smith_normal_form(e);
    let diag = snf.diagonal();
    if diag.iter().any(Zero::is_zero) {
        return Ok(SectionCount::Degenerate);
    }
    // divisors of an alternating form come in equal pairs
    let mut pf = Int::one();
    for pair in diag.chunks(2) {
        debug_assert_eq!(pair[0], pair[1], "alternating form with unpaired divisor");
        pf *= &pair[0];
    }
    Ok(SectionCount::Sections(pf))
}

/// Whether the descriptor is fixed by the real structure `tau`.
///
/// The concrete criterion: `E(tau x, tau y) = -E(x, y)` as matrices, and
/// `alpha(tau b) = conj alpha(b)` on every basis vector `b`.  Both sides of
/// the second condition are semi-characters for `-E` once the first holds,
/// so basis agreement suffices.
pub fn is_real_datum(datum: &AHDatum, tau: &AntiSymplecticInvolution) -> bool {
    if tau.rank() != 2 * datum.genus() {
        return false;
    }
    let t = tau.matrix();
    let conjugated = t.transpose().mul(datum.form()).mul(t);
    if conjugated != datum.form().neg() {
        return false;
    }
    let n = 2 * datum.genus();
    for i in 0..n {
        let mut basis = vec![Int::zero(); n];
        basis[i] = Int::one();
        let image = tau.apply(&basis);
        let lhs = datum.alpha.angle(&image);
        let rhs = mod1(-datum.alpha.angle(&basis));
        if lhs != rhs {
            return false;
        }
    }
    true
}

/// Value of the canonical factor of automorphy `a(lambda, v)`.
///
/// With `H` the Hermitian form reconstructed from `(E, J)`,
/// `a(lambda, v) = alpha(lambda) e^{pi [H(lambda, v) + H(lambda, lambda)/2]}`.
/// Satisfies the cocycle identity
/// `a(l + m, v) = a(l, v + m) a(m, v)` up to floating-point error.
pub fn factor_of_automorphy(
    datum: &AHDatum,
    period: &PeriodData,
    lambda: &[Int],
    v: &[Complex64],
) -> Result<Complex64, AnalyticError> {
    let g = datum.genus();
    if period.genus() != g {
        return Err(AnalyticError::GenusMismatch {
            expected: g,
            found: period.genus(),
        });
    }
    assert_eq!(lambda.len(), 2 * g, "lattice vector length mismatch");
    assert_eq!(v.len(), g, "point must live in C^g");
    let h = crate::analytic::hermitian_from_alt(datum.form(), period)?;
    let lambda_c = period.to_complex(lambda);
    let h_lambda_v = crate::analytic::hermitian_pairing(&h, &lambda_c, v);
    let h_lambda_lambda = crate::analytic::hermitian_pairing(&h, &lambda_c, &lambda_c);
    let exponent = std::f64::consts::PI * (h_lambda_v + 0.5 * h_lambda_lambda);
    Ok(datum.alpha.value(lambda) * exponent.exp())
}
