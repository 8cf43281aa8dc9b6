//! Components of the real Picard torus and Stiefel-Whitney classes of the
//! fixed-point bundles of real line bundles.
//!
//! For the Picard involution `tau` the fixed locus of the torus decomposes
//! into `2^{n-1}` affine subtori indexed by `(1/2) L^{-tau} / (1/2)(1-tau) L`.
//! A real line-bundle descriptor assigns to each component a homomorphism
//! `L^tau -> Z_2`: on the identity component it is the exponent of the
//! semi-character (whose values on `L^tau` are forced to be +-1), and the
//! other components differ by the pairing `E(2 mu, .) mod 2`, which is
//! independent of the chosen coset representative.
//!
//! Specializing to the descriptor of a symmetric theta bundle gives the
//! tables produced by [`sw_table`]: one row of `Z_2` values per component
//! over a basis of `L^tau`, the values at the circle classes, and the
//! per-circle spin bits `q([C_i] mod 2) + 1`.

use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::appell_humbert::{alpha_from_theta, is_real_datum, AHDatum};
use crate::klein::{picard_involution, RealCurveModel, TopologicalType};
use crate::lattice::{
    eigenlattice, quotient_group, solve, AntiSymplecticInvolution, Int, IntegerMatrix,
    LatticeError, Vector,
};
use crate::theta_form::{is_real_theta, QuadraticFormZ2, Z2Vector};

#[derive(Debug, Error, PartialEq)]
pub enum SwError {
    #[error("descriptor is not fixed by the real structure")]
    NotRealDatum,
    #[error("theta form is not fixed by the involution; the table is undefined")]
    NotRealTheta,
    #[error("real locus is empty; the fixed-point class is undefined")]
    EmptyRealLocus,
    #[error("component representative does not double into the anti-invariant lattice")]
    BadRepresentative,
    #[error("semi-character takes a non-real value on a fixed lattice vector")]
    NonRealValue,
    #[error("norm compatibility failed on the generating set")]
    CoherenceFailure,
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// A connected component of the real Picard torus, stored through the
/// doubled representative `2 mu` in the `(-1)`-eigenlattice of `tau`.
///
/// Two components agree when the doubled representatives differ by an
/// element of `(1 - tau) L`; use [`RealComponent::same_component`] for that
/// test.  Structural equality compares representatives verbatim.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealComponent {
    two_mu: Vector,
}

impl RealComponent {
    /// Component containing the origin.
    pub fn identity(rank: usize) -> Self {
        RealComponent {
            two_mu: vec![Int::zero(); rank],
        }
    }

    /// Wraps an arbitrary doubled representative after checking that it is
    /// anti-invariant.  No reduction is applied.
    pub fn with_representative(
        two_mu: Vector,
        tau: &AntiSymplecticInvolution,
    ) -> Result<Self, SwError> {
        let image = tau.apply(&two_mu);
        let negated: Vector = two_mu.iter().map(|x| -x).collect();
        if image != negated {
            return Err(SwError::BadRepresentative);
        }
        Ok(RealComponent { two_mu })
    }

    pub fn two_mu(&self) -> &[Int] {
        &self.two_mu
    }

    /// The half-integer representative itself.
    pub fn mu(&self) -> Vec<BigRational> {
        self.two_mu
            .iter()
            .map(|x| BigRational::new(x.clone(), Int::from(2)))
            .collect()
    }

    pub fn is_identity(&self) -> bool {
        self.two_mu.iter().all(Zero::is_zero)
    }

    /// Whether the two representatives name the same component of the fixed
    /// locus of `tau`.
    pub fn same_component(&self, other: &RealComponent, tau: &AntiSymplecticInvolution) -> bool {
        let n = tau.rank();
        let diff: Vector = self
            .two_mu
            .iter()
            .zip(&other.two_mu)
            .map(|(a, b)| a - b)
            .collect();
        let gens = one_minus_tau_generators(tau);
        let m = IntegerMatrix::from_columns(&gens, n);
        solve(&m, &diff).is_some()
    }
}

fn one_minus_tau_generators(tau: &AntiSymplecticInvolution) -> Vec<Vector> {
    let n = tau.rank();
    (0..n)
        .map(|i| {
            let mut s = vec![Int::zero(); n];
            s[i] = Int::one();
            let image = tau.apply(&s);
            s.iter().zip(&image).map(|(a, b)| a - b).collect()
        })
        .collect()
}

/// Components of the fixed locus of `tau`, canonically represented and
/// deterministically ordered with the identity component first.
///
/// The quotient `(1/2) L^{-tau} / (1/2)(1-tau) L` is computed as
/// `L^{-tau} / (1-tau) L` through the doubling identification.
pub fn component_group(tau: &AntiSymplecticInvolution) -> Result<Vec<RealComponent>, SwError> {
    let n = tau.rank();
    let minus_basis = eigenlattice(tau, -1);
    if minus_basis.is_empty() {
        return Ok(vec![RealComponent::identity(n)]);
    }
    let basis_matrix = IntegerMatrix::from_columns(&minus_basis, n);
    let mut gens_in_coords = Vec::new();
    for gen in one_minus_tau_generators(tau) {
        let coords =
            solve(&basis_matrix, &gen).expect("(1 - tau) image escaped the (-1)-eigenlattice");
        gens_in_coords.push(coords);
    }
    let quotient = quotient_group(&gens_in_coords, minus_basis.len())?;
    let mut components: Vec<RealComponent> = quotient
        .coset_representatives
        .iter()
        .map(|coords| RealComponent {
            two_mu: basis_matrix.mul_vec(coords),
        })
        .collect();
    components.sort_by(|a, b| {
        b.is_identity()
            .cmp(&a.is_identity())
            .then_with(|| a.two_mu.cmp(&b.two_mu))
    });
    Ok(components)
}

fn angle_exponent(angle: &BigRational) -> Result<u8, SwError> {
    if angle.is_zero() {
        Ok(0)
    } else if *angle == BigRational::new(Int::one(), Int::from(2)) {
        Ok(1)
    } else {
        Err(SwError::NonRealValue)
    }
}

fn pairing_mod2(e: &IntegerMatrix, u: &[Int], v: &[Int]) -> u8 {
    let mut acc = Int::zero();
    for i in 0..u.len() {
        if u[i].is_zero() {
            continue;
        }
        for j in 0..v.len() {
            acc += &u[i] * &e[(i, j)] * &v[j];
        }
    }
    acc.mod_floor(&Int::from(2)).to_u8().unwrap()
}

/// Canonical basis of the `(+1)`-eigenlattice of `tau`, over which the
/// class rows are expressed.
pub fn tau_fixed_basis(tau: &AntiSymplecticInvolution) -> Vec<Vector> {
    eigenlattice(tau, 1)
}

/// Row of the first Stiefel-Whitney class of the fixed-point bundle over
/// one component, as values on [`tau_fixed_basis`].
///
/// Identity component: the exponent of the semi-character (necessarily a
/// sign for a real descriptor).  Other components add `E(2 mu, .) mod 2`;
/// the shift kills `(1 - tau) L`, so any representative gives the same row.
pub fn w_class(
    datum: &AHDatum,
    tau: &AntiSymplecticInvolution,
    component: &RealComponent,
) -> Result<Vec<u8>, SwError> {
    w_row(datum, tau, component, &tau_fixed_basis(tau))
}

/// Values of the class of `component` at arbitrary vectors of `L^tau`.
///
/// The realness of the descriptor is validated once per call, so batching
/// the evaluation points is much cheaper than repeated [`w_class`] calls.
pub fn w_row(
    datum: &AHDatum,
    tau: &AntiSymplecticInvolution,
    component: &RealComponent,
    vectors: &[Vector],
) -> Result<Vec<u8>, SwError> {
    if !is_real_datum(datum, tau) {
        return Err(SwError::NotRealDatum);
    }
    vectors
        .iter()
        .map(|v| w_value_on_fixed_vector(datum, component, v))
        .collect()
}

fn w_value_on_fixed_vector(
    datum: &AHDatum,
    component: &RealComponent,
    lambda: &[Int],
) -> Result<u8, SwError> {
    let base = angle_exponent(&datum.alpha().angle(lambda))?;
    let shift = pairing_mod2(datum.form(), component.two_mu(), lambda);
    Ok((base + shift) % 2)
}

/// `E(lambda, tau lambda) mod 2`, the common value of every component's row
/// at `lambda + tau lambda`.
pub fn norm_value(
    datum: &AHDatum,
    tau: &AntiSymplecticInvolution,
    lambda: &[Int],
) -> Result<u8, SwError> {
    if !is_real_datum(datum, tau) {
        return Err(SwError::NotRealDatum);
    }
    let image = tau.apply(lambda);
    Ok(pairing_mod2(datum.form(), lambda, &image))
}

/// One component's worth of table data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SwRow {
    pub component: RealComponent,
    /// Values on the canonical basis of `L^tau`.
    pub row: Vec<u8>,
    /// Values at the circle classes.
    pub circle_values: Vec<u8>,
}

/// The full Stiefel-Whitney table of a symmetric theta bundle: one row per
/// component of the real Picard torus plus the per-circle spin bits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SWTable {
    pub topological_type: TopologicalType,
    pub q_bits: Vec<u8>,
    pub tau_basis: Vec<Vector>,
    pub circle_classes: Vec<Vector>,
    pub components: Vec<SwRow>,
    /// `q([C_i] mod 2) + 1` for each circle.
    pub spin_data: Vec<u8>,
}

impl SWTable {
    /// Evaluates the row of `component_index` at an arbitrary vector of
    /// `L^tau` by expanding in the canonical basis.
    pub fn row_value_at(&self, component_index: usize, lambda: &[Int]) -> Option<u8> {
        let coords = expand_in_basis(&self.tau_basis, lambda)?;
        let row = &self.components[component_index].row;
        let mut acc = 0u8;
        for (c, r) in coords.iter().zip(row) {
            acc ^= (c.mod_floor(&Int::from(2)).to_u8().unwrap()) & r;
        }
        Some(acc)
    }
}

fn expand_in_basis(basis: &[Vector], v: &[Int]) -> Option<Vector> {
    if basis.is_empty() {
        return if v.iter().all(Zero::is_zero) {
            Some(Vector::new())
        } else {
            None
        };
    }
    let m = IntegerMatrix::from_columns(basis, v.len());
    solve(&m, v)
}

/// Builds the table for a model and a theta form fixed by the involution.
///
/// Realness of the form already forces the descriptor to be real (the
/// angles are halves of form values, invariant under the mod-2 involution),
/// so the rows are assembled directly; a non-sign semi-character value
/// would still surface as [`SwError::NonRealValue`].
///
/// The construction cross-checks, on the standard generating set, that the
/// identity row evaluated at `lambda - iota* lambda` equals the cup pairing
/// `<lambda, -iota* lambda> mod 2`; a failure is reported rather than
/// silently ignored.
pub fn sw_table(model: &RealCurveModel, q: &QuadraticFormZ2) -> Result<SWTable, SwError> {
    if model.circle_count() == 0 {
        return Err(SwError::EmptyRealLocus);
    }
    if !is_real_theta(q, model) {
        return Err(SwError::NotRealTheta);
    }
    let datum = alpha_from_theta(q);
    let tau = picard_involution(model);
    let components = component_group(&tau)?;
    let tau_basis = tau_fixed_basis(&tau);

    let mut rows = Vec::with_capacity(components.len());
    for component in components {
        let row = tau_basis
            .iter()
            .map(|b| w_value_on_fixed_vector(&datum, &component, b))
            .collect::<Result<Vec<u8>, SwError>>()?;
        let circle_values = model
            .circle_classes()
            .iter()
            .map(|c| w_value_on_fixed_vector(&datum, &component, c))
            .collect::<Result<Vec<u8>, SwError>>()?;
        rows.push(SwRow {
            component,
            row,
            circle_values,
        });
    }

    let spin_data = model
        .circle_classes()
        .iter()
        .map(|c| (q.eval(&Z2Vector::from_lattice_vector(c)) + 1) % 2)
        .collect();

    let table = SWTable {
        topological_type: model.topological_type(),
        q_bits: q.basis_values(),
        tau_basis,
        circle_classes: model.circle_classes().to_vec(),
        components: rows,
        spin_data,
    };

    // identity row at (1 - iota*) of each standard basis vector must equal
    // the pairing of the vector with its reflected image
    let g = model.genus();
    let basis_snf = (!table.tau_basis.is_empty()).then(|| {
        crate::lattice::smith_normal_form(&IntegerMatrix::from_columns(&table.tau_basis, 2 * g))
    });
    let cup = crate::lattice::SymplecticLattice::new(g).cup_form();
    for i in 0..2 * g {
        let mut s = vec![Int::zero(); 2 * g];
        s[i] = Int::one();
        let image = model.iota_star().apply(&s);
        let moved: Vector = s.iter().zip(&image).map(|(a, b)| a - b).collect();
        let via_row = match &basis_snf {
            None => {
                if moved.iter().any(|x| !x.is_zero()) {
                    return Err(SwError::CoherenceFailure);
                }
                0
            }
            Some(snf) => {
                let coords = snf.solve(&moved).ok_or(SwError::CoherenceFailure)?;
                let mut acc = 0u8;
                for (c, r) in coords.iter().zip(&table.components[0].row) {
                    acc ^= (c.mod_floor(&Int::from(2)).to_u8().unwrap()) & r;
                }
                acc
            }
        };
        let negated: Vector = image.iter().map(|x| -x).collect();
        let via_pairing = pairing_mod2(&cup, &s, &negated);
        if via_row != via_pairing {
            return Err(SwError::CoherenceFailure);
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::klein::{enumerate_types, standard_model, TopologicalType};
    use crate::theta_form::enumerate_theta;

    fn tt(g: u32, n: u32, a: u8) -> TopologicalType {
        TopologicalType::new(g, n, a)
    }

    fn vec_i64(v: &[i64]) -> Vector {
        v.iter().map(|&x| Int::from(x)).collect()
    }

    #[test]
    fn component_group_examples() {
        let annulus = standard_model(tt(1, 2, 0)).unwrap();
        let comps = component_group(&picard_involution(&annulus)).unwrap();
        assert_eq!(comps.len(), 2);
        assert!(comps[0].is_identity());
        assert_eq!(comps[1].two_mu(), &vec_i64(&[1, 0])[..]); // mu = e/2

        let moebius = standard_model(tt(1, 1, 1)).unwrap();
        assert_eq!(
            component_group(&picard_involution(&moebius)).unwrap().len(),
            1
        );

        let genus2 = standard_model(tt(2, 3, 0)).unwrap();
        assert_eq!(
            component_group(&picard_involution(&genus2)).unwrap().len(),
            4
        );
    }

    #[test]
    fn component_count_is_two_to_n_minus_one() {
        for t in enumerate_types(8) {
            if !t.has_real_points() {
                continue;
            }
            let model = standard_model(t).unwrap();
            let comps = component_group(&picard_involution(&model)).unwrap();
            assert_eq!(comps.len(), 1usize << (t.circles - 1), "for {t}");
        }
    }

    #[test]
    fn w_class_worked_example() {
        let model = standard_model(tt(1, 2, 0)).unwrap();
        let tau = picard_involution(&model);
        let datum = alpha_from_theta(&QuadraticFormZ2::zero(1));
        let comps = component_group(&tau).unwrap();
        // basis of the fixed lattice is {f}
        assert_eq!(tau_fixed_basis(&tau), vec![vec_i64(&[0, 1])]);
        assert_eq!(w_class(&datum, &tau, &comps[0]).unwrap(), vec![0]);
        assert_eq!(w_class(&datum, &tau, &comps[1]).unwrap(), vec![1]);
    }

    #[test]
    fn w_class_is_representative_independent() {
        let model = standard_model(tt(1, 2, 0)).unwrap();
        let tau = picard_involution(&model);
        let datum = alpha_from_theta(&QuadraticFormZ2::zero(1));
        let comps = component_group(&tau).unwrap();
        // shift the doubled representative by (1 - tau) of a lattice vector
        let mut s = vec_i64(&[3, -2]);
        let image = tau.apply(&s);
        for (slot, e) in s.iter_mut().zip(&image) {
            *slot -= e;
        }
        let shifted: Vector = comps[1]
            .two_mu()
            .iter()
            .zip(&s)
            .map(|(a, b)| a + b)
            .collect();
        let alt = RealComponent::with_representative(shifted, &tau).unwrap();
        assert!(alt.same_component(&comps[1], &tau));
        assert_eq!(
            w_class(&datum, &tau, &alt).unwrap(),
            w_class(&datum, &tau, &comps[1]).unwrap()
        );
    }

    #[test]
    fn non_real_datum_is_rejected() {
        let model = standard_model(tt(1, 1, 1)).unwrap();
        let tau = picard_involution(&model);
        // q(e) = 0 is not fixed for the Moebius type
        let datum = alpha_from_theta(&QuadraticFormZ2::zero(1));
        let comp = RealComponent::identity(2);
        assert_eq!(
            w_class(&datum, &tau, &comp).unwrap_err(),
            SwError::NotRealDatum
        );
    }

    #[test]
    fn norm_value_examples() {
        let moebius = standard_model(tt(1, 1, 1)).unwrap();
        let tau = picard_involution(&moebius);
        let q = QuadraticFormZ2::from_bits(1, &[1, 0]).unwrap();
        let datum = alpha_from_theta(&q);
        // lambda = f: lambda + tau lambda = (-1, 2)
        let f = vec_i64(&[0, 1]);
        let mut sum = f.clone();
        for (slot, e) in sum.iter_mut().zip(tau.apply(&f)) {
            *slot += e;
        }
        assert_eq!(sum, vec_i64(&[-1, 2]));
        assert_eq!(norm_value(&datum, &tau, &f).unwrap(), 1);

        // fixed vectors pair trivially with themselves
        let annulus = standard_model(tt(1, 2, 0)).unwrap();
        let tau = picard_involution(&annulus);
        let datum = alpha_from_theta(&QuadraticFormZ2::zero(1));
        assert_eq!(norm_value(&datum, &tau, &vec_i64(&[0, 1])).unwrap(), 0);
        assert_eq!(norm_value(&datum, &tau, &vec_i64(&[1, 0])).unwrap(), 0);
    }

    #[test]
    fn sw_table_annulus_example() {
        let model = standard_model(tt(1, 2, 0)).unwrap();
        let table = sw_table(&model, &QuadraticFormZ2::zero(1)).unwrap();
        assert_eq!(table.components.len(), 2);
        assert_eq!(table.tau_basis, vec![vec_i64(&[0, 1])]);
        assert_eq!(table.components[0].row, vec![0]);
        assert_eq!(table.components[1].row, vec![1]);
        assert_eq!(table.components[0].circle_values, vec![0, 0]);
        assert_eq!(table.components[1].circle_values, vec![1, 1]);
        assert_eq!(table.spin_data, vec![1, 1]);
    }

    #[test]
    fn sw_table_moebius_example() {
        let model = standard_model(tt(1, 1, 1)).unwrap();
        let q = QuadraticFormZ2::from_bits(1, &[1, 0]).unwrap();
        let table = sw_table(&model, &q).unwrap();
        assert_eq!(table.components.len(), 1);
        assert_eq!(table.tau_basis, vec![vec_i64(&[1, -2])]);
        // (1, -2) reduces to e mod 2, and q(e) = 1
        assert_eq!(table.components[0].row, vec![1]);
    }

    #[test]
    fn sw_table_rejects_bad_inputs() {
        let model = standard_model(tt(1, 1, 1)).unwrap();
        let q = QuadraticFormZ2::zero(1);
        assert_eq!(sw_table(&model, &q).unwrap_err(), SwError::NotRealTheta);
    }

    #[test]
    fn genus_zero_table_is_trivial() {
        let model = standard_model(tt(0, 1, 0)).unwrap();
        let table = sw_table(&model, &QuadraticFormZ2::zero(0)).unwrap();
        assert_eq!(table.components.len(), 1);
        assert!(table.tau_basis.is_empty());
        assert_eq!(table.components[0].row, Vec::<u8>::new());
        assert_eq!(table.components[0].circle_values, vec![0]);
        assert_eq!(table.spin_data, vec![1]);
    }

    #[test]
    fn translation_shifts_rows_by_the_pairing() {
        for t in [tt(1, 2, 0), tt(2, 3, 0), tt(2, 1, 1)] {
            let model = standard_model(t).unwrap();
            let g = model.genus();
            let iota = model.iota_star().matrix();
            for mask in 0u32..1 << (2 * g) {
                let eta = Z2Vector::new(g, mask).unwrap();
                // eta must be invariant under the mod-2 involution
                let image_bits = (0..2 * g).fold(0u32, |acc, i| {
                    if (mask >> i) & 1 == 1 {
                        let col: Vec<Int> = (0..2 * g).map(|r| iota[(r, i)].clone()).collect();
                        acc ^ Z2Vector::from_lattice_vector(&col).bits()
                    } else {
                        acc
                    }
                });
                if image_bits != mask {
                    continue;
                }
                for q in enumerate_theta(g) {
                    if !is_real_theta(&q, &model) {
                        continue;
                    }
                    let base = sw_table(&model, &q).unwrap();
                    let shifted = sw_table(&model, &q.translate(&eta)).unwrap();
                    for (b_row, s_row) in base.components.iter().zip(&shifted.components) {
                        for (k, basis_vec) in base.tau_basis.iter().enumerate() {
                            let pair = Z2Vector::from_lattice_vector(basis_vec).pairing(&eta);
                            assert_eq!((b_row.row[k] + pair) % 2, s_row.row[k]);
                        }
                        for (k, c) in base.circle_classes.iter().enumerate() {
                            let pair = Z2Vector::from_lattice_vector(c).pairing(&eta);
                            assert_eq!((b_row.circle_values[k] + pair) % 2, s_row.circle_values[k]);
                        }
                    }
                    for (k, c) in base.circle_classes.iter().enumerate() {
                        let pair = Z2Vector::from_lattice_vector(c).pairing(&eta);
                        assert_eq!((base.spin_data[k] + pair) % 2, shifted.spin_data[k]);
                    }
                }
            }
        }
    }
}
