//! Topological types of Klein surfaces and standard integer models of the
//! induced involution on first cohomology.
//!
//! A type `(g, n, a)` records the genus, the number of fixed circles of the
//! anti-holomorphic involution, and the orientability bit of the quotient
//! surface (`a = 0` orientable, `a = 1` not).  Valid triples satisfy
//! `1 <= n <= g + 1` with `g + 1 - n` even when `a = 0`, and `0 <= n <= g`
//! when `a = 1`.
//!
//! For each type with nonempty real locus we emit a normal form
//! `iota* = [[I, H], [0, -I]]` with `H` a symmetric 0/1 block of mod-2 rank
//! `g + 1 - n` (zero diagonal exactly when `a = 0`), together with a set of
//! circle classes in the `(-1)`-eigenlattice.  The normal form is not taken
//! on faith: every emitted model is checked against the involution axioms,
//! the component count `2^(n-1)` of the real Picard torus, and the
//! generation property of the circle classes.

use std::fmt;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::lattice::{
    self, eigenlattice, is_primitive, quotient_group, AntiSymplecticInvolution, Int, IntegerMatrix,
    SymplecticLattice, Vector,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("invalid type ({0}): condition 1 <= n <= g + 1 violated")]
    CircleCountBound(TopologicalType),
    #[error("invalid type ({0}): parity condition g + 1 - n = 0 (mod 2) violated")]
    ParityCondition(TopologicalType),
    #[error("invalid type ({0}): condition n <= g violated")]
    NonOrientableBound(TopologicalType),
    #[error("type ({0}) has empty real locus; fixed-point data is undefined")]
    EmptyRealLocus(TopologicalType),
    #[error("circle-class search exhausted for type ({0}) with coefficient bound {1}")]
    SearchExhausted(TopologicalType, i64),
    #[error("emitted model for ({0}) failed validation: {1}")]
    ModelInvariant(TopologicalType, String),
    #[error(transparent)]
    Lattice(#[from] lattice::LatticeError),
}

/// Topological type `(g, n, a)` of a Klein surface.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TopologicalType {
    pub genus: u32,
    pub circles: u32,
    /// 0 when the quotient surface is orientable, 1 otherwise.
    pub quotient_nonorientable: u8,
}

impl TopologicalType {
    pub fn new(genus: u32, circles: u32, quotient_nonorientable: u8) -> Self {
        assert!(
            quotient_nonorientable <= 1,
            "orientability bit must be 0 or 1"
        );
        TopologicalType {
            genus,
            circles,
            quotient_nonorientable,
        }
    }

    /// Named violation of the type constraints, if any.
    pub fn check(&self) -> Result<(), ModelError> {
        let (g, n) = (self.genus, self.circles);
        if self.quotient_nonorientable == 0 {
            if n < 1 || n > g + 1 {
                return Err(ModelError::CircleCountBound(*self));
            }
            if (g + 1 - n) % 2 != 0 {
                return Err(ModelError::ParityCondition(*self));
            }
        } else if n > g {
            return Err(ModelError::NonOrientableBound(*self));
        }
        Ok(())
    }

    pub fn is_valid(&self) -> bool {
        self.check().is_ok()
    }

    pub fn has_real_points(&self) -> bool {
        self.circles > 0
    }
}

impl fmt::Display for TopologicalType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{},{},{}",
            self.genus, self.circles, self.quotient_nonorientable
        )
    }
}

/// True iff `(g, n, a)` is the type of some Klein surface.
pub fn validate_type(genus: u32, circles: u32, quotient_nonorientable: u8) -> bool {
    quotient_nonorientable <= 1
        && TopologicalType::new(genus, circles, quotient_nonorientable).is_valid()
}

/// All valid types with `g <= g_max`, sorted by `(g, a, n)`.
pub fn enumerate_types(g_max: u32) -> Vec<TopologicalType> {
    let mut out = Vec::new();
    for g in 0..=g_max {
        for a in 0..=1u8 {
            for n in 0..=g + 1 {
                let t = TopologicalType::new(g, n, a);
                if t.is_valid() {
                    out.push(t);
                }
            }
        }
    }
    out
}

/// A topological type together with an explicit integral model of the
/// involution on the rank-`2g` cohomology lattice and representatives of the
/// fixed circles' Poincare-dual classes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealCurveModel {
    topological_type: TopologicalType,
    h_block: IntegerMatrix,
    iota_star: AntiSymplecticInvolution,
    circle_classes: Vec<Vector>,
}

impl RealCurveModel {
    /// Assembles a model and checks the structural invariants: involution
    /// axioms, `rank_2(H) = g + 1 - n`, circle count, membership of every
    /// circle class in the `(-1)`-eigenlattice, and vanishing pairwise cup
    /// products.  Primitivity and the generation property are checked by
    /// [`standard_model`], not here, so that degenerate circle choices can
    /// still be probed with [`circle_generation_check`].
    pub fn new(
        topological_type: TopologicalType,
        h_block: IntegerMatrix,
        circle_classes: Vec<Vector>,
    ) -> Result<Self, ModelError> {
        topological_type.check()?;
        let g = topological_type.genus as usize;
        let n = topological_type.circles as usize;
        let fail = |msg: &str| ModelError::ModelInvariant(topological_type, msg.to_string());

        if h_block.rows() != g || h_block.cols() != g {
            return Err(fail("H block has wrong dimensions"));
        }
        if !h_block.is_symmetric() {
            return Err(fail("H block is not symmetric"));
        }
        let two = Int::from(2);
        for i in 0..g {
            for j in 0..g {
                let e = &h_block[(i, j)];
                if e.is_negative() || e >= &two {
                    return Err(fail("H block entries must be 0 or 1"));
                }
            }
        }
        if lattice::rank_mod2(&h_block) != (g + 1).saturating_sub(n) {
            return Err(fail("mod-2 rank of H does not equal g + 1 - n"));
        }

        let iota_star = AntiSymplecticInvolution::new(assemble_involution(&h_block))?;

        if circle_classes.len() != n {
            return Err(fail("number of circle classes differs from n"));
        }
        let lat = SymplecticLattice::new(g);
        for c in &circle_classes {
            if c.len() != 2 * g {
                return Err(fail("circle class has wrong length"));
            }
            let image = iota_star.apply(c);
            let negated: Vector = c.iter().map(|x| -x).collect();
            if image != negated {
                return Err(fail("circle class is not anti-invariant"));
            }
        }
        for (i, a) in circle_classes.iter().enumerate() {
            for b in circle_classes.iter().skip(i + 1) {
                if !lat.pairing(a, b).is_zero() {
                    return Err(fail("circle classes have nonzero cup product"));
                }
            }
        }

        Ok(RealCurveModel {
            topological_type,
            h_block,
            iota_star,
            circle_classes,
        })
    }

    pub fn topological_type(&self) -> TopologicalType {
        self.topological_type
    }

    pub fn genus(&self) -> usize {
        self.topological_type.genus as usize
    }

    pub fn circle_count(&self) -> usize {
        self.topological_type.circles as usize
    }

    pub fn h_block(&self) -> &IntegerMatrix {
        &self.h_block
    }

    pub fn iota_star(&self) -> &AntiSymplecticInvolution {
        &self.iota_star
    }

    pub fn circle_classes(&self) -> &[Vector] {
        &self.circle_classes
    }
}

fn assemble_involution(h_block: &IntegerMatrix) -> IntegerMatrix {
    let g = h_block.rows();
    let mut t = IntegerMatrix::zeros(2 * g, 2 * g);
    for i in 0..g {
        t[(i, i)] = Int::one();
        t[(g + i, g + i)] = -Int::one();
        for j in 0..g {
            t[(i, g + j)] = h_block[(i, j)].clone();
        }
    }
    t
}

fn standard_h_block(tt: TopologicalType) -> IntegerMatrix {
    let g = tt.genus as usize;
    let r = (tt.genus + 1 - tt.circles) as usize;
    let mut h = IntegerMatrix::zeros(g, g);
    if tt.quotient_nonorientable == 1 {
        for i in 0..r {
            h[(i, i)] = Int::one();
        }
    } else {
        // even type: r is even, H is a sum of hyperbolic 0/1 blocks
        for k in 0..r / 2 {
            h[(2 * k, 2 * k + 1)] = Int::one();
            h[(2 * k + 1, 2 * k)] = Int::one();
        }
    }
    h
}

/// Default coefficient bound for the circle-class search.
pub const DEFAULT_SEARCH_BOUND: i64 = 2;

/// Standard model for a type with nonempty real locus.
pub fn standard_model(tt: TopologicalType) -> Result<RealCurveModel, ModelError> {
    standard_model_with_search_bound(tt, DEFAULT_SEARCH_BOUND)
}

/// As [`standard_model`], with an explicit coefficient bound for the
/// circle-class search.
pub fn standard_model_with_search_bound(
    tt: TopologicalType,
    bound: i64,
) -> Result<RealCurveModel, ModelError> {
    tt.check()?;
    if tt.circles == 0 {
        return Err(ModelError::EmptyRealLocus(tt));
    }
    let h = standard_h_block(tt);
    let iota = AntiSymplecticInvolution::new(assemble_involution(&h))?;
    let circles = find_circle_classes(&iota, tt, bound)?;
    let model = RealCurveModel::new(tt, h, circles)?;

    let g = model.genus();
    if g > 0 {
        for c in model.circle_classes() {
            if !is_primitive(c) {
                return Err(ModelError::ModelInvariant(
                    tt,
                    "searched circle class is not primitive".into(),
                ));
            }
        }
    }
    if !circle_generation_check(&model) {
        return Err(ModelError::ModelInvariant(
            tt,
            "circle classes do not generate the anti-invariant lattice".into(),
        ));
    }
    Ok(model)
}

/// Deterministic greedy search for circle classes.
///
/// Candidates are tried in a fixed order: ambient standard basis vectors
/// lying in the `(-1)`-eigenlattice first, then integer combinations of the
/// eigenlattice basis graded by L1 norm of the coefficient vector, with
/// coefficients bounded by `bound`.  For the final class the closure vector
/// `-(sum of the chosen ones)` is tried first, so that the chosen classes
/// sum to zero whenever that vector is admissible.
fn find_circle_classes(
    iota: &AntiSymplecticInvolution,
    tt: TopologicalType,
    bound: i64,
) -> Result<Vec<Vector>, ModelError> {
    let g = tt.genus as usize;
    let n = tt.circles as usize;
    if g == 0 {
        // rank-zero lattice: the unique class is the empty vector
        return Ok(vec![Vector::new(); n]);
    }
    let lat = SymplecticLattice::new(g);
    let basis = eigenlattice(iota, -1);

    let mut std_candidates = Vec::new();
    for idx in 0..2 * g {
        let mut s = vec![Int::zero(); 2 * g];
        s[idx] = Int::one();
        let image = iota.apply(&s);
        let negated: Vector = s.iter().map(|x| -x).collect();
        if image == negated {
            std_candidates.push(s);
        }
    }

    let acceptable = |v: &Vector, chosen: &[Vector]| {
        is_primitive(v) && !chosen.contains(v) && chosen.iter().all(|c| lat.pairing(v, c).is_zero())
    };

    let mut chosen: Vec<Vector> = Vec::with_capacity(n);
    while chosen.len() < n {
        if chosen.len() == n - 1 && !chosen.is_empty() {
            let mut closure = vec![Int::zero(); 2 * g];
            for c in &chosen {
                for (slot, e) in closure.iter_mut().zip(c) {
                    *slot -= e;
                }
            }
            if acceptable(&closure, &chosen) {
                chosen.push(closure);
                continue;
            }
        }
        let mut found = std_candidates
            .iter()
            .find(|s| acceptable(s, &chosen))
            .cloned();
        if found.is_none() {
            'levels: for l1 in 1..=bound * basis.len() as i64 {
                for coeffs in CoefficientBox::new(basis.len(), bound) {
                    if coeffs.iter().map(|c| c.abs()).sum::<i64>() != l1 {
                        continue;
                    }
                    let mut v = vec![Int::zero(); 2 * g];
                    for (c, b) in coeffs.iter().zip(&basis) {
                        for (slot, e) in v.iter_mut().zip(b) {
                            *slot += e * Int::from(*c);
                        }
                    }
                    if acceptable(&v, &chosen) {
                        found = Some(v);
                        break 'levels;
                    }
                }
            }
        }
        match found {
            Some(v) => chosen.push(v),
            None => return Err(ModelError::SearchExhausted(tt, bound)),
        }
    }
    Ok(chosen)
}

/// Odometer over coefficient vectors in `[-bound, bound]^len`, first
/// coordinate varying fastest, each digit running through
/// `0, 1, -1, 2, -2, ...`.
struct CoefficientBox {
    digits: Vec<usize>,
    order: Vec<i64>,
    done: bool,
}

impl CoefficientBox {
    fn new(len: usize, bound: i64) -> Self {
        let mut order = vec![0i64];
        for b in 1..=bound {
            order.push(b);
            order.push(-b);
        }
        CoefficientBox {
            digits: vec![0; len],
            order,
            done: len == 0,
        }
    }
}

impl Iterator for CoefficientBox {
    type Item = Vec<i64>;

    fn next(&mut self) -> Option<Vec<i64>> {
        if self.done {
            return None;
        }
        let current: Vec<i64> = self.digits.iter().map(|&d| self.order[d]).collect();
        let mut pos = 0;
        loop {
            if pos == self.digits.len() {
                self.done = true;
                break;
            }
            self.digits[pos] += 1;
            if self.digits[pos] < self.order.len() {
                break;
            }
            self.digits[pos] = 0;
            pos += 1;
        }
        Some(current)
    }
}

/// True iff the circle classes together with `(1 - iota*)` of the full
/// lattice generate the whole `(-1)`-eigenlattice of `iota*`.
pub fn circle_generation_check(model: &RealCurveModel) -> bool {
    let g = model.genus();
    let basis = eigenlattice(model.iota_star(), -1);
    if basis.is_empty() {
        return true;
    }
    let basis_matrix = IntegerMatrix::from_columns(&basis, 2 * g);
    let mut gens_in_coords = Vec::new();
    for c in model.circle_classes() {
        match lattice::solve(&basis_matrix, c) {
            Some(coords) => gens_in_coords.push(coords),
            None => return false,
        }
    }
    for idx in 0..2 * g {
        let mut s = vec![Int::zero(); 2 * g];
        s[idx] = Int::one();
        let image = model.iota_star().apply(&s);
        let moved: Vector = s.iter().zip(&image).map(|(a, b)| a - b).collect();
        match lattice::solve(&basis_matrix, &moved) {
            Some(coords) => gens_in_coords.push(coords),
            // (1 - iota*) always lands in the eigenlattice
            None => unreachable!("(1 - iota*) image escaped the eigenlattice"),
        }
    }
    match quotient_group(&gens_in_coords, basis.len()) {
        Ok(q) => q.is_trivial(),
        Err(_) => false,
    }
}

/// The induced involution on the Picard lattice: the negation of `iota*`.
///
/// Its `(+1)`-eigenlattice is exactly the `(-1)`-eigenlattice of `iota*`.
pub fn picard_involution(model: &RealCurveModel) -> AntiSymplecticInvolution {
    model.iota_star().negated()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(g: u32, n: u32, a: u8) -> TopologicalType {
        TopologicalType::new(g, n, a)
    }

    fn vec_i64(v: &[i64]) -> Vector {
        v.iter().map(|&x| Int::from(x)).collect()
    }

    #[test]
    fn validate_known_types() {
        assert!(validate_type(0, 1, 0));
        assert!(validate_type(4, 3, 0));
        assert!(validate_type(1, 0, 1));
        assert!(!validate_type(3, 1, 0)); // g + 1 - n = 3 is odd
        assert!(!validate_type(2, 3, 1)); // n <= g violated
    }

    #[test]
    fn named_violations() {
        assert!(matches!(
            t(3, 1, 0).check(),
            Err(ModelError::ParityCondition(_))
        ));
        assert!(matches!(
            t(2, 3, 1).check(),
            Err(ModelError::NonOrientableBound(_))
        ));
        assert!(matches!(
            t(2, 0, 0).check(),
            Err(ModelError::CircleCountBound(_))
        ));
    }

    #[test]
    fn enumerate_small_genus() {
        assert_eq!(enumerate_types(0), vec![t(0, 1, 0), t(0, 0, 1)]);
        assert_eq!(
            enumerate_types(1),
            vec![t(0, 1, 0), t(0, 0, 1), t(1, 2, 0), t(1, 0, 1), t(1, 1, 1)]
        );
        let genus_two: Vec<_> = enumerate_types(2)
            .into_iter()
            .filter(|tt| tt.genus == 2)
            .collect();
        assert_eq!(
            genus_two,
            vec![t(2, 1, 0), t(2, 3, 0), t(2, 0, 1), t(2, 1, 1), t(2, 2, 1)]
        );
    }

    #[test]
    fn enumeration_is_closed_under_validation() {
        let emitted = enumerate_types(5);
        for tt in &emitted {
            assert!(tt.is_valid());
        }
        for g in 0..=5u32 {
            for n in 0..=g + 2 {
                for a in 0..=1u8 {
                    let tt = t(g, n, a);
                    assert_eq!(emitted.contains(&tt), tt.is_valid(), "triple {tt}");
                }
            }
        }
    }

    #[test]
    fn standard_model_examples() {
        let m = standard_model(t(1, 2, 0)).unwrap();
        assert!(m.h_block().is_zero());
        assert_eq!(
            m.iota_star().matrix(),
            &IntegerMatrix::from_i64_rows(&[&[1, 0], &[0, -1]])
        );
        assert_eq!(m.circle_classes(), &[vec_i64(&[0, 1]), vec_i64(&[0, -1])]);

        let m = standard_model(t(1, 1, 1)).unwrap();
        assert_eq!(m.h_block(), &IntegerMatrix::from_i64_rows(&[&[1]]));
        assert_eq!(
            m.iota_star().matrix(),
            &IntegerMatrix::from_i64_rows(&[&[1, 1], &[0, -1]])
        );

        let m = standard_model(t(2, 1, 0)).unwrap();
        assert_eq!(
            m.h_block(),
            &IntegerMatrix::from_i64_rows(&[&[0, 1], &[1, 0]])
        );
    }

    #[test]
    fn standard_model_rejects_empty_real_locus() {
        assert!(matches!(
            standard_model(t(1, 0, 1)),
            Err(ModelError::EmptyRealLocus(_))
        ));
    }

    #[test]
    fn closure_vector_for_maximal_circle_count() {
        let m = standard_model(t(3, 4, 0)).unwrap();
        let classes = m.circle_classes();
        assert_eq!(classes.len(), 4);
        let mut total = vec![Int::zero(); 6];
        for c in classes {
            for (slot, e) in total.iter_mut().zip(c) {
                *slot += e;
            }
        }
        assert!(total.iter().all(Zero::is_zero));
    }

    #[test]
    fn generation_check_on_standard_models() {
        for tt in enumerate_types(4) {
            if !tt.has_real_points() {
                continue;
            }
            let m = standard_model(tt).unwrap();
            assert!(circle_generation_check(&m), "generation fails for {tt}");
        }
    }

    #[test]
    fn generation_check_fails_for_doubled_circles() {
        // classes inside 2 * lattice cannot generate odd vectors
        let m = standard_model(t(1, 2, 0)).unwrap();
        let doubled = RealCurveModel::new(
            m.topological_type(),
            m.h_block().clone(),
            vec![vec_i64(&[0, 2]), vec_i64(&[0, -2])],
        )
        .unwrap();
        assert!(!circle_generation_check(&doubled));
    }

    #[test]
    fn picard_involution_swaps_eigenlattices() {
        let m = standard_model(t(1, 2, 0)).unwrap();
        let tau = picard_involution(&m);
        assert_eq!(
            tau.matrix(),
            &IntegerMatrix::from_i64_rows(&[&[-1, 0], &[0, 1]])
        );
        assert_eq!(eigenlattice(&tau, 1), eigenlattice(m.iota_star(), -1));
        assert_eq!(eigenlattice(&tau, 1), vec![vec_i64(&[0, 1])]);
    }

    #[test]
    fn genus_zero_model_is_trivial() {
        let m = standard_model(t(0, 1, 0)).unwrap();
        assert_eq!(m.genus(), 0);
        assert_eq!(m.circle_classes(), &[Vector::new()]);
        assert!(circle_generation_check(&m));
    }

    #[test]
    fn component_counts_match_circle_number() {
        for tt in enumerate_types(6) {
            if !tt.has_real_points() {
                continue;
            }
            let m = standard_model(tt).unwrap();
            let tau = picard_involution(&m);
            let minus = eigenlattice(&tau, -1);
            if minus.is_empty() {
                assert_eq!(tt.circles, 1, "rank-zero anti-invariants for {tt}");
                continue;
            }
            let basis_matrix = IntegerMatrix::from_columns(&minus, 2 * m.genus());
            let mut gens = Vec::new();
            for idx in 0..2 * m.genus() {
                let mut s = vec![Int::zero(); 2 * m.genus()];
                s[idx] = Int::one();
                let image = tau.apply(&s);
                let moved: Vector = s.iter().zip(&image).map(|(a, b)| a - b).collect();
                gens.push(lattice::solve(&basis_matrix, &moved).unwrap());
            }
            let q = quotient_group(&gens, minus.len()).unwrap();
            assert_eq!(
                q.order,
                Int::from(1u64 << (tt.circles - 1)),
                "component count for {tt}"
            );
        }
    }
}
