//! Exact integer and cyclotomic arithmetic.

pub mod chebyshev;
pub mod cyclotomic;
pub mod det;
pub mod poly;

pub use chebyshev::psi_univariate;
pub use cyclotomic::{
    cyclotomic_poly, descend_to_integers, embed_two_cos, product_of_linear_factors,
    product_of_sparse_linear_factors, CycElem, CycPoly, CyclicPoly, CyclotomicRing, SparseCyc,
};
pub use det::{bareiss_det, division_free_det, poly_matrix_det, RingElem};
pub use poly::IntPoly;

/// `p(q)`
pub fn poly_compose(p: &IntPoly, q: &IntPoly) -> IntPoly {
    p.compose(q)
}
