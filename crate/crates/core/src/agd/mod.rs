//! Moyal star product, transvectants and third-order operators.

pub mod laurent;
pub mod third;
pub mod transvectant;

pub use laurent::{moyal_term, star, star_series, HbarSeries, LaurentPoly2};
pub use transvectant::{
    lift, lift_constant, monomial_transvectant, second_lie, second_lie_operator, transvectant, MonomialDensity,
};

pub use third::{
    agd_field, project_to_sturm, third_diffeo_act, third_vect_act, Functional, ThirdOrderOp,
};
