//! Free resolutions of monomial ideals built from Gröbner-basis data.
//!
//! The crate constructs the Taylor complex of a finite monomial set, cuts it
//! down to the Lyubeznik (or reverse Lyubeznik) subcomplex, and provides the
//! contracting homotopies, splitting homotopies and deformation retracts that
//! certify these complexes are resolutions. All arithmetic is exact.
//!
//! ```
//! use monores::{build_taylor, lyubeznik_filter, extract_subcomplex, Direction, VarContext};
//! use monores::io::parse_ideal;
//!
//! let input = parse_ideal("vars: x, y, z\nx*y, x*z, y*z").unwrap();
//! let taylor = build_taylor(&input.context, &input.monomials, 12).unwrap();
//! let report = lyubeznik_filter(&taylor, Direction::Forward);
//! let lyubeznik = extract_subcomplex(&taylor, &report).unwrap();
//! assert_eq!(lyubeznik.ranks_trimmed(), vec![1, 3, 2]);
//! ```

pub mod algebra;
pub mod division;
pub mod error;
pub mod homotopy;
pub mod io;
pub mod orders;
pub mod reduction;
pub mod selftest;
pub mod taylor;
pub mod verify;

pub use algebra::{
    divides, label_lcm, lcm_of, scalar, IndexSeq, ModuleElement, ModuleTerm, Monomial, Polynomial,
    Scalar, VarContext,
};
pub use division::{
    divide, is_groebner, normal_form, s_pair, Divider, DivisionResult, SPair, SPolyNormalization,
};
pub use error::{Error, Result};
pub use orders::{
    leading_term, seq_compare, BaseKind, BaseOrder, Direction, SchreyerOrder, TaylorOrder,
    TermOrder,
};
pub use reduction::{
    chain_criterion_eliminate, chain_route, extract_subcomplex, lyubeznik_filter,
    restrict_to_labels, schreyer_syzygy, ChainMode, EliminationReport, SchreyerSyzygy,
};
pub use taylor::{build_taylor, ComplexKind, FreeComplex, LabelOrder, DEFAULT_CAP};
pub use verify::{
    betti_numbers, check_d_squared, check_exactness, strand, StrandMatrix, VerificationReport,
};
