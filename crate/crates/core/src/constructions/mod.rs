//! Explicit matrices, factorizations, correlations and certificates.

mod clifford;
mod correlation;
mod mk;
mod quantum;

pub use clifford::{clifford_irreducible, clifford_phi, pauli_x, pauli_y, pauli_z};
pub use correlation::{
    b_hat, binomial, build_c1, build_c2, elliptope_extreme_example, elliptope_extreme_vectors,
    pairs,
};
pub use mk::{
    build_mk, complex_hadamard, cp_factorization_mk, hadamard_factorization_mk, real_hadamard,
    real_hadamard_int,
};
pub use quantum::{
    binarize, csplus_from_rep, entanglement_deviation, main_theorem_matrix, maximally_entangled,
    quantum_correlation_from_rep, tensor_op_rep, MAX_MAIN_THEOREM_K,
};
