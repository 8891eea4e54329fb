//! Exact enumeration of the classical scheme: entropies, distances, and the
//! collision and indistinguishability bounds.

mod checks;
mod dist;
mod families;

pub use checks::{
    check_classical_pair, check_indistinguishability, check_sizing, check_theorem1, ciphertext_distribution,
    sizing_instances, IndistReport, SizingInstance, Theorem1Report, DISTANCE_TOL, THEOREM1_TOL,
};
pub use dist::{
    collision_entropy, collision_probability, distance_to_uniform, min_entropy, statistical_distance, Distribution,
};
pub use families::Family;
