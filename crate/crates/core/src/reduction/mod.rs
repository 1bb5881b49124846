//! Feature extraction baselines: PCA through the SVD of the centred data and
//! genetic-programming feature generation.

mod gp;
mod pca;

pub use gp::{
    gp_eval, gp_generate_features, gp_point_mutation, gp_ramped_half_and_half, gp_random_tree,
    gp_subtree_crossover, swap_subtrees, BinaryOp, ExprTree, GpConfig, UnaryOp,
};
pub use pca::PcaModel;
