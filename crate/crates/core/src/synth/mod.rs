//! Deterministic test harness: synthetic scenes, perturbed ensembles, a toy
//! block matcher and reference implementations.

mod block_match;
mod oracle;
mod scene;

pub use block_match::{block_match, shifted_pair, stripe_pair, texture_image};
pub use oracle::brute_force_dbscan;
pub use scene::{
    gen_scene, perturb_ensemble, render_modes, PerturbSpec, PerturbedEnsemble, Scene, SceneSpec, MU_MARGIN,
    SPURIOUS_MASS,
};
