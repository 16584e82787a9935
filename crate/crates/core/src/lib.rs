//! Quasi-isometric embedding of the rescaled hyperbolic space `H_p^{n+1}`
//! into a finite product of metric trees built from colored cube patterns.
//!
//! Exact arithmetic (`BigRational`, checked `i128`) is used for every
//! combinatorial decision; floating point only for hyperbolic distances.

pub mod boxes;
pub mod cubes;
pub mod embedding;
pub mod error;
pub mod hyperbolic;
mod lattice;
pub mod params;
pub mod tree;
pub mod verifier;

pub use boxes::{boundary_margin, box_gap_sq, RationalBox};
pub use cubes::{
    locate, nearest_in_level, realize, separation_check, separation_verdict, verify_covering_level0,
    verify_covering_level0_with, CoveringReport, CubeId, ParseCubeIdError, SeparationCheck, SeparationKind,
    SeparationVerdict, SeparationWitness,
};
pub use embedding::{
    color_distances, embed, embed_color, embed_color_with, embed_with, product_distance,
    EmbeddedPoint, LevelRule, Norm,
};
pub use error::{Error, Result};
pub use hyperbolic::{horo_distance, hyp_distance, project, HoroPoint};
pub use params::{validate_params, Params, ParamsSpec};
pub use tree::{
    ancestor_chain, brute_force_edges, export_subtree, meet, parent, tree_distance, AncestorChain,
    EdgeSet, Meet, SubtreeFormat, Window,
};
pub use verifier::{
    count_violations, evaluate_pairs, fit_qi_constants, run_pipeline, sample_pairs,
    stability_probe, vertical_bound_check, DistortionReport, EvalOptions, Fit, Region, Sample,
    SamplePlan, Strategy, TrendReport,
};
