//! The line with two origins `L = R ⊔ {0̃}`: points, minimal atlases,
//! diffeomorphisms between the structures of special minimal atlases, and
//! the classification of the structures defined by `w_a`.

mod atlas;
mod diffeo;
mod structure;

pub use atlas::{
    hausdorff_closure, is_orientable, special_transition, transition_extension, ChartDomain, ChartL, MinimalAtlas,
    PointL, SpecialMinimalAtlas,
};
pub use diffeo::{build_diffeo, compose_diffeo, flip, phi_ex, phi_fix, psi, DiffeoJson, DiffeoL, OriginAction};
pub use structure::{
    diffeo_classes, same_structure, ClassesJson, DiffeoClasses, SpecialAtlasSpec, StructureAnswer, StructureSpec,
    Verdict, Witness, WitnessJson,
};

/// 100 points of `R ∖ 0` used for pointwise comparisons: 50 per side,
/// geometrically spaced from `1e-6` to `10`.
pub(crate) fn sample_points() -> Vec<f64> {
    let n = 50;
    (0..n)
        .map(|i| 1e-6 * 1e7f64.powf(i as f64 / (n - 1) as f64))
        .flat_map(|t| [-t, t])
        .collect()
}
