//! Cohomology of glued cover nerves.
//!
//! A non-Hausdorff manifold built by gluing Hausdorff pieces along open
//! regions is modeled here by the nerves of good covers of its pieces, tied
//! together by label bijections. From that model the crate computes Čech
//! cohomology, checks the generalized Mayer-Vietoris sequence at chain and
//! cohomology level, compares it with the total complex of the associated
//! bicomplex, classifies line bundles through H¹ over F₂, and checks that
//! everything is natural under refinement of covers.
//!
//! ```
//! use nhcech::{cech::cohomology_dims, diagram::canonicalize, gallery};
//!
//! let d = canonicalize(&gallery::two_origin_line()).unwrap();
//! assert_eq!(cohomology_dims(d.union(), 1, d.field()), vec![1, 1]);
//! ```

pub mod bundles;
pub mod cech;
pub mod complex;
pub mod diagram;
pub mod gallery;
pub mod linalg;
pub mod mv;
pub mod refinement;
