//! Train tracks on punctured spheres: measures, splittings and partitions
//! of measure cones, with exact rational arithmetic throughout.

pub mod classify;
pub mod cone;
pub mod linalg;
pub mod lp;
pub mod measures;
pub mod oracle;
pub mod partition;
pub mod sample;
pub mod split;
pub mod standard;
pub mod subtrack;
pub mod track;

pub use cone::Cone;
pub use linalg::{IntMatrix, Q};
pub use track::{
    canonical_form, classify_branches, region_census, validate_track, BranchEnd, BranchKind,
    CanonicalForm, RegionCensus, Slot, Surface, TrackError, TrainTrack, ValidationReport,
};
