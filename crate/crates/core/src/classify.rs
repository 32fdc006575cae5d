//! Complete / nearly complete classification on the five-punctured sphere.

use std::fmt;

use crate::measures::{
    cone_dim, is_recurrent, is_transversely_recurrent, subtrack_cone, subtrack_recurrence,
    RecurrenceReport, TransverseReport,
};
use crate::subtrack::{enumerate_subtracks, subtrack_filling, SubtrackError};
use crate::track::{region_census, RegionCensus, Surface, TrainTrack};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TrackClass {
    Complete,
    NearlyComplete,
    Other,
}

impl fmt::Display for TrackClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TrackClass::Complete => "COMPLETE",
            TrackClass::NearlyComplete => "NEARLY_COMPLETE",
            TrackClass::Other => "OTHER",
        })
    }
}

impl std::str::FromStr for TrackClass {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "COMPLETE" => Ok(TrackClass::Complete),
            "NEARLY_COMPLETE" => Ok(TrackClass::NearlyComplete),
            "OTHER" => Ok(TrackClass::Other),
            _ => Err(format!("unknown class {s}")),
        }
    }
}

/// Classification with everything it was decided from.
#[derive(Clone, Debug)]
pub struct Classification {
    pub class: TrackClass,
    pub census: RegionCensus,
    pub recurrence: RecurrenceReport,
    pub transverse: TransverseReport,
    pub cone_dim: Option<usize>,
}

impl Classification {
    pub fn birecurrent(&self) -> bool {
        self.recurrence.recurrent && self.transverse.transversely_recurrent
    }
}

/// Complete: census of five once-punctured monogons and a triangle, and
/// birecurrent. Nearly complete: four once-punctured monogons and a
/// once-punctured bigon, birecurrent, cone dimension 3. The census stands in
/// for carrying an ending lamination.
pub fn classify_track(t: &TrainTrack) -> Classification {
    let census = region_census(t);
    let recurrence = is_recurrent(t);
    let transverse = is_transversely_recurrent(t);
    let cone_dim = cone_dim(t).ok();
    let birecurrent = recurrence.recurrent && transverse.transversely_recurrent;
    let on_target = t.surface() == Surface::S05;
    let class = if on_target && birecurrent && census.is_complete_pattern() {
        TrackClass::Complete
    } else if on_target
        && birecurrent
        && census.is_nearly_complete_pattern()
        && cone_dim == Some(3)
    {
        TrackClass::NearlyComplete
    } else {
        TrackClass::Other
    };
    Classification {
        class,
        census,
        recurrence,
        transverse,
        cone_dim,
    }
}

/// Outcome of the subtrack-filling checks behind the key lemma.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LemmaReport {
    /// Subtracks examined.
    pub checked: usize,
    /// Erased branches of examined subtracks that fill.
    pub filling: Vec<Vec<usize>>,
    /// Recurrent subtracks erasing at least two branches, whatever their
    /// cone dimension.
    pub two_erased_checked: usize,
    /// Those among them that fill, with their cone dimension.
    pub two_erased_filling: Vec<(Vec<usize>, usize)>,
}

impl LemmaReport {
    pub fn holds(&self) -> bool {
        self.filling.is_empty()
    }
}

/// Every proper subtrack of a nearly complete track must be non-filling.
pub fn check_nearly_complete_subtracks(t: &TrainTrack) -> Result<LemmaReport, SubtrackError> {
    let mut r = LemmaReport::default();
    for s in enumerate_subtracks(t) {
        r.checked += 1;
        if subtrack_filling(t, &s)?.0 {
            r.filling.push(s.removed());
        }
    }
    Ok(r)
}

/// Recurrent subtracks of a complete track carrying the 1-skeleton of the
/// boundary (cone dimension at most 2) must be non-filling. Recurrent
/// subtracks erasing two or more branches are tallied separately: erasing a
/// loop also erases the tail feeding it, so such a subtrack can still span a
/// facet.
pub fn check_complete_skeleton(t: &TrainTrack) -> Result<LemmaReport, SubtrackError> {
    let mut r = LemmaReport::default();
    for s in enumerate_subtracks(t) {
        if !subtrack_recurrence(t, &s).recurrent {
            continue;
        }
        let dim = subtrack_cone(t, &s).map(|c| c.dim()).unwrap_or(0);
        let fills = subtrack_filling(t, &s)?.0;
        if dim <= 2 {
            r.checked += 1;
            if fills {
                r.filling.push(s.removed());
            }
        }
        if s.removed().len() >= 2 {
            r.two_erased_checked += 1;
            if fills {
                r.two_erased_filling.push((s.removed(), dim));
            }
        }
    }
    Ok(r)
}
