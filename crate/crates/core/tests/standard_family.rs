mod common;

use std::collections::BTreeSet;

use tracklab_core::classify::{classify_track, TrackClass};
use tracklab_core::partition::{generate_partition_sequence, verify_partition_properties, Caps, Property};
use tracklab_core::standard::{
    build_standard_family, gadget_track, load_standard_family, parse_family, standard_partition,
    write_family, write_manifest, FamilyError, StandardTrackFamily, SHIPPED_FAMILY, SHIPPED_MANIFEST,
};
use tracklab_core::track::RegionLabel;
use tracklab_core::{canonical_form, region_census};

#[test]
fn shipped_family_loads_with_expected_census() {
    let f = common::family();
    assert_eq!(f.complete.len(), 26);
    assert_eq!(f.nearly.len(), 6);
    for m in &f.complete {
        let c = region_census(&m.track);
        assert_eq!(c.count(RegionLabel::PuncturedMonogon), 5, "{}", m.label);
        assert_eq!(c.count(RegionLabel::Triangle), 1, "{}", m.label);
        assert_eq!(c.regions.len(), 6);
        assert_eq!((m.track.branch_count(), m.track.switch_count()), (12, 8));
    }
    for m in &f.nearly {
        let c = region_census(&m.track);
        assert_eq!(c.count(RegionLabel::PuncturedMonogon), 4, "{}", m.label);
        assert_eq!(c.count(RegionLabel::PuncturedBigon), 1, "{}", m.label);
        assert_eq!(c.regions.len(), 5);
        assert_eq!((m.track.branch_count(), m.track.switch_count()), (9, 6));
    }
}

#[test]
fn builder_reproduces_the_shipped_files() {
    let f = build_standard_family();
    assert_eq!(write_family(&f), SHIPPED_FAMILY);
    assert_eq!(write_manifest(&f), SHIPPED_MANIFEST);
}

fn text_with_member_track_replaced(label: &str, replacement: &str) -> String {
    // Swap the track block following `member <label> ` for another block.
    let mut out = String::new();
    let mut skipping = false;
    for line in SHIPPED_FAMILY.lines() {
        if skipping {
            if line == "end" {
                skipping = false;
                out.push_str(replacement);
            }
            continue;
        }
        out.push_str(line);
        out.push('\n');
        if line.starts_with(&format!("member {label} ")) {
            skipping = true;
        }
    }
    out
}

fn track_block(f: &StandardTrackFamily, label: &str) -> String {
    let t = f
        .complete
        .iter()
        .map(|m| (&m.label, &m.track))
        .chain(f.nearly.iter().map(|m| (&m.label, &m.track)))
        .find(|(l, _)| l.as_str() == label)
        .unwrap()
        .1;
    tracklab_core::track::write_track(t)
}

#[test]
fn member_missing_branches_is_rejected() {
    let f = common::family();
    let text = text_with_member_track_replaced("T3", &track_block(&f, "S0"));
    match load_standard_family(&text, None) {
        Err(FamilyError::Member { label, message }) => {
            assert_eq!(label, "T3");
            assert!(message.contains("declared COMPLETE"), "{message}");
        }
        other => panic!("expected a classification mismatch, got {other:?}"),
    }
}

#[test]
fn duplicate_member_is_rejected() {
    let f = common::family();
    let text = text_with_member_track_replaced("T3", &track_block(&f, "T0"));
    assert!(matches!(
        load_standard_family(&text, None),
        Err(FamilyError::Duplicate(a, b)) if a == "T0" && b == "T3"
    ));
}

#[test]
fn manifest_mismatch_is_rejected() {
    let tampered = SHIPPED_MANIFEST.replacen("complete 26", "complete 27", 1);
    assert!(matches!(
        load_standard_family(SHIPPED_FAMILY, Some(&tampered)),
        Err(FamilyError::Manifest(_))
    ));
}

#[test]
fn broken_track_text_is_rejected() {
    let text = SHIPPED_FAMILY.replacen("switch 5.0 0.0 0.1", "switch 5.0 0.0 -", 1);
    assert!(parse_family(&text).is_err() || load_standard_family(&text, None).is_err());
}

#[test]
fn single_track_family_has_empty_sigma() {
    let mut f = common::family();
    f.complete.truncate(1);
    f.nearly.clear();
    let p = standard_partition(&f).unwrap();
    assert_eq!(p.complete.len(), 1);
    assert!(p.nearly.is_empty());
    let seq = generate_partition_sequence(&p, Caps { depth: 0, members: 10 }).unwrap();
    let r = verify_partition_properties(&seq);
    assert!(r.passed(Property::Adjacency));
    assert_eq!(r.count(Property::Adjacency), 0);
}

#[test]
fn nearly_member_that_is_no_face_is_rejected() {
    let f = common::family();
    let t0 = &f.complete[0];
    let faces: BTreeSet<String> = tracklab_core::standard::nearly_complete_faces(&t0.track)
        .into_iter()
        .map(|(_, t, _)| canonical_form(&t).0)
        .collect();
    let stranger = f
        .nearly
        .iter()
        .find(|n| !faces.contains(&canonical_form(&n.track).0))
        .expect("some nearly complete member is not a face of T0")
        .clone();
    let g = StandardTrackFamily {
        pants: f.pants.clone(),
        complete: vec![t0.clone()],
        nearly: vec![stranger.clone()],
    };
    match standard_partition(&g) {
        Err(FamilyError::Member { label, .. }) => assert_eq!(label, stranger.label),
        other => panic!("expected rejection, got {other:?}"),
    }
}

#[test]
fn depth_zero_partition_covers_every_sigma() {
    let f = common::family();
    let p = standard_partition(&f).unwrap();
    assert_eq!(p.complete.len(), 26);
    assert!(!p.nearly.is_empty());
    assert_eq!(p.assumptions.len(), 2);
    let seq = generate_partition_sequence(&p, Caps { depth: 0, members: 1000 }).unwrap();
    let r = verify_partition_properties(&seq);
    assert!(r.violations.is_empty(), "{:?}", r.violations.first());
}

const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

fn swap_first_two(twist: usize) -> usize {
    let p = PERMS[twist].map(|k| [1, 0, 2][k]);
    PERMS.iter().position(|q| *q == p).unwrap()
}

#[test]
fn family_is_closed_under_puncture_swaps() {
    // Punctures 1 <-> 2 exchange the tails at the first tree switch, 4 <-> 5
    // those at the third.
    let f = common::family();
    let canon: BTreeSet<String> = f.complete.iter().map(|m| canonical_form(&m.track).0).collect();
    let mut complete_twists = 0;
    for a in 0..6 {
        for b in 0..6 {
            for c in 0..6 {
                let Ok(t) = gadget_track([a, b, c]) else { continue };
                if classify_track(&t).class != TrackClass::Complete {
                    continue;
                }
                complete_twists += 1;
                for twist in [[swap_first_two(a), b, c], [a, b, swap_first_two(c)]] {
                    let u = gadget_track(twist).unwrap();
                    assert_eq!(classify_track(&u).class, TrackClass::Complete);
                    assert!(canon.contains(&canonical_form(&u).0));
                }
            }
        }
    }
    assert!(complete_twists >= 26);
}
