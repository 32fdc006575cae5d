use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tracklab_noebeling::approx::{approximate_path, check_approximation};
use tracklab_noebeling::blocks::{check_blocks, partition_path, BlockKind};
use tracklab_noebeling::claims::{boundary_grid_connected, check_square_loops};
use tracklab_noebeling::cover::{parse_cover, write_cover, BoundingBox, CubePairCover};
use tracklab_noebeling::finiteness::local_finiteness_report;
use tracklab_noebeling::grid::GridComplex;
use tracklab_noebeling::qsqrt2::{QSqrt2, Q};
use tracklab_noebeling::sample::{
    random_admissible_cover, random_certified_path, random_off_grid_samples, random_refinement,
};

#[test]
fn claims_hold_on_random_covers() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for k in 0..60 {
        let cover = random_admissible_cover(&mut rng, BoundingBox::unit(), k % 3 == 0);
        cover.validate().unwrap();
        assert!(check_square_loops(&cover).holds());
        let maximal = cover.maximal_cubes();
        for v in maximal.choose_multiple(&mut rng, 3) {
            assert_eq!(boundary_grid_connected(v, &cover), Ok(true), "{v}");
        }
    }
}

#[test]
fn uniform_grid_is_the_lattice_skeleton() {
    for m in 0..3u32 {
        let cover = CubePairCover::uniform(m, BoundingBox::unit());
        let grid = GridComplex::of_cover(&cover).unwrap();
        let k = (1i64 << m) as usize + 1;
        // vertices and edges of the lattice of spacing 2^-m in the unit cube
        assert_eq!(grid.counts(), [k * k * k, 3 * k * k * (k - 1), 0, 0]);
        assert_eq!(grid.edges().len(), 3 * k * k * (k - 1));
        assert!(grid.is_closed());
    }
}

#[test]
fn cover_files_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..5 {
        let cover = random_admissible_cover(&mut rng, BoundingBox::unit(), true);
        assert_eq!(parse_cover(&write_cover(&cover)).unwrap(), cover);
    }
    assert!(parse_cover("tracklab-cover v1\npair 1 0 0 0 w\n").is_err());
}

#[test]
fn partitions_of_random_paths_recheck() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for k in 0..8 {
        let f = random_certified_path(&mut rng, 4, 0.05, 0.95);
        let cover = if k % 2 == 0 {
            CubePairCover::uniform(2, BoundingBox::unit())
        } else {
            let refine = random_refinement(&mut rng, 1, BoundingBox::unit(), 0.4);
            CubePairCover::refined_uniform(1, BoundingBox::unit(), &refine)
        };
        let b = partition_path(&f, &cover).unwrap();
        check_blocks(&f, &cover, &b.blocks).unwrap();
        // blocks tile [0, 1] and the kinds alternate around each crossing
        assert_eq!(b.blocks[0].s, Q::from_integer(0.into()));
        assert_eq!(b.blocks.last().unwrap().t, Q::from_integer(1.into()));
        for w in b.blocks.windows(2) {
            assert_eq!(w[0].t, w[1].s);
            assert!(w[0].kind == BlockKind::I || w[1].kind == BlockKind::I);
        }
    }
}

#[test]
fn approximations_satisfy_their_contract_and_tighten() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    for k in 0..4 {
        let f = random_certified_path(&mut rng, 3, 0.05, 0.95);
        let cover = if k % 2 == 0 {
            CubePairCover::uniform(2, BoundingBox::unit())
        } else {
            let refine = random_refinement(&mut rng, 1, BoundingBox::unit(), 0.5);
            CubePairCover::refined_uniform(1, BoundingBox::unit(), &refine)
        };
        let grid = GridComplex::of_cover(&cover).unwrap();
        let mut last: Option<QSqrt2> = None;
        let mut paths = Vec::new();
        for n in 1..=6 {
            let a = approximate_path(&f, &cover, n).unwrap();
            let c = check_approximation(&f, &cover, &grid, &a);
            assert!(c.holds(), "n={n}: {c:?}");
            if let Some(prev) = &last {
                assert!(c.max_vertex_dist2 < *prev);
            }
            last = Some(c.max_vertex_dist2);
            paths.push((n, a.path));
        }
        let samples = random_off_grid_samples(&mut rng, &grid, 5);
        let r = local_finiteness_report(&paths, &samples, &grid).unwrap();
        assert!(r.holds());
    }
}

#[test]
fn empty_path_list_passes_vacuously() {
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    let cover = CubePairCover::uniform(1, BoundingBox::unit());
    let grid = GridComplex::of_cover(&cover).unwrap();
    let samples = random_off_grid_samples(&mut rng, &grid, 3);
    let r = local_finiteness_report(&[], &samples, &grid).unwrap();
    assert!(r.holds());
    assert_eq!(r.checks(), 0);
}
