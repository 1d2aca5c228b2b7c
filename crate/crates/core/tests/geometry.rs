mod common;

use hsod::hsi::normalize_map;
use hsod::hsi::synth::{orthogonal_pair, synth_scene, Scene, Shape};
use hsod::mfa::{neighborhood_attention, AttentionParams, FeatureTensor, Normalizer};
use hsod::seo::{edge_ground_truth_from_cube, spectral_edge};
use hsod::ssg::{run_ssg, SsgConfig};
use hsod::{HyperCube, Map2D};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn disk(n: usize, radius: f64) -> Scene {
    let (fg, bg) = orthogonal_pair(8);
    synth_scene(n, n, Shape::centered_disk(n, n, radius), &fg, &bg, 0.0, 0).unwrap()
}

fn support(m: &Map2D) -> Vec<bool> {
    m.values().iter().map(|&v| v > 0.0).collect()
}

#[test]
fn edge_ring_widens_with_kernel_size() {
    let scene = disk(64, 18.0);
    let rings: Vec<Vec<bool>> = [3, 5, 7]
        .iter()
        .map(|&k| support(&spectral_edge(&scene.cube, k).unwrap()))
        .collect();
    let counts: Vec<usize> = rings
        .iter()
        .map(|r| r.iter().filter(|&&b| b).count())
        .collect();
    assert!(counts[0] > 0);
    assert!(
        counts[0] <= counts[1] && counts[1] <= counts[2],
        "{counts:?}"
    );
    for pair in rings.windows(2) {
        assert!(pair[0].iter().zip(&pair[1]).all(|(&a, &b)| !a || b));
    }
}

#[test]
fn edge_response_hugs_the_boundary() {
    let scene = disk(64, 18.0);
    let gt = scene.ground_truth.values();
    let n = 64;
    let m = spectral_edge(&scene.cube, 3).unwrap();
    for i in 0..n {
        for j in 0..n {
            if m.get(i, j) > 0.0 {
                // Some pixel of the other class lies within the 3 × 3 window.
                let own = gt[i * n + j];
                let mixed = (i.saturating_sub(1)..=(i + 1).min(n - 1)).any(|a| {
                    (j.saturating_sub(1)..=(j + 1).min(n - 1)).any(|b| gt[a * n + b] != own)
                });
                assert!(mixed, "response at ({i},{j}) away from the boundary");
            }
        }
    }
}

#[test]
fn edge_ground_truth_is_a_closed_ring() {
    let n = 64;
    let scene = disk(n, 18.0);
    let cfg = SsgConfig {
        num_layers: 6,
        center_indices: vec![1, 2],
        surround_offset: 2,
        ..SsgConfig::default()
    };
    let sal: Vec<Map2D> = run_ssg(&scene.cube, &cfg)
        .unwrap()
        .into_iter()
        .map(|m| normalize_map(&m.map))
        .collect();
    let edge = edge_ground_truth_from_cube(&scene.cube, &sal).unwrap();
    let on = |i: usize, j: usize| edge.get(i, j) == 1.0;
    let gt = &scene.ground_truth;

    // Every object boundary pixel has an edge pixel within one pixel.
    for i in 1..n - 1 {
        for j in 1..n - 1 {
            let boundary = gt.get(i, j) == 1.0
                && [(i - 1, j), (i + 1, j), (i, j - 1), (i, j + 1)]
                    .iter()
                    .any(|&(a, b)| gt.get(a, b) == 0.0);
            if boundary {
                let near = (i - 1..=i + 1).any(|a| (j - 1..=j + 1).any(|b| on(a, b)));
                assert!(near, "boundary pixel ({i},{j}) has no edge within 1 px");
            }
        }
    }

    // Closed: a 4-connected flood from the center through non-edge pixels
    // never reaches the image border.
    let mut seen = vec![false; n * n];
    let mut stack = vec![(n / 2, n / 2)];
    assert!(!on(n / 2, n / 2));
    while let Some((i, j)) = stack.pop() {
        if seen[i * n + j] || on(i, j) {
            continue;
        }
        seen[i * n + j] = true;
        assert!(
            i > 0 && j > 0 && i < n - 1 && j < n - 1,
            "ring leaks at ({i},{j})"
        );
        stack.extend([(i - 1, j), (i + 1, j), (i, j - 1), (i, j + 1)]);
    }
}

#[test]
fn spectral_edge_is_translation_equivariant_in_the_interior() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let base = common::random_cube(24, 24, 4, &mut rng);
    let (dy, dx) = (3, 2);
    let shifted = HyperCube::from_fn(24, 24, 4, |b, i, j| {
        base.get(b, (i + 24 - dy) % 24, (j + 24 - dx) % 24)
    })
    .unwrap();
    for k in [3, 5, 7] {
        let a = spectral_edge(&base, k).unwrap();
        let b = spectral_edge(&shifted, k).unwrap();
        let r = k / 2;
        for i in r..24 - r - dy {
            for j in r..24 - r - dx {
                assert_eq!(
                    a.get(i, j).to_bits(),
                    b.get(i + dy, j + dx).to_bits(),
                    "k={k} at ({i},{j})"
                );
            }
        }
    }
}

#[test]
fn spectral_edge_matches_naive_on_non_square_cubes() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for (h, w) in [(5, 11), (13, 4), (1, 9), (7, 1)] {
        let cube = common::random_cube(h, w, 3, &mut rng);
        for k in [3, 5, 7] {
            let fast = hsod::seo::spectral_edge_values(&cube, k).unwrap();
            let naive = common::naive_spectral_edge(&cube, k);
            for (a, b) in fast.iter().zip(naive.iter().flatten()) {
                assert!((a - b).abs() < 1e-9, "{h}x{w} k={k}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn attention_matches_naive_across_shapes() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for (h, w, k) in [(7, 5, 3), (5, 9, 5), (6, 6, 1), (9, 9, 9)] {
        for normalizer in [Normalizer::Sigmoid, Normalizer::Softmax] {
            let x = FeatureTensor::random(h, w, 3, -1.0, 1.0, &mut rng);
            let y = FeatureTensor::random(h, w, 5, -1.0, 1.0, &mut rng);
            let mut p = AttentionParams::init(3, 5, 2, k, normalizer, &mut rng);
            for b in p.bias.iter_mut() {
                *b = rand::Rng::random_range(&mut rng, -0.5..0.5);
            }
            let out = neighborhood_attention(&x, &y, &p).unwrap();
            let naive = common::naive_attention(&x, &y, &p);
            for (i, row) in naive.iter().enumerate() {
                for (j, px) in row.iter().enumerate() {
                    for (a, b) in out.pixel(i, j).iter().zip(px) {
                        assert!((a - b).abs() < 1e-12, "{h}x{w} k={k}: {a} vs {b}");
                    }
                }
            }
        }
    }
}

#[test]
fn saliency_matches_naive_reference_on_noisy_scene() {
    let (fg, bg) = orthogonal_pair(6);
    let scene = synth_scene(64, 64, Shape::centered_rect(64, 64), &fg, &bg, 0.05, 7).unwrap();
    let cfg = SsgConfig {
        num_layers: 6,
        center_indices: vec![1, 2],
        surround_offset: 2,
        ..SsgConfig::default()
    };
    for m in run_ssg(&scene.cube, &cfg).unwrap() {
        let naive = common::naive_saliency(&scene.cube, m.center, m.surround);
        for (a, &b) in naive.iter().flatten().zip(m.map.values()) {
            assert!((a - b as f64).abs() < 1e-5);
        }
    }
}
