use std::f64::consts::TAU;

use ltsim::decomposition::decompose_one_sparse;
use ltsim::integrator::{ClassLayout, ExponentialPlan, Segment, Step};
use ltsim::linalg::{self, c, spectral_norm, CMatrix};
use ltsim::oracle::{mesh_time, round_time, OracleConfig, PolarCode};
use ltsim::{CatalogEntry, SparsityPattern};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn hermitian_from(entries: &[f64], dim: usize) -> CMatrix {
    let mut m = CMatrix::zeros(dim, dim);
    let mut it = entries.iter().copied().cycle();
    for i in 0..dim {
        m[(i, i)] = c(it.next().unwrap(), 0.0);
        for j in i + 1..dim {
            let z = c(it.next().unwrap(), it.next().unwrap());
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    m
}

proptest! {
    #[test]
    fn rounding_picks_nearest_mesh_point_in_window(
        bits in 3u32..10,
        lo in 0.0f64..1.0,
        width in 0.0f64..1.0,
        frac in 0.0f64..1.0,
    ) {
        let config = OracleConfig::new(bits, 8, 1.0, 0.0, 1.0).unwrap();
        let a = lo.min(1.0 - config.cell());
        let b = (a + config.cell() + width).min(1.0);
        let tau = a + frac * (b - a);
        let q = round_time(tau, (a, b), &config).unwrap();
        let t = mesh_time(q, &config).unwrap();
        prop_assert!(t >= a && t <= b);
        let best = (1..=config.mesh_len())
            .map(|p| mesh_time(p, &config).unwrap())
            .filter(|&s| s >= a && s <= b)
            .map(|s| (s - tau).abs())
            .fold(f64::INFINITY, f64::min);
        prop_assert!((t - tau).abs() <= best + 1e-15);
    }

    #[test]
    fn polar_truncation_stays_within_one_unit(
        rho in 0.0f64..2.0,
        phi in -10.0f64..10.0,
        half_bits in 1u32..30,
    ) {
        let h_max = 2.0;
        let z = c(rho * phi.cos(), rho * phi.sin());
        let code = PolarCode::encode(z, h_max, half_bits).unwrap();
        let (r, p) = code.decode(h_max);
        let unit = (1u64 << half_bits) as f64;
        prop_assert!(r <= z.norm() + 1e-15);
        prop_assert!(z.norm() - r <= h_max / unit + 1e-15);
        prop_assert!((0.0..TAU).contains(&p));
        if z.norm() > 0.0 {
            let gap = (z.arg() - p).rem_euclid(TAU);
            prop_assert!(gap <= TAU / unit + 1e-12 || TAU - gap <= 1e-12);
        }
    }

    #[test]
    fn decomposition_partitions_the_pattern(
        dim_bits in 1u32..5,
        edges in prop::collection::vec((0usize..16, 0usize..16), 0..40),
    ) {
        let dim = 1usize << dim_bits;
        let mut entries: Vec<(usize, usize)> = (0..dim).map(|i| (i, i)).collect();
        for (x, y) in edges {
            let (x, y) = (x % dim, y % dim);
            entries.push((x, y));
            entries.push((y, x));
        }
        let pattern = SparsityPattern::new(dim, entries).unwrap();
        let classes = decompose_one_sparse(0, &pattern).unwrap();
        let mut covered = Vec::new();
        for class in &classes {
            let mut seen = vec![false; dim];
            for &(x, y) in class.pairs() {
                prop_assert!(!seen[x] && !seen[y]);
                seen[x] = true;
                seen[y] = true;
            }
            covered.extend(class.entries());
        }
        covered.sort_unstable();
        covered.dedup();
        let expect: Vec<(usize, usize)> = pattern.entries().iter().copied().collect();
        prop_assert_eq!(covered, expect);
        let d = pattern.degree().unwrap();
        prop_assert!(classes.len() <= 2 * d);
    }

    #[test]
    fn plan_text_round_trips(
        cuts in prop::collection::vec(0.001f64..0.5, 1..6),
        k in 1u32..4,
    ) {
        let layout = ClassLayout::of_hamiltonian(&CatalogEntry::QubitPair.build().unwrap()).unwrap();
        let mut times = vec![0.0];
        for w in cuts {
            times.push(times.last().unwrap() + w);
        }
        let plan = ExponentialPlan::from_times(&times, k, &layout).unwrap();
        prop_assert_eq!(ExponentialPlan::from_text(&plan.to_text()).unwrap(), plan);
    }

    #[test]
    fn every_class_sees_the_whole_segment(
        start in 0.0f64..0.5,
        len in 1e-3f64..0.5,
        k in 1u32..4,
    ) {
        let layout = ClassLayout::of_hamiltonian(&CatalogEntry::QubitPair.build().unwrap()).unwrap();
        let plan = ExponentialPlan::build(vec![Segment::new(start, start + len, k).unwrap()], &layout);
        let mut total = std::collections::HashMap::new();
        for step in &plan.steps {
            if let Step::Exp { term, color, duration, .. } = *step {
                *total.entry((term, color)).or_insert(0.0) += duration;
            }
        }
        prop_assert_eq!(total.len(), layout.class_count());
        for (_, sum) in total {
            prop_assert!((sum - len).abs() <= 1e-12 * len.max(1.0) * 5f64.powi(k as i32));
        }
    }

    #[test]
    fn product_error_telescopes(seed in any::<u64>(), scale in 0.0f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let us: Vec<CMatrix> = (0..3).map(|_| linalg::random_unitary(3, &mut rng)).collect();
        let vs: Vec<CMatrix> = us
            .iter()
            .map(|u| u * linalg::hermitian_evolution(&linalg::random_hermitian(3, &mut rng), scale))
            .collect();
        let lhs = spectral_norm(&(&us[0] * &us[1] * &us[2] - &vs[0] * &vs[1] * &vs[2]));
        let rhs: f64 = us.iter().zip(&vs).map(|(u, v)| spectral_norm(&(u - v))).sum();
        prop_assert!(lhs <= rhs + 1e-12);
    }

    #[test]
    fn exponential_is_norm_contracting(
        a in prop::collection::vec(-3.0f64..3.0, 9),
        b in prop::collection::vec(-3.0f64..3.0, 9),
    ) {
        let (ha, hb) = (hermitian_from(&a, 3), hermitian_from(&b, 3));
        let lhs = spectral_norm(&(linalg::hermitian_evolution(&ha, 1.0) - linalg::hermitian_evolution(&hb, 1.0)));
        prop_assert!(lhs <= spectral_norm(&(&ha - &hb)) + 1e-12);
    }
}
