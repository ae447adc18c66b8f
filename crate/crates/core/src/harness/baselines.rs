use rand::seq::index;

use crate::geometry::build_proxy;
use crate::rng::{self, domain};
use crate::scene::{RefinementPlan, Scene};

/// `w` buildings drawn uniformly without replacement.
pub fn baseline_select_random(scene: &Scene, w: usize, seed: u64) -> RefinementPlan {
    let ids: Vec<u32> = scene.ids().into_iter().collect();
    let mut rng = rng::stream(&[domain::RANDOM_BASELINE, seed]);
    let take = w.min(ids.len());
    let mut picked: Vec<usize> = index::sample(&mut rng, ids.len(), take).into_vec();
    picked.sort_unstable();
    RefinementPlan { budget: w, selected: picked.into_iter().map(|k| ids[k]).collect() }
}

/// Proxy volume (hull area times height) of every building; degenerate
/// footprints count as zero.
pub fn building_volumes(scene: &Scene) -> Vec<(u32, f64)> {
    scene
        .buildings
        .iter()
        .map(|b| (b.id, build_proxy(b).map_or(0.0, |p| p.volume())))
        .collect()
}

/// The `w` largest buildings by proxy volume, ties by smaller id.
pub fn baseline_select_volume(scene: &Scene, w: usize) -> RefinementPlan {
    let mut v = building_volumes(scene);
    v.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    RefinementPlan { budget: w, selected: v.into_iter().take(w).map(|(id, _)| id).collect() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::tests::{rect, small_scene};
    use crate::scene::{generate_synthetic_city, CityParams};
    use std::collections::BTreeSet;

    #[test]
    fn random_edge_cases_and_determinism() {
        let s = generate_synthetic_city(1, 30, 400.0, &CityParams::default()).unwrap();
        assert!(baseline_select_random(&s, 0, 5).selected.is_empty());
        assert_eq!(baseline_select_random(&s, 30, 5).selected, s.ids());
        assert_eq!(baseline_select_random(&s, 99, 5).selected, s.ids());
        let a = baseline_select_random(&s, 10, 5);
        assert_eq!(a, baseline_select_random(&s, 10, 5));
        assert_eq!(a.selected.len(), 10);
        assert_ne!(a, baseline_select_random(&s, 10, 6));
    }

    #[test]
    fn random_is_roughly_uniform() {
        let s = generate_synthetic_city(2, 10, 300.0, &CityParams::default()).unwrap();
        let mut counts = [0usize; 10];
        for seed in 0..4000 {
            for id in baseline_select_random(&s, 3, seed).selected {
                counts[id as usize] += 1;
            }
        }
        // expected 1200 per building
        assert!(counts.iter().all(|&c| (1080..=1320).contains(&c)), "{counts:?}");
    }

    #[test]
    fn volume_prefers_taller_equal_footprints() {
        let mut s = small_scene();
        s.buildings = vec![rect(4, 0.0, 0.0, 10.0, 10.0, 20.0), rect(2, 20.0, 0.0, 30.0, 10.0, 35.0)];
        assert_eq!(baseline_select_volume(&s, 1).selected, BTreeSet::from([2]));
        s.buildings[1].height = 20.0;
        assert_eq!(baseline_select_volume(&s, 1).selected, BTreeSet::from([2]));
    }

    #[test]
    fn volume_ordering_matches_sort_oracle() {
        let s = generate_synthetic_city(9, 40, 500.0, &CityParams::default()).unwrap();
        let mut oracle: Vec<(u32, f64)> = s
            .buildings
            .iter()
            .map(|b| {
                let hull = crate::geometry::convex_hull_2d(&b.footprint).unwrap();
                let area = crate::geometry::polygon_area(&hull).unwrap();
                (b.id, area * b.height)
            })
            .collect();
        // insertion sort by (volume desc, id asc)
        for i in 1..oracle.len() {
            let mut j = i;
            while j > 0 && (oracle[j].1 > oracle[j - 1].1 || (oracle[j].1 == oracle[j - 1].1 && oracle[j].0 < oracle[j - 1].0)) {
                oracle.swap(j, j - 1);
                j -= 1;
            }
        }
        for w in [1, 5, 17, 40] {
            let want: BTreeSet<u32> = oracle.iter().take(w).map(|x| x.0).collect();
            assert_eq!(baseline_select_volume(&s, w).selected, want);
        }
    }
}
