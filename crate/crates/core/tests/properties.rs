mod common;

use common::checks;
use common::random_polygon;
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tropwave::rat::{rat, Point};
use tropwave::{rho, TropicalSeries};

fn config() -> ProptestConfig {
    ProptestConfig { cases: 200, ..ProptestConfig::default() }
}

macro_rules! seeded {
    ($($name:ident => $check:path),* $(,)?) => {
        proptest! {
            #![proptest_config(config())]
            $(
                #[test]
                fn $name(seed in any::<u64>()) {
                    if let Err(e) = $check(seed) {
                        prop_assert!(false, "{}", e);
                    }
                }
            )*
        }
    };
}

seeded! {
    wave_is_monotone => checks::monotone,
    wave_is_non_expansive => checks::non_expansive,
    wave_is_idempotent => checks::idempotent,
    waves_stay_below_distance_bound => checks::upper_bound,
    curves_are_balanced => checks::balanced,
    edge_weights_match_dual_gcd => checks::weights,
    perturbed_series_have_close_curves => checks::closeness,
    distance_function_matches_brute_force => checks::distance,
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn polygon_vertices_lie_on_two_sides(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let poly = random_polygon(&mut rng);
        prop_assert!(poly.area().unwrap().is_positive());
        for w in poly.vertices() {
            let tight = poly.halfplanes().iter().filter(|h| h.eval(w).is_zero()).count();
            prop_assert!(tight >= 2);
            prop_assert!(poly.contains(w));
        }
        prop_assert!(poly.strictly_contains(&Point::new(rat(1, 2), rat(1, 2))));
    }

    #[test]
    fn series_json_round_trips(seed in any::<u64>()) {
        let f = checks::instance(seed).2;
        let back = TropicalSeries::from_json(&f.to_json().unwrap()).unwrap();
        prop_assert_eq!(back.support(), f.support());
        prop_assert!(rho(&f, &back).unwrap().is_zero());
    }
}
