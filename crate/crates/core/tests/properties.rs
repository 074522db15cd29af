use proptest::prelude::*;

use fdnoma::analytic::{op_exact, op_lower_bound};
use fdnoma::montecarlo::estimate_all_users;
use fdnoma::params::ConfigFile;
use fdnoma::specfun::{factorial, multinomial_coeffs, GammaLaw, OrderStatistic};
use fdnoma::sweep::{SweepRange, SweepVariable};
use fdnoma::Config;

fn system() -> impl Strategy<Value = Config> {
    (
        (1usize..=3, 1usize..=3, 1usize..=2, 1usize..=2, 1usize..=2),
        (0.0f64..=1.0, 0.0f64..=0.14, 0.0f64..=0.04, 0.0f64..=0.04, 0.0f64..=0.04),
        -10.0f64..=40.0,
    )
        .prop_map(|((ns, nd, m_sr, m_ru, m_li), (mu, kappa, cee_sr, cee_ru, ipsic), snr)| Config {
            tx_antennas: ns,
            rx_antennas: nd,
            m_sr,
            m_ru,
            m_li,
            li_quality: mu,
            kappa_sr: kappa,
            kappa_ru: kappa,
            cee_var_sr: cee_sr,
            cee_var_ru: cee_ru,
            ipsic_var: ipsic,
            snr_db: snr,
            ..Config::default()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn outage_is_a_probability_and_bounded_below(cfg in system(), l in 1usize..=3) {
        let exact = op_exact(&cfg, l).unwrap();
        let lb = op_lower_bound(&cfg, l).unwrap();
        prop_assert!((0.0..=1.0).contains(&exact));
        prop_assert!((0.0..=1.0).contains(&lb));
        prop_assert!(lb <= exact + 1e-6, "lb {} exact {}", lb, exact);
    }

    #[test]
    fn more_antennas_never_increase_outage(cfg in system(), l in 1usize..=3, source in any::<bool>()) {
        let mut more = cfg.clone();
        if source { more.tx_antennas += 1 } else { more.rx_antennas += 1 }
        let a = op_exact(&cfg, l).unwrap();
        let b = op_exact(&more, l).unwrap();
        prop_assert!(b <= a * (1.0 + 1e-8) + 1e-15, "{} -> {}", a, b);
    }

    #[test]
    fn higher_snr_never_increases_outage(cfg in system(), l in 1usize..=3, step in 0.5f64..10.0) {
        let a = op_exact(&cfg, l).unwrap();
        let b = op_exact(&cfg.with_snr_db(cfg.snr_db + step), l).unwrap();
        prop_assert!(b <= a * (1.0 + 1e-8) + 1e-15);
    }

    #[test]
    fn partitions_do_not_change_counts(seed in any::<u64>(), parts in 2usize..=9, trials in 1u64..200_000) {
        let cfg = Config::default();
        let a = estimate_all_users(&cfg, trials, seed, 1).unwrap();
        let b = estimate_all_users(&cfg, trials, seed, parts).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert_eq!(x.outages, y.outages);
        }
    }

    #[test]
    fn config_survives_toml_round_trip(cfg in system()) {
        let file = ConfigFile::from_config(&cfg);
        let back = ConfigFile::from_toml_str(&file.to_toml_string()).unwrap();
        prop_assert_eq!(&back, &file);
        prop_assert_eq!(back.to_config::<f64>().unwrap(), cfg);
    }
}

proptest! {
    #[test]
    fn multinomial_table_at_one(s1 in 1usize..=8, k in 1usize..=8) {
        let t = multinomial_coeffs::<f64>(s1, k);
        let base: f64 = (0..k).map(|n| 1.0 / factorial::<f64>(n)).sum();
        let expect = base.powi(s1 as i32);
        prop_assert!((t.evaluate(1.0) - expect).abs() <= 1e-13 * expect);
        prop_assert_eq!(t.degree(), s1 * (k - 1));
    }

    #[test]
    fn distribution_functions_are_complementary(shape in 1usize..=8, rate in 0.01f64..20.0, x in 0.0f64..50.0,
                                                users in 1usize..=5, pick in 0usize..5) {
        let law = GammaLaw::new(shape, rate);
        prop_assert!((law.cdf(x) + law.sf(x) - 1.0).abs() < 1e-14);
        let order = pick % users + 1;
        let os = OrderStatistic::new(order, users, law).unwrap();
        prop_assert!((os.cdf_binomial(x) + os.sf_binomial(x) - 1.0).abs() < 1e-13);
        prop_assert!((0.0..=1.0).contains(&os.cdf_binomial(x)));
    }

    #[test]
    fn sweep_grid_is_inclusive(start in -50.0f64..50.0, n in 0usize..200, step in 0.01f64..5.0) {
        let stop = start + n as f64 * step;
        let r = SweepRange { variable: SweepVariable::SnrDb, start, stop, step };
        let g = r.grid();
        prop_assert_eq!(g.len(), n + 1);
        prop_assert_eq!(g[0], start);
        prop_assert_eq!(*g.last().unwrap(), stop);
        prop_assert!(g.windows(2).all(|w| w[1] > w[0]));
    }
}
