//! Config text and result CSV survive a write/read cycle unchanged.

use poisonlab_cli::config::{parse_config_text, RawConfig};
use poisonlab_cli::output::{read_csv, write_csv};
use poisonlab_cli::{Command, ResultRow, RunConfig};
use proptest::prelude::*;

fn raw(pairs: Vec<(&str, String)>) -> RawConfig {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

proptest! {
    #[test]
    fn config_text_round_trips(
        etas in prop::collection::vec((1u64..8, 9u64..512), 1..4),
        dims in prop::collection::vec(1usize..4, 1..3),
        biases in prop::collection::vec(-0.5f64..0.5, 1..4),
        trials in 1usize..10_000,
        seed in any::<u64>(),
        threads in 1usize..9,
    ) {
        let etas: Vec<String> = etas.iter().map(|(a, b)| format!("{a}/{b}")).collect();
        let cfg = RunConfig::from_raw(Command::Sweep, &raw(vec![
            ("eta", etas.join(",")),
            ("d", join(&dims)),
            ("bias", join(&biases)),
            ("trials", trials.to_string()),
            ("seed", seed.to_string()),
            ("threads", threads.to_string()),
        ])).unwrap();
        let back = RunConfig::from_raw(Command::Sweep, &parse_config_text(&cfg.to_text(), "rt").unwrap()).unwrap();
        prop_assert_eq!(&back, &cfg);
        prop_assert_eq!(back.config_hash(), cfg.config_hash());
    }

    #[test]
    fn csv_rows_round_trip_bit_exact(
        vals in prop::collection::vec((any::<f64>().prop_filter("finite", |x| x.is_finite()), -1.0f64..1.0, prop::option::of(any::<bool>())), 1..6),
        seed in any::<u64>(),
    ) {
        let rows: Vec<ResultRow> = vals.iter().enumerate().map(|(i, &(mean, low, pass))| ResultRow {
            command: "sweep".into(),
            experiment: "adversarial".into(),
            learner: "exp".into(),
            adversary: "greedy".into(),
            d: i + 1,
            eta: "1/64".into(),
            n: 256,
            bias: format!("{:.16e}", low),
            trials: 100,
            seed,
            mean: Some(mean),
            ci_low: Some(low),
            ci_high: None,
            bayes_loss: Some(0.25),
            bound_name: String::new(),
            bound_value: None,
            pass,
            status: "ok".into(),
            artifact_version: "0.1.0".into(),
            config_hash: "0123456789abcdef".into(),
        }).collect();
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let back = read_csv(buf.as_slice()).unwrap();
        prop_assert_eq!(back.len(), rows.len());
        for (a, b) in back.iter().zip(&rows) {
            prop_assert_eq!(a.mean.map(f64::to_bits), b.mean.map(f64::to_bits));
            prop_assert_eq!(a.ci_low.map(f64::to_bits), b.ci_low.map(f64::to_bits));
            prop_assert_eq!(a, b);
        }
    }
}
