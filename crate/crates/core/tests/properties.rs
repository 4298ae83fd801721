//! Property tests for the library's structural invariants.

use proptest::prelude::*;

use sensorfuse::{
    feature_fuse, filter_dataset, gb_fit, histogram, kalman_update, majority_vote, metrics,
    rmse_hard, rmse_proba, softmax, split_indices, synchronize, ActivityLabel, ConfusionMatrix,
    Dataset, GradientBoostConfig, KalmanConfig, KalmanState, Mat, RawSensorStream, SensorKind,
    Standardizer, StreamLabels, SyncRecord,
};

fn small_vocab(k: usize) -> Vec<ActivityLabel> {
    (0..k)
        .map(|i| ActivityLabel {
            name: format!("activity-{i}"),
            index: i,
        })
        .collect()
}

fn dataset_strategy(max_rows: usize) -> impl Strategy<Value = Dataset> {
    let row = (
        -1_000_000_000i64..1_000_000_000i64,
        prop::array::uniform9(-1e6f64..1e6f64),
        0usize..3,
    );
    prop::collection::vec(row, 2..max_rows).prop_map(|rows| {
        let records = rows
            .into_iter()
            .map(|(timestamp_ms, c, label)| SyncRecord {
                timestamp_ms,
                accel: [c[0], c[1], c[2]],
                gyro: [c[3], c[4], c[5]],
                mag: [c[6], c[7], c[8]],
                label,
            })
            .collect();
        Dataset::new(records, small_vocab(3)).unwrap()
    })
}

proptest! {
    #[test]
    fn split_is_a_seeded_partition(n in 2usize..400, ratio in 0.05f64..0.95, seed: u64) {
        let split = split_indices(n, ratio, seed).unwrap();
        prop_assert_eq!(split.train_indices.len(), (n as f64 * ratio).floor() as usize);
        prop_assert_eq!(split.train_indices.len() + split.test_indices.len(), n);
        let mut seen = vec![false; n];
        for &i in split.train_indices.iter().chain(&split.test_indices) {
            prop_assert!(!seen[i]);
            seen[i] = true;
        }
        prop_assert!(seen.iter().all(|&s| s));
        let again = split_indices(n, ratio, seed).unwrap();
        prop_assert_eq!(split.train_indices, again.train_indices);
    }

    #[test]
    fn softmax_is_a_distribution(scores in prop::collection::vec(-1e4f64..1e4, 1..9)) {
        let p = softmax(&scores);
        prop_assert_eq!(p.len(), scores.len());
        prop_assert!(p.iter().all(|&v| v.is_finite() && (0.0..=1.0).contains(&v)));
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        // Probabilities are monotone in the scores (non-strictly, since
        // extreme gaps underflow to exactly 0 and 1).
        for (s, q) in scores.windows(2).zip(p.windows(2)) {
            if s[0] < s[1] {
                prop_assert!(q[0] <= q[1]);
            }
        }
    }

    #[test]
    fn metrics_match_a_direct_recount(
        labels in prop::collection::vec(0usize..4, 1..300),
        pred_seed in prop::collection::vec(0usize..4, 300),
    ) {
        let n = labels.len();
        let preds: Vec<usize> = pred_seed[..n].to_vec();
        let cm = ConfusionMatrix::from_predictions(&labels, &preds, 4).unwrap();
        let report = metrics(&cm, None);

        let hits = labels.iter().zip(&preds).filter(|(a, b)| a == b).count();
        prop_assert!((report.accuracy - hits as f64 / n as f64).abs() < 1e-12);

        // Weighted recall equals accuracy by construction.
        prop_assert!((report.recall_weighted - report.accuracy).abs() < 1e-12);

        // Weighted precision recount: support-weighted per-class
        // precision with 0 for empty predicted classes.
        let mut expected = 0.0;
        for k in 0..4 {
            let support = labels.iter().filter(|&&y| y == k).count();
            let predicted = preds.iter().filter(|&&p| p == k).count();
            let tp = labels
                .iter()
                .zip(&preds)
                .filter(|&(&y, &p)| y == k && p == k)
                .count();
            let precision = if predicted == 0 { 0.0 } else { tp as f64 / predicted as f64 };
            expected += precision * support as f64;
        }
        expected /= n as f64;
        prop_assert!((report.precision_weighted - expected).abs() < 1e-12);
    }

    #[test]
    fn hard_rmse_matches_closed_form(
        labels in prop::collection::vec(0usize..5, 1..200),
        pred_seed in prop::collection::vec(0usize..5, 200),
    ) {
        let n = labels.len();
        let preds: Vec<usize> = pred_seed[..n].to_vec();
        let k = 5;
        let rmse = rmse_hard(&labels, &preds, k).unwrap();
        let hits = labels.iter().zip(&preds).filter(|(a, b)| a == b).count();
        let accuracy = hits as f64 / n as f64;
        let expected = (2.0 * (1.0 - accuracy) / k as f64).sqrt();
        prop_assert!((rmse - expected).abs() < 1e-12);

        // One-hot probability rows reduce to the hard-prediction case.
        let one_hot: Vec<Vec<f64>> = preds
            .iter()
            .map(|&p| {
                let mut row = vec![0.0; k];
                row[p] = 1.0;
                row
            })
            .collect();
        let via_proba = rmse_proba(&one_hot, &labels).unwrap();
        prop_assert!((via_proba - rmse).abs() < 1e-12);
    }

    #[test]
    fn histogram_conserves_mass(
        values in prop::collection::vec(-1e6f64..1e6, 1..250),
        n_bins in 1usize..40,
    ) {
        let h = histogram(&values, n_bins).unwrap();
        prop_assert_eq!(h.counts.iter().sum::<usize>(), values.len());
        prop_assert_eq!(h.edges.len(), h.counts.len() + 1);
        for pair in h.edges.windows(2) {
            prop_assert!(pair[0] <= pair[1]);
        }
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        prop_assert_eq!(h.edges[0], min);
        prop_assert_eq!(*h.edges.last().unwrap(), max);
    }

    #[test]
    fn correlation_is_symmetric_with_unit_diagonal(dataset in dataset_strategy(60)) {
        let c = sensorfuse::correlation_matrix(&dataset).unwrap();
        for (i, row) in c.iter().enumerate() {
            prop_assert_eq!(row[i], 1.0);
            for (j, &value) in row.iter().enumerate() {
                prop_assert!((-1.0..=1.0).contains(&value));
                prop_assert!((value - c[j][i]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn modal_vote_ignores_confidence(
        class_a in 0usize..6,
        class_b in 0usize..6,
        slot in 0usize..3,
        confidences in prop::array::uniform3(-10.0f64..10.0),
    ) {
        // Two votes for class_a in some arrangement always win.
        let mut votes = [class_a; 3];
        votes[slot] = class_b;
        let winner = majority_vote(votes, Some(confidences)).unwrap();
        if class_a == class_b {
            prop_assert_eq!(winner, class_a);
        } else {
            prop_assert_eq!(winner, class_a);
            prop_assert_eq!(majority_vote(votes, None).unwrap(), class_a);
        }
    }

    #[test]
    fn standardizer_is_shift_and_scale_invariant(
        base in prop::collection::vec(prop::array::uniform3(-100.0f64..100.0), 4..40),
        scale in 0.001f64..1000.0,
        shift in -100.0f64..100.0,
    ) {
        let original: Vec<Vec<f64>> = base.iter().map(|r| r.to_vec()).collect();
        let moved: Vec<Vec<f64>> = base
            .iter()
            .map(|r| r.iter().map(|v| v * scale + shift).collect())
            .collect();
        let s0 = Standardizer::fit(&original);
        let s1 = Standardizer::fit(&moved);
        for (a, b) in original.iter().zip(&moved) {
            let za = s0.transform(a);
            let zb = s1.transform(b);
            for (x, y) in za.iter().zip(&zb) {
                prop_assert!((x - y).abs() < 1e-6 * (1.0 + x.abs()));
            }
        }
    }

    #[test]
    fn scalar_kalman_gain_is_exact(p in 1e-6f64..1e6, r in 1e-6f64..1e6) {
        let config = KalmanConfig::identity_observation(0.0, r);
        let state = KalmanState::new([0.0; 3], Mat::scaled_identity(3, p)).unwrap();
        let gain = sensorfuse::kalman_gain(&state, &config).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expected = if i == j { p / (p + r) } else { 0.0 };
                prop_assert_eq!(gain[(i, j)], expected);
            }
        }
    }

    #[test]
    fn covariance_stays_symmetric_and_positive(
        measurements in prop::collection::vec(prop::array::uniform9(-50.0f64..50.0), 1..60),
        q_scale in 0.01f64..10.0,
        r_scale in 0.01f64..10.0,
    ) {
        let config = KalmanConfig::stacked(q_scale, r_scale);
        let mut state = KalmanState::with_unit_covariance([0.0; 3]);
        for z in &measurements {
            state = sensorfuse::kalman_predict(&state, &config).unwrap();
            state = kalman_update(&state, z, &config).unwrap();
            prop_assert_eq!(state.covariance.max_asymmetry(), 0.0);
            for i in 0..3 {
                prop_assert!(state.covariance[(i, i)] > 0.0);
            }
            prop_assert!(state.estimate.iter().all(|v| v.is_finite()));
        }
    }

    #[test]
    fn filtered_rows_stay_finite_and_aligned(dataset in dataset_strategy(40)) {
        let filtered = filter_dataset(&dataset, &KalmanConfig::default()).unwrap();
        prop_assert_eq!(filtered.filtered().len(), dataset.len());
        for row in filtered.filtered() {
            prop_assert!(row.iter().all(|v| v.is_finite()));
        }
    }

    #[test]
    fn boosting_loss_never_increases(
        rows in prop::collection::vec(prop::array::uniform2(-5.0f64..5.0), 8..40),
        label_seed in prop::collection::vec(0usize..3, 40),
    ) {
        let n = rows.len();
        let labels: Vec<usize> = label_seed[..n].to_vec();
        prop_assume!(labels.iter().any(|&y| y != labels[0]));
        let features: Vec<Vec<f64>> = rows.iter().map(|r| r.to_vec()).collect();
        let model = gb_fit(
            &features,
            &labels,
            &GradientBoostConfig {
                n_stages: 8,
                ..GradientBoostConfig::new(0)
            },
        )
        .unwrap();
        for pair in model.train_loss().windows(2) {
            prop_assert!(pair[1] <= pair[0] + 1e-9);
        }
    }

    #[test]
    fn synchronized_rows_respect_the_tolerance(
        starts in prop::collection::vec(0i64..2000, 3..40),
        gyro_jitter in prop::collection::vec(-80i64..80, 40),
        mag_jitter in prop::collection::vec(-80i64..80, 40),
        tolerance in 1i64..60,
    ) {
        // Encode each gyro/mag sample's own timestamp into its values so
        // the join distance is observable in the output rows.
        let accel: Vec<(i64, [f64; 3])> = starts.iter().map(|&t| (t, [0.0; 3])).collect();
        let gyro: Vec<(i64, [f64; 3])> = starts
            .iter()
            .zip(&gyro_jitter)
            .map(|(&t, &j)| (t + j, [(t + j) as f64; 3]))
            .collect();
        let mag: Vec<(i64, [f64; 3])> = starts
            .iter()
            .zip(&mag_jitter)
            .map(|(&t, &j)| (t + j, [(t + j) as f64; 3]))
            .collect();
        let mut accel_stream =
            RawSensorStream::new(SensorKind::Accelerometer, accel, None).unwrap();
        accel_stream.labels = StreamLabels::PerFile("walking".into());
        let streams = vec![
            accel_stream,
            RawSensorStream::new(SensorKind::Gyroscope, gyro, None).unwrap(),
            RawSensorStream::new(SensorKind::Magnetometer, mag, None).unwrap(),
        ];
        match synchronize(streams, tolerance) {
            Ok(ingested) => {
                prop_assert!(ingested.dataset.len() <= starts.len());
                for row in ingested.dataset.rows() {
                    prop_assert!((row.gyro[0] as i64 - row.timestamp_ms).abs() <= tolerance);
                    prop_assert!((row.mag[0] as i64 - row.timestamp_ms).abs() <= tolerance);
                }
            }
            Err(sensorfuse::IngestError::EmptyJoin { .. }) => {}
            Err(other) => return Err(TestCaseError::fail(format!("unexpected error {other}"))),
        }
    }

    #[test]
    fn feature_view_slices_canonical_columns(
        dataset in dataset_strategy(30),
        accel in any::<bool>(),
        gyro in any::<bool>(),
        mag in any::<bool>(),
    ) {
        let mut sensors = Vec::new();
        if accel { sensors.push(SensorKind::Accelerometer); }
        if gyro { sensors.push(SensorKind::Gyroscope); }
        if mag { sensors.push(SensorKind::Magnetometer); }
        if sensors.is_empty() {
            prop_assert!(feature_fuse(&dataset, &sensors).is_err());
            return Ok(());
        }
        let view = feature_fuse(&dataset, &sensors).unwrap();
        prop_assert_eq!(view.width(), 3 * sensors.len());
        let matrix = view.matrix();
        prop_assert_eq!(matrix.len(), dataset.len());
        for (row, record) in matrix.iter().zip(dataset.rows()) {
            let mut expected = Vec::new();
            for kind in SensorKind::ALL {
                if sensors.contains(&kind) {
                    expected.extend_from_slice(&record.sensor(kind));
                }
            }
            prop_assert_eq!(row.clone(), expected);
        }
    }
}
