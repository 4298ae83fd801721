//! Linear Kalman filter over the nine sensor channels.
//!
//! The filter estimates one latent 3-vector (X, Y, Z). In the stacked
//! measurement model the accelerometer, gyroscope, and magnetometer
//! triples are treated as three noisy observations of that latent state,
//! so H is the 9×3 stack of three identity blocks and each scan step
//! consumes a full 9-channel row. The control term of the state equation
//! is identically zero here, so no control matrix is stored.

use crate::data::Dataset;
use crate::error::FusionError;
use crate::fusion::mat::Mat;
use serde::{Deserialize, Serialize};

/// Default process-noise scale (Q = 0.1·I).
pub const DEFAULT_Q_SCALE: f64 = 0.1;

/// Default measurement-noise scale (R = 0.5·I).
pub const DEFAULT_R_SCALE: f64 = 0.5;

/// Headers of the three columns appended by [`filter_dataset`].
pub const FILTERED_COLUMNS: [&str; 3] = [
    "Kalman Filtered X",
    "Kalman Filtered Y",
    "Kalman Filtered Z",
];

/// Filter matrices: state transition F (3×3), process noise Q (3×3),
/// observation H (m×3), measurement noise R (m×m).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KalmanConfig {
    pub transition: Mat,
    pub process_noise: Mat,
    pub observation: Mat,
    pub measurement_noise: Mat,
}

impl KalmanConfig {
    /// Stacked nine-channel observation model: F = I₃, Q = q·I₃,
    /// H = [I₃; I₃; I₃], R = r·I₉.
    pub fn stacked(q_scale: f64, r_scale: f64) -> KalmanConfig {
        let mut observation = Mat::zeros(9, 3);
        for block in 0..3 {
            for axis in 0..3 {
                observation[(block * 3 + axis, axis)] = 1.0;
            }
        }
        KalmanConfig {
            transition: Mat::identity(3),
            process_noise: Mat::scaled_identity(3, q_scale),
            observation,
            measurement_noise: Mat::scaled_identity(9, r_scale),
        }
    }

    /// Direct three-channel observation model: H = I₃, R = r·I₃.
    pub fn identity_observation(q_scale: f64, r_scale: f64) -> KalmanConfig {
        KalmanConfig {
            transition: Mat::identity(3),
            process_noise: Mat::scaled_identity(3, q_scale),
            observation: Mat::identity(3),
            measurement_noise: Mat::scaled_identity(3, r_scale),
        }
    }

    /// Measurement dimension m = rows(H).
    pub fn measurement_dim(&self) -> usize {
        self.observation.rows()
    }

    /// Checks shapes, finiteness, and that the noise matrices are
    /// symmetric positive semi-definite.
    pub fn validate(&self) -> Result<(), FusionError> {
        let m = self.measurement_dim();
        let checks = [
            (self.transition.rows() == 3 && self.transition.cols() == 3, "transition must be 3x3"),
            (self.process_noise.rows() == 3 && self.process_noise.cols() == 3, "process noise must be 3x3"),
            (self.observation.cols() == 3 && m >= 1, "observation must be m x 3 with m >= 1"),
            (self.measurement_noise.rows() == m && self.measurement_noise.cols() == m, "measurement noise must be m x m"),
        ];
        for (ok, message) in checks {
            if !ok {
                return Err(FusionError::InvalidConfig {
                    message: message.into(),
                });
            }
        }
        for (matrix, name) in [
            (&self.transition, "transition"),
            (&self.process_noise, "process noise"),
            (&self.observation, "observation"),
            (&self.measurement_noise, "measurement noise"),
        ] {
            if !matrix.all_finite() {
                return Err(FusionError::InvalidConfig {
                    message: format!("{name} contains a non-finite entry"),
                });
            }
        }
        for (matrix, name) in [
            (&self.process_noise, "process noise"),
            (&self.measurement_noise, "measurement noise"),
        ] {
            check_psd(matrix, name)?;
        }
        Ok(())
    }
}

impl Default for KalmanConfig {
    fn default() -> Self {
        KalmanConfig::stacked(DEFAULT_Q_SCALE, DEFAULT_R_SCALE)
    }
}

/// Symmetry within 1e-9 plus a shifted factorization succeeding. The
/// shift scales with the diagonal so large PSD matrices are not rejected
/// for rounding noise.
fn check_psd(matrix: &Mat, name: &str) -> Result<(), FusionError> {
    if matrix.max_asymmetry() > 1e-9 {
        return Err(FusionError::InvalidConfig {
            message: format!("{name} is not symmetric"),
        });
    }
    let n = matrix.rows();
    let max_diag = (0..n).map(|i| matrix[(i, i)].abs()).fold(0.0, f64::max);
    let shift = 1e-9 * (1.0 + max_diag);
    let shifted = matrix.add(&Mat::scaled_identity(n, shift));
    shifted.ldlt().map(|_| ()).map_err(|_| FusionError::InvalidConfig {
        message: format!("{name} is not positive semi-definite"),
    })
}

/// Estimate x̂ and covariance P after some number of filter steps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KalmanState {
    pub estimate: [f64; 3],
    pub covariance: Mat,
}

impl KalmanState {
    pub fn new(estimate: [f64; 3], covariance: Mat) -> Result<KalmanState, FusionError> {
        if covariance.rows() != 3 || covariance.cols() != 3 {
            return Err(FusionError::DimensionMismatch {
                expected: 3,
                got: covariance.rows(),
            });
        }
        Ok(KalmanState {
            estimate,
            covariance,
        })
    }

    /// Unit-covariance state centered on an estimate.
    pub fn with_unit_covariance(estimate: [f64; 3]) -> KalmanState {
        KalmanState {
            estimate,
            covariance: Mat::identity(3),
        }
    }
}

/// Time update: x̂ ← F·x̂ and P ← F·P·Fᵀ + Q. With the default F = I the
/// estimate is unchanged and the covariance grows by Q.
pub fn kalman_predict(
    state: &KalmanState,
    config: &KalmanConfig,
) -> Result<KalmanState, FusionError> {
    if config.transition.rows() != 3 || config.transition.cols() != 3 {
        return Err(FusionError::InvalidConfig {
            message: "transition must be 3x3".into(),
        });
    }
    if config.process_noise.rows() != 3 || config.process_noise.cols() != 3 {
        return Err(FusionError::InvalidConfig {
            message: "process noise must be 3x3".into(),
        });
    }
    let estimate_vec = config.transition.mul_vec(&state.estimate);
    let mut covariance = config
        .transition
        .matmul(&state.covariance)
        .matmul(&config.transition.transpose())
        .add(&config.process_noise);
    covariance.symmetrize();
    Ok(KalmanState {
        estimate: [estimate_vec[0], estimate_vec[1], estimate_vec[2]],
        covariance,
    })
}

/// Measurement update with gain K = P·Hᵀ·(H·P·Hᵀ + R)⁻¹:
/// x̂ ← x̂ + K(z − H·x̂) and P ← (I − K·H)·P.
///
/// The innovation covariance is solved by LDLᵀ; a non-positive pivot or a
/// reciprocal condition below 1e-12 is reported as a numerical error.
pub fn kalman_update(
    state: &KalmanState,
    measurement: &[f64],
    config: &KalmanConfig,
) -> Result<KalmanState, FusionError> {
    let m = config.measurement_dim();
    if config.observation.cols() != 3 {
        return Err(FusionError::InvalidConfig {
            message: "observation must be m x 3".into(),
        });
    }
    if config.measurement_noise.rows() != m || config.measurement_noise.cols() != m {
        return Err(FusionError::InvalidConfig {
            message: "measurement noise must be m x m".into(),
        });
    }
    if measurement.len() != m {
        return Err(FusionError::DimensionMismatch {
            expected: m,
            got: measurement.len(),
        });
    }
    let h = &config.observation;
    let mut p = state.covariance.clone();
    p.symmetrize();

    let mut innovation_cov = h.matmul(&p).matmul(&h.transpose()).add(&config.measurement_noise);
    innovation_cov.symmetrize();
    let factor = innovation_cov.ldlt()?;
    // K = P·Hᵀ·S⁻¹ = (S⁻¹·H·P)ᵀ because P and S are symmetric.
    let gain = factor.solve_mat(&h.matmul(&p)).transpose();

    let projected = h.mul_vec(&state.estimate);
    let innovation: Vec<f64> = measurement
        .iter()
        .zip(&projected)
        .map(|(z, hx)| z - hx)
        .collect();
    let correction = gain.mul_vec(&innovation);
    let estimate = [
        state.estimate[0] + correction[0],
        state.estimate[1] + correction[1],
        state.estimate[2] + correction[2],
    ];
    let mut covariance = Mat::identity(3).sub(&gain.matmul(h)).matmul(&p);
    covariance.symmetrize();
    Ok(KalmanState {
        estimate,
        covariance,
    })
}

/// The gain matrix alone; exposed for closed-form gain checks.
pub fn kalman_gain(state: &KalmanState, config: &KalmanConfig) -> Result<Mat, FusionError> {
    let h = &config.observation;
    let mut p = state.covariance.clone();
    p.symmetrize();
    let mut innovation_cov = h.matmul(&p).matmul(&h.transpose()).add(&config.measurement_noise);
    innovation_cov.symmetrize();
    let factor = innovation_cov.ldlt()?;
    Ok(factor.solve_mat(&h.matmul(&p)).transpose())
}

/// A dataset plus the filtered X/Y/Z estimate for each row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilteredDataset {
    dataset: Dataset,
    filtered: Vec<[f64; 3]>,
}

impl FilteredDataset {
    pub fn dataset(&self) -> &Dataset {
        &self.dataset
    }

    /// Posterior estimates, one per row in timestamp order.
    pub fn filtered(&self) -> &[[f64; 3]] {
        &self.filtered
    }

    /// Filtered estimates as feature rows for classifier training.
    pub fn feature_rows(&self) -> Vec<Vec<f64>> {
        self.filtered.iter().map(|f| f.to_vec()).collect()
    }
}

/// Runs a sequential predict/update scan over the dataset rows in
/// timestamp order, using each row's nine channels as the measurement.
/// The initial estimate is the mean of the first row's three sensor
/// triples and the initial covariance is the identity.
pub fn filter_dataset(
    dataset: &Dataset,
    config: &KalmanConfig,
) -> Result<FilteredDataset, FusionError> {
    config.validate()?;
    if config.measurement_dim() != 9 {
        return Err(FusionError::InvalidConfig {
            message: "dataset filtering needs a nine-channel observation model".into(),
        });
    }
    let first = dataset.rows().first().ok_or(FusionError::EmptyDataset)?;
    let mut estimate = [0.0; 3];
    for (axis, slot) in estimate.iter_mut().enumerate() {
        *slot = (first.accel[axis] + first.gyro[axis] + first.mag[axis]) / 3.0;
    }
    let mut state = KalmanState::with_unit_covariance(estimate);
    let mut filtered = Vec::with_capacity(dataset.len());
    for row in dataset.rows() {
        state = kalman_predict(&state, config)?;
        state = kalman_update(&state, &row.channels(), config)?;
        filtered.push(state.estimate);
    }
    Ok(FilteredDataset {
        dataset: dataset.clone(),
        filtered,
    })
}
