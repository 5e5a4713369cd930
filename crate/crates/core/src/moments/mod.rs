//! Second-order moments, the covariance matrix, and Gaussian entanglement
//! measures derived from a propagating function.

mod covariance;
mod record;
mod state;
mod steady;

pub use covariance::{logarithmic_negativity, purity, CovarianceMatrix, LAMBDA_TOLERANCE, PHYSICALITY_TOLERANCE};
pub use record::{
    detect_esd_esb, entanglement_records, steady_state_index, write_records_csv, EntanglementRecord, EsdInterval,
    DEFAULT_ESD_THRESHOLD, RECORDS_CSV_HEADER, STEADY_RELATIVE_CHANGE,
};
pub use state::{evolve_moments, initial_moments, MomentState};
pub use steady::steady_state_moments;
