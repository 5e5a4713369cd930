use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::MomentsError;
use crate::propagator::PropagatorTrajectory;

use super::covariance::{logarithmic_negativity, purity, CovarianceMatrix};
use super::state::{evolve_moments, MomentState};

pub const DEFAULT_ESD_THRESHOLD: f64 = 1e-6;
/// Relative change below which moments count as stationary.
pub const STEADY_RELATIVE_CHANGE: f64 = 1e-6;

pub const RECORDS_CSV_HEADER: &str = "t,E_N,P,n11,n22,re_s11,im_s11,re_s22,im_s22,re_s12,im_s12,re_n12,im_n12,lambda";

/// Observables at one time sample.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntanglementRecord {
    pub t: f64,
    pub e_n: f64,
    pub purity: f64,
    pub n11: f64,
    pub n22: f64,
    /// Smallest symplectic eigenvalue of the partially transposed `χ`.
    pub lambda: f64,
    pub moments: MomentState,
}

impl EntanglementRecord {
    pub fn from_moments(t: f64, moments: MomentState) -> Result<Self, MomentsError> {
        let chi = CovarianceMatrix::from_moments(&moments)?;
        let (e_n, lambda) = logarithmic_negativity(&chi)?;
        let (n11, n22) = moments.populations();
        Ok(Self { t, e_n, purity: purity(&chi)?, n11, n22, lambda, moments })
    }
}

/// Evolves `m0` along `traj` and evaluates every sample.
pub fn entanglement_records(
    traj: &PropagatorTrajectory,
    m0: &MomentState,
) -> Result<Vec<EntanglementRecord>, MomentsError> {
    evolve_moments(traj, m0)
        .into_iter()
        .enumerate()
        .map(|(k, m)| EntanglementRecord::from_moments(traj.time(k), m))
        .collect()
}

pub fn write_records_csv(records: &[EntanglementRecord], mut out: impl Write) -> io::Result<()> {
    writeln!(out, "{RECORDS_CSV_HEADER}")?;
    for r in records {
        let (n, s) = (&r.moments.n, &r.moments.s);
        let values = [
            r.t,
            r.e_n,
            r.purity,
            r.n11,
            r.n22,
            s[(0, 0)].re,
            s[(0, 0)].im,
            s[(1, 1)].re,
            s[(1, 1)].im,
            s[(0, 1)].re,
            s[(0, 1)].im,
            n[(0, 1)].re,
            n[(0, 1)].im,
            r.lambda,
        ];
        let row: Vec<String> = values.iter().map(|v| format!("{v:.16e}")).collect();
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

/// A maximal run of samples with `E_N ≤ threshold` between entangled samples.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EsdInterval {
    /// First disentangled sample.
    pub death: f64,
    /// Last disentangled sample before revival.
    pub birth: f64,
}

/// Sudden-death / sudden-birth intervals in a uniformly sampled record.
pub fn detect_esd_esb(records: &[EntanglementRecord], threshold: f64) -> Vec<EsdInterval> {
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    let mut seen_entangled = false;
    for (k, r) in records.iter().enumerate() {
        if r.e_n > threshold {
            if let (Some(s), true) = (start, seen_entangled) {
                out.push(EsdInterval { death: records[s].t, birth: records[k - 1].t });
            }
            start = None;
            seen_entangled = true;
        } else if start.is_none() {
            start = Some(k);
        }
    }
    out
}

/// First sample from which the moments change by less than
/// [`STEADY_RELATIVE_CHANGE`] (relative to their largest entry) over `window`.
pub fn steady_state_index(records: &[EntanglementRecord], window: f64) -> Option<usize> {
    if records.len() < 2 {
        return None;
    }
    let dt = records[1].t - records[0].t;
    let lag = (window / dt).ceil().max(1.0) as usize;
    (lag..records.len()).find(|&k| {
        let (a, b) = (&records[k].moments, &records[k - lag].moments);
        let scale = a.n.max_abs().max(a.s.max_abs()).max(f64::MIN_POSITIVE);
        a.n.max_abs_diff(&b.n).max(a.s.max_abs_diff(&b.s)) < STEADY_RELATIVE_CHANGE * scale
    })
}
