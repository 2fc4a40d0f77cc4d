//! Link model: Shannon capacity over a free-space path-loss channel.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Topology;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RadioParams {
    /// Channel bandwidth, Hz.
    pub bandwidth_hz: f64,
    /// Noise floor, dBm.
    pub noise_dbm: f64,
    /// Carrier frequency, Hz.
    pub carrier_hz: f64,
    /// Transmit power, dBm. Antenna gains are 0 dBi.
    pub tx_power_dbm: f64,
    /// Bits in one full, uncompressed frame.
    pub frame_bits: f64,
}

impl Default for RadioParams {
    fn default() -> Self {
        Self {
            bandwidth_hz: 20e6,
            noise_dbm: -70.0,
            carrier_hz: 2.4e9,
            tx_power_dbm: 10.0,
            // one 8-bit grayscale 720x480 frame
            frame_bits: 720.0 * 480.0 * 8.0,
        }
    }
}

impl RadioParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.bandwidth_hz > 0.0) {
            return Err(Error::Config("radio bandwidth must be positive".into()));
        }
        if !(self.frame_bits > 0.0) {
            return Err(Error::Config("frame_bits must be positive".into()));
        }
        if !self.carrier_hz.is_finite() || self.carrier_hz <= 0.0 {
            return Err(Error::Config("carrier frequency must be positive".into()));
        }
        Ok(())
    }

    /// Free-space path loss in dB at `distance_m` (Friis, isotropic antennas).
    pub fn free_space_path_loss_db(&self, distance_m: f64) -> f64 {
        20.0 * distance_m.log10() + 20.0 * self.carrier_hz.log10() - 147.55
    }

    pub fn snr_db(&self, distance_m: f64) -> f64 {
        self.tx_power_dbm - self.free_space_path_loss_db(distance_m) - self.noise_dbm
    }

    /// Shannon capacity in bit/s.
    pub fn capacity_bps(&self, distance_m: f64) -> f64 {
        let snr = 10f64.powf(self.snr_db(distance_m) / 10.0);
        self.bandwidth_hz * (1.0 + snr).log2()
    }
}

/// Transmission-time coefficients `C[s][n]`: seconds to send one whole frame
/// from sensor `s` to node `n` with the channel to itself.
pub fn channel_coefficients(topology: &Topology, radio: &RadioParams) -> Result<Vec<Vec<f64>>> {
    radio.validate()?;
    topology
        .distances()
        .into_iter()
        .enumerate()
        .map(|(s, row)| {
            row.into_iter()
                .enumerate()
                .map(|(n, d)| {
                    if !(d > 0.0) {
                        return Err(Error::InfeasibleLink {
                            sensor: s,
                            node: n,
                            reason: "zero distance".into(),
                        });
                    }
                    let cap = radio.capacity_bps(d);
                    let c = radio.frame_bits / cap;
                    if !(cap > 0.0) || !c.is_finite() {
                        return Err(Error::InfeasibleLink {
                            sensor: s,
                            node: n,
                            reason: format!("capacity {cap} bit/s"),
                        });
                    }
                    Ok(c)
                })
                .collect()
        })
        .collect()
}

/// Processing coefficients: every node gets `S * min C`.
pub fn processing_coefficients(transmission: &[Vec<f64>], sensor_count: usize) -> Result<Vec<f64>> {
    let min = transmission
        .iter()
        .flatten()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let nodes = transmission.first().map_or(0, Vec::len);
    if nodes == 0 || !(min > 0.0) || !min.is_finite() {
        return Err(Error::Config("transmission coefficients must be non-empty and positive".into()));
    }
    Ok(vec![sensor_count as f64 * min; nodes])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::topology::{build_topology, Position};

    #[test]
    fn fifty_meter_link_matches_hand_computation() {
        let r = RadioParams::default();
        let fspl = r.free_space_path_loss_db(50.0);
        // 20 log10(50) + 20 log10(2.4e9) - 147.55
        let hand = 20.0 * 50f64.log10() + 20.0 * 2.4e9f64.log10() - 147.55;
        assert!((fspl - hand).abs() < 1e-12);
        assert!((fspl - 74.0).abs() < 0.05);
        assert!((r.snr_db(50.0) - 6.0).abs() < 0.05);
        assert!((r.capacity_bps(50.0) / 1e6 - 46.1).abs() < 0.1);
    }

    #[test]
    fn equidistant_sensors_get_equal_coefficients() {
        let t = Topology::new(
            vec![Position::new(-10.0, 0.0), Position::new(10.0, 0.0)],
            vec![Position::new(0.0, 5.0)],
        )
        .unwrap();
        let c = channel_coefficients(&t, &RadioParams::default()).unwrap();
        assert_eq!(c[0][0], c[1][0]);
    }

    #[test]
    fn coefficients_are_linear_in_frame_bits() {
        let t = build_topology(2, 100.0).unwrap();
        let r = RadioParams::default();
        let r2 = RadioParams { frame_bits: 2.0 * r.frame_bits, ..r };
        let a = channel_coefficients(&t, &r).unwrap();
        let b = channel_coefficients(&t, &r2).unwrap();
        for (ra, rb) in a.iter().zip(&b) {
            for (x, y) in ra.iter().zip(rb) {
                assert!((2.0 * x - y).abs() <= 1e-12 * y);
            }
        }
    }

    #[test]
    fn farther_links_are_slower() {
        let r = RadioParams::default();
        let mut last = 0.0;
        for d in [1.0, 10.0, 50.0, 111.8, 250.0, 1000.0] {
            let c = r.frame_bits / r.capacity_bps(d);
            assert!(c > last);
            last = c;
        }
    }

    #[test]
    fn zero_distance_is_infeasible() {
        let t = Topology::new(vec![Position::new(0.0, 0.0)], vec![Position::new(0.0, 0.0)]).unwrap();
        assert!(matches!(
            channel_coefficients(&t, &RadioParams::default()),
            Err(Error::InfeasibleLink { .. })
        ));
    }

    #[test]
    fn processing_rule() {
        let c = vec![vec![0.05, 0.3], vec![0.1, 0.07], vec![0.2, 0.2], vec![0.4, 0.06]];
        let p = processing_coefficients(&c, 4).unwrap();
        assert_eq!(p.len(), 2);
        assert!(p.iter().all(|&x| (x - 0.2).abs() < 1e-15));
        let p1 = processing_coefficients(&[vec![0.05, 0.3]], 1).unwrap();
        assert_eq!(p1, vec![0.05, 0.05]);
        let scaled: Vec<Vec<f64>> = c.iter().map(|r| r.iter().map(|x| x * 3.0).collect()).collect();
        let p3 = processing_coefficients(&scaled, 4).unwrap();
        assert!((p3[0] - 3.0 * p[0]).abs() < 1e-15);
    }
}
