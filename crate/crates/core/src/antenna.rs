//! Three-dimensional sector antenna model: separable horizontal and vertical
//! parabolic attenuation with a common clip at the maximum attenuation.
//! All angles in degrees, attenuations in dB (non-positive).

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AntennaPattern {
    /// Horizontal half-power beamwidth.
    pub theta_3db: f64,
    /// Vertical half-power beamwidth.
    pub phi_3db: f64,
    /// Maximum attenuation, positive dB.
    pub a_m: f64,
    /// Electrical downtilt.
    pub phi_tilt: f64,
    /// Boresight gain in dBi.
    pub g0: f64,
}

impl Default for AntennaPattern {
    fn default() -> Self {
        AntennaPattern {
            theta_3db: 70.0,
            phi_3db: 10.0,
            a_m: 20.0,
            phi_tilt: 8.0,
            g0: 18.0,
        }
    }
}

impl AntennaPattern {
    pub fn new(theta_3db: f64, phi_3db: f64, a_m: f64, phi_tilt: f64, g0: f64) -> Result<Self> {
        let positive = |name: &'static str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::invalid(name, format!("must be positive, got {v}")))
            }
        };
        positive("theta_3db", theta_3db)?;
        positive("phi_3db", phi_3db)?;
        positive("a_m", a_m)?;
        if !phi_tilt.is_finite() || !g0.is_finite() {
            return Err(Error::invalid("antenna", "tilt and gain must be finite"));
        }
        Ok(AntennaPattern {
            theta_3db,
            phi_3db,
            a_m,
            phi_tilt,
            g0,
        })
    }

    pub fn with_tilt(mut self, phi_tilt: f64) -> Self {
        self.phi_tilt = phi_tilt;
        self
    }

    pub fn horizontal_attenuation(&self, theta: f64) -> f64 {
        -(12.0 * (theta / self.theta_3db).powi(2)).min(self.a_m)
    }

    pub fn vertical_attenuation(&self, phi: f64) -> f64 {
        -(12.0 * ((phi - self.phi_tilt) / self.phi_3db).powi(2)).min(self.a_m)
    }

    pub fn combined_attenuation(&self, theta: f64, phi: f64) -> f64 {
        combine_attenuations(
            self.horizontal_attenuation(theta),
            self.vertical_attenuation(phi),
            self.a_m,
        )
    }

    /// Directional gain in dBi towards `(theta, phi)`.
    pub fn element_gain(&self, theta: f64, phi: f64) -> f64 {
        self.g0 + self.combined_attenuation(theta, phi)
    }
}

/// `-min(-(a_h + a_v), a_m)`
pub fn combine_attenuations(a_h: f64, a_v: f64, a_m: f64) -> f64 {
    -(-(a_h + a_v)).min(a_m)
}
