//! Characteristic numbers of the symplectic sphere bundle, the
//! Hitchin–Thorpe type gate and twistor degrees of immersed surfaces.

use num_rational::Ratio;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TwistorSign {
    Positive,
    Negative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TwistorInvariants {
    pub chi: i64,
    pub tau: i64,
    pub sign: TwistorSign,
    pub c1_cubed: i64,
    pub c1_c2: i64,
    pub c3: i64,
    pub c2_omega: i64,
    #[serde(serialize_with = "ratio_str")]
    pub k_cubed: Ratio<i64>,
}

fn ratio_str<S: Serializer>(r: &Ratio<i64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

pub fn chern_numbers(chi: i64, tau: i64, sign: TwistorSign) -> TwistorInvariants {
    let k_cubed = Ratio::new(2 * chi + 3 * tau, 4);
    let (c1_cubed, c1_c2, c2_omega) = match sign {
        TwistorSign::Positive => (16 * (2 * chi + 3 * tau), 12 * (chi + tau), 6 * (chi + tau)),
        TwistorSign::Negative => (0, 0, -2 * (chi + 3 * tau)),
    };
    TwistorInvariants {
        chi,
        tau,
        sign,
        c1_cubed,
        c1_c2,
        c3: 2 * chi,
        c2_omega,
        k_cubed,
    }
}

/// Negative-branch numbers for a complex-hyperbolic surface given its
/// complex-orientation signature; the relevant orientation is the reverse.
pub fn chern_numbers_complex_orientation(chi: i64, tau_complex: i64) -> TwistorInvariants {
    chern_numbers(chi, -tau_complex, TwistorSign::Negative)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DSign {
    Dpos,
    Dneg,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Gate {
    pub admissible: bool,
    pub reason: String,
}

pub fn hitchin_thorpe_gate(chi: i64, tau: i64, d_sign: DSign) -> Gate {
    let q = 2 * chi + 3 * tau;
    match d_sign {
        DSign::Dpos => Gate {
            admissible: q > 0,
            reason: format!("D > 0 requires 2chi + 3tau > 0; here 2chi + 3tau = {q}"),
        },
        DSign::Dneg => Gate {
            admissible: chi == 0 && tau < 0,
            reason: format!("D < 0 requires chi = 0 and tau < 0; here chi = {chi}, tau = {tau}"),
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurfaceData {
    pub euler: i64,
    pub self_intersection: i64,
    #[serde(default)]
    pub double_points: i64,
}

impl SurfaceData {
    pub fn new(euler: i64, self_intersection: i64, double_points: i64) -> Result<Self> {
        if euler % 2 != 0 {
            return Err(Error::InvalidInput(format!(
                "euler characteristic of a closed orientable surface is even, got {euler}"
            )));
        }
        if euler > 2 {
            return Err(Error::InvalidInput(format!("euler characteristic is at most 2, got {euler}")));
        }
        if double_points < 0 {
            return Err(Error::InvalidInput(format!("double_points must be >= 0, got {double_points}")));
        }
        Ok(Self {
            euler,
            self_intersection,
            double_points,
        })
    }

    pub fn sphere(self_intersection: i64) -> Self {
        Self::new(2, self_intersection, 0).unwrap()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TwistorDegree {
    pub degree: i64,
    pub adjunction_negative_ok: bool,
    pub adjunction_positive_ok: bool,
}

/// Immersed surfaces with transverse double points only; branch points are
/// not supported.
pub fn twistor_degree(surf: &SurfaceData) -> TwistorDegree {
    let degree = surf.euler + surf.self_intersection - 2 * surf.double_points;
    TwistorDegree {
        degree,
        adjunction_negative_ok: degree < 0,
        adjunction_positive_ok: degree > 0,
    }
}
