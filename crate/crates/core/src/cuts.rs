//! Lipschitz cuts, cut pools and the three cut families.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::milp::SolverOptions;
use crate::stage::{lagrangian_value, solve_stage, Site, StageTemplate};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CutFamily {
    #[serde(rename = "rn")]
    ReverseNorm,
    #[serde(rename = "sb")]
    StrengthenedBenders,
    #[serde(rename = "sab")]
    StrengthenedAugBenders,
}

impl CutFamily {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::ReverseNorm => "rn",
            Self::StrengthenedBenders => "sb",
            Self::StrengthenedAugBenders => "sab",
        }
    }
}

impl std::str::FromStr for CutFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rn" => Ok(Self::ReverseNorm),
            "sb" => Ok(Self::StrengthenedBenders),
            "sab" => Ok(Self::StrengthenedAugBenders),
            _ => Err(Error::InvalidConfig(format!("unknown cut family '{s}'"))),
        }
    }
}

/// Where a cut came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub family: CutFamily,
    /// Node id or stage number the cut was generated for.
    pub owner: usize,
    pub iteration: usize,
}

/// `x -> intercept + slope . (x - center) - rho * |x - center|_1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cut {
    pub center: Vec<f64>,
    pub intercept: f64,
    pub slope: Vec<f64>,
    pub rho: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
}

impl Cut {
    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        let mut value = self.intercept;
        let mut dist = 0.0;
        for ((xi, ci), li) in x.iter().zip(&self.center).zip(&self.slope) {
            value += li * (xi - ci);
            dist += (xi - ci).abs();
        }
        value - self.rho * dist
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = Some(provenance);
        self
    }

    /// True when `self` lies pointwise below `other` for sharing a center,
    /// slope, and having no larger intercept and no smaller opening.
    pub fn dominated_by(&self, other: &Cut) -> bool {
        self.center == other.center
            && self.slope == other.slope
            && self.intercept <= other.intercept
            && self.rho >= other.rho
    }
}

/// Owner of a cut pool: a tree node or a whole stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PoolOwner {
    Node(usize),
    Stage(usize),
}

/// Append-only cut collection approximating an expected cost-to-go function
/// from below, never lower than `floor`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutPool {
    pub owner: PoolOwner,
    pub floor: f64,
    pub cuts: Vec<Cut>,
}

impl CutPool {
    pub fn new(owner: PoolOwner, floor: f64) -> Self {
        Self {
            owner,
            floor,
            cuts: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.cuts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cuts.is_empty()
    }

    /// `max(floor, max over cuts)` at `x`.
    pub fn value(&self, x: &[f64]) -> f64 {
        self.cuts
            .iter()
            .map(|c| c.evaluate(x))
            .fold(self.floor, f64::max)
    }

    pub fn push(&mut self, cut: Cut) {
        self.cuts.push(cut);
    }

    /// Appends `cut` unless an existing cut already dominates it; returns
    /// whether it was added.
    pub fn push_unless_dominated(&mut self, cut: Cut) -> bool {
        if self.cuts.iter().any(|c| cut.dominated_by(c)) {
            return false;
        }
        self.cuts.push(cut);
        true
    }
}

/// Reverse-norm cut from `(probability, successor value at center)` pairs.
pub fn reverse_norm_cut(successor_values: &[(f64, f64)], center: &[f64], rho: f64) -> Cut {
    let intercept = successor_values.iter().map(|(q, v)| q * v).sum();
    Cut {
        center: center.to_vec(),
        intercept,
        slope: vec![0.0; center.len()],
        rho,
        provenance: None,
    }
}

/// Strengthened Benders cut for one successor: slope from the copy-row
/// duals of the stage LP with integers fixed, intercept from the
/// copy-relaxed MILP.
pub fn strengthened_benders_cut(
    template: &StageTemplate,
    payload: usize,
    pool: &CutPool,
    center: &[f64],
    opts: &SolverOptions,
) -> Result<Cut> {
    let sol = solve_stage(template, payload, center, pool, true, Site::default(), opts)?;
    let slope = sol.copy_duals.expect("duals requested");
    strengthened_aug_benders_cut(template, payload, pool, center, &slope, 0.0, opts)
}

/// Cut with the given slope and opening whose intercept is the optimal value
/// of the copy-relaxed stage MILP penalized by `slope` and `rho`.
pub fn strengthened_aug_benders_cut(
    template: &StageTemplate,
    payload: usize,
    pool: &CutPool,
    center: &[f64],
    slope: &[f64],
    rho: f64,
    opts: &SolverOptions,
) -> Result<Cut> {
    let intercept = lagrangian_value(template, payload, center, pool, slope, rho, Site::default(), opts)?;
    Ok(Cut {
        center: center.to_vec(),
        intercept,
        slope: slope.to_vec(),
        rho,
        provenance: None,
    })
}

/// Probability-weighted combination of cuts sharing a center.
pub fn aggregate(cuts: &[(f64, Cut)]) -> Result<Cut> {
    let (_, first) = cuts.first().ok_or(Error::CenterMismatch)?;
    let d = first.dim();
    let mut out = Cut {
        center: first.center.clone(),
        intercept: 0.0,
        slope: vec![0.0; d],
        rho: 0.0,
        provenance: None,
    };
    for (q, c) in cuts {
        if c.center != first.center || c.slope.len() != d {
            return Err(Error::CenterMismatch);
        }
        out.intercept += q * c.intercept;
        out.rho += q * c.rho;
        for (s, l) in out.slope.iter_mut().zip(&c.slope) {
            *s += q * l;
        }
    }
    Ok(out)
}

/// Geometric opening schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RhoSchedule {
    pub rho0: f64,
    pub gamma: f64,
    pub period: usize,
    pub rho_max: f64,
}

impl Default for RhoSchedule {
    fn default() -> Self {
        Self {
            rho0: 1.0,
            gamma: 2.0,
            period: 10,
            rho_max: 1e3,
        }
    }
}

/// `min(rho0 * gamma^floor(k / period), rho_max)`.
pub fn rho_schedule(k: usize, cfg: &RhoSchedule) -> f64 {
    let steps = k / cfg.period.max(1);
    let value = cfg.rho0 * cfg.gamma.powi(steps.min(i32::MAX as usize) as i32);
    if value.is_finite() {
        value.min(cfg.rho_max)
    } else {
        cfg.rho_max
    }
}

/// Smallest opening that makes the reverse-norm cut tight at `center` lie
/// below every sampled `(x, g(x))`.
pub fn minimal_valid_rho(center: &[f64], center_value: f64, samples: &[(Vec<f64>, f64)]) -> f64 {
    samples
        .iter()
        .filter_map(|(x, g)| {
            let dist: f64 = x.iter().zip(center).map(|(a, b)| (a - b).abs()).sum();
            (dist > 0.0).then(|| (center_value - g) / dist)
        })
        .fold(0.0, f64::max)
}
