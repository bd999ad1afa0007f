//! Template-matching authenticator standing in for a learned PPG model, plus
//! the spoof evaluation for random, victim-rPPG and mean-rPPG attacks.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{far_frr_eer, pearson_values, ScoreSet};
use crate::pulse::{CycleSet, CYCLE_LEN};
use crate::scalar::Real;
use crate::signal::normalize01_values;

pub const MIN_ENROLL_CYCLES: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceKind {
    /// `1 - pearson(cycle, template)`, in `[0, 2]`.
    #[default]
    Correlation,
    /// Root-mean-square difference.
    Euclidean,
}

impl DistanceKind {
    pub fn distance<T: Real>(self, cycle: &[T], template: &[T]) -> T {
        match self {
            // A flat cycle carries no shape: treat it as uncorrelated.
            DistanceKind::Correlation => T::one() - pearson_values(cycle, template).unwrap_or(T::zero()),
            DistanceKind::Euclidean => {
                let ss: T = cycle.iter().zip(template).map(|(&a, &b)| (a - b) * (a - b)).sum();
                (ss / T::from_usize_lossy(cycle.len())).sqrt()
            }
        }
    }
}

/// Enrolled user: mean beat shape and acceptance threshold on the distance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserTemplate<T> {
    pub schema: u32,
    pub user_id: String,
    pub template: Vec<T>,
    pub threshold: T,
    #[serde(default)]
    pub distance: DistanceKind,
}

impl<T: Real> UserTemplate<T> {
    pub fn new(user_id: impl Into<String>, template: Vec<T>, threshold: T, distance: DistanceKind) -> Result<Self> {
        if template.len() != CYCLE_LEN {
            return Err(Error::BadCycle(format!("template length {} != {CYCLE_LEN}", template.len())));
        }
        if template.iter().any(|v| !(*v >= T::zero() && *v <= T::one())) {
            return Err(Error::BadCycle("template leaves [0, 1]".into()));
        }
        if !(threshold > T::zero()) {
            return Err(Error::InvalidParameter(format!("threshold must be positive, got {threshold}")));
        }
        Ok(Self { schema: 1, user_id: user_id.into(), template, threshold, distance })
    }

    pub fn with_threshold(&self, threshold: T) -> Self {
        Self { threshold, ..self.clone() }
    }
}

/// Pointwise mean of the cycles, renormalised to `[0, 1]`.
pub fn mean_cycle<T: Real>(cycles: &CycleSet<T>) -> Result<Vec<T>> {
    mean_of(cycles.cycles().iter().map(Vec::as_slice), cycles.cycle_len())
}

fn mean_of<'a, T: Real>(cycles: impl Iterator<Item = &'a [T]>, len: usize) -> Result<Vec<T>> {
    let mut acc = vec![T::zero(); len];
    let mut n = 0usize;
    for c in cycles {
        for (a, &v) in acc.iter_mut().zip(c) {
            *a += v;
        }
        n += 1;
    }
    if n == 0 {
        return Err(Error::EmptyCycleSet);
    }
    let nf = T::from_usize_lossy(n);
    acc.iter_mut().for_each(|a| *a /= nf);
    Ok(normalize01_values(&acc))
}

/// Builds a template from enrollment cycles and picks its threshold from the
/// EER point of leave-one-out genuine distances against impostor distances.
///
/// The threshold is moved halfway to the next observed score above the EER
/// threshold, which leaves every observed accept/reject decision unchanged.
pub fn enroll<T: Real>(
    cycles: &CycleSet<T>,
    impostor_cycles: &CycleSet<T>,
    user_id: &str,
    distance: DistanceKind,
) -> Result<UserTemplate<T>> {
    for set in [cycles, impostor_cycles] {
        if set.len() < MIN_ENROLL_CYCLES {
            return Err(Error::TooFewCycles { needed: MIN_ENROLL_CYCLES, got: set.len() });
        }
        if set.cycle_len() != CYCLE_LEN {
            return Err(Error::BadCycle(format!("cycle length {} != {CYCLE_LEN}", set.cycle_len())));
        }
    }
    let template = mean_cycle(cycles)?;
    let all = cycles.cycles();
    let genuine: Vec<T> = (0..all.len())
        .map(|i| {
            let others = all.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, c)| c.as_slice());
            let loo = mean_of(others, CYCLE_LEN)?;
            Ok(distance.distance(&all[i], &loo))
        })
        .collect::<Result<_>>()?;
    let impostor: Vec<T> = impostor_cycles.cycles().iter().map(|c| distance.distance(c, &template)).collect();

    let eer = far_frr_eer(&ScoreSet { genuine: genuine.clone(), impostor: impostor.clone() })?;
    let next = genuine
        .iter()
        .chain(&impostor)
        .copied()
        .filter(|&s| s > eer.threshold)
        .reduce(T::min);
    let mut threshold = match next {
        Some(n) => (eer.threshold + n) / T::lit(2.0),
        None => eer.threshold,
    };
    if !(threshold > T::zero()) {
        threshold = T::epsilon();
    }
    UserTemplate::new(user_id, template, threshold, distance)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decision<T> {
    pub accept: bool,
    pub distance: T,
}

pub fn authenticate<T: Real>(cycle: &[T], template: &UserTemplate<T>) -> Result<Decision<T>> {
    if cycle.len() != CYCLE_LEN {
        return Err(Error::BadCycle(format!("cycle length {} != {CYCLE_LEN}", cycle.len())));
    }
    if cycle.iter().any(|v| !(*v >= T::zero() && *v <= T::one())) {
        return Err(Error::BadCycle("cycle leaves [0, 1]".into()));
    }
    let distance = template.distance.distance(cycle, &template.template);
    Ok(Decision { accept: distance <= template.threshold, distance })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttackKind {
    Random,
    VictimRppg,
    MeanRppg,
}

impl AttackKind {
    pub fn name(self) -> &'static str {
        match self {
            AttackKind::Random => "random",
            AttackKind::VictimRppg => "victim_rppg",
            AttackKind::MeanRppg => "mean_rppg",
        }
    }
}

impl fmt::Display for AttackKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AttackKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(AttackKind::Random),
            "victim_rppg" => Ok(AttackKind::VictimRppg),
            "mean_rppg" => Ok(AttackKind::MeanRppg),
            other => Err(Error::InvalidParameter(format!("unknown attack kind {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpoofReport {
    pub attack_kind: AttackKind,
    pub success_rate: f64,
    pub attempts: usize,
}

/// Fraction of attack cycles accepted. The mean-rPPG attack submits the single
/// mean cycle of `attack_cycles`.
pub fn spoof_eval<T: Real>(template: &UserTemplate<T>, attack_cycles: &CycleSet<T>, kind: AttackKind) -> Result<SpoofReport> {
    if attack_cycles.is_empty() {
        return Err(Error::EmptyCycleSet);
    }
    let attempts: Vec<Vec<T>> = match kind {
        AttackKind::MeanRppg => vec![mean_cycle(attack_cycles)?],
        AttackKind::Random | AttackKind::VictimRppg => attack_cycles.cycles().to_vec(),
    };
    let mut accepted = 0usize;
    for c in &attempts {
        if authenticate(c, template)?.accept {
            accepted += 1;
        }
    }
    Ok(SpoofReport {
        attack_kind: kind,
        success_rate: accepted as f64 / attempts.len() as f64,
        attempts: attempts.len(),
    })
}
