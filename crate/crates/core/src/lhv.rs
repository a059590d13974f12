//! Local hidden variable models as finite, explicit objects.
//!
//! A model is a pmf over hidden states `lambda` plus two response tables,
//! one per side, giving the deterministic +-1 outcome for each analyzer
//! setting and hidden state. The A table has no axis for the B setting (and
//! vice versa), so locality holds by construction.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::angle::Angle;
use crate::error::{Error, Result};

/// Slack allowed on the pmf normalization.
pub const PMF_TOL: f64 = 1e-12;
/// Classical CHSH bound.
pub const CLASSICAL_BOUND: f64 = 2.0;

/// The four analyzer orientations of a CHSH experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChshSettings {
    #[serde(rename = "theta_a_deg")]
    pub theta_a: Angle,
    #[serde(rename = "theta_a_prime_deg")]
    pub theta_a_prime: Angle,
    #[serde(rename = "theta_b_deg")]
    pub theta_b: Angle,
    #[serde(rename = "theta_b_prime_deg")]
    pub theta_b_prime: Angle,
}

impl ChshSettings {
    pub fn from_degrees(a: f64, a_prime: f64, b: f64, b_prime: f64) -> Result<Self> {
        let s = ChshSettings {
            theta_a: Angle::from_degrees(a),
            theta_a_prime: Angle::from_degrees(a_prime),
            theta_b: Angle::from_degrees(b),
            theta_b_prime: Angle::from_degrees(b_prime),
        };
        if [a, a_prime, b, b_prime].iter().all(|x| x.is_finite()) {
            Ok(s)
        } else {
            Err(Error::Domain("CHSH angles must be finite".into()))
        }
    }

    /// theta_A = 0, theta_A' = 90, theta_B = 45, theta_B' = -45 degrees.
    pub fn maximal_violation() -> Self {
        Self::from_degrees(0.0, 90.0, 45.0, -45.0).expect("finite")
    }
}

/// Which table rows play the roles of a, a', b, b'.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChshPairing {
    pub a: usize,
    pub a_prime: usize,
    pub b: usize,
    pub b_prime: usize,
}

impl Default for ChshPairing {
    fn default() -> Self {
        ChshPairing { a: 0, a_prime: 1, b: 0, b_prime: 1 }
    }
}

/// On-disk form of an [`LhvModel`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LhvModelFile {
    pub lambdas: Vec<String>,
    pub pmf: Vec<f64>,
    pub settings_a_deg: Vec<Angle>,
    pub settings_b_deg: Vec<Angle>,
    pub response_a: Vec<Vec<i8>>,
    pub response_b: Vec<Vec<i8>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LhvModelFile", into = "LhvModelFile")]
pub struct LhvModel {
    lambdas: Vec<String>,
    pmf: Vec<f64>,
    settings_a: Vec<Angle>,
    settings_b: Vec<Angle>,
    response_a: Vec<Vec<i8>>,
    response_b: Vec<Vec<i8>>,
}

fn check_table(name: &str, table: &[Vec<i8>], n_settings: usize, n_lambdas: usize) -> Result<()> {
    if table.len() != n_settings {
        return Err(Error::InvalidModel(format!(
            "{name} has {} rows for {n_settings} settings",
            table.len()
        )));
    }
    for (s, row) in table.iter().enumerate() {
        if row.len() != n_lambdas {
            return Err(Error::InvalidModel(format!(
                "{name}[{s}] has {} entries for {n_lambdas} lambdas",
                row.len()
            )));
        }
        if let Some(l) = row.iter().position(|&v| v != 1 && v != -1) {
            return Err(Error::InvalidModel(format!(
                "{name}[{s}][{l}] = {} is not +1 or -1",
                row[l]
            )));
        }
    }
    Ok(())
}

impl LhvModel {
    /// `response_a[s][l]` is the A outcome at setting `s` for hidden state `l`.
    pub fn new(
        lambdas: Vec<String>,
        pmf: Vec<f64>,
        settings_a: Vec<Angle>,
        settings_b: Vec<Angle>,
        response_a: Vec<Vec<i8>>,
        response_b: Vec<Vec<i8>>,
    ) -> Result<Self> {
        if lambdas.is_empty() {
            return Err(Error::InvalidModel("no hidden states".into()));
        }
        if pmf.len() != lambdas.len() {
            return Err(Error::InvalidModel(format!(
                "pmf has {} entries for {} lambdas",
                pmf.len(),
                lambdas.len()
            )));
        }
        if let Some(i) = pmf.iter().position(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::InvalidModel(format!("pmf[{i}] = {} is not a probability", pmf[i])));
        }
        let total: f64 = pmf.iter().sum();
        if (total - 1.0).abs() > PMF_TOL {
            return Err(Error::InvalidModel(format!("pmf sums to {total}, not 1")));
        }
        if settings_a.is_empty() || settings_b.is_empty() {
            return Err(Error::InvalidModel("each side needs at least one setting".into()));
        }
        if settings_a.iter().chain(&settings_b).any(|a| !a.is_finite()) {
            return Err(Error::InvalidModel("settings must be finite".into()));
        }
        check_table("response_a", &response_a, settings_a.len(), lambdas.len())?;
        check_table("response_b", &response_b, settings_b.len(), lambdas.len())?;
        Ok(Self { lambdas, pmf, settings_a, settings_b, response_a, response_b })
    }

    /// One hidden state with the given outcome per setting.
    pub fn deterministic(
        settings_a: Vec<Angle>,
        settings_b: Vec<Angle>,
        outcomes_a: &[i8],
        outcomes_b: &[i8],
    ) -> Result<Self> {
        Self::new(
            vec!["lambda_0".into()],
            vec![1.0],
            settings_a,
            settings_b,
            outcomes_a.iter().map(|&v| vec![v]).collect(),
            outcomes_b.iter().map(|&v| vec![v]).collect(),
        )
    }

    pub fn lambdas(&self) -> &[String] {
        &self.lambdas
    }

    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    pub fn settings_a(&self) -> &[Angle] {
        &self.settings_a
    }

    pub fn settings_b(&self) -> &[Angle] {
        &self.settings_b
    }

    pub fn response_a(&self, setting: usize, lambda: usize) -> i8 {
        self.response_a[setting][lambda]
    }

    pub fn response_b(&self, setting: usize, lambda: usize) -> i8 {
        self.response_b[setting][lambda]
    }

    fn check_a(&self, index: usize) -> Result<()> {
        if index >= self.settings_a.len() {
            return Err(Error::IndexOutOfRange { what: "A setting", index, len: self.settings_a.len() });
        }
        Ok(())
    }

    fn check_b(&self, index: usize) -> Result<()> {
        if index >= self.settings_b.len() {
            return Err(Error::IndexOutOfRange { what: "B setting", index, len: self.settings_b.len() });
        }
        Ok(())
    }

    fn check_pairing(&self, p: ChshPairing) -> Result<()> {
        self.check_a(p.a)?;
        self.check_a(p.a_prime)?;
        self.check_b(p.b)?;
        self.check_b(p.b_prime)
    }
}

impl TryFrom<LhvModelFile> for LhvModel {
    type Error = Error;
    fn try_from(f: LhvModelFile) -> Result<Self> {
        LhvModel::new(f.lambdas, f.pmf, f.settings_a_deg, f.settings_b_deg, f.response_a, f.response_b)
    }
}

impl From<LhvModel> for LhvModelFile {
    fn from(m: LhvModel) -> Self {
        LhvModelFile {
            lambdas: m.lambdas,
            pmf: m.pmf,
            settings_a_deg: m.settings_a,
            settings_b_deg: m.settings_b,
            response_a: m.response_a,
            response_b: m.response_b,
        }
    }
}

/// `<ab> = sum_lambda pmf(lambda) a(lambda) b(lambda)`
pub fn correlation_exact(model: &LhvModel, a_idx: usize, b_idx: usize) -> Result<f64> {
    model.check_a(a_idx)?;
    model.check_b(b_idx)?;
    let ra = &model.response_a[a_idx];
    let rb = &model.response_b[b_idx];
    Ok(model
        .pmf
        .iter()
        .zip(ra.iter().zip(rb))
        .map(|(p, (&a, &b))| p * f64::from(a * b))
        .sum())
}

/// `S = <ab> + <ab'> + <a'b> - <a'b'>`
pub fn chsh_exact(model: &LhvModel, pairing: ChshPairing) -> Result<f64> {
    model.check_pairing(pairing)?;
    let c = |a, b| correlation_exact(model, a, b);
    Ok(c(pairing.a, pairing.b)? + c(pairing.a, pairing.b_prime)? + c(pairing.a_prime, pairing.b)?
        - c(pairing.a_prime, pairing.b_prime)?)
}

/// `ab + ab' + a'b - a'b'` for a single hidden state; always +-2.
pub fn identity_check(model: &LhvModel, lambda: usize, pairing: ChshPairing) -> Result<i32> {
    model.check_pairing(pairing)?;
    if lambda >= model.lambdas.len() {
        return Err(Error::IndexOutOfRange { what: "lambda", index: lambda, len: model.lambdas.len() });
    }
    let a = i32::from(model.response_a(pairing.a, lambda));
    let a2 = i32::from(model.response_a(pairing.a_prime, lambda));
    let b = i32::from(model.response_b(pairing.b, lambda));
    let b2 = i32::from(model.response_b(pairing.b_prime, lambda));
    let value = a * b + a * b2 + a2 * b - a2 * b2;
    if value.abs() != 2 {
        return Err(Error::Internal(format!("CHSH identity gave {value} at lambda {lambda}")));
    }
    Ok(value)
}

/// Draws hidden states from a model's pmf.
#[derive(Debug, Clone)]
pub struct LhvSampler<'m> {
    model: &'m LhvModel,
    lambda_dist: WeightedIndex<f64>,
}

impl<'m> LhvSampler<'m> {
    pub fn new(model: &'m LhvModel) -> Result<Self> {
        let lambda_dist = WeightedIndex::new(&model.pmf)
            .map_err(|e| Error::InvalidModel(format!("pmf cannot be sampled: {e}")))?;
        Ok(Self { model, lambda_dist })
    }

    pub fn sample_lambda<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.lambda_dist.sample(rng)
    }

    /// One trial at fixed settings: draw lambda, read both tables.
    pub fn trial<R: Rng + ?Sized>(&self, a_idx: usize, b_idx: usize, rng: &mut R) -> Result<(i8, i8)> {
        self.model.check_a(a_idx)?;
        self.model.check_b(b_idx)?;
        let l = self.sample_lambda(rng);
        Ok((self.model.response_a(a_idx, l), self.model.response_b(b_idx, l)))
    }
}

pub fn sample_trial<R: Rng + ?Sized>(
    model: &LhvModel,
    a_idx: usize,
    b_idx: usize,
    rng: &mut R,
) -> Result<(i8, i8)> {
    LhvSampler::new(model)?.trial(a_idx, b_idx, rng)
}

/// Random model on the two-settings-per-side layout of `settings`:
/// pmf from normalized uniform draws, fair independent +-1 tables.
pub fn random_model<R: Rng + ?Sized>(n_lambdas: usize, settings: ChshSettings, rng: &mut R) -> Result<LhvModel> {
    if n_lambdas == 0 {
        return Err(Error::Domain("a model needs at least one hidden state".into()));
    }
    // (0, 1] keeps every weight positive
    let weights: Vec<f64> = (0..n_lambdas).map(|_| 1.0 - rng.random::<f64>()).collect();
    let total: f64 = weights.iter().sum();
    let pmf = weights.iter().map(|w| w / total).collect();
    let mut table = |rows: usize| -> Vec<Vec<i8>> {
        (0..rows)
            .map(|_| (0..n_lambdas).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect())
            .collect()
    };
    let response_a = table(2);
    let response_b = table(2);
    LhvModel::new(
        (0..n_lambdas).map(|i| format!("lambda_{i}")).collect(),
        pmf,
        vec![settings.theta_a, settings.theta_a_prime],
        vec![settings.theta_b, settings.theta_b_prime],
        response_a,
        response_b,
    )
}
