//! Simulated detector clicks and plug-in estimates of `P` and `V`.

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::fourier::FourierFamily;
use crate::knowledge::Measure;
use crate::random::rng_from_seed;
use crate::state::DensityMatrix;

/// Resamples used for the bootstrap standard errors.
pub const BOOTSTRAP_RESAMPLES: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClickMode {
    /// Detectors look at the paths directly.
    Particle,
    /// A Fourier matrix sits in front of the detectors.
    Wave,
}

impl fmt::Display for ClickMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClickMode::Particle => "particle",
            ClickMode::Wave => "wave",
        })
    }
}

impl FromStr for ClickMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "particle" => Ok(ClickMode::Particle),
            "wave" => Ok(ClickMode::Wave),
            _ => Err(Error::BadParameter(format!("unknown click mode '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClickRecord {
    pub mode: ClickMode,
    pub fourier: Option<FourierFamily>,
    pub counts: Vec<u64>,
    pub shots: u64,
}

impl ClickRecord {
    pub fn n(&self) -> usize {
        self.counts.len()
    }

    pub fn frequencies(&self) -> Vec<f64> {
        let total = self.shots as f64;
        self.counts.iter().map(|&c| c as f64 / total).collect()
    }

    pub fn csv_header(n: usize) -> Vec<String> {
        let mut h = vec!["mode".to_string(), "shots".to_string()];
        h.extend((1..=n).map(|k| format!("count_{k}")));
        h.push("fourier_json".into());
        h
    }

    fn csv_row(&self) -> Vec<String> {
        let mut r = vec![self.mode.to_string(), self.shots.to_string()];
        r.extend(self.counts.iter().map(u64::to_string));
        r.push(self.fourier.as_ref().map(FourierFamily::to_json).unwrap_or_default());
        r
    }
}

/// Writes records that share one `n` as CSV.
pub fn write_records_csv<W: Write>(records: &[ClickRecord], out: W) -> Result<()> {
    let n = records.first().map_or(0, ClickRecord::n);
    if let Some(bad) = records.iter().find(|r| r.n() != n) {
        return Err(Error::DimensionMismatch { left: n, right: bad.n() });
    }
    let io = |e: csv::Error| Error::BadParameter(format!("csv output failed: {e}"));
    let mut w = csv::Writer::from_writer(out);
    w.write_record(ClickRecord::csv_header(n)).map_err(io)?;
    for r in records {
        w.write_record(r.csv_row()).map_err(io)?;
    }
    w.flush().map_err(|e| Error::BadParameter(format!("csv output failed: {e}")))?;
    Ok(())
}

pub fn read_records_csv(text: &str) -> Result<Vec<ClickRecord>> {
    let bad = |msg: String| Error::BadParameter(format!("click csv: {msg}"));
    let mut rd = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let headers = rd.headers().map_err(|e| bad(e.to_string()))?.clone();
    let n = headers.len().checked_sub(3).ok_or_else(|| bad("too few columns".into()))?;
    let mut out = Vec::new();
    for row in rd.records() {
        let row = row.map_err(|e| bad(e.to_string()))?;
        let mode: ClickMode = row[0].parse()?;
        let shots: u64 = row[1].parse().map_err(|_| bad(format!("shots '{}'", &row[1])))?;
        let counts = (0..n)
            .map(|k| row[2 + k].parse::<u64>().map_err(|_| bad(format!("count '{}'", &row[2 + k]))))
            .collect::<Result<Vec<_>>>()?;
        if counts.iter().sum::<u64>() != shots {
            return Err(bad("counts do not sum to shots".into()));
        }
        let fourier = match &row[2 + n] {
            "" => None,
            s => Some(FourierFamily::from_json(s)?),
        };
        out.push(ClickRecord { mode, fourier, counts, shots });
    }
    Ok(out)
}

/// Multinomial draw by conditional binomials.
fn multinomial<R: Rng + ?Sized>(shots: u64, probs: &[f64], rng: &mut R) -> Vec<u64> {
    let mut left = shots;
    let mut mass = 1.0;
    let mut counts = Vec::with_capacity(probs.len());
    for (k, &p) in probs.iter().enumerate() {
        let c = if k + 1 == probs.len() || left == 0 {
            left
        } else {
            let q = if mass > 0.0 { (p.max(0.0) / mass).clamp(0.0, 1.0) } else { 0.0 };
            Binomial::new(left, q).expect("probability in [0, 1]").sample(rng)
        };
        counts.push(c);
        left -= c;
        mass -= p.max(0.0);
    }
    counts
}

fn check_shots(shots: u64) -> Result<()> {
    if shots == 0 {
        return Err(Error::BadParameter("shots must be at least 1".into()));
    }
    Ok(())
}

pub fn sample_particle_mode(rho: &DensityMatrix, shots: u64, seed: u64) -> Result<ClickRecord> {
    check_shots(shots)?;
    let counts = multinomial(shots, &rho.diagonal_probs(), &mut rng_from_seed(seed));
    Ok(ClickRecord {
        mode: ClickMode::Particle,
        fourier: None,
        counts,
        shots,
    })
}

pub fn sample_wave_mode(rho: &DensityMatrix, fourier: &FourierFamily, shots: u64, seed: u64) -> Result<ClickRecord> {
    check_shots(shots)?;
    if fourier.n != rho.n() {
        return Err(Error::DimensionMismatch { left: rho.n(), right: fourier.n });
    }
    let probs = fourier.matrix()?.detector_probs(rho)?;
    Ok(ClickRecord {
        mode: ClickMode::Wave,
        fourier: Some(fourier.clone()),
        counts: multinomial(shots, &probs, &mut rng_from_seed(seed)),
        shots,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PvEstimate {
    pub p: f64,
    pub v: f64,
    pub p_stderr: f64,
    pub v_stderr: f64,
    /// Index of the wave run that gave `v`.
    pub best_run: usize,
}

fn std_dev(xs: &[f64]) -> f64 {
    let m = xs.iter().sum::<f64>() / xs.len() as f64;
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

/// Plug-in `P` from the particle run and the best `V` over the wave runs,
/// with bootstrap standard errors.
pub fn estimate_pv(measure: &Measure, particle: &ClickRecord, wave_runs: &[ClickRecord], seed: u64) -> Result<PvEstimate> {
    if wave_runs.is_empty() {
        return Err(Error::EmptyRuns);
    }
    if particle.mode != ClickMode::Particle {
        return Err(Error::BadParameter("first record must be a particle-mode run".into()));
    }
    let n = particle.n();
    for r in wave_runs {
        if r.n() != n {
            return Err(Error::DimensionMismatch { left: n, right: r.n() });
        }
        if r.mode != ClickMode::Wave {
            return Err(Error::BadParameter("wave runs must be wave-mode records".into()));
        }
    }
    for r in std::iter::once(particle).chain(wave_runs) {
        check_shots(r.shots)?;
    }
    let prepared = measure.prepare(n)?;
    let eval = |counts: &[u64], shots: u64| -> f64 {
        let mut f: Vec<f64> = counts.iter().map(|&c| c as f64 / shots as f64).collect();
        prepared.eval(&mut f)
    };
    let best = |runs: &mut dyn Iterator<Item = f64>| -> (usize, f64) {
        runs.enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc })
    };
    let p = eval(&particle.counts, particle.shots);
    let (best_run, v) = best(&mut wave_runs.iter().map(|r| eval(&r.counts, r.shots)));

    let mut rng = rng_from_seed(seed);
    let mut ps = Vec::with_capacity(BOOTSTRAP_RESAMPLES);
    let mut vs = Vec::with_capacity(BOOTSTRAP_RESAMPLES);
    for _ in 0..BOOTSTRAP_RESAMPLES {
        let resample = |r: &ClickRecord, rng: &mut crate::random::SeededRng| multinomial(r.shots, &r.frequencies(), rng);
        ps.push(eval(&resample(particle, &mut rng), particle.shots));
        let vals: Vec<f64> = wave_runs.iter().map(|r| eval(&resample(r, &mut rng), r.shots)).collect();
        vs.push(best(&mut vals.into_iter()).1);
    }
    Ok(PvEstimate {
        p,
        v,
        p_stderr: std_dev(&ps),
        v_stderr: std_dev(&vs),
        best_run,
    })
}
