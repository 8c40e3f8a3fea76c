//! Seeded property suites and their JSON-lines report.

mod checks;
pub mod random;

use std::collections::BTreeMap;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diffeo::CircleDiffeo;
use crate::error::{Error, Result};
use crate::settings::Settings;
use crate::virasoro::{self, CocycleKind, VirasoroCovector, VirasoroElement};

pub use checks::{catalogue, CheckDef};

pub const PRNG_NAME: &str = "ChaCha8";

pub const SUITES: [&str; 7] = [
    "core_fn", "density", "virasoro", "sturm", "superalg", "extalg", "agd",
];

/// Deliberate formula corruptions, used to show the suites constrain the implementation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mutation {
    /// Negate the central charge in the `c X'''` term of the coadjoint action
    /// and in the matching `c S(f)` term of the group action.
    FlipCentralSign,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    pub seed: u64,
    pub degree_cap: usize,
    pub rk4_steps: usize,
    pub tolerances: BTreeMap<String, f64>,
    pub suites: Vec<String>,
    pub mutation: Option<Mutation>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 20240917,
            degree_cap: Settings::default().degree_cap,
            rk4_steps: 4096,
            tolerances: BTreeMap::new(),
            suites: SUITES.iter().map(|s| s.to_string()).collect(),
            mutation: None,
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        for s in &self.suites {
            if !SUITES.contains(&s.as_str()) {
                return Err(Error::Config(format!("unknown suite `{s}`")));
            }
        }
        let known = catalogue();
        for (name, tol) in &self.tolerances {
            if !known.iter().any(|c| c.name == name) {
                return Err(Error::Config(format!("tolerance for unknown check `{name}`")));
            }
            if !(tol.is_finite() && *tol > 0.0) {
                return Err(Error::Config(format!("tolerance for `{name}` must be positive")));
            }
        }
        if self.degree_cap < 8 {
            return Err(Error::Config("degree_cap must be at least 8".into()));
        }
        if self.rk4_steps == 0 {
            return Err(Error::Config("rk4_steps must be positive".into()));
        }
        Ok(())
    }

    pub fn settings(&self) -> Settings {
        Settings {
            degree_cap: self.degree_cap,
            ..Settings::default()
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: SuiteConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// The coadjoint formulas under test, possibly mutated.
#[derive(Debug, Clone, Copy, Default)]
pub struct Formulas {
    pub mutation: Option<Mutation>,
}

impl Formulas {
    fn central(&self, c: f64) -> f64 {
        match self.mutation {
            Some(Mutation::FlipCentralSign) => -c,
            None => c,
        }
    }

    pub fn coad(&self, a: &VirasoroElement, mu: &VirasoroCovector, kind: CocycleKind) -> VirasoroCovector {
        virasoro::coad(a, &VirasoroCovector::new(mu.u.clone(), self.central(mu.c)), kind)
    }

    pub fn group_coad(
        &self,
        f: &CircleDiffeo,
        mu: &VirasoroCovector,
        kind: CocycleKind,
        cfg: &Settings,
    ) -> Result<VirasoroCovector> {
        let shifted = VirasoroCovector::new(mu.u.clone(), self.central(mu.c));
        let moved = virasoro::group_coad(f, &shifted, kind, cfg)?;
        Ok(VirasoroCovector::new(moved.u, mu.c))
    }
}

/// Everything a check may use: its own generator, numerical settings and the formulas.
pub struct Ctx {
    pub rng: ChaCha8Rng,
    pub settings: Settings,
    pub rk4_steps: usize,
    pub formulas: Formulas,
}

/// Outcome of a check body: the largest residual and an optional remark.
#[derive(Debug, Clone)]
pub struct Measured {
    pub residual: f64,
    pub note: Option<String>,
}

impl Measured {
    pub fn new(residual: f64) -> Self {
        Measured { residual, note: None }
    }

    pub fn with_note(residual: f64, note: impl Into<String>) -> Self {
        Measured {
            residual,
            note: Some(note.into()),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CheckRecord {
    pub suite: String,
    pub check: String,
    pub formula: String,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub wall_time: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportHeader {
    pub prng: String,
    pub seed: u64,
    pub degree_cap: usize,
    pub rk4_steps: usize,
    pub mutation: Option<Mutation>,
    pub checks: usize,
}

#[derive(Debug, Clone)]
pub struct Report {
    pub header: ReportHeader,
    pub records: Vec<CheckRecord>,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.records.iter().all(|r| r.pass)
    }

    pub fn record(&self, check: &str) -> Option<&CheckRecord> {
        self.records.iter().find(|r| r.check == check)
    }

    /// Header line followed by one line per check.
    pub fn to_json_lines(&self) -> String {
        let mut out = serde_json::to_string(&self.header).expect("serializable header");
        out.push('\n');
        for r in &self.records {
            out.push_str(&serde_json::to_string(r).expect("serializable record"));
            out.push('\n');
        }
        out
    }
}

/// 64-bit FNV-1a, used to give each check its own generator stream.
fn stream_id(name: &str) -> u64 {
    name.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0100_0000_01b3)
    })
}

pub fn run_suites(cfg: &SuiteConfig) -> Result<Report> {
    cfg.validate()?;
    let selected: Vec<CheckDef> = catalogue()
        .into_iter()
        .filter(|c| cfg.suites.iter().any(|s| s == c.suite))
        .collect();
    let formulas = Formulas {
        mutation: cfg.mutation,
    };
    let records = selected
        .par_iter()
        .map(|def| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(stream_id(def.name));
            let mut ctx = Ctx {
                rng,
                settings: cfg.settings(),
                rk4_steps: cfg.rk4_steps,
                formulas,
            };
            let tolerance = cfg.tolerances.get(def.name).copied().unwrap_or(def.tolerance);
            let start = Instant::now();
            let measured = match (def.run)(&mut ctx) {
                Ok(m) => m,
                Err(e) => Measured::with_note(f64::INFINITY, format!("error: {e}")),
            };
            let residual = if measured.residual.is_nan() {
                f64::INFINITY
            } else {
                measured.residual
            };
            CheckRecord {
                suite: def.suite.to_string(),
                check: def.name.to_string(),
                formula: def.formula.to_string(),
                max_residual: residual,
                tolerance,
                pass: residual <= tolerance,
                wall_time: start.elapsed().as_secs_f64(),
                note: measured.note,
            }
        })
        .collect::<Vec<_>>();
    Ok(Report {
        header: ReportHeader {
            prng: PRNG_NAME.to_string(),
            seed: cfg.seed,
            degree_cap: cfg.degree_cap,
            rk4_steps: cfg.rk4_steps,
            mutation: cfg.mutation,
            checks: records.len(),
        },
        records,
    })
}
