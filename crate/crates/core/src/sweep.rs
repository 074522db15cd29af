//! Parameter sweeps producing CSV curves, and the configuration audit report.

use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::analytic::{op_asymptotic, op_exact, op_lower_bound};
use crate::baselines::{hd_outage_all, oma_outage_all, BaselineConfig};
use crate::error::{Error, Result};
use crate::montecarlo::{estimate_all_users, Method, OutageEstimate};
use crate::params::{derive_constants, ConfigFile, SystemConfig};

/// Slack allowed when checking `lower bound ≤ exact`.
pub const BOUND_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    SnrDb,
    Mu,
    /// Sets `κ_SR = κ_RU`.
    Kappa,
    /// Moves the relay; every user sits at `1 - d_SR`.
    DSr,
}

impl SweepVariable {
    pub fn name(self) -> &'static str {
        match self {
            SweepVariable::SnrDb => "snr_db",
            SweepVariable::Mu => "mu",
            SweepVariable::Kappa => "kappa",
            SweepVariable::DSr => "d_sr",
        }
    }

    pub fn apply(self, cfg: &SystemConfig<f64>, x: f64) -> SystemConfig<f64> {
        match self {
            SweepVariable::SnrDb => cfg.with_snr_db(x),
            SweepVariable::Mu => SystemConfig {
                li_quality: x,
                ..cfg.clone()
            },
            SweepVariable::Kappa => cfg.with_kappa(x),
            SweepVariable::DSr => cfg.with_relay_position(x),
        }
    }
}

impl FromStr for SweepVariable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "snr_db" | "snr" => Ok(SweepVariable::SnrDb),
            "mu" => Ok(SweepVariable::Mu),
            "kappa" => Ok(SweepVariable::Kappa),
            "d_sr" => Ok(SweepVariable::DSr),
            other => Err(Error::Argument(format!(
                "unknown sweep variable `{other}` (expected snr_db, mu, kappa or d_sr)"
            ))),
        }
    }
}

/// An inclusive grid `start, start + step, …, stop`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRange {
    pub variable: SweepVariable,
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl SweepRange {
    /// Parses `var=start:stop:step`.
    pub fn parse(text: &str) -> Result<Self> {
        let bad = || Error::Argument(format!("sweep `{text}` is not of the form var=start:stop:step"));
        let (var, range) = text.split_once('=').ok_or_else(bad)?;
        let parts: Vec<&str> = range.split(':').collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
        let r = Self {
            variable: var.trim().parse()?,
            start: num(parts[0])?,
            stop: num(parts[1])?,
            step: num(parts[2])?,
        };
        r.check()?;
        Ok(r)
    }

    /// A single point at the configured value of the variable.
    pub fn single(variable: SweepVariable, x: f64) -> Self {
        Self {
            variable,
            start: x,
            stop: x,
            step: 1.0,
        }
    }

    fn check(&self) -> Result<()> {
        if !(self.step > 0.0) || !self.step.is_finite() {
            return Err(Error::Argument("sweep step must be positive".into()));
        }
        if !(self.start <= self.stop) || !self.start.is_finite() || !self.stop.is_finite() {
            return Err(Error::Argument("sweep start must not exceed stop".into()));
        }
        Ok(())
    }

    /// Grid points generated by index, so the endpoint is hit exactly when
    /// `(stop - start) / step` is an integer up to rounding.
    pub fn grid(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        (0..=n)
            .map(|i| {
                if i == n && ((self.stop - self.start) / self.step - n as f64).abs() < 1e-9 {
                    self.stop
                } else {
                    self.start + i as f64 * self.step
                }
            })
            .collect()
    }

    pub fn describe(&self) -> String {
        format!("{}={}:{}:{}", self.variable.name(), self.start, self.stop, self.step)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub range: SweepRange,
    pub methods: Vec<Method>,
    pub users: Vec<usize>,
    pub trials: u64,
    pub seed: u64,
    pub partitions: usize,
}

impl SweepSpec {
    fn check(&self, num_users: usize) -> Result<()> {
        self.range.check()?;
        if self.methods.is_empty() {
            return Err(Error::Argument("no methods requested".into()));
        }
        if let Some(m) = self.methods.iter().find(|m| **m == Method::Oracle) {
            return Err(Error::Argument(format!("method `{m}` is not available in sweeps")));
        }
        if self.users.is_empty() {
            return Err(Error::Argument("no users requested".into()));
        }
        if let Some(&u) = self.users.iter().find(|&&u| u == 0 || u > num_users) {
            return Err(Error::User { user: u, users: num_users });
        }
        if self.methods.iter().any(|m| m.is_simulated()) && self.trials == 0 {
            return Err(Error::Argument("trials must be at least 1".into()));
        }
        if self.partitions == 0 {
            return Err(Error::Argument("partitions must be at least 1".into()));
        }
        Ok(())
    }
}

/// Parses a comma-separated method list such as `mc,exact,lb`.
pub fn parse_methods(text: &str) -> Result<Vec<Method>> {
    let mut out = Vec::new();
    for tag in text.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let m = Method::from_tag(tag).ok_or_else(|| Error::Argument(format!("unknown method `{tag}`")))?;
        if !out.contains(&m) {
            out.push(m);
        }
    }
    Ok(out)
}

/// Parses a comma-separated 1-based user list.
pub fn parse_users(text: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for tok in text.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let u: usize = tok
            .parse()
            .map_err(|_| Error::Argument(format!("bad user index `{tok}`")))?;
        if !out.contains(&u) {
            out.push(u);
        }
    }
    Ok(out)
}

/// SHA-256 over the canonical serialisation of every semantic field.
pub fn config_hash(file: &ConfigFile) -> String {
    let mut canonical = ConfigFile::from_config(&file.to_config_unchecked());
    canonical.hd_thresholds = file.hd_thresholds.clone();
    canonical.oma_threshold = file.oma_threshold;
    let digest = Sha256::digest(canonical.to_toml_string().as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    /// `(key, value)` pairs written as `# key = value` lines.
    pub metadata: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl SweepResult {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.metadata {
            let _ = writeln!(out, "# {k} = {v}");
        }
        let _ = writeln!(out, "{}", self.columns.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }
}

fn columns(spec: &SweepSpec) -> Vec<String> {
    let mut cols = vec!["x".to_string()];
    for &l in &spec.users {
        for m in &spec.methods {
            cols.push(format!("user{l}_{m}"));
            if m.is_simulated() {
                cols.push(format!("user{l}_{m}_stderr"));
            }
        }
        cols.push(format!("user{l}_feasible"));
    }
    cols
}

fn simulated(
    method: Method,
    cfg: &SystemConfig<f64>,
    file: &ConfigFile,
    spec: &SweepSpec,
) -> Result<Vec<OutageEstimate<f64>>> {
    match method {
        Method::Mc => estimate_all_users(cfg, spec.trials, spec.seed, spec.partitions),
        Method::Hd => {
            let b = BaselineConfig::hd_noma(cfg.clone(), file.hd_thresholds.clone())?;
            hd_outage_all(&b, spec.trials, spec.seed, spec.partitions)
        }
        Method::Oma => {
            let b = BaselineConfig::fd_oma(cfg.clone(), file.oma_threshold)?;
            oma_outage_all(&b, spec.trials, spec.seed, spec.partitions)
        }
        _ => unreachable!("deterministic method"),
    }
}

fn evaluate_point(x: f64, base: &SystemConfig<f64>, file: &ConfigFile, spec: &SweepSpec) -> Result<Vec<f64>> {
    let cfg = spec.range.variable.apply(base, x);
    let c = derive_constants(&cfg)?;
    let mut sims = Vec::new();
    for &m in spec.methods.iter().filter(|m| m.is_simulated()) {
        sims.push((m, simulated(m, &cfg, file, spec)?));
    }
    let mut row = vec![x];
    for &l in &spec.users {
        let mut exact = None;
        let mut bound = None;
        for &m in &spec.methods {
            let value = match m {
                Method::Exact => {
                    let v = op_exact(&cfg, l)?;
                    exact = Some(v);
                    v
                }
                Method::LowerBound => {
                    let v = op_lower_bound(&cfg, l)?;
                    bound = Some(v);
                    v
                }
                Method::Asymptotic => op_asymptotic(&cfg, l)?.probability(c.snr),
                Method::Oracle => unreachable!("rejected by spec check"),
                _ => {
                    let est = sims.iter().find(|(k, _)| *k == m).expect("simulated above").1[l - 1];
                    row.push(est.op_value);
                    row.push(est.std_error);
                    continue;
                }
            };
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::Invariant(format!(
                    "{} = {value} for user {l} at x = {x} is not a probability",
                    m.tag()
                )));
            }
            row.push(value);
        }
        if let (Some(e), Some(b)) = (exact, bound) {
            if b > e + BOUND_SLACK {
                return Err(Error::Invariant(format!(
                    "lower bound {b:e} exceeds exact {e:e} for user {l} at x = {x}"
                )));
            }
        }
        row.push(if c.is_feasible(l) { 1.0 } else { 0.0 });
    }
    Ok(row)
}

/// Evaluates every requested method at every grid point.
pub fn run_sweep(file: &ConfigFile, spec: &SweepSpec) -> Result<SweepResult> {
    let base: SystemConfig<f64> = file.to_config()?;
    spec.check(base.num_users())?;
    let grid = spec.range.grid();
    let rows: Vec<Result<Vec<f64>>> = grid
        .par_iter()
        .map(|&x| evaluate_point(x, &base, file, spec))
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let methods: Vec<&str> = spec.methods.iter().map(|m| m.tag()).collect();
    let users: Vec<String> = spec.users.iter().map(|u| u.to_string()).collect();
    let metadata = vec![
        ("tool".to_string(), format!("fdnoma {}", env!("CARGO_PKG_VERSION"))),
        ("config_hash".to_string(), config_hash(file)),
        ("sweep".to_string(), spec.range.describe()),
        ("methods".to_string(), methods.join(",")),
        ("users".to_string(), users.join(",")),
        ("trials".to_string(), spec.trials.to_string()),
        ("seed".to_string(), spec.seed.to_string()),
        ("partitions".to_string(), spec.partitions.to_string()),
    ];
    Ok(SweepResult {
        metadata,
        columns: columns(spec),
        rows,
    })
}

/// Audit report: every derived symbol and per-user feasibility, or the full
/// list of violated invariants.
pub fn validate_report(file: &ConfigFile) -> Result<String> {
    let cfg: SystemConfig<f64> = file.to_config()?;
    let c = derive_constants(&cfg)?;
    let mut out = String::new();
    let _ = writeln!(out, "config_hash  {}", config_hash(file));
    let _ = writeln!(out, "snr          {} dB ({} linear)", cfg.snr_db, c.snr);
    let _ = writeln!(out, "omega_sr     {}  (estimated {})", c.omega_sr, c.omega_sr_est);
    let _ = writeln!(out, "omega_li     {}", c.omega_li);
    let _ = writeln!(out, "theta1       {}", c.distortion);
    let _ = writeln!(out, "theta2       {}", c.hop2_noise);
    let _ = writeln!(out, "theta3       {}", c.impairment_product);
    let _ = writeln!(out, "theta4       {}", c.li_weight);
    let _ = writeln!(out, "theta5       {}", c.hop1_noise);
    let _ = writeln!(out, "{:>4} {:>14} {:>14} {:>14} {:>10} {:>16}", "j", "a_j", "xi_j", "xi~_j", "gamma_j", "delta_j");
    for j in 0..c.num_users() {
        let delta = match c.delta[j] {
            Some(d) => format!("{d:.10e}"),
            None => "infeasible".to_string(),
        };
        let _ = writeln!(
            out,
            "{:>4} {:>14.10} {:>14.10} {:>14.10} {:>10} {:>16}",
            j + 1,
            c.power_coeffs[j],
            c.iui[j],
            c.ipsic[j],
            c.thresholds[j],
            delta
        );
    }
    let mut warnings = 0;
    for l in 1..=c.num_users() {
        if !c.is_feasible(l) {
            warnings += 1;
            let stages: Vec<String> = (1..=l)
                .filter(|&j| !c.stage_feasible(j))
                .map(|j| j.to_string())
                .collect();
            let _ = writeln!(
                out,
                "warning: user {l} is always in outage (stage {} violates a_j > gamma_j (xi_j + xi~_j + theta1))",
                stages.join(", ")
            );
        }
    }
    if warnings == 0 {
        let _ = writeln!(out, "all configuration checks passed");
    } else {
        let _ = writeln!(out, "configuration valid with {warnings} warning(s)");
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_is_inclusive_and_index_based() {
        let g = SweepRange::parse("snr_db=0:40:2").unwrap().grid();
        assert_eq!(g.len(), 21);
        assert_eq!(g[20], 40.0);
        let g = SweepRange::parse("mu=0:1:0.05").unwrap().grid();
        assert_eq!(g.len(), 21);
        assert_eq!(g[20], 1.0);
        assert_eq!(g[3], 0.15000000000000002);
        let g = SweepRange::parse("d_sr=0.1:0.95:0.2").unwrap().grid();
        assert_eq!(g.len(), 5);
    }

    #[test]
    fn rejects_bad_ranges() {
        assert!(SweepRange::parse("snr_db=10:0:1").is_err());
        assert!(SweepRange::parse("snr_db=0:10:0").is_err());
        assert!(SweepRange::parse("rho=0:10:1").is_err());
        assert!(SweepRange::parse("snr_db=0:10").is_err());
    }

    #[test]
    fn method_and_user_lists() {
        assert_eq!(parse_methods("mc, exact,mc").unwrap(), vec![Method::Mc, Method::Exact]);
        assert!(parse_methods("mc,foo").is_err());
        assert_eq!(parse_users("3,1").unwrap(), vec![3, 1]);
        assert!(parse_users("a").is_err());
    }

    #[test]
    fn hash_ignores_representation() {
        let a = ConfigFile::from_config(&SystemConfig::default());
        let mut b = a.clone();
        b.d_ru = crate::params::PerUser::Shared(0.5);
        assert_eq!(config_hash(&a), config_hash(&b));
        b.snr_db = 11.0;
        assert_ne!(config_hash(&a), config_hash(&b));
    }
}
