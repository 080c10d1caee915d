//! Experiment runners and their CSV/JSON reports.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{is_squarefree, jacobi, kron, primes_1mod4, ShapeZ, SubsetKind};
use crate::error::{Error, Result};
use crate::lfunc::main_terms;
use crate::moments::{cross_sum, moment_report_with};
use crate::sieve::{cache_file_name, rep_counts_with, RepTable, SieveOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(Error::invalid(format!("unknown output format {s:?}"))),
        }
    }
}

/// Settings shared by the experiment runners.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub xs: Vec<u64>,
    /// Explicit prime cutoff `Z`, if any.
    pub z_cap: Option<u64>,
    pub subset: SubsetKind,
    pub eps: f64,
    pub format: OutputFormat,
    pub cache_dir: Option<PathBuf>,
    pub shards: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            xs: Vec::new(),
            z_cap: None,
            subset: SubsetKind::P,
            eps: 1e-10,
            format: OutputFormat::Csv,
            cache_dir: None,
            shards: 1,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.xs.is_empty() {
            return Err(Error::invalid("at least one X is required"));
        }
        if let Some(&x) = self.xs.iter().find(|&&x| x < 10) {
            return Err(Error::invalid(format!("X = {x} is below the minimum 10")));
        }
        if let Some(z) = self.z_cap {
            let x = *self.xs.iter().min().expect("nonempty");
            if z > x {
                return Err(Error::invalid(format!("Z = {z} exceeds X = {x}")));
            }
        }
        if self.shards == 0 {
            return Err(Error::invalid("shard count must be at least 1"));
        }
        if !(self.eps > 0.0) {
            return Err(Error::invalid("eps must be positive"));
        }
        Ok(())
    }

    pub fn sieve_options(&self) -> SieveOptions {
        SieveOptions::with_shards(self.shards)
    }
}

/// Reads the table from `dir` if a valid cache file is there, otherwise
/// sieves it and writes the cache.
pub fn load_or_build(
    bound: u64,
    z: ShapeZ,
    opts: SieveOptions,
    dir: Option<&Path>,
) -> Result<RepTable> {
    let Some(dir) = dir else {
        return rep_counts_with(bound, z, opts);
    };
    let path = dir.join(cache_file_name(bound, z));
    if path.exists() {
        match RepTable::load(&path) {
            Ok(t) if t.bound() == bound && t.z() == z => return Ok(t),
            Ok(_) | Err(Error::Cache(_)) => {}
            Err(e) => return Err(e),
        }
    }
    let table = rep_counts_with(bound, z, opts)?;
    std::fs::create_dir_all(dir)?;
    table.save(&path)?;
    Ok(table)
}

fn check_ladder(xs: &[u64]) -> Result<()> {
    if xs.is_empty() {
        return Err(Error::invalid("the X ladder is empty"));
    }
    if xs.contains(&0) {
        return Err(Error::invalid("X must be positive"));
    }
    if xs.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("the X ladder must be strictly ascending"));
    }
    Ok(())
}

/// Least-squares slope of `ln y` against `ln x`; `None` with fewer than two
/// points or a nonpositive value.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 || points.iter().any(|&(x, y)| x <= 0.0 || y <= 0.0) {
        return None;
    }
    let n = points.len() as f64;
    let (lx, ly): (Vec<f64>, Vec<f64>) = points.iter().map(|&(x, y)| (x.ln(), y.ln())).unzip();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prop13Report {
    pub z1: u64,
    pub z2: u64,
    #[serde(rename = "X")]
    pub x: u64,
    /// `sum_{n <= X} r(n, z1) r(n, z2)`, exact.
    pub lhs: u64,
    pub main_term: f64,
    /// Uncertainty of `main_term` from the L-value tails.
    pub main_term_bound: f64,
    pub abs_err: f64,
    pub rel_err: f64,
    /// Slope of `ln abs_err` against `ln X` over the whole ladder.
    pub fitted_exponent: Option<f64>,
}

#[derive(Serialize)]
struct Prop13Row {
    z1: u64,
    z2: u64,
    #[serde(rename = "X")]
    x: u64,
    lhs: u64,
    main_term: f64,
    abs_err: f64,
    rel_err: f64,
}

/// Compares `sum_{n <= X} r(n, z1) r(n, z2)` with its main term along an
/// ascending ladder of `X`.
pub fn verify_prop13(
    z1: ShapeZ,
    z2: ShapeZ,
    xs: &[u64],
    eps: f64,
    opts: SieveOptions,
    cache: Option<&Path>,
) -> Result<Vec<Prop13Report>> {
    check_ladder(xs)?;
    if z1 == z2 {
        return Err(Error::invalid("z1 and z2 must differ"));
    }
    let top = *xs.last().expect("nonempty ladder");
    let t1 = load_or_build(top, z1, opts, cache)?;
    let t2 = load_or_build(top, z2, opts, cache)?;
    let mains = main_terms(z1, z2, xs, eps)?;
    let mut out: Vec<Prop13Report> = xs
        .iter()
        .zip(mains)
        .map(|(&x, m)| {
            let lhs = cross_sum(&t1, &t2, x);
            let abs_err = (lhs as f64 - m.value).abs();
            Prop13Report {
                z1: z1.z(),
                z2: z2.z(),
                x,
                lhs,
                main_term: m.value,
                main_term_bound: m.value_bound,
                abs_err,
                rel_err: abs_err / m.value,
                fitted_exponent: None,
            }
        })
        .collect();
    let slope = loglog_slope(&out.iter().map(|r| (r.x as f64, r.abs_err)).collect::<Vec<_>>());
    for r in &mut out {
        r.fitted_exponent = slope;
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BernaysPoint {
    #[serde(rename = "X")]
    pub x: u64,
    /// Number of `n <= X` represented by `x^2 + z y^2`.
    #[serde(rename = "N")]
    pub count: u64,
    /// `N sqrt(ln X) / X`.
    pub kappa: f64,
}

pub fn bernays_scan(
    z: ShapeZ,
    xs: &[u64],
    opts: SieveOptions,
    cache: Option<&Path>,
) -> Result<Vec<BernaysPoint>> {
    check_ladder(xs)?;
    let top = *xs.last().expect("nonempty ladder");
    let ind = load_or_build(top, z, opts, cache)?.indicator();
    Ok(xs
        .iter()
        .map(|&x| {
            let count = ind.count_up_to(x);
            BernaysPoint {
                x,
                count,
                kappa: count as f64 * (x as f64).ln().sqrt() / x as f64,
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ZPolicy {
    /// `Z = ln X ln ln X`.
    LogLog,
    Explicit(u64),
}

/// The prime cutoff `Z` as a real number.
pub fn z_cutoff(x: u64, policy: ZPolicy) -> Result<f64> {
    let z = match policy {
        ZPolicy::LogLog => {
            if x < 100 {
                return Err(Error::invalid(format!(
                    "X = {x} is too small for Z = ln X ln ln X (need X >= 100)"
                )));
            }
            let l = (x as f64).ln();
            l * l.ln()
        }
        ZPolicy::Explicit(z) => z as f64,
    };
    if z > x as f64 {
        return Err(Error::invalid(format!("Z = {z} exceeds X = {x}")));
    }
    Ok(z)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    #[serde(rename = "X")]
    pub x: u64,
    #[serde(rename = "Z")]
    pub z: f64,
    pub primes: Vec<u64>,
    #[serde(rename = "count_S")]
    pub count_s: usize,
    /// Number of `n <= X` represented by some `x^2 + p y^2` with `p` in the subset.
    #[serde(rename = "N")]
    pub n: u64,
    pub ratio: f64,
    /// `(sum R)^2 / sum R^2`.
    pub cs_bound: f64,
    pub first_moment: f64,
    pub diagonal: f64,
    pub off_diagonal: f64,
    /// `N sum R^2 - (sum R)^2` and its rounding bound.
    pub cs_slack: f64,
    pub cs_slack_error: f64,
    pub regime_violation: bool,
}

impl DensityReport {
    pub fn cauchy_schwarz_holds(&self) -> bool {
        self.cs_slack + self.cs_slack_error >= 0.0
    }
}

#[derive(Serialize)]
struct DensityRow {
    #[serde(rename = "X")]
    x: u64,
    #[serde(rename = "Z")]
    z: f64,
    #[serde(rename = "count_S")]
    count_s: usize,
    #[serde(rename = "N")]
    n: u64,
    ratio: f64,
    cs_bound: f64,
}

/// `N_Q(X, Z)` against the Cauchy-Schwarz lower bound built from the moments
/// of `R_Q`. Fails with an invariant error if the bound is violated.
pub fn density_run(
    x: u64,
    policy: ZPolicy,
    subset: SubsetKind,
    opts: SieveOptions,
) -> Result<DensityReport> {
    if x == 0 {
        return Err(Error::invalid("X must be positive"));
    }
    let z = z_cutoff(x, policy)?;
    let primes = primes_1mod4(z.floor() as u64, subset)?;
    let m = moment_report_with(x, &primes, opts)?;
    let report = DensityReport {
        x,
        z,
        count_s: primes.len(),
        primes: primes.primes,
        n: m.union_count,
        ratio: m.union_count as f64 / x as f64,
        cs_bound: m.cs_lower_bound,
        first_moment: m.first_moment,
        diagonal: m.diagonal,
        off_diagonal: m.off_diagonal,
        cs_slack: m.cs_slack,
        cs_slack_error: m.cs_slack_error,
        regime_violation: m.regime_violation,
    };
    if !report.cauchy_schwarz_holds() {
        return Err(Error::invariant(format!(
            "N = {} is below the Cauchy-Schwarz bound {}",
            report.n, report.cs_bound
        )));
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagnosticRow {
    pub n: u64,
    /// `T(n) = sum_{p <= Z, p = 1 (4)} (p / n)`.
    #[serde(rename = "T")]
    pub t: i64,
    /// `sum_{d mod 4n, d = 1 (4)} (d / 4n)`.
    pub orth_sum: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReciprocityCheck {
    pub p1: u64,
    pub p2: u64,
    pub n: u64,
    /// `(p1 / n)(p2 / n)`.
    pub product: i8,
    /// `(n / p1 p2)`.
    pub jacobi: i8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    #[serde(rename = "Z")]
    pub z: u64,
    #[serde(rename = "N")]
    pub n_max: u64,
    pub primes: Vec<u64>,
    pub rows: Vec<DiagnosticRow>,
    /// `n` where `T(n)` summed over residue classes disagrees with the direct sum.
    pub class_sum_mismatches: Vec<u64>,
    /// `sum |T(n)|^2` over odd squarefree `1 < n <= N`.
    pub starred_sum: u64,
    /// `starred_sum / Z^2.1`.
    pub heath_brown_ratio: f64,
    /// `starred_sum / ((Z^2 + N^2 ln N) N)`.
    pub elliott_ratio: f64,
    pub reciprocity: Vec<ReciprocityCheck>,
}

impl Diagnostics {
    pub fn orthogonality_holds(&self) -> bool {
        self.rows.iter().all(|r| r.orth_sum == 0)
    }

    pub fn reciprocity_holds(&self) -> bool {
        self.reciprocity.iter().all(|c| c.product == c.jacobi)
    }
}

/// Odd squarefree `n > 1`; these are never squares.
pub fn is_diagnostic_modulus(n: u64) -> bool {
    n > 1 && n % 2 == 1 && is_squarefree(n)
}

pub fn orthogonality_sum(n: u64) -> i64 {
    (1..4 * n)
        .step_by(4)
        .map(|d| i64::from(kron(d as i64, 4 * n)))
        .sum()
}

/// `T(n)` as `sum_d (d / n) pi(Z; 4n, d)` over the classes `d mod 4n`
/// holding primes of the subset.
fn t_by_classes(primes: &[u64], n: u64) -> i64 {
    let mut classes: BTreeMap<u64, i64> = BTreeMap::new();
    for &p in primes {
        *classes.entry(p % (4 * n)).or_default() += 1;
    }
    classes
        .into_iter()
        .map(|(d, count)| i64::from(kron(d as i64, n)) * count)
        .sum()
}

const RECIPROCITY_PRIMES: usize = 6;
const RECIPROCITY_MODULI: usize = 20;

/// Character-sum data for the primes `p = 1 (mod 4)`, `p <= Z`, and the moduli `n <= n_max`.
pub fn char_sum_diagnostics(z: u64, n_max: u64) -> Result<Diagnostics> {
    if z < 5 {
        return Err(Error::invalid(format!("Z = {z} is below 5")));
    }
    let primes = primes_1mod4(z, SubsetKind::P)?.primes;
    let moduli: Vec<u64> = (1..=n_max).filter(|&n| is_diagnostic_modulus(n)).collect();
    let computed: Vec<(DiagnosticRow, bool)> = moduli
        .par_iter()
        .map(|&n| {
            let t: i64 = primes.iter().map(|&p| i64::from(kron(p as i64, n))).sum();
            let row = DiagnosticRow {
                n,
                t,
                orth_sum: orthogonality_sum(n),
            };
            (row, t_by_classes(&primes, n) == t)
        })
        .collect();
    let class_sum_mismatches = computed
        .iter()
        .filter(|(_, ok)| !ok)
        .map(|(r, _)| r.n)
        .collect();
    let rows: Vec<DiagnosticRow> = computed.into_iter().map(|(r, _)| r).collect();
    let starred_sum: u64 = rows.iter().map(|r| r.t.unsigned_abs().pow(2)).sum();
    let zf = z as f64;
    let nf = n_max as f64;
    let elliott = (zf * zf + nf * nf * nf.max(1.0).ln()) * nf;

    let few = &primes[..primes.len().min(RECIPROCITY_PRIMES)];
    let mut reciprocity = Vec::new();
    for (i, &p1) in few.iter().enumerate() {
        for &p2 in &few[i + 1..] {
            for &n in moduli.iter().take(RECIPROCITY_MODULI) {
                reciprocity.push(ReciprocityCheck {
                    p1,
                    p2,
                    n,
                    product: kron(p1 as i64, n) * kron(p2 as i64, n),
                    jacobi: jacobi(n % (p1 * p2), p1 * p2),
                });
            }
        }
    }

    Ok(Diagnostics {
        z,
        n_max,
        primes,
        rows,
        class_sum_mismatches,
        starred_sum,
        heath_brown_ratio: starred_sum as f64 / zf.powf(2.1),
        elliott_ratio: if elliott > 0.0 { starred_sum as f64 / elliott } else { 0.0 },
        reciprocity,
    })
}

fn to_csv<R: Serialize>(rows: impl IntoIterator<Item = R>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn render_prop13(reports: &[Prop13Report], format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Json => to_json(reports),
        OutputFormat::Csv => to_csv(reports.iter().map(|r| Prop13Row {
            z1: r.z1,
            z2: r.z2,
            x: r.x,
            lhs: r.lhs,
            main_term: r.main_term,
            abs_err: r.abs_err,
            rel_err: r.rel_err,
        })),
    }
}

pub fn render_bernays(points: &[BernaysPoint], format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Json => to_json(points),
        OutputFormat::Csv => to_csv(points),
    }
}

pub fn render_density(report: &DensityReport, format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Json => to_json(report),
        OutputFormat::Csv => to_csv([DensityRow {
            x: report.x,
            z: report.z,
            count_s: report.count_s,
            n: report.n,
            ratio: report.ratio,
            cs_bound: report.cs_bound,
        }]),
    }
}

pub fn render_diagnostics(d: &Diagnostics, format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Json => to_json(d),
        OutputFormat::Csv => to_csv(&d.rows),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shape(z: u64) -> ShapeZ {
        ShapeZ::new(z).unwrap()
    }

    fn opts() -> SieveOptions {
        SieveOptions::default()
    }

    #[test]
    fn prop13_small_x() {
        let r = verify_prop13(shape(5), shape(13), &[1, 10], 1e-10, opts(), None).unwrap();
        assert_eq!(r[0].lhs, 1);
        // r(n,5) r(n,13) = 1, 1, 3 at n = 1, 4, 9
        assert_eq!(r[1].lhs, 5);
        assert_eq!(r[1].abs_err, (5.0 - r[1].main_term).abs());
        assert!(verify_prop13(shape(5), shape(13), &[10, 10], 1e-10, opts(), None).is_err());
        assert!(verify_prop13(shape(5), shape(5), &[10], 1e-10, opts(), None).is_err());
    }

    #[test]
    fn prop13_abs_err_by_construction() {
        let xs = [1000, 10_000, 100_000];
        let r = verify_prop13(shape(5), shape(13), &xs, 1e-10, opts(), None).unwrap();
        for rep in &r {
            assert_eq!(rep.abs_err, (rep.lhs as f64 - rep.main_term).abs());
            assert!(rep.rel_err < 0.05, "{rep:?}");
        }
        assert!(r[0].fitted_exponent.is_some());
    }

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<(f64, f64)> = [10.0, 100.0, 1000.0].iter().map(|&x| (x, 3.0 * f64::powf(x, 0.75))).collect();
        assert!((loglog_slope(&pts).unwrap() - 0.75).abs() < 1e-12);
        assert_eq!(loglog_slope(&pts[..1]), None);
        assert_eq!(loglog_slope(&[(10.0, 0.0), (100.0, 1.0)]), None);
    }

    #[test]
    fn bernays_examples() {
        let p = bernays_scan(shape(5), &[1, 10], opts(), None).unwrap();
        assert_eq!(p[0].count, 1);
        assert_eq!(p[1].count, 5);
        assert!((p[1].kappa - 5.0 * 10f64.ln().sqrt() / 10.0).abs() < 1e-15);
        assert!((p[1].kappa - 0.759).abs() < 1e-3);
        assert_eq!(bernays_scan(shape(13), &[10], opts(), None).unwrap()[0].count, 3);
    }

    #[test]
    fn bernays_kappa_positive_and_bounded() {
        let xs = [1000, 10_000, 100_000, 1_000_000];
        for z in [5, 13, 17] {
            for p in bernays_scan(shape(z), &xs, opts(), None).unwrap() {
                assert!(p.kappa > 0.0 && p.kappa < 2.0, "z={z} {p:?}");
            }
        }
    }

    #[test]
    fn density_examples() {
        let r = density_run(10_000, ZPolicy::LogLog, SubsetKind::P, opts()).unwrap();
        assert!((r.z - 20.45).abs() < 0.01);
        assert_eq!(r.primes, vec![5, 13, 17]);
        assert!(r.cauchy_schwarz_holds());
        let r = density_run(100, ZPolicy::Explicit(5), SubsetKind::P, opts()).unwrap();
        assert_eq!(r.primes, vec![5]);
        assert!(matches!(
            density_run(50, ZPolicy::LogLog, SubsetKind::P, opts()),
            Err(Error::InvalidArgument(_))
        ));
        assert!(density_run(100, ZPolicy::Explicit(101), SubsetKind::P, opts()).is_err());
    }

    #[test]
    fn empty_subset_gives_zero() {
        let r = density_run(100, ZPolicy::Explicit(4), SubsetKind::P, opts()).unwrap();
        assert_eq!((r.count_s, r.n), (0, 0));
        assert_eq!(r.cs_bound, 0.0);
    }

    #[test]
    fn orthogonality_examples() {
        assert_eq!(orthogonality_sum(15), 0);
        assert!(!is_diagnostic_modulus(9));
        assert!(!is_diagnostic_modulus(1));
        assert!(is_diagnostic_modulus(15));
    }

    #[test]
    fn diagnostics_examples() {
        let d = char_sum_diagnostics(30, 50).unwrap();
        assert_eq!(d.primes, vec![5, 13, 17, 29]);
        let t7: i64 = [5u64, 13, 17, 29].iter().map(|&p| i64::from(jacobi(p % 7, 7))).sum();
        let row = d.rows.iter().find(|r| r.n == 7).unwrap();
        assert_eq!(row.t, t7);
        assert!(d.rows.iter().all(|r| r.n != 9));
        assert!(d.orthogonality_holds());
        assert!(d.class_sum_mismatches.is_empty());
        assert!(d.reciprocity_holds());
        assert!(!d.reciprocity.is_empty());
        assert!(char_sum_diagnostics(4, 50).is_err());
    }

    #[test]
    fn config_validation() {
        let mut c = ExperimentConfig {
            xs: vec![100],
            ..Default::default()
        };
        assert!(c.validate().is_ok());
        c.xs = vec![5];
        assert!(c.validate().is_err());
        c.xs = vec![100];
        c.z_cap = Some(200);
        assert!(c.validate().is_err());
        c.z_cap = None;
        c.shards = 0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn cache_is_reused() {
        let dir = tempfile::tempdir().unwrap();
        let a = load_or_build(5000, shape(13), opts(), Some(dir.path())).unwrap();
        let path = dir.path().join(cache_file_name(5000, shape(13)));
        assert!(path.exists());
        let b = load_or_build(5000, shape(13), opts(), Some(dir.path())).unwrap();
        assert_eq!(a, b);
        std::fs::write(&path, b"garbage").unwrap();
        let c = load_or_build(5000, shape(13), opts(), Some(dir.path())).unwrap();
        assert_eq!(a, c);
    }

    #[test]
    fn renderers() {
        let r = verify_prop13(shape(5), shape(13), &[10], 1e-10, opts(), None).unwrap();
        let csv = render_prop13(&r, OutputFormat::Csv).unwrap();
        assert!(csv.starts_with("z1,z2,X,lhs,main_term,abs_err,rel_err\n5,13,10,5,"));
        let json: serde_json::Value = serde_json::from_str(&render_prop13(&r, OutputFormat::Json).unwrap()).unwrap();
        assert_eq!(json[0]["lhs"], 5);

        let d = density_run(1000, ZPolicy::LogLog, SubsetKind::P, opts()).unwrap();
        let csv = render_density(&d, OutputFormat::Csv).unwrap();
        assert!(csv.starts_with("X,Z,count_S,N,ratio,cs_bound\n1000,"));

        let d = char_sum_diagnostics(30, 20).unwrap();
        let csv = render_diagnostics(&d, OutputFormat::Csv).unwrap();
        assert!(csv.starts_with("n,T,orth_sum\n3,"));

        let b = bernays_scan(shape(5), &[10], opts(), None).unwrap();
        assert_eq!(render_bernays(&b, OutputFormat::Csv).unwrap().lines().next(), Some("X,N,kappa"));
        assert_eq!("json".parse::<OutputFormat>().unwrap(), OutputFormat::Json);
        assert!("xml".parse::<OutputFormat>().is_err());
    }
}
