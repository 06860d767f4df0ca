//! The five experiments. Each returns a rendered-ready [`Table`]; row order
//! follows the configuration, never completion order.

use std::collections::BTreeMap;

use bv_noise::disorder::{classical_param_for_strength, quantum_param_for_strength};
use bv_noise::quench::{advantage_curve, lnp_statistics_with};
use bv_noise::{
    classical_success, derive_seed, fit, quantum_strength, quenched_average, FitModel, FitResult,
    QuantumDisorder, SecretString, StoppingRule,
};

use crate::config::{parse_fit_model, Experiment, ExperimentConfig, Family};
use crate::output::{Cell, Table};
use crate::reference::{default_fit_model, reference_fit};
use crate::CliError;

fn family_tag(f: Family) -> u64 {
    f as u64
}

fn base_table(cfg: &ExperimentConfig, columns: Vec<&'static str>) -> Table {
    let mut t = Table::new(columns);
    t.meta.push(("experiment".into(), cfg.experiment.name().into()));
    let fams: Vec<&str> = cfg.families.iter().map(Family::name).collect();
    t.meta.push(("family".into(), fams.join("+")));
    t.meta.push(("seed".into(), cfg.seed.to_string()));
    t.meta.push(("config_sha256".into(), cfg.hash()));
    t
}

fn only_family(cfg: &ExperimentConfig) -> Result<Family, CliError> {
    match cfg.families.as_slice() {
        [f] => Ok(*f),
        _ => Err(CliError::Config(format!(
            "{} runs exactly one family",
            cfg.experiment.name()
        ))),
    }
}

/// `Q` and `C` against the scaled strength for one family and several `n`.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<Table, CliError> {
    let family = only_family(cfg)?;
    let ckind = family
        .classical()
        .ok_or_else(|| CliError::Config(format!("{} cannot be swept", family.name())))?;
    let rule = StoppingRule::default();
    let mut t = base_table(
        cfg,
        vec!["n", "sigma_bar", "Q", "Q_stderr", "C", "n_samples", "converged"],
    );
    t.meta.push(("grid_points".into(), cfg.grid.len().to_string()));
    let models = cfg
        .grid
        .iter()
        .map(|&sb| {
            Ok((
                quantum_param_for_strength(family.quantum(), sb, None)?,
                classical_param_for_strength(ckind, sb)?,
            ))
        })
        .collect::<Result<Vec<_>, bv_noise::Error>>()?;
    for &n in &cfg.ns {
        let s = SecretString::zeros(n)?;
        for (i, (&sb, (qm, cm))) in cfg.grid.iter().zip(&models).enumerate() {
            let seed = derive_seed(cfg.seed, &[n as u64, i as u64]);
            let q = quenched_average(qm, &s, seed, cfg.max_samples, &rule)?;
            let c = classical_success(cm, n)?;
            t.push(vec![
                n.into(),
                sb.into(),
                q.q_mean.into(),
                q.std_error.into(),
                c.into(),
                q.n_samples.into(),
                q.converged.into(),
            ]);
        }
    }
    Ok(t)
}

/// `Q` against the axis ratio of the squeezed family at fixed area.
pub fn run_squeezed_sweep(cfg: &ExperimentConfig) -> Result<Table, CliError> {
    let rule = StoppingRule::default();
    let mut t = base_table(cfg, vec!["r", "sigma_QS", "Q", "Q_stderr", "n"]);
    t.meta.push(("D".into(), crate::output::fmt_num(cfg.area)));
    t.meta.push(("grid_points".into(), cfg.grid.len().to_string()));
    let (lo, hi) = bv_noise::disorder::squeeze_ratio_range(cfg.area);
    for &n in &cfg.ns {
        let s = SecretString::zeros(n)?;
        for (i, &r) in cfg.grid.iter().enumerate() {
            let model = QuantumDisorder::Squeezed {
                area: cfg.area,
                ratio: r.clamp(lo, hi),
            };
            let sigma = quantum_strength(&model)?.sigma;
            let seed = derive_seed(cfg.seed, &[n as u64, i as u64]);
            let q = quenched_average(&model, &s, seed, cfg.max_samples, &rule)?;
            t.push(vec![r.into(), sigma.into(), q.q_mean.into(), q.std_error.into(), n.into()]);
        }
    }
    Ok(t)
}

/// `Q − C` against `n` for each family and scaled strength.
pub fn run_advantage(cfg: &ExperimentConfig) -> Result<Table, CliError> {
    let rule = StoppingRule::default();
    let mut t = base_table(cfg, vec!["family", "sigma_bar", "n", "Q", "C", "diff"]);
    for &family in &cfg.families {
        let ckind = family
            .classical()
            .ok_or_else(|| CliError::Config(format!("{} has no classical counterpart", family.name())))?;
        for (j, &sb) in cfg.sigma_bars.iter().enumerate() {
            let seed = derive_seed(cfg.seed, &[family_tag(family), j as u64]);
            let rows = advantage_curve(family.quantum(), ckind, sb, &cfg.ns, seed, cfg.max_samples, &rule)?;
            for r in rows {
                t.push(vec![
                    family.name().into(),
                    sb.into(),
                    r.n.into(),
                    r.q.q_mean.into(),
                    r.c.into(),
                    r.diff.into(),
                ]);
            }
        }
    }
    Ok(t)
}

/// Moments of `ln P` and the log-normal prediction of `E[P]` for several `n`.
pub fn run_clt(cfg: &ExperimentConfig) -> Result<Table, CliError> {
    let family = only_family(cfg)?;
    let sb = match cfg.sigma_bars.as_slice() {
        [s] => *s,
        _ => return Err(CliError::Config("clt runs exactly one sigma_bar".into())),
    };
    if family == Family::Cauchy {
        eprintln!("warning: the Cauchy family has heavy tails; the log-normal limit is not expected");
    }
    let model = quantum_param_for_strength(family.quantum(), sb, None)?;
    let mut t = base_table(
        cfg,
        vec![
            "n",
            "mean_lnP",
            "std_lnP",
            "skewness",
            "excess_kurtosis",
            "predicted_mean_P",
            "mc_mean_P",
        ],
    );
    t.meta.push(("sigma_bar".into(), crate::output::fmt_num(sb)));
    t.meta.push(("samples".into(), cfg.samples.to_string()));
    for &n in &cfg.ns {
        let st = lnp_statistics_with(&model, n, cfg.samples, derive_seed(cfg.seed, &[n as u64]), &StoppingRule::default())?;
        if st.n_discarded > 0 {
            eprintln!("n={n}: discarded {} samples with P = 0", st.n_discarded);
        }
        t.push(vec![
            n.into(),
            st.mean_lnp.into(),
            st.std_lnp.into(),
            st.skewness.into(),
            st.excess_kurtosis.into(),
            st.predicted_mean_p.into(),
            st.mc_mean_p.into(),
        ]);
    }
    Ok(t)
}

/// A sweep CSV read back: its family (from the metadata line) and the
/// `(sigma_bar, Q)` points for each `n`, in file order.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepData {
    pub family: Option<Family>,
    pub curves: BTreeMap<usize, Vec<(f64, f64)>>,
}

pub fn parse_sweep_csv(text: &str) -> Result<SweepData, CliError> {
    let bad = |m: String| CliError::Config(format!("bad sweep CSV: {m}"));
    let mut family = None;
    let mut header: Option<Vec<&str>> = None;
    let mut curves: BTreeMap<usize, Vec<(f64, f64)>> = BTreeMap::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(meta) = line.strip_prefix('#') {
            for kv in meta.split_whitespace() {
                if let Some(f) = kv.strip_prefix("family=") {
                    family = Family::parse(f).ok();
                }
            }
            continue;
        }
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        let Some(h) = &header else {
            header = Some(cells);
            continue;
        };
        let col = |name: &str| {
            h.iter()
                .position(|c| *c == name)
                .ok_or_else(|| bad(format!("missing column {name}")))
        };
        let (ni, xi, qi) = (col("n")?, col("sigma_bar")?, col("Q")?);
        if cells.len() != h.len() {
            return Err(bad(format!("row has {} cells, header {}", cells.len(), h.len())));
        }
        let n: usize = cells[ni].parse().map_err(|_| bad(format!("bad n {:?}", cells[ni])))?;
        let num = |s: &str| s.parse::<f64>().map_err(|_| bad(format!("bad number {s:?}")));
        curves.entry(n).or_default().push((num(cells[xi])?, num(cells[qi])?));
    }
    if header.is_none() || curves.is_empty() {
        return Err(bad("no data rows".into()));
    }
    Ok(SweepData { family, curves })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitOutcome {
    pub n: usize,
    pub result: FitResult,
}

/// Fits every curve in `data`. `model = None` picks the default form per `(family, n)`.
pub fn fit_curves(data: &SweepData, family: Option<Family>, model: Option<FitModel>) -> Result<Vec<FitOutcome>, CliError> {
    let family = family.or(data.family);
    data.curves
        .iter()
        .map(|(&n, pts)| {
            let form = model.unwrap_or_else(|| match family {
                Some(f) => default_fit_model(f, n),
                None => FitModel::GaussQuad,
            });
            Ok(FitOutcome {
                n,
                result: fit(pts, form, None)?,
            })
        })
        .collect()
}

/// Human-readable comparison of the fits with the published reference values.
pub fn fit_report(family: Option<Family>, fits: &[FitOutcome]) -> String {
    let mut out = String::new();
    for f in fits {
        let r = &f.result;
        out.push_str(&format!(
            "n={} model={} a={:.4}±{:.4} b={:.4}±{:.4} c={:.4}±{:.4} d={:.4}±{:.4} rms={:.5}\n",
            f.n,
            r.model.name(),
            r.params[0],
            r.half_widths_95[0],
            r.params[1],
            r.half_widths_95[1],
            r.params[2],
            r.half_widths_95[2],
            r.params[3],
            r.half_widths_95[3],
            r.rms_error
        ));
        if let Some(reference) = family.and_then(|fam| reference_fit(fam, f.n)) {
            let p = reference.params;
            out.push_str(&format!(
                "  reference ({} n={}, {}): a={} b={} c={} d={} rms={}; delta a={:+.4} b={:+.1}% c={:+.4} d={:+.4}\n",
                reference.family.name(),
                reference.n,
                reference.model.name(),
                p[0],
                p[1],
                p[2],
                p[3],
                reference.rms_error,
                r.params[0] - p[0],
                100.0 * (r.params[1] - p[1]) / p[1],
                r.params[2] - p[2],
                r.params[3] - p[3],
            ));
        }
    }
    out
}

/// Reads a sweep CSV, fits each `n` and tabulates the parameters.
pub fn run_fit(cfg: &ExperimentConfig) -> Result<(Table, String), CliError> {
    let path = cfg.input.as_ref().ok_or_else(|| CliError::Config("fit needs --input".into()))?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let data = parse_sweep_csv(&text)?;
    let family = cfg.families.first().copied().or(data.family);
    let model = match &cfg.model {
        Some(m) => parse_fit_model(m)?,
        None => None,
    };
    let fits = fit_curves(&data, family, model)?;
    let mut t = Table::new(vec![
        "n", "model", "a", "b", "c", "d", "a_hw95", "b_hw95", "c_hw95", "d_hw95", "rms_error", "converged",
    ]);
    t.meta.push(("experiment".into(), Experiment::Fit.name().into()));
    t.meta.push((
        "family".into(),
        family.map(|f| f.name()).unwrap_or("unknown").into(),
    ));
    t.meta.push(("input".into(), path.display().to_string().replace(' ', "%20")));
    t.meta.push(("config_sha256".into(), cfg.hash()));
    for f in &fits {
        let r = &f.result;
        let mut row: Vec<Cell> = vec![f.n.into(), r.model.name().into()];
        row.extend(r.params.iter().map(|&x| Cell::from(x)));
        row.extend(r.half_widths_95.iter().map(|&x| Cell::from(x)));
        row.push(r.rms_error.into());
        row.push(r.converged.into());
        t.push(row);
    }
    Ok((t, fit_report(family, &fits)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_round_trip() {
        let text = "# bvlab 0.1.0 experiment=sweep family=gaussian seed=1\n\
                    n,sigma_bar,Q,Q_stderr,C,n_samples,converged\n\
                    1,0,1,0,1,32768,true\n\
                    1,0.5,0.7,0.0002,0.6,40000,true\n\
                    2,0,1,0,0.5,32768,true\n";
        let d = parse_sweep_csv(text).unwrap();
        assert_eq!(d.family, Some(Family::Gaussian));
        assert_eq!(d.curves[&1], vec![(0.0, 1.0), (0.5, 0.7)]);
        assert_eq!(d.curves[&2], vec![(0.0, 1.0)]);
        assert!(parse_sweep_csv("n,sigma_bar\n").is_err());
        assert!(parse_sweep_csv("n,Q\n1,0.5\n").is_err());
    }

    #[test]
    fn exact_curve_fits_tightly() {
        let pts: Vec<(f64, f64)> = (0..21)
            .map(|i| {
                let x = i as f64 / 20.0;
                (x, FitModel::eval(&[0.59, 1.8, 0.0, 0.41], x))
            })
            .collect();
        let data = SweepData {
            family: Some(Family::Uniform),
            curves: BTreeMap::from([(1, pts)]),
        };
        let fits = fit_curves(&data, None, None).unwrap();
        assert_eq!(fits[0].result.model, FitModel::GaussOnly);
        assert!(fits[0].result.rms_error < 1e-8);
        let report = fit_report(Some(Family::Uniform), &fits);
        assert!(report.contains("reference (uniform n=1"));
    }
}
