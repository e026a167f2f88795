//! Expands a configuration into certificate jobs and runs them.

use std::collections::BTreeMap;

use alphamod::covering::{build_bapu, build_covering};
use alphamod::families::{lipschitz_corpus, Member};
use alphamod::grid::Grid1D;
use alphamod::quantize::LipschitzFn;
use alphamod::schatten::{
    build_windows, certify_commutator_bound, certify_hs_identity, certify_schatten_p, certify_trace_bound, CertOptions,
};
use alphamod::spaces::NormSpec;
use alphamod::{Cert, Error, Partition, Windows};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{CertSpec, Config};

/// Why a run stopped before producing a report.
#[derive(Debug)]
pub enum Abort {
    /// The configuration cannot be executed as written.
    Config(String),
}

/// One certificate outcome, in configuration order.
#[derive(Clone, Debug, Serialize)]
pub struct Entry {
    pub id: String,
    pub kind: &'static str,
    pub alpha: Option<f64>,
    pub label: String,
    pub certificate: Option<Cert>,
    /// Set when the computation itself hit a hard failure.
    pub error: Option<String>,
}

impl Entry {
    pub fn pass(&self) -> bool {
        self.error.is_none() && self.certificate.as_ref().is_some_and(|c| c.pass)
    }

    /// Failing checks, for the message on standard error.
    pub fn failures(&self) -> Vec<String> {
        match (&self.error, &self.certificate) {
            (Some(e), _) => vec![e.clone()],
            (None, Some(c)) => c.failures(),
            (None, None) => vec!["no certificate".into()],
        }
    }
}

struct Setup {
    bx: Partition,
    bxi: Partition,
    windows: Option<Windows>,
}

struct Job<'a> {
    kind: &'static str,
    alpha: Option<f64>,
    label: String,
    run: Box<dyn Fn() -> alphamod::Result<Cert> + Send + Sync + 'a>,
}

fn key(alpha: f64) -> u64 {
    alpha.to_bits()
}

fn prepare(cfg: &Config, grid: Grid1D<f64>) -> Result<BTreeMap<u64, Setup>, Abort> {
    let c = &cfg.covering;
    let mut out = BTreeMap::new();
    for spec in &cfg.certificates {
        let chain = match spec {
            CertSpec::Thm1 { chain, .. } => *chain,
            CertSpec::SchattenP { p, .. } => *p == 1.0,
            _ => false,
        };
        for &alpha in spec.alphas() {
            let fail = |e: Error| Abort::Config(format!("alpha = {alpha}: {e}"));
            if !out.contains_key(&key(alpha)) {
                let cov = build_covering(alpha, c.omega, c.delta, c.c).map_err(fail)?;
                let bx = build_bapu(&cov, grid, c.rho).map_err(fail)?;
                let bxi = build_bapu(&cov, grid.dual(), c.rho).map_err(fail)?;
                out.insert(key(alpha), Setup { bx, bxi, windows: None });
            }
            let setup = out.get_mut(&key(alpha)).expect("inserted above");
            if chain && setup.windows.is_none() {
                setup.windows = Some(build_windows(&setup.bx.covering, grid).map_err(fail)?);
            }
        }
    }
    Ok(out)
}

fn members(spec: &CertSpec, grid: Grid1D<f64>) -> Result<Vec<Member<f64>>, Abort> {
    let family = match spec {
        CertSpec::Thm1 { family, .. } | CertSpec::SchattenP { family, .. } | CertSpec::HsIdentity { family } => family,
        CertSpec::Thm2 { symbol, .. } => symbol,
    };
    family.generate(grid).map_err(|e| Abort::Config(e.to_string()))
}

fn jobs<'a>(
    cfg: &'a Config,
    setups: &'a BTreeMap<u64, Setup>,
    symbols: &'a [Vec<Member<f64>>],
    corpus: &'a [(String, LipschitzFn<f64>)],
) -> Vec<Job<'a>> {
    let mut out: Vec<Job<'a>> = Vec::new();
    for (spec, members) in cfg.certificates.iter().zip(symbols) {
        match spec {
            CertSpec::HsIdentity { .. } => {
                for m in members {
                    out.push(Job {
                        kind: "hs_identity",
                        alpha: None,
                        label: m.label.clone(),
                        run: Box::new(move || certify_hs_identity(&m.symbol, &m.label)),
                    });
                }
            }
            CertSpec::Thm1 { alphas, chain, cap, .. } => {
                for &alpha in alphas {
                    let s = &setups[&key(alpha)];
                    for m in members {
                        let opts = CertOptions {
                            cap: *cap,
                            chain_windows: if *chain { s.windows.as_ref() } else { None },
                            label: m.label.clone(),
                        };
                        out.push(Job {
                            kind: "thm1",
                            alpha: Some(alpha),
                            label: m.label.clone(),
                            run: Box::new(move || {
                                let spec = NormSpec::product(alpha / 2.0, alpha / 2.0, 1.0, 1.0, alpha)?;
                                certify_trace_bound(&m.symbol, &s.bx, &s.bxi, &spec, &opts)
                            }),
                        });
                    }
                }
            }
            CertSpec::Thm2 { alphas, corpus: names, cap, .. } => {
                for &alpha in alphas {
                    let s = &setups[&key(alpha)];
                    for m in members {
                        for (name, a) in corpus.iter().filter(|(n, _)| names.contains(n)) {
                            let label = format!("{} x {name}", m.label);
                            let opts = CertOptions { cap: *cap, chain_windows: None, label: label.clone() };
                            out.push(Job {
                                kind: "thm2",
                                alpha: Some(alpha),
                                label,
                                run: Box::new(move || {
                                    let spec = NormSpec::product(alpha / 2.0, alpha + 1.0, 1.0, 1.0, alpha)?;
                                    certify_commutator_bound(&m.symbol, a, &s.bx, &s.bxi, &spec, &opts)
                                }),
                            });
                        }
                    }
                }
            }
            CertSpec::SchattenP { p, alphas, cap, .. } => {
                for &alpha in alphas {
                    let s = &setups[&key(alpha)];
                    for m in members {
                        let opts = CertOptions { cap: *cap, chain_windows: s.windows.as_ref(), label: m.label.clone() };
                        let p = *p;
                        out.push(Job {
                            kind: "schatten_p",
                            alpha: Some(alpha),
                            label: m.label.clone(),
                            run: Box::new(move || certify_schatten_p(&m.symbol, p, &s.bx, &s.bxi, &opts)),
                        });
                    }
                }
            }
        }
    }
    out
}

/// Errors raised while computing that count as a failed certificate rather
/// than an unusable configuration.
fn is_hard_failure(e: &Error) -> bool {
    matches!(e, Error::DivisionFloor { .. } | Error::PieceNotLocalized(_) | Error::NonFinite(_))
}

fn entry_id(kind: &str, alpha: Option<f64>, label: &str) -> String {
    match alpha {
        Some(a) => format!("{kind}[alpha={a}] {label}"),
        None => format!("{kind} {label}"),
    }
}

/// Runs every certificate of `cfg`; independent certificates run concurrently.
pub fn run(cfg: &Config) -> Result<Vec<Entry>, Abort> {
    cfg.validate().map_err(Abort::Config)?;
    let grid = cfg.grid.build().map_err(Abort::Config)?;
    let setups = prepare(cfg, grid)?;
    let symbols = cfg.certificates.iter().map(|s| members(s, grid)).collect::<Result<Vec<_>, _>>()?;
    let corpus = lipschitz_corpus(grid).map_err(|e| Abort::Config(e.to_string()))?;
    let jobs = jobs(cfg, &setups, &symbols, &corpus);
    let results: Vec<(alphamod::Result<Cert>, &Job)> = jobs.par_iter().map(|j| ((j.run)(), j)).collect();
    results
        .into_iter()
        .map(|(res, job)| {
            let id = entry_id(job.kind, job.alpha, &job.label);
            let (certificate, error) = match res {
                Ok(c) => (Some(c), None),
                Err(e) if is_hard_failure(&e) => (None, Some(e.to_string())),
                Err(e) => return Err(Abort::Config(format!("{id}: {e}"))),
            };
            Ok(Entry { id, kind: job.kind, alpha: job.alpha, label: job.label.clone(), certificate, error })
        })
        .collect()
}
