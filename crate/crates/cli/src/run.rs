//! Executes the selected suites over a panel. Instances run in parallel;
//! results are collected in configuration order.

use std::time::Instant;

use qhahn_core::algebra::{
    check_casimir, check_meta_relations, check_potential, check_rqhahn_relations, check_structure_constants,
    AlgebraKind,
};
use qhahn_core::brf::{check_biorthogonality, check_partner, check_weight_involution};
use qhahn_core::gevp::{
    check_contiguity, check_difference_equation, check_gevp, check_recurrence, check_tridiagonal_actions,
};
use qhahn_core::operators::{basis_consistency, verify_factorization};
use qhahn_core::qcore::int;
use qhahn_core::wilson::{
    check_hahn_biorthogonality, check_limit_consistency, check_wilson_biorthogonality, qto1_convergence_check,
    wilson_limit_check, HahnParams, WilsonParams,
};
use qhahn_core::{validate_params, CheckReport, QParams, Violation};
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::config::{HahnSpec, InstanceSpec, LimitSettings, PanelConfig, Suite, WilsonSpec};
use crate::report::{exact, CheckEntry, InstanceReport, SuiteReport};

type Check = qhahn_core::Result<CheckReport>;

fn entry(suite: Suite, name: &str, r: Check) -> CheckEntry {
    let (check, outcome) = match r {
        Ok(r) => (r.check.clone(), Ok(r)),
        Err(e) => (name.to_string(), Err(e.to_string())),
    };
    CheckEntry { suite: suite.name(), check, outcome }
}

fn basis_report(p: &QParams) -> Check {
    let mut r = CheckReport::new("basis_consistency");
    for op in basis_consistency(p)? {
        r.fail(Violation::new(format!("point and phi matrices of {} disagree", op.name()), int(1)));
    }
    Ok(r)
}

fn limit_sweep(p: &QParams, l: &LimitSettings) -> Check {
    if p.q() >= &int(1) {
        Ok(CheckReport::skip("wilson_limit", "the q^a sweep needs q < 1"))
    } else if p.n() > l.max_n {
        Ok(CheckReport::skip("wilson_limit", format!("N = {} above limits.max_n = {}", p.n(), l.max_n)))
    } else {
        wilson_limit_check(p, &l.qc, &l.m)
    }
}

fn qhahn_checks(s: Suite, p: &QParams, l: &LimitSettings) -> Vec<CheckEntry> {
    let runs: Vec<(&str, Check)> = match s {
        Suite::Gevp => vec![
            ("gevp", check_gevp(p)),
            ("difference_equation", check_difference_equation(p)),
            ("recurrence", check_recurrence(p)),
            ("tridiagonal_actions", check_tridiagonal_actions(p)),
            ("contiguity", check_contiguity(p)),
            ("factorization", verify_factorization(p).map(|f| f.to_check_report())),
            ("basis_consistency", basis_report(p)),
        ],
        Suite::Biortho => vec![
            ("biorthogonality", check_biorthogonality(p)),
            ("partner", check_partner(p)),
            ("weight_involution", check_weight_involution(p)),
        ],
        Suite::Algebra => vec![
            ("rqhahn_relations", check_rqhahn_relations(p)),
            ("meta_relations", check_meta_relations(p)),
            ("structure_constants", check_structure_constants(p)),
        ],
        Suite::Casimir => vec![
            ("casimir_rqhahn", check_casimir(AlgebraKind::RationalHahn, p)),
            ("casimir_meta", check_casimir(AlgebraKind::Meta, p)),
        ],
        Suite::Potential => vec![
            ("potential_rqhahn", check_potential(AlgebraKind::RationalHahn, p)),
            ("potential_meta", check_potential(AlgebraKind::Meta, p)),
        ],
        Suite::Limits => vec![("limit_consistency", check_limit_consistency(p)), ("wilson_limit", limit_sweep(p, l))],
        Suite::Wilson | Suite::Hahn => Vec::new(),
    };
    runs.into_iter().map(|(name, r)| entry(s, name, r)).collect()
}

enum Job<'a> {
    QHahn(&'a InstanceSpec),
    Wilson(&'a WilsonSpec),
    Hahn(&'a HahnSpec),
}

fn params(pairs: &[(&str, Value)]) -> Map<String, Value> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn run_qhahn(spec: &InstanceSpec, suites: &[Suite], l: &LimitSettings) -> InstanceReport {
    let mut rep = InstanceReport {
        kind: "qhahn",
        name: spec.name.clone(),
        params: params(&[("q", exact(&spec.q)), ("A", exact(&spec.a)), ("B", exact(&spec.b)), ("N", json!(spec.n))]),
        skip_reasons: None,
        checks: Vec::new(),
        seconds: 0.0,
    };
    let p = match QParams::new(spec.q.clone(), spec.a.clone(), spec.b.clone(), spec.n) {
        Ok(p) => p,
        Err(e) => {
            rep.skip_reasons = Some(vec![e.to_string()]);
            return rep;
        }
    };
    let v = validate_params(&p, p.n());
    if !v.is_valid() {
        rep.skip_reasons = Some(v.reasons);
        return rep;
    }
    for s in suites.iter().filter(|s| s.uses_instances()) {
        rep.checks.extend(qhahn_checks(*s, &p, l));
    }
    rep
}

fn run_wilson(spec: &WilsonSpec) -> InstanceReport {
    let mut rep = InstanceReport {
        kind: "wilson",
        name: spec.name.clone(),
        params: params(&[
            ("q", exact(&spec.q)),
            ("qa", exact(&spec.qa)),
            ("qc", exact(&spec.qc)),
            ("qd", exact(&spec.qd)),
            ("qe", exact(&spec.qe)),
            ("N", json!(spec.n)),
        ]),
        skip_reasons: None,
        checks: Vec::new(),
        seconds: 0.0,
    };
    match WilsonParams::new(spec.q.clone(), spec.qa.clone(), spec.qc.clone(), spec.qd.clone(), spec.qe.clone(), spec.n)
    {
        Ok(wp) => rep.checks.push(entry(Suite::Wilson, "wilson_biorthogonality", check_wilson_biorthogonality(&wp))),
        Err(e) => rep.skip_reasons = Some(vec![e.to_string()]),
    }
    rep
}

fn run_hahn(spec: &HahnSpec, l: &LimitSettings) -> InstanceReport {
    let mut rep = InstanceReport {
        kind: "hahn",
        name: spec.name.clone(),
        params: params(&[("alpha", exact(&spec.alpha)), ("beta", exact(&spec.beta)), ("N", json!(spec.n))]),
        skip_reasons: None,
        checks: Vec::new(),
        seconds: 0.0,
    };
    match HahnParams::new(spec.alpha.clone(), spec.beta.clone(), spec.n) {
        Ok(hp) => {
            rep.checks.push(entry(Suite::Hahn, "hahn_biorthogonality", check_hahn_biorthogonality(&hp)));
            if spec.convergence {
                rep.checks.push(entry(Suite::Hahn, "qto1_convergence", qto1_convergence_check(&hp, &l.h)));
            }
        }
        Err(e) => rep.skip_reasons = Some(vec![e.to_string()]),
    }
    rep
}

/// Runs `suites` (already validated with [`PanelConfig::select`]).
pub fn run(cfg: &PanelConfig, suites: &[Suite]) -> SuiteReport {
    let start = Instant::now();
    let mut jobs = Vec::new();
    if suites.iter().any(|s| s.uses_instances()) {
        jobs.extend(cfg.instances.iter().map(Job::QHahn));
    }
    if suites.contains(&Suite::Wilson) {
        jobs.extend(cfg.wilson.iter().map(Job::Wilson));
    }
    if suites.contains(&Suite::Hahn) {
        jobs.extend(cfg.hahn.iter().map(Job::Hahn));
    }
    let instances = jobs
        .par_iter()
        .map(|job| {
            let t = Instant::now();
            let mut rep = match job {
                Job::QHahn(s) => run_qhahn(s, suites, &cfg.limits),
                Job::Wilson(s) => run_wilson(s),
                Job::Hahn(s) => run_hahn(s, &cfg.limits),
            };
            rep.seconds = t.elapsed().as_secs_f64();
            rep
        })
        .collect();
    SuiteReport {
        suites: suites.iter().map(|s| s.name()).collect(),
        config_hash: cfg.hash.clone(),
        instances,
        seconds: start.elapsed().as_secs_f64(),
    }
}
