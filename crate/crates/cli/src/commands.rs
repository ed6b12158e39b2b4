//! The subcommands, each turning a built problem into a report.

use serde_json::Value;

use bvquant::algebra::{verify_cdga, Poly};
use bvquant::connection::flatness_check;
use bvquant::polyvector::{mc_check, nondegeneracy_check, PoissonStructure};
use bvquant::quantisation::{
    cohomology_basis, cohomology_class_test, compatibility_check, obstruction, qme_mc_equivalence, solve_qme, ClassVerdict,
    CohomologyClass, CompatibilityVerdict, Complex, HbarSeries, Quantisation, QuantisationError, SolveOutcome, TieBreak,
};
use bvquant::toy_models::{class_formula, project_class, Orientation, ToyError};

use crate::problem::{ComplexKind, InputError, Problem};
use crate::report::{Report, Verdict};

fn engine(e: impl std::fmt::Display) -> InputError {
    InputError::Invalid(e.to_string())
}

fn strict_total(pi: &PoissonStructure, what: &str) -> Result<Poly, InputError> {
    pi.total().ok_or_else(|| InputError::field("poisson", format!("{what} needs a strict bivector")))
}

/// Record the Maurer-Cartan check; `false` when it fails.
fn mc(report: &mut Report, p: &Problem, pi: &PoissonStructure) -> bool {
    let mc = mc_check(&p.alg, pi);
    let detail = mc.violations.iter().map(|v| format!("weight {}: {}", v.weight, v.residual)).collect::<Vec<_>>().join("; ");
    report.check("maurer_cartan", Verdict::of(mc.pass), detail);
    mc.pass
}

/// Record a class test with the verdicts given to a zero and a nonzero class.
fn class_check(
    report: &mut Report,
    name: &str,
    complex: &Complex<'_>,
    class: &CohomologyClass,
    [on_zero, on_nonzero]: [Verdict; 2],
) -> Result<(), InputError> {
    match cohomology_class_test(complex, class) {
        Ok(ClassVerdict::Zero { primitive }) => {
            report.check(name, on_zero, "zero");
            report.value("class", "zero");
            report.value("primitive", primitive.to_string());
        }
        Ok(ClassVerdict::NonzeroWithinBounds) => {
            report.check(name, on_nonzero, "nonzero within bounds");
            report.value("class", "nonzero_within_bounds");
        }
        Err(QuantisationError::Inconclusive) => {
            report.check(name, Verdict::Inconclusive, "bounds exhausted");
            report.value("class", "inconclusive");
        }
        Err(e @ QuantisationError::NotCocycle(_)) => report.check(name, Verdict::Fail, e),
        Err(e) => return Err(engine(e)),
    }
    Ok(())
}

pub fn verify(report: &mut Report, p: &Problem) -> Result<(), InputError> {
    let cdga = verify_cdga(&p.alg);
    let detail = cdga.violations.iter().map(|v| format!("{v:?}")).collect::<Vec<_>>().join("; ");
    report.check("cdga", Verdict::of(cdga.pass), detail);
    let flat = flatness_check(&p.conn, p.bounds.max_weight.min(3), p.bounds.poly_degree.min(2));
    let detail = match flat.violations.first() {
        Some(v) => format!("D(D({})) = {}", v.input, v.residual),
        None => format!("{} basis elements", flat.checked),
    };
    report.check("flatness", Verdict::of(flat.pass), detail);
    if let Some(pi) = &p.pi {
        mc(report, p, pi);
        let cert = nondegeneracy_check(pi).map_err(engine)?;
        report.value("nondegenerate", cert.nondegenerate);
        report.value("reduced_determinant", cert.reduced_determinant.to_string());
    }
    if let Some(s) = &p.quantisation {
        let q = match Quantisation::new(s.clone()) {
            Ok(q) => q,
            Err(e) => {
                report.check("quantisation_shape", Verdict::Fail, e);
                return Ok(());
            }
        };
        let eq = qme_mc_equivalence(s, &p.conn).map_err(engine)?;
        report.check("qme_mc_equivalence", Verdict::of(eq.pass), "");
        report.value("qme_residual", eq.lhs.clone());
        let q = q.verify(&p.conn).map_err(engine)?;
        report.check("qme", Verdict::of(q.is_verified()), "");
    }
    Ok(())
}

pub fn obstruction_cmd(report: &mut Report, p: &Problem) -> Result<(), InputError> {
    let pi = p.require_pi()?;
    if !mc(report, p, pi) {
        return Ok(());
    }
    let total = strict_total(pi, "the obstruction class test")?;
    let ob = obstruction(&p.conn, pi, p.order, p.bounds).map_err(engine)?;
    report.value("cochain", ob.cochain.to_string());
    report.value("representative", ob.class.representative.to_string());
    let complex = Complex::PoissonTangent { alg: &p.alg, pi: total, filtered: true };
    class_check(report, "unobstructed", &complex, &ob.class, [Verdict::Pass, Verdict::Fail])
}

fn solve(p: &Problem, pi: &PoissonStructure, tie: TieBreak) -> Result<SolveOutcome, InputError> {
    solve_qme(pi, &p.conn, p.order, &p.bounds, tie).map_err(engine)
}

pub fn quantise(report: &mut Report, p: &Problem, tie: TieBreak) -> Result<(), InputError> {
    let pi = p.require_pi()?;
    if !mc(report, p, pi) {
        return Ok(());
    }
    match solve(p, pi, tie)? {
        SolveOutcome::Solved(q) => {
            report.check("qme", Verdict::of(q.is_verified()), "");
            report.value("S", q.series().to_string());
        }
        SolveOutcome::Obstructed { obstruction, residual } => {
            report.check("qme", Verdict::Fail, "first-order obstruction is nonzero within bounds");
            report.value("obstruction", obstruction.class.representative.to_string());
            report.value("residual", residual.to_string());
        }
        SolveOutcome::Unresolved { level, residual } => {
            report.check("qme", Verdict::Inconclusive, format!("no correction at level {level} within bounds"));
            report.value("level", level);
            report.value("residual", residual.to_string());
        }
    }
    Ok(())
}

pub fn compat(report: &mut Report, p: &Problem, tie: TieBreak) -> Result<(), InputError> {
    let omega = p.omega.as_ref().ok_or_else(|| InputError::field("omega", "required by this command"))?;
    let s: HbarSeries = match &p.quantisation {
        Some(s) => s.clone(),
        None => {
            let pi = p.require_pi()?;
            if !mc(report, p, pi) {
                return Ok(());
            }
            match solve(p, pi, tie)? {
                SolveOutcome::Solved(q) => q.series().clone(),
                SolveOutcome::Obstructed { .. } => {
                    report.check("qme", Verdict::Fail, "no quantisation to test against");
                    return Ok(());
                }
                SolveOutcome::Unresolved { .. } => {
                    report.check("qme", Verdict::Inconclusive, "no quantisation to test against");
                    return Ok(());
                }
            }
        }
    };
    report.value("S", s.to_string());
    let c = compatibility_check(omega, &s, &p.conn, &p.bounds).map_err(engine)?;
    let verdict = match c.verdict {
        CompatibilityVerdict::Compatible => Verdict::Pass,
        CompatibilityVerdict::IncompatibleWithinBounds => Verdict::Fail,
        CompatibilityVerdict::Inconclusive => Verdict::Inconclusive,
    };
    report.check("compatible", verdict, serde_json::to_value(c.verdict).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default());
    report.value("mu", c.mu.to_string());
    report.value("sigma", c.sigma.to_string());
    report.value("difference", c.difference.to_string());
    if let Some(y) = c.primitive {
        report.value("primitive", y.to_string());
    }
    Ok(())
}

pub fn cohomology(report: &mut Report, p: &Problem) -> Result<(), InputError> {
    let block = p.file.cohomology.as_ref().ok_or_else(|| InputError::field("cohomology", "required by this command"))?;
    let complex = match block.complex {
        ComplexKind::DeRham => Complex::DeRham(&p.alg),
        ComplexKind::RightDeRham => Complex::RightDeRham(&p.conn),
        ComplexKind::PoissonTangent | ComplexKind::FilteredPoissonTangent => Complex::PoissonTangent {
            alg: &p.alg,
            pi: strict_total(p.require_pi()?, "the Poisson tangent complex")?,
            filtered: block.complex == ComplexKind::FilteredPoissonTangent,
        },
    };
    match &p.representative {
        Some(rep) => {
            let class = CohomologyClass { representative: rep.clone(), complex: complex.tag(), degree: block.degree, bounds: p.bounds };
            class_check(report, "class_test", &complex, &class, [Verdict::Pass, Verdict::Pass])?;
        }
        None => {
            let basis = cohomology_basis(&complex, block.degree, &p.bounds);
            report.check("basis", Verdict::Pass, "");
            report.value("rank", basis.len());
            report.value("basis", Value::from(basis.iter().map(|c| c.representative.to_string()).collect::<Vec<_>>()));
        }
    }
    Ok(())
}

pub fn toy_class(report: &mut Report, p: &Problem, orientation: Orientation) -> Result<(), InputError> {
    let g = p.toy.as_ref().ok_or_else(|| InputError::field("toy", "required by this command"))?;
    let pi = p.require_pi()?;
    report.check("cdga", Verdict::of(verify_cdga(&p.alg).pass), "");
    if !mc(report, p, pi) {
        return Ok(());
    }
    let cert = nondegeneracy_check(pi).map_err(engine)?;
    report.check("nondegenerate", Verdict::of(cert.nondegenerate), cert.reduced_determinant.to_string());
    let s = match &p.quantisation {
        Some(s) => s.clone(),
        None => HbarSeries::term(1, strict_total(pi, "toy-class")?, p.order),
    };
    match class_formula(g, &s) {
        Ok(_) => report.check("class_formula", Verdict::Pass, ""),
        Err(ToyError::Mismatch(at)) => report.check("class_formula", Verdict::Fail, format!("mismatch at {at}")),
        Err(e) => return Err(engine(e)),
    }
    let proj = project_class(g, &s, orientation).map_err(engine)?;
    report.value("projected", proj.series.to_string());
    report.value("representative", proj.class.representative.to_string());
    let base = g.base_algebra();
    let complex = Complex::DeRham(&base);
    match cohomology_class_test(&complex, &proj.class) {
        Ok(ClassVerdict::Zero { .. }) => report.value("de_rham_class", "zero"),
        Ok(ClassVerdict::NonzeroWithinBounds) => report.value("de_rham_class", "nonzero_within_bounds"),
        Err(QuantisationError::Inconclusive) => report.value("de_rham_class", "inconclusive"),
        Err(e @ QuantisationError::NotCocycle(_)) => report.check("closed", Verdict::Fail, e),
        Err(e) => return Err(engine(e)),
    }
    Ok(())
}
