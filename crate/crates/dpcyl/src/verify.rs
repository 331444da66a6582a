//! Independent checks of a cylinder certificate against the surface alone.

use crate::cylinder::{CylinderCertificate, Pattern};
use crate::fibration::{fiber_groups, FiberGroup};
use crate::lattice::DivisorClass;
use crate::rational::{fmt_q, q, Q};
use crate::surface::{mumford_pullback, ClassOnS, SurfaceModel};
use num_traits::{Signed, Zero};
use serde::Serialize;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PatternDetail {
    /// "fiber(m)" or "star(v)" when the removed set matches, otherwise empty.
    pub matched: String,
    pub removed: usize,
    pub full_fibers: usize,
    pub fibers_missing_one_end: usize,
    pub general_fibers: usize,
    pub gamma: Option<DivisorClass>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub equivalence_ok: bool,
    pub effective_ok: bool,
    pub roots_covered_ok: bool,
    pub pattern_ok: bool,
    pub pattern_detail: PatternDetail,
    pub failures: Vec<String>,
}

impl VerifyReport {
    pub fn accepted(&self) -> bool {
        self.equivalence_ok && self.effective_ok && self.roots_covered_ok && self.pattern_ok
    }
}

/// Classes that carry an irreducible curve: roots, lines, the fiber class,
/// and 0-curves of anticanonical degree 2 that are sections of the ruling.
fn is_curve_class(surface: &SurfaceModel, c: &DivisorClass, f: &DivisorClass) -> bool {
    if surface.is_root(c) || surface.is_line(c) || c == f {
        return true;
    }
    c.self_int().is_zero()
        && c.dot(surface.canonical()) == q(-2)
        && c.dot(f) == q(1)
        && surface.negative_curves().iter().all(|n| !c.dot(n).is_negative())
}

/// Checks effectiveness, Q-linear equivalence with `h`, that every root is
/// removed, and that the removed curves form one of the ruled patterns.
pub fn verify_certificate(surface: &SurfaceModel, h: &ClassOnS, cert: &CylinderCertificate) -> VerifyReport {
    let mut rep = VerifyReport::default();
    let f = &cert.fiber_class;
    let k = surface.k();
    if h.rep.k() != k || f.k() != k || cert.section.k() != k {
        rep.failures.push("rank mismatch between surface and certificate".into());
        return rep;
    }

    rep.effective_ok = true;
    for e in &cert.support {
        if e.class.k() != k {
            rep.effective_ok = false;
            rep.failures.push(format!("{}: wrong rank", e.curve));
            continue;
        }
        if e.coeff.is_negative() {
            rep.effective_ok = false;
            rep.failures.push(format!("{}: negative coefficient {}", e.curve, fmt_q(&e.coeff)));
        }
        if !is_curve_class(surface, &e.class, f) {
            rep.effective_ok = false;
            rep.failures.push(format!("{}: {} is not a curve class", e.curve, e.class));
        }
    }
    if let Some(b) = cert.epsilon_bounds.iter().find(|b| cert.epsilon >= **b) {
        rep.effective_ok = false;
        rep.failures.push(format!("epsilon {} not below bound {}", fmt_q(&cert.epsilon), fmt_q(b)));
    }
    if cert.epsilon.is_negative() || (!cert.epsilon_bounds.is_empty() && cert.epsilon.is_zero()) {
        rep.effective_ok = false;
        rep.failures.push(format!("epsilon {} is not positive", fmt_q(&cert.epsilon)));
    }

    if rep.failures.iter().all(|m| !m.ends_with("wrong rank")) {
        let mut sum = DivisorClass::zero(k);
        let mut ok = true;
        for e in &cert.support {
            match mumford_pullback(surface, &e.class) {
                Ok(p) => sum.add_scaled(&e.coeff, &p.rep),
                Err(err) => {
                    ok = false;
                    rep.failures.push(format!("{}: {err}", e.curve));
                }
            }
        }
        rep.equivalence_ok = ok && sum == h.rep;
        if ok && !rep.equivalence_ok {
            rep.failures.push(format!("D pulls back to {sum}, H is {}", h.rep));
        }
    }

    let removed: Vec<&DivisorClass> = cert.removed.iter().map(|c| &c.class).collect();
    let missing: Vec<&DivisorClass> = surface.roots().iter().filter(|r| !removed.contains(r)).collect();
    rep.roots_covered_ok = missing.is_empty();
    for r in missing {
        rep.failures.push(format!("root {r} is not removed"));
    }

    let (ok, detail, msgs) = check_pattern(surface, cert, &removed);
    rep.pattern_ok = ok;
    rep.pattern_detail = detail;
    rep.failures.extend(msgs);
    rep
}

fn check_pattern(surface: &SurfaceModel, cert: &CylinderCertificate, removed: &[&DivisorClass]) -> (bool, PatternDetail, Vec<String>) {
    let mut msgs = Vec::new();
    let mut detail = PatternDetail {
        removed: removed.len(),
        ..Default::default()
    };
    let f = &cert.fiber_class;
    let d0 = &cert.section;

    // The removed set must be exactly the support of D plus the roots.
    let mut expected: Vec<&DivisorClass> = cert
        .support
        .iter()
        .filter(|e| e.coeff.is_positive())
        .map(|e| &e.class)
        .chain(surface.roots())
        .collect();
    expected.sort();
    expected.dedup();
    let mut given = removed.to_vec();
    given.sort();
    let dup = given.windows(2).any(|w| w[0] == w[1]);
    if dup || given != expected {
        msgs.push("removed set differs from Supp(D) together with the roots".into());
    }

    let groups = match fiber_groups(surface, f, d0) {
        Ok(g) => g,
        Err(e) => {
            msgs.push(format!("ruling: {e}"));
            return (false, detail, msgs);
        }
    };
    let in_group = |c: &DivisorClass| groups.iter().any(|g| g.curves.contains(c));
    if !removed.contains(&d0) {
        msgs.push("section D_0 is not removed".into());
    }
    let general = removed.iter().filter(|c| **c == f).count();
    detail.general_fibers = general;
    let others: Vec<&DivisorClass> = removed
        .iter()
        .copied()
        .filter(|c| *c != d0 && *c != f && !in_group(c))
        .collect();
    let full: Vec<&FiberGroup> = groups
        .iter()
        .filter(|g| g.curves.iter().all(|c| removed.contains(&c)))
        .collect();
    detail.full_fibers = full.len() + general;

    match cert.pattern {
        Pattern::Fiber(m) => {
            if !others.is_empty() {
                msgs.push(format!("{} removed curves are neither D_0 nor in a fiber", others.len()));
            }
            if general != 1 {
                msgs.push(format!("{general} general fibers removed, expected 1"));
            }
            if full.len() != groups.len() {
                msgs.push(format!("{} of {} singular fibers fully removed", full.len(), groups.len()));
            }
            if m != groups.len() {
                msgs.push(format!("pattern names {m} fibers, the ruling has {}", groups.len()));
            }
            if msgs.is_empty() {
                detail.matched = format!("fiber({m})");
            }
        }
        Pattern::Star(v) => {
            let gamma = match others.as_slice() {
                [g] => Some(*g),
                _ => {
                    msgs.push(format!("{} candidate second sections, expected 1", others.len()));
                    None
                }
            };
            if let Some(g) = gamma {
                detail.gamma = Some(g.clone());
                check_star(surface, f, d0, g, v, &groups, removed, general, &full, &mut detail, &mut msgs);
            }
            if msgs.is_empty() {
                detail.matched = format!("star({v})");
            }
        }
    }
    (msgs.is_empty(), detail, msgs)
}

#[allow(clippy::too_many_arguments)]
fn check_star(
    surface: &SurfaceModel,
    f: &DivisorClass,
    d0: &DivisorClass,
    gamma: &DivisorClass,
    variant: u8,
    groups: &[FiberGroup],
    removed: &[&DivisorClass],
    general: usize,
    full: &[&FiberGroup],
    detail: &mut PatternDetail,
    msgs: &mut Vec<String>,
) {
    if gamma.dot(f) != q(1) {
        msgs.push(format!("Gamma {gamma} is not a section"));
    }
    let curve = surface.is_root(gamma)
        || surface.is_line(gamma)
        || (gamma.self_int().is_zero()
            && gamma.dot(surface.canonical()) == q(-2)
            && surface.negative_curves().iter().all(|n| !gamma.dot(n).is_negative()));
    if !curve {
        msgs.push(format!("Gamma {gamma} is not a curve class"));
    }
    let meet = gamma.dot(d0);
    match variant {
        2 if meet.is_zero() => {}
        3 if meet == q(1) => {}
        _ => msgs.push(format!("variant {variant} with Gamma.D_0 = {}", fmt_q(&meet))),
    }
    if full.len() + general != 1 {
        msgs.push(format!("{} fibers fully removed, expected 1", full.len() + general));
    }
    if variant == 3 && general != 1 {
        msgs.push("variant 3 needs the extra full fiber through Gamma and D_0".into());
    }
    let sections = gamma + d0;
    for g in groups {
        let kept: Vec<usize> = (0..g.curves.len())
            .filter(|&i| !removed.contains(&&g.curves[i]))
            .collect();
        match kept.as_slice() {
            [] => {}
            [i] => {
                let e = &g.curves[*i];
                let neighbours = g
                    .curves
                    .iter()
                    .filter(|c| *c != e && c.dot(e).is_positive())
                    .count();
                let end = surface.is_line(e) && g.multiplicities[*i] == 1 && neighbours <= 1;
                if !end {
                    msgs.push(format!("kept curve {e} is not a reduced terminal (-1)-curve"));
                } else if sections.dot(e) != Q::from_integer(1.into()) {
                    msgs.push(format!("kept curve {e} meets Gamma + D_0 {} times", fmt_q(&sections.dot(e))));
                } else {
                    detail.fibers_missing_one_end += 1;
                }
            }
            more => msgs.push(format!("{} curves of one singular fiber are kept", more.len())),
        }
    }
}
