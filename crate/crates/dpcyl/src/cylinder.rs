//! Explicit effective Q-divisors D ~ H whose support complement is a cylinder.

use crate::error::{Error, Result};
use crate::fibration::{fiber_groups, find_fibrations, select_fibration, FibrationData};
use crate::lattice::DivisorClass;
use crate::linalg::solve;
use crate::linsys::{gamma_class, r_prime};
use crate::rational::{q, Q};
use crate::surface::{is_ample, mumford_pullback, ClassOnS, SurfaceModel};
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

/// H on S with its coordinates in the basis {D_0, F, E_1, ..., E_{r+s}}.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AmpleDivisor {
    pub on_s_tilde: ClassOnS,
    /// Zero when n >= 2, where D_0 is contracted.
    #[serde(with = "crate::rational::serde_q")]
    pub a0: Q,
    #[serde(with = "crate::rational::serde_q")]
    pub a: Q,
    #[serde(with = "crate::rational::serde_q::vec")]
    pub b: Vec<Q>,
    #[serde(with = "crate::rational::serde_q::vec")]
    pub c: Vec<Q>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportEntry {
    pub curve: String,
    pub class: DivisorClass,
    #[serde(with = "crate::rational::serde_q")]
    pub coeff: Q,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamedCurve {
    pub curve: String,
    pub class: DivisorClass,
}

/// `Fiber(m)`: a section plus m + 1 full fibers are removed.
/// `Star(v)`: a second section, one full fiber and one end of every other
/// singular fiber; v = 2 when the sections are disjoint, 3 when they meet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "param", rename_all = "lowercase")]
pub enum Pattern {
    Fiber(usize),
    Star(u8),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CylinderCertificate {
    pub lemma: String,
    #[serde(with = "crate::rational::serde_q")]
    pub epsilon: Q,
    #[serde(with = "crate::rational::serde_q::vec")]
    pub epsilon_bounds: Vec<Q>,
    /// The ruling and the section D_0 the pattern refers to.
    pub fiber_class: DivisorClass,
    pub section: DivisorClass,
    pub support: Vec<SupportEntry>,
    pub pattern: Pattern,
    pub removed: Vec<NamedCurve>,
}

/// Construction knobs. `epsilon` replaces the automatic choice and disables
/// the internal sanity checks, so that deliberately broken certificates can
/// be produced.
#[derive(Clone, Debug, Default)]
pub struct Options {
    pub epsilon: Option<Q>,
}

/// Half the smallest bound, or 1 when nothing constrains epsilon.
pub fn choose_epsilon(bounds: &[Q]) -> Result<Q> {
    if let Some(b) = bounds.iter().find(|b| !b.is_positive()) {
        return Err(Error::Internal(format!("non-positive epsilon bound {b}")));
    }
    Ok(match bounds.iter().min() {
        Some(m) => m / q(2),
        None => q(1),
    })
}

fn internal(msg: impl Into<String>) -> Error {
    Error::Internal(msg.into())
}

fn require(ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Hypothesis(what.to_string()))
    }
}

fn assert_pos(x: &Q, what: &str) -> Result<()> {
    if x.is_positive() {
        Ok(())
    } else {
        Err(internal(format!("{what} = {x} is not positive")))
    }
}

fn pullbacks(surface: &SurfaceModel, classes: &[DivisorClass]) -> Result<Vec<DivisorClass>> {
    classes
        .iter()
        .map(|c| mumford_pullback(surface, c).map(|p| p.rep))
        .collect()
}

/// Solves `target = sum x_i pullback(basis_i)` exactly.
fn solve_in(surface: &SurfaceModel, basis: &[DivisorClass], target: &DivisorClass) -> Result<Vec<Q>> {
    let cols = pullbacks(surface, basis)?;
    let a: Vec<Vec<Q>> = (0..=surface.k())
        .map(|row| cols.iter().map(|c| c.coeffs()[row].clone()).collect())
        .collect();
    solve(&a, target.coeffs()).ok_or_else(|| internal("curve classes do not form a basis of Cl(S)"))
}

fn coords_basis(fib: &FibrationData) -> Vec<DivisorClass> {
    let mut basis = Vec::new();
    if fib.n <= 1 {
        basis.push(fib.section.clone());
    }
    basis.push(fib.fiber_class.clone());
    basis.extend(fib.i1().iter().map(|f| f.e().class.clone()));
    basis.extend(fib.i2().iter().map(|f| f.e().class.clone()));
    basis
}

/// Coordinates of an ample H with respect to the fibration.
pub fn coords_of(surface: &SurfaceModel, fib: &FibrationData, h: &ClassOnS) -> Result<AmpleDivisor> {
    if h.rep.k() != surface.k() {
        return Err(Error::RankMismatch(h.rep.k(), surface.k()));
    }
    if !is_ample(surface, h)? {
        return Err(Error::NotAmple);
    }
    let x = solve_in(surface, &coords_basis(fib), &h.rep)?;
    let mut it = x.into_iter();
    let a0 = if fib.n <= 1 { it.next().unwrap() } else { q(0) };
    let a = it.next().unwrap();
    let b: Vec<Q> = it.by_ref().take(fib.r).collect();
    let c: Vec<Q> = it.collect();
    if let Some(bi) = b.iter().find(|bi| !bi.is_negative()) {
        return Err(internal(format!("coefficient {bi} of an I-1 end is not negative")));
    }
    Ok(AmpleDivisor {
        on_s_tilde: h.clone(),
        a0,
        a,
        b,
        c,
    })
}

impl AmpleDivisor {
    /// Rebuilds the class on the resolution from the coordinates.
    pub fn reconstruct(&self, surface: &SurfaceModel, fib: &FibrationData) -> Result<ClassOnS> {
        let basis = coords_basis(fib);
        let mut coeffs = Vec::new();
        if fib.n <= 1 {
            coeffs.push(self.a0.clone());
        }
        coeffs.push(self.a.clone());
        coeffs.extend(self.b.iter().cloned());
        coeffs.extend(self.c.iter().cloned());
        let mut rep = DivisorClass::zero(surface.k());
        for (x, p) in coeffs.iter().zip(pullbacks(surface, &basis)?) {
            rep.add_scaled(x, &p);
        }
        ClassOnS::new(surface, rep)
    }
}

/// s' = number of negative c_j and d_{r,s'} = a + sum b_i + sum of the negative c_j.
pub fn d_rsprime(h: &AmpleDivisor) -> (usize, Q) {
    let mut value = &h.a + h.b.iter().sum::<Q>();
    let mut sp = 0;
    for c in h.c.iter().filter(|c| c.is_negative()) {
        value += c;
        sp += 1;
    }
    (sp, value)
}

/// Accumulates named terms of D; repeated names add up.
struct Terms(Vec<SupportEntry>);

impl Terms {
    fn new() -> Self {
        Terms(Vec::new())
    }

    fn add(&mut self, curve: &str, class: &DivisorClass, coeff: Q) {
        match self.0.iter_mut().find(|e| e.curve == curve) {
            Some(e) => e.coeff += coeff,
            None => self.0.push(SupportEntry {
                curve: curve.to_string(),
                class: class.clone(),
                coeff,
            }),
        }
    }
}

struct Draft {
    lemma: &'static str,
    epsilon: Q,
    bounds: Vec<Q>,
    fiber_class: DivisorClass,
    section: DivisorClass,
    terms: Terms,
    pattern: Pattern,
    /// Names for roots that are not fiber components (second sections).
    extra_names: Vec<NamedCurve>,
}

impl Draft {
    fn finish(self, surface: &SurfaceModel, fib: Option<&FibrationData>, h: &ClassOnS, opts: &Options) -> Result<CylinderCertificate> {
        let support: Vec<SupportEntry> = self
            .terms
            .0
            .into_iter()
            .filter(|e| !e.coeff.is_zero())
            .collect();
        let mut removed: Vec<NamedCurve> = support
            .iter()
            .filter(|e| e.coeff.is_positive())
            .map(|e| NamedCurve {
                curve: e.curve.clone(),
                class: e.class.clone(),
            })
            .collect();
        let named = fib.map(|f| f.named()).unwrap_or_default();
        for (i, r) in surface.roots().iter().enumerate() {
            if removed.iter().any(|c| &c.class == r) {
                continue;
            }
            let curve = self
                .extra_names
                .iter()
                .find(|c| &c.class == r)
                .map(|c| c.curve.clone())
                .or_else(|| {
                    named
                        .iter()
                        .find(|(name, c)| *c == r && name.as_str() != "F")
                        .map(|(name, _)| name.clone())
                })
                .unwrap_or_else(|| format!("R_{}", i + 1));
            removed.push(NamedCurve {
                curve,
                class: r.clone(),
            });
        }
        let cert = CylinderCertificate {
            lemma: self.lemma.to_string(),
            epsilon: self.epsilon,
            epsilon_bounds: self.bounds,
            fiber_class: self.fiber_class,
            section: self.section,
            support,
            pattern: self.pattern,
            removed,
        };
        if opts.epsilon.is_none() {
            if let Some(e) = cert.support.iter().find(|e| !e.coeff.is_positive()) {
                return Err(internal(format!("coefficient {} on {}", e.coeff, e.curve)));
            }
            let mut sum = DivisorClass::zero(surface.k());
            for e in &cert.support {
                sum.add_scaled(&e.coeff, &mumford_pullback(surface, &e.class)?.rep);
            }
            if sum != h.rep {
                return Err(internal(format!("{} produced {sum} instead of {}", cert.lemma, h.rep)));
            }
        }
        Ok(cert)
    }
}

fn pick_epsilon(bounds: &[Q], opts: &Options) -> Result<Q> {
    match &opts.epsilon {
        Some(e) => Ok(e.clone()),
        None => choose_epsilon(bounds),
    }
}

/// The construction for d_{r,s'} > 0: the complement of D_0, a general
/// fiber and every singular fiber.
pub fn cylinder_general(surface: &SurfaceModel, fib: &FibrationData, h: &AmpleDivisor, opts: &Options) -> Result<CylinderCertificate> {
    let (_, d) = d_rsprime(h);
    require(d.is_positive(), "d_{r,s'} > 0")?;
    let r = fib.r;
    let (epsilon, bounds) = if r > 0 {
        let bounds = vec![&d / q(r as i64)];
        (pick_epsilon(&bounds, opts)?, bounds)
    } else {
        (q(0), vec![])
    };
    let share = (&d - q(r as i64) * &epsilon) / q((fib.s + fib.t + 1) as i64);
    let mut t = Terms::new();
    if fib.n <= 1 {
        t.add("D_0", &fib.section, h.a0.clone());
    }
    for (f, b) in fib.i1().iter().zip(&h.b) {
        t.add(&f.e().name, &f.e().class, epsilon.clone());
        let ep = f.e_prime().unwrap();
        t.add(&ep.name, &ep.class, &epsilon - b);
    }
    for (f, c) in fib.i2().iter().zip(&h.c) {
        let (e, ep) = (f.e(), f.e_prime().unwrap());
        if c.is_negative() {
            t.add(&ep.name, &ep.class, &share - c);
            t.add(&e.name, &e.class, share.clone());
        } else {
            t.add(&e.name, &e.class, &share + c);
            t.add(&ep.name, &ep.class, share.clone());
        }
    }
    t.add("F", &fib.fiber_class, share.clone());
    for f in fib.ii() {
        t.add(&f.e().name, &f.e().class, q(2) * &share);
    }
    Draft {
        lemma: "fiber-general",
        epsilon,
        bounds,
        fiber_class: fib.fiber_class.clone(),
        section: fib.section.clone(),
        terms: t,
        pattern: Pattern::Fiber(r + fib.s + fib.t),
        extra_names: vec![],
    }
    .finish(surface, Some(fib), &h.on_s_tilde, opts)
}

/// Reorders the I-1 fibers so that b_i / alpha_i is non-decreasing (stable).
fn sort_by_ratio(fib: &FibrationData, h: &AmpleDivisor) -> (FibrationData, AmpleDivisor) {
    let alpha = fib.alpha();
    let ratio = |i: usize| &h.b[i] / q(alpha[i] as i64);
    let mut perm: Vec<usize> = (0..fib.r).collect();
    perm.sort_by(|&i, &j| ratio(i).cmp(&ratio(j)));
    let mut h2 = h.clone();
    h2.b = perm.iter().map(|&i| h.b[i].clone()).collect();
    (fib.reorder_i1(&perm), h2)
}

/// Shared bookkeeping for the constructions built around a second section Gamma.
struct Sorted {
    fib: FibrationData,
    h: AmpleDivisor,
    alpha: Vec<Q>,
}

impl Sorted {
    fn new(fib: &FibrationData, h: &AmpleDivisor) -> Self {
        let (fib, h) = sort_by_ratio(fib, h);
        let alpha = fib.alpha().iter().map(|&a| q(a as i64)).collect();
        Sorted { fib, h, alpha }
    }

    /// b_i / alpha_i for the 1-based index i.
    fn ratio(&self, i: usize) -> Q {
        &self.h.b[i - 1] / &self.alpha[i - 1]
    }

    /// The largest i <= upto with b_i / alpha_i < bp, and alpha_1 + ... + alpha_i.
    fn below(&self, upto: usize, bp: &Q) -> Option<(usize, i64)> {
        let i = (1..=upto).rev().find(|&i| &self.ratio(i) < bp)?;
        Some((i, self.fib.alpha()[..i].iter().map(|&a| a as i64).sum()))
    }

    fn sum_b(&self) -> Q {
        self.h.b.iter().sum()
    }

    /// alpha_i (bp - b_i/alpha_i - eps) E_i' for i <= split, and
    /// alpha_j (b_j/alpha_j - bp + eps) E_j (or alpha_j eps E_j when `flat`) beyond.
    fn i1_terms(&self, t: &mut Terms, split: usize, bp: &Q, eps: &Q, flat: bool) {
        for (i, f) in self.fib.i1().iter().enumerate() {
            let (ai, bi) = (&self.alpha[i], &self.h.b[i]);
            if i < split {
                let ep = f.e_prime().unwrap();
                t.add(&ep.name, &ep.class, ai * bp - bi - ai * eps);
            } else if flat {
                t.add(&f.e().name, &f.e().class, ai * eps);
            } else {
                t.add(&f.e().name, &f.e().class, bi - ai * bp + ai * eps);
            }
        }
    }

    fn draft(&self, lemma: &'static str, epsilon: Q, bounds: Vec<Q>, t: Terms, variant: u8) -> Draft {
        Draft {
            lemma,
            epsilon,
            bounds,
            fiber_class: self.fib.fiber_class.clone(),
            section: self.fib.section.clone(),
            terms: t,
            pattern: Pattern::Star(variant),
            extra_names: vec![],
        }
    }
}

fn positive_quotient(num: &Q, den: i64) -> Option<Q> {
    (den > 0).then(|| num / q(den))
}

/// One I-2 fiber with beta' = 1, no type II fibers, degree 5 - n, n >= 2.
pub fn case_s1t0(surface: &SurfaceModel, fib: &FibrationData, h: &AmpleDivisor, opts: &Options) -> Result<CylinderCertificate> {
    let n = fib.n;
    require(
        fib.s == 1 && fib.t == 0 && fib.beta_prime() == [1] && surface.degree() == 5 - n && n >= 2,
        "s = 1, t = 0, beta' = 1, degree 5 - n and n >= 2",
    )?;
    let s = Sorted::new(fib, h);
    let gamma = gamma_class(&s.fib, 1, surface.degree())?;
    let (a, c) = (&s.h.a, &s.h.c[0]);
    let beta = s.fib.beta()[0] as i64;
    let tail = &s.fib.i2()[0];
    let (e, ep) = (tail.e(), tail.e_prime().unwrap());
    let r = s.fib.r;
    let mut t = Terms::new();

    if r == 0 {
        require(c.is_negative(), "c < 0")?;
        let coeff = a + q(n) * c / q(n + 1);
        assert_pos(&coeff, "a + nc/(n+1)")?;
        t.add("Gamma", &gamma, -c / q(n + 1));
        t.add(&e.name, &e.class, coeff.clone());
        t.add(&ep.name, &ep.class, coeff);
        return s
            .draft("s1t0-no-i1", q(0), vec![], t, 2)
            .finish(surface, Some(&s.fib), &h.on_s_tilde, opts);
    }

    let bp = s.ratio(r);
    let sum_b = s.sum_b();
    if beta >= 2 && c.is_negative() && bp < c / q(beta - 1) {
        let slope = c / q(beta - 1);
        let coeff = a + &sum_b + q(beta - 2) * &slope;
        assert_pos(&coeff, "a + sum b + (beta-2)c/(beta-1)")?;
        t.add("Gamma", &gamma, -&slope);
        s.i1_terms(&mut t, r, &slope, &q(0), false);
        t.add(&e.name, &e.class, coeff.clone());
        t.add(&ep.name, &ep.class, coeff);
        return s
            .draft("s1t0-steep", q(0), vec![], t, 2)
            .finish(surface, Some(&s.fib), &h.on_s_tilde, opts);
    }

    let d = a + &sum_b - &bp + c;
    let dp = a + &sum_b + q(beta - 2) * &bp;
    assert_pos(&d, "d")?;
    assert_pos(&dp, "d'")?;
    let (split, low) = s.below(r - 1, &bp).unwrap_or((0, 0));
    let x1 = n - low - beta + 1;
    let x2 = n - low;
    let mut bounds = Vec::new();
    if split > 0 {
        bounds.push(&bp - s.ratio(split));
    }
    bounds.extend(positive_quotient(&d, x1));
    bounds.extend(positive_quotient(&dp, x2));
    let eps = pick_epsilon(&bounds, opts)?;
    t.add("Gamma", &gamma, -&bp + &eps);
    s.i1_terms(&mut t, split, &bp, &eps, true);
    t.add(&e.name, &e.class, &d - q(x1) * &eps);
    t.add(&ep.name, &ep.class, &dp - q(x2) * &eps);
    let lemma = if split == 0 { "s1t0-equal" } else { "s1t0-split" };
    s.draft(lemma, eps, bounds, t, 2)
        .finish(surface, Some(&s.fib), &h.on_s_tilde, opts)
}

/// One type II fiber with gamma in {2, 3}, no I-2 fibers, degree 5 - n, n >= 2.
pub fn case_s0t1(surface: &SurfaceModel, fib: &FibrationData, h: &AmpleDivisor, opts: &Options) -> Result<CylinderCertificate> {
    let n = fib.n;
    let g = fib.gamma().first().copied().unwrap_or(0) as i64;
    require(
        fib.s == 0 && fib.t == 1 && (g == 2 || g == 3) && surface.degree() == 5 - n && n >= 2 && fib.r > 0,
        "s = 0, t = 1, gamma in {2, 3}, degree 5 - n, n >= 2 and r > 0",
    )?;
    let s = Sorted::new(fib, h);
    let gamma = gamma_class(&s.fib, 2, surface.degree())?;
    let r = s.fib.r;
    let bp = s.ratio(r);
    let d = q(2) * (&s.h.a + s.sum_b()) - q(4 - g) * &bp;
    assert_pos(&d, "d")?;
    let (split, low) = s.below(r - 1, &bp).unwrap_or((0, 0));
    let x = q(2 * n - g + 2 - 2 * low);
    let mut bounds = Vec::new();
    if split > 0 {
        bounds.push(&bp - s.ratio(split));
    }
    if x.is_positive() {
        bounds.push(&d / &x);
    }
    let eps = pick_epsilon(&bounds, opts)?;
    let e = s.fib.ii()[0].e();
    let mut t = Terms::new();
    t.add("Gamma", &gamma, -&bp + &eps);
    s.i1_terms(&mut t, split, &bp, &eps, true);
    t.add(&e.name, &e.class, &d - &x * &eps);
    let lemma = if split == 0 { "s0t1-equal" } else { "s0t1-split" };
    s.draft(lemma, eps, bounds, t, 2)
        .finish(surface, Some(&s.fib), &h.on_s_tilde, opts)
}

fn s0t0_common(surface: &SurfaceModel, fib: &FibrationData, h: &AmpleDivisor, opts: &Options, low_n: bool) -> Result<CylinderCertificate> {
    let n = fib.n;
    let total: i64 = fib.alpha().iter().map(|&a| a as i64).sum();
    require(
        fib.s == 0 && fib.t == 0 && (total == n + 2 || total == n + 3),
        "s = t = 0 and alpha in {n + 2, n + 3}",
    )?;
    require(if low_n { n <= 1 } else { n >= 2 }, "n in the range of this construction")?;
    let s = Sorted::new(fib, h);
    let gamma = gamma_class(&s.fib, 3, surface.degree())?;
    let (rp, alpha_p) = r_prime(&s.fib.alpha(), n + 1);
    let bp = s.ratio(rp);
    let d = &s.h.a + s.h.b[..rp].iter().sum::<Q>() + q(n + 1 - alpha_p) * &bp;
    assert_pos(&d, "d")?;
    let d0 = &s.h.a0 + &bp;
    if low_n {
        assert_pos(&d0, "d_0")?;
    }
    let (split, low) = s.below(rp - 1, &bp).unwrap_or((0, 0));
    let x = q(n + 1 - low);
    let mut bounds = Vec::new();
    if split > 0 {
        bounds.push(&bp - s.ratio(split));
    }
    bounds.push(&d / &x);
    if low_n {
        bounds.push(d0.clone());
    }
    let eps = pick_epsilon(&bounds, opts)?;
    let mut t = Terms::new();
    t.add("Gamma", &gamma, -&bp + &eps);
    t.add("F_0", &s.fib.fiber_class, &d - &x * &eps);
    s.i1_terms(&mut t, split, &bp, &eps, false);
    if low_n {
        t.add("D_0", &s.fib.section, &d0 - &eps);
    }
    let lemma = match (low_n, split == 0) {
        (false, true) => "s0t0-equal",
        (false, false) => "s0t0-split",
        (true, true) => "s0t0-low-n-equal",
        (true, false) => "s0t0-low-n-split",
    };
    s.draft(lemma, eps, bounds, t, 3)
        .finish(surface, Some(&s.fib), &h.on_s_tilde, opts)
}

/// Only I-1 fibers, alpha in {n + 2, n + 3}, n >= 2.
pub fn case_s0t0(surface: &SurfaceModel, fib: &FibrationData, h: &AmpleDivisor, opts: &Options) -> Result<CylinderCertificate> {
    s0t0_common(surface, fib, h, opts, false)
}

/// As [`case_s0t0`] for n <= 1, where D_0 survives on S and carries d_0 - eps.
pub fn case_s0t0_low_n(surface: &SurfaceModel, fib: &FibrationData, h: &AmpleDivisor, opts: &Options) -> Result<CylinderCertificate> {
    s0t0_common(surface, fib, h, opts, true)
}

/// A ruling with two disjoint root sections D_0 and D_inf.
struct TwoSections {
    f: DivisorClass,
    d0: DivisorClass,
    dinf: DivisorClass,
    /// Per fiber: (end meeting D_0, end meeting D_inf, curves in between).
    fibers: Vec<(DivisorClass, DivisorClass, Vec<DivisorClass>)>,
    /// Fibers with a single line meeting both sections, as (that line, the other line).
    crossing: Vec<(DivisorClass, DivisorClass)>,
}

fn two_section_rulings(surface: &SurfaceModel) -> Vec<TwoSections> {
    let roots = surface.roots();
    let mut out = Vec::new();
    for (f, d0) in find_fibrations(surface) {
        if !surface.is_root(&d0) {
            continue;
        }
        let Some(dinf) = roots
            .iter()
            .find(|r| **r != d0 && r.dot(&f) == q(1) && r.dot(&d0).is_zero())
        else {
            continue;
        };
        let Ok(groups) = fiber_groups(surface, &f, &d0) else {
            continue;
        };
        let mut ok = true;
        let mut fibers = Vec::new();
        let mut crossing = Vec::new();
        for g in &groups {
            if g.multiplicities.iter().any(|&m| m != 1) {
                ok = false;
                break;
            }
            let lines: Vec<&DivisorClass> = g.curves.iter().filter(|c| surface.is_line(c)).collect();
            let inner: Vec<DivisorClass> = g.curves.iter().filter(|c| surface.is_root(c)).cloned().collect();
            if lines.len() != 2 {
                ok = false;
                break;
            }
            let meets = |c: &DivisorClass, s: &DivisorClass| c.dot(s) == q(1);
            let (x, y) = (lines[0], lines[1]);
            if meets(x, &d0) && meets(y, &dinf) && !meets(x, &dinf) && !meets(y, &d0) {
                fibers.push((x.clone(), y.clone(), inner));
            } else if meets(y, &d0) && meets(x, &dinf) && !meets(y, &dinf) && !meets(x, &d0) {
                fibers.push((y.clone(), x.clone(), inner));
            } else if inner.is_empty() && meets(x, &d0) && meets(x, &dinf) {
                crossing.push((x.clone(), y.clone()));
            } else if inner.is_empty() && meets(y, &d0) && meets(y, &dinf) {
                crossing.push((y.clone(), x.clone()));
            } else {
                ok = false;
                break;
            }
        }
        if ok {
            out.push(TwoSections {
                f,
                d0,
                dinf: dinf.clone(),
                fibers,
                crossing,
            });
        }
    }
    out
}

fn two_section_names(ts: &TwoSections, t: &mut Vec<NamedCurve>) {
    t.push(NamedCurve {
        curve: "D_0".into(),
        class: ts.d0.clone(),
    });
    t.push(NamedCurve {
        curve: "D_inf".into(),
        class: ts.dinf.clone(),
    });
    for (i, (_, _, inner)) in ts.fibers.iter().enumerate() {
        for (j, c) in inner.iter().enumerate() {
            t.push(NamedCurve {
                curve: format!("D_{},{}", i + 1, j + 1),
                class: c.clone(),
            });
        }
    }
}

/// Degree 4, type 2A1 with 8 lines: both roots are sections of a ruling
/// with four fibers E_i' + E_i. D = 2 eps F + sum (a_i - eps) E_i, a_i = H.E_i'.
pub fn cylinder_2a1_8lines(surface: &SurfaceModel, h: &ClassOnS, opts: &Options) -> Result<CylinderCertificate> {
    require(
        surface.degree() == 4 && surface.dynkin() == "2A1" && surface.line_count() == 8,
        "degree 4, type 2A1 with 8 lines",
    )?;
    let ts = ruling_2a1(surface)?;
    build_2a1(surface, &ts, h, opts)
}

fn ruling_2a1(surface: &SurfaceModel) -> Result<TwoSections> {
    two_section_rulings(surface)
        .into_iter()
        .find(|ts| ts.fibers.len() == 4 && ts.crossing.is_empty() && ts.fibers.iter().all(|f| f.2.is_empty()))
        .ok_or_else(|| internal("no ruling with two root sections"))
}

fn build_2a1(surface: &SurfaceModel, ts: &TwoSections, h: &ClassOnS, opts: &Options) -> Result<CylinderCertificate> {
    if !is_ample(surface, h)? {
        return Err(Error::NotAmple);
    }
    let a: Vec<Q> = ts.fibers.iter().map(|(ep, _, _)| h.rep.dot(ep)).collect();
    for ai in &a {
        assert_pos(ai, "H.E_i'")?;
    }
    let bounds = a.clone();
    let eps = pick_epsilon(&bounds, opts)?;
    let mut t = Terms::new();
    t.add("F", &ts.f, q(2) * &eps);
    for (i, ((_, e, _), ai)) in ts.fibers.iter().zip(&a).enumerate() {
        t.add(&format!("E_{}", i + 1), e, ai - &eps);
    }
    let mut extra = Vec::new();
    two_section_names(ts, &mut extra);
    Draft {
        lemma: "2A1-8lines",
        epsilon: eps,
        bounds,
        fiber_class: ts.f.clone(),
        section: ts.d0.clone(),
        terms: t,
        pattern: Pattern::Star(2),
        extra_names: extra,
    }
    .finish(surface, None, h, opts)
}

/// The cubic of type 4A1: a ruling with root sections D_0, D_inf, two fibers
/// E_i' + D_i + E_i and one fiber E_3' + E_3 with E_3' meeting both sections.
pub fn cylinder_4a1(surface: &SurfaceModel, h: &ClassOnS, opts: &Options) -> Result<CylinderCertificate> {
    require(surface.degree() == 3 && surface.dynkin() == "4A1", "degree 3, type 4A1")?;
    let ts = ruling_4a1(surface)?;
    build_4a1(surface, &ts, h, opts)
}

fn ruling_4a1(surface: &SurfaceModel) -> Result<TwoSections> {
    two_section_rulings(surface)
        .into_iter()
        .find(|ts| ts.fibers.len() == 2 && ts.crossing.len() == 1 && ts.fibers.iter().all(|f| f.2.len() == 1))
        .ok_or_else(|| internal("no ruling with two root sections"))
}

fn build_4a1(surface: &SurfaceModel, ts: &TwoSections, h: &ClassOnS, opts: &Options) -> Result<CylinderCertificate> {
    if !is_ample(surface, h)? {
        return Err(Error::NotAmple);
    }
    let (e1, e2) = (&ts.fibers[0].1, &ts.fibers[1].1);
    let (e3p, e3) = &ts.crossing[0];
    let x = solve_in(surface, &[e1.clone(), e2.clone(), e3.clone()], &h.rep)?;
    let (a1, a2, a3) = (&x[0], &x[1], &x[2]);
    if !a3.is_negative() {
        return Err(internal(format!("a_3 = {a3} is not negative")));
    }
    let bounds = vec![a1 + a3, a2 + a3];
    for b in &bounds {
        assert_pos(b, "a_i + a_3")?;
    }
    let eps = pick_epsilon(&bounds, opts)?;
    let mut t = Terms::new();
    t.add("E_1", e1, a1 + a3 - &eps);
    t.add("E_2", e2, a2 + a3 - &eps);
    t.add("E_3", e3, eps.clone());
    t.add("E_3'", e3p, -a3 + &eps);
    let mut extra = Vec::new();
    two_section_names(ts, &mut extra);
    Draft {
        lemma: "4A1-cubic",
        epsilon: eps,
        bounds,
        fiber_class: ts.f.clone(),
        section: ts.d0.clone(),
        terms: t,
        pattern: Pattern::Star(2),
        extra_names: extra,
    }
    .finish(surface, None, h, opts)
}

/// Picks and runs the construction for an ample H.
pub fn construct_cylinder(surface: &SurfaceModel, h: &ClassOnS) -> Result<CylinderCertificate> {
    construct_cylinder_with(surface, h, &Options::default())
}

pub fn construct_cylinder_with(surface: &SurfaceModel, h: &ClassOnS, opts: &Options) -> Result<CylinderCertificate> {
    Planner::new(surface)?.construct(h, opts)
}

enum Route {
    FourA1(TwoSections),
    Ruled {
        fib: FibrationData,
        fallback: Option<TwoSections>,
    },
}

/// The per-surface part of the dispatch (ruling selection), reusable across
/// many H on the same surface.
pub struct Planner<'a> {
    surface: &'a SurfaceModel,
    route: Route,
}

impl<'a> Planner<'a> {
    pub fn new(surface: &'a SurfaceModel) -> Result<Self> {
        if surface.rho() <= 1 {
            return Err(Error::OutOfScope("Picard rank 1".into()));
        }
        let route = if surface.degree() == 3 && surface.dynkin() == "4A1" {
            Route::FourA1(ruling_4a1(surface)?)
        } else {
            let fib = select_fibration(surface)?;
            let eight = surface.degree() == 4 && surface.dynkin() == "2A1" && surface.line_count() == 8;
            let fallback = if eight { Some(ruling_2a1(surface)?) } else { None };
            Route::Ruled { fib, fallback }
        };
        Ok(Planner { surface, route })
    }

    /// The fibration used by the ruled constructions, if any.
    pub fn fibration(&self) -> Option<&FibrationData> {
        match &self.route {
            Route::Ruled { fib, .. } => Some(fib),
            Route::FourA1(_) => None,
        }
    }

    /// Curves whose images form the coordinate basis of Cl(S)_Q used by the
    /// construction: (D_0,) F, E_1, ..., E_{r+s}, or E_1, E_2, E_3 on the 4A1 cubic.
    pub fn coordinate_basis(&self) -> Vec<NamedCurve> {
        let named = |curve: &str, class: &DivisorClass| NamedCurve {
            curve: curve.to_string(),
            class: class.clone(),
        };
        match &self.route {
            Route::FourA1(ts) => vec![
                named("E_1", &ts.fibers[0].1),
                named("E_2", &ts.fibers[1].1),
                named("E_3", &ts.crossing[0].1),
            ],
            Route::Ruled { fib, .. } => {
                let mut out = Vec::new();
                if fib.n <= 1 {
                    out.push(named("D_0", &fib.section));
                }
                out.push(named("F", &fib.fiber_class));
                for f in fib.i1().iter().chain(fib.i2()) {
                    out.push(named(&f.e().name, &f.e().class));
                }
                out
            }
        }
    }

    /// The class with the given coordinates in [`Planner::coordinate_basis`].
    pub fn class_from_coords(&self, x: &[Q]) -> Result<ClassOnS> {
        let basis = self.coordinate_basis();
        if x.len() != basis.len() {
            return Err(Error::RankMismatch(x.len(), basis.len()));
        }
        let mut rep = DivisorClass::zero(self.surface.k());
        for (xi, b) in x.iter().zip(&basis) {
            rep.add_scaled(xi, &mumford_pullback(self.surface, &b.class)?.rep);
        }
        ClassOnS::new(self.surface, rep)
    }

    pub fn construct(&self, h: &ClassOnS, opts: &Options) -> Result<CylinderCertificate> {
        let surface = self.surface;
        if !is_ample(surface, h)? {
            return Err(Error::NotAmple);
        }
        let (fib, fallback) = match &self.route {
            Route::FourA1(ts) => return build_4a1(surface, ts, h, opts),
            Route::Ruled { fib, fallback } => (fib, fallback),
        };
        let coords = coords_of(surface, fib, h)?;
        let (_, d) = d_rsprime(&coords);
        if d.is_positive() {
            return cylinder_general(surface, fib, &coords, opts);
        }
        if let Some(ts) = fallback {
            return build_2a1(surface, ts, h, opts);
        }
        match (fib.s, fib.t) {
            (1, 0) => case_s1t0(surface, fib, &coords, opts),
            (0, 1) => case_s0t1(surface, fib, &coords, opts),
            (0, 0) if fib.n >= 2 => case_s0t0(surface, fib, &coords, opts),
            (0, 0) => case_s0t0_low_n(surface, fib, &coords, opts),
            _ => Err(internal(format!(
                "d_(r,s') = {d} <= 0 with (s, t) = ({}, {})",
                fib.s, fib.t
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qf;

    #[test]
    fn epsilon_choice() {
        assert_eq!(choose_epsilon(&[q(1)]).unwrap(), qf(1, 2));
        assert_eq!(choose_epsilon(&[qf(3, 7), qf(2, 7)]).unwrap(), qf(1, 7));
        assert_eq!(choose_epsilon(&[]).unwrap(), q(1));
        assert!(choose_epsilon(&[q(1), q(0)]).is_err());
    }

    #[test]
    fn d_rsprime_example() {
        let h = AmpleDivisor {
            on_s_tilde: ClassOnS {
                rep: DivisorClass::zero(0),
            },
            a0: q(0),
            a: q(7),
            b: vec![q(-1), q(-2)],
            c: vec![q(3), q(-1)],
        };
        assert_eq!(d_rsprime(&h), (1, q(3)));
        let plain = AmpleDivisor {
            a: q(5),
            b: vec![],
            c: vec![],
            ..h
        };
        assert_eq!(d_rsprime(&plain), (0, q(5)));
    }
}
