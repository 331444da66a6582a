//! P^1-fibrations on the resolution: candidates, fiber decomposition and
//! the I-1 / I-2 / II fiber types with their chain lengths.

use crate::error::{Error, Result};
use crate::lattice::{enumerate_classes, DivisorClass};
use crate::linalg::solve;
use crate::rational::{q, Q};
use crate::surface::SurfaceModel;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FiberKind {
    I1,
    I2,
    II,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Component {
    pub name: String,
    pub class: DivisorClass,
    pub multiplicity: u32,
    pub self_int: i64,
}

/// A singular fiber; `components[l]` is the curve D_{i,l} of the fiber.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SingularFiber {
    pub kind: FiberKind,
    pub components: Vec<Component>,
    /// alpha for I-1, (beta, beta') for I-2, gamma for II.
    pub lengths: Vec<u32>,
}

impl SingularFiber {
    pub fn alpha(&self) -> u32 {
        assert_eq!(self.kind, FiberKind::I1);
        self.lengths[0]
    }

    pub fn beta(&self) -> (u32, u32) {
        assert_eq!(self.kind, FiberKind::I2);
        (self.lengths[0], self.lengths[1])
    }

    pub fn gamma(&self) -> u32 {
        assert_eq!(self.kind, FiberKind::II);
        self.lengths[0]
    }

    pub fn d(&self, lambda: usize) -> &DivisorClass {
        &self.components[lambda].class
    }

    /// Position of the component named E_i.
    pub fn e_index(&self) -> usize {
        match self.kind {
            FiberKind::I1 | FiberKind::II => self.lengths[0] as usize,
            FiberKind::I2 => self.lengths[0] as usize,
        }
    }

    /// Position of the component named E_i' (absent for type II).
    pub fn e_prime_index(&self) -> Option<usize> {
        match self.kind {
            FiberKind::I1 => Some(0),
            FiberKind::I2 => Some((self.lengths[0] + self.lengths[1]) as usize),
            FiberKind::II => None,
        }
    }

    pub fn e(&self) -> &Component {
        &self.components[self.e_index()]
    }

    pub fn e_prime(&self) -> Option<&Component> {
        self.e_prime_index().map(|i| &self.components[i])
    }

    fn sort_key(&self) -> (FiberKind, Vec<u32>, DivisorClass) {
        (self.kind, self.lengths.clone(), self.e().class.clone())
    }

    fn rename(&mut self, index: usize) {
        let e = self.e_index();
        let ep = self.e_prime_index();
        for (l, c) in self.components.iter_mut().enumerate() {
            c.name = if l == e {
                format!("E_{index}")
            } else if Some(l) == ep {
                format!("E_{index}'")
            } else {
                format!("D_{index},{l}")
            };
        }
    }
}

/// The fibration parameters compared against the table of configurations.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Signature {
    pub n: i64,
    pub rst: [usize; 3],
    pub alpha: Vec<u32>,
    pub beta: Vec<(u32, u32)>,
    pub gamma: Vec<u32>,
}

impl Signature {
    pub fn new(
        n: i64,
        mut alpha: Vec<u32>,
        mut beta: Vec<(u32, u32)>,
        mut gamma: Vec<u32>,
    ) -> Self {
        alpha.sort();
        beta.sort();
        gamma.sort();
        Signature {
            n,
            rst: [alpha.len(), beta.len(), gamma.len()],
            alpha,
            beta,
            gamma,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FibrationData {
    pub fiber_class: DivisorClass,
    pub section: DivisorClass,
    pub n: i64,
    /// I-1 fibers first, then I-2, then II.
    pub fibers: Vec<SingularFiber>,
    pub r: usize,
    pub s: usize,
    pub t: usize,
}

impl FibrationData {
    fn from_fibers(
        fiber_class: DivisorClass,
        section: DivisorClass,
        mut fibers: Vec<SingularFiber>,
    ) -> Self {
        fibers.sort_by_key(|f| f.sort_key());
        let count = |k| fibers.iter().filter(|f| f.kind == k).count();
        let (r, s, t) = (
            count(FiberKind::I1),
            count(FiberKind::I2),
            count(FiberKind::II),
        );
        let n = -section
            .self_int()
            .to_integer()
            .to_i64()
            .expect("small section");
        let mut out = FibrationData {
            fiber_class,
            section,
            n,
            fibers,
            r,
            s,
            t,
        };
        out.rename();
        out
    }

    fn rename(&mut self) {
        for (i, f) in self.fibers.iter_mut().enumerate() {
            f.rename(i + 1);
        }
    }

    /// Reorders the I-1 fibers (`perm[new] = old`) and renames all components.
    pub fn reorder_i1(&self, perm: &[usize]) -> FibrationData {
        assert_eq!(perm.len(), self.r);
        let mut out = self.clone();
        for (new, &old) in perm.iter().enumerate() {
            out.fibers[new] = self.fibers[old].clone();
        }
        out.rename();
        out
    }

    pub fn i1(&self) -> &[SingularFiber] {
        &self.fibers[..self.r]
    }

    pub fn i2(&self) -> &[SingularFiber] {
        &self.fibers[self.r..self.r + self.s]
    }

    pub fn ii(&self) -> &[SingularFiber] {
        &self.fibers[self.r + self.s..]
    }

    pub fn alpha(&self) -> Vec<u32> {
        self.i1().iter().map(|f| f.alpha()).collect()
    }

    pub fn beta(&self) -> Vec<u32> {
        self.i2().iter().map(|f| f.beta().0).collect()
    }

    pub fn beta_prime(&self) -> Vec<u32> {
        self.i2().iter().map(|f| f.beta().1).collect()
    }

    pub fn gamma(&self) -> Vec<u32> {
        self.ii().iter().map(|f| f.gamma()).collect()
    }

    /// alpha + beta + beta' + gamma.
    pub fn total_length(&self) -> i64 {
        self.fibers
            .iter()
            .map(|f| f.lengths.iter().sum::<u32>() as i64)
            .sum()
    }

    pub fn signature(&self) -> Signature {
        Signature::new(
            self.n,
            self.alpha(),
            self.i2().iter().map(|f| f.beta()).collect(),
            self.gamma(),
        )
    }

    /// Every named curve: D_0, F, E_i, E_i' and D_{i,l}.
    pub fn named(&self) -> BTreeMap<String, DivisorClass> {
        let mut m = BTreeMap::new();
        m.insert("D_0".to_string(), self.section.clone());
        m.insert("F".to_string(), self.fiber_class.clone());
        for f in &self.fibers {
            for c in &f.components {
                m.insert(c.name.clone(), c.class.clone());
            }
        }
        m
    }

    pub fn components(&self) -> impl Iterator<Item = &Component> {
        self.fibers.iter().flat_map(|f| f.components.iter())
    }
}

#[derive(Serialize)]
struct FibrationView<'a> {
    fiber_class: &'a DivisorClass,
    section: &'a DivisorClass,
    n: i64,
    rst: [usize; 3],
    alpha: Vec<u32>,
    beta: Vec<u32>,
    beta_prime: Vec<u32>,
    gamma: Vec<u32>,
    fibers: &'a [SingularFiber],
}

impl Serialize for FibrationData {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FibrationView {
            fiber_class: &self.fiber_class,
            section: &self.section,
            n: self.n,
            rst: [self.r, self.s, self.t],
            alpha: self.alpha(),
            beta: self.beta(),
            beta_prime: self.beta_prime(),
            gamma: self.gamma(),
            fibers: &self.fibers,
        }
        .serialize(s)
    }
}

/// A connected group of negative curves inside one fiber, with multiplicities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiberGroup {
    pub curves: Vec<DivisorClass>,
    pub multiplicities: Vec<u32>,
}

fn is_fiber_class(surface: &SurfaceModel, f: &DivisorClass) -> bool {
    f.self_int().is_zero()
        && f.dot(surface.canonical()) == q(-2)
        && surface
            .negative_curves()
            .iter()
            .all(|c| !f.dot(c).is_negative())
}

/// All (fiber class, section) pairs: nef f with f^2 = 0, f.K = -2, and
/// negative curves meeting f once.
pub fn find_fibrations(surface: &SurfaceModel) -> Vec<(DivisorClass, DivisorClass)> {
    let neg = surface.negative_curves();
    let mut out = Vec::new();
    for f in enumerate_classes(surface.k(), 0, -2).expect("supported invariants") {
        if !neg.iter().all(|c| !f.dot(c).is_negative()) {
            continue;
        }
        for c in &neg {
            if f.dot(c) == q(1) {
                out.push((f.clone(), c.clone()));
            }
        }
    }
    out
}

/// Groups the negative curves in fibers of `f` (other than `section`) into
/// connected fibers, each with the multiplicities making it numerically f.
pub fn fiber_groups(
    surface: &SurfaceModel,
    f: &DivisorClass,
    section: &DivisorClass,
) -> Result<Vec<FiberGroup>> {
    if !is_fiber_class(surface, f) {
        return Err(Error::NotAFibration(format!(
            "{f} is not a nef class with F^2 = 0, F.K = -2"
        )));
    }
    if f.dot(section) != q(1) {
        return Err(Error::NotAFibration(format!(
            "{section} is not a section of {f}"
        )));
    }
    let comps: Vec<DivisorClass> = surface
        .negative_curves()
        .into_iter()
        .filter(|c| c != section && f.dot(c).is_zero())
        .collect();
    let n = comps.len();
    let mut seen = vec![false; n];
    let mut groups = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut stack = vec![start];
        let mut idx = Vec::new();
        while let Some(v) = stack.pop() {
            idx.push(v);
            for w in 0..n {
                if !seen[w] && comps[v].dot(&comps[w]).is_positive() {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        idx.sort();
        let curves: Vec<DivisorClass> = idx.iter().map(|&i| comps[i].clone()).collect();
        let multiplicities = multiplicities(&curves, section, f)?;
        groups.push(FiberGroup {
            curves,
            multiplicities,
        });
    }
    groups.sort_by(|a, b| a.curves.cmp(&b.curves));
    Ok(groups)
}

/// Solves (sum m_c C).C' = 0 for all components and (sum m_c C).section = 1,
/// then checks the result against the fiber class.
fn multiplicities(
    curves: &[DivisorClass],
    section: &DivisorClass,
    f: &DivisorClass,
) -> Result<Vec<u32>> {
    let mut a: Vec<Vec<Q>> = curves
        .iter()
        .map(|cp| curves.iter().map(|c| c.dot(cp)).collect())
        .collect();
    let mut b = vec![Q::zero(); curves.len()];
    a.push(curves.iter().map(|c| c.dot(section)).collect());
    b.push(q(1));
    let m = solve(&a, &b).ok_or_else(|| {
        Error::NotAFibration(format!(
            "no multiplicity vector for a group of {} curves",
            curves.len()
        ))
    })?;
    let mut sum = DivisorClass::zero(f.k());
    let mut out = Vec::new();
    for (mi, c) in m.iter().zip(curves) {
        if !mi.is_integer() || !mi.is_positive() {
            return Err(Error::NotAFibration(format!("multiplicity {mi} on {c}")));
        }
        sum.add_scaled(mi, c);
        out.push(mi.to_integer().to_u32().expect("small multiplicity"));
    }
    if &sum != f {
        return Err(Error::NotAFibration(format!(
            "components sum to {sum}, not {f}"
        )));
    }
    Ok(out)
}

/// Checks the section condition and classifies every singular fiber.
pub fn decompose_fibers(
    surface: &SurfaceModel,
    f: &DivisorClass,
    section: &DivisorClass,
) -> Result<FibrationData> {
    if !surface.negative_curves().contains(section) {
        return Err(Error::NotAFibration(format!(
            "section {section} is not a negative curve"
        )));
    }
    let groups = fiber_groups(surface, f, section)?;
    for r in surface.roots() {
        if r != section && !groups.iter().any(|g| g.curves.contains(r)) {
            return Err(Error::NotAFibration(format!(
                "stray curve: the (-2)-curve {r} is neither a fiber component nor the section"
            )));
        }
    }
    let fibers = groups
        .iter()
        .map(|g| classify(g, section))
        .collect::<Result<Vec<_>>>()?;
    let data = FibrationData::from_fibers(f.clone(), section.clone(), fibers);
    let deg = surface.degree();
    if deg != 8 - data.total_length() {
        return Err(Error::Internal(format!(
            "degree {deg} but fiber lengths sum to {}",
            data.total_length()
        )));
    }
    Ok(data)
}

fn classify(g: &FiberGroup, section: &DivisorClass) -> Result<SingularFiber> {
    let n = g.curves.len();
    let bad = |why: String| Error::NotAFibration(format!("unrecognised fiber graph: {why}"));
    let si: Vec<i64> = g
        .curves
        .iter()
        .map(|c| c.self_int().to_integer().to_i64().unwrap())
        .collect();
    if si.iter().any(|&x| x != -1 && x != -2) {
        return Err(Error::Internal(
            "fiber component with self-intersection below -2".into(),
        ));
    }
    let mut adj = vec![Vec::new(); n];
    let mut edges = 0;
    for i in 0..n {
        for j in 0..i {
            let m = g.curves[i].dot(&g.curves[j]);
            if m == q(1) {
                adj[i].push(j);
                adj[j].push(i);
                edges += 1;
            } else if !m.is_zero() {
                return Err(bad(format!("components meet with multiplicity {m}")));
            }
        }
    }
    if edges + 1 != n {
        return Err(bad("not a tree".into()));
    }
    let touching: Vec<usize> = (0..n)
        .filter(|&i| !g.curves[i].dot(section).is_zero())
        .collect();
    let [c0] = touching[..] else {
        return Err(bad("section meets several components".into()));
    };
    if g.multiplicities[c0] != 1 {
        return Err(bad("section meets a multiple component".into()));
    }
    let walk = |from: usize, first: usize| -> Vec<usize> {
        let mut path = vec![first];
        let (mut prev, mut cur) = (from, first);
        loop {
            let next: Vec<usize> = adj[cur].iter().copied().filter(|&w| w != prev).collect();
            match next[..] {
                [] => return path,
                [w] => {
                    path.push(w);
                    prev = cur;
                    cur = w;
                }
                _ => return path,
            }
        }
    };
    let chain_ok = |path: &[usize]| {
        path.iter().enumerate().all(|(p, &i)| {
            let last = p + 1 == path.len();
            si[i] == if last { -1 } else { -2 } && adj[i].len() <= 2
        })
    };
    let comp = |i: usize, m: u32| Component {
        name: String::new(),
        class: g.curves[i].clone(),
        multiplicity: m,
        self_int: si[i],
    };

    if g.multiplicities.iter().any(|&m| m > 1) {
        // type II: c0 and D_1 are (-2)-leaves on D_2, then a chain to E.
        if si[c0] != -2 || adj[c0].len() != 1 {
            return Err(bad("type II fiber with a bad section component".into()));
        }
        let x = adj[c0][0];
        let leaves: Vec<usize> = adj[x]
            .iter()
            .copied()
            .filter(|&w| w != c0 && g.multiplicities[w] == 1)
            .collect();
        let [d1] = leaves[..] else {
            return Err(bad("type II fiber without a second leaf".into()));
        };
        if si[d1] != -2 || adj[d1].len() != 1 {
            return Err(bad("type II leaf is not a (-2)-curve".into()));
        }
        let rest: Vec<usize> = adj[x]
            .iter()
            .copied()
            .filter(|&w| w != c0 && w != d1)
            .collect();
        let mut chain = vec![x];
        match rest[..] {
            [] => {}
            [next] => chain.extend(walk(x, next)),
            _ => return Err(bad("type II branch vertex of degree > 3".into())),
        }
        if !chain.iter().enumerate().all(|(p, &i)| {
            si[i] == if p + 1 == chain.len() { -1 } else { -2 } && g.multiplicities[i] == 2
        }) {
            return Err(bad("type II chain has the wrong weights".into()));
        }
        if chain.len() + 2 != n {
            return Err(bad("type II fiber has extra components".into()));
        }
        let mut components = vec![comp(c0, 1), comp(d1, 1)];
        components.extend(chain.iter().map(|&i| comp(i, 2)));
        let gamma = (n - 1) as u32;
        return Ok(SingularFiber {
            kind: FiberKind::II,
            components,
            lengths: vec![gamma],
        });
    }

    if si[c0] == -1 {
        if adj[c0].len() != 1 {
            return Err(bad("I-1 fiber whose first curve is not an end".into()));
        }
        let mut path = vec![c0];
        path.extend(walk(c0, adj[c0][0]));
        if path.len() != n || !chain_ok(&path[1..]) {
            return Err(bad("I-1 fiber is not a (-1)-(-2)...(-2)-(-1) chain".into()));
        }
        return Ok(SingularFiber {
            kind: FiberKind::I1,
            components: path.iter().map(|&i| comp(i, 1)).collect(),
            lengths: vec![(n - 1) as u32],
        });
    }

    if adj[c0].len() != 2 {
        return Err(bad(
            "I-2 fiber whose first curve does not have two branches".into(),
        ));
    }
    let mut a = walk(c0, adj[c0][0]);
    let mut b = walk(c0, adj[c0][1]);
    if !chain_ok(&a) || !chain_ok(&b) || a.len() + b.len() + 1 != n {
        return Err(bad(
            "I-2 branches are not chains ending in (-1)-curves".into()
        ));
    }
    let key = |p: &Vec<usize>| {
        (
            std::cmp::Reverse(p.len()),
            g.curves[*p.last().unwrap()].clone(),
        )
    };
    if key(&b) < key(&a) {
        std::mem::swap(&mut a, &mut b);
    }
    let mut components = vec![comp(c0, 1)];
    components.extend(a.iter().map(|&i| comp(i, 1)));
    components.extend(b.iter().map(|&i| comp(i, 1)));
    Ok(SingularFiber {
        kind: FiberKind::I2,
        components,
        lengths: vec![a.len() as u32, b.len() as u32],
    })
}

/// All fibrations satisfying the section condition, in candidate order.
pub fn valid_fibrations(surface: &SurfaceModel) -> Vec<FibrationData> {
    find_fibrations(surface)
        .iter()
        .filter_map(|(f, s)| decompose_fibers(surface, f, s).ok())
        .collect()
}

/// Picks the fibration used by the cylinder constructions among those with
/// 5 - d <= n: the table row when one is known, otherwise the first with the
/// largest n.
pub fn select_fibration(surface: &SurfaceModel) -> Result<FibrationData> {
    let all: Vec<FibrationData> = valid_fibrations(surface)
        .into_iter()
        .filter(|f| f.n >= 5 - surface.degree())
        .collect();
    if all.is_empty() {
        return Err(Error::NoFibration(format!(
            "degree {} surface of type {}",
            surface.degree(),
            surface.dynkin()
        )));
    }
    if let Some(expected) =
        crate::catalog::table_row(surface.degree(), surface.dynkin(), surface.line_count())
    {
        if let Some(f) = all.iter().find(|f| f.signature() == expected) {
            return Ok(f.clone());
        }
    }
    let best_n = all.iter().map(|f| f.n).max().unwrap();
    Ok(all.into_iter().find(|f| f.n == best_n).unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::build_surface;

    fn cls(c: &[i64]) -> DivisorClass {
        DivisorClass::from_ints(c)
    }

    fn a2_2a1() -> SurfaceModel {
        build_surface(
            3,
            vec![
                cls(&[1, -1, -1, -1, 0, 0, 0]),
                cls(&[0, 1, -1, 0, 0, 0, 0]),
                cls(&[0, 0, 1, -1, 0, 0, 0]),
                cls(&[0, 0, 0, 0, 1, -1, 0]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn worked_example_fibration() {
        let s = a2_2a1();
        let f = cls(&[1, -1, 0, 0, 0, 0, 0]);
        let sec = cls(&[0, 1, -1, 0, 0, 0, 0]);
        assert!(find_fibrations(&s).contains(&(f.clone(), sec.clone())));
        let fib = decompose_fibers(&s, &f, &sec).unwrap();
        assert_eq!(fib.n, 2);
        assert_eq!((fib.r, fib.s, fib.t), (2, 0, 1));
        assert_eq!(fib.alpha(), vec![1, 2]);
        assert_eq!(fib.gamma(), vec![2]);
        let ii = &fib.ii()[0];
        assert_eq!(ii.components[0].class, cls(&[0, 0, 1, -1, 0, 0, 0]));
        assert_eq!(ii.components[1].class, cls(&[1, -1, -1, -1, 0, 0, 0]));
        assert_eq!(ii.e().class, DivisorClass::e(6, 3));
        assert_eq!(ii.e().multiplicity, 2);
        let named = fib.named();
        assert_eq!(named["E_1"], DivisorClass::e(6, 6));
        assert_eq!(named["E_1'"], cls(&[1, -1, 0, 0, 0, 0, -1]));
        assert_eq!(named["E_2'"], cls(&[1, -1, 0, 0, -1, 0, 0]));
        assert_eq!(named["D_2,1"], cls(&[0, 0, 0, 0, 1, -1, 0]));
        assert_eq!(named["E_2"], DivisorClass::e(6, 5));
    }

    #[test]
    fn smooth_f1_ruling() {
        let s = SurfaceModel::smooth(8).unwrap();
        let f = cls(&[1, -1]);
        let e1 = cls(&[0, 1]);
        assert!(find_fibrations(&s).contains(&(f.clone(), e1.clone())));
        let fib = decompose_fibers(&s, &f, &e1).unwrap();
        assert_eq!((fib.r, fib.s, fib.t), (0, 0, 0));
        assert_eq!(fib.n, 1);
    }

    #[test]
    fn four_a1_fails_section_condition() {
        let s = build_surface(
            3,
            vec![
                cls(&[1, 0, 0, 0, -1, -1, -1]),
                cls(&[1, -1, 0, -1, -1, 0, 0]),
                cls(&[1, 0, -1, -1, 0, -1, 0]),
                cls(&[1, -1, -1, 0, 0, 0, -1]),
            ],
        )
        .unwrap();
        let f = cls(&[1, 0, 0, -1, 0, 0, 0]);
        let cands = find_fibrations(&s);
        assert!(cands.contains(&(f.clone(), s.roots()[0].clone())));
        assert!(cands.contains(&(f.clone(), s.roots()[3].clone())));
        let err = decompose_fibers(&s, &f, &s.roots()[0]).unwrap_err();
        assert!(err.to_string().contains("stray curve"), "{err}");
        assert!(select_fibration(&s).is_err());
    }
}
