//! Weak del Pezzo surfaces given by their (-2)-curves, and the class group
//! of the Du Val contraction realised as the root-orthogonal subspace.

use crate::error::{Error, Result};
use crate::lattice::{canonical_class, enumerate_classes, DivisorClass};
use crate::linalg::solve;
use crate::rational::{q, Q};
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SurfaceModel {
    degree: i64,
    dynkin: String,
    roots: Vec<DivisorClass>,
    minus_one: Vec<DivisorClass>,
    #[serde(skip)]
    canonical: DivisorClass,
}

/// JSON input form of a surface; `dynkin` is optional and checked when present.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SurfaceSpec {
    pub degree: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dynkin: Option<String>,
    pub roots: Vec<DivisorClass>,
}

/// A class of Cl(S)_Q, stored as its root-orthogonal representative on the resolution.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassOnS {
    pub rep: DivisorClass,
}

impl ClassOnS {
    pub fn new(surface: &SurfaceModel, rep: DivisorClass) -> Result<Self> {
        if rep.k() != surface.k() {
            return Err(Error::RankMismatch(rep.k(), surface.k()));
        }
        if surface.roots.iter().any(|r| !rep.dot(r).is_zero()) {
            return Err(Error::NotRootOrthogonal(rep.to_string()));
        }
        Ok(ClassOnS { rep })
    }
}

/// Validated surface of degree 3..=7, the range handled by the cylinder pipeline.
pub fn build_surface(degree: i64, roots: Vec<DivisorClass>) -> Result<SurfaceModel> {
    if !(3..=7).contains(&degree) {
        return Err(Error::DegreeOutOfRange(degree));
    }
    SurfaceModel::build(degree, roots)
}

impl SurfaceModel {
    /// Like [`build_surface`] but accepts every degree from 3 to 9, for
    /// lattice-level queries on surfaces outside the cylinder pipeline.
    pub fn build(degree: i64, roots: Vec<DivisorClass>) -> Result<Self> {
        if !(3..=9).contains(&degree) {
            return Err(Error::DegreeOutOfRange(degree));
        }
        let k = (9 - degree) as usize;
        let canonical = canonical_class(k)?;
        for (i, r) in roots.iter().enumerate() {
            if r.k() != k {
                return Err(Error::RankMismatch(r.k(), k));
            }
            let bad = |why: &str| Error::InvalidRoot(r.to_string(), why.to_string());
            if !r.is_integral() {
                return Err(bad("not integral"));
            }
            if r.self_int() != q(-2) {
                return Err(bad("self-intersection is not -2"));
            }
            if !r.dot(&canonical).is_zero() {
                return Err(bad("not orthogonal to K"));
            }
            for s in &roots[..i] {
                if s == r {
                    return Err(bad("listed twice"));
                }
                let m = r.dot(s);
                if m != q(0) && m != q(1) {
                    return Err(Error::BadRootIntersection(
                        s.to_string(),
                        r.to_string(),
                        m.to_string(),
                    ));
                }
            }
        }
        let dynkin = dynkin_type(&roots)?;
        check_closed(k, &roots)?;
        let minus_one = enumerate_classes(k, -1, -1)?
            .into_iter()
            .filter(|e| roots.iter().all(|r| !e.dot(r).is_negative()))
            .collect();
        Ok(SurfaceModel {
            degree,
            dynkin,
            roots,
            minus_one,
            canonical,
        })
    }

    pub fn smooth(degree: i64) -> Result<Self> {
        Self::build(degree, Vec::new())
    }

    pub fn from_spec(spec: &SurfaceSpec) -> Result<Self> {
        let s = build_surface(spec.degree, spec.roots.clone())?;
        if let Some(expected) = &spec.dynkin {
            if expected != &s.dynkin {
                return Err(Error::DynkinMismatch {
                    expected: expected.clone(),
                    computed: s.dynkin.clone(),
                });
            }
        }
        Ok(s)
    }

    pub fn spec(&self) -> SurfaceSpec {
        SurfaceSpec {
            degree: self.degree,
            dynkin: Some(self.dynkin.clone()),
            roots: self.roots.clone(),
        }
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn k(&self) -> usize {
        (9 - self.degree) as usize
    }

    pub fn roots(&self) -> &[DivisorClass] {
        &self.roots
    }

    pub fn minus_one(&self) -> &[DivisorClass] {
        &self.minus_one
    }

    pub fn line_count(&self) -> usize {
        self.minus_one.len()
    }

    pub fn dynkin(&self) -> &str {
        &self.dynkin
    }

    pub fn canonical(&self) -> &DivisorClass {
        &self.canonical
    }

    /// Picard rank of the singular surface.
    pub fn rho(&self) -> usize {
        self.k() + 1 - self.roots.len()
    }

    /// Roots first, then (-1)-curves.
    pub fn negative_curves(&self) -> Vec<DivisorClass> {
        self.roots.iter().chain(&self.minus_one).cloned().collect()
    }

    pub fn is_root(&self, c: &DivisorClass) -> bool {
        self.roots.contains(c)
    }

    pub fn is_line(&self, c: &DivisorClass) -> bool {
        self.minus_one.binary_search(c).is_ok()
    }
}

/// Every lattice root in the integral span of `roots` must be a combination
/// of one sign, otherwise the list is not the full set of (-2)-curves.
fn check_closed(k: usize, roots: &[DivisorClass]) -> Result<()> {
    if roots.is_empty() {
        return Ok(());
    }
    let gram: Vec<Vec<Q>> = roots
        .iter()
        .map(|a| roots.iter().map(|b| a.dot(b)).collect())
        .collect();
    for x in enumerate_classes(k, -2, 0)? {
        let rhs: Vec<Q> = roots.iter().map(|r| x.dot(r)).collect();
        let t = solve(&gram, &rhs)
            .ok_or_else(|| Error::Internal("singular root Gram matrix".into()))?;
        let mut proj = DivisorClass::zero(k);
        for (ti, r) in t.iter().zip(roots) {
            proj.add_scaled(ti, r);
        }
        if proj != x {
            continue;
        }
        // roots of the saturation only (e.g. half the sum of 4A1 on a cubic) are allowed
        if !t.iter().all(|ti| ti.is_integer()) {
            continue;
        }
        let pos = t.iter().all(|ti| !ti.is_negative());
        let neg = t.iter().all(|ti| !ti.is_positive());
        if !(pos || neg) {
            return Err(Error::UnsupportedShape(format!(
                "{x} lies in the span of the roots but is not a (-2)-curve combination"
            )));
        }
    }
    Ok(())
}

/// Label such as "A2+2A1" for a simple-root configuration ("smooth" when empty).
pub fn dynkin_type(roots: &[DivisorClass]) -> Result<String> {
    let n = roots.len();
    let mut adj = vec![Vec::new(); n];
    for i in 0..n {
        for j in 0..i {
            if roots[i].k() != roots[j].k() {
                return Err(Error::RankMismatch(roots[i].k(), roots[j].k()));
            }
            let m = roots[i].dot(&roots[j]);
            if m == q(1) {
                adj[i].push(j);
                adj[j].push(i);
            } else if !m.is_zero() {
                return Err(Error::BadRootIntersection(
                    roots[j].to_string(),
                    roots[i].to_string(),
                    m.to_string(),
                ));
            }
        }
    }
    let mut seen = vec![false; n];
    let mut comps: Vec<(usize, char)> = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut stack = vec![start];
        let mut verts = Vec::new();
        seen[start] = true;
        while let Some(v) = stack.pop() {
            verts.push(v);
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        comps.push(classify_component(&verts, &adj)?);
    }
    if comps.is_empty() {
        return Ok("smooth".into());
    }
    let mut counts: BTreeMap<(std::cmp::Reverse<usize>, char), usize> = BTreeMap::new();
    for (rank, letter) in comps {
        *counts.entry((std::cmp::Reverse(rank), letter)).or_default() += 1;
    }
    let parts: Vec<String> = counts
        .into_iter()
        .map(|((std::cmp::Reverse(rank), letter), mult)| {
            if mult == 1 {
                format!("{letter}{rank}")
            } else {
                format!("{mult}{letter}{rank}")
            }
        })
        .collect();
    Ok(parts.join("+"))
}

fn classify_component(verts: &[usize], adj: &[Vec<usize>]) -> Result<(usize, char)> {
    let m = verts.len();
    let edges: usize = verts.iter().map(|&v| adj[v].len()).sum::<usize>() / 2;
    if edges + 1 != m {
        return Err(Error::UnsupportedShape(format!(
            "cycle in a component of {m} roots"
        )));
    }
    let branch: Vec<usize> = verts
        .iter()
        .copied()
        .filter(|&v| adj[v].len() >= 3)
        .collect();
    if branch.is_empty() {
        return Ok((m, 'A'));
    }
    if branch.len() > 1 || adj[branch[0]].len() > 3 {
        return Err(Error::UnsupportedShape(format!(
            "tree with {m} roots is not of type A or D"
        )));
    }
    let centre = branch[0];
    let mut arms: Vec<usize> = adj[centre]
        .iter()
        .map(|&first| {
            let (mut prev, mut cur, mut len) = (centre, first, 1);
            loop {
                let next: Vec<usize> = adj[cur].iter().copied().filter(|&w| w != prev).collect();
                match next.as_slice() {
                    [w] => {
                        prev = cur;
                        cur = *w;
                        len += 1;
                    }
                    _ => break len,
                }
            }
        })
        .collect();
    arms.sort();
    if arms[0] == 1 && arms[1] == 1 {
        Ok((m, 'D'))
    } else {
        Err(Error::UnsupportedShape(format!("E{m}")))
    }
}

/// Mumford pullback: the unique c + sum t_j R_j orthogonal to every root.
pub fn mumford_pullback(surface: &SurfaceModel, c: &DivisorClass) -> Result<ClassOnS> {
    if c.k() != surface.k() {
        return Err(Error::RankMismatch(c.k(), surface.k()));
    }
    let roots = surface.roots();
    if roots.is_empty() {
        return Ok(ClassOnS { rep: c.clone() });
    }
    let gram: Vec<Vec<Q>> = roots
        .iter()
        .map(|rm| roots.iter().map(|rj| rj.dot(rm)).collect())
        .collect();
    let rhs: Vec<Q> = roots.iter().map(|rm| -c.dot(rm)).collect();
    let t =
        solve(&gram, &rhs).ok_or_else(|| Error::Internal("singular root Gram matrix".into()))?;
    let mut rep = c.clone();
    for (tj, rj) in t.iter().zip(roots) {
        rep.add_scaled(tj, rj);
    }
    debug_assert!(roots.iter().all(|r| rep.dot(r).is_zero()));
    Ok(ClassOnS { rep })
}

/// Kleiman test on S: strict positivity against every (-1)-curve.
pub fn is_ample(surface: &SurfaceModel, h: &ClassOnS) -> Result<bool> {
    if surface.degree() > 7 {
        return Err(Error::DegreeOutOfRange(surface.degree()));
    }
    if h.rep.k() != surface.k() {
        return Err(Error::RankMismatch(h.rep.k(), surface.k()));
    }
    if surface.roots().iter().any(|r| !h.rep.dot(r).is_zero()) {
        return Err(Error::NotRootOrthogonal(h.rep.to_string()));
    }
    Ok(surface
        .minus_one()
        .iter()
        .all(|e| h.rep.dot(e).is_positive()))
}

/// Pullback of -K, ample on every Du Val del Pezzo surface.
pub fn anticanonical(surface: &SurfaceModel) -> ClassOnS {
    ClassOnS {
        rep: -surface.canonical(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qf;

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
    fn dynkin_labels() {
        assert_eq!(dynkin_type(&[cls(&[0, 1, -1, 0])]).unwrap(), "A1");
        assert_eq!(
            dynkin_type(&[cls(&[0, 1, -1, 0]), cls(&[0, 0, 1, -1])]).unwrap(),
            "A2"
        );
        assert_eq!(a2_2a1().dynkin(), "A2+2A1");
        let d4 = vec![
            cls(&[0, 1, -1, 0, 0, 0]),
            cls(&[0, 0, 1, -1, 0, 0]),
            cls(&[0, 0, 0, 1, -1, 0]),
            cls(&[1, -1, -1, 0, 0, -1]),
        ];
        assert_eq!(dynkin_type(&d4).unwrap(), "D4");
        assert_eq!(dynkin_type(&[]).unwrap(), "smooth");
    }

    #[test]
    fn e6_is_rejected() {
        let e6 = vec![
            cls(&[0, 1, -1, 0, 0, 0, 0]),
            cls(&[0, 0, 1, -1, 0, 0, 0]),
            cls(&[0, 0, 0, 1, -1, 0, 0]),
            cls(&[0, 0, 0, 0, 1, -1, 0]),
            cls(&[0, 0, 0, 0, 0, 1, -1]),
            cls(&[1, -1, -1, -1, 0, 0, 0]),
        ];
        assert!(matches!(dynkin_type(&e6), Err(Error::UnsupportedShape(_))));
    }

    #[test]
    fn build_rejects_bad_input() {
        assert!(matches!(
            build_surface(8, vec![cls(&[0, 1, -1])]),
            Err(Error::DegreeOutOfRange(8))
        ));
        assert!(build_surface(6, vec![cls(&[0, 1, 0, 0])]).is_err());
        assert!(build_surface(6, vec![cls(&[0, 1, -1, 0]), cls(&[0, -1, 1, 0])]).is_err());
    }

    #[test]
    fn pullback_single_root() {
        let s = build_surface(7, vec![cls(&[0, 1, -1])]).unwrap();
        let p = mumford_pullback(&s, &cls(&[0, 0, 1])).unwrap();
        assert_eq!(p.rep.coeffs(), &[q(0), qf(1, 2), qf(1, 2)]);
        let again = mumford_pullback(&s, &p.rep).unwrap();
        assert_eq!(again, p);
    }

    #[test]
    fn pullback_is_orthogonal() {
        let s = a2_2a1();
        let p = mumford_pullback(&s, &DivisorClass::e(6, 6)).unwrap();
        assert!(s.roots().iter().all(|r| p.rep.dot(r).is_zero()));
    }

    #[test]
    fn ampleness() {
        let s = a2_2a1();
        assert!(is_ample(&s, &anticanonical(&s)).unwrap());
        let zero = ClassOnS::new(&s, DivisorClass::zero(6)).unwrap();
        assert!(!is_ample(&s, &zero).unwrap());
        let e = mumford_pullback(&s, &DivisorClass::e(6, 6)).unwrap();
        assert!(!is_ample(&s, &e).unwrap());
        let bad = ClassOnS {
            rep: DivisorClass::e(6, 1),
        };
        assert!(is_ample(&s, &bad).is_err());
    }

    #[test]
    fn four_a1_cubic() {
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
        assert_eq!(s.dynkin(), "4A1");
        assert_eq!(s.line_count(), 9);
    }
}
