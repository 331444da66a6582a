//! The auxiliary classes Delta^(1..7) with their Riemann-Roch lower bounds,
//! and the section classes Gamma built from a fibration.

use crate::error::{Error, Result};
use crate::fibration::FibrationData;
use crate::lattice::{canonical_class, DivisorClass};
use crate::rational::{q, qf, Q};
use num_traits::Signed;
use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DeltaVariant {
    pub index: u8,
    pub half: bool,
    pub class: DivisorClass,
    /// The closed-form lower bound on dim |Delta|.
    #[serde(with = "crate::rational::serde_q")]
    pub bound: Q,
    /// 1/2 Delta.(Delta - K), computed from the class.
    #[serde(with = "crate::rational::serde_q")]
    pub riemann_roch: Q,
}

impl DeltaVariant {
    pub fn offset(&self) -> Q {
        &self.bound - &self.riemann_roch
    }
}

/// How far each closed-form bound exceeds 1/2 Delta.(Delta - K).
///
/// Zero for every item except 4, where expanding the class gives
/// (beta - 1)(alpha(beta - 2) + beta^2 - 4 beta + 2)/2 + 1. That is positive at
/// beta = 1, where the class is -E' and has no sections at all.
pub fn rr_offset(fib: &FibrationData, index: u8) -> Q {
    if index != 4 {
        return q(0);
    }
    let (a, b) = (sum_alpha(fib), sum_beta(fib));
    qf((b - 1) * (a * (b - 2) + b * b - 4 * b + 2), 2) + q(1)
}

fn require(ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Hypothesis(what.to_string()))
    }
}

fn n_q(fib: &FibrationData) -> Q {
    q(fib.n)
}

/// D_0 + nF - sum over I-1 fibers of sum lambda D_{i,lambda}, for the first `upto` I-1 fibers.
fn base(fib: &FibrationData, upto: usize) -> DivisorClass {
    let mut c = fib.section.clone();
    c.add_scaled(&n_q(fib), &fib.fiber_class);
    for f in &fib.i1()[..upto] {
        for (l, comp) in f.components.iter().enumerate().skip(1) {
            c.add_scaled(&q(-(l as i64)), &comp.class);
        }
    }
    c
}

fn sum_alpha(fib: &FibrationData) -> i64 {
    fib.alpha().iter().map(|&a| a as i64).sum()
}

fn sum_beta(fib: &FibrationData) -> i64 {
    fib.beta().iter().map(|&a| a as i64).sum()
}

fn sum_gamma(fib: &FibrationData) -> i64 {
    fib.gamma().iter().map(|&a| a as i64).sum()
}

/// The class Delta^(index) (or half of Delta^(1)) with its bound.
pub fn delta_class(fib: &FibrationData, index: u8, half: bool) -> Result<DeltaVariant> {
    let n = fib.n;
    let (alpha, beta, gamma) = (sum_alpha(fib), sum_beta(fib), sum_gamma(fib));
    let bp: i64 = fib.beta_prime().iter().map(|&a| a as i64).sum();
    if half {
        require(index == 1 && fib.t == 0, "the half class needs index 1 and t = 0")?;
    }
    let s1 = fib.s == 1 && fib.t == 0 && bp == 1;
    let e_r = || fib.i1().last().map(|f| f.e().class.clone());
    let (class, bound) = match index {
        1 => {
            let mut c = fib.section.scale_int(2);
            c.add_scaled(&q(2 * n), &fib.fiber_class);
            for f in fib.i1() {
                for (l, comp) in f.components.iter().enumerate().skip(1) {
                    c.add_scaled(&q(-2 * l as i64), &comp.class);
                }
            }
            for f in fib.i2() {
                for mu in 1..=f.beta().0 as usize {
                    c.add_scaled(&q(-2 * mu as i64), f.d(mu));
                }
            }
            for f in fib.ii() {
                for nu in 1..=f.gamma() as usize {
                    c.add_scaled(&q(-(nu as i64)), f.d(nu));
                }
            }
            if half {
                (c.scale(&qf(1, 2)), q(n + 1 - alpha - beta))
            } else {
                (c, q(3 * n + 2 - 3 * alpha - 3 * beta - gamma))
            }
        }
        2 => {
            require(s1, "index 2 needs s = 1, t = 0 and beta' = 1")?;
            let e_r = e_r().ok_or_else(|| Error::Hypothesis("index 2 needs r > 0".into()))?;
            let mut c = base(fib, fib.r);
            c = &c + &e_r;
            let f = &fib.i2()[0];
            for mu in 1..=f.beta().0 as usize {
                c.add_scaled(&q(-(mu as i64)), f.d(mu));
            }
            (c, q(n + 2 - alpha - beta))
        }
        3 => {
            require(s1, "index 3 needs s = 1, t = 0 and beta' = 1")?;
            let c = &base(fib, fib.r) - &fib.i2()[0].e_prime().unwrap().class;
            (c, q(n - alpha))
        }
        4 => {
            require(s1, "index 4 needs s = 1, t = 0 and beta' = 1")?;
            let b1 = beta - 1;
            let mut c = base(fib, fib.r).scale_int(b1);
            let f = &fib.i2()[0];
            for mu in 1..=f.beta().0 as usize {
                c.add_scaled(&q(-(beta - 2) * mu as i64), f.d(mu));
            }
            c = &c - &f.e_prime().unwrap().class;
            let bound = q(b1 * (n + 2 - alpha - beta)) + qf(n * b1 * (beta - 2), 2);
            (c, bound)
        }
        5 | 6 => {
            let g = if index == 5 { 2 } else { 3 };
            require(
                fib.s == 0 && fib.t == 1 && gamma == g,
                &format!("index {index} needs s = 0, t = 1 and gamma = {g}"),
            )?;
            let e_r = e_r().ok_or_else(|| Error::Hypothesis(format!("index {index} needs r > 0")))?;
            let f = &fib.ii()[0];
            let (mut c, bound) = if index == 5 {
                (base(fib, fib.r), q(n + 1 - alpha))
            } else {
                (base(fib, fib.r).scale_int(2), q(3 * n + 1 - 3 * alpha))
            };
            c = &c + &e_r;
            for mu in 1..=g as usize {
                let coeff = if index == 5 { -1 } else { -(mu as i64) };
                c.add_scaled(&q(coeff), f.d(mu));
            }
            (c, bound)
        }
        7 => {
            require(fib.s == 0 && fib.t == 0 && alpha >= n + 1, "index 7 needs s = t = 0 and alpha >= n + 1")?;
            let (rp, alpha_p) = r_prime(&fib.alpha(), n + 1);
            let mut c = base(fib, rp);
            let f = &fib.i1()[rp - 1];
            let before = alpha_p - f.alpha() as i64;
            for mu in 1..=(alpha_p - (n + 1)) {
                let lambda = (n + 1 - before + mu) as usize;
                c.add_scaled(&q(mu), f.d(lambda));
            }
            (c, q(0))
        }
        _ => return Err(Error::Hypothesis(format!("no auxiliary class with index {index}"))),
    };
    let k = canonical_class(class.k())?;
    let riemann_roch = class.dot(&(&class - &k)) / q(2);
    Ok(DeltaVariant {
        index,
        half,
        class,
        bound,
        riemann_roch,
    })
}

/// The least r' with alpha_1 + ... + alpha_{r'} >= threshold, and that partial sum.
pub fn r_prime(alpha: &[u32], threshold: i64) -> (usize, i64) {
    let mut acc = 0;
    for (i, &a) in alpha.iter().enumerate() {
        acc += a as i64;
        if acc >= threshold {
            return (i + 1, acc);
        }
    }
    (alpha.len(), acc)
}

/// The section class Gamma of the given case (1: I-2 fiber, 2: type II fiber,
/// 3: only I-1 fibers), with its numerical invariants checked.
pub fn gamma_class(fib: &FibrationData, case: u8, degree: i64) -> Result<DivisorClass> {
    let n = fib.n;
    let bp: i64 = fib.beta_prime().iter().map(|&a| a as i64).sum();
    let gamma = sum_gamma(fib);
    let class = match case {
        1 => {
            require(
                fib.s == 1 && fib.t == 0 && bp == 1 && degree == 5 - n,
                "case 1 needs s = 1, t = 0, beta' = 1 and degree 5 - n",
            )?;
            let f = &fib.i2()[0];
            let mut c = base(fib, fib.r);
            for mu in 1..=f.beta().0 as usize {
                c.add_scaled(&q(-(mu as i64)), f.d(mu));
            }
            &c + &f.e().class
        }
        2 => {
            require(
                fib.s == 0 && fib.t == 1 && (gamma == 2 || gamma == 3) && degree == 5 - n,
                "case 2 needs s = 0, t = 1, gamma in {2, 3} and degree 5 - n",
            )?;
            let f = &fib.ii()[0];
            let mut c = base(fib, fib.r);
            for mu in 1..=gamma as usize {
                c.add_scaled(&q(-(gamma - 2)), f.d(mu));
            }
            c
        }
        3 => {
            require(
                fib.s == 0 && fib.t == 0 && (degree == 6 - n || degree == 5 - n),
                "case 3 needs s = t = 0 and degree 6 - n or 5 - n",
            )?;
            let mut c = base(fib, fib.r);
            c.add_scaled(&q(1), &fib.fiber_class);
            c
        }
        _ => return Err(Error::Hypothesis(format!("no section class for case {case}"))),
    };
    let k = canonical_class(class.k())?;
    let sq = class.self_int();
    let ok = match case {
        3 if degree == 6 - n => sq == q(0),
        _ => sq == q(-1),
    };
    if !ok || class.dot(&k) != -&sq - q(2) || class.dot(&fib.fiber_class) != q(1) {
        return Err(Error::Internal(format!(
            "section class {class} of case {case} has square {sq} and K-degree {}",
            class.dot(&k)
        )));
    }
    Ok(class)
}

/// Gamma meets every root non-negatively unless it is itself a root.
pub fn gamma_meets_roots_properly(gamma: &DivisorClass, roots: &[DivisorClass]) -> bool {
    roots.iter().all(|r| r == gamma || !gamma.dot(r).is_negative())
}
