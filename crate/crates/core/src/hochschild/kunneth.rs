//! Künneth check for adjoining a free weight-1 variable: HH and HC of `A[t]`,
//! bigraded by (weight in A, t-degree), against the tensor-product prediction.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::chain::SignConvention;
use super::homology::HochschildEngine;
use super::slice::{canonical_free_key, Key};
use crate::algebra::GradedAlgebra;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KunnethCell {
    pub kind: String,
    pub n: usize,
    pub w: u32,
    pub j: u32,
    pub computed: usize,
    pub predicted: usize,
}

impl KunnethCell {
    pub fn ok(&self) -> bool {
        self.computed == self.predicted
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct KunnethReport {
    pub algebra: String,
    pub convention: String,
    pub n_max: usize,
    pub w_max: u32,
    pub t_cutoff: u32,
    /// HH cells first, then HC cells (HC is only computed when HH passes).
    pub cells: Vec<KunnethCell>,
}

impl KunnethReport {
    pub fn passed(&self) -> bool {
        self.cells.iter().all(KunnethCell::ok)
    }

    /// The first failing cell as a `Mismatch` error.
    pub fn first_mismatch(&self) -> Option<Error> {
        self.cells.iter().find(|c| !c.ok()).map(|c| Error::Mismatch {
            kind: c.kind.clone(),
            n: c.n,
            w: c.w,
            j: c.j,
            computed: c.computed,
            predicted: c.predicted,
        })
    }

    pub fn into_result(self) -> Result<Self> {
        match self.first_mismatch() {
            Some(e) => Err(e),
            None => Ok(self),
        }
    }
}

/// Map from multidegree class of `at` to the exponent of its last generator.
fn t_degrees(at: &GradedAlgebra, total: u32) -> Result<HashMap<Key, u32>> {
    let weights = at.weights().to_vec();
    let mut map: HashMap<Key, u32> = HashMap::new();
    let mut exps = vec![0u16; weights.len()];
    let mut bad = false;
    fn go(i: usize, rem: u32, weights: &[u32], exps: &mut Vec<u16>, f: &mut dyn FnMut(&[u16])) {
        if i == weights.len() {
            if rem == 0 {
                f(exps);
            }
            return;
        }
        let mut e = 0u32;
        while e * weights[i] <= rem {
            exps[i] = e as u16;
            go(i + 1, rem - e * weights[i], weights, exps, f);
            e += 1;
        }
        exps[i] = 0;
    }
    go(0, total, &weights, &mut exps, &mut |e| {
        let k = at.multidegree(&at.monomial(e));
        let j = *e.last().unwrap() as u32;
        if *map.entry(k).or_insert(j) != j {
            bad = true;
        }
    });
    if bad {
        return Err(Error::Unsupported(
            "t-degree is not determined by the multigrading of A[t]".into(),
        ));
    }
    Ok(map)
}

fn fresh_symbol(a: &GradedAlgebra) -> String {
    let names = a.generator_names();
    let mut s = "t".to_string();
    let mut k = 0;
    while names.iter().any(|n| *n == s) {
        k += 1;
        s = format!("t{k}");
    }
    s
}

/// Compare `HH_n(A[t])_{(w,j)}` and `HC_n(A[t])_{(w,j)}` with the Künneth prediction
/// for all `n <= n_max`, `w <= w_max`, `j <= t_cutoff`.
pub fn verify_kunneth(
    a: &Arc<GradedAlgebra>,
    t_cutoff: u32,
    n_max: usize,
    w_max: u32,
    conv: SignConvention,
) -> Result<KunnethReport> {
    let at = Arc::new(a.adjoin(&fresh_symbol(a), 1)?);
    let base = HochschildEngine::new(a.clone(), w_max).with_convention(conv);
    let big = HochschildEngine::new(at.clone(), w_max + t_cutoff).with_convention(conv);
    let free = at.is_free();
    let weights = at.weights().to_vec();

    // Jobs: (total weight, class key to evaluate, w, j).
    let mut jobs: Vec<(u32, Key, u32, u32)> = Vec::new();
    for total in 0..=w_max + t_cutoff {
        let tmap = t_degrees(&at, total)?;
        for (key, _) in big.all_classes(total) {
            let j = tmap[&key];
            if j > t_cutoff || total - j > w_max {
                continue;
            }
            let eval = if free { canonical_free_key(&weights, &key) } else { key };
            jobs.push((total, eval, total - j, j));
        }
    }

    let mut report = KunnethReport {
        algebra: a.name().to_string(),
        convention: conv.name().to_string(),
        n_max,
        w_max,
        t_cutoff,
        cells: Vec::new(),
    };

    for kind in ["HH", "HC"] {
        let per_job: Vec<Result<Vec<usize>>> = jobs
            .par_iter()
            .map(|(total, key, _, _)| {
                (0..=n_max)
                    .map(|n| match kind {
                        "HH" => big.hh_class(n, *total, key),
                        _ => big.hc_class(n, *total, key),
                    })
                    .collect()
            })
            .collect();
        let mut computed: BTreeMap<(usize, u32, u32), usize> = BTreeMap::new();
        for ((_, _, w, j), dims) in jobs.iter().zip(per_job) {
            for (n, d) in dims?.into_iter().enumerate() {
                *computed.entry((n, *w, *j)).or_insert(0) += d;
            }
        }
        let base_dims: Vec<Result<(usize, u32, usize, usize)>> = (0..=n_max)
            .flat_map(|n| (0..=w_max).map(move |w| (n, w)))
            .collect::<Vec<_>>()
            .par_iter()
            .map(|&(n, w)| {
                let hh = base.hh(n, w)?;
                let hh_prev = if n == 0 { 0 } else { base.hh(n - 1, w)? };
                let hc = if kind == "HC" { base.hc(n, w)? } else { 0 };
                Ok((n, w, hh, if kind == "HC" { hc } else { hh_prev }))
            })
            .collect();
        let mut base_map = HashMap::new();
        for r in base_dims {
            let (n, w, x, y) = r?;
            base_map.insert((n, w), (x, y));
        }
        for n in 0..=n_max {
            for w in 0..=w_max {
                for j in 0..=t_cutoff {
                    let (hh, other) = base_map[&(n, w)];
                    let predicted = match kind {
                        "HH" => hh + if j >= 1 { other } else { 0 },
                        _ => {
                            if j == 0 {
                                other
                            } else {
                                hh
                            }
                        }
                    };
                    report.cells.push(KunnethCell {
                        kind: kind.to_string(),
                        n,
                        w,
                        j,
                        computed: computed.get(&(n, w, j)).copied().unwrap_or(0),
                        predicted,
                    });
                }
            }
        }
        if !report.passed() {
            break;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alg(s: &str) -> Arc<GradedAlgebra> {
        Arc::new(GradedAlgebra::parse(s).unwrap())
    }

    #[test]
    fn ground_field_and_line() {
        let r = verify_kunneth(&alg("algebra Q\nvars"), 4, 3, 0, SignConvention::Standard).unwrap();
        assert!(r.passed());
        let r = verify_kunneth(&alg("vars x:1"), 3, 3, 6, SignConvention::Standard).unwrap();
        assert!(r.passed(), "{:?}", r.first_mismatch());
        assert_eq!(r.cells.len(), 2 * 4 * 7 * 4);
    }

    #[test]
    fn cusp_small_range() {
        let a = alg("vars x:2 y:3\nrel y^2 - x^3");
        let r = verify_kunneth(&a, 2, 3, 8, SignConvention::Standard).unwrap();
        assert!(r.passed(), "{:?}", r.first_mismatch());
    }

    #[test]
    fn corrupt_boundary_is_caught() {
        let r = verify_kunneth(&alg("vars x:1"), 2, 2, 3, SignConvention::CorruptB).unwrap();
        match r.first_mismatch() {
            Some(Error::Mismatch { kind, n, w, j, .. }) => {
                assert_eq!((kind.as_str(), n, w, j), ("HH", 0, 0, 1));
            }
            other => panic!("expected a mismatch, got {other:?}"),
        }
    }
}
