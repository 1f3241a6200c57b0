use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::{OperadComplex, OperadError, Ordinal2};
use crate::dgcat::{wrap_label, FiniteDgCategory};
use crate::linalg::Matrix;
use crate::scalar::{Field, Scalar};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StageMetrics {
    pub objects: usize,
    pub total_basis: usize,
    pub largest_hom: usize,
}

impl StageMetrics {
    pub fn of(c: &FiniteDgCategory) -> Self {
        StageMetrics {
            objects: c.num_objects(),
            total_basis: c.total_basis_size(),
            largest_hom: c.max_hom_size(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Metrics {
    pub basis_size: usize,
    /// the factors `D_1, …, D_{k-1}` that were materialized
    pub stages: Vec<StageMetrics>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AugmentationSummary {
    /// the functional vanishes on the image of `d`
    pub chain_map: bool,
    /// `(label, coefficient)` of the chosen degree-0 representative
    pub representative: Vec<(String, String)>,
    pub value_on_representative: Option<String>,
    pub nonzero: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Timings {
    pub millis: u128,
}

/// Record of the contractibility check for one 2-ordinal.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ContractibilityCertificate {
    pub ordinal: Ordinal2,
    pub field: Field,
    pub version: String,
    pub basis: BTreeMap<i32, Vec<String>>,
    pub dims: BTreeMap<i32, usize>,
    pub differentials: BTreeMap<i32, Matrix>,
    pub ranks: BTreeMap<i32, usize>,
    pub cohomology: BTreeMap<i32, usize>,
    pub euler_characteristic: i64,
    pub augmentation: AugmentationSummary,
    pub verdict: bool,
    pub metrics: Metrics,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
}

/// Builds `O(o)` and certifies `H = k` in degree 0 with nonzero augmentation
/// on the representative. A false verdict is a result, not an error.
pub fn check_contractible(
    o: &Ordinal2,
    field: Field,
    guard_basis: Option<usize>,
    timings: bool,
) -> Result<ContractibilityCertificate, OperadError> {
    let start = Instant::now();
    let oc = OperadComplex::build(o, guard_basis)?;
    let graded = oc.hom.to_chain_complex(field)?;
    let complex = &graded.complex;
    let h = complex.cohomology()?;
    let cohomology = h.dims();
    let chain_map = oc.check_augmentation().is_ok();
    let degree_zero = graded.by_degree.get(&0).cloned().unwrap_or_default();
    let (representative, value) = match h.group(0).and_then(|g| g.representatives().first()) {
        Some(rep) => {
            let mut v = field.zero();
            let mut entries = Vec::new();
            for (p, c) in rep.entries() {
                let i = degree_zero[*p];
                entries.push((oc.hom.basis[i].label.clone(), c.to_string()));
                v = &v + &(c * &field.from_rational(&oc.augmentation[i])?);
            }
            (entries, Some(v))
        }
        None => (Vec::new(), None),
    };
    let nonzero = value.as_ref().is_some_and(|v: &Scalar| !v.is_zero());
    let verdict = cohomology == BTreeMap::from([(0, 1)]) && nonzero && chain_map;
    let degrees: Vec<i32> = complex.degrees().collect();
    let differentials: BTreeMap<i32, Matrix> = degrees
        .iter()
        .map(|d| (*d, complex.differential(*d)))
        .filter(|(_, m)| !m.is_zero())
        .collect();
    let ranks = differentials.iter().map(|(d, m)| (*d, m.rank())).collect();
    let basis = graded
        .by_degree
        .iter()
        .map(|(d, v)| {
            (
                *d,
                v.iter().map(|i| oc.hom.basis[*i].label.clone()).collect(),
            )
        })
        .collect();
    Ok(ContractibilityCertificate {
        ordinal: o.clone(),
        field,
        version: env!("CARGO_PKG_VERSION").to_string(),
        basis,
        dims: oc.dims(),
        differentials,
        ranks,
        cohomology,
        euler_characteristic: oc.euler_characteristic(),
        augmentation: AugmentationSummary {
            chain_map,
            representative,
            value_on_representative: value.map(|v| v.to_string()),
            nonzero,
        },
        verdict,
        metrics: Metrics {
            basis_size: oc.hom.len(),
            stages: oc.stages,
        },
        timings: timings.then(|| Timings {
            millis: start.elapsed().as_millis(),
        }),
    })
}

/// All ordinals with `1 <= k <= max_k` and `Σ n_i <= max_sum`, ordered by
/// length and then lexicographically.
pub fn sweep_ordinals(max_k: usize, max_sum: usize) -> Vec<Ordinal2> {
    fn go(left: usize, budget: usize, cur: &mut Vec<usize>, out: &mut Vec<Ordinal2>) {
        if left == 0 {
            out.push(Ordinal2(cur.clone()));
            return;
        }
        for n in 0..=budget {
            cur.push(n);
            go(left - 1, budget - n, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    for k in 1..=max_k {
        go(k, max_sum, &mut Vec::new(), &mut out);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepStatus {
    Pass,
    Fail,
    Aborted,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SweepEntry {
    pub ordinal: Ordinal2,
    pub status: SweepStatus,
    pub dims: BTreeMap<i32, usize>,
    pub cohomology: BTreeMap<i32, usize>,
    pub euler_characteristic: i64,
    pub augmentation: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SweepReport {
    pub field: Field,
    pub max_k: usize,
    pub max_sum: usize,
    pub guard_basis: Option<usize>,
    pub entries: Vec<SweepEntry>,
    pub passed: usize,
    pub failed: usize,
    pub aborted: usize,
    pub all_passed: bool,
    #[serde(skip)]
    pub certificates: Vec<ContractibilityCertificate>,
}

/// Runs [`check_contractible`] over [`sweep_ordinals`] in parallel; the
/// report keeps the ordinal order.
pub fn sweep(
    max_k: usize,
    max_sum: usize,
    field: Field,
    guard_basis: Option<usize>,
    timings: bool,
) -> Result<SweepReport, OperadError> {
    let ordinals = sweep_ordinals(max_k, max_sum);
    let results: Vec<(Ordinal2, Result<ContractibilityCertificate, OperadError>)> = ordinals
        .into_par_iter()
        .map(|o| {
            let r = check_contractible(&o, field, guard_basis, timings);
            (o, r)
        })
        .collect();
    let mut entries = Vec::new();
    let mut certificates = Vec::new();
    for (o, r) in results {
        match r {
            Ok(c) => {
                entries.push(SweepEntry {
                    ordinal: o,
                    status: if c.verdict {
                        SweepStatus::Pass
                    } else {
                        SweepStatus::Fail
                    },
                    dims: c.dims.clone(),
                    cohomology: c.cohomology.clone(),
                    euler_characteristic: c.euler_characteristic,
                    augmentation: c.augmentation.value_on_representative.clone(),
                    message: None,
                });
                certificates.push(c);
            }
            Err(e @ OperadError::BasisGuard { .. }) => entries.push(SweepEntry {
                ordinal: o,
                status: SweepStatus::Aborted,
                dims: BTreeMap::new(),
                cohomology: BTreeMap::new(),
                euler_characteristic: 0,
                augmentation: None,
                message: Some(e.to_string()),
            }),
            Err(e) => return Err(e),
        }
    }
    let count = |s: SweepStatus| entries.iter().filter(|e| e.status == s).count();
    let (passed, failed, aborted) = (
        count(SweepStatus::Pass),
        count(SweepStatus::Fail),
        count(SweepStatus::Aborted),
    );
    Ok(SweepReport {
        field,
        max_k,
        max_sum,
        guard_basis,
        all_passed: failed == 0 && aborted == 0,
        entries,
        passed,
        failed,
        aborted,
        certificates,
    })
}

/// Comparison of `O(o)` with `O(o, 0)`, which should agree basis element by
/// basis element because `I_0 ⊗̃ D` is a copy of `D`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegeneracyReport {
    pub ordinal: Ordinal2,
    pub extended: Ordinal2,
    pub size: usize,
    pub extended_size: usize,
    pub labels_match: bool,
    pub degrees_match: bool,
    pub differentials_match: bool,
    pub passed: bool,
}

pub fn degeneracy_check(
    o: &Ordinal2,
    guard_basis: Option<usize>,
) -> Result<DegeneracyReport, OperadError> {
    let extended = o.push(0);
    let base = OperadComplex::build(o, guard_basis)?;
    let ext = OperadComplex::build(&extended, guard_basis)?;
    let same_size = base.hom.len() == ext.hom.len();
    let labels_match = same_size
        && base
            .hom
            .basis
            .iter()
            .zip(&ext.hom.basis)
            .all(|(b, e)| e.label == format!("{} @ 0", wrap_label(&b.label)));
    let degrees_match = same_size
        && base
            .hom
            .basis
            .iter()
            .zip(&ext.hom.basis)
            .all(|(b, e)| b.degree == e.degree);
    let differentials_match = same_size && base.hom.differential == ext.hom.differential;
    Ok(DegeneracyReport {
        ordinal: o.clone(),
        extended,
        size: base.hom.len(),
        extended_size: ext.hom.len(),
        labels_match,
        degrees_match,
        differentials_match,
        passed: labels_match && degrees_match && differentials_match,
    })
}
