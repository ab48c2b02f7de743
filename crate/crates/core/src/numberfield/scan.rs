//! Prime scans: Frobenius and principal order of every prime up to a bound,
//! and the finite-N principal densities built from them.

use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;

use super::classgroup::{principal_order_of, ClassGroupData};
use super::split::{check_frobenius_order, frobenius_element, split_prime};
use super::{FieldDescription, FieldError};
use crate::arith::primes_up_to;
use crate::extension::ConjugacyClass;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ScanStatus {
    Ramified,
    /// `p` divides the index of a field without a symbol-based splitting path.
    Excluded,
    Scanned,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScanRecord {
    pub p: u64,
    pub status: ScanStatus,
    /// Index of the Frobenius element in the Galois group.
    pub frobenius: Option<usize>,
    pub frobenius_label: Option<String>,
    pub residue_degree: Option<u32>,
    pub principal_order: Option<u64>,
    pub is_principal_split: bool,
}

#[derive(Clone, Debug)]
pub struct ScanOptions {
    /// Worker threads; 0 uses the global pool.
    pub threads: usize,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions { threads: 0 }
    }
}

fn scan_one(k: &FieldDescription, cg: &ClassGroupData, p: u64) -> Result<ScanRecord, FieldError> {
    let mut record = ScanRecord {
        p,
        status: ScanStatus::Ramified,
        frobenius: None,
        frobenius_label: None,
        residue_degree: None,
        principal_order: None,
        is_principal_split: false,
    };
    if k.is_ramified(p) {
        return Ok(record);
    }
    let g = frobenius_element(k, p)?;
    record.frobenius = Some(g);
    record.frobenius_label = Some(k.galois().label(g).to_string());
    let primes = match split_prime(k, p) {
        Ok(primes) => primes,
        Err(FieldError::Excluded(_)) => {
            record.status = ScanStatus::Excluded;
            return Ok(record);
        }
        Err(e) => return Err(e),
    };
    check_frobenius_order(k, p, g, &primes)?;
    let order = principal_order_of(k, cg, &primes)?;
    if cg.structure.order() % order != 0 {
        return Err(FieldError::Internal(format!("principal order {order} at {p} does not divide h")));
    }
    record.status = ScanStatus::Scanned;
    record.residue_degree = Some(primes[0].residue_degree);
    record.principal_order = Some(order);
    record.is_principal_split = order == 1;
    Ok(record)
}

/// One record per prime `p <= max_p`, in increasing order. The first failing
/// prime aborts the scan.
pub fn scan_primes(
    k: &FieldDescription,
    cg: &ClassGroupData,
    max_p: u64,
    opts: &ScanOptions,
) -> Result<Vec<ScanRecord>, FieldError> {
    let primes = primes_up_to(max_p);
    let run = || primes.par_iter().map(|&p| scan_one(k, cg, p)).collect::<Vec<_>>();
    let results = if opts.threads == 0 {
        run()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(opts.threads)
            .build()
            .map_err(|e| FieldError::Internal(e.to_string()))?
            .install(run)
    };
    results.into_iter().collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DensityEstimate {
    pub class_representative: usize,
    pub m: u64,
    pub max_p: u64,
    pub numerator: u64,
    /// Every prime up to `max_p`, ramified and excluded ones included.
    pub denominator: u64,
    pub excluded: Vec<u64>,
}

impl DensityEstimate {
    /// Tallies records for the class `class` and exponent `m`.
    pub fn tally(records: &[ScanRecord], class: &ConjugacyClass, m: u64, max_p: u64) -> DensityEstimate {
        let mut est = DensityEstimate {
            class_representative: class.representative,
            m,
            max_p,
            numerator: 0,
            denominator: 0,
            excluded: Vec::new(),
        };
        for r in records.iter().filter(|r| r.p <= max_p) {
            est.denominator += 1;
            match r.status {
                ScanStatus::Scanned => {
                    let hit = r.frobenius.is_some_and(|g| class.contains(g))
                        && r.principal_order.is_some_and(|n| m % n == 0);
                    est.numerator += hit as u64;
                }
                ScanStatus::Excluded => est.excluded.push(r.p),
                ScanStatus::Ramified => {}
            }
        }
        est
    }

    pub fn value(&self) -> Ratio<u64> {
        Ratio::new(self.numerator, self.denominator.max(1))
    }

    pub fn as_f64(&self) -> f64 {
        self.numerator as f64 / self.denominator.max(1) as f64
    }
}

/// Proportion of primes `p <= max_p` with Frobenius in `class` and principal order dividing `m`.
pub fn empirical_density(
    k: &FieldDescription,
    cg: &ClassGroupData,
    class: &ConjugacyClass,
    m: u64,
    max_p: u64,
    opts: &ScanOptions,
) -> Result<DensityEstimate, FieldError> {
    if max_p < 2 {
        return Err(FieldError::Input(format!("scan bound {max_p} is below 2")));
    }
    if m == 0 {
        return Err(FieldError::Input("m must be positive".into()));
    }
    let records = scan_primes(k, cg, max_p, opts)?;
    Ok(DensityEstimate::tally(&records, class, m, max_p))
}

#[cfg(test)]
mod tests {
    use super::super::{build_quadratic, class_group};
    use super::*;

    #[test]
    fn small_scan_of_minus_five() {
        let k = build_quadratic(-5).unwrap();
        let cg = class_group(&k).unwrap();
        let records = scan_primes(&k, &cg, 50, &ScanOptions::default()).unwrap();
        assert_eq!(records.len(), 15);
        assert_eq!(records[0].status, ScanStatus::Ramified);
        let by_p = |p: u64| records.iter().find(|r| r.p == p).unwrap();
        assert_eq!(by_p(3).principal_order, Some(2));
        assert_eq!(by_p(29).principal_order, Some(1));
        assert!(by_p(29).is_principal_split);
        assert_eq!(by_p(11).residue_degree, Some(2));
        assert!(by_p(11).is_principal_split);
        for r in &records {
            if r.status == ScanStatus::Scanned {
                // p = x^2 + 5y^2 exactly for p = 1, 9 mod 20
                let f = r.residue_degree.unwrap();
                let split_principal = f == 1 && r.principal_order == Some(1);
                assert_eq!(split_principal, r.p % 20 == 1 || r.p % 20 == 9, "p = {}", r.p);
            }
        }
    }

    #[test]
    fn worker_count_does_not_change_output() {
        let k = build_quadratic(-23).unwrap();
        let cg = class_group(&k).unwrap();
        let one = scan_primes(&k, &cg, 3000, &ScanOptions { threads: 1 }).unwrap();
        let four = scan_primes(&k, &cg, 3000, &ScanOptions { threads: 4 }).unwrap();
        assert_eq!(one, four);
    }
}
