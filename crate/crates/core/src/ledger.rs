//! Audit of the published operator lists, kets and coefficient patterns against
//! the derived protocol. Every divergence becomes one [`LedgerEntry`].

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::channels::{paper_channels, CoefficientProducts};
use crate::error::{Error, Result};
use crate::filterops::{paper_filter_bipartite, paper_filter_tripartite, verify_unitary, OperatorMatrix};
use crate::protocol::{composed_term_indices, normalize_input, paper_trace, TraceReport};
use crate::published::{self, Term};
use crate::statevec::{basis_index, basis_label};
use crate::UNITARITY_TOLERANCE;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Severity {
    Typo,
    Inconsistency,
}

impl Severity {
    pub fn as_str(self) -> &'static str {
        match self {
            Severity::Typo => "typo",
            Severity::Inconsistency => "inconsistency",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LedgerEntry {
    pub location: String,
    pub printed: String,
    pub derived: String,
    pub severity: Severity,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckStatus {
    /// Published and derived content agree.
    Pass,
    /// They disagree; a ledger entry records it and the derived content governs.
    Discrepancy,
    /// A derived operator itself fails its own invariant.
    Fail,
}

impl CheckStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            CheckStatus::Pass => "PASS",
            CheckStatus::Discrepancy => "LEDGER",
            CheckStatus::Fail => "FAIL",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub status: CheckStatus,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct Audit {
    pub k: usize,
    pub departures: Vec<f64>,
    pub checks: Vec<Check>,
    pub entries: Vec<LedgerEntry>,
    /// Unitarity deviation of the published filter at these departures.
    pub literal_filter_deviation: f64,
    pub trace: TraceReport,
    pub literal_filter: OperatorMatrix,
}

impl Audit {
    /// True when every derived operator passes; ledger entries do not count as failures.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Fail)
    }
}

/// `|000>|00>|01>|10>` style ket: message qubits, then one group per channel.
pub fn format_ket(index: usize, k: usize) -> String {
    let label = basis_label(index, 3 * k);
    let mut out = format!("|{}>", &label[..k]);
    for j in 0..k {
        out.push_str(&format!("|{}>", &label[k + 2 * j..k + 2 * j + 2]));
    }
    out
}

fn a_b_pattern(i: usize, k: usize) -> String {
    (0..k)
        .map(|j| if (i >> (k - 1 - j)) & 1 == 0 { 'a' } else { 'b' })
        .collect()
}

fn pairs_text(pairs: &[(usize, usize)]) -> String {
    let parts: Vec<String> = pairs.iter().map(|(a, b)| format!("({a},{b})")).collect();
    parts.join(" ")
}

/// Terms whose printed ket differs from the derived register index.
fn ket_mismatches(printed: &[Term], derived: &[usize]) -> Vec<(usize, usize, usize)> {
    printed
        .iter()
        .filter_map(|&(term, label)| {
            let p = basis_index(label).expect("static label");
            let d = derived[term - 1];
            (p != d).then_some((term, p, d))
        })
        .collect()
}

fn kets_text(items: &[(usize, usize)], k: usize) -> String {
    let parts: Vec<String> = items
        .iter()
        .map(|&(term, idx)| format!("c{term} {}", format_ket(idx, k)))
        .collect();
    parts.join(", ")
}

/// Sorted, 1-based, unordered swap pairs.
fn one_based_pairs(pairs: impl IntoIterator<Item = (usize, usize)>) -> Vec<(usize, usize)> {
    let mut out: Vec<(usize, usize)> = pairs.into_iter().map(|(a, b)| (a.min(b) + 1, a.max(b) + 1)).collect();
    out.sort_unstable();
    out
}

/// Diagonal entries that differ between the published and the constructive filter,
/// skipping both filters' junk indices.
fn filter_mismatches(
    literal: &OperatorMatrix,
    constructive: &OperatorMatrix,
    literal_junk: &[usize],
    retained: &[usize],
) -> Vec<(usize, Complex64, Complex64)> {
    let dim = literal.dim();
    let constructive_junk: Vec<usize> = (0..dim)
        .filter(|&i| !retained.contains(&i) && constructive.get(i, i) != Complex64::new(1.0, 0.0))
        .collect();
    (0..dim)
        .filter(|i| !literal_junk.contains(i) && !constructive_junk.contains(i))
        .filter_map(|i| {
            let (l, c) = (literal.get(i, i), constructive.get(i, i));
            ((l - c).norm() > UNITARITY_TOLERANCE).then_some((i, l, c))
        })
        .collect()
}

fn ratio_text(value: Complex64, m: &CoefficientProducts) -> String {
    if let Some(i) = (0..m.values.len())
        .find(|&i| (Complex64::new(m.ratio(i), 0.0) - value).norm() <= UNITARITY_TOLERANCE && i != m.least_index)
    {
        return format!("m1/m{} = {:.6}", i + 1, value.re);
    }
    format!("{:.6}", value.re)
}

fn check(name: &str, status: CheckStatus, detail: String) -> Check {
    Check {
        name: String::from(name),
        status,
        detail,
    }
}

/// Audits the published two- or three-qubit material at the given departures.
///
/// Departures must keep `m_1` the least coefficient product, as the published
/// filters assume.
pub fn audit(departures: &[f64]) -> Result<Audit> {
    let k = departures.len();
    if !(2..=3).contains(&k) {
        return Err(Error::UnsupportedSize { k });
    }
    let channels = paper_channels(departures)?;
    let uniform = normalize_input(alloc::vec![Complex64::new(1.0, 0.0); 1 << k])?;
    let trace = paper_trace(&uniform, &channels)?;
    let m = &trace.products;

    let mut checks = Vec::new();
    let mut entries = Vec::new();

    // Composite state kets.
    let printed_composed: &[Term] = if k == 2 {
        &published::BIPARTITE_COMPOSED
    } else {
        &published::TRIPARTITE_COMPOSED
    };
    let composed_bad = ket_mismatches(printed_composed, &composed_term_indices(&channels));
    checks.push(check(
        "composite state kets",
        if composed_bad.is_empty() {
            CheckStatus::Pass
        } else {
            CheckStatus::Discrepancy
        },
        format!("{} of {} terms differ", composed_bad.len(), 1 << k),
    ));
    if !composed_bad.is_empty() {
        entries.push(LedgerEntry {
            location: format!("{}-qubit composite state kets", k),
            printed: kets_text(&composed_bad.iter().map(|&(t, p, _)| (t, p)).collect::<Vec<_>>(), k),
            derived: kets_text(&composed_bad.iter().map(|&(t, _, d)| (t, d)).collect::<Vec<_>>(), k),
            severity: Severity::Typo,
        });
    }

    // Coefficient products.
    let printed_m: &[&str] = if k == 2 {
        &published::BIPARTITE_M
    } else {
        &published::TRIPARTITE_M
    };
    let mut m_bad: Vec<(String, String)> = Vec::new();
    for (i, &p) in printed_m.iter().enumerate() {
        let d = a_b_pattern(i, k);
        if p != d {
            m_bad.push((format!("m{} = {}", i + 1, p), format!("m{} = {}", i + 1, d)));
        }
    }
    if k == 3 {
        for (i, &p) in published::TRIPARTITE_COMPOSED_COEFFICIENTS.iter().enumerate() {
            let d = a_b_pattern(i, k);
            if p != d {
                m_bad.push((
                    format!("composite term c{} carries {}", i + 1, p),
                    format!("c{} carries {}", i + 1, d),
                ));
            }
        }
    }
    checks.push(check(
        "coefficient product list",
        if m_bad.is_empty() {
            CheckStatus::Pass
        } else {
            CheckStatus::Discrepancy
        },
        format!("{} printed patterns differ from the a/b enumeration", m_bad.len()),
    ));
    if !m_bad.is_empty() {
        let (p, d): (Vec<String>, Vec<String>) = m_bad.into_iter().unzip();
        entries.push(LedgerEntry {
            location: format!("{}-qubit coefficient list (m3/m4)", k),
            printed: p.join("; "),
            derived: d.join("; "),
            severity: Severity::Typo,
        });
    }

    // Post-measurement kets, routed kets and the routing permutation.
    let printed_measured: &[Term] = if k == 2 {
        &published::BIPARTITE_MEASURED
    } else {
        &published::TRIPARTITE_AFTER_MEASUREMENT
    };
    let printed_routed: &[Term] = if k == 2 {
        &published::BIPARTITE_ROUTED
    } else {
        &published::TRIPARTITE_AFTER_MEASUREMENT
    };
    let measured_bad = ket_mismatches(printed_measured, &trace.survivors);
    let routed_bad = ket_mismatches(printed_routed, &trace.targets);
    let printed_u = one_based_pairs(
        (if k == 2 {
            &published::BIPARTITE_U[..]
        } else {
            &published::TRIPARTITE_U[..]
        })
        .iter()
        .map(|&(a, b)| (a - 1, b - 1)),
    );
    let derived_u = one_based_pairs(trace.routing.iter().copied());
    let u_bad: Vec<(usize, usize)> = printed_u.iter().filter(|p| !derived_u.contains(p)).copied().collect();
    let u_new: Vec<(usize, usize)> = derived_u.iter().filter(|p| !printed_u.contains(p)).copied().collect();

    checks.push(check(
        "state after measurement",
        if measured_bad.is_empty() {
            CheckStatus::Pass
        } else {
            CheckStatus::Discrepancy
        },
        format!(
            "{} of {} printed kets differ from the derived survivors",
            measured_bad.len(),
            1 << k
        ),
    ));
    checks.push(check(
        "routed state kets",
        if routed_bad.is_empty() {
            CheckStatus::Pass
        } else {
            CheckStatus::Discrepancy
        },
        format!(
            "{} of {} printed kets differ from the derived targets",
            routed_bad.len(),
            1 << k
        ),
    ));
    checks.push(check(
        "U swap list",
        if u_bad.is_empty() && u_new.is_empty() {
            CheckStatus::Pass
        } else {
            CheckStatus::Discrepancy
        },
        format!(
            "printed {} / derived {}",
            pairs_text(&printed_u),
            pairs_text(&derived_u)
        ),
    ));
    let u_dev = verify_unitary(&trace.permutation);
    checks.push(check(
        "derived U unitary",
        if u_dev <= UNITARITY_TOLERANCE {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        },
        format!("deviation {u_dev:.3e}"),
    ));

    if k == 2 {
        if !measured_bad.is_empty() {
            entries.push(LedgerEntry {
                location: String::from("2-qubit state after measurement M"),
                printed: kets_text(&measured_bad.iter().map(|&(t, p, _)| (t, p)).collect::<Vec<_>>(), k),
                derived: kets_text(&measured_bad.iter().map(|&(t, _, d)| (t, d)).collect::<Vec<_>>(), k),
                severity: Severity::Typo,
            });
        }
        if !routed_bad.is_empty() {
            entries.push(LedgerEntry {
                location: String::from("2-qubit state after U"),
                printed: kets_text(&routed_bad.iter().map(|&(t, p, _)| (t, p)).collect::<Vec<_>>(), k),
                derived: kets_text(&routed_bad.iter().map(|&(t, _, d)| (t, d)).collect::<Vec<_>>(), k),
                severity: Severity::Inconsistency,
            });
        }
        if !u_bad.is_empty() || !u_new.is_empty() {
            entries.push(LedgerEntry {
                location: String::from("2-qubit U element list"),
                printed: pairs_text(&u_bad),
                derived: pairs_text(&u_new),
                severity: Severity::Inconsistency,
            });
        }
    } else if !measured_bad.is_empty() || !routed_bad.is_empty() || !u_bad.is_empty() || !u_new.is_empty() {
        // The three-qubit kets are introduced as the post-measurement state but
        // are the routed targets; the U list is built on the same confusion.
        let mut printed = format!(
            "after measurement: {}",
            kets_text(&measured_bad.iter().map(|&(t, p, _)| (t, p)).collect::<Vec<_>>(), k)
        );
        let mut derived = format!(
            "after measurement: {}",
            kets_text(&measured_bad.iter().map(|&(t, _, d)| (t, d)).collect::<Vec<_>>(), k)
        );
        if routed_bad.is_empty() {
            derived.push_str("; the printed kets are the routed targets reached after U and F");
        } else {
            derived.push_str(&format!(
                "; routed targets {}",
                kets_text(&routed_bad.iter().map(|&(t, _, d)| (t, d)).collect::<Vec<_>>(), k)
            ));
        }
        if !u_bad.is_empty() || !u_new.is_empty() {
            printed.push_str(&format!("; U swaps {}", pairs_text(&u_bad)));
            derived.push_str(&format!("; U swaps {}", pairs_text(&u_new)));
        }
        entries.push(LedgerEntry {
            location: String::from("3-qubit state labelled as after measurement, with its U element list"),
            printed,
            derived,
            severity: Severity::Inconsistency,
        });
    }

    // Filters.
    let literal = if k == 2 {
        paper_filter_bipartite(m)?
    } else {
        paper_filter_tripartite(m)?
    };
    let literal_filter_deviation = verify_unitary(&literal);
    let constructive_dev = verify_unitary(&trace.constructive_filter);
    let applied_dev = verify_unitary(&trace.filter);
    checks.push(check(
        "applied F unitary",
        if applied_dev <= UNITARITY_TOLERANCE {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        },
        format!("{:?} filter, deviation {applied_dev:.3e}", trace.filter.provenance()),
    ));
    checks.push(check(
        "constructive F unitary",
        if constructive_dev <= UNITARITY_TOLERANCE {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        },
        format!("deviation {constructive_dev:.3e}"),
    ));

    let printed_f = if k == 2 {
        published::BIPARTITE_F
    } else {
        published::TRIPARTITE_F
    };
    let literal_junk: Vec<usize> = printed_f
        .iter()
        .flat_map(|&(r, c, _)| [r - 1, c - 1])
        .filter(|i| !trace.targets.contains(i))
        .collect();
    let f_bad = filter_mismatches(&literal, &trace.constructive_filter, &literal_junk, &trace.targets);
    checks.push(check(
        "published F vs constructive F",
        if f_bad.is_empty() && literal_filter_deviation <= UNITARITY_TOLERANCE {
            CheckStatus::Pass
        } else {
            CheckStatus::Discrepancy
        },
        format!(
            "{} diagonal entries differ; published F unitarity deviation {literal_filter_deviation:.3e}",
            f_bad.len()
        ),
    ));
    if !f_bad.is_empty() {
        let printed: Vec<String> = f_bad
            .iter()
            .map(|&(i, l, _)| format!("F_{{{},{}}} = {}", i + 1, i + 1, ratio_text(l, m)))
            .collect();
        let derived: Vec<String> = f_bad
            .iter()
            .map(|&(i, _, c)| format!("F_{{{},{}}} = {}", i + 1, i + 1, ratio_text(c, m)))
            .collect();
        entries.push(LedgerEntry {
            location: format!("{}-qubit filter element list", k),
            printed: format!(
                "{} (unitarity deviation {literal_filter_deviation:.3e} at these departures)",
                printed.join(", ")
            ),
            derived: format!(
                "{} (constructive filter, unitarity deviation {constructive_dev:.3e})",
                derived.join(", ")
            ),
            severity: Severity::Inconsistency,
        });
    }

    Ok(Audit {
        k,
        departures: departures.to_vec(),
        checks,
        entries,
        literal_filter_deviation,
        trace,
        literal_filter: literal,
    })
}

/// Departures at which the default audit is run: every channel at `-pi/12`.
pub const AUDIT_DEPARTURE: f64 = -core::f64::consts::PI / 12.0;

/// Entries for both published sizes at the default departures.
pub fn discrepancies() -> Result<Vec<LedgerEntry>> {
    let mut out = audit(&[AUDIT_DEPARTURE; 2])?.entries;
    out.extend(audit(&[AUDIT_DEPARTURE; 3])?.entries);
    Ok(out)
}
