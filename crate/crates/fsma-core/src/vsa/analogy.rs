//! "What is the dollar of Mexico?" — the standard analogical-reasoning
//! exercise, run under three assignments of vector kinds to roles and
//! fillers. Exercises superposition, LCC binding/unbinding, Hadamard
//! unbinding, and the residual-similarity structure of unbalanced sparse
//! codes.

use rand::Rng;

use super::{
    hadamard_bind, BmapVector, DenseVector, PsbcVector, SbcVector, VsaError,
};
use crate::rng::substream;

/// Which vector kinds represent roles (capital, currency) and fillers
/// (the cities and currencies).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnalogyCase {
    /// Everything an independent pSBC vector; query `usa ⊛⁻¹ cur`,
    /// expected winner `dol`.
    AllPsbc,
    /// Roles SBC, fillers bMAP; query `usa ⊛⁻¹ cur` against
    /// identity-bound fillers, expected winner `dol` with a residual
    /// `≈ 1/L` on the other filler of the record.
    RolesSbcFillersBmap,
    /// Roles bMAP, fillers SBC; full query
    /// `(mex ⊛⁻¹ usa) ⊛ dol`, expected winner `pes` with overlap
    /// `≈ 1 + 1/L`.
    RolesBmapFillersSbc,
}

/// Ranking outcome of one case over many independent codebook draws.
#[derive(Debug, Clone)]
pub struct CaseReport {
    pub case: AnalogyCase,
    pub trials: usize,
    /// Trials in which the expected atom ranked first.
    pub wins: usize,
    /// Mean overlap (dot/M) of the expected winner.
    pub winner_overlap_mean: f64,
    /// Mean overlap of the tracked distractor (`wdc` for case 2, the
    /// runner-up otherwise).
    pub distractor_overlap_mean: f64,
}

const FILLER_NAMES: [&str; 4] = ["wdc", "dol", "mxc", "pes"];

/// Run `trials` independent draws of one case at shape `(n, l)`.
pub fn run_analogy_case(
    case: AnalogyCase,
    n: usize,
    l: usize,
    trials: usize,
    seed: u64,
) -> Result<CaseReport, VsaError> {
    let mut wins = 0usize;
    let mut winner_sum = 0.0;
    let mut distractor_sum = 0.0;
    for trial in 0..trials {
        let mut rng = substream(seed, &format!("analogy/{case:?}/{trial}"));
        let outcome = match case {
            AnalogyCase::AllPsbc => trial_all_psbc(n, l, &mut rng)?,
            AnalogyCase::RolesSbcFillersBmap => trial_roles_sbc(n, l, &mut rng)?,
            AnalogyCase::RolesBmapFillersSbc => trial_roles_bmap(n, l, &mut rng)?,
        };
        if outcome.winner_is_expected {
            wins += 1;
        }
        winner_sum += outcome.expected_overlap;
        distractor_sum += outcome.distractor_overlap;
    }
    Ok(CaseReport {
        case,
        trials,
        wins,
        winner_overlap_mean: winner_sum / trials as f64,
        distractor_overlap_mean: distractor_sum / trials as f64,
    })
}

struct TrialOutcome {
    winner_is_expected: bool,
    expected_overlap: f64,
    distractor_overlap: f64,
}

fn ranks_first(scores: &[(String, f64)], expected: &str) -> bool {
    let best = scores
        .iter()
        .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
        .unwrap();
    best.0 == expected
}

/// Case 1: records are sums of LCC-bound pSBC pairs; unbinding the
/// currency role from the USA record leaves the dollar.
fn trial_all_psbc(n: usize, l: usize, rng: &mut impl Rng) -> Result<TrialOutcome, VsaError> {
    let cap = PsbcVector::random(n, l, rng)?;
    let cur = PsbcVector::random(n, l, rng)?;
    let fillers: Vec<PsbcVector> = (0..4)
        .map(|_| PsbcVector::random(n, l, rng))
        .collect::<Result<_, _>>()?;
    let usa = DenseVector::from(&super::lcc_bind(&cap, &fillers[0])?)
        .add(&DenseVector::from(&super::lcc_bind(&cur, &fillers[1])?))?;
    let query = usa.lcc_unbind(&DenseVector::from(&cur))?;
    let scores: Vec<(String, f64)> = FILLER_NAMES
        .iter()
        .zip(&fillers)
        .map(|(name, v)| {
            Ok((
                name.to_string(),
                query.overlap(&DenseVector::from(v))?,
            ))
        })
        .collect::<Result<_, VsaError>>()?;
    let expected = scores.iter().find(|(n, _)| n == "dol").unwrap().1;
    let runner_up = scores
        .iter()
        .filter(|(n, _)| n != "dol")
        .map(|(_, s)| *s)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(TrialOutcome {
        winner_is_expected: ranks_first(&scores, "dol"),
        expected_overlap: expected,
        distractor_overlap: runner_up,
    })
}

/// Case 2: roles SBC, fillers bMAP. Unbinding the currency role via
/// inverse LCC leaves the dollar bound to the LCC identity, so fillers
/// are compared after binding to the identity vector. The unbalanced SBC
/// codes leave a residual `≈ 1/L` on the record's other filler.
fn trial_roles_sbc(n: usize, l: usize, rng: &mut impl Rng) -> Result<TrialOutcome, VsaError> {
    let cap = SbcVector::random(n, l, rng)?;
    let cur = SbcVector::random(n, l, rng)?;
    let fillers: Vec<BmapVector> = (0..4)
        .map(|_| BmapVector::random(n, l, rng))
        .collect::<Result<_, _>>()?;
    let usa = DenseVector::from(&hadamard_bind(&cap, &fillers[0])?)
        .add(&DenseVector::from(&hadamard_bind(&cur, &fillers[1])?))?;
    let query = usa.lcc_unbind(&DenseVector::from(&cur))?;
    let identity = SbcVector::lcc_identity(n, l)?;
    let scores: Vec<(String, f64)> = FILLER_NAMES
        .iter()
        .zip(&fillers)
        .map(|(name, v)| {
            let reference = DenseVector::from(&hadamard_bind(&identity, v)?);
            Ok((name.to_string(), query.overlap(&reference)?))
        })
        .collect::<Result<_, VsaError>>()?;
    let expected = scores.iter().find(|(n, _)| n == "dol").unwrap().1;
    let wdc = scores.iter().find(|(n, _)| n == "wdc").unwrap().1;
    Ok(TrialOutcome {
        winner_is_expected: ranks_first(&scores, "dol"),
        expected_overlap: expected,
        distractor_overlap: wdc,
    })
}

/// Case 3: roles bMAP, fillers SBC. The full analogy
/// `(mex ⊛⁻¹ usa) ⊛ dol` exposes the peso with overlap `≈ 1 + 1/L`.
fn trial_roles_bmap(n: usize, l: usize, rng: &mut impl Rng) -> Result<TrialOutcome, VsaError> {
    let cap = BmapVector::random(n, l, rng)?;
    let cur = BmapVector::random(n, l, rng)?;
    let fillers: Vec<SbcVector> = (0..4)
        .map(|_| SbcVector::random(n, l, rng))
        .collect::<Result<_, _>>()?;
    let record = |city: &SbcVector, money: &SbcVector| -> Result<DenseVector, VsaError> {
        DenseVector::from(&hadamard_bind(city, &cap)?)
            .add(&DenseVector::from(&hadamard_bind(money, &cur)?))
    };
    let usa = record(&fillers[0], &fillers[1])?;
    let mex = record(&fillers[2], &fillers[3])?;
    let query = mex
        .lcc_unbind(&usa)?
        .lcc_bind(&DenseVector::from(&fillers[1]))?;
    let scores: Vec<(String, f64)> = FILLER_NAMES
        .iter()
        .zip(&fillers)
        .map(|(name, v)| Ok((name.to_string(), query.overlap(&DenseVector::from(v))?)))
        .collect::<Result<_, VsaError>>()?;
    let expected = scores.iter().find(|(n, _)| n == "pes").unwrap().1;
    let runner_up = scores
        .iter()
        .filter(|(n, _)| n != "pes")
        .map(|(_, s)| *s)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(TrialOutcome {
        winner_is_expected: ranks_first(&scores, "pes"),
        expected_overlap: expected,
        distractor_overlap: runner_up,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_cases_rank_correctly_at_small_scale() {
        for case in [
            AnalogyCase::AllPsbc,
            AnalogyCase::RolesSbcFillersBmap,
            AnalogyCase::RolesBmapFillersSbc,
        ] {
            let report = run_analogy_case(case, 1024, 4, 20, 11).unwrap();
            assert!(
                report.wins >= 19,
                "{case:?}: {} / {} wins",
                report.wins,
                report.trials
            );
        }
    }
}
