use super::channel::{rb_capacity, ChannelRealization};
use super::AllocationPlan;

/// How many RBs an SFV receives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AssignStrategy {
    /// `ceil(n_symbols / n_re)` RBs.
    #[default]
    SymbolCount,
    /// RBs accumulate until their summed capacity covers the SFV's
    /// information bits (one per symbol).
    CapacityAligned,
}

/// Hands out RBs in descending gain order (ties by index): side info first,
/// then SFVs in plan (descending score) order. SFVs that run out of RBs are
/// cut down to what they received and flagged as truncated.
pub fn assign_rbs(
    plan: &AllocationPlan,
    ch: &ChannelRealization,
    n_re: usize,
    strategy: AssignStrategy,
) -> AllocationPlan {
    let mut order: Vec<usize> = (0..ch.n_rb()).collect();
    order.sort_by(|&a, &b| ch.gains[b].total_cmp(&ch.gains[a]).then(a.cmp(&b)));
    let mut next = order.into_iter().peekable();

    let mut out = plan.clone();
    let side_needed = plan.side_info_symbols.div_ceil(n_re);
    out.side_info_rbs = next.by_ref().take(side_needed).collect();
    out.side_info_truncated = out.side_info_rbs.len() < side_needed;

    for entry in out.entries.iter_mut() {
        entry.rb_ids.clear();
        if entry.dropped || entry.n_symbols == 0 {
            continue;
        }
        match strategy {
            AssignStrategy::SymbolCount => {
                let needed = entry.n_symbols.div_ceil(n_re);
                entry.rb_ids.extend(next.by_ref().take(needed));
            }
            AssignStrategy::CapacityAligned => {
                let target = entry.n_symbols as f64;
                let mut acc = 0.0;
                while acc < target {
                    let Some(rb) = next.next() else { break };
                    acc += rb_capacity(ch.gains[rb], ch.noise_var, n_re);
                    entry.rb_ids.push(rb);
                }
            }
        }
        let room = entry.rb_ids.len() * n_re;
        if room < entry.n_symbols {
            entry.n_symbols = room;
            entry.truncated = true;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::{allocate_budgets, BudgetParams, Mode};
    use super::*;

    fn plan_with(needs: &[usize], side: usize) -> AllocationPlan {
        let sfvs: Vec<(u8, f64)> = needs
            .iter()
            .enumerate()
            .map(|(i, _)| (i as u8, (needs.len() - i) as f64))
            .collect();
        let total: usize = needs.iter().sum::<usize>() + side;
        let mut plan = allocate_budgets(
            &sfvs,
            total,
            side,
            Mode::Overall,
            BudgetParams {
                drop_quantile: 0.25,
                n_min: 1,
            },
        )
        .unwrap();
        for (e, &n) in plan.entries.iter_mut().zip(needs) {
            e.n_symbols = n;
        }
        plan
    }

    fn channel(gains: &[f64]) -> ChannelRealization {
        ChannelRealization {
            gains: gains.to_vec(),
            noise_var: 1.0,
        }
    }

    #[test]
    fn best_rbs_go_to_highest_scores() {
        let plan = plan_with(&[12, 12, 12], 0);
        let out = assign_rbs(&plan, &channel(&[0.5, 1.5, 1.0, 0.2]), 12, AssignStrategy::SymbolCount);
        let ids: Vec<Vec<usize>> = out.entries.iter().map(|e| e.rb_ids.clone()).collect();
        assert_eq!(ids, vec![vec![1], vec![2], vec![0]]);
        assert!(out.entries.iter().all(|e| !e.truncated));
    }

    #[test]
    fn exhaustion_truncates_lowest() {
        let plan = plan_with(&[36, 24], 0);
        let out = assign_rbs(&plan, &channel(&[1.0, 0.9, 0.8, 0.7]), 12, AssignStrategy::SymbolCount);
        assert_eq!(out.entries[0].rb_ids, vec![0, 1, 2]);
        assert!(!out.entries[0].truncated);
        assert_eq!(out.entries[1].rb_ids, vec![3]);
        assert!(out.entries[1].truncated);
        assert_eq!(out.entries[1].n_symbols, 12);
    }

    #[test]
    fn equal_gains_assign_by_index() {
        let plan = plan_with(&[20, 10], 5);
        let out = assign_rbs(&plan, &channel(&[1.0; 6]), 12, AssignStrategy::SymbolCount);
        assert_eq!(out.side_info_rbs, vec![0]);
        assert_eq!(out.entries[0].rb_ids, vec![1, 2]);
        assert_eq!(out.entries[1].rb_ids, vec![3]);
    }

    #[test]
    fn side_info_takes_the_best_rb() {
        let plan = plan_with(&[12], 3);
        let out = assign_rbs(&plan, &channel(&[0.1, 2.0, 1.0]), 12, AssignStrategy::SymbolCount);
        assert_eq!(out.side_info_rbs, vec![1]);
        assert_eq!(out.entries[0].rb_ids, vec![2]);
    }

    #[test]
    fn capacity_aligned_uses_fewer_strong_rbs() {
        // capacity of a gain-3 RB at unit noise: 12 * log2(10) ≈ 39.9 bits
        let plan = plan_with(&[36], 0);
        let out = assign_rbs(&plan, &channel(&[3.0, 3.0, 3.0]), 12, AssignStrategy::CapacityAligned);
        assert_eq!(out.entries[0].rb_ids, vec![0]);
        assert_eq!(out.entries[0].n_symbols, 12);
        assert!(out.entries[0].truncated);
    }
}
