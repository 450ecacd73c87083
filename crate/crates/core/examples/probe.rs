// Temporary scratch probe; not part of the deliverable.
use wbis_core::credit::*;
use wbis_core::rng::{stream_rng, streams};

fn rmse(ests: &[f64], reference: f64) -> f64 {
    (ests.iter().map(|e| (e - reference) * (e - reference)).sum::<f64>() / ests.len() as f64)
        .sqrt()
}

fn main() {
    let n = 10_000usize;
    let reps = 200u64;
    for portfolio_seed in 0..10u64 {
        let portfolio = build_portfolio(portfolio_seed);
        let mut rng = stream_rng(portfolio_seed, streams::CE_FIT);
        let proposal =
            cross_entropy_fit(&portfolio, &CrossEntropyConfig::default(), &mut rng).unwrap();

        // quick reference: 20 IS runs of n = 5e4
        let mut ref_ests = vec![];
        for j in 0..20u64 {
            let mut rng = stream_rng(portfolio_seed, streams::REFERENCE_BASE + j);
            let out = estimate_default_prob(&portfolio, &proposal, CreditMethod::Is, 50_000, &mut rng)
                .unwrap();
            ref_ests.push(out.estimate);
        }
        let reference = ref_ests.iter().sum::<f64>() / ref_ests.len() as f64;

        let mut is_e = vec![];
        let mut wb_e = vec![];
        let mut dis_e = vec![];
        let mut mc_zero = 0usize;
        let mut r_min = f64::MAX;
        let mut r_max = 0.0f64;
        for k in 0..reps {
            let mut rng = stream_rng(1000 + portfolio_seed, k);
            is_e.push(
                estimate_default_prob(&portfolio, &proposal, CreditMethod::Is, n, &mut rng)
                    .unwrap()
                    .estimate,
            );
            let mut rng = stream_rng(2000 + portfolio_seed, k);
            let (out, thr) = estimate_default_prob_detailed(
                &portfolio,
                &proposal,
                CreditMethod::Wbis { significance: 0.01, c_constant: 0.1 },
                n,
                &mut rng,
            )
            .unwrap();
            let r = thr.unwrap().r;
            r_min = r_min.min(r);
            r_max = r_max.max(r);
            wb_e.push(out.estimate);
            let mut rng = stream_rng(3000 + portfolio_seed, k);
            dis_e.push(
                estimate_default_prob(
                    &portfolio,
                    &proposal,
                    CreditMethod::Dis { alpha: 0.1 },
                    n,
                    &mut rng,
                )
                .unwrap()
                .estimate,
            );
            let mut rng = stream_rng(4000 + portfolio_seed, k);
            if estimate_default_prob(&portfolio, &proposal, CreditMethod::Mc, n, &mut rng)
                .unwrap()
                .estimate
                == 0.0
            {
                mc_zero += 1;
            }
        }
        let r_is = rmse(&is_e, reference);
        let r_wb = rmse(&wb_e, reference);
        let r_dis = rmse(&dis_e, reference);
        println!(
            "seed {portfolio_seed}: P={reference:.3e}  IS {r_is:.2e}  WBIS1% {r_wb:.2e}  DIS.1 {r_dis:.2e}  | wb/is {:.2} dis/wb {:.2} mc0 {}/{}  r in [{r_min:.0},{r_max:.0}]",
            r_wb / r_is,
            r_dis / r_wb,
            mc_zero,
            reps
        );
    }
}
