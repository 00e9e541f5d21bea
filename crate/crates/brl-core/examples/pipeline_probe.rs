use std::time::Instant;

use brl_core::env::{evaluate_policy, make_gridworld};
use brl_core::label::{binary_label, reward_gap, LinkLoss};
use brl_core::learner::{fit, fit_oracle, LearnerConfig, LearnerKind};
use brl_core::model::{label_with_model, train, FeatureMap, Objective, RewardModel, TrainConfig, TrainData};
use brl_core::pref::{generate_dataset, BehaviorPreset, LinkFunction};

fn main() {
    for slip in [0.1, 0.2] {
        println!("== slip {slip}");
        let mdp = make_gridworld(5, 5, 1.0, -0.01, slip, 0).unwrap();
        let behavior = BehaviorPreset::Medium.build(&mdp).unwrap();
        let mut scores: [Vec<f64>; 3] = [vec![], vec![], vec![]];
        let t0 = Instant::now();
        for seed in 0..5u64 {
            let ds = generate_dataset(&mdp, &behavior, 500, 20, LinkFunction::Sigmoid, seed).unwrap();
            let labeled = binary_label(&ds).unwrap();
            let config = LearnerConfig::new(LearnerKind::PessimisticFqi, 25, 4);

            // oracle
            let p = fit_oracle(&mdp, &labeled, &config).unwrap();
            scores[0].push(evaluate_policy(&mdp, &p).unwrap().normalized_score);
            // brl
            let p = fit(&labeled, &config).unwrap();
            scores[1].push(evaluate_policy(&mdp, &p).unwrap().normalized_score);
            // rm
            let fm = FeatureMap::Tabular { states: 25, actions: 4 };
            let tc = TrainConfig { learning_rate: 0.1, epochs: 200, objective: Objective::PreferenceF, link_loss: LinkLoss::SigmoidNll, seed };
            let (model, _) = train(&RewardModel::zeros(fm), &TrainData::Preference(&ds), &tc).unwrap();
            let rm_labeled = label_with_model(&model, &ds).unwrap();
            let p = fit(&rm_labeled, &config).unwrap();
            scores[2].push(evaluate_policy(&mdp, &p).unwrap().normalized_score);

            let g_brl = reward_gap(&labeled).unwrap().gap;
            let g_rm = reward_gap(&rm_labeled).unwrap().gap;
            println!("  seed {seed}: oracle {:6.2}  brl {:6.2}  rm {:6.2}   gap brl {:.3} rm {:.3}",
                scores[0].last().unwrap(), scores[1].last().unwrap(), scores[2].last().unwrap(), g_brl, g_rm);
        }
        let mean = |v: &Vec<f64>| v.iter().sum::<f64>() / v.len() as f64;
        println!("  means: oracle {:.2}  brl {:.2}  rm {:.2}  ({:.1?})", mean(&scores[0]), mean(&scores[1]), mean(&scores[2]), t0.elapsed());
    }
}
