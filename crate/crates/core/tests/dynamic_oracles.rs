use std::sync::Arc;

use ndarray::Array2;
use proptest::prelude::*;
use scalebench::classifiers::{Classifier, Perceptron, TrainedModel};
use scalebench::ensembles::{
    knora_e_selection, knora_u_votes, lca_competences, ola_competences, predict_knora_e, predict_knora_u,
    region_of_competence, DynamicMethod, DynamicSelector, Pool, RegionOfCompetence,
};

#[derive(Debug, Clone)]
struct Instance {
    weights: Vec<(Vec<f64>, f64)>,
    dsel: Vec<Vec<f64>>,
    labels: Vec<usize>,
    k_roc: usize,
    query: Vec<f64>,
}

/// Pools of up to 10 linear units over a small integer grid, so distance
/// ties between DSEL rows are common.
fn instance() -> impl Strategy<Value = Instance> {
    (1usize..=10, 1usize..=7, 0usize..10, 1usize..=3).prop_flat_map(|(m, k, extra, p)| {
        let unit = (prop::collection::vec(-2.0f64..2.0, p), -1.0f64..1.0);
        let point = prop::collection::vec((0i8..4).prop_map(f64::from), p);
        (
            prop::collection::vec(unit, m),
            prop::collection::vec(point.clone(), k + extra),
            prop::collection::vec(0usize..2, k + extra),
            Just(k),
            prop::collection::vec(-0.5f64..4.5, p),
        )
            .prop_map(|(weights, dsel, labels, k_roc, query)| Instance {
                weights,
                dsel,
                labels,
                k_roc,
                query,
            })
    })
}

fn build(inst: &Instance) -> Pool {
    let models = inst
        .weights
        .iter()
        .map(|(w, b)| {
            let mut u = Perceptron::zeros(w.len());
            u.weights = w.clone();
            u.bias = *b;
            TrainedModel::Perceptron(u)
        })
        .collect();
    let p = inst.query.len();
    let x = Array2::from_shape_vec((inst.dsel.len(), p), inst.dsel.concat()).unwrap();
    Pool::new(models, x, inst.labels.clone(), inst.k_roc).unwrap()
}

fn predict(w: &(Vec<f64>, f64), x: &[f64]) -> usize {
    let s: f64 = w.0.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + w.1;
    usize::from(s >= 0.0)
}

/// Neighbour rows nearest first, ties to the lower row.
fn brute_neighbours(inst: &Instance) -> Vec<usize> {
    let d = |r: &Vec<f64>| r.iter().zip(&inst.query).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
    let mut idx: Vec<usize> = (0..inst.dsel.len()).collect();
    idx.sort_by(|&a, &b| d(&inst.dsel[a]).partial_cmp(&d(&inst.dsel[b])).unwrap().then(a.cmp(&b)));
    idx.truncate(inst.k_roc);
    idx
}

/// `correct[i][j]`: model `i` right on the `j`-th nearest neighbour.
fn brute_correct(inst: &Instance) -> Vec<Vec<bool>> {
    let nb = brute_neighbours(inst);
    inst.weights
        .iter()
        .map(|w| nb.iter().map(|&r| predict(w, &inst.dsel[r]) == inst.labels[r]).collect())
        .collect()
}

/// Every subset of the pool is checked; the selection is the largest subset
/// of local oracles at the largest k that has one.
fn brute_knora_e(correct: &[Vec<bool>], k_roc: usize) -> Vec<usize> {
    let m = correct.len();
    for k in (1..=k_roc).rev() {
        let mut best: Vec<usize> = Vec::new();
        for mask in 1u32..(1 << m) {
            let set: Vec<usize> = (0..m).filter(|i| mask & (1 << i) != 0).collect();
            if set.iter().all(|&i| (0..k).all(|j| correct[i][j])) && set.len() > best.len() {
                best = set;
            }
        }
        if !best.is_empty() {
            return best;
        }
    }
    (0..m).collect()
}

fn vote(votes: [usize; 2]) -> usize {
    usize::from(votes[1] > votes[0])
}

fn brute_knora_u(correct: &[Vec<bool>], preds: &[usize]) -> [usize; 2] {
    let mut votes = [0, 0];
    for (i, row) in correct.iter().enumerate() {
        for &c in row {
            if c {
                votes[preds[i]] += 1;
            }
        }
    }
    if votes == [0, 0] {
        for &p in preds {
            votes[p] += 1;
        }
    }
    votes
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn knora_matches_exhaustive_search(inst in instance()) {
        let pool = build(&inst);
        let roc = region_of_competence(&pool, &inst.query);
        prop_assert_eq!(&roc.indices, &brute_neighbours(&inst));
        let correct = brute_correct(&inst);
        prop_assert_eq!(&roc.correct, &correct);

        let preds: Vec<usize> = inst.weights.iter().map(|w| predict(w, &inst.query)).collect();
        let selected = brute_knora_e(&correct, inst.k_roc);
        prop_assert_eq!(knora_e_selection(&roc), selected.clone());
        prop_assert_eq!(predict_knora_e(&pool, &inst.query), vote(selected.iter().fold([0, 0], |mut v, &i| { v[preds[i]] += 1; v })));

        let votes = brute_knora_u(&correct, &preds);
        prop_assert_eq!(knora_u_votes(&roc, &preds), votes);
        prop_assert_eq!(predict_knora_u(&pool, &inst.query), vote(votes));
    }

    #[test]
    fn ola_and_lca_pick_brute_force_argmax(inst in instance()) {
        let pool = build(&inst);
        let roc = region_of_competence(&pool, &inst.query);
        let correct = brute_correct(&inst);
        let k = inst.k_roc as f64;
        let ola: Vec<f64> = correct.iter().map(|r| r.iter().filter(|&&c| c).count() as f64 / k).collect();
        prop_assert_eq!(ola_competences(&roc), ola);

        let nb = brute_neighbours(&inst);
        let preds: Vec<usize> = inst.weights.iter().map(|w| predict(w, &inst.query)).collect();
        let lca: Vec<f64> = (0..preds.len())
            .map(|i| {
                let same: Vec<usize> = (0..nb.len()).filter(|&j| inst.labels[nb[j]] == preds[i]).collect();
                if same.is_empty() { 0.0 } else {
                    same.iter().filter(|&&j| correct[i][j]).count() as f64 / same.len() as f64
                }
            })
            .collect();
        prop_assert_eq!(lca_competences(&roc, &preds), lca);
    }

    #[test]
    fn single_model_pool_is_transparent(inst in instance()) {
        let mut one = inst.clone();
        one.weights.truncate(1);
        let pool = Arc::new(build(&one));
        let want = predict(&one.weights[0], &one.query);
        for method in DynamicMethod::ALL {
            let sel = DynamicSelector::new(Arc::clone(&pool), method);
            prop_assert_eq!(sel.predict_one(&one.query), want, "{:?}", method);
        }
    }

    #[test]
    fn equal_weights_reduce_knora_u_to_majority(
        m in 1usize..10,
        k in 1usize..8,
        preds in prop::collection::vec(0usize..2, 10),
        active in prop::collection::vec(any::<bool>(), 10),
    ) {
        // every active model right on the whole region, the rest never
        let correct: Vec<Vec<bool>> = (0..m).map(|i| vec![active[i]; k]).collect();
        let roc = RegionOfCompetence::from_correctness(vec![0; k], correct);
        let voters: Vec<usize> = (0..m).filter(|&i| active[i]).collect();
        let mut count = [0usize; 2];
        if voters.is_empty() {
            (0..m).for_each(|i| count[preds[i]] += 1);
        } else {
            voters.iter().for_each(|&i| count[preds[i]] += 1);
        }
        prop_assert_eq!(vote(knora_u_votes(&roc, &preds[..m])), vote(count));
    }
}
