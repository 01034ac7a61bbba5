use divcurve::analysis::stratified_group_folds;
use divcurve::diversity::{derive_task_seed, stream};
use divcurve::{knn_cv_accuracy, silhouette_score, spearman, DistanceMatrix, Error};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

fn line_table(xs: &[f64]) -> DistanceMatrix {
    DistanceMatrix::from_rows(xs.iter().map(|a| xs.iter().map(|b| (a - b).abs()).collect()).collect()).unwrap()
}

#[test]
fn knn_on_shuffled_labels_is_near_chance() {
    let n = 90;
    let d = line_table(&(0..n).map(|i| i as f64).collect::<Vec<_>>());
    let mut accs = Vec::new();
    for seed in 0..20u64 {
        let mut rng = stream(derive_task_seed(seed, 1, 2));
        let mut labels: Vec<i64> = (0..n).map(|i| (i % 3) as i64).collect();
        labels.shuffle(&mut rng);
        let (mean, _) = knn_cv_accuracy(&d, &labels, 5, 5, None, &mut rng).unwrap();
        accs.push(mean);
    }
    let avg = accs.iter().sum::<f64>() / accs.len() as f64;
    assert!((avg - 1.0 / 3.0).abs() < 0.15, "mean accuracy {avg} on shuffled labels");
}

#[test]
fn knn_on_separated_blocks_is_perfect() {
    let n = 40;
    let xs: Vec<f64> = (0..n)
        .map(|i| if i < 20 { i as f64 } else { 100.0 + i as f64 })
        .collect();
    let d = line_table(&xs);
    let labels: Vec<i64> = (0..n).map(|i| (i / 20) as i64).collect();
    let (mean, std) = knn_cv_accuracy(&d, &labels, 3, 4, None, &mut stream(7)).unwrap();
    assert_eq!((mean, std), (1.0, 0.0));
    assert!(silhouette_score(&d, &labels).unwrap() > 0.8);
}

#[test]
fn fold_errors() {
    let labels = [0, 0, 1, 1, 1];
    assert!(matches!(
        stratified_group_folds(&labels, None, 3, &mut stream(0)),
        Err(Error::Fold(_))
    ));
    assert!(matches!(
        stratified_group_folds(&labels, None, 1, &mut stream(0)),
        Err(Error::Fold(_))
    ));
    let groups = [0, 0, 0, 0, 0];
    assert!(matches!(
        stratified_group_folds(&labels, Some(&groups), 2, &mut stream(0)),
        Err(Error::Fold(_))
    ));
}

#[test]
fn spearman_reference_values() {
    assert_eq!(spearman(&[1.0, 2.0, 3.0, 4.0], &[10.0, 20.0, 30.0, 40.0]).unwrap(), 1.0);
    assert_eq!(spearman(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap(), -1.0);
    // ties take average ranks: x ranks (1, 2.5, 2.5, 4), y ranks (1, 2, 3, 4)
    let rho = spearman(&[1.0, 2.0, 2.0, 3.0], &[1.0, 2.0, 3.0, 4.0]).unwrap();
    assert!((rho - 0.948_683_298_050_513_8).abs() < 1e-12);
    assert!(matches!(
        spearman(&[1.0, 1.0], &[1.0, 2.0]),
        Err(Error::UndefinedCorrelation(_))
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn folds_keep_groups_together(seed in any::<u64>(), n in 12usize..60, folds in 2usize..5) {
        let mut rng = stream(seed);
        let labels: Vec<i64> = (0..n).map(|i| (i % 2) as i64).collect();
        let groups: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n / 2)).collect();
        match stratified_group_folds(&labels, Some(&groups), folds, &mut rng) {
            Ok(a) => {
                prop_assert!(a.iter().all(|&f| f < folds));
                for i in 0..n {
                    for j in 0..n {
                        if groups[i] == groups[j] {
                            prop_assert_eq!(a[i], a[j]);
                        }
                    }
                }
                for f in 0..folds {
                    prop_assert!(a.contains(&f));
                }
            }
            Err(e) => prop_assert!(matches!(e, Error::Fold(_))),
        }
    }

    #[test]
    fn ungrouped_folds_are_stratified(seed in any::<u64>(), per in 5usize..20, folds in 2usize..5) {
        let labels: Vec<i64> = (0..3 * per).map(|i| (i % 3) as i64).collect();
        let a = stratified_group_folds(&labels, None, folds, &mut stream(seed)).unwrap();
        for f in 0..folds {
            for c in 0..3 {
                let k = (0..labels.len()).filter(|&i| a[i] == f && labels[i] == c).count();
                prop_assert!(k == per / folds || k == per.div_ceil(folds), "class {c} fold {f}: {k}");
            }
        }
    }
}
