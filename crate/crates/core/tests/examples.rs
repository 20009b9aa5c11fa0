use gcale_core::{
    AsMatrix, ComplexMatrix, HermitianMatrix, ProblemInstance, SolverSettings, check_theorem, preset_cr1, preset_cr2,
    solve_coupled, solve_direct,
};

fn example1(q13: f64) -> ProblemInstance {
    ProblemInstance::new(
        ComplexMatrix::from_real_rows(&[&[-0.95, 0.001, 0.001], &[0.001, -0.95, 0.001], &[0.001, 0.001, -0.95]])
            .unwrap(),
        ComplexMatrix::from_real_rows(&[&[0.54, -0.002, -0.002], &[-0.002, 0.54, -0.002], &[-0.002, -0.002, 0.54]])
            .unwrap(),
        HermitianMatrix::from_real_rows(&[&[2.0, 0.02, q13], &[0.02, 2.0, 0.02], &[q13, 0.02, 2.0]]).unwrap(),
    )
    .unwrap()
}

fn rows(m: &[Vec<f64>]) -> Vec<&[f64]> {
    m.iter().map(Vec::as_slice).collect()
}

fn example2() -> ProblemInstance {
    let n = 5usize;
    let a: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| if i == j { -0.95 } else { 0.001 }).collect()).collect();
    let b: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| if i == j { 0.44 } else { -0.02 }).collect()).collect();
    let q: Vec<Vec<f64>> =
        (0..n).map(|i| (0..n).map(|j| if i == j { 0.4 } else { 0.01 * i.abs_diff(j) as f64 }).collect()).collect();
    ProblemInstance::new(
        ComplexMatrix::from_real_rows(&rows(&a)).unwrap(),
        ComplexMatrix::from_real_rows(&rows(&b)).unwrap(),
        HermitianMatrix::from_real_rows(&rows(&q)).unwrap(),
    )
    .unwrap()
}

#[test]
fn literal_printed_q13_does_not_reproduce_example_1() {
    // Q(1,3) = 0.05 as printed gives visibly different margins and solution;
    // 0.005 reproduces every printed number.
    let printed = example1(0.05);
    let r = check_theorem(&printed, &preset_cr1(&printed, 1e-10).unwrap()).unwrap();
    assert!((r.margin_a - 0.3345).abs() > 1e-3);
    let x = solve_direct(&printed).unwrap().x;
    assert!((x.as_matrix()[(0, 2)].re - 0.0142).abs() > 1e-2);

    let fixed = example1(0.005);
    let r = check_theorem(&fixed, &preset_cr1(&fixed, 1e-10).unwrap()).unwrap();
    assert!((r.margin_a - 0.3345).abs() < 1e-3);
    assert!((r.margin_b - 0.4532).abs() < 1e-3);
}

#[test]
fn example_2_reproduces() {
    let p = example2();
    let c = preset_cr2(&p, 1e-10).unwrap();
    let r = solve_coupled(&p, &c, &SolverSettings::fixed(82)).unwrap();
    assert!(r.conditions.all_satisfied);
    assert!(r.final_residual.e <= 1e-14);
    let x = r.x_hat.as_matrix();
    for (i, j, v) in [(0, 0, 0.4895), (0, 4, 0.0781), (1, 3, 0.0535), (2, 2, 0.4873)] {
        assert!((x[(i, j)].re - v).abs() < 1e-4, "({i},{j}) = {}", x[(i, j)].re);
    }
}
