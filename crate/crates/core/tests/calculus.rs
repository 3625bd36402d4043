mod common;

use approx::assert_relative_eq;
use graph_yamabe::calculus::{
    grad_norm, gradient_form, laplacian, laplacian_field, laplacian_power, lmp_apply, m_grad_norm, p_laplacian,
    p_laplacian_field,
};
use graph_yamabe::graph::integrate;
use graph_yamabe::prelude::*;
use proptest::prelude::*;

use common::*;

fn graph_and_fields(seed: u64) -> (WeightedGraph, VertexField, VertexField) {
    let mut rng = rng(seed);
    let g = random_graph(&mut rng, 15);
    let u = random_field(&mut rng, g.len(), 2.0);
    let v = random_field(&mut rng, g.len(), 2.0);
    (g, u, v)
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(64) })]

    #[test]
    fn greens_identity(seed in any::<u64>()) {
        let (g, u, v) = graph_and_fields(seed);
        let all: Vec<usize> = (0..g.len()).collect();
        let gamma = VertexField::new((0..g.len()).map(|x| gradient_form(&g, &u, &v, x).unwrap()).collect());
        let lap = laplacian_field(&g, &u);
        let v_lap = VertexField::new((0..g.len()).map(|x| v[x] * lap[x]).collect());
        let lhs = integrate(&g, &all, &gamma).unwrap();
        let rhs = -integrate(&g, &all, &v_lap).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-11 * (1.0 + lhs.abs()));
    }

    #[test]
    fn gradient_form_is_symmetric_and_bilinear(seed in any::<u64>(), a in -3.0f64..3.0) {
        let (g, u, v) = graph_and_fields(seed);
        for x in 0..g.len() {
            let uv = gradient_form(&g, &u, &v, x).unwrap();
            prop_assert!((uv - gradient_form(&g, &v, &u, x).unwrap()).abs() <= 1e-12);
            let scaled = gradient_form(&g, &u.scaled(a).add(&v), &v, x).unwrap();
            let expected = a * uv + gradient_form(&g, &v, &v, x).unwrap();
            prop_assert!((scaled - expected).abs() <= 1e-10 * (1.0 + expected.abs()));
        }
    }

    #[test]
    fn truncation_does_not_increase_gradients(seed in any::<u64>()) {
        let (g, u, _) = graph_and_fields(seed);
        let (up, un) = (u.positive_part(), u.negative_part());
        for x in 0..g.len() {
            let full = grad_norm(&g, &u, x).unwrap();
            prop_assert!(grad_norm(&g, &up, x).unwrap() <= full + 1e-12);
            prop_assert!(grad_norm(&g, &un, x).unwrap() <= full + 1e-12);
            let gn = grad_norm(&g, &un, x).unwrap();
            prop_assert!(gradient_form(&g, &un, &u, x).unwrap() >= gn * gn - 1e-12);
        }
    }

    #[test]
    fn p_laplacian_at_two_is_the_laplacian(seed in any::<u64>()) {
        let (g, u, _) = graph_and_fields(seed);
        for x in 0..g.len() {
            let a = p_laplacian(&g, &u, 2.0, x).unwrap();
            let b = laplacian(&g, &u, x).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn p_laplacian_is_homogeneous(seed in any::<u64>(), p in 1.5f64..5.0, c in 0.1f64..4.0) {
        let (g, u, _) = graph_and_fields(seed);
        let (base, _) = p_laplacian_field(&g, &u, p).unwrap();
        let (scaled, _) = p_laplacian_field(&g, &u.scaled(c), p).unwrap();
        let factor = c.powf(p - 1.0);
        for x in 0..g.len() {
            prop_assert!((scaled[x] - factor * base[x]).abs() <= 1e-10 * (1.0 + scaled[x].abs()));
        }
    }

    #[test]
    fn weak_operator_agrees_with_the_p_laplacian(seed in any::<u64>(), p in 1.5f64..4.0) {
        let mut rng = rng(seed);
        let g = random_graph(&mut rng, 20);
        if let Some(dom) = random_domain(&mut rng, &g) {
            let u = random_interior_field(&mut rng, &g, &dom);
            let weak = lmp_apply(&g, &dom, &u, OperatorOrder::new(1, p).unwrap()).unwrap();
            for &x in dom.interior() {
                let strong = -p_laplacian(&g, &u, p, x).unwrap();
                prop_assert!((weak[x] - strong).abs() <= 1e-8);
            }
        }
    }
}

#[test]
fn weak_operator_at_two_is_a_power_of_the_laplacian() {
    // on path(9) with Ω = v1..v7, the order-2 space lives on v3..v5 and its
    // Laplacian stays inside Ω, so the weak operator is Δ² there
    let g = generate(&Family::Path(9), MeasureRule::Unit, &WeightRule::Unit).unwrap();
    let omega: Vec<usize> = (1..8).collect();
    let dom = DomainDecomposition::new(&g, &omega).unwrap();
    let mut u = VertexField::zeros(9);
    u[3] = 0.4;
    u[4] = -1.1;
    u[5] = 0.7;
    let weak = lmp_apply(&g, &dom, &u, OperatorOrder::new(2, 2.0).unwrap()).unwrap();
    let strong = laplacian_power(&g, &u, 2);
    for x in 3..6 {
        assert_relative_eq!(weak[x], strong[x], epsilon = 1e-12);
    }
}

#[test]
fn higher_gradients_alternate_between_gradient_and_laplacian() {
    let (g, u, _) = graph_and_fields(42);
    let lap = laplacian_field(&g, &u);
    for x in 0..g.len() {
        assert_relative_eq!(m_grad_norm(&g, &u, 1, x).unwrap(), grad_norm(&g, &u, x).unwrap(), epsilon = 1e-14);
        assert_relative_eq!(m_grad_norm(&g, &u, 2, x).unwrap(), lap[x].abs(), epsilon = 1e-12);
        assert_relative_eq!(m_grad_norm(&g, &u, 3, x).unwrap(), grad_norm(&g, &lap, x).unwrap(), epsilon = 1e-12);
    }
}

#[test]
fn out_of_range_vertices_are_rejected() {
    let (g, u, _) = graph_and_fields(1);
    assert!(laplacian(&g, &u, g.len()).is_err());
    assert!(grad_norm(&g, &u, g.len() + 3).is_err());
}
