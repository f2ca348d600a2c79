use fracsym::expr::{parse_expr, Binding, Expr};
use fracsym::frac::{
    fractional_poisson_bracket, mrl_derivative_power, mrl_derivative_quadrature, FracOrder, PhaseSpace, PowerSum,
    SampledFunction,
};
use proptest::prelude::*;

fn power(text: &str) -> PowerSum {
    PowerSum::from_expr(&parse_expr(text, &["x"]).unwrap(), "x").unwrap()
}

fn symbolic_at(f: &PowerSum, alpha: f64, x: f64) -> f64 {
    mrl_derivative_power(f, FracOrder::new(alpha).unwrap())
        .evaluate(x, &Binding::new())
        .unwrap()
}

#[test]
fn power_rule_and_quadrature_agree() {
    let h = 1e-3;
    for beta in 0..=3 {
        let f = power(&format!("x^{beta}"));
        let grid = SampledFunction::from_fn(|x| x.powi(beta), h, 2.0).unwrap();
        for alpha in [0.25, 0.5, 0.75] {
            for x in [0.5, 1.0, 2.0] {
                let a = FracOrder::new(alpha).unwrap();
                let exact = symbolic_at(&f, alpha, x);
                let quad = mrl_derivative_quadrature(&grid, a, x).unwrap();
                assert!(
                    (exact - quad).abs() < 1e-3,
                    "beta={beta} alpha={alpha} x={x}: {exact} vs {quad}"
                );
            }
        }
    }
}

#[test]
fn constants_vanish() {
    for alpha in [0.25, 0.5, 0.75, 1.0] {
        assert_eq!(symbolic_at(&power("7/3"), alpha, 1.3), 0.0);
        let grid = SampledFunction::from_fn(|_| 2.5, 1e-3, 1.0).unwrap();
        let d = mrl_derivative_quadrature(&grid, FracOrder::new(alpha).unwrap(), 1.0).unwrap();
        assert!(d.abs() < 1e-10);
    }
}

#[test]
fn sequential_half_orders_differ_from_first_derivative() {
    let half = FracOrder::new(0.5).unwrap();
    let f = power("x^(1/2)");
    let twice = mrl_derivative_power(&mrl_derivative_power(&f, half), half);
    let once = mrl_derivative_power(&f, FracOrder::CLASSICAL);
    let at = |g: &PowerSum| g.evaluate(1.0, &Binding::new()).unwrap();
    assert_eq!(at(&twice), 0.0);
    assert!((at(&once) - 0.5).abs() < 1e-15);
}

proptest! {
    #[test]
    fn symbolic_derivative_is_linear(a in -3.0f64..3.0, b in -3.0f64..3.0, alpha in 0.05f64..1.0, x in 0.1f64..3.0) {
        let f = power("x^2 + 3*x^(1/2)");
        let g = power("x^3 - x");
        let combo = power(&format!("({a:e})*(x^2 + 3*x^(1/2)) + ({b:e})*(x^3 - x)"));
        let lhs = symbolic_at(&combo, alpha, x);
        let rhs = a * symbolic_at(&f, alpha, x) + b * symbolic_at(&g, alpha, x);
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + rhs.abs()));
    }

    #[test]
    fn quadrature_is_linear(a in -3.0f64..3.0, b in -3.0f64..3.0, alpha in 0.05f64..1.0) {
        let h = 1e-2;
        let f = |x: f64| x * x + 1.0;
        let g = |x: f64| x.powi(3) - 2.0 * x;
        let al = FracOrder::new(alpha).unwrap();
        let d = |s: &dyn Fn(f64) -> f64| {
            mrl_derivative_quadrature(&SampledFunction::from_fn(s, h, 1.5).unwrap(), al, 1.5).unwrap()
        };
        let lhs = d(&|x| a * f(x) + b * g(x));
        let rhs = a * d(&f) + b * d(&g);
        prop_assert!((lhs - rhs).abs() < 1e-10);
    }

    #[test]
    fn classical_limit(x in 0.3f64..3.0, beta_num in 1i64..=8) {
        let f = power(&format!("x^({beta_num}/2) + x"));
        let alpha = 1.0 - 1e-6;
        let beta = beta_num as f64 / 2.0;
        let exact = beta * x.powf(beta - 1.0) + 1.0;
        let d = symbolic_at(&f, alpha, x);
        prop_assert!((d - exact).abs() / exact.abs() < 1e-4);
    }

    #[test]
    fn bracket_is_antisymmetric_and_bilinear(
        alpha in 0.1f64..=1.0,
        q in 0.2f64..2.0,
        p in 0.2f64..2.0,
        a in -2.0f64..2.0,
        b in -2.0f64..2.0,
    ) {
        let vars = ["q", "p"];
        let space = PhaseSpace::new([("q", "p")]);
        let al = FracOrder::new(alpha).unwrap();
        let pt = Binding::new().with("q", q).with("p", p);
        let u = parse_expr("q^2*p + p^(1/2)", &vars).unwrap();
        let v = parse_expr("q*p^3 - q^(3/2)", &vars).unwrap();
        let w = parse_expr("p^2 + q", &vars).unwrap();
        let pb = |x: &Expr, y: &Expr| fractional_poisson_bracket(x, y, &space, al, &pt).unwrap();
        let uv = pb(&u, &v);
        prop_assert!((uv + pb(&v, &u)).abs() <= 1e-12 * (1.0 + uv.abs()));
        prop_assert_eq!(pb(&u, &u), 0.0);
        let combo = Expr::real(a) * v.clone() + Expr::real(b) * w.clone();
        let lhs = pb(&u, &combo);
        let rhs = a * uv + b * pb(&u, &w);
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + rhs.abs()));
    }
}
