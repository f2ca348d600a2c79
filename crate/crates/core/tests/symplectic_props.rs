use std::collections::BTreeMap;

use fracsym::expr::{parse_expr, Binding, Expr};
use fracsym::frac::{fractional_poisson_bracket, gamma, FracOrder, PhaseSpace};
use fracsym::symplectic::{
    assemble_form, coarse_dirac_bracket, coarse_hamilton_jacobi, fj_iterate, form_times_inverse, invert_form,
    primary_constraints, Alpha, Model, Terminal,
};
use proptest::prelude::*;

const VARS: [&str; 4] = ["x1", "x2", "x3", "x4"];

fn coefficient() -> impl Strategy<Value = String> {
    let term = (-3i32..=3, 0usize..4, 0u32..3).prop_map(|(c, v, k)| format!("({c})*{}^{k}", VARS[v]));
    prop::collection::vec(term, 1..4).prop_map(|t| t.join(" + "))
}

fn model(vars: &[&str], kinetic: &[String], potential: &str) -> Model {
    Model::new(
        vars.iter().map(|s| s.to_string()).collect(),
        kinetic.iter().map(|t| parse_expr(t, vars).unwrap()).collect(),
        parse_expr(potential, vars).unwrap(),
        BTreeMap::new(),
    )
    .unwrap()
}

fn random_model() -> impl Strategy<Value = Model> {
    prop::collection::vec(coefficient(), 4).prop_map(|k| model(&VARS, &k, "x1*x2"))
}

fn canonical_2d(potential: &str) -> Model {
    model(&["q", "p"], &["p".into(), "0".into()], potential)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn form_is_antisymmetric_with_even_rank(m in random_model()) {
        let f = assemble_form(&m).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                prop_assert_eq!(f.entry(i, j), &(-f.entry(j, i).clone()).simplify());
            }
        }
        prop_assert_eq!(f.rank() % 2, 0);
        prop_assert_eq!(f.rank() + f.null_basis().len(), f.dim());
    }

    #[test]
    fn inverse_of_regular_form(m in random_model()) {
        let f = assemble_form(&m).unwrap();
        prop_assume!(f.is_regular());
        let inv = invert_form(&f).unwrap();
        let id = form_times_inverse(&f, &inv);
        for (i, row) in id.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                prop_assert_eq!(e, &Expr::int((i == j) as i64));
            }
        }
    }

    #[test]
    fn scaling_the_lagrangian_scales_brackets(k in 1i64..=9, sign in prop::bool::ANY) {
        let k = if sign { k } else { -k };
        let m = model(&VARS, &["x2".into(), "x1^2".into(), "x4*x1".into(), "0".into()], "x3");
        let base = fj_iterate(&m).unwrap().table.unwrap();
        let scaled = fj_iterate(&m.scaled(&Expr::int(k))).unwrap().table.unwrap();
        for (r0, r1) in base.brackets().iter().zip(scaled.brackets()) {
            for (b0, b1) in r0.iter().zip(r1) {
                prop_assert_eq!(&(Expr::int(k) * b1.clone()).simplify(), b0);
            }
        }
    }

    #[test]
    fn table_is_antisymmetric_and_continuous_in_alpha(e in 0.2f64..3.0, b in 0.2f64..3.0) {
        let vars = ["r1", "r2"];
        let m = Model::new(
            vars.iter().map(|s| s.to_string()).collect(),
            vec![
                parse_expr("1/2*e*B*Gamma(1 + alpha)*r2", &vars).unwrap(),
                parse_expr("-1/2*e*B*Gamma(1 + alpha)*r1", &vars).unwrap(),
            ],
            Expr::zero(),
            [("e".to_string(), None), ("B".to_string(), None)].into_iter().collect(),
        )
        .unwrap()
        .with_alpha(Alpha::Symbolic);
        let t = fj_iterate(&m).unwrap().table.unwrap();
        let at = |a: f64| t.evaluate(&Binding::new().with("e", e).with("B", b).with("alpha", a)).unwrap();
        let one = at(1.0);
        let near = at(1.0 - 1e-9);
        prop_assert_eq!(one[0][0], 0.0);
        prop_assert_eq!(one[0][1], -one[1][0]);
        prop_assert!((one[0][1] - 1.0 / (e * b)).abs() < 1e-12 / (e * b));
        prop_assert!((near[0][1] - one[0][1]).abs() < 1e-8 * one[0][1].abs());
    }

    #[test]
    fn classical_order_reproduces_classical_mechanics(q in 0.1f64..3.0, p in 0.1f64..3.0) {
        let one = FracOrder::CLASSICAL;
        let m = canonical_2d("1/2*p^2 + q^3*p").with_alpha(Alpha::Numeric(one));
        let pt = Binding::new().with("q", q).with("p", p);
        let space = PhaseSpace::new([("q", "p")]);
        let u = parse_expr("q^2*p", &["q", "p"]).unwrap();
        let v = parse_expr("p^3 + q", &["q", "p"]).unwrap();
        let classical = 2.0 * q * p * 3.0 * p * p - q * q;
        let pb = fractional_poisson_bracket(&u, &v, &space, one, &pt).unwrap();
        prop_assert!((pb - classical).abs() < 1e-9 * (1.0 + classical.abs()));

        let rhs = coarse_hamilton_jacobi(&m, &[], &[]).unwrap();
        prop_assert!((rhs[0].1.evaluate(&pt).unwrap() - (p + q.powi(3))).abs() < 1e-9);
        prop_assert!((rhs[1].1.evaluate(&pt).unwrap() + 3.0 * q * q * p).abs() < 1e-9);

        let d = coarse_dirac_bracket(&u, &v, &m, &[], &pt).unwrap();
        prop_assert!((d - classical).abs() < 1e-9 * (1.0 + classical.abs()));
    }
}

#[test]
fn chain_levels_extend_kinetic_sector_by_constraint_gradients() {
    let vars = ["q", "p", "z"];
    let m = model(&vars, &["p".into(), "0".into(), "0".into()], "1/2*(q^2 + p^2) + z*q");
    let out = fj_iterate(&m).unwrap();
    assert_eq!(out.chain.terminal, Terminal::Regular);
    assert!(out.chain.levels.len() <= 2 * m.dim());
    let mut prev = m.clone();
    for level in &out.chain.levels {
        let next = &level.model;
        for (i, v) in prev.variables().iter().enumerate() {
            let mut want = prev.kinetic()[i].clone();
            for (omega, lam) in level.constraints.iter().zip(&level.multipliers) {
                want = want + Expr::var(lam) * omega.diff(v).unwrap();
            }
            assert_eq!(next.kinetic()[i], want.simplify(), "variable {v}");
        }
        prev = next.clone();
    }
}

#[test]
fn hall_primary_constraints_reproduce_coarse_bracket() {
    for alpha in [0.3, 0.5, 0.9] {
        let vars = ["r1", "r2"];
        let k = 1.7 * gamma(1.0 + alpha).unwrap();
        let m = model(&vars, &[format!("1/2*{k:e}*r2"), format!("-1/2*{k:e}*r1")], "0")
            .with_alpha(Alpha::Numeric(FracOrder::new(alpha).unwrap()));
        let (_, primaries) = primary_constraints(&m);
        let x = gamma(2.0 - alpha).unwrap().powf(1.0 / (1.0 - alpha));
        let mut pt = Binding::new();
        for v in ["r1", "r2", "pi_r1", "pi_r2"] {
            pt.set(v, x);
        }
        let d = coarse_dirac_bracket(&Expr::var("r1"), &Expr::var("r2"), &m, &primaries, &pt).unwrap();
        let want = gamma(1.0 + alpha).unwrap().powi(-2) / k;
        assert!((d - want).abs() < 1e-10 * want, "alpha={alpha}: {d} vs {want}");
    }
}
