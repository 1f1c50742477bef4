use bertini::gf::{field_new, Fe, FieldCtx};
use bertini::hirzebruch::{jet_to_section, random_section_indexed, restrict_to_fiber_jet, Bidegree, ClosedFiber, Surface};
use bertini::poly::{self, resultant, UniPoly};
use bertini::smoothcheck::{is_good_pair, singular_fibers};
use bertini::Field;
use proptest::prelude::*;

fn field(q: u64) -> FieldCtx {
    let (p, k) = bertini::gf::prime_power(q).unwrap();
    field_new(p as u64, k).unwrap()
}

fn poly_strategy(max_deg: usize) -> impl Strategy<Value = (u64, Vec<u32>)> {
    prop::sample::select(vec![2u64, 3, 4, 5]).prop_flat_map(move |q| (Just(q), prop::collection::vec(0..q as u32, 1..=max_deg + 1)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn field_axioms(q in prop::sample::select(vec![2u64, 3, 4, 7, 8, 9, 16, 25, 27, 49]), a in 0u32..49, b in 0u32..49, c in 0u32..49) {
        let k = field(q);
        let (a, b, c) = (Fe(a % q as u32), Fe(b % q as u32), Fe(c % q as u32));
        prop_assert_eq!(k.mul(&k.add(&a, &b), &c), k.add(&k.mul(&a, &c), &k.mul(&b, &c)));
        prop_assert_eq!(k.sub(&k.add(&a, &b), &b), a);
        if a != Fe(0) {
            prop_assert_eq!(k.mul(&a, &k.inv(&a).unwrap()), k.one());
        }
        prop_assert_eq!(k.pow(&a, q as u128), a);
    }

    #[test]
    fn factor_reexpands((q, c) in poly_strategy(12)) {
        let k = field(q);
        let f = UniPoly::new(c.into_iter().map(Fe).collect());
        prop_assume!(!f.is_zero());
        let mut prod = UniPoly::constant(&k, *f.lead().unwrap());
        for (g, m) in poly::factor(&f, &k).unwrap() {
            prop_assert!(poly::is_irreducible(&g, &k));
            prod = prod.mul(&g.pow(m, &k), &k);
        }
        prop_assert_eq!(prod, f);
    }

    #[test]
    fn resultant_detects_common_factor((q, a) in poly_strategy(6), b in prop::collection::vec(0u32..5, 1..7)) {
        let k = field(q);
        let f = UniPoly::new(a.into_iter().map(Fe).collect());
        let g = UniPoly::new(b.into_iter().map(|x| Fe(x % q as u32)).collect());
        prop_assume!(!f.is_zero() && !g.is_zero());
        let r = resultant(&f, &g, &k).unwrap();
        prop_assert_eq!(r == Fe(0), f.gcd(&g, &k).deg() > 0);
    }

    #[test]
    fn jets_roundtrip(q in prop::sample::select(vec![2u64, 3, 5]), a in 0u32..3, i in 1i64..4, seed in any::<u64>(), deg in 1usize..3) {
        let s = Surface::over(a, q).unwrap();
        let k = s.field().clone();
        let fiber = ClosedFiber::all_of_degree(&k, deg).unwrap().into_iter().last().unwrap();
        let b = Bidegree::new(i, 2 * deg as i64 + 1);
        let f = random_section_indexed(&s, b, seed, 0).unwrap();
        let jet = restrict_to_fiber_jet(&f, &fiber).unwrap();
        let back = jet_to_section(&s, b, &jet).unwrap();
        prop_assert_eq!(restrict_to_fiber_jet(&back, &fiber).unwrap(), jet);
    }

    #[test]
    fn scaling_keeps_report(q in prop::sample::select(vec![3u64, 5]), a in 0u32..3, i in 1i64..4, j in 0i64..5, seed in any::<u64>(), c in 1u32..5) {
        let s = Surface::over(a, q).unwrap();
        let f = random_section_indexed(&s, Bidegree::new(i, j), seed, 0).unwrap();
        prop_assume!(!f.is_zero());
        let c = Fe(c % q as u32);
        prop_assume!(c != Fe(0));
        let g = f.scale(c);
        prop_assert_eq!(singular_fibers(&f).unwrap().verdict, singular_fibers(&g).unwrap().verdict);
        prop_assert_eq!(singular_fibers(&f).unwrap().fibers, singular_fibers(&g).unwrap().fibers);
    }

    #[test]
    fn chart_swap_keeps_goodness(q in prop::sample::select(vec![2u64, 3]), i in 1i64..4, j in 0i64..5, seed in any::<u64>()) {
        // goodness at s = 0 read in chart t = 1 equals goodness at t = 0 of the
        // swapped section, read in chart s = 1
        let s = Surface::over(0, q).unwrap();
        let f = random_section_indexed(&s, Bidegree::new(i, j), seed, 0).unwrap();
        let swapped = f.substitute_base([Fe(0), Fe(1), Fe(1), Fe(0)]).unwrap();
        let k = s.field();
        let at_s = restrict_to_fiber_jet(&f, &ClosedFiber::at_zero()).unwrap();
        let at_t = restrict_to_fiber_jet(&swapped, &ClosedFiber::at_infinity()).unwrap();
        prop_assert_eq!(is_good_pair(k, &at_s), is_good_pair(k, &at_t));
    }

    #[test]
    fn report_lists_exactly_bad_fibers(q in prop::sample::select(vec![2u64, 3]), a in 0u32..2, i in 1i64..3, j in 0i64..4, seed in any::<u64>()) {
        let s = Surface::over(a, q).unwrap();
        let k = s.field().clone();
        let f = random_section_indexed(&s, Bidegree::new(i, j), seed, 0).unwrap();
        prop_assume!(!f.is_zero());
        let rep = singular_fibers(&f).unwrap();
        prop_assume!(rep.verdict != bertini::smoothcheck::Verdict::NonReduced);
        let mut all = vec![ClosedFiber::at_infinity()];
        for e in 1..=3 {
            all.extend(ClosedFiber::all_of_degree(&k, e).unwrap().into_iter().filter(|f| f.chart() == bertini::hirzebruch::Chart::T));
        }
        for fiber in all {
            let bad = !is_good_pair(&k, &restrict_to_fiber_jet(&f, &fiber).unwrap());
            prop_assert_eq!(bad, rep.fibers.contains(&fiber), "{:?}", fiber);
        }
    }
}
