use bertini::hirzebruch::{random_section_indexed, Bidegree, Surface};
use bertini::smoothcheck::{brute_force_is_smooth, complete_e_max, jacobian_is_smooth, singular_fibers, Verdict};

/// Fiberwise verdicts against the Groebner oracle on a small grid.
#[test]
fn fiberwise_matches_jacobian() {
    let mut checked = 0;
    let mut singular = 0;
    for q in [2u64, 3] {
        for a in 0..3u32 {
            let s = Surface::over(a, q).unwrap();
            for i in 1..4i64 {
                for j in 0..4i64 {
                    for idx in 0..12u64 {
                        let f = random_section_indexed(&s, Bidegree::new(i, j), 11, idx).unwrap();
                        if f.is_zero() {
                            continue;
                        }
                        let rep = singular_fibers(&f).unwrap();
                        let oracle = jacobian_is_smooth(&f).unwrap();
                        assert_eq!(rep.verdict == Verdict::Smooth, oracle, "{}", f.to_json());
                        if rep.verdict == Verdict::NonReduced {
                            assert_eq!(complete_e_max(&f).unwrap(), None);
                        }
                        checked += 1;
                        singular += usize::from(!oracle);
                    }
                }
            }
        }
    }
    assert!(checked > 800 && singular > 50, "{checked} {singular}");
}

#[test]
fn brute_force_agrees_when_enumerable() {
    let s = Surface::over(1, 2).unwrap();
    for idx in 0..60u64 {
        let f = random_section_indexed(&s, Bidegree::new(2, 1), 5, idx).unwrap();
        if f.is_zero() {
            continue;
        }
        let Some(e_max) = complete_e_max(&f).unwrap() else { continue };
        if e_max > 6 {
            continue;
        }
        assert_eq!(brute_force_is_smooth(&f, e_max).unwrap(), jacobian_is_smooth(&f).unwrap(), "{}", f.to_json());
    }
}

/// Singular at `x = s = w` over `F_4`. The jet on the fiber `s^2 + s + 1`
/// only sees it with the Newton lift of the residue field.
#[test]
fn degree_two_singular_point() {
    let f = bertini::hirzebruch::Section::from_json(r#"{"a":0,"q":2,"i":2,"j":2,"coeffs":[0,1,1,1,1,1,1,1,0]}"#).unwrap();
    assert!(!jacobian_is_smooth(&f).unwrap());
    let rep = singular_fibers(&f).unwrap();
    assert_eq!(rep.verdict, Verdict::Singular);
    assert!(rep.fibers.iter().any(|fb| fb.degree() == 2), "{:?}", rep.fibers);
}
