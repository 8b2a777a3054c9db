//! Quick end-to-end checks on the three introduction examples.

use outf3::automorphism::elementary;
use outf3::pipeline::{self, decide::branch_of, Budgets};
use outf3::Automorphism;

fn examples() -> [(&'static str, Automorphism); 3] {
    [
        ("quadratic", Automorphism::from_ints(&[&[1], &[2, 1], &[3, 2]])),
        ("punctured torus", Automorphism::from_ints(&[&[1, 2], &[3, 1, 2, 2, 1, 2], &[3]])),
        ("wedge", Automorphism::from_ints(&[&[1, 2], &[1], &[3, 1]])),
    ]
}

fn check(name: &str, ok: bool, failures: &mut usize) {
    println!("{} {name}", if ok { "PASS" } else { "FAIL" });
    *failures += usize::from(!ok);
}

pub fn run() -> u8 {
    let b = Budgets::default();
    let mut failures = 0;
    let ex = examples();
    let profiles: Vec<_> = ex.iter().map(|(_, phi)| pipeline::profile(phi, &b)).collect();
    if profiles.iter().any(|p| p.is_err()) {
        println!("FAIL profiles");
        return 3;
    }
    let profiles: Vec<_> = profiles.into_iter().map(Result::unwrap).collect();
    check("quadratic example has degree 2", profiles[0].growth.value.degree == Some(2) && profiles[0].growth.verified, &mut failures);
    check("punctured torus lamination fills", profiles[1].carrier_rank() == Some(3), &mut failures);
    check("wedge lamination carried by a rank-2 factor", profiles[2].carrier_rank() == Some(2), &mut failures);
    let branches: Vec<_> = profiles.iter().map(branch_of).collect();
    let distinct = branches.iter().all(Option::is_some) && branches[0] != branches[1] && branches[1] != branches[2] && branches[0] != branches[2];
    check("three distinct branches", distinct, &mut failures);
    for i in 0..3 {
        for j in 0..3 {
            if i == j {
                continue;
            }
            let ok = pipeline::decide(&ex[i].1, &ex[j].1, &b).is_ok_and(|d| d.verdict.is_no() && pipeline::recheck(&ex[i].1, &ex[j].1, &d, &b));
            check(&format!("{} vs {} is no", ex[i].0, ex[j].0), ok, &mut failures);
        }
    }
    let g = elementary::generators(3);
    let chi = g[4].then(&g[11]).then(&g[20]).then(&g[7]);
    let planted = ex[0].1.conjugate_by(&chi);
    let ok = pipeline::decide(&ex[0].1, &planted, &b).is_ok_and(|d| d.verdict.is_yes() && pipeline::recheck(&ex[0].1, &planted, &d, &b));
    check("planted quadratic conjugate is yes", ok, &mut failures);
    if failures == 0 {
        0
    } else {
        3
    }
}
