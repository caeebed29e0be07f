// ψ and κ integrals on moduli of stable curves.

use tautrel::wkint::{kappa_psi_integral, psi_integral, KappaPsiMonomial, PsiMonomial};

pub fn run() -> tautrel::Result<()> {
    let psi = [(0, vec![0, 0, 0]), (1, vec![1]), (2, vec![4]), (2, vec![2, 2, 2]), (3, vec![7])];
    for (g, exps) in psi {
        let value = psi_integral(&PsiMonomial::new(g, exps.clone()))?;
        println!("<τ {exps:?}>_{g} = {value}");
    }
    let kappa = [(1, vec![1], vec![]), (1, vec![0], vec![1]), (0, vec![0; 5], vec![1, 1]), (2, vec![], vec![3])];
    for (g, exps, ks) in kappa {
        let value = kappa_psi_integral(&KappaPsiMonomial::new(g, exps.clone(), ks.clone()))?;
        println!("g={g} ψ{exps:?} κ{ks:?}: {value}");
    }
    // off-dimension input is reported, not silently zero
    let err = psi_integral(&PsiMonomial::new(1, vec![2])).unwrap_err();
    println!("<τ_2>_1: {err}");
    Ok(())
}

fn main() {
    run().expect("intersection example");
}
