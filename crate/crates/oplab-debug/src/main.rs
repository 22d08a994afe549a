fn main() {
    use oplab_core::suite::*;
    use oplab_core::certify::TheoremId;
    use oplab_core::linalg::*;
    use oplab_core::Tolerance;
    let t = Tolerance::default();
    let seed = 2487908856564812145u64;
    let (phi, n) = draw_normal_trial_inputs(seed, (2,10)).unwrap();
    let phi_n = phi.apply(&n).unwrap();
    let lhs = operator_abs(&phi_n).unwrap().to_matrix();
    let v = oplab_core::certify::certifying_unitary(&phi_n, t).unwrap();
    // check V * phi_n == |phi_n|
    let recon = &v * &phi_n;
    println!("||V phi(N) - |phi(N)|| = {:.3e}", op_norm(&(&recon - &lhs)));
    println!("||V*V - I|| = {:.3e}", op_norm(&(v.adjoint() * &v - CMatrix::identity(7,7))));
    let phi_absn = hermitian_part(&phi.apply(&operator_abs(&n).unwrap().to_matrix()).unwrap());
    let conj = hermitian_part(&(&v * &phi_absn * v.adjoint()));
    let pa = PsdMatrix::from_matrix(&phi_absn, t).unwrap();
    let pc = PsdMatrix::from_matrix(&conj, t).unwrap();
    println!("A eigs    {:?}", &pa.eigenvalues()[..3]);
    println!("conj eigs {:?}", &pc.eigenvalues()[..3]);
    let sum = PsdMatrix::from_matrix(&hermitian_part(&(pa.to_matrix()+pc.to_matrix())), t).unwrap();
    println!("sum eigs  {:?}", sum.eigenvalues());
    let join_cut = 1e-12 * sum.max_eigenvalue();
    let s = sum.eigenvalues().iter().filter(|&&x| x > join_cut).count();
    println!("join_cut {:.3e}  s = {s}");
    // does supp(lhs) sit inside supp(A)?
    let cutoff = 1e-8 * pa.max_eigenvalue();
    let p_a = pa.support_projection(cutoff).to_matrix();
    let l = PsdMatrix::from_matrix(&lhs, t).unwrap();
    let p_l = l.support_projection(1e-8 * l.max_eigenvalue()).to_matrix();
    println!("|| (I-P_A) P_lhs || = {:.3e}", op_norm(&((CMatrix::identity(7,7)-&p_a) * &p_l)));
    let p_c = pc.support_projection(1e-8*pc.max_eigenvalue()).to_matrix();
    println!("|| (I-P_conj) P_lhs || = {:.3e}", op_norm(&((CMatrix::identity(7,7)-&p_c) * &p_l)));
    let m = oplab_core::means::geometric_mean(&pa, &pc, t).unwrap();
    println!("mean converged {} steps {} value eigs {:?}", m.converged, m.regularization_trace.len(),
             &m.value.eigenvalues()[..3]);
}
