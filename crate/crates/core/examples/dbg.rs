fn main() {
    use moduli::bilinear::*;
    use moduli::matrix::Matrix;
    use moduli::scalar::Scalar;
    let s = Scalar::from_int;
    let c100 = c_family(1, Some((&s(0), &s(0)))).unwrap();
    println!("C1(0:0) = {}", c100);
    let inv = cogredient_invariants(&c100).unwrap();
    println!("rank {} sym {} skew {} rad {} span {}", inv.rank, inv.rank_sym, inv.rank_skew, inv.radical, inv.ker_span);
    let r = classify_bilinear_3(&c100);
    println!("classify C1(0:0): {:?}", r.map(|c| c.display()));
    let _ = Matrix::zeros(1,1,moduli::scalar::Backend::Exact);
}
