use tensor_tprod::{factor::t_svd, ginv::t_pinv, Tensor3};

fn main() -> tensor_tprod::Result<()> {
    let a = Tensor3::from_vec(2, 2, 3, (0..12).map(|x| x as f64).collect())?;
    let svd = t_svd(&a)?;
    assert!(svd.report.pass);

    let x = t_pinv(&a)?;
    println!("{}", x.report);
    Ok(())
}
