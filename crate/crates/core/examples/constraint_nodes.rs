//! One d=1 constraint node on its own: the three output functions, and a
//! single pass over a compliant and a violating triple.
//!
//! Run: `cargo run --example constraint_nodes`

use bliss_ldpc::constraint::{co, count_violations, Arm, ConstraintBank};

fn main() -> bliss_ldpc::error::Result<()> {
    for arm in Arm::ALL {
        println!("{arm:?}: co(+3, +5) = {:+}, co(+2, -7) = {:+}", co(arm, 3.0, 5.0, 1.0), co(arm, 2.0, -7.0, 1.0));
    }

    for t in [[5.0, 5.0, 5.0], [5.0, -5.0, 5.0]] {
        let mut bank = ConstraintBank::over_span(0..3, 1.0)?;
        bank.flood_pass(&t, 64.0);
        let b = bank.b()[0];
        let after: Vec<f64> = t.iter().zip(b).map(|(x, y)| x + y).collect();
        println!("t = {t:?}  b = {b:?}  t + b = {after:?}");
    }

    let bits = [0, 1, 0, 1, 0, 0, 1, 1];
    println!("violations in {bits:?}: {}", count_violations(&bits, 0..bits.len()));
    Ok(())
}
