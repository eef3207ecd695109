//! The element code against the Neumann rectangle.

use ladder_spectra::fem::neumann_rectangle_check;

fn main() -> ladder_spectra::Result<()> {
    let c = neumann_rectangle_check(1.0, 0.7, 6, 8, 4)?;
    println!("exact {:.5?}", c.exact);
    for ((h, vals), err) in c.h.iter().zip(&c.computed).zip(&c.max_rel_error) {
        println!("h = {h:.4}: {vals:.5?} worst rel error {err:.2e}");
    }
    println!("order {:.3?}", c.order);
    Ok(())
}
