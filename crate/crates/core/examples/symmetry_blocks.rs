//! Isotypic blocks of a few symmetry presets and the Hamiltonian restricted to them.

use passivity::symmetry::{self, presets};

fn main() -> passivity::Result<()> {
    for name in ["su2-dimer", "u1-pair", "cyclic-4", "dihedral-4", "time-reversal-3"] {
        let model = presets::preset(name)?;
        let h = presets::preset_hamiltonian(name)?;
        let decomp = symmetry::block_decompose(&model)?;
        let parts = symmetry::blocks_of(&h, &decomp, &model)?;
        println!("{name} (d = {}):", model.dim());
        for (b, hl) in decomp.blocks.iter().zip(&parts) {
            let e = passivity::linalg::hermitian_eig(hl)?.values;
            println!("  {:<12} r = {}, m = {}, H_λ spectrum {:.3?}", b.label.to_string(), b.r, b.m, e);
        }
    }
    Ok(())
}
