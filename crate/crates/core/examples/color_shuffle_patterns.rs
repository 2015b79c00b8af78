//! Lists the six color permutations and the 48 composite per-pixel patterns
//! of the pixel cipher, applied to one sample pixel.
//!
//! ```bash
//! cargo run -p pixcrypt --example color_shuffle_patterns
//! ```

use std::collections::HashSet;

use pixcrypt::pixel::{apply_pattern, COLOR_PERMUTATIONS};

fn main() {
    let names = ['R', 'G', 'B'];
    println!("code  R G B");
    for (code, perm) in COLOR_PERMUTATIONS.iter().enumerate() {
        println!("{code:>4}  {} {} {}", names[perm[0]], names[perm[1]], names[perm[2]]);
    }

    let pixel = [200u8, 100, 30];
    println!("\npixel {pixel:?} under each pattern (mask = pattern / 6, code = pattern % 6):");
    let mut outputs = HashSet::new();
    for pattern in 0..48u8 {
        let out = apply_pattern(pixel, pattern);
        outputs.insert(out);
        print!("{pattern:>2}:{out:?}{}", if pattern % 4 == 3 { "\n" } else { "  " });
    }
    println!("\ndistinct ciphertexts for this pixel: {}", outputs.len());
}
