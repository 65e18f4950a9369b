//! Why field size matters for RLNC overhead: the chance that n random
//! vectors have full rank, and how often coefficients are trivial (0 or
//! 1), estimated empirically and compared with the closed forms.

use gf_rlnc::rlnc::{rank, VectorRng};
use gf_rlnc::{FieldId, FieldSpec};

fn main() {
    let n = 16;
    let trials = 2000;

    // P(full rank) for n random vectors over GF(q) is
    // prod_{k=1..n} (1 - q^-k); it converges fast as q grows.
    println!("full-rank probability of {n} random vectors over {n} packets:");
    for id in FieldId::ALL {
        let spec = FieldSpec::new(id);
        let expected: f64 = (1..=n as i32).map(|k| 1.0 - f64::from(spec.q()).powi(-k)).product();

        let mut rng = VectorRng::new(42);
        let full = (0..trials)
            .filter(|_| {
                let vectors: Vec<_> = (0..n).map(|_| rng.next_vector(&spec, n)).collect();
                rank(&spec, &vectors) == n
            })
            .count();
        println!(
            "  {id}: measured {:.4}, closed form {expected:.4}",
            full as f64 / trials as f64
        );
    }

    // Fraction of coefficients that need no table work at all: 2/q.
    println!("\ntrivial coefficients (0 or 1) per field:");
    for id in FieldId::ALL {
        let spec = FieldSpec::new(id);
        let mut rng = VectorRng::new(1);
        let draws = 100_000;
        let trivial = (0..draws).filter(|_| rng.next_coefficient(&spec) <= 1).count();
        println!(
            "  {id}: measured {:.4}, exact {:.4}",
            trivial as f64 / draws as f64,
            2.0 / f64::from(spec.q())
        );
    }

    println!("\nsmall fields trade cheap arithmetic for more dependent packets;");
    println!("GF(2) needs ~1.6 extra packets on average, GF(256) almost none.");
}
