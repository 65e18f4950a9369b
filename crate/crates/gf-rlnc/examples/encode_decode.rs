//! Random linear network coding end to end: split data into a generation,
//! emit coded packets with random coefficient vectors, and decode once
//! enough independent packets arrive.

use gf_rlnc::rlnc::{decode, encode, CodingVector, DecodeOutcome, Generation, VectorRng};
use gf_rlnc::{Field, FieldId};

fn main() {
    let field = Field::new(FieldId::Gf256);
    let kernel = field.select_kernel(None).unwrap();
    let n = 8;
    let packet_bytes = 256;

    // A generation: n equally sized source packets (zero-padded to block
    // multiples, so decoded output matches the input exactly at this size).
    let payloads: Vec<Vec<u8>> = (0..n)
        .map(|i| (0..packet_bytes).map(|j| (i * 31 + j) as u8).collect())
        .collect();
    let generation = Generation::from_payloads(*field.spec(), &payloads).unwrap();
    println!("generation: {} packets of {} bytes over {}", n, packet_bytes, field.id());

    // Coded packets carry their coefficient vector; a seeded generator
    // makes the sequence reproducible. (Seed 7 happens to draw a rank-7
    // set, a 0.4% event over GF(256): even then nothing breaks, the
    // decoder just asks for more packets.)
    let mut rng = VectorRng::new(8);
    let coded: Vec<_> = (0..n)
        .map(|_| {
            let vector = rng.next_vector(field.spec(), n);
            encode(&field, &generation, &vector, kernel).unwrap()
        })
        .collect();
    println!("encoded {} packets, first vector {:02x?}", coded.len(), coded[0].vector.as_slice());

    // n independent packets decode back to the sources; over GF(256) a
    // random set is independent with probability > 0.996.
    match decode(&field, &coded, kernel).unwrap() {
        DecodeOutcome::Decoded(restored) => {
            assert_eq!(restored, generation);
            println!("decoded all {} source packets from {} coded packets", n, coded.len());
        }
        DecodeOutcome::RankDeficient { rank, needed } => {
            println!("unlucky draw: rank {rank} of {needed}; send more packets and retry")
        }
    }

    // Duplicates add no information: the decoder reports the rank gap
    // instead of guessing.
    let dup = vec![coded[0].clone(), coded[0].clone(), coded[1].clone()];
    match decode(&field, &dup, kernel).unwrap() {
        DecodeOutcome::Decoded(_) => unreachable!("two distinct vectors cannot span rank 8"),
        DecodeOutcome::RankDeficient { rank, needed } => {
            println!("duplicates: rank {rank} of {needed}, decode withheld")
        }
    }

    // Unit vectors pass packets through unchanged: systematic operation.
    let passthrough = encode(&field, &generation, &CodingVector::unit(n, 3), kernel).unwrap();
    assert_eq!(&passthrough.payload[..], &generation.packet(3)[..]);
    println!("unit vector 3 reproduces source packet 3 exactly");
}
