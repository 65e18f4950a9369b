//! Property tests for the coding layer: packing is a bijection, encoding
//! is linear in the coefficient vector, and any full-rank set of coded
//! packets decodes back to the sources.

use proptest::prelude::*;

use gf_rlnc::rlnc::{decode, encode, rank, CodingVector, DecodeOutcome, Generation, VectorRng};
use gf_rlnc::{Field, FieldId, FieldSpec};

fn any_field() -> impl Strategy<Value = FieldId> {
    prop::sample::select(FieldId::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn packing_any_byte_round_trips(id in any_field(), byte in any::<u8>()) {
        // Every byte is a valid packed word group, whatever the field.
        let spec = FieldSpec::new(id);
        let words = spec.unpack_words(&[byte]);
        prop_assert_eq!(words.len(), spec.words_per_byte() as usize);
        for &w in &words {
            prop_assert!(spec.contains(w));
        }
        prop_assert_eq!(spec.pack_words(&words).unwrap(), vec![byte]);
    }

    #[test]
    fn packing_valid_words_round_trips(id in any_field(), seed in any::<u64>()) {
        let spec = FieldSpec::new(id);
        let mut rng = VectorRng::new(seed);
        let words = rng.next_vector(&spec, spec.words_per_byte() as usize * 5);
        let bytes = spec.pack_words(words.as_slice()).unwrap();
        prop_assert_eq!(bytes.len(), 5);
        prop_assert_eq!(spec.unpack_words(&bytes), words.as_slice().to_vec());
    }

    #[test]
    fn encoding_is_linear_in_the_vector(
        id in any_field(),
        n in 1usize..6,
        blocks in 1usize..4,
        seed in any::<u64>(),
    ) {
        let field = Field::new(id);
        let kernel = field.select_kernel(None).unwrap();
        let gen = Generation::random(*field.spec(), n, blocks * 64, seed).unwrap();
        let mut rng = VectorRng::new(seed.wrapping_add(1));
        let v1 = rng.next_vector(field.spec(), n);
        let v2 = rng.next_vector(field.spec(), n);
        let sum = CodingVector::new(
            v1.as_slice().iter().zip(v2.as_slice()).map(|(a, b)| a ^ b).collect(),
            field.spec(),
        ).unwrap();

        let p1 = encode(&field, &gen, &v1, kernel).unwrap();
        let p2 = encode(&field, &gen, &v2, kernel).unwrap();
        let ps = encode(&field, &gen, &sum, kernel).unwrap();

        let xored: Vec<u8> = p1.payload.iter().zip(p2.payload.iter()).map(|(a, b)| a ^ b).collect();
        prop_assert_eq!(&xored[..], &ps.payload[..]);
    }

    #[test]
    fn full_rank_packet_sets_decode(
        id in any_field(),
        n in 1usize..6,
        blocks in 1usize..4,
        seed in any::<u64>(),
    ) {
        let field = Field::new(id);
        let kernel = field.select_kernel(None).unwrap();
        let gen = Generation::random(*field.spec(), n, blocks * 64, seed).unwrap();

        // Draw until the vectors span the space; redundant draws stay in
        // the batch so the decoder also sees dependent packets.
        let mut rng = VectorRng::new(seed.wrapping_add(2));
        let mut vectors = Vec::new();
        for _ in 0..64 {
            vectors.push(rng.next_vector(field.spec(), n));
            if rank(field.spec(), &vectors) == n {
                break;
            }
        }
        prop_assume!(rank(field.spec(), &vectors) == n);

        let coded: Vec<_> = vectors
            .iter()
            .map(|v| encode(&field, &gen, v, kernel).unwrap())
            .collect();
        match decode(&field, &coded, kernel).unwrap() {
            DecodeOutcome::Decoded(out) => prop_assert_eq!(out, gen),
            DecodeOutcome::RankDeficient { rank, needed } => {
                return Err(TestCaseError::fail(format!(
                    "decoder saw rank {rank} of {needed} in a full-rank set"
                )));
            }
        }
    }

    #[test]
    fn rank_never_exceeds_dimensions(
        id in any_field(),
        n in 1usize..8,
        rows in 1usize..10,
        seed in any::<u64>(),
    ) {
        let spec = FieldSpec::new(id);
        let mut rng = VectorRng::new(seed);
        let mut vectors: Vec<_> = (0..rows).map(|_| rng.next_vector(&spec, n)).collect();
        let r = rank(&spec, &vectors);
        prop_assert!(r <= n.min(rows));

        // A duplicated row can never raise the rank.
        vectors.push(vectors[0].clone());
        prop_assert_eq!(rank(&spec, &vectors), r);
    }
}
