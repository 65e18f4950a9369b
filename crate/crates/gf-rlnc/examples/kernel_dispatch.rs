//! Runtime kernel selection: what the CPU offers, which kernels each field
//! can use, what automatic selection picks, and how explicit preferences
//! succeed or fail.

use gf_rlnc::{detect_features, select_kernel, supported_kernels, FeatureSet, FieldId, FieldSpec};

fn main() {
    let features = detect_features();
    println!("cpu features: {features:?}\n");

    for id in FieldId::ALL {
        let spec = FieldSpec::new(id);
        let names: Vec<String> =
            supported_kernels(&spec, &features).iter().map(|k| k.to_string()).collect();
        let auto = select_kernel(&spec, &features, None).unwrap();
        println!("{id}: picks {auto}, supports [{}]", names.join(", "));
    }

    // A preference is honored when it is usable for the field on this CPU.
    let gf256 = FieldSpec::new(FieldId::Gf256);
    let scalar = "scalar".parse().unwrap();
    let describe = |r: Result<gf_rlnc::KernelId, gf_rlnc::KernelError>| match r {
        Ok(k) => k.to_string(),
        Err(e) => format!("refused: {e}"),
    };
    println!(
        "\nGF(256) with scalar preference: {}",
        describe(select_kernel(&gf256, &features, Some(scalar)))
    );

    // The xor kernels only exist over GF(2), where every coefficient is
    // 0 or 1 and multiply-and-add degenerates to conditional XOR.
    let xor64 = "xor64".parse().unwrap();
    println!(
        "GF(256) with xor64 preference: {}",
        describe(select_kernel(&gf256, &features, Some(xor64)))
    );
    let gf2 = FieldSpec::new(FieldId::Gf2);
    println!(
        "GF(2) with xor64 preference: {}",
        describe(select_kernel(&gf2, &features, Some(xor64)))
    );

    // On a bare CPU the wide kernels are unavailable and selection says so
    // rather than silently falling back.
    let bare = FeatureSet::SCALAR_ONLY;
    let shuffle512 = "shuffle512".parse().unwrap();
    println!(
        "\nscalar-only cpu: GF(256) picks {}, shuffle512 preference gives {}",
        describe(select_kernel(&gf256, &bare, None)),
        describe(select_kernel(&gf256, &bare, Some(shuffle512)))
    );
}
