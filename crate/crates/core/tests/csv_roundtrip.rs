use chainxfer::circuit::Scheme;
use chainxfer::sweep::{read_csv, to_csv_string, SurfaceRecord};
use proptest::prelude::*;

fn scheme() -> impl Strategy<Value = Scheme> {
    prop::sample::select(Scheme::TRANSFER.to_vec())
}

fn record() -> impl Strategy<Value = SurfaceRecord> {
    (
        (scheme(), 3usize..14, 0.0..=1.0f64, 0.0..=1.0f64, 0.0..=1.0f64, 0.0..=1.0f64),
        (
            prop::option::of(0.0..=1.0f64),
            prop::option::of(0.0..=1.0f64),
            prop::option::of(0.0..0.5f64),
            prop::option::of(1u64..1_000_000),
            prop::option::of(any::<u64>()),
            prop::option::of(1e-17..1e-3f64),
        ),
    )
        .prop_map(|((scheme, n, p, q, sr, st), (fidelity, hellinger, stderr, shots, seed, oracle_diff))| {
            SurfaceRecord {
                scheme,
                n,
                p,
                q,
                success_recorded: sr,
                success_true: st,
                fidelity,
                hellinger,
                stderr,
                shots,
                seed,
                oracle_diff,
            }
            .quantized()
        })
}

proptest! {
    #[test]
    fn csv_round_trip_is_exact(records in prop::collection::vec(record(), 0..20)) {
        let text = to_csv_string(&records).unwrap();
        let back = read_csv(text.as_bytes()).unwrap();
        prop_assert_eq!(&back, &records);
        prop_assert_eq!(to_csv_string(&back).unwrap(), text);
    }
}

#[test]
fn wrong_header_is_rejected() {
    let text = "scheme,n,p\nswap,3,0\n";
    assert!(read_csv(text.as_bytes()).is_err());
}
