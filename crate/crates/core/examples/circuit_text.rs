//! Builds each scheme, prints its text form, and parses it back.

use chainxfer::circuit::{build, parse_circuit, write_circuit, Scheme};

fn main() -> chainxfer::Result<()> {
    for scheme in Scheme::TRANSFER {
        let body = build(scheme, 3)?;
        let text = write_circuit(&body);
        let back = parse_circuit(&text)?;
        assert_eq!(back, body);
        println!("# {scheme}: {} qubits, {} CNOTs, {} measurements", body.n_qubits(), body.cnot_count(), body.measure_count());
        print!("{text}");
    }
    Ok(())
}
