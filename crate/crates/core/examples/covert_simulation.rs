//! End-to-end simulation: sample a superposition codebook, estimate both
//! users' decoding error, and measure what the warden sees.

use twoway_covert::design::CovertInputDesign;
use twoway_covert::parse_channel;
use twoway_covert::sim::{
    estimate_error_probability, exact_induced_distribution, generate_codebook,
    resolvability_report, CodebookSizes,
};

fn main() -> twoway_covert::Result<()> {
    let ch = parse_channel(include_str!("../channels/example.toml"))?;
    let d = CovertInputDesign::sparse_time_sharing(0.8, 0.8, 0.8, 0.8, 8);
    let sizes = CodebookSizes::new(2, 2, 1, 2, 1)?;
    let cb = generate_codebook(&ch, &d, sizes, 1)?;

    let report = estimate_error_probability(&ch, &cb, 0.1, 2000, 1)?;
    println!(
        "P_e ~ {:.4}  (95% CI {:.4} .. {:.4}, {} errors in {} trials)",
        report.pe_hat, report.ci_low, report.ci_high, report.errors, report.trials
    );

    let induced = exact_induced_distribution(&ch, &cb)?;
    println!("warden output law has {} atoms", induced.len());
    let res = resolvability_report(&ch, &cb, 0.1)?;
    println!("D(Q_hat || Q_Z^n)  = {:.5}", res.d_hat_vs_qz);
    println!("D(Q_hat || Q00^n)  = {:.5}", res.d_hat_vs_q00);
    println!("soft-covering bound {:.5}", res.four_term_bound);

    // with a wider threshold slack the error rate falls as n grows
    for n in [64, 256, 1024, 4096] {
        let d = d.with_n(n);
        let cb = generate_codebook(&ch, &d, CodebookSizes::new(1, 2, 1, 2, 1)?, 1)?;
        let r = estimate_error_probability(&ch, &cb, 0.5, 2000, 1)?;
        println!("n = {n:>4}: P_e ~ {:.4}", r.pe_hat);
    }
    Ok(())
}
